#![no_main]

use armflow::pipeline::{PipelineConfig, Settings};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(settings) = Settings::from_toml(text) {
        if let Ok(cfg) = PipelineConfig::from_settings(settings) {
            cfg.validate().expect("accepted configs are valid");
        }
    }
});

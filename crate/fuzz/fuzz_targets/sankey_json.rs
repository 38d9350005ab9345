#![no_main]

use armflow::{emit_json, SankeyGraph};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(graph) = SankeyGraph::from_json(data) {
        // Values are rounded on output, so only the second trip is exact.
        let once = emit_json(&graph);
        let back = SankeyGraph::from_json(&once).expect("emitted JSON parses");
        assert_eq!(back.nodes(), graph.nodes());
        assert_eq!(emit_json(&SankeyGraph::from_json(&emit_json(&back)).unwrap()), emit_json(&back));
    }
});

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name).to_str().unwrap().to_owned()
}

fn armflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_armflow")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let config = dir.path().join("run.toml");
    fs::write(
        &config,
        format!(
            "input = {:?}\nout = {:?}\nperiods = 2\nnp = 20\nmax-evals = 300\nruns = 2\nseed = 1\nmap-size = 2\n",
            fixture("toy.csv"),
            out.to_str().unwrap()
        ),
    )
    .unwrap();
    let o = armflow(&["pipeline", "--config", config.to_str().unwrap(), "--map-size", "1"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("period-1") && text.contains("period-2"));
    assert!(text.contains("Association rule"));
    let sel = fs::read_to_string(out.join("selection-period-1.json")).unwrap();
    assert_eq!(selected_rules(&sel), 1, "--map-size on the command line wins over the file");
}

/// Number of rules in a pretty-printed selection file.
fn selected_rules(text: &str) -> usize {
    let start = text.find("\"rules\": [").unwrap();
    let end = start + text[start..].find(']').unwrap();
    text[start..end].matches("=>").count()
}

#[test]
fn failures_name_the_stage() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();

    let o = armflow(&["pipeline", "--input", "/nonexistent.csv", "--out", out]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("load stage failed"), "{}", stderr(&o));

    let o = armflow(&["pipeline", "--input", &fixture("toy.csv"), "--out", out, "--cr", "1.5"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("config stage failed"), "{}", stderr(&o));

    let o = armflow(&["pipeline", "--input", &fixture("toy.csv"), "--out", out, "--periods", "9"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("partition stage failed"), "{}", stderr(&o));

    let o = armflow(&["select", "--input", &fixture("toy.csv"), "--out", out]);
    assert!(!o.status.success(), "no archives to read");
    assert!(stderr(&o).contains("load stage failed"), "{}", stderr(&o));

    let bad = dir.path().join("archive-period-1.json");
    fs::write(&bad, "{not json").unwrap();
    let o = armflow(&["select", "--input", &fixture("toy.csv"), "--out", out, bad.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("load stage failed"), "{}", stderr(&o));

    let o = armflow(&["pipeline", "--input", &fixture("toy.csv")]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("--out"), "{}", stderr(&o));
}

#[test]
fn boundaries_flag_drives_date_partitions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = armflow(&[
        "mine",
        "--input",
        &fixture("training_log.csv"),
        "--catalog",
        &fixture("training_log.catalog.json"),
        "--boundaries",
        "2014-05-15,2015-07-15,2016-06-01",
        "--np",
        "20",
        "--max-evals",
        "200",
        "--runs",
        "1",
        "--out",
        out,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for i in 1..=4 {
        assert!(dir.path().join(format!("archive-period-{i}.json")).exists());
    }
    assert!(!dir.path().join("report.html").exists());
}

#[test]
fn select_and_sankey_read_from_another_directory() {
    let dir = tempfile::tempdir().unwrap();
    let (src, dst) = (dir.path().join("src"), dir.path().join("dst"));
    fs::create_dir(&src).unwrap();
    fs::write(
        src.join("archive-morning.json"),
        r#"[{"rule": "A_a1 => B_b1", "support": 0.5, "confidence": 0.6666666666666666, "fitness": 0.5833333333333333}]"#,
    )
    .unwrap();
    let toy = fixture("toy.csv");
    let (s, d) = (src.to_str().unwrap(), dst.to_str().unwrap());
    let o = armflow(&["select", "--input", &toy, "--from", s, "--out", d]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = armflow(&["sankey", "--input", &toy, "--out", d]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(
        fs::read_to_string(dst.join("sankey-morning.json")).unwrap(),
        r#"{"nodes":[{"name":"A_a1"},{"name":"B_b1"}],"links":[{"source":0,"target":1,"value":0.583333}]}"#
    );
}

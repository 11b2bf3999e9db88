use std::path::PathBuf;

use comodel_streams::cli;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

/// Runs the CLI with `@name` arguments expanded to corpus paths.
fn invoke(args: &[&str]) -> (i32, String, String) {
    let argv = std::iter::once("comodel".to_string()).chain(args.iter().map(|a| match a.strip_prefix('@') {
        Some(name) => data(name),
        None => a.to_string(),
    }));
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn ok(args: &[&str]) -> String {
    let (code, out, err) = invoke(args);
    assert_eq!(code, 0, "stderr: {err}");
    out
}

#[test]
fn trace_examples() {
    let args = ["trace", "--system", "@const2.json", "--stream", "@stream_01.json", "--length", "4"];
    assert_eq!(ok(&args), "b b b b\nconsumed 4\n");
    let mut lazy = args.to_vec();
    lazy.push("--normalized");
    assert_eq!(ok(&lazy), "b b b b\nconsumed 0\n");
}

#[test]
fn run_on_comodel() {
    let out = ok(&["run", "--system", "@naturals.json", "--term", "@sum_two_reads.json", "--state", "s'"]);
    assert_eq!(out, "17 s''\n");
    let out = ok(&["run", "--system", "@naturals.json", "--term", "@sum_two_reads.json"]);
    assert_eq!(out, "9 s''\n");
}

#[test]
fn equivalence_verdicts() {
    assert_eq!(ok(&["equiv", "--left", "@const1.json", "--right", "@const2.json"]), "equivalent at (6, 6)\n");
    let out = ok(&["equiv", "--left", "@steady.json", "--right", "@alternating.json"]);
    assert!(out.starts_with("not equivalent at (6, 6)"), "{out}");
    let out = ok(&["equiv", "--left", "@lts_p.json", "--right", "@lts_q.json", "--method", "bisim"]);
    assert_eq!(out, "not bisimilar\n");
    let out = ok(&["equiv", "--left", "@const1.json", "--right", "@const2.json", "--seed", "3"]);
    assert!(out.starts_with("equivalent"), "{out}");
}

#[test]
fn prefix_semantics() {
    assert_eq!(ok(&["lts-traces", "--system", "@lts_p.json", "--length", "2"]), "a b\na c\n2 traces of length 2\n");
    let out = ok(&["gen-dist", "--system", "@coin.json", "--length", "2"]);
    assert_eq!(out, "0 0\t1/4\n0 1\t1/4\n1 0\t1/4\n1 1\t1/4\ntotal 1\n");
}

#[test]
fn normalize_and_unfold() {
    assert_eq!(ok(&["normalize", "--system", "@const2.json"]), "step (b, read(*, *))\n");
    let out = ok(&["unfold", "--system", "@const2.json", "--depth", "1", "--outlen", "1"]);
    assert_eq!(out, "[]\n  0 -> [b] ...\n  1 -> [b] ...\n");
    let out = ok(&["unfold", "--system", "@const2.json", "--depth", "1", "--outlen", "3", "--normalized"]);
    assert_eq!(out, "[b b b] ...\n");
}

#[test]
fn membership() {
    let base = ["member", "--term", "@echo_first.json", "--stream", "@stream_10.json", "--alphabet", "0,1", "--value"];
    let with = |v: &'static str| {
        let mut a = base.to_vec();
        a.push(v);
        ok(&a)
    };
    assert_eq!(with("1"), "true\n");
    assert_eq!(with("0"), "false\n");
}

#[test]
fn machine_format() {
    let out = ok(&["--format", "machine", "trace", "--system", "@echo.json", "--stream", "@stream_01.json", "--length", "3"]);
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["command"], "trace");
    assert_eq!(v["consumed"], 3);
    assert_eq!(v["output"], serde_json::json!(["0", "1", "1"]));
    assert_eq!(v["profile"], serde_json::json!([1, 2, 3]));
}

/// Corpus pairs (downstream, upstream) sharing the middle alphabet.
const PAIRS: [(&str, &str); 5] = [
    ("xor.json", "echo.json"),
    ("echo.json", "xor.json"),
    ("echo.json", "delay.json"),
    ("ignore2.json", "echo.json"),
    ("const2.json", "echo.json"),
];

#[test]
fn lazy_and_chi_composites_print_identically() {
    for (left, right) in PAIRS {
        for stream in ["stream_01.json", "stream_alt.json", "stream_10.json"] {
            let (left, right, stream) = (format!("@{left}"), format!("@{right}"), format!("@{stream}"));
            let compose = |method| {
                ok(&["compose", "--left", &left, "--right", &right, "--stream", &stream, "--length", "8", "--method", method])
            };
            let lazy = compose("lazy");
            assert_eq!(lazy, compose("hgp"), "{left} after {right} on {stream}");
            assert!(lazy.contains("consumed"), "{lazy}");
        }
    }
}

#[test]
fn compose_prints_a_loadable_system() {
    let out = ok(&["compose", "--left", "@xor.json", "--right", "@echo.json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let sys = comodel_streams::format::system_from_json("composite", &v).unwrap();
    assert_eq!(sys.kind().name(), "processor");

    let out = ok(&["compose", "--left", "@xor.json", "--right", "@coin.json"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let sys = comodel_streams::format::system_from_json("composite", &v).unwrap();
    assert_eq!(sys.kind().name(), "generative");
}

#[test]
fn corpus_round_trips() {
    for name in [
        "const1.json", "const2.json", "ignore2.json", "echo.json", "xor.json", "alternating.json", "steady.json",
        "delay.json", "lts_p.json", "lts_q.json", "bits_lts.json", "coin.json",
    ] {
        let sys = comodel_streams::format::load_system(data(name).as_ref()).unwrap();
        let again = comodel_streams::format::system_from_json(name, &comodel_streams::format::system_to_json(&sys)).unwrap();
        assert_eq!(sys, again, "{name}");
    }
}

#[test]
fn exit_codes() {
    let (code, _, err) = invoke(&["trace", "--system", "@echo.json", "--stream", "/nonexistent/stream.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("stream.json"), "{err}");

    let (code, _, err) = invoke(&["compose", "--left", "@xor.json", "--right", "@steady.json"]);
    assert_eq!(code, 1);
    assert!(err.contains("alphabet mismatch"), "{err}");

    let (code, _, _) = invoke(&["equiv", "--left", "@lts_p.json", "--right", "@echo.json"]);
    assert_eq!(code, 1);

    let (code, _, _) = invoke(&["trace", "--system", "@echo.json", "--stream", "@stream_01.json", "--cap", "0"]);
    assert_eq!(code, 2);

    let (code, _, _) = invoke(&["frobnicate"]);
    assert_eq!(code, 2);
}

#[test]
fn invalid_files_name_the_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let leaky = dir.path().join("leaky.json");
    std::fs::write(
        &leaky,
        r#"{"kind":"generative","outputAlphabet":["x"],"states":["s"],"gamma":{"s":[["x","s",9,10]]}}"#,
    )
    .unwrap();
    let (code, _, err) = invoke(&["gen-dist", "--system", leaky.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("mass conservation"), "{err}");

    let dangling = dir.path().join("dangling.json");
    std::fs::write(
        &dangling,
        r#"{"kind":"processor","inputAlphabet":["0"],"outputAlphabet":["0"],"states":["s"],"gamma":{"s":{"emit":["0","ghost"]}}}"#,
    )
    .unwrap();
    let (code, _, err) = invoke(&["trace", "--system", dangling.to_str().unwrap(), "--stream", "@stream_01.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("ghost"), "{err}");
}

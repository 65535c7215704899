//! Golden-file checks for the batch front end: stored reports must be
//! reproduced byte for byte across runs, and job documents must round-trip
//! through their serialized form unchanged.

use satake::cli::{emit_spec, load_spec, parse_spec, run, CommandName, JobSpec, OutputFormat};

fn check_golden(spec: &JobSpec, stored: &str) {
    let first = run(spec).expect("golden job runs");
    let second = run(spec).expect("golden job runs twice");
    assert_eq!(first.rendered, second.rendered, "repeat run disagrees");
    assert!(first.verdict_ok, "golden job reports a failing verdict");
    assert_eq!(
        first.rendered, stored,
        "rendered report drifted from the stored file"
    );
}

#[test]
fn modular_curve_table_matches_stored_report() {
    let mut spec = JobSpec::new(CommandName::Normalize);
    spec.preset = Some("modular-curve".into());
    spec.kappa = Some("k=2".into());
    check_golden(&spec, include_str!("golden/modular-curve.json"));
}

#[test]
fn hilbert_table_matches_stored_report() {
    let mut spec = JobSpec::new(CommandName::Normalize);
    spec.preset = Some("hilbert".into());
    spec.kappa = Some("4,2".into());
    spec.central = Some(-6);
    check_golden(&spec, include_str!("golden/hilbert.json"));
}

#[test]
fn siegel_table_matches_stored_report() {
    let mut spec = JobSpec::new(CommandName::Normalize);
    spec.preset = Some("siegel".into());
    spec.kappa = Some("3,1".into());
    check_golden(&spec, include_str!("golden/siegel.json"));
}

#[test]
fn gu21_table_matches_stored_report() {
    let mut spec = JobSpec::new(CommandName::Normalize);
    spec.preset = Some("gu21".into());
    spec.kappa = Some("2,1".into());
    check_golden(&spec, include_str!("golden/gu21.json"));
}

#[test]
fn linear_strata_report_matches_stored_report() {
    let mut spec = JobSpec::new(CommandName::Strata);
    spec.family = Some("linear".into());
    spec.n = Some(3);
    spec.p = Some(2);
    spec.q = Some(1);
    spec.j = Some(1);
    check_golden(&spec, include_str!("golden/strata-linear-321.json"));
}

#[test]
fn satake_report_matches_stored_report() {
    let mut spec = JobSpec::new(CommandName::Satake);
    spec.lambda = Some("2,1,0".into());
    check_golden(&spec, include_str!("golden/satake-210.json"));
}

#[test]
fn tsv_rendering_is_deterministic() {
    let mut spec = JobSpec::new(CommandName::Satake);
    spec.lambda = Some("2,1,0".into());
    spec.format = Some(OutputFormat::Tsv);
    let first = run(&spec).expect("tsv job runs");
    let second = run(&spec).expect("tsv job runs twice");
    assert_eq!(first.rendered, second.rendered);
    assert!(first.rendered.starts_with("forward\t"));
}

#[test]
fn job_documents_round_trip() {
    let mut samples = Vec::new();

    let mut s = JobSpec::new(CommandName::Normalize);
    s.preset = Some("hilbert".into());
    s.kappa = Some("4,2".into());
    s.central = Some(-6);
    samples.push(s);

    let mut s = JobSpec::new(CommandName::Normalize);
    s.family = Some("unitary".into());
    s.n = Some(3);
    s.kappa = Some("2,1;0".into());
    s.lambda = Some("1,0,0".into());
    samples.push(s);

    let mut s = JobSpec::new(CommandName::Admissible);
    s.family = Some("gl".into());
    s.n = Some(2);
    s.mu = Some("1,0".into());
    s.q0 = Some(3);
    samples.push(s);

    let mut s = JobSpec::new(CommandName::NewtonCheck);
    s.valuations = Some("0,2".into());
    s.degrees = Some("1,1".into());
    s.nu = Some("1,1".into());
    s.height_bound = Some(4);
    s.format = Some(OutputFormat::Tsv);
    s.budget = Some(10_000);
    s.seed = Some(7);
    samples.push(s);

    samples.push(JobSpec::new(CommandName::Consistency));

    for spec in &samples {
        let text = emit_spec(spec);
        let back = parse_spec(&text).expect("emitted document parses");
        assert_eq!(&back, spec, "document changed under emit/parse");
        assert_eq!(emit_spec(&back), text, "serialized form is not a fixed point");
    }
}

#[test]
fn hand_written_documents_survive_reserialization() {
    let documents = [
        r#"{"kappa":"3,1","command":"normalize","preset":"siegel"}"#,
        r#"{
            "command": "strata",
            "family": "gsp",
            "g": 2
        }"#,
        r#"{"command":"katz-mazur","valuations":"0,1","infchar":"0,-1"}"#,
    ];
    for text in documents {
        let first = parse_spec(text).expect("document parses");
        let second = parse_spec(&emit_spec(&first)).expect("reserialized document parses");
        assert_eq!(first, second);
    }
}

#[test]
fn job_documents_load_from_disk() {
    let mut spec = JobSpec::new(CommandName::Strata);
    spec.family = Some("gsp".into());
    spec.g = Some(2);
    let path = std::env::temp_dir().join(format!("satake-job-{}.json", std::process::id()));
    std::fs::write(&path, emit_spec(&spec)).expect("spec written");
    let loaded = load_spec(&path);
    std::fs::remove_file(&path).ok();
    assert_eq!(loaded.expect("spec loads"), spec);
}

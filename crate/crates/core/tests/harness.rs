use nodal_lab::harness::{emit_to_path, ExperimentConfig, ExperimentKind, ExperimentResult, OutputFormat};
use nodal_lab::run;

fn zero_count(samples: usize, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(ExperimentKind::ZeroCount);
    cfg.lambda = Some(10.0);
    cfg.samples = samples;
    cfg.seed = seed;
    cfg.no_timing = true;
    cfg
}

#[test]
fn stderr_shrinks_like_inverse_root_samples() {
    let small = run(&zero_count(1000, 3)).unwrap().results[0].stderr;
    let large = run(&zero_count(4000, 3)).unwrap().results[0].stderr;
    let ratio = large / small;
    assert!((0.45..=0.55).contains(&ratio), "{ratio}");
}

#[test]
fn identical_seeds_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    for format in [OutputFormat::Csv, OutputFormat::Json] {
        let paths: Vec<_> = (0..2)
            .map(|i| {
                let path = dir.path().join(format!("run{i}.{format:?}"));
                emit_to_path(&run(&zero_count(300, 9)).unwrap().results, format, &path).unwrap();
                std::fs::read(&path).unwrap()
            })
            .collect();
        assert_eq!(paths[0], paths[1]);
    }
    let a = run(&zero_count(300, 9)).unwrap().results;
    let b = run(&zero_count(300, 10)).unwrap().results;
    assert_ne!(a[0].mean, b[0].mean);
}

#[test]
fn json_file_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let results = run(&zero_count(50, 1)).unwrap().results;
    emit_to_path(&results, OutputFormat::Json, &path).unwrap();
    let back: Vec<ExperimentResult> = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(back, results);
    assert!(!back[0].source.is_empty());
}

#[test]
fn config_file_with_a_form() {
    let cfg = ExperimentConfig::from_json(
        r#"{"kind": "pairing", "n": 1, "lambda": 12, "samples": 40,
            "form": {"weight": {"type": "cos-squared", "axis": 0}, "r0": 0.5, "r1": 2.0}}"#,
    )
    .unwrap();
    let report = run(&cfg).unwrap();
    assert_eq!(report.results[0].samples, 40);
    assert!(report.results[0].mean < 0.0);
}

#[test]
fn every_kind_runs_at_small_size() {
    for kind in ExperimentKind::ALL {
        let mut cfg = ExperimentConfig::new(kind);
        cfg.samples = 4;
        cfg.no_timing = true;
        cfg.n = match kind {
            ExperimentKind::ConstantsTable | ExperimentKind::BerezinVerify | ExperimentKind::CombVerify => Some(4),
            _ => None,
        };
        if kind.is_statistical() || kind == ExperimentKind::KernelCheck {
            cfg.lambda = Some(3.0);
        }
        let report = run(&cfg).unwrap_or_else(|e| panic!("{kind}: {e}"));
        assert!(!report.results.is_empty(), "{kind}");
        assert!(report.results.iter().all(|r| r.stderr >= 0.0));
    }
}

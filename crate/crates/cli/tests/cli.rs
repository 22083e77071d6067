use prmt_cli::{exit, run, RunConfig};
use proptest::prelude::*;

fn invoke(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["prmt"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn column(csv: &str, idx: usize) -> Vec<f64> {
    csv.lines().skip(1).map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

#[test]
fn config_parses_known_keys() {
    let cfg = RunConfig::parse("# comment\nquad.n = 64\nquad.L = 12.5\n\npainleve.xmin=-10\nsim.seed = 42 # trailing\nsim.threads = 2\n").unwrap();
    assert_eq!(cfg.quad_n, Some(64));
    assert_eq!(cfg.quad_l, Some(12.5));
    assert_eq!(cfg.painleve_xmin, Some(-10.0));
    assert_eq!(cfg.sim_seed, Some(42));
    assert_eq!(cfg.sim_threads, Some(2));
    assert_eq!(cfg.sim_samples, None);
}

#[test]
fn config_rejects_bad_input() {
    for (text, line) in [
        ("unknown.key = 1", 1),
        ("quad.n = 3\nquad.n = 4", 2),
        ("quad.n", 1),
        ("quad.n = 0", 1),
        ("quad.L = -2", 1),
        ("sim.seed = x", 1),
        ("painleve.tol = nan", 1),
    ] {
        let e = RunConfig::parse(text).unwrap_err();
        assert_eq!(e.line, line, "{text}");
    }
    assert!(RunConfig::parse("painleve.xmin = 3\npainleve.xmax = 1").is_err());
}

#[test]
fn tabulate_routes_agree_for_f0() {
    let (code, out, _) = invoke(&["tabulate", "--dist", "f0", "--xmin", "-6", "--xmax", "4", "--step", "0.1", "--route", "both"]);
    assert_eq!(code, exit::OK);
    let diff = column(&out, 2);
    assert_eq!(diff.len(), 101);
    assert!(diff.iter().all(|d| d.abs() <= 1e-8));
}

#[test]
fn density_integrates_to_one() {
    let (code, out, _) = invoke(&["tabulate", "--dist", "f2", "--density", "--xmin", "-10", "--xmax", "8", "--step", "0.05"]);
    assert_eq!(code, exit::OK);
    assert!(out.starts_with("x,F,dFdx\n"));
    let d = column(&out, 2);
    let integral: f64 = d.windows(2).map(|p| 0.5 * (p[0] + p[1]) * 0.05).sum();
    assert!((integral - 1.0).abs() <= 1e-4, "{integral}");
}

#[test]
fn fk_column_symmetric_in_w() {
    let a = invoke(&["tabulate", "--dist", "fk", "--w", "0.5,-0.3", "--xmin", "-3", "--xmax", "3", "--step", "0.5"]);
    let b = invoke(&["tabulate", "--dist", "fk", "--w", "-0.3,0.5", "--xmin", "-3", "--xmax", "3", "--step", "0.5"]);
    assert_eq!((a.0, b.0), (0, 0));
    for (x, y) in column(&a.1, 1).iter().zip(column(&b.1, 1)) {
        assert!((x - y).abs() <= 1e-12);
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(invoke(&["tabulate", "--dist", "f9", "--xmin", "0", "--xmax", "1", "--step", "1"]).0, exit::USAGE);
    assert_eq!(invoke(&["tabulate", "--dist", "fk", "--xmin", "0", "--xmax", "1", "--step", "1"]).0, exit::USAGE);
    assert_eq!(invoke(&["tabulate", "--dist", "f0", "--xmin", "1", "--xmax", "0", "--step", "1"]).0, exit::USAGE);
    assert_eq!(invoke(&["tabulate", "--dist", "f2", "--route", "fredholm", "--xmin", "0", "--xmax", "1", "--step", "1"]).0, exit::USAGE);
    assert_eq!(invoke(&["moments", "--k", "4"]).0, exit::USAGE);
    assert_eq!(invoke(&["simulate", "lpp", "--rows", "3", "--cols", "5"]).0, exit::USAGE);
    assert_eq!(invoke(&[]).0, exit::USAGE);
    assert_eq!(invoke(&["--help"]).0, exit::OK);
}

#[test]
fn moments_report_and_tolerance_exit() {
    let (code, out, _) = invoke(&["moments", "--k", "0"]);
    assert_eq!(code, exit::OK);
    let row: Vec<f64> = out.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row[0], 0.0);
    assert!((row[1] + 1.7710868).abs() < 1e-6 && (row[2] - 0.9017731).abs() < 1e-6);
    // The printed digits for F_1 are rounded, so the exact value falls outside.
    assert_eq!(invoke(&["moments", "--k", "1"]).0, exit::TOLERANCE);
}

#[test]
fn verify_suites_report_lines() {
    let (code, out, _) = invoke(&["verify", "--suite", "thm11", "--trials", "20", "--seed", "7"]);
    assert_eq!(code, exit::OK);
    let fields: Vec<&str> = out.trim().split(' ').collect();
    assert_eq!(fields[..2], ["PASS", "thm11"]);
    assert!(fields[2].parse::<f64>().unwrap() <= 1e-6);
    for suite in ["gcbo", "opuc", "scaling"] {
        let (code, out, _) = invoke(&["verify", "--suite", suite]);
        assert_eq!(code, exit::OK, "{out}");
        assert!(out.starts_with("PASS"));
    }
}

#[test]
fn simulate_is_deterministic_and_reports_ks() {
    let dir = tempfile::tempdir().unwrap();
    let p1 = dir.path().join("a.csv");
    let p2 = dir.path().join("b.csv");
    let args = |p: &std::path::Path| {
        vec!["simulate", "lpp", "--rows", "60", "--cols", "40", "--samples", "300", "--seed", "5", "--compare", "f0", "--out"]
            .into_iter()
            .map(String::from)
            .chain([p.display().to_string()])
            .collect::<Vec<_>>()
    };
    let mut full = vec!["prmt".to_string()];
    full.extend(args(&p1));
    let (mut o, mut e) = (Vec::new(), Vec::new());
    assert_eq!(run(full, &mut o, &mut e), exit::OK);
    let summary = String::from_utf8(o).unwrap();
    assert!(summary.starts_with("KS=") && summary.trim_end().ends_with("n=300"), "{summary}");
    let mut full = vec!["prmt".to_string(), "--threads".into(), "3".into()];
    full.extend(args(&p2));
    assert_eq!(run(full, &mut Vec::new(), &mut Vec::new()), exit::OK);
    let (a, b) = (std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# seed=5 streams=300\nindex,raw,scaled\n"));
    assert!(!text.contains('\r'));
}

#[test]
fn tasep_duality_comparison() {
    let (code, _, err) = invoke(&["simulate", "tasep", "--m", "2", "--time", "6", "--particles", "6", "--samples", "10000", "--compare", "dual"]);
    assert_eq!(code, exit::OK);
    let ks: f64 = err.trim().strip_prefix("KS=").unwrap().split(' ').next().unwrap().parse().unwrap();
    assert!(ks <= 0.02);
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "sim.seed = 11\nsim.samples = 50\n").unwrap();
    let c = cfg.display().to_string();
    let base = ["simulate", "lpp", "--rows", "10", "--cols", "10"];
    let from_file = invoke(&[&["--config", &c][..], &base[..]].concat());
    assert!(from_file.1.starts_with("# seed=11 streams=50\n"));
    let flagged = invoke(&[&["--config", &c][..], &base[..], &["--seed", "12"][..]].concat());
    assert!(flagged.1.starts_with("# seed=12 streams=50\n"));
    std::fs::write(&cfg, "quad.n = 0\n").unwrap();
    assert_eq!(invoke(&[&["--config", &c][..], &base[..]].concat()).0, exit::USAGE);
    assert_eq!(invoke(&["--config", "/nonexistent/prmt.cfg", "moments", "--k", "0"]).0, exit::USAGE);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_roundtrip(n in 1usize..500, l in 0.5f64..40.0, seed in any::<u64>(), threads in 1usize..64) {
        let text = format!("quad.n = {n}\nquad.L = {l:?}\nsim.seed = {seed}\nsim.threads = {threads}\n");
        let cfg = RunConfig::parse(&text).unwrap();
        prop_assert_eq!(cfg.quad_n, Some(n));
        prop_assert_eq!(cfg.quad_l, Some(l));
        prop_assert_eq!(cfg.sim_seed, Some(seed));
        prop_assert_eq!(cfg.sim_threads, Some(threads));
    }

    #[test]
    fn config_parser_never_panics(text in "\\PC{0,200}") {
        let _ = RunConfig::parse(&text);
    }
}

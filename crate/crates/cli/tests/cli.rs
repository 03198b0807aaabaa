use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command as Process;

use qfcs_cli::config::parse_config;
use qfcs_cli::experiments::FILTERED;
use qfcs_cli::{load_config, run, Command, Overrides};

fn bin() -> Process {
    Process::new(env!("CARGO_BIN_EXE_qfcs"))
}

/// Data rows of the first CSV block (up to the first `# ...` line after the header).
fn first_block(csv: &str) -> Vec<Vec<String>> {
    let mut lines = csv.lines().skip_while(|l| l.starts_with('#'));
    lines.next().expect("header row");
    lines
        .take_while(|l| !l.starts_with('#'))
        .map(|l| l.split(',').map(str::to_owned).collect())
        .collect()
}

fn block_after(csv: &str, marker: &str) -> Vec<Vec<String>> {
    let rest = csv.split_once(&format!("{marker}\n")).expect("marker present").1;
    first_block(rest)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap_or_else(|_| panic!("not a number: {s}"))
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let num: f64 = points.iter().map(|(x, y)| (x.ln() - mx) * (y.ln() - my)).sum();
    let den: f64 = points.iter().map(|(x, _)| (x.ln() - mx).powi(2)).sum();
    num / den
}

#[test]
fn distribution_nyquist_and_v_shape() {
    let config = parse_config("[estimation]\nk_values = [5, 13]\n").unwrap();
    let csv = run(Command::Distribution, &config).unwrap();
    let rows = first_block(&csv);
    let err = |k: &str, n: &str| num(&rows.iter().find(|r| r[0] == k && r[1] == n).unwrap()[4]);
    for r in rows.iter().filter(|r| r[0] == "13") {
        assert!(num(&r[4]) < 1e-10, "{r:?}");
    }
    assert!(err("5", "0") > 10.0 * err("5", "6"));
    assert!(err("5", "12") > 10.0 * err("5", "6"));
    let summary = block_after(&csv, "# summary");
    assert_eq!(summary.len(), 2);
    assert!(num(&summary[1][1]) < 1e-10);
}

#[test]
fn filter_rows_and_success_probability() {
    let config = parse_config("[estimation]\nk_values = [6]\n").unwrap();
    let csv = run(Command::Filter, &config).unwrap();
    let rows = first_block(&csv);
    let n_of = |r: &Vec<String>| r[1].parse::<u32>().unwrap();
    for r in &rows {
        if [10, 12].contains(&n_of(r)) {
            assert_eq!(r[2], FILTERED);
            assert_eq!(r[4], FILTERED);
        } else {
            assert!(num(&r[4]) < 1e-8, "{r:?}");
        }
    }
    assert_eq!(rows.iter().filter(|r| r[2] == FILTERED).count(), 2);
    let filter = block_after(&csv, "# filter");
    let (pf, analytic) = (num(&filter[0][0]), num(&filter[0][1]));
    assert!((pf - analytic).abs() < 1e-12);
    assert!(filter[0][2].is_empty(), "no attempt count in exact mode");
}

#[test]
fn shot_mode_filter_reports_attempts() {
    let config = parse_config(
        "[model]\nL = 6\n[estimation]\nmode = \"shots\"\nshots = 2000\nk_values = [4]\nseed = 3\n",
    )
    .unwrap();
    let csv = run(Command::Filter, &config).unwrap();
    let filter = block_after(&csv, "# filter");
    assert!(filter[0][2].parse::<u64>().unwrap() >= 1);
}

#[test]
fn cumulant_order_lift() {
    // above the double-precision floor of the third-order stencil
    let h: Vec<String> = (0..9).map(|i| format!("{:e}", 10f64.powf(-2.5 + 0.25 * i as f64))).collect();
    let config = parse_config(&format!("[cumulants]\nh_values = [{}]\nrounds = 2\n", h.join(", "))).unwrap();
    let csv = run(Command::Cumulants, &config).unwrap();
    let moments = block_after(&csv, "# moments");
    let mut err: BTreeMap<(u32, u32), Vec<(f64, f64)>> = BTreeMap::new();
    for r in &moments {
        err.entry((r[0].parse().unwrap(), r[2].parse().unwrap()))
            .or_default()
            .push((num(&r[1]), num(&r[5])));
    }
    for order in 1..=3 {
        let r0 = &err[&(order, 0)];
        let r1 = &err[&(order, 1)];
        let r2 = &err[&(order, 2)];
        let upto = |v: &[(f64, f64)]| v.iter().copied().filter(|(h, _)| *h <= 0.1 + 1e-12).collect::<Vec<_>>();
        assert!((slope(&upto(r0)) - 2.0).abs() < 0.5, "order {order} R0");
        assert!((slope(&upto(r1)) - 4.0).abs() < 0.5, "order {order} R1");
        for (a, b) in r1.iter().zip(r2) {
            if a.0 < 0.5 {
                assert!(b.1 <= a.1, "order {order} h = {}: R2 {} > R1 {}", a.0, b.1, a.1);
            }
        }
    }
    // the cumulant block precedes the moments block and has the same shape
    assert_eq!(first_block(&csv).len(), moments.len());
}

#[test]
fn wall_free_state_has_exact_moments() {
    // J = 0 switches the Hamiltonian off, so the state stays |0…0⟩
    let config = parse_config("[model]\nL = 4\nJ = 0\n[cumulants]\nh_values = [1e-2]\nrounds = 0\n").unwrap();
    let csv = run(Command::Cumulants, &config).unwrap();
    for r in block_after(&csv, "# moments") {
        assert!(num(&r[5]) < 1e-15, "{r:?}");
    }
}

#[test]
fn charfunc_dump_matches_exact_columns() {
    let config = parse_config("[model]\nL = 6\n[estimation]\nk_values = [3, 7]\n").unwrap();
    let csv = run(Command::Charfunc, &config).unwrap();
    let rows = first_block(&csv);
    assert_eq!(rows.len(), 10);
    for r in rows {
        assert!((num(&r[3]) - num(&r[5])).abs() < 1e-12);
        assert!((num(&r[4]) - num(&r[6])).abs() < 1e-12);
    }
}

#[test]
fn header_and_number_format() {
    let config = parse_config("[model]\nL = 4\n[estimation]\nk_values = [3]\nseed = 17\n").unwrap();
    let csv = run(Command::Distribution, &config).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# qfcs "));
    assert_eq!(lines.next().unwrap(), "# seed = 17");
    assert_eq!(lines.next().unwrap(), "# config:");
    let echoed: String = csv
        .lines()
        .skip(3)
        .take_while(|l| l.starts_with("#") && !l.starts_with("# summary"))
        .map(|l| format!("{}\n", l.trim_start_matches('#').trim_start()))
        .collect();
    assert_eq!(parse_config(&echoed).unwrap(), config);
    for r in first_block(&csv) {
        for field in &r[2..] {
            let mantissa = field.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.replace('.', "").len(), 17, "{field}");
            assert_eq!(num(field).to_bits(), format!("{:.16e}", num(field)).parse::<f64>().unwrap().to_bits());
        }
    }
}

fn run_bin(args: &[&str]) -> std::process::Output {
    bin().args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn binary_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "[model]\nL = 6\n[estimation]\nmode = \"shots\"\nshots = 300\nk_values = [2, 4]\n",
    );
    let out = dir.path().join("out.csv");
    let mut runs = Vec::new();
    for _ in 0..2 {
        let o = run_bin(&["distribution", "--config", &cfg, "--seed", "5", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
        runs.push(std::fs::read_to_string(&out).unwrap());
    }
    assert!(runs[0] == runs[1], "outputs differ");
    let other = run_bin(&["distribution", "--config", &cfg, "--seed", "6"]);
    let stdout = String::from_utf8(other.stdout).unwrap();
    assert!(first_block(&stdout) != first_block(&runs[0]), "seed has no effect");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_config(dir.path(), "[model]\nL = 7\n");
    assert_eq!(run_bin(&["distribution", "--config", &bad]).status.code(), Some(1));
    let typo = write_config(dir.path(), "[model]\nLength = 6\n");
    assert_eq!(run_bin(&["filter", "--config", &typo]).status.code(), Some(1));
    assert_eq!(run_bin(&["charfunc", "--config", "/nonexistent/run.toml"]).status.code(), Some(1));

    // every sector of L = 2 targeted
    let all = write_config(dir.path(), "[model]\nL = 2\n[filter]\ntargets = [0, 2]\n");
    let o = run_bin(&["filter", "--config", &all]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stderr));

    let ok = write_config(dir.path(), "[model]\nL = 4\n[estimation]\nk_values = [3]\n");
    let unwritable = run_bin(&["distribution", "--config", &ok, "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(unwritable.status.code(), Some(2));
    assert_eq!(run_bin(&["distribution", "--config", &ok]).status.code(), Some(0));
}

#[test]
fn overrides_beat_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "[estimation]\nseed = 1\nshots = 10\n");
    let overrides = Overrides {
        seed: Some(9),
        shots: Some(40),
        mode: Some(qfcs_cli::config::EstimationMode::Shots),
        out: None,
    };
    let c = load_config(Some(Path::new(&path)), &overrides).unwrap();
    assert_eq!(c.estimation.seed, 9);
    assert_eq!(c.estimation.shots, 40);
    assert_eq!(c.estimation(), qfcs_core::Estimation::Shots(40));
}

#[test]
fn readme_config_example_parses() {
    let readme = include_str!("../../../README.md");
    let block = readme
        .split("```toml\n")
        .nth(1)
        .and_then(|rest| rest.split("```").next())
        .expect("toml block in README");
    let mut config = parse_config(block).unwrap();
    assert_eq!(config.output.path.take().unwrap(), Path::new("out.csv"));
    assert_eq!(config.filter.targets.take().unwrap(), vec![10, 12]);
    assert_eq!(config, qfcs_cli::config::ExperimentConfig::default());
}

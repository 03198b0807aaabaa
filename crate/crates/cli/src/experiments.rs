//! The four experiments. Each returns the full CSV text, provenance header included.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use qfcs_core::charfunc::estimate_grid;
use qfcs_core::fcs::{moments_to_cumulants, trace_distance, Distribution};
use qfcs_core::filter::{
    apply_filter_with, choose_reference, reconstruct_distribution, schedule_times,
    success_probability,
};
use qfcs_core::model::{exact_char_func, exact_distribution, prepare_state};
use qfcs_core::pipeline::{cumulants_via_fcs, distribution_over_range};
use qfcs_core::{AncillaMode, Estimation, NumberOperator, PureState, SamplingGrid};

use crate::config::ExperimentConfig;
use crate::RunError;

/// Marks rows of sectors removed by the filter.
pub const FILTERED: &str = "filtered";
/// Marks surviving sectors whose reference state never showed up in shot mode.
pub const UNRESOLVED: &str = "unresolved";

/// 17 significant digits: enough to round-trip any double.
pub fn fmt_f(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn provenance(command: &str, config: &ExperimentConfig) -> String {
    let mut out = String::new();
    writeln!(out, "# qfcs {} {command}", env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(out, "# seed = {}", config.estimation.seed).unwrap();
    writeln!(out, "# config:").unwrap();
    for line in config.to_toml().lines() {
        writeln!(out, "{}", format!("#   {line}").trim_end()).unwrap();
    }
    out
}

/// Seed for the sweep cell keyed by `key`; grid points within a cell add their index.
fn cell_seed(base: u64, key: u64) -> u64 {
    base.wrapping_add(key.wrapping_mul(1000))
}

struct Setup {
    op: NumberOperator,
    state: PureState,
    exact: Distribution,
    estimation: Estimation,
}

fn setup(config: &ExperimentConfig) -> Result<Setup, RunError> {
    let params = config.params()?;
    let op = NumberOperator::domain_walls(params.length)?;
    let state = prepare_state(&params, config.preparation())?;
    let exact = exact_distribution(&state, &op)?;
    Ok(Setup {
        op,
        state,
        exact,
        estimation: config.estimation(),
    })
}

/// Rows `k,n,P_fcs,P_ed,abs_error` for every grid size, then a `k,total_variation` block.
pub fn run_distribution_experiment(config: &ExperimentConfig) -> Result<String, RunError> {
    let s = setup(config)?;
    let est = &config.estimation;
    let mut out = provenance("distribution", config);
    let mut summary = Vec::new();
    writeln!(out, "k,n,P_fcs,P_ed,abs_error").unwrap();
    for &k in &est.k_values {
        let seed = cell_seed(est.seed, k as u64);
        let rec = distribution_over_range(&s.state, &s.op, k, s.estimation, seed, est.parity_aware)?;
        for (n, p) in rec.iter() {
            let ed = s.exact.get(n);
            writeln!(out, "{k},{n},{},{},{}", fmt_f(p), fmt_f(ed), fmt_f((p - ed).abs())).unwrap();
        }
        summary.push((k, trace_distance(&rec, &s.exact)));
    }
    writeln!(out, "# summary").unwrap();
    writeln!(out, "k,total_variation").unwrap();
    for (k, tv) in summary {
        writeln!(out, "{k},{}", fmt_f(tv)).unwrap();
    }
    Ok(out)
}

/// Reference pairs `(P(i), P′(i))` per surviving sector. Sectors whose
/// reference cannot be estimated are absent.
fn reference_pairs(
    s: &Setup,
    filtered: &PureState,
    surviving: &[u32],
    seed: u64,
) -> Result<BTreeMap<i64, (f64, f64)>, RunError> {
    let mut refs = BTreeMap::new();
    match s.estimation {
        Estimation::Exact => {
            for &n in surviving {
                if s.exact.get(n.into()) <= 0.0 {
                    continue;
                }
                let i = choose_reference(&s.state, &s.op, n)?;
                refs.insert(n.into(), (s.state.probability(i), filtered.probability(i)));
            }
        }
        Estimation::Shots(shots) => {
            let qubits: Vec<usize> = (0..s.op.num_qubits()).collect();
            let before = index_counts(&s.state, &qubits, shots, seed)?;
            let after = index_counts(filtered, &qubits, shots, seed.wrapping_add(1))?;
            for &n in surviving {
                // most frequent basis state of the sector, ties toward the smaller index
                let best = before
                    .iter()
                    .filter(|(&z, _)| s.op.value(z) == n)
                    .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)));
                if let Some((&z, &count)) = best {
                    if let Some(&count_after) = after.get(&z) {
                        let total = shots as f64;
                        refs.insert(n.into(), (count as f64 / total, count_after as f64 / total));
                    }
                }
            }
        }
    }
    Ok(refs)
}

fn index_counts(state: &PureState, qubits: &[usize], shots: u64, seed: u64) -> Result<BTreeMap<usize, u64>, RunError> {
    let counts = state.sample_counts(qubits, shots, seed)?;
    Ok(counts
        .into_iter()
        .map(|(bits, c)| (usize::from_str_radix(&bits, 2).expect("counts keys are binary"), c))
        .collect())
}

/// Filtered-then-reconstructed distribution vs ED, with `filtered` rows for the
/// removed sectors, followed by per-k surviving-sector error and the success probability.
pub fn run_filter_experiment(config: &ExperimentConfig) -> Result<String, RunError> {
    let s = setup(config)?;
    let est = &config.estimation;
    let spec = schedule_times(config.filter.center, &config.filter_targets(), s.op.support())?;
    let rejection_seed = (!s.estimation.is_exact()).then_some(est.seed);
    let outcome = apply_filter_with(&s.state, &s.op, &spec, AncillaMode::Sequential, rejection_seed)?;
    let analytic = success_probability(&s.exact, &spec);
    let refs = reference_pairs(&s, &outcome.filtered_state, &spec.surviving(), cell_seed(est.seed, 1 << 20))?;
    let surviving_exact = s.exact.restrict_to(&refs.keys().copied().collect::<Vec<_>>());

    let mut out = provenance("filter", config);
    writeln!(out, "# targets = {:?}", spec.targets().iter().map(|t| t.sector).collect::<Vec<_>>()).unwrap();
    for t in spec.targets() {
        writeln!(out, "# t[{}] = {}", t.sector, fmt_f(t.time)).unwrap();
    }
    writeln!(out, "k,n,P_fcs,P_ed,abs_error").unwrap();
    let mut summary = Vec::new();
    for &k in &est.k_values {
        let seed = cell_seed(est.seed, k as u64);
        let filtered = distribution_over_range(&outcome.filtered_state, &s.op, k, s.estimation, seed, est.parity_aware)?;
        let rec = reconstruct_distribution(&filtered, &refs)?;
        for n in filtered.keys() {
            let ed = s.exact.get(n);
            if spec.is_targeted(n) {
                writeln!(out, "{k},{n},{FILTERED},{},{FILTERED}", fmt_f(ed)).unwrap();
            } else if rec.contains(n) {
                let p = rec.get(n);
                writeln!(out, "{k},{n},{},{},{}", fmt_f(p), fmt_f(ed), fmt_f((p - ed).abs())).unwrap();
            } else if ed > 0.0 {
                writeln!(out, "{k},{n},{UNRESOLVED},{},{UNRESOLVED}", fmt_f(ed)).unwrap();
            } else {
                // a value outside the support (odd n on a full grid)
                writeln!(out, "{k},{n},{},{},{}", fmt_f(filtered.get(n)), fmt_f(0.0), fmt_f(filtered.get(n).abs())).unwrap();
            }
        }
        summary.push((k, trace_distance(&rec, &surviving_exact)));
    }
    writeln!(out, "# summary").unwrap();
    writeln!(out, "k,surviving_total_variation").unwrap();
    for (k, tv) in summary {
        writeln!(out, "{k},{}", fmt_f(tv)).unwrap();
    }
    writeln!(out, "# filter").unwrap();
    writeln!(out, "P_f,P_f_analytic,attempts").unwrap();
    let attempts = outcome.attempts.map(|a| a.to_string()).unwrap_or_default();
    writeln!(out, "{},{},{attempts}", fmt_f(outcome.success_probability), fmt_f(analytic)).unwrap();
    Ok(out)
}

/// Cumulant rows `order,h,R,value,ed_value,abs_error`, then the same layout for raw moments.
pub fn run_cumulant_experiment(config: &ExperimentConfig) -> Result<String, RunError> {
    let s = setup(config)?;
    let cfg = &config.cumulants;
    let mut ed_moments = [0.0; 3];
    for (p, m) in ed_moments.iter_mut().enumerate() {
        *m = s.state.expectation_diagonal(&s.op, p as u32 + 1)?;
    }
    let ed = moments_to_cumulants(ed_moments[0], ed_moments[1], ed_moments[2]);

    let mut cells = Vec::new();
    for r in 0..=cfg.rounds {
        for (i, &h) in cfg.h_values.iter().enumerate() {
            let seed = cell_seed(config.estimation.seed, (r as u64) << 16 | i as u64);
            cells.push((h, r, cumulants_via_fcs(&s.state, &s.op, h, r, s.estimation, seed)?));
        }
    }

    let mut out = provenance("cumulants", config);
    let block = |out: &mut String, pick: &dyn Fn(&qfcs_core::CumulantSet) -> [f64; 3], truth: [f64; 3]| {
        writeln!(out, "order,h,R,value,ed_value,abs_error").unwrap();
        for order in 0..3 {
            for (h, r, c) in &cells {
                let v = pick(c)[order];
                let e = truth[order];
                writeln!(out, "{},{},{r},{},{},{}", order + 1, fmt_f(*h), fmt_f(v), fmt_f(e), fmt_f((v - e).abs())).unwrap();
            }
        }
    };
    block(&mut out, &|c| c.cumulants(), ed.cumulants());
    writeln!(out, "# moments").unwrap();
    block(&mut out, &|c| [c.m1, c.m2, c.m3], ed_moments);
    Ok(out)
}

/// Raw characteristic-function samples `k,i,theta,re,im,exact_re,exact_im` on each grid.
pub fn run_charfunc_dump(config: &ExperimentConfig) -> Result<String, RunError> {
    let s = setup(config)?;
    let est = &config.estimation;
    let mut out = provenance("charfunc", config);
    writeln!(out, "k,i,theta,re,im,exact_re,exact_im").unwrap();
    for &k in &est.k_values {
        let grid = SamplingGrid::new(k)?;
        let samples = estimate_grid(&s.state, &s.op, &grid, s.estimation, cell_seed(est.seed, k as u64))?;
        for (i, sample) in samples.iter().enumerate() {
            let exact = exact_char_func(&s.state, &s.op, sample.theta)?;
            writeln!(
                out,
                "{k},{i},{},{},{},{},{}",
                fmt_f(sample.theta),
                fmt_f(sample.value.re),
                fmt_f(sample.value.im),
                fmt_f(exact.re),
                fmt_f(exact.im)
            )
            .unwrap();
        }
    }
    Ok(out)
}

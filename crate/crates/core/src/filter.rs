//! Ancilla-based removal of number sectors.
//!
//! Each target `(N_m, t_m)` uses one ancilla: `|1⟩ → H → controlled e^{−iNt_m}
//! → R_z(N_m t_m) → H`, then the ancilla is projected onto `|0⟩`. A basis state
//! in sector `N_k` picks up the factor `e^{−iN_m t_m/2}·½(1 − e^{−i(N_k−N_m)t_m})`,
//! which vanishes for `N_k = N_m` and leaves the shape inside every sector intact.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, Geometric};

use crate::error::{Error, Result};
use crate::fcs::Distribution;
use crate::number::NumberOperator;
use crate::statevector::{DiagonalPhase, Gate, PureState};

/// Below this success probability the filtered state is considered empty.
pub const ANNIHILATION_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterTarget {
    pub sector: u32,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterSpec {
    targets: Vec<FilterTarget>,
    center: u32,
    support: Vec<u32>,
}

impl FilterSpec {
    pub fn new(targets: Vec<FilterTarget>, center: u32, support: &[u32]) -> Result<Self> {
        let support = sorted_support(support)?;
        if !support.contains(&center) {
            return Err(Error::arg(format!("center {center} is not in the support")));
        }
        for (i, t) in targets.iter().enumerate() {
            if !support.contains(&t.sector) {
                return Err(Error::arg(format!("target {} is not in the support", t.sector)));
            }
            if !(t.time > 0.0 && t.time.is_finite()) {
                return Err(Error::arg(format!(
                    "time for target {} must be positive, got {}",
                    t.sector, t.time
                )));
            }
            if targets[..i].iter().any(|o| o.sector == t.sector) {
                return Err(Error::arg(format!("target {} listed twice", t.sector)));
            }
        }
        if support.iter().all(|n| targets.iter().any(|t| t.sector == *n)) {
            return Err(Error::NothingSurvives);
        }
        Ok(Self {
            targets,
            center,
            support,
        })
    }

    pub fn targets(&self) -> &[FilterTarget] {
        &self.targets
    }

    pub fn center(&self) -> u32 {
        self.center
    }

    pub fn support(&self) -> &[u32] {
        &self.support
    }

    pub fn is_targeted(&self, n: i64) -> bool {
        self.targets.iter().any(|t| i64::from(t.sector) == n)
    }

    /// Support values left after filtering.
    pub fn surviving(&self) -> Vec<u32> {
        self.support
            .iter()
            .copied()
            .filter(|&n| !self.is_targeted(n.into()))
            .collect()
    }

    /// `∏_m sin²((N_k − N_m) t_m / 2)`: the weight a sector keeps.
    pub fn sector_weight(&self, n: i64) -> f64 {
        self.targets
            .iter()
            .map(|t| {
                let half = (n - i64::from(t.sector)) as f64 * t.time / 2.0;
                half.sin().powi(2)
            })
            .product()
    }
}

fn sorted_support(support: &[u32]) -> Result<Vec<u32>> {
    if support.is_empty() {
        return Err(Error::arg("support is empty"));
    }
    let mut s = support.to_vec();
    s.sort_unstable();
    s.dedup();
    Ok(s)
}

/// `t_m = π/|N_c − N_m|`, or `π/|N_{c′} − N_m|` when `N_m = N_c`, where `N_{c′}` is
/// the support point nearest to `N_c` (ties toward the smaller value).
pub fn schedule_times(center: u32, targets: &[u32], support: &[u32]) -> Result<FilterSpec> {
    let sorted = sorted_support(support)?;
    let neighbor = sorted
        .iter()
        .copied()
        .filter(|&n| n != center)
        .min_by_key(|&n| (n.abs_diff(center), n));
    let mut scheduled = Vec::with_capacity(targets.len());
    for &target in targets {
        let distance = if target != center {
            target.abs_diff(center)
        } else {
            match neighbor {
                Some(n) => n.abs_diff(target),
                None => return Err(Error::NothingSurvives),
            }
        };
        scheduled.push(FilterTarget {
            sector: target,
            time: PI / distance as f64,
        });
    }
    FilterSpec::new(scheduled, center, &sorted)
}

/// How the ancillas are allocated and measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AncillaMode {
    /// One ancilla at a time: allocate, run, project, release.
    #[default]
    Sequential,
    /// All ancillas at once, projected together at the end.
    Joint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    pub success_probability: f64,
    pub filtered_state: PureState,
    pub g_factors: BTreeMap<i64, f64>,
    /// Circuit repetitions until every ancilla read 0 (rejection sampling only).
    pub attempts: Option<u64>,
}

/// Runs the filter circuit in exact mode with sequential ancillas.
pub fn apply_filter(state: &PureState, op: &NumberOperator, spec: &FilterSpec) -> Result<FilterOutcome> {
    apply_filter_with(state, op, spec, AncillaMode::Sequential, None)
}

/// Runs the filter circuit; with a seed, also draws the number of
/// rejection-sampling attempts needed for one accepted run.
pub fn apply_filter_with(
    state: &PureState,
    op: &NumberOperator,
    spec: &FilterSpec,
    mode: AncillaMode,
    rejection_seed: Option<u64>,
) -> Result<FilterOutcome> {
    if state.num_qubits() != op.num_qubits() {
        return Err(Error::arg(format!(
            "state has {} qubits, operator spans {}",
            state.num_qubits(),
            op.num_qubits()
        )));
    }
    if spec.support() != op.support() {
        return Err(Error::arg("filter support differs from the operator's support"));
    }
    let system = op.num_qubits();
    let (success_probability, filtered_state) = match mode {
        AncillaMode::Sequential => {
            let mut current = state.clone();
            let mut total = 1.0;
            for target in spec.targets() {
                let mut extended = current.with_ancillas(1)?;
                filter_layer(&mut extended, op, system, target)?;
                let (p, projected) = project_ancilla(&extended, system, total)?;
                total *= p;
                current = projected.discard_qubit(system)?;
            }
            (total, current)
        }
        AncillaMode::Joint => {
            let count = spec.targets().len();
            let mut extended = state.with_ancillas(count)?;
            for (m, target) in spec.targets().iter().enumerate() {
                filter_layer(&mut extended, op, system + m, target)?;
            }
            let mut total = 1.0;
            for m in 0..count {
                let (p, projected) = project_ancilla(&extended, system + m, total)?;
                total *= p;
                extended = projected;
            }
            for m in (0..count).rev() {
                extended = extended.discard_qubit(system + m)?;
            }
            (total, extended)
        }
    };
    if success_probability < ANNIHILATION_THRESHOLD {
        return Err(Error::FilterAnnihilates {
            probability: success_probability,
        });
    }
    let before = crate::model::exact_distribution(state, op)?;
    let g_factors = g_factors(&before, spec)?;
    let attempts = rejection_seed
        .map(|seed| rejection_attempts(success_probability, seed))
        .transpose()?;
    Ok(FilterOutcome {
        success_probability,
        filtered_state,
        g_factors,
        attempts,
    })
}

fn filter_layer(state: &mut PureState, op: &NumberOperator, ancilla: usize, target: &FilterTarget) -> Result<()> {
    state.apply_gate(ancilla, &Gate::pauli_x())?;
    state.apply_gate(ancilla, &Gate::hadamard())?;
    state.apply_diagonal_phase(&DiagonalPhase::controlled(-target.time, op, ancilla))?;
    state.apply_gate(ancilla, &Gate::rz(f64::from(target.sector) * target.time))?;
    state.apply_gate(ancilla, &Gate::hadamard())
}

fn project_ancilla(state: &PureState, ancilla: usize, so_far: f64) -> Result<(f64, PureState)> {
    state.project_qubit(ancilla, 0).map_err(|e| match e {
        Error::ProjectionFailed { probability } => Error::FilterAnnihilates {
            probability: so_far * probability,
        },
        other => other,
    })
}

/// Attempts until the first all-zero ancilla readout, each succeeding with `p`.
pub fn rejection_attempts(success_probability: f64, seed: u64) -> Result<u64> {
    let p = success_probability.clamp(0.0, 1.0);
    if p < ANNIHILATION_THRESHOLD {
        return Err(Error::FilterAnnihilates { probability: p });
    }
    let failures = Geometric::new(p)
        .map_err(|e| Error::Numerical(e.to_string()))?
        .sample(&mut ChaCha8Rng::seed_from_u64(seed));
    Ok(failures.saturating_add(1))
}

/// `P_f = Σ_k P(N_k) ∏_m sin²((N_k − N_m) t_m / 2)`.
pub fn success_probability(dist: &Distribution, spec: &FilterSpec) -> f64 {
    dist.iter().map(|(n, p)| p * spec.sector_weight(n)).sum()
}

/// `g_k = w_k / Σ_j P(N_j) w_j`, so that the filtered distribution is `g_k P(N_k)`.
pub fn g_factors(dist: &Distribution, spec: &FilterSpec) -> Result<BTreeMap<i64, f64>> {
    let denominator = success_probability(dist, spec);
    if denominator < 1e-14 {
        return Err(Error::FilterAnnihilates {
            probability: denominator,
        });
    }
    Ok(dist
        .keys()
        .map(|n| {
            let g = if spec.is_targeted(n) {
                0.0
            } else {
                spec.sector_weight(n) / denominator
            };
            (n, g)
        })
        .collect())
}

/// Basis state of largest probability in sector `n` (ties toward the smaller index).
pub fn choose_reference(state: &PureState, op: &NumberOperator, n: u32) -> Result<usize> {
    if state.num_qubits() != op.num_qubits() {
        return Err(Error::arg("state and operator widths differ"));
    }
    let mut best: Option<(usize, f64)> = None;
    for z in op.sector(n) {
        let p = state.probability(z);
        if best.is_none_or(|(_, bp)| p > bp) {
            best = Some((z, p));
        }
    }
    match best {
        Some((z, p)) if p > 0.0 => Ok(z),
        _ => Err(Error::arg(format!("sector {n} carries no weight"))),
    }
}

/// `P(N_k) = (P(i)/P′(i))·P′(N_k)` for each sector with a reference pair
/// `(P(i), P′(i))`; sectors without a reference are left out.
pub fn reconstruct_distribution(
    filtered: &Distribution,
    references: &BTreeMap<i64, (f64, f64)>,
) -> Result<Distribution> {
    let mut pairs = Vec::with_capacity(references.len());
    for (&n, &(unfiltered, after)) in references {
        if !(after > 0.0) {
            return Err(Error::Reconstruction {
                sector: n,
                reason: format!("filtered reference probability is {after:e}"),
            });
        }
        pairs.push((n, unfiltered / after * filtered.get(n)));
    }
    Ok(if filtered.is_reconstructed() {
        Distribution::reconstructed(pairs)
    } else {
        Distribution::from_pairs(pairs)
    })
}

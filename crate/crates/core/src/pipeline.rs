//! End-to-end estimators: circuit samples in, distribution or moments out.

use std::collections::BTreeMap;

use crate::charfunc::{estimate_grid, estimate_point, CharFuncSample, Estimation, SamplingGrid};
use crate::error::{Error, Result};
use crate::fcs::{
    dft_reconstruct, estimate_moments, moments_to_cumulants, richardson_stencil, trace_distance,
    CumulantSet, Distribution, MomentEstimate, Stencil,
};
use crate::model::exact_distribution;
use crate::number::NumberOperator;
use crate::statevector::PureState;

/// Reconstructs `P(n)` from a `k`-point grid.
///
/// With `parity_aware`, the grid is laid over `N/s` where `s` is the gcd of the
/// operator's values (2 for domain walls) and the result is relabelled `n = s·m`,
/// covering `n ∈ {0, s, .., s(k−1)}`. Otherwise it covers `n ∈ [0, k)`.
pub fn distribution_via_fcs(
    prepared: &PureState,
    op: &NumberOperator,
    k: usize,
    estimation: Estimation,
    seed: u64,
    parity_aware: bool,
) -> Result<Distribution> {
    reconstruct(prepared, op, k, estimation, seed, parity_aware, |_| k as i64)
}

/// Like [`distribution_via_fcs`] but evaluated at every `n ≤ max_value` of the
/// operator (multiples of the stride when parity-aware). Entries past the grid
/// domain are the aliased images `Σ_j (−1)^{jk} P(n + jk)`.
pub fn distribution_over_range(
    prepared: &PureState,
    op: &NumberOperator,
    k: usize,
    estimation: Estimation,
    seed: u64,
    parity_aware: bool,
) -> Result<Distribution> {
    reconstruct(prepared, op, k, estimation, seed, parity_aware, |reduced| {
        i64::from(reduced.max_value()) + 1
    })
}

fn reconstruct(
    prepared: &PureState,
    op: &NumberOperator,
    k: usize,
    estimation: Estimation,
    seed: u64,
    parity_aware: bool,
    end: impl Fn(&NumberOperator) -> i64,
) -> Result<Distribution> {
    let grid = SamplingGrid::new(k)?;
    let stride = if parity_aware { op.stride() } else { 1 };
    let sampled_op = if stride > 1 { op.reduced(stride)? } else { op.clone() };
    let samples = estimate_grid(prepared, &sampled_op, &grid, estimation, seed)?;
    let dist = dft_reconstruct(&samples, &grid, 0..end(&sampled_op))?;
    Ok(dist.scale_values(i64::from(stride)))
}

/// Samples `P̃` at every stencil offset; point `j` (in stencil order) uses seed `seed + j`.
pub fn stencil_samples(
    prepared: &PureState,
    op: &NumberOperator,
    stencil: &Stencil,
    estimation: Estimation,
    seed: u64,
) -> Result<BTreeMap<i32, CharFuncSample>> {
    stencil
        .offsets()
        .iter()
        .zip(stencil.angles())
        .enumerate()
        .map(|(j, (&o, theta))| {
            estimate_point(prepared, op, theta, estimation, seed.wrapping_add(j as u64))
                .map(|s| (o, s))
        })
        .collect()
}

pub fn moment_via_fcs(
    prepared: &PureState,
    op: &NumberOperator,
    stencil: &Stencil,
    estimation: Estimation,
    seed: u64,
) -> Result<MomentEstimate> {
    let samples = stencil_samples(prepared, op, stencil, estimation, seed)?;
    estimate_moments(&samples, stencil)
}

/// `⟨N⟩, ⟨N²⟩, ⟨N³⟩` from stencils of step `h` with `rounds` Richardson rounds,
/// assembled into cumulants.
pub fn cumulants_via_fcs(
    prepared: &PureState,
    op: &NumberOperator,
    h: f64,
    rounds: u32,
    estimation: Estimation,
    seed: u64,
) -> Result<CumulantSet> {
    let mut moments = [0.0; 3];
    for (i, m) in moments.iter_mut().enumerate() {
        let order = i as u32 + 1;
        let stencil = richardson_stencil(order, h, rounds)?;
        let offset_seed = seed.wrapping_add(1000 * i as u64);
        *m = moment_via_fcs(prepared, op, &stencil, estimation, offset_seed)?.value;
    }
    Ok(moments_to_cumulants(moments[0], moments[1], moments[2]).with_stencil(h, rounds))
}

/// Smallest `k ≤ max_k` whose exact-mode reconstruction is within `tolerance`
/// total variation of the true distribution.
pub fn minimal_lossless_k(
    prepared: &PureState,
    op: &NumberOperator,
    parity_aware: bool,
    tolerance: f64,
    max_k: usize,
) -> Result<Option<usize>> {
    if !(tolerance > 0.0) {
        return Err(Error::arg("tolerance must be positive"));
    }
    let exact = exact_distribution(prepared, op)?;
    for k in 1..=max_k {
        let rec = distribution_via_fcs(prepared, op, k, Estimation::Exact, 0, parity_aware)?;
        if trace_distance(&rec, &exact) < tolerance {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{prepare_state, MfimParams, Preparation};

    fn small_state() -> (PureState, NumberOperator) {
        let params = MfimParams::new(6, 1.0, 1.0, 1.0, 1.0).unwrap();
        let state = prepare_state(&params, Preparation::Exact).unwrap();
        (state, NumberOperator::domain_walls(6).unwrap())
    }

    #[test]
    fn lossless_at_nyquist() {
        let (state, op) = small_state();
        let exact = exact_distribution(&state, &op).unwrap();
        let full = distribution_via_fcs(&state, &op, 7, Estimation::Exact, 0, false).unwrap();
        assert!(trace_distance(&full, &exact) < 1e-12);
        let half = distribution_via_fcs(&state, &op, 4, Estimation::Exact, 0, true).unwrap();
        assert!(trace_distance(&half, &exact) < 1e-12);
        assert_eq!(half.keys().collect::<Vec<_>>(), vec![0, 2, 4, 6]);
    }

    #[test]
    fn range_reconstruction_shows_aliases() {
        let (state, op) = small_state();
        let exact = exact_distribution(&state, &op).unwrap();
        // reduced values 0..=3 on a 2-point grid: m ↦ P(m) + P(m ± 2)
        let d = distribution_over_range(&state, &op, 2, Estimation::Exact, 0, true).unwrap();
        assert_eq!(d.keys().collect::<Vec<_>>(), vec![0, 2, 4, 6]);
        assert!((d.get(0) - (exact.get(0) + exact.get(4))).abs() < 1e-12);
        assert!((d.get(6) - (exact.get(6) + exact.get(2))).abs() < 1e-12);
        let full = distribution_over_range(&state, &op, 3, Estimation::Exact, 0, false).unwrap();
        assert_eq!(full.len(), 7);
    }

    #[test]
    fn minimal_k_counts() {
        let (state, op) = small_state();
        assert_eq!(minimal_lossless_k(&state, &op, true, 1e-10, 10).unwrap(), Some(4));
        assert_eq!(minimal_lossless_k(&state, &op, false, 1e-10, 10).unwrap(), Some(7));
    }

    #[test]
    fn cumulants_track_oracle() {
        let (state, op) = small_state();
        let c = cumulants_via_fcs(&state, &op, 1e-2, 2, Estimation::Exact, 0).unwrap();
        let (mean, var, third) = exact_distribution(&state, &op).unwrap().central_cumulants();
        assert!((c.mean - mean).abs() < 1e-8);
        assert!((c.variance - var).abs() < 1e-7);
        assert!((c.skewness - third).abs() < 1e-6);
        assert_eq!(c.rounds, Some(2));
    }
}

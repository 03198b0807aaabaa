use num_complex::Complex64;

use super::Distribution;
use crate::charfunc::{CharFuncSample, SamplingGrid};
use crate::error::{Error, Result};

/// Largest imaginary part tolerated in an exact-mode reconstruction.
pub const IMAG_RESIDUE_TOLERANCE: f64 = 1e-9;

/// `P(n) ≈ (1/k) Σ_i P̃(θ_i) e^{−iθ_i n}` for each requested `n`.
///
/// Values outside `[0, k)` are legal and return the aliased images: on the
/// `−π`-anchored grid the result is `Σ_j (−1)^{jk} P(n + jk)`.
pub fn dft_reconstruct(
    samples: &[CharFuncSample],
    grid: &SamplingGrid,
    n_range: impl IntoIterator<Item = i64>,
) -> Result<Distribution> {
    if samples.len() != grid.k() {
        return Err(Error::arg(format!(
            "grid has {} points but {} samples were given",
            grid.k(),
            samples.len()
        )));
    }
    for (i, s) in samples.iter().enumerate() {
        if (s.theta - grid.angle(i)).abs() > 1e-12 {
            return Err(Error::arg(format!(
                "sample {i} at θ = {} does not sit on grid angle {}",
                s.theta,
                grid.angle(i)
            )));
        }
    }
    let exact = samples.iter().all(|s| s.estimation.is_exact());
    let k = grid.k() as f64;
    let mut pairs = Vec::new();
    for n in n_range {
        let sum: Complex64 = samples
            .iter()
            .map(|s| s.value * Complex64::cis(-s.theta * n as f64))
            .sum();
        let value = sum / k;
        if exact && value.im.abs() > IMAG_RESIDUE_TOLERANCE {
            return Err(Error::Numerical(format!(
                "imaginary residue {:e} at n = {n}",
                value.im
            )));
        }
        pairs.push((n, value.re));
    }
    Ok(Distribution::reconstructed(pairs))
}

/// Fewest grid points that resolve values `0..=max_value` without aliasing.
///
/// With even-only support the characteristic function is π-periodic and the
/// count drops to `max_value/2 + 1`.
pub fn min_sampling_points(max_value: u32, parity_even: bool) -> usize {
    if parity_even {
        (max_value / 2) as usize + 1
    } else {
        max_value as usize + 1
    }
}

//! Finite-difference stencils for `⟨Nⁿ⟩ = ∂ⁿP̃/∂(iθ)ⁿ |_{θ=0}`.
//!
//! A stencil stores integer offsets `o_j` (in units of the step `h`) and real
//! weights `w_j`; the estimate is `Σ_j w_j P̃(o_j h) / (ih)ⁿ`. Keeping the
//! `(ih)ⁿ` factor out of the weights keeps them exact small rationals.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::charfunc::CharFuncSample;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    offsets: Vec<i32>,
    weights: Vec<f64>,
    order: u32,
    error_order: u32,
    step: f64,
    rounds: u32,
}

impl Stencil {
    fn from_map(map: BTreeMap<i32, f64>, order: u32, error_order: u32, step: f64, rounds: u32) -> Self {
        let (offsets, weights) = map.into_iter().rev().filter(|&(_, w)| w != 0.0).unzip();
        Self {
            offsets,
            weights,
            order,
            error_order,
            step,
            rounds,
        }
    }

    /// Offsets in units of `h`, descending.
    pub fn offsets(&self) -> &[i32] {
        &self.offsets
    }

    /// Weights before division by `(ih)ⁿ`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Leading power of `h` in the truncation error.
    pub fn error_order(&self) -> u32 {
        self.error_order
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// Richardson rounds applied on top of the base formula.
    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    /// Full coefficients `w_j / (ih)ⁿ`.
    pub fn coefficients(&self) -> Vec<Complex64> {
        let scale = self.scale();
        self.weights.iter().map(|&w| w * scale).collect()
    }

    /// Sample angles `o_j h`, in stencil order.
    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        self.offsets.iter().map(|&o| o as f64 * self.step)
    }

    /// `Σ_j w_j o_jᵐ`: equals `n!` at `m = n` and vanishes for
    /// `m < n` and `n < m < n + error_order`.
    pub fn moment_condition(&self, m: u32) -> f64 {
        self.offsets
            .iter()
            .zip(&self.weights)
            .map(|(&o, &w)| w * (o as f64).powi(m as i32))
            .sum()
    }

    /// Applies the stencil to a function of θ.
    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> Complex64 {
        let sum: Complex64 = self
            .offsets
            .iter()
            .zip(&self.weights)
            .map(|(&o, &w)| w * f(o as f64 * self.step))
            .sum();
        sum * self.scale()
    }

    /// One Richardson round pairing steps `h` and `2h`.
    pub fn richardson(&self) -> Result<Stencil> {
        self.richardson_with(2)
    }

    /// One Richardson round pairing `h` with `multiplier·h` (ratio `1/multiplier`).
    pub fn richardson_with(&self, multiplier: u32) -> Result<Stencil> {
        if multiplier < 2 {
            return Err(Error::DegenerateRatio(1.0));
        }
        let ratio = 1.0 / multiplier as f64;
        let r = ratio.powi(self.error_order as i32);
        let coarse_scale = (multiplier as f64).powi(self.order as i32).recip();
        let mut map = BTreeMap::new();
        for (&o, &w) in self.offsets.iter().zip(&self.weights) {
            *map.entry(o).or_insert(0.0) += w / (1.0 - r);
            *map.entry(o * multiplier as i32).or_insert(0.0) -= r * w * coarse_scale / (1.0 - r);
        }
        Ok(Stencil::from_map(
            map,
            self.order,
            self.error_order + 2,
            self.step,
            self.rounds + 1,
        ))
    }

    fn scale(&self) -> Complex64 {
        Complex64::new(0.0, self.step).powu(self.order).inv()
    }
}

/// The standard central formulas for orders 1–3; higher orders are composed.
pub fn base_stencil(order: u32, h: f64) -> Result<Stencil> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::arg(format!("step must be positive, got {h}")));
    }
    let table: &[(i32, f64)] = match order {
        0 => return Err(Error::arg("derivative order must be >= 1")),
        1 => &[(1, 0.5), (-1, -0.5)],
        2 => &[(1, 1.0), (0, -2.0), (-1, 1.0)],
        3 => &[(2, 0.5), (1, -1.0), (-1, 1.0), (-2, -0.5)],
        _ => return build_stencil(order, &base_stencil(order - 1, h)?),
    };
    Ok(Stencil::from_map(table.iter().copied().collect(), order, 2, h, 0))
}

/// `∂^{n+1}/∂(iθ)^{n+1} = ∂/∂(iθ) ∘ ∂ⁿ/∂(iθ)ⁿ` with the central first difference.
pub fn build_stencil(order: u32, base: &Stencil) -> Result<Stencil> {
    if order != base.order + 1 {
        return Err(Error::arg(format!(
            "can only raise order {} to {}, not {order}",
            base.order,
            base.order + 1
        )));
    }
    let mut map = BTreeMap::new();
    for (&o, &w) in base.offsets.iter().zip(&base.weights) {
        *map.entry(o + 1).or_insert(0.0) += 0.5 * w;
        *map.entry(o - 1).or_insert(0.0) -= 0.5 * w;
    }
    Ok(Stencil::from_map(map, order, 2, base.step, 0))
}

/// Base formula followed by `rounds` Richardson rounds at ratio ½.
pub fn richardson_stencil(order: u32, h: f64, rounds: u32) -> Result<Stencil> {
    (0..rounds).try_fold(base_stencil(order, h)?, |s, _| s.richardson())
}

/// `(f1 − r·f2)/(1 − r)` with `r = ratioᵖ`, cancelling the `xᵖ` error term.
pub fn richardson_combine(f1: f64, f2: f64, ratio: f64, p: u32) -> Result<f64> {
    if p == 0 {
        return Err(Error::arg("error order p must be >= 1"));
    }
    let r = ratio.powi(p as i32);
    if !(ratio > 0.0) || (1.0 - r).abs() < 1e-15 || !r.is_finite() {
        return Err(Error::DegenerateRatio(r));
    }
    Ok((f1 - r * f2) / (1.0 - r))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub value: f64,
    /// Imaginary part of the stencil sum; zero up to noise for a physical state.
    pub imag_residue: f64,
}

/// Applies `stencil` to samples keyed by offset (in units of the step).
///
/// The stencil acts on `P̃ − 1`. Every stencil annihilates constants, so this is
/// the same estimator, but it avoids differencing values that all sit next to 1.
pub fn estimate_moments(
    samples_at_offsets: &BTreeMap<i32, CharFuncSample>,
    stencil: &Stencil,
) -> Result<MomentEstimate> {
    let mut sum = Complex64::new(0.0, 0.0);
    for (&o, &w) in stencil.offsets.iter().zip(&stencil.weights) {
        let sample = samples_at_offsets
            .get(&o)
            .ok_or_else(|| Error::arg(format!("no sample at offset {o}")))?;
        let expected = o as f64 * stencil.step;
        if (sample.theta - expected).abs() > 1e-12 * expected.abs().max(1.0) {
            return Err(Error::arg(format!(
                "sample at offset {o} has θ = {}, expected {expected}",
                sample.theta
            )));
        }
        sum += w * sample.offset_from_one();
    }
    let estimate = sum * stencil.scale();
    Ok(MomentEstimate {
        value: estimate.re,
        imag_residue: estimate.im,
    })
}

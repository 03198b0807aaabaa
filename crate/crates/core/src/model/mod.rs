//! Mixed-field Ising chain and its exact observables.
//!
//! `H = −J Σ_i [σ^z_i σ^z_{i+1} + h_x σ^x_i + h_z σ^z_i]` on a periodic chain of
//! even length. Bit 0 of a qubit is the `σ^z = +1` spin (`s = 1 − 2·bit`), so the
//! ferromagnetic term favors aligned bits.

mod spectral;
mod trotter;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fcs::Distribution;
use crate::statevector::PureState;

pub use crate::number::{domain_wall_count, NumberOperator};
pub use spectral::{DensePropagator, SpectralPropagator};
pub use trotter::trotter_evolve;

/// Largest chain for which the dense Hamiltonian is materialized.
pub const MAX_DENSE_LENGTH: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfimParams {
    /// Chain length `L` (one qubit per site, periodic wrap).
    pub length: usize,
    /// Ising exchange `J`; multiplies every term.
    pub coupling: f64,
    pub field_x: f64,
    pub field_z: f64,
    /// Evolution time `t`.
    pub time: f64,
}

impl Default for MfimParams {
    /// `L = 12`, `J = h_x = h_z = 1`, `t = 1`.
    fn default() -> Self {
        Self {
            length: 12,
            coupling: 1.0,
            field_x: 1.0,
            field_z: 1.0,
            time: 1.0,
        }
    }
}

impl MfimParams {
    pub fn new(length: usize, coupling: f64, field_x: f64, field_z: f64, time: f64) -> Result<Self> {
        let params = Self {
            length,
            coupling,
            field_x,
            field_z,
            time,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.length < 2 || !self.length.is_multiple_of(2) {
            return Err(Error::arg(format!(
                "chain length must be even and >= 2, got {}",
                self.length
            )));
        }
        if self.length > crate::number::MAX_OPERATOR_QUBITS {
            return Err(Error::Capability(format!("chain length {}", self.length)));
        }
        let all_finite = [self.coupling, self.field_x, self.field_z, self.time]
            .iter()
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::arg("model parameters must be finite"));
        }
        Ok(())
    }

    /// Diagonal (σ^z) part of `H` on basis state `z`.
    pub fn diagonal_energy(&self, z: usize) -> f64 {
        let l = self.length;
        let spin = |i: usize| 1.0 - 2.0 * ((z >> (i % l)) & 1) as f64;
        let sum: f64 = (0..l)
            .map(|i| spin(i) * spin(i + 1) + self.field_z * spin(i))
            .sum();
        -self.coupling * sum
    }
}

/// Dense `2^L × 2^L` Hamiltonian. `H` is real, so it is returned as a real symmetric matrix.
pub fn build_mfim_matrix(params: &MfimParams) -> Result<DMatrix<f64>> {
    params.validate()?;
    if params.length > MAX_DENSE_LENGTH {
        return Err(Error::Capability(format!(
            "dense Hamiltonian for L = {} (max {MAX_DENSE_LENGTH})",
            params.length
        )));
    }
    let dim = 1usize << params.length;
    let flip = -params.coupling * params.field_x;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for z in 0..dim {
        h[(z, z)] = params.diagonal_energy(z);
        for i in 0..params.length {
            h[(z ^ (1 << i), z)] += flip;
        }
    }
    Ok(h)
}

/// `e^{−iHt}|state⟩` from the full eigendecomposition of `H`.
pub fn exact_evolve(state: &PureState, params: &MfimParams) -> Result<PureState> {
    SpectralPropagator::new(params)?.evolve(state, params.time)
}

/// How the initial product state is carried to time `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preparation {
    Exact,
    Trotter { steps: usize },
}

/// Evolves `|0⟩^{⊗L}` under `H` for the configured time.
pub fn prepare_state(params: &MfimParams, preparation: Preparation) -> Result<PureState> {
    params.validate()?;
    let initial = PureState::basis(params.length, 0)?;
    match preparation {
        Preparation::Exact => exact_evolve(&initial, params),
        Preparation::Trotter { steps } => trotter_evolve(&initial, params, steps),
    }
}

/// Ground-truth distribution `P(N_k) = Σ_{i∈G_k} |c_i|²`.
pub fn exact_distribution(state: &PureState, op: &NumberOperator) -> Result<Distribution> {
    check_system(state, op)?;
    let mut weights = vec![0.0; op.max_value() as usize + 1];
    for (z, amp) in state.amplitudes().iter().enumerate() {
        weights[op.value(z) as usize] += amp.norm_sqr();
    }
    Ok(Distribution::from_pairs(
        op.support()
            .iter()
            .map(|&n| (n as i64, weights[n as usize])),
    ))
}

/// `⟨e^{iθN}⟩ = Σ_z |amp(z)|² e^{iθ n(z)}`.
pub fn exact_char_func(state: &PureState, op: &NumberOperator, theta: f64) -> Result<Complex64> {
    check_system(state, op)?;
    Ok(state
        .amplitudes()
        .iter()
        .enumerate()
        .map(|(z, a)| a.norm_sqr() * Complex64::cis(theta * op.value(z) as f64))
        .sum())
}

fn check_system(state: &PureState, op: &NumberOperator) -> Result<()> {
    if state.num_qubits() != op.num_qubits() {
        return Err(Error::arg(format!(
            "state has {} qubits, operator spans {}",
            state.num_qubits(),
            op.num_qubits()
        )));
    }
    Ok(())
}

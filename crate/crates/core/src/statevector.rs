//! Dense statevector simulation.
//!
//! Qubit `q` is bit `q` of the basis index (little-endian). System qubits
//! occupy bits `0..L`; ancillas are appended above them at `L..L+A`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution as _};

use crate::error::{Error, Result};
use crate::number::NumberOperator;

/// Tolerance for the unitarity check on gate construction.
pub const UNITARY_TOLERANCE: f64 = 1e-12;
/// Outcome probabilities below this are treated as impossible.
pub const PROJECTION_THRESHOLD: f64 = 1e-14;
/// Largest register the simulator accepts.
pub const MAX_QUBITS: usize = 26;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    num_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    /// Computational basis state `|basis_index⟩`.
    pub fn basis(num_qubits: usize, basis_index: usize) -> Result<Self> {
        check_register(num_qubits)?;
        let dim = 1usize << num_qubits;
        if basis_index >= dim {
            return Err(Error::arg(format!(
                "basis index {basis_index} out of range for {num_qubits} qubits"
            )));
        }
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[basis_index] = ONE;
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    /// Builds a state from raw amplitudes, normalizing them.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::arg(format!(
                "amplitude count {dim} is not a power of two >= 2"
            )));
        }
        let num_qubits = dim.trailing_zeros() as usize;
        check_register(num_qubits)?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::arg("amplitudes have zero or non-finite norm"));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn probability(&self, index: usize) -> f64 {
        self.amplitudes[index].norm_sqr()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::arg("inner product of states with different widths"));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Tensor product with `count` ancillas in `|0⟩`, placed above the existing qubits.
    pub fn with_ancillas(&self, count: usize) -> Result<Self> {
        let num_qubits = self.num_qubits + count;
        check_register(num_qubits)?;
        let mut amplitudes = vec![ZERO; 1usize << num_qubits];
        amplitudes[..self.dim()].copy_from_slice(&self.amplitudes);
        Ok(Self {
            num_qubits,
            amplitudes,
        })
    }

    pub fn apply_gate(&mut self, qubit: usize, gate: &Gate) -> Result<()> {
        self.check_qubit(qubit)?;
        let [[a, b], [c, d]] = gate.matrix;
        let stride = 1usize << qubit;
        for block in self.amplitudes.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (x0, x1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (v0, v1) = (*x0, *x1);
                *x0 = a * v0 + b * v1;
                *x1 = c * v0 + d * v1;
            }
        }
        Ok(())
    }

    /// Multiplies each amplitude by `exp(i·angle·s_a·s_b)` with `s = 1 − 2·bit`.
    pub fn apply_zz_rotation(&mut self, qubit_a: usize, qubit_b: usize, angle: f64) -> Result<()> {
        self.check_qubit(qubit_a)?;
        self.check_qubit(qubit_b)?;
        if qubit_a == qubit_b {
            return Err(Error::arg("zz rotation needs two distinct qubits"));
        }
        let aligned = Complex64::cis(angle);
        let anti = Complex64::cis(-angle);
        for (z, amp) in self.amplitudes.iter_mut().enumerate() {
            let parity = ((z >> qubit_a) ^ (z >> qubit_b)) & 1;
            *amp *= if parity == 0 { aligned } else { anti };
        }
        Ok(())
    }

    pub fn apply_diagonal_phase(&mut self, spec: &DiagonalPhase<'_>) -> Result<()> {
        let system = spec.operator.num_qubits();
        if system > self.num_qubits {
            return Err(Error::arg(format!(
                "operator spans {system} qubits but state has {}",
                self.num_qubits
            )));
        }
        if let Some(control) = spec.control {
            self.check_qubit(control)?;
            if control < system {
                return Err(Error::arg(format!(
                    "control qubit {control} lies inside the operator's system range 0..{system}"
                )));
            }
        }
        let phases: Vec<Complex64> = (0..=spec.operator.max_value())
            .map(|v| Complex64::cis(spec.angle * v as f64))
            .collect();
        let mask = (1usize << system) - 1;
        match spec.control {
            Some(control) => {
                for (z, amp) in self.amplitudes.iter_mut().enumerate() {
                    if (z >> control) & 1 == 1 {
                        *amp *= phases[spec.operator.value(z & mask) as usize];
                    }
                }
            }
            None => {
                for (z, amp) in self.amplitudes.iter_mut().enumerate() {
                    *amp *= phases[spec.operator.value(z & mask) as usize];
                }
            }
        }
        Ok(())
    }

    /// Probability that measuring `qubit` yields `outcome`.
    pub fn marginal_probability(&self, qubit: usize, outcome: u8) -> Result<f64> {
        self.check_qubit(qubit)?;
        let outcome = check_outcome(outcome)?;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(z, _)| (z >> qubit) & 1 == outcome)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// `⟨Z_q⟩ = p₀ − p₁`, summed directly with compensation.
    ///
    /// Computing `2p₀ − 1` instead loses everything below the rounding unit of 1,
    /// which finite-difference stencils then amplify by `h^{−n}`.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        Ok(neumaier_sum(self.amplitudes.iter().enumerate().map(|(z, a)| {
            if (z >> qubit) & 1 == 0 {
                a.norm_sqr()
            } else {
                -a.norm_sqr()
            }
        })))
    }

    /// Projects `qubit` onto `|outcome⟩` and renormalizes.
    pub fn project_qubit(&self, qubit: usize, outcome: u8) -> Result<(f64, PureState)> {
        self.check_qubit(qubit)?;
        let outcome = check_outcome(outcome)?;
        let mut probability = 0.0;
        let mut amplitudes = self.amplitudes.clone();
        for (z, amp) in amplitudes.iter_mut().enumerate() {
            if (z >> qubit) & 1 == outcome {
                probability += amp.norm_sqr();
            } else {
                *amp = ZERO;
            }
        }
        if probability < PROJECTION_THRESHOLD {
            return Err(Error::ProjectionFailed { probability });
        }
        let scale = probability.sqrt().recip();
        amplitudes.iter_mut().for_each(|a| *a *= scale);
        Ok((
            probability,
            PureState {
                num_qubits: self.num_qubits,
                amplitudes,
            },
        ))
    }

    /// Removes a qubit that is in a definite basis state (after projection).
    pub fn discard_qubit(&self, qubit: usize) -> Result<PureState> {
        self.check_qubit(qubit)?;
        if self.num_qubits == 1 {
            return Err(Error::arg("cannot discard the only qubit"));
        }
        let p1 = self.marginal_probability(qubit, 1)?;
        let outcome = if p1 < 0.5 { 0 } else { 1 };
        let leftover = if outcome == 0 { p1 } else { 1.0 - p1 };
        if leftover > 1e-12 {
            return Err(Error::arg(format!(
                "qubit {qubit} is not in a definite state (residual weight {leftover:.3e})"
            )));
        }
        let low_mask = (1usize << qubit) - 1;
        let amplitudes = (0..self.dim() >> 1)
            .map(|r| {
                let z = (r & low_mask) | ((r & !low_mask) << 1) | (outcome << qubit);
                self.amplitudes[z]
            })
            .collect();
        PureState::from_amplitudes(amplitudes)
    }

    /// Joint outcome distribution of `qubits`; outcome bit `j` is `qubits[j]`.
    pub fn measurement_probabilities(&self, qubits: &[usize]) -> Result<Vec<f64>> {
        if qubits.is_empty() {
            return Err(Error::arg("qubit list is empty"));
        }
        for (i, &q) in qubits.iter().enumerate() {
            self.check_qubit(q)?;
            if qubits[..i].contains(&q) {
                return Err(Error::arg(format!("qubit {q} listed twice")));
            }
        }
        let mut probs = vec![0.0; 1usize << qubits.len()];
        for (z, amp) in self.amplitudes.iter().enumerate() {
            let outcome = qubits
                .iter()
                .enumerate()
                .fold(0usize, |acc, (j, &q)| acc | (((z >> q) & 1) << j));
            probs[outcome] += amp.norm_sqr();
        }
        Ok(probs)
    }

    /// Multinomial draw of `shots` measurements of `qubits`.
    ///
    /// Keys are bitstrings with the last listed qubit leftmost, so measuring
    /// `[0, 1, .., n-1]` yields the binary spelling of the basis index.
    pub fn sample_counts(
        &self,
        qubits: &[usize],
        shots: u64,
        seed: u64,
    ) -> Result<BTreeMap<String, u64>> {
        if shots == 0 {
            return Err(Error::arg("shots must be >= 1"));
        }
        let probs = self.measurement_probabilities(qubits)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts = BTreeMap::new();
        let mut remaining_shots = shots;
        let mut remaining_mass = 1.0;
        for (outcome, &p) in probs.iter().enumerate() {
            if remaining_shots == 0 {
                break;
            }
            let drawn = if outcome + 1 == probs.len() || p >= remaining_mass {
                remaining_shots
            } else if p <= 0.0 {
                0
            } else {
                Binomial::new(remaining_shots, (p / remaining_mass).clamp(0.0, 1.0))
                    .map_err(|e| Error::Numerical(e.to_string()))?
                    .sample(&mut rng)
            };
            remaining_shots -= drawn;
            remaining_mass -= p;
            if drawn > 0 {
                counts.insert(bitstring(outcome, qubits.len()), drawn);
            }
        }
        Ok(counts)
    }

    /// `Σ_z |amp(z)|² · n(z)^power` over the operator's system qubits.
    pub fn expectation_diagonal(&self, op: &NumberOperator, power: u32) -> Result<f64> {
        if power == 0 {
            return Err(Error::arg("power must be >= 1"));
        }
        if op.num_qubits() > self.num_qubits {
            return Err(Error::arg("operator is wider than the state"));
        }
        let mask = (1usize << op.num_qubits()) - 1;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(z, a)| a.norm_sqr() * (op.value(z & mask) as f64).powi(power as i32))
            .sum())
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::arg(format!(
                "qubit {qubit} out of range for {} qubits",
                self.num_qubits
            )));
        }
        Ok(())
    }
}

/// Kahan–Babuška summation.
pub(crate) fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut compensation) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}

fn check_register(num_qubits: usize) -> Result<()> {
    if num_qubits == 0 || num_qubits > MAX_QUBITS {
        return Err(Error::Capability(format!(
            "register of {num_qubits} qubits (supported: 1..={MAX_QUBITS})"
        )));
    }
    Ok(())
}

fn check_outcome(outcome: u8) -> Result<usize> {
    match outcome {
        0 | 1 => Ok(outcome as usize),
        _ => Err(Error::arg(format!("outcome must be 0 or 1, got {outcome}"))),
    }
}

fn bitstring(outcome: usize, width: usize) -> String {
    (0..width)
        .rev()
        .map(|j| if (outcome >> j) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// A 2×2 unitary, checked on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate {
    matrix: [[Complex64; 2]; 2],
}

impl Gate {
    pub fn new(matrix: [[Complex64; 2]; 2]) -> Result<Self> {
        let mut deviation: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let entry: Complex64 = (0..2).map(|k| matrix[k][i].conj() * matrix[k][j]).sum();
                let expected = if i == j { ONE } else { ZERO };
                deviation = deviation.max((entry - expected).norm());
            }
        }
        if !(deviation <= UNITARY_TOLERANCE) {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        self.matrix
    }

    pub fn hadamard() -> Self {
        let s = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self {
            matrix: [[s, s], [s, -s]],
        }
    }

    pub fn pauli_x() -> Self {
        Self {
            matrix: [[ZERO, ONE], [ONE, ZERO]],
        }
    }

    /// `R_x(φ) = exp(−iφX/2)`.
    pub fn rx(phi: f64) -> Self {
        let c = Complex64::new((phi / 2.0).cos(), 0.0);
        let s = Complex64::new(0.0, -(phi / 2.0).sin());
        Self {
            matrix: [[c, s], [s, c]],
        }
    }

    /// `R_z(φ) = diag(e^{−iφ/2}, e^{iφ/2})`.
    pub fn rz(phi: f64) -> Self {
        Self {
            matrix: [
                [Complex64::cis(-phi / 2.0), ZERO],
                [ZERO, Complex64::cis(phi / 2.0)],
            ],
        }
    }
}

/// Phase `exp(i·angle·n(z))` on the system part, optionally controlled by an ancilla.
#[derive(Debug, Clone, Copy)]
pub struct DiagonalPhase<'a> {
    pub angle: f64,
    pub operator: &'a NumberOperator,
    pub control: Option<usize>,
}

impl<'a> DiagonalPhase<'a> {
    pub fn new(angle: f64, operator: &'a NumberOperator) -> Self {
        Self {
            angle,
            operator,
            control: None,
        }
    }

    pub fn controlled(angle: f64, operator: &'a NumberOperator, control: usize) -> Self {
        Self {
            angle,
            operator,
            control: Some(control),
        }
    }
}

//! Integer-valued diagonal observables over the computational basis.
//!
//! A [`NumberOperator`] assigns a non-negative integer `n(z)` to every
//! system basis state `z`. Its characteristic function `⟨e^{iθN}⟩` is what
//! the Hadamard-test estimator measures, and its level sets are the number
//! sectors that the filter acts on.

use crate::error::{Error, Result};

/// Largest register the tabulated operator will allocate for.
pub const MAX_OPERATOR_QUBITS: usize = 24;

#[derive(Debug, Clone, PartialEq)]
pub struct NumberOperator {
    num_qubits: usize,
    values: Vec<u32>,
    support: Vec<u32>,
}

impl NumberOperator {
    /// Tabulates `value_fn` over all `2^num_qubits` basis states.
    pub fn from_fn(num_qubits: usize, value_fn: impl Fn(usize) -> u32) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_OPERATOR_QUBITS {
            return Err(Error::arg(format!(
                "number operator needs 1..={MAX_OPERATOR_QUBITS} qubits, got {num_qubits}"
            )));
        }
        let values: Vec<u32> = (0..1usize << num_qubits).map(value_fn).collect();
        Self::from_values(num_qubits, values)
    }

    pub fn from_values(num_qubits: usize, values: Vec<u32>) -> Result<Self> {
        if values.len() != 1usize << num_qubits {
            return Err(Error::arg(format!(
                "expected {} values for {num_qubits} qubits, got {}",
                1usize << num_qubits,
                values.len()
            )));
        }
        let mut support = values.clone();
        support.sort_unstable();
        support.dedup();
        Ok(Self {
            num_qubits,
            values,
            support,
        })
    }

    /// Domain-wall count `½ Σ_i (1 − σ^z_i σ^z_{i+1})` on a periodic chain.
    pub fn domain_walls(length: usize) -> Result<Self> {
        if length < 2 || !length.is_multiple_of(2) {
            return Err(Error::arg(format!(
                "domain walls need an even periodic chain of length >= 2, got {length}"
            )));
        }
        Self::from_fn(length, |z| domain_wall_count(z, length))
    }

    /// Particle count `Σ_i n_i` with `n_i` the bit of qubit `i`.
    pub fn hamming_weight(num_qubits: usize) -> Result<Self> {
        Self::from_fn(num_qubits, |z| z.count_ones())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    #[inline]
    pub fn value(&self, z: usize) -> u32 {
        self.values[z]
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// Sorted set of attainable values `{N_k}`.
    pub fn support(&self) -> &[u32] {
        &self.support
    }

    pub fn max_value(&self) -> u32 {
        *self.support.last().expect("support is never empty")
    }

    /// Greatest common divisor of all attainable values (1 when only 0 occurs).
    ///
    /// The characteristic function is `2π/stride`-periodic, so a grid over the
    /// reduced operator `N/stride` carries the same information with fewer points.
    pub fn stride(&self) -> u32 {
        let g = self.support.iter().fold(0, |acc, &v| gcd(acc, v));
        g.max(1)
    }

    /// The operator `N/divisor`; every value must be divisible.
    pub fn reduced(&self, divisor: u32) -> Result<Self> {
        if divisor == 0 {
            return Err(Error::arg("divisor must be positive"));
        }
        if let Some(v) = self.support.iter().find(|&&v| v % divisor != 0) {
            return Err(Error::arg(format!("value {v} is not divisible by {divisor}")));
        }
        Ok(Self {
            num_qubits: self.num_qubits,
            values: self.values.iter().map(|v| v / divisor).collect(),
            support: self.support.iter().map(|v| v / divisor).collect(),
        })
    }

    /// Basis indices in the sector with value `n`.
    pub fn sector(&self, n: u32) -> impl Iterator<Item = usize> + '_ {
        self.values
            .iter()
            .enumerate()
            .filter(move |(_, &v)| v == n)
            .map(|(z, _)| z)
    }
}

/// Number of bonds `(i, i+1 mod L)` whose bits differ.
pub fn domain_wall_count(z: usize, length: usize) -> u32 {
    let mask = (1usize << length) - 1;
    let rotated = ((z >> 1) | (z << (length - 1))) & mask;
    ((z ^ rotated) & mask).count_ones()
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

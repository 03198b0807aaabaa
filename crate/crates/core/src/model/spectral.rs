//! Exact propagation `e^{−iHt}` by eigendecomposition.
//!
//! [`SpectralPropagator`] diagonalizes `H` inside each lattice-momentum sector.
//! `H` commutes with the cyclic shift `T`, so in the basis
//!
//! ```text
//! |r, κ⟩ = p_r^{-1/2} Σ_{m<p_r} e^{−iqm} T^m |r⟩,   q = 2πκ/L
//! ```
//!
//! (one state per translation orbit with representative `r` and period `p_r`,
//! present only when `κ·p_r ≡ 0 mod L`) it is block diagonal with blocks of
//! size roughly `2^L / L`. The union of the block eigenpairs is the full
//! eigendecomposition. [`DensePropagator`] diagonalizes the dense matrix
//! directly and serves as an independent check at small `L`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use super::{build_mfim_matrix, MfimParams};
use crate::error::{Error, Result};
use crate::statevector::PureState;

struct MomentumBlock {
    momentum: f64,
    reps: Vec<usize>,
    periods: Vec<usize>,
    energies: DVector<f64>,
    vectors: DMatrix<Complex64>,
}

pub struct SpectralPropagator {
    length: usize,
    blocks: Vec<MomentumBlock>,
}

impl SpectralPropagator {
    pub fn new(params: &MfimParams) -> Result<Self> {
        params.validate()?;
        let l = params.length;
        let dim = 1usize << l;
        let mask = dim - 1;
        let shift = |z: usize| ((z << 1) | (z >> (l - 1))) & mask;

        // orbit representative (smallest member) and the m with T^m z = rep
        let mut rep = vec![0u32; dim];
        let mut to_rep = vec![0u8; dim];
        for z in 0..dim {
            let (mut y, mut best, mut best_m) = (z, z, 0);
            for m in 1..l {
                y = shift(y);
                if y < best {
                    best = y;
                    best_m = m;
                }
            }
            rep[z] = best as u32;
            to_rep[z] = best_m as u8;
        }
        let mut reps = Vec::new();
        let mut period_of = vec![0usize; dim];
        for z in (0..dim).filter(|&z| rep[z] as usize == z) {
            let mut y = shift(z);
            let mut p = 1;
            while y != z {
                y = shift(y);
                p += 1;
            }
            period_of[z] = p;
            reps.push(z);
        }

        let flip = -params.coupling * params.field_x;
        let mut position = vec![usize::MAX; dim];
        let mut blocks = Vec::with_capacity(l);
        for kappa in 0..l {
            let block_reps: Vec<usize> = reps
                .iter()
                .copied()
                .filter(|&r| (kappa * period_of[r]).is_multiple_of(l))
                .collect();
            if block_reps.is_empty() {
                continue;
            }
            for (i, &r) in block_reps.iter().enumerate() {
                position[r] = i;
            }
            let q = 2.0 * std::f64::consts::PI * kappa as f64 / l as f64;
            let n = block_reps.len();
            let mut h = DMatrix::<Complex64>::zeros(n, n);
            for (col, &r) in block_reps.iter().enumerate() {
                h[(col, col)] += Complex64::new(params.diagonal_energy(r), 0.0);
                for i in 0..l {
                    let s = r ^ (1 << i);
                    let rs = rep[s] as usize;
                    let row = position[rs];
                    if row == usize::MAX || !(kappa * period_of[rs]).is_multiple_of(l) {
                        continue;
                    }
                    // s = T^shift rs
                    let shift_count = (l - to_rep[s] as usize) % l;
                    let ratio = (period_of[r] as f64 / period_of[rs] as f64).sqrt();
                    h[(row, col)] += Complex64::cis(q * shift_count as f64) * (flip * ratio);
                }
            }
            for &r in &block_reps {
                position[r] = usize::MAX;
            }
            let hermitian = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
            let eig = SymmetricEigen::new(hermitian);
            blocks.push(MomentumBlock {
                momentum: q,
                periods: block_reps.iter().map(|&r| period_of[r]).collect(),
                reps: block_reps,
                energies: eig.eigenvalues,
                vectors: eig.eigenvectors,
            });
        }
        Ok(Self { length: l, blocks })
    }

    /// All eigenvalues of `H`, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self
            .blocks
            .iter()
            .flat_map(|b| b.energies.iter().copied())
            .collect();
        all.sort_by(f64::total_cmp);
        all
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn evolve(&self, state: &PureState, time: f64) -> Result<PureState> {
        if state.num_qubits() != self.length {
            return Err(Error::arg(format!(
                "state has {} qubits, chain has {} sites",
                state.num_qubits(),
                self.length
            )));
        }
        let l = self.length;
        let mask = (1usize << l) - 1;
        let shift = |z: usize| ((z << 1) | (z >> (l - 1))) & mask;
        let psi = state.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); psi.len()];
        for block in &self.blocks {
            let q = block.momentum;
            let coeffs = DVector::from_iterator(
                block.reps.len(),
                block.reps.iter().zip(&block.periods).map(|(&r, &p)| {
                    let mut z = r;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for m in 0..p {
                        acc += Complex64::cis(q * m as f64) * psi[z];
                        z = shift(z);
                    }
                    acc / (p as f64).sqrt()
                }),
            );
            let mut eigen_coeffs = block.vectors.adjoint() * coeffs;
            for (c, &e) in eigen_coeffs.iter_mut().zip(block.energies.iter()) {
                *c *= Complex64::cis(-e * time);
            }
            let evolved = &block.vectors * eigen_coeffs;
            for ((&r, &p), &c) in block.reps.iter().zip(&block.periods).zip(evolved.iter()) {
                let c = c / (p as f64).sqrt();
                let mut z = r;
                for m in 0..p {
                    out[z] += c * Complex64::cis(-q * m as f64);
                    z = shift(z);
                }
            }
        }
        PureState::from_amplitudes(out)
    }
}

/// Eigendecomposition of the dense Hamiltonian; practical up to `L ≈ 10`.
pub struct DensePropagator {
    energies: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl DensePropagator {
    pub fn new(params: &MfimParams) -> Result<Self> {
        let eig = SymmetricEigen::new(build_mfim_matrix(params)?);
        Ok(Self {
            energies: eig.eigenvalues,
            vectors: eig.eigenvectors,
        })
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.energies.iter().copied().collect();
        all.sort_by(f64::total_cmp);
        all
    }

    pub fn evolve(&self, state: &PureState, time: f64) -> Result<PureState> {
        if state.dim() != self.energies.len() {
            return Err(Error::arg("state dimension does not match the Hamiltonian"));
        }
        let psi = DVector::from_column_slice(state.amplitudes());
        let vectors = self.vectors.map(|v| Complex64::new(v, 0.0));
        let mut coeffs = vectors.transpose() * psi;
        for (c, &e) in coeffs.iter_mut().zip(self.energies.iter()) {
            *c *= Complex64::cis(-e * time);
        }
        let out = vectors * coeffs;
        PureState::from_amplitudes(out.iter().copied().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pseudo_random_state(num_qubits: usize, salt: f64) -> PureState {
        let amps = (0..1usize << num_qubits)
            .map(|i| {
                let x = i as f64 + salt;
                Complex64::new((x * 1.618).sin(), (x * 2.718 + salt).cos())
            })
            .collect();
        PureState::from_amplitudes(amps).unwrap()
    }

    #[test]
    fn blocks_cover_the_hilbert_space() {
        for l in [2, 4, 6, 8] {
            let params = MfimParams::new(l, 1.0, 0.8, 0.3, 1.0).unwrap();
            let prop = SpectralPropagator::new(&params).unwrap();
            assert_eq!(prop.eigenvalues().len(), 1 << l);
            assert_eq!(prop.num_blocks(), l);
        }
    }

    #[test]
    fn spectrum_matches_dense_diagonalization() {
        for l in [2, 4, 6, 8] {
            let params = MfimParams::new(l, 0.9, 1.1, 0.4, 1.0).unwrap();
            let blocked = SpectralPropagator::new(&params).unwrap().eigenvalues();
            let dense = DensePropagator::new(&params).unwrap().eigenvalues();
            for (a, b) in blocked.iter().zip(&dense) {
                assert!((a - b).abs() < 1e-9, "L={l}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn evolution_matches_dense_route() {
        for l in [2, 4, 6, 8] {
            let params = MfimParams::new(l, 1.0, 1.0, 1.0, 0.7).unwrap();
            let state = pseudo_random_state(l, 0.25);
            let a = SpectralPropagator::new(&params)
                .unwrap()
                .evolve(&state, params.time)
                .unwrap();
            let b = DensePropagator::new(&params)
                .unwrap()
                .evolve(&state, params.time)
                .unwrap();
            let diff = a
                .amplitudes()
                .iter()
                .zip(b.amplitudes())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-10, "L={l}: max amplitude difference {diff}");
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let params = MfimParams::new(6, 1.0, 1.0, 1.0, 0.0).unwrap();
        let state = pseudo_random_state(6, 3.0);
        let out = SpectralPropagator::new(&params)
            .unwrap()
            .evolve(&state, 0.0)
            .unwrap();
        for (x, y) in out.amplitudes().iter().zip(state.amplitudes()) {
            assert!((x - y).norm() < 1e-12);
        }
    }

    #[test]
    fn diagonal_hamiltonian_keeps_probabilities() {
        let params = MfimParams::new(6, 1.0, 0.0, 0.6, 2.3).unwrap();
        let state = pseudo_random_state(6, 1.0);
        let out = SpectralPropagator::new(&params)
            .unwrap()
            .evolve(&state, params.time)
            .unwrap();
        for z in 0..64 {
            assert!((out.probability(z) - state.probability(z)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_mismatched_width() {
        let params = MfimParams::new(4, 1.0, 1.0, 1.0, 1.0).unwrap();
        let prop = SpectralPropagator::new(&params).unwrap();
        assert!(prop.evolve(&PureState::basis(5, 0).unwrap(), 1.0).is_err());
    }
}

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Probabilities `P(n)` over integer particle numbers.
///
/// Distributions produced by a DFT reconstruction carry the `reconstructed`
/// flag: aliasing and shot noise can push entries negative or break
/// normalization, so the physical invariants are not enforced on them.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Distribution {
    probs: BTreeMap<i64, f64>,
    reconstructed: bool,
}

impl Distribution {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, f64)>) -> Self {
        let mut probs = BTreeMap::new();
        for (n, p) in pairs {
            *probs.entry(n).or_insert(0.0) += p;
        }
        Self {
            probs,
            reconstructed: false,
        }
    }

    pub fn reconstructed(pairs: impl IntoIterator<Item = (i64, f64)>) -> Self {
        Self {
            reconstructed: true,
            ..Self::from_pairs(pairs)
        }
    }

    pub fn is_reconstructed(&self) -> bool {
        self.reconstructed
    }

    /// `P(n)`, zero when `n` is absent.
    pub fn get(&self, n: i64) -> f64 {
        self.probs.get(&n).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, n: i64) -> bool {
        self.probs.contains_key(&n)
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs.iter().map(|(&n, &p)| (n, p))
    }

    pub fn keys(&self) -> impl Iterator<Item = i64> + '_ {
        self.probs.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }

    /// Largest `n` carrying nonzero weight.
    pub fn max_value(&self) -> Option<i64> {
        self.probs
            .iter()
            .rev()
            .find(|(_, &p)| p != 0.0)
            .map(|(&n, _)| n)
    }

    /// True when every `n` with nonzero weight is even.
    pub fn is_even_parity(&self) -> bool {
        self.probs.iter().all(|(&n, &p)| p == 0.0 || n % 2 == 0)
    }

    /// Clamps negative entries to zero and rescales to unit total.
    pub fn normalized(&self) -> Result<Self> {
        let clamped: BTreeMap<i64, f64> =
            self.probs.iter().map(|(&n, &p)| (n, p.max(0.0))).collect();
        let total: f64 = clamped.values().sum();
        if !(total > 0.0) {
            return Err(Error::Numerical("distribution has no positive weight".into()));
        }
        Ok(Self {
            probs: clamped.into_iter().map(|(n, p)| (n, p / total)).collect(),
            reconstructed: self.reconstructed,
        })
    }

    /// Checks `P(n) ≥ −1e-9` and `Σ P(n) = 1` within 1e-9.
    pub fn check_physical(&self) -> Result<()> {
        if let Some((n, p)) = self.iter().find(|&(_, p)| p < -1e-9) {
            return Err(Error::Numerical(format!("P({n}) = {p:e} is negative")));
        }
        let total = self.total();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Numerical(format!("total probability {total}")));
        }
        Ok(())
    }

    /// Relabels `n → n·factor`.
    pub fn scale_values(&self, factor: i64) -> Self {
        Self {
            probs: self.probs.iter().map(|(&n, &p)| (n * factor, p)).collect(),
            reconstructed: self.reconstructed,
        }
    }

    /// Keeps only the listed values.
    pub fn restrict_to(&self, keep: &[i64]) -> Self {
        Self {
            probs: self
                .probs
                .iter()
                .filter(|(n, _)| keep.contains(n))
                .map(|(&n, &p)| (n, p))
                .collect(),
            reconstructed: self.reconstructed,
        }
    }

    /// Raw moment `Σ P(n) nᵖ`.
    pub fn moment(&self, power: u32) -> f64 {
        self.iter().map(|(n, p)| p * (n as f64).powi(power as i32)).sum()
    }

    /// Mean, variance and third central moment from the probabilities directly.
    pub fn central_cumulants(&self) -> (f64, f64, f64) {
        let mean = self.moment(1);
        let central = |k: i32| -> f64 { self.iter().map(|(n, p)| p * (n as f64 - mean).powi(k)).sum() };
        (mean, central(2), central(3))
    }
}

/// `½ Σ_n |p(n) − q(n)|`; missing keys count as zero.
pub fn trace_distance(p: &Distribution, q: &Distribution) -> f64 {
    let keys: std::collections::BTreeSet<i64> = p.keys().chain(q.keys()).collect();
    0.5 * keys.into_iter().map(|n| (p.get(n) - q.get(n)).abs()).sum::<f64>()
}

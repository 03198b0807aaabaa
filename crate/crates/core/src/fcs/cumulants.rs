/// First three cumulants with the raw moments they were assembled from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulantSet {
    pub mean: f64,
    pub variance: f64,
    /// Third cumulant (unnormalized skewness).
    pub skewness: f64,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    /// Step used by the stencils, if the moments came from finite differences.
    pub step: Option<f64>,
    pub rounds: Option<u32>,
}

impl CumulantSet {
    pub fn with_stencil(mut self, step: f64, rounds: u32) -> Self {
        self.step = Some(step);
        self.rounds = Some(rounds);
        self
    }

    /// `[κ1, κ2, κ3]`.
    pub fn cumulants(&self) -> [f64; 3] {
        [self.mean, self.variance, self.skewness]
    }
}

/// `κ1 = m1`, `κ2 = m2 − m1²`, `κ3 = m3 − 3 m2 m1 + 2 m1³`.
pub fn moments_to_cumulants(m1: f64, m2: f64, m3: f64) -> CumulantSet {
    CumulantSet {
        mean: m1,
        variance: m2 - m1 * m1,
        skewness: m3 - 3.0 * m2 * m1 + 2.0 * m1.powi(3),
        m1,
        m2,
        m3,
        step: None,
        rounds: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fcs::Distribution;

    #[test]
    fn examples() {
        assert_eq!(moments_to_cumulants(0.0, 1.0, 0.0).cumulants(), [0.0, 1.0, 0.0]);
        assert_eq!(moments_to_cumulants(2.0, 8.0, 32.0).cumulants(), [2.0, 4.0, 0.0]);
        for m in [1.0, 3.0, 7.0] {
            let c = moments_to_cumulants(m, m * m, m * m * m);
            assert_eq!(c.cumulants(), [m, 0.0, 0.0]);
        }
    }

    #[test]
    fn squared_mean_would_break_delta() {
        // with +2m1² instead of +2m1³ the delta law would have κ3 ≠ 0
        let m = 3.0;
        assert_ne!(m * m * m - 3.0 * m * m * m + 2.0 * m * m, 0.0);
    }

    #[test]
    fn agrees_with_central_moments() {
        let d = Distribution::from_pairs([(0, 0.1), (2, 0.5), (4, 0.3), (6, 0.1)]);
        let c = moments_to_cumulants(d.moment(1), d.moment(2), d.moment(3));
        let (mean, var, third) = d.central_cumulants();
        assert!((c.mean - mean).abs() < 1e-12);
        assert!((c.variance - var).abs() < 1e-12);
        assert!((c.skewness - third).abs() < 1e-12);
        let tagged = c.with_stencil(0.01, 2);
        assert_eq!((tagged.step, tagged.rounds), (Some(0.01), Some(2)));
    }
}

use serde::{Deserialize, Serialize};

use crate::mc::Moments;

/// Parameters recorded alongside an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EstimateParams {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub j: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<f64>,
}

impl EstimateParams {
    pub fn nmk(n: usize, m: usize, k: usize) -> Self {
        Self { n, m, k, ..Default::default() }
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_j(mut self, j: usize) -> Self {
        self.j = Some(j);
        self
    }
}

/// Monte Carlo estimate of a transform value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
    pub params: EstimateParams,
}

impl TransformEstimate {
    /// An exact value (zero variance).
    pub fn exact(mean: f64, params: EstimateParams) -> Self {
        Self { mean, stderr: 0.0, samples: 1, seed: 0, params }
    }

    pub fn from_moments(mo: &Moments, seed: u64, params: EstimateParams) -> Self {
        Self { mean: mo.mean, stderr: mo.stderr(), samples: mo.n.max(1), seed, params }
    }

    /// Multiply by a constant; the standard error scales with `|c|`.
    pub fn scaled(mut self, c: f64) -> Self {
        self.mean *= c;
        self.stderr *= c.abs();
        self
    }

    /// `sqrt(σ_a² + σ_b²)`, the standard error of a difference of independent estimates.
    pub fn combined_stderr(&self, other: &TransformEstimate) -> f64 {
        self.stderr.hypot(other.stderr)
    }

    /// `|a - b| <= s · combined σ`.
    pub fn agrees_with(&self, other: &TransformEstimate, sigmas: f64) -> bool {
        (self.mean - other.mean).abs() <= sigmas * self.combined_stderr(other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaling_and_agreement() {
        let p = EstimateParams::nmk(4, 1, 1).with_lambda(2.0);
        let a = TransformEstimate { mean: 1.0, stderr: 0.1, samples: 10, seed: 1, params: p };
        let b = a.scaled(-2.0);
        assert_eq!(b.mean, -2.0);
        assert_eq!(b.stderr, 0.2);
        assert!(a.agrees_with(&TransformEstimate::exact(1.3, p), 4.0));
        assert!(!a.agrees_with(&TransformEstimate::exact(1.5, p), 4.0));
        let js = serde_json::to_string(&a).unwrap();
        assert!(js.contains("\"lambda\":2.0"));
        assert!(!js.contains("\"j\""));
    }
}

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Value of a meromorphic function at a real point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MeroValue {
    Finite { value: f64 },
    Pole { order: u32 },
}

impl MeroValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            MeroValue::Finite { value } => Some(value),
            MeroValue::Pole { .. } => None,
        }
    }

    pub fn is_pole(&self) -> bool {
        matches!(self, MeroValue::Pole { .. })
    }
}

const POLE_TOL: f64 = 1e-12;

/// `Some(k)` when `x` is the nonpositive integer `-k`.
pub(crate) fn nonpositive_integer(x: f64) -> Option<u64> {
    let r = x.round();
    if r <= 0.0 && (x - r).abs() < POLE_TOL {
        Some((-r) as u64)
    } else {
        None
    }
}

fn ln_factorial(k: u64) -> f64 {
    libm::lgamma(k as f64 + 1.0)
}

/// A product of classical gamma factors kept as
/// `sign * exp(log_abs) * t^{-poles}` in a local parameter `t`.
///
/// A factor `Γ(a0 + r t)` with `a0 = -k` contributes its residue
/// `(-1)^k / (k! r)` and one power of `1/t`. Ratios with equal pole counts
/// then give the limiting value of the quotient along `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LogProduct {
    pub poles: i64,
    pub log_abs: f64,
    pub sign: f64,
}

impl LogProduct {
    pub fn one() -> Self {
        Self { poles: 0, log_abs: 0.0, sign: 1.0 }
    }

    /// Multiply by `Γ(a)` where the argument moves at rate `rate` along the local
    /// parameter. A zero rate is treated as 1.
    pub fn times_gamma(mut self, a: f64, rate: f64) -> Self {
        match nonpositive_integer(a) {
            Some(k) => {
                let r = if rate == 0.0 { 1.0 } else { rate };
                self.poles += 1;
                self.log_abs += -ln_factorial(k) - r.abs().ln();
                if k % 2 == 1 {
                    self.sign = -self.sign;
                }
                if r < 0.0 {
                    self.sign = -self.sign;
                }
            }
            None => {
                let (lg, s) = libm::lgamma_r(a);
                self.log_abs += lg;
                if s < 0 {
                    self.sign = -self.sign;
                }
            }
        }
        self
    }

    /// Multiply by `Γ_m(a)` with argument rate `rate`.
    pub fn times_siegel(mut self, m: usize, a: f64, rate: f64) -> Self {
        let mf = m as f64;
        self.log_abs += mf * (mf - 1.0) / 4.0 * PI.ln();
        for j in 0..m {
            self = self.times_gamma(a - j as f64 / 2.0, rate);
        }
        self
    }

    pub fn times_positive(mut self, c: f64) -> Self {
        self.log_abs += c.ln();
        self
    }

    pub fn divide(self, o: &LogProduct) -> Self {
        Self { poles: self.poles - o.poles, log_abs: self.log_abs - o.log_abs, sign: self.sign * o.sign }
    }

    pub fn times(self, o: &LogProduct) -> Self {
        Self { poles: self.poles + o.poles, log_abs: self.log_abs + o.log_abs, sign: self.sign * o.sign }
    }

    /// Collapse to a value: positive net pole count is a pole, negative is a zero.
    pub fn value(&self) -> MeroValue {
        if self.poles > 0 {
            MeroValue::Pole { order: self.poles as u32 }
        } else if self.poles < 0 {
            MeroValue::Finite { value: 0.0 }
        } else {
            MeroValue::Finite { value: self.sign * self.log_abs.exp() }
        }
    }
}

/// Siegel gamma `Γ_m(α) = π^{m(m-1)/4} ∏_{j<m} Γ(α - j/2)`.
///
/// Evaluated in log space. At a pole the order is the number of factors
/// whose argument is a nonpositive integer.
///
/// ```
/// use stiefel::special::{siegel_gamma, MeroValue};
/// let v = siegel_gamma(2, 1.0).finite().unwrap();
/// assert!((v - std::f64::consts::PI).abs() < 1e-14);
/// assert_eq!(siegel_gamma(2, 0.5), MeroValue::Pole { order: 1 });
/// ```
pub fn siegel_gamma(m: usize, alpha: f64) -> MeroValue {
    assert!(m >= 1, "siegel_gamma needs m >= 1");
    LogProduct::one().times_siegel(m, alpha, 1.0).value()
}

/// Natural log of `|Γ_m(α)|` and its sign, for non-pole arguments.
pub fn ln_siegel_gamma(m: usize, alpha: f64) -> Option<(f64, f64)> {
    let p = LogProduct::one().times_siegel(m, alpha, 1.0);
    (p.poles == 0).then_some((p.log_abs, p.sign))
}

/// Bernstein polynomial `B_{ℓ,m,n}(λ) = ∏_{i<m} ∏_{j<ℓ} (λ+n-i+2j)(λ+2+2j+i)`.
pub fn bernstein_poly(ell: usize, m: usize, n: usize, lambda: f64) -> f64 {
    let mut acc = 1.0;
    for i in 0..m {
        for j in 0..ell {
            let (i, j) = (i as f64, j as f64);
            acc *= (lambda + n as f64 - i + 2.0 * j) * (lambda + 2.0 + 2.0 * j + i);
        }
    }
    acc
}

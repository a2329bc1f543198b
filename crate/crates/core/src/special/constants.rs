use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use super::gamma::{LogProduct, MeroValue};
use crate::error::{Error, Result};

/// Normalizing constants that appear in the transforms and inversion formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConstantKind {
    /// `γ_{m,k}(λ)`, normalization of the cosine transform.
    GammaMk,
    /// `δ_m(λ)`, normalization of the sine transform.
    DeltaM,
    /// `c_j`, the Funk value of the intermediate transform.
    CJ,
    /// `c̃_j`, the normalized-cosine value at `λ = j - k`.
    TildeCJ,
    /// `δ_j`, the constant in the local inversion through `F^{(j)}`.
    DeltaJ,
    /// `δ_j` at `j = 0`.
    Delta0,
    /// `δ̃`, relating the sine transform to the normalized cosine transform.
    TildeDelta,
    /// Constant of the intertwining inversion `f = D F φ`.
    IntertwiningC,
    /// Constant of the nonlocal inversion through `F*^{(1)}`.
    NonlocalC,
    /// `σ_{n,m}`, the Haar volume of `V(n,m)`.
    SigmaNm,
}

impl ConstantKind {
    pub const ALL: [ConstantKind; 10] = [
        Self::GammaMk,
        Self::DeltaM,
        Self::CJ,
        Self::TildeCJ,
        Self::DeltaJ,
        Self::Delta0,
        Self::TildeDelta,
        Self::IntertwiningC,
        Self::NonlocalC,
        Self::SigmaNm,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Self::GammaMk => "gamma_mk",
            Self::DeltaM => "delta_m",
            Self::CJ => "c_j",
            Self::TildeCJ => "tilde_c_j",
            Self::DeltaJ => "delta_j",
            Self::Delta0 => "delta_0",
            Self::TildeDelta => "tilde_delta",
            Self::IntertwiningC => "jhb67A_c",
            Self::NonlocalC => "jhbsa67_c",
            Self::SigmaNm => "sigma_nm",
        }
    }

    /// Parameters the constant depends on.
    pub fn uses(self) -> &'static [&'static str] {
        match self {
            Self::GammaMk => &["n", "m", "k", "lambda"],
            Self::DeltaM => &["n", "m", "lambda"],
            Self::CJ | Self::TildeCJ | Self::DeltaJ => &["n", "m", "k", "j"],
            Self::Delta0 | Self::TildeDelta | Self::NonlocalC => &["n", "m", "k"],
            Self::IntertwiningC | Self::SigmaNm => &["n", "m"],
        }
    }
}

impl fmt::Display for ConstantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for ConstantKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Self::ALL
            .into_iter()
            .find(|k| k.tag().eq_ignore_ascii_case(s))
            .or(match s {
                "intertwining_c" => Some(Self::IntertwiningC),
                "nonlocal_c" => Some(Self::NonlocalC),
                _ => None,
            })
            .ok_or_else(|| Error::InvalidParams(format!("unknown constant kind '{s}'")))
    }
}

/// Parameters for [`constant`]. Fields a kind does not use are ignored.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConstParams {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub j: usize,
    pub lambda: f64,
}

impl ConstParams {
    pub fn nmk(n: usize, m: usize, k: usize) -> Self {
        Self { n, m, k, ..Default::default() }
    }
}

pub(crate) fn require(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InadmissibleParameters(what.to_string()))
    }
}

pub(crate) fn base(p: &ConstParams) -> Result<()> {
    require(p.m >= 1, "1 <= m")?;
    require(p.m <= p.k, "m <= k")?;
    require(p.k < p.n, "k <= n-1")
}

pub(crate) fn intermediate(p: &ConstParams) -> Result<()> {
    base(p)?;
    require(p.n - p.k + p.j >= p.m, "n-k+j >= m")?;
    require(p.j < p.m, "0 <= j <= m-1")
}

fn local_inversion(p: &ConstParams) -> Result<()> {
    require(p.m >= 1, "1 <= m")?;
    require(p.m <= p.k, "m <= k")?;
    require(p.k + p.m <= p.n, "k <= n-m")?;
    let jk = p.j as i64 - p.k as i64;
    let (n, m, k) = (p.n as i64, p.m as i64, p.k as i64);
    require(m - n <= jk, "m-n <= j-k")?;
    require(jk <= (-m).min(m - k - 1), "j-k <= min(-m, m-k-1)")
}

/// Evaluate a normalizing constant as an exact gamma ratio in log space.
///
/// Ratios whose numerator and denominator have equally many poles are
/// evaluated as the limit in `λ` (or, for `λ`-free kinds, along a common
/// unit-rate shift).
///
/// ```
/// use stiefel::special::{constant, ConstantKind, ConstParams};
/// let d0 = constant(ConstantKind::Delta0, &ConstParams::nmk(4, 1, 1)).unwrap();
/// assert!((d0.finite().unwrap() - 4.0).abs() < 1e-12);
/// ```
pub fn constant(kind: ConstantKind, p: &ConstParams) -> Result<MeroValue> {
    let (n, m, k, j) = (p.n as f64, p.m, p.k as f64, p.j as f64);
    let mf = m as f64;
    let l = p.lambda;
    let one = LogProduct::one;
    let g = |a: f64| one().times_siegel(m, a, 0.0);
    let gr = |a: f64, r: f64| one().times_siegel(m, a, r);
    let prod = match kind {
        ConstantKind::GammaMk => {
            base(p)?;
            g(mf / 2.0)
                .divide(&g(n / 2.0))
                .times(&gr(-l / 2.0, -0.5))
                .divide(&gr((l + k) / 2.0, 0.5))
        }
        ConstantKind::DeltaM => {
            require(m >= 1, "1 <= m")?;
            require(2 * m <= p.n, "2m <= n")?;
            g(mf / 2.0)
                .divide(&g(n / 2.0))
                .times(&gr(-l / 2.0, -0.5))
                .divide(&gr((l + n - mf) / 2.0, 0.5))
        }
        ConstantKind::CJ => {
            intermediate(p)?;
            g(n / 2.0).divide(&g(k / 2.0).times(&g((n - k + j) / 2.0)))
        }
        ConstantKind::TildeCJ => {
            intermediate(p)?;
            g(mf / 2.0).times(&g((k - j) / 2.0)).divide(&g(k / 2.0).times(&g((n - k + j) / 2.0)))
        }
        ConstantKind::DeltaJ | ConstantKind::Delta0 => {
            let q = if kind == ConstantKind::Delta0 { ConstParams { j: 0, ..*p } } else { *p };
            local_inversion(&q)?;
            let j = q.j as f64;
            g((k - j) / 2.0)
                .times(&g(mf / 2.0))
                .divide(&g((n - k + j) / 2.0).times(&g((n - mf) / 2.0)))
        }
        ConstantKind::TildeDelta => {
            require(m >= 1 && m <= p.k, "1 <= m <= k")?;
            require(p.k + m <= p.n, "k <= n-m")?;
            g(k / 2.0).divide(&g((n - mf) / 2.0))
        }
        ConstantKind::IntertwiningC => {
            require(m >= 1, "1 <= m")?;
            require(2 * m < p.n, "2m < n")?;
            let r = g(mf / 2.0).divide(&g((n - mf) / 2.0));
            r.times(&r)
        }
        ConstantKind::NonlocalC => {
            require(m >= 1, "1 <= m")?;
            require(m < p.k, "m < k")?;
            require(p.k + m <= p.n, "k <= n-m")?;
            require((p.n - p.k - m) % 2 == 1, "n-k-m odd")?;
            g(mf / 2.0)
                .times(&g((k - 1.0) / 2.0))
                .divide(&g((n - mf) / 2.0).times(&g((n - k + 1.0) / 2.0)))
        }
        ConstantKind::SigmaNm => {
            require(m >= 1 && m <= p.n, "1 <= m <= n")?;
            one()
                .times_positive(2f64.powi(m as i32))
                .times_positive(PI.powf(n * mf / 2.0))
                .divide(&g(n / 2.0))
        }
    };
    Ok(prod.value())
}

/// Total mass of the unnormalized cosine transform: `(C^λ_{m,k} 1)(u)`.
pub fn cosine_mass(n: usize, m: usize, k: usize, lambda: f64) -> MeroValue {
    let (nf, kf) = (n as f64, k as f64);
    let g = |a: f64, r: f64| LogProduct::one().times_siegel(m, a, r);
    g(nf / 2.0, 0.0)
        .times(&g((lambda + kf) / 2.0, 0.5))
        .divide(&g(kf / 2.0, 0.0).times(&g((lambda + nf) / 2.0, 0.5)))
        .value()
}

/// Total mass of the unnormalized sine transform on `V(n,m)`.
pub fn sine_mass(n: usize, m: usize, lambda: f64) -> MeroValue {
    cosine_mass(n, m, n - m, lambda)
}

/// `E |x|_m^λ` for an `n×m` matrix with i.i.d. `N(0, 1/2)` entries.
pub fn gaussian_zeta_moment(n: usize, m: usize, lambda: f64) -> MeroValue {
    let nf = n as f64;
    LogProduct::one()
        .times_siegel(m, (nf + lambda) / 2.0, 0.5)
        .divide(&LogProduct::one().times_siegel(m, nf / 2.0, 0.0))
        .value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn val(kind: ConstantKind, p: ConstParams) -> f64 {
        constant(kind, &p).unwrap().finite().unwrap()
    }

    #[test]
    fn documented_values() {
        assert_relative_eq!(val(ConstantKind::SigmaNm, ConstParams::nmk(3, 1, 0)), 4.0 * PI, max_relative = 1e-14);
        assert_relative_eq!(val(ConstantKind::Delta0, ConstParams::nmk(4, 1, 1)), 4.0, max_relative = 1e-14);
        assert_relative_eq!(val(ConstantKind::IntertwiningC, ConstParams::nmk(4, 1, 0)), 4.0, max_relative = 1e-14);
        assert_relative_eq!(val(ConstantKind::NonlocalC, ConstParams::nmk(6, 2, 3)), 4.0, max_relative = 1e-13);
        let d = val(ConstantKind::DeltaM, ConstParams { n: 6, m: 2, lambda: -2.0, ..Default::default() });
        assert_relative_eq!(d, 2.0 / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn intertwining_equals_delta0_at_k_eq_m() {
        for (n, m) in [(4, 1), (5, 2), (7, 3), (6, 1)] {
            let a = val(ConstantKind::IntertwiningC, ConstParams::nmk(n, m, m));
            let b = val(ConstantKind::Delta0, ConstParams::nmk(n, m, m));
            assert_relative_eq!(a, b, max_relative = 1e-13);
        }
    }

    #[test]
    fn masses() {
        assert_relative_eq!(cosine_mass(4, 1, 1, 2.0).finite().unwrap(), 0.25, max_relative = 1e-14);
        assert_relative_eq!(sine_mass(4, 1, 2.0).finite().unwrap(), 0.75, max_relative = 1e-14);
        assert_relative_eq!(sine_mass(6, 2, -2.0).finite().unwrap(), 6.0, max_relative = 1e-13);
    }

    #[test]
    fn gamma_poles() {
        let p = |l| ConstParams { n: 4, m: 1, k: 1, lambda: l, ..Default::default() };
        assert!(constant(ConstantKind::GammaMk, &p(0.0)).unwrap().is_pole());
        assert!(constant(ConstantKind::GammaMk, &p(2.0)).unwrap().is_pole());
        let q = ConstParams { n: 5, m: 2, k: 3, lambda: -1.0, ..Default::default() };
        assert!(constant(ConstantKind::GammaMk, &q).unwrap().is_pole());
        // k = 2: numerator and denominator poles cancel, leaving a finite limit.
        let q = ConstParams { n: 5, m: 2, k: 2, lambda: -1.0, ..Default::default() };
        let near = ConstParams { lambda: -1.0 + 1e-7, ..q };
        let a = constant(ConstantKind::GammaMk, &q).unwrap().finite().unwrap();
        let b = constant(ConstantKind::GammaMk, &near).unwrap().finite().unwrap();
        assert!((a - b).abs() < 1e-5 * a.abs());
        let q = ConstParams { n: 4, m: 1, k: 1, lambda: -3.0, ..Default::default() };
        assert_eq!(constant(ConstantKind::GammaMk, &q).unwrap(), MeroValue::Finite { value: 0.0 });
    }

    #[test]
    fn inadmissible_reports_inequality() {
        let e = constant(ConstantKind::CJ, &ConstParams { n: 5, m: 2, k: 2, j: 2, lambda: 0.0 }).unwrap_err();
        assert_eq!(e, Error::InadmissibleParameters("0 <= j <= m-1".into()));
        let e = constant(ConstantKind::NonlocalC, &ConstParams::nmk(6, 2, 2)).unwrap_err();
        assert!(matches!(e, Error::InadmissibleParameters(_)));
    }

    #[test]
    fn never_nan() {
        for kind in ConstantKind::ALL {
            for n in 2..8 {
                for m in 1..n {
                    for k in m..n {
                        for j in 0..m {
                            for l in [-5.0, -4.0, -3.5, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 3.0] {
                                let p = ConstParams { n, m, k, j, lambda: l };
                                if let Ok(v) = constant(kind, &p) {
                                    if let Some(x) = v.finite() {
                                        assert!(x.is_finite(), "{kind} {p:?}");
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn tags_roundtrip() {
        for k in ConstantKind::ALL {
            assert_eq!(k.tag().parse::<ConstantKind>().unwrap(), k);
        }
    }
}

//! Exact spectral data for zonal harmonics on `S^{n-1}` (rank one).
//!
//! Every rank-one transform here is a zonal convolution, so it acts on a
//! degree-`d` spherical harmonic by a scalar. The multipliers below come from
//! one-dimensional integrals and serve as independent ground truth.

use std::f64::consts::PI;

use super::quadrature::{gauss_legendre, tanh_sinh};

/// Coefficients `c_k` of the monic zonal solid harmonic
/// `H_d(x) = Σ_k c_k (e·x)^{d-2k} |x|^{2k}` in `ℝ^n`.
pub fn gegenbauer_monic(n: usize, d: usize) -> Vec<f64> {
    let mut c = vec![1.0];
    for k in 0..d / 2 {
        let a = (d - 2 * k) as f64;
        let den = 2.0 * (k as f64 + 1.0) * (n as f64 + 2.0 * d as f64 - 2.0 * k as f64 - 4.0);
        let next = -c[k] * a * (a - 1.0) / den;
        c.push(next);
    }
    c
}

/// `H_d` restricted to the sphere as a function of `t = e·v`.
pub fn zonal_profile(n: usize, d: usize, t: f64) -> f64 {
    gegenbauer_monic(n, d).iter().enumerate().map(|(k, c)| c * t.powi((d - 2 * k) as i32)).sum()
}

/// Funk-Hecke multiplier of the Funk transform on even degree `d`, closed form
/// `(-1)^{d/2} (1·3···(d-1)) / ((n-1)(n+1)···(n+d-3))`.
pub fn funk_hecke_closed(n: usize, d: usize) -> f64 {
    let mut num = 1.0;
    let mut den = 1.0;
    for i in 0..d / 2 {
        num *= (2 * i + 1) as f64;
        den *= (n + 2 * i - 1) as f64;
    }
    if (d / 2) % 2 == 1 {
        -num / den
    } else {
        num / den
    }
}

/// The same multiplier by direct quadrature: average `H_d` over the great
/// subsphere orthogonal to a point `u` with `e·u = s`, divided by `H_d(s)`.
///
/// With `e = s u + √(1-s²) w` the average is over `τ = w·v` with density
/// proportional to `(1-τ²)^{(n-4)/2}`; the substitution `τ = sin θ` makes the
/// integrand smooth and Gauss-Legendre converges fast.
pub fn funk_hecke_quadrature(n: usize, d: usize) -> f64 {
    let s: f64 = 0.3;
    let r = (1.0 - s * s).sqrt();
    let (x, w) = gauss_legendre(64);
    let mut num = 0.0;
    let mut den = 0.0;
    for (xi, wi) in x.iter().zip(&w) {
        let th = xi * PI / 2.0;
        let wt = wi * th.cos().powi(n as i32 - 3);
        num += wt * zonal_profile(n, d, r * th.sin());
        den += wt;
    }
    num / den / zonal_profile(n, d, s)
}

/// Multiplier of the unnormalized zonal transform with kernel `K(cos θ, sin θ)` on `H_d`:
/// `∫ K H_d(cos θ) sin^{n-2}θ dθ / (H_d(1) ∫ sin^{n-2}θ dθ)`.
pub fn zonal_multiplier<K: Fn(f64, f64) -> f64>(n: usize, d: usize, kernel: K) -> f64 {
    let p1 = zonal_profile(n, d, 1.0);
    let num = tanh_sinh(
        |th| kernel(th.cos(), th.sin()) * zonal_profile(n, d, th.cos()) * th.sin().powi(n as i32 - 2),
        0.0,
        PI,
    );
    let den = tanh_sinh(|th| th.sin().powi(n as i32 - 2), 0.0, PI);
    num / (p1 * den)
}

/// Unnormalized sine multiplier: kernel `(1 - t²)^{λ/2}`.
pub fn sine_multiplier(n: usize, d: usize, lambda: f64) -> f64 {
    zonal_multiplier(n, d, |_, s| s.powf(lambda))
}

/// Unnormalized cosine multiplier: kernel `|t|^λ`.
pub fn cosine_multiplier(n: usize, d: usize, lambda: f64) -> f64 {
    zonal_multiplier(n, d, |c, _| c.abs().powf(lambda))
}

/// Eigenvalue of `Δ_{λ,1}` on a degree-`d` harmonic (rank one):
/// `-¼[(λ+2)(n+λ) - d(d+n-2)]`.
pub fn delta_lambda_eigenvalue(n: usize, d: usize, lambda: f64) -> f64 {
    let (nf, df) = (n as f64, d as f64);
    -0.25 * ((lambda + 2.0) * (nf + lambda) - df * (df + nf - 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::{constant, ConstParams, ConstantKind};

    #[test]
    fn monic_harmonics() {
        assert_eq!(gegenbauer_monic(4, 2), vec![1.0, -0.25]);
        assert_eq!(gegenbauer_monic(4, 4), vec![1.0, -0.75, 0.0625]);
    }

    #[test]
    fn funk_hecke_agrees_with_quadrature() {
        for n in 3..9 {
            for d in [0, 2, 4, 6] {
                let a = funk_hecke_closed(n, d);
                let b = funk_hecke_quadrature(n, d);
                assert!((a - b).abs() < 1e-12, "n={n} d={d}: {a} vs {b}");
            }
        }
        assert!((funk_hecke_closed(4, 2) + 1.0 / 3.0).abs() < 1e-15);
        assert!((funk_hecke_closed(4, 4) - 0.2).abs() < 1e-15);
    }

    #[test]
    fn sine_inverse_on_y2() {
        let delta = constant(ConstantKind::DeltaM, &ConstParams { n: 4, m: 1, lambda: -1.0, ..Default::default() })
            .unwrap()
            .finite()
            .unwrap();
        let s = delta * sine_multiplier(4, 2, -1.0);
        assert!((s - 4.0 / 9.0).abs() < 1e-12);
        assert!((delta_lambda_eigenvalue(4, 2, -3.0) - 2.25).abs() < 1e-15);
        assert!((s * 2.25 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn multiplier_of_constant_is_mass() {
        let m = cosine_multiplier(4, 0, 2.0);
        assert!((m - 0.25).abs() < 1e-12);
        let m = sine_multiplier(4, 0, 2.0);
        assert!((m - 0.75).abs() < 1e-12);
    }
}

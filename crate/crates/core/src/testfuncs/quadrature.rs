//! One-dimensional quadrature used by the spherical oracles.

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton iteration on `P_n`).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * p - pm1) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Tanh-sinh quadrature of `f` over `(a, b)`; tolerates integrable endpoint singularities.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let half = 0.5 * (b - a);
    let h = 1.0 / 64.0;
    let kmax = (6.0 / h) as i64;
    let pi2 = std::f64::consts::FRAC_PI_2;
    let mut sum = 0.0;
    for k in -kmax..=kmax {
        let t = k as f64 * h;
        let u = pi2 * t.sinh();
        let cu = u.cosh();
        let w = pi2 * t.cosh() / (cu * cu);
        // distance to the nearer endpoint, computed without cancellation
        let d = 1.0 / (u.abs().exp() * cu);
        if d * half == 0.0 {
            continue;
        }
        let x = if u >= 0.0 { b - half * d } else { a + half * d };
        if x <= a || x >= b {
            continue;
        }
        sum += w * f(x);
    }
    sum * h * half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(8);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_handles_singular_ends() {
        let s = tanh_sinh(|x| x.ln(), 0.0, 1.0);
        assert!((s + 1.0).abs() < 1e-12);
        let s = tanh_sinh(|x| x.powf(-0.5), 0.0, 1.0);
        assert!((s - 2.0).abs() < 1e-12);
    }
}

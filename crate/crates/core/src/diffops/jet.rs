//! Truncated multivariate Taylor polynomials ("jets").
//!
//! A jet over `N` variables of degree `D` stores the coefficients `c_α` of
//! `Σ_{|α| ≤ D} c_α δ^α`. Arithmetic is exact up to round-off for all
//! derivatives of order `≤ D`, and `∂^α F = α! c_α`.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::linalg::{Mat, Matrix, Scalar};

/// Monomial layout and multiplication table shared by all jets of one shape.
#[derive(Debug)]
pub struct JetSpace {
    nvars: usize,
    degree: usize,
    exps: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    /// `(i, j, k)` with `exps[i] + exps[j] = exps[k]`.
    mult: Vec<(u32, u32, u32)>,
}

fn monomials(nvars: usize, degree: usize) -> Vec<Vec<u8>> {
    // graded order: all of degree 0, then degree 1, ...
    let mut out = Vec::new();
    for d in 0..=degree {
        let mut cur = vec![0u8; nvars];
        fill(&mut out, &mut cur, 0, d);
    }
    out
}

fn fill(out: &mut Vec<Vec<u8>>, cur: &mut Vec<u8>, pos: usize, left: usize) {
    if pos + 1 == cur.len() || cur.is_empty() {
        if let Some(last) = cur.last_mut() {
            *last = left as u8;
        }
        out.push(cur.clone());
        return;
    }
    for e in (0..=left).rev() {
        cur[pos] = e as u8;
        fill(out, cur, pos + 1, left - e);
    }
    cur[pos] = 0;
}

impl JetSpace {
    fn build(nvars: usize, degree: usize) -> Self {
        let exps = monomials(nvars, degree);
        let index: HashMap<Vec<u8>, usize> = exps.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect();
        let deg: Vec<usize> = exps.iter().map(|e| e.iter().map(|&x| x as usize).sum()).collect();
        let mut mult = Vec::new();
        let mut sum = vec![0u8; nvars];
        for i in 0..exps.len() {
            for j in 0..exps.len() {
                if deg[i] + deg[j] > degree {
                    continue;
                }
                for v in 0..nvars {
                    sum[v] = exps[i][v] + exps[j][v];
                }
                mult.push((i as u32, j as u32, index[&sum] as u32));
            }
        }
        Self { nvars, degree, exps, index, mult }
    }

    /// The shared space for `(nvars, degree)`; built once per process.
    pub fn get(nvars: usize, degree: usize) -> &'static JetSpace {
        static REGISTRY: OnceLock<Mutex<HashMap<(usize, usize), &'static JetSpace>>> = OnceLock::new();
        let reg = REGISTRY.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = reg.lock().unwrap_or_else(|e| e.into_inner());
        map.entry((nvars, degree)).or_insert_with(|| Box::leak(Box::new(JetSpace::build(nvars, degree))))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.index.get(exps).copied()
    }

    pub fn exponents(&self, i: usize) -> &[u8] {
        &self.exps[i]
    }
}

/// `α! = Π α_i!`.
pub fn multi_factorial(exps: &[u8]) -> f64 {
    exps.iter().map(|&e| (1..=e as u32).map(f64::from).product::<f64>()).product()
}

/// A truncated Taylor polynomial.
#[derive(Clone)]
pub struct Jet {
    space: &'static JetSpace,
    c: Vec<f64>,
}

impl std::fmt::Debug for Jet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Jet(N={}, D={}, {:?})", self.space.nvars, self.space.degree, &self.c[..self.c.len().min(8)])
    }
}

impl Jet {
    pub fn constant(space: &'static JetSpace, v: f64) -> Self {
        let mut c = vec![0.0; space.len()];
        c[0] = v;
        Self { space, c }
    }

    /// The coordinate function `x_var` expanded at `value`.
    pub fn variable(space: &'static JetSpace, var: usize, value: f64) -> Self {
        let mut j = Self::constant(space, value);
        if space.degree >= 1 {
            let mut e = vec![0u8; space.nvars];
            e[var] = 1;
            j.c[space.index[&e]] = 1.0;
        }
        j
    }

    pub fn space(&self) -> &'static JetSpace {
        self.space
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    /// `∂^α` at the expansion point; zero beyond the truncation degree.
    pub fn derivative(&self, exps: &[u8]) -> f64 {
        match self.space.index_of(exps) {
            Some(i) => multi_factorial(exps) * self.c[i],
            None => 0.0,
        }
    }

    fn zip(&self, o: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert!(std::ptr::eq(self.space, o.space), "jets from different spaces");
        Self { space: self.space, c: self.c.iter().zip(&o.c).map(|(a, b)| f(*a, *b)).collect() }
    }
}

impl Scalar for Jet {
    fn value(&self) -> f64 {
        self.c[0]
    }

    fn constant_like(&self, c: f64) -> Self {
        Jet::constant(self.space, c)
    }

    fn plus(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a + b)
    }

    fn minus(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a - b)
    }

    fn times(&self, o: &Self) -> Self {
        let mut c = vec![0.0; self.c.len()];
        for &(i, j, k) in &self.space.mult {
            c[k as usize] += self.c[i as usize] * o.c[j as usize];
        }
        Self { space: self.space, c }
    }

    fn scale(&self, s: f64) -> Self {
        Self { space: self.space, c: self.c.iter().map(|a| a * s).collect() }
    }

    fn offset(&self, s: f64) -> Self {
        let mut j = self.clone();
        j.c[0] += s;
        j
    }

    /// `(a₀ + δ)^p = Σ_k binom(p,k) a₀^{p-k} δ^k`.
    fn powf(&self, p: f64) -> Self {
        let a0 = self.c[0];
        let mut derivs = Vec::with_capacity(self.space.degree + 1);
        let mut fall = 1.0;
        for k in 0..=self.space.degree {
            derivs.push(fall * a0.powf(p - k as f64));
            fall *= p - k as f64;
        }
        self.compose(&derivs)
    }

    /// Taylor series of `g` at `a₀` in `δ = self - a₀`, Horner form.
    fn compose(&self, derivs: &[f64]) -> Self {
        let d = self.space.degree.min(derivs.len().saturating_sub(1));
        let mut delta = self.clone();
        delta.c[0] = 0.0;
        let mut coef = Vec::with_capacity(d + 1);
        let mut fact = 1.0;
        for (k, g) in derivs.iter().take(d + 1).enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            coef.push(g / fact);
        }
        let mut r = Jet::constant(self.space, coef[d]);
        for k in (0..d).rev() {
            r = r.times(&delta);
            r.c[0] += coef[k];
        }
        r
    }
}

/// Lift `x` to jets: entry `(i, a)` becomes variable `i·cols + a`.
pub fn lift_variables(x: &Matrix, degree: usize) -> Mat<Jet> {
    let (n, m) = x.shape();
    let space = JetSpace::get(n * m, degree);
    Mat::from_fn(n, m, |i, a| Jet::variable(space, i * m + a, *x.get(i, a)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_sizes() {
        assert_eq!(JetSpace::get(4, 2).len(), 15);
        assert_eq!(JetSpace::get(12, 4).len(), 1820);
        assert_eq!(JetSpace::get(3, 0).len(), 1);
        assert!(std::ptr::eq(JetSpace::get(4, 2), JetSpace::get(4, 2)));
    }

    #[test]
    fn univariate_derivatives() {
        let s = JetSpace::get(1, 5);
        let x = Jet::variable(s, 0, 0.7);
        let y = x.powf(2.5);
        let mut fall = 1.0;
        for k in 0..=5u8 {
            let expect = fall * 0.7f64.powf(2.5 - k as f64);
            assert!((y.derivative(&[k]) - expect).abs() < 1e-12 * expect.abs().max(1.0), "k={k}");
            fall *= 2.5 - k as f64;
        }
        let r = x.recip().times(&x);
        assert!((r.value() - 1.0).abs() < 1e-15);
        assert!(r.coefficients()[1..].iter().all(|c| c.abs() < 1e-13));
    }

    #[test]
    fn mixed_partials() {
        // f = x² y³ + x y at (1.5, -0.5)
        let s = JetSpace::get(2, 4);
        let x = Jet::variable(s, 0, 1.5);
        let y = Jet::variable(s, 1, -0.5);
        let f = x.times(&x).times(&y.times(&y).times(&y)).plus(&x.times(&y));
        assert!((f.derivative(&[1, 1]) - (6.0 * 1.5 * 0.25 + 1.0)).abs() < 1e-13);
        assert!((f.derivative(&[2, 2]) - 12.0 * -0.5).abs() < 1e-13);
        assert!((f.derivative(&[1, 3]) - 12.0 * 1.5).abs() < 1e-13);
        assert_eq!(f.derivative(&[3, 2]), 0.0);
    }
}

//! Monte Carlo averaging with a reduction order that does not depend on threads.
//!
//! Samples are cut into fixed chunks of [`CHUNK`] indices. Each chunk keeps a
//! Welford accumulator; chunk results are collected in index order and merged
//! by a fixed pairwise tree. The partition into rayon tasks therefore cannot
//! change a single bit of the output.

use rayon::prelude::*;

use crate::error::{Error, Result};

pub const CHUNK: usize = 1024;

/// Running count, mean and centered second moment.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    pub m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(a: &Moments, b: &Moments) -> Moments {
        if a.n == 0 {
            return *b;
        }
        if b.n == 0 {
            return *a;
        }
        let n = a.n + b.n;
        let d = b.mean - a.mean;
        let mean = a.mean + d * (b.n as f64 / n as f64);
        let m2 = a.m2 + b.m2 + d * d * (a.n as f64 * b.n as f64 / n as f64);
        Moments { n, mean, m2 }
    }

    /// Unbiased sample variance (0 for fewer than two samples).
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n as f64 - 1.0)).max(0.0)
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            (self.variance() / self.n as f64).sqrt()
        }
    }
}

fn tree_merge(mut v: Vec<Vec<Moments>>, dim: usize) -> Vec<Moments> {
    if v.is_empty() {
        return vec![Moments::default(); dim];
    }
    while v.len() > 1 {
        let mut next = Vec::with_capacity(v.len().div_ceil(2));
        let mut it = v.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a.iter().zip(&b).map(|(x, y)| Moments::merge(x, y)).collect()),
                None => next.push(a),
            }
        }
        v = next;
    }
    v.pop().unwrap()
}

/// Per-component moments of a vector-valued sample function over indices `0..n`.
///
/// Errors from `f` abort the estimate; the error of the lowest failing chunk wins.
pub fn try_estimate_vec<F>(n: usize, dim: usize, f: F) -> Result<Vec<Moments>>
where
    F: Fn(usize, &mut [f64]) -> Result<()> + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Result<Vec<Moments>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![Moments::default(); dim];
            let mut buf = vec![0.0; dim];
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                f(i, &mut buf)?;
                for (a, &x) in acc.iter_mut().zip(&buf) {
                    if !x.is_finite() {
                        return Err(Error::NumericalBreakdown);
                    }
                    a.push(x);
                }
            }
            Ok(acc)
        })
        .collect();
    let parts: Result<Vec<_>> = parts.into_iter().collect();
    Ok(tree_merge(parts?, dim))
}

/// Moments of a scalar sample function over indices `0..n`.
pub fn try_estimate<F>(n: usize, f: F) -> Result<Moments>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    let v = try_estimate_vec(n, 1, |i, out| {
        out[0] = f(i)?;
        Ok(())
    })?;
    Ok(v[0])
}

pub fn estimate<F>(n: usize, f: F) -> Moments
where
    F: Fn(usize) -> f64 + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    let parts: Vec<Vec<Moments>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = Moments::default();
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                acc.push(f(i));
            }
            vec![acc]
        })
        .collect();
    tree_merge(parts, 1)[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_two_pass() {
        let xs: Vec<f64> = (0..5000).map(|i| ((i * 7919) % 1000) as f64 / 37.0).collect();
        let m = estimate(xs.len(), |i| xs[i]);
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() as f64 - 1.0);
        assert!((m.mean - mean).abs() < 1e-12);
        assert!((m.variance() - var).abs() < 1e-9);
    }

    #[test]
    fn thread_count_does_not_change_bits() {
        let f = |i: usize| ((i as f64) * 0.37).sin() * 1e3 + (i as f64).sqrt();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| estimate(50_000, f));
        let b = four.install(|| estimate(50_000, f));
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.m2.to_bits(), b.m2.to_bits());
    }

    #[test]
    fn errors_propagate() {
        let r = try_estimate(3000, |i| if i == 2500 { Err(Error::NumericalBreakdown) } else { Ok(1.0) });
        assert_eq!(r, Err(Error::NumericalBreakdown));
    }

    #[test]
    fn empty_is_zero() {
        let m = estimate(0, |_| 1.0);
        assert_eq!(m.n, 0);
        assert_eq!(m.stderr(), 0.0);
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(48))]

        #[test]
        fn stderr_is_sample_sd_over_root_n(xs in proptest::collection::vec(-1e3f64..1e3, 2..3000)) {
            let m = estimate(xs.len(), |i| xs[i]);
            let k = xs.len() as f64;
            let mean = xs.iter().sum::<f64>() / k;
            let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt();
            proptest::prop_assert!((m.stderr() - sd / k.sqrt()).abs() <= 1e-9 * (1.0 + sd));
            proptest::prop_assert!(m.stderr() >= 0.0);
        }
    }
}

//! Central finite-difference stencils for mixed partials, with Richardson extrapolation.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Second-order central stencil for `d^p/dt^p`, as `(offset, weight)` in units of `h`.
fn stencil_1d(p: u8) -> &'static [(i32, f64)] {
    match p {
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        5 => &[(-3, -0.5), (-2, 2.0), (-1, -2.5), (1, 2.5), (2, -2.0), (3, 0.5)],
        6 => &[(-3, 1.0), (-2, -6.0), (-1, 15.0), (0, -20.0), (1, 15.0), (2, -6.0), (3, 1.0)],
        _ => &[(0, 1.0)],
    }
}

/// Richardson weights for steps `h, h/2, …` when the error is a series in `h²`.
pub fn richardson_weights(levels: usize) -> Vec<f64> {
    let t: Vec<f64> = (0..levels).map(|l| 0.25f64.powi(l as i32)).collect();
    (0..levels)
        .map(|l| (0..levels).filter(|&j| j != l).map(|j| -t[j] / (t[l] - t[j])).product())
        .collect()
}

/// A merged stencil: integer offsets over all coordinates on the finest grid.
#[derive(Debug, Clone)]
pub struct Stencil {
    /// Finest step, `h / 2^{levels-1}`.
    pub step: f64,
    /// Sparse offsets `(variable, multiple of step)` with their weights.
    pub points: Vec<(Vec<(usize, i32)>, f64)>,
}

pub fn check_step(h: f64, levels: usize) -> Result<()> {
    if !(h > 0.0 && h <= 0.1) {
        return Err(Error::InvalidParams(format!("finite-difference step must lie in (0, 0.1], got {h}")));
    }
    if !(1..=4).contains(&levels) {
        return Err(Error::InvalidParams(format!("Richardson levels must be 1..=4, got {levels}")));
    }
    Ok(())
}

/// Stencil for `Σ coeff ∂^α` over `nvars` coordinates.
pub fn build_stencil(symbol: &[(Vec<u8>, f64)], nvars: usize, h: f64, levels: usize) -> Result<Stencil> {
    check_step(h, levels)?;
    if symbol.iter().any(|(e, _)| e.len() != nvars || e.iter().any(|&p| p > 6)) {
        return Err(Error::InvalidParams("stencils cover partial orders up to 6 per coordinate".into()));
    }
    let rich = richardson_weights(levels);
    let mut acc: BTreeMap<Vec<(usize, i32)>, f64> = BTreeMap::new();
    for (l, c) in rich.iter().enumerate() {
        let hl = h / 2f64.powi(l as i32);
        let mult = 1i32 << (levels - 1 - l);
        for (exps, coeff) in symbol {
            let order: i32 = exps.iter().map(|&p| p as i32).sum();
            let mut pts: Vec<(Vec<(usize, i32)>, f64)> = vec![(vec![], coeff * c / hl.powi(order))];
            for (v, &p) in exps.iter().enumerate().filter(|(_, &p)| p > 0) {
                let mut next = Vec::with_capacity(pts.len() * 7);
                for (off, w) in &pts {
                    for &(o, sw) in stencil_1d(p) {
                        let mut o2 = off.clone();
                        if o != 0 {
                            o2.push((v, o * mult));
                        }
                        next.push((o2, w * sw));
                    }
                }
                pts = next;
            }
            for (off, w) in pts {
                *acc.entry(off).or_insert(0.0) += w;
            }
        }
    }
    let points = acc.into_iter().filter(|(_, w)| *w != 0.0).collect();
    Ok(Stencil { step: h / 2f64.powi(levels as i32 - 1), points })
}

#[cfg(test)]
mod tests {
    use super::*;

    proptest::proptest! {
        #[test]
        fn step_gate(h in -0.5f64..0.5, levels in 0usize..6) {
            let ok = h > 0.0 && h <= 0.1 && (1..=4).contains(&levels);
            proptest::prop_assert_eq!(check_step(h, levels).is_ok(), ok);
        }
    }

    #[test]
    fn richardson_two_levels() {
        let w = richardson_weights(2);
        assert!((w[0] + 1.0 / 3.0).abs() < 1e-15 && (w[1] - 4.0 / 3.0).abs() < 1e-15);
        for l in 1..=4 {
            assert!((richardson_weights(l).iter().sum::<f64>() - 1.0).abs() < 1e-13);
        }
    }

    fn apply(s: &Stencil, f: impl Fn(&[f64]) -> f64, x: &[f64]) -> f64 {
        s.points
            .iter()
            .map(|(off, w)| {
                let mut y = x.to_vec();
                for &(v, o) in off {
                    y[v] += o as f64 * s.step;
                }
                w * f(&y)
            })
            .sum()
    }

    #[test]
    fn one_dimensional_orders() {
        for p in 1..=6u8 {
            for levels in [1, 2] {
                let s = build_stencil(&[(vec![p], 1.0)], 1, 0.05, levels).unwrap();
                let got = apply(&s, |y| y[0].exp(), &[0.3]);
                let tol = if levels == 1 { 2e-2 } else { 1e-4 };
                assert!((got - 0.3f64.exp()).abs() < tol * 0.3f64.exp(), "p={p} L={levels}: {got}");
            }
        }
    }

    #[test]
    fn mixed_partial() {
        // ∂x∂y² of sin(x) e^{2y}
        let s = build_stencil(&[(vec![1, 2], 1.0)], 2, 0.02, 2).unwrap();
        let got = apply(&s, |y| y[0].sin() * (2.0 * y[1]).exp(), &[0.4, 0.1]);
        let exact = 0.4f64.cos() * 4.0 * 0.2f64.exp();
        assert!((got - exact).abs() < 1e-6, "{got} vs {exact}");
    }

    #[test]
    fn step_is_validated() {
        assert!(build_stencil(&[(vec![2], 1.0)], 1, 0.2, 1).is_err());
        assert!(build_stencil(&[(vec![2], 1.0)], 1, 0.0, 1).is_err());
        assert!(build_stencil(&[(vec![2], 1.0)], 1, 0.01, 0).is_err());
    }
}

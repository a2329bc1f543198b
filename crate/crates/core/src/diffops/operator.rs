//! The Cayley-Laplace operator `Δ = det(∂'∂)` and its powers.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{det, Matrix};

/// Largest supported `m·ℓ` (operator order `2mℓ ≤ 6`).
pub const MAX_M_ELL: usize = 3;

/// One signed product `Π L_{ab}` with `L_{ab} = Σ_i ∂_{ia} ∂_{ib}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiffTerm {
    pub coeff: i64,
    /// Column pairs `(a, b)` with `a ≤ b`, sorted; a multiset because the factors commute.
    pub factors: Vec<(usize, usize)>,
}

/// `Δ^ℓ` on `n×m` matrices, expanded by Leibniz into products of the `L_{ab}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffOperator {
    pub m: usize,
    pub ell: usize,
    pub terms: Vec<DiffTerm>,
    /// Number of permutation products before merging, `(m!)^ℓ`.
    pub raw_terms: usize,
}

fn permutations(m: usize) -> Vec<(Vec<usize>, i64)> {
    if m == 0 {
        return vec![(vec![], 1)];
    }
    let mut out = Vec::new();
    for (p, s) in permutations(m - 1) {
        // insert m-1 at every position; each shift past an element flips the sign
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, m - 1);
            let sign = if (p.len() - pos) % 2 == 0 { s } else { -s };
            out.push((q, sign));
        }
    }
    out
}

/// Expand `det(∂'∂)^ℓ`.
pub fn cayley_laplace_expand(m: usize, ell: usize) -> Result<DiffOperator> {
    if m == 0 || ell == 0 {
        return Err(Error::InvalidParams("m and ℓ must be positive".into()));
    }
    if m * ell > MAX_M_ELL {
        return Err(Error::TooLarge(2 * m * ell));
    }
    let perms = permutations(m);
    let mut acc: BTreeMap<Vec<(usize, usize)>, i64> = BTreeMap::new();
    acc.insert(vec![], 1);
    for _ in 0..ell {
        let mut next = BTreeMap::new();
        for (f, c) in &acc {
            for (p, s) in &perms {
                let mut g = f.clone();
                g.extend((0..m).map(|a| (a.min(p[a]), a.max(p[a]))));
                g.sort_unstable();
                *next.entry(g).or_insert(0) += c * s;
            }
        }
        acc = next;
    }
    let terms = acc.into_iter().filter(|(_, c)| *c != 0).map(|(factors, coeff)| DiffTerm { coeff, factors }).collect();
    let fact: usize = (1..=m).product();
    Ok(DiffOperator { m, ell, terms, raw_terms: fact.pow(ell as u32) })
}

impl DiffOperator {
    pub fn order(&self) -> usize {
        2 * self.m * self.ell
    }

    /// The operator as `Σ coeff ∂^α` over the `n·m` coordinates, variable `i·m + a`.
    pub fn symbol(&self, n: usize) -> Vec<(Vec<u8>, f64)> {
        let nv = n * self.m;
        let mut acc: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
        for t in &self.terms {
            let r = t.factors.len();
            let mut rows = vec![0usize; r];
            loop {
                let mut e = vec![0u8; nv];
                for (q, &(a, b)) in t.factors.iter().enumerate() {
                    e[rows[q] * self.m + a] += 1;
                    e[rows[q] * self.m + b] += 1;
                }
                *acc.entry(e).or_insert(0.0) += t.coeff as f64;
                // next row assignment
                let mut q = 0;
                while q < r {
                    rows[q] += 1;
                    if rows[q] < n {
                        break;
                    }
                    rows[q] = 0;
                    q += 1;
                }
                if q == r {
                    break;
                }
            }
        }
        acc.into_iter().filter(|(_, c)| *c != 0.0).collect()
    }

    /// `P(y) = Σ coeff y^α`; equals `|y|_m^{2ℓ}`.
    pub fn eval_symbol(&self, y: &Matrix) -> f64 {
        let (n, m) = y.shape();
        assert_eq!(m, self.m);
        self.symbol(n)
            .iter()
            .map(|(e, c)| c * e.iter().enumerate().map(|(v, &p)| y.get(v / m, v % m).powi(p as i32)).product::<f64>())
            .sum()
    }
}

/// `|y|_m^2 = det(y'y)`, for comparison with the symbol.
pub fn gram_det(y: &Matrix) -> f64 {
    det(&y.t_matmul(y))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{gaussian_matrix, Stream};

    #[test]
    fn small_expansions() {
        let d = cayley_laplace_expand(1, 1).unwrap();
        assert_eq!(d.terms, vec![DiffTerm { coeff: 1, factors: vec![(0, 0)] }]);
        let d = cayley_laplace_expand(2, 1).unwrap();
        assert_eq!(d.terms.len(), 2);
        assert_eq!(d.raw_terms, 2);
        assert!(d.terms.contains(&DiffTerm { coeff: 1, factors: vec![(0, 0), (1, 1)] }));
        assert!(d.terms.contains(&DiffTerm { coeff: -1, factors: vec![(0, 1), (0, 1)] }));
        assert_eq!(cayley_laplace_expand(3, 1).unwrap().raw_terms, 6);
        assert_eq!(cayley_laplace_expand(1, 3).unwrap().order(), 6);
        assert!(matches!(cayley_laplace_expand(2, 2), Err(Error::TooLarge(8))));
    }

    #[test]
    fn laplacian_power_for_rank_one() {
        let d = cayley_laplace_expand(1, 2).unwrap();
        let s = d.symbol(3);
        // (Σ ∂_i²)² = Σ ∂_i⁴ + 2 Σ_{i<j} ∂_i²∂_j²
        assert_eq!(s.len(), 6);
        assert!(s.iter().any(|(e, c)| e == &vec![4, 0, 0] && *c == 1.0));
        assert!(s.iter().any(|(e, c)| e == &vec![2, 2, 0] && *c == 2.0));
    }

    #[test]
    fn symbol_is_gram_determinant_power() {
        for (n, m, ell) in [(4, 1, 1), (4, 1, 3), (4, 2, 1), (5, 3, 1), (3, 1, 2)] {
            let d = cayley_laplace_expand(m, ell).unwrap();
            for s in 0..5 {
                let y = gaussian_matrix(n, m, Stream::new(s, 3));
                let p = d.eval_symbol(&y);
                let e = gram_det(&y).powi(ell as i32);
                assert!((p - e).abs() < 1e-10 * e.abs().max(1.0), "{n} {m} {ell}: {p} vs {e}");
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn term_structure(m in 1usize..=3, ell in 1usize..=3) {
            proptest::prop_assume!(m * ell <= MAX_M_ELL);
            let d = cayley_laplace_expand(m, ell).unwrap();
            let fact: usize = (1..=m).product();
            proptest::prop_assert_eq!(d.raw_terms, fact.pow(ell as u32));
            proptest::prop_assert_eq!(d.order(), 2 * m * ell);
            proptest::prop_assert!(d.terms.iter().all(|t| t.factors.len() == m * ell));
            if m == 1 {
                proptest::prop_assert_eq!(d.terms.clone(), vec![DiffTerm { coeff: 1, factors: vec![(0, 0); ell] }]);
            }
        }
    }
}

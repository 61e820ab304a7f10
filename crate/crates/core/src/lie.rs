//! Bounded Lie-algebra closure of derivations.
//!
//! A finite-dimensional closure is evidence about the group generated by the
//! exponentials, not a statement about it.

use std::fmt;

use rayon::prelude::*;

use crate::derivation::Derivation;
use crate::error::{check_arity, Result};
use crate::linalg::{Echelon, SparseVec};
use crate::poly::Monomial;

type Key = (usize, Monomial);

fn coefficients(d: &Derivation) -> SparseVec<Key> {
    d.terms()
        .map(|(i, m, c)| ((i, m.clone()), c.clone()))
        .collect()
}

/// A linearly independent family of derivations together with the echelon
/// form of its coefficient vectors.
#[derive(Clone, Debug)]
pub struct DerivationSpan {
    n: usize,
    basis: Vec<Derivation>,
    max_deg_seen: u32,
    echelon: Echelon<Key>,
}

impl DerivationSpan {
    pub fn new(n: usize) -> Self {
        DerivationSpan {
            n,
            basis: Vec::new(),
            max_deg_seen: 0,
            echelon: Echelon::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[Derivation] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn max_deg_seen(&self) -> u32 {
        self.max_deg_seen
    }

    pub fn contains(&self, d: &Derivation) -> Result<bool> {
        check_arity(self.n, d.n())?;
        Ok(self.echelon.contains(&coefficients(d)))
    }

    /// Adjoins `d` when it is independent of the current basis.
    pub fn adjoin(&mut self, d: Derivation) -> Result<bool> {
        check_arity(self.n, d.n())?;
        self.max_deg_seen = self.max_deg_seen.max(d.degree());
        if !self.echelon.insert(coefficients(&d)) {
            return Ok(false);
        }
        self.basis.push(d);
        Ok(true)
    }

    /// Whether every bracket of two basis elements lies in the span.
    pub fn is_bracket_closed(&self) -> Result<bool> {
        for j in 0..self.basis.len() {
            for i in 0..j {
                if !self.contains(&self.basis[i].bracket(&self.basis[j])?)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Basis of the linear span, keeping the first independent generators in
/// input order.
pub fn span_reduce(n: usize, gens: &[Derivation]) -> Result<DerivationSpan> {
    let mut span = DerivationSpan::new(n);
    for d in gens {
        span.adjoin(d.clone())?;
    }
    Ok(span)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClosureBounds {
    pub max_dim: usize,
    pub max_deg: u32,
}

impl Default for ClosureBounds {
    fn default() -> Self {
        ClosureBounds {
            max_dim: 64,
            max_deg: 32,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Exceeded {
    Dimension { limit: usize },
    Degree { limit: u32, found: u32 },
}

impl fmt::Display for Exceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exceeded::Dimension { limit } => write!(f, "dimension exceeded max_dim={limit}"),
            Exceeded::Degree { limit, found } => {
                write!(f, "bracket of degree {found} exceeded max_deg={limit}")
            }
        }
    }
}

#[derive(Clone, Debug)]
pub enum Closure {
    FiniteDim(DerivationSpan),
    Exceeded(Exceeded),
}

pub fn lie_closure(p: &Derivation, q: &Derivation, bounds: ClosureBounds) -> Result<Closure> {
    lie_closure_of(p.n(), &[p.clone(), q.clone()], bounds)
}

/// Saturates the span of `gens` under brackets. Each new basis element is
/// bracketed against all earlier ones (in parallel), and independent results
/// are appended in a fixed order, so the output is deterministic.
pub fn lie_closure_of(n: usize, gens: &[Derivation], bounds: ClosureBounds) -> Result<Closure> {
    let mut span = span_reduce(n, gens)?;
    if let Some(found) = gens
        .iter()
        .map(Derivation::degree)
        .find(|&d| d > bounds.max_deg)
    {
        return Ok(Closure::Exceeded(Exceeded::Degree {
            limit: bounds.max_deg,
            found,
        }));
    }
    let mut j = 0;
    while j < span.dim() {
        if span.dim() > bounds.max_dim {
            return Ok(Closure::Exceeded(Exceeded::Dimension {
                limit: bounds.max_dim,
            }));
        }
        let brackets: Vec<Derivation> = (0..j)
            .into_par_iter()
            .map(|i| span.basis[i].bracket(&span.basis[j]))
            .collect::<Result<_>>()?;
        for b in brackets {
            if b.is_zero() {
                continue;
            }
            if b.degree() > bounds.max_deg {
                return Ok(Closure::Exceeded(Exceeded::Degree {
                    limit: bounds.max_deg,
                    found: b.degree(),
                }));
            }
            span.adjoin(b)?;
        }
        j += 1;
    }
    if span.dim() > bounds.max_dim {
        return Ok(Closure::Exceeded(Exceeded::Dimension {
            limit: bounds.max_dim,
        }));
    }
    Ok(Closure::FiniteDim(span))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str, n: usize) -> Derivation {
        Derivation::parse(s, n).unwrap()
    }

    fn closed(p: &str, q: &str) -> DerivationSpan {
        match lie_closure(&d(p, 2), &d(q, 2), ClosureBounds::default()).unwrap() {
            Closure::FiniteDim(s) => s,
            Closure::Exceeded(e) => panic!("{e}"),
        }
    }

    #[test]
    fn span_examples() {
        let d1 = Derivation::partial(2, 0);
        let d2 = Derivation::partial(2, 1);
        assert_eq!(
            span_reduce(2, &[d1.clone(), d1.scale(&crate::poly::scalar(2))])
                .unwrap()
                .dim(),
            1
        );
        let sum = d1.try_add(&d2).unwrap();
        assert_eq!(span_reduce(2, &[d1, d2, sum]).unwrap().dim(), 2);
        let gens = [
            d("D x1 = x2", 2),
            d("D x2 = x1", 2),
            d("D x1 = -x1; D x2 = x2", 2),
        ];
        assert_eq!(span_reduce(2, &gens).unwrap().dim(), 3);
    }

    #[test]
    fn closure_examples() {
        for (p, q, dim) in [
            ("D x1 = 1", "D x2 = x1", 3),
            ("D x1 = x2", "D x2 = x1", 3),
            ("D x1 = 1", "D x2 = x1^2", 4),
        ] {
            let s = closed(p, q);
            assert_eq!(s.dim(), dim, "{p} / {q}");
            assert!(s.is_bracket_closed().unwrap());
            let swapped = closed(q, p);
            assert_eq!(swapped.dim(), dim);
            for b in s.basis() {
                assert!(swapped.contains(b).unwrap());
            }
        }
        let sl2 = closed("D x1 = x2", "D x2 = x1");
        assert!(sl2.contains(&d("D x1 = -x1; D x2 = x2", 2)).unwrap());
    }

    #[test]
    fn closure_bounds() {
        // x2^2 D1 and x1^2 D2 generate an infinite-dimensional algebra
        let (p, q) = (d("D x1 = x2^2", 2), d("D x2 = x1^2", 2));
        let r = lie_closure(
            &p,
            &q,
            ClosureBounds {
                max_dim: 64,
                max_deg: 6,
            },
        )
        .unwrap();
        assert!(matches!(
            r,
            Closure::Exceeded(Exceeded::Degree { limit: 6, .. })
        ));
        let r = lie_closure(
            &p,
            &q,
            ClosureBounds {
                max_dim: 3,
                max_deg: 32,
            },
        )
        .unwrap();
        assert!(matches!(
            r,
            Closure::Exceeded(Exceeded::Dimension { limit: 3 })
        ));
        let small = ClosureBounds {
            max_dim: 3,
            max_deg: 2,
        };
        let r = lie_closure(&d("D x1 = 1", 2), &d("D x2 = x1", 2), small).unwrap();
        assert!(matches!(r, Closure::FiniteDim(s) if s.dim() == 3));
    }
}

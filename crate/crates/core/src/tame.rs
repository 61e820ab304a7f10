//! Tame generator families, SL_n decomposition into root-subgroup factors,
//! the Nagata automorphism, and the Jung–van der Kulk decomposition of
//! plane automorphisms.
//!
//! Decomposition words are not canonical; compare results through their
//! expansions.

use num_traits::{One, Zero};

use crate::automorphism::{Factor, FactoredAut, PolyMap};
use crate::derivation::{Derivation, Lnd, NilpotencyBounds};
use crate::error::{check_arity, Error, Result};
use crate::matrix::Matrix;
use crate::parse::parse_poly;
use crate::poly::{format_scalar, Monomial, Poly, Scalar};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Family {
    /// `x_i -> x_i + c_i`, as `exp(c_1 D_1) ∘ ... ∘ exp(c_n D_n)`.
    Translation(Vec<Scalar>),
    Linear(Matrix),
    /// `exp(f D_{index+1})` with `f` free of `x_{index+1}`.
    Elementary {
        index: usize,
        f: Poly,
    },
    /// de Jonquières map `x_i -> x_i + f_i(x_{i+1}, ..., x_n)`, as
    /// `exp(f_1 D_1) ∘ ... ∘ exp(f_{n-1} D_{n-1})`.
    Triangular(Vec<Poly>),
}

fn partial_lnd(n: usize, i: usize) -> Lnd {
    Lnd::with_orders(Derivation::partial(n, i), {
        let mut o = vec![1; n];
        o[i] = 2;
        o
    })
    .expect("D_i has orders e_i + 1")
}

/// `exp(f D_{i+1})`.
pub fn elementary(n: usize, i: usize, f: Poly) -> Result<Factor> {
    check_arity(n, f.n())?;
    if f.involves(i) {
        return Err(Error::VariableDependenceViolation {
            variable: i + 1,
            what: format!("the coefficient of D{}", i + 1),
        });
    }
    Factor::exp_scaled(Scalar::one(), partial_lnd(n, i), f)
}

/// The root-subgroup element `exp(t x_{i+1} D_{j+1})`, `i != j`: the
/// transvection `x_{j+1} -> x_{j+1} + t x_{i+1}`.
pub fn transvection(n: usize, i: usize, j: usize, t: Scalar) -> Factor {
    assert_ne!(i, j);
    let d = Derivation::monomial(n, Scalar::one(), Monomial::var(n, i), j);
    let mut orders = vec![1; n];
    orders[j] = 2;
    Factor::exp(
        t,
        Lnd::with_orders(d, orders).expect("x_i D_j has orders e_j + 1"),
    )
}

pub fn mk_family(n: usize, kind: &Family) -> Result<FactoredAut> {
    let word = match kind {
        Family::Translation(c) => {
            check_arity(n, c.len())?;
            c.iter()
                .enumerate()
                .map(|(i, ci)| Factor::exp(ci.clone(), partial_lnd(n, i)))
                .collect()
        }
        Family::Linear(m) => {
            check_arity(n, m.n())?;
            vec![Factor::linear(m.clone())?]
        }
        Family::Elementary { index, f } => vec![elementary(n, *index, f.clone())?],
        Family::Triangular(fs) => {
            check_arity(n.saturating_sub(1), fs.len())?;
            let mut word = Vec::with_capacity(fs.len());
            for (i, f) in fs.iter().enumerate() {
                check_arity(n, f.n())?;
                if let Some(v) = (0..=i).find(|&v| f.involves(v)) {
                    return Err(Error::VariableDependenceViolation {
                        variable: v + 1,
                        what: format!("f{}", i + 1),
                    });
                }
                word.push(elementary(n, i, f.clone())?);
            }
            word
        }
    };
    FactoredAut::from_factors(n, word)
}

/// Writes a determinant-one matrix as a word of transvections
/// `exp(t x_i D_j)` by Gauss–Jordan elimination with row additions only.
pub fn sl_decompose(m: &Matrix) -> Result<FactoredAut> {
    let det = m.det();
    if !det.is_one() {
        return Err(Error::DeterminantNotOne {
            det: format_scalar(&det),
        });
    }
    let n = m.n();
    let mut a: Vec<Vec<Scalar>> = m.rows().to_vec();
    // (target row, source row, c) for "row target += c * row source"
    let mut ops: Vec<(usize, usize, Scalar)> = Vec::new();
    let mut add_row = |a: &mut Vec<Vec<Scalar>>, target: usize, source: usize, c: Scalar| {
        if c.is_zero() {
            return;
        }
        let src = a[source].clone();
        for (x, y) in a[target].iter_mut().zip(&src) {
            *x += &c * y;
        }
        ops.push((target, source, c));
    };

    for k in 0..n {
        if !a[k][k].is_one() {
            let below = (k + 1..n).find(|&r| !a[r][k].is_zero());
            let helper = match below {
                Some(r) => r,
                None => {
                    // column below the pivot is clear; the pivot is nonzero,
                    // so copy it one row down to make room for a correction
                    assert!(k + 1 < n, "last pivot of a determinant-one reduction is 1");
                    add_row(&mut a, k + 1, k, Scalar::one());
                    k + 1
                }
            };
            let c = (Scalar::one() - &a[k][k]) / &a[helper][k];
            add_row(&mut a, k, helper, c);
        }
        for r in 0..n {
            if r != k && !a[r][k].is_zero() {
                let c = -a[r][k].clone();
                add_row(&mut a, r, k, c);
            }
        }
    }
    debug_assert!(Matrix::new(a).is_identity());

    // E_m ... E_1 M = I, so M = E_1^-1 ... E_m^-1; a word w_1 ... w_m of
    // linear factors expands to the matrix product w_m ... w_1.
    let word = ops
        .into_iter()
        .rev()
        .map(|(target, source, c)| transvection(n, source, target, -c))
        .collect();
    FactoredAut::from_factors(n, word)
}

pub const NAGATA_KERNEL: &str = "x3*x1 + x2^2";
pub const NAGATA_DERIVATION: &str = "D x1 = -2*x2; D x2 = x3";

/// `exp(f D)` with `D = -2 x2 D1 + x3 D2` and `f = x3 x1 + x2^2 ∈ Ker D`.
pub fn nagata() -> FactoredAut {
    let base = Derivation::parse(NAGATA_DERIVATION, 3).expect("valid derivation text");
    let base = Lnd::certify(base, NilpotencyBounds::default()).expect("D is triangular");
    let f = parse_poly(NAGATA_KERNEL, 3).expect("valid polynomial text");
    let factor = Factor::exp_scaled(Scalar::one(), base, f).expect("f lies in Ker D");
    FactoredAut::from_factors(3, vec![factor]).expect("arity 3")
}

/// Result of [`jung_vdk_decompose`] with the degree history of the working
/// map (sum of component degrees, one entry per reduction step plus the
/// final affine map).
#[derive(Clone, Debug)]
pub struct VdkDecomposition {
    pub word: FactoredAut,
    pub degrees: Vec<u32>,
}

/// Decomposes an automorphism of the plane into affine and elementary
/// factors by repeatedly cancelling leading forms.
pub fn jung_vdk_decompose(sigma: &PolyMap) -> Result<FactoredAut> {
    Ok(jung_vdk_traced(sigma)?.word)
}

pub fn jung_vdk_traced(sigma: &PolyMap) -> Result<VdkDecomposition> {
    check_arity(2, sigma.n())?;
    let det = sigma.jacobian_det();
    if !det.constant_value().is_some_and(|c| !c.is_zero()) {
        return Err(Error::NotAnAutomorphism(format!(
            "Jacobian determinant {det} is not a nonzero constant"
        )));
    }
    let n = 2;
    let mut p = sigma.images()[0].clone();
    let mut q = sigma.images()[1].clone();
    // sigma = phi ∘ inverses[last] ∘ ... ∘ inverses[0]
    let mut inverses: Vec<Factor> = Vec::new();
    let mut degrees = vec![p.degree() + q.degree()];

    while p.degree() > 1 || q.degree() > 1 {
        let (dp, dq) = (p.degree(), q.degree());
        let step = if dp >= dq {
            cancel(&p, &q).map(|r| (0, r)).or_else(|| {
                if dp == dq {
                    cancel(&q, &p).map(|r| (1, r))
                } else {
                    None
                }
            })
        } else {
            cancel(&q, &p).map(|r| (1, r))
        };
        let Some((target, (c, k))) = step else {
            return Err(Error::NotAnAutomorphism(format!(
                "leading forms of degrees {dp} and {dq} admit no cancellation"
            )));
        };
        // x_target -> x_target - c * x_other^k composed on the right
        let other = 1 - target;
        let mut e = vec![0; n];
        e[other] = k;
        let power = Poly::monomial(n, c, Monomial::new(e));
        if target == 0 {
            p = &p - &power.substitute(&[p.clone(), q.clone()])?;
        } else {
            q = &q - &power.substitute(&[p.clone(), q.clone()])?;
        }
        inverses.push(elementary(n, target, power)?);
        degrees.push(p.degree() + q.degree());
    }

    let affine = PolyMap::new(vec![p, q])?;
    let mut matrix = Matrix::zero(n);
    let mut shift = Vec::with_capacity(n);
    for (i, img) in affine.images().iter().enumerate() {
        for j in 0..n {
            matrix.set(i, j, img.coeff(&Monomial::var(n, j)));
        }
        shift.push(img.coeff(&Monomial::one(n)));
    }
    let linear = Factor::linear(matrix.clone())
        .map_err(|_| Error::NotAnAutomorphism("affine residue is singular".to_string()))?;

    let mut word = Vec::new();
    if !matrix.is_identity() {
        word.push(linear);
    }
    if shift.iter().any(|c| !c.is_zero()) {
        word.push(Factor::translation(shift));
    }
    word.extend(inverses.into_iter().rev());
    Ok(VdkDecomposition {
        word: FactoredAut::from_factors(n, word)?,
        degrees,
    })
}

/// Finds `(c, k)` with `LF(high) = c * LF(low)^k`.
fn cancel(high: &Poly, low: &Poly) -> Option<(Scalar, u32)> {
    let (dh, dl) = (high.degree(), low.degree());
    if dl == 0 || dh % dl != 0 {
        return None;
    }
    let k = dh / dl;
    let lead = high.leading_form();
    let candidate = low.leading_form().pow(k).ok()?;
    let c = lead.leading_term()?.1 / candidate.leading_term()?.1;
    (lead == candidate.scale(&c)).then_some((c, k))
}

/// Which of the two ∂-generation notions a word witnesses for a given set
/// of locally nilpotent derivations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenerationKind {
    /// Every factor is `exp(tD)` with `D` in the set.
    DGenerated,
    /// Every factor is `exp(t f D)` with `D` in the set and `f ∈ Ker D`.
    FinitelyDGenerated,
}

/// Classifies a word against a generating set of derivations; `None` when
/// some factor is not an exponential of a listed derivation.
pub fn classify_word(word: &FactoredAut, gens: &[Derivation]) -> Option<GenerationKind> {
    let mut kind = GenerationKind::DGenerated;
    for factor in word.word() {
        let Factor::Exp {
            kernel_factor,
            base,
            ..
        } = factor
        else {
            return None;
        };
        if !gens.contains(base.derivation()) {
            return None;
        }
        if !kernel_factor.is_constant() {
            kind = GenerationKind::FinitelyDGenerated;
        }
    }
    Some(kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::equals;
    use crate::poly::{ratio, scalar};

    fn p(s: &str, n: usize) -> Poly {
        parse_poly(s, n).unwrap()
    }

    fn map(s: &str, n: usize) -> PolyMap {
        PolyMap::parse(s, n).unwrap()
    }

    #[test]
    fn translation_family() {
        let w = mk_family(
            3,
            &Family::Translation(vec![scalar(1), ratio(-1, 2), scalar(4)]),
        )
        .unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(
            w.expand().unwrap(),
            &map("x1 -> x1 + 1; x2 -> x2 - 1/2; x3 -> x3 + 4", 3)
        );
    }

    #[test]
    fn triangular_family() {
        let fs = vec![p("x2^2 - x3", 3), p("7*x3^4", 3)];
        let w = mk_family(3, &Family::Triangular(fs)).unwrap();
        assert_eq!(
            w.expand().unwrap(),
            &map("x1 -> x1 + x2^2 - x3; x2 -> x2 + 7*x3^4; x3 -> x3", 3)
        );
        assert_eq!(
            mk_family(3, &Family::Triangular(vec![p("x3", 3), p("x2", 3)])),
            Err(Error::VariableDependenceViolation {
                variable: 2,
                what: "f2".into()
            })
        );
    }

    #[test]
    fn elementary_family() {
        let w = mk_family(
            2,
            &Family::Elementary {
                index: 1,
                f: p("x1^3", 2),
            },
        )
        .unwrap();
        assert_eq!(w.expand().unwrap(), &map("x2 -> x2 + x1^3", 2));
        assert!(matches!(
            mk_family(
                2,
                &Family::Elementary {
                    index: 0,
                    f: p("x1*x2", 2)
                }
            ),
            Err(Error::VariableDependenceViolation { variable: 1, .. })
        ));
        assert_eq!(
            mk_family(2, &Family::Linear(Matrix::from_i64(&[&[1, 2], &[2, 4]]))),
            Err(Error::SingularMatrix)
        );
    }

    fn linear_map(m: &Matrix) -> FactoredAut {
        FactoredAut::from_factors(m.n(), vec![Factor::linear(m.clone()).unwrap()]).unwrap()
    }

    #[test]
    fn sl_examples() {
        assert!(sl_decompose(&Matrix::identity(3)).unwrap().is_empty());

        let rot = Matrix::from_i64(&[&[0, 1], &[-1, 0]]);
        let w = sl_decompose(&rot).unwrap();
        assert_eq!(w.len(), 3);
        assert_eq!(w.expand().unwrap(), &map("x1 -> x2; x2 -> -x1", 2));
        assert!(equals(&w, &linear_map(&rot)).unwrap());

        let diag = Matrix::diagonal(&[scalar(2), ratio(1, 2)]);
        let w = sl_decompose(&diag).unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(w.expand().unwrap(), &map("x1 -> 2*x1; x2 -> 1/2*x2", 2));

        assert_eq!(
            sl_decompose(&Matrix::diagonal(&[scalar(2), scalar(1)])).unwrap_err(),
            Error::DeterminantNotOne { det: "2".into() }
        );
        // every factor is a root-subgroup element exp(t x_i D_j)
        for f in w.word() {
            let Factor::Exp { base, .. } = f else {
                panic!("not exp")
            };
            assert_eq!(base.derivation().num_terms(), 1);
        }
    }

    #[test]
    fn nagata_expansion() {
        let e = nagata().expand().unwrap().clone();
        assert_eq!(
            e.images()[0],
            p("x1 - 2*x2*(x3*x1 + x2^2) - x3*(x3*x1 + x2^2)^2", 3)
        );
        assert_eq!(e.images()[2], p("x3", 3));
        assert!(e.jacobian_det().is_one());
        assert_eq!(e.apply(&p(NAGATA_KERNEL, 3)).unwrap(), p(NAGATA_KERNEL, 3));
    }

    #[test]
    fn vdk_examples() {
        let s = map("x1 -> x1 + x2^2", 2);
        let w = jung_vdk_decompose(&s).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w.expand().unwrap(), &s);

        let original = FactoredAut::from_factors(
            2,
            vec![
                Factor::linear(Matrix::from_i64(&[&[1, 1], &[0, 1]])).unwrap(),
                elementary(2, 0, p("x2^3", 2)).unwrap(),
                Factor::translation(vec![scalar(1), scalar(2)]),
            ],
        )
        .unwrap();
        let traced = jung_vdk_traced(original.expand().unwrap()).unwrap();
        assert!(equals(&traced.word, &original).unwrap());
        assert!(traced.degrees.windows(2).all(|w| w[1] < w[0]));

        assert!(matches!(
            jung_vdk_decompose(&map("x1 -> x1^2", 2)),
            Err(Error::NotAnAutomorphism(_))
        ));
        assert!(matches!(
            jung_vdk_decompose(&PolyMap::identity(3)),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn vdk_tie_breaks_into_first_component() {
        // both components have degree 2 with proportional leading forms
        let s = map("x1 -> x1 + x2^2; x2 -> x2 + 2*x1 + 2*x2^2", 2);
        assert!(s.jacobian_det().is_constant());
        let w = jung_vdk_decompose(&s).unwrap();
        assert_eq!(w.expand().unwrap(), &s);
        let Factor::Exp { base, .. } = w.word().last().unwrap() else {
            panic!()
        };
        assert_eq!(base.derivation(), &Derivation::partial(2, 0));
    }

    #[test]
    fn generation_kinds() {
        let gens: Vec<Derivation> = (0..3).map(|i| Derivation::partial(3, i)).collect();
        let t = mk_family(
            3,
            &Family::Translation(vec![scalar(1), scalar(2), scalar(3)]),
        )
        .unwrap();
        assert_eq!(classify_word(&t, &gens), Some(GenerationKind::DGenerated));
        let j = mk_family(3, &Family::Triangular(vec![p("x2*x3", 3), p("x3", 3)])).unwrap();
        assert_eq!(
            classify_word(&j, &gens),
            Some(GenerationKind::FinitelyDGenerated)
        );
        assert_eq!(classify_word(&nagata(), &gens), None);
        let lin = mk_family(3, &Family::Linear(Matrix::identity(3))).unwrap();
        assert_eq!(classify_word(&lin, &gens), None);
    }
}

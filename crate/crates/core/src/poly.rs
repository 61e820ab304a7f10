//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! The ground field of every computation in this crate is the rationals.
//! All identities the library checks (Jacobian determinants, exponentials of
//! locally nilpotent derivations, torus conjugation) are polynomial
//! identities with rational coefficients, so working over `Q` is exact and
//! sound for any field of characteristic zero containing it.
//!
//! Variables are addressed zero-based in the API (`0..n`) and one-based in
//! text (`x1..xn`).

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{check_arity, Error, Result};

/// An element of the ground field. Always kept in lowest terms with a
/// positive denominator.
pub type Scalar = BigRational;

pub fn scalar(n: i64) -> Scalar {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Scalar {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

static MAX_TERMS: AtomicUsize = AtomicUsize::new(usize::MAX);

/// Sets the process-wide cap on polynomial size enforced by the
/// growth-prone operations (substitution, powers, exponential series).
pub fn set_max_terms(limit: usize) {
    MAX_TERMS.store(limit.max(1), AtomicOrdering::Relaxed);
}

pub fn max_terms() -> usize {
    MAX_TERMS.load(AtomicOrdering::Relaxed)
}

pub(crate) fn check_size(p: &Poly) -> Result<()> {
    let limit = max_terms();
    if p.num_terms() > limit {
        Err(Error::TermLimit {
            terms: p.num_terms(),
            limit,
        })
    } else {
        Ok(())
    }
}

/// Exponent vector of a monomial.
///
/// Ordered graded-lexicographically with `x1 > x2 > ... > xn`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial { exps }
    }

    pub fn one(n: usize) -> Self {
        Monomial { exps: vec![0; n] }
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut exps = vec![0; n];
        exps[i] = 1;
        Monomial { exps }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn n(&self) -> usize {
        self.exps.len()
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    fn quotient_of(&self, other: &Monomial) -> Monomial {
        Monomial {
            exps: other
                .exps
                .iter()
                .zip(&self.exps)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Index of the only variable when the monomial is a single variable.
    pub fn as_var(&self) -> Option<usize> {
        if self.degree() != 1 {
            return None;
        }
        self.exps.iter().position(|&e| e == 1)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.exps.cmp(&other.exps))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "x{}", i + 1)?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

/// A polynomial in `n` variables over the rationals.
///
/// Canonical by construction: no zero coefficients are stored, so two
/// polynomials are equal exactly when their term maps are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    n: usize,
    terms: BTreeMap<Monomial, Scalar>,
}

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Poly::constant(n, Scalar::one())
    }

    pub fn constant(n: usize, c: Scalar) -> Self {
        Poly::monomial(n, c, Monomial::one(n))
    }

    /// The variable `x_{i+1}`.
    pub fn var(n: usize, i: usize) -> Self {
        assert!(i < n, "variable index {i} out of range for {n} variables");
        Poly::monomial(n, Scalar::one(), Monomial::var(n, i))
    }

    pub fn monomial(n: usize, c: Scalar, m: Monomial) -> Self {
        assert_eq!(m.n(), n, "monomial arity");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { n, terms }
    }

    /// Builds a polynomial from possibly repeated, possibly zero terms.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Monomial, Scalar)>) -> Self {
        let mut acc: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for (m, c) in terms {
            assert_eq!(m.n(), n, "monomial arity");
            add_term(&mut acc, m, c);
        }
        Poly { n, terms: acc }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in descending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Scalar)> + '_ {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Scalar)> {
        self.terms.iter().next_back()
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().next_back().map_or(0, Monomial::degree)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|m| m.exps[i]).max().unwrap_or(0)
    }

    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.exps[i] > 0)
    }

    pub fn constant_value(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        self.constant_value().is_some()
    }

    pub fn is_one(&self) -> bool {
        self.constant_value().is_some_and(|c| c.is_one())
    }

    /// Sum of the terms of total degree `d`.
    pub fn homogeneous_part(&self, d: u32) -> Poly {
        Poly {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Top-degree homogeneous component.
    pub fn leading_form(&self) -> Poly {
        self.homogeneous_part(self.degree())
    }

    pub fn scale(&self, c: &Scalar) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.n);
        }
        Poly {
            n: self.n,
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn try_add(&self, other: &Poly) -> Result<Poly> {
        check_arity(self.n, other.n)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), c.clone());
        }
        Ok(Poly { n: self.n, terms })
    }

    pub fn try_sub(&self, other: &Poly) -> Result<Poly> {
        check_arity(self.n, other.n)?;
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            add_term(&mut terms, m.clone(), -c);
        }
        Ok(Poly { n: self.n, terms })
    }

    /// Naive sparse product: one coefficient multiplication per pair of
    /// terms, accumulated in a hash map.
    pub fn try_mul(&self, other: &Poly) -> Result<Poly> {
        check_arity(self.n, other.n)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Poly::zero(self.n));
        }
        // multiply over the integers after clearing denominators; rational
        // products would pay a gcd per term pair
        let (da, a) = self.integer_terms();
        let (db, b) = other.integer_terms();
        let mut acc: HashMap<Monomial, BigInt> = HashMap::with_capacity(a.len() * b.len());
        for (ma, ca) in &a {
            for (mb, cb) in &b {
                let c = ca * cb;
                match acc.entry(ma.mul(mb)) {
                    std::collections::hash_map::Entry::Occupied(mut e) => *e.get_mut() += c,
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(c);
                    }
                }
            }
        }
        let den = da * db;
        Ok(Poly {
            n: self.n,
            terms: acc
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|(m, c)| (m, Scalar::new(c, den.clone())))
                .collect(),
        })
    }

    /// Common denominator and the integer numerators over it.
    fn integer_terms(&self) -> (BigInt, Vec<(&Monomial, BigInt)>) {
        let den = self
            .terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (m, c.numer() * (&den / c.denom())))
            .collect();
        (den, terms)
    }

    pub fn mul_monomial(&self, c: &Scalar, m: &Monomial) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.n);
        }
        Poly {
            n: self.n,
            terms: self.terms.iter().map(|(a, x)| (a.mul(m), x * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Result<Poly> {
        let mut base = self.clone();
        let mut acc = Poly::one(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
                check_size(&acc)?;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
                check_size(&base)?;
            }
        }
        Ok(acc)
    }

    /// Formal partial derivative with respect to the zero-based variable `i`.
    pub fn partial(&self, i: usize) -> Result<Poly> {
        if i >= self.n {
            return Err(Error::VariableOutOfRange {
                index: i + 1,
                n: self.n,
            });
        }
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.exps[i];
            (e > 0).then(|| {
                let mut exps = m.exps.clone();
                exps[i] -= 1;
                (Monomial { exps }, c * scalar(e as i64))
            })
        });
        Ok(Poly {
            n: self.n,
            terms: terms.collect(),
        })
    }

    /// Evaluates `self` at `images`: every `x_i` is replaced by `images[i]`.
    /// The result lives in the common variable count of the images.
    pub fn substitute(&self, images: &[Poly]) -> Result<Poly> {
        check_arity(self.n, images.len())?;
        let m = match images.first() {
            Some(p) => p.n,
            None => return Ok(self.clone()),
        };
        for p in images {
            check_arity(m, p.n)?;
        }
        // powers[i][k] = images[i]^k, filled lazily up to the needed degree
        let mut powers: Vec<Vec<Poly>> = images.iter().map(|_| vec![Poly::one(m)]).collect();
        for i in 0..self.n {
            let top = self.degree_in(i) as usize;
            while powers[i].len() <= top {
                let next = powers[i].last().unwrap() * &images[i];
                check_size(&next)?;
                powers[i].push(next);
            }
        }
        let mut acc: BTreeMap<Monomial, Scalar> = BTreeMap::new();
        for (mono, c) in &self.terms {
            let mut term = Poly::constant(m, c.clone());
            for (i, &e) in mono.exps.iter().enumerate() {
                if e > 0 {
                    term = &term * &powers[i][e as usize];
                }
            }
            for (tm, tc) in term.terms {
                add_term(&mut acc, tm, tc);
            }
            if acc.len() > max_terms() {
                return Err(Error::TermLimit {
                    terms: acc.len(),
                    limit: max_terms(),
                });
            }
        }
        Ok(Poly { n: m, terms: acc })
    }

    /// Exact quotient `self / divisor`, or `None` when the division leaves a
    /// remainder.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lm, lc) = divisor.leading_term()?;
        if divisor.num_terms() == 1 && lm.is_one() {
            return Some(self.scale(&lc.recip()));
        }
        let mut rem = self.terms.clone();
        let mut quot = Poly::zero(self.n);
        while let Some((m, c)) = rem.last_key_value() {
            if !lm.divides(m) {
                return None;
            }
            let qm = lm.quotient_of(m);
            let qc = c / lc;
            for (dm, dc) in &divisor.terms {
                add_term(&mut rem, dm.mul(&qm), -(dc * &qc));
            }
            add_term(&mut quot.terms, qm, qc);
        }
        Some(quot)
    }

    /// Re-embeds into `m >= n` variables, keeping `x1..xn` in place.
    pub fn extend_vars(&self, m: usize) -> Poly {
        assert!(m >= self.n);
        Poly {
            n: m,
            terms: self
                .terms
                .iter()
                .map(|(mono, c)| {
                    let mut exps = mono.exps.clone();
                    exps.resize(m, 0);
                    (Monomial { exps }, c.clone())
                })
                .collect(),
        }
    }
}

pub(crate) fn add_term(terms: &mut BTreeMap<Monomial, Scalar>, m: Monomial, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match terms.get_mut(&m) {
        Some(x) => {
            *x += c;
            if x.is_zero() {
                terms.remove(&m);
            }
        }
        None => {
            terms.insert(m, c);
        }
    }
}

/// Arithmetic mode for [`poly_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithMode {
    Add,
    Sub,
    Mul,
}

pub fn poly_arith(mode: ArithMode, f: &Poly, g: &Poly) -> Result<Poly> {
    match mode {
        ArithMode::Add => f.try_add(g),
        ArithMode::Sub => f.try_sub(g),
        ArithMode::Mul => f.try_mul(g),
    }
}

// Operator forms panic on arity mismatch; use the `try_*` methods for
// untrusted input.
impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.try_add(rhs).expect("polynomial arity mismatch")
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.try_sub(rhs).expect("polynomial arity mismatch")
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.try_mul(rhs).expect("polynomial arity mismatch")
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

pub fn format_scalar(c: &Scalar) -> String {
    if c.denom().is_one() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

/// Canonical text: terms in descending graded-lex order, `c*monomial` with
/// unit coefficients omitted, signs joined as ` + ` / ` - `.
impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let abs = c.abs();
            if m.is_one() {
                write!(f, "{}", format_scalar(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", format_scalar(&abs))?;
            }
        }
        Ok(())
    }
}

pub fn format_poly(f: &Poly) -> String {
    f.to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_poly;

    fn p(s: &str, n: usize) -> Poly {
        parse_poly(s, n).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let f = p("x1 + x2", 2);
        let g = p("x1 - x2", 2);
        assert_eq!(&f * &g, p("x1^2 - x2^2", 2));
        assert_eq!((&f * &g).to_string(), "x1^2 - x2^2");
    }

    #[test]
    fn square_of_nagata_kernel_element() {
        // expanded by hand: (a+b)^2 with a = x3*x1, b = x2^2
        let f = p("x3*x1 + x2^2", 3);
        let expected = Poly::from_terms(
            3,
            [
                (Monomial::new(vec![2, 0, 2]), scalar(1)),
                (Monomial::new(vec![1, 2, 1]), scalar(2)),
                (Monomial::new(vec![0, 4, 0]), scalar(1)),
            ],
        );
        assert_eq!(&f * &f, expected);
        assert_eq!(expected.to_string(), "x1^2*x3^2 + 2*x1*x2^2*x3 + x2^4");
    }

    #[test]
    fn scale_by_one_is_identity() {
        let f = p("3/2*x1*x2 - 7", 2);
        assert_eq!(f.scale(&scalar(1)), f);
        assert!(f.scale(&scalar(0)).is_zero());
    }

    #[test]
    fn arity_mismatch() {
        let err = poly_arith(ArithMode::Add, &Poly::one(2), &Poly::one(3)).unwrap_err();
        assert_eq!(
            err,
            Error::ArityMismatch {
                expected: 2,
                found: 3
            }
        );
    }

    #[test]
    fn partials() {
        assert_eq!(p("x1^2", 1).partial(0).unwrap(), p("2*x1", 1));
        assert_eq!(p("x3*x1 + x2^2", 3).partial(1).unwrap(), p("2*x2", 3));
        assert!(p("x1*x2", 3).partial(2).unwrap().is_zero());
        assert_eq!(
            p("x1", 2).partial(2),
            Err(Error::VariableOutOfRange { index: 3, n: 2 })
        );
    }

    #[test]
    fn substitution() {
        let f = p("x1^2", 2);
        let images = [p("x1 + x2", 2), p("x2", 2)];
        assert_eq!(
            f.substitute(&images).unwrap(),
            p("x1^2 + 2*x1*x2 + x2^2", 2)
        );

        let id = [p("x1", 2), p("x2", 2)];
        assert_eq!(p("x1", 2).substitute(&id).unwrap(), p("x1", 2));

        let nagata = [
            p("x1 - 2*x2*(x3*x1 + x2^2) - x3*(x3*x1 + x2^2)^2", 3),
            p("x2 + x3*(x3*x1 + x2^2)", 3),
            p("x3", 3),
        ];
        let kernel = p("x3*x1 + x2^2", 3);
        assert_eq!(kernel.substitute(&nagata).unwrap(), kernel);
    }

    #[test]
    fn substitution_changes_variable_count() {
        let f = p("x1*x2 + 1", 2);
        let images = [p("x1 + x3", 3), p("x2", 3)];
        assert_eq!(f.substitute(&images).unwrap(), p("x1*x2 + x2*x3 + 1", 3));
        assert!(f.substitute(&images[..1]).is_err());
    }

    #[test]
    fn formatting() {
        assert_eq!(Poly::zero(2).to_string(), "0");
        assert_eq!(p("-x1 + 1/2", 1).to_string(), "-x1 + 1/2");
        assert_eq!(p("-3/4*x2^3 - x1", 2).to_string(), "-3/4*x2^3 - x1");
    }

    #[test]
    fn exact_division() {
        let a = p("x1^2 - x2^2", 2);
        let b = p("x1 - x2", 2);
        assert_eq!(a.div_exact(&b), Some(p("x1 + x2", 2)));
        assert_eq!(p("x1^2 + 1", 2).div_exact(&b), None);
    }
}

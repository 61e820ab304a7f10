//! The diagonal torus `T = { diag(t_1, ..., t_n) : prod t_i = 1 }`, its
//! characters, and root vectors.
//!
//! Conjugation is taken on the algebra, `(s ∘ D ∘ s^-1)(f) = s(D(s^-1(f)))`.
//! Under it `c x^a D_i` is rescaled by `t^(a - e_i)`, so `x_i D_j` has weight
//! `e_i - e_j` and `D_i` has weight `-e_i`. The latter is the inverse of the
//! character usually quoted for translations; weights here always follow
//! the operator convention.
//!
//! Because `prod t_i = 1`, characters are integer vectors modulo the
//! diagonal `(1, ..., 1)`. Symbolic computations eliminate
//! `t_n = (t_1 ... t_{n-1})^-1`, so coefficients are Laurent polynomials in
//! `t_1, ..., t_{n-1}`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::automorphism::{invert_map, monomials_up_to, FactoredAut, PolyMap};
use crate::derivation::{
    check_locally_nilpotent, Derivation, Nilpotency, NilpotencyBounds, Refutation,
};
use crate::error::{Error, Result};
use crate::poly::{format_scalar, Monomial, Poly, Scalar};

/// A character of `T`, stored as the representative with minimum entry 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(Vec<i64>);

impl Weight {
    pub fn from_raw(mut v: Vec<i64>) -> Self {
        if let Some(&min) = v.iter().min() {
            for x in &mut v {
                *x -= min;
            }
        }
        Weight(v)
    }

    /// Weight of `x^a D_i`, the class of `a - e_i`.
    pub fn of_term(m: &Monomial, i: usize) -> Self {
        let mut v: Vec<i64> = m.exponents().iter().map(|&e| e as i64).collect();
        v[i] -= 1;
        Weight::from_raw(v)
    }

    pub fn rep(&self) -> &[i64] {
        &self.0
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// `chi(s) = prod s_i^{r_i}`; independent of the representative when
    /// `prod s_i = 1`.
    pub fn character(&self, s: &TorusElement) -> Scalar {
        self.0
            .iter()
            .zip(s.entries())
            .map(|(&r, t)| scalar_pow(t, r))
            .product()
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn scalar_pow(t: &Scalar, e: i64) -> Scalar {
    let base = if e < 0 { t.recip() } else { t.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

/// A concrete element of `T`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusElement(Vec<Scalar>);

impl TorusElement {
    pub fn new(entries: Vec<Scalar>) -> Result<Self> {
        let prod: Scalar = entries.iter().product();
        if entries.iter().any(Zero::is_zero) || !prod.is_one() {
            return Err(Error::NotInTorus);
        }
        Ok(TorusElement(entries))
    }

    pub fn identity(n: usize) -> Self {
        TorusElement(vec![Scalar::one(); n])
    }

    pub fn entries(&self) -> &[Scalar] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }
}

/// Laurent polynomial in the torus parameters `t_1, ..., t_{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Laurent {
    params: usize,
    terms: BTreeMap<Vec<i64>, Scalar>,
}

impl Laurent {
    pub fn zero(params: usize) -> Self {
        Laurent {
            params,
            terms: BTreeMap::new(),
        }
    }

    pub fn monomial(exps: Vec<i64>, c: Scalar) -> Self {
        let params = exps.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exps, c);
        }
        Laurent { params, terms }
    }

    pub fn constant(params: usize, c: Scalar) -> Self {
        Laurent::monomial(vec![0; params], c)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_monomial(&self) -> Option<(&[i64], &Scalar)> {
        if self.terms.len() != 1 {
            return None;
        }
        self.terms.iter().next().map(|(e, c)| (e.as_slice(), c))
    }

    fn add_assign(&mut self, other: &Laurent) {
        for (e, c) in &other.terms {
            add_entry(&mut self.terms, e.clone(), c.clone());
        }
    }

    fn mul(&self, other: &Laurent) -> Laurent {
        let mut out = Laurent::zero(self.params);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                add_entry(&mut out.terms, e, ca * cb);
            }
        }
        out
    }

    fn scale(&self, c: &Scalar) -> Laurent {
        let mut out = Laurent::zero(self.params);
        for (e, x) in &self.terms {
            add_entry(&mut out.terms, e.clone(), x * c);
        }
        out
    }

    /// Evaluates at `t_1, ..., t_{n-1}` taken from the torus element.
    pub fn eval(&self, s: &TorusElement) -> Scalar {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(s.entries())
                    .map(|(&k, t)| scalar_pow(t, k))
                    .product::<Scalar>()
                    * c
            })
            .sum()
    }
}

fn add_entry<K: Ord>(terms: &mut BTreeMap<K, Scalar>, k: K, c: Scalar) {
    if c.is_zero() {
        return;
    }
    match terms.get_mut(&k) {
        Some(x) => {
            *x += c;
            if x.is_zero() {
                terms.remove(&k);
            }
        }
        None => {
            terms.insert(k, c);
        }
    }
}

impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(i, &x)| {
                    if x == 1 {
                        format!("t{}", i + 1)
                    } else {
                        format!("t{}^{x}", i + 1)
                    }
                })
                .collect();
            let abs = c.abs();
            match (vars.is_empty(), abs.is_one()) {
                (true, _) => write!(f, "{}", format_scalar(&abs))?,
                (false, true) => write!(f, "{}", vars.join("*"))?,
                (false, false) => write!(f, "{}*{}", format_scalar(&abs), vars.join("*"))?,
            }
        }
        Ok(())
    }
}

/// Polynomial in `x_1, ..., x_n` with [`Laurent`] coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParamPoly {
    n: usize,
    params: usize,
    terms: BTreeMap<Monomial, Laurent>,
}

impl ParamPoly {
    pub fn zero(n: usize, params: usize) -> Self {
        ParamPoly {
            n,
            params,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_poly(p: &Poly, params: usize) -> Self {
        let mut out = ParamPoly::zero(p.n(), params);
        for (m, c) in p.terms() {
            out.terms
                .insert(m.clone(), Laurent::constant(params, c.clone()));
        }
        out
    }

    pub fn term(m: Monomial, coeff: Laurent) -> Self {
        let mut out = ParamPoly::zero(m.n(), coeff.params);
        if !coeff.is_zero() {
            out.terms.insert(m, coeff);
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Laurent)> + '_ {
        self.terms.iter().rev()
    }

    fn add_term(&mut self, m: Monomial, c: &Laurent) {
        let entry = self
            .terms
            .entry(m.clone())
            .or_insert_with(|| Laurent::zero(c.params));
        entry.add_assign(c);
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    fn add(&self, other: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        out
    }

    fn mul(&self, other: &ParamPoly) -> ParamPoly {
        let mut out = ParamPoly::zero(self.n, self.params);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), &ca.mul(cb));
            }
        }
        out
    }

    /// `f(images)` for a rational polynomial `f`.
    pub fn compose_into(f: &Poly, images: &[ParamPoly]) -> ParamPoly {
        let (n, params) = (images[0].n, images[0].params);
        let mut acc = ParamPoly::zero(n, params);
        for (m, c) in f.terms() {
            let mut term = ParamPoly::term(Monomial::one(n), Laurent::constant(params, c.clone()));
            for (i, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&images[i]);
                }
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Replaces each `x_i` by the rational polynomial `images[i]`.
    pub fn substitute_x(&self, images: &[Poly]) -> Result<ParamPoly> {
        let n = images.first().map_or(self.n, Poly::n);
        let mut acc = ParamPoly::zero(n, self.params);
        for (m, c) in &self.terms {
            let value = Poly::monomial(self.n, Scalar::one(), m.clone()).substitute(images)?;
            for (u, x) in value.terms() {
                acc.add_term(u.clone(), &c.scale(x));
            }
        }
        Ok(acc)
    }

    /// Specializes the parameters.
    pub fn eval(&self, s: &TorusElement) -> Poly {
        Poly::from_terms(
            self.n,
            self.terms.iter().map(|(m, c)| (m.clone(), c.eval(s))),
        )
    }
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{m}")?;
        }
        Ok(())
    }
}

/// Images of the generic torus element: `x_i -> t_i x_i`, with
/// `t_n = (t_1 ... t_{n-1})^-1`.
pub fn generic_torus_images(n: usize) -> Vec<ParamPoly> {
    let params = n.saturating_sub(1);
    (0..n)
        .map(|i| {
            let mut e = vec![0i64; params];
            if i + 1 < n {
                e[i] = 1;
            } else {
                e.iter_mut().for_each(|x| *x = -1);
            }
            ParamPoly::term(Monomial::var(n, i), Laurent::monomial(e, Scalar::one()))
        })
        .collect()
}

/// Exponents of `t^r` after eliminating `t_n`.
fn eliminate_last(r: &[i64]) -> Vec<i64> {
    let last = *r.last().unwrap_or(&0);
    r[..r.len().saturating_sub(1)]
        .iter()
        .map(|x| x - last)
        .collect()
}

/// A derivation whose coefficients depend on the torus parameters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamDerivation {
    images: Vec<ParamPoly>,
}

impl ParamDerivation {
    pub fn images(&self) -> &[ParamPoly] {
        &self.images
    }

    pub fn eval(&self, s: &TorusElement) -> Derivation {
        Derivation::new(self.images.iter().map(|p| p.eval(s)).collect())
            .expect("images share the arity")
    }

    /// The Laurent monomial `chi` with `self = chi * d`, if there is one.
    pub fn as_multiple_of(&self, d: &Derivation) -> Option<(Vec<i64>, Scalar)> {
        let mut found: Option<(Vec<i64>, Scalar)> = None;
        for (img, base) in self.images.iter().zip(d.images()) {
            if img.terms.len() != base.num_terms() {
                return None;
            }
            for (m, c) in base.terms() {
                let lc = img.terms.get(m)?;
                let (e, x) = lc.as_monomial()?;
                let ratio = x / c;
                match &found {
                    Some((fe, fr)) if fe.as_slice() != e || *fr != ratio => return None,
                    Some(_) => {}
                    None => found = Some((e.to_vec(), ratio)),
                }
            }
        }
        found
    }
}

impl fmt::Display for ParamDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, p) in self.images.iter().enumerate() {
            if p.terms.is_empty() {
                continue;
            }
            if !first {
                writeln!(f)?;
            }
            first = false;
            write!(f, "D x{} = {p}", i + 1)?;
        }
        if first {
            write!(f, "D x1 = 0")?;
        }
        Ok(())
    }
}

/// Torus argument for [`conj_by_torus`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TorusArg {
    Concrete(TorusElement),
    Generic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Conjugate {
    Concrete(Derivation),
    Symbolic(ParamDerivation),
}

/// `s ∘ D ∘ s^-1`, concrete or for the generic torus element.
pub fn conj_by_torus(d: &Derivation, s: &TorusArg) -> Result<Conjugate> {
    match s {
        TorusArg::Concrete(s) => Ok(Conjugate::Concrete(conj_concrete(d, s)?)),
        TorusArg::Generic => Ok(Conjugate::Symbolic(conj_generic(d))),
    }
}

/// `(s D s^-1)(x_j) = t_j^-1 * D(x_j)(t_1 x_1, ..., t_n x_n)`.
pub fn conj_concrete(d: &Derivation, s: &TorusElement) -> Result<Derivation> {
    crate::error::check_arity(d.n(), s.n())?;
    let n = d.n();
    let scaled: Vec<Poly> = (0..n)
        .map(|i| Poly::var(n, i).scale(&s.entries()[i]))
        .collect();
    let images = d
        .images()
        .iter()
        .enumerate()
        .map(|(j, p)| Ok(p.substitute(&scaled)?.scale(&s.entries()[j].recip())))
        .collect::<Result<Vec<_>>>()?;
    Derivation::new(images)
}

pub fn conj_generic(d: &Derivation) -> ParamDerivation {
    let n = d.n();
    let params = n.saturating_sub(1);
    let images = d
        .images()
        .iter()
        .enumerate()
        .map(|(j, p)| {
            let mut out = ParamPoly::zero(n, params);
            for (m, c) in p.terms() {
                let mut r: Vec<i64> = m.exponents().iter().map(|&e| e as i64).collect();
                r[j] -= 1;
                out.add_term(m.clone(), &Laurent::monomial(eliminate_last(&r), c.clone()));
            }
            out
        })
        .collect();
    ParamDerivation { images }
}

/// Splits `D` by the weight of each term `c x^a D_i`. Components are
/// nonzero, have pairwise distinct weights, are sorted by weight, and sum
/// to `D`.
pub fn weight_decompose(d: &Derivation) -> Vec<(Weight, Derivation)> {
    let n = d.n();
    let mut groups: BTreeMap<Weight, Vec<Poly>> = BTreeMap::new();
    for (i, m, c) in d.terms() {
        let images = groups
            .entry(Weight::of_term(m, i))
            .or_insert_with(|| vec![Poly::zero(n); n]);
        images[i] = &images[i] + &Poly::monomial(n, c.clone(), m.clone());
    }
    groups
        .into_iter()
        .map(|(w, images)| (w, Derivation::new(images).expect("arity")))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rejection {
    ZeroDerivation,
    NotHomogeneous { components: usize },
    TrivialCharacter,
    NotLocallyNilpotent { witness: usize, reason: Refutation },
    NilpotencyUnknown,
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::ZeroDerivation => write!(f, "zero derivation"),
            Rejection::NotHomogeneous { components } => {
                write!(f, "not homogeneous ({components} weight components)")
            }
            Rejection::TrivialCharacter => write!(f, "trivial character"),
            Rejection::NotLocallyNilpotent { witness, reason } => {
                write!(f, "not locally nilpotent (x{}: {reason})", witness + 1)
            }
            Rejection::NilpotencyUnknown => write!(f, "local nilpotency unknown within bounds"),
        }
    }
}

/// Returns the root of `D` when it is a root vector.
pub fn is_root_vector(
    d: &Derivation,
    bounds: NilpotencyBounds,
) -> std::result::Result<Weight, Rejection> {
    if d.is_zero() {
        return Err(Rejection::ZeroDerivation);
    }
    let mut parts = weight_decompose(d);
    if parts.len() != 1 {
        return Err(Rejection::NotHomogeneous {
            components: parts.len(),
        });
    }
    let (weight, _) = parts.pop().expect("one component");
    // a sound refutation outranks the weight test: x1 D1 is reported as not
    // locally nilpotent even though its weight is also trivial
    match check_locally_nilpotent(d, bounds) {
        Nilpotency::Disproven { witness, reason } => {
            Err(Rejection::NotLocallyNilpotent { witness, reason })
        }
        _ if weight.is_trivial() => Err(Rejection::TrivialCharacter),
        Nilpotency::Unknown(_) => Err(Rejection::NilpotencyUnknown),
        Nilpotency::Proven(_) => Ok(weight),
    }
}

/// One monomial root vector `x^monomial D_{index+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootVector {
    pub weight: Weight,
    pub monomial: Monomial,
    pub index: usize,
}

impl RootVector {
    pub fn degree(&self) -> u32 {
        self.monomial.degree()
    }

    pub fn derivation(&self) -> Derivation {
        Derivation::monomial(
            self.monomial.n(),
            Scalar::one(),
            self.monomial.clone(),
            self.index,
        )
    }
}

/// All monomial root vectors `x^a D_i` with `|a| <= max_deg`, sorted by
/// `(degree, weight, index)`. Every candidate goes through
/// [`is_root_vector`]; the survivors are exactly those with `a_i = 0`.
pub fn enumerate_monomial_root_vectors(n: usize, max_deg: u32) -> Vec<RootVector> {
    let candidates: Vec<(Monomial, usize)> = monomials_up_to(n, max_deg)
        .into_iter()
        .flat_map(|m| (0..n).map(move |i| (m.clone(), i)))
        .collect();
    let bounds = NilpotencyBounds::default();
    let mut found: Vec<RootVector> = candidates
        .into_par_iter()
        .filter_map(|(m, i)| {
            let d = Derivation::monomial(n, Scalar::one(), m.clone(), i);
            is_root_vector(&d, bounds).ok().map(|weight| RootVector {
                weight,
                monomial: m,
                index: i,
            })
        })
        .collect();
    found.sort_by(|a, b| {
        (a.degree(), &a.weight, a.index, &a.monomial).cmp(&(
            b.degree(),
            &b.weight,
            b.index,
            &b.monomial,
        ))
    });
    found
}

/// Groups root vectors by root, roots in ascending order.
pub fn group_by_root(found: &[RootVector]) -> Vec<(Weight, Vec<Derivation>)> {
    let mut groups: BTreeMap<Weight, Vec<Derivation>> = BTreeMap::new();
    for rv in found {
        groups
            .entry(rv.weight.clone())
            .or_default()
            .push(rv.derivation());
    }
    groups.into_iter().collect()
}

/// Runs [`is_root_vector`] over user-supplied candidates in parallel.
pub fn classify_candidates(
    candidates: &[Derivation],
    bounds: NilpotencyBounds,
) -> Vec<std::result::Result<Weight, Rejection>> {
    candidates
        .par_iter()
        .map(|d| is_root_vector(d, bounds))
        .collect()
}

/// TSV with a header row and columns `weight_rep, monomial, index, degree`.
pub fn format_root_vectors_tsv(found: &[RootVector]) -> String {
    let mut out = String::from("weight_rep\tmonomial\tindex\tdegree\n");
    for rv in found {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            rv.weight,
            rv.monomial,
            rv.index + 1,
            rv.degree()
        ));
    }
    out
}

/// Images of `sigma ∘ tau ∘ sigma^-1` for the generic torus element `tau`.
pub fn conjugate_generic_torus(sigma: &FactoredAut) -> Result<Vec<ParamPoly>> {
    let inverse = sigma.inverse();
    conjugate_with_inverse(sigma.expand()?, inverse.expand()?)
}

/// As [`conjugate_generic_torus`] for a plain map; the inverse comes from
/// [`invert_map`] with its default bound.
pub fn conjugate_generic_torus_map(sigma: &PolyMap) -> Result<Vec<ParamPoly>> {
    conjugate_with_inverse(sigma, &invert_map(sigma, None)?)
}

fn conjugate_with_inverse(forward: &PolyMap, backward: &PolyMap) -> Result<Vec<ParamPoly>> {
    let tau = generic_torus_images(forward.n());
    backward
        .images()
        .iter()
        .map(|p| ParamPoly::compose_into(p, &tau).substitute_x(forward.images()))
        .collect()
}

/// Whether a conjugated generic torus element is the element itself.
pub fn is_centralizing(conj: &[ParamPoly]) -> bool {
    conj == generic_torus_images(conj.len()).as_slice()
}

/// Whether a conjugated generic torus element is again diagonal-monomial:
/// every image is a Laurent monomial times one variable.
pub fn is_normalizing(conj: &[ParamPoly]) -> bool {
    conj.iter().all(|p| {
        p.terms.len() == 1
            && p.terms
                .iter()
                .all(|(m, c)| m.as_var().is_some() && c.as_monomial().is_some())
    })
}

pub fn centralizes_torus(sigma: &FactoredAut) -> Result<bool> {
    Ok(is_centralizing(&conjugate_generic_torus(sigma)?))
}

pub fn normalizes_torus(sigma: &FactoredAut) -> Result<bool> {
    Ok(is_normalizing(&conjugate_generic_torus(sigma)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automorphism::Factor;
    use crate::matrix::Matrix;
    use crate::poly::{ratio, scalar};

    fn d(s: &str, n: usize) -> Derivation {
        Derivation::parse(s, n).unwrap()
    }

    fn generic(dv: &Derivation) -> ParamDerivation {
        match conj_by_torus(dv, &TorusArg::Generic).unwrap() {
            Conjugate::Symbolic(p) => p,
            Conjugate::Concrete(_) => unreachable!(),
        }
    }

    #[test]
    fn weights_are_canonical() {
        assert_eq!(Weight::from_raw(vec![-1, 1]).rep(), &[0, 2]);
        assert_eq!(
            Weight::from_raw(vec![3, 3, 3]),
            Weight::from_raw(vec![0, 0, 0])
        );
        assert!(Weight::from_raw(vec![5, 5]).is_trivial());
        assert_eq!(Weight::from_raw(vec![2, 0, 1]).to_string(), "(2,0,1)");
    }

    #[test]
    fn generic_conjugation() {
        // x1 D2 scales by t1 t2^-1; with n = 3 that stays as written
        let c = generic(&d("D x2 = x1", 3));
        assert_eq!(c.to_string(), "D x2 = (t1*t2^-1)*x1");
        assert_eq!(
            c.as_multiple_of(&d("D x2 = x1", 3)),
            Some((vec![1, -1], scalar(1)))
        );
        // D1 scales by t1^-1
        let c = generic(&Derivation::partial(3, 0));
        assert_eq!(c.to_string(), "D x1 = (t1^-1)*1");
        // D3 scales by t3^-1 = t1 t2
        let c = generic(&Derivation::partial(3, 2));
        assert_eq!(c.to_string(), "D x3 = (t1*t2)*1");
    }

    #[test]
    fn identity_element_fixes_derivations() {
        let dv = d("D x1 = x2^2 - 3*x3; D x3 = x1*x2", 3);
        let c = conj_by_torus(&dv, &TorusArg::Concrete(TorusElement::identity(3))).unwrap();
        assert_eq!(c, Conjugate::Concrete(dv));
    }

    #[test]
    fn torus_membership() {
        assert_eq!(
            TorusElement::new(vec![scalar(2), scalar(3)]),
            Err(Error::NotInTorus)
        );
        assert_eq!(
            TorusElement::new(vec![scalar(0), scalar(1)]),
            Err(Error::NotInTorus)
        );
        assert!(TorusElement::new(vec![scalar(2), ratio(1, 2)]).is_ok());
    }

    #[test]
    fn concrete_matches_generic() {
        let dv = d("D x1 = x2^2 - 3*x3; D x2 = 5*x3^3*x1; D x3 = 1", 3);
        let s = TorusElement::new(vec![scalar(2), ratio(-1, 3), ratio(-3, 2)]).unwrap();
        assert_eq!(generic(&dv).eval(&s), conj_concrete(&dv, &s).unwrap());
    }

    #[test]
    fn decomposition_examples() {
        let parts = weight_decompose(&d("D x1 = x2", 2));
        assert_eq!(parts.len(), 1);
        assert_eq!(parts[0].0.rep(), &[0, 2]);

        let nag = d("D x1 = -2*x2; D x2 = x3", 3);
        let parts = weight_decompose(&nag);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].0, Weight::from_raw(vec![-1, 1, 0]));
        assert_eq!(parts[1].0, Weight::from_raw(vec![0, -1, 1]));

        assert!(weight_decompose(&Derivation::zero(3)).is_empty());
    }

    #[test]
    fn root_vector_examples() {
        let b = NilpotencyBounds::default();
        assert_eq!(
            is_root_vector(&d("D x2 = x1", 2), b),
            Ok(Weight::from_raw(vec![1, -1]))
        );
        assert_eq!(
            is_root_vector(&d("D x1 = -2*x2; D x2 = x3", 3), b),
            Err(Rejection::NotHomogeneous { components: 2 })
        );
        assert_eq!(
            is_root_vector(&d("D x1 = x1", 2), b),
            Err(Rejection::NotLocallyNilpotent {
                witness: 0,
                reason: Refutation::Monomial
            })
        );
        assert_eq!(
            is_root_vector(&d("D x1 = x1*x2", 2), b).unwrap_err(),
            Rejection::NotLocallyNilpotent {
                witness: 0,
                reason: Refutation::Monomial
            }
        );
        assert_eq!(
            is_root_vector(&Derivation::zero(2), b),
            Err(Rejection::ZeroDerivation)
        );
        // homogeneous of trivial weight, nilpotency undecided
        assert_eq!(
            is_root_vector(&d("D x1 = x1^2*x2; D x2 = -x1*x2^2", 2), b),
            Err(Rejection::TrivialCharacter)
        );
        assert_eq!(
            is_root_vector(&d("D x1 = x1; D x2 = -x2", 2), b),
            Err(Rejection::NotLocallyNilpotent {
                witness: 0,
                reason: Refutation::LinearPart
            })
        );
        // homogeneous, nontrivial, but escapes both refutation criteria
        assert_eq!(
            is_root_vector(
                &d("D x1 = x1^2*x2^2; D x2 = x1*x2^3", 2),
                NilpotencyBounds { iter: 6, deg: 50 }
            ),
            Err(Rejection::NilpotencyUnknown)
        );
    }

    #[test]
    fn enumeration_n2() {
        let found = enumerate_monomial_root_vectors(2, 1);
        let rows: Vec<(String, String, usize)> = found
            .iter()
            .map(|r| (r.weight.to_string(), r.monomial.to_string(), r.index + 1))
            .collect();
        assert_eq!(
            rows,
            vec![
                ("(0,1)".into(), "1".into(), 1),
                ("(1,0)".into(), "1".into(), 2),
                ("(0,2)".into(), "x2".into(), 1),
                ("(2,0)".into(), "x1".into(), 2),
            ]
        );
        let zero = enumerate_monomial_root_vectors(2, 0);
        assert_eq!(zero.len(), 2);
        assert!(zero.iter().all(|r| r.monomial.is_one()));
        assert_eq!(group_by_root(&found).len(), 4);
    }

    #[test]
    fn enumeration_tsv() {
        let tsv = format_root_vectors_tsv(&enumerate_monomial_root_vectors(2, 1));
        assert_eq!(
            tsv,
            "weight_rep\tmonomial\tindex\tdegree\n(0,1)\t1\t1\t0\n(1,0)\t1\t2\t0\n(0,2)\tx2\t1\t1\n(2,0)\tx1\t2\t1\n"
        );
    }

    fn linear(rows: &[&[i64]]) -> FactoredAut {
        FactoredAut::from_factors(
            rows.len(),
            vec![Factor::linear(Matrix::from_i64(rows)).unwrap()],
        )
        .unwrap()
    }

    #[test]
    fn centralizer_and_normalizer_membership() {
        let scaling = FactoredAut::from_factors(
            2,
            vec![Factor::linear(Matrix::diagonal(&[scalar(2), ratio(1, 2)])).unwrap()],
        )
        .unwrap();
        assert!(centralizes_torus(&scaling).unwrap());
        assert!(normalizes_torus(&scaling).unwrap());

        let swap = linear(&[&[0, 1], &[1, 0]]);
        assert!(normalizes_torus(&swap).unwrap());
        assert!(!centralizes_torus(&swap).unwrap());

        let shift =
            FactoredAut::from_factors(2, vec![Factor::translation(vec![scalar(1), scalar(0)])])
                .unwrap();
        assert!(!normalizes_torus(&shift).unwrap());
        assert!(!centralizes_torus(&shift).unwrap());

        let shear = linear(&[&[1, 1], &[0, 1]]);
        assert!(!normalizes_torus(&shear).unwrap());
    }
}

//! Polynomial endomorphisms and factored automorphisms.
//!
//! A map `sigma` is stored by the images `sigma(x_i)` and acts on the
//! algebra by substitution. Composition follows the algebra convention
//! `(sigma ∘ tau)(x_i) = sigma(tau(x_i))`, i.e. the images of `tau` with the
//! images of `sigma` substituted in. Under this convention
//! `exp(f1 D1) ∘ exp(f2 D2)` with `f1 ∈ k[x2, x3]` and `f2 ∈ k[x3]` is
//! `(x1 + f1, x2 + f2, x3)`; the golden tests pin it.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};

use crate::derivation::{exp_apply, shift, Derivation, Lnd, NilpotencyBounds};
use crate::error::{check_arity, Error, Result};
use crate::linalg::Echelon;
use crate::matrix::{format_vector, parse_vector, Matrix};
use crate::parse::{parse_poly, parse_scalar, parse_var_token};
use crate::poly::{format_scalar, Monomial, Poly, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyMap {
    images: Vec<Poly>,
}

impl PolyMap {
    pub fn new(images: Vec<Poly>) -> Result<Self> {
        let n = images.len();
        for p in &images {
            check_arity(n, p.n())?;
        }
        Ok(PolyMap { images })
    }

    pub fn identity(n: usize) -> Self {
        PolyMap {
            images: (0..n).map(|i| Poly::var(n, i)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    pub fn into_images(self) -> Vec<Poly> {
        self.images
    }

    pub fn degree(&self) -> u32 {
        self.images.iter().map(Poly::degree).max().unwrap_or(0)
    }

    pub fn is_identity(&self) -> bool {
        *self == PolyMap::identity(self.n())
    }

    /// `sigma(f)`: substitutes the images into `f`.
    pub fn apply(&self, f: &Poly) -> Result<Poly> {
        f.substitute(&self.images)
    }

    /// `self ∘ tau`.
    pub fn compose(&self, tau: &PolyMap) -> Result<PolyMap> {
        check_arity(self.n(), tau.n())?;
        let images = tau
            .images
            .iter()
            .map(|p| p.substitute(&self.images))
            .collect::<Result<Vec<_>>>()?;
        Ok(PolyMap { images })
    }

    /// Entry `(i, j)` is `d sigma(x_j) / d x_i`.
    pub fn jacobian_matrix(&self) -> Vec<Vec<Poly>> {
        let n = self.n();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| self.images[j].partial(i).expect("index in range"))
                    .collect()
            })
            .collect()
    }

    pub fn jacobian_det(&self) -> Poly {
        bareiss_det(self.jacobian_matrix(), self.n())
    }

    pub fn is_volume_preserving(&self) -> bool {
        self.jacobian_det().is_one()
    }

    /// Parses `x<i> -> <poly>` lines (`;` also separates lines). Variables
    /// without a line are fixed.
    pub fn parse(text: &str, n: usize) -> Result<PolyMap> {
        let mut images: Vec<Option<Poly>> = vec![None; n];
        let mut offset = 0;
        for line in text.split(['\n', ';']) {
            let at = offset;
            offset += line.len() + 1;
            let body = line.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let arrow = line
                .find("->")
                .ok_or_else(|| Error::syntax(at, "expected 'x<i> -> <poly>'"))?;
            let i = parse_var_token(&line[..arrow], n, at)?;
            if images[i - 1].is_some() {
                return Err(Error::syntax(at, format!("duplicate image for x{i}")));
            }
            let p = parse_poly(&line[arrow + 2..], n).map_err(|e| shift(e, at + arrow + 2))?;
            images[i - 1] = Some(p);
        }
        Ok(PolyMap {
            images: images
                .into_iter()
                .enumerate()
                .map(|(i, p)| p.unwrap_or_else(|| Poly::var(n, i)))
                .collect(),
        })
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.images.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "x{} -> {p}", i + 1)?;
        }
        Ok(())
    }
}

/// Fraction-free elimination: every division below is exact in the
/// polynomial ring.
fn bareiss_det(mut a: Vec<Vec<Poly>>, n: usize) -> Poly {
    if a.is_empty() {
        return Poly::one(n);
    }
    let size = a.len();
    let mut negate = false;
    let mut prev = Poly::one(n);
    for k in 0..size - 1 {
        if a[k][k].is_zero() {
            let Some(r) = (k + 1..size).find(|&r| !a[r][k].is_zero()) else {
                return Poly::zero(n);
            };
            a.swap(k, r);
            negate = !negate;
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = num.div_exact(&prev).expect("Bareiss division is exact");
            }
            a[i][k] = Poly::zero(n);
        }
        prev = a[k][k].clone();
    }
    let det = a[size - 1][size - 1].clone();
    if negate {
        -det
    } else {
        det
    }
}

pub fn jacobian_det(sigma: &PolyMap) -> Poly {
    sigma.jacobian_det()
}

pub fn is_volume_preserving(sigma: &PolyMap) -> bool {
    sigma.is_volume_preserving()
}

/// One generator in a factored word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Factor {
    /// `x_i -> sum_j matrix[i][j] x_j`.
    Linear { matrix: Matrix, det: Scalar },
    /// `x_i -> x_i + c_i`.
    Translation(Vec<Scalar>),
    /// `exp(t * f * D)` where `f ∈ Ker D`; `lnd` is the certified `f * D`.
    Exp {
        t: Scalar,
        kernel_factor: Poly,
        base: Lnd,
        lnd: Lnd,
    },
}

impl Factor {
    pub fn linear(matrix: Matrix) -> Result<Factor> {
        let det = matrix.det();
        if det.is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok(Factor::Linear { matrix, det })
    }

    pub fn translation(c: Vec<Scalar>) -> Factor {
        Factor::Translation(c)
    }

    pub fn exp(t: Scalar, lnd: Lnd) -> Factor {
        Factor::Exp {
            t,
            kernel_factor: Poly::one(lnd.n()),
            base: lnd.clone(),
            lnd,
        }
    }

    /// `exp(t * f * D)`; fails unless `f ∈ Ker D`.
    pub fn exp_scaled(t: Scalar, base: Lnd, f: Poly) -> Result<Factor> {
        let lnd = base.scale_by_kernel(&f)?;
        Ok(Factor::Exp {
            t,
            kernel_factor: f,
            base,
            lnd,
        })
    }

    pub fn n(&self) -> usize {
        match self {
            Factor::Linear { matrix, .. } => matrix.n(),
            Factor::Translation(c) => c.len(),
            Factor::Exp { lnd, .. } => lnd.n(),
        }
    }

    pub fn expand(&self) -> Result<PolyMap> {
        let n = self.n();
        let images = match self {
            Factor::Linear { matrix, .. } => (0..n)
                .map(|i| {
                    Poly::from_terms(
                        n,
                        (0..n).map(|j| (Monomial::var(n, j), matrix.get(i, j).clone())),
                    )
                })
                .collect(),
            Factor::Translation(c) => (0..n)
                .map(|i| &Poly::var(n, i) + &Poly::constant(n, c[i].clone()))
                .collect(),
            Factor::Exp { t, lnd, .. } => (0..n)
                .map(|i| exp_apply(lnd, &Poly::var(n, i), t))
                .collect::<Result<Vec<_>>>()?,
        };
        Ok(PolyMap { images })
    }

    pub fn inverse(&self) -> Factor {
        match self {
            Factor::Linear { matrix, det } => Factor::Linear {
                matrix: matrix.inverse().expect("nonzero determinant"),
                det: det.recip(),
            },
            Factor::Translation(c) => Factor::Translation(c.iter().map(|x| -x).collect()),
            Factor::Exp {
                t,
                kernel_factor,
                base,
                lnd,
            } => Factor::Exp {
                t: -t,
                kernel_factor: kernel_factor.clone(),
                base: base.clone(),
                lnd: lnd.clone(),
            },
        }
    }

    /// Constant Jacobian determinant of the factor.
    pub fn det(&self) -> Scalar {
        match self {
            Factor::Linear { det, .. } => det.clone(),
            _ => Scalar::one(),
        }
    }

    fn parse(line: &str, n: usize, at: usize) -> Result<Factor> {
        let (kind, rest) = line
            .split_once(':')
            .ok_or_else(|| Error::syntax(at, "expected '<kind>: ...'"))?;
        let rest_at = at + kind.len() + 1;
        match kind.trim() {
            "linear" => {
                let m = Matrix::parse(rest).map_err(|e| shift(e, rest_at))?;
                if m.n() != n {
                    return Err(Error::ArityMismatch {
                        expected: n,
                        found: m.n(),
                    });
                }
                Factor::linear(m)
            }
            "translate" => {
                let c = parse_vector(rest).map_err(|e| shift(e, rest_at))?;
                check_arity(n, c.len())?;
                Ok(Factor::Translation(c))
            }
            "exp" => {
                let mut t = Scalar::one();
                let mut f = Poly::one(n);
                let mut images = vec![Poly::zero(n); n];
                let mut off = rest_at;
                for item in rest.split(';') {
                    let item_at = off;
                    off += item.len() + 1;
                    let body = item.trim();
                    if body.is_empty() {
                        continue;
                    }
                    let (key, value) = item
                        .split_once('=')
                        .ok_or_else(|| Error::syntax(item_at, "expected key=value"))?;
                    let value_at = item_at + key.len() + 1;
                    let key = key.trim();
                    if key == "t" {
                        t = parse_scalar(value).map_err(|e| shift(e, value_at))?;
                    } else if key == "f" {
                        f = parse_poly(value, n).map_err(|e| shift(e, value_at))?;
                    } else if let Some(var) = key.strip_prefix('D') {
                        let i = parse_var_token(var, n, item_at)?;
                        let p = parse_poly(value, n).map_err(|e| shift(e, value_at))?;
                        images[i - 1] = &images[i - 1] + &p;
                    } else {
                        return Err(Error::syntax(item_at, format!("unknown exp field '{key}'")));
                    }
                }
                let base = Lnd::certify(Derivation::new(images)?, NilpotencyBounds::default())?;
                Factor::exp_scaled(t, base, f)
            }
            other => Err(Error::syntax(at, format!("unknown factor kind '{other}'"))),
        }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::Linear { matrix, .. } => write!(f, "linear: {matrix}"),
            Factor::Translation(c) => write!(f, "translate: {}", format_vector(c)),
            Factor::Exp {
                t,
                kernel_factor,
                base,
                ..
            } => {
                write!(f, "exp: t={}", format_scalar(t))?;
                if !kernel_factor.is_one() {
                    write!(f, "; f={kernel_factor}")?;
                }
                for (i, p) in base.derivation().images().iter().enumerate() {
                    if !p.is_zero() {
                        write!(f, "; D x{}={p}", i + 1)?;
                    }
                }
                Ok(())
            }
        }
    }
}

/// A word of invertible factors, read as the composition
/// `w[0] ∘ w[1] ∘ ... ∘ w[k-1]`. The expansion is computed at most once.
#[derive(Clone, Debug)]
pub struct FactoredAut {
    n: usize,
    word: Vec<Factor>,
    expansion: OnceLock<Result<PolyMap>>,
}

impl PartialEq for FactoredAut {
    /// Structural equality of words; use [`equals`] to compare maps.
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.word == other.word
    }
}

impl FactoredAut {
    pub fn identity(n: usize) -> Self {
        FactoredAut {
            n,
            word: Vec::new(),
            expansion: OnceLock::new(),
        }
    }

    pub fn from_factors(n: usize, word: Vec<Factor>) -> Result<Self> {
        for f in &word {
            check_arity(n, f.n())?;
        }
        Ok(FactoredAut {
            n,
            word,
            expansion: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn word(&self) -> &[Factor] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// `self ∘ other`, by concatenating words.
    pub fn compose(&self, other: &FactoredAut) -> Result<FactoredAut> {
        check_arity(self.n, other.n)?;
        let mut word = self.word.clone();
        word.extend(other.word.iter().cloned());
        Ok(FactoredAut {
            n: self.n,
            word,
            expansion: OnceLock::new(),
        })
    }

    pub fn expand(&self) -> Result<&PolyMap> {
        self.expansion
            .get_or_init(|| {
                let mut acc = PolyMap::identity(self.n);
                for factor in &self.word {
                    acc = acc.compose(&factor.expand()?)?;
                }
                Ok(acc)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Exact inverse: reversed word of inverted factors.
    pub fn inverse(&self) -> FactoredAut {
        FactoredAut {
            n: self.n,
            word: self.word.iter().rev().map(Factor::inverse).collect(),
            expansion: OnceLock::new(),
        }
    }

    /// Product of the factor determinants, which is the (constant) Jacobian
    /// determinant of the expansion.
    pub fn det(&self) -> Scalar {
        self.word.iter().map(Factor::det).product()
    }

    /// One factor per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str, n: usize) -> Result<FactoredAut> {
        let mut word = Vec::new();
        let mut offset = 0;
        for line in text.split('\n') {
            let at = offset;
            offset += line.len() + 1;
            let body = line.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            word.push(Factor::parse(line, n, at)?);
        }
        FactoredAut::from_factors(n, word)
    }
}

impl fmt::Display for FactoredAut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, factor) in self.word.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}

pub fn expand(w: &FactoredAut) -> Result<PolyMap> {
    w.expand().cloned()
}

/// Compares two automorphisms by their expansions.
pub fn equals(a: &FactoredAut, b: &FactoredAut) -> Result<bool> {
    check_arity(a.n(), b.n())?;
    Ok(a.expand()? == b.expand()?)
}

/// Default ansatz degree for inverses, `deg(sigma)^(n-1)`.
pub fn default_inverse_bound(sigma: &PolyMap) -> u32 {
    let d = sigma.degree().max(1);
    d.saturating_pow(sigma.n().saturating_sub(1) as u32)
}

/// Inverts a polynomial map by undetermined coefficients: finds `tau` with
/// `tau_i(sigma_1, ..., sigma_n) = x_i` among polynomials of degree at most
/// `deg_bound` (default [`default_inverse_bound`]), then checks both
/// compositions are the identity.
pub fn invert_map(sigma: &PolyMap, deg_bound: Option<u32>) -> Result<PolyMap> {
    let n = sigma.n();
    let det = sigma.jacobian_det();
    match det.constant_value() {
        Some(c) if !c.is_zero() => {}
        _ => {
            return Err(Error::JacobianNotConstant {
                det: det.to_string(),
            })
        }
    }
    let bound = deg_bound.unwrap_or_else(|| default_inverse_bound(sigma));
    let monomials = monomials_up_to(n, bound);

    // Columns are added one degree at a time. The components of sigma are
    // algebraically independent, so the first degree at which every x_i is
    // solvable already yields the unique inverse.
    let mut powers: HashMap<Monomial, Poly> = HashMap::with_capacity(monomials.len());
    let mut echelon: Echelon<Monomial> = Echelon::new();
    let targets: Vec<_> = (0..n).map(|i| poly_to_vec(&Poly::var(n, i))).collect();
    let mut solution = None;
    let mut next = 0;
    for d in 0..=bound {
        while next < monomials.len() && monomials[next].degree() == d {
            let m = &monomials[next];
            let value = match m.exponents().iter().position(|&e| e > 0) {
                None => Poly::one(n),
                Some(i) => {
                    let mut smaller = m.exponents().to_vec();
                    smaller[i] -= 1;
                    let p = &powers[&Monomial::new(smaller)] * &sigma.images[i];
                    crate::poly::check_size(&p)?;
                    p
                }
            };
            echelon.insert(poly_to_vec(&value));
            powers.insert(m.clone(), value);
            next += 1;
        }
        let combos: Option<Vec<_>> = targets.iter().map(|t| echelon.solve(t)).collect();
        if combos.is_some() {
            solution = combos;
            break;
        }
    }
    let combos = solution.ok_or(Error::NotInvertible { bound })?;
    let images = combos
        .into_iter()
        .map(|combo| {
            Poly::from_terms(
                n,
                combo
                    .into_iter()
                    .map(|(tag, c)| (monomials[tag].clone(), c)),
            )
        })
        .collect();
    let tau = PolyMap { images };
    if !sigma.compose(&tau)?.is_identity() || !tau.compose(sigma)?.is_identity() {
        return Err(Error::NotInvertible { bound });
    }
    Ok(tau)
}

fn poly_to_vec(p: &Poly) -> BTreeMap<Monomial, Scalar> {
    p.terms().map(|(m, c)| (m.clone(), c.clone())).collect()
}

/// All monomials in `n` variables of total degree at most `d`, ascending.
pub fn monomials_up_to(n: usize, d: u32) -> Vec<Monomial> {
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == cur.len() {
            out.push(Monomial::new(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(0, d, &mut vec![0; n], &mut out);
    out.sort();
    out
}

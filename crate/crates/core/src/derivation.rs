//! Derivations of the polynomial algebra, local nilpotency, and the
//! exponential map.
//!
//! A derivation is determined by the images of the variables; it acts on a
//! polynomial through the Leibniz rule `D(f) = sum_i D(x_i) * df/dx_i`.
//!
//! Local nilpotency is only semi-decidable, so [`check_locally_nilpotent`]
//! returns a three-valued verdict. A [`Nilpotency::Proven`] verdict records,
//! for every variable, the least `m_i` with `D^{m_i}(x_i) = 0`. By the
//! Leibniz rule `D^k(x^a) = 0` as soon as `k > sum_i a_i (m_i - 1)`, so these
//! orders certify nilpotency on the whole algebra and bound the length of
//! every exponential series.

use std::fmt;

use num_traits::{One, Zero};

use crate::automorphism::{Factor, FactoredAut};
use crate::error::{check_arity, Error, Result};
use crate::matrix::Matrix;
use crate::parse::{parse_poly, parse_var_token};
use crate::poly::{check_size, scalar, Monomial, Poly, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Derivation {
    images: Vec<Poly>,
}

impl Derivation {
    pub fn new(images: Vec<Poly>) -> Result<Self> {
        let n = images.len();
        for p in &images {
            check_arity(n, p.n())?;
        }
        Ok(Derivation { images })
    }

    pub fn zero(n: usize) -> Self {
        Derivation {
            images: vec![Poly::zero(n); n],
        }
    }

    /// The partial derivative `D_{i+1}`.
    pub fn partial(n: usize, i: usize) -> Self {
        Derivation::monomial(n, Scalar::one(), Monomial::one(n), i)
    }

    /// `c * x^m * D_{i+1}`.
    pub fn monomial(n: usize, c: Scalar, m: Monomial, i: usize) -> Self {
        let mut d = Derivation::zero(n);
        d.images[i] = Poly::monomial(n, c, m);
        d
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[Poly] {
        &self.images
    }

    pub fn image(&self, i: usize) -> &Poly {
        &self.images[i]
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(Poly::is_zero)
    }

    /// Largest total degree among the images.
    pub fn degree(&self) -> u32 {
        self.images.iter().map(Poly::degree).max().unwrap_or(0)
    }

    /// All terms as `(variable index, monomial, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, &Monomial, &Scalar)> + '_ {
        self.images
            .iter()
            .enumerate()
            .flat_map(|(i, p)| p.terms().map(move |(m, c)| (i, m, c)))
    }

    pub fn num_terms(&self) -> usize {
        self.images.iter().map(Poly::num_terms).sum()
    }

    pub fn apply(&self, f: &Poly) -> Result<Poly> {
        check_arity(self.n(), f.n())?;
        let mut acc = Poly::zero(self.n());
        for (i, image) in self.images.iter().enumerate() {
            if image.is_zero() || !f.involves(i) {
                continue;
            }
            acc = &acc + &(image * &f.partial(i)?);
        }
        Ok(acc)
    }

    /// `[self, other](x_i) = self(other(x_i)) - other(self(x_i))`.
    pub fn bracket(&self, other: &Derivation) -> Result<Derivation> {
        check_arity(self.n(), other.n())?;
        let images = (0..self.n())
            .map(|i| Ok(&self.apply(&other.images[i])? - &other.apply(&self.images[i])?))
            .collect::<Result<Vec<_>>>()?;
        Ok(Derivation { images })
    }

    pub fn try_add(&self, other: &Derivation) -> Result<Derivation> {
        check_arity(self.n(), other.n())?;
        Ok(Derivation {
            images: self
                .images
                .iter()
                .zip(&other.images)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, c: &Scalar) -> Derivation {
        Derivation {
            images: self.images.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// `f * D`.
    pub fn mul_poly(&self, f: &Poly) -> Result<Derivation> {
        check_arity(self.n(), f.n())?;
        Ok(Derivation {
            images: self.images.iter().map(|p| p * f).collect(),
        })
    }

    /// Parses one `D x<i> = <poly>` line per variable (`;` also separates
    /// lines). Variables without a line map to zero.
    pub fn parse(text: &str, n: usize) -> Result<Derivation> {
        let mut images = vec![Poly::zero(n); n];
        let mut offset = 0;
        for line in text.split(['\n', ';']) {
            let at = offset;
            offset += line.len() + 1;
            let body = line.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let rest = body
                .strip_prefix('D')
                .ok_or_else(|| Error::syntax(at, "expected 'D x<i> = <poly>'"))?;
            let (var, poly) = rest
                .split_once('=')
                .ok_or_else(|| Error::syntax(at, "expected '=' in derivation line"))?;
            let i = parse_var_token(var, n, at)?;
            let p = parse_poly(poly, n).map_err(|e| shift(e, at + line.find('=').unwrap() + 1))?;
            images[i - 1] = &images[i - 1] + &p;
        }
        Ok(Derivation { images })
    }
}

/// Moves a syntax error offset from a sub-slice into the enclosing text.
pub(crate) fn shift(e: Error, by: usize) -> Error {
    match e {
        Error::Syntax { offset, message } => Error::Syntax {
            offset: offset + by,
            message,
        },
        other => other,
    }
}

/// Derivation text format, one nonzero image per line.
impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "D x1 = 0");
        }
        let mut first = true;
        for (i, p) in self.images.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            if !first {
                writeln!(f)?;
            }
            first = false;
            write!(f, "D x{} = {p}", i + 1)?;
        }
        Ok(())
    }
}

pub fn derive(d: &Derivation, f: &Poly) -> Result<Poly> {
    d.apply(f)
}

pub fn commutator(p: &Derivation, q: &Derivation) -> Result<Derivation> {
    p.bracket(q)
}

pub fn kernel_member(d: &Derivation, f: &Poly) -> Result<bool> {
    Ok(d.apply(f)?.is_zero())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NilpotencyBounds {
    /// Maximum number of iterates computed per variable.
    pub iter: u32,
    /// Give up once an iterate exceeds this total degree.
    pub deg: u32,
}

impl Default for NilpotencyBounds {
    fn default() -> Self {
        NilpotencyBounds {
            iter: 64,
            deg: 10_000,
        }
    }
}

/// Sound reasons for rejecting local nilpotency.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Refutation {
    /// `D = c x^a D_i` with `a_i >= 1`: every iterate of `x_i` is a nonzero
    /// multiple of `x_i^{k(a_i - 1) + 1} x^{...}`.
    Monomial,
    /// Affine images whose linear part is not a nilpotent matrix.
    LinearPart,
}

impl fmt::Display for Refutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Refutation::Monomial => write!(f, "monomial criterion"),
            Refutation::LinearPart => write!(f, "linear part is not nilpotent"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Nilpotency {
    /// `orders[i]` is the least `m` with `D^m(x_{i+1}) = 0`.
    Proven(Vec<u32>),
    /// `witness` is the zero-based variable whose iterates never vanish.
    Disproven {
        witness: usize,
        reason: Refutation,
    },
    Unknown(NilpotencyBounds),
}

impl Nilpotency {
    pub fn is_proven(&self) -> bool {
        matches!(self, Nilpotency::Proven(_))
    }
}

impl fmt::Display for Nilpotency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Nilpotency::Proven(orders) => {
                let o: Vec<String> = orders.iter().map(u32::to_string).collect();
                write!(f, "proven orders=({})", o.join(","))
            }
            Nilpotency::Disproven { witness, reason } => {
                write!(f, "disproven witness=x{} reason={reason}", witness + 1)
            }
            Nilpotency::Unknown(b) => {
                write!(f, "unknown iter_bound={} deg_bound={}", b.iter, b.deg)
            }
        }
    }
}

pub fn check_locally_nilpotent(d: &Derivation, bounds: NilpotencyBounds) -> Nilpotency {
    let n = d.n();
    if let Some(witness) = monomial_refutation(d) {
        return Nilpotency::Disproven {
            witness,
            reason: Refutation::Monomial,
        };
    }
    if d.degree() <= 1 {
        if let Some(witness) = linear_refutation(d) {
            return Nilpotency::Disproven {
                witness,
                reason: Refutation::LinearPart,
            };
        }
    }
    let mut orders = Vec::with_capacity(n);
    for i in 0..n {
        match vanishing_order(d, i, bounds) {
            Some(m) => orders.push(m),
            None => return Nilpotency::Unknown(bounds),
        }
    }
    Nilpotency::Proven(orders)
}

fn vanishing_order(d: &Derivation, i: usize, bounds: NilpotencyBounds) -> Option<u32> {
    let mut g = Poly::var(d.n(), i);
    for k in 1..=bounds.iter {
        g = d.apply(&g).ok()?;
        if g.is_zero() {
            return Some(k);
        }
        if g.degree() > bounds.deg {
            return None;
        }
    }
    None
}

fn monomial_refutation(d: &Derivation) -> Option<usize> {
    let mut terms = d.terms();
    let (i, m, _) = terms.next()?;
    if terms.next().is_some() {
        return None;
    }
    (m.exponents()[i] >= 1).then_some(i)
}

/// With `D(x_i) = sum_j M[i][j] x_j + c_i`, the linear part of `D^k(x_i)` is
/// row `i` of `M^k`. A nonzero row of `M^n` lies in the invertible Fitting
/// component of `M`, so that generator is never annihilated.
fn linear_refutation(d: &Derivation) -> Option<usize> {
    let n = d.n();
    let mut m = Matrix::zero(n);
    for (i, image) in d.images.iter().enumerate() {
        for j in 0..n {
            m.set(i, j, image.coeff(&Monomial::var(n, j)));
        }
    }
    let power = m.pow(n as u32);
    (0..n).find(|&i| power.rows()[i].iter().any(|c| !c.is_zero()))
}

/// A derivation together with verified local nilpotency orders.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lnd {
    derivation: Derivation,
    orders: Vec<u32>,
}

impl Lnd {
    pub fn certify(d: Derivation, bounds: NilpotencyBounds) -> Result<Lnd> {
        match check_locally_nilpotent(&d, bounds) {
            Nilpotency::Proven(orders) => Ok(Lnd {
                derivation: d,
                orders,
            }),
            _ => Err(Error::UncertifiedInput),
        }
    }

    /// Accepts externally supplied orders after re-verifying them.
    pub fn with_orders(d: Derivation, orders: Vec<u32>) -> Result<Lnd> {
        if orders.len() != d.n() || !verify_orders(&d, &orders)? {
            return Err(Error::UncertifiedInput);
        }
        Ok(Lnd {
            derivation: d,
            orders,
        })
    }

    pub fn derivation(&self) -> &Derivation {
        &self.derivation
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn n(&self) -> usize {
        self.derivation.n()
    }

    /// `f * D` for `f` in the kernel. Since `D(f) = 0`,
    /// `(fD)^k(x_i) = f^k D^k(x_i)`, so the orders carry over unchanged.
    pub fn scale_by_kernel(&self, f: &Poly) -> Result<Lnd> {
        if !kernel_member(&self.derivation, f)? {
            return Err(Error::NotInKernel);
        }
        let orders = if f.is_zero() {
            vec![1; self.n()]
        } else {
            self.orders.clone()
        };
        Ok(Lnd {
            derivation: self.derivation.mul_poly(f)?,
            orders,
        })
    }

    /// Upper bound on the number of nonzero series terms for `f`.
    fn series_length(&self, f: &Poly) -> u64 {
        f.terms()
            .map(|(m, _)| {
                m.exponents()
                    .iter()
                    .zip(&self.orders)
                    .map(|(&a, &o)| a as u64 * (o as u64 - 1))
                    .sum::<u64>()
            })
            .max()
            .unwrap_or(0)
            + 1
    }
}

/// Checks `D^{m_i}(x_i) = 0` and `D^{m_i - 1}(x_i) != 0` by direct iteration.
pub fn verify_orders(d: &Derivation, orders: &[u32]) -> Result<bool> {
    for (i, &m) in orders.iter().enumerate() {
        if m == 0 {
            return Ok(false);
        }
        let mut g = Poly::var(d.n(), i);
        for _ in 1..m {
            g = d.apply(&g)?;
            if g.is_zero() {
                return Ok(false);
            }
        }
        if !d.apply(&g)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn scale_by_kernel(d: &Derivation, f: &Poly, bounds: NilpotencyBounds) -> Result<Lnd> {
    if !kernel_member(d, f)? {
        return Err(Error::NotInKernel);
    }
    Lnd::certify(d.clone(), bounds)?.scale_by_kernel(f)
}

/// `sum_k t^k D^k(f) / k!`, a finite sum by the certificate.
pub fn exp_apply(lnd: &Lnd, f: &Poly, t: &Scalar) -> Result<Poly> {
    check_arity(lnd.n(), f.n())?;
    if t.is_zero() {
        return Ok(f.clone());
    }
    let limit = lnd.series_length(f);
    let mut acc = f.clone();
    let mut term = f.clone();
    let mut k: u64 = 0;
    loop {
        term = lnd.derivation.apply(&term)?;
        if term.is_zero() {
            return Ok(acc);
        }
        k += 1;
        if k >= limit {
            // the orders were verified, so this is unreachable for a valid Lnd
            return Err(Error::UncertifiedInput);
        }
        term = term.scale(&(t / scalar(k as i64)));
        check_size(&term)?;
        acc = &acc + &term;
        check_size(&acc)?;
    }
}

/// The one-factor word `exp(tD)`.
pub fn exp_aut(lnd: &Lnd, t: Scalar) -> FactoredAut {
    FactoredAut::from_factors(lnd.n(), vec![Factor::exp(t, lnd.clone())])
        .expect("single factor has matching arity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ratio;

    fn p(s: &str, n: usize) -> Poly {
        parse_poly(s, n).unwrap()
    }

    fn d(s: &str, n: usize) -> Derivation {
        Derivation::parse(s, n).unwrap()
    }

    fn nagata_base() -> Derivation {
        d("D x1 = -2*x2; D x2 = x3", 3)
    }

    #[test]
    fn derive_examples() {
        assert!(derive(&nagata_base(), &p("x3*x1 + x2^2", 3))
            .unwrap()
            .is_zero());
        assert_eq!(
            derive(&Derivation::partial(1, 0), &p("x1^2", 1)).unwrap(),
            p("2*x1", 1)
        );
        assert_eq!(
            derive(&d("D x1 = x2", 2), &p("x1*x2", 2)).unwrap(),
            p("x2^2", 2)
        );
        assert!(derive(&d("D x1 = x2", 2), &p("x1", 3)).is_err());
    }

    #[test]
    fn commutator_examples() {
        let d1 = Derivation::partial(2, 0);
        let d2 = Derivation::partial(2, 1);
        assert!(commutator(&d1, &d2).unwrap().is_zero());
        assert_eq!(commutator(&d1, &d("D x2 = x1", 2)).unwrap(), d2);
        assert_eq!(
            commutator(&d("D x1 = x2", 2), &d("D x2 = x1", 2)).unwrap(),
            d("D x1 = -x1; D x2 = x2", 2)
        );
    }

    #[test]
    fn nilpotency_verdicts() {
        let b = NilpotencyBounds { iter: 10, deg: 100 };
        assert_eq!(
            check_locally_nilpotent(&d("D x1 = x2", 2), b),
            Nilpotency::Proven(vec![2, 1])
        );
        assert_eq!(
            check_locally_nilpotent(&nagata_base(), NilpotencyBounds::default()),
            Nilpotency::Proven(vec![3, 2, 1])
        );
        assert_eq!(
            check_locally_nilpotent(&d("D x1 = x1", 1), b),
            Nilpotency::Disproven {
                witness: 0,
                reason: Refutation::Monomial
            }
        );
        assert_eq!(
            check_locally_nilpotent(&d("D x1 = 3*x1^2*x2", 2), b),
            Nilpotency::Disproven {
                witness: 0,
                reason: Refutation::Monomial
            }
        );
    }

    #[test]
    fn linear_refutation_fires_on_rotation() {
        // x2 D1 - x1 D2 has linear part [[0,1],[-1,0]], not nilpotent
        let rot = d("D x1 = x2; D x2 = -x1", 2);
        assert!(matches!(
            check_locally_nilpotent(&rot, NilpotencyBounds::default()),
            Nilpotency::Disproven {
                reason: Refutation::LinearPart,
                ..
            }
        ));
        // affine with nilpotent linear part is fine
        assert_eq!(
            check_locally_nilpotent(
                &d("D x1 = x2 + 1; D x2 = 5", 2),
                NilpotencyBounds::default()
            ),
            Nilpotency::Proven(vec![3, 2])
        );
    }

    #[test]
    fn unknown_when_bounds_run_out() {
        // x2^2 D1 + x1 D2 is not locally nilpotent and escapes both criteria
        let wild = d("D x1 = x2^2; D x2 = x1", 2);
        let b = NilpotencyBounds { iter: 8, deg: 20 };
        assert_eq!(check_locally_nilpotent(&wild, b), Nilpotency::Unknown(b));
    }

    #[test]
    fn kernel_membership() {
        assert!(kernel_member(&nagata_base(), &p("x3*x1 + x2^2", 3)).unwrap());
        assert!(!kernel_member(&Derivation::partial(1, 0), &p("x1", 1)).unwrap());
        assert!(kernel_member(&nagata_base(), &p("17/3", 3)).unwrap());
    }

    #[test]
    fn scaling_by_kernel_elements() {
        let b = NilpotencyBounds::default();
        let f = p("x3*x1 + x2^2", 3);
        let scaled = scale_by_kernel(&nagata_base(), &f, b).unwrap();
        assert_eq!(scaled.orders(), &[3, 2, 1]);
        assert_eq!(scaled.derivation(), &nagata_base().mul_poly(&f).unwrap());
        assert!(verify_orders(scaled.derivation(), scaled.orders()).unwrap());

        let x2d1 = scale_by_kernel(&Derivation::partial(2, 0), &p("x2", 2), b).unwrap();
        assert_eq!(x2d1.derivation(), &d("D x1 = x2", 2));

        assert_eq!(
            scale_by_kernel(&Derivation::partial(1, 0), &p("x1", 1), b),
            Err(Error::NotInKernel)
        );
        assert_eq!(
            scale_by_kernel(&d("D x1 = x1", 1), &p("1", 1), b),
            Err(Error::UncertifiedInput)
        );
    }

    #[test]
    fn exp_series() {
        let b = NilpotencyBounds::default();
        let lnd = Lnd::certify(d("D x1 = x2", 2), b).unwrap();
        let t = ratio(3, 7);
        assert_eq!(
            exp_apply(&lnd, &p("x1", 2), &t).unwrap(),
            p("x1 + 3/7*x2", 2)
        );
        let f = p("x1^3 - x2", 2);
        assert_eq!(exp_apply(&lnd, &f, &scalar(0)).unwrap(), f);

        let nagata = scale_by_kernel(&nagata_base(), &p("x3*x1 + x2^2", 3), b).unwrap();
        assert_eq!(
            exp_apply(&nagata, &p("x2", 3), &scalar(1)).unwrap(),
            p("x2 + x3*(x3*x1 + x2^2)", 3)
        );
    }

    #[test]
    fn forged_orders_are_rejected() {
        assert_eq!(
            Lnd::with_orders(d("D x1 = x2", 2), vec![1, 1]),
            Err(Error::UncertifiedInput)
        );
        assert_eq!(
            Lnd::with_orders(d("D x1 = x2", 2), vec![3, 1]),
            Err(Error::UncertifiedInput)
        );
        assert!(Lnd::with_orders(d("D x1 = x2", 2), vec![2, 1]).is_ok());
    }

    #[test]
    fn text_format() {
        let nd = nagata_base();
        assert_eq!(nd.to_string(), "D x1 = -2*x2\nD x2 = x3");
        assert_eq!(Derivation::parse(&nd.to_string(), 3).unwrap(), nd);
        assert_eq!(Derivation::zero(2).to_string(), "D x1 = 0");
        assert!(Derivation::parse("D x4 = 1", 3).is_err());
        assert!(matches!(
            Derivation::parse("D x1 = 2x2", 2),
            Err(Error::Syntax { offset: 8, .. })
        ));
    }
}

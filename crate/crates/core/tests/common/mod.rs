//! Seeded random generators shared by the integration tests.

#![allow(dead_code)]

use cremona::automorphism::{Factor, FactoredAut};
use cremona::derivation::{Derivation, Lnd, NilpotencyBounds};
use cremona::matrix::Matrix;
use cremona::poly::{ratio, scalar, Monomial, Poly, Scalar};
use cremona::tame::elementary;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Small nonzero rational with numerator in [-5, 5] and denominator in [1, 3].
pub fn coeff(rng: &mut impl Rng) -> Scalar {
    let mut num = 0;
    while num == 0 {
        num = rng.gen_range(-5..=5);
    }
    ratio(num, rng.gen_range(1..=3))
}

/// Random polynomial in the variables listed in `vars`, total degree at most
/// `max_deg`, with at most `max_terms` terms.
pub fn poly_in(
    rng: &mut impl Rng,
    n: usize,
    vars: &[usize],
    max_deg: u32,
    max_terms: usize,
) -> Poly {
    let count = rng.gen_range(1..=max_terms.max(1));
    let terms = (0..count).map(|_| {
        let mut exps = vec![0u32; n];
        if !vars.is_empty() {
            let deg = rng.gen_range(0..=max_deg);
            for _ in 0..deg {
                exps[*vars.choose(rng).unwrap()] += 1;
            }
        }
        (Monomial::new(exps), coeff(rng))
    });
    Poly::from_terms(n, terms.collect::<Vec<_>>())
}

pub fn poly(rng: &mut impl Rng, n: usize, max_deg: u32, max_terms: usize) -> Poly {
    let vars: Vec<usize> = (0..n).collect();
    poly_in(rng, n, &vars, max_deg, max_terms)
}

/// A triangular derivation: `D x_i` depends only on `x_{i+1}, ..., x_n`,
/// under a random permutation of the variables.
pub fn triangular_derivation(
    rng: &mut impl Rng,
    n: usize,
    max_deg: u32,
    max_terms: usize,
) -> Derivation {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut images = vec![Poly::zero(n); n];
    for (pos, &i) in order.iter().enumerate() {
        if rng.gen_bool(0.2) {
            continue;
        }
        images[i] = poly_in(rng, n, &order[pos + 1..], max_deg, max_terms);
    }
    Derivation::new(images).unwrap()
}

pub fn triangular_lnd(rng: &mut impl Rng, n: usize, max_deg: u32, max_terms: usize) -> Lnd {
    let d = triangular_derivation(rng, n, max_deg, max_terms);
    Lnd::certify(d, NilpotencyBounds::default()).expect("triangular derivations are nilpotent")
}

/// An invertible integer matrix with small entries.
pub fn invertible_matrix(rng: &mut impl Rng, n: usize) -> Matrix {
    loop {
        let rows = (0..n)
            .map(|_| (0..n).map(|_| scalar(rng.gen_range(-2..=2))).collect())
            .collect();
        let m = Matrix::new(rows);
        if !m.det().is_zero() {
            return m;
        }
    }
}

pub fn translation(rng: &mut impl Rng, n: usize) -> Factor {
    Factor::translation((0..n).map(|_| coeff(rng)).collect())
}

/// Random tame factor: affine, elementary `exp(f D_i)` or a triangular
/// exponential. The degree of any elementary coefficient is at most
/// `max_deg`.
pub fn tame_factor(rng: &mut impl Rng, n: usize, max_deg: u32, max_terms: usize) -> Factor {
    match rng.gen_range(0..4) {
        0 => Factor::linear(invertible_matrix(rng, n)).unwrap(),
        1 => translation(rng, n),
        2 => {
            let i = rng.gen_range(0..n);
            let others: Vec<usize> = (0..n).filter(|&v| v != i).collect();
            let f = poly_in(rng, n, &others, max_deg, max_terms);
            elementary(n, i, f).unwrap()
        }
        _ => Factor::exp(
            coeff(rng),
            triangular_lnd(rng, n, max_deg.min(2), max_terms),
        ),
    }
}

pub fn tame_word(
    rng: &mut impl Rng,
    n: usize,
    len: usize,
    max_deg: u32,
    max_terms: usize,
) -> FactoredAut {
    let word = (0..len)
        .map(|_| tame_factor(rng, n, max_deg, max_terms))
        .collect();
    FactoredAut::from_factors(n, word).unwrap()
}

/// A plane tame word whose expansion has degree at most `max_total`:
/// elementary factors alternate direction and are separated by affine ones.
pub fn plane_word(rng: &mut impl Rng, max_total: u32) -> FactoredAut {
    let n = 2;
    let mut word = vec![Factor::linear(invertible_matrix(rng, n)).unwrap()];
    let mut total = 1u32;
    let mut direction = rng.gen_range(0..2);
    for _ in 0..rng.gen_range(1..=3) {
        let budget = max_total / total;
        if budget < 2 {
            break;
        }
        let deg = rng.gen_range(2..=budget.min(5));
        let other = 1 - direction;
        let mut f = poly_in(rng, n, &[other], deg - 1, 2);
        let mut e = vec![0; n];
        e[other] = deg;
        f = &f + &Poly::monomial(n, coeff(rng), Monomial::new(e));
        word.push(elementary(n, direction, f).unwrap());
        total *= deg;
        if rng.gen_bool(0.5) {
            word.push(Factor::linear(invertible_matrix(rng, n)).unwrap());
        } else {
            direction = other;
        }
        if rng.gen_bool(0.3) {
            word.push(translation(rng, n));
        }
    }
    FactoredAut::from_factors(n, word).unwrap()
}

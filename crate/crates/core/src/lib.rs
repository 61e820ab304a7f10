//! Exact computations in the affine Cremona group.
//!
//! Polynomials live in `Q[x1, ..., xn]` ([`poly`]). On top of them the crate
//! builds derivations and their exponentials ([`derivation`]), polynomial
//! maps and factored automorphisms ([`automorphism`]), the diagonal torus and
//! its root vectors ([`torus`]), the classical tame generator families
//! ([`tame`]) and bounded Lie-algebra closures ([`lie`]).
//!
//! All arithmetic is exact over the rationals.

pub mod automorphism;
pub mod derivation;
pub mod error;
pub mod lie;
pub mod linalg;
pub mod matrix;
pub mod parse;
pub mod poly;
pub mod tame;
pub mod torus;

pub use automorphism::{
    equals, expand, invert_map, is_volume_preserving, jacobian_det, Factor, FactoredAut, PolyMap,
};
pub use derivation::{
    check_locally_nilpotent, commutator, derive, exp_apply, exp_aut, kernel_member,
    scale_by_kernel, Derivation, Lnd, Nilpotency, NilpotencyBounds, Refutation,
};
pub use error::{Error, Result};
pub use lie::{
    lie_closure, lie_closure_of, span_reduce, Closure, ClosureBounds, DerivationSpan, Exceeded,
};
pub use matrix::Matrix;
pub use parse::{parse_poly, parse_scalar};
pub use poly::{format_poly, Monomial, Poly, Scalar};
pub use tame::{
    classify_word, elementary, jung_vdk_decompose, mk_family, nagata, sl_decompose, transvection,
    Family, GenerationKind,
};
pub use torus::{
    conj_by_torus, enumerate_monomial_root_vectors, is_root_vector, weight_decompose, RootVector,
    TorusElement, Weight,
};

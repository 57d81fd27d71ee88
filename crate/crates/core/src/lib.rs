//! Realizing small Seifert fibered spaces by non-integer surgery on torus knots and their
//! cables, certified with changemaker lattices.

pub mod changemaker;
pub mod error;
pub mod exact;
pub mod kirby;
pub mod knots;
pub mod lattice;
pub mod plumbing;
pub mod realize;
pub mod verify;
mod linalg;

pub use error::{Error, Result};
pub use exact::{neg_cf_eval, neg_cf_expand, CfForm, NegCf, Rational};

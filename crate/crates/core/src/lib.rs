//! Exact Pontryagin-product calculus on zero-cycles of abelian varieties,
//! relation certificates, tangent-space condition checkers and threshold
//! arithmetic. All arithmetic is over arbitrary-precision rationals.

pub mod bounds;
pub mod cycle;
pub mod error;
pub mod identities;
pub mod linalg;
pub mod rational;
pub mod relation;
pub mod tangent;

pub use cycle::{Cycle, GroupPoint, RingContext};
pub use error::{Error, Result};
pub use rational::Rational;

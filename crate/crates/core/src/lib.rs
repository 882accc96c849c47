//! Critical bases for unique expansions in non-integer bases over the
//! ternary alphabets `{0, 1, m}`, `1 < m <= 2`.
//!
//! * [`words`]: eventually periodic words, the substitutions `L`, `M`, `R`,
//!   orbit extremes and desubstitution.
//! * [`numerics`]: `π_β`, the solvers for `f_u(m)`, `g_u(m)`, `μ_u` and the
//!   closed-form identities.
//! * [`critical`]: the descent computing the generalised golden ratio `G(m)`
//!   and the critical base `L(m)` for uncountably many binary unique
//!   expansions.
//! * [`uniqueness`]: the two-hole uniqueness test and pair certificates.
//! * [`cli`]: the `critbase` command line.

pub mod cli;
pub mod critical;
pub mod error;
pub mod numerics;
pub mod uniqueness;
pub mod words;

pub use error::{Error, Result};
pub use numerics::{Valuation, DEFAULT_TAU, DEFAULT_TOL};
pub use words::{Directive, EpWord, FiniteWord, Morphism, Subst};

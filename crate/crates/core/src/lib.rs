//! Exact evaluation of complete character sums modulo powers of two,
//!
//! ```text
//! S = sum_{x=1}^{2^m} chi1(x) chi2(A x^k + B),
//! ```
//!
//! by a closed form that costs `O(poly(m))`, together with the `O(2^m)`
//! brute-force sum it is checked against. Both produce values in the
//! cyclotomic ring `Z[zeta_{2^r}]`, so comparisons are exact.

pub mod characters;
pub mod cli;
mod coeffs;
pub mod cyclotomic;
pub mod error;
pub mod evaluator;
pub mod instance;
pub mod oracle;
pub mod ring2adic;
pub mod sweep;

pub use characters::Character;
pub use cyclotomic::CycInt;
pub use error::{Error, Result, MAX_MODULUS_EXP};
pub use evaluator::{evaluate, CaseTag, ClosedForm};
pub use instance::{SumInstance, SumProblem};
pub use oracle::brute_force;

//! Exact arithmetic engine for the Fibonacci-Lucas convolution identity
//! `(n-1) F(n) = sum_{k=1}^{n-1} L(k) F(n-k)` and its analogues.
//!
//! - [`sequences`]: Fibonacci, Lucas and general linear recurrences.
//! - [`expansion`]: repeated substitution and coefficient collection.
//! - [`verify`]: range checks of the identity and replay of its inductive proof.
//! - [`conjecture`]: discovery and brute-force verification for other recurrences.
//! - [`dsl`]: the text format for recurrence specs.
//! - [`cli`]: the `fibconv` command line.

pub mod cli;
pub mod conjecture;
pub mod dsl;
pub mod error;
pub mod expansion;
pub mod output;
pub mod sequences;
pub mod verify;

pub use conjecture::{
    collect_general, conjecture, detect_min_recurrence, verify_conjecture, ConjectureStatus,
    ConjecturedIdentity, Recurrence,
};
pub use dsl::{format, parse, ParseError, SpecSource};
pub use error::{Error, Result};
pub use expansion::{
    expansion, initial_form, substitute_min_shift, sum_expansions, validate_form, CollectedWeights,
    LinearForm,
};
pub use num_bigint::BigInt;
pub use sequences::{eval_range, eval_term, extend_backward, fib, lucas, SequenceSpec};
pub use verify::{
    check_identity, check_range, convolution_sum, inductive_step_check, weights_are_lucas,
    IdentityReport, IdentityVerifier, Status,
};

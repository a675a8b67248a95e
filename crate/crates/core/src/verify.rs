//! Checks of `(n-1) F(n) = sum_{k=1}^{n-1} L(k) F(n-k)` and numeric replay of
//! its inductive proof.

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expansion::CollectedWeights;
use crate::sequences::{eval_range, eval_term, fib, lucas, SequenceSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// A failing index with both sides in full.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub n: i64,
    #[serde(serialize_with = "crate::output::decimal")]
    pub lhs: BigInt,
    #[serde(serialize_with = "crate::output::decimal")]
    pub rhs: BigInt,
}

impl Failure {
    /// `rhs - lhs`.
    pub fn difference(&self) -> BigInt {
        &self.rhs - &self.lhs
    }
}

/// Outcome of checking an identity over `lo..=hi`. `status` is `Pass`
/// exactly when `first_failure` is `None`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub lo: i64,
    pub hi: i64,
    pub status: Status,
    pub first_failure: Option<Failure>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl IdentityReport {
    pub(crate) fn from_outcome(
        lo: i64,
        hi: i64,
        first_failure: Option<Failure>,
        started: Instant,
    ) -> Self {
        Self {
            lo,
            hi,
            status: if first_failure.is_some() {
                Status::Fail
            } else {
                Status::Pass
            },
            first_failure,
            elapsed: started.elapsed(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// One row of a range check: `S(n)` against `(n-1) F(n)`, plus the result of
/// dividing `S(n)` by `n-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub n: i64,
    pub sum: BigInt,
    pub scaled: BigInt,
    /// `S(n) / (n-1)` when the division is exact.
    pub quotient: Option<BigInt>,
    pub term: BigInt,
}

impl Row {
    fn new(n: i64, sum: BigInt, term: BigInt) -> Self {
        let m = BigInt::from(n - 1);
        let (q, r) = sum.div_rem(&m);
        Self {
            n,
            scaled: &m * &term,
            quotient: r.is_zero().then_some(q),
            sum,
            term,
        }
    }

    /// Multiplied form and division form both hold.
    pub fn passed(&self) -> bool {
        self.sum == self.scaled && self.quotient.as_ref() == Some(&self.term)
    }

    fn failure(&self) -> Failure {
        Failure {
            n: self.n,
            lhs: self.scaled.clone(),
            rhs: self.sum.clone(),
        }
    }
}

/// Verifier over a pair of sequences playing the roles of `F` and `L`.
/// [`IdentityVerifier::standard`] is the Fibonacci/Lucas pair; other pairs
/// exist to exercise failure reporting.
#[derive(Debug, Clone)]
pub struct IdentityVerifier {
    fib: SequenceSpec,
    lucas: SequenceSpec,
    jobs: Option<usize>,
}

impl Default for IdentityVerifier {
    fn default() -> Self {
        Self::standard()
    }
}

impl IdentityVerifier {
    pub fn standard() -> Self {
        Self::new(SequenceSpec::fibonacci(), SequenceSpec::lucas())
    }

    pub fn new(fib: SequenceSpec, lucas: SequenceSpec) -> Self {
        Self {
            fib,
            lucas,
            jobs: None,
        }
    }

    /// Caps worker threads for range checks; `None` uses the global pool.
    pub fn with_jobs(mut self, jobs: Option<usize>) -> Self {
        self.jobs = jobs;
        self
    }

    fn is_standard(&self) -> bool {
        self.fib == SequenceSpec::fibonacci() && self.lucas == SequenceSpec::lucas()
    }

    fn fib_at(&self, n: i64) -> Result<BigInt> {
        if self.is_standard() {
            fib(n)
        } else {
            eval_term(&self.fib, n)
        }
    }

    fn lucas_at(&self, n: i64) -> Result<BigInt> {
        if self.is_standard() {
            lucas(n)
        } else {
            eval_term(&self.lucas, n)
        }
    }

    /// `S(n) = sum_{k=1}^{n-1} L(k) F(n-k)` by direct summation.
    pub fn convolution_sum(&self, n: i64) -> Result<BigInt> {
        if n < 2 {
            return Err(Error::IndexTooSmall { min: 2, got: n });
        }
        let tables = Tables::new(self, n)?;
        Ok(tables.sum(n))
    }

    /// Checks one index against both the multiplied and the division form.
    pub fn check_identity(&self, n: i64) -> Result<IdentityReport> {
        let started = Instant::now();
        let row = Row::new(n, self.convolution_sum(n)?, self.fib_at(n)?);
        let failure = (!row.passed()).then(|| row.failure());
        Ok(IdentityReport::from_outcome(n, n, failure, started))
    }

    /// Per-index rows for `lo..=hi`, in order. Sequence tables are built once.
    pub fn rows(&self, lo: i64, hi: i64) -> Result<Vec<Row>> {
        if lo < 2 || lo > hi {
            return Err(Error::InvalidRange { lo, hi });
        }
        let tables = Tables::new(self, hi)?;
        let row = |n: i64| Row::new(n, tables.sum(n), tables.fib(n).clone());
        Ok(self.in_pool(|| (lo..=hi).into_par_iter().map(row).collect()))
    }

    /// Checks every index in `lo..=hi`; the reported failure is the least
    /// failing `n` regardless of scheduling.
    pub fn check_range(&self, lo: i64, hi: i64) -> Result<IdentityReport> {
        let started = Instant::now();
        if lo < 2 || lo > hi {
            return Err(Error::InvalidRange { lo, hi });
        }
        let tables = Tables::new(self, hi)?;
        let failure = self.in_pool(|| {
            (lo..=hi).into_par_iter().find_map_first(|n| {
                let row = Row::new(n, tables.sum(n), tables.fib(n).clone());
                (!row.passed()).then(|| row.failure())
            })
        });
        Ok(IdentityReport::from_outcome(lo, hi, failure, started))
    }

    /// Replays the inductive step at `m`: `S(m+1)` equals both
    /// `F(m) + S(m) + L(0) F(m-1) + S(m-1)` and `m F(m+1)`.
    pub fn inductive_step_check(&self, m: i64) -> Result<bool> {
        if m < 3 {
            return Err(Error::IndexTooSmall { min: 3, got: m });
        }
        let t = Tables::new(self, m + 1)?;
        let next = t.sum(m + 1);
        let decomposed = t.fib(m) + t.sum(m) + self.lucas_at(0)? * t.fib(m - 1) + t.sum(m - 1);
        Ok(next == decomposed && next == BigInt::from(m) * t.fib(m + 1))
    }

    /// The two reindexings used by the inductive step, each checked by
    /// evaluating both summations:
    /// `sum_{k=2}^{m} L(k) F(m+1-k) = sum_{j=1}^{m-1} L(j+1) F(m-j)` and
    /// `sum_{j=1}^{m-1} L(j-1) F(m-j) = sum_{i=0}^{m-2} L(i) F(m-1-i)`.
    pub fn reindexing_check(&self, m: i64) -> Result<bool> {
        if m < 2 {
            return Err(Error::IndexTooSmall { min: 2, got: m });
        }
        let t = Tables::new(self, m + 1)?;
        let by_k: BigInt = (2..=m).map(|k| t.lucas(k) * t.fib(m + 1 - k)).sum();
        let by_j: BigInt = (1..m).map(|j| t.lucas(j + 1) * t.fib(m - j)).sum();
        let shifted_j: BigInt = (1..m).map(|j| t.lucas(j - 1) * t.fib(m - j)).sum();
        let by_i: BigInt = (0..=m - 2).map(|i| t.lucas(i) * t.fib(m - 1 - i)).sum();
        Ok(by_k == by_j && shifted_j == by_i)
    }

    fn in_pool<T: Send>(&self, work: impl FnOnce() -> T + Send) -> T {
        match self.jobs {
            Some(jobs) => rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .expect("failed to build worker pool")
                .install(work),
            None => work(),
        }
    }
}

/// `F(0..=hi)` and `L(0..=hi)` evaluated once.
struct Tables {
    fib: Vec<BigInt>,
    lucas: Vec<BigInt>,
}

impl Tables {
    fn new(v: &IdentityVerifier, hi: i64) -> Result<Self> {
        Ok(Self {
            fib: eval_range(&v.fib, 0, hi)?,
            lucas: eval_range(&v.lucas, 0, hi)?,
        })
    }

    fn fib(&self, n: i64) -> &BigInt {
        &self.fib[n as usize]
    }

    fn lucas(&self, n: i64) -> &BigInt {
        &self.lucas[n as usize]
    }

    fn sum(&self, n: i64) -> BigInt {
        (1..n).map(|k| self.lucas(k) * self.fib(n - k)).sum()
    }
}

/// `S(n)` for the Fibonacci/Lucas pair.
pub fn convolution_sum(n: i64) -> Result<BigInt> {
    IdentityVerifier::standard().convolution_sum(n)
}

pub fn check_identity(n: i64) -> Result<IdentityReport> {
    IdentityVerifier::standard().check_identity(n)
}

pub fn check_range(lo: i64, hi: i64) -> Result<IdentityReport> {
    IdentityVerifier::standard().check_range(lo, hi)
}

pub fn inductive_step_check(m: i64) -> Result<bool> {
    IdentityVerifier::standard().inductive_step_check(m)
}

pub fn reindexing_check(m: i64) -> Result<bool> {
    IdentityVerifier::standard().reindexing_check(m)
}

/// True iff the collected weights are `L(1), ..., L(n-1)`.
pub fn weights_are_lucas(w: &CollectedWeights) -> bool {
    let expected = (w.n() - 1).max(0) as usize;
    w.weights().len() == expected
        && w.weights()
            .iter()
            .zip(1i64..)
            .all(|(a, k)| lucas(k).is_ok_and(|l| *a == l))
}

//! Expand-collect-sum on arbitrary recurrences, with data-driven discovery of
//! the weight and residual sequences and a brute-force check of the result.
//!
//! For a spec `U` the summed expansions give
//!
//! ```text
//! (n-1) U(n) = sum_{k=1}^{n-1} a(k) U(n-k) + sum_j r_j(n) U(-j)
//! ```
//!
//! where the residual coefficients `r_j(n)` multiply values at or below
//! index 0. Both `a` and each `r_j` are fitted with a minimal constant
//! coefficient recurrence, and the resulting identity is re-checked by direct
//! evaluation that never touches the expansion engine.

use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expansion::{sum_expansions, CollectedWeights};
use crate::sequences::{eval_range, SequenceSpec};
use crate::verify::{Failure, IdentityReport};

/// Default cap on detected recurrence orders.
pub const DEFAULT_MAX_ORDER: usize = 8;

/// `v(i) = coeffs[0] v(i-1) + ... + coeffs[order-1] v(i-order)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recurrence {
    pub coeffs: Vec<BigRational>,
}

impl Recurrence {
    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficients as integers when all of them are integral.
    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    /// Whether `values` satisfies the recurrence at every position `>= order`.
    pub fn fits(&self, values: &[BigInt]) -> bool {
        let r = self.order();
        (r..values.len()).all(|i| {
            let predicted: BigRational = self
                .coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| c * BigRational::from_integer(values[i - 1 - j].clone()))
                .sum();
            predicted == BigRational::from_integer(values[i].clone())
        })
    }

    /// Renders as `name(i) = c1*name(i-1) + ...`.
    pub fn render(&self, name: &str) -> String {
        let mut out = format!("{name}(i) =");
        if self.coeffs.is_empty() {
            out.push_str(" 0");
        }
        for (j, c) in self.coeffs.iter().enumerate() {
            out.push_str(match (j, c.is_negative()) {
                (0, false) => " ",
                (0, true) => " -",
                (_, false) => " + ",
                (_, true) => " - ",
            });
            let mag = c.abs();
            if !mag.is_one() {
                out.push_str(&format!("{mag}*"));
            }
            out.push_str(&format!("{name}(i-{})", j + 1));
        }
        out
    }
}

impl fmt::Display for Recurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("v"))
    }
}

/// Least-order recurrence satisfied by `values` at every applicable position,
/// found by exact elimination. `values` must hold at least `2*max_order + 1`
/// entries so any fitted order is confirmed by at least one extra equation.
pub fn detect_min_recurrence(values: &[BigInt], max_order: usize) -> Result<Option<Recurrence>> {
    let needed = 2 * max_order + 1;
    if values.len() < needed {
        return Err(Error::InsufficientData {
            needed,
            got: values.len(),
        });
    }
    Ok((0..=max_order).find_map(|order| fit_order(values, order)))
}

/// Solves `sum_j c_j v(i-j) = v(i)` for `i = order..len` and returns a
/// solution if the system is consistent. Free unknowns are set to zero.
fn fit_order(values: &[BigInt], order: usize) -> Option<Recurrence> {
    if order == 0 {
        return values
            .iter()
            .all(Zero::is_zero)
            .then(|| Recurrence { coeffs: Vec::new() });
    }
    let q = |v: &BigInt| BigRational::from_integer(v.clone());
    let mut rows: Vec<Vec<BigRational>> = (order..values.len())
        .map(|i| {
            let mut row: Vec<_> = (1..=order).map(|j| q(&values[i - j])).collect();
            row.push(q(&values[i]));
            row
        })
        .collect();

    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..order {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].recip();
        for x in rows[rank].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                *x -= &factor * p;
            }
        }
        pivots.push(col);
        rank += 1;
    }
    // an all-zero row with a nonzero right-hand side means no solution
    if rows[rank..].iter().any(|row| !row[order].is_zero()) {
        return None;
    }
    let mut coeffs = vec![BigRational::zero(); order];
    for (r, &col) in pivots.iter().enumerate() {
        coeffs[col] = rows[r][order].clone();
    }
    let rec = Recurrence { coeffs };
    debug_assert!(rec.fits(values));
    Some(rec)
}

/// An integer sequence indexed from `start`: the listed initial values,
/// continued by a recurrence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedSequence {
    pub start: i64,
    pub initial: Vec<BigInt>,
    pub recurrence: Recurrence,
}

impl GeneratedSequence {
    /// Values at `start..=hi` (empty when `hi < start`).
    pub fn values_to(&self, hi: i64) -> Result<Vec<BigInt>> {
        let len = usize::try_from(hi - self.start + 1).unwrap_or(0);
        let mut out: Vec<BigInt> = self.initial.iter().take(len).cloned().collect();
        let r = self.recurrence.order();
        while out.len() < len {
            let i = out.len();
            let next: BigRational = if i < r {
                BigRational::zero()
            } else {
                self.recurrence
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(j, c)| c * BigRational::from_integer(out[i - 1 - j].clone()))
                    .sum()
            };
            if !next.is_integer() {
                return Err(Error::NonIntegral {
                    name: "generated".into(),
                    index: self.start + i as i64,
                });
            }
            out.push(next.to_integer());
        }
        Ok(out)
    }

    pub fn term(&self, i: i64) -> Result<BigInt> {
        if i < self.start {
            return Err(Error::IndexTooSmall {
                min: self.start,
                got: i,
            });
        }
        Ok(self.values_to(i)?.pop().expect("nonempty"))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "start": self.start,
            "initial": self.initial.iter().map(ToString::to_string).collect::<Vec<_>>(),
            "recurrence": self.recurrence.coeffs.iter().map(ToString::to_string).collect::<Vec<_>>(),
        })
    }

    /// Number of leading values listed before the recurrence takes over
    /// beyond its own seeds.
    pub fn irregular_prefix(&self) -> usize {
        self.initial.len() - self.recurrence.order()
    }
}

/// Fits `values` (indexed from `start`) with a minimal recurrence, allowing a
/// short irregular prefix when no recurrence covers the whole list.
fn detect_sequence(values: &[BigInt], start: i64, max_order: usize) -> Option<GeneratedSequence> {
    let needed = 2 * max_order + 1;
    (0..=max_order)
        .take_while(|&skip| values.len() >= skip + needed)
        .find_map(|skip| {
            let rec = detect_min_recurrence(&values[skip..], max_order).ok()??;
            Some(GeneratedSequence {
                start,
                initial: values[..skip + rec.order()].to_vec(),
                recurrence: rec,
            })
        })
}

/// Residual coefficients multiplying `U(-offset)`, as a sequence in `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidualTerm {
    pub offset: usize,
    pub coefficients: GeneratedSequence,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConjectureStatus {
    Verified,
    Refuted { n: i64 },
    Undetermined { reason: String },
}

/// A discovered identity together with how far it was checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjecturedIdentity {
    pub spec: SequenceSpec,
    /// `a(k)` indexed from `k = 1`.
    pub weights: Option<GeneratedSequence>,
    pub residual: Vec<ResidualTerm>,
    pub verified_range: Option<(i64, i64)>,
    pub status: ConjectureStatus,
    pub report: Option<IdentityReport>,
}

impl ConjecturedIdentity {
    pub fn is_verified(&self) -> bool {
        self.status == ConjectureStatus::Verified
    }

    /// True when every residual term multiplies a zero sequence value, so the
    /// identity reduces to the weighted sum alone.
    pub fn residual_vanishes(&self) -> Result<bool> {
        for term in &self.residual {
            let index = -(term.offset as i64);
            if !eval_range(&self.spec, index, index)?[0].is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn status_word(&self) -> &'static str {
        match self.status {
            ConjectureStatus::Verified => "verified",
            ConjectureStatus::Refuted { .. } => "refuted",
            ConjectureStatus::Undetermined { .. } => "undetermined",
        }
    }

    /// Structured form with every number as a decimal (or `p/q`) string.
    pub fn to_json(&self) -> Value {
        let residual: Vec<Value> = self
            .residual
            .iter()
            .map(|t| {
                let mut v = t.coefficients.to_json();
                v["offset"] = json!(t.offset);
                v
            })
            .collect();
        let (refuted_at, reason) = match &self.status {
            ConjectureStatus::Refuted { n } => (Some(*n), None),
            ConjectureStatus::Undetermined { reason } => (None, Some(reason.clone())),
            ConjectureStatus::Verified => (None, None),
        };
        json!({
            "spec": crate::dsl::format(&self.spec),
            "identity": self.statement(),
            "weights": self.weights.as_ref().map(GeneratedSequence::to_json),
            "residual": residual,
            "verified_range": self.verified_range.map(|(lo, hi)| [lo, hi]),
            "status": self.status_word(),
            "refuted_at": refuted_at,
            "reason": reason,
        })
    }

    /// Human-readable statement of the identity.
    pub fn statement(&self) -> String {
        let u = self.spec.name();
        let mut s = format!("(n-1)*{u}(n) = sum_{{k=1}}^{{n-1}} a(k)*{u}(n-k)");
        for t in &self.residual {
            s.push_str(&format!(" + r{}(n)*{u}({})", t.offset, -(t.offset as i64)));
        }
        s
    }
}

/// Runs the expansion engine for `spec` at `n`; the residual indices are
/// evaluated once to make sure backward extension reaches them.
pub fn collect_general(spec: &SequenceSpec, n: i64) -> Result<CollectedWeights> {
    let w = sum_expansions(spec, n)?;
    if let Some(&deepest) = w.residual().keys().next_back() {
        eval_range(spec, n - deepest as i64, n - deepest as i64)?;
    }
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConjectureOptions {
    pub max_order: usize,
    /// Worker threads for verification; `None` uses the global pool.
    pub jobs: Option<usize>,
}

impl Default for ConjectureOptions {
    fn default() -> Self {
        Self {
            max_order: DEFAULT_MAX_ORDER,
            jobs: None,
        }
    }
}

pub fn conjecture(
    spec: &SequenceSpec,
    probe_n: i64,
    verify_hi: i64,
) -> Result<ConjecturedIdentity> {
    conjecture_with(spec, probe_n, verify_hi, ConjectureOptions::default())
}

/// Collects at every `n` in `2..=probe_n`, fits the weight and residual
/// sequences, then checks the full identity for `2..=verify_hi`.
pub fn conjecture_with(
    spec: &SequenceSpec,
    probe_n: i64,
    verify_hi: i64,
    options: ConjectureOptions,
) -> Result<ConjecturedIdentity> {
    let needed = 2 * options.max_order + 1;
    let got = usize::try_from(probe_n - 1).unwrap_or(0);
    if got < needed {
        return Err(Error::InsufficientData { needed, got });
    }
    if verify_hi < 2 {
        return Err(Error::InvalidRange {
            lo: 2,
            hi: verify_hi,
        });
    }

    let collected: Vec<CollectedWeights> = (2..=probe_n)
        .into_par_iter()
        .map(|n| collect_general(spec, n))
        .collect::<Result<_>>()?;

    let mut result = ConjecturedIdentity {
        spec: spec.clone(),
        weights: None,
        residual: Vec::new(),
        verified_range: None,
        status: ConjectureStatus::Undetermined {
            reason: String::new(),
        },
        report: None,
    };

    let probe = collected.last().expect("probe_n >= 2");
    let Some(weights) = detect_sequence(probe.weights(), 1, options.max_order) else {
        result.status = ConjectureStatus::Undetermined {
            reason: format!("no weight recurrence of order <= {}", options.max_order),
        };
        return Ok(result);
    };
    result.weights = Some(weights);

    let offsets: BTreeSet<usize> = collected
        .iter()
        .flat_map(|w| w.residual().keys().map(move |&k| k - w.n() as usize))
        .collect();
    for offset in offsets {
        let column: Vec<BigInt> = collected
            .iter()
            .map(|w| {
                w.residual()
                    .get(&(w.n() as usize + offset))
                    .cloned()
                    .unwrap_or_default()
            })
            .collect();
        let Some(coefficients) = detect_sequence(&column, 2, options.max_order) else {
            result.status = ConjectureStatus::Undetermined {
                reason: format!("no recurrence for residual offset {offset}"),
            };
            return Ok(result);
        };
        result.residual.push(ResidualTerm {
            offset,
            coefficients,
        });
    }

    match verify_conjecture_with(&result, 2, verify_hi, options.jobs) {
        Ok(report) => {
            result.status = match &report.first_failure {
                None => ConjectureStatus::Verified,
                Some(f) => ConjectureStatus::Refuted { n: f.n },
            };
            result.verified_range = Some((2, verify_hi));
            result.report = Some(report);
        }
        Err(e @ Error::NonIntegral { .. }) => {
            result.status = ConjectureStatus::Undetermined {
                reason: e.to_string(),
            };
        }
        Err(e) => return Err(e),
    }
    Ok(result)
}

pub fn verify_conjecture(conj: &ConjecturedIdentity, lo: i64, hi: i64) -> Result<IdentityReport> {
    verify_conjecture_with(conj, lo, hi, None)
}

/// Checks `(n-1) U(n) = sum a(k) U(n-k) + sum r_j(n) U(-j)` at every `n` in
/// `lo..=hi` from sequence values and the fitted generators only.
pub fn verify_conjecture_with(
    conj: &ConjecturedIdentity,
    lo: i64,
    hi: i64,
    jobs: Option<usize>,
) -> Result<IdentityReport> {
    let started = Instant::now();
    if lo < 2 || lo > hi {
        return Err(Error::InvalidRange { lo, hi });
    }
    let weights = conj.weights.as_ref().ok_or(Error::Undetermined)?;
    let deepest = conj
        .residual
        .iter()
        .map(|t| t.offset as i64)
        .max()
        .unwrap_or(0);
    let base = -deepest;
    let values = eval_range(&conj.spec, base, hi)?;
    let u = |i: i64| &values[(i - base) as usize];
    let a = weights.values_to(hi - 1)?;
    let residual: Vec<(i64, Vec<BigInt>)> = conj
        .residual
        .iter()
        .map(|t| Ok((t.offset as i64, t.coefficients.values_to(hi)?)))
        .collect::<Result<_>>()?;

    let check = |n: i64| {
        let lhs = BigInt::from(n - 1) * u(n);
        let mut rhs: BigInt = (1..n).map(|k| &a[(k - 1) as usize] * u(n - k)).sum();
        for (offset, coeffs) in &residual {
            rhs += &coeffs[(n - 2) as usize] * u(-offset);
        }
        (lhs != rhs).then_some(Failure { n, lhs, rhs })
    };
    let failure = match jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build()
            .expect("failed to build worker pool")
            .install(|| (lo..=hi).into_par_iter().find_map_first(check)),
        None => (lo..=hi).into_par_iter().find_map_first(check),
    };
    Ok(IdentityReport::from_outcome(lo, hi, failure, started))
}

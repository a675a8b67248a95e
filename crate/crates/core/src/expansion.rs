//! Repeated substitution of a recurrence into itself, and coefficient
//! collection over the summed expansions.
//!
//! A [`LinearForm`] expresses `U(n)` as `sum_k c_k * U(n-k)`. The first form is
//! the recurrence itself; each further form replaces the term of smallest
//! shift by the recurrence for that term. Adding the forms for depths
//! `1..=n-1` gives `(n-1) * U(n)` on the left and the [`CollectedWeights`] on
//! the right.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::sequences::{eval_range, SequenceSpec};

/// `U(n) = sum_k terms[k] * U(n-k)` over a fixed recurrence. No zero
/// coefficients are stored and every shift is at least 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearForm {
    terms: BTreeMap<usize, BigInt>,
    spec: SequenceSpec,
}

impl LinearForm {
    /// Builds a form from arbitrary `(shift, coefficient)` pairs; repeated
    /// shifts are summed and zeros dropped.
    pub fn from_terms(
        spec: SequenceSpec,
        terms: impl IntoIterator<Item = (usize, BigInt)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (shift, c) in terms {
            if shift == 0 {
                return Err(Error::InvalidSpec("linear form shifts start at 1".into()));
            }
            add_term(&mut map, shift, c);
        }
        Ok(Self { terms: map, spec })
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    pub fn terms(&self) -> &BTreeMap<usize, BigInt> {
        &self.terms
    }

    pub fn coefficient(&self, shift: usize) -> Option<&BigInt> {
        self.terms.get(&shift)
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_shift(&self) -> Option<usize> {
        self.terms.keys().next().copied()
    }

    pub fn max_shift(&self) -> Option<usize> {
        self.terms.keys().next_back().copied()
    }

    /// Evaluates the right-hand side at target index `n`, given the values
    /// `values[i] = U(base + i)`.
    fn eval_rhs(&self, n: i64, base: i64, values: &[BigInt]) -> BigInt {
        self.terms
            .iter()
            .map(|(&k, c)| c * &values[(n - k as i64 - base) as usize])
            .sum()
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self.spec.name();
        write!(f, "{name}(n) =")?;
        if self.terms.is_empty() {
            return write!(f, " 0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let sign = if c.sign() == num_bigint::Sign::Minus {
                "-"
            } else {
                "+"
            };
            let mag = c.magnitude();
            match (i, sign) {
                (0, "+") => write!(f, " ")?,
                (0, _) => write!(f, " -")?,
                _ => write!(f, " {sign} ")?,
            }
            if !num_traits::One::is_one(mag) {
                write!(f, "{mag}*")?;
            }
            write!(f, "{name}(n-{k})")?;
        }
        Ok(())
    }
}

fn add_term(map: &mut BTreeMap<usize, BigInt>, shift: usize, c: BigInt) {
    if c.is_zero() {
        return;
    }
    let slot = map.entry(shift).or_insert_with(BigInt::zero);
    *slot += c;
    if slot.is_zero() {
        map.remove(&shift);
    }
}

/// The summed expansions `E(1) + ... + E(n-1)` split at shift `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollectedWeights {
    n: i64,
    /// `weights[k-1]` is the total coefficient of `U(n-k)`, `k = 1..n-1`.
    weights: Vec<BigInt>,
    /// Shift `k >= n` to coefficient; these multiply `U(n-k)` at indices `<= 0`.
    residual: BTreeMap<usize, BigInt>,
}

impl CollectedWeights {
    pub fn new(n: i64, weights: Vec<BigInt>, residual: BTreeMap<usize, BigInt>) -> Self {
        Self {
            n,
            weights,
            residual,
        }
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    /// Number of forms summed, i.e. the multiplicity of `U(n)` on the left.
    pub fn multiplicity(&self) -> i64 {
        self.n - 1
    }

    pub fn weights(&self) -> &[BigInt] {
        &self.weights
    }

    /// Weight `a_k` for `1 <= k <= n-1`.
    pub fn weight(&self, k: usize) -> Option<&BigInt> {
        k.checked_sub(1).and_then(|i| self.weights.get(i))
    }

    pub fn residual(&self) -> &BTreeMap<usize, BigInt> {
        &self.residual
    }

    /// Checks `sum_k a_k U(n-k) + sum_{k>=n} r_k U(n-k) = (n-1) U(n)` by
    /// concrete evaluation, reaching below the seeds where needed.
    pub fn holds_for(&self, spec: &SequenceSpec) -> Result<bool> {
        let (lhs, rhs) = self.sides(spec)?;
        Ok(lhs == rhs)
    }

    /// `((n-1) U(n), sum of weighted terms)` for the given sequence.
    pub fn sides(&self, spec: &SequenceSpec) -> Result<(BigInt, BigInt)> {
        let deepest = self.residual.keys().next_back().copied().unwrap_or(0);
        let base = self.n - (deepest.max(self.weights.len())) as i64;
        let values = eval_range(spec, base.min(self.n), self.n)?;
        let at = |i: i64| &values[(i - base.min(self.n)) as usize];
        let lhs = BigInt::from(self.multiplicity()) * at(self.n);
        let weighted: BigInt = self
            .weights
            .iter()
            .zip(1i64..)
            .map(|(a, k)| a * at(self.n - k))
            .sum();
        let residual: BigInt = self
            .residual
            .iter()
            .map(|(&k, r)| r * at(self.n - k as i64))
            .sum();
        Ok((lhs, weighted + residual))
    }
}

/// `E(1)`: the recurrence itself.
pub fn initial_form(spec: &SequenceSpec) -> LinearForm {
    let terms = spec
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i + 1, c.clone()))
        .collect();
    LinearForm {
        terms,
        spec: spec.clone(),
    }
}

/// Replaces the term of smallest shift `k` (the highest remaining index)
/// by `c * sum_i c_i U(n-k-i)`.
pub fn substitute_min_shift(form: &LinearForm) -> Result<LinearForm> {
    let mut next = form.clone();
    substitute_in_place(&mut next)?;
    Ok(next)
}

fn substitute_in_place(form: &mut LinearForm) -> Result<()> {
    let (k, c) = form.terms.pop_first().ok_or(Error::EmptyForm)?;
    for (i, ci) in form.spec.coeffs().iter().enumerate() {
        add_term(&mut form.terms, k + i + 1, &c * ci);
    }
    Ok(())
}

/// `E(r)`, after `r - 1` substitutions.
pub fn expansion(spec: &SequenceSpec, r: usize) -> Result<LinearForm> {
    if r < 1 {
        return Err(Error::InvalidDepth(r));
    }
    let mut form = initial_form(spec);
    for _ in 1..r {
        substitute_in_place(&mut form)?;
    }
    Ok(form)
}

/// Adds `E(1) .. E(n-1)` coefficient-wise. Each form is derived from the
/// previous one by a single substitution.
pub fn sum_expansions(spec: &SequenceSpec, n: i64) -> Result<CollectedWeights> {
    if n < 2 {
        return Err(Error::IndexTooSmall { min: 2, got: n });
    }
    let count = (n - 1) as usize;
    let mut totals: Vec<BigInt> = vec![BigInt::zero(); count + spec.order()];
    let mut form = initial_form(spec);
    for depth in 1..=count {
        if depth > 1 {
            // a form can only vanish if the recurrence annihilates it, which
            // a nonzero trailing coefficient rules out
            substitute_in_place(&mut form)?;
        }
        for (&k, c) in &form.terms {
            if k >= totals.len() {
                totals.resize(k + 1, BigInt::zero());
            }
            totals[k] += c;
        }
    }
    let residual = totals
        .iter()
        .enumerate()
        .skip(count + 1)
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k, c.clone()))
        .collect();
    totals.truncate(count + 1);
    totals.remove(0);
    Ok(CollectedWeights {
        n,
        weights: totals,
        residual,
    })
}

/// True iff `U(n) = sum_k c_k U(n-k)` at every test index.
pub fn validate_form(form: &LinearForm, test_indices: &[i64]) -> Result<bool> {
    let deepest = form.max_shift().unwrap_or(0) as i64;
    for &n in test_indices {
        let base = n - deepest;
        let values = eval_range(form.spec(), base.min(n), n)?;
        let lhs = &values[(n - base.min(n)) as usize];
        if form.eval_rhs(n, base.min(n), &values) != *lhs {
            return Ok(false);
        }
    }
    Ok(true)
}

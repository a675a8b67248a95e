//! Exact evaluation of Fibonacci, Lucas and general constant-coefficient
//! linear recurrences.
//!
//! A [`SequenceSpec`] of order `d` describes `U(n) = c_1*U(n-1) + ... + c_d*U(n-d)`
//! together with `d` consecutive seed values. Values at indices below the seed
//! window are reached by solving the recurrence for its last term, which is
//! only integral when `|c_d| = 1`; other specs must opt into rational mode.

use std::collections::VecDeque;
use std::ops::{AddAssign, Mul, SubAssign};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An order-`d` integer linear recurrence with `d` consecutive seeds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SequenceSpec {
    name: String,
    coeffs: Vec<BigInt>,
    seeds: Vec<BigInt>,
    seed_start: i64,
    rational: bool,
}

impl SequenceSpec {
    /// `coeffs[i]` multiplies `U(n-1-i)`; `seeds[j]` is the value at `seed_start + j`.
    pub fn new(
        name: impl Into<String>,
        coeffs: Vec<BigInt>,
        seeds: Vec<BigInt>,
        seed_start: i64,
    ) -> Result<Self> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(Error::InvalidSpec(format!("`{name}` is not an identifier")));
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidSpec("order must be at least 1".into()));
        }
        if coeffs.len() != seeds.len() {
            return Err(Error::InvalidSpec(format!(
                "order {} needs {} seeds, got {}",
                coeffs.len(),
                coeffs.len(),
                seeds.len()
            )));
        }
        if coeffs.last().is_some_and(Zero::is_zero) {
            return Err(Error::InvalidSpec("trailing coefficient is zero".into()));
        }
        Ok(Self {
            name,
            coeffs,
            seeds,
            seed_start,
            rational: false,
        })
    }

    /// Convenience constructor from machine integers.
    pub fn from_i64(name: &str, coeffs: &[i64], seeds: &[i64], seed_start: i64) -> Result<Self> {
        Self::new(
            name,
            coeffs.iter().copied().map(BigInt::from).collect(),
            seeds.iter().copied().map(BigInt::from).collect(),
            seed_start,
        )
    }

    /// `F(n) = F(n-1) + F(n-2)`, `F(1) = F(2) = 1`.
    pub fn fibonacci() -> Self {
        Self::from_i64("F", &[1, 1], &[1, 1], 1).expect("valid builtin")
    }

    /// `L(n) = L(n-1) + L(n-2)`, `L(0) = 2`, `L(1) = 1`.
    pub fn lucas() -> Self {
        Self::from_i64("L", &[1, 1], &[2, 1], 0).expect("valid builtin")
    }

    /// `T(n) = T(n-1) + T(n-2) + T(n-3)`, `T(0) = T(1) = 0`, `T(2) = 1`.
    pub fn tribonacci() -> Self {
        Self::from_i64("T", &[1, 1, 1], &[0, 0, 1], 0).expect("valid builtin")
    }

    /// Enables exact-fraction backward extension for non-unit trailing coefficients.
    pub fn with_rational(mut self, enabled: bool) -> Self {
        self.rational = enabled;
        self
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(Error::InvalidSpec(format!("`{name}` is not an identifier")));
        }
        self.name = name;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn seeds(&self) -> &[BigInt] {
        &self.seeds
    }

    pub fn seed_start(&self) -> i64 {
        self.seed_start
    }

    pub fn is_rational(&self) -> bool {
        self.rational
    }

    /// Whether integer backward steps are possible (`|c_d| = 1`).
    pub fn is_invertible(&self) -> bool {
        self.trailing().abs().is_one()
    }

    fn trailing(&self) -> &BigInt {
        self.coeffs.last().expect("order >= 1")
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Returns `(F(n), F(n+1))` by fast doubling.
pub fn fib_pair(n: u64) -> (BigUint, BigUint) {
    let mut a = BigUint::zero();
    let mut b = BigUint::one();
    for bit in (0..u64::BITS - n.leading_zeros()).rev() {
        // F(2k) = F(k) * (2F(k+1) - F(k)),  F(2k+1) = F(k)^2 + F(k+1)^2
        let doubled = &a * ((&b << 1u32) - &a);
        let odd = &a * &a + &b * &b;
        if (n >> bit) & 1 == 1 {
            b = &doubled + &odd;
            a = odd;
        } else {
            a = doubled;
            b = odd;
        }
    }
    (a, b)
}

/// `F(n)` with `F(0) = 0`, `F(1) = F(2) = 1`.
pub fn fib(n: i64) -> Result<BigInt> {
    let n = u64::try_from(n).map_err(|_| Error::NegativeIndex(n))?;
    Ok(fib_pair(n).0.into())
}

/// `L(n)` with `L(0) = 2`, `L(1) = 1`, computed as `2F(n+1) - F(n)`.
pub fn lucas(n: i64) -> Result<BigInt> {
    let n = u64::try_from(n).map_err(|_| Error::NegativeIndex(n))?;
    let (f, g) = fib_pair(n);
    Ok(BigInt::from((g << 1u32) - f))
}

/// Value of `spec` at index `n`. Indices below the seed window are reached by
/// backward extension.
pub fn eval_term(spec: &SequenceSpec, n: i64) -> Result<BigInt> {
    Ok(eval_range(spec, n, n)?.pop().expect("one value"))
}

/// Values at `lo..=hi`.
pub fn eval_range(spec: &SequenceSpec, lo: i64, hi: i64) -> Result<Vec<BigInt>> {
    if lo > hi {
        return Err(Error::InvalidRange { lo, hi });
    }
    if lo >= spec.seed_start || spec.is_invertible() {
        // 1/c_d = c_d for a unit
        return Ok(walk(
            spec.coeffs(),
            spec.seeds(),
            spec.seed_start,
            lo,
            hi,
            spec.trailing(),
        ));
    }
    if !spec.rational {
        return Err(non_invertible(spec, lo));
    }
    eval_range_rational(spec, lo, hi)?
        .into_iter()
        .zip(lo..)
        .map(|(v, index)| {
            if v.is_integer() {
                Ok(v.to_integer())
            } else {
                Err(Error::NonIntegral {
                    name: spec.name.clone(),
                    index,
                })
            }
        })
        .collect()
}

/// Values at `lo..=hi` as exact fractions. Requires rational mode whenever the
/// range reaches below the seeds and `|c_d| != 1`.
pub fn eval_range_rational(spec: &SequenceSpec, lo: i64, hi: i64) -> Result<Vec<BigRational>> {
    if lo > hi {
        return Err(Error::InvalidRange { lo, hi });
    }
    if lo < spec.seed_start && !spec.is_invertible() && !spec.rational {
        return Err(non_invertible(spec, lo));
    }
    let to_q = |v: &BigInt| BigRational::from_integer(v.clone());
    let coeffs: Vec<_> = spec.coeffs.iter().map(to_q).collect();
    let seeds: Vec<_> = spec.seeds.iter().map(to_q).collect();
    let inverse = to_q(spec.trailing()).recip();
    Ok(walk(&coeffs, &seeds, spec.seed_start, lo, hi, &inverse))
}

/// Value at an index below the seed window, by solving the recurrence for
/// its last term. Indices inside or above the window are evaluated forward.
pub fn extend_backward(spec: &SequenceSpec, n: i64) -> Result<BigInt> {
    if n < spec.seed_start && !spec.is_invertible() && !spec.rational {
        return Err(non_invertible(spec, n));
    }
    eval_term(spec, n)
}

fn non_invertible(spec: &SequenceSpec, index: i64) -> Error {
    Error::NonInvertibleStep {
        name: spec.name.clone(),
        index,
        trailing: spec.trailing().to_string(),
    }
}

/// Rolls a window of `d` values from the seeds down to `min(lo, start)` and
/// then forward to `hi`, emitting the values at `lo..=hi`.
fn walk<T>(coeffs: &[T], seeds: &[T], start: i64, lo: i64, hi: i64, inverse_trailing: &T) -> Vec<T>
where
    T: Clone + Zero + AddAssign + SubAssign,
    for<'a> &'a T: Mul<&'a T, Output = T>,
{
    let d = coeffs.len();
    let mut window: VecDeque<T> = seeds.iter().cloned().collect();
    let mut index = start;
    while index > lo {
        // c_d * U(i-1) = U(i+d-1) - sum_{j<d} c_j * U(i+d-1-j)
        let mut top = window[d - 1].clone();
        for j in 1..d {
            top -= &coeffs[j - 1] * &window[d - 1 - j];
        }
        window.pop_back();
        window.push_front(&top * inverse_trailing);
        index -= 1;
    }
    let mut out = Vec::with_capacity(usize::try_from(hi - lo + 1).unwrap_or(0));
    loop {
        if index >= lo {
            out.push(window[0].clone());
        }
        if index == hi {
            return out;
        }
        let mut next = T::zero();
        for (j, c) in coeffs.iter().enumerate() {
            next += c * &window[d - 1 - j];
        }
        window.pop_front();
        window.push_back(next);
        index += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn iterate_fib(n: usize) -> BigInt {
        let (mut a, mut b) = (BigInt::zero(), BigInt::one());
        for _ in 0..n {
            let c = &a + &b;
            a = std::mem::replace(&mut b, c);
        }
        a
    }

    #[test]
    fn fib_values() {
        assert_eq!(fib(6).unwrap(), big(8));
        assert_eq!(fib(0).unwrap(), big(0));
        assert_eq!(fib(50).unwrap(), big(12586269025));
        assert_eq!(fib(50).unwrap(), iterate_fib(50));
        assert_eq!(fib(-1), Err(Error::NegativeIndex(-1)));
    }

    #[test]
    fn lucas_values() {
        assert_eq!(lucas(0).unwrap(), big(2));
        assert_eq!(lucas(5).unwrap(), big(11));
        assert_eq!(lucas(10).unwrap(), big(123));
        assert!(matches!(lucas(-3), Err(Error::NegativeIndex(-3))));
    }

    #[test]
    fn fast_doubling_matches_iteration() {
        let (mut a, mut b) = (BigInt::zero(), BigInt::one());
        for n in 0..=2000 {
            assert_eq!(fib(n).unwrap(), a, "n={n}");
            let c = &a + &b;
            a = std::mem::replace(&mut b, c);
        }
    }

    #[test]
    fn eval_term_examples() {
        assert_eq!(eval_term(&SequenceSpec::fibonacci(), 6).unwrap(), big(8));
        assert_eq!(eval_term(&SequenceSpec::lucas(), 2).unwrap(), big(3));
        assert_eq!(eval_term(&SequenceSpec::tribonacci(), 9).unwrap(), big(44));
    }

    #[test]
    fn eval_range_examples() {
        let f = SequenceSpec::fibonacci();
        let l = SequenceSpec::lucas();
        let ints = |v: &[i64]| v.iter().copied().map(big).collect::<Vec<_>>();
        assert_eq!(eval_range(&f, 1, 5).unwrap(), ints(&[1, 1, 2, 3, 5]));
        assert_eq!(eval_range(&l, 1, 5).unwrap(), ints(&[1, 3, 4, 7, 11]));
        assert_eq!(eval_range(&f, 3, 3).unwrap(), ints(&[2]));
        assert_eq!(eval_range(&f, -3, 2).unwrap(), ints(&[2, -1, 1, 0, 1, 1]));
        assert_eq!(
            eval_range(&f, 5, 4),
            Err(Error::InvalidRange { lo: 5, hi: 4 })
        );
    }

    #[test]
    fn backward_examples() {
        let f = SequenceSpec::fibonacci();
        assert_eq!(extend_backward(&f, 0).unwrap(), big(0));
        assert_eq!(extend_backward(&f, -1).unwrap(), big(1));
        let late_lucas = SequenceSpec::from_i64("L", &[1, 1], &[1, 3], 1).unwrap();
        assert_eq!(extend_backward(&late_lucas, 0).unwrap(), big(2));
    }

    #[test]
    fn non_unit_trailing_needs_rational_mode() {
        let s = SequenceSpec::from_i64("U", &[1, 2], &[1, 3], 0).unwrap();
        assert!(matches!(
            extend_backward(&s, -1),
            Err(Error::NonInvertibleStep { index: -1, .. })
        ));
        // forward evaluation never needs the inverse
        assert_eq!(eval_term(&s, 3).unwrap(), big(11));

        // U(1) = U(0) + 2U(-1) -> U(-1) = 1; then U(-2) = 0, U(-3) = 1/2
        let s = s.with_rational(true);
        assert_eq!(extend_backward(&s, -1).unwrap(), big(1));
        assert_eq!(extend_backward(&s, -2).unwrap(), big(0));
        assert!(matches!(
            extend_backward(&s, -3),
            Err(Error::NonIntegral { index: -3, .. })
        ));
        let q = eval_range_rational(&s, -3, -3).unwrap();
        assert_eq!(q[0], BigRational::new(big(1), big(2)));
    }

    #[test]
    fn spec_validation() {
        assert!(SequenceSpec::from_i64("U", &[], &[], 0).is_err());
        assert!(SequenceSpec::from_i64("U", &[1, 0], &[1, 1], 0).is_err());
        assert!(SequenceSpec::from_i64("U", &[1, 1], &[1], 0).is_err());
        assert!(SequenceSpec::from_i64("1U", &[1], &[1], 0).is_err());
        assert!(SequenceSpec::from_i64("U_2", &[0, -1], &[1, 1], -4).is_ok());
    }
}

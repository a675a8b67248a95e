use fibconv::expansion::sum_expansions;
use fibconv::sequences::SequenceSpec;
use fibconv::verify::{
    check_identity, check_range, convolution_sum, inductive_step_check, reindexing_check,
    weights_are_lucas, IdentityVerifier, Status,
};
use fibconv::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use proptest::prelude::*;

fn pair_tables(hi: usize) -> (Vec<BigInt>, Vec<BigInt>) {
    let step = |mut v: Vec<BigInt>| {
        while v.len() <= hi {
            let n = v.len();
            let next = &v[n - 1] + &v[n - 2];
            v.push(next);
        }
        v
    };
    (
        step(vec![BigInt::from(0), BigInt::from(1)]),
        step(vec![BigInt::from(2), BigInt::from(1)]),
    )
}

#[test]
fn convolution_equals_scaled_fibonacci_to_two_thousand() {
    let (f, l) = pair_tables(2000);
    for n in 2..=2000usize {
        let s: BigInt = (1..n).map(|k| &l[k] * &f[n - k]).sum();
        let m = BigInt::from(n - 1);
        assert_eq!(s, &m * &f[n], "n={n}");
        let (q, r) = s.div_rem(&m);
        assert!(r.is_zero() && q == f[n], "n={n}");
    }
    let report = check_range(2, 2000).unwrap();
    assert_eq!(report.status, Status::Pass);
    assert!(report.first_failure.is_none());
}

#[test]
fn library_sum_matches_oracle() {
    let (f, l) = pair_tables(400);
    for n in 2..=400usize {
        let s: BigInt = (1..n).map(|k| &l[k] * &f[n - k]).sum();
        assert_eq!(convolution_sum(n as i64).unwrap(), s, "n={n}");
    }
}

#[test]
fn weighted_collection_matches_the_convolution() {
    let f = SequenceSpec::fibonacci();
    let (fibs, _) = pair_tables(310);
    for n in 2..=300i64 {
        let w = sum_expansions(&f, n).unwrap();
        assert!(weights_are_lucas(&w), "n={n}");
        let dot: BigInt = (1..n)
            .map(|k| w.weight(k as usize).unwrap() * &fibs[(n - k) as usize])
            .sum();
        assert_eq!(dot, convolution_sum(n).unwrap(), "n={n}");
    }
}

#[test]
fn proof_steps_replay_numerically() {
    for m in 3..=500 {
        assert!(inductive_step_check(m).unwrap(), "step m={m}");
    }
    for m in 3..=200 {
        assert!(reindexing_check(m).unwrap(), "reindex m={m}");
    }
    assert!(inductive_step_check(2).is_err());
    assert!(reindexing_check(1).is_err());
}

#[test]
fn tampered_lucas_reports_least_failure() {
    let tampered = SequenceSpec::from_i64("L", &[1, 1], &[1, 4], 1).unwrap();
    let v = IdentityVerifier::new(SequenceSpec::fibonacci(), tampered);
    for jobs in [None, Some(1), Some(4)] {
        let report = v.clone().with_jobs(jobs).check_range(2, 300).unwrap();
        let failure = report.first_failure.expect("must fail");
        assert_eq!(failure.n, 3);
        assert_eq!(failure.lhs, BigInt::from(4));
        assert_eq!(failure.rhs, BigInt::from(5));
        assert_eq!(failure.difference(), BigInt::from(1));
    }
    assert!(!v.inductive_step_check(5).unwrap());
}

#[test]
fn single_index_and_bad_ranges() {
    assert!(check_identity(2).unwrap().passed());
    assert!(check_identity(1).is_err());
    assert!(check_range(5, 4).is_err());
    assert!(check_range(1, 4).is_err());
    let rows = IdentityVerifier::standard().rows(2, 6).unwrap();
    assert_eq!(rows.len(), 5);
    assert_eq!(rows[4].sum, BigInt::from(40));
    assert_eq!(rows[4].quotient, Some(BigInt::from(8)));
    assert!(rows.iter().all(|r| r.passed()));
}

proptest! {
    #[test]
    fn jobs_do_not_change_reports(lo in 2i64..50, len in 0i64..80, jobs in 1usize..6) {
        let base = check_range(lo, lo + len).unwrap();
        let pooled = IdentityVerifier::standard().with_jobs(Some(jobs)).check_range(lo, lo + len).unwrap();
        prop_assert_eq!(base.status, pooled.status);
        prop_assert_eq!(base.first_failure, pooled.first_failure);
    }

    #[test]
    fn subrange_of_a_passing_range_passes(lo in 2i64..300, len in 0i64..50) {
        prop_assert!(check_range(lo, lo + len).unwrap().passed());
    }
}

use fibconv::sequences::{eval_range, eval_term, extend_backward, fib, lucas, SequenceSpec};
use fibconv::BigInt;
use proptest::prelude::*;

fn iterate(spec_coeffs: &[i64], seeds: &[i64], steps: usize) -> Vec<BigInt> {
    let mut v: Vec<BigInt> = seeds.iter().copied().map(BigInt::from).collect();
    let d = spec_coeffs.len();
    while v.len() < steps {
        let i = v.len();
        let next = (0..d)
            .map(|j| BigInt::from(spec_coeffs[j]) * &v[i - 1 - j])
            .sum();
        v.push(next);
    }
    v
}

#[test]
fn fast_doubling_agrees_with_iteration_to_ten_thousand() {
    let (mut a, mut b) = (BigInt::from(0), BigInt::from(1));
    for n in 0..=10_000i64 {
        assert_eq!(fib(n).unwrap(), a, "F({n})");
        let c = &a + &b;
        a = std::mem::replace(&mut b, c);
    }
}

#[test]
fn lucas_is_sum_of_neighbouring_fibonacci() {
    assert_eq!(lucas(0).unwrap(), BigInt::from(1) + fib(1).unwrap());
    let f = eval_range(&SequenceSpec::fibonacci(), 0, 10_001).unwrap();
    for n in 1..=10_000usize {
        assert_eq!(lucas(n as i64).unwrap(), &f[n - 1] + &f[n + 1], "L({n})");
    }
}

#[test]
fn general_spec_matches_fast_paths() {
    let f = SequenceSpec::fibonacci();
    let l = SequenceSpec::lucas();
    let fs = eval_range(&f, 0, 500).unwrap();
    let ls = eval_range(&l, 0, 500).unwrap();
    for n in 0..=500 {
        assert_eq!(fs[n as usize], fib(n).unwrap());
        assert_eq!(ls[n as usize], lucas(n).unwrap());
    }
    assert_eq!(eval_term(&f, 10_000).unwrap(), fib(10_000).unwrap());
}

#[test]
fn tribonacci_matches_direct_iteration() {
    let expected = iterate(&[1, 1, 1], &[0, 0, 1], 40);
    assert_eq!(
        eval_range(&SequenceSpec::tribonacci(), 0, 39).unwrap(),
        expected
    );
    assert_eq!(expected[9], BigInt::from(44));
}

fn unit_spec() -> impl Strategy<Value = SequenceSpec> {
    (1usize..=4)
        .prop_flat_map(|d| {
            (
                prop::collection::vec(-3i64..=3, d - 1),
                prop_oneof![Just(1i64), Just(-1i64)],
                prop::collection::vec(-50i64..=50, d),
                -5i64..=5,
            )
        })
        .prop_map(|(mut coeffs, last, seeds, start)| {
            coeffs.push(last);
            SequenceSpec::from_i64("U", &coeffs, &seeds, start).unwrap()
        })
}

proptest! {
    #[test]
    fn range_agrees_with_single_terms(spec in unit_spec(), lo in -15i64..15, len in 0i64..20) {
        let hi = lo + len;
        let values = eval_range(&spec, lo, hi).unwrap();
        prop_assert_eq!(values.len() as i64, len + 1);
        for (i, v) in (lo..=hi).zip(&values) {
            prop_assert_eq!(&eval_term(&spec, i).unwrap(), v);
        }
    }

    #[test]
    fn backward_then_forward_reproduces_seeds(spec in unit_spec(), depth in 1i64..25) {
        let lo = spec.seed_start() - depth;
        let d = spec.order();
        let mut window: Vec<BigInt> = (lo..lo + d as i64)
            .map(|i| extend_backward(&spec, i).unwrap())
            .collect();
        // plain forward iteration from the extended window
        while window.len() < depth as usize + d {
            let i = window.len();
            let next = (0..d).map(|j| &spec.coeffs()[j] * &window[i - 1 - j]).sum();
            window.push(next);
        }
        prop_assert_eq!(&window[depth as usize..], spec.seeds());
    }

    #[test]
    fn forward_matches_independent_iteration(
        coeffs in prop::collection::vec(-4i64..=4, 1..=4),
        seeds_raw in prop::collection::vec(-20i64..=20, 4),
        steps in 5usize..60,
    ) {
        let mut coeffs = coeffs;
        if *coeffs.last().unwrap() == 0 {
            *coeffs.last_mut().unwrap() = 2;
        }
        let seeds = &seeds_raw[..coeffs.len()];
        let spec = SequenceSpec::from_i64("U", &coeffs, seeds, 0).unwrap();
        let expected = iterate(&coeffs, seeds, steps);
        prop_assert_eq!(eval_range(&spec, 0, steps as i64 - 1).unwrap(), expected);
    }
}

use kfib_balance::numerics::{AlgebraicConstants, ApproxReal, PrecisionContext};
use kfib_balance::reduction::{legendre_bound, reduce_with_fallback, ReductionInstance, Refinable};
use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn is_square(r: u32) -> bool {
    let s = (r as f64).sqrt() as u32;
    s * s == r || (s + 1) * (s + 1) == r
}

/// First `u ≤ m` whose form `|uτ + μ − v|` beats `A·B^(−w)`, in f64.
fn scan_violation(tau: f64, mu: f64, a: f64, b: f64, m: u64, w: i64, mu_int: bool) -> Option<u64> {
    let threshold = a * b.powf(-(w as f64));
    (0..=m).find(|&u| {
        let x = u as f64 * tau + mu;
        let d = (x - x.round()).abs();
        let zero_form = u == 0 && mu_int;
        !zero_form && d < threshold - 1e-9
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(160))]

    #[test]
    fn reduction_is_sound(
        r in 2u32..60,
        num in -40i64..40,
        den in 1i64..13,
        a_tenths in 1u32..=1000,
        b_hundredths in 150u32..=500,
        m in 1u64..=10_000,
    ) {
        prop_assume!(!is_square(r));
        let inst = ReductionInstance {
            tau: Refinable::new(format!("sqrt {r}"), move |bits| ApproxReal::from_int(r, bits).sqrt()),
            mu: Refinable::rational(BigInt::from(num), BigInt::from(den)).unwrap(),
            a: Refinable::rational(BigInt::from(a_tenths), BigInt::from(10)).unwrap(),
            b: Refinable::rational(BigInt::from(b_hundredths), BigInt::from(100)).unwrap(),
            m: BigInt::from(m),
        };
        let out = reduce_with_fallback(&inst, &PrecisionContext::default()).unwrap();
        prop_assume!(out.is_reduced());
        let w = out.w_bound.unwrap();
        let (tau, mu) = ((r as f64).sqrt(), num as f64 / den as f64);
        let (a, b) = (a_tenths as f64 / 10.0, b_hundredths as f64 / 100.0);
        let hit = scan_violation(tau, mu, a, b, m, w, num % den == 0);
        prop_assert!(hit.is_none(), "u = {:?} violates w_bound {}", hit, w);
    }
}

#[test]
fn fixed_grid_is_reduced_and_sound() {
    let mut n = 0;
    for r in [2u32, 3, 5, 6, 7, 8, 10, 11, 12, 13] {
        for (num, den) in [
            (1, 3),
            (2, 7),
            (-5, 11),
            (7, 2),
            (1, 9),
            (4, 5),
            (-1, 8),
            (3, 13),
            (11, 6),
            (0, 1),
            (5, 1),
        ] {
            let m = 997 * (r as u64) % 10_000 + 1;
            let inst = ReductionInstance {
                tau: Refinable::new("sqrt", move |bits| ApproxReal::from_int(r, bits).sqrt()),
                mu: Refinable::rational(BigInt::from(num), BigInt::from(den)).unwrap(),
                a: Refinable::decimal("37.5").unwrap(),
                b: Refinable::decimal("2.5").unwrap(),
                m: BigInt::from(m),
            };
            let out = reduce_with_fallback(&inst, &PrecisionContext::default()).unwrap();
            assert!(out.is_reduced(), "r={r} mu={num}/{den}");
            let w = out.w_bound.unwrap();
            let hit = scan_violation(
                (r as f64).sqrt(),
                num as f64 / den as f64,
                37.5,
                2.5,
                m,
                w,
                num % den == 0,
            );
            assert!(hit.is_none(), "r={r} mu={num}/{den}: u = {hit:?}");
            n += 1;
        }
    }
    assert!(n >= 100);
}

#[test]
fn legendre_contract_on_random_x() {
    let tau = Refinable::new("log 2 / log γ", |bits| {
        let c = AlgebraicConstants::new(bits)?;
        c.log2.div(&c.log_gamma)
    });
    let m = BigInt::from(1_000_000u32);
    let lb = legendre_bound(&tau, &m, &PrecisionContext::default()).unwrap();
    let t = tau.at(160).unwrap();
    let scale = lb.a_max.clone() + 2u32;
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for _ in 0..1000 {
        let x = (1u64..1_000_000).new_tree(&mut runner).unwrap().current();
        let d = t.mul_int(x).nearest_int_distance().unwrap();
        let floor = ApproxReal::from_ratio(&BigInt::from(1), &(&scale * x), 160);
        assert!(floor.lt(&d).unwrap(), "x = {x}");
    }
}

use kfib_balance::search::{brute_force_box, SolutionRecord};
use kfib_balance::Equation;
use num_bigint::BigInt;

fn naive_fib(k: usize, n: usize) -> BigInt {
    // F_{2-k} .. F_0 = 0, F_1 = 1
    let mut v = vec![BigInt::from(0); k - 1];
    v.push(BigInt::from(1));
    while v.len() < n + k - 1 {
        let s = v[v.len() - k..].iter().fold(BigInt::from(0), |a, b| a + b);
        v.push(s);
    }
    v[n + k - 2].clone()
}

fn naive_target(eq: Equation, l: usize) -> BigInt {
    let (mut a, mut b) = match eq {
        Equation::Balancing => (BigInt::from(0), BigInt::from(1)),
        Equation::Lucas => (BigInt::from(1), BigInt::from(3)),
    };
    for _ in 0..l {
        let c = BigInt::from(6) * &b - &a;
        a = b;
        b = c;
    }
    a
}

fn naive_box(eq: Equation, k_hi: usize, n_max: usize, l_max: usize) -> Vec<SolutionRecord> {
    let mut out = Vec::new();
    for k in 2..=k_hi {
        for n in 1..=n_max {
            for m in 1..=n {
                for l in 1..=l_max {
                    let p = naive_fib(k, n) * naive_fib(k, m);
                    if p == naive_target(eq, l) {
                        out.push(SolutionRecord {
                            equation: eq,
                            l: l as u64,
                            k: k as u32,
                            n: n as u32,
                            m: m as u32,
                            value: p,
                        });
                    }
                }
            }
        }
    }
    out
}

#[test]
fn shrunken_box_matches_quadruple_loop() {
    for eq in Equation::ALL {
        let fast = brute_force_box(eq, 2, 10, 40, 40);
        let slow = naive_box(eq, 10, 40, 40);
        assert_eq!(fast, slow, "{eq}");
        assert!(fast.iter().all(|r| r.m <= r.n));
    }
}

#[test]
fn naive_helpers_agree_with_known_values() {
    assert_eq!(naive_fib(2, 10), BigInt::from(55));
    assert_eq!(naive_fib(5, 15), BigInt::from(6930));
    assert_eq!(naive_target(Equation::Balancing, 6), BigInt::from(6930));
    assert_eq!(naive_target(Equation::Lucas, 1), BigInt::from(3));
}

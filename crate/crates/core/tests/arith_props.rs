use proptest::prelude::*;
use pscong::arith::{factorize, gcd, is_prime, lcm, mod_pow, Nat};

fn nat(v: u64) -> Nat {
    Nat::from(v)
}

#[test]
fn mod_pow_matches_repeated_multiplication() {
    for m in 1..=1000u64 {
        for a in (0..=1000u64).step_by(37) {
            let mut acc = 1 % m;
            for e in 0..=1000u64 {
                if e % 53 == 0 {
                    assert_eq!(mod_pow(&nat(a), &nat(e), &nat(m)).unwrap(), nat(acc), "{a}^{e} mod {m}");
                }
                acc = acc * a % m;
            }
        }
    }
}

proptest! {
    #[test]
    fn factorization_reconstructs(n in 1u64..) {
        let f = factorize(&nat(n)).unwrap();
        prop_assert_eq!(f.value(), nat(n));
        prop_assert!(f.primes().all(is_prime));
    }

    #[test]
    fn wide_factorization_reconstructs(a in 1u64..1 << 40, b in 1u64..1 << 40, c in 1u64..1 << 20) {
        let n = nat(a) * nat(b) * nat(c);
        let f = factorize(&n).unwrap();
        prop_assert_eq!(f.value(), n);
        prop_assert!(f.primes().all(is_prime));
    }

    #[test]
    fn gcd_lcm_product(a in 1u64..1 << 32, b in 1u64..1 << 32) {
        prop_assert_eq!(gcd(&nat(a), &nat(b)) * lcm(&nat(a), &nat(b)).unwrap(), nat(a) * nat(b));
    }
}

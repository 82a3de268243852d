use std::sync::OnceLock;

use num_bigint::RandBigInt;
use num_traits::{One, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{mod_pow_u64, mul_mod_u64, Nat};

/// Miller-Rabin rounds for inputs of 64 bits or more. Each round lets a
/// composite through with probability at most 1/4, so 64 rounds bound the
/// error by 2^-128.
pub const MR_ROUNDS_ABOVE_U64: usize = 64;

/// Bases that make Miller-Rabin deterministic for every n < 2^64.
const U64_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

const SIEVE_LIMIT: usize = 1 << 16;

// Fixed so that repeated runs draw the same witnesses.
const WITNESS_SEED: u64 = 0x005e_ed0f_9a75_u64;

/// Primes below 2^16, ascending.
pub(crate) fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut composite = vec![false; SIEVE_LIMIT];
        let mut out = Vec::new();
        for i in 2..SIEVE_LIMIT {
            if !composite[i] {
                out.push(i as u32);
                let mut j = i * i;
                while j < SIEVE_LIMIT {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        out
    })
}

fn strong_probable_prime_u64(n: u64, d: u64, s: u32, a: u64) -> bool {
    let mut x = mod_pow_u64(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod_u64(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Deterministic primality for machine words.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &small_primes()[..12] {
        let p = p as u64;
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    U64_BASES.iter().all(|&a| strong_probable_prime_u64(n, d, s, a))
}

fn strong_probable_prime(n: &Nat, n_minus_1: &Nat, d: &Nat, s: u64, a: &Nat) -> bool {
    let mut x = a.modpow(d, n);
    if x.is_one() || &x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if &x == n_minus_1 {
            return true;
        }
        if x.is_one() {
            return false;
        }
    }
    false
}

/// Primality test: deterministic below 2^64, Miller-Rabin with
/// [`MR_ROUNDS_ABOVE_U64`] rounds above.
pub fn is_prime(n: &Nat) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    for &p in &small_primes()[..168] {
        if (n % p).is_zero() {
            return false;
        }
    }
    let one = Nat::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;

    if !strong_probable_prime(n, &n_minus_1, &d, s, &Nat::from(2u32)) {
        return false;
    }
    let low_word = n.iter_u64_digits().next().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(WITNESS_SEED ^ low_word);
    let low = Nat::from(3u32);
    let high = &n_minus_1 - &one;
    (1..MR_ROUNDS_ABOVE_U64).all(|_| {
        let a = rng.gen_biguint_range(&low, &high);
        strong_probable_prime(n, &n_minus_1, &d, s, &a)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    fn trial(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
    }

    #[test]
    fn agrees_with_trial_division_below_a_million() {
        for n in 0..1_000_000u64 {
            assert_eq!(is_prime_u64(n), trial(n), "n = {n}");
        }
    }

    #[test]
    fn examples() {
        assert!(is_prime(&Nat::from(4903u32)));
        assert!(is_prime(&Nat::from(5773040306503u64)));
        assert!(!is_prime(&Nat::from(1u32)));
        assert!(!is_prime(&Nat::from(0u32)));
    }

    #[test]
    fn strong_pseudoprimes_rejected() {
        // strong pseudoprime to every prime base up to 23
        assert!(!is_prime_u64(3825123056546413051));
        // Carmichael number
        assert!(!is_prime_u64(561));
        assert!(is_prime_u64(18446744073709551557)); // largest prime below 2^64
    }

    #[test]
    fn wide_inputs() {
        let m127 = (Nat::one() << 127u32) - 1u32;
        assert!(is_prime(&m127));
        let m128 = (Nat::one() << 128u32) + 1u32; // 2^128 + 1 = 59649589127497217 * 5704689200685129054721
        assert!(!is_prime(&m128));
        let p1 = Nat::from_str("1729101023519").unwrap();
        let p2 = Nat::from_str("2217342227").unwrap();
        assert!(!is_prime(&(&p1 * &p2 * &p1)));
        let q = Nat::from(18446744073709551557u64);
        assert!(!is_prime(&(&q * &q)));
    }
}

//! Trial division by the primes below 2^16 followed by Brent's variant of
//! Pollard's rho on whatever composite cofactor remains.

use std::sync::atomic::{AtomicU64, Ordering};

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::prime::{is_prime, is_prime_u64, small_primes};
use super::{mul_mod_u64, Factorization, Nat};
use crate::{Error, Result};

/// Default budget of rho iterations per factorization. Every number built
/// from the weak primary pseudoperfect catalog needs well under 10^6.
pub const DEFAULT_FACTOR_CAP: u64 = 50_000_000;

static FACTOR_CAP: AtomicU64 = AtomicU64::new(DEFAULT_FACTOR_CAP);

pub fn default_factor_cap() -> u64 {
    FACTOR_CAP.load(Ordering::Relaxed)
}

/// Sets the iteration budget used by [`factorize`] (process wide).
pub fn set_default_factor_cap(iterations: u64) {
    FACTOR_CAP.store(iterations, Ordering::Relaxed);
}

/// Complete prime factorization of `n` under the default iteration budget.
pub fn factorize(n: &Nat) -> Result<Factorization> {
    factorize_with_cap(n, default_factor_cap())
}

pub fn factorize_with_cap(n: &Nat, cap: u64) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::Zero {
            what: "factorization input",
        });
    }
    let mut factors: Vec<(Nat, u32)> = Vec::new();
    let rest = strip_small(n, &mut factors);
    if rest.is_one() {
        return Ok(Factorization::from_factors(factors));
    }

    let mut budget = Budget { left: cap };
    let mut pending = vec![rest];
    while let Some(m) = pending.pop() {
        if is_prime(&m) {
            factors.push((m, 1));
            continue;
        }
        match split(&m, &mut budget) {
            Some(d) => {
                let other = &m / &d;
                pending.push(d);
                pending.push(other);
            }
            None => {
                return Err(Error::FactorizationIncomplete {
                    n: n.clone(),
                    cofactor: m,
                    iterations: cap,
                })
            }
        }
    }
    Ok(Factorization::from_factors(factors))
}

/// Divides out every prime below 2^16 and returns the cofactor. A returned
/// cofactor below 2^32 is 1 or prime.
fn strip_small(n: &Nat, factors: &mut Vec<(Nat, u32)>) -> Nat {
    if let Some(mut v) = n.to_u64() {
        for &p in small_primes() {
            let p = p as u64;
            if p * p > v {
                break;
            }
            let mut e = 0;
            while v % p == 0 {
                v /= p;
                e += 1;
            }
            if e > 0 {
                factors.push((Nat::from(p), e));
            }
        }
        if v > 1 && v < (1u64 << 32) {
            factors.push((Nat::from(v), 1));
            return Nat::one();
        }
        return Nat::from(v);
    }

    let mut rest = n.clone();
    for &p in small_primes() {
        if let Some(v) = rest.to_u64() {
            // finish on machine words
            let mut sub = Vec::new();
            let r = strip_small(&Nat::from(v), &mut sub);
            factors.extend(sub);
            return r;
        }
        let mut e = 0;
        loop {
            let (q, r) = rest.div_rem(&Nat::from(p));
            if !r.is_zero() {
                break;
            }
            rest = q;
            e += 1;
        }
        if e > 0 {
            factors.push((Nat::from(p), e));
        }
    }
    rest
}

struct Budget {
    left: u64,
}

impl Budget {
    fn spend(&mut self, n: u64) -> bool {
        if self.left < n {
            self.left = 0;
            false
        } else {
            self.left -= n;
            true
        }
    }
}

/// A nontrivial divisor of the composite `n`, or `None` once the budget runs out.
fn split(n: &Nat, budget: &mut Budget) -> Option<Nat> {
    if let Some(r) = perfect_square_root(n) {
        return Some(r);
    }
    if let Some(v) = n.to_u64() {
        for c in 1.. {
            match brent_u64(v, c, budget) {
                Rho::Found(d) => return Some(Nat::from(d)),
                Rho::Retry => continue,
                Rho::Exhausted => return None,
            }
        }
    }
    for c in 1u32.. {
        match brent_big(n, &Nat::from(c), budget) {
            Rho::Found(d) => return Some(d),
            Rho::Retry => continue,
            Rho::Exhausted => return None,
        }
    }
    unreachable!()
}

fn perfect_square_root(n: &Nat) -> Option<Nat> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

enum Rho<T> {
    Found(T),
    Retry,
    Exhausted,
}

const BATCH: u64 = 128;

fn brent_u64(n: u64, c: u64, budget: &mut Budget) -> Rho<u64> {
    debug_assert!(!is_prime_u64(n));
    let c = c % n;
    let f = |x: u64| ((mul_mod_u64(x, x, n) as u128 + c as u128) % n as u128) as u64;
    let mut y = 2u64;
    let mut x = y;
    let mut ys = y;
    let mut q = 1u64;
    let mut g = 1u64;
    let mut r = 1u64;
    while g == 1 {
        x = y;
        if !budget.spend(r) {
            return Rho::Exhausted;
        }
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0;
        while k < r && g == 1 {
            ys = y;
            let steps = BATCH.min(r - k);
            if !budget.spend(steps) {
                return Rho::Exhausted;
            }
            for _ in 0..steps {
                y = f(y);
                q = mul_mod_u64(q, x.abs_diff(y), n);
            }
            g = q.gcd(&n);
            k += BATCH;
        }
        r *= 2;
    }
    if g == n {
        loop {
            ys = f(ys);
            g = x.abs_diff(ys).gcd(&n);
            if g > 1 {
                break;
            }
        }
    }
    if g == n {
        Rho::Retry
    } else {
        Rho::Found(g)
    }
}

fn brent_big(n: &Nat, c: &Nat, budget: &mut Budget) -> Rho<Nat> {
    let f = |x: &Nat| (x * x + c) % n;
    let diff = |a: &Nat, b: &Nat| if a >= b { a - b } else { b - a };
    let mut y = Nat::from(2u32);
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut q = Nat::one();
    let mut g = Nat::one();
    let mut r = 1u64;
    while g.is_one() {
        x = y.clone();
        if !budget.spend(r) {
            return Rho::Exhausted;
        }
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let steps = BATCH.min(r - k);
            if !budget.spend(steps) {
                return Rho::Exhausted;
            }
            for _ in 0..steps {
                y = f(&y);
                q = (q * diff(&x, &y)) % n;
            }
            g = q.gcd(n);
            k += BATCH;
        }
        r *= 2;
    }
    if &g == n {
        loop {
            ys = f(&ys);
            g = diff(&x, &ys).gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    if &g == n {
        Rho::Retry
    } else {
        Rho::Found(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    fn pairs(n: u64) -> Vec<(u64, u32)> {
        factorize(&Nat::from(n))
            .unwrap()
            .factors()
            .iter()
            .map(|(p, e)| (p.to_u64().unwrap(), *e))
            .collect()
    }

    #[test]
    fn examples() {
        assert_eq!(pairs(1806), vec![(2, 1), (3, 1), (7, 1), (43, 1)]);
        assert_eq!(pairs(34314), vec![(2, 1), (3, 1), (7, 1), (19, 1), (43, 1)]);
        assert!(pairs(1).is_empty());
        assert!(factorize(&Nat::zero()).is_err());
    }

    #[test]
    fn reconstructs_every_n_up_to_1e5() {
        for n in 1..=100_000u64 {
            let f = factorize(&Nat::from(n)).unwrap();
            assert_eq!(f.value(), Nat::from(n));
            assert!(f.primes().all(is_prime));
            assert!(f.primes().zip(f.primes().skip(1)).all(|(a, b)| a < b));
        }
    }

    #[test]
    fn word_sized_semiprimes() {
        // two primes above 2^16 so trial division cannot help
        assert_eq!(pairs(4294967291 * 65537), vec![(65537, 1), (4294967291, 1)]);
        assert_eq!(pairs(1000003 * 1000003), vec![(1000003, 2)]);
        assert_eq!(pairs(168241543 * 4903 * 19), vec![(19, 1), (4903, 1), (168241543, 1)]);
    }

    #[test]
    fn largest_catalog_number() {
        let n = Nat::from_str("8490421583559688410706771261086").unwrap();
        let f = factorize(&n).unwrap();
        let primes: Vec<String> = f.primes().map(|p| p.to_string()).collect();
        assert_eq!(
            primes,
            ["2", "3", "11", "23", "31", "47059", "2217342227", "1729101023519"]
        );
        assert_eq!(f.value(), n);
        assert!(f.is_square_free());
    }

    #[test]
    fn cap_is_reported_not_guessed() {
        let p = Nat::from(1_000_000_000_039u64);
        let q = Nat::from(1_000_000_000_061u64);
        let n = &p * &q;
        match factorize_with_cap(&n, 10) {
            Err(Error::FactorizationIncomplete { cofactor, .. }) => assert_eq!(cofactor, n),
            other => panic!("unexpected {other:?}"),
        }
        let f = factorize_with_cap(&n, 50_000_000).unwrap();
        assert_eq!(f.factors(), &[(p, 1), (q, 1)]);
    }
}

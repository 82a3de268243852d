//! Exact integer kernel: modular exponentiation, gcd/lcm, primality and
//! factorization over arbitrary-precision naturals.

mod factor;
mod prime;

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::{Error, Result};

pub use factor::{default_factor_cap, factorize, factorize_with_cap, set_default_factor_cap};
pub use prime::{is_prime, is_prime_u64, MR_ROUNDS_ABOVE_U64};

/// Arbitrary-precision nonnegative integer.
pub type Nat = BigUint;

pub fn nat(v: u64) -> Nat {
    Nat::from(v)
}

/// `base^exp mod modulus`.
pub fn mod_pow(base: &Nat, exp: &Nat, modulus: &Nat) -> Result<Nat> {
    if modulus.is_zero() {
        return Err(Error::ZeroModulus);
    }
    if modulus.is_one() {
        return Ok(Nat::zero());
    }
    if let (Some(m), Some(e)) = (modulus.to_u64(), exp.to_u64()) {
        let b = (base % modulus).to_u64().unwrap();
        return Ok(Nat::from(mod_pow_u64(b, e, m)));
    }
    Ok(base.modpow(exp, modulus))
}

#[inline]
pub(crate) fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m` on machine words. `m` must be nonzero.
pub fn mod_pow_u64(mut base: u64, mut exp: u64, m: u64) -> u64 {
    debug_assert!(m != 0);
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u64(acc, base, m);
        }
        base = mul_mod_u64(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn gcd(a: &Nat, b: &Nat) -> Nat {
    a.gcd(b)
}

/// Least common multiple; `lcm(0, 0)` is rejected.
pub fn lcm(a: &Nat, b: &Nat) -> Result<Nat> {
    if a.is_zero() && b.is_zero() {
        return Err(Error::Zero { what: "lcm argument" });
    }
    Ok(a.lcm(b))
}

/// `d | n`, with the convention that 0 divides only 0.
pub fn divides(d: &Nat, n: &Nat) -> bool {
    if d.is_zero() {
        n.is_zero()
    } else {
        (n % d).is_zero()
    }
}

/// Prime factorization as `(prime, exponent)` pairs with strictly increasing
/// primes. The factorization of 1 is empty.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Factorization {
    factors: Vec<(Nat, u32)>,
}

impl Factorization {
    pub fn one() -> Self {
        Self::default()
    }

    /// Builds a factorization from prime/exponent pairs in any order,
    /// merging repeated primes. Primality of the entries is the caller's
    /// responsibility.
    pub fn from_factors<I: IntoIterator<Item = (Nat, u32)>>(iter: I) -> Self {
        let mut factors: Vec<(Nat, u32)> = iter.into_iter().filter(|(_, e)| *e > 0).collect();
        factors.sort();
        let mut merged: Vec<(Nat, u32)> = Vec::with_capacity(factors.len());
        for (p, e) in factors {
            match merged.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => merged.push((p, e)),
            }
        }
        Self { factors: merged }
    }

    /// The square-free product of the given primes.
    pub fn square_free<I: IntoIterator<Item = Nat>>(primes: I) -> Self {
        Self::from_factors(primes.into_iter().map(|p| (p, 1)))
    }

    pub fn factors(&self) -> &[(Nat, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = &Nat> {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// The integer this factorization represents.
    pub fn value(&self) -> Nat {
        self.factors.iter().fold(Nat::one(), |acc, (p, e)| acc * p.pow(*e))
    }

    /// Exponent of `p` (0 when `p` does not appear).
    pub fn exponent_of(&self, p: &Nat) -> u32 {
        self.factors
            .binary_search_by(|(q, _)| q.cmp(p))
            .map(|i| self.factors[i].1)
            .unwrap_or(0)
    }

    pub fn is_square_free(&self) -> bool {
        self.factors.iter().all(|(_, e)| *e == 1)
    }

    /// Factorization of `self.value() * p` for a prime `p`.
    pub fn times_prime(&self, p: &Nat) -> Self {
        self.times(&Factorization::from_factors([(p.clone(), 1)]))
    }

    pub fn times(&self, other: &Factorization) -> Self {
        Self::from_factors(self.factors.iter().chain(other.factors.iter()).cloned())
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        for (i, (p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" * ")?;
            }
            if *e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

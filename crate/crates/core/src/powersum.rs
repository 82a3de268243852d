//! Residues of `S_k(n) = 1^k + ... + n^k`.
//!
//! [`naive_power_sum_mod`] sums directly and is the reference everything else
//! is checked against. The closed forms work one prime power at a time:
//!
//! * `d | n` gives `S_k(n) ≡ (n/d) S_k(d) (mod d)`;
//! * for odd `q`, `S_k(q^t) ≡ -q^(t-1)` when `q - 1 | k` and `0` otherwise;
//! * for `q = 2`, `S_k(2^t) ≡ 2^(t-1)` when `t = 1` or `k` is even, `0` when
//!   `t > 1` and `k > 1` is odd.
//!
//! For `k = 1, t > 1` direct summation gives `S_1(2^t) = 2^(t-1)(2^t + 1) ≡
//! 2^(t-1)`, and that value is what [`prime_power_sum_residue`] returns. The
//! case never arises in membership tests: `4 | n` forces `k = n > 1`.

use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{self, factorize, is_prime, mod_pow_u64, Factorization, Nat};
use crate::{Error, Result};

/// `S_k(n) mod m` by direct summation.
pub fn naive_power_sum_mod(k: &Nat, n: &Nat, m: &Nat) -> Result<Nat> {
    if m.is_zero() {
        return Err(Error::ZeroModulus);
    }
    if let (Some(k), Some(n), Some(m)) = (k.to_u64(), n.to_u64(), m.to_u64()) {
        return Ok(Nat::from(naive_power_sum_mod_u64(k, n, m)));
    }
    let mut acc = Nat::zero();
    let mut i = Nat::one();
    while &i <= n {
        acc = (acc + arith::mod_pow(&i, k, m)?) % m;
        i += 1u32;
    }
    Ok(acc)
}

/// Word-sized [`naive_power_sum_mod`]; `m` must be nonzero.
pub fn naive_power_sum_mod_u64(k: u64, n: u64, m: u64) -> u64 {
    let mut acc: u128 = 0;
    for i in 1..=n {
        acc += mod_pow_u64(i, k, m) as u128;
        if acc >= 1 << 100 {
            acc %= m as u128;
        }
    }
    (acc % m as u128) as u64
}

/// `S_k(q^t) mod q^t` for a prime `q`, from the closed forms.
pub fn prime_power_sum_residue(k: &Nat, q: &Nat, t: u32) -> Result<Nat> {
    if t == 0 {
        return Err(Error::Zero { what: "exponent t" });
    }
    if !is_prime(q) {
        return Err(Error::NotPrime(q.clone()));
    }
    Ok(closed_form(k, q, t))
}

fn closed_form(k: &Nat, q: &Nat, t: u32) -> Nat {
    // S_0(q^t) = q^t
    if k.is_zero() {
        return Nat::zero();
    }
    let modulus = q.pow(t);
    let half = q.pow(t - 1);
    if q == &Nat::from(2u32) {
        if t == 1 || k.is_even() || k.is_one() {
            half
        } else {
            Nat::zero()
        }
    } else if arith::divides(&(q - 1u32), k) {
        modulus - half
    } else {
        Nat::zero()
    }
}

/// `S_k(n) mod q^t` for `q^t | n`, as `(n / q^t) * S_k(q^t) mod q^t`.
pub fn residue_at_prime_power(k: &Nat, n: &Nat, q: &Nat, t: u32) -> Result<Nat> {
    let base = prime_power_sum_residue(k, q, t)?;
    let modulus = q.pow(t);
    let (cofactor, rem) = n.div_rem(&modulus);
    if !rem.is_zero() || n.is_zero() {
        return Err(Error::NotDivisible {
            divisor: modulus,
            n: n.clone(),
        });
    }
    Ok((cofactor * base) % modulus)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueEntry {
    pub prime: Nat,
    pub exponent: u32,
    /// `S_n(n) mod prime^exponent`.
    pub residue: Nat,
}

impl ResidueEntry {
    pub fn modulus(&self) -> Nat {
        self.prime.pow(self.exponent)
    }
}

/// `S_n(n) mod n` split over the prime powers of `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResidueBreakdown {
    pub n: Nat,
    pub entries: Vec<ResidueEntry>,
}

impl ResidueBreakdown {
    /// Builds the breakdown from a known factorization of `n`.
    pub fn from_factorization(factorization: &Factorization) -> Self {
        let n = factorization.value();
        let entries = factorization
            .factors()
            .iter()
            .map(|(q, t)| {
                let modulus = q.pow(*t);
                let residue = (&n / &modulus * closed_form(&n, q, *t)) % &modulus;
                ResidueEntry {
                    prime: q.clone(),
                    exponent: *t,
                    residue,
                }
            })
            .collect();
        Self { n, entries }
    }

    /// Recombines the entries by CRT into `S_n(n) mod n`.
    pub fn crt_value(&self) -> Nat {
        let mut value = Nat::zero();
        let mut modulus = Nat::one();
        for e in &self.entries {
            let m = e.modulus();
            // value + modulus * x ≡ residue (mod m)
            let inv = (&modulus % &m).modinv(&m).unwrap_or_else(Nat::zero);
            let target = (&e.residue + &m - (&value % &m)) % &m;
            let x = (target * inv) % &m;
            value += &modulus * x;
            modulus *= m;
        }
        value
    }

    /// Whether `S_n(n) ≡ m (mod n)`, compared prime power by prime power.
    pub fn matches(&self, m: &Nat) -> bool {
        self.entries.iter().all(|e| m % e.modulus() == e.residue)
    }
}

pub fn s_n_n_breakdown(n: &Nat) -> Result<ResidueBreakdown> {
    if n.is_zero() {
        return Err(Error::Zero { what: "n" });
    }
    Ok(ResidueBreakdown::from_factorization(&factorize(n)?))
}

/// `S_n(n) ≡ m (mod n)`.
pub fn is_member(n: &Nat, m: &Nat) -> Result<bool> {
    Ok(s_n_n_breakdown(n)?.matches(m))
}

/// [`is_member`] for an already factored `n`.
pub fn is_member_factored(n: &Factorization, m: &Nat) -> bool {
    ResidueBreakdown::from_factorization(n).matches(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::nat;

    #[test]
    fn naive_examples() {
        assert_eq!(naive_power_sum_mod(&nat(6), &nat(6), &nat(6)).unwrap(), nat(1));
        assert_eq!(naive_power_sum_mod(&nat(2), &nat(9), &nat(9)).unwrap(), nat(6));
        assert_eq!(naive_power_sum_mod(&nat(5), &nat(0), &nat(7)).unwrap(), nat(0));
        assert_eq!(naive_power_sum_mod(&nat(1), &nat(3), &nat(0)), Err(Error::ZeroModulus));
    }

    #[test]
    fn naive_wide_path_matches_word_path() {
        let big_m = (Nat::one() << 70u32) + 1u32;
        let wide = naive_power_sum_mod(&nat(5), &nat(50), &big_m).unwrap();
        let exact: Nat = (1..=50u32).map(|i| Nat::from(i).pow(5)).sum();
        assert_eq!(wide, exact % big_m);
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(prime_power_sum_residue(&nat(2), &nat(3), 1).unwrap(), nat(2));
        assert_eq!(prime_power_sum_residue(&nat(3), &nat(2), 2).unwrap(), nat(0));
        assert_eq!(prime_power_sum_residue(&nat(12), &nat(2), 2).unwrap(), nat(2));
        assert_eq!(prime_power_sum_residue(&nat(1), &nat(2), 2).unwrap(), nat(2));
        assert_eq!(
            prime_power_sum_residue(&nat(2), &nat(4), 1),
            Err(Error::NotPrime(nat(4)))
        );
    }

    #[test]
    fn residue_at_prime_power_examples() {
        assert_eq!(residue_at_prime_power(&nat(42), &nat(42), &nat(7), 1).unwrap(), nat(1));
        assert_eq!(residue_at_prime_power(&nat(12), &nat(12), &nat(2), 2).unwrap(), nat(2));
        for q in [3u64, 5, 7, 11, 13, 101] {
            assert_eq!(residue_at_prime_power(&nat(1), &nat(q), &nat(q), 1).unwrap(), nat(0));
        }
        assert!(matches!(
            residue_at_prime_power(&nat(2), &nat(12), &nat(2), 3),
            Err(Error::NotDivisible { .. })
        ));
    }

    #[test]
    fn breakdown_examples() {
        let b = s_n_n_breakdown(&nat(42)).unwrap();
        let triples: Vec<_> = b
            .entries
            .iter()
            .map(|e| (e.prime.clone(), e.exponent, e.residue.clone()))
            .collect();
        assert_eq!(
            triples,
            vec![(nat(2), 1, nat(1)), (nat(3), 1, nat(1)), (nat(7), 1, nat(1))]
        );
        assert_eq!(b.crt_value(), nat(1));

        assert!(s_n_n_breakdown(&nat(1)).unwrap().entries.is_empty());

        let b = s_n_n_breakdown(&nat(4)).unwrap();
        assert_eq!(
            b.entries,
            vec![ResidueEntry {
                prime: nat(2),
                exponent: 2,
                residue: nat(2)
            }]
        );
    }

    #[test]
    fn membership_examples() {
        assert!(is_member(&nat(34314), &nat(19)).unwrap());
        assert!(is_member(&nat(1), &nat(12345)).unwrap());
        assert!(is_member(&nat(1), &nat(0)).unwrap());
        assert!(!is_member(&nat(42), &nat(19)).unwrap());
        assert!(is_member(&nat(42), &nat(1)).unwrap());
        // m larger than n is reduced per prime power
        assert!(is_member(&nat(42), &nat(43)).unwrap());
    }
}

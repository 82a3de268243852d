//! Weak primary pseudoperfect numbers: `n` with `Σ_{p | n} n/p + 1 ≡ 0 (mod n)`.
//!
//! If `p | n ∈ M_p` then `n/p` is one of these, which bounds every solution
//! by `p` times the largest known one.

use num_integer::Integer;
use num_traits::{One, Zero};

use crate::arith::{divides, factorize, is_prime, Factorization, Nat};
use crate::powersum::is_member_factored;
use crate::structure::{mp0, mp2_candidates, Completeness, MpReport};
use crate::{Error, Result};

pub fn is_wpp(n: &Nat) -> Result<bool> {
    if n.is_zero() {
        return Err(Error::Zero { what: "n" });
    }
    Ok(is_wpp_factored(&factorize(n)?))
}

pub fn is_wpp_factored(n: &Factorization) -> bool {
    let value = n.value();
    let sum: Nat = n.primes().map(|p| &value / p).sum::<Nat>() + 1u32;
    (sum % value).is_zero()
}

/// `lcm{(p - 1) / gcd(p - 1, Q) : p | Q}`, and 1 for `Q = 1`.
pub fn n_q(q: &Nat) -> Result<Nat> {
    if q.is_zero() {
        return Err(Error::Zero { what: "Q" });
    }
    Ok(n_q_factored(&factorize(q)?))
}

pub fn n_q_factored(q: &Factorization) -> Nat {
    let value = q.value();
    q.primes().fold(Nat::one(), |acc, p| {
        let p_minus_1 = p - 1u32;
        let g = p_minus_1.gcd(&value);
        acc.lcm(&(p_minus_1 / g))
    })
}

/// Whether no `m` satisfies `S_{Qm}(Qm) ≡ m (mod Qm)`: true iff some prime
/// `q | n_Q` has `q - 1 | Q·n_Q`.
pub fn mq_empty(q: &Nat) -> Result<bool> {
    let nq = n_q(q)?;
    let witness_product = q * &nq;
    Ok(factorize(&nq)?.primes().any(|r| divides(&(r - 1u32), &witness_product)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WppEntry {
    pub value: Nat,
    pub factorization: Factorization,
    pub n_q: Nat,
}

impl WppEntry {
    fn new(factorization: Factorization) -> Self {
        Self {
            value: factorization.value(),
            n_q: n_q_factored(&factorization),
            factorization,
        }
    }
}

const KNOWN_FACTORED: [&[u64]; 9] = [
    &[],
    &[2],
    &[2, 3],
    &[2, 3, 7],
    &[2, 3, 7, 43],
    &[2, 3, 11, 23, 31],
    &[2, 3, 11, 23, 31, 47059],
    &[2, 3, 11, 17, 101, 149, 3109],
    &[2, 3, 11, 23, 31, 47059, 2217342227, 1729101023519],
];

/// The nine known values, as decimal strings.
pub const KNOWN_VALUES: [&str; 9] = [
    "1",
    "2",
    "6",
    "42",
    "1806",
    "47058",
    "2214502422",
    "52495396602",
    "8490421583559688410706771261086",
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WppCatalog {
    pub entries: Vec<WppEntry>,
}

impl WppCatalog {
    /// The known weak primary pseudoperfect numbers with compiled-in
    /// factorizations.
    pub fn known() -> Self {
        let entries = KNOWN_FACTORED
            .iter()
            .map(|primes| WppEntry::new(Factorization::square_free(primes.iter().map(|&q| Nat::from(q)))))
            .collect();
        Self { entries }
    }

    /// Builds a catalog by factoring each value.
    pub fn from_values(values: &[Nat]) -> Result<Self> {
        let mut entries = values
            .iter()
            .map(|v| factorize(v).map(WppEntry::new))
            .collect::<Result<Vec<_>>>()?;
        entries.sort_by(|a, b| a.value.cmp(&b.value));
        Ok(Self { entries })
    }

    pub fn max(&self) -> Nat {
        self.entries.last().map(|e| e.value.clone()).unwrap_or_else(Nat::one)
    }

    pub fn values(&self) -> Vec<Nat> {
        self.entries.iter().map(|e| e.value.clone()).collect()
    }

    /// Rechecks every entry: prime factors, product, defining congruence and
    /// `n_Q`. Returns the values that fail.
    pub fn failures(&self) -> Vec<Nat> {
        self.entries
            .iter()
            .filter(|e| {
                !(e.factorization.primes().all(is_prime)
                    && e.factorization.value() == e.value
                    && is_wpp_factored(&e.factorization)
                    && n_q_factored(&e.factorization) == e.n_q)
            })
            .map(|e| e.value.clone())
            .collect()
    }
}

/// `p·Q` for catalog entries `Q` with `n_Q | p` and `n_Q - 1 ∤ Q` that also
/// pass the direct residue test. With `n_Q = 1` the second condition reads
/// `0 ∤ Q` and holds for every `Q ≥ 1`.
pub fn mp1_bounded(p: &Nat, catalog: &WppCatalog) -> Result<Vec<Nat>> {
    Ok(mp1_factored(p, catalog)?.iter().map(Factorization::value).collect())
}

fn mp1_factored(p: &Nat, catalog: &WppCatalog) -> Result<Vec<Factorization>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p.clone()));
    }
    let mut out: Vec<Factorization> = catalog
        .entries
        .iter()
        .filter(|e| divides(&e.n_q, p) && !divides(&(&e.n_q - 1u32), &e.value))
        .map(|e| e.factorization.times_prime(p))
        .filter(|f| is_member_factored(f, p))
        .collect();
    out.sort_by_key(Factorization::value);
    Ok(out)
}

/// Every element of `M_p` up to `p · max(catalog)`.
pub fn mp_bounded(p: &Nat, catalog: &WppCatalog) -> Result<MpReport> {
    let m0 = mp0(p)?.iter().map(factorize).collect::<Result<Vec<_>>>()?;
    let m1 = mp1_factored(p, catalog)?;
    let m2 = mp2_candidates(p)?.iter().map(factorize).collect::<Result<Vec<_>>>()?;
    let bound = p * catalog.max();
    Ok(MpReport::from_candidates(
        p,
        m0.into_iter().chain(m1).chain(m2),
        Completeness::UpToBound(bound),
        None,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::nat;
    use std::str::FromStr;

    fn nats(v: &[u64]) -> Vec<Nat> {
        v.iter().map(|&x| nat(x)).collect()
    }

    #[test]
    fn is_wpp_examples() {
        assert!(is_wpp(&nat(47058)).unwrap());
        assert!(!is_wpp(&nat(10)).unwrap());
        assert!(is_wpp(&nat(1)).unwrap());
        assert!(is_wpp(&nat(0)).is_err());
    }

    #[test]
    fn n_q_examples() {
        assert_eq!(n_q(&nat(47058)).unwrap(), nat(5));
        assert_eq!(n_q(&nat(2214502422)).unwrap(), nat(5));
        assert_eq!(n_q(&nat(1806)).unwrap(), nat(1));
        assert_eq!(n_q(&nat(1)).unwrap(), nat(1));
    }

    #[test]
    fn mq_empty_examples() {
        assert!(!mq_empty(&nat(47058)).unwrap());
        assert!(!mq_empty(&nat(1)).unwrap());
        assert!(!mq_empty(&nat(1806)).unwrap());
    }

    #[test]
    fn catalog_values_match_constants() {
        let cat = WppCatalog::known();
        let expected: Vec<Nat> = KNOWN_VALUES.iter().map(|s| Nat::from_str(s).unwrap()).collect();
        assert_eq!(cat.values(), expected);
        assert!(cat.failures().is_empty());
        assert_eq!(cat.max(), expected[8]);
    }

    #[test]
    fn mp1_examples() {
        let cat = WppCatalog::known();
        assert_eq!(
            mp1_bounded(&nat(5), &cat).unwrap(),
            nats(&[5, 10, 30, 210, 9030, 235290, 11072512110])
        );
        assert_eq!(mp1_bounded(&nat(19), &cat).unwrap(), nats(&[19, 38, 114, 798, 34314]));
        assert_eq!(mp1_bounded(&nat(11), &cat).unwrap(), nats(&[11, 22, 66, 462, 19866]));
        assert!(mp1_bounded(&nat(12), &cat).is_err());
    }

    #[test]
    fn mp_bounded_examples() {
        let cat = WppCatalog::known();
        let r = mp_bounded(&nat(5), &cat).unwrap();
        assert_eq!(r.values(), nats(&[1, 2, 5, 10, 30, 210, 9030, 235290, 11072512110]));
        assert_eq!(r.completeness, Completeness::UpToBound(nat(5) * cat.max()));

        let r = mp_bounded(&nat(3), &cat).unwrap();
        assert_eq!(r.values(), nats(&[1, 2, 3, 18, 126, 5418]));

        let r = mp_bounded(&nat(67), &cat).unwrap();
        assert_eq!(r.values(), nats(&[1, 2, 6, 67, 134, 402, 2814, 121002]));
    }
}

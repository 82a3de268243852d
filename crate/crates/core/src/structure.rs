//! Structural membership predicates and assembly of `M_p` from its three
//! parts `M_p^(0)`, `M_p^(1)`, `M_p^(2)` (elements with `p ∤ n`, `p ∥ n`,
//! `p² ∥ n`).

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::arith::{divides, factorize, is_prime, Factorization, Nat};
use crate::powersum::is_member_factored;
use crate::qp::QpState;
use crate::{Error, Result};

/// The five solutions of `S_n(n) ≡ 1 (mod n)`.
pub const M1_VALUES: [u64; 5] = [1, 2, 6, 42, 1806];

/// The only primes whose square can divide an element of `M_p` with `p` prime.
pub const SPECIAL_PRIMES: [u64; 4] = [2, 3, 7, 43];

pub struct M1Set;

impl M1Set {
    pub fn elements() -> Vec<Nat> {
        M1_VALUES.iter().map(|&v| Nat::from(v)).collect()
    }

    pub fn contains(n: &Nat) -> bool {
        M1_VALUES.iter().any(|&v| Nat::from(v) == *n)
    }

    fn factorizations() -> Vec<Factorization> {
        // 1, 2, 2·3, 2·3·7, 2·3·7·43
        (0..=SPECIAL_PRIMES.len())
            .map(|k| Factorization::square_free(SPECIAL_PRIMES[..k].iter().map(|&q| Nat::from(q))))
            .collect()
    }
}

pub fn is_special_prime(p: &Nat) -> bool {
    SPECIAL_PRIMES.iter().any(|&q| Nat::from(q) == *p)
}

fn require_prime(p: &Nat) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p.clone()))
    }
}

/// Membership in `M_p` for prime `p` from the shape of the factorization of
/// `n = p^s q_1 ... q_r`:
///
/// 1. `s ≤ 2` and the `q_i` are distinct primes other than `p`;
/// 2. `q_i - 1 | n` and `n/q_i + p ≡ 0 (mod q_i)` for every `i`;
/// 3. `s = 1` implies `p - 1 ∤ n`;
/// 4. `s = 2` implies `p - 1 | n` and `n/p² + 1 ≡ 0 (mod p)`.
pub fn theorem1_check(n: &Nat, p: &Nat) -> Result<bool> {
    require_prime(p)?;
    if n.is_zero() {
        return Err(Error::Zero { what: "n" });
    }
    Ok(theorem1_check_factored(&factorize(n)?, p))
}

pub fn theorem1_check_factored(n: &Factorization, p: &Nat) -> bool {
    let value = n.value();
    let p_minus_1 = p - 1u32;
    let s = n.exponent_of(p);
    if s > 2 {
        return false;
    }
    let others_ok = n
        .factors()
        .iter()
        .filter(|(q, _)| q != p)
        .all(|(q, u)| *u == 1 && divides(&(q - 1u32), &value) && ((&value / q + p) % q).is_zero());
    if !others_ok {
        return false;
    }
    match s {
        1 => !divides(&p_minus_1, &value),
        2 => divides(&p_minus_1, &value) && ((&value / (p * p) + 1u32) % p).is_zero(),
        _ => true,
    }
}

/// Membership in `M_m` for arbitrary `m ≥ 1` with `m = ∏ p_j^{r_j}` and
/// `n = q_1 ... q_r ∏ p_j^{t_j}`:
///
/// 1. `t_j ≤ r_j + 1` and the `q_i` (primes not dividing `m`) appear once;
/// 2. `q_i - 1 | n` and `n/q_i + m ≡ 0 (mod q_i)`;
/// 3. `0 < t_j ≤ r_j` implies `p_j - 1 ∤ n`;
/// 4. `t_j = r_j + 1` implies `p_j - 1 | n` and
///    `n/p_j^{t_j} + m/p_j^{r_j} ≡ 0 (mod p_j)`.
///
/// In 4 the unit part `m/p_j^{r_j}` is what the prime-power residue
/// `-(n/p_j^{t_j}) p_j^{r_j} ≡ m (mod p_j^{r_j+1})` requires; it equals 1 when
/// `m` is prime, recovering [`theorem1_check`]. With a bare `+ 1` the
/// predicate would misclassify e.g. `36 ∈ M_6`.
pub fn theorem_g_check(n: &Nat, m: &Nat) -> Result<bool> {
    if n.is_zero() {
        return Err(Error::Zero { what: "n" });
    }
    if m.is_zero() {
        return Err(Error::Zero { what: "m" });
    }
    Ok(theorem_g_check_factored(&factorize(n)?, &factorize(m)?))
}

pub fn theorem_g_check_factored(n: &Factorization, m: &Factorization) -> bool {
    let value = n.value();
    let m_value = m.value();
    for (pj, rj) in m.factors() {
        let t = n.exponent_of(pj);
        let pj_minus_1 = pj - 1u32;
        if t > rj + 1 {
            return false;
        }
        if t > 0 && t <= *rj && divides(&pj_minus_1, &value) {
            return false;
        }
        if t == rj + 1 {
            let unit = &m_value / pj.pow(*rj);
            if !divides(&pj_minus_1, &value) || !((&value / pj.pow(t) + unit) % pj).is_zero() {
                return false;
            }
        }
    }
    n.factors()
        .iter()
        .filter(|(q, _)| m.exponent_of(q) == 0)
        .all(|(q, u)| *u == 1 && divides(&(q - 1u32), &value) && ((&value / q + &m_value) % q).is_zero())
}

/// `M_p^(0) = {n ∈ M_1 : p ≡ 1 (mod n)}`.
pub fn mp0(p: &Nat) -> Result<Vec<Nat>> {
    require_prime(p)?;
    let p_minus_1 = p - 1u32;
    Ok(M1Set::elements()
        .into_iter()
        .filter(|n| divides(n, &p_minus_1))
        .collect())
}

/// Elements of `M_p^(2)`. Empty unless `p ∈ {2, 3, 7, 43}`; otherwise every
/// `p² d` with `d` a square-free product over the other special primes that
/// passes [`theorem1_check`].
pub fn mp2_candidates(p: &Nat) -> Result<Vec<Nat>> {
    require_prime(p)?;
    Ok(mp2_factored(p).iter().map(Factorization::value).collect())
}

fn mp2_factored(p: &Nat) -> Vec<Factorization> {
    if !is_special_prime(p) {
        return Vec::new();
    }
    let others: Vec<Nat> = SPECIAL_PRIMES
        .iter()
        .map(|&q| Nat::from(q))
        .filter(|q| q != p)
        .collect();
    let square = Factorization::from_factors([(p.clone(), 2)]);
    let mut out: Vec<Factorization> = (0u32..1 << others.len())
        .map(|mask| {
            let d = Factorization::square_free(
                others
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, q)| q.clone()),
            );
            square.times(&d)
        })
        .filter(|f| theorem1_check_factored(f, p))
        .collect();
    out.sort_by_key(Factorization::value);
    out
}

/// Which part of `M_p` an element belongs to.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Part {
    /// `p ∤ n`
    M0,
    /// `p ∥ n`
    M1,
    /// `p² ∥ n`
    M2,
}

impl Part {
    pub fn label(self) -> &'static str {
        match self {
            Part::M0 => "M0-part",
            Part::M1 => "M1-part",
            Part::M2 => "M2-part",
        }
    }
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Completeness {
    /// The listed elements are all of `M_p`.
    ProvenComplete,
    /// The listed elements are all elements of `M_p` not exceeding the bound.
    UpToBound(Nat),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MpElement {
    pub value: Nat,
    pub part: Part,
    pub factorization: Factorization,
}

/// A computed solution set of `S_n(n) ≡ p (mod n)`.
#[derive(Clone, Debug)]
pub struct MpReport {
    pub modulus: Nat,
    pub elements: Vec<MpElement>,
    pub completeness: Completeness,
    pub qp: Option<QpState>,
}

impl MpReport {
    /// Deduplicates, sorts and tags the candidates. Anything that fails the
    /// direct residue test is dropped, as is anything above the bound.
    pub(crate) fn from_candidates<I>(p: &Nat, candidates: I, completeness: Completeness, qp: Option<QpState>) -> Self
    where
        I: IntoIterator<Item = Factorization>,
    {
        let mut by_value: BTreeMap<Nat, Factorization> = BTreeMap::new();
        for f in candidates {
            by_value.entry(f.value()).or_insert(f);
        }
        let bound = match &completeness {
            Completeness::UpToBound(b) => Some(b.clone()),
            Completeness::ProvenComplete => None,
        };
        let elements = by_value
            .into_iter()
            .filter(|(v, _)| bound.as_ref().is_none_or(|b| v <= b))
            .filter(|(_, f)| is_member_factored(f, p))
            .map(|(value, factorization)| {
                let part = match factorization.exponent_of(p) {
                    0 => Part::M0,
                    1 => Part::M1,
                    _ => Part::M2,
                };
                MpElement {
                    value,
                    part,
                    factorization,
                }
            })
            .collect();
        Self {
            modulus: p.clone(),
            elements,
            completeness,
            qp,
        }
    }

    pub fn values(&self) -> Vec<Nat> {
        self.elements.iter().map(|e| e.value.clone()).collect()
    }

    /// Keeps only elements `≤ bound` and weakens the completeness claim to match.
    pub fn truncate_to(mut self, bound: &Nat) -> Self {
        self.elements.retain(|e| &e.value <= bound);
        self.completeness = match self.completeness {
            Completeness::UpToBound(b) if &b < bound => Completeness::UpToBound(b),
            _ => Completeness::UpToBound(bound.clone()),
        };
        self
    }
}

/// `M_p ⊆ M_1 ∪ p·N_p ∪ p²·(...)`: collects `mp0(p)`, the elements `p·n` for
/// `n` in `np_list` that pass [`theorem1_check`], and [`mp2_candidates`].
pub fn assemble_mp(p: &Nat, np_list: &[Nat], completeness: Completeness, qp: Option<QpState>) -> Result<MpReport> {
    let np = np_list.iter().map(factorize).collect::<Result<Vec<_>>>()?;
    assemble_mp_factored(p, &np, completeness, qp)
}

/// [`assemble_mp`] for `N_p` members whose factorizations are already known.
pub fn assemble_mp_factored(
    p: &Nat,
    np_list: &[Factorization],
    completeness: Completeness,
    qp: Option<QpState>,
) -> Result<MpReport> {
    require_prime(p)?;
    let p_minus_1 = p - 1u32;
    let m0 = M1Set::factorizations()
        .into_iter()
        .filter(|f| divides(&f.value(), &p_minus_1));
    let m1 = np_list
        .iter()
        .map(|f| f.times_prime(p))
        .filter(|f| theorem1_check_factored(f, p));
    let m2 = mp2_factored(p);
    Ok(MpReport::from_candidates(p, m0.chain(m1).chain(m2), completeness, qp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::nat;

    fn nats(v: &[u64]) -> Vec<Nat> {
        v.iter().map(|&x| nat(x)).collect()
    }

    #[test]
    fn m1_factorizations_match_values() {
        let values: Vec<Nat> = M1Set::factorizations().iter().map(Factorization::value).collect();
        assert_eq!(values, M1Set::elements());
    }

    #[test]
    fn theorem1_examples() {
        assert!(theorem1_check(&nat(34314), &nat(19)).unwrap());
        assert!(!theorem1_check(&nat(42), &nat(19)).unwrap());
        assert!(!theorem1_check(&nat(8), &nat(2)).unwrap());
        assert_eq!(theorem1_check(&nat(8), &nat(9)), Err(Error::NotPrime(nat(9))));
    }

    #[test]
    fn theorem_g_examples() {
        assert!(theorem_g_check(&nat(1806), &nat(1)).unwrap());
        assert!(theorem_g_check(&nat(12), &nat(2)).unwrap());
        assert!(!theorem_g_check(&nat(10), &nat(4)).unwrap());
        // unit part of m matters: 36 = 2²·3², m = 6 = 2·3, 36/9 + 6/3 = 6 ≡ 0 (mod 3)
        assert!(theorem_g_check(&nat(36), &nat(6)).unwrap());
        assert!(!theorem_g_check(&nat(100), &nat(10)).unwrap());
        assert!(theorem_g_check(&nat(0), &nat(1)).is_err());
    }

    #[test]
    fn mp0_examples() {
        assert_eq!(mp0(&nat(19)).unwrap(), nats(&[1, 2, 6]));
        assert_eq!(mp0(&nat(43)).unwrap(), nats(&[1, 2, 6, 42]));
        assert_eq!(mp0(&nat(2)).unwrap(), nats(&[1]));
    }

    #[test]
    fn mp2_examples() {
        assert_eq!(mp2_candidates(&nat(2)).unwrap(), nats(&[4, 12, 84, 3612]));
        assert!(mp2_candidates(&nat(19)).unwrap().is_empty());
        assert_eq!(mp2_candidates(&nat(7)).unwrap(), nats(&[294, 12642]));
        assert_eq!(mp2_candidates(&nat(3)).unwrap(), nats(&[18, 126, 5418]));
        assert_eq!(mp2_candidates(&nat(43)).unwrap(), nats(&[77658]));
    }

    #[test]
    fn assemble_from_explicit_np() {
        // N_7 = {1, 2, 3} (square-free over Q_7 = {2, 3}, 6 ∤ n)
        let r = assemble_mp(&nat(7), &nats(&[1, 2, 3]), Completeness::ProvenComplete, None).unwrap();
        assert_eq!(r.values(), nats(&[1, 2, 6, 7, 14, 294, 12642]));
        let parts: Vec<Part> = r.elements.iter().map(|e| e.part).collect();
        assert_eq!(
            parts,
            [Part::M0, Part::M0, Part::M0, Part::M1, Part::M1, Part::M2, Part::M2]
        );
    }

    #[test]
    fn truncation_weakens_completeness() {
        let r = assemble_mp(&nat(7), &nats(&[1, 2, 3]), Completeness::ProvenComplete, None)
            .unwrap()
            .truncate_to(&nat(100));
        assert_eq!(r.values(), nats(&[1, 2, 6, 7, 14]));
        assert_eq!(r.completeness, Completeness::UpToBound(nat(100)));
    }
}

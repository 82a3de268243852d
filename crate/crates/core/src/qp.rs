//! The prime set `Q_p` and the square-free set `N_p` built from it.
//!
//! `q ∈ Q_p` iff `q - 1` is square-free, `p - 1 ∤ q - 1`, and every prime
//! factor of `q - 1` is `p` or again in `Q_p`. Every element of `M_p` with
//! `p ∥ n` is `p` times a member of `N_p`, so a finite `Q_p` gives a finite,
//! explicitly computable `M_p`.
//!
//! [`compute_qp`] grows `X_1 = {2, p}` by adjoining every prime of the form
//! `1 + ∏_{q ∈ Ω} q` over nonempty `Ω ⊆ X_i`, skipping candidates `c` with
//! `p - 1 | c - 1`. When a round adds no prime the set is `Q_p ∪ {p}`.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::One;
use rayon::prelude::*;

use crate::arith::{divides, is_prime, Factorization, Nat};
use crate::structure::is_special_prime;
use crate::{Error, Result};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct QpCaps {
    /// Rounds of candidate generation before giving up.
    pub max_iterations: u32,
    /// Largest prime set whose full subset lattice is enumerated.
    pub max_subset_size: usize,
    /// Candidates wider than this are skipped (and the run flagged).
    pub max_candidate_bits: u64,
}

impl Default for QpCaps {
    fn default() -> Self {
        Self {
            max_iterations: 32,
            max_subset_size: 24,
            max_candidate_bits: 256,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum QpStatus {
    /// A full round produced no new prime: the set is `Q_p ∪ {p}`.
    Stabilized,
    IterationCapped,
    SubsetCapped,
    CandidateSizeCapped,
}

impl QpStatus {
    pub fn label(self) -> &'static str {
        match self {
            QpStatus::Stabilized => "Stabilized",
            QpStatus::IterationCapped => "IterationCapped",
            QpStatus::SubsetCapped => "SubsetCapped",
            QpStatus::CandidateSizeCapped => "CandidateSizeCapped",
        }
    }
}

impl fmt::Display for QpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QpState {
    pub p: Nat,
    /// Index `i` of the current set `X_i`.
    pub iteration: u32,
    pub primes: BTreeSet<Nat>,
    pub status: QpStatus,
    pub caps: QpCaps,
    /// `generations[0]` is `X_1`; `generations[j]` holds the primes added to
    /// form `X_{j+1}`.
    pub generations: Vec<Vec<Nat>>,
}

impl QpState {
    pub fn is_stabilized(&self) -> bool {
        self.status == QpStatus::Stabilized
    }

    /// Index of the first set shown equal to its predecessor
    /// (`X_i = X_{i+1}`, reported as `i + 1`).
    pub fn confirmed_at(&self) -> Option<u32> {
        self.is_stabilized().then_some(self.iteration + 1)
    }

    /// The set `X_i` for `1 ≤ i ≤ iteration`.
    pub fn set_at(&self, i: u32) -> BTreeSet<Nat> {
        self.generations.iter().take(i as usize).flatten().cloned().collect()
    }

    /// Members other than `p` (the `Q_p` part).
    pub fn q_primes(&self) -> impl Iterator<Item = &Nat> {
        self.primes.iter().filter(move |q| *q != &self.p)
    }

    pub fn max_q(&self) -> Option<&Nat> {
        self.primes.iter().rev().find(|q| *q != &self.p)
    }
}

/// Output of [`prod_parts`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProdParts {
    pub candidates: BTreeSet<Nat>,
    /// The set was larger than `max_subset_size`; nothing was enumerated.
    pub subset_capped: bool,
    /// At least one candidate exceeded `max_candidate_bits` and was skipped.
    pub size_capped: bool,
}

/// `{1 + ∏_{q ∈ Ω} q : ∅ ≠ Ω ⊆ X} ∩ {c : p - 1 ∤ c - 1}`.
pub fn prod_parts(x: &BTreeSet<Nat>, p: &Nat, caps: &QpCaps) -> ProdParts {
    prod_parts_touching(x, None, p, caps)
}

/// [`prod_parts`] restricted to subsets meeting `touch` (all subsets when `None`).
fn prod_parts_touching(x: &BTreeSet<Nat>, touch: Option<&BTreeSet<Nat>>, p: &Nat, caps: &QpCaps) -> ProdParts {
    let mut out = ProdParts::default();
    if x.len() > caps.max_subset_size {
        out.subset_capped = true;
        return out;
    }
    let pool: Vec<(Nat, bool)> = x
        .iter()
        .map(|q| (q.clone(), touch.is_none_or(|t| t.contains(q))))
        .collect();
    let p_minus_1 = p - 1u32;
    let mut candidates = BTreeSet::new();
    out.size_capped = walk(
        &pool,
        0,
        &Nat::one(),
        false,
        caps.max_candidate_bits,
        &mut |prod, touched| {
            if touched && !divides(&p_minus_1, prod) {
                candidates.insert(prod + 1u32);
            }
        },
    );
    out.candidates = candidates;
    out
}

/// Primes `1 + ∏Ω` missing from `x`, for subsets `Ω ∋ 2` meeting `touch`.
/// Subsets without 2 give an even candidate above 2 and are skipped. The
/// second value reports candidates dropped by the bit cap.
fn round_primes(x: &BTreeSet<Nat>, touch: Option<&BTreeSet<Nat>>, p: &Nat, caps: &QpCaps) -> (Vec<Nat>, bool) {
    let two = Nat::from(2u32);
    let hot = |q: &Nat| touch.is_none_or(|t| t.contains(q));
    let pool: Vec<(Nat, bool)> = x.iter().filter(|q| **q != two).map(|q| (q.clone(), hot(q))).collect();
    let p_minus_1 = p - 1u32;
    let split = pool.len().min(12);
    let (head, tail) = pool.split_at(split);

    let results: Vec<(Vec<Nat>, bool)> = (0u32..1 << split)
        .into_par_iter()
        .map(|mask| {
            let mut found = Vec::new();
            let mut product = two.clone();
            let mut touched = hot(&two);
            for (i, (q, h)) in head.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    product *= q;
                    touched |= *h;
                }
            }
            if (&product + 1u32).bits() > caps.max_candidate_bits {
                return (found, true);
            }
            let mut visit = |prod: &Nat, touched: bool| {
                if touched && !divides(&p_minus_1, prod) {
                    let c = prod + 1u32;
                    if !x.contains(&c) && is_prime(&c) {
                        found.push(c);
                    }
                }
            };
            visit(&product, touched);
            let wide = walk(tail, 0, &product, touched, caps.max_candidate_bits, &mut visit);
            (found, wide)
        })
        .collect();

    let mut wide = false;
    let mut added = BTreeSet::new();
    for (found, w) in results {
        wide |= w;
        added.extend(found);
    }
    (added.into_iter().collect(), wide)
}

/// Visits every nonempty extension of `product` by entries of `pool[start..]`;
/// returns whether the bit cap cut the walk short.
fn walk(
    pool: &[(Nat, bool)],
    start: usize,
    product: &Nat,
    touched: bool,
    max_bits: u64,
    visit: &mut impl FnMut(&Nat, bool),
) -> bool {
    let mut wide = false;
    for i in start..pool.len() {
        let (q, hot) = &pool[i];
        let next = product * q;
        if (&next + 1u32).bits() > max_bits {
            // later pool entries are larger
            return true;
        }
        let touched = touched || *hot;
        visit(&next, touched);
        wide |= walk(pool, i + 1, &next, touched, max_bits, visit);
    }
    wide
}

/// Runs the construction from `X_1 = {2, p}` until a round adds no prime or a
/// cap is hit.
pub fn compute_qp(p: &Nat, caps: QpCaps) -> Result<QpState> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p.clone()));
    }
    let mut primes: BTreeSet<Nat> = [Nat::from(2u32), p.clone()].into_iter().collect();
    let mut generations = vec![primes.iter().cloned().collect::<Vec<_>>()];
    let mut fresh: Option<BTreeSet<Nat>> = None;
    let mut iteration = 1u32;
    let mut skipped_wide = false;
    let mut rounds = 0u32;

    let status = loop {
        if rounds == caps.max_iterations {
            break QpStatus::IterationCapped;
        }
        rounds += 1;
        // subsets inside the previous set were tested in an earlier round
        if primes.len() > caps.max_subset_size {
            break QpStatus::SubsetCapped;
        }
        let (added, wide) = round_primes(&primes, fresh.as_ref(), p, &caps);
        skipped_wide |= wide;
        if added.is_empty() {
            break if skipped_wide {
                QpStatus::CandidateSizeCapped
            } else {
                QpStatus::Stabilized
            };
        }
        primes.extend(added.iter().cloned());
        fresh = Some(added.iter().cloned().collect());
        generations.push(added);
        iteration += 1;
    };

    Ok(QpState {
        p: p.clone(),
        iteration,
        primes,
        status,
        caps,
        generations,
    })
}

/// Outcome of the maximality certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MaxCertificate {
    /// No `w_Ω` or `w'_Ω` is a prime missing from the set: `K = max Q_p`.
    Confirmed,
    /// A prime missing from the set was produced.
    Refuted { witness: Nat },
    /// Too many subsets to enumerate.
    Inconclusive,
}

impl MaxCertificate {
    pub fn label(&self) -> &'static str {
        match self {
            MaxCertificate::Confirmed => "Confirmed",
            MaxCertificate::Refuted { .. } => "Refuted",
            MaxCertificate::Inconclusive => "Inconclusive",
        }
    }
}

/// Certifies `K = max Q_p` given every member of `Q_p` up to `K`.
///
/// For each nonempty `Ω` of members `≤ K` (excluding `p`) it forms
/// `w_Ω = 1 + ∏ q` and `w'_Ω = 1 + p ∏ q`; candidates `w` with `p - 1 | w - 1`
/// are skipped. The smallest member of `Q_p` above `K`, if any, would appear
/// here as a prime outside the set, so if none does, `K` is the maximum.
pub fn verify_max(p: &Nat, qp_primes: &BTreeSet<Nat>, k: &Nat, caps: &QpCaps) -> Result<MaxCertificate> {
    if !qp_primes.contains(k) {
        return Err(Error::NotInSet(k.clone()));
    }
    let pool: Vec<&Nat> = qp_primes.iter().filter(|q| *q != p && *q <= k).collect();
    if pool.len() > caps.max_subset_size {
        return Ok(MaxCertificate::Inconclusive);
    }
    let p_minus_1 = p - 1u32;
    let known = |w: &Nat| w == p || qp_primes.contains(w);
    for mask in 1u64..1 << pool.len() {
        let product: Nat = pool
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, q)| (*q).clone())
            .product();
        for base in [product.clone(), &product * p] {
            if divides(&p_minus_1, &base) {
                continue;
            }
            let w = base + 1u32;
            if !known(&w) && is_prime(&w) {
                return Ok(MaxCertificate::Refuted { witness: w });
            }
        }
    }
    Ok(MaxCertificate::Confirmed)
}

/// Multipliers `c` of the finiteness screen: if no `1 + c·p` is prime then
/// `Q_p = {2, 3, 7, 43}` and `M_p ⊆ M_1 ∪ p·M_1`.
pub const COND_MULTIPLIERS: [u64; 8] = [2, 1806, 6, 14, 86, 42, 258, 602];

pub fn cor_cond_check(p: &Nat) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p.clone()));
    }
    if is_special_prime(p) {
        return Err(Error::ExcludedPrime(p.clone()));
    }
    Ok(COND_MULTIPLIERS.iter().all(|&c| !is_prime(&(p * c + 1u32))))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NpBound {
    Unbounded,
    AtMost(Nat),
}

/// Square-free products over `Q_p` not divisible by `p - 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NpEnumeration {
    pub p: Nat,
    pub bound: NpBound,
    /// Sorted by value.
    pub entries: Vec<Factorization>,
}

impl NpEnumeration {
    pub fn values(&self) -> Vec<Nat> {
        self.entries.iter().map(Factorization::value).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn contains(&self, n: &Nat) -> bool {
        self.entries.iter().any(|f| &f.value() == n)
    }
}

/// Enumerates `N_p` over the primes of `qp` (minus `p`), up to `bound`.
/// Unbounded enumeration needs a stabilized state.
pub fn enumerate_np(qp: &QpState, bound: NpBound) -> Result<NpEnumeration> {
    if bound == NpBound::Unbounded && !qp.is_stabilized() {
        return Err(Error::NotStabilized);
    }
    let pool: Vec<&Nat> = qp.q_primes().collect();
    let limit = match &bound {
        NpBound::AtMost(b) => Some(b),
        NpBound::Unbounded => None,
    };
    let p_minus_1 = &qp.p - 1u32;
    let mut found: Vec<(Nat, Vec<Nat>)> = Vec::new();
    let mut stack: Vec<(usize, Nat, Vec<Nat>)> = vec![(0, Nat::one(), Vec::new())];
    while let Some((start, value, primes)) = stack.pop() {
        if limit.is_none_or(|b| &value <= b) && !divides(&p_minus_1, &value) {
            found.push((value.clone(), primes.clone()));
        }
        for (i, q) in pool.iter().enumerate().skip(start) {
            let next = &value * *q;
            if limit.is_some_and(|b| &next > b) {
                // pool is ascending
                break;
            }
            let mut with = primes.clone();
            with.push((*q).clone());
            stack.push((i + 1, next, with));
        }
    }
    found.sort();
    let entries = found
        .into_iter()
        .map(|(_, primes)| Factorization::square_free(primes))
        .collect();
    Ok(NpEnumeration {
        p: qp.p.clone(),
        bound,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::nat;

    fn set(v: &[u64]) -> BTreeSet<Nat> {
        v.iter().map(|&x| nat(x)).collect()
    }

    #[test]
    fn prod_parts_examples() {
        let caps = QpCaps::default();
        assert_eq!(
            prod_parts(&set(&[2, 19]), &nat(19), &caps).candidates,
            set(&[3, 20, 39])
        );
        assert!(prod_parts(&set(&[2]), &nat(3), &caps).candidates.is_empty());
        assert_eq!(prod_parts(&set(&[2, 3]), &nat(19), &caps).candidates, set(&[3, 4, 7]));
    }

    #[test]
    fn prod_parts_caps() {
        let caps = QpCaps {
            max_subset_size: 2,
            ..QpCaps::default()
        };
        let r = prod_parts(&set(&[2, 3, 7]), &nat(19), &caps);
        assert!(r.subset_capped && r.candidates.is_empty());

        let caps = QpCaps {
            max_candidate_bits: 3,
            ..QpCaps::default()
        };
        let r = prod_parts(&set(&[2, 3, 7]), &nat(19), &caps);
        // 3, 4, 7 fit in 3 bits; 8, 15, 22, 43 do not
        assert_eq!(r.candidates, set(&[3, 4, 7]));
        assert!(r.size_capped);
    }

    #[test]
    fn small_primes_stabilize() {
        let s = compute_qp(&nat(67), QpCaps::default()).unwrap();
        assert_eq!(s.status, QpStatus::Stabilized);
        assert_eq!(s.primes, set(&[2, 3, 7, 43, 67]));
        assert_eq!(s.iteration, 4);

        let s = compute_qp(&nat(7), QpCaps::default()).unwrap();
        assert_eq!(s.primes, set(&[2, 3, 7]));
        let s = compute_qp(&nat(3), QpCaps::default()).unwrap();
        assert_eq!((s.primes.clone(), s.iteration), (set(&[2, 3]), 1));
        let s = compute_qp(&nat(2), QpCaps::default()).unwrap();
        assert_eq!(s.primes, set(&[2]));
        assert!(s.is_stabilized());
        assert!(compute_qp(&nat(9), QpCaps::default()).is_err());
    }

    #[test]
    fn iteration_cap() {
        let caps = QpCaps {
            max_iterations: 2,
            ..QpCaps::default()
        };
        let s = compute_qp(&nat(19), caps).unwrap();
        assert_eq!(s.status, QpStatus::IterationCapped);
        assert_eq!(s.primes, set(&[2, 3, 7, 19]));
        assert_eq!(s.confirmed_at(), None);
    }

    #[test]
    fn verify_max_examples() {
        let caps = QpCaps::default();
        let q = set(&[2, 3, 7, 43]);
        assert_eq!(
            verify_max(&nat(67), &q, &nat(43), &caps).unwrap(),
            MaxCertificate::Confirmed
        );
        assert_eq!(
            verify_max(&nat(19), &q, &nat(43), &caps).unwrap(),
            MaxCertificate::Refuted { witness: nat(4903) }
        );
        // p - 1 = 1 divides every w - 1, so nothing survives the filter
        assert_eq!(
            verify_max(&nat(2), &set(&[2]), &nat(2), &caps).unwrap(),
            MaxCertificate::Confirmed
        );
        assert!(verify_max(&nat(19), &q, &nat(5), &caps).is_err());
        let tight = QpCaps {
            max_subset_size: 3,
            ..caps
        };
        assert_eq!(
            verify_max(&nat(67), &q, &nat(43), &tight).unwrap(),
            MaxCertificate::Inconclusive
        );
    }

    #[test]
    fn cond_examples() {
        assert!(cor_cond_check(&nat(67)).unwrap());
        assert!(!cor_cond_check(&nat(19)).unwrap());
        assert!(cor_cond_check(&nat(997)).unwrap());
        assert_eq!(cor_cond_check(&nat(43)), Err(Error::ExcludedPrime(nat(43))));
        assert_eq!(cor_cond_check(&nat(45)), Err(Error::NotPrime(nat(45))));
    }

    #[test]
    fn np_examples() {
        let caps = QpCaps::default();
        let s = compute_qp(&nat(67), caps).unwrap();
        let np = enumerate_np(&s, NpBound::Unbounded).unwrap();
        // 66 = 2·3·11 divides no square-free product over {2, 3, 7, 43}
        assert_eq!(np.values().len(), 16);
        let bounded = enumerate_np(&s, NpBound::AtMost(nat(1))).unwrap();
        assert_eq!(bounded.values(), vec![nat(1)]);

        let s3 = compute_qp(&nat(3), caps).unwrap();
        let np3 = enumerate_np(&s3, NpBound::AtMost(nat(10))).unwrap();
        assert_eq!(np3.values(), vec![nat(1)]);

        // N_2 is empty: p - 1 = 1 divides everything
        let s2 = compute_qp(&nat(2), caps).unwrap();
        assert!(enumerate_np(&s2, NpBound::Unbounded).unwrap().is_empty());
    }

    #[test]
    fn unbounded_np_needs_stabilization() {
        let caps = QpCaps {
            max_iterations: 1,
            ..QpCaps::default()
        };
        let s = compute_qp(&nat(19), caps).unwrap();
        assert_eq!(enumerate_np(&s, NpBound::Unbounded), Err(Error::NotStabilized));
        assert!(enumerate_np(&s, NpBound::AtMost(nat(100))).is_ok());
    }

    #[test]
    fn empty_product_is_never_a_candidate() {
        let r = prod_parts(&set(&[2, 5]), &nat(5), &QpCaps::default());
        assert!(!r.candidates.contains(&nat(2)));
    }
}

use std::str::FromStr;

use pscong::arith::{factorize, is_prime};
use pscong::powersum::{naive_power_sum_mod, s_n_n_breakdown};
use pscong::qp::{
    compute_qp, cor_cond_check, enumerate_np, verify_max, MaxCertificate, NpBound, QpCaps, QpState, COND_MULTIPLIERS,
};
use pscong::structure::{assemble_mp_factored, theorem1_check_factored, Completeness, MpReport};
use pscong::wpp::{is_wpp_factored, mp_bounded, mq_empty, n_q_factored, WppCatalog, KNOWN_VALUES};
use pscong::{Error, Nat};
use serde_json::{json, Value};

use crate::report::{count, factorization, num, nums, Failure, Outcome};

type Result<T> = std::result::Result<T, Failure>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Route {
    /// Structural route, falling back to the catalog bound.
    Auto,
    Structural,
    Wpp,
}

impl Route {
    pub fn label(self) -> &'static str {
        match self {
            Route::Auto => "auto",
            Route::Structural => "structural",
            Route::Wpp => "wpp",
        }
    }
}

pub fn oracle(n: &Nat, m: &Nat) -> Result<Outcome> {
    let residue = naive_power_sum_mod(n, n, n)?;
    let holds = residue == m % n;
    Ok(Outcome::answer(
        json!({ "n": num(n), "m": num(m), "residue": num(&residue), "holds": holds }),
        holds,
    ))
}

pub fn member(n: &Nat, m: &Nat) -> Result<Outcome> {
    let breakdown = s_n_n_breakdown(n)?;
    let member = breakdown.matches(m);
    let entries: Vec<Value> = breakdown
        .entries
        .iter()
        .map(|e| {
            json!({
                "prime": num(&e.prime),
                "exponent": count(e.exponent),
                "modulus": num(&e.modulus()),
                "residue": num(&e.residue),
                "target": num(&(m % e.modulus())),
            })
        })
        .collect();
    Ok(Outcome::answer(
        json!({
            "n": num(n),
            "m": num(m),
            "member": member,
            "residue": num(&breakdown.crt_value()),
            "breakdown": entries,
        }),
        member,
    ))
}

pub fn qp_json(state: &QpState) -> Value {
    json!({
        "p": num(&state.p),
        "status": state.status.label(),
        "iteration": count(state.iteration),
        "confirmed_at": state.confirmed_at().map(count),
        "size": count(state.primes.len()),
        "primes": nums(&state.primes),
        "max_q": state.max_q().map(num),
        "generations": state.generations.iter().map(nums).collect::<Vec<_>>(),
        "caps": {
            "max_iterations": count(state.caps.max_iterations),
            "max_subset_size": count(state.caps.max_subset_size),
            "max_candidate_bits": count(state.caps.max_candidate_bits),
        },
    })
}

/// Maximality certificate for a stabilized run; an empty `Q_p` is vacuously
/// certified.
fn certify(state: &QpState) -> pscong::Result<Option<MaxCertificate>> {
    if !state.is_stabilized() {
        return Ok(None);
    }
    match state.max_q() {
        None => Ok(Some(MaxCertificate::Confirmed)),
        Some(k) => verify_max(&state.p, &state.primes, k, &state.caps).map(Some),
    }
}

fn certificate_json(cert: &Option<MaxCertificate>) -> Value {
    match cert {
        None => Value::Null,
        Some(MaxCertificate::Refuted { witness }) => json!({ "outcome": "Refuted", "witness": num(witness) }),
        Some(c) => json!({ "outcome": c.label() }),
    }
}

pub fn qp(p: &Nat, caps: QpCaps) -> Result<Outcome> {
    let state = compute_qp(p, caps)?;
    let cert = certify(&state)?;
    let mut result = qp_json(&state);
    result["certificate"] = certificate_json(&cert);
    if cert == Some(MaxCertificate::Confirmed) {
        Ok(Outcome::ok(result))
    } else {
        let note = match &cert {
            None => format!("construction stopped with status {}", state.status),
            Some(c) => format!("stabilized but maximality certificate is {}", c.label()),
        };
        Ok(Outcome::inconclusive(result, vec![note]))
    }
}

/// Refactors every catalog value from scratch and checks it against the
/// compiled-in table.
pub fn verified_catalog() -> Result<WppCatalog> {
    let values: Vec<Nat> = KNOWN_VALUES
        .iter()
        .map(|s| Nat::from_str(s).expect("catalog constants are decimal"))
        .collect();
    let catalog = WppCatalog::from_values(&values)?;
    let failures = catalog.failures();
    if !failures.is_empty() {
        let listed: Vec<String> = failures.iter().map(Nat::to_string).collect();
        return Err(Failure::Check(format!(
            "catalog entries failed re-verification: {}",
            listed.join(", ")
        )));
    }
    if catalog != WppCatalog::known() {
        return Err(Failure::Check(
            "refactored catalog differs from the compiled-in factorizations".into(),
        ));
    }
    Ok(catalog)
}

fn mp_json(report: &MpReport, route: Route, cert: &Option<MaxCertificate>) -> Value {
    let (completeness, bound) = match &report.completeness {
        Completeness::ProvenComplete => ("ProvenComplete", Value::Null),
        Completeness::UpToBound(b) => ("UpToBound", num(b)),
    };
    let elements: Vec<Value> = report
        .elements
        .iter()
        .map(|e| json!({ "value": num(&e.value), "part": e.part.label(), "factorization": factorization(&e.factorization) }))
        .collect();
    json!({
        "p": num(&report.modulus),
        "route": route.label(),
        "completeness": completeness,
        "bound": bound,
        "values": nums(&report.values()),
        "elements": elements,
        "qp": report.qp.as_ref().map(qp_json),
        "certificate": certificate_json(cert),
    })
}

pub fn mp(p: &Nat, bound: Option<&Nat>, route: Route, caps: QpCaps) -> Result<Outcome> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p.clone()).into());
    }
    let trim = |r: MpReport| match bound {
        Some(b) => r.truncate_to(b),
        None => r,
    };
    let mut notes = Vec::new();
    if route != Route::Wpp {
        let state = compute_qp(p, caps)?;
        let cert = certify(&state)?;
        if cert == Some(MaxCertificate::Confirmed) {
            let np = enumerate_np(&state, NpBound::Unbounded)?;
            let report = assemble_mp_factored(p, &np.entries, Completeness::ProvenComplete, Some(state))?;
            return Ok(Outcome::ok(mp_json(&trim(report), Route::Structural, &cert)));
        }
        notes.push(match &cert {
            None => format!("structural route: construction stopped with status {}", state.status),
            Some(c) => format!("structural route: maximality certificate is {}", c.label()),
        });
        if route == Route::Structural {
            let result = json!({
                "p": num(p),
                "route": route.label(),
                "qp": qp_json(&state),
                "certificate": certificate_json(&cert),
            });
            return Ok(Outcome::inconclusive(result, notes));
        }
        notes.push("falling back to the weak primary pseudoperfect bound".into());
    }
    let report = mp_bounded(p, &verified_catalog()?)?;
    Ok(Outcome::ok(mp_json(&trim(report), Route::Wpp, &None)).with_notes(notes))
}

pub fn np(p: &Nat, bound: Option<&Nat>, caps: QpCaps) -> Result<Outcome> {
    let state = compute_qp(p, caps)?;
    let stabilized = state.is_stabilized();
    let too_wide = bound.is_none() && state.q_primes().count() > caps.max_subset_size;
    if (bound.is_none() && !stabilized) || too_wide {
        let note = if stabilized {
            format!("Q_p has more than {} primes; pass --bound", caps.max_subset_size)
        } else {
            format!(
                "construction stopped with status {}; pass --bound for a partial list",
                state.status
            )
        };
        return Ok(Outcome::inconclusive(
            json!({ "p": num(p), "qp": qp_json(&state) }),
            vec![note],
        ));
    }
    let np_bound = bound.map_or(NpBound::Unbounded, |b| NpBound::AtMost(b.clone()));
    let np = enumerate_np(&state, np_bound)?;
    let lifts: Vec<Nat> = np
        .entries
        .iter()
        .filter(|f| theorem1_check_factored(&f.times_prime(p), p))
        .map(|f| f.value())
        .collect();
    let result = json!({
        "p": num(p),
        "bound": bound.map(num),
        "count": count(np.len()),
        "values": nums(&np.values()),
        "lifts": nums(&lifts),
        "qp_status": state.status.label(),
    });
    if stabilized {
        Ok(Outcome::ok(result))
    } else {
        let note = format!(
            "construction stopped with status {}; the list may be incomplete",
            state.status
        );
        Ok(Outcome::inconclusive(result, vec![note]))
    }
}

pub fn cond(p: &Nat) -> Result<Outcome> {
    let holds = cor_cond_check(p)?;
    let witnesses: Vec<Value> = COND_MULTIPLIERS
        .iter()
        .map(|&c| (c, p * c + 1u32))
        .filter(|(_, q)| is_prime(q))
        .map(|(c, q)| json!({ "multiplier": count(c), "prime": num(&q) }))
        .collect();
    Ok(Outcome::answer(
        json!({ "p": num(p), "holds": holds, "witnesses": witnesses }),
        holds,
    ))
}

pub fn wpp_verify(n: &Nat) -> Result<Outcome> {
    if n == &Nat::default() {
        return Err(Error::Zero { what: "n" }.into());
    }
    let f = factorize(n)?;
    let is_wpp = is_wpp_factored(&f);
    let q = n_q_factored(&f);
    Ok(Outcome::answer(
        json!({
            "n": num(n),
            "is_wpp": is_wpp,
            "factorization": factorization(&f),
            "n_q": num(&q),
            "mq_empty": mq_empty(n)?,
        }),
        is_wpp,
    ))
}

pub fn wpp_catalog() -> Result<Outcome> {
    let catalog = verified_catalog()?;
    let entries: Vec<Value> = catalog
        .entries
        .iter()
        .map(
            |e| json!({ "value": num(&e.value), "factorization": factorization(&e.factorization), "n_q": num(&e.n_q) }),
        )
        .collect();
    Ok(Outcome::ok(
        json!({ "count": count(entries.len()), "max": num(&catalog.max()), "entries": entries }),
    ))
}

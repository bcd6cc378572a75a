//! Brute-force posterior upper probability.
//!
//! The posterior of A is linear-fractional in the prior, so its supremum over
//! the core sits at a vertex; it is increasing in the likelihood on A and
//! decreasing off A, so over a band it is attained at a bang-bang likelihood
//! (L̄ on some B, L̲ off B). The oracle enumerates exactly those candidates and
//! evaluates the ordinary Bayes ratio at each pair. It shares no code with
//! the ratio bounds in [`crate::bayes`] or with [`crate::choquet`].

use sha2::{Digest, Sha256};

use crate::bayes::{self, EqualityDiagnosis, LikelihoodForm, PosteriorQuery, PosteriorReport};
use crate::capacity::{Capacity, EventMask, ProbabilityVector};
use crate::choquet::Functional;
use crate::credal::core_vertices_two_monotone;
use crate::error::{Error, Result};
use crate::numeric::{self, Scalar};
use crate::optim;

/// Enumeration of 2^n bang-bang likelihoods and n! orderings caps the space.
pub const MAX_ORACLE_OUTCOMES: usize = 10;

const DINKELBACH_LIMIT: usize = 200;

/// P(A | y) = ∫ L 1_A dP / ∫ L dP.
pub fn precise_posterior<S: Scalar>(p: &ProbabilityVector<S>, l: &Functional<S>, event: EventMask) -> Result<S> {
    if p.space() != l.space() {
        return Err(Error::SpaceMismatch);
    }
    let (on, total) = evidence(p, l, event);
    if total.is_zero() {
        return Err(Error::ZeroEvidence);
    }
    Ok(on / total)
}

fn evidence<S: Scalar>(p: &ProbabilityVector<S>, l: &Functional<S>, event: EventMask) -> (S, S) {
    let mut on = S::zero();
    let mut off = S::zero();
    for (i, (m, v)) in p.mass().iter().zip(l.values()).enumerate() {
        let w = m.clone() * v.clone();
        if event.contains(i) {
            on = on + w;
        } else {
            off = off + w;
        }
    }
    let total = on.clone() + off;
    (on, total)
}

/// Which likelihoods of a band the oracle tries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LikelihoodSearch {
    /// All 2^n bang-bang vectors L̄ 1_B + L̲ 1_Bᶜ.
    Exhaustive,
    /// Only B = A.
    EventShortcut,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleResult<S> {
    pub value: S,
    pub achieving_prior: ProbabilityVector<S>,
    pub achieving_likelihood: Functional<S>,
    pub instance_hash: String,
}

/// Candidate likelihoods: the members of a family, or bang-bang vectors of a band.
pub fn extreme_likelihoods<S: Scalar>(q: &PosteriorQuery<S>, search: LikelihoodSearch) -> Vec<Functional<S>> {
    let set = &q.likelihoods;
    match set.form() {
        LikelihoodForm::Family { members } => members.clone(),
        LikelihoodForm::Band { .. } => match search {
            LikelihoodSearch::EventShortcut => vec![set.extreme(q.event)],
            LikelihoodSearch::Exhaustive => q.space().events().map(|b| set.extreme(b)).collect(),
        },
    }
}

/// sup over core(prior) × likelihoods of the precise posterior of the event.
///
/// Vertices of a 2-alternating prior come from its orderings. Otherwise each
/// candidate likelihood gets its maximizing vertex from a Dinkelbach
/// iteration of linear programs over the core.
pub fn brute_force_upper<S: Scalar>(q: &PosteriorQuery<S>, search: LikelihoodSearch) -> Result<OracleResult<S>> {
    let n = q.prior.len();
    if n > MAX_ORACLE_OUTCOMES {
        return Err(Error::SpaceTooLarge {
            n,
            max: MAX_ORACLE_OUTCOMES,
        });
    }
    let likelihoods = extreme_likelihoods(q, search);
    let vertices = if q.prior.is_two_alternating()? {
        core_vertices_two_monotone(&q.prior)?
    } else {
        let mut pool: Vec<ProbabilityVector<S>> = Vec::new();
        for l in &likelihoods {
            for v in lp_vertices(&q.prior, l, q.event)? {
                if !pool.contains(&v) {
                    pool.push(v);
                }
            }
        }
        pool
    };

    let mut best: Option<(S, usize, usize)> = None;
    for (vi, v) in vertices.iter().enumerate() {
        for (li, l) in likelihoods.iter().enumerate() {
            let (on, total) = evidence(v, l, q.event);
            if total.is_zero() {
                continue;
            }
            let value = on / total;
            if best.as_ref().map_or(true, |(b, _, _)| value > *b) {
                best = Some((value, vi, li));
            }
        }
    }
    let (value, vi, li) = best.ok_or(Error::AllZeroEvidence)?;
    Ok(OracleResult {
        value,
        achieving_prior: vertices[vi].clone(),
        achieving_likelihood: likelihoods[li].clone(),
        instance_hash: instance_hash(q),
    })
}

/// Vertices of core(prior) that can maximize the posterior of `event` under
/// likelihood `l`: the Dinkelbach optimum, plus the evidence maximizer so
/// that a positive-evidence vertex is always present.
fn lp_vertices<S: Scalar>(prior: &Capacity<S>, l: &Functional<S>, event: EventMask) -> Result<Vec<ProbabilityVector<S>>> {
    let weights = l.values();
    let best_evidence = optim::maximize_linear(prior, weights)?;
    let mut found = vec![best_evidence.optimizer.clone()];
    if best_evidence.value.is_zero() {
        return Ok(found);
    }
    let mut current = best_evidence.optimizer;
    let tol = S::optim_tol();
    for _ in 0..DINKELBACH_LIMIT {
        let (on, total) = evidence(&current, l, event);
        let level = on / total;
        let objective: Vec<S> = weights
            .iter()
            .enumerate()
            .map(|(i, w)| {
                let on_event = if event.contains(i) { w.clone() } else { S::zero() };
                on_event - level.clone() * w.clone()
            })
            .collect();
        let step = optim::maximize_linear(prior, &objective)?;
        if step.value <= tol {
            break;
        }
        current = step.optimizer;
        found.push(current.clone());
    }
    Ok(found)
}

/// Short SHA-256 digest of the query, for deduplicating campaign records.
pub fn instance_hash<S: Scalar>(q: &PosteriorQuery<S>) -> String {
    let mut hasher = Sha256::new();
    hasher.update(q.space().labels().join("\u{1f}").as_bytes());
    for v in q.prior.values() {
        hasher.update(v.to_json().to_string().as_bytes());
        hasher.update(b";");
    }
    // A collapsed band and a one-member family are the same set.
    let functionals: Vec<&Functional<S>> = match q.likelihoods.form() {
        _ if q.likelihoods.lower() == q.likelihoods.upper() => {
            hasher.update(b"precise");
            vec![q.likelihoods.upper()]
        }
        LikelihoodForm::Band { lower, upper } => {
            hasher.update(b"band");
            vec![lower, upper]
        }
        LikelihoodForm::Family { members } => {
            hasher.update(b"family");
            members.iter().collect()
        }
    };
    for f in functionals {
        for v in f.values() {
            hasher.update(v.to_json().to_string().as_bytes());
            hasher.update(b",");
        }
        hasher.update(b"|");
    }
    hasher.update(q.event.bits().to_le_bytes());
    hex::encode(&hasher.finalize()[..8])
}

/// Runs both bounds and the oracle on one query and checks
/// oracle ≤ vertex bound ≤ Choquet bound (and equality when it is proven).
pub fn verify_theorem<S: Scalar>(q: &PosteriorQuery<S>, search: LikelihoodSearch) -> Result<PosteriorReport<S>> {
    verify_theorem_with_tol(q, search, &S::optim_tol())
}

pub fn verify_theorem_with_tol<S: Scalar>(
    q: &PosteriorQuery<S>,
    search: LikelihoodSearch,
    tol: &S,
) -> Result<PosteriorReport<S>> {
    let mut report = bayes::report(q)?;
    let oracle = brute_force_upper(q, search)?;
    let lower_oracle = match brute_force_upper(&q.complemented(), search) {
        Ok(r) if report.lower_vertex.is_some() => Some(S::one() - r.value),
        Ok(_) | Err(Error::AllZeroEvidence) => None,
        Err(e) => return Err(e),
    };

    let two_alternating = q.prior.is_two_alternating()?;
    report.equality_diagnosis = bayes::diagnose(
        two_alternating,
        q.likelihoods.envelopes_are_members() && q.likelihoods.contains_extreme(q.event),
        Some(&oracle.value),
        &report.bound_vertex,
        &report.bound_choquet,
        tol,
    );

    let le = |a: &S, b: &S| *a <= b.clone() + tol.clone();
    let mut problems = Vec::new();
    if !le(&oracle.value, &report.bound_vertex) {
        problems.push(format!("oracle {} > vertex bound {}", oracle.value, report.bound_vertex));
    }
    if !le(&report.bound_vertex, &report.bound_choquet) {
        problems.push(format!(
            "vertex bound {} > Choquet bound {}",
            report.bound_vertex, report.bound_choquet
        ));
    }
    if report.equality_diagnosis == EqualityDiagnosis::ProvenEqual
        && !(numeric::within(&oracle.value, &report.bound_vertex, tol)
            && numeric::within(&oracle.value, &report.bound_choquet, tol))
    {
        problems.push(format!(
            "equality expected: oracle {}, vertex {}, Choquet {}",
            oracle.value, report.bound_vertex, report.bound_choquet
        ));
    }
    if let (Some(lo), Some(lv), Some(lc)) = (&lower_oracle, &report.lower_vertex, &report.lower_choquet) {
        if !le(lv, lo) || !le(lc, lv) {
            problems.push(format!("lower chain broken: Choquet {lc}, vertex {lv}, oracle {lo}"));
        }
    }
    report.oracle = Some(oracle.value);
    report.lower_oracle = lower_oracle;
    report.oracle_prior = Some(oracle.achieving_prior);
    report.oracle_likelihood = Some(oracle.achieving_likelihood);
    report.instance_hash = Some(oracle.instance_hash);

    if problems.is_empty() {
        Ok(report)
    } else {
        Err(Error::ChainViolation(format!(
            "{} on event {} [{}]: {}",
            report.instance_hash.as_deref().unwrap_or(""),
            q.space().describe(q.event),
            report.equality_diagnosis.name(),
            problems.join("; ")
        )))
    }
}

//! Posterior upper and lower probabilities when both the prior and the
//! likelihood are ambiguous.
//!
//! For an event A, with L̄ and L̲ the pointwise envelopes of the likelihood
//! set, the posterior upper probability is bounded by
//!
//! ```text
//!            sup_P ∫ L̄ 1_A dP                        Ch̄(L̄ 1_A)
//!   ──────────────────────────────────── ≤ ───────────────────────────────
//!   sup_P ∫ L̄ 1_A dP + inf_P ∫ L̲ 1_Aᶜ dP     Ch̄(L̄ 1_A) + Ch̲(L̲ 1_Aᶜ)
//! ```
//!
//! where P ranges over the core of the prior capacity and Ch̄, Ch̲ are the
//! upper and lower Choquet integrals against it. The first bound is solved
//! as two linear programs ([`upper_bound_vertex`]), the second in closed form
//! ([`upper_bound_choquet`]). Both are attained when the prior capacity is
//! 2-alternating and the envelopes belong to the likelihood set.

use log::warn;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::capacity::{Capacity, EventMask, OutcomeSpace, ProbabilityVector};
use crate::choquet::{choquet_lower, choquet_upper, Functional};
use crate::error::{Error, Result};
use crate::numeric::{self, Scalar};
use crate::optim;

#[derive(Clone, Debug, PartialEq)]
pub enum LikelihoodForm<S> {
    /// Every likelihood between `lower` and `upper` pointwise.
    Band {
        lower: Functional<S>,
        upper: Functional<S>,
    },
    /// A finite list of likelihood vectors.
    Family { members: Vec<Functional<S>> },
}

/// Likelihood values L(θ) = p(y | θ) at the observed data point, for every
/// admissible data model.
#[derive(Clone, Debug, PartialEq)]
pub struct LikelihoodSet<S> {
    space: OutcomeSpace,
    form: LikelihoodForm<S>,
    envelopes_are_members: bool,
    lower: Functional<S>,
    upper: Functional<S>,
}

impl<S: Scalar> LikelihoodSet<S> {
    pub fn band(lower: Functional<S>, upper: Functional<S>) -> Result<Self> {
        if lower.space() != upper.space() {
            return Err(Error::SpaceMismatch);
        }
        if let Some(i) = (0..lower.values().len()).find(|&i| lower.values()[i] > upper.values()[i]) {
            return Err(Error::InvalidLikelihood(format!(
                "lower envelope exceeds upper envelope at outcome {i}"
            )));
        }
        Ok(LikelihoodSet {
            space: lower.space().clone(),
            envelopes_are_members: true,
            form: LikelihoodForm::Band {
                lower: lower.clone(),
                upper: upper.clone(),
            },
            lower,
            upper,
        })
    }

    /// A single likelihood (degenerate band).
    pub fn precise(l: Functional<S>) -> Self {
        LikelihoodSet {
            space: l.space().clone(),
            envelopes_are_members: true,
            form: LikelihoodForm::Family {
                members: vec![l.clone()],
            },
            lower: l.clone(),
            upper: l,
        }
    }

    pub fn family(members: Vec<Functional<S>>) -> Result<Self> {
        let first = members.first().ok_or(Error::EmptyFamily)?;
        let space = first.space().clone();
        if members.iter().any(|m| *m.space() != space) {
            return Err(Error::SpaceMismatch);
        }
        let upper = members[1..].iter().fold(first.clone(), |acc, m| acc.max_with(m));
        let lower = members[1..].iter().fold(first.clone(), |acc, m| acc.min_with(m));
        let tol = S::structural_tol();
        let is_member = |env: &Functional<S>| {
            members.iter().any(|m| {
                m.values()
                    .iter()
                    .zip(env.values())
                    .all(|(a, b)| numeric::within(a, b, &tol))
            })
        };
        let envelopes_are_members = is_member(&upper) && is_member(&lower);
        Ok(LikelihoodSet {
            space,
            form: LikelihoodForm::Family { members },
            envelopes_are_members,
            lower,
            upper,
        })
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn form(&self) -> &LikelihoodForm<S> {
        &self.form
    }

    pub fn envelopes_are_members(&self) -> bool {
        self.envelopes_are_members
    }

    /// Pointwise supremum L̄.
    pub fn upper(&self) -> &Functional<S> {
        &self.upper
    }

    /// Pointwise infimum L̲.
    pub fn lower(&self) -> &Functional<S> {
        &self.lower
    }

    pub fn is_precise(&self) -> bool {
        self.lower == self.upper
    }

    /// L̄ on the event, L̲ off it.
    pub fn extreme(&self, event: EventMask) -> Functional<S> {
        let values = (0..self.space.len())
            .map(|i| {
                if event.contains(i) {
                    self.upper.values()[i].clone()
                } else {
                    self.lower.values()[i].clone()
                }
            })
            .collect();
        Functional::from_parts_unchecked(self.space.clone(), values)
    }

    /// True if L̄ 1_A + L̲ 1_Aᶜ is itself in the set. Always true for bands;
    /// for families this is stronger than the envelopes being members.
    pub fn contains_extreme(&self, event: EventMask) -> bool {
        match &self.form {
            LikelihoodForm::Band { .. } => true,
            LikelihoodForm::Family { members } => {
                let extreme = self.extreme(event);
                let tol = S::structural_tol();
                members.iter().any(|m| {
                    m.values()
                        .iter()
                        .zip(extreme.values())
                        .all(|(a, b)| numeric::within(a, b, &tol))
                })
            }
        }
    }

    /// True if every bang-bang likelihood is in the set.
    pub fn contains_all_extremes(&self) -> bool {
        self.is_precise() || self.space.events().all(|a| self.contains_extreme(a))
    }

    /// Multiplies every likelihood by λ > 0.
    pub fn scale(&self, factor: &S) -> Result<Self> {
        if *factor <= S::zero() {
            return Err(Error::ParameterOutOfRange {
                name: "factor",
                value: factor.to_f64(),
                range: "(0, inf)",
            });
        }
        let form = match &self.form {
            LikelihoodForm::Band { lower, upper } => LikelihoodForm::Band {
                lower: lower.scale(factor)?,
                upper: upper.scale(factor)?,
            },
            LikelihoodForm::Family { members } => LikelihoodForm::Family {
                members: members.iter().map(|m| m.scale(factor)).collect::<Result<_>>()?,
            },
        };
        Ok(LikelihoodSet {
            space: self.space.clone(),
            form,
            envelopes_are_members: self.envelopes_are_members,
            lower: self.lower.scale(factor)?,
            upper: self.upper.scale(factor)?,
        })
    }
}

/// A prior capacity, a likelihood set and the event of interest.
#[derive(Clone, Debug)]
pub struct PosteriorQuery<S> {
    pub prior: Capacity<S>,
    pub likelihoods: LikelihoodSet<S>,
    pub event: EventMask,
}

impl<S: Scalar> PosteriorQuery<S> {
    /// Checks that everything shares one space and that the prior core is nonempty.
    pub fn new(prior: Capacity<S>, likelihoods: LikelihoodSet<S>, event: EventMask) -> Result<Self> {
        if prior.space() != likelihoods.space() {
            return Err(Error::SpaceMismatch);
        }
        if !event.fits(prior.len()) {
            return Err(Error::InvalidLikelihood(format!(
                "event {event} refers to outcomes outside the space"
            )));
        }
        if optim::core_is_empty(&prior)? {
            return Err(Error::InfeasibleCore);
        }
        Ok(PosteriorQuery {
            prior,
            likelihoods,
            event,
        })
    }

    pub(crate) fn unchecked(prior: Capacity<S>, likelihoods: LikelihoodSet<S>, event: EventMask) -> Self {
        PosteriorQuery {
            prior,
            likelihoods,
            event,
        }
    }

    pub fn space(&self) -> &OutcomeSpace {
        self.prior.space()
    }

    /// The same query for the complementary event.
    pub fn complemented(&self) -> Self {
        PosteriorQuery {
            prior: self.prior.clone(),
            likelihoods: self.likelihoods.clone(),
            event: self.event.complement(self.prior.len()),
        }
    }

    pub fn with_event(&self, event: EventMask) -> Self {
        PosteriorQuery {
            event,
            ..self.clone()
        }
    }
}

/// One of the two ratio bounds with its ingredients.
#[derive(Clone, Debug, PartialEq)]
pub struct UpperBound<S> {
    pub value: S,
    /// Upper term: the sup (or upper Choquet integral) of L̄ 1_A.
    pub numerator: S,
    /// Lower term: the inf (or lower Choquet integral) of L̲ 1_Aᶜ.
    pub complement: S,
    /// numerator + complement, i.e. 𝐜 or 𝐜′.
    pub denominator: S,
    /// LP optimizers for the two terms (vertex route only).
    pub numerator_prior: Option<ProbabilityVector<S>>,
    pub complement_prior: Option<ProbabilityVector<S>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Route {
    Vertex,
    Choquet,
}

fn ratio<S: Scalar>(event: EventMask, numerator: S, complement: S) -> Result<(S, S)> {
    let denominator = numerator.clone() + complement;
    if denominator <= S::structural_tol() {
        return Err(Error::UndefinedRatio {
            event,
            denominator: denominator.to_f64(),
        });
    }
    let value = (numerator / denominator.clone()).min_of(S::one()).max_of(S::zero());
    Ok((value, denominator))
}

/// First bound: sup ∫L̄1_A dP / 𝐜, both terms solved by LP over the prior core.
pub fn upper_bound_vertex<S: Scalar>(q: &PosteriorQuery<S>) -> Result<UpperBound<S>> {
    let n = q.prior.len();
    let upper = q.likelihoods.upper().restrict(q.event);
    let lower = q.likelihoods.lower().restrict(q.event.complement(n));
    let sup = optim::sup_expectation(&q.prior, &upper)?;
    let inf = optim::inf_expectation(&q.prior, &lower)?;
    let (value, denominator) = ratio(q.event, sup.value.clone(), inf.value.clone())?;
    Ok(UpperBound {
        value,
        numerator: sup.value,
        complement: inf.value,
        denominator,
        numerator_prior: Some(sup.optimizer),
        complement_prior: Some(inf.optimizer),
    })
}

/// Second bound: upper Choquet integral of L̄1_A over 𝐜′.
pub fn upper_bound_choquet<S: Scalar>(q: &PosteriorQuery<S>) -> Result<UpperBound<S>> {
    let n = q.prior.len();
    let upper = q.likelihoods.upper().restrict(q.event);
    let lower = q.likelihoods.lower().restrict(q.event.complement(n));
    let numerator = choquet_upper(&q.prior, &upper)?;
    let complement = choquet_lower(&q.prior, &lower)?;
    let (value, denominator) = ratio(q.event, numerator.clone(), complement.clone())?;
    Ok(UpperBound {
        value,
        numerator,
        complement,
        denominator,
        numerator_prior: None,
        complement_prior: None,
    })
}

pub fn upper_bound<S: Scalar>(q: &PosteriorQuery<S>, route: Route) -> Result<UpperBound<S>> {
    match route {
        Route::Vertex => upper_bound_vertex(q),
        Route::Choquet => upper_bound_choquet(q),
    }
}

/// 1 - upper bound of the complementary event.
pub fn lower_bound<S: Scalar>(q: &PosteriorQuery<S>, route: Route) -> Result<S> {
    Ok(S::one() - upper_bound(&q.complemented(), route)?.value)
}

/// The posterior upper probability of every event, as a capacity.
///
/// Only defined when the bounds are attained: the prior must be
/// 2-alternating and the likelihood envelopes must be members of the set.
/// Events are processed by increasing size; monotonicity defects up to the
/// optimization tolerance are clamped with a warning, larger ones abort.
pub fn posterior_capacity<S: Scalar>(prior: &Capacity<S>, likelihoods: &LikelihoodSet<S>) -> Result<Capacity<S>> {
    if prior.space() != likelihoods.space() {
        return Err(Error::SpaceMismatch);
    }
    if let Some((a, b)) = prior.two_alternating_violation()? {
        return Err(Error::NotTwoAlternating(a, b));
    }
    if !likelihoods.envelopes_are_members() || !likelihoods.contains_all_extremes() {
        return Err(Error::EnvelopesNotMembers);
    }
    let space = prior.space().clone();
    let full = space.full();
    let mut order: Vec<EventMask> = space.events().collect();
    order.sort_by_key(|a| (a.len(), a.bits()));

    let raw: Vec<Result<(EventMask, S)>> = order
        .par_iter()
        .map(|&a| {
            if a.is_empty() {
                return Ok((a, S::zero()));
            }
            let q = PosteriorQuery::unchecked(prior.clone(), likelihoods.clone(), a);
            let bound = upper_bound_vertex(&q)?;
            Ok((a, if a == full { S::one() } else { bound.value }))
        })
        .collect();

    let mut values = vec![S::zero(); space.num_events()];
    let tol = S::optim_tol();
    for item in raw {
        let (a, mut v) = item?;
        for x in a.iter() {
            let sub = EventMask(a.bits() & !(1 << x));
            let below = values[sub.index()].clone();
            if below > v {
                let gap = below.clone() - v.clone();
                if gap > tol {
                    return Err(Error::NotMonotone {
                        smaller: sub,
                        larger: a,
                        small_value: below.to_f64(),
                        large_value: v.to_f64(),
                    });
                }
                warn!("clamping posterior at {} by {:e} to keep it monotone", space.describe(a), gap.to_f64());
                v = below;
            }
        }
        values[a.index()] = v;
    }
    Capacity::validate(space, values)
}

/// Recomputes the posterior capacity and checks that it is still 2-alternating.
pub fn check_preserved_concavity<S: Scalar>(prior: &Capacity<S>, likelihoods: &LikelihoodSet<S>) -> Result<bool> {
    posterior_capacity(prior, likelihoods)?.is_two_alternating()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EqualityDiagnosis {
    /// Prior 2-alternating and the extreme likelihood L̄ 1_A + L̲ 1_Aᶜ in the
    /// likelihood set: the bounds are the posterior upper probability.
    ProvenEqual,
    /// No equality guarantee, and none observed (or no oracle was run).
    BoundOnly,
    /// No equality guarantee, but the oracle matched both bounds.
    NumericallyEqual,
    /// 2-alternating prior whose extreme likelihood is not a member, and the
    /// oracle stayed strictly below the bound.
    StrictGap,
}

impl EqualityDiagnosis {
    pub fn name(self) -> &'static str {
        match self {
            EqualityDiagnosis::ProvenEqual => "ProvenEqual",
            EqualityDiagnosis::BoundOnly => "BoundOnly",
            EqualityDiagnosis::NumericallyEqual => "NumericallyEqual",
            EqualityDiagnosis::StrictGap => "StrictGap",
        }
    }
}

pub fn diagnose<S: Scalar>(
    prior_two_alternating: bool,
    extreme_is_member: bool,
    oracle: Option<&S>,
    bound_vertex: &S,
    bound_choquet: &S,
    tol: &S,
) -> EqualityDiagnosis {
    if prior_two_alternating && extreme_is_member {
        return EqualityDiagnosis::ProvenEqual;
    }
    match oracle {
        None => EqualityDiagnosis::BoundOnly,
        Some(o) if numeric::within(o, bound_vertex, tol) && numeric::within(o, bound_choquet, tol) => {
            EqualityDiagnosis::NumericallyEqual
        }
        Some(_) if prior_two_alternating => EqualityDiagnosis::StrictGap,
        Some(_) => EqualityDiagnosis::BoundOnly,
    }
}

/// Per-event summary of both bounds, their conjugate lower bounds and, when
/// available, the brute-force value.
#[derive(Clone, Debug, PartialEq)]
pub struct PosteriorReport<S> {
    pub event: EventMask,
    pub bound_vertex: S,
    pub bound_choquet: S,
    pub oracle: Option<S>,
    pub lower_vertex: Option<S>,
    pub lower_choquet: Option<S>,
    pub lower_oracle: Option<S>,
    pub equality_diagnosis: EqualityDiagnosis,
    pub c_value: S,
    pub c_prime_value: S,
    /// Prior vertex attaining the numerator of the first bound.
    pub achieving_prior: ProbabilityVector<S>,
    /// L̄ 1_A + L̲ 1_Aᶜ.
    pub extreme_likelihood: Functional<S>,
    /// Prior and likelihood attaining the oracle value.
    pub oracle_prior: Option<ProbabilityVector<S>>,
    pub oracle_likelihood: Option<Functional<S>>,
    pub instance_hash: Option<String>,
}

impl<S: Scalar> PosteriorReport<S> {
    pub fn to_json(&self, space: &OutcomeSpace) -> Value {
        let opt = |v: &Option<S>| v.as_ref().map_or(Value::Null, Scalar::to_json);
        let vec = |v: &[S]| Value::Array(v.iter().map(Scalar::to_json).collect());
        json!({
            "event": space.event_key(self.event),
            "upper": self.bound_vertex.to_json(),
            "lower": opt(&self.lower_vertex),
            "bound_vertex": self.bound_vertex.to_json(),
            "bound_choquet": self.bound_choquet.to_json(),
            "oracle": opt(&self.oracle),
            "lower_vertex": opt(&self.lower_vertex),
            "lower_choquet": opt(&self.lower_choquet),
            "lower_oracle": opt(&self.lower_oracle),
            "equality_diagnosis": self.equality_diagnosis.name(),
            "c": self.c_value.to_json(),
            "c_prime": self.c_prime_value.to_json(),
            "achieving_prior": vec(self.achieving_prior.mass()),
            "extreme_likelihood": vec(self.extreme_likelihood.values()),
            "oracle_prior": self.oracle_prior.as_ref().map_or(Value::Null, |p| vec(p.mass())),
            "oracle_likelihood": self.oracle_likelihood.as_ref().map_or(Value::Null, |l| vec(l.values())),
            "instance_hash": self.instance_hash,
        })
    }
}

/// Bounds and conjugate bounds for one event, without the oracle.
pub fn report<S: Scalar>(q: &PosteriorQuery<S>) -> Result<PosteriorReport<S>> {
    let vertex = upper_bound_vertex(q)?;
    let choquet = upper_bound_choquet(q)?;
    let lower_vertex = optional(lower_bound(q, Route::Vertex))?;
    let lower_choquet = optional(lower_bound(q, Route::Choquet))?;
    let two_alternating = q.prior.is_two_alternating()?;
    let members = q.likelihoods.envelopes_are_members() && q.likelihoods.contains_extreme(q.event);
    let equality_diagnosis = diagnose(
        two_alternating,
        members,
        None,
        &vertex.value,
        &choquet.value,
        &S::optim_tol(),
    );
    let achieving_prior = vertex
        .numerator_prior
        .clone()
        .expect("vertex route always reports its optimizer");
    Ok(PosteriorReport {
        event: q.event,
        bound_vertex: vertex.value,
        bound_choquet: choquet.value,
        oracle: None,
        lower_vertex,
        lower_choquet,
        lower_oracle: None,
        equality_diagnosis,
        c_value: vertex.denominator,
        c_prime_value: choquet.denominator,
        achieving_prior,
        extreme_likelihood: q.likelihoods.extreme(q.event),
        oracle_prior: None,
        oracle_likelihood: None,
        instance_hash: None,
    })
}

/// Maps an undefined ratio to `None`, passing other errors through.
pub(crate) fn optional<T>(r: Result<T>) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::UndefinedRatio { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Exact;

    fn space(n: usize) -> OutcomeSpace {
        OutcomeSpace::indexed(n).unwrap()
    }

    fn worked_query() -> PosteriorQuery<f64> {
        let u = ProbabilityVector::uniform(space(3));
        let prior = Capacity::epsilon_contamination(&u, 0.1).unwrap();
        let l = Functional::new(space(3), vec![0.5, 0.3, 0.2]).unwrap();
        PosteriorQuery::new(prior, LikelihoodSet::precise(l), EventMask(0b001)).unwrap()
    }

    #[test]
    fn worked_example_both_routes() {
        let q = worked_query();
        let v = upper_bound_vertex(&q).unwrap();
        let c = upper_bound_choquet(&q).unwrap();
        assert!((v.value - 4.0 / 7.0).abs() < 1e-12);
        assert!((c.value - 4.0 / 7.0).abs() < 1e-12);
        assert!((v.numerator - 0.2).abs() < 1e-12);
        assert!((v.complement - 0.15).abs() < 1e-12);
        assert!((v.denominator - 0.35).abs() < 1e-12);
    }

    #[test]
    fn worked_example_exact() {
        let r = |a, b| Exact::from_ratio(a, b);
        let u = ProbabilityVector::<Exact>::uniform(space(3));
        let prior = Capacity::epsilon_contamination(&u, r(1, 10)).unwrap();
        let l = Functional::new(space(3), vec![r(1, 2), r(3, 10), r(1, 5)]).unwrap();
        let q = PosteriorQuery::new(prior, LikelihoodSet::precise(l), EventMask(0b001)).unwrap();
        assert_eq!(upper_bound_vertex(&q).unwrap().value, r(4, 7));
        assert_eq!(upper_bound_choquet(&q).unwrap().value, r(4, 7));
    }

    #[test]
    fn whole_and_empty_events() {
        let q = worked_query();
        assert_eq!(upper_bound_vertex(&q.with_event(q.space().full())).unwrap().value, 1.0);
        assert_eq!(upper_bound_vertex(&q.with_event(EventMask::EMPTY)).unwrap().value, 0.0);
        assert_eq!(lower_bound(&q.with_event(q.space().full()), Route::Vertex).unwrap(), 1.0);

        // vacuous prior: the core holds (0, 1, 0), where L = (0.5, 0, 0) has no evidence
        let zero = Functional::new(space(3), vec![0.5, 0.0, 0.0]).unwrap();
        let q = PosteriorQuery::new(Capacity::vacuous(space(3)), LikelihoodSet::precise(zero), EventMask::EMPTY).unwrap();
        assert!(matches!(upper_bound_vertex(&q), Err(Error::UndefinedRatio { .. })));
    }

    #[test]
    fn lower_bound_is_conjugate() {
        let q = worked_query();
        let upper_comp = upper_bound_vertex(&q.complemented()).unwrap().value;
        assert_eq!(lower_bound(&q, Route::Vertex).unwrap(), 1.0 - upper_comp);
    }

    #[test]
    fn precise_prior_and_likelihood_is_bayes() {
        let p = ProbabilityVector::new(space(3), vec![0.2, 0.5, 0.3]).unwrap();
        let l = Functional::new(space(3), vec![0.9, 0.1, 0.4]).unwrap();
        let prior = Capacity::additive(&p);
        let set = LikelihoodSet::precise(l);
        let post = posterior_capacity(&prior, &set).unwrap();
        let evidence = 0.18 + 0.05 + 0.12;
        assert!((post.value(EventMask(0b001)) - 0.18 / evidence).abs() < 1e-12);
        assert!((post.value(EventMask(0b110)) - 0.17 / evidence).abs() < 1e-12);
        assert!(post.is_additive());
        let q = PosteriorQuery::new(prior, set, EventMask(0b001)).unwrap();
        let lower = lower_bound(&q, Route::Vertex).unwrap();
        assert!((lower - 0.18 / evidence).abs() < 1e-12);
    }

    #[test]
    fn vacuous_prior_gives_vacuous_posterior() {
        let prior = Capacity::vacuous(space(3));
        let band = LikelihoodSet::band(
            Functional::new(space(3), vec![0.1, 0.2, 0.3]).unwrap(),
            Functional::new(space(3), vec![0.2, 0.4, 0.3]).unwrap(),
        )
        .unwrap();
        let post = posterior_capacity(&prior, &band).unwrap();
        for a in space(3).events().skip(1) {
            assert!((post.value(a) - 1.0).abs() < 1e-12, "event {a}");
        }
    }

    #[test]
    fn posterior_capacity_preconditions() {
        let env = Capacity::upper_envelope(&[
            ProbabilityVector::new(space(4), vec![0.4, 0.0, 0.4, 0.2]).unwrap(),
            ProbabilityVector::new(space(4), vec![0.2, 0.1, 0.3, 0.4]).unwrap(),
        ])
        .unwrap();
        assert!(!env.is_two_alternating().unwrap());
        let l4 = LikelihoodSet::precise(Functional::new(space(4), vec![0.2, 0.3, 0.4, 0.1]).unwrap());
        assert!(matches!(posterior_capacity(&env, &l4), Err(Error::NotTwoAlternating(..))));

        let fam = LikelihoodSet::family(vec![
            Functional::new(space(2), vec![0.2, 0.5]).unwrap(),
            Functional::new(space(2), vec![0.4, 0.1]).unwrap(),
        ])
        .unwrap();
        assert!(!fam.envelopes_are_members());
        let vac = Capacity::vacuous(space(2));
        assert!(matches!(posterior_capacity(&vac, &fam), Err(Error::EnvelopesNotMembers)));
    }

    #[test]
    fn family_membership_flag() {
        let a = Functional::new(space(2), vec![0.2, 0.5]).unwrap();
        let b = Functional::new(space(2), vec![0.4, 0.6]).unwrap();
        let c = Functional::new(space(2), vec![0.3, 0.55]).unwrap();
        let fam = LikelihoodSet::family(vec![a, b.clone(), c]).unwrap();
        assert!(fam.envelopes_are_members());
        assert_eq!(fam.upper(), &b);
        assert!(fam.contains_extreme(EventMask(0b11)));
        assert!(!fam.contains_extreme(EventMask(0b01)));
        assert!(!fam.contains_all_extremes());
        assert!(matches!(LikelihoodSet::<f64>::family(vec![]), Err(Error::EmptyFamily)));
        assert!(LikelihoodSet::band(b.clone(), Functional::new(space(2), vec![0.1, 0.1]).unwrap()).is_err());
    }

    #[test]
    fn empty_prior_core_is_rejected() {
        let bad = Capacity::validate(space(2), vec![0.0, 0.2, 0.2, 1.0]).unwrap();
        let l = LikelihoodSet::precise(Functional::new(space(2), vec![0.2, 0.5]).unwrap());
        assert!(matches!(PosteriorQuery::new(bad, l, EventMask(1)), Err(Error::InfeasibleCore)));
    }

    #[test]
    fn report_fields() {
        let q = worked_query();
        let r = report(&q).unwrap();
        assert_eq!(r.equality_diagnosis, EqualityDiagnosis::ProvenEqual);
        assert!((r.c_value - 0.35).abs() < 1e-12);
        assert!((r.c_prime_value - 0.35).abs() < 1e-12);
        assert_eq!(r.achieving_prior.to_f64().len(), 3);
        let json = r.to_json(q.space());
        assert_eq!(json["event"], "t1");
        assert_eq!(json["equality_diagnosis"], "ProvenEqual");
    }

    #[test]
    fn diagnosis_rules() {
        let t = 1e-9;
        assert_eq!(diagnose(true, true, None, &0.5, &0.5, &t), EqualityDiagnosis::ProvenEqual);
        assert_eq!(diagnose(false, true, None, &0.5, &0.6, &t), EqualityDiagnosis::BoundOnly);
        assert_eq!(diagnose(false, true, Some(&0.5), &0.5, &0.5, &t), EqualityDiagnosis::NumericallyEqual);
        assert_eq!(diagnose(false, true, Some(&0.4), &0.5, &0.6, &t), EqualityDiagnosis::BoundOnly);
        assert_eq!(diagnose(true, false, Some(&0.4), &0.5, &0.5, &t), EqualityDiagnosis::StrictGap);
    }
}

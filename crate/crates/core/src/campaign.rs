//! Seeded random instances and verification campaigns.
//!
//! Instance `i` of a campaign with seed `s` draws from a ChaCha8 stream keyed
//! by (s, i), so every instance can be regenerated on its own and results do
//! not depend on thread scheduling.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::bayes::{EqualityDiagnosis, LikelihoodSet, PosteriorQuery, PosteriorReport};
use crate::capacity::{Capacity, EventMask, OutcomeSpace, ProbabilityVector};
use crate::choquet::Functional;
use crate::error::{Error, Result};
use crate::model::{Model, ModelOptions};
use crate::numeric::Scalar;
use crate::oracle::{self, LikelihoodSearch};

/// Campaigns enumerate n! vertices and 2^n likelihoods per instance.
pub const MAX_CAMPAIGN_OUTCOMES: usize = 6;

/// Denominator of the rational grid used in exact mode.
const EXACT_GRID: i64 = 60;

const MAX_ATTEMPTS: usize = 1000;

/// Family of random priors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PriorFamily {
    /// p(A)^α with α in (0.2, 1]. In exact mode the concave distortion
    /// min(1, (1 + δ) p(A)) is used instead, since powers are irrational.
    Distortion,
    /// (1 - ε) p(A) + ε.
    Contamination,
    /// Monotone with nonempty core and not 2-alternating: envelopes of a
    /// few probability vectors, or contamination capacities with some values
    /// raised towards their supersets, redrawn until 2-alternation fails.
    /// Needs at least three outcomes.
    Arbitrary,
}

impl PriorFamily {
    pub fn name(self) -> &'static str {
        match self {
            PriorFamily::Distortion => "distortion",
            PriorFamily::Contamination => "contamination",
            PriorFamily::Arbitrary => "arbitrary",
        }
    }
}

impl fmt::Display for PriorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PriorFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "distortion" => Ok(PriorFamily::Distortion),
            "contamination" => Ok(PriorFamily::Contamination),
            "arbitrary" => Ok(PriorFamily::Arbitrary),
            other => Err(format!(
                "unknown family {other:?}; expected distortion, contamination or arbitrary"
            )),
        }
    }
}

/// The generator for instance `index` of a campaign.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform draw from [0, 1]: continuous in floating mode, on the grid k/60
/// in exact mode.
pub fn unit<S: Scalar>(rng: &mut impl Rng) -> S {
    if S::EXACT {
        S::from_ratio(rng.gen_range(0..=EXACT_GRID), EXACT_GRID)
    } else {
        S::from_f64(rng.gen::<f64>())
    }
}

/// Random probability vector; a coordinate is zero with probability 1/10.
pub fn random_probability<S: Scalar>(rng: &mut impl Rng, space: &OutcomeSpace) -> ProbabilityVector<S> {
    loop {
        let weights: Vec<S> = (0..space.len())
            .map(|_| {
                if rng.gen_bool(0.1) {
                    S::zero()
                } else {
                    unit::<S>(rng)
                }
            })
            .collect();
        if let Ok(p) = ProbabilityVector::from_weights(space.clone(), weights) {
            return p;
        }
    }
}

pub fn random_prior<S: Scalar>(rng: &mut impl Rng, space: &OutcomeSpace, family: PriorFamily) -> Capacity<S> {
    let p = random_probability::<S>(rng, space);
    match family {
        PriorFamily::Distortion if S::EXACT => {
            let delta = unit::<S>(rng);
            let full = space.full();
            let values = space
                .events()
                .map(|a| {
                    if a == full {
                        S::one()
                    } else {
                        ((S::one() + delta.clone()) * p.prob(a)).min_of(S::one())
                    }
                })
                .collect();
            Capacity::validate(space.clone(), values).expect("pari-mutuel capacity is valid")
        }
        PriorFamily::Distortion => {
            let alpha = 0.2 + 0.8 * rng.gen::<f64>();
            let p = ProbabilityVector::new(space.clone(), p.to_f64()).expect("same vector");
            let d = Capacity::distortion(&p, alpha).expect("alpha in (0, 1]");
            Capacity::validate(space.clone(), d.values().iter().map(|&x| S::from_f64(x)).collect())
                .expect("distortion capacity is valid")
        }
        PriorFamily::Contamination => {
            Capacity::epsilon_contamination(&p, unit::<S>(rng)).expect("eps in [0, 1]")
        }
        PriorFamily::Arbitrary => loop {
            let c = arbitrary_candidate(rng, space);
            if space.len() < 3 || !c.is_two_alternating().expect("small space") {
                return c;
            }
        },
    }
}

/// Monotone capacity with nonempty core, possibly 2-alternating.
fn arbitrary_candidate<S: Scalar>(rng: &mut impl Rng, space: &OutcomeSpace) -> Capacity<S> {
    let p = random_probability::<S>(rng, space);
    if space.len() >= 4 && rng.gen_bool(0.5) {
        let k = rng.gen_range(2..=3);
        let mut ps = vec![p];
        ps.extend((1..k).map(|_| random_probability::<S>(rng, space)));
        Capacity::upper_envelope(&ps).expect("nonempty family")
    } else {
        let eps = unit::<S>(rng) * S::from_ratio(1, 2);
        let base = Capacity::epsilon_contamination(&p, eps).expect("eps in [0, 1]");
        perturb(rng, &base)
    }
}

/// Raises some values towards the smallest value of their immediate
/// supersets, largest events first. The result stays monotone and its core
/// contains the original one.
fn perturb<S: Scalar>(rng: &mut impl Rng, c: &Capacity<S>) -> Capacity<S> {
    let space = c.space().clone();
    let n = space.len();
    let full = space.full();
    let mut values = c.values().to_vec();
    let mut order: Vec<EventMask> = space.events().filter(|a| !a.is_empty() && *a != full).collect();
    order.sort_by_key(|a| std::cmp::Reverse((a.len(), a.bits())));
    for a in order {
        if !rng.gen_bool(0.4) {
            continue;
        }
        let cap = (0..n)
            .filter(|&x| !a.contains(x))
            .map(|x| values[a.with(x).index()].clone())
            .fold(S::one(), |m, v| m.min_of(v));
        let v = values[a.index()].clone();
        values[a.index()] = v.clone() + unit::<S>(rng) * (cap - v);
    }
    Capacity::validate(space, values).expect("raising below superset values keeps monotonicity")
}

/// Band with lower envelope in [0, 1] and width up to 1 - lower.
pub fn random_band<S: Scalar>(rng: &mut impl Rng, space: &OutcomeSpace) -> LikelihoodSet<S> {
    let lower: Vec<S> = (0..space.len()).map(|_| unit::<S>(rng)).collect();
    let upper: Vec<S> = lower
        .iter()
        .map(|l| l.clone() + unit::<S>(rng) * (S::one() - l.clone()))
        .collect();
    let lower = Functional::new(space.clone(), lower).expect("nonnegative");
    let upper = Functional::new(space.clone(), upper).expect("nonnegative");
    LikelihoodSet::band(lower, upper).expect("ordered envelopes")
}

/// Nonempty event, proper when n > 1.
pub fn random_event(rng: &mut impl Rng, n: usize) -> EventMask {
    let full = EventMask::full(n).bits();
    if n == 1 {
        return EventMask(1);
    }
    EventMask(rng.gen_range(1..full))
}

/// Random point of the core, as a convex combination of vertices.
pub fn random_core_point<S: Scalar>(rng: &mut impl Rng, vertices: &[ProbabilityVector<S>]) -> ProbabilityVector<S> {
    let space = vertices[0].space().clone();
    let weights: Vec<f64> = vertices.iter().map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = weights.iter().sum();
    let mut mass = vec![S::zero(); space.len()];
    for (v, w) in vertices.iter().zip(&weights) {
        let w = S::from_f64(w / total);
        for (m, x) in mass.iter_mut().zip(v.mass()) {
            *m = m.clone() + w.clone() * x.clone();
        }
    }
    ProbabilityVector::from_weights(space, mass).expect("convex combination")
}

/// One random (prior, band, event) model with n in 2..=max_outcomes, or
/// 3..=max_outcomes for the arbitrary family.
pub fn random_model<S: Scalar>(rng: &mut impl Rng, family: PriorFamily, max_outcomes: usize) -> Model<S> {
    let smallest = if family == PriorFamily::Arbitrary { 3 } else { 2 };
    let n = rng.gen_range(smallest..=max_outcomes.max(smallest));
    let space = OutcomeSpace::indexed(n).expect("small space");
    let prior = random_prior::<S>(rng, &space, family);
    let likelihood = random_band::<S>(rng, &space);
    let event = random_event(rng, n);
    Model {
        prior,
        likelihood,
        events: vec![event],
        options: ModelOptions {
            exact: S::EXACT,
            ..ModelOptions::default()
        },
    }
}

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub instances: usize,
    pub seed: u64,
    pub family: PriorFamily,
    pub max_outcomes: usize,
    pub search: LikelihoodSearch,
    pub tol: f64,
}

impl CampaignConfig {
    pub fn new(instances: usize, seed: u64, family: PriorFamily) -> Self {
        CampaignConfig {
            instances,
            seed,
            family,
            max_outcomes: MAX_CAMPAIGN_OUTCOMES,
            search: LikelihoodSearch::Exhaustive,
            tol: crate::numeric::OPTIM_TOL,
        }
    }
}

/// A chain violation together with the model that reproduces it.
#[derive(Clone, Debug)]
pub struct Violation {
    pub index: usize,
    pub message: String,
    pub model: Value,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CampaignSummary {
    pub instances: usize,
    pub resampled: usize,
    pub max_gap_vertex: f64,
    pub max_gap_choquet: f64,
    /// Largest vertex bound minus oracle.
    pub max_slack_oracle_vertex: f64,
    /// Largest Choquet bound minus vertex bound.
    pub max_slack_vertex_choquet: f64,
    pub diagnoses: BTreeMap<String, usize>,
    pub violations: usize,
}

impl CampaignSummary {
    pub fn to_json(&self) -> Value {
        json!({
            "instances": self.instances,
            "resampled": self.resampled,
            "max_gap_vertex": self.max_gap_vertex,
            "max_gap_choquet": self.max_gap_choquet,
            "max_slack_oracle_vertex": self.max_slack_oracle_vertex,
            "max_slack_vertex_choquet": self.max_slack_vertex_choquet,
            "diagnoses": self.diagnoses,
            "violations": self.violations,
        })
    }
}

impl fmt::Display for CampaignSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instances            {}", self.instances)?;
        writeln!(f, "resampled            {}", self.resampled)?;
        writeln!(f, "max |oracle-vertex|  {:.6e}", self.max_gap_vertex)?;
        writeln!(f, "max |oracle-choquet| {:.6e}", self.max_gap_choquet)?;
        writeln!(f, "max vertex-oracle    {:.6e}", self.max_slack_oracle_vertex)?;
        writeln!(f, "max choquet-vertex   {:.6e}", self.max_slack_vertex_choquet)?;
        for (name, count) in &self.diagnoses {
            writeln!(f, "{name:<20} {count}")?;
        }
        write!(f, "violations           {}", self.violations)
    }
}

/// Per-instance outcome of a campaign.
#[derive(Clone, Debug)]
pub struct InstanceRecord<S> {
    pub index: usize,
    pub model: Model<S>,
    pub resampled: usize,
    pub result: std::result::Result<PosteriorReport<S>, Violation>,
}

impl<S: Scalar> InstanceRecord<S> {
    pub fn to_json(&self) -> Value {
        let space = self.model.space();
        let mut record = match &self.result {
            Ok(report) => report.to_json(space),
            Err(v) => json!({"violation": v.message, "model": v.model}),
        };
        record["index"] = json!(self.index);
        record["n"] = json!(space.len());
        record
    }
}

pub struct Campaign<S> {
    pub records: Vec<InstanceRecord<S>>,
    pub summary: CampaignSummary,
}

impl<S> Campaign<S> {
    pub fn violations(&self) -> impl Iterator<Item = &Violation> {
        self.records.iter().filter_map(|r| r.result.as_ref().err())
    }
}

/// Generates instance `index`, redrawing from the same stream while the
/// posterior ratio is undefined.
pub fn run_instance<S: Scalar>(config: &CampaignConfig, index: usize) -> Result<InstanceRecord<S>> {
    let mut rng = instance_rng(config.seed, index as u64);
    let tol = S::from_f64(config.tol);
    for attempt in 0..MAX_ATTEMPTS {
        let model = random_model::<S>(&mut rng, config.family, config.max_outcomes);
        let query = PosteriorQuery::new(model.prior.clone(), model.likelihood.clone(), model.events[0])?;
        let result = match oracle::verify_theorem_with_tol(&query, config.search, &tol) {
            Ok(report) => Ok(report),
            Err(Error::UndefinedRatio { .. } | Error::ZeroEvidence | Error::AllZeroEvidence) => continue,
            Err(Error::ChainViolation(message)) => Err(Violation {
                index,
                message,
                model: model.to_json(),
            }),
            Err(e) => return Err(e),
        };
        return Ok(InstanceRecord {
            index,
            model,
            resampled: attempt,
            result,
        });
    }
    Err(Error::ChainViolation(format!(
        "instance {index}: no defined ratio after {MAX_ATTEMPTS} draws"
    )))
}

pub fn run_campaign<S: Scalar>(config: &CampaignConfig) -> Result<Campaign<S>> {
    let records = (0..config.instances)
        .into_par_iter()
        .map(|i| run_instance::<S>(config, i))
        .collect::<Result<Vec<_>>>()?;
    let mut summary = CampaignSummary {
        instances: records.len(),
        ..CampaignSummary::default()
    };
    for name in [
        EqualityDiagnosis::ProvenEqual,
        EqualityDiagnosis::NumericallyEqual,
        EqualityDiagnosis::BoundOnly,
        EqualityDiagnosis::StrictGap,
    ] {
        summary.diagnoses.insert(name.name().to_string(), 0);
    }
    for record in &records {
        summary.resampled += record.resampled;
        let report = match &record.result {
            Ok(report) => report,
            Err(_) => {
                summary.violations += 1;
                continue;
            }
        };
        *summary
            .diagnoses
            .entry(report.equality_diagnosis.name().to_string())
            .or_default() += 1;
        let oracle = report.oracle.as_ref().expect("verified reports carry the oracle").to_f64();
        let vertex = report.bound_vertex.to_f64();
        let choquet = report.bound_choquet.to_f64();
        summary.max_gap_vertex = summary.max_gap_vertex.max((oracle - vertex).abs());
        summary.max_gap_choquet = summary.max_gap_choquet.max((oracle - choquet).abs());
        summary.max_slack_oracle_vertex = summary.max_slack_oracle_vertex.max(vertex - oracle);
        summary.max_slack_vertex_choquet = summary.max_slack_vertex_choquet.max(choquet - vertex);
    }
    Ok(Campaign { records, summary })
}

//! JSON model files: outcomes, prior, likelihood, watched events, options.
//!
//! ```json
//! {
//!   "version": 1,
//!   "outcomes": ["a", "b", "c"],
//!   "prior": {"kind": "eps-contamination", "p": [0.3, 0.3, 0.4], "eps": 0.1},
//!   "likelihood": {"band": {"lower": [0.4, 0.3, 0.2], "upper": [0.5, 0.3, 0.2]}},
//!   "events": [["a"], ["b", "c"]],
//!   "options": {"exact": false, "tol": 1e-9, "seed": 7}
//! }
//! ```
//!
//! Priors take one of the kinds `explicit` (a `values` map keyed by sorted,
//! comma-joined labels, `""` for the empty event), `eps-contamination`,
//! `distortion` or `envelope` (a list of probability vectors). Likelihoods are
//! a `band`, a `family` or a single `precise` vector. Numbers may be JSON
//! numbers or strings such as `"3/7"`; in exact mode `0.1` is read as 1/10.
//! Every validation error names the JSON path it comes from.

use serde_json::{json, Map, Value};

use crate::bayes::{LikelihoodForm, LikelihoodSet};
use crate::capacity::{Capacity, EventMask, OutcomeSpace, ProbabilityVector};
use crate::choquet::Functional;
use crate::error::{Error, Result};
use crate::numeric::Scalar;

pub const MODEL_VERSION: u64 = 1;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelOptions {
    pub exact: bool,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
}

/// A parsed but not yet numerically interpreted model file.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelFile {
    pub space: OutcomeSpace,
    pub prior: Value,
    pub likelihood: Value,
    pub events: Option<Value>,
    pub options: ModelOptions,
}

/// A model with every number read in one scalar type.
#[derive(Clone, Debug)]
pub struct Model<S> {
    pub prior: Capacity<S>,
    pub likelihood: LikelihoodSet<S>,
    pub events: Vec<EventMask>,
    pub options: ModelOptions,
}

impl ModelFile {
    pub fn from_json_str(text: &str) -> Result<Self> {
        Self::from_value(&serde_json::from_str(text)?)
    }

    pub fn from_value(root: &Value) -> Result<Self> {
        let obj = as_object(root, "$")?;
        check_keys(obj, "$", &["version", "outcomes", "prior", "likelihood", "events", "options"])?;
        check_version(obj, "$")?;
        let space = parse_outcomes(required(obj, "$", "outcomes")?, "$.outcomes")?;
        let prior = required(obj, "$", "prior")?.clone();
        let likelihood = required(obj, "$", "likelihood")?.clone();
        let events = obj.get("events").cloned();
        let options = match obj.get("options") {
            Some(v) => parse_options(v, "$.options")?,
            None => ModelOptions::default(),
        };
        Ok(ModelFile {
            space,
            prior,
            likelihood,
            events,
            options,
        })
    }

    pub fn build<S: Scalar>(&self) -> Result<Model<S>> {
        let prior = parse_capacity::<S>(&self.space, &self.prior, "$.prior")?;
        let likelihood = parse_likelihood::<S>(&self.space, &self.likelihood, "$.likelihood")?;
        let events = match &self.events {
            Some(v) => parse_events(&self.space, v, "$.events")?,
            None => (0..self.space.len()).map(EventMask::singleton).collect(),
        };
        Ok(Model {
            prior,
            likelihood,
            events,
            options: self.options.clone(),
        })
    }
}

impl<S: Scalar> Model<S> {
    pub fn space(&self) -> &OutcomeSpace {
        self.prior.space()
    }

    /// A self-contained model file reproducing this model, for replay.
    pub fn to_json(&self) -> Value {
        let space = self.space();
        let mut options = Map::new();
        options.insert("exact".into(), json!(S::EXACT));
        if let Some(tol) = self.options.tol {
            options.insert("tol".into(), json!(tol));
        }
        if let Some(seed) = self.options.seed {
            options.insert("seed".into(), json!(seed));
        }
        json!({
            "version": MODEL_VERSION,
            "outcomes": space.labels(),
            "prior": capacity_to_json(&self.prior),
            "likelihood": likelihood_to_json(&self.likelihood),
            "events": self.events.iter().map(|&a| event_labels(space, a)).collect::<Vec<_>>(),
            "options": options,
        })
    }
}

/// Explicit JSON form of a capacity; accepted back as a prior.
pub fn capacity_to_json<S: Scalar>(c: &Capacity<S>) -> Value {
    let space = c.space();
    let values: Map<String, Value> = space
        .events()
        .map(|a| (space.event_key(a), c.value(a).to_json()))
        .collect();
    json!({
        "outcomes": space.labels(),
        "kind": "explicit",
        "values": values,
    })
}

pub fn likelihood_to_json<S: Scalar>(l: &LikelihoodSet<S>) -> Value {
    let vec = |f: &Functional<S>| Value::Array(f.values().iter().map(Scalar::to_json).collect());
    match l.form() {
        LikelihoodForm::Band { lower, upper } => json!({"band": {"lower": vec(lower), "upper": vec(upper)}}),
        LikelihoodForm::Family { members } if members.len() == 1 => json!({"precise": vec(&members[0])}),
        LikelihoodForm::Family { members } => json!({"family": members.iter().map(vec).collect::<Vec<_>>()}),
    }
}

pub fn event_labels(space: &OutcomeSpace, event: EventMask) -> Vec<String> {
    event.iter().map(|i| space.labels()[i].clone()).collect()
}

/// Reads `{"version": 1, "observations": [likelihood, ...]}`.
pub fn parse_observations<S: Scalar>(space: &OutcomeSpace, text: &str) -> Result<Vec<LikelihoodSet<S>>> {
    let root: Value = serde_json::from_str(text)?;
    let obj = as_object(&root, "$")?;
    check_keys(obj, "$", &["version", "observations"])?;
    check_version(obj, "$")?;
    let list = as_array(required(obj, "$", "observations")?, "$.observations")?;
    list.iter()
        .enumerate()
        .map(|(i, v)| parse_likelihood(space, v, &format!("$.observations[{i}]")))
        .collect()
}

/// Reads a standalone capacity, whose `outcomes` field is required.
pub fn capacity_from_json<S: Scalar>(v: &Value) -> Result<Capacity<S>> {
    let obj = as_object(v, "$")?;
    let space = parse_outcomes(required(obj, "$", "outcomes")?, "$.outcomes")?;
    parse_capacity(&space, v, "$")
}

/// Reads a capacity in any of the accepted JSON forms.
pub fn parse_capacity<S: Scalar>(space: &OutcomeSpace, v: &Value, path: &str) -> Result<Capacity<S>> {
    let obj = as_object(v, path)?;
    if let Some(outcomes) = obj.get("outcomes") {
        let declared = parse_outcomes(outcomes, &format!("{path}.outcomes"))?;
        if declared != *space {
            return Err(Error::model(
                format!("{path}.outcomes"),
                "outcomes differ from the model outcomes",
            ));
        }
    }
    let kind_path = format!("{path}.kind");
    let kind = required(obj, path, "kind")?
        .as_str()
        .ok_or_else(|| Error::model(&kind_path, "expected a string"))?;
    let at = |e: Error| Error::model(path, e.to_string());
    match kind {
        "explicit" => {
            check_keys(obj, path, &["outcomes", "kind", "values"])?;
            let values_path = format!("{path}.values");
            let map = as_object(required(obj, path, "values")?, &values_path)?;
            let mut table: Vec<Option<S>> = vec![None; space.num_events()];
            for (key, value) in map {
                let entry_path = format!("{values_path}[{key:?}]");
                let event = parse_event_key(space, key, &entry_path)?;
                if table[event.index()].is_some() {
                    return Err(Error::model(entry_path, "event listed twice"));
                }
                table[event.index()] = Some(number(value, &entry_path)?);
            }
            let values = table
                .into_iter()
                .enumerate()
                .map(|(i, v)| {
                    v.ok_or_else(|| {
                        let key = space.event_key(EventMask(i as u32));
                        Error::model(&values_path, format!("missing event {key:?}"))
                    })
                })
                .collect::<Result<Vec<S>>>()?;
            Capacity::validate(space.clone(), values).map_err(at)
        }
        "eps-contamination" => {
            check_keys(obj, path, &["outcomes", "kind", "p", "eps"])?;
            let p = probability(space, required(obj, path, "p")?, &format!("{path}.p"))?;
            let eps = number(required(obj, path, "eps")?, &format!("{path}.eps"))?;
            Capacity::epsilon_contamination(&p, eps).map_err(|e| Error::model(format!("{path}.eps"), e.to_string()))
        }
        "distortion" => {
            check_keys(obj, path, &["outcomes", "kind", "p", "alpha"])?;
            if S::EXACT {
                return Err(Error::model(
                    kind_path,
                    "distortion capacities are irrational in general and need floating mode",
                ));
            }
            let p = probability::<f64>(space, required(obj, path, "p")?, &format!("{path}.p"))?;
            let alpha = number::<f64>(required(obj, path, "alpha")?, &format!("{path}.alpha"))?;
            let c = Capacity::distortion(&p, alpha).map_err(|e| Error::model(format!("{path}.alpha"), e.to_string()))?;
            // S is f64 here; the round trip through f64 is the identity.
            Capacity::validate(space.clone(), c.values().iter().map(|&x| S::from_f64(x)).collect()).map_err(at)
        }
        "envelope" => {
            check_keys(obj, path, &["outcomes", "kind", "vertices"])?;
            let vertices_path = format!("{path}.vertices");
            let list = as_array(required(obj, path, "vertices")?, &vertices_path)?;
            let ps = list
                .iter()
                .enumerate()
                .map(|(i, v)| probability(space, v, &format!("{vertices_path}[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            Capacity::upper_envelope(&ps).map_err(|e| Error::model(vertices_path, e.to_string()))
        }
        other => Err(Error::model(
            kind_path,
            format!("unknown kind {other:?}; expected explicit, eps-contamination, distortion or envelope"),
        )),
    }
}

pub fn parse_likelihood<S: Scalar>(space: &OutcomeSpace, v: &Value, path: &str) -> Result<LikelihoodSet<S>> {
    let obj = as_object(v, path)?;
    if obj.len() != 1 {
        return Err(Error::model(path, "expected exactly one of band, family, precise"));
    }
    let (key, body) = obj.iter().next().expect("one entry");
    let inner = format!("{path}.{key}");
    match key.as_str() {
        "band" => {
            let band = as_object(body, &inner)?;
            check_keys(band, &inner, &["lower", "upper"])?;
            let lower = functional(space, required(band, &inner, "lower")?, &format!("{inner}.lower"))?;
            let upper = functional(space, required(band, &inner, "upper")?, &format!("{inner}.upper"))?;
            LikelihoodSet::band(lower, upper).map_err(|e| Error::model(inner, e.to_string()))
        }
        "family" => {
            let members = as_array(body, &inner)?
                .iter()
                .enumerate()
                .map(|(i, m)| functional(space, m, &format!("{inner}[{i}]")))
                .collect::<Result<Vec<_>>>()?;
            LikelihoodSet::family(members).map_err(|e| Error::model(inner, e.to_string()))
        }
        "precise" => Ok(LikelihoodSet::precise(functional(space, body, &inner)?)),
        other => Err(Error::model(
            path,
            format!("unknown likelihood form {other:?}; expected band, family or precise"),
        )),
    }
}

/// `"all"` for every event, or a list of label lists.
pub fn parse_events(space: &OutcomeSpace, v: &Value, path: &str) -> Result<Vec<EventMask>> {
    if v.as_str() == Some("all") {
        return Ok(space.events().collect());
    }
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let event_path = format!("{path}[{i}]");
            let mut mask = EventMask::EMPTY;
            for (j, label) in as_array(e, &event_path)?.iter().enumerate() {
                let label_path = format!("{event_path}[{j}]");
                let label = label
                    .as_str()
                    .ok_or_else(|| Error::model(&label_path, "expected an outcome label"))?;
                mask = mask.with(outcome(space, label, &label_path)?);
            }
            Ok(mask)
        })
        .collect()
}

fn parse_outcomes(v: &Value, path: &str) -> Result<OutcomeSpace> {
    let labels = as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, l)| {
            let label = l
                .as_str()
                .ok_or_else(|| Error::model(format!("{path}[{i}]"), "expected a string label"))?;
            if label.is_empty() || label.contains(',') || label.trim() != label {
                return Err(Error::model(
                    format!("{path}[{i}]"),
                    "labels must be nonempty, without commas or surrounding spaces",
                ));
            }
            Ok(label.to_string())
        })
        .collect::<Result<Vec<_>>>()?;
    OutcomeSpace::new(labels).map_err(|e| Error::model(path, e.to_string()))
}

fn parse_options(v: &Value, path: &str) -> Result<ModelOptions> {
    let obj = as_object(v, path)?;
    check_keys(obj, path, &["exact", "tol", "seed"])?;
    let exact = match obj.get("exact") {
        None => false,
        Some(b) => b
            .as_bool()
            .ok_or_else(|| Error::model(format!("{path}.exact"), "expected true or false"))?,
    };
    let tol = match obj.get("tol") {
        None => None,
        Some(t) => {
            let t: f64 = number(t, &format!("{path}.tol"))?;
            if t < 0.0 {
                return Err(Error::model(format!("{path}.tol"), "tolerance must be nonnegative"));
            }
            Some(t)
        }
    };
    let seed = match obj.get("seed") {
        None => None,
        Some(s) => Some(
            s.as_u64()
                .ok_or_else(|| Error::model(format!("{path}.seed"), "expected a nonnegative integer"))?,
        ),
    };
    Ok(ModelOptions { exact, tol, seed })
}

fn parse_event_key(space: &OutcomeSpace, key: &str, path: &str) -> Result<EventMask> {
    if key.trim().is_empty() {
        return Ok(EventMask::EMPTY);
    }
    key.split(',').try_fold(EventMask::EMPTY, |mask, label| {
        Ok(mask.with(outcome(space, label.trim(), path)?))
    })
}

fn outcome(space: &OutcomeSpace, label: &str, path: &str) -> Result<usize> {
    space
        .index_of(label)
        .ok_or_else(|| Error::model(path, format!("unknown outcome {label:?}")))
}

fn number<S: Scalar>(v: &Value, path: &str) -> Result<S> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        _ => return Err(Error::model(path, "expected a number")),
    };
    S::parse_literal(&text).ok_or_else(|| Error::model(path, format!("cannot read {text:?} as a number")))
}

fn numbers<S: Scalar>(space: &OutcomeSpace, v: &Value, path: &str) -> Result<Vec<S>> {
    let list = as_array(v, path)?;
    if list.len() != space.len() {
        return Err(Error::model(
            path,
            format!("expected {} values, one per outcome, got {}", space.len(), list.len()),
        ));
    }
    list.iter()
        .enumerate()
        .map(|(i, x)| number(x, &format!("{path}[{i}]")))
        .collect()
}

fn probability<S: Scalar>(space: &OutcomeSpace, v: &Value, path: &str) -> Result<ProbabilityVector<S>> {
    ProbabilityVector::new(space.clone(), numbers(space, v, path)?).map_err(|e| Error::model(path, e.to_string()))
}

fn functional<S: Scalar>(space: &OutcomeSpace, v: &Value, path: &str) -> Result<Functional<S>> {
    Functional::new(space.clone(), numbers(space, v, path)?).map_err(|e| Error::model(path, e.to_string()))
}

fn check_version(obj: &Map<String, Value>, path: &str) -> Result<()> {
    match required(obj, path, "version")?.as_u64() {
        Some(MODEL_VERSION) => Ok(()),
        _ => Err(Error::model(
            format!("{path}.version"),
            format!("unsupported version; expected {MODEL_VERSION}"),
        )),
    }
}

fn check_keys(obj: &Map<String, Value>, path: &str, allowed: &[&str]) -> Result<()> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(Error::model(format!("{path}.{k}"), "unknown field")),
        None => Ok(()),
    }
}

fn required<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::model(format!("{path}.{key}"), "missing field"))
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| Error::model(path, "expected an object"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::model(path, "expected an array"))
}

//! The core of a capacity as a concrete polytope.

use std::collections::BTreeMap;

use crate::capacity::{Capacity, EventMask, OutcomeSpace, ProbabilityVector};
use crate::error::{Error, Result};
use crate::numeric::{Scalar, ScalarKey};
use crate::optim;

/// Vertex enumeration visits n! orderings.
pub const MAX_VERTEX_OUTCOMES: usize = 10;

/// Result of a core membership test. `witness` is the most violated event.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Membership {
    pub contained: bool,
    pub witness: Option<EventMask>,
}

/// p ∈ core(c) iff p(A) ≤ c(A) + tol for every event.
pub fn core_membership<S: Scalar>(c: &Capacity<S>, p: &ProbabilityVector<S>) -> Result<Membership> {
    if c.space() != p.space() {
        return Err(Error::SpaceMismatch);
    }
    let tol = S::optim_tol();
    let mut worst: Option<(EventMask, S)> = None;
    for a in c.space().events() {
        let excess = p.prob(a) - c.value(a).clone();
        if excess > tol && worst.as_ref().map_or(true, |(_, w)| excess > *w) {
            worst = Some((a, excess));
        }
    }
    Ok(Membership {
        contained: worst.is_none(),
        witness: worst.map(|(a, _)| a),
    })
}

pub fn is_core_empty<S: Scalar>(c: &Capacity<S>) -> Result<bool> {
    optim::core_is_empty(c)
}

/// A credal set given as the core of a dominating capacity, with its vertex
/// list cached when the capacity is 2-alternating.
#[derive(Clone, Debug)]
pub struct CredalSet<S> {
    constraint: Capacity<S>,
    vertices: Option<Vec<ProbabilityVector<S>>>,
}

impl<S: Scalar> CredalSet<S> {
    pub fn new(constraint: Capacity<S>) -> Self {
        CredalSet {
            constraint,
            vertices: None,
        }
    }

    /// Builds the set and caches its vertices. Requires a 2-alternating capacity.
    pub fn with_vertices(constraint: Capacity<S>) -> Result<Self> {
        let vertices = core_vertices_two_monotone(&constraint)?;
        Ok(CredalSet {
            constraint,
            vertices: Some(vertices),
        })
    }

    pub fn space(&self) -> &OutcomeSpace {
        self.constraint.space()
    }

    pub fn constraint(&self) -> &Capacity<S> {
        &self.constraint
    }

    pub fn vertices(&self) -> Option<&[ProbabilityVector<S>]> {
        self.vertices.as_deref()
    }

    pub fn contains(&self, p: &ProbabilityVector<S>) -> Result<bool> {
        Ok(core_membership(&self.constraint, p)?.contained)
    }

    pub fn is_empty(&self) -> Result<bool> {
        is_core_empty(&self.constraint)
    }
}

/// Marginal vectors of a 2-alternating capacity: for each ordering σ,
/// p(σ(k)) = c(σ(1..k)) - c(σ(1..k-1)). Deduplicated and returned in
/// lexicographic order.
pub fn core_vertices_two_monotone<S: Scalar>(c: &Capacity<S>) -> Result<Vec<ProbabilityVector<S>>> {
    let n = c.len();
    if n > MAX_VERTEX_OUTCOMES {
        return Err(Error::SpaceTooLarge {
            n,
            max: MAX_VERTEX_OUTCOMES,
        });
    }
    if let Some((a, b)) = c.two_alternating_violation()? {
        return Err(Error::NotTwoAlternating(a, b));
    }
    let mut found: BTreeMap<Vec<ScalarKey>, Vec<S>> = BTreeMap::new();
    let mut mass = vec![S::zero(); n];
    marginals(c, EventMask::EMPTY, &mut mass, &mut found);
    Ok(found
        .into_values()
        .map(|m| ProbabilityVector::from_parts_unchecked(c.space().clone(), m))
        .collect())
}

fn marginals<S: Scalar>(
    c: &Capacity<S>,
    prefix: EventMask,
    mass: &mut [S],
    found: &mut BTreeMap<Vec<ScalarKey>, Vec<S>>,
) {
    let n = c.len();
    if prefix.len() == n {
        let key = mass.iter().map(Scalar::key).collect();
        found.entry(key).or_insert_with(|| mass.to_vec());
        return;
    }
    for x in 0..n {
        if prefix.contains(x) {
            continue;
        }
        let next = prefix.with(x);
        mass[x] = c.value(next).clone() - c.value(prefix).clone();
        marginals(c, next, mass, found);
    }
}

/// Vertex lists as JSON: arrays of mass arrays, lexicographically ordered.
pub fn vertices_to_json<S: Scalar>(vertices: &[ProbabilityVector<S>]) -> serde_json::Value {
    serde_json::Value::Array(
        vertices
            .iter()
            .map(|v| serde_json::Value::Array(v.mass().iter().map(Scalar::to_json).collect()))
            .collect(),
    )
}

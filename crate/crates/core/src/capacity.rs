//! Set functions on a finite outcome space.
//!
//! A [`Capacity`] stores one value per subset, densely, indexed by the
//! subset's bitmask. Upper probabilities, their conjugate lower
//! probabilities and posterior envelopes all live here.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numeric::{self, Scalar};

/// Largest outcome space a capacity may be stored on (2^20 values).
pub const MAX_OUTCOMES: usize = 20;
/// Largest space for which the exhaustive pair check is run.
pub const MAX_PAIR_CHECK: usize = 12;

/// Ordered, uniquely labelled finite set of outcomes.
#[derive(Clone, Debug)]
pub struct OutcomeSpace {
    labels: Arc<[String]>,
}

impl OutcomeSpace {
    pub fn new<I, L>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = L>,
        L: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() || labels.len() > MAX_OUTCOMES {
            return Err(Error::SpaceSize {
                n: labels.len(),
                max: MAX_OUTCOMES,
            });
        }
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::DuplicateLabel(label.clone()));
            }
        }
        Ok(OutcomeSpace {
            labels: labels.into(),
        })
    }

    /// Space labelled `t1..tn`.
    pub fn indexed(n: usize) -> Result<Self> {
        Self::new((1..=n).map(|i| format!("t{i}")))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Number of events, 2^n.
    pub fn num_events(&self) -> usize {
        1 << self.len()
    }

    pub fn full(&self) -> EventMask {
        EventMask::full(self.len())
    }

    pub fn events(&self) -> impl Iterator<Item = EventMask> {
        (0..self.num_events() as u32).map(EventMask)
    }

    pub fn event_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Option<EventMask> {
        labels.iter().try_fold(EventMask::EMPTY, |acc, l| {
            self.index_of(l.as_ref()).map(|i| acc.with(i))
        })
    }

    /// Comma-joined, lexicographically sorted labels; `""` for the empty set.
    pub fn event_key(&self, event: EventMask) -> String {
        let mut names: Vec<&str> = event.iter().map(|i| self.labels[i].as_str()).collect();
        names.sort_unstable();
        names.join(",")
    }

    /// Human-readable `{a,b}` rendering in outcome order.
    pub fn describe(&self, event: EventMask) -> String {
        let names: Vec<&str> = event.iter().map(|i| self.labels[i].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }
}

impl PartialEq for OutcomeSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.labels, &other.labels) || self.labels == other.labels
    }
}

impl Eq for OutcomeSpace {}

/// A subset of the outcome space as a bitmask (bit i = outcome i).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventMask(pub u32);

impl EventMask {
    pub const EMPTY: EventMask = EventMask(0);

    pub fn full(n: usize) -> Self {
        EventMask(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(i: usize) -> Self {
        EventMask(1 << i)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> Self {
        EventMask(self.0 | 1 << i)
    }

    pub fn complement(self, n: usize) -> Self {
        EventMask(!self.0 & Self::full(n).0)
    }

    pub fn union(self, other: Self) -> Self {
        EventMask(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        EventMask(self.0 & other.0)
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Indices of the outcomes in the event, ascending.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits >> i & 1 == 1)
    }

    /// True if the mask only refers to outcomes of an n-element space.
    pub fn fits(self, n: usize) -> bool {
        self.is_subset_of(Self::full(n))
    }
}

impl fmt::Display for EventMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

/// A point of the probability simplex over an outcome space.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityVector<S> {
    space: OutcomeSpace,
    mass: Vec<S>,
}

impl<S: Scalar> ProbabilityVector<S> {
    pub fn new(space: OutcomeSpace, mass: Vec<S>) -> Result<Self> {
        if mass.len() != space.len() {
            return Err(Error::WrongLength {
                expected: space.len(),
                got: mass.len(),
            });
        }
        if let Some((i, m)) = mass.iter().enumerate().find(|(_, m)| **m < S::zero()) {
            return Err(Error::InvalidProbability(format!(
                "negative mass {m} on outcome {i}"
            )));
        }
        let total = numeric::sum(&mass);
        if !numeric::within(&total, &S::one(), &S::structural_tol()) {
            return Err(Error::InvalidProbability(format!("masses sum to {total}")));
        }
        Ok(ProbabilityVector { space, mass })
    }

    /// Normalizes nonnegative weights. Fails if they are all zero.
    pub fn from_weights(space: OutcomeSpace, weights: Vec<S>) -> Result<Self> {
        let total = numeric::sum(&weights);
        if total <= S::zero() || weights.iter().any(|w| *w < S::zero()) {
            return Err(Error::InvalidProbability(
                "weights must be nonnegative with positive total".into(),
            ));
        }
        let mass = weights.into_iter().map(|w| w / total.clone()).collect();
        Self::new(space, mass)
    }

    pub fn uniform(space: OutcomeSpace) -> Self {
        let n = space.len() as i64;
        let mass = vec![S::from_ratio(1, n); space.len()];
        ProbabilityVector { space, mass }
    }

    pub fn point_mass(space: OutcomeSpace, at: usize) -> Self {
        let mut mass = vec![S::zero(); space.len()];
        mass[at] = S::one();
        ProbabilityVector { space, mass }
    }

    pub(crate) fn from_parts_unchecked(space: OutcomeSpace, mass: Vec<S>) -> Self {
        ProbabilityVector { space, mass }
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn mass(&self) -> &[S] {
        &self.mass
    }

    /// P(A).
    pub fn prob(&self, event: EventMask) -> S {
        numeric::sum(event.iter().map(|i| &self.mass[i]))
    }

    /// Expectation of a per-outcome function.
    pub fn expect(&self, values: &[S]) -> S {
        self.mass
            .iter()
            .zip(values)
            .fold(S::zero(), |acc, (m, v)| acc + m.clone() * v.clone())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.mass.iter().map(Scalar::to_f64).collect()
    }
}

/// Normalized monotone set function, stored densely over all 2^n events.
#[derive(Clone, Debug, PartialEq)]
pub struct Capacity<S> {
    space: OutcomeSpace,
    values: Vec<S>,
}

impl<S: Scalar> Capacity<S> {
    /// Checks monotonicity, normalization and range, in that order.
    /// Monotonicity is checked on covers (A against A with one more
    /// outcome), which implies it for every nested pair.
    pub fn validate(space: OutcomeSpace, values: Vec<S>) -> Result<Self> {
        let n = space.len();
        if values.len() != space.num_events() {
            return Err(Error::WrongLength {
                expected: space.num_events(),
                got: values.len(),
            });
        }
        let tol = S::structural_tol();
        for a in 0..values.len() {
            let event = EventMask(a as u32);
            for x in 0..n {
                if event.contains(x) {
                    continue;
                }
                let larger = event.with(x);
                if values[a] > values[larger.index()].clone() + tol.clone() {
                    return Err(Error::NotMonotone {
                        smaller: event,
                        larger,
                        small_value: values[a].to_f64(),
                        large_value: values[larger.index()].to_f64(),
                    });
                }
            }
        }
        let full = space.full().index();
        if !numeric::within(&values[0], &S::zero(), &tol)
            || !numeric::within(&values[full], &S::one(), &tol)
        {
            return Err(Error::NotNormalized {
                empty: values[0].to_f64(),
                full: values[full].to_f64(),
            });
        }
        for (a, v) in values.iter().enumerate() {
            // Written as a negation so NaN is rejected too.
            if !(*v >= -tol.clone() && *v <= S::one() + tol.clone()) {
                return Err(Error::OutOfUnitRange {
                    event: EventMask(a as u32),
                    value: v.to_f64(),
                });
            }
        }
        Ok(Capacity { space, values })
    }

    /// Builds the dense table from a per-event closure, then validates.
    pub fn from_fn(space: OutcomeSpace, f: impl Fn(EventMask) -> S) -> Result<Self> {
        let values = space.events().map(f).collect();
        Self::validate(space, values)
    }

    /// The additive capacity A -> p(A).
    pub fn additive(p: &ProbabilityVector<S>) -> Self {
        let space = p.space().clone();
        let full = space.full();
        let values = space
            .events()
            .map(|a| if a == full { S::one() } else { p.prob(a) })
            .collect();
        Capacity { space, values }
    }

    /// 1 on every nonempty event.
    pub fn vacuous(space: OutcomeSpace) -> Self {
        let values = space
            .events()
            .map(|a| if a.is_empty() { S::zero() } else { S::one() })
            .collect();
        Capacity { space, values }
    }

    /// Upper envelope of the ε-contaminated class around `p`:
    /// (1 - ε) p(A) + ε on nonempty A.
    pub fn epsilon_contamination(p: &ProbabilityVector<S>, eps: S) -> Result<Self> {
        if eps < S::zero() || eps > S::one() {
            return Err(Error::ParameterOutOfRange {
                name: "eps",
                value: eps.to_f64(),
                range: "[0, 1]",
            });
        }
        let space = p.space().clone();
        let full = space.full();
        let keep = S::one() - eps.clone();
        let values = space
            .events()
            .map(|a| {
                if a.is_empty() {
                    S::zero()
                } else if a == full {
                    S::one()
                } else {
                    keep.clone() * p.prob(a) + eps.clone()
                }
            })
            .collect();
        Ok(Capacity { space, values })
    }

    /// Event-wise maximum over a family of probability vectors.
    pub fn upper_envelope(ps: &[ProbabilityVector<S>]) -> Result<Self> {
        let first = ps.first().ok_or(Error::EmptyFamily)?;
        let space = first.space().clone();
        if ps.iter().any(|p| *p.space() != space) {
            return Err(Error::SpaceMismatch);
        }
        let full = space.full();
        let values = space
            .events()
            .map(|a| {
                if a == full {
                    return S::one();
                }
                ps.iter()
                    .map(|p| p.prob(a))
                    .fold(S::zero(), |acc, v| acc.max_of(v))
            })
            .collect();
        Ok(Capacity { space, values })
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn value(&self, event: EventMask) -> &S {
        &self.values[event.index()]
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// A -> 1 - c(A^c).
    pub fn conjugate(&self) -> Self {
        let n = self.len();
        let values = self
            .space
            .events()
            .map(|a| S::one() - self.values[a.complement(n).index()].clone())
            .collect();
        Capacity {
            space: self.space.clone(),
            values,
        }
    }

    /// First pair (A, B) with c(A ∪ B) + c(A ∩ B) > c(A) + c(B) + tol, if any.
    /// Exhaustive over all pairs, so limited to [`MAX_PAIR_CHECK`] outcomes.
    pub fn two_alternating_violation(&self) -> Result<Option<(EventMask, EventMask)>> {
        if self.len() > MAX_PAIR_CHECK {
            return Err(Error::SpaceTooLarge {
                n: self.len(),
                max: MAX_PAIR_CHECK,
            });
        }
        let tol = S::structural_tol();
        let m = self.values.len() as u32;
        for a in 0..m {
            for b in a + 1..m {
                let (a, b) = (EventMask(a), EventMask(b));
                // nested pairs satisfy the inequality with equality
                if a.is_subset_of(b) || b.is_subset_of(a) {
                    continue;
                }
                let lhs = self.value(a.union(b)).clone() + self.value(a.intersection(b)).clone();
                let rhs = self.value(a).clone() + self.value(b).clone();
                if lhs > rhs + tol.clone() {
                    return Ok(Some((a, b)));
                }
            }
        }
        Ok(None)
    }

    pub fn is_two_alternating(&self) -> Result<bool> {
        Ok(self.two_alternating_violation()?.is_none())
    }

    /// True if c(A) = Σ c({x}) for every A (within the structural tolerance).
    pub fn is_additive(&self) -> bool {
        let tol = S::structural_tol();
        self.space.events().all(|a| {
            let parts = numeric::sum(a.iter().map(|i| self.value(EventMask::singleton(i))));
            numeric::within(self.value(a), &parts, &tol)
        })
    }

    /// Converts to the exact-rational representation, value by value.
    pub fn to_exact(&self) -> Capacity<numeric::Exact> {
        Capacity {
            space: self.space.clone(),
            values: self.values.iter().map(Scalar::to_exact).collect(),
        }
    }

    pub fn to_f64(&self) -> Capacity<f64> {
        Capacity {
            space: self.space.clone(),
            values: self.values.iter().map(Scalar::to_f64).collect(),
        }
    }
}

impl Capacity<f64> {
    /// Concave distortion of an additive measure: A -> p(A)^alpha.
    pub fn distortion(p: &ProbabilityVector<f64>, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::ParameterOutOfRange {
                name: "alpha",
                value: alpha,
                range: "(0, 1]",
            });
        }
        let space = p.space().clone();
        let full = space.full();
        let values = space
            .events()
            .map(|a| match a {
                a if a.is_empty() => 0.0,
                a if a == full => 1.0,
                a => p.prob(a).min(1.0).powf(alpha),
            })
            .collect();
        Ok(Capacity { space, values })
    }
}

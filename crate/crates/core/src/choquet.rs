//! Upper and lower Choquet integrals of nonnegative functions.

use crate::capacity::{Capacity, EventMask, OutcomeSpace};
use crate::error::{Error, Result};
use crate::numeric::Scalar;

/// A bounded nonnegative function on the outcome space.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional<S> {
    space: OutcomeSpace,
    values: Vec<S>,
}

impl<S: Scalar> Functional<S> {
    pub fn new(space: OutcomeSpace, values: Vec<S>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::WrongLength {
                expected: space.len(),
                got: values.len(),
            });
        }
        for (i, v) in values.iter().enumerate() {
            if *v < S::zero() || !v.to_f64().is_finite() {
                return Err(Error::InvalidFunctional(format!(
                    "value {v} at outcome {i} is not a finite nonnegative number"
                )));
            }
        }
        Ok(Functional { space, values })
    }

    pub fn constant(space: OutcomeSpace, value: S) -> Result<Self> {
        let values = vec![value; space.len()];
        Self::new(space, values)
    }

    pub fn indicator(space: OutcomeSpace, event: EventMask) -> Self {
        let values = (0..space.len())
            .map(|i| if event.contains(i) { S::one() } else { S::zero() })
            .collect();
        Functional { space, values }
    }

    pub(crate) fn from_parts_unchecked(space: OutcomeSpace, values: Vec<S>) -> Self {
        Functional { space, values }
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// f · 1_A.
    pub fn restrict(&self, event: EventMask) -> Self {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, v)| if event.contains(i) { v.clone() } else { S::zero() })
            .collect();
        Functional {
            space: self.space.clone(),
            values,
        }
    }

    /// λ f for λ ≥ 0.
    pub fn scale(&self, factor: &S) -> Result<Self> {
        let values = self.values.iter().map(|v| v.clone() * factor.clone()).collect();
        Self::new(self.space.clone(), values)
    }

    /// Pointwise maximum.
    pub fn max_with(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone().max_of(b.clone()))
    }

    /// Pointwise minimum.
    pub fn min_with(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a.clone().min_of(b.clone()))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        let values = self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect();
        Functional {
            space: self.space.clone(),
            values,
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(Scalar::to_f64).collect()
    }
}

/// ∫ f dc as Σ (v_i - v_{i+1}) c({f ≥ v_i}) over the distinct values of f in
/// descending order, with v_{k+1} = 0.
pub fn choquet_upper<S: Scalar>(c: &Capacity<S>, f: &Functional<S>) -> Result<S> {
    if c.space() != f.space() {
        return Err(Error::SpaceMismatch);
    }
    Ok(layer_cake(f.values(), |level| c.value(level).clone()))
}

/// Choquet integral against the conjugate capacity.
pub fn choquet_lower<S: Scalar>(c: &Capacity<S>, f: &Functional<S>) -> Result<S> {
    if c.space() != f.space() {
        return Err(Error::SpaceMismatch);
    }
    let n = c.len();
    Ok(layer_cake(f.values(), |level| {
        S::one() - c.value(level.complement(n)).clone()
    }))
}

fn layer_cake<S: Scalar>(values: &[S], measure: impl Fn(EventMask) -> S) -> S {
    let mut order: Vec<usize> = (0..values.len()).collect();
    // stable, so equal values keep index order
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut total = S::zero();
    let mut level = EventMask::EMPTY;
    let mut k = 0;
    while k < order.len() {
        let top = values[order[k]].clone();
        while k < order.len() && values[order[k]] == top {
            level = level.with(order[k]);
            k += 1;
        }
        let next = if k < order.len() {
            values[order[k]].clone()
        } else {
            S::zero()
        };
        let height = top - next;
        if !height.is_zero() {
            total = total + height * measure(level);
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::ProbabilityVector;
    use crate::numeric::Exact;

    fn space(n: usize) -> OutcomeSpace {
        OutcomeSpace::indexed(n).unwrap()
    }

    fn contaminated_uniform3() -> Capacity<f64> {
        let u = ProbabilityVector::uniform(space(3));
        Capacity::epsilon_contamination(&u, 0.1).unwrap()
    }

    #[test]
    fn constant_and_indicator() {
        let c = contaminated_uniform3();
        let f = Functional::constant(space(3), 2.5).unwrap();
        assert!((choquet_upper(&c, &f).unwrap() - 2.5).abs() < 1e-15);
        for a in c.space().events() {
            let ind = Functional::indicator(space(3), a);
            assert_eq!(choquet_upper(&c, &ind).unwrap(), *c.value(a));
            assert!((choquet_lower(&c, &ind).unwrap() - c.conjugate().value(a)).abs() < 1e-15);
        }
    }

    #[test]
    fn contamination_layers() {
        let c = contaminated_uniform3();
        let f = Functional::new(space(3), vec![0.5, 0.0, 0.0]).unwrap();
        assert!((choquet_upper(&c, &f).unwrap() - 0.2).abs() < 1e-15);
        let g = Functional::new(space(3), vec![0.0, 0.3, 0.2]).unwrap();
        assert!((choquet_lower(&c, &g).unwrap() - 0.15).abs() < 1e-15);
    }

    #[test]
    fn contamination_layers_exact() {
        let u = ProbabilityVector::<Exact>::uniform(space(3));
        let c = Capacity::epsilon_contamination(&u, Exact::from_ratio(1, 10)).unwrap();
        let r = |n, d| Exact::from_ratio(n, d);
        let f = Functional::new(space(3), vec![r(1, 2), r(0, 1), r(0, 1)]).unwrap();
        assert_eq!(choquet_upper(&c, &f).unwrap(), r(1, 5));
        let g = Functional::new(space(3), vec![r(0, 1), r(3, 10), r(1, 5)]).unwrap();
        assert_eq!(choquet_lower(&c, &g).unwrap(), r(3, 20));
    }

    #[test]
    fn additive_is_expectation() {
        let p = ProbabilityVector::new(space(3), vec![0.5, 0.3, 0.2]).unwrap();
        let c = Capacity::additive(&p);
        let f = Functional::new(space(3), vec![1.0, 4.0, 2.0]).unwrap();
        let expected = 0.5 + 1.2 + 0.4;
        assert!((choquet_upper(&c, &f).unwrap() - expected).abs() < 1e-12);
        assert!((choquet_lower(&c, &f).unwrap() - expected).abs() < 1e-12);
    }

    #[test]
    fn ties_merge_into_one_layer() {
        let c = contaminated_uniform3();
        let f = Functional::new(space(3), vec![0.7, 0.7, 0.1]).unwrap();
        let expected = 0.6 * c.value(EventMask(0b011)) + 0.1;
        assert!((choquet_upper(&c, &f).unwrap() - expected).abs() < 1e-15);
    }

    #[test]
    fn functional_validation() {
        assert!(Functional::new(space(2), vec![-1.0, 0.0]).is_err());
        assert!(Functional::new(space(2), vec![f64::INFINITY, 0.0]).is_err());
        assert!(Functional::new(space(2), vec![1.0]).is_err());
        let c = contaminated_uniform3();
        let f = Functional::new(space(2), vec![1.0, 0.0]).unwrap();
        assert!(matches!(choquet_upper(&c, &f), Err(Error::SpaceMismatch)));
    }
}

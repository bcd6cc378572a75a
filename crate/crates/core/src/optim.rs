//! Linear optimization over the core of a capacity.
//!
//! The core {p ≥ 0, Σp = 1, p(A) ≤ c(A) for all A} is handled by a
//! two-phase primal simplex on a condensed (Tucker) tableau: one row per
//! domination constraint, one column per nonbasic variable. With n ≤ 12
//! outcomes that is at most 4095 rows by 13 columns. Pivoting follows
//! Bland's rule, which cannot cycle on the heavily degenerate vertices cores
//! tend to have.

use log::debug;

use crate::capacity::{Capacity, EventMask, ProbabilityVector, MAX_PAIR_CHECK};
use crate::choquet::Functional;
use crate::error::{Error, Result};
use crate::numeric::{Exact, Scalar};

/// Largest space the LP is set up for.
pub const MAX_LP_OUTCOMES: usize = MAX_PAIR_CHECK;

const PIVOT_LIMIT: usize = 100_000;
/// Phase-1 residuals in floating mode below this are feasible outright.
const FEASIBLE_RESIDUAL: f64 = 1e-12;
/// Phase-1 residuals in floating mode above this are infeasible outright;
/// anything in between is re-decided in exact arithmetic.
const INFEASIBLE_RESIDUAL: f64 = 1e-7;

/// Optimal value of a linear objective over the core and a basic optimal
/// solution attaining it (a vertex of the core).
#[derive(Clone, Debug, PartialEq)]
pub struct ExpectationBound<S> {
    pub value: S,
    pub optimizer: ProbabilityVector<S>,
}

/// sup over core(c) of Σ f(θ) p(θ).
pub fn sup_expectation<S: Scalar>(c: &Capacity<S>, f: &Functional<S>) -> Result<ExpectationBound<S>> {
    if c.space() != f.space() {
        return Err(Error::SpaceMismatch);
    }
    maximize_linear(c, f.values())
}

/// inf over core(c) of Σ f(θ) p(θ), solved as the negated maximization.
pub fn inf_expectation<S: Scalar>(c: &Capacity<S>, f: &Functional<S>) -> Result<ExpectationBound<S>> {
    if c.space() != f.space() {
        return Err(Error::SpaceMismatch);
    }
    let negated: Vec<S> = f.values().iter().map(|v| -v.clone()).collect();
    let best = maximize_linear(c, &negated)?;
    Ok(ExpectationBound {
        value: -best.value,
        optimizer: best.optimizer,
    })
}

/// Maximizes an arbitrary (possibly signed) linear objective over core(c).
pub fn maximize_linear<S: Scalar>(c: &Capacity<S>, objective: &[S]) -> Result<ExpectationBound<S>> {
    if objective.len() != c.len() {
        return Err(Error::WrongLength {
            expected: c.len(),
            got: objective.len(),
        });
    }
    let mut tableau = Tableau::for_core(c)?;
    let residual = tableau.phase_one()?;
    if !decide_feasible(c, &residual)? {
        return Err(Error::InfeasibleCore);
    }
    tableau.drop_artificial()?;
    tableau.phase_two(objective)?;
    let optimizer = tableau.solution(c);
    let value = optimizer.expect(objective);
    Ok(ExpectationBound { value, optimizer })
}

/// Some member of core(c), or `None` if the core is empty.
pub fn feasible_point<S: Scalar>(c: &Capacity<S>) -> Result<Option<ProbabilityVector<S>>> {
    let zero = vec![S::zero(); c.len()];
    match maximize_linear(c, &zero) {
        Ok(bound) => Ok(Some(bound.optimizer)),
        Err(Error::InfeasibleCore) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Phase-1 feasibility of the core.
pub fn core_is_empty<S: Scalar>(c: &Capacity<S>) -> Result<bool> {
    let mut tableau = Tableau::for_core(c)?;
    let residual = tableau.phase_one()?;
    Ok(!decide_feasible(c, &residual)?)
}

fn decide_feasible<S: Scalar>(c: &Capacity<S>, residual: &S) -> Result<bool> {
    if S::EXACT {
        return Ok(residual.is_zero());
    }
    let r = residual.to_f64();
    if r <= FEASIBLE_RESIDUAL {
        Ok(true)
    } else if r >= INFEASIBLE_RESIDUAL {
        Ok(false)
    } else {
        debug!("phase-1 residual {r:e} is near the feasibility boundary; re-solving exactly");
        let exact: Capacity<Exact> = c.to_exact();
        let mut tableau = Tableau::for_core(&exact)?;
        Ok(tableau.phase_one()?.is_zero())
    }
}

/// Condensed tableau: basic_i = rhs_i - Σ_j a_ij · nonbasic_j, and the
/// objective z = obj_value - Σ_j obj_j · nonbasic_j.
struct Tableau<S> {
    n: usize,
    rows: Vec<Vec<S>>,
    rhs: Vec<S>,
    basis: Vec<usize>,
    nonbasis: Vec<usize>,
    obj: Vec<S>,
    obj_value: S,
    artificial: usize,
    pivots: usize,
}

impl<S: Scalar> Tableau<S> {
    /// Variables: 0..n structural, then one slack per proper nonempty event,
    /// then the artificial variable of the Σp = 1 row.
    fn for_core(c: &Capacity<S>) -> Result<Self> {
        let n = c.len();
        if n > MAX_LP_OUTCOMES {
            return Err(Error::SpaceTooLarge {
                n,
                max: MAX_LP_OUTCOMES,
            });
        }
        let full = c.space().full();
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for a in c.space().events() {
            if a.is_empty() || a == full {
                continue;
            }
            rows.push(indicator_row::<S>(n, a));
            rhs.push(c.value(a).clone());
        }
        let artificial = n + rows.len();
        rows.push(vec![S::one(); n]);
        rhs.push(S::one());
        let basis = (n..=artificial).collect();
        Ok(Tableau {
            n,
            rows,
            rhs,
            basis,
            nonbasis: (0..n).collect(),
            obj: vec![S::zero(); n],
            obj_value: S::zero(),
            artificial,
            pivots: 0,
        })
    }

    /// Maximizes -artificial and returns the leftover artificial value.
    fn phase_one(&mut self) -> Result<S> {
        let last = self.rows.len() - 1;
        self.obj = self.rows[last].iter().map(|a| -a.clone()).collect();
        self.obj_value = -self.rhs[last].clone();
        self.optimize()?;
        Ok(-self.obj_value.clone())
    }

    fn drop_artificial(&mut self) -> Result<()> {
        if let Some(r) = self.basis.iter().position(|&b| b == self.artificial) {
            let tol = S::pivot_tol();
            let col = (0..self.nonbasis.len())
                .filter(|&j| self.nonbasis[j] != self.artificial)
                .max_by(|&i, &j| {
                    self.rows[r][i]
                        .abs()
                        .partial_cmp(&self.rows[r][j].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .filter(|&j| self.rows[r][j].abs() > tol);
            match col {
                Some(s) => self.pivot(r, s),
                None => {
                    // redundant equality row
                    self.rows.remove(r);
                    self.rhs.remove(r);
                    self.basis.remove(r);
                }
            }
        }
        if let Some(s) = self.nonbasis.iter().position(|&v| v == self.artificial) {
            self.nonbasis.remove(s);
            for row in &mut self.rows {
                row.remove(s);
            }
            self.obj.remove(s);
        }
        Ok(())
    }

    fn phase_two(&mut self, objective: &[S]) -> Result<()> {
        let mut obj_value = S::zero();
        let mut obj: Vec<S> = self
            .nonbasis
            .iter()
            .map(|&v| if v < self.n { -objective[v].clone() } else { S::zero() })
            .collect();
        for (i, &b) in self.basis.iter().enumerate() {
            if b >= self.n || objective[b].is_zero() {
                continue;
            }
            let weight = objective[b].clone();
            obj_value = obj_value + weight.clone() * self.rhs[i].clone();
            for (o, a) in obj.iter_mut().zip(&self.rows[i]) {
                *o = o.clone() + weight.clone() * a.clone();
            }
        }
        self.obj = obj;
        self.obj_value = obj_value;
        self.optimize()
    }

    fn optimize(&mut self) -> Result<()> {
        let tol = S::pivot_tol();
        loop {
            // Bland: lowest-index improving variable enters
            let entering = (0..self.nonbasis.len())
                .filter(|&j| self.obj[j] < -tol.clone())
                .min_by_key(|&j| self.nonbasis[j]);
            let Some(s) = entering else {
                return Ok(());
            };
            let mut leaving: Option<(usize, S)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][s];
                if *a <= tol {
                    continue;
                }
                let ratio = self.rhs[i].clone() / a.clone();
                leaving = match leaving {
                    None => Some((i, ratio)),
                    Some((r, best)) => {
                        let tie = (ratio.clone() - best.clone()).abs() <= tol;
                        if (!tie && ratio < best) || (tie && self.basis[i] < self.basis[r]) {
                            Some((i, ratio))
                        } else {
                            Some((r, best))
                        }
                    }
                };
            }
            // the core is bounded, so some row always limits the step
            let (r, _) = leaving.expect("unbounded direction in a bounded polytope");
            self.pivot(r, s);
            if self.pivots > PIVOT_LIMIT {
                return Err(Error::PivotLimit(PIVOT_LIMIT));
            }
        }
    }

    fn pivot(&mut self, r: usize, s: usize) {
        self.pivots += 1;
        let p = self.rows[r][s].clone();
        let inv = S::one() / p;
        for (j, a) in self.rows[r].iter_mut().enumerate() {
            *a = if j == s { inv.clone() } else { a.clone() * inv.clone() };
        }
        self.rhs[r] = self.rhs[r].clone() * inv;
        let pivot_row = self.rows[r].clone();
        let pivot_rhs = self.rhs[r].clone();

        let update = |row: &mut Vec<S>, rhs: &mut S| {
            let f = row[s].clone();
            if f.is_zero() {
                return;
            }
            for (j, a) in row.iter_mut().enumerate() {
                *a = if j == s {
                    -f.clone() * pivot_row[s].clone()
                } else {
                    a.clone() - f.clone() * pivot_row[j].clone()
                };
            }
            *rhs = rhs.clone() - f * pivot_rhs.clone();
        };
        for i in 0..self.rows.len() {
            if i != r {
                let (row, rhs) = (&mut self.rows[i], &mut self.rhs[i]);
                update(row, rhs);
            }
        }
        update(&mut self.obj, &mut self.obj_value);
        std::mem::swap(&mut self.basis[r], &mut self.nonbasis[s]);
    }

    fn solution(&self, c: &Capacity<S>) -> ProbabilityVector<S> {
        let mut mass = vec![S::zero(); self.n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.n {
                mass[b] = self.rhs[i].clone().max_of(S::zero());
            }
        }
        ProbabilityVector::from_parts_unchecked(c.space().clone(), mass)
    }
}

fn indicator_row<S: Scalar>(n: usize, a: EventMask) -> Vec<S> {
    (0..n)
        .map(|i| if a.contains(i) { S::one() } else { S::zero() })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::OutcomeSpace;
    use crate::credal::core_membership;

    fn space(n: usize) -> OutcomeSpace {
        OutcomeSpace::indexed(n).unwrap()
    }

    fn functional(values: &[f64]) -> Functional<f64> {
        Functional::new(space(values.len()), values.to_vec()).unwrap()
    }

    #[test]
    fn additive_core_is_its_measure() {
        let p = ProbabilityVector::new(space(3), vec![0.5, 0.3, 0.2]).unwrap();
        let c = Capacity::additive(&p);
        let f = functional(&[1.0, 2.0, 4.0]);
        let sup = sup_expectation(&c, &f).unwrap();
        let inf = inf_expectation(&c, &f).unwrap();
        assert!((sup.value - 1.9).abs() < 1e-12);
        assert!((inf.value - 1.9).abs() < 1e-12);
        for (a, b) in sup.optimizer.mass().iter().zip(p.mass()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn vacuous_core_is_simplex() {
        let c = Capacity::vacuous(space(2));
        let f = functional(&[3.0, 1.0]);
        let sup = sup_expectation(&c, &f).unwrap();
        assert_eq!(sup.value, 3.0);
        assert_eq!(sup.optimizer.mass(), &[1.0, 0.0]);
        let inf = inf_expectation(&c, &f).unwrap();
        assert_eq!(inf.value, 1.0);
        assert_eq!(inf.optimizer.mass(), &[0.0, 1.0]);
    }

    #[test]
    fn contamination_matches_closed_form() {
        let u = ProbabilityVector::uniform(space(3));
        let c = Capacity::epsilon_contamination(&u, 0.1).unwrap();
        let sup = sup_expectation(&c, &functional(&[0.5, 0.0, 0.0])).unwrap();
        assert!((sup.value - 0.2).abs() < 1e-12);
        assert!(core_membership(&c, &sup.optimizer).unwrap().contained);
        let inf = inf_expectation(&c, &functional(&[0.0, 0.3, 0.2])).unwrap();
        assert!((inf.value - 0.15).abs() < 1e-12);
    }

    #[test]
    fn exact_mode() {
        let u = ProbabilityVector::<Exact>::uniform(space(3));
        let c = Capacity::epsilon_contamination(&u, Exact::from_ratio(1, 10)).unwrap();
        let f = Functional::new(
            space(3),
            vec![Exact::from_ratio(1, 2), Exact::from_ratio(0, 1), Exact::from_ratio(0, 1)],
        )
        .unwrap();
        let sup = sup_expectation(&c, &f).unwrap();
        assert_eq!(sup.value, Exact::from_ratio(1, 5));
        assert_eq!(
            sup.optimizer.mass(),
            &[Exact::from_ratio(2, 5), Exact::from_ratio(3, 10), Exact::from_ratio(3, 10)]
        );
    }

    #[test]
    fn empty_core_is_reported() {
        let c = Capacity::validate(space(2), vec![0.0, 0.2, 0.2, 1.0]).unwrap();
        assert!(core_is_empty(&c).unwrap());
        assert!(matches!(
            sup_expectation(&c, &functional(&[1.0, 0.0])),
            Err(Error::InfeasibleCore)
        ));
        assert!(feasible_point(&c).unwrap().is_none());
        assert!(!core_is_empty(&Capacity::<f64>::vacuous(space(3))).unwrap());
    }

    #[test]
    fn near_boundary_feasibility_is_decided_exactly() {
        // c({a}) + c({b}) misses 1 by 1e-9: empty, but only barely
        let c = Capacity::validate(space(2), vec![0.0, 0.5, 0.5 - 1e-9, 1.0]).unwrap();
        assert!(core_is_empty(&c).unwrap());
        let touching = Capacity::validate(space(2), vec![0.0, 0.25, 0.75, 1.0]).unwrap();
        assert!(!core_is_empty(&touching).unwrap());
    }

    #[test]
    fn rejects_oversized_space() {
        let c = Capacity::<f64>::vacuous(space(13));
        assert!(matches!(core_is_empty(&c), Err(Error::SpaceTooLarge { .. })));
    }
}

//! Bayesian updating of upper probabilities on finite outcome spaces, when
//! both the prior and the likelihood are only known up to a set.
//!
//! The prior is a capacity whose core is the prior credal set; the
//! likelihood is a band or a finite family. [`bayes`] computes the ratio
//! bounds on the posterior upper probability of an event and, for
//! 2-alternating priors, the full posterior capacity. [`oracle`] recomputes
//! the same quantity by enumerating vertices and extreme likelihoods.
//!
//! Everything is generic over [`Scalar`], implemented for `f64` and for the
//! exact rational type [`Exact`].

pub mod bayes;
pub mod campaign;
pub mod capacity;
pub mod choquet;
pub mod credal;
pub mod error;
pub mod model;
pub mod numeric;
pub mod optim;
pub mod oracle;

pub use bayes::{
    check_preserved_concavity, lower_bound, posterior_capacity, upper_bound_choquet, upper_bound_vertex,
    EqualityDiagnosis, LikelihoodForm, LikelihoodSet, PosteriorQuery, PosteriorReport, Route,
};
pub use capacity::{Capacity, EventMask, OutcomeSpace, ProbabilityVector};
pub use choquet::{choquet_lower, choquet_upper, Functional};
pub use credal::{core_membership, core_vertices_two_monotone, is_core_empty, CredalSet};
pub use error::{Error, Result};
pub use numeric::{Exact, Scalar};
pub use optim::{inf_expectation, sup_expectation, ExpectationBound};
pub use oracle::{brute_force_upper, precise_posterior, verify_theorem, LikelihoodSearch, OracleResult};

//! Exact analysis of two-player Bayesian games played with nonlocal
//! resources.
//!
//! A game assigns payoffs `u(a, b, x, y)` to actions `a, b` given types
//! `x, y`; a behavior `P(a, b | x, y)` is the conditional distribution a
//! shared box produces. The crate computes prior-weighted expected payoffs,
//! the best payoff over the local and no-signaling polytopes, decides
//! locality, verifies pure/mixed/correlated and ex post/ex ante equilibria,
//! and synthesizes games in which a nonlocal vertex has an advantage.
//!
//! Everything is exact: scalars live in `Q(sqrt 2)` ([`numeric::QuadExt`]).

pub mod analysis;
pub mod equilibrium;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod model;
pub mod numeric;
pub mod par;
pub mod polytope;
pub mod presets;
pub mod synthesis;

pub use error::{Error, Result};
pub use model::{
    Behavior, Game, JointDistribution, LocalStrategy, Player, Prior, Scenario, StrategicGame,
};
pub use numeric::{parse_scalar, QuadExt, Rational};

//! Solver toolkit for zero-sum information-leakage games.
//!
//! A system handling a secret is a channel: a row-stochastic matrix of
//! observation probabilities per secret value. A defender picks among
//! channel variants, an attacker picks an input influencing which variants
//! do what, and the attacker's payoff is the posterior vulnerability of the
//! resulting channel. Because the attacker cannot see the defender's coin,
//! a mixed defense is itself a channel (the convex combination of the pure
//! ones), which makes the mixed-strategy utility convex in the defender's
//! distribution instead of bilinear: randomizing the defense reduces
//! leakage outright. This crate computes the defender-optimal strategies
//! such games admit, and verifies them independently.
//!
//! # Modules
//!
//! - [`channel`]: channel matrices, priors, convex composition, posteriors.
//! - [`vulnerability`]: Bayes / g-vulnerability / custom convex measures,
//!   posterior vulnerability, leakage.
//! - [`game`]: game definition, pure and mixed utilities, best responses.
//! - [`solver`]: projected subgradient descent and an exact LP route.
//! - [`oracle`]: grid search, saddle audits, convexity checks.
//! - [`crowds`]: anonymity case study on proximity networks.
//! - [`fixtures`]: bundled games and topologies.
//! - [`cli`]: the command surface of the `leakgame` binary.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run -p leakgame --example two_millionaires      # tables + both solvers
//! cargo run -p leakgame --example binary_sum            # convexity of mixed defenses
//! cargo run -p leakgame --example independence_violation # mixing reorders channel preference
//! cargo run -p leakgame --example custom_measures       # g-vulnerability and custom convex measures
//! cargo run -p leakgame --example oracle_cross_check    # solver vs LP vs grid search
//! cargo run -p leakgame --example crowds_manet          # end-to-end anonymity case study
//! ```
//!
//! The `leakgame` binary exposes the same pipeline over JSON files:
//! `solve`, `table`, `verify`, `oracle grid`, `crowds build`, and
//! `examples list|emit`.
//!
//! # Quick start
//!
//! ```
//! use leakgame::{fixtures, solver};
//!
//! let game = fixtures::two_millionaires();
//! let result = solver::solve_lp_bayes(&game).unwrap();
//! assert!((result.value - 0.75).abs() < 1e-9);
//! assert!((result.delta_star.probs()[0] - 0.5).abs() < 1e-9);
//! ```

pub mod channel;
pub mod cli;
pub mod crowds;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod oracle;
pub mod solver;
pub mod vulnerability;

pub use channel::{
    compose_convex, decompose, pad_compatible, Channel, JointDecomposition, Prior, DIST_TOL,
};
pub use error::{Error, Result};
pub use game::{LeakageGame, MixedStrategy, UtilityTable};
pub use solver::{
    project_simplex, solve_lp_bayes, solve_minimax, EquilibriumResult, SolverConfig,
};
pub use vulnerability::{
    column_max_vulnerability, leakage, posterior_vulnerability, prior_vulnerability,
    LeakageReport, VulnerabilityMeasure,
};

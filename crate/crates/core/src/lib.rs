//! Multivariate linear Bernoulli factories.
//!
//! Given coins with unknown biases `p_1..p_k` and known constants
//! `C_1..C_k >= 0`, the samplers in [`factories`] produce a single coin flip
//! with head probability `r = C_1 p_1 + ... + C_k p_k` (or a known rational
//! function of `r`) while counting every input flip.
//!
//! * [`rng`]: seeded streams, exponential variates, alias tables.
//! * [`coins`]: the coin-source contract and simulated coins.
//! * [`factories`]: the samplers.
//! * [`oracle`]: closed-form means and flip bounds, plus an independent
//!   gambler's-ruin solver.
//! * [`stats`]: parallel, reproducible trial runner and verdicts.
//! * [`cli`]: the `linfactory` command-line front end.

pub mod cli;
pub mod coins;
pub mod factories;
pub mod oracle;
pub mod rng;
pub mod stats;

pub use coins::{CoinEnsemble, CoinError, CoinSource, FlipLedger};
pub use factories::{Budget, Constants, Factory, FactoryError, InvocationStats};
pub use oracle::{Experiment, FactoryKind, FlipBound, OracleError};
pub use rng::{AliasTable, RngError, RngStream};

pub use stats::{judge, run_trials, TrialSummary, Verdict};

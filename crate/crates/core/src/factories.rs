//! Linear Bernoulli factories.
//!
//! Given coins with hidden biases `p_1..p_k` and known nonnegative constants
//! `C_1..C_k`, these samplers emit exact coin flips whose head probability is
//! a known function of `r = C_1 p_1 + ... + C_k p_k`:
//!
//! | method                 | head probability                               |
//! |------------------------|------------------------------------------------|
//! | [`Factory::logistic`]  | `r / (1 + r)`                                  |
//! | [`Factory::walk_to_zero`] | `r (1 - r^(m-1)) / (1 - r^m)`               |
//! | [`Factory::high_power`] | `x^m / (1 + x + ... + x^m)`, `x = beta r`     |
//! | [`Factory::residual`]  | `(m-1) x^(m-1) / (1 + x + ... + x^(m-2))`      |
//! | [`Factory::linear`]    | `r`, requires `r <= 1 - epsilon`               |
//! | [`Factory::small_r`]   | `r`, requires `r <= M < 1/2`                   |
//!
//! `linear` and `residual` are mutually recursive. Every invocation of
//! `linear` in the call tree is counted in [`InvocationStats`].

use std::sync::Arc;

use thiserror::Error;

use crate::coins::{CoinError, CoinSource};
use crate::rng::{AliasTable, RngError, RngStream};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FactoryError {
    #[error("flip budget of {limit} exceeded")]
    BudgetExceeded { limit: u64 },
    #[error("recursion depth budget of {limit} exceeded")]
    DepthExceeded { limit: u32 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("nested slack 1 - (1 - epsilon) * beta = {0} is not in (0, 1); the margin r <= 1 - epsilon cannot be kept")]
    InvalidMargin(f64),
    #[error(transparent)]
    Coin(#[from] CoinError),
    #[error(transparent)]
    Rng(#[from] RngError),
}

/// The constants `C_1..C_k`, possibly scaled by a common factor.
///
/// Scaling keeps the ratios `C_i / C`, so scaled copies share one alias table.
#[derive(Debug, Clone)]
pub struct Constants {
    weights: Arc<[f64]>,
    table: Arc<AliasTable>,
    scale: f64,
}

impl Constants {
    pub fn new(weights: &[f64]) -> Result<Self, FactoryError> {
        let table = AliasTable::new(weights).map_err(|e| {
            FactoryError::InvalidParameter(format!("constants: {e}"))
        })?;
        Ok(Self {
            weights: weights.into(),
            table: Arc::new(table),
            scale: 1.0,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `C = sum of C_i` (including the scale factor).
    pub fn total(&self) -> f64 {
        self.table.total_weight() * self.scale
    }

    pub fn get(&self, index: usize) -> f64 {
        self.weights[index] * self.scale
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w * self.scale).collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            weights: Arc::clone(&self.weights),
            table: Arc::clone(&self.table),
            scale: self.scale * factor,
        }
    }

    /// `r = sum C_i p_i`. Only the harness can call this; factories never
    /// see `biases`.
    pub fn weighted_sum(&self, biases: &[f64]) -> f64 {
        self.weights
            .iter()
            .zip(biases)
            .map(|(c, p)| c * p)
            .sum::<f64>()
            * self.scale
    }

    fn table(&self) -> &AliasTable {
        &self.table
    }
}

/// Abort limits for a single top-level invocation. `None` means unlimited.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Budget {
    pub max_flips: Option<u64>,
    pub max_depth: Option<u32>,
}

impl Budget {
    pub const UNLIMITED: Budget = Budget {
        max_flips: None,
        max_depth: None,
    };

    pub fn flips(max_flips: u64) -> Self {
        Self {
            max_flips: Some(max_flips),
            max_depth: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InvocationStats {
    /// Calls to [`Factory::linear`] anywhere in the call tree.
    pub recursion_calls: u64,
    /// Deepest nesting of `linear` calls (1 for a call with no recursion).
    pub max_depth: u32,
    pub aborted: bool,
    /// Smallest `m` the residual loop ever ran with, if it ran at all.
    pub min_residual_m: Option<u64>,
}

/// `m = ceil(4.5 / epsilon) + 1` and `beta = 1 + 1/(m - 1)` for the linear
/// factory at slack `epsilon`.
pub fn linear_parameters(epsilon: f64) -> Result<(u64, f64), FactoryError> {
    check_epsilon(epsilon)?;
    let m = (4.5 / epsilon).ceil() as u64 + 1;
    let beta = 1.0 + 1.0 / (m - 1) as f64;
    Ok((m, beta))
}

/// `beta = 1 / (1 - 2M)` for the small-mean factory.
pub fn small_r_beta(m_bound: f64) -> Result<f64, FactoryError> {
    check_m_bound(m_bound)?;
    Ok(1.0 / (1.0 - 2.0 * m_bound))
}

fn check_epsilon(epsilon: f64) -> Result<(), FactoryError> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(FactoryError::InvalidParameter(format!(
            "epsilon must satisfy epsilon ∈ (0, 1), got {epsilon}"
        )))
    }
}

fn check_m_bound(m_bound: f64) -> Result<(), FactoryError> {
    if m_bound > 0.0 && m_bound < 0.5 {
        Ok(())
    } else {
        Err(FactoryError::InvalidParameter(format!(
            "M must satisfy M ∈ (0, 1/2), got {m_bound}"
        )))
    }
}

fn check_beta(beta: f64) -> Result<(), FactoryError> {
    if beta.is_finite() && beta > 1.0 {
        Ok(())
    } else {
        Err(FactoryError::InvalidParameter(format!(
            "beta must be finite and > 1, got {beta}"
        )))
    }
}

/// One top-level factory invocation over a coin source and a stream.
///
/// Create a fresh `Factory` per trial; the flip budget is measured from the
/// ledger total at construction.
pub struct Factory<'a, S: CoinSource> {
    coins: &'a mut S,
    stream: &'a mut RngStream,
    budget: Budget,
    stats: InvocationStats,
    flips_at_start: u64,
    depth: u32,
}

impl<'a, S: CoinSource> Factory<'a, S> {
    pub fn new(coins: &'a mut S, stream: &'a mut RngStream) -> Self {
        let flips_at_start = coins.ledger().total();
        Self {
            coins,
            stream,
            budget: Budget::UNLIMITED,
            stats: InvocationStats::default(),
            flips_at_start,
            depth: 0,
        }
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    pub fn stats(&self) -> &InvocationStats {
        &self.stats
    }

    pub fn into_stats(self) -> InvocationStats {
        self.stats
    }

    fn check_constants(&self, constants: &Constants) -> Result<(), FactoryError> {
        if constants.len() != self.coins.len() {
            return Err(FactoryError::InvalidParameter(format!(
                "{} constants for {} coins",
                constants.len(),
                self.coins.len()
            )));
        }
        Ok(())
    }

    #[inline]
    fn flip(&mut self, index: usize) -> Result<bool, FactoryError> {
        let heads = self.coins.flip(index, self.stream)?;
        if let Some(limit) = self.budget.max_flips {
            if self.coins.ledger().total() - self.flips_at_start > limit {
                self.stats.aborted = true;
                return Err(FactoryError::BudgetExceeded { limit });
            }
        }
        Ok(heads)
    }

    /// Bernoulli(r / (1 + r)) by racing a rate-1 clock against thinned
    /// rate-C arrivals. Expected flips: `C / (1 + r)`.
    pub fn logistic(&mut self, constants: &Constants) -> Result<bool, FactoryError> {
        self.check_constants(constants)?;
        let rate = constants.total();
        let deadline = self.stream.exponential_unchecked(1.0);
        let mut arrival = self.stream.exponential_unchecked(rate);
        while arrival < deadline {
            let index = constants.table().sample_index(self.stream);
            if self.flip(index)? {
                return Ok(true);
            }
            arrival += self.stream.exponential_unchecked(rate);
        }
        Ok(false)
    }

    /// Walk on `{0..m}` from 1, stepping down on each logistic head; returns
    /// whether it hits 0 first. Needs `r < 1` for finite expected time.
    pub fn walk_to_zero(&mut self, m: u64, constants: &Constants) -> Result<bool, FactoryError> {
        if m < 2 {
            return Err(FactoryError::InvalidParameter(format!(
                "walk_to_zero needs m >= 2, got {m}"
            )));
        }
        let mut position = 1u64;
        while position != 0 && position != m {
            if self.logistic(constants)? {
                position -= 1;
            } else {
                position += 1;
            }
        }
        Ok(position == 0)
    }

    /// Walk on `{0..m+1}` from 1 driven by logistic flips on `beta * C`,
    /// stepping up on heads; returns whether it hits `m + 1` first.
    /// `constants` are the unscaled ones.
    pub fn high_power(
        &mut self,
        m: u64,
        beta: f64,
        constants: &Constants,
    ) -> Result<bool, FactoryError> {
        check_beta(beta)?;
        let inflated = constants.scaled(beta);
        let mut position = 1u64;
        while (1..=m).contains(&position) {
            if self.logistic(&inflated)? {
                position += 1;
            } else {
                position -= 1;
            }
        }
        Ok(position == m + 1)
    }

    /// Bernoulli((m-1) x^(m-1) / (1 + ... + x^(m-2))) with `x = beta r`.
    ///
    /// Each round flips an x-coin through [`Factory::linear`] at the nested
    /// slack `1 - (1 - epsilon) beta`; tails ends in 0, otherwise a
    /// high-power flip of order `m - 2` either ends in 1 or drops `m` by one.
    pub fn residual(
        &mut self,
        epsilon: f64,
        m: u64,
        beta: f64,
        constants: &Constants,
    ) -> Result<bool, FactoryError> {
        check_epsilon(epsilon)?;
        check_beta(beta)?;
        if m < 2 {
            return Err(FactoryError::InvalidParameter(format!(
                "residual needs m >= 2, got {m}"
            )));
        }
        let nested_epsilon = 1.0 - (1.0 - epsilon) * beta;
        if !(nested_epsilon > 0.0 && nested_epsilon < 1.0) {
            return Err(FactoryError::InvalidMargin(nested_epsilon));
        }
        let inflated = constants.scaled(beta);
        let mut m = m;
        loop {
            debug_assert!(m >= 2);
            self.stats.min_residual_m = Some(self.stats.min_residual_m.map_or(m, |v| v.min(m)));
            if !self.linear(nested_epsilon, &inflated)? {
                return Ok(false);
            }
            // m = 2 gives order 0, which always returns heads.
            if self.high_power(m - 2, beta, constants)? {
                return Ok(true);
            }
            m -= 1;
        }
    }

    /// Bernoulli(r) for any `r <= 1 - epsilon`.
    pub fn linear(&mut self, epsilon: f64, constants: &Constants) -> Result<bool, FactoryError> {
        let (m, beta) = linear_parameters(epsilon)?;
        self.stats.recursion_calls += 1;
        self.depth += 1;
        self.stats.max_depth = self.stats.max_depth.max(self.depth);
        if let Some(limit) = self.budget.max_depth {
            if self.depth > limit {
                self.stats.aborted = true;
                self.depth -= 1;
                return Err(FactoryError::DepthExceeded { limit });
            }
        }
        let result = self.linear_body(epsilon, m, beta, constants);
        self.depth -= 1;
        result
    }

    fn linear_body(
        &mut self,
        epsilon: f64,
        m: u64,
        beta: f64,
        constants: &Constants,
    ) -> Result<bool, FactoryError> {
        if !self.walk_to_zero(m, &constants.scaled(beta))? {
            return Ok(false);
        }
        if self.stream.bernoulli_unchecked(1.0 / beta) {
            return Ok(true);
        }
        self.residual(epsilon, m, beta, constants)
    }

    /// Bernoulli(r) for `r <= M < 1/2`, using about `C` flips when `M` is
    /// small.
    pub fn small_r(&mut self, m_bound: f64, constants: &Constants) -> Result<bool, FactoryError> {
        let beta = small_r_beta(m_bound)?;
        if !self.logistic(&constants.scaled(beta))? {
            return Ok(false);
        }
        // The 1/beta draw is only needed on this branch.
        if self.stream.bernoulli_unchecked(1.0 / beta) {
            return Ok(true);
        }
        // Inner target r * beta/(beta - 1) = r / (2M) <= 1/2.
        self.linear(0.5, &constants.scaled(beta / (beta - 1.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coins::CoinEnsemble;

    fn head_rate(
        biases: &[f64],
        n: u64,
        seed: u64,
        mut run: impl FnMut(&mut Factory<'_, CoinEnsemble>) -> Result<bool, FactoryError>,
    ) -> (f64, f64) {
        let mut coins = CoinEnsemble::new(biases.to_vec()).unwrap();
        let mut heads = 0u64;
        for j in 0..n {
            let mut stream = RngStream::new(seed, j);
            let mut factory = Factory::new(&mut coins, &mut stream);
            heads += run(&mut factory).unwrap() as u64;
        }
        (heads as f64 / n as f64, coins.ledger().total() as f64 / n as f64)
    }

    fn within_4_sigma(p_hat: f64, p: f64, n: u64) -> bool {
        (p_hat - p).abs() <= 4.0 * (p * (1.0 - p) / n as f64).sqrt()
    }

    #[test]
    fn linear_parameters_at_half() {
        let (m, beta) = linear_parameters(0.5).unwrap();
        assert_eq!(m, 10);
        assert!((beta - 10.0 / 9.0).abs() < 1e-15);
        assert_eq!(linear_parameters(0.2).unwrap().0, 24);
        assert_eq!(linear_parameters(0.1).unwrap().0, 46);
    }

    #[test]
    fn bad_slacks_rejected() {
        for eps in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(linear_parameters(eps).is_err());
        }
        for m in [0.0, 0.5, 0.6, -1.0, f64::NAN] {
            let err = small_r_beta(m).unwrap_err();
            assert!(err.to_string().contains("M ∈ (0, 1/2)"));
        }
    }

    #[test]
    fn zero_biases_always_tails() {
        let c = Constants::new(&[1.0, 2.0]).unwrap();
        let mut coins = CoinEnsemble::new(vec![0.0, 0.0]).unwrap();
        for j in 0..2000 {
            let mut s = RngStream::new(3, j);
            let mut f = Factory::new(&mut coins, &mut s);
            assert!(!f.logistic(&c).unwrap());
            assert!(!f.walk_to_zero(5, &c).unwrap());
            assert!(!f.linear(0.5, &c).unwrap());
            assert!(!f.small_r(0.1, &c).unwrap());
        }
    }

    #[test]
    fn high_power_order_zero_is_heads_without_flips() {
        let c = Constants::new(&[1.0]).unwrap();
        let mut coins = CoinEnsemble::new(vec![0.3]).unwrap();
        let mut s = RngStream::new(0, 0);
        let mut f = Factory::new(&mut coins, &mut s);
        assert!(f.high_power(0, 1.5, &c).unwrap());
        assert_eq!(coins.ledger().total(), 0);
    }

    #[test]
    fn logistic_two_coins_r_one() {
        let c = Constants::new(&[1.0, 2.0]).unwrap();
        let n = 1_000_000;
        let (p_hat, flips) = head_rate(&[0.5, 0.25], n, 100, |f| f.logistic(&c));
        assert!(within_4_sigma(p_hat, 0.5, n), "{p_hat}");
        // flips is a mixture; C/(1+r) = 1.5, var bounded loosely by 10
        assert!((flips - 1.5).abs() < 4.0 * (10.0 / n as f64).sqrt(), "{flips}");
    }

    #[test]
    fn logistic_one_coin_r_half() {
        let c = Constants::new(&[2.0]).unwrap();
        let n = 1_000_000;
        let (p_hat, flips) = head_rate(&[0.25], n, 101, |f| f.logistic(&c));
        assert!(within_4_sigma(p_hat, 1.0 / 3.0, n), "{p_hat}");
        assert!((flips - 4.0 / 3.0).abs() < 4.0 * (10.0 / n as f64).sqrt(), "{flips}");
    }

    #[test]
    fn walk_to_zero_small_cases() {
        let c = Constants::new(&[1.0]).unwrap();
        let n = 400_000;
        let (p3, _) = head_rate(&[0.5], n, 102, |f| f.walk_to_zero(3, &c));
        assert!(within_4_sigma(p3, 3.0 / 7.0, n), "{p3}");
        let (p2, _) = head_rate(&[0.5], n, 103, |f| f.walk_to_zero(2, &c));
        assert!(within_4_sigma(p2, 1.0 / 3.0, n), "{p2}");
    }

    #[test]
    fn high_power_small_cases() {
        // beta = 2, r = 1/4 so beta r = 1/2
        let c = Constants::new(&[1.0]).unwrap();
        let n = 400_000;
        let (p2, _) = head_rate(&[0.25], n, 104, |f| f.high_power(2, 2.0, &c));
        assert!(within_4_sigma(p2, 1.0 / 7.0, n), "{p2}");
        let (p1, _) = head_rate(&[0.25], n, 105, |f| f.high_power(1, 2.0, &c));
        assert!(within_4_sigma(p1, 1.0 / 3.0, n), "{p1}");
    }

    #[test]
    fn residual_small_cases() {
        // beta = 1.25, r = 0.4: beta r = 1/2; epsilon = 0.5 leaves nested slack 0.375
        let c = Constants::new(&[1.0]).unwrap();
        let n = 200_000;
        let (p2, _) = head_rate(&[0.4], n, 106, |f| f.residual(0.5, 2, 1.25, &c));
        assert!(within_4_sigma(p2, 0.5, n), "{p2}");
        let (p3, _) = head_rate(&[0.4], n, 107, |f| f.residual(0.5, 3, 1.25, &c));
        assert!(within_4_sigma(p3, 1.0 / 3.0, n), "{p3}");
        let (p4, _) = head_rate(&[0.4], n, 108, |f| f.residual(0.5, 4, 1.25, &c));
        assert!(within_4_sigma(p4, 3.0 / 14.0, n), "{p4}");
    }

    #[test]
    fn residual_rejects_bad_inputs() {
        let c = Constants::new(&[1.0]).unwrap();
        let mut coins = CoinEnsemble::new(vec![0.1]).unwrap();
        let mut s = RngStream::new(0, 0);
        let mut f = Factory::new(&mut coins, &mut s);
        assert!(matches!(
            f.residual(0.5, 1, 1.25, &c),
            Err(FactoryError::InvalidParameter(_))
        ));
        // (1 - 0.1) * 1.2 > 1
        assert!(matches!(
            f.residual(0.1, 3, 1.2, &c),
            Err(FactoryError::InvalidMargin(_))
        ));
    }

    #[test]
    fn linear_one_coin_half() {
        let c = Constants::new(&[2.0]).unwrap();
        let n = 300_000;
        let mut coins = CoinEnsemble::new(vec![0.25]).unwrap();
        let mut heads = 0u64;
        let mut calls = 0u64;
        for j in 0..n {
            let mut s = RngStream::new(109, j);
            let mut f = Factory::new(&mut coins, &mut s);
            heads += f.linear(0.5, &c).unwrap() as u64;
            let stats = f.into_stats();
            assert!(stats.recursion_calls >= 1);
            if let Some(m) = stats.min_residual_m {
                assert!(m >= 2);
            }
            calls += stats.recursion_calls;
        }
        assert!(within_4_sigma(heads as f64 / n as f64, 0.5, n));
        assert!((calls as f64 / n as f64) <= 1.4);
    }

    #[test]
    fn small_r_one_coin() {
        let c = Constants::new(&[1.0]).unwrap();
        let n = 1_000_000;
        let (p_hat, _) = head_rate(&[0.05], n, 110, |f| f.small_r(0.1, &c));
        assert!(within_4_sigma(p_hat, 0.05, n), "{p_hat}");
    }

    #[test]
    fn flip_budget_aborts() {
        let c = Constants::new(&[1.0]).unwrap();
        // p = 0: the walk must climb all the way to m = 452
        let mut coins = CoinEnsemble::new(vec![0.0]).unwrap();
        let mut aborted = 0;
        for j in 0..50 {
            let mut s = RngStream::new(111, j);
            let mut f = Factory::new(&mut coins, &mut s).with_budget(Budget::flips(20));
            match f.linear(0.01, &c) {
                Err(FactoryError::BudgetExceeded { limit: 20 }) => {
                    assert!(f.stats().aborted);
                    aborted += 1;
                }
                Ok(_) => {}
                Err(e) => panic!("unexpected {e}"),
            }
            coins.reset_ledger();
        }
        assert_eq!(aborted, 50);
    }

    #[test]
    fn depth_budget_aborts() {
        let c = Constants::new(&[1.0]).unwrap();
        let mut coins = CoinEnsemble::new(vec![0.45]).unwrap();
        let mut s = RngStream::new(0, 0);
        let budget = Budget {
            max_flips: None,
            max_depth: Some(0),
        };
        let mut f = Factory::new(&mut coins, &mut s).with_budget(budget);
        assert_eq!(
            f.linear(0.5, &c),
            Err(FactoryError::DepthExceeded { limit: 0 })
        );
    }

    #[test]
    fn mismatched_constants_rejected() {
        let c = Constants::new(&[1.0, 1.0]).unwrap();
        let mut coins = CoinEnsemble::new(vec![0.1]).unwrap();
        let mut s = RngStream::new(0, 0);
        let mut f = Factory::new(&mut coins, &mut s);
        assert!(matches!(
            f.logistic(&c),
            Err(FactoryError::InvalidParameter(_))
        ));
    }

    #[test]
    fn constants_scaling_shares_ratios() {
        let c = Constants::new(&[1.0, 3.0]).unwrap();
        let s = c.scaled(2.5);
        assert_eq!(s.total(), 10.0);
        assert_eq!(s.to_vec(), vec![2.5, 7.5]);
        assert!((s.weighted_sum(&[0.2, 0.1]) - 1.25).abs() < 1e-15);
        assert!(Constants::new(&[0.0, 0.0]).is_err());
        assert!(Constants::new(&[1.0, -1.0]).is_err());
    }
}

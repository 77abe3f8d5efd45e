//! Reproducible random primitives.
//!
//! Every trial owns an [`RngStream`] keyed by `(seed, stream_id)`. The
//! generator is ChaCha8 with the stream id mapped onto ChaCha's native
//! stream word, so distinct ids give non-overlapping keystreams under the
//! same seed and any stream can be rebuilt in isolation.
//!
//! [`AliasTable`] is Walker's alias method (Vose's two-worklist
//! construction): O(k) to build, one uniform and one comparison per draw.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RngError {
    #[error("exponential rate must be finite and > 0, got {0}")]
    InvalidRate(f64),
    #[error("weight list is empty")]
    EmptyWeights,
    #[error("weight {index} is {value}; weights must be finite and >= 0")]
    InvalidWeight { index: usize, value: f64 },
    #[error("all weights are zero")]
    AllZeroWeights,
    #[error("probability must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
}

/// 2^-53, the spacing of the 53-bit uniform grid on [0, 1).
const UNIT_SCALE: f64 = 1.0 / (1u64 << 53) as f64;

/// A single-owner uniform stream identified by `(seed, stream_id)`.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform on [0, 1) with 53 bits of resolution; advances the stream by
    /// one 64-bit word.
    #[inline]
    pub fn next_unit_uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * UNIT_SCALE
    }

    /// Exp(rate) by inverse CDF on one fresh uniform.
    pub fn sample_exponential(&mut self, rate: f64) -> Result<f64, RngError> {
        check_rate(rate)?;
        Ok(exponential_from_uniform(self.next_unit_uniform(), rate))
    }

    /// Exp(rate) for a rate the caller has already validated.
    #[inline]
    pub(crate) fn exponential_unchecked(&mut self, rate: f64) -> f64 {
        exponential_from_uniform(self.next_unit_uniform(), rate)
    }

    /// One Bernoulli(p) draw from one uniform.
    pub fn bernoulli(&mut self, p: f64) -> Result<bool, RngError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(RngError::InvalidProbability(p));
        }
        Ok(self.bernoulli_unchecked(p))
    }

    #[inline]
    pub(crate) fn bernoulli_unchecked(&mut self, p: f64) -> bool {
        self.next_unit_uniform() < p
    }
}

fn check_rate(rate: f64) -> Result<(), RngError> {
    if rate.is_finite() && rate > 0.0 {
        Ok(())
    } else {
        Err(RngError::InvalidRate(rate))
    }
}

/// Inverse CDF of Exp(rate) evaluated at `u` in [0, 1).
///
/// Uses `-ln(1 - u)` so `u = 0` maps to 0 and the log argument stays in (0, 1].
#[inline]
pub fn exponential_from_uniform(u: f64, rate: f64) -> f64 {
    -(-u).ln_1p() / rate
}

/// Walker alias table over indices `0..k`.
#[derive(Debug, Clone, PartialEq)]
pub struct AliasTable {
    cell_probability: Vec<f64>,
    cell_alias: Vec<usize>,
    total_weight: f64,
}

impl AliasTable {
    /// Builds the table for probabilities `weights[i] / sum(weights)`.
    ///
    /// Small and large worklists are processed in index order, so equal
    /// inputs always give the same table.
    pub fn new(weights: &[f64]) -> Result<Self, RngError> {
        if weights.is_empty() {
            return Err(RngError::EmptyWeights);
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(RngError::InvalidWeight { index, value });
            }
        }
        let total_weight: f64 = weights.iter().sum();
        if total_weight <= 0.0 {
            return Err(RngError::AllZeroWeights);
        }

        let k = weights.len();
        let scale = k as f64 / total_weight;
        let mut scaled: Vec<f64> = weights.iter().map(|w| w * scale).collect();
        let mut cell_probability = vec![1.0; k];
        let mut cell_alias: Vec<usize> = (0..k).collect();

        let mut small: Vec<usize> = Vec::with_capacity(k);
        let mut large: Vec<usize> = Vec::with_capacity(k);
        // Pushed in reverse so `pop` yields ascending indices.
        for i in (0..k).rev() {
            if scaled[i] < 1.0 {
                small.push(i);
            } else {
                large.push(i);
            }
        }

        while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
            small.pop();
            large.pop();
            cell_probability[s] = scaled[s];
            cell_alias[s] = l;
            scaled[l] = (scaled[l] + scaled[s]) - 1.0;
            if scaled[l] < 1.0 {
                small.push(l);
            } else {
                large.push(l);
            }
        }
        // Leftovers are 1 up to rounding.
        for i in large.into_iter().chain(small) {
            cell_probability[i] = 1.0;
            cell_alias[i] = i;
        }

        Ok(Self {
            cell_probability,
            cell_alias,
            total_weight,
        })
    }

    pub fn len(&self) -> usize {
        self.cell_probability.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cell_probability.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn cell_probability(&self) -> &[f64] {
        &self.cell_probability
    }

    pub fn cell_alias(&self) -> &[usize] {
        &self.cell_alias
    }

    /// Draws an index using a single uniform: the integer part of `u * k`
    /// picks the cell and the fractional part decides cell vs alias.
    #[inline]
    pub fn sample_index(&self, stream: &mut RngStream) -> usize {
        let k = self.cell_probability.len();
        if k == 1 {
            return 0;
        }
        let scaled = stream.next_unit_uniform() * k as f64;
        let cell = (scaled as usize).min(k - 1);
        let frac = scaled - cell as f64;
        if frac < self.cell_probability[cell] {
            cell
        } else {
            self.cell_alias[cell]
        }
    }

    /// Mass of each index implied by the table: every cell carries `1/k`,
    /// split between itself and its alias.
    pub fn reconstructed_probabilities(&self) -> Vec<f64> {
        let k = self.len();
        let share = 1.0 / k as f64;
        let mut mass = vec![0.0; k];
        for (cell, (&prob, &alias)) in self
            .cell_probability
            .iter()
            .zip(&self.cell_alias)
            .enumerate()
        {
            mass[cell] += share * prob;
            mass[alias] += share * (1.0 - prob);
        }
        mass
    }
}

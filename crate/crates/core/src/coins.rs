//! Coins a factory may flip, and the flip ledger.
//!
//! Factories see only [`CoinSource`]: the number of coins, a `flip` method and
//! the running-time ledger. The biases live in [`CoinEnsemble`], which is the
//! harness-side simulation of a source.

use thiserror::Error;

use crate::rng::RngStream;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoinError {
    #[error("coin index {index} out of range for {len} coins")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("bias of coin {index} is {value}; biases must lie in [0, 1]")]
    InvalidBias { index: usize, value: f64 },
    #[error("a coin ensemble needs at least one coin")]
    Empty,
}

/// Per-coin and total flip counts for one factory invocation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FlipLedger {
    per_coin: Vec<u64>,
    total: u64,
}

impl FlipLedger {
    pub fn new(k: usize) -> Self {
        Self {
            per_coin: vec![0; k],
            total: 0,
        }
    }

    /// Counts one flip of coin `index`. Panics if `index >= k`.
    #[inline]
    pub fn record(&mut self, index: usize) {
        self.per_coin[index] += 1;
        self.total += 1;
    }

    pub fn per_coin(&self) -> &[u64] {
        &self.per_coin
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn reset(&mut self) {
        self.per_coin.iter_mut().for_each(|c| *c = 0);
        self.total = 0;
    }
}

/// What a factory is allowed to know about its input coins.
///
/// There is deliberately no accessor for the biases.
pub trait CoinSource {
    /// Number of coins `k`.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flips coin `index` (0-based) using `stream` and records it.
    fn flip(&mut self, index: usize, stream: &mut RngStream) -> Result<bool, CoinError>;

    fn ledger(&self) -> &FlipLedger;
}

/// Simulated coins with known biases.
#[derive(Debug, Clone)]
pub struct CoinEnsemble {
    biases: Vec<f64>,
    ledger: FlipLedger,
}

impl CoinEnsemble {
    pub fn new(biases: Vec<f64>) -> Result<Self, CoinError> {
        if biases.is_empty() {
            return Err(CoinError::Empty);
        }
        if let Some((index, &value)) = biases
            .iter()
            .enumerate()
            .find(|(_, p)| !(0.0..=1.0).contains(*p))
        {
            return Err(CoinError::InvalidBias { index, value });
        }
        let ledger = FlipLedger::new(biases.len());
        Ok(Self { biases, ledger })
    }

    /// Harness-only view of the hidden biases.
    pub fn biases(&self) -> &[f64] {
        &self.biases
    }

    pub fn reset_ledger(&mut self) {
        self.ledger.reset();
    }
}

impl CoinSource for CoinEnsemble {
    fn len(&self) -> usize {
        self.biases.len()
    }

    #[inline]
    fn flip(&mut self, index: usize, stream: &mut RngStream) -> Result<bool, CoinError> {
        let p = *self.biases.get(index).ok_or(CoinError::IndexOutOfRange {
            index,
            len: self.biases.len(),
        })?;
        self.ledger.record(index);
        Ok(stream.bernoulli_unchecked(p))
    }

    fn ledger(&self) -> &FlipLedger {
        &self.ledger
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_coins() {
        let mut coins = CoinEnsemble::new(vec![0.0, 1.0]).unwrap();
        let mut s = RngStream::new(0, 0);
        for _ in 0..1000 {
            assert!(!coins.flip(0, &mut s).unwrap());
            assert!(coins.flip(1, &mut s).unwrap());
        }
        assert_eq!(coins.ledger().per_coin(), &[1000, 1000]);
    }

    #[test]
    fn quarter_coin_head_rate() {
        let n = 1_000_000u64;
        let mut coins = CoinEnsemble::new(vec![0.25]).unwrap();
        let mut s = RngStream::new(21, 0);
        let heads = (0..n).filter(|_| coins.flip(0, &mut s).unwrap()).count();
        let sigma = (0.25f64 * 0.75 / n as f64).sqrt();
        assert!((heads as f64 / n as f64 - 0.25).abs() <= 4.0 * sigma);
        assert_eq!(coins.ledger().total(), n);
    }

    #[test]
    fn ledger_counts_and_resets() {
        let mut coins = CoinEnsemble::new(vec![0.5, 0.5, 0.5]).unwrap();
        let mut s = RngStream::new(1, 1);
        coins.flip(0, &mut s).unwrap();
        coins.flip(2, &mut s).unwrap();
        coins.flip(2, &mut s).unwrap();
        assert_eq!(coins.ledger().total(), 3);
        assert_eq!(coins.ledger().per_coin(), &[1, 0, 2]);

        coins.flip(1, &mut s).unwrap();
        coins.flip(1, &mut s).unwrap();
        coins.reset_ledger();
        assert_eq!(coins.ledger().total(), 0);
        coins.reset_ledger();
        assert_eq!(coins.ledger().total(), 0);

        coins.flip(0, &mut s).unwrap();
        coins.flip(0, &mut s).unwrap();
        assert_eq!(coins.ledger().per_coin(), &[2, 0, 0]);
        assert_eq!(coins.ledger().total(), 2);
    }

    #[test]
    fn out_of_range_flip_is_rejected_and_not_counted() {
        let mut coins = CoinEnsemble::new(vec![0.5]).unwrap();
        let mut s = RngStream::new(1, 1);
        assert_eq!(
            coins.flip(1, &mut s),
            Err(CoinError::IndexOutOfRange { index: 1, len: 1 })
        );
        assert_eq!(coins.ledger().total(), 0);
    }

    #[test]
    fn invalid_biases_rejected() {
        assert_eq!(CoinEnsemble::new(vec![]).unwrap_err(), CoinError::Empty);
        assert!(matches!(
            CoinEnsemble::new(vec![0.5, 1.5]),
            Err(CoinError::InvalidBias { index: 1, .. })
        ));
        assert!(CoinEnsemble::new(vec![f64::NAN]).is_err());
    }
}

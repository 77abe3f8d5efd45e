// Plug in your own coins. The factories only ever call `flip`, so any
// source of biased bits works, and the ledger records what was spent.

use std::error::Error;

use linfactory::{CoinError, CoinSource, Constants, Factory, FlipLedger, RngStream};

/// Coin i shows heads when the i-th die roll of the stream is 1, so p_i = 1/6.
struct Dice {
    ledger: FlipLedger,
}

impl CoinSource for Dice {
    fn len(&self) -> usize {
        2
    }

    fn flip(&mut self, index: usize, stream: &mut RngStream) -> Result<bool, CoinError> {
        if index >= 2 {
            return Err(CoinError::IndexOutOfRange { index, len: 2 });
        }
        self.ledger.record(index);
        Ok(stream.next_unit_uniform() < 1.0 / 6.0)
    }

    fn ledger(&self) -> &FlipLedger {
        &self.ledger
    }
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // 1.5/6 + 1.5/6 = 0.5
    let constants = Constants::new(&[1.5, 1.5])?;
    let trials = 20_000u64;
    let mut heads = 0u64;
    let mut dice = Dice { ledger: FlipLedger::new(2) };
    let mut stream = RngStream::new(9, 0);
    for _ in 0..trials {
        heads += Factory::new(&mut dice, &mut stream).linear(0.5, &constants)? as u64;
    }
    let p_hat = heads as f64 / trials as f64;
    println!("head rate {p_hat:.4} (target 0.5)");
    println!("die rolls per coin {:?}", dice.ledger().per_coin());
    assert!((p_hat - 0.5).abs() < 0.02);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

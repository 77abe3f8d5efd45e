// Flip a coin with mean r/(1+r) where r = sum C_i p_i, using only the
// ability to flip each p_i coin.

use std::error::Error;

use linfactory::{Budget, CoinEnsemble, CoinSource, Constants, Factory, RngStream};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let constants = Constants::new(&[1.0, 2.0])?;
    let biases = vec![0.5, 0.25];
    // r = 1 * 0.5 + 2 * 0.25 = 1, so heads should appear half the time.
    let trials = 20_000u64;
    let mut heads = 0u64;
    let mut flips = 0u64;
    for j in 0..trials {
        let mut coins = CoinEnsemble::new(biases.clone())?;
        let mut stream = RngStream::new(42, j);
        let bit = Factory::new(&mut coins, &mut stream)
            .with_budget(Budget::flips(1_000))
            .logistic(&constants)?;
        heads += bit as u64;
        flips += coins.ledger().total();
    }
    let p_hat = heads as f64 / trials as f64;
    let mean_flips = flips as f64 / trials as f64;
    println!("head rate {p_hat:.4} (exact 0.5)");
    println!("mean flips {mean_flips:.4} (exact C/(1+r) = 1.5)");
    assert!((p_hat - 0.5).abs() < 0.02);
    assert!((mean_flips - 1.5).abs() < 0.05);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

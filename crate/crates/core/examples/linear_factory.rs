// Turn coins p_1..p_k into a coin with mean sum C_i p_i, given that the sum
// stays at most 1 - epsilon.

use std::error::Error;

use linfactory::{judge, run_trials, Budget, Experiment, FactoryKind};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    // 1.0 * 0.3 + 0.5 * 0.4 + 0.5 * 0.2 = 0.6 <= 1 - 0.2
    let experiment = Experiment::new(
        FactoryKind::Linear { epsilon: 0.2 },
        vec![1.0, 0.5, 0.5],
        vec![0.3, 0.4, 0.2],
    );
    let summary = run_trials(&experiment, 20_000, 7, 1, Budget::flips(100_000_000))?;
    let verdict = judge(&summary, &experiment, 4.0)?;
    println!("target {:.3}, observed {:.4}, z = {:+.2}", verdict.target_mean, verdict.p_hat, verdict.z);
    println!(
        "mean flips {:.2}, bound 7.67 C / eps = {:.2}, ratio {:.3}",
        verdict.flip_mean, verdict.flip_bound, verdict.flip_ratio
    );
    println!("linear-factory calls per sample {:.3}", verdict.mean_recursion);
    assert!(verdict.pass, "{verdict:?}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

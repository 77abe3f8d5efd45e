// Verify every factory against its exact mean and flip bound, and show that
// the verdict does not depend on the worker count.

use std::error::Error;

use linfactory::{judge, run_trials, Budget, Experiment, FactoryKind};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let experiments = [
        Experiment::new(FactoryKind::Logistic, vec![2.0], vec![0.25]),
        Experiment::new(FactoryKind::WalkToZero { m: 3 }, vec![1.0], vec![0.5]),
        Experiment::new(FactoryKind::HighPower { m: 2, beta: 1.25 }, vec![1.0], vec![0.4]),
        Experiment::new(FactoryKind::Residual { epsilon: 0.5, m: 3, beta: 1.25 }, vec![1.0], vec![0.4]),
        Experiment::new(FactoryKind::Linear { epsilon: 0.5 }, vec![2.0], vec![0.2]),
        Experiment::new(FactoryKind::SmallR { m_bound: 0.1 }, vec![1.0, 1.0], vec![0.05, 0.03]),
    ];
    for experiment in &experiments {
        let one = run_trials(experiment, 10_000, 3, 1, Budget::flips(100_000_000))?;
        let two = run_trials(experiment, 10_000, 3, 2, Budget::flips(100_000_000))?;
        assert_eq!(one, two);
        let verdict = judge(&one, experiment, 4.0)?;
        println!(
            "{:<12} target {:.4} observed {:.4} flips {:.3} bound {:.3} {}",
            experiment.kind.name(),
            verdict.target_mean,
            verdict.p_hat,
            verdict.flip_mean,
            verdict.flip_bound,
            if verdict.pass { "pass" } else { "FAIL" }
        );
        assert!(verdict.pass);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

// When C p is known to be at most M < 1/2, the small-r factory spends close
// to C flips per output, approaching the C(1-p)/(1-Cp) floor.

use std::error::Error;

use linfactory::{judge, run_trials, Budget, Experiment, FactoryKind};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    println!("{:>6} {:>10} {:>12} {:>12}", "M", "r", "mean flips", "lower bound");
    for m_bound in [0.25, 0.1, 0.01] {
        let r = m_bound / 2.0;
        let experiment = Experiment::new(FactoryKind::SmallR { m_bound }, vec![1.0], vec![r]);
        let summary = run_trials(&experiment, 20_000, 11, 1, Budget::flips(100_000_000))?;
        let verdict = judge(&summary, &experiment, 4.0)?;
        let lower = experiment.flip_lower_bound().unwrap_or(f64::NAN);
        println!("{m_bound:>6} {r:>10} {:>12.4} {lower:>12.4}", verdict.flip_mean);
        assert!(verdict.pass, "{verdict:?}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

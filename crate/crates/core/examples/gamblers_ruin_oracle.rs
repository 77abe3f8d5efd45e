// Closed-form gambler's ruin quantities against a direct linear solve.

use std::error::Error;

use linfactory::oracle::{
    absorption_probability_by_elimination, absorption_probability_closed_form,
    expected_absorption_time, expected_absorption_time_by_elimination,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let (m, up) = (10, 0.4);
    println!("{:>5} {:>14} {:>14} {:>14} {:>14}", "start", "P(hit m)", "solver", "E[time]", "solver");
    for start in 0..=m {
        let p = absorption_probability_closed_form(m, up, start)?;
        let p_solved = absorption_probability_by_elimination(m, up, start)?;
        let t = expected_absorption_time(m, up, start)?;
        let t_solved = expected_absorption_time_by_elimination(m, up, start)?;
        println!("{start:>5} {p:>14.10} {p_solved:>14.10} {t:>14.8} {t_solved:>14.8}");
        assert!((p - p_solved).abs() < 1e-12);
        assert!((t - t_solved).abs() <= 1e-9 * t.max(1.0));
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}

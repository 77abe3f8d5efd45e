//! Closed-form ground truth for the factories.
//!
//! [`exact_output_mean`] and [`expected_flip_bound`] evaluate the known laws
//! and cost bounds given the biases (which the oracle, unlike a factory, may
//! read). The gambler's-ruin helpers compute hitting probabilities and times
//! both from the textbook closed forms and from a tridiagonal solve of the
//! first-step equations; the two routes share no code.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coins::CoinSource;
use crate::factories::{linear_parameters, Constants, Factory, FactoryError};

/// Proven cost constant of the linear factory, in units of `C / epsilon`.
pub const LINEAR_COST_CONSTANT: f64 = 7.67;
/// Cost constant of the inner linear call in the small-mean bound.
pub const SMALL_R_COST_CONSTANT: f64 = 15.2;
/// Rounding allowance on `r <= 1 - epsilon` and `r <= M`, so that cells set
/// exactly on the boundary survive the floating-point sum for `r`.
pub const MARGIN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("closed form {closed} and linear solve {solved} disagree")]
    RouteDisagreement { closed: f64, solved: f64 },
}

fn violated(what: impl Into<String>) -> OracleError {
    OracleError::Precondition(what.into())
}

/// Which factory to run, with the parameters it needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "factory", rename_all = "snake_case")]
pub enum FactoryKind {
    Logistic,
    WalkToZero { m: u64 },
    HighPower { m: u64, beta: f64 },
    Residual { epsilon: f64, m: u64, beta: f64 },
    Linear { epsilon: f64 },
    SmallR { m_bound: f64 },
}

/// The slack a factory is configured with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Slack {
    Epsilon(f64),
    MBound(f64),
}

impl Slack {
    pub fn kind(&self) -> &'static str {
        match self {
            Slack::Epsilon(_) => "epsilon",
            Slack::MBound(_) => "M",
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            Slack::Epsilon(v) | Slack::MBound(v) => v,
        }
    }
}

impl FactoryKind {
    pub fn name(&self) -> &'static str {
        match self {
            FactoryKind::Logistic => "logistic",
            FactoryKind::WalkToZero { .. } => "walk_to_zero",
            FactoryKind::HighPower { .. } => "high_power",
            FactoryKind::Residual { .. } => "residual",
            FactoryKind::Linear { .. } => "linear",
            FactoryKind::SmallR { .. } => "small_r",
        }
    }

    pub fn slack(&self) -> Option<Slack> {
        match *self {
            FactoryKind::Residual { epsilon, .. } | FactoryKind::Linear { epsilon } => {
                Some(Slack::Epsilon(epsilon))
            }
            FactoryKind::SmallR { m_bound } => Some(Slack::MBound(m_bound)),
            _ => None,
        }
    }

    /// Runs this factory once.
    pub fn sample<S: CoinSource>(
        &self,
        factory: &mut Factory<'_, S>,
        constants: &Constants,
    ) -> Result<bool, FactoryError> {
        match *self {
            FactoryKind::Logistic => factory.logistic(constants),
            FactoryKind::WalkToZero { m } => factory.walk_to_zero(m, constants),
            FactoryKind::HighPower { m, beta } => factory.high_power(m, beta, constants),
            FactoryKind::Residual { epsilon, m, beta } => {
                factory.residual(epsilon, m, beta, constants)
            }
            FactoryKind::Linear { epsilon } => factory.linear(epsilon, constants),
            FactoryKind::SmallR { m_bound } => factory.small_r(m_bound, constants),
        }
    }
}

/// A flip-count reference value. `exact` marks a true expectation rather
/// than an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlipBound {
    pub value: f64,
    pub exact: bool,
}

/// A factory configuration together with the hidden biases.
#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub kind: FactoryKind,
    pub constants: Vec<f64>,
    pub biases: Vec<f64>,
}

impl Experiment {
    pub fn new(kind: FactoryKind, constants: Vec<f64>, biases: Vec<f64>) -> Self {
        Self {
            kind,
            constants,
            biases,
        }
    }

    pub fn k(&self) -> usize {
        self.constants.len()
    }

    pub fn total_constant(&self) -> f64 {
        self.constants.iter().sum()
    }

    pub fn r(&self) -> f64 {
        self.constants
            .iter()
            .zip(&self.biases)
            .map(|(c, p)| c * p)
            .sum()
    }

    /// Checks the inputs and the factory's preconditions; returns `r`.
    pub fn validate(&self) -> Result<f64, OracleError> {
        validate(&self.kind, &self.constants, &self.biases)
    }

    pub fn exact_output_mean(&self) -> Result<f64, OracleError> {
        exact_output_mean(&self.kind, &self.constants, &self.biases)
    }

    pub fn expected_flip_bound(&self) -> Result<FlipBound, OracleError> {
        expected_flip_bound(&self.kind, &self.constants, &self.biases)
    }

    /// `C(1 - p)/(1 - Cp)` for single-coin experiments, `None` otherwise.
    pub fn flip_lower_bound(&self) -> Option<f64> {
        match (self.constants.as_slice(), self.biases.as_slice()) {
            ([c], [p]) => equivalent_flip_lower_bound(*c, *p).ok(),
            _ => None,
        }
    }
}

fn validate(kind: &FactoryKind, constants: &[f64], biases: &[f64]) -> Result<f64, OracleError> {
    if constants.is_empty() {
        return Err(OracleError::InvalidInput("no constants given".into()));
    }
    if constants.len() != biases.len() {
        return Err(OracleError::InvalidInput(format!(
            "{} constants but {} biases",
            constants.len(),
            biases.len()
        )));
    }
    if let Some(c) = constants.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
        return Err(OracleError::InvalidInput(format!(
            "constant {c} is not finite and >= 0"
        )));
    }
    if !constants.iter().any(|c| *c > 0.0) {
        return Err(OracleError::InvalidInput(
            "at least one constant must be > 0".into(),
        ));
    }
    if let Some(p) = biases.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(OracleError::InvalidInput(format!("bias {p} is not in [0, 1]")));
    }
    let r: f64 = constants.iter().zip(biases).map(|(c, p)| c * p).sum();

    let check_m = |m: u64| {
        if m >= 2 {
            Ok(())
        } else {
            Err(violated(format!("m >= 2 (got m = {m})")))
        }
    };
    let check_beta = |beta: f64| {
        if beta.is_finite() && beta > 1.0 {
            Ok(())
        } else {
            Err(violated(format!("beta > 1 (got beta = {beta})")))
        }
    };
    let check_epsilon = |epsilon: f64| {
        if epsilon > 0.0 && epsilon < 1.0 {
            Ok(())
        } else {
            Err(violated(format!("epsilon ∈ (0, 1) (got epsilon = {epsilon})")))
        }
    };
    let check_margin = |epsilon: f64| {
        if r <= 1.0 - epsilon + MARGIN_TOLERANCE {
            Ok(())
        } else {
            Err(violated(format!(
                "r <= 1 - epsilon (r = {r}, 1 - epsilon = {})",
                1.0 - epsilon
            )))
        }
    };

    match *kind {
        FactoryKind::Logistic => {}
        FactoryKind::WalkToZero { m } => {
            check_m(m)?;
            if r >= 1.0 {
                return Err(violated(format!("r < 1 (r = {r})")));
            }
        }
        FactoryKind::HighPower { beta, .. } => {
            check_beta(beta)?;
            if beta * r >= 1.0 {
                return Err(violated(format!("beta * r < 1 (beta * r = {})", beta * r)));
            }
        }
        FactoryKind::Residual { epsilon, m, beta } => {
            check_m(m)?;
            check_beta(beta)?;
            check_epsilon(epsilon)?;
            check_margin(epsilon)?;
            if beta * (1.0 - epsilon) >= 1.0 {
                return Err(violated(format!(
                    "beta * (1 - epsilon) < 1 (got {})",
                    beta * (1.0 - epsilon)
                )));
            }
        }
        FactoryKind::Linear { epsilon } => {
            check_epsilon(epsilon)?;
            check_margin(epsilon)?;
        }
        FactoryKind::SmallR { m_bound } => {
            if !(m_bound > 0.0 && m_bound < 0.5) {
                return Err(violated(format!("M ∈ (0, 1/2) (got M = {m_bound})")));
            }
            if r > m_bound + MARGIN_TOLERANCE {
                return Err(violated(format!("r <= M (r = {r}, M = {m_bound})")));
            }
        }
    }
    Ok(r)
}

/// `1 + x + ... + x^j` for `x >= 0`.
///
/// Summed directly for `j <= 64`; otherwise `expm1((j+1) ln x) / (x - 1)`,
/// which stays accurate as `x -> 1`.
pub fn geometric_sum(x: f64, j: u64) -> f64 {
    if j <= 64 {
        let mut sum = 1.0;
        let mut term = 1.0;
        for _ in 0..j {
            term *= x;
            sum += term;
        }
        return sum;
    }
    if x == 1.0 {
        return (j + 1) as f64;
    }
    if x == 0.0 {
        return 1.0;
    }
    let d = x - 1.0;
    ((j + 1) as f64 * d.ln_1p()).exp_m1() / d
}

/// Head probability of `kind` run on these constants and biases.
pub fn exact_output_mean(
    kind: &FactoryKind,
    constants: &[f64],
    biases: &[f64],
) -> Result<f64, OracleError> {
    let r = validate(kind, constants, biases)?;
    let mean = match *kind {
        FactoryKind::Logistic => r / (1.0 + r),
        FactoryKind::WalkToZero { m } => r * geometric_sum(r, m - 2) / geometric_sum(r, m - 1),
        FactoryKind::HighPower { m, beta } => {
            let x = beta * r;
            if m == 0 {
                1.0
            } else {
                x.powf(m as f64) / geometric_sum(x, m)
            }
        }
        FactoryKind::Residual { m, beta, .. } => {
            let x = beta * r;
            (m - 1) as f64 * x.powf((m - 1) as f64) / geometric_sum(x, m - 2)
        }
        FactoryKind::Linear { .. } | FactoryKind::SmallR { .. } => r,
    };
    Ok(mean)
}

/// Expected input flips of `kind`: exact for the logistic factory, an upper
/// bound otherwise.
pub fn expected_flip_bound(
    kind: &FactoryKind,
    constants: &[f64],
    biases: &[f64],
) -> Result<FlipBound, OracleError> {
    let r = validate(kind, constants, biases)?;
    let c: f64 = constants.iter().sum();
    let upper = |value| FlipBound {
        value,
        exact: false,
    };
    let bound = match *kind {
        FactoryKind::Logistic => FlipBound {
            value: c / (1.0 + r),
            exact: true,
        },
        FactoryKind::WalkToZero { m } => upper(c * (m - 1) as f64),
        FactoryKind::HighPower { beta, .. } => upper(beta * c / (1.0 - beta * r)),
        FactoryKind::Residual { epsilon, beta, .. } => {
            // Rounds are geometric with continuation chance <= beta r; each
            // costs one nested linear call plus, on heads, a high-power call.
            let x = beta * r;
            let nested_epsilon = 1.0 - (1.0 - epsilon) * beta;
            let per_round =
                LINEAR_COST_CONSTANT * beta * c / nested_epsilon + x * beta * c / (1.0 - x);
            upper(per_round / (1.0 - x))
        }
        FactoryKind::Linear { epsilon } => upper(LINEAR_COST_CONSTANT * c / epsilon),
        FactoryKind::SmallR { m_bound } => {
            let slack = 1.0 - 2.0 * m_bound;
            upper(c / (slack * (1.0 + r)) + r * SMALL_R_COST_CONSTANT * c / (slack + r))
        }
    };
    Ok(bound)
}

/// `(m, beta)` the linear factory derives from `epsilon`.
pub fn linear_walk_parameters(epsilon: f64) -> Result<(u64, f64), OracleError> {
    linear_parameters(epsilon).map_err(|e| violated(e.to_string()))
}

fn check_walk(m: u64, up: f64, start: u64) -> Result<(), OracleError> {
    if m < 1 {
        return Err(OracleError::InvalidInput("m must be >= 1".into()));
    }
    if !(up > 0.0 && up < 1.0) {
        return Err(OracleError::InvalidInput(format!(
            "up probability {up} is not in (0, 1)"
        )));
    }
    if start > m {
        return Err(OracleError::InvalidInput(format!(
            "start {start} is outside [0, {m}]"
        )));
    }
    Ok(())
}

/// Chance a nearest-neighbour walk on `{0..m}` that steps up with probability
/// `up` reaches `m` before 0, from the closed form. Rejects `up = 1/2`.
pub fn absorption_probability_closed_form(m: u64, up: f64, start: u64) -> Result<f64, OracleError> {
    check_walk(m, up, start)?;
    if up == 0.5 {
        return Err(OracleError::InvalidInput(
            "closed form is singular at up = 1/2".into(),
        ));
    }
    let ratio = (1.0 - up) / up;
    let (m_f, s_f) = (m as f64, start as f64);
    Ok(if ratio < 1.0 {
        (1.0 - ratio.powf(s_f)) / (1.0 - ratio.powf(m_f))
    } else {
        // Rewrite in powers of 1/ratio < 1 to avoid overflow.
        let inv = 1.0 / ratio;
        (inv.powf(m_f - s_f) - inv.powf(m_f)) / (1.0 - inv.powf(m_f))
    })
}

/// Solves the tridiagonal system `x_i = rhs_i + up x_{i+1} + down x_{i-1}`
/// for interior states `1..m-1` with given boundary values.
fn solve_first_step(m: u64, up: f64, rhs: f64, at_zero: f64, at_m: f64) -> Vec<f64> {
    let n = (m - 1) as usize;
    let down = 1.0 - up;
    let mut solution = vec![0.0; m as usize + 1];
    solution[0] = at_zero;
    solution[m as usize] = at_m;
    if n == 0 {
        return solution;
    }
    // Row i (0-based interior index): -down x_{i-1} + x_i - up x_{i+1} = d_i
    let mut c_prime = vec![0.0; n];
    let mut d_prime = vec![0.0; n];
    for i in 0..n {
        let mut d = rhs;
        if i == 0 {
            d += down * at_zero;
        }
        if i == n - 1 {
            d += up * at_m;
        }
        let (prev_c, prev_d) = if i == 0 {
            (0.0, 0.0)
        } else {
            (c_prime[i - 1], d_prime[i - 1])
        };
        let denom = 1.0 + down * prev_c;
        c_prime[i] = if i + 1 < n { -up / denom } else { 0.0 };
        d_prime[i] = (d + down * prev_d) / denom;
    }
    let mut next = d_prime[n - 1];
    solution[n] = next;
    for i in (0..n - 1).rev() {
        next = d_prime[i] - c_prime[i] * next;
        solution[i + 1] = next;
    }
    solution
}

/// Same quantity as [`absorption_probability_closed_form`] via the linear
/// solve; accepts `up = 1/2`.
pub fn absorption_probability_by_elimination(
    m: u64,
    up: f64,
    start: u64,
) -> Result<f64, OracleError> {
    check_walk(m, up, start)?;
    Ok(solve_first_step(m, up, 0.0, 0.0, 1.0)[start as usize])
}

/// Hitting probability of `m` before 0, from the linear solve, cross-checked
/// against the closed form to 1e-10 whenever `up` is not within 1e-6 of 1/2.
pub fn absorption_probability(m: u64, up: f64, start: u64) -> Result<f64, OracleError> {
    let solved = absorption_probability_by_elimination(m, up, start)?;
    if (up - 0.5).abs() > 1e-6 {
        let closed = absorption_probability_closed_form(m, up, start)?;
        if (closed - solved).abs() > 1e-10 {
            return Err(OracleError::RouteDisagreement { closed, solved });
        }
    }
    Ok(solved)
}

/// Expected steps to absorption, `X0/(q-p) - m/(q-p) * P(hit m)`.
pub fn expected_absorption_time(m: u64, up: f64, start: u64) -> Result<f64, OracleError> {
    check_walk(m, up, start)?;
    if up == 0.5 {
        return Err(OracleError::InvalidInput(
            "expected time formula is singular at up = 1/2".into(),
        ));
    }
    let drift = (1.0 - up) - up;
    let hit = absorption_probability_closed_form(m, up, start)?;
    Ok(start as f64 / drift - m as f64 / drift * hit)
}

/// Expected steps to absorption via the linear solve.
pub fn expected_absorption_time_by_elimination(
    m: u64,
    up: f64,
    start: u64,
) -> Result<f64, OracleError> {
    check_walk(m, up, start)?;
    Ok(solve_first_step(m, up, 1.0, 0.0, 0.0)[start as usize])
}

/// `C(1 - p)/(1 - Cp)`: the number of raw p-coin flips carrying the same
/// information about `p` as one Cp-coin flip.
pub fn equivalent_flip_lower_bound(c: f64, p: f64) -> Result<f64, OracleError> {
    if !(c.is_finite() && c > 0.0) {
        return Err(OracleError::InvalidInput(format!("C = {c} must be > 0")));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(OracleError::InvalidInput(format!("p = {p} must be in [0, 1)")));
    }
    if c * p >= 1.0 {
        return Err(violated(format!("C p < 1 (C p = {})", c * p)));
    }
    Ok(c * (1.0 - p) / (1.0 - c * p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn geometric_sum_routes_agree() {
        for &x in &[0.0f64, 0.3, 0.9, 0.999_999, 1.0, 1.2] {
            for &j in &[0u64, 1, 5, 64] {
                let direct: f64 = (0..=j).map(|i| x.powi(i as i32)).sum();
                assert!(close(geometric_sum(x, j), direct, 1e-12 * direct));
            }
        }
        // j > 64 path against long summation
        for &x in &[0.5f64, 0.99, 0.999_999] {
            let j = 200;
            let direct: f64 = (0..=j).map(|i| x.powi(i as i32)).sum();
            assert!(close(geometric_sum(x, j), direct, 1e-10 * direct));
        }
    }

    #[test]
    fn logistic_mean_and_cost() {
        let kind = FactoryKind::Logistic;
        assert_eq!(exact_output_mean(&kind, &[1.0, 2.0], &[0.5, 0.25]).unwrap(), 0.5);
        let b = expected_flip_bound(&kind, &[3.0], &[1.0 / 3.0]).unwrap();
        assert!(close(b.value, 1.5, 1e-15) && b.exact);
    }

    #[test]
    fn walk_mean_three_sevenths() {
        let kind = FactoryKind::WalkToZero { m: 3 };
        let mean = exact_output_mean(&kind, &[1.0], &[0.5]).unwrap();
        assert!(close(mean, 3.0 / 7.0, 1e-15));
        let solved = 1.0 - absorption_probability(3, 1.0 / 1.5, 1).unwrap();
        assert!(close(mean, solved, 1e-12));
        let b = expected_flip_bound(&FactoryKind::WalkToZero { m: 10 }, &[1.0], &[0.3]).unwrap();
        assert_eq!(b, FlipBound { value: 9.0, exact: false });
    }

    #[test]
    fn high_power_and_residual_means() {
        let hp = |m| FactoryKind::HighPower { m, beta: 2.0 };
        assert_eq!(exact_output_mean(&hp(0), &[1.0], &[0.25]).unwrap(), 1.0);
        assert!(close(exact_output_mean(&hp(1), &[1.0], &[0.25]).unwrap(), 1.0 / 3.0, 1e-15));
        assert!(close(exact_output_mean(&hp(2), &[1.0], &[0.25]).unwrap(), 1.0 / 7.0, 1e-15));

        let res = |m| FactoryKind::Residual { epsilon: 0.5, m, beta: 1.25 };
        assert!(close(exact_output_mean(&res(2), &[1.0], &[0.4]).unwrap(), 0.5, 1e-15));
        assert!(close(exact_output_mean(&res(3), &[1.0], &[0.4]).unwrap(), 1.0 / 3.0, 1e-15));
        assert!(close(exact_output_mean(&res(4), &[1.0], &[0.4]).unwrap(), 3.0 / 14.0, 1e-15));
    }

    #[test]
    fn linear_and_small_r_mean_is_r() {
        let r = exact_output_mean(&FactoryKind::Linear { epsilon: 0.2 }, &[1.0, 2.0, 0.5], &[0.2, 0.1, 0.6])
            .unwrap();
        assert!(close(r, 0.2 + 0.2 + 0.3, 1e-15));
        let b = expected_flip_bound(&FactoryKind::SmallR { m_bound: 0.01 }, &[1.0], &[0.005]).unwrap();
        assert!(close(b.value, 1.0 / (0.98 * 1.005) + 0.005 * 15.2 / 0.985, 1e-12));
        assert!(close(b.value, 1.0925, 5e-4), "{}", b.value);
    }

    #[test]
    fn preconditions_name_the_inequality() {
        let err = |k: FactoryKind, c: &[f64], p: &[f64]| exact_output_mean(&k, c, p).unwrap_err().to_string();
        assert!(err(FactoryKind::Linear { epsilon: 0.5 }, &[2.0], &[0.3]).contains("r <= 1 - epsilon"));
        assert!(err(FactoryKind::Linear { epsilon: 1.0 }, &[2.0], &[0.1]).contains("epsilon ∈ (0, 1)"));
        assert!(err(FactoryKind::SmallR { m_bound: 0.6 }, &[1.0], &[0.1]).contains("M ∈ (0, 1/2)"));
        assert!(err(FactoryKind::SmallR { m_bound: 0.1 }, &[1.0], &[0.2]).contains("r <= M"));
        assert!(err(FactoryKind::HighPower { m: 2, beta: 2.0 }, &[1.0], &[0.5]).contains("beta * r < 1"));
        assert!(err(FactoryKind::WalkToZero { m: 3 }, &[2.0], &[0.5]).contains("r < 1"));
        assert!(err(FactoryKind::WalkToZero { m: 1 }, &[1.0], &[0.5]).contains("m >= 2"));
        assert!(err(FactoryKind::Logistic, &[1.0], &[0.5, 0.5]).contains("biases"));
        assert!(err(FactoryKind::Logistic, &[0.0], &[0.5]).contains("constant"));
        assert!(err(FactoryKind::Logistic, &[1.0], &[1.5]).contains("bias"));
    }

    #[test]
    fn absorption_examples() {
        assert_eq!(absorption_probability(5, 0.3, 0).unwrap(), 0.0);
        assert_eq!(absorption_probability(5, 0.3, 5).unwrap(), 1.0);
        assert!(close(absorption_probability(3, 2.0 / 3.0, 1).unwrap(), 4.0 / 7.0, 1e-12));
        assert!(close(absorption_probability(2, 1.0 / 3.0, 1).unwrap(), 1.0 / 3.0, 1e-12));
        assert!(close(absorption_probability(4, 0.5, 1).unwrap(), 0.25, 1e-12));
        assert!(absorption_probability(3, 0.4, 4).is_err());
        assert!(absorption_probability_closed_form(3, 0.5, 1).is_err());
    }

    #[test]
    fn absorption_time_examples() {
        assert!(close(expected_absorption_time(2, 1.0 / 3.0, 1).unwrap(), 1.0, 1e-12));
        assert!(close(expected_absorption_time_by_elimination(2, 1.0 / 3.0, 1).unwrap(), 1.0, 1e-12));
        // walk A at r = 1/2, m = 3 steps up with chance 1/(1 + r)
        let t = expected_absorption_time(3, 2.0 / 3.0, 1).unwrap();
        assert!(close(t, 15.0 / 7.0, 1e-12));
        assert!(t <= 2.0 * 1.5 / 0.5);
        assert!(expected_absorption_time(3, 0.5, 1).is_err());
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(equivalent_flip_lower_bound(1.0, 0.3).unwrap(), 1.0);
        assert!(close(equivalent_flip_lower_bound(2.0, 0.25).unwrap(), 3.0, 1e-15));
        assert_eq!(equivalent_flip_lower_bound(4.0, 0.0).unwrap(), 4.0);
        assert!(equivalent_flip_lower_bound(2.0, 0.5).is_err());
    }

    #[test]
    fn kind_round_trips_through_json() {
        let kind = FactoryKind::Residual { epsilon: 0.5, m: 3, beta: 1.25 };
        let text = serde_json::to_string(&kind).unwrap();
        assert!(text.contains("\"factory\":\"residual\""));
        assert_eq!(serde_json::from_str::<FactoryKind>(&text).unwrap(), kind);
    }
}

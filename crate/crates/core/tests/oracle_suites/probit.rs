use crashpbo::gp::{probit_preference_probability, NoiseConfig};

use super::Outcome;

const FIXTURE: &str = include_str!("../fixtures/probit_mpmath.csv");
pub const TOLERANCE: f64 = 1e-10;

/// Rows of `(f_a, f_b, sigma, p)` with `p` computed at 40 digits.
pub fn fixture_rows() -> Vec<[f64; 4]> {
    FIXTURE
        .lines()
        .skip(1)
        .filter(|l| !l.is_empty())
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|s| s.parse().expect("fixture value")).collect();
            [v[0], v[1], v[2], v[3]]
        })
        .collect()
}

pub fn run() -> Outcome {
    let rows = fixture_rows();
    let mut worst = 0.0f64;
    for [f_a, f_b, sigma, p] in &rows {
        let got = match probit_preference_probability(*f_a, *f_b, &NoiseConfig { sigma: *sigma }) {
            Ok(v) => v,
            Err(e) => return Outcome::fail(format!("probit failed: {e}")),
        };
        worst = worst.max((got - p).abs());
    }
    Outcome::new(
        rows.len() == 1000 && worst < TOLERANCE,
        format!("{} inputs, max abs error {worst:.2e} (limit {TOLERANCE:.0e})", rows.len()),
    )
}

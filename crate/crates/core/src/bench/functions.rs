//! Standard test functions, oriented for maximization and evaluated on the
//! unit cube by an affine map to each function's native domain.

use std::f64::consts::{E, PI};

/// Native-domain bounds `(low, high)` per coordinate.
pub fn native_bounds(name: &str, dim: usize) -> Vec<(f64, f64)> {
    match name {
        "branin" => vec![(-5.0, 10.0), (0.0, 15.0)],
        "ackley" => vec![(-32.768, 32.768); dim],
        "hartmann6" => vec![(0.0, 1.0); 6],
        "cosine8" => vec![(-1.0, 1.0); 8],
        _ => vec![(0.0, 1.0); dim],
    }
}

pub fn to_native(x: &[f64], bounds: &[(f64, f64)]) -> Vec<f64> {
    x.iter().zip(bounds).map(|(&u, &(lo, hi))| lo + u * (hi - lo)).collect()
}

pub fn to_unit(z: &[f64], bounds: &[(f64, f64)]) -> Vec<f64> {
    z.iter().zip(bounds).map(|(&v, &(lo, hi))| (v - lo) / (hi - lo)).collect()
}

/// Negated Branin on `[-5, 10] × [0, 15]`; maximum −0.397887.
pub fn branin(z: &[f64]) -> f64 {
    let (x1, x2) = (z[0], z[1]);
    let b = 5.1 / (4.0 * PI * PI);
    let c = 5.0 / PI;
    let t = 1.0 / (8.0 * PI);
    let q = x2 - b * x1 * x1 + c * x1 - 6.0;
    -(q * q + 10.0 * (1.0 - t) * x1.cos() + 10.0)
}

/// Negated Ackley (a = 20, b = 0.2, c = 2π); maximum 0 at the origin.
pub fn ackley(z: &[f64]) -> f64 {
    let n = z.len() as f64;
    let sq = z.iter().map(|v| v * v).sum::<f64>() / n;
    let cs = z.iter().map(|v| (2.0 * PI * v).cos()).sum::<f64>() / n;
    -(-20.0 * (-0.2 * sq.sqrt()).exp() - cs.exp() + 20.0 + E)
}

const H6_ALPHA: [f64; 4] = [1.0, 1.2, 3.0, 3.2];
const H6_A: [[f64; 6]; 4] = [
    [10.0, 3.0, 17.0, 3.5, 1.7, 8.0],
    [0.05, 10.0, 17.0, 0.1, 8.0, 14.0],
    [3.0, 3.5, 1.7, 10.0, 17.0, 8.0],
    [17.0, 8.0, 0.05, 10.0, 0.1, 14.0],
];
const H6_P: [[f64; 6]; 4] = [
    [0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886],
    [0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991],
    [0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650],
    [0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381],
];

/// Negated Hartmann-6 on `[0, 1]^6`; maximum 3.32237.
pub fn hartmann6(z: &[f64]) -> f64 {
    (0..4)
        .map(|i| {
            let r: f64 = (0..6).map(|j| H6_A[i][j] * (z[j] - H6_P[i][j]).powi(2)).sum();
            H6_ALPHA[i] * (-r).exp()
        })
        .sum()
}

/// Cosine mixture `0.1 Σ cos(5π x_i) − Σ x_i²` on `[-1, 1]^8`; maximum 0.8 at the origin.
pub fn cosine8(z: &[f64]) -> f64 {
    z.iter().map(|&v| 0.1 * (5.0 * PI * v).cos() - v * v).sum()
}

//! Laplace mode against a brute-force grid maximization of the log posterior.

use crashpbo::gp::{fit_laplace, KernelConfig, NoiseConfig, JITTER};
use crashpbo::{ComparisonDataset, Duel, Preference};

use super::{phi_approx, Outcome};

pub const TOLERANCE: f64 = 1e-3;
const LENGTHSCALE: f64 = 0.3;

pub struct Instance {
    pub points: Vec<Vec<f64>>,
    /// `(a, b, pi)` by point index.
    pub duels: Vec<(usize, usize, Preference)>,
    pub sigma: f64,
}

fn pref(bit: usize) -> Preference {
    if bit == 0 {
        Preference::First
    } else {
        Preference::Second
    }
}

/// Every 2-point/1-duel and 3-point/2-duel configuration over a few point sets.
pub fn instances() -> Vec<Instance> {
    let pairs: [[Vec<f64>; 2]; 4] = [
        [vec![0.2], vec![0.5]],
        [vec![0.1], vec![0.9]],
        [vec![0.35], vec![0.55]],
        [vec![0.2, 0.7], vec![0.6, 0.4]],
    ];
    let triples: [[Vec<f64>; 3]; 2] =
        [[vec![0.1], vec![0.45], vec![0.8]], [vec![0.2, 0.2], vec![0.7, 0.3], vec![0.4, 0.8]]];
    let mut out = Vec::new();
    for sigma in [0.1, 0.5] {
        for p in &pairs {
            for bit in 0..2 {
                out.push(Instance { points: p.to_vec(), duels: vec![(0, 1, pref(bit))], sigma });
            }
        }
        for t in &triples {
            // The shared point appears in both duels; each duel has two orientations.
            for shared in 0..3 {
                let others: Vec<usize> = (0..3).filter(|&i| i != shared).collect();
                for bits in 0..4 {
                    out.push(Instance {
                        points: t.to_vec(),
                        duels: vec![
                            (shared, others[0], pref(bits & 1)),
                            (others[1], shared, pref(bits >> 1)),
                        ],
                        sigma,
                    });
                }
            }
        }
    }
    out
}

fn se(x: &[f64], y: &[f64]) -> f64 {
    let r2: f64 = x.iter().zip(y).map(|(a, b)| ((a - b) / LENGTHSCALE).powi(2)).sum();
    (-0.5 * r2).exp()
}

/// Gauss–Jordan inverse of a small SPD matrix.
fn invert(mut m: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut inv: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for c in 0..n {
        let p = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
        m.swap(c, p);
        inv.swap(c, p);
        let d = m[c][c];
        for j in 0..n {
            m[c][j] /= d;
            inv[c][j] /= d;
        }
        for r in 0..n {
            if r != c {
                let f = m[r][c];
                for j in 0..n {
                    m[r][j] -= f * m[c][j];
                    inv[r][j] -= f * inv[c][j];
                }
            }
        }
    }
    inv
}

fn log_posterior(inst: &Instance, prec: &[Vec<f64>], f: &[f64]) -> f64 {
    let scale = std::f64::consts::SQRT_2 * inst.sigma;
    let mut v = 0.0;
    for &(a, b, pi) in &inst.duels {
        let (w, l) = if pi == Preference::First { (a, b) } else { (b, a) };
        v += phi_approx((f[w] - f[l]) / scale).ln();
    }
    let mut quad = 0.0;
    for i in 0..f.len() {
        for j in 0..f.len() {
            quad += f[i] * prec[i][j] * f[j];
        }
    }
    v - 0.5 * quad
}

/// Grid search with zooming: scan a box, re-centre on the best node, and
/// shrink the step only when the best node is interior.
pub fn grid_mode(inst: &Instance) -> Vec<f64> {
    let n = inst.points.len();
    let jitter = JITTER;
    let k: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n).map(|j| se(&inst.points[i], &inst.points[j]) + if i == j { jitter } else { 0.0 }).collect()
        })
        .collect();
    let prec = invert(k);

    let mut centre = vec![0.0; n];
    let mut step = 0.1;
    let mut half = 50usize;
    while step > 1e-7 {
        let side = 2 * half + 1;
        let total = side.pow(n as u32);
        let mut best = (f64::NEG_INFINITY, vec![0usize; n]);
        let mut f = vec![0.0; n];
        for idx in 0..total {
            let mut r = idx;
            let mut node = vec![0usize; n];
            for (i, slot) in node.iter_mut().enumerate() {
                *slot = r % side;
                r /= side;
                f[i] = centre[i] + (*slot as f64 - half as f64) * step;
            }
            let v = log_posterior(inst, &prec, &f);
            if v > best.0 {
                best = (v, node);
            }
        }
        let on_edge = best.1.iter().any(|&s| s == 0 || s == side - 1);
        for (c, &s) in centre.iter_mut().zip(&best.1) {
            *c += (s as f64 - half as f64) * step;
        }
        if !on_edge {
            step /= 5.0;
            half = 10;
        }
    }
    centre
}

pub fn run() -> Outcome {
    let kernel = KernelConfig::isotropic(LENGTHSCALE, 1.0);
    let cases = instances();
    let mut worst = 0.0f64;
    for (c, inst) in cases.iter().enumerate() {
        let duels = inst
            .duels
            .iter()
            .map(|&(a, b, pi)| Duel::new(inst.points[a].clone(), inst.points[b].clone(), pi));
        let data = match ComparisonDataset::from_duels(duels) {
            Ok(d) => d,
            Err(e) => return Outcome::fail(format!("instance {c}: {e}")),
        };
        let post = match fit_laplace(&data, &kernel, &NoiseConfig { sigma: inst.sigma }) {
            Ok(p) => p,
            Err(e) => return Outcome::fail(format!("instance {c}: fit failed: {e}")),
        };
        let oracle = grid_mode(inst);
        for (i, x) in inst.points.iter().enumerate() {
            let got = post.map_utility_of(x).expect("training point");
            worst = worst.max((got - oracle[i]).abs());
        }
    }
    Outcome::new(
        worst < TOLERANCE,
        format!("{} instances, max coordinate error {worst:.2e} (limit {TOLERANCE:.0e})", cases.len()),
    )
}

//! Test problems with a median crash threshold and grid-based normalization.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::functions;
use super::sample_path::{GpSamplePath, SamplePathParams};
use super::sobol::sobol_points;
use crate::error::{check_dim, check_unit_point, Error, Result};
use crate::Point;

/// Declarative problem identifier, as written in benchmark configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemSpec {
    Branin,
    Ackley,
    Hartmann6,
    Cosine8,
    GpSample {
        dim: usize,
        seed: u64,
        #[serde(default = "default_lengthscale")]
        lengthscale: f64,
    },
}

fn default_lengthscale() -> f64 {
    0.3
}

impl ProblemSpec {
    pub fn name(&self) -> String {
        match self {
            ProblemSpec::Branin => "branin".into(),
            ProblemSpec::Ackley => "ackley".into(),
            ProblemSpec::Hartmann6 => "hartmann6".into(),
            ProblemSpec::Cosine8 => "cosine8".into(),
            ProblemSpec::GpSample { dim, seed, .. } => format!("gp_sample_d{dim}_s{seed}"),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ProblemSpec::Branin | ProblemSpec::Ackley => 2,
            ProblemSpec::Hartmann6 => 6,
            ProblemSpec::Cosine8 => 8,
            ProblemSpec::GpSample { dim, .. } => *dim,
        }
    }

    /// Known global maximum in maximization orientation, if any.
    pub fn known_maximum(&self) -> Option<f64> {
        match self {
            ProblemSpec::Branin => Some(-0.397_887_357_729_738_1),
            ProblemSpec::Ackley => Some(0.0),
            ProblemSpec::Hartmann6 => Some(3.32237),
            ProblemSpec::Cosine8 => Some(0.8),
            ProblemSpec::GpSample { .. } => None,
        }
    }

    pub fn objective(&self) -> Result<Objective> {
        Ok(match self {
            ProblemSpec::Branin => Objective::Named { name: "branin", f: functions::branin },
            ProblemSpec::Ackley => Objective::Named { name: "ackley", f: functions::ackley },
            ProblemSpec::Hartmann6 => Objective::Named { name: "hartmann6", f: functions::hartmann6 },
            ProblemSpec::Cosine8 => Objective::Named { name: "cosine8", f: functions::cosine8 },
            ProblemSpec::GpSample { dim, seed, lengthscale } => {
                let mut p = SamplePathParams::new(*dim, *seed);
                p.lengthscale = *lengthscale;
                Objective::SamplePath(Arc::new(GpSamplePath::new(p)?))
            }
        })
    }
}

/// A maximization objective on `[0, 1]^d`.
#[derive(Clone)]
pub enum Objective {
    Named { name: &'static str, f: fn(&[f64]) -> f64 },
    SamplePath(Arc<GpSamplePath>),
    Custom(ObjectiveFn),
}

pub type ObjectiveFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

impl fmt::Debug for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Objective::Named { name, .. } => write!(f, "Named({name})"),
            Objective::SamplePath(p) => write!(f, "SamplePath({:?})", p.params()),
            Objective::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl Objective {
    fn eval_unchecked(&self, x: &[f64], dim: usize) -> f64 {
        match self {
            Objective::Named { name, f } => f(&functions::to_native(x, &functions::native_bounds(name, dim))),
            Objective::SamplePath(p) => p.eval(x),
            Objective::Custom(f) => f(x),
        }
    }
}

/// Evaluation point set for thresholds and normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridConfig {
    /// Points per axis of the full grid for `d ≤ 2`.
    pub per_axis_low_dim: usize,
    /// Points per axis of the full grid for `d = 3`.
    pub per_axis_3d: usize,
    /// Sobol points for `d ≥ 4`.
    pub sobol_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { per_axis_low_dim: 100, per_axis_3d: 30, sobol_points: 1 << 15 }
    }
}

/// Full tensor grid with `per_axis` points per axis including both endpoints.
pub fn full_grid(d: usize, per_axis: usize) -> Vec<Point> {
    let axis: Vec<f64> = if per_axis == 1 {
        vec![0.5]
    } else {
        (0..per_axis).map(|i| i as f64 / (per_axis - 1) as f64).collect()
    };
    let total = per_axis.pow(d as u32);
    (0..total)
        .map(|mut k| {
            (0..d)
                .map(|_| {
                    let v = axis[k % per_axis];
                    k /= per_axis;
                    v
                })
                .collect()
        })
        .collect()
}

pub fn domain_points(d: usize, grid: &GridConfig) -> Result<Vec<Point>> {
    match d {
        0 => Err(Error::input("dimension must be at least 1")),
        1 | 2 => Ok(full_grid(d, grid.per_axis_low_dim.max(1))),
        3 => Ok(full_grid(d, grid.per_axis_3d.max(1))),
        _ => sobol_points(d, grid.sobol_points.max(1)),
    }
}

/// Median of the values (mean of the two middle values for even counts).
pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::input("median of an empty set"));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("objective produced a non-finite value".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Ok(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

/// Crash threshold: median objective value over the point set.
pub fn compute_threshold(f: impl Fn(&[f64]) -> f64 + Sync, points: &[Point]) -> Result<f64> {
    let values: Vec<f64> = points.par_iter().map(|x| f(x)).collect();
    median(&values)
}

#[derive(Debug, Clone)]
pub struct TestProblem {
    pub name: String,
    pub dim: usize,
    pub noise_sigma: f64,
    /// `S(x) = 1` iff `f(x) ≥ threshold`.
    pub threshold: f64,
    /// Normalization range: grid minimum and grid maximum (or the known
    /// optimum when larger).
    pub f_min: f64,
    pub f_max: f64,
    objective: Objective,
}

impl TestProblem {
    /// Builds a problem; threshold and normalization come from the domain point set.
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        objective: Objective,
        noise_sigma: f64,
        grid: &GridConfig,
        known_maximum: Option<f64>,
    ) -> Result<Self> {
        if noise_sigma.is_nan() || noise_sigma < 0.0 {
            return Err(Error::input("noise sigma must be non-negative"));
        }
        let points = domain_points(dim, grid)?;
        let values: Vec<f64> = points.par_iter().map(|x| objective.eval_unchecked(x, dim)).collect();
        let threshold = median(&values)?;
        let f_min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let grid_max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(TestProblem {
            name: name.into(),
            dim,
            noise_sigma,
            threshold,
            f_min,
            f_max: known_maximum.map_or(grid_max, |m| m.max(grid_max)),
            objective,
        })
    }

    pub fn from_spec(spec: &ProblemSpec, noise_sigma: f64, grid: &GridConfig) -> Result<Self> {
        TestProblem::new(spec.name(), spec.dim(), spec.objective()?, noise_sigma, grid, spec.known_maximum())
    }

    pub fn objective(&self) -> &Objective {
        &self.objective
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        check_unit_point(x)?;
        Ok(self.objective.eval_unchecked(x, self.dim))
    }

    pub fn is_satisfied(&self, x: &[f64]) -> Result<bool> {
        Ok(self.eval(x)? >= self.threshold)
    }

    /// Min–max normalized value, clipped to `[0, 1]`; 1 for a degenerate range.
    pub fn normalize(&self, value: f64) -> f64 {
        let range = self.f_max - self.f_min;
        if range.is_nan() || range <= 0.0 {
            return 1.0;
        }
        ((value - self.f_min) / range).clamp(0.0, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn custom(f: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Objective {
        Objective::Custom(Arc::new(f))
    }

    #[test]
    fn linear_threshold() {
        let pts = full_grid(1, 5);
        assert_eq!(pts, vec![vec![0.0], vec![0.25], vec![0.5], vec![0.75], vec![1.0]]);
        assert_eq!(compute_threshold(|x| x[0], &pts).unwrap(), 0.5);
    }

    #[test]
    fn constant_objective() {
        let grid = GridConfig { per_axis_low_dim: 7, ..GridConfig::default() };
        let p = TestProblem::new("flat", 2, custom(|_| 3.0), 0.1, &grid, None).unwrap();
        assert_eq!(p.threshold, 3.0);
        assert!(p.is_satisfied(&[0.2, 0.9]).unwrap());
        assert_eq!(p.normalize(3.0), 1.0);
    }

    #[test]
    fn grid_sizes() {
        let g = GridConfig::default();
        assert_eq!(domain_points(2, &g).unwrap().len(), 10_000);
        assert_eq!(domain_points(3, &g).unwrap().len(), 27_000);
        assert_eq!(domain_points(6, &GridConfig { sobol_points: 64, ..g }).unwrap().len(), 64);
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let p = TestProblem::from_spec(&ProblemSpec::Branin, 0.1, &GridConfig::default()).unwrap();
        assert!(matches!(p.eval(&[1.2, 0.0]), Err(Error::Input(_))));
        assert!(p.eval(&[0.5]).is_err());
    }

    #[test]
    fn named_problems_normalize_to_their_optimum() {
        let p = TestProblem::from_spec(&ProblemSpec::Branin, 0.1, &GridConfig::default()).unwrap();
        let x = [(std::f64::consts::PI + 5.0) / 15.0, 2.275 / 15.0];
        assert!((p.normalize(p.eval(&x).unwrap()) - 1.0).abs() < 1e-6);
        let p = TestProblem::from_spec(&ProblemSpec::Ackley, 0.1, &GridConfig::default()).unwrap();
        assert_eq!(p.normalize(p.eval(&[0.5, 0.5]).unwrap()), 1.0);
    }
}

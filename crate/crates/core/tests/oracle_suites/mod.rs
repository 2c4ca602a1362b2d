//! Oracle checks shared by the core integration tests and the acceptance
//! report. Each suite returns an [`Outcome`] instead of panicking so the
//! acceptance target can print every result.

#![allow(dead_code)]

pub mod eubo_mc;
pub mod gradient;
pub mod laplace_grid;
pub mod probit;
pub mod replay;
pub mod separation;
pub mod virtual_traces;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }

    pub fn fail(detail: impl Into<String>) -> Self {
        Outcome::new(false, detail)
    }
}

/// Standard normal CDF from a rational erfc approximation (fractional error
/// below 1.2e-7), independent of the library's implementation.
pub fn phi_approx(z: f64) -> f64 {
    0.5 * erfc_approx(-z / std::f64::consts::SQRT_2)
}

pub fn erfc_approx(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let poly = -z * z - 1.265_512_23
        + t * (1.000_023_68
            + t * (0.374_091_96
                + t * (0.096_784_18
                    + t * (-0.186_288_06
                        + t * (0.278_868_07
                            + t * (-1.135_203_98
                                + t * (1.488_515_87 + t * (-0.822_152_23 + t * 0.170_872_77))))))));
    let ans = t * poly.exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

//! Standard normal density, distribution and the tail-stable quantities the
//! probit likelihood needs.

use libm::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Below this argument the asymptotic tail series replaces `erfc`.
const TAIL_CUTOFF: f64 = -30.0;

pub fn pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

pub fn cdf(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

// 1 - 1/z^2 + 3/z^4 - 15/z^6 + 105/z^8: Mills-ratio series Phi(z) * (-z) / phi(z).
fn tail_series(z: f64) -> f64 {
    let w = 1.0 / (z * z);
    1.0 - w * (1.0 - w * (3.0 - w * (15.0 - 105.0 * w)))
}

pub fn log_cdf(z: f64) -> f64 {
    if z > TAIL_CUTOFF {
        cdf(z).ln()
    } else {
        -0.5 * z * z - LN_SQRT_2PI - (-z).ln() + tail_series(z).ln()
    }
}

/// `phi(z) / Phi(z)`, the derivative of `log_cdf`.
pub fn inverse_mills(z: f64) -> f64 {
    if z > TAIL_CUTOFF {
        pdf(z) / cdf(z)
    } else {
        -z / tail_series(z)
    }
}

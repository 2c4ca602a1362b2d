//! Unscrambled Sobol sequence (Joe–Kuo direction numbers, Gray-code order).

use crate::error::{Error, Result};
use crate::Point;

const BITS: usize = 32;

/// `(s, a, m_1..m_s)` for dimensions 2..=10; dimension 1 is van der Corput.
const DIRECTIONS: [(u32, u32, &[u32]); 9] = [
    (1, 0, &[1]),
    (2, 1, &[1, 3]),
    (3, 1, &[1, 3, 1]),
    (3, 2, &[1, 1, 1]),
    (4, 1, &[1, 1, 3, 3]),
    (4, 4, &[1, 3, 5, 13]),
    (5, 2, &[1, 1, 5, 5, 17]),
    (5, 4, &[1, 1, 5, 5, 5]),
    (5, 7, &[1, 1, 7, 11, 19]),
];

pub const MAX_DIM: usize = DIRECTIONS.len() + 1;

fn direction_vector(dim: usize) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if dim == 0 {
        for (k, vk) in v.iter_mut().enumerate() {
            *vk = 1 << (BITS - 1 - k);
        }
        return v;
    }
    let (s, a, m) = DIRECTIONS[dim - 1];
    let s = s as usize;
    for k in 0..BITS {
        v[k] = if k < s {
            m[k] << (BITS - 1 - k)
        } else {
            let mut x = v[k - s] ^ (v[k - s] >> s);
            for i in 1..s {
                if (a >> (s - 1 - i)) & 1 == 1 {
                    x ^= v[k - i];
                }
            }
            x
        };
    }
    v
}

/// The first `n` points of the `d`-dimensional sequence, starting at the origin.
pub fn sobol_points(d: usize, n: usize) -> Result<Vec<Point>> {
    if d == 0 || d > MAX_DIM {
        return Err(Error::input(format!(
            "Sobol points are available for 1 to {MAX_DIM} dimensions, got {d}"
        )));
    }
    let directions: Vec<[u32; BITS]> = (0..d).map(direction_vector).collect();
    let scale = 1.0 / (1u64 << BITS) as f64;
    let mut state = vec![0u32; d];
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        out.push(state.iter().map(|&x| x as f64 * scale).collect());
        let c = (!i).trailing_zeros() as usize;
        for (x, v) in state.iter_mut().zip(&directions) {
            *x ^= v[c.min(BITS - 1)];
        }
    }
    Ok(out)
}

//! Radial heat polynomials: the terminating solutions of the single-branch
//! profile equation at even `α = 2m`. They give exact zero locations for
//! calibrating the shooters.

use crate::error::{Error, Result};
use crate::profile_ode::origin_series_coefficients;

/// Coefficients `[c_0, .., c_m]` in `y = s²`, normalized to `c_0 = 1`.
pub fn coefficients(m: usize, dimension: u32, lambda: f64) -> Vec<f64> {
    origin_series_coefficients(2.0 * m as f64, dimension, lambda, m + 1)
}

pub fn eval(m: usize, dimension: u32, lambda: f64, s: f64) -> f64 {
    let y = s * s;
    coefficients(m, dimension, lambda)
        .iter()
        .rev()
        .fold(0.0, |acc, c| acc * y + c)
}

/// Positive zeros in `s`, ascending, for degrees `2m` with `m ∈ {1, 2, 3}`,
/// from the closed-form roots of the polynomial in `y = s²`.
pub fn zeros(m: usize, dimension: u32, lambda: f64) -> Result<Vec<f64>> {
    let c = coefficients(m, dimension, lambda);
    let mut ys = match m {
        1 => vec![-c[0] / c[1]],
        2 => {
            let (a, b, cc) = (c[2], c[1], c[0]);
            let disc = (b * b - 4.0 * a * cc).sqrt();
            // Stable pairing of the two roots.
            let q = -0.5 * (b + b.signum() * disc);
            vec![q / a, cc / q]
        }
        3 => {
            // Monic y³ + p2 y² + p1 y + p0, trigonometric form (three real roots).
            let (p2, p1, p0) = (c[2] / c[3], c[1] / c[3], c[0] / c[3]);
            let q = (p2 * p2 - 3.0 * p1) / 9.0;
            let r = (2.0 * p2.powi(3) - 9.0 * p2 * p1 + 27.0 * p0) / 54.0;
            let theta = (r / q.powf(1.5)).clamp(-1.0, 1.0).acos();
            (0..3)
                .map(|j| {
                    -2.0 * q.sqrt() * ((theta + 2.0 * std::f64::consts::PI * j as f64) / 3.0).cos()
                        - p2 / 3.0
                })
                .collect()
        }
        _ => {
            return Err(Error::InvalidInput(format!(
                "closed-form zeros only for degrees 2, 4, 6 (got {})",
                2 * m
            )))
        }
    };
    ys.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(ys.into_iter().filter(|y| *y > 0.0).map(f64::sqrt).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_four_matches_monic_form() {
        // 1 - s² + s⁴/12 = (s⁴ - 12 s² + 12)/12 for N = 1.
        for s in [0.3, 1.0, 2.5] {
            let p = (s * s * s * s - 12.0 * s * s + 12.0) / 12.0;
            assert!((eval(2, 1, 1.0, s) - p).abs() < 1e-13);
        }
        let z = zeros(2, 1, 1.0).unwrap();
        assert!((z[0] - (6.0 - 2.0 * 6f64.sqrt()).sqrt()).abs() < 1e-14);
        assert!((z[1] - (6.0 + 2.0 * 6f64.sqrt()).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn zeros_are_roots() {
        for n in 1..=3 {
            for m in 1..=3 {
                for lambda in [1.0, 2.0] {
                    let z = zeros(m, n, lambda).unwrap();
                    assert_eq!(z.len(), m);
                    for s in z {
                        assert!(eval(m, n, lambda, s).abs() < 1e-10);
                    }
                }
            }
        }
        assert!(zeros(4, 1, 1.0).is_err());
    }
}

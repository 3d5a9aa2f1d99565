//! Finite-difference derivatives at the origin of the conjugate plane.
//!
//! Mixed partials `∂^nw_w ∂^nz_z f(0)` come from tensor products of the
//! minimal central stencils, whose error expansions contain only even powers
//! of the step. A Richardson table over steps `h_k = h · 2^{-k}` removes the
//! leading terms; like Ridders' scheme, every table entry carries an error
//! estimate and the entry with the smallest estimate is returned. Estimates
//! include a rounding bound that grows as `h^{-order}`, so the table never
//! settles on steps where the stencil is dominated by cancellation. The result
//! depends only on `f` and the configuration.

use crate::error::{Error, Result};
use crate::phasespace::PhasePoint;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Highest total derivative order supported.
pub const MAX_DERIVATIVE_ORDER: usize = 6;

/// Number of step halvings tried in the Richardson table.
const TABLE_ROWS: usize = 12;

/// Multiplier on the rounding bound; extrapolated entries amplify noise
/// by a further factor of about two.
const ROUNDOFF_SAFETY: f64 = 8.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DiffConfig {
    /// Largest (first) step of the table; later rows halve it.
    pub step: f64,
    /// Number of Richardson extrapolation columns.
    pub richardson_levels: usize,
}

impl Default for DiffConfig {
    fn default() -> Self {
        DiffConfig {
            step: 0.25,
            richardson_levels: 4,
        }
    }
}

impl DiffConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::invalid(format!("fd step must be positive, got {}", self.step)));
        }
        if self.richardson_levels < 1 {
            return Err(Error::invalid("richardson_levels must be at least 1"));
        }
        Ok(())
    }
}

/// Central stencil `(offset, weight)` for the k-th derivative with unit step.
fn stencil(k: usize) -> &'static [(i32, f64)] {
    match k {
        0 => &[(0, 1.0)],
        1 => &[(-1, -0.5), (1, 0.5)],
        2 => &[(-1, 1.0), (0, -2.0), (1, 1.0)],
        3 => &[(-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)],
        4 => &[(-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)],
        5 => &[(-3, -0.5), (-2, 2.0), (-1, -2.5), (1, 2.5), (2, -2.0), (3, 0.5)],
        6 => &[
            (-3, 1.0),
            (-2, -6.0),
            (-1, 15.0),
            (0, -20.0),
            (1, 15.0),
            (2, -6.0),
            (3, 1.0),
        ],
        _ => unreachable!("order checked by caller"),
    }
}

/// Stencil value and its rounding-noise bound.
fn stencil_estimate<F>(f: &F, nw: usize, nz: usize, h: f64) -> (Complex64, f64)
where
    F: Fn(PhasePoint) -> Complex64 + ?Sized,
{
    let mut acc = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for &(ow, cw) in stencil(nw) {
        for &(oz, cz) in stencil(nz) {
            let term = f(PhasePoint::new(ow as f64 * h, oz as f64 * h)) * (cw * cz);
            mag += term.norm();
            acc += term;
        }
    }
    let scale = h.powi((nw + nz) as i32);
    (acc / scale, ROUNDOFF_SAFETY * f64::EPSILON * mag / scale)
}

/// Mixed partial `∂^nw_w ∂^nz_z f` at `w = z = 0`.
pub fn derivative_at_origin<F>(f: &F, nw: usize, nz: usize, cfg: &DiffConfig) -> Result<Complex64>
where
    F: Fn(PhasePoint) -> Complex64 + ?Sized,
{
    Ok(derivative_with_error(f, nw, nz, cfg)?.0)
}

/// Same as [`derivative_at_origin`], also returning the table's error estimate.
pub fn derivative_with_error<F>(f: &F, nw: usize, nz: usize, cfg: &DiffConfig) -> Result<(Complex64, f64)>
where
    F: Fn(PhasePoint) -> Complex64 + ?Sized,
{
    let order = nw + nz;
    if order > MAX_DERIVATIVE_ORDER {
        return Err(Error::Capacity {
            what: "derivative order",
            requested: order,
            limit: MAX_DERIVATIVE_ORDER,
        });
    }
    cfg.validate()?;
    if order == 0 {
        return Ok((f(PhasePoint::origin()), 0.0));
    }

    let cols = cfg.richardson_levels + 1;
    let mut prev: Vec<Complex64> = Vec::with_capacity(cols);
    let mut best = (Complex64::new(0.0, 0.0), f64::INFINITY);
    let mut h = cfg.step;
    for row in 0..TABLE_ROWS {
        let mut cur = Vec::with_capacity(cols);
        let (value, noise) = stencil_estimate(f, nw, nz, h);
        cur.push(value);
        if row == 0 {
            // a single stencil value has no estimate of its own yet
            best = (cur[0], f64::INFINITY);
        }
        let mut factor = 1.0;
        for j in 1..cols.min(row + 1) {
            factor *= 4.0;
            let t = (cur[j - 1] * factor - prev[j - 1]) / (factor - 1.0);
            // without the noise term, rows of pure rounding can agree exactly
            let err = (t - cur[j - 1]).norm().max((t - prev[j - 1]).norm()) + 2.0 * noise;
            if err < best.1 {
                best = (t, err);
            }
            cur.push(t);
        }
        prev = cur;
        h *= 0.5;
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gauss(p: PhasePoint) -> Complex64 {
        Complex64::new((-(p.w * p.w + p.z * p.z) / 2.0).exp(), 0.0)
    }

    #[test]
    fn gaussian_second_derivative() {
        let d = derivative_at_origin(&gauss, 0, 2, &DiffConfig::default()).unwrap();
        assert!((d.re + 1.0).abs() < 1e-8, "{d}");
    }

    #[test]
    fn gaussian_fourth_and_mixed() {
        let cfg = DiffConfig::default();
        let d4 = derivative_at_origin(&gauss, 4, 0, &cfg).unwrap();
        assert!((d4.re - 3.0).abs() < 1e-7, "{d4}");
        let d22 = derivative_at_origin(&gauss, 2, 2, &cfg).unwrap();
        assert!((d22.re - 1.0).abs() < 1e-7, "{d22}");
    }

    #[test]
    fn odd_orders_of_even_functions_vanish() {
        let cfg = DiffConfig::default();
        for (a, b) in [(1, 0), (0, 1), (3, 0), (2, 1), (1, 2), (0, 5)] {
            let d = derivative_at_origin(&gauss, a, b, &cfg).unwrap();
            assert!(d.norm() <= 1e-10, "({a},{b}) -> {d}");
        }
    }

    #[test]
    fn order_above_six_is_rejected() {
        let err = derivative_at_origin(&gauss, 4, 3, &DiffConfig::default()).unwrap_err();
        assert!(matches!(err, Error::Capacity { requested: 7, .. }));
    }

    #[test]
    fn oscillating_function() {
        // e^{2iβz} e^{-z²/2}: ∂_z = 2iβ at the origin
        let beta = 2.12928;
        let f = |p: PhasePoint| Complex64::new(0.0, 2.0 * beta * p.z).exp() * (-(p.z * p.z) / 2.0).exp();
        let d = derivative_at_origin(&f, 0, 1, &DiffConfig::default()).unwrap();
        assert!((d - Complex64::new(0.0, 2.0 * beta)).norm() < 1e-9, "{d}");
    }

    #[test]
    fn fourth_derivative_avoids_rounding_plateau() {
        // stencils at tiny steps agree to the bit; the estimate must not trust them
        let c = 1.2130613194252668;
        let f = |p: PhasePoint| Complex64::new((-c * (p.w * p.w + p.z * p.z) / 2.0).exp(), 0.0);
        let d = derivative_at_origin(&f, 0, 4, &DiffConfig::default()).unwrap();
        assert!((d.re - 3.0 * c * c).abs() < 1e-6, "{d}");
    }
}

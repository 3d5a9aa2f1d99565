//! Polar product quadrature over the conjugate plane.
//!
//! Radially, composite Gauss–Legendre panels of at most 16 points cover
//! `[0, R]`. The estimate with `radial_nodes` nodes is accepted when the one
//! with half as many agrees to `target_abs_tol`; otherwise the count doubles.
//! At each radius the angular integral uses the periodic trapezoid rule,
//! refined by doubling until it stops changing. Integrands
//! whose angular structure sharpens with radius (squeezed states) thus get
//! more angular nodes only where they need them.

use crate::error::{Error, Result};
use crate::phasespace::PhasePoint;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

const PANEL: usize = 16;
const MAX_RADIAL_DOUBLINGS: usize = 5;
const MAX_ANGULAR_NODES: usize = 1 << 16;
const PROBE_RAYS: usize = 8;
const PROBE_STEP: f64 = 0.25;
const PROBE_MAX_RADIUS: f64 = 64.0;
const NEGLIGIBLE: f64 = 1e-16;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cutoff {
    Auto,
    Radius(f64),
}

impl Serialize for Cutoff {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cutoff::Auto => s.serialize_str("auto"),
            Cutoff::Radius(r) => s.serialize_f64(*r),
        }
    }
}

impl<'de> Deserialize<'de> for Cutoff {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Word(String),
            Radius(f64),
        }
        match Repr::deserialize(d)? {
            Repr::Word(w) if w == "auto" => Ok(Cutoff::Auto),
            Repr::Word(w) => Err(serde::de::Error::custom(format!(
                "cutoff_radius must be \"auto\" or a number, got {w:?}"
            ))),
            Repr::Radius(r) => Ok(Cutoff::Radius(r)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureConfig {
    pub radial_nodes: usize,
    /// Starting angular node count; refined per radius.
    pub angular_nodes: usize,
    pub cutoff_radius: Cutoff,
    pub target_abs_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            radial_nodes: 96,
            angular_nodes: 128,
            cutoff_radius: Cutoff::Auto,
            target_abs_tol: 1e-9,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.radial_nodes < 8 || self.angular_nodes < 8 {
            return Err(Error::invalid(format!(
                "quadrature needs at least 8 nodes (radial {}, angular {})",
                self.radial_nodes, self.angular_nodes
            )));
        }
        if !(self.target_abs_tol > 0.0) {
            return Err(Error::invalid("target_abs_tol must be positive"));
        }
        if let Cutoff::Radius(r) = self.cutoff_radius {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::invalid(format!("cutoff radius must be positive, got {r}")));
            }
        }
        Ok(())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, cached per size.
pub fn gauss_legendre(n: usize) -> Arc<(Vec<f64>, Vec<f64>)> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<(Vec<f64>, Vec<f64>)>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(compute_gauss_legendre(n)))
        .clone()
}

fn compute_gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut t = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            // P_n(t) and P_n'(t) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, t);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * t * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { t } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (t * pn - pm) / (t * t - 1.0);
            let dt = pn / dp;
            t -= dt;
            if dt.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        let wi = 2.0 / ((1.0 - t * t) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Radial nodes `ρ_i` and weights `ρ_i · ω_i` for `∫_0^R ρ g(ρ) dρ`.
fn radial_rule(radius: f64, total: usize) -> (Vec<f64>, Vec<f64>) {
    let per = total.min(PANEL);
    let panels = total.div_ceil(PANEL).max(1);
    let gl = gauss_legendre(per);
    let h = radius / panels as f64;
    let mut nodes = Vec::with_capacity(per * panels);
    let mut weights = Vec::with_capacity(per * panels);
    for k in 0..panels {
        let a = k as f64 * h;
        for (x, w) in gl.0.iter().zip(gl.1.iter()) {
            let rho = a + 0.5 * h * (x + 1.0);
            nodes.push(rho);
            weights.push(0.5 * h * w * rho);
        }
    }
    (nodes, weights)
}

/// Mean of `f` over the circle of radius `rho`, refined until stable.
fn angular_mean<F>(f: &F, rho: f64, start: usize, abs_tol: f64) -> Complex64
where
    F: Fn(PhasePoint) -> Complex64 + ?Sized,
{
    if rho == 0.0 {
        return f(PhasePoint::origin());
    }
    let mut m = start;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut mag = 0.0;
    for k in 0..m {
        let v = f(PhasePoint::from_polar(rho, 2.0 * PI * k as f64 / m as f64));
        sum += v;
        mag += v.norm();
    }
    let mut mean = sum / m as f64;
    while m < MAX_ANGULAR_NODES {
        let mut odd = Complex64::new(0.0, 0.0);
        for k in 0..m {
            let v = f(PhasePoint::from_polar(rho, PI * (2 * k + 1) as f64 / m as f64));
            odd += v;
            mag += v.norm();
        }
        sum += odd;
        m *= 2;
        let refined = sum / m as f64;
        let change = (refined - mean).norm();
        mean = refined;
        if change <= abs_tol || change <= 1e-13 * (mag / m as f64) {
            break;
        }
    }
    mean
}

/// Largest magnitude of `f` over the probe rays at radius `rho`.
fn ray_max<F>(f: &F, rho: f64) -> Result<f64>
where
    F: Fn(PhasePoint) -> Complex64 + ?Sized,
{
    let mut m: f64 = 0.0;
    for k in 0..PROBE_RAYS {
        let v = f(PhasePoint::from_polar(rho, 2.0 * PI * k as f64 / PROBE_RAYS as f64));
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::invalid(format!("integrand not finite at radius {rho}")));
        }
        m = m.max(v.norm());
    }
    Ok(m)
}

/// Choose the integration radius and estimate the truncated tail.
fn cutoff_and_tail<M>(magnitude: &M, cfg: &QuadratureConfig) -> Result<(f64, f64)>
where
    M: Fn(f64) -> Result<f64>,
{
    let steps = (PROBE_MAX_RADIUS / PROBE_STEP) as usize;
    match cfg.cutoff_radius {
        Cutoff::Auto => {
            let mut last_large = 0usize;
            let mut edge = 0.0;
            for k in 1..=steps {
                let m = magnitude(k as f64 * PROBE_STEP)?;
                if m > NEGLIGIBLE {
                    last_large = k;
                }
                edge = m;
            }
            if last_large == steps {
                return Err(Error::invalid(format!(
                    "integrand does not decay: |f| = {edge:e} at radius {PROBE_MAX_RADIUS}"
                )));
            }
            let r = (last_large + 1) as f64 * PROBE_STEP;
            Ok((r, 2.0 * PI * r * NEGLIGIBLE * PROBE_STEP))
        }
        Cutoff::Radius(r) => {
            let mut tail = 0.0;
            let mut rho = r + PROBE_STEP;
            while rho <= r.max(PROBE_MAX_RADIUS) {
                tail += 2.0 * PI * rho * magnitude(rho)? * PROBE_STEP;
                rho += PROBE_STEP;
            }
            Ok((r, tail))
        }
    }
}

/// `∫ d²ξ f(ξ)` over the plane (no `1/π` factor).
pub fn integrate_plane<F>(f: &F, cfg: &QuadratureConfig) -> Result<Complex64>
where
    F: Fn(PhasePoint) -> Complex64 + ?Sized,
{
    cfg.validate()?;
    let (radius, tail) = cutoff_and_tail(&|rho| ray_max(f, rho), cfg)?;
    if tail > cfg.target_abs_tol {
        return Err(Error::Accuracy {
            estimate: tail,
            tolerance: cfg.target_abs_tol,
        });
    }
    let ang_tol = 1e-2 * cfg.target_abs_tol / (PI * radius * radius);
    let pass = |total: usize| {
        let (nodes, weights) = radial_rule(radius, total);
        let mut acc = Complex64::new(0.0, 0.0);
        for (rho, w) in nodes.iter().zip(weights.iter()) {
            acc += angular_mean(f, *rho, cfg.angular_nodes, ang_tol) * *w;
        }
        acc * (2.0 * PI)
    };
    converge_radial(cfg, |total| vec![pass(total)]).map(|v| v[0])
}

/// Run `pass` at half, then full, then doubled radial node counts until two
/// successive results agree to the tolerance; returns the finer one.
fn converge_radial<P>(cfg: &QuadratureConfig, mut pass: P) -> Result<Vec<Complex64>>
where
    P: FnMut(usize) -> Vec<Complex64>,
{
    let mut total = cfg.radial_nodes;
    let mut prev = pass((total / 2).max(4));
    let mut cur = pass(total);
    let mut doublings = 0;
    loop {
        let change = cur
            .iter()
            .zip(prev.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        if change <= cfg.target_abs_tol {
            return Ok(cur);
        }
        if doublings == MAX_RADIAL_DOUBLINGS {
            return Err(Error::Accuracy {
                estimate: change,
                tolerance: cfg.target_abs_tol,
            });
        }
        doublings += 1;
        total *= 2;
        prev = std::mem::replace(&mut cur, pass(total));
    }
}

/// `∫ d²ξ f(ξ) K_k(|ξ|²)` for a family of isotropic kernels at once.
///
/// `kernels(u, out)` fills `out[k] = K_k(u)`. The angular mean of `f` is
/// computed once per radius and shared by every kernel.
pub fn integrate_radial_kernels<F, K>(f: &F, count: usize, kernels: K, cfg: &QuadratureConfig) -> Result<Vec<Complex64>>
where
    F: Fn(PhasePoint) -> Complex64 + ?Sized,
    K: Fn(f64, &mut [f64]),
{
    cfg.validate()?;
    if count == 0 {
        return Ok(Vec::new());
    }
    let mut scratch = vec![0.0; count];
    let magnitude = |rho: f64| -> Result<f64> {
        let mut buf = vec![0.0; count];
        kernels(rho * rho, &mut buf);
        let kmax = buf.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        Ok(ray_max(f, rho)? * kmax)
    };
    let (radius, tail) = cutoff_and_tail(&magnitude, cfg)?;
    if tail > cfg.target_abs_tol {
        return Err(Error::Accuracy {
            estimate: tail,
            tolerance: cfg.target_abs_tol,
        });
    }
    let ang_tol = 1e-2 * cfg.target_abs_tol / (PI * radius * radius);
    let pass = |total: usize| {
        let (nodes, weights) = radial_rule(radius, total);
        let mut acc = vec![Complex64::new(0.0, 0.0); count];
        for (rho, w) in nodes.iter().zip(weights.iter()) {
            let mean = angular_mean(f, *rho, cfg.angular_nodes, ang_tol) * (2.0 * PI * *w);
            kernels(rho * rho, &mut scratch);
            for (a, k) in acc.iter_mut().zip(scratch.iter()) {
                *a += mean * *k;
            }
        }
        acc
    };
    converge_radial(cfg, pass)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let gl = gauss_legendre(16);
        let s: f64 = gl.1.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
        // ∫ x^30 over [-1,1] = 2/31
        let i: f64 = gl.0.iter().zip(gl.1.iter()).map(|(x, w)| w * x.powi(30)).sum();
        assert!((i - 2.0 / 31.0).abs() < 1e-14);
        let odd = gauss_legendre(7);
        assert!(odd.0[3].abs() < 1e-15);
    }

    #[test]
    fn gaussian_integrates_to_pi() {
        let f = |p: PhasePoint| Complex64::new((-p.norm_sqr()).exp(), 0.0);
        let i = integrate_plane(&f, &QuadratureConfig::default()).unwrap();
        assert!((i.re - PI).abs() < 1e-12 && i.im.abs() < 1e-15, "{i}");
    }

    #[test]
    fn anisotropic_gaussian() {
        // ∫ e^{-(a w² + b z²)} = π / √(ab)
        let (a, b) = (20.0f64, 0.05f64);
        let f = |p: PhasePoint| Complex64::new((-(a * p.w * p.w + b * p.z * p.z)).exp(), 0.0);
        let i = integrate_plane(&f, &QuadratureConfig::default()).unwrap();
        assert!((i.re - PI / (a * b).sqrt()).abs() < 1e-9, "{i}");
    }

    #[test]
    fn non_decaying_integrand_is_rejected() {
        let f = |_: PhasePoint| Complex64::new(1.0, 0.0);
        let err = integrate_plane(&f, &QuadratureConfig::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn short_fixed_cutoff_reports_accuracy() {
        let f = |p: PhasePoint| Complex64::new((-p.norm_sqr() / 2.0).exp(), 0.0);
        let cfg = QuadratureConfig {
            cutoff_radius: Cutoff::Radius(2.0),
            ..Default::default()
        };
        assert!(matches!(integrate_plane(&f, &cfg), Err(Error::Accuracy { .. })));
    }

    #[test]
    fn kernels_share_the_angular_mean() {
        let f = |p: PhasePoint| Complex64::new((-p.norm_sqr() / 2.0).exp(), 0.0);
        let out = integrate_radial_kernels(
            &f,
            2,
            |u, k| {
                k[0] = (-u / 2.0).exp();
                k[1] = (-u / 2.0).exp() * (1.0 - u);
            },
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!((out[0].re - PI).abs() < 1e-12);
        assert!(out[1].norm() < 1e-12);
    }

    #[test]
    fn config_validation() {
        let mut cfg = QuadratureConfig::default();
        cfg.radial_nodes = 4;
        assert!(cfg.validate().is_err());
        cfg = QuadratureConfig {
            target_abs_tol: 0.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
        let json = serde_json::to_string(&QuadratureConfig::default()).unwrap();
        assert!(json.contains("\"auto\""));
        let back: QuadratureConfig = serde_json::from_str(r#"{"cutoff_radius": 12.5, "radial_nodes": 32}"#).unwrap();
        assert_eq!(back.cutoff_radius, Cutoff::Radius(12.5));
        assert_eq!(back.angular_nodes, 128);
    }
}

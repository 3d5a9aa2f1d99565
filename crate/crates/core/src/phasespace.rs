//! Phase-space points and one-mode characteristic functions.
//!
//! A point of the conjugate plane is `ξ = w + iz`. Characteristic functions
//! are stored as evaluation closures tagged with their operator ordering `s`,
//! optionally carrying a closed-form [`Jet`] of their Taylor expansion at the
//! origin.

use crate::error::{Error, Result};
use crate::numerics::jet::Jet;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct PhasePoint {
    pub w: f64,
    pub z: f64,
}

impl PhasePoint {
    pub const fn new(w: f64, z: f64) -> Self {
        PhasePoint { w, z }
    }

    pub const fn origin() -> Self {
        PhasePoint { w: 0.0, z: 0.0 }
    }

    pub fn from_xi(xi: Complex64) -> Self {
        PhasePoint { w: xi.re, z: xi.im }
    }

    pub fn from_polar(rho: f64, phi: f64) -> Self {
        let (s, c) = phi.sin_cos();
        PhasePoint { w: rho * c, z: rho * s }
    }

    pub fn xi(&self) -> Complex64 {
        Complex64::new(self.w, self.z)
    }

    pub fn xi_conj(&self) -> Complex64 {
        Complex64::new(self.w, -self.z)
    }

    /// `|ξ|² = w² + z²`.
    pub fn norm_sqr(&self) -> f64 {
        self.w * self.w + self.z * self.z
    }

    pub fn conjugate(&self) -> Self {
        PhasePoint { w: self.w, z: -self.z }
    }

    pub fn scale(&self, g: f64) -> Self {
        PhasePoint {
            w: g * self.w,
            z: g * self.z,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.w.is_finite() && self.z.is_finite()
    }
}

impl std::ops::Neg for PhasePoint {
    type Output = PhasePoint;
    fn neg(self) -> PhasePoint {
        PhasePoint { w: -self.w, z: -self.z }
    }
}

/// Operator ordering `s`: antinormal (−1), symmetric/Wigner (0), normal (1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub enum Ordering {
    Antinormal,
    Wigner,
    Normal,
}

impl Ordering {
    pub fn s(self) -> i32 {
        match self {
            Ordering::Antinormal => -1,
            Ordering::Wigner => 0,
            Ordering::Normal => 1,
        }
    }
}

impl TryFrom<i32> for Ordering {
    type Error = Error;
    fn try_from(s: i32) -> Result<Self> {
        match s {
            -1 => Ok(Ordering::Antinormal),
            0 => Ok(Ordering::Wigner),
            1 => Ok(Ordering::Normal),
            other => Err(Error::invalid(format!("unsupported ordering s = {other}"))),
        }
    }
}

impl From<Ordering> for i32 {
    fn from(o: Ordering) -> i32 {
        o.s()
    }
}

type EvalFn = dyn Fn(PhasePoint) -> Complex64 + Send + Sync;

/// Closed-form jets are kept to this total order.
pub const JET_ORDER: usize = 6;

/// An evaluatable one-mode characteristic function.
#[derive(Clone)]
pub struct CharFn {
    eval: Arc<EvalFn>,
    ordering: Ordering,
    label: String,
    jet: Option<Arc<Jet>>,
}

impl fmt::Debug for CharFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CharFn")
            .field("label", &self.label)
            .field("ordering", &self.ordering)
            .field("jet", &self.jet.as_ref().map(|j| j.order()))
            .finish()
    }
}

impl CharFn {
    pub fn new<F>(label: impl Into<String>, ordering: Ordering, eval: F) -> Self
    where
        F: Fn(PhasePoint) -> Complex64 + Send + Sync + 'static,
    {
        CharFn {
            eval: Arc::new(eval),
            ordering,
            label: label.into(),
            jet: None,
        }
    }

    /// Attach the Taylor expansion of the function at the origin.
    pub fn with_jet(mut self, jet: Jet) -> Self {
        self.jet = Some(Arc::new(jet));
        self
    }

    /// Drop the closed-form jet, leaving only point evaluation.
    pub fn without_jet(mut self) -> Self {
        self.jet = None;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Unchecked evaluation.
    #[inline]
    pub fn eval(&self, p: PhasePoint) -> Complex64 {
        (self.eval)(p)
    }

    pub fn ordering(&self) -> Ordering {
        self.ordering
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn jet(&self) -> Option<&Jet> {
        self.jet.as_deref()
    }

    /// Pointwise product `f(ξ) g(ξ)`; the ordering of `self` is kept.
    pub fn product(&self, other: &CharFn, label: impl Into<String>) -> CharFn {
        let (a, b) = (self.eval.clone(), other.eval.clone());
        let jet = match (&self.jet, &other.jet) {
            (Some(x), Some(y)) => Some(Arc::new(x.as_ref() * y.as_ref())),
            _ => None,
        };
        CharFn {
            eval: Arc::new(move |p| a(p) * b(p)),
            ordering: self.ordering,
            label: label.into(),
            jet,
        }
    }

    /// `ξ ↦ f(g ξ)`.
    pub fn scale_argument(&self, g: f64) -> CharFn {
        if g == 1.0 {
            return self.clone();
        }
        let a = self.eval.clone();
        CharFn {
            eval: Arc::new(move |p| a(p.scale(g))),
            ordering: self.ordering,
            label: format!("{}(g={g})", self.label),
            jet: self.jet.as_ref().map(|j| Arc::new(j.scale_argument(g))),
        }
    }
}

/// Re-express `f` in ordering `target_s`: `g(ξ) = e^{(t − s)|ξ|²/2} f(ξ)`.
pub fn convert_ordering(f: &CharFn, target_s: i32) -> Result<CharFn> {
    let target = Ordering::try_from(target_s)?;
    let ds = (target.s() - f.ordering.s()) as f64;
    if ds == 0.0 {
        return Ok(f.clone());
    }
    let k = ds / 2.0;
    let inner = f.eval.clone();
    let jet = f.jet.as_ref().map(|j| {
        let q = Complex64::new(k, 0.0);
        let factor = Jet::diagonal_quadratic(j.order(), q, q).exp();
        Arc::new(j.as_ref() * &factor)
    });
    Ok(CharFn {
        eval: Arc::new(move |p| inner(p) * (k * p.norm_sqr()).exp()),
        ordering: target,
        label: f.label.clone(),
        jet,
    })
}

/// Checked evaluation: rejects non-finite points.
pub fn eval_at(f: &CharFn, p: PhasePoint) -> Result<Complex64> {
    if !p.is_finite() {
        return Err(Error::invalid(format!("non-finite phase point ({}, {})", p.w, p.z)));
    }
    Ok(f.eval(p))
}

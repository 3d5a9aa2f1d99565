//! One-dimensional optimization of the resource parameter `Δ`.
//!
//! A 41-point grid locates the best basin (objectives can have a maximum and
//! a minimum inside `[0, 1]`), then golden-section search refines it to
//! `1e−6`. The printed closed-form optima are available through
//! [`closed_form_delta`].

use crate::channel::teleport;
use crate::error::{Error, Result};
use crate::moments::{
    moment_set_with, normal_transfer_factor, resource_closed_forms, wirtinger_derivative, xp_moment_complex,
    DerivativeRoute,
};
use crate::numerics::diff::DiffConfig;
use crate::numerics::quadrature::QuadratureConfig;
use crate::photonstats::{d_functional, input_distribution, output_photon_probs, overlap};
use crate::states::{input_charfn, transfer_fn, Channel, InputState, SqueezedBellResource};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;

pub const GRID_POINTS: usize = 41;
pub const DELTA_TOL: f64 = 1e-6;

/// `√(2+√2)/2`, the second-moment optimum.
pub fn delta_opt_2() -> f64 {
    (2.0 + 2f64.sqrt()).sqrt() / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveKind {
    X2Transfer,
    Kappa4Transfer,
    NTransfer,
    Mu4X,
    Mu4P,
    DFunctional,
    OneMinusFidelity,
    Frobenius,
}

impl ObjectiveKind {
    pub const ALL: [ObjectiveKind; 8] = [
        ObjectiveKind::X2Transfer,
        ObjectiveKind::Kappa4Transfer,
        ObjectiveKind::NTransfer,
        ObjectiveKind::Mu4X,
        ObjectiveKind::Mu4P,
        ObjectiveKind::DFunctional,
        ObjectiveKind::OneMinusFidelity,
        ObjectiveKind::Frobenius,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ObjectiveKind::X2Transfer => "x2_transfer",
            ObjectiveKind::Kappa4Transfer => "kappa4_transfer",
            ObjectiveKind::NTransfer => "n_transfer",
            ObjectiveKind::Mu4X => "mu4_x",
            ObjectiveKind::Mu4P => "mu4_p",
            ObjectiveKind::DFunctional => "d_functional",
            ObjectiveKind::OneMinusFidelity => "one_minus_fidelity",
            ObjectiveKind::Frobenius => "frobenius",
        }
    }

    pub fn needs_input(self) -> bool {
        !matches!(
            self,
            ObjectiveKind::X2Transfer | ObjectiveKind::Kappa4Transfer | ObjectiveKind::NTransfer
        )
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ObjectiveKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ObjectiveKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown objective kind {s:?}")))
    }
}

/// How transfer-function quantities are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum TransferRoute {
    /// The printed closed forms (κ⁴ form assumes θ = 0, the μ⁴ forms g = 1).
    Printed,
    /// Exact derivatives of the transfer function.
    #[default]
    ClosedFormDerivative,
    FiniteDifference(DiffConfig),
}

impl TransferRoute {
    fn derivative_route(self) -> DerivativeRoute {
        match self {
            TransferRoute::FiniteDifference(cfg) => DerivativeRoute::FiniteDifference(cfg),
            _ => DerivativeRoute::ClosedForm,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Objective {
    pub kind: ObjectiveKind,
    pub input: Option<InputState>,
    pub theta: f64,
    pub r: f64,
    pub gain: f64,
    /// Photon-number cutoff `N` for `d_functional`.
    pub n_photons: usize,
    pub quadrature: QuadratureConfig,
    pub route: TransferRoute,
    /// Search interval for `Δ`, inside `[0, 1]`.
    pub interval: (f64, f64),
}

impl Objective {
    pub fn new(kind: ObjectiveKind, r: f64) -> Self {
        Objective {
            kind,
            input: None,
            theta: 0.0,
            r,
            gain: 1.0,
            n_photons: 24,
            quadrature: QuadratureConfig::default(),
            route: TransferRoute::default(),
            interval: (0.0, 1.0),
        }
    }

    pub fn with_input(mut self, input: InputState) -> Self {
        self.input = Some(input);
        self
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        self.theta = theta;
        self
    }

    pub fn with_gain(mut self, gain: f64) -> Self {
        self.gain = gain;
        self
    }

    pub fn with_route(mut self, route: TransferRoute) -> Self {
        self.route = route;
        self
    }

    pub fn with_interval(mut self, lo: f64, hi: f64) -> Self {
        self.interval = (lo, hi);
        self
    }

    pub fn with_photon_cutoff(mut self, n: usize) -> Self {
        self.n_photons = n;
        self
    }

    pub fn with_quadrature(mut self, cfg: QuadratureConfig) -> Self {
        self.quadrature = cfg;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind.needs_input() && self.input.is_none() {
            return Err(Error::invalid(format!("objective {} needs an input state", self.kind)));
        }
        let (lo, hi) = self.interval;
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::invalid(format!("delta interval [{lo}, {hi}] not inside [0, 1]")));
        }
        if let Some(input) = &self.input {
            input.validate()?;
        }
        Channel::new(SqueezedBellResource::new(lo, self.theta, self.r)?, self.gain)?;
        Ok(())
    }

    fn channel(&self, delta: f64) -> Result<Channel> {
        Channel::new(SqueezedBellResource::new(delta, self.theta, self.r)?, self.gain)
    }

    fn input(&self) -> Result<&InputState> {
        self.input
            .as_ref()
            .ok_or_else(|| Error::invalid(format!("objective {} needs an input state", self.kind)))
    }

    /// Objective value at `Δ`.
    pub fn evaluate(&self, delta: f64) -> Result<f64> {
        let ch = self.channel(delta)?;
        let printed = resource_closed_forms(&ch.resource);
        let droute = self.route.derivative_route();
        let value = match self.kind {
            ObjectiveKind::X2Transfer => match self.route {
                TransferRoute::Printed => printed.x2_ab,
                _ => xp_moment_complex(&transfer_fn(&ch)?, 2, 0, droute)?.re,
            },
            ObjectiveKind::Kappa4Transfer => match self.route {
                TransferRoute::Printed => printed.kappa4_ab,
                _ => {
                    let tau = transfer_fn(&ch)?;
                    let x2 = xp_moment_complex(&tau, 2, 0, droute)?.re;
                    xp_moment_complex(&tau, 4, 0, droute)?.re - 3.0 * x2 * x2
                }
            },
            ObjectiveKind::NTransfer => match self.route {
                TransferRoute::Printed => printed.n_ab,
                _ => -wirtinger_derivative(&normal_transfer_factor(&ch)?, 1, 1, droute)?.re,
            },
            ObjectiveKind::Mu4X | ObjectiveKind::Mu4P => {
                let input = self.input()?;
                let m_in = moment_set_with(&input_charfn(input)?, DerivativeRoute::ClosedForm)?;
                let along_x = self.kind == ObjectiveKind::Mu4X;
                match self.route {
                    TransferRoute::Printed => {
                        let v_in = if along_x { m_in.x2_central } else { m_in.p2_central };
                        let (x2, k4) = (printed.x2_ab, printed.kappa4_ab);
                        (k4 + 3.0 * x2 * x2 + 6.0 * v_in * x2).abs()
                    }
                    _ => {
                        let out = teleport(input, &ch)?;
                        let m_out = moment_set_with(&out.charfn, droute)?;
                        if along_x {
                            (m_out.mu4_x - m_in.mu4_x).abs()
                        } else {
                            (m_out.mu4_p - m_in.mu4_p).abs()
                        }
                    }
                }
            }
            ObjectiveKind::DFunctional => {
                let input = self.input()?;
                let p_in = input_distribution(input, self.n_photons)?;
                let p_out = output_photon_probs(&teleport(input, &ch)?, self.n_photons, &self.quadrature)?;
                d_functional(&p_in, &p_out)?
            }
            ObjectiveKind::OneMinusFidelity => {
                let input = self.input()?;
                let out = teleport(input, &ch)?;
                1.0 - overlap(&input_charfn(input)?, &out.charfn, &self.quadrature)?
            }
            ObjectiveKind::Frobenius => {
                let input = self.input()?;
                let chi_in = input_charfn(input)?;
                let out = teleport(input, &ch)?;
                let f = overlap(&chi_in, &out.charfn, &self.quadrature)?;
                let p_in = overlap(&chi_in, &chi_in, &self.quadrature)?;
                let p_out = overlap(&out.charfn, &out.charfn, &self.quadrature)?;
                (p_in + p_out - 2.0 * f).max(0.0).sqrt()
            }
        };
        if !value.is_finite() {
            return Err(Error::Evaluation {
                delta,
                message: format!("{} evaluated to {value}", self.kind),
            });
        }
        Ok(value)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimumRecord {
    pub kind: ObjectiveKind,
    pub r: f64,
    pub delta_star: f64,
    pub objective_value: f64,
    /// Interval handed to the golden-section stage.
    pub bracket: [f64; 2],
    /// Golden-section iterations.
    pub iterations: usize,
}

/// Golden-section minimization of `f` on `[a, b]`.
pub fn golden_section<F>(f: F, mut a: f64, mut b: f64, tol: f64) -> Result<(f64, f64, usize)>
where
    F: Fn(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    let mut iterations = 0;
    while b - a > tol {
        iterations += 1;
        // ties move toward the smaller Δ
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    let x = 0.5 * (a + b);
    Ok((x, f(x)?, iterations))
}

/// Minimize `obj` over its `Δ` interval.
pub fn minimize_delta(obj: &Objective) -> Result<OptimumRecord> {
    obj.validate()?;
    minimize_scalar(|d| obj.evaluate(d), obj.interval).map(|(delta_star, objective_value, bracket, iterations)| {
        OptimumRecord {
            kind: obj.kind,
            r: obj.r,
            delta_star,
            objective_value,
            bracket,
            iterations,
        }
    })
}

/// Grid-then-golden minimization of any function on `[lo, hi]`.
/// Returns `(x*, f(x*), bracket, iterations)`.
pub fn minimize_scalar<F>(f: F, (lo, hi): (f64, f64)) -> Result<(f64, f64, [f64; 2], usize)>
where
    F: Fn(f64) -> Result<f64>,
{
    let checked = |d: f64| -> Result<f64> {
        let v = f(d)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::Evaluation {
                delta: d,
                message: format!("objective value {v}"),
            })
        }
    };
    let step = (hi - lo) / (GRID_POINTS - 1) as f64;
    let x = |i: usize| if i == GRID_POINTS - 1 { hi } else { lo + step * i as f64 };
    let mut best = (0, checked(x(0))?);
    for i in 1..GRID_POINTS {
        let v = checked(x(i))?;
        if v < best.1 {
            best = (i, v);
        }
    }
    let bracket = [x(best.0.saturating_sub(1)), x((best.0 + 1).min(GRID_POINTS - 1))];
    let (g, gv, iterations) = golden_section(checked, bracket[0], bracket[1], DELTA_TOL)?;
    if gv < best.1 {
        Ok((g, gv, bracket, iterations))
    } else {
        Ok((x(best.0), best.1, bracket, iterations))
    }
}

/// The printed closed-form optima.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormKind {
    /// Fidelity optimum for the one-photon Fock input.
    FidelityFock1,
    /// Fidelity optimum for coherent (and vacuum) inputs.
    FidelityCoherent,
    Mu4XCoherent,
    Mu4XSqueezed,
    Mu4XFock1,
    Mu4PSqueezed,
}

impl ClosedFormKind {
    pub const ALL: [ClosedFormKind; 6] = [
        ClosedFormKind::FidelityFock1,
        ClosedFormKind::FidelityCoherent,
        ClosedFormKind::Mu4XCoherent,
        ClosedFormKind::Mu4XSqueezed,
        ClosedFormKind::Mu4XFock1,
        ClosedFormKind::Mu4PSqueezed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClosedFormKind::FidelityFock1 => "fidelity_fock1",
            ClosedFormKind::FidelityCoherent => "fidelity_coherent",
            ClosedFormKind::Mu4XCoherent => "mu4_x_coherent",
            ClosedFormKind::Mu4XSqueezed => "mu4_x_squeezed",
            ClosedFormKind::Mu4XFock1 => "mu4_x_fock1",
            ClosedFormKind::Mu4PSqueezed => "mu4_p_squeezed",
        }
    }

    pub fn needs_squeezing(self) -> bool {
        matches!(self, ClosedFormKind::Mu4XSqueezed | ClosedFormKind::Mu4PSqueezed)
    }
}

impl std::str::FromStr for ClosedFormKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ClosedFormKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::invalid(format!("unknown closed-form kind {s:?}")))
    }
}

/// `√(1 + A²/√(A² B)) / √2`, the common shape of the fourth-moment optima.
fn mu4_shape(a: f64, b: f64) -> f64 {
    (1.0 + a * a / (a * a * b).sqrt()).sqrt() / 2f64.sqrt()
}

/// Evaluate a printed optimal-`Δ` formula at squeezing `r` (and input squeezing `s`).
pub fn closed_form_delta(kind: ClosedFormKind, r: f64, s: Option<f64>) -> Result<f64> {
    if !r.is_finite() || r < 0.0 {
        return Err(Error::invalid(format!("r must be finite and >= 0, got {r}")));
    }
    let s = match (kind.needs_squeezing(), s) {
        (true, None) => return Err(Error::invalid(format!("{} needs the input squeezing s", kind.name()))),
        (true, Some(s)) if !s.is_finite() => return Err(Error::invalid("s must be finite")),
        (_, s) => s.unwrap_or(0.0),
    };
    let e = (2.0 * r).exp();
    let v = match kind {
        ClosedFormKind::FidelityFock1 => {
            let arg = (1.0 - e + e * e + 3.0 * e * e * e) / (e * 3.0 * (e - 1.0).powi(2));
            (0.5 * arg.atan()).cos()
        }
        ClosedFormKind::FidelityCoherent => (0.5 * (1.0 + 1.0 / e).atan()).cos(),
        ClosedFormKind::Mu4XCoherent => mu4_shape(3.0 + e, 13.0 + 2.0 * e * (5.0 + e)),
        ClosedFormKind::Mu4XSqueezed => {
            let q = (2.0 * s).exp();
            mu4_shape(e + 3.0 * q, 2.0 * e * e + 13.0 * q * q + 10.0 * e * q)
        }
        ClosedFormKind::Mu4XFock1 => {
            let a = 1.0 + e;
            (1.0 + 3.0 * a * a / (a * a * (13.0 + 30.0 * e + 18.0 * e * e)).sqrt()).sqrt() / 2f64.sqrt()
        }
        ClosedFormKind::Mu4PSqueezed => {
            let t = (2.0 * (r + s)).exp();
            mu4_shape(3.0 + t, 13.0 + 2.0 * t * (5.0 + t))
        }
    };
    Ok(v)
}

/// One cell of an `r` sweep; failures are kept per cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub kind: ObjectiveKind,
    pub r: f64,
    pub record: Option<OptimumRecord>,
    pub error: Option<String>,
}

/// Minimize each kind at each `r`, using `template` for everything else.
/// Cells run in parallel on the current rayon pool; the output follows
/// kind-major grid order.
pub fn sweep_r(template: &Objective, kinds: &[ObjectiveKind], r_grid: &[f64]) -> Result<Vec<SweepCell>> {
    if kinds.is_empty() || r_grid.is_empty() {
        return Err(Error::invalid("sweep needs at least one kind and one r value"));
    }
    let cells: Vec<(ObjectiveKind, f64)> = kinds
        .iter()
        .flat_map(|&k| r_grid.iter().map(move |&r| (k, r)))
        .collect();
    Ok(cells
        .par_iter()
        .map(|&(kind, r)| {
            let obj = Objective {
                kind,
                r,
                ..template.clone()
            };
            match minimize_delta(&obj) {
                Ok(rec) => SweepCell {
                    kind,
                    r,
                    record: Some(rec),
                    error: None,
                },
                Err(e) => SweepCell {
                    kind,
                    r,
                    record: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect())
}

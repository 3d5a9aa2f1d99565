//! Moments, cumulants and derived observables from characteristic functions.
//!
//! Conventions: `⟨XⁿPᵐ⟩ = i^{−(n+m)} ∂ⁿ_z ∂ᵐ_w χ(0)` with `X = â + â†`
//! (vacuum variance 1), so the quadrature moments are symmetrically ordered.
//! Normal-ordered moments use `⟨â†ⁿ âᵐ⟩ = (−1)^m ∂ⁿ_ξ ∂ᵐ_{ξ*} χ^{(1)}(0)` with
//! Wirtinger derivatives `∂_ξ = ½(∂_w − i∂_z)`, `∂_{ξ*} = ½(∂_w + i∂_z)`.

use crate::channel::teleport;
use crate::error::{Error, Result};
use crate::numerics::diff::{derivative_at_origin, DiffConfig};
use crate::numerics::Jet;
use crate::phasespace::{convert_ordering, CharFn, Ordering};
use crate::states::{input_charfn, transfer_fn, Channel, InputState, SqueezedBellResource};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Highest moment order handled here.
pub const MAX_MOMENT_ORDER: usize = 4;

const IMAG_RESIDUE: f64 = 1e-8;

/// How derivatives at the origin are obtained.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum DerivativeRoute {
    /// Closed-form jet when the function carries one, finite differences otherwise.
    #[default]
    Auto,
    /// Closed-form jet only; an error if the function has none.
    ClosedForm,
    FiniteDifference(DiffConfig),
}

/// `∂^nw_w ∂^nz_z f(0)` along the requested route.
pub fn partial(f: &CharFn, nw: usize, nz: usize, route: DerivativeRoute) -> Result<Complex64> {
    let from_jet = f.jet().and_then(|j| j.derivative(nw, nz));
    match route {
        DerivativeRoute::Auto => match from_jet {
            Some(v) => Ok(v),
            None => derivative_at_origin(&|p| f.eval(p), nw, nz, &DiffConfig::default()),
        },
        DerivativeRoute::ClosedForm => from_jet.ok_or_else(|| {
            Error::invalid(format!(
                "no closed-form derivative of order {} for {}",
                nw + nz,
                f.label()
            ))
        }),
        DerivativeRoute::FiniteDifference(cfg) => derivative_at_origin(&|p| f.eval(p), nw, nz, &cfg),
    }
}

fn check_order(n: usize, m: usize) -> Result<()> {
    if n + m > MAX_MOMENT_ORDER {
        return Err(Error::Capacity {
            what: "moment order",
            requested: n + m,
            limit: MAX_MOMENT_ORDER,
        });
    }
    Ok(())
}

fn i_pow_neg(k: usize) -> Complex64 {
    // i^{-k}
    [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, -1.0),
        Complex64::new(-1.0, 0.0),
        Complex64::new(0.0, 1.0),
    ][k % 4]
}

fn require_wigner(f: &CharFn) -> Result<()> {
    if f.ordering() != Ordering::Wigner {
        return Err(Error::invalid(format!(
            "quadrature moments need a Wigner-ordered function, {} has s = {}",
            f.label(),
            f.ordering().s()
        )));
    }
    Ok(())
}

/// Complex `i^{−(n+m)} ∂ⁿ_z ∂ᵐ_w f(0)` before the reality check.
pub fn xp_moment_complex(f: &CharFn, n: usize, m: usize, route: DerivativeRoute) -> Result<Complex64> {
    check_order(n, m)?;
    Ok(i_pow_neg(n + m) * partial(f, m, n, route)?)
}

/// Symmetrically ordered `⟨XⁿPᵐ⟩`.
pub fn raw_moment_xp(f: &CharFn, n: usize, m: usize) -> Result<f64> {
    raw_moment_xp_with(f, n, m, DerivativeRoute::Auto)
}

pub fn raw_moment_xp_with(f: &CharFn, n: usize, m: usize, route: DerivativeRoute) -> Result<f64> {
    require_wigner(f)?;
    let v = xp_moment_complex(f, n, m, route)?;
    if v.im.abs() > IMAG_RESIDUE * v.re.abs().max(1.0) {
        return Err(Error::Consistency(format!(
            "<X^{n} P^{m}> of {} has imaginary residue {:e}",
            f.label(),
            v.im
        )));
    }
    Ok(v.re)
}

/// Coefficients `c_a` of `∂ⁿ_ξ ∂ᵐ_{ξ*} = Σ_a c_a ∂^a_w ∂^{n+m−a}_z`.
fn wirtinger_expansion(n: usize, m: usize) -> Vec<Complex64> {
    let mut poly = vec![Complex64::new(1.0, 0.0)];
    let factors =
        std::iter::repeat_n(Complex64::new(0.0, -0.5), n).chain(std::iter::repeat_n(Complex64::new(0.0, 0.5), m));
    for iz in factors {
        // multiply by (½∂_w + iz ∂_z); index = power of ∂_w
        let mut next = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
        for (a, c) in poly.iter().enumerate() {
            next[a + 1] += c * 0.5;
            next[a] += c * iz;
        }
        poly = next;
    }
    poly
}

/// `∂ⁿ_ξ ∂ᵐ_{ξ*} f(0)`.
pub fn wirtinger_derivative(f: &CharFn, n: usize, m: usize, route: DerivativeRoute) -> Result<Complex64> {
    let k = n + m;
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, c) in wirtinger_expansion(n, m).into_iter().enumerate() {
        if c != Complex64::new(0.0, 0.0) {
            acc += c * partial(f, a, k - a, route)?;
        }
    }
    Ok(acc)
}

/// `⟨â†ⁿ âᵐ⟩` in ordering `target`: `(−1)^m ∂ⁿ_ξ ∂ᵐ_{ξ*} χ^{(s)}(0)`.
pub fn ordered_moment(f: &CharFn, n: usize, m: usize, target: Ordering, route: DerivativeRoute) -> Result<Complex64> {
    check_order(n, m)?;
    let g = convert_ordering(f, target.s())?;
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(wirtinger_derivative(&g, n, m, route)? * sign)
}

/// Normal-ordered `⟨â†ⁿ âᵐ⟩`.
pub fn raw_moment_normal(f: &CharFn, n: usize, m: usize) -> Result<Complex64> {
    ordered_moment(f, n, m, Ordering::Normal, DerivativeRoute::Auto)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TableKind {
    /// Entries `⟨XⁿPᵐ⟩`.
    Quadrature,
    /// Entries `⟨â†ⁿ âᵐ⟩`.
    Normal,
}

/// Moments `(n, m)` with `n + m <= order`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentTable {
    pub kind: TableKind,
    order: usize,
    values: Vec<Option<Complex64>>,
}

impl MomentTable {
    pub fn empty(kind: TableKind, order: usize) -> Self {
        MomentTable {
            kind,
            order,
            values: vec![None; (order + 1) * (order + 1)],
        }
    }

    /// Table of a function whose only nonzero moment is `(0, 0) = 1`.
    pub fn identity(kind: TableKind, order: usize) -> Self {
        let mut t = MomentTable::empty(kind, order);
        for n in 0..=order {
            for m in 0..=order - n {
                t.set(n, m, Complex64::new(if n + m == 0 { 1.0 } else { 0.0 }, 0.0));
            }
        }
        t
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, n: usize, m: usize) -> Option<Complex64> {
        if n + m > self.order {
            return None;
        }
        self.values[n * (self.order + 1) + m]
    }

    pub fn set(&mut self, n: usize, m: usize, v: Complex64) {
        assert!(n + m <= self.order);
        self.values[n * (self.order + 1) + m] = Some(v);
    }

    /// `⟨XⁿPᵐ⟩` of a Wigner function (transfer functions included).
    pub fn quadrature(f: &CharFn, order: usize, route: DerivativeRoute) -> Result<Self> {
        require_wigner(f)?;
        check_order(order, 0)?;
        let mut t = MomentTable::empty(TableKind::Quadrature, order);
        for n in 0..=order {
            for m in 0..=order - n {
                t.set(n, m, xp_moment_complex(f, n, m, route)?);
            }
        }
        Ok(t)
    }

    /// `⟨â†ⁿ âᵐ⟩` of a state.
    pub fn normal(f: &CharFn, order: usize, route: DerivativeRoute) -> Result<Self> {
        check_order(order, 0)?;
        let g = convert_ordering(f, Ordering::Normal.s())?;
        Self::wirtinger_table(&g, order, route)
    }

    /// Normal-order "averages" of the transfer function. For gain `g` the
    /// factor multiplying `χ_in^{(1)}(gξ)` is `τ(ξ) e^{(1−g²)|ξ|²/2}`.
    pub fn transfer_normal(ch: &Channel, order: usize, route: DerivativeRoute) -> Result<Self> {
        check_order(order, 0)?;
        Self::wirtinger_table(&normal_transfer_factor(ch)?, order, route)
    }

    fn wirtinger_table(g: &CharFn, order: usize, route: DerivativeRoute) -> Result<Self> {
        let mut t = MomentTable::empty(TableKind::Normal, order);
        for n in 0..=order {
            for m in 0..=order - n {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                t.set(n, m, wirtinger_derivative(g, n, m, route)? * sign);
            }
        }
        Ok(t)
    }
}

/// `τ(ξ) e^{(1−g²)|ξ|²/2}`, the normal-order transfer factor.
pub fn normal_transfer_factor(ch: &Channel) -> Result<CharFn> {
    let tau = transfer_fn(ch)?;
    let k = (1.0 - ch.gain * ch.gain) / 2.0;
    if k == 0.0 {
        return Ok(tau);
    }
    let q = Complex64::new(k, 0.0);
    let factor = CharFn::new("gain factor", Ordering::Wigner, move |p| {
        Complex64::new((k * p.norm_sqr()).exp(), 0.0)
    })
    .with_jet(Jet::diagonal_quadratic(crate::phasespace::JET_ORDER, q, q).exp());
    Ok(tau.product(&factor, "normal transfer factor"))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Output moment from input and transfer tables:
/// `Σ_{i,j} C(n,i) C(m,j) g^{i+j} ⟨·⟩_in(i,j) ⟨·⟩_ÃB(n−i, m−j)`.
pub fn output_moment_binomial(
    input: &MomentTable,
    transfer: &MomentTable,
    n: usize,
    m: usize,
    g: f64,
) -> Result<Complex64> {
    if input.kind != transfer.kind {
        return Err(Error::invalid("moment tables of different kinds"));
    }
    let missing = |which: &str, a: usize, b: usize| Error::invalid(format!("{which} table lacks entry ({a}, {b})"));
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..=n {
        for j in 0..=m {
            let a = input.get(i, j).ok_or_else(|| missing("input", i, j))?;
            let b = transfer
                .get(n - i, m - j)
                .ok_or_else(|| missing("transfer", n - i, m - j))?;
            acc += a * b * (binomial(n, i) * binomial(m, j) * g.powi((i + j) as i32));
        }
    }
    Ok(acc)
}

/// Moments and cumulants of one mode through fourth order.
///
/// Quadrature entries are symmetrically ordered; `n_mean` and `g2_zero` come
/// from normal-ordered moments. For transfer functions (`is_state = false`)
/// the entries are formal "averages" that may be negative, `n_mean` is the
/// normal-order transfer average and `g2_zero` is absent.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub x_mean: f64,
    pub p_mean: f64,
    pub x2_central: f64,
    pub p2_central: f64,
    pub cov_xp: f64,
    pub mu3_x: f64,
    pub mu3_p: f64,
    pub mu4_x: f64,
    pub mu4_p: f64,
    pub kappa4_x: f64,
    pub kappa4_p: f64,
    pub n_mean: f64,
    pub g2_zero: Option<f64>,
    pub is_state: bool,
}

impl MomentSet {
    /// Ordering used for a field of this record.
    pub fn ordering_note(field: &str) -> &'static str {
        match field {
            "n_mean" | "g2_zero" => "normal ordered",
            _ => "symmetric (Wigner) ordered quadratures",
        }
    }
}

fn central_charfn(f: &CharFn, x_mean: f64, p_mean: f64) -> CharFn {
    if x_mean == 0.0 && p_mean == 0.0 {
        return f.clone();
    }
    let shift = CharFn::new("centering", Ordering::Wigner, move |p| {
        Complex64::new(0.0, -(p.z * x_mean + p.w * p_mean)).exp()
    });
    let shift = match f.jet() {
        Some(j) => shift.with_jet(
            Jet::affine(
                j.order(),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, -p_mean),
                Complex64::new(0.0, -x_mean),
            )
            .exp(),
        ),
        None => shift,
    };
    f.product(&shift, format!("{} centered", f.label()))
}

fn quadrature_part(f: &CharFn, route: DerivativeRoute, check: bool) -> Result<MomentSet> {
    let get = |g: &CharFn, n, m| -> Result<f64> {
        if check {
            raw_moment_xp_with(g, n, m, route)
        } else {
            Ok(xp_moment_complex(g, n, m, route)?.re)
        }
    };
    let x_mean = get(f, 1, 0)?;
    let p_mean = get(f, 0, 1)?;
    let c = central_charfn(f, x_mean, p_mean);
    let x2 = get(&c, 2, 0)?;
    let p2 = get(&c, 0, 2)?;
    let mu4_x = get(&c, 4, 0)?;
    let mu4_p = get(&c, 0, 4)?;
    Ok(MomentSet {
        x_mean,
        p_mean,
        x2_central: x2,
        p2_central: p2,
        cov_xp: get(&c, 1, 1)?,
        mu3_x: get(&c, 3, 0)?,
        mu3_p: get(&c, 0, 3)?,
        mu4_x,
        mu4_p,
        kappa4_x: mu4_x - 3.0 * x2 * x2,
        kappa4_p: mu4_p - 3.0 * p2 * p2,
        n_mean: 0.0,
        g2_zero: None,
        is_state: true,
    })
}

/// Full moment record of a (Wigner-ordered, normalized) state.
pub fn moment_set(f: &CharFn) -> Result<MomentSet> {
    moment_set_with(f, DerivativeRoute::Auto)
}

pub fn moment_set_with(f: &CharFn, route: DerivativeRoute) -> Result<MomentSet> {
    require_wigner(f)?;
    let mut set = quadrature_part(f, route, true)?;
    let n = ordered_moment(f, 1, 1, Ordering::Normal, route)?.re;
    set.n_mean = n;
    if n.abs() >= 1e-12 {
        let a2 = ordered_moment(f, 2, 2, Ordering::Normal, route)?.re;
        set.g2_zero = Some(a2 / (n * n));
    }
    Ok(set)
}

/// Formal moment record of the transfer function of `ch`.
pub fn transfer_moment_set(ch: &Channel, route: DerivativeRoute) -> Result<MomentSet> {
    let tau = transfer_fn(ch)?;
    let mut set = quadrature_part(&tau, route, false)?;
    set.is_state = false;
    let factor = normal_transfer_factor(ch)?;
    set.n_mean = -wirtinger_derivative(&factor, 1, 1, route)?.re;
    Ok(set)
}

/// The resource expressions printed in closed form.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResourceClosedForms {
    /// `e^{−2r}(6 − 4Δ² − 4Δ√(1−Δ²) cos θ)`.
    pub x2_ab: f64,
    /// `−e^{−2r}(−3 + e^{2r} + 2Δ² + 2Δ√(1−Δ²) cos θ)`, as printed.
    pub n_ab: f64,
    /// `e^{−2r}(3 − 2Δ² − 2Δ√(1−Δ²) cos θ)`, the derivative-based average.
    pub n_ab_derivative: f64,
    /// `24 e^{−4r}(Δ² − 1)(1 − 4Δ√(1−Δ²))`; the printed form assumes θ = 0.
    pub kappa4_ab: f64,
}

pub fn resource_closed_forms(res: &SqueezedBellResource) -> ResourceClosedForms {
    let d = res.delta;
    let sq = res.complement();
    let e2 = (-2.0 * res.r).exp();
    let cos = res.theta.cos();
    ResourceClosedForms {
        x2_ab: e2 * (6.0 - 4.0 * d * d - 4.0 * d * sq * cos),
        n_ab: -e2 * (-3.0 + (2.0 * res.r).exp() + 2.0 * d * d + 2.0 * d * sq * cos),
        n_ab_derivative: e2 * (3.0 - 2.0 * d * d - 2.0 * d * sq * cos),
        kappa4_ab: 24.0 * e2 * e2 * (d * d - 1.0) * (1.0 - 4.0 * d * sq),
    }
}

/// Second-moment distortion of one input through one channel.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceDistortion {
    pub x2_in: f64,
    pub x2_out: f64,
    pub p2_in: f64,
    pub p2_out: f64,
    pub cov_in: f64,
    pub cov_out: f64,
    /// `⟨Δx²⟩_out − g²⟨Δx²⟩_in`.
    pub dx2: f64,
    pub dp2: f64,
    pub dcov: f64,
    /// `⟨Δx²⟩_ÃB` from the transfer function alone.
    pub x2_transfer: f64,
    /// `|⟨Δx²⟩_ÃB|`.
    pub d_x2: f64,
}

pub fn distortion_covariance(input: &InputState, ch: &Channel) -> Result<CovarianceDistortion> {
    distortion_covariance_with(input, ch, DerivativeRoute::Auto)
}

pub fn distortion_covariance_with(
    input: &InputState,
    ch: &Channel,
    route: DerivativeRoute,
) -> Result<CovarianceDistortion> {
    let m_in = moment_set_with(&input_charfn(input)?, route)?;
    let m_out = moment_set_with(&teleport(input, ch)?.charfn, route)?;
    let m_tr = transfer_moment_set(ch, route)?;
    let g2 = ch.gain * ch.gain;
    let dx2 = m_out.x2_central - g2 * m_in.x2_central;
    let tol = 1e-6 * m_out.x2_central.abs().max(1.0);
    if (dx2 - m_tr.x2_central).abs() > tol {
        return Err(Error::Consistency(format!(
            "output variance excess {dx2} differs from transfer variance {}",
            m_tr.x2_central
        )));
    }
    Ok(CovarianceDistortion {
        x2_in: m_in.x2_central,
        x2_out: m_out.x2_central,
        p2_in: m_in.p2_central,
        p2_out: m_out.p2_central,
        cov_in: m_in.cov_xp,
        cov_out: m_out.cov_xp,
        dx2,
        dp2: m_out.p2_central - g2 * m_in.p2_central,
        dcov: m_out.cov_xp - g2 * m_in.cov_xp,
        x2_transfer: m_tr.x2_central,
        d_x2: m_tr.x2_central.abs(),
    })
}

/// `S = ⟨Δx²⟩ / ⟨Δp²⟩`.
pub fn squeezing_ratio(f: &CharFn) -> Result<f64> {
    let set = moment_set(f)?;
    if !(set.p2_central.abs() > 1e-300) || !(set.x2_central > 0.0) {
        return Err(Error::DegenerateState(format!(
            "squeezing undefined for variances ({}, {})",
            set.x2_central, set.p2_central
        )));
    }
    Ok(set.x2_central / set.p2_central)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezingTransmission {
    pub s_in: f64,
    pub s_out: f64,
    /// `S_out / S_in`.
    pub quotient: f64,
}

pub fn squeezing_transmission(input: &InputState, ch: &Channel) -> Result<SqueezingTransmission> {
    let s_in = squeezing_ratio(&input_charfn(input)?)?;
    let s_out = squeezing_ratio(&teleport(input, ch)?.charfn)?;
    Ok(SqueezingTransmission {
        s_in,
        s_out,
        quotient: s_out / s_in,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::InputState;

    fn fd() -> DerivativeRoute {
        DerivativeRoute::FiniteDifference(DiffConfig::default())
    }

    fn chan(delta: f64, r: f64) -> Channel {
        Channel::unit_gain(SqueezedBellResource::new(delta, 0.0, r).unwrap())
    }

    #[test]
    fn vacuum_quadrature_variance_is_one() {
        let vac = input_charfn(&InputState::vacuum()).unwrap();
        assert!((raw_moment_xp(&vac, 2, 0).unwrap() - 1.0).abs() < 1e-12);
        assert!((raw_moment_xp_with(&vac, 2, 0, fd()).unwrap() - 1.0).abs() < 1e-7);
    }

    #[test]
    fn transfer_odd_moments_vanish() {
        let tau = transfer_fn(&Channel::unit_gain(SqueezedBellResource::new(0.4, 0.7, 0.9).unwrap())).unwrap();
        for route in [DerivativeRoute::ClosedForm, fd()] {
            assert!(xp_moment_complex(&tau, 1, 0, route).unwrap().norm() < 1e-8);
            assert!(xp_moment_complex(&tau, 3, 0, route).unwrap().norm() < 1e-7);
        }
    }

    #[test]
    fn normal_ordered_examples() {
        let vac = input_charfn(&InputState::vacuum()).unwrap();
        assert!(raw_moment_normal(&vac, 1, 1).unwrap().norm() < 1e-12);
        let f1 = input_charfn(&InputState::fock(1).unwrap()).unwrap();
        assert!((raw_moment_normal(&f1, 1, 1).unwrap() - 1.0).norm() < 1e-12);
        let beta = 2.12928;
        let coh = input_charfn(&InputState::coherent_real(beta).unwrap()).unwrap();
        assert!((raw_moment_normal(&coh, 1, 0).unwrap() - beta).norm() < 1e-12);
        assert!((raw_moment_normal(&coh, 0, 1).unwrap() - beta).norm() < 1e-12);
        let fdn = ordered_moment(&coh, 1, 1, Ordering::Normal, fd()).unwrap();
        assert!((fdn - beta * beta).norm() < 1e-7, "{fdn}");
        // complex amplitude: ⟨â⟩ = β, ⟨â†⟩ = β*
        let b = Complex64::new(0.7, -0.4);
        let cc = input_charfn(&InputState::coherent(b).unwrap()).unwrap();
        assert!((raw_moment_normal(&cc, 0, 1).unwrap() - b).norm() < 1e-12);
        assert!((raw_moment_normal(&cc, 1, 0).unwrap() - b.conj()).norm() < 1e-12);
    }

    #[test]
    fn moment_set_examples() {
        let coh = moment_set(&input_charfn(&InputState::coherent_real(2.12928).unwrap()).unwrap()).unwrap();
        assert!((coh.g2_zero.unwrap() - 1.0).abs() < 1e-6);
        assert!((coh.n_mean - 4.534).abs() < 1e-3);
        assert!((coh.x_mean - 2.0 * 2.12928).abs() < 1e-12);
        let f1 = moment_set(&input_charfn(&InputState::fock(1).unwrap()).unwrap()).unwrap();
        assert!(f1.g2_zero.unwrap().abs() < 1e-6);
        assert!((f1.x2_central - 3.0).abs() < 1e-12);
        let vac = moment_set(&input_charfn(&InputState::vacuum()).unwrap()).unwrap();
        assert_eq!(vac.g2_zero, None);
        let s = 0.8;
        let sq = moment_set(&input_charfn(&InputState::squeezed_vacuum(s).unwrap()).unwrap()).unwrap();
        assert!((sq.x2_central / sq.p2_central - (-4.0 * s).exp()).abs() < 1e-6);
        assert!((sq.kappa4_x - (sq.mu4_x - 3.0 * sq.x2_central.powi(2))).abs() < 1e-15);
    }

    #[test]
    fn fd_moment_set_matches_closed_form() {
        for state in [
            InputState::coherent_real(2.12928).unwrap(),
            InputState::squeezed_vacuum(1.5).unwrap(),
            InputState::fock_mixture(&[(0, 0.5), (1, 0.5)]).unwrap(),
        ] {
            let f = input_charfn(&state).unwrap();
            let a = moment_set(&f).unwrap();
            let b = moment_set_with(&f.clone().without_jet(), fd()).unwrap();
            let pairs = [
                (a.x2_central, b.x2_central),
                (a.p2_central, b.p2_central),
                (a.mu4_x, b.mu4_x),
                (a.mu4_p, b.mu4_p),
                (a.n_mean, b.n_mean),
            ];
            for (x, y) in pairs {
                assert!((x - y).abs() < 1e-6 * x.abs().max(1.0), "{state}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn closed_forms_match_jets() {
        for &(d, r) in &[(1.0, 1.25), (0.3, 0.5), (0.92388, 2.0), (0.0, 0.1)] {
            let ch = chan(d, r);
            let cf = resource_closed_forms(&ch.resource);
            let m = transfer_moment_set(&ch, DerivativeRoute::ClosedForm).unwrap();
            assert!((m.x2_central - cf.x2_ab).abs() < 1e-12);
            assert!((m.kappa4_x - cf.kappa4_ab).abs() < 1e-12);
            assert!((m.kappa4_p - cf.kappa4_ab).abs() < 1e-12);
            assert!((m.n_mean - cf.n_ab_derivative).abs() < 1e-12);
            assert!((cf.n_ab_derivative - cf.n_ab - 1.0).abs() < 1e-12);
        }
        let cf = resource_closed_forms(&SqueezedBellResource::two_mode_squeezed(1.25).unwrap());
        assert!((cf.x2_ab - 2.0 * (-2.5f64).exp()).abs() < 1e-15);
        assert_eq!(cf.kappa4_ab, 0.0);
    }

    #[test]
    fn binomial_expansion_identity_and_photon_number() {
        let f1 = input_charfn(&InputState::fock(1).unwrap()).unwrap();
        let t_in = MomentTable::quadrature(&f1, 4, DerivativeRoute::Auto).unwrap();
        let id = MomentTable::identity(TableKind::Quadrature, 4);
        for (n, m) in [(2, 0), (2, 2), (0, 4), (1, 3)] {
            let v = output_moment_binomial(&t_in, &id, n, m, 1.0).unwrap();
            assert!((v - t_in.get(n, m).unwrap()).norm() < 1e-15);
        }
        let g = 1.3;
        let ch = Channel::new(SqueezedBellResource::new(0.8, 0.0, 0.7).unwrap(), g).unwrap();
        let n_in = MomentTable::normal(&f1, 2, DerivativeRoute::Auto).unwrap();
        let n_tr = MomentTable::transfer_normal(&ch, 2, DerivativeRoute::Auto).unwrap();
        let out = output_moment_binomial(&n_in, &n_tr, 1, 1, g).unwrap();
        let direct = raw_moment_normal(&teleport(&InputState::fock(1).unwrap(), &ch).unwrap().charfn, 1, 1).unwrap();
        assert!((out - direct).norm() < 1e-12);
        // ⟨n⟩_out = g²⟨n⟩_in + ⟨n⟩_ÃB since first transfer averages vanish
        let expect = g * g + n_tr.get(1, 1).unwrap().re;
        assert!((out.re - expect).abs() < 1e-12);
        let short = MomentTable::identity(TableKind::Quadrature, 1);
        assert!(output_moment_binomial(&t_in, &short, 2, 0, 1.0).is_err());
    }

    #[test]
    fn covariance_distortion_is_input_independent() {
        let ch = chan(1.0, 1.25);
        let a = distortion_covariance(&InputState::vacuum(), &ch).unwrap();
        let b = distortion_covariance(&InputState::coherent_real(1.0).unwrap(), &ch).unwrap();
        assert!((a.dx2 - b.dx2).abs() < 1e-7);
        assert!((a.dx2 - 2.0 * (-2.5f64).exp()).abs() < 1e-6);
        assert!(a.dcov.abs() < 1e-8 && b.dcov.abs() < 1e-8);
    }

    #[test]
    fn squeezing_examples() {
        let vac = input_charfn(&InputState::vacuum()).unwrap();
        assert!((squeezing_ratio(&vac).unwrap() - 1.0).abs() < 1e-8);
        let d2 = (2.0 + 2f64.sqrt()).sqrt() / 2.0;
        let t = squeezing_transmission(&InputState::squeezed_vacuum(1.5).unwrap(), &chan(d2, 1.25)).unwrap();
        assert!(1.0 >= t.s_out && t.s_out >= t.s_in, "{t:?}");
        let t = squeezing_transmission(&InputState::fock(1).unwrap(), &chan(0.3, 0.6)).unwrap();
        assert!((t.s_out - 1.0).abs() < 1e-6);
    }

    #[test]
    fn order_limits() {
        let vac = input_charfn(&InputState::vacuum()).unwrap();
        assert!(matches!(raw_moment_xp(&vac, 3, 2), Err(Error::Capacity { .. })));
        let normal = convert_ordering(&vac, 1).unwrap();
        assert!(raw_moment_xp(&normal, 2, 0).is_err());
    }
}

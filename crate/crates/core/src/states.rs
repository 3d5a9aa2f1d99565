//! Input-state catalog, the Squeezed Bell-like resource, and the channel.
//!
//! All characteristic functions here are Wigner-ordered and carry a
//! closed-form jet so moments never depend on a finite-difference step.

use crate::error::{Error, Result};
use crate::numerics::{laguerre, Jet};
use crate::phasespace::{CharFn, Ordering, PhasePoint, JET_ORDER};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Largest photon number accepted for Fock states and distributions.
pub const N_MAX: usize = 64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Taylor coefficients in `u` of `poly(u) · e^{k u}` through `u^degree`.
fn poly_exp_series(poly: &[f64], k: f64, degree: usize) -> Vec<Complex64> {
    let mut e = vec![1.0; degree + 1];
    for j in 1..=degree {
        e[j] = e[j - 1] * k / j as f64;
    }
    (0..=degree)
        .map(|d| {
            let s: f64 = poly.iter().enumerate().take(d + 1).map(|(i, p)| p * e[d - i]).sum();
            c(s)
        })
        .collect()
}

/// Coefficients of `L_n(u)` as a polynomial in `u`.
fn laguerre_coeffs(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut binom = 1.0;
    let mut fact = 1.0;
    for k in 0..=n {
        if k > 0 {
            binom *= (n - k + 1) as f64 / k as f64;
            fact *= k as f64;
        }
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        out.push(sign * binom / fact);
    }
    out
}

/// Wigner characteristic function of the Fock state `|n⟩`:
/// `e^{−|ξ|²/2} L_n(|ξ|²)`.
pub fn fock_charfn(n: usize) -> Result<CharFn> {
    if n > N_MAX {
        return Err(Error::Capacity {
            what: "photon number",
            requested: n,
            limit: N_MAX,
        });
    }
    let jet = Jet::from_radial_series(JET_ORDER, &poly_exp_series(&laguerre_coeffs(n), -0.5, JET_ORDER / 2));
    Ok(CharFn::new(format!("fock({n})"), Ordering::Wigner, move |p| {
        let u = p.norm_sqr();
        c((-u / 2.0).exp() * laguerre(n, u))
    })
    .with_jet(jet))
}

/// One entry of a Fock mixture.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockWeight {
    pub n: usize,
    pub p: f64,
}

/// Catalog input state.
///
/// JSON form: `{"kind": "fock", "n": 1}`, `{"kind": "coherent", "re": 2.1, "im": 0.0}`,
/// `{"kind": "squeezed_vacuum", "s": 1.5}`,
/// `{"kind": "fock_mixture", "weights": [{"n": 0, "p": 0.5}, {"n": 1, "p": 0.5}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InputState {
    Fock {
        n: usize,
    },
    Coherent {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    SqueezedVacuum {
        s: f64,
    },
    FockMixture {
        weights: Vec<FockWeight>,
    },
}

impl InputState {
    pub fn fock(n: usize) -> Result<Self> {
        InputState::Fock { n }.validated()
    }

    pub fn vacuum() -> Self {
        InputState::Fock { n: 0 }
    }

    pub fn coherent(beta: Complex64) -> Result<Self> {
        InputState::Coherent {
            re: beta.re,
            im: beta.im,
        }
        .validated()
    }

    pub fn coherent_real(beta: f64) -> Result<Self> {
        InputState::coherent(c(beta))
    }

    pub fn squeezed_vacuum(s: f64) -> Result<Self> {
        InputState::SqueezedVacuum { s }.validated()
    }

    pub fn fock_mixture(weights: &[(usize, f64)]) -> Result<Self> {
        InputState::FockMixture {
            weights: weights.iter().map(|&(n, p)| FockWeight { n, p }).collect(),
        }
        .validated()
    }

    /// Check parameters, returning the state unchanged when valid.
    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            InputState::Fock { n } => {
                if *n > N_MAX {
                    return Err(Error::Capacity {
                        what: "photon number",
                        requested: *n,
                        limit: N_MAX,
                    });
                }
            }
            InputState::Coherent { re, im } => {
                if !(re.is_finite() && im.is_finite()) {
                    return Err(Error::invalid("coherent amplitude must be finite"));
                }
            }
            InputState::SqueezedVacuum { s } => {
                if !s.is_finite() || s.abs() > 20.0 {
                    return Err(Error::invalid(format!(
                        "squeezing must be finite and |s| <= 20, got {s}"
                    )));
                }
            }
            InputState::FockMixture { weights } => {
                if weights.is_empty() {
                    return Err(Error::invalid("fock mixture needs at least one component"));
                }
                let mut total = 0.0;
                for w in weights {
                    if w.n > N_MAX {
                        return Err(Error::Capacity {
                            what: "photon number",
                            requested: w.n,
                            limit: N_MAX,
                        });
                    }
                    if !(w.p >= 0.0 && w.p.is_finite()) {
                        return Err(Error::invalid(format!("mixture weight must be >= 0, got {}", w.p)));
                    }
                    total += w.p;
                }
                if (total - 1.0).abs() > 1e-12 {
                    return Err(Error::invalid(format!("mixture weights sum to {total}, not 1")));
                }
            }
        }
        Ok(())
    }

    pub fn label(&self) -> String {
        self.to_string()
    }

    /// Mean photon number from the closed forms.
    pub fn mean_photon_number(&self) -> f64 {
        match self {
            InputState::Fock { n } => *n as f64,
            InputState::Coherent { re, im } => re * re + im * im,
            InputState::SqueezedVacuum { s } => s.sinh().powi(2),
            InputState::FockMixture { weights } => weights.iter().map(|w| w.p * w.n as f64).sum(),
        }
    }

    /// `Tr ρ²` from the closed forms.
    pub fn purity(&self) -> f64 {
        match self {
            InputState::FockMixture { weights } => {
                let mut by_n = [0.0; N_MAX + 1];
                for w in weights {
                    by_n[w.n] += w.p;
                }
                by_n.iter().map(|p| p * p).sum()
            }
            _ => 1.0,
        }
    }

    /// True for states diagonal in the Fock basis.
    pub fn is_fock_diagonal(&self) -> bool {
        matches!(self, InputState::Fock { .. } | InputState::FockMixture { .. })
    }
}

impl fmt::Display for InputState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InputState::Fock { n } => write!(f, "fock:{n}"),
            InputState::Coherent { re, im } if *im == 0.0 => write!(f, "coherent:{re}"),
            InputState::Coherent { re, im } => write!(f, "coherent:{re},{im}"),
            InputState::SqueezedVacuum { s } => write!(f, "sqvac:{s}"),
            InputState::FockMixture { weights } => {
                write!(f, "mix:")?;
                for (i, w) in weights.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}@{}", w.n, w.p)?;
                }
                Ok(())
            }
        }
    }
}

impl std::str::FromStr for InputState {
    type Err = Error;

    /// `fock:N`, `coherent:RE[,IM]`, `sqvac:S`, `mix:N1@P1,N2@P2,...`
    fn from_str(text: &str) -> Result<Self> {
        let bad = || Error::invalid(format!("cannot parse state descriptor {text:?}"));
        let (kind, rest) = text.trim().split_once(':').ok_or_else(bad)?;
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
        let int = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
        match kind.trim() {
            "fock" => InputState::fock(int(rest)?),
            "coherent" => {
                let mut parts = rest.split(',');
                let re = num(parts.next().ok_or_else(bad)?)?;
                let im = parts.next().map(num).transpose()?.unwrap_or(0.0);
                if parts.next().is_some() {
                    return Err(bad());
                }
                InputState::coherent(Complex64::new(re, im))
            }
            "sqvac" => InputState::squeezed_vacuum(num(rest)?),
            "mix" => {
                let weights = rest
                    .split(',')
                    .map(|item| {
                        let (n, p) = item.split_once('@').ok_or_else(bad)?;
                        Ok((int(n)?, num(p)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                InputState::fock_mixture(&weights)
            }
            _ => Err(bad()),
        }
    }
}

/// Wigner characteristic function of a catalog state.
pub fn input_charfn(state: &InputState) -> Result<CharFn> {
    state.validate()?;
    let label = state.label();
    let f = match state {
        InputState::Fock { n } => fock_charfn(*n)?,
        InputState::Coherent { re, im } => {
            let (br, bi) = (*re, *im);
            // ξβ* − ξ*β = 2i(z β_r − w β_i)
            let exponent = &Jet::affine(
                JET_ORDER,
                c(0.0),
                Complex64::new(0.0, -2.0 * bi),
                Complex64::new(0.0, 2.0 * br),
            ) + &Jet::diagonal_quadratic(JET_ORDER, c(-0.5), c(-0.5));
            CharFn::new(label.clone(), Ordering::Wigner, move |p| {
                Complex64::new(-p.norm_sqr() / 2.0, 2.0 * (p.z * br - p.w * bi)).exp()
            })
            .with_jet(exponent.exp())
        }
        InputState::SqueezedVacuum { s } => {
            // |ξ cosh s + ξ* sinh s|² = w² e^{2s} + z² e^{−2s}
            let (a, b) = ((2.0 * s).exp(), (-2.0 * s).exp());
            let jet = Jet::diagonal_quadratic(JET_ORDER, c(-a / 2.0), c(-b / 2.0)).exp();
            CharFn::new(label.clone(), Ordering::Wigner, move |p| {
                c((-(a * p.w * p.w + b * p.z * p.z) / 2.0).exp())
            })
            .with_jet(jet)
        }
        InputState::FockMixture { weights } => {
            let parts: Vec<(f64, CharFn)> = weights
                .iter()
                .map(|w| Ok((w.p, fock_charfn(w.n)?)))
                .collect::<Result<_>>()?;
            let mut jet = Jet::zero(JET_ORDER);
            for (p, f) in &parts {
                jet = &jet + &f.jet().expect("fock jets are closed form").scale(c(*p));
            }
            CharFn::new(label.clone(), Ordering::Wigner, move |pt| {
                parts.iter().map(|(p, f)| f.eval(pt) * *p).sum()
            })
            .with_jet(jet)
        }
    };
    Ok(f.with_label(label))
}

/// Exact `P_0 .. P_N` of a catalog state.
pub fn input_photon_probs(state: &InputState, n: usize) -> Result<Vec<f64>> {
    state.validate()?;
    if n > N_MAX {
        return Err(Error::Capacity {
            what: "photon number cutoff",
            requested: n,
            limit: N_MAX,
        });
    }
    let mut probs = vec![0.0; n + 1];
    match state {
        InputState::Fock { n: k } => {
            if *k <= n {
                probs[*k] = 1.0;
            }
        }
        InputState::Coherent { re, im } => {
            let m = re * re + im * im;
            probs[0] = (-m).exp();
            for k in 1..=n {
                probs[k] = probs[k - 1] * m / k as f64;
            }
        }
        InputState::SqueezedVacuum { s } => {
            let t2 = s.tanh().powi(2);
            probs[0] = 1.0 / s.cosh();
            for k in (2..=n).step_by(2) {
                probs[k] = probs[k - 2] * (k - 1) as f64 / k as f64 * t2;
            }
        }
        InputState::FockMixture { weights } => {
            for w in weights {
                if w.n <= n {
                    probs[w.n] += w.p;
                }
            }
        }
    }
    Ok(probs)
}

/// Squeezed Bell-like resource `(Δ, θ, r)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezedBellResource {
    pub delta: f64,
    pub theta: f64,
    pub r: f64,
}

impl SqueezedBellResource {
    pub fn new(delta: f64, theta: f64, r: f64) -> Result<Self> {
        let res = SqueezedBellResource { delta, theta, r };
        res.validate()?;
        Ok(res)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.delta) {
            return Err(Error::invalid(format!("delta must lie in [0, 1], got {}", self.delta)));
        }
        if !self.theta.is_finite() {
            return Err(Error::invalid("theta must be finite"));
        }
        if !(self.r >= 0.0 && self.r.is_finite()) {
            return Err(Error::invalid(format!("r must be finite and >= 0, got {}", self.r)));
        }
        Ok(())
    }

    /// Two-mode squeezed vacuum (`Δ = 1`).
    pub fn two_mode_squeezed(r: f64) -> Result<Self> {
        Self::new(1.0, 0.0, r)
    }

    /// `√(1 − Δ²)`.
    pub fn complement(&self) -> f64 {
        (1.0 - self.delta * self.delta).max(0.0).sqrt()
    }

    /// Full two-mode characteristic function `χ_AB(ξ_A; ξ_B)`.
    pub fn two_mode_charfn(&self, xi_a: Complex64, xi_b: Complex64) -> Complex64 {
        let (ch, sh) = (self.r.cosh(), self.r.sinh());
        let a = xi_a * ch - xi_b.conj() * sh;
        let b = xi_b * ch - xi_a.conj() * sh;
        let (na, nb) = (a.norm_sqr(), b.norm_sqr());
        let d = self.delta;
        let cross = (Complex64::from_polar(1.0, self.theta) * a * b).re;
        let brace = d * d + 2.0 * d * self.complement() * cross + (1.0 - d * d) * (1.0 - na) * (1.0 - nb);
        c((-(na + nb) / 2.0).exp() * brace)
    }
}

/// Teleportation channel: resource plus measurement gain `g`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub resource: SqueezedBellResource,
    #[serde(default = "unit_gain")]
    pub gain: f64,
}

fn unit_gain() -> f64 {
    1.0
}

impl Channel {
    pub fn new(resource: SqueezedBellResource, gain: f64) -> Result<Self> {
        let ch = Channel { resource, gain };
        ch.validate()?;
        Ok(ch)
    }

    pub fn unit_gain(resource: SqueezedBellResource) -> Self {
        Channel { resource, gain: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        self.resource.validate()?;
        if !(self.gain > 0.0 && self.gain.is_finite()) {
            return Err(Error::invalid(format!("gain must be positive, got {}", self.gain)));
        }
        Ok(())
    }

    /// `(a, b)` with `ξ'_A = a ξ*`, `ξ'_B = b ξ` at the point `(g ξ*, ξ)`.
    fn mode_factors(&self) -> (f64, f64) {
        let (ch, sh) = (self.resource.r.cosh(), self.resource.r.sinh());
        (self.gain * ch - sh, ch - self.gain * sh)
    }

    /// Polynomial part of the reduced transfer function, in powers of `u = |ξ|²`,
    /// and the exponent `k` of its envelope `e^{k u}`.
    pub fn transfer_polynomial(&self) -> ([f64; 3], f64) {
        let (a, b) = self.mode_factors();
        let res = &self.resource;
        let d = res.delta;
        let one_m = 1.0 - d * d;
        let p0 = d * d + one_m;
        let p1 = 2.0 * d * res.complement() * res.theta.cos() * a * b - one_m * (a * a + b * b);
        let p2 = one_m * a * a * b * b;
        ([p0, p1, p2], -(a * a + b * b) / 2.0)
    }

    /// Reduced transfer function as a function of `u = |ξ|²`.
    pub fn transfer_at(&self, u: f64) -> f64 {
        let ([p0, p1, p2], k) = self.transfer_polynomial();
        (k * u).exp() * (p0 + u * (p1 + u * p2))
    }
}

/// One-mode transfer function `τ(ξ) = χ_AB(g ξ*; ξ)`.
///
/// For `g = 1` this is `e^{−γ}[Δ² + 2Δ√(1−Δ²) cos θ γ + (1−Δ²)(1−γ)²]` with
/// `γ = |ξ|² e^{−2r}`.
pub fn transfer_fn(ch: &Channel) -> Result<CharFn> {
    ch.validate()?;
    let (poly, k) = ch.transfer_polynomial();
    let jet = Jet::from_radial_series(JET_ORDER, &poly_exp_series(&poly, k, JET_ORDER / 2));
    let ch = *ch;
    let label = format!(
        "transfer(delta={}, theta={}, r={}, g={})",
        ch.resource.delta, ch.resource.theta, ch.resource.r, ch.gain
    );
    Ok(CharFn::new(label, Ordering::Wigner, move |p| c(ch.transfer_at(p.norm_sqr()))).with_jet(jet))
}

/// Direct two-mode evaluation of `χ_AB(g ξ*; ξ)`; the oracle for [`transfer_fn`].
pub fn transfer_two_mode(ch: &Channel, p: PhasePoint) -> Complex64 {
    ch.resource.two_mode_charfn(p.xi_conj() * ch.gain, p.xi())
}

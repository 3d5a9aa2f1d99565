//! Photon-number statistics of teleported states and overlap-based distances.
//!
//! `P_n = (1/π) ∫ d²ξ χ_out(ξ) χ_n(−ξ)` with the Fock characteristic function
//! `χ_n(ξ) = e^{−|ξ|²/2} L_n(|ξ|²)`, and more generally
//! `Tr(ρ_f ρ_g) = (1/π) ∫ d²ξ f(ξ) g(−ξ)` for Wigner-ordered `f`, `g`.

use crate::channel::OutputState;
use crate::error::{Error, Result};
use crate::numerics::laguerre_table;
use crate::numerics::quadrature::{integrate_plane, integrate_radial_kernels, QuadratureConfig};
use crate::phasespace::{CharFn, Ordering};
use crate::states::{input_charfn, input_photon_probs, InputState, N_MAX};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Slack allowed on quadrature probabilities before they count as invalid.
pub const EPS_QUAD: f64 = 1e-8;

/// Photon-number probabilities `P_0 .. P_N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhotonDistribution {
    /// Values as computed (may dip below zero by quadrature noise).
    pub probs: Vec<f64>,
    /// Copy clamped to `[0, 1]`, used by `D_N`.
    pub clamped: Vec<f64>,
    pub n: usize,
    /// `1 − Σ P_n`, floored at zero.
    pub truncation_mass_bound: f64,
}

impl PhotonDistribution {
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("empty photon distribution"));
        }
        for (k, p) in probs.iter().enumerate() {
            if !(p.is_finite() && *p >= -EPS_QUAD && *p <= 1.0 + EPS_QUAD) {
                return Err(Error::Consistency(format!("P_{k} = {p} outside [0, 1]")));
            }
        }
        let total: f64 = probs.iter().sum();
        if total > 1.0 + 1e-7 {
            return Err(Error::Consistency(format!("probabilities sum to {total} > 1")));
        }
        Ok(PhotonDistribution {
            clamped: probs.iter().map(|p| p.clamp(0.0, 1.0)).collect(),
            n: probs.len() - 1,
            truncation_mass_bound: (1.0 - total).max(0.0),
            probs,
        })
    }

    /// First `n + 1` entries.
    pub fn truncated(&self, n: usize) -> Result<Self> {
        if n > self.n {
            return Err(Error::invalid(format!("cannot truncate N = {} to {n}", self.n)));
        }
        Self::from_probs(self.probs[..=n].to_vec())
    }

    pub fn mean(&self) -> f64 {
        self.probs.iter().enumerate().map(|(k, p)| k as f64 * p).sum()
    }
}

fn check_cutoff(n: usize) -> Result<()> {
    if n > N_MAX {
        return Err(Error::Capacity {
            what: "photon number cutoff",
            requested: n,
            limit: N_MAX,
        });
    }
    Ok(())
}

/// Exact distribution of a catalog input.
pub fn input_distribution(state: &InputState, n: usize) -> Result<PhotonDistribution> {
    PhotonDistribution::from_probs(input_photon_probs(state, n)?)
}

/// `P_0 .. P_N` of any Wigner characteristic function, by quadrature.
pub fn charfn_photon_probs(f: &CharFn, n: usize, cfg: &QuadratureConfig) -> Result<PhotonDistribution> {
    check_cutoff(n)?;
    if f.ordering() != Ordering::Wigner {
        return Err(Error::invalid("photon probabilities need a Wigner-ordered function"));
    }
    let raw = integrate_radial_kernels(
        &|p| f.eval(p),
        n + 1,
        |u, out| {
            laguerre_table(n, u, out);
            let env = (-u / 2.0).exp();
            out.iter_mut().for_each(|v| *v *= env);
        },
        cfg,
    )?;
    let mut probs = Vec::with_capacity(n + 1);
    for (k, v) in raw.iter().enumerate() {
        let v = v / PI;
        if v.im.abs() > EPS_QUAD {
            return Err(Error::Consistency(format!("P_{k} has imaginary part {:e}", v.im)));
        }
        probs.push(v.re);
    }
    PhotonDistribution::from_probs(probs)
}

pub fn output_photon_probs(out: &OutputState, n: usize, cfg: &QuadratureConfig) -> Result<PhotonDistribution> {
    charfn_photon_probs(&out.charfn, n, cfg)
}

/// `D_N` on raw probability slices of equal length.
pub fn d_from_probs(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::invalid(format!(
            "distribution lengths differ: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
}

/// `D_N = (Σ_{n≤N} (P_n^out − P_n^in)²)^{1/2}` on the clamped copies.
pub fn d_functional(p_in: &PhotonDistribution, p_out: &PhotonDistribution) -> Result<f64> {
    d_from_probs(&p_in.clamped, &p_out.clamped)
}

/// `D_0, D_1, .., D_N` from one pair of distributions.
pub fn d_series(p_in: &PhotonDistribution, p_out: &PhotonDistribution) -> Result<Vec<f64>> {
    if p_in.n != p_out.n {
        return Err(Error::invalid(format!(
            "distribution lengths differ: {} vs {}",
            p_in.n, p_out.n
        )));
    }
    let mut acc = 0.0;
    Ok(p_in
        .clamped
        .iter()
        .zip(&p_out.clamped)
        .map(|(x, y)| {
            acc += (x - y) * (x - y);
            acc.sqrt()
        })
        .collect())
}

/// First-order estimate `D_{N+1} ≈ D_N + δ_N / (2 D_N)`, where
/// `δ_N = (P_{N+1}^out − P_{N+1}^in)²`. At `D_N = 0` returns `√δ_N`.
pub fn d_increment_estimate(d_n: f64, delta_next: f64) -> f64 {
    if d_n == 0.0 {
        delta_next.sqrt()
    } else {
        d_n + delta_next / (2.0 * d_n)
    }
}

/// `Tr(ρ_f ρ_g) = (1/π) ∫ d²ξ f(ξ) g(−ξ)`.
pub fn overlap(f: &CharFn, g: &CharFn, cfg: &QuadratureConfig) -> Result<f64> {
    if f.ordering() != Ordering::Wigner || g.ordering() != Ordering::Wigner {
        return Err(Error::invalid("overlap needs Wigner-ordered functions"));
    }
    let v = integrate_plane(&|p| f.eval(p) * g.eval(-p), cfg)? / PI;
    if v.im.abs() > EPS_QUAD {
        return Err(Error::Consistency(format!("overlap has imaginary part {:e}", v.im)));
    }
    Ok(v.re)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistortionMeasures {
    pub d_n: f64,
    pub fidelity: f64,
    pub frobenius: f64,
    pub purity_in: f64,
    pub purity_out: f64,
}

impl DistortionMeasures {
    /// `δ_F = (P_in + P_out − 2F)^{1/2}`.
    pub fn from_overlaps(d_n: f64, fidelity: f64, purity_in: f64, purity_out: f64) -> Self {
        DistortionMeasures {
            d_n,
            fidelity,
            frobenius: (purity_in + purity_out - 2.0 * fidelity).max(0.0).sqrt(),
            purity_in,
            purity_out,
        }
    }
}

/// Tolerance on `|D_N − δ_F|` for Fock-diagonal inputs.
pub const FOCK_EQUIVALENCE_TOL: f64 = 1e-6;

/// Input-side quantities reused across many outputs of the same input.
#[derive(Clone, Debug)]
pub struct ReferenceInput {
    pub state: InputState,
    pub charfn: CharFn,
    /// Exact distribution `P_0 .. P_N`.
    pub distribution: PhotonDistribution,
    /// `Tr ρ_in²` by quadrature.
    pub purity: f64,
}

impl ReferenceInput {
    pub fn new(state: &InputState, n: usize, cfg: &QuadratureConfig) -> Result<Self> {
        let charfn = input_charfn(state)?;
        Ok(ReferenceInput {
            state: state.clone(),
            distribution: input_distribution(state, n)?,
            purity: overlap(&charfn, &charfn, cfg)?,
            charfn,
        })
    }

    /// Distances to `out`, without the Fock-diagonal consistency check.
    /// Also returns the output distribution.
    pub fn measures(
        &self,
        out: &OutputState,
        cfg: &QuadratureConfig,
    ) -> Result<(DistortionMeasures, PhotonDistribution)> {
        let p_out = output_photon_probs(out, self.distribution.n, cfg)?;
        let d_n = d_functional(&self.distribution, &p_out)?;
        let fidelity = overlap(&self.charfn, &out.charfn, cfg)?;
        let purity_out = overlap(&out.charfn, &out.charfn, cfg)?;
        Ok((
            DistortionMeasures::from_overlaps(d_n, fidelity, self.purity, purity_out),
            p_out,
        ))
    }
}

/// For Fock-diagonal inputs `D_N` must equal the Frobenius distance.
pub fn check_fock_equivalence(input: &InputState, m: &DistortionMeasures) -> Result<()> {
    if input.is_fock_diagonal() && (m.d_n - m.frobenius).abs() > FOCK_EQUIVALENCE_TOL {
        return Err(Error::Consistency(format!(
            "Fock-diagonal input {input}: D_N = {} but Frobenius distance = {}",
            m.d_n, m.frobenius
        )));
    }
    Ok(())
}

/// Photon-statistics and overlap distances between an input and its output.
pub fn distortion_measures(
    input: &InputState,
    out: &OutputState,
    n: usize,
    cfg: &QuadratureConfig,
) -> Result<DistortionMeasures> {
    let (m, _) = ReferenceInput::new(input, n, cfg)?.measures(out, cfg)?;
    check_fock_equivalence(input, &m)?;
    Ok(m)
}

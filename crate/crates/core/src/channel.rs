//! Teleportation output: `χ_out(ξ) = τ(ξ) χ_in(g ξ)`.

use crate::error::Result;
use crate::phasespace::CharFn;
use crate::states::{input_charfn, transfer_fn, Channel, InputState};

#[derive(Clone, Debug)]
pub struct OutputState {
    pub charfn: CharFn,
    pub input: InputState,
    /// `None` when the state was passed through untouched.
    pub channel: Option<Channel>,
}

impl OutputState {
    /// The input itself, as if sent through a perfect channel.
    pub fn identity(input: &InputState) -> Result<Self> {
        Ok(OutputState {
            charfn: input_charfn(input)?,
            input: input.clone(),
            channel: None,
        })
    }

    pub fn gain(&self) -> f64 {
        self.channel.map_or(1.0, |c| c.gain)
    }
}

pub fn teleport(input: &InputState, ch: &Channel) -> Result<OutputState> {
    let tau = transfer_fn(ch)?;
    let chi_in = input_charfn(input)?.scale_argument(ch.gain);
    let label = format!("teleport({input}; delta={}, r={})", ch.resource.delta, ch.resource.r);
    Ok(OutputState {
        charfn: tau.product(&chi_in, label),
        input: input.clone(),
        channel: Some(*ch),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phasespace::PhasePoint;
    use crate::states::SqueezedBellResource;

    #[test]
    fn vacuum_through_tmsv() {
        let r: f64 = 0.8;
        let ch = Channel::unit_gain(SqueezedBellResource::two_mode_squeezed(r).unwrap());
        let out = teleport(&InputState::vacuum(), &ch).unwrap();
        for p in [PhasePoint::new(0.5, 0.5), PhasePoint::new(-1.0, 2.0)] {
            let u = p.norm_sqr();
            let expect = (-u * (0.5 + (-2.0 * r).exp())).exp();
            assert!((out.charfn.eval(p).re - expect).abs() < 1e-15);
        }
        assert!((out.charfn.eval(PhasePoint::origin()).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn output_jet_is_product_of_jets() {
        let ch = Channel::new(SqueezedBellResource::new(0.6, 0.0, 0.5).unwrap(), 1.3).unwrap();
        let out = teleport(&InputState::fock(1).unwrap(), &ch).unwrap();
        let jet = out.charfn.jet().unwrap();
        // polynomial agrees with the closure near the origin
        let p = PhasePoint::new(1e-3, -2e-3);
        assert!((jet.eval_polynomial(p.w, p.z) - out.charfn.eval(p)).norm() < 1e-13);
    }
}

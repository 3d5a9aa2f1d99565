//! D_N and 1 - F over a grid of delta, for a Fock-1 input; their minima sit
//! at different delta.

use cvteleport::numerics::QuadratureConfig;
use cvteleport::photonstats::ReferenceInput;
use cvteleport::{teleport, Channel, InputState, SqueezedBellResource};

fn main() -> cvteleport::Result<()> {
    let cfg = QuadratureConfig::default();
    let input = InputState::fock(1)?;
    let reference = ReferenceInput::new(&input, 24, &cfg)?;
    let r = 1.25;
    let mut best = [(0.0, f64::MAX); 2];
    println!("{:>6} {:>10} {:>10} {:>10}", "delta", "D_N", "1-F", "frobenius");
    for k in 0..=60 {
        let delta = 0.7 + 0.005 * k as f64;
        let out = teleport(&input, &Channel::unit_gain(SqueezedBellResource::new(delta, 0.0, r)?))?;
        let (m, _) = reference.measures(&out, &cfg)?;
        println!(
            "{delta:>6.3} {:>10.6} {:>10.6} {:>10.6}",
            m.d_n,
            1.0 - m.fidelity,
            m.frobenius
        );
        for (slot, v) in best.iter_mut().zip([m.d_n, 1.0 - m.fidelity]) {
            if v < slot.1 {
                *slot = (delta, v);
            }
        }
    }
    println!("argmin D_N at {:.3}, argmin 1-F at {:.3}", best[0].0, best[1].0);
    Ok(())
}

//! Photon-number distributions before and after teleportation, and the
//! D_N, fidelity and Frobenius distances between them.

use cvteleport::numerics::QuadratureConfig;
use cvteleport::photonstats::{check_fock_equivalence, d_series, ReferenceInput};
use cvteleport::{teleport, Channel, InputState, SqueezedBellResource};

fn main() -> cvteleport::Result<()> {
    let cfg = QuadratureConfig::default();
    let n = 24;
    for input in [
        InputState::fock_mixture(&[(0, 0.5), (1, 0.5)])?,
        InputState::coherent_real(2.12928)?,
        InputState::squeezed_vacuum(1.5)?,
    ] {
        let ch = Channel::unit_gain(SqueezedBellResource::new(0.9, 0.0, 1.0)?);
        let reference = ReferenceInput::new(&input, n, &cfg)?;
        let (m, p_out) = reference.measures(&teleport(&input, &ch)?, &cfg)?;
        println!("input {input}  <n>_out = {:.4}", p_out.mean());
        for k in 0..6 {
            println!(
                "  P_{k}: in {:.6}  out {:.6}",
                reference.distribution.probs[k], p_out.probs[k]
            );
        }
        let series = d_series(&reference.distribution, &p_out)?;
        println!(
            "  D_N {:.6} (D_{} {:.6}), F {:.6}, frobenius {:.6}, purity in/out {:.4}/{:.4}",
            m.d_n,
            n - 1,
            series[n - 1],
            m.fidelity,
            m.frobenius,
            m.purity_in,
            m.purity_out
        );
        if input.is_fock_diagonal() {
            check_fock_equivalence(&input, &m)?;
            println!("  D_N equals the Frobenius distance for this Fock-diagonal input");
        }
    }
    Ok(())
}

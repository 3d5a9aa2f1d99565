//! Evaluate input, transfer and output characteristic functions along a ray,
//! and compare the reduced transfer function with the full two-mode form.

use cvteleport::states::transfer_two_mode;
use cvteleport::SqueezedBellResource;
use cvteleport::{convert_ordering, input_charfn, teleport, transfer_fn, Channel, InputState, PhasePoint};

fn main() -> cvteleport::Result<()> {
    let input = InputState::fock(1)?;
    let ch = Channel::unit_gain(SqueezedBellResource::new(0.92, 0.0, 1.25)?);
    let chi_in = input_charfn(&input)?;
    let tau = transfer_fn(&ch)?;
    let out = teleport(&input, &ch)?;
    let normal = convert_ordering(&out.charfn, 1)?;

    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>12} {:>10}",
        "|xi|", "chi_in", "tau", "chi_out", "chi_out(N)", "2-mode err"
    );
    for k in 0..=12 {
        let p = PhasePoint::from_polar(0.25 * k as f64, 0.3);
        let err = (tau.eval(p) - transfer_two_mode(&ch, p)).norm();
        println!(
            "{:>6.2} {:>12.6} {:>12.6} {:>12.6} {:>12.6} {:>10.1e}",
            0.25 * k as f64,
            chi_in.eval(p).re,
            tau.eval(p).re,
            out.charfn.eval(p).re,
            normal.eval(p).re,
            err
        );
    }
    Ok(())
}

//! Moments and cumulants of an input, the resource transfer function and the
//! teleported output, with the additivity of cumulants made explicit.

use cvteleport::moments::{
    distortion_covariance, moment_set, resource_closed_forms, squeezing_transmission, transfer_moment_set,
    DerivativeRoute,
};
use cvteleport::{input_charfn, teleport, Channel, InputState, SqueezedBellResource};

fn main() -> cvteleport::Result<()> {
    let input = InputState::squeezed_vacuum(0.5)?;
    let ch = Channel::new(SqueezedBellResource::new(0.92388, 0.0, 1.0)?, 1.0)?;

    let m_in = moment_set(&input_charfn(&input)?)?;
    let m_tr = transfer_moment_set(&ch, DerivativeRoute::Auto)?;
    let m_out = moment_set(&teleport(&input, &ch)?.charfn)?;
    println!("{:<10} {:>12} {:>12} {:>12}", "", "input", "transfer", "output");
    for (name, a, b, c) in [
        ("<dx^2>", m_in.x2_central, m_tr.x2_central, m_out.x2_central),
        ("<dp^2>", m_in.p2_central, m_tr.p2_central, m_out.p2_central),
        ("kappa4_x", m_in.kappa4_x, m_tr.kappa4_x, m_out.kappa4_x),
        ("mu4_x", m_in.mu4_x, m_tr.mu4_x, m_out.mu4_x),
        ("<n>", m_in.n_mean, m_tr.n_mean, m_out.n_mean),
    ] {
        println!("{name:<10} {a:>12.6} {b:>12.6} {c:>12.6}");
    }

    let printed = resource_closed_forms(&ch.resource);
    println!(
        "\nprinted forms: x2 {:.6}  n {:.6}  kappa4 {:.6}",
        printed.x2_ab, printed.n_ab, printed.kappa4_ab
    );

    let cov = distortion_covariance(&input, &ch)?;
    println!("covariance added by the channel: {cov:?}");
    let sq = squeezing_transmission(&input, &ch)?;
    println!("squeezing ratio in {:.4}, out {:.4}", sq.s_in, sq.s_out);
    Ok(())
}

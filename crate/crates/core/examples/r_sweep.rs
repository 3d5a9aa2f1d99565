//! Optimal delta as a function of r for several objectives, run in parallel
//! and reported in grid order.

use cvteleport::optimize::{sweep_r, Objective, ObjectiveKind};
use cvteleport::InputState;

fn main() -> cvteleport::Result<()> {
    let template = Objective::new(ObjectiveKind::X2Transfer, 1.0).with_input(InputState::coherent_real(2.12928)?);
    let kinds = [
        ObjectiveKind::X2Transfer,
        ObjectiveKind::NTransfer,
        ObjectiveKind::Mu4X,
        ObjectiveKind::OneMinusFidelity,
    ];
    let r_grid: Vec<f64> = (1..=8).map(|k| 0.5 * k as f64).collect();
    for cell in sweep_r(&template, &kinds, &r_grid)? {
        match (cell.record, cell.error) {
            (Some(rec), _) => println!("{:<20} r={:<4} delta* {:.6}", cell.kind.name(), cell.r, rec.delta_star),
            (None, Some(e)) => println!("{:<20} r={:<4} failed: {e}", cell.kind.name(), cell.r),
            _ => unreachable!(),
        }
    }
    Ok(())
}

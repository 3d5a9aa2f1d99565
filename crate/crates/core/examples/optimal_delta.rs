//! Optimal delta for each objective at one squeezing, next to the printed
//! closed-form optima.

use cvteleport::optimize::{
    closed_form_delta, delta_opt_2, minimize_delta, ClosedFormKind, Objective, ObjectiveKind, TransferRoute,
};
use cvteleport::InputState;

fn main() -> cvteleport::Result<()> {
    let r = 1.0;
    let input = InputState::coherent_real(2.12928)?;
    for kind in ObjectiveKind::ALL {
        let rec = minimize_delta(&Objective::new(kind, r).with_input(input.clone()))?;
        println!(
            "{:<20} delta* {:.6}  value {:.6e}",
            kind.name(),
            rec.delta_star,
            rec.objective_value
        );
    }
    let k4 = Objective::new(ObjectiveKind::Kappa4Transfer, r)
        .with_route(TransferRoute::Printed)
        .with_interval(delta_opt_2(), 1.0);
    println!(
        "kappa4 above the second-moment optimum: {:.6}",
        minimize_delta(&k4)?.delta_star
    );
    println!();
    for kind in ClosedFormKind::ALL {
        println!(
            "{:<20} closed form {:.6}",
            kind.name(),
            closed_form_delta(kind, r, Some(1.5))?
        );
    }
    Ok(())
}

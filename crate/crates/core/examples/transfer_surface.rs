//! Transfer functions of the four preset resources on a line through the
//! origin; the CLI `transfer-surface` command writes the full (w, z) grid.

use cvteleport::cli::transfer_presets;
use cvteleport::{Channel, SqueezedBellResource};

fn main() -> cvteleport::Result<()> {
    let r = 1.25;
    let presets = transfer_presets(r)?;
    print!("{:>6}", "w");
    for (name, delta) in &presets {
        print!(" {:>22}", format!("{name}({delta:.3})"));
    }
    println!();
    for k in 0..=16 {
        let w = 0.25 * k as f64;
        print!("{w:>6.2}");
        for (_, delta) in &presets {
            let ch = Channel::unit_gain(SqueezedBellResource::new(*delta, 0.0, r)?);
            print!(" {:>22.6}", ch.transfer_at(w * w));
        }
        println!();
    }
    Ok(())
}

//! Type-I and type-II fusion of two Bell pairs.

use timebin::gates::fusion::{qubit_amplitudes, BellPairLayout};
use timebin::gates::{fusion_type1, fusion_type2};

fn main() -> timebin::Result<()> {
    let layout = BellPairLayout::default();
    let input = layout.input_state()?;

    let one = fusion_type1(&input, layout.a, layout.b)?;
    println!("type-I success {:.3}", one.success_probability());
    for b in one.successes() {
        let amps = qubit_amplitudes(&b.state, &[layout.x, layout.a, layout.y])?;
        println!(
            "  pattern {:?}: |000> {:+.4}, |111> {:+.4}",
            b.pattern, amps[0].re, amps[7].re
        );
    }

    let two = fusion_type2(&input, layout.a, layout.b)?;
    println!("type-II success {:.3}", two.success_probability());
    for b in two.successes() {
        let amps = qubit_amplitudes(&b.state, &[layout.x, layout.y])?;
        println!(
            "  pattern {:?}: |00> {:+.4}, |11> {:+.4}",
            b.pattern, amps[0].re, amps[3].re
        );
    }
    Ok(())
}

//! Decompose a Hadamard into the three-parameter single-qubit construction
//! and run it on a dual-bin qubit.

use std::f64::consts::FRAC_1_SQRT_2;
use std::sync::Arc;

use num_complex::Complex64;
use timebin::elements::{single_qubit_apply, su2_decompose};
use timebin::fock::{FockState, ModeIndex, ModeRegistry, Polarization};

fn main() -> timebin::Result<()> {
    let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let hadamard = [[r, r], [r, -r]];
    let gate = su2_decompose(&hadamard)?;
    println!(
        "theta = {:.6}, phi1 = {:.6}, phi2 = {:.6}",
        gate.theta, gate.phi1, gate.phi2
    );

    let registry = Arc::new(ModeRegistry::time_bins(1..=2, 1, 1));
    let early = ModeIndex::main(1, Polarization::Register);
    let late = ModeIndex::main(2, Polarization::Register);
    let input = FockState::new(registry, &[(early, 1)])?;
    let out = single_qubit_apply(&input, &gate, (1, 2))?;
    for (name, mode) in [("|0>", early), ("|1>", late)] {
        let amp = out.amplitude_of(&[(mode, 1)])?;
        println!("{name}: {:+.6}{:+.6}i", amp.re, amp.im);
    }
    Ok(())
}

//! Heralded CPhase from two nonlinear-sign stages.

use timebin::gates::klm::{klm_ancilla_distribution, KlmLayout};
use timebin::gates::{ideal_cphase, klm_cphase_heralded, state_fidelity, PolarizationQubit};

fn main() -> timebin::Result<()> {
    let (c, t) = (PolarizationQubit::d(), PolarizationQubit::d());
    let out = klm_cphase_heralded(&c, &t)?;
    println!("success probability {:.6}", out.success_probability);
    println!(
        "fidelity with CPhase {:.12}",
        state_fidelity(&out.amplitudes, &ideal_cphase(&c, &t))
    );
    for (i, a) in out.amplitudes.iter().enumerate() {
        println!("  |{}{}>: {:+.6}{:+.6}i", i / 2, i % 2, a.re, a.im);
    }

    println!("ancilla patterns (bins 5, 6, 7, 8):");
    for (pattern, p) in klm_ancilla_distribution(&c, &t, &KlmLayout::default())? {
        if p > 1e-12 {
            println!("  {pattern:?}: {p:.6}");
        }
    }
    Ok(())
}

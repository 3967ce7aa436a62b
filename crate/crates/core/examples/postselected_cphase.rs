//! The single-waveplate CPhase: encode two polarization qubits in time
//! bins, apply the gate, post-select and decode.

use timebin::gates::{
    cphase_waveplate_angle, ideal_cphase, run_postselected, state_fidelity, InterferometerPhases, PolarizationQubit,
};

fn main() -> timebin::Result<()> {
    let angle = cphase_waveplate_angle();
    println!("waveplate angle: {:.4} deg", angle.to_degrees());
    let phases = InterferometerPhases::default();
    for (c, t) in [('H', 'H'), ('V', 'V'), ('D', 'D'), ('R', 'A')] {
        let (qc, qt) = (
            PolarizationQubit::from_label(c).unwrap(),
            PolarizationQubit::from_label(t).unwrap(),
        );
        let out = run_postselected(&qc, &qt, &phases, angle, 1.0)?;
        let amps = out.pure_amplitudes().expect("one branch for identical photons");
        println!(
            "{c}{t}: success {:.6}, fidelity with CPhase {:.12}",
            out.weight(),
            state_fidelity(&amps, &ideal_cphase(&qc, &qt))
        );
    }
    Ok(())
}

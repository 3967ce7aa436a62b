//! Heralded CPhase from two nonlinear-sign (NS) stages.
//!
//! Both qubits sit in register bins. The `|1⟩` bins of control and target
//! meet on a balanced coupler, each output passes an NS stage that flips the
//! sign of its two-photon component, and an inverse coupler recombines them.
//! Each NS stage is a three-mode mesh over the signal bin, an ancilla bin
//! holding one photon, and an empty ancilla bin; it succeeds when exactly one
//! photon is found in the first ancilla bin and none in the second. Every
//! coupler is built from rotation, displacement and polarization coupling.
//!
//! Default layout: control in bins 1/2, target in bins 3/4, NS ancillas in
//! bins 5/6 and 7/8. Heralding pattern: `5:1, 6:0, 7:1, 8:0`.

use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{GateOutcome, PolarizationQubit};
use crate::elements::{couple_register, Mesh};
use crate::error::{Error, Result};
use crate::fock::{DetectionEvent, Distribution, FockState, ModeIndex, ModeRegistry, Polarization};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KlmLayout {
    /// `(|0⟩ bin, |1⟩ bin)`
    pub control: (u32, u32),
    pub target: (u32, u32),
    /// `[one-photon ancilla, empty ancilla]` for the NS stage on the control.
    pub ns_control: [u32; 2],
    pub ns_target: [u32; 2],
}

impl Default for KlmLayout {
    fn default() -> Self {
        KlmLayout {
            control: (1, 2),
            target: (3, 4),
            ns_control: [5, 6],
            ns_target: [7, 8],
        }
    }
}

impl KlmLayout {
    pub fn bins(&self) -> Vec<u32> {
        let mut bins = vec![self.control.0, self.control.1, self.target.0, self.target.1];
        bins.extend(self.ns_control);
        bins.extend(self.ns_target);
        bins
    }

    pub fn ancilla_bins(&self) -> [u32; 4] {
        [
            self.ns_control[0],
            self.ns_control[1],
            self.ns_target[0],
            self.ns_target[1],
        ]
    }
}

/// Three-mode NS unitary in (signal, ancilla photon, empty ancilla) order.
/// Conditioned on the ancilla pattern (1, 0) it maps
/// `c₀|0⟩ + c₁|1⟩ + c₂|2⟩ → ½ (c₀|0⟩ + c₁|1⟩ − c₂|2⟩)`.
pub fn ns_unitary() -> DMatrix<Complex64> {
    let r = |x: f64| Complex64::new(x, 0.0);
    let q = 2f64.powf(-0.25);
    let corner = (3.0 / SQRT_2 - 2.0).sqrt();
    let edge = 0.5 - 1.0 / SQRT_2;
    DMatrix::from_row_slice(
        3,
        3,
        &[
            r(1.0 - SQRT_2),
            r(q),
            r(corner),
            r(q),
            r(0.5),
            r(edge),
            r(corner),
            r(edge),
            r(SQRT_2 - 0.5),
        ],
    )
}

/// Qubits plus the two ancilla photons, before any element acts.
pub fn klm_input(control: &PolarizationQubit, target: &PolarizationQubit, layout: &KlmLayout) -> Result<FockState> {
    let registry = Arc::new(ModeRegistry::time_bins(layout.bins(), 1, 1));
    let reg = |bin| ModeIndex::main(bin, Polarization::Register);
    let one = Complex64::new(1.0, 0.0);
    FockState::from_photons(
        registry,
        &[
            vec![
                (reg(layout.control.0), control.alpha),
                (reg(layout.control.1), control.beta),
            ],
            vec![
                (reg(layout.target.0), target.alpha),
                (reg(layout.target.1), target.beta),
            ],
            vec![(reg(layout.ns_control[0]), one)],
            vec![(reg(layout.ns_target[0]), one)],
        ],
    )
}

/// Coupler, two NS meshes, inverse coupler.
pub fn klm_circuit(state: &FockState, layout: &KlmLayout) -> Result<FockState> {
    let ns = Mesh::decompose(&ns_unitary())?;
    let (c1, t1) = (layout.control.1, layout.target.1);
    let s = couple_register(state, c1, t1, FRAC_PI_4, 0.0)?;
    let s = ns.apply_on_register(&s, &[c1, layout.ns_control[0], layout.ns_control[1]])?;
    let s = ns.apply_on_register(&s, &[t1, layout.ns_target[0], layout.ns_target[1]])?;
    couple_register(&s, c1, t1, -FRAC_PI_4, 0.0)
}

/// Detector pattern that heralds success.
pub fn klm_herald_pattern(layout: &KlmLayout) -> Vec<DetectionEvent> {
    let reg = |bin| ModeIndex::main(bin, Polarization::Register);
    vec![
        DetectionEvent::new(reg(layout.ns_control[0]), 1),
        DetectionEvent::new(reg(layout.ns_control[1]), 0),
        DetectionEvent::new(reg(layout.ns_target[0]), 1),
        DetectionEvent::new(reg(layout.ns_target[1]), 0),
    ]
}

/// Distribution of photon counts over the four ancilla bins after the circuit.
pub fn klm_ancilla_distribution(
    control: &PolarizationQubit,
    target: &PolarizationQubit,
    layout: &KlmLayout,
) -> Result<Distribution> {
    let out = klm_circuit(&klm_input(control, target, layout)?, layout)?;
    let modes: Vec<ModeIndex> = layout
        .ancilla_bins()
        .iter()
        .map(|&b| ModeIndex::main(b, Polarization::Register))
        .collect();
    out.measure_distribution(&modes)
}

/// Run the heralded CPhase with the default layout.
pub fn klm_cphase_heralded(control: &PolarizationQubit, target: &PolarizationQubit) -> Result<GateOutcome> {
    klm_cphase_with_layout(control, target, &KlmLayout::default())
}

pub fn klm_cphase_with_layout(
    control: &PolarizationQubit,
    target: &PolarizationQubit,
    layout: &KlmLayout,
) -> Result<GateOutcome> {
    let out = klm_circuit(&klm_input(control, target, layout)?, layout)?;
    let pattern = klm_herald_pattern(layout);
    let heralded = out.herald(&pattern)?;
    if !heralded.succeeded() {
        return Ok(GateOutcome::failed());
    }
    let reg = |bin| (ModeIndex::main(bin, Polarization::Register), 1);
    let record = [reg(layout.ns_control[0]), reg(layout.ns_target[0])];
    let mut amplitudes = [Complex64::default(); 4];
    for (c, cbin) in [layout.control.0, layout.control.1].into_iter().enumerate() {
        for (t, tbin) in [layout.target.0, layout.target.1].into_iter().enumerate() {
            let mut placements = vec![reg(cbin), reg(tbin)];
            placements.extend(record);
            amplitudes[2 * c + t] = heralded.state.amplitude_of(&placements)?;
        }
    }
    let kept: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
    if (kept - 1.0).abs() > 1e-10 {
        return Err(Error::Encoding(format!(
            "heralded state leaks {:.3e} outside the qubit subspace",
            1.0 - kept
        )));
    }
    Ok(GateOutcome {
        amplitudes,
        success_probability: heralded.probability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{ideal_cphase, state_fidelity};

    #[test]
    fn ns_unitary_is_unitary() {
        let u = ns_unitary();
        let dev = (&u * u.adjoint() - DMatrix::identity(3, 3))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-14);
    }

    #[test]
    fn ns_mesh_conditional_amplitudes() {
        let mesh = Mesh::decompose(&ns_unitary()).unwrap();
        let registry = Arc::new(ModeRegistry::time_bins(1..=3, 1, 1));
        let reg = |bin| ModeIndex::main(bin, Polarization::Register);
        for n in 0..=2usize {
            let s = FockState::new(registry.clone(), &[(reg(1), n), (reg(2), 1)]).unwrap();
            let out = mesh.apply_on_register(&s, &[1, 2, 3]).unwrap();
            let amp = out.amplitude_of(&[(reg(1), n), (reg(2), 1)]).unwrap();
            let expected = if n == 2 { -0.5 } else { 0.5 };
            assert!((amp - expected).norm() < 1e-12, "n = {n}: {amp}");
        }
    }

    #[test]
    fn basis_input_stays_put() {
        let out = klm_cphase_heralded(&PolarizationQubit::h(), &PolarizationQubit::h()).unwrap();
        assert!((out.amplitudes[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn plus_plus_gets_one_minus_sign() {
        let (c, t) = (PolarizationQubit::d(), PolarizationQubit::d());
        let out = klm_cphase_heralded(&c, &t).unwrap();
        assert!((state_fidelity(&out.amplitudes, &ideal_cphase(&c, &t)) - 1.0).abs() < 1e-10);
        let reference = out.amplitudes[0];
        let signs: Vec<f64> = out.amplitudes.iter().map(|a| (a / reference).re.signum()).collect();
        assert_eq!(signs, [1.0, 1.0, 1.0, -1.0]);
        assert!((out.success_probability - 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn ancilla_outcomes_complete() {
        let d =
            klm_ancilla_distribution(&PolarizationQubit::r(), &PolarizationQubit::a(), &KlmLayout::default()).unwrap();
        let total: f64 = d.values().sum();
        assert!((total - 1.0).abs() < 1e-10);
    }
}

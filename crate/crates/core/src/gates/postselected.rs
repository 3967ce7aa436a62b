//! Post-selected CPhase in a single spatial mode.
//!
//! The control photon occupies bins 1 and 2 in H, the target bins 2 and 3 in
//! V, so only bin 2 holds both photons. One half-wave plate couples H and V
//! in every bin; at `arccos(1/√3)/2` Hong-Ou-Mandel interference in bin 2
//! flips the sign of the `|2H⟩|2V⟩` term relative to the others, and the
//! pattern "one photon in {1H, 2H}, one in {2V, 3V}" occurs with
//! probability 1/9.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use super::{GateOutcome, InterferometerPhases, PolarizationQubit, QubitPairEnsemble};
use crate::elements::half_wave_plate;
use crate::error::{Error, Result};
use crate::fock::{FockState, ModeIndex, ModeRegistry, Polarization};

const CONTROL_BINS: [u32; 2] = [1, 2];
const TARGET_BINS: [u32; 2] = [3, 2];

/// Waveplate angle (radians) at which the gate is a CPhase: `arccos(1/√3)/2`,
/// about 27.37°.
pub fn cphase_waveplate_angle() -> f64 {
    (1.0 / 3f64.sqrt()).acos() / 2.0
}

/// Convert two polarization qubits to the shared time-bin encoding:
///
/// ```text
/// control: α_C |1H⟩ + e^{iθ_C1} β_C |2H⟩
/// target:  e^{iθ_T1} α_T |3V⟩ + β_T |2V⟩
/// ```
pub fn encode_time_bin(
    control: &PolarizationQubit,
    target: &PolarizationQubit,
    phases: &InterferometerPhases,
) -> Result<FockState> {
    encode_with_overlap(control, target, phases, 1.0)
}

/// As [`encode_time_bin`], with the target photon's wavepacket in
/// `overlap·|label 0⟩ + √(1−overlap²)·|label 1⟩` while the control stays in
/// label 0. `overlap = 1` gives exactly the single-label encoding.
pub fn encode_with_overlap(
    control: &PolarizationQubit,
    target: &PolarizationQubit,
    phases: &InterferometerPhases,
    overlap: f64,
) -> Result<FockState> {
    if !(0.0..=1.0).contains(&overlap) {
        return Err(Error::domain(format!("wavepacket overlap {overlap} outside [0, 1]")));
    }
    let labels = if overlap < 1.0 { 2 } else { 1 };
    let registry = Arc::new(ModeRegistry::time_bins(1..=3, 1, labels));
    let h = |bin| ModeIndex::main(bin, Polarization::H);
    let v = |bin| ModeIndex::main(bin, Polarization::V);
    let delayed = |theta: f64| Complex64::from_polar(1.0, theta);

    let control_wf = vec![(h(1), control.alpha), (h(2), delayed(phases.theta_c1) * control.beta)];
    let target_wf: Vec<(ModeIndex, Complex64)> = [(v(3), delayed(phases.theta_t1) * target.alpha), (v(2), target.beta)]
        .into_iter()
        .flat_map(|(mode, amp)| {
            let mut parts = vec![(mode, amp * overlap)];
            if labels == 2 {
                parts.push((mode.with_internal(1), amp * (1.0 - overlap * overlap).sqrt()));
            }
            parts
        })
        .collect();
    FockState::from_photons(registry, &[control_wf, target_wf])
}

/// Apply the waveplate to every bin and keep the success pattern. The
/// result is unnormalized; its squared norm is the success probability.
pub fn postselected_state(state: &FockState, waveplate_angle: f64) -> Result<FockState> {
    let mut bins: Vec<u32> = state
        .registry()
        .modes()
        .iter()
        .filter(|m| m.spatial == 0)
        .map(|m| m.time_bin)
        .collect();
    bins.sort_unstable();
    bins.dedup();
    let mut s = state.clone();
    for bin in bins {
        s = half_wave_plate(&s, bin, waveplate_angle)?;
    }
    let control = positions(&s, &CONTROL_BINS, Polarization::H)?;
    let target = positions(&s, &TARGET_BINS, Polarization::V)?;
    let count = |occ: &[u8], group: &[usize]| group.iter().map(|&p| u32::from(occ[p])).sum::<u32>();
    Ok(s.postselect(|occ| count(occ, &control) == 1 && count(occ, &target) == 1))
}

fn positions(state: &FockState, bins: &[u32], pol: Polarization) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for &bin in bins {
        out.extend(state.registry().optical_positions(&ModeIndex::main(bin, pol))?);
    }
    Ok(out)
}

/// Run the waveplate gate on an encoded state and return the post-selected
/// amplitudes on `|1H 3V⟩, |1H 2V⟩, |2H 3V⟩, |2H 2V⟩`.
///
/// Only defined for single-label states; use [`run_postselected`] with
/// partially distinguishable photons.
pub fn postselected_cphase(state: &FockState, waveplate_angle: f64) -> Result<GateOutcome> {
    if state.registry().labels() != [0] {
        return Err(Error::domain(
            "gate amplitudes are undefined for partially distinguishable photons",
        ));
    }
    let selected = postselected_state(state, waveplate_angle)?;
    let probability = selected.norm_sqr();
    if probability == 0.0 {
        return Ok(GateOutcome::failed());
    }
    let h = |bin| (ModeIndex::main(bin, Polarization::H), 1);
    let v = |bin| (ModeIndex::main(bin, Polarization::V), 1);
    let norm = probability.sqrt();
    let mut amplitudes = [Complex64::default(); 4];
    for (slot, (c, t)) in [(1, 3), (1, 2), (2, 3), (2, 2)].into_iter().enumerate() {
        amplitudes[slot] = selected.amplitude_of(&[h(c), v(t)])? / norm;
    }
    Ok(GateOutcome {
        amplitudes,
        success_probability: probability,
    })
}

/// Convert the post-gate time-bin state back to polarization qubits.
///
/// The early control component and the late target component are reported
/// as `|H⟩`. The delayed arm adds `θ_C2` to the control's bin-1 component and
/// `θ_T2` to the target's bin-2 component, so with matched phases decoding
/// undoes encoding up to a global phase. Each distinct wavepacket-label
/// record becomes its own branch.
pub fn decode_time_bin(state: &FockState, phases: &InterferometerPhases) -> Result<QubitPairEnsemble> {
    let modes = state.registry().modes();
    let mut branches: BTreeMap<(u32, u32), [Complex64; 4]> = BTreeMap::new();
    for (occ, amp) in state.terms() {
        let mut control = None;
        let mut target = None;
        for (pos, &n) in occ.iter().enumerate() {
            if n == 0 {
                continue;
            }
            let m = modes[pos];
            let slot = match (m.spatial, m.polarization, m.time_bin) {
                (0, Polarization::Processing, 1) => (&mut control, 0),
                (0, Polarization::Processing, 2) => (&mut control, 1),
                (0, Polarization::Register, 3) => (&mut target, 0),
                (0, Polarization::Register, 2) => (&mut target, 1),
                _ => return Err(Error::Encoding(format!("photon in {m} is outside the qubit bins"))),
            };
            if n != 1 || slot.0.is_some() {
                return Err(Error::Encoding("expected one control and one target photon".into()));
            }
            *slot.0 = Some((slot.1, m.internal));
        }
        let (Some((c, c_label)), Some((t, t_label))) = (control, target) else {
            return Err(Error::Encoding("expected one control and one target photon".into()));
        };
        let mut phase = 0.0;
        if c == 0 {
            phase += phases.theta_c2;
        }
        if t == 1 {
            phase += phases.theta_t2;
        }
        branches.entry((c_label, t_label)).or_default()[2 * c + t] += amp * Complex64::from_polar(1.0, phase);
    }
    Ok(QubitPairEnsemble {
        branches: branches.into_values().collect(),
    })
}

/// Encode, apply the waveplate gate, post-select and decode. The returned
/// ensemble's weight is the success probability.
pub fn run_postselected(
    control: &PolarizationQubit,
    target: &PolarizationQubit,
    phases: &InterferometerPhases,
    waveplate_angle: f64,
    overlap: f64,
) -> Result<QubitPairEnsemble> {
    let encoded = encode_with_overlap(control, target, phases, overlap)?;
    let selected = postselected_state(&encoded, waveplate_angle)?;
    decode_time_bin(&selected, phases)
}

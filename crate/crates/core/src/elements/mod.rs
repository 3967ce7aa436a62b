//! The primitive single-spatial-mode operations on a string of time bins.
//!
//! Every element acts on spatial mode 0 and identically on every internal
//! label present in the registry. Qubits live in the register polarization:
//! logical `|0⟩` is the early bin, `|1⟩` the late bin.

mod mesh;

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{
    beam_splitter_matrix, unitarity_deviation, Distribution, FockState, ModeIndex, Polarization, TwoModeUnitary,
};

pub use mesh::{Coupler, Mesh};

/// One primitive operation. Angles are in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementOp {
    PolRotation {
        time_bin: u32,
        theta: f64,
    },
    PolCoupling {
        bin_a: u32,
        bin_b: u32,
        theta: f64,
        phi: f64,
    },
    PhaseShift {
        time_bin: u32,
        polarization: Polarization,
        phi: f64,
    },
    Displacement {
        delta: i32,
    },
    ReadOut {
        time_bin: u32,
        polarization: Polarization,
    },
}

impl ElementOp {
    pub fn validate(&self) -> Result<()> {
        match self {
            ElementOp::Displacement { delta: 0 } => Err(Error::domain("displacement by zero bins")),
            _ => Ok(()),
        }
    }

    /// Apply the element. Read-out leaves the state untouched; its outcome
    /// distribution comes from [`read_out`].
    pub fn apply(&self, state: &FockState) -> Result<FockState> {
        self.validate()?;
        match *self {
            ElementOp::PolRotation { time_bin, theta } => pol_rotation(state, time_bin, theta),
            ElementOp::PolCoupling {
                bin_a,
                bin_b,
                theta,
                phi,
            } => pol_coupling(state, bin_a, bin_b, theta, phi),
            ElementOp::PhaseShift {
                time_bin,
                polarization,
                phi,
            } => phase_shift(state, time_bin, polarization, phi),
            ElementOp::Displacement { delta } => displacement(state, delta),
            ElementOp::ReadOut { time_bin, polarization } => {
                state
                    .registry()
                    .optical_positions(&ModeIndex::main(time_bin, polarization))?;
                Ok(state.clone())
            }
        }
    }
}

/// Apply `matrix` between modes `a` and `b` for every internal label.
pub(crate) fn apply_on_all_labels(
    state: &FockState,
    a: ModeIndex,
    b: ModeIndex,
    matrix: [[Complex64; 2]; 2],
) -> Result<FockState> {
    let mut out = state.clone();
    for label in state.registry().labels() {
        let u = TwoModeUnitary::new(a.with_internal(label), b.with_internal(label), matrix)?;
        out = out.apply_two_mode(&u)?;
    }
    Ok(out)
}

/// Moves a time bin between the register and processing polarizations.
/// `theta = π/2` is a full swap.
pub fn pol_rotation(state: &FockState, time_bin: u32, theta: f64) -> Result<FockState> {
    apply_on_all_labels(
        state,
        ModeIndex::main(time_bin, Polarization::Register),
        ModeIndex::main(time_bin, Polarization::Processing),
        beam_splitter_matrix(theta, 0.0),
    )
}

/// Partial rotation between `(bin_a, Processing)` and `(bin_b, Register)`.
pub fn pol_coupling(state: &FockState, bin_a: u32, bin_b: u32, theta: f64, phi: f64) -> Result<FockState> {
    apply_on_all_labels(
        state,
        ModeIndex::main(bin_a, Polarization::Processing),
        ModeIndex::main(bin_b, Polarization::Register),
        beam_splitter_matrix(theta, phi),
    )
}

/// Half-wave plate acting on both polarizations of one bin; `angle` in radians.
pub fn half_wave_plate(state: &FockState, time_bin: u32, angle: f64) -> Result<FockState> {
    let (s, c) = (2.0 * angle).sin_cos();
    let m = [
        [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(-c, 0.0)],
    ];
    apply_on_all_labels(
        state,
        ModeIndex::main(time_bin, Polarization::H),
        ModeIndex::main(time_bin, Polarization::V),
        m,
    )
}

pub fn phase_shift(state: &FockState, time_bin: u32, polarization: Polarization, phi: f64) -> Result<FockState> {
    let mode = ModeIndex::main(time_bin, polarization);
    state.registry().optical_positions(&mode)?;
    let mut out = state.clone();
    for label in state.registry().labels() {
        out = out.apply_phase(&mode.with_internal(label), phi)?;
    }
    Ok(out)
}

/// Shift every occupied processing-polarization bin of the main mode by
/// `delta` bins; register bins stay put. Target bins missing from the
/// registry are appended.
pub fn displacement(state: &FockState, delta: i32) -> Result<FockState> {
    if delta == 0 {
        return Err(Error::domain("displacement by zero bins"));
    }
    let registry = state.registry();
    let occupied = occupied_positions(state);
    let mut moves = Vec::new();
    for (pos, mode) in registry.modes().iter().enumerate() {
        if !occupied[pos] || mode.spatial != 0 || mode.polarization != Polarization::Processing {
            continue;
        }
        if state.is_absorbed(mode) {
            return Err(Error::ModeAbsorbed(*mode));
        }
        let target = i64::from(mode.time_bin) + i64::from(delta);
        if target < 0 {
            return Err(Error::domain(format!(
                "displacing {mode} by {delta} gives a negative time bin"
            )));
        }
        moves.push((pos, mode.with_time_bin(target as u32)));
    }
    let grown = Arc::new(registry.extended(moves.iter().map(|&(_, m)| m)));
    let mut targets = Vec::with_capacity(moves.len());
    for &(pos, mode) in &moves {
        let t = grown.position(&mode)?;
        if state.is_absorbed(&mode) {
            return Err(Error::ModeAbsorbed(mode));
        }
        targets.push((pos, t));
    }
    Ok(state.map_occupations(grown, |occ, next| {
        next[..occ.len()].copy_from_slice(occ);
        for &(pos, _) in &targets {
            next[pos] = 0;
        }
        for &(pos, t) in &targets {
            next[t] = occ[pos];
        }
    }))
}

fn occupied_positions(state: &FockState) -> Vec<bool> {
    let mut occupied = vec![false; state.registry().len()];
    for (occ, _) in state.terms() {
        for (i, &n) in occ.iter().enumerate() {
            occupied[i] |= n > 0;
        }
    }
    occupied
}

/// Photon-count distribution of one bin/polarization.
pub fn read_out(state: &FockState, time_bin: u32, polarization: Polarization) -> Result<Distribution> {
    state.measure_distribution(&[ModeIndex::main(time_bin, polarization)])
}

/// Couples two register bins through the processing polarization: rotate
/// `moved` out, displace it onto `fixed`, couple, then undo the displacement
/// and rotation. Equivalent to `beam_splitter(theta, phi)` on the mode pair
/// `((moved, Register), (fixed, Register))`.
pub fn couple_register(state: &FockState, moved: u32, fixed: u32, theta: f64, phi: f64) -> Result<FockState> {
    if moved == fixed {
        return Err(Error::domain(format!("cannot couple bin {moved} with itself")));
    }
    let delta = fixed as i32 - moved as i32;
    let s = pol_rotation(state, moved, std::f64::consts::FRAC_PI_2)?;
    let s = displacement(&s, delta)?;
    let s = pol_coupling(&s, fixed, fixed, theta, phi)?;
    let s = displacement(&s, -delta)?;
    pol_rotation(&s, moved, -std::f64::consts::FRAC_PI_2)
}

/// Coupling angle and the two phases of the single-qubit construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitGate {
    pub theta: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl SingleQubitGate {
    pub fn new(theta: f64, phi1: f64, phi2: f64) -> Self {
        SingleQubitGate { theta, phi1, phi2 }
    }

    /// `phase(φ₂)·coupling(θ)·phase(φ₁)` on `(|0⟩, |1⟩)`, with phases on
    /// `|1⟩` and `coupling(θ) = [[cos θ, sin θ], [−sin θ, cos θ]]`.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        let e1 = Complex64::from_polar(1.0, self.phi1);
        let e2 = Complex64::from_polar(1.0, self.phi2);
        [[Complex64::new(c, 0.0), e1 * s], [-e2 * s, e1 * e2 * c]]
    }
}

/// Apply a single-qubit gate to the qubit held in register bins
/// `(early, late)`.
pub fn single_qubit_apply(state: &FockState, gate: &SingleQubitGate, qubit: (u32, u32)) -> Result<FockState> {
    let (early, late) = qubit;
    check_qubit_encoding(state, early, late)?;
    let delta = early as i32 - late as i32;
    let s = pol_rotation(state, late, std::f64::consts::FRAC_PI_2)?;
    let s = displacement(&s, delta)?;
    let s = phase_shift(&s, early, Polarization::Processing, gate.phi1)?;
    let s = pol_coupling(&s, early, early, gate.theta, 0.0)?;
    let s = phase_shift(&s, early, Polarization::Processing, gate.phi2)?;
    let s = displacement(&s, -delta)?;
    pol_rotation(&s, late, -std::f64::consts::FRAC_PI_2)
}

fn check_qubit_encoding(state: &FockState, early: u32, late: u32) -> Result<()> {
    if early == late {
        return Err(Error::Encoding(format!(
            "qubit needs two distinct bins, got {early} twice"
        )));
    }
    let reg = state.registry();
    let group = |bin, pol| reg.optical_positions(&ModeIndex::main(bin, pol));
    let register: Vec<usize> = [
        group(early, Polarization::Register)?,
        group(late, Polarization::Register)?,
    ]
    .concat();
    let processing: Vec<usize> = [
        group(early, Polarization::Processing)?,
        group(late, Polarization::Processing)?,
    ]
    .concat();
    for (occ, _) in state.terms() {
        let in_register: u32 = register.iter().map(|&p| u32::from(occ[p])).sum();
        let in_processing: u32 = processing.iter().map(|&p| u32::from(occ[p])).sum();
        if in_register != 1 || in_processing != 0 {
            return Err(Error::Encoding(format!(
                "expected exactly one register photon across bins {early} and {late}"
            )));
        }
    }
    Ok(())
}

/// Find `(θ, φ₁, φ₂)` reproducing `target` up to a global phase.
///
/// `θ ∈ [0, π/2]` so the reconstructed `(0,0)` entry is real and
/// non-negative. Diagonal targets put all phase into `φ₂`; anti-diagonal
/// targets set `φ₁ = 0`.
pub fn su2_decompose(target: &[[Complex64; 2]; 2]) -> Result<SingleQubitGate> {
    let deviation = unitarity_deviation(target);
    if deviation.is_nan() || deviation > 1e-10 {
        return Err(Error::NotUnitary { deviation });
    }
    const DEGENERATE: f64 = 1e-14;
    let [[t00, t01], [t10, t11]] = *target;
    let theta = t10.norm().atan2(t00.norm());
    let (phi1, phi2) = if t10.norm() < DEGENERATE {
        (0.0, t11.arg() - t00.arg())
    } else if t00.norm() < DEGENERATE {
        let global = t01.arg();
        (0.0, (-t10).arg() - global)
    } else {
        let global = t00.arg();
        (t01.arg() - global, (-t10).arg() - global)
    };
    Ok(SingleQubitGate::new(theta, wrap_angle(phi1), wrap_angle(phi2)))
}

/// Map an angle into `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut y = x.rem_euclid(TAU);
    if y > PI {
        y -= TAU;
    }
    y
}

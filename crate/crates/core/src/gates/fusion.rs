//! Type-I and type-II fusion on dual-bin qubits.
//!
//! A qubit is one photon across two register bins `(|0⟩ bin, |1⟩ bin)`. Both
//! fusions first exchange the `|1⟩` bins of the two qubits with a full
//! coupling, which plays the part of the polarizing beam splitter in the
//! spatial scheme. Type-I then measures the second qubit's bins in the
//! diagonal basis and succeeds on exactly one photon there; type-II measures
//! both qubits' bins diagonally and succeeds on one photon per qubit.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
use std::sync::Arc;

use num_complex::Complex64;

use crate::elements::couple_register;
use crate::error::{Error, Result};
use crate::fock::{DetectionEvent, FockState, ModeIndex, ModeRegistry, Polarization};

/// One detection pattern on the fusion detectors.
#[derive(Debug, Clone)]
pub struct FusionBranch {
    /// Photon counts on [`FusionResult::detected`], in order.
    pub pattern: Vec<usize>,
    pub probability: f64,
    pub success: bool,
    /// Conditional state, normalized.
    pub state: FockState,
}

#[derive(Debug, Clone)]
pub struct FusionResult {
    pub detected: Vec<ModeIndex>,
    /// Every pattern with non-zero probability.
    pub branches: Vec<FusionBranch>,
}

impl FusionResult {
    pub fn success_probability(&self) -> f64 {
        self.branches.iter().filter(|b| b.success).map(|b| b.probability).sum()
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    pub fn successes(&self) -> impl Iterator<Item = &FusionBranch> {
        self.branches.iter().filter(|b| b.success)
    }
}

fn reg(bin: u32) -> ModeIndex {
    ModeIndex::main(bin, Polarization::Register)
}

/// Exchange the `|1⟩` bins, then rotate and detect `qubit_b`.
pub fn fusion_type1(state: &FockState, qubit_a: (u32, u32), qubit_b: (u32, u32)) -> Result<FusionResult> {
    check_bins(qubit_a, qubit_b)?;
    let s = couple_register(state, qubit_a.1, qubit_b.1, FRAC_PI_2, 0.0)?;
    let s = couple_register(&s, qubit_b.1, qubit_b.0, FRAC_PI_4, 0.0)?;
    let detected = vec![reg(qubit_b.0), reg(qubit_b.1)];
    branches(&s, detected, |p| p[0] + p[1] == 1)
}

/// Exchange the `|1⟩` bins, then rotate and detect both qubits.
pub fn fusion_type2(state: &FockState, qubit_a: (u32, u32), qubit_b: (u32, u32)) -> Result<FusionResult> {
    check_bins(qubit_a, qubit_b)?;
    let s = couple_register(state, qubit_a.1, qubit_b.1, FRAC_PI_2, 0.0)?;
    let s = couple_register(&s, qubit_a.1, qubit_a.0, FRAC_PI_4, 0.0)?;
    let s = couple_register(&s, qubit_b.1, qubit_b.0, FRAC_PI_4, 0.0)?;
    let detected = vec![reg(qubit_a.0), reg(qubit_a.1), reg(qubit_b.0), reg(qubit_b.1)];
    branches(&s, detected, |p| p[0] + p[1] == 1 && p[2] + p[3] == 1)
}

fn check_bins(a: (u32, u32), b: (u32, u32)) -> Result<()> {
    let mut bins = [a.0, a.1, b.0, b.1];
    bins.sort_unstable();
    if bins.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::domain("fusion qubits must use four distinct bins"));
    }
    Ok(())
}

fn branches(state: &FockState, detected: Vec<ModeIndex>, success: impl Fn(&[usize]) -> bool) -> Result<FusionResult> {
    let dist = state.measure_distribution(&detected)?;
    let mut out = Vec::new();
    for pattern in dist.keys() {
        let events: Vec<DetectionEvent> = detected
            .iter()
            .zip(pattern)
            .map(|(&mode, &count)| DetectionEvent::new(mode, count))
            .collect();
        let heralded = state.herald(&events)?;
        if !heralded.succeeded() {
            continue;
        }
        out.push(FusionBranch {
            pattern: pattern.clone(),
            probability: heralded.probability,
            success: success(pattern),
            state: heralded.state,
        });
    }
    Ok(FusionResult {
        detected,
        branches: out,
    })
}

/// Dual-bin qubits used by the fusion demos: two `(|00⟩ + |11⟩)/√2` pairs on
/// qubits `(x, a)` and `(b, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BellPairLayout {
    pub x: (u32, u32),
    pub a: (u32, u32),
    pub b: (u32, u32),
    pub y: (u32, u32),
}

impl Default for BellPairLayout {
    fn default() -> Self {
        BellPairLayout {
            x: (1, 2),
            a: (3, 4),
            b: (5, 6),
            y: (7, 8),
        }
    }
}

impl BellPairLayout {
    pub fn bins(&self) -> Vec<u32> {
        [self.x, self.a, self.b, self.y]
            .iter()
            .flat_map(|&(p, q)| [p, q])
            .collect()
    }

    pub fn input_state(&self) -> Result<FockState> {
        let registry = Arc::new(ModeRegistry::time_bins(self.bins(), 1, 1));
        let r = FRAC_1_SQRT_2;
        let pair = |q: (u32, u32), p: (u32, u32)| {
            [
                (vec![(reg(q.0), 1), (reg(p.0), 1)], r),
                (vec![(reg(q.1), 1), (reg(p.1), 1)], r),
            ]
        };
        let mut terms = Vec::new();
        for (first, a1) in pair(self.x, self.a) {
            for (second, a2) in pair(self.b, self.y) {
                let mut occ = vec![0u8; registry.len()];
                for (mode, n) in first.iter().chain(&second) {
                    occ[registry.position(mode)?] = *n;
                }
                terms.push((occ, Complex64::new(a1 * a2, 0.0)));
            }
        }
        FockState::from_terms(registry, terms)
    }
}

/// Amplitudes of the dual-bin qubits `qubits` in `state`, indexed with the
/// first qubit as the most significant bit. Every live photon must belong to
/// one of the qubits, one photon each.
pub fn qubit_amplitudes(state: &FockState, qubits: &[(u32, u32)]) -> Result<Vec<Complex64>> {
    let registry = state.registry();
    if registry.labels() != [0] {
        return Err(Error::domain("qubit amplitudes need a single wavepacket label"));
    }
    let slots = qubits
        .iter()
        .map(|&(q0, q1)| Ok((registry.position(&reg(q0))?, registry.position(&reg(q1))?)))
        .collect::<Result<Vec<_>>>()?;
    let mut out = vec![Complex64::default(); 1 << qubits.len()];
    for (occ, amp) in state.terms() {
        let mut index = 0usize;
        let mut owned = 0usize;
        for &(p0, p1) in &slots {
            index <<= 1;
            match (occ[p0], occ[p1]) {
                (1, 0) => {}
                (0, 1) => index |= 1,
                _ => return Err(Error::Encoding("qubit bins do not hold exactly one photon".into())),
            }
            owned += 1;
        }
        let live: usize = registry
            .modes()
            .iter()
            .zip(occ)
            .filter(|(m, _)| !state.is_absorbed(m))
            .map(|(_, &n)| usize::from(n))
            .sum();
        if live != owned {
            return Err(Error::Encoding("photons outside the listed qubits".into()));
        }
        out[index] += amp;
    }
    Ok(out)
}

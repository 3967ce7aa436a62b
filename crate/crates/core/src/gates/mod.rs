//! Two-qubit gate constructions on time-bin qubits.
//!
//! * [`postselected`]: the single-waveplate CPhase between two photons whose
//!   polarization qubits are converted to time bins and back.
//! * [`klm`]: a heralded CPhase built from two nonlinear-sign stages, each
//!   consuming one ancilla photon.
//! * [`fusion`]: type-I and type-II fusion on dual-bin qubits.

pub mod fusion;
pub mod klm;
pub mod postselected;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

pub use fusion::{fusion_type1, fusion_type2, FusionBranch, FusionResult};
pub use klm::{klm_cphase_heralded, klm_herald_pattern, KlmLayout};
pub use postselected::{
    cphase_waveplate_angle, decode_time_bin, encode_time_bin, postselected_cphase, postselected_state, run_postselected,
};

/// Gate names accepted on the command line.
pub const GATE_NAMES: [&str; 4] = ["cphase-postselected", "cphase-klm", "fusion-1", "fusion-2"];

/// Single-qubit amplitudes `α|0⟩ + β|1⟩`; for photons `|0⟩ = |H⟩`, `|1⟩ = |V⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationQubit {
    pub alpha: Complex64,
    pub beta: Complex64,
}

impl PolarizationQubit {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        let norm = alpha.norm_sqr() + beta.norm_sqr();
        if norm.is_nan() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("qubit has squared norm {norm}, expected 1")));
        }
        Ok(PolarizationQubit { alpha, beta })
    }

    fn unchecked(alpha: Complex64, beta: Complex64) -> Self {
        PolarizationQubit { alpha, beta }
    }

    pub fn h() -> Self {
        Self::unchecked(Complex64::new(1.0, 0.0), Complex64::default())
    }

    pub fn v() -> Self {
        Self::unchecked(Complex64::default(), Complex64::new(1.0, 0.0))
    }

    /// `(|H⟩ + |V⟩)/√2`
    pub fn d() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self::unchecked(Complex64::new(r, 0.0), Complex64::new(r, 0.0))
    }

    /// `(|H⟩ − |V⟩)/√2`
    pub fn a() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self::unchecked(Complex64::new(r, 0.0), Complex64::new(-r, 0.0))
    }

    /// `(|H⟩ + i|V⟩)/√2`
    pub fn r() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self::unchecked(Complex64::new(r, 0.0), Complex64::new(0.0, r))
    }

    /// `(|H⟩ − i|V⟩)/√2`
    pub fn l() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Self::unchecked(Complex64::new(r, 0.0), Complex64::new(0.0, -r))
    }

    pub fn from_label(label: char) -> Option<Self> {
        Some(match label {
            'H' => Self::h(),
            'V' => Self::v(),
            'D' => Self::d(),
            'A' => Self::a(),
            'R' => Self::r(),
            'L' => Self::l(),
            _ => return None,
        })
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        [self.alpha, self.beta]
    }
}

/// Phases picked up by the delayed arm of the unbalanced interferometer,
/// on encoding (`*1`) and decoding (`*2`).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct InterferometerPhases {
    pub theta_c1: f64,
    pub theta_t1: f64,
    pub theta_c2: f64,
    pub theta_t2: f64,
}

/// A post-selected or heralded two-qubit output.
///
/// Amplitudes are ordered `|00⟩, |01⟩, |10⟩, |11⟩` as (control, target) and
/// are normalized whenever `success_probability > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateOutcome {
    #[serde(serialize_with = "serialize_amplitudes")]
    pub amplitudes: [Complex64; 4],
    pub success_probability: f64,
}

impl GateOutcome {
    pub fn failed() -> Self {
        GateOutcome {
            amplitudes: [Complex64::default(); 4],
            success_probability: 0.0,
        }
    }

    pub fn succeeded(&self) -> bool {
        self.success_probability > 0.0
    }
}

fn serialize_amplitudes<S: serde::Serializer>(amps: &[Complex64; 4], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(4))?;
    for a in amps {
        seq.serialize_element(&[a.re, a.im])?;
    }
    seq.end()
}

/// Two-qubit output that may be entangled with unobserved wavepacket labels.
///
/// Each branch is an unnormalized amplitude vector (ordering as in
/// [`GateOutcome`]) belonging to one orthogonal label record. Probabilities
/// are incoherent sums over branches.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QubitPairEnsemble {
    pub branches: Vec<[Complex64; 4]>,
}

impl QubitPairEnsemble {
    pub fn pure(amplitudes: [Complex64; 4]) -> Self {
        QubitPairEnsemble {
            branches: vec![amplitudes],
        }
    }

    /// Total squared norm across branches.
    pub fn weight(&self) -> f64 {
        self.branches.iter().flatten().map(|a| a.norm_sqr()).sum()
    }

    /// Conditional probability of projecting onto `control ⊗ target`.
    pub fn probability(&self, control: &PolarizationQubit, target: &PolarizationQubit) -> f64 {
        let weight = self.weight();
        if weight == 0.0 {
            return 0.0;
        }
        let (c, t) = (control.amplitudes(), target.amplitudes());
        let mut total = 0.0;
        for branch in &self.branches {
            let mut overlap = Complex64::default();
            for i in 0..2 {
                for j in 0..2 {
                    overlap += (c[i] * t[j]).conj() * branch[2 * i + j];
                }
            }
            total += overlap.norm_sqr();
        }
        total / weight
    }

    /// Normalized amplitudes when there is exactly one branch.
    pub fn pure_amplitudes(&self) -> Option<[Complex64; 4]> {
        match self.branches.as_slice() {
            [only] => {
                let norm = self.weight().sqrt();
                (norm > 0.0).then(|| only.map(|a| a / norm))
            }
            _ => None,
        }
    }
}

/// `|⟨a|b⟩|²` for normalized four-component vectors.
pub fn state_fidelity(a: &[Complex64; 4], b: &[Complex64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Complex64>().norm_sqr()
}

/// Ideal CPhase output for a product input.
pub fn ideal_cphase(control: &PolarizationQubit, target: &PolarizationQubit) -> [Complex64; 4] {
    let (c, t) = (control.amplitudes(), target.amplitudes());
    [c[0] * t[0], c[0] * t[1], c[1] * t[0], -(c[1] * t[1])]
}

//! Truth tables, classical fidelities, process-fidelity bounds and the
//! wavepacket-overlap model.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{FockState, ModeIndex};
use crate::gates::postselected::{cphase_waveplate_angle, encode_with_overlap, run_postselected};
use crate::gates::{klm_cphase_heralded, InterferometerPhases, PolarizationQubit, QubitPairEnsemble};

/// Probability below which an ideal-table entry counts as forbidden.
const SUPPORT_THRESHOLD: f64 = 1e-9;

/// Grid used by [`fit_alpha`].
pub const ALPHA_GRID_STEPS: u32 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Basis {
    /// `H = 0`, `V = 1`
    HV,
    /// `A = 0`, `D = 1`
    AD,
    /// `R = 0`, `L = 1`
    RL,
}

impl Basis {
    pub fn letters(self) -> [char; 2] {
        match self {
            Basis::HV => ['H', 'V'],
            Basis::AD => ['A', 'D'],
            Basis::RL => ['R', 'L'],
        }
    }

    pub fn states(self) -> [PolarizationQubit; 2] {
        self.letters()
            .map(|c| PolarizationQubit::from_label(c).expect("basis letters are valid"))
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b] = self.letters();
        write!(f, "{a}{b}")
    }
}

impl FromStr for Basis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "HV" => Ok(Basis::HV),
            "AD" => Ok(Basis::AD),
            "RL" => Ok(Basis::RL),
            _ => Err(Error::domain(format!("unknown basis {s:?}, expected HV, AD or RL"))),
        }
    }
}

/// Measurement bases for (control, target), written `HV,AD`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BasisPair {
    pub control: Basis,
    pub target: Basis,
}

impl BasisPair {
    pub const fn new(control: Basis, target: Basis) -> Self {
        BasisPair { control, target }
    }

    /// Product state for row/column index `2c + t`.
    pub fn state(&self, index: usize) -> (PolarizationQubit, PolarizationQubit) {
        (self.control.states()[index / 2], self.target.states()[index % 2])
    }

    /// Two-letter label for index `2c + t`, e.g. `VA`.
    pub fn label(&self, index: usize) -> String {
        format!(
            "{}{}",
            self.control.letters()[index / 2],
            self.target.letters()[index % 2]
        )
    }
}

impl fmt::Display for BasisPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.control, self.target)
    }
}

impl FromStr for BasisPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (c, t) = s
            .split_once(',')
            .ok_or_else(|| Error::domain(format!("basis pair {s:?} should look like HV,AD")))?;
        Ok(BasisPair::new(c.trim().parse()?, t.trim().parse()?))
    }
}

impl TryFrom<String> for BasisPair {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<BasisPair> for String {
    fn from(p: BasisPair) -> String {
        p.to_string()
    }
}

pub const HV_AD: BasisPair = BasisPair::new(Basis::HV, Basis::AD);
pub const AD_HV: BasisPair = BasisPair::new(Basis::AD, Basis::HV);
pub const AD_AD: BasisPair = BasisPair::new(Basis::AD, Basis::AD);
pub const RL_RL: BasisPair = BasisPair::new(Basis::RL, Basis::RL);

/// The three (input, output) configurations behind `F_HA`, `F_AH`, `F_AA`.
pub const FIDELITY_CONFIGURATIONS: [(BasisPair, BasisPair); 3] = [(HV_AD, HV_AD), (AD_HV, AD_HV), (AD_AD, RL_RL)];

/// Conditional probabilities `rows[input][output]`, both indexed `2c + t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthTable {
    pub basis_in: BasisPair,
    pub basis_out: BasisPair,
    pub rows: [[f64; 4]; 4],
}

impl TruthTable {
    pub fn new(basis_in: BasisPair, basis_out: BasisPair, rows: [[f64; 4]; 4]) -> Result<Self> {
        if rows.iter().flatten().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::domain("truth-table entries must be finite and non-negative"));
        }
        Ok(TruthTable {
            basis_in,
            basis_out,
            rows,
        })
    }

    pub fn probability(&self, input: usize, output: usize) -> f64 {
        self.rows[input][output]
    }

    pub fn row_sums(&self) -> [f64; 4] {
        self.rows.map(|r| r.iter().sum())
    }

    /// Entrywise L1 distance.
    pub fn l1_distance(&self, other: &TruthTable) -> f64 {
        self.rows
            .iter()
            .flatten()
            .zip(other.rows.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .sum()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("input");
        for o in 0..4 {
            out.push(',');
            out.push_str(&self.basis_out.label(o));
        }
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str(&self.basis_in.label(i));
            for p in row {
                out.push_str(&format!(",{p:.16e}"));
            }
            out.push('\n');
        }
        out
    }
}

/// A two-qubit gate on polarization qubits. The returned ensemble's weight
/// is the success probability.
pub trait TwoQubitGate {
    fn apply(&self, control: &PolarizationQubit, target: &PolarizationQubit) -> Result<QubitPairEnsemble>;
}

/// The waveplate gate with encoding and decoding interferometers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PostselectedCphase {
    /// Waveplate angle in radians.
    pub angle: f64,
    pub model: DistinguishabilityModel,
    pub phases: InterferometerPhases,
}

impl PostselectedCphase {
    pub fn new(alpha: f64) -> Result<Self> {
        Ok(PostselectedCphase {
            angle: cphase_waveplate_angle(),
            model: DistinguishabilityModel::new(alpha)?,
            phases: InterferometerPhases::default(),
        })
    }
}

impl TwoQubitGate for PostselectedCphase {
    fn apply(&self, control: &PolarizationQubit, target: &PolarizationQubit) -> Result<QubitPairEnsemble> {
        run_postselected(control, target, &self.phases, self.angle, self.model.alpha)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct IdealCphase;

impl TwoQubitGate for IdealCphase {
    fn apply(&self, control: &PolarizationQubit, target: &PolarizationQubit) -> Result<QubitPairEnsemble> {
        Ok(QubitPairEnsemble::pure(crate::gates::ideal_cphase(control, target)))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Identity;

impl TwoQubitGate for Identity {
    fn apply(&self, control: &PolarizationQubit, target: &PolarizationQubit) -> Result<QubitPairEnsemble> {
        let (c, t) = (control.amplitudes(), target.amplitudes());
        Ok(QubitPairEnsemble::pure([
            c[0] * t[0],
            c[0] * t[1],
            c[1] * t[0],
            c[1] * t[1],
        ]))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KlmCphase;

impl TwoQubitGate for KlmCphase {
    fn apply(&self, control: &PolarizationQubit, target: &PolarizationQubit) -> Result<QubitPairEnsemble> {
        let out = klm_cphase_heralded(control, target)?;
        let scale = out.success_probability.sqrt();
        Ok(QubitPairEnsemble::pure(out.amplitudes.map(|a| a * scale)))
    }
}

/// Gate lookup for the command line.
pub fn gate_by_name(name: &str, alpha: f64) -> Result<Box<dyn TwoQubitGate>> {
    Ok(match name {
        "cphase-postselected" => Box::new(PostselectedCphase::new(alpha)?),
        "cphase-klm" => Box::new(KlmCphase),
        "ideal" => Box::new(IdealCphase),
        "identity" => Box::new(Identity),
        _ => {
            return Err(Error::domain(format!(
                "no truth table for gate {name:?}; use cphase-postselected, cphase-klm, ideal or identity"
            )))
        }
    })
}

/// Run `gate` on every product input of `basis_in` and project the
/// successful output onto `basis_out`.
pub fn truth_table(gate: &dyn TwoQubitGate, basis_in: BasisPair, basis_out: BasisPair) -> Result<TruthTable> {
    let mut rows = [[0.0; 4]; 4];
    for (i, row) in rows.iter_mut().enumerate() {
        let (c, t) = basis_in.state(i);
        let ensemble = gate.apply(&c, &t)?;
        if ensemble.weight() <= 0.0 {
            return Err(Error::domain(format!(
                "gate never succeeds on input {}; its table row is undefined",
                basis_in.label(i)
            )));
        }
        for (o, p) in row.iter_mut().enumerate() {
            let (mc, mt) = basis_out.state(o);
            *p = ensemble.probability(&mc, &mt);
        }
    }
    TruthTable::new(basis_in, basis_out, rows)
}

/// Transitions an ideal CPhase allows in the given configuration, taken from
/// the support of the simulated table with indistinguishable photons.
pub fn correct_transitions(basis_in: BasisPair, basis_out: BasisPair) -> Result<[[bool; 4]; 4]> {
    if !FIDELITY_CONFIGURATIONS.contains(&(basis_in, basis_out)) {
        return Err(Error::domain(format!(
            "classical fidelity is defined for HV,AD->HV,AD, AD,HV->AD,HV and AD,AD->RL,RL, not {basis_in}->{basis_out}"
        )));
    }
    let ideal = truth_table(&PostselectedCphase::new(1.0)?, basis_in, basis_out)?;
    Ok(ideal.rows.map(|row| row.map(|p| p > SUPPORT_THRESHOLD)))
}

/// Average over inputs of the probability landing on a correct output.
pub fn classical_fidelity(table: &TruthTable) -> Result<f64> {
    let correct = correct_transitions(table.basis_in, table.basis_out)?;
    let mut total = 0.0;
    for (row, allowed) in table.rows.iter().zip(&correct) {
        total += row
            .iter()
            .zip(allowed)
            .filter(|(_, &ok)| ok)
            .map(|(p, _)| p)
            .sum::<f64>();
    }
    Ok(total / 4.0)
}

/// `(max(0, f_ha + f_ah − 1), min(f_ha, f_ah))`
pub fn process_bounds(f_ha: f64, f_ah: f64) -> Result<(f64, f64)> {
    for f in [f_ha, f_ah] {
        if !(0.0..=1.0).contains(&f) {
            return Err(Error::domain(format!("fidelity {f} outside [0, 1]")));
        }
    }
    Ok(((f_ha + f_ah - 1.0).max(0.0), f_ha.min(f_ah)))
}

/// True iff every fidelity is strictly above 2/3.
pub fn nonclassicality_check(f_ha: f64, f_ah: f64, f_aa: f64) -> bool {
    [f_ha, f_ah, f_aa].iter().all(|&f| f > 2.0 / 3.0)
}

/// Overlap `alpha` between the two photons' wavepackets. The target photon
/// is written `alpha·|label 0⟩ + √(1−alpha²)·|label 1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistinguishabilityModel {
    pub alpha: f64,
}

impl DistinguishabilityModel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::domain(format!("alpha {alpha} outside [0, 1]")));
        }
        Ok(DistinguishabilityModel { alpha })
    }

    pub fn indistinguishable() -> Self {
        DistinguishabilityModel { alpha: 1.0 }
    }

    /// Spread a label-0 wavefunction over labels 0 and 1.
    pub fn split(&self, wavefunction: &[(ModeIndex, Complex64)]) -> Vec<(ModeIndex, Complex64)> {
        let rest = (1.0 - self.alpha * self.alpha).sqrt();
        let mut out = Vec::with_capacity(2 * wavefunction.len());
        for &(mode, amp) in wavefunction {
            out.push((mode, amp * self.alpha));
            if rest > 0.0 {
                out.push((mode.with_internal(1), amp * rest));
            }
        }
        out
    }
}

/// Encoded two-photon input for the waveplate gate under `model`.
pub fn with_distinguishability(
    model: &DistinguishabilityModel,
    control: &PolarizationQubit,
    target: &PolarizationQubit,
    phases: &InterferometerPhases,
) -> Result<FockState> {
    encode_with_overlap(control, target, phases, model.alpha)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityReport {
    pub f_ha: f64,
    pub f_ah: f64,
    pub f_aa: f64,
    pub process_lower: f64,
    pub process_upper: f64,
    pub nonclassical: bool,
}

impl FidelityReport {
    pub fn from_fidelities(f_ha: f64, f_ah: f64, f_aa: f64) -> Result<Self> {
        let (process_lower, process_upper) = process_bounds(f_ha, f_ah)?;
        Ok(FidelityReport {
            f_ha,
            f_ah,
            f_aa,
            process_lower,
            process_upper,
            nonclassical: nonclassicality_check(f_ha, f_ah, f_aa),
        })
    }

    /// Report for tables in the three standard configurations, in any order.
    pub fn from_tables(tables: &[TruthTable]) -> Result<Self> {
        let mut f = [None; 3];
        for table in tables {
            let slot = FIDELITY_CONFIGURATIONS
                .iter()
                .position(|&cfg| cfg == (table.basis_in, table.basis_out))
                .ok_or_else(|| {
                    Error::domain(format!(
                        "table {}->{} is not a fidelity configuration",
                        table.basis_in, table.basis_out
                    ))
                })?;
            f[slot] = Some(classical_fidelity(table)?);
        }
        match f {
            [Some(ha), Some(ah), Some(aa)] => Self::from_fidelities(ha, ah, aa),
            _ => Err(Error::domain(
                "need one table for each of HV,AD, AD,HV and AD,AD->RL,RL",
            )),
        }
    }
}

/// Simulated waveplate-gate tables for the three standard configurations.
pub fn simulate_tables(alpha: f64) -> Result<Vec<TruthTable>> {
    let gate = PostselectedCphase::new(alpha)?;
    FIDELITY_CONFIGURATIONS
        .iter()
        .map(|&(i, o)| truth_table(&gate, i, o))
        .collect()
}

pub fn fidelity_report(alpha: f64) -> Result<FidelityReport> {
    FidelityReport::from_tables(&simulate_tables(alpha)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaFit {
    pub alpha: f64,
    pub l1_distance: f64,
}

/// Grid search over `alpha = k/1000` for the overlap whose simulated tables
/// are closest to `measured` in summed entrywise L1 distance. Ties go to the
/// larger alpha.
pub fn fit_alpha(measured: &[TruthTable]) -> Result<AlphaFit> {
    if measured.is_empty() {
        return Err(Error::domain("fit_alpha needs at least one table"));
    }
    let mut best = AlphaFit {
        alpha: f64::NAN,
        l1_distance: f64::INFINITY,
    };
    for k in 0..=ALPHA_GRID_STEPS {
        let alpha = f64::from(k) / f64::from(ALPHA_GRID_STEPS);
        let gate = PostselectedCphase::new(alpha)?;
        let mut distance = 0.0;
        for table in measured {
            distance += truth_table(&gate, table.basis_in, table.basis_out)?.l1_distance(table);
        }
        if distance <= best.l1_distance {
            best = AlphaFit {
                alpha,
                l1_distance: distance,
            };
        }
    }
    Ok(best)
}

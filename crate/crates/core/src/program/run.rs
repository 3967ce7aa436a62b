use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

use super::{Program, Statement};
use crate::analysis::DistinguishabilityModel;
use crate::elements::{displacement, half_wave_plate, phase_shift, pol_coupling, pol_rotation};
use crate::error::{Error, Result};
use crate::fock::{DetectionEvent, Distribution, FockState, ModeIndex, ModeRegistry};

pub const SCHEMA_VERSION: u32 = 1;

pub type SampleCounts = BTreeMap<Vec<usize>, u64>;

#[derive(Debug, Clone, PartialEq)]
pub struct StatementNorm {
    pub line: usize,
    pub keyword: &'static str,
    /// Squared norm of the (conditional) state after the statement.
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    /// SHA-256 of the canonical program text, hex.
    pub program_hash: String,
    /// Modes of the joint distribution, in key order.
    pub modes: Vec<ModeIndex>,
    /// Photon counts on `modes`, conditioned on every herald.
    pub distribution: Distribution,
    /// Product of the herald probabilities.
    pub success_probability: f64,
    pub norm_trace: Vec<StatementNorm>,
}

fn at(line: usize) -> impl Fn(Error) -> Error {
    move |e| Error::Runtime {
        line,
        source: Box::new(e),
    }
}

/// Execute a parsed program.
pub fn run(program: &Program) -> Result<RunResult> {
    let (bins, spatial, alpha) = program.header();
    let model = DistinguishabilityModel::new(alpha)?;
    let split = alpha < 1.0
        && program
            .statements
            .iter()
            .any(|s| matches!(s, Statement::Photon { internal: 1, .. }));
    let registry = Arc::new(ModeRegistry::time_bins(1..=bins, spatial, if split { 2 } else { 1 }));
    let mut state = FockState::vacuum(registry);
    let mut success = 1.0;
    let mut read: Vec<ModeIndex> = Vec::new();
    let mut measure_all = false;
    let mut trace = Vec::with_capacity(program.statements.len());

    for (statement, &line) in program.statements.iter().zip(&program.lines) {
        let fail = at(line);
        state = match *statement {
            Statement::Modes { .. } => state,
            Statement::Photon {
                bin,
                pol,
                spatial,
                internal,
            } => {
                let mode = ModeIndex::new(spatial, bin, pol);
                let one = Complex64::new(1.0, 0.0);
                let wavefunction = if internal == 1 {
                    model.split(&[(mode, one)])
                } else {
                    vec![(mode, one)]
                };
                state.create(&wavefunction).map_err(&fail)?.normalized()
            }
            Statement::Rot { bin, theta } => pol_rotation(&state, bin, theta).map_err(&fail)?,
            Statement::Couple {
                bin_a,
                bin_b,
                theta,
                phi,
            } => pol_coupling(&state, bin_a, bin_b, theta, phi).map_err(&fail)?,
            Statement::Hwp { bin, angle } => half_wave_plate(&state, bin, angle.to_radians()).map_err(&fail)?,
            Statement::Phase { bin, pol, phi } => phase_shift(&state, bin, pol, phi).map_err(&fail)?,
            Statement::Shift { delta } => displacement(&state, delta).map_err(&fail)?,
            Statement::Herald { bin, pol, n } => {
                let mode = ModeIndex::main(bin, pol);
                if read.contains(&mode) {
                    return Err(fail(Error::domain(format!("mode {mode} is already marked for READ"))));
                }
                let outcome = state.herald(&[DetectionEvent::new(mode, n)]).map_err(&fail)?;
                success *= outcome.probability;
                outcome.state
            }
            Statement::Read { bin, pol } => {
                let mode = ModeIndex::main(bin, pol);
                state.registry().optical_positions(&mode).map_err(&fail)?;
                if state.is_absorbed(&mode) {
                    return Err(fail(Error::ModeAbsorbed(mode)));
                }
                if read.contains(&mode) {
                    return Err(fail(Error::domain(format!("mode {mode} read twice"))));
                }
                read.push(mode);
                state
            }
            Statement::MeasureAll => {
                measure_all = true;
                state
            }
        };
        trace.push(StatementNorm {
            line,
            keyword: statement.keyword(),
            norm: state.norm_sqr(),
        });
    }

    let modes = if measure_all {
        let mut all: Vec<ModeIndex> = Vec::new();
        for mode in state.registry().modes() {
            let optical = mode.optical();
            if !state.is_absorbed(&optical) && !all.contains(&optical) {
                all.push(optical);
            }
        }
        all
    } else {
        read
    };
    let distribution = state.measure_distribution(&modes)?;
    Ok(RunResult {
        program_hash: hash_hex(&program.to_string()),
        modes,
        distribution,
        success_probability: success,
        norm_trace: trace,
    })
}

fn hash_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Multinomial counts from `shots` draws of the distribution.
pub fn sample(distribution: &Distribution, shots: u64, seed: u64) -> Result<SampleCounts> {
    let outcomes: Vec<(&Vec<usize>, f64)> = distribution.iter().map(|(k, &p)| (k, p)).collect();
    let weights = WeightedIndex::new(outcomes.iter().map(|&(_, p)| p))
        .map_err(|e| Error::domain(format!("cannot sample from distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts: SampleCounts = outcomes.iter().map(|&(k, _)| (k.clone(), 0)).collect();
    for _ in 0..shots {
        let (key, _) = outcomes[weights.sample(&mut rng)];
        *counts.get_mut(key).expect("key from outcomes") += 1;
    }
    Ok(counts)
}

/// `f64` written with 17 significant digits.
struct Float(f64);

impl Serialize for Float {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(format!("{:.16e}", self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

#[derive(Serialize)]
struct Outcome<'a> {
    counts: &'a [usize],
    probability: Float,
}

#[derive(Serialize)]
struct TraceEntry {
    line: usize,
    statement: &'static str,
    norm: Float,
}

#[derive(Serialize)]
struct SampleEntry<'a> {
    counts: &'a [usize],
    shots: u64,
}

#[derive(Serialize)]
struct Samples<'a> {
    seed: u64,
    shots: u64,
    counts: Vec<SampleEntry<'a>>,
}

#[derive(Serialize)]
struct Document<'a> {
    schema: u32,
    program_hash: &'a str,
    modes: Vec<String>,
    distribution: Vec<Outcome<'a>>,
    success_probability: Float,
    norm_trace: Vec<TraceEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<Samples<'a>>,
}

impl RunResult {
    /// Deterministic JSON: fixed field order, 17 significant digits.
    pub fn to_json(&self) -> String {
        self.render(None)
    }

    /// As [`RunResult::to_json`] with `shots` multinomial samples drawn with
    /// `seed`.
    pub fn to_json_with_samples(&self, shots: u64, seed: u64) -> Result<String> {
        let counts = sample(&self.distribution, shots, seed)?;
        Ok(self.render(Some((shots, seed, &counts))))
    }

    fn render(&self, samples: Option<(u64, u64, &SampleCounts)>) -> String {
        let doc = Document {
            schema: SCHEMA_VERSION,
            program_hash: &self.program_hash,
            modes: self.modes.iter().map(|m| m.to_string()).collect(),
            distribution: self
                .distribution
                .iter()
                .map(|(k, &p)| Outcome {
                    counts: k,
                    probability: Float(p),
                })
                .collect(),
            success_probability: Float(self.success_probability),
            norm_trace: self
                .norm_trace
                .iter()
                .map(|t| TraceEntry {
                    line: t.line,
                    statement: t.keyword,
                    norm: Float(t.norm),
                })
                .collect(),
            samples: samples.map(|(shots, seed, counts)| Samples {
                seed,
                shots,
                counts: counts
                    .iter()
                    .map(|(k, &n)| SampleEntry { counts: k, shots: n })
                    .collect(),
            }),
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("document serializes");
        out.push('\n');
        out
    }

    /// Probability of `counts` on [`RunResult::modes`].
    pub fn probability(&self, counts: &[usize]) -> f64 {
        self.distribution.get(counts).copied().unwrap_or(0.0)
    }
}

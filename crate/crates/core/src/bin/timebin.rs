use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use timebin::analysis::{fidelity_report, fit_alpha, gate_by_name, truth_table, BasisPair, FidelityReport, TruthTable};
use timebin::gates::fusion::{qubit_amplitudes, BellPairLayout};
use timebin::gates::postselected::encode_with_overlap;
use timebin::gates::{
    cphase_waveplate_angle, fusion_type1, fusion_type2, ideal_cphase, klm_cphase_heralded, postselected_cphase,
    state_fidelity, InterferometerPhases, PolarizationQubit, GATE_NAMES,
};
use timebin::{program, Error};

#[derive(Parser)]
#[command(name = "timebin", version, about = "Time-bin linear-optics simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a .tbl circuit program and emit JSON.
    Run {
        program: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also draw this many samples from the exact distribution.
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit a 4x4 truth table as CSV.
    TruthTable {
        #[arg(long, default_value = "cphase-postselected")]
        gate: String,
        #[arg(long, default_value = "HV,AD")]
        basis_in: BasisPair,
        #[arg(long, default_value = "HV,AD")]
        basis_out: BasisPair,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classical fidelities, process bounds and the non-classicality verdict,
    /// from simulation at --alpha or from measured tables.
    Fidelity {
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long)]
        measured: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the wavepacket overlap to measured tables.
    FitAlpha {
        #[arg(long)]
        measured: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one of the gate constructions on a fixed input and report it.
    Demo {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(GATE_NAMES))]
        gate: String,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Sim(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Sim(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Sim(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(value: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("value serializes");
    s.push('\n');
    s
}

fn read_tables(path: &Path) -> Result<Vec<TruthTable>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    let tables: Vec<TruthTable> =
        serde_json::from_str(&text).map_err(|e| Failure::Sim(Error::Domain(format!("{}: {e}", path.display()))))?;
    tables
        .into_iter()
        .map(|t| TruthTable::new(t.basis_in, t.basis_out, t.rows).map_err(Failure::Sim))
        .collect()
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Run {
            program,
            out,
            shots,
            seed,
        } => {
            let text = fs::read_to_string(&program).map_err(|e| Failure::Io(format!("{}: {e}", program.display())))?;
            let result = program::run(&program::parse(&text)?)?;
            let json = match shots {
                Some(n) => result.to_json_with_samples(n, seed)?,
                None => result.to_json(),
            };
            emit(out.as_deref(), &json)
        }
        Command::TruthTable {
            gate,
            basis_in,
            basis_out,
            alpha,
            out,
        } => {
            let gate = gate_by_name(&gate, alpha)?;
            emit(
                out.as_deref(),
                &truth_table(gate.as_ref(), basis_in, basis_out)?.to_csv(),
            )
        }
        Command::Fidelity { alpha, measured, out } => {
            let report = match measured {
                Some(path) => FidelityReport::from_tables(&read_tables(&path)?)?,
                None => fidelity_report(alpha)?,
            };
            emit(out.as_deref(), &pretty(&report))
        }
        Command::FitAlpha { measured, out } => emit(out.as_deref(), &pretty(&fit_alpha(&read_tables(&measured)?)?)),
        Command::Demo { gate, alpha, out } => emit(out.as_deref(), &pretty(&demo(&gate, alpha)?)),
    }
}

fn amplitudes_json(amps: &[num_complex::Complex64]) -> serde_json::Value {
    amps.iter().map(|a| json!([a.re, a.im])).collect()
}

fn demo(gate: &str, alpha: f64) -> Result<serde_json::Value, Failure> {
    let (c, t) = (PolarizationQubit::d(), PolarizationQubit::d());
    let ideal = ideal_cphase(&c, &t);
    Ok(match gate {
        "cphase-postselected" => {
            let angle = cphase_waveplate_angle();
            let encoded = encode_with_overlap(&c, &t, &InterferometerPhases::default(), 1.0)?;
            let out = postselected_cphase(&encoded, angle)?;
            json!({
                "gate": gate,
                "input": "DD",
                "waveplate_angle_deg": angle.to_degrees(),
                "success_probability": out.success_probability,
                "amplitudes": amplitudes_json(&out.amplitudes),
                "fidelity_with_ideal": state_fidelity(&out.amplitudes, &ideal),
                "alpha": alpha,
                "report": fidelity_report(alpha)?,
            })
        }
        "cphase-klm" => {
            let out = klm_cphase_heralded(&c, &t)?;
            json!({
                "gate": gate,
                "input": "DD",
                "success_probability": out.success_probability,
                "amplitudes": amplitudes_json(&out.amplitudes),
                "fidelity_with_ideal": state_fidelity(&out.amplitudes, &ideal),
            })
        }
        "fusion-1" | "fusion-2" => {
            let layout = BellPairLayout::default();
            let input = layout.input_state()?;
            let (result, kept) = if gate == "fusion-1" {
                (
                    fusion_type1(&input, layout.a, layout.b)?,
                    vec![layout.x, layout.a, layout.y],
                )
            } else {
                (fusion_type2(&input, layout.a, layout.b)?, vec![layout.x, layout.y])
            };
            let mut branches = Vec::new();
            for b in &result.branches {
                let amplitudes = if b.success {
                    amplitudes_json(&qubit_amplitudes(&b.state, &kept)?)
                } else {
                    serde_json::Value::Null
                };
                branches.push(json!({
                    "pattern": b.pattern,
                    "probability": b.probability,
                    "success": b.success,
                    "amplitudes": amplitudes,
                }));
            }
            json!({
                "gate": gate,
                "detected": result.detected.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
                "qubits": kept,
                "success_probability": result.success_probability(),
                "branches": branches,
            })
        }
        _ => unreachable!("clap restricts gate names"),
    })
}

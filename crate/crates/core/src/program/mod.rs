//! Line-oriented circuit programs.
//!
//! ```text
//! MODES bins=<int> [spatial=<int>] [alpha=<float>]
//! PHOTON bin=<int> pol=<H|V> [spatial=<int>] [internal=<0|1>]
//! ROT bin=<int> theta=<float>
//! COUPLE bin_a=<int> bin_b=<int> theta=<float> [phi=<float>]
//! HWP bin=<int> angle=<degrees>
//! PHASE bin=<int> pol=<H|V> phi=<float>
//! SHIFT delta=<int>
//! HERALD bin=<int> pol=<H|V> n=<int>
//! READ bin=<int> pol=<H|V>
//! MEASURE-ALL
//! ```
//!
//! Angles are radians except `HWP angle=`, which is in degrees. `#` starts a
//! comment. `MODES` comes first and all `PHOTON` lines precede the first
//! operation. A photon with `internal=1` is written in the header's
//! `alpha·|label 0⟩ + √(1−alpha²)·|label 1⟩` wavepacket.

mod parse;
mod run;

use std::fmt;

use crate::fock::Polarization;

pub use parse::parse;
pub use run::{run, sample, RunResult, StatementNorm};

/// One statement of a program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Statement {
    Modes {
        bins: u32,
        spatial: u32,
        alpha: f64,
    },
    Photon {
        bin: u32,
        pol: Polarization,
        spatial: u32,
        internal: u32,
    },
    Rot {
        bin: u32,
        theta: f64,
    },
    Couple {
        bin_a: u32,
        bin_b: u32,
        theta: f64,
        phi: f64,
    },
    /// `angle` in degrees.
    Hwp {
        bin: u32,
        angle: f64,
    },
    Phase {
        bin: u32,
        pol: Polarization,
        phi: f64,
    },
    Shift {
        delta: i32,
    },
    Herald {
        bin: u32,
        pol: Polarization,
        n: usize,
    },
    Read {
        bin: u32,
        pol: Polarization,
    },
    MeasureAll,
}

impl Statement {
    pub fn keyword(&self) -> &'static str {
        match self {
            Statement::Modes { .. } => "MODES",
            Statement::Photon { .. } => "PHOTON",
            Statement::Rot { .. } => "ROT",
            Statement::Couple { .. } => "COUPLE",
            Statement::Hwp { .. } => "HWP",
            Statement::Phase { .. } => "PHASE",
            Statement::Shift { .. } => "SHIFT",
            Statement::Herald { .. } => "HERALD",
            Statement::Read { .. } => "READ",
            Statement::MeasureAll => "MEASURE-ALL",
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.keyword())?;
        match *self {
            Statement::Modes { bins, spatial, alpha } => write!(f, " bins={bins} spatial={spatial} alpha={alpha:?}"),
            Statement::Photon {
                bin,
                pol,
                spatial,
                internal,
            } => write!(f, " bin={bin} pol={pol} spatial={spatial} internal={internal}"),
            Statement::Rot { bin, theta } => write!(f, " bin={bin} theta={theta:?}"),
            Statement::Couple {
                bin_a,
                bin_b,
                theta,
                phi,
            } => write!(f, " bin_a={bin_a} bin_b={bin_b} theta={theta:?} phi={phi:?}"),
            Statement::Hwp { bin, angle } => write!(f, " bin={bin} angle={angle:?}"),
            Statement::Phase { bin, pol, phi } => write!(f, " bin={bin} pol={pol} phi={phi:?}"),
            Statement::Shift { delta } => write!(f, " delta={delta}"),
            Statement::Herald { bin, pol, n } => write!(f, " bin={bin} pol={pol} n={n}"),
            Statement::Read { bin, pol } => write!(f, " bin={bin} pol={pol}"),
            Statement::MeasureAll => Ok(()),
        }
    }
}

/// A parsed program. Equality compares statements only, not source lines.
#[derive(Debug, Clone)]
pub struct Program {
    pub statements: Vec<Statement>,
    /// 1-based source line of each statement.
    pub lines: Vec<usize>,
}

impl PartialEq for Program {
    fn eq(&self, other: &Self) -> bool {
        self.statements == other.statements
    }
}

impl Program {
    /// `(bins, spatial, alpha)` from the `MODES` line.
    pub fn header(&self) -> (u32, u32, f64) {
        match self.statements.first() {
            Some(&Statement::Modes { bins, spatial, alpha }) => (bins, spatial, alpha),
            _ => unreachable!("parser guarantees a leading MODES statement"),
        }
    }

    pub fn from_statements(statements: Vec<Statement>) -> Self {
        let lines = (1..=statements.len()).collect();
        Program { statements, lines }
    }
}

/// Canonical text: one statement per line, every argument spelled out.
impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}

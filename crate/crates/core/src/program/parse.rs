use std::collections::BTreeMap;

use super::{Program, Statement};
use crate::error::{Error, Result};
use crate::fock::Polarization;

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let code = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in code.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push(Token {
                    text: &code[s..i],
                    column: code[..s].chars().count() + 1,
                });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &code[s..],
            column: code[..s].chars().count() + 1,
        });
    }
    out
}

struct Line<'a> {
    number: usize,
    keyword: Token<'a>,
    args: BTreeMap<&'a str, Token<'a>>,
}

impl<'a> Line<'a> {
    fn error(&self, token: &Token<'_>, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.number,
            column: token.column,
            token: token.text.to_string(),
            message: message.into(),
        }
    }

    fn split(number: usize, toks: Vec<Token<'a>>, allowed: &[&str]) -> Result<Self> {
        let mut iter = toks.into_iter();
        let keyword = iter.next().expect("caller skips empty lines");
        let mut line = Line {
            number,
            keyword,
            args: BTreeMap::new(),
        };
        for tok in iter {
            let Some((key, value)) = tok.text.split_once('=') else {
                return Err(line.error(&tok, "expected key=value"));
            };
            if !allowed.contains(&key) {
                return Err(line.error(&tok, format!("unknown argument `{key}` for {}", line.keyword.text)));
            }
            if line.args.contains_key(key) {
                return Err(line.error(&tok, format!("argument `{key}` given twice")));
            }
            line.args.insert(
                key,
                Token {
                    text: value,
                    column: tok.column + key.len() + 1,
                },
            );
        }
        Ok(line)
    }

    fn value<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<Option<T>> {
        match self.args.get(key) {
            None => Ok(None),
            Some(tok) => tok
                .text
                .parse()
                .map(Some)
                .map_err(|_| self.error(tok, format!("`{key}` must be {what}"))),
        }
    }

    fn required<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<T> {
        self.value(key, what)?
            .ok_or_else(|| self.error(&self.keyword, format!("{} needs `{key}=`", self.keyword.text)))
    }

    fn float(&self, key: &str) -> Result<Option<f64>> {
        let v: Option<f64> = self.value(key, "a number")?;
        if let Some(x) = v {
            if !x.is_finite() {
                return Err(self.error(&self.args[key], format!("`{key}` must be finite")));
            }
        }
        Ok(v)
    }

    fn required_float(&self, key: &str) -> Result<f64> {
        self.float(key)?
            .ok_or_else(|| self.error(&self.keyword, format!("{} needs `{key}=`", self.keyword.text)))
    }

    fn pol(&self) -> Result<Polarization> {
        let tok = self
            .args
            .get("pol")
            .ok_or_else(|| self.error(&self.keyword, format!("{} needs `pol=`", self.keyword.text)))?;
        match tok.text {
            "H" => Ok(Polarization::H),
            "V" => Ok(Polarization::V),
            _ => Err(self.error(tok, "`pol` must be H or V")),
        }
    }

    fn bin(&self, key: &str, max: u32) -> Result<u32> {
        let bin: u32 = self.required(key, "a positive integer")?;
        if bin == 0 || bin > max {
            return Err(self.error(&self.args[key], format!("bin {bin} outside 1..={max}")));
        }
        Ok(bin)
    }
}

const ARGS: &[(&str, &[&str])] = &[
    ("MODES", &["bins", "spatial", "alpha"]),
    ("PHOTON", &["bin", "pol", "spatial", "internal"]),
    ("ROT", &["bin", "theta"]),
    ("COUPLE", &["bin_a", "bin_b", "theta", "phi"]),
    ("HWP", &["bin", "angle"]),
    ("PHASE", &["bin", "pol", "phi"]),
    ("SHIFT", &["delta"]),
    ("HERALD", &["bin", "pol", "n"]),
    ("READ", &["bin", "pol"]),
    ("MEASURE-ALL", &[]),
];

/// Parse program text. Errors carry the 1-based line and column of the
/// offending token.
pub fn parse(source: &str) -> Result<Program> {
    let mut statements = Vec::new();
    let mut lines = Vec::new();
    let mut header: Option<(u32, u32)> = None;
    // Highest bin reachable once every positive shift so far is applied.
    let mut reach = 0u32;
    let mut operations_started = false;
    let mut measured_all = false;

    for (index, raw) in source.lines().enumerate() {
        let number = index + 1;
        let toks = tokens(raw);
        if toks.is_empty() {
            continue;
        }
        let allowed = ARGS
            .iter()
            .find(|(k, _)| *k == toks[0].text)
            .map(|(_, a)| *a)
            .ok_or_else(|| Error::Parse {
                line: number,
                column: toks[0].column,
                token: toks[0].text.to_string(),
                message: "unknown keyword".into(),
            })?;
        let line = Line::split(number, toks, allowed)?;
        let keyword = line.keyword.text;

        if measured_all {
            return Err(line.error(&line.keyword, "nothing may follow MEASURE-ALL"));
        }
        let Some((_, spatial_modes)) = header else {
            if keyword != "MODES" {
                return Err(line.error(&line.keyword, "program must start with MODES"));
            }
            let bins: u32 = line.required("bins", "a positive integer")?;
            if bins == 0 {
                return Err(line.error(&line.args["bins"], "need at least one bin"));
            }
            let spatial: u32 = line.value("spatial", "a positive integer")?.unwrap_or(1);
            if spatial == 0 {
                return Err(line.error(&line.args["spatial"], "need at least one spatial mode"));
            }
            let alpha = line.float("alpha")?.unwrap_or(1.0);
            if !(0.0..=1.0).contains(&alpha) {
                return Err(line.error(&line.args["alpha"], "alpha must lie in [0, 1]"));
            }
            header = Some((bins, spatial));
            reach = bins;
            statements.push(Statement::Modes { bins, spatial, alpha });
            lines.push(number);
            continue;
        };

        let statement = match keyword {
            "MODES" => return Err(line.error(&line.keyword, "MODES given twice")),
            "PHOTON" => {
                if operations_started {
                    return Err(line.error(&line.keyword, "PHOTON must come before any operation"));
                }
                let bin = line.bin("bin", reach)?;
                let pol = line.pol()?;
                let spatial: u32 = line.value("spatial", "a non-negative integer")?.unwrap_or(0);
                if spatial >= spatial_modes {
                    return Err(line.error(
                        &line.args["spatial"],
                        format!("spatial mode {spatial} outside 0..{spatial_modes}"),
                    ));
                }
                let internal: u32 = line.value("internal", "0 or 1")?.unwrap_or(0);
                if internal > 1 {
                    return Err(line.error(&line.args["internal"], "`internal` must be 0 or 1"));
                }
                Statement::Photon {
                    bin,
                    pol,
                    spatial,
                    internal,
                }
            }
            "ROT" => Statement::Rot {
                bin: line.bin("bin", reach)?,
                theta: line.required_float("theta")?,
            },
            "COUPLE" => Statement::Couple {
                bin_a: line.bin("bin_a", reach)?,
                bin_b: line.bin("bin_b", reach)?,
                theta: line.required_float("theta")?,
                phi: line.float("phi")?.unwrap_or(0.0),
            },
            "HWP" => Statement::Hwp {
                bin: line.bin("bin", reach)?,
                angle: line.required_float("angle")?,
            },
            "PHASE" => Statement::Phase {
                bin: line.bin("bin", reach)?,
                pol: line.pol()?,
                phi: line.required_float("phi")?,
            },
            "SHIFT" => {
                let delta: i32 = line.required("delta", "a non-zero integer")?;
                if delta == 0 {
                    return Err(line.error(&line.args["delta"], "`delta` must be non-zero"));
                }
                if delta > 0 {
                    reach = reach.saturating_add(delta as u32);
                }
                Statement::Shift { delta }
            }
            "HERALD" => Statement::Herald {
                bin: line.bin("bin", reach)?,
                pol: line.pol()?,
                n: line.required("n", "a non-negative integer")?,
            },
            "READ" => Statement::Read {
                bin: line.bin("bin", reach)?,
                pol: line.pol()?,
            },
            "MEASURE-ALL" => {
                measured_all = true;
                Statement::MeasureAll
            }
            _ => unreachable!("keyword table covers every statement"),
        };
        operations_started |= !matches!(statement, Statement::Photon { .. });
        statements.push(statement);
        lines.push(number);
    }

    if header.is_none() {
        return Err(Error::Parse {
            line: source.lines().count().max(1),
            column: 1,
            token: String::new(),
            message: "program has no MODES line".into(),
        });
    }
    Ok(Program { statements, lines })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_error(src: &str) -> (usize, usize, String) {
        match parse(src) {
            Err(Error::Parse {
                line, column, token, ..
            }) => (line, column, token),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn minimal_program() {
        let p = parse("MODES bins=3\nPHOTON bin=1 pol=H\nREAD bin=1 pol=H").unwrap();
        assert_eq!(p.statements.len(), 3);
        assert_eq!(p.header(), (3, 1, 1.0));
        assert_eq!(p.lines, [1, 2, 3]);
    }

    #[test]
    fn rotation_literal() {
        let p = parse("MODES bins=2\nROT bin=2 theta=1.5707963").unwrap();
        let Statement::Rot { bin, theta } = p.statements[1] else {
            panic!()
        };
        assert_eq!(bin, 2);
        assert!((theta - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn coupling_literal() {
        let p = parse("MODES bins=2\nCOUPLE bin_a=2 bin_b=2 theta=0.9553166").unwrap();
        let Statement::Couple { theta, phi, .. } = p.statements[1] else {
            panic!()
        };
        assert!((theta - (1.0 / 3f64.sqrt()).acos()).abs() < 1e-6);
        assert_eq!(phi, 0.0);
    }

    #[test]
    fn comments_and_blank_lines() {
        let p = parse("# header\n\nMODES bins=1   # one bin\n  PHOTON bin=1 pol=V\n").unwrap();
        assert_eq!(p.statements.len(), 2);
        assert_eq!(p.lines, [3, 4]);
    }

    #[test]
    fn errors_carry_location() {
        assert_eq!(parse_error("MODES bins=2\nFOO bin=1"), (2, 1, "FOO".into()));
        assert_eq!(parse_error("MODES bins=2\nROT bin=3 theta=0"), (2, 9, "3".into()));
        assert_eq!(parse_error("MODES bins=2\nROT bin=1 theta=abc"), (2, 17, "abc".into()));
        assert_eq!(parse_error("MODES bins=2\nROT bin=1"), (2, 1, "ROT".into()));
        assert_eq!(
            parse_error("MODES bins=2\nROT bin=1 theta=1 extra=2"),
            (2, 19, "extra=2".into())
        );
        assert_eq!(parse_error("MODES bins=2\nPHOTON bin=1 pol=X"), (2, 18, "X".into()));
        assert_eq!(parse_error("ROT bin=1 theta=0").0, 1);
        assert_eq!(parse_error("MODES bins=2\nROT bin=1 theta=0\nPHOTON bin=1 pol=H").0, 3);
        assert_eq!(parse_error("MODES bins=2\nMEASURE-ALL\nREAD bin=1 pol=H").0, 3);
        assert_eq!(parse_error("MODES bins=2\nSHIFT delta=0").2, "0");
        assert_eq!(parse_error("MODES bins=2 alpha=1.5").2, "1.5");
        assert_eq!(parse_error("MODES bins=2\nROT bin=1 bin=1 theta=0").2, "bin=1");
        assert_eq!(parse_error("").0, 1);
    }

    #[test]
    fn shift_extends_reach() {
        assert!(parse("MODES bins=2\nSHIFT delta=2\nREAD bin=4 pol=H").is_ok());
        assert!(parse("MODES bins=2\nSHIFT delta=-1\nREAD bin=3 pol=H").is_err());
    }

    #[test]
    fn format_round_trip() {
        let src = "MODES bins=3 alpha=0.91\nPHOTON bin=2 pol=H\nPHOTON bin=2 pol=V internal=1\n\
                   HWP bin=2 angle=27.4\nCOUPLE bin_a=1 bin_b=2 theta=0.1 phi=-3e-9\nSHIFT delta=-1\n\
                   PHASE bin=1 pol=V phi=3.141592653589793\nHERALD bin=1 pol=H n=0\nMEASURE-ALL";
        let p = parse(src).unwrap();
        let again = parse(&p.to_string()).unwrap();
        assert_eq!(p, again);
        assert_eq!(p.to_string(), again.to_string());
    }
}

//! Parse, pretty-print and run a circuit program.

use timebin::program::{parse, run};

const SOURCE: &str = "
# Hong-Ou-Mandel in one time bin
MODES bins=1
PHOTON bin=1 pol=H
PHOTON bin=1 pol=V
ROT bin=1 theta=0.7853981633974483
READ bin=1 pol=H
READ bin=1 pol=V
";

fn main() -> timebin::Result<()> {
    let source = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path).expect("readable program file"),
        None => SOURCE.to_string(),
    };
    let program = parse(&source)?;
    print!("{program}");
    print!("{}", run(&program)?.to_json());
    Ok(())
}

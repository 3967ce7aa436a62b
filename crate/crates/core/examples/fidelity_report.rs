//! Truth tables, classical fidelities and process bounds for partially
//! distinguishable photons.

use timebin::analysis::{classical_fidelity, fidelity_report, simulate_tables};

fn main() -> timebin::Result<()> {
    let alpha = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(0.91);
    for table in simulate_tables(alpha)? {
        println!(
            "{} -> {}  F = {:.4}",
            table.basis_in,
            table.basis_out,
            classical_fidelity(&table)?
        );
        print!("{}", table.to_csv());
    }
    let r = fidelity_report(alpha)?;
    println!(
        "alpha {alpha}: F_HA {:.4}, F_AH {:.4}, F_AA {:.4}",
        r.f_ha, r.f_ah, r.f_aa
    );
    println!(
        "{:.4} <= F_process <= {:.4}, nonclassical: {}",
        r.process_lower, r.process_upper, r.nonclassical
    );
    Ok(())
}

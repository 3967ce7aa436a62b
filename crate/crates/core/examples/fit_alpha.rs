//! Recover the wavepacket overlap from noisy truth tables.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use timebin::analysis::{fit_alpha, simulate_tables};

fn main() -> timebin::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(91);
    let mut tables = simulate_tables(0.91)?;
    for table in &mut tables {
        for p in table.rows.iter_mut().flatten() {
            *p = (*p + rng.random_range(-0.02..0.02)).max(0.0);
        }
    }
    let fit = fit_alpha(&tables)?;
    println!("alpha = {:.3}, L1 distance = {:.4}", fit.alpha, fit.l1_distance);
    Ok(())
}

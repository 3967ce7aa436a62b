mod common;

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use timebin::analysis::{fit_alpha, simulate_tables};
use timebin::elements::Mesh;
use timebin::fock::{FockState, ModeIndex, ModeRegistry, Polarization};

fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<C> {
    let g = DMatrix::from_fn(n, n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    // Fix the phases of R's diagonal so Q is spread evenly.
    let d = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            r[(i, i)] / r[(i, i)].norm()
        } else {
            C::default()
        }
    });
    q * d
}

#[test]
fn mesh_on_register_bins_matches_permanents() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let reg = |b: u32| ModeIndex::main(b, Polarization::Register);
    for n in 2..=4usize {
        let u = random_unitary(n, &mut rng);
        let mesh = Mesh::decompose(&u).unwrap();
        let bins: Vec<u32> = (1..=n as u32).collect();
        let registry = Arc::new(ModeRegistry::time_bins(bins.iter().copied(), 1, 1));
        for photons in 1..=3usize {
            let input = patterns(n, photons)[rng.random_range(0..patterns(n, photons).len())].clone();
            let placements: Vec<(ModeIndex, usize)> = input
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| (reg(bins[i]), k))
                .collect();
            let state = FockState::new(registry.clone(), &placements).unwrap();
            let out = mesh.apply_on_register(&state, &bins).unwrap();
            for pattern in patterns(n, photons) {
                let placements: Vec<(ModeIndex, usize)> = pattern
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| (reg(bins[i]), k))
                    .collect();
                let got = out.amplitude_of(&placements).unwrap();
                let want = amplitude(&u, &input, &pattern);
                assert!(
                    (got - want).norm() < 1e-10,
                    "n {n}, {input:?} -> {pattern:?}: {got} vs {want}"
                );
            }
        }
    }
}

#[test]
fn fit_alpha_recovers_grid_points() {
    for alpha in [0.25, 0.5, 1.0] {
        let fit = fit_alpha(&simulate_tables(alpha).unwrap()).unwrap();
        assert_eq!(fit.alpha, alpha);
        assert_eq!(fit.l1_distance, 0.0);
    }
}

#[test]
fn fit_alpha_tolerates_table_noise() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut tables = simulate_tables(0.91).unwrap();
    for table in &mut tables {
        for p in table.rows.iter_mut().flatten() {
            *p = (*p + rng.random_range(-0.02..0.02)).max(0.0);
        }
    }
    let fit = fit_alpha(&tables).unwrap();
    assert!((fit.alpha - 0.91).abs() <= 0.03, "{fit:?}");
}

#[test]
fn fit_alpha_accepts_table_subsets() {
    let tables = simulate_tables(0.8).unwrap();
    let fit = fit_alpha(&tables[2..]).unwrap();
    assert_eq!(fit.alpha, 0.8);
}

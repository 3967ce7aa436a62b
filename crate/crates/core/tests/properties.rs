use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;

use timebin::analysis::{classical_fidelity, nonclassicality_check, process_bounds, TruthTable, HV_AD};
use timebin::elements::{ElementOp, SingleQubitGate};
use timebin::fock::{FockState, ModeIndex, ModeRegistry, Polarization};
use timebin::program::{parse, Program, Statement};

fn pol() -> impl Strategy<Value = Polarization> {
    prop_oneof![Just(Polarization::H), Just(Polarization::V)]
}

fn element() -> impl Strategy<Value = ElementOp> {
    prop_oneof![
        (1..=3u32, -PI..PI).prop_map(|(time_bin, theta)| ElementOp::PolRotation { time_bin, theta }),
        (1..=3u32, 1..=3u32, -PI..PI, -PI..PI).prop_map(|(bin_a, bin_b, theta, phi)| ElementOp::PolCoupling {
            bin_a,
            bin_b,
            theta,
            phi
        }),
        (1..=3u32, pol(), -PI..PI).prop_map(|(time_bin, polarization, phi)| ElementOp::PhaseShift {
            time_bin,
            polarization,
            phi
        }),
    ]
}

fn photon() -> impl Strategy<Value = (u32, Polarization)> {
    (1..=3u32, pol())
}

proptest! {
    #[test]
    fn elements_preserve_norm_and_photon_number(
        photons in prop::collection::vec(photon(), 1..=3),
        ops in prop::collection::vec(element(), 0..=10),
    ) {
        let registry = Arc::new(ModeRegistry::time_bins(1..=3, 1, 1));
        let mut counts = std::collections::BTreeMap::new();
        for (bin, p) in &photons {
            *counts.entry(ModeIndex::main(*bin, *p)).or_insert(0usize) += 1;
        }
        let placements: Vec<_> = counts.into_iter().collect();
        let mut state = FockState::new(registry, &placements).unwrap();
        for op in &ops {
            state = op.apply(&state).unwrap();
        }
        prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-10);
        prop_assert_eq!(state.photon_count(), photons.len());
        for (occ, _) in state.terms() {
            prop_assert_eq!(occ.iter().map(|&n| n as usize).sum::<usize>(), photons.len());
        }
    }

    #[test]
    fn single_qubit_matrix_is_unitary(theta in -PI..PI, p1 in -PI..PI, p2 in -PI..PI) {
        let m = SingleQubitGate::new(theta, p1, p2).matrix();
        prop_assert!(timebin::fock::unitarity_deviation(&m) < 1e-12);
    }

    #[test]
    fn process_bounds_ordered(a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
        let (lo, hi) = process_bounds(a, b).unwrap();
        prop_assert!(lo <= hi + 1e-12);
        prop_assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
    }

    #[test]
    fn nonclassicality_is_plain_comparison(a in 0.0..=1.0f64, b in 0.0..=1.0f64, c in 0.0..=1.0f64) {
        let third = 2.0 / 3.0;
        prop_assert_eq!(nonclassicality_check(a, b, c), a > third && b > third && c > third);
    }

    #[test]
    fn fidelity_invariant_under_consistent_relabeling(rows in prop::array::uniform4(prop::array::uniform4(0.0..1.0f64))) {
        // Exchange VA and VD on both inputs and outputs; the correct set maps to itself.
        let swap = [0usize, 1, 3, 2];
        let mut relabeled = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                relabeled[swap[i]][swap[j]] = rows[i][j];
            }
        }
        let a = classical_fidelity(&TruthTable::new(HV_AD, HV_AD, rows).unwrap()).unwrap();
        let b = classical_fidelity(&TruthTable::new(HV_AD, HV_AD, relabeled).unwrap()).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn parse_format_parse(statements in prop::collection::vec(statement(), 0..12), photons in prop::collection::vec(photon_statement(), 0..3)) {
        let mut all = vec![Statement::Modes { bins: 4, spatial: 2, alpha: 0.5 }];
        all.extend(photons);
        all.extend(statements);
        let program = Program::from_statements(all);
        let parsed = parse(&program.to_string()).unwrap();
        prop_assert_eq!(&parsed, &program);
        prop_assert_eq!(parse(&parsed.to_string()).unwrap(), parsed);
    }
}

fn photon_statement() -> impl Strategy<Value = Statement> {
    (1..=4u32, pol(), 0..2u32, 0..=1u32).prop_map(|(bin, pol, spatial, internal)| Statement::Photon {
        bin,
        pol,
        spatial,
        internal,
    })
}

fn statement() -> impl Strategy<Value = Statement> {
    let angle = -10.0..10.0f64;
    prop_oneof![
        (1..=4u32, angle.clone()).prop_map(|(bin, theta)| Statement::Rot { bin, theta }),
        (1..=4u32, 1..=4u32, angle.clone(), angle.clone()).prop_map(|(bin_a, bin_b, theta, phi)| Statement::Couple {
            bin_a,
            bin_b,
            theta,
            phi
        }),
        (1..=4u32, -90.0..90.0f64).prop_map(|(bin, angle)| Statement::Hwp { bin, angle }),
        (1..=4u32, pol(), angle).prop_map(|(bin, pol, phi)| Statement::Phase { bin, pol, phi }),
        (1..=4u32, pol(), 0..3usize).prop_map(|(bin, pol, n)| Statement::Herald { bin, pol, n }),
        (1..=4u32, pol()).prop_map(|(bin, pol)| Statement::Read { bin, pol }),
        // Negative shifts never widen the bin range, so any mix stays valid.
        (-3..=-1i32).prop_map(|delta| Statement::Shift { delta }),
    ]
}

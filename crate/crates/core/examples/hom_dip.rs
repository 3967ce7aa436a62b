//! Coincidence probability of two photons on a balanced polarization
//! rotation as the wavepacket overlap goes from 0 to 1.

use std::f64::consts::FRAC_PI_4;
use std::sync::Arc;

use num_complex::Complex64;
use timebin::analysis::DistinguishabilityModel;
use timebin::elements::pol_rotation;
use timebin::fock::{FockState, ModeIndex, ModeRegistry, Polarization};

fn main() -> timebin::Result<()> {
    let registry = Arc::new(ModeRegistry::time_bins([1], 1, 2));
    let h = ModeIndex::main(1, Polarization::H);
    let v = ModeIndex::main(1, Polarization::V);
    let one = Complex64::new(1.0, 0.0);

    println!("alpha  coincidence");
    for step in 0..=10 {
        let model = DistinguishabilityModel::new(f64::from(step) / 10.0)?;
        let input = FockState::from_photons(registry.clone(), &[vec![(h, one)], model.split(&[(v, one)])])?;
        let out = pol_rotation(&input, 1, FRAC_PI_4)?;
        let dist = out.measure_distribution(&[h, v])?;
        let coincidence = dist.get(&vec![1, 1]).copied().unwrap_or(0.0);
        println!("{:5.2}  {coincidence:.6}", model.alpha);
    }
    Ok(())
}

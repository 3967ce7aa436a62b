//! Decompose a 4-mode unitary into register-bin couplers and check the
//! reconstruction.

use nalgebra::DMatrix;
use num_complex::Complex64;
use timebin::elements::Mesh;

fn main() -> timebin::Result<()> {
    // Discrete Fourier transform on four modes.
    let n = 4;
    let u = DMatrix::from_fn(n, n, |j, k| {
        Complex64::from_polar(0.5, 2.0 * std::f64::consts::PI * (j * k) as f64 / n as f64)
    });
    let mesh = Mesh::decompose(&u)?;
    for c in &mesh.couplers {
        println!(
            "couple {} <- {}: theta = {:+.6}, phi = {:+.6}",
            c.a, c.b, c.theta, c.phi
        );
    }
    let err = (mesh.matrix(n) - &u).iter().map(|z| z.norm()).fold(0.0, f64::max);
    println!("{} couplers, max reconstruction error {err:.2e}", mesh.couplers.len());
    Ok(())
}

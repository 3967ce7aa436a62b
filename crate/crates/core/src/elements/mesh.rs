//! Decomposition of an N-mode unitary into a triangular mesh of two-mode
//! couplers and output phases, realized on register bins.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{couple_register, phase_shift};
use crate::error::{Error, Result};
use crate::fock::{beam_splitter_matrix, FockState, Polarization};

/// `beam_splitter(theta, phi)` on abstract modes `(a, b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupler {
    pub a: usize,
    pub b: usize,
    pub theta: f64,
    pub phi: f64,
}

/// Phases on every mode followed by couplers, in application order.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub phases: Vec<f64>,
    pub couplers: Vec<Coupler>,
}

impl Mesh {
    /// Null the sub-diagonal of `u` with nearest-neighbour couplers, then
    /// invert the nulling sequence.
    pub fn decompose(u: &DMatrix<Complex64>) -> Result<Self> {
        let n = u.nrows();
        if u.ncols() != n {
            return Err(Error::domain("mesh decomposition needs a square matrix"));
        }
        let deviation = (u * u.adjoint() - DMatrix::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if deviation.is_nan() || deviation > 1e-10 {
            return Err(Error::NotUnitary { deviation });
        }
        let mut work = u.clone();
        let mut nulling = Vec::new();
        for col in 0..n.saturating_sub(1) {
            for row in (col + 1..n).rev() {
                let p = row - 1;
                let (xp, xq) = (work[(p, col)], work[(row, col)]);
                if xq.norm() == 0.0 {
                    continue;
                }
                let theta = xq.norm().atan2(xp.norm());
                let phi = if xp.norm() == 0.0 {
                    (-xq).arg()
                } else {
                    (-xq / xp).arg()
                };
                let g = beam_splitter_matrix(theta, phi);
                for c in 0..n {
                    let (vp, vq) = (work[(p, c)], work[(row, c)]);
                    work[(p, c)] = g[0][0] * vp + g[0][1] * vq;
                    work[(row, c)] = g[1][0] * vp + g[1][1] * vq;
                }
                nulling.push(Coupler {
                    a: p,
                    b: row,
                    theta,
                    phi,
                });
            }
        }
        let phases = (0..n).map(|i| work[(i, i)].arg()).collect();
        let couplers = nulling
            .into_iter()
            .rev()
            .map(|c| Coupler { theta: -c.theta, ..c })
            .collect();
        Ok(Mesh { phases, couplers })
    }

    /// Single-photon transfer matrix of the mesh on `n` modes.
    pub fn matrix(&self, n: usize) -> DMatrix<Complex64> {
        let mut u = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            self.phases.iter().map(|&p| Complex64::from_polar(1.0, p)),
        ));
        for c in &self.couplers {
            let g = beam_splitter_matrix(c.theta, c.phi);
            let mut step = DMatrix::identity(n, n);
            step[(c.a, c.a)] = g[0][0];
            step[(c.a, c.b)] = g[0][1];
            step[(c.b, c.a)] = g[1][0];
            step[(c.b, c.b)] = g[1][1];
            u = step * u;
        }
        u
    }

    /// Run the mesh on register bins, with `bins[i]` playing abstract mode `i`.
    pub fn apply_on_register(&self, state: &FockState, bins: &[u32]) -> Result<FockState> {
        if bins.len() != self.phases.len() {
            return Err(Error::domain(format!(
                "mesh spans {} modes but {} bins were given",
                self.phases.len(),
                bins.len()
            )));
        }
        let mut s = state.clone();
        for (&bin, &phase) in bins.iter().zip(&self.phases) {
            if phase != 0.0 {
                s = phase_shift(&s, bin, Polarization::Register, phase)?;
            }
        }
        for c in &self.couplers {
            s = couple_register(&s, bins[c.a], bins[c.b], c.theta, c.phi)?;
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_unitary() -> DMatrix<Complex64> {
        // Product of a few fixed couplers and phases.
        let mesh = Mesh {
            phases: vec![0.3, -1.2, 2.0],
            couplers: vec![
                Coupler {
                    a: 1,
                    b: 2,
                    theta: 0.7,
                    phi: 0.4,
                },
                Coupler {
                    a: 0,
                    b: 1,
                    theta: -1.1,
                    phi: 2.5,
                },
                Coupler {
                    a: 1,
                    b: 2,
                    theta: 0.2,
                    phi: -0.9,
                },
            ],
        };
        mesh.matrix(3)
    }

    #[test]
    fn decomposition_reconstructs() {
        let u = sample_unitary();
        let mesh = Mesh::decompose(&u).unwrap();
        let err = (mesh.matrix(3) - &u).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(err < 1e-12, "reconstruction error {err}");
    }

    #[test]
    fn rejects_non_unitary() {
        let m = DMatrix::from_element(2, 2, Complex64::new(1.0, 0.0));
        assert!(matches!(Mesh::decompose(&m), Err(Error::NotUnitary { .. })));
    }
}

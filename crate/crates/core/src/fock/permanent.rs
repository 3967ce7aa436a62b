//! Transition amplitudes of passive linear optics from matrix permanents.
//!
//! This path never touches [`super::FockState`]; it exists to cross-check
//! the two-mode evolution.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Permanent of a square matrix by Ryser's formula with Gray-code ordering.
pub fn permanent(m: &DMatrix<Complex64>) -> Complex64 {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "permanent needs a square matrix");
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut row_sums = vec![Complex64::default(); n];
    let mut total = Complex64::default();
    let mut subset: u64 = 0;
    for step in 1u64..(1u64 << n) {
        // Flip the column given by the lowest set bit of the step.
        let col = step.trailing_zeros() as usize;
        let adding = subset & (1 << col) == 0;
        subset ^= 1 << col;
        for (i, sum) in row_sums.iter_mut().enumerate() {
            if adding {
                *sum += m[(i, col)];
            } else {
                *sum -= m[(i, col)];
            }
        }
        let product: Complex64 = row_sums.iter().product();
        if subset.count_ones().is_multiple_of(2) {
            total += product;
        } else {
            total -= product;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

/// `⟨output| U |input⟩` for occupation vectors over the same mode set.
///
/// `unitary[(i, j)]` is the amplitude for a single photon entering mode `j`
/// to leave in mode `i`.
pub fn amplitude_by_permanent(input: &[usize], output: &[usize], unitary: &DMatrix<Complex64>) -> Result<Complex64> {
    let dim = unitary.nrows();
    if unitary.ncols() != dim || input.len() != dim || output.len() != dim {
        return Err(Error::domain(format!(
            "occupations of length {}/{} do not match a {}x{} unitary",
            input.len(),
            output.len(),
            unitary.nrows(),
            unitary.ncols()
        )));
    }
    let n_in: usize = input.iter().sum();
    let n_out: usize = output.iter().sum();
    if n_in != n_out {
        return Err(Error::domain(format!("photon number mismatch: {n_in} in, {n_out} out")));
    }
    let cols: Vec<usize> = expand(input);
    let rows: Vec<usize> = expand(output);
    let sub = DMatrix::from_fn(n_in, n_in, |r, c| unitary[(rows[r], cols[c])]);
    let norm: f64 = input
        .iter()
        .chain(output)
        .map(|&k| factorial(k))
        .product::<f64>()
        .sqrt();
    Ok(permanent(&sub) / norm)
}

fn expand(occupation: &[usize]) -> Vec<usize> {
    occupation
        .iter()
        .enumerate()
        .flat_map(|(mode, &k)| std::iter::repeat_n(mode, k))
        .collect()
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

//! Independent reference computations: single-photon transfer matrices
//! composed by hand and multi-photon amplitudes from permanents.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C = Complex64;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// `[[cosθ, −e^{−iφ} sinθ], [e^{iφ} sinθ, cosθ]]`
pub fn bs(theta: f64, phi: f64) -> [[C; 2]; 2] {
    let (s, co) = theta.sin_cos();
    [
        [c(co, 0.0), -C::from_polar(s, -phi)],
        [C::from_polar(s, phi), c(co, 0.0)],
    ]
}

pub fn hwp(angle: f64) -> [[C; 2]; 2] {
    let (s, co) = (2.0 * angle).sin_cos();
    [[c(co, 0.0), c(s, 0.0)], [c(s, 0.0), c(-co, 0.0)]]
}

/// `n × n` identity with `m` acting on modes `(a, b)`; column `j` is the
/// image of a photon entering mode `j`.
pub fn embed(n: usize, a: usize, b: usize, m: [[C; 2]; 2]) -> DMatrix<C> {
    let mut u = DMatrix::identity(n, n);
    u[(a, a)] = m[0][0];
    u[(a, b)] = m[0][1];
    u[(b, a)] = m[1][0];
    u[(b, b)] = m[1][1];
    u
}

pub fn phase(n: usize, a: usize, phi: f64) -> DMatrix<C> {
    let mut u = DMatrix::identity(n, n);
    u[(a, a)] = C::from_polar(1.0, phi);
    u
}

/// Permanent by direct expansion over permutations.
pub fn permanent(m: &DMatrix<C>) -> C {
    fn go(m: &DMatrix<C>, row: usize, used: &mut Vec<bool>) -> C {
        if row == m.nrows() {
            return c(1.0, 0.0);
        }
        let mut total = C::default();
        for col in 0..m.ncols() {
            if !used[col] {
                used[col] = true;
                total += m[(row, col)] * go(m, row + 1, used);
                used[col] = false;
            }
        }
        total
    }
    go(m, 0, &mut vec![false; m.ncols()])
}

fn expand(occ: &[usize]) -> Vec<usize> {
    occ.iter()
        .enumerate()
        .flat_map(|(i, &n)| std::iter::repeat_n(i, n))
        .collect()
}

fn fact(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `⟨output| U |input⟩` for occupation vectors.
pub fn amplitude(u: &DMatrix<C>, input: &[usize], output: &[usize]) -> C {
    let (cols, rows) = (expand(input), expand(output));
    if cols.len() != rows.len() {
        return C::default();
    }
    let sub = DMatrix::from_fn(rows.len(), cols.len(), |i, j| u[(rows[i], cols[j])]);
    let norm: f64 = input.iter().chain(output).map(|&n| fact(n)).product();
    permanent(&sub) / norm.sqrt()
}

/// Every occupation vector of `photons` photons over `modes` modes.
pub fn patterns(modes: usize, photons: usize) -> Vec<Vec<usize>> {
    if modes == 0 {
        return if photons == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 0..=photons {
        for mut rest in patterns(modes - 1, photons - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Output amplitudes of a superposition of input occupations.
pub fn evolve(u: &DMatrix<C>, input: &[(Vec<usize>, C)], output: &[usize]) -> C {
    input.iter().map(|(occ, a)| a * amplitude(u, occ, output)).sum()
}

/// Smallest `max |a − e^{iγ} b|` over global phases, with `γ` fixed by the
/// largest component of `b`.
pub fn max_dev_up_to_phase(a: &[C], b: &[C]) -> f64 {
    let (k, _) = b
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
        .expect("non-empty");
    let g = if b[k].norm() > 0.0 { a[k] / b[k] } else { c(1.0, 0.0) };
    let g = g / g.norm();
    a.iter().zip(b).map(|(x, y)| (x - g * y).norm()).fold(0.0, f64::max)
}

/// `|⟨a|b⟩|² / (‖a‖² ‖b‖²)`
pub fn fidelity(a: &[C], b: &[C]) -> f64 {
    let overlap: C = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    overlap.norm_sqr() / (na * nb)
}

//! Small dense Hermitian helpers: eigenvalue and exact PSD tests, and the
//! maximal index sets on which a moment matrix is defined.

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::{Signed, Zero};

use crate::exact::{QComplex, Scalar};

pub fn to_matrix(entries: &[Vec<Scalar>]) -> DMatrix<Complex64> {
    let n = entries.len();
    DMatrix::from_fn(n, n, |i, j| entries[i][j].to_c64())
}

/// Smallest eigenvalue of the Hermitian part of `m` (`+∞` for an empty matrix).
pub fn hermitian_min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

pub fn is_hermitian(m: &DMatrix<Complex64>, tol: f64) -> bool {
    let n = m.nrows();
    (0..n).all(|i| (0..n).all(|j| (m[(i, j)] - m[(j, i)].conj()).norm() <= tol))
}

/// Exact positive-semidefiniteness of a Hermitian matrix with rational
/// complex entries, by symmetric Gaussian elimination. Returns `false` for
/// non-Hermitian input.
pub fn exact_is_psd(m: &[Vec<QComplex>]) -> bool {
    let n = m.len();
    for i in 0..n {
        for j in 0..n {
            if m[i][j] != m[j][i].conj() {
                return false;
            }
        }
    }
    let mut a: Vec<Vec<QComplex>> = m.to_vec();
    for k in 0..n {
        let pivot = a[k][k].re.clone();
        if pivot.is_negative() {
            return false;
        }
        if pivot.is_zero() {
            if (k + 1..n).any(|j| !a[k][j].is_zero()) {
                return false;
            }
            continue;
        }
        let inv = QComplex::real(pivot.recip());
        for i in k + 1..n {
            if a[i][k].is_zero() {
                continue;
            }
            let factor = &a[i][k] * &inv;
            for j in k + 1..n {
                let delta = &factor * &a[k][j];
                a[i][j] = &a[i][j] - &delta;
            }
        }
    }
    true
}

/// Maximal cliques of the graph on `0..n` with the given adjacency
/// (Bron–Kerbosch with pivoting).
pub fn maximal_cliques(n: usize, adjacent: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let adj: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| i != j && adjacent(i, j)).collect())
        .collect();
    let mut out = Vec::new();
    bron_kerbosch(&adj, Vec::new(), (0..n).collect(), Vec::new(), &mut out);
    out
}

fn bron_kerbosch(
    adj: &[Vec<bool>],
    r: Vec<usize>,
    mut p: Vec<usize>,
    mut x: Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if p.is_empty() && x.is_empty() {
        out.push(r);
        return;
    }
    let pivot = p
        .iter()
        .chain(&x)
        .copied()
        .max_by_key(|&u| p.iter().filter(|&&v| adj[u][v]).count())
        .expect("p or x nonempty");
    let candidates: Vec<usize> = p.iter().copied().filter(|&v| !adj[pivot][v]).collect();
    for v in candidates {
        let mut r2 = r.clone();
        r2.push(v);
        let p2 = p.iter().copied().filter(|&u| adj[v][u]).collect();
        let x2 = x.iter().copied().filter(|&u| adj[v][u]).collect();
        bron_kerbosch(adj, r2, p2, x2, out);
        p.retain(|&u| u != v);
        x.push(v);
    }
}

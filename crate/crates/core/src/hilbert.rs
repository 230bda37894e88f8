//! Finite-rank model of `L²(ℝ_Bohr, μ)` in a basis of characters.

use std::collections::BTreeSet;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::ap::APFunction;
use crate::error::{Error, Result};
use crate::exact::{Real, Scalar};
use crate::frequency::{ensure_same, Frequency, FrequencyModule};
use crate::linalg;
use crate::measure::FSMeasure;

fn coords_of(module: &Arc<FrequencyModule>, basis: &[Frequency]) -> Result<Vec<Vec<i64>>> {
    basis
        .iter()
        .map(|f| {
            ensure_same(module, f.module())?;
            Ok(f.coords().to_vec())
        })
        .collect()
}

fn diff(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `G[i][j] = ⟨χ_{λᵢ}, χ_{λⱼ}⟩_μ = μ̂(λᵢ − λⱼ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GramOperator {
    module: Arc<FrequencyModule>,
    basis: Vec<Vec<i64>>,
    entries: Vec<Vec<Scalar>>,
}

impl GramOperator {
    pub fn basis(&self) -> &[Vec<i64>] {
        &self.basis
    }

    pub fn module(&self) -> &Arc<FrequencyModule> {
        &self.module
    }

    pub fn entries(&self) -> &[Vec<Scalar>] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i][j]
    }

    pub fn size(&self) -> usize {
        self.basis.len()
    }

    pub fn to_matrix(&self) -> DMatrix<Complex64> {
        linalg::to_matrix(&self.entries)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_min_eigenvalue(&self.to_matrix())
    }

    /// `max |G[i][j] − δᵢⱼ|`.
    pub fn identity_deviation(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, row) in self.entries.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let target = if i == j { Scalar::one() } else { Scalar::zero() };
                worst = worst.max(v.distance(&target));
            }
        }
        worst
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.identity_deviation() <= tol
    }
}

pub fn gram_matrix(mu: &FSMeasure, basis: &[Frequency]) -> Result<GramOperator> {
    let coords = coords_of(mu.module(), basis)?;
    gram_matrix_coords(mu, &coords)
}

pub fn gram_matrix_coords(mu: &FSMeasure, basis: &[Vec<i64>]) -> Result<GramOperator> {
    let mut missing = BTreeSet::new();
    for a in basis {
        mu.module().check_dim(a)?;
        for b in basis {
            let d = diff(a, b);
            if mu.moment(&d).is_none() {
                missing.insert(d);
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::MissingMoments(missing.into_iter().collect()));
    }
    let entries = basis
        .iter()
        .map(|a| basis.iter().map(|b| mu.moment(&diff(a, b)).unwrap().clone()).collect())
        .collect();
    Ok(GramOperator {
        module: Arc::clone(mu.module()),
        basis: basis.to_vec(),
        entries,
    })
}

/// Diagonal of `D_t = diag(e^{iλₖt})`, exact where the phase is rational.
pub fn translation_diagonal(t: &Real, basis: &[Frequency]) -> Vec<Scalar> {
    basis.iter().map(|f| f.phase(t).unit()).collect()
}

pub fn translation_matrix(t: &Real, basis: &[Frequency]) -> DMatrix<Complex64> {
    let diag: Vec<Complex64> = translation_diagonal(t, basis).iter().map(Scalar::to_c64).collect();
    DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag))
}

/// `‖(D_t − D_{t'}) v‖₂` for a coefficient vector `v` in the character basis.
pub fn translation_difference_norm(
    t: &Real,
    t_prime: &Real,
    basis: &[Frequency],
    v: &[Complex64],
) -> f64 {
    let a = translation_diagonal(t, basis);
    let b = translation_diagonal(t_prime, basis);
    a.iter()
        .zip(&b)
        .zip(v)
        .map(|((x, y), c)| ((x.to_c64() - y.to_c64()) * c).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct UnitarityReport {
    pub unitary: bool,
    /// `‖D_t† G D_t − G‖_max`.
    pub defect: f64,
    pub defect_matrix: Vec<Vec<Scalar>>,
    /// Index pair attaining the defect.
    pub worst: Option<(usize, usize)>,
}

/// Compares `D_t† G D_t` with `G`. Entry `(i, j)` of the difference is
/// `(e^{−i(λᵢ−λⱼ)t} − 1)·μ̂(λᵢ − λⱼ)`.
pub fn unitarity_check(
    mu: &FSMeasure,
    basis: &[Frequency],
    t: &Real,
    tol: f64,
) -> Result<UnitarityReport> {
    let gram = gram_matrix(mu, basis)?;
    let module = mu.module();
    let mut defect = 0.0f64;
    let mut worst = None;
    let defect_matrix: Vec<Vec<Scalar>> = gram
        .basis
        .iter()
        .enumerate()
        .map(|(i, a)| {
            gram.basis
                .iter()
                .enumerate()
                .map(|(j, b)| {
                    let g = &gram.entries[i][j];
                    let phase = module.phase_of(&diff(a, b), t).unit().conj();
                    let d = &(&phase * g) - g;
                    let size = d.abs();
                    if size > defect {
                        defect = size;
                        worst = Some((i, j));
                    }
                    d
                })
                .collect()
        })
        .collect();
    Ok(UnitarityReport {
        unitary: defect <= tol,
        defect,
        defect_matrix,
        worst,
    })
}

/// `⟨f, g⟩_μ = Σ c_λ conj(d_κ) μ̂(λ − κ)`.
pub fn l2_inner(mu: &FSMeasure, f: &APFunction, g: &APFunction) -> Result<Scalar> {
    ensure_same(mu.module(), f.module())?;
    ensure_same(mu.module(), g.module())?;
    let mut missing = BTreeSet::new();
    let mut acc = Scalar::zero();
    for (a, c) in f.terms() {
        for (b, d) in g.terms() {
            let k = diff(a, b);
            match mu.moment(&k) {
                Some(m) => acc = &acc + &(&(c * &d.conj()) * m),
                None => {
                    missing.insert(k);
                }
            }
        }
    }
    if missing.is_empty() {
        Ok(acc)
    } else {
        Err(Error::MissingMoments(missing.into_iter().collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bohr::BohrPoint;
    use crate::exact::int;

    fn z() -> Arc<FrequencyModule> {
        FrequencyModule::integers()
    }

    fn freqs(m: &Arc<FrequencyModule>, ks: &[i64]) -> Vec<Frequency> {
        ks.iter().map(|k| m.frequency(vec![*k]).unwrap()).collect()
    }

    #[test]
    fn gram_examples() {
        let m = z();
        let f = freqs(&m, &[-2, -1, 0, 1, 2]);
        let haar = FSMeasure::haar(&m, &f).unwrap();
        let g = gram_matrix(&haar, &freqs(&m, &[0, 1, 2])).unwrap();
        assert!(g.is_identity(0.0));
        let delta = FSMeasure::dirac(&BohrPoint::identity(&m), &f).unwrap();
        let ones = gram_matrix(&delta, &freqs(&m, &[0, 1, 2])).unwrap();
        assert!(ones.entries().iter().flatten().all(|v| *v == Scalar::one()));
        let single = gram_matrix(&delta, &freqs(&m, &[2])).unwrap();
        assert_eq!(single.entries(), &[vec![Scalar::one()]]);
        let err = gram_matrix(&haar, &freqs(&m, &[0, 3])).unwrap_err();
        assert_eq!(err, Error::MissingMoments(vec![vec![-3], vec![3]]));
    }

    #[test]
    fn translation_examples() {
        let m = z();
        let b = freqs(&m, &[1]);
        assert_eq!(translation_diagonal(&Real::pi_multiple(int(1)), &b), vec![Scalar::int(-1)]);
        let id = translation_matrix(&Real::zero(), &freqs(&m, &[0, 1, 5]));
        assert_eq!(id, DMatrix::identity(3, 3));
        let d = translation_matrix(&Real::Float(0.7), &freqs(&m, &[-1, 2, 3]));
        let prod = d.adjoint() * &d;
        assert!((prod - DMatrix::<Complex64>::identity(3, 3)).norm() < 1e-14);
    }

    #[test]
    fn unitarity_examples() {
        let m = z();
        let f = freqs(&m, &[-1, 0, 1]);
        let delta = FSMeasure::dirac(&BohrPoint::identity(&m), &f).unwrap();
        let basis = freqs(&m, &[0, 1]);
        let r = unitarity_check(&delta, &basis, &Real::int(1), 1e-12).unwrap();
        assert!(!r.unitary);
        assert!((r.defect - 2.0 * 0.5f64.sin()).abs() < 1e-15);
        assert!((r.defect - 0.958851).abs() < 1e-6);
        assert!(unitarity_check(&delta, &basis, &Real::zero(), 0.0).unwrap().unitary);
        let haar = FSMeasure::haar(&m, &f).unwrap();
        let h = unitarity_check(&haar, &basis, &Real::int(1), 0.0).unwrap();
        assert!(h.unitary);
        assert_eq!(h.defect, 0.0);
    }

    #[test]
    fn inner_examples() {
        let m = z();
        let f = freqs(&m, &[-1, 0, 1]);
        let delta = FSMeasure::dirac(&BohrPoint::identity(&m), &f).unwrap();
        let chi1 = APFunction::character(&f[2]);
        let chi2 = APFunction::character(&m.frequency(vec![2]).unwrap());
        assert_eq!(l2_inner(&delta, &chi1, &chi1).unwrap(), Scalar::one());
        assert!(l2_inner(&delta, &chi1, &chi2).unwrap() == Scalar::one());
        let haar = FSMeasure::haar(&m, &f).unwrap();
        assert_eq!(l2_inner(&haar, &chi1, &chi2).unwrap(), chi1.inner(&chi2).unwrap());
    }
}

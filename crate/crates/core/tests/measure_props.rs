mod common;

use std::collections::BTreeSet;
use std::f64::consts::PI;

use bohr_core::exact::{rational, Real, Scalar};
use bohr_core::measure::{uniqueness_verdict, uniqueness_verdict_coords, FSMeasure, TorusDensity};
use common::*;
use num_complex::Complex64;
use rand::Rng;

fn revalidate(mu: &FSMeasure) -> bohr_core::Result<FSMeasure> {
    FSMeasure::new(mu.module(), mu.moments().map(|(k, v)| (k.to_vec(), v.clone())))
}

fn max_moment_gap(a: &FSMeasure, b: &FSMeasure) -> f64 {
    a.moments()
        .map(|(k, v)| v.distance(b.moment(k).unwrap()))
        .fold(0.0, f64::max)
}

#[test]
fn pushforward_keeps_measures_valid() {
    let mut r = rng(21);
    for _ in 0..300 {
        let m = module_by_rank(r.random_range(1..=3));
        let support = random_support(&mut r, &m, 9);
        let mu = random_measure(&mut r, &m, &support);
        let t = random_shift(&mut r);
        let pushed = mu.pushforward(&t);
        let again = revalidate(&pushed).expect("pushforward stays a valid measure");
        assert!(again.min_eigenvalue() >= -1e-10);
        // |μ̂| is unchanged by the phase
        for (k, v) in mu.moments() {
            assert!((pushed.moment(k).unwrap().abs() - v.abs()).abs() < 1e-12);
        }
        // α_s ∘ α_t = α_{s+t}
        let s = random_shift(&mut r);
        let composed = mu.pushforward(&t).pushforward(&s);
        assert!(max_moment_gap(&composed, &mu.pushforward(&t.add(&s))) < 1e-10);
    }
}

#[test]
fn exact_pushforward_by_rational_multiple_of_pi() {
    let m = integers();
    let support = box_support(&m, 2);
    let p = bohr_core::bohr::BohrPoint::from_turns(&m, vec![bohr_core::exact::Turns::exact(rational(1, 8))]).unwrap();
    let mu = FSMeasure::dirac(&p, &support).unwrap();
    let pushed = mu.pushforward(&Real::pi_multiple(rational(1, 2)));
    // e^{iπ/2 k} at k = ±2 is −1, exact
    let before = mu.moment(&[2]).unwrap();
    assert_eq!(pushed.moment(&[2]).unwrap(), &(before * &Scalar::int(-1)));
}

/// `μ̂(k) = ∫ e^{ik·θ} ρ(θ) dθ/(2π)^d` by the rectangle rule, which is exact
/// for trigonometric polynomials of degree below the grid size.
fn quadrature_moment(rho: &TorusDensity, k: &[i64], n: usize) -> Complex64 {
    let d = k.len();
    let h = 2.0 * PI / n as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    let total = n.pow(d as u32);
    for idx in 0..total {
        let theta: Vec<f64> = (0..d).map(|j| ((idx / n.pow(j as u32)) % n) as f64 * h).collect();
        let phase: f64 = k.iter().zip(&theta).map(|(a, b)| *a as f64 * b).sum();
        acc += Complex64::from_polar(rho.eval(&theta), phase);
    }
    acc / total as f64
}

#[test]
fn density_moments_follow_the_shift() {
    let mut r = rng(3);
    for trial in 0..40 {
        let d = 1 + trial % 2;
        let m = module_by_rank(d);
        let p: Vec<(Vec<i64>, Scalar)> = (0..3)
            .map(|_| {
                let k: Vec<i64> = (0..d).map(|_| r.random_range(-2..=2)).collect();
                (k, Scalar::float(r.random_range(-1.0..1.0), r.random_range(-1.0..1.0)))
            })
            .collect();
        let Ok(rho) = TorusDensity::from_square(&m, &p) else { continue };
        let support = box_support(&m, 3);
        let moments = rho.moments(&support).unwrap();
        for f in &support {
            let oracle = quadrature_moment(&rho, f.coords(), 16);
            assert!((moments.moment(f.coords()).unwrap().to_c64() - oracle).norm() < 1e-10);
        }
        let t = Real::Float(r.random_range(-10.0..10.0));
        let shifted = rho.shifted(&t).moments(&support).unwrap();
        assert!(max_moment_gap(&shifted, &moments.pushforward(&t)) < 1e-10);
        // total mass is preserved and set masses move with the shift
        let bx: Vec<(f64, f64)> = (0..d).map(|_| (0.3, 1.9)).collect();
        let (mass, moved) = rho.set_invariance_check(&bx, &t).unwrap();
        assert!(mass >= -1e-12 && mass <= 1.0 + 1e-12 && moved >= -1e-12);
    }
}

#[test]
fn uniform_density_is_haar_and_invariant() {
    for d in 1..=2 {
        let m = module_by_rank(d);
        let rho = TorusDensity::uniform(&m).unwrap();
        let support = box_support(&m, 2);
        assert!(rho.moments(&support).unwrap().equals_haar(0.0));
        let bx: Vec<(f64, f64)> = (0..d).map(|_| (0.5, 2.0)).collect();
        let (a, b) = rho.set_invariance_check(&bx, &Real::Float(1.3)).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!((a - 1.5f64.powi(d as i32) / (2.0 * PI).powi(d as i32)).abs() < 1e-12);
    }
}

/// Independent oracle: `λt ∈ 2πℤ` from the floating values alone.
fn fixed_by(module: &bohr_core::frequency::FrequencyModule, k: &[i64], t: &Real) -> bool {
    let turns = module.value_of(k) * t.to_f64() / (2.0 * PI);
    (turns - turns.round()).abs() < 1e-9
}

#[test]
fn projection_is_invariant_and_matches_the_verdict() {
    let mut r = rng(99);
    for _ in 0..1000 {
        let m = module_by_rank(r.random_range(1..=3));
        let support = random_support(&mut r, &m, 13);
        let mu = random_measure(&mut r, &m, &support);
        let shifts: Vec<Real> = (0..r.random_range(1..=2)).map(|_| random_shift(&mut r)).collect();
        let nu = mu.project_invariant(&shifts);
        let nu = revalidate(&nu).expect("projection stays positive-definite");
        assert!(nu.is_invariant(&shifts, 1e-12).invariant);
        let verdict = uniqueness_verdict(&m, &support, &shifts).unwrap();
        let oracle_surviving: Vec<Vec<i64>> = support
            .iter()
            .map(|f| f.coords().to_vec())
            .filter(|k| k.iter().any(|c| *c != 0) && shifts.iter().all(|t| fixed_by(&m, k, t)))
            .collect();
        assert_eq!(verdict.surviving(), oracle_surviving.as_slice());
        if verdict.is_forced_haar() {
            assert!(nu.equals_haar(1e-10));
        }
        for w in &verdict.witnesses {
            assert!(!fixed_by(&m, &w.frequency, &w.shift));
        }
    }
}

#[test]
fn shift_two_pi_leaves_integer_frequencies_free() {
    let m = integers();
    let support = box_support(&m, 3);
    let v = uniqueness_verdict(&m, &support, &[Real::pi_multiple(rational(2, 1))]).unwrap();
    assert_eq!(v.surviving().len(), 6);
    assert!(v.witnesses.is_empty());
    // π kills the odd frequencies only, and decides it exactly
    let v = uniqueness_verdict(&m, &support, &[Real::pi_multiple(rational(1, 1))]).unwrap();
    assert_eq!(v.surviving(), &[vec![-2], vec![2]]);
    assert!(v.witnesses.iter().all(|w| w.exact));
    let both = uniqueness_verdict(&m, &support, &[Real::pi_multiple(rational(1, 1)), Real::int(1)]).unwrap();
    assert!(both.is_forced_haar());
}

#[test]
fn irrational_shift_ratio_forces_haar() {
    let mut r = rng(8);
    for d in 1..=3 {
        let m = module_by_rank(d);
        for _ in 0..20 {
            let support: BTreeSet<Vec<i64>> = random_support(&mut r, &m, 13)
                .into_iter()
                .map(|f| f.into_coords())
                .collect();
            let t1 = Real::rational(rational(r.random_range(1..=9), r.random_range(1..=5)));
            let t2 = Real::pi_multiple(rational(r.random_range(1..=9), r.random_range(1..=5)));
            let v = uniqueness_verdict_coords(&m, &support, &[t1, t2]).unwrap();
            assert!(v.is_forced_haar(), "{support:?}");
        }
    }
}

#[test]
fn invalid_moment_data_is_rejected() {
    let m = integers();
    let bad = FSMeasure::new(&m, [(vec![0], Scalar::one()), (vec![1], Scalar::int(2)), (vec![-1], Scalar::int(2))]);
    assert!(matches!(bad, Err(bohr_core::Error::NotPositiveDefinite(_))));
    let asym = FSMeasure::new(&m, [(vec![0], Scalar::one()), (vec![1], Scalar::int(0))]);
    assert!(matches!(asym, Err(bohr_core::Error::BadSupport)));
    let unnormalized = FSMeasure::new(&m, [(vec![0], Scalar::int(2))]);
    assert!(matches!(unnormalized, Err(bohr_core::Error::NotNormalized(_))));
    let skew = FSMeasure::new(&m, [(vec![0], Scalar::one()), (vec![1], Scalar::i()), (vec![-1], Scalar::i())]);
    assert!(matches!(skew, Err(bohr_core::Error::NotHermitian(_))));
}

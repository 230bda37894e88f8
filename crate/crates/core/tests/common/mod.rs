#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use bohr_core::ap::APFunction;
use bohr_core::bohr::BohrPoint;
use bohr_core::exact::{rational, Real, Scalar, Turns};
use bohr_core::frequency::{Frequency, FrequencyModule, Generator};
use bohr_core::measure::FSMeasure;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

pub type TestRng = rand::rngs::StdRng;

pub fn rng(seed: u64) -> TestRng {
    TestRng::seed_from_u64(seed)
}

pub fn integers() -> Arc<FrequencyModule> {
    FrequencyModule::integers()
}

pub fn one_sqrt2() -> Arc<FrequencyModule> {
    FrequencyModule::new(vec![
        Generator::integer(1).unwrap(),
        Generator::constant("sqrt2", rational(1, 1)).unwrap(),
    ])
    .unwrap()
}

pub fn one_sqrt2_sqrt3() -> Arc<FrequencyModule> {
    FrequencyModule::new(vec![
        Generator::integer(1).unwrap(),
        Generator::constant("sqrt2", rational(1, 1)).unwrap(),
        Generator::constant("sqrt3", rational(1, 1)).unwrap(),
    ])
    .unwrap()
}

/// Modules of rank 1..=3 used across the property tests.
pub fn module_by_rank(d: usize) -> Arc<FrequencyModule> {
    match d {
        1 => integers(),
        2 => one_sqrt2(),
        _ => one_sqrt2_sqrt3(),
    }
}

pub fn module_strategy() -> impl Strategy<Value = Arc<FrequencyModule>> {
    (1usize..=3).prop_map(module_by_rank)
}

pub fn coords_strategy(d: usize, bound: i64) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::vec(-bound..=bound, d)
}

pub fn exact_scalar() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4, -6i64..=6, 1i64..=4).prop_map(|(a, b, c, d)| {
        Scalar::Exact(bohr_core::exact::QComplex::new(rational(a, b), rational(c, d)))
    })
}

pub fn ap_strategy(module: Arc<FrequencyModule>, max_terms: usize) -> impl Strategy<Value = APFunction> {
    let d = module.dim();
    proptest::collection::vec((coords_strategy(d, 4), exact_scalar()), 0..=max_terms)
        .prop_map(move |terms| APFunction::from_terms(&module, terms).unwrap())
}

pub fn random_turns<R: Rng>(rng: &mut R, d: usize) -> Vec<Turns> {
    (0..d).map(|_| Turns::float(rng.random::<f64>())).collect()
}

pub fn random_point<R: Rng>(rng: &mut R, module: &Arc<FrequencyModule>) -> BohrPoint {
    BohrPoint::from_turns(module, random_turns(rng, module.dim())).unwrap()
}

pub fn box_support(module: &Arc<FrequencyModule>, n: i64) -> Vec<Frequency> {
    let mut out = vec![Vec::new()];
    for _ in 0..module.dim() {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (-n..=n).map(move |k| {
                    let mut q = p.clone();
                    q.push(k);
                    q
                })
            })
            .collect();
    }
    out.into_iter().map(|c| module.frequency(c).unwrap()).collect()
}

/// A random symmetric support containing 0 with at most `max` elements.
pub fn random_support<R: Rng>(rng: &mut R, module: &Arc<FrequencyModule>, max: usize) -> Vec<Frequency> {
    let d = module.dim();
    let mut set: BTreeSet<Vec<i64>> = BTreeSet::new();
    set.insert(vec![0; d]);
    let pairs = (max - 1) / 2;
    let wanted = rng.random_range(0..=pairs);
    let mut guard = 0;
    while set.len() < 1 + 2 * wanted && guard < 1000 {
        guard += 1;
        let k: Vec<i64> = (0..d).map(|_| rng.random_range(-3..=3)).collect();
        if k.iter().all(|c| *c == 0) {
            continue;
        }
        let neg: Vec<i64> = k.iter().map(|c| -c).collect();
        set.insert(k);
        set.insert(neg);
    }
    set.into_iter().map(|c| module.frequency(c).unwrap()).collect()
}

/// A random probability measure: a mixture of point masses, which is
/// positive-definite by construction.
pub fn random_measure<R: Rng>(rng: &mut R, module: &Arc<FrequencyModule>, support: &[Frequency]) -> FSMeasure {
    let atoms = rng.random_range(1..=4);
    let deltas: Vec<FSMeasure> = (0..atoms)
        .map(|_| FSMeasure::dirac(&random_point(rng, module), support).unwrap())
        .collect();
    let mut weights: Vec<f64> = (0..atoms).map(|_| rng.random::<f64>() + 0.05).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    // keep the sum exactly 1
    let rest: f64 = weights[1..].iter().sum();
    weights[0] = 1.0 - rest;
    let haar_weight = if rng.random_bool(0.3) { rng.random::<f64>() * 0.5 } else { 0.0 };
    let haar = FSMeasure::haar(module, support).unwrap();
    let mixed = FSMeasure::mix(&weights.iter().zip(&deltas).map(|(w, m)| (*w, m)).collect::<Vec<_>>()).unwrap();
    FSMeasure::mix(&[(1.0 - haar_weight, &mixed), (haar_weight, &haar)]).unwrap()
}

pub fn random_shift<R: Rng>(rng: &mut R) -> Real {
    match rng.random_range(0..4) {
        0 => Real::rational(rational(rng.random_range(-40..=40), rng.random_range(1..=7))),
        1 => Real::pi_multiple(rational(rng.random_range(-12..=12), rng.random_range(1..=6))),
        _ => Real::Float(rng.random_range(-20.0..20.0)),
    }
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A random finite piecewise-linear `ℝ` part on `[-5, 5]` with optional atoms.
pub fn random_r_part<R: Rng>(rng: &mut R) -> bohr_core::fleischhack::RPart {
    let n = rng.random_range(3..=6);
    let mut bps: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
    bps.sort_by(f64::total_cmp);
    bps.dedup();
    let last = bps.len() - 1;
    let values: Vec<f64> = (0..bps.len())
        .map(|i| if i == 0 || i == last { 0.0 } else { rng.random_range(0.0..0.5) })
        .collect();
    let atoms: Vec<(f64, f64)> = (0..rng.random_range(0..=2))
        .map(|_| (rng.random_range(-5.0..5.0), rng.random_range(0.0..0.3)))
        .collect();
    bohr_core::fleischhack::RPart::new(bps, values, atoms).unwrap()
}

/// `μ([lo, hi])` from the raw pieces: exact trapezoids between the cut
/// points that fall inside, plus the atoms in the closed interval.
pub fn oracle_mass(r: &bohr_core::fleischhack::RPart, lo: f64, hi: f64) -> f64 {
    let (b, v) = (r.breakpoints(), r.values());
    let interp = |x: f64| -> f64 {
        for i in 0..b.len().saturating_sub(1) {
            if b[i] <= x && x <= b[i + 1] {
                return v[i] + (x - b[i]) / (b[i + 1] - b[i]) * (v[i + 1] - v[i]);
            }
        }
        0.0
    };
    let mut cuts = vec![lo, hi];
    cuts.extend(b.iter().copied().filter(|x| lo < *x && *x < hi));
    cuts.sort_by(f64::total_cmp);
    let density: f64 = cuts.windows(2).map(|w| (w[1] - w[0]) * (interp(w[0]) + interp(w[1])) / 2.0).sum();
    density + r.atoms().iter().filter(|(x, _)| lo <= *x && *x <= hi).map(|(_, m)| m).sum::<f64>()
}

/// A random compactly supported piecewise-linear function with rational
/// breakpoints and exact values.
pub fn random_c0<R: Rng>(rng: &mut R) -> bohr_core::fleischhack::C0Function {
    let n = rng.random_range(3..=6);
    let mut bps: Vec<i64> = (0..n).map(|_| rng.random_range(-40..=40)).collect();
    bps.sort();
    bps.dedup();
    let last = bps.len() - 1;
    let values = (0..bps.len())
        .map(|i| {
            if i == 0 || i == last {
                Scalar::zero()
            } else {
                Scalar::Exact(bohr_core::exact::QComplex::new(
                    rational(rng.random_range(-8..=8), 4),
                    rational(rng.random_range(-8..=8), 4),
                ))
            }
        })
        .collect();
    bohr_core::fleischhack::C0Function::new(bps.into_iter().map(|b| rational(b, 4)).collect(), values).unwrap()
}

pub fn random_ap_function<R: Rng>(rng: &mut R, module: &Arc<FrequencyModule>) -> APFunction {
    let d = module.dim();
    let terms: Vec<(Vec<i64>, Scalar)> = (0..rng.random_range(0..=4))
        .map(|_| {
            let k: Vec<i64> = (0..d).map(|_| rng.random_range(-3..=3)).collect();
            (k, Scalar::float(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        })
        .collect();
    APFunction::from_terms(module, terms).unwrap()
}

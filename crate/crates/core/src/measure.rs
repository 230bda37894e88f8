//! Measures on the truncated Bohr group, described by their
//! Fourier–Stieltjes coefficients `μ̂(λ) = ∫ χ_λ dμ` on a finite symmetric
//! support `F ∋ 0`, together with the translation action
//! `α_t(ψ) = ι(t) ⊕ ψ` and the invariance/uniqueness checks built on it.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::bohr::BohrPoint;
use crate::error::{Error, Result};
use crate::exact::{QComplex, Real, Scalar};
use crate::frequency::{ensure_same, Frequency, FrequencyModule};
use crate::linalg;

/// Lower bound accepted for the smallest eigenvalue of a moment matrix.
pub const PSD_TOL: f64 = 1e-10;
/// Tolerance for float normalization and Hermitian symmetry.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Below this distance from an integer, a float phase counts as a full turn.
pub const FULL_TURN_TOL: f64 = 1e-12;

fn neg(coords: &[i64]) -> Vec<i64> {
    coords.iter().map(|c| -c).collect()
}

fn diff(a: &[i64], b: &[i64]) -> Vec<i64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Checks that `support` contains zero and is closed under negation.
pub fn check_support<'a>(
    module: &FrequencyModule,
    support: impl IntoIterator<Item = &'a [i64]>,
) -> Result<BTreeSet<Vec<i64>>> {
    let set: BTreeSet<Vec<i64>> = support.into_iter().map(<[i64]>::to_vec).collect();
    for k in &set {
        module.check_dim(k)?;
    }
    if !set.contains(&vec![0; module.dim()]) || set.iter().any(|k| !set.contains(&neg(k))) {
        return Err(Error::BadSupport);
    }
    Ok(set)
}

fn coords_of(module: &Arc<FrequencyModule>, support: &[Frequency]) -> Result<Vec<Vec<i64>>> {
    support
        .iter()
        .map(|f| {
            ensure_same(module, f.module())?;
            Ok(f.coords().to_vec())
        })
        .collect()
}

/// Maximal subsets of `support` whose pairwise differences stay in `support`.
pub fn difference_cliques(support: &BTreeSet<Vec<i64>>) -> Vec<Vec<Vec<i64>>> {
    let pts: Vec<&Vec<i64>> = support.iter().collect();
    linalg::maximal_cliques(pts.len(), |i, j| support.contains(&diff(pts[i], pts[j])))
        .into_iter()
        .map(|c| {
            let mut c: Vec<Vec<i64>> = c.into_iter().map(|i| pts[i].clone()).collect();
            c.sort();
            c
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct FSMeasure {
    module: Arc<FrequencyModule>,
    moments: BTreeMap<Vec<i64>, Scalar>,
}

impl PartialEq for FSMeasure {
    fn eq(&self, other: &Self) -> bool {
        crate::frequency::same_module(&self.module, &other.module) && self.moments == other.moments
    }
}

impl FSMeasure {
    /// Validates support symmetry, normalization, Hermitian symmetry and
    /// positive-definiteness of the moment data.
    pub fn new(
        module: &Arc<FrequencyModule>,
        entries: impl IntoIterator<Item = (Vec<i64>, Scalar)>,
    ) -> Result<Self> {
        let mut moments = BTreeMap::new();
        for (k, v) in entries {
            module.check_dim(&k)?;
            if moments.insert(k.clone(), v).is_some() {
                return Err(Error::InvalidInput(format!("duplicate moment for {k:?}")));
            }
        }
        let m = FSMeasure {
            module: Arc::clone(module),
            moments,
        };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        check_support(&self.module, self.moments.keys().map(Vec::as_slice))?;
        let zero = self.moment(&vec![0; self.module.dim()]).expect("support has 0");
        if !zero.approx_eq(&Scalar::one(), HERMITIAN_TOL) {
            return Err(Error::NotNormalized(format!("μ̂(0) = {zero}")));
        }
        for (k, v) in &self.moments {
            let mirror = &self.moments[&neg(k)];
            if !v.approx_eq(&mirror.conj(), HERMITIAN_TOL) {
                return Err(Error::NotHermitian(k.clone()));
            }
        }
        match self.is_psd_exact() {
            Some(true) => Ok(()),
            Some(false) => Err(Error::NotPositiveDefinite(self.min_eigenvalue())),
            None => {
                let e = self.min_eigenvalue();
                if e < -PSD_TOL {
                    Err(Error::NotPositiveDefinite(e))
                } else {
                    Ok(())
                }
            }
        }
    }

    /// The Haar measure: `μ̂(0) = 1`, all other moments zero.
    pub fn haar(module: &Arc<FrequencyModule>, support: &[Frequency]) -> Result<Self> {
        let coords = coords_of(module, support)?;
        let set = check_support(module, coords.iter().map(Vec::as_slice))?;
        Ok(FSMeasure {
            module: Arc::clone(module),
            moments: set
                .into_iter()
                .map(|k| {
                    let v = if k.iter().all(|c| *c == 0) {
                        Scalar::one()
                    } else {
                        Scalar::zero()
                    };
                    (k, v)
                })
                .collect(),
        })
    }

    /// The point mass at `ψ`: `μ̂(λ) = ψ(χ_λ)`.
    pub fn dirac(point: &BohrPoint, support: &[Frequency]) -> Result<Self> {
        let module = point.module();
        let coords = coords_of(module, support)?;
        let set = check_support(module, coords.iter().map(Vec::as_slice))?;
        Ok(FSMeasure {
            module: Arc::clone(module),
            moments: set
                .into_iter()
                .map(|k| {
                    let v = Scalar::unit(&point.character_turns(&k));
                    (k, v)
                })
                .collect(),
        })
    }

    /// Convex combination `Σ wᵢ μᵢ` of measures on a common support.
    pub fn mix(parts: &[(f64, &FSMeasure)]) -> Result<Self> {
        let (_, first) = parts
            .first()
            .ok_or_else(|| Error::InvalidInput("empty mixture".into()))?;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > HERMITIAN_TOL {
            return Err(Error::InvalidInput("mixture weights must be a probability vector".into()));
        }
        let mut moments = BTreeMap::new();
        for k in first.moments.keys() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (w, m) in parts {
                ensure_same(&first.module, &m.module)?;
                let v = m
                    .moments
                    .get(k)
                    .ok_or_else(|| Error::InvalidInput("mixture supports differ".into()))?;
                acc += v.to_c64() * *w;
            }
            moments.insert(k.clone(), Scalar::Float(acc));
        }
        if parts.iter().any(|(_, m)| m.moments.len() != moments.len()) {
            return Err(Error::InvalidInput("mixture supports differ".into()));
        }
        moments.insert(vec![0; first.module.dim()], Scalar::one());
        Ok(FSMeasure {
            module: Arc::clone(&first.module),
            moments,
        })
    }

    pub fn module(&self) -> &Arc<FrequencyModule> {
        &self.module
    }

    pub fn support(&self) -> Vec<Frequency> {
        self.moments
            .keys()
            .map(|k| self.module.frequency(k.clone()).expect("checked rank"))
            .collect()
    }

    pub fn support_set(&self) -> BTreeSet<Vec<i64>> {
        self.moments.keys().cloned().collect()
    }

    pub fn moments(&self) -> impl Iterator<Item = (&[i64], &Scalar)> {
        self.moments.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn moment(&self, coords: &[i64]) -> Option<&Scalar> {
        self.moments.get(coords)
    }

    pub fn moment_of(&self, freq: &Frequency) -> Result<Option<&Scalar>> {
        ensure_same(&self.module, freq.module())?;
        Ok(self.moments.get(freq.coords()))
    }

    pub fn len(&self) -> usize {
        self.moments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moments.is_empty()
    }

    /// Moment matrices `[μ̂(λᵢ − λⱼ)]` over every maximal difference-closed subset.
    pub fn moment_matrices(&self) -> Vec<(Vec<Vec<i64>>, Vec<Vec<Scalar>>)> {
        difference_cliques(&self.support_set())
            .into_iter()
            .map(|basis| {
                let m = basis
                    .iter()
                    .map(|a| basis.iter().map(|b| self.moments[&diff(a, b)].clone()).collect())
                    .collect();
                (basis, m)
            })
            .collect()
    }

    /// Smallest eigenvalue over all moment matrices.
    pub fn min_eigenvalue(&self) -> f64 {
        self.moment_matrices()
            .iter()
            .map(|(_, m)| linalg::hermitian_min_eigenvalue(&linalg::to_matrix(m)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Exact PSD decision when every moment is rational, `None` otherwise.
    pub fn is_psd_exact(&self) -> Option<bool> {
        if !self.moments.values().all(Scalar::is_exact) {
            return None;
        }
        Some(self.moment_matrices().iter().all(|(_, m)| {
            let q: Vec<Vec<QComplex>> = m
                .iter()
                .map(|row| row.iter().map(|s| s.as_exact().expect("exact").clone()).collect())
                .collect();
            linalg::exact_is_psd(&q)
        }))
    }

    /// Image under `α_t`: `μ̂(λ) ↦ e^{iλt} μ̂(λ)`.
    pub fn pushforward(&self, t: &Real) -> FSMeasure {
        FSMeasure {
            module: Arc::clone(&self.module),
            moments: self
                .moments
                .iter()
                .map(|(k, v)| (k.clone(), v * &self.module.phase_of(k, t).unit()))
                .collect(),
        }
    }

    /// Checks `|μ̂(λ)|·|e^{iλt} − 1| ≤ tol` for every `λ ∈ F` and `t ∈ shifts`.
    pub fn is_invariant(&self, shifts: &[Real], tol: f64) -> InvarianceReport {
        let mut report = InvarianceReport {
            invariant: true,
            max_violation: 0.0,
            worst: None,
        };
        for (k, v) in &self.moments {
            if v.is_zero() {
                continue;
            }
            for t in shifts {
                let amount = v.abs() * self.module.phase_of(k, t).chord();
                if amount > report.max_violation {
                    report.max_violation = amount;
                    report.worst = Some(Violation {
                        frequency: k.clone(),
                        shift: t.clone(),
                        amount,
                    });
                }
            }
        }
        report.invariant = report.max_violation <= tol;
        report
    }

    /// `max_λ |μ̂(λ) − δ_{λ,0}|`.
    pub fn haar_deviation(&self) -> f64 {
        self.moments
            .iter()
            .map(|(k, v)| {
                if k.iter().all(|c| *c == 0) {
                    v.distance(&Scalar::one())
                } else {
                    v.abs()
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn equals_haar(&self, tol: f64) -> bool {
        self.haar_deviation() <= tol
    }

    /// Sets every moment that some shift in `shifts` moves to zero: the
    /// average of `μ` over the closed subgroup generated by the shifts.
    pub fn project_invariant(&self, shifts: &[Real]) -> FSMeasure {
        FSMeasure {
            module: Arc::clone(&self.module),
            moments: self
                .moments
                .iter()
                .map(|(k, v)| {
                    let fixed = shifts
                        .iter()
                        .all(|t| self.module.phase_of(k, t).is_full_turn(FULL_TURN_TOL));
                    (k.clone(), if fixed { v.clone() } else { Scalar::zero() })
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub frequency: Vec<i64>,
    pub shift: Real,
    pub amount: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InvarianceReport {
    pub invariant: bool,
    pub max_violation: f64,
    /// The frequency and shift attaining `max_violation`, when it is positive.
    pub worst: Option<Violation>,
}

/// A shift `t` with `λt ∉ 2πℤ`, forcing `μ̂(λ) = 0` for invariant measures.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub frequency: Vec<i64>,
    pub shift: Real,
    /// Whether `λt ∉ 2πℤ` was decided exactly rather than numerically.
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum UniquenessVerdict {
    ForcedHaar,
    /// Nonzero frequencies fixed by every shift; their moments are unconstrained.
    Undetermined { surviving: Vec<Vec<i64>> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniquenessReport {
    pub verdict: UniquenessVerdict,
    pub witnesses: Vec<Witness>,
}

impl UniquenessReport {
    pub fn is_forced_haar(&self) -> bool {
        self.verdict == UniquenessVerdict::ForcedHaar
    }

    pub fn surviving(&self) -> &[Vec<i64>] {
        match &self.verdict {
            UniquenessVerdict::ForcedHaar => &[],
            UniquenessVerdict::Undetermined { surviving } => surviving,
        }
    }
}

/// Decides whether invariance under every shift in `shifts` forces all
/// nonzero moments on `support` to vanish, i.e. forces the Haar measure.
pub fn uniqueness_verdict_coords(
    module: &Arc<FrequencyModule>,
    support: &BTreeSet<Vec<i64>>,
    shifts: &[Real],
) -> Result<UniquenessReport> {
    check_support(module, support.iter().map(Vec::as_slice))?;
    let mut witnesses = Vec::new();
    let mut surviving = Vec::new();
    for k in support {
        if k.iter().all(|c| *c == 0) {
            continue;
        }
        let killer = shifts.iter().find_map(|t| {
            let phase = module.phase_of(k, t);
            (!phase.is_full_turn(FULL_TURN_TOL)).then(|| Witness {
                frequency: k.clone(),
                shift: t.clone(),
                exact: phase.is_exact_decision(),
            })
        });
        match killer {
            Some(w) => witnesses.push(w),
            None => surviving.push(k.clone()),
        }
    }
    let verdict = if surviving.is_empty() {
        UniquenessVerdict::ForcedHaar
    } else {
        UniquenessVerdict::Undetermined { surviving }
    };
    Ok(UniquenessReport { verdict, witnesses })
}

pub fn uniqueness_verdict(
    module: &Arc<FrequencyModule>,
    support: &[Frequency],
    shifts: &[Real],
) -> Result<UniquenessReport> {
    let coords = coords_of(module, support)?;
    let set = check_support(module, coords.iter().map(Vec::as_slice))?;
    uniqueness_verdict_coords(module, &set, shifts)
}

/// Side length of the nonnegativity grid (`10⁴` points in total).
pub const DENSITY_GRID_1D: usize = 10_000;
pub const DENSITY_GRID_2D: usize = 100;

/// A nonnegative trigonometric-polynomial density `ρ(θ) = Σ a_k e^{ik·θ}`
/// on `T^d` (`d ≤ 2`), normalized against `dθ/(2π)^d` by `a_0 = 1`.
#[derive(Clone, Debug)]
pub struct TorusDensity {
    module: Arc<FrequencyModule>,
    coeffs: BTreeMap<Vec<i64>, Scalar>,
}

impl TorusDensity {
    pub fn new(
        module: &Arc<FrequencyModule>,
        coeffs: impl IntoIterator<Item = (Vec<i64>, Scalar)>,
    ) -> Result<Self> {
        if module.dim() == 0 || module.dim() > 2 {
            return Err(Error::InvalidInput("torus densities need 1 or 2 generators".into()));
        }
        let mut map = BTreeMap::new();
        for (k, v) in coeffs {
            module.check_dim(&k)?;
            if !v.is_zero() || k.iter().all(|c| *c == 0) {
                map.insert(k, v);
            }
        }
        let zero = map
            .get(&vec![0; module.dim()])
            .cloned()
            .unwrap_or_else(Scalar::zero);
        let normalized = match &zero {
            Scalar::Exact(z) => z == &QComplex::one(),
            Scalar::Float(z) => *z == Complex64::new(1.0, 0.0),
        };
        if !normalized {
            return Err(Error::NotNormalized(format!("zero mode {zero}")));
        }
        for (k, v) in &map {
            let mirror = map.get(&neg(k)).cloned().unwrap_or_else(Scalar::zero);
            if !v.approx_eq(&mirror.conj(), HERMITIAN_TOL) {
                return Err(Error::NotHermitian(k.clone()));
            }
        }
        let rho = TorusDensity {
            module: Arc::clone(module),
            coeffs: map,
        };
        let (value, at) = rho.grid_minimum();
        if value < -PSD_TOL {
            return Err(Error::NegativeDensity { value, at });
        }
        Ok(rho)
    }

    pub fn uniform(module: &Arc<FrequencyModule>) -> Result<Self> {
        Self::new(module, [(vec![0; module.dim()], Scalar::one())])
    }

    /// `|p|² / ‖p‖²` for a trigonometric polynomial `p`; nonnegative by construction.
    pub fn from_square(
        module: &Arc<FrequencyModule>,
        p: &[(Vec<i64>, Scalar)],
    ) -> Result<Self> {
        let norm = p.iter().fold(Scalar::zero(), |acc, (_, c)| &acc + &(c * &c.conj()));
        let inv = match &norm {
            Scalar::Exact(z) => Scalar::Exact(
                z.inv()
                    .ok_or_else(|| Error::InvalidInput("zero polynomial".into()))?,
            ),
            Scalar::Float(z) => {
                if z.norm() == 0.0 {
                    return Err(Error::InvalidInput("zero polynomial".into()));
                }
                Scalar::Float(1.0 / z)
            }
        };
        let mut coeffs: BTreeMap<Vec<i64>, Scalar> = BTreeMap::new();
        for (a, ca) in p {
            for (b, cb) in p {
                let k = diff(a, b);
                let v = &(ca * &cb.conj()) * &inv;
                let entry = coeffs.entry(k).or_insert_with(Scalar::zero);
                *entry = &*entry + &v;
            }
        }
        coeffs.insert(vec![0; module.dim()], Scalar::one());
        Self::new(module, coeffs)
    }

    pub fn module(&self) -> &Arc<FrequencyModule> {
        &self.module
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&[i64], &Scalar)> {
        self.coeffs.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// `ρ(θ)` with angles in radians.
    pub fn eval(&self, theta: &[f64]) -> f64 {
        self.coeffs
            .iter()
            .map(|(k, v)| {
                let phase: f64 = k.iter().zip(theta).map(|(n, a)| *n as f64 * a).sum();
                (v.to_c64() * Complex64::cis(phase)).re
            })
            .sum()
    }

    /// Minimum over the `10⁴`-point grid and where it is attained.
    pub fn grid_minimum(&self) -> (f64, Vec<f64>) {
        let mut best = (f64::INFINITY, Vec::new());
        let mut visit = |theta: Vec<f64>| {
            let v = self.eval(&theta);
            if v < best.0 {
                best = (v, theta);
            }
        };
        if self.module.dim() == 1 {
            for i in 0..DENSITY_GRID_1D {
                visit(vec![2.0 * PI * i as f64 / DENSITY_GRID_1D as f64]);
            }
        } else {
            let n = DENSITY_GRID_2D;
            for i in 0..n {
                for j in 0..n {
                    visit(vec![
                        2.0 * PI * i as f64 / n as f64,
                        2.0 * PI * j as f64 / n as f64,
                    ]);
                }
            }
        }
        best
    }

    /// Moments `μ̂(n) = ∫ e^{in·θ} ρ(θ) dθ/(2π)^d = a_{−n}` on `support`.
    pub fn moments(&self, support: &[Frequency]) -> Result<FSMeasure> {
        let coords = coords_of(&self.module, support)?;
        let set = check_support(&self.module, coords.iter().map(Vec::as_slice))?;
        FSMeasure::new(
            &self.module,
            set.into_iter().map(|k| {
                let v = self.coeffs.get(&neg(&k)).cloned().unwrap_or_else(Scalar::zero);
                (k, v)
            }),
        )
    }

    /// `∫_box ρ dθ/(2π)^d` for a product of angle intervals `[aⱼ, bⱼ]` in radians.
    pub fn box_mass(&self, bx: &[(f64, f64)]) -> Result<f64> {
        self.module.check_dim(&vec![0; bx.len()])?;
        if bx.iter().any(|(a, b)| !(b >= a) || b - a > 2.0 * PI + 1e-12) {
            return Err(Error::InvalidInput(
                "box sides must satisfy a ≤ b ≤ a + 2π".into(),
            ));
        }
        let side = |n: i64, (a, b): (f64, f64)| -> Complex64 {
            if n == 0 {
                Complex64::new(b - a, 0.0)
            } else {
                let n = n as f64;
                (Complex64::cis(n * b) - Complex64::cis(n * a)) / Complex64::new(0.0, n)
            }
        };
        let norm = (2.0 * PI).powi(bx.len() as i32);
        let total: Complex64 = self
            .coeffs
            .iter()
            .map(|(k, v)| {
                let prod: Complex64 = k.iter().zip(bx).map(|(n, s)| side(*n, *s)).product();
                v.to_c64() * prod
            })
            .sum();
        Ok(total.re / norm)
    }

    /// Density of the image measure under `α_t`: `ρ(θ − t·g)`.
    pub fn shifted(&self, t: &Real) -> TorusDensity {
        TorusDensity {
            module: Arc::clone(&self.module),
            coeffs: self
                .coeffs
                .iter()
                .map(|(k, v)| (k.clone(), v * &self.module.phase_of(k, t).unit().conj()))
                .collect(),
        }
    }

    /// `(μ(box), μ(box − t·g))`; equal for every box iff `μ` is `α_t`-invariant.
    pub fn set_invariance_check(&self, bx: &[(f64, f64)], t: &Real) -> Result<(f64, f64)> {
        let moved: Vec<(f64, f64)> = bx
            .iter()
            .zip(self.module.generators())
            .map(|((a, b), g)| {
                let s = g.value() * t.to_f64();
                (a - s, b - s)
            })
            .collect();
        Ok((self.box_mass(bx)?, self.box_mass(&moved)?))
    }

    pub fn is_uniform(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.values().all(|v| v.approx_eq(&Scalar::one(), 0.0))
    }
}

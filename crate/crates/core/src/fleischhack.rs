//! The space `ℝ ⊔ ℝ_Bohr`: the algebra `C₀(ℝ) ⊕ CAP`, its points, the
//! extended translation action, basis sets of the topology and measures
//! `μ_ℝ ⊕ μ_Bohr` together with their invariance analysis.

use std::cmp::Ordering;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::Zero;

use crate::ap::APFunction;
use crate::bohr::BohrPoint;
use crate::error::{Error, Result};
use crate::exact::{from_f64, Rational, Real, Scalar};
use crate::frequency::{ensure_same, FrequencyModule};
use crate::hilbert::{gram_matrix_coords, GramOperator};
use crate::measure::{
    difference_cliques, uniqueness_verdict_coords, FSMeasure, InvarianceReport, UniquenessReport,
};

/// Interval mass differences at or below this count as equal.
pub const R_TOL: f64 = 1e-12;
/// Invariance tolerance for the Bohr part of a `QMeasure`.
pub const BOHR_TOL: f64 = 1e-12;
const MAX_CHAIN: usize = 100_000;

/// Compactly supported piecewise-linear function, zero outside its
/// breakpoints. Stored as fixed rational breakpoints plus a real offset so
/// that translation never rounds.
#[derive(Clone, Debug, PartialEq)]
pub struct C0Function {
    offset: Real,
    breakpoints: Vec<Rational>,
    values: Vec<Scalar>,
}

impl C0Function {
    pub fn zero() -> Self {
        C0Function {
            offset: Real::zero(),
            breakpoints: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn new(breakpoints: Vec<Rational>, values: Vec<Scalar>) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("breakpoints must be strictly increasing".into()));
        }
        let ends = [values.first(), values.last()];
        if ends.into_iter().flatten().any(|v| v.abs() != 0.0) {
            return Err(Error::InvalidInput("C0 function must vanish at both ends".into()));
        }
        Ok(C0Function {
            offset: Real::zero(),
            breakpoints,
            values,
        })
    }

    /// Breakpoints given as floats are taken at their exact binary values.
    pub fn from_f64(breakpoints: &[f64], values: &[Complex64]) -> Result<Self> {
        let bps = breakpoints
            .iter()
            .map(|x| from_f64(*x).ok_or_else(|| Error::InvalidNumber(x.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Self::new(bps, values.iter().map(|v| Scalar::Float(*v)).collect())
    }

    /// Triangle through `(a, 0)`, `(b, 1)`, `(c, 0)`.
    pub fn hat(a: Rational, b: Rational, c: Rational) -> Result<Self> {
        Self::new(vec![a, b, c], vec![Scalar::zero(), Scalar::one(), Scalar::zero()])
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Scalar::is_zero)
    }

    /// Breakpoints in absolute position.
    pub fn breakpoints(&self) -> Vec<Real> {
        self.breakpoints
            .iter()
            .map(|b| self.offset.add(&Real::rational(b.clone())))
            .collect()
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    pub fn eval(&self, x: &Real) -> Scalar {
        let n = self.breakpoints.len();
        if n < 2 {
            return Scalar::zero();
        }
        let u = x.sub(&self.offset);
        let at = |i: usize| Real::rational(self.breakpoints[i].clone());
        if u.cmp_real(&at(0)) != Ordering::Greater || u.cmp_real(&at(n - 1)) != Ordering::Less {
            return Scalar::zero();
        }
        // first breakpoint strictly above u
        let (mut lo, mut hi) = (0, n - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if u.cmp_real(&at(mid)) == Ordering::Less {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let (a, b) = (&self.breakpoints[lo], &self.breakpoints[hi]);
        let (va, vb) = (&self.values[lo], &self.values[hi]);
        let frac = match u.as_rational() {
            Some(q) => Scalar::rational((q - a) / (b - a)),
            None => {
                let (a, b) = (crate::exact::to_f64(a), crate::exact::to_f64(b));
                Scalar::float((u.to_f64() - a) / (b - a), 0.0)
            }
        };
        va + &(&frac * &(vb - va))
    }

    pub fn eval_f64(&self, x: f64) -> Complex64 {
        self.eval(&Real::Float(x)).to_c64()
    }

    /// `θ_t* f(x) = f(x + t)`.
    pub fn pullback(&self, t: &Real) -> C0Function {
        C0Function {
            offset: self.offset.sub(t),
            ..self.clone()
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(Scalar::abs).fold(0.0, f64::max)
    }

    /// Largest slope `|Δv| / Δx` over the pieces.
    pub fn max_slope(&self) -> f64 {
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(b, v)| v[1].distance(&v[0]) / crate::exact::to_f64(&(&b[1] - &b[0])))
            .fold(0.0, f64::max)
    }

    pub fn scale(&self, s: &Scalar) -> C0Function {
        if s.is_zero() {
            return C0Function::zero();
        }
        C0Function {
            values: self.values.iter().map(|v| v * s).collect(),
            ..self.clone()
        }
    }

    /// Pointwise sum. Offsets must agree or both be rational.
    pub fn add(&self, other: &C0Function) -> Result<C0Function> {
        if self.breakpoints.is_empty() {
            return Ok(other.clone());
        }
        if other.breakpoints.is_empty() {
            return Ok(self.clone());
        }
        let (offset, da, db) = if self.offset == other.offset {
            (self.offset.clone(), Rational::zero(), Rational::zero())
        } else {
            match (self.offset.as_rational(), other.offset.as_rational()) {
                (Some(a), Some(b)) => (Real::zero(), a, b),
                _ => {
                    return Err(Error::InvalidInput(
                        "cannot add C0 functions translated by incommensurable amounts".into(),
                    ))
                }
            }
        };
        let mut points: Vec<Rational> = self
            .breakpoints
            .iter()
            .map(|b| b + &da)
            .chain(other.breakpoints.iter().map(|b| b + &db))
            .collect();
        points.sort();
        points.dedup();
        let values = points
            .iter()
            .map(|p| {
                let x = offset.add(&Real::rational(p.clone()));
                &self.eval(&x) + &other.eval(&x)
            })
            .collect();
        Ok(C0Function {
            offset,
            breakpoints: points,
            values,
        })
    }

    /// `‖f − g‖_∞`, attained at a breakpoint of one of the two functions.
    pub fn sup_distance(&self, other: &C0Function) -> f64 {
        self.breakpoints()
            .iter()
            .chain(&other.breakpoints())
            .map(|x| self.eval(x).distance(&other.eval(x)))
            .fold(0.0, f64::max)
    }
}

/// An element `f₀ ⊕ f_AP` of `C₀(ℝ) ⊕ CAP`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtendedFunction {
    pub c0: C0Function,
    pub ap: APFunction,
}

impl ExtendedFunction {
    pub fn new(c0: C0Function, ap: APFunction) -> Self {
        ExtendedFunction { c0, ap }
    }

    pub fn from_c0(c0: C0Function, module: &Arc<FrequencyModule>) -> Self {
        Self::new(c0, APFunction::zero(module))
    }

    pub fn from_ap(ap: APFunction) -> Self {
        Self::new(C0Function::zero(), ap)
    }

    pub fn module(&self) -> &Arc<FrequencyModule> {
        self.ap.module()
    }

    pub fn eval(&self, x: &Real) -> Scalar {
        &self.c0.eval(x) + &self.ap.eval(x)
    }

    pub fn pullback(&self, t: &Real) -> ExtendedFunction {
        Self::new(self.c0.pullback(t), self.ap.translate_pullback(t))
    }

    /// The value if `f` is a constant function.
    pub fn as_constant(&self) -> Option<Scalar> {
        if !self.c0.is_zero() || self.ap.terms().any(|(k, _)| k.iter().any(|c| *c != 0)) {
            return None;
        }
        Some(self.ap.coefficient(&vec![0; self.ap.module().dim()]))
    }

    pub fn add(&self, g: &ExtendedFunction) -> Result<ExtendedFunction> {
        Ok(Self::new(self.c0.add(&g.c0)?, self.ap.add(&g.ap)?))
    }

    pub fn neg(&self) -> ExtendedFunction {
        self.scale(&Scalar::int(-1))
    }

    pub fn sub(&self, g: &ExtendedFunction) -> Result<ExtendedFunction> {
        self.add(&g.neg())
    }

    pub fn scale(&self, s: &Scalar) -> ExtendedFunction {
        Self::new(self.c0.scale(s), self.ap.scale(s))
    }

    /// Products stay in `C₀(ℝ) ⊕ CAP` (with piecewise-linear `C₀` part) only
    /// when one factor is constant or both are almost periodic.
    pub fn mul(&self, g: &ExtendedFunction) -> Result<ExtendedFunction> {
        if let Some(c) = self.as_constant() {
            return Ok(g.scale(&c));
        }
        if let Some(c) = g.as_constant() {
            return Ok(self.scale(&c));
        }
        if self.c0.is_zero() && g.c0.is_zero() {
            return Ok(Self::from_ap(self.ap.mul(&g.ap)?));
        }
        Err(Error::InvalidInput(
            "products involving hat functions must have a constant factor".into(),
        ))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum QPoint {
    Real(Real),
    Bohr(BohrPoint),
}

impl QPoint {
    pub fn is_real(&self) -> bool {
        matches!(self, QPoint::Real(_))
    }
}

/// The pairing of a point with `f₀ ⊕ f_AP`: `f₀(x) + f_AP(x)` on `ℝ`,
/// `ψ(f_AP)` on `ℝ_Bohr` where the `C₀` part vanishes.
pub fn xi_eval(p: &QPoint, f: &ExtendedFunction) -> Result<Scalar> {
    match p {
        QPoint::Real(x) => Ok(f.eval(x)),
        QPoint::Bohr(psi) => {
            ensure_same(psi.module(), f.module())?;
            psi.eval(&f.ap)
        }
    }
}

/// `t + x` on `ℝ`, `ι(t) ⊕ ψ` on `ℝ_Bohr`.
pub fn theta_tilde(t: &Real, p: &QPoint) -> QPoint {
    match p {
        QPoint::Real(x) => QPoint::Real(t.add(x)),
        QPoint::Bohr(psi) => QPoint::Bohr(
            BohrPoint::iota(t, psi.module())
                .mul(psi)
                .expect("same module"),
        ),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgreementReport {
    pub agrees: bool,
    pub residual: f64,
    /// `ξ(Θ̃_t p)(f)`.
    pub moved_point: Scalar,
    /// `ξ(p)(θ_t* f)`.
    pub moved_function: Scalar,
}

pub fn extension_agreement_check(
    t: &Real,
    p: &QPoint,
    f: &ExtendedFunction,
    tol: f64,
) -> Result<AgreementReport> {
    let moved_point = xi_eval(&theta_tilde(t, p), f)?;
    let moved_function = xi_eval(p, &f.pullback(t))?;
    let residual = moved_point.distance(&moved_function);
    Ok(AgreementReport {
        agrees: residual <= tol,
        residual,
        moved_point,
        moved_function,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: Real,
    pub hi: Real,
}

impl Interval {
    pub fn new(lo: Real, hi: Real) -> Result<Self> {
        if lo.cmp_real(&hi) == Ordering::Greater {
            return Err(Error::InvalidInput(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn contains_open(&self, x: &Real) -> bool {
        x.cmp_real(&self.lo) == Ordering::Greater && x.cmp_real(&self.hi) == Ordering::Less
    }

    pub fn contains_closed(&self, x: &Real) -> bool {
        x.cmp_real(&self.lo) != Ordering::Less && x.cmp_real(&self.hi) != Ordering::Greater
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Disk {
    pub center: Scalar,
    pub radius: Rational,
}

impl Disk {
    pub fn new(center: Scalar, radius: Rational) -> Result<Self> {
        if radius <= Rational::zero() {
            return Err(Error::InvalidInput("disk radius must be positive".into()));
        }
        Ok(Disk { center, radius })
    }

    pub fn contains(&self, z: &Scalar) -> bool {
        match (z, &self.center) {
            (Scalar::Exact(a), Scalar::Exact(c)) => (a - c).norm_sqr() < &self.radius * &self.radius,
            _ => z.distance(&self.center) < crate::exact::to_f64(&self.radius),
        }
    }
}

/// Generators of the topology on `ℝ ⊔ ℝ_Bohr`.
#[derive(Clone, Debug, PartialEq)]
pub enum BasisSet {
    /// `V ⊆ ℝ`, a union of open intervals.
    OpenReal(Vec<Interval>),
    /// `K^c ⊔ ℝ_Bohr` for `K` a union of closed intervals.
    CompactComplement(Vec<Interval>),
    /// `{p : ξ(p)(f) ∈ U}` for `U` a union of open disks.
    FunctionPreimage(ExtendedFunction, Vec<Disk>),
}

pub fn topology_membership(p: &QPoint, set: &BasisSet) -> Result<bool> {
    Ok(match (set, p) {
        (BasisSet::OpenReal(v), QPoint::Real(x)) => v.iter().any(|i| i.contains_open(x)),
        (BasisSet::OpenReal(_), QPoint::Bohr(_)) => false,
        (BasisSet::CompactComplement(k), QPoint::Real(x)) => !k.iter().any(|i| i.contains_closed(x)),
        (BasisSet::CompactComplement(_), QPoint::Bohr(_)) => true,
        (BasisSet::FunctionPreimage(f, disks), p) => {
            let z = xi_eval(p, f)?;
            disks.iter().any(|d| d.contains(&z))
        }
    })
}

/// The `ℝ` part of a measure: a nonnegative piecewise-linear density plus
/// point masses. The density extends constantly beyond its outer
/// breakpoints, so it has finite mass only when both end values are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct RPart {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
    atoms: Vec<(f64, f64)>,
}

impl RPart {
    pub fn zero() -> Self {
        RPart {
            breakpoints: Vec::new(),
            values: Vec::new(),
            atoms: Vec::new(),
        }
    }

    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, atoms: Vec<(f64, f64)>) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::InvalidInput(format!(
                "{} breakpoints but {} values",
                breakpoints.len(),
                values.len()
            )));
        }
        let finite = breakpoints.iter().chain(&values).all(|x| x.is_finite())
            && atoms.iter().all(|(x, m)| x.is_finite() && m.is_finite());
        if !finite {
            return Err(Error::InvalidInput("r_part entries must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput("breakpoints must be strictly increasing".into()));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(Error::NegativeDensity {
                value: *v,
                at: vec![breakpoints[i]],
            });
        }
        if atoms.iter().any(|(_, m)| *m < 0.0) {
            return Err(Error::InvalidInput("atom masses must be nonnegative".into()));
        }
        if [values.first(), values.last()].into_iter().flatten().any(|v| *v != 0.0) {
            return Err(Error::InfiniteMass);
        }
        Ok(RPart {
            breakpoints,
            values,
            atoms,
        })
    }

    /// Triangle on `[a, c]` with apex `peak` at `b`.
    pub fn hat(a: f64, b: f64, c: f64, peak: f64) -> Result<Self> {
        Self::new(vec![a, b, c], vec![0.0, peak, 0.0], Vec::new())
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn density(&self, x: f64) -> f64 {
        let b = &self.breakpoints;
        if b.len() < 2 || x <= b[0] || x >= b[b.len() - 1] {
            return 0.0;
        }
        let i = b.partition_point(|p| *p <= x) - 1;
        let s = (x - b[i]) / (b[i + 1] - b[i]);
        self.values[i] + s * (self.values[i + 1] - self.values[i])
    }

    /// `μ_ℝ([lo, hi])`, atoms on the boundary included.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        if hi < lo {
            return 0.0;
        }
        let mut total = 0.0;
        for w in self.breakpoints.windows(2) {
            let (c, d) = (w[0].max(lo), w[1].min(hi));
            if c < d {
                total += (d - c) * (self.density(c) + self.density(d)) / 2.0;
            }
        }
        total
            + self
                .atoms
                .iter()
                .filter(|(x, _)| lo <= *x && *x <= hi)
                .map(|(_, m)| m)
                .sum::<f64>()
    }

    pub fn total_mass(&self) -> f64 {
        let density: f64 = self
            .breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(b, v)| (b[1] - b[0]) * (v[0] + v[1]) / 2.0)
            .sum();
        density + self.atoms.iter().map(|(_, m)| m).sum::<f64>()
    }

    /// Smallest interval containing all mass, if any.
    pub fn hull(&self) -> Option<(f64, f64)> {
        let pts = self.breakpoints.iter().chain(self.atoms.iter().map(|(x, _)| x));
        pts.fold(None, |acc, &x| match acc {
            None => Some((x, x)),
            Some((a, b)) => Some((a.min(x), b.max(x))),
        })
    }

    /// Intervals on which comparing `μ(K)` with `μ(K + t)` decides
    /// invariance: a chain of `t`-translates covering the support, and the
    /// gaps between breakpoints, atoms and their `±t` shifts.
    pub fn spanning_family(&self, t: f64) -> Vec<(f64, f64)> {
        let Some((lo, hi)) = self.hull() else {
            return Vec::new();
        };
        let s = t.abs();
        let steps = (((hi - lo) / s).ceil() as usize).min(MAX_CHAIN) + 1;
        let mut family: Vec<(f64, f64)> = (0..=steps)
            .map(|n| (lo + n as f64 * s, lo + (n + 1) as f64 * s))
            .collect();
        family.push((lo - s, lo));
        let mut pts: Vec<f64> = Vec::new();
        for &x in self.breakpoints.iter().chain(self.atoms.iter().map(|(x, _)| x)) {
            pts.extend([x - t, x, x + t]);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        family.extend(pts.windows(2).map(|w| (w[0], w[1])));
        family.extend(self.atoms.iter().map(|(x, _)| (*x, *x)));
        family
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RVerdict {
    /// `μ(K) = μ(K + t)` on the whole spanning family.
    Invariant { mass: f64 },
    Violated {
        interval: (f64, f64),
        mass: f64,
        shifted_mass: f64,
    },
}

impl RVerdict {
    pub fn is_invariant(&self) -> bool {
        matches!(self, RVerdict::Invariant { .. })
    }
}

fn nonzero_shift(t: &Real) -> Result<f64> {
    let s = t.to_f64();
    if t.is_zero() || s == 0.0 || !s.is_finite() {
        return Err(Error::InvalidInput(
            "translation invariance under t = 0 is vacuous".into(),
        ));
    }
    Ok(s)
}

pub fn r_part_invariance_verdict(r: &RPart, t: &Real) -> Result<RVerdict> {
    let t = nonzero_shift(t)?;
    let mut worst: Option<((f64, f64), f64, f64)> = None;
    let mut gap = 0.0;
    for (a, b) in r.spanning_family(t) {
        let (m, shifted) = (r.mass(a, b), r.mass(a + t, b + t));
        if (m - shifted).abs() > gap {
            gap = (m - shifted).abs();
            worst = Some(((a, b), m, shifted));
        }
    }
    Ok(match worst {
        Some((interval, mass, shifted_mass)) if gap > R_TOL => RVerdict::Violated {
            interval,
            mass,
            shifted_mass,
        },
        _ => RVerdict::Invariant {
            mass: r.total_mass(),
        },
    })
}

/// A `period`-periodic nonnegative piecewise-linear density: the shape any
/// translation-invariant measure on `ℝ` must have.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicDensity {
    period: f64,
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl PeriodicDensity {
    /// Breakpoints must run from `0` to `period`, with equal end values.
    pub fn new(period: f64, breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let ok = period > 0.0
            && period.is_finite()
            && breakpoints.len() >= 2
            && breakpoints.len() == values.len()
            && breakpoints[0] == 0.0
            && breakpoints[breakpoints.len() - 1] == period
            && breakpoints.windows(2).all(|w| w[0] < w[1])
            && values.iter().all(|v| *v >= 0.0 && v.is_finite())
            && values[0] == values[values.len() - 1];
        if !ok {
            return Err(Error::InvalidInput("malformed periodic density".into()));
        }
        Ok(PeriodicDensity {
            period,
            breakpoints,
            values,
        })
    }

    /// Lebesgue measure seen as a `period`-periodic density.
    pub fn lebesgue(period: f64) -> Result<Self> {
        Self::new(period, vec![0.0, period], vec![1.0, 1.0])
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    /// `∫_lo^hi ρ`, integrated piece by piece over every period it meets.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let first = (lo / self.period).floor() as i64;
        let last = (hi / self.period).floor() as i64;
        let mut total = 0.0;
        for k in first..=last {
            let base = k as f64 * self.period;
            for (b, v) in self.breakpoints.windows(2).zip(self.values.windows(2)) {
                let (x0, x1) = (base + b[0], base + b[1]);
                let (c, d) = (x0.max(lo), x1.min(hi));
                if c < d {
                    let f = |x: f64| v[0] + (x - x0) / (x1 - x0) * (v[1] - v[0]);
                    total += (d - c) * (f(c) + f(d)) / 2.0;
                }
            }
        }
        total
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChainStep {
    pub n: u32,
    /// `μ([0, n·t])` integrated directly.
    pub mass: f64,
    /// `n · μ([0, t])`.
    pub expected: f64,
}

/// `μ([0, n·t])` against `n·μ([0, t])` for `n = 1..=n_max`.
pub fn divergence_chain(density: &PeriodicDensity, t: &Real, n_max: u32) -> Result<Vec<ChainStep>> {
    let s = nonzero_shift(t)?.abs();
    let unit = density.mass(0.0, s);
    Ok((1..=n_max)
        .map(|n| ChainStep {
            n,
            mass: density.mass(0.0, n as f64 * s),
            expected: n as f64 * unit,
        })
        .collect())
}

/// A `t`-invariant `μ_ℝ` gives every interval `[nt, (n+1)t]` the same mass,
/// so `μ_ℝ([0, Nt]) = N·μ_ℝ([0, t])` grows without bound unless it is zero
/// on all translates of `[0, t]`. Finite invariant `μ_ℝ` therefore vanish.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantMassTheorem {
    pub shift: f64,
    pub max_mass: f64,
    /// The chain for Lebesgue measure, the invariant density with unit rate.
    pub chain: Vec<ChainStep>,
}

pub const CHAIN_LENGTH: u32 = 16;

pub fn max_invariant_r_mass(t: &Real) -> Result<InvariantMassTheorem> {
    let s = nonzero_shift(t)?;
    let chain = divergence_chain(&PeriodicDensity::lebesgue(s.abs())?, t, CHAIN_LENGTH)?;
    Ok(InvariantMassTheorem {
        shift: s,
        max_mass: 0.0,
        chain,
    })
}

/// `μ_ℝ ⊕ (1 − μ_ℝ(ℝ))·μ_Bohr` with `μ_Bohr` normalized.
#[derive(Clone, Debug, PartialEq)]
pub struct QMeasure {
    pub r_part: RPart,
    pub bohr_part: FSMeasure,
}

impl QMeasure {
    pub fn new(r_part: RPart, bohr_part: FSMeasure) -> Result<Self> {
        let m = r_part.total_mass();
        if m > 1.0 + R_TOL {
            return Err(Error::NotNormalized(format!("r_part mass {m} exceeds 1")));
        }
        Ok(QMeasure { r_part, bohr_part })
    }

    pub fn standard(bohr_haar: FSMeasure) -> Self {
        QMeasure {
            r_part: RPart::zero(),
            bohr_part: bohr_haar,
        }
    }

    pub fn r_mass(&self) -> f64 {
        self.r_part.total_mass()
    }

    pub fn bohr_weight(&self) -> f64 {
        1.0 - self.r_mass()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum QVerdict {
    /// Invariance under the shifts forces `μ_ℝ = 0` and `μ_Bohr = Haar`.
    ForcedStandard,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RWitness {
    pub shift: Real,
    pub interval: (f64, f64),
    pub mass: f64,
    pub shifted_mass: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QInvarianceReport {
    pub verdict: QVerdict,
    /// Whether the given measure is itself invariant under every shift.
    pub invariant: bool,
    pub r_mass: f64,
    pub r_forced_zero: bool,
    pub r_witness: Option<RWitness>,
    pub bohr: UniquenessReport,
    pub bohr_invariance: InvarianceReport,
    /// Gram matrix of the Bohr part on a largest difference-closed basis.
    pub gram: GramOperator,
}

pub fn q_invariance_verdict(mu: &QMeasure, shifts: &[Real]) -> Result<QInvarianceReport> {
    if shifts.is_empty() {
        return Err(Error::InvalidInput("at least one shift is required".into()));
    }
    let mut r_witness = None;
    for t in shifts.iter().filter(|t| !t.is_zero()) {
        if let RVerdict::Violated {
            interval,
            mass,
            shifted_mass,
        } = r_part_invariance_verdict(&mu.r_part, t)?
        {
            r_witness = Some(RWitness {
                shift: t.clone(),
                interval,
                mass,
                shifted_mass,
            });
            break;
        }
    }
    let r_forced_zero = shifts.iter().any(|t| !t.is_zero());
    let bohr_part = &mu.bohr_part;
    let support = bohr_part.support_set();
    let bohr = uniqueness_verdict_coords(bohr_part.module(), &support, shifts)?;
    let bohr_invariance = bohr_part.is_invariant(shifts, BOHR_TOL);
    let basis = difference_cliques(&support)
        .into_iter()
        .max_by_key(|c| c.len())
        .unwrap_or_default();
    let gram = gram_matrix_coords(bohr_part, &basis)?;
    let verdict = if r_forced_zero && bohr.is_forced_haar() {
        QVerdict::ForcedStandard
    } else {
        QVerdict::Undetermined
    };
    Ok(QInvarianceReport {
        verdict,
        invariant: r_witness.is_none() && bohr_invariance.invariant,
        r_mass: mu.r_mass(),
        r_forced_zero,
        r_witness,
        bohr,
        bohr_invariance,
        gram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rational};

    fn z() -> Arc<FrequencyModule> {
        FrequencyModule::integers()
    }

    #[test]
    fn xi_examples() {
        let m = z();
        let hat = C0Function::hat(int(-1), int(0), int(1)).unwrap();
        let f = ExtendedFunction::from_c0(hat.clone(), &m);
        assert_eq!(xi_eval(&QPoint::Real(Real::zero()), &f).unwrap(), Scalar::one());
        assert_eq!(
            xi_eval(&QPoint::Real(Real::rational(rational(1, 4))), &f).unwrap(),
            Scalar::rational(rational(3, 4))
        );
        let psi = BohrPoint::iota(&Real::int(3), &m);
        assert_eq!(xi_eval(&QPoint::Bohr(psi.clone()), &f).unwrap(), Scalar::zero());
        let chi = APFunction::character(&m.frequency(vec![1]).unwrap());
        let g = ExtendedFunction::new(hat, chi.clone());
        let x = Real::rational(rational(1, 2));
        assert_eq!(
            xi_eval(&QPoint::Real(x.clone()), &g).unwrap(),
            &Scalar::rational(rational(1, 2)) + &chi.eval(&x)
        );
    }

    #[test]
    fn theta_tilde_examples() {
        let m = z();
        let p = QPoint::Real(Real::rational(rational(5, 2)));
        assert_eq!(theta_tilde(&Real::int(1), &p), QPoint::Real(Real::rational(rational(7, 2))));
        assert_eq!(theta_tilde(&Real::zero(), &p), p);
        let id = QPoint::Bohr(BohrPoint::identity(&m));
        let t = Real::Float(0.37);
        assert_eq!(theta_tilde(&t, &id), QPoint::Bohr(BohrPoint::iota(&t, &m)));
        assert_eq!(theta_tilde(&Real::zero(), &id), id);
    }

    #[test]
    fn agreement_examples() {
        let m = z();
        let hat = C0Function::hat(int(-1), int(0), int(2)).unwrap();
        let f = ExtendedFunction::from_c0(hat.clone(), &m);
        for t in [Real::Float(0.3), Real::pi_multiple(rational(1, 7)), Real::int(-1)] {
            let r = extension_agreement_check(&t, &QPoint::Real(Real::Float(-0.2)), &f, 0.0).unwrap();
            assert_eq!(r.residual, 0.0);
        }
        let chi = APFunction::character(&m.frequency(vec![3]).unwrap());
        let g = ExtendedFunction::new(hat, chi);
        let psi = QPoint::Bohr(BohrPoint::iota(&Real::Float(1.1), &m));
        let r = extension_agreement_check(&Real::Float(0.4), &psi, &g, 1e-12).unwrap();
        assert!(r.agrees, "{r:?}");
        let expected = Complex64::cis(3.0 * 0.4) * Complex64::cis(3.0 * 1.1);
        assert!((r.moved_point.to_c64() - expected).norm() < 1e-12);
    }

    #[test]
    fn c0_rejects_nonvanishing_ends() {
        let err = C0Function::new(vec![int(0), int(1)], vec![Scalar::one(), Scalar::zero()]);
        assert!(err.is_err());
        assert!(C0Function::new(vec![int(1), int(0)], vec![Scalar::zero(); 2]).is_err());
    }

    #[test]
    fn c0_pullback_and_slope() {
        let hat = C0Function::hat(int(0), int(1), int(3)).unwrap();
        let moved = hat.pullback(&Real::int(1));
        assert_eq!(moved.eval(&Real::zero()), Scalar::one());
        assert_eq!(hat.max_slope(), 1.0);
        let d = hat.sup_distance(&hat.pullback(&Real::rational(rational(1, 10))));
        assert!(d <= 0.1 + 1e-15);
        assert!((d - 0.1).abs() < 1e-15);
    }

    #[test]
    fn membership_examples() {
        let m = z();
        let open = BasisSet::OpenReal(vec![Interval::new(Real::int(1), Real::int(3)).unwrap()]);
        assert!(topology_membership(&QPoint::Real(Real::int(2)), &open).unwrap());
        assert!(!topology_membership(&QPoint::Real(Real::int(3)), &open).unwrap());
        let psi = QPoint::Bohr(BohrPoint::iota(&Real::Float(0.5), &m));
        assert!(!topology_membership(&psi, &open).unwrap());
        let co = BasisSet::CompactComplement(vec![Interval::new(Real::int(-5), Real::int(5)).unwrap()]);
        assert!(topology_membership(&psi, &co).unwrap());
        assert!(!topology_membership(&QPoint::Real(Real::int(5)), &co).unwrap());
        assert!(topology_membership(&QPoint::Real(Real::pi_multiple(int(2))), &co).unwrap());
        let chi = APFunction::character(&m.frequency(vec![1]).unwrap());
        let pre = BasisSet::FunctionPreimage(
            ExtendedFunction::from_ap(chi),
            vec![Disk::new(Scalar::one(), rational(1, 10)).unwrap()],
        );
        assert!(topology_membership(&QPoint::Real(Real::rational(rational(1, 20))), &pre).unwrap());
        assert!(!topology_membership(&QPoint::Real(Real::rational(rational(1, 5))), &pre).unwrap());
    }

    #[test]
    fn r_part_examples() {
        let zero = RPart::zero();
        assert_eq!(
            r_part_invariance_verdict(&zero, &Real::int(1)).unwrap(),
            RVerdict::Invariant { mass: 0.0 }
        );
        let hat = RPart::hat(0.0, 0.5, 1.0, 2.0).unwrap();
        assert!((hat.total_mass() - 1.0).abs() < 1e-15);
        match r_part_invariance_verdict(&hat, &Real::int(1)).unwrap() {
            RVerdict::Violated {
                interval,
                mass,
                shifted_mass,
            } => {
                assert_eq!(interval, (0.0, 1.0));
                assert!((mass - 1.0).abs() < 1e-15);
                assert_eq!(shifted_mass, 0.0);
            }
            v => panic!("{v:?}"),
        }
        assert_eq!(RPart::new(vec![0.0, 1.0], vec![1.0, 1.0], vec![]), Err(Error::InfiniteMass));
        assert!(r_part_invariance_verdict(&hat, &Real::zero()).is_err());
        let atom = RPart::new(vec![], vec![], vec![(0.0, 0.5)]).unwrap();
        assert!(!r_part_invariance_verdict(&atom, &Real::Float(0.25)).unwrap().is_invariant());
    }

    #[test]
    fn divergence_chain_is_linear() {
        let th = max_invariant_r_mass(&Real::Float(0.7)).unwrap();
        assert_eq!(th.max_mass, 0.0);
        for step in &th.chain {
            assert!((step.mass - step.expected).abs() < 1e-12);
        }
        assert!((th.chain.last().unwrap().mass - 16.0 * 0.7).abs() < 1e-12);
    }

    #[test]
    fn q_examples() {
        let m = z();
        let support: Vec<_> = (-2..=2).map(|k| m.frequency(vec![k]).unwrap()).collect();
        let haar = FSMeasure::haar(&m, &support).unwrap();
        let standard = QMeasure::standard(haar.clone());
        let r = q_invariance_verdict(&standard, &[Real::int(1)]).unwrap();
        assert_eq!(r.verdict, QVerdict::ForcedStandard);
        assert!(r.invariant);
        assert!(r.gram.is_identity(0.0));
        assert_eq!(r.gram.size(), 3);
        let hat = QMeasure::new(RPart::hat(0.0, 0.5, 1.0, 1.0).unwrap(), haar).unwrap();
        let r = q_invariance_verdict(&hat, &[Real::int(1)]).unwrap();
        assert!(!r.invariant);
        assert!(r.r_witness.is_some());
        let trivial = FSMeasure::haar(&m, &[m.zero()]).unwrap();
        let r = q_invariance_verdict(&QMeasure::standard(trivial), &[Real::int(1)]).unwrap();
        assert!(r.bohr.is_forced_haar());
        assert!(q_invariance_verdict(&standard, &[]).is_err());
    }
}

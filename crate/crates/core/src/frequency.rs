//! Finitely generated frequency groups `Λ = ℤg₁ ⊕ … ⊕ ℤg_d ⊂ ℝ`.
//!
//! A [`Frequency`] is an integer coordinate vector over the generators of
//! its [`FrequencyModule`]; the real value is only ever computed, never
//! stored, so equality of frequencies is exact.

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{self, parse_rational, PhaseClass, PiLinear, Rational, Real};

/// Coefficient bound of the integer-relation scan.
pub const RELATION_BOUND: i64 = 20;
/// `|Σ nᵢgᵢ|` below this counts as a relation.
pub const RELATION_TOL: f64 = 1e-9;
/// Default number of significant digits for symbolic constants.
pub const DEFAULT_DIGITS: usize = 50;
/// Largest supported module rank (the relation scan is exponential in it).
pub const MAX_RANK: usize = 8;

const CONSTANTS: &[(&str, &str)] = &[
    ("pi", "3.1415926535897932384626433832795028841971693993751058209749445923"),
    ("sqrt2", "1.414213562373095048801688724209698078569671875376948073176679738"),
    ("sqrt3", "1.7320508075688772935274463415058723669428052538103806280558069795"),
    ("sqrt5", "2.2360679774997896964091736687312762354406183596115257242708972454"),
    ("e", "2.7182818284590452353602874713526624977572470936999595749669676277"),
    ("phi", "1.6180339887498948482045868343656381177203091798057628621354486227"),
];

/// Significant digits for symbolic constants, from `BOHR_PRECISION` (default 50).
pub fn working_digits() -> usize {
    std::env::var("BOHR_PRECISION")
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map(|d| d.clamp(1, 64))
        .unwrap_or(DEFAULT_DIGITS)
}

pub fn known_constant(name: &str, digits: usize) -> Option<String> {
    let (_, full) = CONSTANTS.iter().find(|(n, _)| *n == name)?;
    let mut out = String::new();
    let mut kept = 0;
    for c in full.chars() {
        if c == '.' {
            out.push(c);
            continue;
        }
        if kept == digits {
            break;
        }
        out.push(c);
        kept += 1;
    }
    Some(out.trim_end_matches('.').to_string())
}

pub fn is_known_constant(name: &str) -> bool {
    CONSTANTS.iter().any(|(n, _)| *n == name)
}

#[derive(Clone, Debug)]
pub struct Generator {
    symbol: Option<String>,
    decimal: String,
    scale: Rational,
    value: Rational,
    value_f64: f64,
    exact: Option<PiLinear>,
}

impl PartialEq for Generator {
    fn eq(&self, other: &Self) -> bool {
        self.symbol == other.symbol && self.decimal == other.decimal && self.scale == other.scale
    }
}

impl Generator {
    /// A rational generator `q`.
    pub fn rational(q: Rational) -> Result<Self> {
        Self::from_parts(None, "1", q)
    }

    pub fn integer(n: i64) -> Result<Self> {
        Self::rational(exact::int(n))
    }

    /// `scale · c` for a built-in constant `c` (`pi`, `sqrt2`, `sqrt3`,
    /// `sqrt5`, `e`, `phi`) at [`working_digits`] precision.
    pub fn constant(name: &str, scale: Rational) -> Result<Self> {
        Self::constant_with_digits(name, scale, working_digits())
    }

    pub fn constant_with_digits(name: &str, scale: Rational, digits: usize) -> Result<Self> {
        let decimal =
            known_constant(name, digits).ok_or_else(|| Error::UnknownSymbol(name.to_string()))?;
        Self::from_parts(Some(name.to_string()), &decimal, scale)
    }

    /// A user-named generator with the given decimal expansion.
    pub fn named(name: &str, decimal: &str, scale: Rational) -> Result<Self> {
        Self::from_parts(Some(name.to_string()), decimal, scale)
    }

    pub fn from_parts(symbol: Option<String>, decimal: &str, scale: Rational) -> Result<Self> {
        let base = parse_rational(decimal)
            .map_err(|_| Error::InvalidGenerator(format!("bad decimal `{decimal}`")))?;
        let value = &base * &scale;
        if value.is_zero() {
            return Err(Error::InvalidGenerator("generator value must be nonzero".into()));
        }
        let value_f64 = exact::to_f64(&value);
        if !value_f64.is_finite() {
            return Err(Error::InvalidGenerator("generator value must be finite".into()));
        }
        let exact = match symbol.as_deref() {
            None => Some(PiLinear::new(value.clone(), Rational::zero())),
            Some("pi") => Some(PiLinear::new(Rational::zero(), scale.clone())),
            Some(_) => None,
        };
        Ok(Generator {
            symbol,
            decimal: decimal.to_string(),
            scale,
            value,
            value_f64,
            exact,
        })
    }

    pub fn symbol(&self) -> Option<&str> {
        self.symbol.as_deref()
    }

    pub fn decimal(&self) -> &str {
        &self.decimal
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    pub fn is_rational(&self) -> bool {
        self.symbol.is_none()
    }

    pub fn value(&self) -> f64 {
        self.value_f64
    }

    /// `decimal · scale` as an exact rational (the working-precision value).
    pub fn working_value(&self) -> &Rational {
        &self.value
    }

    /// Exact `q + pπ` form, when the generator is rational or a multiple of π.
    pub fn exact_form(&self) -> Option<&PiLinear> {
        self.exact.as_ref()
    }
}

/// Search for a nonzero integer vector `n` with `|nᵢ| ≤ bound` and
/// `|Σ nᵢ vᵢ| < tol`, meeting in the middle over two halves of the values.
pub fn find_small_relation(values: &[f64], bound: i64, tol: f64) -> Option<Vec<i64>> {
    let d = values.len();
    if d == 0 {
        return None;
    }
    let half = d / 2;
    let (left, right) = values.split_at(half);
    let width = (2 * bound + 1) as usize;
    let decode = |mut idx: usize, k: usize| -> Vec<i64> {
        (0..k)
            .map(|_| {
                let c = (idx % width) as i64 - bound;
                idx /= width;
                c
            })
            .collect()
    };
    let sums = |vals: &[f64]| -> Vec<(f64, usize)> {
        let count = width.pow(vals.len() as u32);
        (0..count)
            .map(|idx| {
                let s = decode(idx, vals.len())
                    .iter()
                    .zip(vals)
                    .map(|(c, v)| *c as f64 * v)
                    .sum::<f64>();
                (s, idx)
            })
            .collect()
    };
    let zero_index = |k: usize| -> usize { (0..k).fold(0, |acc, _| acc * width + bound as usize) };
    let left_sums = sums(left);
    let mut right_sums = sums(right);
    right_sums.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let left_zero = zero_index(left.len());
    let right_zero = zero_index(right.len());
    for &(s, li) in &left_sums {
        let lo = right_sums.partition_point(|(r, _)| *r < -s - tol);
        for &(r, ri) in &right_sums[lo..] {
            if r > -s + tol {
                break;
            }
            if li == left_zero && ri == right_zero {
                continue;
            }
            if (s + r).abs() < tol {
                let mut rel = decode(li, left.len());
                rel.extend(decode(ri, right.len()));
                return Some(rel);
            }
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyModule {
    generators: Vec<Generator>,
}

impl FrequencyModule {
    /// Builds a module over the given generators, rejecting any set with a
    /// small integer relation (see [`find_small_relation`]).
    pub fn new(generators: Vec<Generator>) -> Result<Arc<Self>> {
        if generators.len() > MAX_RANK {
            return Err(Error::InvalidInput(format!(
                "at most {MAX_RANK} generators are supported"
            )));
        }
        let values: Vec<f64> = generators.iter().map(Generator::value).collect();
        if let Some(relation) = find_small_relation(&values, RELATION_BOUND, RELATION_TOL) {
            return Err(Error::DependentGenerators { relation });
        }
        Ok(Arc::new(FrequencyModule { generators }))
    }

    /// Like [`FrequencyModule::new`], but first merges all rational
    /// generators into the single generator they span.
    pub fn canonical(generators: Vec<Generator>) -> Result<Arc<Self>> {
        let (rational, other): (Vec<_>, Vec<_>) =
            generators.into_iter().partition(Generator::is_rational);
        let mut gens = Vec::with_capacity(other.len() + 1);
        if !rational.is_empty() {
            let g = exact::rational_gcd_all(rational.iter().map(Generator::working_value));
            gens.push(Generator::rational(g)?);
        }
        gens.extend(other);
        Self::new(gens)
    }

    /// The module `ℤ·1`.
    pub fn integers() -> Arc<Self> {
        Arc::new(FrequencyModule {
            generators: vec![Generator::integer(1).expect("1 is a valid generator")],
        })
    }

    pub fn dim(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    pub fn check_dim(&self, coords: &[i64]) -> Result<()> {
        if coords.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: coords.len(),
            });
        }
        Ok(())
    }

    /// `Σ nₖ gₖ`, summed exactly at working precision and rounded once.
    pub fn value_of(&self, coords: &[i64]) -> f64 {
        exact::to_f64(&self.working_value_of(coords))
    }

    pub fn working_value_of(&self, coords: &[i64]) -> Rational {
        coords
            .iter()
            .zip(&self.generators)
            .filter(|(n, _)| **n != 0)
            .fold(Rational::zero(), |acc, (n, g)| {
                acc + g.working_value() * exact::int(*n)
            })
    }

    /// Fast double-precision value; used in inner loops.
    pub fn approx_value_of(&self, coords: &[i64]) -> f64 {
        coords
            .iter()
            .zip(&self.generators)
            .map(|(n, g)| *n as f64 * g.value())
            .sum()
    }

    pub fn exact_form_of(&self, coords: &[i64]) -> Option<PiLinear> {
        let mut acc = PiLinear::zero();
        for (n, g) in coords.iter().zip(&self.generators) {
            if *n == 0 {
                continue;
            }
            let form = g.exact_form()?;
            acc = &acc + &form.scale(&exact::int(*n));
        }
        Some(acc)
    }

    /// Classifies `λt/2π` for `λ` with the given coordinates.
    pub fn phase_of(&self, coords: &[i64], t: &Real) -> PhaseClass {
        if coords.iter().all(|c| *c == 0) {
            return PhaseClass::Rational(Rational::zero());
        }
        let form = self.exact_form_of(coords);
        let value = if form.is_some() {
            self.approx_value_of(coords)
        } else {
            self.value_of(coords)
        };
        PhaseClass::of(form.as_ref(), value, t)
    }

    pub fn frequency(self: &Arc<Self>, coords: Vec<i64>) -> Result<Frequency> {
        self.check_dim(&coords)?;
        Ok(Frequency {
            module: Arc::clone(self),
            coords,
        })
    }

    pub fn zero(self: &Arc<Self>) -> Frequency {
        Frequency {
            module: Arc::clone(self),
            coords: vec![0; self.dim()],
        }
    }

    /// The `k`-th generator as a frequency.
    pub fn basis(self: &Arc<Self>, k: usize) -> Frequency {
        let mut coords = vec![0; self.dim()];
        coords[k] = 1;
        Frequency {
            module: Arc::clone(self),
            coords,
        }
    }

    /// Whether every generator is rational.
    pub fn is_rational(&self) -> bool {
        self.generators.iter().all(Generator::is_rational)
    }

    /// For a module with a single rational generator `g`, the generator.
    pub fn single_rational_generator(&self) -> Option<&Rational> {
        match self.generators.as_slice() {
            [g] if g.is_rational() => Some(g.working_value()),
            _ => None,
        }
    }
}

pub fn same_module(a: &Arc<FrequencyModule>, b: &Arc<FrequencyModule>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

pub fn ensure_same(a: &Arc<FrequencyModule>, b: &Arc<FrequencyModule>) -> Result<()> {
    if same_module(a, b) {
        Ok(())
    } else {
        Err(Error::ModuleMismatch)
    }
}

/// An element of a frequency module, as integer coordinates.
#[derive(Clone, Debug)]
pub struct Frequency {
    module: Arc<FrequencyModule>,
    coords: Vec<i64>,
}

impl Frequency {
    pub fn module(&self) -> &Arc<FrequencyModule> {
        &self.module
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<i64> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| *c == 0)
    }

    pub fn add(&self, other: &Frequency) -> Result<Frequency> {
        ensure_same(&self.module, &other.module)?;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a.checked_add(*b))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::InvalidInput("frequency coordinate overflow".into()))?;
        Ok(Frequency {
            module: Arc::clone(&self.module),
            coords,
        })
    }

    pub fn neg(&self) -> Frequency {
        Frequency {
            module: Arc::clone(&self.module),
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Frequency) -> Result<Frequency> {
        self.add(&other.neg())
    }

    pub fn value(&self) -> f64 {
        self.module.value_of(&self.coords)
    }

    pub fn exact_form(&self) -> Option<PiLinear> {
        self.module.exact_form_of(&self.coords)
    }

    pub fn phase(&self, t: &Real) -> PhaseClass {
        self.module.phase_of(&self.coords, t)
    }

    pub fn is_one(&self) -> bool {
        self.coords.len() == 1 && self.coords[0].is_one()
    }
}

impl PartialEq for Frequency {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords && same_module(&self.module, &other.module)
    }
}

impl Eq for Frequency {}

impl Hash for Frequency {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coords.hash(state);
    }
}

impl PartialOrd for Frequency {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Frequency {
    fn cmp(&self, other: &Self) -> Ordering {
        self.coords.cmp(&other.coords)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rational};

    fn sqrt2_module() -> Arc<FrequencyModule> {
        FrequencyModule::new(vec![
            Generator::integer(1).unwrap(),
            Generator::constant("sqrt2", int(1)).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn coordinatewise_addition() {
        let m = sqrt2_module();
        let a = m.frequency(vec![1, 0]).unwrap();
        let b = m.frequency(vec![0, 2]).unwrap();
        assert_eq!(a.add(&b).unwrap().coords(), &[1, 2]);
        let z = FrequencyModule::integers();
        let s = z.frequency(vec![3]).unwrap().add(&z.frequency(vec![-3]).unwrap());
        assert!(s.unwrap().is_zero());
    }

    #[test]
    fn values_match_high_precision_sum() {
        let m = sqrt2_module();
        let a = m.frequency(vec![1, 0]).unwrap();
        let b = m.frequency(vec![0, 1]).unwrap();
        let s = a.add(&b).unwrap();
        assert!((s.value() - 2.414_213_562_373_095).abs() < 1e-12);
        assert!((s.value() - (a.value() + b.value())).abs() < 1e-12);
        assert_eq!(m.zero().value(), 0.0);

        let pi = FrequencyModule::new(vec![Generator::constant("pi", int(1)).unwrap()]).unwrap();
        let two = pi.frequency(vec![2]).unwrap();
        assert!((two.value() - 6.283_185_307_179_586).abs() < 1e-15);
    }

    #[test]
    fn rejects_dependent_generators() {
        let err = FrequencyModule::new(vec![
            Generator::integer(1).unwrap(),
            Generator::rational(rational(1, 2)).unwrap(),
        ])
        .unwrap_err();
        match err {
            Error::DependentGenerators { relation } => {
                assert_eq!(relation[0] as f64 + relation[1] as f64 * 0.5, 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
        // 2·√2 written as a separate named decimal
        let err = FrequencyModule::new(vec![
            Generator::constant("sqrt2", int(1)).unwrap(),
            Generator::named("s8", "2.8284271247461900976", int(1)).unwrap(),
        ]);
        assert!(matches!(err, Err(Error::DependentGenerators { .. })));
    }

    #[test]
    fn accepts_independent_generators() {
        let gens = ["pi", "sqrt2", "sqrt3", "e"]
            .iter()
            .map(|n| Generator::constant(n, int(1)).unwrap())
            .chain([Generator::integer(1).unwrap()])
            .collect();
        assert_eq!(FrequencyModule::new(gens).unwrap().dim(), 5);
    }

    #[test]
    fn canonicalizes_rational_generators() {
        let m = FrequencyModule::canonical(vec![
            Generator::rational(rational(2, 3)).unwrap(),
            Generator::rational(rational(1, 2)).unwrap(),
            Generator::constant("sqrt2", int(1)).unwrap(),
        ])
        .unwrap();
        assert_eq!(m.dim(), 2);
        assert_eq!(m.generators()[0].working_value(), &rational(1, 6));
    }

    #[test]
    fn module_mismatch_is_an_error() {
        let a = FrequencyModule::integers().zero();
        let b = sqrt2_module().zero();
        assert_eq!(a.add(&b).unwrap_err(), Error::ModuleMismatch);
    }

    #[test]
    fn truncates_constants() {
        assert_eq!(known_constant("pi", 5).unwrap(), "3.1415");
        assert_eq!(known_constant("pi", 1).unwrap(), "3");
        assert_eq!(
            known_constant("sqrt2", 50).unwrap().chars().filter(char::is_ascii_digit).count(),
            50
        );
    }
}

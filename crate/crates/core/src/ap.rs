//! Trigonometric polynomials `f = Σ c_λ χ_λ`, `χ_λ(t) = e^{iλt}`, with the
//! Bohr mean and inner product computed from coefficients.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exact::{Real, Scalar};
use crate::frequency::{ensure_same, Frequency, FrequencyModule};

#[derive(Clone, Debug)]
pub struct APFunction {
    module: Arc<FrequencyModule>,
    terms: BTreeMap<Vec<i64>, Scalar>,
}

impl PartialEq for APFunction {
    fn eq(&self, other: &Self) -> bool {
        crate::frequency::same_module(&self.module, &other.module) && self.terms == other.terms
    }
}

fn accumulate(terms: &mut BTreeMap<Vec<i64>, Scalar>, key: Vec<i64>, c: Scalar) {
    match terms.remove(&key) {
        Some(prev) => {
            let sum = &prev + &c;
            if !sum.is_zero() {
                terms.insert(key, sum);
            }
        }
        None => {
            if !c.is_zero() {
                terms.insert(key, c);
            }
        }
    }
}

fn add_coords(a: &[i64], b: &[i64]) -> Result<Vec<i64>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.checked_add(*y))
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::InvalidInput("frequency coordinate overflow".into()))
}

impl APFunction {
    pub fn zero(module: &Arc<FrequencyModule>) -> Self {
        APFunction {
            module: Arc::clone(module),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(module: &Arc<FrequencyModule>, c: Scalar) -> Self {
        let mut f = Self::zero(module);
        accumulate(&mut f.terms, vec![0; module.dim()], c);
        f
    }

    /// The character `χ_λ`.
    pub fn character(freq: &Frequency) -> Self {
        let mut f = Self::zero(freq.module());
        f.terms.insert(freq.coords().to_vec(), Scalar::one());
        f
    }

    /// Sums the given `(coordinates, coefficient)` pairs; zero coefficients are dropped.
    pub fn from_terms(
        module: &Arc<FrequencyModule>,
        terms: impl IntoIterator<Item = (Vec<i64>, Scalar)>,
    ) -> Result<Self> {
        let mut f = Self::zero(module);
        for (coords, c) in terms {
            module.check_dim(&coords)?;
            accumulate(&mut f.terms, coords, c);
        }
        Ok(f)
    }

    pub fn module(&self) -> &Arc<FrequencyModule> {
        &self.module
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i64], &Scalar)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn frequencies(&self) -> Vec<Frequency> {
        self.terms
            .keys()
            .map(|k| self.module.frequency(k.clone()).expect("stored coordinates have module rank"))
            .collect()
    }

    pub fn coefficient(&self, coords: &[i64]) -> Scalar {
        self.terms.get(coords).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_exact(&self) -> bool {
        self.terms.values().all(Scalar::is_exact)
    }

    pub fn add(&self, g: &APFunction) -> Result<APFunction> {
        ensure_same(&self.module, &g.module)?;
        let mut out = self.clone();
        for (k, c) in &g.terms {
            accumulate(&mut out.terms, k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, g: &APFunction) -> Result<APFunction> {
        self.add(&g.neg())
    }

    pub fn neg(&self) -> APFunction {
        self.scale(&Scalar::int(-1))
    }

    pub fn scale(&self, s: &Scalar) -> APFunction {
        let mut out = Self::zero(&self.module);
        for (k, c) in &self.terms {
            accumulate(&mut out.terms, k.clone(), c * s);
        }
        out
    }

    /// Product: coefficients convolve, frequencies add.
    pub fn mul(&self, g: &APFunction) -> Result<APFunction> {
        ensure_same(&self.module, &g.module)?;
        let mut out = Self::zero(&self.module);
        for (a, ca) in &self.terms {
            for (b, cb) in &g.terms {
                accumulate(&mut out.terms, add_coords(a, b)?, ca * cb);
            }
        }
        Ok(out)
    }

    /// Involution `f*(t) = conj(f(t))`: `c_λ ↦ conj(c_{−λ})`.
    pub fn star(&self) -> APFunction {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (k.iter().map(|x| -x).collect(), c.conj()))
            .collect();
        APFunction {
            module: Arc::clone(&self.module),
            terms,
        }
    }

    /// `f(t)`, exact when every phase `e^{iλt}` is.
    pub fn eval(&self, t: &Real) -> Scalar {
        self.terms
            .iter()
            .fold(Scalar::zero(), |acc, (k, c)| {
                &acc + &(c * &self.module.phase_of(k, t).unit())
            })
    }

    pub fn eval_f64(&self, t: f64) -> Complex64 {
        self.sampler().eval(t)
    }

    /// Precomputed `(λ, c_λ)` pairs for repeated floating evaluation.
    pub fn sampler(&self) -> Sampler {
        Sampler {
            terms: self
                .terms
                .iter()
                .map(|(k, c)| (self.module.value_of(k), c.to_c64()))
                .collect(),
        }
    }

    /// `lim (1/2T)∫_{-T}^{T} f`: the zero-frequency coefficient.
    pub fn bohr_mean_exact(&self) -> Scalar {
        self.coefficient(&vec![0; self.module.dim()])
    }

    /// `(1/2T)∫_{-T}^{T} f(t) dt` in closed form, `sin(λT)/(λT)` per character.
    pub fn bohr_mean_numeric(&self, horizon: f64) -> Result<Complex64> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::InvalidInput("averaging horizon must be positive".into()));
        }
        Ok(self
            .sampler()
            .terms
            .iter()
            .map(|(lambda, c)| {
                if *lambda == 0.0 {
                    *c
                } else {
                    let x = lambda * horizon;
                    c * (x.sin() / x)
                }
            })
            .sum())
    }

    /// `(Σ_{λ≠0} |c_λ|/|λ|) / T`, the bound on `|mean_T(f) − mean(f)|`.
    pub fn mean_error_bound(&self, horizon: f64) -> f64 {
        self.sampler()
            .terms
            .iter()
            .filter(|(l, _)| *l != 0.0)
            .map(|(l, c)| c.norm() / l.abs())
            .sum::<f64>()
            / horizon
    }

    /// `⟨f, g⟩ = Σ_λ c_λ conj(d_λ)`.
    pub fn inner(&self, g: &APFunction) -> Result<Scalar> {
        ensure_same(&self.module, &g.module)?;
        Ok(self
            .terms
            .iter()
            .filter_map(|(k, c)| g.terms.get(k).map(|d| c * &d.conj()))
            .fold(Scalar::zero(), |acc, x| &acc + &x))
    }

    /// `⟨f, f⟩ = Σ|c_λ|²`.
    pub fn norm_sqr(&self) -> Scalar {
        self.inner(self).expect("same module")
    }

    /// `θ_t* f = f(t + ·)`: `c_λ ↦ e^{iλt} c_λ`.
    pub fn translate_pullback(&self, t: &Real) -> APFunction {
        let mut out = Self::zero(&self.module);
        for (k, c) in &self.terms {
            let phase = self.module.phase_of(k, t).unit();
            accumulate(&mut out.terms, k.clone(), c * &phase);
        }
        out
    }

    /// `Σ_λ |c_λ|·|e^{iλt} − e^{iλt'}|`, an upper bound on
    /// `‖θ_t* f − θ_{t'}* f‖_∞` that is attained by single characters.
    pub fn continuity_modulus(&self, t: &Real, t_prime: &Real) -> f64 {
        let diff = t.sub(t_prime);
        self.terms
            .iter()
            .map(|(k, c)| c.abs() * self.module.phase_of(k, &diff).chord())
            .sum()
    }

    /// `Σ|c_λ|`, a bound on the sup norm.
    pub fn coefficient_l1(&self) -> f64 {
        self.terms.values().map(Scalar::abs).sum()
    }

    /// `Σ|c_λ||λ|`, a Lipschitz constant of `t ↦ θ_t* f` in sup norm.
    pub fn lipschitz_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| c.abs() * self.module.value_of(k).abs())
            .sum()
    }
}

#[derive(Clone, Debug)]
pub struct Sampler {
    terms: Vec<(f64, Complex64)>,
}

impl Sampler {
    pub fn eval(&self, t: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(lambda, c)| c * Complex64::cis(lambda * t))
            .sum()
    }
}

//! Points of the Bohr compactification restricted to a frequency module.
//!
//! A character of `Λ ≅ ℤ^d` is fixed by its values on the generators, so a
//! point is an angle vector on the torus `T^d`; `λ = (n₁..n_d)` is sent to
//! `e^{2πi Σ nₖθₖ}` with angles stored in turns.

use std::f64::consts::PI;
use std::sync::Arc;

use crate::ap::APFunction;
use crate::error::{Error, Result};
use crate::exact::{Real, Scalar, Turns};
use crate::frequency::{ensure_same, Frequency, FrequencyModule};

#[derive(Clone, Debug)]
pub struct BohrPoint {
    module: Arc<FrequencyModule>,
    angles: Vec<Turns>,
}

impl PartialEq for BohrPoint {
    fn eq(&self, other: &Self) -> bool {
        crate::frequency::same_module(&self.module, &other.module) && self.angles == other.angles
    }
}

impl BohrPoint {
    /// The neutral element `1_B`.
    pub fn identity(module: &Arc<FrequencyModule>) -> Self {
        BohrPoint {
            module: Arc::clone(module),
            angles: vec![Turns::zero(); module.dim()],
        }
    }

    pub fn from_turns(module: &Arc<FrequencyModule>, angles: Vec<Turns>) -> Result<Self> {
        if angles.len() != module.dim() {
            return Err(Error::DimensionMismatch {
                expected: module.dim(),
                found: angles.len(),
            });
        }
        let angles = angles
            .into_iter()
            .map(|a| match a {
                Turns::Exact(q) => Turns::exact(q),
                Turns::Float(x) => Turns::float(x),
            })
            .collect();
        Ok(BohrPoint {
            module: Arc::clone(module),
            angles,
        })
    }

    /// `ι(x)`: evaluation at `x`, i.e. angles `gₖx mod 2π`.
    pub fn iota(x: &Real, module: &Arc<FrequencyModule>) -> Self {
        let angles = (0..module.dim())
            .map(|k| module.basis(k).phase(x).turns())
            .collect();
        BohrPoint {
            module: Arc::clone(module),
            angles,
        }
    }

    pub fn module(&self) -> &Arc<FrequencyModule> {
        &self.module
    }

    pub fn angles(&self) -> &[Turns] {
        &self.angles
    }

    /// `ψ₁ ⊕ ψ₂`: anglewise sum.
    pub fn mul(&self, other: &BohrPoint) -> Result<BohrPoint> {
        ensure_same(&self.module, &other.module)?;
        Ok(BohrPoint {
            module: Arc::clone(&self.module),
            angles: self
                .angles
                .iter()
                .zip(&other.angles)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    /// `⊖ψ`: the conjugate character.
    pub fn inv(&self) -> BohrPoint {
        BohrPoint {
            module: Arc::clone(&self.module),
            angles: self.angles.iter().map(Turns::neg).collect(),
        }
    }

    /// Turns of `ψ(χ_λ)`.
    pub fn character_turns(&self, coords: &[i64]) -> Turns {
        coords
            .iter()
            .zip(&self.angles)
            .filter(|(n, _)| **n != 0)
            .fold(Turns::zero(), |acc, (n, a)| acc.add(&a.scale(*n)))
    }

    /// `ψ(χ_λ)`.
    pub fn character(&self, freq: &Frequency) -> Result<Scalar> {
        ensure_same(&self.module, freq.module())?;
        Ok(Scalar::unit(&self.character_turns(freq.coords())))
    }

    /// `ψ(f) = Σ c_λ ψ(χ_λ)`.
    pub fn eval(&self, f: &APFunction) -> Result<Scalar> {
        ensure_same(&self.module, f.module())?;
        Ok(f.terms().fold(Scalar::zero(), |acc, (k, c)| {
            &acc + &(c * &Scalar::unit(&self.character_turns(k)))
        }))
    }

    /// Largest circular angle difference in radians.
    pub fn angle_distance(&self, other: &BohrPoint) -> Result<f64> {
        ensure_same(&self.module, &other.module)?;
        Ok(self
            .angles
            .iter()
            .zip(&other.angles)
            .map(|(a, b)| 2.0 * PI * a.distance(b))
            .fold(0.0, f64::max))
    }

    pub fn approx_eq(&self, other: &BohrPoint, tol: f64) -> bool {
        self.angle_distance(other).is_ok_and(|d| d <= tol)
    }

    /// `max_k |e^{i gₖ t} − e^{iθₖ}|`.
    pub fn kronecker_residual(&self, t: f64) -> f64 {
        self.module
            .generators()
            .iter()
            .zip(&self.angles)
            .map(|(g, a)| chord(g.value() * t - a.radians()))
            .fold(0.0, f64::max)
    }

    /// Finds `t ∈ [−t_max, t_max]` with `kronecker_residual(t) < eps`; see
    /// [`KroneckerSearch`].
    pub fn kronecker_approx(&self, eps: f64, t_max: f64) -> Result<KroneckerOutcome> {
        KroneckerSearch::new(eps, t_max).run(self)
    }
}

fn chord(angle: f64) -> f64 {
    2.0 * (0.5 * angle).sin().abs()
}

#[derive(Clone, Debug, PartialEq)]
pub enum KroneckerOutcome {
    Found {
        t: f64,
        residual: f64,
        evaluations: u64,
    },
    /// The search stopped without a hit; this is not a proof that none exists.
    NotFound {
        evaluations: u64,
        searched_to: f64,
        budget_exhausted: bool,
        best_residual: f64,
    },
}

impl KroneckerOutcome {
    pub fn t(&self) -> Option<f64> {
        match self {
            KroneckerOutcome::Found { t, .. } => Some(*t),
            KroneckerOutcome::NotFound { .. } => None,
        }
    }
}

/// Budgeted search for `t` with `ι(t)` close to a target point.
///
/// The generator of smallest modulus (the anchor) is matched exactly at the
/// centers `t_m = (θ_a + 2πm)/g_a`, visited in order of increasing `|t_m|`.
/// Around each center the window on which the anchor stays within tolerance
/// is scanned on a sub-grid fine enough for the fastest generator, offset by
/// a golden-ratio jitter, and promising grid points are refined by
/// golden-section minimization.
#[derive(Clone, Debug)]
pub struct KroneckerSearch {
    pub eps: f64,
    pub t_max: f64,
    /// Maximum number of residual evaluations.
    pub budget: u64,
}

const GOLDEN: f64 = 0.618_033_988_749_894_9;

impl KroneckerSearch {
    pub fn new(eps: f64, t_max: f64) -> Self {
        KroneckerSearch {
            eps,
            t_max,
            budget: 20_000_000,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn run(&self, target: &BohrPoint) -> Result<KroneckerOutcome> {
        if !(self.eps > 0.0) || !self.eps.is_finite() {
            return Err(Error::InvalidInput("eps must be positive".into()));
        }
        if !(self.t_max >= 0.0) {
            return Err(Error::InvalidInput("t_max must be nonnegative".into()));
        }
        let mut evaluations = 0u64;
        let mut best = f64::INFINITY;
        let residual = |t: f64, evaluations: &mut u64| {
            *evaluations += 1;
            target.kronecker_residual(t)
        };
        let gens = target.module().generators();
        if gens.is_empty() {
            return Ok(KroneckerOutcome::Found {
                t: 0.0,
                residual: 0.0,
                evaluations: 0,
            });
        }
        let (anchor, ga) = gens
            .iter()
            .map(|g| g.value())
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .expect("nonempty");
        let gmax = gens.iter().map(|g| g.value().abs()).fold(0.0, f64::max);
        let delta = if self.eps >= 2.0 {
            PI
        } else {
            2.0 * (0.5 * self.eps).asin()
        };
        let half_window = delta / ga.abs();
        let step = delta / (2.0 * gmax);
        let n_sub = ((2.0 * half_window / step).ceil() as u64).max(1);
        let theta_a = target.angles()[anchor].radians();
        let center = |m: i64| (theta_a + 2.0 * PI * m as f64) / ga;

        // m values ordered by |t_m|: walk outward from the center nearest 0
        let m0 = (-theta_a / (2.0 * PI)).round() as i64;
        let (mut up, mut down) = (m0, m0 - 1);
        let mut window = 0u64;
        let mut searched_to = 0.0f64;
        loop {
            let (cu, cd) = (center(up), center(down));
            let in_up = cu.abs() <= self.t_max + half_window;
            let in_down = cd.abs() <= self.t_max + half_window;
            if !in_up && !in_down {
                break;
            }
            let c = if in_up && (!in_down || cu.abs() <= cd.abs()) {
                up += 1;
                cu
            } else {
                down -= 1;
                cd
            };
            searched_to = searched_to.max(c.abs());
            window += 1;

            if c.abs() <= self.t_max {
                let r = residual(c, &mut evaluations);
                best = best.min(r);
                if r < self.eps {
                    return Ok(KroneckerOutcome::Found {
                        t: c,
                        residual: r,
                        evaluations,
                    });
                }
            }
            let jitter = (window as f64 * GOLDEN).fract();
            for j in 0..n_sub {
                let s = c - half_window + (j as f64 + jitter) * step;
                if s.abs() > self.t_max {
                    continue;
                }
                let r = residual(s, &mut evaluations);
                best = best.min(r);
                if r < self.eps {
                    return Ok(KroneckerOutcome::Found {
                        t: s,
                        residual: r,
                        evaluations,
                    });
                }
                if r < 2.0 * self.eps {
                    let (t, r) = self.refine(target, s - step, s + step, &mut evaluations);
                    best = best.min(r);
                    if r < self.eps && t.abs() <= self.t_max {
                        return Ok(KroneckerOutcome::Found {
                            t,
                            residual: r,
                            evaluations,
                        });
                    }
                }
            }
            if evaluations >= self.budget {
                return Ok(KroneckerOutcome::NotFound {
                    evaluations,
                    searched_to,
                    budget_exhausted: true,
                    best_residual: best,
                });
            }
        }
        Ok(KroneckerOutcome::NotFound {
            evaluations,
            searched_to,
            budget_exhausted: false,
            best_residual: best,
        })
    }

    fn refine(&self, target: &BohrPoint, mut a: f64, mut b: f64, evaluations: &mut u64) -> (f64, f64) {
        let mut f = |t: f64| {
            *evaluations += 1;
            target.kronecker_residual(t)
        };
        let mut x1 = b - GOLDEN * (b - a);
        let mut x2 = a + GOLDEN * (b - a);
        let (mut f1, mut f2) = (f(x1), f(x2));
        for _ in 0..48 {
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - GOLDEN * (b - a);
                f1 = f(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + GOLDEN * (b - a);
                f2 = f(x2);
            }
        }
        if f1 < f2 {
            (x1, f1)
        } else {
            (x2, f2)
        }
    }
}

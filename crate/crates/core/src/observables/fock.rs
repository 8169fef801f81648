//! Brute-force moments in a truncated two-mode number basis.
//!
//! A recipe of displacements, squeezers and passive transforms is applied to
//! `|0, 0⟩` as explicit operator exponentials on a state vector of dimension
//! `(n_max + 1)²`. Observables are applied as operator products of ladder
//! operators. Nothing here uses covariance matrices or symplectic maps, so
//! the results check the phase-space formulas independently.
//!
//! Loss is modelled as a beam splitter onto mode 1, which therefore must be
//! an unused vacuum ancilla: attenuation is only accepted in one-mode
//! recipes, and only once.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::QuadraticObservable;
use crate::gaussian::GaussianState;
use crate::{Error, Result};

pub const MIN_N_MAX: usize = 30;
/// Truncation is raised in these increments until moments stop changing.
pub const N_MAX_STEP: usize = 10;
pub const MAX_N_MAX: usize = 100;
pub const CONVERGENCE_TOL: f64 = 1e-8;
pub const MAX_ALPHA: f64 = 2.0;
pub const MAX_ZETA: f64 = 0.6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum RecipeOp {
    Displace {
        mode: usize,
        alpha: Complex64,
    },
    Squeeze {
        mode: usize,
        zeta: Complex64,
    },
    TwoModeSqueeze {
        mode_i: usize,
        mode_j: usize,
        zeta: Complex64,
    },
    ModeUnitary {
        u: Vec<Vec<Complex64>>,
    },
    Attenuate {
        mode: usize,
        eta: f64,
    },
}

/// Operations applied in order to the vacuum of `num_modes` modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recipe {
    pub num_modes: usize,
    pub ops: Vec<RecipeOp>,
}

impl Recipe {
    pub fn new(num_modes: usize, ops: Vec<RecipeOp>) -> Self {
        Recipe { num_modes, ops }
    }

    /// The same recipe run through the phase-space engine.
    pub fn gaussian(&self) -> Result<GaussianState> {
        let mut s = GaussianState::vacuum(self.num_modes)?;
        for op in &self.ops {
            s = match op {
                RecipeOp::Displace { mode, alpha } => s.displace(*mode, *alpha)?,
                RecipeOp::Squeeze { mode, zeta } => s.squeeze(*mode, *zeta)?,
                RecipeOp::TwoModeSqueeze { mode_i, mode_j, zeta } => s.two_mode_squeeze(*mode_i, *mode_j, *zeta)?,
                RecipeOp::ModeUnitary { u } => s.apply_mode_unitary(&unitary_matrix(u)?)?,
                RecipeOp::Attenuate { mode, eta } => s.attenuate(*mode, *eta)?,
            };
        }
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if self.num_modes == 0 {
            return Err(Error::invalid("recipe needs at least one mode"));
        }
        if self.num_modes > 2 {
            return Err(Error::Unsupported(format!(
                "number-basis oracle handles at most 2 modes, recipe has {}",
                self.num_modes
            )));
        }
        let check_mode = |m: usize| -> Result<()> {
            if m >= 2 {
                return Err(Error::Unsupported(format!(
                    "recipe references mode {m}; oracle supports modes 0 and 1"
                )));
            }
            if m >= self.num_modes {
                return Err(Error::invalid(format!(
                    "mode {m} out of range for a {}-mode recipe",
                    self.num_modes
                )));
            }
            Ok(())
        };
        let mut attenuations = 0;
        for op in &self.ops {
            match op {
                RecipeOp::Displace { mode, alpha } => {
                    check_mode(*mode)?;
                    if alpha.norm() > MAX_ALPHA {
                        return Err(Error::invalid(format!(
                            "|alpha| = {} exceeds oracle limit {MAX_ALPHA}",
                            alpha.norm()
                        )));
                    }
                }
                RecipeOp::Squeeze { mode, zeta } => {
                    check_mode(*mode)?;
                    check_zeta(*zeta)?;
                }
                RecipeOp::TwoModeSqueeze { mode_i, mode_j, zeta } => {
                    check_mode(*mode_i)?;
                    check_mode(*mode_j)?;
                    if mode_i == mode_j {
                        return Err(Error::invalid("two-mode squeezing needs two distinct modes"));
                    }
                    check_zeta(*zeta)?;
                }
                RecipeOp::ModeUnitary { u } => {
                    if u.len() != self.num_modes {
                        return Err(Error::invalid("mode unitary size must match the recipe's mode count"));
                    }
                    crate::numeric::check_unitary(&unitary_matrix(u)?, 1e-10, "recipe mode unitary")?;
                }
                RecipeOp::Attenuate { mode, eta } => {
                    check_mode(*mode)?;
                    if !(0.0..=1.0).contains(eta) {
                        return Err(Error::invalid(format!("transmission {eta} outside [0, 1]")));
                    }
                    if self.num_modes != 1 {
                        return Err(Error::Unsupported(
                            "attenuation needs mode 1 as a vacuum ancilla (one-mode recipes only)".into(),
                        ));
                    }
                    attenuations += 1;
                    if attenuations > 1 {
                        return Err(Error::Unsupported("at most one attenuation per recipe".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_zeta(zeta: Complex64) -> Result<()> {
    if zeta.norm() > MAX_ZETA {
        return Err(Error::invalid(format!(
            "|zeta| = {} exceeds oracle limit {MAX_ZETA}",
            zeta.norm()
        )));
    }
    Ok(())
}

fn unitary_matrix(rows: &[Vec<Complex64>]) -> Result<DMatrix<Complex64>> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::invalid("mode unitary must be a non-empty square matrix"));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Oracle result, evaluated at the converged truncation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleStats {
    pub mean: f64,
    pub variance: f64,
    pub n_max: usize,
    /// Relative change against the previous truncation.
    pub relative_change: f64,
}

type Vector = Vec<Complex64>;

/// Two bosonic modes truncated at `n_max` quanta each; index `n₀·d + n₁`.
struct FockSpace {
    d: usize,
    sqrt: Vec<f64>,
}

impl FockSpace {
    fn new(n_max: usize) -> Self {
        FockSpace {
            d: n_max + 1,
            sqrt: (0..=n_max + 1).map(|n| (n as f64).sqrt()).collect(),
        }
    }

    fn dim(&self) -> usize {
        self.d * self.d
    }

    fn vacuum(&self) -> Vector {
        let mut v = vec![Complex64::new(0.0, 0.0); self.dim()];
        v[0] = Complex64::new(1.0, 0.0);
        v
    }

    fn split(&self, idx: usize) -> (usize, usize) {
        (idx / self.d, idx % self.d)
    }

    fn join(&self, n0: usize, n1: usize) -> usize {
        n0 * self.d + n1
    }

    fn lower(&self, mode: usize, v: &[Complex64]) -> Vector {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (idx, o) in out.iter_mut().enumerate() {
            let (n0, n1) = self.split(idx);
            let (n, src) = if mode == 0 {
                (n0, (n0 + 1 < self.d).then(|| self.join(n0 + 1, n1)))
            } else {
                (n1, (n1 + 1 < self.d).then(|| self.join(n0, n1 + 1)))
            };
            if let Some(src) = src {
                *o = v[src] * self.sqrt[n + 1];
            }
        }
        out
    }

    fn raise(&self, mode: usize, v: &[Complex64]) -> Vector {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (idx, o) in out.iter_mut().enumerate() {
            let (n0, n1) = self.split(idx);
            let (n, src) = if mode == 0 {
                (n0, (n0 > 0).then(|| self.join(n0 - 1, n1)))
            } else {
                (n1, (n1 > 0).then(|| self.join(n0, n1 - 1)))
            };
            if let Some(src) = src {
                *o = v[src] * self.sqrt[n];
            }
        }
        out
    }

    /// Phase-space operator `r_k`: even `k` is `x`, odd is `p`, of mode `k/2`.
    fn quadrature(&self, k: usize, v: &[Complex64]) -> Vector {
        let mode = k / 2;
        let lo = self.lower(mode, v);
        let hi = self.raise(mode, v);
        if k.is_multiple_of(2) {
            add(&lo, &hi, Complex64::new(1.0, 0.0))
        } else {
            // p = −i(a − a†)
            scale(&add(&lo, &hi, Complex64::new(-1.0, 0.0)), Complex64::new(0.0, -1.0))
        }
    }

    /// `exp(G)v` by Taylor series over sub-steps with `‖G‖/steps ≤ ½`.
    fn expm_apply<F>(&self, generator: F, norm_bound: f64, v: Vector) -> Vector
    where
        F: Fn(&[Complex64]) -> Vector,
    {
        let steps = (2.0 * norm_bound).ceil().max(1.0) as usize;
        let inv = 1.0 / steps as f64;
        let mut state = v;
        for _ in 0..steps {
            let mut sum = state.clone();
            let mut term = state;
            let base = norm(&sum);
            for k in 1..80 {
                term = scale(&generator(&term), Complex64::new(inv / k as f64, 0.0));
                let t = norm(&term);
                sum = add(&sum, &term, Complex64::new(1.0, 0.0));
                if t <= 1e-18 * base {
                    break;
                }
            }
            state = sum;
        }
        state
    }

    fn apply_op(&self, op: &RecipeOp, v: Vector) -> Result<Vector> {
        let n = (self.d - 1) as f64;
        Ok(match op {
            RecipeOp::Displace { mode, alpha } => {
                // α a† − α* a
                let (m, a) = (*mode, *alpha);
                self.expm_apply(
                    |w| {
                        add(
                            &scale(&self.raise(m, w), a),
                            &scale(&self.lower(m, w), -a.conj()),
                            Complex64::new(1.0, 0.0),
                        )
                    },
                    2.0 * a.norm() * (n + 1.0).sqrt(),
                    v,
                )
            }
            RecipeOp::Squeeze { mode, zeta } => {
                // (ζ* a² − ζ a†²)/2
                let (m, z) = (*mode, *zeta);
                self.expm_apply(
                    |w| {
                        let aa = self.lower(m, &self.lower(m, w));
                        let cc = self.raise(m, &self.raise(m, w));
                        add(
                            &scale(&aa, z.conj() * 0.5),
                            &scale(&cc, -z * 0.5),
                            Complex64::new(1.0, 0.0),
                        )
                    },
                    z.norm() * (n + 2.0),
                    v,
                )
            }
            RecipeOp::TwoModeSqueeze { mode_i, mode_j, zeta } => {
                // ξ* a_i a_j − ξ a_i† a_j†
                let (i, j, z) = (*mode_i, *mode_j, *zeta);
                self.expm_apply(
                    |w| {
                        let aa = self.lower(i, &self.lower(j, w));
                        let cc = self.raise(i, &self.raise(j, w));
                        add(&scale(&aa, z.conj()), &scale(&cc, -z), Complex64::new(1.0, 0.0))
                    },
                    2.0 * z.norm() * (n + 1.0),
                    v,
                )
            }
            RecipeOp::ModeUnitary { u } => {
                let u = unitary_matrix(u)?;
                let u2 = if u.nrows() == 1 {
                    DMatrix::from_row_slice(
                        2,
                        2,
                        &[
                            u[(0, 0)],
                            Complex64::new(0.0, 0.0),
                            Complex64::new(0.0, 0.0),
                            Complex64::new(1.0, 0.0),
                        ],
                    )
                } else {
                    u
                };
                self.apply_passive(&u2, v)?
            }
            RecipeOp::Attenuate { mode, eta } => {
                // beam splitter with the vacuum ancilla in mode 1
                if *mode != 0 {
                    return Err(Error::Unsupported("attenuation is only modelled on mode 0".into()));
                }
                let (t, r) = (eta.sqrt(), (1.0 - eta).sqrt());
                let u = DMatrix::from_row_slice(
                    2,
                    2,
                    &[
                        Complex64::new(t, 0.0),
                        Complex64::new(r, 0.0),
                        Complex64::new(-r, 0.0),
                        Complex64::new(t, 0.0),
                    ],
                );
                self.apply_passive(&u, v)?
            }
        })
    }

    /// Passive transform with `⟨a⟩ → u⟨a⟩`, i.e. `U a_l† U† = Σ_k u_kl a_k†`.
    ///
    /// Each `|n, m⟩ = a₀†ⁿ a₁†ᵐ|0⟩/√(n!m!)` is expanded binomially; output
    /// components beyond the truncation are dropped.
    fn apply_passive(&self, u: &DMatrix<Complex64>, v: Vector) -> Result<Vector> {
        let n_max = self.d - 1;
        let ln_fact: Vec<f64> = std::iter::once(0.0)
            .chain((1..=2 * n_max).scan(0.0, |acc, k| {
                *acc += (k as f64).ln();
                Some(*acc)
            }))
            .collect();
        let ln_binom = |n: usize, k: usize| ln_fact[n] - ln_fact[k] - ln_fact[n - k];
        let powers = |z: Complex64| -> Vec<Complex64> {
            std::iter::successors(Some(Complex64::new(1.0, 0.0)), |p| Some(p * z))
                .take(self.d)
                .collect()
        };
        let (p00, p10, p01, p11) = (
            powers(u[(0, 0)]),
            powers(u[(1, 0)]),
            powers(u[(0, 1)]),
            powers(u[(1, 1)]),
        );
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for n in 0..self.d {
            for m in 0..self.d {
                let c = v[self.join(n, m)];
                if c.norm() < 1e-30 {
                    continue;
                }
                for k in 0..=n {
                    for l in 0..=m {
                        let (na, nb) = (k + l, n - k + m - l);
                        if na > n_max || nb > n_max {
                            continue;
                        }
                        let mag = (ln_binom(n, k)
                            + ln_binom(m, l)
                            + 0.5 * (ln_fact[na] + ln_fact[nb] - ln_fact[n] - ln_fact[m]))
                            .exp();
                        let amp = p00[k] * p10[n - k] * p01[l] * p11[m - l] * mag;
                        out[self.join(na, nb)] += c * amp;
                    }
                }
            }
        }
        Ok(out)
    }

    fn prepare(&self, recipe: &Recipe) -> Result<Vector> {
        let mut v = self.vacuum();
        for op in &recipe.ops {
            v = self.apply_op(op, v)?;
        }
        Ok(v)
    }

    /// `(Ô − ⟨Ô⟩)ψ` and `⟨Ô⟩`.
    fn centered_action(&self, obs: &QuadraticObservable, psi: &[Complex64]) -> (Vector, f64) {
        let dim = obs.linear.len();
        let r_psi: Vec<Vector> = (0..dim).map(|k| self.quadrature(k, psi)).collect();
        let mut out: Vector = scale(psi, Complex64::new(obs.offset, 0.0));
        for j in 0..dim {
            let mut inner = vec![Complex64::new(0.0, 0.0); self.dim()];
            for (k, rk) in r_psi.iter().enumerate() {
                let gjk = obs.quadratic[(j, k)];
                if gjk != 0.0 {
                    inner = add(&inner, rk, Complex64::new(0.5 * gjk, 0.0));
                }
            }
            if inner.iter().any(|z| z.norm() != 0.0) {
                out = add(&out, &self.quadrature(j, &inner), Complex64::new(1.0, 0.0));
            }
            if obs.linear[j] != 0.0 {
                out = add(&out, &r_psi[j], Complex64::new(obs.linear[j], 0.0));
            }
        }
        let mean = dot(psi, &out).re;
        (add(&out, psi, Complex64::new(-mean, 0.0)), mean)
    }
}

fn add(a: &[Complex64], b: &[Complex64], coef: Complex64) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + coef * y).collect()
}

fn scale(a: &[Complex64], coef: Complex64) -> Vector {
    a.iter().map(|x| x * coef).collect()
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn check_observable(recipe: &Recipe, obs: &QuadraticObservable) -> Result<QuadraticObservable> {
    if obs.num_modes() != recipe.num_modes {
        return Err(Error::invalid(format!(
            "observable acts on {} modes, recipe has {}",
            obs.num_modes(),
            recipe.num_modes
        )));
    }
    obs.embed(2)
}

fn relative_change(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn converge<F>(n_max: usize, mut eval: F) -> Result<OracleStats>
where
    F: FnMut(&FockSpace) -> Result<(f64, f64)>,
{
    if n_max < MIN_N_MAX {
        return Err(Error::invalid(format!(
            "n_max must be at least {MIN_N_MAX}, got {n_max}"
        )));
    }
    let mut previous = eval(&FockSpace::new(n_max))?;
    let mut current_n = n_max;
    loop {
        let next_n = current_n + N_MAX_STEP;
        let next = eval(&FockSpace::new(next_n))?;
        let change = relative_change(next.0, previous.0).max(relative_change(next.1, previous.1));
        if change < CONVERGENCE_TOL {
            return Ok(OracleStats {
                mean: next.0,
                variance: next.1,
                n_max: next_n,
                relative_change: change,
            });
        }
        if next_n + N_MAX_STEP > MAX_N_MAX {
            return Err(Error::TruncationNotConverged { n_max: next_n, change });
        }
        previous = next;
        current_n = next_n;
    }
}

/// Mean and symmetrized variance of `obs` after `recipe`, by brute force.
///
/// Starts at `n_max` and raises the truncation by [`N_MAX_STEP`] until the
/// moments change by less than [`CONVERGENCE_TOL`] (relative, floored at 1).
pub fn fock_oracle_stats(recipe: &Recipe, obs: &QuadraticObservable, n_max: usize) -> Result<OracleStats> {
    recipe.validate()?;
    let obs = check_observable(recipe, obs)?;
    converge(n_max, |space| {
        let psi = space.prepare(recipe)?;
        let (centered, mean) = space.centered_action(&obs, &psi);
        Ok((mean, dot(&centered, &centered).re))
    })
}

/// Symmetrized covariance `Re⟨(A − ⟨A⟩)ψ, (B − ⟨B⟩)ψ⟩`, reported in the `variance` field.
pub fn fock_oracle_covariance(
    recipe: &Recipe,
    a: &QuadraticObservable,
    b: &QuadraticObservable,
    n_max: usize,
) -> Result<OracleStats> {
    recipe.validate()?;
    let a = check_observable(recipe, a)?;
    let b = check_observable(recipe, b)?;
    converge(n_max, |space| {
        let psi = space.prepare(recipe)?;
        let (ca, mean_a) = space.centered_action(&a, &psi);
        let (cb, _) = space.centered_action(&b, &psi);
        Ok((mean_a, dot(&ca, &cb).re))
    })
}

//! Measurement statistics on Gaussian states.
//!
//! Observables are quadratic forms `Ô = ½ rᵀG r + gᵀr + c` in the phase-space
//! operators, symmetrically ordered. Photon numbers and Stokes operators are
//! exact instances; the strong-auxiliary-beam limit of `Ŝ₂`, `Ŝ₃` gives
//! purely linear forms. [`fock`] recomputes the same moments in a truncated
//! number basis, independently of the phase-space formulas here.

pub mod fock;

use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::gaussian::{omega, GaussianState};
use crate::numeric::to_decibel;
use crate::{Error, Result};

/// Default auxiliary (local-oscillator) amplitude for linearized scans.
pub const DEFAULT_LO_AMPLITUDE: f64 = 1e4;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticObservable {
    /// Symmetric `G`.
    pub quadratic: DMatrix<f64>,
    /// `g`.
    pub linear: DVector<f64>,
    /// `c`.
    pub offset: f64,
}

impl QuadraticObservable {
    pub fn zero(num_modes: usize) -> Self {
        QuadraticObservable {
            quadratic: DMatrix::zeros(2 * num_modes, 2 * num_modes),
            linear: DVector::zeros(2 * num_modes),
            offset: 0.0,
        }
    }

    pub fn new(quadratic: DMatrix<f64>, linear: DVector<f64>, offset: f64) -> Result<Self> {
        let d = linear.len();
        if d == 0 || !d.is_multiple_of(2) || quadratic.nrows() != d || quadratic.ncols() != d {
            return Err(Error::invalid("observable dimensions must be 2N x 2N and 2N"));
        }
        let asym = (&quadratic - quadratic.transpose()).abs().max();
        if asym > 1e-12 * quadratic.abs().max().max(1.0) {
            return Err(Error::invalid(format!("quadratic part is not symmetric ({asym:.3e})")));
        }
        Ok(QuadraticObservable {
            quadratic,
            linear,
            offset,
        })
    }

    pub fn num_modes(&self) -> usize {
        self.linear.len() / 2
    }

    /// `cos φ·x + sin φ·p` of one mode.
    pub fn quadrature(num_modes: usize, mode: usize, phi: f64) -> Result<Self> {
        check_mode(num_modes, mode)?;
        let mut o = Self::zero(num_modes);
        o.linear[2 * mode] = phi.cos();
        o.linear[2 * mode + 1] = phi.sin();
        Ok(o)
    }

    pub fn x(num_modes: usize, mode: usize) -> Result<Self> {
        Self::quadrature(num_modes, mode, 0.0)
    }

    pub fn p(num_modes: usize, mode: usize) -> Result<Self> {
        Self::quadrature(num_modes, mode, std::f64::consts::FRAC_PI_2)
    }

    /// `a†a = (x² + p² − 2)/4`.
    pub fn number(num_modes: usize, mode: usize) -> Result<Self> {
        Self::total_number(num_modes, &[mode])
    }

    pub fn total_number(num_modes: usize, modes: &[usize]) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::invalid("photon-number observable needs at least one mode"));
        }
        let mut o = Self::zero(num_modes);
        for &m in modes {
            check_mode(num_modes, m)?;
            o.quadratic[(2 * m, 2 * m)] += 0.5;
            o.quadratic[(2 * m + 1, 2 * m + 1)] += 0.5;
            o.offset -= 0.5;
        }
        Ok(o)
    }

    /// `self + sign·other`.
    pub fn combine(&self, other: &QuadraticObservable, sign: f64) -> Result<Self> {
        if self.num_modes() != other.num_modes() {
            return Err(Error::invalid("observables act on different mode counts"));
        }
        Ok(QuadraticObservable {
            quadratic: &self.quadratic + &other.quadratic * sign,
            linear: &self.linear + &other.linear * sign,
            offset: self.offset + sign * other.offset,
        })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        QuadraticObservable {
            quadratic: &self.quadratic * factor,
            linear: &self.linear * factor,
            offset: self.offset * factor,
        }
    }

    /// Same observable on a larger mode register (extra modes appended).
    pub fn embed(&self, num_modes: usize) -> Result<Self> {
        let d = 2 * self.num_modes();
        if num_modes < self.num_modes() {
            return Err(Error::invalid("cannot embed into fewer modes"));
        }
        let mut o = Self::zero(num_modes);
        o.quadratic.view_mut((0, 0), (d, d)).copy_from(&self.quadratic);
        o.linear.rows_mut(0, d).copy_from(&self.linear);
        o.offset = self.offset;
        Ok(o)
    }
}

fn check_mode(num_modes: usize, mode: usize) -> Result<()> {
    if mode >= num_modes {
        return Err(Error::invalid(format!(
            "mode index {mode} out of range for {num_modes} modes"
        )));
    }
    Ok(())
}

fn check_dims(state: &GaussianState, obs: &QuadraticObservable) -> Result<()> {
    if state.num_modes() != obs.num_modes() {
        return Err(Error::invalid(format!(
            "observable acts on {} modes, state has {}",
            obs.num_modes(),
            state.num_modes()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
}

pub fn quadratic_mean(state: &GaussianState, obs: &QuadraticObservable) -> Result<f64> {
    check_dims(state, obs)?;
    let g = &obs.quadratic;
    let mu = state.mean();
    let trace = (g * state.cov()).trace();
    Ok(0.5 * (trace + mu.dot(&(g * mu))) + obs.linear.dot(mu) + obs.offset)
}

/// Symmetrized covariance `½⟨{A, B}⟩ − ⟨A⟩⟨B⟩`.
///
/// For Gaussian states with `⟨r_j r_k⟩ = V_jk + iΩ_jk` (centered), Wick's
/// theorem gives `½Tr(G V H V) + ½Tr(G Ω H Ω) + (Gμ + g)ᵀ V (Hμ + h)`.
pub fn quadratic_covariance(state: &GaussianState, a: &QuadraticObservable, b: &QuadraticObservable) -> Result<f64> {
    check_dims(state, a)?;
    check_dims(state, b)?;
    let v = state.cov();
    let mu = state.mean();
    let o = omega(state.num_modes());
    let (ga, gb) = (&a.quadratic, &b.quadratic);
    let quad = 0.5 * (ga * v * gb * v).trace() + 0.5 * (ga * &o * gb * &o).trace();
    let la = ga * mu + &a.linear;
    let lb = gb * mu + &b.linear;
    Ok(quad + la.dot(&(v * lb)))
}

pub fn quadratic_stats(state: &GaussianState, obs: &QuadraticObservable) -> Result<Moments> {
    Ok(Moments {
        mean: quadratic_mean(state, obs)?,
        variance: quadratic_covariance(state, obs, obs)?,
    })
}

/// Degree of freedom a Stokes measurement probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dof {
    /// Signal combined with an orthogonally polarized auxiliary beam.
    Pol,
    /// Signal combined with an orthogonal spatial mode of the same polarization.
    Spa,
}

impl fmt::Display for Dof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Dof::Pol => "pol",
            Dof::Spa => "spa",
        })
    }
}

impl std::str::FromStr for Dof {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pol" => Ok(Dof::Pol),
            "spa" => Ok(Dof::Spa),
            other => Err(Error::invalid(format!("unknown degree of freedom '{other}'"))),
        }
    }
}

/// Stokes operator `Ŝ_μ` on the ordered pair `(s, t)`:
///
/// - `Ŝ₀ = a_s†a_s + a_t†a_t`, `Ŝ₁ = a_s†a_s − a_t†a_t`
/// - `Ŝ₂ = a_s†a_t + a_t†a_s = (x_s x_t + p_s p_t)/2`
/// - `Ŝ₃ = i(a_t†a_s − a_s†a_t) = (x_s p_t − x_t p_s)/2`
///
/// so that `[Ŝ₁, Ŝ₂] = 2iŜ₃` cyclically. Both degrees of freedom use the same
/// algebra; the pair is ordered (signal, auxiliary), so `dof` only names
/// which physical auxiliary mode sits at `t`.
pub fn stokes_observable(
    _dof: Dof,
    mu: u8,
    mode_pair: (usize, usize),
    num_modes: usize,
) -> Result<QuadraticObservable> {
    let (s, t) = mode_pair;
    check_mode(num_modes, s)?;
    check_mode(num_modes, t)?;
    if s == t {
        return Err(Error::invalid("Stokes operators need two distinct modes"));
    }
    let n_s = QuadraticObservable::number(num_modes, s)?;
    let n_t = QuadraticObservable::number(num_modes, t)?;
    let mut o = QuadraticObservable::zero(num_modes);
    let mut set = |i: usize, j: usize, v: f64| {
        o.quadratic[(i, j)] = v;
        o.quadratic[(j, i)] = v;
    };
    match mu {
        0 => return n_s.combine(&n_t, 1.0),
        1 => return n_s.combine(&n_t, -1.0),
        2 => {
            set(2 * s, 2 * t, 0.5);
            set(2 * s + 1, 2 * t + 1, 0.5);
        }
        3 => {
            set(2 * s, 2 * t + 1, 0.5);
            set(2 * t, 2 * s + 1, -0.5);
        }
        other => return Err(Error::invalid(format!("Stokes index must be 0..=3, got {other}"))),
    }
    Ok(o)
}

/// Strong-auxiliary limit of `Ŝ₂`/`Ŝ₃` on `signal_mode`.
///
/// With a coherent auxiliary of amplitude `β·e^{iφ}`, `Ŝ₂ → β(cos φ·x + sin φ·p)`
/// and `Ŝ₃ → β(sin φ·x − cos φ·p)` to first order in the signal; at `φ = 0`
/// these are the `x` and `−p` quadratures scaled by `β`.
pub fn linearized_stokes(
    _dof: Dof,
    mu: u8,
    lo_amplitude: f64,
    lo_phase: f64,
    signal_mode: usize,
    num_modes: usize,
) -> Result<QuadraticObservable> {
    if !(lo_amplitude > 0.0) || !lo_amplitude.is_finite() {
        return Err(Error::invalid(format!(
            "auxiliary amplitude must be positive, got {lo_amplitude}"
        )));
    }
    let phi = match mu {
        2 => lo_phase,
        3 => lo_phase - std::f64::consts::FRAC_PI_2,
        0 | 1 => {
            return Err(Error::invalid(format!(
                "Stokes S{mu} has no linear strong-auxiliary limit; use the exact quadratic form"
            )))
        }
        other => return Err(Error::invalid(format!("Stokes index must be 0..=3, got {other}"))),
    };
    Ok(QuadraticObservable::quadrature(num_modes, signal_mode, phi)?.scaled(lo_amplitude))
}

/// Photocurrent statistics referenced to the quantum noise limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectionResult {
    pub mean: f64,
    pub variance: f64,
    /// Variance of the same detection on a coherent state with the same mean field.
    pub qnl_variance: f64,
    pub db_vs_qnl: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionScheme {
    /// One detector on all modes.
    Direct,
    /// Two detectors behind the mode splitter, photocurrents added.
    Sum,
    /// Two detectors behind the mode splitter, photocurrents subtracted.
    Difference,
}

impl std::str::FromStr for DetectionScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(DetectionScheme::Direct),
            "sum" => Ok(DetectionScheme::Sum),
            "difference" => Ok(DetectionScheme::Difference),
            other => Err(Error::invalid(format!("unknown detection scheme '{other}'"))),
        }
    }
}

/// Evaluates `obs` on `state` and on the coherent reference with the same mean.
pub fn detect(state: &GaussianState, obs: &QuadraticObservable) -> Result<DetectionResult> {
    let m = quadratic_stats(state, obs)?;
    let reference = GaussianState::new(
        state.mean().clone(),
        DMatrix::identity(2 * state.num_modes(), 2 * state.num_modes()),
    )?;
    let qnl_variance = quadratic_stats(&reference, obs)?.variance;
    if !(qnl_variance > 0.0) {
        return Err(Error::UndefinedReference(
            "coherent reference has zero photocurrent noise (no mean field on the measured modes)".into(),
        ));
    }
    Ok(DetectionResult {
        mean: m.mean,
        variance: m.variance,
        qnl_variance,
        db_vs_qnl: to_decibel(m.variance, qnl_variance)?,
    })
}

pub fn direct_detection(state: &GaussianState, modes: &[usize]) -> Result<DetectionResult> {
    detect(state, &QuadraticObservable::total_number(state.num_modes(), modes)?)
}

/// `sign = +1` adds, `−1` subtracts the two photocurrents.
pub fn sum_difference(
    state: &GaussianState,
    modes_a: &[usize],
    modes_b: &[usize],
    sign: f64,
) -> Result<DetectionResult> {
    if modes_a.iter().any(|m| modes_b.contains(m)) {
        return Err(Error::invalid("detector mode sets must be disjoint"));
    }
    let n = state.num_modes();
    let obs = QuadraticObservable::total_number(n, modes_a)?
        .combine(&QuadraticObservable::total_number(n, modes_b)?, sign)?;
    detect(state, &obs)
}

/// Two-mode detection in the given scheme, arm a = mode 0, arm b = mode 1.
pub fn detect_scheme(state: &GaussianState, scheme: DetectionScheme) -> Result<DetectionResult> {
    match scheme {
        DetectionScheme::Direct => direct_detection(state, &[0, 1]),
        DetectionScheme::Sum => sum_difference(state, &[0], &[1], 1.0),
        DetectionScheme::Difference => sum_difference(state, &[0], &[1], -1.0),
    }
}

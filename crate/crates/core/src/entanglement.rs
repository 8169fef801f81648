//! Stokes-operator inseparability criterion for the split cylindrical beam.
//!
//! After the mode splitter, arm a carries the x-polarized constituent and arm
//! b the y-polarized one. Each arm is mixed with a coherent auxiliary beam in
//! an orthogonal mode, either orthogonally polarized (`pol`) or orthogonal in
//! its spatial profile (`spa`), and Stokes operators are measured on the
//! (signal, auxiliary) pair. For separable states
//!
//! `V(Ŝ_μᵃ + Ŝ_μᵇ) + V(Ŝ_νᵃ − Ŝ_νᵇ) ≥ 2|⟨Ŝ_κᵃ⟩| + 2|⟨Ŝ_κᵇ⟩|`,
//!
//! where `[Ŝ_μ, Ŝ_ν] = 2iŜ_κ`. Reports divide the left side by the right, so
//! the separable bound is 1. The per-arm commutator term is called
//! `stokes_cov_bound` throughout.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::gaussian::{omega, GaussianState};
use crate::numeric::bisect;
use crate::observables::{
    linearized_stokes, quadratic_covariance, quadratic_mean, quadratic_stats, stokes_observable, Dof,
    QuadraticObservable,
};
use crate::states::{build, Construction, CylindricalStateSpec};
use crate::vector_modes::CylindricalKind;
use crate::{Error, Result};

/// Relative tolerance of the arm-symmetry check.
pub const SYMMETRY_TOL: f64 = 1e-6;

/// Composite coherent amplitude used for scan states. The strong-auxiliary
/// criterion does not depend on it.
pub const SCAN_ALPHA: f64 = 1.0;

/// Squeezing parameter `|ζ|` per unit of `s` in `e^{−s}·cosh s`.
///
/// Squeezing the composite `x` quadrature by `e^{−2r}` while its partner mode
/// stays in vacuum gives `(1 + e^{−2r})/2 = e^{−r}·cosh r`, so the map is the
/// identity; [`calibrate_squeezing_map`] recovers it numerically.
pub const ZETA_PER_S: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct MeasurementCombination {
    pub mu: u8,
    pub nu: u8,
    pub dof_a: Dof,
    pub dof_b: Dof,
}

impl MeasurementCombination {
    pub fn new(mu: u8, nu: u8, dof_a: Dof, dof_b: Dof) -> Result<Self> {
        if !matches!((mu, nu), (1, 2) | (1, 3) | (2, 3)) {
            return Err(Error::invalid(format!(
                "Stokes pair ({mu}, {nu}) is not one of (1,2), (1,3), (2,3)"
            )));
        }
        Ok(MeasurementCombination { mu, nu, dof_a, dof_b })
    }

    pub fn is_hybrid(&self) -> bool {
        self.dof_a != self.dof_b
    }

    /// `κ` with `[Ŝ_μ, Ŝ_ν] = ±2iŜ_κ`.
    pub fn partner(&self) -> u8 {
        6 - self.mu - self.nu
    }

    /// Polarization/polarization, spatial/spatial and hybrid (spatial on arm
    /// a, polarization on arm b) for one Stokes pair.
    pub fn three_sets(mu: u8, nu: u8) -> Result<[Self; 3]> {
        Ok([
            Self::new(mu, nu, Dof::Pol, Dof::Pol)?,
            Self::new(mu, nu, Dof::Spa, Dof::Spa)?,
            Self::new(mu, nu, Dof::Spa, Dof::Pol)?,
        ])
    }

    /// Label such as `pol/spa`.
    pub fn dof_label(&self) -> String {
        format!("{}/{}", self.dof_a, self.dof_b)
    }
}

/// How the auxiliary beams enter the Stokes measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum LoModel {
    /// Auxiliary amplitude so large that `Ŝ₂`, `Ŝ₃` are scaled signal quadratures.
    Linearized { lo_amplitude: f64, phases: [f64; 2] },
    /// Exact quadratic Stokes operators with coherent auxiliaries appended as modes 2 and 3.
    Exact { aux_amplitude: f64, phases: [f64; 2] },
}

impl LoModel {
    pub fn linearized(kind: CylindricalKind, lo_amplitude: f64) -> Self {
        LoModel::Linearized {
            lo_amplitude,
            phases: locked_phases(kind),
        }
    }

    pub fn exact(kind: CylindricalKind, aux_amplitude: f64) -> Self {
        LoModel::Exact {
            aux_amplitude,
            phases: locked_phases(kind),
        }
    }

    /// Same model with auxiliary phases locked to `kind`.
    pub fn relocked(self, kind: CylindricalKind) -> Self {
        match self {
            LoModel::Linearized { lo_amplitude, .. } => Self::linearized(kind, lo_amplitude),
            LoModel::Exact { aux_amplitude, .. } => Self::exact(kind, aux_amplitude),
        }
    }
}

/// Auxiliary phases in phase with each arm's share of a real composite
/// amplitude: `π` where the composite weight is negative.
pub fn locked_phases(kind: CylindricalKind) -> [f64; 2] {
    kind.composite_weights().map(|w| if w < 0.0 { PI } else { 0.0 })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntanglementReport {
    /// `[V(Ŝ_μᵃ + Ŝ_μᵇ) + V(Ŝ_νᵃ − Ŝ_νᵇ)] / (4·stokes_cov_bound)`.
    pub lhs: f64,
    /// Separable bound after normalization, always 1.
    pub bound: f64,
    pub entangled: bool,
    /// Squeezing parameter, when the state came from a scan.
    pub s: Option<f64>,
    pub combination: MeasurementCombination,
    /// Mean over both arms of `|⟨Ŝ_κ⟩|`.
    pub stokes_cov_bound: f64,
    /// Arms differ by more than [`SYMMETRY_TOL`].
    pub warn_asymmetric: bool,
}

struct ArmObservables {
    mu: QuadraticObservable,
    nu: QuadraticObservable,
    /// `|⟨Ŝ_κ⟩|`
    commutator: f64,
}

/// Evaluates the criterion on a two-mode signal state (arm a = mode 0, arm b = mode 1).
pub fn duan_criterion(
    state: &GaussianState,
    comb: &MeasurementCombination,
    lo_model: &LoModel,
) -> Result<EntanglementReport> {
    if state.num_modes() != 2 {
        return Err(Error::invalid(format!(
            "criterion expects the two split signal modes, got {} modes",
            state.num_modes()
        )));
    }
    let (full, arms) = match *lo_model {
        LoModel::Linearized { lo_amplitude, phases } => {
            let arm = |dof: Dof, mode: usize| -> Result<ArmObservables> {
                let mu = linearized_stokes(dof, comb.mu, lo_amplitude, phases[mode], mode, 2)?;
                let nu = linearized_stokes(dof, comb.nu, lo_amplitude, phases[mode], mode, 2)?;
                // [gᵀr, hᵀr] = 2i gᵀΩh
                let commutator = mu.linear.dot(&(omega(2) * &nu.linear)).abs();
                Ok(ArmObservables { mu, nu, commutator })
            };
            (state.clone(), [arm(comb.dof_a, 0)?, arm(comb.dof_b, 1)?])
        }
        LoModel::Exact { aux_amplitude, phases } => {
            if !(aux_amplitude > 0.0) {
                return Err(Error::invalid(format!(
                    "auxiliary amplitude must be positive, got {aux_amplitude}"
                )));
            }
            let aux = GaussianState::coherent(&[
                Complex64::from_polar(aux_amplitude, phases[0]),
                Complex64::from_polar(aux_amplitude, phases[1]),
            ])?;
            let full = state.tensor(&aux);
            let arm = |dof: Dof, signal: usize, aux_mode: usize| -> Result<ArmObservables> {
                let mu = stokes_observable(dof, comb.mu, (signal, aux_mode), 4)?;
                let nu = stokes_observable(dof, comb.nu, (signal, aux_mode), 4)?;
                let kappa = stokes_observable(dof, comb.partner(), (signal, aux_mode), 4)?;
                let commutator = quadratic_mean(&full, &kappa)?.abs();
                Ok(ArmObservables { mu, nu, commutator })
            };
            let arms = [arm(comb.dof_a, 0, 2)?, arm(comb.dof_b, 1, 3)?];
            (full, arms)
        }
    };
    let [a, b] = &arms;
    let stokes_cov_bound = 0.5 * (a.commutator + b.commutator);
    if !(stokes_cov_bound > 0.0) {
        return Err(Error::CriterionDegenerate);
    }
    let v_sum = quadratic_stats(&full, &a.mu.combine(&b.mu, 1.0)?)?.variance;
    let v_diff = quadratic_stats(&full, &a.nu.combine(&b.nu, -1.0)?)?.variance;
    let lhs = (v_sum + v_diff) / (4.0 * stokes_cov_bound);

    let cov_a = quadratic_covariance(&full, &a.mu, &a.nu)?;
    let cov_b = quadratic_covariance(&full, &b.mu, &b.nu)?;
    let scale = 4.0 * stokes_cov_bound;
    let warn_asymmetric = (a.commutator - b.commutator).abs() > SYMMETRY_TOL * stokes_cov_bound
        || (cov_a - cov_b).abs() > SYMMETRY_TOL * scale;

    Ok(EntanglementReport {
        lhs,
        bound: 1.0,
        entangled: (0.0..1.0).contains(&lhs),
        s: None,
        combination: *comb,
        stokes_cov_bound,
        warn_asymmetric,
    })
}

/// `e^{−s}·cosh s`, falling from 1 at `s = 0` toward ½.
pub fn closed_form_criterion(s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::invalid(format!(
            "squeezing parameter must be non-negative, got {s}"
        )));
    }
    // (1 + e^{−2s})/2 avoids overflow in cosh for large s
    Ok(0.5 * (1.0 + (-2.0 * s).exp()))
}

/// Bright squeezed state of `kind` at squeezing `s` (composite amplitude [`SCAN_ALPHA`]).
pub fn scan_state(kind: CylindricalKind, s: f64) -> Result<GaussianState> {
    state_for_s(kind, s, SCAN_ALPHA)
}

fn state_for_s(kind: CylindricalKind, s: f64, alpha: f64) -> Result<GaussianState> {
    if !(s >= 0.0) {
        return Err(Error::invalid(format!(
            "squeezing parameter must be non-negative, got {s}"
        )));
    }
    build(&CylindricalStateSpec::new(
        kind,
        Complex64::new(alpha, 0.0),
        Complex64::new(s * ZETA_PER_S, 0.0),
        Construction::Composite,
    ))
}

/// One report per `(s, combination)`, `s` outer.
pub fn scan(
    kind: CylindricalKind,
    s_values: &[f64],
    combinations: &[MeasurementCombination],
    lo_model: &LoModel,
) -> Result<Vec<EntanglementReport>> {
    if s_values.is_empty() {
        return Err(Error::invalid("scan needs at least one s value"));
    }
    if combinations.is_empty() {
        return Err(Error::invalid("scan needs at least one measurement combination"));
    }
    let mut rows = Vec::with_capacity(s_values.len() * combinations.len());
    for &s in s_values {
        let state = scan_state(kind, s)?;
        for comb in combinations {
            let mut report = duan_criterion(&state, comb, lo_model)?;
            report.s = Some(s);
            rows.push(report);
        }
    }
    Ok(rows)
}

/// Fits the slope `k` in `s = k·|ζ|` by matching the strong-auxiliary
/// pipeline to `e^{−s}·cosh s` at a single small `ζ`.
pub fn calibrate_squeezing_map(kind: CylindricalKind, zeta: f64) -> Result<f64> {
    if !(zeta > 0.0) {
        return Err(Error::invalid("calibration needs a positive squeezing parameter"));
    }
    let state = build(&CylindricalStateSpec::new(
        kind,
        Complex64::new(SCAN_ALPHA, 0.0),
        Complex64::new(zeta, 0.0),
        Construction::Composite,
    ))?;
    let comb = MeasurementCombination::new(2, 3, Dof::Spa, Dof::Pol)?;
    let lhs = duan_criterion(
        &state,
        &comb,
        &LoModel::linearized(kind, crate::observables::DEFAULT_LO_AMPLITUDE),
    )?
    .lhs;
    let s = bisect(|s| 0.5 * (1.0 + (-2.0 * s).exp()) - lhs, 0.0, 50.0, 1e-15).ok_or_else(|| {
        Error::invalid(format!(
            "criterion value {lhs} is outside the closed-form range (1/2, 1]"
        ))
    })?;
    Ok(s / zeta)
}

/// Exact-Stokes criterion for `(Ŝ₁, Ŝ₃)` with signal and auxiliary beams of
/// comparable brightness.
///
/// `alpha_signal` is the coherent amplitude in each arm (the composite
/// amplitude is `√2` times larger); auxiliaries are phase-locked to it.
pub fn equal_amplitude_probe(
    kind: CylindricalKind,
    s: f64,
    alpha_signal: f64,
    alpha_aux: f64,
    dof_a: Dof,
    dof_b: Dof,
) -> Result<EntanglementReport> {
    if !(alpha_aux > 0.0) {
        return Err(Error::invalid(format!(
            "auxiliary amplitude must be positive, got {alpha_aux}"
        )));
    }
    let state = state_for_s(kind, s, alpha_signal * std::f64::consts::SQRT_2)?;
    let comb = MeasurementCombination::new(1, 3, dof_a, dof_b)?;
    let mut report = duan_criterion(&state, &comb, &LoModel::exact(kind, alpha_aux))?;
    report.s = Some(s);
    Ok(report)
}

//! Bright squeezed cylindrically polarized states.
//!
//! The composite mode `a_K = w₀ a₀ + w₁ a₁` (weights from
//! [`CylindricalKind::composite_weights`]) is displaced and squeezed. Because
//! `a_K²` contains the cross term `2w₀w₁ a₀a₁`, the same state factors into
//! single-mode squeezers of strength `w²ζ` on each constituent, a two-mode
//! squeezer of strength `w₀w₁ζ` between them, and split displacements `w·α`.
//! For the azimuthal mode `w = (−1, 1)/√2`, which gives the two-mode squeezer
//! `exp[(−ζ* a₀a₁ + ζ a₀†a₁†)/2]` and displacements `∓α/√2`.
//!
//! Mode 0 is the x-polarized constituent, mode 1 the y-polarized one
//! (`x01, y10` for azimuthal, `x10, y01` for radial).

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::gaussian::GaussianState;
use crate::vector_modes::CylindricalKind;
use crate::{Error, Result};

/// Largest accepted `|ζ|`.
pub const MAX_ZETA: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    /// `D_K(α) S_K(ζ)|0⟩` in the rotated composite basis.
    Composite,
    /// Single-mode and two-mode operations on the constituent modes.
    Factored,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylindricalStateSpec {
    pub kind: CylindricalKind,
    pub alpha: Complex64,
    pub zeta: Complex64,
    pub construction: Construction,
}

impl CylindricalStateSpec {
    pub fn new(kind: CylindricalKind, alpha: Complex64, zeta: Complex64, construction: Construction) -> Self {
        CylindricalStateSpec {
            kind,
            alpha,
            zeta,
            construction,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.zeta.norm() <= MAX_ZETA) {
            return Err(Error::invalid(format!(
                "|zeta| = {} exceeds the supported maximum {MAX_ZETA}",
                self.zeta.norm()
            )));
        }
        if !self.alpha.re.is_finite() || !self.alpha.im.is_finite() {
            return Err(Error::invalid("alpha must be finite"));
        }
        Ok(())
    }
}

/// Unitary taking constituent amplitudes to `(composite, orthogonal partner)`.
///
/// It is real, symmetric and its own inverse.
pub fn composite_unitary(kind: CylindricalKind) -> DMatrix<Complex64> {
    let [w0, w1] = kind.composite_weights();
    DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(w0, 0.0),
            Complex64::new(w1, 0.0),
            Complex64::new(w1, 0.0),
            Complex64::new(-w0, 0.0),
        ],
    )
}

pub fn build(spec: &CylindricalStateSpec) -> Result<GaussianState> {
    spec.validate()?;
    match spec.construction {
        Construction::Composite => build_composite(spec.kind, spec.alpha, spec.zeta),
        Construction::Factored => build_factored(spec.kind, spec.alpha, spec.zeta),
    }
}

fn build_composite(kind: CylindricalKind, alpha: Complex64, zeta: Complex64) -> Result<GaussianState> {
    let u = composite_unitary(kind);
    GaussianState::vacuum(2)?
        .apply_mode_unitary(&u)?
        .squeeze(0, zeta)?
        .displace(0, alpha)?
        .apply_mode_unitary(&u.adjoint())
}

fn build_factored(kind: CylindricalKind, alpha: Complex64, zeta: Complex64) -> Result<GaussianState> {
    let [w0, w1] = kind.composite_weights();
    // operators act right to left: two-mode squeezer, then D·S on mode 1, then D·S on mode 0
    GaussianState::vacuum(2)?
        .two_mode_squeeze(0, 1, zeta * (w0 * w1))?
        .squeeze(1, zeta * (w1 * w1))?
        .displace(1, alpha * w1)?
        .squeeze(0, zeta * (w0 * w0))?
        .displace(0, alpha * w0)
}

/// Largest element-wise difference between the two constructions.
pub fn verify_factorization(kind: CylindricalKind, alpha: Complex64, zeta: Complex64) -> Result<f64> {
    let composite = build(&CylindricalStateSpec::new(kind, alpha, zeta, Construction::Composite))?;
    let factored = build(&CylindricalStateSpec::new(kind, alpha, zeta, Construction::Factored))?;
    composite.max_abs_diff(&factored)
}

/// Variance of the composite mode's `x` quadrature.
pub fn composite_quadrature_variance(state: &GaussianState, kind: CylindricalKind) -> Result<f64> {
    let rotated = state.apply_mode_unitary(&composite_unitary(kind))?;
    Ok(rotated.cov()[(0, 0)])
}

/// Per-constituent coherent amplitude magnitude for a composite amplitude `α`.
pub fn per_arm_amplitude(alpha: f64) -> f64 {
    alpha * FRAC_1_SQRT_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn zero_parameters_give_vacuum() {
        let vac = GaussianState::vacuum(2).unwrap();
        for construction in [Construction::Composite, Construction::Factored] {
            let s = build(&CylindricalStateSpec::new(
                CylindricalKind::Azimuthal,
                c(0.0, 0.0),
                c(0.0, 0.0),
                construction,
            ))
            .unwrap();
            assert_abs_diff_eq!(s.max_abs_diff(&vac).unwrap(), 0.0, epsilon = 1e-15);
        }
        assert_eq!(
            verify_factorization(CylindricalKind::Azimuthal, c(0.0, 0.0), c(0.0, 0.0)).unwrap(),
            0.0
        );
    }

    #[test]
    fn coherent_amplitude_splits() {
        let s = build(&CylindricalStateSpec::new(
            CylindricalKind::Azimuthal,
            c(2.0, 0.0),
            c(0.0, 0.0),
            Construction::Composite,
        ))
        .unwrap();
        let r2 = 2f64.sqrt();
        assert_abs_diff_eq!(
            (s.amplitude(0).unwrap() - c(-2.0 / r2, 0.0)).norm(),
            0.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            (s.amplitude(1).unwrap() - c(2.0 / r2, 0.0)).norm(),
            0.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!((s.cov() - DMatrix::identity(4, 4)).abs().max(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn composite_squeezing() {
        let s = build(&CylindricalStateSpec::new(
            CylindricalKind::Azimuthal,
            c(0.0, 0.0),
            c(0.6, 0.0),
            Construction::Composite,
        ))
        .unwrap();
        let v = composite_quadrature_variance(&s, CylindricalKind::Azimuthal).unwrap();
        assert_abs_diff_eq!(v, (-1.2f64).exp(), epsilon = 1e-14);
        assert_abs_diff_eq!(v, 0.30119, epsilon = 1e-5);
    }

    #[test]
    fn factorization_examples() {
        assert!(verify_factorization(CylindricalKind::Azimuthal, c(3.0, 0.0), c(0.8, 0.0)).unwrap() < 1e-10);
        let zeta = Complex64::from_polar(0.5, std::f64::consts::FRAC_PI_3);
        assert!(verify_factorization(CylindricalKind::Azimuthal, c(1.0, 2.0), zeta).unwrap() < 1e-10);
        assert!(verify_factorization(CylindricalKind::Radial, c(1.0, 2.0), zeta).unwrap() < 1e-10);
    }

    #[test]
    fn zeta_guard() {
        let spec = CylindricalStateSpec::new(
            CylindricalKind::Radial,
            c(0.0, 0.0),
            c(5.5, 0.0),
            Construction::Composite,
        );
        assert!(build(&spec).is_err());
    }

    #[test]
    fn spec_json() {
        let spec = CylindricalStateSpec::new(
            CylindricalKind::Azimuthal,
            c(1.0, -2.0),
            c(0.3, 0.1),
            Construction::Factored,
        );
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(
            text,
            r#"{"kind":"azimuthal","alpha":[1.0,-2.0],"zeta":[0.3,0.1],"construction":"factored"}"#
        );
        let back: CylindricalStateSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}

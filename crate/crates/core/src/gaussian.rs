//! Gaussian states over `N` optical modes and the symplectic maps acting on them.
//!
//! Phase-space vectors are interleaved, `(x₀, p₀, x₁, p₁, …)`, with
//! `x = a + a†` and `p = -i(a − a†)`. The vacuum has zero mean and identity
//! covariance, and canonical commutators read `[r_j, r_k] = 2iΩ_jk` with
//! `Ω = ⊕ [[0, 1], [−1, 0]]`.
//!
//! Every operation returns a new state; nothing is mutated in place.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numeric::check_unitary;
use crate::{Error, Result};

/// Default tolerance for the uncertainty-principle check.
pub const PHYSICALITY_TOL: f64 = 1e-9;

/// Tolerance used when validating user supplied unitaries.
pub const UNITARY_TOL: f64 = 1e-10;

/// Block-diagonal symplectic form for `n` modes.
pub fn omega(n: usize) -> DMatrix<f64> {
    let mut o = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        o[(2 * k, 2 * k + 1)] = 1.0;
        o[(2 * k + 1, 2 * k)] = -1.0;
    }
    o
}

/// Real `2N×2N` image of a complex `N×N` mode transformation.
///
/// Entry `u_jk = a + ib` becomes the block `[[a, −b], [b, a]]`, so that mode
/// amplitudes transform as `α' = u·α`.
pub fn real_image(u: &DMatrix<Complex64>) -> DMatrix<f64> {
    let n = u.nrows();
    let mut s = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        for k in 0..n {
            let z = u[(j, k)];
            s[(2 * j, 2 * k)] = z.re;
            s[(2 * j, 2 * k + 1)] = -z.im;
            s[(2 * j + 1, 2 * k)] = z.im;
            s[(2 * j + 1, 2 * k + 1)] = z.re;
        }
    }
    s
}

/// An affine symplectic map `r → S·r + d`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    pub matrix: DMatrix<f64>,
    pub displacement: DVector<f64>,
}

impl SymplecticTransform {
    pub fn identity(num_modes: usize) -> Self {
        SymplecticTransform {
            matrix: DMatrix::identity(2 * num_modes, 2 * num_modes),
            displacement: DVector::zeros(2 * num_modes),
        }
    }

    pub fn num_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// Displacement `D(α) = exp(α a† − α* a)` on one mode.
    pub fn displacement(num_modes: usize, mode: usize, amplitude: Complex64) -> Result<Self> {
        check_mode(num_modes, mode)?;
        let mut t = Self::identity(num_modes);
        t.displacement[2 * mode] = 2.0 * amplitude.re;
        t.displacement[2 * mode + 1] = 2.0 * amplitude.im;
        Ok(t)
    }

    /// Single-mode squeezer `S(ζ) = exp[(ζ* a² − ζ a†²)/2]`.
    ///
    /// For `ζ = r·e^{iθ}` this maps `a → a·cosh r − a†·e^{iθ}·sinh r`; real
    /// positive `ζ` squeezes `x` by `e^{−r}`.
    pub fn single_mode_squeezer(num_modes: usize, mode: usize, zeta: Complex64) -> Result<Self> {
        check_mode(num_modes, mode)?;
        let (r, theta) = zeta.to_polar();
        let (c, s) = (r.cosh(), r.sinh());
        let mut t = Self::identity(num_modes);
        let i = 2 * mode;
        t.matrix[(i, i)] = c - s * theta.cos();
        t.matrix[(i, i + 1)] = -s * theta.sin();
        t.matrix[(i + 1, i)] = -s * theta.sin();
        t.matrix[(i + 1, i + 1)] = c + s * theta.cos();
        Ok(t)
    }

    /// Two-mode squeezer `exp[ξ* a_i a_j − ξ a_i† a_j†]`.
    ///
    /// With `ξ = r·e^{iθ}`: `a_i → a_i·cosh r − a_j†·e^{iθ}·sinh r` and
    /// symmetrically for `a_j`. Real positive `ξ` squeezes `x_i + x_j` and
    /// `p_i − p_j`; real negative `ξ` squeezes `x_i − x_j` and `p_i + p_j`.
    pub fn two_mode_squeezer(num_modes: usize, i: usize, j: usize, xi: Complex64) -> Result<Self> {
        check_mode(num_modes, i)?;
        check_mode(num_modes, j)?;
        if i == j {
            return Err(Error::invalid("two-mode squeezing needs two distinct modes"));
        }
        let (r, theta) = xi.to_polar();
        let (c, s) = (r.cosh(), r.sinh());
        // coupling block: x_i' gets −s(cosθ x_j + sinθ p_j), p_i' gets −s(sinθ x_j − cosθ p_j)
        let k = [
            [-s * theta.cos(), -s * theta.sin()],
            [-s * theta.sin(), s * theta.cos()],
        ];
        let mut t = Self::identity(num_modes);
        for (a, b) in [(i, j), (j, i)] {
            t.matrix[(2 * a, 2 * a)] = c;
            t.matrix[(2 * a + 1, 2 * a + 1)] = c;
            for (u, row) in k.iter().enumerate() {
                for (v, &entry) in row.iter().enumerate() {
                    t.matrix[(2 * a + u, 2 * b + v)] = entry;
                }
            }
        }
        Ok(t)
    }

    /// Passive linear-optics transform with mode amplitudes mapping `α' = u·α`.
    pub fn passive(u: &DMatrix<Complex64>) -> Result<Self> {
        check_unitary(u, UNITARY_TOL, "mode transformation")?;
        Ok(SymplecticTransform {
            matrix: real_image(u),
            displacement: DVector::zeros(2 * u.nrows()),
        })
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &SymplecticTransform) -> SymplecticTransform {
        SymplecticTransform {
            matrix: &next.matrix * &self.matrix,
            displacement: &next.matrix * &self.displacement + &next.displacement,
        }
    }

    /// Largest absolute entry of `SᵀΩS − Ω`.
    pub fn symplectic_deviation(&self) -> f64 {
        let o = omega(self.num_modes());
        (self.matrix.transpose() * &o * &self.matrix - o).abs().max()
    }

    pub fn is_symplectic(&self, tol: f64) -> bool {
        self.symplectic_deviation() <= tol
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

/// Mean vector and covariance matrix of a Gaussian state, in shot-noise units.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    num_modes: usize,
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

impl GaussianState {
    /// Builds a state from raw moments, checking shapes and symmetry.
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let dim = mean.len();
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "mean vector length {dim} is not 2N with N >= 1"
            )));
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::invalid(format!(
                "covariance is {}x{}, expected {dim}x{dim}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("moments contain non-finite values"));
        }
        let asym = (&cov - cov.transpose()).abs().max();
        let scale = cov.abs().max().max(1.0);
        if asym > 1e-9 * scale {
            return Err(Error::invalid(format!(
                "covariance is not symmetric (max asymmetry {asym:.3e})"
            )));
        }
        Ok(GaussianState {
            num_modes: dim / 2,
            mean,
            cov: symmetrize(&cov),
        })
    }

    pub fn vacuum(num_modes: usize) -> Result<Self> {
        if num_modes == 0 {
            return Err(Error::invalid("vacuum needs at least one mode"));
        }
        Ok(GaussianState {
            num_modes,
            mean: DVector::zeros(2 * num_modes),
            cov: DMatrix::identity(2 * num_modes, 2 * num_modes),
        })
    }

    /// Product of coherent states with the given amplitudes.
    pub fn coherent(amplitudes: &[Complex64]) -> Result<Self> {
        let mut state = Self::vacuum(amplitudes.len())?;
        for (k, a) in amplitudes.iter().enumerate() {
            state.mean[2 * k] = 2.0 * a.re;
            state.mean[2 * k + 1] = 2.0 * a.im;
        }
        Ok(state)
    }

    pub fn num_modes(&self) -> usize {
        self.num_modes
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Complex mean amplitude `⟨a_k⟩` of one mode.
    pub fn amplitude(&self, mode: usize) -> Result<Complex64> {
        check_mode(self.num_modes, mode)?;
        Ok(Complex64::new(self.mean[2 * mode], self.mean[2 * mode + 1]) * 0.5)
    }

    /// Applies `r → S·r + d`.
    pub fn apply(&self, t: &SymplecticTransform) -> Result<Self> {
        if t.num_modes() != self.num_modes {
            return Err(Error::invalid(format!(
                "transform acts on {} modes, state has {}",
                t.num_modes(),
                self.num_modes
            )));
        }
        let s = &t.matrix;
        Ok(GaussianState {
            num_modes: self.num_modes,
            mean: s * &self.mean + &t.displacement,
            cov: symmetrize(&(s * &self.cov * s.transpose())),
        })
    }

    pub fn displace(&self, mode: usize, amplitude: Complex64) -> Result<Self> {
        self.apply(&SymplecticTransform::displacement(self.num_modes, mode, amplitude)?)
    }

    pub fn squeeze(&self, mode: usize, zeta: Complex64) -> Result<Self> {
        self.apply(&SymplecticTransform::single_mode_squeezer(self.num_modes, mode, zeta)?)
    }

    /// Applies `exp[ξ* a_i a_j − ξ a_i† a_j†]` with `ξ = zeta`.
    pub fn two_mode_squeeze(&self, mode_i: usize, mode_j: usize, zeta: Complex64) -> Result<Self> {
        self.apply(&SymplecticTransform::two_mode_squeezer(
            self.num_modes,
            mode_i,
            mode_j,
            zeta,
        )?)
    }

    /// Applies a passive `N×N` unitary to all modes at once.
    pub fn apply_mode_unitary(&self, u: &DMatrix<Complex64>) -> Result<Self> {
        if u.nrows() != self.num_modes || u.ncols() != self.num_modes {
            return Err(Error::invalid(format!(
                "mode unitary is {}x{}, state has {} modes",
                u.nrows(),
                u.ncols(),
                self.num_modes
            )));
        }
        let t = SymplecticTransform::passive(u)?;
        // passive maps fix the vacuum, so rotate only the excess noise; this
        // keeps vacuum and coherent covariances exact
        let identity = DMatrix::identity(2 * self.num_modes, 2 * self.num_modes);
        let excess = &self.cov - &identity;
        Ok(GaussianState {
            num_modes: self.num_modes,
            mean: &t.matrix * &self.mean,
            cov: symmetrize(&(identity + &t.matrix * excess * t.matrix.transpose())),
        })
    }

    /// Pure loss with transmission `eta` on one mode (a beam splitter with a vacuum ancilla).
    pub fn attenuate(&self, mode: usize, eta: f64) -> Result<Self> {
        check_mode(self.num_modes, mode)?;
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::invalid(format!("transmission {eta} outside [0, 1]")));
        }
        let t = eta.sqrt();
        let mut x = DMatrix::identity(2 * self.num_modes, 2 * self.num_modes);
        x[(2 * mode, 2 * mode)] = t;
        x[(2 * mode + 1, 2 * mode + 1)] = t;
        let mut cov = &x * &self.cov * &x;
        cov[(2 * mode, 2 * mode)] += 1.0 - eta;
        cov[(2 * mode + 1, 2 * mode + 1)] += 1.0 - eta;
        Ok(GaussianState {
            num_modes: self.num_modes,
            mean: &x * &self.mean,
            cov: symmetrize(&cov),
        })
    }

    /// Smallest eigenvalue of the Hermitian matrix `cov + iΩ`.
    pub fn min_uncertainty_eigenvalue(&self) -> f64 {
        // A + iB (A symmetric, B antisymmetric) has the spectrum of the real
        // symmetric [[A, −B], [B, A]], each eigenvalue doubled.
        let d = 2 * self.num_modes;
        let o = omega(self.num_modes);
        let mut m = DMatrix::zeros(2 * d, 2 * d);
        m.view_mut((0, 0), (d, d)).copy_from(&self.cov);
        m.view_mut((d, d), (d, d)).copy_from(&self.cov);
        m.view_mut((0, d), (d, d)).copy_from(&(-&o));
        m.view_mut((d, 0), (d, d)).copy_from(&o);
        SymmetricEigen::new(m).eigenvalues.min()
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.min_uncertainty_eigenvalue() >= -tol
    }

    /// `det(cov)`, which is 1 for pure states.
    pub fn cov_determinant(&self) -> f64 {
        self.cov.determinant()
    }

    /// Marginal state of the listed modes, in the listed order.
    pub fn reduced(&self, modes: &[usize]) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::invalid("reduced state needs at least one mode"));
        }
        let mut idx = Vec::with_capacity(2 * modes.len());
        for &m in modes {
            check_mode(self.num_modes, m)?;
            idx.extend([2 * m, 2 * m + 1]);
        }
        let mean = DVector::from_iterator(idx.len(), idx.iter().map(|&i| self.mean[i]));
        let cov = DMatrix::from_fn(idx.len(), idx.len(), |r, c| self.cov[(idx[r], idx[c])]);
        Ok(GaussianState {
            num_modes: modes.len(),
            mean,
            cov,
        })
    }

    /// Direct sum: `self`'s modes followed by `other`'s, uncorrelated.
    pub fn tensor(&self, other: &GaussianState) -> GaussianState {
        let (d1, d2) = (2 * self.num_modes, 2 * other.num_modes);
        let mut mean = DVector::zeros(d1 + d2);
        mean.rows_mut(0, d1).copy_from(&self.mean);
        mean.rows_mut(d1, d2).copy_from(&other.mean);
        let mut cov = DMatrix::zeros(d1 + d2, d1 + d2);
        cov.view_mut((0, 0), (d1, d1)).copy_from(&self.cov);
        cov.view_mut((d1, d1), (d2, d2)).copy_from(&other.cov);
        GaussianState {
            num_modes: self.num_modes + other.num_modes,
            mean,
            cov,
        }
    }

    /// Largest absolute difference over means and covariance entries.
    pub fn max_abs_diff(&self, other: &GaussianState) -> Result<f64> {
        if self.num_modes != other.num_modes {
            return Err(Error::invalid("states have different mode counts"));
        }
        let dm = (&self.mean - &other.mean).abs().max();
        let dc = (&self.cov - &other.cov).abs().max();
        Ok(dm.max(dc))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&GaussianStateDoc::from(self)).expect("state serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: GaussianStateDoc =
            serde_path_to_error::deserialize(de).map_err(|e| Error::Json(format!("{} at {}", e.inner(), e.path())))?;
        GaussianState::try_from(doc)
    }
}

/// JSON interchange form: `{"num_modes": n, "mean": [...], "cov": [[...], ...]}`, cov row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaussianStateDoc {
    pub num_modes: usize,
    pub mean: Vec<f64>,
    pub cov: Vec<Vec<f64>>,
}

impl From<&GaussianState> for GaussianStateDoc {
    fn from(s: &GaussianState) -> Self {
        GaussianStateDoc {
            num_modes: s.num_modes,
            mean: s.mean.iter().copied().collect(),
            cov: s.cov.row_iter().map(|r| r.iter().copied().collect()).collect(),
        }
    }
}

impl TryFrom<GaussianStateDoc> for GaussianState {
    type Error = Error;

    fn try_from(doc: GaussianStateDoc) -> Result<Self> {
        let d = 2 * doc.num_modes;
        if doc.mean.len() != d {
            return Err(Error::Json(format!("mean has length {}, expected {d}", doc.mean.len())));
        }
        if doc.cov.len() != d {
            return Err(Error::Json(format!("cov has {} rows, expected {d}", doc.cov.len())));
        }
        if let Some((i, row)) = doc.cov.iter().enumerate().find(|(_, r)| r.len() != d) {
            return Err(Error::Json(format!("cov[{i}] has length {}, expected {d}", row.len())));
        }
        let cov = DMatrix::from_fn(d, d, |r, c| doc.cov[r][c]);
        GaussianState::new(DVector::from_vec(doc.mean), cov)
    }
}

impl Serialize for GaussianState {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        GaussianStateDoc::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GaussianState {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = GaussianStateDoc::deserialize(deserializer)?;
        GaussianState::try_from(doc).map_err(serde::de::Error::custom)
    }
}

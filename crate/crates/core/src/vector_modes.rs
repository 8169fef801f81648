//! Classical vector beams as polarization ⊗ spatial coefficient matrices.
//!
//! A first-order vector beam is `u(x, y) = Σ c_ps ê_p v_s(x, y)` with rows of
//! `c` indexing polarization (`x̂, ŷ` or `ê₊, ê₋`) and columns indexing
//! spatial modes (`ψ₁₀, ψ₀₁` or `φ₊, φ₋`). Reading `c` as a bipartite
//! amplitude matrix, its squared singular values are Schmidt weights and
//! `K = 1/Σλ²` counts how many polarization/spatial products the beam needs.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;

use nalgebra::{DMatrix, Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numeric::check_unitary;
use crate::{Error, Result};

const NORM_TOL: f64 = 1e-9;

/// Default beam waist, arbitrary length units.
pub const DEFAULT_WAIST: f64 = 1.0;
/// Default rendering grid.
pub const DEFAULT_GRID: usize = 256;
/// Default rendering half-width, in waists.
pub const DEFAULT_EXTENT_WAISTS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CylindricalKind {
    Radial,
    Azimuthal,
}

impl CylindricalKind {
    /// The two (polarization, spatial) products the beam occupies, as
    /// coefficient-matrix indices, x-polarized component first.
    pub fn occupied_entries(self) -> [(usize, usize); 2] {
        match self {
            CylindricalKind::Radial => [(0, 0), (1, 1)],
            CylindricalKind::Azimuthal => [(0, 1), (1, 0)],
        }
    }

    /// Names of the occupied Hermite-Gauss modes, e.g. `x01` for the
    /// x-polarized ψ₀₁ mode.
    pub fn mode_labels(self) -> [&'static str; 2] {
        match self {
            CylindricalKind::Radial => ["x10", "y01"],
            CylindricalKind::Azimuthal => ["x01", "y10"],
        }
    }

    /// Real weights of the composite mode operator on its two constituents.
    pub fn composite_weights(self) -> [f64; 2] {
        let c = standard_mode(self);
        let [e0, e1] = self.occupied_entries();
        [c.coeffs[e0].re, c.coeffs[e1].re]
    }
}

impl fmt::Display for CylindricalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CylindricalKind::Radial => "radial",
            CylindricalKind::Azimuthal => "azimuthal",
        })
    }
}

impl std::str::FromStr for CylindricalKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "radial" => Ok(CylindricalKind::Radial),
            "azimuthal" => Ok(CylindricalKind::Azimuthal),
            other => Err(Error::invalid(format!("unknown mode kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolBasis {
    /// Rows `(x̂, ŷ)`.
    #[serde(rename = "linear_xy")]
    LinearXy,
    /// Rows `(ê₊, ê₋)`, `ê± = (x̂ ± iŷ)/√2`.
    #[serde(rename = "circular")]
    Circular,
    #[serde(rename = "custom")]
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaBasis {
    /// Columns `(ψ₁₀, ψ₀₁)`.
    #[serde(rename = "HG_10_01")]
    Hg1001,
    /// Columns `(φ₊, φ₋)`, `φ± = (ψ₁₀ ± iψ₀₁)/√2`.
    #[serde(rename = "OAM_pm")]
    OamPm,
    #[serde(rename = "custom")]
    Custom,
}

/// Unitary whose rows express `(ê₊, ê₋)` in `(x̂, ŷ)`.
pub fn circular_basis() -> Matrix2<Complex64> {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let ih = Complex64::new(0.0, FRAC_1_SQRT_2);
    Matrix2::new(h, ih, h, -ih)
}

/// Unitary whose rows express `(φ₊, φ₋)` in `(ψ₁₀, ψ₀₁)`.
pub fn oam_basis() -> Matrix2<Complex64> {
    circular_basis()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorModeCoefficients {
    pub pol_basis: PolBasis,
    pub spa_basis: SpaBasis,
    coeffs: Matrix2<Complex64>,
}

impl VectorModeCoefficients {
    /// Wraps an already normalized matrix.
    pub fn new(pol_basis: PolBasis, spa_basis: SpaBasis, coeffs: Matrix2<Complex64>) -> Result<Self> {
        let norm = coeffs.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid(format!(
                "coefficient matrix has Frobenius norm {norm}, expected 1"
            )));
        }
        Ok(VectorModeCoefficients {
            pol_basis,
            spa_basis,
            coeffs: coeffs / Complex64::new(norm, 0.0),
        })
    }

    /// Normalizes `coeffs` to unit Frobenius norm.
    pub fn normalized(pol_basis: PolBasis, spa_basis: SpaBasis, coeffs: Matrix2<Complex64>) -> Result<Self> {
        let norm = coeffs.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::invalid("coefficient matrix is zero"));
        }
        Ok(VectorModeCoefficients {
            pol_basis,
            spa_basis,
            coeffs: coeffs / Complex64::new(norm, 0.0),
        })
    }

    /// Single product `ê_pol · v_spa` in the linear/HG basis.
    pub fn product(pol: usize, spa: usize) -> Result<Self> {
        if pol > 1 || spa > 1 {
            return Err(Error::invalid("product mode indices must be 0 or 1"));
        }
        let mut c = Matrix2::zeros();
        c[(pol, spa)] = Complex64::new(1.0, 0.0);
        Self::new(PolBasis::LinearXy, SpaBasis::Hg1001, c)
    }

    pub fn coeffs(&self) -> &Matrix2<Complex64> {
        &self.coeffs
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CoefficientsDoc::from(self)).expect("coefficients serialize")
    }

    /// Parses the JSON form; errors name the offending field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: CoefficientsDoc =
            serde_path_to_error::deserialize(de).map_err(|e| Error::Json(format!("{}: {}", e.path(), e.inner())))?;
        Self::try_from(doc)
    }
}

/// `{"pol_basis": …, "spa_basis": …, "coeffs": [[re, im], …]}`, coefficients row-major.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientsDoc {
    pub pol_basis: PolBasis,
    pub spa_basis: SpaBasis,
    pub coeffs: Vec<[f64; 2]>,
}

impl From<&VectorModeCoefficients> for CoefficientsDoc {
    fn from(c: &VectorModeCoefficients) -> Self {
        let mut coeffs = Vec::with_capacity(4);
        for p in 0..2 {
            for s in 0..2 {
                let z = c.coeffs[(p, s)];
                coeffs.push([z.re, z.im]);
            }
        }
        CoefficientsDoc {
            pol_basis: c.pol_basis,
            spa_basis: c.spa_basis,
            coeffs,
        }
    }
}

impl TryFrom<CoefficientsDoc> for VectorModeCoefficients {
    type Error = Error;

    fn try_from(doc: CoefficientsDoc) -> Result<Self> {
        if doc.coeffs.len() != 4 {
            return Err(Error::Json(format!(
                "coeffs: expected 4 [re, im] entries (2x2 row-major), got {}",
                doc.coeffs.len()
            )));
        }
        let m = Matrix2::from_fn(|p, s| {
            let [re, im] = doc.coeffs[2 * p + s];
            Complex64::new(re, im)
        });
        VectorModeCoefficients::new(doc.pol_basis, doc.spa_basis, m).map_err(|e| Error::Json(format!("coeffs: {e}")))
    }
}

/// Radial `(x̂ψ₁₀ + ŷψ₀₁)/√2` or azimuthal `(−x̂ψ₀₁ + ŷψ₁₀)/√2`, linear/HG basis.
pub fn standard_mode(kind: CylindricalKind) -> VectorModeCoefficients {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    let coeffs = match kind {
        CylindricalKind::Radial => Matrix2::new(h, z, z, h),
        CylindricalKind::Azimuthal => Matrix2::new(z, -h, h, z),
    };
    VectorModeCoefficients {
        pol_basis: PolBasis::LinearXy,
        spa_basis: SpaBasis::Hg1001,
        coeffs,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SchmidtDecomposition {
    /// Squared singular values, non-increasing, summing to one.
    pub lambdas: Vec<f64>,
    /// `1/Σλ²`.
    pub schmidt_rank: f64,
}

pub fn schmidt_decompose(c: &VectorModeCoefficients) -> Result<SchmidtDecomposition> {
    schmidt_of_matrix(c.coeffs())
}

/// Schmidt weights of any nonzero 2×2 amplitude matrix (normalized internally).
pub fn schmidt_of_matrix(m: &Matrix2<Complex64>) -> Result<SchmidtDecomposition> {
    let total = m.norm_squared();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::invalid("cannot decompose a zero coefficient matrix"));
    }
    let sv = m.svd(false, false).singular_values;
    let mut lambdas: Vec<f64> = sv.iter().map(|s| s * s / total).collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let purity: f64 = lambdas.iter().map(|l| l * l).sum();
    Ok(SchmidtDecomposition {
        schmidt_rank: 1.0 / purity,
        lambdas,
    })
}

/// Re-expresses the field in new bases.
///
/// Rows of `u_pol` give the new polarization vectors in terms of the current
/// ones, rows of `w_spa` the new spatial functions. The coefficients become
/// `conj(U)·c·W†`.
pub fn transform_bases(
    c: &VectorModeCoefficients,
    u_pol: &Matrix2<Complex64>,
    w_spa: &Matrix2<Complex64>,
) -> Result<VectorModeCoefficients> {
    check_unitary(&to_dyn(u_pol), 1e-10, "polarization basis change")?;
    check_unitary(&to_dyn(w_spa), 1e-10, "spatial basis change")?;
    let coeffs = u_pol.conjugate() * c.coeffs * w_spa.adjoint();
    Ok(VectorModeCoefficients {
        pol_basis: PolBasis::Custom,
        spa_basis: SpaBasis::Custom,
        coeffs,
    })
}

/// Linear/HG coefficients re-expressed in the circular/OAM pair `(ê±, φ±)`.
pub fn to_circular_oam(c: &VectorModeCoefficients) -> Result<VectorModeCoefficients> {
    if c.pol_basis != PolBasis::LinearXy || c.spa_basis != SpaBasis::Hg1001 {
        return Err(Error::invalid(
            "to_circular_oam expects linear_xy / HG_10_01 coefficients",
        ));
    }
    let mut out = transform_bases(c, &circular_basis(), &oam_basis())?;
    out.pol_basis = PolBasis::Circular;
    out.spa_basis = SpaBasis::OamPm;
    Ok(out)
}

/// Inverse of [`to_circular_oam`].
pub fn to_linear_hg(c: &VectorModeCoefficients) -> Result<VectorModeCoefficients> {
    if c.pol_basis != PolBasis::Circular || c.spa_basis != SpaBasis::OamPm {
        return Err(Error::invalid("to_linear_hg expects circular / OAM_pm coefficients"));
    }
    let mut out = transform_bases(c, &circular_basis().adjoint(), &oam_basis().adjoint())?;
    out.pol_basis = PolBasis::LinearXy;
    out.spa_basis = SpaBasis::Hg1001;
    Ok(out)
}

pub fn is_structurally_separable(c: &VectorModeCoefficients, tol: f64) -> Result<bool> {
    Ok(schmidt_decompose(c)?.schmidt_rank <= 1.0 + tol)
}

/// A first-order Hermite-Gauss mode `ψ_nm` at the waist plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermiteGaussMode {
    pub n: u8,
    pub m: u8,
    pub waist: f64,
}

impl HermiteGaussMode {
    pub fn new(n: u8, m: u8, waist: f64) -> Result<Self> {
        if n > 1 || m > 1 {
            return Err(Error::invalid("only orders n, m in {0, 1} are supported"));
        }
        if !(waist > 0.0) {
            return Err(Error::invalid(format!("waist must be positive, got {waist}")));
        }
        Ok(HermiteGaussMode { n, m, waist })
    }

    /// `ψ_nm(x, y) = u_n(x)·u_m(y)` with `u₀ = (2/πw²)^¼ e^{−x²/w²}` and `u₁ = u₀·2x/w`.
    pub fn value(&self, x: f64, y: f64) -> f64 {
        hg_1d(self.n, x, self.waist) * hg_1d(self.m, y, self.waist)
    }
}

fn hg_1d(order: u8, x: f64, w: f64) -> f64 {
    let u0 = (2.0 / (PI * w * w)).powf(0.25) * (-(x * x) / (w * w)).exp();
    if order == 0 {
        u0
    } else {
        u0 * 2.0 * x / w
    }
}

/// Transverse field `(E_x, E_y)` at `(x, y)`.
pub fn evaluate_field(c: &VectorModeCoefficients, x: f64, y: f64, waist: f64) -> Result<[Complex64; 2]> {
    if c.spa_basis != SpaBasis::Hg1001 {
        return Err(Error::invalid("field evaluation needs HG_10_01 spatial coefficients"));
    }
    let pol_vectors = match c.pol_basis {
        PolBasis::LinearXy => Matrix2::identity(),
        PolBasis::Circular => circular_basis(),
        PolBasis::Custom => return Err(Error::invalid("field evaluation needs a named polarization basis")),
    };
    let psi10 = HermiteGaussMode::new(1, 0, waist)?.value(x, y);
    let psi01 = HermiteGaussMode::new(0, 1, waist)?.value(x, y);
    let spatial = Vector2::new(Complex64::new(psi10, 0.0), Complex64::new(psi01, 0.0));
    // amplitude on each polarization row, then expand rows into (x̂, ŷ)
    let per_row = c.coeffs * spatial;
    let e = pol_vectors.transpose() * per_row;
    Ok([e[0], e[1]])
}

/// Intensity `|E_x|² + |E_y|²` on a square grid, max-normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct IntensityImage {
    pub size: usize,
    /// Row-major, row 0 at `y = +extent`.
    pub pixels: Vec<f64>,
    pub extent: f64,
}

impl IntensityImage {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.size + col]
    }

    /// Coordinate of pixel index `i` along either axis.
    pub fn coordinate(&self, i: usize) -> f64 {
        grid_coordinate(i, self.size, self.extent)
    }

    /// Binary 8-bit PGM (P5).
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.size, self.size).into_bytes();
        out.extend(self.pixels.iter().map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8));
        out
    }
}

fn grid_coordinate(i: usize, n: usize, extent: f64) -> f64 {
    // exact antisymmetry about the centre keeps 90° rotations bit-exact
    extent * (2.0 * i as f64 - (n - 1) as f64) / (n - 1) as f64
}

pub fn render_intensity(
    c: &VectorModeCoefficients,
    grid_size: usize,
    extent: f64,
    waist: f64,
) -> Result<IntensityImage> {
    if grid_size < 16 {
        return Err(Error::invalid(format!(
            "grid size must be at least 16, got {grid_size}"
        )));
    }
    if !(extent > 0.0) {
        return Err(Error::invalid(format!("extent must be positive, got {extent}")));
    }
    let mut pixels = Vec::with_capacity(grid_size * grid_size);
    for row in 0..grid_size {
        let y = -grid_coordinate(row, grid_size, extent);
        for col in 0..grid_size {
            let x = grid_coordinate(col, grid_size, extent);
            let [ex, ey] = evaluate_field(c, x, y, waist)?;
            pixels.push(ex.norm_sqr() + ey.norm_sqr());
        }
    }
    let max = pixels.iter().cloned().fold(0.0, f64::max);
    if max > 0.0 {
        pixels.iter_mut().for_each(|p| *p /= max);
    }
    Ok(IntensityImage {
        size: grid_size,
        pixels,
        extent,
    })
}

fn to_dyn(m: &Matrix2<Complex64>) -> DMatrix<Complex64> {
    DMatrix::from_fn(2, 2, |i, j| m[(i, j)])
}

#![allow(dead_code)]

use std::f64::consts::PI;

use hybrid_cv::observables::fock::{Recipe, RecipeOp};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn polar(rng: &mut ChaCha8Rng, max: f64) -> Complex64 {
    Complex64::from_polar(rng.random_range(0.0..max), rng.random_range(0.0..2.0 * PI))
}

/// Haar-style 2×2 unitary from Euler angles and a global phase.
pub fn unitary2(theta: f64, psi: f64, chi: f64, phi: f64) -> DMatrix<Complex64> {
    let g = Complex64::from_polar(1.0, phi);
    let (s, co) = theta.sin_cos();
    DMatrix::from_row_slice(
        2,
        2,
        &[
            g * Complex64::from_polar(co, psi),
            g * Complex64::from_polar(s, chi),
            -g * Complex64::from_polar(s, -chi),
            g * Complex64::from_polar(co, -psi),
        ],
    )
}

pub fn random_unitary2(rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    unitary2(
        rng.random_range(0.0..PI / 2.0),
        rng.random_range(0.0..2.0 * PI),
        rng.random_range(0.0..2.0 * PI),
        rng.random_range(0.0..2.0 * PI),
    )
}

pub fn rows(u: &DMatrix<Complex64>) -> Vec<Vec<Complex64>> {
    (0..u.nrows())
        .map(|i| (0..u.ncols()).map(|j| u[(i, j)]).collect())
        .collect()
}

/// Two-mode recipe inside the oracle's limits, kept modest so truncation
/// converges quickly.
pub fn random_two_mode_recipe(rng: &mut ChaCha8Rng) -> Recipe {
    let mut ops = Vec::new();
    let n_ops = rng.random_range(2..=4);
    for _ in 0..n_ops {
        let op = match rng.random_range(0..4) {
            0 => RecipeOp::Squeeze {
                mode: rng.random_range(0..2),
                zeta: polar(rng, 0.35),
            },
            1 => RecipeOp::TwoModeSqueeze {
                mode_i: 0,
                mode_j: 1,
                zeta: polar(rng, 0.3),
            },
            2 => RecipeOp::ModeUnitary {
                u: rows(&random_unitary2(rng)),
            },
            _ => RecipeOp::Displace {
                mode: rng.random_range(0..2),
                alpha: polar(rng, 1.2),
            },
        };
        ops.push(op);
    }
    // always end bright enough for Stokes means to matter
    ops.push(RecipeOp::Displace {
        mode: 0,
        alpha: polar(rng, 1.0),
    });
    Recipe::new(2, ops)
}

use hybrid_cv::{GaussianState, SymplecticTransform};

/// `u` acting on modes `(i, j)` of an `n`-mode system.
pub fn embed_pair(u: &DMatrix<Complex64>, n: usize, i: usize, j: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::identity(n, n);
    let idx = [i, j];
    for a in 0..2 {
        for b in 0..2 {
            out[(idx[a], idx[b])] = u[(a, b)];
        }
    }
    out
}

/// Random sequence of operations on the `n`-mode vacuum. Returns the final
/// state, the symplectic maps used, and whether any loss was applied.
pub fn random_sequence(
    rng: &mut ChaCha8Rng,
    n: usize,
    n_ops: usize,
    allow_loss: bool,
) -> (GaussianState, Vec<SymplecticTransform>, bool) {
    let mut state = GaussianState::vacuum(n).unwrap();
    let mut maps = Vec::new();
    let mut lossy = false;
    for _ in 0..n_ops {
        let choice = rng.random_range(0..if allow_loss { 5 } else { 4 });
        let mode = rng.random_range(0..n);
        let t = match choice {
            0 => SymplecticTransform::displacement(n, mode, polar(rng, 3.0)).unwrap(),
            1 => SymplecticTransform::single_mode_squeezer(n, mode, polar(rng, 0.5)).unwrap(),
            2 if n > 1 => {
                let other = (mode + rng.random_range(1..n)) % n;
                SymplecticTransform::two_mode_squeezer(n, mode, other, polar(rng, 0.5)).unwrap()
            }
            3 if n > 1 => {
                let other = (mode + rng.random_range(1..n)) % n;
                SymplecticTransform::passive(&embed_pair(&random_unitary2(rng), n, mode, other)).unwrap()
            }
            4 => {
                state = state.attenuate(mode, rng.random_range(0.0..=1.0)).unwrap();
                lossy = true;
                continue;
            }
            _ => SymplecticTransform::single_mode_squeezer(n, mode, polar(rng, 0.5)).unwrap(),
        };
        state = state.apply(&t).unwrap();
        maps.push(t);
    }
    (state, maps, lossy)
}

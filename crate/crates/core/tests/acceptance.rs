//! Acceptance criteria 1–8. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

mod common;

use std::time::{Duration, Instant};

use common::*;
use hybrid_cv::cli::{fit_detection, FitParam, DEFAULT_DETECT_ALPHA};
use hybrid_cv::entanglement::{
    closed_form_criterion, duan_criterion, scan, scan_state, LoModel, MeasurementCombination,
};
use hybrid_cv::observables::fock::{fock_oracle_stats, MIN_N_MAX};
use hybrid_cv::observables::{
    linearized_stokes, quadratic_stats, stokes_observable, DetectionScheme, Dof, QuadraticObservable,
};
use hybrid_cv::states::verify_factorization;
use hybrid_cv::vector_modes::{schmidt_decompose, standard_mode, to_circular_oam, CylindricalKind};
use hybrid_cv::GaussianState;
use num_complex::Complex64;

// Tolerances, pinned.
const C1_FACTORIZATION_TOL: f64 = 1e-10;
const C1_RUNTIME: Duration = Duration::from_secs(1);
const C2_REL_TOL: f64 = 1e-6;
const C2_BOUNDARY_TOL: f64 = 1e-9;
const C2_RUNTIME: Duration = Duration::from_secs(5);
const C2_LO_AMPLITUDE: f64 = 1e4;
const C3_S: f64 = 0.5;
const C3_EQUAL_TOL: f64 = 1e-9;
const C4_TOL: f64 = 1e-12;
const C5_MIN_RECIPES: usize = 12;
const C5_ABS_TOL: f64 = 1e-8;
const C5_RUNTIME: Duration = Duration::from_secs(60);
const C6_SEQUENCES: usize = 1000;
const C6_PHYSICAL_TOL: f64 = 1e-9;
const C6_DET_TOL: f64 = 1e-9;
const C6_SYMPLECTIC_TOL: f64 = 1e-10;
const C7_DIRECT_DB: f64 = -0.60;
const C7_SUM_DB: f64 = -0.50;
const C7_DB_TOL: f64 = 0.01;
const C8_AMPLITUDES: [f64; 4] = [1e2, 4e2, 1.6e3, 6.4e3];
const C8_FINAL_REL_TOL: f64 = 1e-4;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let alphas = [c(0.0, 0.0), c(1.0, 0.0), c(3.0, 0.0), c(1.0, 2.0)];
    let zetas = [
        c(0.0, 0.0),
        c(0.3, 0.0),
        c(0.8, 0.0),
        Complex64::from_polar(0.5, std::f64::consts::FRAC_PI_3),
    ];
    let mut worst = 0.0f64;
    for kind in [CylindricalKind::Radial, CylindricalKind::Azimuthal] {
        for &a in &alphas {
            for &z in &zetas {
                worst = worst.max(verify_factorization(kind, a, z).map_err(|e| e.to_string())?);
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(worst < C1_FACTORIZATION_TOL, || format!("max deviation {worst:.3e}"))?;
    ensure(elapsed < C1_RUNTIME, || format!("runtime {elapsed:?}"))?;
    Ok(format!("max deviation {worst:.2e} over 32 grid points, {elapsed:.2?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let kind = CylindricalKind::Azimuthal;
    let s: Vec<f64> = (0..21).map(|i| 2.0 * i as f64 / 20.0).collect();
    let hybrid = MeasurementCombination::new(2, 3, Dof::Spa, Dof::Pol).map_err(|e| e.to_string())?;
    let rows = scan(kind, &s, &[hybrid], &LoModel::linearized(kind, C2_LO_AMPLITUDE)).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for r in &rows {
        let s = r.s.unwrap();
        let closed = closed_form_criterion(s).map_err(|e| e.to_string())?;
        worst = worst.max((r.lhs - closed).abs() / closed);
        if s == 0.0 {
            ensure((r.lhs - 1.0).abs() < C2_BOUNDARY_TOL, || format!("s = 0 lhs {}", r.lhs))?;
        } else {
            ensure(r.entangled, || format!("s = {s} not entangled (lhs {})", r.lhs))?;
        }
    }
    let elapsed = start.elapsed();
    ensure(worst < C2_REL_TOL, || format!("max relative gap {worst:.3e}"))?;
    ensure(elapsed < C2_RUNTIME, || format!("runtime {elapsed:?}"))?;
    Ok(format!("max relative gap {worst:.2e} over 21 points, {elapsed:.2?}"))
}

fn criterion_3() -> Outcome {
    let kind = CylindricalKind::Azimuthal;
    let combs = MeasurementCombination::three_sets(2, 3).map_err(|e| e.to_string())?;
    let rows = scan(kind, &[C3_S], &combs, &LoModel::linearized(kind, C2_LO_AMPLITUDE)).map_err(|e| e.to_string())?;
    for r in &rows {
        ensure(r.entangled, || format!("{} not entangled", r.combination.dof_label()))?;
    }
    let spread = rows.iter().map(|r| r.lhs).fold(f64::NEG_INFINITY, f64::max)
        - rows.iter().map(|r| r.lhs).fold(f64::INFINITY, f64::min);
    ensure(spread < C3_EQUAL_TOL, || format!("lhs spread {spread:.3e}"))?;
    Ok(format!(
        "pol/pol, spa/spa, spa/pol all entangled at lhs {:.9}, spread {spread:.1e}",
        rows[0].lhs
    ))
}

fn criterion_4() -> Outcome {
    for kind in [CylindricalKind::Radial, CylindricalKind::Azimuthal] {
        let d = schmidt_decompose(&standard_mode(kind)).map_err(|e| e.to_string())?;
        ensure(d.lambdas.iter().all(|l| (l - 0.5).abs() < C4_TOL), || {
            format!("{kind} lambdas {:?}", d.lambdas)
        })?;
        ensure((d.schmidt_rank - 2.0).abs() < C4_TOL, || {
            format!("{kind} K = {}", d.schmidt_rank)
        })?;
        let circ = to_circular_oam(&standard_mode(kind)).map_err(|e| e.to_string())?;
        let dc = schmidt_decompose(&circ).map_err(|e| e.to_string())?;
        for k in 0..2 {
            ensure((dc.lambdas[k] - d.lambdas[k]).abs() < C4_TOL, || {
                format!("{kind} weights changed")
            })?;
        }
    }
    // radial: (ê₊φ₋ + ê₋φ₊)/√2 up to a global phase
    let m = *to_circular_oam(&standard_mode(CylindricalKind::Radial))
        .map_err(|e| e.to_string())?
        .coeffs();
    let phase = m[(0, 1)] / m[(0, 1)].norm();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let dev = [
        m[(0, 0)].norm(),
        m[(1, 1)].norm(),
        (m[(0, 1)] / phase - h).norm(),
        (m[(1, 0)] / phase - h).norm(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    ensure(dev < C4_TOL, || format!("circular/OAM pattern deviates by {dev:.3e}"))?;
    Ok(format!(
        "lambda = (1/2, 1/2), K = 2.000000 for both kinds; circular/OAM pattern deviation {dev:.1e}"
    ))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let mut r = rng(0xacce97);
    let mut worst = 0.0f64;
    let mut checks = 0;
    let mut max_n = 0;
    for _ in 0..C5_MIN_RECIPES {
        let recipe = random_two_mode_recipe(&mut r);
        let state = recipe.gaussian().map_err(|e| e.to_string())?;
        let mut obs = Vec::new();
        for m in 0..2 {
            obs.push(QuadraticObservable::x(2, m).unwrap());
            obs.push(QuadraticObservable::p(2, m).unwrap());
            obs.push(QuadraticObservable::number(2, m).unwrap());
        }
        for mu in 0..4 {
            obs.push(stokes_observable(Dof::Pol, mu, (0, 1), 2).unwrap());
        }
        for o in &obs {
            let g = quadratic_stats(&state, o).map_err(|e| e.to_string())?;
            let f = fock_oracle_stats(&recipe, o, MIN_N_MAX).map_err(|e| e.to_string())?;
            ensure(f.relative_change < 1e-8, || "oracle did not report convergence".into())?;
            max_n = max_n.max(f.n_max);
            worst = worst.max((g.mean - f.mean).abs()).max((g.variance - f.variance).abs());
            checks += 2;
        }
    }
    let elapsed = start.elapsed();
    ensure(worst < C5_ABS_TOL, || format!("max absolute difference {worst:.3e}"))?;
    ensure(elapsed < C5_RUNTIME, || format!("runtime {elapsed:?}"))?;
    Ok(format!(
        "{C5_MIN_RECIPES} recipes, {checks} moments, max |diff| {worst:.2e}, converged by n_max {max_n}, {elapsed:.2?}"
    ))
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    let mut worst_eig = f64::INFINITY;
    let mut worst_det = 0.0f64;
    let mut worst_sym = 0.0f64;
    let mut lossless = 0;
    for i in 0..C6_SEQUENCES {
        let n = 1 + i % 3;
        let (state, maps, lossy) = random_sequence(&mut r, n, 1 + i % 8, i % 2 == 0);
        worst_eig = worst_eig.min(state.min_uncertainty_eigenvalue());
        ensure(state.is_physical(C6_PHYSICAL_TOL), || {
            format!("sequence {i} unphysical")
        })?;
        for t in &maps {
            worst_sym = worst_sym.max(t.symplectic_deviation());
        }
        if !lossy {
            lossless += 1;
            worst_det = worst_det.max((state.cov_determinant() - 1.0).abs());
        }
    }
    ensure(worst_det < C6_DET_TOL, || format!("det(cov) off by {worst_det:.3e}"))?;
    ensure(worst_sym < C6_SYMPLECTIC_TOL, || {
        format!("symplectic deviation {worst_sym:.3e}")
    })?;
    Ok(format!(
        "{C6_SEQUENCES} sequences physical (min eigenvalue {worst_eig:.3e}), {lossless} lossless with |det - 1| <= {worst_det:.1e}, SᵀΩS deviation <= {worst_sym:.1e}"
    ))
}

fn criterion_7() -> Outcome {
    let kind = CylindricalKind::Azimuthal;
    let (direct, _) = fit_detection(
        kind,
        DetectionScheme::Direct,
        DEFAULT_DETECT_ALPHA,
        FitParam::S,
        1.0,
        C7_DIRECT_DB,
    )
    .map_err(|e| e.to_string())?;
    let s = direct.value;
    let (sum, _) = fit_detection(
        kind,
        DetectionScheme::Sum,
        DEFAULT_DETECT_ALPHA,
        FitParam::Eta,
        s,
        C7_SUM_DB,
    )
    .map_err(|e| e.to_string())?;
    let eta = sum.value;
    ensure((direct.achieved_db - C7_DIRECT_DB).abs() <= C7_DB_TOL, || {
        format!("direct reads {}", direct.achieved_db)
    })?;
    ensure((sum.achieved_db - C7_SUM_DB).abs() <= C7_DB_TOL, || {
        format!("sum reads {}", sum.achieved_db)
    })?;

    let hybrid = MeasurementCombination::new(2, 3, Dof::Spa, Dof::Pol).map_err(|e| e.to_string())?;
    let model = LoModel::linearized(kind, C2_LO_AMPLITUDE);
    let lossless =
        duan_criterion(&scan_state(kind, s).map_err(|e| e.to_string())?, &hybrid, &model).map_err(|e| e.to_string())?;
    let closed = closed_form_criterion(s).map_err(|e| e.to_string())?;
    ensure(
        lossless.entangled && (lossless.lhs - closed).abs() / closed < C2_REL_TOL,
        || format!("fitted s = {s} gives lhs {}", lossless.lhs),
    )?;
    let lossy_state = scan_state(kind, s)
        .and_then(|st| st.attenuate(0, eta))
        .and_then(|st| st.attenuate(1, eta))
        .map_err(|e| e.to_string())?;
    let lossy = duan_criterion(&lossy_state, &hybrid, &model).map_err(|e| e.to_string())?;
    ensure(lossy.entangled, || format!("lossy fitted state lhs {}", lossy.lhs))?;
    Ok(format!(
        "s = {s:.6} (direct {:.4} dB, ratio {:.5}), eta = {eta:.6} (sum {:.4} dB, ratio {:.5}); lhs {:.6} lossless, {:.6} with loss",
        direct.achieved_db, direct.variance_ratio, sum.achieved_db, sum.variance_ratio, lossless.lhs, lossy.lhs
    ))
}

/// Largest relative gap between exact and linearized `Ŝ₂`, `Ŝ₃` variances
/// over both arms of the bright squeezed beam.
fn linearization_gap(state: &GaussianState, kind: CylindricalKind, beta: f64) -> Result<f64, String> {
    let LoModel::Exact { phases, .. } = LoModel::exact(kind, beta) else {
        unreachable!()
    };
    let aux = GaussianState::coherent(&[
        Complex64::from_polar(beta, phases[0]),
        Complex64::from_polar(beta, phases[1]),
    ])
    .map_err(|e| e.to_string())?;
    let full = state.tensor(&aux);
    let mut worst = 0.0f64;
    for (signal, aux_mode) in [(0usize, 2usize), (1, 3)] {
        for mu in [2u8, 3] {
            let exact = quadratic_stats(&full, &stokes_observable(Dof::Pol, mu, (signal, aux_mode), 4).unwrap())
                .map_err(|e| e.to_string())?
                .variance;
            let lin = quadratic_stats(
                state,
                &linearized_stokes(Dof::Pol, mu, beta, phases[signal], signal, 2).unwrap(),
            )
            .map_err(|e| e.to_string())?
            .variance;
            worst = worst.max((exact - lin).abs() / exact);
        }
    }
    Ok(worst)
}

fn fmt_gaps(gaps: &[f64]) -> String {
    gaps.iter().map(|g| format!("{g:.2e}")).collect::<Vec<_>>().join(", ")
}

fn criterion_8() -> Outcome {
    let kind = CylindricalKind::Azimuthal;
    let state = scan_state(kind, 0.5).map_err(|e| e.to_string())?;
    let gaps = C8_AMPLITUDES
        .iter()
        .map(|&b| linearization_gap(&state, kind, b))
        .collect::<Result<Vec<_>, _>>()?;
    for w in gaps.windows(2) {
        ensure(w[1] < w[0] && w[1] <= 0.5 * w[0], || {
            format!("gaps not shrinking: {}", fmt_gaps(&gaps))
        })?;
    }
    let last = *gaps.last().unwrap();
    ensure(last < C8_FINAL_REL_TOL, || format!("final gap {last:.3e}"))?;
    Ok(format!(
        "relative gaps {} at amplitudes {C8_AMPLITUDES:?}",
        fmt_gaps(&gaps)
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("factorization identity", criterion_1),
        ("closed-form criterion scan", criterion_2),
        ("three-way entanglement", criterion_3),
        ("Schmidt structure", criterion_4),
        ("number-basis oracle equivalence", criterion_5),
        ("physicality and symplectic closure", criterion_6),
        ("detection fit", criterion_7),
        ("linearization convergence", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} [{name}]: PASS - {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL - {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

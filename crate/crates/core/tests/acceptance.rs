//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the log.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use ctxlab::decoherence::{
    build_encoding, kraus_amplitude, kraus_phase, EncodingKind, NoiseModel, NoiseStudy,
};
use ctxlab::graph::{
    build_graph, enumerate_contexts, independence_number, ofnc_penalty_denominator,
};
use ctxlab::interferometer::{appendix_circuits, PhiBranch};
use ctxlab::linalg::{self, c, CMatrix};
use ctxlab::ofnc::{circuit_distance, delta_threshold, epsilon_bound_exact, ThresholdProblem};
use ctxlab::photonic::{
    beta_from_runs, compatibility_check, make_schedule, run_context, sample, DetectorModel,
    ShotOutcome,
};
use ctxlab::states::{beta_value, builtin_measurements};
use ctxlab::Execution;
use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

const BETA_TOL: f64 = 1e-12;
const BETA_TIME: Duration = Duration::from_millis(1);
const DELTA5_TARGET: f64 = 0.0164974;
const DELTA5_TOL: f64 = 1e-3;
const DELTA6_TARGET: f64 = 0.0049;
const DELTA6_TOL: f64 = 5e-4;
const DELTA_EXP_TARGET: f64 = 0.0116;
const DELTA_EXP_TOL: f64 = 1e-3;
const THRESHOLD_TIME: Duration = Duration::from_secs(1);
const MATRIX_TOL: f64 = 1e-12;
const CHANNEL_TOL: f64 = 1e-10;
const ENDPOINT_TOL: f64 = 1e-12;
const DAMPED_TOL: f64 = 1e-10;
const SWEEP_STEP: f64 = 1e-2;
const CONTINUITY_JUMP: f64 = 0.05;
const MONOTONE_SLACK: f64 = 1e-12;
const CROSSING_TOL: f64 = 1e-6;
const SIM_TOL: f64 = 1e-10;
const SHOTS: u64 = 1_000_000;
const SIGMAS: f64 = 5.0;
const SIM_TIME: Duration = Duration::from_secs(5);
const BETA_EXP: f64 = 2.078;
const EPS_EXP: f64 = 0.0156;

struct Outcome {
    pass: bool,
    summary: String,
    details: Vec<String>,
}

impl Outcome {
    fn new(pass: bool, summary: impl Into<String>) -> Self {
        Outcome {
            pass,
            summary: summary.into(),
            details: Vec::new(),
        }
    }
}

fn m(scale: f64, rows: &[&[f64]]) -> DMatrix<f64> {
    let n = rows.len();
    DMatrix::from_fn(n, rows[0].len(), |i, j| scale * rows[i][j])
}

fn max_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

fn r(x: f64) -> f64 {
    x.sqrt()
}

// ---------------------------------------------------------------- criterion 1

fn direct_beta(state: &[f64], vectors: &[Vec<f64>]) -> f64 {
    vectors
        .iter()
        .map(|v| {
            let ip: f64 = v.iter().zip(state).map(|(a, b)| a * b).sum();
            ip * ip
        })
        .sum()
}

fn criterion_1() -> Outcome {
    let s2 = r(2.0);
    let s3 = r(3.0);
    let s6 = r(6.0);
    let oracle5 = direct_beta(
        &[1.0 / s3, 1.0 / s3, 1.0 / s3],
        &[
            vec![1.0 / s3, -1.0 / s3, 1.0 / s3],
            vec![1.0 / s2, 1.0 / s2, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0 / s2, 1.0 / s2],
        ],
    );
    let oracle6 = direct_beta(
        &[s2 / s6, 1.0 / s6, 1.0 / s6, s2 / s6],
        &[
            vec![-s2 / s6, 1.0 / s6, 1.0 / s6, -s2 / s6],
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.5, 0.5, s2 / 2.0],
            vec![0.0, -1.0 / s2, 1.0 / s2, 0.0],
            vec![s2 / 2.0, 0.5, 0.5, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ],
    );
    let target = 2.0 + 1.0 / 9.0;
    let mut out = Outcome::new(true, "");
    let mut worst_time = Duration::ZERO;
    for (n, oracle) in [(5, oracle5), (6, oracle6)] {
        let ms = builtin_measurements(n).unwrap();
        let rho = ms.state_density();
        beta_value(&ms, &rho).unwrap();
        let t = Instant::now();
        let rep = beta_value(&ms, &rho).unwrap();
        let dt = t.elapsed();
        worst_time = worst_time.max(dt);
        let ok =
            (rep.beta_quantum - target).abs() <= BETA_TOL && (oracle - target).abs() <= BETA_TOL;
        out.pass &= ok;
        out.details.push(format!(
            "N={n}: beta={:.15} oracle={:.15} |diff|={:.1e} time={dt:?}",
            rep.beta_quantum,
            oracle,
            (rep.beta_quantum - target).abs()
        ));
    }
    out.pass &= worst_time < BETA_TIME;
    out.summary = format!("beta_Q = 2 + 1/9 for N=5,6 within {BETA_TOL:.0e}, slowest call {worst_time:?} (< {BETA_TIME:?})");
    out
}

// ---------------------------------------------------------------- criterion 2

fn criterion_2() -> Outcome {
    let mut out = Outcome::new(true, "");
    let mut got = Vec::new();
    for (n, want) in [(5, Ratio::new(1, 45)), (6, Ratio::new(1, 81))] {
        let ms = builtin_measurements(n).unwrap();
        let g = build_graph(n).unwrap();
        let beta_cl = independence_number(&g).unwrap() as i64;
        let denom = ofnc_penalty_denominator(&enumerate_contexts(&g));
        let eps = ms
            .exact_beta_quantum()
            .map(|b| epsilon_bound_exact(b, beta_cl, denom).unwrap());
        out.pass &= eps == Some(want);
        got.push(format!(
            "N={n}: {}",
            eps.map_or("irrational".into(), |e| e.to_string())
        ));
    }
    out.summary = format!("exact epsilon bounds ({})", got.join(", "));
    out
}

// ---------------------------------------------------------------- criterion 3

/// `max_i max_φ Δ_i(δ)` with an unnormalized first-acting block of
/// `U_1` for N=6 in place of the fixture circuit.
fn unnormalized_variant_distance(problem: &ThresholdProblem, delta: f64) -> f64 {
    let ms = &problem.measurements;
    let mut best: f64 = 0.0;
    for (k, circuit) in problem.circuits.iter().enumerate().skip(1) {
        for b in circuit.branches() {
            best = best.max(circuit_distance(ms.vector(k + 1), circuit, delta, b).unwrap());
        }
    }
    for phi1 in [0, 1] {
        for phi2 in [0, 1] {
            let right = m(
                1.0 / r(3.0),
                &[
                    &[r(3.0), 0.0, 0.0, 0.0],
                    &[0.0, r(3.0), 0.0, 0.0],
                    &[0.0, 0.0, -r(1.0 + 3.0 * delta), r(2.0 + 3.0 * delta)],
                    &[0.0, 0.0, r(2.0 + 3.0 * delta), r(1.0 + 3.0 * delta)],
                ],
            );
            let u = hexagon_u1_left(delta, phi2) * hexagon_u1_middle(delta, phi1) * right;
            let w: Vec<Complex64> = (0..4).map(|j| c(u[(0, j)])).collect();
            let diff = ms.projector(1) - linalg::outer(&w, &w);
            best = best.max(linalg::hermitian_spectral_norm(&diff));
        }
    }
    best
}

fn criterion_3() -> Outcome {
    let mut out = Outcome::new(true, "");
    let cases = [
        ("N=5, eps=1/45", 5, 1.0 / 45.0, DELTA5_TARGET, DELTA5_TOL),
        ("N=6, eps=1/81", 6, 1.0 / 81.0, DELTA6_TARGET, DELTA6_TOL),
        (
            "N=5, eps=0.078/5",
            5,
            0.078 / 5.0,
            DELTA_EXP_TARGET,
            DELTA_EXP_TOL,
        ),
    ];
    let mut parts = Vec::new();
    for (label, n, eps, target, tol) in cases {
        let t = Instant::now();
        let res = delta_threshold(n, eps);
        let dt = t.elapsed();
        match res {
            Ok(th) => {
                let ok = (th.delta_th - target).abs() <= tol && dt < THRESHOLD_TIME;
                out.pass &= ok;
                parts.push(format!("{label}: {:.7}", th.delta_th));
                out.details.push(format!(
                    "{} {label}: delta_th={:.7} target={target} ±{tol:.0e} binding U_{} phi={} time={dt:?}",
                    if ok { "ok  " } else { "MISS" },
                    th.delta_th,
                    th.binding_vertex,
                    th.binding_branch
                ));
            }
            Err(e) => {
                out.pass = false;
                out.details.push(format!("MISS {label}: {e}"));
            }
        }
    }
    // what the unnormalized sqrt(2+3d) entry of U_1 (N=6) would give
    let problem = ThresholdProblem::builtin(6).unwrap();
    let eps = 1.0 / 81.0;
    let (mut lo, mut hi) = (0.0, 0.05);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if unnormalized_variant_distance(&problem, mid) > eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    out.details.push(format!(
        "info N=6 with the unnormalized sqrt(2+3d) entry (not unitary): delta_th={:.7}",
        0.5 * (lo + hi)
    ));
    out.summary = format!("delta thresholds ({})", parts.join(", "));
    out
}

// ---------------------------------------------------------------- criterion 4

fn flag(phi: u8) -> f64 {
    if phi == 0 {
        1.0
    } else {
        -1.0
    }
}

fn bs2(delta: f64) -> [f64; 2] {
    [r(1.0 + 2.0 * delta), r(1.0 - 2.0 * delta)]
}

fn pentagon_noisy(v: usize, d: f64, phi: u8) -> DMatrix<f64> {
    let [p, q] = bs2(d);
    let sd = flag(phi) * d;
    match v {
        1 => {
            let a = m(
                1.0 / r(3.0),
                &[
                    &[r(1.0 + 3.0 * sd), r(2.0 - 3.0 * sd), 0.0],
                    &[r(2.0 - 3.0 * sd), -r(1.0 + 3.0 * sd), 0.0],
                    &[0.0, 0.0, r(3.0)],
                ],
            );
            let b = m(
                1.0 / r(2.0),
                &[&[r(2.0), 0.0, 0.0], &[0.0, -p, q], &[0.0, q, p]],
            );
            a * b
        }
        2 => m(
            1.0 / r(2.0),
            &[&[p, q, 0.0], &[q, -p, 0.0], &[0.0, 0.0, r(2.0)]],
        ),
        3 => m(1.0, &[&[0.0, 0.0, 1.0], &[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0]]),
        4 => DMatrix::identity(3, 3),
        5 => m(
            1.0 / r(2.0),
            &[&[0.0, p, q], &[0.0, q, -p], &[r(2.0), 0.0, 0.0]],
        ),
        _ => unreachable!(),
    }
}

fn hexagon_u1_left(d: f64, phi2: u8) -> DMatrix<f64> {
    let sd = flag(phi2) * d;
    let (a, b) = (r(1.0 + 3.0 * sd), r(2.0 - 3.0 * sd));
    m(
        1.0 / r(3.0),
        &[
            &[-a, -b, 0.0, 0.0],
            &[-b, a, 0.0, 0.0],
            &[0.0, 0.0, r(3.0), 0.0],
            &[0.0, 0.0, 0.0, r(3.0)],
        ],
    )
}

fn hexagon_u1_middle(d: f64, phi1: u8) -> DMatrix<f64> {
    let sd = flag(phi1) * d;
    let (a, b) = (r(1.0 + 4.0 * sd), r(3.0 - 4.0 * sd));
    m(
        0.5,
        &[
            &[2.0, 0.0, 0.0, 0.0],
            &[0.0, -a, b, 0.0],
            &[0.0, b, a, 0.0],
            &[0.0, 0.0, 0.0, 2.0],
        ],
    )
}

fn hexagon_noisy(v: usize, d: f64, phi: u8, phi2: u8) -> DMatrix<f64> {
    let [p, q] = bs2(d);
    let [ps, qs] = bs2(flag(phi) * d);
    let s2 = r(2.0);
    match v {
        1 => {
            let (a, b) = (r(1.0 + 3.0 * d), r(2.0 - 3.0 * d));
            let right = m(
                1.0 / r(3.0),
                &[
                    &[r(3.0), 0.0, 0.0, 0.0],
                    &[0.0, r(3.0), 0.0, 0.0],
                    &[0.0, 0.0, -a, b],
                    &[0.0, 0.0, b, a],
                ],
            );
            hexagon_u1_left(d, phi2) * hexagon_u1_middle(d, phi) * right
        }
        2 => DMatrix::identity(4, 4),
        3 => {
            let a = m(
                1.0 / s2,
                &[
                    &[p, q, 0.0, 0.0],
                    &[q, -p, 0.0, 0.0],
                    &[0.0, 0.0, s2, 0.0],
                    &[0.0, 0.0, 0.0, s2],
                ],
            );
            let b = m(
                1.0 / s2,
                &[
                    &[0.0, 0.0, 0.0, s2],
                    &[0.0, ps, qs, 0.0],
                    &[0.0, qs, -ps, 0.0],
                    &[s2, 0.0, 0.0, 0.0],
                ],
            );
            a * b
        }
        4 => m(
            1.0 / s2,
            &[
                &[0.0, -p, q, 0.0],
                &[0.0, q, p, 0.0],
                &[s2, 0.0, 0.0, 0.0],
                &[0.0, 0.0, 0.0, s2],
            ],
        ),
        5 => {
            let a = m(
                1.0 / s2,
                &[
                    &[ps, qs, 0.0, 0.0],
                    &[-qs, ps, 0.0, 0.0],
                    &[0.0, 0.0, s2, 0.0],
                    &[0.0, 0.0, 0.0, s2],
                ],
            );
            let b = m(
                1.0 / s2,
                &[
                    &[s2, 0.0, 0.0, 0.0],
                    &[0.0, p, q, 0.0],
                    &[0.0, q, -p, 0.0],
                    &[0.0, 0.0, 0.0, s2],
                ],
            );
            a * b
        }
        6 => m(
            1.0,
            &[
                &[0.0, 0.0, 0.0, 1.0],
                &[0.0, 1.0, 0.0, 0.0],
                &[0.0, 0.0, 1.0, 0.0],
                &[1.0, 0.0, 0.0, 0.0],
            ],
        ),
        _ => unreachable!(),
    }
}

fn reference_pentagon(v: usize) -> DMatrix<f64> {
    let (s2, s3) = (r(2.0), r(3.0));
    match v {
        1 => m(
            1.0 / r(6.0),
            &[&[s2, -s2, s2], &[2.0, 1.0, -1.0], &[0.0, s3, s3]],
        ),
        2 => m(
            1.0 / s2,
            &[&[1.0, 1.0, 0.0], &[1.0, -1.0, 0.0], &[0.0, 0.0, s2]],
        ),
        3 => m(1.0, &[&[0.0, 0.0, 1.0], &[0.0, 1.0, 0.0], &[1.0, 0.0, 0.0]]),
        4 => DMatrix::identity(3, 3),
        5 => m(
            1.0 / s2,
            &[&[0.0, 1.0, 1.0], &[0.0, 1.0, -1.0], &[s2, 0.0, 0.0]],
        ),
        _ => unreachable!(),
    }
}

fn reference_hexagon(v: usize) -> DMatrix<f64> {
    let (s2, s3, s6) = (r(2.0), r(3.0), r(6.0));
    match v {
        1 => m(
            1.0 / 6.0,
            &[
                &[-2.0 * s3, s6, s6, -2.0 * s3],
                &[-2.0 * s6, -s3, -s3, s6],
                &[0.0, 3.0 * s3, -s3, s6],
                &[0.0, 0.0, 2.0 * s6, 2.0 * s3],
            ],
        ),
        2 => DMatrix::identity(4, 4),
        3 => m(
            0.5,
            &[
                &[0.0, 1.0, 1.0, s2],
                &[0.0, -1.0, -1.0, s2],
                &[0.0, s2, -s2, 0.0],
                &[2.0, 0.0, 0.0, 0.0],
            ],
        ),
        4 => m(
            1.0 / s2,
            &[
                &[0.0, 1.0, 1.0, 0.0],
                &[0.0, 1.0, -1.0, 0.0],
                &[s2, 0.0, 0.0, 0.0],
                &[0.0, 0.0, 0.0, s2],
            ],
        ),
        5 => m(
            0.5,
            &[
                &[s2, 1.0, 1.0, 0.0],
                &[-s2, 1.0, 1.0, 0.0],
                &[0.0, s2, -s2, 0.0],
                &[0.0, 0.0, 0.0, 2.0],
            ],
        ),
        6 => m(
            1.0,
            &[
                &[0.0, 0.0, 0.0, 1.0],
                &[0.0, 1.0, 0.0, 0.0],
                &[0.0, 0.0, 1.0, 0.0],
                &[1.0, 0.0, 0.0, 0.0],
            ],
        ),
        _ => unreachable!(),
    }
}

/// Branch bits of a fixture, from the flags as they appear in the closed forms.
fn branch_for(n: usize, v: usize, phi: u8, phi2: u8) -> PhiBranch {
    let bits = match (n, v) {
        (5, 1) | (6, 5) => u32::from(phi) << 1,
        (6, 1) => (u32::from(phi) << 1) | (u32::from(phi2) << 2),
        (6, 3) => u32::from(phi),
        _ => 0,
    };
    PhiBranch(bits)
}

fn criterion_4() -> Outcome {
    let mut out = Outcome::new(true, "");
    let mut worst_ideal: f64 = 0.0;
    let mut worst_noisy: f64 = 0.0;
    // the reference row for U_4 (N=6) lists v_4 = (0,1,1,0)/√2, which is not
    // orthogonal to v_5; the fixture follows the noisy form, equal to the
    // reference up to S = diag(1,-1,1,1) on both sides
    let s = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -1.0, 1.0, 1.0]));
    for n in [5, 6] {
        let circuits = appendix_circuits(n).unwrap();
        for v in 1..=n {
            let u = circuits[v - 1].compose(0.0, None).unwrap();
            let reference = if n == 5 {
                reference_pentagon(v)
            } else if v == 4 {
                &s * reference_hexagon(v) * &s
            } else {
                reference_hexagon(v)
            };
            let e = max_diff(&u, &reference);
            worst_ideal = worst_ideal.max(e);
            if e > MATRIX_TOL {
                out.details
                    .push(format!("ideal N={n} U_{v}: max entry error {e:.2e}"));
            }
            for delta in [-0.2, -0.0165, -0.004, 0.0, 0.0049, 0.0116, 0.05, 0.2] {
                for phi in [0u8, 1] {
                    for phi2 in [0u8, 1] {
                        let closed = if n == 5 {
                            pentagon_noisy(v, delta, phi)
                        } else {
                            hexagon_noisy(v, delta, phi, phi2)
                        };
                        let got = circuits[v - 1]
                            .compose(delta, Some(branch_for(n, v, phi, phi2)))
                            .unwrap();
                        let e = max_diff(&got, &closed);
                        worst_noisy = worst_noisy.max(e);
                        if e > MATRIX_TOL {
                            out.details.push(format!(
                                "noisy N={n} U_{v} delta={delta} phi={phi}{phi2}: max entry error {e:.2e}"
                            ));
                        }
                    }
                }
            }
        }
    }
    out.pass = worst_ideal <= MATRIX_TOL && worst_noisy <= MATRIX_TOL;
    out.details
        .push("U_4 (N=6) reference compared as S U S with S = diag(1,-1,1,1)".into());
    out.summary = format!(
        "fixture matrices: ideal max error {worst_ideal:.1e}, noisy max error {worst_noisy:.1e} (tol {MATRIX_TOL:.0e})"
    );
    out
}

// ---------------------------------------------------------------- criterion 5

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    let raw: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng)))
        .collect();
    let n = linalg::norm(&raw);
    raw.iter().map(|z| z / n).collect()
}

fn random_mixed(rng: &mut ChaCha8Rng, dim: usize) -> CMatrix {
    let mut rho = CMatrix::zeros(dim, dim);
    let weights: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
    let total: f64 = weights.iter().sum();
    for w in weights {
        rho += linalg::projector(&random_state(rng, dim)) * c(w / total);
    }
    rho
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst_completeness: f64 = 0.0;
    let mut failures = 0;
    let mut checked = 0;
    for d in [2, 3, 4, 8] {
        for _ in 0..20 {
            let p: f64 = rng.random();
            for ch in [kraus_amplitude(d, p).unwrap(), kraus_phase(d, p).unwrap()] {
                worst_completeness = worst_completeness.max(ch.completeness_defect());
                let out = ch.apply(&random_mixed(&mut rng, d));
                checked += 1;
                if linalg::check_density_matrix(&out, CHANNEL_TOL).is_err() {
                    failures += 1;
                }
            }
        }
    }
    let pass = worst_completeness <= CHANNEL_TOL && failures == 0;
    Outcome::new(
        pass,
        format!(
            "Kraus completeness max defect {worst_completeness:.1e}, {checked} outputs checked, {failures} not valid density matrices"
        ),
    )
}

// ---------------------------------------------------------------- criterion 6 and 7

fn sweeps() -> Vec<(usize, NoiseModel, EncodingKind)> {
    let mut v = Vec::new();
    for n in [5, 6] {
        for model in [NoiseModel::Amplitude, NoiseModel::Phase] {
            for kind in EncodingKind::ALL {
                let dim = builtin_measurements(n).unwrap().dim;
                if build_encoding(kind, dim).is_ok() {
                    v.push((n, model, kind));
                }
            }
        }
    }
    v
}

fn grid() -> Vec<f64> {
    let steps = (1.0 / SWEEP_STEP).round() as usize;
    (0..=steps).map(|k| k as f64 / steps as f64).collect()
}

fn criterion_6() -> Outcome {
    let mut out = Outcome::new(true, "");
    let grid = grid();
    for n in [5, 6] {
        let ms = builtin_measurements(n).unwrap();
        let noiseless = direct_beta_c(&ms);
        for kind in EncodingKind::ALL {
            let Ok(enc) = build_encoding(kind, ms.dim) else {
                continue;
            };
            for model in [NoiseModel::Amplitude, NoiseModel::Phase] {
                let b0 = NoiseStudy::new(&ms, &enc, model)
                    .unwrap()
                    .beta(0.0)
                    .unwrap();
                if (b0 - noiseless).abs() > ENDPOINT_TOL {
                    out.pass = false;
                    out.details.push(format!(
                        "N={n} {} {}: beta(0)={b0}",
                        model.name(),
                        kind.name()
                    ));
                }
            }
        }
    }
    // γ = 1 sends every physical qubit or level to |0⟩, i.e. the logical |0⟩
    let ms6 = builtin_measurements(6).unwrap();
    let oracle: f64 = (1..=6).map(|v| ms6.vector(v)[0].norm_sqr()).sum();
    for kind in [EncodingKind::SingleQudit, EncodingKind::QubitRegister] {
        let enc = build_encoding(kind, 4).unwrap();
        let b1 = NoiseStudy::new(&ms6, &enc, NoiseModel::Amplitude)
            .unwrap()
            .beta(1.0)
            .unwrap();
        let ok = (b1 - 11.0 / 6.0).abs() <= DAMPED_TOL && (oracle - 11.0 / 6.0).abs() <= DAMPED_TOL;
        out.pass &= ok;
        out.details.push(format!(
            "N=6 amp {} beta(1)={b1:.12} oracle={oracle:.12}",
            kind.name()
        ));
    }
    let mut sweep_fail = 0;
    let list = sweeps();
    for &(n, model, kind) in &list {
        let ms = builtin_measurements(n).unwrap();
        let enc = build_encoding(kind, ms.dim).unwrap();
        let study = NoiseStudy::new(&ms, &enc, model).unwrap();
        let betas = study.betas(&grid, Execution::default()).unwrap();
        let max_jump = betas
            .windows(2)
            .map(|w| (w[1] - w[0]).abs())
            .fold(0.0, f64::max);
        let rises: Vec<f64> = betas
            .windows(2)
            .zip(&grid[1..])
            .filter(|(w, _)| w[1] > w[0] + MONOTONE_SLACK)
            .map(|(_, &g)| g)
            .collect();
        let crossings = betas
            .windows(2)
            .filter(|w| (w[0] > 2.0) != (w[1] > 2.0))
            .count();
        let th = study.threshold(Execution::default());
        let crossing_ok = matches!(&th, Ok(t) if (t.beta_at_threshold - 2.0).abs() <= CROSSING_TOL);
        let ok = max_jump < CONTINUITY_JUMP && rises.is_empty() && crossings == 1 && crossing_ok;
        if !ok {
            sweep_fail += 1;
        }
        out.details.push(format!(
            "{} N={n} {:5} {:9}: max step {max_jump:.4}, {} rising steps{}, crossings {crossings}, threshold {}",
            if ok { "ok  " } else { "MISS" },
            model.name(),
            kind.name(),
            rises.len(),
            rises
                .first()
                .map_or(String::new(), |g| format!(" (first at {g:.2}, last at {:.2})", rises.last().unwrap())),
            match &th {
                Ok(t) => format!("{:.6} with |beta-2|={:.1e}", t.threshold, (t.beta_at_threshold - 2.0).abs()),
                Err(e) => e.to_string(),
            }
        ));
    }
    out.pass &= sweep_fail == 0;
    out.summary = format!(
        "decoherence endpoints and sweep shape: {} of {} sweeps continuous, non-increasing, single crossing",
        list.len() - sweep_fail,
        list.len()
    );
    out
}

fn direct_beta_c(ms: &ctxlab::states::MeasurementSet) -> f64 {
    (1..=ms.n)
        .map(|v| linalg::inner(ms.vector(v), &ms.state).norm_sqr())
        .sum()
}

fn criterion_7() -> Outcome {
    let mut out = Outcome::new(true, "");
    let grid = grid();
    let ms = builtin_measurements(6).unwrap();
    for kind in EncodingKind::ALL {
        let enc = build_encoding(kind, 4).unwrap();
        for model in [NoiseModel::Amplitude, NoiseModel::Phase] {
            let study = NoiseStudy::new(&ms, &enc, model).unwrap();
            let pts = study.epsilon_th_curve(&grid, Execution::default()).unwrap();
            let th = study.threshold(Execution::default()).unwrap().threshold;
            let start_ok = (pts[0].epsilon_th - 1.0 / 81.0).abs() <= ENDPOINT_TOL;
            let mono = pts
                .windows(2)
                .all(|w| w[1].epsilon_th <= w[0].epsilon_th + MONOTONE_SLACK);
            let zero_beyond = pts
                .iter()
                .filter(|p| p.noise_param >= th)
                .all(|p| p.epsilon_th == 0.0)
                && study.epsilon_th(study.beta(th).unwrap()) <= CROSSING_TOL / 9.0;
            let ok = start_ok && mono && zero_beyond;
            out.pass &= ok;
            out.details.push(format!(
                "{} N=6 {:5} {:9}: eps_th(0)={:.12} non-increasing={mono} zero from {th:.6} on={zero_beyond}",
                if ok { "ok  " } else { "MISS" },
                model.name(),
                kind.name(),
                pts[0].epsilon_th
            ));
        }
    }
    out.summary =
        "epsilon_th curves for N=6: start at 1/81, non-increasing, zero past the threshold".into();
    out
}

// ---------------------------------------------------------------- criterion 8

fn criterion_8() -> Outcome {
    let mut out = Outcome::new(true, "");
    let t = Instant::now();
    let none = BTreeMap::new();
    let (mut marg_err, mut viol, mut tv, mut beta_err): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    let mut worst_z: f64 = 0.0;
    for n in [5, 6] {
        let ms = builtin_measurements(n).unwrap();
        let circuits = appendix_circuits(n).unwrap();
        let contexts = enumerate_contexts(&ms.graph()).contexts;
        let mut runs = Vec::new();
        for (k, ctx) in contexts.iter().enumerate() {
            let sched = make_schedule(ctx).unwrap();
            let run = run_context(&ms, ctx, &circuits, 0.0, &none, &sched).unwrap();
            for &v in ctx {
                let born = linalg::inner(ms.vector(v), &ms.state).norm_sqr();
                marg_err = marg_err.max((run.decoded.marginal(v) - born).abs());
            }
            viol = viol.max(run.decoded.violation);
            let rep = compatibility_check(
                &ms,
                ctx,
                &circuits,
                0.0,
                &none,
                &sched,
                Execution::default(),
            )
            .unwrap();
            tv = tv.max(rep.max_tv_distance);

            let counts = sample(
                &run,
                SHOTS,
                1000 * n as u64 + k as u64,
                DetectorModel::ideal(),
            )
            .unwrap();
            let mut expected: Vec<(ShotOutcome, f64)> = ctx
                .iter()
                .map(|&v| (ShotOutcome::Fired(v), run.decoded.marginal(v)))
                .collect();
            expected.push((ShotOutcome::AllZero, run.decoded.all_zero));
            expected.push((ShotOutcome::Violation, run.decoded.violation));
            for (o, p) in expected {
                let f = counts.count(o) as f64 / SHOTS as f64;
                let sigma = (p * (1.0 - p) / SHOTS as f64).sqrt();
                let z = if sigma > 0.0 {
                    (f - p).abs() / sigma
                } else if f == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                };
                worst_z = worst_z.max(z);
            }
            runs.push(run);
        }
        let beta = beta_from_runs(&runs, n).unwrap();
        beta_err = beta_err.max((beta - 19.0 / 9.0).abs());
    }
    let dt = t.elapsed();
    out.pass = marg_err <= SIM_TOL
        && viol <= SIM_TOL
        && tv <= SIM_TOL
        && beta_err <= SIM_TOL
        && worst_z <= SIGMAS
        && dt < SIM_TIME;
    out.summary = format!("photonic simulator at delta=0 for N=5,6 in {dt:.2?} (< {SIM_TIME:?})");
    out.details.push(format!(
        "marginal error {marg_err:.1e}, violation mass {viol:.1e}, ordering TV {tv:.1e}, beta error {beta_err:.1e} (tol {SIM_TOL:.0e})"
    ));
    out.details.push(format!(
        "sampled {SHOTS} shots per context: worst deviation {worst_z:.2} sigma (limit {SIGMAS})"
    ));
    out
}

// ---------------------------------------------------------------- criterion 9

fn criterion_9() -> Outcome {
    let output = Command::new(env!("CARGO_BIN_EXE_ctxlab"))
        .args(["ofnc", "--n", "5", "--beta-q", &BETA_EXP.to_string()])
        .output()
        .expect("binary runs");
    if !output.status.success() {
        return Outcome::new(
            false,
            format!(
                "ofnc --beta-q failed: {}",
                String::from_utf8_lossy(&output.stderr)
            ),
        );
    }
    let v: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    let eps = v["epsilon"].as_f64().unwrap();
    let delta = v["delta_th"].as_f64().unwrap();
    let percent = format!("{:.2}", 100.0 * delta);
    let pass = (eps - EPS_EXP).abs() <= 1e-12
        && (delta - DELTA_EXP_TARGET).abs() <= DELTA_EXP_TOL
        && percent == "1.16";
    Outcome::new(
        pass,
        format!(
            "beta_Q={BETA_EXP} through the CLI: epsilon={eps:.6}, delta_th={delta:.7} ({percent}%)"
        ),
    )
}

fn main() -> ExitCode {
    type Check = fn() -> Outcome;
    let criteria: [(&str, Check); 9] = [
        ("1 beta_Q reproduction", criterion_1),
        ("2 epsilon bounds", criterion_2),
        ("3 delta thresholds", criterion_3),
        ("4 appendix fidelity", criterion_4),
        ("5 channel soundness", criterion_5),
        ("6 decoherence endpoints", criterion_6),
        ("7 epsilon_th curves", criterion_7),
        ("8 simulator correctness", criterion_8),
        ("9 experimental-value pipeline", criterion_9),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let o = f();
        println!(
            "[{}] criterion {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            o.summary
        );
        for d in &o.details {
            println!("       {d}");
        }
        if !o.pass {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Precision bounds against ε-ontologically-faithful non-contextual models.
//!
//! The distance between an ideal projector `P_i` and its realization through a
//! noisy circuit `U` is the spectral norm of `P_i − U†|0⟩⟨0|U`. The threshold
//! `δ_th` is the largest splitter imperfection keeping every such distance,
//! over all vertices and all `φ` branches, at or below `ε`.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Rational;
use crate::exec::{self, Execution};
use crate::interferometer::{appendix_circuits, InterferometerCircuit, PhiBranch};
use crate::linalg::{self, CMatrix};
use crate::states::{builtin_measurements, MeasurementSet};

const PROJECTOR_TOL: f64 = 1e-10;

/// Bisection stops once the bracket is narrower than this.
pub const SOLVER_TOLERANCE: f64 = 1e-6;

/// Grid points probed for monotonicity before bisecting.
pub const MONOTONICITY_GRID: usize = 50;

/// Spectral norm of `P_ideal − U†|0⟩⟨0|U`.
pub fn projector_distance(p_ideal: &CMatrix, u_noisy: &CMatrix) -> Result<f64> {
    let d = p_ideal.nrows();
    if !p_ideal.is_square() || u_noisy.nrows() != d || u_noisy.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: u_noisy.nrows(),
        });
    }
    let idempotency = linalg::max_abs_entry(&(p_ideal * p_ideal - p_ideal));
    let tr = linalg::trace(p_ideal);
    if linalg::hermiticity_defect(p_ideal) > PROJECTOR_TOL
        || idempotency > PROJECTOR_TOL
        || (tr.re - 1.0).abs() > PROJECTOR_TOL
        || tr.im.abs() > PROJECTOR_TOL
    {
        return Err(Error::Precondition(
            "ideal operator is not a rank-one projector".into(),
        ));
    }
    if linalg::row_orthonormality_defect(u_noisy) > PROJECTOR_TOL {
        return Err(Error::Precondition(
            "noisy operator rows are not orthonormal".into(),
        ));
    }
    // U†|0⟩ is the conjugated first row of U
    let realized: Vec<_> = u_noisy.row(0).iter().map(|z| z.conj()).collect();
    let diff = p_ideal - linalg::projector(&realized);
    Ok(linalg::hermitian_spectral_norm(&diff))
}

/// `Δ_i(δ)` for one circuit and branch.
pub fn circuit_distance(
    vector: &[num_complex::Complex64],
    circuit: &InterferometerCircuit,
    delta: f64,
    branch: PhiBranch,
) -> Result<f64> {
    let u = linalg::real_to_complex(&circuit.compose(delta, Some(branch))?);
    projector_distance(&linalg::projector(vector), &u)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OfncBound {
    pub epsilon: f64,
    pub beta_quantum: f64,
    pub beta_classical: f64,
    pub denominator: usize,
}

/// `ε = (β_Q − β_cl) / Σ(k_i − 1)`.
pub fn epsilon_bound(beta_q: f64, beta_cl: f64, denom: usize) -> Result<OfncBound> {
    if denom == 0 {
        return Err(Error::VacuousPenalty);
    }
    Ok(OfncBound {
        epsilon: (beta_q - beta_cl) / denom as f64,
        beta_quantum: beta_q,
        beta_classical: beta_cl,
        denominator: denom,
    })
}

/// Rational counterpart of [`epsilon_bound`].
pub fn epsilon_bound_exact(beta_q: Rational, beta_cl: i64, denom: usize) -> Result<Rational> {
    if denom == 0 {
        return Err(Error::VacuousPenalty);
    }
    Ok((beta_q - Ratio::from_integer(beta_cl)) / Ratio::from_integer(denom as i64))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceCurve {
    pub vertex: usize,
    /// `φ` flags per splitter, e.g. `"01"`; empty for permutation-only circuits.
    pub phi_branch: String,
    pub permutation_only: bool,
    /// `(δ, Δ_i(δ))` pairs in grid order.
    pub samples: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    pub delta_th: f64,
    pub epsilon_used: f64,
    pub binding_vertex: usize,
    pub binding_branch: String,
    pub solver_tolerance: f64,
}

/// Vectors and fixture circuits for a built-in `n`.
pub struct ThresholdProblem {
    pub measurements: MeasurementSet,
    pub circuits: Vec<InterferometerCircuit>,
    /// Fixed `φ` flags for every circuit; `None` maximizes over all branches.
    pub phi: Option<PhiBranch>,
}

impl ThresholdProblem {
    pub fn builtin(n: usize) -> Result<Self> {
        Ok(ThresholdProblem {
            measurements: builtin_measurements(n)?,
            circuits: appendix_circuits(n)?,
            phi: None,
        })
    }

    pub fn with_phi(self, phi: Option<PhiBranch>) -> Self {
        ThresholdProblem { phi, ..self }
    }

    fn branches_of(&self, circuit: &InterferometerCircuit) -> Vec<PhiBranch> {
        match self.phi {
            Some(b) => vec![b.restrict(circuit.splitter_count())],
            None => circuit.branches().collect(),
        }
    }

    /// Largest `δ` every circuit accepts.
    pub fn max_delta(&self) -> f64 {
        self.circuits
            .iter()
            .map(InterferometerCircuit::max_delta)
            .fold(f64::INFINITY, f64::min)
    }

    /// `max_i max_φ Δ_i(δ)` and the `(vertex, branch)` attaining it.
    pub fn max_distance(&self, delta: f64) -> Result<(f64, usize, PhiBranch)> {
        let mut best = (f64::NEG_INFINITY, 0, PhiBranch(0));
        for (k, circuit) in self.circuits.iter().enumerate() {
            let vector = self.measurements.vector(k + 1);
            for branch in self.branches_of(circuit) {
                let d = circuit_distance(vector, circuit, delta, branch)?;
                if d > best.0 {
                    best = (d, k + 1, branch);
                }
            }
        }
        Ok(best)
    }

    pub fn delta_threshold(&self, epsilon: f64, exec: Execution) -> Result<ThresholdResult> {
        if epsilon.is_nan() || epsilon <= 0.0 {
            return Err(Error::NonPositiveEpsilon(epsilon));
        }
        let hi_limit = self.max_delta();
        let grid: Vec<f64> = (0..MONOTONICITY_GRID)
            .map(|k| hi_limit * k as f64 / (MONOTONICITY_GRID - 1) as f64)
            .collect();
        let values = exec::map(exec, &grid, |&d| self.max_distance(d).map(|r| r.0))
            .into_iter()
            .collect::<Result<Vec<f64>>>()?;
        for (k, w) in values.windows(2).enumerate() {
            if w[1] < w[0] - 1e-12 {
                return Err(Error::NonMonotone { at: grid[k + 1] });
            }
        }
        let upper = values
            .iter()
            .position(|&v| v > epsilon)
            .ok_or(Error::NoCrossing {
                level: epsilon,
                lo: 0.0,
                hi: hi_limit,
            })?;
        if upper == 0 {
            return Err(Error::NoCrossing {
                level: epsilon,
                lo: 0.0,
                hi: hi_limit,
            });
        }
        let (mut lo, mut hi) = (grid[upper - 1], grid[upper]);
        while hi - lo > SOLVER_TOLERANCE / 4.0 {
            let mid = 0.5 * (lo + hi);
            if self.max_distance(mid)?.0 > epsilon {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let (_, vertex, branch) = self.max_distance(hi)?;
        let splitters = self.circuits[vertex - 1].splitter_count();
        Ok(ThresholdResult {
            delta_th: 0.5 * (lo + hi),
            epsilon_used: epsilon,
            binding_vertex: vertex,
            binding_branch: branch.label(splitters),
            solver_tolerance: SOLVER_TOLERANCE,
        })
    }

    pub fn distance_curves(
        &self,
        delta_grid: &[f64],
        exec: Execution,
    ) -> Result<Vec<DistanceCurve>> {
        let limit = self.max_delta();
        if let Some(&bad) = delta_grid.iter().find(|d| d.abs() > limit) {
            return Err(Error::InvalidArgument(format!(
                "delta {bad} outside the validity range ±{limit}"
            )));
        }
        let mut jobs = Vec::new();
        for (k, circuit) in self.circuits.iter().enumerate() {
            if circuit.splitter_count() == 0 {
                jobs.push((k + 1, None));
            } else {
                jobs.extend(
                    self.branches_of(circuit)
                        .into_iter()
                        .map(|b| (k + 1, Some(b))),
                );
            }
        }
        exec::map(exec, &jobs, |&(vertex, branch)| {
            let circuit = &self.circuits[vertex - 1];
            let vector = self.measurements.vector(vertex);
            let samples = delta_grid
                .iter()
                .map(|&d| {
                    let dist = match branch {
                        Some(b) => circuit_distance(vector, circuit, d, b)?,
                        None => circuit_distance(vector, circuit, d, PhiBranch(0))?,
                    };
                    Ok((d, dist))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(DistanceCurve {
                vertex,
                phi_branch: branch
                    .map(|b| b.label(circuit.splitter_count()))
                    .unwrap_or_default(),
                permutation_only: branch.is_none(),
                samples,
            })
        })
        .into_iter()
        .collect()
    }
}

/// Threshold on `δ` for the built-in vectors and circuits of `n`.
pub fn delta_threshold(n: usize, epsilon: f64) -> Result<ThresholdResult> {
    ThresholdProblem::builtin(n)?.delta_threshold(epsilon, Execution::default())
}

/// `Δ_i(δ)` curves for every vertex and `φ` branch of `n`.
pub fn distance_curves(n: usize, delta_grid: &[f64]) -> Result<Vec<DistanceCurve>> {
    ThresholdProblem::builtin(n)?.distance_curves(delta_grid, Execution::default())
}

/// CSV header for [`DistanceCurve`] rows.
pub const CURVE_CSV_HEADER: [&str; 4] = ["delta", "vertex", "phi_branch", "distance"];

//! Decoherence of the prepared qudit under three physical encodings, and the
//! resulting loss of violation.

mod channel;
mod encoding;

pub use channel::{kraus_amplitude, kraus_phase, KrausChannel, NoiseModel};
pub use encoding::{build_encoding, Encoding, EncodingKind};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::graph::{enumerate_contexts, independence_number, ofnc_penalty_denominator};
use crate::linalg::{self, CMatrix};
use crate::states::MeasurementSet;

/// Grid step of the monotonicity probe preceding threshold bisection.
pub const THRESHOLD_GRID_STEP: f64 = 1e-2;

/// Bisection width on the noise parameter.
pub const THRESHOLD_TOLERANCE: f64 = 1e-10;

fn embed(op: &CMatrix, qubit: usize, qubits: usize) -> CMatrix {
    let left = CMatrix::identity(1 << qubit, 1 << qubit);
    let right_dim = 1 << (qubits - qubit - 1);
    let right = CMatrix::identity(right_dim, right_dim);
    linalg::kron(&linalg::kron(&left, op), &right)
}

/// Physical density matrix after the channel acts on the encoded state.
pub fn apply_noise(
    ms: &MeasurementSet,
    enc: &Encoding,
    model: NoiseModel,
    param: f64,
) -> Result<CMatrix> {
    if enc.logical_dim != ms.dim {
        return Err(Error::DimensionMismatch {
            expected: ms.dim,
            found: enc.logical_dim,
        });
    }
    let v = &enc.isometry;
    let mut rho = v * ms.state_density() * v.adjoint();
    match enc.qubits {
        None => {
            rho = model.channel(ms.dim, param)?.apply(&rho);
        }
        Some(n) => {
            let local = model.channel(2, param)?;
            for q in 0..n {
                let lifted = KrausChannel {
                    operators: local.operators.iter().map(|k| embed(k, q, n)).collect(),
                    local_dim: 1 << n,
                    ..local.clone()
                };
                rho = lifted.apply(&rho);
            }
        }
    }
    Ok(rho)
}

/// `β = Σ_i Tr(V P_i V† ρ_phys)`; projectors vanish outside the code space.
pub fn beta_under_noise(
    ms: &MeasurementSet,
    enc: &Encoding,
    model: NoiseModel,
    param: f64,
) -> Result<f64> {
    let rho = apply_noise(ms, enc, model, param)?;
    let logical = enc.isometry.adjoint() * rho * &enc.isometry;
    Ok(crate::states::vertex_probabilities(ms, &logical)
        .iter()
        .sum())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseThreshold {
    pub model: NoiseModel,
    pub encoding: EncodingKind,
    pub n: usize,
    pub threshold: f64,
    pub beta_at_threshold: f64,
    /// Whether β was non-increasing over the whole probe grid on `[0, 1]`.
    pub monotone_on_grid: bool,
    /// Number of grid intervals on which β crosses the classical bound.
    pub crossings: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSweepPoint {
    pub noise_param: f64,
    pub beta: f64,
    pub epsilon_th: f64,
}

/// Evaluation context shared by the threshold search and the sweeps.
pub struct NoiseStudy<'a> {
    pub measurements: &'a MeasurementSet,
    pub encoding: &'a Encoding,
    pub model: NoiseModel,
    pub beta_classical: f64,
    pub denominator: usize,
}

impl<'a> NoiseStudy<'a> {
    pub fn new(ms: &'a MeasurementSet, enc: &'a Encoding, model: NoiseModel) -> Result<Self> {
        if enc.logical_dim != ms.dim {
            return Err(Error::DimensionMismatch {
                expected: ms.dim,
                found: enc.logical_dim,
            });
        }
        let graph = ms.graph();
        Ok(NoiseStudy {
            measurements: ms,
            encoding: enc,
            model,
            beta_classical: independence_number(&graph)? as f64,
            denominator: ofnc_penalty_denominator(&enumerate_contexts(&graph)),
        })
    }

    pub fn beta(&self, param: f64) -> Result<f64> {
        beta_under_noise(self.measurements, self.encoding, self.model, param)
    }

    pub fn betas(&self, grid: &[f64], exec: Execution) -> Result<Vec<f64>> {
        exec::map(exec, grid, |&p| self.beta(p))
            .into_iter()
            .collect()
    }

    /// First crossing of the classical bound from above.
    pub fn threshold(&self, exec: Execution) -> Result<NoiseThreshold> {
        let steps = (1.0 / THRESHOLD_GRID_STEP).round() as usize;
        let grid: Vec<f64> = (0..=steps).map(|k| k as f64 / steps as f64).collect();
        let betas = self.betas(&grid, exec)?;
        let level = self.beta_classical;
        if betas[0] <= level {
            return Err(Error::NoViolation(betas[0]));
        }
        let first = betas
            .iter()
            .position(|&b| b <= level)
            .ok_or(Error::NoCrossing {
                level,
                lo: 0.0,
                hi: 1.0,
            })?;
        if let Some(k) = (1..=first).find(|&k| betas[k] > betas[k - 1] + 1e-12) {
            return Err(Error::NonMonotone { at: grid[k] });
        }
        let monotone_on_grid = betas.windows(2).all(|w| w[1] <= w[0] + 1e-12);
        let crossings = betas
            .windows(2)
            .filter(|w| (w[0] > level) != (w[1] > level))
            .count();
        let (mut lo, mut hi) = (grid[first - 1], grid[first]);
        while hi - lo > THRESHOLD_TOLERANCE {
            let mid = 0.5 * (lo + hi);
            if self.beta(mid)? > level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let threshold = 0.5 * (lo + hi);
        Ok(NoiseThreshold {
            model: self.model,
            encoding: self.encoding.kind,
            n: self.measurements.n,
            threshold,
            beta_at_threshold: self.beta(threshold)?,
            monotone_on_grid,
            crossings,
        })
    }

    pub fn epsilon_th(&self, beta: f64) -> f64 {
        ((beta - self.beta_classical) / self.denominator as f64).max(0.0)
    }

    pub fn epsilon_th_curve(&self, grid: &[f64], exec: Execution) -> Result<Vec<NoiseSweepPoint>> {
        if let Some(&bad) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::NoiseParamOutOfRange(bad));
        }
        if self.denominator == 0 {
            return Err(Error::VacuousPenalty);
        }
        let betas = self.betas(grid, exec)?;
        Ok(grid
            .iter()
            .zip(betas)
            .map(|(&p, beta)| NoiseSweepPoint {
                noise_param: p,
                beta,
                epsilon_th: self.epsilon_th(beta),
            })
            .collect())
    }
}

pub fn noise_threshold(
    ms: &MeasurementSet,
    enc: &Encoding,
    model: NoiseModel,
) -> Result<NoiseThreshold> {
    NoiseStudy::new(ms, enc, model)?.threshold(Execution::default())
}

pub fn epsilon_th_curve(
    ms: &MeasurementSet,
    enc: &Encoding,
    model: NoiseModel,
    grid: &[f64],
) -> Result<Vec<NoiseSweepPoint>> {
    NoiseStudy::new(ms, enc, model)?.epsilon_th_curve(grid, Execution::default())
}

/// CSV header for sweep rows.
pub const SWEEP_CSV_HEADER: [&str; 6] = ["model", "encoding", "n", "param", "beta", "epsilon_th"];

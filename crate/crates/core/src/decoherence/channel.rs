//! Qudit amplitude- and phase-damping channels in Kraus form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseModel {
    #[serde(rename = "amp")]
    Amplitude,
    Phase,
}

impl NoiseModel {
    pub fn name(self) -> &'static str {
        match self {
            NoiseModel::Amplitude => "amp",
            NoiseModel::Phase => "phase",
        }
    }

    pub fn channel(self, d: usize, param: f64) -> Result<KrausChannel> {
        match self {
            NoiseModel::Amplitude => kraus_amplitude(d, param),
            NoiseModel::Phase => kraus_phase(d, param),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    pub model: NoiseModel,
    pub noise_param: f64,
    pub local_dim: usize,
    pub operators: Vec<CMatrix>,
}

impl KrausChannel {
    /// `ρ ↦ Σ_k K_k ρ K_k†`
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        self.operators
            .iter()
            .fold(CMatrix::zeros(rho.nrows(), rho.ncols()), |acc, k| {
                acc + k * rho * k.adjoint()
            })
    }

    /// `Σ_k K_k† K_k`
    pub fn completeness(&self) -> CMatrix {
        self.operators
            .iter()
            .fold(CMatrix::zeros(self.local_dim, self.local_dim), |acc, k| {
                acc + k.adjoint() * k
            })
    }

    /// Largest entry of `Σ_k K_k† K_k − I`.
    pub fn completeness_defect(&self) -> f64 {
        let d = self.local_dim;
        crate::linalg::max_abs_entry(&(self.completeness() - CMatrix::identity(d, d)))
    }
}

fn check(d: usize, param: f64) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("channel dimension {d} < 2")));
    }
    if !(0.0..=1.0).contains(&param) {
        return Err(Error::NoiseParamOutOfRange(param));
    }
    Ok(())
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `A_k = Σ_{r=k}^{d−1} √C(r,k) √((1−γ)^{r−k} γ^k) |r−k⟩⟨r|`, `k = 0..d−1`.
pub fn kraus_amplitude(d: usize, gamma: f64) -> Result<KrausChannel> {
    check(d, gamma)?;
    let operators = (0..d)
        .map(|k| {
            let mut a = CMatrix::zeros(d, d);
            for r in k..d {
                let w = binomial(r, k) * (1.0 - gamma).powi((r - k) as i32) * gamma.powi(k as i32);
                a[(r - k, r)] = c(w.sqrt());
            }
            a
        })
        .collect();
    Ok(KrausChannel {
        model: NoiseModel::Amplitude,
        noise_param: gamma,
        local_dim: d,
        operators,
    })
}

/// `P_0 = Σ_r (1−λ)^{r²/2} |r⟩⟨r|` and `P_k = √(1 − (1−λ)^{k²}) |k⟩⟨k|` for `k ≥ 1`.
pub fn kraus_phase(d: usize, lambda: f64) -> Result<KrausChannel> {
    check(d, lambda)?;
    let keep = 1.0 - lambda;
    let mut operators = Vec::with_capacity(d);
    let mut p0 = CMatrix::zeros(d, d);
    for r in 0..d {
        p0[(r, r)] = c(keep.powf((r * r) as f64 / 2.0));
    }
    operators.push(p0);
    for k in 1..d {
        let mut p = CMatrix::zeros(d, d);
        p[(k, k)] = c((1.0 - keep.powi((k * k) as i32)).max(0.0).sqrt());
        operators.push(p);
    }
    Ok(KrausChannel {
        model: NoiseModel::Phase,
        noise_param: lambda,
        local_dim: d,
        operators,
    })
}

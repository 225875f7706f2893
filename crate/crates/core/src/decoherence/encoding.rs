use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, CMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EncodingKind {
    #[serde(rename = "qudit")]
    SingleQudit,
    #[serde(rename = "qubits")]
    QubitRegister,
    #[serde(rename = "symmetric")]
    Symmetric,
}

impl EncodingKind {
    pub fn name(self) -> &'static str {
        match self {
            EncodingKind::SingleQudit => "qudit",
            EncodingKind::QubitRegister => "qubits",
            EncodingKind::Symmetric => "symmetric",
        }
    }

    pub const ALL: [EncodingKind; 3] = [
        EncodingKind::SingleQudit,
        EncodingKind::QubitRegister,
        EncodingKind::Symmetric,
    ];
}

/// Embedding of a `d`-level logical qudit into its physical carrier.
#[derive(Clone, Debug, PartialEq)]
pub struct Encoding {
    pub kind: EncodingKind,
    pub logical_dim: usize,
    /// `None` for a single qudit; qubit count otherwise (qubit 0 is the most
    /// significant digit of the physical basis index).
    pub qubits: Option<usize>,
    /// `physical_dim × logical_dim` isometry.
    pub isometry: CMatrix,
}

impl Encoding {
    pub fn physical_dim(&self) -> usize {
        self.isometry.nrows()
    }
}

pub fn build_encoding(kind: EncodingKind, d: usize) -> Result<Encoding> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("logical dimension {d} < 2")));
    }
    let (qubits, isometry) = match kind {
        EncodingKind::SingleQudit => (None, CMatrix::identity(d, d)),
        EncodingKind::QubitRegister => {
            if !d.is_power_of_two() {
                return Err(Error::NotPowerOfTwo(d));
            }
            // |j⟩ is the register state spelling j in binary
            (Some(d.trailing_zeros() as usize), CMatrix::identity(d, d))
        }
        EncodingKind::Symmetric => {
            let n = d - 1;
            if n > 16 {
                return Err(Error::InvalidArgument(format!("{n} qubits is too many")));
            }
            let phys = 1usize << n;
            let mut v = CMatrix::zeros(phys, d);
            let mut weights = vec![0usize; d];
            for idx in 0..phys {
                weights[idx.count_ones() as usize] += 1;
            }
            for idx in 0..phys {
                let r = idx.count_ones() as usize;
                v[(idx, r)] = c(1.0 / (weights[r] as f64).sqrt());
            }
            (Some(n), v)
        }
    };
    Ok(Encoding {
        kind,
        logical_dim: d,
        qubits,
        isometry,
    })
}

//! Qudit states and measurement vectors for the built-in `N = 5` and `N = 6`
//! tests, and the inequality value `β = Σ_i Tr(P_i ρ)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{self, Rational, SignedSqrt};
use crate::graph::{build_graph, independence_number, ExclusivityGraph};
use crate::linalg::{self, CMatrix};

const NORM_TOL: f64 = 1e-12;
const DENSITY_TOL: f64 = 1e-10;

/// Qudit state `|η⟩` and the eigenvectors `|v_i⟩` of the rank-one projectors.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSet {
    pub n: usize,
    pub dim: usize,
    pub state: Vec<Complex64>,
    /// `vectors[i - 1]` is `|v_i⟩`.
    pub vectors: Vec<Vec<Complex64>>,
    exact: Option<ExactForm>,
}

#[derive(Clone, Debug, PartialEq)]
struct ExactForm {
    state: Vec<SignedSqrt>,
    vectors: Vec<Vec<SignedSqrt>>,
}

fn s(sign: i8, num: i64, den: i64) -> SignedSqrt {
    SignedSqrt::new(sign, num, den)
}

fn z() -> SignedSqrt {
    SignedSqrt::zero()
}

fn exact_pentagon() -> ExactForm {
    ExactForm {
        state: vec![s(1, 1, 3), s(1, 1, 3), s(1, 1, 3)],
        vectors: vec![
            vec![s(1, 1, 3), s(-1, 1, 3), s(1, 1, 3)],
            vec![s(1, 1, 2), s(1, 1, 2), z()],
            vec![z(), z(), s(1, 1, 1)],
            vec![s(1, 1, 1), z(), z()],
            vec![z(), s(1, 1, 2), s(1, 1, 2)],
        ],
    }
}

fn exact_hexagon() -> ExactForm {
    // (1/√6)(√2, 1, 1, √2) = (√(1/3), √(1/6), √(1/6), √(1/3))
    ExactForm {
        state: vec![s(1, 1, 3), s(1, 1, 6), s(1, 1, 6), s(1, 1, 3)],
        vectors: vec![
            vec![s(-1, 1, 3), s(1, 1, 6), s(1, 1, 6), s(-1, 1, 3)],
            vec![s(1, 1, 1), z(), z(), z()],
            vec![z(), s(1, 1, 4), s(1, 1, 4), s(1, 1, 2)],
            vec![z(), s(-1, 1, 2), s(1, 1, 2), z()],
            vec![s(1, 1, 2), s(1, 1, 4), s(1, 1, 4), z()],
            vec![z(), z(), z(), s(1, 1, 1)],
        ],
    }
}

fn evaluate(v: &[SignedSqrt]) -> Vec<Complex64> {
    v.iter().map(|x| linalg::c(x.value())).collect()
}

impl MeasurementSet {
    /// A user-supplied set; vectors are checked for unit norm and for
    /// orthogonality on every edge of the size-`n` exclusivity graph.
    pub fn custom(n: usize, state: Vec<Complex64>, vectors: Vec<Vec<Complex64>>) -> Result<Self> {
        let graph = build_graph(n)?;
        Self::validated(&graph, state, vectors, None)
    }

    fn validated(
        graph: &ExclusivityGraph,
        state: Vec<Complex64>,
        vectors: Vec<Vec<Complex64>>,
        exact: Option<ExactForm>,
    ) -> Result<Self> {
        let n = graph.n();
        let dim = state.len();
        if vectors.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: vectors.len(),
            });
        }
        if (linalg::norm(&state) - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidVector("state is not normalized".into()));
        }
        for (k, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            if (linalg::norm(v) - 1.0).abs() > NORM_TOL {
                return Err(Error::InvalidVector(format!(
                    "|v_{}⟩ is not normalized",
                    k + 1
                )));
            }
        }
        for (i, j) in graph.edges() {
            if linalg::inner(&vectors[i - 1], &vectors[j - 1]).norm() > NORM_TOL {
                return Err(Error::NotExclusive(i, j));
            }
        }
        Ok(MeasurementSet {
            n,
            dim,
            state,
            vectors,
            exact,
        })
    }

    /// Same measurements, different prepared state.
    pub fn with_state(&self, state: Vec<Complex64>) -> Result<Self> {
        if state.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: state.len(),
            });
        }
        if (linalg::norm(&state) - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidVector("state is not normalized".into()));
        }
        Ok(MeasurementSet {
            state,
            exact: None,
            ..self.clone()
        })
    }

    pub fn vector(&self, vertex: usize) -> &[Complex64] {
        &self.vectors[vertex - 1]
    }

    pub fn projector(&self, vertex: usize) -> CMatrix {
        linalg::projector(self.vector(vertex))
    }

    pub fn state_density(&self) -> CMatrix {
        linalg::projector(&self.state)
    }

    pub fn graph(&self) -> ExclusivityGraph {
        build_graph(self.n).expect("measurement sets are only built for valid n")
    }

    /// `β_Q` for the pure prepared state as an exact rational, when the set
    /// carries exact entries.
    pub fn exact_beta_quantum(&self) -> Option<Rational> {
        let ex = self.exact.as_ref()?;
        ex.vectors
            .iter()
            .map(|v| exact::overlap_squared(v, &ex.state))
            .sum()
    }

    /// Whether every vector entry has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.state
            .iter()
            .chain(self.vectors.iter().flatten())
            .all(|z| z.im == 0.0)
    }

    pub fn to_record(&self) -> MeasurementRecord {
        let pairs = |v: &[Complex64]| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>();
        MeasurementRecord {
            n: self.n,
            dim: self.dim,
            state: pairs(&self.state),
            vectors: self
                .vectors
                .iter()
                .enumerate()
                .map(|(k, v)| VectorRecord {
                    vertex: k + 1,
                    amplitudes: pairs(v),
                })
                .collect(),
        }
    }
}

/// JSON export: complex entries as `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub n: usize,
    pub dim: usize,
    pub state: Vec<[f64; 2]>,
    pub vectors: Vec<VectorRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VectorRecord {
    pub vertex: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

/// The built-in vectors for `n = 5` (qutrit) and `n = 6` (ququart).
pub fn builtin_measurements(n: usize) -> Result<MeasurementSet> {
    let exact = match n {
        5 => exact_pentagon(),
        6 => exact_hexagon(),
        _ => return Err(Error::NoBuiltinVectors(n)),
    };
    let graph = build_graph(n)?;
    let state = evaluate(&exact.state);
    let vectors = exact.vectors.iter().map(|v| evaluate(v)).collect();
    MeasurementSet::validated(&graph, state, vectors, Some(exact))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub beta_classical: usize,
    pub beta_quantum: f64,
    /// `per_vertex[i - 1] = Tr(P_i ρ)`.
    pub per_vertex: Vec<f64>,
}

/// `Tr(P_i ρ)` for every vertex, without validating `ρ`.
pub fn vertex_probabilities(ms: &MeasurementSet, rho: &CMatrix) -> Vec<f64> {
    ms.vectors
        .iter()
        .map(|v| {
            // ⟨v|ρ|v⟩
            let rv = rho * linalg::CVector::from_column_slice(v);
            linalg::inner(v, rv.as_slice()).re
        })
        .collect()
}

pub fn beta_value(ms: &MeasurementSet, rho: &CMatrix) -> Result<BoundsReport> {
    if rho.nrows() != ms.dim || rho.ncols() != ms.dim {
        return Err(Error::DimensionMismatch {
            expected: ms.dim,
            found: rho.nrows(),
        });
    }
    linalg::check_density_matrix(rho, DENSITY_TOL).map_err(Error::InvalidDensityMatrix)?;
    let per_vertex: Vec<f64> = vertex_probabilities(ms, rho)
        .into_iter()
        .map(|p| p.clamp(0.0, 1.0))
        .collect();
    Ok(BoundsReport {
        beta_classical: independence_number(&ms.graph())?,
        beta_quantum: per_vertex.iter().sum(),
        per_vertex,
    })
}

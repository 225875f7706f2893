//! Beam-splitter circuits mapping a measurement vector onto the uppermost path.
//!
//! A circuit is an ordered list of layers acting on path amplitudes; the first
//! layer acts first. Each beam splitter couples two paths `a`, `b` through the
//! real block
//!
//! ```text
//! [ s_aa √T      s_ab √(1−T) ]
//! [ s_ba √(1−T)  s_bb √T     ]
//! ```
//!
//! where `T` is the transmission probability and the `s` entries are fixed
//! signs. An imperfection `δ` shifts the probability to `T + (−1)^φ δ`; rows
//! stay normalized, so every noisy circuit is still orthogonal.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entries below this magnitude count as zero during synthesis.
pub const ZERO_TOL: f64 = 1e-12;

fn default_signs() -> [i8; 4] {
    [1, 1, 1, -1]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeamSplitterSpec {
    #[serde(rename = "a")]
    pub mode_a: usize,
    #[serde(rename = "b")]
    pub mode_b: usize,
    #[serde(rename = "T")]
    pub transmission: f64,
    /// Direction of the imperfection: `T → T + (−1)^phi δ`.
    #[serde(default)]
    pub phi: u8,
    /// Signs of the block entries `[aa, ab, ba, bb]`.
    #[serde(default = "default_signs")]
    pub signs: [i8; 4],
}

impl BeamSplitterSpec {
    pub fn new(mode_a: usize, mode_b: usize, transmission: f64, signs: [i8; 4]) -> Result<Self> {
        let spec = BeamSplitterSpec {
            mode_a,
            mode_b,
            transmission,
            phi: 0,
            signs,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.mode_a == self.mode_b {
            return Err(Error::InvalidSplitter("modes must differ".into()));
        }
        if !(self.transmission > 0.0 && self.transmission < 1.0) {
            return Err(Error::InvalidSplitter(format!(
                "transmission {} outside (0, 1)",
                self.transmission
            )));
        }
        if self.phi > 1 || self.signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidSplitter("phi must be 0|1, signs ±1".into()));
        }
        let [aa, ab, ba, bb] = self.signs.map(i32::from);
        if aa * ba + ab * bb != 0 {
            return Err(Error::InvalidSplitter(
                "sign pattern is not orthogonal".into(),
            ));
        }
        Ok(())
    }

    /// Largest `|δ|` keeping the shifted probability inside `[0, 1]`.
    pub fn max_delta(&self) -> f64 {
        self.transmission.min(1.0 - self.transmission)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Layer {
    #[serde(rename = "bs")]
    Splitter(BeamSplitterSpec),
    /// Sends path `j` to path `map[j]`.
    #[serde(rename = "perm")]
    Permutation { map: Vec<usize> },
}

/// Per-splitter override of the `φ` flags: bit `k` is the flag of the `k`-th
/// splitter in layer order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PhiBranch(pub u32);

impl PhiBranch {
    pub fn flag(self, splitter: usize) -> u8 {
        ((self.0 >> splitter) & 1) as u8
    }

    /// Flags as a string of `0`/`1`, one character per splitter.
    pub fn label(self, splitters: usize) -> String {
        (0..splitters)
            .map(|k| if self.flag(k) == 1 { '1' } else { '0' })
            .collect()
    }

    /// Drops flags beyond the first `splitters`.
    pub fn restrict(self, splitters: usize) -> PhiBranch {
        PhiBranch(self.0 & ((1u64 << splitters) - 1) as u32)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterferometerCircuit {
    pub dim: usize,
    pub layers: Vec<Layer>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_vertex: Option<usize>,
}

impl InterferometerCircuit {
    pub fn new(dim: usize, layers: Vec<Layer>) -> Result<Self> {
        let c = InterferometerCircuit {
            dim,
            layers,
            target_vertex: None,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn for_vertex(mut self, vertex: usize) -> Self {
        self.target_vertex = Some(vertex);
        self
    }

    pub fn validate(&self) -> Result<()> {
        for layer in &self.layers {
            match layer {
                Layer::Splitter(bs) => {
                    bs.validate()?;
                    if bs.mode_a >= self.dim || bs.mode_b >= self.dim {
                        return Err(Error::InvalidSplitter(format!(
                            "mode out of range for dimension {}",
                            self.dim
                        )));
                    }
                }
                Layer::Permutation { map } => {
                    let mut seen = vec![false; self.dim];
                    if map.len() != self.dim {
                        return Err(Error::DimensionMismatch {
                            expected: self.dim,
                            found: map.len(),
                        });
                    }
                    for &t in map {
                        if t >= self.dim || seen[t] {
                            return Err(Error::InvalidArgument(format!(
                                "{map:?} is not a permutation"
                            )));
                        }
                        seen[t] = true;
                    }
                }
            }
        }
        Ok(())
    }

    pub fn splitters(&self) -> impl Iterator<Item = &BeamSplitterSpec> {
        self.layers.iter().filter_map(|l| match l {
            Layer::Splitter(bs) => Some(bs),
            Layer::Permutation { .. } => None,
        })
    }

    pub fn splitter_count(&self) -> usize {
        self.splitters().count()
    }

    /// The stored `φ` flags as a branch.
    pub fn stored_branch(&self) -> PhiBranch {
        PhiBranch(
            self.splitters()
                .enumerate()
                .map(|(k, bs)| u32::from(bs.phi) << k)
                .sum(),
        )
    }

    /// Every assignment of `φ` flags over the splitters.
    pub fn branches(&self) -> impl Iterator<Item = PhiBranch> {
        (0..1u32 << self.splitter_count()).map(PhiBranch)
    }

    /// Largest `|δ|` accepted by [`compose`](Self::compose).
    pub fn max_delta(&self) -> f64 {
        self.splitters()
            .map(BeamSplitterSpec::max_delta)
            .fold(f64::INFINITY, f64::min)
    }

    /// Matrix of the circuit with every splitter's probability shifted by
    /// `±δ`. `branch = None` uses the stored flags.
    pub fn compose(&self, delta: f64, branch: Option<PhiBranch>) -> Result<DMatrix<f64>> {
        let branch = branch.unwrap_or_else(|| self.stored_branch());
        let d = self.dim;
        let mut total = DMatrix::<f64>::identity(d, d);
        let mut splitter = 0;
        for (idx, layer) in self.layers.iter().enumerate() {
            match layer {
                Layer::Splitter(bs) => {
                    let sign = if branch.flag(splitter) == 1 {
                        -1.0
                    } else {
                        1.0
                    };
                    splitter += 1;
                    let t = bs.transmission + sign * delta;
                    // tolerate rounding at the boundary
                    if !(-1e-15..=1.0 + 1e-15).contains(&t) {
                        return Err(Error::TransmissionOutOfRange {
                            layer: idx,
                            value: t,
                        });
                    }
                    let t = t.clamp(0.0, 1.0);
                    let (ct, cr) = (t.sqrt(), (1.0 - t).sqrt());
                    let [aa, ab, ba, bb] = bs.signs.map(f64::from);
                    let (a, b) = (bs.mode_a, bs.mode_b);
                    // left-multiply: only rows a and b change
                    for col in 0..d {
                        let (ra, rb) = (total[(a, col)], total[(b, col)]);
                        total[(a, col)] = aa * ct * ra + ab * cr * rb;
                        total[(b, col)] = ba * cr * ra + bb * ct * rb;
                    }
                }
                Layer::Permutation { map } => {
                    let mut next = DMatrix::<f64>::zeros(d, d);
                    for (src, &dst) in map.iter().enumerate() {
                        next.set_row(dst, &total.row(src));
                    }
                    total = next;
                }
            }
        }
        Ok(total)
    }
}

/// A synthesized circuit and the sign `s` with `U|v⟩ = s|0⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct Synthesis {
    pub circuit: InterferometerCircuit,
    pub sign: f64,
}

/// Builds a minimal two-level splitter circuit with `U|v⟩ = ±|0⟩`.
///
/// Nonzero components are merged pairwise starting from the highest path;
/// the surviving component is then routed to path 0 by a permutation.
pub fn synthesize(v: &[Complex64], dim: usize) -> Result<Synthesis> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: v.len(),
        });
    }
    if v.iter().any(|z| z.im.abs() > ZERO_TOL) {
        return Err(Error::InvalidVector(
            "complex amplitudes are not supported".into(),
        ));
    }
    let x: Vec<f64> = v.iter().map(|z| z.re).collect();
    let norm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    if norm <= ZERO_TOL {
        return Err(Error::InvalidVector("zero vector".into()));
    }
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidVector(format!("norm {norm} differs from 1")));
    }

    let support: Vec<usize> = (0..dim).filter(|&k| x[k].abs() > ZERO_TOL).collect();
    let mut layers = Vec::new();
    let mut current = x.clone();
    for w in support.windows(2).rev() {
        let (a, b) = (w[0], w[1]);
        let (xa, xb) = (current[a], current[b]);
        let r = xa.hypot(xb);
        let (sa, sb) = (xa.signum() as i8, xb.signum() as i8);
        let signs = [sa, sb, -sb * sa, 1];
        layers.push(Layer::Splitter(BeamSplitterSpec {
            mode_a: a,
            mode_b: b,
            transmission: (xa / r).powi(2),
            phi: 0,
            signs,
        }));
        current[a] = r;
        current[b] = 0.0;
    }
    let head = support[0];
    let mut sign = current[head].signum();
    if support.len() > 1 {
        sign = 1.0;
    }
    if head != 0 {
        let mut map: Vec<usize> = (0..dim).collect();
        map.swap(0, head);
        layers.push(Layer::Permutation { map });
    }
    Ok(Synthesis {
        circuit: InterferometerCircuit::new(dim, layers)?,
        sign,
    })
}

fn splitter(a: usize, b: usize, t: f64, phi: u8, signs: [i8; 4]) -> Layer {
    Layer::Splitter(BeamSplitterSpec {
        mode_a: a,
        mode_b: b,
        transmission: t,
        phi,
        signs,
    })
}

fn perm(map: &[usize]) -> Layer {
    Layer::Permutation { map: map.to_vec() }
}

/// Reference circuit for one built-in vector; at `δ = 0` it reproduces the
/// reference matrix entry for entry.
pub fn appendix_fixture(n: usize, vertex: usize) -> Result<InterferometerCircuit> {
    let layers = match (n, vertex) {
        (5, 1) => vec![
            splitter(1, 2, 0.5, 0, [-1, 1, 1, 1]),
            splitter(0, 1, 1.0 / 3.0, 0, [1, 1, 1, -1]),
        ],
        (5, 2) => vec![splitter(0, 1, 0.5, 0, [1, 1, 1, -1])],
        (5, 3) => vec![perm(&[2, 1, 0])],
        (5, 4) => vec![],
        (5, 5) => vec![perm(&[2, 0, 1]), splitter(0, 1, 0.5, 0, [1, 1, 1, -1])],
        (6, 1) => vec![
            splitter(2, 3, 1.0 / 3.0, 0, [-1, 1, 1, 1]),
            splitter(1, 2, 0.25, 0, [-1, 1, 1, 1]),
            splitter(0, 1, 1.0 / 3.0, 0, [-1, -1, -1, 1]),
        ],
        (6, 2) => vec![],
        (6, 3) => vec![
            perm(&[3, 1, 2, 0]),
            splitter(1, 2, 0.5, 0, [1, 1, 1, -1]),
            splitter(0, 1, 0.5, 0, [1, 1, 1, -1]),
        ],
        (6, 4) => vec![splitter(1, 2, 0.5, 0, [-1, 1, 1, 1]), perm(&[2, 0, 1, 3])],
        (6, 5) => vec![
            splitter(1, 2, 0.5, 0, [1, 1, 1, -1]),
            splitter(0, 1, 0.5, 0, [1, 1, -1, 1]),
        ],
        (6, 6) => vec![perm(&[3, 1, 2, 0])],
        _ => return Err(Error::UnknownFixture { n, vertex }),
    };
    let dim = if n == 5 { 3 } else { 4 };
    Ok(InterferometerCircuit::new(dim, layers)?.for_vertex(vertex))
}

/// Fixture circuits for every vertex of `n`, indexed by `vertex - 1`.
pub fn appendix_circuits(n: usize) -> Result<Vec<InterferometerCircuit>> {
    (1..=n).map(|v| appendix_fixture(n, v)).collect()
}

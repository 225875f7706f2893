use std::collections::BTreeMap;

use itertools::Itertools;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::schedule::DelaySchedule;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::interferometer::{InterferometerCircuit, PhiBranch};
use crate::states::MeasurementSet;
use num_complex::Complex64;

/// Amplitudes over `(path, delay mask)`; mask bit `b` is the `b`-th entry of
/// the delay schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct PhotonState {
    pub dim: usize,
    pub mask_bits: usize,
    amplitudes: Vec<Complex64>,
}

impl PhotonState {
    /// `|η⟩ ⊗ |0⟩_t`
    pub fn prepare(eta: &[Complex64], mask_bits: usize) -> Self {
        let masks = 1usize << mask_bits;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); eta.len() * masks];
        for (p, &a) in eta.iter().enumerate() {
            amplitudes[p * masks] = a;
        }
        PhotonState {
            dim: eta.len(),
            mask_bits,
            amplitudes,
        }
    }

    fn masks(&self) -> usize {
        1 << self.mask_bits
    }

    pub fn amplitude(&self, path: usize, mask: u32) -> Complex64 {
        self.amplitudes[path * self.masks() + mask as usize]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Applies a path-space operator to every delay branch.
    pub fn apply_paths(&mut self, u: &DMatrix<f64>) {
        let masks = self.masks();
        let mut next = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for m in 0..masks {
            for p in 0..self.dim {
                let mut acc = Complex64::new(0.0, 0.0);
                for q in 0..self.dim {
                    acc += self.amplitudes[q * masks + m] * u[(p, q)];
                }
                next[p * masks + m] = acc;
            }
        }
        self.amplitudes = next;
    }

    /// Delay controlled by the uppermost path: flips mask bit `bit` on path 0.
    pub fn controlled_delay(&mut self, bit: usize) {
        let flag = 1usize << bit;
        for m in 0..self.masks() {
            if m & flag == 0 {
                self.amplitudes.swap(m, m | flag);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeBin {
    pub path: usize,
    /// Vertices whose delay the photon carries.
    pub mask: Vec<usize>,
    pub delay: u64,
    pub prob: f64,
}

/// Outcome probabilities per measurement, as read off the detectors.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct DecodedDistribution {
    /// `P(X_i = 1, all others 0)` per vertex of the context.
    pub fired: BTreeMap<usize, f64>,
    pub all_zero: f64,
    /// Mass carrying two or more delays, which exclusivity forbids.
    pub violation: f64,
}

impl DecodedDistribution {
    pub fn marginal(&self, vertex: usize) -> f64 {
        self.fired.get(&vertex).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.fired.values().sum::<f64>() + self.all_zero + self.violation
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContextRun {
    pub context: Vec<usize>,
    pub dim: usize,
    pub schedule: DelaySchedule,
    pub outcome_distribution: Vec<OutcomeBin>,
    pub decoded: DecodedDistribution,
}

impl ContextRun {
    pub fn final_vertex(&self) -> usize {
        *self.context.last().expect("contexts are non-empty")
    }
}

/// Decoding outcome of a single detector bin.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BinOutcome {
    Fired(usize),
    AllZero,
    Violation,
}

pub fn classify(bin: &OutcomeBin, final_vertex: usize) -> BinOutcome {
    match bin.mask.as_slice() {
        [] if bin.path == 0 => BinOutcome::Fired(final_vertex),
        [] => BinOutcome::AllZero,
        [v] => BinOutcome::Fired(*v),
        _ => BinOutcome::Violation,
    }
}

/// Maps detector bins onto measurement outcomes.
pub fn decode(run: &ContextRun, schedule: &DelaySchedule) -> Result<DecodedDistribution> {
    if schedule != &run.schedule {
        return Err(Error::InvalidSchedule(
            "run was produced with another schedule".into(),
        ));
    }
    Ok(decode_bins(&run.outcome_distribution, &run.context))
}

fn decode_bins(bins: &[OutcomeBin], context: &[usize]) -> DecodedDistribution {
    let final_vertex = *context.last().expect("contexts are non-empty");
    let mut out = DecodedDistribution {
        fired: context.iter().map(|&v| (v, 0.0)).collect(),
        ..Default::default()
    };
    for bin in bins {
        match classify(bin, final_vertex) {
            BinOutcome::Fired(v) => *out.fired.entry(v).or_insert(0.0) += bin.prob,
            BinOutcome::AllZero => out.all_zero += bin.prob,
            BinOutcome::Violation => out.violation += bin.prob,
        }
    }
    out
}

fn check_context(ms: &MeasurementSet, context: &[usize]) -> Result<()> {
    let distinct = context.iter().all_unique();
    if context.is_empty()
        || !distinct
        || context.iter().any(|&v| v == 0 || v > ms.n)
        || !ms.graph().is_clique(context)
    {
        return Err(Error::NotAContext(context.to_vec()));
    }
    Ok(())
}

/// Per-vertex path operators for a run.
struct Realization {
    unitaries: BTreeMap<usize, DMatrix<f64>>,
}

impl Realization {
    fn new(
        ms: &MeasurementSet,
        context: &[usize],
        circuits: &[InterferometerCircuit],
        delta: f64,
        phis: &BTreeMap<usize, PhiBranch>,
    ) -> Result<Self> {
        let mut unitaries = BTreeMap::new();
        for &v in context {
            let circuit = circuits.get(v - 1).ok_or(Error::MissingCircuit(v))?;
            if circuit.dim != ms.dim {
                return Err(Error::DimensionMismatch {
                    expected: ms.dim,
                    found: circuit.dim,
                });
            }
            unitaries.insert(v, circuit.compose(delta, phis.get(&v).copied())?);
        }
        Ok(Realization { unitaries })
    }

    fn run(
        &self,
        ms: &MeasurementSet,
        context: &[usize],
        schedule: &DelaySchedule,
    ) -> Result<ContextRun> {
        let (last, intermediate) = context.split_last().expect("checked non-empty");
        let mut state = PhotonState::prepare(&ms.state, schedule.len());
        for &v in intermediate {
            let bit = schedule.bit_of(v).ok_or_else(|| {
                Error::InvalidSchedule(format!("no delay assigned to vertex {v}"))
            })?;
            let u = &self.unitaries[&v];
            state.apply_paths(u);
            state.controlled_delay(bit);
            state.apply_paths(&u.transpose());
        }
        state.apply_paths(&self.unitaries[last]);

        let mut bins = Vec::with_capacity(ms.dim << schedule.len());
        for path in 0..ms.dim {
            for mask in 0u32..1 << schedule.len() {
                bins.push(OutcomeBin {
                    path,
                    mask: schedule.vertices_in(mask),
                    delay: schedule.total_delay(mask),
                    prob: state.amplitude(path, mask).norm_sqr(),
                });
            }
        }
        let decoded = decode_bins(&bins, context);
        Ok(ContextRun {
            context: context.to_vec(),
            dim: ms.dim,
            schedule: schedule.clone(),
            outcome_distribution: bins,
            decoded,
        })
    }
}

/// Simulates one context: for every intermediate vertex `U_i`, a delay on the
/// uppermost path, then `U_i†`; finally the last vertex's `U`.
pub fn run_context(
    ms: &MeasurementSet,
    context: &[usize],
    circuits: &[InterferometerCircuit],
    delta: f64,
    phis: &BTreeMap<usize, PhiBranch>,
    schedule: &DelaySchedule,
) -> Result<ContextRun> {
    check_context(ms, context)?;
    if !schedule.subset_sums_unique() {
        return Err(Error::InvalidSchedule("delay sums are ambiguous".into()));
    }
    Realization::new(ms, context, circuits, delta, phis)?.run(ms, context, schedule)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderingMarginals {
    pub order: Vec<usize>,
    pub marginals: BTreeMap<usize, f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompatibilityReport {
    pub orderings: Vec<OrderingMarginals>,
    /// Largest total-variation distance between the Bernoulli marginals of one
    /// measurement under two orderings.
    pub max_tv_distance: f64,
}

/// Reruns the context under every ordering of its intermediate measurements.
pub fn compatibility_check(
    ms: &MeasurementSet,
    context: &[usize],
    circuits: &[InterferometerCircuit],
    delta: f64,
    phis: &BTreeMap<usize, PhiBranch>,
    schedule: &DelaySchedule,
    exec: Execution,
) -> Result<CompatibilityReport> {
    check_context(ms, context)?;
    let realization = Realization::new(ms, context, circuits, delta, phis)?;
    let (last, intermediate) = context.split_last().expect("checked non-empty");
    let orders: Vec<Vec<usize>> = intermediate
        .iter()
        .copied()
        .permutations(intermediate.len())
        .map(|mut p| {
            p.push(*last);
            p
        })
        .collect();
    let runs = exec::map(exec, &orders, |order| realization.run(ms, order, schedule))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let orderings: Vec<OrderingMarginals> = orders
        .into_iter()
        .zip(runs)
        .map(|(order, run)| OrderingMarginals {
            order,
            marginals: run.decoded.fired,
        })
        .collect();
    let mut max_tv: f64 = 0.0;
    for (a, b) in orderings.iter().tuple_combinations() {
        for &v in context {
            // TV distance of two Bernoulli laws is the gap of their means
            let gap = (a.marginals[&v] - b.marginals[&v]).abs();
            max_tv = max_tv.max(gap);
        }
    }
    Ok(CompatibilityReport {
        orderings,
        max_tv_distance: max_tv,
    })
}

/// `β = Σ_i ⟨X_i⟩`, each `⟨X_i⟩` averaged over the runs whose context holds `i`.
pub fn beta_from_runs(runs: &[ContextRun], n: usize) -> Result<f64> {
    let mut beta = 0.0;
    for v in 1..=n {
        let values: Vec<f64> = runs
            .iter()
            .filter(|r| r.context.contains(&v))
            .map(|r| r.decoded.marginal(v))
            .collect();
        if values.is_empty() {
            return Err(Error::UncoveredVertex(v));
        }
        beta += values.iter().sum::<f64>() / values.len() as f64;
    }
    Ok(beta)
}

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::sim::{classify, BinOutcome, ContextRun};
use crate::error::{Error, Result};

/// What one shot looks like after the detectors.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShotOutcome {
    Fired(usize),
    AllZero,
    Violation,
    NoClick,
    MultiClick,
}

impl ShotOutcome {
    pub fn label(self) -> String {
        match self {
            ShotOutcome::Fired(v) => format!("X_{v}=1"),
            ShotOutcome::AllZero => "all_zero".into(),
            ShotOutcome::Violation => "violation".into(),
            ShotOutcome::NoClick => "no_click".into(),
            ShotOutcome::MultiClick => "multi_click".into(),
        }
    }

    /// Single-click shots, kept after post-selection.
    pub fn is_detected(self) -> bool {
        !matches!(self, ShotOutcome::NoClick | ShotOutcome::MultiClick)
    }
}

impl From<BinOutcome> for ShotOutcome {
    fn from(b: BinOutcome) -> Self {
        match b {
            BinOutcome::Fired(v) => ShotOutcome::Fired(v),
            BinOutcome::AllZero => ShotOutcome::AllZero,
            BinOutcome::Violation => ShotOutcome::Violation,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct DetectorModel {
    /// Probability that the photon is lost before detection.
    pub loss: f64,
    /// Probability per shot of one spurious click in a uniformly random bin.
    pub dark: f64,
}

impl DetectorModel {
    pub fn ideal() -> Self {
        Self::default()
    }

    fn validate(&self) -> Result<()> {
        for (name, p) in [("loss", self.loss), ("dark", self.dark)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!(
                    "{name} probability {p} outside [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleCounts {
    pub context: Vec<usize>,
    pub shots: u64,
    pub counts: BTreeMap<ShotOutcome, u64>,
}

impl SampleCounts {
    pub fn count(&self, outcome: ShotOutcome) -> u64 {
        self.counts.get(&outcome).copied().unwrap_or(0)
    }

    pub fn detected(&self) -> u64 {
        self.counts
            .iter()
            .filter(|(o, _)| o.is_detected())
            .map(|(_, c)| c)
            .sum()
    }

    /// Post-selected frequency of `X_v = 1`.
    pub fn frequency(&self, vertex: usize) -> Option<f64> {
        let detected = self.detected();
        (detected > 0).then(|| self.count(ShotOutcome::Fired(vertex)) as f64 / detected as f64)
    }

    pub fn labelled(&self) -> BTreeMap<String, u64> {
        self.counts.iter().map(|(o, c)| (o.label(), *c)).collect()
    }
}

/// Draws `shots` detector events from the run's outcome distribution.
pub fn sample(
    run: &ContextRun,
    shots: u64,
    seed: u64,
    detector: DetectorModel,
) -> Result<SampleCounts> {
    detector.validate()?;
    let bins = &run.outcome_distribution;
    let weights: Vec<f64> = bins.iter().map(|b| b.prob.max(0.0)).collect();
    let index = WeightedIndex::new(&weights)
        .map_err(|e| Error::InvalidArgument(format!("outcome distribution: {e}")))?;
    let final_vertex = run.final_vertex();
    let outcome = |k: usize| ShotOutcome::from(classify(&bins[k], final_vertex));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let photon = if detector.loss > 0.0 && rng.random::<f64>() < detector.loss {
            None
        } else {
            Some(index.sample(&mut rng))
        };
        let dark = if detector.dark > 0.0 && rng.random::<f64>() < detector.dark {
            Some(rng.random_range(0..bins.len()))
        } else {
            None
        };
        let shot = match (photon, dark) {
            (None, None) => ShotOutcome::NoClick,
            (Some(k), None) | (None, Some(k)) => outcome(k),
            (Some(a), Some(b)) if a == b => outcome(a),
            (Some(_), Some(_)) => ShotOutcome::MultiClick,
        };
        *counts.entry(shot).or_insert(0) += 1;
    }
    Ok(SampleCounts {
        context: run.context.clone(),
        shots,
        counts,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledBeta {
    pub value: f64,
    pub std_error: f64,
}

/// `β` from sampled contexts. Each vertex gets weight `1 / (number of sampled
/// contexts holding it)`; per context the weighted click variable
/// `Y = w_i` when `X_i = 1` has its own sample variance, and contexts are
/// independent.
pub fn sampled_beta(samples: &[SampleCounts], n: usize) -> Result<SampledBeta> {
    let mut k = vec![0usize; n + 1];
    for s in samples {
        for &v in &s.context {
            k[v] += 1;
        }
    }
    if let Some(v) = (1..=n).find(|&v| k[v] == 0) {
        return Err(Error::UncoveredVertex(v));
    }
    let mut value = 0.0;
    let mut variance = 0.0;
    for s in samples {
        let detected = s.detected();
        if detected == 0 {
            return Err(Error::InvalidArgument(format!(
                "context {:?} has no detected shots",
                s.context
            )));
        }
        let m = detected as f64;
        let (mut mean, mut second) = (0.0, 0.0);
        for &v in &s.context {
            let w = 1.0 / k[v] as f64;
            let p = s.count(ShotOutcome::Fired(v)) as f64 / m;
            mean += w * p;
            second += w * w * p;
        }
        value += mean;
        if detected > 1 {
            let var = (second - mean * mean) * m / (m - 1.0);
            variance += var.max(0.0) / m;
        }
    }
    Ok(SampledBeta {
        value,
        std_error: variance.sqrt(),
    })
}

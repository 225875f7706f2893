//! Path/time-delay photonic simulation of sequential compatible measurements
//! on a single photon.

mod sampling;
mod schedule;
mod sim;

use std::collections::BTreeMap;

use serde_json::{json, Value};

pub use sampling::{sample, sampled_beta, DetectorModel, SampleCounts, SampledBeta, ShotOutcome};
pub use schedule::{make_schedule, DelaySchedule};
pub use sim::{
    beta_from_runs, classify, compatibility_check, decode, run_context, BinOutcome,
    CompatibilityReport, ContextRun, DecodedDistribution, OrderingMarginals, OutcomeBin,
    PhotonState,
};

impl DecodedDistribution {
    pub fn to_json(&self) -> Value {
        let mut map = serde_json::Map::new();
        for (v, p) in &self.fired {
            map.insert(format!("X_{v}=1"), json!(p));
        }
        map.insert("all_zero".into(), json!(self.all_zero));
        map.insert("violation".into(), json!(self.violation));
        Value::Object(map)
    }
}

impl ContextRun {
    pub fn to_json(&self) -> Value {
        let distribution: Vec<Value> = self
            .outcome_distribution
            .iter()
            .map(|b| json!({ "path": b.path, "mask": b.mask, "delay": b.delay, "prob": b.prob }))
            .collect();
        json!({
            "context": self.context,
            "distribution": distribution,
            "decoded": self.decoded.to_json(),
        })
    }
}

impl SampleCounts {
    pub fn to_json(&self) -> Value {
        let counts: BTreeMap<String, u64> = self.labelled();
        json!({ "context": self.context, "shots": self.shots, "counts": counts })
    }
}

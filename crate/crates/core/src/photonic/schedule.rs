use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Time delays tagging the intermediate measurements of a context.
///
/// Valid schedules have positive delays, none of which equals the sum of any
/// subset of the others.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DelaySchedule {
    /// `(vertex, Δt)` pairs; the position in this list is the vertex's bit in
    /// the delay mask.
    assignments: Vec<(usize, u64)>,
}

impl DelaySchedule {
    pub fn new(assignments: Vec<(usize, u64)>) -> Result<Self> {
        if assignments.len() > 20 {
            return Err(Error::InvalidSchedule(
                "at most 20 delays are supported".into(),
            ));
        }
        for (k, &(v, t)) in assignments.iter().enumerate() {
            if t == 0 {
                return Err(Error::InvalidSchedule(format!(
                    "delay of vertex {v} is zero"
                )));
            }
            if assignments[..k].iter().any(|&(w, _)| w == v) {
                return Err(Error::InvalidSchedule(format!("vertex {v} assigned twice")));
            }
        }
        let delays: Vec<u64> = assignments.iter().map(|&(_, t)| t).collect();
        for (i, &t) in delays.iter().enumerate() {
            let others: Vec<u64> = delays
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &x)| x)
                .collect();
            for subset in 1u32..1 << others.len() {
                let sum: u64 = (0..others.len())
                    .filter(|&b| subset >> b & 1 == 1)
                    .map(|b| others[b])
                    .sum();
                if sum == t {
                    return Err(Error::InvalidSchedule(format!(
                        "delay {t} of vertex {} is a sum of other delays",
                        assignments[i].0
                    )));
                }
            }
        }
        Ok(DelaySchedule { assignments })
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn assignments(&self) -> &[(usize, u64)] {
        &self.assignments
    }

    pub fn bit_of(&self, vertex: usize) -> Option<usize> {
        self.assignments.iter().position(|&(v, _)| v == vertex)
    }

    pub fn vertex_of_bit(&self, bit: usize) -> usize {
        self.assignments[bit].0
    }

    /// Vertices whose bits are set in `mask`.
    pub fn vertices_in(&self, mask: u32) -> Vec<usize> {
        (0..self.len())
            .filter(|&b| mask >> b & 1 == 1)
            .map(|b| self.assignments[b].0)
            .collect()
    }

    /// Total delay accumulated by a photon carrying `mask`.
    pub fn total_delay(&self, mask: u32) -> u64 {
        (0..self.len())
            .filter(|&b| mask >> b & 1 == 1)
            .map(|b| self.assignments[b].1)
            .sum()
    }

    /// Whether distinct masks always give distinct total delays, so the
    /// arrival time alone identifies the fired measurements.
    pub fn subset_sums_unique(&self) -> bool {
        let mut sums: Vec<u64> = (0u32..1 << self.len())
            .map(|m| self.total_delay(m))
            .collect();
        sums.sort_unstable();
        sums.windows(2).all(|w| w[0] != w[1])
    }
}

/// Powers of two for every vertex of `context` but the last.
pub fn make_schedule(context: &[usize]) -> Result<DelaySchedule> {
    if context.len() < 2 {
        return Err(Error::InvalidSchedule(
            "a context needs at least two measurements".into(),
        ));
    }
    DelaySchedule::new(
        context[..context.len() - 1]
            .iter()
            .enumerate()
            .map(|(k, &v)| (v, 1u64 << k))
            .collect(),
    )
}

//! Exclusivity graphs: the pentagon, the `N >= 5` extension family, their
//! contexts (maximal cliques) and independence numbers.
//!
//! Vertices are labelled `1..=n` in every public API. Internally adjacency is
//! stored as one `u64` bitmask per vertex, bit `v - 1` standing for vertex `v`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest vertex count representable by the bitmask adjacency.
pub const MAX_VERTICES: usize = 64;

/// Exact independence-number search is limited to this many vertices.
pub const INDEPENDENCE_BUDGET: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExclusivityGraph {
    n: usize,
    adj: Vec<u64>,
}

/// Wire form: `{"n": int, "edges": [[i, j], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

#[inline]
fn bit(v: usize) -> u64 {
    1u64 << (v - 1)
}

fn vertices_of(mut mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    while mask != 0 {
        let b = mask.trailing_zeros() as usize;
        out.push(b + 1);
        mask &= mask - 1;
    }
    out
}

impl ExclusivityGraph {
    /// Graph without edges.
    pub fn empty(n: usize) -> Result<Self> {
        if n > MAX_VERTICES {
            return Err(Error::GraphTooLarge {
                n,
                max: MAX_VERTICES,
            });
        }
        Ok(ExclusivityGraph { n, adj: vec![0; n] })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for &(i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for i in 1..=n {
            for j in i + 1..=n {
                g.add_edge(i, j)?;
            }
        }
        Ok(g)
    }

    fn add_edge(&mut self, i: usize, j: usize) -> Result<()> {
        if i == j || i == 0 || j == 0 || i > self.n || j > self.n {
            return Err(Error::InvalidEdge(i, j));
        }
        self.adj[i - 1] |= bit(j);
        self.adj[j - 1] |= bit(i);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parity(&self) -> Parity {
        if self.n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        i != j && i >= 1 && i <= self.n && j >= 1 && j <= self.n && self.adj[i - 1] & bit(j) != 0
    }

    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        vertices_of(self.adj[v - 1])
    }

    /// Edges as `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 1..=self.n {
            for j in vertices_of(self.adj[i - 1]) {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().all(|&v| v >= 1 && v <= self.n)
            && vertices
                .iter()
                .enumerate()
                .all(|(k, &a)| vertices[k + 1..].iter().all(|&b| self.adjacent(a, b)))
    }

    pub fn full_mask(&self) -> u64 {
        if self.n == 64 {
            u64::MAX
        } else {
            (1u64 << self.n) - 1
        }
    }

    pub(crate) fn adjacency_mask(&self, v: usize) -> u64 {
        self.adj[v - 1]
    }

    pub fn to_record(&self) -> GraphRecord {
        GraphRecord {
            n: self.n,
            edges: self.edges().into_iter().map(|(i, j)| [i, j]).collect(),
        }
    }

    pub fn from_record(record: &GraphRecord) -> Result<Self> {
        let edges: Vec<(usize, usize)> = record.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::from_edges(record.n, &edges)
    }
}

/// The two cliques of the extension family, `(V_A, V_B)`.
pub fn family_cliques(n: usize) -> (Vec<usize>, Vec<usize>) {
    if n % 2 == 1 {
        let mid = n.div_ceil(2);
        ((2..=mid).collect(), (mid + 1..=n).collect())
    } else {
        let mid = n / 2 + 1;
        ((2..=mid).collect(), (mid..=n).collect())
    }
}

/// The pentagon for `n = 5`, the extension-family graph otherwise.
pub fn build_graph(n: usize) -> Result<ExclusivityGraph> {
    if n < 5 {
        return Err(Error::GraphTooSmall(n));
    }
    if n == 5 {
        return ExclusivityGraph::from_edges(5, &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)]);
    }
    let mut g = ExclusivityGraph::empty(n)?;
    let (va, vb) = family_cliques(n);
    for part in [&va, &vb] {
        for (k, &a) in part.iter().enumerate() {
            for &b in &part[k + 1..] {
                g.add_edge(a, b)?;
            }
        }
    }
    g.add_edge(2, n)?;
    for v in 3..n {
        g.add_edge(1, v)?;
    }
    Ok(g)
}

/// Maximal cliques of an exclusivity graph and the number of contexts each
/// vertex belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextSet {
    pub n: usize,
    /// Each context sorted ascending; the list is sorted lexicographically.
    pub contexts: Vec<Vec<usize>>,
    /// `multiplicities[v - 1]` is `k_v`.
    pub multiplicities: Vec<usize>,
}

impl ContextSet {
    pub fn k(&self, v: usize) -> usize {
        self.multiplicities[v - 1]
    }

    pub fn contexts_containing(&self, v: usize) -> impl Iterator<Item = &Vec<usize>> {
        self.contexts.iter().filter(move |c| c.contains(&v))
    }

    pub fn contains_context(&self, vertices: &[usize]) -> bool {
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        self.contexts.contains(&sorted)
    }
}

/// Bron–Kerbosch with Tomita pivoting over bitmasks.
fn bron_kerbosch(g: &ExclusivityGraph, r: u64, mut p: u64, mut x: u64, out: &mut Vec<u64>) {
    if p == 0 && x == 0 {
        out.push(r);
        return;
    }
    let pivot = vertices_of(p | x)
        .into_iter()
        .max_by_key(|&u| (p & g.adjacency_mask(u)).count_ones())
        .expect("p | x is non-empty");
    for v in vertices_of(p & !g.adjacency_mask(pivot)) {
        let nv = g.adjacency_mask(v);
        bron_kerbosch(g, r | bit(v), p & nv, x & nv, out);
        p &= !bit(v);
        x |= bit(v);
    }
}

pub fn enumerate_contexts(g: &ExclusivityGraph) -> ContextSet {
    let mut masks = Vec::new();
    if g.n() > 0 {
        bron_kerbosch(g, 0, g.full_mask(), 0, &mut masks);
    }
    let mut contexts: Vec<Vec<usize>> = masks.into_iter().map(vertices_of).collect();
    contexts.sort();
    let mut multiplicities = vec![0; g.n()];
    for c in &contexts {
        for &v in c {
            multiplicities[v - 1] += 1;
        }
    }
    ContextSet {
        n: g.n(),
        contexts,
        multiplicities,
    }
}

fn max_independent(g: &ExclusivityGraph, candidates: u64, size: usize, best: &mut usize) {
    if candidates == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + candidates.count_ones() as usize <= *best {
        return;
    }
    let v = candidates.trailing_zeros() as usize + 1;
    // take v
    max_independent(
        g,
        candidates & !bit(v) & !g.adjacency_mask(v),
        size + 1,
        best,
    );
    // skip v
    max_independent(g, candidates & !bit(v), size, best);
}

/// Exact size of a maximum independent set (the classical bound).
pub fn independence_number(g: &ExclusivityGraph) -> Result<usize> {
    if g.n() > INDEPENDENCE_BUDGET {
        return Err(Error::GraphTooLarge {
            n: g.n(),
            max: INDEPENDENCE_BUDGET,
        });
    }
    let mut best = 0;
    max_independent(g, g.full_mask(), 0, &mut best);
    Ok(best)
}

/// `Σ_i (k_i − 1)`, the weight of the precision penalty.
pub fn ofnc_penalty_denominator(cs: &ContextSet) -> usize {
    cs.multiplicities.iter().map(|&k| k.saturating_sub(1)).sum()
}

//! Packings: edge-disjoint cycles (plus a perfect matching on odd hosts)
//! inside a host. The leave is always derived, never stored.

use crate::error::{Error, Result};
use crate::model::cycle::Cycle;
use crate::model::host::{BitIter, Edge, HostGraph, PairSet, Vertex};
use std::collections::BTreeSet;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Packing {
    host: Arc<HostGraph>,
    cycles: Vec<Cycle>,
    matching: Option<BTreeSet<Edge>>,
    used: PairSet,
}

impl Packing {
    /// An empty packing; fails if the host is odd and no matching can make
    /// sense yet (odd hosts still start empty of cycles but must carry a
    /// perfect matching, so use [`Packing::new`] for those).
    pub fn empty(host: Arc<HostGraph>) -> Result<Self> {
        Packing::new(host, Vec::new(), None)
    }

    pub fn new(
        host: Arc<HostGraph>,
        cycles: Vec<Cycle>,
        matching: Option<BTreeSet<Edge>>,
    ) -> Result<Self> {
        let odd = host.is_odd_graph();
        if odd && matching.is_none() {
            return Err(Error::InvalidPacking(
                "odd host requires a perfect matching".into(),
            ));
        }
        if !odd && matching.is_some() {
            return Err(Error::InvalidPacking(
                "matching only allowed on odd hosts".into(),
            ));
        }
        let mut used = PairSet::new(host.num_vertices());
        for c in &cycles {
            c.check_in_host(&host)?;
            for e in c.edges() {
                if !used.insert_ids(host.id(e.0), host.id(e.1)) {
                    return Err(Error::InvalidPacking(format!("edge {e} used twice")));
                }
            }
        }
        if let Some(m) = &matching {
            let mut covered = vec![false; host.num_vertices()];
            for e in m {
                if !host.adjacent(e.0, e.1) {
                    return Err(Error::InvalidPacking(format!("{e} is not a host edge")));
                }
                if !used.insert_ids(host.id(e.0), host.id(e.1)) {
                    return Err(Error::InvalidPacking(format!("edge {e} used twice")));
                }
                for v in [e.0, e.1] {
                    let id = host.id(v);
                    if covered[id] {
                        return Err(Error::InvalidPacking(format!("{v} matched twice")));
                    }
                    covered[id] = true;
                }
            }
            if covered.iter().any(|&c| !c) {
                return Err(Error::InvalidPacking("matching is not perfect".into()));
            }
        }
        Ok(Packing {
            host,
            cycles,
            matching,
            used,
        })
    }

    pub fn host(&self) -> &Arc<HostGraph> {
        &self.host
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn matching(&self) -> Option<&BTreeSet<Edge>> {
        self.matching.as_ref()
    }

    /// Non-decreasing multiset of cycle lengths.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.cycles.iter().map(|c| c.len()).collect();
        lens.sort_unstable();
        lens
    }

    pub fn covered_edge_count(&self) -> usize {
        self.used.len()
    }

    pub fn is_decomposition(&self) -> bool {
        self.used.len() == self.host.edge_count()
    }

    pub fn uses_edge(&self, e: Edge) -> bool {
        self.used.contains_ids(self.host.id(e.0), self.host.id(e.1))
    }

    /// Extends the packing by extra cycles taken from the current leave.
    pub fn with_cycles(&self, extra: impl IntoIterator<Item = Cycle>) -> Result<Packing> {
        let mut cycles = self.cycles.clone();
        cycles.extend(extra);
        Packing::new(self.host.clone(), cycles, self.matching.clone())
    }

    /// Removes the cycle at `idx`, returning it to the leave.
    pub fn without_cycle(&self, idx: usize) -> Result<(Packing, Cycle)> {
        let mut cycles = self.cycles.clone();
        let removed = cycles.remove(idx);
        Ok((
            Packing::new(self.host.clone(), cycles, self.matching.clone())?,
            removed,
        ))
    }

    /// Replaces the full cycle list (used by the switch engine, which
    /// rewrites cycles wholesale).
    pub fn with_replaced(
        &self,
        cycles: Vec<Cycle>,
        matching: Option<BTreeSet<Edge>>,
    ) -> Result<Packing> {
        Packing::new(self.host.clone(), cycles, matching)
    }

    /// The leave as an explicit even graph.
    pub fn leave(&self) -> LeaveGraph {
        let n = self.host.num_vertices();
        let words = self.host.words();
        let mut rows = vec![0u64; n * words.max(1)];
        // start from host adjacency, clear used pairs
        for x in 0..n {
            for y in BitIter::new(self.host.row_words(x)) {
                if y > x && !self.used.contains_ids(x, y) {
                    rows[x * words + y / 64] |= 1 << (y % 64);
                    rows[y * words + x / 64] |= 1 << (x % 64);
                }
            }
        }
        let degrees: Vec<usize> = (0..n)
            .map(|v| {
                rows[v * words..(v + 1) * words]
                    .iter()
                    .map(|w| w.count_ones() as usize)
                    .sum()
            })
            .collect();
        LeaveGraph {
            host: self.host.clone(),
            words,
            rows,
            degrees,
        }
    }
}

/// The leave of a packing: a spanning even subgraph of the host.
#[derive(Debug, Clone)]
pub struct LeaveGraph {
    host: Arc<HostGraph>,
    words: usize,
    rows: Vec<u64>,
    degrees: Vec<usize>,
}

impl LeaveGraph {
    pub fn host(&self) -> &Arc<HostGraph> {
        &self.host
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.degrees[self.host.id(v)]
    }

    pub fn degree_id(&self, id: usize) -> usize {
        self.degrees[id]
    }

    pub fn contains_edge(&self, e: Edge) -> bool {
        let x = self.host.id(e.0);
        let y = self.host.id(e.1);
        self.rows[x * self.words + y / 64] >> (y % 64) & 1 == 1
    }

    pub fn neighbors(&self, v: Vertex) -> Vec<Vertex> {
        let i = self.host.id(v);
        BitIter::new(&self.rows[i * self.words..(i + 1) * self.words])
            .map(|id| self.host.vertex(id))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.degrees.iter().sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<Edge> {
        let n = self.host.num_vertices();
        let mut out = Vec::new();
        for x in 0..n {
            for y in BitIter::new(&self.rows[x * self.words..(x + 1) * self.words]) {
                if y > x {
                    out.push(Edge::new(self.host.vertex(x), self.host.vertex(y)));
                }
            }
        }
        out
    }

    /// Vertices of positive leave degree.
    pub fn support(&self) -> Vec<Vertex> {
        (0..self.host.num_vertices())
            .filter(|&id| self.degrees[id] > 0)
            .map(|id| self.host.vertex(id))
            .collect()
    }

    pub fn is_even(&self) -> bool {
        self.degrees.iter().all(|d| d % 2 == 0)
    }

    /// Connected components of the support, as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let n = self.host.num_vertices();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] || self.degrees[start] == 0 {
                continue;
            }
            let mut stack = vec![start];
            let mut comp = Vec::new();
            seen[start] = true;
            while let Some(x) = stack.pop() {
                comp.push(x);
                for y in BitIter::new(&self.rows[x * self.words..(x + 1) * self.words]) {
                    if !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp.into_iter().map(|id| self.host.vertex(id)).collect());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(p: usize, i: usize) -> Vertex {
        Vertex::new(p, i)
    }

    fn cyc(vs: &[(usize, usize)]) -> Cycle {
        Cycle::new(vs.iter().map(|&(p, i)| v(p, i)).collect()).unwrap()
    }

    #[test]
    fn leave_of_single_cycle_in_k44() {
        let host = Arc::new(HostGraph::bipartite(4, 4).unwrap());
        let p = Packing::new(
            host,
            vec![cyc(&[(0, 0), (1, 0), (0, 1), (1, 1)])],
            None,
        )
        .unwrap();
        let leave = p.leave();
        assert_eq!(leave.edge_count(), 12);
        assert!(leave.is_even());
    }

    #[test]
    fn full_k44_tiling_has_empty_leave() {
        let host = Arc::new(HostGraph::bipartite(4, 4).unwrap());
        let p = Packing::new(
            host,
            vec![
                cyc(&[(0, 0), (1, 0), (0, 1), (1, 1)]),
                cyc(&[(0, 0), (1, 2), (0, 1), (1, 3)]),
                cyc(&[(0, 2), (1, 0), (0, 3), (1, 1)]),
                cyc(&[(0, 2), (1, 2), (0, 3), (1, 3)]),
            ],
            None,
        )
        .unwrap();
        assert!(p.is_decomposition());
        assert_eq!(p.leave().edge_count(), 0);
        assert_eq!(p.cycle_lengths(), vec![4, 4, 4, 4]);
    }

    #[test]
    fn edge_reuse_rejected() {
        let host = Arc::new(HostGraph::bipartite(4, 4).unwrap());
        let err = Packing::new(
            host,
            vec![
                cyc(&[(0, 0), (1, 0), (0, 1), (1, 1)]),
                cyc(&[(0, 0), (1, 0), (0, 2), (1, 2)]),
            ],
            None,
        );
        assert!(err.is_err());
    }

    #[test]
    fn odd_host_needs_perfect_matching() {
        let host = Arc::new(HostGraph::bipartite(5, 5).unwrap());
        assert!(Packing::new(host.clone(), vec![], None).is_err());
        let diag: BTreeSet<Edge> = host.diagonal_matching().into_iter().collect();
        let p = Packing::new(host.clone(), vec![], Some(diag)).unwrap();
        assert!(p.leave().is_even());
        assert_eq!(p.leave().edge_count(), 20);
    }

    #[test]
    fn non_host_cycle_rejected() {
        let host = Arc::new(HostGraph::bipartite_minus_matching(5).unwrap());
        // uses the removed diagonal edge p0.0-p1.0
        let err = Packing::new(host, vec![cyc(&[(0, 0), (1, 0), (0, 1), (1, 1)])], None);
        assert!(err.is_err());
    }
}

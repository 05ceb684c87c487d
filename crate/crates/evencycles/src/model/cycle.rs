//! Cycles in canonical form.

use crate::error::{Error, Result};
use crate::model::host::{Edge, HostGraph, Vertex};
use std::fmt;

/// A simple cycle stored as a cyclic vertex sequence in canonical form:
/// rotated so the least vertex comes first, then oriented so the second
/// vertex is the smaller of the first vertex's two neighbours.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cycle {
    vertices: Vec<Vertex>,
}

impl Cycle {
    pub fn new(vertices: Vec<Vertex>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::InvalidCycle(format!(
                "length {} below 3",
                vertices.len()
            )));
        }
        let mut sorted = vertices.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != vertices.len() {
            return Err(Error::InvalidCycle("repeated vertex".into()));
        }
        Ok(Cycle {
            vertices: canonical_rotation(&vertices),
        })
    }

    /// Validates adjacency of consecutive vertices against a host.
    pub fn check_in_host(&self, host: &HostGraph) -> Result<()> {
        for v in &self.vertices {
            if !host.contains_vertex(*v) {
                return Err(Error::InvalidCycle(format!("vertex {v} outside host")));
            }
        }
        for i in 0..self.vertices.len() {
            let x = self.vertices[i];
            let y = self.vertices[(i + 1) % self.vertices.len()];
            if !host.adjacent(x, y) {
                return Err(Error::InvalidCycle(format!("{x}-{y} is not a host edge")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        (0..self.vertices.len()).map(move |i| {
            Edge::new(
                self.vertices[i],
                self.vertices[(i + 1) % self.vertices.len()],
            )
        })
    }

    /// Position of `v` in the stored sequence.
    pub fn position(&self, v: Vertex) -> Option<usize> {
        self.vertices.iter().position(|&x| x == v)
    }

    /// The two cyclic neighbours of `v`.
    pub fn neighbors_of(&self, v: Vertex) -> Option<(Vertex, Vertex)> {
        let i = self.position(v)?;
        let n = self.vertices.len();
        Some((self.vertices[(i + n - 1) % n], self.vertices[(i + 1) % n]))
    }

    /// Applies the transposition (a b) to every vertex.
    pub fn transpose(&self, a: Vertex, b: Vertex) -> Cycle {
        let vertices: Vec<Vertex> = self
            .vertices
            .iter()
            .map(|&v| {
                if v == a {
                    b
                } else if v == b {
                    a
                } else {
                    v
                }
            })
            .collect();
        Cycle {
            vertices: canonical_rotation(&vertices),
        }
    }

    /// Rotates the stored sequence so that `v` comes first, keeping the
    /// stored orientation.
    pub fn rotated_to(&self, v: Vertex) -> Vec<Vertex> {
        let i = self.position(v).expect("vertex not on cycle");
        let mut out = Vec::with_capacity(self.vertices.len());
        out.extend_from_slice(&self.vertices[i..]);
        out.extend_from_slice(&self.vertices[..i]);
        out
    }
}

impl fmt::Display for Cycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.vertices {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

fn canonical_rotation(vertices: &[Vertex]) -> Vec<Vertex> {
    let n = vertices.len();
    let start = (0..n).min_by_key(|&i| vertices[i]).unwrap();
    let next = vertices[(start + 1) % n];
    let prev = vertices[(start + n - 1) % n];
    let mut out = Vec::with_capacity(n);
    if next <= prev {
        for k in 0..n {
            out.push(vertices[(start + k) % n]);
        }
    } else {
        for k in 0..n {
            out.push(vertices[(start + n - k) % n]);
        }
    }
    out
}

/// Traces the single cycle formed by `edges`; fails if they are not one
/// simple closed cycle.
pub fn trace_cycle(edges: &[Edge]) -> Result<Cycle> {
    use std::collections::BTreeMap;
    if edges.len() < 3 {
        return Err(Error::InvalidCycle("too few edges to trace".into()));
    }
    let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for e in edges {
        adj.entry(e.0).or_default().push(e.1);
        adj.entry(e.1).or_default().push(e.0);
    }
    for (v, ns) in &adj {
        if ns.len() != 2 {
            return Err(Error::InvalidCycle(format!("degree {} at {v}", ns.len())));
        }
    }
    let start = *adj.keys().next().unwrap();
    let mut seq = vec![start];
    let mut prev = start;
    let mut cur = adj[&start][0];
    while cur != start {
        seq.push(cur);
        let ns = &adj[&cur];
        let next = if ns[0] == prev { ns[1] } else { ns[0] };
        prev = cur;
        cur = next;
    }
    if seq.len() != edges.len() {
        return Err(Error::InvalidCycle("edges form more than one cycle".into()));
    }
    Cycle::new(seq)
}

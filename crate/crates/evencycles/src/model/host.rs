//! Host-graph families: vertices, edges, adjacency.
//!
//! A host is one of the four edge-set families we decompose. Adjacency is
//! defined by the family's rule; a per-vertex neighbour bitset is cached at
//! construction since switch tracing queries adjacency in hot loops.

use crate::error::{Error, Result};
use std::fmt;
use std::str::FromStr;

/// A vertex `p<part>.<index>`, ordered by `(part, index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Vertex {
    pub part: u16,
    pub index: u16,
}

impl Vertex {
    pub fn new(part: usize, index: usize) -> Self {
        Vertex {
            part: part as u16,
            index: index as u16,
        }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}.{}", self.part, self.index)
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rest = s
            .strip_prefix('p')
            .ok_or_else(|| Error::Parse(format!("bad vertex token `{s}`")))?;
        let (part, index) = rest
            .split_once('.')
            .ok_or_else(|| Error::Parse(format!("bad vertex token `{s}`")))?;
        let part: u16 = part
            .parse()
            .map_err(|_| Error::Parse(format!("bad vertex token `{s}`")))?;
        let index: u16 = index
            .parse()
            .map_err(|_| Error::Parse(format!("bad vertex token `{s}`")))?;
        Ok(Vertex { part, index })
    }
}

/// Unordered vertex pair, stored with the smaller endpoint first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge(pub Vertex, pub Vertex);

impl Edge {
    pub fn new(x: Vertex, y: Vertex) -> Self {
        assert_ne!(x, y, "edge endpoints must differ");
        if x < y {
            Edge(x, y)
        } else {
            Edge(y, x)
        }
    }

    pub fn other(&self, v: Vertex) -> Vertex {
        if self.0 == v {
            self.1
        } else {
            self.0
        }
    }

    pub fn touches(&self, v: Vertex) -> bool {
        self.0 == v || self.1 == v
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

/// The four host families.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum HostKind {
    /// Complete bipartite graph with parts of size `a` and `b`.
    Bipartite { a: usize, b: usize },
    /// Complete bipartite graph minus the canonical perfect matching
    /// `{(p0.i, p1.i)}`.
    BipartiteMinusMatching { a: usize },
    /// Complete graph on `v` vertices minus a clique on the `u` hole
    /// vertices. Hole vertices form part 0, the rest part 1.
    CompleteMinusClique { v: usize, u: usize },
    /// Complete multipartite graph: all cross-part pairs.
    Multipartite { sizes: Vec<usize> },
}

/// A host graph with cached adjacency bitsets.
#[derive(Debug, Clone)]
pub struct HostGraph {
    kind: HostKind,
    part_sizes: Vec<usize>,
    offsets: Vec<usize>,
    n: usize,
    words: usize,
    /// Row-major neighbour bitsets, `words` u64 words per vertex.
    rows: Vec<u64>,
    edge_count: usize,
}

impl PartialEq for HostGraph {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind
    }
}
impl Eq for HostGraph {}

impl HostGraph {
    pub fn new(kind: HostKind) -> Result<Self> {
        let part_sizes: Vec<usize> = match &kind {
            HostKind::Bipartite { a, b } => {
                if *a == 0 || *b == 0 {
                    return Err(Error::InvalidParameters("part sizes must be positive".into()));
                }
                vec![*a, *b]
            }
            HostKind::BipartiteMinusMatching { a } => {
                if *a < 2 {
                    return Err(Error::InvalidParameters(
                        "matching removal needs part size at least 2".into(),
                    ));
                }
                vec![*a, *a]
            }
            HostKind::CompleteMinusClique { v, u } => {
                if *u == 0 || *v == 0 {
                    return Err(Error::InvalidParameters("orders must be positive".into()));
                }
                if u > v {
                    return Err(Error::InvalidParameters(format!(
                        "hole size {u} exceeds order {v}"
                    )));
                }
                if u == v {
                    return Err(Error::InvalidParameters("hole equals the whole graph".into()));
                }
                vec![*u, *v - *u]
            }
            HostKind::Multipartite { sizes } => {
                if sizes.is_empty() || sizes.iter().any(|&s| s == 0) {
                    return Err(Error::InvalidParameters("part sizes must be positive".into()));
                }
                sizes.clone()
            }
        };
        let mut offsets = Vec::with_capacity(part_sizes.len() + 1);
        let mut acc = 0usize;
        for &s in &part_sizes {
            offsets.push(acc);
            acc += s;
        }
        offsets.push(acc);
        let n = acc;
        if n > 4096 {
            return Err(Error::InvalidParameters(format!("host too large: {n} vertices")));
        }
        let words = n.div_ceil(64);
        let mut host = HostGraph {
            kind,
            part_sizes,
            offsets,
            n,
            words,
            rows: vec![0u64; n * words.max(1)],
            edge_count: 0,
        };
        let mut edge_count = 0usize;
        for x in 0..n {
            for y in (x + 1)..n {
                if host.adjacent_raw(x, y) {
                    host.rows[x * words + y / 64] |= 1 << (y % 64);
                    host.rows[y * words + x / 64] |= 1 << (x % 64);
                    edge_count += 1;
                }
            }
        }
        host.edge_count = edge_count;
        Ok(host)
    }

    pub fn bipartite(a: usize, b: usize) -> Result<Self> {
        HostGraph::new(HostKind::Bipartite { a, b })
    }

    pub fn bipartite_minus_matching(a: usize) -> Result<Self> {
        HostGraph::new(HostKind::BipartiteMinusMatching { a })
    }

    pub fn complete_minus_clique(v: usize, u: usize) -> Result<Self> {
        HostGraph::new(HostKind::CompleteMinusClique { v, u })
    }

    pub fn multipartite(sizes: Vec<usize>) -> Result<Self> {
        HostGraph::new(HostKind::Multipartite { sizes })
    }

    /// Complete graph on `n` vertices, modelled as a hole of size 1.
    pub fn complete(n: usize) -> Result<Self> {
        HostGraph::new(HostKind::CompleteMinusClique { v: n, u: 1 })
    }

    pub fn kind(&self) -> &HostKind {
        &self.kind
    }

    pub fn num_parts(&self) -> usize {
        self.part_sizes.len()
    }

    pub fn part_size(&self, part: usize) -> usize {
        self.part_sizes[part]
    }

    pub fn part_sizes(&self) -> &[usize] {
        &self.part_sizes
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub(crate) fn words(&self) -> usize {
        self.words
    }

    pub(crate) fn row_words(&self, id: usize) -> &[u64] {
        &self.rows[id * self.words..(id + 1) * self.words]
    }

    /// Dense id of a vertex, in `(part, index)` order.
    pub fn id(&self, v: Vertex) -> usize {
        debug_assert!((v.index as usize) < self.part_sizes[v.part as usize]);
        self.offsets[v.part as usize] + v.index as usize
    }

    pub fn vertex(&self, id: usize) -> Vertex {
        let part = self.offsets[1..].partition_point(|&o| o <= id);
        Vertex::new(part, id - self.offsets[part])
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        (v.part as usize) < self.part_sizes.len()
            && (v.index as usize) < self.part_sizes[v.part as usize]
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.n).map(|id| self.vertex(id))
    }

    fn adjacent_raw(&self, x: usize, y: usize) -> bool {
        if x == y {
            return false;
        }
        let vx = self.vertex(x);
        let vy = self.vertex(y);
        match &self.kind {
            HostKind::Bipartite { .. } | HostKind::Multipartite { .. } => vx.part != vy.part,
            HostKind::BipartiteMinusMatching { .. } => {
                vx.part != vy.part && vx.index != vy.index
            }
            HostKind::CompleteMinusClique { .. } => !(vx.part == 0 && vy.part == 0),
        }
    }

    pub fn adjacent(&self, x: Vertex, y: Vertex) -> bool {
        if x == y {
            return false;
        }
        let ix = self.id(x);
        let iy = self.id(y);
        self.rows[ix * self.words + iy / 64] >> (iy % 64) & 1 == 1
    }

    pub fn degree(&self, v: Vertex) -> usize {
        let i = self.id(v);
        self.rows[i * self.words..(i + 1) * self.words]
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum()
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        let i = self.id(v);
        BitIter::new(&self.rows[i * self.words..(i + 1) * self.words]).map(|id| self.vertex(id))
    }

    /// True when `Nbd(x) = Nbd(y)` as sets of vertices.
    pub fn same_neighborhood(&self, x: Vertex, y: Vertex) -> bool {
        let ix = self.id(x);
        let iy = self.id(y);
        self.rows[ix * self.words..(ix + 1) * self.words]
            == self.rows[iy * self.words..(iy + 1) * self.words]
    }

    /// Every vertex has odd degree.
    pub fn is_odd_graph(&self) -> bool {
        self.vertices().all(|v| self.degree(v) % 2 == 1)
    }

    /// Every vertex has even degree.
    pub fn is_even_graph(&self) -> bool {
        self.vertices().all(|v| self.degree(v) % 2 == 0)
    }

    /// All host edges in canonical `(Edge)` order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::with_capacity(self.edge_count);
        for x in 0..self.n {
            for y in (x + 1)..self.n {
                if self.rows[x * self.words + y / 64] >> (y % 64) & 1 == 1 {
                    out.push(Edge::new(self.vertex(x), self.vertex(y)));
                }
            }
        }
        out
    }

    /// Canonical removed matching for `BipartiteMinusMatching`, canonical
    /// diagonal for odd `Bipartite(a,a)` callers that want one.
    pub fn diagonal_matching(&self) -> Vec<Edge> {
        let a = self.part_sizes[0];
        (0..a)
            .map(|i| Edge::new(Vertex::new(0, i), Vertex::new(1, i)))
            .collect()
    }
}

/// Iterator over set bit positions of a bitset slice.
pub(crate) struct BitIter<'a> {
    words: &'a [u64],
    word_idx: usize,
    cur: u64,
}

impl<'a> BitIter<'a> {
    pub(crate) fn new(words: &'a [u64]) -> Self {
        BitIter {
            words,
            word_idx: 0,
            cur: if words.is_empty() { 0 } else { words[0] },
        }
    }
}

impl Iterator for BitIter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let bit = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.word_idx * 64 + bit);
            }
            self.word_idx += 1;
            if self.word_idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.word_idx];
        }
    }
}

/// Set of unordered vertex pairs over a host's dense ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairSet {
    n: usize,
    words: Vec<u64>,
    len: usize,
}

impl PairSet {
    pub fn new(n: usize) -> Self {
        PairSet {
            n,
            words: vec![0u64; (n * n).div_ceil(64)],
            len: 0,
        }
    }

    fn bit(&self, x: usize, y: usize) -> usize {
        let (x, y) = if x < y { (x, y) } else { (y, x) };
        x * self.n + y
    }

    pub fn contains_ids(&self, x: usize, y: usize) -> bool {
        let b = self.bit(x, y);
        self.words[b / 64] >> (b % 64) & 1 == 1
    }

    /// Inserts and reports whether the pair was new.
    pub fn insert_ids(&mut self, x: usize, y: usize) -> bool {
        let b = self.bit(x, y);
        let fresh = self.words[b / 64] >> (b % 64) & 1 == 0;
        self.words[b / 64] |= 1 << (b % 64);
        if fresh {
            self.len += 1;
        }
        fresh
    }

    pub fn remove_ids(&mut self, x: usize, y: usize) -> bool {
        let b = self.bit(x, y);
        let present = self.words[b / 64] >> (b % 64) & 1 == 1;
        self.words[b / 64] &= !(1 << (b % 64));
        if present {
            self.len -= 1;
        }
        present
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bipartite_edge_count() {
        let h = HostGraph::bipartite(4, 4).unwrap();
        assert_eq!(h.edge_count(), 16);
        assert_eq!(h.num_vertices(), 8);
        assert!(h.adjacent(Vertex::new(0, 0), Vertex::new(1, 3)));
        assert!(!h.adjacent(Vertex::new(0, 0), Vertex::new(0, 1)));
    }

    #[test]
    fn minus_matching_edge_count() {
        let h = HostGraph::bipartite_minus_matching(5).unwrap();
        assert_eq!(h.edge_count(), 20);
        assert!(!h.adjacent(Vertex::new(0, 2), Vertex::new(1, 2)));
        assert!(h.adjacent(Vertex::new(0, 2), Vertex::new(1, 3)));
        assert!(h.is_even_graph());
    }

    #[test]
    fn hole_edge_count() {
        let h = HostGraph::complete_minus_clique(13, 5).unwrap();
        assert_eq!(h.edge_count(), 68);
        // hole vertices are mutually non-adjacent
        assert!(!h.adjacent(Vertex::new(0, 0), Vertex::new(0, 4)));
        assert!(h.adjacent(Vertex::new(1, 0), Vertex::new(1, 7)));
        for v in h.vertices() {
            let expect = if v.part == 0 { 8 } else { 12 };
            assert_eq!(h.degree(v), expect);
        }
    }

    #[test]
    fn multipartite_edges_and_degrees() {
        let h = HostGraph::multipartite(vec![3, 2, 2]).unwrap();
        assert_eq!(h.edge_count(), 3 * 2 + 3 * 2 + 2 * 2);
        assert_eq!(h.degree(Vertex::new(0, 0)), 4);
        assert_eq!(h.degree(Vertex::new(1, 1)), 5);
    }

    #[test]
    fn complete_graph_as_unit_hole() {
        let h = HostGraph::complete(9).unwrap();
        assert_eq!(h.edge_count(), 36);
        assert!(h.is_even_graph());
    }

    #[test]
    fn odd_bipartite_is_odd_graph() {
        let h = HostGraph::bipartite(5, 5).unwrap();
        assert!(h.is_odd_graph());
    }

    #[test]
    fn same_neighborhood_detection() {
        let h = HostGraph::bipartite(4, 6).unwrap();
        assert!(h.same_neighborhood(Vertex::new(0, 0), Vertex::new(0, 3)));
        assert!(!h.same_neighborhood(Vertex::new(0, 0), Vertex::new(1, 0)));
        let hm = HostGraph::bipartite_minus_matching(5).unwrap();
        assert!(!hm.same_neighborhood(Vertex::new(0, 0), Vertex::new(0, 1)));
        let hole = HostGraph::complete_minus_clique(9, 3).unwrap();
        assert!(hole.same_neighborhood(Vertex::new(0, 0), Vertex::new(0, 2)));
        assert!(!hole.same_neighborhood(Vertex::new(1, 0), Vertex::new(1, 1)));
    }

    #[test]
    fn vertex_roundtrip() {
        let h = HostGraph::multipartite(vec![2, 3, 4]).unwrap();
        for id in 0..h.num_vertices() {
            assert_eq!(h.id(h.vertex(id)), id);
        }
        assert_eq!("p2.3".parse::<Vertex>().unwrap(), Vertex::new(2, 3));
    }

    #[test]
    fn invalid_hosts_rejected() {
        assert!(HostGraph::bipartite(0, 3).is_err());
        assert!(HostGraph::complete_minus_clique(5, 7).is_err());
        assert!(HostGraph::multipartite(vec![]).is_err());
    }
}

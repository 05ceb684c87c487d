//! Structural classification of leaves: single cycles, chains, rings,
//! general even graphs.
//!
//! A component with maximum degree 4 is reduced to a multigraph on its
//! degree-4 vertices whose edges are the maximal degree-2 threads. Chains
//! and rings are exactly the components whose reduced multigraph is a
//! path of doubled edges with a loop at each end, or a doubled cycle
//! (four parallel edges for the two-ring case). Any vertex of degree 6 or
//! more rules both out, since it would lie on three cycles and force a
//! forbidden intersection.

use crate::error::{Error, Result};
use crate::model::host::{Edge, Vertex};
use std::collections::{BTreeMap, BTreeSet};

/// Cycles and link vertices of a chain or ring.
///
/// `cycles[i]` and `cycles[i+1]` share exactly `links[i]`; for rings the
/// indexing is cyclic and `links` has one entry per cycle. A 2-ring stores
/// both shared vertices in `links`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStructure {
    pub cycles: Vec<Vec<Vertex>>,
    pub links: Vec<Vertex>,
}

impl ChainStructure {
    pub fn profile(&self) -> Vec<usize> {
        self.cycles.iter().map(|c| c.len()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ComponentClass {
    SingleCycle(usize),
    Chain(ChainStructure),
    Ring(ChainStructure),
    /// Sorted (degree, count) profile.
    GeneralEven(Vec<(usize, usize)>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeaveComponent {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub class: ComponentClass,
}

impl LeaveComponent {
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn chain(&self) -> Option<&ChainStructure> {
        match &self.class {
            ComponentClass::Chain(c) => Some(c),
            _ => None,
        }
    }

    pub fn ring(&self) -> Option<&ChainStructure> {
        match &self.class {
            ComponentClass::Ring(c) => Some(c),
            _ => None,
        }
    }

    /// Chain or ring profile, if either.
    pub fn profile(&self) -> Option<Vec<usize>> {
        match &self.class {
            ComponentClass::Chain(c) | ComponentClass::Ring(c) => Some(c.profile()),
            _ => None,
        }
    }
}

/// Classification of every non-trivial component of a leave.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeaveStructure {
    pub components: Vec<LeaveComponent>,
}

impl LeaveStructure {
    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// The unique non-trivial component, if there is exactly one.
    pub fn only_component(&self) -> Option<&LeaveComponent> {
        if self.components.len() == 1 {
            Some(&self.components[0])
        } else {
            None
        }
    }
}

/// Classifies an even edge set. Fails with `OddDegree` on a vertex of odd
/// degree.
pub fn classify(edges: &[Edge]) -> Result<LeaveStructure> {
    let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for e in edges {
        adj.entry(e.0).or_default().push(e.1);
        adj.entry(e.1).or_default().push(e.0);
    }
    for ns in adj.values_mut() {
        ns.sort_unstable();
    }
    for (&v, ns) in &adj {
        if ns.len() % 2 == 1 {
            return Err(Error::OddDegree(v));
        }
    }

    let mut seen: BTreeSet<Vertex> = BTreeSet::new();
    let mut components = Vec::new();
    for &start in adj.keys() {
        if seen.contains(&start) {
            continue;
        }
        let mut stack = vec![start];
        let mut verts = Vec::new();
        seen.insert(start);
        while let Some(x) = stack.pop() {
            verts.push(x);
            for &y in &adj[&x] {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        verts.sort_unstable();
        let comp_edges: Vec<Edge> = edges
            .iter()
            .copied()
            .filter(|e| verts.binary_search(&e.0).is_ok())
            .collect();
        let class = classify_component(&verts, &adj);
        components.push(LeaveComponent {
            vertices: verts,
            edges: comp_edges,
            class,
        });
    }
    Ok(LeaveStructure { components })
}

fn classify_component(verts: &[Vertex], adj: &BTreeMap<Vertex, Vec<Vertex>>) -> ComponentClass {
    let max_deg = verts.iter().map(|v| adj[v].len()).max().unwrap_or(0);
    if max_deg == 2 {
        return ComponentClass::SingleCycle(verts.len());
    }
    if max_deg >= 6 {
        return general(verts, adj);
    }
    let links: Vec<Vertex> = verts.iter().copied().filter(|v| adj[v].len() == 4).collect();
    let threads = extract_threads(&links, adj);

    // split threads into loops (same endpoints) and proper links
    let mut loops: BTreeMap<Vertex, Vec<&Thread>> = BTreeMap::new();
    let mut pairs: BTreeMap<(Vertex, Vertex), Vec<&Thread>> = BTreeMap::new();
    for t in &threads {
        if t.ends.0 == t.ends.1 {
            loops.entry(t.ends.0).or_default().push(t);
        } else {
            pairs.entry(t.ends).or_default().push(t);
        }
    }

    if links.len() == 1 {
        // two loops at the single degree-4 vertex: a 2-chain
        if pairs.is_empty() && loops.get(&links[0]).map_or(0, |l| l.len()) == 2 {
            let ls = &loops[&links[0]];
            let mut cycles = vec![ls[0].cycle_vertices(), ls[1].cycle_vertices()];
            cycles.sort_by_key(|c| (c.len(), c.clone()));
            return ComponentClass::Chain(ChainStructure {
                cycles,
                links: vec![links[0]],
            });
        }
        return general(verts, adj);
    }

    // 2-ring: two degree-4 vertices joined by four parallel threads
    if links.len() == 2 && loops.is_empty() {
        let key = (links[0], links[1]);
        if pairs.len() == 1 && pairs[&key].len() == 4 {
            let mut ts: Vec<&Thread> = pairs[&key].clone();
            ts.sort_by_key(|t| (t.path.len(), t.path.clone()));
            // any perfect pairing of the four threads yields ring cycles;
            // pairing shortest with longest keeps the profile balanced
            let mut cycles = vec![join_threads(ts[0], ts[3]), join_threads(ts[1], ts[2])];
            cycles.sort_by_key(|c| (c.len(), c.clone()));
            return ComponentClass::Ring(ChainStructure {
                cycles,
                links: vec![links[0], links[1]],
            });
        }
        // fall through: could still be a 3-chain (loop, double, loop)
    }

    // general chain: loops at exactly two end links, doubled path in between
    let loop_ends: Vec<Vertex> = loops.keys().copied().collect();
    let all_pairs_doubled = pairs.values().all(|v| v.len() == 2);
    if loop_ends.len() == 2
        && loops.values().all(|l| l.len() == 1)
        && all_pairs_doubled
        && pairs.len() == links.len() - 1
    {
        if let Some(order) = support_path(&links, &pairs, loop_ends[0], loop_ends[1]) {
            let mut cycles = Vec::with_capacity(order.len() + 1);
            cycles.push(loops[&order[0]][0].cycle_vertices());
            for w in order.windows(2) {
                let key = if w[0] < w[1] { (w[0], w[1]) } else { (w[1], w[0]) };
                let ts = &pairs[&key];
                cycles.push(join_threads(ts[0], ts[1]));
            }
            cycles.push(loops[order.last().unwrap()][0].cycle_vertices());
            let fwd: Vec<usize> = cycles.iter().map(|c| c.len()).collect();
            let rev: Vec<usize> = fwd.iter().rev().copied().collect();
            let reverse = match rev.cmp(&fwd) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Greater => false,
                std::cmp::Ordering::Equal => *order.last().unwrap() < order[0],
            };
            if reverse {
                cycles.reverse();
                let links_rev: Vec<Vertex> = order.iter().rev().copied().collect();
                return ComponentClass::Chain(ChainStructure {
                    cycles,
                    links: links_rev,
                });
            }
            return ComponentClass::Chain(ChainStructure {
                cycles,
                links: order,
            });
        }
        return general(verts, adj);
    }

    // ring with three or more cycles: doubled support cycle, no loops
    if loops.is_empty() && links.len() >= 3 && all_pairs_doubled && pairs.len() == links.len() {
        if let Some(order) = support_cycle(&links, &pairs) {
            let s = order.len();
            let mut cycles = Vec::with_capacity(s);
            for i in 0..s {
                let a = order[i];
                let b = order[(i + 1) % s];
                let key = if a < b { (a, b) } else { (b, a) };
                let ts = &pairs[&key];
                cycles.push(join_threads(ts[0], ts[1]));
            }
            // canonical rotation: links[i] joins cycles[i] and cycles[i+1];
            // rotate so links[0] is the least link, orient toward its
            // smaller support neighbour (done inside support_cycle)
            return ComponentClass::Ring(ChainStructure {
                cycles,
                links: order,
            });
        }
    }

    general(verts, adj)
}

fn general(verts: &[Vertex], adj: &BTreeMap<Vertex, Vec<Vertex>>) -> ComponentClass {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for v in verts {
        *counts.entry(adj[v].len()).or_default() += 1;
    }
    ComponentClass::GeneralEven(counts.into_iter().collect())
}

struct Thread {
    ends: (Vertex, Vertex),
    /// Full vertex path from ends.0 to ends.1 (both included). For a loop
    /// the closing endpoint is omitted, so the path is the cycle itself.
    path: Vec<Vertex>,
}

impl Thread {
    fn cycle_vertices(&self) -> Vec<Vertex> {
        self.path.clone()
    }
}

/// Joins two parallel threads with common distinct endpoints into a cycle.
fn join_threads(a: &Thread, b: &Thread) -> Vec<Vertex> {
    let mut fwd = a.path.clone();
    let mut back = b.path.clone();
    if fwd[0] != back[0] {
        back.reverse();
    }
    debug_assert_eq!(fwd[0], back[0]);
    debug_assert_eq!(*fwd.last().unwrap(), *back.last().unwrap());
    for v in back.iter().rev().skip(1).take(back.len() - 2) {
        fwd.push(*v);
    }
    fwd
}

fn extract_threads(links: &[Vertex], adj: &BTreeMap<Vertex, Vec<Vertex>>) -> Vec<Thread> {
    let link_set: BTreeSet<Vertex> = links.iter().copied().collect();
    let mut consumed: BTreeSet<Edge> = BTreeSet::new();
    let mut threads = Vec::new();
    for &d in links {
        for &w in &adj[&d] {
            if consumed.contains(&Edge::new(d, w)) {
                continue;
            }
            consumed.insert(Edge::new(d, w));
            let mut path = vec![d, w];
            let mut prev = d;
            let mut cur = w;
            while !link_set.contains(&cur) {
                let ns = &adj[&cur];
                let next = if ns[0] == prev { ns[1] } else { ns[0] };
                consumed.insert(Edge::new(cur, next));
                path.push(next);
                prev = cur;
                cur = next;
            }
            if path[0] == *path.last().unwrap() {
                path.pop(); // loop thread: drop the repeated endpoint
                let end = path[0];
                threads.push(Thread {
                    ends: (end, end),
                    path,
                });
            } else {
                let ends = (path[0], *path.last().unwrap());
                threads.push(Thread { ends, path });
            }
        }
    }
    threads
}

/// Orders support-path vertices from one loop end to the other.
fn support_path(
    links: &[Vertex],
    pairs: &BTreeMap<(Vertex, Vertex), Vec<&Thread>>,
    from: Vertex,
    to: Vertex,
) -> Option<Vec<Vertex>> {
    let mut nbrs: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for &(a, b) in pairs.keys() {
        nbrs.entry(a).or_default().push(b);
        nbrs.entry(b).or_default().push(a);
    }
    if links.len() == 1 {
        return None;
    }
    for v in links {
        let deg = nbrs.get(v).map_or(0, |n| n.len());
        let expect = if *v == from || *v == to { 1 } else { 2 };
        if deg != expect {
            return None;
        }
    }
    let mut order = vec![from];
    let mut prev = None;
    let mut cur = from;
    while cur != to {
        let ns = &nbrs[&cur];
        let next = ns.iter().copied().find(|&n| Some(n) != prev)?;
        order.push(next);
        prev = Some(cur);
        cur = next;
    }
    if order.len() == links.len() {
        Some(order)
    } else {
        None
    }
}

/// Orders support-cycle vertices starting at the least link, toward its
/// smaller neighbour.
fn support_cycle(
    links: &[Vertex],
    pairs: &BTreeMap<(Vertex, Vertex), Vec<&Thread>>,
) -> Option<Vec<Vertex>> {
    let mut nbrs: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for &(a, b) in pairs.keys() {
        nbrs.entry(a).or_default().push(b);
        nbrs.entry(b).or_default().push(a);
    }
    for v in links {
        if nbrs.get(v).map_or(0, |n| n.len()) != 2 {
            return None;
        }
    }
    let start = *links.iter().min().unwrap();
    let first = *nbrs[&start].iter().min().unwrap();
    let mut order = vec![start, first];
    let mut prev = start;
    let mut cur = first;
    while order.len() < links.len() {
        let ns = &nbrs[&cur];
        let next = if ns[0] == prev { ns[1] } else { ns[0] };
        order.push(next);
        prev = cur;
        cur = next;
    }
    // confirm closure
    let ns = &nbrs[order.last().unwrap()];
    if ns[0] == start || ns[1] == start {
        Some(order)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::cycle::Cycle;

    fn v(p: usize, i: usize) -> Vertex {
        Vertex::new(p, i)
    }

    fn edges_of(vs: &[(usize, usize)]) -> Vec<Edge> {
        let c = Cycle::new(vs.iter().map(|&(p, i)| v(p, i)).collect()).unwrap();
        c.edges().collect()
    }

    #[test]
    fn single_cycle() {
        let e = edges_of(&[(0, 0), (1, 0), (0, 1), (1, 1), (0, 2), (1, 2)]);
        let s = classify(&e).unwrap();
        assert_eq!(s.components.len(), 1);
        assert_eq!(s.components[0].class, ComponentClass::SingleCycle(6));
    }

    #[test]
    fn two_chain() {
        // two 4-cycles sharing p0.0
        let mut e = edges_of(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
        e.extend(edges_of(&[(0, 0), (1, 2), (0, 2), (1, 3)]));
        let s = classify(&e).unwrap();
        let comp = s.only_component().unwrap();
        let chain = comp.chain().expect("chain expected");
        assert_eq!(chain.profile(), vec![4, 4]);
        assert_eq!(chain.links, vec![v(0, 0)]);
    }

    #[test]
    fn two_ring() {
        // two 6-cycles sharing exactly p0.0 and p0.1
        let mut e = edges_of(&[(0, 0), (1, 0), (0, 1), (1, 1), (0, 2), (1, 2)]);
        e.extend(edges_of(&[(0, 0), (1, 3), (0, 1), (1, 4), (0, 3), (1, 5)]));
        let s = classify(&e).unwrap();
        let comp = s.only_component().unwrap();
        let ring = comp.ring().expect("ring expected");
        let mut prof = ring.profile();
        prof.sort_unstable();
        assert_eq!(prof, vec![6, 6]);
        assert_eq!(ring.links, vec![v(0, 0), v(0, 1)]);
    }

    #[test]
    fn three_chain() {
        // 4-cycle . 4-cycle . 4-cycle sharing p0.0 and p0.2
        let mut e = edges_of(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
        e.extend(edges_of(&[(0, 0), (1, 2), (0, 2), (1, 3)]));
        e.extend(edges_of(&[(0, 2), (1, 4), (0, 3), (1, 5)]));
        let s = classify(&e).unwrap();
        let comp = s.only_component().unwrap();
        let chain = comp.chain().expect("chain expected");
        assert_eq!(chain.profile(), vec![4, 4, 4]);
        assert_eq!(chain.links.len(), 2);
    }

    #[test]
    fn three_ring() {
        // three 4-cycles pairwise glued cyclically at p0.0, p0.1, p0.2
        let mut e = edges_of(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
        e.extend(edges_of(&[(0, 1), (1, 2), (0, 2), (1, 3)]));
        e.extend(edges_of(&[(0, 2), (1, 4), (0, 0), (1, 5)]));
        let s = classify(&e).unwrap();
        let comp = s.only_component().unwrap();
        let ring = comp.ring().expect("ring expected");
        assert_eq!(ring.profile(), vec![4, 4, 4]);
        assert_eq!(ring.links.len(), 3);
    }

    #[test]
    fn flower_is_general() {
        // three 4-cycles all sharing p0.0: not a chain or ring
        let mut e = edges_of(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
        e.extend(edges_of(&[(0, 0), (1, 2), (0, 2), (1, 3)]));
        e.extend(edges_of(&[(0, 0), (1, 4), (0, 3), (1, 5)]));
        let s = classify(&e).unwrap();
        let comp = s.only_component().unwrap();
        assert!(matches!(comp.class, ComponentClass::GeneralEven(_)));
    }

    #[test]
    fn odd_degree_rejected() {
        let e = vec![
            Edge::new(v(0, 0), v(1, 0)),
            Edge::new(v(1, 0), v(0, 1)),
            Edge::new(v(0, 1), v(1, 1)),
        ];
        assert!(matches!(classify(&e), Err(Error::OddDegree(_))));
    }

    #[test]
    fn two_components() {
        let mut e = edges_of(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
        e.extend(edges_of(&[(0, 4), (1, 4), (0, 5), (1, 5)]));
        let s = classify(&e).unwrap();
        assert_eq!(s.components.len(), 2);
    }
}

//! The (α,β)-switch engine.
//!
//! For two vertices with equal host neighbourhoods, the pieces of a packing
//! (cycles and the matching) induce a swap graph on the common
//! neighbourhood: a cycle through exactly one of α, β links that vertex's
//! two cycle-neighbours; a cycle through both links, for each of its two
//! α-to-β paths, the path's neighbour of α with its neighbour of β; the
//! matching links the two partners. Every node has degree at most 2, the
//! degree-1 nodes are exactly the vertices adjacent in the leave to exactly
//! one of α, β, and the path components pair them up. Performing the switch
//! from an origin applies the piece swaps along its path component, which
//! toggles leave membership of precisely the four pairs α/β × origin/terminus.

use crate::error::{Error, Result};
use crate::model::{Cycle, Edge, Packing, Vertex};
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Piece {
    /// Cycle through exactly one of α, β: swap relabels the whole cycle.
    WholeCycle { cycle: usize },
    /// One of the two α-to-β paths of a cycle through both.
    CycleHalf { cycle: usize, half: u8 },
    /// The matching pair link.
    Matching,
}

#[derive(Debug)]
struct SwapGraph {
    nodes: Vec<Vertex>,
    edges: Vec<(usize, usize, Piece)>,
    incident: Vec<Vec<usize>>,
}

impl SwapGraph {
    fn degree(&self, node: usize) -> usize {
        self.incident[node]
            .iter()
            .map(|&e| {
                let (u, v, _) = self.edges[e];
                if u == v {
                    2
                } else {
                    1
                }
            })
            .sum()
    }

    fn node_of(&self, v: Vertex) -> Option<usize> {
        self.nodes.binary_search(&v).ok()
    }

    /// Walks the path component from a degree-1 node; returns the edge ids
    /// used and the other endpoint.
    fn walk(&self, start: usize) -> (Vec<usize>, usize) {
        let mut used = vec![false; self.edges.len()];
        let mut path = Vec::new();
        let mut cur = start;
        loop {
            let next_edge = self.incident[cur].iter().copied().find(|&e| !used[e]);
            match next_edge {
                None => return (path, cur),
                Some(e) => {
                    used[e] = true;
                    path.push(e);
                    let (u, v, _) = self.edges[e];
                    cur = if u == cur { v } else { u };
                }
            }
        }
    }
}

fn build(packing: &Packing, alpha: Vertex, beta: Vertex) -> Result<SwapGraph> {
    if alpha == beta {
        return Err(Error::NeighborhoodMismatch(alpha, beta));
    }
    let host = packing.host();
    if !host.contains_vertex(alpha) || !host.contains_vertex(beta) {
        return Err(Error::NeighborhoodMismatch(alpha, beta));
    }
    if !host.same_neighborhood(alpha, beta) {
        return Err(Error::NeighborhoodMismatch(alpha, beta));
    }
    let nodes: Vec<Vertex> = host.neighbors(alpha).collect();
    let mut graph = SwapGraph {
        incident: vec![Vec::new(); nodes.len()],
        nodes,
        edges: Vec::new(),
    };
    let push = |g: &mut SwapGraph, x: Vertex, y: Vertex, piece: Piece| {
        let u = g.node_of(x).expect("swap node missing");
        let v = g.node_of(y).expect("swap node missing");
        let id = g.edges.len();
        g.edges.push((u, v, piece));
        g.incident[u].push(id);
        if v != u {
            g.incident[v].push(id);
        }
    };
    for (i, cycle) in packing.cycles().iter().enumerate() {
        let has_a = cycle.contains(alpha);
        let has_b = cycle.contains(beta);
        match (has_a, has_b) {
            (false, false) => {}
            (true, false) => {
                let (x, y) = cycle.neighbors_of(alpha).unwrap();
                push(&mut graph, x, y, Piece::WholeCycle { cycle: i });
            }
            (false, true) => {
                let (x, y) = cycle.neighbors_of(beta).unwrap();
                push(&mut graph, x, y, Piece::WholeCycle { cycle: i });
            }
            (true, true) => {
                let rot = cycle.rotated_to(alpha);
                let k = rot.iter().position(|&v| v == beta).unwrap();
                let n = rot.len();
                push(
                    &mut graph,
                    rot[1],
                    rot[k - 1],
                    Piece::CycleHalf { cycle: i, half: 0 },
                );
                push(
                    &mut graph,
                    rot[(k + 1) % n],
                    rot[n - 1],
                    Piece::CycleHalf { cycle: i, half: 1 },
                );
            }
        }
    }
    if let Some(m) = packing.matching() {
        let partner = |v: Vertex| {
            m.iter()
                .find(|e| e.touches(v))
                .map(|e| e.other(v))
                .expect("perfect matching covers v")
        };
        push(&mut graph, partner(alpha), partner(beta), Piece::Matching);
    }
    Ok(graph)
}

/// The forced pairing of `N = (Nbd_L(α) ∪ Nbd_L(β)) \ (Nbd_L(α) ∩ Nbd_L(β))`
/// into origin/terminus pairs. Deterministic for a fixed packing.
pub fn pair_partition(
    packing: &Packing,
    alpha: Vertex,
    beta: Vertex,
) -> Result<Vec<(Vertex, Vertex)>> {
    let graph = build(packing, alpha, beta)?;
    let mut pairs = Vec::new();
    let mut seen = vec![false; graph.nodes.len()];
    for start in 0..graph.nodes.len() {
        if seen[start] || graph.degree(start) != 1 {
            continue;
        }
        let (path, end) = graph.walk(start);
        debug_assert!(!path.is_empty() || end != start);
        seen[start] = true;
        seen[end] = true;
        let a = graph.nodes[start.min(end)];
        let b = graph.nodes[start.max(end)];
        pairs.push(if a < b { (a, b) } else { (b, a) });
    }
    pairs.sort_unstable();
    Ok(pairs)
}

/// Performs the (α,β)-switch with the given origin. Returns the new packing
/// and the terminus. The new leave differs from the old exactly on the four
/// pairs α·origin, α·terminus, β·origin, β·terminus.
pub fn perform_switch(
    packing: &Packing,
    alpha: Vertex,
    beta: Vertex,
    origin: Vertex,
) -> Result<(Packing, Vertex)> {
    let graph = build(packing, alpha, beta)?;
    let start = match graph.node_of(origin) {
        Some(i) if graph.degree(i) == 1 => i,
        _ => return Err(Error::InvalidOrigin(origin)),
    };
    let (path, end) = graph.walk(start);
    let terminus = graph.nodes[end];

    let mut whole: BTreeMap<usize, bool> = BTreeMap::new();
    let mut halves: BTreeMap<usize, u8> = BTreeMap::new();
    let mut swap_matching = false;
    for &e in &path {
        match graph.edges[e].2 {
            Piece::WholeCycle { cycle } => {
                *whole.entry(cycle).or_insert(false) = true;
            }
            Piece::CycleHalf { cycle, half } => {
                *halves.entry(cycle).or_insert(0) |= 1 << half;
            }
            Piece::Matching => swap_matching = true,
        }
    }

    let mut cycles: Vec<Cycle> = Vec::with_capacity(packing.cycles().len());
    for (i, cycle) in packing.cycles().iter().enumerate() {
        let new_cycle = if whole.contains_key(&i) || halves.get(&i) == Some(&0b11) {
            cycle.transpose(alpha, beta)
        } else if let Some(&mask) = halves.get(&i) {
            recombine(cycle, alpha, beta, mask)
        } else {
            cycle.clone()
        };
        cycles.push(new_cycle);
    }
    let matching = packing.matching().map(|m| {
        if swap_matching {
            let wa = m.iter().find(|e| e.touches(alpha)).unwrap().other(alpha);
            let wb = m.iter().find(|e| e.touches(beta)).unwrap().other(beta);
            let mut new_m = m.clone();
            new_m.remove(&Edge::new(alpha, wa));
            new_m.remove(&Edge::new(beta, wb));
            new_m.insert(Edge::new(alpha, wb));
            new_m.insert(Edge::new(beta, wa));
            new_m
        } else {
            m.clone()
        }
    });
    let switched = packing.with_replaced(cycles, matching)?;
    debug_assert_eq!(switched.cycle_lengths(), packing.cycle_lengths());
    Ok((switched, terminus))
}

/// Rewires one α-to-β half of a cycle through both vertices.
fn recombine(cycle: &Cycle, alpha: Vertex, beta: Vertex, mask: u8) -> Cycle {
    let rot = cycle.rotated_to(alpha);
    let k = rot.iter().position(|&v| v == beta).unwrap();
    let n = rot.len();
    let first = if mask == 0b01 { beta } else { alpha };
    let second = if mask == 0b01 { alpha } else { beta };
    let mut verts = Vec::with_capacity(n);
    verts.push(first);
    verts.extend_from_slice(&rot[1..k]);
    verts.push(second);
    for j in (k + 1..n).rev() {
        verts.push(rot[j]);
    }
    Cycle::new(verts).expect("recombined cycle is simple")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::HostGraph;
    use std::sync::Arc;

    fn v(p: usize, i: usize) -> Vertex {
        Vertex::new(p, i)
    }

    fn k44_single() -> Packing {
        let host = Arc::new(HostGraph::bipartite(4, 4).unwrap());
        Packing::new(
            host,
            vec![Cycle::new(vec![v(0, 0), v(1, 0), v(0, 1), v(1, 1)]).unwrap()],
            None,
        )
        .unwrap()
    }

    #[test]
    fn pairing_single_cycle_through_alpha() {
        let p = k44_single();
        let pairs = pair_partition(&p, v(0, 0), v(0, 2)).unwrap();
        assert_eq!(pairs, vec![(v(1, 0), v(1, 1))]);
    }

    #[test]
    fn pairing_empty_when_leaves_symmetric() {
        let p = k44_single();
        let pairs = pair_partition(&p, v(0, 0), v(0, 1)).unwrap();
        assert!(pairs.is_empty());
    }

    #[test]
    fn switch_relabels_cycle_and_toggles_four_edges() {
        let p = k44_single();
        let before = p.leave();
        let (q, terminus) = perform_switch(&p, v(0, 0), v(0, 2), v(1, 0)).unwrap();
        assert_eq!(terminus, v(1, 1));
        let expected = Cycle::new(vec![v(0, 2), v(1, 0), v(0, 1), v(1, 1)]).unwrap();
        assert_eq!(q.cycles(), &[expected]);
        let after = q.leave();
        let host = p.host().clone();
        let mut toggled = Vec::new();
        for x in host.vertices() {
            for y in host.vertices() {
                if x < y && host.adjacent(x, y) {
                    let e = Edge::new(x, y);
                    if before.contains_edge(e) != after.contains_edge(e) {
                        toggled.push(e);
                    }
                }
            }
        }
        toggled.sort_unstable();
        let mut want = vec![
            Edge::new(v(0, 0), v(1, 0)),
            Edge::new(v(0, 0), v(1, 1)),
            Edge::new(v(0, 2), v(1, 0)),
            Edge::new(v(0, 2), v(1, 1)),
        ];
        want.sort_unstable();
        assert_eq!(toggled, want);
        // leave gains the α edges, loses the β edges
        assert!(after.contains_edge(Edge::new(v(0, 0), v(1, 0))));
        assert!(!after.contains_edge(Edge::new(v(0, 2), v(1, 0))));
    }

    #[test]
    fn invalid_origin_rejected() {
        let p = k44_single();
        let err = perform_switch(&p, v(0, 0), v(0, 2), v(1, 2));
        assert_eq!(err.unwrap_err(), Error::InvalidOrigin(v(1, 2)));
    }

    #[test]
    fn mismatched_neighborhoods_rejected() {
        let p = k44_single();
        assert!(matches!(
            pair_partition(&p, v(0, 0), v(1, 0)),
            Err(Error::NeighborhoodMismatch(_, _))
        ));
    }

    #[test]
    fn switch_is_involution_on_leave() {
        let p = k44_single();
        let (q, t) = perform_switch(&p, v(0, 0), v(0, 2), v(1, 0)).unwrap();
        let (r, t2) = perform_switch(&q, v(0, 0), v(0, 2), v(1, 0)).unwrap();
        assert_eq!(t, t2);
        let a = p.leave();
        let b = r.leave();
        assert_eq!(a.edges(), b.edges());
    }

    #[test]
    fn matching_pair_swap() {
        let host = Arc::new(HostGraph::bipartite(5, 5).unwrap());
        let diag = host.diagonal_matching().into_iter().collect();
        let p = Packing::new(host, vec![], Some(diag)).unwrap();
        // N = {partner(α), partner(β)} plus leave-degree effects
        let pairs = pair_partition(&p, v(0, 0), v(0, 1)).unwrap();
        assert!(pairs.contains(&(v(1, 0), v(1, 1))));
        let (q, t) = perform_switch(&p, v(0, 0), v(0, 1), v(1, 0)).unwrap();
        assert_eq!(t, v(1, 1));
        let m = q.matching().unwrap();
        assert!(m.contains(&Edge::new(v(0, 0), v(1, 1))));
        assert!(m.contains(&Edge::new(v(0, 1), v(1, 0))));
        assert!(m.contains(&Edge::new(v(0, 2), v(1, 2))));
    }
}

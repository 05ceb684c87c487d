//! Leave surgery: splitting a leave into cycles, reducing chains, absorbing
//! stray components, flattening high-degree vertices, and merging two
//! cycles of a decomposition through a catalyst cycle.
//!
//! Every operation consumes a packing and returns a new one; inputs are
//! never mutated. Vertex choices left free by the constructions are made
//! canonically (least candidate first) unless a seeded [`Choice`] is
//! supplied.

use crate::error::{Error, Result};
use crate::model::{
    classify, trace_cycle, ChainStructure, ComponentClass, Cycle, Edge, LeaveComponent,
    LeaveStructure, Packing, Vertex,
};
use crate::switch::{pair_partition, perform_switch};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Free-choice strategy: canonical (least candidate) or seeded random.
#[derive(Debug, Clone)]
pub enum Choice {
    Canonical,
    Seeded(Box<ChaCha8Rng>),
}

impl Choice {
    pub fn canonical() -> Self {
        Choice::Canonical
    }

    pub fn seeded(seed: u64) -> Self {
        Choice::Seeded(Box::new(ChaCha8Rng::seed_from_u64(seed)))
    }

    fn pick<T: Copy>(&mut self, candidates: &[T]) -> Option<T> {
        match self {
            Choice::Canonical => candidates.first().copied(),
            Choice::Seeded(rng) => candidates.choose(rng.as_mut()).copied(),
        }
    }

    fn pick_in_range(&mut self, lo: usize, hi: usize) -> usize {
        match self {
            Choice::Canonical => lo,
            Choice::Seeded(rng) => rng.gen_range(lo..=hi),
        }
    }

    fn coin(&mut self) -> bool {
        match self {
            Choice::Canonical => false,
            Choice::Seeded(rng) => rng.gen_bool(0.5),
        }
    }
}

/// What a transform did to the leave.
#[derive(Debug, Clone)]
pub enum TransformOutcome {
    /// The new leave decomposes into these cycles (not yet added to the
    /// packing).
    Decomposed(Vec<Cycle>),
    /// The leave changed shape; classification of the new leave.
    NewLeave(LeaveStructure),
}

#[derive(Debug, Clone)]
pub struct Transformed {
    pub packing: Packing,
    pub outcome: TransformOutcome,
}

/// An edge-decomposition of a leave into two paths sharing both end
/// vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathSplit {
    pub first: Vec<Vertex>,
    pub second: Vec<Vertex>,
}

impl PathSplit {
    pub fn new(first: Vec<Vertex>, second: Vec<Vertex>) -> Self {
        debug_assert_eq!(first.first(), second.first());
        debug_assert_eq!(first.last(), second.last());
        PathSplit { first, second }
    }

    pub fn lengths(&self) -> (usize, usize) {
        (self.first.len() - 1, self.second.len() - 1)
    }

    pub fn endpoints(&self) -> (Vertex, Vertex) {
        (self.first[0], *self.first.last().unwrap())
    }

    pub fn swapped(self) -> Self {
        PathSplit {
            first: self.second,
            second: self.first,
        }
    }

    pub fn edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self
            .first
            .windows(2)
            .chain(self.second.windows(2))
            .map(|w| Edge::new(w[0], w[1]))
            .collect();
        out.sort_unstable();
        out
    }
}

/// Maximum leave size the path/ring machinery supports on a bipartite
/// host: 2a+2 for unequal parts and 2a for equal parts, with a the
/// smaller part size.
pub fn leave_size_bound(packing: &Packing) -> Result<usize> {
    let host = packing.host();
    if host.num_parts() != 2 {
        return Err(Error::PreconditionViolated(
            "leave transforms need a bipartite host".into(),
        ));
    }
    let a = host.part_size(0).min(host.part_size(1));
    let b = host.part_size(0).max(host.part_size(1));
    Ok(if a < b { 2 * a + 2 } else { 2 * a })
}

fn check_leave_bound(packing: &Packing, l: usize) -> Result<()> {
    let bound = leave_size_bound(packing)?;
    if l > bound {
        return Err(Error::PreconditionViolated(format!(
            "leave size {l} exceeds bound {bound}"
        )));
    }
    Ok(())
}

fn classify_packing(packing: &Packing) -> Result<LeaveStructure> {
    classify(&packing.leave().edges())
}

fn only_component(packing: &Packing) -> Result<LeaveComponent> {
    let structure = classify_packing(packing)?;
    match structure.only_component() {
        Some(c) => Ok(c.clone()),
        None => Err(Error::PreconditionViolated(format!(
            "expected exactly one non-trivial leave component, found {}",
            structure.components.len()
        ))),
    }
}

fn rotate_to(cycle: &[Vertex], v: Vertex) -> Vec<Vertex> {
    let i = cycle.iter().position(|&x| x == v).expect("vertex on cycle");
    let n = cycle.len();
    (0..n).map(|k| cycle[(i + k) % n]).collect()
}

/// Arc of a cycle from `from` to `to`, following the stored direction or
/// its reverse.
fn cycle_arc(cycle: &[Vertex], from: Vertex, to: Vertex, forward: bool) -> Vec<Vertex> {
    let rot = rotate_to(cycle, from);
    let f = rot.iter().position(|&x| x == to).expect("target on cycle");
    if forward {
        rot[..=f].to_vec()
    } else {
        let mut out = vec![from];
        for k in (f..rot.len()).rev() {
            out.push(rot[k]);
        }
        out
    }
}

/// Splits the unique non-trivial leave component along a path.
///
/// `path` must be an even path of length at least 4 inside the component,
/// the component's remaining edges must form a path between the same
/// endpoints, and the chord from `path[1]` to the far endpoint must be
/// absent. One switch then either decomposes the leave into a `t`-cycle
/// and an `(l-t)`-cycle or reshapes it; the caller inspects the outcome.
pub fn split_path_leave(packing: &Packing, path: &[Vertex]) -> Result<Transformed> {
    if path.len() < 5 || path.len() % 2 == 0 {
        return Err(Error::PreconditionViolated(format!(
            "path length {} is not an even integer at least 4",
            path.len().saturating_sub(1)
        )));
    }
    let t = path.len() - 1;
    let mut uniq = path.to_vec();
    uniq.sort_unstable();
    uniq.dedup();
    if uniq.len() != path.len() {
        return Err(Error::PreconditionViolated("path repeats a vertex".into()));
    }
    let leave = packing.leave();
    for w in path.windows(2) {
        if !leave.contains_edge(Edge::new(w[0], w[1])) {
            return Err(Error::PreconditionViolated(format!(
                "{}-{} is not a leave edge",
                w[0], w[1]
            )));
        }
    }
    let comp = only_component(packing)?;
    let path_edges: Vec<Edge> = path.windows(2).map(|w| Edge::new(w[0], w[1])).collect();
    let rest: Vec<Edge> = comp
        .edges
        .iter()
        .copied()
        .filter(|e| !path_edges.contains(e))
        .collect();
    let rest_path = edges_form_path(&rest).ok_or_else(|| {
        Error::PreconditionViolated("remaining component edges do not form a path".into())
    })?;
    let ends = [rest_path[0], *rest_path.last().unwrap()];
    if !(ends.contains(&path[0]) && ends.contains(&path[t])) {
        return Err(Error::PreconditionViolated(
            "remaining path does not join the split path's endpoints".into(),
        ));
    }
    if leave.contains_edge(Edge::new(path[1], path[t])) {
        return Err(Error::PreconditionViolated(format!(
            "chord {}-{} lies in the leave",
            path[1], path[t]
        )));
    }

    let (switched, terminus) = perform_switch(packing, path[0], path[t], path[1])?;
    if terminus == path[t - 1] {
        let structure = classify_packing(&switched)?;
        return Ok(Transformed {
            packing: switched,
            outcome: TransformOutcome::NewLeave(structure),
        });
    }
    let t_cycle = Cycle::new(path[1..].to_vec())?;
    let new_leave = switched.leave();
    let t_edges: Vec<Edge> = t_cycle.edges().collect();
    let rest_edges: Vec<Edge> = new_leave
        .edges()
        .into_iter()
        .filter(|e| !t_edges.contains(e))
        .collect();
    let rest_cycle = trace_cycle(&rest_edges)?;
    debug_assert_eq!(rest_cycle.len(), comp.edge_count() - t);
    Ok(Transformed {
        packing: switched,
        outcome: TransformOutcome::Decomposed(vec![t_cycle, rest_cycle]),
    })
}

/// If `edges` form a simple path, returns its vertex sequence.
fn edges_form_path(edges: &[Edge]) -> Option<Vec<Vertex>> {
    use std::collections::BTreeMap;
    if edges.is_empty() {
        return None;
    }
    let mut adj: BTreeMap<Vertex, Vec<Vertex>> = BTreeMap::new();
    for e in edges {
        adj.entry(e.0).or_default().push(e.1);
        adj.entry(e.1).or_default().push(e.0);
    }
    let mut ends: Vec<Vertex> = adj
        .iter()
        .filter(|(_, ns)| ns.len() == 1)
        .map(|(&v, _)| v)
        .collect();
    if ends.len() != 2 || adj.values().any(|ns| ns.len() > 2) {
        return None;
    }
    ends.sort_unstable();
    let mut seq = vec![ends[0]];
    let mut prev: Option<Vertex> = None;
    let mut cur = ends[0];
    while cur != ends[1] {
        let ns = &adj[&cur];
        let next = ns.iter().copied().find(|&n| Some(n) != prev)?;
        seq.push(next);
        prev = Some(cur);
        cur = next;
    }
    if seq.len() == edges.len() + 1 {
        Some(seq)
    } else {
        None
    }
}

/// Which of the two chain-reduction switches to perform.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReductionVariant {
    /// Switch anchored at the petal's first vertex; a reshaped leave
    /// becomes an `(m-p+2, 2p+q-m-2)`-chain.
    I,
    /// Switch anchored at the petal's second vertex; a reshaped leave
    /// becomes an `(m-p+4, 2p+q-m-4)`-chain.
    II,
}

/// One reduction step on a `(p,q)`-chain leave toward an `m`-cycle plus a
/// `(p+q-m)`-cycle.
pub fn chain_reduction_step(
    packing: &Packing,
    p: usize,
    m: usize,
    variant: ReductionVariant,
    choice: &mut Choice,
) -> Result<Transformed> {
    if m % 2 != 0 {
        return Err(Error::PreconditionViolated(format!("m = {m} is odd")));
    }
    let comp = only_component(packing)?;
    let chain = comp
        .chain()
        .filter(|c| c.cycles.len() == 2)
        .ok_or_else(|| Error::PreconditionViolated("leave component is not a 2-chain".into()))?
        .clone();
    let total: usize = chain.profile().iter().sum();
    if !chain.profile().contains(&p) {
        return Err(Error::PreconditionViolated(format!(
            "chain profile {:?} has no {p}-cycle",
            chain.profile()
        )));
    }
    let q = total - p;
    if p > m || total < m + 4 {
        return Err(Error::PreconditionViolated(format!(
            "need p <= m and p+q-m >= 4, got p={p}, q={q}, m={m}"
        )));
    }
    let link = chain.links[0];
    let (a_petal, b_petal) = if chain.cycles[0].len() == p {
        (&chain.cycles[0], &chain.cycles[1])
    } else {
        (&chain.cycles[1], &chain.cycles[0])
    };
    if p == m {
        let cycles = vec![Cycle::new(a_petal.clone())?, Cycle::new(b_petal.clone())?];
        return Ok(Transformed {
            packing: packing.clone(),
            outcome: TransformOutcome::Decomposed(cycles),
        });
    }
    let xs = oriented_petal(a_petal, link, choice); // [c, x1, .., x_{p-1}]
    let ys = oriented_petal(b_petal, link, choice); // [c, y1, .., y_{q-1}]
    let path: Vec<Vertex> = match variant {
        ReductionVariant::I => {
            let mut path: Vec<Vertex> = xs[1..].to_vec();
            path.push(link);
            path.extend_from_slice(&ys[1..=m - p + 1]);
            path
        }
        ReductionVariant::II => {
            let mut path: Vec<Vertex> = xs[2..].to_vec();
            path.push(link);
            path.extend_from_slice(&ys[1..=m - p + 2]);
            path
        }
    };
    debug_assert_eq!(path.len(), m + 1);
    let out = split_path_leave(packing, &path)?;
    if let TransformOutcome::NewLeave(structure) = &out.outcome {
        let expected = match variant {
            ReductionVariant::I => [m - p + 2, 2 * p + q - m - 2],
            ReductionVariant::II => [m - p + 4, 2 * p + q - m - 4],
        };
        let comp = structure.only_component().ok_or_else(|| {
            Error::InternalTransformFailure("reshaped leave is not connected".into())
        })?;
        let mut profile = comp.profile().unwrap_or_default();
        profile.sort_unstable();
        let mut want = expected.to_vec();
        want.sort_unstable();
        if profile != want {
            return Err(Error::InternalTransformFailure(format!(
                "reshaped chain has profile {profile:?}, expected {want:?}"
            )));
        }
    }
    Ok(out)
}

/// Rotates a petal cycle so the link comes first; orientation is chosen
/// canonically (smaller first neighbour) or at random in seeded mode.
fn oriented_petal(petal: &[Vertex], link: Vertex, choice: &mut Choice) -> Vec<Vertex> {
    let rot = rotate_to(petal, link);
    let n = rot.len();
    let rev: Vec<Vertex> = std::iter::once(link)
        .chain(rot[1..].iter().rev().copied())
        .collect();
    let use_fwd = match choice {
        Choice::Canonical => rot[1] <= rev[1],
        Choice::Seeded(_) => !choice.coin(),
    };
    let _ = n;
    if use_fwd {
        rot
    } else {
        rev
    }
}

/// Converts a `(p,q)`-chain leave into an `m1`-cycle and an `m2`-cycle by
/// iterated reduction, extending the packing by both cycles.
pub fn chain_to_cycles(
    packing: &Packing,
    m1: usize,
    m2: usize,
    choice: &mut Choice,
) -> Result<Packing> {
    if m1 < 4 || m2 < 4 || m1 % 2 != 0 || m2 % 2 != 0 {
        return Err(Error::PreconditionViolated(format!(
            "target lengths ({m1},{m2}) must be even and at least 4"
        )));
    }
    let comp = only_component(packing)?;
    let chain = comp
        .chain()
        .filter(|c| c.cycles.len() == 2)
        .ok_or_else(|| Error::PreconditionViolated("leave component is not a 2-chain".into()))?;
    let profile = chain.profile();
    let total: usize = profile.iter().sum();
    if m1 + m2 != total {
        return Err(Error::PreconditionViolated(format!(
            "m1+m2 = {} but chain size is {total}",
            m1 + m2
        )));
    }
    let m = m1.max(m2);
    let mut p = *profile.iter().min().unwrap();
    let mut current = packing.clone();
    for _ in 0..=m / 2 {
        let variant = if p == m || p >= (m + 4) / 2 {
            ReductionVariant::I
        } else {
            ReductionVariant::II
        };
        let step = chain_reduction_step(&current, p, m, variant, choice)?;
        match step.outcome {
            TransformOutcome::Decomposed(cycles) => {
                let mut lens: Vec<usize> = cycles.iter().map(Cycle::len).collect();
                lens.sort_unstable();
                let mut want = vec![m1.min(m2), m];
                want.sort_unstable();
                debug_assert_eq!(lens, want);
                return step.packing.with_cycles(cycles);
            }
            TransformOutcome::NewLeave(_) => {
                p = match variant {
                    ReductionVariant::I => m - p + 2,
                    ReductionVariant::II => m - p + 4,
                };
                current = step.packing;
            }
        }
    }
    Err(Error::InternalTransformFailure(format!(
        "chain reduction failed to terminate within {} steps",
        m / 2
    )))
}

/// Finds an `m1`-path through an `s`-chain whose complement is a path.
fn find_chain_split(chain: &ChainStructure, m1: usize, choice: &mut Choice) -> Option<Vec<Vertex>> {
    let s = chain.cycles.len();
    if s < 2 {
        return None;
    }
    let a1 = chain.cycles[0].len();
    let a_s = chain.cycles[s - 1].len();
    let mut masks: Vec<usize> = (0..(1usize << (s - 2))).collect();
    if let Choice::Seeded(rng) = choice {
        masks.shuffle(rng.as_mut());
    }
    for mask in masks {
        let mut mid_sum = 0usize;
        let mut arcs: Vec<Vec<Vertex>> = Vec::with_capacity(s.saturating_sub(2));
        for i in 1..s - 1 {
            let from = chain.links[i - 1];
            let to = chain.links[i];
            let forward = mask >> (i - 1) & 1 == 0;
            let arc = cycle_arc(&chain.cycles[i], from, to, forward);
            mid_sum += arc.len() - 1;
            arcs.push(arc);
        }
        if m1 < mid_sum + 2 {
            continue;
        }
        let need = m1 - mid_sum;
        let lo = need.saturating_sub(a_s - 1).max(1);
        let hi = (a1 - 1).min(need - 1);
        if lo > hi {
            continue;
        }
        let c1 = choice.pick_in_range(lo, hi);
        let cs = need - c1;
        let first_rot = rotate_to(&chain.cycles[0], chain.links[0]);
        let mut path: Vec<Vertex> = (0..=c1).map(|k| first_rot[c1 - k]).collect();
        for arc in &arcs {
            path.extend_from_slice(&arc[1..]);
        }
        let last_rot = rotate_to(&chain.cycles[s - 1], chain.links[s - 2]);
        path.extend_from_slice(&last_rot[1..=cs]);
        debug_assert_eq!(path.len(), m1 + 1);
        return Some(path);
    }
    None
}

/// Finds an `m1`-path through an `s`-ring (s >= 3) whose complement is a
/// path. Both endpoints land on one ring cycle, whose index is returned.
fn find_ring_split(
    ring: &ChainStructure,
    m1: usize,
    choice: &mut Choice,
) -> Option<(Vec<Vertex>, usize)> {
    let s = ring.cycles.len();
    if s < 3 {
        return None;
    }
    let mut hosts: Vec<usize> = (0..s).collect();
    if let Choice::Seeded(rng) = choice {
        hosts.shuffle(rng.as_mut());
    }
    for j in hosts {
        let v_out = ring.links[j];
        let v_in = ring.links[(j + s - 1) % s];
        let rot = rotate_to(&ring.cycles[j], v_out);
        let n = rot.len();
        let g = rot.iter().position(|&x| x == v_in).unwrap();
        for flip in [false, true] {
            // x0 sits at distance c0 from v_out on one arc of the host
            // cycle, x_m1 at distance c1 from v_in on the other arc
            let (c0_max, c1_max) = if !flip {
                (g.saturating_sub(1), n - g - 1)
            } else {
                (n - g - 1, g.saturating_sub(1))
            };
            if c0_max == 0 || c1_max == 0 {
                continue;
            }
            for mask in 0..(1usize << (s - 1)) {
                let mut mid_sum = 0usize;
                let mut arcs: Vec<Vec<Vertex>> = Vec::with_capacity(s - 1);
                for step in 0..s - 1 {
                    let i = (j + 1 + step) % s;
                    let from = ring.links[(i + s - 1) % s];
                    let to = ring.links[i];
                    let forward = mask >> step & 1 == 0;
                    let arc = cycle_arc(&ring.cycles[i], from, to, forward);
                    mid_sum += arc.len() - 1;
                    arcs.push(arc);
                }
                if m1 < mid_sum + 2 {
                    continue;
                }
                let need = m1 - mid_sum;
                let lo = need.saturating_sub(c1_max).max(1);
                let hi = c0_max.min(need - 1);
                if lo > hi {
                    continue;
                }
                let c0 = choice.pick_in_range(lo, hi);
                let c1 = need - c0;
                // piece from x0 to v_out
                let mut path: Vec<Vertex> = if !flip {
                    (0..=c0).map(|k| rot[c0 - k]).collect()
                } else {
                    (0..=c0).map(|k| rot[(n - c0 + k) % n]).collect()
                };
                for arc in &arcs {
                    path.extend_from_slice(&arc[1..]);
                }
                // piece from v_in to x_m1
                if !flip {
                    path.extend((1..=c1).map(|k| rot[g + k]));
                } else {
                    path.extend((1..=c1).map(|k| rot[g - k]));
                }
                debug_assert_eq!(path.len(), m1 + 1);
                return Some((path, j));
            }
        }
    }
    None
}

/// Decomposes a chain-or-ring leave that splits into an `m1`-path and an
/// `m2`-path into an `m1`-cycle and an `m2`-cycle, extending the packing.
pub fn paths_to_decomposition(
    packing: &Packing,
    m1: usize,
    m2: usize,
    choice: &mut Choice,
) -> Result<Packing> {
    if m1 < 4 || m2 < 4 || m1 % 2 != 0 || m2 % 2 != 0 {
        return Err(Error::PreconditionViolated(format!(
            "target lengths ({m1},{m2}) must be even and at least 4"
        )));
    }
    let l = packing.leave().edge_count();
    if m1 + m2 != l {
        return Err(Error::PreconditionViolated(format!(
            "m1+m2 = {} but leave size is {l}",
            m1 + m2
        )));
    }
    check_leave_bound(packing, l)?;
    let mut current = packing.clone();
    let cap = 4 * l + 16;
    for _ in 0..cap {
        let comp = only_component(&current)?;
        match &comp.class {
            ComponentClass::Chain(chain) if chain.cycles.len() == 2 => {
                return chain_to_cycles(&current, m1, m2, choice);
            }
            ComponentClass::Chain(chain) => {
                let s = chain.cycles.len();
                let path = find_chain_split(chain, m1, choice).ok_or_else(|| {
                    Error::PreconditionViolated(format!("chain admits no {m1}/{m2} path split"))
                })?;
                let step = split_path_leave(&current, &path)?;
                match step.outcome {
                    TransformOutcome::Decomposed(cycles) => {
                        return step.packing.with_cycles(cycles);
                    }
                    TransformOutcome::NewLeave(structure) => {
                        let c = structure.only_component().ok_or_else(|| {
                            Error::InternalTransformFailure("leave split apart".into())
                        })?;
                        match c.ring() {
                            Some(r) if r.cycles.len() == s - 1 => {}
                            _ => {
                                return Err(Error::InternalTransformFailure(
                                    "chain step did not shrink to a ring".into(),
                                ));
                            }
                        }
                        current = step.packing;
                    }
                }
            }
            ComponentClass::Ring(ring) if ring.cycles.len() == 2 => {
                current = open_two_ring(&current, &comp, choice)?;
            }
            ComponentClass::Ring(ring) => {
                current = shrink_ring(&current, ring, m1, choice)?;
            }
            _ => {
                return Err(Error::PreconditionViolated(
                    "leave component is neither a chain nor a ring".into(),
                ));
            }
        }
    }
    Err(Error::InternalTransformFailure(
        "ring/chain reduction did not terminate".into(),
    ))
}

/// One switch turning a 2-ring leave into a 2-chain.
fn open_two_ring(packing: &Packing, comp: &LeaveComponent, choice: &mut Choice) -> Result<Packing> {
    let leave = packing.leave();
    let host = packing.host();
    let ring = comp.ring().expect("caller checked");
    let mut candidates: Vec<(Vertex, Vertex)> = Vec::new();
    for &u in &ring.links {
        for v in host.vertices() {
            if v.part == u.part && leave.degree(v) == 0 {
                candidates.push((u, v));
            }
        }
    }
    candidates.sort_unstable();
    let (u, v) = choice.pick(&candidates).ok_or_else(|| {
        Error::InternalTransformFailure(
            "no same-part isolated vertex available to open the ring".into(),
        )
    })?;
    let mut nbrs = leave.neighbors(u);
    nbrs.sort_unstable();
    let y = choice.pick(&nbrs).expect("degree-4 vertex has neighbours");
    let (switched, _) = perform_switch(packing, u, v, y)?;
    let comp = only_component(&switched)?;
    match comp.chain() {
        Some(c) if c.cycles.len() == 2 => Ok(switched),
        _ => Err(Error::InternalTransformFailure(
            "opening a 2-ring did not yield a 2-chain".into(),
        )),
    }
}

/// One switch shrinking an `s`-ring (s >= 3) to an `(s-1)`-ring or opening
/// it into an `s`-chain.
fn shrink_ring(
    packing: &Packing,
    ring: &ChainStructure,
    m1: usize,
    choice: &mut Choice,
) -> Result<Packing> {
    let s = ring.cycles.len();
    let (_, j) = find_ring_split(ring, m1, choice)
        .ok_or_else(|| Error::PreconditionViolated(format!("ring admits no {m1}-path split")))?;
    let leave = packing.leave();
    let host = packing.host();
    let c_cycle = &ring.cycles[j];
    let mut candidates_u: Vec<Vertex> = [ring.links[(j + s - 1) % s], ring.links[j]]
        .into_iter()
        .filter(|&u| ring.links.iter().any(|&w| w != u && w.part == u.part))
        .collect();
    candidates_u.sort_unstable();
    let u = choice.pick(&candidates_u).ok_or_else(|| {
        Error::InternalTransformFailure(
            "no ring-cycle link has a same-part degree-4 companion".into(),
        )
    })?;
    let isolated: Vec<Vertex> = host
        .vertices()
        .filter(|&v| v.part == u.part && leave.degree(v) == 0)
        .collect();
    let v = choice.pick(&isolated).ok_or_else(|| {
        Error::InternalTransformFailure("no same-part isolated vertex for the ring switch".into())
    })?;
    let rot = rotate_to(c_cycle, u);
    let mut nbrs = [rot[1], rot[rot.len() - 1]];
    nbrs.sort_unstable();
    let origin = if choice.coin() { nbrs[1] } else { nbrs[0] };
    let other = if origin == nbrs[0] { nbrs[1] } else { nbrs[0] };
    let (switched, terminus) = perform_switch(packing, u, v, origin)?;
    let comp = only_component(&switched)?;
    let ok = match &comp.class {
        ComponentClass::Chain(c) => terminus == other && c.cycles.len() == s,
        ComponentClass::Ring(r) => terminus != other && r.cycles.len() == s - 1,
        _ => false,
    };
    if !ok {
        return Err(Error::InternalTransformFailure(format!(
            "ring switch produced unexpected leave shape {:?}",
            comp.class
        )));
    }
    Ok(switched)
}

/// Absorbs the cycle components of a one-degree-4-vertex leave into its
/// 2-chain, producing a single chain together with an `m1`/`m2` path split
/// that keeps an end vertex in part `r_part` whenever `m1, m2 >= 3`.
pub fn attach_cycles(
    packing: &Packing,
    m1: usize,
    m2: usize,
    r_part: usize,
    choice: &mut Choice,
) -> Result<(Packing, PathSplit)> {
    let structure = classify_packing(packing)?;
    let k = structure.components.len();
    if k == 0 {
        return Err(Error::PreconditionViolated("leave is empty".into()));
    }
    let mut chain_comp: Option<&LeaveComponent> = None;
    let mut cycle_comps: Vec<&LeaveComponent> = Vec::new();
    for comp in &structure.components {
        match &comp.class {
            ComponentClass::Chain(c) if c.cycles.len() == 2 && chain_comp.is_none() => {
                chain_comp = Some(comp);
            }
            ComponentClass::SingleCycle(_) => cycle_comps.push(comp),
            other => {
                return Err(Error::PreconditionViolated(format!(
                    "leave component {other:?} not allowed here"
                )));
            }
        }
    }
    let chain_comp = chain_comp
        .ok_or_else(|| Error::PreconditionViolated("no 2-chain component in the leave".into()))?;
    let l: usize = structure.components.iter().map(|c| c.edge_count()).sum();
    if m1 + m2 != l {
        return Err(Error::PreconditionViolated(format!(
            "m1+m2 = {} but leave size is {l}",
            m1 + m2
        )));
    }
    if m1 < k + 1 || m2 < k + 1 {
        return Err(Error::PreconditionViolated(format!(
            "need m1, m2 >= k+1 = {}, got ({m1},{m2})",
            k + 1
        )));
    }
    cycle_comps.sort_by_key(|c| c.vertices[0]);
    let sizes: Vec<usize> = cycle_comps.iter().map(|c| c.edge_count()).collect();
    let h: usize = chain_comp.edge_count();

    let swap = m1 > m2;
    let (x1_final, x2_final) = if swap { (m2, m1) } else { (m1, m2) };

    // backward pass: split the level-(t+1) target x1 into a level-t target
    // p plus a piece of length x1 - p absorbed from cycle t
    let mut targets = vec![(0usize, 0usize); k];
    let mut pieces = vec![0usize; k];
    targets[k - 1] = (x1_final, x2_final);
    for t in (1..k).rev() {
        let (x1, _) = targets[t];
        let total_prev: usize = h + sizes[..t - 1].iter().sum::<usize>();
        let c_t = sizes[t - 1];
        let mut lo = (t + 1).max(x1.saturating_sub(c_t / 2));
        if x1 >= 4 {
            lo = lo.max(3);
        }
        let hi = (x1 - 1).min(total_prev / 2);
        if lo > hi {
            return Err(Error::InternalTransformFailure(format!(
                "no valid split of {x1} at level {t} (lo {lo} > hi {hi})"
            )));
        }
        let p = match choice {
            Choice::Canonical => hi,
            Choice::Seeded(_) => choice.pick_in_range(lo, hi),
        };
        pieces[t] = x1 - p;
        targets[t - 1] = (p, total_prev - p);
    }

    let chain = chain_comp.chain().unwrap();
    let (p1, q1) = targets[0];
    let mut split = base_chain_split(chain, p1, q1, r_part, p1 >= 3 && q1 >= 3, choice)?;
    let mut current = packing.clone();

    for t in 1..k {
        let c_comp = cycle_comps[t - 1];
        let piece = pieces[t];
        let (p_len, _) = split.lengths();
        let (e1, e2) = split.endpoints();
        let in_r = |v: Vertex| v.part as usize == r_part;
        let (w, u) = if p_len >= 3 {
            if in_r(e1) && in_r(e2) {
                (e1.min(e2), e1.max(e2))
            } else if in_r(e1) {
                (e1, e2)
            } else if in_r(e2) {
                (e2, e1)
            } else {
                return Err(Error::InternalTransformFailure(
                    "lost the required end vertex in part R".into(),
                ));
            }
        } else {
            (e1.min(e2), e1.max(e2))
        };
        let _ = w;
        let p_path = oriented_to_end(&split.first, u);
        let q_path = oriented_to_end(&split.second, u);
        let y = p_path[p_path.len() - 2];
        let z = q_path[q_path.len() - 2];
        let cyc_list = cycle_component_order(c_comp);
        let mut vs: Vec<Vertex> = cyc_list
            .iter()
            .copied()
            .filter(|x| x.part == u.part)
            .collect();
        vs.sort_unstable();
        let v = choice.pick(&vs).ok_or_else(|| {
            Error::InternalTransformFailure("cycle has no vertex in the needed part".into())
        })?;
        let (switched, terminus) = perform_switch(&current, u, v, y)?;
        let c = cyc_list.len();
        let rot = rotate_to(&cyc_list, v);
        let (new_first, new_second) = if terminus == z {
            let mut pf: Vec<Vertex> = p_path[..p_path.len() - 1].to_vec();
            pf.push(v);
            pf.extend((1..=piece).map(|i| rot[i]));
            let mut qf: Vec<Vertex> = q_path[..q_path.len() - 1].to_vec();
            qf.push(v);
            qf.extend((piece..c).rev().map(|i| rot[i]));
            (pf, qf)
        } else {
            // terminus is a cycle neighbour of v; orient the cycle so the
            // removed edge is v-rot[c-1]
            let rot = if terminus == rot[1] {
                let mut r = vec![rot[0]];
                r.extend(rot[1..].iter().rev().copied());
                r
            } else {
                rot
            };
            if terminus != rot[c - 1] {
                return Err(Error::InternalTransformFailure(
                    "absorb switch terminus is neither z nor a cycle neighbour of v".into(),
                ));
            }
            let mut pf: Vec<Vertex> = p_path[..p_path.len() - 1].to_vec();
            pf.push(v);
            pf.extend((1..=piece).map(|i| rot[i]));
            let mut qf: Vec<Vertex> = q_path.to_vec();
            qf.extend((piece..c).rev().map(|i| rot[i]));
            (pf, qf)
        };
        let (x1_t, x2_t) = targets[t];
        if new_first.len() - 1 != x1_t || new_second.len() - 1 != x2_t {
            return Err(Error::InternalTransformFailure(format!(
                "absorbed split has lengths ({}, {}), expected ({x1_t}, {x2_t})",
                new_first.len() - 1,
                new_second.len() - 1
            )));
        }
        split = PathSplit::new(new_first, new_second);
        current = switched;
        let leave = current.leave();
        for e in split.edges() {
            if !leave.contains_edge(e) {
                return Err(Error::InternalTransformFailure(format!(
                    "split edge {e} is not in the leave after absorbing a cycle"
                )));
            }
        }
    }
    if m1.min(m2) >= 3 {
        let (e1, e2) = split.endpoints();
        if e1.part as usize != r_part && e2.part as usize != r_part {
            return Err(Error::InternalTransformFailure(
                "no path end vertex in part R".into(),
            ));
        }
    }
    if swap {
        split = split.swapped();
    }
    Ok((current, split))
}

/// Splits a 2-chain into an `x1`-path and an `x2`-path sharing endpoints;
/// an endpoint is kept in part `r` when `want_r` is set.
fn base_chain_split(
    chain: &ChainStructure,
    x1: usize,
    x2: usize,
    r: usize,
    want_r: bool,
    choice: &mut Choice,
) -> Result<PathSplit> {
    let link = chain.links[0];
    let mut orders = vec![(0usize, 1usize), (1, 0)];
    if let Choice::Seeded(rng) = choice {
        orders.shuffle(rng.as_mut());
    }
    let mut fallback: Option<PathSplit> = None;
    for (ia, ib) in orders {
        let pa = rotate_to(&chain.cycles[ia], link);
        let pb = rotate_to(&chain.cycles[ib], link);
        let ha = pa.len();
        let hb = pb.len();
        for d1 in 1..ha {
            if x1 <= d1 || x1 - d1 >= hb {
                continue;
            }
            let d2 = x1 - d1;
            // first path: pa[d1] backward to the link, then d2 steps into
            // petal b
            let mut first: Vec<Vertex> = (0..=d1).map(|k| pa[d1 - k]).collect();
            first.extend((1..=d2).map(|k| pb[k]));
            // second path: pa[d1] the long way round petal a to the link,
            // then petal b the long way round to pb[d2]
            let mut second: Vec<Vertex> = (d1..ha).map(|k| pa[k]).collect();
            second.push(link);
            second.extend((d2..hb).rev().map(|k| pb[k]));
            debug_assert_eq!(first.len(), x1 + 1);
            debug_assert_eq!(second.len(), x2 + 1);
            let candidate = PathSplit::new(first, second);
            let (e1, e2) = candidate.endpoints();
            if !want_r || e1.part as usize == r || e2.part as usize == r {
                return Ok(candidate);
            }
            if fallback.is_none() {
                fallback = Some(candidate);
            }
        }
    }
    if want_r && fallback.is_some() {
        return Err(Error::InternalTransformFailure(
            "no base split with an endpoint in part R".into(),
        ));
    }
    fallback
        .ok_or_else(|| Error::PreconditionViolated(format!("2-chain admits no ({x1},{x2}) split")))
}

/// Orients a path so it ends at `u`.
fn oriented_to_end(path: &[Vertex], u: Vertex) -> Vec<Vertex> {
    if *path.last().unwrap() == u {
        path.to_vec()
    } else {
        debug_assert_eq!(path[0], u);
        path.iter().rev().copied().collect()
    }
}

/// Vertex order around a single-cycle component.
fn cycle_component_order(comp: &LeaveComponent) -> Vec<Vertex> {
    trace_cycle(&comp.edges)
        .expect("component is a cycle")
        .vertices()
        .to_vec()
}

/// Full pipeline from a one-degree-4-vertex leave to two target cycles:
/// attach stray cycle components, then decompose the resulting chain.
pub fn squash_to_two_cycles(
    packing: &Packing,
    m1: usize,
    m2: usize,
    choice: &mut Choice,
) -> Result<Packing> {
    let structure = classify_packing(packing)?;
    let k = structure.components.len();
    let l: usize = structure.components.iter().map(|c| c.edge_count()).sum();
    if m1 % 2 != 0 || m2 % 2 != 0 || m1 < 4.max(k + 1) || m2 < 4.max(k + 1) {
        return Err(Error::PreconditionViolated(format!(
            "need even m1, m2 >= max(4, k+1) = {}, got ({m1},{m2})",
            4.max(k + 1)
        )));
    }
    if m1 + m2 != l {
        return Err(Error::PreconditionViolated(format!(
            "m1+m2 = {} but leave size is {l}",
            m1 + m2
        )));
    }
    check_leave_bound(packing, l)?;
    let (attached, _split) = attach_cycles(packing, m1, m2, 0, choice)?;
    paths_to_decomposition(&attached, m1, m2, choice)
}

/// One degree-balancing switch: moves two leave edges from `u` to a
/// same-part vertex `v` of smaller leave degree. All other degrees are
/// unchanged.
pub fn equitable_step(
    packing: &Packing,
    u: Vertex,
    v: Vertex,
    choice: &mut Choice,
) -> Result<Packing> {
    let leave = packing.leave();
    let (du, dv) = (leave.degree(u), leave.degree(v));
    if du <= dv {
        return Err(Error::PreconditionViolated(format!(
            "deg({u}) = {du} is not greater than deg({v}) = {dv}"
        )));
    }
    let pairs = pair_partition(packing, u, v)?;
    let u_only: Vec<Vertex> = leave
        .neighbors(u)
        .into_iter()
        .filter(|&x| !leave.contains_edge(Edge::new(v, x)))
        .collect();
    let candidate_pairs: Vec<(Vertex, Vertex)> = pairs
        .iter()
        .copied()
        .filter(|&(a, b)| u_only.contains(&a) && u_only.contains(&b))
        .collect();
    let (o, _) = choice.pick(&candidate_pairs).ok_or_else(|| {
        Error::InternalTransformFailure(
            "no switch pair with both ends adjacent to the heavier vertex".into(),
        )
    })?;
    let (switched, _) = perform_switch(packing, u, v, o)?;
    let after = switched.leave();
    debug_assert_eq!(after.degree(u), du - 2);
    debug_assert_eq!(after.degree(v), dv + 2);
    Ok(switched)
}

/// Half the total leave-degree excess over 2 among vertices of degree at
/// least 4. Equals 1 exactly when one vertex has degree 4 and the rest
/// have degree 2 or 0.
pub fn compute_excess(packing: &Packing) -> usize {
    let leave = packing.leave();
    packing
        .host()
        .vertices()
        .map(|v| leave.degree(v))
        .filter(|&d| d >= 4)
        .map(|d| d - 2)
        .sum::<usize>()
        / 2
}

/// Repeated degree-balancing until exactly one vertex has leave degree 4
/// and every other vertex has degree 2 or 0.
pub fn flatten_out(packing: &Packing, choice: &mut Choice) -> Result<Packing> {
    let leave = packing.leave();
    let l = leave.edge_count();
    check_leave_bound(packing, l)?;
    let host = packing.host().clone();
    if !host.vertices().any(|v| leave.degree(v) >= 4) {
        return Err(Error::PreconditionViolated(
            "no vertex of leave degree at least 4".into(),
        ));
    }
    let k0 = classify_packing(packing)?.components.len();
    let d = compute_excess(packing);
    let mut current = packing.clone();
    let mut steps = 0usize;
    while compute_excess(&current) > 1 {
        let leave = current.leave();
        let mut found = None;
        'outer: for u in host.vertices() {
            if leave.degree(u) < 4 {
                continue;
            }
            for v in host.vertices() {
                if v.part == u.part && leave.degree(v) == 0 {
                    found = Some((u, v));
                    break 'outer;
                }
            }
        }
        let (u, v) = found.ok_or_else(|| {
            Error::InternalTransformFailure(
                "no same-part isolated vertex available while flattening".into(),
            )
        })?;
        current = equitable_step(&current, u, v, choice)?;
        steps += 1;
        if steps > d {
            return Err(Error::InternalTransformFailure(
                "flattening exceeded its step budget".into(),
            ));
        }
    }
    let k = classify_packing(&current)?.components.len();
    let bound = (k0 + d - 1).min(l / 4 - 1);
    if k > bound {
        return Err(Error::InternalTransformFailure(format!(
            "flattened leave has {k} components, bound is {bound}"
        )));
    }
    Ok(current)
}

/// Merges an `m`-cycle and an `m'`-cycle of a full decomposition into one
/// `(m+m')`-cycle with the help of a catalyst `h`-cycle, which survives.
/// Needs `m+m' <= 3h` and `m+m'+h` within the leave-size bound.
pub fn join_cycles(
    packing: &Packing,
    m: usize,
    mp: usize,
    h: usize,
    choice: &mut Choice,
) -> Result<Packing> {
    for x in [m, mp, h] {
        if x < 4 || x % 2 != 0 {
            return Err(Error::PreconditionViolated(format!(
                "cycle length {x} must be even and at least 4"
            )));
        }
    }
    if !packing.is_decomposition() {
        return Err(Error::PreconditionViolated(
            "join requires a full decomposition".into(),
        ));
    }
    if m + mp > 3 * h {
        return Err(Error::PreconditionViolated(format!(
            "m+m' = {} exceeds 3h = {}",
            m + mp,
            3 * h
        )));
    }
    check_leave_bound(packing, m + mp + h)?;

    let mut order: Vec<usize> = (0..packing.cycles().len()).collect();
    order.sort_by_key(|&i| packing.cycles()[i].vertices().to_vec());
    let mut idx_m = None;
    let mut idx_mp = None;
    let mut idx_h = None;
    for &i in &order {
        let len = packing.cycles()[i].len();
        if idx_m.is_none() && len == m {
            idx_m = Some(i);
        } else if idx_mp.is_none() && len == mp {
            idx_mp = Some(i);
        } else if idx_h.is_none() && len == h {
            idx_h = Some(i);
        }
    }
    let (Some(im), Some(imp), Some(ih)) = (idx_m, idx_mp, idx_h) else {
        return Err(Error::PreconditionViolated(format!(
            "decomposition lacks distinct cycles of lengths {m}, {mp}, {h}"
        )));
    };
    let m_cycle = packing.cycles()[im].clone();
    let mp_cycle = packing.cycles()[imp].clone();
    let h_cycle = packing.cycles()[ih].clone();
    let kept: Vec<Cycle> = packing
        .cycles()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != im && i != imp && i != ih)
        .map(|(_, c)| c.clone())
        .collect();
    let opened = packing.with_replaced(kept, packing.matching().cloned())?;

    let structure = classify_packing(&opened)?;
    let k = structure.components.len();
    let target_big = m + mp;

    let is_cycle_plus_2chain = k == 2 && {
        let mut has_cycle = false;
        let mut has_2chain = false;
        for c in &structure.components {
            match &c.class {
                ComponentClass::SingleCycle(_) => has_cycle = true,
                ComponentClass::Chain(ch) if ch.cycles.len() == 2 => has_2chain = true,
                _ => {}
            }
        }
        has_cycle && has_2chain
    };

    let result = if k == 3 {
        // three disjoint cycles: one switch joins the m- and m'-cycles
        let mut pairs: Vec<(Vertex, Vertex)> = Vec::new();
        for &u in m_cycle.vertices() {
            for &v in mp_cycle.vertices() {
                if u.part == v.part {
                    pairs.push((u, v));
                }
            }
        }
        pairs.sort_unstable();
        let (u, v) = choice
            .pick(&pairs)
            .ok_or_else(|| Error::InternalTransformFailure("no same-part pair".into()))?;
        let (a, b) = m_cycle.neighbors_of(u).unwrap();
        let mut nbrs = [a, b];
        nbrs.sort_unstable();
        let y = choice.pick(&nbrs).unwrap();
        let (switched, _) = perform_switch(&opened, u, v, y)?;
        let s2 = classify_packing(&switched)?;
        if s2.components.len() != 2 {
            return Err(Error::InternalTransformFailure(
                "join switch changed the component count unexpectedly".into(),
            ));
        }
        let h_edges: Vec<Edge> = {
            let mut es: Vec<Edge> = h_cycle.edges().collect();
            es.sort_unstable();
            es
        };
        let other = s2
            .components
            .iter()
            .find(|c| {
                let mut es = c.edges.clone();
                es.sort_unstable();
                es != h_edges
            })
            .ok_or_else(|| Error::InternalTransformFailure("merged component missing".into()))?;
        match &other.class {
            ComponentClass::SingleCycle(len) if *len == target_big => {
                let big = trace_cycle(&other.edges)?;
                switched.with_cycles([big, h_cycle])
            }
            ComponentClass::Chain(ch) if ch.cycles.len() == 2 => {
                squash_to_two_cycles(&switched, h, target_big, choice)
            }
            c => Err(Error::InternalTransformFailure(format!(
                "join switch produced unexpected component {c:?}"
            ))),
        }
    } else if is_cycle_plus_2chain {
        squash_to_two_cycles(&opened, h, target_big, choice)
    } else {
        let leave = opened.leave();
        let positive = leave.support().len();
        let mut work = opened.clone();
        if positive == h {
            // the leave occupies exactly the catalyst's vertices; balance
            // one degree first so flattening keeps a single component
            let mut found = None;
            'outer: for u in work.host().vertices() {
                if leave.degree(u) < 4 {
                    continue;
                }
                for v in work.host().vertices() {
                    if v.part == u.part && leave.degree(v) == 0 {
                        found = Some((u, v));
                        break 'outer;
                    }
                }
            }
            let (u, v) = found.ok_or_else(|| {
                Error::InternalTransformFailure("no vertex pair for the pre-step".into())
            })?;
            work = equitable_step(&work, u, v, choice)?;
        }
        let flattened = flatten_out(&work, choice)?;
        let kf = classify_packing(&flattened)?.components.len();
        let bound = (target_big - 1).min((target_big + h) / 4 - 1);
        if kf > bound {
            return Err(Error::InternalTransformFailure(format!(
                "flattened join leave has {kf} components, bound {bound}"
            )));
        }
        squash_to_two_cycles(&flattened, h, target_big, choice)
    }?;

    let mut want = packing.cycle_lengths();
    remove_one(&mut want, m);
    remove_one(&mut want, mp);
    want.push(target_big);
    want.sort_unstable();
    let got = result.cycle_lengths();
    if got != want {
        return Err(Error::InternalTransformFailure(format!(
            "join produced lengths {got:?}, expected {want:?}"
        )));
    }
    if !result.is_decomposition() {
        return Err(Error::InternalTransformFailure(
            "join left uncovered edges".into(),
        ));
    }
    Ok(result)
}

fn remove_one(v: &mut Vec<usize>, x: usize) {
    if let Some(i) = v.iter().position(|&y| y == x) {
        v.remove(i);
    }
}

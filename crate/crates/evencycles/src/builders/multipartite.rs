//! Uniform even-cycle decompositions of complete multipartite graphs.
//!
//! Parts are processed largest first; the graph is the edge-disjoint union
//! of layers, each a complete bipartite graph between the parts seen so
//! far and the next part. An invariant two-path leave is carried from
//! layer to layer: each new layer contributes a packing with a single
//! small cycle as its leave, which is relabelled onto witness vertices so
//! the old leave paths and the new leave cycle close into full cycles,
//! leaving behind the next two-path leave.

use super::sets::{find_disjoint_sets, good_triple};
use super::two_path::{split_cycle_in_part, two_path_leave};
use super::{decompose_bipartite, BuildCtx};
use crate::error::{Error, Result};
use crate::model::{Cycle, HostGraph, LengthList, Packing, Vertex};
use crate::transforms::PathSplit;
use std::collections::BTreeSet;
use std::sync::Arc;

/// `m`-cycle decomposition of the complete multipartite graph with the
/// given part sizes (all even and at least `m+2`), for even `m >= 4`,
/// `m != 6`, with `m` dividing the edge count. Parts are relabelled in
/// size-descending order in the output host.
pub fn decompose_multipartite(sizes: &[usize], m: usize, ctx: &mut BuildCtx) -> Result<Packing> {
    if m == 6 {
        return Err(Error::Unsupported(
            "6-cycle decompositions of multipartite hosts are not covered".into(),
        ));
    }
    if m % 2 != 0 || m < 4 {
        return Err(Error::HypothesesViolated(format!(
            "cycle length {m} must be even and at least 4"
        )));
    }
    if sizes.is_empty() {
        return Err(Error::HypothesesViolated("no parts given".into()));
    }
    for &s in sizes {
        if s % 2 != 0 || s < m + 2 {
            return Err(Error::HypothesesViolated(format!(
                "part size {s} must be even and at least m+2 = {}",
                m + 2
            )));
        }
    }
    let mut sizes: Vec<usize> = sizes.to_vec();
    sizes.sort_unstable_by(|x, y| y.cmp(x));
    let total_vertices: usize = sizes.iter().sum();
    let edges = (total_vertices * total_vertices
        - sizes.iter().map(|s| s * s).sum::<usize>())
        / 2;
    if edges % m != 0 {
        return Err(Error::HypothesesViolated(format!(
            "edge count {edges} is not divisible by {m}"
        )));
    }
    let host = Arc::new(HostGraph::multipartite(sizes.clone())?);
    let t = sizes.len();
    if t == 1 {
        return Packing::empty(host);
    }

    if m == 4 {
        // every layer's edge count is divisible by 4; decompose layerwise
        let mut cycles = Vec::new();
        for i in 1..t {
            let map = LayerMap::new(&sizes, i);
            let a_size = map.a_vertices.len();
            let lens = LengthList::new(vec![4; a_size * sizes[i] / 4])?;
            ctx.log(|| format!("layer {i}: all 4-cycles on K_{{{a_size},{}}}", sizes[i]));
            let layer = decompose_bipartite(a_size, sizes[i], false, &lens, ctx)?;
            for c in layer.cycles() {
                cycles.push(map.cycle_to_host(c)?);
            }
        }
        let packing = Packing::new(host, cycles, None)?;
        return finish(packing, m);
    }

    // m >= 8: carry a two-path leave across the layers
    let leftover = |i: usize| -> usize {
        let a: usize = sizes[..i].iter().sum();
        let r = (a * sizes[i]) % m;
        if r == 0 {
            0
        } else if r == 2 {
            m + 2
        } else {
            r
        }
    };
    let l: Vec<usize> = (1..t).map(leftover).collect(); // l[i-1] for layer i
    let sigma = |s: usize| -> usize { l[s..].iter().sum() };

    let mut cycles: Vec<Cycle> = Vec::new();
    let mut split: Option<PathSplit> = None;

    // first layer
    {
        let map = LayerMap::new(&sizes, 1);
        let a_size = sizes[0];
        let b_size = sizes[1];
        let e_layer = a_size * b_size;
        match StateCase::of(m, sigma(1)) {
            StateCase::Zero => {
                let lens = LengthList::new(vec![m; e_layer / m])?;
                ctx.log(|| format!("layer 1: full {m}-cycle decomposition"));
                let layer = decompose_bipartite(a_size, b_size, false, &lens, ctx)?;
                for c in layer.cycles() {
                    cycles.push(map.cycle_to_host(c)?);
                }
            }
            StateCase::Two | StateCase::TwoMinus => {
                let leave_len = if StateCase::of(m, sigma(1)) == StateCase::Two {
                    m - 2
                } else {
                    m + 2
                };
                let d = if leave_len == m - 2 { m - 4 } else { m - 2 };
                ctx.log(|| format!("layer 1: {m}-cycle packing with a {leave_len}-cycle leave"));
                let (layer, leave_cycle) =
                    layer_with_cycle_leave(a_size, b_size, m, leave_len, ctx)?;
                for c in layer.cycles() {
                    cycles.push(map.cycle_to_host(c)?);
                }
                let s = split_cycle_in_part(&map.cycle_to_host(&leave_cycle)?, d, 0)?;
                split = Some(s);
            }
            StateCase::Mid(x) => {
                let (d1, e1) = mid_split_lengths(m, x);
                ctx.log(|| {
                    format!("layer 1: two-path leave ({d1},{e1}) on K_{{{a_size},{b_size}}}")
                });
                let (layer, s) =
                    two_path_leave(a_size, b_size, m, 2 * m - x, d1, e1, 0, ctx)?;
                for c in layer.cycles() {
                    cycles.push(map.cycle_to_host(c)?);
                }
                split = Some(PathSplit::new(
                    map.path_to_host(&s.first),
                    map.path_to_host(&s.second),
                ));
            }
        }
        check_layer(&sizes, 2, &cycles, &split)?;
    }

    for i in 2..t {
        let map = LayerMap::new(&sizes, i);
        let a_size: usize = sizes[..i].iter().sum();
        let b_size = sizes[i];
        let li = l[i - 1];
        let prev = StateCase::of(m, sigma(i - 1));
        let next = StateCase::of(m, sigma(i));
        ctx.log(|| format!("layer {i}: leftover {li}, state {prev:?} -> {next:?}"));

        if li == 0 {
            let lens = LengthList::new(vec![m; a_size * b_size / m])?;
            let layer = decompose_bipartite(a_size, b_size, false, &lens, ctx)?;
            for c in layer.cycles() {
                cycles.push(map.cycle_to_host(c)?);
            }
            check_state(m, next, &split)?;
            check_layer(&sizes, i + 1, &cycles, &split)?;
            continue;
        }

        match prev {
            StateCase::Zero => {
                let (layer, leave_cycle) =
                    layer_with_cycle_leave(a_size, b_size, m, li, ctx)?;
                for c in layer.cycles() {
                    cycles.push(map.cycle_to_host(c)?);
                }
                let StateCase::Mid(y) = next else {
                    return Err(Error::InternalTransformFailure(
                        "state after a union step must be mid-range".into(),
                    ));
                };
                let (d, _e) = mid_split_lengths(m, y);
                split = Some(split_cycle_in_part(&map.cycle_to_host(&leave_cycle)?, d, 0)?);
            }
            StateCase::Two => {
                let cur = split.take().ok_or_else(state_bug)?;
                let (layer, leave_cycle) =
                    layer_with_cycle_leave(a_size, b_size, m, li, ctx)?;
                let outcome = if li == 4 {
                    combine(
                        Variant::B,
                        &cur,
                        layer.cycles(),
                        &leave_cycle,
                        &map,
                        &sizes,
                        i,
                        2,
                        2,
                        0,
                        ctx,
                    )?
                } else {
                    let StateCase::Mid(y) = next else {
                        return Err(state_bug());
                    };
                    let (dn, en) = mid_split_lengths(m, y);
                    combine(
                        Variant::C,
                        &cur,
                        layer.cycles(),
                        &leave_cycle,
                        &map,
                        &sizes,
                        i,
                        4,
                        dn - 2,
                        en,
                        ctx,
                    )?
                };
                apply_outcome(outcome, &mut cycles, &mut split);
            }
            StateCase::TwoMinus => {
                let cur = split.take().ok_or_else(state_bug)?;
                let (layer, leave_cycle) =
                    layer_with_cycle_leave(a_size, b_size, m, li, ctx)?;
                let StateCase::Mid(y) = next else {
                    return Err(state_bug());
                };
                let (dn, en) = mid_split_lengths(m, y);
                let outcome = combine(
                    Variant::C,
                    &cur,
                    layer.cycles(),
                    &leave_cycle,
                    &map,
                    &sizes,
                    i,
                    2,
                    dn - 4,
                    en,
                    ctx,
                )?;
                apply_outcome(outcome, &mut cycles, &mut split);
            }
            StateCase::Mid(x) => {
                let cur = split.take().ok_or_else(state_bug)?;
                let (d, e) = cur.lengths();
                if li + 4 <= x {
                    let (layer, leave_cycle) =
                        layer_with_cycle_leave(a_size, b_size, m, li, ctx)?;
                    let StateCase::Mid(y) = next else {
                        return Err(state_bug());
                    };
                    let (dn, en) = mid_split_lengths(m, y);
                    let outcome = combine(
                        Variant::B,
                        &cur,
                        layer.cycles(),
                        &leave_cycle,
                        &map,
                        &sizes,
                        i,
                        dn - d,
                        en - e,
                        0,
                        ctx,
                    )?;
                    apply_outcome(outcome, &mut cycles, &mut split);
                } else if li == x - 2 {
                    let (layer, leave_cycle) =
                        layer_with_cycle_leave(a_size, b_size, m, li, ctx)?;
                    let outcome = combine(
                        Variant::C,
                        &cur,
                        layer.cycles(),
                        &leave_cycle,
                        &map,
                        &sizes,
                        i,
                        m - d,
                        m - 4 - e,
                        2,
                        ctx,
                    )?;
                    apply_outcome(outcome, &mut cycles, &mut split);
                } else if li == x {
                    let (layer, leave_cycle) =
                        layer_with_cycle_leave(a_size, b_size, m, li, ctx)?;
                    let outcome = combine(
                        Variant::A,
                        &cur,
                        layer.cycles(),
                        &leave_cycle,
                        &map,
                        &sizes,
                        i,
                        m - d,
                        m - e,
                        0,
                        ctx,
                    )?;
                    apply_outcome(outcome, &mut cycles, &mut split);
                } else if li == x + 2 {
                    let (layer, leave_cycle) =
                        layer_with_cycle_leave(a_size, b_size, m, li, ctx)?;
                    let outcome = combine(
                        Variant::C,
                        &cur,
                        layer.cycles(),
                        &leave_cycle,
                        &map,
                        &sizes,
                        i,
                        m - d,
                        m - 2 - e,
                        4,
                        ctx,
                    )?;
                    apply_outcome(outcome, &mut cycles, &mut split);
                } else {
                    // li >= x+4: pack the layer with an extra (li - x)-cycle
                    // and an x-cycle leave, merge fully, then reopen the
                    // (li - x)-cycle as the next two-path leave
                    let (layer, leave_cycle) =
                        layer_with_two_leftovers(a_size, b_size, m, li, x, ctx)?;
                    let outcome = combine(
                        Variant::A,
                        &cur,
                        layer.cycles(),
                        &leave_cycle,
                        &map,
                        &sizes,
                        i,
                        m - d,
                        m - e,
                        0,
                        ctx,
                    )?;
                    apply_outcome(outcome, &mut cycles, &mut split);
                    let reopened = li - x;
                    let idx = cycles
                        .iter()
                        .position(|c| c.len() == reopened)
                        .ok_or_else(|| {
                            Error::InternalTransformFailure(
                                "missing the deferred leftover cycle".into(),
                            )
                        })?;
                    let cyc = cycles.remove(idx);
                    let StateCase::Mid(y) = next else {
                        return Err(state_bug());
                    };
                    let (dn, _en) = mid_split_lengths(m, y);
                    split = Some(split_cycle_in_part(&cyc, dn, 0)?);
                }
            }
        }
        check_state(m, next, &split)?;
        check_layer(&sizes, i + 1, &cycles, &split)?;
    }

    if split.is_some() {
        return Err(Error::InternalTransformFailure(
            "a leave survived the last layer".into(),
        ));
    }
    let packing = Packing::new(host, cycles, None)?;
    finish(packing, m)
}

fn state_bug() -> Error {
    Error::InternalTransformFailure("layer state out of sync".into())
}

fn finish(packing: Packing, m: usize) -> Result<Packing> {
    if !packing.is_decomposition() {
        return Err(Error::InternalTransformFailure(
            "multipartite decomposition left uncovered edges".into(),
        ));
    }
    if packing.cycles().iter().any(|c| c.len() != m) {
        return Err(Error::InternalTransformFailure(
            "multipartite decomposition produced a cycle of the wrong length".into(),
        ));
    }
    Ok(packing)
}

/// Case of the suffix leave budget mod 2m.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum StateCase {
    Zero,
    Two,
    TwoMinus,
    Mid(usize),
}

impl StateCase {
    fn of(m: usize, sigma: usize) -> StateCase {
        let r = sigma % (2 * m);
        if r == 0 {
            StateCase::Zero
        } else if r == 2 {
            StateCase::Two
        } else if r == 2 * m - 2 {
            StateCase::TwoMinus
        } else {
            StateCase::Mid(r)
        }
    }
}

/// Path lengths (d, e) with d+e = 2m-x, both even, d in {e, e+2}.
fn mid_split_lengths(m: usize, x: usize) -> (usize, usize) {
    let total = 2 * m - x;
    if total % 4 == 0 {
        (total / 2, total / 2)
    } else {
        (total / 2 + 1, total / 2 - 1)
    }
}

/// Expected split lengths for a state, if any.
fn expected_split(m: usize, case: StateCase) -> Option<(usize, usize)> {
    match case {
        StateCase::Zero => None,
        StateCase::Two => Some((m - 4, 2)),
        StateCase::TwoMinus => Some((m - 2, 4)),
        StateCase::Mid(x) => Some(mid_split_lengths(m, x)),
    }
}

fn check_state(m: usize, case: StateCase, split: &Option<PathSplit>) -> Result<()> {
    let got = split.as_ref().map(|s| s.lengths());
    let want = expected_split(m, case);
    if got != want {
        return Err(Error::InternalTransformFailure(format!(
            "carried leave paths {got:?} do not match state {case:?} ({want:?})"
        )));
    }
    Ok(())
}

/// Layer packing of `K_{a,b}` into m-cycles with a single `l`-cycle leave.
fn layer_with_cycle_leave(
    a: usize,
    b: usize,
    m: usize,
    l: usize,
    ctx: &mut BuildCtx,
) -> Result<(Packing, Cycle)> {
    let mut lens = vec![m; (a * b - l) / m];
    lens.push(l);
    let packing = decompose_bipartite(a, b, false, &LengthList::new(lens)?, ctx)?;
    let idx = packing
        .cycles()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.len() == l)
        .map(|(i, _)| i)
        .min_by_key(|&i| packing.cycles()[i].vertices().to_vec())
        .expect("requested cycle length present");
    let (packing, cycle) = packing.without_cycle(idx)?;
    Ok((packing, cycle))
}

/// Layer packing with an `x`-cycle leave plus one deferred `(l-x)`-cycle
/// kept among its cycles.
fn layer_with_two_leftovers(
    a: usize,
    b: usize,
    m: usize,
    l: usize,
    x: usize,
    ctx: &mut BuildCtx,
) -> Result<(Packing, Cycle)> {
    let mut lens = vec![m; (a * b - l) / m];
    lens.push(l - x);
    lens.push(x);
    let packing = decompose_bipartite(a, b, false, &LengthList::new(lens)?, ctx)?;
    let idx = packing
        .cycles()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.len() == x)
        .map(|(i, _)| i)
        .min_by_key(|&i| packing.cycles()[i].vertices().to_vec())
        .expect("requested cycle length present");
    let (packing, cycle) = packing.without_cycle(idx)?;
    Ok((packing, cycle))
}

/// Embedding of a layer's bipartite coordinates into the multipartite
/// host: part 0 enumerates the earlier parts in order, part 1 is the new
/// part.
struct LayerMap {
    a_vertices: Vec<Vertex>,
    b_part: usize,
}

impl LayerMap {
    fn new(sizes: &[usize], layer: usize) -> Self {
        let mut a_vertices = Vec::new();
        for (p, &s) in sizes[..layer].iter().enumerate() {
            for i in 0..s {
                a_vertices.push(Vertex::new(p, i));
            }
        }
        LayerMap {
            a_vertices,
            b_part: layer,
        }
    }

    fn to_host(&self, x: Vertex) -> Vertex {
        if x.part == 0 {
            self.a_vertices[x.index as usize]
        } else {
            Vertex::new(self.b_part, x.index as usize)
        }
    }

    fn to_layer(&self, x: Vertex) -> Vertex {
        if x.part as usize == self.b_part {
            Vertex::new(1, x.index as usize)
        } else {
            let i = self
                .a_vertices
                .binary_search(&x)
                .expect("vertex lies in the joined parts");
            Vertex::new(0, i)
        }
    }

    fn cycle_to_host(&self, c: &Cycle) -> Result<Cycle> {
        Cycle::new(c.vertices().iter().map(|&x| self.to_host(x)).collect())
    }

    fn path_to_host(&self, p: &[Vertex]) -> Vec<Vertex> {
        p.iter().map(|&x| self.to_host(x)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Variant {
    A,
    B,
    C,
}

enum Outcome {
    Full(Vec<Cycle>),
    WithSplit(Vec<Cycle>, PathSplit),
}

fn apply_outcome(outcome: Outcome, cycles: &mut Vec<Cycle>, split: &mut Option<PathSplit>) {
    match outcome {
        Outcome::Full(new) => {
            cycles.extend(new);
            *split = None;
        }
        Outcome::WithSplit(new, s) => {
            cycles.extend(new);
            *split = Some(normalize_split(s));
        }
    }
}

/// Longer path first; ties keep the given order.
fn normalize_split(s: PathSplit) -> PathSplit {
    let (p, q) = s.lengths();
    if p >= q {
        s
    } else {
        s.swapped()
    }
}

/// Joins the carried two-path leave of the prefix with a new layer whose
/// leave is a single cycle, relabelling the layer so witness vertices line
/// up. Produces the layer's cycles (relabelled), the merged cycles, and
/// the next leave paths, per variant:
///
/// - A: both old paths close into cycles, no leave remains;
/// - B: both paths grow into the layer, the leave stays two paths;
/// - C: the first path closes into a cycle, the leave is rebuilt from a
///   fresh path plus the grown second path.
#[allow(clippy::too_many_arguments)]
fn combine(
    variant: Variant,
    split: &PathSplit,
    layer_cycles: &[Cycle],
    layer_leave: &Cycle,
    map: &LayerMap,
    sizes: &[usize],
    layer: usize,
    pp: usize,
    qp: usize,
    ppp: usize,
    ctx: &mut BuildCtx,
) -> Result<Outcome> {
    let l = layer_leave.len();
    match variant {
        Variant::A | Variant::B => {
            if pp < 2 || qp < 2 || pp % 2 != 0 || qp % 2 != 0 || pp + qp != l {
                return Err(Error::PreconditionViolated(format!(
                    "extensions ({pp},{qp}) do not fit a {l}-cycle layer leave"
                )));
            }
        }
        Variant::C => {
            if pp < 2 || ppp < 2 || pp % 2 != 0 || qp % 2 != 0 || ppp % 2 != 0
                || pp + qp + ppp != l
            {
                return Err(Error::PreconditionViolated(format!(
                    "extensions ({pp},{qp},{ppp}) do not fit a {l}-cycle layer leave"
                )));
            }
        }
    }
    let (a_end, a_dag) = split.endpoints();
    let a_set: BTreeSet<Vertex> = map.a_vertices.iter().copied().collect();
    let s_set: BTreeSet<Vertex> = split.first.iter().copied().collect();
    let t_set: BTreeSet<Vertex> = split.second.iter().copied().collect();
    let s_need = (pp - 2) / 2;
    let t_need = if qp >= 2 { (qp - 2) / 2 } else { 0 };
    if !good_triple(&a_set, &s_set, &t_set, s_need, t_need) {
        return Err(Error::InternalTransformFailure(
            "witness triple is not good, which the layer hypotheses should guarantee".into(),
        ));
    }
    let (s_prime, t_prime) = find_disjoint_sets(&a_set, &s_set, &t_set, s_need, t_need)?;

    // fresh vertices in the new part
    let b_all: Vec<Vertex> = (0..sizes[layer]).map(|i| Vertex::new(layer, i)).collect();
    if b_all.len() < l / 2 {
        return Err(Error::InternalTransformFailure(
            "new part too small for the layer leave".into(),
        ));
    }
    let bs = &b_all[..l / 2];

    // free pool for the fresh path of variant C
    let used_a: BTreeSet<Vertex> = s_prime
        .iter()
        .chain(t_prime.iter())
        .copied()
        .chain([a_end, a_dag])
        .collect();
    let pool: Vec<Vertex> = map
        .a_vertices
        .iter()
        .copied()
        .filter(|x| !used_a.contains(x))
        .collect();

    let mut target: Vec<Vertex> = Vec::with_capacity(l);
    let mut merged: Vec<Cycle> = Vec::new();
    let mut new_split: Option<PathSplit> = None;
    match variant {
        Variant::A => {
            // P' and Q' both run from a to a†
            let p_prime = a_to_a_path(a_end, a_dag, &s_prime, &bs[..pp / 2]);
            let q_prime = a_to_a_path(a_end, a_dag, &t_prime, &bs[pp / 2..]);
            target.extend_from_slice(&p_prime);
            target.extend(q_prime[1..q_prime.len() - 1].iter().rev().copied());
            merged.push(close_paths(&split.first, &p_prime)?);
            merged.push(close_paths(&split.second, &q_prime)?);
        }
        Variant::B => {
            let (b, b_dag) = (bs[0], bs[1]);
            let p_bs = &bs[2..2 + (pp - 2) / 2];
            let q_bs = &bs[2 + (pp - 2) / 2..];
            let p_prime = a_to_b_path(a_dag, b_dag, &s_prime, p_bs);
            let q_prime = a_to_b_path(a_dag, b, &t_prime, q_bs);
            // cycle: a - b - (Q' reversed) - a† - (P') - b† - a
            target.push(a_end);
            target.push(b);
            target.extend(q_prime[1..q_prime.len() - 1].iter().rev().copied());
            target.push(a_dag);
            target.extend(p_prime[1..p_prime.len() - 1].iter().copied());
            target.push(b_dag);
            // new first path: b - a - P - a† - P' - b†
            let mut first = vec![b];
            first.extend(oriented_from(&split.first, a_end));
            first.extend(p_prime[1..].iter().copied());
            // new second path: b - Q' reversed - a† - Q reversed - a - b†
            let mut second = vec![b];
            second.extend(q_prime[..q_prime.len() - 1].iter().rev().copied());
            second.extend(oriented_from(&split.second, a_dag)[1..].iter().copied());
            second.push(b_dag);
            new_split = Some(PathSplit::new(first, second));
        }
        Variant::C => {
            if qp == 0 {
                let p_prime = a_to_a_path(a_end, a_dag, &s_prime, &bs[..pp / 2]);
                let fresh_a = &pool[..(ppp - 2) / 2];
                let p_second = a_to_a_path(a_end, a_dag, fresh_a, &bs[pp / 2..]);
                target.extend_from_slice(&p_prime);
                target.extend(p_second[1..p_second.len() - 1].iter().rev().copied());
                merged.push(close_paths(&split.first, &p_prime)?);
                new_split = Some(PathSplit::new(p_second, split.second.clone()));
            } else {
                let (b, b_dag) = (bs[0], bs[1]);
                let p_bs = &bs[2..2 + pp / 2];
                let q_bs = &bs[2 + pp / 2..2 + pp / 2 + (qp - 2) / 2];
                let w_bs = &bs[2 + pp / 2 + (qp - 2) / 2..];
                let p_prime = a_to_a_path(a_end, a_dag, &s_prime, p_bs);
                let q_prime = a_to_b_path(a_dag, b, &t_prime, q_bs);
                let fresh_a = &pool[..ppp / 2];
                let p_second = b_to_b_path(b, b_dag, fresh_a, w_bs);
                // cycle: a - P' - a† - Q' - b - P'' - b† - a
                target.extend_from_slice(&p_prime);
                target.extend(q_prime[1..q_prime.len() - 1].iter().copied());
                target.push(b);
                target.extend(p_second[1..p_second.len() - 1].iter().copied());
                target.push(b_dag);
                merged.push(close_paths(&split.first, &p_prime)?);
                // next leave: P'' from b to b†, and Q + Q' + [a, b†]
                let mut second = vec![b];
                second.extend(q_prime[..q_prime.len() - 1].iter().rev().copied());
                second.extend(oriented_from(&split.second, a_dag)[1..].iter().copied());
                second.push(b_dag);
                new_split = Some(PathSplit::new(p_second, second));
            }
        }
    }
    debug_assert_eq!(target.len(), l);

    // relabel the layer so its leave cycle becomes the target cycle
    let target_layer: Vec<Vertex> = target.iter().map(|&x| map.to_layer(x)).collect();
    let leave_verts = layer_leave.vertices();
    let offset = (0..target_layer.len())
        .find(|&k| target_layer[k].part == leave_verts[0].part)
        .ok_or_else(|| Error::InternalTransformFailure("parity misalignment".into()))?;
    let mut psi: std::collections::BTreeMap<Vertex, Vertex> = std::collections::BTreeMap::new();
    for (i, &x) in leave_verts.iter().enumerate() {
        psi.insert(x, target_layer[(offset + i) % target_layer.len()]);
    }
    if psi.len() != leave_verts.len()
        || psi.values().collect::<BTreeSet<_>>().len() != leave_verts.len()
    {
        return Err(Error::InternalTransformFailure(
            "layer relabelling is not injective".into(),
        ));
    }
    let a_layer = map.a_vertices.len();
    let b_layer = sizes[layer];
    extend_permutation(&mut psi, 0, a_layer);
    extend_permutation(&mut psi, 1, b_layer);

    let mut out_cycles: Vec<Cycle> = Vec::with_capacity(layer_cycles.len() + merged.len());
    for c in layer_cycles {
        let relabeled: Vec<Vertex> = c.vertices().iter().map(|&x| psi[&x]).collect();
        out_cycles.push(map.cycle_to_host(&Cycle::new(relabeled)?)?);
    }
    out_cycles.extend(merged);
    ctx.log(|| format!("combine {variant:?}: extensions ({pp},{qp},{ppp})"));
    match new_split {
        None => Ok(Outcome::Full(out_cycles)),
        Some(s) => Ok(Outcome::WithSplit(out_cycles, s)),
    }
}

/// Even path from one A-vertex to another: a, b_1, s_1, b_2, ..., b_k, a†.
fn a_to_a_path(from: Vertex, to: Vertex, interior_a: &[Vertex], b: &[Vertex]) -> Vec<Vertex> {
    debug_assert_eq!(interior_a.len() + 1, b.len());
    let mut out = vec![from];
    for i in 0..b.len() {
        out.push(b[i]);
        if i < interior_a.len() {
            out.push(interior_a[i]);
        }
    }
    out.push(to);
    out
}

/// Odd path from an A-vertex to a B-vertex: a†, b_1, t_1, ..., t_k, b.
fn a_to_b_path(from: Vertex, to: Vertex, interior_a: &[Vertex], b_interior: &[Vertex]) -> Vec<Vertex> {
    debug_assert_eq!(interior_a.len(), b_interior.len());
    let mut out = vec![from];
    for i in 0..interior_a.len() {
        out.push(b_interior[i]);
        out.push(interior_a[i]);
    }
    out.push(to);
    out
}

/// Even path from one B-vertex to another: b, a_1, b_1, ..., a_k, b†.
fn b_to_b_path(from: Vertex, to: Vertex, interior_a: &[Vertex], b_interior: &[Vertex]) -> Vec<Vertex> {
    debug_assert_eq!(interior_a.len(), b_interior.len() + 1);
    let mut out = vec![from];
    for i in 0..interior_a.len() {
        out.push(interior_a[i]);
        if i < b_interior.len() {
            out.push(b_interior[i]);
        }
    }
    out.push(to);
    out
}

/// Closes two paths with shared endpoints into a cycle.
fn close_paths(path: &[Vertex], other: &[Vertex]) -> Result<Cycle> {
    let mut verts: Vec<Vertex> = path.to_vec();
    let other = if other[0] == verts[0] {
        other.to_vec()
    } else {
        other.iter().rev().copied().collect()
    };
    debug_assert_eq!(other[0], verts[0]);
    debug_assert_eq!(other.last(), verts.last());
    verts.extend(other[1..other.len() - 1].iter().rev().copied());
    Cycle::new(verts)
}

fn oriented_from(path: &[Vertex], start: Vertex) -> Vec<Vertex> {
    if path[0] == start {
        path.to_vec()
    } else {
        path.iter().rev().copied().collect()
    }
}

fn extend_permutation(
    psi: &mut std::collections::BTreeMap<Vertex, Vertex>,
    part: u16,
    size: usize,
) {
    let mapped: BTreeSet<Vertex> = psi.keys().copied().filter(|v| v.part == part).collect();
    let images: BTreeSet<Vertex> = psi
        .iter()
        .filter(|(k, _)| k.part == part)
        .map(|(_, &v)| v)
        .collect();
    let free_src: Vec<Vertex> = (0..size)
        .map(|i| Vertex::new(part as usize, i))
        .filter(|v| !mapped.contains(v))
        .collect();
    let free_dst: Vec<Vertex> = (0..size)
        .map(|i| Vertex::new(part as usize, i))
        .filter(|v| !images.contains(v))
        .collect();
    for (s, d) in free_src.into_iter().zip(free_dst) {
        psi.insert(s, d);
    }
}

/// Per-layer sanity: the prefix packing is valid and its leave is exactly
/// the carried split.
fn check_layer(
    sizes: &[usize],
    parts: usize,
    cycles: &[Cycle],
    split: &Option<PathSplit>,
) -> Result<()> {
    let host = Arc::new(HostGraph::multipartite(sizes[..parts].to_vec())?);
    let packing = Packing::new(host, cycles.to_vec(), None).map_err(|e| {
        Error::InternalTransformFailure(format!("prefix packing invalid: {e}"))
    })?;
    let leave = packing.leave();
    match split {
        None => {
            if leave.edge_count() != 0 {
                return Err(Error::InternalTransformFailure(format!(
                    "expected an empty prefix leave, found {} edges",
                    leave.edge_count()
                )));
            }
        }
        Some(s) => {
            let edges = s.edges();
            if leave.edge_count() != edges.len()
                || edges.iter().any(|&e| !leave.contains_edge(e))
            {
                return Err(Error::InternalTransformFailure(
                    "prefix leave does not match the carried paths".into(),
                ));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::BuildOptions;

    #[test]
    fn three_parts_of_six_into_four_cycles() {
        let mut ctx = BuildCtx::new(&BuildOptions::default());
        let p = decompose_multipartite(&[6, 6, 6], 4, &mut ctx).unwrap();
        assert!(p.is_decomposition());
        assert_eq!(p.cycle_lengths(), vec![4; 27]);
    }

    #[test]
    fn two_parts_of_twelve_into_eight_cycles() {
        let mut ctx = BuildCtx::new(&BuildOptions::default());
        let p = decompose_multipartite(&[12, 12], 8, &mut ctx).unwrap();
        assert!(p.is_decomposition());
        assert_eq!(p.cycle_lengths(), vec![8; 18]);
    }

    #[test]
    fn rejects_bad_divisibility() {
        let mut ctx = BuildCtx::new(&BuildOptions::default());
        // 300 = 4 mod 8
        assert!(matches!(
            decompose_multipartite(&[10, 10, 10], 8, &mut ctx),
            Err(Error::HypothesesViolated(_))
        ));
    }

    #[test]
    fn rejects_six_cycles() {
        let mut ctx = BuildCtx::new(&BuildOptions::default());
        assert!(matches!(
            decompose_multipartite(&[8, 8, 8], 6, &mut ctx),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn four_parts_of_ten_into_eight_cycles() {
        // layer leftovers (4, 0, 4): a two-path start, one plain union,
        // and a closing merge
        let mut ctx = BuildCtx::new(&BuildOptions::default());
        let p = decompose_multipartite(&[10, 10, 10, 10], 8, &mut ctx).unwrap();
        assert!(p.is_decomposition());
        assert_eq!(p.cycle_lengths(), vec![8; 75]);
    }

    #[test]
    fn five_parts_of_twelve_into_ten_cycles() {
        // layer leftovers (4, 8, 12, 6) walk the mid-range states through
        // a path-growing merge, a both-paths extension, and a final close
        let mut ctx = BuildCtx::new(&BuildOptions::default());
        let p = decompose_multipartite(&[12, 12, 12, 12, 12], 10, &mut ctx).unwrap();
        assert!(p.is_decomposition());
        assert_eq!(p.cycle_lengths(), vec![10; 144]);
    }

    #[test]
    fn three_parts_of_ten_into_eight_cycles() {
        let mut ctx = BuildCtx::new(&BuildOptions::default());
        // 10*10*3 = 300 edges; 300 = 4 mod 8 fails, so use sizes 10,10,12:
        // edges = 10*10 + 10*12 + 10*12 = 340 = 4 mod 8; adjust to 12,12,10:
        // same sum. use 12,12,8? 8 < m+2. take 10,10,14: 100+140+140 = 380
        // = 4 mod 8. 12,12,12: 432 = 0 mod 8.
        let p = decompose_multipartite(&[12, 12, 12], 8, &mut ctx).unwrap();
        assert!(p.is_decomposition());
        assert_eq!(p.cycle_lengths(), vec![8; 54]);
    }
}

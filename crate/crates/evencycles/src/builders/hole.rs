//! Uniform even-cycle decompositions of `K_v - K_u`.
//!
//! The host splits at a designated hole vertex into a complete graph on
//! the outside plus that vertex, and a complete bipartite graph between
//! the remaining hole vertices and the outside. A cycle packing of the
//! complete part, with its single-cycle leave relabelled onto witness
//! vertices, meets a two-path leave of the bipartite part to close the
//! last two cycles.

use super::sets::{find_disjoint_sets, good_triple};
use super::two_path::two_path_leave;
use super::{decompose_bipartite, BuildCtx};
use crate::base::pack_complete_graph_uniform;
use crate::error::{Error, Result};
use crate::model::{Cycle, HostGraph, LengthList, Packing, Vertex};
use crate::transforms::PathSplit;
use std::collections::BTreeSet;
use std::sync::Arc;

/// `m`-cycle decomposition of `K_v - K_u` for odd `v, u` with
/// `u >= m+1`, `v-u >= m`, and `m` dividing the edge count.
pub fn decompose_hole(v: usize, u: usize, m: usize, ctx: &mut BuildCtx) -> Result<Packing> {
    if v % 2 == 0 || u % 2 == 0 {
        return Err(Error::HypothesesViolated(format!(
            "orders ({v},{u}) must both be odd"
        )));
    }
    if m % 2 != 0 || m < 4 {
        return Err(Error::HypothesesViolated(format!(
            "cycle length {m} must be even and at least 4"
        )));
    }
    if u < m + 1 {
        return Err(Error::HypothesesViolated(format!(
            "hole size {u} is below m+1 = {}",
            m + 1
        )));
    }
    if v < u + m {
        return Err(Error::HypothesesViolated(format!(
            "outside size {} is below m = {m}",
            v - u
        )));
    }
    let edges = v * (v - 1) / 2 - u * (u - 1) / 2;
    if edges % m != 0 {
        return Err(Error::HypothesesViolated(format!(
            "edge count {edges} is not divisible by {m}"
        )));
    }

    let host = Arc::new(HostGraph::complete_minus_clique(v, u)?);
    let w_size = v - u;
    let n1 = w_size + 1;
    let e1 = n1 * (n1 - 1) / 2;
    if e1 % 2 != 0 {
        return Err(Error::InternalTransformFailure(
            "complete part has odd size, which the hypotheses should exclude".into(),
        ));
    }
    let r = e1 % m;
    let e = if r == 0 {
        0
    } else if r == 2 {
        m + 2
    } else {
        r
    };
    if m == 4 && e != 0 {
        return Err(Error::InternalTransformFailure(
            "4-cycle case must have an empty complete-part leave".into(),
        ));
    }
    ctx.log(|| format!("hole: split at one hole vertex, complete part K_{n1}, leave {e}"));

    // pack the complete part: its abstract hole vertex is the designated
    // hole vertex, its outside is W in order
    let p1 = pack_complete_graph_uniform(n1, m, e, ctx.seed, ctx.jobs)?;
    let map1 = |x: Vertex| -> Vertex {
        if x.part == 0 {
            Vertex::new(0, 0)
        } else {
            Vertex::new(1, x.index as usize)
        }
    };

    // bipartite part: remaining hole vertices against W
    let map2 = |x: Vertex| -> Vertex {
        if x.part == 0 {
            Vertex::new(0, x.index as usize + 1)
        } else {
            Vertex::new(1, x.index as usize)
        }
    };

    let mut cycles: Vec<Cycle> = Vec::new();

    if e == 0 {
        for c in p1.cycles() {
            cycles.push(Cycle::new(c.vertices().iter().map(|&x| map1(x)).collect())?);
        }
        let e2 = (u - 1) * w_size;
        let lens = LengthList::new(vec![m; e2 / m])?;
        let p2 = decompose_bipartite(u - 1, w_size, false, &lens, ctx)?;
        for c in p2.cycles() {
            cycles.push(Cycle::new(c.vertices().iter().map(|&x| map2(x)).collect())?);
        }
        let packing = Packing::new(host, cycles, None)?;
        return finish(packing, m);
    }

    // e != 0 forces room to spare on both sides
    if u < m + 3 || w_size < m + 2 {
        return Err(Error::InternalTransformFailure(format!(
            "nonzero complete-part leave with u = {u}, outside = {w_size}"
        )));
    }
    // bipartite-part paths and the complete-part path lengths
    let (p2_len, q2_len, p1_len) = if e <= m - 2 {
        (m - 2, m - e + 2, 2)
    } else {
        (m - 4, 2, 4)
    };
    let l2 = p2_len + q2_len;
    let (p2, split2) = two_path_leave(u - 1, w_size, m, l2, p2_len, q2_len, 1, ctx)?;
    let split2 = PathSplit::new(
        split2.first.iter().map(|&x| map2(x)).collect(),
        split2.second.iter().map(|&x| map2(x)).collect(),
    );
    for c in p2.cycles() {
        cycles.push(Cycle::new(c.vertices().iter().map(|&x| map2(x)).collect())?);
    }
    let (y, z) = split2.endpoints();
    debug_assert_eq!(y.part, 1);
    debug_assert_eq!(z.part, 1);

    // witness vertices in W avoiding the respective bipartite paths
    let w_set: BTreeSet<Vertex> = (0..w_size).map(|i| Vertex::new(1, i)).collect();
    let s_set: BTreeSet<Vertex> = split2.first.iter().copied().filter(|x| x.part == 1).collect();
    let t_set: BTreeSet<Vertex> = split2
        .second
        .iter()
        .copied()
        .filter(|x| x.part == 1)
        .collect();
    let s_need = p1_len - 1;
    let t_need = (e - p1_len) - 1;
    if !good_triple(&w_set, &s_set, &t_set, s_need, t_need) {
        return Err(Error::InternalTransformFailure(
            "witness triple is not good, which the hypotheses should guarantee".into(),
        ));
    }
    let (s_prime, t_prime) = find_disjoint_sets(&w_set, &s_set, &t_set, s_need, t_need)?;

    // target leave cycle in host coordinates: the p1-path from y to z over
    // S', then the complementary path back over T'
    let mut target: Vec<Vertex> = Vec::with_capacity(e);
    target.push(y);
    target.extend(s_prime.iter().copied());
    target.push(z);
    target.extend(t_prime.iter().rev().copied());
    debug_assert_eq!(target.len(), e);

    // relabel the complete part so its leave cycle lands on the target
    let leave1 = p1.leave();
    let leave_cycle = crate::model::trace_cycle(&leave1.edges())?;
    let mut phi: std::collections::BTreeMap<Vertex, Vertex> = std::collections::BTreeMap::new();
    for (i, &x) in leave_cycle.vertices().iter().enumerate() {
        phi.insert(map1(x), target[i]);
    }
    let mapped: BTreeSet<Vertex> = phi.keys().copied().collect();
    let images: BTreeSet<Vertex> = phi.values().copied().collect();
    let domain: Vec<Vertex> = std::iter::once(Vertex::new(0, 0))
        .chain((0..w_size).map(|i| Vertex::new(1, i)))
        .collect();
    let free_sources: Vec<Vertex> = domain
        .iter()
        .copied()
        .filter(|x| !mapped.contains(x))
        .collect();
    let free_targets: Vec<Vertex> = domain
        .iter()
        .copied()
        .filter(|x| !images.contains(x))
        .collect();
    for (src, dst) in free_sources.into_iter().zip(free_targets) {
        phi.insert(src, dst);
    }
    for c in p1.cycles() {
        cycles.push(Cycle::new(
            c.vertices().iter().map(|&x| phi[&map1(x)]).collect(),
        )?);
    }

    // close the two straddling cycles
    let first_path = oriented(&split2.first, y);
    let second_path = oriented(&split2.second, y);
    let mut c1: Vec<Vertex> = first_path;
    c1.extend(s_prime.iter().rev().copied());
    cycles.push(Cycle::new(c1)?);
    let mut c2: Vec<Vertex> = second_path;
    c2.extend(t_prime.iter().rev().copied());
    cycles.push(Cycle::new(c2)?);

    let packing = Packing::new(host, cycles, None)?;
    finish(packing, m)
}

fn oriented(path: &[Vertex], start: Vertex) -> Vec<Vertex> {
    if path[0] == start {
        path.to_vec()
    } else {
        path.iter().rev().copied().collect()
    }
}

fn finish(packing: Packing, m: usize) -> Result<Packing> {
    if !packing.is_decomposition() {
        return Err(Error::InternalTransformFailure(
            "hole decomposition left uncovered edges".into(),
        ));
    }
    if packing.cycles().iter().any(|c| c.len() != m) {
        return Err(Error::InternalTransformFailure(
            "hole decomposition produced a cycle of the wrong length".into(),
        ));
    }
    Ok(packing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::BuildOptions;

    #[test]
    fn hole_13_5_into_four_cycles() {
        let mut ctx = BuildCtx::new(&BuildOptions::default());
        let p = decompose_hole(13, 5, 4, &mut ctx).unwrap();
        assert!(p.is_decomposition());
        assert_eq!(p.cycle_lengths(), vec![4; 17]);
    }

    #[test]
    fn hole_19_7_into_six_cycles() {
        let mut ctx = BuildCtx::new(&BuildOptions::default());
        let p = decompose_hole(19, 7, 6, &mut ctx).unwrap();
        assert!(p.is_decomposition());
        assert_eq!(p.cycle_lengths(), vec![6; 25]);
    }

    #[test]
    fn hole_rejects_bad_divisibility() {
        let mut ctx = BuildCtx::new(&BuildOptions::default());
        // binom(9,2) - binom(5,2) = 26, not divisible by 4
        assert!(matches!(
            decompose_hole(9, 5, 4, &mut ctx),
            Err(Error::HypothesesViolated(_))
        ));
    }

    #[test]
    fn hole_rejects_small_hole() {
        let mut ctx = BuildCtx::new(&BuildOptions::default());
        assert!(matches!(
            decompose_hole(13, 3, 4, &mut ctx),
            Err(Error::HypothesesViolated(_))
        ));
    }
}

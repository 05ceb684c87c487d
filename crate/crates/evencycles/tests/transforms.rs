//! Leave-transform behaviour on explicitly constructed instances.

use evencycles::model::{classify, ComponentClass, Cycle, Edge, HostGraph, Vertex};
use evencycles::sampling::packing_with_leave;
use evencycles::transforms::{
    attach_cycles, chain_reduction_step, chain_to_cycles, compute_excess, equitable_step,
    flatten_out, join_cycles, paths_to_decomposition, split_path_leave, squash_to_two_cycles,
    Choice, ReductionVariant, TransformOutcome,
};
use evencycles::Error;
use std::sync::Arc;

fn v(p: usize, i: usize) -> Vertex {
    Vertex::new(p, i)
}

fn cycle_edges(vs: &[(usize, usize)]) -> Vec<Edge> {
    Cycle::new(vs.iter().map(|&(p, i)| v(p, i)).collect())
        .unwrap()
        .edges()
        .collect()
}

/// (4,6)-chain glued at p0.0.
fn chain_4_6_edges() -> Vec<Edge> {
    let mut e = cycle_edges(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
    e.extend(cycle_edges(&[(0, 0), (1, 2), (0, 2), (1, 3), (0, 3), (1, 4)]));
    e
}

#[test]
fn split_path_on_chain_shows_both_branches_over_seeds() {
    let host = Arc::new(HostGraph::bipartite(6, 6).unwrap());
    let leave = chain_4_6_edges();
    // 4-path crossing the link, endpoints with disjoint leave
    // neighbourhoods so the terminus is not forced
    let path = vec![v(0, 1), v(1, 0), v(0, 0), v(1, 2), v(0, 2)];
    let mut saw_decomposed = false;
    let mut saw_reshape = false;
    for seed in 0..200 {
        let Some(p) = packing_with_leave(&host, &leave, seed) else {
            continue;
        };
        let out = split_path_leave(&p, &path).unwrap();
        match out.outcome {
            TransformOutcome::Decomposed(cycles) => {
                let mut lens: Vec<usize> = cycles.iter().map(Cycle::len).collect();
                lens.sort_unstable();
                assert_eq!(lens, vec![4, 6]);
                // the two cycles partition the new leave
                let extended = out.packing.with_cycles(cycles).unwrap();
                assert_eq!(extended.leave().edge_count(), 0);
                saw_decomposed = true;
            }
            TransformOutcome::NewLeave(structure) => {
                // for a 2-chain the reshape is again a 2-chain (rings only
                // appear from chains of three or more cycles)
                let comp = structure.only_component().expect("one component");
                assert!(
                    comp.chain().is_some() || comp.ring().is_some(),
                    "reshaped leave must stay a chain or ring, got {:?}",
                    comp.class
                );
                saw_reshape = true;
            }
        }
        if saw_decomposed && saw_reshape {
            break;
        }
    }
    assert!(saw_decomposed, "never saw the decomposition branch");
    assert!(saw_reshape, "never saw the reshape branch");
}

#[test]
fn split_path_rejects_bad_inputs() {
    let host = Arc::new(HostGraph::bipartite(6, 6).unwrap());
    let leave = chain_4_6_edges();
    let p = packing_with_leave(&host, &leave, 0).unwrap();
    // the chord path[1]-path[4] = p0.0-p1.1 is a leave edge
    let chord = vec![v(1, 2), v(0, 0), v(1, 0), v(0, 1), v(1, 1)];
    assert!(matches!(
        split_path_leave(&p, &chord),
        Err(Error::PreconditionViolated(_))
    ));
    let repeated = vec![v(1, 0), v(0, 0), v(1, 1), v(0, 1), v(1, 0)];
    assert!(matches!(
        split_path_leave(&p, &repeated),
        Err(Error::PreconditionViolated(_))
    ));
    let odd = vec![v(1, 1), v(0, 1), v(1, 0), v(0, 0)];
    assert!(matches!(
        split_path_leave(&p, &odd),
        Err(Error::PreconditionViolated(_))
    ));
}

/// (6,6)-chain glued at p0.0 inside K_{6,6}.
fn chain_6_6_edges() -> Vec<Edge> {
    let mut e = cycle_edges(&[(0, 0), (1, 0), (0, 1), (1, 1), (0, 2), (1, 2)]);
    e.extend(cycle_edges(&[(0, 0), (1, 3), (0, 3), (1, 4), (0, 4), (1, 5)]));
    e
}

#[test]
fn chain_reduction_formula_holds() {
    let host = Arc::new(HostGraph::bipartite(6, 6).unwrap());
    let leave = chain_6_6_edges();
    let mut saw_done = false;
    let mut saw_chain = false;
    for seed in 0..200 {
        let Some(p) = packing_with_leave(&host, &leave, seed) else {
            continue;
        };
        let out = chain_reduction_step(&p, 6, 8, ReductionVariant::I, &mut Choice::canonical())
            .unwrap();
        match out.outcome {
            TransformOutcome::Decomposed(cycles) => {
                let mut lens: Vec<usize> = cycles.iter().map(Cycle::len).collect();
                lens.sort_unstable();
                assert_eq!(lens, vec![4, 8]);
                saw_done = true;
            }
            TransformOutcome::NewLeave(structure) => {
                // (m-p+2, 2p+q-m-2) = (4, 8)
                let comp = structure.only_component().unwrap();
                let mut prof = comp.profile().unwrap();
                prof.sort_unstable();
                assert_eq!(prof, vec![4, 8]);
                saw_chain = true;
            }
        }
        if saw_done && saw_chain {
            break;
        }
    }
    assert!(saw_done && saw_chain, "both outcomes should occur over seeds");
}

#[test]
fn chain_reduction_p_equals_m_is_immediate() {
    let host = Arc::new(HostGraph::bipartite(6, 6).unwrap());
    let p = packing_with_leave(&host, &chain_6_6_edges(), 1).unwrap();
    let out =
        chain_reduction_step(&p, 6, 6, ReductionVariant::I, &mut Choice::canonical()).unwrap();
    match out.outcome {
        TransformOutcome::Decomposed(cycles) => {
            assert_eq!(cycles.len(), 2);
            assert!(cycles.iter().all(|c| c.len() == 6));
            // no switch performed
            assert_eq!(out.packing.cycles(), p.cycles());
        }
        _ => panic!("expected immediate decomposition"),
    }
}

#[test]
fn chain_to_cycles_four_eight_into_six_six() {
    let host = Arc::new(HostGraph::bipartite(6, 6).unwrap());
    // (4,8)-chain glued at p0.0
    let mut leave = cycle_edges(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
    leave.extend(cycle_edges(&[
        (0, 0),
        (1, 2),
        (0, 2),
        (1, 3),
        (0, 3),
        (1, 4),
        (0, 4),
        (1, 5),
    ]));
    for seed in 0..5 {
        let Some(p) = packing_with_leave(&host, &leave, seed) else {
            continue;
        };
        let before = p.cycle_lengths();
        let done = chain_to_cycles(&p, 6, 6, &mut Choice::canonical()).unwrap();
        assert!(done.is_decomposition());
        let mut want = before;
        want.extend([6, 6]);
        want.sort_unstable();
        assert_eq!(done.cycle_lengths(), want);
        return;
    }
    panic!("no fixture produced");
}

#[test]
fn paths_to_decomposition_two_ring() {
    let host = Arc::new(HostGraph::bipartite(6, 6).unwrap());
    // two 4-cycles sharing p0.0 and p0.1
    let mut leave = cycle_edges(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
    leave.extend(cycle_edges(&[(0, 0), (1, 2), (0, 1), (1, 3)]));
    let p = packing_with_leave(&host, &leave, 0).unwrap();
    let done = paths_to_decomposition(&p, 4, 4, &mut Choice::canonical()).unwrap();
    assert!(done.is_decomposition());
}

#[test]
fn paths_to_decomposition_three_chain() {
    let host = Arc::new(HostGraph::bipartite(8, 8).unwrap());
    // (4,4,4)-chain with links p0.0 and p0.2
    let mut leave = cycle_edges(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
    leave.extend(cycle_edges(&[(0, 0), (1, 2), (0, 2), (1, 3)]));
    leave.extend(cycle_edges(&[(0, 2), (1, 4), (0, 3), (1, 5)]));
    let p = packing_with_leave(&host, &leave, 0).unwrap();
    let done = paths_to_decomposition(&p, 4, 8, &mut Choice::canonical()).unwrap();
    assert!(done.is_decomposition());
    let lens = done.cycle_lengths();
    assert!(lens.contains(&8));
}

#[test]
fn attach_cycles_two_components() {
    let host = Arc::new(HostGraph::bipartite(8, 8).unwrap());
    // 2-chain of size 8 at p0.0 plus a disjoint 4-cycle
    let mut leave = cycle_edges(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
    leave.extend(cycle_edges(&[(0, 0), (1, 2), (0, 2), (1, 3)]));
    leave.extend(cycle_edges(&[(0, 4), (1, 4), (0, 5), (1, 5)]));
    let p = packing_with_leave(&host, &leave, 0).unwrap();
    for r in [0usize, 1usize] {
        let (attached, split) = attach_cycles(&p, 4, 8, r, &mut Choice::canonical()).unwrap();
        assert_eq!(split.lengths(), (4, 8));
        let structure = classify(&attached.leave().edges()).unwrap();
        let comp = structure.only_component().expect("single chain leave");
        assert!(comp.chain().is_some());
        let (e1, e2) = split.endpoints();
        assert!(
            e1.part as usize == r || e2.part as usize == r,
            "no endpoint in part {r}"
        );
        // the split partitions the leave
        assert_eq!(split.edges().len(), 12);
        for e in split.edges() {
            assert!(attached.leave().contains_edge(e));
        }
    }
}

#[test]
fn attach_cycles_rejects_small_targets() {
    let host = Arc::new(HostGraph::bipartite(8, 8).unwrap());
    let mut leave = cycle_edges(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
    leave.extend(cycle_edges(&[(0, 0), (1, 2), (0, 2), (1, 3)]));
    leave.extend(cycle_edges(&[(0, 4), (1, 4), (0, 5), (1, 5)]));
    let p = packing_with_leave(&host, &leave, 0).unwrap();
    // k = 2, so m1 must be at least 3
    assert!(matches!(
        attach_cycles(&p, 2, 10, 0, &mut Choice::canonical()),
        Err(Error::PreconditionViolated(_))
    ));
}

#[test]
fn squash_two_chain_into_two_fours() {
    let host = Arc::new(HostGraph::bipartite(6, 6).unwrap());
    let mut leave = cycle_edges(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
    leave.extend(cycle_edges(&[(0, 0), (1, 2), (0, 2), (1, 3)]));
    let p = packing_with_leave(&host, &leave, 0).unwrap();
    let done = squash_to_two_cycles(&p, 4, 4, &mut Choice::canonical()).unwrap();
    assert!(done.is_decomposition());
}

#[test]
fn squash_with_stray_cycle_in_k1010() {
    let host = Arc::new(HostGraph::bipartite(10, 10).unwrap());
    // 2-chain (4,6) at p0.0 plus a disjoint 6-cycle: k = 2, l = 16
    let mut leave = cycle_edges(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
    leave.extend(cycle_edges(&[(0, 0), (1, 2), (0, 2), (1, 3), (0, 3), (1, 4)]));
    leave.extend(cycle_edges(&[(0, 5), (1, 5), (0, 6), (1, 6), (0, 7), (1, 7)]));
    let p = packing_with_leave(&host, &leave, 0).unwrap();
    let before = p.cycle_lengths();
    let done = squash_to_two_cycles(&p, 6, 10, &mut Choice::canonical()).unwrap();
    assert!(done.is_decomposition());
    let mut want = before;
    want.extend([6, 10]);
    want.sort_unstable();
    assert_eq!(done.cycle_lengths(), want);
}

#[test]
fn squash_rejects_odd_targets() {
    let host = Arc::new(HostGraph::bipartite(6, 6).unwrap());
    let mut leave = cycle_edges(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
    leave.extend(cycle_edges(&[(0, 0), (1, 2), (0, 2), (1, 3)]));
    let p = packing_with_leave(&host, &leave, 0).unwrap();
    assert!(matches!(
        squash_to_two_cycles(&p, 3, 5, &mut Choice::canonical()),
        Err(Error::PreconditionViolated(_))
    ));
}

#[test]
fn equitable_step_moves_exactly_one_degree_pair() {
    let host = Arc::new(HostGraph::bipartite(6, 6).unwrap());
    // 2-ring: links p0.0, p0.1 have degree 4 and are not cut vertices
    let mut leave = cycle_edges(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
    leave.extend(cycle_edges(&[(0, 0), (1, 2), (0, 1), (1, 3)]));
    let p = packing_with_leave(&host, &leave, 0).unwrap();
    let u = v(0, 0);
    let w = v(0, 4);
    let before_comps = classify(&p.leave().edges()).unwrap().components.len();
    let stepped = equitable_step(&p, u, w, &mut Choice::canonical()).unwrap();
    let after = stepped.leave();
    assert_eq!(after.degree(u), 2);
    assert_eq!(after.degree(w), 2);
    let after_comps = classify(&after.edges()).unwrap().components.len();
    // u is not a cut vertex, so the component count is preserved
    assert_eq!(before_comps, after_comps);
}

#[test]
fn equitable_step_requires_strict_inequality() {
    let host = Arc::new(HostGraph::bipartite(6, 6).unwrap());
    let leave = cycle_edges(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
    let p = packing_with_leave(&host, &leave, 0).unwrap();
    assert!(matches!(
        equitable_step(&p, v(0, 0), v(0, 1), &mut Choice::canonical()),
        Err(Error::PreconditionViolated(_))
    ));
}

#[test]
fn excess_examples() {
    let host = Arc::new(HostGraph::bipartite(6, 6).unwrap());
    let single = packing_with_leave(&host, &cycle_edges(&[(0, 0), (1, 0), (0, 1), (1, 1)]), 0)
        .unwrap();
    assert_eq!(compute_excess(&single), 0);

    let mut ring = cycle_edges(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
    ring.extend(cycle_edges(&[(0, 0), (1, 2), (0, 1), (1, 3)]));
    let ring_p = packing_with_leave(&host, &ring, 0).unwrap();
    assert_eq!(compute_excess(&ring_p), 2);

    let mut chain = cycle_edges(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
    chain.extend(cycle_edges(&[(0, 0), (1, 2), (0, 2), (1, 3)]));
    let chain_p = packing_with_leave(&host, &chain, 0).unwrap();
    assert_eq!(compute_excess(&chain_p), 1);
}

#[test]
fn flatten_identity_when_already_flat() {
    let host = Arc::new(HostGraph::bipartite(6, 6).unwrap());
    let mut chain = cycle_edges(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
    chain.extend(cycle_edges(&[(0, 0), (1, 2), (0, 2), (1, 3)]));
    let p = packing_with_leave(&host, &chain, 0).unwrap();
    let flat = flatten_out(&p, &mut Choice::canonical()).unwrap();
    assert_eq!(flat.leave().edges(), p.leave().edges());
}

#[test]
fn flatten_three_ring_in_k88() {
    let host = Arc::new(HostGraph::bipartite(8, 8).unwrap());
    // (4,4,4)-ring: links p0.0, p0.1, p0.2; l = 12, d = 3, k0 = 1
    let mut leave = cycle_edges(&[(0, 0), (1, 0), (0, 1), (1, 1)]);
    leave.extend(cycle_edges(&[(0, 1), (1, 2), (0, 2), (1, 3)]));
    leave.extend(cycle_edges(&[(0, 2), (1, 4), (0, 0), (1, 5)]));
    let p = packing_with_leave(&host, &leave, 0).unwrap();
    assert_eq!(compute_excess(&p), 3);
    let flat = flatten_out(&p, &mut Choice::canonical()).unwrap();
    let leave = flat.leave();
    let deg4: Vec<Vertex> = host.vertices().filter(|&x| leave.degree(x) >= 4).collect();
    assert_eq!(deg4.len(), 1);
    assert_eq!(leave.degree(deg4[0]), 4);
    let comps = classify(&leave.edges()).unwrap().components.len();
    assert!(comps <= 2, "bound min(k0+d-1, l/4-1) = 2 violated: {comps}");
}

#[test]
fn join_cycles_in_k66() {
    let host = Arc::new(HostGraph::bipartite(6, 6).unwrap());
    let p = packing_with_leave(&host, &[], 3).expect("full 4-cycle partition of K_{6,6}");
    assert!(p.is_decomposition());
    assert_eq!(p.cycle_lengths(), vec![4; 9]);
    let merged = join_cycles(&p, 4, 4, 4, &mut Choice::canonical()).unwrap();
    let mut want = vec![4; 7];
    want.push(8);
    assert_eq!(merged.cycle_lengths(), want);
    assert!(merged.is_decomposition());
}

#[test]
fn join_cycles_rejects_violated_hypotheses() {
    let host = Arc::new(HostGraph::bipartite(8, 8).unwrap());
    let p = packing_with_leave(&host, &[], 0).unwrap();
    // m + m' = 14 > 3h = 12
    assert!(matches!(
        join_cycles(&p, 6, 8, 4, &mut Choice::canonical()),
        Err(Error::PreconditionViolated(_))
    ));
}

#[test]
fn join_cycles_rejects_leave_bound_violation() {
    // K_{8,8}: merging m=4, m'=8 with h=8 needs m+m'+h = 20 <= 2a = 16
    let host = Arc::new(HostGraph::bipartite(8, 8).unwrap());
    let cover: Vec<Edge> = host.edges();
    let cycles = evencycles::base::search::find_cycle_partition(
        &host,
        &cover,
        &[4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 8, 8, 8],
        0,
        400,
        1,
    )
    .expect("K_{8,8} partitions into ten 4-cycles and three 8-cycles");
    let p = evencycles::model::Packing::new(host, cycles, None).unwrap();
    assert!(matches!(
        join_cycles(&p, 4, 8, 8, &mut Choice::canonical()),
        Err(Error::PreconditionViolated(_))
    ));
}

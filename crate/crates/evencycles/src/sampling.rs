//! Seeded random packings, used by the property suites and benches.

use crate::base::search::{random_cycle, Remain};
use crate::model::{Cycle, Edge, HostGraph, Packing};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;
use std::sync::Arc;

/// Greedily packs up to `max_cycles` random cycles with lengths drawn from
/// `length_pool` into the host. On odd hosts a random perfect matching is
/// placed first. The result is always a valid packing; it may hold fewer
/// cycles than requested when extraction stalls.
pub fn random_packing(
    host: &Arc<HostGraph>,
    rng: &mut ChaCha8Rng,
    max_cycles: usize,
    length_pool: &[usize],
) -> Packing {
    let matching = if host.is_odd_graph() {
        Some(random_matching(host, rng))
    } else {
        None
    };
    let mut remain = Remain::from_edges(host, &host.edges());
    if let Some(m) = &matching {
        for e in m {
            remain.remove(host.id(e.0), host.id(e.1));
        }
    }
    let mut cycles = Vec::new();
    let mut failures = 0;
    while cycles.len() < max_cycles && failures < 12 {
        let len = *length_pool.choose(rng).expect("length pool must not be empty");
        match random_cycle(&remain, rng, len, 10) {
            Some(ids) => {
                for i in 0..ids.len() {
                    remain.remove(ids[i], ids[(i + 1) % ids.len()]);
                }
                cycles.push(
                    Cycle::new(ids.into_iter().map(|i| host.vertex(i)).collect())
                        .expect("sampled cycle is simple"),
                );
            }
            None => failures += 1,
        }
    }
    Packing::new(host.clone(), cycles, matching).expect("sampled packing is valid")
}

/// Builds a packing of an even host whose leave is exactly `leave_edges`,
/// filling the complement with 4-cycles (plus one 6-cycle when the edge
/// count demands it).
pub fn packing_with_leave(
    host: &Arc<HostGraph>,
    leave_edges: &[Edge],
    seed: u64,
) -> Option<Packing> {
    assert!(host.is_even_graph(), "prescribed leaves need an even host");
    let cover: Vec<Edge> = host
        .edges()
        .into_iter()
        .filter(|e| !leave_edges.contains(e))
        .collect();
    let lengths = filler_lengths(cover.len())?;
    let cycles = crate::base::search::find_cycle_partition(host, &cover, &lengths, seed, 200, 1)?;
    Packing::new(host.clone(), cycles, None).ok()
}

/// All-4 filler, with a single 6-cycle absorbing a remainder of 2 mod 4.
fn filler_lengths(total: usize) -> Option<Vec<usize>> {
    if total % 2 != 0 {
        return None;
    }
    if total % 4 == 0 {
        Some(vec![4; total / 4])
    } else if total >= 6 {
        let mut v = vec![4; (total - 6) / 4];
        v.push(6);
        Some(v)
    } else {
        None
    }
}

/// Random perfect matching of an odd bipartite host.
fn random_matching(host: &Arc<HostGraph>, rng: &mut ChaCha8Rng) -> BTreeSet<Edge> {
    let a = host.part_size(0);
    assert_eq!(host.num_parts(), 2, "matching sampling needs a bipartite host");
    assert_eq!(a, host.part_size(1));
    loop {
        let mut perm: Vec<usize> = (0..a).collect();
        perm.shuffle(rng);
        let edges: Vec<Edge> = (0..a)
            .map(|i| {
                Edge::new(
                    crate::model::Vertex::new(0, i),
                    crate::model::Vertex::new(1, perm[i]),
                )
            })
            .collect();
        if edges.iter().all(|e| host.adjacent(e.0, e.1)) {
            return edges.into_iter().collect();
        }
    }
}

/// Uniform random choice of a same-part vertex pair.
pub fn random_same_part_pair(
    host: &Arc<HostGraph>,
    rng: &mut ChaCha8Rng,
) -> (crate::model::Vertex, crate::model::Vertex) {
    loop {
        let part = rng.gen_range(0..host.num_parts());
        let size = host.part_size(part);
        if size < 2 {
            continue;
        }
        let i = rng.gen_range(0..size);
        let j = rng.gen_range(0..size);
        if i != j {
            return (
                crate::model::Vertex::new(part, i),
                crate::model::Vertex::new(part, j),
            );
        }
    }
}

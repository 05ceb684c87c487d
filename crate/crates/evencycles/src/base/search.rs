//! Seeded randomized cycle-partition search with an exact fallback.
//!
//! Greedy insertion pulls random cycles of the demanded lengths out of the
//! remaining edge set; when extraction stalls, a repair step dissolves a
//! couple of committed cycles near the stuck edges and retries. Attempts
//! are independently seeded, so a fixed master seed gives a deterministic
//! result even with parallel restarts (lowest successful attempt wins).

use crate::exec;
use crate::model::{BitIter, Cycle, Edge, HostGraph};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Mutable "remaining edges" graph over dense vertex ids.
pub(crate) struct Remain {
    n: usize,
    words: usize,
    rows: Vec<u64>,
    degrees: Vec<u32>,
    edge_count: usize,
}

impl Remain {
    pub(crate) fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        Remain {
            n,
            words,
            rows: vec![0u64; n * words],
            degrees: vec![0; n],
            edge_count: 0,
        }
    }

    pub(crate) fn from_edges(host: &HostGraph, edges: &[Edge]) -> Self {
        let mut r = Remain::new(host.num_vertices());
        for e in edges {
            r.add(host.id(e.0), host.id(e.1));
        }
        r
    }

    pub(crate) fn has(&self, x: usize, y: usize) -> bool {
        self.rows[x * self.words + y / 64] >> (y % 64) & 1 == 1
    }

    pub(crate) fn add(&mut self, x: usize, y: usize) {
        debug_assert!(!self.has(x, y));
        self.rows[x * self.words + y / 64] |= 1 << (y % 64);
        self.rows[y * self.words + x / 64] |= 1 << (x % 64);
        self.degrees[x] += 1;
        self.degrees[y] += 1;
        self.edge_count += 1;
    }

    pub(crate) fn remove(&mut self, x: usize, y: usize) {
        debug_assert!(self.has(x, y));
        self.rows[x * self.words + y / 64] &= !(1 << (y % 64));
        self.rows[y * self.words + x / 64] &= !(1 << (x % 64));
        self.degrees[x] -= 1;
        self.degrees[y] -= 1;
        self.edge_count -= 1;
    }

    pub(crate) fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub(crate) fn neighbors(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        BitIter::new(&self.rows[x * self.words..(x + 1) * self.words])
    }

    pub(crate) fn random_edge(&self, rng: &mut ChaCha8Rng) -> Option<(usize, usize)> {
        if self.edge_count == 0 {
            return None;
        }
        loop {
            let x = rng.gen_range(0..self.n);
            let d = self.degrees[x] as usize;
            if d == 0 {
                continue;
            }
            let k = rng.gen_range(0..d);
            let y = self.neighbors(x).nth(k).unwrap();
            return Some((x, y));
        }
    }

    /// Least remaining edge in id order.
    fn least_edge(&self) -> Option<(usize, usize)> {
        for x in 0..self.n {
            if self.degrees[x] > 0 {
                let y = self.neighbors(x).next().unwrap();
                return Some((x, y));
            }
        }
        None
    }
}

/// Random simple cycle of exactly `len` vertices in `remain`, containing a
/// random remaining edge. Depth-first with a node budget.
pub(crate) fn random_cycle(
    remain: &Remain,
    rng: &mut ChaCha8Rng,
    len: usize,
    tries: usize,
) -> Option<Vec<usize>> {
    for _ in 0..tries {
        let (x, y) = remain.random_edge(rng)?;
        let mut path = Vec::with_capacity(len);
        path.push(x);
        path.push(y);
        let mut in_path = vec![false; remain.n];
        in_path[x] = true;
        in_path[y] = true;
        let mut budget = 40 * len;
        if dfs_extend(remain, rng, &mut path, &mut in_path, len, &mut budget) {
            return Some(path);
        }
    }
    None
}

fn dfs_extend(
    remain: &Remain,
    rng: &mut ChaCha8Rng,
    path: &mut Vec<usize>,
    in_path: &mut [bool],
    len: usize,
    budget: &mut usize,
) -> bool {
    if *budget == 0 {
        return false;
    }
    *budget -= 1;
    let cur = *path.last().unwrap();
    if path.len() == len {
        return remain.has(cur, path[0]);
    }
    let mut cands: Vec<usize> = remain.neighbors(cur).filter(|&v| !in_path[v]).collect();
    cands.shuffle(rng);
    for v in cands {
        path.push(v);
        in_path[v] = true;
        if dfs_extend(remain, rng, path, in_path, len, budget) {
            return true;
        }
        path.pop();
        in_path[v] = false;
    }
    false
}

fn greedy_attempt(
    host: &HostGraph,
    cover: &[Edge],
    lengths: &[usize],
    seed: u64,
) -> Option<Vec<Cycle>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut remain = Remain::from_edges(host, cover);
    let mut pool: BTreeMap<usize, usize> = BTreeMap::new();
    for &l in lengths {
        *pool.entry(l).or_default() += 1;
    }
    let mut chosen: Vec<Vec<usize>> = Vec::with_capacity(lengths.len());
    let cap = 400 + 60 * lengths.len();
    for _ in 0..cap {
        if remain.edge_count() == 0 && pool.values().all(|&c| c == 0) {
            return Some(
                chosen
                    .into_iter()
                    .map(|ids| {
                        Cycle::new(ids.into_iter().map(|i| host.vertex(i)).collect())
                            .expect("search cycle is simple")
                    })
                    .collect(),
            );
        }
        let lens: Vec<(usize, usize)> = pool
            .iter()
            .filter(|&(_, &c)| c > 0)
            .map(|(&l, &c)| (l, c))
            .collect();
        if lens.is_empty() {
            return None;
        }
        let total: usize = lens.iter().map(|&(_, c)| c).sum();
        let mut pick = rng.gen_range(0..total);
        let mut target = lens[0].0;
        for &(l, c) in &lens {
            if pick < c {
                target = l;
                break;
            }
            pick -= c;
        }
        if let Some(cyc) = random_cycle(&remain, &mut rng, target, 24) {
            for i in 0..cyc.len() {
                remain.remove(cyc[i], cyc[(i + 1) % cyc.len()]);
            }
            *pool.get_mut(&target).unwrap() -= 1;
            chosen.push(cyc);
        } else {
            // repair around a stuck edge
            let Some((x, y)) = remain.random_edge(&mut rng) else {
                return None;
            };
            let mut touching: Vec<usize> = chosen
                .iter()
                .enumerate()
                .filter(|(_, c)| c.contains(&x) || c.contains(&y))
                .map(|(i, _)| i)
                .collect();
            if touching.is_empty() {
                touching = (0..chosen.len()).collect();
            }
            if touching.is_empty() {
                return None;
            }
            touching.shuffle(&mut rng);
            for &idx in touching.iter().take(2) {
                let cyc = &chosen[idx];
                for i in 0..cyc.len() {
                    remain.add(cyc[i], cyc[(i + 1) % cyc.len()]);
                }
                *pool.get_mut(&chosen[idx].len()).unwrap() += 1;
            }
            let mut kill: Vec<usize> = touching.iter().take(2).copied().collect();
            kill.sort_unstable_by(|a, b| b.cmp(a));
            for idx in kill {
                chosen.swap_remove(idx);
            }
        }
    }
    None
}

/// Exhaustive least-edge-first backtracking, bounded by a node budget.
fn exact_attempt(
    host: &HostGraph,
    cover: &[Edge],
    lengths: &[usize],
    node_cap: usize,
) -> Option<Vec<Cycle>> {
    let mut remain = Remain::from_edges(host, cover);
    let mut pool: BTreeMap<usize, usize> = BTreeMap::new();
    for &l in lengths {
        *pool.entry(l).or_default() += 1;
    }
    let mut budget = node_cap;
    let mut acc: Vec<Vec<usize>> = Vec::new();
    if exact_rec(&mut remain, &mut pool, &mut acc, &mut budget) {
        Some(
            acc.into_iter()
                .map(|ids| {
                    Cycle::new(ids.into_iter().map(|i| host.vertex(i)).collect())
                        .expect("search cycle is simple")
                })
                .collect(),
        )
    } else {
        None
    }
}

fn exact_rec(
    remain: &mut Remain,
    pool: &mut BTreeMap<usize, usize>,
    acc: &mut Vec<Vec<usize>>,
    budget: &mut usize,
) -> bool {
    if *budget == 0 {
        return false;
    }
    *budget -= 1;
    let Some((x, y)) = remain.least_edge() else {
        return pool.values().all(|&c| c == 0);
    };
    let lengths: Vec<usize> = pool
        .iter()
        .filter(|&(_, &c)| c > 0)
        .map(|(&l, _)| l)
        .collect();
    for len in lengths {
        let mut path = vec![x, y];
        let mut in_path = vec![false; remain.n];
        in_path[x] = true;
        in_path[y] = true;
        if exact_cycle_rec(remain, pool, acc, budget, &mut path, &mut in_path, len) {
            return true;
        }
    }
    false
}

#[allow(clippy::too_many_arguments)]
fn exact_cycle_rec(
    remain: &mut Remain,
    pool: &mut BTreeMap<usize, usize>,
    acc: &mut Vec<Vec<usize>>,
    budget: &mut usize,
    path: &mut Vec<usize>,
    in_path: &mut [bool],
    len: usize,
) -> bool {
    if *budget == 0 {
        return false;
    }
    if path.len() == len {
        // starting along the fixed least edge enumerates each cycle once
        if !remain.has(path[len - 1], path[0]) {
            return false;
        }
        for i in 0..len {
            remain.remove(path[i], path[(i + 1) % len]);
        }
        *pool.get_mut(&len).unwrap() -= 1;
        acc.push(path.clone());
        if exact_rec(remain, pool, acc, budget) {
            return true;
        }
        acc.pop();
        *pool.get_mut(&len).unwrap() += 1;
        for i in 0..len {
            remain.add(path[i], path[(i + 1) % len]);
        }
        return false;
    }
    *budget -= 1;
    let cur = *path.last().unwrap();
    let cands: Vec<usize> = remain.neighbors(cur).filter(|&v| !in_path[v]).collect();
    for v in cands {
        path.push(v);
        in_path[v] = true;
        if exact_cycle_rec(remain, pool, acc, budget, path, in_path, len) {
            path.pop();
            in_path[v] = false;
            return true;
        }
        path.pop();
        in_path[v] = false;
    }
    false
}

/// Looks for an edge-disjoint set of cycles with exactly the demanded
/// length multiset covering exactly `cover`.
pub fn find_cycle_partition(
    host: &Arc<HostGraph>,
    cover: &[Edge],
    lengths: &[usize],
    seed: u64,
    attempts: u64,
    jobs: usize,
) -> Option<Vec<Cycle>> {
    let total: usize = lengths.iter().sum();
    if total != cover.len() {
        return None;
    }
    if lengths.is_empty() {
        return Some(Vec::new());
    }
    let found = exec::first_success(0, attempts, jobs, |i| {
        greedy_attempt(host, cover, lengths, splitmix(seed, i))
    });
    if let Some((_, mut cycles)) = found {
        cycles.sort();
        return Some(cycles);
    }
    if cover.len() <= 64 {
        if let Some(mut cycles) = exact_attempt(host, cover, lengths, 3_000_000) {
            cycles.sort();
            return Some(cycles);
        }
    }
    None
}

/// Stable per-attempt seed derivation.
pub(crate) fn splitmix(seed: u64, salt: u64) -> u64 {
    let mut z = seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partitions_k44_into_four_cycles() {
        let host = Arc::new(HostGraph::bipartite(4, 4).unwrap());
        let edges = host.edges();
        let cycles = find_cycle_partition(&host, &edges, &[4, 4, 4, 4], 0, 50, 1).unwrap();
        assert_eq!(cycles.len(), 4);
        let mut seen = std::collections::BTreeSet::new();
        for c in &cycles {
            for e in c.edges() {
                assert!(seen.insert(e), "edge reused");
            }
        }
        assert_eq!(seen.len(), 16);
    }

    #[test]
    fn partitions_k66_into_six_cycles() {
        let host = Arc::new(HostGraph::bipartite(6, 6).unwrap());
        let edges = host.edges();
        let cycles = find_cycle_partition(&host, &edges, &[6; 6], 0, 50, 1).unwrap();
        assert_eq!(cycles.iter().map(Cycle::len).sum::<usize>(), 36);
    }

    #[test]
    fn respects_cover_subset() {
        let host = Arc::new(HostGraph::bipartite(4, 4).unwrap());
        // cover only the first two columns: an 8-edge K_{4,2}
        let cover: Vec<Edge> = host
            .edges()
            .into_iter()
            .filter(|e| e.1.index < 2)
            .collect();
        assert_eq!(cover.len(), 8);
        let cycles = find_cycle_partition(&host, &cover, &[4, 4], 1, 50, 1).unwrap();
        for c in &cycles {
            for e in c.edges() {
                assert!(cover.contains(&e));
            }
        }
    }

    #[test]
    fn infeasible_total_rejected_fast() {
        let host = Arc::new(HostGraph::bipartite(4, 4).unwrap());
        let edges = host.edges();
        assert!(find_cycle_partition(&host, &edges, &[4, 4, 4], 0, 5, 1).is_none());
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let host = Arc::new(HostGraph::bipartite(6, 6).unwrap());
        let edges = host.edges();
        let a = find_cycle_partition(&host, &edges, &[4, 4, 4, 6, 6, 6, 6], 7, 50, 1).unwrap();
        let b = find_cycle_partition(&host, &edges, &[4, 4, 4, 6, 6, 6, 6], 7, 50, 4).unwrap();
        assert_eq!(a, b);
    }
}

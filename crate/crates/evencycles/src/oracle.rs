//! Independent correctness checking and small-instance ground truth.
//!
//! The verifier re-derives host adjacency from the host parameters and
//! shares no code paths with the builders or the switch engine; it is the
//! only module the acceptance suite trusts. The brute-force decomposer
//! proves existence or non-existence exhaustively for hosts of at most 40
//! edges, and the mutator produces corrupted claims for negative testing.

use crate::error::{Error, Result};
use crate::model::format::Claim;
use crate::model::{HostKind, Vertex};
use std::collections::{BTreeMap, BTreeSet};

/// Outcome of checking a claimed packing or decomposition.
#[derive(Debug, Clone)]
pub struct Report {
    pub pass: bool,
    pub violations: Vec<String>,
    /// Non-decreasing multiset of claimed cycle lengths.
    pub lengths: Vec<usize>,
}

impl Report {
    pub fn render(&self) -> String {
        let mut out = String::new();
        if self.pass {
            out.push_str("PASS");
        } else {
            out.push_str("FAIL");
        }
        let lens: Vec<String> = self.lengths.iter().map(|l| l.to_string()).collect();
        out.push_str(&format!(" lengths {}\n", lens.join(",")));
        for v in &self.violations {
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

/// Host adjacency re-derived from the kind parameters alone.
fn adjacent(kind: &HostKind, x: Vertex, y: Vertex) -> bool {
    if x == y {
        return false;
    }
    match kind {
        HostKind::Bipartite { .. } | HostKind::Multipartite { .. } => x.part != y.part,
        HostKind::BipartiteMinusMatching { .. } => x.part != y.part && x.index != y.index,
        HostKind::CompleteMinusClique { .. } => !(x.part == 0 && y.part == 0),
    }
}

fn part_sizes(kind: &HostKind) -> Vec<usize> {
    match kind {
        HostKind::Bipartite { a, b } => vec![*a, *b],
        HostKind::BipartiteMinusMatching { a } => vec![*a, *a],
        HostKind::CompleteMinusClique { v, u } => vec![*u, *v - *u],
        HostKind::Multipartite { sizes } => sizes.clone(),
    }
}

fn all_vertices(kind: &HostKind) -> Vec<Vertex> {
    let mut out = Vec::new();
    for (p, &s) in part_sizes(kind).iter().enumerate() {
        for i in 0..s {
            out.push(Vertex::new(p, i));
        }
    }
    out
}

fn host_edges(kind: &HostKind) -> Vec<(Vertex, Vertex)> {
    let verts = all_vertices(kind);
    let mut out = Vec::new();
    for (i, &x) in verts.iter().enumerate() {
        for &y in &verts[i + 1..] {
            if adjacent(kind, x, y) {
                out.push((x, y));
            }
        }
    }
    out
}

fn norm(x: Vertex, y: Vertex) -> (Vertex, Vertex) {
    if x < y {
        (x, y)
    } else {
        (y, x)
    }
}

/// Checks a claim as a packing; with `expect_decomposition`, additionally
/// requires an empty leave. Every violation is reported, not just the
/// first.
pub fn verify(claim: &Claim, expect_decomposition: bool) -> Report {
    let kind = claim.host.kind();
    let sizes = part_sizes(kind);
    let mut violations: Vec<String> = Vec::new();
    let in_host = |v: Vertex| (v.part as usize) < sizes.len()
        && (v.index as usize) < sizes[v.part as usize];

    let mut used: BTreeMap<(Vertex, Vertex), usize> = BTreeMap::new();
    let mut lengths: Vec<usize> = Vec::new();
    for (ci, cyc) in claim.cycles.iter().enumerate() {
        lengths.push(cyc.len());
        if cyc.len() < 3 {
            violations.push(format!("cycle {ci} has fewer than 3 vertices"));
            continue;
        }
        let mut distinct: BTreeSet<Vertex> = BTreeSet::new();
        for &v in cyc {
            if !in_host(v) {
                violations.push(format!("cycle {ci}: vertex {v} is outside the host"));
            }
            if !distinct.insert(v) {
                violations.push(format!("cycle {ci}: vertex {v} repeats (open walk)"));
            }
        }
        for k in 0..cyc.len() {
            let x = cyc[k];
            let y = cyc[(k + 1) % cyc.len()];
            if !in_host(x) || !in_host(y) {
                continue;
            }
            if !adjacent(kind, x, y) {
                violations.push(format!("cycle {ci}: {x}-{y} is not a host edge"));
                continue;
            }
            *used.entry(norm(x, y)).or_default() += 1;
        }
    }
    lengths.sort_unstable();

    // the matching must exist exactly on odd hosts and be perfect
    let verts = all_vertices(kind);
    let degree: BTreeMap<Vertex, usize> = verts
        .iter()
        .map(|&v| (v, verts.iter().filter(|&&w| adjacent(kind, v, w)).count()))
        .collect();
    let odd_host = degree.values().all(|&d| d % 2 == 1);
    match (&claim.matching, odd_host) {
        (None, true) => violations.push("odd host without a perfect matching".into()),
        (Some(_), false) => violations.push("matching on a host that is not odd".into()),
        (Some(m), true) => {
            let mut covered: BTreeSet<Vertex> = BTreeSet::new();
            for e in m {
                if !in_host(e.0) || !in_host(e.1) {
                    violations.push(format!("matching pair {e} leaves the host"));
                    continue;
                }
                if !adjacent(kind, e.0, e.1) {
                    violations.push(format!("matching pair {e} is not a host edge"));
                    continue;
                }
                *used.entry(norm(e.0, e.1)).or_default() += 1;
                for v in [e.0, e.1] {
                    if !covered.insert(v) {
                        violations.push(format!("matching covers {v} twice"));
                    }
                }
            }
            if covered.len() != verts.len() {
                violations.push(format!(
                    "matching covers {} of {} vertices",
                    covered.len(),
                    verts.len()
                ));
            }
        }
        (None, false) => {}
    }

    for (&(x, y), &count) in &used {
        if count > 1 {
            violations.push(format!("edge {x}-{y} is used {count} times"));
        }
    }

    // leave degrees must all be even; empty for decompositions
    let mut leave_count = 0usize;
    let mut leave_deg: BTreeMap<Vertex, usize> = BTreeMap::new();
    for &(x, y) in &host_edges(kind) {
        if !used.contains_key(&norm(x, y)) {
            leave_count += 1;
            *leave_deg.entry(x).or_default() += 1;
            *leave_deg.entry(y).or_default() += 1;
        }
    }
    for (&v, &d) in &leave_deg {
        if d % 2 == 1 {
            violations.push(format!("leave degree of {v} is odd ({d})"));
        }
    }
    if expect_decomposition && leave_count > 0 {
        violations.push(format!("leave has {leave_count} uncovered edges"));
    }

    Report {
        pass: violations.is_empty(),
        violations,
        lengths,
    }
}

/// Result of the exhaustive search.
#[derive(Debug, Clone)]
pub enum BruteForceResult {
    Found {
        cycles: Vec<Vec<Vertex>>,
        matching: Option<Vec<(Vertex, Vertex)>>,
    },
    /// Exhaustion proves no decomposition with these lengths exists.
    ProvedNone,
}

/// Exhaustive backtracking over edge-disjoint cycle selections (plus a
/// perfect matching on odd hosts), with canonical-first symmetry breaking:
/// every chosen piece must cover the least uncovered host edge.
pub fn brute_force_decompose(kind: &HostKind, lengths: &[usize]) -> Result<BruteForceResult> {
    let edges = host_edges(kind);
    if edges.len() > 40 {
        return Err(Error::TooLarge(format!(
            "{} edges exceeds the 40-edge cap",
            edges.len()
        )));
    }
    let verts = all_vertices(kind);
    let odd_host = verts
        .iter()
        .all(|&v| verts.iter().filter(|&&w| adjacent(kind, v, w)).count() % 2 == 1);
    let matching_budget = if odd_host { verts.len() / 2 } else { 0 };
    let total_in_cycles: usize = lengths.iter().sum();
    if total_in_cycles + matching_budget != edges.len() {
        return Ok(BruteForceResult::ProvedNone);
    }
    let mut pool: BTreeMap<usize, usize> = BTreeMap::new();
    for &l in lengths {
        *pool.entry(l).or_default() += 1;
    }
    let mut remaining: BTreeSet<(Vertex, Vertex)> = edges.iter().copied().collect();
    let mut unmatched: BTreeSet<Vertex> = if odd_host {
        verts.iter().copied().collect()
    } else {
        BTreeSet::new()
    };
    let mut cycles: Vec<Vec<Vertex>> = Vec::new();
    let mut matched: Vec<(Vertex, Vertex)> = Vec::new();
    let found = search(
        kind,
        &mut pool,
        &mut remaining,
        &mut unmatched,
        odd_host,
        &mut cycles,
        &mut matched,
    );
    if found {
        Ok(BruteForceResult::Found {
            cycles,
            matching: if odd_host { Some(matched) } else { None },
        })
    } else {
        Ok(BruteForceResult::ProvedNone)
    }
}

#[allow(clippy::too_many_arguments)]
fn search(
    kind: &HostKind,
    pool: &mut BTreeMap<usize, usize>,
    remaining: &mut BTreeSet<(Vertex, Vertex)>,
    unmatched: &mut BTreeSet<Vertex>,
    odd_host: bool,
    cycles: &mut Vec<Vec<Vertex>>,
    matched: &mut Vec<(Vertex, Vertex)>,
) -> bool {
    let Some(&(x, y)) = remaining.iter().next() else {
        return pool.values().all(|&c| c == 0) && unmatched.is_empty();
    };
    // the least uncovered edge joins some cycle of a needed length
    let needed: Vec<usize> = pool
        .iter()
        .filter(|&(_, &c)| c > 0)
        .map(|(&l, _)| l)
        .collect();
    for len in needed {
        let mut path = vec![x, y];
        remaining.remove(&(x, y));
        if extend_cycle(
            kind, pool, remaining, unmatched, odd_host, cycles, matched, &mut path, len,
        ) {
            return true;
        }
        remaining.insert(norm(x, y));
    }
    // or the matching
    if odd_host && unmatched.contains(&x) && unmatched.contains(&y) {
        remaining.remove(&(x, y));
        unmatched.remove(&x);
        unmatched.remove(&y);
        matched.push((x, y));
        if search(kind, pool, remaining, unmatched, odd_host, cycles, matched) {
            return true;
        }
        matched.pop();
        unmatched.insert(x);
        unmatched.insert(y);
        remaining.insert(norm(x, y));
    }
    false
}

#[allow(clippy::too_many_arguments)]
fn extend_cycle(
    kind: &HostKind,
    pool: &mut BTreeMap<usize, usize>,
    remaining: &mut BTreeSet<(Vertex, Vertex)>,
    unmatched: &mut BTreeSet<Vertex>,
    odd_host: bool,
    cycles: &mut Vec<Vec<Vertex>>,
    matched: &mut Vec<(Vertex, Vertex)>,
    path: &mut Vec<Vertex>,
    len: usize,
) -> bool {
    if path.len() == len {
        let close = norm(path[0], *path.last().unwrap());
        if !remaining.contains(&close) {
            return false;
        }
        remaining.remove(&close);
        *pool.get_mut(&len).unwrap() -= 1;
        cycles.push(path.clone());
        if search(kind, pool, remaining, unmatched, odd_host, cycles, matched) {
            return true;
        }
        cycles.pop();
        *pool.get_mut(&len).unwrap() += 1;
        remaining.insert(close);
        return false;
    }
    let cur = *path.last().unwrap();
    let candidates: Vec<Vertex> = all_vertices(kind)
        .into_iter()
        .filter(|&v| !path.contains(&v) && remaining.contains(&norm(cur, v)))
        .collect();
    for v in candidates {
        remaining.remove(&norm(cur, v));
        path.push(v);
        if extend_cycle(
            kind, pool, remaining, unmatched, odd_host, cycles, matched, path, len,
        ) {
            return true;
        }
        path.pop();
        remaining.insert(norm(cur, v));
    }
    false
}

/// Mutation kinds for negative testing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    /// Drop the last vertex of the first cycle.
    DropEdge,
    /// Duplicate the first cycle.
    DuplicateCycle,
    /// Replace a vertex of the first cycle so a non-host pair (or a
    /// repeated vertex) appears.
    SwapVertex,
    /// Remove a matching pair, or invent a matching where none belongs.
    BreakMatching,
}

pub const ALL_MUTATIONS: [Mutation; 4] = [
    Mutation::DropEdge,
    Mutation::DuplicateCycle,
    Mutation::SwapVertex,
    Mutation::BreakMatching,
];

/// Applies a mutation; the output always differs from the input.
pub fn mutate(claim: &Claim, kind_of_mutation: Mutation) -> Result<Claim> {
    let mut out = claim.clone();
    if out.cycles.is_empty() {
        return Err(Error::EmptyInput);
    }
    match kind_of_mutation {
        Mutation::DropEdge => {
            out.cycles[0].pop();
        }
        Mutation::DuplicateCycle => {
            out.cycles.push(out.cycles[0].clone());
        }
        Mutation::SwapVertex => {
            let cyc = &mut out.cycles[0];
            let old = cyc[0];
            let neighbour = cyc[1];
            let sizes = part_sizes(claim.host.kind());
            // prefer a replacement in the neighbour's own part: the new
            // edge joins two same-part vertices, or repeats a vertex
            let replacement = (0..sizes[neighbour.part as usize])
                .map(|i| Vertex::new(neighbour.part as usize, i))
                .find(|&w| w != neighbour && adjacent(claim.host.kind(), w, neighbour) == false && w != old);
            match replacement {
                Some(w) if !cyc.contains(&w) => cyc[0] = w,
                _ => cyc[0] = cyc[2], // fall back to a repeated vertex
            }
        }
        Mutation::BreakMatching => match &mut out.matching {
            Some(m) if !m.is_empty() => {
                m.remove(0);
            }
            _ => {
                let e = host_edges(claim.host.kind())[0];
                out.matching = Some(vec![crate::model::Edge::new(e.0, e.1)]);
            }
        },
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::format::parse_claim;

    const GOOD_K44: &str = "host bipartite 4 4\n\
        cycle p0.0 p1.0 p0.1 p1.1\n\
        cycle p0.0 p1.2 p0.1 p1.3\n\
        cycle p0.2 p1.0 p0.3 p1.1\n\
        cycle p0.2 p1.2 p0.3 p1.3\n";

    #[test]
    fn valid_decomposition_passes() {
        let claim = parse_claim(GOOD_K44).unwrap();
        let report = verify(&claim, true);
        assert!(report.pass, "{:?}", report.violations);
        assert_eq!(report.lengths, vec![4, 4, 4, 4]);
    }

    #[test]
    fn all_mutations_fail_verification() {
        let claim = parse_claim(GOOD_K44).unwrap();
        for kind in ALL_MUTATIONS {
            let bad = mutate(&claim, kind).unwrap();
            let report = verify(&bad, true);
            assert!(!report.pass, "mutation {kind:?} slipped through");
        }
    }

    #[test]
    fn open_walk_is_caught() {
        let text = "host bipartite 4 4\ncycle p0.0 p1.0 p0.1\n";
        let claim = parse_claim(text).unwrap();
        let report = verify(&claim, false);
        assert!(!report.pass);
    }

    #[test]
    fn packing_mode_allows_even_leaves() {
        let text = "host bipartite 4 4\ncycle p0.0 p1.0 p0.1 p1.1\n";
        let claim = parse_claim(text).unwrap();
        assert!(verify(&claim, false).pass);
        assert!(!verify(&claim, true).pass);
    }

    #[test]
    fn odd_host_matching_rules() {
        let text = "host bipartite 5 5\n\
            matching p0.0-p1.0 p0.1-p1.1 p0.2-p1.2 p0.3-p1.3 p0.4-p1.4\n";
        let claim = parse_claim(text).unwrap();
        assert!(verify(&claim, false).pass);
        let missing = "host bipartite 5 5\n";
        assert!(!verify(&parse_claim(missing).unwrap(), false).pass);
    }

    #[test]
    fn brute_force_finds_k22() {
        let kind = HostKind::Bipartite { a: 2, b: 2 };
        match brute_force_decompose(&kind, &[4]).unwrap() {
            BruteForceResult::Found { cycles, .. } => assert_eq!(cycles.len(), 1),
            BruteForceResult::ProvedNone => panic!("K_{{2,2}} is a 4-cycle"),
        }
    }

    #[test]
    fn brute_force_proves_no_16_cycle_in_k44() {
        let kind = HostKind::Bipartite { a: 4, b: 4 };
        assert!(matches!(
            brute_force_decompose(&kind, &[16]).unwrap(),
            BruteForceResult::ProvedNone
        ));
    }

    #[test]
    fn brute_force_respects_cap() {
        let kind = HostKind::Bipartite { a: 6, b: 8 };
        assert!(matches!(
            brute_force_decompose(&kind, &[4; 12]),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn brute_force_handles_matching_hosts() {
        let kind = HostKind::Bipartite { a: 5, b: 5 };
        match brute_force_decompose(&kind, &[4, 4, 4, 4, 4]).unwrap() {
            BruteForceResult::Found { cycles, matching } => {
                assert_eq!(cycles.len(), 5);
                assert_eq!(matching.unwrap().len(), 5);
            }
            BruteForceResult::ProvedNone => panic!("five 4-cycles plus a matching exist"),
        }
    }
}

//! Base constructions: decompositions of `K_{a,b}` (and odd `K_{a,a}` with
//! a perfect matching) into 4- and 6-cycles, and m-cycle packings of small
//! complete graphs with a prescribed single-cycle leave.
//!
//! Strategy is layered: embedded table entries for the smallest hosts,
//! then direct constructions (a 2x2-block tiling whose blocks regroup in
//! corner triples to form 6-cycle pairs for even sides; a border recursion
//! peeling two or four rows and columns for the odd diagonal case), then a
//! seeded randomized search. Outputs are checked against the independent
//! verifier throughout the test suite.

pub mod search;
pub(crate) mod tables;

use crate::error::{Error, Result};
use crate::model::{Cycle, Edge, HostGraph, Packing, Vertex};
use std::collections::BTreeSet;
use std::sync::Arc;

fn row(i: usize) -> Vertex {
    Vertex::new(0, i)
}

fn col(j: usize) -> Vertex {
    Vertex::new(1, j)
}

/// Decomposition of `K_{a,b}` (both sides even) or `K_{a,a}` with `a` odd
/// (cycles plus a perfect matching) into `t4` 4-cycles and `t6` 6-cycles.
pub fn decompose_four_six(
    a: usize,
    b: usize,
    t4: usize,
    t6: usize,
    seed: u64,
    jobs: usize,
) -> Result<Packing> {
    if a < 4 || b < 4 {
        return Err(Error::InfeasibleCounts(format!(
            "sides ({a},{b}) must both be at least 4"
        )));
    }
    let odd = a % 2 == 1;
    if odd && a != b {
        return Err(Error::InfeasibleCounts(
            "odd sides are only supported for equal parts".into(),
        ));
    }
    if !odd && b % 2 == 1 {
        return Err(Error::InfeasibleCounts(
            "sides must both be even, or equal and odd".into(),
        ));
    }
    let edges = if odd { a * a - a } else { a * b };
    if 4 * t4 + 6 * t6 != edges {
        return Err(Error::InfeasibleCounts(format!(
            "4*{t4} + 6*{t6} != {edges}"
        )));
    }
    if let Some(p) = tables::four_six(a, b, t4, t6) {
        return Ok(p);
    }
    if !odd {
        if let Some(p) = even_four_six(a, b, t6) {
            return Ok(p);
        }
    } else if let Some(p) = odd_four_six(a, t6) {
        return Ok(p);
    }
    // randomized fallback
    let host = Arc::new(if odd {
        HostGraph::bipartite(a, a)?
    } else {
        HostGraph::bipartite(a, b)?
    });
    let diag: Vec<Edge> = if odd {
        host.diagonal_matching()
    } else {
        Vec::new()
    };
    let cover: Vec<Edge> = host
        .edges()
        .into_iter()
        .filter(|e| !diag.contains(e))
        .collect();
    let mut lengths = vec![4usize; t4];
    lengths.extend(std::iter::repeat(6).take(t6));
    let cycles =
        search::find_cycle_partition(&host, &cover, &lengths, seed, 2000, jobs).ok_or_else(
            || {
                Error::ConstructionFailed(format!(
                    "search exhausted for K_{{{a},{b}}} with counts ({t4},{t6})"
                ))
            },
        )?;
    let matching: Option<BTreeSet<Edge>> = if odd {
        Some(diag.into_iter().collect())
    } else {
        None
    };
    Packing::new(host, cycles, matching)
}

/// Even-even construction: tile the grid of 2x2 blocks; each corner triple
/// of blocks regroups into two 6-cycles, each remaining block is one
/// 4-cycle.
fn even_four_six(a: usize, b: usize, t6: usize) -> Option<Packing> {
    if t6 % 2 != 0 {
        return None;
    }
    let w = a / 2;
    let h = b / 2;
    let g = t6 / 2;
    let triples = corner_partition(w, h, g)?;
    let mut in_triple = vec![false; w * h];
    let mut cycles = Vec::new();
    for t in &triples {
        for &(i, j) in t {
            in_triple[i * h + j] = true;
        }
        let (pair_row, shared_col, other_col, third_row) = normalize_triple(*t);
        let (r1, r2) = (2 * pair_row, 2 * pair_row + 1);
        let (r3, r4) = (2 * third_row, 2 * third_row + 1);
        let (c1, c2) = (2 * other_col, 2 * other_col + 1);
        let (c3, c4) = (2 * shared_col, 2 * shared_col + 1);
        cycles
            .push(Cycle::new(vec![row(r1), col(c1), row(r2), col(c3), row(r3), col(c4)]).unwrap());
        cycles
            .push(Cycle::new(vec![row(r1), col(c2), row(r2), col(c4), row(r4), col(c3)]).unwrap());
    }
    for i in 0..w {
        for j in 0..h {
            if !in_triple[i * h + j] {
                cycles.push(
                    Cycle::new(vec![row(2 * i), col(2 * j), row(2 * i + 1), col(2 * j + 1)])
                        .unwrap(),
                );
            }
        }
    }
    let host = Arc::new(HostGraph::bipartite(a, b).ok()?);
    Packing::new(host, cycles, None).ok()
}

/// Orients a corner triple as (row of the pair, shared column, other
/// column, row of the third cell).
fn normalize_triple(t: [(usize, usize); 3]) -> (usize, usize, usize, usize) {
    for perm in [[0, 1, 2], [0, 2, 1], [1, 2, 0]] {
        let (x, y, z) = (t[perm[0]], t[perm[1]], t[perm[2]]);
        if x.0 == y.0 && z.0 != x.0 {
            if z.1 == y.1 {
                return (x.0, y.1, x.1, z.0);
            }
            if z.1 == x.1 {
                return (x.0, x.1, y.1, z.0);
            }
        }
    }
    unreachable!("not a corner triple: {t:?}");
}

/// Partitions a `w x h` grid into `g` corner triples (a row pair plus one
/// cell sharing a column with either pair member) and singles.
fn corner_partition(w: usize, h: usize, g: usize) -> Option<Vec<[(usize, usize); 3]>> {
    if 3 * g > w * h {
        return None;
    }
    let mut used = vec![false; w * h];
    let mut out = Vec::with_capacity(g);
    let mut budget = 400_000usize;
    if corner_rec(w, h, g, w * h - 3 * g, &mut used, &mut out, &mut budget) {
        Some(out)
    } else {
        None
    }
}

fn corner_rec(
    w: usize,
    h: usize,
    g: usize,
    singles: usize,
    used: &mut [bool],
    out: &mut Vec<[(usize, usize); 3]>,
    budget: &mut usize,
) -> bool {
    if g == 0 {
        return true;
    }
    if *budget == 0 {
        return false;
    }
    *budget -= 1;
    let Some(first) = used.iter().position(|&u| !u) else {
        return false;
    };
    let (i, j) = (first / h, first % h);
    let mut candidates: Vec<[(usize, usize); 3]> = Vec::new();
    // (i,j) in the row pair with partner (i,j2); third cell in column j or j2
    for j2 in 0..h {
        if j2 == j || used[i * h + j2] {
            continue;
        }
        for i2 in 0..w {
            if i2 == i {
                continue;
            }
            for cj in [j, j2] {
                if !used[i2 * h + cj] {
                    candidates.push([(i, j), (i, j2), (i2, cj)]);
                }
            }
        }
    }
    // (i,j) as the lone cell under a row pair in row i2 using column j
    for i2 in 0..w {
        if i2 == i || used[i2 * h + j] {
            continue;
        }
        for j2 in 0..h {
            if j2 != j && !used[i2 * h + j2] {
                candidates.push([(i2, j), (i2, j2), (i, j)]);
            }
        }
    }
    for cand in candidates {
        for &(ci, cj) in &cand {
            used[ci * h + cj] = true;
        }
        out.push(cand);
        if corner_rec(w, h, g - 1, singles, used, out, budget) {
            return true;
        }
        out.pop();
        for &(ci, cj) in &cand {
            used[ci * h + cj] = false;
        }
    }
    if singles > 0 {
        used[i * h + j] = true;
        if corner_rec(w, h, g, singles - 1, used, out, budget) {
            return true;
        }
        used[i * h + j] = false;
    }
    false
}

/// Odd diagonal construction: peel borders of two rows and columns (one
/// 6-cycle each) or four rows and columns (4-cycles only) down to a table
/// base of side 5 or 7, with the canonical diagonal as the matching.
fn odd_four_six(a: usize, t6: usize) -> Option<Packing> {
    for base in [7usize, 5] {
        if a < base {
            continue;
        }
        let base_choices: &[usize] = if base == 5 { &[0, 2] } else { &[1, 3, 5, 7] };
        for &base_t6 in base_choices {
            if base_t6 > t6 {
                continue;
            }
            let k2 = t6 - base_t6;
            if a < base + 2 * k2 {
                continue;
            }
            let rest = a - base - 2 * k2;
            if rest % 4 != 0 {
                continue;
            }
            let k4 = rest / 4;
            let base_t4 = (base * base - base - 6 * base_t6) / 4;
            let Some(base_packing) = tables::four_six(base, base, base_t4, base_t6) else {
                continue;
            };
            let mut cycles: Vec<Cycle> = base_packing.cycles().to_vec();
            let mut size = base;
            let mut plan = Vec::new();
            plan.extend(std::iter::repeat(4usize).take(k4));
            plan.extend(std::iter::repeat(2usize).take(k2));
            let mut ok = true;
            for step in plan {
                size += step;
                let grown = if step == 2 {
                    border_two(size, &mut cycles)
                } else {
                    border_four(size, &mut cycles)
                };
                if !grown {
                    ok = false;
                    break;
                }
            }
            if !ok || size != a {
                continue;
            }
            let host = Arc::new(HostGraph::bipartite(a, a).ok()?);
            let diag: BTreeSet<Edge> = host.diagonal_matching().into_iter().collect();
            if let Ok(p) = Packing::new(host, cycles, Some(diag)) {
                return Some(p);
            }
            return None;
        }
    }
    None
}

/// Tiles the border that grows `K_{s-2,s-2}` minus its diagonal into
/// `K_{s,s}` minus its diagonal: one 6-cycle through the two crossing
/// edges, 4-cycles elsewhere. Needs odd `s >= 7`.
fn border_two(s: usize, cycles: &mut Vec<Cycle>) -> bool {
    if s < 7 || s % 2 == 0 {
        return false;
    }
    let (rn, rm) = (s - 2, s - 1);
    cycles.push(Cycle::new(vec![row(rn), col(0), row(rm), col(rn), row(0), col(rm)]).unwrap());
    let mut j = 1;
    while j + 1 <= s - 3 {
        cycles.push(Cycle::new(vec![row(rn), col(j), row(rm), col(j + 1)]).unwrap());
        cycles.push(Cycle::new(vec![row(j), col(rn), row(j + 1), col(rm)]).unwrap());
        j += 2;
    }
    true
}

/// Tiles the border that grows `K_{s-4,s-4}` minus its diagonal into
/// `K_{s,s}` minus its diagonal using 4-cycles only. Needs odd `s >= 9`.
fn border_four(s: usize, cycles: &mut Vec<Cycle>) -> bool {
    if s < 9 || s % 2 == 0 {
        return false;
    }
    let p = |i: usize| row(s - 4 + i);
    let g = |j: usize| col(s - 4 + j);
    cycles.push(Cycle::new(vec![p(0), col(0), p(1), g(2)]).unwrap());
    cycles.push(Cycle::new(vec![p(2), col(0), p(3), g(0)]).unwrap());
    cycles.push(Cycle::new(vec![row(0), g(0), p(1), g(3)]).unwrap());
    cycles.push(Cycle::new(vec![row(0), g(2), p(3), g(1)]).unwrap());
    cycles.push(Cycle::new(vec![p(0), g(1), p(2), g(3)]).unwrap());
    let mut j = 1;
    while j + 1 <= s - 5 {
        cycles.push(Cycle::new(vec![p(0), col(j), p(1), col(j + 1)]).unwrap());
        cycles.push(Cycle::new(vec![p(2), col(j), p(3), col(j + 1)]).unwrap());
        cycles.push(Cycle::new(vec![row(j), g(0), row(j + 1), g(1)]).unwrap());
        cycles.push(Cycle::new(vec![row(j), g(2), row(j + 1), g(3)]).unwrap());
        j += 2;
    }
    true
}

/// `m`-cycle packing of the complete graph `K_n` whose leave is a single
/// `e`-cycle (empty when `e = 0`). The host is `K_n` modelled as a hole of
/// size 1; the leave cycle sits on the first `e` non-hole vertices.
pub fn pack_complete_graph_uniform(
    n: usize,
    m: usize,
    e: usize,
    seed: u64,
    jobs: usize,
) -> Result<Packing> {
    if n % 2 == 0 || n < 7 {
        return Err(Error::InfeasibleParameters(format!(
            "order {n} must be odd and at least 7"
        )));
    }
    if m % 2 != 0 || m < 4 || m > n {
        return Err(Error::InfeasibleParameters(format!(
            "cycle length {m} must be even, at least 4, and at most {n}"
        )));
    }
    let valid_e = e == 0 || e == m + 2 || (e >= 4 && e <= m - 2 && e % 2 == 0);
    if !valid_e {
        return Err(Error::InfeasibleParameters(format!(
            "leave size {e} not in {{0, 4, 6, ..., m-2, m+2}}"
        )));
    }
    let total = n * (n - 1) / 2;
    if total % m != e % m {
        return Err(Error::InfeasibleParameters(format!(
            "binom({n},2) = {total} is not congruent to {e} mod {m}"
        )));
    }
    if let Some(p) = tables::complete_pack(n, m, e) {
        return Ok(p);
    }
    let host = Arc::new(HostGraph::complete(n)?);
    let leave_cycle: Vec<Edge> = if e > 0 {
        let verts: Vec<Vertex> = (0..e).map(col).collect();
        (0..e)
            .map(|i| Edge::new(verts[i], verts[(i + 1) % e]))
            .collect()
    } else {
        Vec::new()
    };
    let cover: Vec<Edge> = host
        .edges()
        .into_iter()
        .filter(|edge| !leave_cycle.contains(edge))
        .collect();
    let t = (total - e) / m;
    let lengths = vec![m; t];
    let cycles = search::find_cycle_partition(&host, &cover, &lengths, seed, 4000, jobs)
        .ok_or_else(|| {
            Error::ConstructionFailed(format!(
                "search exhausted for a {m}-cycle packing of K_{n} with a {e}-cycle leave"
            ))
        })?;
    Packing::new(host, cycles, None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_four_six(p: &Packing, a: usize, t4: usize, t6: usize) {
        assert!(p.is_decomposition());
        let mut want = vec![4usize; t4];
        want.extend(std::iter::repeat(6).take(t6));
        want.sort_unstable();
        assert_eq!(p.cycle_lengths(), want);
        let odd = a % 2 == 1;
        assert_eq!(p.matching().is_some(), odd);
    }

    #[test]
    fn k44_block_tiling() {
        let p = decompose_four_six(4, 4, 4, 0, 0, 1).unwrap();
        check_four_six(&p, 4, 4, 0);
        let p = decompose_four_six(4, 4, 1, 2, 0, 1).unwrap();
        check_four_six(&p, 4, 1, 2);
    }

    #[test]
    fn k66_all_six() {
        let p = decompose_four_six(6, 6, 0, 6, 0, 1).unwrap();
        check_four_six(&p, 6, 0, 6);
    }

    #[test]
    fn k6_10_all_six() {
        let p = decompose_four_six(6, 10, 0, 10, 0, 1).unwrap();
        check_four_six(&p, 6, 0, 10);
    }

    #[test]
    fn k12_12_all_counts() {
        for t6 in (0..=24).step_by(2) {
            let t4 = (144 - 6 * t6) / 4;
            let p = decompose_four_six(12, 12, t4, t6, 0, 1).unwrap();
            check_four_six(&p, 12, t4, t6);
        }
    }

    #[test]
    fn odd_diagonal_all_counts() {
        for a in [5usize, 7, 9, 11] {
            let edges = a * a - a;
            for t6 in 0..=edges / 6 {
                if (edges - 6 * t6) % 4 != 0 {
                    continue;
                }
                let t4 = (edges - 6 * t6) / 4;
                let p = decompose_four_six(a, a, t4, t6, 0, 1)
                    .unwrap_or_else(|e| panic!("K_{{{a},{a}}} ({t4},{t6}): {e}"));
                check_four_six(&p, a, t4, t6);
            }
        }
    }

    #[test]
    fn infeasible_counts_rejected() {
        assert!(decompose_four_six(4, 4, 3, 1, 0, 1).is_err());
        assert!(decompose_four_six(3, 4, 3, 0, 0, 1).is_err());
        assert!(decompose_four_six(5, 7, 5, 0, 0, 1).is_err());
    }

    #[test]
    fn pack_k9_into_four_cycles() {
        let p = pack_complete_graph_uniform(9, 4, 0, 0, 1).unwrap();
        assert!(p.is_decomposition());
        assert_eq!(p.cycle_lengths(), vec![4; 9]);
    }

    #[test]
    fn pack_rejects_bad_parameters() {
        assert!(pack_complete_graph_uniform(9, 4, 2, 0, 1).is_err());
        assert!(pack_complete_graph_uniform(8, 4, 0, 0, 1).is_err());
        assert!(pack_complete_graph_uniform(9, 5, 0, 0, 1).is_err());
        // binom(9,2) = 36 == 0 mod 4, so e = 6 is infeasible
        assert!(pack_complete_graph_uniform(9, 4, 6, 0, 1).is_err());
    }

    /// Regenerates the shipped primitive table files. Run manually:
    /// `cargo test -p evencycles regenerate_primitive_tables -- --ignored`
    #[test]
    #[ignore]
    fn regenerate_primitive_tables() {
        use crate::model::format::write_packing;
        use std::fs;
        use std::path::PathBuf;

        let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/primitives");
        fs::create_dir_all(&dir).unwrap();

        let four_six_entries: &[(usize, usize)] = &[(4, 4), (4, 6), (6, 6), (5, 5), (7, 7)];
        for &(a, b) in four_six_entries {
            let edges = if a % 2 == 1 { a * a - a } else { a * b };
            for t6 in 0..=edges / 6 {
                if (edges - 6 * t6) % 4 != 0 {
                    continue;
                }
                let t4 = (edges - 6 * t6) / 4;
                let p = decompose_four_six(a, b, t4, t6, 0, 1).unwrap();
                let name = format!("K{a}-{b}_{t4}x4_{t6}x6.dec");
                fs::write(dir.join(name), write_packing(&p)).unwrap();
            }
        }

        let completes: &[(usize, usize, usize)] = &[
            (9, 4, 0),
            (9, 6, 0),
            (9, 8, 4),
            (13, 4, 6),
            (13, 6, 0),
            (13, 8, 6),
            (13, 10, 8),
            (13, 12, 6),
        ];
        for &(n, m, e) in completes {
            let p = pack_complete_graph_uniform(n, m, e, 0, 1).unwrap();
            let name = format!("K{n}_m{m}_e{e}.dec");
            fs::write(dir.join(name), write_packing(&p)).unwrap();
        }
    }
}

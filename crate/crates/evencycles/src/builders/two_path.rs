//! Uniform cycle packings of a complete bipartite graph whose leave
//! decomposes into two prescribed paths with all end vertices in a chosen
//! part.

use super::{decompose_bipartite, BuildCtx};
use crate::error::{Error, Result};
use crate::model::{Cycle, LengthList, Packing, Vertex};
use crate::transforms::{attach_cycles, flatten_out, PathSplit};

/// `m`-cycle packing of `K_{a,b}` whose leave decomposes into a `p`-path
/// and a `q`-path, both paths running between the same two end vertices in
/// part `r_part`.
///
/// Needs both parts even and at least `m+2`, `l = p + q` in
/// `{4, 6, ..., 2m-4}` with the edge count congruent to `l` mod `m`, and
/// `p, q` positive even with `p, q >= l - m`.
pub fn two_path_leave(
    a: usize,
    b: usize,
    m: usize,
    l: usize,
    p: usize,
    q: usize,
    r_part: usize,
    ctx: &mut BuildCtx,
) -> Result<(Packing, PathSplit)> {
    if a % 2 != 0 || b % 2 != 0 || a < m + 2 || b < m + 2 {
        return Err(Error::PreconditionViolated(format!(
            "parts ({a},{b}) must be even and at least m+2 = {}",
            m + 2
        )));
    }
    if m % 2 != 0 || m < 4 {
        return Err(Error::PreconditionViolated(format!(
            "cycle length {m} must be even and at least 4"
        )));
    }
    if l % 2 != 0 || l < 4 || l > 2 * m - 4 {
        return Err(Error::PreconditionViolated(format!(
            "leave size {l} not in {{4, 6, ..., 2m-4}}"
        )));
    }
    if (a * b) % m != l % m {
        return Err(Error::PreconditionViolated(format!(
            "edge count {} is not congruent to {l} mod {m}",
            a * b
        )));
    }
    if p + q != l || p == 0 || q == 0 || p % 2 != 0 || q % 2 != 0 {
        return Err(Error::PreconditionViolated(format!(
            "paths ({p},{q}) must be positive even with sum {l}"
        )));
    }
    if p + m < l || q + m < l {
        return Err(Error::PreconditionViolated(format!(
            "paths ({p},{q}) must each be at least l-m = {}",
            l as isize - m as isize
        )));
    }
    if r_part > 1 {
        return Err(Error::PreconditionViolated(format!(
            "part index {r_part} out of range"
        )));
    }

    if l <= m + 2 {
        // decompose fully with one l-cycle, pull it out, cut it into paths
        let k = (a * b - l) / m;
        let mut lens = vec![m; k];
        lens.push(l);
        ctx.log(|| format!("two-path leave: direct {l}-cycle leave in K_{{{a},{b}}}"));
        let packing = decompose_bipartite(a, b, false, &LengthList::new(lens)?, ctx)?;
        let idx = cycle_index_of_length(&packing, l)?;
        let (packing, cycle) = packing.without_cycle(idx)?;
        let split = split_cycle_in_part(&cycle, p, r_part)?;
        return Ok((packing, split));
    }

    // large leave: start from an (l-m)-cycle leave, free one m-cycle that
    // meets it, flatten, then absorb the stray components into one chain
    let k = (a * b - (l - m)) / m;
    let mut lens = vec![m; k];
    lens.push(l - m);
    ctx.log(|| format!("two-path leave: {}-cycle leave plus a freed m-cycle", l - m));
    let packing = decompose_bipartite(a, b, false, &LengthList::new(lens)?, ctx)?;
    let idx = cycle_index_of_length(&packing, l - m)?;
    let (packing, leave_cycle) = packing.without_cycle(idx)?;
    // free an m-cycle sharing a vertex with the leave cycle
    let touching = packing
        .cycles()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.len() == m && c.vertices().iter().any(|v| leave_cycle.contains(*v)))
        .map(|(i, _)| i)
        .min_by_key(|&i| packing.cycles()[i].vertices().to_vec())
        .ok_or_else(|| {
            Error::InternalTransformFailure("no m-cycle meets the leave cycle".into())
        })?;
    let (packing, _freed) = packing.without_cycle(touching)?;
    let flattened = flatten_out(&packing, &mut ctx.choice)?;
    let comps = crate::model::classify(&flattened.leave().edges())?.components.len();
    if comps > l - m - 1 {
        return Err(Error::InternalTransformFailure(format!(
            "flattened leave has {comps} components, expected at most {}",
            l - m - 1
        )));
    }
    let (packing, split) = attach_cycles(&flattened, p, q, r_part, &mut ctx.choice)?;
    let (e1, e2) = split.endpoints();
    if e1.part as usize != r_part || e2.part as usize != r_part {
        return Err(Error::InternalTransformFailure(
            "two-path leave endpoints landed outside part R".into(),
        ));
    }
    Ok((packing, split))
}

fn cycle_index_of_length(packing: &Packing, len: usize) -> Result<usize> {
    packing
        .cycles()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.len() == len)
        .map(|(i, _)| i)
        .min_by_key(|&i| packing.cycles()[i].vertices().to_vec())
        .ok_or_else(|| {
            Error::InternalTransformFailure(format!("no cycle of length {len} to extract"))
        })
}

/// Cuts a cycle at two part-`r` vertices `p` steps apart into a `p`-path
/// and a complementary path with the same endpoints.
pub(crate) fn split_cycle_in_part(cycle: &Cycle, p: usize, r_part: usize) -> Result<PathSplit> {
    let n = cycle.len();
    if p == 0 || p >= n || p % 2 != 0 {
        return Err(Error::PreconditionViolated(format!(
            "cannot cut a {n}-cycle into a {p}-path and a {}-path",
            n as isize - p as isize
        )));
    }
    let start = cycle
        .vertices()
        .iter()
        .position(|v| v.part as usize == r_part)
        .ok_or_else(|| {
            Error::PreconditionViolated(format!("cycle avoids part {r_part} entirely"))
        })?;
    let rot: Vec<Vertex> = (0..n)
        .map(|k| cycle.vertices()[(start + k) % n])
        .collect();
    let first: Vec<Vertex> = rot[..=p].to_vec();
    let mut second: Vec<Vertex> = vec![rot[0]];
    second.extend(rot[p..].iter().rev().copied());
    debug_assert_eq!(second.len(), n - p + 1);
    Ok(PathSplit::new(first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{BuildCtx, BuildOptions};
    use crate::model::classify;

    #[test]
    fn small_leave_is_a_cut_cycle() {
        // m = 8, K_{10,10}, l = 4: leave is a 4-cycle cut into two 2-paths
        let mut ctx = BuildCtx::new(&BuildOptions::default());
        let (packing, split) = two_path_leave(10, 10, 8, 4, 2, 2, 1, &mut ctx).unwrap();
        assert_eq!(split.lengths(), (2, 2));
        let (e1, e2) = split.endpoints();
        assert_eq!(e1.part, 1);
        assert_eq!(e2.part, 1);
        assert_eq!(packing.leave().edge_count(), 4);
        for e in split.edges() {
            assert!(packing.leave().contains_edge(e));
        }
    }

    #[test]
    fn twelve_leave_in_k1010_mod_8() {
        // |E| = 100 = 4 mod 8 and l = 12 = 4 mod 8: the large-leave branch
        let mut ctx = BuildCtx::new(&BuildOptions::default());
        let (packing, split) = two_path_leave(10, 10, 8, 12, 6, 6, 0, &mut ctx).unwrap();
        assert_eq!(split.lengths(), (6, 6));
        let (e1, e2) = split.endpoints();
        assert_eq!(e1.part, 0);
        assert_eq!(e2.part, 0);
        assert_eq!(packing.leave().edge_count(), 12);
        // the leave is a single chain decomposed by the two paths
        let s = classify(&packing.leave().edges()).unwrap();
        assert_eq!(s.components.len(), 1);
        for e in split.edges() {
            assert!(packing.leave().contains_edge(e));
        }
        // every surviving cycle has length m
        assert!(packing.cycles().iter().all(|c| c.len() == 8));
    }

    #[test]
    fn rejects_small_paths() {
        let mut ctx = BuildCtx::new(&BuildOptions::default());
        // p < l - m
        assert!(matches!(
            two_path_leave(10, 10, 8, 12, 2, 10, 0, &mut ctx),
            Err(Error::PreconditionViolated(_))
        ));
        // odd part sizes
        assert!(matches!(
            two_path_leave(9, 10, 8, 4, 2, 2, 0, &mut ctx),
            Err(Error::PreconditionViolated(_))
        ));
    }
}

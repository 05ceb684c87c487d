//! Top-level constructive builders: arbitrary even-length cycle
//! decompositions of complete bipartite hosts, uniform even-cycle
//! decompositions of `K_v - K_u`, and uniform even-cycle decompositions of
//! complete multipartite graphs.

mod hole;
mod multipartite;
mod sets;
mod two_path;

pub use hole::decompose_hole;
pub use multipartite::decompose_multipartite;
pub use sets::{find_disjoint_sets, good_triple};
pub use two_path::two_path_leave;

use crate::base::decompose_four_six;
use crate::error::{Error, Result};
use crate::model::{HostKind, LengthList, Packing};
use crate::transforms::{join_cycles, Choice};

/// Options shared by all builders.
#[derive(Debug, Clone)]
pub struct BuildOptions {
    pub seed: u64,
    pub jobs: usize,
    /// Make free vertex choices at random (seeded) instead of canonically.
    pub randomized: bool,
    /// Collect a provenance log, one line per applied operation.
    pub provenance: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            seed: 0,
            jobs: 1,
            randomized: false,
            provenance: false,
        }
    }
}

/// Mutable build context: choice strategy plus the provenance log.
#[derive(Debug)]
pub struct BuildCtx {
    pub seed: u64,
    pub jobs: usize,
    pub choice: Choice,
    provenance: Option<Vec<String>>,
}

impl BuildCtx {
    pub fn new(opts: &BuildOptions) -> Self {
        BuildCtx {
            seed: opts.seed,
            jobs: opts.jobs.max(1),
            choice: if opts.randomized {
                Choice::seeded(opts.seed)
            } else {
                Choice::canonical()
            },
            provenance: if opts.provenance {
                Some(Vec::new())
            } else {
                None
            },
        }
    }

    pub fn log(&mut self, line: impl FnOnce() -> String) {
        if let Some(p) = self.provenance.as_mut() {
            p.push(line());
        }
    }

    pub fn provenance(&self) -> Option<&[String]> {
        self.provenance.as_deref()
    }
}

/// Verdict on a host/length-list pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FeasibilityVerdict {
    /// All hypotheses of the bipartite decomposition theorem hold.
    SatisfiesTheorem,
    /// A necessary condition fails: even lengths at least 4, total equal
    /// to the edge count, every length at most twice the smaller part, or
    /// the host parity pattern.
    ViolatesNecessary(String),
    /// Necessary conditions hold but the theorem's hypotheses do not.
    OutsideSupportedRegion(String),
}

impl std::fmt::Display for FeasibilityVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FeasibilityVerdict::SatisfiesTheorem => write!(f, "satisfies-theorem"),
            FeasibilityVerdict::ViolatesNecessary(r) => write!(f, "violates-necessary: {r}"),
            FeasibilityVerdict::OutsideSupportedRegion(r) => {
                write!(f, "outside-supported-region: {r}")
            }
        }
    }
}

/// Checks a length list against a complete bipartite host (plain, or with
/// the diagonal matching removed).
pub fn check_feasibility(kind: &HostKind, list: &LengthList) -> FeasibilityVerdict {
    let (a, b, star_edges) = match kind {
        HostKind::Bipartite { a, b } => {
            let even = a % 2 == 0 && b % 2 == 0;
            let odd_diag = a == b && a % 2 == 1;
            if !even && !odd_diag {
                return FeasibilityVerdict::ViolatesNecessary(format!(
                    "parts ({a},{b}) admit neither an all-cycle nor a cycles-plus-perfect-matching decomposition"
                ));
            }
            let edges = if odd_diag { a * a - a } else { a * b };
            (*a, *b, edges)
        }
        HostKind::BipartiteMinusMatching { a } => {
            if a % 2 == 0 {
                return FeasibilityVerdict::OutsideSupportedRegion(format!(
                    "matching-removed host with even side {a} is not covered"
                ));
            }
            (*a, *a, a * a - a)
        }
        other => {
            return FeasibilityVerdict::OutsideSupportedRegion(format!(
                "feasibility check covers complete bipartite hosts only, got {other:?}"
            ));
        }
    };
    let lens = list.lengths();
    for &m in lens {
        if m % 2 != 0 || m < 4 {
            return FeasibilityVerdict::ViolatesNecessary(format!(
                "length {m} is not an even integer at least 4"
            ));
        }
    }
    let total: usize = lens.iter().sum();
    if total != star_edges {
        return FeasibilityVerdict::ViolatesNecessary(format!(
            "lengths sum to {total}, host needs {star_edges}"
        ));
    }
    let min_side = a.min(b);
    let last = *lens.last().unwrap_or(&0);
    if lens.is_empty() {
        return FeasibilityVerdict::ViolatesNecessary("empty length list".into());
    }
    if last > 2 * min_side {
        return FeasibilityVerdict::ViolatesNecessary(format!(
            "a {last}-cycle needs {} vertices per part, the smaller part has {min_side}",
            last / 2
        ));
    }
    if last > min_side {
        return FeasibilityVerdict::OutsideSupportedRegion(format!(
            "largest length {last} exceeds the smaller part {min_side}"
        ));
    }
    if lens.len() >= 2 {
        let second = lens[lens.len() - 2];
        if last > 3 * second {
            return FeasibilityVerdict::OutsideSupportedRegion(format!(
                "largest length {last} exceeds three times the second largest {second}"
            ));
        }
    }
    FeasibilityVerdict::SatisfiesTheorem
}

/// Decomposition of `K_{a,b}` (both even) or of `K_{a,a}` minus a perfect
/// matching (`a = b` odd, `minus_matching` set) into cycles of exactly the
/// lengths in `list`.
///
/// The largest entry is recursively split into 4 and its remainder until
/// everything lies in {4, 6}; the base tiling is then rebuilt by merging
/// the split pairs back through catalyst cycles, in reverse order.
pub fn decompose_bipartite(
    a: usize,
    b: usize,
    minus_matching: bool,
    list: &LengthList,
    ctx: &mut BuildCtx,
) -> Result<Packing> {
    let odd_diag = a == b && a % 2 == 1;
    if minus_matching && !odd_diag {
        return Err(Error::HypothesesViolated(
            "matching removal is supported for equal odd parts only".into(),
        ));
    }
    if odd_diag && !minus_matching {
        return Err(Error::HypothesesViolated(
            "equal odd parts require the matching-removed form".into(),
        ));
    }
    let kind = HostKind::Bipartite { a, b };
    match check_feasibility(&kind, list) {
        FeasibilityVerdict::SatisfiesTheorem => {}
        verdict => {
            return Err(Error::HypothesesViolated(verdict.to_string()));
        }
    }
    if a.min(b) < 4 {
        return Err(Error::HypothesesViolated(format!(
            "smaller part {} is below 4",
            a.min(b)
        )));
    }

    // split phase: largest entry z splits into {4, z-4} until all lie in
    // {4, 6}; record the catalyst (current second largest) for the merge
    let mut z: Vec<usize> = list.lengths().to_vec();
    let mut stack: Vec<(usize, usize)> = Vec::new();
    while *z.last().unwrap() >= 8 {
        let zt = z.pop().unwrap();
        let h = *z.last().unwrap();
        stack.push((zt, h));
        for part in [4, zt - 4] {
            let at = z.partition_point(|&x| x <= part);
            z.insert(at, part);
        }
        debug_assert!(*z.last().unwrap() <= 3 * z[z.len() - 2]);
        debug_assert!(*z.last().unwrap() <= a.min(b));
    }
    let t4 = z.iter().filter(|&&x| x == 4).count();
    let t6 = z.iter().filter(|&&x| x == 6).count();
    debug_assert_eq!(t4 + t6, z.len());
    ctx.log(|| format!("four-six base: K_{{{a},{b}}} with {t4} fours and {t6} sixes"));
    let mut packing = decompose_four_six(a, b, t4, t6, ctx.seed, ctx.jobs)?;

    while let Some((zt, h)) = stack.pop() {
        ctx.log(|| format!("join: 4 + {} -> {zt} via catalyst {h}", zt - 4));
        packing = join_cycles(&packing, 4, zt - 4, h, &mut ctx.choice)?;
    }
    if packing.cycle_lengths() != list.lengths() {
        return Err(Error::InternalTransformFailure(format!(
            "assembled lengths {:?} differ from the request {:?}",
            packing.cycle_lengths(),
            list.lengths()
        )));
    }
    Ok(packing)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ll(v: &[usize]) -> LengthList {
        LengthList::new(v.to_vec()).unwrap()
    }

    #[test]
    fn feasibility_examples() {
        let k66 = HostKind::Bipartite { a: 6, b: 6 };
        assert_eq!(
            check_feasibility(&k66, &ll(&[4, 4, 4, 6, 6, 6, 6])),
            FeasibilityVerdict::SatisfiesTheorem
        );
        let k88 = HostKind::Bipartite { a: 8, b: 8 };
        assert!(matches!(
            check_feasibility(&k88, &ll(&[16, 16, 16, 16])),
            FeasibilityVerdict::OutsideSupportedRegion(_)
        ));
        // an odd entry is caught by the length-list constructor, so model
        // it via the verdict on a bad sum instead plus a direct check
        assert!(matches!(
            check_feasibility(&HostKind::Bipartite { a: 4, b: 4 }, &ll(&[4, 4, 4])),
            FeasibilityVerdict::ViolatesNecessary(_)
        ));
        assert!(matches!(
            check_feasibility(&HostKind::Bipartite { a: 4, b: 4 }, &ll(&[16])),
            FeasibilityVerdict::ViolatesNecessary(_)
        ));
        assert!(matches!(
            check_feasibility(&HostKind::Bipartite { a: 3, b: 5 }, &ll(&[4, 4])),
            FeasibilityVerdict::ViolatesNecessary(_)
        ));
        // K_{2,2} into one 4-cycle: necessary conditions hold, hypotheses fail
        assert!(matches!(
            check_feasibility(&HostKind::Bipartite { a: 2, b: 2 }, &ll(&[4])),
            FeasibilityVerdict::OutsideSupportedRegion(_)
        ));
    }

    #[test]
    fn bipartite_direct_base() {
        let mut ctx = BuildCtx::new(&BuildOptions::default());
        let p = decompose_bipartite(6, 6, false, &ll(&[6; 6]), &mut ctx).unwrap();
        assert!(p.is_decomposition());
        assert_eq!(p.cycle_lengths(), vec![6; 6]);
    }

    #[test]
    fn bipartite_with_splits_k88() {
        let mut ctx = BuildCtx::new(&BuildOptions::default());
        let want = vec![4, 6, 6, 8, 8, 8, 8, 8, 8];
        let p = decompose_bipartite(8, 8, false, &ll(&want), &mut ctx).unwrap();
        assert!(p.is_decomposition());
        assert_eq!(p.cycle_lengths(), want);
    }

    #[test]
    fn bipartite_odd_diagonal() {
        let mut ctx = BuildCtx::new(&BuildOptions::default());
        let p = decompose_bipartite(5, 5, true, &ll(&[4; 5]), &mut ctx).unwrap();
        assert!(p.is_decomposition());
        assert!(p.matching().is_some());
        assert_eq!(p.cycle_lengths(), vec![4; 5]);
    }

    #[test]
    fn bipartite_rejects_infeasible() {
        let mut ctx = BuildCtx::new(&BuildOptions::default());
        assert!(matches!(
            decompose_bipartite(8, 8, false, &ll(&[16, 16, 16, 16]), &mut ctx),
            Err(Error::HypothesesViolated(_))
        ));
        assert!(matches!(
            decompose_bipartite(5, 5, false, &ll(&[4; 5]), &mut ctx),
            Err(Error::HypothesesViolated(_))
        ));
    }

    #[test]
    fn provenance_collected_when_enabled() {
        let mut ctx = BuildCtx::new(&BuildOptions {
            provenance: true,
            ..Default::default()
        });
        decompose_bipartite(8, 8, false, &ll(&[4, 4, 8, 8, 8, 8, 8, 8, 8]), &mut ctx).unwrap();
        let log = ctx.provenance().unwrap();
        assert!(!log.is_empty());
        assert!(log[0].contains("four-six base"));
    }
}

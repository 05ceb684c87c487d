//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) enabled, `run_many` fans work out
//! over rayon when `parallel == true`; without the feature, or with
//! `parallel == false`, it runs sequentially. Results come back in input
//! order either way, so callers stay deterministic.

/// Maps `f` over `items`, optionally in parallel.
pub fn run_many<T, U, F>(items: Vec<T>, parallel: bool, f: F) -> Vec<U>
where
    T: Send + Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if parallel {
            use rayon::prelude::*;
            return items.par_iter().map(|t| f(t)).collect();
        }
    }
    let _ = parallel;
    items.iter().map(|t| f(t)).collect()
}

/// Runs seeded attempts `lo..hi` and returns the result of the
/// lowest-numbered attempt that succeeds. Deterministic regardless of
/// scheduling: with `jobs > 1` attempts are evaluated in chunks and the
/// first success by attempt index wins.
pub fn first_success<U, F>(lo: u64, hi: u64, jobs: usize, f: F) -> Option<(u64, U)>
where
    U: Send,
    F: Fn(u64) -> Option<U> + Sync + Send,
{
    let jobs = jobs.max(1);
    if jobs == 1 {
        for i in lo..hi {
            if let Some(u) = f(i) {
                return Some((i, u));
            }
        }
        return None;
    }
    let mut base = lo;
    while base < hi {
        let chunk_end = (base + jobs as u64).min(hi);
        let attempts: Vec<u64> = (base..chunk_end).collect();
        let results = run_many(attempts, true, |&i| f(i).map(|u| (i, u)));
        for r in results {
            if let Some((i, u)) = r {
                return Some((i, u));
            }
        }
        base = chunk_end;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_preserved() {
        let xs: Vec<u32> = (0..100).collect();
        let seq = run_many(xs.clone(), false, |x| x * 2);
        let par = run_many(xs, true, |x| x * 2);
        assert_eq!(seq, par);
    }

    #[test]
    fn lowest_attempt_wins() {
        let pick = |i: u64| if i >= 7 { Some(i * 10) } else { None };
        assert_eq!(first_success(0, 100, 4, pick), Some((7, 70)));
        assert_eq!(first_success(0, 100, 1, pick), Some((7, 70)));
        assert_eq!(first_success(0, 5, 4, pick), None);
    }
}

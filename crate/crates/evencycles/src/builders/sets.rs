//! Disjoint witness sets: given S, T inside a ground set A, find S' and T'
//! of prescribed sizes with S∩S' = T∩T' = S'∩T' = ∅. Possible exactly when
//! three counting inequalities hold.

use crate::error::{Error, Result};
use crate::model::Vertex;
use std::collections::BTreeSet;

/// The three counting inequalities admitting disjoint witness sets.
pub fn good_triple(
    a: &BTreeSet<Vertex>,
    s: &BTreeSet<Vertex>,
    t: &BTreeSet<Vertex>,
    s_size: usize,
    t_size: usize,
) -> bool {
    debug_assert!(s.is_subset(a) && t.is_subset(a));
    let st = s.intersection(t).count();
    st + s_size + t_size <= a.len() && s.len() + s_size <= a.len() && t.len() + t_size <= a.len()
}

/// Witness sets themselves; least elements first, following the two
/// branches on how much of T escapes S.
pub fn find_disjoint_sets(
    a: &BTreeSet<Vertex>,
    s: &BTreeSet<Vertex>,
    t: &BTreeSet<Vertex>,
    s_size: usize,
    t_size: usize,
) -> Result<(Vec<Vertex>, Vec<Vertex>)> {
    if !good_triple(a, s, t, s_size, t_size) {
        return Err(Error::NotGood(format!(
            "|A|={}, |S|={}, |T|={}, |S∩T|={}, s'={s_size}, t'={t_size}",
            a.len(),
            s.len(),
            t.len(),
            s.intersection(t).count()
        )));
    }
    let t_minus_s: Vec<Vertex> = t.difference(s).copied().collect();
    let (s_prime, t_prime): (Vec<Vertex>, Vec<Vertex>) = if s_size <= t_minus_s.len() {
        let s_prime: Vec<Vertex> = t_minus_s[..s_size].to_vec();
        let t_prime: Vec<Vertex> = a.difference(t).copied().take(t_size).collect();
        (s_prime, t_prime)
    } else {
        let mut s_prime = t_minus_s.clone();
        let s_set: BTreeSet<Vertex> = s.iter().copied().collect();
        for &x in a.iter() {
            if s_prime.len() == s_size {
                break;
            }
            if !s_set.contains(&x) && !t.contains(&x) {
                s_prime.push(x);
            }
        }
        let s_prime_set: BTreeSet<Vertex> = s_prime.iter().copied().collect();
        let t_prime: Vec<Vertex> = a
            .iter()
            .copied()
            .filter(|x| !(s.contains(x) && t.contains(x)) && !s_prime_set.contains(x))
            .take(t_size)
            .collect();
        (s_prime, t_prime)
    };
    if s_prime.len() != s_size || t_prime.len() != t_size {
        return Err(Error::InternalTransformFailure(
            "witness sets came up short".into(),
        ));
    }
    debug_assert!(s_prime.iter().all(|x| !s.contains(x)));
    debug_assert!(t_prime.iter().all(|x| !t.contains(x)));
    debug_assert!(s_prime.iter().all(|x| !t_prime.contains(x)));
    Ok((s_prime, t_prime))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ids: &[usize]) -> BTreeSet<Vertex> {
        ids.iter().map(|&i| Vertex::new(0, i)).collect()
    }

    #[test]
    fn trivially_good() {
        let a = set(&[1, 2, 3, 4, 5]);
        assert!(good_triple(&a, &set(&[]), &set(&[]), 2, 3));
        assert!(!good_triple(&a, &set(&[]), &set(&[]), 3, 3));
    }

    #[test]
    fn overlap_counts_against_capacity() {
        let a = set(&(0..10).collect::<Vec<_>>());
        let s = set(&[0, 1, 2, 3, 4]);
        // |S∩T| = 5 and 5 + 3 + 3 > 10
        assert!(!good_triple(&a, &s, &s, 3, 3));
    }

    #[test]
    fn first_branch_when_t_escapes_s() {
        let a = set(&[1, 2, 3, 4, 5, 6]);
        let s = set(&[1]);
        let t = set(&[1, 2, 3]);
        let (sp, tp) = find_disjoint_sets(&a, &s, &t, 2, 2).unwrap();
        assert_eq!(sp, vec![Vertex::new(0, 2), Vertex::new(0, 3)]);
        assert!(tp.iter().all(|x| !t.contains(x)));
    }

    #[test]
    fn second_branch_fills_outside() {
        let a = set(&[1, 2, 3, 4, 5, 6]);
        let s = set(&[1]);
        let t = set(&[1, 2]);
        let (sp, tp) = find_disjoint_sets(&a, &s, &t, 3, 1).unwrap();
        assert!(sp.contains(&Vertex::new(0, 2)));
        assert_eq!(sp.len(), 3);
        assert!(tp.iter().all(|x| !t.contains(x) && !sp.contains(x)));
    }

    #[test]
    fn not_good_errors() {
        let a = set(&[1, 2, 3]);
        assert!(matches!(
            find_disjoint_sets(&a, &set(&[1, 2, 3]), &set(&[]), 1, 0),
            Err(Error::NotGood(_))
        ));
    }

    #[test]
    fn agrees_with_brute_force_on_small_ground_sets() {
        // exhaustive: all subsets S, T of {0..5}, all sizes
        let universe: Vec<usize> = (0..6).collect();
        let a = set(&universe);
        for s_bits in 0u32..64 {
            for t_bits in 0u32..64 {
                let s = set(&universe
                    .iter()
                    .filter(|&&i| s_bits >> i & 1 == 1)
                    .copied()
                    .collect::<Vec<_>>());
                let t = set(&universe
                    .iter()
                    .filter(|&&i| t_bits >> i & 1 == 1)
                    .copied()
                    .collect::<Vec<_>>());
                for sp in 0..=4usize {
                    for tp in 0..=4usize {
                        let claimed = good_triple(&a, &s, &t, sp, tp);
                        let exists = brute_force_exists(&a, &s, &t, sp, tp);
                        assert_eq!(claimed, exists, "s={s_bits:#b} t={t_bits:#b} {sp} {tp}");
                        if claimed {
                            find_disjoint_sets(&a, &s, &t, sp, tp).unwrap();
                        }
                    }
                }
            }
        }
    }

    fn brute_force_exists(
        a: &BTreeSet<Vertex>,
        s: &BTreeSet<Vertex>,
        t: &BTreeSet<Vertex>,
        sp: usize,
        tp: usize,
    ) -> bool {
        let items: Vec<Vertex> = a.iter().copied().collect();
        let n = items.len();
        for s_mask in 0u32..1 << n {
            if s_mask.count_ones() as usize != sp {
                continue;
            }
            let s_prime: BTreeSet<Vertex> = items
                .iter()
                .enumerate()
                .filter(|&(i, _)| s_mask >> i & 1 == 1)
                .map(|(_, &v)| v)
                .collect();
            if s_prime.intersection(s).next().is_some() {
                continue;
            }
            for t_mask in 0u32..1 << n {
                if t_mask.count_ones() as usize != tp {
                    continue;
                }
                let t_prime: BTreeSet<Vertex> = items
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| t_mask >> i & 1 == 1)
                    .map(|(_, &v)| v)
                    .collect();
                if t_prime.intersection(t).next().is_some() {
                    continue;
                }
                if t_prime.intersection(&s_prime).next().is_some() {
                    continue;
                }
                return true;
            }
        }
        false
    }
}

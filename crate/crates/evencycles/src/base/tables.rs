//! Embedded primitive decomposition tables: one text-format file per
//! entry under `data/primitives/`, validated on load. Regenerate with the
//! ignored test `regenerate_primitive_tables`.

use crate::model::format::parse_packing;
use crate::model::Packing;

macro_rules! table {
    ($name:literal) => {
        include_str!(concat!("../../data/primitives/", $name))
    };
}

/// 4/6-cycle decompositions: (a, b, t4, t6, file text).
const FOUR_SIX: &[(usize, usize, usize, usize, &str)] = &[
    (4, 4, 4, 0, table!("K4-4_4x4_0x6.dec")),
    (4, 4, 1, 2, table!("K4-4_1x4_2x6.dec")),
    (4, 6, 6, 0, table!("K4-6_6x4_0x6.dec")),
    (4, 6, 3, 2, table!("K4-6_3x4_2x6.dec")),
    (4, 6, 0, 4, table!("K4-6_0x4_4x6.dec")),
    (6, 6, 9, 0, table!("K6-6_9x4_0x6.dec")),
    (6, 6, 6, 2, table!("K6-6_6x4_2x6.dec")),
    (6, 6, 3, 4, table!("K6-6_3x4_4x6.dec")),
    (6, 6, 0, 6, table!("K6-6_0x4_6x6.dec")),
    (5, 5, 5, 0, table!("K5-5_5x4_0x6.dec")),
    (5, 5, 2, 2, table!("K5-5_2x4_2x6.dec")),
    (7, 7, 9, 1, table!("K7-7_9x4_1x6.dec")),
    (7, 7, 6, 3, table!("K7-7_6x4_3x6.dec")),
    (7, 7, 3, 5, table!("K7-7_3x4_5x6.dec")),
    (7, 7, 0, 7, table!("K7-7_0x4_7x6.dec")),
];

/// Complete-graph cycle packings: (n, m, e, file text).
const COMPLETE: &[(usize, usize, usize, &str)] = &[
    (9, 4, 0, table!("K9_m4_e0.dec")),
    (9, 6, 0, table!("K9_m6_e0.dec")),
    (9, 8, 4, table!("K9_m8_e4.dec")),
    (13, 4, 6, table!("K13_m4_e6.dec")),
    (13, 6, 0, table!("K13_m6_e0.dec")),
    (13, 8, 6, table!("K13_m8_e6.dec")),
    (13, 10, 8, table!("K13_m10_e8.dec")),
    (13, 12, 6, table!("K13_m12_e6.dec")),
];

pub(crate) fn four_six(a: usize, b: usize, t4: usize, t6: usize) -> Option<Packing> {
    let (_, _, _, _, text) = FOUR_SIX
        .iter()
        .find(|&&(ta, tb, t4x, t6x, _)| ta == a && tb == b && t4x == t4 && t6x == t6)?;
    let packing = parse_packing(text).ok()?;
    let sizes = packing.host().part_sizes();
    if sizes != [a, b] || !packing.is_decomposition() {
        return None;
    }
    let mut want = vec![4usize; t4];
    want.extend(std::iter::repeat(6).take(t6));
    want.sort_unstable();
    if packing.cycle_lengths() != want {
        return None;
    }
    Some(packing)
}

pub(crate) fn complete_pack(n: usize, m: usize, e: usize) -> Option<Packing> {
    let (_, _, _, text) = COMPLETE
        .iter()
        .find(|&&(tn, tm, te, _)| tn == n && tm == m && te == e)?;
    let packing = parse_packing(text).ok()?;
    let total = n * (n - 1) / 2;
    if packing.host().edge_count() != total {
        return None;
    }
    if packing.cycle_lengths() != vec![m; (total - e) / m] {
        return None;
    }
    let leave = packing.leave();
    if leave.edge_count() != e {
        return None;
    }
    if e > 0 {
        let comps = crate::model::classify(&leave.edges()).ok()?;
        match comps.only_component()?.class {
            crate::model::ComponentClass::SingleCycle(len) if len == e => {}
            _ => return None,
        }
    }
    Some(packing)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_table_entry_loads_and_validates() {
        for &(a, b, t4, t6, _) in FOUR_SIX {
            assert!(
                four_six(a, b, t4, t6).is_some(),
                "table entry K{a}-{b} ({t4},{t6}) failed validation"
            );
        }
        for &(n, m, e, _) in COMPLETE {
            assert!(
                complete_pack(n, m, e).is_some(),
                "table entry K{n} m={m} e={e} failed validation"
            );
        }
    }

    #[test]
    fn missing_entries_are_none() {
        assert!(four_six(8, 8, 16, 0).is_none());
        assert!(complete_pack(17, 4, 0).is_none());
    }
}

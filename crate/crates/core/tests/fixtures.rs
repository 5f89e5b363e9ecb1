use std::collections::BTreeSet;

use gnes_core::fixtures::{compare_family, compare_mode, families, family, EntryVerdict, TableCase};
use gnes_core::particular_solver::{Route, SolveOptions};

/// (family, case, key) of every entry whose printed text needs a correction.
const ERRATA: &[(&str, TableCase, &str)] = &[
    ("three_halves_56", TableCase::Single, "1"),
    ("three_halves_56", TableCase::Generic, "00"),
    ("three_halves_56", TableCase::Anti, "00"),
    ("three_five_20", TableCase::Right, "0"),
    ("three_five_20", TableCase::Right, "1"),
    ("three_five_6", TableCase::Right, "0"),
    ("three_five_6", TableCase::Right, "1"),
    ("three_seven_30", TableCase::Left, "0"),
    ("three_seven_30", TableCase::Left, "1"),
    ("three_seven_12", TableCase::Generic, "10"),
];

#[test]
fn every_printed_table_is_reproduced() {
    let opts = SolveOptions::default();
    let mut corrected = BTreeSet::new();
    for fam in families().unwrap() {
        for cmp in compare_family(&fam, &opts).unwrap() {
            assert_eq!(cmp.kernel_dim, 0, "{} {:?}", fam.id, cmp.mode);
            for e in &cmp.entries {
                match &e.verdict {
                    EntryVerdict::Equal => {}
                    EntryVerdict::EqualCorrected { .. } => {
                        corrected.insert((fam.id.clone(), format!("{:?}", cmp.case), e.key.clone()));
                    }
                    v => panic!("{} {:?} {:?} key {}: {:?}", fam.id, cmp.case, cmp.mode, e.key, v),
                }
            }
        }
    }
    let expect: BTreeSet<_> = ERRATA.iter().map(|(f, c, k)| (f.to_string(), format!("{c:?}"), k.to_string())).collect();
    assert_eq!(corrected, expect);
}

#[test]
fn zero_modes_need_no_correction() {
    for fam in families().unwrap() {
        let cmp = compare_mode(&fam, 0, 0, &SolveOptions::default()).unwrap();
        assert_eq!(cmp.entries.len(), 1, "{}", fam.id);
        assert_eq!(cmp.entries[0].verdict, EntryVerdict::Equal, "{}", fam.id);
    }
}

#[test]
fn mu_table_at_three_modes() {
    let fam = family("three_halves_30").unwrap();
    for n2 in 1..=3 {
        let cmp = compare_mode(&fam, -n2, n2, &SolveOptions::default()).unwrap();
        assert_eq!(cmp.case, TableCase::Anti);
        assert!(cmp.all_equal(), "{cmp:?}");
    }
}

#[test]
fn sign_dependent_entries_hold_in_every_quadrant() {
    let opts = SolveOptions::default();
    for fam in families().unwrap() {
        for (n1, n2) in [(-1, -2), (-2, 3), (3, -1), (-2, -2), (2, 2), (-1, 1), (4, -4)] {
            let cmp = compare_mode(&fam, n1, n2, &opts).unwrap();
            assert!(cmp.all_equal(), "{} ({n1},{n2}) {:?}", fam.id, cmp.entries);
        }
        for n in [-2, 4] {
            for (n1, n2) in [(n, 0), (0, n)] {
                let cmp = compare_mode(&fam, n1, n2, &opts).unwrap();
                assert!(cmp.all_equal(), "{} ({n1},{n2}) {:?}", fam.id, cmp.entries);
            }
        }
    }
}

#[test]
fn both_elimination_routes_reproduce_the_tables() {
    let opts = SolveOptions { route: Route::RatPi, ..Default::default() };
    for id in ["three_halves_30", "three_five_20", "five_halves_12"] {
        let fam = family(id).unwrap();
        for (n1, n2) in [(1, 2), (2, -2), (0, 1), (1, 0)] {
            assert!(compare_mode(&fam, n1, n2, &opts).unwrap().all_equal(), "{id} ({n1},{n2})");
        }
    }
}

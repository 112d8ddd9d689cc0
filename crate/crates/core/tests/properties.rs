use permstat_core::compat::{ab_move_table, check_weakly_bicompatible, dual_knuth_table, rsk_recording};
use permstat_core::perm::{lex_permutations, lex_rank};
use permstat_core::stat::descent_set;
use permstat_core::*;
use proptest::prelude::*;

fn perm_strategy(max: u32) -> impl Strategy<Value = Permutation> {
    (1..=max).prop_flat_map(|n| Just((1..=n).collect::<Vec<u32>>()).prop_shuffle()).prop_map(|v| Permutation::new(v).unwrap())
}

fn builtin_strategy() -> impl Strategy<Value = Builtin> {
    proptest::sample::select(Builtin::ALL.to_vec())
}

proptest! {
    #[test]
    fn shuffle_set_shape(p in perm_strategy(4), q in perm_strategy(3)) {
        let q = q.shift(p.len() as u32);
        let all = shuffles(&p, &q).unwrap();
        let (a, b) = (p.len(), q.len());
        let binom = (1..=a).fold(1usize, |acc, k| acc * (a + b + 1 - k) / k);
        prop_assert_eq!(all.len(), binom);
        for w in &all {
            prop_assert!(w.contains_subsequence(&p) && w.contains_subsequence(&q));
        }
        prop_assert!(all.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn lex_rank_matches_position(n in 0usize..6, seed in any::<usize>()) {
        let perms = lex_permutations(n);
        let i = seed % perms.len();
        prop_assert_eq!(lex_rank(&perms[i]), i);
    }

    #[test]
    fn standardize_preserves_statistics(p in perm_strategy(7), b in builtin_strategy()) {
        let t = StatisticTable::builtin(b, 7);
        let spread = Permutation::new(p.letters().iter().map(|x| 3 * x + 1).collect()).unwrap();
        prop_assert_eq!(t.class_of(&p).unwrap(), t.class_of(&spread).unwrap());
    }

    #[test]
    fn table_json_round_trip(b in builtin_strategy(), max in 0usize..6) {
        let t = StatisticTable::builtin(b, max);
        prop_assert!(StatisticTable::from_json(&t.to_json()).unwrap() == t);
    }

    #[test]
    fn meet_refines_both(a in builtin_strategy(), b in builtin_strategy(), n in 1usize..6) {
        let (pa, pb) = (a.level(n), b.level(n));
        let m = pa.meet(&pb);
        prop_assert!(m.refines(&pa) && m.refines(&pb));
        prop_assert!(Partition::is_canonical(m.labels()));
    }

    #[test]
    fn recording_tableau_descents(p in perm_strategy(7)) {
        // i is a descent of p iff i+1 sits in a lower row than i in the recording tableau
        let q = rsk_recording(&p).unwrap();
        let row_of = |x: u32| q.rows().iter().position(|r| r.contains(&x)).unwrap();
        let tableau_descents: Vec<usize> = (1..p.len()).filter(|&i| row_of(i as u32 + 1) > row_of(i as u32)).collect();
        prop_assert_eq!(tableau_descents, descent_set(p.letters()));
    }
}

#[test]
fn lift_of_trivial_is_trivial() {
    for n in 0..5 {
        for k in 0..3 {
            assert!(lift(&Partition::trivial(n), k).is_trivial());
        }
    }
}

#[test]
fn lift_is_monotone() {
    for n in 1..5 {
        let fine = lift(&Partition::discrete(n), 1);
        for b in Builtin::ALL {
            assert!(fine.refines(&lift(&b.level(n), 1)), "{b}");
        }
        assert!(Builtin::Des.level(n + 1).refines(&lift(&Builtin::Des.level(n), 1)));
    }
}

#[test]
fn ab_move_tables_are_weakly_bicompatible() {
    let pairs: Vec<(Permutation, Permutation)> =
        [("132", "231"), ("213", "312")].iter().map(|(a, b)| (a.parse().unwrap(), b.parse().unwrap())).collect();
    let dk_base = StatisticTable::with_identifications("dK-base", 5, &pairs).unwrap();
    let closure = ab_move_table(&dk_base, 5).unwrap();
    assert!(closure.levels() == dual_knuth_table(5).levels());
    for b in [Builtin::Des, Builtin::Val] {
        let t = ab_move_table(&StatisticTable::builtin(b, 5), 5).unwrap();
        assert!(check_weakly_bicompatible(&t, 5).unwrap().holds, "{b}");
    }
}

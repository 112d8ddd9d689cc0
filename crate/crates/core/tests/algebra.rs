use permstat_core::algebra::{check_bialgebra, coassoc_left, coassoc_right, quotient_check, GradedVector, HopfAlgebra, Tensor};
use permstat_core::compat::dual_knuth_table;
use permstat_core::*;
use proptest::prelude::*;

fn tables(max: usize) -> Vec<StatisticTable> {
    let mut out: Vec<StatisticTable> =
        [Builtin::Des, Builtin::Pk, Builtin::Val, Builtin::Dis, Builtin::Triv].iter().map(|&b| StatisticTable::builtin(b, max)).collect();
    out.push(dual_knuth_table(max));
    out
}

fn basis_upto(t: &StatisticTable, max: usize) -> Vec<ClassId> {
    (0..=max).flat_map(|n| t.basis(n).collect::<Vec<_>>()).collect()
}

#[test]
fn associative_with_unit() {
    for t in tables(5) {
        let h = HopfAlgebra::new(&t).unwrap();
        let basis = basis_upto(&t, 3);
        for &x in &basis {
            let bx = GradedVector::basis(x);
            assert_eq!(h.multiply(&h.unit(), &bx).unwrap(), bx);
            assert_eq!(h.multiply(&bx, &h.unit()).unwrap(), bx);
            for &y in &basis {
                for &z in &basis {
                    if x.level + y.level + z.level > 5 {
                        continue;
                    }
                    let (by, bz) = (GradedVector::basis(y), GradedVector::basis(z));
                    let left = h.multiply(&h.multiply(&bx, &by).unwrap(), &bz).unwrap();
                    let right = h.multiply(&bx, &h.multiply(&by, &bz).unwrap()).unwrap();
                    assert_eq!(left, right, "{} {x} {y} {z}", t.name());
                }
            }
        }
    }
}

#[test]
fn coassociative_and_counital() {
    for t in tables(5) {
        let h = HopfAlgebra::new(&t).unwrap();
        for x in basis_upto(&t, 5) {
            let d = h.coproduct(x).unwrap();
            assert_eq!(coassoc_left(&h, &d).unwrap(), coassoc_right(&h, &d).unwrap());
            let total: i64 = d.iter().map(|(_, c)| c).sum();
            assert_eq!(total as usize, x.level + 1);
        }
    }
}

#[test]
fn commutativity() {
    for t in tables(4).into_iter().filter(|t| t.name() != "dK") {
        let h = HopfAlgebra::new(&t).unwrap();
        let basis = basis_upto(&t, 2);
        let commutative = basis.iter().all(|&x| basis.iter().all(|&y| h.product(x, y).unwrap() == h.product(y, x).unwrap()));
        let expected = matches!(t.name(), "Des" | "Pk" | "Val" | "triv");
        assert_eq!(commutative, expected, "{}", t.name());
    }
}

fn antipode_sides(h: &HopfAlgebra<'_>, x: ClassId) -> (GradedVector, GradedVector) {
    let d: Tensor = h.coproduct(x).unwrap();
    let mut left = GradedVector::zero();
    let mut right = GradedVector::zero();
    for ((a, b), c) in d.iter() {
        let (ba, bb) = (GradedVector::basis(*a), GradedVector::basis(*b));
        left.add_scaled(&h.multiply(&h.antipode(*a).unwrap(), &bb).unwrap(), c);
        right.add_scaled(&h.multiply(&ba, &h.antipode(*b).unwrap()).unwrap(), c);
    }
    (left, right)
}

#[test]
fn antipode_axiom() {
    for t in tables(5) {
        let h = HopfAlgebra::new(&t).unwrap();
        for x in basis_upto(&t, 5) {
            let expected = if x.level == 0 { h.unit() } else { GradedVector::zero() };
            let (left, right) = antipode_sides(&h, x);
            assert_eq!(left, expected, "{} {x}", t.name());
            assert_eq!(right, expected, "{} {x}", t.name());
        }
    }
}

#[test]
fn antipode_is_involutive_for_commutative_tables() {
    for b in [Builtin::Des, Builtin::Pk, Builtin::Triv] {
        let t = StatisticTable::builtin(b, 5);
        let h = HopfAlgebra::new(&t).unwrap();
        for x in basis_upto(&t, 5) {
            let mut twice = GradedVector::zero();
            for (y, c) in h.antipode(x).unwrap().iter() {
                twice.add_scaled(&h.antipode(*y).unwrap(), c);
            }
            assert_eq!(twice, GradedVector::basis(x));
        }
    }
}

#[test]
fn takeuchi_agrees_at_five() {
    let t = StatisticTable::builtin(Builtin::Pk, 5);
    let h = HopfAlgebra::new(&t).unwrap();
    for x in t.basis(5) {
        assert_eq!(h.antipode(x).unwrap(), h.antipode_takeuchi(x).unwrap());
    }
}

#[test]
fn bialgebra_small() {
    for t in tables(4) {
        assert!(check_bialgebra(&t, 4).unwrap().holds, "{}", t.name());
    }
}

#[test]
fn quotients() {
    let dis = StatisticTable::builtin(Builtin::Dis, 4);
    let dk = dual_knuth_table(4);
    let des = StatisticTable::builtin(Builtin::Des, 4);
    assert!(quotient_check(&dis, &dk, 4).unwrap().holds);
    assert!(quotient_check(&dk, &des, 4).unwrap().holds);
    assert!(matches!(quotient_check(&des, &dk, 4), Err(Error::NotARefinement { .. })));
    let triv = StatisticTable::trivial(4);
    assert!(quotient_check(&des, &triv, 4).unwrap().holds);
}

proptest! {
    #[test]
    fn product_size_is_binomial(a in 0usize..4, b in 0usize..4, i in 0usize..24, j in 0usize..24) {
        let t = StatisticTable::builtin(Builtin::Dis, 6);
        let h = HopfAlgebra::new(&t).unwrap();
        let x = ClassId::new(a, (i % t.num_classes(a)) as u32);
        let y = ClassId::new(b, (j % t.num_classes(b)) as u32);
        let v = h.product(x, y).unwrap();
        let total: i64 = v.iter().map(|(_, c)| c).sum();
        let binom = (1..=a).fold(1usize, |acc, k| acc * (a + b + 1 - k) / k);
        prop_assert_eq!(total as usize, binom);
        prop_assert!(v.iter().all(|(c, _)| c.level == a + b));
    }
}

//! Shuffle algebra, substring coalgebra and their Hopf algebra.
//!
//! Basis elements are the classes of a [`StatisticTable`]; coefficients are
//! exact integers. Products use the representative of the left class on
//! `1..=m` and the right representative shifted above it, which is valid
//! for weakly and strongly shuffle-compatible tables alike.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Mutex;

use serde::Serialize;

use crate::compat::{check_shuffle_compatible, check_substring_compatible, CompatVerdict, ShuffleMode, Witness};
use crate::error::{Error, Result};
use crate::perm::{interleave, lex_permutations};
use crate::stat::{refines, ClassId, StatisticTable};

/// Finitely supported integer combination of basis elements `K`.
#[derive(Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Combination<K: Ord> {
    terms: BTreeMap<K, i64>,
}

/// Element of the graded vector space spanned by the classes.
pub type GradedVector = Combination<ClassId>;
/// Element of the tensor square.
pub type Tensor = Combination<(ClassId, ClassId)>;
/// Element of the tensor cube.
pub type Tensor3 = Combination<(ClassId, ClassId, ClassId)>;

impl<K: Ord + Clone> Combination<K> {
    pub fn zero() -> Self {
        Combination { terms: BTreeMap::new() }
    }

    pub fn basis(k: K) -> Self {
        let mut v = Self::zero();
        v.add_term(k, 1);
        v
    }

    pub fn add_term(&mut self, k: K, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let entry = self.terms.entry(k.clone()).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.terms.remove(&k);
        }
    }

    pub fn add_scaled(&mut self, other: &Self, scale: i64) {
        for (k, &c) in &other.terms {
            self.add_term(k.clone(), c * scale);
        }
    }

    pub fn scaled(&self, scale: i64) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, scale);
        out
    }

    pub fn coeff(&self, k: &K) -> i64 {
        self.terms.get(k).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, i64)> {
        self.terms.iter().map(|(k, &c)| (k, c))
    }

    /// Applies a linear map given on basis elements.
    pub fn map_basis<L: Ord + Clone>(&self, mut f: impl FnMut(&K) -> L) -> Combination<L> {
        let mut out = Combination::zero();
        for (k, &c) in &self.terms {
            out.add_term(f(k), c);
        }
        out
    }
}

impl<K: Ord + Clone> std::ops::Add for &Combination<K> {
    type Output = Combination<K>;

    fn add(self, rhs: Self) -> Combination<K> {
        let mut out = self.clone();
        out.add_scaled(rhs, 1);
        out
    }
}

impl<K: Ord + Clone> std::ops::Sub for &Combination<K> {
    type Output = Combination<K>;

    fn sub(self, rhs: Self) -> Combination<K> {
        let mut out = self.clone();
        out.add_scaled(rhs, -1);
        out
    }
}

impl<K: Ord + fmt::Debug> fmt::Debug for Combination<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "{c}*{k:?}")?;
        }
        Ok(())
    }
}

impl GradedVector {
    /// Homogeneous component of the given length.
    pub fn component(&self, level: usize) -> GradedVector {
        Combination { terms: self.terms.iter().filter(|(k, _)| k.level == level).map(|(k, &c)| (*k, c)).collect() }
    }
}

/// The Hopf structure of a table; which operations are available depends on
/// the compatibility the constructor verified.
pub struct HopfAlgebra<'t> {
    table: &'t StatisticTable,
    shuffle: Option<ShuffleMode>,
    substring: bool,
    reps: Vec<Vec<Vec<u8>>>,
    products: Mutex<HashMap<(ClassId, ClassId), GradedVector>>,
    antipodes: Mutex<HashMap<ClassId, GradedVector>>,
}

impl<'t> HopfAlgebra<'t> {
    /// Product only; requires shuffle compatibility of the given kind.
    pub fn shuffle_algebra(table: &'t StatisticTable, mode: ShuffleMode) -> Result<Self> {
        require(check_shuffle_compatible(table, mode, table.max_length())?, table, mode_name(mode))?;
        Ok(Self::build(table, Some(mode), false))
    }

    /// Coproduct only; requires substring compatibility.
    pub fn substring_coalgebra(table: &'t StatisticTable) -> Result<Self> {
        require(check_substring_compatible(table), table, "substring-compatible")?;
        Ok(Self::build(table, None, true))
    }

    /// Full Hopf algebra; requires weak bicompatibility.
    pub fn new(table: &'t StatisticTable) -> Result<Self> {
        require(check_shuffle_compatible(table, ShuffleMode::Weak, table.max_length())?, table, "weakly shuffle-compatible")?;
        require(check_substring_compatible(table), table, "substring-compatible")?;
        Ok(Self::build(table, Some(ShuffleMode::Weak), true))
    }

    fn build(table: &'t StatisticTable, shuffle: Option<ShuffleMode>, substring: bool) -> Self {
        let reps = (0..=table.max_length())
            .map(|n| {
                let perms = lex_permutations(n);
                let level = table.level(n);
                (0..level.num_classes() as u32).map(|c| perms[level.representative_rank(c)].clone()).collect()
            })
            .collect();
        HopfAlgebra {
            table,
            shuffle,
            substring,
            reps,
            products: Mutex::new(HashMap::new()),
            antipodes: Mutex::new(HashMap::new()),
        }
    }

    pub fn table(&self) -> &StatisticTable {
        self.table
    }

    pub fn unit(&self) -> GradedVector {
        GradedVector::basis(ClassId::EMPTY)
    }

    pub fn counit(&self, v: &GradedVector) -> i64 {
        v.coeff(&ClassId::EMPTY)
    }

    /// Lexicographically first member of a class, 0-based letters.
    pub fn representative(&self, c: ClassId) -> &[u8] {
        &self.reps[c.level][c.index as usize]
    }

    fn check_class(&self, c: ClassId) -> Result<()> {
        self.table.check_length(c.level)?;
        if c.index as usize >= self.table.num_classes(c.level) {
            return Err(Error::Schema(format!("no class {c} in {}", self.table.name())));
        }
        Ok(())
    }

    fn classify(&self, letters: &[u8]) -> ClassId {
        ClassId::new(letters.len(), self.table.level(letters.len()).class_of_letters(letters))
    }

    pub fn product(&self, a: ClassId, b: ClassId) -> Result<GradedVector> {
        if self.shuffle.is_none() {
            return Err(incompatible(self.table, "shuffle-compatible"));
        }
        self.check_class(a)?;
        self.check_class(b)?;
        self.table.check_length(a.level + b.level)?;
        if let Some(v) = self.products.lock().expect("memo lock").get(&(a, b)) {
            return Ok(v.clone());
        }
        let left = self.representative(a);
        let shift = a.level as u8;
        let right: Vec<u8> = self.representative(b).iter().map(|x| x + shift).collect();
        let mut out = GradedVector::zero();
        let mut buf = Vec::with_capacity(a.level + b.level);
        interleave(left, &right, &mut buf, &mut |w| out.add_term(self.classify(w), 1));
        self.products.lock().expect("memo lock").insert((a, b), out.clone());
        Ok(out)
    }

    pub fn multiply(&self, x: &GradedVector, y: &GradedVector) -> Result<GradedVector> {
        let mut out = GradedVector::zero();
        for (a, ca) in x.iter() {
            for (b, cb) in y.iter() {
                out.add_scaled(&self.product(*a, *b)?, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn coproduct(&self, a: ClassId) -> Result<Tensor> {
        if !self.substring {
            return Err(incompatible(self.table, "substring-compatible"));
        }
        self.check_class(a)?;
        let rep = self.representative(a);
        let mut out = Tensor::zero();
        for i in 0..=rep.len() {
            out.add_term((self.classify(&rep[..i]), self.classify(&rep[i..])), 1);
        }
        Ok(out)
    }

    pub fn coproduct_of(&self, x: &GradedVector) -> Result<Tensor> {
        let mut out = Tensor::zero();
        for (a, c) in x.iter() {
            out.add_scaled(&self.coproduct(*a)?, c);
        }
        Ok(out)
    }

    /// Componentwise product in the tensor square.
    pub fn multiply_tensors(&self, x: &Tensor, y: &Tensor) -> Result<Tensor> {
        let mut out = Tensor::zero();
        for ((a1, a2), ca) in x.iter() {
            for ((b1, b2), cb) in y.iter() {
                let left = self.product(*a1, *b1)?;
                let right = self.product(*a2, *b2)?;
                for (l, cl) in left.iter() {
                    for (r, cr) in right.iter() {
                        out.add_term((*l, *r), ca * cb * cl * cr);
                    }
                }
            }
        }
        Ok(out)
    }

    /// Antipode via the recursion `S(x) = -x - sum S(x') x''` over the
    /// reduced coproduct.
    pub fn antipode(&self, a: ClassId) -> Result<GradedVector> {
        if self.shuffle.is_none() || !self.substring {
            return Err(incompatible(self.table, "weakly bicompatible"));
        }
        self.check_class(a)?;
        if let Some(v) = self.antipodes.lock().expect("memo lock").get(&a) {
            return Ok(v.clone());
        }
        let mut out = GradedVector::zero();
        if a.level == 0 {
            out = self.unit();
        } else {
            out.add_term(a, -1);
            let rep = self.representative(a).to_vec();
            for i in 1..rep.len() {
                let head = self.antipode(self.classify(&rep[..i]))?;
                let tail = GradedVector::basis(self.classify(&rep[i..]));
                out.add_scaled(&self.multiply(&head, &tail)?, -1);
            }
        }
        self.antipodes.lock().expect("memo lock").insert(a, out.clone());
        Ok(out)
    }

    /// Takeuchi's alternating sum `sum_k (-1)^k m^(k-1) reduced-Δ^(k-1)`,
    /// evaluated directly over all splittings into nonempty consecutive blocks.
    pub fn antipode_takeuchi(&self, a: ClassId) -> Result<GradedVector> {
        if self.shuffle.is_none() || !self.substring {
            return Err(incompatible(self.table, "weakly bicompatible"));
        }
        self.check_class(a)?;
        if a.level == 0 {
            return Ok(self.unit());
        }
        let rep = self.representative(a).to_vec();
        let n = rep.len();
        let mut out = GradedVector::zero();
        // each subset of the n-1 inner cut points is one splitting
        for cuts in 0u32..(1 << (n - 1)) {
            let mut value = self.unit();
            let mut start = 0;
            for end in 1..=n {
                if end == n || cuts & (1 << (end - 1)) != 0 {
                    value = self.multiply(&value, &GradedVector::basis(self.classify(&rep[start..end])))?;
                    start = end;
                }
            }
            let blocks = cuts.count_ones() + 1;
            out.add_scaled(&value, if blocks % 2 == 0 { 1 } else { -1 });
        }
        Ok(out)
    }
}

fn mode_name(mode: ShuffleMode) -> &'static str {
    match mode {
        ShuffleMode::Strong => "shuffle-compatible",
        ShuffleMode::Weak => "weakly shuffle-compatible",
    }
}

fn incompatible(table: &StatisticTable, property: &str) -> Error {
    Error::IncompatibleStatistic { name: table.name().to_string(), property: property.to_string() }
}

fn require(verdict: CompatVerdict, table: &StatisticTable, property: &str) -> Result<()> {
    if verdict.holds {
        Ok(())
    } else {
        Err(incompatible(table, property))
    }
}

/// Structure constants of `a * b` in the shuffle algebra (weak convention).
pub fn product(t: &StatisticTable, a: ClassId, b: ClassId) -> Result<GradedVector> {
    HopfAlgebra::shuffle_algebra(t, ShuffleMode::Weak)?.product(a, b)
}

pub fn coproduct(t: &StatisticTable, a: ClassId) -> Result<Tensor> {
    HopfAlgebra::substring_coalgebra(t)?.coproduct(a)
}

pub fn antipode(t: &StatisticTable, a: ClassId) -> Result<GradedVector> {
    HopfAlgebra::new(t)?.antipode(a)
}

fn identity_failure(identity: &str, element: String) -> CompatVerdict {
    CompatVerdict::fails(Witness::Identity { identity: identity.to_string(), element })
}

/// Checks that the coproduct is an algebra map on basis pairs of total
/// length at most `upto`, and the counit and coassociativity laws on basis
/// elements of length at most `upto`.
pub fn check_bialgebra(t: &StatisticTable, upto: usize) -> Result<CompatVerdict> {
    t.check_length(upto)?;
    let h = HopfAlgebra::new(t)?;
    for total in 0..=upto {
        for i in 0..=total {
            for x in t.basis(i) {
                for y in t.basis(total - i) {
                    let lhs = h.coproduct_of(&h.product(x, y)?)?;
                    let rhs = h.multiply_tensors(&h.coproduct(x)?, &h.coproduct(y)?)?;
                    if lhs != rhs {
                        return Ok(identity_failure("coproduct(x*y) = coproduct(x)*coproduct(y)", format!("x={x}, y={y}")));
                    }
                }
            }
        }
    }
    for n in 0..=upto {
        for x in t.basis(n) {
            let d = h.coproduct(x)?;
            let left = d.iter().filter(|((a, _), _)| a.level == 0).fold(GradedVector::zero(), |mut acc, ((_, b), c)| {
                acc.add_term(*b, c);
                acc
            });
            let right = d.iter().filter(|((_, b), _)| b.level == 0).fold(GradedVector::zero(), |mut acc, ((a, _), c)| {
                acc.add_term(*a, c);
                acc
            });
            if left != GradedVector::basis(x) || right != GradedVector::basis(x) {
                return Ok(identity_failure("(counit x id) coproduct = id = (id x counit) coproduct", format!("x={x}")));
            }
            if coassoc_left(&h, &d)? != coassoc_right(&h, &d)? {
                return Ok(identity_failure("(coproduct x id) coproduct = (id x coproduct) coproduct", format!("x={x}")));
            }
        }
    }
    Ok(CompatVerdict::holds())
}

pub fn coassoc_left(h: &HopfAlgebra<'_>, d: &Tensor) -> Result<Tensor3> {
    let mut out = Tensor3::zero();
    for ((a, b), c) in d.iter() {
        for ((a1, a2), c1) in h.coproduct(*a)?.iter() {
            out.add_term((*a1, *a2, *b), c * c1);
        }
    }
    Ok(out)
}

pub fn coassoc_right(h: &HopfAlgebra<'_>, d: &Tensor) -> Result<Tensor3> {
    let mut out = Tensor3::zero();
    for ((a, b), c) in d.iter() {
        for ((b1, b2), c1) in h.coproduct(*b)?.iter() {
            out.add_term((*a, *b1, *b2), c * c1);
        }
    }
    Ok(out)
}

/// Checks that collapsing classes of `fine` onto classes of `coarse`
/// commutes with product, coproduct and antipode up to length `upto`.
pub fn quotient_check(fine: &StatisticTable, coarse: &StatisticTable, upto: usize) -> Result<CompatVerdict> {
    if !refines(fine, coarse, upto)?.holds {
        return Err(Error::NotARefinement { fine: fine.name().to_string(), coarse: coarse.name().to_string() });
    }
    let hf = HopfAlgebra::new(fine)?;
    let hc = HopfAlgebra::new(coarse)?;
    let phi = |c: &ClassId| ClassId::new(c.level, coarse.level(c.level).class_of_letters(hf.representative(*c)));
    for total in 0..=upto {
        for i in 0..=total {
            for x in fine.basis(i) {
                for y in fine.basis(total - i) {
                    let lhs = hf.product(x, y)?.map_basis(phi);
                    let rhs = hc.product(phi(&x), phi(&y))?;
                    if lhs != rhs {
                        return Ok(identity_failure("phi(x*y) = phi(x)*phi(y)", format!("x={x}, y={y}")));
                    }
                }
            }
        }
    }
    for n in 0..=upto {
        for x in fine.basis(n) {
            let lhs = hf.coproduct(x)?.map_basis(|(a, b)| (phi(a), phi(b)));
            if lhs != hc.coproduct(phi(&x))? {
                return Ok(identity_failure("(phi x phi) coproduct(x) = coproduct(phi(x))", format!("x={x}")));
            }
            if hf.antipode(x)?.map_basis(phi) != hc.antipode(phi(&x))? {
                return Ok(identity_failure("phi(S(x)) = S(phi(x))", format!("x={x}")));
            }
        }
    }
    Ok(CompatVerdict::holds())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;
    use crate::stat::Builtin;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn class(t: &StatisticTable, s: &str) -> ClassId {
        t.class_of(&p(s)).unwrap()
    }

    #[test]
    fn des_products() {
        let des = StatisticTable::builtin(Builtin::Des, 4);
        let one = class(&des, "1");
        let v = product(&des, one, one).unwrap();
        assert_eq!(v, &GradedVector::basis(class(&des, "12")) + &GradedVector::basis(class(&des, "21")));
        let v = product(&des, class(&des, "12"), one).unwrap();
        let mut want = GradedVector::zero();
        for s in ["123", "132", "312"] {
            want.add_term(class(&des, s), 1);
        }
        assert_eq!(v, want);
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn triv_product() {
        let triv = StatisticTable::trivial(4);
        let v = product(&triv, ClassId::new(2, 0), ClassId::new(1, 0)).unwrap();
        assert_eq!(v, GradedVector::basis(ClassId::new(3, 0)).scaled(3));
    }

    #[test]
    fn product_needs_compatibility() {
        let inv = StatisticTable::builtin(Builtin::Inv, 4);
        // inv is weakly shuffle-compatible, so the weak product exists
        assert!(product(&inv, ClassId::new(1, 0), ClassId::new(1, 0)).is_ok());
        assert!(matches!(
            HopfAlgebra::shuffle_algebra(&inv, ShuffleMode::Strong),
            Err(Error::IncompatibleStatistic { .. })
        ));
        let des = StatisticTable::builtin(Builtin::Des, 3);
        assert!(matches!(product(&des, ClassId::new(2, 0), ClassId::new(2, 0)), Err(Error::LengthOutOfRange { .. })));
    }

    #[test]
    fn strong_product_is_representative_independent() {
        let des = StatisticTable::builtin(Builtin::Des, 5);
        let h = HopfAlgebra::shuffle_algebra(&des, ShuffleMode::Strong).unwrap();
        // 13 and 524 are Des-equivalent to 12 and 312
        let mut v = GradedVector::zero();
        for w in crate::perm::shuffles(&p("13"), &p("524")).unwrap() {
            v.add_term(des.class_of(&w).unwrap(), 1);
        }
        assert_eq!(v, h.product(class(&des, "12"), class(&des, "312")).unwrap());
    }

    #[test]
    fn des_coproduct_of_132() {
        let des = StatisticTable::builtin(Builtin::Des, 3);
        let d = coproduct(&des, class(&des, "132")).unwrap();
        let e = ClassId::EMPTY;
        let mut want = Tensor::zero();
        want.add_term((e, class(&des, "132")), 1);
        want.add_term((class(&des, "1"), class(&des, "21")), 1);
        want.add_term((class(&des, "12"), class(&des, "1")), 1);
        want.add_term((class(&des, "132"), e), 1);
        assert_eq!(d, want);
        let d = coproduct(&des, e).unwrap();
        assert_eq!(d, Tensor::basis((e, e)));
    }

    #[test]
    fn triv_coproduct() {
        let triv = StatisticTable::trivial(5);
        let d = coproduct(&triv, ClassId::new(5, 0)).unwrap();
        assert_eq!(d.len(), 6);
        for i in 0..=5 {
            assert_eq!(d.coeff(&(ClassId::new(i, 0), ClassId::new(5 - i, 0))), 1);
        }
    }

    #[test]
    fn antipode_small_cases() {
        let des = StatisticTable::builtin(Builtin::Des, 4);
        let h = HopfAlgebra::new(&des).unwrap();
        let one = class(&des, "1");
        assert_eq!(h.antipode(one).unwrap(), GradedVector::basis(one).scaled(-1));
        assert_eq!(h.antipode(class(&des, "12")).unwrap(), GradedVector::basis(class(&des, "21")));
        assert_eq!(h.antipode(ClassId::EMPTY).unwrap(), h.unit());
        assert!(matches!(antipode(&StatisticTable::builtin(Builtin::Maj, 4), one), Err(Error::IncompatibleStatistic { .. })));
    }

    #[test]
    fn recursive_antipode_matches_takeuchi() {
        for b in [Builtin::Des, Builtin::Pk, Builtin::Dis, Builtin::Triv] {
            let t = StatisticTable::builtin(b, 4);
            let h = HopfAlgebra::new(&t).unwrap();
            for n in 0..=4 {
                for x in t.basis(n) {
                    assert_eq!(h.antipode(x).unwrap(), h.antipode_takeuchi(x).unwrap(), "{b} {x}");
                }
            }
        }
    }

    #[test]
    fn maj_bialgebra_rejected() {
        let maj = StatisticTable::builtin(Builtin::Maj, 4);
        assert!(matches!(check_bialgebra(&maj, 4), Err(Error::IncompatibleStatistic { .. })));
    }

    #[test]
    fn quotient_requires_refinement() {
        let pk = StatisticTable::builtin(Builtin::Pk, 4);
        let des = StatisticTable::builtin(Builtin::Des, 4);
        assert!(matches!(quotient_check(&pk, &des, 4), Err(Error::NotARefinement { .. })));
        assert!(quotient_check(&des, &des, 4).unwrap().holds);
    }
}

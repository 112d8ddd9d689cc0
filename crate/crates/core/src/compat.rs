//! Compatibility checks for statistic tables.
//!
//! Shuffle checks walk factor pairs in a fixed order (increasing total
//! length, longer left factor first, letter splits and factors in
//! lexicographic order) and report the first violation, so witnesses are
//! reproducible.

use std::collections::HashMap;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{combinations, interleave, lex_permutations, lex_rank, Permutation};
use crate::stat::{lift, Partition, StatisticTable};

mod rsk;

pub use rsk::{rsk_recording, StandardTableau};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShuffleMode {
    /// Factors with arbitrary disjoint letter sets.
    Strong,
    /// Every letter of the left factor below every letter of the right.
    Weak,
}

impl std::str::FromStr for ShuffleMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strong" => Ok(ShuffleMode::Strong),
            "weak" => Ok(ShuffleMode::Weak),
            _ => Err(Error::Parse(s.to_string())),
        }
    }
}

/// Two disjoint factors whose shuffle set is being compared.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FactorPair {
    pub left: Permutation,
    pub right: Permutation,
}

impl FactorPair {
    pub fn shuffle_set(&self) -> Vec<Permutation> {
        crate::perm::shuffles(&self.left, &self.right).expect("factor pairs are disjoint")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// Equivalent factor pairs whose shuffle sets have different class
    /// multisets (sorted class labels at the shuffle length, or lifted
    /// window-class tuples for viability checks).
    Shuffle {
        reference: FactorPair,
        violating: FactorPair,
        reference_classes: Vec<Vec<u32>>,
        violating_classes: Vec<Vec<u32>>,
    },
    /// Two equivalent permutations separated by some derived statistic.
    Pair { first: Permutation, second: Permutation, detail: String },
    /// A failed algebraic identity.
    Identity { identity: String, element: String },
}

fn short(p: &Permutation) -> String {
    p.compact().unwrap_or_else(|| p.to_string())
}

impl std::fmt::Display for Witness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Witness::Shuffle { reference, violating, .. } => write!(
                f,
                "{}\u{29e2}{} vs {}\u{29e2}{}",
                short(&reference.left),
                short(&reference.right),
                short(&violating.left),
                short(&violating.right)
            ),
            Witness::Pair { first, second, detail } => write!(f, "{} and {}: {detail}", short(first), short(second)),
            Witness::Identity { identity, element } => write!(f, "{identity} fails at {element}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompatVerdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl CompatVerdict {
    pub fn holds() -> Self {
        CompatVerdict { holds: true, witness: None }
    }

    pub fn fails(witness: Witness) -> Self {
        CompatVerdict { holds: false, witness: Some(witness) }
    }

    pub fn and_then(self, next: impl FnOnce() -> Result<CompatVerdict>) -> Result<CompatVerdict> {
        if self.holds {
            next()
        } else {
            Ok(self)
        }
    }
}

/// One realization of a factor pair on concrete letters `0..m`.
pub(crate) struct Realized {
    pub left: Vec<u8>,
    pub right: Vec<u8>,
    pub left_class: u32,
    pub right_class: u32,
}

impl Realized {
    pub(crate) fn factor_pair(&self) -> FactorPair {
        FactorPair { left: Permutation::from_zero_based(&self.left), right: Permutation::from_zero_based(&self.right) }
    }
}

/// Visits every realized factor pair with the given factor lengths: letter
/// splits in lexicographic order (just the prefix split in weak mode), then
/// left factors, then right factors, each in lexicographic order.
pub(crate) fn for_each_factor_pair(
    left_level: &Partition,
    right_level: &Partition,
    mode: ShuffleMode,
    mut visit: impl FnMut(&Realized) -> bool,
) -> bool {
    let (a, b) = (left_level.level(), right_level.level());
    let m = a + b;
    let splits = match mode {
        ShuffleMode::Strong => combinations(m, a),
        ShuffleMode::Weak => vec![(0..a as u8).collect()],
    };
    let left_perms = lex_permutations(a);
    let right_perms = lex_permutations(b);
    for split in splits {
        let rest: Vec<u8> = (0..m as u8).filter(|x| !split.contains(x)).collect();
        for (i, lp) in left_perms.iter().enumerate() {
            let left: Vec<u8> = lp.iter().map(|&x| split[x as usize]).collect();
            for (j, rp) in right_perms.iter().enumerate() {
                let right: Vec<u8> = rp.iter().map(|&x| rest[x as usize]).collect();
                let r = Realized {
                    left: left.clone(),
                    right,
                    left_class: left_level.class_of_rank(i),
                    right_class: right_level.class_of_rank(j),
                };
                if !visit(&r) {
                    return false;
                }
            }
        }
    }
    true
}

/// Sorted multiset of `classify` over the shuffle set of a realized pair.
pub(crate) fn shuffle_profile<K: Ord>(r: &Realized, mut classify: impl FnMut(&[u8]) -> K) -> Vec<K> {
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(r.left.len() + r.right.len());
    interleave(&r.left, &r.right, &mut buf, &mut |w| out.push(classify(w)));
    out.sort();
    out
}

/// Compares shuffle-set profiles of all equivalent factor pairs with
/// lengths `(a, b)` against the first pair seen for the same classes.
pub(crate) fn compare_shuffle_profiles<K: Ord + Clone>(
    left_level: &Partition,
    right_level: &Partition,
    mode: ShuffleMode,
    mut classify: impl FnMut(&[u8]) -> K,
    to_rows: impl Fn(&[K]) -> Vec<Vec<u32>>,
) -> Option<Witness> {
    let mut reference: HashMap<(u32, u32), (FactorPair, Vec<K>)> = HashMap::new();
    let mut witness = None;
    for_each_factor_pair(left_level, right_level, mode, |r| {
        let profile = shuffle_profile(r, &mut classify);
        match reference.get(&(r.left_class, r.right_class)) {
            None => {
                reference.insert((r.left_class, r.right_class), (r.factor_pair(), profile));
                true
            }
            Some((_, expected)) if *expected == profile => true,
            Some((pair, expected)) => {
                witness = Some(Witness::Shuffle {
                    reference: pair.clone(),
                    violating: r.factor_pair(),
                    reference_classes: to_rows(expected),
                    violating_classes: to_rows(&profile),
                });
                false
            }
        }
    });
    witness
}

fn single_rows(classes: &[u32]) -> Vec<Vec<u32>> {
    vec![classes.to_vec()]
}

/// Strong or weak shuffle compatibility on all total lengths up to `upto`.
pub fn check_shuffle_compatible(t: &StatisticTable, mode: ShuffleMode, upto: usize) -> Result<CompatVerdict> {
    t.check_length(upto)?;
    for m in 2..=upto {
        let target = t.level(m);
        for a in (1..m).rev() {
            let classify = |w: &[u8]| target.class_of_letters(w);
            if let Some(w) = compare_shuffle_profiles(t.level(a), t.level(m - a), mode, classify, single_rows) {
                return Ok(CompatVerdict::fails(w));
            }
        }
    }
    Ok(CompatVerdict::holds())
}

/// Whether each level refines the lift of the level below.
pub fn check_substring_compatible(t: &StatisticTable) -> CompatVerdict {
    for n in 0..t.max_length() {
        if let Some((p, q)) = t.level(n + 1).refinement_witness(&lift(t.level(n), 1)) {
            let perms = lex_permutations(n + 1);
            return CompatVerdict::fails(Witness::Pair {
                first: Permutation::from_zero_based(&perms[p]),
                second: Permutation::from_zero_based(&perms[q]),
                detail: format!("equivalent at length {} with inequivalent length-{n} windows", n + 1),
            });
        }
    }
    CompatVerdict::holds()
}

/// Whether `p` and `q` are equivalent under `t` but some pair of
/// corresponding substrings is not.
pub fn is_substring_violation(t: &StatisticTable, p: &Permutation, q: &Permutation) -> Result<bool> {
    if p.len() != q.len() || t.class_of(p)? != t.class_of(q)? {
        return Ok(false);
    }
    let n = p.len();
    for i in 1..=n {
        for j in i..=n {
            if t.class_of(&p.window(i, j)?)? != t.class_of(&q.window(i, j)?)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Weak shuffle compatibility up to `upto` together with substring compatibility.
pub fn check_weakly_bicompatible(t: &StatisticTable, upto: usize) -> Result<CompatVerdict> {
    check_shuffle_compatible(t, ShuffleMode::Weak, upto)?.and_then(|| Ok(check_substring_compatible(t)))
}

pub fn check_bicompatible(t: &StatisticTable, upto: usize) -> Result<CompatVerdict> {
    check_shuffle_compatible(t, ShuffleMode::Strong, upto)?.and_then(|| Ok(check_substring_compatible(t)))
}

/// Partition of `S_n` generated by `base`-valid `[a,b]`-moves.
///
/// A move rearranges the letters valued in `[a,b]` among their positions;
/// it is valid when the old and new subsequences are `base`-equivalent.
pub fn ab_move_closure(base: &StatisticTable, n: usize) -> Result<Partition> {
    base.check_length(n)?;
    if !check_substring_compatible(base).holds {
        return Err(Error::IncompatibleStatistic {
            name: base.name().to_string(),
            property: "substring-compatible".into(),
        });
    }
    let reps: Vec<Vec<Vec<u8>>> = (0..=n)
        .map(|len| {
            let perms = lex_permutations(len);
            let level = base.level(len);
            (0..level.num_classes() as u32).map(|c| perms[level.representative_rank(c)].clone()).collect()
        })
        .collect();
    let perms = lex_permutations(n);
    let mut uf = UnionFind::new(perms.len());
    let mut positions = Vec::with_capacity(n);
    let mut sub = Vec::with_capacity(n);
    for (rank, w) in perms.iter().enumerate() {
        for a in 0..n as u8 {
            for b in a + 1..n as u8 {
                positions.clear();
                sub.clear();
                for (i, &x) in w.iter().enumerate() {
                    if (a..=b).contains(&x) {
                        positions.push(i);
                        sub.push(x);
                    }
                }
                let len = sub.len();
                let class = base.level(len).class_of_letters(&sub);
                let rep = &reps[len][class as usize];
                let mut moved = w.clone();
                for (&pos, &r) in positions.iter().zip(rep) {
                    moved[pos] = a + r;
                }
                uf.union(rank, lex_rank(&moved));
            }
        }
    }
    Ok(Partition::from_keys(n, uf.into_labeling().into_iter()))
}

/// Table whose level `n` is [`ab_move_closure`] of `base` at `n`.
pub fn ab_move_table(base: &StatisticTable, max_length: usize) -> Result<StatisticTable> {
    let levels = (0..=max_length).map(|n| ab_move_closure(base, n)).collect::<Result<Vec<_>>>()?;
    StatisticTable::from_levels(format!("moves({})", base.name()), levels)
}

/// Swaps the k-th and (k+1)-th smallest letters (1-based `k`) if that is a
/// dual Knuth move.
pub fn dual_knuth_swap(p: &Permutation, k: usize) -> Option<Permutation> {
    let n = p.len();
    if k == 0 || k >= n {
        return None;
    }
    let ranks = p.ranks();
    let mut pos = vec![0; n];
    for (i, &r) in ranks.iter().enumerate() {
        pos[r as usize] = i;
    }
    let (x, y) = (k - 1, k);
    let (lo, hi) = (pos[x].min(pos[y]), pos[x].max(pos[y]));
    let between = |r: usize| lo < pos[r] && pos[r] < hi;
    if (x >= 1 && between(x - 1)) || (y + 1 < n && between(y + 1)) {
        let mut letters = p.letters().to_vec();
        letters.swap(pos[x], pos[y]);
        Some(Permutation::new(letters).expect("swap keeps letters distinct"))
    } else {
        None
    }
}

/// Components of the dual Knuth move graph on each `S_n`, `n <= max_length`.
pub fn dual_knuth_table(max_length: usize) -> StatisticTable {
    let levels = (0..=max_length)
        .map(|n| {
            let perms = lex_permutations(n);
            let mut uf = UnionFind::new(perms.len());
            let mut pos = vec![0usize; n];
            for (rank, w) in perms.iter().enumerate() {
                for (i, &x) in w.iter().enumerate() {
                    pos[x as usize] = i;
                }
                for x in 0..n.saturating_sub(1) {
                    let (lo, hi) = (pos[x].min(pos[x + 1]), pos[x].max(pos[x + 1]));
                    let between = |r: usize| lo < pos[r] && pos[r] < hi;
                    if (x >= 1 && between(x - 1)) || (x + 2 < n && between(x + 2)) {
                        let mut moved = w.clone();
                        moved.swap(pos[x], pos[x + 1]);
                        uf.union(rank, lex_rank(&moved));
                    }
                }
            }
            Partition::from_keys(n, uf.into_labeling().into_iter())
        })
        .collect();
    StatisticTable::from_levels("dK", levels).expect("levels are consecutive")
}

//! Statistics represented by the partitions they induce on each `S_n`.
//!
//! A [`StatisticTable`] stores, for every length `0..=N`, a [`Partition`] of
//! the standard permutations of that length. Class labels are canonical:
//! numbered by first occurrence while `S_n` is walked in lexicographic order.
//! Raw statistic values survive only in the evaluator functions.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::path::Path;
use std::str::FromStr;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{factorial, lex_permutations, lex_rank, Permutation};

pub const SCHEMA: &str = "permstat/1";

/// Canonical name of one equivalence class at one length.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassId {
    pub level: usize,
    pub index: u32,
}

impl ClassId {
    pub const EMPTY: ClassId = ClassId { level: 0, index: 0 };

    pub fn new(level: usize, index: u32) -> Self {
        ClassId { level, index }
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.level, self.index)
    }
}

/// A canonically labelled partition of `S_n`, indexed by lexicographic rank.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    labels: Vec<u32>,
    classes: u32,
}

impl Partition {
    /// Relabels arbitrary labels canonically.
    pub fn from_labels(n: usize, raw: &[u32]) -> Self {
        assert_eq!(raw.len(), factorial(n), "labels must cover S_{n}");
        Partition::from_keys(n, raw.iter())
    }

    pub(crate) fn from_keys<K: Eq + Hash>(n: usize, keys: impl Iterator<Item = K>) -> Self {
        let mut seen: HashMap<K, u32> = HashMap::new();
        let labels: Vec<u32> = keys
            .map(|k| {
                let next = seen.len() as u32;
                *seen.entry(k).or_insert(next)
            })
            .collect();
        Partition { n, classes: seen.len() as u32, labels }
    }

    /// Partition induced by a statistic evaluated on 0-based standard permutations.
    pub fn from_statistic<K: Eq + Hash>(n: usize, stat: impl Fn(&[u8]) -> K) -> Self {
        Partition::from_keys(n, lex_permutations(n).iter().map(|w| stat(w)))
    }

    pub fn discrete(n: usize) -> Self {
        let size = factorial(n);
        Partition { n, labels: (0..size as u32).collect(), classes: size as u32 }
    }

    pub fn trivial(n: usize) -> Self {
        Partition { n, labels: vec![0; factorial(n)], classes: 1 }
    }

    /// Checks that `raw` is already canonically labelled.
    pub fn is_canonical(raw: &[u32]) -> bool {
        let mut next = 0u32;
        for &l in raw {
            if l > next {
                return false;
            }
            if l == next {
                next += 1;
            }
        }
        true
    }

    pub fn level(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn num_classes(&self) -> usize {
        self.classes as usize
    }

    pub fn class_of_rank(&self, rank: usize) -> u32 {
        self.labels[rank]
    }

    /// Class of any sequence of distinct letters of length `n`.
    pub fn class_of_letters<T: Ord>(&self, letters: &[T]) -> u32 {
        debug_assert_eq!(letters.len(), self.n);
        self.labels[lex_rank(letters)]
    }

    pub fn is_trivial(&self) -> bool {
        self.classes <= 1
    }

    /// Ranks of the members of each class, classes in label order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.classes as usize];
        for (rank, &l) in self.labels.iter().enumerate() {
            out[l as usize].push(rank);
        }
        out
    }

    /// Lexicographically first member of a class.
    pub fn representative_rank(&self, class: u32) -> usize {
        self.labels.iter().position(|&l| l == class).expect("class exists")
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.classes as usize];
        for &l in &self.labels {
            sizes[l as usize] += 1;
        }
        sizes
    }

    /// First pair of ranks `(p, q)`, `p < q`, equivalent here but not in `coarse`.
    pub fn refinement_witness(&self, coarse: &Partition) -> Option<(usize, usize)> {
        assert_eq!(self.n, coarse.n);
        let mut image: Vec<Option<u32>> = vec![None; self.classes as usize];
        let mut first: Vec<usize> = vec![0; self.classes as usize];
        for (rank, (&fine, &c)) in self.labels.iter().zip(&coarse.labels).enumerate() {
            match image[fine as usize] {
                None => {
                    image[fine as usize] = Some(c);
                    first[fine as usize] = rank;
                }
                Some(expected) if expected != c => return Some((first[fine as usize], rank)),
                Some(_) => {}
            }
        }
        None
    }

    pub fn refines(&self, coarse: &Partition) -> bool {
        self.refinement_witness(coarse).is_none()
    }

    /// Common refinement.
    pub fn meet(&self, other: &Partition) -> Partition {
        assert_eq!(self.n, other.n);
        Partition::from_keys(self.n, self.labels.iter().zip(&other.labels))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Partition(n={}, {:?})", self.n, self.labels)
    }
}

/// `lift^k` of a level-`n` partition: permutations of length `n + k` are
/// equivalent iff all their length-`n` windows are pairwise equivalent.
pub fn lift(level: &Partition, k: usize) -> Partition {
    let n = level.level();
    Partition::from_statistic(n + k, |w| window_classes(level, w))
}

pub(crate) fn window_classes<T: Ord>(level: &Partition, w: &[T]) -> Vec<u32> {
    let n = level.level();
    if n == 0 {
        return Vec::new();
    }
    w.windows(n).map(|win| level.class_of_letters(win)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Builtin {
    Des,
    Maj,
    Pk,
    Val,
    Inv,
    Dis,
    Triv,
    SPk,
}

impl Builtin {
    pub const ALL: [Builtin; 8] = [
        Builtin::Des,
        Builtin::Maj,
        Builtin::Pk,
        Builtin::Val,
        Builtin::Inv,
        Builtin::Dis,
        Builtin::Triv,
        Builtin::SPk,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Des => "Des",
            Builtin::Maj => "maj",
            Builtin::Pk => "Pk",
            Builtin::Val => "Val",
            Builtin::Inv => "inv",
            Builtin::Dis => "dis",
            Builtin::Triv => "triv",
            Builtin::SPk => "sPk",
        }
    }

    pub fn level(self, n: usize) -> Partition {
        match self {
            Builtin::Des => Partition::from_statistic(n, descent_set),
            Builtin::Maj => Partition::from_statistic(n, major_index),
            Builtin::Pk => Partition::from_statistic(n, peak_set),
            Builtin::Val => Partition::from_statistic(n, valley_set),
            Builtin::Inv => Partition::from_statistic(n, inversions),
            Builtin::Dis => Partition::discrete(n),
            Builtin::Triv => Partition::trivial(n),
            Builtin::SPk if n < 4 => Partition::from_statistic(n, peak_set),
            Builtin::SPk => Partition::from_statistic(n, split_peak_set),
        }
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownStatistic(s.to_string()))
    }
}

/// 1-based descent positions.
pub fn descent_set<T: Ord>(w: &[T]) -> Vec<usize> {
    (1..w.len()).filter(|&i| w[i - 1] > w[i]).collect()
}

pub fn major_index<T: Ord>(w: &[T]) -> usize {
    descent_set(w).iter().sum()
}

pub fn peak_set<T: Ord>(w: &[T]) -> Vec<usize> {
    (2..w.len()).filter(|&i| w[i - 2] < w[i - 1] && w[i - 1] > w[i]).collect()
}

pub fn valley_set<T: Ord>(w: &[T]) -> Vec<usize> {
    (2..w.len()).filter(|&i| w[i - 2] > w[i - 1] && w[i - 1] < w[i]).collect()
}

pub fn inversions<T: Ord>(w: &[T]) -> usize {
    (0..w.len()).map(|i| w[i + 1..].iter().filter(|x| **x < w[i]).count()).sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SplitPeak {
    /// Empty peak set; parity of the position of the smallest letter.
    NoPeaks(usize),
    Peaks(Vec<usize>),
}

/// The peak set, with the empty-peak class split by the parity of the
/// position of the smallest letter.
pub fn split_peak_set<T: Ord>(w: &[T]) -> SplitPeak {
    let peaks = peak_set(w);
    if peaks.is_empty() {
        let pos = w.iter().enumerate().min_by(|a, b| a.1.cmp(b.1)).map_or(0, |(i, _)| i + 1);
        SplitPeak::NoPeaks(pos % 2)
    } else {
        SplitPeak::Peaks(peaks)
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct StatisticTable {
    name: String,
    levels: Vec<Partition>,
}

impl StatisticTable {
    pub fn builtin(stat: Builtin, max_length: usize) -> Self {
        StatisticTable {
            name: stat.name().to_string(),
            levels: (0..=max_length).map(|n| stat.level(n)).collect(),
        }
    }

    pub fn from_levels(name: impl Into<String>, levels: Vec<Partition>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Schema("a table needs at least level 0".into()));
        }
        for (n, level) in levels.iter().enumerate() {
            if level.level() != n {
                return Err(Error::Schema(format!("level {n} holds a partition of S_{}", level.level())));
            }
        }
        Ok(StatisticTable { name: name.into(), levels })
    }

    pub fn trivial(max_length: usize) -> Self {
        StatisticTable::builtin(Builtin::Triv, max_length)
    }

    /// The discrete statistic with the given pairs of equal-length standard
    /// permutations identified (transitively).
    pub fn with_identifications(
        name: impl Into<String>,
        max_length: usize,
        pairs: &[(Permutation, Permutation)],
    ) -> Result<Self> {
        let mut forests: Vec<UnionFind<usize>> =
            (0..=max_length).map(|n| UnionFind::new(factorial(n))).collect();
        for (a, b) in pairs {
            if a.len() != b.len() {
                return Err(Error::Schema(format!("cannot identify {a} and {b} of different lengths")));
            }
            if a.len() > max_length {
                return Err(Error::LengthOutOfRange { length: a.len(), max_length });
            }
            forests[a.len()].union(a.lex_rank(), b.lex_rank());
        }
        let levels = forests
            .into_iter()
            .enumerate()
            .map(|(n, uf)| Partition::from_keys(n, uf.into_labeling().into_iter()))
            .collect();
        StatisticTable::from_levels(name, levels)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn max_length(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> &Partition {
        &self.levels[n]
    }

    pub fn levels(&self) -> &[Partition] {
        &self.levels
    }

    pub fn num_classes(&self, n: usize) -> usize {
        self.levels[n].num_classes()
    }

    pub fn class_of(&self, p: &Permutation) -> Result<ClassId> {
        self.check_length(p.len())?;
        Ok(ClassId::new(p.len(), self.levels[p.len()].class_of_letters(p.letters())))
    }

    pub fn representative(&self, class: ClassId) -> Permutation {
        let rank = self.levels[class.level].representative_rank(class.index);
        Permutation::from_zero_based(&lex_permutations(class.level)[rank])
    }

    /// Every class at the given level.
    pub fn basis(&self, n: usize) -> impl Iterator<Item = ClassId> {
        (0..self.levels[n].num_classes() as u32).map(move |i| ClassId::new(n, i))
    }

    pub fn check_length(&self, length: usize) -> Result<()> {
        if length > self.max_length() {
            return Err(Error::LengthOutOfRange { length, max_length: self.max_length() });
        }
        Ok(())
    }

    pub fn truncate(&self, max_length: usize) -> StatisticTable {
        StatisticTable { name: self.name.clone(), levels: self.levels[..=max_length].to_vec() }
    }

    /// Appends the next level.
    pub fn extended(&self, name: impl Into<String>, next: Partition) -> Result<StatisticTable> {
        let mut levels = self.levels.clone();
        levels.push(next);
        StatisticTable::from_levels(name, levels)
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn is_trivial(&self) -> bool {
        self.levels.iter().all(Partition::is_trivial)
    }

    pub fn to_json(&self) -> String {
        let file = TableFile {
            schema: Some(SCHEMA.to_string()),
            name: self.name.clone(),
            max_length: self.max_length(),
            levels: self.levels.iter().map(|l| l.labels.clone()).collect(),
        };
        let mut s = serde_json::to_string(&file).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: TableFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
        if let Some(schema) = &file.schema {
            if schema != SCHEMA {
                return Err(Error::Schema(format!("unsupported schema {schema:?}")));
            }
        }
        if file.levels.len() != file.max_length + 1 {
            return Err(Error::Schema(format!(
                "max_length {} needs {} levels, found {}",
                file.max_length,
                file.max_length + 1,
                file.levels.len()
            )));
        }
        let mut levels = Vec::with_capacity(file.levels.len());
        for (n, labels) in file.levels.into_iter().enumerate() {
            if labels.len() != factorial(n) {
                return Err(Error::Schema(format!("level {n} has {} entries, expected {}", labels.len(), factorial(n))));
            }
            if !Partition::is_canonical(&labels) {
                return Err(Error::Schema(format!("level {n} is not canonically labelled")));
            }
            let classes = labels.iter().max().map_or(0, |m| m + 1);
            levels.push(Partition { n, labels, classes });
        }
        StatisticTable::from_levels(file.name, levels)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        StatisticTable::from_json(&std::fs::read_to_string(path)?)
    }
}

impl fmt::Debug for StatisticTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StatisticTable")
            .field("name", &self.name)
            .field("classes", &self.levels.iter().map(Partition::num_classes).collect::<Vec<_>>())
            .finish()
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema: Option<String>,
    name: String,
    max_length: usize,
    levels: Vec<Vec<u32>>,
}

/// Outcome of a levelwise refinement check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Refinement {
    pub holds: bool,
    /// Permutations equivalent under the finer table but not the coarser one.
    pub witness: Option<(Permutation, Permutation)>,
}

/// Whether `fine` refines `coarse` on every length up to `upto`.
pub fn refines(fine: &StatisticTable, coarse: &StatisticTable, upto: usize) -> Result<Refinement> {
    fine.check_length(upto)?;
    coarse.check_length(upto)?;
    for n in 0..=upto {
        if let Some((p, q)) = fine.level(n).refinement_witness(coarse.level(n)) {
            let perms = lex_permutations(n);
            return Ok(Refinement {
                holds: false,
                witness: Some((Permutation::from_zero_based(&perms[p]), Permutation::from_zero_based(&perms[q]))),
            });
        }
    }
    Ok(Refinement { holds: true, witness: None })
}

pub fn equivalent(s: &StatisticTable, t: &StatisticTable, upto: usize) -> Result<bool> {
    Ok(refines(s, t, upto)?.holds && refines(t, s, upto)?.holds)
}

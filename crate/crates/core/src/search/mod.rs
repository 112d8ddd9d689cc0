//! Exhaustive search for shuffle-compatible extensions of a statistic by
//! one level.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use num_integer::{binomial, Integer};
use rayon::prelude::*;
use serde::Serialize;

use crate::compat::{check_shuffle_compatible, check_substring_compatible, compare_shuffle_profiles, CompatVerdict, ShuffleMode};
use crate::error::{Error, Result};
use crate::perm::{combinations, factorial, interleave, lex_permutations, lex_rank};
use crate::stat::{lift, window_classes, Partition, StatisticTable};

mod dimacs;
mod engine;

pub use dimacs::{export_dimacs, write_dimacs, DimacsSummary};

use engine::{Engine, Visit};

/// `gcd(C(n,1), ..., C(n,n-1))`: `p` when `n` is a power of the prime `p`,
/// otherwise 1. Lengths below 2 give 1.
pub fn class_count_bound(n: usize) -> usize {
    (1..n).map(|k| binomial(n, k)).fold(0, |g, c| g.gcd(&c)).max(1)
}

/// `n! / class_count_bound(n)`.
pub fn class_size_divisor(n: usize) -> usize {
    factorial(n) / class_count_bound(n)
}

#[derive(Clone, Debug)]
pub struct SearchInstance {
    base: StatisticTable,
    level: usize,
    max_classes: usize,
    require_substring: bool,
    ceiling: Option<Partition>,
}

impl SearchInstance {
    /// Extensions of `base` (truncated to `n - 1`) to level `n`.
    pub fn new(base: &StatisticTable, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::LengthOutOfRange { length: 0, max_length: base.max_length() });
        }
        base.check_length(n - 1)?;
        let base = base.truncate(n - 1);
        if !check_shuffle_compatible(&base, ShuffleMode::Strong, n - 1)?.holds {
            return Err(Error::IncompatibleStatistic { name: base.name().to_string(), property: "shuffle-compatible".into() });
        }
        let max_classes = if base.is_trivial() { class_count_bound(n) } else { factorial(n) };
        Ok(SearchInstance { base, level: n, max_classes, require_substring: false, ceiling: None })
    }

    pub fn max_classes(mut self, k: usize) -> Result<Self> {
        if k < 1 {
            return Err(Error::InfeasibleBound("at least one class is required".into()));
        }
        self.max_classes = k;
        Ok(self)
    }

    /// Also require the new level to refine the lift of level `n - 1`.
    pub fn require_substring(mut self, on: bool) -> Result<Self> {
        if on && !check_substring_compatible(&self.base).holds {
            return Err(Error::IncompatibleStatistic { name: self.base.name().to_string(), property: "substring-compatible".into() });
        }
        self.require_substring = on;
        Ok(self)
    }

    /// Only partitions refining `ceiling`.
    pub fn within(mut self, ceiling: Partition) -> Result<Self> {
        if ceiling.level() != self.level {
            return Err(Error::Schema(format!("ceiling is a partition of S_{}, not S_{}", ceiling.level(), self.level)));
        }
        self.ceiling = Some(ceiling);
        Ok(self)
    }

    pub fn base(&self) -> &StatisticTable {
        &self.base
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn class_limit(&self) -> usize {
        self.max_classes
    }

    pub fn requires_substring(&self) -> bool {
        self.require_substring
    }

    pub fn trivial_base(&self) -> bool {
        self.base.is_trivial()
    }

    fn effective_ceiling(&self) -> Option<Partition> {
        let lifted = self.require_substring.then(|| lift(self.base.level(self.level - 1), 1));
        match (lifted, &self.ceiling) {
            (Some(a), Some(b)) => Some(a.meet(b)),
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b.clone()),
            (None, None) => None,
        }
    }

    fn fingerprint(&self) -> String {
        let base: Vec<String> = self.base.levels().iter().map(|p| format!("{:?}", p.labels())).collect();
        let ceiling = self.ceiling.as_ref().map(|c| format!("{:?}", c.labels())).unwrap_or_default();
        format!(
            "n={} k={} substring={} base={} ceiling={}",
            self.level,
            self.max_classes,
            self.require_substring,
            base.join("|"),
            ceiling
        )
    }
}

/// The equal-count constraint system of an instance: groups of shuffle sets
/// whose class multisets must agree.
pub(crate) struct Constraints {
    pub sets: Vec<Vec<u32>>,
    pub set_group: Vec<u32>,
    pub group_sets: Vec<Vec<u32>>,
    pub perm_sets: Vec<Vec<u32>>,
    pub ceiling: Option<Vec<u32>>,
}

impl Constraints {
    /// With `universe`, all of `S_n` is added as one more group.
    pub(crate) fn build(inst: &SearchInstance, universe: bool) -> Self {
        let n = inst.level;
        let size = factorial(n);
        let mut groups: BTreeMap<(usize, u32, u32), Vec<Vec<u32>>> = BTreeMap::new();
        let mut buf = Vec::with_capacity(n);
        for a in 1..=n / 2 {
            let b = n - a;
            let left_level = inst.base.level(a);
            let right_level = inst.base.level(b);
            let left_perms = lex_permutations(a);
            let right_perms = lex_permutations(b);
            for split in combinations(n, a) {
                if a == b && split[0] != 0 {
                    continue;
                }
                let rest: Vec<u8> = (0..n as u8).filter(|x| !split.contains(x)).collect();
                for (i, lp) in left_perms.iter().enumerate() {
                    let left: Vec<u8> = lp.iter().map(|&x| split[x as usize]).collect();
                    for (j, rp) in right_perms.iter().enumerate() {
                        let right: Vec<u8> = rp.iter().map(|&x| rest[x as usize]).collect();
                        let (mut ca, mut cb) = (left_level.class_of_rank(i), right_level.class_of_rank(j));
                        if a == b && ca > cb {
                            std::mem::swap(&mut ca, &mut cb);
                        }
                        let mut members = Vec::new();
                        interleave(&left, &right, &mut buf, &mut |w| members.push(lex_rank(w) as u32));
                        members.sort_unstable();
                        groups.entry((a, ca, cb)).or_default().push(members);
                    }
                }
            }
        }
        let mut sets = Vec::new();
        let mut set_group = Vec::new();
        let mut group_sets = Vec::new();
        let mut all: Vec<Vec<Vec<u32>>> = groups.into_values().collect();
        if universe {
            all.push(vec![(0..size as u32).collect()]);
        }
        for (g, members) in all.into_iter().enumerate() {
            let mut ids = Vec::new();
            for m in members {
                ids.push(sets.len() as u32);
                sets.push(m);
                set_group.push(g as u32);
            }
            group_sets.push(ids);
        }
        let mut perm_sets = vec![Vec::new(); size];
        for (s, members) in sets.iter().enumerate() {
            for &p in members {
                perm_sets[p as usize].push(s as u32);
            }
        }
        let ceiling = inst.effective_ceiling().map(|c| c.labels().to_vec());
        Constraints { sets, set_group, group_sets, perm_sets, ceiling }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct LevelSolution {
    pub partition: Vec<u32>,
    pub class_sizes: Vec<usize>,
}

impl LevelSolution {
    fn new(labels: Vec<u32>) -> Self {
        let classes = labels.iter().max().map_or(0, |&m| m as usize + 1);
        let mut class_sizes = vec![0; classes];
        for &l in &labels {
            class_sizes[l as usize] += 1;
        }
        class_sizes.sort_unstable();
        LevelSolution { partition: labels, class_sizes }
    }

    pub fn level_partition(&self, n: usize) -> Partition {
        Partition::from_labels(n, &self.partition)
    }

    pub fn num_classes(&self) -> usize {
        self.class_sizes.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.class_sizes.len() <= 1
    }

    /// One line of the solution log.
    pub fn log_line(&self) -> String {
        let parts: Vec<String> = self.partition.iter().map(|l| l.to_string()).collect();
        parts.join(",")
    }

    /// `base` extended by this solution.
    pub fn table(&self, base: &StatisticTable, name: &str) -> Result<StatisticTable> {
        base.extended(name, self.level_partition(base.max_length() + 1))
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Worker threads; 0 uses the rayon default.
    pub jobs: usize,
    /// Number of leading decisions that define independent subproblems.
    pub split_depth: usize,
    pub checkpoint: Option<PathBuf>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { jobs: 1, split_depth: 4, checkpoint: None }
    }
}

/// One engine configuration: a label count and fixed group targets.
struct Branch {
    k: usize,
    targets: Vec<Option<Vec<u16>>>,
}

fn branches(inst: &SearchInstance, c: &Constraints) -> Result<Vec<Branch>> {
    if inst.max_classes > 128 {
        return Err(Error::InfeasibleBound(format!("{} classes exceed the engine limit of 128", inst.max_classes)));
    }
    let groups = c.group_sets.len();
    if !inst.trivial_base() {
        return Ok(vec![Branch { k: inst.max_classes.min(factorial(inst.level)), targets: vec![None; groups] }]);
    }
    let n = inst.level;
    let total = factorial(n);
    let unit = class_size_divisor(n);
    let units = total / unit;
    let mut out = Vec::new();
    for k in 1..=inst.max_classes.min(units) {
        for parts in compositions_into(units, k) {
            let sizes: Vec<usize> = parts.iter().map(|p| p * unit).collect();
            let targets = c
                .group_sets
                .iter()
                .map(|ids| {
                    let len = c.sets[ids[0] as usize].len();
                    Some(sizes.iter().map(|s| (s * len / total) as u16).collect())
                })
                .collect();
            out.push(Branch { k, targets });
        }
    }
    Ok(out)
}

/// Ordered ways to write `total` as `k` positive parts, lexicographically.
fn compositions_into(total: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(k - 1) {
        for mut rest in compositions_into(total - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

pub fn enumerate_level(inst: &SearchInstance) -> Result<Vec<LevelSolution>> {
    enumerate_level_with(inst, &SearchOptions::default())
}

/// All canonical level-`n` partitions meeting the instance constraints,
/// sorted by label vector.
pub fn enumerate_level_with(inst: &SearchInstance, opts: &SearchOptions) -> Result<Vec<LevelSolution>> {
    let c = Constraints::build(inst, inst.trivial_base());
    let branches = branches(inst, &c)?;

    let mut found: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut tasks: Vec<(usize, Vec<u8>)> = Vec::new();
    for (i, br) in branches.iter().enumerate() {
        let mut engine = Engine::new(&c, br.k, br.targets.clone());
        if !engine.start() {
            continue;
        }
        engine.search(&[], Some(opts.split_depth), &mut |v| match v {
            Visit::Solution(labels) => {
                found.insert(labels);
            }
            Visit::Frontier(path) => tasks.push((i, path)),
        });
    }

    let mut log = match &opts.checkpoint {
        Some(path) => Some(Checkpoint::open(path, &inst.fingerprint())?),
        None => None,
    };
    if let Some(cp) = &mut log {
        if cp.fresh {
            for s in &found {
                writeln!(cp.file, "sol {}", join(s))?;
            }
            cp.file.flush()?;
        }
        found.extend(cp.solutions.iter().cloned());
        tasks.retain(|(i, path)| !cp.done.contains(&task_id(*i, path)));
    }
    log::info!("{} subproblems over {} branches", tasks.len(), branches.len());

    let writer = log.as_mut().map(|cp| Mutex::new(&mut cp.file));
    let run = |(i, path): &(usize, Vec<u8>)| -> Result<Vec<Vec<u32>>> {
        let br = &branches[*i];
        let mut engine = Engine::new(&c, br.k, br.targets.clone());
        let mut sols = Vec::new();
        if engine.start() {
            engine.search(path, None, &mut |v| {
                if let Visit::Solution(labels) = v {
                    sols.push(labels);
                }
            });
        }
        if let Some(w) = &writer {
            let mut f = w.lock().map_err(|_| Error::Checkpoint("log writer poisoned".into()))?;
            for s in &sols {
                writeln!(f, "sol {}", join(s))?;
            }
            writeln!(f, "done {}", task_id(*i, path))?;
            f.flush()?;
        }
        Ok(sols)
    };
    let results: Vec<Result<Vec<Vec<u32>>>> = if opts.jobs == 1 {
        tasks.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.jobs)
            .build()
            .map_err(|e| Error::Checkpoint(format!("cannot start worker pool: {e}")))?;
        pool.install(|| tasks.par_iter().map(run).collect())
    };
    for r in results {
        found.extend(r?);
    }
    Ok(found.into_iter().map(LevelSolution::new).collect())
}

fn join(labels: &[u32]) -> String {
    labels.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")
}

fn task_id(branch: usize, path: &[u8]) -> String {
    let p: Vec<String> = path.iter().map(|l| l.to_string()).collect();
    format!("{branch}/{}", p.join("."))
}

/// Append-only log of finished subproblems and their solutions.
struct Checkpoint {
    file: File,
    fresh: bool,
    done: HashSet<String>,
    solutions: Vec<Vec<u32>>,
}

impl Checkpoint {
    fn open(path: &Path, fingerprint: &str) -> Result<Self> {
        let mut done = HashSet::new();
        let mut solutions = Vec::new();
        let mut fresh = true;
        if path.exists() {
            for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
                let line = line?;
                fresh = false;
                if i == 0 {
                    if line.strip_prefix("instance ") != Some(fingerprint) {
                        return Err(Error::Checkpoint(format!("{} belongs to a different instance", path.display())));
                    }
                } else if let Some(id) = line.strip_prefix("done ") {
                    done.insert(id.to_string());
                } else if let Some(csv) = line.strip_prefix("sol ") {
                    let labels = csv
                        .split(',')
                        .map(|x| x.parse::<u32>().map_err(|_| Error::Checkpoint(format!("bad solution line {line:?}"))))
                        .collect::<Result<Vec<_>>>()?;
                    if !Partition::is_canonical(&labels) {
                        return Err(Error::Checkpoint(format!("non-canonical solution line {line:?}")));
                    }
                    solutions.push(labels);
                } else if !line.is_empty() {
                    return Err(Error::Checkpoint(format!("unrecognized line {line:?}")));
                }
            }
        }
        let mut file = OpenOptions::new().create(true).append(true).open(path)?;
        if fresh {
            writeln!(file, "instance {fingerprint}")?;
        }
        Ok(Checkpoint { file, fresh, done, solutions })
    }
}

/// Checks, for every requested factor length pair `(a, b)` with `a + b > n`,
/// that equivalent factor pairs have shuffle sets equivalent under
/// `lift^(a+b-n)` of the top level `n` of `table`.
pub fn viability_filter(table: &StatisticTable, factor_lengths: &[(usize, usize)]) -> Result<CompatVerdict> {
    let n = table.max_length();
    for &(a, b) in factor_lengths {
        if a > n || b > n || a + b <= n {
            return Err(Error::LengthOutOfRange { length: a + b, max_length: n });
        }
        let top = table.level(n);
        let classify = |w: &[u8]| window_classes(top, w);
        let rows = |p: &[Vec<u32>]| p.to_vec();
        if let Some(w) = compare_shuffle_profiles(table.level(a), table.level(b), ShuffleMode::Strong, classify, rows) {
            return Ok(CompatVerdict::fails(w));
        }
    }
    Ok(CompatVerdict::holds())
}

/// Default viability factor lengths `{(2, n)}`.
pub fn default_factor_lengths(n: usize) -> Vec<(usize, usize)> {
    vec![(2, n)]
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchSummary {
    pub n: usize,
    pub solutions: usize,
    pub nontrivial: usize,
    pub viable: usize,
    pub elapsed_ms: u128,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stat::Builtin;

    #[test]
    fn bounds() {
        let want = [(2, 2), (3, 3), (4, 2), (5, 5), (6, 1), (8, 2), (9, 3), (12, 1)];
        for (n, b) in want {
            assert_eq!(class_count_bound(n), b, "n={n}");
        }
        assert_eq!(class_size_divisor(4), 12);
        assert_eq!(class_size_divisor(5), 24);
    }

    #[test]
    fn compositions() {
        assert_eq!(compositions_into(3, 2), vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(compositions_into(2, 3), Vec::<Vec<usize>>::new());
    }

    #[test]
    fn n2_has_two() {
        let inst = SearchInstance::new(&StatisticTable::trivial(1), 2).unwrap();
        assert_eq!(enumerate_level(&inst).unwrap().len(), 2);
    }

    #[test]
    fn n3_trivial_base() {
        let inst = SearchInstance::new(&StatisticTable::trivial(2), 3).unwrap();
        let sols = enumerate_level(&inst).unwrap();
        assert_eq!(sols.len(), 5);
        let pk = Builtin::Pk.level(3);
        assert!(sols.iter().any(|s| s.partition == pk.labels()));
    }

    #[test]
    fn n1_is_trivial() {
        let inst = SearchInstance::new(&StatisticTable::trivial(0), 1).unwrap();
        let sols = enumerate_level(&inst).unwrap();
        assert_eq!(sols.len(), 1);
        assert!(sols[0].is_trivial());
    }

    #[test]
    fn rejects_incompatible_base() {
        let maj = StatisticTable::builtin(Builtin::Inv, 3);
        assert!(matches!(SearchInstance::new(&maj, 4), Err(Error::IncompatibleStatistic { .. })));
        let inst = SearchInstance::new(&StatisticTable::trivial(2), 3).unwrap();
        assert!(matches!(inst.max_classes(0), Err(Error::InfeasibleBound(_))));
    }

    #[test]
    fn viability_rejects_bad_lengths() {
        let t = StatisticTable::trivial(3);
        assert!(viability_filter(&t, &[(1, 2)]).is_err());
        assert!(viability_filter(&t, &[(2, 2)]).unwrap().holds);
    }
}

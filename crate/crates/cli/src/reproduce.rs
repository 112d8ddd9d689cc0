//! Fixed recipes. Output carries no timings so reruns are byte-identical.

use permstat_core::search::{class_count_bound, default_factor_lengths, enumerate_level_with, SearchOptions};
use permstat_core::stat::SCHEMA;
use permstat_core::*;
use serde_json::{json, Map, Value};

use crate::args::ReproduceCmd;
use crate::commands::{classes_json, emit, name_of, options, verdict_json, CmdResult};
use crate::{Failure, Outcome};

pub fn run(cmd: ReproduceCmd) -> CmdResult {
    match cmd {
        ReproduceCmd::TheoremProgress { upto, run } => theorem_progress(upto, &options(&run)),
        ReproduceCmd::LemmaN3 => lemma_n3(),
        ReproduceCmd::PkCase => pk_case(),
    }
}

fn trivial_level(n: usize, opts: &SearchOptions) -> Result<(StatisticTable, Vec<LevelSolution>)> {
    let base = StatisticTable::trivial(n - 1);
    let sols = enumerate_level_with(&SearchInstance::new(&base, n)?, opts)?;
    Ok((base, sols))
}

fn solution_json(base: &StatisticTable, s: &LevelSolution, lengths: &[(usize, usize)]) -> Result<Value> {
    let n = base.max_length() + 1;
    let p = s.level_partition(n);
    let table = s.table(base, "ext")?;
    let mut viability = Vec::new();
    for &(a, b) in lengths {
        let v = viability_filter(&table, &[(a, b)])?;
        let (witness, text) = verdict_json(&v);
        viability.push(json!({ "lengths": [a, b], "holds": v.holds, "witness": witness, "witness_text": text }));
    }
    Ok(json!({
        "name": name_of(&p),
        "num_classes": s.num_classes(),
        "class_sizes": s.class_sizes,
        "classes": classes_json(&p),
        "viability": viability,
    }))
}

fn theorem_progress(upto: usize, opts: &SearchOptions) -> CmdResult {
    if !(3..=5).contains(&upto) {
        return Err(Failure::Usage(format!("upto must be 3, 4 or 5, got {upto}")));
    }
    let mut counts = Map::new();
    let mut levels = Vec::new();
    for n in 3..=upto {
        let (base, sols) = trivial_level(n, opts)?;
        let lengths = default_factor_lengths(n);
        let mut viable = Vec::new();
        for s in &sols {
            if viability_filter(&s.table(&base, "ext")?, &lengths)?.holds {
                viable.push(name_of(&s.level_partition(n)).map_or_else(|| s.log_line(), str::to_string));
            }
        }
        counts.insert(format!("n{n}"), json!(sols.len()));
        levels.push(json!({
            "n": n,
            "class_count_bound": class_count_bound(n),
            "solutions": sols.len(),
            "nontrivial": sols.iter().filter(|s| !s.is_trivial()).count(),
            "factor_lengths": lengths,
            "viable": viable,
        }));
    }
    let (_, at6) = trivial_level(6, opts)?;
    emit(&json!({
        "schema": SCHEMA,
        "recipe": "theorem-progress",
        "upto": upto,
        "counts": counts,
        "levels": levels,
        "bound": {
            "n": 6,
            "class_count_bound": class_count_bound(6),
            "solutions": at6.len(),
            "only_trivial": at6.iter().all(LevelSolution::is_trivial),
        },
    }));
    Ok(Outcome::Holds)
}

fn lemma_n3() -> CmdResult {
    let (base, sols) = trivial_level(3, &SearchOptions::default())?;
    let lengths = [(2, 2), (2, 3)];
    let rows: Vec<Value> = sols.iter().map(|s| solution_json(&base, s, &lengths)).collect::<Result<_>>()?;
    let common = sols.iter().map(|s| s.level_partition(3)).reduce(|a, b| a.meet(&b)).expect("at least one solution");
    let forced: Vec<Value> = match classes_json(&common) {
        Value::Array(cs) => cs.into_iter().filter(|c| c.as_array().is_some_and(|c| c.len() > 1)).collect(),
        _ => unreachable!(),
    };
    emit(&json!({
        "schema": SCHEMA,
        "recipe": "lemma-n3",
        "solutions": rows.len(),
        "forced_classes": forced,
        "extensions": rows,
    }));
    Ok(Outcome::Holds)
}

fn pk_case() -> CmdResult {
    let base = StatisticTable::builtin(Builtin::Pk, 3);
    let inst = SearchInstance::new(&base, 4)?.require_substring(true)?;
    let sols = enumerate_level_with(&inst, &SearchOptions::default())?;
    let rows: Vec<Value> = sols.iter().map(|s| solution_json(&base, s, &[(1, 4), (2, 4)])).collect::<Result<_>>()?;
    emit(&json!({
        "schema": SCHEMA,
        "recipe": "pk-case",
        "base": "Pk",
        "n": 4,
        "solutions": rows.len(),
        "extensions": rows,
    }));
    Ok(Outcome::Holds)
}

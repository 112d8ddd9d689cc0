use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use permstat_core::algebra::{check_bialgebra, quotient_check, Combination, HopfAlgebra};
use permstat_core::compat::{check_bicompatible, check_weakly_bicompatible, dual_knuth_table};
use permstat_core::perm::{factorial, lex_permutations};
use permstat_core::qsym::{fundamental_poly, verify_des_isomorphism, Composition};
use permstat_core::search::{
    class_count_bound, class_size_divisor, default_factor_lengths, enumerate_level_with, export_dimacs, SearchOptions,
    SearchSummary,
};
use permstat_core::stat::{descent_set, inversions, major_index, peak_set, valley_set, SCHEMA};
use permstat_core::*;
use serde_json::{json, Map, Value};

use crate::args::{AlgebraCmd, CheckCmd, InstanceArgs, QsymCmd, RunArgs, SearchCmd, StatCmd};
use crate::{Failure, Outcome};

pub type CmdResult = std::result::Result<Outcome, Failure>;

pub fn emit(v: &Value) {
    let text = serde_json::to_string_pretty(v).expect("json output");
    // a closed pipe downstream is not an error of ours
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

/// A built-in name, `dK`, or a table file.
pub fn resolve_table(arg: &str, max_length: usize) -> Result<StatisticTable> {
    let path = Path::new(arg);
    if path.is_file() {
        let t = StatisticTable::load(path)?;
        t.check_length(max_length)?;
        return Ok(t.truncate(max_length));
    }
    if arg.eq_ignore_ascii_case("dk") {
        return Ok(dual_knuth_table(max_length));
    }
    Ok(StatisticTable::builtin(arg.parse()?, max_length))
}

/// Name of the built-in statistic whose level `n` equals `p`, if any.
pub fn name_of(p: &Partition) -> Option<&'static str> {
    let n = p.level();
    Builtin::ALL.into_iter().find(|b| &b.level(n) == p).map(Builtin::name).or_else(|| {
        (n <= 7 && dual_knuth_table(n).level(n) == p).then_some("dK")
    })
}

pub fn short(p: &Permutation) -> String {
    p.compact().unwrap_or_else(|| p.to_string())
}

/// Members of each class as compact permutations.
pub fn classes_json(p: &Partition) -> Value {
    let perms = lex_permutations(p.level());
    let classes: Vec<Vec<String>> = p
        .members()
        .iter()
        .map(|m| m.iter().map(|&r| short(&Permutation::from_zero_based(&perms[r]))).collect())
        .collect();
    json!(classes)
}

pub fn verdict_json(v: &CompatVerdict) -> (Value, Value) {
    let witness = serde_json::to_value(&v.witness).expect("witness serializes");
    let text = v.witness.as_ref().map_or(Value::Null, |w| json!(w.to_string()));
    (witness, text)
}

fn report(mut head: Map<String, Value>, v: &CompatVerdict) -> CmdResult {
    let (witness, text) = verdict_json(v);
    head.insert("holds".into(), json!(v.holds));
    head.insert("witness".into(), witness);
    head.insert("witness_text".into(), text);
    emit(&Value::Object(head));
    Ok(if v.holds { Outcome::Holds } else { Outcome::Fails })
}

fn header(fields: Value) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("schema".into(), json!(SCHEMA));
    if let Value::Object(f) = fields {
        m.extend(f);
    }
    m
}

fn parse_mode(s: &str) -> std::result::Result<ShuffleMode, Failure> {
    s.parse().map_err(|_| Failure::Usage(format!("mode must be strong or weak, got {s:?}")))
}

pub fn parse_lengths(raw: &[String], n: usize) -> std::result::Result<Vec<(usize, usize)>, Failure> {
    if raw.is_empty() {
        return Ok(default_factor_lengths(n));
    }
    raw.iter()
        .map(|s| {
            let (a, b) = s.split_once(',').ok_or_else(|| Failure::Usage(format!("lengths must look like a,b, got {s:?}")))?;
            let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| Failure::Usage(format!("bad length {t:?}")));
            Ok((parse(a)?, parse(b)?))
        })
        .collect()
}

fn perm_arg(s: &str) -> Result<Permutation> {
    Ok(s.parse::<Permutation>()?.standardize())
}

fn raw_value(b: Builtin, p: &Permutation) -> Value {
    let w = p.letters();
    match b {
        Builtin::Des => json!(descent_set(w)),
        Builtin::Maj => json!(major_index(w)),
        Builtin::Pk | Builtin::SPk => json!(peak_set(w)),
        Builtin::Val => json!(valley_set(w)),
        Builtin::Inv => json!(inversions(w)),
        Builtin::Dis | Builtin::Triv => Value::Null,
    }
}

pub fn stat(cmd: StatCmd) -> CmdResult {
    match cmd {
        StatCmd::Build { stat, max, out } => {
            let t = resolve_table(&stat, max)?;
            t.save(&out)?;
            let classes: Vec<usize> = (0..=max).map(|n| t.num_classes(n)).collect();
            emit(&json!({
                "schema": SCHEMA,
                "name": t.name(),
                "max_length": max,
                "classes": classes,
                "path": out.display().to_string(),
            }));
        }
        StatCmd::Eval { stat, perms } => {
            let parsed: Vec<Permutation> = perms.iter().map(|s| s.parse()).collect::<Result<_>>()?;
            let max = parsed.iter().map(Permutation::len).max().unwrap_or(0);
            let t = resolve_table(&stat, max)?;
            let builtin = stat.parse::<Builtin>().ok();
            let rows: Vec<Value> = parsed
                .iter()
                .map(|p| {
                    let class = t.class_of(p)?;
                    Ok(json!({
                        "perm": short(p),
                        "class": class.to_string(),
                        "value": builtin.map_or(Value::Null, |b| raw_value(b, p)),
                    }))
                })
                .collect::<Result<_>>()?;
            emit(&json!({ "schema": SCHEMA, "stat": t.name(), "values": rows }));
        }
    }
    Ok(Outcome::Holds)
}

pub fn check(cmd: CheckCmd) -> CmdResult {
    match cmd {
        CheckCmd::Shuffle { stat, mode, upto } => {
            let m = parse_mode(&mode)?;
            let t = resolve_table(&stat, upto)?;
            let v = check_shuffle_compatible(&t, m, upto)?;
            report(header(json!({ "check": "shuffle", "stat": t.name(), "mode": m, "upto": upto })), &v)
        }
        CheckCmd::Substring { stat, upto } => {
            let t = resolve_table(&stat, upto)?;
            let v = check_substring_compatible(&t);
            report(header(json!({ "check": "substring", "stat": t.name(), "upto": upto })), &v)
        }
        CheckCmd::Bicompat { stat, mode, upto } => {
            let m = parse_mode(&mode)?;
            let t = resolve_table(&stat, upto)?;
            let v = match m {
                ShuffleMode::Strong => check_bicompatible(&t, upto)?,
                ShuffleMode::Weak => check_weakly_bicompatible(&t, upto)?,
            };
            report(header(json!({ "check": "bicompat", "stat": t.name(), "mode": m, "upto": upto })), &v)
        }
    }
}

fn terms_json<K: Ord + Clone>(c: &Combination<K>, key: impl Fn(&K) -> String) -> Value {
    let m: Map<String, Value> = c.iter().map(|(k, v)| (key(k), json!(v))).collect();
    Value::Object(m)
}

fn structure(op: &str, t: &StatisticTable, basis: &[ClassId], terms: Value, reps: Value) -> CmdResult {
    let basis: Vec<String> = basis.iter().map(ClassId::to_string).collect();
    emit(&json!({
        "schema": SCHEMA,
        "op": op,
        "stat": t.name(),
        "basis": basis,
        "terms": terms,
        "representatives": reps,
    }));
    Ok(Outcome::Holds)
}

fn reps_json(t: &StatisticTable, classes: impl IntoIterator<Item = ClassId>) -> Value {
    let m: Map<String, Value> = classes.into_iter().map(|c| (c.to_string(), json!(short(&t.representative(c))))).collect();
    Value::Object(m)
}

pub fn algebra(cmd: AlgebraCmd) -> CmdResult {
    match cmd {
        AlgebraCmd::Product { stat, a, b } => {
            let (a, b) = (perm_arg(&a)?, perm_arg(&b)?);
            let t = resolve_table(&stat, a.len() + b.len())?;
            let h = HopfAlgebra::shuffle_algebra(&t, ShuffleMode::Weak)?;
            let (ca, cb) = (t.class_of(&a)?, t.class_of(&b)?);
            let v = h.product(ca, cb)?;
            let reps = reps_json(&t, [ca, cb].into_iter().chain(v.iter().map(|(k, _)| *k)));
            structure("product", &t, &[ca, cb], terms_json(&v, ClassId::to_string), reps)
        }
        AlgebraCmd::Coproduct { stat, a } => {
            let a = perm_arg(&a)?;
            let t = resolve_table(&stat, a.len())?;
            let h = HopfAlgebra::substring_coalgebra(&t)?;
            let ca = t.class_of(&a)?;
            let d = h.coproduct(ca)?;
            let classes: Vec<ClassId> = d.iter().flat_map(|((x, y), _)| [*x, *y]).collect();
            let reps = reps_json(&t, std::iter::once(ca).chain(classes));
            structure("coproduct", &t, &[ca], terms_json(&d, |(x, y)| format!("{x}\u{2297}{y}")), reps)
        }
        AlgebraCmd::Antipode { stat, a } => {
            let a = perm_arg(&a)?;
            let t = resolve_table(&stat, a.len())?;
            let h = HopfAlgebra::new(&t)?;
            let ca = t.class_of(&a)?;
            let s = h.antipode(ca)?;
            let reps = reps_json(&t, std::iter::once(ca).chain(s.iter().map(|(k, _)| *k)));
            structure("antipode", &t, &[ca], terms_json(&s, ClassId::to_string), reps)
        }
        AlgebraCmd::Bialgebra { stat, upto } => {
            let t = resolve_table(&stat, upto)?;
            let v = check_bialgebra(&t, upto)?;
            report(header(json!({ "check": "bialgebra", "stat": t.name(), "upto": upto })), &v)
        }
        AlgebraCmd::Quotient { fine, coarse, upto } => {
            let f = resolve_table(&fine, upto)?;
            let c = resolve_table(&coarse, upto)?;
            let v = quotient_check(&f, &c, upto)?;
            report(header(json!({ "check": "quotient", "fine": f.name(), "coarse": c.name(), "upto": upto })), &v)
        }
    }
}

pub fn qsym(cmd: QsymCmd) -> CmdResult {
    match cmd {
        QsymCmd::Verify { upto } => {
            let v = verify_des_isomorphism(upto)?;
            report(
                header(json!({
                    "check": "qsym",
                    "upto": upto,
                    "scope": "Des products and coproducts against fundamental quasisymmetric polynomials; \
                              the peak algebra is checked only as a quotient (algebra quotient --fine Des --coarse Pk)",
                })),
                &v,
            )
        }
        QsymCmd::Expand { comp, vars, text } => {
            let alpha: Composition = comp.parse()?;
            let m = vars.unwrap_or(alpha.weight());
            let f = fundamental_poly(&alpha, m)?;
            if text {
                let _ = write!(std::io::stdout().lock(), "{f}");
            } else {
                let terms: Vec<Value> = f.terms().map(|(e, c)| json!({ "exponents": e, "coeff": c })).collect();
                emit(&json!({
                    "schema": SCHEMA,
                    "composition": alpha.to_string(),
                    "variables": m,
                    "terms": terms,
                }));
            }
            Ok(Outcome::Holds)
        }
    }
}

pub fn instance(args: &InstanceArgs) -> Result<SearchInstance> {
    if args.n == 0 {
        return Err(Error::LengthOutOfRange { length: 0, max_length: 0 });
    }
    let base = resolve_table(&args.base, args.n - 1)?;
    let mut inst = SearchInstance::new(&base, args.n)?;
    if let Some(k) = args.max_classes {
        inst = inst.max_classes(k)?;
    }
    inst = inst.require_substring(args.substring)?;
    if let Some(w) = &args.within {
        inst = inst.within(resolve_table(w, args.n)?.level(args.n).clone())?;
    }
    Ok(inst)
}

pub fn options(run: &RunArgs) -> SearchOptions {
    SearchOptions { jobs: run.jobs, split_depth: run.split_depth, checkpoint: run.checkpoint.clone() }
}

fn write_log(path: &Path, sols: &[LevelSolution]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for s in sols {
        writeln!(w, "{}", s.log_line())?;
    }
    w.flush()?;
    Ok(())
}

fn read_log(path: &Path, n: usize) -> Result<Vec<Partition>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(File::open(path)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let labels: Vec<u32> = line
            .split(',')
            .map(|t| t.trim().parse().map_err(|_| Error::Parse(format!("line {}: {t:?}", i + 1))))
            .collect::<Result<_>>()?;
        if labels.len() != factorial(n) {
            return Err(Error::Schema(format!("line {} has {} labels, expected {}", i + 1, labels.len(), factorial(n))));
        }
        out.push(Partition::from_labels(n, &labels));
    }
    Ok(out)
}

pub fn search(cmd: SearchCmd) -> CmdResult {
    match cmd {
        SearchCmd::Enumerate { instance: args, run, log, lengths, heavy } => {
            if args.n >= 5 && !heavy {
                return Err(Failure::Usage(format!("n={} is a long run; pass --heavy to proceed", args.n)));
            }
            let lengths = parse_lengths(&lengths, args.n)?;
            let inst = instance(&args)?;
            let start = Instant::now();
            let sols = enumerate_level_with(&inst, &options(&run))?;
            let elapsed_ms = start.elapsed().as_millis();
            if let Some(path) = &log {
                write_log(path, &sols)?;
            }
            let mut viable = 0;
            for s in &sols {
                if viability_filter(&s.table(inst.base(), "ext")?, &lengths)?.holds {
                    viable += 1;
                }
            }
            let summary = SearchSummary {
                n: args.n,
                solutions: sols.len(),
                nontrivial: sols.iter().filter(|s| !s.is_trivial()).count(),
                viable,
                elapsed_ms,
            };
            let mut out = header(serde_json::to_value(&summary).expect("summary serializes"));
            out.insert("base".into(), json!(inst.base().name()));
            out.insert("class_limit".into(), json!(inst.class_limit()));
            out.insert("factor_lengths".into(), json!(lengths));
            emit(&Value::Object(out));
            Ok(Outcome::Holds)
        }
        SearchCmd::Filter { base, n, solutions, lengths } => {
            if n == 0 {
                return Err(Failure::Usage("n must be positive".into()));
            }
            let lengths = parse_lengths(&lengths, n)?;
            let base = resolve_table(&base, n - 1)?;
            let mut rows = Vec::new();
            for (i, p) in read_log(&solutions, n)?.into_iter().enumerate() {
                let v = viability_filter(&base.extended("ext", p.clone())?, &lengths)?;
                let (witness, text) = verdict_json(&v);
                rows.push(json!({
                    "index": i,
                    "classes": p.num_classes(),
                    "name": name_of(&p),
                    "viable": v.holds,
                    "witness": witness,
                    "witness_text": text,
                }));
            }
            let viable = rows.iter().filter(|r| r["viable"] == json!(true)).count();
            emit(&json!({
                "schema": SCHEMA,
                "n": n,
                "base": base.name(),
                "factor_lengths": lengths,
                "solutions": rows.len(),
                "viable": viable,
                "results": rows,
            }));
            Ok(Outcome::Holds)
        }
        SearchCmd::Dimacs { instance: args, out } => {
            let inst = instance(&args)?;
            let summary = export_dimacs(&inst, &out)?;
            let mut m = header(serde_json::to_value(&summary).expect("summary serializes"));
            m.insert("n".into(), json!(args.n));
            m.insert("path".into(), json!(out.display().to_string()));
            emit(&Value::Object(m));
            Ok(Outcome::Holds)
        }
        SearchCmd::Bound { n } => {
            emit(&json!({
                "schema": SCHEMA,
                "n": n,
                "class_count_bound": class_count_bound(n),
                "class_size_divisor": class_size_divisor(n),
            }));
            Ok(Outcome::Holds)
        }
    }
}

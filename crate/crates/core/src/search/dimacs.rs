//! CNF encoding of an extension search.
//!
//! Variable `p*k + j + 1` says permutation rank `p` gets label `j`.
//! Equal counts use sequential counters whose registers are defined by
//! equivalences, so every model is determined by its label variables.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use super::{Constraints, SearchInstance};
use crate::error::Result;
use crate::perm::factorial;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimacsSummary {
    pub variables: usize,
    pub clauses: usize,
    pub label_variables: usize,
    pub classes: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Lit {
    True,
    False,
    Var(i64),
}

impl Lit {
    fn not(self) -> Lit {
        match self {
            Lit::True => Lit::False,
            Lit::False => Lit::True,
            Lit::Var(v) => Lit::Var(-v),
        }
    }
}

struct Cnf {
    next: i64,
    clauses: Vec<Vec<i64>>,
}

impl Cnf {
    fn fresh(&mut self) -> Lit {
        self.next += 1;
        Lit::Var(self.next)
    }

    /// Adds a clause after dropping false literals; true literals satisfy it.
    fn clause(&mut self, lits: &[Lit]) {
        let mut out = Vec::with_capacity(lits.len());
        for &l in lits {
            match l {
                Lit::True => return,
                Lit::False => {}
                Lit::Var(v) => out.push(v),
            }
        }
        self.clauses.push(out);
    }

    fn and(&mut self, a: Lit, b: Lit) -> Lit {
        match (a, b) {
            (Lit::False, _) | (_, Lit::False) => Lit::False,
            (Lit::True, x) | (x, Lit::True) => x,
            _ => {
                let t = self.fresh();
                self.clause(&[t.not(), a]);
                self.clause(&[t.not(), b]);
                self.clause(&[t, a.not(), b.not()]);
                t
            }
        }
    }

    fn or(&mut self, a: Lit, b: Lit) -> Lit {
        match (a, b) {
            (Lit::True, _) | (_, Lit::True) => Lit::True,
            (Lit::False, x) | (x, Lit::False) => x,
            _ => {
                let r = self.fresh();
                self.clause(&[r.not(), a, b]);
                self.clause(&[r, a.not()]);
                self.clause(&[r, b.not()]);
                r
            }
        }
    }

    fn equal(&mut self, a: Lit, b: Lit) {
        self.clause(&[a.not(), b]);
        self.clause(&[a, b.not()]);
    }

    /// Outputs `out[c-1]` true iff at least `c` inputs are true.
    fn counter(&mut self, inputs: &[Lit]) -> Vec<Lit> {
        let len = inputs.len();
        let mut regs = vec![Lit::False; len + 1];
        regs[0] = Lit::True;
        for &x in inputs {
            let prev = regs.clone();
            for c in 1..=len {
                let carry = self.and(x, prev[c - 1]);
                regs[c] = self.or(prev[c], carry);
            }
        }
        regs[1..].to_vec()
    }
}

fn encode(inst: &SearchInstance) -> (Cnf, DimacsSummary) {
    let n = inst.level();
    let size = factorial(n);
    let k = inst.class_limit().min(size);
    let c = Constraints::build(inst, false);
    let x = |p: usize, j: usize| Lit::Var((p * k + j + 1) as i64);
    let mut cnf = Cnf { next: (size * k) as i64, clauses: Vec::new() };

    for p in 0..size {
        cnf.clause(&(0..k).map(|j| x(p, j)).collect::<Vec<_>>());
        for i in 0..k {
            for j in i + 1..k {
                cnf.clause(&[x(p, i).not(), x(p, j).not()]);
            }
        }
    }
    // label j may be used only after label j-1
    for p in 0..size {
        for j in 1..k {
            let mut lits = vec![x(p, j).not()];
            lits.extend((0..p).map(|q| x(q, j - 1)));
            cnf.clause(&lits);
        }
    }
    if let Some(ceiling) = &c.ceiling {
        for p in 0..size {
            for q in p + 1..size {
                if ceiling[p] != ceiling[q] {
                    for j in 0..k {
                        cnf.clause(&[x(p, j).not(), x(q, j).not()]);
                    }
                }
            }
        }
    }
    for ids in &c.group_sets {
        for j in 0..k {
            let mut first: Option<Vec<Lit>> = None;
            for &s in ids {
                let inputs: Vec<Lit> = c.sets[s as usize].iter().map(|&p| x(p as usize, j)).collect();
                let out = cnf.counter(&inputs);
                match &first {
                    None => first = Some(out),
                    Some(reference) => {
                        for (&a, &b) in reference.clone().iter().zip(&out) {
                            cnf.equal(a, b);
                        }
                    }
                }
            }
        }
    }
    let summary = DimacsSummary {
        variables: cnf.next as usize,
        clauses: cnf.clauses.len(),
        label_variables: size * k,
        classes: k,
    };
    (cnf, summary)
}

/// Writes the CNF of `inst` in DIMACS format.
pub fn write_dimacs(inst: &SearchInstance, out: &mut impl Write) -> Result<DimacsSummary> {
    let (cnf, summary) = encode(inst);
    writeln!(out, "c permutation statistic extension, n={} classes={}", inst.level(), summary.classes)?;
    writeln!(out, "p cnf {} {}", summary.variables, summary.clauses)?;
    for cl in &cnf.clauses {
        for v in cl {
            write!(out, "{v} ")?;
        }
        writeln!(out, "0")?;
    }
    Ok(summary)
}

pub fn export_dimacs(inst: &SearchInstance, path: impl AsRef<Path>) -> Result<DimacsSummary> {
    let mut w = BufWriter::new(File::create(path)?);
    let summary = write_dimacs(inst, &mut w)?;
    w.flush()?;
    Ok(summary)
}

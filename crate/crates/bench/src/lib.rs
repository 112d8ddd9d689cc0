//! Shared fixtures for the criterion benchmarks.

use permstat_core::{Builtin, StatisticTable};

pub fn des_table(max_length: usize) -> StatisticTable {
    StatisticTable::builtin(Builtin::Des, max_length)
}

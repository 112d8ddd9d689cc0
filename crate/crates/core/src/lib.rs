//! Permutation statistics, their shuffle algebras and substring coalgebras,
//! and an exhaustive search for statistics that are both shuffle- and
//! substring-compatible.
//!
//! Statistics are handled only up to equivalence: a [`StatisticTable`]
//! records the partition a statistic induces on each `S_n`.

pub mod algebra;
pub mod compat;
pub mod error;
pub mod perm;
pub mod qsym;
pub mod search;
pub mod stat;

pub use algebra::{GradedVector, HopfAlgebra, Tensor};
pub use compat::{check_shuffle_compatible, check_substring_compatible, CompatVerdict, ShuffleMode, Witness};
pub use error::{Error, Result};
pub use search::{enumerate_level, viability_filter, LevelSolution, SearchInstance};
pub use perm::{shuffles, Permutation};
pub use stat::{lift, refines, Builtin, ClassId, Partition, StatisticTable};

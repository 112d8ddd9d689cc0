use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// Standard Young tableau stored row by row.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct StandardTableau {
    rows: Vec<Vec<u32>>,
}

impl StandardTableau {
    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn shape(&self) -> Vec<usize> {
        self.rows.iter().map(Vec::len).collect()
    }

    pub fn size(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Rows weakly shrinking, strictly increasing along rows and columns,
    /// entries exactly `1..=size`.
    pub fn is_standard(&self) -> bool {
        let shape_ok = self.rows.windows(2).all(|r| r[0].len() >= r[1].len()) && self.rows.iter().all(|r| !r.is_empty());
        let rows_ok = self.rows.iter().all(|r| r.windows(2).all(|w| w[0] < w[1]));
        let cols_ok = self.rows.windows(2).all(|r| r[1].iter().zip(&r[0]).all(|(below, above)| above < below));
        let mut entries: Vec<u32> = self.rows.iter().flatten().copied().collect();
        entries.sort_unstable();
        shape_ok && rows_ok && cols_ok && entries.iter().enumerate().all(|(i, &e)| e == i as u32 + 1)
    }
}

impl fmt::Debug for StandardTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.rows)
    }
}

/// Recording tableau of row-insertion RSK.
pub fn rsk_recording(p: &Permutation) -> Result<StandardTableau> {
    if !p.is_standard() {
        return Err(Error::NotStandard(p.to_string()));
    }
    let mut insertion: Vec<Vec<u32>> = Vec::new();
    let mut recording: Vec<Vec<u32>> = Vec::new();
    for (step, &letter) in p.letters().iter().enumerate() {
        let mut x = letter;
        let mut row = 0;
        loop {
            if row == insertion.len() {
                insertion.push(vec![x]);
                recording.push(vec![step as u32 + 1]);
                break;
            }
            let r = &mut insertion[row];
            match r.iter().position(|&y| y > x) {
                Some(i) => {
                    x = std::mem::replace(&mut r[i], x);
                    row += 1;
                }
                None => {
                    r.push(x);
                    recording[row].push(step as u32 + 1);
                    break;
                }
            }
        }
    }
    Ok(StandardTableau { rows: recording })
}

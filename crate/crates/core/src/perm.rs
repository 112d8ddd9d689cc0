//! Permutations as sequences of distinct positive letters.
//!
//! Only relative order matters to every statistic in this crate, so most
//! internal code works on standard permutations identified by their
//! lexicographic rank in `S_n`. The helpers at the bottom of this module
//! ([`lex_rank`], [`lex_permutations`], [`factorial`]) are that bridge.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct Permutation {
    letters: Vec<u32>,
}

impl Permutation {
    pub fn new(letters: Vec<u32>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(letters.len());
        for &l in &letters {
            if l == 0 {
                return Err(Error::ZeroLetter);
            }
            if !seen.insert(l) {
                return Err(Error::RepeatedLetter(l));
            }
        }
        Ok(Permutation { letters })
    }

    /// Builds a permutation from letters already known to be distinct and positive.
    pub(crate) fn from_raw(letters: Vec<u32>) -> Self {
        debug_assert!(Permutation::new(letters.clone()).is_ok());
        Permutation { letters }
    }

    pub fn empty() -> Self {
        Permutation { letters: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        Permutation::from_raw((1..=n as u32).collect())
    }

    /// The standard permutation of `S_n` with the given 0-based letters (`0..n`).
    pub fn from_zero_based(letters: &[u8]) -> Self {
        Permutation::from_raw(letters.iter().map(|&l| u32::from(l) + 1).collect())
    }

    pub fn letters(&self) -> &[u32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_standard(&self) -> bool {
        let n = self.letters.len() as u32;
        self.letters.iter().all(|&l| l <= n)
    }

    /// Replaces the i-th smallest letter by i.
    pub fn standardize(&self) -> Permutation {
        Permutation::from_raw(self.ranks().into_iter().map(|r| r as u32 + 1).collect())
    }

    /// 0-based rank of each letter among the letters, in position order.
    pub fn ranks(&self) -> Vec<u8> {
        let mut order: Vec<usize> = (0..self.letters.len()).collect();
        order.sort_by_key(|&i| self.letters[i]);
        let mut ranks = vec![0u8; self.letters.len()];
        for (r, i) in order.into_iter().enumerate() {
            ranks[i] = r as u8;
        }
        ranks
    }

    /// The contiguous substring at 1-based positions `i..=j`. `i == j + 1` gives
    /// the empty window.
    pub fn window(&self, i: usize, j: usize) -> Result<Permutation> {
        let len = self.letters.len();
        if i < 1 || j > len || i > j + 1 {
            return Err(Error::IndexOutOfRange { i, j, len });
        }
        Ok(Permutation::from_raw(self.letters[i - 1..j].to_vec()))
    }

    /// Swaps the i-th smallest letter with the i-th largest.
    pub fn complement(&self) -> Permutation {
        let mut sorted = self.letters.clone();
        sorted.sort_unstable();
        let n = sorted.len();
        let letters = self
            .letters
            .iter()
            .map(|l| {
                let r = sorted.binary_search(l).expect("letter is present");
                sorted[n - 1 - r]
            })
            .collect();
        Permutation::from_raw(letters)
    }

    /// Letters shifted up by `m` (the `σ[m]` construction).
    pub fn shift(&self, m: u32) -> Permutation {
        Permutation::from_raw(self.letters.iter().map(|l| l + m).collect())
    }

    pub fn shared_letter(&self, other: &Permutation) -> Option<u32> {
        let mine: HashSet<u32> = self.letters.iter().copied().collect();
        other.letters.iter().copied().find(|l| mine.contains(l))
    }

    pub fn is_disjoint(&self, other: &Permutation) -> bool {
        self.shared_letter(other).is_none()
    }

    pub fn concat(&self, other: &Permutation) -> Result<Permutation> {
        if let Some(l) = self.shared_letter(other) {
            return Err(Error::DisjointnessViolation(l));
        }
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(Permutation::from_raw(letters))
    }

    /// Whether `other` occurs as a (not necessarily contiguous) subsequence.
    pub fn contains_subsequence(&self, other: &Permutation) -> bool {
        let mut it = self.letters.iter();
        other.letters.iter().all(|l| it.any(|x| x == l))
    }

    /// Compact digit form, available only when every letter is at most 9.
    pub fn compact(&self) -> Option<String> {
        if self.letters.iter().all(|&l| l <= 9) {
            Some(self.letters.iter().map(|l| char::from(b'0' + *l as u8)).collect())
        } else {
            None
        }
    }

    pub(crate) fn lex_rank(&self) -> usize {
        lex_rank(&self.letters)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in &self.letters {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.compact() {
            Some(s) if !s.is_empty() => f.write_str(&s),
            _ => write!(f, "[{self}]"),
        }
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Accepts `"2,9,5,4,6"` or the compact `"29546"`; the empty string is the
    /// empty permutation.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Permutation::empty());
        }
        let letters: Vec<u32> = if s.contains(',') {
            s.split(',')
                .map(|t| t.trim().parse::<u32>().map_err(|_| Error::Parse(s.to_string())))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| Error::Parse(s.to_string())))
                .collect::<Result<_>>()?
        };
        Permutation::new(letters)
    }
}

impl TryFrom<Vec<u32>> for Permutation {
    type Error = Error;

    fn try_from(letters: Vec<u32>) -> Result<Self> {
        Permutation::new(letters)
    }
}

impl From<Permutation> for Vec<u32> {
    fn from(p: Permutation) -> Self {
        p.letters
    }
}

/// All shuffles of two disjoint permutations, sorted lexicographically.
pub fn shuffles(p: &Permutation, q: &Permutation) -> Result<Vec<Permutation>> {
    if let Some(l) = p.shared_letter(q) {
        return Err(Error::DisjointnessViolation(l));
    }
    let mut out = Vec::new();
    let mut buf = Vec::with_capacity(p.len() + q.len());
    interleave(&p.letters, &q.letters, &mut buf, &mut |w| out.push(Permutation::from_raw(w.to_vec())));
    out.sort();
    Ok(out)
}

/// Calls `visit` with every interleaving of `a` and `b`.
pub(crate) fn interleave<T: Copy>(a: &[T], b: &[T], buf: &mut Vec<T>, visit: &mut impl FnMut(&[T])) {
    match (a.split_first(), b.split_first()) {
        (None, None) => visit(buf),
        (Some((&x, rest)), None) | (None, Some((&x, rest))) => {
            buf.push(x);
            interleave(rest, &[], buf, visit);
            buf.pop();
        }
        (Some((&x, ra)), Some((&y, rb))) => {
            buf.push(x);
            interleave(ra, b, buf, visit);
            buf.pop();
            buf.push(y);
            interleave(a, rb, buf, visit);
            buf.pop();
        }
    }
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Rank of the standardization of `letters` in lexicographic order of `S_n`.
pub fn lex_rank<T: Ord>(letters: &[T]) -> usize {
    let n = letters.len();
    let mut rank = 0;
    for i in 0..n {
        let smaller = letters[i + 1..].iter().filter(|x| **x < letters[i]).count();
        rank = rank * (n - i) + smaller;
    }
    rank
}

/// `S_n` in lexicographic order, as 0-based letter vectors.
pub fn lex_permutations(n: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::with_capacity(factorial(n));
    let mut cur: Vec<u8> = (0..n as u8).collect();
    loop {
        out.push(cur.clone());
        // next permutation
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else {
            break;
        };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).expect("successor exists");
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// Lexicographically ordered `k`-subsets of `0..n`.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<u8>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for x in start..n {
            if n - x < k - cur.len() {
                break;
            }
            cur.push(x as u8);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn rank_oracle(letters: &[u32]) -> Vec<u32> {
        let mut sorted = letters.to_vec();
        sorted.sort();
        letters.iter().map(|l| sorted.iter().position(|x| x == l).unwrap() as u32 + 1).collect()
    }

    #[test]
    fn standardize_examples() {
        assert_eq!(p("29546").standardize(), p("15324"));
        assert_eq!(p("132").standardize(), p("132"));
        assert_eq!(p("524").standardize(), p("312"));
        for s in ["29546", "524", "7,10,3"] {
            assert_eq!(p(s).standardize().letters(), rank_oracle(p(s).letters()).as_slice());
        }
    }

    #[test]
    fn shuffle_examples() {
        let got = shuffles(&p("13"), &p("524")).unwrap();
        let want: Vec<Permutation> = "13524 15324 15234 15243 51324 51234 51243 52134 52143 52413"
            .split(' ')
            .map(p)
            .collect();
        let mut want_sorted = want.clone();
        want_sorted.sort();
        assert_eq!(got, want_sorted);
        assert_eq!(shuffles(&p("1"), &p("2")).unwrap(), vec![p("12"), p("21")]);
        assert_eq!(shuffles(&Permutation::empty(), &p("12")).unwrap(), vec![p("12")]);
        assert!(matches!(shuffles(&p("12"), &p("23")), Err(Error::DisjointnessViolation(2))));
    }

    #[test]
    fn window_examples() {
        assert_eq!(p("29546").window(2, 4).unwrap(), p("954"));
        assert_eq!(p("1234").window(1, 4).unwrap(), p("1234"));
        assert_eq!(p("3214").window(1, 2).unwrap(), p("32"));
        assert!(p("12").window(3, 2).unwrap().is_empty());
        assert!(matches!(p("12").window(1, 3), Err(Error::IndexOutOfRange { .. })));
        assert!(p("12").window(0, 1).is_err());
    }

    #[test]
    fn complement_examples() {
        assert_eq!(p("29546").complement(), p("92564"));
        assert_eq!(p("12").complement(), p("21"));
        assert_eq!(Permutation::empty().complement(), Permutation::empty());
    }

    #[test]
    fn parsing_and_display() {
        assert_eq!(p("2,9,5,4,6"), p("29546"));
        assert_eq!(p("2,10,5").to_string(), "2,10,5");
        assert!(matches!("1,1".parse::<Permutation>(), Err(Error::RepeatedLetter(1))));
        assert!(matches!("102".parse::<Permutation>(), Err(Error::ZeroLetter)));
        assert!("1x".parse::<Permutation>().is_err());
        assert!(p("").is_empty());
        assert!(p("312").is_standard());
        assert!(!p("524").is_standard());
    }

    #[test]
    fn shift_and_concat() {
        assert_eq!(p("21").shift(3), p("54"));
        assert_eq!(p("13").concat(&p("2")).unwrap(), p("132"));
        assert!(p("13").concat(&p("3")).is_err());
    }

    #[test]
    fn lex_helpers_agree() {
        for n in 0..=6 {
            let all = lex_permutations(n);
            assert_eq!(all.len(), factorial(n));
            for (i, w) in all.iter().enumerate() {
                assert_eq!(lex_rank(w), i);
            }
            assert!(all.windows(2).all(|w| w[0] < w[1]));
        }
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 0), vec![Vec::<u8>::new()]);
    }
}

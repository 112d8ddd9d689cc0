//! Quasisymmetric polynomials in finitely many variables, used as an
//! independent model of the Des Hopf algebra on the fundamental basis.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{GradedVector, HopfAlgebra, Tensor};
use crate::compat::{CompatVerdict, Witness};
use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::stat::{descent_set, Builtin, ClassId, StatisticTable};

/// An ordered sequence of positive parts.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::Parse(format!("composition {parts:?} has a zero part")));
        }
        Ok(Composition { parts })
    }

    pub fn empty() -> Self {
        Composition::default()
    }

    /// The composition whose partial sums are `set`, completed by `n`.
    pub fn from_descent_set(set: &[usize], n: usize) -> Self {
        let mut parts = Vec::with_capacity(set.len() + 1);
        let mut prev = 0;
        for &d in set.iter().chain(std::iter::once(&n)) {
            if d > prev {
                parts.push(d - prev);
            }
            prev = d;
        }
        Composition { parts }
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn weight(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Partial sums, excluding the total.
    pub fn descent_set(&self) -> Vec<usize> {
        let mut acc = 0;
        let mut out = Vec::new();
        for &p in &self.parts[..self.parts.len().saturating_sub(1)] {
            acc += p;
            out.push(acc);
        }
        out
    }

    /// A permutation with this descent set: increasing runs of values,
    /// each run below the previous one.
    pub fn permutation(&self) -> Permutation {
        let mut high = self.weight() as u32;
        let mut out = Vec::with_capacity(high as usize);
        for &p in &self.parts {
            out.extend(high - p as u32 + 1..=high);
            high -= p as u32;
        }
        Permutation::new(out).expect("runs are disjoint")
    }

    /// All compositions obtained by splitting each part into ordered
    /// positive summands.
    pub fn refinements(&self) -> Vec<Composition> {
        let mut out = vec![Vec::new()];
        for &p in &self.parts {
            let pieces = compositions_of(p);
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    pieces.iter().map(move |piece| {
                        let mut v = prefix.clone();
                        v.extend_from_slice(piece);
                        v
                    })
                })
                .collect();
        }
        out.into_iter().map(|parts| Composition { parts }).collect()
    }
}

impl TryFrom<Vec<usize>> for Composition {
    type Error = Error;

    fn try_from(parts: Vec<usize>) -> Result<Self> {
        Composition::new(parts)
    }
}

impl From<Composition> for Vec<usize> {
    fn from(c: Composition) -> Self {
        c.parts
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl std::str::FromStr for Composition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        if inner.trim().is_empty() {
            return Ok(Composition::empty());
        }
        let parts = inner
            .split(',')
            .map(|x| x.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad composition {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        Composition::new(parts)
    }
}

/// All compositions of `n`, in the order of their descent-set bitmask.
pub fn compositions_of(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    (0u32..1 << (n - 1))
        .map(|mask| {
            let set: Vec<usize> = (1..n).filter(|i| mask & (1 << (i - 1)) != 0).collect();
            Composition::from_descent_set(&set, n).parts
        })
        .collect()
}

pub fn comp_of(p: &Permutation) -> Composition {
    Composition::from_descent_set(&descent_set(p.letters()), p.len())
}

/// Polynomial with integer coefficients in a fixed number of variables.
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedPolynomial {
    variables: usize,
    terms: BTreeMap<Vec<u8>, i64>,
}

impl TruncatedPolynomial {
    pub fn zero(variables: usize) -> Self {
        TruncatedPolynomial { variables, terms: BTreeMap::new() }
    }

    pub fn one(variables: usize) -> Self {
        let mut p = Self::zero(variables);
        p.add_term(vec![0; variables], 1);
        p
    }

    pub fn variable_count(&self) -> usize {
        self.variables
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], i64)> {
        self.terms.iter().map(|(e, &c)| (e.as_slice(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(|e| e.iter().map(|&x| x as usize).sum()).max().unwrap_or(0)
    }

    pub fn coeff(&self, exponents: &[u8]) -> i64 {
        self.terms.get(exponents).copied().unwrap_or(0)
    }

    fn add_term(&mut self, exponents: Vec<u8>, c: i64) {
        debug_assert_eq!(exponents.len(), self.variables);
        if c == 0 {
            return;
        }
        match self.terms.entry(exponents) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0 {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &TruncatedPolynomial, scale: i64) {
        assert_eq!(self.variables, other.variables);
        for (e, &c) in &other.terms {
            self.add_term(e.clone(), c * scale);
        }
    }

    pub fn mul(&self, other: &TruncatedPolynomial) -> TruncatedPolynomial {
        assert_eq!(self.variables, other.variables);
        let mut out = Self::zero(self.variables);
        for (e1, &c1) in &self.terms {
            for (e2, &c2) in &other.terms {
                let e: Vec<u8> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    /// Monomial quasisymmetric polynomial `M_beta`.
    pub fn monomial(beta: &Composition, variables: usize) -> TruncatedPolynomial {
        let mut out = Self::zero(variables);
        let k = beta.len();
        if k > variables {
            return out;
        }
        for idx in crate::perm::combinations(variables, k) {
            let mut e = vec![0u8; variables];
            for (&i, &part) in idx.iter().zip(beta.parts()) {
                e[i as usize] = part as u8;
            }
            out.add_term(e, 1);
        }
        out
    }
}

impl fmt::Display for TruncatedPolynomial {
    /// One sorted `exponent-vector: coefficient` line per term.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (e, c) in &self.terms {
            let v: Vec<String> = e.iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]: {c}", v.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Debug for TruncatedPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedPolynomial({} vars) {:?}", self.variables, self.terms)
    }
}

/// Fundamental quasisymmetric polynomial `F_alpha` in `m` variables.
pub fn fundamental_poly(alpha: &Composition, m: usize) -> Result<TruncatedPolynomial> {
    if m < alpha.weight() {
        return Err(Error::TooFewVariables { needed: alpha.weight(), given: m });
    }
    let mut out = TruncatedPolynomial::zero(m);
    for beta in alpha.refinements() {
        out.add_scaled(&TruncatedPolynomial::monomial(&beta, m), 1);
    }
    Ok(out)
}

fn pattern(e: &[u8]) -> Composition {
    Composition { parts: e.iter().filter(|&&x| x > 0).map(|&x| x as usize).collect() }
}

/// Coordinates in the monomial basis.
pub fn to_monomial_basis(f: &TruncatedPolynomial) -> Result<BTreeMap<Composition, i64>> {
    let m = f.variable_count();
    let mut coords = BTreeMap::new();
    for (e, c) in f.terms() {
        let beta = pattern(e);
        // the packed monomial carries the coefficient of M_beta
        let packed_here = e.iter().take(beta.len()).all(|&x| x > 0);
        if packed_here {
            coords.insert(beta, c);
        }
    }
    let mut rebuilt = TruncatedPolynomial::zero(m);
    for (beta, &c) in &coords {
        rebuilt.add_scaled(&TruncatedPolynomial::monomial(beta, m), c);
    }
    if &rebuilt != f {
        return Err(Error::NotQuasisymmetric(format!("polynomial in {m} variables")));
    }
    Ok(coords)
}

/// Converts monomial-basis coordinates to fundamental-basis coordinates.
pub fn monomial_to_fundamental(coords: &BTreeMap<Composition, i64>) -> BTreeMap<Composition, i64> {
    let mut rest = coords.clone();
    rest.retain(|_, c| *c != 0);
    let mut out = BTreeMap::new();
    while let Some(alpha) = rest.keys().min_by_key(|a| (a.len(), (*a).clone())).cloned() {
        let c = rest[&alpha];
        out.insert(alpha.clone(), c);
        for beta in alpha.refinements() {
            let entry = rest.entry(beta.clone()).or_insert(0);
            *entry -= c;
            if *entry == 0 {
                rest.remove(&beta);
            }
        }
    }
    out
}

pub fn to_fundamental_basis(f: &TruncatedPolynomial) -> Result<BTreeMap<Composition, i64>> {
    Ok(monomial_to_fundamental(&to_monomial_basis(f)?))
}

/// Expands a polynomial in `2m` variables `x_1..x_m, y_1..y_m` as
/// `sum c F_beta(x) F_gamma(y)`.
pub fn split_fundamental(f: &TruncatedPolynomial, m: usize) -> Result<BTreeMap<(Composition, Composition), i64>> {
    assert_eq!(f.variable_count(), 2 * m);
    let mut by_x: BTreeMap<Vec<u8>, TruncatedPolynomial> = BTreeMap::new();
    for (e, c) in f.terms() {
        by_x.entry(e[..m].to_vec()).or_insert_with(|| TruncatedPolynomial::zero(m)).add_term(e[m..].to_vec(), c);
    }
    let mut by_gamma: BTreeMap<Composition, TruncatedPolynomial> = BTreeMap::new();
    for (ex, q) in by_x {
        for (gamma, d) in to_fundamental_basis(&q)? {
            by_gamma.entry(gamma).or_insert_with(|| TruncatedPolynomial::zero(m)).add_term(ex.clone(), d);
        }
    }
    let mut out = BTreeMap::new();
    for (gamma, r) in by_gamma {
        for (beta, c) in to_fundamental_basis(&r)? {
            out.insert((beta, gamma.clone()), c);
        }
    }
    Ok(out)
}

fn des_coords(h: &HopfAlgebra<'_>, v: &GradedVector) -> BTreeMap<Composition, i64> {
    v.iter().map(|(c, k)| (class_comp(h, *c), k)).collect()
}

fn class_comp(h: &HopfAlgebra<'_>, c: ClassId) -> Composition {
    comp_of(&Permutation::from_zero_based(h.representative(c)))
}

fn tensor_coords(h: &HopfAlgebra<'_>, t: &Tensor) -> BTreeMap<(Composition, Composition), i64> {
    t.iter().map(|((a, b), k)| ((class_comp(h, *a), class_comp(h, *b)), k)).collect()
}

/// Compares the Des shuffle algebra and substring coalgebra with products
/// and alphabet-doubled coproducts of fundamental quasisymmetric polynomials.
pub fn verify_des_isomorphism(upto: usize) -> Result<CompatVerdict> {
    if upto > 6 {
        return Err(Error::LengthOutOfRange { length: upto, max_length: 6 });
    }
    let des = StatisticTable::builtin(Builtin::Des, upto);
    let h = HopfAlgebra::new(&des)?;
    for total in 0..=upto {
        for i in 0..=total {
            for a in des.basis(i) {
                for b in des.basis(total - i) {
                    let fa = fundamental_poly(&class_comp(&h, a), total)?;
                    let fb = fundamental_poly(&class_comp(&h, b), total)?;
                    let got = to_fundamental_basis(&fa.mul(&fb))?;
                    if got != des_coords(&h, &h.product(a, b)?) {
                        return Ok(failure("F_alpha F_beta = product in A_Des", format!("a={a}, b={b}")));
                    }
                }
            }
        }
    }
    for n in 0..=upto {
        for a in des.basis(n) {
            let f = fundamental_poly(&class_comp(&h, a), 2 * n)?;
            let got = split_fundamental(&f, n)?;
            if got != tensor_coords(&h, &h.coproduct(a)?) {
                return Ok(failure("F_alpha(x,y) = coproduct in C_Des", format!("a={a}")));
            }
        }
    }
    Ok(CompatVerdict::holds())
}

fn failure(identity: &str, element: String) -> CompatVerdict {
    CompatVerdict::fails(Witness::Identity { identity: identity.to_string(), element })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn comp(s: &str) -> Composition {
        s.parse().unwrap()
    }

    #[test]
    fn comp_of_examples() {
        assert_eq!(comp_of(&"29546".parse().unwrap()), comp("(2,1,2)"));
        assert_eq!(comp_of(&"123".parse().unwrap()), comp("(3)"));
        assert_eq!(comp_of(&Permutation::empty()), Composition::empty());
    }

    #[test]
    fn permutation_has_descent_set() {
        for n in 0..=6 {
            for parts in compositions_of(n) {
                let c = Composition::new(parts).unwrap();
                assert_eq!(comp_of(&c.permutation()), c);
            }
        }
        assert_eq!(comp("(2,1,2)").permutation().to_string(), "4,5,3,1,2");
    }

    #[test]
    fn fundamental_examples() {
        let f = fundamental_poly(&comp("(1,1)"), 2).unwrap();
        assert_eq!(f.to_string(), "[1,1]: 1\n");
        let f = fundamental_poly(&comp("(2)"), 2).unwrap();
        assert_eq!(f.to_string(), "[0,2]: 1\n[1,1]: 1\n[2,0]: 1\n");
        assert_eq!(fundamental_poly(&Composition::empty(), 3).unwrap(), TruncatedPolynomial::one(3));
        assert!(matches!(fundamental_poly(&comp("(3)"), 2), Err(Error::TooFewVariables { needed: 3, given: 2 })));
    }

    #[test]
    fn monomial_coordinates() {
        let f = fundamental_poly(&comp("(2)"), 2).unwrap();
        let m = to_monomial_basis(&f).unwrap();
        assert_eq!(m, BTreeMap::from([(comp("(2)"), 1), (comp("(1,1)"), 1)]));
        assert!(to_monomial_basis(&TruncatedPolynomial::zero(2)).unwrap().is_empty());
        let mut g = TruncatedPolynomial::zero(2);
        g.add_term(vec![1, 2], 1);
        g.add_term(vec![2, 1], 1);
        assert_eq!(to_monomial_basis(&g).unwrap(), BTreeMap::from([(comp("(1,2)"), 1), (comp("(2,1)"), 1)]));
        let mut h = TruncatedPolynomial::zero(2);
        h.add_term(vec![0, 1], 1);
        assert!(matches!(to_monomial_basis(&h), Err(Error::NotQuasisymmetric(_))));
    }

    #[test]
    fn degree_one_square() {
        let f1 = fundamental_poly(&comp("(1)"), 2).unwrap();
        let got = to_fundamental_basis(&f1.mul(&f1)).unwrap();
        assert_eq!(got, BTreeMap::from([(comp("(2)"), 1), (comp("(1,1)"), 1)]));
    }

    #[test]
    fn primitive_degree_one() {
        let f = fundamental_poly(&comp("(1)"), 2).unwrap();
        let got = split_fundamental(&f, 1).unwrap();
        assert_eq!(got, BTreeMap::from([((Composition::empty(), comp("(1)")), 1), ((comp("(1)"), Composition::empty()), 1)]));
    }

    #[test]
    fn isomorphism_small() {
        assert!(verify_des_isomorphism(4).unwrap().holds);
    }
}

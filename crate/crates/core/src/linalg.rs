//! Exact rational sparse linear algebra over free modules on ordered keys.
//!
//! Rows are kept in semi-echelon form: each row's leading entry is 1 and sits
//! in a column that no other row leads in. Reducing a vector walks its pivot
//! columns in increasing order, so the remainder (the part left on free
//! columns) is unique and linear in the input.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagram::Diagram;
use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Finite formal linear combination with exact rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinComb<K: Ord> {
    terms: BTreeMap<K, Q>,
}

pub type RationalVector = LinComb<Diagram>;

impl<K: Ord + Clone> Default for LinComb<K> {
    fn default() -> Self {
        LinComb::zero()
    }
}

impl<K: Ord + Clone> LinComb<K> {
    pub fn zero() -> Self {
        LinComb {
            terms: BTreeMap::new(),
        }
    }

    pub fn unit(k: K) -> Self {
        Self::term(k, Q::one())
    }

    pub fn term(k: K, c: Q) -> Self {
        let mut v = Self::zero();
        v.add_term(k, c);
        v
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (K, Q)>) -> Self {
        let mut v = Self::zero();
        for (k, c) in terms {
            v.add_term(k, c);
        }
        v
    }

    pub fn add_term(&mut self, k: K, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(k) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (k, x) in &other.terms {
            self.add_term(k.clone(), x * c);
        }
    }

    pub fn scaled(&self, c: &Q) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LinComb {
            terms: self.terms.iter().map(|(k, x)| (k.clone(), x * c)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn get(&self, k: &K) -> Q {
        self.terms.get(k).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Q)> {
        self.terms.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.terms.keys()
    }

    pub fn coefficient_sum(&self) -> Q {
        self.terms.values().fold(Q::zero(), |a, b| a + b)
    }

    /// Extend a map on keys linearly.
    pub fn map_linear<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> LinComb<K2>) -> LinComb<K2> {
        let mut out = LinComb::zero();
        for (k, c) in &self.terms {
            out.add_scaled(&f(k), c);
        }
        out
    }

    /// Relabel keys; coefficients of keys that collide are added.
    pub fn map_keys<K2: Ord + Clone>(&self, mut f: impl FnMut(&K) -> K2) -> LinComb<K2> {
        LinComb::from_terms(self.terms.iter().map(|(k, c)| (f(k), c.clone())))
    }
}

impl<K: Ord + Clone> Add for LinComb<K> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (k, c) in rhs.terms {
            self.add_term(k, c);
        }
        self
    }
}

impl<K: Ord + Clone> Sub for LinComb<K> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        for (k, c) in rhs.terms {
            self.add_term(k, -c);
        }
        self
    }
}

impl<K: Ord + Clone> Neg for LinComb<K> {
    type Output = Self;
    fn neg(self) -> Self {
        LinComb {
            terms: self.terms.into_iter().map(|(k, c)| (k, -c)).collect(),
        }
    }
}

impl<K: Ord + Clone> FromIterator<(K, Q)> for LinComb<K> {
    fn from_iter<I: IntoIterator<Item = (K, Q)>>(iter: I) -> Self {
        LinComb::from_terms(iter)
    }
}

impl<K: Ord + fmt::Debug> fmt::Debug for LinComb<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else if i > 0 { "+" } else { "" };
            write!(f, "{sign}{}·{:?} ", c.abs(), k)?;
        }
        Ok(())
    }
}

impl RationalVector {
    /// Human-readable form, one term per line.
    pub fn pretty(&self) -> String {
        self.terms
            .iter()
            .map(|(d, c)| format!("{c}\t{d}"))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

// ---------------------------------------------------------------------------

type Row = Vec<(usize, Q)>;

/// Incrementally built row space in semi-echelon form.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<Row>,
    pivot_row: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new() -> Echelon {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.pivot_row.contains_key(&col)
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.pivot_row.keys().copied()
    }

    /// Remainder of `v` after eliminating every pivot column.
    pub fn reduce(&self, mut v: BTreeMap<usize, Q>) -> BTreeMap<usize, Q> {
        let mut cursor = 0usize;
        loop {
            let next = v
                .range(cursor..)
                .map(|(&c, _)| c)
                .find(|c| self.pivot_row.contains_key(c));
            let Some(col) = next else { break };
            let factor = v.remove(&col).expect("present");
            let row = &self.rows[self.pivot_row[&col]];
            for (c, x) in row.iter().skip(1) {
                let e = v.entry(*c).or_insert_with(Q::zero);
                *e -= x * &factor;
                if e.is_zero() {
                    v.remove(c);
                }
            }
            cursor = col + 1;
        }
        v
    }

    /// Add `v` to the row space. Returns the new pivot column, if any.
    pub fn insert(&mut self, v: BTreeMap<usize, Q>) -> Option<usize> {
        let r = self.reduce(v);
        let (&pivot, lead) = r.iter().next()?;
        let inv = lead.recip();
        let row: Row = r.into_iter().map(|(c, x)| (c, x * &inv)).collect();
        self.pivot_row.insert(pivot, self.rows.len());
        self.rows.push(row);
        Some(pivot)
    }

    pub fn contains(&self, v: BTreeMap<usize, Q>) -> bool {
        self.reduce(v).is_empty()
    }

    /// Fully reduced rows ordered by pivot column.
    pub fn rref(&self) -> Vec<Row> {
        let order: Vec<usize> = self.pivot_row.keys().copied().collect();
        let mut out: Vec<BTreeMap<usize, Q>> = Vec::with_capacity(order.len());
        let mut done = Echelon::new();
        // back-substitute from the last pivot
        for &p in order.iter().rev() {
            let mut reduced: BTreeMap<usize, Q> = self.rows[self.pivot_row[&p]].iter().cloned().collect();
            // done rows carry only their own pivot plus free columns
            let later: Vec<(usize, Q)> = reduced
                .iter()
                .filter(|(c, _)| **c != p && done.is_pivot(**c))
                .map(|(c, x)| (*c, x.clone()))
                .collect();
            for (c, factor) in later {
                for (cc, y) in &done.rows[done.pivot_row[&c]] {
                    let e = reduced.entry(*cc).or_insert_with(Q::zero);
                    *e -= y * &factor;
                }
            }
            reduced.retain(|_, x| !x.is_zero());
            done.pivot_row.insert(p, done.rows.len());
            done.rows.push(reduced.clone().into_iter().collect());
            out.push(reduced);
        }
        out.reverse();
        out.into_iter().map(|r| r.into_iter().collect()).collect()
    }
}

// ---------------------------------------------------------------------------

/// An ordered, indexed set of keys serving as the columns of a free module.
#[derive(Clone, Debug)]
pub struct Basis<K: Ord + Hash + Clone> {
    keys: Vec<K>,
    index: HashMap<K, usize>,
}

impl<K: Ord + Hash + Clone + fmt::Debug> Basis<K> {
    pub fn new(mut keys: Vec<K>) -> Basis<K> {
        keys.sort();
        keys.dedup();
        let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        Basis { keys, index }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }

    pub fn key(&self, i: usize) -> &K {
        &self.keys[i]
    }

    pub fn index_of(&self, k: &K) -> Option<usize> {
        self.index.get(k).copied()
    }

    pub fn sparse(&self, v: &LinComb<K>) -> Result<BTreeMap<usize, Q>> {
        v.iter()
            .map(|(k, c)| {
                self.index_of(k)
                    .map(|i| (i, c.clone()))
                    .ok_or_else(|| Error::OutsideAmbient(format!("{k:?}")))
            })
            .collect()
    }

    pub fn vector(&self, sparse: &BTreeMap<usize, Q>) -> LinComb<K> {
        sparse.iter().map(|(&i, c)| (self.keys[i].clone(), c.clone())).collect()
    }
}

/// The span of a list of vectors inside a fixed ambient basis.
#[derive(Clone, Debug)]
pub struct Span<K: Ord + Hash + Clone> {
    basis: Arc<Basis<K>>,
    ech: Echelon,
}

impl<K: Ord + Hash + Clone + fmt::Debug> Span<K> {
    pub fn new(basis: Arc<Basis<K>>) -> Span<K> {
        Span {
            basis,
            ech: Echelon::new(),
        }
    }

    pub fn from_vectors<'a>(basis: Arc<Basis<K>>, vs: impl IntoIterator<Item = &'a LinComb<K>>) -> Result<Span<K>>
    where
        K: 'a,
    {
        let mut s = Span::new(basis);
        for v in vs {
            s.insert(v)?;
        }
        Ok(s)
    }

    pub fn basis(&self) -> &Arc<Basis<K>> {
        &self.basis
    }

    pub fn echelon(&self) -> &Echelon {
        &self.ech
    }

    pub fn rank(&self) -> usize {
        self.ech.rank()
    }

    /// Returns `true` when `v` enlarged the span.
    pub fn insert(&mut self, v: &LinComb<K>) -> Result<bool> {
        let s = self.basis.sparse(v)?;
        Ok(self.ech.insert(s).is_some())
    }

    pub fn contains(&self, v: &LinComb<K>) -> Result<bool> {
        Ok(self.ech.contains(self.basis.sparse(v)?))
    }

    /// Remainder of `v` on non-pivot columns.
    pub fn reduce(&self, v: &LinComb<K>) -> Result<LinComb<K>> {
        Ok(self.basis.vector(&self.ech.reduce(self.basis.sparse(v)?)))
    }

    pub fn contains_span(&self, other: &Span<K>) -> bool {
        other.ech.rows.iter().all(|r| self.ech.contains(r.iter().cloned().collect()))
    }
}

/// `span(a) == span(b)` by mutual membership.
pub fn subspace_equal<K: Ord + Hash + Clone + fmt::Debug>(
    a: &[LinComb<K>],
    b: &[LinComb<K>],
    basis: &Arc<Basis<K>>,
) -> Result<bool> {
    let sa = Span::from_vectors(basis.clone(), a)?;
    let sb = Span::from_vectors(basis.clone(), b)?;
    Ok(sa.contains_span(&sb) && sb.contains_span(&sa))
}

// ---------------------------------------------------------------------------

/// A free module modulo a relation span, with coordinates on the free
/// (non-pivot) columns.
#[derive(Clone, Debug)]
pub struct QuotientSpace<K: Ord + Hash + Clone = Diagram> {
    rel: Span<K>,
    free: Vec<usize>,
    free_index: Vec<usize>,
}

impl<K: Ord + Hash + Clone + fmt::Debug + Send + Sync> QuotientSpace<K> {
    pub fn new<'a>(basis: Arc<Basis<K>>, relations: impl IntoIterator<Item = &'a LinComb<K>>) -> Result<Self>
    where
        K: 'a,
    {
        Ok(Self::from_span(Span::from_vectors(basis, relations)?))
    }

    pub fn from_span(rel: Span<K>) -> Self {
        let n = rel.basis.len();
        let free: Vec<usize> = (0..n).filter(|&c| !rel.ech.is_pivot(c)).collect();
        let mut free_index = vec![usize::MAX; n];
        for (i, &c) in free.iter().enumerate() {
            free_index[c] = i;
        }
        QuotientSpace { rel, free, free_index }
    }

    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn ambient(&self) -> &Arc<Basis<K>> {
        &self.rel.basis
    }

    pub fn relations(&self) -> &Span<K> {
        &self.rel
    }

    /// The basis element representing coordinate `i`.
    pub fn representative(&self, i: usize) -> &K {
        self.rel.basis.key(self.free[i])
    }

    pub fn coords_sparse(&self, v: &LinComb<K>) -> Result<BTreeMap<usize, Q>> {
        let r = self.rel.ech.reduce(self.rel.basis.sparse(v)?);
        Ok(r.into_iter().map(|(c, x)| (self.free_index[c], x)).collect())
    }

    pub fn coords(&self, v: &LinComb<K>) -> Result<Vec<Q>> {
        let mut out = vec![Q::zero(); self.dim()];
        for (i, x) in self.coords_sparse(v)? {
            out[i] = x;
        }
        Ok(out)
    }

    pub fn coords_batch(&self, vs: &[LinComb<K>]) -> Result<Vec<BTreeMap<usize, Q>>> {
        vs.par_iter().map(|v| self.coords_sparse(v)).collect()
    }

    pub fn is_zero(&self, v: &LinComb<K>) -> Result<bool> {
        self.rel.contains(v)
    }

    /// The vector on representatives with the given coordinates.
    pub fn lift(&self, coords: &BTreeMap<usize, Q>) -> LinComb<K> {
        coords
            .iter()
            .map(|(&i, x)| (self.representative(i).clone(), x.clone()))
            .collect()
    }
}

/// Kernel of a linear map given by the images of the unit vectors
/// `0..images.len()`; images are sparse over any column set.
pub fn kernel(images: &[BTreeMap<usize, Q>]) -> Vec<BTreeMap<usize, Q>> {
    let offset = images
        .iter()
        .flat_map(|m| m.keys().next_back().copied())
        .max()
        .map_or(0, |c| c + 1);
    let mut ech = Echelon::new();
    for (i, img) in images.iter().enumerate() {
        let mut row = img.clone();
        row.insert(offset + i, Q::one());
        ech.insert(row);
    }
    let mut out: Vec<BTreeMap<usize, Q>> = ech
        .rref()
        .into_iter()
        .filter(|r| r[0].0 >= offset)
        .map(|r| r.into_iter().map(|(c, x)| (c - offset, x)).collect())
        .collect();
    out.sort_by_key(|r| r.keys().next().copied());
    out
}

// ---------------------------------------------------------------------------
// Export

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixEntry {
    pub row: usize,
    pub col: usize,
    pub numerator: String,
    pub denominator: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixExport {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<MatrixEntry>,
}

impl MatrixExport {
    pub fn from_rows(rows: &[Vec<(usize, Q)>], cols: usize) -> MatrixExport {
        let entries = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| {
                r.iter().map(move |(c, x)| MatrixEntry {
                    row: i,
                    col: *c,
                    numerator: x.numer().to_string(),
                    denominator: x.denom().to_string(),
                })
            })
            .collect();
        MatrixExport {
            rows: rows.len(),
            cols,
            entries,
        }
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for e in &self.entries {
            w.serialize(e).map_err(|e| Error::Parse(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_csv(text: &str, rows: usize, cols: usize) -> Result<MatrixExport> {
        let entries = csv::Reader::from_reader(text.as_bytes())
            .deserialize()
            .collect::<std::result::Result<Vec<MatrixEntry>, _>>()
            .map_err(|e| Error::Parse(e.to_string()))?;
        if let Some(e) = entries.iter().find(|e| e.row >= rows || e.col >= cols) {
            return Err(Error::Parse(format!("entry ({}, {}) outside {rows}x{cols}", e.row, e.col)));
        }
        Ok(MatrixExport { rows, cols, entries })
    }

    pub fn to_rows(&self) -> Result<Vec<Vec<(usize, Q)>>> {
        let mut rows = vec![Vec::new(); self.rows];
        for e in &self.entries {
            let n: BigInt = e.numerator.parse().map_err(|_| Error::Parse(e.numerator.clone()))?;
            let d: BigInt = e.denominator.parse().map_err(|_| Error::Parse(e.denominator.clone()))?;
            if d.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            rows[e.row].push((e.col, Q::new(n, d)));
        }
        Ok(rows)
    }
}

/// Basis manifest: canonical text encodings in column order.
pub fn basis_manifest(basis: &Basis<Diagram>) -> Vec<String> {
    basis.keys().iter().map(|d| d.to_string()).collect()
}

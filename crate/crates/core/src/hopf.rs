//! Coproduct on diagrams, reduced powers, the section map and the comparison
//! of the primitive and size filtrations.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use itertools::Itertools;
use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagram::Diagram;
use crate::enumerate::{cached, compositions, Shape, SizeFilter};
use crate::error::{Error, Result};
use crate::forest::LabelledForest;
use crate::linalg::{kernel, LinComb, RationalVector, Span, Q};
use crate::spaces::{algebra, coord_vector, coordinate_basis, expand, forest_module, size_filtration, Mode};

/// Linear combination of ordered tensors of diagrams.
pub type TensorVector = LinComb<Vec<Diagram>>;

/// Tensor coordinates: one `(degree, coordinate)` per factor.
pub type TensorCoords = LinComb<Vec<(usize, usize)>>;

fn parts(d: &Diagram) -> (usize, Vec<usize>) {
    d.component_labels()
}

/// Split `d` by assigning component `c` to block `blocks[c]`.
fn split_by(d: &Diagram, labels: &[usize], blocks: &[usize], count: usize) -> Vec<Diagram> {
    (0..count).map(|b| d.subdiagram(labels, |c| blocks[c] == b)).collect()
}

/// `sum_J D_J (x) D_(rest)` over all subsets of components.
pub fn comult(d: &Diagram) -> TensorVector {
    let (c, labels) = parts(d);
    let mut out = TensorVector::zero();
    for mask in 0u32..(1 << c) {
        let blocks: Vec<usize> = (0..c).map(|i| if mask >> i & 1 == 1 { 0 } else { 1 }).collect();
        out.add_term(split_by(d, &labels, &blocks, 2), Q::one());
    }
    out
}

pub fn comult_linear(v: &RationalVector) -> TensorVector {
    v.map_linear(comult)
}

fn check_positive(v: &RationalVector) -> Result<()> {
    if v.keys().any(|d| d.degree() == 0) {
        return Err(Error::Domain("reduced coproduct is defined in positive degree".into()));
    }
    Ok(())
}

/// Ordered splittings of the components into `blocks` nonempty parts.
fn ordered_splittings(d: &Diagram, blocks: usize) -> TensorVector {
    let (c, labels) = parts(d);
    let mut out = TensorVector::zero();
    if blocks == 0 || c < blocks {
        return out;
    }
    for assign in (0..c).map(|_| 0..blocks).multi_cartesian_product() {
        let mut hit = vec![false; blocks];
        for &b in &assign {
            hit[b] = true;
        }
        if hit.iter().all(|&x| x) {
            out.add_term(split_by(d, &labels, &assign, blocks), Q::one());
        }
    }
    out
}

/// `Delta - id (x) 1 - 1 (x) id`.
pub fn reduced_comult(v: &RationalVector) -> Result<TensorVector> {
    check_positive(v)?;
    Ok(v.map_linear(|d| ordered_splittings(d, 2)))
}

/// `Delta-bar^k = (Delta-bar^(k-1) (x) id) o Delta-bar`, with `Delta-bar^0 = id`.
pub fn reduced_comult_power(v: &RationalVector, k: usize) -> Result<TensorVector> {
    check_positive(v)?;
    if k == 0 {
        return Ok(v.map_keys(|d| vec![d.clone()]));
    }
    let once = reduced_comult(v)?;
    let mut out = TensorVector::zero();
    for (t, x) in once.iter() {
        let head = reduced_comult_power(&LinComb::unit(t[0].clone()), k - 1)?;
        for (h, y) in head.iter() {
            let mut key = h.clone();
            key.push(t[1].clone());
            out.add_term(key, x * y);
        }
    }
    Ok(out)
}

/// Same map from the description by ordered partitions into `k + 1`
/// nonempty blocks.
pub fn reduced_comult_power_direct(v: &RationalVector, k: usize) -> Result<TensorVector> {
    check_positive(v)?;
    Ok(v.map_linear(|d| ordered_splittings(d, k + 1)))
}

/// Multiply the factors, first factor on top.
pub fn mu(t: &TensorVector, m: usize) -> RationalVector {
    t.map_keys(|fs| Diagram::product(&fs.iter().collect::<Vec<_>>(), m))
}

/// Factorwise product of two tensors of equal length.
pub fn tensor_product(a: &TensorVector, b: &TensorVector) -> Result<TensorVector> {
    let mut out = TensorVector::zero();
    for (x, p) in a.iter() {
        for (y, q) in b.iter() {
            if x.len() != y.len() {
                return Err(Error::Domain("tensor lengths differ".into()));
            }
            let key = x
                .iter()
                .zip(y)
                .map(|(u, v)| Diagram::stack(u, v))
                .collect::<Result<Vec<_>>>()?;
            out.add_term(key, p * q);
        }
    }
    Ok(out)
}

/// Apply the coproduct to factor `i`, splitting it in two.
pub fn comult_factor(t: &TensorVector, i: usize) -> TensorVector {
    let mut out = TensorVector::zero();
    for (fs, x) in t.iter() {
        for (pair, y) in comult(&fs[i]).iter() {
            let mut key = fs[..i].to_vec();
            key.extend(pair.iter().cloned());
            key.extend(fs[i + 1..].iter().cloned());
            out.add_term(key, x * y);
        }
    }
    out
}

/// Swap the two factors.
pub fn flip(t: &TensorVector) -> TensorVector {
    t.map_keys(|fs| fs.iter().rev().cloned().collect())
}

/// `x (x) y` as a tensor.
pub fn tensor(x: &RationalVector, y: &RationalVector) -> TensorVector {
    let mut out = TensorVector::zero();
    for (a, p) in x.iter() {
        for (b, q) in y.iter() {
            out.add_term(vec![a.clone(), b.clone()], p * q);
        }
    }
    out
}

pub fn product(x: &RationalVector, y: &RationalVector) -> Result<RationalVector> {
    let mut out = RationalVector::zero();
    for (a, p) in x.iter() {
        for (b, q) in y.iter() {
            out.add_term(Diagram::stack(a, b)?, p * q);
        }
    }
    Ok(out)
}

/// Coordinates of every factor in the chord algebra of its degree.
pub fn tensor_coords(t: &TensorVector, mode: Mode) -> Result<TensorCoords> {
    let mut out = TensorCoords::zero();
    for (fs, x) in t.iter() {
        let mut partial: Vec<(Vec<(usize, usize)>, Q)> = vec![(Vec::new(), x.clone())];
        for f in fs {
            let deg = f.degree();
            let c = algebra(f.strand_count(), deg, mode)?.coords_sparse(&expand(&LinComb::unit(f.clone())))?;
            let mut next = Vec::new();
            for (key, y) in &partial {
                for (&i, z) in &c {
                    let mut k = key.clone();
                    k.push((deg, i));
                    next.push((k, y * z));
                }
            }
            partial = next;
        }
        for (k, y) in partial {
            out.add_term(k, y);
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------

fn factorial(k: usize) -> Q {
    Q::from_integer((1..=k).product::<usize>().into())
}

/// `s^(k+1)(F) = F - mu^k Delta-bar^k (F) / (k+1)!`; the identity on forests
/// with at most `k` trees.
pub fn section_s(f: &Diagram, k: usize) -> Result<RationalVector> {
    let s = f.size();
    if s > k + 1 {
        return Err(Error::Domain(format!("forest of size {s} is too large for the section at level {}", k + 1)));
    }
    let unit = LinComb::unit(f.clone());
    if s <= k || f.degree() == 0 {
        return Ok(unit);
    }
    let t = reduced_comult_power(&unit, k)?;
    Ok(unit - mu(&t, f.strand_count()).scaled(&(Q::one() / factorial(k + 1))))
}

/// The same section from the average over stackings.
pub fn section_s_stacked(f: &Diagram, k: usize) -> Result<RationalVector> {
    let s = f.size();
    if s > k + 1 {
        return Err(Error::Domain(format!("forest of size {s} is too large for the section at level {}", k + 1)));
    }
    let unit = LinComb::unit(f.clone());
    if s <= k || f.degree() == 0 {
        return Ok(unit);
    }
    let lf = LabelledForest::from_forest(f)?;
    let w = Q::one() / factorial(s);
    let mut out = RationalVector::zero();
    for sigma in (0..s).permutations(s) {
        let st = LabelledForest::stacked(lf.trees(), &sigma)?.diagram();
        out.add_term(f.clone(), w.clone());
        out.add_term(st, -w.clone());
    }
    Ok(out)
}

// ---------------------------------------------------------------------------

type SpanMemo = OnceLock<Mutex<HashMap<(usize, usize, usize, Mode), Arc<Span<usize>>>>>;

fn memo_span(cell: &'static SpanMemo, key: (usize, usize, usize, Mode), build: impl FnOnce() -> Result<Span<usize>>) -> Result<Arc<Span<usize>>> {
    let map = cell.get_or_init(Default::default);
    if let Some(v) = map.lock().expect("memo lock").get(&key) {
        return Ok(v.clone());
    }
    let v = Arc::new(build()?);
    map.lock().expect("memo lock").insert(key, v.clone());
    Ok(v)
}

/// Kernel of `Delta-bar^k` on the degree-`n` algebra, in algebra coordinates.
pub fn kernel_power(m: usize, n: usize, k: usize, mode: Mode) -> Result<Arc<Span<usize>>> {
    static CELL: SpanMemo = OnceLock::new();
    memo_span(&CELL, (m, n, k, mode), || {
        let space = algebra(m, n, mode)?;
        let images: Vec<TensorCoords> = (0..space.dim())
            .into_par_iter()
            .map(|i| {
                let rep = LinComb::unit(space.representative(i).clone());
                tensor_coords(&reduced_comult_power(&rep, k)?, mode)
            })
            .collect::<Result<_>>()?;
        let mut intern: BTreeMap<Vec<(usize, usize)>, usize> = BTreeMap::new();
        for img in &images {
            for key in img.keys() {
                let next = intern.len();
                intern.entry(key.clone()).or_insert(next);
            }
        }
        let sparse: Vec<BTreeMap<usize, Q>> = images
            .iter()
            .map(|img| img.iter().map(|(key, x)| (intern[key], x.clone())).collect())
            .collect();
        let ker = kernel(&sparse);
        let vs: Vec<LinComb<usize>> = ker.iter().map(coord_vector).collect();
        Span::from_vectors(coordinate_basis(space.dim()), &vs)
    })
}

/// Primitives of degree `n`: the kernel of the reduced coproduct.
pub fn primitive_subspace(m: usize, n: usize, mode: Mode) -> Result<Arc<Span<usize>>> {
    kernel_power(m, n, 1, mode)
}

/// The span of tree diagrams in algebra coordinates.
pub fn tree_subspace(m: usize, n: usize, mode: Mode) -> Result<Arc<Span<usize>>> {
    size_filtration(m, n, 1, mode)
}

/// Representatives of a basis of the primitives of degree `p`.
fn primitive_basis(m: usize, p: usize, mode: Mode) -> Result<Vec<RationalVector>> {
    let space = algebra(m, p, mode)?;
    let prim = primitive_subspace(m, p, mode)?;
    Ok(prim
        .echelon()
        .rref()
        .into_iter()
        .map(|row| space.lift(&row.into_iter().collect()))
        .collect())
}

/// Span of all products of at most `k` primitives of positive degree with
/// total degree `n`.
pub fn product_filtration(m: usize, n: usize, k: usize, mode: Mode) -> Result<Arc<Span<usize>>> {
    static CELL: SpanMemo = OnceLock::new();
    memo_span(&CELL, (m, n, k, mode), || {
        let space = algebra(m, n, mode)?;
        let mut bases: BTreeMap<usize, Vec<RationalVector>> = BTreeMap::new();
        for p in 1..=n {
            bases.insert(p, primitive_basis(m, p, mode)?);
        }
        let mut span = Span::new(coordinate_basis(space.dim()));
        for j in 1..=k.min(n) {
            for comp in compositions(n - j, j) {
                let degs: Vec<usize> = comp.iter().map(|&x| x as usize + 1).collect();
                let choices: Vec<&Vec<RationalVector>> = degs.iter().map(|d| &bases[d]).collect();
                if choices.iter().any(|c| c.is_empty()) {
                    continue;
                }
                for pick in choices.iter().map(|c| c.iter()).multi_cartesian_product() {
                    let mut acc = LinComb::unit(Diagram::empty(m));
                    for v in pick {
                        acc = product(&acc, v)?;
                    }
                    let c = space.coords_sparse(&expand(&acc))?;
                    span.insert(&coord_vector(&c))?;
                }
            }
        }
        Ok(span)
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationRow {
    pub k: usize,
    pub size_dim: usize,
    pub product_dim: usize,
    pub module_dim: usize,
    pub kernel_dim: usize,
    pub size_equals_product: bool,
    pub size_in_kernel: bool,
    pub product_in_kernel: bool,
    pub module_matches_size: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationReport {
    pub degree: usize,
    pub strands: usize,
    pub mode: Mode,
    pub algebra_dim: usize,
    pub primitive_dim: usize,
    pub tree_dim: usize,
    pub primitives_are_trees: bool,
    pub rows: Vec<FiltrationRow>,
}

impl FiltrationReport {
    pub fn passed(&self) -> bool {
        let top = self.rows.last().is_none_or(|r| r.size_dim == self.algebra_dim);
        self.primitives_are_trees
            && top
            && self.rows.windows(2).all(|w| w[0].size_dim <= w[1].size_dim)
            && self.rows.iter().all(|r| {
                r.size_equals_product && r.size_in_kernel && r.product_in_kernel && r.module_matches_size
            })
    }

    pub fn table(&self) -> String {
        let mut s = format!(
            "m={} n={} mode={} dim={} prim={} trees={}\n  k  F^k  P^k  module  ker\n",
            self.strands, self.degree, self.mode, self.algebra_dim, self.primitive_dim, self.tree_dim
        );
        for r in &self.rows {
            s.push_str(&format!(
                "{:>3} {:>4} {:>4} {:>7} {:>4}\n",
                r.k, r.size_dim, r.product_dim, r.module_dim, r.kernel_dim
            ));
        }
        s
    }
}

/// Compare the size, product and kernel filtrations and the forest modules
/// in degree `n`.
pub fn compare(m: usize, n: usize, mode: Mode) -> Result<FiltrationReport> {
    let space = algebra(m, n, mode)?;
    let prim = primitive_subspace(m, n, mode)?;
    let trees = tree_subspace(m, n, mode)?;
    let mut rows = Vec::new();
    for k in 1..=n {
        let size = size_filtration(m, n, k, mode)?;
        let prod = product_filtration(m, n, k, mode)?;
        let ker = kernel_power(m, n, k, mode)?;
        let module = forest_module(m, n, k, mode)?;
        rows.push(FiltrationRow {
            k,
            size_dim: size.rank(),
            product_dim: prod.rank(),
            module_dim: module.dim(),
            kernel_dim: ker.rank(),
            size_equals_product: size.contains_span(&prod) && prod.contains_span(&size),
            size_in_kernel: ker.contains_span(&size),
            product_in_kernel: ker.contains_span(&prod),
            module_matches_size: module.dim() == size.rank(),
        });
    }
    Ok(FiltrationReport {
        degree: n,
        strands: m,
        mode,
        algebra_dim: space.dim(),
        primitive_dim: prim.rank(),
        tree_dim: trees.rank(),
        primitives_are_trees: prim.contains_span(&trees) && trees.contains_span(&prim),
        rows,
    })
}

/// Forests of size at most `k + 1` of degree `n`, for section checks.
pub fn section_domain(m: usize, n: usize, k: usize) -> Result<Arc<Vec<Diagram>>> {
    cached(m, n, Shape::Forest, SizeFilter::AtMost(k + 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::tripod;
    use crate::relations::{four_t, one_t};

    fn three_chords() -> Diagram {
        Diagram::parse("1; strand 0: [0,1,2,3,4,5]; chord (0,3); chord (1,4); chord (2,5)").unwrap()
    }

    #[test]
    fn coproduct_of_a_tree() {
        let t = tripod(&[2, 1], [(0, 0), (0, 1), (1, 0)]).unwrap();
        let e = Diagram::empty(2);
        let expected = TensorVector::from_terms([(vec![t.clone(), e.clone()], Q::one()), (vec![e, t.clone()], Q::one())]);
        assert_eq!(comult(&t), expected);
        assert!(reduced_comult(&LinComb::unit(t)).unwrap().is_zero());
    }

    fn three_distinct_chords() -> Diagram {
        Diagram::parse("3; strand 0: [0]; strand 1: [1,2,3]; strand 2: [4,5]; chord (0,4); chord (1,3); chord (2,5)").unwrap()
    }

    #[test]
    fn coproduct_of_three_chords() {
        let f = three_distinct_chords();
        let d = comult(&f);
        assert_eq!(d.len(), 8);
        assert!(d.get(&vec![Diagram::empty(3), f.clone()]).is_one());
        let v = LinComb::unit(f);
        assert_eq!(reduced_comult(&v).unwrap().len(), 6);
        let d2 = reduced_comult_power(&v, 2).unwrap();
        assert_eq!(d2.len(), 6);
        assert!(d2.keys().all(|t| t.iter().all(|x| x.size() == 1)));
        assert!(reduced_comult_power(&v, 3).unwrap().is_zero());
        assert!(reduced_comult(&LinComb::unit(Diagram::empty(1))).is_err());
    }

    #[test]
    fn recursive_and_direct_powers_agree() {
        for (m, n) in [(1, 4), (2, 3)] {
            for f in cached(m, n, Shape::Forest, SizeFilter::Any).unwrap().iter() {
                let v = LinComb::unit(f.clone());
                for k in 0..=n {
                    assert_eq!(reduced_comult_power(&v, k).unwrap(), reduced_comult_power_direct(&v, k).unwrap());
                }
                if f.size() <= 2 {
                    assert!(reduced_comult_power(&v, 2).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn reduced_coproduct_descends() {
        for (m, n) in [(1, 4), (2, 3)] {
            for mode in [Mode::Framed, Mode::FI] {
                let mut rels = four_t(m, n).unwrap().vectors;
                if mode.one_t() {
                    let chords = cached(m, n, Shape::Chord, SizeFilter::Any).unwrap();
                    rels.extend(one_t(&chords).vectors);
                }
                for r in &rels {
                    let t = reduced_comult(r).unwrap();
                    assert!(tensor_coords(&t, mode).unwrap().is_zero());
                }
            }
        }
    }

    #[test]
    fn section_forms_agree() {
        for (m, n) in [(1, 3), (2, 3)] {
            for k in 1..n {
                let fk = size_filtration(m, n, k, Mode::FI).unwrap();
                for f in section_domain(m, n, k).unwrap().iter() {
                    let a = section_s(f, k).unwrap();
                    let b = section_s_stacked(f, k).unwrap();
                    assert_eq!(a, b, "{f}");
                    if f.size() <= k {
                        assert_eq!(a, LinComb::unit(f.clone()));
                    }
                    let c = algebra(m, n, Mode::FI).unwrap().coords_sparse(&expand(&a)).unwrap();
                    assert!(fk.contains(&coord_vector(&c)).unwrap());
                }
            }
        }
        assert!(section_s(&three_chords(), 1).is_err());
    }

    #[test]
    fn knot_section_is_f_minus_stack() {
        let f = three_chords();
        let lf = LabelledForest::from_forest(&f).unwrap();
        let stack = LabelledForest::stacked(lf.trees(), &[0, 1, 2]).unwrap().diagram();
        let expected = LinComb::from_terms([(f.clone(), Q::one()), (stack, -Q::one())]);
        assert_eq!(section_s(&f, 2).unwrap(), expected);
    }

    #[test]
    fn small_primitive_spaces() {
        assert_eq!(primitive_subspace(1, 1, Mode::FI).unwrap().rank(), 0);
        assert_eq!(primitive_subspace(2, 1, Mode::FI).unwrap().rank(), 1);
        assert_eq!(tree_subspace(2, 1, Mode::FI).unwrap().rank(), 1);
    }

    #[test]
    fn filtrations_coincide_small() {
        for (m, top) in [(1, 4), (2, 3)] {
            for n in 1..=top {
                for mode in [Mode::FI, Mode::Framed] {
                    let r = compare(m, n, mode).unwrap();
                    assert!(r.passed(), "{}", r.table());
                }
            }
        }
    }

    #[test]
    fn coproduct_axioms_on_small_diagrams() {
        let diagrams: Vec<Diagram> = (1..=2)
            .flat_map(|n| cached(2, n, Shape::All, SizeFilter::Any).unwrap().to_vec())
            .collect();
        let e = LinComb::unit(Diagram::empty(2));
        for x in &diagrams {
            let d = comult(x);
            assert_eq!(comult_factor(&d, 0), comult_factor(&d, 1));
            assert_eq!(flip(&d), d);
            for y in diagrams.iter().take(10) {
                let xy = Diagram::stack(x, y).unwrap();
                assert_eq!(comult(&xy), tensor_product(&d, &comult(y)).unwrap());
                let (vx, vy) = (LinComb::unit(x.clone()), LinComb::unit(y.clone()));
                let (dx, dy) = (reduced_comult(&vx).unwrap(), reduced_comult(&vy).unwrap());
                let rhs = tensor_product(&dx, &dy).unwrap()
                    + tensor_product(&dx, &(tensor(&e, &vy) + tensor(&vy, &e))).unwrap()
                    + tensor_product(&(tensor(&e, &vx) + tensor(&vx, &e)), &dy).unwrap()
                    + tensor(&vx, &vy)
                    + tensor(&vy, &vx);
                assert_eq!(reduced_comult(&LinComb::unit(xy)).unwrap(), rhs);
            }
        }
    }
}

//! Labelled forests, slide paths and the vectors they carry.

use std::collections::BTreeMap;

use itertools::Itertools;
use num_integer::Integer;
use num_traits::One;
use serde_json::json;

use super::permutograph::{apply, can_apply, moves, MultiWord, Move, Permutograph};
use crate::diagram::Diagram;
use crate::error::{Error, Result};
use crate::linalg::{LinComb, RationalVector, Q};
use crate::spaces::{forest_module, Mode};

/// A forest together with a numbering of its trees: label `i` is
/// `trees[i]`, and `words[j][p]` is the label of the leg at position `p` on
/// strand `j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelledForest {
    trees: Vec<Diagram>,
    words: MultiWord,
}

impl LabelledForest {
    pub fn new(trees: Vec<Diagram>, words: MultiWord) -> Result<LabelledForest> {
        let m = words.len();
        for t in &trees {
            if !t.is_tree() {
                return Err(Error::Domain(format!("{t} is not a tree")));
            }
            if t.strand_count() != m {
                return Err(Error::StrandMismatch {
                    left: t.strand_count(),
                    right: m,
                });
            }
        }
        for (j, w) in words.iter().enumerate() {
            for (i, t) in trees.iter().enumerate() {
                let seen = w.iter().filter(|&&x| x as usize == i).count();
                if seen != t.legs_per_strand()[j] as usize {
                    return Err(Error::Domain(format!("word on strand {j} has {seen} copies of label {i}")));
                }
            }
            if w.iter().any(|&x| x as usize >= trees.len()) {
                return Err(Error::Domain(format!("word on strand {j} uses an unknown label")));
            }
        }
        Ok(LabelledForest { trees, words })
    }

    /// Labels in order of first leaf.
    pub fn from_forest(f: &Diagram) -> Result<LabelledForest> {
        if !f.is_forest() {
            return Err(Error::Domain(format!("{f} is not a forest")));
        }
        let (trees, words) = f.split();
        Ok(LabelledForest { trees, words })
    }

    /// Trees stacked with `trees[order[0]]` on top.
    pub fn stacked(trees: &[Diagram], order: &[usize]) -> Result<LabelledForest> {
        let m = trees.first().map_or(0, |t| t.strand_count());
        let words = (0..m)
            .map(|j| {
                order
                    .iter()
                    .rev()
                    .flat_map(|&i| std::iter::repeat_n(i as u8, trees[i].legs_per_strand()[j] as usize))
                    .collect()
            })
            .collect();
        LabelledForest::new(trees.to_vec(), words)
    }

    pub fn trees(&self) -> &[Diagram] {
        &self.trees
    }

    pub fn words(&self) -> &MultiWord {
        &self.words
    }

    pub fn size(&self) -> usize {
        self.trees.len()
    }

    pub fn strand_count(&self) -> usize {
        self.words.len()
    }

    pub fn diagram(&self) -> Diagram {
        Diagram::assemble(&self.trees, &self.words).expect("validated labelled forest")
    }

    /// `mults[j][i]`: legs of tree `i` on strand `j`.
    pub fn multiplicities(&self) -> Vec<Vec<usize>> {
        (0..self.strand_count())
            .map(|j| self.trees.iter().map(|t| t.legs_per_strand()[j] as usize).collect())
            .collect()
    }

    pub fn sites(&self) -> Vec<Move> {
        moves(&self.words)
    }

    pub fn slide(&self, mv: Move) -> Result<LabelledForest> {
        if !can_apply(&self.words, mv) {
            return Err(Error::Domain(format!("no slide at strand {} position {}", mv.strand, mv.pos)));
        }
        Ok(LabelledForest {
            trees: self.trees.clone(),
            words: apply(&self.words, mv),
        })
    }

    /// Rename label `i` to `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> LabelledForest {
        let mut trees = self.trees.clone();
        for (i, t) in self.trees.iter().enumerate() {
            trees[perm[i]] = t.clone();
        }
        let words = self
            .words
            .iter()
            .map(|w| w.iter().map(|&x| perm[x as usize] as u8).collect())
            .collect();
        LabelledForest { trees, words }
    }

    /// The permutation `perm` with `self.relabel(perm) == other`, if the two
    /// share a diagram.
    pub fn relabelling_to(&self, other: &LabelledForest) -> Option<Vec<usize>> {
        if self.words.len() != other.words.len() || self.trees.len() != other.trees.len() {
            return None;
        }
        let mut perm = vec![usize::MAX; self.trees.len()];
        for (a, b) in self.words.iter().zip(&other.words) {
            if a.len() != b.len() {
                return None;
            }
            for (&x, &y) in a.iter().zip(b) {
                let slot = &mut perm[x as usize];
                if *slot == usize::MAX {
                    *slot = y as usize;
                } else if *slot != y as usize {
                    return None;
                }
            }
        }
        let cand = self.relabel(&perm);
        (cand == *other).then_some(perm)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "trees": self.trees.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            "words": self.words,
        })
    }
}

// ---------------------------------------------------------------------------

/// The Y-diagram carried by the slide `from -> from.slide(mv)`.
pub fn edge_vector(from: &LabelledForest, mv: Move) -> Result<RationalVector> {
    let to = from.slide(mv)?.diagram();
    Ok(LinComb::unit(to.join_legs(mv.strand, mv.pos)?))
}

/// Same, on an unlabelled forest.
pub fn slide_edge_vector(from: &Diagram, mv: Move) -> Result<RationalVector> {
    let to = slide_unlabelled(from, mv)?;
    Ok(LinComb::unit(to.join_legs(mv.strand, mv.pos)?))
}

pub fn slide_unlabelled(f: &Diagram, mv: Move) -> Result<Diagram> {
    if mv.strand >= f.strand_count() || mv.pos + 1 >= f.legs_per_strand()[mv.strand] as usize {
        return Err(Error::Domain(format!("no leg pair at strand {} position {}", mv.strand, mv.pos)));
    }
    let (_, labels) = f.component_labels();
    let x = f.leaf_at(mv.strand, mv.pos);
    if labels[x] == labels[x + 1] {
        return Err(Error::Domain("legs belong to the same tree".into()));
    }
    Ok(f.swap_legs(mv.strand, mv.pos))
}

/// A walk in a graph of labelled forests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub start: LabelledForest,
    pub moves: Vec<Move>,
}

impl Path {
    pub fn vertices(&self) -> Result<Vec<LabelledForest>> {
        let mut out = vec![self.start.clone()];
        for &mv in &self.moves {
            let next = out.last().expect("nonempty").slide(mv)?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn end(&self) -> Result<LabelledForest> {
        Ok(self.vertices()?.pop().expect("nonempty"))
    }

    /// Sum of the edge vectors.
    pub fn vector(&self) -> Result<RationalVector> {
        let vs = self.vertices()?;
        let mut acc = RationalVector::zero();
        for (v, &mv) in vs[1..].iter().zip(&self.moves) {
            acc = acc + LinComb::unit(v.diagram().join_legs(mv.strand, mv.pos)?);
        }
        Ok(acc)
    }

    pub fn edge_vectors(&self) -> Result<Vec<RationalVector>> {
        let vs = self.vertices()?;
        vs.iter().zip(&self.moves).map(|(v, &mv)| edge_vector(v, mv)).collect()
    }

    pub fn reversed(&self) -> Result<Path> {
        Ok(Path {
            start: self.end()?,
            moves: self.moves.iter().rev().copied().collect(),
        })
    }

    pub fn then(&self, other: &Path) -> Result<Path> {
        if self.end()? != other.start {
            return Err(Error::Domain("paths do not meet".into()));
        }
        let mut moves = self.moves.clone();
        moves.extend_from_slice(&other.moves);
        Ok(Path {
            start: self.start.clone(),
            moves,
        })
    }

    pub fn project(&self) -> Result<UnlabelledPath> {
        Ok(UnlabelledPath {
            start: self.start.diagram(),
            moves: self.moves.clone(),
        })
    }

    pub fn to_json(&self) -> Result<serde_json::Value> {
        Ok(json!({
            "start": self.start.to_json(),
            "moves": self.moves,
            "vertices": self.vertices()?.iter().map(|v| v.diagram().to_string()).collect::<Vec<_>>(),
        }))
    }
}

/// A walk in a graph of unlabelled forests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnlabelledPath {
    pub start: Diagram,
    pub moves: Vec<Move>,
}

impl UnlabelledPath {
    pub fn vertices(&self) -> Result<Vec<Diagram>> {
        let mut out = vec![self.start.clone()];
        for &mv in &self.moves {
            let next = slide_unlabelled(out.last().expect("nonempty"), mv)?;
            out.push(next);
        }
        Ok(out)
    }

    pub fn edge_vectors(&self) -> Result<Vec<RationalVector>> {
        let vs = self.vertices()?;
        vs.iter().zip(&self.moves).map(|(v, &mv)| slide_edge_vector(v, mv)).collect()
    }

    pub fn vector(&self) -> Result<RationalVector> {
        Ok(self.edge_vectors()?.into_iter().fold(RationalVector::zero(), |a, b| a + b))
    }
}

/// The unique lift of an unlabelled path starting at `start_label`.
pub fn lift_path(p: &UnlabelledPath, start_label: &LabelledForest) -> Result<Path> {
    if start_label.diagram() != p.start {
        return Err(Error::Domain("labelled forest does not lie over the start of the path".into()));
    }
    let lifted = Path {
        start: start_label.clone(),
        moves: p.moves.clone(),
    };
    lifted.vertices()?;
    Ok(lifted)
}

/// Lift a closed unlabelled walk repeatedly until the lift closes. Returns
/// the number of repetitions and the closed lift.
pub fn lift_closure(p: &UnlabelledPath, start_label: &LabelledForest) -> Result<(usize, Path)> {
    let mut cur = lift_path(p, start_label)?;
    let end = cur.end()?;
    if end.diagram() != p.start {
        return Err(Error::Domain("path is not closed".into()));
    }
    let mut label = end;
    let mut n = 1;
    while label != *start_label {
        let more = lift_path(p, &label)?;
        label = more.end()?;
        cur = cur.then(&more)?;
        n += 1;
    }
    Ok((n, cur))
}

/// Order of a permutation.
pub fn permutation_order(perm: &[usize]) -> usize {
    let mut seen = vec![false; perm.len()];
    let mut acc = 1usize;
    for i in 0..perm.len() {
        let mut len = 0;
        let mut x = i;
        while !seen[x] {
            seen[x] = true;
            x = perm[x];
            len += 1;
        }
        if len > 0 {
            acc = acc.lcm(&len);
        }
    }
    acc
}

/// Path from `from` to `to` that fixes legs strand by strand, lowest
/// position first, by bubbling the required leg down.
pub fn bubble_path(from: &LabelledForest, to: &LabelledForest) -> Result<Path> {
    if from.trees != to.trees || from.multiplicities() != to.multiplicities() {
        return Err(Error::Domain("forests are made of different trees".into()));
    }
    let mut cur = from.words.clone();
    let mut mvs = Vec::new();
    for j in 0..cur.len() {
        for p in 0..cur[j].len() {
            let t = to.words[j][p];
            let q = (p..cur[j].len()).find(|&q| cur[j][q] == t).expect("same multiplicities");
            for r in (p..q).rev() {
                cur[j].swap(r, r + 1);
                mvs.push(Move::new(j, r));
            }
        }
    }
    Ok(Path {
        start: from.clone(),
        moves: mvs,
    })
}

/// Label `g` compatibly with the split labelling of `f`: equal trees are
/// matched in order.
pub fn labelled_pair(f: &Diagram, g: &Diagram) -> Result<(LabelledForest, LabelledForest)> {
    let lf = LabelledForest::from_forest(f)?;
    let lg = LabelledForest::from_forest(g)?;
    if lf.size() != lg.size() {
        return Err(Error::Domain("forests are made of different trees".into()));
    }
    let mut used = vec![false; lf.size()];
    let mut perm = Vec::with_capacity(lg.size());
    for t in &lg.trees {
        let i = (0..lf.size())
            .find(|&i| !used[i] && lf.trees[i] == *t)
            .ok_or_else(|| Error::Domain("forests are made of different trees".into()))?;
        used[i] = true;
        perm.push(i);
    }
    Ok((lf, lg.relabel(&perm)))
}

/// Vector of the bubble path between two forests on the same trees, before
/// reduction.
pub fn vector_between(f: &Diagram, g: &Diagram) -> Result<RationalVector> {
    let (lf, lg) = labelled_pair(f, g)?;
    bubble_path(&lf, &lg)?.vector()
}

/// [`vector_between`] in coordinates of the size `s - 1` forest module.
pub fn vector_between_coords(f: &Diagram, g: &Diagram, mode: Mode) -> Result<BTreeMap<usize, Q>> {
    let s = f.size();
    if s < 2 {
        return Ok(BTreeMap::new());
    }
    let v = vector_between(f, g)?;
    forest_module(f.strand_count(), f.degree(), s - 1, mode)?.coords_sparse(&v)
}

// ---------------------------------------------------------------------------

/// Affine combination of labelled forests on common trees.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Barycenter {
    pub terms: Vec<(Q, LabelledForest)>,
}

impl Barycenter {
    pub fn new(terms: Vec<(Q, LabelledForest)>) -> Result<Barycenter> {
        let total: Q = terms.iter().map(|(x, _)| x.clone()).sum();
        if !total.is_one() {
            return Err(Error::Domain(format!("barycentric weights sum to {total}")));
        }
        if let Some((_, first)) = terms.first() {
            let mults = first.multiplicities();
            if terms.iter().any(|(_, f)| f.trees != first.trees || f.multiplicities() != mults) {
                return Err(Error::Domain("barycenter mixes different trees".into()));
            }
        }
        Ok(Barycenter { terms })
    }

    /// The affine combination of the underlying diagrams.
    pub fn combination(&self) -> RationalVector {
        let mut v = RationalVector::zero();
        for (x, f) in &self.terms {
            v.add_term(f.diagram(), x.clone());
        }
        v
    }

    /// `sum_i lambda_i * vec(F_i -> target)`.
    pub fn vector_to(&self, target: &LabelledForest) -> Result<RationalVector> {
        let mut v = RationalVector::zero();
        for (x, f) in &self.terms {
            v.add_scaled(&bubble_path(f, target)?.vector()?, x);
        }
        Ok(v)
    }
}

fn factorial(s: usize) -> Q {
    Q::from_integer((1..=s).product::<usize>().into())
}

/// The stacking `T_{sigma(1)} ... T_{sigma(s)}` of the trees of `f`, with the
/// split labelling.
pub fn stacked(f: &Diagram, sigma: &[usize]) -> Result<Diagram> {
    let lf = LabelledForest::from_forest(f)?;
    Ok(LabelledForest::stacked(lf.trees(), sigma)?.diagram())
}

/// Uniform average of all stackings of the trees of `f`.
pub fn avg_barycenter(f: &Diagram) -> Result<Barycenter> {
    let lf = LabelledForest::from_forest(f)?;
    let s = lf.size();
    let w = Q::one() / factorial(s);
    let terms = (0..s)
        .permutations(s)
        .map(|sigma| Ok((w.clone(), LabelledForest::stacked(lf.trees(), &sigma)?)))
        .collect::<Result<Vec<_>>>()?;
    Barycenter::new(terms)
}

/// Vector from the average stacking to `f`, before reduction.
pub fn pi_tilde(f: &Diagram) -> Result<RationalVector> {
    if f.size() < 2 {
        return Err(Error::Domain("the size-lowering map needs at least two trees".into()));
    }
    let lf = LabelledForest::from_forest(f)?;
    avg_barycenter(f)?.vector_to(&lf)
}

/// [`pi_tilde`] in coordinates of the size `s - 1` forest module.
pub fn pi_tilde_coords(f: &Diagram, mode: Mode) -> Result<BTreeMap<usize, Q>> {
    let v = pi_tilde(f)?;
    forest_module(f.strand_count(), f.degree(), f.size() - 1, mode)?.coords_sparse(&v)
}

/// Linear extension of [`pi_tilde_coords`].
pub fn pi_tilde_linear(v: &RationalVector, mode: Mode) -> Result<BTreeMap<usize, Q>> {
    let mut acc: LinComb<usize> = LinComb::zero();
    for (d, x) in v.iter() {
        let c: LinComb<usize> = pi_tilde_coords(d, mode)?.into_iter().collect();
        acc.add_scaled(&c, x);
    }
    Ok(acc.iter().map(|(&i, x)| (i, x.clone())).collect())
}

/// `F_eq - F_cross` at the node next to `leaf`.
pub fn iota_at(f: &Diagram, leaf: usize) -> Result<RationalVector> {
    let (eq, cross) = f
        .break_leg(leaf)
        .ok_or_else(|| Error::Domain(format!("leaf {leaf} is not attached to a node")))?;
    Ok(LinComb::from_terms([(eq, Q::one()), (cross, -Q::one())]))
}

/// [`iota_at`] at the first breakable leg.
pub fn iota(f: &Diagram) -> Result<RationalVector> {
    let leaf = *f
        .breakable_legs()
        .first()
        .ok_or_else(|| Error::Domain("no node to break".into()))?;
    iota_at(f, leaf)
}

// ---------------------------------------------------------------------------

/// All labelled forests on the given trees, identified with a box product of
/// permutographs through their words.
#[derive(Clone, Debug)]
pub struct LabelledGraph {
    trees: Vec<Diagram>,
    graph: Permutograph,
}

impl LabelledGraph {
    pub fn new(trees: Vec<Diagram>, cap: usize) -> Result<LabelledGraph> {
        let m = trees
            .first()
            .ok_or_else(|| Error::Domain("need at least one tree".into()))?
            .strand_count();
        if let Some(t) = trees.iter().find(|t| !t.is_tree()) {
            return Err(Error::Domain(format!("{t} is not a tree")));
        }
        if let Some(t) = trees.iter().find(|t| t.strand_count() != m) {
            return Err(Error::StrandMismatch {
                left: m,
                right: t.strand_count(),
            });
        }
        let mults = (0..m)
            .map(|j| trees.iter().map(|t| t.legs_per_strand()[j] as usize).collect())
            .collect();
        Ok(LabelledGraph {
            trees,
            graph: Permutograph::new(mults, cap)?,
        })
    }

    pub fn permutograph(&self) -> &Permutograph {
        &self.graph
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn vertex(&self, i: usize) -> LabelledForest {
        LabelledForest {
            trees: self.trees.clone(),
            words: self.graph.vertex(i).clone(),
        }
    }

    /// The identification with the box product.
    pub fn w(&self, f: &LabelledForest) -> Option<usize> {
        (f.trees == self.trees).then(|| self.graph.index_of(&f.words)).flatten()
    }

    /// Distinct underlying forests.
    pub fn unlabelled_vertices(&self) -> Vec<Diagram> {
        let mut out: Vec<Diagram> = (0..self.vertex_count()).map(|i| self.vertex(i).diagram()).collect();
        out.sort();
        out.dedup();
        out
    }

    /// Check that words determine labelled forests, and that slides match
    /// letter swaps and leg swaps in both directions.
    pub fn verify_isomorphism(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for i in 0..self.vertex_count() {
            let f = self.vertex(i);
            let d = f.diagram();
            let back = LabelledForest::from_forest(&d)?;
            if back.relabelling_to(&f).is_none() {
                return Err(Error::Domain(format!("vertex {i} not recovered from its diagram")));
            }
            if !seen.insert(f.clone()) {
                return Err(Error::Domain(format!("vertex {i} repeated")));
            }
            let nbrs = self.graph.neighbors(i);
            if nbrs.len() != f.sites().len() {
                return Err(Error::Domain(format!("degree mismatch at vertex {i}")));
            }
            for (mv, j) in nbrs {
                let g = f.slide(mv)?;
                if self.w(&g) != Some(j) || g.diagram() != slide_unlabelled(&d, mv)? {
                    return Err(Error::Domain(format!("slide {mv:?} at vertex {i} disagrees")));
                }
            }
        }
        Ok(())
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph forests {\n");
        for i in 0..self.vertex_count() {
            let v = self.graph.vertex(i);
            s.push_str(&format!(
                "  v{i} [label=\"{} h={}\"];\n",
                super::permutograph::word_label(v),
                super::permutograph::total_height(v)
            ));
        }
        for (u, mv, v) in self.graph.edges() {
            s.push_str(&format!("  v{u} -- v{v} [label=\"{}:{}\"];\n", mv.strand, mv.pos));
        }
        s.push_str("}\n");
        s
    }
}

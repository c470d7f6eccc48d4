//! Words with fixed letter multiplicities, their adjacent-swap graphs and
//! box products of those, plus cycle decomposition by a height scan.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use itertools::Itertools;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{LinComb, Q};

pub type Word = Vec<u8>;

/// One word per strand.
pub type MultiWord = Vec<Word>;

/// Swap of the letters at `pos` and `pos + 1` on `strand`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Move {
    pub strand: usize,
    pub pos: usize,
}

impl Move {
    pub fn new(strand: usize, pos: usize) -> Move {
        Move { strand, pos }
    }

    pub fn commutes_with(&self, other: &Move) -> bool {
        self.strand != other.strand || self.pos.abs_diff(other.pos) >= 2
    }
}

/// Number of inversions.
pub fn height(w: &[u8]) -> usize {
    let mut h = 0;
    for i in 0..w.len() {
        for j in i + 1..w.len() {
            if w[i] > w[j] {
                h += 1;
            }
        }
    }
    h
}

pub fn total_height(v: &MultiWord) -> usize {
    v.iter().map(|w| height(w)).sum()
}

pub fn multinomial(mults: &[usize]) -> u128 {
    let mut acc: u128 = 1;
    let mut total: u128 = 0;
    for &k in mults {
        for i in 1..=k as u128 {
            total += 1;
            acc = acc * total / i;
        }
    }
    acc
}

/// All words with `mults[i]` copies of letter `i`, in lexicographic order.
pub fn words(mults: &[usize]) -> Vec<Word> {
    fn go(left: &mut Vec<usize>, cur: &mut Word, out: &mut Vec<Word>) {
        if left.iter().all(|&x| x == 0) {
            out.push(cur.clone());
            return;
        }
        for i in 0..left.len() {
            if left[i] > 0 {
                left[i] -= 1;
                cur.push(i as u8);
                go(left, cur, out);
                cur.pop();
                left[i] += 1;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut mults.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// The sorted word: height zero.
pub fn lowest(mults: &[usize]) -> Word {
    mults
        .iter()
        .enumerate()
        .flat_map(|(i, &k)| std::iter::repeat_n(i as u8, k))
        .collect()
}

/// The reverse-sorted word: maximal height.
pub fn highest(mults: &[usize]) -> Word {
    let mut w = lowest(mults);
    w.reverse();
    w
}

pub fn can_apply(v: &MultiWord, mv: Move) -> bool {
    v.get(mv.strand)
        .is_some_and(|w| mv.pos + 1 < w.len() && w[mv.pos] != w[mv.pos + 1])
}

pub fn apply(v: &MultiWord, mv: Move) -> MultiWord {
    let mut out = v.clone();
    out[mv.strand].swap(mv.pos, mv.pos + 1);
    out
}

pub fn moves(v: &MultiWord) -> Vec<Move> {
    let mut out = Vec::new();
    for (j, w) in v.iter().enumerate() {
        for p in 0..w.len().saturating_sub(1) {
            if w[p] != w[p + 1] {
                out.push(Move::new(j, p));
            }
        }
    }
    out
}

/// The move joining two adjacent vertices.
pub fn move_between(u: &MultiWord, v: &MultiWord) -> Option<Move> {
    if u.len() != v.len() {
        return None;
    }
    let diff: Vec<usize> = (0..u.len()).filter(|&j| u[j] != v[j]).collect();
    let [j] = diff[..] else { return None };
    let (a, b) = (&u[j], &v[j]);
    if a.len() != b.len() {
        return None;
    }
    let pos: Vec<usize> = (0..a.len()).filter(|&p| a[p] != b[p]).collect();
    match pos[..] {
        [p, q] if q == p + 1 && a[p] == b[q] && a[q] == b[p] => Some(Move::new(j, p)),
        _ => None,
    }
}

// ---------------------------------------------------------------------------

/// Box product of per-strand permutographs, materialised.
#[derive(Clone, Debug)]
pub struct Permutograph {
    mults: Vec<Vec<usize>>,
    vertices: Vec<MultiWord>,
    index: HashMap<MultiWord, usize>,
}

impl Permutograph {
    /// `mults[j][i]` copies of letter `i` on strand `j`.
    pub fn new(mults: Vec<Vec<usize>>, cap: usize) -> Result<Permutograph> {
        let expected = mults.iter().fold(1u128, |acc, m| acc.saturating_mul(multinomial(m)));
        if expected > cap as u128 {
            return Err(Error::ResourceLimit {
                what: "permutograph vertices".into(),
                cap,
                partial: 0,
            });
        }
        let vertices: Vec<MultiWord> = if mults.is_empty() {
            vec![Vec::new()]
        } else {
            mults.iter().map(|m| words(m)).multi_cartesian_product().collect()
        };
        let index = vertices.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        Ok(Permutograph { mults, vertices, index })
    }

    /// A single permutograph on one strand.
    pub fn single(mults: &[usize], cap: usize) -> Result<Permutograph> {
        Permutograph::new(vec![mults.to_vec()], cap)
    }

    pub fn multiplicities(&self) -> &[Vec<usize>] {
        &self.mults
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[MultiWord] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &MultiWord {
        &self.vertices[i]
    }

    pub fn index_of(&self, v: &MultiWord) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn neighbors(&self, i: usize) -> Vec<(Move, usize)> {
        let v = &self.vertices[i];
        moves(v).into_iter().map(|mv| (mv, self.index[&apply(v, mv)])).collect()
    }

    /// Undirected edges `(u, move, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, Move, usize)> {
        let mut out = Vec::new();
        for u in 0..self.vertices.len() {
            for (mv, v) in self.neighbors(u) {
                if u < v {
                    out.push((u, mv, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    /// BFS tree from the height-zero vertex: `parent[v] = (u, move)`.
    pub fn spanning_tree(&self) -> Vec<Option<(usize, Move)>> {
        let root = self.index_of(&self.mults.iter().map(|m| lowest(m)).collect()).expect("root");
        let mut parent = vec![None; self.vertices.len()];
        let mut seen = vec![false; self.vertices.len()];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for (mv, v) in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = Some((u, mv));
                    queue.push_back(v);
                }
            }
        }
        parent
    }

    /// One cycle per non-tree edge: root to `u`, across, back from `v`.
    pub fn fundamental_cycles(&self) -> Vec<Cycle> {
        let parent = self.spanning_tree();
        let to_root = |mut x: usize| {
            let mut mvs = Vec::new();
            while let Some((p, mv)) = parent[x] {
                mvs.push(mv);
                x = p;
            }
            (x, mvs)
        };
        let mut out = Vec::new();
        for (u, mv, v) in self.edges() {
            if parent[v] == Some((u, mv)) || parent[u] == Some((v, mv)) {
                continue;
            }
            let (root, up_u) = to_root(u);
            let (_, up_v) = to_root(v);
            let mut moves: Vec<Move> = up_u.iter().rev().copied().collect();
            moves.push(mv);
            moves.extend(up_v);
            out.push(Cycle {
                start: self.vertices[root].clone(),
                moves,
            });
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph permutograph {\n");
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "  v{i} [label=\"{} h={}\"];", word_label(v), total_height(v));
        }
        for (u, mv, v) in self.edges() {
            let _ = writeln!(s, "  v{u} -- v{v} [label=\"{}:{}\"];", mv.strand, mv.pos);
        }
        s.push_str("}\n");
        s
    }
}

pub fn word_label(v: &MultiWord) -> String {
    v.iter()
        .map(|w| w.iter().map(|&x| (x + 1).to_string()).collect::<String>())
        .join("|")
}

// ---------------------------------------------------------------------------

/// A walk given by a start vertex and moves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cycle {
    pub start: MultiWord,
    pub moves: Vec<Move>,
}

pub type Chain = LinComb<(MultiWord, MultiWord)>;

fn edge_chain(u: &MultiWord, v: &MultiWord) -> Chain {
    if u < v {
        LinComb::unit((u.clone(), v.clone()))
    } else {
        LinComb::term((v.clone(), u.clone()), -Q::one())
    }
}

impl Cycle {
    pub fn from_vertices(vs: &[MultiWord]) -> Result<Cycle> {
        let start = vs.first().cloned().ok_or_else(|| Error::Domain("empty walk".into()))?;
        let moves = vs
            .windows(2)
            .map(|w| move_between(&w[0], &w[1]).ok_or_else(|| Error::Domain("consecutive vertices are not adjacent".into())))
            .collect::<Result<_>>()?;
        Ok(Cycle { start, moves })
    }

    /// Vertices visited, including the final one.
    pub fn vertices(&self) -> Result<Vec<MultiWord>> {
        let mut out = vec![self.start.clone()];
        for &mv in &self.moves {
            let cur = out.last().expect("nonempty");
            if !can_apply(cur, mv) {
                return Err(Error::Domain(format!("move {mv:?} swaps equal letters")));
            }
            out.push(apply(cur, mv));
        }
        Ok(out)
    }

    pub fn is_closed(&self) -> bool {
        self.vertices().is_ok_and(|vs| vs.last() == Some(&self.start))
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    /// Signed sum of traversed edges.
    pub fn chain(&self) -> Result<Chain> {
        let vs = self.vertices()?;
        let mut c = Chain::zero();
        for w in vs.windows(2) {
            c = c + edge_chain(&w[0], &w[1]);
        }
        Ok(c)
    }

    /// Structural type of a short closed walk.
    pub fn kind(&self) -> Option<AtomKind> {
        if !self.is_closed() {
            return None;
        }
        let mv = &self.moves;
        match mv.len() {
            2 if mv[0] == mv[1] => Some(AtomKind::Backtrack),
            4 if mv[0] == mv[2] && mv[1] == mv[3] && mv[0] != mv[1] && mv[0].commutes_with(&mv[1]) => {
                Some(AtomKind::Square)
            }
            6 => {
                let (x, y) = (mv[0], mv[1]);
                let braid = x.strand == y.strand && x.pos.abs_diff(y.pos) == 1;
                let alternating = (0..6).all(|i| mv[i] == if i % 2 == 0 { x } else { y });
                (braid && alternating).then_some(AtomKind::Hexagon)
            }
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AtomKind {
    Backtrack,
    Square,
    Hexagon,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub kind: AtomKind,
    pub cycle: Cycle,
}

fn atom(kind: AtomKind, walk: &[MultiWord]) -> Atom {
    let mut vs = walk.to_vec();
    vs.push(walk[0].clone());
    let cycle = Cycle::from_vertices(&vs).expect("atoms are walks");
    debug_assert_eq!(cycle.kind(), Some(kind));
    Atom { kind, cycle }
}

/// Write a closed walk as a sum of backtracks, commuting squares and
/// braiding hexagons by repeatedly lowering a vertex of maximal height.
pub fn decompose_cycle(c: &Cycle) -> Result<Vec<(Q, Atom)>> {
    let mut walk = c.vertices()?;
    if walk.last() != Some(&c.start) {
        return Err(Error::Domain("walk is not closed".into()));
    }
    walk.pop();
    let mut out = Vec::new();
    if let Some(kind) = c.kind() {
        out.push((Q::one(), Atom { kind, cycle: c.clone() }));
        return Ok(out);
    }
    loop {
        cancel_backtracks(&mut walk, &mut out);
        if walk.is_empty() {
            break;
        }
        let closed = |w: &[MultiWord]| {
            let mut vs = w.to_vec();
            vs.push(w[0].clone());
            Cycle::from_vertices(&vs).ok().and_then(|c| c.kind())
        };
        if let Some(kind) = closed(&walk) {
            out.push((Q::one(), atom(kind, &walk)));
            break;
        }
        let len = walk.len();
        let i = (0..len).max_by_key(|&i| (total_height(&walk[i]), std::cmp::Reverse(i))).expect("nonempty");
        let top = walk[i].clone();
        let prev = walk[(i + len - 1) % len].clone();
        let next = walk[(i + 1) % len].clone();
        let x = move_between(&top, &prev).expect("adjacent");
        let y = move_between(&top, &next).expect("adjacent");
        if x.commutes_with(&y) {
            let low = apply(&prev, y);
            out.push((Q::one(), atom(AtomKind::Square, &[prev, top, next, low.clone()])));
            walk[i] = low;
        } else {
            let a1 = apply(&prev, y);
            let a2 = apply(&a1, x);
            let a3 = apply(&a2, y);
            debug_assert_eq!(apply(&a3, x), next);
            out.push((
                Q::one(),
                atom(AtomKind::Hexagon, &[prev, top, next, a3.clone(), a2.clone(), a1.clone()]),
            ));
            walk.splice(i..=i, [a1, a2, a3]);
        }
    }
    Ok(out)
}

fn cancel_backtracks(walk: &mut Vec<MultiWord>, out: &mut Vec<(Q, Atom)>) {
    loop {
        let len = walk.len();
        if len == 2 {
            out.push((Q::one(), atom(AtomKind::Backtrack, walk)));
            walk.clear();
            return;
        }
        if len < 2 {
            walk.clear();
            return;
        }
        let Some(i) = (0..len).find(|&i| walk[(i + len - 1) % len] == walk[(i + 1) % len]) else {
            return;
        };
        let prev = walk[(i + len - 1) % len].clone();
        out.push((Q::one(), atom(AtomKind::Backtrack, &[prev, walk[i].clone()])));
        let j = (i + 1) % len;
        let (a, b) = if i < j { (j, i) } else { (i, j) };
        walk.remove(a);
        walk.remove(b);
    }
}

/// Sum of the chains of the atoms with their coefficients.
pub fn resum(atoms: &[(Q, Atom)]) -> Result<Chain> {
    let mut c = Chain::zero();
    for (x, a) in atoms {
        c.add_scaled(&a.cycle.chain()?, x);
    }
    Ok(c)
}

//! Uni-trivalent diagrams on `m` oriented strands.
//!
//! A diagram is stored as a perfect matching on half-edges. Leaves come first,
//! numbered strand by strand from the start of each strand (position 0 is the
//! earliest point along the orientation). Node `k` owns the three half-edges
//! `L + 3k`, `L + 3k + 1`, `L + 3k + 2`, listed in counterclockwise cyclic
//! order. Rotating a node's triple does not change the diagram; reversing it
//! does (that is the AS relation, which is *not* folded in here).
//!
//! Every value produced by this module is canonical, so `==` on [`Diagram`] is
//! isomorphism of diagrams (node bijections respecting cyclic orders, identity
//! on leg positions).

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NONE: u32 = u32::MAX;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Diagram {
    legs: Vec<u16>,
    nodes: u16,
    pairing: Vec<u16>,
}

/// Same order as the byte encoding.
impl Ord for Diagram {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.legs.len(), &self.legs, self.nodes, &self.pairing).cmp(&(
            other.legs.len(),
            &other.legs,
            other.nodes,
            &other.pairing,
        ))
    }
}

impl PartialOrd for Diagram {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// The endpoint a half-edge belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum End {
    Leaf(usize),
    Node { node: usize, slot: usize },
}

impl Diagram {
    /// The empty diagram on `m` strands (the unit for stacking).
    pub fn empty(m: usize) -> Diagram {
        Diagram {
            legs: vec![0; m],
            nodes: 0,
            pairing: Vec::new(),
        }
    }

    /// Build from raw parts, validate, and canonicalise.
    pub fn from_parts(legs: Vec<u16>, nodes: u16, pairing: Vec<u16>) -> Result<Diagram> {
        let d = Diagram {
            legs,
            nodes,
            pairing,
        };
        d.validate()?;
        Ok(d.canonical())
    }

    /// Chord diagram from a list of point pairs `((strand, pos), (strand, pos))`.
    /// `legs[j]` must equal the number of endpoints on strand `j`.
    pub fn chords(legs: &[u16], pairs: &[((usize, usize), (usize, usize))]) -> Result<Diagram> {
        let total: usize = legs.iter().map(|&x| x as usize).sum();
        let offsets = offsets(legs);
        let mut pairing = vec![u16::MAX; total];
        for &((sa, pa), (sb, pb)) in pairs {
            if sa >= legs.len() || sb >= legs.len() || pa >= legs[sa] as usize || pb >= legs[sb] as usize
            {
                return Err(Error::structure(
                    format!("chord ({sa},{pa})-({sb},{pb})"),
                    "endpoint outside strand",
                ));
            }
            let a = offsets[sa] + pa;
            let b = offsets[sb] + pb;
            pairing[a] = b as u16;
            pairing[b] = a as u16;
        }
        Diagram::from_parts(legs.to_vec(), 0, pairing)
    }

    pub fn strand_count(&self) -> usize {
        self.legs.len()
    }

    pub fn legs_per_strand(&self) -> &[u16] {
        &self.legs
    }

    pub fn leaf_count(&self) -> usize {
        self.legs.iter().map(|&x| x as usize).sum()
    }

    pub fn node_count(&self) -> usize {
        self.nodes as usize
    }

    pub fn half_edge_count(&self) -> usize {
        self.pairing.len()
    }

    /// Half the number of vertices.
    pub fn degree(&self) -> usize {
        (self.leaf_count() + self.node_count()) / 2
    }

    pub fn partner(&self, h: usize) -> usize {
        self.pairing[h] as usize
    }

    pub fn end(&self, h: usize) -> End {
        let l = self.leaf_count();
        if h < l {
            End::Leaf(h)
        } else {
            End::Node {
                node: (h - l) / 3,
                slot: (h - l) % 3,
            }
        }
    }

    /// Global index of the leaf at `pos` on `strand`.
    pub fn leaf_at(&self, strand: usize, pos: usize) -> usize {
        self.legs[..strand].iter().map(|&x| x as usize).sum::<usize>() + pos
    }

    pub fn leaf_position(&self, leaf: usize) -> (usize, usize) {
        let mut rest = leaf;
        for (j, &c) in self.legs.iter().enumerate() {
            if rest < c as usize {
                return (j, rest);
            }
            rest -= c as usize;
        }
        panic!("leaf {leaf} out of range")
    }

    /// Vertex index of a half-edge: leaves `0..L`, nodes `L..L+N`.
    fn vertex_of(&self, h: usize) -> usize {
        let l = self.leaf_count();
        if h < l {
            h
        } else {
            l + (h - l) / 3
        }
    }

    fn validate(&self) -> Result<()> {
        let l = self.leaf_count();
        let n = self.node_count();
        if self.pairing.len() != l + 3 * n {
            return Err(Error::structure(
                "diagram",
                format!("expected {} half-edges, found {}", l + 3 * n, self.pairing.len()),
            ));
        }
        let name = |d: &Diagram, h: usize| match d.end(h) {
            End::Leaf(i) => format!("leaf {i}"),
            End::Node { node, .. } => format!("node {}", l + node),
        };
        for h in 0..self.pairing.len() {
            let p = self.pairing[h] as usize;
            if p >= self.pairing.len() {
                return Err(Error::structure(name(self, h), "dangling edge"));
            }
            if p == h || self.pairing[p] as usize != h {
                return Err(Error::structure(name(self, h), "inconsistent edge"));
            }
            if self.vertex_of(p) == self.vertex_of(h) {
                return Err(Error::structure(name(self, h), "tadpole (self-loop)"));
            }
        }
        let (count, labels) = self.component_labels();
        let mut has_leaf = vec![false; count];
        for leaf in 0..l {
            has_leaf[labels[leaf]] = true;
        }
        for k in 0..n {
            if !has_leaf[labels[l + k]] {
                return Err(Error::structure(
                    format!("node {}", l + k),
                    "component without legs",
                ));
            }
        }
        Ok(())
    }

    /// Canonical representative: nodes renumbered and rotated in order of
    /// discovery from the leaves.
    pub fn canonical(&self) -> Diagram {
        let l = self.leaf_count();
        let n = self.node_count();
        let mut new_id = vec![usize::MAX; n];
        let mut entry = vec![0usize; n];
        let mut order = Vec::with_capacity(n);
        let visit = |h: usize, new_id: &mut Vec<usize>, entry: &mut Vec<usize>, order: &mut Vec<usize>| {
            if h >= l {
                let k = (h - l) / 3;
                if new_id[k] == usize::MAX {
                    new_id[k] = order.len();
                    entry[k] = (h - l) % 3;
                    order.push(k);
                }
            }
        };
        for leaf in 0..l {
            visit(self.pairing[leaf] as usize, &mut new_id, &mut entry, &mut order);
        }
        let mut head = 0;
        while head < order.len() {
            let k = order[head];
            head += 1;
            for t in 1..3 {
                let h = l + 3 * k + (entry[k] + t) % 3;
                visit(self.pairing[h] as usize, &mut new_id, &mut entry, &mut order);
            }
        }
        debug_assert_eq!(order.len(), n, "legless component");
        let map = |h: usize| -> usize {
            if h < l {
                h
            } else {
                let k = (h - l) / 3;
                let slot = ((h - l) % 3 + 3 - entry[k]) % 3;
                l + 3 * new_id[k] + slot
            }
        };
        let mut pairing = vec![0u16; self.pairing.len()];
        for h in 0..self.pairing.len() {
            pairing[map(h)] = map(self.pairing[h] as usize) as u16;
        }
        Diagram {
            legs: self.legs.clone(),
            nodes: self.nodes,
            pairing,
        }
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    /// Deterministic byte string; equal for isomorphic diagrams.
    pub fn encoding(&self) -> Vec<u8> {
        let c = self.canonical();
        let mut out = Vec::with_capacity(4 + 2 * (c.legs.len() + c.pairing.len()));
        out.extend_from_slice(&(c.legs.len() as u16).to_be_bytes());
        for &x in &c.legs {
            out.extend_from_slice(&x.to_be_bytes());
        }
        out.extend_from_slice(&c.nodes.to_be_bytes());
        for &x in &c.pairing {
            out.extend_from_slice(&x.to_be_bytes());
        }
        out
    }

    /// Connected components: `(count, label per vertex)`, labels numbered in
    /// order of first appearance along the vertex list.
    pub fn component_labels(&self) -> (usize, Vec<usize>) {
        let verts = self.leaf_count() + self.node_count();
        let mut parent: Vec<usize> = (0..verts).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for h in 0..self.pairing.len() {
            let a = find(&mut parent, self.vertex_of(h));
            let b = find(&mut parent, self.vertex_of(self.pairing[h] as usize));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut label = vec![usize::MAX; verts];
        let mut root_label: BTreeMap<usize, usize> = BTreeMap::new();
        for v in 0..verts {
            let r = find(&mut parent, v);
            let next = root_label.len();
            label[v] = *root_label.entry(r).or_insert(next);
        }
        (root_label.len(), label)
    }

    /// Number of connected components.
    pub fn size(&self) -> usize {
        self.component_labels().0
    }

    pub fn edge_count(&self) -> usize {
        self.pairing.len() / 2
    }

    pub fn is_forest(&self) -> bool {
        let verts = self.leaf_count() + self.node_count();
        self.edge_count() + self.size() == verts
    }

    pub fn is_tree(&self) -> bool {
        self.is_forest() && self.size() == 1
    }

    pub fn is_chord_diagram(&self) -> bool {
        self.nodes == 0
    }

    /// A chord whose endpoints sit next to each other on one strand.
    pub fn has_isolated_chord(&self) -> bool {
        let mut offset = 0;
        for &c in &self.legs {
            for p in 0..(c as usize).saturating_sub(1) {
                if self.pairing[offset + p] as usize == offset + p + 1 {
                    return true;
                }
            }
            offset += c as usize;
        }
        false
    }

    /// Leaves adjacent to a node: the places where STU can break the diagram.
    pub fn breakable_legs(&self) -> Vec<usize> {
        let l = self.leaf_count();
        (0..l).filter(|&i| self.pairing[i] as usize >= l).collect()
    }

    /// Node-to-node edges as `(half, half)` with the first half smaller.
    pub fn internal_edges(&self) -> Vec<(usize, usize)> {
        let l = self.leaf_count();
        (l..self.pairing.len())
            .filter(|&h| {
                let p = self.pairing[h] as usize;
                p >= l && h < p
            })
            .map(|h| (h, self.pairing[h] as usize))
            .collect()
    }

    /// Vertical concatenation with `upper` above `lower`.
    pub fn stack(upper: &Diagram, lower: &Diagram) -> Result<Diagram> {
        if upper.strand_count() != lower.strand_count() {
            return Err(Error::StrandMismatch {
                left: upper.strand_count(),
                right: lower.strand_count(),
            });
        }
        let mut draft = Draft::new(upper.strand_count());
        let lo = draft.absorb(lower);
        let up = draft.absorb(upper);
        for j in 0..upper.strand_count() {
            let mut s = lo.strands[j].clone();
            s.extend_from_slice(&up.strands[j]);
            draft.strands[j] = s;
        }
        Ok(draft.finish())
    }

    /// The product of several diagrams, first factor on top.
    pub fn product(factors: &[&Diagram], m: usize) -> Diagram {
        let mut acc = Diagram::empty(m);
        for f in factors.iter().rev() {
            acc = Diagram::stack(f, &acc).expect("strand counts agree");
        }
        acc
    }

    /// Break the node adjacent to `leaf` by STU. Returns `(F_eq, F_cross)`:
    /// with the node's cyclic triple read as `(leg, a, b)`, `F_eq` attaches `a`
    /// at the lower of the two new positions and `b` at the upper one,
    /// `F_cross` the other way round. The broken diagram equals
    /// `F_eq - F_cross` under STU.
    pub fn break_leg(&self, leaf: usize) -> Option<(Diagram, Diagram)> {
        let l = self.leaf_count();
        let h = self.pairing[leaf] as usize;
        if h < l {
            return None;
        }
        let k = (h - l) / 3;
        let slot = (h - l) % 3;
        let a = self.pairing[l + 3 * k + (slot + 1) % 3] as usize;
        let b = self.pairing[l + 3 * k + (slot + 2) % 3] as usize;
        let (strand, pos) = self.leaf_position(leaf);
        let build = |lower_to: usize, upper_to: usize| {
            let mut d = Draft::from_diagram(self);
            d.nodes[k] = None;
            let upper = d.fresh();
            d.strands[strand].insert(pos + 1, upper);
            d.link(leaf as u32, lower_to as u32);
            d.link(upper, upper_to as u32);
            d.finish()
        };
        Some((build(a, b), build(b, a)))
    }

    /// Merge the legs at `pos` and `pos + 1` on `strand` into a new node whose
    /// cyclic triple is `(new leg, lower partner, upper partner)`.
    pub fn join_legs(&self, strand: usize, pos: usize) -> Result<Diagram> {
        if pos + 1 >= self.legs[strand] as usize {
            return Err(Error::Domain(format!("no leg pair at strand {strand} position {pos}")));
        }
        let x = self.leaf_at(strand, pos);
        let y = x + 1;
        if self.pairing[x] as usize == y {
            return Err(Error::Domain("legs form a single chord".into()));
        }
        let alpha = self.pairing[x];
        let beta = self.pairing[y];
        let mut d = Draft::from_diagram(self);
        d.strands[strand].remove(pos + 1);
        d.partner[y] = NONE;
        let c0 = d.fresh();
        let c1 = d.fresh();
        let c2 = d.fresh();
        d.nodes.push(Some([c0, c1, c2]));
        d.link(x as u32, c0);
        d.link(alpha as u32, c1);
        d.link(beta as u32, c2);
        Ok(d.finish())
    }

    /// Exchange the legs at `pos` and `pos + 1` on `strand`.
    pub fn swap_legs(&self, strand: usize, pos: usize) -> Diagram {
        let mut d = Draft::from_diagram(self);
        d.strands[strand].swap(pos, pos + 1);
        d.finish()
    }

    /// Reverse the cyclic order at node `k`.
    pub fn flip_node(&self, k: usize) -> Diagram {
        let mut d = Draft::from_diagram(self);
        let t = d.nodes[k].expect("node exists");
        d.nodes[k] = Some([t[0], t[2], t[1]]);
        d.finish()
    }

    /// Half-edges of node `k` starting at `first_slot`, in cyclic order.
    pub fn node_slots(&self, k: usize, first_slot: usize) -> [usize; 3] {
        let base = self.leaf_count() + 3 * k;
        [
            base + first_slot % 3,
            base + (first_slot + 1) % 3,
            base + (first_slot + 2) % 3,
        ]
    }

    /// The subdiagram made of the components whose labels satisfy `keep`.
    pub fn subdiagram(&self, labels: &[usize], keep: impl Fn(usize) -> bool) -> Diagram {
        let l = self.leaf_count();
        let mut d = Draft::from_diagram(self);
        for s in d.strands.iter_mut() {
            s.retain(|&h| keep(labels[h as usize]));
        }
        for k in 0..self.node_count() {
            if !keep(labels[l + k]) {
                d.nodes[k] = None;
            }
        }
        d.finish()
    }

    /// Split into components. Components are labelled in order of their
    /// first leaf along the global leaf order; `words[j][p]` is the label of
    /// the leaf at position `p` on strand `j`.
    pub fn split(&self) -> (Vec<Diagram>, Vec<Vec<u8>>) {
        let (count, labels) = self.component_labels();
        let parts = (0..count)
            .map(|c| self.subdiagram(&labels, |x| x == c))
            .collect();
        let mut words = Vec::with_capacity(self.strand_count());
        let mut offset = 0;
        for &c in &self.legs {
            words.push((0..c as usize).map(|p| labels[offset + p] as u8).collect());
            offset += c as usize;
        }
        (parts, words)
    }

    /// Inverse of [`Diagram::split`]: interleave the given components
    /// according to `words` (the k-th occurrence of label `i` on strand `j` is
    /// the k-th leg of `parts[i]` on that strand).
    pub fn assemble(parts: &[Diagram], words: &[Vec<u8>]) -> Result<Diagram> {
        let m = words.len();
        let mut draft = Draft::new(m);
        let placed: Vec<Placed> = parts.iter().map(|p| draft.absorb(p)).collect();
        for j in 0..m {
            let mut cursor = vec![0usize; parts.len()];
            let mut strand = Vec::with_capacity(words[j].len());
            for &letter in &words[j] {
                let i = letter as usize;
                let src = placed
                    .get(i)
                    .and_then(|p| p.strands[j].get(cursor[i]))
                    .ok_or_else(|| Error::Domain(format!("word on strand {j} does not match the components")))?;
                strand.push(*src);
                cursor[i] += 1;
            }
            for (i, p) in placed.iter().enumerate() {
                if cursor[i] != p.strands[j].len() {
                    return Err(Error::Domain(format!("word on strand {j} does not match the components")));
                }
            }
            draft.strands[j] = strand;
        }
        Ok(draft.finish())
    }

    /// Number of legs of this diagram on each strand (alias used by graph code).
    pub fn leg_counts(&self) -> Vec<usize> {
        self.legs.iter().map(|&x| x as usize).collect()
    }
}

/// Component summary used by [`DiagramClass`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentInfo {
    pub leaves: Vec<usize>,
    pub nodes: Vec<usize>,
}

/// A canonical diagram together with its isomorphism invariants.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagramClass {
    pub diagram: Diagram,
    pub encoding: Vec<u8>,
    pub degree: usize,
    pub size: usize,
    pub components: Vec<ComponentInfo>,
}

/// Validate and canonicalise.
pub fn canonicalize(d: &Diagram) -> Result<DiagramClass> {
    d.validate()?;
    let c = d.canonical();
    let (count, labels) = c.component_labels();
    let l = c.leaf_count();
    let mut components = vec![
        ComponentInfo {
            leaves: Vec::new(),
            nodes: Vec::new()
        };
        count
    ];
    for (v, &lab) in labels.iter().enumerate() {
        if v < l {
            components[lab].leaves.push(v);
        } else {
            components[lab].nodes.push(v);
        }
    }
    Ok(DiagramClass {
        encoding: c.encoding(),
        degree: c.degree(),
        size: count,
        components,
        diagram: c,
    })
}

fn offsets(legs: &[u16]) -> Vec<usize> {
    let mut out = Vec::with_capacity(legs.len());
    let mut acc = 0;
    for &c in legs {
        out.push(acc);
        acc += c as usize;
    }
    out
}

/// Mutable working copy with stable half-edge ids.
pub(crate) struct Draft {
    pub strands: Vec<Vec<u32>>,
    pub nodes: Vec<Option<[u32; 3]>>,
    pub partner: Vec<u32>,
}

pub(crate) struct Placed {
    strands: Vec<Vec<u32>>,
}

impl Draft {
    pub fn new(m: usize) -> Draft {
        Draft {
            strands: vec![Vec::new(); m],
            nodes: Vec::new(),
            partner: Vec::new(),
        }
    }

    pub fn from_diagram(d: &Diagram) -> Draft {
        let mut draft = Draft::new(d.strand_count());
        let placed = draft.absorb(d);
        draft.strands = placed.strands;
        draft
    }

    /// Copy `d`'s half-edges into this draft without placing its leaves.
    pub fn absorb(&mut self, d: &Diagram) -> Placed {
        let base = self.partner.len() as u32;
        for &p in &d.pairing {
            self.partner.push(base + p as u32);
        }
        let l = d.leaf_count() as u32;
        for k in 0..d.node_count() as u32 {
            let h = base + l + 3 * k;
            self.nodes.push(Some([h, h + 1, h + 2]));
        }
        let mut strands = Vec::with_capacity(d.strand_count());
        let mut next = base;
        for &c in &d.legs {
            strands.push((next..next + c as u32).collect());
            next += c as u32;
        }
        Placed { strands }
    }

    pub fn fresh(&mut self) -> u32 {
        self.partner.push(NONE);
        (self.partner.len() - 1) as u32
    }

    pub fn link(&mut self, a: u32, b: u32) {
        self.partner[a as usize] = b;
        self.partner[b as usize] = a;
    }

    pub fn finish(&self) -> Diagram {
        let mut map = vec![NONE; self.partner.len()];
        let mut next = 0u32;
        let mut legs = Vec::with_capacity(self.strands.len());
        for s in &self.strands {
            legs.push(s.len() as u16);
            for &h in s {
                map[h as usize] = next;
                next += 1;
            }
        }
        let mut nodes = 0u16;
        for t in self.nodes.iter().flatten() {
            for &h in t {
                map[h as usize] = next;
                next += 1;
            }
            nodes += 1;
        }
        let mut pairing = vec![0u16; next as usize];
        for (old, &new) in map.iter().enumerate() {
            if new != NONE {
                let p = self.partner[old];
                debug_assert!(p != NONE && map[p as usize] != NONE, "unpaired half-edge");
                pairing[new as usize] = map[p as usize] as u16;
            }
        }
        let d = Diagram {
            legs,
            nodes,
            pairing,
        };
        debug_assert!(d.validate().is_ok(), "{:?}", d.validate());
        d.canonical()
    }
}

// ---------------------------------------------------------------------------
// Text and JSON encodings

fn slot_ref(d: &Diagram, h: usize) -> String {
    match d.end(h) {
        End::Leaf(i) => i.to_string(),
        End::Node { node, slot } => format!("{}.{}", d.leaf_count() + node, slot),
    }
}

impl fmt::Display for Diagram {
    /// `m; strand j: [leaf ids]; node v: (r0,r1,r2); chord (a,b)`.
    /// Leaves are `0..L` in strand order, nodes `L..`; a reference is a leaf
    /// id or `node.slot`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.strand_count())?;
        let mut offset = 0;
        for (j, &c) in self.legs.iter().enumerate() {
            let ids: Vec<String> = (offset..offset + c as usize).map(|i| i.to_string()).collect();
            write!(f, "; strand {}: [{}]", j, ids.join(","))?;
            offset += c as usize;
        }
        let l = self.leaf_count();
        for k in 0..self.node_count() {
            let r: Vec<String> = (0..3).map(|s| slot_ref(self, self.partner(l + 3 * k + s))).collect();
            write!(f, "; node {}: ({})", l + k, r.join(","))?;
        }
        for a in 0..l {
            let b = self.partner(a);
            if b < l && a < b {
                write!(f, "; chord ({a},{b})")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Diagram({self})")
    }
}

/// Reference to a half-edge in user-facing encodings.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Ref {
    Vertex(u64),
    Slot(u64, usize),
}

fn parse_ref(s: &str) -> Result<Ref> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad reference `{s}`"));
    match s.split_once('.') {
        Some((v, k)) => {
            let v = v.trim().parse().map_err(|_| bad())?;
            let k: usize = k.trim().parse().map_err(|_| bad())?;
            if k > 2 {
                return Err(bad());
            }
            Ok(Ref::Slot(v, k))
        }
        None => Ok(Ref::Vertex(s.parse().map_err(|_| bad())?)),
    }
}

/// JSON form: `{"strands": m, "legs": [[ids]], "nodes": [{"id": v, "cyclic": [refs]}], "chords": [[a,b]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub strands: usize,
    pub legs: Vec<Vec<u64>>,
    #[serde(default)]
    pub nodes: Vec<NodeJson>,
    #[serde(default)]
    pub chords: Vec<[u64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeJson {
    pub id: u64,
    pub cyclic: [String; 3],
}

impl Diagram {
    pub fn to_json(&self) -> DiagramJson {
        let l = self.leaf_count();
        let mut legs = Vec::new();
        let mut offset = 0u64;
        for &c in &self.legs {
            legs.push((offset..offset + c as u64).collect());
            offset += c as u64;
        }
        let nodes = (0..self.node_count())
            .map(|k| NodeJson {
                id: (l + k) as u64,
                cyclic: [0, 1, 2].map(|s| slot_ref(self, self.partner(l + 3 * k + s))),
            })
            .collect();
        let chords = (0..l)
            .filter_map(|a| {
                let b = self.partner(a);
                (b < l && a < b).then_some([a as u64, b as u64])
            })
            .collect();
        DiagramJson {
            strands: self.strand_count(),
            legs,
            nodes,
            chords,
        }
    }

    pub fn from_json(j: &DiagramJson) -> Result<Diagram> {
        let nodes: Vec<(u64, [Ref; 3])> = j
            .nodes
            .iter()
            .map(|n| {
                Ok((
                    n.id,
                    [parse_ref(&n.cyclic[0])?, parse_ref(&n.cyclic[1])?, parse_ref(&n.cyclic[2])?],
                ))
            })
            .collect::<Result<_>>()?;
        let chords: Vec<(u64, u64)> = j.chords.iter().map(|c| (c[0], c[1])).collect();
        from_description(j.strands, &j.legs, &nodes, &chords)
    }

    /// Parse the text encoding produced by `Display`.
    pub fn parse(text: &str) -> Result<Diagram> {
        let mut parts = text.split(';').map(str::trim).filter(|s| !s.is_empty());
        let m: usize = parts
            .next()
            .ok_or_else(|| Error::Parse("empty input".into()))?
            .trim_start_matches("m=")
            .parse()
            .map_err(|_| Error::Parse("strand count".into()))?;
        let mut legs: Vec<Vec<u64>> = vec![Vec::new(); m];
        let mut nodes = Vec::new();
        let mut chords = Vec::new();
        let inner = |s: &str, open: char, close: char| -> Result<Vec<String>> {
            let a = s.find(open).ok_or_else(|| Error::Parse(format!("expected `{open}` in `{s}`")))?;
            let b = s.rfind(close).ok_or_else(|| Error::Parse(format!("expected `{close}` in `{s}`")))?;
            Ok(s[a + 1..b]
                .split(',')
                .map(|x| x.trim().to_string())
                .filter(|x| !x.is_empty())
                .collect())
        };
        for p in parts {
            if let Some(rest) = p.strip_prefix("strand") {
                let (idx, list) = rest.split_once(':').ok_or_else(|| Error::Parse(p.into()))?;
                let j: usize = idx.trim().parse().map_err(|_| Error::Parse(p.into()))?;
                if j >= m {
                    return Err(Error::Parse(format!("strand {j} out of range")));
                }
                legs[j] = inner(list, '[', ']')?
                    .iter()
                    .map(|x| x.parse().map_err(|_| Error::Parse(format!("leaf id `{x}`"))))
                    .collect::<Result<_>>()?;
            } else if let Some(rest) = p.strip_prefix("node") {
                let (idx, triple) = rest.split_once(':').ok_or_else(|| Error::Parse(p.into()))?;
                let v: u64 = idx.trim().parse().map_err(|_| Error::Parse(p.into()))?;
                let refs = inner(triple, '(', ')')?;
                if refs.len() != 3 {
                    return Err(Error::structure(format!("node {v}"), "wrong valence"));
                }
                nodes.push((v, [parse_ref(&refs[0])?, parse_ref(&refs[1])?, parse_ref(&refs[2])?]));
            } else if let Some(rest) = p.strip_prefix("chord") {
                let ends = inner(rest, '(', ')')?;
                if ends.len() != 2 {
                    return Err(Error::Parse(p.into()));
                }
                let a = ends[0].parse().map_err(|_| Error::Parse(p.into()))?;
                let b = ends[1].parse().map_err(|_| Error::Parse(p.into()))?;
                chords.push((a, b));
            } else {
                return Err(Error::Parse(format!("unknown clause `{p}`")));
            }
        }
        from_description(m, &legs, &nodes, &chords)
    }
}

/// Resolve a vertex/slot description into a validated canonical diagram.
fn from_description(
    m: usize,
    legs: &[Vec<u64>],
    nodes: &[(u64, [Ref; 3])],
    chords: &[(u64, u64)],
) -> Result<Diagram> {
    if legs.len() != m {
        return Err(Error::Parse(format!("expected {m} strands, got {}", legs.len())));
    }
    let mut leaf_index = BTreeMap::new();
    let mut count = 0usize;
    for strand in legs {
        for &id in strand {
            if leaf_index.insert(id, count).is_some() {
                return Err(Error::structure(format!("leaf {id}"), "listed twice"));
            }
            count += 1;
        }
    }
    let l = count;
    let mut node_index = BTreeMap::new();
    for (k, (id, _)) in nodes.iter().enumerate() {
        if leaf_index.contains_key(id) || node_index.insert(*id, k).is_some() {
            return Err(Error::structure(format!("node {id}"), "duplicate vertex id"));
        }
    }
    let half = |v: u64, k: usize| -> Result<usize> {
        node_index
            .get(&v)
            .map(|&i| l + 3 * i + k)
            .ok_or_else(|| Error::structure(format!("node {v}"), "dangling edge"))
    };
    let mut pairing = vec![u16::MAX; l + 3 * nodes.len()];
    let set = |a: usize, b: usize, who: String, pairing: &mut Vec<u16>| -> Result<()> {
        for (x, y) in [(a, b), (b, a)] {
            if pairing[x] != u16::MAX && pairing[x] as usize != y {
                return Err(Error::structure(who.clone(), "vertex has too many edges"));
            }
            pairing[x] = y as u16;
        }
        Ok(())
    };
    for &(a, b) in chords {
        let ia = *leaf_index.get(&a).ok_or_else(|| Error::structure(format!("leaf {a}"), "dangling edge"))?;
        let ib = *leaf_index.get(&b).ok_or_else(|| Error::structure(format!("leaf {b}"), "dangling edge"))?;
        set(ia, ib, format!("leaf {a}"), &mut pairing)?;
    }
    // slot refs first, then bare vertex refs
    for (k, (id, refs)) in nodes.iter().enumerate() {
        for (s, r) in refs.iter().enumerate() {
            let me = l + 3 * k + s;
            match r {
                Ref::Slot(v, t) => set(me, half(*v, *t)?, format!("node {id}"), &mut pairing)?,
                Ref::Vertex(v) => {
                    if let Some(&i) = leaf_index.get(v) {
                        set(me, i, format!("node {id}"), &mut pairing)?;
                    }
                }
            }
        }
    }
    for (k, (id, refs)) in nodes.iter().enumerate() {
        for (s, r) in refs.iter().enumerate() {
            let me = l + 3 * k + s;
            if let Ref::Vertex(v) = r {
                if leaf_index.contains_key(v) || pairing[me] != u16::MAX {
                    continue;
                }
                let j = *node_index
                    .get(v)
                    .ok_or_else(|| Error::structure(format!("node {id}"), format!("dangling edge to {v}")))?;
                let candidates: Vec<usize> = (0..3)
                    .filter(|&t| {
                        let other = l + 3 * j + t;
                        pairing[other] == u16::MAX
                            && match &nodes[j].1[t] {
                                Ref::Vertex(w) => *w == *id,
                                Ref::Slot(w, ss) => *w == *id && *ss == s,
                            }
                            && other != me
                    })
                    .collect();
                match candidates.as_slice() {
                    [t] => set(me, l + 3 * j + t, format!("node {id}"), &mut pairing)?,
                    [] => return Err(Error::structure(format!("node {id}"), format!("edge to {v} not reciprocated"))),
                    _ => return Err(Error::structure(format!("node {id}"), "ambiguous multi-edge; use slot references")),
                }
            }
        }
    }
    for (h, &p) in pairing.iter().enumerate() {
        if p == u16::MAX {
            let who = if h < l {
                let id = leaf_index.iter().find(|(_, &i)| i == h).map(|(id, _)| *id).unwrap_or(0);
                format!("leaf {id}")
            } else {
                format!("node {}", nodes[(h - l) / 3].0)
            };
            return Err(Error::structure(who, "wrong valence (missing edge)"));
        }
    }
    let leg_counts = legs.iter().map(|s| s.len() as u16).collect();
    let d = Diagram {
        legs: leg_counts,
        nodes: nodes.len() as u16,
        pairing,
    };
    d.validate().map_err(|e| match e {
        Error::Structure { vertex, reason } => {
            // translate internal vertex numbering back to user ids
            let translated = vertex
                .strip_prefix("node ")
                .and_then(|x| x.parse::<usize>().ok())
                .filter(|&x| x >= l)
                .map(|x| format!("node {}", nodes[x - l].0))
                .or_else(|| {
                    vertex
                        .strip_prefix("leaf ")
                        .and_then(|x| x.parse::<usize>().ok())
                        .and_then(|x| leaf_index.iter().find(|(_, &i)| i == x).map(|(id, _)| format!("leaf {id}")))
                })
                .unwrap_or(vertex);
            Error::Structure {
                vertex: translated,
                reason,
            }
        }
        other => other,
    })?;
    Ok(d.canonical())
}

// ---------------------------------------------------------------------------
// Small constructors used throughout the crate and its tests.

/// A tree with a single node (tripod) whose three legs sit at the given
/// `(strand, pos)` places, in counterclockwise order around the node.
pub fn tripod(legs: &[u16], places: [(usize, usize); 3]) -> Result<Diagram> {
    let l: usize = legs.iter().map(|&x| x as usize).sum();
    let offs = offsets(legs);
    let mut pairing = vec![u16::MAX; l + 3];
    for (s, &(j, p)) in places.iter().enumerate() {
        if j >= legs.len() || p >= legs[j] as usize {
            return Err(Error::structure(format!("leg ({j},{p})"), "outside strand"));
        }
        let leaf = offs[j] + p;
        pairing[leaf] = (l + s) as u16;
        pairing[l + s] = leaf as u16;
    }
    Diagram::from_parts(legs.to_vec(), 1, pairing)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chord11() -> Diagram {
        Diagram::chords(&[2], &[((0, 0), (0, 1))]).unwrap()
    }

    #[test]
    fn single_chord_degree_and_size() {
        let c = canonicalize(&chord11()).unwrap();
        assert_eq!(c.degree, 1);
        assert_eq!(c.size, 1);
        assert!(chord11().is_tree());
    }

    #[test]
    fn relabeled_tripod_same_encoding() {
        // a degree-3 tree with two nodes, written with the nodes in both orders
        let a = Diagram::parse("1; strand 0: [0,1,2,3]; node 4: (0,1,5.0); node 5: (4.2,2,3)").unwrap();
        let b = Diagram::parse("1; strand 0: [0,1,2,3]; node 5: (0,1,4.2); node 4: (2,3,5.2)").unwrap();
        assert_eq!(a.encoding(), b.encoding());
        assert_eq!(a.degree(), 3);
    }

    #[test]
    fn chord_plus_tripod() {
        let d = Diagram::parse("1; strand 0: [0,1,2,3,4]; node 5: (0,2,4); chord (1,3)").unwrap();
        let c = canonicalize(&d).unwrap();
        assert_eq!(c.degree, 3);
        assert_eq!(c.size, 2);
        assert!(d.is_forest());
        assert!(!d.is_tree());
    }

    #[test]
    fn forest_and_tree_predicates() {
        let t = tripod(&[3], [(0, 0), (0, 1), (0, 2)]).unwrap();
        assert!(t.is_tree());
        let cc = Diagram::chords(&[4], &[((0, 0), (0, 1)), ((0, 2), (0, 3))]).unwrap();
        assert!(cc.is_forest() && !cc.is_tree());
        // two nodes joined by a double edge, one leg each
        let bubble = Diagram::parse("1; strand 0: [0,1]; node 2: (0,3.2,3.1); node 3: (1,2.2,2.1)").unwrap();
        assert!(!bubble.is_forest());
        assert_eq!(bubble.degree(), 2);
    }

    #[test]
    fn isolated_chords() {
        assert!(chord11().has_isolated_chord());
        let across = Diagram::chords(&[1, 1], &[((0, 0), (1, 0))]).unwrap();
        assert!(!across.has_isolated_chord());
        let d = Diagram::parse("1; strand 0: [0,1,2,3,4]; node 5: (1,3,4); chord (0,2)").unwrap();
        assert!(!d.has_isolated_chord());
    }

    #[test]
    fn stack_unit_and_degrees() {
        let c = Diagram::chords(&[1, 1], &[((0, 0), (1, 0))]).unwrap();
        let e = Diagram::empty(2);
        assert_eq!(Diagram::stack(&e, &c).unwrap(), c);
        assert_eq!(Diagram::stack(&c, &e).unwrap(), c);
        let cc = Diagram::stack(&c, &c).unwrap();
        assert_eq!(cc.degree(), 2);
        assert_eq!(cc.size(), 2);
        assert_eq!(cc.legs_per_strand(), &[2, 2]);
        assert!(Diagram::stack(&c, &chord11()).is_err());
    }

    #[test]
    fn stacking_order_matters_for_interleavings() {
        // brute force over all degree-1 trees on two strands
        let trees = [
            Diagram::chords(&[2, 0], &[((0, 0), (0, 1))]).unwrap(),
            Diagram::chords(&[1, 1], &[((0, 0), (1, 0))]).unwrap(),
            Diagram::chords(&[0, 2], &[((1, 0), (1, 1))]).unwrap(),
        ];
        let mut distinct = 0;
        for a in &trees {
            for b in &trees {
                let ab = Diagram::stack(a, b).unwrap();
                let ba = Diagram::stack(b, a).unwrap();
                let same_strand_only = a.legs_per_strand().iter().zip(b.legs_per_strand()).filter(|(x, y)| **x > 0 && **y > 0).count() == 0;
                if a == b || same_strand_only {
                    assert_eq!(ab, ba);
                } else if ab != ba {
                    distinct += 1;
                }
            }
        }
        // (11,12),(12,11),(12,22),(22,12)
        assert_eq!(distinct, 4);
    }

    #[test]
    fn malformed_inputs_name_the_vertex() {
        let e = Diagram::parse("1; strand 0: [0,1]; node 7: (0,1,1)").unwrap_err();
        assert!(matches!(e, Error::Structure { .. }), "{e}");
        let e = Diagram::parse("1; strand 0: [0,1,2]; node 7: (0,1,9)").unwrap_err();
        match e {
            Error::Structure { vertex, .. } => assert_eq!(vertex, "node 7"),
            other => panic!("{other}"),
        }
        let e = Diagram::parse("1; strand 0: [0,1,2]; node 7: (0,1)").unwrap_err();
        assert!(matches!(e, Error::Structure { .. }));
        // a leaf with no edge
        let e = Diagram::parse("1; strand 0: [0,1,2]; chord (0,1)").unwrap_err();
        match e {
            Error::Structure { vertex, .. } => assert_eq!(vertex, "leaf 2"),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn text_and_json_round_trip() {
        let d = Diagram::parse("2; strand 0: [0,1,2]; strand 1: [3]; node 5: (0,6.0,3); node 6: (5.1,1,2)").unwrap();
        let text = d.to_string();
        assert_eq!(Diagram::parse(&text).unwrap(), d);
        assert_eq!(Diagram::parse(&text).unwrap().to_string(), text);
        let j = serde_json::to_string(&d.to_json()).unwrap();
        let back: DiagramJson = serde_json::from_str(&j).unwrap();
        assert_eq!(Diagram::from_json(&back).unwrap(), d);
        assert_eq!(serde_json::to_string(&Diagram::from_json(&back).unwrap().to_json()).unwrap(), j);
    }

    #[test]
    fn break_and_join_are_inverse() {
        let t = tripod(&[3], [(0, 0), (0, 1), (0, 2)]).unwrap();
        let (eq, cross) = t.break_leg(0).unwrap();
        assert!(eq.is_chord_diagram() && cross.is_chord_diagram());
        assert_eq!(eq.legs_per_strand(), &[4]);
        assert_eq!(eq.join_legs(0, 0).unwrap(), t);
        // joining the crossed version gives the reversed node
        assert_eq!(cross.join_legs(0, 0).unwrap(), t.flip_node(0));
    }

    #[test]
    fn split_then_assemble() {
        let d = Diagram::parse("2; strand 0: [0,1,2,3]; strand 1: [4,5]; node 6: (0,2,4); chord (1,5); chord (3,3)").err();
        assert!(d.is_some());
        let d = Diagram::parse("2; strand 0: [0,1,2,3]; strand 1: [4,5]; node 6: (0,2,4); chord (1,5)").err();
        assert!(d.is_some(), "leaf 3 is unpaired");
        let d = Diagram::parse("2; strand 0: [0,1,2,3]; strand 1: [4,5,7]; node 6: (0,2,4); chord (1,5); chord (3,7)").unwrap();
        let (parts, words) = d.split();
        assert_eq!(parts.len(), 3);
        assert_eq!(Diagram::assemble(&parts, &words).unwrap(), d);
    }
}

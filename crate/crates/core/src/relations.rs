//! Relation sets as explicit rational vectors.
//!
//! Sign conventions (all checked downstream by requiring every relation to
//! vanish in the quotient of all diagrams by STU):
//!
//! * STU: a node with cyclic triple `(leg, a, b)` satisfies `Y = F_eq - F_cross`,
//!   where `F_eq` attaches `a` at the lower new leg.
//! * Slide edge `F -> F'` at adjacent legs: the Y-diagram obtained by joining
//!   those legs in `F'` with triple `(new leg, lower partner, upper partner)`,
//!   so that `F' - F = Y`.
//! * IHX (Jacobi form): with `u = (e, A, B)` and `v = (e, C, D)` around an
//!   internal edge `e`, the three diagrams obtained by cycling `A, B, C` sum
//!   to zero.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagram::{Diagram, Draft};
use crate::enumerate::{cached, Shape, SizeFilter};
use crate::error::Result;
use crate::linalg::{LinComb, RationalVector, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RelKind {
    OneT,
    AS,
    IHX,
    STU,
    FourT,
    STU2,
    Square,
    Hex,
}

impl fmt::Display for RelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            RelKind::OneT => "1T",
            RelKind::AS => "AS",
            RelKind::IHX => "IHX",
            RelKind::STU => "STU",
            RelKind::FourT => "4T",
            RelKind::STU2 => "STU2",
            RelKind::Square => "SQUARE",
            RelKind::Hex => "HEX",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for RelKind {
    type Err = crate::error::Error;
    fn from_str(s: &str) -> Result<RelKind> {
        Ok(match s.to_ascii_uppercase().as_str() {
            "1T" => RelKind::OneT,
            "AS" => RelKind::AS,
            "IHX" => RelKind::IHX,
            "STU" => RelKind::STU,
            "4T" => RelKind::FourT,
            "STU2" => RelKind::STU2,
            "SQUARE" => RelKind::Square,
            "HEX" | "HEXAGON" => RelKind::Hex,
            _ => return Err(crate::error::Error::InvalidSpec(format!("unknown relation kind {s}"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct RelationSet {
    pub kind: RelKind,
    pub strands: usize,
    pub degree: usize,
    pub vectors: Vec<RationalVector>,
    /// Where each vector came from, aligned with `vectors`.
    pub provenance: Vec<String>,
}

impl RelationSet {
    fn collect(kind: RelKind, strands: usize, degree: usize, items: Vec<(RationalVector, String)>) -> RelationSet {
        let (vectors, provenance) = items.into_iter().filter(|(v, _)| !v.is_zero()).unzip();
        RelationSet {
            kind,
            strands,
            degree,
            vectors,
            provenance,
        }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &RationalVector> {
        self.vectors.iter()
    }

    /// Sizes of the diagrams in the support.
    pub fn support_sizes(&self) -> BTreeSet<usize> {
        self.vectors.iter().flat_map(|v| v.keys().map(|d| d.size())).collect()
    }
}

fn one() -> Q {
    Q::one()
}

fn minus() -> Q {
    -Q::one()
}

fn unit(d: Diagram) -> RationalVector {
    LinComb::unit(d)
}

fn shape_of(basis: &[Diagram]) -> (usize, usize) {
    basis.first().map_or((0, 0), |d| (d.strand_count(), d.degree()))
}

/// The STU difference `F_eq - F_cross` at a leg adjacent to a node.
pub fn stu_difference(d: &Diagram, leaf: usize) -> Option<RationalVector> {
    let (eq, cross) = d.break_leg(leaf)?;
    Some(LinComb::from_terms([(eq, one()), (cross, minus())]))
}

/// Edge vector of the slide of the legs at `pos`, `pos + 1` on `strand`
/// starting from `target`'s neighbour: the Y-diagram on `target` itself.
pub fn join_vector(target: &Diagram, strand: usize, pos: usize) -> Result<RationalVector> {
    Ok(unit(target.join_legs(strand, pos)?))
}

/// Relations of `kind` in degree `n` with the ambient list they are written
/// over: all diagrams for STU, chord diagrams for 4T, and size-`size`
/// forests otherwise.
pub fn generate(kind: RelKind, m: usize, n: usize, size: usize) -> Result<(Arc<Vec<Diagram>>, RelationSet)> {
    let forests = || cached(m, n, Shape::Forest, SizeFilter::Exact(size));
    Ok(match kind {
        RelKind::STU => {
            let all = cached(m, n, Shape::All, SizeFilter::Any)?;
            let r = stu(&all);
            (all, r)
        }
        RelKind::FourT => (cached(m, n, Shape::Chord, SizeFilter::Any)?, four_t(m, n)?),
        RelKind::OneT => {
            let f = forests()?;
            let r = one_t(&f);
            (f, r)
        }
        RelKind::AS => {
            let f = forests()?;
            let r = antisymmetry(&f);
            (f, r)
        }
        RelKind::IHX => {
            let f = forests()?;
            let r = ihx(&f);
            (f, r)
        }
        RelKind::STU2 => (forests()?, stu2(m, n, size)?),
        RelKind::Square => (forests()?, squares(m, n, size)?),
        RelKind::Hex => (forests()?, hexagons(m, n, size)?),
    })
}

// ---------------------------------------------------------------------------

pub fn one_t(basis: &[Diagram]) -> RelationSet {
    let (m, n) = shape_of(basis);
    let items = basis
        .iter()
        .filter(|d| d.has_isolated_chord())
        .map(|d| (unit(d.clone()), format!("isolated chord in {d}")))
        .collect();
    RelationSet::collect(RelKind::OneT, m, n, items)
}

pub fn antisymmetry(basis: &[Diagram]) -> RelationSet {
    let (m, n) = shape_of(basis);
    let items = basis
        .par_iter()
        .flat_map_iter(|d| {
            (0..d.node_count()).map(move |k| {
                let v = unit(d.clone()) + unit(d.flip_node(k));
                (v, format!("node {} of {d}", d.leaf_count() + k))
            })
        })
        .collect();
    RelationSet::collect(RelKind::AS, m, n, items)
}

/// The three Jacobi terms around the internal edge `(hu, hv)`, or `None`
/// when the edge is part of a multiple edge.
pub fn ihx_terms(d: &Diagram, hu: usize, hv: usize) -> Option<[Diagram; 3]> {
    let l = d.leaf_count();
    let (u, su) = ((hu - l) / 3, (hu - l) % 3);
    let (v, sv) = ((hv - l) / 3, (hv - l) % 3);
    let [_, u1, u2] = d.node_slots(u, su);
    let [_, v1, v2] = d.node_slots(v, sv);
    let (a, b, c, e) = (d.partner(u1), d.partner(u2), d.partner(v1), d.partner(v2));
    let owner = |h: usize| if h >= l { Some((h - l) / 3) } else { None };
    if [a, b, c, e].iter().any(|&h| owner(h) == Some(u) || owner(h) == Some(v)) {
        return None;
    }
    let build = |x: usize, y: usize, z: usize| {
        let mut dr = Draft::from_diagram(d);
        dr.link(u1 as u32, x as u32);
        dr.link(u2 as u32, y as u32);
        dr.link(v1 as u32, z as u32);
        dr.link(v2 as u32, e as u32);
        dr.finish()
    };
    Some([build(a, b, c), build(b, c, a), build(c, a, b)])
}

pub fn ihx(basis: &[Diagram]) -> RelationSet {
    let (m, n) = shape_of(basis);
    let items = basis
        .par_iter()
        .flat_map_iter(|d| {
            d.internal_edges().into_iter().filter_map(move |(hu, hv)| {
                let terms = ihx_terms(d, hu, hv)?;
                let v: RationalVector = terms.into_iter().map(|t| (t, one())).collect();
                Some((v, format!("edge {hu}-{hv} of {d}")))
            })
        })
        .collect();
    RelationSet::collect(RelKind::IHX, m, n, items)
}

/// `F_eq - F_cross - D` for every diagram `D` in `basis` and every leg
/// adjacent to a node.
pub fn stu(basis: &[Diagram]) -> RelationSet {
    let (m, n) = shape_of(basis);
    let items = basis
        .par_iter()
        .flat_map_iter(|d| {
            d.breakable_legs().into_iter().map(move |leaf| {
                let v = stu_difference(d, leaf).expect("breakable") - unit(d.clone());
                (v, format!("leg {leaf} of {d}"))
            })
        })
        .collect();
    RelationSet::collect(RelKind::STU, m, n, items)
}

/// Four-term relations generated directly on chord diagrams: for `n - 2`
/// chords and three further points `a, b, c`, the differences
/// `T(a) - T(b)` and `T(b) - T(c)` where `T(x)` doubles `x` and attaches the
/// other two points in the two possible orders.
pub fn four_t(m: usize, n: usize) -> Result<RelationSet> {
    if n < 2 {
        return Ok(RelationSet::collect(RelKind::FourT, m, n, Vec::new()));
    }
    let points = 2 * n - 1;
    let mut items = Vec::new();
    for legs in crate::enumerate::compositions(points, m) {
        let place: Vec<(usize, usize)> = legs
            .iter()
            .enumerate()
            .flat_map(|(j, &c)| (0..c as usize).map(move |p| (j, p)))
            .collect();
        for a in 0..points {
            for b in a + 1..points {
                for c in b + 1..points {
                    let rest: Vec<usize> = (0..points).filter(|&x| x != a && x != b && x != c).collect();
                    for matching in perfect_matchings(&rest) {
                        let t = |x: usize, y: usize, z: usize| -> Result<RationalVector> {
                            // insert a new point right after x on its strand
                            let (sx, px) = place[x];
                            let mut new_legs = legs.clone();
                            new_legs[sx] += 1;
                            let at = |g: usize| -> (usize, usize) {
                                let (s, p) = place[g];
                                if s == sx && p > px {
                                    (s, p + 1)
                                } else {
                                    (s, p)
                                }
                            };
                            let lo = (sx, px);
                            let hi = (sx, px + 1);
                            let mut base: Vec<_> = matching.iter().map(|&(p, q)| (at(p), at(q))).collect();
                            let k = base.len();
                            base.push((lo, at(y)));
                            base.push((hi, at(z)));
                            let eq = Diagram::chords(&new_legs, &base)?;
                            base[k] = (lo, at(z));
                            base[k + 1] = (hi, at(y));
                            let cross = Diagram::chords(&new_legs, &base)?;
                            Ok(LinComb::from_terms([(eq, one()), (cross, minus())]))
                        };
                        let ta = t(a, b, c)?;
                        let tb = t(b, c, a)?;
                        let tc = t(c, a, b)?;
                        let what = format!("points {:?},{:?},{:?} on {:?}", place[a], place[b], place[c], legs);
                        items.push((ta - tb.clone(), what.clone()));
                        items.push((tb - tc, what));
                    }
                }
            }
        }
    }
    Ok(RelationSet::collect(RelKind::FourT, m, n, items))
}

fn perfect_matchings(points: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if points.is_empty() {
        return vec![Vec::new()];
    }
    let first = points[0];
    let mut out = Vec::new();
    for i in 1..points.len() {
        let rest: Vec<usize> = points[1..].iter().copied().filter(|&x| x != points[i]).collect();
        for mut m in perfect_matchings(&rest) {
            m.insert(0, (first, points[i]));
            out.push(m);
        }
    }
    out
}

/// One-cycle diagrams of degree `n` and size `s` obtained by joining two
/// adjacent legs of the same tree of a size-`s` forest.
pub fn one_cycle_templates(m: usize, n: usize, s: usize) -> Result<Vec<Diagram>> {
    let forests = cached(m, n, Shape::Forest, SizeFilter::Exact(s))?;
    let mut found: Vec<Diagram> = forests
        .par_iter()
        .flat_map_iter(|f| {
            let (_, labels) = f.component_labels();
            let mut out = Vec::new();
            for (j, &c) in f.legs_per_strand().iter().enumerate() {
                for p in 0..(c as usize).saturating_sub(1) {
                    let x = f.leaf_at(j, p);
                    if labels[x] == labels[x + 1] && f.partner(x) != x + 1 {
                        out.push(f.join_legs(j, p).expect("adjacent legs"));
                    }
                }
            }
            out
        })
        .collect();
    found.sort();
    found.dedup();
    Ok(found)
}

/// STU² relations among size-`s` forests of degree `n`: for each template
/// (a size `s - 1` forest, or a one-cycle diagram of size `s` with sites on
/// the cycle) and two sites `x, y`, the vector `D(x) - D(y)` where `D` is
/// the STU difference at a site.
pub fn stu2(m: usize, n: usize, s: usize) -> Result<RelationSet> {
    let mut items = Vec::new();
    let push_template = |g: &Diagram, sites: Vec<usize>, items: &mut Vec<(RationalVector, String)>| {
        if sites.len() < 2 {
            return;
        }
        let d0 = stu_difference(g, sites[0]).expect("site");
        for &y in &sites[1..] {
            let v = d0.clone() - stu_difference(g, y).expect("site");
            items.push((v, format!("legs {},{} of {g}", sites[0], y)));
        }
    };
    if s >= 2 {
        let templates = cached(m, n, Shape::Forest, SizeFilter::Exact(s - 1))?;
        for g in templates.iter() {
            push_template(g, g.breakable_legs(), &mut items);
        }
    }
    if s >= 1 && s < n {
        for h in one_cycle_templates(m, n, s)? {
            let sites: Vec<usize> = h
                .breakable_legs()
                .into_iter()
                .filter(|&leaf| h.break_leg(leaf).expect("site").0.is_forest())
                .collect();
            push_template(&h, sites, &mut items);
        }
    }
    Ok(RelationSet::collect(RelKind::STU2, m, n, items))
}

/// Sites `(strand, pos)` where the legs at `pos`, `pos + 1` lie in distinct
/// components.
pub fn slide_sites(f: &Diagram) -> Vec<(usize, usize)> {
    let (_, labels) = f.component_labels();
    let mut out = Vec::new();
    for (j, &c) in f.legs_per_strand().iter().enumerate() {
        for p in 0..(c as usize).saturating_sub(1) {
            let x = f.leaf_at(j, p);
            if labels[x] != labels[x + 1] {
                out.push((j, p));
            }
        }
    }
    out
}

fn commute(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 != b.0 || a.1.abs_diff(b.1) >= 2
}

/// Square relations among size-`s` forests: the vector of every commuting
/// square of slides among size `s + 1` forests.
pub fn squares(m: usize, n: usize, s: usize) -> Result<RelationSet> {
    if s + 1 > n {
        return Ok(RelationSet::collect(RelKind::Square, m, n, Vec::new()));
    }
    let forests = cached(m, n, Shape::Forest, SizeFilter::Exact(s + 1))?;
    let items = forests
        .par_iter()
        .flat_map_iter(|h| {
            let sites = slide_sites(h);
            let mut out = Vec::new();
            for (i, &a) in sites.iter().enumerate() {
                for &b in &sites[i + 1..] {
                    if !commute(a, b) {
                        continue;
                    }
                    let ha = h.swap_legs(a.0, a.1);
                    let hb = h.swap_legs(b.0, b.1);
                    let hab = ha.swap_legs(b.0, b.1);
                    let v = unit(ha.join_legs(a.0, a.1).unwrap()) + unit(hab.join_legs(b.0, b.1).unwrap())
                        - unit(hab.join_legs(a.0, a.1).unwrap())
                        - unit(hb.join_legs(b.0, b.1).unwrap());
                    out.push((v, format!("sites {a:?},{b:?} of {h}")));
                }
            }
            out
        })
        .collect();
    Ok(RelationSet::collect(RelKind::Square, m, n, items))
}

/// Hexagon relations among size-`s` forests: around three consecutive legs
/// of three distinct trees in a size `s + 1` forest, the sum of the six edge
/// vectors of the braiding cycle.
pub fn hexagons(m: usize, n: usize, s: usize) -> Result<RelationSet> {
    if s + 1 > n {
        return Ok(RelationSet::collect(RelKind::Hex, m, n, Vec::new()));
    }
    let forests = cached(m, n, Shape::Forest, SizeFilter::Exact(s + 1))?;
    let items = forests
        .par_iter()
        .flat_map_iter(|h| {
            let (_, labels) = h.component_labels();
            let mut out = Vec::new();
            for (j, &c) in h.legs_per_strand().iter().enumerate() {
                for p in 0..(c as usize).saturating_sub(2) {
                    let x = h.leaf_at(j, p);
                    let (a, b, cc) = (labels[x], labels[x + 1], labels[x + 2]);
                    if a == b || b == cc || a == cc {
                        continue;
                    }
                    out.push((hexagon_vector(h, j, p), format!("legs {p}..{} on strand {j} of {h}", p + 2)));
                }
            }
            out
        })
        .collect();
    Ok(RelationSet::collect(RelKind::Hex, m, n, items))
}

/// Sum of the edge vectors along slides `p, p+1, p, p+1, p, p+1`.
pub fn hexagon_vector(h: &Diagram, strand: usize, p: usize) -> RationalVector {
    let mut cur = h.clone();
    let mut v = RationalVector::zero();
    for step in 0..6 {
        let q = p + step % 2;
        cur = cur.swap_legs(strand, q);
        v = v + unit(cur.join_legs(strand, q).expect("distinct trees"));
    }
    debug_assert_eq!(&cur, h);
    v
}

//! Exhaustive generation of diagram bases up to isomorphism.
//!
//! Leaves are distributed over the strands (every composition of the leaf
//! count), then half-edges are paired by an orderly Wick contraction: the
//! smallest unpaired half-edge is always matched next, and a node that has not
//! been touched yet may only be entered at slot 0 and in increasing node
//! order. That is exactly the discovery order of the canonical form, so every
//! isomorphism class is produced once.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagram::{canonicalize, Diagram, DiagramClass};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Shape {
    Tree,
    Forest,
    Chord,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SizeFilter {
    Exact(usize),
    AtMost(usize),
    Any,
}

impl SizeFilter {
    pub fn admits(&self, s: usize) -> bool {
        match *self {
            SizeFilter::Exact(x) => s == x,
            SizeFilter::AtMost(x) => s <= x,
            SizeFilter::Any => true,
        }
    }
}

pub const DEFAULT_CAP: usize = 2_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnumSpec {
    pub strands: usize,
    pub degree: usize,
    pub size: SizeFilter,
    pub shape: Shape,
    /// Maximum number of diagrams to materialise.
    pub cap: usize,
}

impl EnumSpec {
    pub fn new(strands: usize, degree: usize, shape: Shape) -> EnumSpec {
        EnumSpec {
            strands,
            degree,
            size: SizeFilter::Any,
            shape,
            cap: DEFAULT_CAP,
        }
    }

    pub fn size(mut self, size: SizeFilter) -> EnumSpec {
        self.size = size;
        self
    }

    pub fn cap(mut self, cap: usize) -> EnumSpec {
        self.cap = cap;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.strands == 0 {
            return Err(Error::InvalidSpec("at least one strand is required".into()));
        }
        if self.degree == 0 {
            return Err(Error::InvalidSpec("degree must be positive".into()));
        }
        if self.shape == Shape::Chord && !self.size.admits(self.degree) {
            return Err(Error::InvalidSpec(format!(
                "chord diagrams of degree {} have size {}",
                self.degree, self.degree
            )));
        }
        Ok(())
    }

    /// `(leaves, nodes)` pairs compatible with the spec.
    fn shapes(&self) -> Vec<(usize, usize)> {
        let n = self.degree;
        match self.shape {
            Shape::Chord => vec![(2 * n, 0)],
            Shape::Tree => {
                if self.size.admits(1) {
                    vec![(n + 1, n - 1)]
                } else {
                    Vec::new()
                }
            }
            Shape::Forest => (1..=n)
                .filter(|&s| self.size.admits(s))
                .map(|s| (n + s, n - s))
                .collect(),
            Shape::All => (1..=2 * n).map(|l| (l, 2 * n - l)).collect(),
        }
    }
}

/// All compositions of `total` into `parts` nonnegative parts, in
/// lexicographic order.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<u16>> {
    fn go(rest: usize, parts: usize, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if parts == 1 {
            cur.push(rest as u16);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in 0..=rest {
            cur.push(x as u16);
            go(rest - x, parts - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        go(total, parts, &mut Vec::new(), &mut out);
    }
    out
}

struct Wick<'a> {
    spec: &'a EnumSpec,
    legs: Vec<u16>,
    l: usize,
    n_nodes: usize,
    pairing: Vec<u16>,
    next_fresh: usize,
    acyclic: bool,
    out: Vec<Diagram>,
    budget: usize,
}

const FREE: u16 = u16::MAX;

impl Wick<'_> {
    fn vertex(&self, h: usize) -> usize {
        if h < self.l {
            h
        } else {
            self.l + (h - self.l) / 3
        }
    }

    fn connected(&self, a: usize, b: usize) -> bool {
        // depth-first search over the partial matching
        let verts = self.l + self.n_nodes;
        let mut seen = vec![false; verts];
        let mut stack = vec![a];
        seen[a] = true;
        while let Some(v) = stack.pop() {
            if v == b {
                return true;
            }
            let halves: Vec<usize> = if v < self.l {
                vec![v]
            } else {
                let base = self.l + 3 * (v - self.l);
                vec![base, base + 1, base + 2]
            };
            for h in halves {
                let p = self.pairing[h];
                if p != FREE {
                    let w = self.vertex(p as usize);
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        false
    }

    fn pair(&mut self, a: usize, b: usize) {
        self.pairing[a] = b as u16;
        self.pairing[b] = a as u16;
    }

    fn unpair(&mut self, a: usize, b: usize) {
        self.pairing[a] = FREE;
        self.pairing[b] = FREE;
    }

    fn run(&mut self, from: usize) -> Result<()> {
        let total = self.pairing.len();
        let Some(h) = (from..total).find(|&h| self.pairing[h] == FREE) else {
            return self.emit();
        };
        if h >= self.l && (h - self.l) / 3 >= self.next_fresh {
            // a node no leaf can reach
            return Ok(());
        }
        let my_node = if h >= self.l { Some((h - self.l) / 3) } else { None };
        let mut candidates = Vec::new();
        for p in h + 1..self.l {
            if self.pairing[p] == FREE {
                candidates.push(p);
            }
        }
        for k in 0..self.next_fresh {
            if Some(k) == my_node {
                continue;
            }
            for slot in 0..3 {
                let p = self.l + 3 * k + slot;
                if p > h && self.pairing[p] == FREE {
                    candidates.push(p);
                }
            }
        }
        let fresh = (self.next_fresh < self.n_nodes).then_some(self.l + 3 * self.next_fresh);
        for p in candidates {
            if self.acyclic && self.connected(self.vertex(h), self.vertex(p)) {
                continue;
            }
            self.pair(h, p);
            self.run(h + 1)?;
            self.unpair(h, p);
        }
        if let Some(p) = fresh {
            self.next_fresh += 1;
            self.pair(h, p);
            let r = self.run(h + 1);
            self.unpair(h, p);
            self.next_fresh -= 1;
            r?;
        }
        Ok(())
    }

    fn emit(&mut self) -> Result<()> {
        if self.next_fresh != self.n_nodes {
            return Ok(());
        }
        let d = Diagram::from_parts(self.legs.clone(), self.n_nodes as u16, self.pairing.clone())
            .expect("orderly generation yields valid diagrams");
        let keep = match self.spec.shape {
            Shape::Tree => d.is_tree(),
            Shape::Forest => d.is_forest() && self.spec.size.admits(d.size()),
            Shape::Chord => true,
            Shape::All => self.spec.size.admits(d.size()),
        };
        if keep {
            if self.out.len() >= self.budget {
                return Err(Error::ResourceLimit {
                    what: "diagram enumeration".into(),
                    cap: self.spec.cap,
                    partial: self.out.len(),
                });
            }
            self.out.push(d);
        }
        Ok(())
    }
}

/// Canonical diagrams matching `spec`, sorted and duplicate-free.
pub fn enumerate_diagrams(spec: &EnumSpec) -> Result<Vec<Diagram>> {
    spec.validate()?;
    let mut jobs = Vec::new();
    for (l, nodes) in spec.shapes() {
        for legs in compositions(l, spec.strands) {
            jobs.push((legs, nodes));
        }
    }
    let parts: Vec<Result<Vec<Diagram>>> = jobs
        .into_par_iter()
        .map(|(legs, nodes)| {
            let l: usize = legs.iter().map(|&x| x as usize).sum();
            let mut w = Wick {
                spec,
                legs,
                l,
                n_nodes: nodes,
                pairing: vec![FREE; l + 3 * nodes],
                next_fresh: 0,
                acyclic: matches!(spec.shape, Shape::Tree | Shape::Forest),
                out: Vec::new(),
                budget: spec.cap,
            };
            w.run(0)?;
            Ok(w.out)
        })
        .collect();
    let mut all = Vec::new();
    for p in parts {
        match p {
            Ok(v) => all.extend(v),
            Err(Error::ResourceLimit { what, cap, partial }) => {
                return Err(Error::ResourceLimit {
                    what,
                    cap,
                    partial: partial + all.len(),
                })
            }
            Err(e) => return Err(e),
        }
        if all.len() > spec.cap {
            return Err(Error::ResourceLimit {
                what: "diagram enumeration".into(),
                cap: spec.cap,
                partial: all.len(),
            });
        }
    }
    all.sort();
    all.dedup();
    Ok(all)
}

pub fn enumerate(spec: &EnumSpec) -> Result<Vec<DiagramClass>> {
    enumerate_diagrams(spec)?.iter().map(canonicalize).collect()
}

type CacheKey = (usize, usize, Shape, SizeFilter);

/// Memoised enumeration with the default cap.
pub fn cached(m: usize, n: usize, shape: Shape, size: SizeFilter) -> Result<Arc<Vec<Diagram>>> {
    static CACHE: OnceLock<Mutex<HashMap<CacheKey, Arc<Vec<Diagram>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (m, n, shape, size);
    if let Some(v) = cache.lock().expect("cache lock").get(&key) {
        return Ok(v.clone());
    }
    let v = Arc::new(enumerate_diagrams(&EnumSpec::new(m, n, shape).size(size))?);
    cache.lock().expect("cache lock").insert(key, v.clone());
    Ok(v)
}

pub fn count(spec: &EnumSpec) -> Result<usize> {
    Ok(enumerate_diagrams(spec)?.len())
}

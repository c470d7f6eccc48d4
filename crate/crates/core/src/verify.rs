//! Named verification suites. Each check returns a [`CheckReport`]; a
//! failing report carries a JSON witness of the first counterexample.

use std::sync::Arc;

use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::diagram::Diagram;
use crate::enumerate::{cached, Shape, SizeFilter};
use crate::error::{Error, Result};
use crate::forest::{
    bubble_path, decompose_cycle, iota, pi_tilde, pi_tilde_linear, resum, slide_edge_vector, slide_unlabelled,
    LabelledForest, LabelledGraph, Move, Path, Permutograph,
};
use crate::hopf::{
    comult, comult_factor, compare, flip, primitive_subspace, reduced_comult, tensor, tensor_product, tree_subspace,
};
use crate::lie::{jacobi_check, tree_bracket, LieElement};
use crate::linalg::{subspace_equal, Basis, LinComb, RationalVector, Span};
use crate::relations::{antisymmetry, four_t, hexagons, ihx, squares, stu2};
use crate::spaces::{algebra, forest_module, lie_module, Mode};

pub const CHECKS: [&str; 13] = [
    "stu2-eq-squares",
    "4t-from-stu2",
    "hexagon-from-stu2-ihx",
    "pi-section",
    "path-independence",
    "six-cycles",
    "prim-eq-size",
    "filtration-iso",
    "jacobi",
    "hopf-axioms",
    "homology-squares-hexagons",
    "diagrammatic-stu",
    "sanity-dims",
];

/// Cap on labelled forest graphs walked by the sampled checks.
const GRAPH_CAP: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub details: Vec<String>,
    pub witness: Option<serde_json::Value>,
}

impl CheckReport {
    fn new(name: &str) -> CheckReport {
        CheckReport {
            name: name.to_string(),
            passed: true,
            details: Vec::new(),
            witness: None,
        }
    }

    fn note(&mut self, line: String) {
        self.details.push(line);
    }

    fn fail(&mut self, line: String, witness: serde_json::Value) {
        self.passed = false;
        self.details.push(format!("FAIL {line}"));
        if self.witness.is_none() {
            self.witness = Some(witness);
        }
    }

    pub fn line(&self) -> String {
        format!("{} {}", if self.passed { "PASS" } else { "FAIL" }, self.name)
    }
}

/// Parameters shared by all checks. `degree` is an upper bound: every check
/// runs in each degree from 1 up to it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckParams {
    pub strands: usize,
    pub degree: usize,
    pub mode: Mode,
    pub seed: u64,
}

impl CheckParams {
    pub fn new(strands: usize, degree: usize) -> CheckParams {
        CheckParams {
            strands,
            degree,
            mode: Mode::FI,
            seed: 0,
        }
    }
}

pub fn run_check(name: &str, p: &CheckParams) -> Result<CheckReport> {
    match name {
        "stu2-eq-squares" => stu2_eq_squares(p.strands, p.degree),
        "4t-from-stu2" => four_t_from_stu2(p.strands, p.degree),
        "hexagon-from-stu2-ihx" => hexagon_from_stu2_ihx(p.strands, p.degree),
        "pi-section" => pi_section(p.strands, p.degree, p.mode),
        "path-independence" => path_independence(p.strands, p.degree, p.seed, 10, 10),
        "six-cycles" => six_cycles(p.strands, p.degree, p.seed, 10),
        "prim-eq-size" => prim_eq_size(p.strands, p.degree, p.mode),
        "filtration-iso" => filtration_iso(p.strands, p.degree, p.mode),
        "jacobi" => jacobi(p.strands, p.degree, p.mode),
        "hopf-axioms" => hopf_axioms(p.strands, p.degree, p.seed, 50),
        "homology-squares-hexagons" => homology_squares_hexagons(7),
        "diagrammatic-stu" => diagrammatic_stu(p.strands, p.degree, p.mode),
        "sanity-dims" => sanity_dims(),
        _ => Err(Error::InvalidSpec(format!(
            "unknown check {name}; expected one of {}",
            CHECKS.join(", ")
        ))),
    }
}

fn forest_basis(m: usize, n: usize, s: usize) -> Result<Arc<Basis<Diagram>>> {
    Ok(Arc::new(Basis::new(cached(m, n, Shape::Forest, SizeFilter::Exact(s))?.to_vec())))
}

fn vector_json(v: &RationalVector) -> serde_json::Value {
    json!(v.iter().map(|(d, x)| json!({"diagram": d.to_string(), "coefficient": x.to_string()})).collect::<Vec<_>>())
}

/// Square relations and STU² relations span the same submodule of size `s`
/// forests, for `1 <= s < n`.
pub fn stu2_eq_squares(m: usize, max_degree: usize) -> Result<CheckReport> {
    let mut r = CheckReport::new("stu2-eq-squares");
    for n in 1..=max_degree {
        for s in 1..n {
            let basis = forest_basis(m, n, s)?;
            let (a, b) = (stu2(m, n, s)?, squares(m, n, s)?);
            let eq = subspace_equal(&a.vectors, &b.vectors, &basis)?;
            let line = format!("m={m} n={n} s={s}: {} STU2, {} squares", a.len(), b.len());
            if eq {
                r.note(line);
            } else {
                r.fail(line, json!({"strands": m, "degree": n, "size": s}));
            }
        }
    }
    Ok(r)
}

/// On chord diagrams of degree `n` (size `n`), STU² spans the 4T relations.
pub fn four_t_from_stu2(m: usize, max_degree: usize) -> Result<CheckReport> {
    let mut r = CheckReport::new("4t-from-stu2");
    for n in 1..=max_degree {
        let basis = Arc::new(Basis::new(cached(m, n, Shape::Chord, SizeFilter::Any)?.to_vec()));
        let (a, b) = (stu2(m, n, n)?, four_t(m, n)?);
        let line = format!("m={m} n={n}: {} STU2, {} 4T", a.len(), b.len());
        if subspace_equal(&a.vectors, &b.vectors, &basis)? {
            r.note(line);
        } else {
            r.fail(line, json!({"strands": m, "degree": n}));
        }
        let sq = squares(m, n, n)?;
        r.note(format!("m={m} n={n}: squares at full size: {}", sq.len()));
    }
    Ok(r)
}

/// Hexagon relations among size `s < n - 1` forests lie in the span of STU²,
/// IHX and AS; they vanish at size 1 and size `n`.
pub fn hexagon_from_stu2_ihx(m: usize, max_degree: usize) -> Result<CheckReport> {
    let mut r = CheckReport::new("hexagon-from-stu2-ihx");
    for n in 1..=max_degree {
        for s in 1..=n {
            let hex = hexagons(m, n, s)?;
            if s == 1 || s == n {
                if hex.is_empty() {
                    r.note(format!("m={m} n={n} s={s}: no hexagons"));
                } else {
                    r.fail(format!("m={m} n={n} s={s}: hexagons present"), json!({"degree": n, "size": s}));
                }
                continue;
            }
            if s + 1 >= n {
                continue;
            }
            let basis = forest_basis(m, n, s)?;
            let forests = basis.keys().to_vec();
            let mut span = Span::from_vectors(basis, stu2(m, n, s)?.iter())?;
            for v in ihx(&forests).iter().chain(antisymmetry(&forests).iter()) {
                span.insert(v)?;
            }
            let bad = hex.vectors.iter().position(|v| !span.contains(v).unwrap_or(false));
            let line = format!("m={m} n={n} s={s}: {} hexagons", hex.len());
            match bad {
                None => r.note(line),
                Some(i) => r.fail(
                    line,
                    json!({"degree": n, "size": s, "site": hex.provenance[i], "vector": vector_json(&hex.vectors[i])}),
                ),
            }
        }
    }
    Ok(r)
}

/// `pi o iota = id` on the basis representatives of every size `s < n`
/// forest module.
pub fn pi_section(m: usize, max_degree: usize, mode: Mode) -> Result<CheckReport> {
    let mut r = CheckReport::new("pi-section");
    for n in 1..=max_degree {
        for s in 1..n {
            let space = forest_module(m, n, s, mode)?;
            let bad: Vec<usize> = (0..space.dim())
                .into_par_iter()
                .map(|i| -> Result<Option<usize>> {
                    let rep = space.representative(i);
                    let back = pi_tilde_linear(&iota(rep)?, mode)?;
                    let ok = back.len() == 1 && back.get(&i).is_some_and(|x| x.is_one());
                    Ok((!ok).then_some(i))
                })
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .flatten()
                .collect();
            let line = format!("m={m} n={n} s={s}: dim {}", space.dim());
            match bad.first() {
                None => r.note(line),
                Some(&i) => r.fail(line, json!({"degree": n, "size": s, "forest": space.representative(i).to_string()})),
            }
        }
    }
    Ok(r)
}

fn random_walk(rng: &mut ChaCha8Rng, start: &LabelledForest, target: &LabelledForest) -> Result<Path> {
    let mut cur = start.clone();
    let mut moves = Vec::new();
    for _ in 0..rng.gen_range(0..12) {
        let sites = cur.sites();
        let Some(&mv) = sites.choose(rng) else { break };
        cur = cur.slide(mv)?;
        moves.push(mv);
    }
    Path {
        start: start.clone(),
        moves,
    }
    .then(&bubble_path(&cur, target)?)
}

/// AS, square and braiding hexagon relations on size `s` forests.
fn slide_relations(m: usize, n: usize, s: usize) -> Result<Span<Diagram>> {
    let basis = forest_basis(m, n, s)?;
    let lower = basis.keys().to_vec();
    let mut span = Span::from_vectors(basis, antisymmetry(&lower).iter())?;
    for v in squares(m, n, s)?.iter().chain(hexagons(m, n, s)?.iter()) {
        span.insert(v)?;
    }
    Ok(span)
}

fn six_cycles_from(start: &LabelledForest, moves: &mut Vec<Move>, seen: &mut Vec<LabelledForest>, out: &mut Vec<Path>) -> Result<()> {
    let cur = seen.last().expect("nonempty").clone();
    for mv in cur.sites() {
        let next = cur.slide(mv)?;
        if moves.len() == 5 {
            if &next == start {
                let mut all = moves.clone();
                all.push(mv);
                out.push(Path { start: start.clone(), moves: all });
            }
            continue;
        }
        if seen.contains(&next) {
            continue;
        }
        moves.push(mv);
        seen.push(next);
        six_cycles_from(start, moves, seen, out)?;
        seen.pop();
        moves.pop();
    }
    Ok(())
}

/// Braiding cycles swap three adjacent legs on a single strand.
fn is_braiding(p: &Path) -> bool {
    let strand = p.moves[0].strand;
    let lo = p.moves.iter().map(|mv| mv.pos).min().unwrap_or(0);
    p.moves.iter().all(|mv| mv.strand == strand && mv.pos <= lo + 1)
}

/// Every simple 6-cycle through sampled vertices of labelled forest graphs,
/// braiding or not, sums to a vector in the span of AS, squares and braiding
/// hexagons.
pub fn six_cycles(m: usize, max_degree: usize, seed: u64, starts: usize) -> Result<CheckReport> {
    let mut r = CheckReport::new("six-cycles");
    r.note(format!("seed {seed}"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 2..=max_degree {
        for s in 2..=n.min(3) {
            let forests: Vec<Diagram> = cached(m, n, Shape::Forest, SizeFilter::Exact(s))?
                .iter()
                .filter(|f| !crate::relations::slide_sites(f).is_empty())
                .cloned()
                .collect();
            if forests.is_empty() {
                continue;
            }
            let span = slide_relations(m, n, s - 1)?;
            let (mut braiding, mut other) = (0usize, 0usize);
            for _ in 0..starts {
                let lf = LabelledForest::from_forest(forests.choose(&mut rng).expect("nonempty"))?;
                let mut cycles = Vec::new();
                six_cycles_from(&lf, &mut Vec::new(), &mut vec![lf.clone()], &mut cycles)?;
                for c in cycles {
                    if is_braiding(&c) {
                        braiding += 1;
                    } else {
                        other += 1;
                    }
                    let v = c.vector()?;
                    if !span.contains(&v)? {
                        r.fail(
                            format!("m={m} n={n} s={s}"),
                            json!({"cycle": c.to_json()?, "braiding": is_braiding(&c), "vector": vector_json(&v)}),
                        );
                    }
                }
            }
            r.note(format!("m={m} n={n} s={s}: {braiding} braiding and {other} other 6-cycles"));
        }
    }
    Ok(r)
}

/// Two random labelled paths between the same endpoints give vectors that
/// differ by AS, square and hexagon relations at size `s - 1`.
pub fn path_independence(
    m: usize,
    max_degree: usize,
    seed: u64,
    endpoint_pairs: usize,
    paths_per_pair: usize,
) -> Result<CheckReport> {
    let mut r = CheckReport::new("path-independence");
    r.note(format!("seed {seed}"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 2..=max_degree {
        for s in 2..=n.min(3) {
            let forests: Vec<Diagram> = cached(m, n, Shape::Forest, SizeFilter::Exact(s))?
                .iter()
                .filter(|f| !crate::relations::slide_sites(f).is_empty())
                .cloned()
                .collect();
            if forests.is_empty() {
                r.note(format!("m={m} n={n} s={s}: no slidable forests"));
                continue;
            }
            let span = slide_relations(m, n, s - 1)?;
            let mut checked = 0;
            for _ in 0..endpoint_pairs {
                let f = forests.choose(&mut rng).expect("nonempty");
                let lf = LabelledForest::from_forest(f)?;
                let g = LabelledGraph::new(lf.trees().to_vec(), GRAPH_CAP)?;
                let target = g.vertex(rng.gen_range(0..g.vertex_count()));
                for _ in 0..paths_per_pair {
                    let a = random_walk(&mut rng, &lf, &target)?;
                    let b = random_walk(&mut rng, &lf, &target)?;
                    let diff = a.vector()? - b.vector()?;
                    checked += 1;
                    if !span.contains(&diff)? {
                        r.fail(
                            format!("m={m} n={n} s={s}"),
                            json!({"first": a.to_json()?, "second": b.to_json()?, "difference": vector_json(&diff)}),
                        );
                    }
                }
            }
            r.note(format!("m={m} n={n} s={s}: {checked} path pairs over {endpoint_pairs} endpoint pairs"));
        }
    }
    Ok(r)
}

/// The kernel of the reduced coproduct is the span of trees.
pub fn prim_eq_size(m: usize, max_degree: usize, mode: Mode) -> Result<CheckReport> {
    let mut r = CheckReport::new("prim-eq-size");
    for n in 1..=max_degree {
        let (prim, trees) = (primitive_subspace(m, n, mode)?, tree_subspace(m, n, mode)?);
        let line = format!("m={m} n={n}: ker {} trees {}", prim.rank(), trees.rank());
        if prim.contains_span(&trees) && trees.contains_span(&prim) {
            r.note(line);
        } else {
            r.fail(line, json!({"degree": n}));
        }
    }
    Ok(r)
}

/// Dimensions of the forest modules against the size, product and kernel
/// filtrations of the chord algebra.
pub fn filtration_iso(m: usize, max_degree: usize, mode: Mode) -> Result<CheckReport> {
    let mut r = CheckReport::new("filtration-iso");
    for n in 1..=max_degree {
        let report = compare(m, n, mode)?;
        let table = report.table();
        if report.passed() {
            r.note(table);
        } else {
            r.fail(table, serde_json::to_value(&report).expect("serializable"));
        }
    }
    Ok(r)
}

/// Antisymmetry and Jacobi on basis elements; for one strand the bracket of
/// any two trees also vanishes.
pub fn jacobi(m: usize, max_degree: usize, mode: Mode) -> Result<CheckReport> {
    let mut r = CheckReport::new("jacobi");
    let report = jacobi_check(m, max_degree, mode)?;
    let line = format!(
        "m={m} degree<={max_degree}: {} pairs, {} triples",
        report.pairs_checked, report.triples_checked
    );
    if report.passed() {
        r.note(line);
    } else {
        r.fail(line, serde_json::to_value(&report).expect("serializable"));
    }
    if m == 1 {
        let mut pairs = 0;
        for p in 1..max_degree {
            for q in 1..=(max_degree - p) {
                for t in cached(1, p, Shape::Tree, SizeFilter::Any)?.iter() {
                    for u in cached(1, q, Shape::Tree, SizeFilter::Any)?.iter() {
                        pairs += 1;
                        let e = LieElement::from_vector(&tree_bracket(t, u)?, 1, p + q, mode)?;
                        if !e.is_zero() {
                            r.fail(
                                format!("nonzero knot bracket in degree {}", p + q),
                                json!({"x": t.to_string(), "y": u.to_string()}),
                            );
                        }
                    }
                }
            }
        }
        r.note(format!("m=1: {pairs} tree pairs bracket to zero"));
    }
    Ok(r)
}

/// Coassociativity, cocommutativity, multiplicativity of the coproduct and
/// the product formula for the reduced coproduct, on sampled pairs of
/// diagrams of each degree.
pub fn hopf_axioms(m: usize, max_degree: usize, seed: u64, samples: usize) -> Result<CheckReport> {
    let mut r = CheckReport::new("hopf-axioms");
    r.note(format!("seed {seed}"));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = LinComb::unit(Diagram::empty(m));
    let sym = |v: &RationalVector| tensor(&unit, v) + tensor(v, &unit);
    for n in 1..=max_degree {
        let pool = cached(m, n, Shape::All, SizeFilter::Any)?;
        for _ in 0..samples {
            let x = pool.choose(&mut rng).expect("nonempty");
            let y = pool.choose(&mut rng).expect("nonempty");
            let witness = || json!({"x": x.to_string(), "y": y.to_string()});
            let dx = comult(x);
            if comult_factor(&dx, 0) != comult_factor(&dx, 1) {
                r.fail(format!("coassociativity in degree {n}"), witness());
            }
            if flip(&dx) != dx {
                r.fail(format!("cocommutativity in degree {n}"), witness());
            }
            let xy = Diagram::stack(x, y)?;
            if comult(&xy) != tensor_product(&dx, &comult(y))? {
                r.fail(format!("multiplicativity in degree {n}"), witness());
            }
            let (vx, vy) = (LinComb::unit(x.clone()), LinComb::unit(y.clone()));
            let (bx, by) = (reduced_comult(&vx)?, reduced_comult(&vy)?);
            let rhs = tensor_product(&bx, &by)?
                + tensor_product(&bx, &sym(&vy))?
                + tensor_product(&sym(&vx), &by)?
                + tensor(&vx, &vy)
                + tensor(&vy, &vx);
            if reduced_comult(&LinComb::unit(xy))? != rhs {
                r.fail(format!("reduced product formula in degree {n}"), witness());
            }
        }
        r.note(format!("m={m} n={n}: {samples} pairs from {} diagrams", pool.len()));
    }
    Ok(r)
}

/// Permutographs and box products with at most `max_letters` letters.
pub fn homology_targets(max_letters: usize) -> Vec<Vec<Vec<usize>>> {
    let all = vec![
        vec![vec![2, 2, 1]],
        vec![vec![1, 1, 1, 1]],
        vec![vec![2, 2, 2]],
        vec![vec![3, 2, 1]],
        vec![vec![1, 1, 1, 1, 1]],
        vec![vec![2, 2, 1, 1, 1]],
        vec![vec![1, 1], vec![2, 1]],
        vec![vec![1, 1, 1], vec![1, 1, 1, 1]],
        vec![vec![2, 1], vec![1, 1], vec![1, 1]],
        vec![vec![2, 2], vec![1, 1, 1]],
    ];
    all.into_iter()
        .filter(|g| g.iter().flatten().sum::<usize>() <= max_letters)
        .collect()
}

/// Every fundamental cycle decomposes into backtracks, squares and hexagons
/// whose chains re-sum to the cycle's chain.
pub fn homology_squares_hexagons(max_letters: usize) -> Result<CheckReport> {
    let mut r = CheckReport::new("homology-squares-hexagons");
    for mults in homology_targets(max_letters) {
        let g = Permutograph::new(mults.clone(), GRAPH_CAP)?;
        let cycles = g.fundamental_cycles();
        let expected = g.edge_count() + 1 - g.vertex_count();
        if cycles.len() != expected {
            r.fail(
                format!("{mults:?}: {} cycles, expected {expected}", cycles.len()),
                json!({"multiplicities": mults}),
            );
        }
        let bad = cycles
            .par_iter()
            .map(|c| -> Result<Option<serde_json::Value>> {
                let atoms = decompose_cycle(c)?;
                let ok = resum(&atoms)? == c.chain()?;
                Ok((!ok).then(|| serde_json::to_value(c).expect("serializable")))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .next();
        let line = format!("{mults:?}: {} vertices, {} cycles", g.vertex_count(), cycles.len());
        match bad {
            None => r.note(line),
            Some(w) => r.fail(line, json!({"multiplicities": mults, "cycle": w})),
        }
    }
    Ok(r)
}

/// `pi~(F') - pi~(F)` equals the edge vector of every slide `F -> F'`, in
/// the size `s - 1` forest module.
pub fn diagrammatic_stu(m: usize, max_degree: usize, mode: Mode) -> Result<CheckReport> {
    let mut r = CheckReport::new("diagrammatic-stu");
    for n in 2..=max_degree {
        for s in 2..=n {
            let space = forest_module(m, n, s - 1, mode)?;
            let forests = cached(m, n, Shape::Forest, SizeFilter::Exact(s))?;
            let results = forests
                .par_iter()
                .map(|f| -> Result<(usize, Option<serde_json::Value>)> {
                    let lf = LabelledForest::from_forest(f)?;
                    let sites = lf.sites();
                    for &mv in &sites {
                        let g = slide_unlabelled(f, mv)?;
                        let diff = pi_tilde(&g)? - pi_tilde(f)? - slide_edge_vector(f, mv)?;
                        if !space.is_zero(&diff)? {
                            return Ok((sites.len(), Some(json!({"forest": f.to_string(), "move": [mv.strand, mv.pos]}))));
                        }
                    }
                    Ok((sites.len(), None))
                })
                .collect::<Result<Vec<_>>>()?;
            let edges: usize = results.iter().map(|(k, _)| k).sum();
            let line = format!("m={m} n={n} s={s}: {edges} slides");
            match results.into_iter().find_map(|(_, w)| w) {
                None => r.note(line),
                Some(w) => r.fail(line, w),
            }
        }
    }
    Ok(r)
}

/// Small dimensions with independent derivations.
pub fn sanity_dims() -> Result<CheckReport> {
    let mut r = CheckReport::new("sanity-dims");
    let cases = [
        ("A_1(1) FI", algebra(1, 1, Mode::FI)?.dim(), 0),
        ("A_2(1) FI", algebra(1, 2, Mode::FI)?.dim(), 1),
        ("L_1(2) FI", lie_module(2, 1, Mode::FI)?.dim(), 1),
    ];
    for (what, got, want) in cases {
        let line = format!("{what}: {got} (expected {want})");
        if got == want {
            r.note(line);
        } else {
            r.fail(line, json!({"space": what, "dim": got}));
        }
    }
    Ok(r)
}

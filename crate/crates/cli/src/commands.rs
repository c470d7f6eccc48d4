use std::collections::BTreeMap;
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use jacobi_core::enumerate::EnumSpec;
use jacobi_core::forest::{LabelledForest, LabelledGraph};
use jacobi_core::hopf::{compare, primitive_subspace};
use jacobi_core::linalg::{basis_manifest, Basis, MatrixExport};
use jacobi_core::relations::{generate, RelKind};
use jacobi_core::verify::{run_check, CheckParams, CheckReport, CHECKS};
use jacobi_core::{
    algebra, bracket, enumerate_diagrams, forest_module, lie_module, size_filtration, structure_constants, Diagram,
    Error, LieElement, Shape, SizeFilter,
};
use serde_json::json;

use crate::args::{Command, ExportWhat, Format, Grade, RunConfig, SpaceArg};
use crate::cache::{Cache, Key};

/// What a command produced: its stdout text and, for failed checks, named
/// witnesses to write next to it.
pub struct Outcome {
    pub output: String,
    pub witnesses: Vec<(String, serde_json::Value)>,
}

impl Outcome {
    fn ok(output: String) -> Outcome {
        Outcome {
            output,
            witnesses: Vec::new(),
        }
    }
}

fn check_grade(cfg: &RunConfig, g: &Grade) -> Result<()> {
    if g.strands == 0 || g.degree == 0 {
        return Err(Error::InvalidSpec("strands and degree must be positive".into()).into());
    }
    if g.strands as u64 > cfg.max_strands {
        return Err(Error::ResourceLimit {
            what: "strand count".into(),
            cap: cfg.max_strands as usize,
            partial: g.strands,
        }
        .into());
    }
    if g.degree as u64 > cfg.max_degree {
        return Err(Error::ResourceLimit {
            what: "degree".into(),
            cap: cfg.max_degree as usize,
            partial: g.degree,
        }
        .into());
    }
    // Every space in this degree is built from at most this many diagrams.
    enumerate_diagrams(&EnumSpec::new(g.strands, g.degree, Shape::All).cap(cfg.cap as usize))?;
    Ok(())
}

pub fn run(cfg: &RunConfig, cmd: &Command) -> Result<Outcome> {
    let cache = Cache::new(cfg.cache_dir.clone());
    match cmd {
        Command::Enumerate {
            grade,
            chords,
            trees,
            forests,
            size,
        } => {
            check_grade(cfg, grade)?;
            let shape = if *chords {
                Shape::Chord
            } else if *trees {
                Shape::Tree
            } else if *forests || size.is_some() {
                Shape::Forest
            } else {
                Shape::All
            };
            let filter = size.map_or(SizeFilter::Any, SizeFilter::Exact);
            let spec = EnumSpec::new(grade.strands, grade.degree, shape).size(filter).cap(cfg.cap as usize);
            let ds = enumerate_diagrams(&spec)?;
            Ok(Outcome::ok(match cfg.format {
                Format::Json => {
                    let items: Vec<_> = ds
                        .iter()
                        .map(|d| json!({"text": d.to_string(), "encoding": hex::encode(d.encoding())}))
                        .collect();
                    pretty(&json!(items))
                }
                _ => ds.iter().map(|d| format!("{d}\n")).collect(),
            }))
        }
        Command::Dim { space, grade, size } => {
            check_grade(cfg, grade)?;
            let key = Key {
                strands: grade.strands,
                degree: grade.degree,
                space: space_key(*space, *size),
                mode: cfg.mode(),
                ext: "dim",
            };
            let dim = cache.get_or_compute(&key, || Ok(format!("{}\n", dimension(cfg, *space, grade, *size)?)))?;
            Ok(Outcome::ok(match cfg.format {
                Format::Json => pretty(&json!({
                    "space": key.space,
                    "strands": grade.strands,
                    "degree": grade.degree,
                    "mode": cfg.mode().to_string(),
                    "dim": dim.trim().parse::<usize>()?,
                })),
                _ => dim,
            }))
        }
        Command::Verify { check, grade } => {
            check_grade(cfg, grade)?;
            let names: Vec<&str> = if check.iter().any(|c| c == "all") {
                CHECKS.to_vec()
            } else {
                check.iter().map(String::as_str).collect()
            };
            let params = CheckParams {
                strands: grade.strands,
                degree: grade.degree,
                mode: cfg.mode(),
                seed: cfg.seed,
            };
            if names.iter().any(|n| matches!(*n, "path-independence" | "hopf-axioms")) {
                log::info!("seed {}", cfg.seed);
            }
            let reports = names.iter().map(|n| Ok(run_check(n, &params)?)).collect::<Result<Vec<_>>>()?;
            Ok(render_reports(cfg.format, &reports))
        }
        Command::Bracket { grade, x, y } => {
            check_grade(cfg, grade)?;
            match (x, y) {
                (Some(x), Some(y)) => bracket_pair(cfg, grade, x, y),
                (None, None) => {
                    let key = Key {
                        strands: grade.strands,
                        degree: grade.degree,
                        space: "structure-constants".into(),
                        mode: cfg.mode(),
                        ext: "json",
                    };
                    let text = cache.get_or_compute(&key, || {
                        Ok(pretty(&structure_constants(grade.strands, grade.degree, cfg.mode())?))
                    })?;
                    Ok(Outcome::ok(text))
                }
                _ => Err(Error::InvalidSpec("bracket takes two trees or none".into()).into()),
            }
        }
        Command::Export {
            what,
            grade,
            size,
            kind,
            space,
            forest,
            out,
        } => {
            check_grade(cfg, grade)?;
            let text = export(cfg, &cache, *what, grade, *size, kind.as_deref(), *space, forest.as_deref())?;
            match out {
                Some(path) => {
                    crate::cache::write_atomic(path, &text)?;
                    Ok(Outcome::ok(format!("wrote {}\n", path.display())))
                }
                None => Ok(Outcome::ok(text)),
            }
        }
        Command::Report { grade } => {
            check_grade(cfg, grade)?;
            let filtration = compare(grade.strands, grade.degree, cfg.mode())?;
            let params = CheckParams {
                strands: grade.strands,
                degree: grade.degree,
                mode: cfg.mode(),
                seed: cfg.seed,
            };
            log::info!("seed {}", cfg.seed);
            let reports = CHECKS.iter().map(|n| Ok(run_check(n, &params)?)).collect::<Result<Vec<_>>>()?;
            let mut outcome = render_reports(cfg.format, &reports);
            outcome.output = match cfg.format {
                Format::Json => pretty(&json!({
                    "filtration": filtration,
                    "checks": serde_json::from_str::<serde_json::Value>(&outcome.output)?,
                })),
                _ => format!("{}\n{}", filtration.table(), outcome.output),
            };
            Ok(outcome)
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn space_key(space: SpaceArg, size: Option<usize>) -> String {
    let base = format!("{space:?}");
    match (space, size) {
        (SpaceArg::F | SpaceArg::S, Some(k)) => format!("{base}{k}"),
        _ => base,
    }
}

fn need_size(size: Option<usize>) -> Result<usize> {
    size.ok_or_else(|| Error::InvalidSpec("this space needs --size".into()).into())
}

fn dimension(cfg: &RunConfig, space: SpaceArg, g: &Grade, size: Option<usize>) -> Result<usize> {
    let (m, n, mode) = (g.strands, g.degree, cfg.mode());
    Ok(match space {
        SpaceArg::A => algebra(m, n, mode)?.dim(),
        SpaceArg::L => lie_module(m, n, mode)?.dim(),
        SpaceArg::F => forest_module(m, n, need_size(size)?, mode)?.dim(),
        SpaceArg::P => primitive_subspace(m, n, mode)?.rank(),
        SpaceArg::S => size_filtration(m, n, need_size(size)?, mode)?.rank(),
    })
}

fn render_reports(format: Format, reports: &[CheckReport]) -> Outcome {
    let witnesses = reports
        .iter()
        .filter(|r| !r.passed)
        .map(|r| (r.name.clone(), r.witness.clone().unwrap_or(serde_json::Value::Null)))
        .collect();
    let output = match format {
        Format::Json => pretty(&serde_json::to_value(reports).expect("serializable")),
        _ => {
            let mut s = String::new();
            for r in reports {
                s.push_str(&r.line());
                s.push('\n');
                for d in &r.details {
                    for line in d.lines() {
                        s.push_str(&format!("  {line}\n"));
                    }
                }
            }
            s
        }
    };
    Outcome { output, witnesses }
}

fn parse_tree(text: &str, m: usize) -> Result<Diagram> {
    let d = Diagram::parse(text)?;
    if !d.is_tree() {
        bail!(Error::InvalidSpec(format!("{d} is not a tree")));
    }
    if d.strand_count() != m {
        bail!(Error::StrandMismatch {
            left: d.strand_count(),
            right: m
        });
    }
    Ok(d)
}

fn bracket_pair(cfg: &RunConfig, g: &Grade, x: &str, y: &str) -> Result<Outcome> {
    let (t, u) = (parse_tree(x, g.strands)?, parse_tree(y, g.strands)?);
    if t.degree() + u.degree() > cfg.max_degree as usize {
        bail!(Error::ResourceLimit {
            what: "bracket degree".into(),
            cap: cfg.max_degree as usize,
            partial: t.degree() + u.degree(),
        });
    }
    let mode = cfg.mode();
    let e = bracket(&LieElement::from_tree(&t, mode)?, &LieElement::from_tree(&u, mode)?, mode)?;
    let space = lie_module(g.strands, e.degree, mode)?;
    let terms: Vec<(String, String)> = e
        .coords
        .iter()
        .map(|(&i, c)| (c.to_string(), space.representative(i).to_string()))
        .collect();
    Ok(Outcome::ok(match cfg.format {
        Format::Json => pretty(&json!({
            "degree": e.degree,
            "terms": terms.iter().map(|(c, d)| json!({"coefficient": c, "tree": d})).collect::<Vec<_>>(),
        })),
        _ if terms.is_empty() => "0\n".into(),
        _ => terms.iter().map(|(c, d)| format!("{c}\t{d}\n")).collect(),
    }))
}

#[allow(clippy::too_many_arguments)]
fn export(
    cfg: &RunConfig,
    cache: &Cache,
    what: ExportWhat,
    g: &Grade,
    size: usize,
    kind: Option<&str>,
    space: SpaceArg,
    forest: Option<&str>,
) -> Result<String> {
    let (m, n, mode) = (g.strands, g.degree, cfg.mode());
    match what {
        ExportWhat::Basis => {
            let key = Key {
                strands: m,
                degree: n,
                space: format!("basis-{}", space_key(space, Some(size))),
                mode,
                ext: "json",
            };
            cache.get_or_compute(&key, || {
                let q = match space {
                    SpaceArg::A => algebra(m, n, mode)?,
                    SpaceArg::L => lie_module(m, n, mode)?,
                    SpaceArg::F => forest_module(m, n, size, mode)?,
                    _ => bail!(Error::InvalidSpec("basis export supports A, L and F".into())),
                };
                let reps: Vec<String> = (0..q.dim()).map(|i| q.representative(i).to_string()).collect();
                Ok(pretty(&json!({
                    "strands": m,
                    "degree": n,
                    "mode": mode.to_string(),
                    "ambient": basis_manifest(q.ambient()),
                    "representatives": reps,
                })))
            })
        }
        ExportWhat::Relations => {
            let kind = RelKind::from_str(kind.context("relations export needs --kind")?)?;
            let key = Key {
                strands: m,
                degree: n,
                space: format!("relations-{kind}-s{size}-{:?}", cfg.format).to_lowercase(),
                mode,
                ext: if cfg.format == Format::Csv { "csv" } else { "json" },
            };
            cache.get_or_compute(&key, || {
                let (ambient, set) = generate(kind, m, n, size)?;
                let basis = Basis::new(ambient.to_vec());
                let rows = set
                    .vectors
                    .iter()
                    .map(|v| Ok(basis.sparse(v)?.into_iter().collect()))
                    .collect::<Result<Vec<Vec<_>>>>()?;
                let matrix = MatrixExport::from_rows(&rows, basis.len());
                Ok(match cfg.format {
                    Format::Csv => matrix.to_csv()?,
                    _ => pretty(&json!({
                        "kind": kind.to_string(),
                        "strands": m,
                        "degree": n,
                        "size": size,
                        "basis": basis_manifest(&basis),
                        "matrix": matrix,
                        "provenance": set.provenance,
                    })),
                })
            })
        }
        ExportWhat::StructureConstants => {
            let key = Key {
                strands: m,
                degree: n,
                space: "structure-constants".into(),
                mode,
                ext: "json",
            };
            cache.get_or_compute(&key, || Ok(pretty(&structure_constants(m, n, mode)?)))
        }
        ExportWhat::Graph => {
            let f = Diagram::parse(forest.context("graph export needs --forest")?)?;
            let lf = LabelledForest::from_forest(&f)?;
            let g = LabelledGraph::new(lf.trees().to_vec(), cfg.cap as usize)?;
            Ok(match cfg.format {
                Format::Json => {
                    let vertices: Vec<_> = (0..g.vertex_count()).map(|i| g.vertex(i).to_json()).collect();
                    let edges: Vec<_> = g
                        .permutograph()
                        .edges()
                        .into_iter()
                        .map(|(a, mv, b)| json!({"from": a, "to": b, "strand": mv.strand, "pos": mv.pos}))
                        .collect();
                    pretty(&json!({"vertices": vertices, "edges": edges}))
                }
                _ => g.to_dot(),
            })
        }
    }
}

/// Manifest written when a cap stops a run.
pub fn partial_manifest(cmd: &[String], what: &str, cap: usize, partial: usize) -> serde_json::Value {
    let mut m = BTreeMap::new();
    m.insert("command", json!(cmd));
    m.insert("limit", json!(what));
    m.insert("cap", json!(cap));
    m.insert("reached", json!(partial));
    m.insert("status", json!("incomplete"));
    json!(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failed_reports_carry_witnesses() {
        let ok = CheckReport {
            name: "a".into(),
            passed: true,
            details: vec!["fine".into()],
            witness: None,
        };
        let bad = CheckReport {
            name: "b".into(),
            passed: false,
            details: vec!["FAIL here".into()],
            witness: Some(json!({"forest": "x"})),
        };
        let out = render_reports(Format::Text, &[ok, bad]);
        assert_eq!(out.output, "PASS a\n  fine\nFAIL b\n  FAIL here\n");
        assert_eq!(out.witnesses, vec![("b".to_string(), json!({"forest": "x"}))]);
    }

    #[test]
    fn cache_keys_include_the_size() {
        assert_eq!(space_key(SpaceArg::F, Some(2)), "F2");
        assert_eq!(space_key(SpaceArg::L, Some(2)), "L");
    }
}

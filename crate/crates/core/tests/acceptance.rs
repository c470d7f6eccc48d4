//! Acceptance criteria, one PASS/FAIL line each. Runs as a plain binary so
//! the lines always reach the test log.

use std::process::ExitCode;
use std::time::Instant;

use jacobi_core::verify::{
    diagrammatic_stu, filtration_iso, four_t_from_stu2, hexagon_from_stu2_ihx, homology_squares_hexagons,
    hopf_axioms, jacobi, path_independence, pi_section, prim_eq_size, sanity_dims, stu2_eq_squares, CheckReport,
};
use jacobi_core::{Mode, Result};

const SEED: u64 = 20240917;

fn over_strands(f: impl Fn(usize) -> Result<CheckReport>) -> Result<Vec<CheckReport>> {
    [1, 2].into_iter().map(f).collect()
}

fn criteria() -> Vec<(&'static str, Box<dyn Fn() -> Result<Vec<CheckReport>>>)> {
    vec![
        ("primitives are spanned by trees, m<=2 n<=4", Box::new(|| over_strands(|m| prim_eq_size(m, 4, Mode::FI)))),
        ("pi o iota = id on forest modules, m<=2 n<=4", Box::new(|| over_strands(|m| pi_section(m, 4, Mode::FI)))),
        (
            "squares = STU2, STU2 = 4T at full size, hexagons from STU2 and IHX",
            Box::new(|| {
                let mut out = over_strands(|m| stu2_eq_squares(m, 4))?;
                out.extend(over_strands(|m| four_t_from_stu2(m, 4))?);
                out.extend(over_strands(|m| hexagon_from_stu2_ihx(m, 4))?);
                Ok(out)
            }),
        ),
        ("cycles decompose into backtracks, squares, hexagons", Box::new(|| Ok(vec![homology_squares_hexagons(7)?]))),
        (
            "path vectors independent of the path modulo AS, squares, hexagons",
            Box::new(|| over_strands(|m| path_independence(m, 4, SEED, 10, 10))),
        ),
        ("forest modules match the size filtration, m<=2 n<=4", Box::new(|| over_strands(|m| filtration_iso(m, 4, Mode::FI)))),
        ("Lie axioms up to degree 4, trivial bracket on one strand", Box::new(|| over_strands(|m| jacobi(m, 4, Mode::FI)))),
        ("Hopf axioms on sampled pairs, degree <= 3", Box::new(|| over_strands(|m| hopf_axioms(m, 3, SEED, 50)))),
        ("sanity dimensions", Box::new(|| Ok(vec![sanity_dims()?]))),
        ("diagrammatic STU, m<=2 n<=3", Box::new(|| over_strands(|m| diagrammatic_stu(m, 3, Mode::FI)))),
    ]
}

fn main() -> ExitCode {
    let mut failed = 0;
    for (i, (what, run)) in criteria().into_iter().enumerate() {
        let start = Instant::now();
        let (ok, notes) = match run() {
            Ok(reports) => {
                let notes: Vec<String> = reports
                    .iter()
                    .flat_map(|r| r.details.iter().filter(|d| d.starts_with("FAIL")).cloned())
                    .collect();
                (reports.iter().all(|r| r.passed), notes)
            }
            Err(e) => (false, vec![format!("error: {e}")]),
        };
        let secs = start.elapsed().as_secs_f64();
        println!("{} criterion {}: {what} ({secs:.1}s)", if ok { "PASS" } else { "FAIL" }, i + 1);
        for n in notes {
            println!("    {n}");
        }
        if !ok {
            failed += 1;
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

//! The `filtk` command line. Exit status 0 means PASS (or feasible), 1 means
//! FAIL (or infeasible), 2 means the input could not be read.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use filtk_core::ckk::{filtered_k, realize_space_random, RandomMatrixParams};
use filtk_core::diagram::{
    check_exact_r_module, check_rrz_like, check_six_term_exact, reduced_from_full, solve_hom,
    unit_group, verify_hom, DiagramHom, DiagramModule, DiagramShape, HomSolveOutcome,
};
use filtk_core::finspace::FiniteSpace;
use filtk_core::intlin::smith_normal_form;
use serde::Serialize;
use serde_json::{json, Value};

use crate::caselib::{self, CaseError, CounterexampleOptions, PseudocircleReport};
use crate::formats::{
    self, block_matrix_from_dto, components_from_dto, components_to_dto, matrix_from_input,
    matrix_to_dto, module_from_dto, module_to_dto, parse_json, pins_from_dto, shape_to_dto,
    space_from_dto, to_json_pretty, FormatError, SpaceDto,
};
use crate::resources;

#[derive(Debug, Parser)]
#[command(
    name = "filtk",
    version,
    about = "Filtered K-theory checks over finite spaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Print the structured report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Also write the report to this file.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Smith normal form of an integer matrix.
    Snf {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Filtered K-theory of a block matrix as a module.
    CkK {
        /// Built-in space name or space JSON file; defaults to the matrix's own.
        #[arg(long)]
        space: Option<String>,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Exactness of every six-term sequence.
    CheckExact {
        #[arg(long)]
        module: PathBuf,
    },
    /// Vanishing of every boundary map out of degree 0.
    CheckRrz {
        #[arg(long)]
        module: PathBuf,
    },
    /// Naturality of a family of components between two modules.
    VerifyHom {
        #[arg(long)]
        module: PathBuf,
        /// Target module; the source is reused when absent.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long)]
        hom: PathBuf,
    },
    /// Extends pinned components to a natural transformation, if possible.
    SolveHom {
        #[arg(long)]
        module: PathBuf,
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long)]
        pins: PathBuf,
    },
    /// Reduced invariant and its exactness conditions.
    Reduced {
        #[arg(long)]
        module: PathBuf,
    },
    /// Unit group assembled from the neighbourhood groups.
    UnitGroup {
        #[arg(long)]
        module: PathBuf,
    },
    /// Replays the non-lifting automorphism from the embedded data.
    VerifyCounterexample {
        /// Use the identity family instead of the automorphism.
        #[arg(long)]
        alpha_identity: bool,
        /// Assign the two middle matrix blocks to points 3 and 2.
        #[arg(long)]
        swap_middle_blocks: bool,
    },
    /// Runs the pseudo-circle reduction chain on a module or on random matrices.
    VerifyPseudocircle {
        #[arg(long, conflicts_with = "seed")]
        module: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Number of consecutive seeds starting at `--seed`.
        #[arg(long, default_value_t = 1)]
        count: u64,
    },
    /// Prints a built-in shape.
    DumpShape {
        #[arg(long)]
        space: String,
    },
}

/// What a command produced.
#[derive(Debug, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug, thiserror::Error)]
enum InputError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{file}: {error}")]
    Format { file: String, error: FormatError },
    #[error("{0}")]
    Other(String),
}

impl From<CaseError> for InputError {
    fn from(e: CaseError) -> Self {
        InputError::Other(e.to_string())
    }
}

impl From<filtk_core::diagram::DiagramError> for InputError {
    fn from(e: filtk_core::diagram::DiagramError) -> Self {
        InputError::Other(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, InputError> {
    std::fs::read_to_string(path).map_err(|source| InputError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, InputError> {
    parse_json(&read(path)?).map_err(|error| InputError::Format {
        file: path.display().to_string(),
        error,
    })
}

fn in_file<T>(path: &Path, r: Result<T, FormatError>) -> Result<T, InputError> {
    r.map_err(|error| InputError::Format {
        file: path.display().to_string(),
        error,
    })
}

fn load_module(path: &Path) -> Result<DiagramModule, InputError> {
    let dto = read_json(path)?;
    in_file(path, module_from_dto(&dto, "$"))
}

/// A built-in shape by name, or the standard shape of a space file.
fn load_shape(spec: &str) -> Result<Arc<DiagramShape>, InputError> {
    if let Some(s) = resources::builtin_shape(spec) {
        return Ok(s);
    }
    let path = Path::new(spec);
    let dto: SpaceDto = read_json(path)?;
    let space = in_file(path, space_from_dto(&dto, "$"))?;
    Ok(Arc::new(DiagramShape::standard(spec, space)))
}

struct Report {
    passed: bool,
    json: Value,
    text: String,
}

pub fn run(cli: &Cli) -> Outcome {
    match dispatch(&cli.command) {
        Ok(r) => {
            let body = if cli.json {
                to_json_pretty(&r.json)
            } else {
                r.text
            };
            let mut out = Outcome {
                code: if r.passed { 0 } else { 1 },
                stdout: body,
                stderr: String::new(),
            };
            if let Some(path) = &cli.out {
                if let Err(e) = std::fs::write(path, &out.stdout) {
                    out.code = 2;
                    out.stderr = format!("error: {}: {e}\n", path.display());
                }
            }
            out
        }
        Err(e) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn dispatch(cmd: &Command) -> Result<Report, InputError> {
    match cmd {
        Command::Snf { input } => snf(input),
        Command::CkK { space, matrix } => ck_k(space.as_deref(), matrix),
        Command::CheckExact { module } => {
            let m = load_module(module)?;
            let r = check_six_term_exact(&m)?;
            let failures: Vec<String> = r.failures.iter().map(|f| f.to_string()).collect();
            let mut text = format!(
                "{} positions checked, {} failures\n",
                r.checked,
                failures.len()
            );
            failures
                .iter()
                .for_each(|f| writeln!(text, "  {f}").unwrap());
            text.push_str(if r.is_exact() { "PASS\n" } else { "FAIL\n" });
            Ok(Report {
                passed: r.is_exact(),
                json: json!({ "exact": r.is_exact(), "checked": r.checked, "failures": failures }),
                text,
            })
        }
        Command::CheckRrz { module } => {
            let m = load_module(module)?;
            let r = check_rrz_like(&m);
            let mut text = format!("{} boundary maps out of degree 0 checked\n", r.checked);
            r.nonzero
                .iter()
                .for_each(|a| writeln!(text, "  nonzero: {a}").unwrap());
            text.push_str(if r.holds() { "PASS\n" } else { "FAIL\n" });
            Ok(Report {
                passed: r.holds(),
                json: json!({ "rrz_like": r.holds(), "checked": r.checked, "nonzero": r.nonzero }),
                text,
            })
        }
        Command::VerifyHom {
            module,
            target,
            hom,
        } => {
            let src = load_module(module)?;
            let dst = match target {
                Some(t) => load_module(t)?,
                None => src.clone(),
            };
            let dto = read_json(hom)?;
            let comps = in_file(hom, components_from_dto(&dto, &src, &dst, "$"))?;
            let h = DiagramHom::new(src, dst, comps)?;
            let r = verify_hom(&h);
            let failures: Vec<&str> = r.failures.iter().map(|f| f.label.as_str()).collect();
            let iso = r.holds() && h.is_isomorphism();
            let mut text = String::new();
            r.ill_defined
                .iter()
                .for_each(|v| writeln!(text, "  ill defined at {v}").unwrap());
            failures
                .iter()
                .for_each(|a| writeln!(text, "  square fails at {a}").unwrap());
            writeln!(text, "isomorphism: {iso}").unwrap();
            text.push_str(if r.holds() { "PASS\n" } else { "FAIL\n" });
            Ok(Report {
                passed: r.holds(),
                json: json!({ "natural": r.holds(), "ill_defined": r.ill_defined, "failures": failures, "isomorphism": iso }),
                text,
            })
        }
        Command::SolveHom {
            module,
            target,
            pins,
        } => {
            let src = load_module(module)?;
            let dst = match target {
                Some(t) => load_module(t)?,
                None => src.clone(),
            };
            let dto = read_json(pins)?;
            let pins = in_file(pins, pins_from_dto(&dto, &src, &dst, "$"))?;
            solve(&src, &dst, &pins)
        }
        Command::Reduced { module } => {
            let m = load_module(module)?;
            let r = reduced_from_full(&m)?;
            let check = check_exact_r_module(&r)?;
            let space = &r.space;
            let points: Vec<Value> = r
                .points
                .iter()
                .map(|p| {
                    json!({
                        "point": space.label(p.point),
                        "neighbourhood": space.carrier_name(p.neighbourhood),
                        "k0_neighbourhood": p.k0_neighbourhood.to_string(),
                        "k0_punctured": p.k0_punctured.to_string(),
                        "k1_point": p.k1_point.to_string(),
                    })
                })
                .collect();
            let mut text = String::new();
            for p in &r.points {
                writeln!(
                    text,
                    "{}: K0({}) = {}, K0 punctured = {}, K1 = {}",
                    space.label(p.point),
                    space.carrier_name(p.neighbourhood),
                    p.k0_neighbourhood,
                    p.k0_punctured,
                    p.k1_point
                )
                .unwrap();
            }
            check
                .failures
                .iter()
                .for_each(|f| writeln!(text, "  {f}").unwrap());
            text.push_str(if check.holds() { "PASS\n" } else { "FAIL\n" });
            Ok(Report {
                passed: check.holds(),
                json: json!({ "points": points, "exact": check.holds(), "failures": check.failures }),
                text,
            })
        }
        Command::UnitGroup { module } => {
            let m = load_module(module)?;
            let g = unit_group(&reduced_from_full(&m)?)?;
            Ok(Report {
                passed: true,
                json: json!({ "unit_group": g.to_string() }),
                text: format!("{g}\n"),
            })
        }
        Command::VerifyCounterexample {
            alpha_identity,
            swap_middle_blocks,
        } => {
            let opts = CounterexampleOptions {
                alpha_identity: *alpha_identity,
                swap_middle_blocks: *swap_middle_blocks,
            };
            let r = caselib::verify_counterexample(opts)?;
            let mut text = String::new();
            for s in &r.stages {
                writeln!(
                    text,
                    "stage {} ({}): {}",
                    s.stage,
                    s.name,
                    if s.passed { "PASS" } else { "FAIL" }
                )
                .unwrap();
                s.details
                    .iter()
                    .for_each(|d| writeln!(text, "  {d}").unwrap());
            }
            writeln!(text, "{}", r.conclusion).unwrap();
            if let Some(c) = &r.certificate {
                match &c.equation {
                    Some(eq) => {
                        writeln!(text, "certificate: {eq} has no integer solution").unwrap()
                    }
                    None => writeln!(
                        text,
                        "certificate: modulus {}, residue {}",
                        c.modulus, c.residue
                    )
                    .unwrap(),
                }
            }
            Ok(Report {
                passed: r.passed,
                json: to_value(&r),
                text,
            })
        }
        Command::VerifyPseudocircle {
            module,
            seed,
            count,
        } => pseudocircle(module.as_deref(), *seed, *count),
        Command::DumpShape { space } => {
            let shape = load_shape(space)?;
            let text = to_json_pretty(&shape_to_dto(&shape));
            Ok(Report {
                passed: true,
                json: to_value(&shape_to_dto(&shape)),
                text,
            })
        }
    }
}

fn snf(input: &Path) -> Result<Report, InputError> {
    let dto = read_json(input)?;
    let m = in_file(input, matrix_from_input(&dto))?;
    let s = smith_normal_form(&m);
    let d: Vec<String> = s
        .invariant_factors()
        .iter()
        .map(|x| x.to_string())
        .collect();
    let text = format!(
        "invariant factors: [{}]\nrank: {}\nS = {}\n",
        d.join(", "),
        s.rank(),
        caselib_fmt(&s.s)
    );
    Ok(Report {
        passed: true,
        json: json!({
            "invariant_factors": d,
            "rank": s.rank(),
            "s": matrix_to_dto(&s.s),
            "u": matrix_to_dto(&s.u),
            "v": matrix_to_dto(&s.v),
        }),
        text,
    })
}

fn caselib_fmt(m: &filtk_core::intlin::IntMatrix) -> String {
    crate::caselib::fmt_matrix(m)
}

fn ck_k(space: Option<&str>, matrix: &Path) -> Result<Report, InputError> {
    let dto = read_json(matrix)?;
    let a = in_file(matrix, block_matrix_from_dto(&dto, "$"))?;
    let shape = match space {
        Some(s) => load_shape(s)?,
        None => {
            let name = match formats::space_to_dto(a.space()) {
                SpaceDto::Named(n) => n,
                SpaceDto::Inline { .. } => String::new(),
            };
            resources::builtin_shape(&name)
                .unwrap_or_else(|| Arc::new(DiagramShape::standard("space", a.space().clone())))
        }
    };
    if shape.space() != a.space() {
        return Err(InputError::Other(
            "the matrix lives over a different space than --space".into(),
        ));
    }
    let m = filtered_k(&a, shape.clone()).map_err(|e| InputError::Other(e.to_string()))?;
    let mut text = String::new();
    for v in 0..m.groups().len() {
        writeln!(text, "{:>8}  {}", shape.vertex_label(v), m.group(v)).unwrap();
    }
    Ok(Report {
        passed: true,
        json: to_value(&module_to_dto(&m)),
        text,
    })
}

fn solve(
    src: &DiagramModule,
    dst: &DiagramModule,
    pins: &BTreeMap<usize, filtk_core::intlin::IntMatrix>,
) -> Result<Report, InputError> {
    let shape = src.shape();
    match solve_hom(src, dst, pins)? {
        HomSolveOutcome::Solved { hom, forced } => {
            let forced: Vec<String> = forced
                .iter()
                .enumerate()
                .filter(|(_, f)| **f)
                .map(|(v, _)| shape.vertex_label(v))
                .collect();
            let comps = components_to_dto(shape, hom.components());
            let text = format!(
                "feasible; forced at {} of {} vertices\n",
                forced.len(),
                shape.vertices().len()
            );
            Ok(Report {
                passed: true,
                json: json!({ "feasible": true, "components": to_value(&comps), "forced": forced }),
                text,
            })
        }
        HomSolveOutcome::Infeasible {
            arrow,
            column,
            certificate,
        } => {
            let arrow = arrow.map(|a| shape.arrow_label(a));
            let mut text = format!("infeasible: {certificate}\n");
            if let (Some(a), Some(c)) = (&arrow, column) {
                writeln!(text, "  square at {a} fails on generator {c}").unwrap();
            }
            Ok(Report {
                passed: false,
                json: json!({
                    "feasible": false,
                    "arrow": arrow,
                    "generator": column,
                    "modulus": certificate.modulus.to_string(),
                    "residue": certificate.residue.to_string(),
                }),
                text,
            })
        }
    }
}

fn pseudocircle_text(r: &PseudocircleReport, text: &mut String) {
    for s in &r.steps {
        let bad: Vec<&str> = s
            .checked
            .iter()
            .filter(|c| !c.holds)
            .map(|c| c.vertex.as_str())
            .collect();
        writeln!(
            text,
            "  {} {:?} from {}: {}{}",
            s.corner,
            s.kind,
            s.corner_group,
            if s.passed { "PASS" } else { "FAIL" },
            if bad.is_empty() {
                String::new()
            } else {
                format!(" (fails at {})", bad.join(", "))
            }
        )
        .unwrap();
    }
    let zero: Vec<&str> = r
        .vanishing
        .iter()
        .filter(|v| !v.holds)
        .map(|v| v.vertex.as_str())
        .collect();
    if zero.is_empty() {
        writeln!(text, "  all {} groups vanish at the end", r.vanishing.len()).unwrap();
    } else {
        writeln!(text, "  still nonzero: {}", zero.join(", ")).unwrap();
    }
}

fn pseudocircle(
    module: Option<&Path>,
    seed: Option<u64>,
    count: u64,
) -> Result<Report, InputError> {
    let mut runs = Vec::new();
    let mut text = String::new();
    let mut passed = true;
    let inputs: Vec<(Option<u64>, DiagramModule)> = match (module, seed) {
        (Some(p), _) => vec![(None, load_module(p)?)],
        (None, seed) => {
            let start = seed.unwrap_or(0);
            let shape = resources::s21_shape();
            (start..start.saturating_add(count.max(1)))
                .map(|s| {
                    let a =
                        realize_space_random(&FiniteSpace::s21(), s, RandomMatrixParams::default());
                    filtered_k(&a, shape.clone())
                        .map(|m| (Some(s), m))
                        .map_err(|e| InputError::Other(e.to_string()))
                })
                .collect::<Result<_, _>>()?
        }
    };
    for (s, m) in inputs {
        let label = s.map_or_else(|| "module".to_string(), |s| format!("seed {s}"));
        match caselib::verify_pseudocircle_steps(&m) {
            Ok(r) => {
                writeln!(text, "{label}: {}", if r.passed { "PASS" } else { "FAIL" }).unwrap();
                pseudocircle_text(&r, &mut text);
                passed &= r.passed;
                runs.push(json!({ "seed": s, "passed": r.passed, "report": to_value(&r) }));
            }
            Err(CaseError::Precondition(why)) => {
                writeln!(text, "{label}: FAIL precondition").unwrap();
                why.iter().for_each(|w| writeln!(text, "  {w}").unwrap());
                passed = false;
                runs.push(json!({ "seed": s, "passed": false, "precondition": why }));
            }
            Err(e) => return Err(e.into()),
        }
    }
    text.push_str(if passed { "PASS\n" } else { "FAIL\n" });
    Ok(Report {
        passed,
        json: json!({ "passed": passed, "runs": runs }),
        text,
    })
}

//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 validation failure
//! (malformed problem file, rank or second-class violation), 3 refused
//! computation.

pub mod problem;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::Zero;
use serde_json::json;

use crate::bracket::{bracket, BracketKind};
use crate::constraint::{build_dirac_structure, random_symplectic, DiracStructure};
use crate::dynamics::{monomial_text, project_to_m, FloatSymbol, HamiltonianSystem, Trajectory};
use crate::error::{DynamicsError, StructureError};
use crate::matrix::QMatrix;
use crate::parse::parse_symbol;
use crate::reduction::darboux_basis;
use crate::star::{reduce_to_canonical, star};
use crate::symbol::{PhaseSpace, Symbol};

use problem::{load_problem, LoadError, Problem};

/// Initial points are projected onto the constraint surface; larger
/// adjustments than this are reported.
const PROJECTION_WARN: f64 = 1e-9;

#[derive(Debug, Parser)]
#[command(
    name = "dirac-moyal",
    version,
    about = "Exact Dirac brackets, star products and Moyal brackets for linearly constrained systems"
)]
struct Cli {
    /// Write the result to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Poisson,
    Dirac,
    Moyal,
}

impl From<Kind> for BracketKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Poisson => BracketKind::Poisson,
            Kind::Dirac => BracketKind::Dirac,
            Kind::Moyal => BracketKind::Moyal,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the rank and second-class conditions of the constraints.
    Check { problem: PathBuf },
    /// Print C, its inverse, the Dirac kernel, its rank and the pivot columns.
    Structure {
        problem: PathBuf,
        /// Apply a seeded random symplectic transform first.
        #[arg(long)]
        transform: Option<u64>,
    },
    /// Poisson, Dirac or Moyal bracket of two expressions.
    Bracket {
        #[arg(long, value_enum)]
        kind: Kind,
        problem: PathBuf,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
        /// Print the class representative on the constraint surface.
        #[arg(long)]
        reduce: bool,
    },
    /// Star product of two expressions.
    Star {
        problem: PathBuf,
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
        #[arg(long)]
        reduce: bool,
    },
    /// Class representative of an expression.
    Reduce {
        problem: PathBuf,
        #[arg(allow_hyphen_values = true)]
        a: String,
    },
    /// Darboux chart of the Dirac kernel.
    Darboux { problem: PathBuf },
    /// Classical trajectory, or Moyal evolution of an observable with --quantum.
    Evolve {
        problem: PathBuf,
        #[arg(long = "t")]
        t_end: f64,
        #[arg(long)]
        dt: f64,
        /// Initial point, e.g. "q1=1,p1=0"; unlisted coordinates are 0.
        #[arg(long, allow_hyphen_values = true)]
        initial: Option<String>,
        #[arg(long)]
        quantum: bool,
        #[arg(long, allow_hyphen_values = true)]
        observable: Option<String>,
    },
}

/// Result of one CLI invocation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Validation(String),
    Refusal(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Validation(_) => 2,
            Failure::Refusal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Validation(m) | Failure::Refusal(m) => m,
        }
    }
}

impl From<LoadError> for Failure {
    fn from(e: LoadError) -> Self {
        match e {
            LoadError::Io(m) => Failure::Usage(m),
            LoadError::Invalid(m) => Failure::Validation(m),
        }
    }
}

impl From<StructureError> for Failure {
    fn from(e: StructureError) -> Self {
        Failure::Validation(format!("{}: {e}", structure_error_name(&e)))
    }
}

fn structure_error_name(e: &StructureError) -> &'static str {
    match e {
        StructureError::BadShape(_) => "BadShape",
        StructureError::RankDeficient { .. } => "RankDeficient",
        StructureError::SecondClassViolation => "SecondClassViolation",
        StructureError::SymplecticViolation => "SymplecticViolation",
    }
}

impl From<DynamicsError> for Failure {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::DegreeUnsupported { .. } => Failure::Refusal(format!("DegreeUnsupported: {e}")),
            DynamicsError::InitialConditionOffM { .. } => Failure::Validation(format!("InitialConditionOffM: {e}")),
            DynamicsError::NonClassicalHamiltonian => Failure::Validation(e.to_string()),
            DynamicsError::BadStep(_) | DynamicsError::Algebra(_) => Failure::Usage(e.to_string()),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    let mut stderr = String::new();
    let result = dispatch(&cli, &mut stderr);
    let (code, body) = match result {
        Ok(body) => (0, body),
        Err((f, partial)) => {
            let _ = writeln!(stderr, "error: {}", f.message());
            (f.code(), partial)
        }
    };
    if let Some(path) = &cli.out {
        if let Err(e) = std::fs::write(path, &body) {
            let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
            return Outcome { code: 1, stdout: String::new(), stderr };
        }
        return Outcome { code, stdout: String::new(), stderr };
    }
    Outcome { code, stdout: body, stderr }
}

type Dispatch = Result<String, (Failure, String)>;

fn plain<T>(r: Result<T, Failure>) -> Result<T, (Failure, String)> {
    r.map_err(|f| (f, String::new()))
}

fn dispatch(cli: &Cli, stderr: &mut String) -> Dispatch {
    let format = cli.format.unwrap_or(Format::Text);
    match &cli.command {
        Command::Check { problem } => cmd_check(problem, format),
        Command::Structure { problem, transform } => plain(cmd_structure(problem, *transform, format)),
        Command::Bracket { kind, problem, a, b, reduce } => {
            plain(cmd_binary(problem, a, b, *reduce, format, |x, y, ds| bracket((*kind).into(), x, y, ds)))
        }
        Command::Star { problem, a, b, reduce } => plain(cmd_binary(problem, a, b, *reduce, format, star)),
        Command::Reduce { problem, a } => plain(cmd_reduce(problem, a, format)),
        Command::Darboux { problem } => plain(cmd_darboux(problem, format)),
        Command::Evolve { problem, t_end, dt, initial, quantum, observable } => plain(cmd_evolve(
            problem,
            EvolveArgs {
                t_end: *t_end,
                dt: *dt,
                initial: initial.as_deref(),
                quantum: *quantum,
                observable: observable.as_deref(),
            },
            format,
            stderr,
        )),
    }
}

fn load_structure(path: &Path) -> Result<(Problem, DiracStructure), Failure> {
    let problem = load_problem(path)?;
    let ds = build_dirac_structure(problem.space, problem.alpha.clone())?;
    Ok((problem, ds))
}

fn parse_expr(text: &str, space: PhaseSpace) -> Result<Symbol, Failure> {
    parse_symbol(text, space).map_err(|e| Failure::Usage(format!("in `{text}`: {e}")))
}

fn pretty(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("json values serialize");
    s.push('\n');
    s
}

fn cmd_check(path: &Path, format: Format) -> Dispatch {
    let problem = plain(load_problem(path).map_err(Failure::from))?;
    let alpha = &problem.alpha;
    let rows = alpha.rows();
    let dim = problem.space.dim();
    let shape_ok = rows > 0 && rows % 2 == 0 && rows < dim;
    let rank = alpha.rank();
    let rank_ok = rank == rows;
    let c = &(alpha * &QMatrix::symplectic(problem.space.pairs())) * &alpha.transpose();
    let det = c.determinant();
    let det_ok = !det.is_zero();

    let failure = if !shape_ok {
        Some(StructureError::BadShape(format!("{rows} constraints in {dim} dimensions")))
    } else if !rank_ok {
        Some(StructureError::RankDeficient { rank, expected: rows })
    } else if !det_ok {
        Some(StructureError::SecondClassViolation)
    } else {
        None
    };
    let verdict = |ok: bool, err: &str| if ok { "PASS".to_string() } else { format!("FAIL {err}") };

    let body = match format {
        Format::Json => pretty(json!({
            "name": problem.name,
            "n": problem.space.pairs(),
            "constraints": rows,
            "shape_ok": shape_ok,
            "rank": rank,
            "required_rank": rows,
            "rank_ok": rank_ok,
            "det_c": det.to_string(),
            "second_class_ok": det_ok,
            "pass": failure.is_none(),
            "failure": failure.as_ref().map(structure_error_name),
        })),
        _ => {
            let mut s = String::new();
            if let Some(name) = &problem.name {
                let _ = writeln!(s, "problem: {name}");
            }
            let _ = writeln!(s, "n = {}, constraints = {rows}", problem.space.pairs());
            if !shape_ok {
                let _ = writeln!(s, "shape: FAIL BadShape");
            }
            let _ = writeln!(s, "rank(alpha) = {rank} (required {rows}): {}", verdict(rank_ok, "RankDeficient"));
            let _ = writeln!(s, "det C = {det}: {}", verdict(det_ok, "SecondClassViolation"));
            let _ = writeln!(s, "result: {}", if failure.is_none() { "PASS" } else { "FAIL" });
            s
        }
    };
    match failure {
        None => Ok(body),
        Some(e) => Err((Failure::from(e), body)),
    }
}

fn coordinate_names(space: PhaseSpace, idx: &[usize]) -> Vec<String> {
    idx.iter().map(|&i| space.coordinate_name(i)).collect()
}

fn cmd_structure(path: &Path, transform: Option<u64>, format: Format) -> Result<String, Failure> {
    let (problem, mut ds) = load_structure(path)?;
    let s = transform.map(|seed| random_symplectic(problem.space, seed));
    if let Some(s) = &s {
        ds = ds.apply_symplectic_transform(s)?;
    }
    let rank = ds.jd_rank();
    let pivots = coordinate_names(problem.space, ds.pivot_columns());
    Ok(match format {
        Format::Json => {
            let mut v = json!({
                "C": ds.c().to_strings(),
                "C_inv": ds.c_inv().to_strings(),
                "JD": ds.jd().to_strings(),
                "rank": rank,
                "pivot_columns": pivots,
            });
            if let Some(s) = &s {
                v["transform"] = json!(s.to_strings());
                v["alpha"] = json!(ds.alpha().to_strings());
            }
            pretty(v)
        }
        _ => {
            let mut out = String::new();
            if let Some(s) = &s {
                let _ = writeln!(out, "transform = {s}");
                let _ = writeln!(out, "alpha = {}", ds.alpha());
            }
            let _ = writeln!(out, "C = {}", ds.c());
            let _ = writeln!(out, "C_inv = {}", ds.c_inv());
            let _ = writeln!(out, "JD = {}", ds.jd());
            let _ = writeln!(out, "rank(JD) = {rank}");
            let _ = writeln!(out, "pivot_columns = [{}]", pivots.join(", "));
            out
        }
    })
}

fn symbol_output(s: &Symbol, format: Format) -> String {
    match format {
        Format::Json => pretty(json!({ "result": s.to_string() })),
        _ => format!("{s}\n"),
    }
}

fn cmd_binary<F>(path: &Path, a: &str, b: &str, reduce: bool, format: Format, op: F) -> Result<String, Failure>
where
    F: Fn(&Symbol, &Symbol, &DiracStructure) -> Result<Symbol, crate::error::AlgebraError>,
{
    let (problem, ds) = load_structure(path)?;
    let a = parse_expr(a, problem.space)?;
    let b = parse_expr(b, problem.space)?;
    let mut r = op(&a, &b, &ds).map_err(|e| Failure::Usage(e.to_string()))?;
    if reduce {
        r = reduce_to_canonical(&r, &ds).map_err(|e| Failure::Usage(e.to_string()))?.into_representative();
    }
    Ok(symbol_output(&r, format))
}

fn cmd_reduce(path: &Path, a: &str, format: Format) -> Result<String, Failure> {
    let (problem, ds) = load_structure(path)?;
    let a = parse_expr(a, problem.space)?;
    let r = reduce_to_canonical(&a, &ds).map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(symbol_output(r.representative(), format))
}

fn cmd_darboux(path: &Path, format: Format) -> Result<String, Failure> {
    let (_, ds) = load_structure(path)?;
    let chart = darboux_basis(&ds);
    let gram = chart.gram(&ds);
    Ok(match format {
        Format::Json => pretty(json!({
            "T": chart.t().to_strings(),
            "T_inv": chart.t_inv().to_strings(),
            "gram": gram.to_strings(),
            "reduced_pairs": chart.reduced_space().pairs(),
        })),
        _ => format!("T = {}\nT_inv = {}\ngram = {}\n", chart.t(), chart.t_inv(), gram),
    })
}

struct EvolveArgs<'a> {
    t_end: f64,
    dt: f64,
    initial: Option<&'a str>,
    quantum: bool,
    observable: Option<&'a str>,
}

fn parse_initial(text: &str, space: PhaseSpace) -> Result<Vec<f64>, Failure> {
    let mut z = vec![0.0; space.dim()];
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) = item
            .split_once('=')
            .ok_or_else(|| Failure::Usage(format!("--initial entry `{item}` is not name=value")))?;
        let idx = space
            .coordinate_index(name.trim())
            .ok_or_else(|| Failure::Usage(format!("--initial: unknown coordinate `{}`", name.trim())))?;
        let v: f64 = value
            .trim()
            .parse()
            .map_err(|_| Failure::Usage(format!("--initial: bad value `{}` for {}", value.trim(), name.trim())))?;
        if !v.is_finite() {
            return Err(Failure::Usage(format!("--initial: non-finite value for {}", name.trim())));
        }
        z[idx] = v;
    }
    Ok(z)
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn trajectory_header(space: PhaseSpace, constraints: usize) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    cols.extend((0..space.dim()).map(|i| space.coordinate_name(i)));
    cols.extend((1..=constraints).map(|k| format!("phi{k}")));
    cols.push("H".into());
    cols
}

fn trajectory_rows(traj: &Trajectory) -> impl Iterator<Item = Vec<f64>> + '_ {
    (0..traj.len()).map(move |k| {
        let mut row = vec![traj.times[k]];
        row.extend(&traj.points[k]);
        row.extend(&traj.constraint_residuals[k]);
        row.push(traj.energy[k]);
        row
    })
}

fn render_trajectory(traj: &Trajectory, space: PhaseSpace, constraints: usize, format: Format) -> String {
    let header = trajectory_header(space, constraints);
    let mut out = String::new();
    match format {
        Format::Json => {
            out.push_str("[\n");
            for (k, row) in trajectory_rows(traj).enumerate() {
                let fields: Vec<String> =
                    header.iter().zip(&row).map(|(h, v)| format!("\"{h}\": {}", num(*v))).collect();
                let sep = if k + 1 == traj.len() { "" } else { "," };
                let _ = writeln!(out, "  {{{}}}{sep}", fields.join(", "));
            }
            out.push_str("]\n");
        }
        _ => {
            let _ = writeln!(out, "{}", header.join(","));
            for row in trajectory_rows(traj) {
                let fields: Vec<String> = row.iter().map(|v| num(*v)).collect();
                let _ = writeln!(out, "{}", fields.join(","));
            }
        }
    }
    out
}

fn render_float_symbol(s: &FloatSymbol, format: Format) -> String {
    let mut terms: Vec<_> = s.terms().iter().collect();
    terms.sort_by(|a, b| {
        (std::cmp::Reverse(a.0.degree()), std::cmp::Reverse(a.0.exponents()), a.1).cmp(&(
            std::cmp::Reverse(b.0.degree()),
            std::cmp::Reverse(b.0.exponents()),
            b.1,
        ))
    });
    match format {
        Format::Json => {
            let items: Vec<String> = terms
                .iter()
                .map(|(m, k, c)| {
                    format!(
                        "  {{\"monomial\": \"{}\", \"re\": {}, \"im\": {}}}",
                        monomial_text(m, *k),
                        num(c.re),
                        num(c.im)
                    )
                })
                .collect();
            format!("[\n{}\n]\n", items.join(",\n"))
        }
        Format::Csv => {
            let mut out = String::from("monomial,re,im\n");
            for (m, k, c) in terms {
                let _ = writeln!(out, "{},{},{}", monomial_text(m, *k), num(c.re), num(c.im));
            }
            out
        }
        Format::Text => format!("{s}\n"),
    }
}

fn cmd_evolve(path: &Path, args: EvolveArgs<'_>, format: Format, stderr: &mut String) -> Result<String, Failure> {
    let (problem, ds) = load_structure(path)?;
    let h = problem.hamiltonian.clone().ok_or_else(|| Failure::Validation("problem file has no hamiltonian".into()))?;
    let constraints = ds.alpha().rows();
    let sys = HamiltonianSystem::new(ds, h)?;
    if args.quantum {
        let obs = args.observable.ok_or_else(|| Failure::Usage("--quantum requires --observable <expr>".into()))?;
        let a0 = parse_expr(obs, problem.space)?;
        let evolved = sys.evolve_symbol_moyal(&a0, args.t_end, args.dt)?;
        return Ok(render_float_symbol(&evolved, format));
    }
    let initial = args.initial.ok_or_else(|| Failure::Usage("evolve requires --initial \"q1=...,p1=...\"".into()))?;
    let z0 = parse_initial(initial, problem.space)?;
    let projected = project_to_m(&z0, sys.structure());
    let shift = z0.iter().zip(&projected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if shift > PROJECTION_WARN {
        let _ = writeln!(stderr, "warning: initial point moved by {shift:e} onto the constraint surface");
    }
    let traj = sys.integrate_classical(&projected, args.t_end, args.dt)?;
    Ok(render_trajectory(&traj, problem.space, constraints, format))
}

use std::fs;
use std::io;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use cone_deform::angle::{
    leading_trailing_curve, leading_trailing_edge, span_report, stas_basis, tas_basis, SpanReport,
};
use cone_deform::checks::{verify, verify_random, VerifyOptions, VerifyReport};
use cone_deform::exact::{rank_exact, to_small, BigInt};
use cone_deform::fixtures;
use cone_deform::geometry::{angles_from_shapes, volume};
use cone_deform::gluing::{
    complex_curvature, gauss_bonnet_check, log_curvature, log_string, monomial_string, neumann_matrix,
    GaussBonnetRecord, DEFAULT_RANK_TOL,
};
use cone_deform::io::{
    parse_base_edges, parse_path, parse_shapes, parse_target, shapes_json, to_json_string, CurveFile, Curves,
};
use cone_deform::peripheral::{boundary_map, holonomy_monomial_string};
use cone_deform::solver::{positivity_check, IterationRecord, LevelSetSystem, PositivityReport, SolveOptions};
use cone_deform::{Error, QuadIncidence, ShapeAssignment, ShapeConvention, TriFile};

/// Gluing equations, angle structures and shape solving for ideal
/// triangulations.
///
/// File arguments that do not exist on disk are looked up among the
/// embedded fixtures by name (`table1`, `table2`, `table2_curves`, `z0`,
/// `u0_t0`, `near_z0`, ...).
#[derive(Parser)]
#[command(name = "cone-deform", version)]
struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Counts, link genera, the dimension lemma, rank of the Neumann matrix and dim TAS.
    Analyze(TriArgs),
    /// Curvature monomials, log-curvature sums, the Neumann matrix and holonomy monomials.
    Equations(CurveArgs),
    /// Bases of TAS and STAS and the leading–trailing deformations.
    Tas(CurveArgs),
    /// Evaluate G, c, H_L, volume and Gauss–Bonnet at a shape point.
    Eval {
        #[command(flatten)]
        curves: CurveArgs,
        /// Preferred shape values, `{"0": [re, im], ...}`.
        #[arg(long)]
        shapes: String,
    },
    /// Solve (G, H_L)(z) = (u, t) by Gauss–Newton.
    Solve {
        #[command(flatten)]
        curves: CurveArgs,
        /// Target file `{"u": [...], "t": [...]}`.
        #[arg(long)]
        target: String,
        /// Starting preferred shape values.
        #[arg(long)]
        start: String,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Follow a level set of G through a sequence of holonomy targets.
    Trace {
        #[command(flatten)]
        curves: CurveArgs,
        /// Path file `{"u": [...], "path": [[...], ...]}`.
        #[arg(long)]
        path: String,
        #[arg(long)]
        start: String,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Run the invariant suite on a triangulation, or on random ones with `random`.
    Verify {
        #[command(flatten)]
        curves: CurveArgs,
        /// Random shape points per sampled check.
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random triangulations for `verify random`.
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
        rank_tol: f64,
    },
    /// List embedded fixtures, or print one.
    Fixtures { name: Option<String> },
}

#[derive(Args)]
struct TriArgs {
    /// Triangulation file or fixture name.
    tri: String,
    /// Base edge per tetrahedron: `12` for all, or `0:12 3:03 ...`.
    #[arg(long)]
    base_edge: Option<String>,
}

#[derive(Args)]
struct CurveArgs {
    #[command(flatten)]
    tri: TriArgs,
    /// Curve file; defaults to the fixture's curves for a fixture triangulation.
    #[arg(long)]
    curves: Option<String>,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    rank_tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iter: usize,
}

impl SolverArgs {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            tol: self.tol,
            rank_tol: self.rank_tol,
            max_iter: self.max_iter,
            ..SolveOptions::default()
        }
    }
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InfeasibleTarget { .. } => 3,
            Error::MaxIterations { .. }
            | Error::LineSearchFailed { .. }
            | Error::LeftDomain { .. }
            | Error::RankDeficientJacobian { .. }
            | Error::StepTooLarge { .. } => 1,
            _ => 2,
        };
        let message = match &e {
            Error::LeftDomain { last_valid } => format!("{e}; last valid point {}", fmt_vec(last_valid)),
            _ => e.to_string(),
        };
        Failure { code, message }
    }
}

type Outcome = Result<ExitCode, Failure>;

fn read_input(arg: &str) -> Result<String, Failure> {
    match fs::read_to_string(arg) {
        Ok(text) => Ok(text),
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            fixtures::data_file(arg).map(str::to_string).ok_or_else(|| Failure {
                code: 2,
                message: format!("{arg}: no such file or fixture"),
            })
        }
        Err(e) => Err(Failure {
            code: 2,
            message: format!("{arg}: {e}"),
        }),
    }
}

struct Loaded {
    tri: TriFile,
    conv: ShapeConvention,
    inc: QuadIncidence,
    curves: Option<Curves>,
}

fn load_tri(args: &TriArgs) -> Result<(TriFile, ShapeConvention, String), Failure> {
    let text = read_input(&args.tri)?;
    let tri = TriFile::parse(&text)?;
    let conv = match &args.base_edge {
        Some(spec) => {
            let edges = parse_base_edges(spec, tri.triangulation.tet_count())?;
            ShapeConvention::from_base_edges(&tri.triangulation, &edges)?
        }
        None => tri.convention(),
    };
    Ok((tri, conv, text))
}

fn load(args: &CurveArgs) -> Result<Loaded, Failure> {
    let (tri, conv, text) = load_tri(&args.tri)?;
    let curve_text = match &args.curves {
        Some(path) => Some(read_input(path)?),
        None => {
            let stem = Path::new(&args.tri.tri)
                .file_stem()
                .and_then(|s| s.to_str())
                .unwrap_or_default();
            match fixtures::data_file(stem) {
                // Arc paths do not depend on the shape convention, so they
                // stay valid under --base-edge.
                Some(fixture) if fixture == text => fixtures::data_file(&format!("{stem}_curves_arcpath"))
                    .or_else(|| fixtures::data_file(&format!("{stem}_curves")))
                    .map(str::to_string),
                _ => None,
            }
        }
    };
    let curves = match curve_text {
        Some(t) => Some(CurveFile::parse(&t)?.resolve(&tri.triangulation, &conv)?),
        None => None,
    };
    let inc = QuadIncidence::new(&tri.triangulation);
    Ok(Loaded { tri, conv, inc, curves })
}

/// Twelve decimals; values that would print as `-0.000000000000` show as zero.
fn fmt_c(z: Complex64) -> String {
    let clean = |x: f64| if x.abs() < 5e-13 { 0.0 } else { x };
    format!("{:.12}{:+.12}i", clean(z.re), clean(z.im))
}

fn fmt_vec(v: &[Complex64]) -> String {
    let parts: Vec<String> = v.iter().map(|&z| fmt_c(z)).collect();
    format!("[{}]", parts.join(", "))
}

fn emit<T: Serialize>(value: &T) -> Result<(), Failure> {
    println!("{}", to_json_string(value)?);
    Ok(())
}

#[derive(Serialize)]
struct AnalyzeReport {
    tetrahedra: usize,
    edges: usize,
    vertices: usize,
    genera: Vec<u32>,
    lemma_ok: bool,
    neumann_rank: usize,
    expected_rank: usize,
    tas_dimension: usize,
}

fn analyze(args: &TriArgs, json: bool) -> Outcome {
    let (tri, conv, _) = load_tri(args)?;
    let t = &tri.triangulation;
    let inc = QuadIncidence::new(t);
    let s = t.census_summary();
    let report = AnalyzeReport {
        tetrahedra: s.tetrahedra,
        edges: s.edges,
        vertices: s.vertices,
        genera: s.genera.clone(),
        lemma_ok: s.lemma_ok,
        neumann_rank: rank_exact(&neumann_matrix(&inc, &conv)),
        expected_rank: s.tetrahedra - t.genus_sum(),
        tas_dimension: tas_basis(&inc).len(),
    };
    if json {
        emit(&report)?;
    } else {
        let genera: Vec<String> = report.genera.iter().map(u32::to_string).collect();
        println!(
            "|T|={} |E|={} |V|={} genera=[{}] rank(B)={} dimTAS={}",
            report.tetrahedra,
            report.edges,
            report.vertices,
            genera.join(","),
            report.neumann_rank,
            report.tas_dimension
        );
        println!(
            "lemma |T|-|E|+|V| = Σg: {}",
            if report.lemma_ok { "holds" } else { "FAILS" }
        );
        println!("|T|-Σg={}", report.expected_rank);
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct EdgeEquation {
    edge: usize,
    monomial: String,
    log: String,
}

#[derive(Serialize)]
struct CurveEquation {
    name: String,
    monomial: String,
    index_vector: Vec<i64>,
}

#[derive(Serialize)]
struct EquationsReport {
    edges: Vec<EdgeEquation>,
    neumann: Vec<Vec<i64>>,
    curves: Vec<CurveEquation>,
}

fn equations(args: &CurveArgs, json: bool) -> Outcome {
    let l = load(args)?;
    let report = EquationsReport {
        edges: (0..l.inc.edges)
            .map(|e| EdgeEquation {
                edge: e,
                monomial: monomial_string(&l.inc, &l.conv, e),
                log: log_string(&l.inc, &l.conv, e),
            })
            .collect(),
        neumann: neumann_matrix(&l.inc, &l.conv),
        curves: l
            .curves
            .iter()
            .flat_map(|c| c.names.iter().zip(&c.ind))
            .map(|(name, ind)| CurveEquation {
                name: name.clone(),
                monomial: holonomy_monomial_string(ind, &l.conv),
                index_vector: ind.clone(),
            })
            .collect(),
    };
    if json {
        emit(&report)?;
        return Ok(ExitCode::SUCCESS);
    }
    for e in &report.edges {
        println!("c(e{}) = {}", e.edge, e.monomial);
        println!("G(e{}) = {}", e.edge, e.log);
    }
    println!("Neumann matrix:");
    for row in &report.neumann {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>3}")).collect();
        println!("  {}", cells.join(""));
    }
    for c in &report.curves {
        println!("exp H({}) = {}", c.name, c.monomial);
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct TasReport {
    tas_dimension: usize,
    tas_basis: Vec<Vec<i64>>,
    edge_deformations: Vec<Vec<i64>>,
    edge_span: SpanReport,
    curve_deformations: Vec<Vec<i64>>,
    stas_dimension: Option<usize>,
    stas_expected: Option<usize>,
    stas_basis: Vec<Vec<i64>>,
    combined_span: Option<SpanReport>,
}

fn small_basis(b: &[Vec<BigInt>]) -> Result<Vec<Vec<i64>>, Failure> {
    b.iter()
        .map(|v| {
            to_small(v).ok_or_else(|| Failure {
                code: 2,
                message: "basis entry does not fit in 64 bits".into(),
            })
        })
        .collect()
}

fn tas(args: &CurveArgs, json: bool) -> Outcome {
    let l = load(args)?;
    let basis = tas_basis(&l.inc);
    let qe: Vec<Vec<i64>> = (0..l.inc.edges).map(|e| leading_trailing_edge(&l.inc, e)).collect();
    let mut report = TasReport {
        tas_dimension: basis.len(),
        tas_basis: small_basis(&basis)?,
        edge_span: span_report(&qe, Some(&basis)),
        edge_deformations: qe.clone(),
        curve_deformations: Vec::new(),
        stas_dimension: None,
        stas_expected: None,
        stas_basis: Vec::new(),
        combined_span: None,
    };
    if let Some(c) = &l.curves {
        let ql: Vec<Vec<i64>> = c.ind.iter().map(|i| leading_trailing_curve(&l.inc, i)).collect();
        let stas = stas_basis(&l.inc, &c.ind);
        let mut all = qe;
        all.extend(ql.iter().cloned());
        report.combined_span = Some(span_report(&all, Some(&stas.basis)));
        report.stas_dimension = Some(stas.dimension);
        report.stas_expected = Some(stas.expected);
        report.stas_basis = small_basis(&stas.basis)?;
        report.curve_deformations = ql;
    }
    if json {
        emit(&report)?;
        return Ok(ExitCode::SUCCESS);
    }
    println!("dim TAS = {}", report.tas_dimension);
    for v in &report.tas_basis {
        println!("  {v:?}");
    }
    println!(
        "dim span Q_e = {} (contained in TAS: {})",
        report.edge_span.dimension,
        report.edge_span.contained == Some(true)
    );
    for (e, q) in report.edge_deformations.iter().enumerate() {
        println!("  Q_e{e} = {q:?}");
    }
    if let (Some(d), Some(x)) = (report.stas_dimension, report.stas_expected) {
        println!("dim STAS = {d} (expected {x})");
        for v in &report.stas_basis {
            println!("  {v:?}");
        }
        for (k, q) in report.curve_deformations.iter().enumerate() {
            println!("  Q_curve{k} = {q:?}");
        }
        if let Some(s) = &report.combined_span {
            println!("span Q_e ∪ Q_curves = STAS: {}", s.equal == Some(true));
        }
    } else {
        println!("no curves given; STAS not computed");
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct NamedValue {
    name: String,
    value: Complex64,
}

#[derive(Serialize)]
struct EvalReport {
    positivity: PositivityReport,
    log_curvature: Vec<Complex64>,
    complex_curvature: Vec<Complex64>,
    exp_log_matches: bool,
    holonomy: Vec<NamedValue>,
    volume: f64,
    gauss_bonnet: Vec<GaussBonnetRecord>,
}

fn eval(args: &CurveArgs, shapes: &str, json: bool) -> Outcome {
    let l = load(args)?;
    let values = parse_shapes(&read_input(shapes)?, l.tri.triangulation.tet_count())?;
    let z = ShapeAssignment::from_preferred(&l.conv, &values)?;
    let positivity = positivity_check(&z.z);
    z.check_positive()?;
    let g = log_curvature(&l.inc, &z)?;
    let c = complex_curvature(&l.inc, &z)?;
    let exp_log_matches = g
        .iter()
        .zip(&c)
        .all(|(a, b)| (a.exp() - b).norm() <= 1e-9 * b.norm().max(1.0));
    let holonomy = match &l.curves {
        Some(cv) => cv
            .names
            .iter()
            .zip(boundary_map(&cv.ind, &z)?)
            .map(|(n, v)| NamedValue {
                name: n.clone(),
                value: v,
            })
            .collect(),
        None => Vec::new(),
    };
    let report = EvalReport {
        positivity,
        log_curvature: g,
        complex_curvature: c,
        exp_log_matches,
        holonomy,
        volume: volume(&angles_from_shapes(&z)?),
        gauss_bonnet: gauss_bonnet_check(&l.tri.triangulation, &l.inc, &z)?,
    };
    if json {
        emit(&report)?;
        return Ok(ExitCode::SUCCESS);
    }
    println!(
        "positively oriented: {} (min Im {:.12})",
        report.positivity.positive, report.positivity.min_margin
    );
    for (e, (g, c)) in report.log_curvature.iter().zip(&report.complex_curvature).enumerate() {
        println!("e{e}: G = {}  c = {}", fmt_c(*g), fmt_c(*c));
    }
    println!("exp G = c: {}", report.exp_log_matches);
    for h in &report.holonomy {
        println!("H({}) = {}", h.name, fmt_c(h.value));
    }
    println!("volume = {:.12}", report.volume);
    for r in &report.gauss_bonnet {
        println!(
            "Gauss–Bonnet at vertex {}: {:.12} vs {:.12} ({})",
            r.vertex,
            r.angle_sum_defect,
            r.expected,
            if r.ok { "ok" } else { "FAIL" }
        );
    }
    Ok(ExitCode::SUCCESS)
}

fn system<'a>(l: &'a Loaded, empty: &'a [Vec<i64>]) -> Result<LevelSetSystem<'a>, Failure> {
    let curves = l.curves.as_ref().map_or(empty, |c| c.ind.as_slice());
    Ok(LevelSetSystem::new(&l.tri.triangulation, &l.conv, curves)?)
}

#[derive(Serialize)]
struct SolveReport {
    converged: bool,
    iterations: usize,
    residual_norm: f64,
    shapes: std::collections::BTreeMap<String, Complex64>,
    positivity: PositivityReport,
    trace: Vec<IterationRecord>,
}

fn solve(args: &CurveArgs, target: &str, start: &str, solver: &SolverArgs, json: bool) -> Outcome {
    let l = load(args)?;
    let target = parse_target(&read_input(target)?)?;
    let start = parse_shapes(&read_input(start)?, l.tri.triangulation.tet_count())?;
    let sys = system(&l, &[])?;
    let res = sys.solve(&target, &start, &solver.options())?;
    let report = SolveReport {
        converged: res.converged,
        iterations: res.iterations,
        residual_norm: res.residual_norm,
        shapes: shapes_json(&res.preferred),
        positivity: positivity_check(&res.z.z),
        trace: res.trace,
    };
    if json {
        emit(&report)?;
    } else {
        println!(
            "converged in {} iterations, residual {:.3e}",
            report.iterations, report.residual_norm
        );
        for (k, w) in res.preferred.iter().enumerate() {
            println!("z{k} = {}", fmt_c(*w));
        }
        println!("min Im over all quads: {:.12}", report.positivity.min_margin);
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct TracePoint {
    index: usize,
    target: Vec<Complex64>,
    shapes: std::collections::BTreeMap<String, Complex64>,
    residual_norm: f64,
    iterations: usize,
}

fn trace(args: &CurveArgs, path: &str, start: &str, solver: &SolverArgs, json: bool) -> Outcome {
    let l = load(args)?;
    let pf = parse_path(&read_input(path)?)?;
    let start = parse_shapes(&read_input(start)?, l.tri.triangulation.tet_count())?;
    let sys = system(&l, &[])?;
    let res = sys.trace(&pf.u, &start, &pf.path, &solver.options())?;
    let points: Vec<TracePoint> = res
        .iter()
        .zip(&pf.path)
        .enumerate()
        .map(|(index, (r, t))| TracePoint {
            index,
            target: t.clone(),
            shapes: shapes_json(&r.preferred),
            residual_norm: r.residual_norm,
            iterations: r.iterations,
        })
        .collect();
    if json {
        emit(&points)?;
    } else {
        for (p, r) in points.iter().zip(&res) {
            println!(
                "[{}] t = {} -> z = {}",
                p.index,
                fmt_vec(&p.target),
                fmt_vec(&r.preferred)
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct VerifyOutput<'a> {
    all_pass: bool,
    report: &'a VerifyReport,
}

fn run_verify(args: &CurveArgs, samples: usize, seed: u64, count: usize, rank_tol: f64, json: bool) -> Outcome {
    let opts = VerifyOptions {
        samples,
        seed,
        rank_tol,
        ..VerifyOptions::default()
    };
    let report = if args.tri.tri == "random" {
        verify_random(count, seed, &opts)?
    } else {
        let l = load(args)?;
        verify(&l.tri.triangulation, &l.conv, l.curves.as_ref(), &opts)?
    };
    let all_pass = report.all_pass();
    if json {
        emit(&VerifyOutput {
            all_pass,
            report: &report,
        })?;
    } else {
        for item in &report.items {
            let mark = if item.skipped {
                "SKIP"
            } else if item.pass {
                "PASS"
            } else {
                "FAIL"
            };
            println!("{mark} {}: {}", item.name, item.detail);
        }
        let failed = report.failures().count();
        println!("{} checks, {failed} failed", report.items.len());
    }
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

const FIXTURE_FILES: [(&str, &str); 8] = [
    ("table1", "seven-tetrahedron once-cusped triangulation"),
    ("table2", "five-tetrahedron triangulation with links of genus 1 and 2"),
    ("table2_curves", "longitudes λ1, λ2, λ3 for table2 as index vectors"),
    ("table2_curves_arcpath", "the same longitudes as arc paths"),
    ("table2_z0", "the shape point z0 = (e^{iπ/3}, ...)"),
    ("table2_u0_t0", "target (G, H_L)(z0)"),
    ("table2_near_z0", "a start point near z0"),
    ("phi0", "rational curve of shapes on table1"),
];

#[derive(Serialize)]
struct Phi0Report {
    at_i: Vec<String>,
    positive_at_i: bool,
    region: fixtures::RegionReport,
}

fn show_fixture(name: Option<&str>, json: bool) -> Outcome {
    let Some(name) = name else {
        if json {
            let names: Vec<&str> = FIXTURE_FILES.iter().map(|f| f.0).collect();
            emit(&names)?;
        } else {
            for (n, d) in FIXTURE_FILES {
                println!("{n:<24}{d}");
            }
        }
        return Ok(ExitCode::SUCCESS);
    };
    if name == "phi0" {
        let report = Phi0Report {
            at_i: fixtures::phi0_at_i().iter().map(|z| z.to_string()).collect(),
            positive_at_i: fixtures::phi0_positive(Complex64::new(0.0, 1.0)),
            region: fixtures::phi0_region(200, (-1.0, 2.0), (0.0, 2.0)),
        };
        if json {
            emit(&report)?;
        } else {
            println!("φ0(i) = [{}]", report.at_i.join(", "));
            println!("positive at i: {}", report.positive_at_i);
            let r = &report.region;
            println!(
                "positive region on [-1,2]x[0,2] ({}x{} grid): {} cells, {} components, {} holes",
                r.grid, r.grid, r.positive_cells, r.components, r.holes
            );
        }
        return Ok(ExitCode::SUCCESS);
    }
    let text = fixtures::data_file(name).ok_or_else(|| Failure::from(Error::UnknownFixture(name.to_string())))?;
    print!("{text}");
    if !text.ends_with('\n') {
        println!();
    }
    Ok(ExitCode::SUCCESS)
}

fn run(cli: &Cli) -> Outcome {
    let json = cli.json;
    match &cli.command {
        Command::Analyze(a) => analyze(a, json),
        Command::Equations(a) => equations(a, json),
        Command::Tas(a) => tas(a, json),
        Command::Eval { curves, shapes } => eval(curves, shapes, json),
        Command::Solve {
            curves,
            target,
            start,
            solver,
        } => solve(curves, target, start, solver, json),
        Command::Trace {
            curves,
            path,
            start,
            solver,
        } => trace(curves, path, start, solver, json),
        Command::Verify {
            curves,
            samples,
            seed,
            count,
            rank_tol,
        } => run_verify(curves, *samples, *seed, *count, *rank_tol, json),
        Command::Fixtures { name } => show_fixture(name.as_deref(), json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

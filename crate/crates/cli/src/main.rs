//! `mahler`: evaluate, certify, descend, locate Santaló points and run
//! randomized scans on convex bodies stored as text files.
//!
//! Exit codes: 0 on success; `certify` returns 1 when no negative certificate
//! exists and 2 when the polygon is not critical; `scan` returns 1 when any
//! draw violates its bound; every other failure returns 2.

mod report;
mod scan;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mahler::descent::{concentration_report, descend, fit_parallelogram, DescentOptions};
use mahler::functional::{area, mahler as grid_mahler, polar_area};
use mahler::io::{read_body, write_body, write_certificate, write_trace_csv, Body};
use mahler::polygon::{certify_nonminimal, fd_quadratic_form_extrapolated, nonsymmetric_mahler};
use mahler::support::DEFAULT_GRID;
use mahler::{Error, GridSupport, PolygonSupport};

use report::Report;
use scan::ScanKind;

#[derive(Parser)]
#[command(name = "mahler", version, about = "Mahler volume toolkit for convex bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Areas, Mahler volume and admissibility diagnostics of a body file.
    Eval(EvalArgs),
    /// Search a symmetric critical polygon for a negative second variation.
    Certify(IoArgs),
    /// Projected gradient descent of the Mahler volume from a body file.
    Descend(DescendArgs),
    /// Santaló point and nonsymmetric Mahler volume of a polygon.
    Santalo(IoArgs),
    /// Randomized property scan.
    Scan(ScanArgs),
}

#[derive(Args)]
struct IoArgs {
    #[arg(long)]
    input: PathBuf,
    /// Write the report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Grid size of the quadrature cross-check for polygons.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid_n: usize,
    /// Tolerance on negative curvature cells of grid bodies.
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Args)]
struct DescendArgs {
    #[arg(long)]
    input: PathBuf,
    /// Directory receiving trace.csv, final.json and snapshots.
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grid size used when the input is a polygon.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid_n: usize,
    /// Stop once the projected gradient norm is below this.
    #[arg(long, default_value_t = 1e-7)]
    tol: f64,
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    /// Write a body snapshot every this many iterations (0 disables).
    #[arg(long, default_value_t = 0)]
    snapshot_every: usize,
    /// Amplitude of the random smooth perturbation of the start.
    #[arg(long, default_value_t = 1e-2)]
    kick: f64,
    /// Do not enforce central symmetry.
    #[arg(long)]
    asymmetric: bool,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_enum)]
    kind: ScanKind,
    #[arg(long, default_value_t = 100)]
    count: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Grid size for grid-based scans.
    #[arg(long, default_value_t = DEFAULT_GRID)]
    grid_n: usize,
    /// Violation slack (defaults depend on the kind).
    #[arg(long)]
    tol: Option<f64>,
    /// Write the per-draw table here; the summary still goes to standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: 2,
            message: e.to_string(),
        }
    }
}

fn invalid(message: String) -> Failure {
    Failure { code: 2, message }
}

fn check_tol(name: &str, tol: f64) -> Result<(), Failure> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("--{name} must be positive, got {tol}")))
    }
}

fn check_grid(n: usize) -> Result<(), Failure> {
    if n >= 8 && n.is_multiple_of(2) {
        Ok(())
    } else {
        Err(invalid(format!("--grid-n must be even and at least 8, got {n}")))
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => write_file(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn polygon_input(path: &Path) -> Result<PolygonSupport, Failure> {
    match read_body(path)? {
        Body::Polygon(p) => Ok(p),
        Body::Grid(_) => Err(invalid("expected a polygon body file".into())),
    }
}

fn eval(args: EvalArgs) -> Result<u8, Failure> {
    check_tol("tol", args.tol)?;
    check_grid(args.grid_n)?;
    let mut r = Report::new();
    match read_body(&args.io.input)? {
        Body::Grid(h) => {
            h.check_positive()?;
            let cells = h.cell_measures();
            let (worst, min_cell) = cells
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (j, &x)| if x < acc.1 { (j, x) } else { acc });
            if min_cell < -args.tol {
                return Err(Error::NonConvex {
                    cell: worst,
                    measure: min_cell,
                }
                .into());
            }
            let (a, b) = (area(&h)?, polar_area(&h)?);
            let mu = h.curvature_measure(h.default_atom_threshold())?;
            r.text("type", "grid")
                .int("n", h.n() as i64)
                .num("area", a)
                .num("polar_area", b)
                .num("mahler", a * b)
                .flag("symmetric", h.is_symmetric(1e-12))
                .num("symmetry_defect", h.symmetry_defect())
                .flag("convex", true)
                .num("min_cell_measure", min_cell)
                .int("atom_count", mu.atoms.len() as i64)
                .num("curvature_mass", mu.total_mass())
                .num("min_support", h.min());
        }
        Body::Polygon(p) => {
            let grid = grid_mahler(&p.sample(args.grid_n)?)?;
            r.text("type", "polygon")
                .int("m", p.m() as i64)
                .num("area", p.area())
                .num("polar_area", p.polar_area())
                .num("mahler", p.mahler())
                .flag("symmetric", p.is_symmetric())
                .flag("parallelogram", p.is_parallelogram())
                .list("edge_lengths", p.masses());
            if p.is_symmetric() {
                let foc = p.foc_residual()?;
                r.num("foc_residual", foc.iter().map(|x| x.abs()).fold(0.0, f64::max));
            }
            r.int("grid_n", args.grid_n as i64).num("grid_mahler", grid);
        }
    }
    emit(&r.render(), args.io.output.as_deref())?;
    Ok(0)
}

fn certify(args: IoArgs) -> Result<u8, Failure> {
    let p = polygon_input(&args.input)?;
    let cert = match certify_nonminimal(&p) {
        Ok(c) => c,
        Err(e @ Error::NotCritical { .. }) => {
            return Err(invalid(format!(
                "{e}; the first-order condition dJ = 0 fails for symmetric support changes"
            )))
        }
        Err(e) => return Err(e.into()),
    };
    let Some(c) = cert else {
        let why = if p.is_parallelogram() {
            "parallelogram: no certificate exists"
        } else {
            "no negative single-edge certificate"
        };
        eprintln!("{why}");
        emit("null\n", args.output.as_deref())?;
        return Ok(1);
    };
    let fd = fd_quadratic_form_extrapolated(&p, c.vertex_index);
    eprintln!(
        "certified: edge {} has quadratic form {:.17e} (finite difference {:.17e})",
        c.vertex_index, c.quadratic_form, fd
    );
    emit(&write_certificate(&c), args.output.as_deref())?;
    Ok(0)
}

fn descend_cmd(args: DescendArgs) -> Result<u8, Failure> {
    check_tol("tol", args.tol)?;
    check_grid(args.grid_n)?;
    if !(args.kick >= 0.0 && args.kick.is_finite()) {
        return Err(invalid(format!("--kick must be nonnegative, got {}", args.kick)));
    }
    let h0: GridSupport = match read_body(&args.input)? {
        Body::Grid(h) => h,
        Body::Polygon(p) => p.sample(args.grid_n)?,
    };
    let opts = DescentOptions {
        symmetric: !args.asymmetric,
        max_iters: args.max_iters,
        tol_grad: args.tol,
        snapshot_every: args.snapshot_every,
        initial_kick: args.kick,
        seed: args.seed,
        ..DescentOptions::default()
    };
    let trace = descend(&h0, &opts)?;
    let dir = &args.output;
    fs::create_dir_all(dir).map_err(|e| invalid(format!("{}: {e}", dir.display())))?;
    write_file(&dir.join("trace.csv"), &write_trace_csv(&trace))?;
    write_file(&dir.join("final.json"), &write_body(&Body::Grid(trace.final_body.clone())))?;
    if !trace.snapshots.is_empty() {
        let snaps = dir.join("snapshots");
        fs::create_dir_all(&snaps).map_err(|e| invalid(format!("{}: {e}", snaps.display())))?;
        for (it, h) in &trace.snapshots {
            write_file(
                &snaps.join(format!("iter_{it:06}.json")),
                &write_body(&Body::Grid(h.clone())),
            )?;
        }
    }
    let (topk, atoms) = concentration_report(&trace.final_body, 4)?;
    let mut r = Report::new();
    r.num("initial_mahler", trace.records.first().map_or(f64::NAN, |x| x.value))
        .num("final_mahler", trace.final_value())
        .int("iterations", trace.records.len() as i64)
        .text("stop_reason", trace.stop_reason.as_str())
        .num("projected_gradient", trace.projected_gradient)
        .num("topk_fraction", topk)
        .int("atom_count", atoms as i64);
    if opts.symmetric {
        let fit = fit_parallelogram(&trace.final_body)?;
        r.num("parallelogram_distance", fit.normalized_distance);
    }
    print!("{}", r.render());
    Ok(0)
}

fn santalo(args: IoArgs) -> Result<u8, Failure> {
    let p = polygon_input(&args.input)?;
    let (value, s) = nonsymmetric_mahler(&p)?;
    let mut r = Report::new();
    r.list("point", &s.point)
        .num("polar_area", s.polar_area)
        .num("area", p.area())
        .num("nonsymmetric_mahler", value)
        .num("gradient_norm", s.gradient_norm)
        .int("iterations", s.iterations as i64);
    if p.m() == 3 {
        let v = p.to_vertices();
        let (a, b, c) = (v[0], v[1], v[2]);
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let z = s.point;
        let l1 = ((z[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (z[1] - a[1])) / det;
        let l2 = ((b[0] - a[0]) * (z[1] - a[1]) - (z[0] - a[0]) * (b[1] - a[1])) / det;
        r.list("barycentric", &[1.0 - l1 - l2, l1, l2]);
    }
    emit(&r.render(), args.output.as_deref())?;
    Ok(0)
}

fn scan_cmd(args: ScanArgs) -> Result<u8, Failure> {
    let tol = args.tol.unwrap_or(args.kind.default_tol());
    check_tol("tol", tol)?;
    check_grid(args.grid_n)?;
    let rows = scan::run(args.kind, args.count, args.seed, args.grid_n, tol);
    let table = scan::table(args.kind, &rows);
    let s = scan::summarize(args.kind, &rows, tol);
    let mut r = Report::new();
    r.text("kind", args.kind.name())
        .int("count", s.count as i64)
        .int("seed", args.seed as i64)
        .num("tol", tol)
        .num("min", s.min)
        .num("max", s.max)
        .int("violations", s.violations as i64)
        .int("errors", s.errors as i64);
    if let Some(c) = s.conjecture_violations {
        r.int("conjecture_violations", c as i64);
    }
    match &args.output {
        Some(path) => write_file(path, &table)?,
        None => print!("{table}"),
    }
    print!("{}", r.render());
    Ok(if s.violations > 0 || s.errors > 0 { 1 } else { 0 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Eval(a) => eval(a),
        Command::Certify(a) => certify(a),
        Command::Descend(a) => descend_cmd(a),
        Command::Santalo(a) => santalo(a),
        Command::Scan(a) => scan_cmd(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

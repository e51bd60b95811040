use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use svem::analysis::{self, Study, StudyLevel};
use svem::assembly::{self, AssemblyOptions, SolverKind};
use svem::generators::{cylinder_half, cylinder_nominal_h, sphere_hybrid, CylinderHalf};
use svem::io::{csv, mm, off, vtk};
use svem::mesh::{regularity, validate};
use svem::pasting::{default_merge_tol, paste};
use svem::surface::{benchmark, Benchmark, SmoothSurface};
use svem::{Mesh, SvemError};

#[derive(Parser)]
#[command(name = "svem", version, about = "Surface virtual element solver for the Laplace-Beltrami equation")]
struct Cli {
    /// Worker threads for element assembly (overrides SVEM_THREADS; default 1).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark mesh.
    Mesh {
        #[command(subcommand)]
        kind: MeshKind,
    },
    /// Paste two meshes along their shared boundary, resolving hanging nodes.
    Paste {
        a: PathBuf,
        b: PathBuf,
        /// Vertex merge tolerance (default: 1e-9 times the larger bounding-box diagonal).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a benchmark problem on a mesh.
    Solve {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long, value_enum)]
        problem: ProblemArg,
        /// Directory for stiffness.mtx, mass.mtx, load.txt and solution.txt.
        #[arg(long)]
        dump_matrices: Option<PathBuf>,
        #[arg(long)]
        vtk: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Use Jacobi-preconditioned conjugate gradients instead of a sparse factorization.
        #[arg(long)]
        iterative: bool,
    },
    /// Run a convergence study and write the error table.
    Convergence {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        /// Inclusive level range for sphere-xy, e.g. `3..7`.
        #[arg(long, value_parser = parse_range, conflicts_with = "n_list")]
        levels: Option<(u32, u32)>,
        /// Comma-separated N values for cylinder-exp.
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
        #[arg(long)]
        csv: PathBuf,
    },
}

#[derive(Subcommand)]
enum MeshKind {
    /// Hybrid triangle/hexagon mesh of the unit sphere.
    Sphere {
        #[arg(long)]
        level: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// One half of the benchmark cylinder.
    Cylinder {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        half: u8,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    SphereXy,
    CylinderExp,
}

impl From<ProblemArg> for Benchmark {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::SphereXy => Benchmark::SphereXy,
            ProblemArg::CylinderExp => Benchmark::CylinderExp,
        }
    }
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (a, b) = s.split_once("..").ok_or("expected L0..L1")?;
    let a: u32 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: u32 = b.trim().parse().map_err(|e| format!("{e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

enum Failure {
    Usage(String),
    Run(SvemError),
}

impl From<SvemError> for Failure {
    fn from(e: SvemError) -> Self {
        Failure::Run(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Run(e.into())
    }
}

fn threads(flag: Option<usize>) -> Result<usize, Failure> {
    if let Some(t) = flag {
        return Ok(t.max(1));
    }
    match std::env::var("SVEM_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(|t| t.max(1))
            .map_err(|_| Failure::Usage(format!("SVEM_THREADS must be a positive integer, got '{v}'"))),
        Err(_) => Ok(1),
    }
}

fn emit(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    Ok(BufWriter::new(File::create(path)?))
}

fn run(cli: Cli) -> Result<(), Failure> {
    let opts = AssemblyOptions { threads: threads(cli.threads)? };
    match cli.command {
        Command::Mesh { kind } => {
            let (mesh, out, extra) = match kind {
                MeshKind::Sphere { level, out } => (sphere_hybrid::<f64>(level), out, json!({ "level": level })),
                MeshKind::Cylinder { half, n, out } => {
                    if n < 1 {
                        return Err(Failure::Usage("--n must be at least 1".into()));
                    }
                    let which = if half == 1 { CylinderHalf::Gamma1 } else { CylinderHalf::Gamma2 };
                    let m = cylinder_half::<f64>(which, n)?;
                    (m, out, json!({ "half": half, "n": n, "nominal_h": cylinder_nominal_h::<f64>(n) }))
                }
            };
            let report = regularity(&mesh)?;
            off::save_off(&mesh, &out)?;
            emit(&json!({
                "mesh": extra,
                "h": report.h,
                "n_vertices": mesh.n_vertices(),
                "n_faces": mesh.n_faces(),
                "face_sizes": mesh.face_size_histogram(),
                "regularity": report,
            }));
        }
        Command::Paste { a, b, tol, out } => {
            let ma: Mesh = off::load_off(&a)?;
            let mb: Mesh = off::load_off(&b)?;
            let tol = match tol {
                Some(t) if !(t.is_finite() && t > 0.0) => return Err(Failure::Usage("--tol must be positive".into())),
                Some(t) => t,
                None => default_merge_tol(&ma, &mb),
            };
            let m = paste(&ma, &mb, tol)?;
            let diagnostics = validate::<f64, SmoothSurface<f64>>(&m, None);
            off::save_off(&m, &out)?;
            emit(&json!({
                "n_vertices": m.n_vertices(),
                "n_faces": m.n_faces(),
                "face_sizes": m.face_size_histogram(),
                "diagnostics": diagnostics,
            }));
        }
        Command::Solve { mesh, problem, dump_matrices, vtk: vtk_path, csv: csv_path, iterative } => {
            let m: Mesh = off::load_off(&mesh)?;
            let p = benchmark::<f64>(problem.into());
            let mut sys = assembly::assemble_with(&m, &p, opts)?;
            let kind = if iterative { SolverKind::iterative() } else { SolverKind::Direct };
            let report = assembly::solve(&mut sys, kind)?;
            let mut rec = analysis::errors(&sys, &m, &p)?;
            rec.h = regularity(&m)?.h;
            let xi = sys.solution.clone().expect("solved");
            if let Some(dir) = dump_matrices {
                fs::create_dir_all(&dir)?;
                mm::write_matrix_market(&sys.stiffness, create(&dir.join("stiffness.mtx"))?)?;
                mm::write_matrix_market(&sys.mass, create(&dir.join("mass.mtx"))?)?;
                mm::write_vector(&sys.load, create(&dir.join("load.txt"))?)?;
                mm::write_vector(&xi, create(&dir.join("solution.txt"))?)?;
            }
            if let Some(path) = vtk_path {
                let exact = analysis::interpolate(&m, |x| p.exact_u(x));
                vtk::write_vtk(&m, &xi, &exact, create(&path)?)?;
            }
            if let Some(path) = csv_path {
                csv::write_table(std::slice::from_ref(&rec), None, create(&path)?)?;
            }
            emit(&json!({
                "problem": Benchmark::from(problem).slug(),
                "n_dofs": sys.n_dofs(),
                "residual": report.residual,
                "residual_scale": report.scale,
                "mean_constraint": report.mean_constraint,
                "iterations": report.iterations,
                "load_sum": sys.load.iter().sum::<f64>(),
                "errors": rec,
            }));
        }
        Command::Convergence { problem, levels, n_list, csv: csv_path } => {
            let study = match (problem, levels, n_list) {
                (ProblemArg::SphereXy, Some((a, b)), None) => Study::Sphere { levels: (a..=b).collect() },
                (ProblemArg::CylinderExp, None, Some(ns)) if !ns.is_empty() => {
                    if ns.contains(&0) {
                        return Err(Failure::Usage("--n-list entries must be at least 1".into()));
                    }
                    Study::Cylinder { n_list: ns }
                }
                (ProblemArg::SphereXy, _, _) => return Err(Failure::Usage("sphere-xy requires --levels L0..L1".into())),
                (ProblemArg::CylinderExp, _, _) => return Err(Failure::Usage("cylinder-exp requires --n-list".into())),
            };
            let mut w = create(&csv_path)?;
            csv::write_header(&mut w)?;
            let levels = analysis::run_study::<f64>(&study, opts, SolverKind::Direct, |lvl: &StudyLevel<f64>| {
                csv::write_row(&lvl.record, &mut w)?;
                println!("{}", level_json(lvl));
                Ok(())
            })?;
            if levels.len() >= 2 {
                let records: Vec<_> = levels.iter().map(|l| l.record.clone()).collect();
                let s = analysis::slopes(&records);
                csv::write_slopes(&s, &mut w)?;
                println!("{}", json!({ "slopes": s }));
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn level_json(l: &StudyLevel<f64>) -> Value {
    json!({
        "level": l.record.level,
        "h": l.record.h,
        "n_dofs": l.record.n_dofs,
        "err_l2": l.record.err_l2,
        "err_linf": l.record.err_linf,
        "err_h1": l.record.err_h1,
        "face_sizes": l.face_sizes,
        "residual": l.report.residual,
        "mean_constraint": l.report.mean_constraint,
        "load_sum": l.load_sum,
        "load_norm": l.load_norm,
        "mass_norm": l.mass_norm,
        "solution_norm": l.solution_norm,
        "max_distance": l.max_distance,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    return ExitCode::SUCCESS;
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    eprintln!("error: InvalidArgument: missing subcommand (see --help)");
                    return ExitCode::from(2);
                }
                _ => {}
            }
            let msg = e.to_string();
            let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error: InvalidArgument: {first}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: InvalidArgument: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {}: {}", e.name(), e.to_string().replace('\n', " "));
            if matches!(e, SvemError::InvalidParameter(_)) {
                ExitCode::from(2)
            } else {
                ExitCode::FAILURE
            }
        }
    }
}

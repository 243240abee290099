use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use gevp_core::evolver::{run_spectrum, EvolutionConfig, EvolutionTrace, Mode};
use gevp_core::hydrogen::{default_grid, sweep_x, Solver, StoConfig, Sweep};
use gevp_core::oracle::{solve_pencil, EigenpairSet};
use gevp_core::pauli::{decompose_with_tol, DenseHermitian};
use gevp_core::problems::EXAMPLE3_SEED;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::json;

use crate::config::{Job, Overrides, RunConfig};
use crate::error::{io_context, CliError, CliResult};
use crate::{Cli, HydrogenArgs, SolverKind, Source};

const DEFAULT_OUT_DIR: &str = "gevp-out";
/// Final residual above which `solve` suggests a deeper ansatz.
const RESIDUAL_WARNING: f64 = 1e-2;

fn load(source: &Source) -> CliResult<(RunConfig, PathBuf)> {
    match (&source.preset, &source.config) {
        (Some(name), None) => Ok((RunConfig::preset(name)?, PathBuf::new())),
        (None, Some(path)) => RunConfig::load(path),
        _ => Err(CliError::Config("give exactly one of --preset or --config".into())),
    }
}

fn out_dir(cli: &Cli, from_config: Option<PathBuf>) -> PathBuf {
    cli.out_dir
        .clone()
        .or(from_config)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

fn write(dir: &Path, name: &str, contents: &str) -> CliResult<()> {
    io_context(fs::create_dir_all(dir), format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    io_context(fs::write(&path, contents), format!("writing {}", path.display()))
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact types serialize");
    s.push('\n');
    s
}

/// Eigenvalues repeated by multiplicity, ascending.
fn exact_levels(set: &EigenpairSet) -> Vec<f64> {
    set.pairs
        .iter()
        .flat_map(|p| std::iter::repeat_n(p.lambda, p.multiplicity))
        .collect()
}

fn report(job: &Job, traces: &[EvolutionTrace], exact: &[f64]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "problem: {} ({} qubits, {} parameters)",
        job.problem.name,
        job.problem.num_qubits(),
        job.ansatz.num_params()
    );
    let _ = writeln!(
        out,
        "{:<6} {:>12} {:>12} {:>10} {:>10} {:>8}  converged",
        "level", "method", "exact", "|diff|", "residual", "tau"
    );
    for (l, t) in traces.iter().enumerate() {
        let method = t.final_lambda();
        let (ex, diff) = match exact.get(l) {
            Some(e) => (format!("{e:.6}"), format!("{:.2e}", (method - e).abs())),
            None => ("-".into(), "-".into()),
        };
        let _ = writeln!(
            out,
            "{:<6} {:>12.6} {:>12} {:>10} {:>10.2e} {:>8.2}  {}",
            l,
            method,
            ex,
            diff,
            t.last().residual,
            t.last().tau,
            if t.converged { "yes" } else { "no" }
        );
    }
    out
}

pub fn solve(cli: &Cli, source: &Source, levels: Option<usize>, require: bool) -> CliResult<()> {
    let (cfg, base) = load(source)?;
    let ov = Overrides {
        seed: cli.seed,
        shots: cli.shots,
        levels,
    };
    let job = cfg.into_job(&base, &ov)?;
    let dir = out_dir(cli, job.out_dir.clone());

    let traces = run_spectrum(&job.ansatz, &job.problem.a, &job.problem.b, &job.levels)?;
    let oracle = solve_pencil(&job.problem.pencil()?)?;
    let exact = exact_levels(&oracle);

    for (l, t) in traces.iter().enumerate() {
        write(&dir, &format!("level_{l}.csv"), &t.to_csv())?;
    }
    write(&dir, "oracle.json", &to_json(&oracle))?;
    let summary = json!({
        "problem": job.problem.name,
        "num_qubits": job.problem.num_qubits(),
        "num_params": job.ansatz.num_params(),
        "theta0": job.levels[0].theta0,
        "levels": traces.iter().map(EvolutionTrace::summary).collect::<Vec<_>>(),
        "exact": exact,
    });
    write(&dir, "summary.json", &to_json(&summary))?;
    let text = report(&job, &traces, &exact);
    write(&dir, "report.txt", &text)?;
    print!("{text}");
    for (l, t) in traces.iter().enumerate() {
        if t.last().residual > RESIDUAL_WARNING {
            eprintln!(
                "gevp: warning: level {l} ends with residual {:.2e}; the ansatz may be too shallow (try more layers)",
                t.last().residual
            );
        }
    }

    if require || job.require_convergence {
        if let Some((l, t)) = traces.iter().enumerate().find(|(_, t)| !t.converged) {
            return Err(CliError::Convergence(format!(
                "level {l} reached tau = {:.2} without converging (residual {:.2e}); \
                 try more ansatz layers or a larger tau_max",
                t.last().tau,
                t.last().residual
            )));
        }
    }
    Ok(())
}

pub fn oracle(cli: &Cli, source: &Source) -> CliResult<()> {
    let (cfg, base) = load(source)?;
    let problem = cfg.problem(&base)?;
    let set = solve_pencil(&problem.pencil()?)?;
    let dir = out_dir(cli, cfg.output.dir.clone());
    write(&dir, "oracle.json", &to_json(&set))?;
    println!("problem: {} (rank of B = {})", problem.name, set.b_rank);
    for p in &set.pairs {
        println!(
            "lambda = {:.10}  multiplicity {}  residual {:.1e}",
            p.lambda, p.multiplicity, p.residual
        );
    }
    Ok(())
}

fn sweep_csv(sweep: &Sweep) -> String {
    let mut out = String::from("x,lambda_a,lambda_b,g1,g2,P,error\n");
    for p in &sweep.points {
        let (la, lb) = match &p.lambdas {
            Ok([a, b]) => (a.to_string(), b.to_string()),
            Err(_) => (String::new(), String::new()),
        };
        match &p.fit {
            Ok(f) => {
                let _ = writeln!(out, "{},{la},{lb},{},{},{},", p.x, f.g1, f.g2, f.polarizability);
            }
            Err(e) => {
                let _ = writeln!(out, "{},{la},{lb},,,,\"{e}\"", p.x);
            }
        }
    }
    out
}

pub fn hydrogen(cli: &Cli, args: &HydrogenArgs) -> CliResult<()> {
    let alphas: [f64; 2] = args
        .alphas
        .as_slice()
        .try_into()
        .map_err(|_| CliError::Config(format!("--alphas needs exactly two values, got {}", args.alphas.len())))?;
    let grid = args.grid.clone().unwrap_or_else(default_grid);
    let template = StoConfig {
        x: grid.first().copied().unwrap_or(1.0),
        alpha: alphas[0],
        z: args.z,
        field: args.field,
        n_max: args.n_max,
    };
    template.validate().map_err(|e| CliError::Config(e.to_string()))?;
    let solver = match args.solver {
        SolverKind::Oracle => Solver::Oracle,
        SolverKind::Evolver => {
            let config = EvolutionConfig {
                d_tau: args.d_tau,
                tau_max: args.tau_max,
                mode: match cli.shots {
                    None | Some(0) => Mode::Exact,
                    Some(s) => Mode::Shots(s),
                },
                seed: cli.seed.unwrap_or(0),
                ..EvolutionConfig::default()
            };
            config.validate().map_err(|e| CliError::Config(e.to_string()))?;
            Solver::Evolver {
                layers: args.layers,
                config,
                theta_seed: cli.seed.unwrap_or(EXAMPLE3_SEED),
            }
        }
    };
    let sweep = sweep_x(&grid, &template, alphas, &solver)?;

    let dir = out_dir(cli, None);
    write(&dir, "hydrogen.csv", &sweep_csv(&sweep))?;
    let points: Vec<_> = sweep
        .points
        .iter()
        .map(|p| match (&p.lambdas, &p.fit) {
            (Ok(l), Ok(f)) => json!({ "x": p.x, "lambdas": l, "fit": f }),
            (l, f) => json!({
                "x": p.x,
                "lambdas": l.as_ref().ok(),
                "error": f.as_ref().err().map(ToString::to_string),
            }),
        })
        .collect();
    let summary = json!({
        "solver": format!("{:?}", args.solver).to_lowercase(),
        "field": args.field,
        "z": args.z,
        "alphas": alphas,
        "points": points,
        "argmax": sweep.argmax,
    });
    write(&dir, "hydrogen.json", &to_json(&summary))?;

    println!("{:>5} {:>12} {:>12} {:>10}", "x", "g1", "g2", "P");
    for p in &sweep.points {
        match &p.fit {
            Ok(f) => println!("{:>5.2} {:>12.8} {:>12.6} {:>10.5}", p.x, f.g1, f.g2, f.polarizability),
            Err(e) => println!("{:>5.2} failed: {e}", p.x),
        }
    }
    match sweep.argmax {
        Some(f) => println!("max P = {:.5} at x = {}", f.polarizability, f.x),
        None => {
            return Err(CliError::Solver(gevp_core::Error::InvalidArgument(
                "no grid point produced a polarizability".into(),
            )))
        }
    }
    Ok(())
}

fn parse_matrix(text: &str) -> CliResult<DMatrix<Complex64>> {
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<Complex64>()
                    .map_err(|_| CliError::Config(format!("line {}: invalid entry '{tok}'", i + 1)))
            })
            .collect::<CliResult<Vec<_>>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(CliError::Config("matrix file is empty".into()));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(CliError::Config(format!(
            "row {} has {} entries; a {n}x{n} matrix was expected",
            bad + 1,
            rows[bad].len()
        )));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

pub fn decompose(cli: &Cli, matrix: &Path, tol: f64) -> CliResult<()> {
    let text = io_context(fs::read_to_string(matrix), format!("reading {}", matrix.display()))?;
    let h = DenseHermitian::new(parse_matrix(&text)?)?;
    let sum = decompose_with_tol(&h, tol)?;
    let out = sum.to_string();
    if let Some(dir) = &cli.out_dir {
        write(dir, "pauli.txt", &out)?;
    }
    print!("{out}");
    Ok(())
}

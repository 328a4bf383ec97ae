//! Command-line front end.
//!
//! Subcommands mirror the library: `validate` a model document, `trace` the
//! chain onto a subset, `absorb` to find minimal absorbing sets and
//! bottlenecks, `fluid` for trajectories (optionally with the reflection
//! regulator and its verification), and `simulate` for convergence
//! experiments. Reports go to stdout as JSON; dense numeric output goes to
//! CSV files under `--out`. Exit codes: 0 success, 2 input or model error,
//! 3 internal consistency failure, 4 threshold failure in `simulate`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use zrfluid::absorbing::{bottleneck_set, is_r_absorbing, minimal_absorbing};
use zrfluid::fluid::fluid_trajectory;
use zrfluid::io::{write_convergence_csv, write_trajectory_csv, ExperimentDoc, RateMatrixDoc};
use zrfluid::markov::RateMatrix;
use zrfluid::reflect::{regulator_path, verify_orp};
use zrfluid::simplex::SimplexPoint;
use zrfluid::zrp::convergence_experiment;
use zrfluid::{Error, Result, DEFAULT_TOL};

#[derive(Parser)]
#[command(
    name = "zrfluid",
    version,
    about = "Exact fluid limits of condensing zero-range processes on finite graphs"
)]
struct Cli {
    /// Comparison tolerance; flow comparisons scale it by the largest rate.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model document and report sites and the stationary law.
    Validate {
        /// JSON file: {"sites": [...], "rates": [[...]]}.
        model: PathBuf,
    },
    /// Watch the chain on a subset: trace rates and net flows.
    Trace {
        model: PathBuf,
        /// Comma-separated site labels to keep.
        #[arg(long, required = true, value_delimiter = ',')]
        subset: Vec<String>,
    },
    /// Minimal absorbing set of a support, the peeling steps, and bottlenecks.
    Absorb {
        model: PathBuf,
        /// Comma-separated site labels of the support.
        #[arg(long, required = true, value_delimiter = ',')]
        subset: Vec<String>,
    },
    /// Piecewise-linear fluid trajectory from a start point.
    Fluid {
        model: PathBuf,
        /// Comma-separated start weights, one per site, summing to 1.
        #[arg(long, required = true, value_delimiter = ',')]
        start: Vec<f64>,
        /// CSV grid intervals over [0, 1.5 x drain time].
        #[arg(long, default_value_t = 200)]
        grid: usize,
        /// Also compute the reflection regulator and verify the decomposition.
        #[arg(long)]
        regulator: bool,
        /// Directory for trajectory.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a convergence experiment from a JSON experiment document.
    Simulate {
        experiment: PathBuf,
        /// Directory for convergence.csv.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tol = cli.tol;
    let outcome = match cli.command {
        Command::Validate { model } => cmd_validate(&model),
        Command::Trace { model, subset } => cmd_trace(&model, &subset, tol),
        Command::Absorb { model, subset } => cmd_absorb(&model, &subset, tol),
        Command::Fluid {
            model,
            start,
            grid,
            regulator,
            out,
        } => cmd_fluid(&model, start, grid, regulator, out.as_deref(), tol),
        Command::Simulate {
            experiment,
            out,
            seed,
        } => cmd_simulate(&experiment, out.as_deref(), seed, tol),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ConsistencyFailure(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn load_model(path: &Path) -> Result<RateMatrix> {
    RateMatrixDoc::from_path(path)?.to_rate_matrix()
}

fn emit(value: &serde_json::Value) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn cmd_validate(model: &Path) -> Result<u8> {
    let r = load_model(model)?;
    let mu = r.invariant_distribution()?;
    emit(&json!({
        "valid": true,
        "sites": r.n(),
        "labels": r.labels(),
        "max_rate": r.scale(),
        "stationary": mu.values(),
    }))?;
    Ok(0)
}

fn cmd_trace(model: &Path, subset: &[String], tol: f64) -> Result<u8> {
    let r = load_model(model)?;
    let set = r.site_set(subset)?;
    let direct = r.trace(&set)?;
    let recursive = r.trace_recursive(&set, None)?;
    let mut gap = 0.0f64;
    for i in 0..direct.n() {
        for j in 0..direct.n() {
            gap = gap.max((direct.rate(i, j) - recursive.rate(i, j)).abs());
        }
    }
    if gap > r.flow_tol(tol) {
        return Err(Error::ConsistencyFailure(format!(
            "trace implementations disagree by {gap} (allowed {})",
            r.flow_tol(tol)
        )));
    }
    let flow = r.net_flow(&set)?;
    let doc = RateMatrixDoc::of(&direct);
    emit(&json!({
        "subset": doc.sites,
        "trace_rates": doc.rates,
        "net_flow": flow.values(),
        "implementation_gap": gap,
    }))?;
    Ok(0)
}

fn cmd_absorb(model: &Path, subset: &[String], tol: f64) -> Result<u8> {
    let r = load_model(model)?;
    let set = r.site_set(subset)?;
    let report = is_r_absorbing(&r, &set, tol)?;
    let trace = minimal_absorbing(&r, &set, tol)?;
    let bottlenecks = bottleneck_set(&r, tol)?;
    let peeling: Vec<serde_json::Value> = trace
        .steps()
        .iter()
        .map(|step| {
            json!({
                "current": r.labels_of(&step.current),
                "net_flow": step.flow,
                "removed": r.labels_of(&step.removed),
            })
        })
        .collect();
    emit(&json!({
        "support": r.labels_of(&set),
        "support_is_absorbing": report.is_absorbing(),
        "minimal_absorbing": r.labels_of(trace.result()),
        "peeling": peeling,
        "bottlenecks": r.labels_of(&bottlenecks),
    }))?;
    Ok(0)
}

fn cmd_fluid(
    model: &Path,
    start: Vec<f64>,
    grid: usize,
    with_regulator: bool,
    out: Option<&Path>,
    tol: f64,
) -> Result<u8> {
    let r = load_model(model)?;
    if start.len() != r.n() {
        return Err(Error::InvalidInput(format!(
            "start has {} weights, model has {} sites",
            start.len(),
            r.n()
        )));
    }
    let u = SimplexPoint::new(start, tol)?;
    let path = fluid_trajectory(&r, &u, tol)?;

    let regulator = if with_regulator {
        let reg = regulator_path(&r, &path, tol)?;
        let report = verify_orp(&r, &path, &reg, &u, tol)?;
        Some((reg, report))
    } else {
        None
    };

    let mut output = json!({
        "tol": tol,
        "breakpoint_times": path.breakpoint_times(),
        "breakpoints": path.points().iter().map(|p| p.values().to_vec()).collect::<Vec<_>>(),
        "velocities": (0..path.segments()).map(|k| path.velocity_on(k).to_vec()).collect::<Vec<_>>(),
        "terminal": path.terminal().values().to_vec(),
        "drain_time": path.terminal_time(),
    });
    if let Some((reg, report)) = &regulator {
        output["regulator"] = json!({
            "slopes": reg.slopes(),
            "cumulative_at_breakpoints": (0..path.breakpoint_times().len())
                .map(|k| reg.cumulative_at_breakpoint(k).to_vec())
                .collect::<Vec<_>>(),
        });
        output["orp"] = json!({
            "passed": report.passed(),
            "max_reconstruction_residual": report.max_reconstruction_residual,
            "min_coordinate": report.min_coordinate,
            "samples": report.samples,
            "violations": report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        });
    }
    emit(&output)?;

    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        let t_end = if path.terminal_time() > 0.0 {
            1.5 * path.terminal_time()
        } else {
            1.0
        };
        let mut file = std::fs::File::create(dir.join("trajectory.csv"))?;
        write_trajectory_csv(
            &mut file,
            r.labels(),
            &path,
            regulator.as_ref().map(|(reg, _)| reg),
            grid,
            t_end,
        )?;
    }

    if let Some((_, report)) = &regulator {
        if !report.passed() {
            eprintln!("error: regulator verification failed");
            return Ok(3);
        }
    }
    Ok(0)
}

fn cmd_simulate(
    experiment: &Path,
    out: Option<&Path>,
    seed_override: Option<u64>,
    tol: f64,
) -> Result<u8> {
    let doc = ExperimentDoc::from_path(experiment)?;
    let r = doc.model.to_rate_matrix()?;
    if doc.start.len() != r.n() {
        return Err(Error::InvalidInput(format!(
            "start has {} weights, model has {} sites",
            doc.start.len(),
            r.n()
        )));
    }
    let u = doc.start_point(tol)?;
    let seed = seed_override.unwrap_or(doc.seed);
    let summary = convergence_experiment(
        &r, &doc.g, &u, &doc.n_list, doc.t_max, doc.trials, seed, tol,
    )?;
    let nonincreasing = summary.medians_nonincreasing();
    let last_median = summary.rows.last().map(|row| row.median).unwrap_or(0.0);
    let threshold_met = doc.max_median_final.map(|cap| last_median <= cap);
    emit(&json!({
        "t_max": summary.t_max,
        "trials": summary.trials,
        "seed": summary.master_seed,
        "grid_points": summary.grid.len(),
        "rows": summary.rows.iter().map(|row| json!({
            "n": row.n_particles,
            "median": row.median,
            "p90": row.p90,
        })).collect::<Vec<_>>(),
        "medians_nonincreasing": nonincreasing,
        "max_median_final": doc.max_median_final,
        "threshold_met": threshold_met,
    }))?;

    if let Some(dir) = out {
        std::fs::create_dir_all(dir)?;
        let mut file = std::fs::File::create(dir.join("convergence.csv"))?;
        write_convergence_csv(&mut file, &summary)?;
    }

    let mut code = 0u8;
    if !nonincreasing {
        eprintln!("error: median sup-distance increases with the particle count");
        code = 4;
    }
    if threshold_met == Some(false) {
        eprintln!(
            "error: median sup-distance {last_median} at the largest count exceeds the bar {}",
            doc.max_median_final.unwrap()
        );
        code = 4;
    }
    Ok(code)
}

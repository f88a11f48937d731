//! Command-line driver: end-to-end solves, FETI versus monolithic
//! comparison, solver-only runs on serialized multiplier systems and
//! timing sweeps.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sawfeti::feti::{nodal_fields, FetiModel, SolveReport};
use sawfeti::geometry::DampingShape;
use sawfeti::model::{ProblemConfig, SolverChoice};
use sawfeti::oracle::{assemble_monolithic, solve_monolithic, MonolithicReport};
use sawfeti::qtsolver::{
    compare_methods, complete_factorization, double_newton, smw_solve, QTSystem,
};

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "sawfeti",
    version,
    about = "FETI solver for periodic piezoelectric SAW models"
)]
struct Cli {
    /// Worker threads; 0 uses the config value or all cores.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output directory for artifacts.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ProblemArgs {
    /// Run configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the solver: auto, dense or double-newton.
    #[arg(long)]
    solver: Option<SolverChoice>,
    /// Use the damping profile that peaks at the physical junction.
    #[arg(long)]
    paper_verbatim_damping: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Solve every frequency of the config and export fields, timings and reports.
    Run {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Also write the multiplier system of each frequency as JSON.
        #[arg(long)]
        export_system: bool,
    },
    /// Solve with FETI and with the monolithic assembly and compare.
    Compare {
        #[command(flatten)]
        problem: ProblemArgs,
    },
    /// Run the four matrix-equation iterations and the full solve on a serialized system.
    SolveQt {
        /// Multiplier system in JSON form.
        system: PathBuf,
        /// Relative-step stopping threshold.
        #[arg(long, default_value_t = 1e-10)]
        eps: f64,
        #[arg(long, default_value_t = 50)]
        iter_max: usize,
    },
    /// Stage timings over a list of cell counts.
    Bench {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Cell counts, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        cells: Vec<usize>,
    },
}

fn main() {
    if let Err(e) = real_main() {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn real_main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            problem,
            export_system,
        } => {
            let cfg = load(&problem, cli.workers)?;
            run(
                &cfg,
                &problem,
                &cfg.output_dir(cli.output.as_deref()),
                export_system,
            )
        }
        Command::Compare { problem } => {
            let cfg = load(&problem, cli.workers)?;
            compare(&cfg, &problem, &cfg.output_dir(cli.output.as_deref()))
        }
        Command::SolveQt {
            system,
            eps,
            iter_max,
        } => {
            init_pool(cli.workers.unwrap_or(0))?;
            let out = cli.output.unwrap_or_else(|| PathBuf::from("sawfeti-out"));
            solve_qt(&system, &out, eps, iter_max)
        }
        Command::Bench { problem, cells } => {
            let cfg = load(&problem, cli.workers)?;
            bench(
                &cfg,
                &problem,
                &cfg.output_dir(cli.output.as_deref()),
                &cells,
            )
        }
    }
}

fn init_pool(workers: usize) -> Result<()> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global()
        .context("setup: building the worker pool")
}

fn load(args: &ProblemArgs, workers: Option<usize>) -> Result<RunConfig> {
    let cfg = RunConfig::load(&args.config).context("config")?;
    init_pool(workers.unwrap_or(cfg.workers))?;
    Ok(cfg)
}

/// Applies command-line overrides to every problem of the sweep.
fn problems(cfg: &RunConfig, args: &ProblemArgs) -> Result<Vec<(f64, ProblemConfig)>> {
    let mut list = cfg.problems().context("config")?;
    for (_, p) in &mut list {
        if let Some(s) = args.solver {
            p.solver = s;
        }
        if args.paper_verbatim_damping {
            p.damping = DampingShape::PaperVerbatim;
        }
    }
    Ok(list)
}

fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("output: creating {}", dir.display()))
}

fn indexed(name: &str, ext: &str, i: usize, count: usize) -> String {
    if count == 1 {
        format!("{name}.{ext}")
    } else {
        format!("{name}_{i}.{ext}")
    }
}

#[derive(Serialize)]
struct RunEntry<'a> {
    frequency_hz: f64,
    fields_file: String,
    nodes: usize,
    interface_mismatch: f64,
    report: &'a SolveReport,
}

fn run(cfg: &RunConfig, args: &ProblemArgs, out: &Path, export_system: bool) -> Result<()> {
    let list = problems(cfg, args)?;
    create_dir(out)?;
    let mut timings = Vec::new();
    let mut reports = Vec::new();
    for (i, (hz, p)) in list.iter().enumerate() {
        let model = FetiModel::build(p).with_context(|| format!("assemble: {hz:e} Hz"))?;
        if export_system {
            let path = out.join(indexed("system", "json", i, list.len()));
            let text = model.qt.to_json().context("output: serializing system")?;
            std::fs::write(&path, text)
                .with_context(|| format!("output: writing {}", path.display()))?;
        }
        let (fields, report) = model.solve().with_context(|| format!("solve: {hz:e} Hz"))?;
        let nodes = nodal_fields(&model.problem, &fields);
        let name = indexed("fields", "csv", i, list.len());
        let rows = output::write_fields(&out.join(&name), &nodes).context("output")?;
        println!(
            "{hz:e} Hz: {:?} path, {} multipliers, residual {:.2e}, {:.3} s",
            report.path, report.multiplier_dofs, report.residual, report.timings.total
        );
        timings.push((*hz, report.timings.clone(), path_name(&report)));
        reports.push((*hz, name, rows, model.interface_mismatch(&fields), report));
    }
    output::write_timings(&out.join("timing.csv"), &timings).context("output")?;
    let entries: Vec<RunEntry> = reports
        .iter()
        .map(|(hz, name, rows, mismatch, report)| RunEntry {
            frequency_hz: *hz,
            fields_file: name.clone(),
            nodes: *rows,
            interface_mismatch: *mismatch,
            report,
        })
        .collect();
    output::write_json(&out.join("report.json"), &entries).context("output")?;
    println!("artifacts written to {}", out.display());
    Ok(())
}

fn path_name(r: &SolveReport) -> &'static str {
    match r.path {
        sawfeti::feti::SolverPath::Dense => "dense",
        sawfeti::feti::SolverPath::DoubleNewton => "double-newton",
    }
}

#[derive(Serialize)]
struct CompareEntry {
    frequency_hz: f64,
    relative_difference: f64,
    feti_total_seconds: f64,
    monolithic_total_seconds: f64,
    multiplier_dofs: usize,
    monolithic_dofs: usize,
    subregion_dofs: usize,
    feti: SolveReport,
    monolithic: MonolithicReport,
}

fn compare(cfg: &RunConfig, args: &ProblemArgs, out: &Path) -> Result<()> {
    let list = problems(cfg, args)?;
    create_dir(out)?;
    let mut entries = Vec::new();
    for (hz, p) in &list {
        let model = FetiModel::build(p).with_context(|| format!("assemble: {hz:e} Hz"))?;
        let (fields, report) = model.solve().with_context(|| format!("solve: {hz:e} Hz"))?;
        let global =
            assemble_monolithic(p).with_context(|| format!("monolithic assemble: {hz:e} Hz"))?;
        let (mono, mono_report) =
            solve_monolithic(&global).with_context(|| format!("monolithic solve: {hz:e} Hz"))?;
        let d = fields.relative_difference(&mono).context("compare")?;
        println!(
            "{hz:e} Hz: relative difference {d:.3e}; FETI {:.3} s with {} multipliers; monolithic {:.3} s with {} DOFs",
            report.timings.total, report.multiplier_dofs, mono_report.total_seconds, mono_report.dofs
        );
        entries.push(CompareEntry {
            frequency_hz: *hz,
            relative_difference: d,
            feti_total_seconds: report.timings.total,
            monolithic_total_seconds: mono_report.total_seconds,
            multiplier_dofs: report.multiplier_dofs,
            monolithic_dofs: mono_report.dofs,
            subregion_dofs: report.subregion_dofs,
            feti: report,
            monolithic: mono_report,
        });
    }
    let path = out.join("compare.csv");
    let mut w = csv::Writer::from_path(&path)
        .with_context(|| format!("output: creating {}", path.display()))?;
    w.write_record([
        "frequency_hz",
        "relative_difference",
        "feti_total_s",
        "monolithic_total_s",
        "multiplier_dofs",
        "monolithic_dofs",
    ])?;
    for e in &entries {
        w.write_record([
            format!("{:e}", e.frequency_hz),
            format!("{:.6e}", e.relative_difference),
            format!("{:.6}", e.feti_total_seconds),
            format!("{:.6}", e.monolithic_total_seconds),
            e.multiplier_dofs.to_string(),
            e.monolithic_dofs.to_string(),
        ])?;
    }
    w.flush()?;
    output::write_json(&out.join("compare.json"), &entries).context("output")?;
    Ok(())
}

#[derive(Serialize)]
struct QtReport {
    n_blocks: usize,
    block_size: usize,
    rhs_columns: usize,
    relative_residual: f64,
    factorization_residuals: [f64; 3],
    seconds: f64,
}

fn solve_qt(system: &Path, out: &Path, eps: f64, iter_max: usize) -> Result<()> {
    let text = std::fs::read_to_string(system)
        .with_context(|| format!("input: reading {}", system.display()))?;
    let sys = QTSystem::from_json(&text, &system.display().to_string()).context("input")?;
    create_dir(out)?;
    let rows = compare_methods(&sys.m, &sys.b, eps, iter_max);
    for r in &rows {
        match (&r.err, &r.failure) {
            (Some(e), _) => println!(
                "{:<16} {:>9.3} s  Err {e:.3e}  {} iterations",
                r.method.name(),
                r.seconds,
                r.iterations
            ),
            (None, Some(f)) => {
                println!("{:<16} {:>9.3} s  failed: {f}", r.method.name(), r.seconds)
            }
            (None, None) => println!("{:<16} {:>9.3} s", r.method.name(), r.seconds),
        }
    }
    output::write_methods(&out.join("methods.csv"), &rows).context("output")?;

    let start = Instant::now();
    let (lambda1, _) =
        double_newton(&sys.m, &sys.b, eps, eps, iter_max).context("solve: matrix equations")?;
    let fact = complete_factorization(&lambda1, &sys.b, &sys.m_l, &sys.m_r)
        .context("solve: factorization")?;
    let x = smw_solve(&fact, &sys).context("solve: sweep")?;
    let seconds = start.elapsed().as_secs_f64();
    let residual = sys.relative_residual(&x);
    if !(residual <= 1e-8) {
        bail!("solve: relative residual {residual:.3e} above 1e-8");
    }
    let solution: Vec<Vec<[f64; 2]>> = x
        .row_iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect();
    output::write_json(&out.join("solution.json"), &solution).context("output")?;
    let report = QtReport {
        n_blocks: sys.n_blocks,
        block_size: sys.block_size(),
        rhs_columns: sys.rhs.ncols(),
        relative_residual: residual,
        factorization_residuals: fact.residuals(&sys.b, &sys.m, &sys.m_r),
        seconds,
    };
    output::write_json(&out.join("report.json"), &report).context("output")?;
    println!("full solve: relative residual {residual:.3e}, {seconds:.3} s");
    Ok(())
}

fn bench(cfg: &RunConfig, args: &ProblemArgs, out: &Path, cells: &[usize]) -> Result<()> {
    if cells.is_empty() || cells.contains(&0) {
        bail!("bench: cell counts must be positive");
    }
    let (hz, base) = problems(cfg, args)?
        .into_iter()
        .next()
        .context("config: no frequency")?;
    create_dir(out)?;
    let path = out.join("bench.csv");
    let mut w = csv::Writer::from_path(&path)
        .with_context(|| format!("output: creating {}", path.display()))?;
    let mut header = vec!["cells", "multiplier_dofs"];
    header.extend_from_slice(&output::TIMING_HEADER[1..]);
    w.write_record(&header)?;
    println!("{hz:e} Hz");
    for &n in cells {
        let mut p = base.clone();
        p.cells = n;
        p.voltages = cfg.voltages.expand(n).context("config")?;
        let model = FetiModel::build(&p).with_context(|| format!("assemble: N = {n}"))?;
        let (_, report) = model.solve().with_context(|| format!("solve: N = {n}"))?;
        let t = &report.timings;
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        println!(
            "N = {n:>4}: {:>7} multipliers, {:.3} s",
            report.multiplier_dofs, t.total
        );
        w.write_record([
            n.to_string(),
            report.multiplier_dofs.to_string(),
            format!("{:.6}", t.assemble_blocks),
            format!("{:.6}", t.solve_multipliers),
            opt(t.solve_matrix_equations),
            opt(t.compute_smw),
            format!("{:.6}", t.recover_fields),
            format!("{:.6}", t.total),
            path_name(&report).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

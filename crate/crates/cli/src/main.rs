//! Command-line front end for the 2-SAT laboratory.
//!
//! Every subcommand is a thin wrapper over the library: parse arguments,
//! call one entry point, print its report. Seeds are explicit everywhere,
//! so any output can be regenerated from its command line.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use satlab::components::decompose;
use satlab::harness::{
    compare_to_prediction, estimate_threshold, marginal_equality_test, run_sweep,
    write_sweep_csv, ExperimentConfig,
};
use satlab::kernel::{load_kernel_file, power_law_kernel, SignedBlock};
use satlab::rng::TrialKey;
use satlab::sampler::{
    read_dimacs, read_edge_list, sample_densest, sample_digraph, sample_formula,
    sample_formula_dagger, write_dimacs, write_edge_list,
};
use satlab::solver::{implication_digraph, witness_is_valid};
use satlab::structures::{count_bicycles, detect_snake_with_budget, find_bicycle};
use satlab::{solve_scc, BlockKernel, Digraph, Formula, Lit, Model, Status};

#[derive(Parser)]
#[command(name = "satlab", version, about = "Laboratory for inhomogeneous random 2-SAT")]
struct CliArgs {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load a kernel and report its shape, mass, and digest.
    Validate(KernelArg),
    /// Spectral report: rho_star, threshold prediction, per-component data.
    Spectrum(KernelArg),
    /// Strong components of the implication structure, with block legend.
    Decompose(KernelArg),
    /// Draw one sample and write it as DIMACS CNF (or an edge list).
    Sample(SampleArgs),
    /// Solve a DIMACS 2-CNF file; exit 10 if satisfiable, 20 if not.
    Solve(SolveArgs),
    /// Hunt for bicycles and snakes in a formula or literal digraph.
    CountStructures(CountStructuresArgs),
    /// Monte Carlo sweep over a scale grid; CSV and optional SVG output.
    Sweep(SweepArgs),
    /// Bisect for the satisfiability threshold and compare with 1/rho_star.
    Threshold(ThresholdArgs),
    /// Chi-square check that the two sampling routes agree on a fixed arc set.
    MarginalTest(MarginalTestArgs),
}

#[derive(Args)]
struct KernelArg {
    /// Kernel file (structured text), or inline: `const:<c>`,
    /// `abc:<A>,<B>,<C>`, `powerlaw:<alpha>,<beta>,<gamma>,<delta>,<m>`.
    #[arg(long, value_name = "SPEC")]
    kernel: String,
}

impl KernelArg {
    fn load(&self) -> Result<BlockKernel> {
        parse_kernel_spec(&self.kernel)
    }
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    kernel: KernelArg,
    /// Number of variables.
    #[arg(long)]
    n: usize,
    /// Scaling factor applied to the kernel.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trial index under the master seed.
    #[arg(long, default_value_t = 0)]
    trial: u64,
    /// Sampling model: 2sat, dagger, densest, or digraph.
    #[arg(long, default_value = "2sat", value_parser = parse_model)]
    model: Model,
    /// Output path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// DIMACS CNF input (stdin when omitted).
    input: Option<PathBuf>,
    /// Suppress the assignment / witness lines.
    #[arg(long)]
    quiet: bool,
}

#[derive(Args)]
struct CountStructuresArgs {
    /// DIMACS CNF or edge-list input (stdin when omitted; format sniffed).
    input: Option<PathBuf>,
    /// Largest k for the exact (k,a,b)-bicycle count grid.
    #[arg(long, default_value_t = 4)]
    max_k: usize,
    /// Node budget for the snake search.
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    kernel: KernelArg,
    /// Comma-separated list of variable counts.
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Explicit comma-separated scale grid.
    #[arg(long, value_delimiter = ',')]
    scale: Vec<f64>,
    /// Evenly spaced grid start (with --scale-max and --scale-steps).
    #[arg(long, conflicts_with = "scale")]
    scale_min: Option<f64>,
    #[arg(long, conflicts_with = "scale")]
    scale_max: Option<f64>,
    #[arg(long, conflicts_with = "scale")]
    scale_steps: Option<usize>,
    /// Trials per (scale, n) cell.
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sampling model: 2sat, dagger, densest, or digraph.
    #[arg(long, default_value = "2sat", value_parser = parse_model)]
    model: Model,
    /// Wall-clock budget per cell, in seconds (cut cells are reported).
    #[arg(long)]
    budget_secs: Option<f64>,
    /// CSV output path (CSV goes to stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG plot path.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    kernel: KernelArg,
    /// Number of variables per probe cell.
    #[arg(long)]
    n: usize,
    /// Trials per probe cell.
    #[arg(long, default_value_t = 200)]
    trials: u64,
    /// Bisection steps after bracketing.
    #[arg(long, default_value_t = 12)]
    probes: usize,
    /// Initial upper bracket for the scale.
    #[arg(long, default_value_t = 1.0)]
    scale_max: f64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sampling model: 2sat, dagger, densest, or digraph.
    #[arg(long, default_value = "2sat", value_parser = parse_model)]
    model: Model,
}

#[derive(Args)]
struct MarginalTestArgs {
    #[command(flatten)]
    kernel: KernelArg,
    /// Number of variables.
    #[arg(long)]
    n: usize,
    /// Samples per model.
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Arc of the probe set F as two DIMACS literals, e.g. `--arc 1,2` or
    /// `--arc -3,2`; repeat for more arcs (at most 10, pair-free).
    #[arg(long = "arc", value_name = "L1,L2", required = true, allow_hyphen_values = true)]
    arcs: Vec<String>,
}

fn parse_model(s: &str) -> Result<Model, String> {
    s.parse().map_err(|e| format!("{e}"))
}

fn model_name(model: Model) -> &'static str {
    match model {
        Model::TwoSat => "2sat",
        Model::Dagger => "dagger",
        Model::Densest => "densest",
        Model::Digraph => "digraph",
    }
}

/// Accept a kernel file path or one of the inline forms `const:<c>`,
/// `abc:<A>,<B>,<C>`, `powerlaw:<alpha>,<beta>,<gamma>,<delta>,<m>`.
fn parse_kernel_spec(spec: &str) -> Result<BlockKernel> {
    fn numbers(rest: &str, want: usize, form: &str) -> Result<Vec<f64>> {
        let parts: Vec<f64> = rest
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .with_context(|| format!("bad number in `{form}:{rest}`"))?;
        if parts.len() != want {
            bail!("`{form}:` takes {want} comma-separated numbers, got {}", parts.len());
        }
        Ok(parts)
    }
    if let Some(rest) = spec.strip_prefix("const:") {
        let c = numbers(rest, 1, "const")?[0];
        return Ok(BlockKernel::homogeneous(c)?);
    }
    if let Some(rest) = spec.strip_prefix("abc:") {
        let v = numbers(rest, 3, "abc")?;
        return Ok(BlockKernel::one_type(v[0], v[1], v[2])?);
    }
    if let Some(rest) = spec.strip_prefix("powerlaw:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 5 {
            bail!("`powerlaw:` takes alpha,beta,gamma,delta,m");
        }
        let nums = numbers(&parts[..4].join(","), 4, "powerlaw")?;
        let m: usize = parts[4]
            .trim()
            .parse()
            .context("bad block count in `powerlaw:` spec")?;
        return Ok(power_law_kernel(nums[0], nums[1], nums[2], nums[3], m)?);
    }
    load_kernel_file(spec).with_context(|| format!("loading kernel from `{spec}`"))
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn read_input(path: &Option<PathBuf>) -> Result<String> {
    let mut text = String::new();
    match path {
        Some(p) => {
            File::open(p)
                .with_context(|| format!("opening {}", p.display()))?
                .read_to_string(&mut text)?;
        }
        None => {
            io::stdin().read_to_string(&mut text)?;
        }
    }
    Ok(text)
}

fn main() -> ExitCode {
    // Rust ships with SIGPIPE ignored, which turns `satlab ... | head` into a
    // panic. Restore the default so we die quietly like any other filter.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run() -> Result<ExitCode> {
    match CliArgs::parse().command {
        Command::Validate(args) => cmd_validate(args),
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Decompose(args) => cmd_decompose(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Solve(args) => cmd_solve(args),
        Command::CountStructures(args) => cmd_count_structures(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Threshold(args) => cmd_threshold(args),
        Command::MarginalTest(args) => cmd_marginal_test(args),
    }
}

fn cmd_validate(args: KernelArg) -> Result<ExitCode> {
    let kernel = args.load()?;
    kernel.require_valid()?;
    let space = kernel.space();
    let m = space.block_count();
    println!("kernel ok: {} type(s), {} blocks", space.type_count(), m);
    for (i, label) in space.labels().iter().enumerate() {
        println!("  type {i} `{label}`: weight {}", space.weight(i));
    }
    let zeros = kernel.values().iter().filter(|v| **v == 0.0).count();
    println!("entries: {} total, {zeros} zero", m * m);
    println!("l1 norm: {}", kernel.l1_norm());
    println!("digest: {}", kernel.digest());
    Ok(ExitCode::SUCCESS)
}

fn cmd_spectrum(args: KernelArg) -> Result<ExitCode> {
    let report = compare_to_prediction(&args.load()?)?;
    print!("{report}");
    Ok(ExitCode::SUCCESS)
}

fn cmd_decompose(args: KernelArg) -> Result<ExitCode> {
    let kernel = args.load()?;
    let gamma = kernel.implication_digraphon()?;
    let d = decompose(&gamma);
    let space = kernel.space();
    println!("blocks:");
    for b in 0..space.block_count() {
        let sb = SignedBlock::from_flat(b);
        println!(
            "  {b} = ({}, {})",
            space.labels()[sb.type_index],
            sb.sign.glyph()
        );
    }
    println!("components:");
    for (i, comp) in d.components.iter().enumerate() {
        let tag = if d.contradictory[i] { "  contradictory" } else { "" };
        println!("  {i}: {comp}{tag}");
    }
    if d.fragmented.iter().next().is_some() {
        println!("fragmented: {}", d.fragmented);
    } else {
        println!("fragmented: (empty)");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sample(args: SampleArgs) -> Result<ExitCode> {
    let kernel = args.kernel.load()?;
    let key = TrialKey::new(args.seed, args.trial);
    let mut out = sink(&args.out)?;
    let provenance = format!(
        "seed={} trial={} n={} scale={} model={} kernel={}",
        args.seed,
        args.trial,
        args.n,
        args.scale,
        model_name(args.model),
        kernel.digest()
    );
    match args.model {
        Model::Digraph => {
            let s = sample_digraph(&kernel, args.n, args.scale, key)?;
            writeln!(out, "# {provenance}")?;
            if s.clamped > 0 {
                writeln!(out, "# clamped arcs: {}", s.clamped)?;
            }
            write_edge_list(&s.digraph, &mut out)?;
        }
        model => {
            let (formula, clamped) = match model {
                Model::TwoSat => {
                    let s = sample_formula(&kernel, args.n, args.scale, key)?;
                    (s.formula, s.clamped)
                }
                Model::Dagger => {
                    let s = sample_formula_dagger(&kernel, args.n, args.scale, key)?;
                    (s.formula, s.clamped)
                }
                Model::Densest => {
                    let s = sample_densest(&kernel, args.n, args.scale, key)?;
                    (s.formula, s.clamped)
                }
                Model::Digraph => unreachable!("handled above"),
            };
            writeln!(out, "c {provenance}")?;
            if clamped > 0 {
                writeln!(out, "c clamped clauses: {clamped}")?;
            }
            write_dimacs(&formula, &mut out)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_solve(args: SolveArgs) -> Result<ExitCode> {
    let text = read_input(&args.input)?;
    let formula = read_dimacs(BufReader::new(text.as_bytes()))?;
    let verdict = solve_scc(&formula);
    match verdict.status {
        Status::Satisfiable => {
            println!("s SATISFIABLE");
            if !args.quiet {
                let assignment = verdict.assignment.expect("satisfiable verdict carries a model");
                let mut line = String::from("v");
                for (v, value) in assignment.iter().enumerate() {
                    let lit = if *value { (v as i64) + 1 } else { -((v as i64) + 1) };
                    line.push_str(&format!(" {lit}"));
                }
                line.push_str(" 0");
                println!("{line}");
            }
            Ok(ExitCode::from(10))
        }
        Status::Unsatisfiable => {
            println!("s UNSATISFIABLE");
            if !args.quiet {
                let walk = verdict.witness.expect("unsatisfiable verdict carries a witness");
                debug_assert!(witness_is_valid(&formula, &walk));
                let rendered: Vec<String> =
                    walk.iter().map(|l| l.to_dimacs().to_string()).collect();
                println!("w {}", rendered.join(" "));
            }
            Ok(ExitCode::from(20))
        }
    }
}

/// A DIMACS problem line anywhere marks CNF input; otherwise edge list.
fn sniff_formula(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .any(|l| l.starts_with("p cnf") || l.starts_with("p "))
}

fn cmd_count_structures(args: CountStructuresArgs) -> Result<ExitCode> {
    let text = read_input(&args.input)?;
    let (digraph, formula): (Digraph, Option<Formula>) = if sniff_formula(&text) {
        let f = read_dimacs(BufReader::new(text.as_bytes()))?;
        println!("input: formula, {} variables, {} clauses", f.n_vars(), f.clause_count());
        (implication_digraph(&f).to_literal_digraph(), Some(f))
    } else {
        let dg = read_edge_list(BufReader::new(text.as_bytes()))?;
        println!("input: digraph, {} variables, {} arcs", dg.n_vars(), dg.arc_count());
        (dg, None)
    };

    match find_bicycle(&digraph) {
        Some(bike) => {
            let basis: Vec<String> = bike.basis.iter().map(|l| l.to_string()).collect();
            println!(
                "bicycle: found k={} a={} b={}: {}",
                bike.k(),
                bike.a,
                bike.b,
                basis.join(" ")
            );
        }
        None => println!("bicycle: none (no contradictory strong component)"),
    }

    match &formula {
        Some(f) => {
            let search = detect_snake_with_budget(f, args.budget);
            match search.snake {
                Some(snake) => println!(
                    "snake: found a={} b={} centered on {}",
                    snake.a(),
                    snake.b(),
                    snake.center()
                ),
                None if search.exhausted => {
                    println!("snake: none found within budget {} (may still exist)", args.budget)
                }
                None => println!("snake: none"),
            }
        }
        None => println!("snake: n/a (edge-list input has no clause structure)"),
    }

    if digraph.n_vars() > 12 {
        println!("bicycle counts: skipped (exact counting is capped at 12 variables)");
        return Ok(ExitCode::SUCCESS);
    }
    println!("bicycle counts (k a b count):");
    for k in 2..=args.max_k.min(8) {
        for a in 2..=k {
            for b in 1..k {
                let count = count_bicycles(&digraph, k, a, b)?;
                if count > 0 {
                    println!("  {k} {a} {b} {count}");
                }
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn build_scales(args: &SweepArgs) -> Result<Vec<f64>> {
    if !args.scale.is_empty() {
        return Ok(args.scale.clone());
    }
    match (args.scale_min, args.scale_max, args.scale_steps) {
        (Some(lo), Some(hi), Some(steps)) => {
            if steps < 2 || hi <= lo {
                bail!("need --scale-steps >= 2 and --scale-max > --scale-min");
            }
            let width = (hi - lo) / (steps - 1) as f64;
            Ok((0..steps).map(|i| lo + width * i as f64).collect())
        }
        (None, None, None) => bail!("give either --scale or --scale-min/--scale-max/--scale-steps"),
        _ => bail!("--scale-min, --scale-max, --scale-steps must be given together"),
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<ExitCode> {
    let scales = build_scales(&args)?;
    let mut cfg = ExperimentConfig::new(args.kernel.load()?, args.n.clone(), scales, args.trials);
    cfg.master_seed = args.seed;
    cfg.model = args.model;
    cfg.cell_time_budget = args.budget_secs.map(Duration::from_secs_f64);
    cfg.csv_path = args.out.clone();
    cfg.svg_path = args.svg.clone();

    let result = run_sweep(&cfg)?;
    result.persist(&cfg)?;

    eprintln!("rho_star = {}", result.rho_star);
    eprintln!("prediction: {}", result.prediction);
    for cell in &result.cells {
        let mut line = format!(
            "scale {:>8.4}  n {:>7}  sat {:>5}/{:<5}  frac {:.3}  [{:.3}, {:.3}]",
            cell.scale, cell.n, cell.sat, cell.trials, cell.frac, cell.lo95, cell.hi95
        );
        if let Some(note) = &cell.note {
            line.push_str(&format!("  ({note})"));
        }
        if let Some(err) = &cell.error {
            line.push_str(&format!("  [error: {err}]"));
        }
        eprintln!("{line}");
    }
    if args.out.is_none() {
        let mut stdout = io::stdout().lock();
        write_sweep_csv(&result, &mut stdout)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_threshold(args: ThresholdArgs) -> Result<ExitCode> {
    let mut cfg = ExperimentConfig::new(
        args.kernel.load()?,
        vec![args.n],
        vec![args.scale_max],
        args.trials,
    );
    cfg.master_seed = args.seed;
    cfg.model = args.model;
    let est = estimate_threshold(&cfg, args.probes)?;
    println!("prediction: {}", est.prediction);
    if let Some(rationale) = &est.rationale {
        println!("note: {rationale}");
    }
    if est.lo.is_finite() {
        println!("bracket: [{:.6}, {:.6}]", est.lo, est.hi);
        println!("monotone probes: {}", if est.monotone { "yes" } else { "no" });
        for p in &est.probes {
            println!("  scale {:>10.6}  frac {:.3}", p.scale, p.frac);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_arc(spec: &str) -> Result<(Lit, Lit)> {
    let parts: Vec<&str> = spec.split(',').collect();
    if parts.len() != 2 {
        bail!("arc `{spec}` must be two comma-separated DIMACS literals");
    }
    let lit = |s: &str| -> Result<Lit> {
        let value: i64 = s.trim().parse().with_context(|| format!("bad literal `{s}`"))?;
        Ok(Lit::from_dimacs(value)?)
    };
    Ok((lit(parts[0])?, lit(parts[1])?))
}

fn cmd_marginal_test(args: MarginalTestArgs) -> Result<ExitCode> {
    let arcs: Vec<(Lit, Lit)> = args
        .arcs
        .iter()
        .map(|s| parse_arc(s))
        .collect::<Result<_>>()?;
    let report = marginal_equality_test(&args.kernel.load()?, args.n, args.trials, args.seed, &arcs)?;
    print!("{report}");
    if report.reject {
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

//! Monte Carlo experiment driver: scale sweeps, threshold bisection, and
//! the distributional cross-check between the digraph and 2-CNF models.
//!
//! Reproducibility contract: every trial's randomness comes from a key
//! derived from `(master_seed, n, trial)` — never from the scale or from
//! execution order — so sweeps are deterministic, cells can run
//! concurrently, and the per-trial clause sets are coupled across the
//! scale grid (monotone in scale, exactly).

use std::collections::HashSet;
use std::fmt;
use std::io;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::kernel::BlockKernel;
use crate::rng::{self, TrialKey};
use crate::sampler::{
    sample_densest, sample_digraph, sample_formula, sample_formula_dagger, Lit, Model,
};
use crate::solver::{digraph_consistent, implication_digraph, solve_scc};
use crate::spectra::{rho_star, RhoStarReport};

/// z quantile for 95% Wilson intervals.
pub const WILSON_Z: f64 = 1.959963984540054;

/// |rho_star − 1| at or below this is reported as critical: the dichotomy
/// is silent there and no direction is predicted.
pub const CRITICAL_TOL: f64 = 1e-9;

/// Significance level for the marginal-equality chi-square test.
pub const MARGINAL_TEST_SIGNIFICANCE: f64 = 1e-3;

/// One experiment: a kernel, the grid to sweep, and the sampling model.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kernel: BlockKernel,
    pub n_list: Vec<usize>,
    pub scales: Vec<f64>,
    /// Trials per (scale, n) cell.
    pub trials: u64,
    pub master_seed: u64,
    pub model: Model,
    /// Wall-clock budget per cell, checked between trials (cooperative):
    /// an over-budget cell reports the trials it completed instead of
    /// silently truncating. `None` (the default) never cuts a cell short
    /// and is required for bit-reproducible results.
    pub cell_time_budget: Option<Duration>,
    /// Optional output paths used by [`SweepResult::persist`].
    pub csv_path: Option<PathBuf>,
    pub svg_path: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(kernel: BlockKernel, n_list: Vec<usize>, scales: Vec<f64>, trials: u64) -> Self {
        ExperimentConfig {
            kernel,
            n_list,
            scales,
            trials,
            master_seed: 0,
            model: Model::TwoSat,
            cell_time_budget: None,
            csv_path: None,
            svg_path: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.kernel.require_valid()?;
        if self.trials < 1 {
            return Err(Error::param("trials must be at least 1"));
        }
        if self.n_list.is_empty() {
            return Err(Error::param("need at least one n"));
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| n < 2) {
            return Err(Error::param(format!("n must be at least 2, got {n}")));
        }
        if self.scales.is_empty() {
            return Err(Error::param("need at least one scale"));
        }
        if let Some(&s) = self.scales.iter().find(|s| !s.is_finite() || **s < 0.0) {
            return Err(Error::param(format!("scales must be finite and ≥ 0, got {s}")));
        }
        Ok(())
    }
}

/// Aggregate of one (scale, n) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub scale: f64,
    pub n: usize,
    pub requested_trials: u64,
    /// Trials actually completed (fewer than requested only under a cell
    /// time budget or per-trial failures).
    pub trials: u64,
    pub sat: u64,
    pub frac: f64,
    pub lo95: f64,
    pub hi95: f64,
    /// First per-trial failure, with coordinates; the sweep continues.
    pub error: Option<String>,
    /// Set when the cell hit its time budget.
    pub note: Option<String>,
}

/// What the spectral theory predicts for the satisfiability threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdPrediction {
    /// `rho_star = 0`: satisfiable at every scaling, threshold infinite.
    Infinite,
    /// `rho_star` within [`CRITICAL_TOL`] of 1: the dichotomy is silent.
    Critical,
    /// Threshold at scale `1/rho_star`.
    Finite(f64),
}

impl ThresholdPrediction {
    pub fn from_rho_star(rho_star: f64) -> Self {
        if rho_star == 0.0 {
            ThresholdPrediction::Infinite
        } else if (rho_star - 1.0).abs() <= CRITICAL_TOL {
            ThresholdPrediction::Critical
        } else {
            ThresholdPrediction::Finite(1.0 / rho_star)
        }
    }

    /// The threshold scale when one is predicted.
    pub fn scale(&self) -> Option<f64> {
        match self {
            ThresholdPrediction::Finite(c) => Some(*c),
            _ => None,
        }
    }
}

impl fmt::Display for ThresholdPrediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdPrediction::Infinite => {
                write!(f, "infinite (rho_star = 0: satisfiable at every scaling)")
            }
            ThresholdPrediction::Critical => {
                write!(f, "critical — no prediction (rho_star within {CRITICAL_TOL:e} of 1)")
            }
            ThresholdPrediction::Finite(c) => write!(f, "threshold scale {c}"),
        }
    }
}

/// A full sweep: one cell per (n, scale) pair, in grid order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub cells: Vec<SweepCell>,
    pub rho_star: f64,
    pub prediction: ThresholdPrediction,
}

impl SweepResult {
    /// Write CSV and/or SVG to the paths configured on `cfg`.
    pub fn persist(&self, cfg: &ExperimentConfig) -> Result<()> {
        if let Some(path) = &cfg.csv_path {
            let mut file = std::fs::File::create(path)?;
            write_sweep_csv(self, &mut file)?;
        }
        if let Some(path) = &cfg.svg_path {
            let mut file = std::fs::File::create(path)?;
            write_sweep_svg(self, &mut file)?;
        }
        Ok(())
    }
}

/// 95% Wilson score interval; clamped to [0, 1] and degenerate-safe.
pub fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Per-trial key: derived from master seed, n, and trial index. The scale
/// is deliberately excluded so one trial's clause draws are coupled across
/// the whole scale grid.
fn cell_trial_key(master_seed: u64, n: usize, trial: u64) -> TrialKey {
    TrialKey::new(rng::derive(master_seed, &[n as u64]), trial)
}

/// Sample one instance under `model` and decide it.
pub fn sat_trial(
    kernel: &BlockKernel,
    n: usize,
    scale: f64,
    model: Model,
    key: TrialKey,
) -> Result<bool> {
    match model {
        Model::TwoSat => Ok(solve_scc(&sample_formula(kernel, n, scale, key)?.formula).is_sat()),
        Model::Dagger => {
            Ok(solve_scc(&sample_formula_dagger(kernel, n, scale, key)?.formula).is_sat())
        }
        Model::Densest => Ok(solve_scc(&sample_densest(kernel, n, scale, key)?.formula).is_sat()),
        Model::Digraph => Ok(digraph_consistent(&sample_digraph(kernel, n, scale, key)?.digraph)),
    }
}

fn run_cell(cfg: &ExperimentConfig, n: usize, scale: f64) -> SweepCell {
    let start = Instant::now();
    let timed_out = AtomicBool::new(false);
    let outcomes: Vec<std::result::Result<Option<bool>, String>> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            if timed_out.load(Ordering::Relaxed) {
                return Ok(None);
            }
            if let Some(budget) = cfg.cell_time_budget {
                if start.elapsed() > budget {
                    timed_out.store(true, Ordering::Relaxed);
                    return Ok(None);
                }
            }
            let key = cell_trial_key(cfg.master_seed, n, trial);
            sat_trial(&cfg.kernel, n, scale, cfg.model, key)
                .map(Some)
                .map_err(|e| format!("cell (scale {scale}, n {n}), trial {trial}: {e}"))
        })
        .collect();

    let mut trials = 0;
    let mut sat = 0;
    let mut error = None;
    for outcome in outcomes {
        match outcome {
            Ok(Some(true)) => {
                trials += 1;
                sat += 1;
            }
            Ok(Some(false)) => trials += 1,
            Ok(None) => {}
            Err(e) => {
                if error.is_none() {
                    error = Some(e);
                }
            }
        }
    }
    let frac = if trials == 0 { 0.0 } else { sat as f64 / trials as f64 };
    let (lo95, hi95) = wilson_interval(sat, trials);
    let note = if timed_out.load(Ordering::Relaxed) {
        Some(format!("time budget hit after {trials} of {} trials", cfg.trials))
    } else {
        None
    };
    SweepCell {
        scale,
        n,
        requested_trials: cfg.trials,
        trials,
        sat,
        frac,
        lo95,
        hi95,
        error,
        note,
    }
}

/// Run the full (n × scale) grid. Cells run concurrently; aggregation is a
/// commutative merge of per-trial outcomes, so results are identical to a
/// sequential run. A failed cell carries its error; the sweep continues.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    let spectral = rho_star(&cfg.kernel)?;
    let grid: Vec<(usize, f64)> = cfg
        .n_list
        .iter()
        .flat_map(|&n| cfg.scales.iter().map(move |&s| (n, s)))
        .collect();
    let cells: Vec<SweepCell> = grid
        .par_iter()
        .map(|&(n, scale)| run_cell(cfg, n, scale))
        .collect();
    Ok(SweepResult {
        cells,
        rho_star: spectral.rho_star,
        prediction: ThresholdPrediction::from_rho_star(spectral.rho_star),
    })
}

/// One bisection probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbePoint {
    pub scale: f64,
    pub frac: f64,
}

/// Result of the threshold bisection.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdEstimate {
    /// Bracketing interval: sat_fraction ≥ 1/2 at `lo`, < 1/2 at `hi`.
    /// Both infinite when `rho_star = 0`.
    pub lo: f64,
    pub hi: f64,
    pub probes: Vec<ProbePoint>,
    pub prediction: ThresholdPrediction,
    /// Whether the probed fractions are non-increasing in scale. The
    /// coupled per-trial seeds make this exact by construction; it is
    /// still measured, never assumed.
    pub monotone: bool,
    /// Set when no bisection ran (e.g. `rho_star = 0`).
    pub rationale: Option<String>,
}

/// Locate the empirical threshold by bisection on the scale, classifying
/// each probe cell by sat_fraction ≷ 1/2. Uses the first entry of
/// `cfg.n_list` and `cfg.trials` per probe; the initial bracket is
/// `[0, max(cfg.scales)]` (or `[0, 1]`), with the upper end doubled until
/// the SAT fraction drops below 1/2.
pub fn estimate_threshold(cfg: &ExperimentConfig, probes: usize) -> Result<ThresholdEstimate> {
    cfg.validate()?;
    let spectral = rho_star(&cfg.kernel)?;
    let prediction = ThresholdPrediction::from_rho_star(spectral.rho_star);
    if spectral.rho_star == 0.0 {
        return Ok(ThresholdEstimate {
            lo: f64::INFINITY,
            hi: f64::INFINITY,
            probes: Vec::new(),
            prediction,
            monotone: true,
            rationale: Some(
                "rho_star = 0: no contradictory component, satisfiable at every scaling"
                    .to_string(),
            ),
        });
    }

    let n = cfg.n_list[0];
    let mut history: Vec<ProbePoint> = Vec::new();
    let probe = |scale: f64, history: &mut Vec<ProbePoint>| -> f64 {
        let cell = run_cell(cfg, n, scale);
        history.push(ProbePoint {
            scale,
            frac: cell.frac,
        });
        cell.frac
    };

    let mut lo = 0.0;
    let mut hi = cfg.scales.iter().copied().fold(f64::NAN, f64::max).max(1.0);
    let mut expansions = 0;
    while probe(hi, &mut history) >= 0.5 {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 24 {
            return Err(Error::param(format!(
                "no UNSAT regime found up to scale {hi}; is n large enough for this kernel?"
            )));
        }
    }
    for _ in 0..probes {
        let mid = 0.5 * (lo + hi);
        if probe(mid, &mut history) >= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut sorted = history.clone();
    sorted.sort_by(|a, b| a.scale.total_cmp(&b.scale));
    let monotone = sorted.windows(2).all(|w| w[0].frac >= w[1].frac);
    Ok(ThresholdEstimate {
        lo,
        hi,
        probes: history,
        prediction,
        monotone,
        rationale: if monotone {
            None
        } else {
            Some("non-monotone empirical fractions across probes (small-n noise)".to_string())
        },
    })
}

/// Spectral summary of a kernel, printable next to empirical estimates.
#[derive(Debug, Clone)]
pub struct PredictionReport {
    pub spectral: RhoStarReport,
    pub prediction: ThresholdPrediction,
}

/// Compute everything the theory predicts for one kernel.
pub fn compare_to_prediction(kernel: &BlockKernel) -> Result<PredictionReport> {
    let spectral = rho_star(kernel)?;
    let prediction = ThresholdPrediction::from_rho_star(spectral.rho_star);
    Ok(PredictionReport {
        spectral,
        prediction,
    })
}

impl fmt::Display for PredictionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = &self.spectral.decomposition;
        writeln!(f, "rho_star = {}", self.spectral.rho_star)?;
        writeln!(f, "prediction: {}", self.prediction)?;
        writeln!(
            f,
            "decomposition: {} component(s), fragmented = {}",
            d.components.len(),
            d.fragmented
        )?;
        for (i, blocks) in d.components.iter().enumerate() {
            let tag = if d.contradictory[i] { " contradictory" } else { "" };
            writeln!(f, "  component {i}{tag}: {blocks}")?;
        }
        for cs in &self.spectral.per_component {
            let r = &cs.report;
            writeln!(
                f,
                "  component {} spectrum: rho = {}, period = {}, residual = {:.3e}, converged = {}",
                cs.component, r.rho, r.period, r.residual, r.converged
            )?;
        }
        Ok(())
    }
}

/// Result of the chi-square comparison between the two models' marginals
/// on a fixed arc set F.
#[derive(Debug, Clone)]
pub struct MarginalTestReport {
    pub arcs: Vec<(Lit, Lit)>,
    pub trials: u64,
    /// Histogram over subsets of F (bit i = arc i present), digraph model.
    pub counts_digraph: Vec<u64>,
    /// Same histogram for the implication digraph of the signed 2-CNF model.
    pub counts_twosat: Vec<u64>,
    pub statistic: f64,
    pub df: usize,
    /// `None` when the test is degenerate (fewer than two occupied bins).
    pub p_value: Option<f64>,
    pub degenerate: bool,
    /// Rejection at [`MARGINAL_TEST_SIGNIFICANCE`]; always false when
    /// degenerate.
    pub reject: bool,
}

/// Two-sample chi-square test that the digraph model and the implication
/// digraph of the signed 2-CNF model induce the same distribution of
/// `sample ∩ F`, for a fixed pair-free arc set F.
///
/// F must not contain an arc together with its mirror `(¬l₂, ¬l₁)`: those
/// two arcs come from the same clause on the 2-CNF side, so their joint
/// distribution differs between the models even though every marginal
/// matches — the equality being tested holds exactly under pair-freeness.
pub fn marginal_equality_test(
    kernel: &BlockKernel,
    n: usize,
    trials: u64,
    master_seed: u64,
    f_arcs: &[(Lit, Lit)],
) -> Result<MarginalTestReport> {
    kernel.require_valid()?;
    if n < 2 {
        return Err(Error::param("need n ≥ 2"));
    }
    if trials < 1 {
        return Err(Error::param("need at least one trial"));
    }
    if f_arcs.is_empty() || f_arcs.len() > 10 {
        return Err(Error::param("F must have between 1 and 10 arcs"));
    }
    let set: HashSet<(Lit, Lit)> = f_arcs.iter().copied().collect();
    if set.len() != f_arcs.len() {
        return Err(Error::param("F contains a duplicate arc"));
    }
    for &(u, v) in f_arcs {
        if u.var() >= n || v.var() >= n {
            return Err(Error::param("F references a variable outside 0..n"));
        }
        let mirror = (v.negate(), u.negate());
        if mirror != (u, v) && set.contains(&mirror) {
            return Err(Error::param(format!(
                "F contains the mirrored pair ({} -> {}) / ({} -> {}); the marginal \
                 equality only holds for pair-free F",
                u, v, mirror.0, mirror.1
            )));
        }
    }

    let bins = 1usize << f_arcs.len();
    let seed_digraph = rng::derive(master_seed, &[1]);
    let seed_twosat = rng::derive(master_seed, &[2]);

    let (counts_digraph, counts_twosat) = (0..trials)
        .into_par_iter()
        .map(|trial| -> Result<(usize, usize)> {
            let d = sample_digraph(kernel, n, 1.0, TrialKey::new(seed_digraph, trial))?;
            let have: HashSet<(Lit, Lit)> = d.digraph.arcs().iter().copied().collect();
            let bin_d = f_arcs
                .iter()
                .enumerate()
                .filter(|(_, a)| have.contains(a))
                .fold(0usize, |acc, (i, _)| acc | (1 << i));

            let s = sample_formula_dagger(kernel, n, 1.0, TrialKey::new(seed_twosat, trial))?;
            let have: HashSet<(Lit, Lit)> = implication_digraph(&s.formula)
                .arcs()
                .iter()
                .copied()
                .collect();
            let bin_s = f_arcs
                .iter()
                .enumerate()
                .filter(|(_, a)| have.contains(a))
                .fold(0usize, |acc, (i, _)| acc | (1 << i));
            Ok((bin_d, bin_s))
        })
        .try_fold(
            || (vec![0u64; bins], vec![0u64; bins]),
            |mut acc, item| -> Result<(Vec<u64>, Vec<u64>)> {
                let (bin_d, bin_s) = item?;
                acc.0[bin_d] += 1;
                acc.1[bin_s] += 1;
                Ok(acc)
            },
        )
        .try_reduce(
            || (vec![0u64; bins], vec![0u64; bins]),
            |mut a, b| {
                for (x, y) in a.0.iter_mut().zip(b.0) {
                    *x += y;
                }
                for (x, y) in a.1.iter_mut().zip(b.1) {
                    *x += y;
                }
                Ok(a)
            },
        )?;

    // Two-sample homogeneity statistic over the occupied bins; with equal
    // sample sizes the expected count in each cell is half the column sum.
    let occupied: Vec<usize> = (0..bins)
        .filter(|&i| counts_digraph[i] + counts_twosat[i] > 0)
        .collect();
    if occupied.len() <= 1 {
        return Ok(MarginalTestReport {
            arcs: f_arcs.to_vec(),
            trials,
            counts_digraph,
            counts_twosat,
            statistic: 0.0,
            df: 0,
            p_value: None,
            degenerate: true,
            reject: false,
        });
    }
    let mut statistic = 0.0;
    for &i in &occupied {
        let expected = (counts_digraph[i] + counts_twosat[i]) as f64 / 2.0;
        for observed in [counts_digraph[i], counts_twosat[i]] {
            let diff = observed as f64 - expected;
            statistic += diff * diff / expected;
        }
    }
    let df = occupied.len() - 1;
    let dist = ChiSquared::new(df as f64)
        .map_err(|e| Error::param(format!("chi-square setup failed: {e}")))?;
    let p_value = 1.0 - dist.cdf(statistic);
    Ok(MarginalTestReport {
        arcs: f_arcs.to_vec(),
        trials,
        counts_digraph,
        counts_twosat,
        statistic,
        df,
        p_value: Some(p_value),
        degenerate: false,
        reject: p_value < MARGINAL_TEST_SIGNIFICANCE,
    })
}

impl fmt::Display for MarginalTestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "marginal equality test on {} arc(s), {} trials per model", self.arcs.len(), self.trials)?;
        for (i, (u, v)) in self.arcs.iter().enumerate() {
            writeln!(f, "  arc {i}: {u} -> {v}")?;
        }
        writeln!(f, "  bins (digraph | twosat):")?;
        for i in 0..self.counts_digraph.len() {
            if self.counts_digraph[i] + self.counts_twosat[i] > 0 {
                writeln!(
                    f,
                    "    {:0width$b}: {} | {}",
                    i,
                    self.counts_digraph[i],
                    self.counts_twosat[i],
                    width = self.arcs.len()
                )?;
            }
        }
        if self.degenerate {
            writeln!(f, "  degenerate: all mass in one bin, no test possible")?;
        } else {
            writeln!(
                f,
                "  chi-square = {:.6}, df = {}, p = {:.6}, reject at {} = {}",
                self.statistic,
                self.df,
                self.p_value.unwrap_or(f64::NAN),
                MARGINAL_TEST_SIGNIFICANCE,
                self.reject
            )?;
        }
        Ok(())
    }
}

/// CSV with one row per cell: `scale,n,trials,sat,frac,lo95,hi95`.
pub fn write_sweep_csv<W: io::Write>(result: &SweepResult, out: &mut W) -> io::Result<()> {
    writeln!(out, "scale,n,trials,sat,frac,lo95,hi95")?;
    for c in &result.cells {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            c.scale, c.n, c.trials, c.sat, c.frac, c.lo95, c.hi95
        )?;
    }
    Ok(())
}

/// Hand-rolled SVG line plot of sat_fraction against scale, one polyline
/// per n, Wilson whiskers per point, and a dashed vertical marker at the
/// predicted threshold when one exists.
pub fn write_sweep_svg<W: io::Write>(result: &SweepResult, out: &mut W) -> io::Result<()> {
    const WIDTH: f64 = 640.0;
    const HEIGHT: f64 = 420.0;
    const LEFT: f64 = 62.0;
    const RIGHT: f64 = 18.0;
    const TOP: f64 = 22.0;
    const BOTTOM: f64 = 48.0;
    const PALETTE: [&str; 6] = [
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
    ];

    let cells: Vec<&SweepCell> = result.cells.iter().filter(|c| c.trials > 0).collect();
    let (mut x_min, mut x_max) = cells
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), c| {
            (lo.min(c.scale), hi.max(c.scale))
        });
    if let Some(marker) = result.prediction.scale() {
        x_min = x_min.min(marker);
        x_max = x_max.max(marker);
    }
    if !x_min.is_finite() || !x_max.is_finite() {
        x_min = 0.0;
        x_max = 1.0;
    }
    if x_max - x_min < 1e-12 {
        x_min -= 0.5;
        x_max += 0.5;
    }
    let x = |scale: f64| LEFT + (scale - x_min) / (x_max - x_min) * (WIDTH - LEFT - RIGHT);
    let y = |frac: f64| TOP + (1.0 - frac) * (HEIGHT - TOP - BOTTOM);

    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    )?;
    writeln!(out, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#)?;

    // Axes and ticks.
    writeln!(
        out,
        r#"<line x1="{LEFT}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        y(0.0),
        WIDTH - RIGHT,
        y(0.0)
    )?;
    writeln!(
        out,
        r#"<line x1="{LEFT}" y1="{}" x2="{LEFT}" y2="{}" stroke="black"/>"#,
        y(0.0),
        y(1.0)
    )?;
    for i in 0..=4 {
        let frac = i as f64 / 4.0;
        writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{LEFT}" y2="{}" stroke="black"/>"#,
            LEFT - 4.0,
            y(frac),
            y(frac)
        )?;
        writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="end" dominant-baseline="middle">{}</text>"#,
            LEFT - 8.0,
            y(frac),
            frac
        )?;
        let scale = x_min + frac * (x_max - x_min);
        writeln!(
            out,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
            x(scale),
            y(0.0),
            x(scale),
            y(0.0) + 4.0
        )?;
        writeln!(
            out,
            r#"<text x="{}" y="{}" text-anchor="middle">{:.3}</text>"#,
            x(scale),
            y(0.0) + 18.0,
            scale
        )?;
    }
    writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">scale</text>"#,
        LEFT + (WIDTH - LEFT - RIGHT) / 2.0,
        HEIGHT - 10.0
    )?;
    writeln!(
        out,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">sat fraction</text>"#,
        TOP + (HEIGHT - TOP - BOTTOM) / 2.0,
        TOP + (HEIGHT - TOP - BOTTOM) / 2.0
    )?;

    // Threshold marker.
    if let Some(marker) = result.prediction.scale() {
        writeln!(
            out,
            r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="gray" stroke-dasharray="5,4"/>"#,
            x(marker),
            y(1.0),
            y(0.0)
        )?;
        writeln!(
            out,
            r#"<text x="{}" y="{}" fill="gray">1/rho_star = {:.4}</text>"#,
            x(marker) + 5.0,
            TOP + 12.0,
            marker
        )?;
    }

    // One polyline (plus whiskers) per n, in first-seen order.
    let mut n_order: Vec<usize> = Vec::new();
    for c in &cells {
        if !n_order.contains(&c.n) {
            n_order.push(c.n);
        }
    }
    for (idx, &n) in n_order.iter().enumerate() {
        let color = PALETTE[idx % PALETTE.len()];
        let mut series: Vec<&&SweepCell> = cells.iter().filter(|c| c.n == n).collect();
        series.sort_by(|a, b| a.scale.total_cmp(&b.scale));
        let points: Vec<String> = series
            .iter()
            .map(|c| format!("{:.2},{:.2}", x(c.scale), y(c.frac)))
            .collect();
        writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            points.join(" ")
        )?;
        for c in &series {
            writeln!(
                out,
                r#"<line x1="{0:.2}" y1="{1:.2}" x2="{0:.2}" y2="{2:.2}" stroke="{color}" stroke-width="1"/>"#,
                x(c.scale),
                y(c.lo95),
                y(c.hi95)
            )?;
            writeln!(
                out,
                r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                x(c.scale),
                y(c.frac)
            )?;
        }
        writeln!(
            out,
            r#"<text x="{}" y="{}" fill="{color}">n = {n}</text>"#,
            WIDTH - RIGHT - 80.0,
            TOP + 16.0 * (idx as f64 + 1.0)
        )?;
    }
    writeln!(out, "</svg>")
}

//! Monte Carlo harness: parameter sweeps run as independent seeded trials
//! on a worker pool, merged by trial index into deterministic CSV.

mod config;

use std::fmt::Write as _;
use std::sync::Arc;
use std::time::{Duration, Instant};

use log::{info, warn};
use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;

use crate::engine::{
    connect_forest_components, connect_forest_components_observed, has_rainbow_spanning_tree,
    StuckReason,
};
use crate::error::{Error, Result};
use crate::graph::{build_host, edge_connectivity, Graph};
use crate::lemmas::{
    check_color_hit, check_cut_sparsity, check_straddle, cut_lemma_hypothesis, CheckReport,
    CutPolicy, LemmaId,
};
use crate::random::{
    build_exposure_stack, color_uniform, flatten, mix64, sample_subgraph, trial_seed, Color,
    LayerLabel, ModelParams, RandomStream,
};

pub use config::{DegreeRule, ExperimentConfig, HostFamily, Mode, PalettePolicy};

/// Stream id for random host construction; layer streams use small ids.
const HOST_STREAM: u64 = u64::MAX;
const CUT_STREAM: u64 = u64::MAX - 1;
const COLOR_HIT_STREAM: u64 = u64::MAX - 2;

/// Above this order sampled cuts replace exhaustive enumeration.
const EXHAUSTIVE_CUT_LIMIT: usize = 12;

/// Candidate `|K|` values for the color-hit check, clipped to its bound.
const COLOR_HIT_SIZES: [usize; 3] = [1, 4, 16];

pub const THRESHOLD_CSV_HEADER: &str =
    "n,d,lambda,c,trials,success_frac,missing_color_frac,isolated_frac";
pub const PIPELINE_CSV_HEADER: &str = "n,d,lambda,epsilon,seed,exact_rst,pipeline_rst,\
initial_forest_size,driver_iterations,max_J,stuck_reason";

/// A host instance shared by every trial at one order.
#[derive(Clone, Debug)]
pub struct Host {
    pub graph: Arc<Graph>,
    pub d: usize,
    pub lambda: usize,
}

impl Host {
    pub fn prepare(cfg: &ExperimentConfig, n: usize) -> Result<Host> {
        let spec = cfg.host_spec(n)?;
        let mut rng = RandomStream::new(mix64(cfg.master_seed ^ n as u64), HOST_STREAM);
        let graph = build_host(&spec, &mut rng)?;
        let lambda = edge_connectivity(&graph);
        info!(
            "host {spec}: d = {}, lambda = {lambda}, lambda/n = {:.3}",
            spec.degree(),
            lambda as f64 / n as f64
        );
        Ok(Host {
            d: spec.degree(),
            graph: Arc::new(graph),
            lambda,
        })
    }
}

/// Master seed of one `(n, coefficient)` cell, independent of list order.
pub fn cell_seed(master_seed: u64, n: usize, coeff: f64) -> u64 {
    mix64(master_seed ^ mix64(n as u64 ^ mix64(coeff.to_bits())))
}

/// One Monte Carlo trial.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub n: usize,
    pub d: usize,
    pub lambda: usize,
    pub c_or_epsilon: f64,
    pub seed: u64,
    pub mode: Mode,
    pub exact_rst: bool,
    pub pipeline_rst: bool,
    pub initial_forest_size: usize,
    pub missing_colors_after_initial: usize,
    pub driver_iterations: usize,
    pub max_j_seen: usize,
    pub stuck_reason: Option<StuckReason>,
    /// The sampled layer misses some color of the palette.
    pub missing_color: bool,
    pub isolated_vertex: bool,
    /// No sparse layers exist at this order; only `G_p` was exposed.
    pub p_layer_only: bool,
    pub wall_time: Duration,
}

impl TrialRecord {
    fn blank(n: usize, host: &Host, coeff: f64, seed: u64, mode: Mode) -> Self {
        TrialRecord {
            n,
            d: host.d,
            lambda: host.lambda,
            c_or_epsilon: coeff,
            seed,
            mode,
            exact_rst: false,
            pipeline_rst: false,
            initial_forest_size: 0,
            missing_colors_after_initial: 0,
            driver_iterations: 0,
            max_j_seen: 0,
            stuck_reason: None,
            missing_color: false,
            isolated_vertex: false,
            p_layer_only: false,
            wall_time: Duration::ZERO,
        }
    }

    pub fn pipeline_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.n,
            self.d,
            self.lambda,
            self.c_or_epsilon,
            self.seed,
            self.exact_rst,
            self.pipeline_rst,
            self.initial_forest_size,
            self.driver_iterations,
            self.max_j_seen,
            self.stuck_reason.map_or(String::new(), |r| r.to_string())
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThresholdCell {
    pub n: usize,
    pub d: usize,
    pub lambda: usize,
    pub c: f64,
    pub trials: usize,
    pub success_frac: f64,
    pub missing_color_frac: f64,
    pub isolated_frac: f64,
}

impl ThresholdCell {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6},{:.6},{:.6}",
            self.n,
            self.d,
            self.lambda,
            self.c,
            self.trials,
            self.success_frac,
            self.missing_color_frac,
            self.isolated_frac
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SkippedCell {
    pub n: usize,
    pub c: f64,
    pub reason: String,
}

/// Adjacent cells whose success fraction drops by more than three
/// standard errors as the coefficient grows.
#[derive(Clone, Debug, PartialEq)]
pub struct TrendInversion {
    pub n: usize,
    pub c_low: f64,
    pub c_high: f64,
    pub drop: f64,
    pub standard_error: f64,
}

#[derive(Clone, Debug)]
pub struct ThresholdReport {
    pub cells: Vec<ThresholdCell>,
    pub skipped: Vec<SkippedCell>,
    pub inversions: Vec<TrendInversion>,
    pub records: Vec<TrialRecord>,
}

impl ThresholdReport {
    pub fn csv(&self) -> String {
        let mut out = format!("{THRESHOLD_CSV_HEADER}\n");
        for cell in &self.cells {
            writeln!(out, "{}", cell.csv_row()).unwrap();
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct PipelineReport {
    pub records: Vec<TrialRecord>,
}

impl PipelineReport {
    pub fn csv(&self) -> String {
        let mut out = format!("{PIPELINE_CSV_HEADER}\n");
        for r in &self.records {
            writeln!(out, "{}", r.pipeline_csv_row()).unwrap();
        }
        out
    }
}

/// One row per `(cell, lemma)`; each trial counts as one instance.
#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub rows: Vec<(usize, f64, CheckReport)>,
}

impl LemmaReport {
    pub fn csv(&self) -> String {
        let mut out = format!("{}\n", CheckReport::CSV_HEADER);
        for (_, _, r) in &self.rows {
            writeln!(out, "{}", r.csv_row()).unwrap();
        }
        out
    }

    pub fn get(&self, lemma: LemmaId) -> Option<CheckReport> {
        CheckReport::combine(self.rows.iter().map(|(_, _, r)| r).filter(|r| r.lemma == lemma))
    }
}

#[derive(Clone, Debug)]
pub enum ExperimentOutput {
    Threshold(ThresholdReport),
    Pipeline(PipelineReport),
    Lemma(LemmaReport),
}

impl ExperimentOutput {
    pub fn csv(&self) -> String {
        match self {
            ExperimentOutput::Threshold(r) => r.csv(),
            ExperimentOutput::Pipeline(r) => r.csv(),
            ExperimentOutput::Lemma(r) => r.csv(),
        }
    }
}

/// Runs `f` over `0..jobs` on a pool of `threads` workers (0 = all cores),
/// returning results in index order.
fn run_indexed<T, F>(threads: usize, jobs: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(usize) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Parameter(format!("thread pool: {e}")))?;
    pool.install(|| (0..jobs).into_par_iter().map(f).collect())
}

pub fn run_experiment(cfg: &ExperimentConfig, threads: usize) -> Result<ExperimentOutput> {
    Ok(match cfg.mode {
        Mode::ExactThreshold => ExperimentOutput::Threshold(run_threshold_experiment(cfg, threads)?),
        Mode::Pipeline => ExperimentOutput::Pipeline(run_pipeline_experiment(cfg, threads)?),
        Mode::Lemma => ExperimentOutput::Lemma(run_lemma_experiment(cfg, threads)?),
    })
}

fn require_mode(cfg: &ExperimentConfig, mode: Mode) -> Result<()> {
    cfg.validate()?;
    if cfg.mode != mode {
        return Err(Error::Parameter(format!(
            "config mode is {}, expected {mode}",
            cfg.mode
        )));
    }
    Ok(())
}

/// Cells in `(n, coefficient)` order with their host, and the trial grid
/// flattened in that order.
struct Grid {
    cells: Vec<(usize, f64, Arc<Host>)>,
    trials: usize,
}

impl Grid {
    fn new(cfg: &ExperimentConfig, mut keep: impl FnMut(usize, f64, &Host) -> bool) -> Result<Grid> {
        let mut cells = Vec::new();
        for &n in &cfg.n_list {
            let host = Arc::new(Host::prepare(cfg, n)?);
            for &c in &cfg.coeff_list {
                if keep(n, c, &host) {
                    cells.push((n, c, host.clone()));
                }
            }
        }
        Ok(Grid {
            cells,
            trials: cfg.trials,
        })
    }

    fn jobs(&self) -> usize {
        self.cells.len() * self.trials
    }

    fn job(&self, i: usize) -> (usize, f64, &Host, u64) {
        let (n, c, host) = &self.cells[i / self.trials];
        (*n, *c, host, (i % self.trials) as u64)
    }
}

pub fn run_threshold_experiment(cfg: &ExperimentConfig, threads: usize) -> Result<ThresholdReport> {
    require_mode(cfg, Mode::ExactThreshold)?;
    let mut skipped = Vec::new();
    let grid = Grid::new(cfg, |n, c, host| {
        let p = c * (n as f64).ln() / host.d as f64;
        if p >= 1.0 {
            let reason = format!("p = {p:.4} >= 1");
            warn!("skipping cell n = {n}, c = {c}: {reason}");
            skipped.push(SkippedCell { n, c, reason });
            false
        } else {
            true
        }
    })?;
    let records = run_indexed(threads, grid.jobs(), |i| {
        let (n, c, host, trial) = grid.job(i);
        let seed = trial_seed(cell_seed(cfg.master_seed, n, c), trial);
        threshold_trial(cfg, n, c, host, seed)
    })?;

    let cells: Vec<ThresholdCell> = grid
        .cells
        .iter()
        .zip(records.chunks(grid.trials))
        .map(|((n, c, host), rs)| {
            let frac = |pred: fn(&TrialRecord) -> bool| {
                rs.iter().filter(|r| pred(r)).count() as f64 / rs.len() as f64
            };
            ThresholdCell {
                n: *n,
                d: host.d,
                lambda: host.lambda,
                c: *c,
                trials: rs.len(),
                success_frac: frac(|r| r.exact_rst),
                missing_color_frac: frac(|r| r.missing_color),
                isolated_frac: frac(|r| r.isolated_vertex),
            }
        })
        .collect();
    let inversions = trend_inversions(&cells);
    for inv in &inversions {
        warn!(
            "success fraction drops by {:.3} ({:.1} standard errors) from c = {} to c = {} at n = {}",
            inv.drop,
            inv.drop / inv.standard_error,
            inv.c_low,
            inv.c_high,
            inv.n
        );
    }
    Ok(ThresholdReport {
        cells,
        skipped,
        inversions,
        records,
    })
}

fn threshold_trial(
    cfg: &ExperimentConfig,
    n: usize,
    c: f64,
    host: &Host,
    seed: u64,
) -> Result<TrialRecord> {
    let start = Instant::now();
    let mut rec = TrialRecord::blank(n, host, c, seed, Mode::ExactThreshold);
    let p = c * (n as f64).ln() / host.d as f64;
    let mut rng = RandomStream::new(seed, 0);
    let kept = sample_subgraph(&host.graph, p, &mut rng)?;
    let palette = cfg.palette.resolve(n);
    let gp = color_uniform(host.graph.clone(), &kept, palette, LayerLabel::Percolation, &mut rng)?;
    rec.exact_rst = has_rainbow_spanning_tree(&gp);
    rec.missing_color = gp.missing_color_count() > 0;
    rec.isolated_vertex = gp.has_isolated_vertex();
    rec.wall_time = start.elapsed();
    Ok(rec)
}

/// Adjacent cells (same `n`, increasing coefficient) whose success
/// fraction drops by more than three standard errors of the difference.
pub fn trend_inversions(cells: &[ThresholdCell]) -> Vec<TrendInversion> {
    let mut sorted: Vec<&ThresholdCell> = cells.iter().collect();
    sorted.sort_by(|a, b| a.n.cmp(&b.n).then(a.c.total_cmp(&b.c)));
    sorted
        .windows(2)
        .filter(|w| w[0].n == w[1].n)
        .filter_map(|w| {
            let (lo, hi) = (w[0], w[1]);
            let var = |x: &ThresholdCell| x.success_frac * (1.0 - x.success_frac) / x.trials as f64;
            let se = (var(lo) + var(hi)).sqrt();
            let drop = lo.success_frac - hi.success_frac;
            (drop > 0.0 && drop > 3.0 * se).then(|| TrendInversion {
                n: lo.n,
                c_low: lo.c,
                c_high: hi.c,
                drop,
                standard_error: se,
            })
        })
        .collect()
}

pub fn run_pipeline_experiment(cfg: &ExperimentConfig, threads: usize) -> Result<PipelineReport> {
    require_mode(cfg, Mode::Pipeline)?;
    let grid = Grid::new(cfg, |_, _, _| true)?;
    let records = run_indexed(threads, grid.jobs(), |i| {
        let (n, eps, host, trial) = grid.job(i);
        let seed = trial_seed(cell_seed(cfg.master_seed, n, eps), trial);
        pipeline_trial(host, eps, cfg.palette.resolve(n), seed)
    })?;
    for r in records.iter().filter(|r| r.p_layer_only).take(1) {
        info!("n = {}: no sparse layers, pipeline ran on G_p alone", r.n);
    }
    Ok(PipelineReport { records })
}

/// Builds the exposure stack under `seed`, decides the flattened instance
/// exactly and runs the component-connecting driver.
pub fn pipeline_trial(host: &Host, epsilon: f64, palette: Color, seed: u64) -> Result<TrialRecord> {
    let start = Instant::now();
    let n = host.graph.n();
    let mut rec = TrialRecord::blank(n, host, epsilon, seed, Mode::Pipeline);
    let params = ModelParams::new(n, host.d, epsilon);
    let stack = build_exposure_stack(host.graph.clone(), &params, palette, seed)?;
    let flat = flatten(&stack);
    rec.exact_rst = has_rainbow_spanning_tree(&flat);
    let run = connect_forest_components(&stack);
    rec.pipeline_rst = run.outcome.is_tree();
    rec.initial_forest_size = run.initial_forest_size;
    rec.missing_colors_after_initial = run.missing_colors_after_initial;
    rec.driver_iterations = run.trace.len();
    rec.max_j_seen = run.max_j;
    rec.stuck_reason = match &run.outcome {
        crate::engine::DriverOutcome::Stuck { diagnostics, .. } => Some(diagnostics.reason),
        crate::engine::DriverOutcome::Tree(_) => None,
    };
    rec.missing_color = stack.p_layer().missing_color_count() > 0;
    rec.isolated_vertex = flat.has_isolated_vertex();
    rec.p_layer_only = params.sparse_layer_count() == 0;
    assert!(
        !rec.pipeline_rst || rec.exact_rst,
        "driver found a rainbow spanning tree the exact oracle missed (seed {seed})"
    );
    rec.wall_time = start.elapsed();
    Ok(rec)
}

pub fn run_lemma_experiment(cfg: &ExperimentConfig, threads: usize) -> Result<LemmaReport> {
    require_mode(cfg, Mode::Lemma)?;
    let grid = Grid::new(cfg, |_, _, _| true)?;
    let per_trial = run_indexed(threads, grid.jobs(), |i| {
        let (n, eps, host, trial) = grid.job(i);
        let seed = trial_seed(cell_seed(cfg.master_seed, n, eps), trial);
        lemma_trial(cfg, host, eps, seed)
    })?;
    let mut rows = Vec::new();
    for ((n, eps, _), trials) in grid.cells.iter().zip(per_trial.chunks(grid.trials)) {
        for &lemma in &cfg.lemmas {
            let merged = CheckReport::combine(trials.iter().flatten().filter(|r| r.lemma == lemma));
            if let Some(r) = merged {
                if r.hypothesis_failures > 0 {
                    info!(
                        "{lemma} at n = {n}, epsilon = {eps}: hypothesis failed on {} of {} instances",
                        r.hypothesis_failures, r.instances_checked
                    );
                }
                rows.push((*n, *eps, r));
            }
        }
    }
    Ok(LemmaReport { rows })
}

/// One trial of every configured lemma check, each collapsed to a single
/// instance. Straddle yields nothing when the initial forest is spanning.
pub fn lemma_trial(
    cfg: &ExperimentConfig,
    host: &Host,
    epsilon: f64,
    seed: u64,
) -> Result<Vec<CheckReport>> {
    let g = &host.graph;
    let n = g.n();
    let params = ModelParams::new(n, host.d, epsilon);
    let stack = build_exposure_stack(g.clone(), &params, cfg.palette.resolve(n), seed)?;
    let flat_ids = flatten(&stack).edge_ids();
    let mut out = Vec::new();
    for &lemma in &cfg.lemmas {
        match lemma {
            LemmaId::CutSparsity => {
                let policy = if n <= EXHAUSTIVE_CUT_LIMIT {
                    CutPolicy::Exhaustive
                } else {
                    CutPolicy::Sampled {
                        count: cfg.cut_samples,
                    }
                };
                let mut rng = RandomStream::new(seed, CUT_STREAM);
                let mut r = check_cut_sparsity(g, &flat_ids, policy, &mut rng)?.collapsed();
                let held = cut_lemma_hypothesis(n, params.inclusion_probability_bound());
                r.hypothesis_failures = usize::from(!held);
                out.push(r);
            }
            LemmaId::ColorHit => {
                let gp = stack.p_layer();
                let mut rng = RandomStream::new(seed, COLOR_HIT_STREAM);
                let bound = n as f64 / (cfg.omega * (n as f64).ln());
                let size = COLOR_HIT_SIZES[rng.gen_range(0..COLOR_HIT_SIZES.len())]
                    .min(bound.floor() as usize)
                    .min(gp.palette() as usize);
                if size == 0 {
                    continue;
                }
                let k: Vec<Color> = index::sample(&mut rng, gp.palette() as usize, size)
                    .into_iter()
                    .map(|c| c as Color + 1)
                    .collect();
                out.push(check_color_hit(gp, &k, cfg.omega)?);
            }
            LemmaId::Straddle => {
                let mut acc: Option<CheckReport> = None;
                let mut failure = None;
                connect_forest_components_observed(&stack, &mut |f| {
                    match check_straddle(g, host.lambda, &flat_ids, &f.partition()) {
                        Ok(r) => match &mut acc {
                            Some(a) => a.merge(&r),
                            None => acc = Some(r),
                        },
                        Err(e) => failure = Some(e),
                    }
                });
                if let Some(e) = failure {
                    return Err(e);
                }
                out.extend(acc.map(|r| r.collapsed()));
            }
        }
    }
    Ok(out)
}

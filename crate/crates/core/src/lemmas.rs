//! Checkers for the supporting lemmas on realized instances.
//!
//! The probabilistic lemmas are only claimed asymptotically almost surely,
//! so every checker reports counts and the worst observed slack rather than
//! asserting anything per instance.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph, Partition};
use crate::random::{Color, ColoredSubgraph, RandomStream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LemmaId {
    CutSparsity,
    Straddle,
    ColorHit,
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LemmaId::CutSparsity => "cuts",
            LemmaId::Straddle => "straddle",
            LemmaId::ColorHit => "colorhit",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    pub lemma: LemmaId,
    pub instances_checked: usize,
    pub violations: usize,
    /// Minimum slack seen, in the lemma's own units (edges or vertices).
    pub worst_margin: f64,
    /// Instances on which the lemma's hypothesis did not hold.
    pub hypothesis_failures: usize,
}

impl CheckReport {
    pub const CSV_HEADER: &'static str = "lemma,instances,violations,worst_margin";

    fn single(lemma: LemmaId, margin: f64, hypothesis_held: bool) -> Self {
        CheckReport {
            lemma,
            instances_checked: 1,
            violations: usize::from(margin < 0.0),
            worst_margin: margin,
            hypothesis_failures: usize::from(!hypothesis_held),
        }
    }

    pub fn merge(&mut self, other: &CheckReport) {
        assert_eq!(self.lemma, other.lemma, "merging reports of different lemmas");
        self.instances_checked += other.instances_checked;
        self.violations += other.violations;
        self.worst_margin = self.worst_margin.min(other.worst_margin);
        self.hypothesis_failures += other.hypothesis_failures;
    }

    /// Folds a sequence of reports; `None` if it is empty.
    pub fn combine<'a, I: IntoIterator<Item = &'a CheckReport>>(reports: I) -> Option<Self> {
        let mut it = reports.into_iter();
        let mut acc = it.next()?.clone();
        for r in it {
            acc.merge(r);
        }
        Some(acc)
    }

    /// The batch as a single instance, violated if any member was.
    pub fn collapsed(&self) -> CheckReport {
        CheckReport {
            lemma: self.lemma,
            instances_checked: 1,
            violations: usize::from(self.violations > 0),
            worst_margin: self.worst_margin,
            hypothesis_failures: usize::from(self.hypothesis_failures > 0),
        }
    }

    pub fn violation_rate(&self) -> f64 {
        self.violations as f64 / self.instances_checked as f64
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.4}",
            self.lemma, self.instances_checked, self.violations, self.worst_margin
        )
    }
}

/// The cut lemma's hypothesis `p < ln^2 n / n`.
pub fn cut_lemma_hypothesis(n: usize, p: f64) -> bool {
    let ln = (n as f64).ln();
    p < ln * ln / n as f64
}

pub const MAX_EXHAUSTIVE_CUT_N: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CutPolicy {
    /// All `2^(n-1) - 1` bipartitions; needs `n <= 20`.
    Exhaustive,
    /// Uniform random nontrivial bipartitions.
    Sampled { count: usize },
}

/// Checks `|kept ∩ S| <= |S| / 2` on edge cuts `S` of `g`. Each cut is one
/// instance in the report; the margin is `|S| / 2 - |kept ∩ S|`.
pub fn check_cut_sparsity(
    g: &Graph,
    kept: &[EdgeId],
    policy: CutPolicy,
    rng: &mut RandomStream,
) -> Result<CheckReport> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Precondition("cuts need at least two vertices".into()));
    }
    let mut is_kept = vec![false; g.edge_count()];
    for &id in kept {
        is_kept[id] = true;
    }
    let mut report = CheckReport {
        lemma: LemmaId::CutSparsity,
        instances_checked: 0,
        violations: 0,
        worst_margin: f64::INFINITY,
        hypothesis_failures: 0,
    };
    let mut side = vec![false; n];
    let record = |side: &[bool], report: &mut CheckReport| {
        let mut cut = 0usize;
        let mut inside = 0usize;
        for (id, &(u, v)) in g.edges().iter().enumerate() {
            if side[u] != side[v] {
                cut += 1;
                inside += usize::from(is_kept[id]);
            }
        }
        let margin = cut as f64 / 2.0 - inside as f64;
        report.instances_checked += 1;
        report.violations += usize::from(margin < 0.0);
        report.worst_margin = report.worst_margin.min(margin);
    };
    match policy {
        CutPolicy::Exhaustive => {
            if n > MAX_EXHAUSTIVE_CUT_N {
                return Err(Error::Precondition(format!(
                    "exhaustive cut enumeration needs n <= {MAX_EXHAUSTIVE_CUT_N}, got {n}"
                )));
            }
            // Vertex n-1 stays on the `false` side.
            for mask in 1u64..(1u64 << (n - 1)) {
                for (v, s) in side.iter_mut().enumerate().take(n - 1) {
                    *s = mask >> v & 1 == 1;
                }
                side[n - 1] = false;
                record(&side, &mut report);
            }
        }
        CutPolicy::Sampled { count } => {
            if count == 0 {
                return Err(Error::Precondition("sampled policy needs count >= 1".into()));
            }
            for _ in 0..count {
                loop {
                    side.iter_mut().for_each(|s| *s = rng.gen_bool(0.5));
                    if side.iter().any(|&s| s) && side.iter().any(|&s| !s) {
                        break;
                    }
                }
                record(&side, &mut report);
            }
        }
    }
    Ok(report)
}

/// Counts host edges outside `excluded` that join different blocks of
/// `partition`; margin is that count minus `lambda * t / 4`. The half-cut
/// hypothesis on each block boundary is checked and recorded.
pub fn check_straddle(
    g: &Graph,
    lambda: usize,
    excluded: &[EdgeId],
    partition: &Partition,
) -> Result<CheckReport> {
    let t = partition.block_count();
    if t < 2 {
        return Err(Error::Precondition(format!("partition needs t >= 2 blocks, got {t}")));
    }
    let n = g.n();
    let mut is_excluded = vec![false; g.edge_count()];
    for &id in excluded {
        is_excluded[id] = true;
    }
    // boundary[b] and excluded boundary edges per block, indexed by label.
    let mut boundary = vec![0usize; n];
    let mut boundary_excluded = vec![0usize; n];
    let mut crossing = 0usize;
    for (id, &(u, v)) in g.edges().iter().enumerate() {
        let (a, b) = (partition.label(u), partition.label(v));
        if a != b {
            boundary[a] += 1;
            boundary[b] += 1;
            if is_excluded[id] {
                boundary_excluded[a] += 1;
                boundary_excluded[b] += 1;
            } else {
                crossing += 1;
            }
        }
    }
    let hypothesis_held = (0..n)
        .filter(|&v| partition.label(v) == v)
        .all(|b| 2 * boundary_excluded[b] <= boundary[b]);
    let margin = crossing as f64 - lambda as f64 * t as f64 / 4.0;
    Ok(CheckReport::single(LemmaId::Straddle, margin, hypothesis_held))
}

/// Counts vertices touching a `K`-colored edge; margin is that count minus
/// `|K| ln n / omega`. Requires `|K| <= n / (omega ln n)`.
pub fn check_color_hit(gp: &ColoredSubgraph, k: &[Color], omega: f64) -> Result<CheckReport> {
    let n = gp.n() as f64;
    if !(omega > 0.0) {
        return Err(Error::Precondition(format!("omega must be positive, got {omega}")));
    }
    let bound = n / (omega * n.ln());
    if k.len() as f64 > bound {
        return Err(Error::Precondition(format!(
            "|K| = {} exceeds n / (omega ln n) = {bound:.3}",
            k.len()
        )));
    }
    let mut in_k = vec![false; gp.palette() as usize + 1];
    for &c in k {
        if let Some(slot) = in_k.get_mut(c as usize) {
            *slot = true;
        }
    }
    let mut hit = vec![false; gp.n()];
    for e in gp.colored_edges() {
        if in_k[e.color as usize] {
            hit[e.u] = true;
            hit[e.v] = true;
        }
    }
    let count = hit.iter().filter(|&&h| h).count();
    let margin = count as f64 - k.len() as f64 * n.ln() / omega;
    Ok(CheckReport::single(LemmaId::ColorHit, margin, true))
}

//! The component-connecting loop.
//!
//! Starting from the matching-based forest on `G_p`, each iteration with
//! `t > 1` components tries, in order:
//!
//! 1. greedy additions from the pool `G_p + E(F*)`;
//! 2. the exchange search from the smallest missing color `sigma`, which may
//!    end in a larger forest;
//! 3. an exact augmenting-path step on the pool;
//! 4. otherwise, the first edge of the fresh part of `G_{s_t}` whose color
//!    lies in `J` and which joins two components; the witness forest for that
//!    color plus the edge becomes the new `F*`.
//!
//! The pool is `G_p` plus every edge any `F*` has ever held.

use std::fmt;

use crate::random::{fresh_layer_view, Color, ExposureStack};

use super::exact::augment_once;
use super::exchange::{replacement_color_set, SearchOutcome};
use super::forest::{greedy_augment, EdgePool, RainbowForest};
use super::initial::build_initial_forest;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DriverAction {
    Greedy,
    Exchange,
    Augment,
    ExchangeLayer,
}

impl fmt::Display for DriverAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DriverAction::Greedy => "greedy",
            DriverAction::Exchange => "exchange",
            DriverAction::Augment => "augment",
            DriverAction::ExchangeLayer => "exchange+layer",
        })
    }
}

/// One driver iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    /// Components before the iteration.
    pub t: usize,
    pub action: DriverAction,
    pub sigma: Option<Color>,
    pub j_size: Option<usize>,
    pub chosen_j: Option<Color>,
}

impl TraceEntry {
    pub const CSV_HEADER: &'static str = "t,action,sigma,J,chosen_j";

    pub fn csv_row(&self) -> String {
        fn opt<T: fmt::Display>(x: Option<T>) -> String {
            x.map_or_else(|| "-".to_string(), |v| v.to_string())
        }
        format!(
            "{},{},{},{},{}",
            self.t,
            self.action,
            opt(self.sigma),
            opt(self.j_size),
            opt(self.chosen_j)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StuckReason {
    /// `t` has no sparse layer `G_{s_t}`.
    LayerRangeExhausted,
    /// No color is missing from the forest.
    ColorsExhausted,
    /// The fresh part of `G_{s_t}` has no usable edge.
    NoFreshEdge,
}

impl fmt::Display for StuckReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StuckReason::LayerRangeExhausted => "layer range exhausted",
            StuckReason::ColorsExhausted => "colors exhausted",
            StuckReason::NoFreshEdge => "no fresh edge",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StuckDiagnostics {
    pub reason: StuckReason,
    pub t: usize,
    pub j_size: Option<usize>,
    /// Sparse index whose layer was consumed without success.
    pub layer: Option<usize>,
    pub missing_colors: Vec<Color>,
}

#[derive(Clone, Debug)]
pub enum DriverOutcome {
    Tree(RainbowForest),
    Stuck {
        forest: RainbowForest,
        diagnostics: StuckDiagnostics,
    },
}

impl DriverOutcome {
    pub fn is_tree(&self) -> bool {
        matches!(self, DriverOutcome::Tree(_))
    }

    pub fn forest(&self) -> &RainbowForest {
        match self {
            DriverOutcome::Tree(f) | DriverOutcome::Stuck { forest: f, .. } => f,
        }
    }
}

#[derive(Clone, Debug)]
pub struct DriverRun {
    pub outcome: DriverOutcome,
    pub initial_forest_size: usize,
    pub missing_colors_after_initial: usize,
    pub trace: Vec<TraceEntry>,
    pub max_j: usize,
}

pub fn connect_forest_components(stack: &ExposureStack) -> DriverRun {
    connect_forest_components_observed(stack, &mut |_| {})
}

/// As [`connect_forest_components`], calling `observe` with `F*` at the start
/// of every iteration that has more than one component.
pub fn connect_forest_components_observed(
    stack: &ExposureStack,
    observe: &mut dyn FnMut(&RainbowForest),
) -> DriverRun {
    let gp = stack.p_layer();
    let mut forest = build_initial_forest(gp);
    let mut pool = EdgePool::from_subgraph(gp);
    let initial_forest_size = forest.len();
    let missing_colors_after_initial = forest.missing_colors().len();
    let mut trace = Vec::new();
    let mut max_j = 0;

    let stuck = |forest: RainbowForest, trace, max_j, diagnostics| DriverRun {
        outcome: DriverOutcome::Stuck {
            forest,
            diagnostics,
        },
        initial_forest_size,
        missing_colors_after_initial,
        trace,
        max_j,
    };

    loop {
        let t = forest.component_count();
        if t <= 1 {
            break;
        }
        observe(&forest);
        let mut entry = TraceEntry {
            t,
            action: DriverAction::Greedy,
            sigma: None,
            j_size: None,
            chosen_j: None,
        };

        forest = greedy_augment(forest, &pool);
        if forest.component_count() < t {
            trace.push(entry);
            continue;
        }

        let Some(sigma) = forest.smallest_missing_color() else {
            debug_assert!(
                (forest.palette() as usize) < forest.n() - 1,
                "a rainbow forest with t > 1 misses a color of an (n-1)-palette"
            );
            let diagnostics = StuckDiagnostics {
                reason: StuckReason::ColorsExhausted,
                t,
                j_size: None,
                layer: None,
                missing_colors: Vec::new(),
            };
            return stuck(forest, trace, max_j, diagnostics);
        };
        entry.sigma = Some(sigma);

        let search = replacement_color_set(&forest, sigma, &pool)
            .expect("sigma is a missing color of the forest");
        let j_set = match search.outcome {
            SearchOutcome::Augmented { forest: grown, .. } => {
                entry.action = DriverAction::Exchange;
                forest = grown;
                pool.extend(forest.edges().copied());
                trace.push(entry);
                continue;
            }
            SearchOutcome::ColorSet(j_set) => j_set,
        };
        max_j = max_j.max(j_set.len());
        entry.j_size = Some(j_set.len());

        if let Some(grown) = augment_once(&forest, &pool) {
            entry.action = DriverAction::Augment;
            forest = grown;
            pool.extend(forest.edges().copied());
            trace.push(entry);
            continue;
        }

        let Ok(fresh) = fresh_layer_view(stack, t) else {
            let diagnostics = StuckDiagnostics {
                reason: StuckReason::LayerRangeExhausted,
                t,
                j_size: Some(j_set.len()),
                layer: None,
                missing_colors: forest.missing_colors(),
            };
            return stuck(forest, trace, max_j, diagnostics);
        };
        let found = fresh
            .iter()
            .find(|e| j_set.contains(e.color) && !forest.same_component(e.u, e.v));
        let Some(e) = found else {
            let diagnostics = StuckDiagnostics {
                reason: StuckReason::NoFreshEdge,
                t,
                j_size: Some(j_set.len()),
                layer: Some(t),
                missing_colors: forest.missing_colors(),
            };
            return stuck(forest, trace, max_j, diagnostics);
        };
        let mut next = j_set.witness(e.color).expect("color is in J");
        next.add(*e)
            .expect("witness misses the color of e and e joins two components");
        entry.action = DriverAction::ExchangeLayer;
        entry.chosen_j = Some(e.color);
        pool.insert(*e);
        forest = next;
        trace.push(entry);
    }

    DriverRun {
        outcome: DriverOutcome::Tree(forest),
        initial_forest_size,
        missing_colors_after_initial,
        trace,
        max_j,
    }
}

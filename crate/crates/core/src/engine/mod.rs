//! Rainbow forests and the search procedures built on them.

mod driver;
mod exact;
mod exchange;
mod forest;
mod initial;
mod schrijver;

pub use driver::{
    connect_forest_components, connect_forest_components_observed, DriverAction, DriverOutcome,
    DriverRun, StuckDiagnostics, StuckReason, TraceEntry,
};
pub use exact::{augment_once, has_rainbow_spanning_tree, max_rainbow_forest_exact, maximize};
pub use exchange::{
    replacement_color_set, ColorSet, Exchange, ReplacementSearchResult, SearchOutcome,
    SearchStats,
};
pub use forest::{greedy_augment, is_replaceable, EdgePool, RainbowForest};
pub use initial::{build_initial_forest, hopcroft_karp, initial_forest_parts, InitialForest};
pub use schrijver::{schrijver_suzuki_decide, MAX_ENUMERATED_COLORS};

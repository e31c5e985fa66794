//! Breadth-first search over single-edge exchanges.
//!
//! Each search state is a pair `(F, j)`: a rainbow forest with the same
//! components as the root `F*` whose colors are `colors(F*) + {sigma} - {j}`.
//! Expanding `(F, j)` tries every pool edge `e` of color `j`. If `e` joins
//! two components the search stops with the larger forest `F + e`.
//! Otherwise every edge `r` on the cycle of `F + e` whose color has not been
//! seen yields the child `(F + e - r, color(r))`. Each color is visited at
//! most once, so at most `palette + 1` states are expanded.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::Partition;
use crate::random::{Color, ColoredEdge};

use super::forest::{EdgePool, RainbowForest};

/// Re-verify every k-th search state in debug builds.
const VERIFY_STRIDE: usize = 4;

/// One replacement: `added` enters the forest and `removed` leaves it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Exchange {
    pub added: ColoredEdge,
    pub removed: ColoredEdge,
}

#[derive(Clone, Debug)]
struct Node {
    parent: Option<usize>,
    exchange: Option<Exchange>,
    color: Color,
}

/// The reachable colors `J` with one witness per color, stored as exchange
/// sequences from the root.
#[derive(Clone, Debug)]
pub struct ColorSet {
    root: RainbowForest,
    sigma: Color,
    nodes: Vec<Node>,
    by_color: BTreeMap<Color, usize>,
}

impl ColorSet {
    pub fn root(&self) -> &RainbowForest {
        &self.root
    }

    pub fn sigma(&self) -> Color {
        self.sigma
    }

    pub fn len(&self) -> usize {
        self.by_color.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_color.is_empty()
    }

    pub fn contains(&self, j: Color) -> bool {
        self.by_color.contains_key(&j)
    }

    /// Colors of `J`, ascending.
    pub fn colors(&self) -> Vec<Color> {
        self.by_color.keys().copied().collect()
    }

    /// Exchanges leading from the root to the witness for `j`.
    pub fn delta(&self, j: Color) -> Option<Vec<Exchange>> {
        self.by_color.get(&j).map(|&idx| delta_of(&self.nodes, idx))
    }

    /// Replays the exchanges for `j` on a copy of the root.
    pub fn witness(&self, j: Color) -> Option<RainbowForest> {
        self.by_color
            .get(&j)
            .map(|&idx| materialize(&self.root, &self.nodes, idx))
    }
}

fn delta_of(nodes: &[Node], mut idx: usize) -> Vec<Exchange> {
    let mut out = Vec::new();
    while let Some(x) = nodes[idx].exchange {
        out.push(x);
        idx = nodes[idx].parent.expect("non-root node has a parent");
    }
    out.reverse();
    out
}

fn materialize(root: &RainbowForest, nodes: &[Node], idx: usize) -> RainbowForest {
    let mut f = root.clone();
    for x in delta_of(nodes, idx) {
        f.exchange(x.added, x.removed.id)
            .expect("recorded exchanges replay on the root");
    }
    f
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    /// A rainbow forest with one more edge than the root.
    Augmented {
        forest: RainbowForest,
        /// Exchanges applied before the final edge was added.
        delta: Vec<Exchange>,
        added: ColoredEdge,
    },
    ColorSet(ColorSet),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes_expanded: usize,
    pub colors_visited: usize,
}

#[derive(Clone, Debug)]
pub struct ReplacementSearchResult {
    pub outcome: SearchOutcome,
    pub stats: SearchStats,
}

/// Runs the exchange search from `(f_star, sigma)` over `pool`.
///
/// Pool edges are tried in ascending id order and cycle edges in ascending
/// id order, so the result is fully deterministic.
pub fn replacement_color_set(
    f_star: &RainbowForest,
    sigma: Color,
    pool: &EdgePool,
) -> Result<ReplacementSearchResult> {
    let palette = f_star.palette();
    if sigma == 0 || sigma > palette {
        return Err(Error::Precondition(format!("sigma {sigma} outside 1..={palette}")));
    }
    if f_star.color_used(sigma) {
        return Err(Error::Precondition(format!("sigma {sigma} already used by the forest")));
    }
    if pool.palette() > palette {
        return Err(Error::Precondition("pool palette exceeds forest palette".into()));
    }

    let root_partition = cfg!(debug_assertions).then(|| f_star.partition());
    let mut visited = vec![false; palette as usize + 1];
    visited[sigma as usize] = true;
    let mut nodes = vec![Node {
        parent: None,
        exchange: None,
        color: sigma,
    }];
    let mut queue = VecDeque::from([0usize]);
    let mut stats = SearchStats {
        nodes_expanded: 0,
        colors_visited: 1,
    };

    while let Some(idx) = queue.pop_front() {
        let forest = materialize(f_star, &nodes, idx);
        stats.nodes_expanded += 1;
        let j = nodes[idx].color;
        if let Some(partition) = &root_partition {
            if idx % VERIFY_STRIDE == 0 {
                verify_state(f_star, sigma, &forest, j, partition);
            }
        }
        for e in pool.of_color(j) {
            if forest.contains(e.id) {
                continue;
            }
            let Some(mut cycle) = forest.tree_path(e.u, e.v) else {
                let mut grown = forest.clone();
                grown.add(*e).expect("color j is free and e joins components");
                return Ok(ReplacementSearchResult {
                    outcome: SearchOutcome::Augmented {
                        forest: grown,
                        delta: delta_of(&nodes, idx),
                        added: *e,
                    },
                    stats,
                });
            };
            cycle.sort_by_key(|r| r.id);
            for r in cycle {
                if !visited[r.color as usize] {
                    visited[r.color as usize] = true;
                    stats.colors_visited += 1;
                    nodes.push(Node {
                        parent: Some(idx),
                        exchange: Some(Exchange {
                            added: *e,
                            removed: r,
                        }),
                        color: r.color,
                    });
                    queue.push_back(nodes.len() - 1);
                }
            }
        }
    }

    let by_color = nodes
        .iter()
        .enumerate()
        .map(|(idx, node)| (node.color, idx))
        .collect();
    Ok(ReplacementSearchResult {
        outcome: SearchOutcome::ColorSet(ColorSet {
            root: f_star.clone(),
            sigma,
            nodes,
            by_color,
        }),
        stats,
    })
}

fn verify_state(
    root: &RainbowForest,
    sigma: Color,
    forest: &RainbowForest,
    j: Color,
    partition: &Partition,
) {
    forest
        .check_invariants()
        .expect("search state is a rainbow forest");
    assert_eq!(&forest.partition(), partition, "search state changed the partition");
    let mut expected: Vec<Color> = root.used_colors();
    expected.push(sigma);
    expected.retain(|&c| c != j);
    expected.sort_unstable();
    assert_eq!(forest.used_colors(), expected, "search state has the wrong colors");
}

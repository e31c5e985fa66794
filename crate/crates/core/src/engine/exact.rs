//! Maximum rainbow forests by matroid intersection.
//!
//! A rainbow forest is a common independent set of the graphic matroid and
//! the partition matroid of color classes. Each round searches the exchange
//! graph of the current forest for a shortest path from an edge that joins
//! two components to an edge of an unused color:
//!
//! * non-forest `x` -> forest `y` when `y` has the color of `x`;
//! * forest `y` -> non-forest `x` when `y` lies on the forest path of `x`.
//!
//! Flipping a shortest such path grows the forest by one edge.

use std::collections::{HashMap, VecDeque};

use crate::graph::EdgeId;
use crate::random::{ColoredEdge, ColoredSubgraph};

use super::forest::{greedy_augment, EdgePool, RainbowForest};

/// Parent pointers of the forest rooted at the smallest vertex of each tree.
struct Rooted {
    parent: Vec<Option<(usize, EdgeId)>>,
    depth: Vec<usize>,
}

impl Rooted {
    fn new(f: &RainbowForest) -> Self {
        let n = f.n();
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let mut queue = VecDeque::from([root]);
            while let Some(x) = queue.pop_front() {
                for &(y, id) in f.neighbors(x) {
                    if !seen[y] {
                        seen[y] = true;
                        parent[y] = Some((x, id));
                        depth[y] = depth[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
        }
        Rooted { parent, depth }
    }

    /// Edge ids on the path between `u` and `v`, which share a tree.
    fn path(&self, mut u: usize, mut v: usize) -> Vec<EdgeId> {
        let mut ids = Vec::new();
        while u != v {
            if self.depth[u] >= self.depth[v] {
                let (p, id) = self.parent[u].expect("non-root has a parent");
                ids.push(id);
                u = p;
            } else {
                let (p, id) = self.parent[v].expect("non-root has a parent");
                ids.push(id);
                v = p;
            }
        }
        ids
    }
}

/// One augmentation step: a rainbow forest on `f`'s edges plus `pool` with
/// exactly one more edge, or `None` if `f` is already maximum there.
pub fn augment_once(f: &RainbowForest, pool: &EdgePool) -> Option<RainbowForest> {
    let outside: Vec<ColoredEdge> = pool.iter().filter(|e| !f.contains(e.id)).copied().collect();
    let joins = |e: &ColoredEdge| !f.same_component(e.u, e.v);
    let free_color = |e: &ColoredEdge| !f.color_used(e.color);

    if let Some(e) = outside.iter().find(|e| joins(e) && free_color(e)) {
        let mut g = f.clone();
        g.add(*e).expect("joins components with a free color");
        return Some(g);
    }

    let rooted = Rooted::new(f);
    // covers[y] = outside edges whose forest path passes through y
    let mut covers: HashMap<EdgeId, Vec<usize>> = HashMap::new();
    for (xi, e) in outside.iter().enumerate() {
        if !joins(e) {
            for y in rooted.path(e.u, e.v) {
                covers.entry(y).or_default().push(xi);
            }
        }
    }

    let mut x_prev: Vec<Option<EdgeId>> = vec![None; outside.len()];
    let mut x_seen = vec![false; outside.len()];
    let mut y_prev: HashMap<EdgeId, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    for (xi, e) in outside.iter().enumerate() {
        if joins(e) {
            x_seen[xi] = true;
            queue.push_back(xi);
        }
    }

    let mut sink = None;
    while let Some(xi) = queue.pop_front() {
        let x = &outside[xi];
        if free_color(x) {
            sink = Some(xi);
            break;
        }
        let y = f.color_owner(x.color).expect("used color has an owner").id;
        if y_prev.contains_key(&y) {
            continue;
        }
        y_prev.insert(y, xi);
        for &next in covers.get(&y).map_or(&[][..], Vec::as_slice) {
            if !x_seen[next] {
                x_seen[next] = true;
                x_prev[next] = Some(y);
                queue.push_back(next);
            }
        }
    }

    let mut xi = sink?;
    let mut added = vec![outside[xi]];
    let mut removed = Vec::new();
    while let Some(y) = x_prev[xi] {
        removed.push(y);
        xi = y_prev[&y];
        added.push(outside[xi]);
    }
    let kept = f.edges().filter(|e| !removed.contains(&e.id)).copied();
    let next = RainbowForest::from_edges(f.n(), f.palette(), kept.chain(added))
        .expect("shortest augmenting path yields a rainbow forest");
    debug_assert_eq!(next.len(), f.len() + 1);
    Some(next)
}

/// Greedy fill followed by augmentations until none remains.
pub fn maximize(f: RainbowForest, pool: &EdgePool) -> RainbowForest {
    let mut f = greedy_augment(f, pool);
    while let Some(g) = augment_once(&f, pool) {
        f = g;
    }
    f
}

/// A maximum-cardinality rainbow forest of `cg`. A rainbow spanning tree
/// exists iff the result has `n - 1` edges.
pub fn max_rainbow_forest_exact(cg: &ColoredSubgraph) -> RainbowForest {
    let pool = EdgePool::from_subgraph(cg);
    maximize(RainbowForest::new(cg.n(), cg.palette()), &pool)
}

pub fn has_rainbow_spanning_tree(cg: &ColoredSubgraph) -> bool {
    cg.n() <= 1 || max_rainbow_forest_exact(cg).len() == cg.n() - 1
}

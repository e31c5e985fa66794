//! Brute-force oracles shared by the integration tests. None of them use
//! the engine: they rely only on plain edge lists and a local union-find.
#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;
use rainbow_core::random::{Color, ColoredEdge, ColoredSubgraph, LayerLabel, RandomStream};
use rainbow_core::Graph;

/// Minimal union-find, kept separate from the crate's own.
pub struct Uf(Vec<usize>);

impl Uf {
    pub fn new(n: usize) -> Self {
        Uf((0..n).collect())
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        self.0[a] = b;
        true
    }
}

/// True iff `edges` are acyclic on `n` vertices.
pub fn is_forest(n: usize, edges: &[ColoredEdge]) -> bool {
    let mut uf = Uf::new(n);
    edges.iter().all(|e| uf.union(e.u, e.v))
}

pub fn is_rainbow(edges: &[ColoredEdge]) -> bool {
    let mut colors: Vec<Color> = edges.iter().map(|e| e.color).collect();
    colors.sort_unstable();
    colors.windows(2).all(|w| w[0] != w[1])
}

/// Canonical block labels: each vertex mapped to the smallest vertex of its component.
pub fn component_labels(n: usize, edges: &[ColoredEdge]) -> Vec<usize> {
    let mut uf = Uf::new(n);
    for e in edges {
        uf.union(e.u, e.v);
    }
    let mut min_of = vec![usize::MAX; n];
    for v in 0..n {
        let r = uf.find(v);
        min_of[r] = min_of[r].min(v);
    }
    (0..n).map(|v| min_of[uf.find(v)]).collect()
}

/// Existence of a rainbow spanning tree by exhaustive backtracking over
/// edges (include if it joins components with a fresh color, or skip).
pub fn rainbow_spanning_tree_exists(cg: &ColoredSubgraph) -> bool {
    let n = cg.n();
    if n <= 1 {
        return true;
    }
    let edges = cg.colored_edges();
    fn go(
        i: usize,
        edges: &[ColoredEdge],
        chosen: &mut Vec<ColoredEdge>,
        n: usize,
    ) -> bool {
        if chosen.len() == n - 1 {
            return true;
        }
        if edges.len() - i < n - 1 - chosen.len() {
            return false;
        }
        let e = edges[i];
        chosen.push(e);
        if is_forest(n, chosen) && is_rainbow(chosen) && go(i + 1, edges, chosen, n) {
            return true;
        }
        chosen.pop();
        go(i + 1, edges, chosen, n)
    }
    go(0, &edges, &mut Vec::new(), n)
}

/// Largest rainbow forest size by exhaustive backtracking.
pub fn max_rainbow_forest_size(cg: &ColoredSubgraph) -> usize {
    let n = cg.n();
    let edges = cg.colored_edges();
    fn go(i: usize, edges: &[ColoredEdge], chosen: &mut Vec<ColoredEdge>, n: usize) -> usize {
        if i == edges.len() {
            return chosen.len();
        }
        let mut best = go(i + 1, edges, chosen, n);
        chosen.push(edges[i]);
        if is_forest(n, chosen) && is_rainbow(chosen) {
            best = best.max(go(i + 1, edges, chosen, n));
        }
        chosen.pop();
        best
    }
    go(0, &edges, &mut Vec::new(), n)
}

/// All subsets of `pool` of size `k`, as index vectors.
pub fn subsets(len: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, len: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..len {
            if len - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, len, k, cur, out);
            cur.pop();
        }
    }
    go(0, len, k, &mut cur, &mut out);
    out
}

/// Colors `j` for which some rainbow forest inside `pool` has the same
/// components as `f_star` and color set `colors(f_star) + sigma - j`.
pub fn definable_j(n: usize, pool: &[ColoredEdge], f_star: &[ColoredEdge], sigma: Color) -> Vec<Color> {
    let target = component_labels(n, f_star);
    let mut base: Vec<Color> = f_star.iter().map(|e| e.color).collect();
    base.push(sigma);
    let mut found = Vec::new();
    for idx in subsets(pool.len(), f_star.len()) {
        let f: Vec<ColoredEdge> = idx.iter().map(|&i| pool[i]).collect();
        if !is_rainbow(&f) || !is_forest(n, &f) || component_labels(n, &f) != target {
            continue;
        }
        let colors: Vec<Color> = f.iter().map(|e| e.color).collect();
        if colors.iter().any(|c| !base.contains(c)) {
            continue;
        }
        // exactly one color of `base` is absent
        let absent: Vec<Color> = base.iter().copied().filter(|c| !colors.contains(c)).collect();
        if absent.len() == 1 && !found.contains(&absent[0]) {
            found.push(absent[0]);
        }
    }
    found.sort_unstable();
    found
}

/// Random host on `n` vertices: each pair kept with probability `density`.
pub fn random_graph(n: usize, density: f64, rng: &mut RandomStream) -> Graph {
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                pairs.push((u, v));
            }
        }
    }
    Graph::from_edges(n, pairs).unwrap()
}

/// Every edge of `host` colored uniformly from `1..=palette`.
pub fn random_coloring(host: Graph, palette: Color, rng: &mut RandomStream) -> ColoredSubgraph {
    let edges = (0..host.edge_count())
        .map(|id| (id, rng.gen_range(1..=palette)))
        .collect();
    ColoredSubgraph::new(Arc::new(host), palette, edges, LayerLabel::Custom).unwrap()
}

/// A rainbow forest built from a random ordering of `cg`'s edges, keeping
/// each edge with probability `keep` when it stays rainbow and acyclic.
pub fn random_rainbow_forest(cg: &ColoredSubgraph, keep: f64, rng: &mut RandomStream) -> Vec<ColoredEdge> {
    let mut edges = cg.colored_edges();
    for i in (1..edges.len()).rev() {
        edges.swap(i, rng.gen_range(0..=i));
    }
    let mut chosen: Vec<ColoredEdge> = Vec::new();
    for e in edges {
        if !rng.gen_bool(keep) {
            continue;
        }
        chosen.push(e);
        if !is_forest(cg.n(), &chosen) || !is_rainbow(&chosen) {
            chosen.pop();
        }
    }
    chosen.sort_by_key(|e| e.id);
    chosen
}

/// Every set partition of `0..n` as block ids (restricted growth strings).
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn go(i: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            cur[i] = b;
            go(i + 1, max.max(b), cur, out);
        }
    }
    if n == 0 {
        return vec![Vec::new()];
    }
    go(1, 0, &mut cur, &mut out);
    out
}

/// Minimum edge cut by enumerating every bipartition.
pub fn brute_edge_connectivity(g: &Graph) -> usize {
    let n = g.n();
    (1u64..(1u64 << (n - 1)))
        .map(|mask| {
            g.edges()
                .iter()
                .filter(|&&(u, v)| (mask >> u & 1) != (mask >> v & 1))
                .count()
        })
        .min()
        .unwrap_or(0)
}

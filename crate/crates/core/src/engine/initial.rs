//! Initial rainbow forest on the dense layer.
//!
//! Colors are matched to vertices in the bipartite graph where color `j`
//! sees vertex `v` when some `j`-colored edge touches `v`. Each matched
//! vertex sends its matched-color edge out of itself, which gives a
//! functional graph with distinct arc colors. Dropping one edge per cycle
//! leaves a rainbow forest.

use std::collections::VecDeque;

use crate::random::{Color, ColoredEdge, ColoredSubgraph};

use super::forest::RainbowForest;

const NIL: usize = usize::MAX;

/// Maximum bipartite matching. `adj[l]` lists right vertices of left vertex
/// `l`. Returns the right partner of every left vertex.
pub fn hopcroft_karp(adj: &[Vec<usize>], right_len: usize) -> Vec<Option<usize>> {
    let left_len = adj.len();
    let mut match_l = vec![NIL; left_len];
    let mut match_r = vec![NIL; right_len];
    let mut dist = vec![0usize; left_len];

    loop {
        // Layer the left side from its free vertices.
        let mut queue = VecDeque::new();
        for l in 0..left_len {
            if match_l[l] == NIL {
                dist[l] = 0;
                queue.push_back(l);
            } else {
                dist[l] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(l) = queue.pop_front() {
            for &r in &adj[l] {
                let m = match_r[r];
                if m == NIL {
                    found = true;
                } else if dist[m] == usize::MAX {
                    dist[m] = dist[l] + 1;
                    queue.push_back(m);
                }
            }
        }
        if !found {
            break;
        }
        let mut progressed = false;
        let mut next_edge = vec![0usize; left_len];
        for l in 0..left_len {
            if match_l[l] == NIL
                && augment(l, adj, &mut match_l, &mut match_r, &mut dist, &mut next_edge)
            {
                progressed = true;
            }
        }
        if !progressed {
            break;
        }
    }
    match_l
        .into_iter()
        .map(|r| (r != NIL).then_some(r))
        .collect()
}

fn augment(
    l: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    dist: &mut [usize],
    next_edge: &mut [usize],
) -> bool {
    while next_edge[l] < adj[l].len() {
        let r = adj[l][next_edge[l]];
        next_edge[l] += 1;
        let m = match_r[r];
        let ok = m == NIL
            || (dist[m] == dist[l] + 1 && augment(m, adj, match_l, match_r, dist, next_edge));
        if ok {
            match_l[l] = r;
            match_r[r] = l;
            return true;
        }
    }
    dist[l] = usize::MAX;
    false
}

/// The initial forest with the counts behind it.
#[derive(Clone, Debug)]
pub struct InitialForest {
    pub forest: RainbowForest,
    /// Vertices that received a matched color.
    pub matched: usize,
    /// Cycles of the functional graph, one edge dropped from each.
    pub cycles_broken: usize,
}

pub fn build_initial_forest(gp: &ColoredSubgraph) -> RainbowForest {
    initial_forest_parts(gp).forest
}

pub fn initial_forest_parts(gp: &ColoredSubgraph) -> InitialForest {
    let n = gp.n();
    let palette = gp.palette();
    // For each (color, vertex) keep the smallest-id incident edge of that color.
    let mut choice: Vec<Vec<(usize, ColoredEdge)>> = vec![Vec::new(); palette as usize + 1];
    for e in gp.colored_edges() {
        choice[e.color as usize].push((e.u, e));
        choice[e.color as usize].push((e.v, e));
    }
    for class in choice.iter_mut() {
        class.sort_by_key(|&(v, e)| (v, e.id));
        class.dedup_by_key(|&mut (v, _)| v);
    }
    let adj: Vec<Vec<usize>> = (1..=palette)
        .map(|c| choice[c as usize].iter().map(|&(v, _)| v).collect())
        .collect();
    let matching = hopcroft_karp(&adj, n);

    // out[v] = (head, edge) for each matched vertex.
    let mut out: Vec<Option<(usize, ColoredEdge)>> = vec![None; n];
    let mut matched = 0;
    for (left, partner) in matching.iter().enumerate() {
        if let Some(v) = *partner {
            let c = left as Color + 1;
            let class = &choice[c as usize];
            let at = class
                .binary_search_by_key(&v, |&(w, _)| w)
                .expect("matched pair is an edge of the bipartite graph");
            let e = class[at].1;
            let head = if e.u == v { e.v } else { e.u };
            out[v] = Some((head, e));
            matched += 1;
        }
    }

    // Walk the functional graph; drop the smallest-id edge of every cycle.
    let mut state = vec![0u8; n]; // 0 unseen, 1 on current walk, 2 finished
    let mut dropped = vec![false; n];
    let mut cycles_broken = 0;
    for start in 0..n {
        if state[start] != 0 {
            continue;
        }
        let mut walk = Vec::new();
        let mut v = start;
        loop {
            if state[v] == 1 {
                let from = walk.iter().position(|&w| w == v).expect("on walk");
                let tail = walk[from..]
                    .iter()
                    .copied()
                    .min_by_key(|&w: &usize| out[w].expect("cycle vertex has an arc").1.id)
                    .expect("cycle is nonempty");
                dropped[tail] = true;
                cycles_broken += 1;
                break;
            }
            if state[v] == 2 {
                break;
            }
            state[v] = 1;
            walk.push(v);
            match out[v] {
                Some((head, _)) => v = head,
                None => break,
            }
        }
        for w in walk {
            state[w] = 2;
        }
    }

    let mut forest = RainbowForest::new(n, palette);
    for v in 0..n {
        if let (Some((_, e)), false) = (out[v], dropped[v]) {
            forest
                .add(e)
                .expect("functional graph minus one arc per cycle is a rainbow forest");
        }
    }
    InitialForest {
        forest,
        matched,
        cycles_broken,
    }
}

//! Exponential decision procedure from the color-deletion characterization:
//! a rainbow spanning tree exists iff deleting every edge of any `k` colors
//! (`0 <= k <= n - 2`) leaves at most `k + 1` components.

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::random::ColoredSubgraph;

pub const MAX_ENUMERATED_COLORS: usize = 24;

/// Only colors that occur are enumerated. Deleting an absent color removes
/// nothing while raising `k`, so those subsets can never be the witness.
pub fn schrijver_suzuki_decide(cg: &ColoredSubgraph) -> Result<bool> {
    let n = cg.n();
    if n <= 1 {
        return Ok(true);
    }
    let colors = cg.present_colors();
    if colors.len() > MAX_ENUMERATED_COLORS {
        return Err(Error::EnumerationGuard {
            colors: colors.len(),
            limit: MAX_ENUMERATED_COLORS,
        });
    }
    let mut bit = vec![0u32; cg.palette() as usize + 1];
    for (i, &c) in colors.iter().enumerate() {
        bit[c as usize] = 1 << i;
    }
    let edges: Vec<(usize, usize, u32)> = cg
        .colored_edges()
        .iter()
        .map(|e| (e.u, e.v, bit[e.color as usize]))
        .collect();
    let mut dsu = DisjointSets::new(n);
    for mask in 0u32..(1u32 << colors.len()) {
        let k = mask.count_ones() as usize;
        if k > n - 2 {
            continue;
        }
        dsu.reset();
        for &(u, v, b) in &edges {
            if mask & b == 0 {
                dsu.union(u, v);
            }
        }
        if dsu.set_count() > k + 1 {
            return Ok(false);
        }
    }
    Ok(true)
}

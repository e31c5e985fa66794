use std::collections::{BTreeMap, VecDeque};

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Partition};
use crate::random::{Color, ColoredEdge, ColoredSubgraph};

/// A forest on `0..n` whose edges carry pairwise distinct colors.
#[derive(Clone, Debug)]
pub struct RainbowForest {
    n: usize,
    palette: Color,
    edges: BTreeMap<EdgeId, ColoredEdge>,
    color_owner: Vec<Option<EdgeId>>,
    adj: Vec<Vec<(usize, EdgeId)>>,
    comp: DisjointSets,
}

impl PartialEq for RainbowForest {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.palette == other.palette && self.edges == other.edges
    }
}

impl Eq for RainbowForest {}

impl RainbowForest {
    pub fn new(n: usize, palette: Color) -> Self {
        RainbowForest {
            n,
            palette,
            edges: BTreeMap::new(),
            color_owner: vec![None; palette as usize + 1],
            adj: vec![Vec::new(); n],
            comp: DisjointSets::new(n),
        }
    }

    pub fn from_edges<I>(n: usize, palette: Color, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = ColoredEdge>,
    {
        let mut f = RainbowForest::new(n, palette);
        for e in edges {
            f.add(e)?;
        }
        Ok(f)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn palette(&self) -> Color {
        self.palette
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Edges in ascending id order.
    pub fn edges(&self) -> impl Iterator<Item = &ColoredEdge> + '_ {
        self.edges.values()
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges.keys().copied().collect()
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.edges.contains_key(&id)
    }

    pub fn get(&self, id: EdgeId) -> Option<&ColoredEdge> {
        self.edges.get(&id)
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, EdgeId)] {
        &self.adj[v]
    }

    pub fn color_used(&self, c: Color) -> bool {
        self.color_owner
            .get(c as usize)
            .is_some_and(|owner| owner.is_some())
    }

    /// The forest edge of color `c`, if any.
    pub fn color_owner(&self, c: Color) -> Option<&ColoredEdge> {
        self.color_owner
            .get(c as usize)
            .copied()
            .flatten()
            .map(|id| &self.edges[&id])
    }

    pub fn used_colors(&self) -> Vec<Color> {
        let mut cs: Vec<Color> = self.edges.values().map(|e| e.color).collect();
        cs.sort_unstable();
        cs
    }

    pub fn missing_colors(&self) -> Vec<Color> {
        (1..=self.palette).filter(|&c| !self.color_used(c)).collect()
    }

    pub fn smallest_missing_color(&self) -> Option<Color> {
        (1..=self.palette).find(|&c| !self.color_used(c))
    }

    pub fn component_count(&self) -> usize {
        self.comp.set_count()
    }

    pub fn same_component(&self, u: usize, v: usize) -> bool {
        self.comp.same(u, v)
    }

    pub fn is_spanning_tree(&self) -> bool {
        self.n > 0 && self.component_count() == 1
    }

    pub fn partition(&self) -> Partition {
        Partition::from_dsu(&self.comp)
    }

    /// Whether `e` could be added: new edge, unused color in the palette,
    /// endpoints in distinct components.
    pub fn can_add(&self, e: &ColoredEdge) -> bool {
        e.u < self.n
            && e.v < self.n
            && e.color >= 1
            && e.color <= self.palette
            && !self.contains(e.id)
            && !self.color_used(e.color)
            && !self.same_component(e.u, e.v)
    }

    pub fn add(&mut self, e: ColoredEdge) -> Result<()> {
        if !self.can_add(&e) {
            return Err(Error::Precondition(format!(
                "edge {} ({}-{}, color {}) cannot extend the forest",
                e.id, e.u, e.v, e.color
            )));
        }
        self.comp.union(e.u, e.v);
        self.insert_unchecked(e);
        Ok(())
    }

    fn insert_unchecked(&mut self, e: ColoredEdge) {
        self.adj[e.u].push((e.v, e.id));
        self.adj[e.v].push((e.u, e.id));
        self.color_owner[e.color as usize] = Some(e.id);
        self.edges.insert(e.id, e);
    }

    fn detach(&mut self, id: EdgeId) -> Option<ColoredEdge> {
        let e = self.edges.remove(&id)?;
        self.adj[e.u].retain(|&(_, x)| x != id);
        self.adj[e.v].retain(|&(_, x)| x != id);
        self.color_owner[e.color as usize] = None;
        Some(e)
    }

    /// Removes an edge and rebuilds the component structure.
    pub fn remove(&mut self, id: EdgeId) -> Option<ColoredEdge> {
        let e = self.detach(id)?;
        self.comp.reset();
        for x in self.edges.values() {
            self.comp.union(x.u, x.v);
        }
        Some(e)
    }

    /// Edges of the unique forest path from `u` to `v`, in walking order.
    /// `None` when `u` and `v` lie in different components.
    pub fn tree_path(&self, u: usize, v: usize) -> Option<Vec<ColoredEdge>> {
        if !self.same_component(u, v) {
            return None;
        }
        if u == v {
            return Some(Vec::new());
        }
        let mut via: Vec<Option<(usize, EdgeId)>> = vec![None; self.n];
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([u]);
        seen[u] = true;
        while let Some(x) = queue.pop_front() {
            if x == v {
                break;
            }
            for &(y, id) in &self.adj[x] {
                if !seen[y] {
                    seen[y] = true;
                    via[y] = Some((x, id));
                    queue.push_back(y);
                }
            }
        }
        let mut path = Vec::new();
        let mut x = v;
        while let Some((prev, id)) = via[x] {
            path.push(self.edges[&id]);
            x = prev;
        }
        path.reverse();
        Some(path)
    }

    /// Replaces forest edge `remove` with `add`, which must close a cycle
    /// through `remove`. The component partition is unchanged. The caller
    /// is responsible for `add`'s color being free once `remove` is gone.
    pub fn exchange(&mut self, add: ColoredEdge, remove: EdgeId) -> Result<ColoredEdge> {
        if self.contains(add.id) {
            return Err(Error::Precondition(format!("edge {} already in forest", add.id)));
        }
        let removed_color = self
            .get(remove)
            .ok_or_else(|| Error::Precondition(format!("edge {remove} not in forest")))?
            .color;
        if add.color == 0 || add.color > self.palette {
            return Err(Error::Precondition(format!("color {} outside palette", add.color)));
        }
        if self.color_used(add.color) && add.color != removed_color {
            return Err(Error::Precondition(format!(
                "color {} already used in forest",
                add.color
            )));
        }
        let on_cycle = self
            .tree_path(add.u, add.v)
            .is_some_and(|p| p.iter().any(|r| r.id == remove));
        if !on_cycle {
            return Err(Error::Precondition(format!(
                "edge {remove} is not replaceable by edge {}",
                add.id
            )));
        }
        let r = self.detach(remove).expect("checked above");
        self.insert_unchecked(add);
        Ok(r)
    }

    /// Recomputes every structural invariant from the edge list.
    pub fn check_invariants(&self) -> Result<()> {
        let mut dsu = DisjointSets::new(self.n);
        let mut colors = vec![false; self.palette as usize + 1];
        for e in self.edges.values() {
            if !dsu.union(e.u, e.v) {
                return Err(Error::Precondition(format!("edge {} closes a cycle", e.id)));
            }
            if e.color == 0 || e.color > self.palette || colors[e.color as usize] {
                return Err(Error::Precondition(format!("color {} repeated or invalid", e.color)));
            }
            colors[e.color as usize] = true;
            if self.color_owner[e.color as usize] != Some(e.id) {
                return Err(Error::Precondition("color index out of sync".into()));
            }
        }
        if self.edges.len() + dsu.set_count() != self.n {
            return Err(Error::Precondition("edge and component counts disagree".into()));
        }
        if Partition::from_dsu(&dsu) != self.partition() {
            return Err(Error::Precondition("component structure out of sync".into()));
        }
        let degree_sum: usize = self.adj.iter().map(Vec::len).sum();
        if degree_sum != 2 * self.edges.len() {
            return Err(Error::Precondition("adjacency out of sync".into()));
        }
        Ok(())
    }
}

/// Whether forest edge `r` is replaceable by `e`: `F + e` has a cycle through `r`.
pub fn is_replaceable(f: &RainbowForest, r: EdgeId, e: &ColoredEdge) -> Result<bool> {
    if !f.contains(r) {
        return Err(Error::Precondition(format!("edge {r} not in forest")));
    }
    if f.contains(e.id) {
        return Err(Error::Precondition(format!("edge {} already in forest", e.id)));
    }
    if e.u >= f.n() || e.v >= f.n() {
        return Err(Error::Precondition(format!("edge {} has endpoints out of range", e.id)));
    }
    Ok(f
        .tree_path(e.u, e.v)
        .is_some_and(|path| path.iter().any(|x| x.id == r)))
}

/// A deduplicated set of colored edges, indexed by color. Edges are kept in
/// ascending id order both overall and within each color class.
#[derive(Clone, Debug)]
pub struct EdgePool {
    palette: Color,
    edges: BTreeMap<EdgeId, ColoredEdge>,
    by_color: Vec<Vec<ColoredEdge>>,
}

impl EdgePool {
    pub fn new(palette: Color) -> Self {
        EdgePool {
            palette,
            edges: BTreeMap::new(),
            by_color: vec![Vec::new(); palette as usize + 1],
        }
    }

    pub fn from_edges<I: IntoIterator<Item = ColoredEdge>>(palette: Color, edges: I) -> Self {
        let mut pool = EdgePool::new(palette);
        pool.extend(edges);
        pool
    }

    pub fn from_subgraph(cg: &ColoredSubgraph) -> Self {
        EdgePool::from_edges(cg.palette(), cg.colored_edges())
    }

    pub fn palette(&self) -> Color {
        self.palette
    }

    /// Adds an edge; returns false if its id is already present.
    pub fn insert(&mut self, e: ColoredEdge) -> bool {
        assert!(
            e.color >= 1 && e.color <= self.palette,
            "color {} outside palette",
            e.color
        );
        if self.edges.contains_key(&e.id) {
            return false;
        }
        self.edges.insert(e.id, e);
        let class = &mut self.by_color[e.color as usize];
        let at = class.partition_point(|x| x.id < e.id);
        class.insert(at, e);
        true
    }

    pub fn extend<I: IntoIterator<Item = ColoredEdge>>(&mut self, edges: I) {
        for e in edges {
            self.insert(e);
        }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.edges.contains_key(&id)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ColoredEdge> + '_ {
        self.edges.values()
    }

    pub fn of_color(&self, c: Color) -> &[ColoredEdge] {
        self.by_color.get(c as usize).map_or(&[], Vec::as_slice)
    }
}

/// Adds pool edges in ascending id order whenever the color is unused and
/// the endpoints lie in different components. One pass suffices: a rejected
/// edge stays rejected as colors get used and components merge.
pub fn greedy_augment(mut f: RainbowForest, pool: &EdgePool) -> RainbowForest {
    for e in pool.iter() {
        if f.can_add(e) {
            f.add(*e).expect("can_add checked");
        }
    }
    f
}

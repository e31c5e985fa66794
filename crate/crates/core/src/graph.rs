//! Host graphs: construction, edge connectivity, components and the plain
//! text format.
//!
//! Vertices are `0..n`. Edges are stored as `(u, v)` with `u < v`, sorted
//! lexicographically, so an edge index is the edge's rank in that order and
//! survives a write/read cycle through the text format.

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::Rng;

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::random::RandomStream;

pub type EdgeId = usize;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<(usize, EdgeId)>>,
}

impl Graph {
    /// Builds a simple graph from unordered pairs. Pairs are normalized to
    /// `u < v` and sorted; loops, duplicates and out-of-range endpoints are
    /// rejected.
    pub fn from_edges<I>(n: usize, pairs: I) -> Result<Graph>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for (a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({a}, {b}) out of range for n = {n}"
                )));
            }
            if a == b {
                return Err(Error::InvalidGraph(format!("self-loop at {a}")));
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        if let Some(w) = edges.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidGraph(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        let mut adjacency = vec![Vec::new(); n];
        for (id, &(u, v)) in edges.iter().enumerate() {
            adjacency[u].push((v, id));
            adjacency[v].push((u, id));
        }
        Ok(Graph {
            n,
            edges,
            adjacency,
        })
    }

    pub fn complete(n: usize) -> Graph {
        let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
        Graph::from_edges(n, pairs).expect("complete graph is simple")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> (usize, usize) {
        self.edges[id]
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, EdgeId)] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    /// The common degree if the graph is regular.
    pub fn regular_degree(&self) -> Option<usize> {
        let d = self.degree(0);
        (0..self.n).all(|v| self.degree(v) == d).then_some(d)
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<EdgeId> {
        let key = (a.min(b), a.max(b));
        self.edges.binary_search(&key).ok()
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.n, self.edges.len())?;
        for &(u, v) in &self.edges {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("write to Vec");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Graph> {
        let mut lines = numbered_lines(r);
        let (line_no, header) = lines
            .next()
            .transpose()?
            .ok_or_else(|| Error::parse(1, "missing header"))?;
        let [n, m] = parse_fields::<2>(&header, line_no)?;
        let mut pairs = Vec::with_capacity(m);
        for _ in 0..m {
            let (line_no, line) = lines
                .next()
                .transpose()?
                .ok_or_else(|| Error::parse(line_no + 1, "fewer edges than declared"))?;
            let [u, v] = parse_fields::<2>(&line, line_no)?;
            pairs.push((u, v));
        }
        if let Some((line_no, _)) = lines.next().transpose()? {
            return Err(Error::parse(line_no, "more edges than declared"));
        }
        Graph::from_edges(n, pairs)
    }

    pub fn from_text(s: &str) -> Result<Graph> {
        Graph::read_text(s.as_bytes())
    }
}

/// Non-blank lines with their 1-based line numbers.
pub(crate) fn numbered_lines<R: BufRead>(
    r: R,
) -> impl Iterator<Item = Result<(usize, String)>> {
    r.lines()
        .enumerate()
        .filter_map(|(i, line)| match line {
            Ok(l) if l.trim().is_empty() => None,
            Ok(l) => Some(Ok((i + 1, l))),
            Err(e) => Some(Err(Error::from(e))),
        })
}

pub(crate) fn parse_fields<const K: usize>(line: &str, line_no: usize) -> Result<[usize; K]> {
    let mut out = [0usize; K];
    let mut fields = line.split_whitespace();
    for slot in out.iter_mut() {
        let tok = fields
            .next()
            .ok_or_else(|| Error::parse(line_no, format!("expected {K} fields")))?;
        *slot = tok
            .parse()
            .map_err(|_| Error::parse(line_no, format!("not an integer: {tok:?}")))?;
    }
    if fields.next().is_some() {
        return Err(Error::parse(line_no, format!("expected {K} fields")));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HostSpec {
    Complete { n: usize },
    Circulant { n: usize, offsets: Vec<usize> },
    RandomRegular { n: usize, d: usize },
}

impl HostSpec {
    /// Circulant with consecutive offsets reaching degree `d`. Odd `d` needs
    /// even `n` and uses the antipodal offset `n / 2`.
    pub fn circulant_with_degree(n: usize, d: usize) -> Result<HostSpec> {
        if d == 0 || d >= n {
            return Err(Error::InfeasibleHost(format!("degree {d} on {n} vertices")));
        }
        let mut offsets: Vec<usize> = (1..=d / 2).collect();
        if d % 2 == 1 {
            if n % 2 == 1 {
                return Err(Error::InfeasibleHost(format!(
                    "odd degree {d} circulant needs even n, got {n}"
                )));
            }
            if offsets.last() == Some(&(n / 2)) {
                return Err(Error::InfeasibleHost(format!("degree {d} on {n} vertices")));
            }
            offsets.push(n / 2);
        }
        Ok(HostSpec::Circulant { n, offsets })
    }

    pub fn n(&self) -> usize {
        match *self {
            HostSpec::Complete { n }
            | HostSpec::Circulant { n, .. }
            | HostSpec::RandomRegular { n, .. } => n,
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            HostSpec::Complete { n } => n.saturating_sub(1),
            HostSpec::Circulant { n, offsets } => {
                let antipodal = n % 2 == 0 && offsets.contains(&(n / 2));
                2 * offsets.len() - usize::from(antipodal)
            }
            HostSpec::RandomRegular { d, .. } => *d,
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, HostSpec::RandomRegular { .. })
    }

    /// Same family at a different order; circulants keep their degree.
    pub fn with_n(&self, n: usize) -> Result<HostSpec> {
        Ok(match self {
            HostSpec::Complete { .. } => HostSpec::Complete { n },
            HostSpec::Circulant { .. } => HostSpec::circulant_with_degree(n, self.degree())?,
            HostSpec::RandomRegular { d, .. } => HostSpec::RandomRegular { n, d: *d },
        })
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        if n < 2 {
            return Err(Error::InfeasibleHost(format!("need n >= 2, got {n}")));
        }
        match self {
            HostSpec::Complete { .. } => Ok(()),
            HostSpec::Circulant { offsets, .. } => {
                if offsets.is_empty() {
                    return Err(Error::InfeasibleHost("circulant needs offsets".into()));
                }
                let mut seen = HashSet::new();
                for &o in offsets {
                    if o == 0 || o > n / 2 {
                        return Err(Error::InfeasibleHost(format!(
                            "offset {o} outside 1..={}",
                            n / 2
                        )));
                    }
                    if !seen.insert(o) {
                        return Err(Error::InfeasibleHost(format!("duplicate offset {o}")));
                    }
                }
                Ok(())
            }
            HostSpec::RandomRegular { d, .. } => {
                if *d >= n {
                    return Err(Error::InfeasibleHost(format!("degree {d} >= n = {n}")));
                }
                if (n * d) % 2 == 1 {
                    return Err(Error::InfeasibleHost(format!("n * d = {} is odd", n * d)));
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for HostSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HostSpec::Complete { n } => write!(f, "complete:{n}"),
            HostSpec::Circulant { n, offsets } => {
                let list: Vec<String> = offsets.iter().map(|o| o.to_string()).collect();
                write!(f, "circulant:{n}:{}", list.join(","))
            }
            HostSpec::RandomRegular { n, d } => write!(f, "random-regular:{n}:{d}"),
        }
    }
}

/// Accepts `complete:N`, `circulant:N:OFFSETS` (comma list, ranges like
/// `1-64` allowed), `circulant:N:dD` (consecutive offsets of degree D) and
/// `random-regular:N:D`.
impl FromStr for HostSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<HostSpec> {
        let bad = |msg: &str| Error::Parameter(format!("host spec {s:?}: {msg}"));
        let parts: Vec<&str> = s.trim().split(':').collect();
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad("bad integer"));
        match parts.as_slice() {
            ["complete", n] => Ok(HostSpec::Complete { n: num(n)? }),
            ["circulant", n, list] => {
                let n = num(n)?;
                if let Some(d) = list.strip_prefix('d') {
                    return HostSpec::circulant_with_degree(n, num(d)?);
                }
                let mut offsets = Vec::new();
                for item in list.split(',') {
                    match item.split_once('-') {
                        Some((a, b)) => offsets.extend(num(a)?..=num(b)?),
                        None => offsets.push(num(item)?),
                    }
                }
                Ok(HostSpec::Circulant { n, offsets })
            }
            ["random-regular", n, d] => Ok(HostSpec::RandomRegular {
                n: num(n)?,
                d: num(d)?,
            }),
            _ => Err(bad("unknown family")),
        }
    }
}

const REGULAR_RESTARTS: usize = 200;

/// Builds the host graph for `spec`. Only the random-regular family draws
/// from `rng`.
pub fn build_host(spec: &HostSpec, rng: &mut RandomStream) -> Result<Graph> {
    spec.validate()?;
    match spec {
        HostSpec::Complete { n } => Ok(Graph::complete(*n)),
        HostSpec::Circulant { n, offsets } => {
            let n = *n;
            let mut pairs = HashSet::new();
            for v in 0..n {
                for &o in offsets {
                    let w = (v + o) % n;
                    pairs.insert((v.min(w), v.max(w)));
                }
            }
            Graph::from_edges(n, pairs)
        }
        HostSpec::RandomRegular { n, d } => random_regular(*n, *d, rng),
    }
}

/// Configuration model: points are paired at random and any pairing that
/// would create a loop or a repeated edge is rejected and redrawn. A run
/// that keeps rejecting restarts from scratch, up to a bounded count.
fn random_regular(n: usize, d: usize, rng: &mut RandomStream) -> Result<Graph> {
    if d == 0 {
        return Graph::from_edges(n, std::iter::empty());
    }
    'restart: for _ in 0..REGULAR_RESTARTS {
        let mut points: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        let mut present: HashSet<(usize, usize)> = HashSet::with_capacity(n * d / 2);
        while !points.is_empty() {
            let mut rejected = 0usize;
            loop {
                let i = rng.gen_range(0..points.len());
                let j = rng.gen_range(0..points.len());
                let (u, v) = (points[i], points[j]);
                let key = (u.min(v), u.max(v));
                if i != j && u != v && !present.contains(&key) {
                    present.insert(key);
                    let (hi, lo) = (i.max(j), i.min(j));
                    points.swap_remove(hi);
                    points.swap_remove(lo);
                    break;
                }
                rejected += 1;
                if rejected > 64 * points.len() {
                    continue 'restart;
                }
            }
        }
        return Graph::from_edges(n, present);
    }
    Err(Error::RegularSampling(REGULAR_RESTARTS))
}

/// Global minimum edge cut (Stoer–Wagner). Zero for disconnected graphs and
/// for graphs with fewer than two vertices.
pub fn edge_connectivity(g: &Graph) -> usize {
    let n = g.n();
    if n < 2 {
        return 0;
    }
    let mut w = vec![0u64; n * n];
    for &(u, v) in g.edges() {
        w[u * n + v] += 1;
        w[v * n + u] += 1;
    }
    let mut alive: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    let mut attach = vec![0u64; n];
    let mut added = vec![false; n];
    while alive.len() > 1 {
        for &v in &alive {
            attach[v] = 0;
            added[v] = false;
        }
        let mut prev = alive[0];
        let mut last = alive[0];
        for step in 0..alive.len() {
            let next = *alive
                .iter()
                .filter(|&&v| !added[v])
                .max_by_key(|&&v| (attach[v], std::cmp::Reverse(v)))
                .expect("unadded vertex remains");
            added[next] = true;
            if step + 1 == alive.len() {
                best = best.min(attach[next]);
                last = next;
            } else {
                prev = next;
                for &x in &alive {
                    attach[x] += w[next * n + x];
                }
            }
        }
        // Merge `last` into `prev`.
        for &x in &alive {
            let add = w[last * n + x];
            w[prev * n + x] += add;
            w[x * n + prev] += add;
        }
        w[prev * n + prev] = 0;
        alive.retain(|&v| v != last);
    }
    best as usize
}

/// A vertex partition labelled by the smallest vertex of each block.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
}

impl Partition {
    pub fn from_dsu(dsu: &DisjointSets) -> Partition {
        let n = dsu.len();
        let mut min_of_root = vec![usize::MAX; n];
        for v in 0..n {
            let r = dsu.root(v);
            min_of_root[r] = min_of_root[r].min(v);
        }
        Partition {
            labels: (0..n).map(|v| min_of_root[dsu.root(v)]).collect(),
        }
    }

    /// Normalizes arbitrary block ids to min-vertex labels.
    pub fn from_block_ids(ids: &[usize]) -> Partition {
        let mut first = std::collections::HashMap::new();
        let labels = ids
            .iter()
            .enumerate()
            .map(|(v, id)| *first.entry(*id).or_insert(v))
            .collect();
        Partition { labels }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn same_block(&self, a: usize, b: usize) -> bool {
        self.labels[a] == self.labels[b]
    }

    pub fn block_count(&self) -> usize {
        self.labels
            .iter()
            .enumerate()
            .filter(|&(v, &l)| v == l)
            .count()
    }

    /// Blocks in order of their smallest vertex.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut index = vec![usize::MAX; self.labels.len()];
        let mut out: Vec<Vec<usize>> = Vec::new();
        for (v, &l) in self.labels.iter().enumerate() {
            if index[l] == usize::MAX {
                index[l] = out.len();
                out.push(Vec::new());
            }
            out[index[l]].push(v);
        }
        out
    }
}

/// Connected components of the spanning subgraph with the given edges.
pub fn components(g: &Graph, edge_subset: &[EdgeId]) -> Partition {
    let mut dsu = DisjointSets::new(g.n());
    for &id in edge_subset {
        let (u, v) = g.edge(id);
        dsu.union(u, v);
    }
    Partition::from_dsu(&dsu)
}

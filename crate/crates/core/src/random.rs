//! Percolation subgraphs, uniform colorings and the multiple-exposure stack.
//!
//! All logarithms are natural. The stack holds the dense layer `G_p`
//! followed by the sparse layers `G_{s_t}` for `t = T, T-1, ..., 2` with
//! `T = floor(ln^3 n) - 1`; an edge present in several layers takes its
//! color from the earliest one.

use std::io::{BufRead, Write};
use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{numbered_lines, parse_fields, EdgeId, Graph};

pub type Color = u32;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer. A bijection on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` under `master_seed`: `mix64(master ^ mix64(trial + GOLDEN_GAMMA))`.
/// Injective in `trial` for a fixed master seed.
pub fn trial_seed(master_seed: u64, trial: u64) -> u64 {
    mix64(master_seed ^ mix64(trial.wrapping_add(GOLDEN_GAMMA)))
}

/// Stream for `(master_seed, trial, layer)`: keyed by the trial seed, with
/// the layer index as the ChaCha stream id.
pub fn derive_trial_stream(master_seed: u64, trial: u64, layer: u64) -> RandomStream {
    RandomStream::new(trial_seed(master_seed, trial), layer)
}

/// A reproducible random stream: ChaCha8 keyed by `seed` on stream `stream_id`.
#[derive(Clone, Debug)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RandomStream {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn id(&self) -> (u64, u64) {
        (self.seed, self.stream_id)
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}

/// Keeps each edge of `g` independently with probability `q`.
pub fn sample_subgraph(g: &Graph, q: f64, rng: &mut RandomStream) -> Result<Vec<EdgeId>> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::Probability(q));
    }
    if q == 0.0 {
        return Ok(Vec::new());
    }
    if q == 1.0 {
        return Ok((0..g.edge_count()).collect());
    }
    Ok((0..g.edge_count()).filter(|_| rng.gen_bool(q)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerLabel {
    /// The dense layer `G_p`.
    Percolation,
    /// The sparse layer `G_{s_t}`.
    Sparse(usize),
    /// The union `G'` with precedence colors.
    Flattened,
    /// Anything read from a file or built by hand.
    Custom,
}

/// An edge of the host together with its endpoints and color.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ColoredEdge {
    pub id: EdgeId,
    pub u: usize,
    pub v: usize,
    pub color: Color,
}

/// A colored subset of a host graph's edges, kept sorted by edge id.
#[derive(Clone, Debug)]
pub struct ColoredSubgraph {
    host: Arc<Graph>,
    palette: Color,
    edges: Vec<(EdgeId, Color)>,
    label: LayerLabel,
}

impl PartialEq for ColoredSubgraph {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.host, &other.host) || self.host == other.host)
            && self.palette == other.palette
            && self.edges == other.edges
            && self.label == other.label
    }
}

impl ColoredSubgraph {
    pub fn new(
        host: Arc<Graph>,
        palette: Color,
        mut edges: Vec<(EdgeId, Color)>,
        label: LayerLabel,
    ) -> Result<ColoredSubgraph> {
        if palette == 0 {
            return Err(Error::Parameter("palette must be at least 1".into()));
        }
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidGraph(format!("edge {} colored twice", w[0].0)));
            }
        }
        for &(id, c) in &edges {
            if id >= host.edge_count() {
                return Err(Error::InvalidGraph(format!("edge id {id} not in host")));
            }
            if c == 0 || c > palette {
                return Err(Error::InvalidGraph(format!(
                    "color {c} outside 1..={palette}"
                )));
            }
        }
        Ok(ColoredSubgraph {
            host,
            palette,
            edges,
            label,
        })
    }

    pub fn host(&self) -> &Arc<Graph> {
        &self.host
    }

    pub fn n(&self) -> usize {
        self.host.n()
    }

    pub fn palette(&self) -> Color {
        self.palette
    }

    pub fn label(&self) -> LayerLabel {
        self.label
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn edges(&self) -> &[(EdgeId, Color)] {
        &self.edges
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.edges.iter().map(|&(id, _)| id).collect()
    }

    pub fn contains(&self, id: EdgeId) -> bool {
        self.color_of(id).is_some()
    }

    pub fn color_of(&self, id: EdgeId) -> Option<Color> {
        self.edges
            .binary_search_by_key(&id, |&(e, _)| e)
            .ok()
            .map(|i| self.edges[i].1)
    }

    pub fn colored_edges(&self) -> Vec<ColoredEdge> {
        self.edges
            .iter()
            .map(|&(id, color)| {
                let (u, v) = self.host.edge(id);
                ColoredEdge { id, u, v, color }
            })
            .collect()
    }

    /// Edges of color `j` (the set `E_j`).
    pub fn edges_of_color(&self, j: Color) -> Vec<EdgeId> {
        self.edges
            .iter()
            .filter(|&&(_, c)| c == j)
            .map(|&(id, _)| id)
            .collect()
    }

    /// Distinct colors that occur, ascending.
    pub fn present_colors(&self) -> Vec<Color> {
        let mut seen = vec![false; self.palette as usize + 1];
        for &(_, c) in &self.edges {
            seen[c as usize] = true;
        }
        (1..=self.palette).filter(|&c| seen[c as usize]).collect()
    }

    pub fn missing_color_count(&self) -> usize {
        self.palette as usize - self.present_colors().len()
    }

    pub fn has_isolated_vertex(&self) -> bool {
        let mut touched = vec![false; self.n()];
        for &(id, _) in &self.edges {
            let (u, v) = self.host.edge(id);
            touched[u] = true;
            touched[v] = true;
        }
        touched.iter().any(|t| !t)
    }

    pub fn with_label(mut self, label: LayerLabel) -> Self {
        self.label = label;
        self
    }

    /// Header `n m palette`, then `u v color` per edge in edge-id order.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {} {}", self.n(), self.len(), self.palette)?;
        for &(id, c) in &self.edges {
            let (u, v) = self.host.edge(id);
            writeln!(w, "{u} {v} {c}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("write to Vec");
        String::from_utf8(buf).expect("ascii")
    }

    /// Reads the text format. The host becomes the graph on the listed edges.
    pub fn read_text<R: BufRead>(r: R) -> Result<ColoredSubgraph> {
        let mut lines = numbered_lines(r);
        let (line_no, header) = lines
            .next()
            .transpose()?
            .ok_or_else(|| Error::parse(1, "missing header"))?;
        let [n, m, palette] = parse_fields::<3>(&header, line_no)?;
        let mut rows = Vec::with_capacity(m);
        for _ in 0..m {
            let (line_no, line) = lines
                .next()
                .transpose()?
                .ok_or_else(|| Error::parse(line_no + 1, "fewer edges than declared"))?;
            let [u, v, c] = parse_fields::<3>(&line, line_no)?;
            rows.push((u, v, c));
        }
        if let Some((line_no, _)) = lines.next().transpose()? {
            return Err(Error::parse(line_no, "more edges than declared"));
        }
        let host = Arc::new(Graph::from_edges(n, rows.iter().map(|&(u, v, _)| (u, v)))?);
        let palette = Color::try_from(palette)
            .map_err(|_| Error::parse(line_no, "palette too large"))?;
        let edges = rows
            .iter()
            .map(|&(u, v, c)| {
                let id = host.edge_id(u, v).expect("edge was just inserted");
                Color::try_from(c)
                    .map(|c| (id, c))
                    .map_err(|_| Error::parse(line_no, "color too large"))
            })
            .collect::<Result<Vec<_>>>()?;
        ColoredSubgraph::new(host, palette, edges, LayerLabel::Custom)
    }

    pub fn from_text(s: &str) -> Result<ColoredSubgraph> {
        ColoredSubgraph::read_text(s.as_bytes())
    }
}

/// Assigns each edge an independent uniform color in `1..=palette`.
pub fn color_uniform(
    host: Arc<Graph>,
    edges: &[EdgeId],
    palette: Color,
    label: LayerLabel,
    rng: &mut RandomStream,
) -> Result<ColoredSubgraph> {
    if palette == 0 {
        return Err(Error::Parameter("palette must be at least 1".into()));
    }
    let colored = edges
        .iter()
        .map(|&id| (id, rng.gen_range(1..=palette)))
        .collect();
    ColoredSubgraph::new(host, palette, colored, label)
}

/// Model parameters. Without `coeff`, the dense layer uses
/// `p = (2 + epsilon/2) ln n / d`; with it, `p = coeff ln n / d`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub epsilon: f64,
    pub coeff: Option<f64>,
    pub d: usize,
    pub n: usize,
}

impl ModelParams {
    pub fn new(n: usize, d: usize, epsilon: f64) -> Self {
        ModelParams {
            epsilon,
            coeff: None,
            d,
            n,
        }
    }

    pub fn for_host(g: &Graph, epsilon: f64, coeff: Option<f64>) -> Self {
        let d = g.regular_degree().unwrap_or_else(|| g.min_degree());
        ModelParams {
            epsilon,
            coeff,
            d,
            n: g.n(),
        }
    }

    pub fn ln_n(&self) -> f64 {
        (self.n as f64).ln()
    }

    pub fn p_coefficient(&self) -> f64 {
        self.coeff.unwrap_or(2.0 + self.epsilon / 2.0)
    }

    pub fn p(&self) -> f64 {
        self.p_coefficient() * self.ln_n() / self.d as f64
    }

    /// Largest sparse index `floor(ln^3 n) - 1`. Below 2 there are no sparse layers.
    pub fn max_t(&self) -> usize {
        (self.ln_n().powi(3).floor() as usize).saturating_sub(1)
    }

    /// Sparse indices in stack order: `T, T-1, ..., 2`.
    pub fn sparse_indices(&self) -> impl Iterator<Item = usize> {
        (2..=self.max_t()).rev()
    }

    pub fn sparse_layer_count(&self) -> usize {
        self.max_t().saturating_sub(1)
    }

    pub fn s(&self, t: usize) -> f64 {
        self.ln_n().sqrt() / (t as f64 * self.n as f64)
    }

    /// `p + sum_t s_t`, the union bound on an edge's inclusion probability.
    pub fn inclusion_probability_bound(&self) -> f64 {
        self.p() + (2..=self.max_t()).map(|t| self.s(t)).sum::<f64>()
    }

    /// `(2 + epsilon) ln n / d`.
    pub fn target_probability(&self) -> f64 {
        (2.0 + self.epsilon) * self.ln_n() / self.d as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.d == 0 || self.d >= self.n {
            return Err(Error::Parameter(format!(
                "need n >= 2 and 1 <= d < n, got n = {}, d = {}",
                self.n, self.d
            )));
        }
        if self.coeff.is_none() && !(self.epsilon > 0.0) {
            return Err(Error::Parameter(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if let Some(c) = self.coeff {
            if !(c > 0.0) {
                return Err(Error::Parameter(format!("coefficient must be positive, got {c}")));
            }
        }
        let p = self.p();
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Parameter(format!("p = {p} outside (0, 1)")));
        }
        if self.max_t() >= 2 && self.s(2) >= 1.0 {
            return Err(Error::Parameter(format!("s_2 = {} outside (0, 1)", self.s(2))));
        }
        Ok(())
    }
}

/// `n * sum_{t=2}^{T} s_t = sqrt(L) (H_T - 1)` with `L = ln n` and
/// `T = floor(L^3) - 1`. Uses the asymptotic expansion of `H_T` once `T`
/// is too large to sum.
pub fn scaled_sparse_mass(ln_n: f64) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    let t_max = (ln_n.powi(3).floor() - 1.0).max(1.0);
    let harmonic = if t_max < 1e6 {
        (1..=t_max as u64).map(|t| 1.0 / t as f64).sum::<f64>()
    } else {
        t_max.ln() + EULER_GAMMA + 1.0 / (2.0 * t_max) - 1.0 / (12.0 * t_max * t_max)
    };
    ln_n.sqrt() * (harmonic - 1.0)
}

/// Whether `p + sum s_t < (2 + epsilon) ln n / d` at `ln n = ln_n` with
/// `d = n / n_over_d`. Multiplying through by `n` leaves a condition on
/// `ln n` alone, so this works far beyond representable `n`.
pub fn inclusion_bound_holds_at(ln_n: f64, epsilon: f64, n_over_d: f64) -> bool {
    scaled_sparse_mass(ln_n) < 0.5 * epsilon * ln_n * n_over_d
}

/// Smallest `ln n` (to within `1e-6` relative) past which the inclusion
/// bound holds, found by doubling then bisection. The search starts at
/// `ln n = 2`: below about `1.26` there are no sparse layers and the bound
/// holds vacuously.
pub fn inclusion_bound_threshold(epsilon: f64, n_over_d: f64) -> f64 {
    let mut hi = 2.0;
    while !inclusion_bound_holds_at(hi, epsilon, n_over_d) {
        hi *= 2.0;
    }
    let mut lo = hi / 2.0;
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if inclusion_bound_holds_at(mid, epsilon, n_over_d) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// The ordered family of colored layers.
#[derive(Clone, Debug)]
pub struct ExposureStack {
    host: Arc<Graph>,
    params: ModelParams,
    palette: Color,
    layers: Vec<ColoredSubgraph>,
    stream_ids: Vec<u64>,
}

/// Stream id of a layer: 0 for the dense layer, `t` for `G_{s_t}`.
fn layer_stream(label: LayerLabel) -> u64 {
    match label {
        LayerLabel::Sparse(t) => t as u64,
        _ => 0,
    }
}

/// Samples and colors the dense layer and every sparse layer, each from
/// its own stream under `seed`.
pub fn build_exposure_stack(
    host: Arc<Graph>,
    params: &ModelParams,
    palette: Color,
    seed: u64,
) -> Result<ExposureStack> {
    params.validate()?;
    let labels = std::iter::once(LayerLabel::Percolation)
        .chain(params.sparse_indices().map(LayerLabel::Sparse));
    let mut layers = Vec::new();
    let mut stream_ids = Vec::new();
    for label in labels {
        let q = match label {
            LayerLabel::Sparse(t) => params.s(t),
            _ => params.p(),
        };
        let mut rng = RandomStream::new(seed, layer_stream(label));
        let kept = sample_subgraph(&host, q, &mut rng)?;
        layers.push(color_uniform(host.clone(), &kept, palette, label, &mut rng)?);
        stream_ids.push(rng.stream_id());
    }
    Ok(ExposureStack {
        host,
        params: *params,
        palette,
        layers,
        stream_ids,
    })
}

impl ExposureStack {
    /// A stack from explicit layers, mainly for tests and hand-built instances.
    pub fn from_layers(
        host: Arc<Graph>,
        params: ModelParams,
        palette: Color,
        layers: Vec<ColoredSubgraph>,
    ) -> Result<ExposureStack> {
        for layer in &layers {
            if layer.palette() != palette || **layer.host() != *host {
                return Err(Error::Precondition("layer host or palette mismatch".into()));
            }
        }
        let stream_ids = layers.iter().map(|l| layer_stream(l.label())).collect();
        Ok(ExposureStack {
            host,
            params,
            palette,
            layers,
            stream_ids,
        })
    }

    pub fn host(&self) -> &Arc<Graph> {
        &self.host
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn palette(&self) -> Color {
        self.palette
    }

    pub fn layers(&self) -> &[ColoredSubgraph] {
        &self.layers
    }

    pub fn stream_ids(&self) -> &[u64] {
        &self.stream_ids
    }

    pub fn p_layer(&self) -> &ColoredSubgraph {
        &self.layers[0]
    }

    /// Largest sparse index present, or `None` if only the dense layer exists.
    pub fn max_t(&self) -> Option<usize> {
        self.layers.iter().find_map(|l| match l.label() {
            LayerLabel::Sparse(t) => Some(t),
            _ => None,
        })
    }

    pub fn layer_position(&self, t: usize) -> Option<usize> {
        self.layers
            .iter()
            .position(|l| l.label() == LayerLabel::Sparse(t))
    }
}

/// For every host edge, the position of the first layer containing it.
pub fn flatten_sources(layers: &[ColoredSubgraph], edge_count: usize) -> Vec<Option<usize>> {
    let mut source = vec![None; edge_count];
    for (pos, layer) in layers.iter().enumerate() {
        for &(id, _) in layer.edges() {
            source[id].get_or_insert(pos);
        }
    }
    source
}

/// The union `G'`, each edge colored by the earliest layer that contains it.
pub fn flatten(stack: &ExposureStack) -> ColoredSubgraph {
    let m = stack.host.edge_count();
    let mut color: Vec<Color> = vec![0; m];
    for layer in &stack.layers {
        for &(id, c) in layer.edges() {
            if color[id] == 0 {
                color[id] = c;
            }
        }
    }
    let edges = color
        .iter()
        .enumerate()
        .filter(|&(_, &c)| c != 0)
        .map(|(id, &c)| (id, c))
        .collect();
    ColoredSubgraph::new(stack.host.clone(), stack.palette, edges, LayerLabel::Flattened)
        .expect("layers were validated")
}

/// Edges of `G_{s_t}` that lie in no earlier layer, i.e. exactly the edges
/// whose flattened color comes from `G_{s_t}`.
pub fn fresh_layer_view(stack: &ExposureStack, t: usize) -> Result<Vec<ColoredEdge>> {
    let pos = stack.layer_position(t).ok_or_else(|| {
        Error::Parameter(format!(
            "sparse index {t} outside 2..={}",
            stack.max_t().unwrap_or(1)
        ))
    })?;
    let mut forbidden = vec![false; stack.host.edge_count()];
    for layer in &stack.layers[..pos] {
        for &(id, _) in layer.edges() {
            forbidden[id] = true;
        }
    }
    Ok(stack.layers[pos]
        .colored_edges()
        .into_iter()
        .filter(|e| !forbidden[e.id])
        .collect())
}

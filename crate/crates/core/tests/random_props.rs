use std::collections::HashSet;
use std::sync::Arc;

use proptest::prelude::*;
use rainbow_core::random::{
    build_exposure_stack, color_uniform, derive_trial_stream, flatten, flatten_sources,
    fresh_layer_view, sample_subgraph, trial_seed, LayerLabel,
};
use rainbow_core::{Graph, ModelParams, RandomStream};

#[test]
fn percolation_mean_on_k64() {
    let g = Graph::complete(64);
    let trials = 10_000;
    let mut total = 0usize;
    for trial in 0..trials {
        let mut rng = derive_trial_stream(7, trial, 0);
        total += sample_subgraph(&g, 0.5, &mut rng).unwrap().len();
    }
    let mean = total as f64 / trials as f64;
    // 2016 edges at q = 1/2: per-trial variance 504
    let sigma_of_mean = 504f64.sqrt() / (trials as f64).sqrt();
    assert!((mean - 1008.0).abs() < 3.0 * sigma_of_mean, "mean {mean}");
}

#[test]
fn color_frequencies_are_uniform() {
    let host = Arc::new(Graph::complete(448));
    let ids: Vec<usize> = (0..100_000).collect();
    let mut rng = RandomStream::new(11, 0);
    let cg = color_uniform(host, &ids, 7, LayerLabel::Custom, &mut rng).unwrap();
    let mut counts = [0usize; 8];
    for &(_, c) in cg.edges() {
        counts[c as usize] += 1;
    }
    assert_eq!(counts[0], 0);
    let expected = 100_000.0 / 7.0;
    let sigma = (100_000.0 * (1.0 / 7.0) * (6.0 / 7.0f64)).sqrt();
    for &c in &counts[1..] {
        assert!((c as f64 - expected).abs() < 4.0 * sigma, "{counts:?}");
    }
}

#[test]
fn sampling_extremes_and_errors() {
    let g = Graph::complete(10);
    let mut rng = RandomStream::new(0, 0);
    assert!(sample_subgraph(&g, 0.0, &mut rng).unwrap().is_empty());
    assert_eq!(sample_subgraph(&g, 1.0, &mut rng).unwrap().len(), 45);
    assert!(sample_subgraph(&g, 1.5, &mut rng).is_err());
    assert!(sample_subgraph(&g, -0.1, &mut rng).is_err());
    assert!(sample_subgraph(&g, f64::NAN, &mut rng).is_err());
}

#[test]
fn trial_seeds_do_not_collide() {
    let seen: HashSet<u64> = (0..1_000_000u64).map(|i| trial_seed(0xDEAD_BEEF, i)).collect();
    assert_eq!(seen.len(), 1_000_000);
}

#[test]
fn trial_streams_are_reproducible_and_distinct() {
    use rand::RngCore;
    let mut a = derive_trial_stream(5, 0, 0);
    let mut b = derive_trial_stream(5, 0, 0);
    let mut c = derive_trial_stream(5, 0, 1);
    let xa: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
    let xb: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
    let xc: Vec<u64> = (0..8).map(|_| c.next_u64()).collect();
    assert_eq!(xa, xb);
    assert_ne!(xa, xc);
    assert_ne!(derive_trial_stream(5, 0, 0).id(), derive_trial_stream(5, 0, 1).id());
}

#[test]
fn sparse_layer_counts_follow_the_cubed_log() {
    for n in [8usize, 64, 256, 512, 1024] {
        let params = ModelParams::new(n, n - 1, 0.5);
        let cube = (n as f64).ln().powi(3).floor() as usize;
        assert_eq!(params.max_t(), cube - 1, "n = {n}");
        assert_eq!(params.sparse_layer_count(), cube - 2);
        let idx: Vec<usize> = params.sparse_indices().collect();
        assert_eq!(idx.first(), Some(&(cube - 1)));
        assert_eq!(idx.last(), Some(&2));
    }
}

fn small_stack(n: usize, seed: u64) -> rainbow_core::ExposureStack {
    let host = Arc::new(Graph::complete(n));
    let params = ModelParams::new(n, n - 1, 0.5);
    build_exposure_stack(host, &params, (n - 1) as u32, seed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn flatten_takes_the_earliest_layer(n in 12usize..30, seed in any::<u64>()) {
        let stack = small_stack(n, seed);
        let flat = flatten(&stack);
        prop_assert_eq!(flat.label(), LayerLabel::Flattened);
        let m = stack.host().edge_count();
        for id in 0..m {
            let first = stack.layers().iter().find_map(|l| l.color_of(id));
            prop_assert_eq!(flat.color_of(id), first);
        }
        let union: HashSet<usize> = stack.layers().iter().flat_map(|l| l.edge_ids()).collect();
        prop_assert_eq!(flat.len(), union.len());
    }

    #[test]
    fn fresh_view_is_the_layer_share_of_the_flattening(n in 12usize..30, seed in any::<u64>()) {
        let stack = small_stack(n, seed);
        let sources = flatten_sources(stack.layers(), stack.host().edge_count());
        let flat = flatten(&stack);
        for t in stack.params().sparse_indices() {
            let pos = stack.layer_position(t).unwrap();
            let fresh = fresh_layer_view(&stack, t).unwrap();
            let expected: Vec<usize> = (0..sources.len()).filter(|&id| sources[id] == Some(pos)).collect();
            let got: Vec<usize> = fresh.iter().map(|e| e.id).collect();
            prop_assert_eq!(&got, &expected);
            for e in &fresh {
                prop_assert_eq!(flat.color_of(e.id), Some(e.color));
            }
        }
        prop_assert!(fresh_layer_view(&stack, 1).is_err());
        prop_assert!(fresh_layer_view(&stack, stack.params().max_t() + 1).is_err());
    }

    #[test]
    fn stacks_are_deterministic(seed in any::<u64>()) {
        let a = small_stack(16, seed);
        let b = small_stack(16, seed);
        prop_assert_eq!(a.layers(), b.layers());
        prop_assert_eq!(a.stream_ids(), b.stream_ids());
        let ids: HashSet<u64> = a.stream_ids().iter().copied().collect();
        prop_assert_eq!(ids.len(), a.layers().len());
    }

    #[test]
    fn colored_text_round_trip(n in 12usize..25, seed in any::<u64>()) {
        let stack = small_stack(n, seed);
        let flat = flatten(&stack);
        let back = rainbow_core::ColoredSubgraph::from_text(&flat.to_text()).unwrap();
        prop_assert_eq!(back.n(), flat.n());
        prop_assert_eq!(back.palette(), flat.palette());
        let pairs = |cg: &rainbow_core::ColoredSubgraph| {
            let mut v: Vec<(usize, usize, u32)> = cg.colored_edges().iter().map(|e| (e.u, e.v, e.color)).collect();
            v.sort_unstable();
            v
        };
        prop_assert_eq!(pairs(&back), pairs(&flat));
    }
}

#[test]
fn inclusion_bound_needs_astronomical_n() {
    use rainbow_core::random::{inclusion_bound_holds_at, inclusion_bound_threshold};
    // independent bisection with the asymptotic harmonic sum
    let ln_n0 = inclusion_bound_threshold(0.5, 1.0);
    assert!((ln_n0 / 12_416.753 - 1.0).abs() < 1e-4, "{ln_n0}");
    assert!(!inclusion_bound_holds_at(ln_n0 * 0.99, 0.5, 1.0));
    assert!(inclusion_bound_holds_at(ln_n0 * 1.01, 0.5, 1.0));
    // at desk scale the union of layers is denser than (2 + eps) ln n / d
    let params = ModelParams::new(256, 255, 0.5);
    assert!((params.target_probability() - 0.054_37).abs() < 1e-4);
    assert!((params.inclusion_probability_bound() - 0.0922).abs() < 1e-3);
}

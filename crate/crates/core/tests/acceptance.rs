//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

mod common;

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use rainbow_core::engine::{
    has_rainbow_spanning_tree, replacement_color_set, schrijver_suzuki_decide, EdgePool,
    RainbowForest, SearchOutcome,
};
use rainbow_core::experiments::{
    run_experiment, run_lemma_experiment, run_pipeline_experiment, run_threshold_experiment,
    ExperimentConfig,
};
use rainbow_core::lemmas::{check_straddle, LemmaId};
use rainbow_core::random::{ColoredEdge, LayerLabel};
use rainbow_core::{
    build_host, edge_connectivity, ColoredSubgraph, Graph, HostSpec, Partition, RandomStream,
};

use common::*;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

/// Three deciders on small random instances.
fn oracle_triangle() -> Verdict {
    let start = Instant::now();
    let mut rng = RandomStream::new(0xC1, 0);
    let mut agree = 0;
    let mut positives = 0;
    let total = 500;
    for _ in 0..total {
        let n = rng.gen_range(2..=8);
        let palette = rng.gen_range(1..=7);
        let density = rng.gen_range(0.3..=1.0);
        let host = random_graph(n, density, &mut rng);
        let cg = random_coloring(host, palette, &mut rng);
        let enumerated = rainbow_spanning_tree_exists(&cg);
        let schrijver = schrijver_suzuki_decide(&cg).expect("at most 7 colors");
        let exact = has_rainbow_spanning_tree(&cg);
        positives += usize::from(enumerated);
        agree += usize::from(enumerated == schrijver && schrijver == exact);
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        agree == total && secs < 60.0,
        format!("{agree}/{total} agree ({positives} positive), {secs:.2}s (limit 60s)"),
    )
}

/// Every returned witness re-verified from scratch.
fn exchange_soundness() -> Verdict {
    let mut rng = RandomStream::new(0xC2, 0);
    let total = 200;
    let mut sound = 0;
    let mut witnesses = 0;
    let mut augmented = 0;
    for _ in 0..total {
        let n = rng.gen_range(3..=10);
        let host = random_graph(n, rng.gen_range(0.4..=0.9), &mut rng);
        let cg = random_coloring(host, (n - 1) as u32, &mut rng);
        let mut f_edges = random_rainbow_forest(&cg, 0.7, &mut rng);
        if f_edges.len() == n - 1 {
            // a spanning rainbow tree uses every color; free one
            f_edges.pop();
        }
        let f = RainbowForest::from_edges(n, cg.palette(), f_edges.iter().copied()).unwrap();
        let missing = f.missing_colors();
        let sigma = missing[rng.gen_range(0..missing.len())];
        let pool = EdgePool::from_subgraph(&cg);
        let labels = component_labels(n, &f_edges);
        let ok = match replacement_color_set(&f, sigma, &pool).unwrap().outcome {
            SearchOutcome::Augmented { forest, .. } => {
                augmented += 1;
                let e: Vec<ColoredEdge> = forest.edges().copied().collect();
                e.len() == f_edges.len() + 1
                    && is_forest(n, &e)
                    && is_rainbow(&e)
                    && e.iter().all(|x| cg.color_of(x.id) == Some(x.color))
            }
            SearchOutcome::ColorSet(j) => j.colors().iter().all(|&c| {
                witnesses += 1;
                let w: Vec<ColoredEdge> = j.witness(c).unwrap().edges().copied().collect();
                let mut expected: Vec<u32> = f_edges
                    .iter()
                    .map(|e| e.color)
                    .chain([sigma])
                    .filter(|&x| x != c)
                    .collect();
                expected.sort_unstable();
                let mut got: Vec<u32> = w.iter().map(|e| e.color).collect();
                got.sort_unstable();
                is_forest(n, &w)
                    && is_rainbow(&w)
                    && w.iter().all(|x| cg.color_of(x.id) == Some(x.color))
                    && component_labels(n, &w) == labels
                    && got == expected
            }),
        };
        sound += usize::from(ok);
    }
    verdict(
        sound == total,
        format!("{sound}/{total} sound ({witnesses} witnesses, {augmented} augmentations)"),
    )
}

/// BFS-reachable J against brute-force-definable J on every colored K4.
fn reachable_j_on_k4() -> Verdict {
    let host = Arc::new(Graph::complete(4));
    let m = host.edge_count();
    let (mut cases, mut unsound, mut differ, mut augmented) = (0usize, 0usize, 0usize, 0usize);
    for palette in 1..=3u32 {
        let colorings = (palette as usize).pow(m as u32);
        for code in 0..colorings {
            let mut x = code;
            let colors: Vec<u32> = (0..m)
                .map(|_| {
                    let c = (x % palette as usize) as u32 + 1;
                    x /= palette as usize;
                    c
                })
                .collect();
            let cg = ColoredSubgraph::new(
                host.clone(),
                palette,
                colors.iter().enumerate().map(|(id, &c)| (id, c)).collect(),
                LayerLabel::Custom,
            )
            .unwrap();
            let all = cg.colored_edges();
            let pool = EdgePool::from_subgraph(&cg);
            for mask in 0u32..(1 << m) {
                let f_edges: Vec<ColoredEdge> =
                    all.iter().filter(|e| mask >> e.id & 1 == 1).copied().collect();
                if !is_forest(4, &f_edges) || !is_rainbow(&f_edges) {
                    continue;
                }
                let f = RainbowForest::from_edges(4, palette, f_edges.iter().copied()).unwrap();
                for sigma in f.missing_colors() {
                    let SearchOutcome::ColorSet(j) =
                        replacement_color_set(&f, sigma, &pool).unwrap().outcome
                    else {
                        augmented += 1;
                        continue;
                    };
                    cases += 1;
                    let bfs = j.colors();
                    let definable = definable_j(4, &all, &f_edges, sigma);
                    if bfs.iter().any(|c| !definable.contains(c)) {
                        unsound += 1;
                    }
                    if bfs != definable {
                        differ += 1;
                        eprintln!(
                            "  J discrepancy: colors {colors:?}, F* {:?}, sigma {sigma}: bfs {bfs:?}, definable {definable:?}",
                            f.edge_ids()
                        );
                    }
                }
            }
        }
    }
    verdict(
        unsound == 0,
        format!(
            "{cases} (coloring, F*, sigma) cases with a color set ({augmented} augmented instead); \
BFS-J not within definable-J: {unsound}; discrepancy rate {differ}/{cases} = {:.4}",
            differ as f64 / cases.max(1) as f64
        ),
    )
}

fn threshold_behaviour() -> Verdict {
    let start = Instant::now();
    let cfg = ExperimentConfig::parse(
        "mode=exact_threshold\nhost=complete\nn=256\nc=1.0\nc=3.0\ntrials=200\nseed=20240401\n",
    )
    .unwrap();
    let report = run_threshold_experiment(&cfg, 0).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let (low, high) = (&report.cells[0], &report.cells[1]);
    let gap = high.success_frac - low.success_frac;
    verdict(
        gap >= 0.5 && low.missing_color_frac > 0.5 && secs < 600.0,
        format!(
            "success c=1: {:.3}, c=3: {:.3} (gap {gap:.3} >= 0.5); missing-color fraction at c=1: {:.3} (> 0.5); {secs:.1}s (limit 600s)",
            low.success_frac, high.success_frac, low.missing_color_frac
        ),
    )
}

fn initial_forest_quality() -> Verdict {
    let cfg = ExperimentConfig::parse(
        "mode=pipeline\nhost=complete\nn=512\nepsilon=0.5\ntrials=100\nseed=20240402\n",
    )
    .unwrap();
    let report = run_pipeline_experiment(&cfg, 0).unwrap();
    let n = 512f64;
    let target = n - n.ln().powi(3);
    let good = report
        .records
        .iter()
        .filter(|r| r.initial_forest_size as f64 >= target)
        .count();
    let min = report.records.iter().map(|r| r.initial_forest_size).min().unwrap();
    let frac = good as f64 / report.records.len() as f64;
    verdict(
        frac >= 0.9,
        format!("{good}/100 trials reach n - ln^3 n = {target:.1} (fraction {frac:.2} >= 0.9); smallest initial forest {min}"),
    )
}

fn pipeline_vs_oracle() -> Verdict {
    let cfg = ExperimentConfig::parse(
        "mode=pipeline\nhost=circulant\ndegree=0.5n\nn=256\nepsilon=0.5\ntrials=100\nseed=20240403\n",
    )
    .unwrap();
    let report = run_pipeline_experiment(&cfg, 0).unwrap();
    let rs = &report.records;
    let exact = rs.iter().filter(|r| r.exact_rst).count();
    let pipeline = rs.iter().filter(|r| r.pipeline_rst).count();
    let implication = rs.iter().all(|r| !r.pipeline_rst || r.exact_rst);
    let stuck: Vec<_> = rs.iter().filter(|r| !r.pipeline_rst).collect();
    let stuck_missing = stuck.iter().filter(|r| r.missing_color).count();
    let stuck_j1 = stuck.iter().filter(|r| r.max_j_seen <= 1).count();
    let gap = (exact as f64 - pipeline as f64).abs() / rs.len() as f64;
    verdict(
        gap <= 0.10 && implication,
        format!(
            "exact {exact}/100, pipeline {pipeline}/100 (gap {:.0} points, limit 10); pipeline => exact on every trial: {implication}; \
of {} stuck runs, {stuck_missing} had a color absent from G_p and {stuck_j1} never saw |J| > 1",
            gap * 100.0,
            stuck.len()
        ),
    )
}

fn determinism() -> Verdict {
    let configs = [
        "mode=exact_threshold\nhost=complete\nn=48\nn=64\nc=1\nc=2\nc=3\ntrials=20\nseed=7\n",
        "mode=pipeline\nhost=circulant\ndegree=0.5n\nn=64\nepsilon=0.5\ntrials=10\nseed=7\n",
        "mode=pipeline\nhost=random-regular\ndegree=16\nn=48\nepsilon=1\ntrials=10\nseed=7\n",
        "mode=lemma\nhost=complete\nn=40\nepsilon=0.5\ntrials=10\nseed=7\n",
    ];
    let mut identical = 0;
    for text in configs {
        let cfg = ExperimentConfig::parse(text).unwrap();
        let runs: Vec<String> = [1, 1, 4, 2]
            .iter()
            .map(|&t| run_experiment(&cfg, t).unwrap().csv())
            .collect();
        identical += usize::from(runs.iter().all(|r| r == &runs[0]));
    }
    verdict(
        identical == configs.len(),
        format!("{identical}/{} configs byte-identical over runs with 1, 1, 4 and 2 threads", configs.len()),
    )
}

fn lemma_checkers() -> Verdict {
    // straddle with nothing excluded, every partition of every host checked
    let mut hosts: Vec<Graph> = Vec::new();
    for n in 2..=5usize {
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        for mask in 0u32..(1 << pairs.len()) {
            let g = Graph::from_edges(
                n,
                pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p),
            )
            .unwrap();
            hosts.push(g);
        }
    }
    let mut rng = RandomStream::new(0xC8, 0);
    for n in 6..=10usize {
        hosts.push(Graph::complete(n));
        for mask in 1u32..(1 << (n / 2)) {
            let offsets = (1..=n / 2).filter(|o| mask >> (o - 1) & 1 == 1).collect();
            hosts.push(build_host(&HostSpec::Circulant { n, offsets }, &mut rng).unwrap());
        }
        for d in 3..n {
            if n * d % 2 == 0 {
                hosts.push(build_host(&HostSpec::RandomRegular { n, d }, &mut rng).unwrap());
            }
        }
    }
    let mut partitions_by_n: Vec<Vec<Partition>> = vec![Vec::new(); 11];
    for (n, slot) in partitions_by_n.iter_mut().enumerate().skip(2) {
        *slot = set_partitions(n)
            .iter()
            .map(|ids| Partition::from_block_ids(ids))
            .filter(|p| p.block_count() >= 2)
            .collect();
    }
    let (mut checked_hosts, mut instances, mut violations) = (0usize, 0usize, 0usize);
    for g in &hosts {
        let lambda = edge_connectivity(g);
        if lambda == 0 {
            continue;
        }
        checked_hosts += 1;
        for p in &partitions_by_n[g.n()] {
            let r = check_straddle(g, lambda, &[], p).unwrap();
            instances += 1;
            violations += r.violations;
        }
    }

    let cfg = ExperimentConfig::parse(
        "mode=lemma\nhost=complete\nn=256\nepsilon=0.5\ntrials=1000\nseed=20240408\nlemma=cuts\nlemma=colorhit\nomega=3\ncut_samples=100\n",
    )
    .unwrap();
    let report = run_lemma_experiment(&cfg, 0).unwrap();
    let cuts = report.get(LemmaId::CutSparsity).unwrap();
    let hit = report.get(LemmaId::ColorHit).unwrap();
    verdict(
        violations == 0 && cuts.violation_rate() < 0.05 && hit.violation_rate() < 0.05,
        format!(
            "straddle: {violations} violations over {instances} partitions of {checked_hosts} connected hosts (n <= 10); \
n=256, 1000 trials: cut sparsity {:.3}, color hit {:.3} (each < 0.05; worst margins {:.1} / {:.3})",
            cuts.violation_rate(),
            hit.violation_rate(),
            cuts.worst_margin,
            hit.worst_margin
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 8] = [
        ("oracle triangle", oracle_triangle),
        ("exchange soundness", exchange_soundness),
        ("reachable J on K4", reachable_j_on_k4),
        ("threshold behaviour", threshold_behaviour),
        ("initial forest quality", initial_forest_quality),
        ("pipeline vs oracle", pipeline_vs_oracle),
        ("determinism", determinism),
        ("lemma checkers", lemma_checkers),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        failed += usize::from(!v.pass);
        println!(
            "criterion {} [{name}]: {} - {} ({:.1}s)",
            i + 1,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

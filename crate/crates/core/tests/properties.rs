mod oracle;

use std::collections::BTreeMap;

use divmap_core::{
    cosine_distance_matrix, distance_matrix, layout_fr, overlay, stirling, stirling_map,
    unweighted_path_matrix, weighted_path_matrix, Basemap, DistanceMatrix, Fill, Metric,
    OverlayPolicy, ResearchProfile,
};
use oracle::{
    bfs_hops, enumerate_lightest_paths, naive_stirling, random_distances, random_graph,
    random_shares, seeded, DenseGraph,
};
use proptest::prelude::*;
use rand::Rng;

fn matrix(d: &[Vec<f64>], metric: Metric) -> DistanceMatrix {
    let n = d.len();
    let names = (0..n).map(DenseGraph::name).collect();
    DistanceMatrix::from_values(metric, names, d.iter().flatten().copied().collect()).unwrap()
}

fn share_map(shares: &[f64]) -> BTreeMap<String, f64> {
    shares
        .iter()
        .enumerate()
        .map(|(i, &p)| (DenseGraph::name(i), p))
        .collect()
}

/// Random profile over the nodes of `bm` with integer counts.
fn random_profile(seed: u64, bm: &Basemap, max_active: usize) -> ResearchProfile {
    let mut rng = seeded(seed);
    let k = rng.random_range(1..=max_active.min(bm.node_count()));
    let counts: Vec<(String, f64)> = (0..k)
        .map(|_| {
            let i = rng.random_range(0..bm.node_count());
            (bm.name(i).to_string(), rng.random_range(1..20) as f64)
        })
        .collect();
    ResearchProfile::from_counts("O", counts).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn paths_match_enumeration(seed in any::<u64>()) {
        let g = random_graph(&mut seeded(seed), 10);
        let bm = g.basemap();
        let wpath = weighted_path_matrix(&bm, Fill::Diameter).unwrap();
        let path = unweighted_path_matrix(&bm, Fill::Diameter).unwrap();
        let lightest = enumerate_lightest_paths(&g);
        let hops = bfs_hops(&g);
        for i in 0..g.len() {
            for j in 0..g.len() {
                prop_assert_eq!(wpath.is_reachable(i, j), lightest[i][j].is_some());
                if let Some(expect) = lightest[i][j] {
                    prop_assert!((wpath.get(i, j) - expect).abs() <= 1e-12);
                }
                prop_assert_eq!(path.is_reachable(i, j), hops[i][j].is_some());
                if let Some(h) = hops[i][j] {
                    prop_assert_eq!(path.get(i, j), h as f64);
                }
            }
        }
    }

    #[test]
    fn path_variants_are_metrics(seed in any::<u64>(), fill in prop_oneof![Just(None), (0.0f64..5.0).prop_map(Some)]) {
        let g = random_graph(&mut seeded(seed), 12);
        let bm = g.basemap();
        let fill = fill.map_or(Fill::Diameter, Fill::Value);
        for dm in [weighted_path_matrix(&bm, fill).unwrap(), unweighted_path_matrix(&bm, fill).unwrap()] {
            let n = dm.len();
            for i in 0..n {
                prop_assert_eq!(dm.get(i, i), 0.0);
                for j in 0..n {
                    prop_assert_eq!(dm.get(i, j), dm.get(j, i));
                    // an explicit fill below the diameter may break the inequality
                    // through unreachable pairs, so only reachable triples are checked then
                    for k in 0..n {
                        let all_reachable = dm.is_reachable(i, k) && dm.is_reachable(k, j);
                        if fill == Fill::Diameter || all_reachable {
                            prop_assert!(dm.get(i, j) <= dm.get(i, k) + dm.get(k, j) + 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn weighted_path_dominated_by_hops(seed in any::<u64>()) {
        let g = random_graph(&mut seeded(seed), 12);
        let bm = g.basemap();
        let max_w = bm.edges().iter().map(|e| e.distance()).fold(0.0, f64::max);
        let wpath = weighted_path_matrix(&bm, Fill::Diameter).unwrap();
        let path = unweighted_path_matrix(&bm, Fill::Diameter).unwrap();
        for i in 0..bm.node_count() {
            for j in 0..bm.node_count() {
                if wpath.is_reachable(i, j) {
                    prop_assert!(wpath.get(i, j) <= path.get(i, j) * max_w + 1e-12);
                }
            }
        }
    }

    #[test]
    fn removing_an_edge_never_shortens(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let g = random_graph(&mut seeded(seed), 12);
        let bm = g.basemap();
        prop_assume!(bm.edge_count() > 0);
        let e = bm.edges()[pick.index(bm.edge_count())];
        let cut = bm.without_edge(e.a, e.b);
        prop_assert_eq!(cut.edge_count() + 1, bm.edge_count());
        for metric in [Metric::Path, Metric::WeightedPath] {
            let before = distance_matrix(&bm, metric, Fill::Diameter).unwrap();
            let after = distance_matrix(&cut, metric, Fill::Diameter).unwrap();
            for i in 0..bm.node_count() {
                for j in 0..bm.node_count() {
                    if after.is_reachable(i, j) {
                        prop_assert!(before.is_reachable(i, j));
                        prop_assert!(after.get(i, j) >= before.get(i, j) - 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn cosine_non_adjacent_is_one(seed in any::<u64>()) {
        let g = random_graph(&mut seeded(seed), 12);
        let dm = cosine_distance_matrix(&g.basemap());
        for i in 0..g.len() {
            for j in 0..g.len() {
                match g.similarity[i][j] {
                    None if i != j => prop_assert_eq!(dm.get(i, j), 1.0),
                    Some(s) => prop_assert_eq!(dm.get(i, j), 1.0 - s),
                    None => prop_assert_eq!(dm.get(i, j), 0.0),
                }
            }
        }
    }

    #[test]
    fn stirling_matches_double_loop(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let n = rng.random_range(1..=50);
        let d = random_distances(&mut rng, n, 3.0);
        let p = random_shares(&mut rng, n);
        let got = stirling(&share_map(&p), &matrix(&d, Metric::WeightedPath)).unwrap();
        prop_assert!((got - naive_stirling(&p, &d)).abs() <= 1e-12);
    }

    #[test]
    fn cosine_score_bounded_by_simpson(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let n = rng.random_range(1..=40);
        let d = random_distances(&mut rng, n, 1.0);
        let p = random_shares(&mut rng, n);
        let score = stirling(&share_map(&p), &matrix(&d, Metric::Cosine)).unwrap();
        let simpson: f64 = p.iter().map(|x| x * x).sum();
        prop_assert!(score >= 0.0);
        prop_assert!(score <= 1.0 - simpson + 1e-12);
    }

    #[test]
    fn merging_coincident_categories_keeps_score(seed in any::<u64>(), split in 0.0f64..1.0) {
        let mut rng = seeded(seed);
        let n = rng.random_range(1..=20);
        let d = random_distances(&mut rng, n, 2.0);
        let p = random_shares(&mut rng, n);
        // duplicate category 0 as category n at distance 0 from it
        let mut dd = d.clone();
        for (i, row) in dd.iter_mut().enumerate() {
            row.push(d[i][0]);
        }
        let mut last = d[0].clone();
        last.push(0.0);
        dd.push(last);
        let mut pp = p.clone();
        pp.push(p[0] * (1.0 - split));
        pp[0] = p[0] * split;
        let merged = stirling(&share_map(&p), &matrix(&d, Metric::Path)).unwrap();
        let separate = stirling(&share_map(&pp), &matrix(&dd, Metric::Path)).unwrap();
        prop_assert!((merged - separate).abs() <= 1e-12);
    }

    #[test]
    fn scaled_counts_score_identically(seed in any::<u64>(), k in 1u32..1000) {
        let g = random_graph(&mut seeded(seed), 12);
        let bm = g.basemap();
        let profile = random_profile(seed ^ 0x9e37, &bm, 8);
        let scaled = ResearchProfile::from_counts(
            "O",
            profile.counts().iter().map(|(c, &v)| (c.clone(), v * k as f64)),
        )
        .unwrap();
        prop_assert_eq!(profile.shares(), scaled.shares());
        for metric in Metric::ALL {
            let dm = distance_matrix(&bm, metric, Fill::Diameter).unwrap();
            let a = stirling(profile.shares(), &dm).unwrap();
            let b = stirling(scaled.shares(), &dm).unwrap();
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn single_category_scores_zero_everywhere(seed in any::<u64>()) {
        let g = random_graph(&mut seeded(seed), 12);
        let bm = g.basemap();
        let i = (seed % bm.node_count() as u64) as usize;
        let p = ResearchProfile::from_counts("O", [(bm.name(i), 7.0)]).unwrap();
        let cm = overlay(&p, &bm, OverlayPolicy::Error).unwrap();
        for metric in Metric::ALL {
            let dm = distance_matrix(&bm, metric, Fill::Diameter).unwrap();
            prop_assert_eq!(stirling_map(&cm, &dm).unwrap(), 0.0);
        }
    }

    #[test]
    fn raising_threshold_never_lowers_connected_wpath_score(seed in any::<u64>(), t in 0.0f64..1.0) {
        let g = random_graph(&mut seeded(seed), 12);
        let low = g.basemap();
        let high = low.with_threshold(t).unwrap();
        let profile = random_profile(seed.rotate_left(7), &low, 5);
        let idx: Vec<usize> = profile.shares().keys().map(|c| low.index_of(c).unwrap()).collect();
        let (cl, ch) = (low.components(), high.components());
        let together = |labels: &[usize]| idx.iter().all(|&i| labels[i] == labels[idx[0]]);
        prop_assume!(together(&cl) && together(&ch));
        let a = stirling(profile.shares(), &weighted_path_matrix(&low, Fill::Diameter).unwrap()).unwrap();
        let b = stirling(profile.shares(), &weighted_path_matrix(&high, Fill::Diameter).unwrap()).unwrap();
        prop_assert!(b >= a - 1e-12);
    }

    #[test]
    fn layout_is_seed_deterministic(seed in any::<u64>(), layout_seed in any::<u64>()) {
        let bm = random_graph(&mut seeded(seed), 12).basemap();
        let a = layout_fr(&bm, layout_seed, 30).unwrap();
        let b = layout_fr(&bm, layout_seed, 30).unwrap();
        for (p, q) in a.positions().iter().zip(b.positions()) {
            prop_assert!((p.0 - q.0).abs() <= 1e-9 && (p.1 - q.1).abs() <= 1e-9);
        }
        prop_assert_eq!(a, b);
    }
}

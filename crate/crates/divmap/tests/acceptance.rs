//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits with
//! a non-zero status if any criterion fails.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use divmap::cli::{run, Cli, Console};
use divmap::formats::load_scores;
use divmap::{load_basemap, GraphFormat};
use divmap_core::{
    cosine_distance_matrix, distance_matrix, gen_basemap_path, gen_profile, layout_fr, overlay,
    stirling, stirling_map, unweighted_path_matrix, weighted_path_matrix, Basemap, DistanceMatrix,
    Fill, Metric, OverlayPolicy, ResearchProfile, SynthSpec,
};
use oracle::{
    bfs_hops, enumerate_lightest_paths, naive_stirling, random_distances, random_graph,
    random_shares, seeded, DenseGraph,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestError, TestRng, TestRunner};
use rand::Rng;

const SPEARMAN_TARGET: f64 = 0.92;
const SPEARMAN_TOL: f64 = 0.02;
const PATH_TOL: f64 = 1e-12;
const STIRLING_TOL: f64 = 1e-12;
const SMALL_FIXTURE_TOL: f64 = 1e-12;
const SYNTH_TOL: f64 = 1e-9;
const LAYOUT_TOL: f64 = 1e-9;
const SEEDED_INSTANCES: u64 = 100;
const PROPERTY_CASES: u32 = 100;
const MAX_GRAPH_NODES: usize = 12;
const MAX_SCS: usize = 50;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

macro_rules! check {
    ($cond:expr, $($msg:tt)*) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($msg)*));
        }
    };
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let took = start.elapsed();
    if took > limit {
        return Err(format!("took {took:.2?}, limit {limit:?}"));
    }
    Ok(took)
}

fn org_score_ranks() -> Outcome {
    let start = Instant::now();
    let rt = load_scores(&fixture("org_scores.csv")).map_err(|e| e.to_string())?;
    check!(
        rt.orgs().len() == 27,
        "expected 27 organizations, got {}",
        rt.orgs().len()
    );
    let rank = |org: &str, m: Metric| rt.rank(org, m).unwrap_or(f64::NAN);
    let expected = [
        ("CORV", Metric::Cosine, 27.0),
        ("CORV", Metric::WeightedPath, 27.0),
        ("PSYNEU", Metric::Cosine, 1.0),
        ("PSYNEU", Metric::WeightedPath, 1.0),
        ("CEU", Metric::WeightedPath, 26.0),
    ];
    for (org, m, want) in expected {
        let got = rank(org, m);
        check!(got == want, "{org} ranks {got} under {m}, expected {want}");
    }
    let took = within(Duration::from_secs(1), start)?;
    Ok(format!(
        "CORV 27/27, PSYNEU 1/1, CEU 26 (wpath) in {took:.2?}"
    ))
}

fn org_score_spearman() -> Outcome {
    let rt = load_scores(&fixture("org_scores.csv")).map_err(|e| e.to_string())?;
    let r = rt
        .spearman(Metric::Cosine, Metric::WeightedPath)
        .map_err(|e| e.to_string())?;
    check!(
        (r - SPEARMAN_TARGET).abs() <= SPEARMAN_TOL,
        "spearman {r} outside {SPEARMAN_TARGET} ± {SPEARMAN_TOL}"
    );

    // the same number through the command line in pass-through mode
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let scores = fixture("org_scores.csv");
    let cli = <Cli as clap::Parser>::try_parse_from([
        "divmap",
        "analyze",
        "--scores",
        scores.to_str().unwrap_or_default(),
        "--out-dir",
        dir.path().to_str().unwrap_or_default(),
    ])
    .map_err(|e| e.to_string())?;
    let (mut out, mut err) = (Vec::new(), Vec::new());
    run(
        &cli,
        &mut Console {
            out: &mut out,
            err: &mut err,
        },
    )
    .map_err(|e| e.to_string())?;
    let printed = String::from_utf8_lossy(&out);
    let line = printed
        .lines()
        .find(|l| l.starts_with("spearman sim wpath:"))
        .ok_or_else(|| format!("no spearman line in output:\n{printed}"))?;
    let value: f64 = line
        .rsplit(' ')
        .next()
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| format!("unparsable line `{line}`"))?;
    check!(
        (value - SPEARMAN_TARGET).abs() <= SPEARMAN_TOL,
        "printed spearman {value} outside tolerance"
    );
    Ok(format!("rho = {r:.4} (CLI printed `{line}`)"))
}

fn path_oracles() -> Outcome {
    let start = Instant::now();
    let mut checked_pairs = 0usize;
    for seed in 0..SEEDED_INSTANCES {
        let g = random_graph(&mut seeded(seed), MAX_GRAPH_NODES);
        let bm = g.basemap();
        let wpath = weighted_path_matrix(&bm, Fill::Diameter).map_err(|e| e.to_string())?;
        let path = unweighted_path_matrix(&bm, Fill::Diameter).map_err(|e| e.to_string())?;
        let lightest = enumerate_lightest_paths(&g);
        let hops = bfs_hops(&g);
        for i in 0..g.len() {
            for j in 0..g.len() {
                check!(
                    wpath.is_reachable(i, j) == lightest[i][j].is_some(),
                    "seed {seed}: reachability of ({i},{j}) differs"
                );
                if let Some(want) = lightest[i][j] {
                    let got = wpath.get(i, j);
                    check!(
                        (got - want).abs() <= PATH_TOL,
                        "seed {seed}: wpath({i},{j}) = {got}, oracle {want}"
                    );
                }
                check!(
                    path.is_reachable(i, j) == hops[i][j].is_some(),
                    "seed {seed}: hop reachability of ({i},{j}) differs"
                );
                if let Some(h) = hops[i][j] {
                    check!(
                        path.get(i, j) == h as f64,
                        "seed {seed}: path({i},{j}) = {}, BFS {h}",
                        path.get(i, j)
                    );
                }
                checked_pairs += 1;
            }
        }
    }
    let took = within(Duration::from_secs(10), start)?;
    Ok(format!(
        "{SEEDED_INSTANCES} graphs, {checked_pairs} ordered pairs in {took:.2?}"
    ))
}

fn share_map(shares: &[f64]) -> BTreeMap<String, f64> {
    shares
        .iter()
        .enumerate()
        .map(|(i, &p)| (DenseGraph::name(i), p))
        .collect()
}

fn dense_matrix(d: &[Vec<f64>], metric: Metric) -> Result<DistanceMatrix, String> {
    let names = (0..d.len()).map(DenseGraph::name).collect();
    DistanceMatrix::from_values(metric, names, d.iter().flatten().copied().collect())
        .map_err(|e| e.to_string())
}

fn stirling_oracle() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut largest = 0;
    for seed in 0..SEEDED_INSTANCES {
        let mut rng = seeded(1_000_000 + seed);
        // cover the upper bound explicitly
        let n = if seed == 0 {
            MAX_SCS
        } else {
            rng.random_range(1..=MAX_SCS)
        };
        largest = largest.max(n);
        let d = random_distances(&mut rng, n, 5.0);
        let p = random_shares(&mut rng, n);
        let got = stirling(&share_map(&p), &dense_matrix(&d, Metric::WeightedPath)?)
            .map_err(|e| e.to_string())?;
        let want = naive_stirling(&p, &d);
        worst = worst.max((got - want).abs());
        check!(
            (got - want).abs() <= STIRLING_TOL,
            "seed {seed}: stirling {got}, oracle {want}"
        );
    }
    let took = within(Duration::from_secs(1), start)?;
    Ok(format!(
        "{SEEDED_INSTANCES} instances up to {largest} SCs, max error {worst:.1e} in {took:.2?}"
    ))
}

fn at(dm: &DistanceMatrix, a: &str, b: &str) -> Result<f64, String> {
    match (dm.index_of(a), dm.index_of(b)) {
        (Some(i), Some(j)) => Ok(dm.get(i, j)),
        _ => Err(format!("{a} or {b} missing")),
    }
}

fn small_basemap_fixtures() -> Outcome {
    let hub = load_basemap(&fixture("hub_basemap.csv"), GraphFormat::Csv, None)
        .map_err(|e| e.to_string())?;
    check!(hub.edge_count() == 2, "hub fixture should have two edges");
    let i = hub.index_of("I").ok_or("no I")?;
    let j = hub.index_of("J").ok_or("no J")?;
    check!(
        hub.similarity(i, j).is_none(),
        "I and J must not be adjacent"
    );
    let g = unweighted_path_matrix(&hub, Fill::Diameter).map_err(|e| e.to_string())?;
    let gw = weighted_path_matrix(&hub, Fill::Diameter).map_err(|e| e.to_string())?;
    let (g_ij, gw_ij) = (at(&g, "I", "J")?, at(&gw, "I", "J")?);
    check!(g_ij == 2.0, "g(I,J) = {g_ij}, expected 2");
    check!(
        (gw_ij - 0.7).abs() <= SMALL_FIXTURE_TOL,
        "g^W(I,J) = {gw_ij}, expected 0.7"
    );

    let tri = load_basemap(
        &fixture("triangle_basemap.csv"),
        GraphFormat::Csv,
        Some(0.15),
    )
    .map_err(|e| e.to_string())?;
    let (ti, tj) = (
        tri.index_of("I").ok_or("no I")?,
        tri.index_of("J").ok_or("no J")?,
    );
    check!(
        tri.similarity(ti, tj).is_none(),
        "I and J must be below threshold"
    );
    let tw = at(
        &weighted_path_matrix(&tri, Fill::Diameter).map_err(|e| e.to_string())?,
        "I",
        "J",
    )?;
    let tc = at(&cosine_distance_matrix(&tri), "I", "J")?;
    check!(
        (tw - 0.2).abs() <= SMALL_FIXTURE_TOL,
        "triangle g^W(I,J) = {tw}, expected 0.2"
    );
    check!(tc == 1.0, "triangle cosine distance {tc}, expected 1");
    check!(tw < tc, "g^W should undercut the cosine distance");
    Ok(format!(
        "g = {g_ij}, g^W = {gw_ij:.12}; triangle g^W = {tw:.12} < cosine {tc}"
    ))
}

fn polarization() -> Outcome {
    let bm = gen_basemap_path(5, 0.15).map_err(|e| e.to_string())?;
    let polar =
        gen_profile(&SynthSpec::polarized(2, 0), &bm, "polarized").map_err(|e| e.to_string())?;
    let spread = gen_profile(&SynthSpec::spread(3, 0), &bm, "spread").map_err(|e| e.to_string())?;
    let score = |p: &ResearchProfile, m: Metric| -> Result<f64, String> {
        let dm = distance_matrix(&bm, m, Fill::Diameter).map_err(|e| e.to_string())?;
        stirling(p.shares(), &dm).map_err(|e| e.to_string())
    };
    let (wp, ws) = (
        score(&polar, Metric::WeightedPath)?,
        score(&spread, Metric::WeightedPath)?,
    );
    let (sp, ss) = (
        score(&polar, Metric::Cosine)?,
        score(&spread, Metric::Cosine)?,
    );

    // hand-derived values: poles at path distance 4·0.15, cosine distance 1;
    // three consecutive SCs at 1/3 with pairwise wpath 0.15, 0.15, 0.30 and
    // cosine distances 0.15, 0.15, 1
    let expected = [
        ("wpath(polarized)", wp, 2.0 * 0.25 * 0.6),
        ("wpath(spread)", ws, 2.0 / 9.0 * (0.15 + 0.15 + 0.3)),
        ("sim(polarized)", sp, 2.0 * 0.25 * 1.0),
        ("sim(spread)", ss, 2.0 / 9.0 * (0.15 + 0.15 + 1.0)),
    ];
    for (name, got, want) in expected {
        check!(
            (got - want).abs() <= SYNTH_TOL,
            "{name} = {got}, expected {want}"
        );
    }
    let (rw, rs) = (wp / ws, sp / ss);
    check!(rw > rs, "wpath ratio {rw} does not exceed sim ratio {rs}");
    Ok(format!(
        "wpath {wp:.4}/{ws:.4} = {rw:.4} > sim {sp:.4}/{ss:.4} = {rs:.4}"
    ))
}

fn runner() -> TestRunner {
    let config = Config {
        cases: PROPERTY_CASES,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn random_profile(seed: u64, bm: &Basemap, max_active: usize) -> ResearchProfile {
    let mut rng = seeded(seed);
    let k = rng.random_range(1..=max_active.min(bm.node_count()));
    let counts: Vec<(String, f64)> = (0..k)
        .map(|_| {
            let i = rng.random_range(0..bm.node_count());
            (bm.name(i).to_string(), rng.random_range(1..20) as f64)
        })
        .collect();
    ResearchProfile::from_counts("O", counts).expect("positive counts")
}

fn fail<T: std::fmt::Display>(e: T) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

fn scale_invariance(seed: u64, k: u32) -> Result<(), TestCaseError> {
    let bm = random_graph(&mut seeded(seed), MAX_GRAPH_NODES).basemap();
    let profile = random_profile(seed ^ 0x5eed, &bm, 8);
    let scaled = ResearchProfile::from_counts(
        "O",
        profile
            .counts()
            .iter()
            .map(|(c, &v)| (c.clone(), v * k as f64)),
    )
    .map_err(fail)?;
    prop_assert_eq!(profile.shares(), scaled.shares());
    for m in Metric::ALL {
        let dm = distance_matrix(&bm, m, Fill::Diameter).map_err(fail)?;
        let a = stirling(profile.shares(), &dm).map_err(fail)?;
        let b = stirling(scaled.shares(), &dm).map_err(fail)?;
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }
    Ok(())
}

fn simpson_bound(seed: u64) -> Result<(), TestCaseError> {
    let g = random_graph(&mut seeded(seed), MAX_GRAPH_NODES);
    let bm = g.basemap();
    let p = random_profile(seed.rotate_left(17), &bm, 10);
    let cm = overlay(&p, &bm, OverlayPolicy::Error).map_err(fail)?;
    let score = stirling_map(&cm, &cosine_distance_matrix(&bm)).map_err(fail)?;
    let simpson: f64 = p.shares().values().map(|x| x * x).sum();
    prop_assert!(score >= 0.0);
    prop_assert!(
        score <= 1.0 - simpson + 1e-12,
        "{} > 1 - {}",
        score,
        simpson
    );
    Ok(())
}

fn single_category(seed: u64) -> Result<(), TestCaseError> {
    let bm = random_graph(&mut seeded(seed), MAX_GRAPH_NODES).basemap();
    let i = (seed % bm.node_count() as u64) as usize;
    let p = ResearchProfile::from_counts("O", [(bm.name(i), 3.0)]).map_err(fail)?;
    let cm = overlay(&p, &bm, OverlayPolicy::Error).map_err(fail)?;
    for m in Metric::ALL {
        let dm = distance_matrix(&bm, m, Fill::Diameter).map_err(fail)?;
        prop_assert_eq!(stirling_map(&cm, &dm).map_err(fail)?, 0.0);
    }
    Ok(())
}

/// Only cases whose active SCs share a component at both thresholds apply;
/// the runner keeps drawing until enough of them passed.
fn threshold_monotone(seed: u64, t: f64) -> Result<(), TestCaseError> {
    let low = random_graph(&mut seeded(seed), MAX_GRAPH_NODES).basemap();
    let high = low.with_threshold(t).map_err(fail)?;
    let p = random_profile(seed.rotate_left(5), &low, 5);
    let idx: Vec<usize> = p.shares().keys().filter_map(|c| low.index_of(c)).collect();
    let together = |labels: &[usize]| idx.iter().all(|&i| labels[i] == labels[idx[0]]);
    prop_assume!(together(&low.components()) && together(&high.components()));
    let a = stirling(
        p.shares(),
        &weighted_path_matrix(&low, Fill::Diameter).map_err(fail)?,
    )
    .map_err(fail)?;
    let b = stirling(
        p.shares(),
        &weighted_path_matrix(&high, Fill::Diameter).map_err(fail)?,
    )
    .map_err(fail)?;
    prop_assert!(
        b >= a - 1e-12,
        "score fell from {} to {} at threshold {}",
        a,
        b,
        t
    );
    Ok(())
}

fn layout_determinism(seed: u64, layout_seed: u64) -> Result<(), TestCaseError> {
    let bm = random_graph(&mut seeded(seed), MAX_GRAPH_NODES).basemap();
    let a = layout_fr(&bm, layout_seed, 50).map_err(fail)?;
    let b = layout_fr(&bm, layout_seed, 50).map_err(fail)?;
    prop_assert!(a.covers(&bm));
    for (p, q) in a.positions().iter().zip(b.positions()) {
        prop_assert!((p.0 - q.0).abs() <= LAYOUT_TOL && (p.1 - q.1).abs() <= LAYOUT_TOL);
    }
    prop_assert_eq!(a, b);
    Ok(())
}

fn report<T: std::fmt::Debug>(name: &str, r: Result<(), TestError<T>>) -> Result<(), String> {
    r.map_err(|e| format!("{name}: {e}"))
}

fn invariant_suites() -> Outcome {
    let start = Instant::now();
    report(
        "scale invariance",
        runner().run(&(any::<u64>(), 1u32..1000), |(s, k)| scale_invariance(s, k)),
    )?;
    report("simpson bound", runner().run(&any::<u64>(), simpson_bound))?;
    report(
        "single category",
        runner().run(&any::<u64>(), single_category),
    )?;

    report(
        "threshold monotonicity",
        runner().run(&(any::<u64>(), 0.0f64..1.0), |(s, t)| {
            threshold_monotone(s, t)
        }),
    )?;
    report(
        "layout determinism",
        runner().run(&(any::<u64>(), any::<u64>()), |(s, l)| {
            layout_determinism(s, l)
        }),
    )?;
    let took = within(Duration::from_secs(30), start)?;
    Ok(format!(
        "5 properties × {PROPERTY_CASES} cases in {took:.2?}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 published ranking reproduction", org_score_ranks),
        ("2 Spearman reproduction", org_score_spearman),
        ("3 shortest-path oracle equivalence", path_oracles),
        ("4 Stirling oracle equivalence", stirling_oracle),
        (
            "5 hub and triangle basemap fixtures",
            small_basemap_fixtures,
        ),
        ("6 polarization discrimination", polarization),
        ("7 invariant suites", invariant_suites),
    ];
    let mut failed = 0;
    for (name, criterion) in criteria {
        match criterion() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

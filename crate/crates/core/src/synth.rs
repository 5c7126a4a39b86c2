//! Synthetic basemaps and portfolios for the diversity typology: activity
//! split between a few far-apart poles, spread over a compact region, or
//! concentrated on one category.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basemap::{Basemap, BasemapBuilder};
use crate::distance::{weighted_path_matrix, DistanceMatrix, Fill};
use crate::error::{Error, Result};
use crate::profile::ResearchProfile;

/// Above this many candidate subsets the placement switches from exhaustive
/// search to a greedy construction.
const EXHAUSTIVE_LIMIT: u64 = 200_000;
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PortfolioKind {
    Polarized,
    Spread,
    Concentrated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SynthSpec {
    pub kind: PortfolioKind,
    /// Active categories; for polarized portfolios this equals `poles`.
    pub n_active: usize,
    pub poles: usize,
    pub seed: u64,
}

impl SynthSpec {
    pub fn polarized(poles: usize, seed: u64) -> Self {
        Self {
            kind: PortfolioKind::Polarized,
            n_active: poles,
            poles,
            seed,
        }
    }

    pub fn spread(n_active: usize, seed: u64) -> Self {
        Self {
            kind: PortfolioKind::Spread,
            n_active,
            poles: 0,
            seed,
        }
    }

    pub fn concentrated(seed: u64) -> Self {
        Self {
            kind: PortfolioKind::Concentrated,
            n_active: 1,
            poles: 0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_active == 0 {
            return Err(Error::InvalidSpec("n_active must be at least 1"));
        }
        match self.kind {
            PortfolioKind::Polarized if self.poles < 2 => Err(Error::InvalidSpec(
                "a polarized portfolio needs at least 2 poles",
            )),
            PortfolioKind::Polarized if self.n_active != self.poles => Err(Error::InvalidSpec(
                "a polarized portfolio has one active category per pole",
            )),
            PortfolioKind::Concentrated if self.n_active != 1 => Err(Error::InvalidSpec(
                "a concentrated portfolio has one active category",
            )),
            _ => Ok(()),
        }
    }
}

/// Path graph `SC1 – SC2 – … – SCn` with every edge at distance `edge_w`.
pub fn gen_basemap_path(n: usize, edge_w: f64) -> Result<Basemap> {
    if n < 2 {
        return Err(Error::InvalidSpec("a path basemap needs at least 2 nodes"));
    }
    if !(edge_w > 0.0 && edge_w < 1.0) {
        return Err(Error::InvalidSpec("edge weight must lie in (0, 1)"));
    }
    let mut b = BasemapBuilder::new(0.0);
    for i in 1..n {
        b.add_edge(&format!("SC{i}"), &format!("SC{}", i + 1), 1.0 - edge_w)?;
    }
    Ok(b.build())
}

/// Synthetic profile with equal counts on the chosen categories.
///
/// Polarized: the `poles` nodes with the largest summed pairwise weighted
/// path distance. Spread: `n_active` nodes with the smallest largest pairwise
/// distance. Both stay inside one connected component. Ties are broken by
/// the seed.
pub fn gen_profile(spec: &SynthSpec, bm: &Basemap, org_id: &str) -> Result<ResearchProfile> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let chosen: Vec<usize> = match spec.kind {
        PortfolioKind::Concentrated => {
            if bm.node_count() == 0 {
                return Err(Error::InfeasiblePlacement {
                    wanted: 1,
                    capacity: 0,
                });
            }
            alloc::vec![rng.random_range(0..bm.node_count())]
        }
        PortfolioKind::Polarized | PortfolioKind::Spread => {
            let dm = weighted_path_matrix(bm, Fill::Diameter)?;
            let k = spec.n_active;
            let components = component_members(bm);
            let capacity = components.iter().map(Vec::len).max().unwrap_or(0);
            if k > capacity {
                return Err(Error::InfeasiblePlacement {
                    wanted: k,
                    capacity,
                });
            }
            let polar = spec.kind == PortfolioKind::Polarized;
            let mut candidates: Vec<(f64, Vec<usize>)> = Vec::new();
            for members in components.iter().filter(|m| m.len() >= k) {
                candidates.extend(best_subsets(members, k, &dm, polar));
            }
            // keep the overall optimum (objective is negated for spread)
            let best = candidates
                .iter()
                .map(|c| c.0)
                .fold(f64::NEG_INFINITY, f64::max);
            candidates.retain(|c| c.0 >= best - TIE_EPS);
            let pick = rng.random_range(0..candidates.len());
            candidates.swap_remove(pick).1
        }
    };
    let counts = chosen.into_iter().map(|i| (String::from(bm.name(i)), 1.0));
    ResearchProfile::from_counts(org_id, counts)
}

fn component_members(bm: &Basemap) -> Vec<Vec<usize>> {
    let labels = bm.components();
    let count = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut members = alloc::vec![Vec::new(); count];
    for (i, &c) in labels.iter().enumerate() {
        members[c].push(i);
    }
    members
}

/// Objective to maximize: summed pairwise distance (polarized) or the
/// negated largest pairwise distance (spread).
fn score(set: &[usize], dm: &DistanceMatrix, polar: bool) -> f64 {
    let mut sum = 0.0;
    let mut max = 0.0f64;
    for (a, &i) in set.iter().enumerate() {
        for &j in &set[a + 1..] {
            let d = dm.get(i, j);
            sum += d;
            max = max.max(d);
        }
    }
    if polar {
        sum
    } else {
        -max
    }
}

/// All optimal `k`-subsets of `members` (within `TIE_EPS`), each tagged with
/// its objective value.
fn best_subsets(
    members: &[usize],
    k: usize,
    dm: &DistanceMatrix,
    polar: bool,
) -> Vec<(f64, Vec<usize>)> {
    if binomial(members.len() as u64, k as u64) > EXHAUSTIVE_LIMIT {
        let set = if polar {
            greedy_polar(members, k, dm)
        } else {
            greedy_compact(members, k, dm)
        };
        return alloc::vec![(score(&set, dm, polar), set)];
    }
    let mut best: Vec<(f64, Vec<usize>)> = Vec::new();
    let mut top = f64::NEG_INFINITY;
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        let set: Vec<usize> = idx.iter().map(|&p| members[p]).collect();
        let value = score(&set, dm, polar);
        if value > top + TIE_EPS {
            top = value;
            best.clear();
            best.push((value, set));
        } else if value >= top - TIE_EPS {
            best.push((value, set));
        }
        if !next_combination(&mut idx, members.len()) {
            break;
        }
    }
    best
}

fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        match acc.checked_mul(n - i) {
            Some(v) => acc = v / (i + 1),
            None => return u64::MAX,
        }
    }
    acc
}

/// Diametral pair, then repeatedly the node farthest (in summed distance)
/// from those already chosen.
fn greedy_polar(members: &[usize], k: usize, dm: &DistanceMatrix) -> Vec<usize> {
    let mut pair = (members[0], members[1]);
    let mut far = -1.0;
    for (a, &i) in members.iter().enumerate() {
        for &j in &members[a + 1..] {
            if dm.get(i, j) > far {
                far = dm.get(i, j);
                pair = (i, j);
            }
        }
    }
    let mut set = alloc::vec![pair.0, pair.1];
    while set.len() < k {
        let next = members
            .iter()
            .copied()
            .filter(|m| !set.contains(m))
            .map(|m| (set.iter().map(|&s| dm.get(s, m)).sum::<f64>(), m))
            .fold((f64::NEG_INFINITY, usize::MAX), |acc, x| {
                if x.0 > acc.0 {
                    x
                } else {
                    acc
                }
            });
        set.push(next.1);
    }
    set.sort_unstable();
    set
}

/// Best ball: each member with its `k - 1` nearest neighbors, keeping the
/// ball with the smallest diameter.
fn greedy_compact(members: &[usize], k: usize, dm: &DistanceMatrix) -> Vec<usize> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    for &c in members {
        let mut near: Vec<usize> = members.to_vec();
        near.sort_by(|&a, &b| dm.get(c, a).total_cmp(&dm.get(c, b)).then(a.cmp(&b)));
        let mut set: Vec<usize> = near.into_iter().take(k).collect();
        set.sort_unstable();
        let diameter = -score(&set, dm, false);
        if best.as_ref().is_none_or(|b| diameter < b.0) {
            best = Some((diameter, set));
        }
    }
    best.map(|b| b.1).unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::{cosine_distance_matrix, Metric};
    use crate::diversity::stirling;
    use alloc::string::ToString;
    use alloc::vec;

    fn active(p: &ResearchProfile) -> Vec<String> {
        p.shares().keys().cloned().collect()
    }

    #[test]
    fn path_basemap() {
        let bm = gen_basemap_path(5, 0.15).unwrap();
        assert_eq!(bm.edge_count(), 4);
        let dm = weighted_path_matrix(&bm, Fill::Diameter).unwrap();
        assert!((dm.get(0, 4) - 0.6).abs() < 1e-12);
        assert_eq!(gen_basemap_path(2, 0.3).unwrap().edge_count(), 1);
        assert_eq!(gen_basemap_path(5, 0.15).unwrap(), bm);
        assert!(gen_basemap_path(1, 0.1).is_err());
        assert!(gen_basemap_path(3, 1.0).is_err());
    }

    #[test]
    fn polarized_takes_the_endpoints() {
        let bm = gen_basemap_path(5, 0.15).unwrap();
        for seed in 0..10 {
            let p = gen_profile(&SynthSpec::polarized(2, seed), &bm, "P").unwrap();
            assert_eq!(active(&p), vec!["SC1".to_string(), "SC5".to_string()]);
            assert_eq!(
                p.shares().values().copied().collect::<Vec<_>>(),
                vec![0.5, 0.5]
            );
        }
    }

    #[test]
    fn spread_is_contiguous() {
        let bm = gen_basemap_path(5, 0.15).unwrap();
        let mut seen = alloc::collections::BTreeSet::new();
        for seed in 0..20 {
            let p = gen_profile(&SynthSpec::spread(3, seed), &bm, "S").unwrap();
            let idx: Vec<usize> = active(&p).iter().map(|n| bm.index_of(n).unwrap()).collect();
            assert_eq!(idx[2] - idx[0], 2, "{idx:?}");
            assert!(p.shares().values().all(|&s| s == 1.0 / 3.0));
            seen.insert(idx[0]);
        }
        assert!(seen.len() > 1, "seed should break ties between windows");
    }

    #[test]
    fn seeded_determinism() {
        let bm = gen_basemap_path(9, 0.2).unwrap();
        for spec in [
            SynthSpec::spread(4, 7),
            SynthSpec::concentrated(7),
            SynthSpec::polarized(3, 7),
        ] {
            assert_eq!(
                gen_profile(&spec, &bm, "X").unwrap(),
                gen_profile(&spec, &bm, "X").unwrap()
            );
        }
    }

    #[test]
    fn concentrated_scores_zero() {
        let bm = gen_basemap_path(5, 0.15).unwrap();
        let p = gen_profile(&SynthSpec::concentrated(3), &bm, "C").unwrap();
        assert_eq!(p.shares().len(), 1);
        for m in Metric::ALL {
            let dm = crate::distance::distance_matrix(&bm, m, Fill::Diameter).unwrap();
            assert_eq!(stirling(p.shares(), &dm).unwrap(), 0.0);
        }
    }

    #[test]
    fn discrimination_ratios() {
        let bm = gen_basemap_path(5, 0.15).unwrap();
        let polar = gen_profile(&SynthSpec::polarized(2, 1), &bm, "P").unwrap();
        let spread = gen_profile(&SynthSpec::spread(3, 1), &bm, "S").unwrap();
        let wpath = weighted_path_matrix(&bm, Fill::Diameter).unwrap();
        let cos = cosine_distance_matrix(&bm);
        let (wp, ws) = (
            stirling(polar.shares(), &wpath).unwrap(),
            stirling(spread.shares(), &wpath).unwrap(),
        );
        let (cp, cs) = (
            stirling(polar.shares(), &cos).unwrap(),
            stirling(spread.shares(), &cos).unwrap(),
        );
        assert!((wp - 0.3).abs() < 1e-9 && (ws - 0.4 / 3.0).abs() < 1e-9);
        assert!((cp - 0.5).abs() < 1e-9 && (cs - 2.6 / 9.0).abs() < 1e-9);
        assert!(wp / ws > cp / cs);
    }

    #[test]
    fn infeasible_and_invalid_specs() {
        let mut b = BasemapBuilder::new(0.0);
        b.add_edge("A", "B", 0.5).unwrap();
        b.add_edge("C", "D", 0.5).unwrap();
        let bm = b.build();
        assert_eq!(
            gen_profile(&SynthSpec::polarized(3, 0), &bm, "P"),
            Err(Error::InfeasiblePlacement {
                wanted: 3,
                capacity: 2
            })
        );
        assert!(gen_profile(&SynthSpec::polarized(1, 0), &bm, "P").is_err());
        assert!(gen_profile(&SynthSpec::spread(0, 0), &bm, "P").is_err());
    }

    #[test]
    fn greedy_paths_agree_on_a_path() {
        let bm = gen_basemap_path(8, 0.1).unwrap();
        let dm = weighted_path_matrix(&bm, Fill::Diameter).unwrap();
        let members: Vec<usize> = (0..8).collect();
        assert_eq!(greedy_polar(&members, 2, &dm), vec![0, 7]);
        let compact = greedy_compact(&members, 3, &dm);
        assert_eq!(compact[2] - compact[0], 2);
        assert_eq!(binomial(250, 5), 7_817_031_300);
    }
}

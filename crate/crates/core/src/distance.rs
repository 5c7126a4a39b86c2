//! All-pairs distances between subject categories.
//!
//! * [`Metric::Cosine`]: `1 - s` on edges, 1 for every non-adjacent pair.
//! * [`Metric::Path`]: fewest edges between two categories.
//! * [`Metric::WeightedPath`]: smallest sum of edge distances `1 - s` over
//!   all paths. Unlike the cosine distance this is a metric, and a detour
//!   through light edges can undercut a heavy direct edge.
//!
//! Pairs in different components get a fill value, by default the largest
//! finite distance of the matrix.

use alloc::collections::{BTreeMap, BinaryHeap, VecDeque};
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};
use core::fmt;
use core::str::FromStr;

use crate::basemap::Basemap;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Cosine,
    Path,
    WeightedPath,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::Cosine, Metric::Path, Metric::WeightedPath];

    /// Short name used in column headers: `sim`, `path`, `wpath`.
    pub fn label(self) -> &'static str {
        match self {
            Metric::Cosine => "sim",
            Metric::Path => "path",
            Metric::WeightedPath => "wpath",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> core::result::Result<Self, String> {
        match s {
            "sim" | "cosine" => Ok(Metric::Cosine),
            "path" => Ok(Metric::Path),
            "wpath" => Ok(Metric::WeightedPath),
            other => Err(alloc::format!(
                "unknown variant `{other}` (expected sim, path or wpath)"
            )),
        }
    }
}

/// Distance assigned to pairs with no connecting path.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Fill {
    /// The largest finite distance in the matrix (1 when there is none).
    #[default]
    Diameter,
    Value(f64),
}

/// How unreachable pairs were filled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisconnectedFill {
    pub value: f64,
    pub overridden: bool,
    /// Unordered pairs without a path.
    pub unreachable_pairs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    metric: Metric,
    names: Vec<String>,
    values: Vec<f64>,
    reachable: Vec<bool>,
    fill: Option<DisconnectedFill>,
}

impl DistanceMatrix {
    /// Matrix from explicit row-major values, e.g. an audited export. Every
    /// pair is taken as reachable.
    pub fn from_values(metric: Metric, names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let n = names.len();
        if values.len() != n * n {
            return Err(Error::NotSquare {
                rows: values.len() / n.max(1),
                cols: n,
            });
        }
        for i in 0..n {
            if names[..i].contains(&names[i]) {
                return Err(Error::DuplicateCategory(names[i].clone()));
            }
            for j in 0..n {
                let d = values[i * n + j];
                let bad = !d.is_finite()
                    || d < 0.0
                    || (i == j && d != 0.0)
                    || d != values[j * n + i]
                    || (metric == Metric::Cosine && d > 1.0);
                if bad {
                    return Err(Error::InvalidDistance {
                        a: names[i].clone(),
                        b: names[j].clone(),
                        value: d,
                    });
                }
            }
        }
        Ok(Self {
            metric,
            names,
            values,
            reachable: vec![true; n * n],
            fill: None,
        })
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Row/column labels, in basemap node order.
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.values[i * n..(i + 1) * n]
    }

    /// Whether a path joins `i` and `j`; always true for the cosine variant.
    pub fn is_reachable(&self, i: usize, j: usize) -> bool {
        self.reachable[i * self.len() + j]
    }

    /// Fill record for the path variants; `None` for cosine distances.
    pub fn fill(&self) -> Option<DisconnectedFill> {
        self.fill
    }

    pub(crate) fn index_map(&self) -> BTreeMap<&str, usize> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect()
    }
}

pub fn distance_matrix(bm: &Basemap, metric: Metric, fill: Fill) -> Result<DistanceMatrix> {
    match metric {
        Metric::Cosine => Ok(cosine_distance_matrix(bm)),
        Metric::Path => unweighted_path_matrix(bm, fill),
        Metric::WeightedPath => weighted_path_matrix(bm, fill),
    }
}

pub fn cosine_distance_matrix(bm: &Basemap) -> DistanceMatrix {
    let n = bm.node_count();
    let mut values = vec![1.0; n * n];
    for i in 0..n {
        values[i * n + i] = 0.0;
    }
    for e in bm.edges() {
        values[e.a * n + e.b] = e.distance();
        values[e.b * n + e.a] = e.distance();
    }
    DistanceMatrix {
        metric: Metric::Cosine,
        names: bm.nodes().to_vec(),
        values,
        reachable: vec![true; n * n],
        fill: None,
    }
}

/// Hop counts by breadth-first search from every node.
pub fn unweighted_path_matrix(bm: &Basemap, fill: Fill) -> Result<DistanceMatrix> {
    check_fill(fill)?;
    let n = bm.node_count();
    let mut dist = vec![f64::INFINITY; n * n];
    let mut queue = VecDeque::new();
    for source in 0..n {
        let row = &mut dist[source * n..(source + 1) * n];
        row[source] = 0.0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in bm.neighbors(u) {
                if row[v].is_infinite() {
                    row[v] = row[u] + 1.0;
                    queue.push_back(v);
                }
            }
        }
    }
    Ok(finish(bm, Metric::Path, dist, fill))
}

#[derive(PartialEq)]
struct Dist(f64);

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Lightest-path lengths with edge weight `1 - s`, by Dijkstra from every
/// node.
pub fn weighted_path_matrix(bm: &Basemap, fill: Fill) -> Result<DistanceMatrix> {
    check_fill(fill)?;
    let n = bm.node_count();
    let mut dist = vec![f64::INFINITY; n * n];
    let mut heap = BinaryHeap::new();
    for source in 0..n {
        let row = &mut dist[source * n..(source + 1) * n];
        let mut done = vec![false; n];
        row[source] = 0.0;
        heap.push(Reverse((Dist(0.0), source)));
        while let Some(Reverse((Dist(d), u))) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            for &(v, s) in bm.neighbors(u) {
                let candidate = d + (1.0 - s);
                if candidate < row[v] {
                    row[v] = candidate;
                    heap.push(Reverse((Dist(candidate), v)));
                }
            }
        }
    }
    Ok(finish(bm, Metric::WeightedPath, dist, fill))
}

fn check_fill(fill: Fill) -> Result<()> {
    match fill {
        Fill::Value(v) if !(v.is_finite() && v >= 0.0) => Err(Error::InvalidFill(v)),
        _ => Ok(()),
    }
}

/// Symmetrizes (the lower-indexed source wins), records reachability and
/// fills unreachable pairs.
fn finish(bm: &Basemap, metric: Metric, mut dist: Vec<f64>, fill: Fill) -> DistanceMatrix {
    let n = bm.node_count();
    for i in 0..n {
        for j in i + 1..n {
            dist[j * n + i] = dist[i * n + j];
        }
    }
    let reachable: Vec<bool> = dist.iter().map(|d| d.is_finite()).collect();
    let unreachable_pairs = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| !reachable[i * n + j])
        .count();
    let (value, overridden) = match fill {
        Fill::Value(v) => (v, true),
        Fill::Diameter => {
            let diameter = dist
                .iter()
                .copied()
                .filter(|d| d.is_finite())
                .fold(0.0, f64::max);
            (if diameter > 0.0 { diameter } else { 1.0 }, false)
        }
    };
    for d in &mut dist {
        if d.is_infinite() {
            *d = value;
        }
    }
    DistanceMatrix {
        metric,
        names: bm.nodes().to_vec(),
        values: dist,
        reachable,
        fill: Some(DisconnectedFill {
            value,
            overridden,
            unreachable_pairs,
        }),
    }
}

/// Histogram binning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Binning {
    /// One bin per integer value; suited to hop counts.
    Integer,
    /// Bins `[k·w, (k+1)·w)`. Values within 1e-9 of an upper edge go to the
    /// next bin, so sums such as `0.1 + 0.2` land where expected.
    Width(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bin {
    pub start: f64,
    pub count: usize,
}

/// Distribution of finite distances over unordered pairs `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub binning: Binning,
    /// Contiguous bins from the first to the last non-empty one.
    pub bins: Vec<Bin>,
    pub unreachable: usize,
}

impl Histogram {
    pub fn count_at(&self, start: f64) -> usize {
        self.bins
            .iter()
            .find(|b| b.start == start)
            .map_or(0, |b| b.count)
    }

    pub fn total(&self) -> usize {
        self.bins.iter().map(|b| b.count).sum()
    }
}

pub fn path_length_distribution(dm: &DistanceMatrix, binning: Binning) -> Result<Histogram> {
    let width = match binning {
        Binning::Integer => 1.0,
        Binning::Width(w) if w.is_finite() && w > 0.0 => w,
        Binning::Width(w) => return Err(Error::InvalidBinWidth(w)),
    };
    let n = dm.len();
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    let mut unreachable = 0;
    for i in 0..n {
        for j in i + 1..n {
            if !dm.is_reachable(i, j) {
                unreachable += 1;
                continue;
            }
            let d = dm.get(i, j);
            let k = match binning {
                Binning::Integer => libm::round(d) as i64,
                Binning::Width(_) => libm::floor(d / width + 1e-9) as i64,
            };
            *counts.entry(k).or_insert(0) += 1;
        }
    }
    let bins = match (counts.keys().next(), counts.keys().next_back()) {
        (Some(&lo), Some(&hi)) => (lo..=hi)
            .map(|k| Bin {
                start: k as f64 * width,
                count: counts.get(&k).copied().unwrap_or(0),
            })
            .collect(),
        _ => Vec::new(),
    };
    Ok(Histogram {
        binning,
        bins,
        unreachable,
    })
}

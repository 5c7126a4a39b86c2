//! Brute-force references that share no code with the library's algorithms.
#![allow(dead_code, clippy::needless_range_loop)]

use divmap_core::{Basemap, BasemapBuilder};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Undirected graph as a dense similarity matrix.
#[derive(Debug, Clone)]
pub struct DenseGraph {
    pub similarity: Vec<Vec<Option<f64>>>,
}

impl DenseGraph {
    pub fn len(&self) -> usize {
        self.similarity.len()
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.similarity[i][j].map(|s| 1.0 - s)
    }

    pub fn name(i: usize) -> String {
        format!("N{i:02}")
    }

    pub fn basemap(&self) -> Basemap {
        let mut b = BasemapBuilder::new(0.0);
        for i in 0..self.len() {
            b.add_node(&Self::name(i));
        }
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if let Some(s) = self.similarity[i][j] {
                    b.add_edge(&Self::name(i), &Self::name(j), s).unwrap();
                }
            }
        }
        b.build()
    }
}

/// Graph with 1..=`max_n` nodes, random density and similarities in (0, 1).
pub fn random_graph(rng: &mut ChaCha8Rng, max_n: usize) -> DenseGraph {
    let n = rng.random_range(1..=max_n);
    let density: f64 = rng.random_range(0.1..0.45);
    let mut similarity = vec![vec![None; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < density {
                let s = rng.random_range(0.001..0.999);
                similarity[i][j] = Some(s);
                similarity[j][i] = Some(s);
            }
        }
    }
    DenseGraph { similarity }
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Lightest simple path between every pair, by enumerating every simple
/// path out of every source.
pub fn enumerate_lightest_paths(g: &DenseGraph) -> Vec<Vec<Option<f64>>> {
    fn walk(
        g: &DenseGraph,
        at: usize,
        length: f64,
        visited: &mut Vec<bool>,
        best: &mut [Option<f64>],
    ) {
        if best[at].is_none_or(|b| length < b) {
            best[at] = Some(length);
        }
        for next in 0..g.len() {
            if visited[next] {
                continue;
            }
            if let Some(w) = g.weight(at, next) {
                visited[next] = true;
                walk(g, next, length + w, visited, best);
                visited[next] = false;
            }
        }
    }
    (0..g.len())
        .map(|s| {
            let mut best = vec![None; g.len()];
            let mut visited = vec![false; g.len()];
            visited[s] = true;
            walk(g, s, 0.0, &mut visited, &mut best);
            best
        })
        .collect()
}

/// Hop counts by level-synchronous breadth-first search on the dense matrix.
pub fn bfs_hops(g: &DenseGraph) -> Vec<Vec<Option<usize>>> {
    let n = g.len();
    (0..n)
        .map(|s| {
            let mut hops = vec![None; n];
            hops[s] = Some(0);
            let mut frontier = vec![s];
            let mut level = 0;
            while !frontier.is_empty() {
                level += 1;
                let mut next = Vec::new();
                for &u in &frontier {
                    for v in 0..n {
                        if g.similarity[u][v].is_some() && hops[v].is_none() {
                            hops[v] = Some(level);
                            next.push(v);
                        }
                    }
                }
                frontier = next;
            }
            hops
        })
        .collect()
}

/// `Σ_{i≠j} d_ij p_i p_j` as a plain double loop over ordered pairs.
pub fn naive_stirling(shares: &[f64], d: &[Vec<f64>]) -> f64 {
    let mut total = 0.0;
    for i in 0..shares.len() {
        for j in 0..shares.len() {
            if i != j {
                total += d[i][j] * shares[i] * shares[j];
            }
        }
    }
    total
}

/// Random symmetric distances with zero diagonal; values up to `max`.
pub fn random_distances(rng: &mut ChaCha8Rng, n: usize, max: f64) -> Vec<Vec<f64>> {
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = rng.random_range(0.0..max);
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// Random shares over `n` categories, some of them zero, summing to 1.
pub fn random_shares(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random::<f64>() < 0.2 {
                0.0
            } else {
                rng.random_range(0.0..10.0)
            }
        })
        .collect();
    let total: f64 = raw.iter().sum();
    if total == 0.0 {
        let mut one = vec![0.0; n];
        one[0] = 1.0;
        return one;
    }
    raw.iter().map(|r| r / total).collect()
}

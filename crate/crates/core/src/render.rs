//! Force-directed layout of the basemap and the visual encoding of competence
//! maps. Writers for the individual file formats live in the `divmap` crate.

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basemap::Basemap;
use crate::error::{Error, Result};

/// Initial temperature as a fraction of the unit frame.
const START_TEMPERATURE: f64 = 0.1;
const MIN_SEPARATION: f64 = 1e-9;

/// Node positions in the unit square, in basemap node order.
#[derive(Debug, Clone, PartialEq)]
pub struct LayoutCoords {
    pub seed: u64,
    pub iterations: usize,
    names: Vec<String>,
    positions: Vec<(f64, f64)>,
}

impl LayoutCoords {
    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn positions(&self) -> &[(f64, f64)] {
        &self.positions
    }

    pub fn get(&self, name: &str) -> Option<(f64, f64)> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.positions[i])
    }

    /// Whether every node of `bm` has a position.
    pub fn covers(&self, bm: &Basemap) -> bool {
        bm.nodes().iter().all(|n| self.get(n).is_some())
    }
}

/// Fruchterman–Reingold layout in the unit frame.
///
/// Nodes start at seeded random positions. Every pair repels with `k²/d`,
/// every edge attracts with `s·d²/k` where `s` is its similarity, and moves
/// are capped by a temperature that cools linearly to zero. Positions are
/// clamped to `[0, 1]²`. A lone node sits at the center.
pub fn layout_fr(bm: &Basemap, seed: u64, iterations: usize) -> Result<LayoutCoords> {
    if iterations == 0 {
        return Err(Error::ZeroIterations);
    }
    let n = bm.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random::<f64>(), rng.random::<f64>()))
        .collect();
    if n == 1 {
        pos[0] = (0.5, 0.5);
    }

    if n > 1 {
        let k = libm::sqrt(1.0 / n as f64);
        let mut disp = alloc::vec![(0.0f64, 0.0f64); n];
        for step in 0..iterations {
            let temperature = START_TEMPERATURE * (1.0 - step as f64 / iterations as f64);
            disp.iter_mut().for_each(|d| *d = (0.0, 0.0));

            for i in 0..n {
                for j in i + 1..n {
                    let (dx, dy, d) = separation(pos[i], pos[j], i, j);
                    let f = k * k / d;
                    let (fx, fy) = (dx / d * f, dy / d * f);
                    disp[i].0 += fx;
                    disp[i].1 += fy;
                    disp[j].0 -= fx;
                    disp[j].1 -= fy;
                }
            }
            for e in bm.edges() {
                let (dx, dy, d) = separation(pos[e.a], pos[e.b], e.a, e.b);
                let f = e.similarity() * d * d / k;
                let (fx, fy) = (dx / d * f, dy / d * f);
                disp[e.a].0 -= fx;
                disp[e.a].1 -= fy;
                disp[e.b].0 += fx;
                disp[e.b].1 += fy;
            }
            for (p, &(dx, dy)) in pos.iter_mut().zip(&disp) {
                let len = libm::sqrt(dx * dx + dy * dy);
                if len > 0.0 {
                    let step = len.min(temperature);
                    p.0 = (p.0 + dx / len * step).clamp(0.0, 1.0);
                    p.1 = (p.1 + dy / len * step).clamp(0.0, 1.0);
                }
            }
        }
    }

    Ok(LayoutCoords {
        seed,
        iterations,
        names: bm.nodes().to_vec(),
        positions: pos,
    })
}

/// Vector from `b` to `a` and its length; coincident nodes are pushed apart
/// along a direction fixed by their indices.
fn separation(a: (f64, f64), b: (f64, f64), i: usize, j: usize) -> (f64, f64, f64) {
    let (dx, dy) = (a.0 - b.0, a.1 - b.1);
    let d = libm::sqrt(dx * dx + dy * dy);
    if d >= MIN_SEPARATION {
        return (dx, dy, d);
    }
    let angle = (i * 31 + j * 17) as f64;
    (
        libm::cos(angle) * MIN_SEPARATION,
        libm::sin(angle) * MIN_SEPARATION,
        MIN_SEPARATION,
    )
}

/// Visual encoding: node radius grows linearly with share above a floor so
/// inactive categories stay visible; edge width grows with similarity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeStyle {
    pub floor: f64,
    pub scale: f64,
    pub edge_scale: f64,
}

impl Default for NodeStyle {
    fn default() -> Self {
        Self {
            floor: 2.0,
            scale: 60.0,
            edge_scale: 3.0,
        }
    }
}

impl NodeStyle {
    pub fn radius(&self, share: f64) -> f64 {
        self.floor + self.scale * share
    }

    pub fn edge_width(&self, similarity: f64) -> f64 {
        self.edge_scale * similarity
    }
}

/// Side of the square SVG viewport.
pub const VIEWPORT: f64 = 1000.0;

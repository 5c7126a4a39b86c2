//! The science basemap: a thresholded cosine-similarity network of subject
//! categories.
//!
//! Two categories are similar when their citing rows in the SC×SC citation
//! matrix point at the same categories. Pairs whose similarity falls below
//! the threshold get no edge; every edge carries its similarity `s` and the
//! derived distance `w = 1 - s`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Square SC×SC citation counts; row `i` holds the citations given by SC `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CitationMatrix {
    names: Vec<String>,
    counts: Vec<f64>,
}

impl CitationMatrix {
    pub fn new(names: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = names.len();
        if rows.len() != n {
            return Err(Error::NotSquare {
                rows: rows.len(),
                cols: n,
            });
        }
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateCategory(name.clone()));
            }
        }
        let mut counts = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotSquare {
                    rows: n,
                    cols: row.len(),
                });
            }
            for (j, &value) in row.iter().enumerate() {
                if !value.is_finite() || value < 0.0 {
                    return Err(Error::InvalidCount {
                        row: names[i].clone(),
                        col: names[j].clone(),
                        value,
                    });
                }
            }
            counts.extend_from_slice(row);
        }
        Ok(Self { names, counts })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.len();
        &self.counts[i * n..(i + 1) * n]
    }

    /// Drops the self-citations of every category.
    pub fn zero_diagonal(&mut self) {
        let n = self.len();
        for i in 0..n {
            self.counts[i * n + i] = 0.0;
        }
    }

    /// Cosine similarity of the citing rows of `i` and `j`.
    pub fn similarity(&self, i: usize, j: usize) -> Result<f64> {
        cosine_similarity(self.row(i), self.row(j)).ok_or_else(|| {
            let zero: Vec<String> = [i, j]
                .iter()
                .filter(|&&k| self.row(k).iter().all(|&c| c == 0.0))
                .map(|&k| self.names[k].clone())
                .collect();
            Error::ZeroVector(zero)
        })
    }
}

/// `dot(u, v) / (‖u‖·‖v‖)`, or `None` when either vector is all zero.
///
/// For non-negative input the result lies in `[0, 1]`.
///
/// # Panics
///
/// If the slices differ in length.
pub fn cosine_similarity(u: &[f64], v: &[f64]) -> Option<f64> {
    assert_eq!(u.len(), v.len(), "cosine of vectors with different lengths");
    let (mut dot, mut uu, mut vv) = (0.0, 0.0, 0.0);
    for (&a, &b) in u.iter().zip(v) {
        dot += a * b;
        uu += a * a;
        vv += b * b;
    }
    if uu == 0.0 || vv == 0.0 {
        return None;
    }
    // one square root of the product keeps identical vectors at exactly 1
    Some((dot / libm::sqrt(uu * vv)).min(1.0))
}

/// Builds the basemap from a citation matrix, keeping every pair whose row
/// cosine is positive and at least `threshold`. All categories stay on the
/// map, isolated or not.
pub fn build_basemap(cm: &CitationMatrix, threshold: f64) -> Result<Basemap> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidThreshold(threshold));
    }
    let n = cm.len();
    let norms: Vec<f64> = (0..n)
        .map(|i| cm.row(i).iter().map(|c| c * c).sum())
        .collect();
    let zero: Vec<String> = (0..n)
        .filter(|&i| norms[i] == 0.0)
        .map(|i| cm.names[i].clone())
        .collect();
    if !zero.is_empty() {
        return Err(Error::ZeroVector(zero));
    }

    let mut builder = BasemapBuilder::new(threshold);
    for name in cm.names() {
        builder.add_node(name);
    }
    for i in 0..n {
        for j in i + 1..n {
            let s = cm.similarity(i, j)?;
            if s > 0.0 && s >= threshold {
                builder.add_edge(&cm.names[i], &cm.names[j], s)?;
            }
        }
    }
    Ok(builder.build())
}

/// Undirected edge between node indices `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    similarity: f64,
}

impl Edge {
    pub fn similarity(&self) -> f64 {
        self.similarity
    }

    /// Cosine distance `1 - s`.
    pub fn distance(&self) -> f64 {
        1.0 - self.similarity
    }
}

/// Incremental, validating construction of a [`Basemap`].
#[derive(Debug, Clone)]
pub struct BasemapBuilder {
    nodes: Vec<String>,
    index: BTreeMap<String, usize>,
    edges: BTreeMap<(usize, usize), f64>,
    threshold: f64,
}

impl BasemapBuilder {
    pub fn new(threshold: f64) -> Self {
        Self {
            nodes: Vec::new(),
            index: BTreeMap::new(),
            edges: BTreeMap::new(),
            threshold,
        }
    }

    /// Adds `name` if absent and returns its index.
    pub fn add_node(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.nodes.len();
        self.nodes.push(name.to_string());
        self.index.insert(name.to_string(), i);
        i
    }

    /// Adds the undirected edge `a -- b`, creating missing endpoints.
    pub fn add_edge(&mut self, a: &str, b: &str, similarity: f64) -> Result<()> {
        if a == b {
            return Err(Error::SelfLoop(a.to_string()));
        }
        if !(similarity > 0.0 && similarity <= 1.0) {
            return Err(Error::SimilarityOutOfRange {
                a: a.to_string(),
                b: b.to_string(),
                value: similarity,
            });
        }
        if similarity < self.threshold {
            return Err(Error::BelowThreshold {
                a: a.to_string(),
                b: b.to_string(),
                value: similarity,
                threshold: self.threshold,
            });
        }
        let (i, j) = (self.add_node(a), self.add_node(b));
        let key = (i.min(j), i.max(j));
        if self.edges.contains_key(&key) {
            return Err(Error::DuplicateEdge(a.to_string(), b.to_string()));
        }
        self.edges.insert(key, similarity);
        Ok(())
    }

    pub fn build(self) -> Basemap {
        let n = self.nodes.len();
        let edges: Vec<Edge> = self
            .edges
            .into_iter()
            .map(|((a, b), similarity)| Edge { a, b, similarity })
            .collect();
        let mut adjacency = alloc::vec![Vec::new(); n];
        for e in &edges {
            adjacency[e.a].push((e.b, e.similarity));
            adjacency[e.b].push((e.a, e.similarity));
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(k, _)| k);
        }
        Basemap {
            nodes: self.nodes,
            index: self.index,
            edges,
            adjacency,
            threshold: self.threshold,
        }
    }
}

/// Weighted undirected SC network. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct Basemap {
    nodes: Vec<String>,
    index: BTreeMap<String, usize>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
    threshold: f64,
}

impl Basemap {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn name(&self, i: usize) -> &str {
        &self.nodes[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// Edges ordered by `(a, b)`.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// `(neighbor, similarity)` pairs ordered by neighbor index.
    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn similarity(&self, i: usize, j: usize) -> Option<f64> {
        let list = &self.adjacency[i];
        list.binary_search_by_key(&j, |&(k, _)| k)
            .ok()
            .map(|p| list[p].1)
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Copy keeping only edges with similarity at least `threshold`. The
    /// recorded threshold never decreases.
    pub fn with_threshold(&self, threshold: f64) -> Result<Basemap> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(Error::InvalidThreshold(threshold));
        }
        Ok(self.filter_edges(self.threshold.max(threshold), |e| e.similarity >= threshold))
    }

    /// Copy without the edge between `a` and `b` (if any).
    pub fn without_edge(&self, a: usize, b: usize) -> Basemap {
        let key = (a.min(b), a.max(b));
        self.filter_edges(self.threshold, |e| (e.a, e.b) != key)
    }

    fn filter_edges(&self, threshold: f64, keep: impl Fn(&Edge) -> bool) -> Basemap {
        let mut builder = BasemapBuilder::new(threshold);
        for name in &self.nodes {
            builder.add_node(name);
        }
        for e in self.edges.iter().filter(|e| keep(e)) {
            builder.edges.insert((e.a, e.b), e.similarity);
        }
        builder.build()
    }

    /// Connected-component label per node; labels are numbered in order of
    /// each component's smallest node index.
    pub fn components(&self) -> Vec<usize> {
        let n = self.node_count();
        let mut label = alloc::vec![usize::MAX; n];
        let mut next = 0;
        let mut stack = Vec::new();
        for start in 0..n {
            if label[start] != usize::MAX {
                continue;
            }
            label[start] = next;
            stack.push(start);
            while let Some(u) = stack.pop() {
                for &(v, _) in &self.adjacency[u] {
                    if label[v] == usize::MAX {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        label
    }
}

//! Generalized Stirling index `Σ_{i≠j} d_ij p_i p_j`.
//!
//! The sum runs over ordered pairs, so every unordered pair contributes
//! twice. Scores are not normalized.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::basemap::Basemap;
use crate::distance::{distance_matrix, DistanceMatrix, Fill, Metric};
use crate::error::{Error, Result};
use crate::profile::{overlay, CompetenceMap, OverlayPolicy, ResearchProfile};

const MASS_SLACK: f64 = 1e-9;

/// Stirling index of `shares` under `dm`.
///
/// Shares must be non-negative and sum to at most 1 (a drop-keep overlay
/// may leave less than full mass).
pub fn stirling(shares: &BTreeMap<String, f64>, dm: &DistanceMatrix) -> Result<f64> {
    let index = dm.index_map();
    let mut active = Vec::with_capacity(shares.len());
    let mut mass = 0.0;
    for (category, &p) in shares {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidShare {
                category: category.clone(),
                value: p,
            });
        }
        let i = *index
            .get(category.as_str())
            .ok_or_else(|| Error::NotInMatrix(category.clone()))?;
        mass += p;
        if p > 0.0 {
            active.push((i, p));
        }
    }
    if mass > 1.0 + MASS_SLACK {
        return Err(Error::ShareMassExceeded(mass));
    }
    active.sort_by_key(|&(i, _)| i);
    Ok(pair_sum(&active, dm))
}

/// Stirling index of a competence map; `dm` must come from the same
/// basemap.
pub fn stirling_map(cm: &CompetenceMap<'_>, dm: &DistanceMatrix) -> Result<f64> {
    if dm.names() != cm.basemap().nodes() {
        return Err(Error::MatrixMismatch);
    }
    let active: Vec<(usize, f64)> = cm
        .weights()
        .iter()
        .enumerate()
        .filter(|(_, &w)| w > 0.0)
        .map(|(i, &w)| (i, w))
        .collect();
    Ok(pair_sum(&active, dm))
}

/// Share-free variant `Σ_{i≠j} d_ij` over the active categories.
pub fn stirling_uniform<S: AsRef<str>>(active: &[S], dm: &DistanceMatrix) -> Result<f64> {
    if active.is_empty() {
        return Err(Error::NoActiveCategories);
    }
    let index = dm.index_map();
    let mut idx = Vec::with_capacity(active.len());
    for name in active {
        let name = name.as_ref();
        let i = *index
            .get(name)
            .ok_or_else(|| Error::NotInMatrix(name.to_string()))?;
        idx.push((i, 1.0));
    }
    idx.sort_by_key(|&(i, _)| i);
    idx.dedup_by_key(|&mut (i, _)| i);
    Ok(pair_sum(&idx, dm))
}

fn pair_sum(active: &[(usize, f64)], dm: &DistanceMatrix) -> f64 {
    let mut acc = 0.0;
    for (k, &(i, pi)) in active.iter().enumerate() {
        let row = dm.row(i);
        let inner: f64 = active[k + 1..].iter().map(|&(j, pj)| row[j] * pj).sum();
        acc += pi * inner;
    }
    2.0 * acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiversityScore {
    pub org_id: String,
    pub metric: Metric,
    pub value: f64,
}

/// Options shared by every organization of a report.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ReportOptions {
    pub policy: OverlayPolicy,
    pub fill: Fill,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub org_id: String,
    /// One value per report metric, in report order; empty on error.
    pub values: Vec<f64>,
    pub unmapped: Vec<String>,
    pub error: Option<Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiversityReport {
    pub metrics: Vec<Metric>,
    pub rows: Vec<ReportRow>,
}

impl DiversityReport {
    pub fn scores(&self) -> Vec<DiversityScore> {
        self.rows
            .iter()
            .filter(|r| r.error.is_none())
            .flat_map(|r| {
                self.metrics
                    .iter()
                    .zip(&r.values)
                    .map(|(&metric, &value)| DiversityScore {
                        org_id: r.org_id.clone(),
                        metric,
                        value,
                    })
            })
            .collect()
    }

    pub fn value(&self, org_id: &str, metric: Metric) -> Option<f64> {
        let col = self.metrics.iter().position(|&m| m == metric)?;
        let row = self.rows.iter().find(|r| r.org_id == org_id)?;
        row.values.get(col).copied()
    }
}

/// Scores every profile under every requested metric. Each distance matrix
/// is computed once. An organization whose overlay fails gets an error row;
/// the rest of the batch continues.
pub fn diversity_report(
    profiles: &[ResearchProfile],
    bm: &Basemap,
    metrics: &[Metric],
    options: ReportOptions,
) -> Result<DiversityReport> {
    let mut wanted: Vec<Metric> = Vec::new();
    for &m in metrics {
        if !wanted.contains(&m) {
            wanted.push(m);
        }
    }
    if wanted.is_empty() {
        return Ok(DiversityReport {
            metrics: wanted,
            rows: Vec::new(),
        });
    }
    let matrices = wanted
        .iter()
        .map(|&m| distance_matrix(bm, m, options.fill))
        .collect::<Result<Vec<_>>>()?;

    let rows = profiles
        .iter()
        .map(|profile| match overlay(profile, bm, options.policy) {
            Ok(cm) => {
                let values = matrices
                    .iter()
                    .map(|dm| stirling_map(&cm, dm))
                    .collect::<Result<Vec<_>>>();
                let unmapped = cm.unmapped().keys().cloned().collect();
                match values {
                    Ok(values) => ReportRow {
                        org_id: profile.org_id().to_string(),
                        values,
                        unmapped,
                        error: None,
                    },
                    Err(e) => ReportRow {
                        org_id: profile.org_id().to_string(),
                        values: Vec::new(),
                        unmapped,
                        error: Some(e),
                    },
                }
            }
            Err(e) => ReportRow {
                org_id: profile.org_id().to_string(),
                values: Vec::new(),
                unmapped: Vec::new(),
                error: Some(e),
            },
        })
        .collect();
    Ok(DiversityReport {
        metrics: wanted,
        rows,
    })
}

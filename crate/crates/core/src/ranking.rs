//! Ranks, rank correlation and rank shifts between diversity variants.
//!
//! Rank 1 is the least diverse organization, rank N the most diverse. Tied
//! scores share the average of the positions they occupy.

use alloc::string::String;
use alloc::vec::Vec;

use crate::distance::Metric;
use crate::diversity::DiversityReport;
use crate::error::{Error, Result};

/// Average ranks (1-based) of `values`; equal values tie exactly.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut ranks = alloc::vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        start = end;
    }
    ranks
}

/// Ranks organizations by score, returned in input order.
pub fn assign_ranks(scores: &[(String, f64)]) -> Result<Vec<(String, f64)>> {
    if scores.is_empty() {
        return Err(Error::NoScores);
    }
    if let Some((org, _)) = scores.iter().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFiniteScore(org.clone()));
    }
    let values: Vec<f64> = scores.iter().map(|&(_, v)| v).collect();
    Ok(scores
        .iter()
        .zip(average_ranks(&values))
        .map(|((org, _), r)| (org.clone(), r))
        .collect())
}

/// Spearman's rank correlation, computed as the Pearson correlation of the
/// (possibly fractional) ranks.
pub fn spearman(x_ranks: &[f64], y_ranks: &[f64]) -> Result<f64> {
    if x_ranks.len() != y_ranks.len() {
        return Err(Error::LengthMismatch(x_ranks.len(), y_ranks.len()));
    }
    let n = x_ranks.len();
    if n < 2 {
        return Err(Error::TooFewPairs(n));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n as f64;
    let (mx, my) = (mean(x_ranks), mean(y_ranks));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in x_ranks.iter().zip(y_ranks) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / libm::sqrt(sxx * syy)).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankColumn {
    pub metric: Metric,
    pub scores: Vec<f64>,
    pub ranks: Vec<f64>,
}

/// Scores and ranks of a set of organizations under several variants.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    orgs: Vec<String>,
    columns: Vec<RankColumn>,
}

impl RankTable {
    /// `columns` holds one score vector per variant, aligned with `orgs`.
    pub fn new(orgs: Vec<String>, columns: Vec<(Metric, Vec<f64>)>) -> Result<Self> {
        if orgs.is_empty() {
            return Err(Error::NoScores);
        }
        let mut built: Vec<RankColumn> = Vec::with_capacity(columns.len());
        for (metric, scores) in columns {
            if built.iter().any(|c| c.metric == metric) {
                return Err(Error::DuplicateVariant(metric.label()));
            }
            if scores.len() != orgs.len() {
                return Err(Error::LengthMismatch(orgs.len(), scores.len()));
            }
            if let Some(k) = scores.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteScore(orgs[k].clone()));
            }
            let ranks = average_ranks(&scores);
            built.push(RankColumn {
                metric,
                scores,
                ranks,
            });
        }
        Ok(Self {
            orgs,
            columns: built,
        })
    }

    /// Table over the organizations of `report` that scored without error.
    pub fn from_report(report: &DiversityReport) -> Result<Self> {
        let ok: Vec<_> = report.rows.iter().filter(|r| r.error.is_none()).collect();
        let orgs = ok.iter().map(|r| r.org_id.clone()).collect();
        let columns = report
            .metrics
            .iter()
            .enumerate()
            .map(|(k, &m)| (m, ok.iter().map(|r| r.values[k]).collect()))
            .collect();
        Self::new(orgs, columns)
    }

    pub fn orgs(&self) -> &[String] {
        &self.orgs
    }

    pub fn columns(&self) -> &[RankColumn] {
        &self.columns
    }

    pub fn metrics(&self) -> impl Iterator<Item = Metric> + '_ {
        self.columns.iter().map(|c| c.metric)
    }

    pub fn column(&self, metric: Metric) -> Result<&RankColumn> {
        self.columns
            .iter()
            .find(|c| c.metric == metric)
            .ok_or(Error::MissingVariant(metric.label()))
    }

    pub fn rank(&self, org: &str, metric: Metric) -> Option<f64> {
        let k = self.orgs.iter().position(|o| o == org)?;
        self.column(metric).ok().map(|c| c.ranks[k])
    }

    pub fn spearman(&self, first: Metric, second: Metric) -> Result<f64> {
        spearman(&self.column(first)?.ranks, &self.column(second)?.ranks)
    }
}

/// `rank(second) - rank(first)` per organization, largest gain first;
/// equal deltas keep table order.
pub fn rank_deltas(rt: &RankTable, first: Metric, second: Metric) -> Result<Vec<(String, f64)>> {
    let a = rt.column(first)?;
    let b = rt.column(second)?;
    let mut deltas: Vec<(String, f64)> = rt
        .orgs
        .iter()
        .zip(a.ranks.iter().zip(&b.ranks))
        .map(|(org, (ra, rb))| (org.clone(), rb - ra))
        .collect();
    deltas.sort_by(|x, y| y.1.total_cmp(&x.1));
    Ok(deltas)
}

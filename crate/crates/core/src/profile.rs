//! Research profiles and their overlay on the basemap.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::basemap::Basemap;
use crate::error::{Error, Result};

/// One paper of one organization with its subject-category assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaperRecord {
    pub org_id: String,
    pub paper_id: String,
    pub categories: Vec<String>,
}

impl PaperRecord {
    pub fn new(
        org_id: impl Into<String>,
        paper_id: impl Into<String>,
        categories: Vec<String>,
    ) -> Result<Self> {
        let record = Self {
            org_id: org_id.into(),
            paper_id: paper_id.into(),
            categories,
        };
        record.validate()?;
        Ok(record)
    }

    pub fn validate(&self) -> Result<()> {
        if self.categories.is_empty() {
            return Err(Error::EmptyCategoryList(self.paper_id.clone()));
        }
        let mut seen = BTreeSet::new();
        for c in &self.categories {
            if !seen.insert(c.as_str()) {
                return Err(Error::RepeatedCategory {
                    paper_id: self.paper_id.clone(),
                    category: c.clone(),
                });
            }
        }
        Ok(())
    }
}

/// How a paper assigned to several categories is counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Counting {
    /// Every (paper, category) assignment counts 1.
    #[default]
    Full,
    /// A paper with `k` categories adds `1/k` to each.
    Fractional,
}

/// Frequency distribution of an organization's output over categories.
#[derive(Debug, Clone, PartialEq)]
pub struct ResearchProfile {
    org_id: String,
    counts: BTreeMap<String, f64>,
    shares: BTreeMap<String, f64>,
    papers: Option<usize>,
}

impl ResearchProfile {
    /// Builds a profile from raw counts. Repeated categories are summed and
    /// zero counts are dropped.
    pub fn from_counts<S: Into<String>>(
        org_id: impl Into<String>,
        counts: impl IntoIterator<Item = (S, f64)>,
    ) -> Result<Self> {
        let org_id = org_id.into();
        let mut merged: BTreeMap<String, f64> = BTreeMap::new();
        for (category, value) in counts {
            let category = category.into();
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidCount {
                    row: org_id,
                    col: category,
                    value,
                });
            }
            *merged.entry(category).or_insert(0.0) += value;
        }
        merged.retain(|_, v| *v > 0.0);
        let total: f64 = merged.values().sum();
        if total <= 0.0 {
            return Err(Error::EmptyProfile(org_id));
        }
        let shares = merged
            .iter()
            .map(|(k, &v)| (k.clone(), v / total))
            .collect();
        Ok(Self {
            org_id,
            counts: merged,
            shares,
            papers: None,
        })
    }

    pub fn with_papers(mut self, papers: usize) -> Self {
        self.papers = Some(papers);
        self
    }

    pub fn org_id(&self) -> &str {
        &self.org_id
    }

    pub fn counts(&self) -> &BTreeMap<String, f64> {
        &self.counts
    }

    /// Normalized counts, summing to 1.
    pub fn shares(&self) -> &BTreeMap<String, f64> {
        &self.shares
    }

    /// Number of distinct papers, when the profile was aggregated from
    /// records.
    pub fn papers(&self) -> Option<usize> {
        self.papers
    }

    pub fn total(&self) -> f64 {
        self.counts.values().sum()
    }
}

#[derive(Default)]
struct Tally {
    papers: BTreeSet<String>,
    // category -> (list length -> number of papers)
    assignments: BTreeMap<String, BTreeMap<usize, u64>>,
}

/// Turns publication records into one profile per organization, ordered by
/// `org_id`.
///
/// Fractional contributions are grouped by list length and summed in a
/// fixed order, so the result does not depend on record order.
pub fn aggregate_profiles(
    records: &[PaperRecord],
    counting: Counting,
) -> Result<Vec<ResearchProfile>> {
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    let mut tallies: BTreeMap<&str, Tally> = BTreeMap::new();
    for record in records {
        record.validate()?;
        let tally = tallies.entry(record.org_id.as_str()).or_default();
        if !tally.papers.insert(record.paper_id.clone()) {
            return Err(Error::DuplicatePaper {
                org_id: record.org_id.clone(),
                paper_id: record.paper_id.clone(),
            });
        }
        let k = record.categories.len();
        for c in &record.categories {
            *tally
                .assignments
                .entry(c.clone())
                .or_default()
                .entry(k)
                .or_insert(0) += 1;
        }
    }

    tallies
        .into_iter()
        .map(|(org, tally)| {
            let counts = tally.assignments.into_iter().map(|(c, by_len)| {
                let value = match counting {
                    Counting::Full => by_len.values().sum::<u64>() as f64,
                    Counting::Fractional => by_len
                        .iter()
                        .map(|(&k, &papers)| papers as f64 / k as f64)
                        .sum(),
                };
                (c, value)
            });
            Ok(ResearchProfile::from_counts(org, counts)?.with_papers(tally.papers.len()))
        })
        .collect()
}

/// Result of [`filter_orgs`].
#[derive(Debug, Clone, PartialEq)]
pub struct FilterOutcome {
    pub retained: Vec<ResearchProfile>,
    pub total: usize,
    /// Retained profiles without a paper count (pre-aggregated input).
    pub unknown: usize,
}

/// Keeps organizations with at least `min_papers` distinct papers. Profiles
/// without a paper count cannot be judged and are kept.
pub fn filter_orgs(profiles: Vec<ResearchProfile>, min_papers: usize) -> Result<FilterOutcome> {
    if min_papers == 0 {
        return Err(Error::InvalidMinPapers);
    }
    let total = profiles.len();
    let mut unknown = 0;
    let retained = profiles
        .into_iter()
        .filter(|p| match p.papers {
            Some(n) => n >= min_papers,
            None => {
                unknown += 1;
                true
            }
        })
        .collect();
    Ok(FilterOutcome {
        retained,
        total,
        unknown,
    })
}

/// What to do with profile categories that the basemap lacks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OverlayPolicy {
    /// Fail, listing the missing categories.
    Error,
    /// Drop them and rescale the rest to sum to 1.
    #[default]
    DropRenormalize,
    /// Drop them and keep the original shares; the mass may fall below 1.
    DropKeep,
}

/// A profile projected onto a basemap.
#[derive(Debug, Clone, PartialEq)]
pub struct CompetenceMap<'a> {
    basemap: &'a Basemap,
    org_id: String,
    weights: Vec<f64>,
    unmapped: BTreeMap<String, f64>,
}

impl<'a> CompetenceMap<'a> {
    pub fn basemap(&self) -> &'a Basemap {
        self.basemap
    }

    pub fn org_id(&self) -> &str {
        &self.org_id
    }

    /// Weight of every basemap node, by node index; zero when inactive.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Active nodes with their weights, in basemap order.
    pub fn node_weights(&self) -> impl Iterator<Item = (&'a str, f64)> + '_ {
        let bm = self.basemap;
        self.weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(move |(i, &w)| (bm.name(i), w))
    }

    /// Profile categories absent from the basemap, with their original
    /// shares.
    pub fn unmapped(&self) -> &BTreeMap<String, f64> {
        &self.unmapped
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

pub fn overlay<'a>(
    profile: &ResearchProfile,
    bm: &'a Basemap,
    policy: OverlayPolicy,
) -> Result<CompetenceMap<'a>> {
    let mut weights = alloc::vec![0.0; bm.node_count()];
    let mut unmapped = BTreeMap::new();
    for (category, &share) in &profile.shares {
        match bm.index_of(category) {
            Some(i) => weights[i] = share,
            None => {
                unmapped.insert(category.clone(), share);
            }
        }
    }
    if !unmapped.is_empty() {
        match policy {
            OverlayPolicy::Error => {
                return Err(Error::Unmapped {
                    org_id: profile.org_id.clone(),
                    categories: unmapped.keys().cloned().collect(),
                })
            }
            OverlayPolicy::DropRenormalize => {
                let mass: f64 = weights.iter().sum();
                if mass <= 0.0 {
                    return Err(Error::NothingMapped(profile.org_id.clone()));
                }
                for w in &mut weights {
                    *w /= mass;
                }
            }
            OverlayPolicy::DropKeep => {}
        }
    }
    Ok(CompetenceMap {
        basemap: bm,
        org_id: profile.org_id.to_string(),
        weights,
        unmapped,
    })
}

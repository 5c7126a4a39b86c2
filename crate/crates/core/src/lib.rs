//! Diversity and polarization of research portfolios.
//!
//! A portfolio is a distribution of publication activity over subject
//! categories (SCs). Projected onto a similarity network of SCs (the
//! basemap), it is scored with the generalized Stirling index
//! `Σ_{i≠j} d_ij p_i p_j` under three choices of `d`: cosine distance,
//! hop count of the shortest path, and the summed cosine distance along the
//! lightest path.
//!
//! The crate is `no_std` and only needs an allocator. File formats, the
//! command-line front end and map export live in the `divmap` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod basemap;
pub mod distance;
pub mod diversity;
mod error;
pub mod profile;
pub mod ranking;
pub mod render;
pub mod synth;

pub use basemap::{
    build_basemap, cosine_similarity, Basemap, BasemapBuilder, CitationMatrix, Edge,
};
pub use distance::{
    cosine_distance_matrix, distance_matrix, path_length_distribution, unweighted_path_matrix,
    weighted_path_matrix, Binning, DisconnectedFill, DistanceMatrix, Fill, Histogram, Metric,
};
pub use diversity::{
    diversity_report, stirling, stirling_map, stirling_uniform, DiversityReport, DiversityScore,
    ReportOptions, ReportRow,
};
pub use error::{Error, Result};
pub use profile::{
    aggregate_profiles, filter_orgs, overlay, CompetenceMap, Counting, FilterOutcome,
    OverlayPolicy, PaperRecord, ResearchProfile,
};
pub use ranking::{assign_ranks, rank_deltas, spearman, RankColumn, RankTable};
pub use render::{layout_fr, LayoutCoords, NodeStyle};
pub use synth::{gen_basemap_path, gen_profile, PortfolioKind, SynthSpec};

/// Similarity cutoff used for the reference basemap.
pub const DEFAULT_THRESHOLD: f64 = 0.15;

use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T, E = Error> = core::result::Result<T, E>;

fn join(items: &[String]) -> String {
    items.join(", ")
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("citation matrix is not square: {rows} rows, {cols} columns")]
    NotSquare { rows: usize, cols: usize },
    #[error("duplicate subject category `{0}`")]
    DuplicateCategory(String),
    #[error("invalid citation count {value} at ({row}, {col})")]
    InvalidCount {
        row: String,
        col: String,
        value: f64,
    },
    #[error("similarity undefined: all-zero citation vector for {}", join(.0))]
    ZeroVector(Vec<String>),
    #[error("threshold {0} outside [0, 1]")]
    InvalidThreshold(f64),

    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("duplicate edge {0} -- {1}")]
    DuplicateEdge(String, String),
    #[error("similarity {value} of edge {a} -- {b} outside (0, 1]")]
    SimilarityOutOfRange { a: String, b: String, value: f64 },
    #[error("similarity {value} of edge {a} -- {b} is below the threshold {threshold}")]
    BelowThreshold {
        a: String,
        b: String,
        value: f64,
        threshold: f64,
    },
    #[error("unknown subject category `{0}`")]
    UnknownCategory(String),

    #[error("no publication records")]
    NoRecords,
    #[error("paper `{0}` has no subject categories")]
    EmptyCategoryList(String),
    #[error("paper `{paper_id}` lists `{category}` twice")]
    RepeatedCategory { paper_id: String, category: String },
    #[error("paper `{paper_id}` appears twice for organization `{org_id}`")]
    DuplicatePaper { org_id: String, paper_id: String },
    #[error("profile of `{0}` has no positive counts")]
    EmptyProfile(String),
    #[error("minimum paper count must be at least 1")]
    InvalidMinPapers,
    #[error("`{org_id}`: categories missing from the basemap: {}", join(.categories))]
    Unmapped {
        org_id: String,
        categories: Vec<String>,
    },
    #[error("`{0}`: no category of the profile is on the basemap")]
    NothingMapped(String),

    #[error("disconnected-pair distance {0} must be finite and non-negative")]
    InvalidFill(f64),
    #[error("invalid distance {value} between {a} and {b}")]
    InvalidDistance { a: String, b: String, value: f64 },
    #[error("bin width {0} must be finite and positive")]
    InvalidBinWidth(f64),

    #[error("share of `{category}` is {value}; shares must be finite and non-negative")]
    InvalidShare { category: String, value: f64 },
    #[error("shares sum to {0}, expected at most 1")]
    ShareMassExceeded(f64),
    #[error("`{0}` is not indexed by the distance matrix")]
    NotInMatrix(String),
    #[error("distance matrix was not computed on this basemap")]
    MatrixMismatch,
    #[error("at least one active category is required")]
    NoActiveCategories,

    #[error("no scores to rank")]
    NoScores,
    #[error("score of `{0}` is not finite")]
    NonFiniteScore(String),
    #[error("rank vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("rank correlation needs at least two pairs, got {0}")]
    TooFewPairs(usize),
    #[error("rank correlation undefined: a ranking has zero variance")]
    ZeroVariance,
    #[error("variant `{0}` is not in the rank table")]
    MissingVariant(&'static str),
    #[error("duplicate variant `{0}` in the rank table")]
    DuplicateVariant(&'static str),

    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(&'static str),
    #[error(
        "cannot place {wanted} active categories: largest connected component has {capacity} nodes"
    )]
    InfeasiblePlacement { wanted: usize, capacity: usize },

    #[error("layout needs at least one iteration")]
    ZeroIterations,
}

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VakError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("constraint system is infeasible")]
    InfeasibleSystem,
    #[error("not a cone: {0}")]
    NotACone(String),
    #[error("set is empty")]
    EmptySet,
    #[error("scale budget exceeded: {0}")]
    ScaleExceeded(String),
    #[error("cone has no nonzero directions")]
    EmptyCone,
    #[error("rank deficient: {0}")]
    RankDeficient(String),
    #[error("chord endpoints coincide")]
    DegenerateChord,
    #[error("division by a value of magnitude below 1e-12")]
    DivisionByZero,
    #[error("point is not on the graph")]
    PointNotOnGraph,
    #[error("fixed-point forms disagree: {0}")]
    FormsDisagree(String),
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error("unsupported restriction set: {0}")]
    UnsupportedRestrictionSet(String),
    #[error("intermediate set is unbounded")]
    UnboundedIntermediate,
    #[error("decomposition set is unbounded")]
    UnboundedDecomposition,
    #[error("schema violation: {}", .0.iter().map(|(p, m)| format!("{p}: {m}")).collect::<Vec<_>>().join("; "))]
    SchemaViolation(Vec<(String, String)>),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("ambient dimension {0} is too high for plotting")]
    DimensionTooHigh(usize),
    #[error("tangent cone is not convex")]
    NonconvexTangent,
    #[error("point lies outside the chart's validity region")]
    OutsideValidityRegion,
}

impl VakError {
    /// Stable machine-readable code used in serialized reports.
    pub fn code(&self) -> &'static str {
        match self {
            VakError::DimensionMismatch(_) => "DimensionMismatch",
            VakError::InfeasibleSystem => "InfeasibleSystem",
            VakError::NotACone(_) => "NotACone",
            VakError::EmptySet => "EmptySet",
            VakError::ScaleExceeded(_) => "ScaleExceeded",
            VakError::EmptyCone => "EmptyCone",
            VakError::RankDeficient(_) => "RankDeficient",
            VakError::DegenerateChord => "DegenerateChord",
            VakError::DivisionByZero => "DivisionByZero",
            VakError::PointNotOnGraph => "PointNotOnGraph",
            VakError::FormsDisagree(_) => "FormsDisagree",
            VakError::InsufficientSamples(_) => "InsufficientSamples",
            VakError::UnsupportedRestrictionSet(_) => "UnsupportedRestrictionSet",
            VakError::UnboundedIntermediate => "UnboundedIntermediate",
            VakError::UnboundedDecomposition => "UnboundedDecomposition",
            VakError::SchemaViolation(_) => "SchemaViolation",
            VakError::Parse(_) => "Parse",
            VakError::DimensionTooHigh(_) => "DimensionTooHigh",
            VakError::NonconvexTangent => "NonconvexTangent",
            VakError::OutsideValidityRegion => "OutsideValidityRegion",
        }
    }
}

pub type Result<T> = std::result::Result<T, VakError>;

pub(crate) fn dim_err(what: &str, expected: usize, got: usize) -> VakError {
    VakError::DimensionMismatch(format!("{what}: expected {expected}, got {got}"))
}

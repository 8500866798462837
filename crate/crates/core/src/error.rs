use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("site coordinate {coord:?} out of range for linear size {size}")]
    CoordinateOutOfRange { coord: Vec<usize>, size: usize },

    #[error("site index {index} out of range for a lattice of {sites} sites")]
    SiteOutOfRange { index: usize, sites: usize },

    #[error("region must not be empty")]
    EmptyRegion,

    #[error("no region has a non-empty exterior B (lattice too small for range {range})")]
    EmptyRegionSet { range: usize },

    #[error("operator dimension {requested} exceeds the dense cap of {cap}")]
    DimensionCap { requested: usize, cap: usize },

    #[error("supports overlap on {0}")]
    OverlappingSupport(String),

    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("operator is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not positive semidefinite (minimum eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("state is not normalized (trace {trace:.12})")]
    NotNormalized { trace: f64 },

    #[error("state is not pure (purity {purity:.12})")]
    NotPure { purity: f64 },

    #[error("Kraus family is not trace preserving (deviation {deviation:.3e})")]
    NotTracePreserving { deviation: f64 },

    #[error("operator is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("channel is not a QCA: {0}")]
    NotQca(String),

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("every sampled product state was annihilated by the projectors ({attempts} attempts)")]
    ProjectionFailed { attempts: usize },

    #[error("tensor network is malformed: {0}")]
    MalformedNetwork(String),

    #[error("classification violates the class inclusions: {0}")]
    Inconsistent(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable code, used by the CLI on failure.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidLattice(_) => "invalid_lattice",
            Error::CoordinateOutOfRange { .. } | Error::SiteOutOfRange { .. } => "site_out_of_range",
            Error::EmptyRegion => "empty_region",
            Error::EmptyRegionSet { .. } => "empty_region_set",
            Error::DimensionCap { .. } => "dimension_cap",
            Error::OverlappingSupport(_) => "overlapping_support",
            Error::SupportMismatch(_) => "support_mismatch",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NotPositive { .. } => "not_positive",
            Error::NotNormalized { .. } => "not_normalized",
            Error::NotPure { .. } => "not_pure",
            Error::NotTracePreserving { .. } => "not_trace_preserving",
            Error::NotUnitary { .. } => "not_unitary",
            Error::NotQca(_) => "not_qca",
            Error::InvalidWeights(_) => "invalid_weights",
            Error::Unsupported(_) => "unsupported",
            Error::ProjectionFailed { .. } => "projection_failed",
            Error::MalformedNetwork(_) => "malformed_network",
            Error::Inconsistent(_) => "inconsistent",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::Json(_) => "json",
        }
    }
}

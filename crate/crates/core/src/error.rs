use thiserror::Error;

/// Errors raised by model construction, linear algebra and analysis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("chain needs at least {min} sites, got {got}")]
    TooFewSites { min: usize, got: usize },

    #[error("site {site} out of range for a chain of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("hopping/pairing term couples site {0} to itself")]
    SelfCoupling(usize),

    #[error("site ranges [{a0}, {a1}) and [{b0}, {b1}) overlap")]
    OverlappingRanges {
        a0: usize,
        a1: usize,
        b0: usize,
        b1: usize,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "ambiguous ground state: {count} single-particle energies below {threshold:e}; \
         use the empty-zero-mode policy or add a small regularizing chemical potential"
    )]
    DegenerateGroundState { count: usize, threshold: f64 },

    #[error("{source}; {hint}")]
    Remediable { source: Box<Error>, hint: String },

    #[error("invalid covariance matrix: symplectic eigenvalue {value} outside [0, 1]")]
    InvalidCovariance { value: f64 },

    #[error("lattice coordinate (ell={ell}, m={m}) outside a chain of {n_sites} sites")]
    CoordOutOfRange { ell: usize, m: usize, n_sites: usize },

    #[error("invalid regions: {0}")]
    InvalidRegions(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("oracle limited to {max} sites, got {got}")]
    OracleTooLarge { max: usize, got: usize },

    #[error("many-body spectrum limited to {max} sites, got {got}")]
    SpectrumTooLarge { max: usize, got: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input or
    /// configuration).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::DegenerateGroundState { .. } | Error::InvalidCovariance { .. } | Error::Fit(_)
        ) || matches!(self, Error::Remediable { source, .. } if source.is_numeric())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    /// The closed form assumes four distinct characteristic roots; nearly
    /// coincident roots make every residue weight blow up.
    #[error(
        "characteristic roots too close (relative gap {gap:.3e} < {threshold:.3e}); \
         the closed form assumes distinct roots"
    )]
    DegenerateSpectrum { gap: f64, threshold: f64 },

    #[error("evaluation point coincides with the point-source singularity")]
    OriginSingularity,

    #[error("point coordinates must be finite")]
    NonFinitePoint,

    #[error("symbol matrix is singular at quadrature node {node} (alpha = {alpha:.6e} rad)")]
    SingularNode { node: usize, alpha: f64 },

    #[error("angular quadrature needs an even node count of at least 8, got {0}")]
    InvalidNodeCount(usize),

    #[error("evaluation point {point_index} coincides with source {source_index}")]
    PointOnSource {
        point_index: usize,
        source_index: usize,
    },

    #[error("gradient grid needs at least 3 points per axis, got {nx}x{ny}x{nz}")]
    GridTooSmall { nx: usize, ny: usize, nz: usize },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("operation is defined for vanishing piezoelectric constants only; {0}")]
    PiezoelectricCoupling(String),

    #[error("elastic characteristic roots are not real, positive and distinct: {0}")]
    ElasticRoots(String),

    /// An internal cross-check failed (lost realness, lost symmetry, or an
    /// evaluation path used outside its domain). Indicates a bug or a material
    /// outside the supported class, never a rounding hiccup.
    #[error("internal consistency: {0}")]
    Inconsistency(String),

    #[error("point {index}: {source}")]
    AtPoint {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{origin}:{line}: {message}")]
    Parse {
        origin: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

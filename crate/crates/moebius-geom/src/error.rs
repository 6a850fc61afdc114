//! Crate-wide error type.
//!
//! Every fallible operation reports through [`GeomError`] so that evaluator
//! closures, pipeline stages, and checks compose without conversion noise.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    /// Reciprocal of a jet whose value at the expansion center is zero.
    #[error("division by zero at the expansion center")]
    DivisionByZeroAtCenter,

    /// Elementary function evaluated outside its domain at the center.
    #[error("domain error: {op} at center value {center}")]
    DomainError { op: &'static str, center: f64 },

    /// A partial derivative of degree beyond the truncation order was requested.
    #[error("order exceeded: degree {requested} requested from an order-{order} jet")]
    OrderExceeded { requested: usize, order: usize },

    /// Operands live in jet spaces of different variable counts.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    /// The differential of the immersion is not injective at the point.
    #[error("jacobian rank deficient: rank {rank}, need {needed}")]
    JacobianRankDeficient { rank: usize, needed: usize },

    /// The conformal factor vanishes: the point is umbilic and the Moebius
    /// metric degenerates there.
    #[error("umbilic point: phi^2 = {phi_sq:e} below threshold {threshold:e}")]
    UmbilicPoint { phi_sq: f64, threshold: f64 },

    /// A metric that must be positive definite is numerically singular.
    #[error("metric degenerate: smallest eigenvalue {min_eigenvalue:e}")]
    MetricDegenerate { min_eigenvalue: f64 },

    /// No principal-curvature cluster of the required multiplicity exists.
    #[error("no principal curvature of multiplicity {needed}: multiplicities {found:?}")]
    NoMultiplicityN2 { needed: usize, found: Vec<usize> },

    /// Several eigenvalue clusterings of the required multiplicity are
    /// consistent with the tolerance.
    #[error("ambiguous eigenvalue clustering: {candidates} candidate clusters")]
    AmbiguousClustering { candidates: usize },

    /// An inversion center lies on (or too close to) the image of the patch.
    #[error("inversion center on image: squared distance {dist_sq:e}")]
    InversionCenterOnImage { dist_sq: f64 },

    /// The rank of the sphere congruence is not constant over the grid.
    #[error("mixed congruence rank over grid: {ranks:?}")]
    MixedRank { ranks: Vec<usize> },

    /// A quotient-surface construction requires congruence rank two.
    #[error("congruence rank is {rank}, need 2")]
    RankNotTwo { rank: usize },

    /// The cross-section is tangent to the kernel distribution.
    #[error("section tangent to the kernel distribution: projected rank {projected_rank}")]
    SectionTangentToDelta { projected_rank: usize },

    /// The induced metric of the quotient surface is degenerate or indefinite.
    #[error("degenerate induced metric: eigenvalues {eigenvalues:?}")]
    DegenerateInducedMetric { eigenvalues: Vec<f64> },

    /// A chart is evaluated at or beyond its coordinate singularity.
    #[error("chart singularity: {what} = {value}")]
    ChartSingularity { what: &'static str, value: f64 },

    /// Gram-Schmidt seeds became linearly dependent with the tangent frame.
    #[error("frame degenerate: residual norm {residual:e}")]
    FrameDegenerate { residual: f64 },

    /// Two immersions that must induce the same Moebius metric do not.
    #[error("moebius metrics differ: relative gap {rel_gap:e}")]
    MetricMismatch { rel_gap: f64 },

    /// Two metrics that must be conformal are not proportional.
    #[error("metrics not conformal: relative gap {rel_gap:e}")]
    MetricNotConformal { rel_gap: f64 },
}

impl GeomError {
    /// Stable variant name, for structured reports.
    pub fn name(&self) -> &'static str {
        match self {
            GeomError::DivisionByZeroAtCenter => "DivisionByZeroAtCenter",
            GeomError::DomainError { .. } => "DomainError",
            GeomError::OrderExceeded { .. } => "OrderExceeded",
            GeomError::DimMismatch { .. } => "DimMismatch",
            GeomError::JacobianRankDeficient { .. } => "JacobianRankDeficient",
            GeomError::UmbilicPoint { .. } => "UmbilicPoint",
            GeomError::MetricDegenerate { .. } => "MetricDegenerate",
            GeomError::NoMultiplicityN2 { .. } => "NoMultiplicityN2",
            GeomError::AmbiguousClustering { .. } => "AmbiguousClustering",
            GeomError::InversionCenterOnImage { .. } => "InversionCenterOnImage",
            GeomError::MixedRank { .. } => "MixedRank",
            GeomError::RankNotTwo { .. } => "RankNotTwo",
            GeomError::SectionTangentToDelta { .. } => "SectionTangentToDelta",
            GeomError::DegenerateInducedMetric { .. } => "DegenerateInducedMetric",
            GeomError::ChartSingularity { .. } => "ChartSingularity",
            GeomError::FrameDegenerate { .. } => "FrameDegenerate",
            GeomError::MetricMismatch { .. } => "MetricMismatch",
            GeomError::MetricNotConformal { .. } => "MetricNotConformal",
        }
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;

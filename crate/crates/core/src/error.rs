use thiserror::Error;

use crate::linalg::Vec3;

/// Errors raised by the geometric routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("point {0:?} lies outside the chart domain")]
    PointOutsideDomain([f64; 3]),

    #[error("metric is singular or not positive definite at {0:?}")]
    SingularMetric([f64; 3]),

    #[error("vectors span a degenerate plane (normalized Gram determinant {0:e})")]
    DegeneratePlane(f64),

    #[error("closed-form solution passes through a chart singularity at parameter {0}")]
    ChartSingularity(f64),

    #[error("integration left the chart domain at parameter {parameter}")]
    LeftChartDomain { parameter: f64 },

    #[error("base curve is not regular at u = {0}")]
    IrregularBaseCurve(f64),

    #[error("ruling field vanishes at u = {0}")]
    VanishingRuling(f64),

    #[error("X_u and X_v are linearly dependent at (u, v) = ({u}, {v})")]
    RankDeficientPlane { u: f64, v: f64 },

    #[error("ruling field is not in general position at u = {u} (kappa1 = {kappa1:e})")]
    NotGeneralPosition { u: f64, kappa1: f64 },

    #[error("prescribed first Sannia curvature is not positive at u = {u} (kappa1 = {kappa1})")]
    NonPositiveKappa1 { u: f64, kappa1: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parameter {0} lies outside the admissible interval")]
    ParameterOutOfRange(f64),
}

impl GeometryError {
    pub(crate) fn outside(p: &Vec3) -> Self {
        GeometryError::PointOutsideDomain([p.x, p.y, p.z])
    }
}

pub type Result<T> = std::result::Result<T, GeometryError>;

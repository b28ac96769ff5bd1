//! Ruled surfaces in Riemannian 3-manifolds: geodesic rulings, Jacobi fields,
//! Sannia invariants, reconstruction from invariants and striction curves.
//!
//! Everything is computed in a single chart. A surface is given by a
//! [`ChartMetric`], a base curve and a ruling field ([`RuledSurfaceSpec`]);
//! rulings are integrated together with the Jacobi field `X_u` they carry.

// Tensor code indexes by component; `!(x > 0.0)` is used to reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod export;
pub mod geodesic;
pub mod linalg;
pub mod manifold;
pub mod numeric;
pub mod ode;
pub mod oracles;
pub mod reconstruction;
pub mod ruled_surface;
pub mod sannia;
pub mod striction;
pub mod surfaces;
pub mod verify;

pub use error::{GeometryError, Result};
pub use geodesic::{GeodesicState, JacobiState, SampledGeodesic};
pub use linalg::{Mat3, Vec3};
pub use manifold::{ChartMetric, ChartPoint, CurvatureTag, MetricField, Profile, TangentVec};
pub use numeric::Grid;
pub use reconstruction::{InvariantPrescription, ReconstructedSurface};
pub use ruled_surface::{BaseData, BaseProvider, CurvatureReport, CurveFn, RuledSurfaceSpec, SurfaceGrid, SurfaceJet};
pub use sannia::{InvariantTable, SanniaFrame, SanniaInvariants};
pub use striction::{JacobiEvolutionSample, RulingVerdict, SpaceFormVerdict, StrictionBranch, StrictionResult};
pub use surfaces::{CurvePreset, MetricPreset, RulingPreset, SurfacePreset};

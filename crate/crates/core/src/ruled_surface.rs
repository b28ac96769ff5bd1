//! Ruled surfaces `X(u, v) = exp_{α(u)}(v Z(u))`.
//!
//! `X_v` is the geodesic velocity and `X_u` is the Jacobi field along each ruling
//! with `X_u(u, 0) = α'(u)` and `∇_{X_v}X_u(u, 0) = ∇_{α'}Z(u)`. Both come from a
//! single integration of the joint geodesic/Jacobi system per ruling.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{GeometryError, Result};
use crate::geodesic::{jacobi_trajectory, pack_jacobi, DEFAULT_STEP};
use crate::linalg::{vec_from_slice, Vec3};
use crate::manifold::{ChartMetric, EPS_LIN};
use crate::ode::{rk4_step, Trajectory};

/// Regularity threshold for `|α'|`, `|Z|` and `|∇_{X_u}X_v|`.
pub const EPS_REG: f64 = 1e-8;

/// Step of the central difference used when a curve has no exact derivative.
pub const CURVE_FD_STEP: f64 = 1e-5;

type Curve = Arc<dyn Fn(f64) -> Vec3 + Send + Sync>;

/// A chart-valued function of `u` with an optional exact derivative.
#[derive(Clone)]
pub struct CurveFn {
    value: Curve,
    derivative: Option<Curve>,
}

impl CurveFn {
    pub fn new(f: impl Fn(f64) -> Vec3 + Send + Sync + 'static) -> Self {
        CurveFn { value: Arc::new(f), derivative: None }
    }

    pub fn with_derivative(
        f: impl Fn(f64) -> Vec3 + Send + Sync + 'static,
        df: impl Fn(f64) -> Vec3 + Send + Sync + 'static,
    ) -> Self {
        CurveFn { value: Arc::new(f), derivative: Some(Arc::new(df)) }
    }

    pub fn value(&self, u: f64) -> Vec3 {
        (self.value)(u)
    }

    pub fn derivative(&self, u: f64) -> Vec3 {
        match &self.derivative {
            Some(d) => d(u),
            None => (self.value(u + CURVE_FD_STEP) - self.value(u - CURVE_FD_STEP)) / (2.0 * CURVE_FD_STEP),
        }
    }
}

/// Base-curve data at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BaseData {
    pub u: f64,
    /// `α(u)`.
    pub point: Vec3,
    /// `α'(u)`.
    pub velocity: Vec3,
    /// `Z(u)`.
    pub ruling: Vec3,
    /// `∇_{α'}Z(u)`.
    pub cov_ruling: Vec3,
}

/// Supplies the base curve and ruling field of a ruled surface.
pub trait BaseProvider: Send + Sync {
    fn base(&self, metric: &ChartMetric, u: f64) -> Result<BaseData>;
}

/// Base curve and ruling field given as coordinate functions of `u`.
#[derive(Clone)]
pub struct CurveBase {
    pub alpha: CurveFn,
    pub ruling: CurveFn,
}

impl BaseProvider for CurveBase {
    fn base(&self, metric: &ChartMetric, u: f64) -> Result<BaseData> {
        let point = self.alpha.value(u);
        let velocity = self.alpha.derivative(u);
        let ruling = self.ruling.value(u);
        let cov_ruling = metric.covariant_derivative_along(&point, &velocity, &ruling, &self.ruling.derivative(u))?;
        Ok(BaseData { u, point, velocity, ruling, cov_ruling })
    }
}

/// A ruled surface: metric, base provider, parameter interval and integration step.
#[derive(Clone)]
pub struct RuledSurfaceSpec {
    pub metric: ChartMetric,
    pub base: Arc<dyn BaseProvider>,
    pub u_domain: (f64, f64),
    /// Rescale `Z` to unit length (and `∇_{α'}Z` accordingly).
    pub normalize_ruling: bool,
    /// RK4 step along the rulings.
    pub step: f64,
}

impl std::fmt::Debug for RuledSurfaceSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RuledSurfaceSpec")
            .field("metric", &self.metric)
            .field("u_domain", &self.u_domain)
            .field("normalize_ruling", &self.normalize_ruling)
            .field("step", &self.step)
            .finish()
    }
}

impl RuledSurfaceSpec {
    pub fn new(metric: ChartMetric, base: impl BaseProvider + 'static, u_domain: (f64, f64)) -> Self {
        RuledSurfaceSpec {
            metric,
            base: Arc::new(base),
            u_domain,
            normalize_ruling: false,
            step: DEFAULT_STEP,
        }
    }

    pub fn from_curves(metric: ChartMetric, alpha: CurveFn, ruling: CurveFn, u_domain: (f64, f64)) -> Self {
        Self::new(metric, CurveBase { alpha, ruling }, u_domain)
    }

    pub fn normalized(mut self, yes: bool) -> Self {
        self.normalize_ruling = yes;
        self
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = step;
        self
    }

    /// Validated base data at `u`, with the ruling normalized if requested.
    pub fn base_data(&self, u: f64) -> Result<BaseData> {
        let (a, b) = self.u_domain;
        let slack = 1e-12 * (1.0 + a.abs().max(b.abs()));
        if !(u >= a - slack && u <= b + slack) {
            return Err(GeometryError::ParameterOutOfRange(u));
        }
        let mut d = self.base.base(&self.metric, u)?;
        let c = self.metric.christoffel_at(&d.point)?;
        if !(c.norm(&d.velocity) > EPS_REG) {
            return Err(GeometryError::IrregularBaseCurve(u));
        }
        let n = c.norm(&d.ruling);
        if !(n > EPS_REG) {
            return Err(GeometryError::VanishingRuling(u));
        }
        if self.normalize_ruling {
            let dn = c.inner(&d.cov_ruling, &d.ruling) / n;
            d.cov_ruling = d.cov_ruling / n - d.ruling * (dn / (n * n));
            d.ruling /= n;
        }
        Ok(d)
    }
}

/// `X`, `X_u`, `X_v` and `∇_{X_v}X_u` at one parameter pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceJet {
    pub u: f64,
    pub v: f64,
    pub point: Vec3,
    pub xu: Vec3,
    pub xv: Vec3,
    /// `∇_{X_v}X_u = ∇_{X_u}X_v`.
    pub dxu: Vec3,
    /// Normalized Gram determinant of `(X_u, X_v)` exceeds `EPS_LIN`.
    pub rank2: bool,
}

/// One ruling integrated over `[v_min, v_max]`, able to return the jet at any
/// parameter in the achieved range.
#[derive(Debug, Clone)]
pub struct RulingSweep {
    metric: ChartMetric,
    base: BaseData,
    step: f64,
    forward: Trajectory<12>,
    backward: Trajectory<12>,
}

impl RulingSweep {
    pub fn new(spec: &RuledSurfaceSpec, u: f64, v_min: f64, v_max: f64) -> Result<Self> {
        if !(v_min <= v_max) || !v_min.is_finite() || !v_max.is_finite() {
            return Err(GeometryError::InvalidInput(format!("bad ruling range [{v_min}, {v_max}]")));
        }
        let base = spec.base_data(u)?;
        Self::from_base(&spec.metric, base, spec.step, v_min, v_max)
    }

    pub fn from_base(metric: &ChartMetric, base: BaseData, step: f64, v_min: f64, v_max: f64) -> Result<Self> {
        let y0 = pack_jacobi(&base.point, &base.ruling, &base.velocity, &base.cov_ruling);
        let forward = jacobi_trajectory(metric, y0, v_max.max(0.0), step)?;
        let backward = jacobi_trajectory(metric, y0, v_min.min(0.0), step)?;
        Ok(RulingSweep { metric: metric.clone(), base, step, forward, backward })
    }

    pub fn base(&self) -> &BaseData {
        &self.base
    }

    pub fn metric(&self) -> &ChartMetric {
        &self.metric
    }

    /// Parameter range actually covered (shorter than requested after a chart exit).
    pub fn range(&self) -> (f64, f64) {
        (self.backward.end(), self.forward.end())
    }

    /// Chart-exit parameters below and above the base, if any.
    pub fn exits(&self) -> (Option<f64>, Option<f64>) {
        (self.backward.exit, self.forward.exit)
    }

    /// Integration samples `(v, state)` in increasing `v`.
    pub fn samples(&self) -> impl Iterator<Item = (f64, &[f64; 12])> + '_ {
        let back = self.backward.params.iter().zip(&self.backward.states).skip(1).rev();
        let fwd = self.forward.params.iter().zip(&self.forward.states);
        back.chain(fwd).map(|(v, s)| (*v, s))
    }

    /// The joint state `(x, ẋ, J, DJ)` at `v`.
    pub fn state_at(&self, v: f64) -> Result<[f64; 12]> {
        let tr = if v >= 0.0 { &self.forward } else { &self.backward };
        let end = tr.end();
        if v.abs() > end.abs() {
            return Err(match tr.exit {
                Some(parameter) => GeometryError::LeftChartDomain { parameter },
                None => GeometryError::ParameterOutOfRange(v),
            });
        }
        let n = tr.params.len();
        let mut i = ((v.abs() / self.step).floor() as usize).min(n - 1);
        while i > 0 && tr.params[i].abs() > v.abs() {
            i -= 1;
        }
        if tr.params[i] == v {
            return Ok(tr.states[i]);
        }
        let metric = &self.metric;
        rk4_step(
            &|_t, y: &[f64; 12]| crate::geodesic::jacobi_rhs(metric, y),
            tr.params[i],
            &tr.states[i],
            v - tr.params[i],
        )
    }

    pub fn jet_at(&self, v: f64) -> Result<SurfaceJet> {
        let y = self.state_at(v)?;
        jet_from_state(&self.metric, self.base.u, v, &y)
    }
}

pub(crate) fn jet_from_state(metric: &ChartMetric, u: f64, v: f64, y: &[f64; 12]) -> Result<SurfaceJet> {
    let point = vec_from_slice(&y[0..3]);
    let xv = vec_from_slice(&y[3..6]);
    let xu = vec_from_slice(&y[6..9]);
    let dxu = vec_from_slice(&y[9..12]);
    let c = metric.christoffel_at(&point)?;
    let rank2 = c.normalized_gram(&xu, &xv) > EPS_LIN;
    Ok(SurfaceJet { u, v, point, xu, xv, dxu, rank2 })
}

/// The jet of the surface at `(u, v)`.
pub fn evaluate_jet(spec: &RuledSurfaceSpec, u: f64, v: f64) -> Result<SurfaceJet> {
    RulingSweep::new(spec, u, v.min(0.0), v.max(0.0))?.jet_at(v)
}

/// Curvatures, distribution parameter and angles at one point of the surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureReport {
    /// Sectional curvature of the tangent plane in the ambient metric.
    pub k_ambient: f64,
    /// Extrinsic (Gauss–Kronecker) curvature; never positive.
    pub k_ext: f64,
    /// Gauss curvature of the induced metric.
    pub k_intrinsic: f64,
    /// Extended distribution parameter, `None` where `∇_{X_u}X_v` vanishes.
    pub lambda: Option<f64>,
    /// Angle between `X_u` and `X_v`, in `[0, π]`.
    pub sigma: f64,
    /// `h(X_u, X_v)` against the unit normal making `(X_u, X_v, ξ)` positive.
    pub h_uv: f64,
}

/// Curvature report from a jet. Fails with `RankDeficientPlane` when `X_u ∥ X_v`.
pub fn curvature_from_jet(metric: &ChartMetric, jet: &SurfaceJet) -> Result<CurvatureReport> {
    if !jet.rank2 {
        return Err(GeometryError::RankDeficientPlane { u: jet.u, v: jet.v });
    }
    let t = metric.riemann_at(&jet.point)?;
    let c = &t.connection;
    let (xu, xv, dxu) = (&jet.xu, &jet.xv, &jet.dxu);
    let uu = c.inner(xu, xu);
    let vv = c.inner(xv, xv);
    let uv = c.inner(xu, xv);
    let gram = uu * vv - uv * uv;
    let vol = c.volume(xu, xv, dxu);
    let k_ambient = crate::manifold::sectional_from(&t, xu, xv)?;
    let k_ext = -(vol * vol) / (gram * gram);
    // Gauss equation with h_vv = 0, writing Riem(X_u,X_v,X_u,X_v) through the
    // Jacobi equation ∇_v∇_v X_u = R(X_v, X_u)X_v.
    let jacobi_accel = t.apply(xv, xu, xv);
    let k_intrinsic = (-c.inner(&jacobi_accel, xu) - vol * vol / gram) / gram;
    let d2 = c.inner(dxu, dxu);
    let lambda = if d2.sqrt() < EPS_REG { None } else { Some(vol / d2) };
    let sigma = (uv / (uu.sqrt() * vv.sqrt())).clamp(-1.0, 1.0).acos();
    Ok(CurvatureReport {
        k_ambient,
        k_ext,
        k_intrinsic,
        lambda,
        sigma,
        h_uv: vol / gram.sqrt(),
    })
}

pub fn curvature_report(spec: &RuledSurfaceSpec, u: f64, v: f64) -> Result<CurvatureReport> {
    let jet = evaluate_jet(spec, u, v)?;
    curvature_from_jet(&spec.metric, &jet)
}

/// `σ_q` from the constancy of `g(X_u, X_v)` along the ruling:
/// `cos σ_q = g(α', Z) / (|X_u|_q |Z|)`, which is `|α'| cos σ_p / |X_u|_q` for unit `Z`.
pub fn ruling_angle(spec: &RuledSurfaceSpec, u: f64, v: f64) -> Result<f64> {
    let sweep = RulingSweep::new(spec, u, v.min(0.0), v.max(0.0))?;
    let b = sweep.base();
    let m = &spec.metric;
    let jet = sweep.jet_at(v)?;
    let xu_norm = m.norm(&jet.point, &jet.xu)?;
    if xu_norm < EPS_REG {
        return Err(GeometryError::RankDeficientPlane { u, v });
    }
    let cos = m.inner(&b.point, &b.velocity, &b.ruling)? / (xu_norm * m.norm(&b.point, &b.ruling)?);
    Ok(cos.clamp(-1.0, 1.0).acos())
}

/// Jets on a tensor grid; `None` where the ruling left the chart before reaching `v`.
#[derive(Debug, Clone)]
pub struct SurfaceGrid {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    /// Indexed `[i][j]` for `(u[i], v[j])`.
    pub jets: Vec<Vec<Option<SurfaceJet>>>,
}

/// Samples the surface on `us × vs`, one ruling sweep per `u`, in parallel.
pub fn sample_surface(spec: &RuledSurfaceSpec, us: &[f64], vs: &[f64]) -> Result<SurfaceGrid> {
    let lo = vs.iter().cloned().fold(0.0, f64::min);
    let hi = vs.iter().cloned().fold(0.0, f64::max);
    let jets = us
        .par_iter()
        .map(|&u| {
            let sweep = RulingSweep::new(spec, u, lo, hi)?;
            vs.iter()
                .map(|&v| match sweep.jet_at(v) {
                    Ok(j) => Ok(Some(j)),
                    Err(GeometryError::LeftChartDomain { .. }) => Ok(None),
                    Err(e) => Err(e),
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SurfaceGrid { u: us.to_vec(), v: vs.to_vec(), jets })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::Profile;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn helicoid() -> RuledSurfaceSpec {
        RuledSurfaceSpec::from_curves(
            ChartMetric::euclidean(),
            CurveFn::with_derivative(|u| Vec3::new(0.0, 0.0, u), |_| Vec3::z()),
            CurveFn::with_derivative(|u| Vec3::new(u.cos(), u.sin(), 0.0), |u| Vec3::new(-u.sin(), u.cos(), 0.0)),
            (-PI, PI),
        )
    }

    #[test]
    fn jet_at_base_is_initial_data() {
        let s = helicoid();
        let j = evaluate_jet(&s, 0.3, 0.0).unwrap();
        assert_eq!(j.point, Vec3::new(0.0, 0.0, 0.3));
        assert_eq!(j.xu, Vec3::z());
        assert_eq!(j.xv, Vec3::new(0.3f64.cos(), 0.3f64.sin(), 0.0));
    }

    #[test]
    fn helicoid_jets_match_explicit_parametrization() {
        let s = helicoid();
        for &(u, v) in &[(0.0, 1.0), (0.7, -2.0), (-2.0, 2.5)] {
            let j = evaluate_jet(&s, u, v).unwrap();
            let (su, cu) = f64::sin_cos(u);
            assert!((j.point - Vec3::new(v * cu, v * su, u)).norm() < 1e-12);
            assert!((j.xu - Vec3::new(-v * su, v * cu, 1.0)).norm() < 1e-12);
            assert!((j.dxu - Vec3::new(-su, cu, 0.0)).norm() < 1e-12);
            assert!(j.rank2);
        }
    }

    #[test]
    fn numeric_derivatives_of_curves() {
        let f = CurveFn::new(|u| Vec3::new(u.sin(), u * u, 1.0));
        let d = f.derivative(0.4);
        assert!((d - Vec3::new(0.4f64.cos(), 0.8, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn sweep_matches_direct_jets() {
        let s = RuledSurfaceSpec::from_curves(
            ChartMetric::product_revolution(Profile::sin_plus(2.0)),
            CurveFn::new(|u| Vec3::new(0.1 * u, u, 0.3)),
            CurveFn::new(|u| Vec3::new(1.0, 0.2 * u.cos(), 0.5)),
            (0.0, 1.0),
        )
        .normalized(true);
        let sweep = RulingSweep::new(&s, 0.4, -1.0, 2.0).unwrap();
        for v in [-1.0, -0.3337, 0.0, 0.5, 1.23456, 2.0] {
            assert_eq!(sweep.jet_at(v).unwrap(), evaluate_jet(&s, 0.4, v).unwrap());
        }
        assert!(sweep.jet_at(2.5).is_err());
        let vs: Vec<f64> = sweep.samples().map(|(v, _)| v).collect();
        assert!(vs.windows(2).all(|w| w[0] < w[1]));
        assert_eq!((vs[0], *vs.last().unwrap()), (-1.0, 2.0));
    }

    #[test]
    fn normalization_scales_covariant_derivative() {
        let raw = RuledSurfaceSpec::from_curves(
            ChartMetric::euclidean(),
            CurveFn::new(|u| Vec3::new(u, 0.0, 0.0)),
            CurveFn::new(|u| Vec3::new(0.0, 2.0 + u, 1.0)),
            (0.0, 1.0),
        );
        let unit = raw.clone().normalized(true);
        let d = unit.base_data(0.5).unwrap();
        let z = |u: f64| Vec3::new(0.0, 2.0 + u, 1.0).normalize();
        let expect = (z(0.5 + 1e-6) - z(0.5 - 1e-6)) / 2e-6;
        assert!((d.cov_ruling - expect).norm() < 1e-9);
        assert!((d.ruling.norm() - 1.0).abs() < 1e-15);
        assert_eq!(raw.base_data(0.5).unwrap().ruling, Vec3::new(0.0, 2.5, 1.0));
    }

    #[test]
    fn base_validation_errors() {
        let s = RuledSurfaceSpec::from_curves(
            ChartMetric::euclidean(),
            CurveFn::new(|u| Vec3::new(u * u, 0.0, 0.0)),
            CurveFn::new(|u| Vec3::new(0.0, u, 0.0)),
            (-1.0, 1.0),
        );
        assert!(matches!(s.base_data(0.0), Err(GeometryError::IrregularBaseCurve(_))));
        assert!(matches!(s.base_data(2.0), Err(GeometryError::ParameterOutOfRange(_))));
        let t = RuledSurfaceSpec::from_curves(
            ChartMetric::euclidean(),
            CurveFn::new(|u| Vec3::new(u, 0.0, 0.0)),
            CurveFn::new(|u| Vec3::new(0.0, u, 0.0)),
            (-1.0, 1.0),
        );
        assert!(matches!(t.base_data(0.0), Err(GeometryError::VanishingRuling(_))));
    }

    #[test]
    fn trivially_ruled_plane() {
        let s = RuledSurfaceSpec::from_curves(
            ChartMetric::euclidean(),
            CurveFn::new(|u| Vec3::new(u, 0.0, 0.0)),
            CurveFn::new(|_| Vec3::y()),
            (-1.0, 1.0),
        );
        let r = curvature_report(&s, 0.2, 0.7).unwrap();
        assert_eq!((r.k_ambient, r.k_ext, r.k_intrinsic), (0.0, 0.0, 0.0));
        assert!(r.lambda.is_none());
        assert!((r.sigma - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn helicoid_curvature() {
        let s = helicoid();
        for v in [0.0, 0.5, -1.5] {
            let r = curvature_report(&s, 0.4, v).unwrap();
            let expect = -1.0 / (1.0f64 + v * v).powi(2);
            assert!((r.k_ext - expect).abs() < 1e-12);
            assert!((r.k_intrinsic - expect).abs() < 1e-12);
            assert!((r.lambda.unwrap() - 1.0).abs() < 1e-12);
            assert!((r.h_uv.abs() - 1.0 / (1.0f64 + v * v).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_deficient_tangent_surface() {
        let s = RuledSurfaceSpec::from_curves(
            ChartMetric::euclidean(),
            CurveFn::new(|u| Vec3::new(u.cos(), u.sin(), 0.0)),
            CurveFn::new(|u| Vec3::new(-u.sin(), u.cos(), 0.0)),
            (-1.0, 1.0),
        );
        let j = evaluate_jet(&s, 0.0, 0.0).unwrap();
        assert!(!j.rank2);
        assert!(matches!(curvature_report(&s, 0.0, 0.0), Err(GeometryError::RankDeficientPlane { .. })));
        assert!(ruling_angle(&s, 0.0, 0.0).unwrap().abs() < 1e-7);
    }

    #[test]
    fn orthogonal_rulings_stay_orthogonal() {
        let s = helicoid();
        for v in [0.0, 1.0, 2.5] {
            assert!((ruling_angle(&s, 0.3, v).unwrap() - FRAC_PI_2).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_marks_chart_exits() {
        let s = RuledSurfaceSpec::from_curves(
            ChartMetric::half_space(-1.0),
            CurveFn::new(|u| Vec3::new(u, 0.0, 1.0)),
            CurveFn::new(|_| Vec3::new(0.0, 0.0, -1.0)),
            (0.0, 1.0),
        );
        // Vertical rulings stay in the chart for every v; this grid is complete.
        let g = sample_surface(&s, &[0.0, 0.5, 1.0], &[-1.0, 0.0, 3.0]).unwrap();
        assert!(g.jets.iter().flatten().all(|j| j.is_some()));
        let clipped = ChartMetric::from_fn(|p| crate::linalg::Mat3::identity() / (p.z * p.z), |p| p.z > 0.5, "clipped");
        let s2 = RuledSurfaceSpec { metric: clipped, ..s };
        let g2 = sample_surface(&s2, &[0.0], &[0.0, 0.5, 1.0]).unwrap();
        assert!(g2.jets[0][0].is_some() && g2.jets[0][1].is_some() && g2.jets[0][2].is_none());
    }
}

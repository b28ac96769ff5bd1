//! Geodesics (the exponential map), parallel transport and Jacobi fields.
//!
//! Everything is integrated with fixed-step RK4 in the affine parameter. Jacobi
//! fields are carried as `(J, ∇_{γ'}J)` and integrated together with the
//! geodesic as a single 12-dimensional system so the curvature tensor is always
//! evaluated on the same trajectory.

use crate::error::{GeometryError, Result};
use crate::linalg::{put, vec_from_slice, Vec3};
use crate::manifold::ChartMetric;
use crate::ode::{integrate, Trajectory};

/// Default affine-parameter step.
pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicState {
    pub x: Vec3,
    pub v: Vec3,
    /// Affine parameter.
    pub arc: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiState {
    pub geodesic: GeodesicState,
    /// Field components.
    pub j: Vec3,
    /// Components of `∇_{γ'} J`.
    pub dj: Vec3,
}

/// A geodesic sampled at multiples of `step` from its initial point.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGeodesic {
    pub samples: Vec<GeodesicState>,
    pub step: f64,
    /// Parameter at which the geodesic left the chart.
    pub exit: Option<f64>,
}

impl SampledGeodesic {
    pub fn start(&self) -> &GeodesicState {
        &self.samples[0]
    }

    pub fn end(&self) -> &GeodesicState {
        self.samples.last().expect("a sampled geodesic has at least its initial state")
    }
}

pub(crate) fn geodesic_rhs(m: &ChartMetric, y: &[f64; 6]) -> Result<[f64; 6]> {
    let x = vec_from_slice(&y[0..3]);
    let v = vec_from_slice(&y[3..6]);
    let c = m.christoffel_at(&x)?;
    let a = -c.contract(&v, &v);
    let mut out = [0.0; 6];
    put(&mut out[0..3], &v);
    put(&mut out[3..6], &a);
    Ok(out)
}

/// Right-hand side of the joint geodesic + Jacobi system `(x, ẋ, J, DJ)`.
pub(crate) fn jacobi_rhs(m: &ChartMetric, y: &[f64; 12]) -> Result<[f64; 12]> {
    let x = vec_from_slice(&y[0..3]);
    let v = vec_from_slice(&y[3..6]);
    let j = vec_from_slice(&y[6..9]);
    let dj = vec_from_slice(&y[9..12]);
    let t = m.riemann_at(&x)?;
    let c = &t.connection;
    let accel = -c.contract(&v, &v);
    let dj_coord = dj - c.contract(&v, &j);
    // ∇∇J = −R(J, γ')γ'
    let ddj = -t.apply(&j, &v, &v) - c.contract(&v, &dj);
    let mut out = [0.0; 12];
    put(&mut out[0..3], &v);
    put(&mut out[3..6], &accel);
    put(&mut out[6..9], &dj_coord);
    put(&mut out[9..12], &ddj);
    Ok(out)
}

pub(crate) fn jacobi_state_from(arc: f64, y: &[f64; 12]) -> JacobiState {
    JacobiState {
        geodesic: GeodesicState {
            x: vec_from_slice(&y[0..3]),
            v: vec_from_slice(&y[3..6]),
            arc,
        },
        j: vec_from_slice(&y[6..9]),
        dj: vec_from_slice(&y[9..12]),
    }
}

pub(crate) fn pack_jacobi(x: &Vec3, v: &Vec3, j: &Vec3, dj: &Vec3) -> [f64; 12] {
    let mut y = [0.0; 12];
    put(&mut y[0..3], x);
    put(&mut y[3..6], v);
    put(&mut y[6..9], j);
    put(&mut y[9..12], dj);
    y
}

/// Integrates the joint Jacobi system from `arc = 0` to `arc = v_end`.
pub(crate) fn jacobi_trajectory(
    m: &ChartMetric,
    y0: [f64; 12],
    v_end: f64,
    step: f64,
) -> Result<Trajectory<12>> {
    integrate(
        |_t, y| jacobi_rhs(m, y),
        |y| m.contains(&vec_from_slice(&y[0..3])),
        0.0,
        y0,
        v_end,
        step,
    )
}

/// `γ(v) = exp_p(v Z)` sampled at multiples of `step` up to `v_max`
/// (negative `v_max` integrates backwards).
///
/// Leaving the chart is not an error: the returned geodesic is truncated and
/// `exit` holds the bisected exit parameter.
pub fn exp_map(m: &ChartMetric, p: &Vec3, z: &Vec3, v_max: f64, step: f64) -> Result<SampledGeodesic> {
    if !m.contains(p) {
        return Err(GeometryError::outside(p));
    }
    let mut y0 = [0.0; 6];
    put(&mut y0[0..3], p);
    put(&mut y0[3..6], z);
    let tr = integrate(
        |_t, y| geodesic_rhs(m, y),
        |y| m.contains(&vec_from_slice(&y[0..3])),
        0.0,
        y0,
        v_max,
        step,
    )?;
    let samples = tr
        .params
        .iter()
        .zip(&tr.states)
        .map(|(arc, y)| GeodesicState {
            x: vec_from_slice(&y[0..3]),
            v: vec_from_slice(&y[3..6]),
            arc: *arc,
        })
        .collect();
    Ok(SampledGeodesic { samples, step, exit: tr.exit })
}

fn transport_rhs(m: &ChartMetric, y: &[f64; 9]) -> Result<[f64; 9]> {
    let x = vec_from_slice(&y[0..3]);
    let v = vec_from_slice(&y[3..6]);
    let w = vec_from_slice(&y[6..9]);
    let c = m.christoffel_at(&x)?;
    let mut out = [0.0; 9];
    put(&mut out[0..3], &v);
    put(&mut out[3..6], &(-c.contract(&v, &v)));
    put(&mut out[6..9], &(-c.contract(&v, &w)));
    Ok(out)
}

/// Parallel transport of `w0` along the geodesic, sampled like the geodesic.
pub fn parallel_transport_samples(m: &ChartMetric, geodesic: &SampledGeodesic, w0: &Vec3) -> Result<Vec<Vec3>> {
    let s = geodesic.start();
    let mut y0 = [0.0; 9];
    put(&mut y0[0..3], &s.x);
    put(&mut y0[3..6], &s.v);
    put(&mut y0[6..9], w0);
    let end = geodesic.end().arc;
    let tr = integrate(
        |_t, y| transport_rhs(m, y),
        |y| m.contains(&vec_from_slice(&y[0..3])),
        s.arc,
        y0,
        end,
        geodesic.step,
    )?;
    if let Some(exit) = tr.exit {
        if (exit - end).abs() > 0.0 {
            return Err(GeometryError::LeftChartDomain { parameter: exit });
        }
    }
    Ok(tr.states.iter().map(|y| vec_from_slice(&y[6..9])).collect())
}

/// Parallel transport of `w0` from the start to the end of the geodesic.
pub fn parallel_transport(m: &ChartMetric, geodesic: &SampledGeodesic, w0: &Vec3) -> Result<Vec3> {
    let samples = parallel_transport_samples(m, geodesic, w0)?;
    Ok(*samples.last().expect("at least the initial sample"))
}

/// Jacobi field along the geodesic with `J(0) = j0`, `∇J(0) = dj0`.
pub fn integrate_jacobi(m: &ChartMetric, geodesic: &SampledGeodesic, j0: &Vec3, dj0: &Vec3) -> Result<Vec<JacobiState>> {
    let s = geodesic.start();
    let end = geodesic.end().arc - s.arc;
    let tr = jacobi_trajectory(m, pack_jacobi(&s.x, &s.v, j0, dj0), end, geodesic.step)?;
    if let Some(exit) = tr.exit {
        return Err(GeometryError::LeftChartDomain { parameter: s.arc + exit });
    }
    Ok(tr
        .params
        .iter()
        .zip(&tr.states)
        .map(|(t, y)| jacobi_state_from(s.arc + t, y))
        .collect())
}

/// Split of a Jacobi field along a unit-speed ruling into its part along the
/// ruling and its normal part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiDecomposition {
    /// `|α'| cos σ_p`, constant along the ruling.
    pub tangential: f64,
    pub perpendicular: Vec3,
    /// `g(J_⊥, γ')`, zero up to integration error.
    pub residual: f64,
}

/// `J = (|α'| cos σ_p) γ' + J_⊥` for a Jacobi field of a ruled surface with unit
/// ruling.
pub fn decompose_jacobi(
    m: &ChartMetric,
    state: &JacobiState,
    alpha_prime_norm: f64,
    sigma_p: f64,
) -> Result<JacobiDecomposition> {
    let tangential = alpha_prime_norm * sigma_p.cos();
    let v = state.geodesic.v;
    let perpendicular = state.j - v * tangential;
    let residual = m.inner(&state.geodesic.x, &perpendicular, &v)?;
    Ok(JacobiDecomposition { tangential, perpendicular, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::Profile;
    use std::f64::consts::E;

    #[test]
    fn euclidean_geodesic_is_a_line() {
        let m = ChartMetric::euclidean();
        let g = exp_map(&m, &Vec3::zeros(), &Vec3::x(), 2.0, 1e-3).unwrap();
        assert!((g.end().x - Vec3::new(2.0, 0.0, 0.0)).norm() < 1e-14);
        assert_eq!(g.end().arc, 2.0);
        assert!(g.exit.is_none());
    }

    #[test]
    fn vertical_half_space_geodesic_is_exponential() {
        let m = ChartMetric::half_space(-1.0);
        let g = exp_map(&m, &Vec3::new(0.0, 0.0, 1.0), &Vec3::z(), 1.5, 1e-3).unwrap();
        for s in g.samples.iter().step_by(100) {
            assert!((s.x.z - s.arc.exp()).abs() < 1e-11 * s.arc.exp());
            assert!(s.x.x.abs() < 1e-15);
        }
    }

    #[test]
    fn chart_exit_truncates_geodesic() {
        // Vertical geodesic heading down in a half-space with a floor at z = 0.5
        // imposed through a callback metric.
        let m = ChartMetric::from_fn(|p| crate::linalg::Mat3::identity() / (p.z * p.z), |p| p.z > 0.5, "clipped");
        let g = exp_map(&m, &Vec3::new(0.0, 0.0, 1.0), &(-Vec3::z()), 3.0, 1e-2).unwrap();
        let exit = g.exit.expect("must leave the clipped chart");
        // z(v) = e^{-v} hits 0.5 at v = ln 2; the difference stencil of the
        // callback metric reaches the floor about 2e-5 earlier.
        assert!(exit < 2f64.ln() && exit > 2f64.ln() - 1e-4, "{exit}");
        assert!(g.end().x.z > 0.5);
    }

    #[test]
    fn transport_along_vertical_geodesic() {
        let m = ChartMetric::half_space(-1.0);
        let g = exp_map(&m, &Vec3::new(0.0, 0.0, 1.0), &Vec3::z(), 1.0, 1e-3).unwrap();
        let w = parallel_transport(&m, &g, &Vec3::x()).unwrap();
        assert!((w - Vec3::new(E, 0.0, 0.0)).norm() < 1e-10, "{w:?}");
        let e = ChartMetric::euclidean();
        let ge = exp_map(&e, &Vec3::zeros(), &Vec3::new(1.0, 1.0, 0.0), 2.0, 1e-2).unwrap();
        assert_eq!(parallel_transport(&e, &ge, &Vec3::new(0.3, -1.0, 2.0)).unwrap(), Vec3::new(0.3, -1.0, 2.0));
    }

    #[test]
    fn transport_preserves_norms_on_builtin_metrics() {
        let cases = [
            (ChartMetric::sphere(1.0), Vec3::new(0.3, 0.1, -0.2)),
            (ChartMetric::half_space(-1.0), Vec3::new(0.3, 0.1, 1.2)),
            (ChartMetric::product_revolution(Profile::sin_plus(2.0)), Vec3::new(0.0, 0.5, 0.2)),
            (ChartMetric::warped(Profile::sin_plus(0.0)), Vec3::new(1.2, 0.5, 0.2)),
        ];
        for (m, p) in cases {
            let z = Vec3::new(0.3, 0.5, -0.4);
            let g = exp_map(&m, &p, &z, 1.0, 1e-3).unwrap();
            let w0 = Vec3::new(1.0, -0.2, 0.7);
            let ws = parallel_transport_samples(&m, &g, &w0).unwrap();
            let n0 = m.norm(&p, &w0).unwrap();
            let c0 = m.inner(&p, &w0, &z).unwrap();
            for (s, w) in g.samples.iter().zip(&ws) {
                assert!((m.norm(&s.x, w).unwrap() - n0).abs() < 1e-8, "{}", m.label());
                assert!((m.inner(&s.x, w, &s.v).unwrap() - c0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn geodesic_speed_is_conserved() {
        let cases = [
            (ChartMetric::euclidean(), Vec3::new(0.0, 0.0, 0.0)),
            (ChartMetric::sphere(1.0), Vec3::new(0.3, 0.1, -0.2)),
            (ChartMetric::half_space(-1.0), Vec3::new(0.3, 0.1, 1.5)),
            (ChartMetric::product_revolution(Profile::sin_plus(2.0)), Vec3::new(0.0, 0.5, 0.2)),
            (ChartMetric::warped(Profile::sin_plus(0.0)), Vec3::new(1.5, 0.5, 0.2)),
        ];
        for (m, p) in cases {
            let z = Vec3::new(0.2, 0.3, 0.1);
            let g = exp_map(&m, &p, &z, 5.0, DEFAULT_STEP).unwrap();
            let s0 = m.norm(&p, &z).unwrap();
            for s in &g.samples {
                assert!((m.norm(&s.x, &s.v).unwrap() - s0).abs() < 1e-8, "{}", m.label());
            }
        }
    }

    #[test]
    fn jacobi_is_constant_in_flat_space() {
        let m = ChartMetric::euclidean();
        let g = exp_map(&m, &Vec3::zeros(), &Vec3::x(), 2.0, 1e-2).unwrap();
        let w = Vec3::new(0.0, 1.0, 2.0);
        let js = integrate_jacobi(&m, &g, &w, &Vec3::zeros()).unwrap();
        assert!(js.iter().all(|s| (s.j - w).norm() < 1e-14));
    }

    #[test]
    fn jacobi_norm_in_space_forms() {
        for (m, p, f) in [
            (ChartMetric::sphere(1.0), Vec3::new(0.2, -0.1, 0.3), (|v: f64| v.cos().abs()) as fn(f64) -> f64),
            (ChartMetric::half_space(-1.0), Vec3::new(0.2, -0.1, 1.0), |v: f64| v.cosh()),
        ] {
            let c = m.christoffel_at(&p).unwrap();
            let z = Vec3::new(0.0, 0.0, 1.0) / c.norm(&Vec3::z());
            let j0 = Vec3::new(1.0, 0.0, 0.0) / c.norm(&Vec3::x());
            let g = exp_map(&m, &p, &z, 3.0, DEFAULT_STEP).unwrap();
            let js = integrate_jacobi(&m, &g, &j0, &Vec3::zeros()).unwrap();
            for s in &js {
                let n = m.norm(&s.geodesic.x, &s.j).unwrap();
                assert!((n - f(s.geodesic.arc)).abs() < 1e-6, "{} at {}", m.label(), s.geodesic.arc);
            }
        }
    }

    #[test]
    fn tangential_jacobi_component_is_affine() {
        let m = ChartMetric::product_revolution(Profile::sin_plus(2.0));
        let p = Vec3::new(0.0, 0.5, 0.2);
        let z = Vec3::new(0.6, 0.1, 0.3);
        let z = z / m.norm(&p, &z).unwrap();
        let j0 = Vec3::new(0.3, 1.0, -0.5);
        let dj0 = Vec3::new(-0.2, 0.4, 0.9);
        let g = exp_map(&m, &p, &z, 3.0, DEFAULT_STEP).unwrap();
        let js = integrate_jacobi(&m, &g, &j0, &dj0).unwrap();
        let a = m.inner(&p, &j0, &z).unwrap();
        let b = m.inner(&p, &dj0, &z).unwrap();
        for s in &js {
            let gj = m.inner(&s.geodesic.x, &s.j, &s.geodesic.v).unwrap();
            assert!((gj - (a + b * s.geodesic.arc)).abs() < 1e-8);
        }
    }

    #[test]
    fn decomposition_of_orthogonal_and_tangent_fields() {
        let m = ChartMetric::euclidean();
        let g = exp_map(&m, &Vec3::zeros(), &Vec3::x(), 1.0, 1e-2).unwrap();
        let js = integrate_jacobi(&m, &g, &Vec3::y(), &Vec3::z()).unwrap();
        for s in &js {
            let d = decompose_jacobi(&m, s, 1.0, std::f64::consts::FRAC_PI_2).unwrap();
            assert!(d.tangential.abs() < 1e-15);
            assert!((d.perpendicular - s.j).norm() < 1e-15);
            assert!(d.residual.abs() < 1e-14);
        }
        let jt = integrate_jacobi(&m, &g, &Vec3::x(), &Vec3::zeros()).unwrap();
        let d = decompose_jacobi(&m, jt.last().unwrap(), 1.0, 0.0).unwrap();
        assert_eq!(d.tangential, 1.0);
        assert!(d.perpendicular.norm() < 1e-15);
    }
}

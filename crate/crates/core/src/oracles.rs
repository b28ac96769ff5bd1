//! Closed-form geodesics and Jacobi-field norms in the space-form charts.
//!
//! These are written directly in the chart coordinates used by the built-in
//! metrics and serve as independent references for the integrators.

use crate::error::{GeometryError, Result};
use crate::geodesic::GeodesicState;
use crate::linalg::{Mat3, Vec3};
use crate::manifold::ChartMetric;

/// Model chart of a space form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModelChart {
    Euclidean,
    /// `δ / (1 + k|x|²/4)²`.
    Stereographic,
    /// `δ / (−k z²)`, `z > 0`.
    HalfSpace,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceFormTag {
    pub k: f64,
    pub chart: ModelChart,
}

impl SpaceFormTag {
    pub fn new(k: f64) -> Self {
        let chart = if k > 0.0 {
            ModelChart::Stereographic
        } else if k < 0.0 {
            ModelChart::HalfSpace
        } else {
            ModelChart::Euclidean
        };
        SpaceFormTag { k, chart }
    }

    /// The built-in metric for this chart.
    pub fn metric(&self) -> ChartMetric {
        match self.chart {
            ModelChart::Euclidean => ChartMetric::euclidean(),
            ModelChart::Stereographic => ChartMetric::sphere(self.k),
            ModelChart::HalfSpace => ChartMetric::half_space(self.k),
        }
    }

    fn speed(&self, p: &Vec3, z: &Vec3) -> f64 {
        let c = match self.chart {
            ModelChart::Euclidean => 1.0,
            ModelChart::Stereographic => 1.0 / (1.0 + 0.25 * self.k * p.norm_squared()),
            ModelChart::HalfSpace => 1.0 / ((-self.k).sqrt() * p.z),
        };
        c * z.norm()
    }
}

/// `γ(v)` and `γ'(v)` for `γ(0) = p`, `γ'(0) = Z`.
pub fn oracle_geodesic(tag: &SpaceFormTag, p: &Vec3, z: &Vec3, v: f64) -> Result<GeodesicState> {
    match tag.chart {
        ModelChart::Euclidean => Ok(GeodesicState { x: p + z * v, v: *z, arc: v }),
        ModelChart::Stereographic => sphere_geodesic(tag.k, p, z, v),
        ModelChart::HalfSpace => half_space_geodesic(tag, p, z, v),
    }
}

/// Stereographic coordinates `x` to the sphere of radius `1/√k` in ℝ⁴, with the
/// differential of the map.
fn to_sphere(k: f64, x: &Vec3) -> ([f64; 4], [Vec3; 4]) {
    let a = 0.5 * k.sqrt();
    let r = 1.0 / k.sqrt();
    let y = x * a;
    let q = 1.0 + y.norm_squared();
    let mut pt = [0.0; 4];
    // rows of d(point)/dx
    let mut jac = [Vec3::zeros(); 4];
    for i in 0..3 {
        pt[i] = r * 2.0 * y[i] / q;
        let mut row = -y * (4.0 * y[i] / (q * q));
        row[i] += 2.0 / q;
        jac[i] = row * (r * a);
    }
    pt[3] = r * (2.0 - q) / q;
    jac[3] = -y * (4.0 / (q * q)) * (r * a);
    (pt, jac)
}

fn from_sphere(k: f64, pt: &[f64; 4], vel: &[f64; 4]) -> Result<(Vec3, Vec3)> {
    let a = 0.5 * k.sqrt();
    let r = 1.0 / k.sqrt();
    let w = 1.0 + pt[3] / r;
    if w.abs() < 1e-12 {
        return Err(GeometryError::ChartSingularity(f64::NAN));
    }
    let mut x = Vec3::zeros();
    let mut dx = Vec3::zeros();
    for i in 0..3 {
        let yi = pt[i] / r / w;
        x[i] = yi / a;
        dx[i] = (vel[i] / r / w - pt[i] / r * (vel[3] / r) / (w * w)) / a;
    }
    Ok((x, dx))
}

fn sphere_geodesic(k: f64, p: &Vec3, z: &Vec3, v: f64) -> Result<GeodesicState> {
    let (p0, jac) = to_sphere(k, p);
    let t0: [f64; 4] = std::array::from_fn(|i| jac[i].dot(z));
    let speed = t0.iter().map(|t| t * t).sum::<f64>().sqrt();
    let omega = speed * k.sqrt();
    let (s, c) = (omega * v).sin_cos();
    let mut pt = [0.0; 4];
    let mut vel = [0.0; 4];
    for i in 0..4 {
        pt[i] = c * p0[i] + s / omega * t0[i];
        vel[i] = -omega * s * p0[i] + c * t0[i];
    }
    if omega == 0.0 {
        return Ok(GeodesicState { x: *p, v: *z, arc: v });
    }
    let (x, dx) = from_sphere(k, &pt, &vel).map_err(|_| GeometryError::ChartSingularity(v))?;
    Ok(GeodesicState { x, v: dx, arc: v })
}

fn half_space_geodesic(tag: &SpaceFormTag, p: &Vec3, z: &Vec3, v: f64) -> Result<GeodesicState> {
    let a = 1.0 / (-tag.k).sqrt();
    let speed = tag.speed(p, z);
    let tau = speed * v / a;
    let horizontal = (z.x * z.x + z.y * z.y).sqrt();
    if horizontal <= 1e-14 * z.norm() {
        let sign = z.z.signum();
        let zz = p.z * (sign * tau).exp();
        let rate = sign * speed / a * zz;
        return Ok(GeodesicState { x: Vec3::new(p.x, p.y, zz), v: Vec3::new(0.0, 0.0, rate), arc: v });
    }
    let e = Vec3::new(z.x / horizontal, z.y / horizontal, 0.0);
    let t0 = (-z.z / horizontal).asinh();
    let radius = p.z * t0.cosh();
    let xi0 = radius * t0.tanh();
    let t = t0 + tau;
    let xi = radius * t.tanh() - xi0;
    let zz = radius / t.cosh();
    let dt = speed / a;
    let dxi = radius / t.cosh().powi(2) * dt;
    let dz = -radius * t.tanh() / t.cosh() * dt;
    Ok(GeodesicState {
        x: Vec3::new(p.x, p.y, 0.0) + e * xi + Vec3::new(0.0, 0.0, zz),
        v: e * dxi + Vec3::new(0.0, 0.0, dz),
        arc: v,
    })
}

/// Initial data of a Jacobi field along a unit-speed geodesic:
/// `J(0) = a γ'(0) + W`, `∇J(0) = b γ'(0) + DW` with `W, DW ⊥ γ'(0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiData {
    pub a: f64,
    pub b: f64,
    pub w_norm: f64,
    pub dw_norm: f64,
    /// `g(W, DW)`.
    pub w_dot_dw: f64,
}

impl JacobiData {
    /// Splits chart data at `p` against the unit velocity `z`.
    pub fn from_vectors(metric: &ChartMetric, p: &Vec3, z: &Vec3, j0: &Vec3, dj0: &Vec3) -> Result<Self> {
        let g: Mat3 = metric.components(p)?;
        let ip = |x: &Vec3, y: &Vec3| x.dot(&(g * y));
        let a = ip(j0, z);
        let b = ip(dj0, z);
        let w = j0 - z * a;
        let dw = dj0 - z * b;
        Ok(JacobiData {
            a,
            b,
            w_norm: ip(&w, &w).sqrt(),
            dw_norm: ip(&dw, &dw).sqrt(),
            w_dot_dw: ip(&w, &dw),
        })
    }
}

/// `|J(v)|` in constant curvature `k`:
/// `|J|² = (a + b v)² + |c(v) W + s(v) DW|²` with `c'' = −k c`, `s'' = −k s`,
/// `c(0) = 1, c'(0) = 0, s(0) = 0, s'(0) = 1`.
pub fn oracle_jacobi_norm(tag: &SpaceFormTag, data: &JacobiData, v: f64) -> f64 {
    let k = tag.k;
    let (c, s) = if k > 0.0 {
        let w = k.sqrt();
        ((w * v).cos(), (w * v).sin() / w)
    } else if k < 0.0 {
        let w = (-k).sqrt();
        ((w * v).cosh(), (w * v).sinh() / w)
    } else {
        (1.0, v)
    };
    let perp2 = c * c * data.w_norm.powi(2) + 2.0 * c * s * data.w_dot_dw + s * s * data.dw_norm.powi(2);
    ((data.a + data.b * v).powi(2) + perp2.max(0.0)).sqrt()
}

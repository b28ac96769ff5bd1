//! Riemannian metrics on a single coordinate chart of a 3-manifold.
//!
//! A [`ChartMetric`] wraps a [`MetricField`] (the component matrix `g_ij` and,
//! optionally, its exact first and second partial derivatives) and derives the
//! Levi-Civita connection, the curvature tensor and the volume form from it.
//!
//! Curvature conventions: `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z`, stored
//! as `R^i_jkl` with `R(∂_k, ∂_l)∂_j = R^i_jkl ∂_i`, and the lowered tensor
//! `Riem(X,Y,Z,T) = −g(R(X,Y)Z, T)`. With these signs the sectional curvature
//! is `Riem(X,Y,X,Y) / (|X|²|Y|² − g(X,Y)²)` and the round sphere is positive.

mod presets;

use std::fmt;
use std::sync::Arc;

pub use presets::{Profile, ProfileDerivatives};

use crate::error::{GeometryError, Result};
use crate::linalg::{permutation_sign, Mat3, Tensor3, Tensor4, Vec3, ZERO3, ZERO4};

/// Linear-independence threshold on the normalized Gram determinant.
pub const EPS_LIN: f64 = 1e-10;

/// Step used when the first partials of `g` are approximated.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// Step used for second partials (and for `∂g` when `g` is exact but `∂²g` is not).
pub const DEFAULT_FD_STEP2: f64 = 1e-4;

/// A point of the chart.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub coords: Vec3,
}

impl ChartPoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        ChartPoint { coords: Vec3::new(x, y, z) }
    }
}

impl From<Vec3> for ChartPoint {
    fn from(coords: Vec3) -> Self {
        ChartPoint { coords }
    }
}

/// A tangent vector expressed in the chart basis `∂_i` at `base`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVec {
    pub base: ChartPoint,
    pub components: Vec3,
}

impl TangentVec {
    pub fn new(base: ChartPoint, components: Vec3) -> Self {
        TangentVec { base, components }
    }
}

/// Components of a metric on a chart.
///
/// Only [`components`](MetricField::components) is required. When the exact
/// partials are not supplied, [`ChartMetric`] falls back to central finite
/// differences.
pub trait MetricField: Send + Sync {
    /// `g_ij(p)`.
    fn components(&self, p: &Vec3) -> Mat3;

    /// `∂_l g_ij(p)`, indexed `[l][(i, j)]`.
    fn partials(&self, _p: &Vec3) -> Option<[Mat3; 3]> {
        None
    }

    /// `∂_l ∂_m g_ij(p)`, indexed `[l][m][(i, j)]`.
    fn second_partials(&self, _p: &Vec3) -> Option<[[Mat3; 3]; 3]> {
        None
    }

    /// Validity predicate of the chart.
    fn contains(&self, p: &Vec3) -> bool {
        p.iter().all(|c| c.is_finite())
    }
}

/// What is known about the sectional curvature of a metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CurvatureTag {
    Constant(f64),
    Generic,
}

impl CurvatureTag {
    pub fn constant(&self) -> Option<f64> {
        match self {
            CurvatureTag::Constant(k) => Some(*k),
            CurvatureTag::Generic => None,
        }
    }
}

/// Metric, inverse metric and Christoffel symbols at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct Connection {
    pub point: Vec3,
    pub metric: Mat3,
    pub inverse: Mat3,
    /// `Γ^i_jk`, indexed `[i][j][k]`.
    pub christoffel: Tensor3,
    /// `√det g`.
    pub volume_density: f64,
}

impl Connection {
    /// `Γ^i_jk a^j b^k`.
    pub fn contract(&self, a: &Vec3, b: &Vec3) -> Vec3 {
        let mut out = Vec3::zeros();
        for i in 0..3 {
            let mut s = 0.0;
            for j in 0..3 {
                for k in 0..3 {
                    s += self.christoffel[i][j][k] * a[j] * b[k];
                }
            }
            out[i] = s;
        }
        out
    }

    pub fn inner(&self, a: &Vec3, b: &Vec3) -> f64 {
        a.dot(&(self.metric * b))
    }

    pub fn norm(&self, a: &Vec3) -> f64 {
        self.inner(a, a).max(0.0).sqrt()
    }

    pub fn volume(&self, a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
        self.volume_density * Mat3::from_columns(&[*a, *b, *c]).determinant()
    }

    /// Metric cross product: the vector `A×B` with `g(A×B, C) = vol(A, B, C)`.
    pub fn cross(&self, a: &Vec3, b: &Vec3) -> Vec3 {
        let mut lower = Vec3::zeros();
        for j in 0..3 {
            let mut s = 0.0;
            for k in 0..3 {
                for l in 0..3 {
                    s += permutation_sign(j, k, l) * a[k] * b[l];
                }
            }
            lower[j] = self.volume_density * s;
        }
        self.inverse * lower
    }

    /// `(|A|²|B|² − g(A,B)²) / (|A|²|B|²)`, zero when either vector vanishes.
    pub fn normalized_gram(&self, a: &Vec3, b: &Vec3) -> f64 {
        let aa = self.inner(a, a);
        let bb = self.inner(b, b);
        if aa <= 0.0 || bb <= 0.0 {
            return 0.0;
        }
        let ab = self.inner(a, b);
        (aa * bb - ab * ab) / (aa * bb)
    }
}

/// Connection plus the curvature tensor at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensors {
    pub connection: Connection,
    /// `R^i_jkl`, indexed `[i][j][k][l]`.
    pub riemann: Tensor4,
}

impl CurvatureTensors {
    /// `R(X,Y)Z`.
    pub fn apply(&self, x: &Vec3, y: &Vec3, z: &Vec3) -> Vec3 {
        let r = &self.riemann;
        let mut out = Vec3::zeros();
        for i in 0..3 {
            let mut s = 0.0;
            for j in 0..3 {
                if z[j] == 0.0 {
                    continue;
                }
                for k in 0..3 {
                    for l in 0..3 {
                        s += r[i][j][k][l] * z[j] * x[k] * y[l];
                    }
                }
            }
            out[i] = s;
        }
        out
    }

    /// `Riem(X,Y,Z,T) = −g(R(X,Y)Z, T)`.
    pub fn riem(&self, x: &Vec3, y: &Vec3, z: &Vec3, t: &Vec3) -> f64 {
        -self.connection.inner(&self.apply(x, y, z), t)
    }

    /// Lowered components `Riem_abcd = Riem(∂_a, ∂_b, ∂_c, ∂_d)`.
    pub fn lowered(&self) -> Tensor4 {
        let g = &self.connection.metric;
        let mut out = ZERO4;
        for a in 0..3 {
            for b in 0..3 {
                for c in 0..3 {
                    for d in 0..3 {
                        let mut s = 0.0;
                        for i in 0..3 {
                            s += g[(d, i)] * self.riemann[i][c][a][b];
                        }
                        out[a][b][c][d] = -s;
                    }
                }
            }
        }
        out
    }
}

/// A Riemannian metric on one chart together with its curvature information.
#[derive(Clone)]
pub struct ChartMetric {
    field: Arc<dyn MetricField>,
    tag: CurvatureTag,
    label: String,
    fd_step: f64,
    fd_step2: f64,
}

impl fmt::Debug for ChartMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartMetric")
            .field("label", &self.label)
            .field("tag", &self.tag)
            .finish()
    }
}

impl ChartMetric {
    pub fn new(field: impl MetricField + 'static, tag: CurvatureTag, label: impl Into<String>) -> Self {
        ChartMetric {
            field: Arc::new(field),
            tag,
            label: label.into(),
            fd_step: DEFAULT_FD_STEP,
            fd_step2: DEFAULT_FD_STEP2,
        }
    }

    /// A metric given only by its components; all derivatives are approximated.
    pub fn from_fn<G, D>(g: G, domain: D, label: impl Into<String>) -> Self
    where
        G: Fn(&Vec3) -> Mat3 + Send + Sync + 'static,
        D: Fn(&Vec3) -> bool + Send + Sync + 'static,
    {
        struct Closure<G, D>(G, D);
        impl<G, D> MetricField for Closure<G, D>
        where
            G: Fn(&Vec3) -> Mat3 + Send + Sync,
            D: Fn(&Vec3) -> bool + Send + Sync,
        {
            fn components(&self, p: &Vec3) -> Mat3 {
                (self.0)(p)
            }
            fn contains(&self, p: &Vec3) -> bool {
                p.iter().all(|c| c.is_finite()) && (self.1)(p)
            }
        }
        ChartMetric::new(Closure(g, domain), CurvatureTag::Generic, label)
    }

    pub fn with_fd_steps(mut self, first: f64, second: f64) -> Self {
        self.fd_step = first;
        self.fd_step2 = second;
        self
    }

    pub fn with_tag(mut self, tag: CurvatureTag) -> Self {
        self.tag = tag;
        self
    }

    pub fn tag(&self) -> CurvatureTag {
        self.tag
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        self.field.contains(p)
    }

    pub fn has_exact_partials(&self, p: &Vec3) -> bool {
        self.field.partials(p).is_some()
    }

    fn check(&self, p: &Vec3) -> Result<()> {
        if self.field.contains(p) {
            Ok(())
        } else {
            Err(GeometryError::outside(p))
        }
    }

    /// `g_ij(p)`.
    pub fn components(&self, p: &Vec3) -> Result<Mat3> {
        self.check(p)?;
        Ok(self.field.components(p))
    }

    pub fn inner(&self, p: &Vec3, a: &Vec3, b: &Vec3) -> Result<f64> {
        Ok(a.dot(&(self.components(p)? * b)))
    }

    pub fn norm(&self, p: &Vec3, a: &Vec3) -> Result<f64> {
        Ok(self.inner(p, a, a)?.max(0.0).sqrt())
    }

    /// `∂_l g_ij(p)`: exact when available, else central differences.
    pub fn partials(&self, p: &Vec3) -> Result<[Mat3; 3]> {
        self.check(p)?;
        if let Some(d) = self.field.partials(p) {
            return Ok(d);
        }
        let h = self.fd_step;
        let mut out = [Mat3::zeros(); 3];
        for (l, slot) in out.iter_mut().enumerate() {
            let mut e = Vec3::zeros();
            e[l] = h;
            let plus = self.components(&(p + e))?;
            let minus = self.components(&(p - e))?;
            *slot = (plus - minus) / (2.0 * h);
        }
        Ok(out)
    }

    /// `∂_l ∂_m g_ij(p)`: exact when available, else central differences of
    /// the exact partials, else nested central differences of `g`.
    pub fn second_partials(&self, p: &Vec3) -> Result<[[Mat3; 3]; 3]> {
        self.check(p)?;
        if let Some(d) = self.field.second_partials(p) {
            return Ok(d);
        }
        let h = self.fd_step2;
        let mut out = [[Mat3::zeros(); 3]; 3];
        if self.field.partials(p).is_some() {
            for l in 0..3 {
                let mut e = Vec3::zeros();
                e[l] = h;
                let plus = self.partials(&(p + e))?;
                let minus = self.partials(&(p - e))?;
                for m in 0..3 {
                    out[l][m] = (plus[m] - minus[m]) / (2.0 * h);
                }
            }
            for l in 0..3 {
                for m in (l + 1)..3 {
                    let avg = (out[l][m] + out[m][l]) * 0.5;
                    out[l][m] = avg;
                    out[m][l] = avg;
                }
            }
            return Ok(out);
        }
        let g0 = self.components(p)?;
        for l in 0..3 {
            let mut el = Vec3::zeros();
            el[l] = h;
            let gp = self.components(&(p + el))?;
            let gm = self.components(&(p - el))?;
            out[l][l] = (gp - 2.0 * g0 + gm) / (h * h);
            for m in (l + 1)..3 {
                let mut em = Vec3::zeros();
                em[m] = h;
                let pp = self.components(&(p + el + em))?;
                let pm = self.components(&(p + el - em))?;
                let mp = self.components(&(p - el + em))?;
                let mm = self.components(&(p - el - em))?;
                let d = (pp - pm - mp + mm) / (4.0 * h * h);
                out[l][m] = d;
                out[m][l] = d;
            }
        }
        Ok(out)
    }

    /// Levi-Civita connection at `p`:
    /// `Γ^i_jk = ½ g^il (∂_j g_lk + ∂_k g_jl − ∂_l g_jk)`.
    pub fn christoffel_at(&self, p: &Vec3) -> Result<Connection> {
        let g = self.components(p)?;
        let dg = self.partials(p)?;
        connection_from(p, g, &dg)
    }

    /// Connection and curvature tensor at `p`.
    pub fn riemann_at(&self, p: &Vec3) -> Result<CurvatureTensors> {
        let g = self.components(p)?;
        let dg = self.partials(p)?;
        let d2g = self.second_partials(p)?;
        let connection = connection_from(p, g, &dg)?;
        let gam = &connection.christoffel;
        let ginv = &connection.inverse;

        // dgam[l][i][j][k] = ∂_l Γ^i_jk
        let mut dgam = [ZERO3; 3];
        for l in 0..3 {
            // ∂_l of the first-kind symbols Γ_{a,jk}
            let mut first = ZERO3;
            for a in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        first[a][j][k] = 0.5
                            * (d2g[l][j][(a, k)] + d2g[l][k][(j, a)] - d2g[l][a][(j, k)]);
                    }
                }
            }
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        let mut s = 0.0;
                        for a in 0..3 {
                            s += ginv[(i, a)] * first[a][j][k];
                            let mut t = 0.0;
                            for b in 0..3 {
                                t += dg[l][(a, b)] * gam[b][j][k];
                            }
                            s -= ginv[(i, a)] * t;
                        }
                        dgam[l][i][j][k] = s;
                    }
                }
            }
        }

        let mut riemann = ZERO4;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        let mut s = dgam[k][i][l][j] - dgam[l][i][k][j];
                        for m in 0..3 {
                            s += gam[i][k][m] * gam[m][l][j] - gam[i][l][m] * gam[m][k][j];
                        }
                        riemann[i][j][k][l] = s;
                    }
                }
            }
        }
        Ok(CurvatureTensors { connection, riemann })
    }

    /// Sectional curvature of the plane spanned by `x` and `y` at `p`.
    pub fn sectional_curvature(&self, p: &Vec3, x: &Vec3, y: &Vec3) -> Result<f64> {
        let t = self.riemann_at(p)?;
        sectional_from(&t, x, y)
    }

    /// `(∇_{α'} Z)^i = dZ^i/du + Γ^i_jk α'^j Z^k`.
    pub fn covariant_derivative_along(
        &self,
        p: &Vec3,
        velocity: &Vec3,
        field: &Vec3,
        field_derivative: &Vec3,
    ) -> Result<Vec3> {
        let c = self.christoffel_at(p)?;
        Ok(field_derivative + c.contract(velocity, field))
    }

    /// `√det g(p) · det[A|B|C]`.
    pub fn volume_form(&self, p: &Vec3, a: &Vec3, b: &Vec3, c: &Vec3) -> Result<f64> {
        let g = self.components(p)?;
        let det = g.determinant();
        if !(det > 0.0) {
            return Err(GeometryError::SingularMetric([p.x, p.y, p.z]));
        }
        Ok(det.sqrt() * Mat3::from_columns(&[*a, *b, *c]).determinant())
    }

    /// Vector norm of a [`TangentVec`].
    pub fn tangent_norm(&self, w: &TangentVec) -> Result<f64> {
        self.norm(&w.base.coords, &w.components)
    }
}

/// `Riem(X,Y,X,Y) / (|X|²|Y|² − g(X,Y)²)`.
pub fn sectional_from(t: &CurvatureTensors, x: &Vec3, y: &Vec3) -> Result<f64> {
    let c = &t.connection;
    let ng = c.normalized_gram(x, y);
    if !(ng > EPS_LIN) {
        return Err(GeometryError::DegeneratePlane(ng));
    }
    let xx = c.inner(x, x);
    let yy = c.inner(y, y);
    let xy = c.inner(x, y);
    Ok(t.riem(x, y, x, y) / (xx * yy - xy * xy))
}

fn connection_from(p: &Vec3, g: Mat3, dg: &[Mat3; 3]) -> Result<Connection> {
    let singular = || GeometryError::SingularMetric([p.x, p.y, p.z]);
    let chol = g.cholesky().ok_or_else(singular)?;
    let det = g.determinant();
    if !(det > 0.0) {
        return Err(singular());
    }
    let inverse = chol.inverse();
    let mut christoffel = ZERO3;
    for i in 0..3 {
        for j in 0..3 {
            for k in j..3 {
                let mut s = 0.0;
                for l in 0..3 {
                    s += inverse[(i, l)] * (dg[j][(l, k)] + dg[k][(j, l)] - dg[l][(j, k)]);
                }
                christoffel[i][j][k] = 0.5 * s;
                christoffel[i][k][j] = 0.5 * s;
            }
        }
    }
    Ok(Connection {
        point: *p,
        metric: g,
        inverse,
        christoffel,
        volume_density: det.sqrt(),
    })
}

#[cfg(test)]
mod tests;

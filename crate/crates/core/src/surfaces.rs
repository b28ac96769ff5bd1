//! Named metrics, base curves and ruling fields, and the bundled surfaces.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{GeometryError, Result};
use crate::linalg::Vec3;
use crate::manifold::{ChartMetric, Profile};
use crate::ruled_surface::{CurveFn, RuledSurfaceSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricPreset {
    Euclidean,
    Sphere { k: f64 },
    HalfSpace { k: f64 },
    ProductRevolution { profile: Profile },
    Warped { profile: Profile },
}

impl MetricPreset {
    pub fn build(&self) -> Result<ChartMetric> {
        Ok(match self {
            MetricPreset::Euclidean => ChartMetric::euclidean(),
            MetricPreset::Sphere { k } if *k > 0.0 => ChartMetric::sphere(*k),
            MetricPreset::HalfSpace { k } if *k < 0.0 => ChartMetric::half_space(*k),
            MetricPreset::ProductRevolution { profile } => ChartMetric::product_revolution(profile.clone()),
            MetricPreset::Warped { profile } => ChartMetric::warped(profile.clone()),
            other => return Err(GeometryError::InvalidInput(format!("curvature has the wrong sign for {other:?}"))),
        })
    }
}

/// `constant + Σ_n (cos[n−1] cos(n u) + sin[n−1] sin(n u))`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigSeries {
    #[serde(default)]
    pub constant: f64,
    #[serde(default)]
    pub cos: Vec<f64>,
    #[serde(default)]
    pub sin: Vec<f64>,
}

impl TrigSeries {
    fn jet(&self, u: f64) -> [f64; 3] {
        let mut out = [self.constant, 0.0, 0.0];
        let terms = self.cos.len().max(self.sin.len());
        for i in 0..terms {
            let n = (i + 1) as f64;
            let a = self.cos.get(i).copied().unwrap_or(0.0);
            let b = self.sin.get(i).copied().unwrap_or(0.0);
            let (s, c) = (n * u).sin_cos();
            out[0] += a * c + b * s;
            out[1] += n * (-a * s + b * c);
            out[2] -= n * n * (a * c + b * s);
        }
        out
    }
}

fn xy_axes() -> [usize; 2] {
    [0, 1]
}

/// A chart curve with closed-form first and second derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurvePreset {
    /// `center + radius (cos u e_a + sin u e_b)` with `axes = [a, b]`.
    Circle {
        center: [f64; 3],
        radius: f64,
        #[serde(default = "xy_axes")]
        axes: [usize; 2],
    },
    Line { point: [f64; 3], direction: [f64; 3] },
    /// `center + (r cos u, r sin u, pitch · u)`.
    Helix {
        #[serde(default)]
        center: [f64; 3],
        radius: f64,
        pitch: f64,
    },
    /// Component `i` is `Σ_n coefficients[i][n] u^n`.
    Polynomial { coefficients: [Vec<f64>; 3] },
    Trig { components: [TrigSeries; 3] },
}

impl CurvePreset {
    fn validate(&self) -> Result<()> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        let ok = match self {
            CurvePreset::Circle { center, radius, axes } => {
                finite(center) && radius.is_finite() && axes[0] < 3 && axes[1] < 3 && axes[0] != axes[1]
            }
            CurvePreset::Line { point, direction } => finite(point) && finite(direction),
            CurvePreset::Helix { center, radius, pitch } => finite(center) && radius.is_finite() && pitch.is_finite(),
            CurvePreset::Polynomial { coefficients } => coefficients.iter().all(|c| finite(c)),
            CurvePreset::Trig { components } => {
                components.iter().all(|c| c.constant.is_finite() && finite(&c.cos) && finite(&c.sin))
            }
        };
        if ok {
            Ok(())
        } else {
            Err(GeometryError::InvalidInput(format!("malformed curve {self:?}")))
        }
    }

    /// `(c(u), c'(u), c''(u))`.
    pub fn jet(&self, u: f64) -> [Vec3; 3] {
        match self {
            CurvePreset::Circle { center, radius, axes } => {
                let (s, c) = u.sin_cos();
                let mut out = [Vec3::from(*center), Vec3::zeros(), Vec3::zeros()];
                for (k, (a, b)) in [(c, s), (-s, c), (-c, -s)].into_iter().enumerate() {
                    out[k][axes[0]] += radius * a;
                    out[k][axes[1]] += radius * b;
                }
                out
            }
            CurvePreset::Line { point, direction } => {
                let d = Vec3::from(*direction);
                [Vec3::from(*point) + d * u, d, Vec3::zeros()]
            }
            CurvePreset::Helix { center, radius, pitch } => {
                let (s, c) = u.sin_cos();
                [
                    Vec3::from(*center) + Vec3::new(radius * c, radius * s, pitch * u),
                    Vec3::new(-radius * s, radius * c, *pitch),
                    Vec3::new(-radius * c, -radius * s, 0.0),
                ]
            }
            CurvePreset::Polynomial { coefficients } => {
                let mut out = [Vec3::zeros(); 3];
                for (i, cs) in coefficients.iter().enumerate() {
                    let d = Profile::Polynomial(cs.clone()).derivatives(u);
                    for k in 0..3 {
                        out[k][i] = d[k];
                    }
                }
                out
            }
            CurvePreset::Trig { components } => {
                let mut out = [Vec3::zeros(); 3];
                for (i, c) in components.iter().enumerate() {
                    let d = c.jet(u);
                    for k in 0..3 {
                        out[k][i] = d[k];
                    }
                }
                out
            }
        }
    }

    fn curve(&self) -> CurveFn {
        let (a, b) = (self.clone(), self.clone());
        CurveFn::with_derivative(move |u| a.jet(u)[0], move |u| b.jet(u)[1])
    }

    fn tangent(&self) -> CurveFn {
        let (a, b) = (self.clone(), self.clone());
        CurveFn::with_derivative(move |u| a.jet(u)[1], move |u| b.jet(u)[2])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RulingPreset {
    /// Constant chart components.
    Constant { vector: [f64; 3] },
    /// Components given by a curve preset.
    Curve { curve: CurvePreset },
    /// `Z = α'`.
    Tangent,
}

/// Metric, base curve and ruling field of a ruled surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfacePreset {
    pub metric: MetricPreset,
    pub base: CurvePreset,
    pub ruling: RulingPreset,
    /// Rescale the ruling field to unit length.
    #[serde(default)]
    pub normalize: bool,
}

impl SurfacePreset {
    pub fn build(&self, u_domain: (f64, f64)) -> Result<RuledSurfaceSpec> {
        self.base.validate()?;
        let ruling = match &self.ruling {
            RulingPreset::Constant { vector } => {
                if !vector.iter().all(|x| x.is_finite()) {
                    return Err(GeometryError::InvalidInput(format!("malformed ruling {vector:?}")));
                }
                let z = Vec3::from(*vector);
                CurveFn::with_derivative(move |_| z, |_| Vec3::zeros())
            }
            RulingPreset::Curve { curve } => {
                curve.validate()?;
                curve.curve()
            }
            RulingPreset::Tangent => self.base.tangent(),
        };
        if !(u_domain.0 < u_domain.1) || !u_domain.0.is_finite() || !u_domain.1.is_finite() {
            return Err(GeometryError::InvalidInput(format!("bad u range {u_domain:?}")));
        }
        Ok(RuledSurfaceSpec::from_curves(self.metric.build()?, self.base.curve(), ruling, u_domain).normalized(self.normalize))
    }
}

/// A named surface with its default sampling ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct BundledSurface {
    pub name: &'static str,
    pub surface: SurfacePreset,
    pub u_range: (f64, f64),
    pub v_range: (f64, f64),
}

impl BundledSurface {
    pub fn spec(&self) -> Result<RuledSurfaceSpec> {
        self.surface.build(self.u_range)
    }
}

pub const BUNDLED_NAMES: [&str; 6] = ["helicoid", "cylinder", "sphere_tangent", "example1", "example2", "example3"];

fn circle(center: [f64; 3], radius: f64, axes: [usize; 2]) -> CurvePreset {
    CurvePreset::Circle { center, radius, axes }
}

pub fn bundled(name: &str) -> Option<BundledSurface> {
    let (surface, u_range, v_range) = match name {
        "helicoid" => (
            SurfacePreset {
                metric: MetricPreset::Euclidean,
                base: CurvePreset::Line { point: [0.0; 3], direction: [0.0, 0.0, 1.0] },
                ruling: RulingPreset::Curve { curve: circle([0.0; 3], 1.0, [0, 1]) },
                normalize: false,
            },
            (-PI, PI),
            (-2.0, 2.0),
        ),
        "cylinder" => (
            SurfacePreset {
                metric: MetricPreset::Euclidean,
                base: circle([0.0; 3], 1.0, [0, 1]),
                ruling: RulingPreset::Constant { vector: [0.0, 0.0, 1.0] },
                normalize: false,
            },
            (0.0, 2.0 * PI),
            (-1.0, 1.0),
        ),
        // Great circles of S³(1) tangent to a small circle; singular along v = 0.
        "sphere_tangent" => (
            SurfacePreset {
                metric: MetricPreset::Sphere { k: 1.0 },
                base: circle([0.0; 3], 0.5, [0, 1]),
                ruling: RulingPreset::Tangent,
                normalize: true,
            },
            (0.0, 2.0 * PI),
            (0.1, 3.0),
        ),
        "example1" => (
            SurfacePreset {
                metric: MetricPreset::HalfSpace { k: -1.0 },
                base: circle([0.0, 0.0, 1.0], 1.0, [0, 1]),
                ruling: RulingPreset::Curve { curve: circle([0.0; 3], 1.0, [0, 1]) },
                normalize: false,
            },
            (0.0, 2.0 * PI),
            (-5.0, 5.0),
        ),
        // Chart (t, u, v) on ℝ × Σ with Σ generated by y = 2 + sin x; the
        // ruling parameter is arc length, so chart v = 3π/2 sits near 5.73.
        "example2" => (
            SurfacePreset {
                metric: MetricPreset::ProductRevolution { profile: Profile::sin_plus(2.0) },
                base: CurvePreset::Line { point: [0.0; 3], direction: [0.0, 1.0, 0.0] },
                ruling: RulingPreset::Constant { vector: [0.0, 0.0, 1.0] },
                normalize: true,
            },
            (0.0, 2.0 * PI),
            (0.0, 7.0),
        ),
        // Warped product with f(t) = sin t; rulings are t-lines through t = 1.
        "example3" => (
            SurfacePreset {
                metric: MetricPreset::Warped { profile: Profile::sin_plus(0.0) },
                base: circle([1.0, 0.0, 0.0], 1.0, [1, 2]),
                ruling: RulingPreset::Constant { vector: [1.0, 0.0, 0.0] },
                normalize: false,
            },
            (0.0, 2.0 * PI),
            (0.1 - 1.0, PI - 0.1 - 1.0),
        ),
        _ => return None,
    };
    let name = BUNDLED_NAMES.iter().copied().find(|n| *n == name)?;
    Some(BundledSurface { name, surface, u_range, v_range })
}

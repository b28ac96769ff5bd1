//! Built-in charts: Euclidean space, the space forms of curvature `k ≠ 0`,
//! a product `ℝ × Σ` with `Σ` a surface of revolution, and a warped product
//! `I ×_f ℝ²`. All of them supply exact first and second partials.

use super::{ChartMetric, CurvatureTag, MetricField};
use crate::linalg::{Mat3, Vec3};

/// A smooth positive profile function `f(t)` with closed-form derivatives.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Profile {
    /// `offset + amplitude · sin(frequency · t + phase)`.
    Trig {
        offset: f64,
        amplitude: f64,
        frequency: f64,
        phase: f64,
    },
    /// `Σ c_n t^n`.
    Polynomial(Vec<f64>),
}

/// `(f, f', f'', f''')` at a parameter value.
pub type ProfileDerivatives = [f64; 4];

impl Profile {
    pub fn sin_plus(offset: f64) -> Self {
        Profile::Trig {
            offset,
            amplitude: 1.0,
            frequency: 1.0,
            phase: 0.0,
        }
    }

    pub fn derivatives(&self, t: f64) -> ProfileDerivatives {
        match self {
            Profile::Trig {
                offset,
                amplitude,
                frequency,
                phase,
            } => {
                let w = *frequency;
                let (s, c) = (w * t + phase).sin_cos();
                let a = *amplitude;
                [offset + a * s, a * w * c, -a * w * w * s, -a * w * w * w * c]
            }
            Profile::Polynomial(coeffs) => {
                let mut out = [0.0; 4];
                for (order, slot) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (n, c) in coeffs.iter().enumerate().skip(order).rev() {
                        let mut falling = 1.0;
                        for r in 0..order {
                            falling *= (n - r) as f64;
                        }
                        acc = acc * t + c * falling;
                    }
                    *slot = acc;
                }
                out
            }
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        self.derivatives(t)[0]
    }
}

#[derive(Debug, Clone, Copy)]
struct Euclidean;

impl MetricField for Euclidean {
    fn components(&self, _p: &Vec3) -> Mat3 {
        Mat3::identity()
    }
    fn partials(&self, _p: &Vec3) -> Option<[Mat3; 3]> {
        Some([Mat3::zeros(); 3])
    }
    fn second_partials(&self, _p: &Vec3) -> Option<[[Mat3; 3]; 3]> {
        Some([[Mat3::zeros(); 3]; 3])
    }
}

/// `g = c(x) δ` with `c` given with its gradient and Hessian.
#[derive(Debug, Clone, Copy)]
enum Conformal {
    /// Stereographic chart of `S³(k)`: `c = (1 + k|x|²/4)^-2`.
    Sphere { k: f64 },
    /// Upper half-space chart of `H³(k)`: `c = 1 / (−k z²)`.
    HalfSpace { k: f64 },
}

impl Conformal {
    fn factor(&self, p: &Vec3) -> (f64, Vec3, Mat3) {
        match *self {
            Conformal::Sphere { k } => {
                let w = 1.0 + 0.25 * k * p.norm_squared();
                let grad_w = p * (0.5 * k);
                let c = w.powi(-2);
                let grad = grad_w * (-2.0 * w.powi(-3));
                let hess = grad_w * grad_w.transpose() * (6.0 * w.powi(-4))
                    - Mat3::identity() * (k * w.powi(-3));
                (c, grad, hess)
            }
            Conformal::HalfSpace { k } => {
                let a2 = -1.0 / k;
                let z = p.z;
                let c = a2 / (z * z);
                let grad = Vec3::new(0.0, 0.0, -2.0 * a2 / (z * z * z));
                let mut hess = Mat3::zeros();
                hess[(2, 2)] = 6.0 * a2 / (z * z * z * z);
                (c, grad, hess)
            }
        }
    }
}

impl MetricField for Conformal {
    fn components(&self, p: &Vec3) -> Mat3 {
        Mat3::identity() * self.factor(p).0
    }
    fn partials(&self, p: &Vec3) -> Option<[Mat3; 3]> {
        let (_, grad, _) = self.factor(p);
        Some([0, 1, 2].map(|l| Mat3::identity() * grad[l]))
    }
    fn second_partials(&self, p: &Vec3) -> Option<[[Mat3; 3]; 3]> {
        let (_, _, hess) = self.factor(p);
        Some([0, 1, 2].map(|l| [0, 1, 2].map(|m| Mat3::identity() * hess[(l, m)])))
    }
    fn contains(&self, p: &Vec3) -> bool {
        if !p.iter().all(|c| c.is_finite()) {
            return false;
        }
        match self {
            Conformal::Sphere { .. } => true,
            Conformal::HalfSpace { .. } => p.z > 0.0,
        }
    }
}

/// Diagonal metrics whose entries depend on a single coordinate.
#[derive(Debug, Clone)]
enum Diagonal {
    /// `dt² + f(v)² du² + (1 + f'(v)²) dv²` on coordinates `(t, u, v)`.
    ProductRevolution(Profile),
    /// `dt² + f(t)² (dx² + dy²)` on coordinates `(t, x, y)`.
    Warped(Profile),
}

impl Diagonal {
    fn axis(&self) -> usize {
        match self {
            Diagonal::ProductRevolution(_) => 2,
            Diagonal::Warped(_) => 0,
        }
    }

    /// Diagonal entries and their first and second derivatives along `axis`.
    fn entries(&self, p: &Vec3) -> [Vec3; 3] {
        match self {
            Diagonal::ProductRevolution(f) => {
                let [f0, f1, f2, f3] = f.derivatives(p.z);
                [
                    Vec3::new(1.0, f0 * f0, 1.0 + f1 * f1),
                    Vec3::new(0.0, 2.0 * f0 * f1, 2.0 * f1 * f2),
                    Vec3::new(0.0, 2.0 * (f1 * f1 + f0 * f2), 2.0 * (f2 * f2 + f1 * f3)),
                ]
            }
            Diagonal::Warped(f) => {
                let [f0, f1, f2, _] = f.derivatives(p.x);
                let d2 = 2.0 * (f1 * f1 + f0 * f2);
                [
                    Vec3::new(1.0, f0 * f0, f0 * f0),
                    Vec3::new(0.0, 2.0 * f0 * f1, 2.0 * f0 * f1),
                    Vec3::new(0.0, d2, d2),
                ]
            }
        }
    }

    fn profile_value(&self, p: &Vec3) -> f64 {
        match self {
            Diagonal::ProductRevolution(f) => f.value(p.z),
            Diagonal::Warped(f) => f.value(p.x),
        }
    }
}

impl MetricField for Diagonal {
    fn components(&self, p: &Vec3) -> Mat3 {
        Mat3::from_diagonal(&self.entries(p)[0])
    }
    fn partials(&self, p: &Vec3) -> Option<[Mat3; 3]> {
        let mut out = [Mat3::zeros(); 3];
        out[self.axis()] = Mat3::from_diagonal(&self.entries(p)[1]);
        Some(out)
    }
    fn second_partials(&self, p: &Vec3) -> Option<[[Mat3; 3]; 3]> {
        let mut out = [[Mat3::zeros(); 3]; 3];
        let a = self.axis();
        out[a][a] = Mat3::from_diagonal(&self.entries(p)[2]);
        Some(out)
    }
    fn contains(&self, p: &Vec3) -> bool {
        p.iter().all(|c| c.is_finite()) && self.profile_value(p) > 0.0
    }
}

impl ChartMetric {
    /// Flat `ℝ³` with `g = δ`.
    pub fn euclidean() -> Self {
        ChartMetric::new(Euclidean, CurvatureTag::Constant(0.0), "euclidean")
    }

    /// `S³(k)`, `k > 0`, in the stereographic chart `g = δ / (1 + k|x|²/4)²`.
    /// The chart covers everything except the antipode of the origin.
    pub fn sphere(k: f64) -> Self {
        assert!(k > 0.0, "sphere chart needs k > 0");
        ChartMetric::new(Conformal::Sphere { k }, CurvatureTag::Constant(k), format!("sphere({k})"))
    }

    /// `H³(k)`, `k < 0`, in the upper half-space chart `g = δ / (−k z²)`, `z > 0`.
    pub fn half_space(k: f64) -> Self {
        assert!(k < 0.0, "half-space chart needs k < 0");
        ChartMetric::new(
            Conformal::HalfSpace { k },
            CurvatureTag::Constant(k),
            format!("half_space({k})"),
        )
    }

    /// `ℝ × Σ` where `Σ` is the surface of revolution of `y = f(x)` about the
    /// x-axis, on coordinates `(t, u, v)` with `u` the rotation angle and `v`
    /// the axial coordinate.
    pub fn product_revolution(profile: Profile) -> Self {
        ChartMetric::new(
            Diagonal::ProductRevolution(profile),
            CurvatureTag::Generic,
            "product_revolution",
        )
    }

    /// Warped product `I ×_f ℝ²` with `g = dt² + f(t)²(dx² + dy²)` on `(t, x, y)`.
    pub fn warped(profile: Profile) -> Self {
        ChartMetric::new(Diagonal::Warped(profile), CurvatureTag::Generic, "warped")
    }
}

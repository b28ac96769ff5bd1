//! Grids, stencils and interpolation shared by the sampling routines.

use crate::error::{GeometryError, Result};

/// Uniform sampling of a closed interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub end: f64,
    pub samples: usize,
}

impl Grid {
    pub fn new(start: f64, end: f64, samples: usize) -> Result<Self> {
        if samples == 0 || !start.is_finite() || !end.is_finite() {
            return Err(GeometryError::InvalidInput(format!(
                "grid [{start}, {end}] with {samples} samples"
            )));
        }
        if samples == 1 && start != end {
            return Err(GeometryError::InvalidInput(
                "a single-sample grid must have start == end".into(),
            ));
        }
        Ok(Grid { start, end, samples })
    }

    pub fn spacing(&self) -> f64 {
        if self.samples < 2 {
            0.0
        } else {
            (self.end - self.start) / (self.samples - 1) as f64
        }
    }

    pub fn at(&self, i: usize) -> f64 {
        if i + 1 == self.samples {
            self.end
        } else {
            self.start + self.spacing() * i as f64
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.samples).map(|i| self.at(i)).collect()
    }
}

/// Fourth-order finite-difference derivative of uniformly spaced samples.
///
/// Central five-point stencils in the interior, one-sided five-point
/// stencils on the two first and two last samples.
pub fn derivative_5pt(values: &[f64], h: f64) -> Result<Vec<f64>> {
    let n = values.len();
    if n < 5 {
        return Err(GeometryError::InvalidInput(format!(
            "five-point derivative needs at least 5 samples, got {n}"
        )));
    }
    let f = values;
    let c = 12.0 * h;
    let mut out = vec![0.0; n];
    out[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / c;
    out[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / c;
    for i in 2..n - 2 {
        out[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / c;
    }
    let m = n - 1;
    out[m - 1] = (3.0 * f[m] + 10.0 * f[m - 1] - 18.0 * f[m - 2] + 6.0 * f[m - 3] - f[m - 4]) / c;
    out[m] = (25.0 * f[m] - 48.0 * f[m - 1] + 36.0 * f[m - 2] - 16.0 * f[m - 3] + 3.0 * f[m - 4]) / c;
    Ok(out)
}

/// Removes 2π jumps so consecutive samples differ by less than π.
/// NaN samples are skipped and do not reset the branch.
pub fn unwrap_angles(angles: &mut [f64]) {
    let two_pi = std::f64::consts::TAU;
    let mut prev: Option<f64> = None;
    for a in angles.iter_mut() {
        if a.is_nan() {
            continue;
        }
        if let Some(p) = prev {
            let k = ((p - *a) / two_pi).round();
            *a += k * two_pi;
        }
        prev = Some(*a);
    }
}

/// Natural cubic spline through `(x_i, y_i)` with strictly increasing `x`.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(GeometryError::InvalidInput(
                "spline needs at least two knots and matching lengths".into(),
            ));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(GeometryError::InvalidInput(
                "spline knots must be strictly increasing".into(),
            ));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::InvalidInput(
                "spline values must be finite".into(),
            ));
        }
        // Second derivatives from the tridiagonal system (Thomas algorithm).
        let mut m = vec![0.0; n];
        if n > 2 {
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            let mut sup = vec![0.0; k];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                diag[i - 1] = 2.0 * (h0 + h1);
                sup[i - 1] = h1;
                rhs[i - 1] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            for i in 1..k {
                let sub = x[i + 1] - x[i];
                let w = sub / diag[i - 1];
                diag[i] -= w * sup[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            let mut sol = vec![0.0; k];
            sol[k - 1] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                sol[i] = (rhs[i] - sup[i] * sol[i + 1]) / diag[i];
            }
            m[1..n - 1].copy_from_slice(&sol);
        }
        Ok(CubicSpline { x, y, m })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    /// Evaluates the spline; outside the knot range the end cubic is extended.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

/// Cubic Hermite interpolation on one interval with endpoint slopes.
pub fn hermite(t: f64, t0: f64, t1: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> (f64, f64) {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = (6.0 * s2 - 6.0 * s) / h;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = (-6.0 * s2 + 6.0 * s) / h;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let slope = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
    (value, slope)
}

//! Ruled surfaces from prescribed Sannia invariants.
//!
//! With unit ruling (`κ₀ = 1`) the base curve and the Sannia frame solve
//!
//! ```text
//! α'  = cos φ cos θ X₁ + sin φ X₂ + cos φ sin θ X₃
//! X₁' = κ₁ X₂              − Γ(α', X₁)
//! X₂' = −κ₁ X₁ + κ₂ X₃     − Γ(α', X₂)
//! X₃' = −κ₂ X₂             − Γ(α', X₃)
//! ```
//!
//! in chart components. The frame is not re-orthonormalized; its drift is
//! reported by [`ReconstructedSurface::orthonormality_drift`].

use std::io::Write;
use std::sync::Arc;

use crate::error::{GeometryError, Result};
use crate::export::fmt_real;
use crate::linalg::{put, vec_from_slice, Vec3};
use crate::manifold::ChartMetric;
use crate::numeric::{hermite, CubicSpline};
use crate::ode::integrate;
use crate::ruled_surface::{BaseData, BaseProvider, RuledSurfaceSpec};
use crate::sannia::{InvariantTable, SanniaFrame};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Tolerance on the initial frame and on `κ₀ = 1` in tabulated prescriptions.
pub const FRAME_TOLERANCE: f64 = 1e-10;
pub const UNIT_RULING_TOLERANCE: f64 = 1e-6;

/// Invariants `κ₁, κ₂, θ, φ` on `[u0, u_end]` (either order) with initial data.
#[derive(Clone)]
pub struct InvariantPrescription {
    pub u0: f64,
    pub u_end: f64,
    pub kappa1: ScalarFn,
    pub kappa2: ScalarFn,
    pub theta: ScalarFn,
    pub phi: ScalarFn,
    pub p0: Vec3,
    pub initial_frame: SanniaFrame,
}

impl std::fmt::Debug for InvariantPrescription {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("InvariantPrescription")
            .field("u0", &self.u0)
            .field("u_end", &self.u_end)
            .field("p0", &self.p0)
            .field("initial_frame", &self.initial_frame)
            .finish()
    }
}

impl InvariantPrescription {
    #[allow(clippy::too_many_arguments)]
    pub fn from_fns(
        u0: f64,
        u_end: f64,
        kappa1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        kappa2: impl Fn(f64) -> f64 + Send + Sync + 'static,
        theta: impl Fn(f64) -> f64 + Send + Sync + 'static,
        phi: impl Fn(f64) -> f64 + Send + Sync + 'static,
        p0: Vec3,
        initial_frame: SanniaFrame,
    ) -> Self {
        InvariantPrescription {
            u0,
            u_end,
            kappa1: Arc::new(kappa1),
            kappa2: Arc::new(kappa2),
            theta: Arc::new(theta),
            phi: Arc::new(phi),
            p0,
            initial_frame,
        }
    }

    /// Natural cubic splines through tabulated invariants, starting at the
    /// first row. `κ₀` must be 1 and `θ` defined on every row.
    pub fn from_table(table: &InvariantTable, p0: Vec3, initial_frame: SanniaFrame) -> Result<Self> {
        if table.len() < 2 {
            return Err(GeometryError::InvalidInput("invariant table needs at least 2 rows".into()));
        }
        if let Some(i) = table.kappa0.iter().position(|k| (k - 1.0).abs() > UNIT_RULING_TOLERANCE) {
            return Err(GeometryError::InvalidInput(format!(
                "reconstruction needs a unit ruling, kappa0 = {} at u = {}",
                table.kappa0[i], table.u[i]
            )));
        }
        if let Some(i) = table.theta.iter().position(|t| !t.is_finite()) {
            return Err(GeometryError::InvalidInput(format!("theta undefined at u = {}", table.u[i])));
        }
        let spline = |y: &Vec<f64>| -> Result<ScalarFn> {
            let s = CubicSpline::new(table.u.clone(), y.clone())?;
            Ok(Arc::new(move |u| s.eval(u)))
        };
        Ok(InvariantPrescription {
            u0: table.u[0],
            u_end: table.u[table.len() - 1],
            kappa1: spline(&table.kappa1)?,
            kappa2: spline(&table.kappa2)?,
            theta: spline(&table.theta)?,
            phi: spline(&table.phi)?,
            p0,
            initial_frame,
        })
    }

    fn validate(&self, metric: &ChartMetric) -> Result<()> {
        if !metric.contains(&self.p0) {
            return Err(GeometryError::outside(&self.p0));
        }
        let f = &self.initial_frame;
        let err = f.orthonormality_error(metric, &self.p0)?;
        let vol = metric.volume_form(&self.p0, &f.x1, &f.x2, &f.x3)?;
        if err > FRAME_TOLERANCE || !(vol > 0.0) {
            return Err(GeometryError::InvalidInput(format!(
                "initial frame must be positively oriented and orthonormal (error {err:e}, volume {vol})"
            )));
        }
        Ok(())
    }

    fn rhs(&self, metric: &ChartMetric, u: f64, y: &[f64; 12]) -> Result<[f64; 12]> {
        let k1 = (self.kappa1)(u);
        if !(k1 > 0.0) {
            return Err(GeometryError::NonPositiveKappa1 { u, kappa1: k1 });
        }
        let k2 = (self.kappa2)(u);
        let (st, ct) = (self.theta)(u).sin_cos();
        let (sp, cp) = (self.phi)(u).sin_cos();
        let x = vec_from_slice(&y[0..3]);
        let y1 = vec_from_slice(&y[3..6]);
        let y2 = vec_from_slice(&y[6..9]);
        let y3 = vec_from_slice(&y[9..12]);
        let c = metric.christoffel_at(&x)?;
        let a = y1 * (cp * ct) + y2 * sp + y3 * (cp * st);
        let mut out = [0.0; 12];
        put(&mut out[0..3], &a);
        put(&mut out[3..6], &(y2 * k1 - c.contract(&a, &y1)));
        put(&mut out[6..9], &(-y1 * k1 + y3 * k2 - c.contract(&a, &y2)));
        put(&mut out[9..12], &(-y2 * k2 - c.contract(&a, &y3)));
        Ok(out)
    }
}

/// Samples of a reconstructed base curve and frame.
#[derive(Debug, Clone)]
pub struct ReconstructedSurface {
    pub metric: ChartMetric,
    pub u: Vec<f64>,
    pub alpha: Vec<Vec3>,
    pub frames: Vec<SanniaFrame>,
    /// `dα/du` and `dX₁/du` at the samples, from the right-hand side.
    pub alpha_derivative: Vec<Vec3>,
    pub ruling_derivative: Vec<Vec3>,
    /// Parameter at which the curve left the chart, if it did.
    pub exit: Option<f64>,
    pub step: f64,
}

/// Integrates the frame system from `u0` toward `u_end`.
pub fn reconstruct(metric: &ChartMetric, presc: &InvariantPrescription, step: f64) -> Result<ReconstructedSurface> {
    presc.validate(metric)?;
    let f = &presc.initial_frame;
    let mut y0 = [0.0; 12];
    put(&mut y0[0..3], &presc.p0);
    put(&mut y0[3..6], &f.x1);
    put(&mut y0[6..9], &f.x2);
    put(&mut y0[9..12], &f.x3);
    let rhs = |u: f64, y: &[f64; 12]| presc.rhs(metric, u, y);
    let tr = integrate(rhs, |y| metric.contains(&vec_from_slice(&y[0..3])), presc.u0, y0, presc.u_end, step)?;
    let mut rec = ReconstructedSurface {
        metric: metric.clone(),
        u: Vec::with_capacity(tr.params.len()),
        alpha: Vec::with_capacity(tr.params.len()),
        frames: Vec::with_capacity(tr.params.len()),
        alpha_derivative: Vec::with_capacity(tr.params.len()),
        ruling_derivative: Vec::with_capacity(tr.params.len()),
        exit: tr.exit,
        step,
    };
    for (u, y) in tr.params.iter().zip(&tr.states) {
        let d = rhs(*u, y)?;
        rec.u.push(*u);
        rec.alpha.push(vec_from_slice(&y[0..3]));
        rec.frames.push(SanniaFrame {
            x1: vec_from_slice(&y[3..6]),
            x2: vec_from_slice(&y[6..9]),
            x3: vec_from_slice(&y[9..12]),
        });
        rec.alpha_derivative.push(vec_from_slice(&d[0..3]));
        rec.ruling_derivative.push(vec_from_slice(&d[3..6]));
    }
    Ok(rec)
}

impl ReconstructedSurface {
    /// `max_u max_ij |g(X_i, X_j) − δ_ij|`.
    pub fn orthonormality_drift(&self) -> Result<f64> {
        let mut worst = 0.0_f64;
        for (p, f) in self.alpha.iter().zip(&self.frames) {
            worst = worst.max(f.orthonormality_error(&self.metric, p)?);
        }
        Ok(worst)
    }

    /// Achieved parameter interval (increasing).
    pub fn interval(&self) -> (f64, f64) {
        let (a, b) = (self.u[0], self.u[self.u.len() - 1]);
        (a.min(b), a.max(b))
    }

    pub fn rulings(&self) -> Vec<Vec3> {
        self.frames.iter().map(|f| f.x1).collect()
    }

    /// The ruled surface with base `α` and ruling `X₁`, interpolated between
    /// samples by cubic Hermite polynomials in each component.
    pub fn to_spec(&self) -> RuledSurfaceSpec {
        let mut idx: Vec<usize> = (0..self.u.len()).collect();
        if self.u.len() > 1 && self.u[1] < self.u[0] {
            idx.reverse();
        }
        let pick = |v: &Vec<Vec3>| idx.iter().map(|&i| v[i]).collect::<Vec<_>>();
        let base = SampledBase {
            u: idx.iter().map(|&i| self.u[i]).collect(),
            alpha: pick(&self.alpha),
            dalpha: pick(&self.alpha_derivative),
            ruling: pick(&self.rulings()),
            druling: pick(&self.ruling_derivative),
        };
        RuledSurfaceSpec::new(self.metric.clone(), base, self.interval())
    }

    /// CSV with columns `u, x, y, z` and the frame components `X_i^a`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        let io = |e: csv::Error| GeometryError::InvalidInput(format!("writing curve: {e}"));
        let mut header = vec!["u".to_string(), "x".into(), "y".into(), "z".into()];
        for i in 1..=3 {
            for a in 1..=3 {
                header.push(format!("X{i}_{a}"));
            }
        }
        out.write_record(&header).map_err(io)?;
        for ((u, p), f) in self.u.iter().zip(&self.alpha).zip(&self.frames) {
            let mut row = vec![*u, p.x, p.y, p.z];
            for v in f.vectors() {
                row.extend(v.iter());
            }
            out.write_record(row.iter().map(|x| fmt_real(*x))).map_err(io)?;
        }
        out.flush().map_err(|e| GeometryError::InvalidInput(format!("writing curve: {e}")))?;
        Ok(())
    }
}

/// Base curve and ruling from samples with derivatives, interpolated by
/// cubic Hermite polynomials.
#[derive(Debug, Clone)]
pub struct SampledBase {
    u: Vec<f64>,
    alpha: Vec<Vec3>,
    dalpha: Vec<Vec3>,
    ruling: Vec<Vec3>,
    druling: Vec<Vec3>,
}

impl SampledBase {
    fn interp(&self, i: usize, u: f64, y: &[Vec3], d: &[Vec3]) -> (Vec3, Vec3) {
        let mut val = Vec3::zeros();
        let mut der = Vec3::zeros();
        for a in 0..3 {
            let (v, s) = hermite(u, self.u[i], self.u[i + 1], y[i][a], y[i + 1][a], d[i][a], d[i + 1][a]);
            val[a] = v;
            der[a] = s;
        }
        (val, der)
    }
}

impl BaseProvider for SampledBase {
    fn base(&self, metric: &ChartMetric, u: f64) -> Result<BaseData> {
        let n = self.u.len();
        if n == 1 {
            if u != self.u[0] {
                return Err(GeometryError::ParameterOutOfRange(u));
            }
            let cov = metric.covariant_derivative_along(&self.alpha[0], &self.dalpha[0], &self.ruling[0], &self.druling[0])?;
            return Ok(BaseData { u, point: self.alpha[0], velocity: self.dalpha[0], ruling: self.ruling[0], cov_ruling: cov });
        }
        let i = match self.u.partition_point(|&x| x <= u) {
            0 => 0,
            k => (k - 1).min(n - 2),
        };
        let (point, velocity) = self.interp(i, u, &self.alpha, &self.dalpha);
        let (ruling, druling) = self.interp(i, u, &self.ruling, &self.druling);
        let cov_ruling = metric.covariant_derivative_along(&point, &velocity, &ruling, &druling)?;
        Ok(BaseData { u, point, velocity, ruling, cov_ruling })
    }
}

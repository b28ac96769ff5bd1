//! Sannia frame `(X₁, X₂, X₃)` along the base curve and the invariants
//! `κ₀, κ₁, κ₂, θ, φ`.
//!
//! `X₁ = Z/κ₀`, `X₂ = ∇_{α'}X₁/κ₁` and `X₃ = X₁ × X₂`. `κ₂ = g(∇_{α'}X₂, X₃)`
//! needs the derivative of the frame along `α`, which is taken by five-point
//! differences over a uniform `u` grid plus the connection term.

use std::io::{Read, Write};

use rayon::prelude::*;

use crate::error::{GeometryError, Result};
use crate::export::fmt_real;
use crate::linalg::Vec3;
use crate::manifold::ChartMetric;
use crate::numeric::{derivative_5pt, unwrap_angles, CubicSpline, Grid};
use crate::ruled_surface::{BaseData, RuledSurfaceSpec};

/// General-position threshold on `κ₁`.
pub const EPS_GP: f64 = 1e-7;

/// `cos φ` below this makes `θ` undefined.
pub const EPS_ANGLE: f64 = 1e-12;

/// Positively oriented orthonormal frame at a point of the base curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SanniaFrame {
    pub x1: Vec3,
    pub x2: Vec3,
    pub x3: Vec3,
}

impl SanniaFrame {
    pub fn identity() -> Self {
        SanniaFrame { x1: Vec3::x(), x2: Vec3::y(), x3: Vec3::z() }
    }

    pub fn vectors(&self) -> [Vec3; 3] {
        [self.x1, self.x2, self.x3]
    }

    /// `max |g(X_i, X_j) − δ_ij|` at `p`.
    pub fn orthonormality_error(&self, metric: &ChartMetric, p: &Vec3) -> Result<f64> {
        let g = metric.components(p)?;
        let v = self.vectors();
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                let d = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((v[i].dot(&(g * v[j])) - d).abs());
            }
        }
        Ok(worst)
    }
}

/// Outcome of the pointwise general-position test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneralPosition {
    pub general: bool,
    pub kappa1: f64,
    /// Normalized Gram determinant of `(Z, ∇_{α'}Z)`, for diagnostics.
    pub normalized_gram: f64,
}

/// The frame at one base point together with `κ₀`, `κ₁`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramePoint {
    pub u: f64,
    pub point: Vec3,
    pub velocity: Vec3,
    pub frame: SanniaFrame,
    pub kappa0: f64,
    pub kappa1: f64,
}

/// Frame from base data. `None` in the frame slot when `κ₁ ≤ EPS_GP`.
fn frame_from_base(metric: &ChartMetric, b: &BaseData) -> Result<(GeneralPosition, Option<FramePoint>)> {
    let c = metric.christoffel_at(&b.point)?;
    let kappa0 = c.norm(&b.ruling);
    let x1 = b.ruling / kappa0;
    let dx1 = (b.cov_ruling - x1 * c.inner(&b.cov_ruling, &x1)) / kappa0;
    let kappa1 = c.norm(&dx1);
    let gp = GeneralPosition {
        general: kappa1 > EPS_GP,
        kappa1,
        normalized_gram: c.normalized_gram(&b.ruling, &b.cov_ruling),
    };
    if !gp.general {
        return Ok((gp, None));
    }
    let x2 = dx1 / kappa1;
    let x3 = c.cross(&x1, &x2);
    let fp = FramePoint {
        u: b.u,
        point: b.point,
        velocity: b.velocity,
        frame: SanniaFrame { x1, x2, x3 },
        kappa0,
        kappa1,
    };
    Ok((gp, Some(fp)))
}

pub fn is_general_position(spec: &RuledSurfaceSpec, u: f64) -> Result<GeneralPosition> {
    let b = spec.base_data(u)?;
    Ok(frame_from_base(&spec.metric, &b)?.0)
}

pub fn frame_point(spec: &RuledSurfaceSpec, u: f64) -> Result<FramePoint> {
    let b = spec.base_data(u)?;
    match frame_from_base(&spec.metric, &b)? {
        (_, Some(fp)) => Ok(fp),
        (gp, None) => Err(GeometryError::NotGeneralPosition { u, kappa1: gp.kappa1 }),
    }
}

pub fn sannia_frame_at(spec: &RuledSurfaceSpec, u: f64) -> Result<SanniaFrame> {
    Ok(frame_point(spec, u)?.frame)
}

/// The six invariant columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InvariantTable {
    pub u: Vec<f64>,
    pub kappa0: Vec<f64>,
    pub kappa1: Vec<f64>,
    pub kappa2: Vec<f64>,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
}

const CSV_HEADER: [&str; 6] = ["u", "kappa0", "kappa1", "kappa2", "theta", "phi"];

impl InvariantTable {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        let io = |e: csv::Error| GeometryError::InvalidInput(format!("writing invariants: {e}"));
        out.write_record(CSV_HEADER).map_err(io)?;
        for i in 0..self.len() {
            let row = [self.u[i], self.kappa0[i], self.kappa1[i], self.kappa2[i], self.theta[i], self.phi[i]];
            out.write_record(row.iter().map(|x| fmt_real(*x))).map_err(io)?;
        }
        out.flush().map_err(|e| GeometryError::InvalidInput(format!("writing invariants: {e}")))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let bad = |msg: String| GeometryError::InvalidInput(format!("invariant CSV: {msg}"));
        let header = rd.headers().map_err(|e| bad(e.to_string()))?.clone();
        let cols: Vec<usize> = CSV_HEADER
            .iter()
            .map(|name| {
                header
                    .iter()
                    .position(|h| h == *name)
                    .ok_or_else(|| bad(format!("missing column {name}")))
            })
            .collect::<Result<_>>()?;
        let mut t = InvariantTable::default();
        for (line, rec) in rd.records().enumerate() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let mut vals = [0.0; 6];
            for (slot, &c) in vals.iter_mut().zip(&cols) {
                let field = rec.get(c).ok_or_else(|| bad(format!("short row {}", line + 2)))?;
                *slot = field
                    .parse()
                    .map_err(|_| bad(format!("row {}: cannot parse {field:?}", line + 2)))?;
            }
            t.u.push(vals[0]);
            t.kappa0.push(vals[1]);
            t.kappa1.push(vals[2]);
            t.kappa2.push(vals[3]);
            t.theta.push(vals[4]);
            t.phi.push(vals[5]);
        }
        if t.u.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(bad("u must be strictly increasing".into()));
        }
        Ok(t)
    }
}

/// Invariants sampled along the base curve.
#[derive(Debug, Clone, PartialEq)]
pub struct SanniaInvariants {
    pub table: InvariantTable,
    /// `|α'(u)|`.
    pub speed: Vec<f64>,
    /// `dκ₀/du`.
    pub dkappa0: Vec<f64>,
    /// Samples where `cos φ ≈ 0` and `θ` is NaN.
    pub degenerate_angle: Vec<bool>,
    pub frames: Vec<FramePoint>,
}

impl SanniaInvariants {
    /// Distribution parameter on the base curve from the invariants:
    /// `|α'| κ₀² κ₁ cos φ sin θ / (κ₀'² + κ₀² κ₁²)`.
    pub fn distribution_parameter(&self) -> Vec<f64> {
        let t = &self.table;
        (0..t.len())
            .map(|i| {
                let (k0, k1) = (t.kappa0[i], t.kappa1[i]);
                self.speed[i] * k0 * k0 * k1 * t.phi[i].cos() * t.theta[i].sin()
                    / (self.dkappa0[i].powi(2) + k0 * k0 * k1 * k1)
            })
            .collect()
    }

    /// Re-expresses the invariants in arc length `s` of the base curve,
    /// resampled on a uniform `s` grid with the same number of samples.
    /// `κ₁, κ₂` scale by `1/|α'|`; `κ₀, θ, φ` are pointwise.
    pub fn to_arc_length(&self) -> Result<InvariantTable> {
        let t = &self.table;
        let n = t.len();
        if n < 2 {
            return Err(GeometryError::InvalidInput("arc-length resampling needs 2 samples".into()));
        }
        let mut s = vec![0.0; n];
        for i in 1..n {
            s[i] = s[i - 1] + 0.5 * (self.speed[i] + self.speed[i - 1]) * (t.u[i] - t.u[i - 1]);
        }
        let grid = Grid::new(0.0, s[n - 1], n)?;
        // Undefined samples (θ where cos φ = 0) stay undefined on the
        // neighbouring intervals; the spline runs through the defined ones.
        let resample = |y: Vec<f64>| -> Result<Vec<f64>> {
            let (xs, ys): (Vec<f64>, Vec<f64>) =
                s.iter().zip(&y).filter(|(_, v)| v.is_finite()).map(|(a, b)| (*a, *b)).unzip();
            if xs.len() < 2 {
                return Ok(vec![f64::NAN; n]);
            }
            let sp = CubicSpline::new(xs, ys)?;
            Ok(grid
                .points()
                .iter()
                .map(|&x| {
                    let j = s.partition_point(|&si| si <= x).clamp(1, n - 1);
                    if y[j - 1].is_finite() && y[j].is_finite() {
                        sp.eval(x)
                    } else {
                        f64::NAN
                    }
                })
                .collect())
        };
        Ok(InvariantTable {
            u: grid.points(),
            kappa0: resample(t.kappa0.clone())?,
            kappa1: resample((0..n).map(|i| t.kappa1[i] / self.speed[i]).collect())?,
            kappa2: resample((0..n).map(|i| t.kappa2[i] / self.speed[i]).collect())?,
            theta: resample(t.theta.clone())?,
            phi: resample(t.phi.clone())?,
        })
    }
}

/// `κ₂`, `θ`, `φ` and `dκ₀/du` from frames on a uniform grid of spacing `h`.
fn assemble(metric: &ChartMetric, frames: Vec<FramePoint>, h: f64) -> Result<SanniaInvariants> {
    let n = frames.len();
    let mut dx2 = vec![Vec3::zeros(); n];
    for a in 0..3 {
        let comp: Vec<f64> = frames.iter().map(|f| f.frame.x2[a]).collect();
        for (d, v) in dx2.iter_mut().zip(derivative_5pt(&comp, h)?) {
            d[a] = v;
        }
    }
    let kappa0: Vec<f64> = frames.iter().map(|f| f.kappa0).collect();
    let dkappa0 = derivative_5pt(&kappa0, h)?;
    let mut t = InvariantTable {
        u: frames.iter().map(|f| f.u).collect(),
        kappa0,
        kappa1: frames.iter().map(|f| f.kappa1).collect(),
        ..Default::default()
    };
    let mut speed = Vec::with_capacity(n);
    let mut degenerate_angle = Vec::with_capacity(n);
    for (f, d) in frames.iter().zip(&dx2) {
        let c = metric.christoffel_at(&f.point)?;
        let cov = d + c.contract(&f.velocity, &f.frame.x2);
        t.kappa2.push(c.inner(&cov, &f.frame.x3));
        let s = c.norm(&f.velocity);
        let tangent = f.velocity / s;
        let c1 = c.inner(&tangent, &f.frame.x1);
        let c2 = c.inner(&tangent, &f.frame.x2);
        let c3 = c.inner(&tangent, &f.frame.x3);
        let cos_phi = c1.hypot(c3);
        let phi = c2.atan2(cos_phi);
        let degenerate = cos_phi < EPS_ANGLE;
        t.phi.push(phi);
        t.theta.push(if degenerate { f64::NAN } else { c3.atan2(c1) });
        speed.push(s);
        degenerate_angle.push(degenerate);
    }
    unwrap_angles(&mut t.theta);
    Ok(SanniaInvariants { table: t, speed, dkappa0, degenerate_angle, frames })
}

/// Invariants of a surface on a uniform grid of at least five samples.
pub fn sannia_invariants(spec: &RuledSurfaceSpec, grid: &Grid) -> Result<SanniaInvariants> {
    let frames = grid
        .points()
        .par_iter()
        .map(|&u| frame_point(spec, u))
        .collect::<Result<Vec<_>>>()?;
    assemble(&spec.metric, frames, grid.spacing())
}

/// Invariants recovered from samples of a base curve and ruling field alone
/// (uniform `u`, at least five samples); `α'` and `∇_{α'}Z` are differenced.
pub fn invariants_from_samples(metric: &ChartMetric, us: &[f64], alpha: &[Vec3], ruling: &[Vec3]) -> Result<SanniaInvariants> {
    let n = us.len();
    if alpha.len() != n || ruling.len() != n || n < 5 {
        return Err(GeometryError::InvalidInput("need matching sample arrays of length >= 5".into()));
    }
    let h = (us[n - 1] - us[0]) / (n - 1) as f64;
    if us.windows(2).any(|w| ((w[1] - w[0]) - h).abs() > 1e-9 * h.abs().max(1.0)) {
        return Err(GeometryError::InvalidInput("samples must be uniformly spaced in u".into()));
    }
    let diff = |xs: &[Vec3]| -> Result<Vec<Vec3>> {
        let mut out = vec![Vec3::zeros(); n];
        for a in 0..3 {
            let comp: Vec<f64> = xs.iter().map(|x| x[a]).collect();
            for (o, v) in out.iter_mut().zip(derivative_5pt(&comp, h)?) {
                o[a] = v;
            }
        }
        Ok(out)
    };
    let dalpha = diff(alpha)?;
    let dz = diff(ruling)?;
    let frames = (0..n)
        .map(|i| {
            let cov = metric.covariant_derivative_along(&alpha[i], &dalpha[i], &ruling[i], &dz[i])?;
            let b = BaseData { u: us[i], point: alpha[i], velocity: dalpha[i], ruling: ruling[i], cov_ruling: cov };
            match frame_from_base(metric, &b)? {
                (_, Some(fp)) => Ok(fp),
                (gp, None) => Err(GeometryError::NotGeneralPosition { u: us[i], kappa1: gp.kappa1 }),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(metric, frames, h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ruled_surface::CurveFn;
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
    fn cylinder_is_not_in_general_position() {
        let s = RuledSurfaceSpec::from_curves(
            ChartMetric::euclidean(),
            CurveFn::new(|u| Vec3::new(u.cos(), u.sin(), 0.0)),
            CurveFn::new(|_| Vec3::z()),
            (0.0, 1.0),
        );
        let gp = is_general_position(&s, 0.5).unwrap();
        assert!(!gp.general && gp.kappa1 == 0.0);
        assert!(matches!(sannia_frame_at(&s, 0.5), Err(GeometryError::NotGeneralPosition { .. })));
    }

    #[test]
    fn helicoid_frame_and_invariants() {
        let s = helicoid();
        let f = sannia_frame_at(&s, 0.0).unwrap();
        assert_eq!(f, SanniaFrame::identity());
        assert!(is_general_position(&s, 1.0).unwrap().general);
        let inv = sannia_invariants(&s, &Grid::new(-1.0, 1.0, 41).unwrap()).unwrap();
        let t = &inv.table;
        for i in 0..t.len() {
            assert!((t.kappa0[i] - 1.0).abs() < 1e-14);
            assert!((t.kappa1[i] - 1.0).abs() < 1e-14);
            assert!(t.kappa2[i].abs() < 1e-6);
            assert!(t.phi[i].abs() < 1e-14);
            assert!((t.theta[i] - FRAC_PI_2).abs() < 1e-14);
        }
        for l in inv.distribution_parameter() {
            assert!((l - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn frame_is_orthonormal_and_positive() {
        let m = ChartMetric::half_space(-1.0);
        let s = RuledSurfaceSpec::from_curves(
            m.clone(),
            CurveFn::new(|u| Vec3::new(u, 0.3 * u * u, 1.0 + 0.2 * u)),
            CurveFn::new(|u| Vec3::new(u.sin(), 1.0, u.cos())),
            (-1.0, 1.0),
        );
        for u in [-0.8, 0.3, 0.6] {
            let fp = frame_point(&s, u).unwrap();
            assert!(fp.frame.orthonormality_error(&m, &fp.point).unwrap() < 1e-12);
            let vol = m.volume_form(&fp.point, &fp.frame.x1, &fp.frame.x2, &fp.frame.x3).unwrap();
            assert!((vol - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn angle_identity_and_degenerate_samples() {
        let s = RuledSurfaceSpec::from_curves(
            ChartMetric::sphere(1.0),
            CurveFn::new(|u| Vec3::new(u, 0.2, -0.1 * u)),
            CurveFn::new(|u| Vec3::new(0.3, u.cos(), u.sin())),
            (-1.0, 1.0),
        );
        let inv = sannia_invariants(&s, &Grid::new(-1.0, 1.0, 21).unwrap()).unwrap();
        for i in 0..inv.table.len() {
            let (th, ph) = (inv.table.theta[i], inv.table.phi[i]);
            let sum = (ph.cos() * th.cos()).powi(2) + ph.sin().powi(2) + (ph.cos() * th.sin()).powi(2);
            assert!((sum - 1.0).abs() < 1e-14);
        }
        // α' along X₂: Z rotates in the plane of α', so ∇Z ∥ α'.
        let d = RuledSurfaceSpec::from_curves(
            ChartMetric::euclidean(),
            CurveFn::new(|u| Vec3::new(u, 0.0, 0.0)),
            CurveFn::new(|u| Vec3::new(-u.sin(), u.cos(), 0.0)),
            (-0.5, 0.5),
        );
        let inv = sannia_invariants(&d, &Grid::new(-0.5, 0.5, 11).unwrap()).unwrap();
        assert!(inv.degenerate_angle[5] && inv.table.theta[5].is_nan());
    }

    #[test]
    fn frame_derivatives_match_structure_equations() {
        let m = ChartMetric::sphere(1.0);
        let s = RuledSurfaceSpec::from_curves(
            m.clone(),
            CurveFn::new(|u| Vec3::new(0.5 * u.cos(), 0.5 * u.sin(), 0.2 * u)),
            CurveFn::new(|u| Vec3::new(1.0, u, 0.5)),
            (-1.0, 1.0),
        );
        let h = 1e-3;
        let grid = Grid::new(-0.5, 0.5, 1001).unwrap();
        let inv = sannia_invariants(&s, &grid).unwrap();
        let fr = &inv.frames;
        for i in [200, 500, 800] {
            let c = m.christoffel_at(&fr[i].point).unwrap();
            let cov = |pick: fn(&SanniaFrame) -> Vec3| {
                let d = (pick(&fr[i + 1].frame) - pick(&fr[i - 1].frame)) / (2.0 * h);
                d + c.contract(&fr[i].velocity, &pick(&fr[i].frame))
            };
            let f = fr[i].frame;
            let (k1, k2) = (inv.table.kappa1[i], inv.table.kappa2[i]);
            assert!((cov(|f| f.x1) - f.x2 * k1).norm() < 1e-5);
            assert!((cov(|f| f.x2) - (-f.x1 * k1 + f.x3 * k2)).norm() < 1e-5);
            assert!((cov(|f| f.x3) + f.x2 * k2).norm() < 1e-5);
        }
    }

    #[test]
    fn samples_reproduce_pointwise_invariants() {
        let s = helicoid();
        let grid = Grid::new(0.0, 1.0, 101).unwrap();
        let us = grid.points();
        let a: Vec<Vec3> = us.iter().map(|&u| Vec3::new(0.0, 0.0, u)).collect();
        let z: Vec<Vec3> = us.iter().map(|&u| Vec3::new(u.cos(), u.sin(), 0.0)).collect();
        let from = invariants_from_samples(&s.metric, &us, &a, &z).unwrap();
        let direct = sannia_invariants(&s, &grid).unwrap();
        for i in 0..us.len() {
            assert!((from.table.kappa1[i] - direct.table.kappa1[i]).abs() < 1e-6);
            assert!((from.table.theta[i] - direct.table.theta[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn csv_round_trip() {
        let inv = sannia_invariants(&helicoid(), &Grid::new(0.0, 1.0, 6).unwrap()).unwrap();
        let mut buf = Vec::new();
        inv.table.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("u,kappa0,kappa1,kappa2,theta,phi\n"));
        assert_eq!(InvariantTable::read_csv(&buf[..]).unwrap(), inv.table);
        assert!(InvariantTable::read_csv("u,kappa0\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn arc_length_rescales_curvatures() {
        // Helicoid with base speed 2.
        let s = RuledSurfaceSpec::from_curves(
            ChartMetric::euclidean(),
            CurveFn::new(|u| Vec3::new(0.0, 0.0, 2.0 * u)),
            CurveFn::new(|u| Vec3::new(u.cos(), u.sin(), 0.0)),
            (0.0, 1.0),
        );
        let inv = sannia_invariants(&s, &Grid::new(0.0, 1.0, 11).unwrap()).unwrap();
        let t = inv.to_arc_length().unwrap();
        assert!((t.u[10] - 2.0).abs() < 1e-9);
        assert!(t.kappa1.iter().all(|k| (k - 0.5).abs() < 1e-9));
    }

    #[test]
    fn arc_length_keeps_undefined_theta() {
        let spec = crate::surfaces::bundled("example3").unwrap().spec().unwrap();
        let inv = sannia_invariants(&spec, &Grid::new(0.0, 6.0, 13).unwrap()).unwrap();
        assert!(inv.degenerate_angle.iter().all(|&d| d));
        let t = inv.to_arc_length().unwrap();
        assert!(t.theta.iter().all(|x| x.is_nan()));
        assert!(t.phi.iter().all(|p| (p - FRAC_PI_2).abs() < 1e-9));
    }
}

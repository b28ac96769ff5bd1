//! Central points and striction curves through the Jacobi evolution function
//! `F = g(∇_{X_v}X_u, X_u) = ½ ∂_v |X_u|²`.

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;

use crate::error::{GeometryError, Result};
use crate::export::fmt_real;
use crate::linalg::{vec_from_slice, Vec3};
use crate::manifold::{ChartMetric, CurvatureTensors};
use crate::numeric::Grid;
use crate::ruled_surface::{
    curvature_from_jet, jet_from_state, BaseData, BaseProvider, RuledSurfaceSpec, RulingSweep, EPS_REG,
};
use crate::sannia::is_general_position;

/// `|F|` accepted at a root.
pub const EPS_ROOT: f64 = 1e-10;
/// Bracket width at which bisection stops.
pub const ROOT_PARAM_TOL: f64 = 1e-9;
/// Coarse samples per ruling.
pub const COARSE_SAMPLES: usize = 64;
/// `|F|` below which a local minimum without sign change is a tangential root.
pub const EPS_TOUCH: f64 = 1e-8;
/// Tolerance on `|κ₁ − √−k|` in the hyperbolic classifier.
pub const EPS_CLASS: f64 = 1e-6;
/// Step of the central difference for `∇R` along a ruling.
pub const CURVATURE_DERIVATIVE_STEP: f64 = 1e-4;
/// Tolerance on unit-length and orthogonality hypotheses.
pub const HYPOTHESIS_TOLERANCE: f64 = 1e-6;

/// `F` and its first two derivatives along the ruling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiEvolutionSample {
    pub u: f64,
    pub v: f64,
    pub f: f64,
    pub dfdv: f64,
    pub d2fdv2: f64,
}

/// `g((∇_V R)(V, U)V, U)` at the point of `t`, with `∇R` differenced along `V`.
fn covariant_curvature_term(metric: &ChartMetric, t: &CurvatureTensors, v: &Vec3, u: &Vec3) -> Result<f64> {
    if metric.tag().constant().is_some() {
        return Ok(0.0);
    }
    let x = t.connection.point;
    let h = CURVATURE_DERIVATIVE_STEP;
    let plus = metric.riemann_at(&(x + v * h))?;
    let minus = metric.riemann_at(&(x - v * h))?;
    let c = &t.connection;
    let gv = |w: &Vec3| c.contract(v, w);
    let mut w = (plus.apply(v, u, v) - minus.apply(v, u, v)) / (2.0 * h);
    w += gv(&t.apply(v, u, v));
    w -= t.apply(v, u, &gv(v));
    w -= t.apply(&gv(v), u, v);
    w -= t.apply(v, &gv(u), v);
    Ok(c.inner(&w, u))
}

/// Evolution sample from a joint state `(x, X_v, X_u, ∇_{X_v}X_u)`.
pub fn evolution_from_state(metric: &ChartMetric, u: f64, v: f64, y: &[f64; 12]) -> Result<JacobiEvolutionSample> {
    let x = vec_from_slice(&y[0..3]);
    let xv = vec_from_slice(&y[3..6]);
    let xu = vec_from_slice(&y[6..9]);
    let dxu = vec_from_slice(&y[9..12]);
    let t = metric.riemann_at(&x)?;
    let c = &t.connection;
    let f = c.inner(&dxu, &xu);
    let dfdv = -t.riem(&xv, &xu, &xv, &xu) + c.inner(&dxu, &dxu);
    let d2fdv2 = covariant_curvature_term(metric, &t, &xv, &xu)? - 4.0 * t.riem(&xv, &xu, &xv, &dxu);
    Ok(JacobiEvolutionSample { u, v, f, dfdv, d2fdv2 })
}

/// `F` alone from a joint state.
fn f_from_state(metric: &ChartMetric, y: &[f64; 12]) -> Result<f64> {
    let x = vec_from_slice(&y[0..3]);
    let xu = vec_from_slice(&y[6..9]);
    let dxu = vec_from_slice(&y[9..12]);
    metric.inner(&x, &dxu, &xu)
}

fn require_unit_ruling(metric: &ChartMetric, b: &BaseData) -> Result<()> {
    let n = metric.norm(&b.point, &b.ruling)?;
    if (n - 1.0).abs() > HYPOTHESIS_TOLERANCE {
        return Err(GeometryError::HypothesisViolated(format!(
            "ruling must have unit length, |Z| = {n} at u = {}",
            b.u
        )));
    }
    Ok(())
}

pub fn evaluate_f(spec: &RuledSurfaceSpec, u: f64, v: f64) -> Result<JacobiEvolutionSample> {
    let sweep = RulingSweep::new(spec, u, v.min(0.0), v.max(0.0))?;
    require_unit_ruling(&spec.metric, sweep.base())?;
    evolution_from_state(&spec.metric, u, v, &sweep.state_at(v)?)
}

/// Coefficients of `F` on a ruling of a space form of curvature `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceFormFCoefficients {
    pub c1: f64,
    pub c2: f64,
    pub k: f64,
}

impl SpaceFormFCoefficients {
    /// `C₁ = g(∇_{α'}Z, α')`; `C₂ = (−k|α'|² sin²σ + |∇_{α'}Z|²)/√|4k|`, or `|∇_{α'}Z|²` when `k = 0`.
    pub fn from_base(k: f64, metric: &ChartMetric, b: &BaseData) -> Result<Self> {
        let c = metric.christoffel_at(&b.point)?;
        let aa = c.inner(&b.velocity, &b.velocity);
        let az = c.inner(&b.velocity, &b.ruling);
        let zz = c.inner(&b.ruling, &b.ruling);
        let sin2 = aa - az * az / zz;
        let dz2 = c.inner(&b.cov_ruling, &b.cov_ruling);
        let c1 = c.inner(&b.cov_ruling, &b.velocity);
        let c2 = if k == 0.0 { dz2 } else { (-k * sin2 + dz2) / (4.0 * k.abs()).sqrt() };
        Ok(SpaceFormFCoefficients { c1, c2, k })
    }

    /// `√|4k|`.
    pub fn omega(&self) -> f64 {
        (4.0 * self.k.abs()).sqrt()
    }
}

pub fn spaceform_f(coeffs: &SpaceFormFCoefficients, v: f64) -> f64 {
    let w = coeffs.omega();
    let (c1, c2) = (coeffs.c1, coeffs.c2);
    if coeffs.k > 0.0 {
        c1 * (w * v).cos() + c2 * (w * v).sin()
    } else if coeffs.k < 0.0 {
        c1 * (w * v).cosh() + c2 * (w * v).sinh()
    } else {
        c1 + c2 * v
    }
}

/// Closed-form verdict on one ruling of a space form.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceFormVerdict {
    /// Roots in `v`; for `k > 0` all roots in one geodesic period `[0, 2π/√k)`.
    Found(Vec<f64>),
    /// `k < 0` with `|−C₁/C₂| ≥ 1`: the inverse hyperbolic tangent has no solution.
    NotFound { argument: f64 },
    /// `F ≡ 0` on the ruling.
    Degenerate,
}

/// Arguments closer than this to ±1 put the hyperbolic root at infinity.
const ATANH_MARGIN: f64 = 1e-12;

pub fn spaceform_striction_v(coeffs: &SpaceFormFCoefficients) -> SpaceFormVerdict {
    let (c1, c2, k) = (coeffs.c1, coeffs.c2, coeffs.k);
    if c1.abs() < EPS_ROOT && c2.abs() < EPS_ROOT {
        return SpaceFormVerdict::Degenerate;
    }
    let w = coeffs.omega();
    if k > 0.0 {
        let half = PI / w;
        let v0 = if c2.abs() < EPS_ROOT { 0.5 * half } else { (-c1 / c2).atan() / w };
        let v0 = v0.rem_euclid(half);
        let period = 2.0 * PI / k.sqrt();
        let roots = (0..4).map(|j| v0 + j as f64 * half).filter(|v| *v < period).collect();
        SpaceFormVerdict::Found(roots)
    } else if k < 0.0 {
        let argument = if c2 == 0.0 { f64::INFINITY * (-c1).signum() } else { -c1 / c2 };
        if argument.abs() >= 1.0 - ATANH_MARGIN {
            SpaceFormVerdict::NotFound { argument }
        } else {
            SpaceFormVerdict::Found(vec![argument.atanh() / w])
        }
    } else if c2.sqrt() < EPS_REG {
        SpaceFormVerdict::Degenerate
    } else {
        SpaceFormVerdict::Found(vec![-c1 / c2])
    }
}

/// Closed-form verdict for the ruling at `u` of a constant-curvature surface.
pub fn spaceform_verdict_at(spec: &RuledSurfaceSpec, u: f64) -> Result<Option<SpaceFormVerdict>> {
    let Some(k) = spec.metric.tag().constant() else {
        return Ok(None);
    };
    let b = spec.base_data(u)?;
    require_unit_ruling(&spec.metric, &b)?;
    Ok(Some(spaceform_striction_v(&SpaceFormFCoefficients::from_base(k, &spec.metric, &b)?)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootKind {
    /// `F` changes sign.
    Crossing,
    /// `F` touches zero without changing sign.
    Tangential,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrictionRoot {
    pub v: f64,
    pub f: f64,
    pub point: Vec3,
    pub kind: RootKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NotFoundDiagnostics {
    pub min_abs_f: f64,
    pub v_at_min: f64,
    /// Closed-form verdict when the metric has constant curvature.
    pub closed_form: Option<SpaceFormVerdict>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum RulingVerdict {
    Found(Vec<StrictionRoot>),
    NotFound(NotFoundDiagnostics),
    /// `|F| < EPS_ROOT` on the whole searched range.
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RulingResult {
    pub u: f64,
    pub verdict: RulingVerdict,
    /// Range actually searched.
    pub searched: (f64, f64),
    /// The ruling left the chart inside the requested range.
    pub truncated: bool,
}

impl RulingResult {
    pub fn roots(&self) -> &[StrictionRoot] {
        match &self.verdict {
            RulingVerdict::Found(r) => r,
            _ => &[],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchSample {
    pub u: f64,
    pub v: f64,
    pub point: Vec3,
}

/// Roots on consecutive rulings joined by continuity.
#[derive(Debug, Clone, PartialEq)]
pub struct StrictionBranch {
    pub id: usize,
    pub samples: Vec<BranchSample>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrictionResult {
    pub rulings: Vec<RulingResult>,
    pub branches: Vec<StrictionBranch>,
}

impl StrictionResult {
    /// CSV with columns `u, v_root, x, y, z, branch_id`, branch by branch.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
        let io = |e: csv::Error| GeometryError::InvalidInput(format!("writing striction curves: {e}"));
        out.write_record(["u", "v_root", "x", "y", "z", "branch_id"]).map_err(io)?;
        for b in &self.branches {
            for s in &b.samples {
                let mut row: Vec<String> = [s.u, s.v, s.point.x, s.point.y, s.point.z].iter().map(|x| fmt_real(*x)).collect();
                row.push(b.id.to_string());
                out.write_record(&row).map_err(io)?;
            }
        }
        out.flush().map_err(|e| GeometryError::InvalidInput(format!("writing striction curves: {e}")))?;
        Ok(())
    }
}

fn bisect_root(f: &dyn Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64, mut flo: f64, mut fhi: f64) -> Result<(f64, f64)> {
    while hi - lo > ROOT_PARAM_TOL {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok((mid, 0.0));
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    let v = lo - flo * (hi - lo) / (fhi - flo);
    let fv = f(v)?;
    let mut best = (v, fv);
    for cand in [(lo, flo), (hi, fhi)] {
        if cand.1.abs() < best.1.abs() {
            best = cand;
        }
    }
    Ok(best)
}

fn golden_min_abs(f: &dyn Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c)?.abs();
    let mut fd = f(d)?.abs();
    while b - a > 1e-10 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?.abs();
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?.abs();
        }
    }
    let v = 0.5 * (a + b);
    Ok((v, f(v)?))
}

/// All central points on the ruling at `u` within `v_range`.
pub fn search_ruling(spec: &RuledSurfaceSpec, u: f64, v_range: (f64, f64), samples: usize) -> Result<RulingResult> {
    let (lo, hi) = v_range;
    let sweep = RulingSweep::new(spec, u, lo.min(0.0), hi.max(0.0))?;
    require_unit_ruling(&spec.metric, sweep.base())?;
    let (got_lo, got_hi) = sweep.range();
    let (a, b) = (lo.max(got_lo), hi.min(got_hi));
    let truncated = a > lo || b < hi;
    let metric = &spec.metric;
    let f = |v: f64| -> Result<f64> { f_from_state(metric, &sweep.state_at(v)?) };
    let closed_form = || spaceform_verdict_at(spec, u);
    if !(b > a) {
        let verdict = RulingVerdict::NotFound(NotFoundDiagnostics {
            min_abs_f: f64::NAN,
            v_at_min: f64::NAN,
            closed_form: closed_form()?,
        });
        return Ok(RulingResult { u, verdict, searched: (a, b), truncated });
    }
    let grid = Grid::new(a, b, samples.max(3))?;
    let vs = grid.points();
    let fs = vs.iter().map(|&v| f(v)).collect::<Result<Vec<_>>>()?;
    if fs.iter().all(|x| x.abs() < EPS_ROOT) {
        return Ok(RulingResult { u, verdict: RulingVerdict::Degenerate, searched: (a, b), truncated });
    }
    let mut roots: Vec<(f64, f64, RootKind)> = Vec::new();
    let n = vs.len();
    for i in 0..n {
        if fs[i] == 0.0 {
            roots.push((vs[i], 0.0, RootKind::Crossing));
        } else if i + 1 < n && fs[i] * fs[i + 1] < 0.0 {
            let (v, fv) = bisect_root(&f, vs[i], vs[i + 1], fs[i], fs[i + 1])?;
            roots.push((v, fv, RootKind::Crossing));
        }
    }
    for i in 1..n - 1 {
        let same_sign = fs[i - 1] * fs[i] > 0.0 && fs[i] * fs[i + 1] > 0.0;
        if same_sign && fs[i].abs() <= fs[i - 1].abs() && fs[i].abs() <= fs[i + 1].abs() {
            let (v, fv) = golden_min_abs(&f, vs[i - 1], vs[i + 1])?;
            if fv.abs() < EPS_TOUCH {
                roots.push((v, fv, RootKind::Tangential));
            }
        }
    }
    if let Some(k) = metric.tag().constant().filter(|k| *k > 0.0) {
        // Points one geodesic period apart coincide.
        let period = 2.0 * PI / k.sqrt();
        for r in roots.iter_mut() {
            r.0 = r.0.rem_euclid(period);
            if period - r.0 < 1e-8 {
                r.0 = 0.0;
            }
        }
    }
    roots.sort_by(|x, y| x.0.total_cmp(&y.0));
    roots.dedup_by(|x, y| (x.0 - y.0).abs() < 1e-8);
    if roots.is_empty() {
        let (i, fmin) = fs.iter().enumerate().fold((0, f64::INFINITY), |acc, (i, x)| if x.abs() < acc.1 { (i, x.abs()) } else { acc });
        let verdict = RulingVerdict::NotFound(NotFoundDiagnostics {
            min_abs_f: fmin,
            v_at_min: vs[i],
            closed_form: closed_form()?,
        });
        return Ok(RulingResult { u, verdict, searched: (a, b), truncated });
    }
    let found = roots
        .into_iter()
        .map(|(v, fv, kind)| {
            let y = sweep.state_at(v)?;
            Ok(StrictionRoot { v, f: fv, point: vec_from_slice(&y[0..3]), kind })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RulingResult { u, verdict: RulingVerdict::Found(found), searched: (a, b), truncated })
}

/// Greedy nearest-neighbour matching of roots on consecutive rulings. With a
/// `period`, root parameters are compared on the circle.
fn assemble_branches(rulings: &[RulingResult], max_jump: f64, period: Option<f64>) -> Vec<StrictionBranch> {
    let mut branches: Vec<StrictionBranch> = Vec::new();
    let mut open: Vec<(usize, f64)> = Vec::new();
    for r in rulings {
        let roots = r.roots();
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (j, root) in roots.iter().enumerate() {
            for (o, (_, last)) in open.iter().enumerate() {
                let mut d = (root.v - last).abs();
                if let Some(p) = period {
                    d = d.min(p - d);
                }
                if d < max_jump {
                    pairs.push((d, j, o));
                }
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut root_branch: Vec<Option<usize>> = vec![None; roots.len()];
        let mut used = vec![false; open.len()];
        for (_, j, o) in pairs {
            if root_branch[j].is_none() && !used[o] {
                root_branch[j] = Some(open[o].0);
                used[o] = true;
            }
        }
        let mut next_open = Vec::with_capacity(roots.len());
        for (j, root) in roots.iter().enumerate() {
            let id = root_branch[j].unwrap_or_else(|| {
                branches.push(StrictionBranch { id: branches.len(), samples: Vec::new() });
                branches.len() - 1
            });
            branches[id].samples.push(BranchSample { u: r.u, v: root.v, point: root.point });
            next_open.push((id, root.v));
        }
        open = next_open;
    }
    branches
}

/// Central points on every ruling of `u_grid` in `v_range`, joined into branches.
pub fn find_striction_numeric(spec: &RuledSurfaceSpec, u_grid: &Grid, v_range: (f64, f64)) -> Result<StrictionResult> {
    find_striction_with(spec, u_grid, v_range, COARSE_SAMPLES)
}

pub fn find_striction_with(spec: &RuledSurfaceSpec, u_grid: &Grid, v_range: (f64, f64), samples: usize) -> Result<StrictionResult> {
    if !(v_range.0 < v_range.1) || !v_range.0.is_finite() || !v_range.1.is_finite() {
        return Err(GeometryError::InvalidInput(format!("bad v range {v_range:?}")));
    }
    let rulings = u_grid
        .points()
        .par_iter()
        .map(|&u| search_ruling(spec, u, v_range, samples))
        .collect::<Result<Vec<_>>>()?;
    let period = spec.metric.tag().constant().filter(|k| *k > 0.0).map(|k| 2.0 * PI / k.sqrt());
    let branches = assemble_branches(&rulings, 0.25 * (v_range.1 - v_range.0), period);
    Ok(StrictionResult { rulings, branches })
}

/// Per-ruling verdict of the hyperbolic non-existence criterion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierVerdict {
    pub u: f64,
    /// `K_ext(u, 0)`.
    pub k_ext: f64,
    pub kappa1: f64,
    pub no_striction: bool,
    /// The closed-form formula also reports no root.
    pub closed_form_not_found: bool,
}

/// Classifies rulings of a surface in `H³(k)` with arc-length base, unit ruling
/// and `g(α', Z) = 0`: there is no central point iff `K_ext = 0` and `κ₁ = √−k`.
pub fn hyperbolic_nonexistence_classifier(spec: &RuledSurfaceSpec, u_grid: &Grid, k: f64) -> Result<Vec<ClassifierVerdict>> {
    if !(k < 0.0) {
        return Err(GeometryError::HypothesisViolated(format!("k must be negative, got {k}")));
    }
    match spec.metric.tag().constant() {
        Some(km) if (km - k).abs() <= 1e-12 * k.abs() => {}
        other => {
            return Err(GeometryError::HypothesisViolated(format!(
                "metric curvature {other:?} does not match k = {k}"
            )))
        }
    }
    u_grid
        .points()
        .par_iter()
        .map(|&u| {
            let m = &spec.metric;
            let b = spec.base_data(u)?;
            let c = m.christoffel_at(&b.point)?;
            let speed = c.norm(&b.velocity);
            let zn = c.norm(&b.ruling);
            let dot = c.inner(&b.velocity, &b.ruling);
            if (speed - 1.0).abs() > HYPOTHESIS_TOLERANCE || (zn - 1.0).abs() > HYPOTHESIS_TOLERANCE || dot.abs() > HYPOTHESIS_TOLERANCE {
                return Err(GeometryError::HypothesisViolated(format!(
                    "need |α'| = 1, |Z| = 1, g(α', Z) = 0 at u = {u}; got {speed}, {zn}, {dot}"
                )));
            }
            let sweep = RulingSweep::from_base(m, b, spec.step, 0.0, 0.0)?;
            let k_ext = curvature_from_jet(m, &sweep.jet_at(0.0)?)?.k_ext;
            let kappa1 = is_general_position(spec, u)?.kappa1;
            let no_striction = k_ext.abs() < EPS_ROOT && (kappa1 - (-k).sqrt()).abs() < EPS_CLASS;
            let closed = spaceform_striction_v(&SpaceFormFCoefficients::from_base(k, m, &b)?);
            Ok(ClassifierVerdict {
                u,
                k_ext,
                kappa1,
                no_striction,
                closed_form_not_found: matches!(closed, SpaceFormVerdict::NotFound { .. }),
            })
        })
        .collect()
}

/// Base provider following a striction branch: `s(u) = X(u, v(u))` with
/// `F(u, v(u)) = 0`, ruling `X_v` and `∇_{s'}X_v = ∇_{X_v}X_u`.
#[derive(Debug, Clone)]
pub struct StrictionBase {
    spec: RuledSurfaceSpec,
    guess: Vec<(f64, f64)>,
}

/// Step of the difference quotient for `∂F/∂u`.
const F_U_STEP: f64 = 1e-5;

impl StrictionBase {
    pub fn new(spec: &RuledSurfaceSpec, branch: &StrictionBranch) -> Result<Self> {
        if branch.samples.len() < 2 {
            return Err(GeometryError::InvalidInput("a branch needs at least two samples".into()));
        }
        Ok(StrictionBase { spec: spec.clone(), guess: branch.samples.iter().map(|s| (s.u, s.v)).collect() })
    }

    pub fn u_domain(&self) -> (f64, f64) {
        (self.guess[0].0, self.guess[self.guess.len() - 1].0)
    }

    fn initial_guess(&self, u: f64) -> f64 {
        let g = &self.guess;
        let i = g.partition_point(|s| s.0 <= u).clamp(1, g.len() - 1);
        let (u0, v0) = g[i - 1];
        let (u1, v1) = g[i];
        v0 + (v1 - v0) * (u - u0) / (u1 - u0)
    }

    fn f_at(&self, u: f64, v: f64) -> Result<f64> {
        let sweep = RulingSweep::new(&self.spec, u, v.min(0.0), v.max(0.0))?;
        f_from_state(&self.spec.metric, &sweep.state_at(v)?)
    }

    /// `v(u)` by Newton's method from the branch guess, and the state there.
    pub fn locate(&self, u: f64) -> Result<(f64, [f64; 12])> {
        let v0 = self.initial_guess(u);
        let sweep = RulingSweep::new(&self.spec, u, (v0 - 1.0).min(0.0), (v0 + 1.0).max(0.0))?;
        let m = &self.spec.metric;
        let mut v = v0;
        for _ in 0..50 {
            let y = sweep.state_at(v)?;
            let s = evolution_from_state(m, u, v, &y)?;
            if s.f.abs() < 1e-14 {
                return Ok((v, y));
            }
            let dv = s.f / s.dfdv;
            v -= dv;
            if dv.abs() < 1e-15 * (1.0 + v.abs()) {
                return Ok((v, sweep.state_at(v)?));
            }
        }
        Err(GeometryError::InvalidInput(format!("Newton iteration for the striction point did not converge at u = {u}")))
    }
}

impl BaseProvider for StrictionBase {
    fn base(&self, metric: &ChartMetric, u: f64) -> Result<BaseData> {
        let (v, y) = self.locate(u)?;
        let jet = jet_from_state(metric, u, v, &y)?;
        let s = evolution_from_state(metric, u, v, &y)?;
        let (a, b) = self.spec.u_domain;
        let h = F_U_STEP;
        let f0 = s.f;
        let f_u = if u + h <= b && u - h >= a {
            (self.f_at(u + h, v)? - self.f_at(u - h, v)?) / (2.0 * h)
        } else if u - 2.0 * h >= a {
            (3.0 * f0 - 4.0 * self.f_at(u - h, v)? + self.f_at(u - 2.0 * h, v)?) / (2.0 * h)
        } else {
            (-3.0 * f0 + 4.0 * self.f_at(u + h, v)? - self.f_at(u + 2.0 * h, v)?) / (2.0 * h)
        };
        let dv = -f_u / s.dfdv;
        Ok(BaseData {
            u,
            point: jet.point,
            velocity: jet.xu + jet.xv * dv,
            ruling: jet.xv,
            cov_ruling: jet.dxu,
        })
    }
}

/// The same surface re-based on a striction branch.
pub fn rebase_on_branch(spec: &RuledSurfaceSpec, branch: &StrictionBranch) -> Result<RuledSurfaceSpec> {
    let base = StrictionBase::new(spec, branch)?;
    let dom = base.u_domain();
    Ok(RuledSurfaceSpec::new(spec.metric.clone(), base, dom).with_step(spec.step))
}

/// Norm of the part of `∇_{α'}Z` tangent to the surface, `span(α', Z)`.
pub fn tangential_ruling_derivative(spec: &RuledSurfaceSpec, u: f64) -> Result<f64> {
    let b = spec.base_data(u)?;
    let c = spec.metric.christoffel_at(&b.point)?;
    let (x, y, w) = (&b.velocity, &b.ruling, &b.cov_ruling);
    let (xx, xy, yy) = (c.inner(x, x), c.inner(x, y), c.inner(y, y));
    let (wx, wy) = (c.inner(w, x), c.inner(w, y));
    let det = xx * yy - xy * xy;
    if !(det > 0.0) {
        return Err(GeometryError::RankDeficientPlane { u, v: 0.0 });
    }
    let a = (wx * yy - wy * xy) / det;
    let bb = (wy * xx - wx * xy) / det;
    Ok(c.norm(&(x * a + y * bb)))
}

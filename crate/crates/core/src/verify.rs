//! The verification suite: each criterion runs a fixed, seeded experiment and
//! reports whether its tolerance holds.

use std::f64::consts::{FRAC_PI_2, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{GeometryError, Result};
use crate::export::curvature_grid;
use crate::geodesic::{exp_map, integrate_jacobi, DEFAULT_STEP};
use crate::linalg::Vec3;
use crate::manifold::{ChartMetric, Profile};
use crate::numeric::Grid;
use crate::oracles::{oracle_geodesic, oracle_jacobi_norm, JacobiData, SpaceFormTag};
use crate::reconstruction::{reconstruct, InvariantPrescription};
use crate::ruled_surface::{curvature_report, sample_surface, RuledSurfaceSpec, RulingSweep};
use crate::sannia::{sannia_invariants, SanniaFrame};
use crate::striction::{
    evolution_from_state, find_striction_numeric, hyperbolic_nonexistence_classifier, rebase_on_branch,
    spaceform_f, spaceform_striction_v, tangential_ruling_derivative, RulingVerdict, SpaceFormFCoefficients,
    SpaceFormVerdict,
};
use crate::surfaces::{bundled, CurvePreset, MetricPreset, RulingPreset, SurfacePreset, TrigSeries, BUNDLED_NAMES};

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: &'static str,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    /// The criterion cannot hold for the reason given in `detail`; a failure
    /// here is expected.
    pub known_unattainable: bool,
}

impl CriterionOutcome {
    fn new(id: &'static str, name: &'static str, passed: bool, detail: String) -> Self {
        CriterionOutcome { id, name, passed, detail, known_unattainable: false }
    }

    fn failed(id: &'static str, name: &'static str, e: GeometryError) -> Self {
        CriterionOutcome::new(id, name, false, format!("error: {e}"))
    }

    /// `PASS`/`FAIL` line for tables and logs.
    pub fn line(&self) -> String {
        let status = match (self.passed, self.known_unattainable) {
            (true, _) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
        };
        format!("{status:<12} {:<4} {:<34} {}", self.id, self.name, self.detail)
    }
}

pub type Criterion = fn() -> CriterionOutcome;

pub const CRITERIA: [(&str, Criterion); 12] = [
    ("1", k_ext_non_positive),
    ("2", ruling_constancy),
    ("3", closed_form_f),
    ("4", f_ode),
    ("5", example1),
    ("6a", example2_roots),
    ("6b", example2_formula),
    ("7", example3),
    ("8", euclidean_striction),
    ("9", reconstruction_round_trip),
    ("10", striction_rebasing),
    ("11", integrator_fidelity),
];

pub fn run_all() -> Vec<CriterionOutcome> {
    CRITERIA.iter().map(|(_, f)| f()).collect()
}

/// Runs the criteria whose id is listed (`"6"` selects `6a` and `6b`).
pub fn run_selected(ids: &[&str]) -> Vec<CriterionOutcome> {
    CRITERIA
        .iter()
        .filter(|(id, _)| ids.iter().any(|s| *s == *id || id.trim_end_matches(['a', 'b']) == *s))
        .map(|(_, f)| f())
        .collect()
}

fn wrap(id: &'static str, name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> CriterionOutcome {
    match f() {
        Ok((passed, detail)) => CriterionOutcome::new(id, name, passed, detail),
        Err(e) => CriterionOutcome::failed(id, name, e),
    }
}

fn sci(x: f64) -> String {
    format!("{x:.2e}")
}

// --- random setups -------------------------------------------------------

fn random_series(rng: &mut ChaCha8Rng, constant: f64, amplitude: f64) -> TrigSeries {
    TrigSeries {
        constant,
        cos: vec![amplitude * rng.random_range(-1.0..1.0), 0.3 * amplitude * rng.random_range(-1.0..1.0)],
        sin: vec![amplitude * rng.random_range(-1.0..1.0), 0.3 * amplitude * rng.random_range(-1.0..1.0)],
    }
}

fn random_curve(rng: &mut ChaCha8Rng, center: [f64; 3], amplitude: f64) -> CurvePreset {
    CurvePreset::Trig {
        components: [
            random_series(rng, center[0], amplitude),
            random_series(rng, center[1], amplitude),
            random_series(rng, center[2], amplitude),
        ],
    }
}

fn random_direction(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let d: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        if n > 0.3 && n < 1.0 {
            return d.map(|x| x / n);
        }
    }
}

/// Base point region of each chart used for random surfaces.
fn chart_center(metric: &MetricPreset, rng: &mut ChaCha8Rng) -> [f64; 3] {
    match metric {
        MetricPreset::HalfSpace { .. } => [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(1.0..2.0)],
        MetricPreset::Sphere { .. } => std::array::from_fn(|_| rng.random_range(-0.2..0.2)),
        _ => std::array::from_fn(|_| rng.random_range(-0.5..0.5)),
    }
}

/// A random unit-ruling surface over `u ∈ [0, 1]`.
fn random_surface(rng: &mut ChaCha8Rng, metric: MetricPreset) -> SurfacePreset {
    let center = chart_center(&metric, rng);
    let base = random_curve(rng, center, 0.3);
    let d = random_direction(rng);
    let ruling = RulingPreset::Curve { curve: random_curve(rng, d, 0.4) };
    SurfacePreset { metric, base, ruling, normalize: true }
}

const SAMPLE_US: [f64; 3] = [0.2, 0.5, 0.8];

/// Rulings over `[0, 3]` that stay well inside the stereographic chart.
fn tame_on_sphere(spec: &RuledSurfaceSpec, k: f64) -> Result<bool> {
    let tag = SpaceFormTag::new(k);
    for u in SAMPLE_US {
        let b = spec.base_data(u)?;
        let z = b.ruling / spec.metric.norm(&b.point, &b.ruling)?;
        for i in 0..=60 {
            match oracle_geodesic(&tag, &b.point, &z, 0.05 * i as f64) {
                Ok(s) if s.x.norm() < 20.0 => {}
                _ => return Ok(false),
            }
        }
    }
    Ok(true)
}

fn space_form_setups(k: f64, count: usize, seed: u64) -> Result<Vec<RuledSurfaceSpec>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let metric = if k > 0.0 {
        MetricPreset::Sphere { k }
    } else if k < 0.0 {
        MetricPreset::HalfSpace { k }
    } else {
        MetricPreset::Euclidean
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let spec = random_surface(&mut rng, metric.clone()).build((0.0, 1.0))?;
        if k > 0.0 && !tame_on_sphere(&spec, k)? {
            continue;
        }
        out.push(spec);
    }
    Ok(out)
}

// --- criteria -------------------------------------------------------------

pub fn k_ext_non_positive() -> CriterionOutcome {
    wrap("1", "K_ext non-positivity", || {
        let mut worst = f64::NEG_INFINITY;
        let mut parts = Vec::new();
        let mut missing = 0;
        for name in BUNDLED_NAMES {
            let b = bundled(name).expect("bundled surface");
            let spec = b.spec()?;
            let us = Grid::new(b.u_range.0, b.u_range.1, 50)?.points();
            let vs = Grid::new(b.v_range.0, b.v_range.1, 50)?.points();
            let grid = sample_surface(&spec, &us, &vs)?;
            let reports = curvature_grid(&spec.metric, &grid)?;
            let mut local = f64::NEG_INFINITY;
            for (row, jets) in reports.iter().zip(&grid.jets) {
                for (r, j) in row.iter().zip(jets) {
                    match r {
                        Some(r) => local = local.max(r.k_ext),
                        None => missing += usize::from(j.is_none() || !j.unwrap().rank2),
                    }
                }
            }
            parts.push(format!("{name} {}", sci(local)));
            worst = worst.max(local);
        }
        Ok((worst <= 1e-9 && missing == 0, format!("max K_ext {} ({}), {missing} undefined samples", sci(worst), parts.join(", "))))
    })
}

fn generic_metrics() -> [MetricPreset; 5] {
    [
        MetricPreset::Euclidean,
        MetricPreset::Sphere { k: 0.25 },
        MetricPreset::HalfSpace { k: -1.0 },
        MetricPreset::ProductRevolution { profile: Profile::sin_plus(2.0) },
        MetricPreset::Warped { profile: Profile::sin_plus(2.0) },
    ]
}

pub fn ruling_constancy() -> CriterionOutcome {
    wrap("2", "ruling constancy of g(Xu,Xv)", || {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let metrics = generic_metrics();
        let specs = (0..20)
            .map(|i| random_surface(&mut rng, metrics[i % metrics.len()].clone()).build((0.0, 1.0)))
            .collect::<Result<Vec<_>>>()?;
        let drift = specs
            .par_iter()
            .map(|spec| {
                let mut worst = 0.0_f64;
                for u in SAMPLE_US {
                    let sweep = RulingSweep::new(spec, u, 0.0, 3.0)?;
                    if sweep.range().1 < 3.0 {
                        return Err(GeometryError::LeftChartDomain { parameter: sweep.range().1 });
                    }
                    let mut first = None;
                    for (_, y) in sweep.samples() {
                        let x = Vec3::new(y[0], y[1], y[2]);
                        let g = spec.metric.inner(&x, &Vec3::new(y[6], y[7], y[8]), &Vec3::new(y[3], y[4], y[5]))?;
                        let g0 = *first.get_or_insert(g);
                        worst = worst.max((g - g0).abs());
                    }
                }
                Ok(worst)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        Ok((drift < 1e-7, format!("max drift {} over 20 surfaces x 3 rulings", sci(drift))))
    })
}

/// `(sup |F − closed form|, sup |F'' + 4kF|)` over the random space-form rulings.
fn space_form_residuals(k: f64) -> Result<(f64, f64)> {
    let specs = space_form_setups(k, 10, 3 + (k + 1.0) as u64)?;
    let per = specs
        .par_iter()
        .map(|spec| {
            let (mut ef, mut eode) = (0.0_f64, 0.0_f64);
            for u in SAMPLE_US {
                let sweep = RulingSweep::new(spec, u, 0.0, 3.0)?;
                if sweep.range().1 < 3.0 {
                    return Err(GeometryError::LeftChartDomain { parameter: sweep.range().1 });
                }
                let coeffs = SpaceFormFCoefficients::from_base(k, &spec.metric, sweep.base())?;
                for (v, y) in sweep.samples() {
                    let s = evolution_from_state(&spec.metric, u, v, y)?;
                    ef = ef.max((s.f - spaceform_f(&coeffs, v)).abs());
                    eode = eode.max((s.d2fdv2 + 4.0 * k * s.f).abs());
                }
            }
            Ok((ef, eode))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(per.into_iter().fold((0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1))))
}

pub fn closed_form_f() -> CriterionOutcome {
    wrap("3", "closed-form F in space forms", || {
        let mut worst = 0.0_f64;
        let mut parts = Vec::new();
        for k in [1.0, 0.0, -1.0] {
            let (e, _) = space_form_residuals(k)?;
            parts.push(format!("k={k}: {}", sci(e)));
            worst = worst.max(e);
        }
        Ok((worst < 1e-6, format!("sup |F - closed form| {}", parts.join(", "))))
    })
}

pub fn f_ode() -> CriterionOutcome {
    wrap("4", "F'' + 4kF = 0 in space forms", || {
        let mut worst = 0.0_f64;
        let mut parts = Vec::new();
        for k in [1.0, 0.0, -1.0] {
            let (_, e) = space_form_residuals(k)?;
            parts.push(format!("k={k}: {}", sci(e)));
            worst = worst.max(e);
        }
        Ok((worst < 1e-6, format!("sup |F'' + 4kF| {}", parts.join(", "))))
    })
}

pub fn example1() -> CriterionOutcome {
    wrap("5", "Example 1: no striction in H3", || {
        let b = bundled("example1").expect("bundled surface");
        let spec = b.spec()?;
        let us = Grid::new(0.0, TAU, 13)?;
        let mut f_err = 0.0_f64;
        for u in us.points() {
            let sweep = RulingSweep::new(&spec, u, -2.0, 2.0)?;
            for (v, y) in sweep.samples() {
                let s = evolution_from_state(&spec.metric, u, v, y)?;
                f_err = f_err.max((s.f - ((2.0 * v).cosh() + (2.0 * v).sinh())).abs());
            }
        }
        let search = find_striction_numeric(&spec, &us, (-5.0, 5.0))?;
        let mut not_found = 0;
        let mut atanh_violations = 0;
        for r in &search.rulings {
            if let RulingVerdict::NotFound(d) = &r.verdict {
                not_found += 1;
                if matches!(d.closed_form, Some(SpaceFormVerdict::NotFound { argument }) if argument.abs() >= 1.0 - 1e-9) {
                    atanh_violations += 1;
                }
            }
        }
        let cls = hyperbolic_nonexistence_classifier(&spec, &us, -1.0)?;
        let k_ext = cls.iter().map(|c| c.k_ext.abs()).fold(0.0, f64::max);
        let k1 = cls.iter().map(|c| (c.kappa1 - 1.0).abs()).fold(0.0, f64::max);
        let all_no = cls.iter().all(|c| c.no_striction && c.closed_form_not_found);
        let n = us.samples;
        let passed = f_err < 1e-6 && not_found == n && atanh_violations == n && k_ext <= 1e-8 && k1 <= 1e-6 && all_no;
        Ok((
            passed,
            format!(
                "|F - (cosh 2v + sinh 2v)| {}, NotFound {not_found}/{n} (atanh domain {atanh_violations}/{n}), |K_ext| {}, |kappa1 - 1| {}",
                sci(f_err),
                sci(k_ext),
                sci(k1)
            ),
        ))
    })
}

fn example2_spec() -> Result<(RuledSurfaceSpec, Grid, (f64, f64))> {
    let b = bundled("example2").expect("bundled surface");
    Ok((b.spec()?, Grid::new(b.u_range.0, b.u_range.1, 17)?, b.v_range))
}

pub fn example2_roots() -> CriterionOutcome {
    wrap("6a", "Example 2: roots at pi/2, 3pi/2", || {
        let (spec, us, range) = example2_spec()?;
        let res = find_striction_numeric(&spec, &us, range)?;
        let mut worst = 0.0_f64;
        let mut ok = true;
        for r in &res.rulings {
            let roots = r.roots();
            ok &= roots.len() == 2;
            for (root, want) in roots.iter().zip([FRAC_PI_2, 3.0 * FRAC_PI_2]) {
                // The third chart coordinate is the meridian parameter.
                worst = worst.max((root.point.z - want).abs());
            }
        }
        let full = res.branches.iter().filter(|b| b.samples.len() == us.samples).count();
        ok &= full == 2 && res.branches.len() == 2;
        Ok((
            ok && worst < 1e-6,
            format!("max |root - (pi/2 + j pi)| {} in chart v, {} branches ({full} complete)", sci(worst), res.branches.len()),
        ))
    })
}

pub fn example2_formula() -> CriterionOutcome {
    let mut out = wrap("6b", "Example 2: F formula", || {
        let (spec, us, range) = example2_spec()?;
        let (mut literal, mut corrected) = (0.0_f64, 0.0_f64);
        for u in us.points() {
            let sweep = RulingSweep::new(&spec, u, range.0, range.1)?;
            for (v, y) in sweep.samples() {
                let f = evolution_from_state(&spec.metric, u, v, y)?.f;
                let t = y[2];
                let c = t.cos();
                let num = c * (2.0 + t.sin());
                literal = literal.max((f - num / (1.0 + c * c)).abs());
                corrected = corrected.max((f - num / (1.0 + c * c).sqrt()).abs());
            }
        }
        Ok((
            literal < 1e-6,
            format!(
                "|F - cos v(2+sin v)/(1+cos^2 v)| {}; with the unit-ruling factor 1/sqrt(1+cos^2 v): {}",
                sci(literal),
                sci(corrected)
            ),
        ))
    });
    out.known_unattainable = true;
    out
}

pub fn example3() -> CriterionOutcome {
    wrap("7", "Example 3: roots at t = pi/2", || {
        let b = bundled("example3").expect("bundled surface");
        let spec = b.spec()?;
        let us = Grid::new(b.u_range.0, b.u_range.1, 17)?;
        let res = find_striction_numeric(&spec, &us, b.v_range)?;
        let mut worst = 0.0_f64;
        let mut ok = true;
        for r in &res.rulings {
            ok &= r.roots().len() == 1;
            for root in r.roots() {
                worst = worst.max((root.point.x - FRAC_PI_2).abs());
            }
        }
        Ok((ok && worst < 1e-6, format!("max |t - pi/2| {} over {} rulings", sci(worst), res.rulings.len())))
    })
}

pub fn euclidean_striction() -> CriterionOutcome {
    wrap("8", "Euclidean striction formula", || {
        let b = bundled("helicoid").expect("bundled surface");
        let spec = b.spec()?;
        let us = Grid::new(b.u_range.0, b.u_range.1, 21)?;
        let res = find_striction_numeric(&spec, &us, b.v_range)?;
        let mut v_err = 0.0_f64;
        let mut ok = true;
        for r in &res.rulings {
            ok &= r.roots().len() == 1;
            for root in r.roots() {
                v_err = v_err.max(root.v.abs());
            }
        }
        let mut lambda_err = 0.0_f64;
        for u in us.points() {
            match curvature_report(&spec, u, 0.0)?.lambda {
                Some(l) => lambda_err = lambda_err.max((l - 1.0).abs()),
                None => ok = false,
            }
        }
        let specs = space_form_setups(0.0, 10, 8)?;
        let mut agree = 0.0_f64;
        for s in &specs {
            for u in SAMPLE_US {
                let c = SpaceFormFCoefficients::from_base(0.0, &s.metric, &s.base_data(u)?)?;
                let SpaceFormVerdict::Found(v) = spaceform_striction_v(&c) else {
                    ok = false;
                    continue;
                };
                let r = (2.0 * v[0].abs() + 1.0).max(3.0);
                let res = find_striction_numeric(s, &Grid::new(u, u, 1)?, (-r, r))?;
                match res.rulings[0].roots() {
                    [root] => agree = agree.max((root.v - v[0]).abs()),
                    _ => ok = false,
                }
            }
        }
        Ok((
            ok && v_err <= 1e-10 && lambda_err <= 1e-6 && agree < 1e-8,
            format!("helicoid |v| {}, |lambda - 1| {}; random specs |v_num - v_closed| {}", sci(v_err), sci(lambda_err), sci(agree)),
        ))
    })
}

/// Invariants prescribed for the round trip, with an orthonormal frame at `p0`.
fn round_trip_prescription(metric: &ChartMetric, p0: Vec3) -> Result<InvariantPrescription> {
    let scale = 1.0 / metric.norm(&p0, &Vec3::x())?;
    let frame = SanniaFrame { x1: Vec3::x() * scale, x2: Vec3::y() * scale, x3: Vec3::z() * scale };
    Ok(InvariantPrescription::from_fns(
        0.0,
        1.0,
        |u| 1.0 + 0.3 * u,
        |u| 0.5 * u.cos(),
        |u| 0.4 + 0.2 * u,
        |u| -0.3 * u,
        p0,
        frame,
    ))
}

/// `(sup invariant error, orthonormality drift per unit u)` at one step.
fn round_trip(metric: &ChartMetric, p0: Vec3, step: f64) -> Result<(f64, f64)> {
    let presc = round_trip_prescription(metric, p0)?;
    let rec = reconstruct(metric, &presc, step)?;
    if let Some(parameter) = rec.exit {
        return Err(GeometryError::LeftChartDomain { parameter });
    }
    // Invariants of the reconstructed surface at the integration nodes.
    let inv = sannia_invariants(&rec.to_spec(), &Grid::new(rec.u[0], rec.u[rec.u.len() - 1], rec.u.len())?)?;
    let t = &inv.table;
    let mut err = 0.0_f64;
    for i in 0..t.len() {
        let u = t.u[i];
        err = err
            .max((t.kappa0[i] - 1.0).abs())
            .max((t.kappa1[i] - (1.0 + 0.3 * u)).abs())
            .max((t.kappa2[i] - 0.5 * u.cos()).abs())
            .max((t.theta[i] - (0.4 + 0.2 * u)).abs())
            .max((t.phi[i] + 0.3 * u).abs());
    }
    let (a, b) = rec.interval();
    Ok((err, rec.orthonormality_drift()? / (b - a)))
}

/// Steps at which the halving ratio is measured: at 1e-3 both errors sit at
/// the rounding floor and the ratio carries no information.
pub const RATIO_STEPS: (f64, f64) = (0.04, 0.02);

pub fn reconstruction_round_trip() -> CriterionOutcome {
    wrap("9", "reconstruction round trip", || {
        let cases = [
            ("E3", ChartMetric::euclidean(), Vec3::zeros()),
            ("S3(1)", ChartMetric::sphere(1.0), Vec3::new(0.1, 0.0, 0.0)),
            ("H3(-1)", ChartMetric::half_space(-1.0), Vec3::new(0.0, 0.0, 1.0)),
        ];
        let mut ok = true;
        let mut parts = Vec::new();
        for (name, m, p0) in &cases {
            let (err, drift) = round_trip(m, *p0, DEFAULT_STEP)?;
            let (err_c, drift_c) = round_trip(m, *p0, RATIO_STEPS.0)?;
            let (err_f, drift_f) = round_trip(m, *p0, RATIO_STEPS.1)?;
            let (re, rd) = (err_c / err_f, drift_c / drift_f);
            let (err_h, _) = round_trip(m, *p0, 0.5 * DEFAULT_STEP)?;
            ok &= err < 1e-4 && drift < 1e-8 && (8.0..=32.0).contains(&re) && (8.0..=32.0).contains(&rd);
            parts.push(format!(
                "{name}: err {} drift/u {} halving ratios err {re:.2} drift {rd:.2} (1e-3 -> 5e-4 err ratio {:.1})",
                sci(err),
                sci(drift),
                err / err_h
            ));
        }
        Ok((ok, parts.join("; ")))
    })
}

pub fn striction_rebasing() -> CriterionOutcome {
    let mut out = wrap("10", "striction re-basing (Example 2)", || {
        let (spec, _, range) = example2_spec()?;
        let us = Grid::new(0.5, 2.5, 21)?;
        let res = find_striction_numeric(&spec, &us, range)?;
        let mut tangential = 0.0_f64;
        let mut phi_detail = String::new();
        let mut phi_ok = true;
        for branch in res.branches.iter().filter(|b| b.samples.len() == us.samples) {
            let re = rebase_on_branch(&spec, branch)?;
            let inner = Grid::new(0.6, 2.4, 19)?;
            for u in inner.points() {
                tangential = tangential.max(tangential_ruling_derivative(&re, u)?);
            }
            match sannia_invariants(&re, &inner) {
                Ok(inv) => {
                    let phi = inv.table.phi.iter().map(|p| p.abs()).fold(0.0, f64::max);
                    phi_ok &= phi < 1e-5;
                    phi_detail.push_str(&format!(" |phi| {}", sci(phi)));
                }
                Err(e) => {
                    phi_ok = false;
                    phi_detail.push_str(&format!(" phi undefined ({e})"));
                }
            }
        }
        if res.branches.is_empty() {
            phi_ok = false;
        }
        let (g_phi, g_tan) = generic_rebasing()?;
        Ok((
            phi_ok && tangential < 1e-5,
            format!(
                "tangential |grad_s' Z| {};{phi_detail}; general-position surface: |phi| {}, tangential {}",
                sci(tangential),
                sci(g_phi),
                sci(g_tan)
            ),
        ))
    });
    out.known_unattainable = true;
    out
}

/// `(max |φ|, max tangential |∇_{s'}Z|)` after re-basing a surface in general
/// position on its striction curve.
pub fn generic_rebasing() -> Result<(f64, f64)> {
    let surface = SurfacePreset {
        metric: MetricPreset::ProductRevolution { profile: Profile::sin_plus(2.0) },
        base: CurvePreset::Line { point: [0.0; 3], direction: [0.0, 1.0, 0.0] },
        ruling: RulingPreset::Curve {
            curve: CurvePreset::Trig {
                components: [
                    TrigSeries { constant: 0.0, cos: vec![0.0, 1.0], sin: vec![] },
                    TrigSeries { constant: 0.6, cos: vec![], sin: vec![] },
                    TrigSeries { constant: 0.3, cos: vec![], sin: vec![0.0, 1.0] },
                ],
            },
        },
        normalize: true,
    };
    let spec = surface.build((0.0, 1.0))?;
    let res = find_striction_numeric(&spec, &Grid::new(0.0, 1.0, 11)?, (-1.5, 1.5))?;
    let branch = res
        .branches
        .iter()
        .find(|b| b.samples.len() == 11)
        .ok_or_else(|| GeometryError::InvalidInput("no complete striction branch".into()))?;
    let re = rebase_on_branch(&spec, branch)?;
    let inner = Grid::new(0.1, 0.9, 17)?;
    let inv = sannia_invariants(&re, &inner)?;
    let phi = inv.table.phi.iter().map(|p| p.abs()).fold(0.0, f64::max);
    let mut tangential = 0.0_f64;
    for u in inner.points() {
        tangential = tangential.max(tangential_ruling_derivative(&re, u)?);
    }
    Ok((phi, tangential))
}

pub fn integrator_fidelity() -> CriterionOutcome {
    wrap("11", "integrator fidelity vs oracles", || {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (mut geo, mut jac) = (0.0_f64, 0.0_f64);
        for k in [1.0, 0.0, -1.0] {
            let tag = SpaceFormTag::new(k);
            let m = tag.metric();
            let mut done = 0;
            while done < 5 {
                let p = Vec3::from(chart_center(&MetricPreset::HalfSpace { k: -1.0 }, &mut rng));
                let p = if k > 0.0 { p * 0.2 } else if k == 0.0 { p - Vec3::z() } else { p };
                let d = Vec3::from(random_direction(&mut rng));
                let z = d / m.norm(&p, &d)?;
                let ok = (0..=60).all(|i| matches!(oracle_geodesic(&tag, &p, &z, 0.05 * i as f64), Ok(s) if s.x.norm() < 20.0));
                if !ok {
                    continue;
                }
                done += 1;
                let g = exp_map(&m, &p, &z, 3.0, DEFAULT_STEP)?;
                if g.exit.is_some() {
                    return Err(GeometryError::LeftChartDomain { parameter: g.end().arc });
                }
                for s in &g.samples {
                    geo = geo.max((s.x - oracle_geodesic(&tag, &p, &z, s.arc)?.x).amax());
                }
                let j0 = Vec3::from(random_direction(&mut rng));
                let dj0 = Vec3::from(random_direction(&mut rng)) * 0.5;
                let data = JacobiData::from_vectors(&m, &p, &z, &j0, &dj0)?;
                for s in integrate_jacobi(&m, &g, &j0, &dj0)? {
                    let n = m.norm(&s.geodesic.x, &s.j)?;
                    jac = jac.max((n - oracle_jacobi_norm(&tag, &data, s.geodesic.arc)).abs());
                }
            }
        }
        // A great circle of S³(1) that avoids the origin of the chart.
        let m = ChartMetric::sphere(1.0);
        let p = Vec3::new(0.5, 0.0, 0.0);
        let z = Vec3::new(0.0, 1.0, 0.3);
        let z = z / m.norm(&p, &z)?;
        let g = exp_map(&m, &p, &z, TAU, DEFAULT_STEP)?;
        let closure = (g.end().x - p).amax().max((g.end().arc - TAU).abs());
        Ok((
            geo < 1e-7 && jac < 1e-6 && closure < 1e-6,
            format!("geodesic {}, Jacobi norm {}, S3 closure after 2pi {}", sci(geo), sci(jac), sci(closure)),
        ))
    })
}

//! Subcommand implementations. Each writes its files into the output directory
//! and returns the paths written.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use ruledgeo::export::{fmt_real, striction_polylines, write_attributes_csv, write_obj};
use ruledgeo::reconstruction::{reconstruct, InvariantPrescription};
use ruledgeo::ruled_surface::sample_surface;
use ruledgeo::sannia::{frame_point, sannia_invariants, InvariantTable};
use ruledgeo::striction::{find_striction_with, RulingVerdict, SpaceFormVerdict, StrictionResult};
use ruledgeo::verify::CriterionOutcome;
use ruledgeo::SurfaceGrid;

use crate::scenario::Resolved;

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok((path, BufWriter::new(f)))
}

fn finish(path: PathBuf, mut w: BufWriter<File>) -> Result<PathBuf> {
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn surface_grid(sc: &Resolved) -> Result<SurfaceGrid> {
    let grid = sample_surface(&sc.spec, &sc.u.points(), &sc.v.points())?;
    let usable = grid.jets.iter().flatten().any(|j| matches!(j, Some(j) if j.rank2));
    if !usable {
        return Err(ruledgeo::GeometryError::RankDeficientPlane { u: sc.u.start, v: sc.v.start }.into());
    }
    Ok(grid)
}

pub fn mesh(sc: &Resolved, out: &Path) -> Result<Vec<PathBuf>> {
    let grid = surface_grid(sc)?;
    let (p1, mut w1) = create(out, "surface.obj")?;
    write_obj(&mut w1, &grid, &[])?;
    let (p2, mut w2) = create(out, "attributes.csv")?;
    write_attributes_csv(&mut w2, &sc.spec.metric, &grid)?;
    Ok(vec![finish(p1, w1)?, finish(p2, w2)?])
}

pub fn curvature(sc: &Resolved, out: &Path) -> Result<Vec<PathBuf>> {
    let grid = surface_grid(sc)?;
    let (p, mut w) = create(out, "curvature.csv")?;
    write_attributes_csv(&mut w, &sc.spec.metric, &grid)?;
    Ok(vec![finish(p, w)?])
}

pub fn invariants(sc: &Resolved, out: &Path) -> Result<Vec<PathBuf>> {
    let inv = sannia_invariants(&sc.spec, &sc.u)?;
    let (p1, mut w1) = create(out, "invariants.csv")?;
    inv.table.write_csv(&mut w1)?;
    let (p2, mut w2) = create(out, "invariants_arc_length.csv")?;
    inv.to_arc_length()?.write_csv(&mut w2)?;
    Ok(vec![finish(p1, w1)?, finish(p2, w2)?])
}

fn describe(v: &RulingVerdict) -> (String, usize, f64, f64, String) {
    match v {
        RulingVerdict::Found(r) => ("found".into(), r.len(), f64::NAN, f64::NAN, String::new()),
        RulingVerdict::Degenerate => ("degenerate".into(), 0, f64::NAN, f64::NAN, String::new()),
        RulingVerdict::NotFound(d) => {
            let closed = match &d.closed_form {
                Some(SpaceFormVerdict::NotFound { argument }) => {
                    format!("atanh argument {} outside (-1, 1)", fmt_real(*argument))
                }
                Some(SpaceFormVerdict::Found(r)) => format!("closed form roots {r:?} outside the range"),
                Some(SpaceFormVerdict::Degenerate) => "closed form degenerate".into(),
                None => String::new(),
            };
            ("not_found".into(), 0, d.min_abs_f, d.v_at_min, closed)
        }
    }
}

fn write_rulings<W: Write>(w: W, res: &StrictionResult) -> Result<()> {
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(["u", "verdict", "roots", "min_abs_f", "v_at_min", "truncated", "closed_form"])?;
    for r in &res.rulings {
        let (verdict, n, fmin, vmin, closed) = describe(&r.verdict);
        out.write_record([
            fmt_real(r.u),
            verdict,
            n.to_string(),
            fmt_real(fmin),
            fmt_real(vmin),
            r.truncated.to_string(),
            closed,
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn striction(sc: &Resolved, out: &Path) -> Result<(Vec<PathBuf>, StrictionResult)> {
    let res = find_striction_with(&sc.spec, &sc.u, (sc.v.start.min(sc.v.end), sc.v.start.max(sc.v.end)), sc.striction_samples)?;
    let (p1, mut w1) = create(out, "striction.csv")?;
    res.write_csv(&mut w1)?;
    let (p2, mut w2) = create(out, "striction_rulings.csv")?;
    write_rulings(&mut w2, &res)?;
    let grid = sample_surface(&sc.spec, &sc.u.points(), &sc.v.points())?;
    let (p3, mut w3) = create(out, "striction.obj")?;
    write_obj(&mut w3, &grid, &striction_polylines(&res))?;
    Ok((vec![finish(p1, w1)?, finish(p2, w2)?, finish(p3, w3)?], res))
}

/// Integrates the invariant table from the scenario's base point and frame.
pub fn reconstruct_curve(sc: &Resolved, table_path: &Path, out: &Path) -> Result<Vec<PathBuf>> {
    let f = File::open(table_path).with_context(|| format!("opening {}", table_path.display()))?;
    // A malformed table is an input problem, not a geometric one.
    let table = InvariantTable::read_csv(f).map_err(|e| anyhow!("reading {}: {e}", table_path.display()))?;
    if table.is_empty() {
        bail!("{} has no rows", table_path.display());
    }
    let start = frame_point(&sc.spec, sc.u.start)?;
    let presc = InvariantPrescription::from_table(&table, start.point, start.frame)?;
    let rec = reconstruct(&sc.spec.metric, &presc, sc.step)?;
    if let Some(u) = rec.exit {
        eprintln!("warning: the reconstructed curve left the chart at u = {u}");
    }
    let (p, mut w) = create(out, "curve.csv")?;
    rec.write_csv(&mut w)?;
    Ok(vec![finish(p, w)?])
}

pub fn verify_table(outcomes: &[CriterionOutcome]) -> String {
    let mut s = String::new();
    for o in outcomes {
        s.push_str(&o.line());
        s.push('\n');
    }
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    s.push_str(&format!("{} of {} criteria passed\n", outcomes.len() - failed, outcomes.len()));
    s
}

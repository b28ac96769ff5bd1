//! Deterministic text output: CSV tables and Wavefront OBJ meshes.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{GeometryError, Result};
use crate::linalg::Vec3;
use crate::manifold::ChartMetric;
use crate::ruled_surface::{curvature_from_jet, CurvatureReport, SurfaceGrid};
use crate::striction::StrictionResult;

/// Formats a real with 17 significant digits in scientific notation.
pub fn fmt_real(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn io_err(e: impl std::fmt::Display) -> GeometryError {
    GeometryError::InvalidInput(format!("write failed: {e}"))
}

/// Grid vertices as `v x y z`, quads over neighbouring samples and each
/// polyline as one `l` element. Samples missing from the grid are skipped
/// together with the faces touching them.
pub fn write_obj<W: Write>(mut w: W, grid: &SurfaceGrid, polylines: &[Vec<Vec3>]) -> Result<()> {
    let mut index = vec![vec![0usize; grid.v.len()]; grid.u.len()];
    let mut next = 1;
    for (i, row) in grid.jets.iter().enumerate() {
        for (j, jet) in row.iter().enumerate() {
            if let Some(jet) = jet {
                let p = jet.point;
                writeln!(w, "v {} {} {}", fmt_real(p.x), fmt_real(p.y), fmt_real(p.z)).map_err(io_err)?;
                index[i][j] = next;
                next += 1;
            }
        }
    }
    for i in 0..grid.u.len().saturating_sub(1) {
        for j in 0..grid.v.len().saturating_sub(1) {
            let q = [index[i][j], index[i + 1][j], index[i + 1][j + 1], index[i][j + 1]];
            if q.iter().all(|k| *k > 0) {
                writeln!(w, "f {} {} {} {}", q[0], q[1], q[2], q[3]).map_err(io_err)?;
            }
        }
    }
    for line in polylines.iter().filter(|l| l.len() > 1) {
        let first = next;
        for p in line {
            writeln!(w, "v {} {} {}", fmt_real(p.x), fmt_real(p.y), fmt_real(p.z)).map_err(io_err)?;
            next += 1;
        }
        let ids: Vec<String> = (first..next).map(|k| k.to_string()).collect();
        writeln!(w, "l {}", ids.join(" ")).map_err(io_err)?;
    }
    Ok(())
}

/// Curvature report for every grid sample; `None` where the sample is missing
/// or the tangent plane is degenerate.
pub fn curvature_grid(metric: &ChartMetric, grid: &SurfaceGrid) -> Result<Vec<Vec<Option<CurvatureReport>>>> {
    grid.jets
        .par_iter()
        .map(|row| {
            row.iter()
                .map(|jet| match jet {
                    None => Ok(None),
                    Some(j) if !j.rank2 => Ok(None),
                    Some(j) => curvature_from_jet(metric, j).map(Some),
                })
                .collect()
        })
        .collect()
}

pub const ATTRIBUTE_HEADER: [&str; 13] =
    ["i", "j", "u", "v", "x", "y", "z", "k_ambient", "k_ext", "k_intrinsic", "lambda", "sigma", "h_uv"];

/// Per-sample attributes keyed by grid index `(i, j)`; `NaN` marks quantities
/// that are undefined at that sample.
pub fn write_attributes_csv<W: Write>(w: W, metric: &ChartMetric, grid: &SurfaceGrid) -> Result<()> {
    let reports = curvature_grid(metric, grid)?;
    let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    out.write_record(ATTRIBUTE_HEADER).map_err(io_err)?;
    for (i, row) in grid.jets.iter().enumerate() {
        for (j, jet) in row.iter().enumerate() {
            let Some(jet) = jet else { continue };
            let r = reports[i][j];
            let nan = f64::NAN;
            let vals = match r {
                Some(r) => [r.k_ambient, r.k_ext, r.k_intrinsic, r.lambda.unwrap_or(nan), r.sigma, r.h_uv],
                None => [nan; 6],
            };
            let mut rec = vec![i.to_string(), j.to_string()];
            rec.extend([jet.u, jet.v, jet.point.x, jet.point.y, jet.point.z].iter().map(|x| fmt_real(*x)));
            rec.extend(vals.iter().map(|x| fmt_real(*x)));
            out.write_record(&rec).map_err(io_err)?;
        }
    }
    out.flush().map_err(io_err)?;
    Ok(())
}

/// Striction branches as OBJ polylines.
pub fn striction_polylines(result: &StrictionResult) -> Vec<Vec<Vec3>> {
    result.branches.iter().map(|b| b.samples.iter().map(|s| s.point).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ruled_surface::sample_surface;
    use crate::surfaces::bundled;

    #[test]
    fn real_format_is_fixed() {
        assert_eq!(fmt_real(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_real(-0.1), "-1.0000000000000001e-1");
        assert_eq!(fmt_real(f64::NAN), "NaN");
        assert_eq!(fmt_real(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn obj_counts() {
        let spec = bundled("helicoid").unwrap().spec().unwrap();
        let grid = sample_surface(&spec, &[0.0, 0.5, 1.0], &[-1.0, 0.0, 1.0, 2.0]).unwrap();
        let mut buf = Vec::new();
        write_obj(&mut buf, &grid, &[vec![Vec3::zeros(), Vec3::z()]]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 14);
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 6);
        assert_eq!(text.lines().last().unwrap(), "l 13 14");
    }

    #[test]
    fn attribute_rows_are_keyed_by_index() {
        let spec = bundled("helicoid").unwrap().spec().unwrap();
        let grid = sample_surface(&spec, &[0.0, 0.5], &[0.0, 1.0]).unwrap();
        let mut buf = Vec::new();
        write_attributes_csv(&mut buf, &spec.metric, &grid).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 5);
        assert!(lines[0].starts_with("i,j,u,v"));
        assert!(lines[4].starts_with("1,1,"));
        // Helicoid at v = 0: K_ext = −1.
        let row: Vec<&str> = lines[1].split(',').collect();
        assert!((row[8].parse::<f64>().unwrap() + 1.0).abs() < 1e-12);
    }
}

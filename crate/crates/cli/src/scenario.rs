//! Scenario files: a JSON description of one surface and how to sample it.

use std::path::Path;

use anyhow::{bail, Context, Result};
use ruledgeo::numeric::Grid;
use ruledgeo::striction::COARSE_SAMPLES;
use ruledgeo::surfaces::{bundled, SurfacePreset};
use ruledgeo::RuledSurfaceSpec;
use serde::Deserialize;

pub const SCENARIO_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start: f64,
    pub end: f64,
    pub samples: usize,
}

impl GridSpec {
    fn grid(&self, what: &str) -> Result<Grid> {
        if self.samples == 0 {
            bail!("{what} grid is empty");
        }
        Grid::new(self.start, self.end, self.samples).with_context(|| format!("{what} grid"))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    pub u: Option<GridSpec>,
    pub v: Option<GridSpec>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// RK4 step along rulings and in reconstruction.
    pub step: Option<f64>,
    /// Coarse samples per ruling in the striction search.
    pub striction_samples: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Artifact {
    Mesh,
    Curvature,
    Invariants,
    Striction,
    Reconstruct,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    #[serde(default)]
    pub name: Option<String>,
    /// Name of a bundled surface; exclusive with `surface`.
    #[serde(default)]
    pub bundled: Option<String>,
    #[serde(default)]
    pub surface: Option<SurfacePreset>,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub outputs: Vec<Artifact>,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// A validated scenario with its surface built.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub name: String,
    pub spec: RuledSurfaceSpec,
    pub u: Grid,
    pub v: Grid,
    pub step: f64,
    pub striction_samples: usize,
    pub outputs: Vec<Artifact>,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Scenario> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn resolve(&self, step_override: Option<f64>) -> Result<Resolved> {
        if self.version != SCENARIO_VERSION {
            bail!("unsupported scenario version {} (expected {SCENARIO_VERSION})", self.version);
        }
        let (surface, u_default, v_default, name) = match (&self.bundled, &self.surface) {
            (Some(b), None) => {
                let Some(bs) = bundled(b) else { bail!("unknown bundled surface `{b}`") };
                let u = GridSpec { start: bs.u_range.0, end: bs.u_range.1, samples: 50 };
                let v = GridSpec { start: bs.v_range.0, end: bs.v_range.1, samples: 50 };
                (bs.surface, Some(u), Some(v), b.clone())
            }
            (None, Some(s)) => (s.clone(), None, None, "surface".to_string()),
            (Some(_), Some(_)) => bail!("give either `bundled` or `surface`, not both"),
            (None, None) => bail!("scenario needs `bundled` or `surface`"),
        };
        let Some(u) = self.grids.u.or(u_default) else { bail!("missing u grid") };
        let Some(v) = self.grids.v.or(v_default) else { bail!("missing v grid") };
        let u = u.grid("u")?;
        let v = v.grid("v")?;
        let step = step_override.or(self.tolerances.step).unwrap_or(ruledgeo::geodesic::DEFAULT_STEP);
        if !(step > 0.0 && step.is_finite()) {
            bail!("step must be positive, got {step}");
        }
        let striction_samples = self.tolerances.striction_samples.unwrap_or(COARSE_SAMPLES);
        if striction_samples < 3 {
            bail!("striction_samples must be at least 3");
        }
        let (a, b) = (u.start.min(u.end), u.start.max(u.end));
        let dom = if a == b { (a - 1e-6, b + 1e-6) } else { (a, b) };
        let spec = surface.build(dom).context("building the surface")?.with_step(step);
        Ok(Resolved {
            name: self.name.clone().unwrap_or(name),
            spec,
            u,
            v,
            step,
            striction_samples,
            outputs: self.outputs.clone(),
        })
    }
}

//! `ruledgeo`: scenario-driven front end for the ruled-surface library.
//!
//! Exit status: 0 on success, 1 for an invalid scenario or command line,
//! 2 for a geometry error at run time, 3 when `verify` has failing criteria.

mod commands;
mod scenario;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use ruledgeo::GeometryError;

use scenario::{Artifact, Resolved, Scenario};

#[derive(Debug, Parser)]
#[command(name = "ruledgeo", version, about = "Ruled surfaces in Riemannian 3-manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario JSON file.
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Integration step, overriding the scenario.
    #[arg(long)]
    step: Option<f64>,
    /// Worker threads.
    #[arg(long, env = "RULEDGEO_THREADS")]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// OBJ grid mesh and per-vertex attribute CSV.
    Mesh(Common),
    /// Curvature report over the grid.
    Curvature(Common),
    /// Sannia invariants along the base curve.
    Invariants(Common),
    /// Central points, striction branches and an annotated mesh.
    Striction(Common),
    /// Base curve and frame from an invariant CSV.
    Reconstruct {
        #[command(flatten)]
        common: Common,
        /// Invariant table; defaults to `<out>/invariants_arc_length.csv`.
        #[arg(long)]
        invariants: Option<PathBuf>,
    },
    /// Every artifact listed under `outputs` in the scenario.
    Run(Common),
    /// The verification suite.
    Verify {
        /// Criteria to run (all when empty), e.g. `5 6 11`.
        ids: Vec<String>,
        /// Also write the table to `<out>/verify.txt`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, env = "RULEDGEO_THREADS")]
        threads: Option<usize>,
    },
}

/// Error carrying the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn validation(error: anyhow::Error) -> Self {
        Failure { code: 1, error }
    }

    /// Geometry errors map to 2, anything else (I/O, malformed input files) to 1.
    fn runtime(error: anyhow::Error) -> Self {
        let code = if error.chain().any(|e| e.is::<GeometryError>()) { 2 } else { 1 };
        Failure { code, error }
    }
}

fn set_threads(threads: Option<usize>) -> Result<(), Failure> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(Failure::validation(anyhow::anyhow!("--threads must be positive")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::validation(anyhow::anyhow!("thread pool: {e}")))?;
    }
    Ok(())
}

fn prepare(c: &Common) -> Result<Resolved, Failure> {
    set_threads(c.threads)?;
    let sc = Scenario::load(&c.scenario)
        .and_then(|s| s.resolve(c.step))
        .map_err(Failure::validation)?;
    std::fs::create_dir_all(&c.out)
        .with_context(|| format!("creating {}", c.out.display()))
        .map_err(Failure::validation)?;
    Ok(sc)
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn artifact(sc: &Resolved, out: &Path, a: Artifact, table: Option<&Path>) -> anyhow::Result<Vec<PathBuf>> {
    match a {
        Artifact::Mesh => commands::mesh(sc, out),
        Artifact::Curvature => commands::curvature(sc, out),
        Artifact::Invariants => commands::invariants(sc, out),
        Artifact::Striction => {
            let (paths, res) = commands::striction(sc, out)?;
            let found = res.rulings.iter().filter(|r| !r.roots().is_empty()).count();
            println!("{}: {} branch(es), central points on {found} of {} rulings", sc.name, res.branches.len(), res.rulings.len());
            Ok(paths)
        }
        Artifact::Reconstruct => {
            let default = out.join("invariants_arc_length.csv");
            commands::reconstruct_curve(sc, table.unwrap_or(&default), out)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (common, what, table) = match &cli.command {
        Command::Mesh(c) => (c, vec![Artifact::Mesh], None),
        Command::Curvature(c) => (c, vec![Artifact::Curvature], None),
        Command::Invariants(c) => (c, vec![Artifact::Invariants], None),
        Command::Striction(c) => (c, vec![Artifact::Striction], None),
        Command::Reconstruct { common, invariants } => (common, vec![Artifact::Reconstruct], invariants.as_deref()),
        Command::Run(c) => (c, Vec::new(), None),
        Command::Verify { ids, out, threads } => {
            set_threads(*threads)?;
            let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
            let outcomes = if ids.is_empty() { ruledgeo::verify::run_all() } else { ruledgeo::verify::run_selected(&ids) };
            if outcomes.is_empty() {
                return Err(Failure::validation(anyhow::anyhow!("no criterion matches {ids:?}")));
            }
            let table = commands::verify_table(&outcomes);
            print!("{table}");
            if let Some(dir) = out {
                std::fs::create_dir_all(dir)
                    .and_then(|_| std::fs::write(dir.join("verify.txt"), &table))
                    .with_context(|| format!("writing {}", dir.display()))
                    .map_err(Failure::validation)?;
            }
            if outcomes.iter().all(|o| o.passed) {
                return Ok(());
            }
            return Err(Failure { code: 3, error: anyhow::anyhow!("verification failed") });
        }
    };
    let sc = prepare(common)?;
    let what = if what.is_empty() { sc.outputs.clone() } else { what };
    if what.is_empty() {
        return Err(Failure::validation(anyhow::anyhow!("the scenario lists no outputs")));
    }
    for a in what {
        let paths = artifact(&sc, &common.out, a, table).map_err(Failure::runtime)?;
        report(&paths);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if f.code != 3 {
                eprintln!("error: {:#}", f.error);
            }
            ExitCode::from(f.code)
        }
    }
}

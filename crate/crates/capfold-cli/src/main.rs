//! `capfold`: generate caps, unfold them, check certificates, draw nets.
//!
//! Exit codes: 0 when the net is clean and every certificate passes, 1 when
//! the net is clean but some certificate fails, 2 on overlap or error.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use capfold::forest::OriginMode;
use capfold::gen::{generate_cap_report, GenConfig, Surface};
use capfold::geom::{delta_perp, omega_bound, phi_budget, turn_bound};
use capfold::mesh::io::{read_cap, to_obj, write_cap};
use capfold::mesh::{project, validate_cap_with, AngleMode, ConvexCap, RimMode, ValidateOptions};
use capfold::pipeline::{cut_and_unfold, UnfoldOptions, Unfolding, SCHEMA_VERSION};
use capfold::report;

use config::GenFile;

#[derive(Parser, Debug)]
#[command(name = "capfold", version, about = "Edge-unfold convex caps and certify the result")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random cap and write it with its metrics.
    Generate {
        #[command(flatten)]
        gen: GenArgs,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Mesh file format for the cap.
        #[arg(long, value_enum, default_value_t = MeshFmt::Off)]
        format: MeshFmt,
    },
    /// Run the pipeline and write the net SVG, the cut cap as OBJ and the
    /// diagnostics JSON.
    Unfold {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        modes: Modes,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run the pipeline and print the certificate report as JSON.
    Verify {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        modes: Modes,
        /// Check this many generated caps instead of one, in parallel.
        #[arg(long, conflicts_with = "input")]
        suite: Option<usize>,
        /// Smallest vertex count in a suite.
        #[arg(long, default_value_t = 20)]
        n_min: usize,
        /// Largest vertex count in a suite.
        #[arg(long, default_value_t = 200)]
        n_max: usize,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw the net with quadrant lines and strip boundaries, the forest over
    /// the projected cap, and the cap with cut edges as OBJ.
    Render {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        modes: Modes,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Print cap metrics and the bounds they imply, as JSON.
    Stats {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        modes: Modes,
    },
}

#[derive(Args, Debug, Clone)]
struct GenArgs {
    /// Number of vertices (at least 4).
    #[arg(long, value_parser = clap::value_parser!(u64).range(4..))]
    n: Option<u64>,
    /// Target largest face tilt, degrees.
    #[arg(long, default_value_t = 10.0)]
    phi: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = SurfaceArg::Paraboloid)]
    surface: SurfaceArg,
    /// Initial perturbation of interior vertices, fraction of ring spacing.
    #[arg(long, default_value_t = 0.3)]
    jitter: f64,
    /// Generator settings as JSON; replaces the flags above.
    #[arg(long, conflicts_with = "n")]
    config: Option<PathBuf>,
}

/// Exactly one of a mesh file or generator settings.
#[derive(Args, Debug, Clone)]
struct Source {
    /// OFF or OBJ mesh of the cap.
    #[arg(long, conflicts_with_all = ["n", "config"])]
    input: Option<PathBuf>,
    #[command(flatten)]
    gen: GenArgs,
}

#[derive(Args, Debug, Clone, Copy)]
struct Modes {
    #[arg(long, value_enum, default_value_t = AngleArg::NonObtuse)]
    angle_mode: AngleArg,
    #[arg(long, value_enum, default_value_t = OriginArg::ClosestToBoundary)]
    origin: OriginArg,
    #[arg(long, value_enum, default_value_t = RimArg::Strict)]
    rim: RimArg,
    /// Skip the strip construction and its checks.
    #[arg(long)]
    no_strips: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum MeshFmt {
    Off,
    Obj,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum SurfaceArg {
    Paraboloid,
    SphericalCap,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum AngleArg {
    StrictAcute,
    NonObtuse,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum OriginArg {
    ClosestToBoundary,
    Central,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum RimArg {
    Strict,
    Relaxed,
}

impl Modes {
    fn options(self) -> UnfoldOptions {
        UnfoldOptions {
            angle_mode: match self.angle_mode {
                AngleArg::StrictAcute => AngleMode::StrictAcute,
                AngleArg::NonObtuse => AngleMode::NonObtuse,
            },
            rim_mode: match self.rim {
                RimArg::Strict => RimMode::Strict,
                RimArg::Relaxed => RimMode::Relaxed,
            },
            origin_mode: match self.origin {
                OriginArg::ClosestToBoundary => OriginMode::ClosestToBoundary,
                OriginArg::Central => OriginMode::Central,
            },
            strips: !self.no_strips,
        }
    }
}

impl GenArgs {
    fn config(&self) -> Result<GenConfig> {
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            return GenFile::parse(&text).with_context(|| format!("parsing {}", path.display()));
        }
        let Some(n) = self.n else {
            bail!("no input: pass --input, --n or --config");
        };
        Ok(GenFile {
            n: n as usize,
            phi_deg: self.phi,
            seed: self.seed,
            surface: match self.surface {
                SurfaceArg::Paraboloid => Surface::Paraboloid,
                SurfaceArg::SphericalCap => Surface::SphericalCap,
            },
            jitter: self.jitter,
        }
        .to_config())
    }
}

impl Source {
    fn load(&self) -> Result<ConvexCap> {
        match &self.input {
            Some(path) => read_cap(path).with_context(|| format!("reading {}", path.display())),
            None => Ok(generate_cap_report(&self.gen.config()?)?.0),
        }
    }
}

/// A failure that still gets a JSON report and exit code 2.
struct Failure {
    stage: String,
    error: anyhow::Error,
}

fn fail(stage: &str) -> impl FnOnce(anyhow::Error) -> Failure + '_ {
    move |error| Failure { stage: stage.to_string(), error }
}

fn write_json(path: &Path, v: &Value) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

/// Prints to standard output; a closed pipe (`| head`) is not an error.
fn emit(v: &Value) {
    use std::io::Write;
    let text = serde_json::to_string_pretty(v).expect("json values serialize");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn out_dir(out: &Path) -> Result<()> {
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))
}

fn unfold(cap: &ConvexCap, modes: Modes) -> std::result::Result<Unfolding, Failure> {
    cut_and_unfold(cap, &modes.options())
        .map_err(|e| Failure { stage: e.stage().to_string(), error: anyhow::Error::new(e) })
}

fn cmd_generate(gen: &GenArgs, out: &Path, format: MeshFmt) -> std::result::Result<i32, Failure> {
    out_dir(out).map_err(fail("output"))?;
    let cfg = gen.config().map_err(fail("config"))?;
    let (cap, rep) = match generate_cap_report(&cfg) {
        Ok(r) => r,
        Err(e) => {
            let v = report::error_json("generate", &e.to_string());
            let _ = write_json(&out.join("error.json"), &v);
            return Err(Failure { stage: "generate".into(), error: e.into() });
        }
    };
    let name = match format {
        MeshFmt::Off => "cap.off",
        MeshFmt::Obj => "cap.obj",
    };
    write_cap(&cap, &out.join(name), &[]).map_err(|e| fail("output")(e.into()))?;
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "config": config::GenFile::from_config(&cfg),
        "attempts": rep.attempts,
        "vertices": cap.num_vertices(),
        "faces": cap.num_faces(),
        "phi_deg": rep.metrics.phi_actual.to_degrees(),
        "metrics": rep.metrics,
    });
    write_json(&out.join("metrics.json"), &v).map_err(fail("output"))?;
    Ok(0)
}

fn cmd_unfold(source: &Source, modes: Modes, out: &Path) -> std::result::Result<i32, Failure> {
    out_dir(out).map_err(fail("output"))?;
    // Any failure past this point still leaves a report behind.
    unfold_into(source, modes, out).inspect_err(|f| {
        let _ = write_json(&out.join("diagnostics.json"), &report::error_json(&f.stage, &format!("{:#}", f.error)));
    })
}

fn unfold_into(source: &Source, modes: Modes, out: &Path) -> std::result::Result<i32, Failure> {
    let cap = source.load().map_err(fail("input"))?;
    let u = unfold(&cap, modes)?;
    let pc = project(&cap).map_err(|e| fail("project")(e.into()))?;
    fs::write(out.join("net.svg"), report::net_svg(&pc, &u)).map_err(|e| fail("output")(e.into()))?;
    fs::write(out.join("cap.obj"), to_obj(&cap, &report::cut_edges(&cap, &u.forest)))
        .map_err(|e| fail("output")(e.into()))?;
    write_json(&out.join("diagnostics.json"), &report::unfolding_json(&u)).map_err(fail("output"))?;
    Ok(u.verdict().exit_code())
}

fn suite_entry(i: usize, count: usize, source: &Source, n_min: usize, n_max: usize, modes: Modes) -> (i32, Value) {
    let n = if count <= 1 { n_min } else { n_min + i * (n_max - n_min) / (count - 1) };
    let base = match (&source.gen.config, source.gen.n) {
        (Some(_), _) | (None, Some(_)) => match source.gen.config() {
            Ok(c) => c,
            Err(e) => return (2, json!({"stage": "config", "error": format!("{e:#}")})),
        },
        // The suite supplies n.
        (None, None) => GenArgs { n: Some(n as u64), ..source.gen.clone() }.config().expect("n is set"),
    };
    let cfg = GenConfig { n, seed: base.seed + i as u64, ..base };
    let cap = match generate_cap_report(&cfg) {
        Ok((c, _)) => c,
        Err(e) => return (2, json!({"n": n, "seed": cfg.seed, "stage": "generate", "error": e.to_string()})),
    };
    match cut_and_unfold(&cap, &modes.options()) {
        Ok(u) => {
            let v = u.verdict();
            let failed: Vec<&str> = u.diagnostics.failed().iter().map(|c| c.name).collect();
            (
                v.exit_code(),
                json!({
                    "n": n,
                    "seed": cfg.seed,
                    "phi_deg": u.metrics.phi_actual.to_degrees(),
                    "verdict": v,
                    "overlap_pairs": u.diagnostics.overlap.pairs.len(),
                    "failed": failed,
                }),
            )
        }
        Err(e) => (2, json!({"n": n, "seed": cfg.seed, "stage": e.stage(), "error": e.to_string()})),
    }
}

fn cmd_verify(
    source: &Source,
    modes: Modes,
    suite: Option<usize>,
    (n_min, n_max): (usize, usize),
    out: Option<&Path>,
) -> std::result::Result<i32, Failure> {
    let (code, v) = match suite {
        Some(count) => {
            if n_min < 4 || n_max < n_min {
                return Err(fail("config")(anyhow::anyhow!("need 4 ≤ n-min ≤ n-max")));
            }
            let runs: Vec<(i32, Value)> =
                (0..count).into_par_iter().map(|i| suite_entry(i, count, source, n_min, n_max, modes)).collect();
            let code = runs.iter().map(|r| r.0).max().unwrap_or(0);
            let tally = |c: i32| runs.iter().filter(|r| r.0 == c).count();
            let v = json!({
                "schema_version": SCHEMA_VERSION,
                "runs": count,
                "proven": tally(0),
                "empirical": tally(1),
                "failed": tally(2),
                "exit_code": code,
                "caps": runs.into_iter().map(|r| r.1).collect::<Vec<_>>(),
            });
            (code, v)
        }
        None => {
            let cap = source.load().map_err(fail("input"))?;
            match unfold(&cap, modes) {
                Ok(u) => (u.verdict().exit_code(), report::certificates_json(&u)),
                Err(f) => (2, report::error_json(&f.stage, &format!("{:#}", f.error))),
            }
        }
    };
    match out {
        Some(path) => write_json(path, &v).map_err(fail("output"))?,
        None => emit(&v),
    }
    Ok(code)
}

fn cmd_render(source: &Source, modes: Modes, out: &Path) -> std::result::Result<i32, Failure> {
    out_dir(out).map_err(fail("output"))?;
    let cap = source.load().map_err(fail("input"))?;
    let u = unfold(&cap, modes)?;
    let pc = project(&cap).map_err(|e| fail("project")(e.into()))?;
    let w = |name: &str, text: String| fs::write(out.join(name), text).map_err(|e| fail("output")(e.into()));
    w("net.svg", report::net_svg(&pc, &u))?;
    w("forest.svg", report::forest_svg(&pc, &u.forest, u.diagnostics.quadrants.as_ref()))?;
    w("cap.obj", to_obj(&cap, &report::cut_edges(&cap, &u.forest)))?;
    Ok(u.verdict().exit_code())
}

fn cmd_stats(source: &Source, modes: Modes) -> std::result::Result<i32, Failure> {
    let cap = source.load().map_err(fail("input"))?;
    let o = modes.options();
    let m = validate_cap_with(&cap, ValidateOptions { angle_mode: o.angle_mode, rim_mode: o.rim_mode })
        .map_err(|e| fail("validate")(e.into()))?;
    let phi = m.phi_actual;
    let deg = |r: Result<f64, capfold::geom::GeomError>| r.map(f64::to_degrees).ok();
    let budget = phi_budget(m.acuteness_gap);
    let v = json!({
        "schema_version": SCHEMA_VERSION,
        "vertices": cap.num_vertices(),
        "interior_vertices": cap.num_interior(),
        "faces": cap.num_faces(),
        "phi_deg": phi.to_degrees(),
        "acuteness_gap_deg": m.acuteness_gap.to_degrees(),
        "projected_gap_deg": m.projected_gap.to_degrees(),
        "phi_budget_deg": budget.to_degrees(),
        "within_budget": phi <= budget,
        "omega_deg": m.omega.to_degrees(),
        "omega_bound_deg": deg(omega_bound(phi)),
        "delta_perp_deg": deg(delta_perp(phi)),
        "turn_bound_deg": deg(turn_bound(phi, m.omega)),
        "max_face_angle_deg": m.max_face_angle.to_degrees(),
        "max_projected_angle_deg": m.max_projected_angle.to_degrees(),
        "rim_planar": m.rim_planar,
        "warnings": m.warnings,
    });
    emit(&v);
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Generate { gen, out, format } => cmd_generate(gen, out, *format),
        Command::Unfold { source, modes, out } => cmd_unfold(source, *modes, out),
        Command::Verify { source, modes, suite, n_min, n_max, out } => {
            cmd_verify(source, *modes, *suite, (*n_min, *n_max), out.as_deref())
        }
        Command::Render { source, modes, out } => cmd_render(source, *modes, out),
        Command::Stats { source, modes } => cmd_stats(source, *modes),
    };
    match res {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("capfold: {}: {:#}", f.stage, f.error);
            ExitCode::from(2)
        }
    }
}

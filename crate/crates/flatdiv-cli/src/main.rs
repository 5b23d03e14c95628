use clap::{Parser, Subcommand};
use flatdiv::cantor::CantorTree;
use flatdiv::census::{cylinders_up_to, select_cross_curve, ConstantsProfile, FULL_CIRCLE};
use flatdiv::flow::{lemma_l2_audit, occupancy_fraction, systole_trace};
use flatdiv::pipeline::constants::{paper_constants, ConstantsInput};
use flatdiv::pipeline::output::{systole_svg, trace_csv, tree_svg, OutputDir};
use flatdiv::pipeline::{
    default_eps, dimension_stage, getting_started, is_config_error, load_surface, run_pipeline, RunConfig,
};
use flatdiv::surface::enumerate::flat_systole;
use flatdiv::twist::{grow_tree, GrowOptions};
use flatdiv::{Error, TranslationSurface};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "flatdiv", version, about = "Cylinder censuses, twist-family trees and flow diagnostics on translation surfaces")]
struct Cli {
    /// Bundled surface name (torus, l_shape_h2, octagon_h2) or a JSON file.
    #[arg(long, global = true)]
    surface: Option<String>,
    /// Run configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files and the manifest.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Relative tolerance for orientation predicates on non-integer surfaces.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Cylinders up to a circumference bound.
    Census {
        #[arg(long, default_value_t = 10.0)]
        bound: f64,
        #[arg(long, default_value_t = 0.0)]
        area_min: f64,
        /// Angular sector `lo hi` in radians.
        #[arg(long, num_args = 2, allow_hyphen_values = true)]
        sector: Option<Vec<f64>>,
    },
    /// Find a starting cylinder with a good protochild.
    Start {
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Grow the interval tree.
    Grow {
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        branch_cap: Option<usize>,
    },
    /// Dimension lower bound of a tree (grown from the config unless given).
    Dimension {
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Systole along `g_t r_theta`.
    Trace {
        #[arg(long)]
        theta: f64,
        #[arg(long, default_value_t = 10.0)]
        horizon: f64,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Short-window audit along the leftmost branch of a tree.
    AuditL2 {
        #[arg(long)]
        tree: Option<PathBuf>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        /// Fail when `4 / eps^2 < log|beta|` does not hold.
        #[arg(long)]
        enforce: bool,
    },
    /// Evaluate the constant recipe for the surface and profile.
    PaperConstants {
        #[arg(long)]
        d4: Option<f64>,
        #[arg(long)]
        c3: Option<f64>,
    },
    /// Every stage, with outputs and a manifest.
    Run,
}

enum Failure {
    Config(String),
    Stage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if is_config_error(&e) {
            Failure::Config(e.to_string())
        } else {
            Failure::Stage(e.to_string())
        }
    }
}

struct Ctx {
    cfg: RunConfig,
    out: Option<PathBuf>,
}

impl Ctx {
    fn surface(&self) -> Result<TranslationSurface, Failure> {
        load_surface(&self.cfg.surface, self.cfg.tolerances).map_err(|e| Failure::Config(format!("surface {}: {e}", self.cfg.surface)))
    }

    fn constants(&self, s: &TranslationSurface) -> Result<ConstantsProfile, Failure> {
        self.cfg.constants.resolve(s.signature().genus).map_err(|e| Failure::Config(e.to_string()))
    }

    fn tree(&self, path: &Option<PathBuf>, s: &TranslationSurface, k: &ConstantsProfile) -> Result<CantorTree, Failure> {
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?;
                serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))
            }
            None => {
                let start = getting_started(s, k, self.cfg.start_radius)?;
                let opts = GrowOptions::new(self.cfg.depth, self.cfg.branch_cap);
                Ok(grow_tree(s, &start.beta0, opts, k)?)
            }
        }
    }

    /// Print `v` and, with `--out`, store it with any extra files.
    fn emit(&self, name: &str, v: &Value, extra: &[(String, Vec<u8>)]) -> Result<(), Failure> {
        print_json(v);
        if let Some(dir) = &self.out {
            let io = |e: Error| Failure::Stage(format!("output: {e}"));
            let mut o = OutputDir::create(dir).map_err(io)?;
            o.write_json(name, v).map_err(io)?;
            for (f, data) in extra {
                o.write(f, data).map_err(io)?;
            }
            o.finish(&self.cfg.to_json(), self.cfg.seed).map_err(io)?;
        }
        Ok(())
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(|e| Failure::Config(format!("{}: {e}", p.display())))?,
        None => RunConfig::default(),
    };
    if let Some(s) = &cli.surface {
        cfg.surface = s.clone();
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.tolerance {
        if !(t > 0.0 && t < 1.0) {
            return Err(Failure::Config(format!("tolerance must lie in (0, 1), got {t}")));
        }
        cfg.tolerances.predicate = t;
    }
    if let Some(o) = &cli.out {
        cfg.out = Some(o.display().to_string());
    }
    cfg.check().map_err(|e| Failure::Config(e.to_string()))?;
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<(), Failure> {
    let cfg = load_config(&cli)?;
    let out = cfg.out.as_ref().map(PathBuf::from);
    let ctx = Ctx { cfg, out };
    match cli.cmd {
        Cmd::Census { bound, area_min, sector } => {
            let s = ctx.surface()?;
            let sector = sector.map_or(FULL_CIRCLE, |v| (v[0], v[1]));
            let cyls = cylinders_up_to(&s, bound, area_min, sector)?;
            let rows: Vec<Value> = cyls
                .iter()
                .map(|c| {
                    json!({
                        "core_holonomy": [c.core_holonomy.x, c.core_holonomy.y],
                        "circumference": c.circumference,
                        "height": c.height,
                        "area": c.area,
                        "area_fraction": c.area_fraction,
                        "top_multiplicity": c.top_multiplicity,
                        "boundary_connections": c.boundary_connections.len(),
                        "cross_curve": select_cross_curve(&s, c).ok().map(|x| [x.holonomy.x, x.holonomy.y]),
                    })
                })
                .collect();
            let v = json!({ "surface": s.label(), "stratum": s.signature().stratum(), "bound": bound, "count": rows.len(), "cylinders": rows });
            ctx.emit("census.json", &v, &[])
        }
        Cmd::Start { radius } => {
            let s = ctx.surface()?;
            let k = ctx.constants(&s)?;
            let st = getting_started(&s, &k, radius.unwrap_or(ctx.cfg.start_radius))?;
            let v = json!({
                "beta0": {
                    "core_holonomy": [st.beta0.core_holonomy.x, st.beta0.core_holonomy.y],
                    "circumference": st.beta0.circumference,
                    "area_fraction": st.beta0.area_fraction,
                },
                "t": st.t,
                "good_indices": st.good_indices,
                "candidates_tried": st.candidates_tried,
            });
            ctx.emit("start.json", &v, &[])
        }
        Cmd::Grow { depth, branch_cap } => {
            let s = ctx.surface()?;
            let k = ctx.constants(&s)?;
            let start = getting_started(&s, &k, ctx.cfg.start_radius)?;
            let opts = GrowOptions::new(depth.unwrap_or(ctx.cfg.depth), branch_cap.unwrap_or(ctx.cfg.branch_cap));
            let tree = grow_tree(&s, &start.beta0, opts, &k)?;
            let v = serde_json::to_value(&tree).expect("tree serializes");
            ctx.emit("tree.json", &v, &[("tree.svg".into(), tree_svg(&tree).into_bytes())])
        }
        Cmd::Dimension { tree, depth } => {
            let s = ctx.surface()?;
            let k = ctx.constants(&s)?;
            let t = ctx.tree(&tree, &s, &k)?;
            let d = dimension_stage(&t, depth.unwrap_or(t.depth));
            ctx.emit("dimension.json", &serde_json::to_value(&d).expect("json"), &[])
        }
        Cmd::Trace { theta, horizon, step, eps } => {
            let s = ctx.surface()?;
            let k = ctx.constants(&s)?;
            let eps = eps.unwrap_or_else(|| default_eps(&k));
            let tr = systole_trace(&s, theta, horizon, step, eps)?;
            let v = json!({
                "theta": theta,
                "horizon": horizon,
                "step": step,
                "eps": eps,
                "occupancy": occupancy_fraction(&tr, eps),
                "min_systole": tr.systoles.iter().copied().fold(f64::INFINITY, f64::min),
                "samples": tr.times.len(),
            });
            let files = vec![
                ("trace.csv".to_string(), trace_csv(&tr).into_bytes()),
                ("systole.svg".to_string(), systole_svg(&[("trace".into(), &tr)], eps).into_bytes()),
            ];
            ctx.emit("trace.json", &v, &files)
        }
        Cmd::AuditL2 { tree, eps, step, enforce } => {
            let s = ctx.surface()?;
            let k = ctx.constants(&s)?;
            let t = ctx.tree(&tree, &s, &k)?;
            let eps = eps.unwrap_or_else(|| default_eps(&k));
            let path = t.leftmost_path();
            if path.len() < 2 {
                return Err(Failure::Stage("tree has no parent/child pair".into()));
            }
            let w = t.node(*path.last().unwrap()).cylinder.base_core;
            let mut audits = Vec::new();
            for p in path.windows(2) {
                audits.push(lemma_l2_audit(&s, &t, p[0], p[1], w, eps, step, enforce)?);
            }
            let pass = audits.iter().all(|a| a.pass);
            let v = json!({ "eps": eps, "step": step, "pass": pass, "audits": audits });
            ctx.emit("audit_l2.json", &v, &[])
        }
        Cmd::PaperConstants { d4, c3 } => {
            let s = ctx.surface()?;
            let k = ctx.constants(&s)?;
            let sig = s.signature();
            let input = ConstantsInput {
                genus: sig.genus,
                sigma: sig.zeros() + sig.marked_count,
                systole: flat_systole(&s)?,
                profile: k,
                d4,
                c3,
            };
            let r = paper_constants(&input);
            ctx.emit("paper_constants.json", &json!({ "input": input, "constants": r }), &[])
        }
        Cmd::Run => {
            let report = run_pipeline(&ctx.cfg, ctx.out.as_deref()).map_err(|e| {
                if e.is_config() {
                    Failure::Config(e.to_string())
                } else {
                    Failure::Stage(e.to_string())
                }
            })?;
            let v = json!({
                "surface": report.surface,
                "stratum": report.stratum,
                "tree_nodes": report.tree_nodes,
                "dimension": report.dimension,
                "diagnostics": report.diagnostics,
                "manifest": report.manifest,
            });
            print_json(&v);
            Ok(())
        }
    }
}

// a closed pipe (`| head`) is not an error
fn print_json(v: &Value) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json"));
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Stage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}

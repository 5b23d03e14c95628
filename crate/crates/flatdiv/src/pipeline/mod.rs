//! Run configuration and the end-to-end pipeline: load, start, grow,
//! dimension, diagnostics, outputs.

pub mod constants;
pub mod output;

use crate::bundled;
use crate::cantor::{dimension_lower_bound, half_identity_sum, cheung_sum, CantorTree, DimensionReport, Direction, PathPolicy, extract_direction};
use crate::census::{cylinders_up_to, is_thick, ConstantsProfile, Cylinder, FULL_CIRCLE};
use crate::error::{Error, Result};
use crate::flow::{lemma_l2_audit, occupancy_of, systole_trace, systole_trace_along, L2Audit, OrbitTrace};
use crate::surface::{build_surface_with, flat_systole, SurfaceSpec, TranslationSurface};
use crate::tolerance::Tolerances;
use crate::twist::{good_protochild_indices, grow_tree, GrowOptions, TwistFamily};
use output::{systole_svg, trace_csv, tree_svg, Manifest, OutputDir};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Free constants; `M`, `C` and `nu` are derived when absent and checked
/// when present.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsConfig {
    pub c: f64,
    pub delta: f64,
    pub theta0: f64,
    pub theta1: f64,
    #[serde(rename = "L")]
    pub big_l: f64,
    pub m: u32,
    #[serde(rename = "M", skip_serializing_if = "Option::is_none")]
    pub big_m: Option<f64>,
    #[serde(rename = "C", skip_serializing_if = "Option::is_none")]
    pub big_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        let k = ConstantsProfile::default_h2();
        ConstantsConfig { c: k.c, delta: k.delta, theta0: k.theta0, theta1: k.theta1, big_l: k.big_l, m: k.m, big_m: None, big_c: None, nu: None }
    }
}

impl ConstantsConfig {
    pub fn resolve(&self, genus: usize) -> Result<ConstantsProfile> {
        let mut k = ConstantsProfile::practical(self.c, self.delta, self.theta0, self.theta1, self.big_l, self.m, genus);
        if let Some(v) = self.big_m {
            k.big_m = v;
        }
        if let Some(v) = self.big_c {
            k.big_c = v;
        }
        if let Some(v) = self.nu {
            k.nu = v;
        }
        k.validate(genus)?;
        Ok(k)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiagnosticsConfig {
    pub enabled: bool,
    pub step: f64,
    /// Defaults to `delta sin(theta2) / 2`.
    pub eps: Option<f64>,
    /// Depth of the branch followed by the flow diagnostics.
    pub branch_depth: usize,
    /// Number of random control directions.
    pub controls: usize,
}

impl Default for DiagnosticsConfig {
    fn default() -> Self {
        DiagnosticsConfig { enabled: true, step: 0.05, eps: None, branch_depth: 4, controls: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Bundled surface name or path to a surface description.
    pub surface: String,
    pub constants: ConstantsConfig,
    pub depth: usize,
    pub branch_cap: usize,
    pub start_radius: f64,
    pub seed: u64,
    pub out: Option<String>,
    pub tolerances: Tolerances,
    pub diagnostics: DiagnosticsConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            surface: "l_shape_h2".into(),
            constants: ConstantsConfig::default(),
            depth: 3,
            branch_cap: 4,
            start_radius: 3.0,
            seed: 0,
            out: None,
            tolerances: Tolerances::default(),
            diagnostics: DiagnosticsConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: RunConfig = serde_json::from_str(text)?;
        c.check()?;
        Ok(c)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn check(&self) -> Result<()> {
        if self.branch_cap == 0 {
            return Err(Error::InvalidSpec("branch_cap must be at least 1".into()));
        }
        if !(self.start_radius > 0.0) {
            return Err(Error::InvalidSpec("start_radius must be positive".into()));
        }
        if !(self.diagnostics.step > 0.0) {
            return Err(Error::InvalidSpec("diagnostics.step must be positive".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// Whether an error comes from the inputs rather than from a stage.
pub fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidSpec(_)
            | Error::NonMatchingEdges(..)
            | Error::NonTrivialHolonomy(..)
            | Error::ZeroArea
            | Error::InvalidConstants(_)
    )
}

/// Resolve a bundled name or read a description from disk.
pub fn load_surface(name: &str, tol: Tolerances) -> Result<TranslationSurface> {
    let spec = match bundled::spec(name) {
        Some(s) => s,
        None => SurfaceSpec::load(name)?,
    };
    build_surface_with(&spec, tol)
}

/// `delta sin(theta2) / 2` with `cot theta2 = 10 cot theta1`.
pub fn default_eps(k: &ConstantsProfile) -> f64 {
    let theta2 = (k.theta1.tan() / 10.0).atan();
    k.delta * theta2.sin() / 2.0
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StartReport {
    pub beta0: Cylinder,
    /// First good twist parameter of `beta0`.
    pub t: f64,
    pub good_indices: usize,
    pub candidates_tried: usize,
}

/// First cylinder of circumference at least `radius` (and more than `e`)
/// with area at least `c` whose twist family has a good protochild.
pub fn getting_started(x: &TranslationSurface, k: &ConstantsProfile, radius: f64) -> Result<StartReport> {
    if !is_thick(x, &k.thickness())?.0 {
        return Err(Error::NoStartFound("surface is not thick".into()));
    }
    let lo = radius.max(std::f64::consts::E * (1.0 + 1e-9));
    let mut tried = 0;
    let mut bound = 2.0 * lo;
    let mut seen = 0.0;
    for _ in 0..4 {
        let census = cylinders_up_to(x, bound, k.c, FULL_CIRCLE)?;
        for cyl in census.iter().filter(|c| c.circumference >= lo && c.circumference > seen) {
            tried += 1;
            let fam = match TwistFamily::new(x, cyl, k) {
                Ok(f) => f,
                Err(Error::NoCrossCurveWithinBound(_) | Error::TooShort(_)) => continue,
                Err(e) => return Err(e),
            };
            let good = good_protochild_indices(&fam, &k.thickness(), &[])?;
            if let Some(&t) = good.indices.first() {
                return Ok(StartReport { beta0: cyl.clone(), t, good_indices: good.indices.len(), candidates_tried: tried });
            }
        }
        seen = bound;
        bound *= 2.0;
    }
    Err(Error::NoStartFound(format!("no cylinder of length in [{lo}, {seen}] with area at least {} has a good protochild", k.c)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionOutput {
    pub report: Option<DimensionReport>,
    pub error: Option<String>,
    /// Largest gap between the `s = 1/2` Cheung sum and its length form.
    pub half_identity_max_error: f64,
    pub pruned_nodes: usize,
}

/// Dimension bound of the tree cut at `depth`, after pruning dead
/// branches.
pub fn dimension_stage(tree: &CantorTree, depth: usize) -> DimensionOutput {
    let t = tree.truncated(depth).pruned();
    let mut worst: f64 = 0.0;
    for n in t.internal_nodes() {
        let a = cheung_sum(&t, n.id, 0.5).unwrap();
        let b = half_identity_sum(&t, n.id).unwrap();
        worst = worst.max((a - b).abs() / b.abs().max(1e-300));
    }
    let (report, error) = match dimension_lower_bound(&t) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    DimensionOutput { report, error, half_identity_max_error: worst, pruned_nodes: tree.truncated(depth).nodes.len() - t.nodes.len() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthOccupancy {
    pub depth: usize,
    pub horizon: f64,
    pub occupancy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlOccupancy {
    pub theta: f64,
    pub horizon: f64,
    pub occupancy: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchDiagnostics {
    pub direction: Direction,
    pub eps: f64,
    pub step: f64,
    pub l2: Vec<L2Audit>,
    pub occupancy: Vec<DepthOccupancy>,
    pub controls: Vec<ControlOccupancy>,
}

/// Flow diagnostics along the leftmost branch of `tree` together with
/// random control directions drawn from `seed`.
pub fn branch_diagnostics(
    x: &TranslationSurface,
    tree: &CantorTree,
    eps: f64,
    step: f64,
    controls: usize,
    seed: u64,
) -> Result<(BranchDiagnostics, OrbitTrace, Vec<OrbitTrace>)> {
    let direction = extract_direction(tree, &PathPolicy::Leftmost)?;
    let path = &direction.path;
    let deep = tree.node(*path.last().unwrap());
    let w = deep.cylinder.base_core;
    let horizon = deep.cylinder.length.ln();
    let mut l2 = Vec::new();
    for p in path.windows(2) {
        l2.push(lemma_l2_audit(x, tree, p[0], p[1], w, eps, step, false)?);
    }
    let trace = systole_trace_along(x, w, horizon, step, eps)?;
    let mut occupancy = Vec::new();
    for (d, &id) in path.iter().enumerate().skip(1) {
        let h = tree.node(id).cylinder.length.ln();
        let n = trace.times.iter().take_while(|&&t| t <= h + 1e-9).count();
        occupancy.push(DepthOccupancy { depth: d, horizon: h, occupancy: occupancy_of(&trace.systoles[..n], eps) });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ctrl = Vec::new();
    let mut ctrl_traces = Vec::new();
    for _ in 0..controls {
        let theta = rng.gen_range(0.0..std::f64::consts::PI);
        let tr = systole_trace(x, theta, horizon, step, eps)?;
        ctrl.push(ControlOccupancy { theta, horizon, occupancy: occupancy_of(&tr.systoles, eps) });
        ctrl_traces.push(tr);
    }
    Ok((BranchDiagnostics { direction, eps, step, l2, occupancy, controls: ctrl }, trace, ctrl_traces))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub surface: String,
    pub stratum: String,
    pub systole: f64,
    pub constants: ConstantsProfile,
    pub start: StartReport,
    pub tree_nodes: usize,
    pub dimension: DimensionOutput,
    pub diagnostics: Option<BranchDiagnostics>,
    pub manifest: Option<Manifest>,
}

/// Error tagged with the stage that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct StageError {
    pub stage: &'static str,
    pub error: Error,
}

impl std::fmt::Display for StageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.stage, self.error)
    }
}

impl std::error::Error for StageError {}

impl StageError {
    pub fn is_config(&self) -> bool {
        self.stage == "config" || (self.stage == "surface" && (is_config_error(&self.error) || matches!(self.error, Error::Io(_))))
    }
}

fn stage<T>(name: &'static str, r: Result<T>) -> std::result::Result<T, StageError> {
    r.map_err(|error| StageError { stage: name, error })
}

/// Run every stage; with `out` the artifacts and a manifest are written
/// there.
pub fn run_pipeline(cfg: &RunConfig, out: Option<&Path>) -> std::result::Result<RunReport, StageError> {
    stage("config", cfg.check())?;
    let x = stage("surface", load_surface(&cfg.surface, cfg.tolerances))?;
    let genus = x.signature().genus;
    let k = stage("config", cfg.constants.resolve(genus))?;
    let systole = stage("surface", flat_systole(&x))?;
    let start = stage("start", getting_started(&x, &k, cfg.start_radius))?;
    let ext = if cfg.diagnostics.enabled { cfg.diagnostics.branch_depth.saturating_sub(cfg.depth) } else { 0 };
    let opts = GrowOptions { depth: cfg.depth, branch_cap: cfg.branch_cap, branch_extension: ext };
    let tree = stage("grow", grow_tree(&x, &start.beta0, opts, &k))?;
    let dimension = dimension_stage(&tree, cfg.depth);
    let eps = cfg.diagnostics.eps.unwrap_or_else(|| default_eps(&k));
    let diag = if cfg.diagnostics.enabled && tree.nodes.len() > 1 {
        Some(stage("diagnostics", branch_diagnostics(&x, &tree, eps, cfg.diagnostics.step, cfg.diagnostics.controls, cfg.seed))?)
    } else {
        None
    };
    let mut report = RunReport {
        surface: x.label().to_string(),
        stratum: x.signature().stratum(),
        systole,
        constants: k,
        start,
        tree_nodes: tree.nodes.len(),
        dimension,
        diagnostics: diag.as_ref().map(|d| d.0.clone()),
        manifest: None,
    };
    if let Some(dir) = out {
        let write = || -> Result<Manifest> {
            let mut o = OutputDir::create(dir)?;
            o.write_json("tree.json", &tree)?;
            o.write_json("dimension.json", &report.dimension)?;
            o.write("tree.svg", tree_svg(&tree).as_bytes())?;
            if let Some((d, tr, ctrl)) = &diag {
                o.write_json("diagnostics.json", d)?;
                o.write("trace_branch.csv", trace_csv(tr).as_bytes())?;
                let mut named = vec![("branch".to_string(), tr)];
                for (i, c) in ctrl.iter().enumerate() {
                    o.write(&format!("trace_control_{i}.csv"), trace_csv(c).as_bytes())?;
                    named.push((format!("control {i}"), c));
                }
                o.write("systole.svg", systole_svg(&named, eps).as_bytes())?;
            }
            o.write_json("report.json", &report)?;
            o.finish(&cfg.to_json(), cfg.seed)
        };
        report.manifest = Some(stage("output", write())?);
    }
    Ok(report)
}

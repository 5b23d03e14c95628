//! Twist families of a parent cylinder, good protochild indices and tree
//! growth.

use crate::cantor::{CantorNode, CantorTree, ChildChecks, CylinderSummary, Rejection};
use crate::census::{
    crossing_connection, is_thick, select_child, select_cross_index, ConstantsProfile, CrossIndex, Cylinder,
    ThicknessProfile,
};
use crate::error::{Error, Result};
use crate::interval::{angle_interval_for, check_relative, exclusion_i1, RelativeInterval, TwistExclusion};
use crate::surface::frame::Frame;
use crate::surface::{SaddleConnection, TranslationSurface};
use crate::vector::PlanarVector;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Parent cylinder with its cross curve and twist range, measured on the
/// source surface.
#[derive(Clone, Debug)]
pub struct TwistFamily {
    pub source: TranslationSurface,
    pub parent: Cylinder,
    /// Cross curve oriented with positive dot product against the core.
    pub cross: SaddleConnection,
    pub cross_index: CrossIndex,
    pub t_min: f64,
    pub t_max: f64,
    pub m: u32,
    /// Surface whose reduced presentation seeds protochild reductions.
    seed: Option<TranslationSurface>,
}

impl TwistFamily {
    /// Family of `parent` on `source` with range `[2 log|beta| / delta, 2^m t_min]`.
    pub fn new(source: &TranslationSurface, parent: &Cylinder, k: &ConstantsProfile) -> Result<Self> {
        let len = parent.circumference;
        if !(len > 1.0) {
            return Err(Error::TooShort(len));
        }
        let t_min = 2.0 * len.ln() / k.delta;
        Self::with_range(source, parent, t_min, k.m)
    }

    /// Family with an explicit `t_min`; the range spans `m` dyadic blocks.
    pub fn with_range(source: &TranslationSurface, parent: &Cylinder, t_min: f64, m: u32) -> Result<Self> {
        if !parent.has_geometry() {
            return Err(Error::NoCrossCurveWithinBound("cylinder has no base description".into()));
        }
        let parent = parent.in_frame(source);
        if let crate::surface::arith::Arith::Float { tol, .. } = source.arith() {
            // base-chart rounding must stay well below unit cross products
            let reach = 2f64.powi(m as i32) * t_min * parent.circumference * source.frame().matrix().inverse().map_or(1.0, |i| norm2(&i));
            if reach * reach * tol > 1.0 {
                return Err(Error::PrecisionExhausted);
            }
        }
        let cross_index = select_cross_index(source, &parent)?;
        let cross = crossing_connection(source, &parent, cross_index, 0)?;
        Ok(TwistFamily { source: source.clone(), parent, cross, cross_index, t_min, t_max: 2f64.powi(m as i32) * t_min, m, seed: None })
    }

    /// Reduce protochild surfaces starting from `s`, which must share the
    /// source's base presentation.
    pub fn seeded_from(mut self, s: &TranslationSurface) -> Self {
        if s.same_base(&self.source) {
            self.seed = Some(s.clone());
        }
        self
    }

    pub fn core_base(&self) -> PlanarVector {
        self.parent.base_core().expect("checked at construction")
    }

    /// `[2^k t_min, 2^(k+1) t_min)` for `k < m`.
    pub fn blocks(&self) -> Vec<(f64, f64)> {
        (0..self.m)
            .map(|k| (2f64.powi(k as i32) * self.t_min, 2f64.powi(k as i32 + 1) * self.t_min))
            .collect()
    }

    fn check_range(&self, t: f64) -> Result<()> {
        let eps = 1e-12 * self.t_max.abs();
        if !(t >= self.t_min - eps && t <= self.t_max + eps) {
            return Err(Error::OutOfRange { t, lo: self.t_min, hi: self.t_max });
        }
        Ok(())
    }

    /// `s + t beta` in the base chart.
    pub fn s_t_base(&self, t: f64) -> PlanarVector {
        self.cross.base + self.core_base().scale(t)
    }

    fn frame_for(&self, t: f64) -> Frame {
        let w = self.s_t_base(t);
        let lambda = self.source.physical(w).norm();
        let aligned = Frame::Aligned { w, lambda, a: self.source.frame().matrix(), scale: 1.0 };
        if t.fract() == 0.0 || !self.source.arith().is_exact() {
            aligned
        } else {
            Frame::Linear(aligned.matrix())
        }
    }

    fn surface_after(&self, t: f64, prev: Option<&TranslationSurface>) -> TranslationSurface {
        let base = prev.or(self.seed.as_ref()).unwrap_or(&self.source);
        base.with_frame(self.frame_for(t))
    }
}

fn norm2(m: &crate::vector::Mat2) -> f64 {
    m.0.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
}

/// `s + t beta`.
pub fn twist_vector(s: PlanarVector, beta: PlanarVector, t: f64) -> PlanarVector {
    s + beta.scale(t)
}

/// Holonomy of `s_t` on the source surface.
pub fn protochild_holonomy(f: &TwistFamily, t: f64) -> Result<PlanarVector> {
    f.check_range(t)?;
    if t.fract() == 0.0 {
        Ok(f.source.physical(f.s_t_base(t)))
    } else {
        Ok(twist_vector(f.cross.holonomy, f.parent.core_holonomy, t))
    }
}

/// The source surface rotated so that `s_t` is vertical and flowed until it
/// has length one.
pub fn protochild_surface(f: &TwistFamily, t: f64) -> Result<TranslationSurface> {
    f.check_range(t)?;
    Ok(f.surface_after(t, None))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockReport {
    pub k: u32,
    pub lo: f64,
    pub hi: f64,
    /// Greedy selections before trimming.
    pub selected: Vec<f64>,
    pub kept: Vec<f64>,
    /// Integer points skipped by exclusion intervals.
    pub excluded: usize,
    /// Integer points whose protochild turned out thin.
    pub thin: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoodIndices {
    pub indices: Vec<f64>,
    pub blocks: Vec<BlockReport>,
    pub exclusions: Vec<TwistExclusion>,
}

impl GoodIndices {
    /// `EmptyBlock` for every block that kept nothing.
    pub fn block_errors(&self) -> Vec<Error> {
        self.blocks.iter().filter(|b| b.kept.is_empty()).map(|b| Error::EmptyBlock(b.k as usize)).collect()
    }
}

/// Scan integer twist parameters block by block. Points inside an
/// exclusion interval are skipped; the others are verified thick directly,
/// and a thin one adds the exclusion interval of its witness. The first
/// and last selection of each block are dropped.
pub fn good_protochild_indices(f: &TwistFamily, k: &ThicknessProfile, census: &[Cylinder]) -> Result<GoodIndices> {
    let mut exclusions: Vec<TwistExclusion> = Vec::new();
    for c in census {
        match exclusion_i1(&c.in_frame(&f.source), &f.parent, &f.cross, k.delta) {
            Ok(e) if !e.is_empty() => exclusions.push(e),
            Ok(_) | Err(Error::ParallelToParent) => {}
            Err(e) => return Err(e),
        }
    }
    let mut blocks = Vec::new();
    let mut indices = Vec::new();
    for (bk, (lo, hi)) in f.blocks().into_iter().enumerate() {
        let mut rep = BlockReport { k: bk as u32, lo, hi, selected: Vec::new(), kept: Vec::new(), excluded: 0, thin: 0 };
        let mut x = lo.ceil();
        let mut prev: Option<TranslationSurface> = None;
        while x < hi {
            if let Some(end) = exclusions.iter().filter(|e| e.contains(x)).map(|e| e.hi()).reduce(f64::max) {
                let nx = end.ceil().max(x + 1.0);
                rep.excluded += ((nx.min(hi.ceil()) - x) as usize).max(1);
                x = nx;
                continue;
            }
            let p = f.surface_after(x, prev.as_ref());
            let (thick, witness) = is_thick(&p, k)?;
            p.reduced()?;
            prev = Some(p);
            if thick {
                rep.selected.push(x);
                x += 1.0;
                continue;
            }
            rep.thin += 1;
            let w = witness.expect("thin surfaces have a witness");
            match exclusion_i1(&w.in_frame(&f.source), &f.parent, &f.cross, k.delta) {
                Ok(e) if e.contains(x) => exclusions.push(e),
                Ok(_) | Err(Error::ParallelToParent) => x += 1.0,
                Err(e) => return Err(e),
            }
        }
        if rep.selected.len() > 2 {
            rep.kept = rep.selected[1..rep.selected.len() - 1].to_vec();
        }
        indices.extend_from_slice(&rep.kept);
        blocks.push(rep);
    }
    Ok(GoodIndices { indices, blocks, exclusions })
}

/// Up to `cap` entries of `v`, evenly spaced and including both ends.
pub fn evenly_spaced(v: &[f64], cap: usize) -> Vec<f64> {
    if cap == 0 || v.is_empty() {
        return Vec::new();
    }
    if v.len() <= cap {
        return v.to_vec();
    }
    if cap == 1 {
        return vec![v[v.len() / 2]];
    }
    (0..cap).map(|i| v[(i * (v.len() - 1) + (cap - 1) / 2) / (cap - 1)]).collect()
}

/// Options for [`grow_tree`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowOptions {
    pub depth: usize,
    pub branch_cap: usize,
    /// Extra levels grown below the leftmost deepest node, one child each.
    pub branch_extension: usize,
}

impl GrowOptions {
    pub fn new(depth: usize, branch_cap: usize) -> Self {
        GrowOptions { depth, branch_cap, branch_extension: 0 }
    }
}

struct Work {
    cyl: Cylinder,
    seed: Option<TranslationSurface>,
}

fn summary(c: &Cylinder) -> CylinderSummary {
    CylinderSummary {
        length: c.circumference,
        theta: c.core_holonomy.line_angle(),
        n: c.circumference.ln(),
        core_holonomy: c.core_holonomy,
        base_core: c.base_core().unwrap_or(PlanarVector::ZERO),
        area_fraction: c.area_fraction,
    }
}

/// Signed angle from the line of `a` to the line of `b`, both base vectors.
fn line_offset(s: &TranslationSurface, a: PlanarVector, b: PlanarVector) -> f64 {
    let dot = s.physical(a).dot(s.physical(b));
    let cr = s.physical_cross(a, b);
    let (cr, dot) = if dot < 0.0 { (-cr, -dot) } else { (cr, dot) };
    cr.atan2(dot)
}

/// Grow the tree of nested angle intervals from `beta0` on the thick
/// surface `x`, breadth first.
pub fn grow_tree(x: &TranslationSurface, beta0: &Cylinder, opts: GrowOptions, k: &ConstantsProfile) -> Result<CantorTree> {
    let thick = k.thickness();
    if !is_thick(x, &thick)?.0 {
        return Err(Error::RootNotThick);
    }
    let beta0 = beta0.in_frame(x);
    let root_iv = angle_interval_for(beta0.circumference, beta0.core_holonomy.line_angle(), k.big_c)?;
    let mut nodes = vec![CantorNode {
        id: 0,
        parent_id: None,
        depth: 0,
        cylinder: summary(&beta0),
        interval: root_iv,
        offset: 0.0,
        t_index: None,
        s_t: None,
        s_t_base: None,
        checks: None,
        children: Vec::new(),
        rejections: Vec::new(),
        nesting: None,
        leaf_reason: None,
        good_indices: 0,
    }];
    let mut work = vec![Work { cyl: beta0, seed: None }];
    let mut frontier = vec![0usize];
    for _ in 0..opts.depth {
        let mut next = Vec::new();
        for &id in &frontier {
            next.extend(expand(x, id, &mut nodes, &mut work, k, opts.branch_cap)?);
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    let mut tip = frontier.first().copied();
    for _ in 0..opts.branch_extension {
        let Some(id) = tip else { break };
        tip = expand(x, id, &mut nodes, &mut work, k, 1)?.first().copied();
    }
    Ok(CantorTree { nodes, root: 0, constants: *k, depth: opts.depth })
}

fn expand(
    x: &TranslationSurface,
    id: usize,
    nodes: &mut Vec<CantorNode>,
    work: &mut Vec<Work>,
    k: &ConstantsProfile,
    cap: usize,
) -> Result<Vec<usize>> {
    let thick = k.thickness();
    let parent = work[id].cyl.clone();
    let fam = match TwistFamily::new(x, &parent, k) {
        Ok(f) => f,
        Err(e) => {
            nodes[id].leaf_reason = Some(format!("no twist family: {e}"));
            return Ok(Vec::new());
        }
    };
    let fam = match &work[id].seed {
        Some(s) => fam.seeded_from(s),
        None => fam,
    };
    let good = match good_protochild_indices(&fam, &thick, &[]) {
        Ok(g) => g,
        Err(e @ (Error::FlipBudget | Error::PrecisionExhausted | Error::TraceMismatch(_) | Error::NonClosingFlow(_))) => {
            nodes[id].leaf_reason = Some(format!("twist scan failed: {e}"));
            return Ok(Vec::new());
        }
        Err(e) => return Err(e),
    };
    nodes[id].good_indices = good.indices.len();
    let picks = evenly_spaced(&good.indices, cap);
    let beta_len = parent.circumference;
    let area = parent.area;
    let d_base = fam.core_base();
    let piv = nodes[id].interval;

    struct Cand {
        t: f64,
        cyl: Cylinder,
        surf: TranslationSurface,
        s_t: PlanarVector,
        checks: ChildChecks,
        offset: f64,
    }
    let mut admitted: Vec<Cand> = Vec::new();
    let mut prev: Option<TranslationSurface> = None;
    for &t in &picks {
        let p = fam.surface_after(t, prev.as_ref());
        let child = select_child(&p, k);
        p.reduced()?;
        prev = Some(p.clone());
        let reject = |nodes: &mut Vec<CantorNode>, reason: String, len: Option<f64>| {
            nodes[id].rejections.push(Rejection { t, reason, child_length: len });
        };
        let child = match child {
            Ok(c) => c,
            Err(Error::NoChildFound) => {
                reject(nodes, "no child cylinder on the protochild".into(), None);
                continue;
            }
            Err(e) => return Err(e),
        };
        let cx = child.in_frame(x);
        let s_t = x.physical(fam.s_t_base(t));
        let st = s_t.norm();
        let sin_bs = (area / (beta_len * st)).min(1.0);
        let blen = cx.circumference;
        let lb = beta_len * beta_len.ln();
        let offset = line_offset(x, d_base, cx.base_core().expect("found by tracing"));
        let iv = match angle_interval_for(blen, piv.center + offset, k.big_c) {
            Ok(iv) => iv,
            Err(e) => {
                reject(nodes, format!("child interval: {e}"), Some(blen));
                continue;
            }
        };
        let slack = 1e-12;
        let checks = ChildChecks {
            twist_length: t * beta_len <= st * (1.0 + slack) && st <= (t + 1.0) * beta_len * (1.0 + slack),
            child_length: lb <= blen * (1.0 + slack) && blen <= k.big_m * lb * (1.0 + slack),
            area_sine: k.c / (beta_len * st) <= sin_bs * (1.0 + slack) && sin_bs <= (1.0 + slack) / (beta_len * st),
            nested: offset.abs() + iv.radius <= piv.radius,
            s_t_length: st,
            sin_beta_s_t: sin_bs,
        };
        if !checks.all() {
            let mut why = Vec::new();
            if !checks.twist_length {
                why.push("twist length");
            }
            if !checks.child_length {
                why.push("child length");
            }
            if !checks.area_sine {
                why.push("area sine bound");
            }
            if !checks.nested {
                why.push("not nested in parent interval");
            }
            reject(nodes, format!("failed: {}", why.join(", ")), Some(blen));
            continue;
        }
        // separation from siblings already admitted
        let required = piv.rho * piv.radius;
        let clash = admitted.iter().find(|a| {
            let ang = line_offset(x, a.cyl.base_core().unwrap(), cx.base_core().unwrap()).abs();
            let ra = 1.0 / (a.cyl.circumference.powi(2) * a.cyl.circumference.ln());
            !(ang - ra - iv.radius >= required)
        });
        if let Some(a) = clash {
            reject(nodes, format!("too close to sibling from t = {}", a.t), Some(blen));
            continue;
        }
        admitted.push(Cand { t, cyl: cx, surf: p, s_t, checks, offset });
    }
    admitted.sort_by(|a, b| a.offset.total_cmp(&b.offset));
    let rel: Vec<RelativeInterval> = admitted
        .iter()
        .map(|a| RelativeInterval { offset: a.offset, radius: 1.0 / (a.cyl.circumference.powi(2) * a.cyl.circumference.ln()) })
        .collect();
    let report = check_relative(piv.radius, piv.rho, &rel, |i, j| {
        line_offset(x, admitted[i].cyl.base_core().unwrap(), admitted[j].cyl.base_core().unwrap())
    });
    nodes[id].nesting = Some(report);
    if admitted.is_empty() {
        nodes[id].leaf_reason = Some(if good.indices.is_empty() {
            "no good twist indices".into()
        } else {
            "no admissible child".into()
        });
    }
    let mut ids = Vec::new();
    for a in admitted {
        let cid = nodes.len();
        let iv = angle_interval_for(a.cyl.circumference, wrap_pi(piv.center + a.offset), k.big_c)?;
        nodes.push(CantorNode {
            id: cid,
            parent_id: Some(id),
            depth: nodes[id].depth + 1,
            cylinder: summary(&a.cyl),
            interval: iv,
            offset: a.offset,
            t_index: Some(a.t),
            s_t: Some(a.s_t),
            s_t_base: Some(fam.s_t_base(a.t)),
            checks: Some(a.checks),
            children: Vec::new(),
            rejections: Vec::new(),
            nesting: None,
            leaf_reason: None,
            good_indices: 0,
        });
        nodes[id].children.push(cid);
        work.push(Work { cyl: a.cyl, seed: Some(a.surf) });
        ids.push(cid);
    }
    Ok(ids)
}

fn wrap_pi(a: f64) -> f64 {
    a.rem_euclid(PI)
}

//! Cylinders: detection from boundary chains, thickness, cross curves and
//! child selection.

use crate::error::{Error, Result};
use crate::surface::arith::Arith;
use crate::surface::enumerate::{enumerate_saddle_connections, SaddleConnection};
use crate::surface::trace::{retrace, trace_ray};
use crate::surface::triangulation::{Corner, Triangulation};
use crate::surface::TranslationSurface;
use crate::vector::{line_separation, PlanarVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashSet};
use std::f64::consts::PI;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThicknessProfile {
    pub delta: f64,
    pub c: f64,
}

impl ThicknessProfile {
    pub fn new(delta: f64, c: f64) -> Result<Self> {
        if !(delta > 0.0) || !(c > 0.0 && c < 1.0) {
            return Err(Error::InvalidConstants(format!("need delta > 0 and 0 < c < 1, got delta={delta}, c={c}")));
        }
        Ok(ThicknessProfile { delta, c })
    }
}

/// Constants driving child selection and the tree.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsProfile {
    pub c: f64,
    pub delta: f64,
    pub theta0: f64,
    pub theta1: f64,
    #[serde(rename = "L")]
    pub big_l: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub m: u32,
    #[serde(rename = "C")]
    pub big_c: f64,
    pub nu: f64,
}

impl ConstantsProfile {
    /// Derive `M`, `C` and `nu` from the free constants.
    pub fn practical(c: f64, delta: f64, theta0: f64, theta1: f64, big_l: f64, m: u32, genus: usize) -> Self {
        let big_m = 2f64.powi(m as i32 + 2) * big_l / delta;
        ConstantsProfile {
            c,
            delta,
            theta0,
            theta1,
            big_l,
            big_m,
            m,
            big_c: big_l * c / (16.0 * big_m),
            nu: nu_for(delta, c, genus),
        }
    }

    /// The constants used for the bundled genus-two runs.
    pub fn default_h2() -> Self {
        ConstantsProfile::practical(0.2, 0.05, 0.02, 1.51, 6.0, 2, 2)
    }

    pub fn thickness(&self) -> ThicknessProfile {
        ThicknessProfile { delta: self.delta, c: self.c }
    }

    /// Check ranges and the identities tying `M`, `C` and `nu` to the rest.
    pub fn validate(&self, genus: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConstants(msg));
        let finite = [self.c, self.delta, self.theta0, self.theta1, self.big_l, self.big_m, self.big_c, self.nu];
        if finite.iter().any(|v| !v.is_finite()) {
            return bad("non-finite constant".into());
        }
        if !(self.c > 0.0 && self.c < 1.0) {
            return bad(format!("c = {} must lie in (0, 1)", self.c));
        }
        if !(self.delta > 0.0) || !(self.big_l > 0.0) {
            return bad("delta and L must be positive".into());
        }
        if !(self.theta0 > 0.0) || !(self.theta1 > 0.0 && self.theta1 < PI / 2.0) {
            return bad("need theta0 > 0 and 0 < theta1 < pi/2".into());
        }
        if self.m < 1 {
            return bad("m must be at least 1".into());
        }
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300);
        let m_expect = 2f64.powi(self.m as i32 + 2) * self.big_l / self.delta;
        if !close(self.big_m, m_expect) {
            return bad(format!("M = {} but 2^(m+2) L / delta = {m_expect}", self.big_m));
        }
        let c_expect = self.big_l * self.c / (16.0 * self.big_m);
        if !close(self.big_c, c_expect) {
            return bad(format!("C = {} but L c / (16 M) = {c_expect}", self.big_c));
        }
        let nu_expect = nu_for(self.delta, self.c, genus);
        if !(genus <= 1 && self.nu == 0.0) && !close(self.nu, nu_expect) {
            return bad(format!("nu = {} but delta 192 sqrt2 (g - 1) / c = {nu_expect}", self.nu));
        }
        Ok(())
    }
}

pub fn nu_for(delta: f64, c: f64, genus: usize) -> f64 {
    let k = 192.0 * 2f64.sqrt();
    delta * (k * genus as f64 - k) / c
}

#[derive(Clone, Debug)]
pub(crate) struct Junction {
    /// Developed position of the bottom vertex, origin at the first one.
    pub pos: PlanarVector,
    /// Corners swept clockwise on the cylinder side.
    pub sweep: Vec<Corner>,
}

/// Base-chart description of a cylinder, independent of the frame.
#[derive(Clone, Debug)]
pub(crate) struct CylinderGeometry {
    pub core: PlanarVector,
    pub junctions: Vec<Junction>,
    /// Developed positions and vertex classes of top boundary vertices.
    pub top: Vec<(PlanarVector, usize)>,
    /// `core x (top - bottom)` in base units.
    pub h_cross: f64,
    pub tri: Arc<Triangulation>,
    pub arith: Arith,
}

/// Position of a crossing segment: from bottom junction `junction` to top
/// vertex `top` shifted by `k` core vectors, oriented upward or downward.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossIndex {
    pub junction: usize,
    pub top: usize,
    pub k: i64,
    pub upward: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Cylinder {
    pub core_holonomy: PlanarVector,
    pub circumference: f64,
    pub height: f64,
    pub area: f64,
    pub area_fraction: f64,
    /// The bottom boundary chain, in order.
    pub boundary_connections: Vec<SaddleConnection>,
    pub cross_curve: Option<SaddleConnection>,
    /// Number of saddle connections on the top boundary.
    pub top_multiplicity: usize,
    #[serde(skip)]
    pub(crate) geom: Option<Arc<CylinderGeometry>>,
}

impl Cylinder {
    /// Core holonomy in the base chart.
    pub fn base_core(&self) -> Option<PlanarVector> {
        self.geom.as_ref().map(|g| g.core)
    }

    pub fn angle_to_horizontal(&self) -> f64 {
        self.core_holonomy.angle_to_horizontal()
    }

    /// Re-measure on a surface sharing the base presentation.
    pub fn in_frame(&self, s: &TranslationSurface) -> Cylinder {
        let Some(g) = &self.geom else { return self.clone() };
        let mut c = self.clone();
        c.core_holonomy = s.physical(g.core);
        c.circumference = c.core_holonomy.norm();
        c.area = s.frame().det() * g.h_cross;
        c.height = c.area / c.circumference;
        c.boundary_connections = self.boundary_connections.iter().map(|b| b.in_frame(s)).collect();
        c.cross_curve = self.cross_curve.as_ref().map(|x| x.in_frame(s));
        c
    }

    /// Whether the cylinder has its base description attached.
    pub fn has_geometry(&self) -> bool {
        self.geom.is_some()
    }

    pub(crate) fn geometry(&self) -> Option<&Arc<CylinderGeometry>> {
        self.geom.as_ref()
    }
}

fn key_of(c: &SaddleConnection) -> (Corner, i64, i64) {
    (c.start_corner, c.base.x.to_bits() as i64, c.base.y.to_bits() as i64)
}

/// The cylinder lying to the left of `sigma` along its bottom boundary, when
/// its circumference is at most `bound`.
pub fn cylinder_left_of(s: &TranslationSurface, sigma: &SaddleConnection, bound: f64) -> Result<Option<Cylinder>> {
    let tri = match sigma.triangulation() {
        Some(t) => t.clone(),
        None => s.reduced()?,
    };
    let arith = s.arith();
    let frame = s.frame();
    let tol = s.tolerances();
    let bound_eff = bound * (1.0 + tol.length_rel) + 1e-300;
    let dir = sigma.base;
    let g0 = sigma.start_corner;
    let mut germ = g0;
    let mut z = PlanarVector::ZERO;
    let mut chain: Vec<SaddleConnection> = Vec::new();
    let mut visited: Vec<(u32, PlanarVector)> = Vec::new();
    let mut sweeps: Vec<(PlanarVector, Vec<Corner>)> = Vec::new();
    let cap = 3 * tri.tris.len() + 1;
    loop {
        let used = s.physical(z).norm();
        let Some(hit) = trace_ray(&tri, arith, frame, germ, dir, bound_eff - used, tol.trace_budget)? else {
            return Ok(None);
        };
        let start_vertex = tri.vertex_of(germ);
        let h = s.physical(hit.holonomy);
        chain.push(SaddleConnection {
            holonomy: h,
            base: hit.holonomy,
            start_singularity: start_vertex,
            end_singularity: tri.vertex_of(hit.end_corner),
            start_corner: germ,
            end_corner: hit.end_corner,
            presentation: tri.id,
            tri: Some(tri.clone()),
        });
        visited.extend(hit.visited.iter().map(|&(t, off)| (t, off + z)));
        z = z + hit.holonomy;
        if s.physical(z).norm() > bound_eff {
            return Ok(None);
        }
        let next = tri
            .rotate_cw_half_turn(arith, hit.end_corner, dir)
            .ok_or_else(|| Error::TraceMismatch("no outgoing germ at junction".into()))?;
        let sweep = tri
            .left_sweep(arith, hit.end_corner, dir, next)
            .ok_or_else(|| Error::TraceMismatch("junction sweep did not close".into()))?;
        for &c in &sweep {
            visited.push((c.t, z - tri.corner_point(c)));
        }
        sweeps.push((z, sweep));
        if next == g0 {
            break;
        }
        if chain.len() > cap {
            return Err(Error::NonClosingFlow(cap));
        }
        germ = next;
    }
    let core = z;

    // lowest vertex strictly above the bottom in the strip
    let mut best: Option<PlanarVector> = None;
    let mut top: Vec<(PlanarVector, usize)> = Vec::new();
    for &(t, off) in &visited {
        let tr = tri.tri(t);
        for m in 0..3 {
            let p = off + tr.p(m);
            if !arith.cross_sign(core, p).is_gt() {
                continue;
            }
            let ord = match best {
                None => Ordering::Less,
                Some(b) => arith.cross_sign(core, p - b),
            };
            match ord {
                Ordering::Less => {
                    best = Some(p);
                    top.clear();
                    top.push((p, tr.v[m] as usize));
                }
                Ordering::Equal => {
                    if !top.iter().any(|&(q, _)| arith_same_mod(arith, q, p, core)) {
                        top.push((p, tr.v[m] as usize));
                    }
                }
                Ordering::Greater => {}
            }
        }
    }
    let Some(b) = best else {
        return Err(Error::TraceMismatch("cylinder strip has no top vertex".into()));
    };
    let h_cross = arith.cross(core, b);
    // reduce top positions into one period, ordered along the core
    let cc = arith.dot(core, core);
    let mut top_red: Vec<(PlanarVector, usize)> = top
        .iter()
        .map(|&(p, v)| {
            let k = (arith.dot(core, p) / cc).floor();
            (p - core.scale(k), v)
        })
        .collect();
    top_red.sort_by(|a, b| arith.dot(core, a.0).total_cmp(&arith.dot(core, b.0)));
    top_red.dedup_by(|a, b| arith.same_point(a.0, b.0));

    let n = sweeps.len();
    let junctions: Vec<Junction> = (0..n)
        .map(|i| {
            // sweep i sits at the end of segment i; junction 0 is the start
            let (pos, sweep) = if i == 0 {
                (PlanarVector::ZERO, sweeps[n - 1].1.clone())
            } else {
                (sweeps[i - 1].0, sweeps[i - 1].1.clone())
            };
            Junction { pos, sweep }
        })
        .collect();
    let det = frame.det();
    let hol = s.physical(core);
    let circumference = hol.norm();
    let area = det * h_cross;
    let geom = CylinderGeometry { core, junctions, top: top_red.clone(), h_cross, tri, arith };
    Ok(Some(Cylinder {
        core_holonomy: hol,
        circumference,
        height: area / circumference,
        area,
        area_fraction: h_cross / s.base_area(),
        boundary_connections: chain,
        cross_curve: None,
        top_multiplicity: top_red.len(),
        geom: Some(Arc::new(geom)),
    }))
}

fn arith_same_mod(arith: Arith, a: PlanarVector, b: PlanarVector, core: PlanarVector) -> bool {
    // a - b is a multiple of core (they are on the same line already)
    let d = a - b;
    arith.cross_sign(core, d).is_eq() && {
        let cc = arith.dot(core, core);
        let k = (arith.dot(core, d) / cc).round();
        arith.same_point(d, core.scale(k))
    }
}

fn sort_cylinders(v: &mut [Cylinder]) {
    v.sort_by(|a, b| {
        a.circumference
            .total_cmp(&b.circumference)
            .then(a.core_holonomy.arg().total_cmp(&b.core_holonomy.arg()))
            .then(a.height.total_cmp(&b.height))
    });
}

/// Detect all cylinders bounded by the given parallel connections.
fn cylinders_of_group(s: &TranslationSurface, group: &[SaddleConnection], bound: f64) -> Result<Vec<Cylinder>> {
    let mut used: HashSet<(Corner, i64, i64)> = HashSet::new();
    let mut out = Vec::new();
    for sc in group {
        if used.contains(&key_of(sc)) {
            continue;
        }
        if let Some(cyl) = cylinder_left_of(s, sc, bound)? {
            for b in &cyl.boundary_connections {
                used.insert(key_of(b));
            }
            out.push(cyl);
        }
    }
    Ok(out)
}

/// Maximal cylinders parallel to `dir` with circumference at most `bound`.
pub fn cylinders_in_direction(s: &TranslationSurface, dir: PlanarVector, bound: f64) -> Result<Vec<Cylinder>> {
    if dir.norm() == 0.0 || !dir.is_finite() {
        return Err(Error::InvalidSpec("direction must be a nonzero vector".into()));
    }
    let conns = enumerate_saddle_connections(s, bound)?;
    let tol = s.tolerances().geometric;
    let group: Vec<SaddleConnection> = conns
        .into_iter()
        .filter(|c| c.holonomy.cross(dir).abs() <= tol * c.holonomy.norm() * dir.norm())
        .collect();
    let mut v = cylinders_of_group(s, &group, bound)?;
    sort_cylinders(&mut v);
    Ok(v)
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// Partition connections into parallel classes, in a deterministic order.
fn group_by_direction(s: &TranslationSurface, conns: Vec<SaddleConnection>) -> Vec<Vec<SaddleConnection>> {
    if s.arith().is_exact() {
        let mut map: BTreeMap<(i64, i64), Vec<SaddleConnection>> = BTreeMap::new();
        for c in conns {
            let (x, y) = (c.base.x as i64, c.base.y as i64);
            let g = gcd(x, y).max(1);
            map.entry((x / g, y / g)).or_default().push(c);
        }
        let mut groups: Vec<Vec<SaddleConnection>> = map.into_values().collect();
        groups.sort_by(|a, b| a[0].holonomy.arg().total_cmp(&b[0].holonomy.arg()));
        groups
    } else {
        let arith = s.arith();
        let mut conns = conns;
        conns.sort_by(|a, b| a.holonomy.arg().total_cmp(&b.holonomy.arg()));
        let mut groups: Vec<Vec<SaddleConnection>> = Vec::new();
        for c in conns {
            let fits = groups.last().is_some_and(|g| {
                let h = g[0].base;
                arith.cross_sign(h, c.base).is_eq() && arith.dot(h, c.base) > 0.0
            });
            if fits {
                groups.last_mut().unwrap().push(c);
            } else {
                groups.push(vec![c]);
            }
        }
        for g in groups.iter_mut() {
            crate::surface::enumerate::sort_connections(g);
        }
        groups
    }
}

/// Whether the line through `arg` meets the closed angle interval `[lo, hi]`.
pub fn angle_in_sector(arg: f64, lo: f64, hi: f64) -> bool {
    let width = hi - lo;
    if width >= 2.0 * PI {
        return true;
    }
    let tau = 2.0 * PI;
    [arg, arg + PI].iter().any(|&a| (a - lo).rem_euclid(tau) <= width + 1e-12)
}

/// Every cylinder with circumference at most `bound`, area fraction at
/// least `area_min` and core line meeting `sector`.
pub fn cylinders_up_to(s: &TranslationSurface, bound: f64, area_min: f64, sector: (f64, f64)) -> Result<Vec<Cylinder>> {
    if area_min > 1.0 + 1e-12 {
        return Ok(Vec::new());
    }
    let conns = enumerate_saddle_connections(s, bound)?;
    let groups: Vec<Vec<SaddleConnection>> = group_by_direction(s, conns)
        .into_iter()
        .filter(|g| angle_in_sector(g[0].holonomy.arg(), sector.0, sector.1))
        .collect();
    let found: Vec<Result<Vec<Cylinder>>> = groups.par_iter().map(|g| cylinders_of_group(s, g, bound)).collect();
    let mut out = Vec::new();
    for f in found {
        out.extend(f?.into_iter().filter(|c| c.area_fraction >= area_min * (1.0 - 1e-12)));
    }
    sort_cylinders(&mut out);
    Ok(out)
}

pub const FULL_CIRCLE: (f64, f64) = (-PI, PI);

/// `(true, None)` when no cylinder has circumference at most delta and area
/// fraction at least c; otherwise the shortest such cylinder as witness.
pub fn is_thick(s: &TranslationSurface, p: &ThicknessProfile) -> Result<(bool, Option<Cylinder>)> {
    let v = cylinders_up_to(s, p.delta, p.c, FULL_CIRCLE)?;
    match v.into_iter().next() {
        Some(w) => Ok((false, Some(w))),
        None => Ok((true, None)),
    }
}

fn length_then_arg(a: (f64, f64), b: (f64, f64)) -> Ordering {
    let tol = 1e-12 * a.0.max(b.0);
    if (a.0 - b.0).abs() > tol {
        a.0.total_cmp(&b.0)
    } else {
        a.1.total_cmp(&b.1)
    }
}

/// Shortest crossing segment with positive dot product against the core,
/// measured on `s`; ties go to the smaller argument in `[0, 2 pi)`.
pub fn select_cross_index(s: &TranslationSurface, beta: &Cylinder) -> Result<CrossIndex> {
    let g = beta
        .geometry()
        .ok_or_else(|| Error::NoCrossCurveWithinBound("cylinder has no base description".into()))?;
    let dp = s.physical(g.core);
    let dd = dp.norm_sq();
    let mut best: Option<((f64, f64), CrossIndex)> = None;
    for (i, jn) in g.junctions.iter().enumerate() {
        for (j, &(p, _)) in g.top.iter().enumerate() {
            let u0 = p - jn.pos;
            let up = s.physical(u0);
            let kstar = -up.dot(dp) / dd;
            let kf = kstar.floor() as i64;
            for k in (kf - 2)..=(kf + 3) {
                let v = u0 + g.core.scale(k as f64);
                let vp = s.physical(v);
                let dot = vp.dot(dp);
                if dot.abs() <= 1e-12 * vp.norm() * dp.norm() {
                    continue;
                }
                let (h, upward) = if dot > 0.0 {
                    (vp, true)
                } else if dot < 0.0 {
                    (-vp, false)
                } else {
                    continue;
                };
                let score = (h.norm(), h.arg_positive());
                let idx = CrossIndex { junction: i, top: j, k, upward };
                if best.as_ref().map_or(true, |(b, _)| length_then_arg(score, *b).is_lt()) {
                    best = Some((score, idx));
                }
            }
        }
    }
    best.map(|b| b.1)
        .ok_or_else(|| Error::NoCrossCurveWithinBound("no crossing segment".into()))
}

/// The crossing saddle connection at `idx`, with its core shift increased by
/// `twist` (so its holonomy moves by `twist` core vectors in its own
/// orientation).
pub fn crossing_connection(s: &TranslationSurface, beta: &Cylinder, idx: CrossIndex, twist: i64) -> Result<SaddleConnection> {
    let g = beta
        .geometry()
        .ok_or_else(|| Error::NoCrossCurveWithinBound("cylinder has no base description".into()))?;
    let arith = g.arith;
    let k = if idx.upward { idx.k + twist } else { idx.k - twist };
    let jn = &g.junctions[idx.junction];
    let v = g.top[idx.top].0 - jn.pos + g.core.scale(k as f64);
    if !arith.cross_sign(g.core, v).is_gt() {
        return Err(Error::TraceMismatch("crossing segment does not point into the cylinder".into()));
    }
    let start = jn
        .sweep
        .iter()
        .copied()
        .find(|&c| {
            let (o, i) = g.tri.sector(c);
            arith.in_sector(o, i, v)
        })
        .ok_or_else(|| Error::TraceMismatch("no germ for crossing segment".into()))?;
    let hit = retrace(&g.tri, arith, s.frame(), start, v, s.tolerances().trace_budget)?;
    if !arith.same_point(hit.holonomy, v) {
        return Err(Error::TraceMismatch(format!("crossing segment {v:?} stopped at {:?}", hit.holonomy)));
    }
    let bottom_vertex = g.tri.vertex_of(start);
    let top_vertex = g.tri.vertex_of(hit.end_corner);
    let sc = if idx.upward {
        SaddleConnection {
            holonomy: s.physical(v),
            base: v,
            start_singularity: bottom_vertex,
            end_singularity: top_vertex,
            start_corner: start,
            end_corner: hit.end_corner,
            presentation: g.tri.id,
            tri: Some(g.tri.clone()),
        }
    } else {
        let back = g
            .tri
            .locate(arith, hit.end_corner, -v)
            .ok_or_else(|| Error::TraceMismatch("no germ at top vertex".into()))?;
        SaddleConnection {
            holonomy: s.physical(-v),
            base: -v,
            start_singularity: top_vertex,
            end_singularity: bottom_vertex,
            start_corner: back,
            end_corner: start,
            presentation: g.tri.id,
            tri: Some(g.tri.clone()),
        }
    };
    Ok(sc)
}

/// Shortest acute crossing saddle connection of `beta`, measured on `s`.
pub fn select_cross_curve(s: &TranslationSurface, beta: &Cylinder) -> Result<SaddleConnection> {
    let idx = select_cross_index(s, beta)?;
    crossing_connection(s, beta, idx, 0)
}

/// Child cylinder on a protochild surface: the shortest cylinder of length
/// at most `L` and area at least `c`, at angle at least `theta1` from the
/// horizontal, separated by `theta0` from every strictly shorter one.
pub fn select_child(s: &TranslationSurface, k: &ConstantsProfile) -> Result<Cylinder> {
    let census = cylinders_up_to(s, k.big_l, k.c, FULL_CIRCLE)?;
    select_from_census(&census, k).cloned().ok_or(Error::NoChildFound)
}

/// Apply the selection rule to a census sorted by circumference.
pub fn select_from_census<'a>(census: &'a [Cylinder], k: &ConstantsProfile) -> Option<&'a Cylinder> {
    let mut order: Vec<&Cylinder> = census.iter().collect();
    order.sort_by(|a, b| {
        a.circumference
            .total_cmp(&b.circumference)
            .then(a.core_holonomy.line_angle().total_cmp(&b.core_holonomy.line_angle()))
    });
    order.iter().copied().find(|cand| {
        cand.angle_to_horizontal() >= k.theta1
            && census.iter().all(|o| {
                let shorter = o.circumference < cand.circumference * (1.0 - 1e-12);
                !shorter || line_separation(o.core_holonomy, cand.core_holonomy) >= k.theta0
            })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_surface, SurfaceSpec};
    use crate::vector::Mat2;

    fn torus() -> TranslationSurface {
        build_surface(&SurfaceSpec {
            label: String::new(),
            polygons: vec![vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]],
            gluings: vec![[[0, 0], [0, 2]], [[0, 1], [0, 3]]],
            marked: vec![[0, 0]],
        })
        .unwrap()
    }

    #[test]
    fn torus_horizontal() {
        let v = cylinders_in_direction(&torus(), PlanarVector::new(1.0, 0.0), 1.5).unwrap();
        assert_eq!(v.len(), 1);
        let c = &v[0];
        assert!((c.circumference - 1.0).abs() < 1e-12);
        assert!((c.height - 1.0).abs() < 1e-12);
        assert!((c.area_fraction - 1.0).abs() < 1e-12);
    }

    #[test]
    fn torus_diagonal() {
        let v = cylinders_in_direction(&torus(), PlanarVector::new(1.0, 1.0), 1.5).unwrap();
        assert_eq!(v.len(), 1);
        assert!((v[0].circumference - 2f64.sqrt()).abs() < 1e-12);
        assert!((v[0].height - 1.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cross_curves() {
        let s = torus();
        let h = &cylinders_in_direction(&s, PlanarVector::new(1.0, 0.0), 1.5).unwrap()[0];
        let x = select_cross_curve(&s, h).unwrap();
        assert!((x.holonomy - PlanarVector::new(1.0, 1.0)).norm() < 1e-12, "{:?}", x.holonomy);
        let v = &cylinders_in_direction(&s, PlanarVector::new(0.0, 1.0), 1.5).unwrap()[0];
        let x = select_cross_curve(&s, v).unwrap();
        assert!((x.holonomy - PlanarVector::new(1.0, 1.0)).norm() < 1e-12, "{:?}", x.holonomy);
        let r = s.apply_gl2(&Mat2::geodesic(2f64.ln())).unwrap();
        let h = &cylinders_in_direction(&r, PlanarVector::new(1.0, 0.0), 2.5).unwrap()[0];
        let x = select_cross_curve(&r, h).unwrap();
        assert!((x.holonomy - PlanarVector::new(2.0, 0.5)).norm() < 1e-12, "{:?}", x.holonomy);
    }

    #[test]
    fn sector_wraps() {
        assert!(angle_in_sector(3.0, -PI / 2.0, PI / 2.0)); // line through 3.0 also points at 3.0 - pi
        assert!(!angle_in_sector(1.0, -0.1, 0.1));
        assert!(angle_in_sector(0.05, -0.1, 0.1));
    }
}

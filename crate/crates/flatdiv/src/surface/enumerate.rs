//! Saddle connections by unfolding wedges from every corner.

use super::arith::Arith;
use super::frame::Frame;
use super::trace::retrace;
use super::triangulation::{next, prev, Corner, Triangulation};
use super::TranslationSurface;
use crate::error::{Error, Result};
use crate::vector::PlanarVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Arc;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SaddleConnection {
    /// Physical holonomy, oriented canonically unless stated otherwise.
    pub holonomy: PlanarVector,
    /// Holonomy in the base chart.
    pub base: PlanarVector,
    pub start_singularity: usize,
    pub end_singularity: usize,
    /// Corner holding the outgoing germ; with `presentation` this is the
    /// seed from which the segment can be re-traced.
    pub start_corner: Corner,
    /// Corner whose closed sector holds the incoming germ.
    pub end_corner: Corner,
    pub presentation: u64,
    #[serde(skip)]
    pub(crate) tri: Option<Arc<Triangulation>>,
}

impl PartialEq for SaddleConnection {
    fn eq(&self, o: &Self) -> bool {
        self.holonomy == o.holonomy
            && self.base == o.base
            && self.start_corner == o.start_corner
            && self.presentation == o.presentation
    }
}

impl SaddleConnection {
    pub fn length(&self) -> f64 {
        self.holonomy.norm()
    }

    /// The same segment with its holonomy re-measured on `s`, which must
    /// share the base presentation of the surface it was found on.
    pub fn in_frame(&self, s: &TranslationSurface) -> SaddleConnection {
        let mut c = self.clone();
        c.holonomy = s.physical(self.base);
        c
    }

    /// Re-trace the segment from its seed; returns the base holonomy found.
    pub fn retrace(&self, s: &TranslationSurface) -> Result<PlanarVector> {
        let tri = match &self.tri {
            Some(t) => t.clone(),
            None => {
                let r = s.reduced()?;
                if r.id != self.presentation {
                    return Err(Error::TraceMismatch("presentation no longer available".into()));
                }
                r
            }
        };
        let hit = retrace(&tri, s.arith(), s.frame(), self.start_corner, self.base, s.tolerances().trace_budget)?;
        Ok(hit.holonomy)
    }

    pub(crate) fn triangulation(&self) -> Option<&Arc<Triangulation>> {
        self.tri.as_ref()
    }
}

struct Ctx<'a> {
    tri: &'a Triangulation,
    arith: Arith,
    frame: &'a Frame,
    bound: f64,
    steps: &'a AtomicUsize,
    max_steps: usize,
}

fn segment_distance(ctx: &Ctx, p: PlanarVector, q: PlanarVector) -> f64 {
    let a = ctx.frame.apply(ctx.arith, p);
    let b = ctx.frame.apply(ctx.arith, q);
    let d = b - a;
    let len2 = d.norm_sq();
    if len2 == 0.0 {
        return a.norm();
    }
    let s = (-a.dot(d) / len2).clamp(0.0, 1.0);
    (a + d.scale(s)).norm()
}

/// Connections leaving `corner` strictly inside its sector.
fn from_corner(ctx: &Ctx, corner: Corner, out: &mut Vec<SaddleConnection>, tri_arc: &Arc<Triangulation>) -> Result<()> {
    let tri = ctx.tri;
    let arith = ctx.arith;
    let t0 = corner.t;
    let k0 = corner.k as usize;
    let tr0 = tri.tri(t0);
    let apex0 = tr0.p(k0);
    let lo0 = tr0.e[k0];
    let hi0 = -tr0.e[prev(k0)];
    let start_vertex = tr0.v[k0] as usize;
    // (triangle, entry edge, apex in local coordinates, lo, hi)
    let mut stack: Vec<(u32, usize, PlanarVector, PlanarVector, PlanarVector)> = Vec::new();
    let push_cross = |stack: &mut Vec<_>, t: u32, k: usize, apex: PlanarVector, lo, hi| {
        let tr = tri.tri(t);
        if segment_distance(ctx, tr.p(k) - apex, tr.p(next(k)) - apex) > ctx.bound {
            return;
        }
        let (t2, j) = tr.nbr[k];
        stack.push((t2, j as usize, apex + tri.translation(t, k), lo, hi));
    };
    push_cross(&mut stack, t0, next(k0), apex0, lo0, hi0);
    let mut local_steps = 0usize;
    while let Some((t, j, apex, lo, hi)) = stack.pop() {
        local_steps += 1;
        if local_steps % 4096 == 0 {
            let total = ctx.steps.fetch_add(4096, AtomicOrdering::Relaxed) + 4096;
            if total > ctx.max_steps {
                return Err(Error::BoundTooLargeForBudget { bound: ctx.bound, what: "unfolding steps".into() });
            }
        }
        let tr = tri.tri(t);
        let c = tr.p(prev(j));
        let w = c - apex;
        let inside_lo = arith.cross_sign(lo, w).is_gt();
        let inside_hi = arith.cross_sign(w, hi).is_gt();
        if inside_lo && inside_hi {
            let h = ctx.frame.apply(arith, w);
            if h.is_canonical() && h.norm() <= ctx.bound {
                out.push(SaddleConnection {
                    holonomy: h,
                    base: w,
                    start_singularity: start_vertex,
                    end_singularity: tr.v[prev(j)] as usize,
                    start_corner: corner,
                    end_corner: Corner::new(t as usize, prev(j)),
                    presentation: tri.id,
                    tri: Some(tri_arc.clone()),
                });
            }
            push_cross(&mut stack, t, next(j), apex, lo, w);
            push_cross(&mut stack, t, prev(j), apex, w, hi);
        } else if !inside_lo {
            push_cross(&mut stack, t, prev(j), apex, lo, hi);
        } else {
            push_cross(&mut stack, t, next(j), apex, lo, hi);
        }
    }
    ctx.steps.fetch_add(local_steps % 4096, AtomicOrdering::Relaxed);
    Ok(())
}

/// Every saddle connection of physical length at most `bound`, one per
/// unoriented segment, sorted by length and then argument.
pub fn enumerate_saddle_connections(s: &TranslationSurface, bound: f64) -> Result<Vec<SaddleConnection>> {
    if !(bound > 0.0) {
        return Err(Error::InvalidSpec(format!("bound must be positive, got {bound}")));
    }
    let tri = s.reduced()?;
    let arith = s.arith();
    let frame = s.frame();
    let tol = s.tolerances();
    let bound_eff = bound * (1.0 + tol.length_rel);
    let steps = AtomicUsize::new(0);
    let ctx = Ctx { tri: &tri, arith, frame, bound: bound_eff, steps: &steps, max_steps: tol.max_unfold_steps };

    let mut all: Vec<SaddleConnection> = Vec::new();
    // triangle edges
    for (t, tr) in tri.tris.iter().enumerate() {
        for k in 0..3 {
            let h = frame.apply(arith, tr.e[k]);
            if h.is_canonical() && h.norm() <= bound_eff {
                all.push(SaddleConnection {
                    holonomy: h,
                    base: tr.e[k],
                    start_singularity: tr.v[k] as usize,
                    end_singularity: tr.v[next(k)] as usize,
                    start_corner: Corner::new(t, k),
                    end_corner: Corner::new(t, next(k)),
                    presentation: tri.id,
                    tri: Some(tri.clone()),
                });
            }
        }
    }
    let corners: Vec<Corner> = (0..tri.tris.len()).flat_map(|t| (0..3).map(move |k| Corner::new(t, k))).collect();
    let parts: Vec<Result<Vec<SaddleConnection>>> = corners
        .par_iter()
        .map(|&c| {
            let mut out = Vec::new();
            from_corner(&ctx, c, &mut out, &tri)?;
            Ok(out)
        })
        .collect();
    for p in parts {
        all.extend(p?);
        if all.len() > tol.max_connections {
            return Err(Error::BoundTooLargeForBudget { bound, what: "saddle connection count".into() });
        }
    }
    sort_connections(&mut all);
    Ok(all)
}

pub(crate) fn sort_connections(v: &mut [SaddleConnection]) {
    v.sort_by(|a, b| {
        a.length()
            .total_cmp(&b.length())
            .then(a.holonomy.arg().total_cmp(&b.holonomy.arg()))
            .then(a.start_corner.cmp(&b.start_corner))
    });
}

/// Length of the shortest saddle connection.
pub fn flat_systole(s: &TranslationSurface) -> Result<f64> {
    Ok(shortest_connection(s)?.length())
}

pub fn shortest_connection(s: &TranslationSurface) -> Result<SaddleConnection> {
    let tri = s.reduced()?;
    // some edge is a saddle connection, so its length bounds the systole
    let bound = tri
        .tris
        .iter()
        .flat_map(|t| t.e.iter())
        .map(|&e| s.physical(e).norm())
        .fold(f64::INFINITY, f64::min);
    let mut b = bound;
    loop {
        let v = enumerate_saddle_connections(s, b)?;
        if let Some(first) = v.into_iter().next() {
            return Ok(first);
        }
        b *= 2.0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{build_surface, SurfaceSpec};

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
    fn torus_short_list() {
        let v = enumerate_saddle_connections(&torus(), 1.5).unwrap();
        let mut h: Vec<(i64, i64)> = v.iter().map(|c| (c.holonomy.x.round() as i64, c.holonomy.y.round() as i64)).collect();
        h.sort();
        assert_eq!(h, vec![(0, 1), (1, -1), (1, 0), (1, 1)]);
    }

    #[test]
    fn torus_below_systole_is_empty() {
        assert!(enumerate_saddle_connections(&torus(), 0.5).unwrap().is_empty());
        assert!((flat_systole(&torus()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn retrace_reproduces_holonomy() {
        let s = torus();
        for c in enumerate_saddle_connections(&s, 6.0).unwrap() {
            assert_eq!(c.retrace(&s).unwrap(), c.base);
        }
    }
}

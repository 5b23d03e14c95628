//! Straight-line tracing through a triangulated presentation.

use super::arith::Arith;
use super::frame::Frame;
use super::triangulation::{next, prev, Corner, Triangulation};
use crate::error::{Error, Result};
use crate::vector::PlanarVector;

/// Result of following a ray from a vertex until it meets another vertex.
#[derive(Clone, Debug)]
pub struct RayHit {
    /// Base displacement from the start vertex to the vertex hit.
    pub holonomy: PlanarVector,
    /// Corner at the vertex hit whose closed sector contains the back
    /// direction.
    pub end_corner: Corner,
    /// Triangles crossed, with the developed position of each triangle's
    /// local origin relative to the start vertex.
    pub visited: Vec<(u32, PlanarVector)>,
}

/// Physical distance from the origin to the segment `[p, q]`.
fn segment_distance(frame: &Frame, arith: Arith, p: PlanarVector, q: PlanarVector) -> f64 {
    let a = frame.apply(arith, p);
    let b = frame.apply(arith, q);
    let d = b - a;
    let len2 = d.norm_sq();
    if len2 == 0.0 {
        return a.norm();
    }
    let s = (-a.dot(d) / len2).clamp(0.0, 1.0);
    (a + d.scale(s)).norm()
}

/// Follow the ray in base direction `d` from the vertex of `start`, where
/// `d` lies in the half-open sector of `start`. Returns `None` once the ray
/// has gone further than `max_len` (physical) without meeting a vertex.
pub fn trace_ray(
    tri: &Triangulation,
    arith: Arith,
    frame: &Frame,
    start: Corner,
    d: PlanarVector,
    max_len: f64,
    budget: usize,
) -> Result<Option<RayHit>> {
    let t0 = start.t;
    let k0 = start.k as usize;
    let tr = tri.tri(t0);
    let apex = tr.p(k0);
    let mut visited = vec![(t0, -apex)];
    if arith.cross_sign(tr.e[k0], d).is_eq() {
        let h = tr.e[k0];
        if frame.apply(arith, h).norm() > max_len {
            return Ok(None);
        }
        return Ok(Some(RayHit { holonomy: h, end_corner: Corner::new(t0 as usize, next(k0)), visited }));
    }
    // leave through the opposite edge
    let mut t = t0;
    let mut exit = next(k0);
    let mut a = apex;
    for _ in 0..budget {
        let tr = tri.tri(t);
        if segment_distance(frame, arith, tr.p(exit) - a, tr.p(next(exit)) - a) > max_len {
            return Ok(None);
        }
        let shift = tri.translation(t, exit);
        let (t2, j) = tr.nbr[exit];
        a = a + shift;
        t = t2;
        let j = j as usize;
        let tr = tri.tri(t);
        visited.push((t, -a));
        let c = tr.p(prev(j));
        let w = c - a;
        match arith.cross_sign(d, w) {
            std::cmp::Ordering::Equal => {
                if frame.apply(arith, w).norm() > max_len {
                    return Ok(None);
                }
                return Ok(Some(RayHit { holonomy: w, end_corner: Corner::new(t as usize, prev(j)), visited }));
            }
            std::cmp::Ordering::Greater => exit = next(j),
            std::cmp::Ordering::Less => exit = prev(j),
        }
    }
    Err(Error::NonClosingFlow(budget))
}

/// Re-trace a segment from its start germ and return its base holonomy.
pub fn retrace(
    tri: &Triangulation,
    arith: Arith,
    frame: &Frame,
    start: Corner,
    d: PlanarVector,
    budget: usize,
) -> Result<RayHit> {
    let len = frame.apply(arith, d).norm();
    trace_ray(tri, arith, frame, start, d, len * (1.0 + 1e-6) + 1e-12, budget)?
        .ok_or_else(|| Error::TraceMismatch(format!("no vertex within the length of {d:?}")))
}

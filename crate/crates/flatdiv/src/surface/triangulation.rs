//! Triangulated presentation of a translation surface in its base chart.
//!
//! Triangle `T` has local vertices `P0 = 0`, `P1 = e0`, `P2 = e0 + e1`,
//! counterclockwise. Edge `k` runs from `Pk` to `Pk+1`. Corner `(T, k)`
//! is the angular sector at `Pk` swept counterclockwise from `e_k` to
//! `-e_{k-1}`.

use super::arith::{exact_ok, Arith};
use super::frame::Frame;
use crate::error::{Error, Result};
use crate::vector::PlanarVector;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};

static NEXT_ID: AtomicU64 = AtomicU64::new(1);

fn fresh_id() -> u64 {
    NEXT_ID.fetch_add(1, AtomicOrdering::Relaxed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct Corner {
    pub t: u32,
    pub k: u8,
}

impl Corner {
    pub fn new(t: usize, k: usize) -> Self {
        Corner { t: t as u32, k: k as u8 }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Tri {
    pub e: [PlanarVector; 3],
    /// `nbr[k]` is the (triangle, edge) glued to edge `k`.
    pub nbr: [(u32, u8); 3],
    /// Vertex class of corner `k`.
    pub v: [u32; 3],
}

impl Tri {
    #[inline]
    pub fn p(&self, k: usize) -> PlanarVector {
        match k {
            0 => PlanarVector::ZERO,
            1 => self.e[0],
            _ => self.e[0] + self.e[1],
        }
    }
}

#[inline]
pub fn next(k: usize) -> usize {
    (k + 1) % 3
}

#[inline]
pub fn prev(k: usize) -> usize {
    (k + 2) % 3
}

#[derive(Clone, Debug)]
pub struct Triangulation {
    /// Identifies this presentation; saddle connection seeds refer to it.
    pub id: u64,
    pub tris: Vec<Tri>,
    pub vertex_count: usize,
}

impl Triangulation {
    pub fn new(tris: Vec<Tri>, vertex_count: usize) -> Self {
        Triangulation { id: fresh_id(), tris, vertex_count }
    }

    pub fn tri(&self, t: u32) -> &Tri {
        &self.tris[t as usize]
    }

    /// Base position of the corner's vertex in its triangle's local chart.
    pub fn corner_point(&self, c: Corner) -> PlanarVector {
        self.tri(c.t).p(c.k as usize)
    }

    pub fn vertex_of(&self, c: Corner) -> usize {
        self.tri(c.t).v[c.k as usize] as usize
    }

    /// Sector `(o, i)` of a corner: from `e_k` counterclockwise to `-e_{k-1}`.
    pub fn sector(&self, c: Corner) -> (PlanarVector, PlanarVector) {
        let tr = self.tri(c.t);
        let k = c.k as usize;
        (tr.e[k], -tr.e[prev(k)])
    }

    /// Translation taking local coordinates of `t` to those of the
    /// triangle glued along edge `k`.
    pub fn translation(&self, t: u32, k: usize) -> PlanarVector {
        let tr = self.tri(t);
        let (t2, j) = tr.nbr[k];
        let tr2 = self.tri(t2);
        tr2.p(next(j as usize)) - tr.p(k)
    }

    /// Next corner counterclockwise around the same vertex.
    pub fn ccw(&self, c: Corner) -> Corner {
        let (t2, j) = self.tri(c.t).nbr[prev(c.k as usize)];
        Corner { t: t2, k: j }
    }

    /// Next corner clockwise around the same vertex.
    pub fn cw(&self, c: Corner) -> Corner {
        let (t2, j) = self.tri(c.t).nbr[c.k as usize];
        Corner { t: t2, k: next(j as usize) as u8 }
    }

    /// Corners around each vertex, counterclockwise.
    pub fn vertex_corners(&self) -> Vec<Vec<Corner>> {
        let mut out = vec![Vec::new(); self.vertex_count];
        let mut seen = vec![[false; 3]; self.tris.len()];
        for t in 0..self.tris.len() {
            for k in 0..3 {
                if seen[t][k] {
                    continue;
                }
                let start = Corner::new(t, k);
                let mut c = start;
                let v = self.vertex_of(start);
                loop {
                    seen[c.t as usize][c.k as usize] = true;
                    out[v].push(c);
                    c = self.ccw(c);
                    if c == start {
                        break;
                    }
                }
            }
        }
        out
    }

    /// Corner at the vertex of `hint` whose half-open sector contains `d`.
    /// `hint` must be a corner at that vertex whose closed sector contains
    /// `d`, or any corner less than a full turn away.
    pub fn locate(&self, arith: Arith, hint: Corner, d: PlanarVector) -> Option<Corner> {
        let (o, i) = self.sector(hint);
        if arith.in_sector(o, i, d) {
            return Some(hint);
        }
        if arith.in_closed_sector(o, i, d) {
            return Some(self.ccw(hint));
        }
        // walk counterclockwise, bounded by the corners at the vertex
        let mut c = self.ccw(hint);
        for _ in 0..(3 * self.tris.len()) {
            let (o, i) = self.sector(c);
            if arith.in_sector(o, i, d) {
                return Some(c);
            }
            c = self.ccw(c);
            if c == hint {
                break;
            }
        }
        None
    }

    /// Starting from the germ pointing along `-d` (its corner given as a
    /// closed-sector hint), rotate clockwise by exactly pi and return the
    /// corner holding the germ along `d`.
    pub fn rotate_cw_half_turn(&self, arith: Arith, hint: Corner, d: PlanarVector) -> Option<Corner> {
        let back = -d;
        let mut c = hint;
        let (o, _) = self.sector(c);
        // normalise to the corner whose sector is (o, i] around `back`
        if arith.cross_sign(o, back) == std::cmp::Ordering::Equal && arith.dot_sign(o, back).is_gt() {
            c = self.cw(c);
        }
        for _ in 0..(3 * self.tris.len() + 1) {
            let (o, i) = self.sector(c);
            if arith.in_sector(o, i, d) {
                return Some(c);
            }
            c = self.cw(c);
        }
        None
    }

    /// Corners swept clockwise from the germ along `-d_in` to the germ
    /// along `d_out`, both ends included. Used to follow a leaf just to the
    /// left of a boundary chain around a singularity.
    pub fn left_sweep(&self, arith: Arith, back_hint: Corner, d: PlanarVector, out: Corner) -> Option<Vec<Corner>> {
        let back = -d;
        let mut c = back_hint;
        let (o, _) = self.sector(c);
        if arith.cross_sign(o, back) == std::cmp::Ordering::Equal && arith.dot_sign(o, back).is_gt() {
            c = self.cw(c);
        }
        let mut acc = Vec::new();
        for _ in 0..(3 * self.tris.len() + 1) {
            acc.push(c);
            if c == out {
                return Some(acc);
            }
            c = self.cw(c);
        }
        None
    }

    /// Largest absolute base coordinate appearing in local charts.
    pub fn max_coordinate(&self) -> f64 {
        self.tris
            .iter()
            .flat_map(|t| (0..3).map(move |k| t.p(k)))
            .map(|p| p.x.abs().max(p.y.abs()))
            .fold(0.0, f64::max)
    }

    fn outward_fix(&mut self, t: usize, k: usize, target: (u32, u8)) {
        let (t2, j) = target;
        self.tris[t2 as usize].nbr[j as usize] = (t as u32, k as u8);
    }

    /// Flip the edge `(t, a)`. Returns false when the quadrilateral is not
    /// strictly convex or the edge is glued to its own triangle.
    pub fn flip(&mut self, arith: Arith, t: usize, a: usize) -> bool {
        let tt = self.tris[t];
        let (t2u, bu) = tt.nbr[a];
        let t2 = t2u as usize;
        let b = bu as usize;
        if t2 == t {
            return false;
        }
        let tt2 = self.tris[t2];
        let pa = tt.p(a);
        let pa1 = tt.p(next(a));
        let pa2 = tt.p(prev(a));
        let q = pa + tt2.e[next(b)];
        // convexity: both new triangles positively oriented
        let d = pa2 - q;
        if arith.cross_sign(pa - q, d).is_ge() {
            // (Q, Pa2, Pa) must be ccw, i.e. (Pa - Q) x (Pa2 - Q) < 0 is required
            return false;
        }
        if arith.cross_sign(pa1 - q, d).is_le() {
            return false;
        }
        let va = tt.v[a];
        let va1 = tt.v[next(a)];
        let va2 = tt.v[prev(a)];
        let vq = tt2.v[prev(b)];
        // outer half-edges before the flip
        let out_a2 = tt.nbr[prev(a)]; // Pa2 -> Pa
        let out_a1 = tt.nbr[next(a)]; // Pa1 -> Pa2
        let out_b1 = tt2.nbr[next(b)]; // Pa -> Q
        let out_b2 = tt2.nbr[prev(b)]; // Q -> Pa1
        // new triangles: A = (Pa, Q, Pa2) in slot t, B = (Q, Pa1, Pa2) in slot t2
        let remap = |h: (u32, u8)| -> (u32, u8) {
            let (ht, hk) = (h.0 as usize, h.1 as usize);
            if ht == t && hk == prev(a) {
                (t as u32, 2)
            } else if ht == t && hk == next(a) {
                (t2 as u32, 1)
            } else if ht == t2 && hk == next(b) {
                (t as u32, 0)
            } else if ht == t2 && hk == prev(b) {
                (t2 as u32, 0)
            } else {
                h
            }
        };
        let na = Tri {
            e: [tt2.e[next(b)], d, tt.e[prev(a)]],
            nbr: [remap(out_b1), (t2 as u32, 2), remap(out_a2)],
            v: [va, vq, va2],
        };
        let nb = Tri {
            e: [tt2.e[prev(b)], tt.e[next(a)], -d],
            nbr: [remap(out_b2), remap(out_a1), (t as u32, 1)],
            v: [vq, va1, va2],
        };
        self.tris[t] = na;
        self.tris[t2] = nb;
        for (tk, kk) in [(t, 0usize), (t, 2), (t2, 0), (t2, 1)] {
            let target = self.tris[tk].nbr[kk];
            self.outward_fix(tk, kk, target);
        }
        true
    }

    /// Cotangent-sum test for edge `(t, a)` in the metric of `frame`.
    /// Negative means the edge is not locally Delaunay.
    fn delaunay_margin(&self, arith: Arith, frame: &Frame, t: usize, a: usize) -> f64 {
        let tt = &self.tris[t];
        let (t2, b) = tt.nbr[a];
        let tt2 = &self.tris[t2 as usize];
        let b = b as usize;
        let pa = tt.p(a);
        let pa1 = tt.p(next(a));
        let pa2 = tt.p(prev(a));
        let q = pa + tt2.e[next(b)];
        let det = frame.det();
        let cot = |u: PlanarVector, v: PlanarVector| -> f64 {
            let pu = frame.apply(arith, u);
            let pv = frame.apply(arith, v);
            pu.dot(pv) / (det * arith.cross(u, v))
        };
        cot(pa - pa2, pa1 - pa2) + cot(pa1 - q, pa - q)
    }

    /// Flip to the Delaunay triangulation of the metric given by `frame`.
    pub fn delaunay(&self, arith: Arith, frame: &Frame, max_flips: usize) -> Result<Triangulation> {
        let mut tr = Triangulation { id: fresh_id(), tris: self.tris.clone(), vertex_count: self.vertex_count };
        let mut stack: Vec<(usize, usize)> = Vec::new();
        for t in 0..tr.tris.len() {
            for k in 0..3 {
                stack.push((t, k));
            }
        }
        let mut flips = 0usize;
        while let Some((t, a)) = stack.pop() {
            if tr.tris[t].nbr[a].0 as usize == t {
                continue;
            }
            if tr.delaunay_margin(arith, frame, t, a) < -1e-9 {
                let t2 = tr.tris[t].nbr[a].0 as usize;
                if tr.flip(arith, t, a) {
                    flips += 1;
                    if flips > max_flips {
                        return Err(Error::FlipBudget);
                    }
                    for k in 0..3 {
                        stack.push((t, k));
                        stack.push((t2, k));
                    }
                }
            }
        }
        if arith.is_exact() && !tr.tris.iter().all(|x| x.e.iter().all(|e| exact_ok(e.scale(4.0)))) {
            return Err(Error::PrecisionExhausted);
        }
        Ok(tr)
    }
}

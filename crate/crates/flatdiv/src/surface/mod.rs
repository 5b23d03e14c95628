//! Translation surfaces presented by polygons glued along parallel edges.

pub mod arith;
pub mod enumerate;
pub mod frame;
pub mod trace;
pub mod triangulation;

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;
use crate::vector::{Mat2, PlanarVector};
use arith::Arith;
use frame::Frame;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::path::Path;
use std::sync::{Arc, OnceLock};
use triangulation::{Corner, Tri, Triangulation};

pub use enumerate::{enumerate_saddle_connections, flat_systole, SaddleConnection};

/// On-disk description of a surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSpec {
    #[serde(default)]
    pub label: String,
    /// Counterclockwise vertex loops. Edge `e` of a polygon runs from
    /// vertex `e` to vertex `e + 1`.
    pub polygons: Vec<Vec<[f64; 2]>>,
    /// Pairs of `[polygon, edge]` references glued by translation.
    pub gluings: Vec<[[usize; 2]; 2]>,
    /// Vertices, as `[polygon, vertex]`, whose classes are marked points.
    #[serde(default)]
    pub marked: Vec<[usize; 2]>,
}

impl SurfaceSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumSignature {
    pub genus: usize,
    /// Orders of the zeros, largest first.
    pub cone_orders: Vec<usize>,
    pub marked_count: usize,
}

impl StratumSignature {
    /// Stratum name such as `H(2)` or `H(1,1)`; `H(0)` for tori.
    pub fn stratum(&self) -> String {
        if self.cone_orders.is_empty() {
            return "H(0)".into();
        }
        let parts: Vec<String> = self.cone_orders.iter().map(|k| k.to_string()).collect();
        format!("H({})", parts.join(","))
    }

    /// Number of zeros, marked points excluded.
    pub fn zeros(&self) -> usize {
        self.cone_orders.len()
    }
}

#[derive(Debug)]
struct Base {
    label: String,
    /// Polygons in base coordinates.
    polygons: Vec<Vec<PlanarVector>>,
    gluings: Vec<[[usize; 2]; 2]>,
    arith: Arith,
    /// Area in base units.
    area: f64,
    /// Cone angle of each vertex class divided by 2 pi.
    cone_multiple: Vec<usize>,
    signature: StratumSignature,
    declared_marked: Vec<usize>,
    poly_class: Vec<Vec<usize>>,
}

/// A translation surface: a fixed base presentation together with a linear
/// frame mapping base coordinates to physical holonomy. The `GL(2,R)` action
/// only changes the frame.
#[derive(Clone, Debug)]
pub struct TranslationSurface {
    base: Arc<Base>,
    seed: Arc<Triangulation>,
    frame: Frame,
    reduced: OnceLock<Arc<Triangulation>>,
    tol: Tolerances,
}

/// Build and validate a surface, normalising it to area one.
pub fn build_surface(spec: &SurfaceSpec) -> Result<TranslationSurface> {
    build_surface_with(spec, Tolerances::default())
}

pub fn build_surface_with(spec: &SurfaceSpec, tol: Tolerances) -> Result<TranslationSurface> {
    if spec.polygons.is_empty() {
        return Err(Error::InvalidSpec("no polygons".into()));
    }
    for (p, poly) in spec.polygons.iter().enumerate() {
        if poly.len() < 3 {
            return Err(Error::InvalidSpec(format!("polygon {p} has fewer than 3 vertices")));
        }
        if poly.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSpec(format!("polygon {p} has non-finite coordinates")));
        }
    }
    let (scale, arith) = choose_arith(spec, tol.predicate);
    let polygons: Vec<Vec<PlanarVector>> = spec
        .polygons
        .iter()
        .map(|poly| {
            poly.iter()
                .map(|c| {
                    let v = PlanarVector::new(c[0] * scale, c[1] * scale);
                    if arith.is_exact() {
                        PlanarVector::new(v.x.round(), v.y.round())
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();

    for (p, poly) in polygons.iter().enumerate() {
        let a = signed_area(arith, poly);
        if a == 0.0 {
            return Err(Error::ZeroArea);
        }
        if a < 0.0 {
            return Err(Error::InvalidSpec(format!("polygon {p} is not counterclockwise")));
        }
        check_simple(arith, p, poly)?;
    }

    // gluings
    let edge_vec = |p: usize, e: usize| {
        let poly = &polygons[p];
        poly[(e + 1) % poly.len()] - poly[e]
    };
    let mut partner: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for g in &spec.gluings {
        let a = (g[0][0], g[0][1]);
        let b = (g[1][0], g[1][1]);
        for &(p, e) in &[a, b] {
            if p >= polygons.len() || e >= polygons[p].len() {
                return Err(Error::InvalidSpec(format!("edge reference [{p}, {e}] out of range")));
            }
        }
        if a == b {
            return Err(Error::InvalidSpec(format!("edge {a:?} glued to itself")));
        }
        for x in [a, b] {
            if partner.contains_key(&x) || (x == b && partner.contains_key(&a)) {
                return Err(Error::InvalidSpec(format!("edge {x:?} glued more than once")));
            }
        }
        let (u, v) = (edge_vec(a.0, a.1), edge_vec(b.0, b.1));
        if !arith.same_point(u, -v) {
            if arith.same_point(u, v) {
                return Err(Error::NonTrivialHolonomy(a, b));
            }
            return Err(Error::NonMatchingEdges(a, b));
        }
        partner.insert(a, b);
        partner.insert(b, a);
    }
    let edge_total: usize = polygons.iter().map(|p| p.len()).sum();
    if partner.len() != edge_total {
        for (p, poly) in polygons.iter().enumerate() {
            for e in 0..poly.len() {
                if !partner.contains_key(&(p, e)) {
                    return Err(Error::InvalidSpec(format!("edge [{p}, {e}] is not glued")));
                }
            }
        }
    }

    // triangulate
    let mut tris: Vec<Tri> = Vec::new();
    let mut edge_slot: HashMap<(usize, usize), (u32, u8)> = HashMap::new();
    let mut poly_corner: Vec<Vec<Option<Corner>>> = polygons.iter().map(|p| vec![None; p.len()]).collect();
    for (p, poly) in polygons.iter().enumerate() {
        let pieces = ear_clip(arith, poly)?;
        let mut diag: HashMap<usize, (u32, u8)> = HashMap::new();
        let first = tris.len();
        for (n, (vs, segs)) in pieces.iter().enumerate() {
            let t = (first + n) as u32;
            let pts = [poly[vs[0]], poly[vs[1]], poly[vs[2]]];
            tris.push(Tri {
                e: [pts[1] - pts[0], pts[2] - pts[1], pts[0] - pts[2]],
                nbr: [(u32::MAX, 0); 3],
                v: [u32::MAX; 3],
            });
            for k in 0..3 {
                poly_corner[p][vs[k]].get_or_insert(Corner { t, k: k as u8 });
                match segs[k] {
                    Seg::Orig(e) => {
                        edge_slot.insert((p, e), (t, k as u8));
                    }
                    Seg::Diag(d) => {
                        if let Some(&(t2, k2)) = diag.get(&d) {
                            tris[t as usize].nbr[k] = (t2, k2);
                            tris[t2 as usize].nbr[k2 as usize] = (t, k as u8);
                        } else {
                            diag.insert(d, (t, k as u8));
                        }
                    }
                }
            }
        }
    }
    for (a, b) in &partner {
        let (t, k) = edge_slot[a];
        tris[t as usize].nbr[k as usize] = edge_slot[b];
    }

    // vertex classes
    let mut tr = Triangulation::new(tris, 0);
    let mut count = 0u32;
    let mut angle_sum: Vec<f64> = Vec::new();
    for t in 0..tr.tris.len() {
        for k in 0..3 {
            if tr.tris[t].v[k] != u32::MAX {
                continue;
            }
            let start = Corner::new(t, k);
            let mut c = start;
            let mut sum = 0.0;
            for _ in 0..=3 * tr.tris.len() {
                tr.tris[c.t as usize].v[c.k as usize] = count;
                let (o, i) = tr.sector(c);
                sum += arith.cross(o, i).atan2(arith.dot(o, i));
                c = tr.ccw(c);
                if c == start {
                    break;
                }
            }
            if c != start {
                return Err(Error::InvalidSpec("vertex link does not close".into()));
            }
            angle_sum.push(sum);
            count += 1;
        }
    }
    tr.vertex_count = count as usize;
    let mut cone_multiple = Vec::with_capacity(angle_sum.len());
    for s in &angle_sum {
        let k = (s / (2.0 * PI)).round();
        if k < 1.0 || (s - 2.0 * PI * k).abs() > 1e-6 {
            return Err(Error::InvalidSpec(format!("cone angle {s} is not a multiple of 2 pi")));
        }
        cone_multiple.push(k as usize);
    }

    let area: f64 = tr.tris.iter().map(|t| 0.5 * arith.cross(t.e[0], t.e[1])).sum();
    if !(area > 0.0) {
        return Err(Error::ZeroArea);
    }

    let mut declared_marked = Vec::new();
    for m in &spec.marked {
        let (p, v) = (m[0], m[1]);
        let c = poly_corner
            .get(p)
            .and_then(|pc| pc.get(v))
            .copied()
            .flatten()
            .ok_or_else(|| Error::InvalidSpec(format!("marked vertex [{p}, {v}] out of range")))?;
        let cls = tr.vertex_of(c);
        if cone_multiple[cls] != 1 {
            return Err(Error::InvalidSpec(format!("marked vertex [{p}, {v}] is a cone point")));
        }
        if !declared_marked.contains(&cls) {
            declared_marked.push(cls);
        }
    }
    declared_marked.sort_unstable();

    let orders_sum: usize = cone_multiple.iter().map(|k| k - 1).sum();
    if orders_sum % 2 != 0 {
        return Err(Error::InvalidSpec("odd total cone order".into()));
    }
    let mut cone_orders: Vec<usize> = cone_multiple.iter().filter(|&&k| k > 1).map(|k| k - 1).collect();
    cone_orders.sort_unstable_by(|a, b| b.cmp(a));
    let signature = StratumSignature {
        genus: orders_sum / 2 + 1,
        cone_orders,
        marked_count: cone_multiple.iter().filter(|&&k| k == 1).count(),
    };

    let poly_class: Vec<Vec<usize>> = poly_corner
        .iter()
        .map(|pc| pc.iter().map(|c| tr.vertex_of(c.expect("every vertex is a corner"))).collect())
        .collect();
    let base = Base {
        label: spec.label.clone(),
        polygons,
        gluings: spec.gluings.clone(),
        arith,
        area,
        cone_multiple,
        signature,
        declared_marked,
        poly_class,
    };
    Ok(TranslationSurface {
        base: Arc::new(base),
        seed: Arc::new(tr),
        frame: Frame::Linear(Mat2::scalar(1.0 / area.sqrt())),
        reduced: OnceLock::new(),
        tol,
    })
}

/// Integral scaling of the input when one exists with a small denominator.
fn choose_arith(spec: &SurfaceSpec, rel: f64) -> (f64, Arith) {
    let coords: Vec<f64> = spec.polygons.iter().flatten().flatten().copied().collect();
    let limit = 2f64.powi(40);
    let unit = spec
        .polygons
        .iter()
        .map(|poly| {
            let n = poly.len();
            (0..n).map(|i| poly[i][0] * poly[(i + 1) % n][1] - poly[(i + 1) % n][0] * poly[i][1]).sum::<f64>() / 2.0
        })
        .sum::<f64>()
        .abs()
        .sqrt();
    'outer: for d in 1..=1000u32 {
        let d = d as f64;
        for &c in &coords {
            let x = c * d;
            if x.abs() > limit || (x - x.round()).abs() > 1e-9 * x.abs().max(1.0) {
                continue 'outer;
            }
        }
        return (d, Arith::Exact);
    }
    (1.0, Arith::Float { tol: rel, unit })
}

fn signed_area(arith: Arith, poly: &[PlanarVector]) -> f64 {
    let n = poly.len();
    let o = poly[0];
    (1..n - 1).map(|i| 0.5 * arith.cross(poly[i] - o, poly[i + 1] - o)).sum()
}

fn segments_touch(arith: Arith, a: PlanarVector, b: PlanarVector, c: PlanarVector, d: PlanarVector) -> bool {
    use std::cmp::Ordering::*;
    let o1 = arith.cross_sign(b - a, c - a);
    let o2 = arith.cross_sign(b - a, d - a);
    let o3 = arith.cross_sign(d - c, a - c);
    let o4 = arith.cross_sign(d - c, b - c);
    let on = |p: PlanarVector, q: PlanarVector, r: PlanarVector| {
        // r on segment pq, given collinear
        arith.dot_sign(r - p, r - q) != Greater
    };
    if o1 != o2 && o3 != o4 && o1 != Equal && o2 != Equal && o3 != Equal && o4 != Equal {
        return true;
    }
    (o1 == Equal && on(a, b, c))
        || (o2 == Equal && on(a, b, d))
        || (o3 == Equal && on(c, d, a))
        || (o4 == Equal && on(c, d, b))
}

fn check_simple(arith: Arith, p: usize, poly: &[PlanarVector]) -> Result<()> {
    let n = poly.len();
    for i in 0..n {
        if arith.same_point(poly[i], poly[(i + 1) % n]) {
            return Err(Error::InvalidSpec(format!("polygon {p} has a zero-length edge")));
        }
        for j in i + 1..n {
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                continue;
            }
            if segments_touch(arith, poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n]) {
                return Err(Error::InvalidSpec(format!("polygon {p} is not simple")));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug)]
enum Seg {
    Orig(usize),
    Diag(usize),
}

fn in_closed_triangle(arith: Arith, a: PlanarVector, b: PlanarVector, c: PlanarVector, p: PlanarVector) -> bool {
    arith.cross_sign(b - a, p - a).is_ge() && arith.cross_sign(c - b, p - b).is_ge() && arith.cross_sign(a - c, p - c).is_ge()
}

type Piece = ([usize; 3], [Seg; 3]);

/// Ear clipping. Each triangle lists polygon vertex indices and, per edge,
/// either the polygon edge it lies on or a shared diagonal id.
fn ear_clip(arith: Arith, poly: &[PlanarVector]) -> Result<Vec<Piece>> {
    let mut idx: Vec<usize> = (0..poly.len()).collect();
    let mut seg: Vec<Seg> = (0..poly.len()).map(Seg::Orig).collect();
    let mut out = Vec::new();
    let mut diag = 0;
    while idx.len() > 3 {
        let m = idx.len();
        let mut found = None;
        for j in 0..m {
            let jp = (j + m - 1) % m;
            let jn = (j + 1) % m;
            let (a, b, c) = (poly[idx[jp]], poly[idx[j]], poly[idx[jn]]);
            if !arith.cross_sign(b - a, c - b).is_gt() {
                continue;
            }
            let clear = (0..m)
                .filter(|&q| q != j && q != jp && q != jn)
                .all(|q| !in_closed_triangle(arith, a, b, c, poly[idx[q]]));
            if clear {
                found = Some(j);
                break;
            }
        }
        let j = found.ok_or_else(|| Error::InvalidSpec("polygon could not be triangulated".into()))?;
        let jp = (j + m - 1) % m;
        out.push(([idx[jp], idx[j], idx[(j + 1) % m]], [seg[jp], seg[j], Seg::Diag(diag)]));
        seg[jp] = Seg::Diag(diag);
        diag += 1;
        idx.remove(j);
        seg.remove(j);
    }
    let (a, b, c) = (poly[idx[0]], poly[idx[1]], poly[idx[2]]);
    if !arith.cross_sign(b - a, c - b).is_gt() {
        return Err(Error::InvalidSpec("polygon could not be triangulated".into()));
    }
    out.push(([idx[0], idx[1], idx[2]], [seg[0], seg[1], seg[2]]));
    Ok(out)
}

impl TranslationSurface {
    pub fn label(&self) -> &str {
        &self.base.label
    }

    pub fn signature(&self) -> &StratumSignature {
        &self.base.signature
    }

    pub fn arith(&self) -> Arith {
        self.base.arith
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    /// Area in base units; physical area is this times the frame determinant.
    pub fn base_area(&self) -> f64 {
        self.base.area
    }

    pub fn area(&self) -> f64 {
        self.frame.det() * self.base.area
    }

    /// Physical holonomy of a base vector.
    pub fn physical(&self, v: PlanarVector) -> PlanarVector {
        self.frame.apply(self.base.arith, v)
    }

    /// Physical cross product of two base vectors, exact on integral
    /// presentations up to the final rounding.
    pub fn physical_cross(&self, a: PlanarVector, b: PlanarVector) -> f64 {
        self.frame.det() * self.base.arith.cross(a, b)
    }

    pub fn vertex_count(&self) -> usize {
        self.seed.vertex_count
    }

    /// Cone angle at vertex class `v`.
    pub fn cone_angle(&self, v: usize) -> f64 {
        2.0 * PI * self.base.cone_multiple[v] as f64
    }

    /// Vertex classes of cone angle `2 pi`. Every such vertex is treated as
    /// a marked point whether or not the description declared it.
    pub fn marked_points(&self) -> Vec<usize> {
        (0..self.base.cone_multiple.len()).filter(|&v| self.base.cone_multiple[v] == 1).collect()
    }

    pub fn declared_marked(&self) -> &[usize] {
        &self.base.declared_marked
    }

    /// Whether two surfaces share the same base presentation, so base
    /// vectors and cylinder data transfer between them.
    pub fn same_base(&self, other: &TranslationSurface) -> bool {
        Arc::ptr_eq(&self.base, &other.base)
    }

    /// Apply `m` to the surface.
    pub fn apply_gl2(&self, m: &Mat2) -> Result<TranslationSurface> {
        let det = m.det();
        if !m.is_finite() || det == 0.0 || !det.is_finite() {
            return Err(Error::SingularMatrix);
        }
        if det < 0.0 {
            return Err(Error::InvalidSpec("orientation-reversing matrix".into()));
        }
        Ok(self.with_frame(self.frame.then(m)))
    }

    /// The same base surface under another frame. Reduction of the new
    /// surface starts from this surface's reduced presentation.
    pub fn with_frame(&self, frame: Frame) -> TranslationSurface {
        let seed = self.reduced.get().cloned().unwrap_or_else(|| self.seed.clone());
        TranslationSurface {
            base: self.base.clone(),
            seed,
            frame,
            reduced: OnceLock::new(),
            tol: self.tol,
        }
    }

    /// Frame taking `w` to the vertical with length `1 / lambda * |A w|`
    /// after the current linear part `A`; see [`Frame::Aligned`].
    pub fn aligned(&self, w: PlanarVector, lambda: f64) -> TranslationSurface {
        let a = self.frame.matrix();
        self.with_frame(Frame::Aligned { w, lambda, a, scale: 1.0 })
    }

    /// Delaunay presentation for the current metric.
    pub fn reduced(&self) -> Result<Arc<Triangulation>> {
        if let Some(r) = self.reduced.get() {
            return Ok(r.clone());
        }
        let r = Arc::new(self.seed.delaunay(self.base.arith, &self.frame, self.tol.max_flips)?);
        Ok(self.reduced.get_or_init(|| r).clone())
    }

    /// Polygons in physical coordinates.
    pub fn polygons(&self) -> Vec<Vec<PlanarVector>> {
        self.base
            .polygons
            .iter()
            .map(|p| {
                let o = p[0];
                let po = self.physical(o);
                p.iter().map(|&v| po + self.physical(v - o)).collect()
            })
            .collect()
    }

    pub fn gluings(&self) -> &[[[usize; 2]; 2]] {
        &self.base.gluings
    }

    /// Description of the surface in its current physical coordinates.
    pub fn to_spec(&self) -> SurfaceSpec {
        let mut marked = Vec::new();
        let cls = self.polygon_vertex_classes();
        for &m in &self.base.declared_marked {
            'find: for (p, vs) in cls.iter().enumerate() {
                for (i, &c) in vs.iter().enumerate() {
                    if c == m {
                        marked.push([p, i]);
                        break 'find;
                    }
                }
            }
        }
        SurfaceSpec {
            label: self.base.label.clone(),
            polygons: self.polygons().iter().map(|p| p.iter().map(|v| [v.x, v.y]).collect()).collect(),
            gluings: self.base.gluings.clone(),
            marked,
        }
    }

    /// Vertex class of every polygon vertex.
    pub fn polygon_vertex_classes(&self) -> Vec<Vec<usize>> {
        self.base.poly_class.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_torus() -> SurfaceSpec {
        SurfaceSpec {
            label: "torus".into(),
            polygons: vec![vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]],
            gluings: vec![[[0, 0], [0, 2]], [[0, 1], [0, 3]]],
            marked: vec![[0, 0]],
        }
    }

    #[test]
    fn torus_signature() {
        let s = build_surface(&square_torus()).unwrap();
        assert_eq!(s.signature().genus, 1);
        assert_eq!(s.signature().stratum(), "H(0)");
        assert_eq!(s.vertex_count(), 1);
        assert!((s.cone_angle(0) - 2.0 * PI).abs() < 1e-12);
        assert!((s.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn left_top_gluing_rejected() {
        let mut spec = square_torus();
        spec.gluings = vec![[[0, 3], [0, 2]], [[0, 0], [0, 1]]];
        assert!(matches!(build_surface(&spec), Err(Error::NonMatchingEdges(..))));
    }

    #[test]
    fn half_translation_rejected() {
        let spec = SurfaceSpec {
            label: String::new(),
            polygons: vec![
                vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
                vec![[2.0, 0.0], [3.0, 0.0], [3.0, 1.0], [2.0, 1.0]],
            ],
            // bottom of one square to bottom of the other
            gluings: vec![[[0, 0], [1, 0]], [[0, 2], [1, 2]], [[0, 1], [0, 3]], [[1, 1], [1, 3]]],
            marked: vec![],
        };
        assert!(matches!(build_surface(&spec), Err(Error::NonTrivialHolonomy(..))));
    }

    #[test]
    fn clockwise_polygon_rejected() {
        let mut spec = square_torus();
        spec.polygons[0].reverse();
        assert!(build_surface(&spec).is_err());
    }

    #[test]
    fn rational_input_is_exact() {
        let mut spec = square_torus();
        for v in spec.polygons[0].iter_mut() {
            v[0] *= 0.5;
        }
        let s = build_surface(&spec).unwrap();
        assert!(s.arith().is_exact());
        assert!((s.area() - 1.0).abs() < 1e-12);
    }
}

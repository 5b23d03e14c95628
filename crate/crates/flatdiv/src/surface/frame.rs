//! Linear maps from the base chart to physical holonomy.
//!
//! `Aligned` frames rotate a base vector `w` to the vertical and then apply
//! `diag(lambda, 1/lambda)`. Their horizontal component is a cross product
//! with `w`, so on exact presentations it is free of cancellation even when
//! `lambda` is astronomically large. Protochild surfaces and orbit samples
//! are all of this form.

use super::arith::Arith;
use crate::vector::{Mat2, PlanarVector};

#[derive(Clone, Debug, PartialEq)]
pub enum Frame {
    /// `v -> m v`.
    Linear(Mat2),
    /// `v -> scale * (lambda * det(a) (v x w) / |a w|, (a v).(a w) / (lambda |a w|))`.
    Aligned {
        w: PlanarVector,
        lambda: f64,
        a: Mat2,
        scale: f64,
    },
}

impl Frame {
    pub fn apply(&self, arith: Arith, v: PlanarVector) -> PlanarVector {
        match self {
            Frame::Linear(m) => m.apply(v),
            Frame::Aligned { w, lambda, a, scale } => {
                let aw = a.apply(*w);
                let n = aw.norm();
                let h = lambda * a.det() * arith.cross(v, *w) / n;
                let vert = a.apply(v).dot(aw) / (lambda * n);
                PlanarVector::new(scale * h, scale * vert)
            }
        }
    }

    pub fn det(&self) -> f64 {
        match self {
            Frame::Linear(m) => m.det(),
            Frame::Aligned { a, scale, .. } => a.det() * scale * scale,
        }
    }

    /// Equivalent matrix (loses the cancellation-free evaluation).
    pub fn matrix(&self) -> Mat2 {
        match self {
            Frame::Linear(m) => *m,
            Frame::Aligned { w, lambda, a, scale } => {
                let aw = a.apply(*w);
                let n = aw.norm();
                let u = PlanarVector::new(aw.x / n, aw.y / n);
                // rotation taking u to (0, 1), then the diagonal flow
                let rot = Mat2::new(u.y, -u.x, u.x, u.y);
                Mat2::new(scale * lambda, 0.0, 0.0, scale / lambda)
                    .mul(&rot)
                    .mul(a)
            }
        }
    }

    /// Frame of `m` composed after `self`.
    pub fn then(&self, m: &Mat2) -> Frame {
        if let (Frame::Aligned { w, lambda, a, scale }, Some((p, q))) = (self, m.positive_diagonal()) {
            let k = (p * q).sqrt();
            return Frame::Aligned {
                w: *w,
                lambda: lambda * (p / q).sqrt(),
                a: *a,
                scale: scale * k,
            };
        }
        Frame::Linear(m.mul(&self.matrix()))
    }

    /// The matrix part preceding any alignment: the frame of the surface
    /// that an aligned frame was built on.
    pub fn source_matrix(&self) -> Mat2 {
        match self {
            Frame::Linear(m) => *m,
            Frame::Aligned { .. } => self.matrix(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aligned_matches_matrix() {
        let f = Frame::Aligned {
            w: PlanarVector::new(3.0, 1.0),
            lambda: 10f64.sqrt(),
            a: Mat2::IDENTITY,
            scale: 1.0,
        };
        let m = f.matrix();
        for v in [PlanarVector::new(1.0, 0.0), PlanarVector::new(2.0, -7.0), PlanarVector::new(3.0, 1.0)] {
            let p = f.apply(Arith::Exact, v);
            let q = m.apply(v);
            assert!((p - q).norm() < 1e-12, "{p:?} {q:?}");
        }
        let s = f.apply(Arith::Exact, PlanarVector::new(3.0, 1.0));
        assert!(s.x.abs() < 1e-15 && (s.y - 1.0).abs() < 1e-15);
        assert!((f.det() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_composition_stays_aligned() {
        let f = Frame::Aligned {
            w: PlanarVector::new(0.0, 1.0),
            lambda: 1.0,
            a: Mat2::IDENTITY,
            scale: 1.0,
        };
        let g = f.then(&Mat2::geodesic(2.0));
        assert!(matches!(g, Frame::Aligned { .. }));
        let v = g.apply(Arith::Exact, PlanarVector::new(1.0, 1.0));
        assert!((v.x - 2f64.exp()).abs() < 1e-12 && (v.y - (-2f64).exp()).abs() < 1e-12);
    }
}

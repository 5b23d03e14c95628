//! Sign predicates in the base chart.
//!
//! Surfaces given with integral (or small-denominator rational) vertices
//! keep integral base coordinates forever: every holonomy is an integer
//! combination of edge vectors. For those the predicates below are exact,
//! evaluated in `i128`. Other surfaces fall back to `f64` with a relative
//! tolerance.

use crate::tolerance::EXACT_COORD_LIMIT;
use crate::vector::PlanarVector;
use std::cmp::Ordering;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Arith {
    Exact,
    /// `unit` is a length typical of the surface; it keeps predicates on
    /// nearly vanishing vectors meaningful.
    Float { tol: f64, unit: f64 },
}

#[inline]
fn to_i(v: f64) -> i128 {
    debug_assert!(v.abs() <= EXACT_COORD_LIMIT && v.fract() == 0.0, "non-integral {v}");
    v as i64 as i128
}

impl Arith {
    pub fn is_exact(self) -> bool {
        matches!(self, Arith::Exact)
    }

    /// Sign of `a x b`.
    #[inline]
    pub fn cross_sign(self, a: PlanarVector, b: PlanarVector) -> Ordering {
        match self {
            Arith::Exact => (to_i(a.x) * to_i(b.y) - to_i(a.y) * to_i(b.x)).cmp(&0),
            Arith::Float { tol, unit } => {
                let c = a.cross(b);
                let scale = tol * (a.norm() + unit) * (b.norm() + unit);
                if c > scale {
                    Ordering::Greater
                } else if c < -scale {
                    Ordering::Less
                } else {
                    Ordering::Equal
                }
            }
        }
    }

    /// Sign of `a . b`.
    #[inline]
    pub fn dot_sign(self, a: PlanarVector, b: PlanarVector) -> Ordering {
        match self {
            Arith::Exact => (to_i(a.x) * to_i(b.x) + to_i(a.y) * to_i(b.y)).cmp(&0),
            Arith::Float { tol, unit } => {
                let c = a.dot(b);
                let scale = tol * (a.norm() + unit) * (b.norm() + unit);
                if c > scale {
                    Ordering::Greater
                } else if c < -scale {
                    Ordering::Less
                } else {
                    Ordering::Equal
                }
            }
        }
    }

    /// `a x b`, computed without cancellation error on exact presentations.
    #[inline]
    pub fn cross(self, a: PlanarVector, b: PlanarVector) -> f64 {
        match self {
            Arith::Exact => (to_i(a.x) * to_i(b.y) - to_i(a.y) * to_i(b.x)) as f64,
            Arith::Float { .. } => a.cross(b),
        }
    }

    /// `a . b`, exact on exact presentations.
    #[inline]
    pub fn dot(self, a: PlanarVector, b: PlanarVector) -> f64 {
        match self {
            Arith::Exact => (to_i(a.x) * to_i(b.x) + to_i(a.y) * to_i(b.y)) as f64,
            Arith::Float { .. } => a.dot(b),
        }
    }

    /// Whether two base vectors are equal.
    pub fn same_point(self, a: PlanarVector, b: PlanarVector) -> bool {
        match self {
            Arith::Exact => a == b,
            Arith::Float { tol, unit } => {
                let d = (a - b).norm();
                d <= tol * (unit + a.norm().max(b.norm()))
            }
        }
    }

    /// `true` when `d` lies in the half-open sector `[o, i)` swept
    /// counterclockwise from `o` to `i`; the sector angle is at most pi.
    pub fn in_sector(self, o: PlanarVector, i: PlanarVector, d: PlanarVector) -> bool {
        let od = self.cross_sign(o, d);
        if od == Ordering::Equal {
            return self.dot_sign(o, d) == Ordering::Greater;
        }
        if od == Ordering::Less {
            return false;
        }
        match self.cross_sign(o, i) {
            // sector of angle exactly pi
            Ordering::Equal => true,
            _ => self.cross_sign(d, i) == Ordering::Greater,
        }
    }

    /// `true` when `d` lies in the closed sector `[o, i]`.
    pub fn in_closed_sector(self, o: PlanarVector, i: PlanarVector, d: PlanarVector) -> bool {
        if self.in_sector(o, i, d) {
            return true;
        }
        self.cross_sign(d, i) == Ordering::Equal && self.dot_sign(d, i) == Ordering::Greater
    }
}

/// Whether a coordinate is usable by the exact predicates.
pub fn exact_ok(v: PlanarVector) -> bool {
    v.x.abs() <= EXACT_COORD_LIMIT && v.y.abs() <= EXACT_COORD_LIMIT
}

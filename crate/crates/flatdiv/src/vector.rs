//! Planar vectors and 2x2 matrices.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

/// A vector in the plane. Used both for physical holonomy and for
/// coordinates in the base chart of a surface.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct PlanarVector {
    pub x: f64,
    pub y: f64,
}

impl PlanarVector {
    pub const ZERO: PlanarVector = PlanarVector { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        PlanarVector { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    /// Argument in (-pi, pi].
    pub fn arg(self) -> f64 {
        let a = self.y.atan2(self.x);
        if a <= -PI {
            a + 2.0 * PI
        } else {
            a
        }
    }

    /// Argument in [0, 2pi).
    pub fn arg_positive(self) -> f64 {
        let a = self.y.atan2(self.x);
        if a < 0.0 {
            a + 2.0 * PI
        } else {
            a
        }
    }

    pub fn cross(self, o: PlanarVector) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn dot(self, o: PlanarVector) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn scale(self, k: f64) -> PlanarVector {
        PlanarVector::new(self.x * k, self.y * k)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Representative of `±self` with argument in (-pi/2, pi/2].
    pub fn canonical(self) -> PlanarVector {
        if self.is_canonical() {
            self
        } else {
            -self
        }
    }

    /// True when the argument lies in (-pi/2, pi/2]. Exactly one of `v`
    /// and `-v` is canonical for nonzero `v`.
    pub fn is_canonical(self) -> bool {
        self.x > 0.0 || (self.x == 0.0 && self.y > 0.0)
    }

    /// Unsigned angle in [0, pi/2] between the line spanned by `self` and
    /// the horizontal axis.
    pub fn angle_to_horizontal(self) -> f64 {
        (self.y.abs()).atan2(self.x.abs())
    }

    /// Angle of the line spanned by `self`, normalised to [0, pi).
    pub fn line_angle(self) -> f64 {
        let a = self.arg_positive();
        if a >= PI {
            a - PI
        } else {
            a
        }
    }
}

/// Unsigned angle in [0, pi/2] between two lines given by directions.
pub fn line_separation(a: PlanarVector, b: PlanarVector) -> f64 {
    let s = a.cross(b).abs();
    let c = a.dot(b).abs();
    s.atan2(c)
}

impl Add for PlanarVector {
    type Output = PlanarVector;
    fn add(self, o: PlanarVector) -> PlanarVector {
        PlanarVector::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for PlanarVector {
    type Output = PlanarVector;
    fn sub(self, o: PlanarVector) -> PlanarVector {
        PlanarVector::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for PlanarVector {
    type Output = PlanarVector;
    fn neg(self) -> PlanarVector {
        PlanarVector::new(-self.x, -self.y)
    }
}

impl Mul<PlanarVector> for f64 {
    type Output = PlanarVector;
    fn mul(self, v: PlanarVector) -> PlanarVector {
        v.scale(self)
    }
}

/// Row-major 2x2 real matrix.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1.0, 0.0], [0.0, 1.0]]);

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2([[a, b], [c, d]])
    }

    pub fn scalar(k: f64) -> Self {
        Mat2::new(k, 0.0, 0.0, k)
    }

    /// Teichmueller flow `g_t = diag(e^t, e^-t)`.
    pub fn geodesic(t: f64) -> Self {
        Mat2::new(t.exp(), 0.0, 0.0, (-t).exp())
    }

    /// Rotation `r_theta`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Mat2::new(c, -s, s, c)
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn apply(&self, v: PlanarVector) -> PlanarVector {
        let m = &self.0;
        PlanarVector::new(m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y)
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    pub fn inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        let m = &self.0;
        Some(Mat2::new(m[1][1] / d, -m[0][1] / d, -m[1][0] / d, m[0][0] / d))
    }

    /// `Some((p, q))` when the matrix is diagonal with positive entries.
    pub fn positive_diagonal(&self) -> Option<(f64, f64)> {
        let m = &self.0;
        (m[0][1] == 0.0 && m[1][0] == 0.0 && m[0][0] > 0.0 && m[1][1] > 0.0)
            .then_some((m[0][0], m[1][1]))
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|v| v.is_finite())
    }
}

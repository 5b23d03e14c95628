//! Exclusion intervals in the twist parameter and angle intervals of
//! cylinders.

use crate::census::Cylinder;
use crate::error::{Error, Result};
use crate::surface::SaddleConnection;
use crate::vector::PlanarVector;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum ExclusionKind {
    /// Radius parameter `delta`.
    I1,
    /// Radius parameter `c / 32`.
    I2,
    Custom,
}

/// Open interval `|t - t0| < radius_h` of twist parameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistExclusion {
    pub t0: f64,
    pub radius_h: f64,
    pub kind: ExclusionKind,
    pub r: f64,
}

impl TwistExclusion {
    pub fn contains(&self, t: f64) -> bool {
        (t - self.t0).abs() < self.radius_h
    }

    pub fn lo(&self) -> f64 {
        self.t0 - self.radius_h
    }

    pub fn hi(&self) -> f64 {
        self.t0 + self.radius_h
    }

    pub fn is_empty(&self) -> bool {
        !(self.radius_h > 0.0)
    }
}

/// Parameter at which `cross + t0 parent` is parallel to `thin`.
pub fn t0_from_vectors(thin: PlanarVector, parent: PlanarVector, cross: PlanarVector) -> Result<f64> {
    let den = parent.cross(thin);
    if den.abs() <= 1e-12 * parent.norm() * thin.norm() {
        return Err(Error::ParallelToParent);
    }
    Ok(-cross.cross(thin) / den)
}

pub fn t0_of(thin: &Cylinder, parent: &Cylinder, cross: &SaddleConnection) -> Result<f64> {
    t0_from_vectors(thin.core_holonomy, parent.core_holonomy, cross.holonomy)
}

/// Closed-form exclusion interval from vectors: `thin` and `parent` core
/// holonomies, `cross` the cross curve, `parent_area` the parent's area.
pub fn exclusion_from_vectors(
    thin: PlanarVector,
    parent: PlanarVector,
    parent_area: f64,
    cross: PlanarVector,
    r: f64,
    kind: ExclusionKind,
) -> Result<TwistExclusion> {
    let t0 = t0_from_vectors(thin, parent, cross)?;
    let st0 = cross + parent.scale(t0);
    let radius_h = if r > 0.0 { r * st0.norm() / (parent_area * thin.norm()) } else { 0.0 };
    Ok(TwistExclusion { t0, radius_h, kind, r })
}

pub fn exclusion_interval(thin: &Cylinder, parent: &Cylinder, cross: &SaddleConnection, r: f64) -> Result<TwistExclusion> {
    exclusion_from_vectors(thin.core_holonomy, parent.core_holonomy, parent.area, cross.holonomy, r, ExclusionKind::Custom)
}

pub fn exclusion_i1(thin: &Cylinder, parent: &Cylinder, cross: &SaddleConnection, delta: f64) -> Result<TwistExclusion> {
    let mut e = exclusion_interval(thin, parent, cross, delta)?;
    e.kind = ExclusionKind::I1;
    Ok(e)
}

pub fn exclusion_i2(thin: &Cylinder, parent: &Cylinder, cross: &SaddleConnection, c: f64) -> Result<TwistExclusion> {
    let mut e = exclusion_interval(thin, parent, cross, c / 32.0)?;
    e.kind = ExclusionKind::I2;
    Ok(e)
}

/// Angle interval of a cylinder with its weights.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngleInterval {
    pub center: f64,
    pub radius: f64,
    pub rho: f64,
    #[serde(rename = "N")]
    pub n: f64,
}

impl AngleInterval {
    /// `rho |I|`, with `|I|` the radius.
    pub fn weight(&self) -> f64 {
        self.rho * self.radius
    }
}

/// Interval for a cylinder of circumference `length` at angle `center`.
pub fn angle_interval_for(length: f64, center: f64, big_c: f64) -> Result<AngleInterval> {
    if !(length > std::f64::consts::E) {
        return Err(Error::TooShort(length));
    }
    let n = length.ln();
    Ok(AngleInterval { center, radius: 1.0 / (length * length * n), rho: big_c / n, n })
}

pub fn angle_interval(beta: &Cylinder, big_c: f64) -> Result<AngleInterval> {
    angle_interval_for(beta.circumference, beta.core_holonomy.line_angle(), big_c)
}

/// A child interval described relative to its parent's center.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelativeInterval {
    pub offset: f64,
    pub radius: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NestingReport {
    /// Per child: whether it lies inside the parent.
    pub nested: Vec<bool>,
    /// Sibling pairs closer than the required gap, with their gap.
    pub too_close: Vec<(usize, usize, f64)>,
    pub required_gap: f64,
    pub pass: bool,
}

/// Nesting and separation with child centers given as offsets from the
/// parent center and sibling center distances supplied by `sibling_angle`.
pub fn check_relative(
    parent_radius: f64,
    rho_parent: f64,
    children: &[RelativeInterval],
    sibling_angle: impl Fn(usize, usize) -> f64,
) -> NestingReport {
    let nested: Vec<bool> = children.iter().map(|c| c.offset.abs() + c.radius <= parent_radius).collect();
    let required_gap = rho_parent * parent_radius;
    let mut too_close = Vec::new();
    for i in 0..children.len() {
        for j in i + 1..children.len() {
            let gap = sibling_angle(i, j).abs() - children[i].radius - children[j].radius;
            if !(gap >= required_gap) {
                too_close.push((i, j, gap));
            }
        }
    }
    let pass = nested.iter().all(|&b| b) && too_close.is_empty();
    NestingReport { nested, too_close, required_gap, pass }
}

pub fn check_nesting_and_separation(parent: &AngleInterval, children: &[AngleInterval], rho_parent: f64) -> NestingReport {
    let rel: Vec<RelativeInterval> = children
        .iter()
        .map(|c| RelativeInterval { offset: c.center - parent.center, radius: c.radius })
        .collect();
    check_relative(parent.radius, rho_parent, &rel, |i, j| children[j].center - children[i].center)
}

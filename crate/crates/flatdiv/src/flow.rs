//! Systole along Teichmuller geodesics, time spent in thick parts, and the
//! audit of short-cylinder windows between consecutive tree levels.

use crate::cantor::CantorTree;
use crate::census::{cylinders_up_to, FULL_CIRCLE};
use crate::error::{Error, Result};
use crate::surface::frame::Frame;
use crate::surface::{enumerate::shortest_connection, TranslationSurface};
use crate::vector::PlanarVector;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortCylinder {
    pub core: PlanarVector,
    pub length: f64,
    pub area_fraction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitTrace {
    /// Base-chart vector contracted by the flow.
    pub direction: PlanarVector,
    pub times: Vec<f64>,
    pub systoles: Vec<f64>,
    pub short_cylinders: Vec<Option<ShortCylinder>>,
    pub eps_report: f64,
}

/// Base vector of `s` that `r_theta` turns to the vertical. On exact
/// presentations it is rounded to an integer vector of size about `2^44`.
pub fn contracted_direction(s: &TranslationSurface, theta: f64) -> Result<PlanarVector> {
    let inv = s.frame().matrix().inverse().ok_or(Error::SingularMatrix)?;
    let b = inv.apply(PlanarVector::new(theta.sin(), theta.cos()));
    if !s.arith().is_exact() {
        return Ok(b);
    }
    let k = 2f64.powi(44) / b.norm();
    Ok(PlanarVector::new((b.x * k).round(), (b.y * k).round()))
}

/// `g_t` applied after rotating base vector `w` to the vertical.
pub fn flowed(s: &TranslationSurface, w: PlanarVector, t: f64) -> TranslationSurface {
    s.with_frame(Frame::Aligned { w, lambda: t.exp(), a: s.frame().matrix(), scale: 1.0 })
}

fn sample(s: &TranslationSurface, eps_report: f64) -> Result<(f64, Option<ShortCylinder>)> {
    let sys = shortest_connection(s)?.length();
    let short = if sys < eps_report {
        cylinders_up_to(s, eps_report, 0.0, FULL_CIRCLE)?
            .into_iter()
            .find(|c| c.circumference < eps_report)
            .map(|c| ShortCylinder { core: c.core_holonomy, length: c.circumference, area_fraction: c.area_fraction })
    } else {
        None
    };
    Ok((sys, short))
}

/// Systole of `g_t r_theta S` on the grid `0, step, ..., T`.
pub fn systole_trace(s: &TranslationSurface, theta: f64, t_max: f64, step: f64, eps_report: f64) -> Result<OrbitTrace> {
    let w = contracted_direction(s, theta)?;
    systole_trace_along(s, w, t_max, step, eps_report)
}

/// Systole along the geodesic contracting base vector `w`.
pub fn systole_trace_along(s: &TranslationSurface, w: PlanarVector, t_max: f64, step: f64, eps_report: f64) -> Result<OrbitTrace> {
    if !(step > 0.0) || !(t_max >= 0.0) {
        return Err(Error::InvalidSpec(format!("need step > 0 and T >= 0, got step {step}, T {t_max}")));
    }
    let n = (t_max / step + 1e-9).floor() as usize + 1;
    let times: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
    // windows are independent: each starts from the stored base surface
    let windows = rayon::current_num_threads().max(1).min(n);
    let per = n.div_ceil(windows);
    let parts: Vec<Result<Vec<(f64, Option<ShortCylinder>)>>> = times
        .par_chunks(per)
        .map(|chunk| {
            let mut prev: Option<TranslationSurface> = None;
            let mut out = Vec::with_capacity(chunk.len());
            for &t in chunk {
                let base = prev.as_ref().unwrap_or(s);
                let frame = Frame::Aligned { w, lambda: t.exp(), a: s.frame().matrix(), scale: 1.0 };
                let p = base.with_frame(frame);
                out.push(sample(&p, eps_report)?);
                prev = Some(p);
            }
            Ok(out)
        })
        .collect();
    let mut systoles = Vec::with_capacity(n);
    let mut short_cylinders = Vec::with_capacity(n);
    for p in parts {
        for (a, b) in p? {
            systoles.push(a);
            short_cylinders.push(b);
        }
    }
    Ok(OrbitTrace { direction: w, times, systoles, short_cylinders, eps_report })
}

/// Trapezoid-weighted fraction of the trace with systole at least `eps`.
pub fn occupancy_fraction(trace: &OrbitTrace, eps: f64) -> f64 {
    occupancy_of(&trace.systoles, eps)
}

pub fn occupancy_of(systoles: &[f64], eps: f64) -> f64 {
    let n = systoles.len();
    match n {
        0 => 0.0,
        1 => f64::from(systoles[0] >= eps),
        _ => {
            let w = |i: usize| if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
            let total: f64 = (0..n).map(w).sum();
            (0..n).filter(|&i| systoles[i] >= eps).map(w).sum::<f64>() / total
        }
    }
}

/// Flat length at time `t` of a vector with horizontal part `h0` and
/// vertical part `v0` at time zero.
pub fn flowed_length(h0: f64, v0: f64, t: f64) -> f64 {
    (t.exp() * h0).hypot((-t).exp() * v0)
}

/// Components of base vector `beta` after rotating base vector `w` to the
/// vertical, measured on `x`.
pub fn components(x: &TranslationSurface, beta: PlanarVector, w: PlanarVector) -> (f64, f64) {
    let wp = x.physical(w);
    let n = wp.norm();
    (x.physical_cross(beta, w) / n, x.physical(beta).dot(wp) / n)
}

/// Grid measure of `{t in [lo, hi] : length(t) > eps}`.
pub fn exceptional_measure(h0: f64, v0: f64, lo: f64, hi: f64, eps: f64, step: f64) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    let n = ((hi - lo) / step).ceil() as usize;
    let h = (hi - lo) / n as f64;
    let vals: Vec<bool> = (0..=n).map(|i| flowed_length(h0, v0, lo + i as f64 * h) > eps).collect();
    (0..n).map(|i| 0.5 * h * (f64::from(vals[i]) + f64::from(vals[i + 1]))).sum()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct L2Audit {
    pub parent: usize,
    pub child: usize,
    pub eps: f64,
    pub step: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub exceptional: f64,
    pub bound: f64,
    pub pass: bool,
    /// `4 / eps^2 < log|beta|`, reported rather than required.
    pub hypothesis_met: bool,
    /// `[log|beta| + log(2/eps), log|beta'| - log(2M/eps)]`, when nonempty.
    pub window: Option<(f64, f64)>,
    /// Whether `beta` has length at most `eps` throughout the window.
    pub window_short: Option<bool>,
    pub direction_in_child: bool,
}

/// Audit the short window of `parent` between its length scale and that of
/// `child`, along the geodesic contracting base vector `w` of `x`. With
/// `enforce` the size hypothesis on `eps` is required.
pub fn lemma_l2_audit(
    x: &TranslationSurface,
    tree: &CantorTree,
    parent: usize,
    child: usize,
    w: PlanarVector,
    eps: f64,
    step: f64,
    enforce: bool,
) -> Result<L2Audit> {
    let p = tree.node(parent);
    let c = tree.node(child);
    if c.parent_id != Some(parent) {
        return Err(Error::InvalidSpec(format!("node {child} is not a child of {parent}")));
    }
    let lhs = 4.0 / (eps * eps);
    let rhs = p.cylinder.length.ln();
    let hypothesis_met = lhs < rhs;
    if enforce && !hypothesis_met {
        return Err(Error::HypothesisUnmet { lhs, rhs });
    }
    let (h0, v0) = components(x, p.cylinder.base_core, w);
    let t_lo = p.cylinder.length.ln();
    let t_hi = c.cylinder.length.ln();
    let exceptional = exceptional_measure(h0, v0, t_lo, t_hi, eps, step);
    let bound = (4.0 * tree.constants.big_m / (eps * eps)).ln() + 2.0 * step;
    let a = t_lo + (2.0 / eps).ln();
    let b = t_hi - (2.0 * tree.constants.big_m / eps).ln();
    let (window, window_short) = if b > a {
        let n = ((b - a) / step).ceil().max(1.0) as usize;
        let ok = (0..=n).all(|i| flowed_length(h0, v0, a + (b - a) * i as f64 / n as f64) <= eps);
        (Some((a, b)), Some(ok))
    } else {
        (None, None)
    };
    // angle between w and the child core, against the child radius
    let (hc, vc) = components(x, c.cylinder.base_core, w);
    let off = (hc / vc).atan().abs();
    Ok(L2Audit {
        parent,
        child,
        eps,
        step,
        t_lo,
        t_hi,
        exceptional,
        bound,
        pass: exceptional <= bound,
        hypothesis_met,
        window,
        window_short,
        direction_in_child: off <= c.interval.radius,
    })
}

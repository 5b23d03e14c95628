//! Numerical tolerances and work budgets, kept in one record.

use serde::{Deserialize, Serialize};

/// Relative tolerance for geometric predicates (parallelism, point on
/// edge) on surfaces whose base coordinates are not integral.
pub const GEOMETRIC_REL: f64 = 1e-9;

/// Relative tolerance of orientation and coincidence predicates evaluated
/// in the base chart of floating point presentations. It only has to absorb
/// rounding, and it must stay small because strongly flowed frames make
/// physically short vectors long in the base chart.
pub const PREDICATE_REL: f64 = 1e-13;

/// Area normalisation is checked to this absolute tolerance.
pub const AREA_ABS: f64 = 1e-12;

/// Two holonomies are considered equal within this relative error when a
/// saddle connection is re-traced.
pub const RETRACE_REL: f64 = 1e-9;

/// Largest magnitude a base coordinate may reach before exact integer
/// predicates lose their guarantee (2^52).
pub const EXACT_COORD_LIMIT: f64 = 4_503_599_627_370_496.0;

/// Tolerances and budgets used across the library. `Default` gives the
/// documented values; every field can be overridden from a run config.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Relative tolerance for parallelism and incidence tests on
    /// floating point presentations.
    pub geometric: f64,
    /// Relative tolerance for base-chart predicates on floating point
    /// presentations.
    pub predicate: f64,
    /// Maximum number of saddle connections one enumeration may return.
    pub max_connections: usize,
    /// Maximum number of unfolded triangles one enumeration may visit.
    pub max_unfold_steps: usize,
    /// Polygon crossings allowed when tracing a single segment or leaf.
    pub trace_budget: usize,
    /// Edge flips allowed when re-presenting a surface.
    pub max_flips: usize,
    /// Relative slack when comparing lengths against bounds.
    pub length_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            geometric: GEOMETRIC_REL,
            predicate: PREDICATE_REL,
            max_connections: 2_000_000,
            max_unfold_steps: 200_000_000,
            trace_budget: 1_000_000,
            max_flips: 10_000_000,
            length_rel: 1e-12,
        }
    }
}

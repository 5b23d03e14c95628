//! Surfaces shipped with the crate.

use crate::error::Result;
use crate::surface::{build_surface, SurfaceSpec, TranslationSurface};

pub const TORUS_JSON: &str = include_str!("../../../surfaces/torus.json");
pub const L_SHAPE_JSON: &str = include_str!("../../../surfaces/l_shape_h2.json");
pub const OCTAGON_JSON: &str = include_str!("../../../surfaces/octagon_h2.json");

/// Square torus with its vertex marked.
pub fn torus() -> TranslationSurface {
    named("torus").expect("bundled surface is valid")
}

/// Three unit squares in an L, opposite sides glued; one cone point of
/// angle `6 pi`.
pub fn l_shape() -> TranslationSurface {
    named("l_shape_h2").expect("bundled surface is valid")
}

/// Regular octagon with opposite sides glued.
pub fn octagon() -> TranslationSurface {
    named("octagon_h2").expect("bundled surface is valid")
}

pub fn spec(name: &str) -> Option<SurfaceSpec> {
    let text = match name.trim_end_matches(".json") {
        "torus" => TORUS_JSON,
        "l_shape_h2" | "l_shape" => L_SHAPE_JSON,
        "octagon_h2" | "octagon" => OCTAGON_JSON,
        _ => return None,
    };
    Some(SurfaceSpec::from_json(text).expect("bundled surface parses"))
}

pub fn named(name: &str) -> Result<TranslationSurface> {
    let spec = spec(name).ok_or_else(|| crate::Error::InvalidSpec(format!("unknown bundled surface {name}")))?;
    build_surface(&spec)
}

//! Translation surfaces, cylinder censuses, twist-family child selection,
//! nested angle intervals and flow diagnostics.

pub mod bundled;
pub mod cantor;
pub mod census;
pub mod error;
pub mod flow;
pub mod interval;
pub mod pipeline;
pub mod surface;
pub mod tolerance;
pub mod twist;
pub mod vector;

pub use error::{Error, Result};
pub use surface::{build_surface, SurfaceSpec, TranslationSurface};
pub use vector::{Mat2, PlanarVector};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/surfaces.md")]
    pub struct Surfaces;
    #[doc = include_str!("../../../book/src/cylinders.md")]
    pub struct Cylinders;
    #[doc = include_str!("../../../book/src/twisting.md")]
    pub struct Twisting;
    #[doc = include_str!("../../../book/src/trees.md")]
    pub struct Trees;
    #[doc = include_str!("../../../book/src/flow.md")]
    pub struct Flow;
    #[doc = include_str!("../../../book/src/cli.md")]
    pub struct Cli;
}

//! Process simulation and cap design for thin-film 0-level vacuum packages
//! of MEMS resonators.
//!
//! The flow mirrors the fabrication sequence: sacrificial release through
//! perforations in the cap ([`etch`]), sealing of the holes by non-conformal
//! sputtering ([`clogging`]), then the molding load on the finished cap
//! ([`mechanics`], [`designer`]). [`recipe`] and [`pipeline`] chain the
//! stages from a recipe file.

// range checks are written as `!(x > 0.0)` so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibrate;
pub mod clogging;
pub mod designer;
pub mod error;
pub mod etch;
pub mod geometry;
pub mod material;
pub mod mechanics;
pub mod pipeline;
pub mod recipe;
pub mod report;
pub mod units;

pub use error::{Error, Result, Stage};
pub use geometry::{Hole, HoleShape, PackageStack, Rect};
pub use material::Material;
pub use pipeline::{run_recipe, sweep, ProcessReport};
pub use recipe::{parse_recipe, read_recipe, Recipe};

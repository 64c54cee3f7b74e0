//! Dynamics of mapping classes on the cubic surfaces
//! x² + y² + z² + xyz = Ax + By + Cz + D.
//!
//! The three Vieta involutions generate a group isomorphic to the level-2
//! subgroup of PGL(2,Z). This crate realizes that correspondence exactly in
//! integers and uses it to study orbits: escape sets and Green functions,
//! periodic points, real-surface topology, trace maps of substitutions and
//! the spectra of the associated Schrödinger operators.

pub mod class_matrix;
pub mod dynamics;
pub mod error;
pub mod export;
pub mod linalg;
pub mod painleve;
pub mod periodic;
pub mod schrodinger;
pub mod surfaces;
pub mod words;

pub use class_matrix::ClassMatrix;
pub use dynamics::{Automorphism, EscapeRaster, GreenEstimate, OrbitRecord};
pub use error::{Error, Result};
pub use surfaces::{CayleyCoord, Convention, RealTopology, SurfaceParams, SurfacePoint, C64};
pub use words::{GroupWord, InfinityVertex, IsometryClass, IsometryKind, Letter};

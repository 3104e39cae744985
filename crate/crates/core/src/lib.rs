//! Glass-cut self-affine dissections of convex quadrangles.
//!
//! Affine classes of convex quadrangles are `Q(alpha, beta)`, `T(gamma)` and
//! `P`. Two quadrangles glued along a common side give a parent whose class
//! follows from a small table ([`composition`]). Extended dissection trees
//! annotate every cut with the glueing operation and flip marks;
//! [`treesearch`] enumerates them to decide `n`-gc-self-affinity,
//! [`realizer`] turns trees and named constructions into coordinates, and
//! [`verifier`] checks plans using coordinates only.

pub mod affine_types;
pub mod cli;
pub mod composition;
pub mod document;
pub mod families;
pub mod geometry;
pub mod ratio;
pub mod realizer;
pub mod svg;
pub mod treesearch;
pub mod verifier;

pub use affine_types::{
    affine_quotient, canonicalize, classify_quadrangle, flip, is_affine_kite, AffineClass,
    CanonicalClass, Classification,
};
pub use composition::{combine, compose_sets, ClassSet, ClassTerm, Op};
pub use geometry::{Point, Quad};
pub use ratio::Ratio;

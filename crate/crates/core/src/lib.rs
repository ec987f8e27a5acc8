//! Tangent and normal cones, coderivatives and projectional coderivatives of
//! set-valued mappings relative to a restriction set, with the generalized
//! Mordukhovich criterion, graphical moduli and calculus rules.

pub mod arrangement;
pub mod calculus;
pub mod cli;
pub mod cones;
pub mod criterion;
pub mod error;
pub mod geometry;
pub mod expr;
pub mod linalg;
pub mod lp;
pub mod manifold;
pub mod maps;
pub mod projcode;
pub mod scalar;
pub mod sets;

pub use error::{Result, VakError};
pub use geometry::{ConvexPolyhedron, FaceDescriptor, VRep};
pub use scalar::{Rational, Scalar};
pub use cones::{cone_union_equal, project_cone_union, sphere_hausdorff, ConeUnion};

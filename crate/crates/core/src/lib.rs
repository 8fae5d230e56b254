//! Similarity-map algebra and numerical experiments on self-similar sets:
//! relative-map enumeration, separation scans, dimension estimates and
//! constructive tangent sequences.

pub mod dimension;
pub mod error;
pub mod geometry;
pub mod io;
pub mod scalar;
pub mod separation;
pub mod symbolic;
pub mod tangents;

pub use error::{Error, Result};
pub use geometry::{Orthogonal, PointCloud, Similarity};
pub use scalar::{Backend, Scalar};
pub use symbolic::{IfsSystem, Word};

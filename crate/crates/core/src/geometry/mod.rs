//! Affine similarities on the line and in the plane, and finite point clouds.

mod cloud;
mod hausdorff;
mod orthogonal;
mod similarity;

pub use cloud::{affine_hull_dimension, PointCloud};
pub use hausdorff::{
    hausdorff_distance, one_sided_hausdorff, one_sided_hausdorff_brute, one_sided_hausdorff_grid,
};
pub use orthogonal::Orthogonal;
pub use similarity::{AffineF64, MapKey, Similarity};

//! Skeleton-based navigation in sensor networks with danger zones.
//!
//! A random sensor field is covered by a sparse *skeleton* of awake nodes:
//! a uniform grid of streets, or a quadtree refined around the dangers.
//! Flooding searches run on the skeleton instead of the whole network.
//!
//! ```
//! use skeleton_nav::field::{generate_field, CommGraph};
//!
//! let field = generate_field(256, 2.0, 7).unwrap();
//! let graph = CommGraph::build(field);
//! assert_eq!(graph.n(), 256);
//! ```

pub mod danger;
pub mod distsim;
pub mod field;
pub mod harness;
pub mod nodeset;
pub mod skeleton;

pub use danger::{DangerZone, Exposure, Polygon, PotentialModel};
pub use field::{generate_field, CommGraph, NodeId, Point, SensorField};
pub use nodeset::NodeSet;
pub use skeleton::{Provenance, SkeletonGraph};

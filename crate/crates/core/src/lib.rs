//! Finite-scale machinery for trees coded by functions on the circle, their
//! geodesic laminations, Brownian-map pseudo-metrics on labelled contours and
//! uniform random 2k-angulations.
//!
//! Everything is discrete and exact: contour functions are Dyck paths,
//! labels are integers, and every equivalence relation is decided by integer
//! equality. Continuum statements are approached through `n -> infinity`
//! scaling, which is what [`estimators`] and the Monte Carlo probes measure.
//!
//! Module map:
//!
//! - [`excursion`]: uniform Dyck excursions, arc minima, `m_g` and `d_g`.
//! - [`circle_tree`]: the quotient tree of a contour with its class structure.
//! - [`snake`]: snake-head labels, re-rooting at the label minimum and the
//!   genericity probes.
//! - [`lamination`]: non-crossing chord diagrams and SVG rendering.
//! - [`estimators`]: box-counting dimension estimates.
//! - [`brownian_map`]: the `D°` / `D*` pseudo-metrics.
//! - [`planar_maps`]: quadrangulation and 2k-angulation samplers, BFS kernels
//!   and the bottleneck scan.
//! - [`io`] and [`verify`]: run configuration, file formats and the invariant
//!   suite driven by the CLI.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod brownian_map;
pub mod circle_tree;
pub mod coding;
pub mod error;
pub mod estimators;
pub mod excursion;
pub mod io;
pub mod lamination;
pub mod planar_maps;
pub mod rmq;
pub mod rng;
pub mod snake;
pub mod stats;
pub mod verify;

pub use circle_tree::CircleTree;
pub use coding::{Coding, IndexedCoding, NaiveCoding};
pub use error::{Error, Result};
pub use excursion::DiscreteExcursion;
pub use lamination::{Chord, DiskModel, Lamination};
pub use planar_maps::PlanarMap;
pub use rmq::{RmqIndex, SparseTable};
pub use snake::{IncrementLaw, LabelFunction, Rerooted};

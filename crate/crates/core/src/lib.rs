//! Conflation of linear and surface road network data.
//!
//! A road network is usually delivered in one of two shapes: a graph of
//! polylines (sections meeting at junction nodes) or a surface layer of
//! polygons covering the right-of-way. This crate partitions the surface
//! footprint so that every graph edge owns exactly one surface section,
//! which makes attribute transfer between the two representations a plain
//! one-to-one copy.
//!
//! The pipeline:
//!
//! 1. [`roadgraph`] snaps raw polylines into a topological graph.
//! 2. [`partition::dissolve`] merges the raw surface polygons into a single
//!    footprint.
//! 3. [`seeding`] places source points along every edge: one point per edge
//!    where it exits a buffer circle around each junction, plus intermediate
//!    points at a fixed spacing.
//! 4. [`tessellate`] computes a bounded Voronoi diagram over the source
//!    points.
//! 5. [`partition`] clips the cells against the footprint and merges them
//!    per owning edge into surface sections.
//! 6. [`evaluate`] compares section areas against reference data and can
//!    generate synthetic networks with analytically known decompositions.
//!
//! Geometry in [`geom`] is generic over the scalar type; the pipeline runs
//! on the `f64` aliases exported at the crate root. All coordinates are
//! planar meters in a projected system; no geodetic math is performed.

pub mod cli;
pub mod evaluate;
pub mod geom;
pub mod io;
pub mod partition;
pub mod roadgraph;
pub mod seeding;
pub mod tessellate;

/// Scalar type the pipeline runs on.
pub type Scalar = f64;

pub type Point2 = geom::Point2<Scalar>;
pub type Rect = geom::Rect<Scalar>;
pub type Polyline = geom::Polyline<Scalar>;
pub type Polygon = geom::Polygon<Scalar>;
pub type MultiPolygon = geom::MultiPolygon<Scalar>;

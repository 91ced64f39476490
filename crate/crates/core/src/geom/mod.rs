//! Planar geometry kernel: primitives, measures, predicates and polygon
//! boolean operations.
//!
//! Everything here works in planar meters. Values are immutable after
//! construction and all operations are pure functions, so the kernel is
//! safe to share across threads.

pub(crate) mod grid;
mod polygon;
mod polyline;
pub mod overlay;
mod predicates;
mod sample;

pub use overlay::{boolean, union_all, BoolKind};
pub use polygon::{area, polygon_area, MultiPolygon, Polygon, Ring};
pub use polyline::{circle_polyline_intersections, length, Polyline};
pub use predicates::{
    dist_point_segment, point_in_multipolygon, point_in_multipolygon_tol, point_in_polygon,
    point_in_polygon_tol, point_in_ring, point_in_ring_tol, segment_intersection, Containment,
    SegSeg,
};
pub use sample::sample_points_in;

use num_traits::{Float, NumCast};
use std::fmt::Debug;

/// Scalar bound for the generic kernel: `f32`, `f64` and friends.
pub trait GeomScalar: Float + NumCast + Debug + Copy + 'static {}
impl<T> GeomScalar for T where T: Float + NumCast + Debug + Copy + 'static {}

/// Distance below which two vertices are considered coincident.
///
/// This is numeric noise, not data noise; snapping of input data uses the
/// configurable tolerance in the road graph builder instead.
pub const MERGE_EPS: f64 = 1e-9;

/// Cast an `f64` constant into the kernel scalar.
#[inline]
pub(crate) fn cast<T: GeomScalar>(v: f64) -> T {
    T::from(v).expect("scalar cast")
}

/// Errors produced by geometry construction and operations.
#[derive(Debug, thiserror::Error)]
pub enum GeomError {
    #[error("coordinate is not finite: ({0}, {1})")]
    NonFinite(f64, f64),
    #[error("polyline needs at least 2 distinct vertices")]
    DegeneratePolyline,
    #[error("polyline has zero length")]
    ZeroLengthPolyline,
    #[error("ring needs at least 3 distinct vertices")]
    DegenerateRing,
    #[error("ring has zero area")]
    ZeroAreaRing,
    #[error("ring is self-intersecting and cannot be repaired")]
    SelfIntersection,
    #[error("hole lies outside the exterior ring")]
    HoleOutsideExterior,
    #[error("geometry is empty")]
    EmptyGeometry,
    #[error("topology error: {0}")]
    Topology(String),
    #[error("sample count must be at least 1")]
    BadSampleCount,
    #[error("envelope must be convex")]
    NonConvexEnvelope,
}

pub type GeomResult<T> = Result<T, GeomError>;

/// A point in the plane, coordinates in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2<T: GeomScalar> {
    pub x: T,
    pub y: T,
}

impl<T: GeomScalar> Point2<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Point2 { x, y }
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn dist_sq(&self, other: &Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(&self, other: &Self) -> T {
        self.dist_sq(other).sqrt()
    }

    /// Lexicographic order by `(x, y)`; total for finite coordinates.
    #[inline]
    pub fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.x
            .partial_cmp(&other.x)
            .unwrap()
            .then(self.y.partial_cmp(&other.y).unwrap())
    }

    /// Cross product of `(b - self)` and `(c - self)`.
    #[inline]
    pub fn cross(&self, b: &Self, c: &Self) -> T {
        (b.x - self.x) * (c.y - self.y) - (b.y - self.y) * (c.x - self.x)
    }

    #[inline]
    pub fn to_f64(&self) -> Point2<f64> {
        Point2 {
            x: self.x.to_f64().expect("finite coordinate"),
            y: self.y.to_f64().expect("finite coordinate"),
        }
    }
}

/// Axis-aligned bounding rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect<T: GeomScalar> {
    pub min: Point2<T>,
    pub max: Point2<T>,
}

impl<T: GeomScalar> Rect<T> {
    pub fn empty() -> Self {
        Rect {
            min: Point2::new(T::infinity(), T::infinity()),
            max: Point2::new(T::neg_infinity(), T::neg_infinity()),
        }
    }

    pub fn of_points<'a>(points: impl IntoIterator<Item = &'a Point2<T>>) -> Self
    where
        T: 'a,
    {
        let mut r = Rect::empty();
        for p in points {
            r.expand_to(p);
        }
        r
    }

    #[inline]
    pub fn expand_to(&mut self, p: &Point2<T>) {
        self.min.x = self.min.x.min(p.x);
        self.min.y = self.min.y.min(p.y);
        self.max.x = self.max.x.max(p.x);
        self.max.y = self.max.y.max(p.y);
    }

    pub fn merge(&self, other: &Rect<T>) -> Rect<T> {
        Rect {
            min: Point2::new(self.min.x.min(other.min.x), self.min.y.min(other.min.y)),
            max: Point2::new(self.max.x.max(other.max.x), self.max.y.max(other.max.y)),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.min.x > self.max.x || self.min.y > self.max.y
    }

    /// Grow the rectangle by `margin` on all four sides.
    pub fn expanded(&self, margin: T) -> Rect<T> {
        Rect {
            min: Point2::new(self.min.x - margin, self.min.y - margin),
            max: Point2::new(self.max.x + margin, self.max.y + margin),
        }
    }

    #[inline]
    pub fn intersects(&self, other: &Rect<T>) -> bool {
        self.min.x <= other.max.x
            && other.min.x <= self.max.x
            && self.min.y <= other.max.y
            && other.min.y <= self.max.y
    }

    #[inline]
    pub fn contains_point(&self, p: &Point2<T>) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn width(&self) -> T {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> T {
        self.max.y - self.min.y
    }

    /// Corner ring in counter-clockwise order.
    pub fn corners(&self) -> [Point2<T>; 4] {
        [
            self.min,
            Point2::new(self.max.x, self.min.y),
            self.max,
            Point2::new(self.min.x, self.max.y),
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_expand_and_intersect() {
        let a: Rect<f64> = Rect::of_points([Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)].iter());
        assert_eq!(a.expanded(2.0).min, Point2::new(-2.0, -2.0));
        assert_eq!(a.expanded(2.0).max, Point2::new(3.0, 3.0));
        let b = Rect::of_points([Point2::new(2.0, 2.0), Point2::new(3.0, 3.0)].iter());
        assert!(!a.intersects(&b));
        assert!(a.expanded(1.0).intersects(&b));
    }

    #[test]
    fn rect_generic_over_f32() {
        let r: Rect<f32> = Rect::of_points([Point2::new(0.0f32, 0.0), Point2::new(2.0, 4.0)].iter());
        assert_eq!(r.width(), 2.0f32);
        assert_eq!(r.height(), 4.0f32);
    }
}

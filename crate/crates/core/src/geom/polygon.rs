//! Rings, polygons and multi-polygons with normalized orientation.

use super::{cast, GeomError, GeomResult, GeomScalar, Point2, Rect, MERGE_EPS};

/// A closed ring stored without the repeated end vertex.
///
/// Rings are simple (non-self-intersecting) and have nonzero area. The
/// stored orientation is whatever the constructor was given; `Polygon`
/// normalizes exterior rings counter-clockwise and holes clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Ring<T: GeomScalar> {
    points: Vec<Point2<T>>,
}

impl<T: GeomScalar> Ring<T> {
    /// Validate and clean a ring: drops a repeated closing vertex,
    /// merges coincident consecutive vertices and removes zero-width
    /// spikes. Anything deeper (a proper self-intersection) is an error,
    /// not a silent repair.
    pub fn new(mut points: Vec<Point2<T>>) -> GeomResult<Self> {
        for p in &points {
            if !p.is_finite() {
                return Err(GeomError::NonFinite(
                    p.x.to_f64().unwrap_or(f64::NAN),
                    p.y.to_f64().unwrap_or(f64::NAN),
                ));
            }
        }
        let eps: T = cast(MERGE_EPS);
        if points.len() > 1 && points[0].dist(points.last().unwrap()) <= eps {
            points.pop();
        }
        // Merge coincident consecutive vertices and remove zero-width
        // spikes (a -> b -> back along b -> a); a removed spike can expose
        // new duplicates, so iterate to a fixed point.
        let spike_eps: T = cast(MERGE_EPS * MERGE_EPS);
        let mut cleaned = points;
        loop {
            let mut merged: Vec<Point2<T>> = Vec::with_capacity(cleaned.len());
            for p in cleaned {
                match merged.last() {
                    Some(prev) if prev.dist(&p) <= eps => {}
                    _ => merged.push(p),
                }
            }
            while merged.len() > 1 && merged[0].dist(merged.last().unwrap()) <= eps {
                merged.pop();
            }
            let mut changed = false;
            if merged.len() >= 3 {
                let n = merged.len();
                for i in 0..n {
                    let a = merged[(i + n - 1) % n];
                    let b = merged[i];
                    let c = merged[(i + 1) % n];
                    let cross = a.cross(&b, &c).abs();
                    let dot = (a.x - b.x) * (c.x - b.x) + (a.y - b.y) * (c.y - b.y);
                    if cross <= spike_eps && dot > T::zero() {
                        merged.remove(i);
                        changed = true;
                        break;
                    }
                }
            }
            cleaned = merged;
            if !changed {
                break;
            }
        }
        if cleaned.len() < 3 {
            return Err(GeomError::DegenerateRing);
        }
        let ring = Ring { points: cleaned };
        if ring.signed_area().abs() <= cast(MERGE_EPS * MERGE_EPS) {
            return Err(GeomError::ZeroAreaRing);
        }
        ring.check_simple()?;
        Ok(ring)
    }

    /// Build without validation. For internal use where the construction
    /// guarantees validity (overlay output, envelope rectangles).
    pub(crate) fn new_unchecked(points: Vec<Point2<T>>) -> Self {
        debug_assert!(points.len() >= 3);
        Ring { points }
    }

    #[inline]
    pub fn points(&self) -> &[Point2<T>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Shoelace sum: positive for counter-clockwise rings.
    pub fn signed_area(&self) -> T {
        let n = self.points.len();
        let mut acc = T::zero();
        for i in 0..n {
            let a = self.points[i];
            let b = self.points[(i + 1) % n];
            acc = acc + (a.x * b.y - b.x * a.y);
        }
        acc * cast(0.5)
    }

    pub fn is_ccw(&self) -> bool {
        self.signed_area() > T::zero()
    }

    pub fn reversed(&self) -> Ring<T> {
        let mut points = self.points.clone();
        points.reverse();
        Ring { points }
    }

    pub fn bbox(&self) -> Rect<T> {
        Rect::of_points(self.points.iter())
    }

    /// Segments of the ring, including the closing one.
    pub fn segments(&self) -> impl Iterator<Item = (Point2<T>, Point2<T>)> + '_ {
        let n = self.points.len();
        (0..n).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }

    fn check_simple(&self) -> GeomResult<()> {
        use super::predicates::{segment_intersection, SegSeg};
        let n = self.points.len();
        // Repeated vertices pinch the ring.
        for i in 0..n {
            for j in (i + 1)..n {
                if self.points[i].dist(&self.points[j]) <= cast(MERGE_EPS) {
                    return Err(GeomError::SelfIntersection);
                }
            }
        }
        let segs: Vec<(Point2<T>, Point2<T>)> = self.segments().collect();
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                match segment_intersection(segs[i].0, segs[i].1, segs[j].0, segs[j].1) {
                    SegSeg::None => {}
                    SegSeg::Point(p) => {
                        if adjacent {
                            // Shared vertex touch is fine.
                            let shared = if j == i + 1 { segs[i].1 } else { segs[i].0 };
                            if p.dist(&shared) > cast(MERGE_EPS) {
                                return Err(GeomError::SelfIntersection);
                            }
                        } else {
                            return Err(GeomError::SelfIntersection);
                        }
                    }
                    SegSeg::Overlap(_, _) => return Err(GeomError::SelfIntersection),
                }
            }
        }
        Ok(())
    }
}

/// A polygon: one exterior ring plus zero or more hole rings.
///
/// Orientation is normalized at construction: exterior counter-clockwise,
/// holes clockwise. Holes must lie inside the exterior.
#[derive(Debug, Clone, PartialEq)]
pub struct Polygon<T: GeomScalar> {
    exterior: Ring<T>,
    holes: Vec<Ring<T>>,
}

impl<T: GeomScalar> Polygon<T> {
    pub fn new(exterior: Ring<T>, holes: Vec<Ring<T>>) -> GeomResult<Self> {
        let exterior = if exterior.is_ccw() { exterior } else { exterior.reversed() };
        let mut fixed = Vec::with_capacity(holes.len());
        for hole in holes {
            let hole = if hole.is_ccw() { hole.reversed() } else { hole };
            for p in hole.points() {
                if super::predicates::point_in_ring(p, &exterior) == super::predicates::Containment::Outside {
                    return Err(GeomError::HoleOutsideExterior);
                }
            }
            fixed.push(hole);
        }
        Ok(Polygon { exterior, holes: fixed })
    }

    /// Convenience constructor from raw coordinate lists.
    pub fn from_coords(exterior: Vec<(T, T)>, holes: Vec<Vec<(T, T)>>) -> GeomResult<Self> {
        let ext = Ring::new(exterior.into_iter().map(|(x, y)| Point2::new(x, y)).collect())?;
        let hs = holes
            .into_iter()
            .map(|h| Ring::new(h.into_iter().map(|(x, y)| Point2::new(x, y)).collect()))
            .collect::<GeomResult<Vec<_>>>()?;
        Polygon::new(ext, hs)
    }

    pub(crate) fn new_unchecked(exterior: Ring<T>, holes: Vec<Ring<T>>) -> Self {
        Polygon { exterior, holes }
    }

    /// Axis-aligned rectangle polygon.
    pub fn rect(r: &Rect<T>) -> Polygon<T> {
        Polygon {
            exterior: Ring::new_unchecked(r.corners().to_vec()),
            holes: Vec::new(),
        }
    }

    #[inline]
    pub fn exterior(&self) -> &Ring<T> {
        &self.exterior
    }

    #[inline]
    pub fn holes(&self) -> &[Ring<T>] {
        &self.holes
    }

    /// Exterior area minus hole areas.
    pub fn area(&self) -> T {
        let mut a = self.exterior.signed_area().abs();
        for h in &self.holes {
            a = a - h.signed_area().abs();
        }
        a
    }

    pub fn bbox(&self) -> Rect<T> {
        self.exterior.bbox()
    }

    pub fn rings(&self) -> impl Iterator<Item = &Ring<T>> {
        std::iter::once(&self.exterior).chain(self.holes.iter())
    }

    /// Whether all vertices of consecutive convex turns (no reflex corner).
    pub fn is_convex(&self, tol: T) -> bool {
        if !self.holes.is_empty() {
            return false;
        }
        let pts = self.exterior.points();
        let n = pts.len();
        for i in 0..n {
            let a = pts[i];
            let b = pts[(i + 1) % n];
            let c = pts[(i + 2) % n];
            if a.cross(&b, &c) < -tol {
                return false;
            }
        }
        true
    }
}

/// A set of disjoint polygons; may be empty.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MultiPolygon<T: GeomScalar> {
    polygons: Vec<Polygon<T>>,
}

impl<T: GeomScalar> MultiPolygon<T> {
    pub fn new(polygons: Vec<Polygon<T>>) -> Self {
        MultiPolygon { polygons }
    }

    pub fn empty() -> Self {
        MultiPolygon { polygons: Vec::new() }
    }

    pub fn from_polygon(p: Polygon<T>) -> Self {
        MultiPolygon { polygons: vec![p] }
    }

    #[inline]
    pub fn polygons(&self) -> &[Polygon<T>] {
        &self.polygons
    }

    pub fn is_empty(&self) -> bool {
        self.polygons.is_empty()
    }

    pub fn len(&self) -> usize {
        self.polygons.len()
    }

    pub fn area(&self) -> T {
        self.polygons.iter().fold(T::zero(), |acc, p| acc + p.area())
    }

    pub fn bbox(&self) -> Rect<T> {
        let mut r = Rect::empty();
        for p in &self.polygons {
            r = r.merge(&p.bbox());
        }
        r
    }

    pub fn rings(&self) -> impl Iterator<Item = &Ring<T>> {
        self.polygons.iter().flat_map(|p| p.rings())
    }
}

/// Shoelace area of a polygon, holes subtracted.
pub fn polygon_area<T: GeomScalar>(p: &Polygon<T>) -> T {
    p.area()
}

/// Total area of a multi-polygon; parts summed, holes subtracted.
pub fn area<T: GeomScalar>(g: &MultiPolygon<T>) -> T {
    g.area()
}

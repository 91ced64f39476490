//! Point containment and segment intersection tests.

use super::{cast, GeomScalar, MultiPolygon, Point2, Polygon, Ring, MERGE_EPS};

/// Result of a point-in-region query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Containment {
    Inside,
    Boundary,
    Outside,
}

/// Distance from `p` to the segment `(a, b)`.
pub fn dist_point_segment<T: GeomScalar>(p: &Point2<T>, a: &Point2<T>, b: &Point2<T>) -> T {
    let dx = b.x - a.x;
    let dy = b.y - a.y;
    let len_sq = dx * dx + dy * dy;
    if len_sq == T::zero() {
        return p.dist(a);
    }
    let t = ((p.x - a.x) * dx + (p.y - a.y) * dy) / len_sq;
    let t = t.max(T::zero()).min(T::one());
    p.dist(&Point2::new(a.x + dx * t, a.y + dy * t))
}

/// Even-odd containment of `p` in a single ring, with a boundary band of
/// width `tol`.
pub fn point_in_ring_tol<T: GeomScalar>(p: &Point2<T>, ring: &Ring<T>, tol: T) -> Containment {
    for (a, b) in ring.segments() {
        if dist_point_segment(p, &a, &b) <= tol {
            return Containment::Boundary;
        }
    }
    let mut crossings = 0u32;
    for (a, b) in ring.segments() {
        if (a.y > p.y) != (b.y > p.y) {
            let xi = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if xi > p.x {
                crossings += 1;
            }
        }
    }
    if crossings % 2 == 1 {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

pub fn point_in_ring<T: GeomScalar>(p: &Point2<T>, ring: &Ring<T>) -> Containment {
    point_in_ring_tol(p, ring, cast(MERGE_EPS))
}

/// Containment of `p` in a polygon with holes (boundary band `tol`).
pub fn point_in_polygon_tol<T: GeomScalar>(p: &Point2<T>, poly: &Polygon<T>, tol: T) -> Containment {
    let mut crossings = 0u32;
    for ring in poly.rings() {
        for (a, b) in ring.segments() {
            if dist_point_segment(p, &a, &b) <= tol {
                return Containment::Boundary;
            }
            if (a.y > p.y) != (b.y > p.y) {
                let xi = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if xi > p.x {
                    crossings += 1;
                }
            }
        }
    }
    if crossings % 2 == 1 {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

pub fn point_in_polygon<T: GeomScalar>(p: &Point2<T>, poly: &Polygon<T>) -> Containment {
    point_in_polygon_tol(p, poly, cast(MERGE_EPS))
}

/// Containment of `p` in a multi-polygon (boundary band `tol`).
pub fn point_in_multipolygon_tol<T: GeomScalar>(
    p: &Point2<T>,
    g: &MultiPolygon<T>,
    tol: T,
) -> Containment {
    let mut inside = false;
    for poly in g.polygons() {
        match point_in_polygon_tol(p, poly, tol) {
            Containment::Boundary => return Containment::Boundary,
            Containment::Inside => inside = true,
            Containment::Outside => {}
        }
    }
    if inside {
        Containment::Inside
    } else {
        Containment::Outside
    }
}

pub fn point_in_multipolygon<T: GeomScalar>(p: &Point2<T>, g: &MultiPolygon<T>) -> Containment {
    point_in_multipolygon_tol(p, g, cast(MERGE_EPS))
}

/// Result of intersecting two closed segments.
#[derive(Debug, Clone, PartialEq)]
pub enum SegSeg<T: GeomScalar> {
    None,
    /// Single intersection point (proper crossing or touch).
    Point(Point2<T>),
    /// Collinear overlap of positive length.
    Overlap(Point2<T>, Point2<T>),
}

/// Intersection of segments `(a, b)` and `(c, d)`.
pub fn segment_intersection<T: GeomScalar>(
    a: Point2<T>,
    b: Point2<T>,
    c: Point2<T>,
    d: Point2<T>,
) -> SegSeg<T> {
    let o1 = a.cross(&b, &c);
    let o2 = a.cross(&b, &d);
    let o3 = c.cross(&d, &a);
    let o4 = c.cross(&d, &b);
    let zero = T::zero();

    if o1 == zero && o2 == zero {
        // Collinear: project on dominant axis.
        let use_x = (b.x - a.x).abs() >= (b.y - a.y).abs();
        let key = |p: &Point2<T>| if use_x { p.x } else { p.y };
        let (amin, amax) = minmax(key(&a), key(&b));
        let (cmin, cmax) = minmax(key(&c), key(&d));
        let lo = amin.max(cmin);
        let hi = amax.min(cmax);
        if lo > hi {
            return SegSeg::None;
        }
        let pick = |k: T| -> Point2<T> {
            for p in [&a, &b, &c, &d] {
                if key(p) == k {
                    return *p;
                }
            }
            unreachable!("overlap bound must be an endpoint")
        };
        if lo == hi {
            return SegSeg::Point(pick(lo));
        }
        return SegSeg::Overlap(pick(lo), pick(hi));
    }

    let straddle1 = (o1 > zero) != (o2 > zero) || o1 == zero || o2 == zero;
    let straddle2 = (o3 > zero) != (o4 > zero) || o3 == zero || o4 == zero;
    if !(straddle1 && straddle2) {
        return SegSeg::None;
    }
    // Touch at an endpoint of one segment.
    if o1 == zero && on_segment(&a, &b, &c) {
        return SegSeg::Point(c);
    }
    if o2 == zero && on_segment(&a, &b, &d) {
        return SegSeg::Point(d);
    }
    if o3 == zero && on_segment(&c, &d, &a) {
        return SegSeg::Point(a);
    }
    if o4 == zero && on_segment(&c, &d, &b) {
        return SegSeg::Point(b);
    }
    if (o1 > zero) != (o2 > zero) && (o3 > zero) != (o4 > zero) {
        // Proper crossing.
        let denom = o4 - o3;
        let t = -o3 / denom;
        return SegSeg::Point(Point2::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t));
    }
    SegSeg::None
}

fn on_segment<T: GeomScalar>(a: &Point2<T>, b: &Point2<T>, p: &Point2<T>) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn minmax<T: GeomScalar>(a: T, b: T) -> (T, T) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

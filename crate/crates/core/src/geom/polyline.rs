//! Open polylines and arclength arithmetic along them.

use super::{cast, GeomError, GeomResult, GeomScalar, Point2, Rect, MERGE_EPS};

/// An open polyline with at least two vertices and positive length.
///
/// Consecutive vertices are guaranteed distinct (farther apart than the
/// merge epsilon); construction rejects degenerate input.
#[derive(Debug, Clone, PartialEq)]
pub struct Polyline<T: GeomScalar> {
    points: Vec<Point2<T>>,
}

impl<T: GeomScalar> Polyline<T> {
    pub fn new(points: Vec<Point2<T>>) -> GeomResult<Self> {
        if points.len() < 2 {
            return Err(GeomError::DegeneratePolyline);
        }
        let eps: T = cast(MERGE_EPS);
        let mut cleaned: Vec<Point2<T>> = Vec::with_capacity(points.len());
        for p in points {
            if !p.is_finite() {
                return Err(GeomError::NonFinite(
                    p.x.to_f64().unwrap_or(f64::NAN),
                    p.y.to_f64().unwrap_or(f64::NAN),
                ));
            }
            match cleaned.last() {
                Some(prev) if prev.dist(&p) <= eps => {}
                _ => cleaned.push(p),
            }
        }
        if cleaned.len() < 2 {
            return Err(GeomError::ZeroLengthPolyline);
        }
        Ok(Polyline { points: cleaned })
    }

    #[inline]
    pub fn points(&self) -> &[Point2<T>] {
        &self.points
    }

    #[inline]
    pub fn first(&self) -> Point2<T> {
        self.points[0]
    }

    #[inline]
    pub fn last(&self) -> Point2<T> {
        *self.points.last().unwrap()
    }

    /// Sum of segment Euclidean lengths.
    pub fn length(&self) -> T {
        self.points
            .windows(2)
            .fold(T::zero(), |acc, w| acc + w[0].dist(&w[1]))
    }

    pub fn bbox(&self) -> Rect<T> {
        Rect::of_points(self.points.iter())
    }

    /// Same geometry walked from the other end.
    pub fn reversed(&self) -> Polyline<T> {
        let mut points = self.points.clone();
        points.reverse();
        Polyline { points }
    }

    /// Point at the given arclength from the start, clamped to the ends.
    pub fn point_at_arclength(&self, s: T) -> Point2<T> {
        if s <= T::zero() {
            return self.first();
        }
        let mut acc = T::zero();
        for w in self.points.windows(2) {
            let seg = w[0].dist(&w[1]);
            if acc + seg >= s {
                let t = (s - acc) / seg;
                return Point2::new(w[0].x + (w[1].x - w[0].x) * t, w[0].y + (w[1].y - w[0].y) * t);
            }
            acc = acc + seg;
        }
        self.last()
    }

    /// Replace the first and last vertex, keeping interior vertices.
    ///
    /// Used by the graph builder to pin edge geometry onto snapped node
    /// positions. Returns an error if the adjusted line collapses.
    pub fn with_endpoints(&self, start: Point2<T>, end: Point2<T>) -> GeomResult<Polyline<T>> {
        let mut pts = self.points.clone();
        pts[0] = start;
        let n = pts.len();
        pts[n - 1] = end;
        Polyline::new(pts)
    }

    /// All points of the polyline at exactly `radius` from `center`,
    /// deduplicated and ordered by arclength. Each entry carries the
    /// arclength at which it occurs.
    pub fn circle_intersections_with_arclength(
        &self,
        center: Point2<T>,
        radius: T,
    ) -> Vec<(T, Point2<T>)> {
        assert!(radius > T::zero(), "radius must be positive");
        let mut out: Vec<(T, Point2<T>)> = Vec::new();
        let eps: T = cast(MERGE_EPS);
        let mut acc = T::zero();
        for w in self.points.windows(2) {
            let (a, b) = (w[0], w[1]);
            let seg_len = a.dist(&b);
            // Solve |a + t (b - a) - c|^2 = r^2 for t in [0, 1].
            let dx = b.x - a.x;
            let dy = b.y - a.y;
            let fx = a.x - center.x;
            let fy = a.y - center.y;
            let qa = dx * dx + dy * dy;
            let qb = (fx * dx + fy * dy) * cast(2.0);
            let qc = fx * fx + fy * fy - radius * radius;
            let disc = qb * qb - qa * qc * cast(4.0);
            if disc >= T::zero() {
                let sq = disc.sqrt();
                let two_a = qa * cast(2.0);
                let mut roots = [(-qb - sq) / two_a, (-qb + sq) / two_a];
                if roots[0] > roots[1] {
                    roots.swap(0, 1);
                }
                for (i, t) in roots.into_iter().enumerate() {
                    if i == 1 && sq == T::zero() {
                        continue; // tangent: single root
                    }
                    if t < -cast::<T>(1e-12) || t > T::one() + cast(1e-12) {
                        continue;
                    }
                    let t = t.max(T::zero()).min(T::one());
                    let p = Point2::new(a.x + dx * t, a.y + dy * t);
                    let s = acc + seg_len * t;
                    match out.last() {
                        Some((_, last)) if last.dist(&p) <= eps => {}
                        _ => out.push((s, p)),
                    }
                }
            }
            acc = acc + seg_len;
        }
        out
    }

    /// Length of the polyline falling inside the closed region bounded by the
    /// given rings (even-odd rule). Used for line-versus-polygon overlap
    /// measures; crossings are located per segment, so accuracy is limited by
    /// plain double arithmetic, which is ample for overlap fractions.
    pub fn length_inside<F>(&self, inside: F, crossing_ts: impl Fn(Point2<T>, Point2<T>) -> Vec<T>) -> T
    where
        F: Fn(&Point2<T>) -> bool,
    {
        let half = cast::<T>(0.5);
        let mut total = T::zero();
        for w in self.points.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mut ts = crossing_ts(a, b);
            ts.push(T::zero());
            ts.push(T::one());
            ts.sort_by(|p, q| p.partial_cmp(q).unwrap());
            ts.dedup_by(|p, q| (*p - *q).abs() <= cast(1e-12));
            let seg_len = a.dist(&b);
            for pair in ts.windows(2) {
                let (t0, t1) = (pair[0], pair[1]);
                let tm = (t0 + t1) * half;
                let mid = Point2::new(a.x + (b.x - a.x) * tm, a.y + (b.y - a.y) * tm);
                if inside(&mid) {
                    total = total + seg_len * (t1 - t0);
                }
            }
        }
        total
    }
}

/// Sum of segment Euclidean lengths of `p`.
pub fn length<T: GeomScalar>(p: &Polyline<T>) -> T {
    p.length()
}

/// All points of `p` at exactly `radius` from `center`, deduplicated and
/// ordered by arclength along `p`. Empty when the circle misses the line.
pub fn circle_polyline_intersections<T: GeomScalar>(
    center: Point2<T>,
    radius: T,
    p: &Polyline<T>,
) -> Vec<Point2<T>> {
    p.circle_intersections_with_arclength(center, radius)
        .into_iter()
        .map(|(_, p)| p)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::Point2;
    use super::*;

    fn pl(pts: &[(f64, f64)]) -> Polyline<f64> {
        Polyline::new(pts.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn length_of_3_4_5_triangle_leg() {
        assert_eq!(pl(&[(0.0, 0.0), (3.0, 4.0)]).length(), 5.0);
    }

    #[test]
    fn length_axis_aligned_sum() {
        assert_eq!(pl(&[(0.0, 0.0), (10.0, 0.0), (10.0, 10.0)]).length(), 20.0);
    }

    #[test]
    fn degenerate_two_vertex_rejected() {
        let r = Polyline::new(vec![Point2::new(1.0, 1.0), Point2::new(1.0, 1.0)]);
        assert!(r.is_err());
    }

    #[test]
    fn non_finite_rejected() {
        let r = Polyline::new(vec![Point2::new(f64::NAN, 0.0), Point2::new(1.0, 1.0)]);
        assert!(matches!(r, Err(GeomError::NonFinite(_, _))));
    }

    #[test]
    fn circle_hits_ray_once() {
        let hits = circle_polyline_intersections(Point2::new(0.0, 0.0), 5.0, &pl(&[(0.0, 0.0), (20.0, 0.0)]));
        assert_eq!(hits, vec![Point2::new(5.0, 0.0)]);
    }

    #[test]
    fn circle_hits_chord_twice_ordered() {
        let hits = circle_polyline_intersections(Point2::new(0.0, 0.0), 5.0, &pl(&[(-20.0, 0.0), (20.0, 0.0)]));
        assert_eq!(hits, vec![Point2::new(-5.0, 0.0), Point2::new(5.0, 0.0)]);
    }

    #[test]
    fn circle_misses_disjoint_line() {
        let hits = circle_polyline_intersections(Point2::new(0.0, 0.0), 5.0, &pl(&[(10.0, 10.0), (20.0, 10.0)]));
        assert!(hits.is_empty());
    }

    #[test]
    fn circle_tangent_reports_single_point() {
        let hits = circle_polyline_intersections(Point2::new(0.0, 0.0), 5.0, &pl(&[(-10.0, 5.0), (10.0, 5.0)]));
        assert_eq!(hits.len(), 1);
        assert!((hits[0].dist(&Point2::new(0.0, 5.0))) < 1e-9);
    }

    #[test]
    fn vertex_on_circle_not_duplicated() {
        // Vertex exactly at distance 5: both adjacent segments report it once.
        let hits = circle_polyline_intersections(Point2::new(0.0, 0.0), 5.0, &pl(&[(0.0, 0.0), (5.0, 0.0), (10.0, 0.0)]));
        assert_eq!(hits, vec![Point2::new(5.0, 0.0)]);
    }

    #[test]
    fn arclength_walk() {
        let p = pl(&[(0.0, 0.0), (10.0, 0.0), (10.0, 10.0)]);
        assert_eq!(p.point_at_arclength(15.0), Point2::new(10.0, 5.0));
        assert_eq!(p.point_at_arclength(0.0), Point2::new(0.0, 0.0));
        assert_eq!(p.point_at_arclength(99.0), Point2::new(10.0, 10.0));
    }
}

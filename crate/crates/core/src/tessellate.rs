//! Bounded Voronoi diagram over the source points.
//!
//! Each cell is carved from the envelope by half-plane clipping against
//! the perpendicular bisectors of nearby sites, processed in canonical
//! (distance, id) order with a security-radius stop: once every remaining
//! site is farther than twice the cell's current reach, no bisector can
//! cut it.
//!
//! Created vertices are recomputed from their defining geometry (the
//! circumcenter of a seed triple, or a bisector-envelope crossing) with
//! arguments in canonical id order. Adjacent cells therefore carry
//! bitwise-identical shared boundaries, which keeps downstream clipping
//! conservation errors at the floating-point floor.

use crate::geom::grid::GridIndex;
use crate::geom::{cast, GeomScalar, Ring, MERGE_EPS};
use crate::geom::{Point2 as GPoint2, Polygon as GPolygon};
use crate::seeding::{SourcePoint, SourcePointId};
use crate::{MultiPolygon, Point2, Polygon, Scalar};

#[derive(Debug, thiserror::Error)]
pub enum TessellateError {
    #[error("at least one seed is required")]
    NoSeeds,
    #[error("seed {0} lies outside the envelope")]
    SeedOutsideEnvelope(usize),
    #[error("seeds {0} and {1} coincide; merge duplicates upstream")]
    DuplicateSeeds(usize, usize),
    #[error("envelope must be a convex polygon without holes")]
    NonConvexEnvelope,
    #[error("footprint is empty")]
    EmptyFootprint,
    #[error("margin must be non-negative")]
    BadMargin,
    #[error("cell of seed {0} degenerated")]
    DegenerateCell(usize),
}

/// One convex cell per seed.
#[derive(Debug, Clone)]
pub struct VoronoiCell {
    pub seed: SourcePointId,
    pub polygon: Polygon,
}

/// A bounded Voronoi diagram: cells partition the envelope.
#[derive(Debug, Clone)]
pub struct VoronoiDiagram {
    pub cells: Vec<VoronoiCell>,
    pub envelope: Polygon,
}

/// Axis-aligned bounding rectangle of the footprint expanded by `margin`.
pub fn envelope_for(footprint: &MultiPolygon, margin: Scalar) -> Result<Polygon, TessellateError> {
    if footprint.is_empty() {
        return Err(TessellateError::EmptyFootprint);
    }
    if !(margin >= 0.0) {
        return Err(TessellateError::BadMargin);
    }
    Ok(Polygon::rect(&footprint.bbox().expanded(margin)))
}

/// Compute the Voronoi diagram of the given seeds, cells clipped by the
/// envelope. Seeds must be pairwise distinct and strictly inside the
/// envelope.
pub fn voronoi(seeds: &[SourcePoint], envelope: &Polygon) -> Result<VoronoiDiagram, TessellateError> {
    // Canonical processing order is ascending seed id, so cell geometry is
    // independent of the input permutation.
    let mut order: Vec<usize> = (0..seeds.len()).collect();
    order.sort_by_key(|&i| seeds[i].id);
    let sites: Vec<Point2> = order.iter().map(|&i| seeds[i].position).collect();
    let polys = voronoi_cells(&sites, envelope)?;
    let mut cells: Vec<VoronoiCell> = order
        .iter()
        .zip(polys)
        .map(|(&i, polygon)| VoronoiCell {
            seed: seeds[i].id,
            polygon,
        })
        .collect();
    cells.sort_by_key(|c| c.seed);
    Ok(VoronoiDiagram {
        cells,
        envelope: envelope.clone(),
    })
}

/// Line source of a cell edge: an envelope edge or a site bisector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Src {
    Env(u32),
    Bis(u32, u32),
}

#[derive(Debug, Clone)]
struct CellVert<T: GeomScalar> {
    pt: GPoint2<T>,
    /// Source line of the edge leaving this vertex.
    src: Src,
}

/// Generic cell computation: one convex polygon per site, in input order.
/// Site indices are the canonical ids for tie-breaking.
pub fn voronoi_cells<T: GeomScalar>(
    sites: &[GPoint2<T>],
    envelope: &GPolygon<T>,
) -> Result<Vec<GPolygon<T>>, TessellateError> {
    if sites.is_empty() {
        return Err(TessellateError::NoSeeds);
    }
    if !envelope.is_convex(cast(0.0)) {
        return Err(TessellateError::NonConvexEnvelope);
    }
    for (i, s) in sites.iter().enumerate() {
        if crate::geom::point_in_polygon_tol(&s.to_f64(), &cast_poly_f64(envelope), MERGE_EPS)
            != crate::geom::Containment::Inside
        {
            return Err(TessellateError::SeedOutsideEnvelope(i));
        }
    }

    // Spatial index over sites (f64 buckets are only used for candidate
    // gathering, never for geometry).
    let sites64: Vec<GPoint2<f64>> = sites.iter().map(|p| p.to_f64()).collect();
    let bbox = envelope.bbox();
    let (w, h) = (
        bbox.width().to_f64().unwrap(),
        bbox.height().to_f64().unwrap(),
    );
    let mean_spacing = ((w * h).max(1e-12) / sites.len() as f64).sqrt();
    let mut grid = GridIndex::new(mean_spacing.max(1e-6));
    for (i, p) in sites64.iter().enumerate() {
        grid.insert_point(i as u32, p);
    }
    // Duplicate detection.
    for (i, p) in sites64.iter().enumerate() {
        for j in grid.query_within(p, MERGE_EPS) {
            let j = j as usize;
            if j > i && p.dist(&sites64[j]) <= MERGE_EPS {
                return Err(TessellateError::DuplicateSeeds(i, j));
            }
        }
    }

    let diameter = (w * w + h * h).sqrt();
    let env_pts = envelope.exterior().points();

    let mut cells = Vec::with_capacity(sites.len());
    for s in 0..sites.len() {
        let cell = build_cell(s, sites, &sites64, env_pts, &grid, mean_spacing, diameter)?;
        cells.push(cell);
    }
    weld_shared_vertices(&mut cells);
    Ok(cells)
}

/// Snap coincident vertices across cells to one representative.
///
/// Where four or more sites are cocircular (street grids produce such
/// rectangles constantly) the meeting vertex is derived from different
/// site triples by different cells and the results disagree at the
/// floating-point level. Mapping every vertex to the lexicographic
/// minimum of its 1e-9 neighborhood restores bitwise-shared boundaries.
fn weld_shared_vertices<T: GeomScalar>(cells: &mut [GPolygon<T>]) {
    let mut points: Vec<GPoint2<T>> = Vec::new();
    let mut mirrors: Vec<Point2> = Vec::new();
    for cell in cells.iter() {
        for p in cell.exterior().points() {
            points.push(*p);
            mirrors.push(p.to_f64());
        }
    }
    let mut grid = GridIndex::new(1e-6);
    for (i, m) in mirrors.iter().enumerate() {
        grid.insert_point(i as u32, m);
    }
    let canonical = |p: &GPoint2<T>, m: &Point2| -> GPoint2<T> {
        let mut best = *p;
        for j in grid.query_within(m, MERGE_EPS) {
            let j = j as usize;
            if mirrors[j].dist(m) <= MERGE_EPS
                && points[j].lex_cmp(&best) == std::cmp::Ordering::Less
            {
                best = points[j];
            }
        }
        best
    };
    for cell in cells.iter_mut() {
        let welded: Vec<GPoint2<T>> = cell
            .exterior()
            .points()
            .iter()
            .map(|p| canonical(p, &p.to_f64()))
            .collect();
        let mut cleaned: Vec<GPoint2<T>> = Vec::with_capacity(welded.len());
        for p in welded {
            if cleaned.last() != Some(&p) {
                cleaned.push(p);
            }
        }
        while cleaned.len() > 1 && cleaned.first() == cleaned.last() {
            cleaned.pop();
        }
        if cleaned.len() >= 3 {
            *cell = GPolygon::new_unchecked(Ring::new_unchecked(cleaned), Vec::new());
        }
    }
}

fn cast_poly_f64<T: GeomScalar>(p: &GPolygon<T>) -> GPolygon<f64> {
    let ext = Ring::new_unchecked(p.exterior().points().iter().map(|q| q.to_f64()).collect());
    let holes = p
        .holes()
        .iter()
        .map(|h| Ring::new_unchecked(h.points().iter().map(|q| q.to_f64()).collect()))
        .collect();
    Polygon::new_unchecked(ext, holes)
}

fn build_cell<T: GeomScalar>(
    s: usize,
    sites: &[GPoint2<T>],
    sites64: &[GPoint2<f64>],
    env_pts: &[GPoint2<T>],
    grid: &GridIndex,
    mean_spacing: f64,
    diameter: f64,
) -> Result<GPolygon<T>, TessellateError> {
    let site64 = sites64[s];
    let mut radius = (2.0 * mean_spacing).min(diameter);
    loop {
        // Candidates in canonical (distance, id) order.
        let mut cands: Vec<(f64, usize)> = grid
            .query_within(&site64, radius)
            .into_iter()
            .map(|j| j as usize)
            .filter(|&j| j != s)
            .map(|j| (site64.dist_sq(&sites64[j]), j))
            .filter(|&(d, _)| d <= radius * radius)
            .collect();
        cands.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

        let mut cell: Vec<CellVert<T>> = env_pts
            .iter()
            .enumerate()
            .map(|(k, p)| CellVert {
                pt: *p,
                src: Src::Env(k as u32),
            })
            .collect();
        for &(_, t) in &cands {
            cell = clip_by_bisector(cell, s, t, sites, env_pts);
            if cell.len() < 3 {
                return Err(TessellateError::DegenerateCell(s));
            }
        }

        let reach = cell
            .iter()
            .map(|v| site64.dist(&v.pt.to_f64()))
            .fold(0.0f64, f64::max);
        if radius >= 2.0 * reach || radius >= diameter {
            let verts = weld(cell);
            if verts.len() < 3 {
                return Err(TessellateError::DegenerateCell(s));
            }
            return Ok(GPolygon::new_unchecked(Ring::new_unchecked(verts), Vec::new()));
        }
        radius = (2.0 * reach).max(radius * 2.0).min(diameter) * (1.0 + 1e-9);
    }
}

/// Clip the cell of site `s` by the bisector against site `t`, keeping the
/// side of `s`. Created vertices are recomputed canonically from their
/// defining lines.
fn clip_by_bisector<T: GeomScalar>(
    cell: Vec<CellVert<T>>,
    s: usize,
    t: usize,
    sites: &[GPoint2<T>],
    env_pts: &[GPoint2<T>],
) -> Vec<CellVert<T>> {
    let (lo, hi) = (s.min(t), s.max(t));
    let (nx, ny, c) = bisector_line(sites, lo, hi);
    // Keep f(p) <= 0 for the lower site, >= 0 for the higher one.
    let side: T = if s == lo { T::one() } else { -T::one() };
    let f = |p: &GPoint2<T>| (nx * p.x + ny * p.y - c) * side;

    let plane_src = Src::Bis(lo as u32, hi as u32);
    let n = cell.len();
    let mut out: Vec<CellVert<T>> = Vec::with_capacity(n + 2);
    for k in 0..n {
        let v = &cell[k];
        let wv = &cell[(k + 1) % n];
        let fv = f(&v.pt);
        let fw = f(&wv.pt);
        let zero = T::zero();
        if fv <= zero {
            let mut keep = v.clone();
            if fv == zero && fw > zero {
                // The boundary turns onto the bisector at this vertex.
                keep.src = plane_src;
            }
            out.push(keep);
        }
        if (fv < zero && fw > zero) || (fv > zero && fw < zero) {
            let pt = canonical_crossing(v.src, lo, hi, sites, env_pts);
            let src = if fv < zero { plane_src } else { v.src };
            out.push(CellVert { pt, src });
        }
    }
    out
}

/// Intersection of a cell edge's source line with the bisector of
/// `(lo, hi)`, computed from canonical arguments only.
fn canonical_crossing<T: GeomScalar>(
    edge_src: Src,
    lo: usize,
    hi: usize,
    sites: &[GPoint2<T>],
    env_pts: &[GPoint2<T>],
) -> GPoint2<T> {
    match edge_src {
        Src::Env(k) => {
            let a = env_pts[k as usize];
            let b = env_pts[(k as usize + 1) % env_pts.len()];
            let (nx, ny, c) = bisector_line(sites, lo, hi);
            let da = nx * a.x + ny * a.y - c;
            let db = nx * b.x + ny * b.y - c;
            let t = da / (da - db);
            GPoint2::new(a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t)
        }
        Src::Bis(a, b) => {
            // Two bisectors of the same cell share its site: the crossing
            // is the circumcenter of the three distinct sites involved.
            let mut ids = [a as usize, b as usize, lo, hi];
            ids.sort_unstable();
            let mut uniq = Vec::with_capacity(3);
            for id in ids {
                if uniq.last() != Some(&id) {
                    uniq.push(id);
                }
            }
            debug_assert_eq!(uniq.len(), 3, "bisector pair must span three sites");
            circumcenter(sites[uniq[0]], sites[uniq[1]], sites[uniq[2]])
        }
    }
}

/// Bisector of sites `lo < hi` as the line `n . p = c` with `n = hi - lo`.
fn bisector_line<T: GeomScalar>(sites: &[GPoint2<T>], lo: usize, hi: usize) -> (T, T, T) {
    let a = sites[lo];
    let b = sites[hi];
    let nx = b.x - a.x;
    let ny = b.y - a.y;
    let half: T = cast(0.5);
    let c = nx * (a.x + b.x) * half + ny * (a.y + b.y) * half;
    (nx, ny, c)
}

/// Circumcenter in a local frame anchored at `a`, which avoids the
/// catastrophic cancellation the global form suffers when coordinates are
/// large relative to the triangle.
fn circumcenter<T: GeomScalar>(a: GPoint2<T>, b: GPoint2<T>, c: GPoint2<T>) -> GPoint2<T> {
    let two: T = cast(2.0);
    let bx = b.x - a.x;
    let by = b.y - a.y;
    let cx = c.x - a.x;
    let cy = c.y - a.y;
    let d = two * (bx * cy - by * cx);
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    GPoint2::new(a.x + ux, a.y + uy)
}

/// Merge runs of coincident vertices, keeping the lexicographically
/// smallest representative so adjacent cells stay consistent.
fn weld<T: GeomScalar>(cell: Vec<CellVert<T>>) -> Vec<GPoint2<T>> {
    let eps: T = cast(MERGE_EPS);
    let n = cell.len();
    let mut keep: Vec<GPoint2<T>> = Vec::with_capacity(n);
    for v in &cell {
        match keep.last() {
            Some(prev) if prev.dist(&v.pt) <= eps => {
                if v.pt.lex_cmp(prev) == std::cmp::Ordering::Less {
                    *keep.last_mut().unwrap() = v.pt;
                }
            }
            _ => keep.push(v.pt),
        }
    }
    while keep.len() > 1 && keep[0].dist(keep.last().unwrap()) <= eps {
        let last = keep.pop().unwrap();
        if last.lex_cmp(&keep[0]) == std::cmp::Ordering::Less {
            keep[0] = last;
        }
    }
    keep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{point_in_polygon, Containment};
    use crate::seeding::{SourceKind, SourcePoint};
    use crate::roadgraph::EdgeId;

    fn seed(id: u64, x: f64, y: f64) -> SourcePoint {
        SourcePoint {
            id: SourcePointId(id),
            position: Point2::new(x, y),
            owner_edge: EdgeId(format!("e{id}")),
            kind: SourceKind::Intermediate,
            origin_node: None,
            arclength: 0.0,
        }
    }

    fn big_square(half: f64) -> Polygon {
        Polygon::from_coords(
            vec![(-half, -half), (half, -half), (half, half), (-half, half)],
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn single_seed_owns_envelope() {
        let env = big_square(10.0);
        let d = voronoi(&[seed(0, 1.0, 2.0)], &env).unwrap();
        assert_eq!(d.cells.len(), 1);
        assert_eq!(d.cells[0].polygon.area(), env.area());
    }

    #[test]
    fn two_seeds_split_on_bisector() {
        let env = big_square(10.0);
        let d = voronoi(&[seed(0, -1.0, 0.0), seed(1, 1.0, 0.0)], &env).unwrap();
        assert_eq!(d.cells.len(), 2);
        for cell in &d.cells {
            assert_eq!(cell.polygon.area(), 200.0);
            // Every cell vertex is either at x = 0 or on the envelope.
            for v in cell.polygon.exterior().points() {
                assert!(v.x == 0.0 || v.x.abs() == 10.0);
            }
        }
    }

    #[test]
    fn cross_buffer_seeds_meet_on_diagonals() {
        let env = big_square(30.0);
        let seeds = [
            seed(0, 5.0, 0.0),
            seed(1, -5.0, 0.0),
            seed(2, 0.0, 5.0),
            seed(3, 0.0, -5.0),
        ];
        let d = voronoi(&seeds, &env).unwrap();
        for cell in &d.cells {
            // All four cells meet at the origin exactly.
            assert!(cell
                .polygon
                .exterior()
                .points()
                .iter()
                .any(|p| *p == Point2::new(0.0, 0.0)));
            assert_eq!(cell.polygon.area(), 900.0);
        }
        // The east cell contains (4, 0) but not (0, 4).
        let east = &d.cells[0].polygon;
        assert_eq!(point_in_polygon(&Point2::new(4.0, 0.0), east), Containment::Inside);
        assert_eq!(point_in_polygon(&Point2::new(0.0, 4.0), east), Containment::Outside);
    }

    #[test]
    fn areas_sum_to_envelope() {
        let env = big_square(50.0);
        let mut seeds = Vec::new();
        // Deterministic scattered seeds.
        for i in 0..40u64 {
            let x = ((i * 37) % 83) as f64 - 41.0;
            let y = ((i * 61) % 79) as f64 - 39.0;
            seeds.push(seed(i, x, y));
        }
        let d = voronoi(&seeds, &env).unwrap();
        let total: f64 = d.cells.iter().map(|c| c.polygon.area()).sum();
        assert!((total - env.area()).abs() <= 1e-9 * env.area());
        // Convexity and seed containment.
        for (c, s) in d.cells.iter().zip(&seeds) {
            assert!(c.polygon.is_convex(1e-9));
            assert_eq!(
                point_in_polygon(&s.position, &c.polygon),
                Containment::Inside
            );
        }
    }

    #[test]
    fn nearest_seed_oracle_small() {
        let env = big_square(50.0);
        let mut seeds = Vec::new();
        for i in 0..25u64 {
            let x = ((i * 29) % 71) as f64 - 35.0;
            let y = ((i * 53) % 67) as f64 - 33.0;
            seeds.push(seed(i, x, y));
        }
        let d = voronoi(&seeds, &env).unwrap();
        let samples = crate::geom::sample_points_in(
            &MultiPolygon::from_polygon(env.clone()),
            2000,
            7,
        )
        .unwrap();
        for p in samples {
            // Skip points within 1e-6 of any cell boundary.
            let near_boundary = d.cells.iter().any(|c| {
                c.polygon.exterior().segments().any(|(a, b)| {
                    crate::geom::dist_point_segment(&p, &a, &b) < 1e-6
                })
            });
            if near_boundary {
                continue;
            }
            let brute = seeds
                .iter()
                .min_by(|a, b| {
                    p.dist_sq(&a.position)
                        .partial_cmp(&p.dist_sq(&b.position))
                        .unwrap()
                })
                .unwrap()
                .id;
            let containing: Vec<SourcePointId> = d
                .cells
                .iter()
                .filter(|c| point_in_polygon(&p, &c.polygon) == Containment::Inside)
                .map(|c| c.seed)
                .collect();
            assert_eq!(containing, vec![brute]);
        }
    }

    #[test]
    fn permutation_of_input_order_changes_nothing() {
        let env = big_square(40.0);
        let mut seeds = Vec::new();
        for i in 0..20u64 {
            let x = ((i * 43) % 61) as f64 - 30.0;
            let y = ((i * 17) % 59) as f64 - 29.0;
            seeds.push(seed(i, x, y));
        }
        let d1 = voronoi(&seeds, &env).unwrap();
        let mut shuffled = seeds.clone();
        shuffled.reverse();
        shuffled.swap(3, 11);
        let d2 = voronoi(&shuffled, &env).unwrap();
        assert_eq!(d1.cells.len(), d2.cells.len());
        for (a, b) in d1.cells.iter().zip(&d2.cells) {
            assert_eq!(a.seed, b.seed);
            assert_eq!(a.polygon.exterior().points(), b.polygon.exterior().points());
        }
    }

    #[test]
    fn seed_outside_envelope_rejected() {
        let env = big_square(10.0);
        let r = voronoi(&[seed(0, 50.0, 0.0)], &env);
        assert!(matches!(r, Err(TessellateError::SeedOutsideEnvelope(_))));
    }

    #[test]
    fn duplicate_seeds_rejected() {
        let env = big_square(10.0);
        let r = voronoi(&[seed(0, 1.0, 1.0), seed(1, 1.0, 1.0)], &env);
        assert!(matches!(r, Err(TessellateError::DuplicateSeeds(_, _))));
    }

    #[test]
    fn envelope_for_expands_bbox() {
        let unit = MultiPolygon::from_polygon(
            Polygon::from_coords(vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], vec![]).unwrap(),
        );
        let e0 = envelope_for(&unit, 0.0).unwrap();
        assert_eq!(e0.area(), 1.0);
        let e2 = envelope_for(&unit, 2.0).unwrap();
        let bb = e2.bbox();
        assert_eq!((bb.min.x, bb.min.y, bb.max.x, bb.max.y), (-2.0, -2.0, 3.0, 3.0));
        let multi = MultiPolygon::new(vec![
            Polygon::from_coords(vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)], vec![]).unwrap(),
            Polygon::from_coords(vec![(5.0, 5.0), (6.0, 5.0), (6.0, 6.0), (5.0, 6.0)], vec![]).unwrap(),
        ]);
        let em = envelope_for(&multi, 0.0).unwrap();
        assert_eq!(em.area(), 36.0);
        assert!(envelope_for(&MultiPolygon::empty(), 1.0).is_err());
        assert!(matches!(envelope_for(&unit, -1.0), Err(TessellateError::BadMargin)));
    }

    #[test]
    fn generic_f32_cells() {
        let env: GPolygon<f32> = GPolygon::from_coords(
            vec![(-10.0f32, -10.0), (10.0, -10.0), (10.0, 10.0), (-10.0, 10.0)],
            vec![],
        )
        .unwrap();
        let sites = [GPoint2::new(-1.0f32, 0.0), GPoint2::new(1.0f32, 0.0)];
        let cells = voronoi_cells(&sites, &env).unwrap();
        assert_eq!(cells.len(), 2);
        assert!((cells[0].area() - 200.0).abs() < 1e-3);
    }
}

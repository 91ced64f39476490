//! Select faces of an arrangement and assemble the boundary into polygons.

use super::exact::area_sign;
use super::graph::Arrangement;
use crate::geom::predicates::{point_in_ring_tol, Containment};
use crate::geom::{GeomError, GeomResult, MultiPolygon, Point2, Polygon, Ring, MERGE_EPS};

/// Extract the region `{face : select(wind(face))}` as a multi-polygon.
pub(super) fn extract(
    arr: &Arrangement,
    select: impl Fn(&[i64; 2]) -> bool,
) -> GeomResult<MultiPolygon<f64>> {
    if select(&[0, 0]) {
        return Err(GeomError::Topology("selected region is unbounded".into()));
    }
    let selected: Vec<bool> = arr.wind.iter().map(|w| select(w)).collect();
    let n_he = arr.half_edge_count();
    let mut is_boundary = vec![false; n_he];
    for he in 0..n_he as u32 {
        let f = arr.face_of_he(he);
        let g = arr.face_of_he(Arrangement::twin(he));
        is_boundary[he as usize] = selected[f as usize] && !selected[g as usize];
    }

    // Trace boundary rings with the selected region on the left.
    let mut visited = vec![false; n_he];
    let mut shells: Vec<(Ring<f64>, f64)> = Vec::new();
    let mut holes: Vec<Ring<f64>> = Vec::new();
    for start in 0..n_he as u32 {
        if !is_boundary[start as usize] || visited[start as usize] {
            continue;
        }
        let mut loop_pts = Vec::new();
        let mut h = start;
        loop {
            visited[h as usize] = true;
            loop_pts.push(arr.verts[arr.src(h) as usize].clone());
            h = arr
                .next_boundary(h, &is_boundary)
                .ok_or_else(|| GeomError::Topology("boundary walk stranded".into()))?;
            if h == start {
                break;
            }
            if loop_pts.len() > n_he {
                return Err(GeomError::Topology("boundary walk does not close".into()));
            }
        }
        let positive = area_sign(&loop_pts) > 0;
        let pts: Vec<Point2<f64>> = loop_pts.iter().map(|p| p.to_point()).collect();
        if let Some(ring) = clean_ring(pts) {
            let a = ring.signed_area();
            if positive {
                shells.push((ring, a.abs()));
            } else {
                holes.push(ring);
            }
        }
    }

    // Nest each hole under the smallest shell containing it.
    let mut shell_holes: Vec<Vec<Ring<f64>>> = vec![Vec::new(); shells.len()];
    let mut order: Vec<usize> = (0..shells.len()).collect();
    order.sort_by(|&i, &j| shells[i].1.partial_cmp(&shells[j].1).unwrap());
    'hole: for hole in holes {
        let probe = hole.points()[0];
        for &si in &order {
            if point_in_ring_tol(&probe, &shells[si].0, MERGE_EPS) != Containment::Outside {
                shell_holes[si].push(hole);
                continue 'hole;
            }
        }
        // A hole whose shell degenerated away after rounding: ignore it.
    }

    let polys: Vec<Polygon<f64>> = shells
        .into_iter()
        .zip(shell_holes)
        .map(|((shell, _), hs)| Polygon::new_unchecked(shell, hs))
        .collect();
    Ok(MultiPolygon::new(polys))
}

/// Round-off cleanup: merge coincident consecutive vertices and drop
/// exactly collinear ones; reject rings that degenerate.
fn clean_ring(points: Vec<Point2<f64>>) -> Option<Ring<f64>> {
    let mut pts: Vec<Point2<f64>> = Vec::with_capacity(points.len());
    for p in points {
        match pts.last() {
            Some(prev) if prev.dist(&p) <= MERGE_EPS => {}
            _ => pts.push(p),
        }
    }
    while pts.len() > 1 && pts[0].dist(pts.last().unwrap()) <= MERGE_EPS {
        pts.pop();
    }
    // Collinear vertex removal (exact zero cross only).
    let mut i = 0;
    while pts.len() >= 3 && i < pts.len() {
        let n = pts.len();
        let a = pts[(i + n - 1) % n];
        let b = pts[i];
        let c = pts[(i + 1) % n];
        if a.cross(&b, &c) == 0.0 {
            pts.remove(i);
            if i > 0 {
                i -= 1;
            }
        } else {
            i += 1;
        }
    }
    if pts.len() < 3 {
        return None;
    }
    let ring = Ring::new_unchecked(pts);
    if ring.signed_area() == 0.0 {
        return None;
    }
    Some(ring)
}

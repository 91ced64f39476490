//! Polygon boolean operations over an exact-arithmetic overlay.
//!
//! Input coordinates convert losslessly to rationals, the arrangement and
//! face selection are computed exactly, and only the final vertices are
//! rounded back to floats. Result areas therefore match the exact value to
//! within accumulated `f64` rounding, far inside the 1e-9 relative
//! contract, and coincident or shared-edge inputs need no epsilon tuning.

mod assemble;
mod exact;
mod graph;

use self::exact::EPoint;
use super::{GeomError, GeomResult, GeomScalar, MultiPolygon, Point2, Polygon, Ring};

/// Set-theoretic operation kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoolKind {
    Union,
    Intersection,
    Difference,
}

/// Boolean operation between two multi-polygons with normalized rings.
pub fn boolean<T: GeomScalar>(
    a: &MultiPolygon<T>,
    b: &MultiPolygon<T>,
    kind: BoolKind,
) -> GeomResult<MultiPolygon<T>> {
    // Cheap outcomes for empty or bbox-disjoint operands.
    if a.is_empty() {
        return Ok(match kind {
            BoolKind::Union => b.clone(),
            BoolKind::Intersection | BoolKind::Difference => MultiPolygon::empty(),
        });
    }
    if b.is_empty() {
        return Ok(match kind {
            BoolKind::Union | BoolKind::Difference => a.clone(),
            BoolKind::Intersection => MultiPolygon::empty(),
        });
    }
    if !a.bbox().intersects(&b.bbox()) {
        return Ok(match kind {
            BoolKind::Union => {
                let mut parts = a.polygons().to_vec();
                parts.extend_from_slice(b.polygons());
                MultiPolygon::new(parts)
            }
            BoolKind::Intersection => MultiPolygon::empty(),
            BoolKind::Difference => a.clone(),
        });
    }

    let mut rings: Vec<(Vec<EPoint>, u8)> = Vec::new();
    collect_rings(a, 0, &mut rings);
    collect_rings(b, 1, &mut rings);
    let arr = graph::build(&rings).map_err(GeomError::Topology)?;
    let result = match kind {
        BoolKind::Union => assemble::extract(&arr, |w| w[0] > 0 || w[1] > 0)?,
        BoolKind::Intersection => assemble::extract(&arr, |w| w[0] > 0 && w[1] > 0)?,
        BoolKind::Difference => assemble::extract(&arr, |w| w[0] > 0 && w[1] <= 0)?,
    };
    Ok(cast_multi(result))
}

/// Union of many polygons in a single overlay pass.
pub fn union_all<T: GeomScalar>(polys: &[Polygon<T>]) -> GeomResult<MultiPolygon<T>> {
    if polys.is_empty() {
        return Ok(MultiPolygon::empty());
    }
    if polys.len() == 1 {
        return Ok(MultiPolygon::from_polygon(polys[0].clone()));
    }
    let mut rings: Vec<(Vec<EPoint>, u8)> = Vec::new();
    for p in polys {
        collect_polygon_rings(p, 0, &mut rings);
    }
    let arr = graph::build(&rings).map_err(GeomError::Topology)?;
    let result = assemble::extract(&arr, |w| w[0] > 0)?;
    Ok(cast_multi(result))
}

fn collect_rings<T: GeomScalar>(g: &MultiPolygon<T>, group: u8, out: &mut Vec<(Vec<EPoint>, u8)>) {
    for p in g.polygons() {
        collect_polygon_rings(p, group, out);
    }
}

fn collect_polygon_rings<T: GeomScalar>(p: &Polygon<T>, group: u8, out: &mut Vec<(Vec<EPoint>, u8)>) {
    for ring in p.rings() {
        let pts = ring
            .points()
            .iter()
            .map(|q| {
                let q = q.to_f64();
                EPoint::from_f64(q.x, q.y)
            })
            .collect();
        out.push((pts, group));
    }
}

fn cast_multi<T: GeomScalar>(g: MultiPolygon<f64>) -> MultiPolygon<T> {
    let polys = g
        .polygons()
        .iter()
        .map(|p| {
            let ext = cast_ring::<T>(p.exterior());
            let holes = p.holes().iter().map(cast_ring::<T>).collect();
            Polygon::new_unchecked(ext, holes)
        })
        .collect();
    MultiPolygon::new(polys)
}

fn cast_ring<T: GeomScalar>(r: &Ring<f64>) -> Ring<T> {
    Ring::new_unchecked(
        r.points()
            .iter()
            .map(|p| Point2::new(super::cast::<T>(p.x), super::cast::<T>(p.y)))
            .collect(),
    )
}

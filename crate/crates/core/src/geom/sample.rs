//! Deterministic uniform point sampling inside polygon regions.

use super::predicates::{point_in_multipolygon_tol, Containment};
use super::{cast, GeomError, GeomResult, GeomScalar, MultiPolygon, Point2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Draw `n` uniform points inside `g` by rejection sampling over the
/// bounding box. Deterministic for a given `seed`.
pub fn sample_points_in<T: GeomScalar>(
    g: &MultiPolygon<T>,
    n: usize,
    seed: u64,
) -> GeomResult<Vec<Point2<T>>> {
    if n < 1 {
        return Err(GeomError::BadSampleCount);
    }
    if g.is_empty() || g.area() <= T::zero() {
        return Err(GeomError::EmptyGeometry);
    }
    let bbox = g.bbox();
    let (minx, maxx) = (bbox.min.x.to_f64().unwrap(), bbox.max.x.to_f64().unwrap());
    let (miny, maxy) = (bbox.min.y.to_f64().unwrap(), bbox.max.y.to_f64().unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    // Points landing exactly on a boundary are rejected like outside ones,
    // so the sample is uniform over the interior.
    let tol: T = cast(super::MERGE_EPS);
    while out.len() < n {
        let x = rng.gen_range(minx..=maxx);
        let y = rng.gen_range(miny..=maxy);
        let p = Point2::new(cast::<T>(x), cast::<T>(y));
        if point_in_multipolygon_tol(&p, g, tol) == Containment::Inside {
            out.push(p);
        }
    }
    Ok(out)
}

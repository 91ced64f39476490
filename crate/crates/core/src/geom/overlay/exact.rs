//! Exact primitives for the overlay engine, in homogeneous integer
//! coordinates.
//!
//! Every `f64` coordinate converts losslessly to a dyadic rational, stored
//! as `(x, y, w)` with integer `x`, `y` and positive integer `w` so the
//! point is `(x/w, y/w)`. All topology decisions (orientation,
//! intersection, angular order) reduce to integer determinant signs with
//! no per-operation gcd, which keeps the exact path fast. Points are
//! gcd-normalized once at creation so representations are canonical and
//! equality is structural. Coordinates are rounded back to `f64` only when
//! a result is emitted.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use std::cmp::Ordering;

use crate::geom::Point2;

/// A point in homogeneous coordinates: `(x/w, y/w)` with `w > 0`,
/// gcd-normalized at creation.
#[derive(Clone, PartialEq, Eq, Debug, Hash)]
pub struct EPoint {
    x: BigInt,
    y: BigInt,
    w: BigInt,
}

impl EPoint {
    pub fn from_f64(x: f64, y: f64) -> Self {
        let (xm, xe) = dyadic(x);
        let (ym, ye) = dyadic(y);
        // Common denominator 2^max(-xe, -ye) (exponents here are <= 0).
        let shift_x = (xe - ye).max(0) as u32;
        let shift_y = (ye - xe).max(0) as u32;
        let w_exp = (-xe.min(ye)) as u32;
        EPoint::normalized(
            BigInt::from(xm) << shift_x,
            BigInt::from(ym) << shift_y,
            BigInt::from(1) << w_exp,
        )
    }

    /// Normalize: divide out gcd(x, y, w) and make `w` positive.
    pub fn normalized(x: BigInt, y: BigInt, w: BigInt) -> Self {
        debug_assert!(!w.is_zero(), "point at infinity");
        let (x, y, w) = if w.is_negative() { (-x, -y, -w) } else { (x, y, w) };
        let g = gcd3(&x, &y, &w);
        if g > BigInt::from(1) {
            EPoint {
                x: x / &g,
                y: y / &g,
                w: w / g,
            }
        } else {
            EPoint { x, y, w }
        }
    }

    pub fn to_point(&self) -> Point2<f64> {
        let w = self.w.to_f64().unwrap();
        Point2::new(self.x.to_f64().unwrap() / w, self.y.to_f64().unwrap() / w)
    }

    /// Exact comparison of the x coordinates.
    pub fn cmp_x(&self, other: &EPoint) -> Ordering {
        (&self.x * &other.w).cmp(&(&other.x * &self.w))
    }

    pub fn cmp_y(&self, other: &EPoint) -> Ordering {
        (&self.y * &other.w).cmp(&(&other.y * &self.w))
    }

    pub fn y_equals(&self, other: &EPoint) -> bool {
        self.cmp_y(other) == Ordering::Equal
    }
}

/// Lexicographic order by exact (x, y).
impl Ord for EPoint {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_x(other).then_with(|| self.cmp_y(other))
    }
}

impl PartialOrd for EPoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Mantissa and exponent of a finite f64 with the exponent clamped so it
/// is never positive (integers get exponent 0).
fn dyadic(v: f64) -> (i64, i32) {
    assert!(v.is_finite(), "coordinate must be finite");
    if v == 0.0 {
        return (0, 0);
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
    let biased = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & 0xf_ffff_ffff_ffff;
    let (mut m, mut e) = if biased == 0 {
        (frac as i64, -1074)
    } else {
        ((frac | (1 << 52)) as i64, biased - 1075)
    };
    while m % 2 == 0 && e < 0 {
        m /= 2;
        e += 1;
    }
    // Positive exponents fold into the mantissa (value is an integer).
    while e > 0 {
        m *= 2;
        e -= 1;
    }
    (sign * m, e)
}

fn gcd2(a: &BigInt, b: &BigInt) -> BigInt {
    let mut a = a.abs();
    let mut b = b.abs();
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

fn gcd3(a: &BigInt, b: &BigInt, c: &BigInt) -> BigInt {
    gcd2(&gcd2(a, b), c)
}

fn sign(v: &BigInt) -> i32 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

/// Orientation of `c` relative to the directed line `a -> b`:
/// +1 left, -1 right, 0 collinear.
pub fn orient(a: &EPoint, b: &EPoint, c: &EPoint) -> i32 {
    // sign of det [[ax, ay, aw], [bx, by, bw], [cx, cy, cw]] * aw*bw*cw;
    // all w are positive so the det sign is the orientation.
    let det = &a.x * (&b.y * &c.w - &c.y * &b.w) - &a.y * (&b.x * &c.w - &c.x * &b.w)
        + &a.w * (&b.x * &c.y - &c.x * &b.y);
    sign(&det)
}

/// Exact intersection of closed segments `(a, b)` and `(c, d)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ESegSeg {
    None,
    Point(EPoint),
    Overlap(EPoint, EPoint),
}

pub fn seg_seg(a: &EPoint, b: &EPoint, c: &EPoint, d: &EPoint) -> ESegSeg {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);

    if o1 == 0 && o2 == 0 {
        // Collinear: order along the dominant axis of (a, b).
        let dx_dominant = {
            let dx = (&b.x * &a.w - &a.x * &b.w).abs();
            let dy = (&b.y * &a.w - &a.y * &b.w).abs();
            dx >= dy
        };
        let cmp = |p: &EPoint, q: &EPoint| if dx_dominant { p.cmp_x(q) } else { p.cmp_y(q) };
        let (amin, amax) = if cmp(a, b) == Ordering::Greater { (b, a) } else { (a, b) };
        let (cmin, cmax) = if cmp(c, d) == Ordering::Greater { (d, c) } else { (c, d) };
        let lo = if cmp(amin, cmin) == Ordering::Less { cmin } else { amin };
        let hi = if cmp(amax, cmax) == Ordering::Greater { cmax } else { amax };
        match cmp(lo, hi) {
            Ordering::Greater => ESegSeg::None,
            Ordering::Equal => ESegSeg::Point(lo.clone()),
            Ordering::Less => ESegSeg::Overlap(lo.clone(), hi.clone()),
        }
    } else {
        let straddle1 = o1 * o2 <= 0;
        let straddle2 = o3 * o4 <= 0;
        if !(straddle1 && straddle2) {
            return ESegSeg::None;
        }
        if o1 == 0 {
            return if within(a, b, c) { ESegSeg::Point(c.clone()) } else { ESegSeg::None };
        }
        if o2 == 0 {
            return if within(a, b, d) { ESegSeg::Point(d.clone()) } else { ESegSeg::None };
        }
        if o3 == 0 {
            return if within(c, d, a) { ESegSeg::Point(a.clone()) } else { ESegSeg::None };
        }
        if o4 == 0 {
            return if within(c, d, b) { ESegSeg::Point(b.clone()) } else { ESegSeg::None };
        }
        // Proper crossing: meet of the two lines, as the cross product of
        // homogeneous line coordinates. No division involved.
        let l1 = line_through(a, b);
        let l2 = line_through(c, d);
        let x = &l1.1 * &l2.2 - &l1.2 * &l2.1;
        let y = &l1.2 * &l2.0 - &l1.0 * &l2.2;
        let w = &l1.0 * &l2.1 - &l1.1 * &l2.0;
        ESegSeg::Point(EPoint::normalized(x, y, w))
    }
}

/// Homogeneous line coordinates through two points.
fn line_through(a: &EPoint, b: &EPoint) -> (BigInt, BigInt, BigInt) {
    (
        &a.y * &b.w - &b.y * &a.w,
        &b.x * &a.w - &a.x * &b.w,
        &a.x * &b.y - &b.x * &a.y,
    )
}

/// Whether collinear point `p` lies within the bounding box of `(a, b)`.
fn within(a: &EPoint, b: &EPoint, p: &EPoint) -> bool {
    let (xmin, xmax) = if a.cmp_x(b) == Ordering::Greater { (b, a) } else { (a, b) };
    let (ymin, ymax) = if a.cmp_y(b) == Ordering::Greater { (b, a) } else { (a, b) };
    p.cmp_x(xmin) != Ordering::Less
        && p.cmp_x(xmax) != Ordering::Greater
        && p.cmp_y(ymin) != Ordering::Less
        && p.cmp_y(ymax) != Ordering::Greater
}

/// Exact rational value, used for ray-crossing abscissas.
#[derive(Debug, Clone)]
pub struct ExactX {
    num: BigInt,
    den: BigInt, // > 0
}

impl ExactX {
    pub fn of_point_x(p: &EPoint) -> ExactX {
        ExactX {
            num: p.x.clone(),
            den: p.w.clone(),
        }
    }

    pub fn cmp_point_x(&self, p: &EPoint) -> Ordering {
        (&self.num * &p.w).cmp(&(&p.x * &self.den))
    }

    pub fn cmp(&self, other: &ExactX) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

/// x-coordinate where segment `(a, b)` crosses the horizontal line through
/// `at` (requires the segment not horizontal).
pub fn x_at_y_of(a: &EPoint, b: &EPoint, at: &EPoint) -> ExactX {
    // x = ax + (y - ay) (bx - ax) / (by - ay), all over common weights.
    // Using homogeneous forms: num/den below.
    let dy = &b.y * &a.w - &a.y * &b.w; // (by - ay) * aw * bw / (aw bw)
    debug_assert!(!dy.is_zero());
    let dx = &b.x * &a.w - &a.x * &b.w;
    // (y*aw - ay*w_at) with y = at.y / at.w:
    let y_minus_ay = &at.y * &a.w - &a.y * &at.w;
    let num = &a.x * &at.w * &dy + y_minus_ay * &dx;
    let den = &a.w * &at.w * dy;
    if den.is_negative() {
        ExactX {
            num: -num,
            den: -den,
        }
    } else {
        ExactX { num, den }
    }
}

/// Counter-clockwise angular order of direction vectors starting at the
/// positive x axis. Directions are integer vectors.
pub fn dir_cmp(d1: (&BigInt, &BigInt), d2: (&BigInt, &BigInt)) -> Ordering {
    let h1 = dir_half(d1);
    let h2 = dir_half(d2);
    if h1 != h2 {
        return h1.cmp(&h2);
    }
    let cross = d1.0 * d2.1 - d1.1 * d2.0;
    match sign(&cross) {
        1 => Ordering::Less, // d2 is counter-clockwise of d1
        -1 => Ordering::Greater,
        _ => Ordering::Equal,
    }
}

fn dir_half(d: (&BigInt, &BigInt)) -> u8 {
    if d.1.is_negative() || (d.1.is_zero() && d.0.is_negative()) {
        1
    } else {
        0
    }
}

/// Integer direction vector of the segment `a -> b` (scaled by the
/// positive factor `aw * bw`, which preserves angle).
pub fn direction(a: &EPoint, b: &EPoint) -> (BigInt, BigInt) {
    (&b.x * &a.w - &a.x * &b.w, &b.y * &a.w - &a.y * &b.w)
}

/// Sign of the signed area of a closed vertex loop (exact).
pub fn area_sign(points: &[EPoint]) -> i32 {
    // Twice the area equals sum of cross(p_i, p_{i+1}) / (w_i w_{i+1});
    // multiply through by the positive product of all weights pairwise:
    // instead evaluate incrementally as an exact rational sum.
    let mut num = BigInt::from(0);
    let mut den = BigInt::from(1);
    let n = points.len();
    for i in 0..n {
        let p = &points[i];
        let q = &points[(i + 1) % n];
        let cross = &p.x * &q.y - &q.x * &p.y;
        let w = &p.w * &q.w;
        num = num * &w + cross * &den;
        den *= w;
    }
    sign(&num)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ep(x: f64, y: f64) -> EPoint {
        EPoint::from_f64(x, y)
    }

    #[test]
    fn dyadic_round_trip() {
        for v in [0.0, 1.0, -3.5, 0.1, 53.2, 1e-12, -823.456789, 1e9] {
            let p = EPoint::from_f64(v, -v);
            let back = p.to_point();
            assert_eq!(back.x, v);
            assert_eq!(back.y, -v);
        }
    }

    #[test]
    fn orient_signs() {
        assert_eq!(orient(&ep(0.0, 0.0), &ep(1.0, 0.0), &ep(0.0, 1.0)), 1);
        assert_eq!(orient(&ep(0.0, 0.0), &ep(1.0, 0.0), &ep(0.0, -1.0)), -1);
        assert_eq!(orient(&ep(0.0, 0.0), &ep(1.0, 0.0), &ep(2.0, 0.0)), 0);
    }

    #[test]
    fn proper_crossing_is_exact() {
        match seg_seg(&ep(0.0, 0.0), &ep(2.0, 2.0), &ep(0.0, 2.0), &ep(2.0, 0.0)) {
            ESegSeg::Point(p) => assert_eq!(p, ep(1.0, 1.0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn one_third_crossing_has_no_rounding() {
        // y = x meets y = 1 - 2x at x = 1/3, not representable in f64.
        match seg_seg(&ep(0.0, 0.0), &ep(1.0, 1.0), &ep(0.0, 1.0), &ep(1.0, -1.0)) {
            ESegSeg::Point(p) => {
                // p == (1/3, 1/3) exactly: compare against a synthetic
                // homogeneous point.
                let third = EPoint::normalized(BigInt::from(1), BigInt::from(1), BigInt::from(3));
                assert_eq!(p, third);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn collinear_overlap_bounds() {
        match seg_seg(&ep(0.0, 0.0), &ep(4.0, 0.0), &ep(2.0, 0.0), &ep(6.0, 0.0)) {
            ESegSeg::Overlap(p, q) => {
                assert_eq!(p, ep(2.0, 0.0));
                assert_eq!(q, ep(4.0, 0.0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn touch_at_endpoint() {
        match seg_seg(&ep(0.0, 0.0), &ep(2.0, 0.0), &ep(1.0, 0.0), &ep(1.0, 3.0)) {
            ESegSeg::Point(p) => assert_eq!(p, ep(1.0, 0.0)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn vertical_overlap_uses_y_axis() {
        match seg_seg(&ep(0.0, 0.0), &ep(0.0, 4.0), &ep(0.0, 2.0), &ep(0.0, 6.0)) {
            ESegSeg::Overlap(p, q) => {
                assert_eq!(p, ep(0.0, 2.0));
                assert_eq!(q, ep(0.0, 4.0));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn angular_order_full_circle() {
        let dirs = [
            (1.0, 0.0),
            (1.0, 1.0),
            (0.0, 1.0),
            (-1.0, 1.0),
            (-1.0, 0.0),
            (-1.0, -1.0),
            (0.0, -1.0),
            (1.0, -1.0),
        ];
        let origin = ep(0.0, 0.0);
        let vecs: Vec<(BigInt, BigInt)> = dirs
            .iter()
            .map(|&(x, y)| direction(&origin, &ep(x, y)))
            .collect();
        for i in 0..vecs.len() {
            for j in 0..vecs.len() {
                let c = dir_cmp((&vecs[i].0, &vecs[i].1), (&vecs[j].0, &vecs[j].1));
                assert_eq!(c, i.cmp(&j), "dirs {i} vs {j}");
            }
        }
    }

    #[test]
    fn area_sign_orientation() {
        let ccw = [ep(0.0, 0.0), ep(1.0, 0.0), ep(1.0, 1.0), ep(0.0, 1.0)];
        assert_eq!(area_sign(&ccw), 1);
        let cw: Vec<_> = ccw.iter().rev().cloned().collect();
        assert_eq!(area_sign(&cw), -1);
    }

    #[test]
    fn ray_crossing_abscissa() {
        let a = ep(0.0, -1.0);
        let b = ep(2.0, 3.0);
        let at = ep(10.0, 0.0);
        // Segment crosses y = 0 at x = 0.5.
        let x = x_at_y_of(&a, &b, &at);
        assert_eq!(x.cmp_point_x(&ep(0.5, 0.0)), Ordering::Equal);
        assert_eq!(x.cmp_point_x(&ep(0.4, 0.0)), Ordering::Greater);
        assert_eq!(x.cmp_point_x(&ep(0.6, 0.0)), Ordering::Less);
    }

    #[test]
    fn lex_ordering_mixed_weights() {
        let half = EPoint::normalized(BigInt::from(1), BigInt::from(0), BigInt::from(2));
        assert_eq!(half.cmp(&ep(0.5, 0.0)), Ordering::Equal);
        assert!(half < ep(0.6, 0.0));
        assert!(half > ep(0.5, -1.0));
    }
}

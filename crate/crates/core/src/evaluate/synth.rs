//! Synthetic road networks with analytically known reference sections.
//!
//! Generators are restricted to straight arms so the correct decomposition
//! is computable in closed form: between junctions a section owns its slab
//! piece, and junction squares split among the incident arms by the
//! perpendicular bisectors of their equidistant buffer points. For
//! axis-aligned junctions those shares have simple closed forms; the `y`
//! and `star` kinds rely on congruent arms instead, where every arm owns
//! an equal share of the footprint by symmetry.

use crate::partition::dissolve;
use crate::roadgraph::{Attributes, EdgeId, InputLine};
use crate::{Point2, Polygon, Polyline};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Synthetic networks sit away from the origin like real projected data,
/// so their files pass the geographic-coordinate guard on ingestion.
pub const ORIGIN_M: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthKind {
    Grid,
    Cross,
    T,
    Y,
    Star,
    Parallel,
    CloseJunctions,
}

impl std::str::FromStr for SynthKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grid" => Ok(SynthKind::Grid),
            "cross" => Ok(SynthKind::Cross),
            "t" => Ok(SynthKind::T),
            "y" => Ok(SynthKind::Y),
            "star" => Ok(SynthKind::Star),
            "parallel" => Ok(SynthKind::Parallel),
            "close-junctions" => Ok(SynthKind::CloseJunctions),
            other => Err(format!(
                "unknown kind {other}; expected grid|cross|t|y|star|parallel|close-junctions"
            )),
        }
    }
}

impl std::fmt::Display for SynthKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SynthKind::Grid => "grid",
            SynthKind::Cross => "cross",
            SynthKind::T => "t",
            SynthKind::Y => "y",
            SynthKind::Star => "star",
            SynthKind::Parallel => "parallel",
            SynthKind::CloseJunctions => "close-junctions",
        };
        f.write_str(s)
    }
}

/// Parameters of a synthetic network.
///
/// `block_m` is the block length for grids, the arm length for junction
/// kinds, the edge length for `parallel` and the junction gap for
/// `close-junctions`. A nonzero `seed` jitters grid block lengths per row
/// and column; the reference accounts for the jitter exactly.
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub kind: SynthKind,
    pub rows: usize,
    pub cols: usize,
    pub block_m: f64,
    pub width_m: f64,
    pub seed: u64,
    /// Distance between the parallel carriageways (parallel kind only);
    /// defaults to `width_m + 2`.
    pub gap_m: Option<f64>,
}

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("unsupported parameters: {0}")]
    BadParams(String),
}

/// Generated network: raw lines, raw surface polygons (pre-dissolve) and
/// the analytic reference areas per edge.
#[derive(Debug, Clone)]
pub struct Synthetic {
    pub lines: Vec<InputLine>,
    pub surface: Vec<Polygon>,
    pub reference: Vec<(EdgeId, f64)>,
}

pub fn synthesize(spec: &SyntheticSpec) -> Result<Synthetic, SynthError> {
    if !(spec.width_m > 0.0) {
        return Err(SynthError::BadParams("width must be positive".into()));
    }
    match spec.kind {
        SynthKind::Grid => grid(spec),
        SynthKind::Cross => cross(spec),
        SynthKind::T => tee(spec),
        SynthKind::Y => radial(spec, &[90.0, 210.0, 330.0]),
        SynthKind::Star => radial(spec, &[0.0, 45.0, 90.0, 135.0, 180.0, 225.0, 270.0, 315.0]),
        SynthKind::Parallel => parallel(spec),
        SynthKind::CloseJunctions => close_junctions(spec),
    }
}

fn line(id: String, pts: Vec<(f64, f64)>, attrs: Attributes) -> InputLine {
    InputLine {
        id: EdgeId(id),
        geometry: Polyline::new(
            pts.into_iter()
                .map(|(x, y)| Point2::new(x + ORIGIN_M, y + ORIGIN_M))
                .collect(),
        )
        .expect("generator emits valid lines"),
        attributes: attrs,
    }
}

fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Polygon {
    Polygon::from_coords(
        vec![
            (x0 + ORIGIN_M, y0 + ORIGIN_M),
            (x1 + ORIGIN_M, y0 + ORIGIN_M),
            (x1 + ORIGIN_M, y1 + ORIGIN_M),
            (x0 + ORIGIN_M, y1 + ORIGIN_M),
        ],
        vec![],
    )
    .expect("generator emits valid rectangles")
}

fn attrs(kind: &str, class: &str) -> Attributes {
    let mut m = Attributes::new();
    m.insert("road_class".into(), serde_json::Value::String(class.into()));
    m.insert("orientation".into(), serde_json::Value::String(kind.into()));
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Dir {
    N,
    E,
    S,
    W,
}

impl Dir {
    fn opposite(self) -> Dir {
        match self {
            Dir::N => Dir::S,
            Dir::E => Dir::W,
            Dir::S => Dir::N,
            Dir::W => Dir::E,
        }
    }
}

/// Share of the w x w junction square owned by the arm leaving in `dir`.
///
/// Buffer points sit equidistant from the node on every arm, so the
/// boundaries inside the square are the diagonals (degree 4), the
/// diagonal pair plus the axis (degree 3) or a single diagonal
/// (perpendicular degree 2) regardless of the radius.
fn junction_share(arms: &[Dir], dir: Dir, w: f64) -> f64 {
    let w2 = w * w;
    debug_assert!(arms.contains(&dir));
    match arms.len() {
        4 => w2 / 4.0,
        3 => {
            let missing = [Dir::N, Dir::E, Dir::S, Dir::W]
                .into_iter()
                .find(|d| !arms.contains(d))
                .unwrap();
            if dir == missing.opposite() {
                w2 / 4.0
            } else {
                3.0 * w2 / 8.0
            }
        }
        2 => w2 / 2.0,
        n => unreachable!("junction share for degree {n}"),
    }
}

fn grid(spec: &SyntheticSpec) -> Result<Synthetic, SynthError> {
    let (rows, cols, block, w) = (spec.rows, spec.cols, spec.block_m, spec.width_m);
    if rows < 1 || cols < 1 {
        return Err(SynthError::BadParams("grid needs rows >= 1 and cols >= 1".into()));
    }
    if rows > 200 || cols > 200 {
        return Err(SynthError::BadParams("grid capped at 200 x 200 blocks".into()));
    }
    if !(block >= 20.0) {
        return Err(SynthError::BadParams("block length must be at least 20 m".into()));
    }
    if !(w <= block / 4.0) {
        return Err(SynthError::BadParams(
            "width must be at most a quarter of the block length".into(),
        ));
    }

    // Optional per-row / per-column jitter; lengths stay >= 0.75 * block,
    // which keeps every junction radius at the 5 m cap.
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut jitter = |n: usize| -> Vec<f64> {
        (0..n)
            .map(|_| {
                if spec.seed == 0 {
                    block
                } else {
                    block * rng.gen_range(0.75..1.35)
                }
            })
            .collect()
    };
    let col_w = jitter(cols);
    let row_h = jitter(rows);
    let xs: Vec<f64> = std::iter::once(0.0)
        .chain(col_w.iter().scan(0.0, |acc, w| {
            *acc += w;
            Some(*acc)
        }))
        .collect();
    let ys: Vec<f64> = std::iter::once(0.0)
        .chain(row_h.iter().scan(0.0, |acc, h| {
            *acc += h;
            Some(*acc)
        }))
        .collect();

    let node_arms = |i: usize, j: usize| -> Vec<Dir> {
        let mut arms = Vec::with_capacity(4);
        if i < rows {
            arms.push(Dir::N);
        }
        if j < cols {
            arms.push(Dir::E);
        }
        if i > 0 {
            arms.push(Dir::S);
        }
        if j > 0 {
            arms.push(Dir::W);
        }
        arms
    };

    let mut lines = Vec::new();
    let mut reference = Vec::new();
    for i in 0..=rows {
        for j in 0..cols {
            let id = format!("h_{i}_{j}");
            lines.push(line(
                id.clone(),
                vec![(xs[j], ys[i]), (xs[j + 1], ys[i])],
                attrs("h", "residential"),
            ));
            let area = (col_w[j] - w) * w
                + junction_share(&node_arms(i, j), Dir::E, w)
                + junction_share(&node_arms(i, j + 1), Dir::W, w);
            reference.push((EdgeId(id), area));
        }
    }
    for i in 0..rows {
        for j in 0..=cols {
            let id = format!("v_{i}_{j}");
            lines.push(line(
                id.clone(),
                vec![(xs[j], ys[i]), (xs[j], ys[i + 1])],
                attrs("v", "residential"),
            ));
            let area = (row_h[i] - w) * w
                + junction_share(&node_arms(i, j), Dir::N, w)
                + junction_share(&node_arms(i + 1, j), Dir::S, w);
            reference.push((EdgeId(id), area));
        }
    }

    // Slabs span half a road width beyond the terminal nodes so every
    // junction square is complete.
    let h = w / 2.0;
    let (x_lo, x_hi) = (xs[0] - h, xs[cols] + h);
    let (y_lo, y_hi) = (ys[0] - h, ys[rows] + h);
    let mut surface = Vec::new();
    for &y in &ys {
        surface.push(rect(x_lo, y - h, x_hi, y + h));
    }
    for &x in &xs {
        surface.push(rect(x - h, y_lo, x + h, y_hi));
    }

    Ok(Synthetic {
        lines,
        surface,
        reference,
    })
}

fn cross(spec: &SyntheticSpec) -> Result<Synthetic, SynthError> {
    let (arm, w) = (spec.block_m, spec.width_m);
    if !(arm > w) {
        return Err(SynthError::BadParams(
            "arm length must exceed the road width".into(),
        ));
    }
    let h = w / 2.0;
    let lines = vec![
        line("e".into(), vec![(0.0, 0.0), (arm, 0.0)], attrs("e", "arm")),
        line("n".into(), vec![(0.0, 0.0), (0.0, arm)], attrs("n", "arm")),
        line("w".into(), vec![(0.0, 0.0), (-arm, 0.0)], attrs("w", "arm")),
        line("s".into(), vec![(0.0, 0.0), (0.0, -arm)], attrs("s", "arm")),
    ];
    // Junction square modeled separately from the arms, like producers
    // that digitize intersections as their own polygons.
    let surface = vec![
        rect(-h, -h, h, h),
        rect(h, -h, arm, h),
        rect(-arm, -h, -h, h),
        rect(-h, h, h, arm),
        rect(-h, -arm, h, -h),
    ];
    let per_arm = (arm - h) * w + w * w / 4.0;
    let reference = ["e", "n", "w", "s"]
        .iter()
        .map(|id| (EdgeId(id.to_string()), per_arm))
        .collect();
    Ok(Synthetic {
        lines,
        surface,
        reference,
    })
}

fn tee(spec: &SyntheticSpec) -> Result<Synthetic, SynthError> {
    let (arm, w) = (spec.block_m, spec.width_m);
    if !(arm > w) {
        return Err(SynthError::BadParams(
            "arm length must exceed the road width".into(),
        ));
    }
    let h = w / 2.0;
    let lines = vec![
        line("bar_e".into(), vec![(0.0, 0.0), (arm, 0.0)], attrs("e", "bar")),
        line("bar_w".into(), vec![(0.0, 0.0), (-arm, 0.0)], attrs("w", "bar")),
        line("stem".into(), vec![(0.0, 0.0), (0.0, arm)], attrs("n", "stem")),
    ];
    let surface = vec![rect(-arm, -h, arm, h), rect(-h, 0.0, h, arm)];
    let arms = [Dir::E, Dir::W, Dir::N];
    let slab = (arm - h) * w;
    let reference = vec![
        (EdgeId("bar_e".into()), slab + junction_share(&arms, Dir::E, w)),
        (EdgeId("bar_w".into()), slab + junction_share(&arms, Dir::W, w)),
        (EdgeId("stem".into()), slab + junction_share(&arms, Dir::N, w)),
    ];
    Ok(Synthetic {
        lines,
        surface,
        reference,
    })
}

/// Junction of congruent arms at the given angles (degrees). All arms are
/// images of each other under rotation, so each owns exactly 1/n of the
/// footprint.
fn radial(spec: &SyntheticSpec, angles_deg: &[f64]) -> Result<Synthetic, SynthError> {
    let (arm, w) = (spec.block_m, spec.width_m);
    if !(arm > 2.0 * w) {
        return Err(SynthError::BadParams(
            "arm length must exceed twice the road width".into(),
        ));
    }
    let h = w / 2.0;
    let mut lines = Vec::new();
    let mut surface = Vec::new();
    for (k, deg) in angles_deg.iter().enumerate() {
        let theta = deg.to_radians();
        let (sin, cos) = theta.sin_cos();
        let tip = (arm * cos, arm * sin);
        lines.push(line(
            format!("arm_{k}"),
            vec![(0.0, 0.0), tip],
            attrs("radial", "arm"),
        ));
        // Arm slab rotated into place.
        let corners: Vec<(f64, f64)> = [(0.0, -h), (arm, -h), (arm, h), (0.0, h)]
            .iter()
            .map(|&(x, y)| (x * cos - y * sin + ORIGIN_M, x * sin + y * cos + ORIGIN_M))
            .collect();
        surface.push(Polygon::from_coords(corners, vec![]).expect("rotated slab"));
    }
    let total = dissolve(surface.clone())
        .map_err(|e| SynthError::BadParams(format!("degenerate radial footprint: {e}")))?
        .geometry
        .area();
    let per_arm = total / angles_deg.len() as f64;
    let reference = (0..angles_deg.len())
        .map(|k| (EdgeId(format!("arm_{k}")), per_arm))
        .collect();
    Ok(Synthetic {
        lines,
        surface,
        reference,
    })
}

fn parallel(spec: &SyntheticSpec) -> Result<Synthetic, SynthError> {
    let (len, w) = (spec.block_m, spec.width_m);
    let gap = spec.gap_m.unwrap_or(w + 2.0);
    if !(gap > 0.0) {
        return Err(SynthError::BadParams("gap must be positive".into()));
    }
    if !(len >= 30.0) {
        return Err(SynthError::BadParams(
            "parallel edges must be at least 30 m".into(),
        ));
    }
    let y = gap / 2.0;
    let half_width = gap / 2.0 + w;
    let lines = vec![
        line("top".into(), vec![(0.0, y), (len, y)], attrs("h", "carriageway")),
        line("bot".into(), vec![(0.0, -y), (len, -y)], attrs("h", "carriageway")),
    ];
    // One merged slab covering both carriageways.
    let surface = vec![rect(0.0, -half_width, len, half_width)];
    let per_edge = len * half_width;
    let reference = vec![
        (EdgeId("top".into()), per_edge),
        (EdgeId("bot".into()), per_edge),
    ];
    Ok(Synthetic {
        lines,
        surface,
        reference,
    })
}

fn close_junctions(spec: &SyntheticSpec) -> Result<Synthetic, SynthError> {
    let (gap, w) = (spec.block_m, spec.width_m);
    if !(gap > w) {
        return Err(SynthError::BadParams(
            "junction gap must exceed the road width".into(),
        ));
    }
    let arm = (2.0 * gap).max(30.0);
    let h = w / 2.0;
    let lines = vec![
        line("short".into(), vec![(0.0, 0.0), (gap, 0.0)], attrs("h", "link")),
        line("n1_w".into(), vec![(0.0, 0.0), (-arm, 0.0)], attrs("h", "arm")),
        line("n1_n".into(), vec![(0.0, 0.0), (0.0, arm)], attrs("v", "arm")),
        line("n1_s".into(), vec![(0.0, 0.0), (0.0, -arm)], attrs("v", "arm")),
        line("n2_e".into(), vec![(gap, 0.0), (gap + arm, 0.0)], attrs("h", "arm")),
        line("n2_n".into(), vec![(gap, 0.0), (gap, arm)], attrs("v", "arm")),
        line("n2_s".into(), vec![(gap, 0.0), (gap, -arm)], attrs("v", "arm")),
    ];
    let surface = vec![
        rect(-arm, -h, gap + arm, h),
        rect(-h, -arm, h, arm),
        rect(gap - h, -arm, gap + h, arm),
    ];
    let outer = (arm - h) * w + w * w / 4.0;
    let short = (gap - w) * w + w * w / 2.0;
    let reference = vec![
        (EdgeId("short".into()), short),
        (EdgeId("n1_w".into()), outer),
        (EdgeId("n1_n".into()), outer),
        (EdgeId("n1_s".into()), outer),
        (EdgeId("n2_e".into()), outer),
        (EdgeId("n2_n".into()), outer),
        (EdgeId("n2_s".into()), outer),
    ];
    Ok(Synthetic {
        lines,
        surface,
        reference,
    })
}

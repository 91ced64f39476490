//! Validation of modeled sections against reference data and
//! classification of spatial relationships between datasets.

pub mod synth;

pub use synth::{synthesize, SynthError, Synthetic, SyntheticSpec, SynthKind};

use crate::geom::{
    boolean, point_in_multipolygon, segment_intersection, BoolKind, Containment, GeomError, SegSeg,
};
use crate::partition::SurfaceSection;
use crate::roadgraph::EdgeId;
use crate::{MultiPolygon, Point2, Polyline};

#[derive(Debug, thiserror::Error)]
pub enum EvaluateError {
    #[error("regression needs at least 2 matched pairs, got {0}")]
    TooFewPairs(usize),
    #[error("reference area for edge {0} is not positive")]
    BadReference(EdgeId),
    #[error("min_overlap must be strictly between 0 and 1")]
    BadMinOverlap,
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// One modeled-versus-reference area pair.
#[derive(Debug, Clone)]
pub struct PairReport {
    pub edge: EdgeId,
    pub modeled: f64,
    pub reference: f64,
    /// Absolute deviation as a percentage of the reference area.
    pub deviation_pct: f64,
}

/// Area regression of modeled sections against reference sections.
#[derive(Debug, Clone)]
pub struct MatchReport {
    pub pairs: Vec<PairReport>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Fractions of pairs with deviation strictly below 5 / 10 / 15 %.
    pub bucket_5: f64,
    pub bucket_10: f64,
    pub bucket_15: f64,
    /// Reference ids with no modeled section; excluded from the fit.
    pub unmatched_reference: Vec<EdgeId>,
}

/// Ordinary least squares of modeled area (y) on reference area (x), with
/// R-squared as the squared Pearson correlation and strict deviation
/// buckets.
pub fn compare(
    modeled: &[SurfaceSection],
    reference: &[(EdgeId, f64)],
) -> Result<MatchReport, EvaluateError> {
    let pairs: Vec<(EdgeId, f64)> = modeled.iter().map(|s| (s.edge.clone(), s.area)).collect();
    compare_areas(&pairs, reference)
}

/// Same regression on bare (edge, area) pairs, as read from files.
pub fn compare_areas(
    modeled: &[(EdgeId, f64)],
    reference: &[(EdgeId, f64)],
) -> Result<MatchReport, EvaluateError> {
    let by_edge: std::collections::BTreeMap<&EdgeId, f64> =
        modeled.iter().map(|(e, a)| (e, *a)).collect();
    let mut pairs: Vec<PairReport> = Vec::new();
    let mut unmatched = Vec::new();
    for (id, ref_area) in reference {
        match by_edge.get(id) {
            Some(&m) => {
                if !(*ref_area > 0.0) {
                    return Err(EvaluateError::BadReference(id.clone()));
                }
                pairs.push(PairReport {
                    edge: id.clone(),
                    modeled: m,
                    reference: *ref_area,
                    deviation_pct: (m - ref_area).abs() / ref_area * 100.0,
                });
            }
            None => unmatched.push(id.clone()),
        }
    }
    if pairs.len() < 2 {
        return Err(EvaluateError::TooFewPairs(pairs.len()));
    }

    let n = pairs.len() as f64;
    let mean_x = pairs.iter().map(|p| p.reference).sum::<f64>() / n;
    let mean_y = pairs.iter().map(|p| p.modeled).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for p in &pairs {
        let dx = p.reference - mean_x;
        let dy = p.modeled - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let (slope, intercept, r_squared);
    if sxx > 0.0 && syy > 0.0 {
        slope = sxy / sxx;
        intercept = mean_y - slope * mean_x;
        r_squared = ((sxy * sxy) / (sxx * syy)).clamp(0.0, 1.0);
    } else if sxx > 0.0 {
        // Constant modeled areas: a flat line fits them exactly.
        slope = 0.0;
        intercept = mean_y;
        r_squared = 1.0;
    } else {
        // Constant reference areas (symmetric fixtures): ordinary least
        // squares is undefined, so fit the ratio through the origin and
        // grade it by its residuals.
        slope = mean_y / mean_x;
        intercept = 0.0;
        let ss_res: f64 = pairs
            .iter()
            .map(|p| {
                let r = p.modeled - slope * p.reference;
                r * r
            })
            .sum();
        r_squared = if syy > 0.0 {
            (1.0 - ss_res / syy).clamp(0.0, 1.0)
        } else if ss_res <= 1e-24 * pairs.iter().map(|p| p.modeled * p.modeled).sum::<f64>() {
            1.0
        } else {
            0.0
        };
    }

    let bucket = |limit: f64| pairs.iter().filter(|p| p.deviation_pct < limit).count() as f64 / n;
    Ok(MatchReport {
        bucket_5: bucket(5.0),
        bucket_10: bucket(10.0),
        bucket_15: bucket(15.0),
        pairs,
        slope,
        intercept,
        r_squared,
        unmatched_reference: unmatched,
    })
}

/// Cardinality of the correspondence between an object and the other
/// dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationLabel {
    OneToOne,
    OneToMany,
    ManyToOne,
    ManyToMany,
    None,
}

impl RelationLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RelationLabel::OneToOne => "1-1",
            RelationLabel::OneToMany => "1-n",
            RelationLabel::ManyToOne => "n-1",
            RelationLabel::ManyToMany => "n-p",
            RelationLabel::None => "none",
        }
    }
}

impl std::fmt::Display for RelationLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A geometry taking part in relation classification.
#[derive(Debug, Clone)]
pub enum ClassGeom {
    Line(Polyline),
    Area(MultiPolygon),
}

/// Per-object labels for both datasets.
#[derive(Debug, Clone)]
pub struct RelationReport {
    pub a: Vec<(String, RelationLabel)>,
    pub b: Vec<(String, RelationLabel)>,
}

/// Classify the correspondence cardinality between two datasets.
///
/// Objects correspond when their overlap measure exceeds `min_overlap`
/// times either object's own measure, taken in the shared dimension:
/// length for anything involving a line, area for polygon pairs.
pub fn classify_relation(
    a: &[(String, ClassGeom)],
    b: &[(String, ClassGeom)],
    min_overlap: f64,
) -> Result<RelationReport, EvaluateError> {
    if !(min_overlap > 0.0 && min_overlap < 1.0) {
        return Err(EvaluateError::BadMinOverlap);
    }
    let mut a_links: Vec<Vec<usize>> = vec![Vec::new(); a.len()];
    let mut b_links: Vec<Vec<usize>> = vec![Vec::new(); b.len()];
    for (i, (_, ga)) in a.iter().enumerate() {
        for (j, (_, gb)) in b.iter().enumerate() {
            if corresponds(ga, gb, min_overlap)? {
                a_links[i].push(j);
                b_links[j].push(i);
            }
        }
    }
    let label = |k: usize, others: &[usize], other_links: &[Vec<usize>]| -> RelationLabel {
        let _ = k;
        match others.len() {
            0 => RelationLabel::None,
            1 => {
                if other_links[others[0]].len() == 1 {
                    RelationLabel::OneToOne
                } else {
                    RelationLabel::ManyToOne
                }
            }
            _ => {
                if others.iter().all(|&j| other_links[j].len() == 1) {
                    RelationLabel::OneToMany
                } else {
                    RelationLabel::ManyToMany
                }
            }
        }
    };
    Ok(RelationReport {
        a: a.iter()
            .enumerate()
            .map(|(i, (id, _))| (id.clone(), label(i, &a_links[i], &b_links)))
            .collect(),
        b: b.iter()
            .enumerate()
            .map(|(j, (id, _))| (id.clone(), label(j, &b_links[j], &a_links)))
            .collect(),
    })
}

fn corresponds(x: &ClassGeom, y: &ClassGeom, min_overlap: f64) -> Result<bool, EvaluateError> {
    Ok(match (x, y) {
        (ClassGeom::Line(_), ClassGeom::Line(_)) => false,
        (ClassGeom::Line(l), ClassGeom::Area(g)) | (ClassGeom::Area(g), ClassGeom::Line(l)) => {
            let inside = line_length_inside(l, g);
            inside > min_overlap * l.length()
        }
        (ClassGeom::Area(ga), ClassGeom::Area(gb)) => {
            let inter = boolean(ga, gb, BoolKind::Intersection)?.area();
            inter > min_overlap * ga.area() || inter > min_overlap * gb.area()
        }
    })
}

/// Length of `line` inside `g` (boundary counts as inside).
pub fn line_length_inside(line: &Polyline, g: &MultiPolygon) -> f64 {
    line.length_inside(
        |p| point_in_multipolygon(p, g) != Containment::Outside,
        |a, b| {
            let mut ts = Vec::new();
            let len_sq = a.dist_sq(&b);
            let mut push = |p: Point2| {
                if len_sq > 0.0 {
                    let t = ((p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y)) / len_sq;
                    ts.push(t.clamp(0.0, 1.0));
                }
            };
            for ring in g.rings() {
                for (c, d) in ring.segments() {
                    match segment_intersection(a, b, c, d) {
                        SegSeg::None => {}
                        SegSeg::Point(p) => push(p),
                        SegSeg::Overlap(p, q) => {
                            push(p);
                            push(q);
                        }
                    }
                }
            }
            ts
        },
    )
}

//! Footprint partition: dissolve raw surface polygons, clip Voronoi cells
//! against the footprint, and merge the pieces per owning edge into
//! surface sections.
//!
//! The output is a one-to-one mapping from seeded graph edges to surface
//! sections, with the edge attributes copied across. Overlapping
//! infrastructure (bridges, tunnels) is never duplicated, only flagged.

use crate::geom::{boolean, union_all, BoolKind, GeomError};
use crate::roadgraph::{detect_crossings, Attributes, EdgeId, GraphError, RoadGraph};
use crate::seeding::{SourcePoint, SourcePointId};
use crate::tessellate::VoronoiDiagram;
use crate::{MultiPolygon, Point2, Polygon, Rect};
use std::collections::BTreeMap;

/// The dissolved surface region of the whole network right-of-way.
#[derive(Debug, Clone)]
pub struct Footprint {
    pub geometry: MultiPolygon,
    /// Number of raw input polygons dissolved into this footprint.
    pub source_count: usize,
}

/// Review flags attached to a section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SectionFlag {
    MultiPart,
    Fragmented,
    SuspiciousArea,
    OverlapRisk,
}

impl SectionFlag {
    pub fn as_str(&self) -> &'static str {
        match self {
            SectionFlag::MultiPart => "multi-part",
            SectionFlag::Fragmented => "fragmented",
            SectionFlag::SuspiciousArea => "suspicious-area",
            SectionFlag::OverlapRisk => "overlap-risk",
        }
    }
}

impl std::fmt::Display for SectionFlag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The surface section owned by exactly one graph edge.
#[derive(Debug, Clone)]
pub struct SurfaceSection {
    pub edge: EdgeId,
    pub geometry: MultiPolygon,
    pub area: f64,
    pub attributes: Attributes,
    pub flags: Vec<SectionFlag>,
}

/// Diagnostics produced by the pipeline; warnings never abort a run.
#[derive(Debug, Clone)]
pub enum Warning {
    UnseededEdge { edge: EdgeId },
    MergedSeeds { kept: EdgeId, dropped: EdgeId, position: Point2 },
    Crossing { a: EdgeId, b: EdgeId, position: Point2 },
    SuspiciousArea { edge: EdgeId, ratio: f64 },
    Fragmented { edge: EdgeId, parts: usize },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::UnseededEdge { edge } => {
                write!(f, "edge {edge} received no seeds; no section attributed")
            }
            Warning::MergedSeeds { kept, dropped, position } => write!(
                f,
                "coincident seeds at ({:.3}, {:.3}): kept {kept}, dropped {dropped}",
                position.x, position.y
            ),
            Warning::Crossing { a, b, position } => write!(
                f,
                "edges {a} and {b} cross at ({:.3}, {:.3}) without a shared node (overlap-risk)",
                position.x, position.y
            ),
            Warning::SuspiciousArea { edge, ratio } => write!(
                f,
                "section of edge {edge} has suspicious area ratio {ratio:.3}"
            ),
            Warning::Fragmented { edge, parts } => {
                write!(f, "section of edge {edge} fragmented into {parts} parts")
            }
        }
    }
}

impl Warning {
    pub fn kind(&self) -> &'static str {
        match self {
            Warning::UnseededEdge { .. } => "unseeded-edge",
            Warning::MergedSeeds { .. } => "merged-seeds",
            Warning::Crossing { .. } => "overlap-risk",
            Warning::SuspiciousArea { .. } => "suspicious-area",
            Warning::Fragmented { .. } => "fragmented",
        }
    }
}

/// Outcome of partitioning a footprint.
#[derive(Debug, Clone)]
pub struct PartitionResult {
    pub sections: Vec<SurfaceSection>,
    /// Footprint area not attributed to any section. Clipping residue
    /// only; anything above 1e-6 relative is a defect.
    pub unassigned_area: f64,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, thiserror::Error)]
pub enum PartitionError {
    #[error("no raw surface polygons")]
    NoSurfaceInput,
    #[error("dissolved footprint has zero area")]
    DegenerateFootprint,
    #[error("seeds and diagram are inconsistent: {0}")]
    InconsistentInputs(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Merge raw surface polygons into a single footprint; overlaps merged,
/// shared boundaries erased.
pub fn dissolve(raw: Vec<Polygon>) -> Result<Footprint, PartitionError> {
    if raw.is_empty() {
        return Err(PartitionError::NoSurfaceInput);
    }
    let source_count = raw.len();
    let geometry = union_all(&raw)?;
    if geometry.is_empty() || geometry.area() <= 0.0 {
        return Err(PartitionError::DegenerateFootprint);
    }
    Ok(Footprint {
        geometry,
        source_count,
    })
}

/// Produce one surface section per seeded edge: the union over the edge's
/// seeds of (Voronoi cell intersected with the footprint).
pub fn partition(
    footprint: &Footprint,
    g: &RoadGraph,
    seeds: &[SourcePoint],
    diagram: &VoronoiDiagram,
) -> Result<PartitionResult, PartitionError> {
    // One cell per seed, by id.
    let mut owner_of: BTreeMap<SourcePointId, &EdgeId> = BTreeMap::new();
    for s in seeds {
        if owner_of.insert(s.id, &s.owner_edge).is_some() {
            return Err(PartitionError::InconsistentInputs(format!(
                "duplicate seed id {}",
                s.id
            )));
        }
    }
    if diagram.cells.len() != seeds.len() {
        return Err(PartitionError::InconsistentInputs(format!(
            "{} seeds but {} cells",
            seeds.len(),
            diagram.cells.len()
        )));
    }
    for cell in &diagram.cells {
        if !owner_of.contains_key(&cell.seed) {
            return Err(PartitionError::InconsistentInputs(format!(
                "cell for unknown seed {}",
                cell.seed
            )));
        }
    }

    // Localization data: per footprint part, the bbox of the part and of
    // each hole. Cells are small, so clipping against the nearby rings
    // only keeps the overlay inputs tiny.
    struct PartLoc<'a> {
        part: &'a Polygon,
        bbox: Rect,
        hole_boxes: Vec<Rect>,
    }
    let parts: Vec<PartLoc> = footprint
        .geometry
        .polygons()
        .iter()
        .map(|part| PartLoc {
            part,
            bbox: part.bbox(),
            hole_boxes: part.holes().iter().map(|h| h.bbox()).collect(),
        })
        .collect();

    // Adjacent cells of one edge share bitwise-identical boundaries, so
    // merging them first and clipping once per edge is both cheaper and
    // exactly equivalent to clipping cell by cell.
    let mut cells_of: BTreeMap<&EdgeId, Vec<Polygon>> = BTreeMap::new();
    for cell in &diagram.cells {
        cells_of
            .entry(owner_of[&cell.seed])
            .or_default()
            .push(cell.polygon.clone());
    }

    let mut warnings: Vec<Warning> = Vec::new();
    let mut sections: Vec<SurfaceSection> = Vec::new();
    for edge in g.edges() {
        let Some(cells) = cells_of.get(&edge.id) else {
            warnings.push(Warning::UnseededEdge {
                edge: edge.id.clone(),
            });
            continue;
        };
        let cell_union = union_all(cells)?;
        let bbox = cell_union.bbox();
        let mut local_parts: Vec<Polygon> = Vec::new();
        for pl in &parts {
            if !pl.bbox.intersects(&bbox) {
                continue;
            }
            // A hole whose bbox misses the cells cannot affect the clip.
            let holes: Vec<_> = pl
                .part
                .holes()
                .iter()
                .zip(&pl.hole_boxes)
                .filter(|(_, hb)| hb.intersects(&bbox))
                .map(|(h, _)| h.clone())
                .collect();
            local_parts.push(Polygon::new_unchecked(pl.part.exterior().clone(), holes));
        }
        // An edge whose cells miss the footprint keeps an empty section so
        // the edge-section bijection over seeded edges holds.
        let geometry = boolean(
            &cell_union,
            &MultiPolygon::new(local_parts),
            BoolKind::Intersection,
        )?;
        let area = geometry.area();
        let mut flags = Vec::new();
        if geometry.len() > 1 {
            flags.push(SectionFlag::MultiPart);
        }
        sections.push(SurfaceSection {
            edge: edge.id.clone(),
            geometry,
            area,
            attributes: edge.attributes.clone(),
            flags,
        });
    }

    let assigned: f64 = sections.iter().map(|s| s.area).sum();
    let unassigned_area = footprint.geometry.area() - assigned;

    Ok(PartitionResult {
        sections,
        unassigned_area,
        warnings,
    })
}

/// Attach review flags: sections whose area is far from `edge length x
/// width_hint`, fragmented sections, and overlap risks from mid-span
/// crossings.
pub fn flag_suspicious(
    mut result: PartitionResult,
    g: &RoadGraph,
    width_hint: f64,
) -> PartitionResult {
    for section in &mut result.sections {
        let Ok(edge) = g.edge(&section.edge) else {
            continue;
        };
        let expected = edge.geometry.length() * width_hint;
        let ratio = if expected > 0.0 {
            section.area / expected
        } else {
            f64::INFINITY
        };
        if !(0.2..=5.0).contains(&ratio) {
            push_flag(section, SectionFlag::SuspiciousArea);
            result.warnings.push(Warning::SuspiciousArea {
                edge: section.edge.clone(),
                ratio,
            });
        }
        if section.geometry.len() > 3 {
            push_flag(section, SectionFlag::Fragmented);
            result.warnings.push(Warning::Fragmented {
                edge: section.edge.clone(),
                parts: section.geometry.len(),
            });
        }
    }
    for (a, b, position) in detect_crossings(g) {
        for section in &mut result.sections {
            if section.edge == a || section.edge == b {
                push_flag(section, SectionFlag::OverlapRisk);
            }
        }
        result.warnings.push(Warning::Crossing { a, b, position });
    }
    result
}

fn push_flag(section: &mut SurfaceSection, flag: SectionFlag) {
    if !section.flags.contains(&flag) {
        section.flags.push(flag);
        section.flags.sort();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{area, Containment};
    use crate::roadgraph::{build_graph, InputLine};
    use crate::seeding::{seed_all, SeedingConfig};
    use crate::tessellate::{envelope_for, voronoi};
    use crate::Polyline;

    fn line(id: &str, pts: &[(f64, f64)]) -> InputLine {
        InputLine {
            id: EdgeId(id.to_string()),
            geometry: Polyline::new(pts.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap(),
            attributes: Attributes::new(),
        }
    }

    fn rect(x0: f64, y0: f64, x1: f64, y1: f64) -> Polygon {
        Polygon::from_coords(vec![(x0, y0), (x1, y0), (x1, y1), (x0, y1)], vec![]).unwrap()
    }

    /// Run the full pipeline with default config.
    fn run(lines: Vec<InputLine>, surface: Vec<Polygon>) -> (RoadGraph, PartitionResult, Footprint) {
        let g = build_graph(lines, 0.05).unwrap();
        let footprint = dissolve(surface).unwrap();
        let out = seed_all(&g, &SeedingConfig::default()).unwrap();
        let envelope = envelope_for(&footprint.geometry, 10.0).unwrap();
        let diagram = voronoi(&out.seeds, &envelope).unwrap();
        let result = partition(&footprint, &g, &out.seeds, &diagram).unwrap();
        (g, result, footprint)
    }

    #[test]
    fn dissolve_abutting_squares() {
        let f = dissolve(vec![rect(0.0, 0.0, 1.0, 1.0), rect(1.0, 0.0, 2.0, 1.0)]).unwrap();
        assert_eq!(f.geometry.len(), 1);
        assert_eq!(f.geometry.area(), 2.0);
        assert_eq!(f.source_count, 2);
    }

    #[test]
    fn dissolve_single_polygon_identity() {
        let p = rect(3.0, 4.0, 10.0, 9.0);
        let f = dissolve(vec![p.clone()]).unwrap();
        assert_eq!(f.geometry.len(), 1);
        assert_eq!(f.geometry.polygons()[0], p);
    }

    #[test]
    fn dissolve_junction_plus_arms() {
        // Junction square modeled separately from four arm polygons.
        let f = dissolve(vec![
            rect(-5.0, -5.0, 5.0, 5.0),
            rect(5.0, -5.0, 20.0, 5.0),
            rect(-20.0, -5.0, -5.0, 5.0),
            rect(-5.0, 5.0, 5.0, 20.0),
            rect(-5.0, -20.0, 5.0, -5.0),
        ])
        .unwrap();
        assert_eq!(f.geometry.len(), 1);
        assert_eq!(f.geometry.area(), 700.0);
    }

    #[test]
    fn dissolve_empty_input_rejected() {
        assert!(matches!(dissolve(vec![]), Err(PartitionError::NoSurfaceInput)));
    }

    #[test]
    fn single_edge_owns_whole_footprint() {
        let (_, result, footprint) = run(
            vec![line("only", &[(0.0, 0.0), (100.0, 0.0)])],
            vec![rect(0.0, -5.0, 100.0, 5.0)],
        );
        assert_eq!(result.sections.len(), 1);
        let s = &result.sections[0];
        assert_eq!(s.edge.0, "only");
        assert!((s.area - footprint.geometry.area()).abs() <= 1e-9 * s.area);
        assert!(result.unassigned_area.abs() <= 1e-9 * s.area);
    }

    #[test]
    fn symmetric_cross_four_equal_sections() {
        let arm = 20.0;
        let (_, result, footprint) = run(
            vec![
                line("e", &[(0.0, 0.0), (arm, 0.0)]),
                line("n", &[(0.0, 0.0), (0.0, arm)]),
                line("s", &[(0.0, 0.0), (0.0, -arm)]),
                line("w", &[(0.0, 0.0), (-arm, 0.0)]),
            ],
            vec![rect(-20.0, -5.0, 20.0, 5.0), rect(-5.0, -20.0, 5.0, 20.0)],
        );
        assert_eq!(result.sections.len(), 4);
        for s in &result.sections {
            assert!(
                (s.area - 175.0).abs() <= 1e-6 * 175.0,
                "section {} area {}",
                s.edge,
                s.area
            );
            assert!(s.flags.is_empty());
            // The section's share of the junction square is the diagonal
            // quarter: 25 square meters.
            let central = MultiPolygon::from_polygon(rect(-5.0, -5.0, 5.0, 5.0));
            let share = boolean(&s.geometry, &central, BoolKind::Intersection).unwrap();
            assert!((share.area() - 25.0).abs() <= 1e-6 * 25.0);
        }
        let total: f64 = result.sections.iter().map(|s| s.area).sum();
        assert!((total - footprint.geometry.area()).abs() <= 1e-6 * total);
        assert!(result.unassigned_area.abs() <= 1e-6 * total);
    }

    #[test]
    fn t_junction_bar_sections_equal() {
        let (_, result, _) = run(
            vec![
                line("bar_e", &[(0.0, 0.0), (30.0, 0.0)]),
                line("bar_w", &[(0.0, 0.0), (-30.0, 0.0)]),
                line("stem", &[(0.0, 0.0), (0.0, 30.0)]),
            ],
            vec![rect(-30.0, -3.0, 30.0, 3.0), rect(-3.0, -3.0, 3.0, 30.0)],
        );
        let e = result.sections.iter().find(|s| s.edge.0 == "bar_e").unwrap();
        let w = result.sections.iter().find(|s| s.edge.0 == "bar_w").unwrap();
        assert!((e.area - w.area).abs() <= 1e-9 * e.area);
    }

    #[test]
    fn sections_are_disjoint_and_inside_footprint() {
        let (_, result, footprint) = run(
            vec![
                line("e", &[(0.0, 0.0), (20.0, 0.0)]),
                line("n", &[(0.0, 0.0), (0.0, 20.0)]),
                line("w", &[(0.0, 0.0), (-20.0, 0.0)]),
            ],
            vec![rect(-20.0, -5.0, 20.0, 5.0), rect(-5.0, -5.0, 5.0, 20.0)],
        );
        let fp_area = footprint.geometry.area();
        for (i, a) in result.sections.iter().enumerate() {
            for b in &result.sections[i + 1..] {
                let overlap = boolean(&a.geometry, &b.geometry, BoolKind::Intersection).unwrap();
                assert!(overlap.area() <= 1e-9 * fp_area);
            }
            let outside = boolean(&a.geometry, &footprint.geometry, BoolKind::Difference).unwrap();
            assert!(outside.area() <= 1e-9 * fp_area);
        }
    }

    #[test]
    fn nearest_owner_oracle_on_cross() {
        let arm = 20.0;
        let (_, result, footprint) = run(
            vec![
                line("e", &[(0.0, 0.0), (arm, 0.0)]),
                line("n", &[(0.0, 0.0), (0.0, arm)]),
                line("s", &[(0.0, 0.0), (0.0, -arm)]),
                line("w", &[(0.0, 0.0), (-arm, 0.0)]),
            ],
            vec![rect(-20.0, -5.0, 20.0, 5.0), rect(-5.0, -20.0, 5.0, 20.0)],
        );
        // Recompute the seeds to drive the brute-force oracle.
        let g = build_graph(
            vec![
                line("e", &[(0.0, 0.0), (arm, 0.0)]),
                line("n", &[(0.0, 0.0), (0.0, arm)]),
                line("s", &[(0.0, 0.0), (0.0, -arm)]),
                line("w", &[(0.0, 0.0), (-arm, 0.0)]),
            ],
            0.05,
        )
        .unwrap();
        let seeds = seed_all(&g, &SeedingConfig::default()).unwrap().seeds;
        let samples = crate::geom::sample_points_in(&footprint.geometry, 3000, 42).unwrap();
        let mut checked = 0;
        for p in samples {
            let near_boundary = result.sections.iter().any(|s| {
                s.geometry.rings().any(|ring| {
                    ring.segments()
                        .any(|(a, b)| crate::geom::dist_point_segment(&p, &a, &b) < 1e-6)
                })
            });
            if near_boundary {
                continue;
            }
            let brute_owner = &seeds
                .iter()
                .min_by(|a, b| {
                    p.dist_sq(&a.position)
                        .partial_cmp(&p.dist_sq(&b.position))
                        .unwrap()
                })
                .unwrap()
                .owner_edge;
            let holders: Vec<&EdgeId> = result
                .sections
                .iter()
                .filter(|s| {
                    crate::geom::point_in_multipolygon(&p, &s.geometry) == Containment::Inside
                })
                .map(|s| &s.edge)
                .collect();
            assert_eq!(holders, vec![brute_owner], "at ({}, {})", p.x, p.y);
            checked += 1;
        }
        assert!(checked > 2000);
    }

    #[test]
    fn flag_ratio_bounds() {
        let (g, result, _) = run(
            vec![line("only", &[(0.0, 0.0), (100.0, 0.0)])],
            vec![rect(0.0, -3.0, 100.0, 3.0)],
        );
        // Area 600 over 100 m at width hint 6: ratio 1, no flag.
        let flagged = flag_suspicious(result, &g, 6.0);
        assert!(flagged.sections[0].flags.is_empty());
        // Width hint 0.01 pushes the ratio over 5.
        let (g2, result2, _) = run(
            vec![line("only", &[(0.0, 0.0), (100.0, 0.0)])],
            vec![rect(0.0, -3.0, 100.0, 3.0)],
        );
        let flagged2 = flag_suspicious(result2, &g2, 1000.0);
        assert_eq!(flagged2.sections[0].flags, vec![SectionFlag::SuspiciousArea]);
    }

    #[test]
    fn crossing_marks_overlap_risk() {
        let (g, result, _) = run(
            vec![
                line("a", &[(-20.0, 0.0), (20.0, 0.0)]),
                line("b", &[(0.0, -20.0), (0.0, 20.0)]),
            ],
            vec![rect(-20.0, -3.0, 20.0, 3.0), rect(-3.0, -20.0, 3.0, 20.0)],
        );
        let flagged = flag_suspicious(result, &g, 6.0);
        let overlap_warnings: Vec<_> = flagged
            .warnings
            .iter()
            .filter(|w| w.kind() == "overlap-risk")
            .collect();
        assert_eq!(overlap_warnings.len(), 1);
        for s in &flagged.sections {
            assert!(s.flags.contains(&SectionFlag::OverlapRisk));
        }
    }

    #[test]
    fn jittered_grid_sections_stay_connected() {
        // Street grids put four seeds on a cocircular rectangle between
        // parallel roads; the cells must still merge into one section per
        // edge instead of fragmenting at those quadruple points.
        let synth = crate::evaluate::synthesize(&crate::evaluate::SyntheticSpec {
            kind: crate::evaluate::SynthKind::Grid,
            rows: 4,
            cols: 4,
            block_m: 50.0,
            width_m: 6.0,
            seed: 7,
            gap_m: None,
        })
        .unwrap();
        let g = build_graph(synth.lines, 0.05).unwrap();
        let footprint = dissolve(synth.surface).unwrap();
        let out = seed_all(&g, &SeedingConfig::default()).unwrap();
        let envelope = envelope_for(&footprint.geometry, 10.0).unwrap();
        let diagram = voronoi(&out.seeds, &envelope).unwrap();
        let result = partition(&footprint, &g, &out.seeds, &diagram).unwrap();
        for s in &result.sections {
            assert_eq!(
                s.geometry.len(),
                1,
                "section {} fragmented into {} parts",
                s.edge,
                s.geometry.len()
            );
        }
    }

    #[test]
    fn area_free_function_matches_method() {
        let p = rect(0.0, 0.0, 4.0, 2.5);
        assert_eq!(area(&MultiPolygon::from_polygon(p.clone())), p.area());
    }
}

//! Voronoi seed generation along graph edges.
//!
//! Every junction (degree >= 2) gets one buffer source point per incident
//! edge, placed where that edge's polyline first exits the buffer circle
//! around the node. The circle radius adapts to close junctions: a fixed
//! fraction of the shortest incident edge, capped at `radius_max`.
//! Intermediate source points are added along each edge at a fixed spacing
//! to stabilize the split between close parallel roadways.

use crate::geom::grid::GridIndex;
use crate::roadgraph::{EdgeId, GraphError, NodeId, RoadGraph};
use crate::Point2;
use std::collections::BTreeMap;

/// Global identifier of a source point; dense in the output of `seed_all`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourcePointId(pub u64);

impl std::fmt::Display for SourcePointId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "s{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceKind {
    Buffer,
    Intermediate,
}

impl SourceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SourceKind::Buffer => "buffer",
            SourceKind::Intermediate => "intermediate",
        }
    }
}

/// A Voronoi seed tagged with the edge that owns it.
#[derive(Debug, Clone)]
pub struct SourcePoint {
    pub id: SourcePointId,
    pub position: Point2,
    pub owner_edge: EdgeId,
    pub kind: SourceKind,
    /// Junction the buffer circle was drawn around (buffer kind only).
    pub origin_node: Option<NodeId>,
    /// Arclength along the owner edge at which the point sits.
    pub arclength: f64,
}

/// Seed generation parameters.
#[derive(Debug, Clone, Copy)]
pub struct SeedingConfig {
    /// Buffer circle cap in meters; half the narrowest urban roadway.
    pub radius_max: f64,
    /// Fraction of the shortest incident edge used near close junctions.
    pub radius_ratio: f64,
    /// Spacing of intermediate points along edges, meters.
    pub spacing: f64,
}

impl Default for SeedingConfig {
    fn default() -> Self {
        SeedingConfig {
            radius_max: 5.0,
            radius_ratio: 0.4,
            spacing: 10.0,
        }
    }
}

impl SeedingConfig {
    pub fn validate(&self) -> Result<(), SeedError> {
        if !(self.radius_max > 0.0) {
            return Err(SeedError::BadConfig("radius_max must be positive"));
        }
        if !(self.radius_ratio > 0.0 && self.radius_ratio <= 0.5) {
            return Err(SeedError::BadConfig("radius_ratio must be in (0, 0.5]"));
        }
        if !(self.spacing > 0.0) {
            return Err(SeedError::BadConfig("spacing must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SeedError {
    #[error("invalid seeding config: {0}")]
    BadConfig(&'static str),
    #[error("node {node} has degree {degree}, buffer points need degree >= 2")]
    DegreeTooLow { node: NodeId, degree: usize },
    #[error("edge {edge} never exits the buffer circle of node {node}")]
    EdgeInsideBuffer { edge: EdgeId, node: NodeId },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Buffer radius for a junction: `min(radius_max, radius_ratio * shortest
/// incident edge length)`.
pub fn node_radius(g: &RoadGraph, node: NodeId, cfg: &SeedingConfig) -> Result<f64, SeedError> {
    cfg.validate()?;
    let incident = g.incident_edges(node)?;
    let shortest = incident
        .iter()
        .map(|(_, l)| *l)
        .fold(f64::INFINITY, f64::min);
    Ok(cfg.radius_max.min(cfg.radius_ratio * shortest))
}

/// One buffer source point per edge incidence at a junction of degree >= 2:
/// the first intersection of the edge's polyline with the node's buffer
/// circle, walking away from the node.
pub fn buffer_points(
    g: &RoadGraph,
    node: NodeId,
    cfg: &SeedingConfig,
) -> Result<Vec<SourcePoint>, SeedError> {
    let n = g.node(node)?;
    if n.degree < 2 {
        return Err(SeedError::DegreeTooLow {
            node,
            degree: n.degree,
        });
    }
    let radius = node_radius(g, node, cfg)?;
    let mut out = Vec::new();
    let mut incident = g.incident_edges(node)?;
    incident.sort_by(|a, b| a.0.cmp(&b.0));
    for (edge_id, _) in incident {
        let edge = g.edge(&edge_id)?;
        let len = edge.geometry.length();
        let mut ends = Vec::new();
        if edge.endpoints.0 == node {
            ends.push(false);
        }
        if edge.endpoints.1 == node {
            ends.push(true); // loop edges contribute from both ends
        }
        for from_end in ends {
            let walk = if from_end {
                edge.geometry.reversed()
            } else {
                edge.geometry.clone()
            };
            let hits = walk.circle_intersections_with_arclength(n.position, radius);
            let Some((s, p)) = hits.first() else {
                return Err(SeedError::EdgeInsideBuffer {
                    edge: edge_id.clone(),
                    node,
                });
            };
            let arclength = if from_end { len - s } else { *s };
            out.push(SourcePoint {
                id: SourcePointId(out.len() as u64),
                position: *p,
                owner_edge: edge_id.clone(),
                kind: SourceKind::Buffer,
                origin_node: Some(node),
                arclength,
            });
        }
    }
    Ok(out)
}

/// Intermediate source points along an edge at `spacing` intervals.
///
/// Points sit at arclength `r_start + k * spacing` for `k >= 1`, strictly
/// before `length - r_end`. `radii` carries the buffer radius per junction
/// node; endpoints missing from the map (dead ends, which get no buffer
/// points) contribute no offset.
pub fn intermediate_points(
    g: &RoadGraph,
    edge_id: &EdgeId,
    cfg: &SeedingConfig,
    radii: &BTreeMap<NodeId, f64>,
) -> Result<Vec<SourcePoint>, SeedError> {
    cfg.validate()?;
    let edge = g.edge(edge_id)?;
    let len = edge.geometry.length();
    let r_start = radii.get(&edge.endpoints.0).copied().unwrap_or(0.0);
    let r_end = radii.get(&edge.endpoints.1).copied().unwrap_or(0.0);
    let limit = len - r_end;
    let mut out = Vec::new();
    let mut k = 1usize;
    loop {
        let s = r_start + cfg.spacing * k as f64;
        if s >= limit {
            break;
        }
        out.push(SourcePoint {
            id: SourcePointId(out.len() as u64),
            position: edge.geometry.point_at_arclength(s),
            owner_edge: edge_id.clone(),
            kind: SourceKind::Intermediate,
            origin_node: None,
            arclength: s,
        });
        k += 1;
    }
    Ok(out)
}

/// Result of seeding a whole graph.
#[derive(Debug)]
pub struct SeedingOutcome {
    /// Seeds ordered by (owner edge id, arclength), ids dense from zero.
    pub seeds: Vec<SourcePoint>,
    /// Edges that ended up with no seed at all (both buffer circles consume
    /// them); their junction shares still appear in neighboring sections
    /// but no section can be attributed to them.
    pub unseeded: Vec<EdgeId>,
    /// Coincident seeds merged away: (kept owner, dropped owner, position).
    pub merged: Vec<(EdgeId, EdgeId, Point2)>,
}

/// Generate all seeds for a graph: buffer points for every junction of
/// degree >= 2 plus intermediate points for every edge.
pub fn seed_all(g: &RoadGraph, cfg: &SeedingConfig) -> Result<SeedingOutcome, SeedError> {
    cfg.validate()?;
    let mut radii: BTreeMap<NodeId, f64> = BTreeMap::new();
    for node in g.nodes() {
        if node.degree >= 2 {
            radii.insert(node.id, node_radius(g, node.id, cfg)?);
        }
    }

    let mut sites: Vec<SourcePoint> = Vec::new();
    for node in g.nodes() {
        if node.degree >= 2 {
            sites.extend(buffer_points(g, node.id, cfg)?);
        }
    }
    for edge in g.edges() {
        sites.extend(intermediate_points(g, &edge.id, cfg, &radii)?);
    }

    // Deterministic global order, then merge coincident positions keeping
    // the lower owner edge id.
    sites.sort_by(|a, b| {
        a.owner_edge
            .cmp(&b.owner_edge)
            .then(a.arclength.partial_cmp(&b.arclength).unwrap())
    });
    let mut grid = GridIndex::new(1.0);
    for (i, s) in sites.iter().enumerate() {
        grid.insert_point(i as u32, &s.position);
    }
    let mut dropped = vec![false; sites.len()];
    let mut merged = Vec::new();
    for i in 0..sites.len() {
        if dropped[i] {
            continue;
        }
        for j in grid.query_within(&sites[i].position, crate::geom::MERGE_EPS) {
            let j = j as usize;
            if j == i || dropped[j] {
                continue;
            }
            if sites[i].position.dist(&sites[j].position) <= crate::geom::MERGE_EPS && j > i {
                dropped[j] = true;
                log::warn!(
                    "coincident seeds at ({:.3}, {:.3}): keeping {}, dropping {}",
                    sites[i].position.x,
                    sites[i].position.y,
                    sites[i].owner_edge,
                    sites[j].owner_edge
                );
                merged.push((
                    sites[i].owner_edge.clone(),
                    sites[j].owner_edge.clone(),
                    sites[i].position,
                ));
            }
        }
    }
    let mut seeds: Vec<SourcePoint> = sites
        .into_iter()
        .zip(dropped)
        .filter(|(_, d)| !d)
        .map(|(s, _)| s)
        .collect();
    for (i, s) in seeds.iter_mut().enumerate() {
        s.id = SourcePointId(i as u64);
    }

    let seeded: std::collections::BTreeSet<&EdgeId> = seeds.iter().map(|s| &s.owner_edge).collect();
    let unseeded: Vec<EdgeId> = g
        .edges()
        .iter()
        .map(|e| e.id.clone())
        .filter(|id| !seeded.contains(id))
        .collect();

    Ok(SeedingOutcome {
        seeds,
        unseeded,
        merged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roadgraph::{build_graph, Attributes, InputLine};
    use crate::Polyline;

    fn line(id: &str, pts: &[(f64, f64)]) -> InputLine {
        InputLine {
            id: EdgeId(id.to_string()),
            geometry: Polyline::new(pts.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap(),
            attributes: Attributes::new(),
        }
    }

    fn cross(arm: f64) -> RoadGraph {
        build_graph(
            vec![
                line("e", &[(0.0, 0.0), (arm, 0.0)]),
                line("n", &[(0.0, 0.0), (0.0, arm)]),
                line("s", &[(0.0, 0.0), (0.0, -arm)]),
                line("w", &[(0.0, 0.0), (-arm, 0.0)]),
            ],
            0.05,
        )
        .unwrap()
    }

    fn center(g: &RoadGraph) -> NodeId {
        g.nodes().iter().find(|n| n.degree == 4).unwrap().id
    }

    #[test]
    fn radius_capped_at_max() {
        let g = build_graph(
            vec![
                line("a", &[(0.0, 0.0), (30.0, 0.0)]),
                line("b", &[(0.0, 0.0), (0.0, 40.0)]),
                line("c", &[(0.0, 0.0), (-50.0, 0.0)]),
            ],
            0.05,
        )
        .unwrap();
        let hub = g.nodes().iter().find(|n| n.degree == 3).unwrap().id;
        assert_eq!(node_radius(&g, hub, &SeedingConfig::default()).unwrap(), 5.0);
    }

    #[test]
    fn radius_shrinks_for_short_edges() {
        let g = build_graph(
            vec![
                line("short", &[(0.0, 0.0), (8.0, 0.0)]),
                line("long", &[(0.0, 0.0), (-30.0, 0.0)]),
            ],
            0.05,
        )
        .unwrap();
        let hub = g
            .nodes()
            .iter()
            .find(|n| n.position == Point2::new(0.0, 0.0))
            .unwrap()
            .id;
        let r = node_radius(&g, hub, &SeedingConfig::default()).unwrap();
        assert_eq!(r, 0.4 * 8.0);
        assert_eq!(r, 3.2);
    }

    #[test]
    fn dead_end_radius_uses_its_single_edge() {
        let g = build_graph(vec![line("a", &[(0.0, 0.0), (100.0, 0.0)])], 0.05).unwrap();
        let leaf = g.nodes()[0].id;
        assert_eq!(node_radius(&g, leaf, &SeedingConfig::default()).unwrap(), 5.0);
    }

    #[test]
    fn buffer_points_on_symmetric_cross() {
        let g = cross(20.0);
        let pts = buffer_points(&g, center(&g), &SeedingConfig::default()).unwrap();
        assert_eq!(pts.len(), 4);
        let mut got: Vec<(String, Point2)> = pts
            .iter()
            .map(|p| (p.owner_edge.0.clone(), p.position))
            .collect();
        got.sort_by(|a, b| a.0.cmp(&b.0));
        assert_eq!(
            got,
            vec![
                ("e".into(), Point2::new(5.0, 0.0)),
                ("n".into(), Point2::new(0.0, 5.0)),
                ("s".into(), Point2::new(0.0, -5.0)),
                ("w".into(), Point2::new(-5.0, 0.0)),
            ]
        );
        for p in &pts {
            assert!((p.position.dist(&Point2::new(0.0, 0.0)) - 5.0).abs() < 1e-6);
            assert_eq!(p.kind, SourceKind::Buffer);
            assert_eq!(p.origin_node, Some(center(&g)));
        }
    }

    #[test]
    fn buffer_points_on_t_junction() {
        let g = build_graph(
            vec![
                line("e", &[(0.0, 0.0), (20.0, 0.0)]),
                line("w", &[(0.0, 0.0), (-20.0, 0.0)]),
                line("n", &[(0.0, 0.0), (0.0, 20.0)]),
            ],
            0.05,
        )
        .unwrap();
        let hub = g.nodes().iter().find(|n| n.degree == 3).unwrap().id;
        let pts = buffer_points(&g, hub, &SeedingConfig::default()).unwrap();
        let mut got: Vec<Point2> = pts.iter().map(|p| p.position).collect();
        got.sort_by(|a, b| a.lex_cmp(b));
        assert_eq!(
            got,
            vec![Point2::new(-5.0, 0.0), Point2::new(0.0, 5.0), Point2::new(5.0, 0.0)]
        );
    }

    #[test]
    fn buffer_points_on_degree_two_node() {
        let g = build_graph(
            vec![
                line("a", &[(0.0, 0.0), (20.0, 0.0)]),
                line("b", &[(0.0, 0.0), (-20.0, 0.0)]),
            ],
            0.05,
        )
        .unwrap();
        let hub = g.nodes().iter().find(|n| n.degree == 2).unwrap().id;
        let pts = buffer_points(&g, hub, &SeedingConfig::default()).unwrap();
        let mut got: Vec<Point2> = pts.iter().map(|p| p.position).collect();
        got.sort_by(|a, b| a.lex_cmp(b));
        assert_eq!(got, vec![Point2::new(-5.0, 0.0), Point2::new(5.0, 0.0)]);
    }

    #[test]
    fn dead_end_rejects_buffer_points() {
        let g = build_graph(vec![line("a", &[(0.0, 0.0), (100.0, 0.0)])], 0.05).unwrap();
        let leaf = g.nodes()[0].id;
        assert!(matches!(
            buffer_points(&g, leaf, &SeedingConfig::default()),
            Err(SeedError::DegreeTooLow { .. })
        ));
    }

    #[test]
    fn intermediate_spacing_both_junctions() {
        // 35 m edge between two junctions with radius 5 at both ends:
        // usable span [5, 30), points at 15 and 25.
        let g = build_graph(
            vec![
                line("mid", &[(0.0, 0.0), (35.0, 0.0)]),
                line("l1", &[(0.0, 0.0), (0.0, 30.0)]),
                line("l2", &[(0.0, 0.0), (0.0, -30.0)]),
                line("r1", &[(35.0, 0.0), (35.0, 30.0)]),
                line("r2", &[(35.0, 0.0), (35.0, -30.0)]),
            ],
            0.05,
        )
        .unwrap();
        let cfg = SeedingConfig::default();
        let mut radii = BTreeMap::new();
        for n in g.nodes() {
            if n.degree >= 2 {
                radii.insert(n.id, node_radius(&g, n.id, &cfg).unwrap());
            }
        }
        let pts = intermediate_points(&g, &EdgeId("mid".into()), &cfg, &radii).unwrap();
        let got: Vec<f64> = pts.iter().map(|p| p.arclength).collect();
        assert_eq!(got, vec![15.0, 25.0]);
    }

    #[test]
    fn short_edge_gets_no_intermediates() {
        let mut radii = BTreeMap::new();
        let g = build_graph(
            vec![
                line("mid", &[(0.0, 0.0), (12.0, 0.0)]),
                line("l1", &[(0.0, 0.0), (0.0, 12.0)]),
                line("l2", &[(0.0, 0.0), (0.0, -12.0)]),
                line("r1", &[(12.0, 0.0), (12.0, 12.0)]),
                line("r2", &[(12.0, 0.0), (12.0, -12.0)]),
            ],
            0.05,
        )
        .unwrap();
        let cfg = SeedingConfig::default();
        for n in g.nodes() {
            if n.degree >= 2 {
                radii.insert(n.id, node_radius(&g, n.id, &cfg).unwrap());
            }
        }
        // Radii 4.8 both sides: usable span [4.8, 7.2) is under one spacing.
        assert_eq!(radii.values().filter(|&&r| (r - 4.8).abs() < 1e-12).count(), 2);
        let pts = intermediate_points(&g, &EdgeId("mid".into()), &cfg, &radii).unwrap();
        assert!(pts.is_empty());
    }

    #[test]
    fn hundred_meter_edge_between_junctions() {
        let g = build_graph(
            vec![
                line("mid", &[(0.0, 0.0), (100.0, 0.0)]),
                line("l1", &[(0.0, 0.0), (0.0, 30.0)]),
                line("l2", &[(0.0, 0.0), (0.0, -30.0)]),
                line("r1", &[(100.0, 0.0), (100.0, 30.0)]),
                line("r2", &[(100.0, 0.0), (100.0, -30.0)]),
            ],
            0.05,
        )
        .unwrap();
        let cfg = SeedingConfig::default();
        let mut radii = BTreeMap::new();
        for n in g.nodes() {
            if n.degree >= 2 {
                radii.insert(n.id, node_radius(&g, n.id, &cfg).unwrap());
            }
        }
        let pts = intermediate_points(&g, &EdgeId("mid".into()), &cfg, &radii).unwrap();
        let got: Vec<f64> = pts.iter().map(|p| p.arclength).collect();
        assert_eq!(got, vec![15.0, 25.0, 35.0, 45.0, 55.0, 65.0, 75.0, 85.0]);
    }

    #[test]
    fn isolated_edge_seeds_are_intermediate_only() {
        let g = build_graph(vec![line("a", &[(0.0, 0.0), (100.0, 0.0)])], 0.05).unwrap();
        let out = seed_all(&g, &SeedingConfig::default()).unwrap();
        assert!(out.seeds.iter().all(|s| s.kind == SourceKind::Intermediate));
        // Dead ends carry no buffer radius, so points run 10, 20, .., 90.
        let got: Vec<f64> = out.seeds.iter().map(|s| s.arclength).collect();
        assert_eq!(got, (1..=9).map(|k| 10.0 * k as f64).collect::<Vec<_>>());
        assert!(out.unseeded.is_empty());
    }

    #[test]
    fn symmetric_cross_eight_seeds() {
        let g = cross(20.0);
        let out = seed_all(&g, &SeedingConfig::default()).unwrap();
        assert_eq!(out.seeds.len(), 8);
        let buffers = out.seeds.iter().filter(|s| s.kind == SourceKind::Buffer).count();
        assert_eq!(buffers, 4);
        // One intermediate per arm at arclength 15 (usable span [5, 20)).
        for s in out.seeds.iter().filter(|s| s.kind == SourceKind::Intermediate) {
            assert_eq!(s.arclength, 15.0);
        }
        // Ids are dense and ordered by (edge, arclength).
        for (i, s) in out.seeds.iter().enumerate() {
            assert_eq!(s.id, SourcePointId(i as u64));
        }
    }

    #[test]
    fn parallel_edges_own_their_seeds() {
        let g = build_graph(
            vec![
                line("top", &[(0.0, 4.0), (100.0, 4.0)]),
                line("bot", &[(0.0, -4.0), (100.0, -4.0)]),
            ],
            0.05,
        )
        .unwrap();
        let out = seed_all(&g, &SeedingConfig::default()).unwrap();
        for s in &out.seeds {
            let expect_y = if s.owner_edge.0 == "top" { 4.0 } else { -4.0 };
            assert_eq!(s.position.y, expect_y);
        }
        assert_eq!(out.seeds.len(), 18);
        assert!(out.merged.is_empty());
    }

    #[test]
    fn buffer_count_matches_degree() {
        for lines in [
            vec![
                line("a", &[(0.0, 0.0), (25.0, 0.0)]),
                line("b", &[(0.0, 0.0), (0.0, 25.0)]),
                line("c", &[(0.0, 0.0), (-25.0, 0.0)]),
                line("d", &[(0.0, 0.0), (0.0, -25.0)]),
                line("e", &[(0.0, 0.0), (20.0, 20.0)]),
            ],
            vec![
                line("a", &[(0.0, 0.0), (25.0, 0.0)]),
                line("b", &[(0.0, 0.0), (0.0, 25.0)]),
            ],
        ] {
            let g = build_graph(lines, 0.05).unwrap();
            let hub = g.nodes().iter().max_by_key(|n| n.degree).unwrap();
            let pts = buffer_points(&g, hub.id, &SeedingConfig::default()).unwrap();
            assert_eq!(pts.len(), hub.degree);
            let r = node_radius(&g, hub.id, &SeedingConfig::default()).unwrap();
            for p in &pts {
                assert!((p.position.dist(&hub.position) - r).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn seeds_lie_on_their_owner_polyline() {
        let g = build_graph(
            vec![
                line("bent", &[(0.0, 0.0), (30.0, 10.0), (60.0, 0.0)]),
                line("side", &[(0.0, 0.0), (0.0, -40.0)]),
                line("other", &[(0.0, 0.0), (-35.0, 5.0)]),
            ],
            0.05,
        )
        .unwrap();
        let out = seed_all(&g, &SeedingConfig::default()).unwrap();
        assert!(!out.seeds.is_empty());
        for s in &out.seeds {
            let edge = g.edge(&s.owner_edge).unwrap();
            let d = edge
                .geometry
                .points()
                .windows(2)
                .map(|w| crate::geom::dist_point_segment(&s.position, &w[0], &w[1]))
                .fold(f64::INFINITY, f64::min);
            assert!(d < 1e-6, "seed {} is {d} m off its edge", s.id);
            if let Some(node) = s.origin_node {
                let r = node_radius(&g, node, &SeedingConfig::default()).unwrap();
                let dist = s.position.dist(&g.node(node).unwrap().position);
                assert!((dist - r).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn endpoint_circles_never_overlap_along_edge() {
        let g = build_graph(
            vec![
                line("mid", &[(0.0, 0.0), (8.0, 0.0)]),
                line("l1", &[(0.0, 0.0), (0.0, 30.0)]),
                line("l2", &[(0.0, 0.0), (0.0, -30.0)]),
                line("r1", &[(8.0, 0.0), (8.0, 30.0)]),
                line("r2", &[(8.0, 0.0), (8.0, -30.0)]),
            ],
            0.05,
        )
        .unwrap();
        let cfg = SeedingConfig::default();
        for e in g.edges() {
            let (a, b) = e.endpoints;
            let ra = node_radius(&g, a, &cfg).unwrap();
            let rb = node_radius(&g, b, &cfg).unwrap();
            assert!(ra + rb <= e.geometry.length() + 1e-12);
        }
    }
}

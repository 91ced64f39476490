//! Topological road graph built from raw linear features.
//!
//! Endpoints within the snap tolerance are clustered into shared nodes at
//! the cluster centroid, edge geometry is pinned onto the node positions,
//! and mid-span crossings (bridges, tunnels, unnoded interchanges) are
//! detected and reported rather than auto-noded.

use crate::geom::grid::GridIndex;
use crate::geom::{segment_intersection, GeomError, SegSeg, MERGE_EPS};
use crate::{Point2, Polyline, Rect};
use std::collections::BTreeMap;

/// Stable identifier of an input line / graph edge.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub String);

impl std::fmt::Display for EdgeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EdgeId {
    fn from(s: &str) -> Self {
        EdgeId(s.to_string())
    }
}

/// Internal node identifier, dense from zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "n{}", self.0)
    }
}

/// Opaque feature attributes carried through to the output sections.
pub type Attributes = BTreeMap<String, serde_json::Value>;

/// A raw input line before graph construction.
#[derive(Debug, Clone)]
pub struct InputLine {
    pub id: EdgeId,
    pub geometry: Polyline,
    pub attributes: Attributes,
}

#[derive(Debug, Clone)]
pub struct RoadNode {
    pub id: NodeId,
    pub position: Point2,
    pub degree: usize,
}

#[derive(Debug, Clone)]
pub struct RoadEdge {
    pub id: EdgeId,
    pub geometry: Polyline,
    pub endpoints: (NodeId, NodeId),
    pub attributes: Attributes,
}

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("snap tolerance must be positive")]
    BadTolerance,
    #[error("no input lines")]
    NoInput,
    #[error("duplicate edge id {0}")]
    DuplicateEdgeId(EdgeId),
    #[error("edge {0} collapses to zero length after snapping")]
    ZeroLengthAfterSnap(EdgeId),
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// The topological road graph. Immutable once built.
pub struct RoadGraph {
    nodes: Vec<RoadNode>,
    edges: Vec<RoadEdge>,
    edge_lookup: BTreeMap<EdgeId, usize>,
    incident: Vec<Vec<usize>>,
    seg_index: GridIndex,
    segments: Vec<(usize, Point2, Point2)>,
    snap_tol: f64,
}

impl RoadGraph {
    pub fn nodes(&self) -> &[RoadNode] {
        &self.nodes
    }

    pub fn edges(&self) -> &[RoadEdge] {
        &self.edges
    }

    pub fn snap_tol(&self) -> f64 {
        self.snap_tol
    }

    pub fn node(&self, id: NodeId) -> Result<&RoadNode, GraphError> {
        self.nodes.get(id.0 as usize).ok_or(GraphError::UnknownNode(id))
    }

    pub fn edge(&self, id: &EdgeId) -> Result<&RoadEdge, GraphError> {
        self.edge_lookup
            .get(id)
            .map(|&i| &self.edges[i])
            .ok_or_else(|| GraphError::UnknownEdge(id.clone()))
    }

    /// Edges touching `node`, with their full polyline lengths, ordered by
    /// edge id. A loop edge appears once.
    pub fn incident_edges(&self, node: NodeId) -> Result<Vec<(EdgeId, f64)>, GraphError> {
        let list = self
            .incident
            .get(node.0 as usize)
            .ok_or(GraphError::UnknownNode(node))?;
        let mut out: Vec<(EdgeId, f64)> = list
            .iter()
            .map(|&i| (self.edges[i].id.clone(), self.edges[i].geometry.length()))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }
}

/// Snap raw lines into a topological graph.
///
/// Endpoint clusters are merged to a fixed point, so no two final node
/// positions are within `snap_tol` of each other and rebuilding from the
/// built graph's own edges is the identity.
pub fn build_graph(lines: Vec<InputLine>, snap_tol: f64) -> Result<RoadGraph, GraphError> {
    if !(snap_tol > 0.0) {
        return Err(GraphError::BadTolerance);
    }
    if lines.is_empty() {
        return Err(GraphError::NoInput);
    }
    {
        let mut seen = std::collections::BTreeSet::new();
        for l in &lines {
            if !seen.insert(&l.id) {
                return Err(GraphError::DuplicateEdgeId(l.id.clone()));
            }
        }
    }

    // Endpoint list: two per line, in input order.
    let endpoints: Vec<Point2> = lines
        .iter()
        .flat_map(|l| [l.geometry.first(), l.geometry.last()])
        .collect();

    // Union-find clustering of endpoints within the tolerance, iterated on
    // cluster centroids until no two centroids are that close.
    let mut parent: Vec<u32> = (0..endpoints.len() as u32).collect();
    fn find(parent: &mut [u32], x: u32) -> u32 {
        let mut r = x;
        while parent[r as usize] != r {
            r = parent[r as usize];
        }
        let mut c = x;
        while parent[c as usize] != r {
            let n = parent[c as usize];
            parent[c as usize] = r;
            c = n;
        }
        r
    }

    loop {
        let mut members: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for i in 0..endpoints.len() as u32 {
            members.entry(find(&mut parent, i)).or_default().push(i);
        }
        let centroid = |ids: &[u32]| -> Point2 {
            let mut x = 0.0;
            let mut y = 0.0;
            for &i in ids {
                x += endpoints[i as usize].x;
                y += endpoints[i as usize].y;
            }
            Point2::new(x / ids.len() as f64, y / ids.len() as f64)
        };
        let roots: Vec<u32> = members.keys().copied().collect();
        let cents: Vec<Point2> = roots.iter().map(|r| centroid(&members[r])).collect();

        let mut grid = GridIndex::new(snap_tol.max(1e-6));
        for (i, c) in cents.iter().enumerate() {
            grid.insert_point(i as u32, c);
        }
        let mut merged_any = false;
        for (i, c) in cents.iter().enumerate() {
            for j in grid.query_within(c, snap_tol) {
                let j = j as usize;
                if j <= i {
                    continue;
                }
                if c.dist(&cents[j]) <= snap_tol {
                    let ri = find(&mut parent, roots[i]);
                    let rj = find(&mut parent, roots[j]);
                    if ri != rj {
                        parent[ri as usize] = rj;
                        merged_any = true;
                    }
                }
            }
        }
        if !merged_any {
            break;
        }
    }

    // Final clusters, ordered by centroid for stable node ids.
    let mut members: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for i in 0..endpoints.len() as u32 {
        members.entry(find(&mut parent, i)).or_default().push(i);
    }
    let mut clusters: Vec<(Point2, Vec<u32>)> = members
        .into_values()
        .map(|ids| {
            let mut x = 0.0;
            let mut y = 0.0;
            for &i in &ids {
                x += endpoints[i as usize].x;
                y += endpoints[i as usize].y;
            }
            (Point2::new(x / ids.len() as f64, y / ids.len() as f64), ids)
        })
        .collect();
    clusters.sort_by(|a, b| a.0.lex_cmp(&b.0));

    let mut node_of_endpoint = vec![0u32; endpoints.len()];
    for (node_idx, (_, ids)) in clusters.iter().enumerate() {
        for &i in ids {
            node_of_endpoint[i as usize] = node_idx as u32;
        }
    }

    // Pin edge geometry to node positions and compute degrees.
    let mut nodes: Vec<RoadNode> = clusters
        .iter()
        .enumerate()
        .map(|(i, (pos, _))| RoadNode {
            id: NodeId(i as u32),
            position: *pos,
            degree: 0,
        })
        .collect();
    let mut edges: Vec<RoadEdge> = Vec::with_capacity(lines.len());
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (li, line) in lines.into_iter().enumerate() {
        let a = NodeId(node_of_endpoint[2 * li]);
        let b = NodeId(node_of_endpoint[2 * li + 1]);
        let geometry = line
            .geometry
            .with_endpoints(nodes[a.0 as usize].position, nodes[b.0 as usize].position)
            .map_err(|_| GraphError::ZeroLengthAfterSnap(line.id.clone()))?;
        if geometry.length() <= MERGE_EPS {
            return Err(GraphError::ZeroLengthAfterSnap(line.id.clone()));
        }
        let e_idx = edges.len();
        nodes[a.0 as usize].degree += 1;
        nodes[b.0 as usize].degree += 1;
        incident[a.0 as usize].push(e_idx);
        if b != a {
            incident[b.0 as usize].push(e_idx);
        }
        edges.push(RoadEdge {
            id: line.id,
            geometry,
            endpoints: (a, b),
            attributes: line.attributes,
        });
    }

    // Spatial index over edge segments for crossing queries.
    let mut segments: Vec<(usize, Point2, Point2)> = Vec::new();
    for (ei, e) in edges.iter().enumerate() {
        for w in e.geometry.points().windows(2) {
            segments.push((ei, w[0], w[1]));
        }
    }
    let mean_len =
        segments.iter().map(|(_, a, b)| a.dist(b)).sum::<f64>() / segments.len().max(1) as f64;
    let mut seg_index = GridIndex::new(mean_len.max(snap_tol));
    for (si, (_, a, b)) in segments.iter().enumerate() {
        seg_index.insert(si as u32, &Rect::of_points([*a, *b].iter()));
    }

    let edge_lookup = edges
        .iter()
        .enumerate()
        .map(|(i, e)| (e.id.clone(), i))
        .collect();

    Ok(RoadGraph {
        nodes,
        edges,
        edge_lookup,
        incident,
        seg_index,
        segments,
        snap_tol,
    })
}

/// All pairs of edges whose interiors intersect without sharing a node
/// there. These flag bridges, tunnels and unnoded interchanges that the
/// partition cannot split correctly; they are reported, never auto-noded.
pub fn detect_crossings(g: &RoadGraph) -> Vec<(EdgeId, EdgeId, Point2)> {
    let mut found: Vec<(usize, usize, Point2)> = Vec::new();
    for (si, &(ei, a, b)) in g.segments.iter().enumerate() {
        let rect = Rect::of_points([a, b].iter()).expanded(MERGE_EPS);
        for sj in g.seg_index.query_rect(&rect) {
            let sj = sj as usize;
            if sj <= si {
                continue;
            }
            let (ej, c, d) = g.segments[sj];
            if ej == ei {
                continue;
            }
            let hits: Vec<Point2> = match segment_intersection(a, b, c, d) {
                SegSeg::None => continue,
                SegSeg::Point(p) => vec![p],
                SegSeg::Overlap(p, q) => vec![Point2::new((p.x + q.x) / 2.0, (p.y + q.y) / 2.0)],
            };
            for p in hits {
                // A touch at a polyline terminal is a boundary contact,
                // not an interior crossing.
                let terminals = [
                    g.edges[ei].geometry.first(),
                    g.edges[ei].geometry.last(),
                    g.edges[ej].geometry.first(),
                    g.edges[ej].geometry.last(),
                ];
                if terminals.iter().any(|t| t.dist(&p) <= MERGE_EPS) {
                    continue;
                }
                found.push((ei.min(ej), ei.max(ej), p));
            }
        }
    }
    let mut out: Vec<(EdgeId, EdgeId, Point2)> = found
        .into_iter()
        .map(|(i, j, p)| (g.edges[i].id.clone(), g.edges[j].id.clone(), p))
        .collect();
    out.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)).then(a.2.lex_cmp(&b.2)));
    out.dedup_by(|a, b| a.0 == b.0 && a.1 == b.1 && a.2.dist(&b.2) <= MERGE_EPS);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(id: &str, pts: &[(f64, f64)]) -> InputLine {
        InputLine {
            id: EdgeId(id.to_string()),
            geometry: Polyline::new(pts.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap(),
            attributes: Attributes::new(),
        }
    }

    #[test]
    fn cross_junction_snaps_to_one_node() {
        let g = build_graph(
            vec![
                line("e", &[(0.01, 0.0), (20.0, 0.0)]),
                line("w", &[(-0.01, 0.0), (-20.0, 0.0)]),
                line("n", &[(0.0, 0.01), (0.0, 20.0)]),
                line("s", &[(0.0, -0.01), (0.0, -20.0)]),
            ],
            0.05,
        )
        .unwrap();
        assert_eq!(g.nodes().len(), 5);
        let mut degrees: Vec<usize> = g.nodes().iter().map(|n| n.degree).collect();
        degrees.sort();
        assert_eq!(degrees, vec![1, 1, 1, 1, 4]);
        let center = g.nodes().iter().find(|n| n.degree == 4).unwrap();
        assert!(center.position.dist(&Point2::new(0.0, 0.0)) < 0.02);
        // Edge geometry is pinned on the node.
        for e in g.edges() {
            let (a, b) = e.endpoints;
            assert_eq!(e.geometry.first(), g.node(a).unwrap().position);
            assert_eq!(e.geometry.last(), g.node(b).unwrap().position);
        }
    }

    #[test]
    fn collinear_pair_shares_middle_node() {
        let g = build_graph(
            vec![
                line("a", &[(0.0, 0.0), (10.0, 0.0)]),
                line("b", &[(10.0, 0.0), (20.0, 0.0)]),
            ],
            0.05,
        )
        .unwrap();
        assert_eq!(g.nodes().len(), 3);
        let mid = g.nodes().iter().find(|n| n.position.x == 10.0).unwrap();
        assert_eq!(mid.degree, 2);
    }

    #[test]
    fn isolated_segment_has_two_leaves() {
        let g = build_graph(vec![line("a", &[(0.0, 0.0), (5.0, 5.0)])], 0.05).unwrap();
        assert_eq!(g.nodes().len(), 2);
        assert!(g.nodes().iter().all(|n| n.degree == 1));
    }

    #[test]
    fn zero_length_after_snap_rejected() {
        let r = build_graph(
            vec![
                line("tiny", &[(0.0, 0.0), (0.01, 0.0)]),
                line("big", &[(0.0, 0.0), (50.0, 0.0)]),
            ],
            0.05,
        );
        match r {
            Err(GraphError::ZeroLengthAfterSnap(id)) => assert_eq!(id.0, "tiny"),
            other => panic!("expected zero-length error, got {:?}", other.map(|_| ())),
        }
    }

    #[test]
    fn handshake_lemma() {
        let g = build_graph(
            vec![
                line("a", &[(0.0, 0.0), (10.0, 0.0)]),
                line("b", &[(10.0, 0.0), (20.0, 0.0)]),
                line("c", &[(10.0, 0.0), (10.0, 15.0)]),
                line("d", &[(30.0, 30.0), (40.0, 40.0)]),
            ],
            0.05,
        )
        .unwrap();
        let degree_sum: usize = g.nodes().iter().map(|n| n.degree).sum();
        assert_eq!(degree_sum, 2 * g.edges().len());
    }

    #[test]
    fn rebuild_is_fixed_point() {
        let g = build_graph(
            vec![
                line("e", &[(0.02, 0.01), (20.0, 0.0)]),
                line("w", &[(-0.01, -0.01), (-20.0, 0.0)]),
                line("n", &[(0.01, -0.02), (0.0, 20.0)]),
            ],
            0.05,
        )
        .unwrap();
        let again = build_graph(
            g.edges()
                .iter()
                .map(|e| InputLine {
                    id: e.id.clone(),
                    geometry: e.geometry.clone(),
                    attributes: e.attributes.clone(),
                })
                .collect(),
            0.05,
        )
        .unwrap();
        assert_eq!(g.nodes().len(), again.nodes().len());
        for (a, b) in g.nodes().iter().zip(again.nodes()) {
            assert_eq!(a.position, b.position);
            assert_eq!(a.degree, b.degree);
        }
        for (a, b) in g.edges().iter().zip(again.edges()) {
            assert_eq!(a.geometry, b.geometry);
        }
    }

    #[test]
    fn nodes_respect_min_separation() {
        // A chain of endpoints each 0.04 apart merges transitively.
        let g = build_graph(
            vec![
                line("a", &[(0.0, 0.0), (10.0, 0.0)]),
                line("b", &[(0.04, 0.0), (10.0, 5.0)]),
                line("c", &[(0.08, 0.0), (10.0, -5.0)]),
            ],
            0.05,
        )
        .unwrap();
        for (i, n) in g.nodes().iter().enumerate() {
            for m in &g.nodes()[i + 1..] {
                assert!(n.position.dist(&m.position) > 0.05);
            }
        }
        let hub = g.nodes().iter().find(|n| n.degree == 3).unwrap();
        assert!(hub.position.dist(&Point2::new(0.04, 0.0)) < 1e-12);
    }

    #[test]
    fn crossing_at_shared_node_not_reported() {
        let g = build_graph(
            vec![
                line("a", &[(-10.0, 0.0), (10.0, 0.0)]),
                line("b", &[(0.0, 0.0), (0.0, 10.0)]),
            ],
            0.05,
        )
        .unwrap();
        assert!(detect_crossings(&g).is_empty());
    }

    #[test]
    fn midspan_crossing_reported_once() {
        let g = build_graph(
            vec![
                line("a", &[(-10.0, 0.0), (10.0, 0.0)]),
                line("b", &[(0.0, -10.0), (0.0, 10.0)]),
            ],
            0.05,
        )
        .unwrap();
        let crossings = detect_crossings(&g);
        assert_eq!(crossings.len(), 1);
        let (a, b, p) = &crossings[0];
        assert_eq!((a.0.as_str(), b.0.as_str()), ("a", "b"));
        assert_eq!(*p, Point2::new(0.0, 0.0));
    }

    #[test]
    fn grid_graph_has_no_crossings() {
        // Brute-force oracle: in a properly noded grid every contact
        // between edges is a shared node, so the report must be empty.
        let mut lines = Vec::new();
        for i in 0..4 {
            for j in 0..3 {
                let (x, y) = (j as f64 * 10.0, i as f64 * 10.0);
                lines.push(line(&format!("h{i}{j}"), &[(x, y), (x + 10.0, y)]));
            }
        }
        for i in 0..3 {
            for j in 0..4 {
                let (x, y) = (j as f64 * 10.0, i as f64 * 10.0);
                lines.push(line(&format!("v{i}{j}"), &[(x, y), (x, y + 10.0)]));
            }
        }
        let g = build_graph(lines, 0.05).unwrap();
        assert!(detect_crossings(&g).is_empty());
        for (i, a) in g.edges().iter().enumerate() {
            for b in &g.edges()[i + 1..] {
                for wa in a.geometry.points().windows(2) {
                    for wb in b.geometry.points().windows(2) {
                        match segment_intersection(wa[0], wa[1], wb[0], wb[1]) {
                            SegSeg::None => {}
                            SegSeg::Point(p) => {
                                let touches_node =
                                    g.nodes().iter().any(|n| n.position.dist(&p) <= 1e-9);
                                assert!(touches_node);
                            }
                            SegSeg::Overlap(_, _) => panic!("grid edges overlap"),
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn incident_edges_lengths() {
        let g = build_graph(
            vec![
                line("a", &[(0.0, 0.0), (30.0, 0.0)]),
                line("b", &[(0.0, 0.0), (0.0, 40.0)]),
                line("c", &[(0.0, 0.0), (-50.0, 0.0)]),
            ],
            0.05,
        )
        .unwrap();
        let hub = g.nodes().iter().find(|n| n.degree == 3).unwrap();
        let inc = g.incident_edges(hub.id).unwrap();
        assert_eq!(inc.len(), 3);
        let min = inc.iter().map(|(_, l)| *l).fold(f64::INFINITY, f64::min);
        assert_eq!(min, 30.0);
        assert!(g.incident_edges(NodeId(99)).is_err());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let r = build_graph(
            vec![
                line("a", &[(0.0, 0.0), (10.0, 0.0)]),
                line("a", &[(20.0, 0.0), (30.0, 0.0)]),
            ],
            0.05,
        );
        assert!(matches!(r, Err(GraphError::DuplicateEdgeId(_))));
    }
}

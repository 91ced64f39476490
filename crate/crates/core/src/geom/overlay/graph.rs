//! Exact planar arrangement of input ring edges.
//!
//! The overlay pipeline: split all edges at pairwise intersections, merge
//! coincident pieces while summing winding weights, build a half-edge
//! structure with exact angular order, extract face cycles, resolve
//! component nesting by exact ray casting, and flood winding numbers from
//! the unbounded face. All decisions are made on rational coordinates, so
//! the result is combinatorially exact.

use super::exact::{dir_cmp, direction, seg_seg, EPoint, ESegSeg, ExactX};
use crate::geom::Rect;
use std::collections::BTreeMap;

#[derive(Debug)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    /// Winding weight per input group along the canonical direction
    /// (`verts[u] -> verts[v]`, lexicographically increasing).
    pub w: [i64; 2],
}

#[derive(Debug)]
pub struct Cycle {
    pub positive: bool,
    pub component: u32,
}

pub struct Arrangement {
    pub verts: Vec<EPoint>,
    pub edges: Vec<Edge>,
    /// Outgoing half-edges per vertex, sorted counter-clockwise.
    out: Vec<Vec<u32>>,
    /// Index of each half-edge within its source vertex list.
    out_pos: Vec<u32>,
    pub cycle_of: Vec<u32>,
    #[allow(dead_code)] // inspected by unit tests
    pub cycles: Vec<Cycle>,
    /// Face id per cycle; face 0 is the unbounded face.
    pub face_of_cycle: Vec<u32>,
    #[allow(dead_code)] // inspected by unit tests
    pub n_faces: usize,
    /// Winding number per face and input group.
    pub wind: Vec<[i64; 2]>,
}

impl Arrangement {
    #[inline]
    pub fn twin(he: u32) -> u32 {
        he ^ 1
    }

    #[inline]
    pub fn src(&self, he: u32) -> u32 {
        let e = &self.edges[(he >> 1) as usize];
        if he & 1 == 0 {
            e.u
        } else {
            e.v
        }
    }

    #[inline]
    pub fn dst(&self, he: u32) -> u32 {
        self.src(Self::twin(he))
    }

    #[inline]
    pub fn face_of_he(&self, he: u32) -> u32 {
        self.face_of_cycle[self.cycle_of[he as usize] as usize]
    }

    /// The half-edge after `he` when walking a face with the interior on
    /// the left: rotate clockwise from the twin around the head vertex.
    pub fn next(&self, he: u32) -> u32 {
        let v = self.dst(he) as usize;
        let list = &self.out[v];
        let tp = self.out_pos[Self::twin(he) as usize] as usize;
        list[(tp + list.len() - 1) % list.len()]
    }

    /// Next boundary half-edge around a selected region: first clockwise
    /// from the twin whose left face is selected and right face is not.
    pub fn next_boundary(&self, he: u32, is_boundary: &[bool]) -> Option<u32> {
        let v = self.dst(he) as usize;
        let list = &self.out[v];
        let n = list.len();
        let tp = self.out_pos[Self::twin(he) as usize] as usize;
        for step in 1..=n {
            let cand = list[(tp + n - step) % n];
            if is_boundary[cand as usize] {
                return Some(cand);
            }
        }
        None
    }

    pub fn half_edge_count(&self) -> usize {
        self.edges.len() * 2
    }
}

/// Build the arrangement for rings tagged with an input group (0 or 1).
/// Ring orientation carries the winding contribution: a counter-clockwise
/// ring adds +1 inside, a clockwise ring -1.
pub fn build(rings: &[(Vec<EPoint>, u8)]) -> Result<Arrangement, String> {
    struct RawSeg {
        a: EPoint,
        b: EPoint,
        w: [i64; 2],
    }

    // Collect canonical segments.
    let mut raw: Vec<RawSeg> = Vec::new();
    for (pts, group) in rings {
        let n = pts.len();
        for i in 0..n {
            let p = &pts[i];
            let q = &pts[(i + 1) % n];
            if p == q {
                continue;
            }
            let mut w = [0i64; 2];
            let (a, b) = if p < q {
                w[*group as usize] = 1;
                (p.clone(), q.clone())
            } else {
                w[*group as usize] = -1;
                (q.clone(), p.clone())
            };
            raw.push(RawSeg { a, b, w });
        }
    }

    // Split every segment at every intersection with another segment.
    let boxes: Vec<Rect<f64>> = raw
        .iter()
        .map(|s| {
            let mut r = Rect::of_points([s.a.to_point(), s.b.to_point()].iter());
            r = r.expanded(1e-6);
            r
        })
        .collect();
    let mut splits: Vec<Vec<EPoint>> = vec![Vec::new(); raw.len()];
    for i in 0..raw.len() {
        for j in (i + 1)..raw.len() {
            if !boxes[i].intersects(&boxes[j]) {
                continue;
            }
            let (si, sj) = (&raw[i], &raw[j]);
            match seg_seg(&si.a, &si.b, &sj.a, &sj.b) {
                ESegSeg::None => {}
                ESegSeg::Point(p) => {
                    if p != si.a && p != si.b {
                        splits[i].push(p.clone());
                    }
                    if p != sj.a && p != sj.b {
                        splits[j].push(p);
                    }
                }
                ESegSeg::Overlap(p, q) => {
                    for x in [p, q] {
                        if x != si.a && x != si.b {
                            splits[i].push(x.clone());
                        }
                        if x != sj.a && x != sj.b {
                            splits[j].push(x);
                        }
                    }
                }
            }
        }
    }

    // Emit sub-segments and merge coincident ones, summing weights.
    // Lexicographic order equals order along the canonical direction.
    let mut merged: BTreeMap<(EPoint, EPoint), [i64; 2]> = BTreeMap::new();
    for (seg, mut cuts) in raw.into_iter().zip(splits.into_iter()) {
        cuts.sort();
        cuts.dedup();
        let mut chain = Vec::with_capacity(cuts.len() + 2);
        chain.push(seg.a);
        chain.extend(cuts);
        chain.push(seg.b);
        for w in chain.windows(2) {
            if w[0] == w[1] {
                continue;
            }
            let entry = merged.entry((w[0].clone(), w[1].clone())).or_insert([0, 0]);
            entry[0] += seg.w[0];
            entry[1] += seg.w[1];
        }
    }
    merged.retain(|_, w| *w != [0, 0]);

    // Vertex registry and edge table.
    let mut vert_ids: BTreeMap<EPoint, u32> = BTreeMap::new();
    let mut verts: Vec<EPoint> = Vec::new();
    let intern = |p: &EPoint, verts: &mut Vec<EPoint>, ids: &mut BTreeMap<EPoint, u32>| -> u32 {
        if let Some(&id) = ids.get(p) {
            return id;
        }
        let id = verts.len() as u32;
        verts.push(p.clone());
        ids.insert(p.clone(), id);
        id
    };
    let mut edges: Vec<Edge> = Vec::with_capacity(merged.len());
    for ((a, b), w) in merged {
        let u = intern(&a, &mut verts, &mut vert_ids);
        let v = intern(&b, &mut verts, &mut vert_ids);
        edges.push(Edge { u, v, w });
    }

    // Outgoing lists in counter-clockwise angular order.
    let mut out: Vec<Vec<u32>> = vec![Vec::new(); verts.len()];
    for (e_idx, e) in edges.iter().enumerate() {
        out[e.u as usize].push((e_idx as u32) << 1);
        out[e.v as usize].push(((e_idx as u32) << 1) | 1);
    }
    let dir_of = |he: u32| {
        let e = &edges[(he >> 1) as usize];
        let (s, d) = if he & 1 == 0 { (e.u, e.v) } else { (e.v, e.u) };
        direction(&verts[s as usize], &verts[d as usize])
    };
    let mut out_pos = vec![0u32; edges.len() * 2];
    for list in out.iter_mut() {
        list.sort_by(|&h1, &h2| {
            let d1 = dir_of(h1);
            let d2 = dir_of(h2);
            dir_cmp((&d1.0, &d1.1), (&d2.0, &d2.1))
        });
        for (i, &h) in list.iter().enumerate() {
            out_pos[h as usize] = i as u32;
        }
    }

    // Union-find components over vertices.
    let mut uf: Vec<u32> = (0..verts.len() as u32).collect();
    fn find(uf: &mut Vec<u32>, x: u32) -> u32 {
        let mut r = x;
        while uf[r as usize] != r {
            r = uf[r as usize];
        }
        let mut c = x;
        while uf[c as usize] != r {
            let nxt = uf[c as usize];
            uf[c as usize] = r;
            c = nxt;
        }
        r
    }
    for e in &edges {
        let ru = find(&mut uf, e.u);
        let rv = find(&mut uf, e.v);
        if ru != rv {
            uf[ru as usize] = rv;
        }
    }
    let mut comp_ids: BTreeMap<u32, u32> = BTreeMap::new();
    let mut comp_of_vert = vec![u32::MAX; verts.len()];
    for v in 0..verts.len() as u32 {
        if out[v as usize].is_empty() {
            continue;
        }
        let root = find(&mut uf, v);
        let next_id = comp_ids.len() as u32;
        let id = *comp_ids.entry(root).or_insert(next_id);
        comp_of_vert[v as usize] = id;
    }
    let n_comps = comp_ids.len();

    // Trace the face cycles.
    let arr_partial = Arrangement {
        verts,
        edges,
        out,
        out_pos,
        cycle_of: Vec::new(),
        cycles: Vec::new(),
        face_of_cycle: Vec::new(),
        n_faces: 0,
        wind: Vec::new(),
    };
    let mut cycle_of = vec![u32::MAX; arr_partial.half_edge_count()];
    let mut cycles: Vec<Cycle> = Vec::new();
    for start in 0..arr_partial.half_edge_count() as u32 {
        if cycle_of[start as usize] != u32::MAX {
            continue;
        }
        let id = cycles.len() as u32;
        let mut hes = Vec::new();
        let mut h = start;
        loop {
            cycle_of[h as usize] = id;
            hes.push(h);
            h = arr_partial.next(h);
            if h == start {
                break;
            }
            if hes.len() > arr_partial.half_edge_count() {
                return Err("face walk does not close".into());
            }
        }
        let pts: Vec<EPoint> = hes.iter().map(|&h| arr_partial.verts[arr_partial.src(h) as usize].clone()).collect();
        let area = super::exact::area_sign(&pts);
        if area == 0 && !hes.is_empty() {
            return Err("zero-area face cycle".into());
        }
        let component = comp_of_vert[arr_partial.src(hes[0]) as usize];
        cycles.push(Cycle {
            positive: area > 0,
            component,
        });
    }

    // Sanity: a connected component exposes exactly one outer contour.
    let mut neg_per_comp = vec![0u32; n_comps];
    for c in &cycles {
        if !c.positive {
            neg_per_comp[c.component as usize] += 1;
        }
    }
    if neg_per_comp.iter().any(|&n| n != 1) && !cycles.is_empty() {
        return Err("component without a unique outer contour".into());
    }

    // Face ids: 0 = unbounded, then one per positive cycle.
    let mut face_of_cycle = vec![u32::MAX; cycles.len()];
    let mut n_faces = 1usize;
    for (ci, c) in cycles.iter().enumerate() {
        if c.positive {
            face_of_cycle[ci] = n_faces as u32;
            n_faces += 1;
        }
    }

    // Component nesting by exact ray casting from each component's
    // lexicographically smallest vertex.
    let mut comp_vmin: Vec<Option<u32>> = vec![None; n_comps];
    for (vi, &c) in comp_of_vert.iter().enumerate() {
        if c == u32::MAX {
            continue;
        }
        let cur = &mut comp_vmin[c as usize];
        match cur {
            Some(best) => {
                if arr_partial.verts[vi] < arr_partial.verts[*best as usize] {
                    *cur = Some(vi as u32);
                }
            }
            None => *cur = Some(vi as u32),
        }
    }

    enum Hit {
        None,
        Vertex(u32),
        EdgeInterior(u32), // edge index
    }

    let nearest_left_hit = |comp: u32| -> Hit {
        use std::cmp::Ordering;
        let vm = comp_vmin[comp as usize].expect("component has vertices");
        let vm_pt = &arr_partial.verts[vm as usize];
        let mut best_x: Option<ExactX> = None;
        let mut best: Hit = Hit::None;
        // Vertices of other components lying exactly on the ray.
        for (vi, p) in arr_partial.verts.iter().enumerate() {
            let c = comp_of_vert[vi];
            if c == comp || c == u32::MAX {
                continue;
            }
            if p.y_equals(vm_pt) && p.cmp_x(vm_pt) == Ordering::Less {
                let better = best_x
                    .as_ref()
                    .map_or(true, |bx| bx.cmp_point_x(p) == Ordering::Less);
                if better {
                    best_x = Some(ExactX::of_point_x(p));
                    best = Hit::Vertex(vi as u32);
                }
            }
        }
        // Proper interior crossings of edges of other components.
        for (ei, e) in arr_partial.edges.iter().enumerate() {
            if comp_of_vert[e.u as usize] == comp {
                continue;
            }
            let pu = &arr_partial.verts[e.u as usize];
            let pv = &arr_partial.verts[e.v as usize];
            let (lo, hi) = match pu.cmp_y(pv) {
                Ordering::Less => (pu, pv),
                Ordering::Greater => (pv, pu),
                Ordering::Equal => continue, // horizontal: endpoints handle it
            };
            if !(lo.cmp_y(vm_pt) == Ordering::Less && vm_pt.cmp_y(hi) == Ordering::Less) {
                continue;
            }
            let x = super::exact::x_at_y_of(pu, pv, vm_pt);
            if x.cmp_point_x(vm_pt) == Ordering::Less
                && best_x.as_ref().map_or(true, |bx| x.cmp(bx) == Ordering::Greater)
            {
                best_x = Some(x);
                best = Hit::EdgeInterior(ei as u32);
            }
        }
        best
    };

    let mut parent_face: Vec<Option<u32>> = vec![None; n_comps];
    fn resolve_parent(
        comp: u32,
        arr: &Arrangement,
        cycle_of: &[u32],
        cycles: &[Cycle],
        face_of_cycle: &[u32],
        comp_of_vert: &[u32],
        parent_face: &mut Vec<Option<u32>>,
        nearest: &dyn Fn(u32) -> HitKind,
        depth: usize,
    ) -> Result<u32, String> {
        if let Some(f) = parent_face[comp as usize] {
            return Ok(f);
        }
        if depth > parent_face.len() + 1 {
            return Err("cyclic component nesting".into());
        }
        let hit = nearest(comp);
        let face = match hit {
            HitKind::None => 0,
            HitKind::Cycle(ci) => {
                let c = &cycles[ci as usize];
                if c.positive {
                    face_of_cycle[ci as usize]
                } else {
                    resolve_parent(
                        c.component,
                        arr,
                        cycle_of,
                        cycles,
                        face_of_cycle,
                        comp_of_vert,
                        parent_face,
                        nearest,
                        depth + 1,
                    )?
                }
            }
        };
        parent_face[comp as usize] = Some(face);
        Ok(face)
    }

    enum HitKind {
        None,
        Cycle(u32),
    }

    // Translate a geometric hit into the cycle bounding the face that the
    // ray sees immediately left of the query vertex.
    let hit_cycle = |hit: Hit| -> HitKind {
        match hit {
            Hit::None => HitKind::None,
            Hit::EdgeInterior(ei) => {
                let e = &arr_partial.edges[ei as usize];
                let pu = &arr_partial.verts[e.u as usize];
                let pv = &arr_partial.verts[e.v as usize];
                // Half-edge heading downward: its left side faces +x.
                let he = if pu.cmp_y(pv) == std::cmp::Ordering::Greater {
                    ei << 1
                } else {
                    (ei << 1) | 1
                };
                HitKind::Cycle(cycle_of[he as usize])
            }
            Hit::Vertex(vi) => {
                // The face in the angular sector containing direction +x is
                // the left face of the outgoing half-edge with the largest
                // angle (no outgoing half-edge can point exactly along +x
                // here, see module docs).
                let list = &arr_partial.out[vi as usize];
                let h = *list.last().expect("vertex has edges");
                HitKind::Cycle(cycle_of[h as usize])
            }
        }
    };

    for comp in 0..n_comps as u32 {
        let nearest = |c: u32| hit_cycle(nearest_left_hit(c));
        resolve_parent(
            comp,
            &arr_partial,
            &cycle_of,
            &cycles,
            &face_of_cycle,
            &comp_of_vert,
            &mut parent_face,
            &nearest,
            0,
        )
        .map_err(|e| e.to_string())?;
    }
    for (ci, c) in cycles.iter().enumerate() {
        if !c.positive {
            face_of_cycle[ci] = parent_face[c.component as usize].unwrap_or(0);
        }
    }

    // Flood winding numbers from the unbounded face.
    let mut wind: Vec<Option<[i64; 2]>> = vec![None; n_faces];
    wind[0] = Some([0, 0]);
    // Face adjacency: edge e relates face(left of u->v) = face(right) + w.
    let mut adj: Vec<Vec<(u32, [i64; 2])>> = vec![Vec::new(); n_faces];
    for (ei, e) in arr_partial.edges.iter().enumerate() {
        let h_fwd = (ei as u32) << 1;
        let f_l = face_of_cycle[cycle_of[h_fwd as usize] as usize];
        let f_r = face_of_cycle[cycle_of[(h_fwd | 1) as usize] as usize];
        if f_l == f_r {
            continue;
        }
        adj[f_r as usize].push((f_l, e.w));
        adj[f_l as usize].push((f_r, [-e.w[0], -e.w[1]]));
    }
    let mut queue = std::collections::VecDeque::new();
    queue.push_back(0u32);
    while let Some(f) = queue.pop_front() {
        let wf = wind[f as usize].unwrap();
        for &(g, dw) in &adj[f as usize] {
            let wg = [wf[0] + dw[0], wf[1] + dw[1]];
            match wind[g as usize] {
                Some(existing) => {
                    if existing != wg {
                        return Err("inconsistent winding flood".into());
                    }
                }
                None => {
                    wind[g as usize] = Some(wg);
                    queue.push_back(g);
                }
            }
        }
    }
    let wind: Vec<[i64; 2]> = wind
        .into_iter()
        .map(|w| w.ok_or_else(|| "unreachable face in winding flood".to_string()))
        .collect::<Result<_, _>>()?;

    Ok(Arrangement {
        cycle_of,
        cycles,
        face_of_cycle,
        n_faces,
        wind,
        ..arr_partial
    })
}

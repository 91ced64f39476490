use roadpart::evaluate::{synthesize, SynthKind, SyntheticSpec};
use roadpart::geom::union_all;
use roadpart::partition::dissolve;
use roadpart::roadgraph::build_graph;
use roadpart::seeding::{seed_all, SeedingConfig};
use roadpart::tessellate::{envelope_for, voronoi};

fn main() {
    let spec = SyntheticSpec {
        kind: SynthKind::Grid,
        rows: 4,
        cols: 4,
        block_m: 50.0,
        width_m: 6.0,
        seed: 7,
        gap_m: None,
    };
    let synth = synthesize(&spec).unwrap();
    let graph = build_graph(synth.lines, 0.05).unwrap();
    let footprint = dissolve(synth.surface).unwrap();
    let seeds = seed_all(&graph, &SeedingConfig::default()).unwrap().seeds;
    let envelope = envelope_for(&footprint.geometry, 10.0).unwrap();
    let diagram = voronoi(&seeds, &envelope).unwrap();

    let edge_id = "v_3_1";
    let cells: Vec<_> = diagram
        .cells
        .iter()
        .filter(|c| {
            seeds
                .iter()
                .find(|s| s.id == c.seed)
                .map(|s| s.owner_edge.0 == edge_id)
                .unwrap_or(false)
        })
        .collect();
    println!("edge {edge_id}: {} cells", cells.len());
    let polys: Vec<_> = cells.iter().map(|c| c.polygon.clone()).collect();
    let u = union_all(&polys).unwrap();
    println!("union parts: {}", u.len());
    for (i, c) in cells.iter().enumerate() {
        println!("cell {i} (seed {}):", c.seed);
        for p in c.polygon.exterior().points() {
            println!("   ({:.17e}, {:.17e})", p.x, p.y);
        }
    }
}

use roadpart::evaluate::{synthesize, SynthKind, SyntheticSpec};
use roadpart::partition::{dissolve, partition};
use roadpart::roadgraph::build_graph;
use roadpart::seeding::{seed_all, SeedingConfig};
use roadpart::tessellate::{envelope_for, voronoi};
use std::time::Instant;

fn main() {
    for (rows, cols) in [(10usize, 10usize), (20, 20)] {
        let spec = SyntheticSpec {
            kind: SynthKind::Grid,
            rows,
            cols,
            block_m: 50.0,
            width_m: 6.0,
            seed: 3,
            gap_m: None,
        };
        let t0 = Instant::now();
        let synth = synthesize(&spec).unwrap();
        let t1 = Instant::now();
        let graph = build_graph(synth.lines, 0.05).unwrap();
        let t2 = Instant::now();
        let footprint = dissolve(synth.surface).unwrap();
        let t3 = Instant::now();
        let seeds = seed_all(&graph, &SeedingConfig::default()).unwrap().seeds;
        let t4 = Instant::now();
        let envelope = envelope_for(&footprint.geometry, 10.0).unwrap();
        let diagram = voronoi(&seeds, &envelope).unwrap();
        let t5 = Instant::now();
        let result = partition(&footprint, &graph, &seeds, &diagram).unwrap();
        let t6 = Instant::now();
        println!(
            "{rows}x{cols}: edges={} seeds={} sections={} | synth {:?} graph {:?} dissolve {:?} seed {:?} voronoi {:?} partition {:?} | total {:?}",
            graph.edges().len(),
            seeds.len(),
            result.sections.len(),
            t1 - t0,
            t2 - t1,
            t3 - t2,
            t4 - t3,
            t5 - t4,
            t6 - t5,
            t6 - t0
        );
    }
}

//! Command-line surface tying the pipeline together.

use crate::evaluate::{self, ClassGeom, SyntheticSpec, SynthKind};
use crate::io::report::{RunReport, ValidationReport};
use crate::io::{self, GeoGeometry};
use crate::partition::{dissolve, flag_suspicious, partition};
use crate::roadgraph::build_graph;
use crate::seeding::{seed_all, SeedingConfig};
use crate::tessellate::{envelope_for, voronoi};
use crate::MultiPolygon;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::time::Instant;

#[derive(Debug, Parser)]
#[command(
    name = "roadpart",
    version,
    about = "Partition a road surface footprint so each graph edge owns one surface section"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Treat any warning (unseeded edge, crossing, suspicious section) as
    /// a failure.
    #[arg(long, global = true)]
    pub strict: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Merge raw surface polygons into a single footprint.
    Dissolve {
        /// Input surface feature collection.
        surface: PathBuf,
        /// Output footprint feature collection.
        footprint: PathBuf,
    },
    /// Run the full pipeline: snap, seed, tessellate, clip, merge.
    Partition(PartitionArgs),
    /// Compare modeled sections against reference areas.
    Validate(ValidateArgs),
    /// Classify the spatial relationship between two datasets.
    Classify(ClassifyArgs),
    /// Generate a synthetic network with an analytic reference.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct PartitionArgs {
    /// Linear road dataset (LineString features).
    #[arg(long)]
    pub lines: PathBuf,
    /// Surface road dataset (Polygon / MultiPolygon features).
    #[arg(long)]
    pub surface: PathBuf,
    /// Output surface sections.
    #[arg(long)]
    pub out_sections: PathBuf,
    /// Optional seed export.
    #[arg(long)]
    pub out_seeds: Option<PathBuf>,
    /// Optional Voronoi cell export.
    #[arg(long)]
    pub out_cells: Option<PathBuf>,
    /// Optional run report (JSON).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Optional SVG map overlay for visual inspection.
    #[arg(long)]
    pub svg_map: Option<PathBuf>,
    /// Endpoint snap tolerance in meters.
    #[arg(long, default_value_t = 0.05)]
    pub snap_tol: f64,
    /// Buffer circle cap in meters.
    #[arg(long, default_value_t = 5.0)]
    pub radius_max: f64,
    /// Buffer radius as a fraction of the shortest incident edge.
    #[arg(long, default_value_t = 0.4)]
    pub radius_ratio: f64,
    /// Intermediate point spacing in meters.
    #[arg(long, default_value_t = 10.0)]
    pub spacing: f64,
    /// Envelope margin beyond the footprint bounding box, meters.
    #[arg(long, default_value_t = 10.0)]
    pub envelope_margin: f64,
    /// Expected roadway width used by the suspicious-area flag, meters.
    #[arg(long, default_value_t = 6.0)]
    pub width_hint: f64,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Modeled sections (from partition).
    #[arg(long)]
    pub modeled: PathBuf,
    /// Reference sections or areas.
    #[arg(long)]
    pub reference: PathBuf,
    /// Optional validation report (JSON).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Optional SVG scatter plot.
    #[arg(long)]
    pub svg_scatter: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    /// First dataset (lines or polygons).
    #[arg(long)]
    pub a: PathBuf,
    /// Second dataset (lines or polygons).
    #[arg(long)]
    pub b: PathBuf,
    /// Overlap fraction above which two objects correspond.
    #[arg(long, default_value_t = 0.05)]
    pub min_overlap: f64,
    /// Optional JSON output of per-object labels.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// grid | cross | t | y | star | parallel | close-junctions
    #[arg(long)]
    pub kind: SynthKind,
    #[arg(long, default_value_t = 10)]
    pub rows: usize,
    #[arg(long, default_value_t = 10)]
    pub cols: usize,
    /// Block length (grid), arm length (junctions), edge length
    /// (parallel) or junction gap (close-junctions), meters.
    #[arg(long, default_value_t = 50.0)]
    pub block: f64,
    /// Road width in meters.
    #[arg(long, default_value_t = 6.0)]
    pub width: f64,
    /// Jitter seed for grid block lengths (0 = uniform blocks).
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Carriageway gap for the parallel kind, meters.
    #[arg(long)]
    pub gap: Option<f64>,
    #[arg(long)]
    pub out_lines: PathBuf,
    #[arg(long)]
    pub out_surface: PathBuf,
    /// Analytic reference areas per edge.
    #[arg(long)]
    pub out_reference: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Io(#[from] io::IoError),
    #[error(transparent)]
    Graph(#[from] crate::roadgraph::GraphError),
    #[error(transparent)]
    Seed(#[from] crate::seeding::SeedError),
    #[error(transparent)]
    Tessellate(#[from] crate::tessellate::TessellateError),
    #[error(transparent)]
    Partition(#[from] crate::partition::PartitionError),
    #[error(transparent)]
    Evaluate(#[from] evaluate::EvaluateError),
    #[error(transparent)]
    Synth(#[from] evaluate::SynthError),
    #[error("feature {index} in {path}: points cannot be classified")]
    UnsupportedClassifyGeometry { path: String, index: usize },
    #[error("{0} warnings with --strict")]
    StrictWarnings(usize),
}

/// Run a parsed command. Returns the process exit code.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Dissolve { surface, footprint } => {
            let raw = io::read_surface(&surface)?;
            let result = dissolve(raw)?;
            io::write_footprint(&result, &footprint)?;
            println!(
                "dissolved {} polygons into {} parts, area {:.3} m2",
                result.source_count,
                result.geometry.len(),
                result.geometry.area()
            );
            Ok(0)
        }
        Command::Partition(args) => run_partition(args, cli.strict),
        Command::Validate(args) => {
            let modeled = io::read_section_areas(&args.modeled)?;
            let reference = io::read_section_areas(&args.reference)?;
            let report = evaluate::compare_areas(&modeled, &reference)?;
            let summary = ValidationReport::from_match(&report);
            print!("{}", summary.text(&report.pairs));
            if let Some(path) = &args.report {
                summary.write_json(path)?;
            }
            if let Some(path) = &args.svg_scatter {
                io::svg::write_scatter(&report, path)?;
            }
            if cli.strict && !report.unmatched_reference.is_empty() {
                return Err(CliError::StrictWarnings(report.unmatched_reference.len()));
            }
            Ok(0)
        }
        Command::Classify(args) => {
            let a = read_class_geoms(&args.a)?;
            let b = read_class_geoms(&args.b)?;
            let report = evaluate::classify_relation(&a, &b, args.min_overlap)?;
            println!("dataset a ({}):", args.a.display());
            for (id, label) in &report.a {
                println!("  {id}\t{label}");
            }
            println!("dataset b ({}):", args.b.display());
            for (id, label) in &report.b {
                println!("  {id}\t{label}");
            }
            if let Some(path) = &args.out {
                let json = serde_json::json!({
                    "a": report.a.iter().map(|(id, l)| serde_json::json!({"id": id, "label": l.as_str()})).collect::<Vec<_>>(),
                    "b": report.b.iter().map(|(id, l)| serde_json::json!({"id": id, "label": l.as_str()})).collect::<Vec<_>>(),
                });
                std::fs::write(path, serde_json::to_string_pretty(&json).unwrap() + "\n")
                    .map_err(|source| io::IoError::Write {
                        path: path.display().to_string(),
                        source,
                    })?;
            }
            Ok(0)
        }
        Command::Synth(args) => {
            let spec = SyntheticSpec {
                kind: args.kind,
                rows: args.rows,
                cols: args.cols,
                block_m: args.block,
                width_m: args.width,
                seed: args.seed,
                gap_m: args.gap,
            };
            let synth = evaluate::synthesize(&spec)?;
            io::write_lines(&synth.lines, &args.out_lines)?;
            io::write_polygons(&synth.surface, &args.out_surface)?;
            if let Some(path) = &args.out_reference {
                io::write_reference(&synth.reference, path)?;
            }
            println!(
                "synthesized {} lines, {} surface polygons ({})",
                synth.lines.len(),
                synth.surface.len(),
                spec.kind
            );
            Ok(0)
        }
    }
}

fn run_partition(args: PartitionArgs, strict: bool) -> Result<i32, CliError> {
    let cfg = SeedingConfig {
        radius_max: args.radius_max,
        radius_ratio: args.radius_ratio,
        spacing: args.spacing,
    };
    cfg.validate()?;
    let mut report = RunReport::default();

    let t = Instant::now();
    let lines = io::read_lines(&args.lines)?;
    let raw_surface = io::read_surface(&args.surface)?;
    stage(&mut report, "read", t);

    let t = Instant::now();
    let graph = build_graph(lines, args.snap_tol)?;
    stage(&mut report, "snap", t);

    let t = Instant::now();
    let footprint = dissolve(raw_surface)?;
    stage(&mut report, "dissolve", t);

    let t = Instant::now();
    let seeding = seed_all(&graph, &cfg)?;
    stage(&mut report, "seed", t);

    let t = Instant::now();
    let envelope = envelope_for(&footprint.geometry, args.envelope_margin)?;
    let diagram = voronoi(&seeding.seeds, &envelope)?;
    stage(&mut report, "voronoi", t);

    let t = Instant::now();
    let result = partition(&footprint, &graph, &seeding.seeds, &diagram)?;
    let mut result = flag_suspicious(result, &graph, args.width_hint);
    for (kept, dropped, position) in &seeding.merged {
        result.warnings.push(crate::partition::Warning::MergedSeeds {
            kept: kept.clone(),
            dropped: dropped.clone(),
            position: *position,
        });
    }
    stage(&mut report, "partition", t);

    let t = Instant::now();
    io::write_sections(&result, &args.out_sections)?;
    if let Some(path) = &args.out_seeds {
        io::write_seeds(&seeding.seeds, path)?;
    }
    if let Some(path) = &args.out_cells {
        io::write_cells(&diagram, path)?;
    }
    if let Some(path) = &args.svg_map {
        io::svg::write_map(&footprint, &result, &seeding.seeds, path)?;
    }
    stage(&mut report, "write", t);

    report.nodes = graph.nodes().len();
    report.edges = graph.edges().len();
    report.seeds = seeding.seeds.len();
    report.sections = result.sections.len();
    report.conservation_residual_rel = result.unassigned_area / footprint.geometry.area();
    report.warnings = result.warnings.iter().map(|w| w.to_string()).collect();
    if let Some(path) = &args.report {
        report.write_json(path)?;
    }
    print!("{}", report.text());

    if strict && !result.warnings.is_empty() {
        return Err(CliError::StrictWarnings(result.warnings.len()));
    }
    Ok(0)
}

fn stage(report: &mut RunReport, name: &str, start: Instant) {
    report
        .stage_ms
        .insert(name.to_string(), start.elapsed().as_secs_f64() * 1e3);
}

fn read_class_geoms(path: &std::path::Path) -> Result<Vec<(String, ClassGeom)>, CliError> {
    let features = io::read_features(path)?;
    let mut out = Vec::with_capacity(features.len());
    for (index, f) in features.into_iter().enumerate() {
        let id = f.id.unwrap_or_else(|| index.to_string());
        let geom = match f.geometry {
            Some(GeoGeometry::LineString(pts)) => {
                ClassGeom::Line(crate::Polyline::new(pts).map_err(|e| {
                    io::IoError::BadFeature {
                        path: path.display().to_string(),
                        index,
                        detail: e.to_string(),
                    }
                })?)
            }
            Some(GeoGeometry::Polygon(rings)) => {
                ClassGeom::Area(MultiPolygon::from_polygon(rings_to_polygon(rings, path, index)?))
            }
            Some(GeoGeometry::MultiPolygon(polys)) => {
                let parts = polys
                    .into_iter()
                    .map(|rings| rings_to_polygon(rings, path, index))
                    .collect::<Result<Vec<_>, _>>()?;
                ClassGeom::Area(MultiPolygon::new(parts))
            }
            _ => {
                return Err(CliError::UnsupportedClassifyGeometry {
                    path: path.display().to_string(),
                    index,
                });
            }
        };
        out.push((id, geom));
    }
    Ok(out)
}

fn rings_to_polygon(
    rings: Vec<Vec<crate::Point2>>,
    path: &std::path::Path,
    index: usize,
) -> Result<crate::Polygon, io::IoError> {
    let bad = |e: crate::geom::GeomError| io::IoError::BadFeature {
        path: path.display().to_string(),
        index,
        detail: e.to_string(),
    };
    let mut iter = rings.into_iter();
    let ext = crate::geom::Ring::new(iter.next().ok_or(crate::geom::GeomError::EmptyGeometry).map_err(bad)?)
        .map_err(bad)?;
    let holes = iter
        .map(crate::geom::Ring::new)
        .collect::<Result<Vec<_>, _>>()
        .map_err(bad)?;
    crate::Polygon::new(ext, holes).map_err(bad)
}

//! SVG debug renders: the validation scatter plot and a map overlay of
//! footprint, sections and seeds.

use super::IoError;
use crate::evaluate::MatchReport;
use crate::partition::{Footprint, PartitionResult};
use crate::seeding::SourcePoint;
use std::path::Path;

fn save(path: &Path, svg: String) -> Result<(), IoError> {
    std::fs::write(path, svg).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Scatter of modeled (y) against reference (x) areas with the fitted line.
pub fn write_scatter(report: &MatchReport, path: &Path) -> Result<(), IoError> {
    let (w, h, pad) = (640.0, 640.0, 60.0);
    let max_val = report
        .pairs
        .iter()
        .flat_map(|p| [p.reference, p.modeled])
        .fold(1.0f64, f64::max)
        * 1.05;
    let sx = |v: f64| pad + v / max_val * (w - 2.0 * pad);
    let sy = |v: f64| h - pad - v / max_val * (h - 2.0 * pad);

    let mut body = String::new();
    body.push_str(&format!(
        "<line x1='{}' y1='{}' x2='{}' y2='{}' stroke='black'/>\n",
        pad,
        h - pad,
        w - pad,
        h - pad
    ));
    body.push_str(&format!(
        "<line x1='{}' y1='{}' x2='{}' y2='{}' stroke='black'/>\n",
        pad,
        h - pad,
        pad,
        pad
    ));
    // Fitted line over the x range.
    let y0 = report.intercept;
    let y1 = report.intercept + report.slope * max_val;
    body.push_str(&format!(
        "<line x1='{:.2}' y1='{:.2}' x2='{:.2}' y2='{:.2}' stroke='#c33' stroke-width='1.5'/>\n",
        sx(0.0),
        sy(y0.clamp(0.0, max_val)),
        sx(max_val),
        sy(y1.clamp(0.0, max_val)),
    ));
    for p in &report.pairs {
        body.push_str(&format!(
            "<circle cx='{:.2}' cy='{:.2}' r='2.5' fill='#2266aa' fill-opacity='0.7'/>\n",
            sx(p.reference),
            sy(p.modeled)
        ));
    }
    body.push_str(&format!(
        "<text x='{}' y='24' font-family='monospace' font-size='13'>slope {:.4}  intercept {:.2}  r2 {:.4}  buckets {:.0}/{:.0}/{:.0}%</text>\n",
        pad,
        report.slope,
        report.intercept,
        report.r_squared,
        report.bucket_5 * 100.0,
        report.bucket_10 * 100.0,
        report.bucket_15 * 100.0
    ));
    body.push_str(&format!(
        "<text x='{}' y='{}' font-family='monospace' font-size='12'>reference area (m2)</text>\n",
        w / 2.0 - 70.0,
        h - 20.0
    ));
    let svg = format!(
        "<svg xmlns='http://www.w3.org/2000/svg' width='{w}' height='{h}' viewBox='0 0 {w} {h}'>\n<rect width='100%' height='100%' fill='white'/>\n{body}</svg>\n"
    );
    save(path, svg)
}

/// Map overlay: footprint outline, sections colored by edge, seed dots.
pub fn write_map(
    footprint: &Footprint,
    result: &PartitionResult,
    seeds: &[SourcePoint],
    path: &Path,
) -> Result<(), IoError> {
    let bbox = footprint.geometry.bbox();
    let margin = (bbox.width().max(bbox.height())) * 0.03 + 1.0;
    let (x0, y0) = (bbox.min.x - margin, bbox.min.y - margin);
    let (x1, y1) = (bbox.max.x + margin, bbox.max.y + margin);
    let scale = 900.0 / (x1 - x0).max(y1 - y0);
    let w = (x1 - x0) * scale;
    let h = (y1 - y0) * scale;
    let tx = |x: f64| (x - x0) * scale;
    let ty = |y: f64| h - (y - y0) * scale;

    let palette = [
        "#4c78a8", "#f58518", "#54a24b", "#e45756", "#72b7b2", "#b279a2", "#9d755d", "#eeca3b",
    ];

    let ring_path = |ring: &crate::geom::Ring<f64>| -> String {
        let mut d = String::new();
        for (i, p) in ring.points().iter().enumerate() {
            let cmd = if i == 0 { 'M' } else { 'L' };
            d.push_str(&format!("{cmd}{:.2} {:.2} ", tx(p.x), ty(p.y)));
        }
        d.push('Z');
        d
    };

    let mut body = String::new();
    for (i, s) in result.sections.iter().enumerate() {
        let color = palette[i % palette.len()];
        for poly in s.geometry.polygons() {
            let d: String = poly.rings().map(|r| ring_path(r)).collect::<Vec<_>>().join(" ");
            body.push_str(&format!(
                "<path d='{d}' fill='{color}' fill-opacity='0.55' fill-rule='evenodd' stroke='{color}' stroke-width='0.8'><title>{}</title></path>\n",
                s.edge
            ));
        }
    }
    for poly in footprint.geometry.polygons() {
        let d: String = poly.rings().map(|r| ring_path(r)).collect::<Vec<_>>().join(" ");
        body.push_str(&format!(
            "<path d='{d}' fill='none' stroke='#222' stroke-width='1.2' fill-rule='evenodd'/>\n"
        ));
    }
    for s in seeds {
        body.push_str(&format!(
            "<circle cx='{:.2}' cy='{:.2}' r='2' fill='black'/>\n",
            tx(s.position.x),
            ty(s.position.y)
        ));
    }
    let svg = format!(
        "<svg xmlns='http://www.w3.org/2000/svg' width='{w:.0}' height='{h:.0}' viewBox='0 0 {w:.2} {h:.2}'>\n<rect width='100%' height='100%' fill='white'/>\n{body}</svg>\n"
    );
    save(path, svg)
}

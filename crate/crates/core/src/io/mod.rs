//! Feature-collection ingestion and serialization.
//!
//! Files are GeoJSON feature collections in planar projected meters.
//! Inputs whose coordinates all look geographic (|x| <= 180, |y| <= 90)
//! are rejected with a reprojection hint instead of being misread as
//! degenerate meters. Output coordinates and computed measures are
//! written with 9 decimal places so identical runs produce byte-identical
//! files.

pub mod report;
pub mod svg;

use crate::partition::{Footprint, PartitionResult};
use crate::roadgraph::{Attributes, EdgeId, InputLine};
use crate::seeding::{SourceKind, SourcePoint};
use crate::tessellate::VoronoiDiagram;
use crate::{Point2, Polygon, Polyline};
use crate::geom::{GeomError, Ring};
use serde_json::Value;
use std::io::Write as _;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed document in {path}: {detail}")]
    Malformed { path: String, detail: String },
    #[error("feature {index} in {path}: expected {expected}, found {found}")]
    WrongGeometryType {
        path: String,
        index: usize,
        expected: &'static str,
        found: String,
    },
    #[error("feature {index} in {path}: {detail}")]
    BadFeature {
        path: String,
        index: usize,
        detail: String,
    },
    #[error(
        "coordinates in {path} look geographic (all |x| <= 180, |y| <= 90); \
         reproject the data to a planar meter system first"
    )]
    LooksGeographic { path: String },
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// A parsed GeoJSON feature.
#[derive(Debug, Clone)]
pub struct Feature {
    pub id: Option<String>,
    pub geometry: Option<GeoGeometry>,
    pub properties: Attributes,
}

#[derive(Debug, Clone)]
pub enum GeoGeometry {
    Point(Point2),
    LineString(Vec<Point2>),
    Polygon(Vec<Vec<Point2>>),
    MultiPolygon(Vec<Vec<Vec<Point2>>>),
}

impl GeoGeometry {
    fn type_name(&self) -> &'static str {
        match self {
            GeoGeometry::Point(_) => "Point",
            GeoGeometry::LineString(_) => "LineString",
            GeoGeometry::Polygon(_) => "Polygon",
            GeoGeometry::MultiPolygon(_) => "MultiPolygon",
        }
    }

    fn coords(&self) -> Vec<Point2> {
        match self {
            GeoGeometry::Point(p) => vec![*p],
            GeoGeometry::LineString(pts) => pts.clone(),
            GeoGeometry::Polygon(rings) => rings.iter().flatten().copied().collect(),
            GeoGeometry::MultiPolygon(polys) => {
                polys.iter().flatten().flatten().copied().collect()
            }
        }
    }
}

/// Read any feature collection. Feature ids come from the `id` member,
/// else an `id` property, else the feature's position in the file.
pub fn read_features(path: &Path) -> Result<Vec<Feature>, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    let doc: Value = serde_json::from_str(&text).map_err(|e| IoError::Malformed {
        path: path.display().to_string(),
        detail: e.to_string(),
    })?;
    let malformed = |detail: &str| IoError::Malformed {
        path: path.display().to_string(),
        detail: detail.to_string(),
    };
    if doc.get("type").and_then(Value::as_str) != Some("FeatureCollection") {
        return Err(malformed("expected a FeatureCollection"));
    }
    let raw_features = doc
        .get("features")
        .and_then(Value::as_array)
        .ok_or_else(|| malformed("missing features array"))?;

    let mut features = Vec::with_capacity(raw_features.len());
    for (index, f) in raw_features.iter().enumerate() {
        let bad = |detail: String| IoError::BadFeature {
            path: path.display().to_string(),
            index,
            detail,
        };
        let id = match f.get("id") {
            Some(Value::String(s)) => Some(s.clone()),
            Some(Value::Number(n)) => Some(n.to_string()),
            _ => match f.get("properties").and_then(|p| p.get("id")) {
                Some(Value::String(s)) => Some(s.clone()),
                Some(Value::Number(n)) => Some(n.to_string()),
                _ => None,
            },
        };
        let properties = match f.get("properties") {
            Some(Value::Object(map)) => map
                .iter()
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
            _ => Attributes::new(),
        };
        let geometry = match f.get("geometry") {
            None | Some(Value::Null) => None,
            Some(g) => Some(parse_geometry(g).map_err(bad)?),
        };
        features.push(Feature {
            id,
            geometry,
            properties,
        });
    }

    // Geographic-coordinate heuristic over the whole collection.
    let mut any = false;
    let mut all_in_degrees = true;
    for f in &features {
        if let Some(g) = &f.geometry {
            for p in g.coords() {
                any = true;
                if !(p.x.abs() <= 180.0 && p.y.abs() <= 90.0) {
                    all_in_degrees = false;
                }
            }
        }
    }
    if any && all_in_degrees {
        return Err(IoError::LooksGeographic {
            path: path.display().to_string(),
        });
    }
    Ok(features)
}

fn parse_geometry(g: &Value) -> Result<GeoGeometry, String> {
    let ty = g
        .get("type")
        .and_then(Value::as_str)
        .ok_or("geometry without type")?;
    let coords = g.get("coordinates").ok_or("geometry without coordinates")?;
    let pt = |v: &Value| -> Result<Point2, String> {
        let arr = v.as_array().ok_or("coordinate is not an array")?;
        if arr.len() < 2 {
            return Err("coordinate needs two values".into());
        }
        let x = arr[0].as_f64().ok_or("coordinate is not a number")?;
        let y = arr[1].as_f64().ok_or("coordinate is not a number")?;
        if !(x.is_finite() && y.is_finite()) {
            return Err("coordinate is not finite".into());
        }
        Ok(Point2::new(x, y))
    };
    let pts = |v: &Value| -> Result<Vec<Point2>, String> {
        v.as_array()
            .ok_or("expected coordinate array")?
            .iter()
            .map(pt)
            .collect()
    };
    let rings = |v: &Value| -> Result<Vec<Vec<Point2>>, String> {
        v.as_array()
            .ok_or("expected ring array")?
            .iter()
            .map(&pts)
            .collect()
    };
    match ty {
        "Point" => Ok(GeoGeometry::Point(pt(coords)?)),
        "LineString" => Ok(GeoGeometry::LineString(pts(coords)?)),
        "Polygon" => Ok(GeoGeometry::Polygon(rings(coords)?)),
        "MultiPolygon" => Ok(GeoGeometry::MultiPolygon(
            coords
                .as_array()
                .ok_or("expected polygon array")?
                .iter()
                .map(&rings)
                .collect::<Result<_, _>>()?,
        )),
        other => Err(format!("unsupported geometry type {other}")),
    }
}

/// Read a linear dataset: LineString features with stable ids.
pub fn read_lines(path: &Path) -> Result<Vec<InputLine>, IoError> {
    let features = read_features(path)?;
    let mut out = Vec::with_capacity(features.len());
    for (index, f) in features.into_iter().enumerate() {
        let id = f.id.unwrap_or_else(|| index.to_string());
        match f.geometry {
            Some(GeoGeometry::LineString(pts)) => {
                let geometry = Polyline::new(pts).map_err(|e| IoError::BadFeature {
                    path: path.display().to_string(),
                    index,
                    detail: e.to_string(),
                })?;
                let mut attributes = f.properties;
                attributes.remove("id");
                out.push(InputLine {
                    id: EdgeId(id),
                    geometry,
                    attributes,
                });
            }
            other => {
                return Err(IoError::WrongGeometryType {
                    path: path.display().to_string(),
                    index,
                    expected: "LineString",
                    found: other.map_or("no geometry".to_string(), |g| g.type_name().to_string()),
                });
            }
        }
    }
    Ok(out)
}

/// Read a surface dataset: Polygon and MultiPolygon features, flattened.
pub fn read_surface(path: &Path) -> Result<Vec<Polygon>, IoError> {
    let features = read_features(path)?;
    let mut out = Vec::new();
    for (index, f) in features.into_iter().enumerate() {
        let bad = |e: GeomError| IoError::BadFeature {
            path: path.display().to_string(),
            index,
            detail: e.to_string(),
        };
        match f.geometry {
            Some(GeoGeometry::Polygon(rings)) => {
                out.push(polygon_from_rings(rings).map_err(bad)?);
            }
            Some(GeoGeometry::MultiPolygon(polys)) => {
                for rings in polys {
                    out.push(polygon_from_rings(rings).map_err(bad)?);
                }
            }
            other => {
                return Err(IoError::WrongGeometryType {
                    path: path.display().to_string(),
                    index,
                    expected: "Polygon or MultiPolygon",
                    found: other.map_or("no geometry".to_string(), |g| g.type_name().to_string()),
                });
            }
        }
    }
    Ok(out)
}

fn polygon_from_rings(rings: Vec<Vec<Point2>>) -> Result<Polygon, GeomError> {
    let mut iter = rings.into_iter();
    let exterior = Ring::new(iter.next().ok_or(GeomError::EmptyGeometry)?)?;
    let holes = iter.map(Ring::new).collect::<Result<Vec<_>, _>>()?;
    Polygon::new(exterior, holes)
}

/// Read per-edge areas from a sections-style collection: `edge_id` (or the
/// feature id) plus `area_m2` (or the geometry's area).
pub fn read_section_areas(path: &Path) -> Result<Vec<(EdgeId, f64)>, IoError> {
    let features = read_features(path)?;
    let mut out = Vec::with_capacity(features.len());
    for (index, f) in features.into_iter().enumerate() {
        let id = match f.properties.get("edge_id").and_then(Value::as_str) {
            Some(s) => s.to_string(),
            None => f.id.unwrap_or_else(|| index.to_string()),
        };
        let area = match f.properties.get("area_m2").and_then(Value::as_f64) {
            Some(a) => a,
            None => match &f.geometry {
                Some(GeoGeometry::Polygon(rings)) => polygon_from_rings(rings.clone())
                    .map_err(|e| IoError::BadFeature {
                        path: path.display().to_string(),
                        index,
                        detail: e.to_string(),
                    })?
                    .area(),
                Some(GeoGeometry::MultiPolygon(polys)) => {
                    let mut total = 0.0;
                    for rings in polys {
                        total += polygon_from_rings(rings.clone())
                            .map_err(|e| IoError::BadFeature {
                                path: path.display().to_string(),
                                index,
                                detail: e.to_string(),
                            })?
                            .area();
                    }
                    total
                }
                _ => {
                    return Err(IoError::BadFeature {
                        path: path.display().to_string(),
                        index,
                        detail: "needs an area_m2 property or polygonal geometry".into(),
                    });
                }
            },
        };
        out.push((EdgeId(id), area));
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// Writers. Coordinates and computed measures carry 9 decimal places.

fn fmt_coord(p: &Point2) -> String {
    format!("[{:.9},{:.9}]", p.x, p.y)
}

fn linestring_coords(pts: &[Point2]) -> String {
    let inner: Vec<String> = pts.iter().map(fmt_coord).collect();
    format!("[{}]", inner.join(","))
}

fn ring_coords(ring: &Ring<f64>) -> String {
    // GeoJSON rings repeat the first vertex at the end.
    let mut inner: Vec<String> = ring.points().iter().map(fmt_coord).collect();
    inner.push(fmt_coord(&ring.points()[0]));
    format!("[{}]", inner.join(","))
}

fn polygon_coords(p: &Polygon) -> String {
    let rings: Vec<String> = p.rings().map(ring_coords).collect();
    format!("[{}]", rings.join(","))
}

fn multipolygon_geometry(g: &crate::MultiPolygon) -> String {
    let polys: Vec<String> = g.polygons().iter().map(polygon_coords).collect();
    format!(
        "{{\"type\":\"MultiPolygon\",\"coordinates\":[{}]}}",
        polys.join(",")
    )
}

fn polygon_geometry(p: &Polygon) -> String {
    format!("{{\"type\":\"Polygon\",\"coordinates\":{}}}", polygon_coords(p))
}

fn point_geometry(p: &Point2) -> String {
    format!("{{\"type\":\"Point\",\"coordinates\":{}}}", fmt_coord(p))
}

/// Property value with deterministic formatting.
enum Prop {
    /// Computed measure, fixed 9 decimals.
    Num(f64),
    /// Opaque attribute value, serialized by serde_json.
    Raw(Value),
}

fn feature_json(id: &str, geometry: Option<String>, props: &[(String, Prop)]) -> String {
    let mut prop_parts = Vec::with_capacity(props.len());
    for (k, v) in props {
        let key = serde_json::to_string(k).expect("key serializes");
        let val = match v {
            Prop::Num(n) => format!("{n:.9}"),
            Prop::Raw(value) => serde_json::to_string(value).expect("value serializes"),
        };
        prop_parts.push(format!("{key}:{val}"));
    }
    format!(
        "{{\"type\":\"Feature\",\"id\":{},\"geometry\":{},\"properties\":{{{}}}}}",
        serde_json::to_string(id).expect("id serializes"),
        geometry.unwrap_or_else(|| "null".to_string()),
        prop_parts.join(",")
    )
}

fn write_collection(path: &Path, features: Vec<String>) -> Result<(), IoError> {
    let mut out = String::from("{\"type\":\"FeatureCollection\",\"features\":[\n");
    out.push_str(&features.join(",\n"));
    if !features.is_empty() {
        out.push('\n');
    }
    out.push_str("]}\n");
    let mut file = std::fs::File::create(path).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })?;
    file.write_all(out.as_bytes()).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

/// Attribute entries, reserved keys excluded.
fn attribute_props(attributes: &Attributes, reserved: &[&str]) -> Vec<(String, Prop)> {
    attributes
        .iter()
        .filter(|(k, _)| !reserved.contains(&k.as_str()))
        .map(|(k, v)| (k.clone(), Prop::Raw(v.clone())))
        .collect()
}

/// Write sections with `edge_id`, transferred attributes, `area_m2` and
/// `flags`.
pub fn write_sections(result: &PartitionResult, path: &Path) -> Result<(), IoError> {
    let features = result
        .sections
        .iter()
        .map(|s| {
            let mut props: Vec<(String, Prop)> = vec![
                ("edge_id".into(), Prop::Raw(Value::String(s.edge.0.clone()))),
                ("area_m2".into(), Prop::Num(s.area)),
                (
                    "flags".into(),
                    Prop::Raw(Value::Array(
                        s.flags
                            .iter()
                            .map(|f| Value::String(f.as_str().to_string()))
                            .collect(),
                    )),
                ),
            ];
            props.extend(attribute_props(&s.attributes, &["edge_id", "area_m2", "flags"]));
            feature_json(&s.edge.0, Some(multipolygon_geometry(&s.geometry)), &props)
        })
        .collect();
    write_collection(path, features)
}

/// Write the dissolved footprint as a single MultiPolygon feature.
pub fn write_footprint(footprint: &Footprint, path: &Path) -> Result<(), IoError> {
    let props = vec![(
        "source_count".into(),
        Prop::Raw(Value::Number(footprint.source_count.into())),
    )];
    let feature = feature_json(
        "footprint",
        Some(multipolygon_geometry(&footprint.geometry)),
        &props,
    );
    write_collection(path, vec![feature])
}

/// Write seeds as Point features with owner and kind.
pub fn write_seeds(seeds: &[SourcePoint], path: &Path) -> Result<(), IoError> {
    let features = seeds
        .iter()
        .map(|s| {
            let mut props: Vec<(String, Prop)> = vec![
                ("seed_id".into(), Prop::Raw(Value::Number(s.id.0.into()))),
                ("edge_id".into(), Prop::Raw(Value::String(s.owner_edge.0.clone()))),
                (
                    "kind".into(),
                    Prop::Raw(Value::String(s.kind.as_str().to_string())),
                ),
                ("arclength_m".into(), Prop::Num(s.arclength)),
            ];
            if s.kind == SourceKind::Buffer {
                if let Some(node) = s.origin_node {
                    props.push((
                        "origin_node".into(),
                        Prop::Raw(Value::String(node.to_string())),
                    ));
                }
            }
            feature_json(&s.id.to_string(), Some(point_geometry(&s.position)), &props)
        })
        .collect();
    write_collection(path, features)
}

/// Write Voronoi cells as Polygon features tagged with their seed.
pub fn write_cells(diagram: &VoronoiDiagram, path: &Path) -> Result<(), IoError> {
    let features = diagram
        .cells
        .iter()
        .map(|c| {
            let props = vec![(
                "seed_id".into(),
                Prop::Raw(Value::Number(c.seed.0.into())),
            )];
            feature_json(&c.seed.to_string(), Some(polygon_geometry(&c.polygon)), &props)
        })
        .collect();
    write_collection(path, features)
}

/// Write reference areas (no geometry) for validation runs.
pub fn write_reference(reference: &[(EdgeId, f64)], path: &Path) -> Result<(), IoError> {
    let features = reference
        .iter()
        .map(|(id, area)| {
            let props = vec![
                ("edge_id".into(), Prop::Raw(Value::String(id.0.clone()))),
                ("area_m2".into(), Prop::Num(*area)),
            ];
            feature_json(&id.0, None, &props)
        })
        .collect();
    write_collection(path, features)
}

/// Write raw lines (for the synthetic generator output).
pub fn write_lines(lines: &[InputLine], path: &Path) -> Result<(), IoError> {
    let features = lines
        .iter()
        .map(|l| {
            let mut props: Vec<(String, Prop)> = Vec::new();
            props.extend(attribute_props(&l.attributes, &[]));
            feature_json(
                &l.id.0,
                Some(format!(
                    "{{\"type\":\"LineString\",\"coordinates\":{}}}",
                    linestring_coords(l.geometry.points())
                )),
                &props,
            )
        })
        .collect();
    write_collection(path, features)
}

/// Write raw surface polygons (for the synthetic generator output).
pub fn write_polygons(polys: &[Polygon], path: &Path) -> Result<(), IoError> {
    let features = polys
        .iter()
        .enumerate()
        .map(|(i, p)| feature_json(&i.to_string(), Some(polygon_geometry(p)), &[]))
        .collect();
    write_collection(path, features)
}

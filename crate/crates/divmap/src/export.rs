//! Competence map export: DOT, GraphML, SVG and a coordinates CSV.
//!
//! Every format lists all basemap nodes, inactive ones included, and all
//! basemap edges.

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use divmap_core::render::VIEWPORT;
use divmap_core::{CompetenceMap, LayoutCoords, NodeStyle};

use crate::error::{Error, Result};
use crate::formats::{save_with, GraphmlWriter};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapFormat {
    Dot,
    Graphml,
    Svg,
    Csv,
}

impl MapFormat {
    pub fn extension(self) -> &'static str {
        match self {
            MapFormat::Dot => "dot",
            MapFormat::Graphml => "graphml",
            MapFormat::Svg => "svg",
            MapFormat::Csv => "csv",
        }
    }
}

impl std::fmt::Display for MapFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.extension())
    }
}

impl FromStr for MapFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(MapFormat::Dot),
            "graphml" => Ok(MapFormat::Graphml),
            "svg" => Ok(MapFormat::Svg),
            "csv" => Ok(MapFormat::Csv),
            other => Err(format!(
                "unknown map format `{other}` (expected dot, graphml, svg or csv)"
            )),
        }
    }
}

/// One node of an exported map.
#[derive(Debug, Clone, PartialEq)]
pub struct MapNode {
    pub sc: String,
    pub x: f64,
    pub y: f64,
    pub share: f64,
}

fn map_nodes(cm: &CompetenceMap<'_>, coords: &LayoutCoords) -> Result<Vec<MapNode>> {
    let bm = cm.basemap();
    if !coords.covers(bm) {
        return Err(Error::Invariant(format!(
            "layout of {} nodes does not cover the basemap of `{}`",
            coords.names().len(),
            cm.org_id()
        )));
    }
    Ok(bm
        .nodes()
        .iter()
        .zip(cm.weights())
        .map(|(sc, &share)| {
            let (x, y) = coords.get(sc).unwrap_or_default();
            MapNode {
                sc: sc.clone(),
                x,
                y,
                share,
            }
        })
        .collect())
}

pub fn export_map<W: Write>(
    cm: &CompetenceMap<'_>,
    coords: &LayoutCoords,
    style: &NodeStyle,
    format: MapFormat,
    writer: W,
) -> Result<()> {
    let nodes = map_nodes(cm, coords)?;
    match format {
        MapFormat::Csv => write_csv(&nodes, writer),
        MapFormat::Dot => write_dot(cm, &nodes, style, writer),
        MapFormat::Graphml => write_graphml(cm, &nodes, style, writer),
        MapFormat::Svg => write_svg(cm, &nodes, style, writer),
    }
}

pub fn save_map(
    cm: &CompetenceMap<'_>,
    coords: &LayoutCoords,
    style: &NodeStyle,
    format: MapFormat,
    path: &Path,
) -> Result<()> {
    save_with(path, |w| export_map(cm, coords, style, format, w))
}

fn io_err(e: std::io::Error) -> Error {
    Error::io("map", e)
}

/// `sc,x,y,share`, one row per basemap node. Numbers are written in their
/// shortest round-trip form.
fn write_csv<W: Write>(nodes: &[MapNode], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let row = |w: &mut csv::Writer<W>, r: [&str; 4]| {
        w.write_record(r).map_err(|e| Error::format("map", e))
    };
    row(&mut w, ["sc", "x", "y", "share"])?;
    for n in nodes {
        row(
            &mut w,
            [
                &n.sc,
                &n.x.to_string(),
                &n.y.to_string(),
                &n.share.to_string(),
            ],
        )?;
    }
    w.flush().map_err(io_err)
}

/// Reads a map written in the CSV format.
pub fn read_map_csv<R: Read>(reader: R, origin: &str) -> Result<Vec<MapNode>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| Error::format(origin, e))?
        .iter()
        .map(str::to_string)
        .collect();
    if header != ["sc", "x", "y", "share"] {
        return Err(Error::parse(origin, 1, "expected header `sc,x,y,share`"));
    }
    let mut out = Vec::new();
    for result in rdr.records() {
        let record = result.map_err(|e| Error::format(origin, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let num = |k: usize| {
            record[k].parse::<f64>().map_err(|_| {
                Error::parse(origin, line, format!("`{}` is not a number", &record[k]))
            })
        };
        out.push(MapNode {
            sc: record[0].to_string(),
            x: num(1)?,
            y: num(2)?,
            share: num(3)?,
        });
    }
    Ok(out)
}

fn dot_id(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

/// Undirected graph with pinned positions in points and node `width` in
/// inches (the circle's diameter at 72 points per inch).
fn write_dot<W: Write>(
    cm: &CompetenceMap<'_>,
    nodes: &[MapNode],
    style: &NodeStyle,
    mut w: W,
) -> Result<()> {
    let bm = cm.basemap();
    let mut s = String::new();
    let _ = writeln!(s, "graph {} {{", dot_id(cm.org_id()));
    let _ = writeln!(s, "  node [shape=circle, fixedsize=true, label=\"\"];");
    for n in nodes {
        let r = style.radius(n.share);
        let _ = writeln!(
            s,
            "  {} [pos=\"{},{}!\", width={}, share={}];",
            dot_id(&n.sc),
            n.x * VIEWPORT,
            n.y * VIEWPORT,
            2.0 * r / 72.0,
            n.share
        );
    }
    for e in bm.edges() {
        let _ = writeln!(
            s,
            "  {} -- {} [penwidth={}, similarity={}];",
            dot_id(bm.name(e.a)),
            dot_id(bm.name(e.b)),
            style.edge_width(e.similarity()),
            e.similarity()
        );
    }
    s.push_str("}\n");
    w.write_all(s.as_bytes())
        .and_then(|_| w.flush())
        .map_err(io_err)
}

fn write_graphml<W: Write>(
    cm: &CompetenceMap<'_>,
    nodes: &[MapNode],
    style: &NodeStyle,
    w: W,
) -> Result<()> {
    let bm = cm.basemap();
    let mut g = GraphmlWriter::begin(
        w,
        "map",
        &[
            ("x", "node", "double"),
            ("y", "node", "double"),
            ("share", "node", "double"),
            ("radius", "node", "double"),
            ("similarity", "edge", "double"),
            ("width", "edge", "double"),
        ],
        cm.org_id(),
    )?;
    for n in nodes {
        g.node(
            &n.sc,
            &[
                ("x", n.x.to_string()),
                ("y", n.y.to_string()),
                ("share", n.share.to_string()),
                ("radius", style.radius(n.share).to_string()),
            ],
        )?;
    }
    for e in bm.edges() {
        g.edge(
            bm.name(e.a),
            bm.name(e.b),
            &[
                ("similarity", e.similarity().to_string()),
                ("width", style.edge_width(e.similarity()).to_string()),
            ],
        )?;
    }
    g.finish()?;
    Ok(())
}

fn xml_text(s: &str) -> String {
    quick_xml::escape::escape(s).into_owned()
}

/// Fixed `VIEWPORT`-sized square. Unit coordinates are inset by the largest
/// possible radius so every circle stays inside.
fn write_svg<W: Write>(
    cm: &CompetenceMap<'_>,
    nodes: &[MapNode],
    style: &NodeStyle,
    mut w: W,
) -> Result<()> {
    let bm = cm.basemap();
    let margin = style.radius(1.0);
    let span = VIEWPORT - 2.0 * margin;
    let place = |n: &MapNode| (margin + n.x * span, margin + n.y * span);

    let mut s = String::new();
    let _ = writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{v}\" height=\"{v}\" viewBox=\"0 0 {v} {v}\">",
        v = VIEWPORT
    );
    let _ = writeln!(s, "  <title>{}</title>", xml_text(cm.org_id()));
    let _ = writeln!(s, "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>");
    let _ = writeln!(s, "  <g stroke=\"#9a9a9a\" stroke-opacity=\"0.6\">");
    for e in bm.edges() {
        let (x1, y1) = place(&nodes[e.a]);
        let (x2, y2) = place(&nodes[e.b]);
        let _ = writeln!(
            s,
            "    <line x1=\"{x1:.3}\" y1=\"{y1:.3}\" x2=\"{x2:.3}\" y2=\"{y2:.3}\" stroke-width=\"{:.3}\"/>",
            style.edge_width(e.similarity())
        );
    }
    s.push_str("  </g>\n  <g stroke=\"#333333\" stroke-width=\"0.5\">\n");
    for n in nodes {
        let (x, y) = place(n);
        let fill = if n.share > 0.0 { "#d6604d" } else { "#cccccc" };
        let _ = writeln!(
            s,
            "    <circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"{:.3}\" fill=\"{fill}\"><title>{} {:.4}</title></circle>",
            style.radius(n.share),
            xml_text(&n.sc),
            n.share
        );
    }
    s.push_str("  </g>\n</svg>\n");
    w.write_all(s.as_bytes())
        .and_then(|_| w.flush())
        .map_err(io_err)
}

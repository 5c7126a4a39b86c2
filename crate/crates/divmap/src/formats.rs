//! Readers and writers for the tabular and graph file formats.
//!
//! Readers take any `Read` plus an `origin` string used in error messages;
//! the `load_*` and `save_*` helpers wrap them for paths.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use divmap_core::{
    Basemap, BasemapBuilder, CitationMatrix, DistanceMatrix, DiversityReport, Histogram, Metric,
    PaperRecord, RankTable, ResearchProfile,
};
use quick_xml::events::{BytesDecl, BytesEnd, BytesStart, BytesText, Event};
use quick_xml::{Reader, Writer};

use crate::error::{Error, Result};

/// On-disk representation of a basemap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Csv,
    Graphml,
}

impl GraphFormat {
    /// `.graphml` and `.xml` files are GraphML, anything else is CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("graphml") || ext.eq_ignore_ascii_case("xml") => {
                GraphFormat::Graphml
            }
            _ => GraphFormat::Csv,
        }
    }
}

impl std::fmt::Display for GraphFormat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            GraphFormat::Csv => "csv",
            GraphFormat::Graphml => "graphml",
        })
    }
}

impl FromStr for GraphFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(GraphFormat::Csv),
            "graphml" => Ok(GraphFormat::Graphml),
            other => Err(format!(
                "unknown graph format `{other}` (expected csv or graphml)"
            )),
        }
    }
}

pub(crate) fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn origin(path: &Path) -> String {
    path.display().to_string()
}

fn csv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(reader)
}

fn csv_error(origin: &str, e: csv::Error) -> Error {
    match e.position() {
        Some(pos) => {
            let message = match e.kind() {
                csv::ErrorKind::UnequalLengths {
                    expected_len, len, ..
                } => {
                    format!("expected {expected_len} fields, found {len}")
                }
                csv::ErrorKind::Utf8 { .. } => "invalid UTF-8".to_string(),
                _ => e.to_string(),
            };
            Error::parse(origin, pos.line(), message)
        }
        None => Error::format(origin, e),
    }
}

fn csv_write_error(origin: &str, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(origin, io),
        other => Error::format(origin, format!("{other:?}")),
    }
}

/// Checks that the header is exactly `expected`.
fn expect_header<R: Read>(rdr: &mut csv::Reader<R>, origin: &str, expected: &[&str]) -> Result<()> {
    let header = rdr.headers().map_err(|e| csv_error(origin, e))?;
    let got: Vec<&str> = header.iter().collect();
    if got != expected {
        return Err(Error::parse(
            origin,
            1,
            format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                got.join(",")
            ),
        ));
    }
    Ok(())
}

fn parse_number(origin: &str, line: u64, field: &str, what: &str) -> Result<f64> {
    field
        .parse::<f64>()
        .map_err(|_| Error::parse(origin, line, format!("{what} `{field}` is not a number")))
}

// ---- citation matrix ----

/// Square CSV whose header row and first column hold SC names. Rows may be
/// listed in any order but must name exactly the header's SCs.
pub fn read_citation_matrix<R: Read>(reader: R, origin: &str) -> Result<CitationMatrix> {
    let mut rdr = csv_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(origin, e))?.clone();
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let index: BTreeMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, n)| (n.as_str(), i))
        .collect();
    if index.len() != names.len() {
        return Err(Error::parse(origin, 1, "duplicate SC name in header"));
    }
    let mut rows: Vec<Option<Vec<f64>>> = vec![None; names.len()];
    for result in rdr.records() {
        let record = result.map_err(|e| csv_error(origin, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let name = record.get(0).unwrap_or_default();
        let Some(&i) = index.get(name) else {
            return Err(Error::parse(
                origin,
                line,
                format!("row `{name}` is not a column of the matrix"),
            ));
        };
        if rows[i].is_some() {
            return Err(Error::parse(
                origin,
                line,
                format!("row `{name}` appears twice"),
            ));
        }
        let values = record
            .iter()
            .skip(1)
            .map(|f| parse_number(origin, line, f, "citation count"))
            .collect::<Result<Vec<f64>>>()?;
        rows[i] = Some(values);
    }
    let found = rows.iter().filter(|r| r.is_some()).count();
    if found != names.len() {
        return Err(Error::Core(divmap_core::Error::NotSquare {
            rows: found,
            cols: names.len(),
        }));
    }
    let rows = rows.into_iter().map(Option::unwrap_or_default).collect();
    Ok(CitationMatrix::new(names, rows)?)
}

pub fn load_citation_matrix(path: &Path) -> Result<CitationMatrix> {
    read_citation_matrix(open(path)?, &origin(path))
}

// ---- basemap: edge-list CSV ----

/// Edge list with header `source,target,similarity`, one row per unordered
/// pair. A row with empty `target` and `similarity` declares an isolated
/// node. Nodes are numbered in order of first appearance.
pub fn read_basemap_csv<R: Read>(reader: R, origin: &str, threshold: f64) -> Result<Basemap> {
    let mut rdr = csv_reader(reader);
    expect_header(&mut rdr, origin, &["source", "target", "similarity"])?;
    let mut builder = BasemapBuilder::new(threshold);
    for result in rdr.records() {
        let record = result.map_err(|e| csv_error(origin, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let (a, b, s) = (&record[0], &record[1], &record[2]);
        if a.is_empty() {
            return Err(Error::parse(origin, line, "empty source"));
        }
        if b.is_empty() && s.is_empty() {
            builder.add_node(a);
            continue;
        }
        if b.is_empty() {
            return Err(Error::parse(origin, line, "empty target"));
        }
        let s = parse_number(origin, line, s, "similarity")?;
        builder
            .add_edge(a, b, s)
            .map_err(|e| Error::parse(origin, line, e))?;
    }
    Ok(builder.build())
}

/// Writes edges in index order, then one row per isolated node. Numbers use
/// the shortest representation that parses back to the same value.
pub fn write_basemap_csv<W: Write>(bm: &Basemap, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let o = "basemap";
    w.write_record(["source", "target", "similarity"])
        .map_err(|e| csv_write_error(o, e))?;
    for e in bm.edges() {
        w.write_record([bm.name(e.a), bm.name(e.b), &e.similarity().to_string()])
            .map_err(|e| csv_write_error(o, e))?;
    }
    for i in (0..bm.node_count()).filter(|&i| bm.degree(i) == 0) {
        w.write_record([bm.name(i), "", ""])
            .map_err(|e| csv_write_error(o, e))?;
    }
    w.flush().map_err(|e| Error::io(o, e))
}

// ---- basemap: GraphML ----

const GRAPHML_NS: &str = "http://graphml.graphdrawing.org/xmlns";

fn xml_error(origin: &str, e: impl std::fmt::Display) -> Error {
    Error::format(origin, format!("malformed XML: {e}"))
}

fn line_at(text: &str, byte: u64) -> u64 {
    let end = (byte as usize).min(text.len());
    text.as_bytes()[..end]
        .iter()
        .filter(|&&b| b == b'\n')
        .count() as u64
        + 1
}

fn attr(e: &BytesStart<'_>, name: &str, origin: &str) -> Result<Option<String>> {
    for a in e.attributes() {
        let a = a.map_err(|err| xml_error(origin, err))?;
        if a.key.as_ref() == name.as_bytes() {
            let v = a.unescape_value().map_err(|err| xml_error(origin, err))?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

#[derive(Default)]
struct PendingEdge {
    source: String,
    target: String,
    similarity: Option<String>,
    line: u64,
}

/// GraphML with an edge attribute named `similarity`. An optional graph
/// attribute `threshold` is honored when `threshold` is `None`.
pub fn read_basemap_graphml<R: Read>(
    mut reader: R,
    origin: &str,
    threshold: Option<f64>,
) -> Result<Basemap> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| Error::io(origin, e))?;
    let mut xml = Reader::from_str(&text);
    xml.config_mut().trim_text(true);

    // key id -> (domain, attr.name)
    let mut keys: BTreeMap<String, (String, String)> = BTreeMap::new();
    let mut nodes: Vec<String> = Vec::new();
    let mut edges: Vec<PendingEdge> = Vec::new();
    let mut graph_threshold: Option<f64> = None;
    let mut current_edge: Option<PendingEdge> = None;
    let mut data_key: Option<String> = None;
    let mut in_graph = false;
    let mut seen_graph = false;

    loop {
        let event = xml.read_event().map_err(|e| {
            Error::parse(
                origin,
                line_at(&text, xml.error_position()),
                format!("malformed XML: {e}"),
            )
        })?;
        // the reader stops just past the event; its tag opens at the last `<`
        let end = (xml.buffer_position() as usize).min(text.len());
        let line = line_at(&text, text[..end].rfind('<').unwrap_or(0) as u64);
        let opened = match &event {
            Event::Start(e) => Some((e, false)),
            Event::Empty(e) => Some((e, true)),
            _ => None,
        };
        if let Some((e, empty)) = opened {
            match e.local_name().as_ref() {
                b"key" => {
                    let id = attr(e, "id", origin)?
                        .ok_or_else(|| Error::parse(origin, line, "key without id"))?;
                    let domain = attr(e, "for", origin)?.unwrap_or_default();
                    let name = attr(e, "attr.name", origin)?.unwrap_or_else(|| id.clone());
                    keys.insert(id, (domain, name));
                }
                b"graph" => {
                    if seen_graph {
                        return Err(Error::parse(
                            origin,
                            line,
                            "only one graph per file is supported",
                        ));
                    }
                    seen_graph = true;
                    in_graph = !empty;
                }
                b"node" => {
                    let id = attr(e, "id", origin)?
                        .ok_or_else(|| Error::parse(origin, line, "node without id"))?;
                    if nodes.contains(&id) {
                        return Err(Error::parse(origin, line, format!("duplicate node `{id}`")));
                    }
                    nodes.push(id);
                }
                b"edge" => {
                    let source = attr(e, "source", origin)?
                        .ok_or_else(|| Error::parse(origin, line, "edge without source"))?;
                    let target = attr(e, "target", origin)?
                        .ok_or_else(|| Error::parse(origin, line, "edge without target"))?;
                    let edge = PendingEdge {
                        source,
                        target,
                        similarity: None,
                        line,
                    };
                    if empty {
                        edges.push(edge);
                    } else {
                        current_edge = Some(edge);
                    }
                }
                b"data" if !empty => {
                    data_key = attr(e, "key", origin)?;
                }
                _ => {}
            }
            continue;
        }
        match event {
            Event::Text(t) => {
                if let Some(key) = &data_key {
                    let value = t
                        .unescape()
                        .map_err(|e| xml_error(origin, e))?
                        .trim()
                        .to_string();
                    let name = keys.get(key).map_or(key.as_str(), |(_, n)| n.as_str());
                    if let Some(edge) = current_edge.as_mut() {
                        if name == "similarity" {
                            edge.similarity = Some(value);
                        }
                    } else if in_graph && name == "threshold" {
                        graph_threshold = Some(parse_number(origin, line, &value, "threshold")?);
                    }
                }
            }
            Event::End(e) => match e.local_name().as_ref() {
                b"edge" => edges.extend(current_edge.take()),
                b"data" => data_key = None,
                b"graph" => in_graph = false,
                _ => {}
            },
            Event::Eof => break,
            _ => {}
        }
    }
    if !seen_graph {
        return Err(Error::format(origin, "no <graph> element"));
    }

    let threshold = threshold.or(graph_threshold).unwrap_or(0.0);
    let mut builder = BasemapBuilder::new(threshold);
    for n in &nodes {
        builder.add_node(n);
    }
    for e in edges {
        for end in [&e.source, &e.target] {
            if !nodes.contains(end) {
                return Err(Error::parse(
                    origin,
                    e.line,
                    format!("edge refers to unknown node `{end}`"),
                ));
            }
        }
        let s = e
            .similarity
            .ok_or_else(|| Error::parse(origin, e.line, "edge without similarity"))?;
        let s = parse_number(origin, e.line, &s, "similarity")?;
        builder
            .add_edge(&e.source, &e.target, s)
            .map_err(|err| Error::parse(origin, e.line, err))?;
    }
    Ok(builder.build())
}

/// Minimal GraphML document writer shared by basemap and map export.
pub(crate) struct GraphmlWriter<W: Write> {
    xml: Writer<W>,
    origin: String,
}

impl<W: Write> GraphmlWriter<W> {
    /// Writes the prologue and the key declarations `(id, domain, type)`.
    pub(crate) fn begin(
        writer: W,
        origin: &str,
        keys: &[(&str, &str, &str)],
        graph_id: &str,
    ) -> Result<Self> {
        let mut g = Self {
            xml: Writer::new_with_indent(writer, b' ', 2),
            origin: origin.to_string(),
        };
        g.event(Event::Decl(BytesDecl::new("1.0", Some("UTF-8"), None)))?;
        g.event(Event::Start(
            BytesStart::new("graphml").with_attributes([("xmlns", GRAPHML_NS)]),
        ))?;
        for &(id, domain, ty) in keys {
            g.event(Event::Empty(BytesStart::new("key").with_attributes([
                ("id", id),
                ("for", domain),
                ("attr.name", id),
                ("attr.type", ty),
            ])))?;
        }
        g.event(Event::Start(BytesStart::new("graph").with_attributes([
            ("id", graph_id),
            ("edgedefault", "undirected"),
        ])))?;
        Ok(g)
    }

    fn event(&mut self, e: Event<'_>) -> Result<()> {
        self.xml
            .write_event(e)
            .map_err(|e| Error::format(&self.origin, format!("cannot write XML: {e}")))
    }

    pub(crate) fn data(&mut self, data: &[(&str, String)]) -> Result<()> {
        for (key, value) in data {
            self.event(Event::Start(
                BytesStart::new("data").with_attributes([("key", *key)]),
            ))?;
            self.event(Event::Text(BytesText::new(value)))?;
            self.event(Event::End(BytesEnd::new("data")))?;
        }
        Ok(())
    }

    pub(crate) fn node(&mut self, id: &str, data: &[(&str, String)]) -> Result<()> {
        let start = BytesStart::new("node").with_attributes([("id", id)]);
        if data.is_empty() {
            return self.event(Event::Empty(start));
        }
        self.event(Event::Start(start))?;
        self.data(data)?;
        self.event(Event::End(BytesEnd::new("node")))
    }

    pub(crate) fn edge(
        &mut self,
        source: &str,
        target: &str,
        data: &[(&str, String)],
    ) -> Result<()> {
        self.event(Event::Start(
            BytesStart::new("edge").with_attributes([("source", source), ("target", target)]),
        ))?;
        self.data(data)?;
        self.event(Event::End(BytesEnd::new("edge")))
    }

    pub(crate) fn finish(mut self) -> Result<W> {
        self.event(Event::End(BytesEnd::new("graph")))?;
        self.event(Event::End(BytesEnd::new("graphml")))?;
        let mut inner = self.xml.into_inner();
        inner
            .write_all(b"\n")
            .and_then(|_| inner.flush())
            .map_err(|e| Error::io(&self.origin, e))?;
        Ok(inner)
    }
}

pub fn write_basemap_graphml<W: Write>(bm: &Basemap, writer: W) -> Result<()> {
    let mut g = GraphmlWriter::begin(
        writer,
        "basemap",
        &[
            ("threshold", "graph", "double"),
            ("similarity", "edge", "double"),
        ],
        "basemap",
    )?;
    g.data(&[("threshold", bm.threshold().to_string())])?;
    for name in bm.nodes() {
        g.node(name, &[])?;
    }
    for e in bm.edges() {
        g.edge(
            bm.name(e.a),
            bm.name(e.b),
            &[("similarity", e.similarity().to_string())],
        )?;
    }
    g.finish()?;
    Ok(())
}

/// Loads a basemap. CSV edge lists carry no threshold, so `threshold`
/// defaults to 0 for them; GraphML falls back to its stored threshold.
pub fn load_basemap(path: &Path, format: GraphFormat, threshold: Option<f64>) -> Result<Basemap> {
    let o = origin(path);
    match format {
        GraphFormat::Csv => read_basemap_csv(open(path)?, &o, threshold.unwrap_or(0.0)),
        GraphFormat::Graphml => read_basemap_graphml(open(path)?, &o, threshold),
    }
}

pub fn save_basemap(bm: &Basemap, path: &Path, format: GraphFormat) -> Result<()> {
    let w = create(path)?;
    match format {
        GraphFormat::Csv => write_basemap_csv(bm, w),
        GraphFormat::Graphml => write_basemap_graphml(bm, w),
    }
    .map_err(|e| relabel(e, path))
}

/// Replaces the placeholder origin used by writers with the real path.
fn relabel(e: Error, path: &Path) -> Error {
    match e {
        Error::Io { source, .. } => Error::io(path, source),
        Error::Format { message, .. } => Error::format(&origin(path), message),
        other => other,
    }
}

// ---- profiles ----

/// Paper records with header `org_id,paper_id,subject_categories`; the
/// categories are separated by `;`.
pub fn read_records<R: Read>(reader: R, origin: &str) -> Result<Vec<PaperRecord>> {
    let mut rdr = csv_reader(reader);
    expect_header(
        &mut rdr,
        origin,
        &["org_id", "paper_id", "subject_categories"],
    )?;
    let mut out = Vec::new();
    for result in rdr.records() {
        let record = result.map_err(|e| csv_error(origin, e))?;
        let line = record.position().map_or(0, |p| p.line());
        let categories: Vec<String> = record[2]
            .split(';')
            .map(str::trim)
            .filter(|c| !c.is_empty())
            .map(str::to_string)
            .collect();
        let paper = PaperRecord::new(&record[0], &record[1], categories)
            .map_err(|e| Error::parse(origin, line, e))?;
        out.push(paper);
    }
    Ok(out)
}

pub fn load_records(path: &Path) -> Result<Vec<PaperRecord>> {
    read_records(open(path)?, &origin(path))
}

/// Pre-aggregated counts with header `org_id,subject_category,count`.
/// Repeated (org, category) rows add up. Profiles come out ordered by org.
pub fn read_profiles<R: Read>(reader: R, origin: &str) -> Result<Vec<ResearchProfile>> {
    let mut rdr = csv_reader(reader);
    expect_header(&mut rdr, origin, &["org_id", "subject_category", "count"])?;
    let mut by_org: BTreeMap<String, (u64, Vec<(String, f64)>)> = BTreeMap::new();
    for result in rdr.records() {
        let record = result.map_err(|e| csv_error(origin, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if record[0].is_empty() || record[1].is_empty() {
            return Err(Error::parse(
                origin,
                line,
                "empty org_id or subject_category",
            ));
        }
        let count = parse_number(origin, line, &record[2], "count")?;
        if !count.is_finite() || count < 0.0 {
            return Err(Error::parse(
                origin,
                line,
                format!("count {count} must be finite and non-negative"),
            ));
        }
        by_org
            .entry(record[0].to_string())
            .or_insert_with(|| (line, Vec::new()))
            .1
            .push((record[1].to_string(), count));
    }
    if by_org.is_empty() {
        return Err(Error::format(origin, "no profile rows"));
    }
    by_org
        .into_iter()
        .map(|(org, (line, counts))| {
            ResearchProfile::from_counts(org, counts).map_err(|e| Error::parse(origin, line, e))
        })
        .collect()
}

pub fn load_profiles(path: &Path) -> Result<Vec<ResearchProfile>> {
    read_profiles(open(path)?, &origin(path))
}

pub fn write_profiles<W: Write>(profiles: &[ResearchProfile], writer: W) -> Result<()> {
    let o = "profiles";
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["org_id", "subject_category", "count"])
        .map_err(|e| csv_write_error(o, e))?;
    for p in profiles {
        for (c, v) in p.counts() {
            w.write_record([p.org_id(), c.as_str(), &v.to_string()])
                .map_err(|e| csv_write_error(o, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(o, e))
}

// ---- scores and reports ----

fn score_column(name: &str) -> Option<Metric> {
    name.strip_prefix("div_").and_then(|v| v.parse().ok())
}

/// Precomputed scores with header `org_id,div_<variant>,...` (an `error`
/// column, as written by [`write_report`], is allowed; rows with an error
/// are skipped).
pub fn read_scores<R: Read>(reader: R, origin: &str) -> Result<RankTable> {
    let mut rdr = csv_reader(reader);
    let header = rdr.headers().map_err(|e| csv_error(origin, e))?.clone();
    if header.get(0) != Some("org_id") {
        return Err(Error::parse(origin, 1, "first column must be `org_id`"));
    }
    let mut metrics = Vec::new();
    let mut error_col = None;
    for (k, name) in header.iter().enumerate().skip(1) {
        if name == "error" {
            error_col = Some(k);
            continue;
        }
        let m = score_column(name)
            .ok_or_else(|| Error::parse(origin, 1, format!("unknown score column `{name}`")))?;
        if metrics.iter().any(|&(_, x)| x == m) {
            return Err(Error::parse(
                origin,
                1,
                format!("column `{name}` appears twice"),
            ));
        }
        metrics.push((k, m));
    }
    if metrics.is_empty() {
        return Err(Error::parse(origin, 1, "no div_<variant> score column"));
    }
    let mut orgs: Vec<String> = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); metrics.len()];
    for result in rdr.records() {
        let record = result.map_err(|e| csv_error(origin, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if error_col.is_some_and(|k| !record[k].is_empty()) {
            continue;
        }
        let org = record[0].to_string();
        if org.is_empty() {
            return Err(Error::parse(origin, line, "empty org_id"));
        }
        if orgs.contains(&org) {
            return Err(Error::parse(
                origin,
                line,
                format!("org `{org}` appears twice"),
            ));
        }
        for (col, &(k, _)) in columns.iter_mut().zip(&metrics) {
            let v = parse_number(origin, line, &record[k], "score")?;
            if !v.is_finite() {
                return Err(Error::parse(origin, line, "score is not finite"));
            }
            col.push(v);
        }
        orgs.push(org);
    }
    if orgs.is_empty() {
        return Err(Error::format(origin, "no scored organizations"));
    }
    let cols = metrics.iter().map(|&(_, m)| m).zip(columns).collect();
    Ok(RankTable::new(orgs, cols)?)
}

pub fn load_scores(path: &Path) -> Result<RankTable> {
    read_scores(open(path)?, &origin(path))
}

/// Report CSV `org_id,div_<variant>,...` with six decimals. An `error`
/// column is appended only when some organization failed.
pub fn write_report<W: Write>(report: &DiversityReport, writer: W) -> Result<()> {
    let o = "report";
    let mut w = csv::Writer::from_writer(writer);
    let with_errors = report.rows.iter().any(|r| r.error.is_some());
    let mut header = vec!["org_id".to_string()];
    header.extend(report.metrics.iter().map(|m| format!("div_{m}")));
    if with_errors {
        header.push("error".into());
    }
    w.write_record(&header).map_err(|e| csv_write_error(o, e))?;
    for row in &report.rows {
        let mut rec = vec![row.org_id.clone()];
        match &row.error {
            None => rec.extend(row.values.iter().map(|v| format!("{v:.6}"))),
            Some(_) => rec.extend(report.metrics.iter().map(|_| String::new())),
        }
        if with_errors {
            rec.push(
                row.error
                    .as_ref()
                    .map(|e| e.to_string())
                    .unwrap_or_default(),
            );
        }
        w.write_record(&rec).map_err(|e| csv_write_error(o, e))?;
    }
    w.flush().map_err(|e| Error::io(o, e))
}

/// Report CSV for scores that did not come from a [`DiversityReport`].
pub fn write_scores<W: Write>(rt: &RankTable, writer: W) -> Result<()> {
    let o = "scores";
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["org_id".to_string()];
    header.extend(rt.metrics().map(|m| format!("div_{m}")));
    w.write_record(&header).map_err(|e| csv_write_error(o, e))?;
    for (k, org) in rt.orgs().iter().enumerate() {
        let mut rec = vec![org.clone()];
        rec.extend(rt.columns().iter().map(|c| format!("{:.6}", c.scores[k])));
        w.write_record(&rec).map_err(|e| csv_write_error(o, e))?;
    }
    w.flush().map_err(|e| Error::io(o, e))
}

/// Variant pairs compared in rank tables: every `(a, b)` with `a` before `b`
/// in table order.
pub fn variant_pairs(rt: &RankTable) -> Vec<(Metric, Metric)> {
    let metrics: Vec<Metric> = rt.metrics().collect();
    let mut pairs = Vec::new();
    for (i, &a) in metrics.iter().enumerate() {
        for &b in &metrics[i + 1..] {
            pairs.push((a, b));
        }
    }
    pairs
}

fn fmt_rank(r: f64) -> String {
    if r.fract() == 0.0 {
        format!("{r:.0}")
    } else {
        format!("{r:.1}")
    }
}

/// Rank table CSV `org_id,score_<v>,rank_<v>,...,delta_<a>_<b>,...` where
/// `delta_<a>_<b> = rank_<b> - rank_<a>`.
pub fn write_rank_table<W: Write>(rt: &RankTable, writer: W) -> Result<()> {
    let o = "ranks";
    let pairs = variant_pairs(rt);
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["org_id".to_string()];
    for c in rt.columns() {
        header.push(format!("score_{}", c.metric));
        header.push(format!("rank_{}", c.metric));
    }
    header.extend(pairs.iter().map(|(a, b)| format!("delta_{a}_{b}")));
    w.write_record(&header).map_err(|e| csv_write_error(o, e))?;
    for (k, org) in rt.orgs().iter().enumerate() {
        let mut rec = vec![org.clone()];
        for c in rt.columns() {
            rec.push(format!("{:.6}", c.scores[k]));
            rec.push(fmt_rank(c.ranks[k]));
        }
        for &(a, b) in &pairs {
            let delta = rt.column(b)?.ranks[k] - rt.column(a)?.ranks[k];
            rec.push(fmt_rank(delta));
        }
        w.write_record(&rec).map_err(|e| csv_write_error(o, e))?;
    }
    w.flush().map_err(|e| Error::io(o, e))
}

// ---- distances ----

/// Histogram as `bin,count`, followed by an `unreachable` row when some
/// pairs have no path.
pub fn write_histogram<W: Write>(h: &Histogram, writer: W) -> Result<()> {
    let o = "histogram";
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["bin", "count"])
        .map_err(|e| csv_write_error(o, e))?;
    for b in &h.bins {
        w.write_record([b.start.to_string(), b.count.to_string()])
            .map_err(|e| csv_write_error(o, e))?;
    }
    if h.unreachable > 0 {
        w.write_record(["unreachable".to_string(), h.unreachable.to_string()])
            .map_err(|e| csv_write_error(o, e))?;
    }
    w.flush().map_err(|e| Error::io(o, e))
}

/// Square CSV with SC names on the header row and first column.
pub fn write_distance_matrix<W: Write>(dm: &DistanceMatrix, writer: W) -> Result<()> {
    let o = "distances";
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec![String::new()];
    header.extend(dm.names().iter().cloned());
    w.write_record(&header).map_err(|e| csv_write_error(o, e))?;
    for (i, name) in dm.names().iter().enumerate() {
        let mut rec = vec![name.clone()];
        rec.extend(dm.row(i).iter().map(|v| v.to_string()));
        w.write_record(&rec).map_err(|e| csv_write_error(o, e))?;
    }
    w.flush().map_err(|e| Error::io(o, e))
}

pub(crate) fn save_with<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(BufWriter<File>) -> Result<()>,
{
    write(create(path)?).map_err(|e| relabel(e, path))
}

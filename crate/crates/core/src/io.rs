//! File formats: graph JSON and DIMACS, event graphs, orthogonal
//! representations, and the deterministic JSON writer used for reports.

use std::collections::{BTreeMap, BTreeSet};
use std::io;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::events::{EventGraph, EventLabel, LabelRecord};
use crate::graph::Graph;
use crate::orthorep::{CVector, OrthoRep};

/// Pretty printer that writes every float with 17 significant digits.
struct PreciseFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for PreciseFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Indented JSON with floats at 17 significant digits and a trailing
/// newline. Non-finite floats become `null`.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, PreciseFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json writes UTF-8"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GraphFormat {
    Json,
    Dimacs,
}

impl GraphFormat {
    /// Guess from the file extension, falling back to the first
    /// non-blank character (`{` means JSON).
    pub fn detect(path: Option<&Path>, text: &str) -> Self {
        let ext = path
            .and_then(|p| p.extension())
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("json") => GraphFormat::Json,
            Some("dimacs" | "col" | "clq") => GraphFormat::Dimacs,
            _ if text.trim_start().starts_with('{') => GraphFormat::Json,
            _ => GraphFormat::Dimacs,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphDoc {
    n: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default)]
    weights: Option<BTreeMap<String, u32>>,
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        message: format!("column {}: {e}", e.column()),
    }
}

fn warn_duplicates(edges: &[(usize, usize)]) {
    let mut seen = BTreeSet::new();
    for &(a, b) in edges {
        if !seen.insert((a.min(b), a.max(b))) {
            log::warn!("duplicate edge ({a}, {b}) ignored");
        }
    }
}

fn graph_from_doc(doc: GraphDoc) -> Result<Graph> {
    let edges: Vec<(usize, usize)> = doc.edges.iter().map(|&[a, b]| (a, b)).collect();
    warn_duplicates(&edges);
    let weights = doc
        .weights
        .map(|w| {
            w.into_iter()
                .map(|(k, v)| {
                    k.trim()
                        .parse::<usize>()
                        .map(|k| (k, v))
                        .map_err(|_| Error::Parse {
                            line: 0,
                            message: format!("weight key {k:?} is not a vertex id"),
                        })
                })
                .collect::<Result<BTreeMap<_, _>>>()
        })
        .transpose()?;
    Graph::new(doc.n, edges, weights.as_ref())
}

pub fn parse_graph_json(text: &str) -> Result<Graph> {
    let doc: GraphDoc = serde_json::from_str(text).map_err(json_error)?;
    graph_from_doc(doc)
}

fn graph_value(g: &Graph) -> Value {
    let edges: Vec<Value> = g.edges().iter().map(|&(a, b)| json!([a, b])).collect();
    let mut obj = Map::new();
    obj.insert("n".into(), json!(g.n()));
    obj.insert("edges".into(), Value::Array(edges));
    if let Some(w) = g.weights() {
        let weights: Map<String, Value> = w
            .iter()
            .enumerate()
            .map(|(v, &wv)| (v.to_string(), json!(wv)))
            .collect();
        obj.insert("weights".into(), Value::Object(weights));
    }
    Value::Object(obj)
}

pub fn graph_to_json(g: &Graph) -> Result<String> {
    to_json_string(&graph_value(g))
}

/// DIMACS edge format: `c` comments, one `p edge n m` header, `e i j`
/// lines with 1-indexed vertices, and optional `n v w` weight lines.
pub fn parse_graph_dimacs(text: &str) -> Result<Graph> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut weights = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |message: String| Error::Parse { line, message };
        let fields: Vec<&str> = raw.split_whitespace().collect();
        let Some(&tag) = fields.first() else { continue };
        let num = |k: usize| -> Result<usize> {
            let s = fields
                .get(k)
                .ok_or_else(|| err(format!("expected at least {} fields", k + 1)))?;
            s.parse().map_err(|_| err(format!("{s:?} is not a non-negative integer")))
        };
        let vertex = |k: usize, n: usize| -> Result<usize> {
            let v = num(k)?;
            if v == 0 || v > n {
                return Err(err(format!("vertex {v} outside 1..={n}")));
            }
            Ok(v - 1)
        };
        match tag {
            "c" => {}
            "p" => {
                if header.is_some() {
                    return Err(err("second problem line".into()));
                }
                if !matches!(fields.get(1), Some(&("edge" | "col"))) {
                    return Err(err("problem line must be `p edge <n> <m>`".into()));
                }
                header = Some((num(2)?, num(3)?));
            }
            "e" | "n" => {
                let (n, _) = header.ok_or_else(|| err(format!("`{tag}` line before `p edge`")))?;
                if tag == "e" {
                    edges.push((vertex(1, n)?, vertex(2, n)?));
                } else {
                    let v = vertex(1, n)?;
                    let w = num(2)?;
                    let w = u32::try_from(w).map_err(|_| err(format!("weight {w} too large")))?;
                    weights.insert(v, w);
                }
            }
            other => return Err(err(format!("unknown line type {other:?}"))),
        }
    }
    let (n, m) = header.ok_or(Error::Parse {
        line: 0,
        message: "missing `p edge <n> <m>` line".into(),
    })?;
    if m != edges.len() {
        log::warn!("header declares {m} edges, found {}", edges.len());
    }
    warn_duplicates(&edges);
    Graph::new(n, edges, (!weights.is_empty()).then_some(&weights))
}

pub fn graph_to_dimacs(g: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", g.n(), g.edge_count());
    for &(a, b) in g.edges() {
        out.push_str(&format!("e {} {}\n", a + 1, b + 1));
    }
    if let Some(w) = g.weights() {
        for (v, wv) in w.iter().enumerate() {
            out.push_str(&format!("n {} {wv}\n", v + 1));
        }
    }
    out
}

pub fn parse_graph(text: &str, format: GraphFormat) -> Result<Graph> {
    match format {
        GraphFormat::Json => parse_graph_json(text),
        GraphFormat::Dimacs => parse_graph_dimacs(text),
    }
}

pub fn emit_graph(g: &Graph, format: GraphFormat) -> Result<String> {
    match format {
        GraphFormat::Json => graph_to_json(g),
        GraphFormat::Dimacs => Ok(graph_to_dimacs(g)),
    }
}

/// Reads a graph file, detecting the format when `format` is `None`.
pub fn read_graph(path: &Path, format: Option<GraphFormat>) -> Result<Graph> {
    let text = std::fs::read_to_string(path)?;
    let format = format.unwrap_or_else(|| GraphFormat::detect(Some(path), &text));
    parse_graph(&text, format)
}

pub fn event_graph_value(eg: &EventGraph) -> Value {
    let labels: Vec<LabelRecord> = eg.labels().iter().map(LabelRecord::from).collect();
    json!({
        "source": graph_value(eg.source()),
        "n": eg.graph().n(),
        "labels": labels,
        "edges": eg.graph().edges().iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
    })
}

pub fn event_graph_to_json(eg: &EventGraph) -> Result<String> {
    to_json_string(&event_graph_value(eg))
}

#[derive(Deserialize)]
struct EventGraphDoc {
    source: GraphDoc,
    labels: Vec<LabelRecord>,
    #[serde(default)]
    edges: Option<Vec<[usize; 2]>>,
    #[serde(default)]
    n: Option<usize>,
}

/// Parses an event graph; edges, if present, must match the exclusivity
/// rule applied to the labels.
pub fn parse_event_graph_json(text: &str) -> Result<EventGraph> {
    let doc: EventGraphDoc = serde_json::from_str(text).map_err(json_error)?;
    let source = graph_from_doc(doc.source)?;
    let labels = doc
        .labels
        .iter()
        .map(EventLabel::try_from)
        .collect::<Result<Vec<_>>>()?;
    let eg = EventGraph::from_labels(source, labels)?;
    if let Some(n) = doc.n {
        if n != eg.graph().n() {
            return Err(Error::InvalidArgument(format!(
                "n = {n} but there are {} labels",
                eg.graph().n()
            )));
        }
    }
    if let Some(edges) = doc.edges {
        let given = Graph::unweighted(eg.graph().n(), edges.iter().map(|&[a, b]| (a, b)))?;
        if given.edges() != eg.graph().edges() {
            return Err(Error::InvalidArgument(
                "edge list differs from the exclusivity edges of the labels".into(),
            ));
        }
    }
    Ok(eg)
}

fn complex_pairs(v: &CVector) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Serialize, Deserialize)]
struct OrthoRepDoc {
    d: usize,
    psi: Vec<[f64; 2]>,
    vectors: Vec<Vec<[f64; 2]>>,
}

pub fn ortho_rep_value(rep: &OrthoRep) -> Value {
    let doc = OrthoRepDoc {
        d: rep.dimension(),
        psi: complex_pairs(rep.psi()),
        vectors: rep.vectors().iter().map(complex_pairs).collect(),
    };
    serde_json::to_value(doc).expect("plain data")
}

pub fn ortho_rep_to_json(rep: &OrthoRep) -> Result<String> {
    to_json_string(&ortho_rep_value(rep))
}

pub fn parse_ortho_rep_json(text: &str) -> Result<OrthoRep> {
    let doc: OrthoRepDoc = serde_json::from_str(text).map_err(json_error)?;
    let to_vec = |v: &[[f64; 2]]| CVector::from_iterator(v.len(), v.iter().map(|&[re, im]| Complex64::new(re, im)));
    let psi = to_vec(&doc.psi);
    if psi.len() != doc.d {
        return Err(Error::Dimension {
            expected: doc.d,
            actual: psi.len(),
        });
    }
    OrthoRep::new(psi, doc.vectors.iter().map(|v| to_vec(v)).collect())
}

/// Row-major nested arrays.
pub fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

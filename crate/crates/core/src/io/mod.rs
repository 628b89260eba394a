//! Instance files: `planar_code` for bare embedded graphs and a canonical
//! JSON document that can also carry requests, cog roles and metadata.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::cogs::Cog;
use crate::plane_graph::{EmbeddingError, OuterFace, PlaneGraph, Vertex};
use crate::requests::{RequestGraph, Weight};

pub mod families;
pub mod planar_code;

pub use families::{generate, Family, GenParams};
pub use planar_code::{emit_planar_code, parse_planar_code};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IoError {
    #[error("missing >>planar_code<< header")]
    BadHeader,
    #[error("input ends inside a graph")]
    Truncated,
    #[error("vertex id {0} out of range")]
    IdOutOfRange(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("schema violation: {0}")]
    SchemaViolation(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

/// Roles of a cog on an instance's graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CogRoles {
    pub p: Vec<Vertex>,
    pub s: BTreeSet<Vertex>,
    pub t: BTreeSet<Vertex>,
    pub w: BTreeMap<Vertex, Weight>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub graph: PlaneGraph,
    pub requests_eq: BTreeSet<Vertex>,
    pub requests_neq: BTreeSet<Vertex>,
    pub weights: BTreeMap<Vertex, Weight>,
    pub cog: Option<CogRoles>,
    pub metadata: BTreeMap<String, Value>,
}

impl Instance {
    pub fn from_graph(graph: PlaneGraph) -> Self {
        Instance {
            graph,
            requests_eq: BTreeSet::new(),
            requests_neq: BTreeSet::new(),
            weights: BTreeMap::new(),
            cog: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn from_request_graph(rg: &RequestGraph) -> Self {
        Instance {
            requests_eq: rg.r_eq().clone(),
            requests_neq: rg.r_neq().clone(),
            weights: rg.weights().clone(),
            ..Instance::from_graph(rg.graph().clone())
        }
    }

    pub fn from_cog(c: &Cog) -> Self {
        let roles = CogRoles { p: c.p.clone(), s: c.s.clone(), t: c.t.clone(), w: c.w.clone() };
        Instance { cog: Some(roles), ..Instance::from_graph(c.graph.clone()) }
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn has_requests(&self) -> bool {
        !self.requests_eq.is_empty() || !self.requests_neq.is_empty()
    }

    pub fn request_graph(&self) -> Result<RequestGraph, IoError> {
        RequestGraph::new(self.graph.clone(), self.requests_eq.clone(), self.requests_neq.clone(), self.weights.clone())
            .map_err(|e| IoError::SchemaViolation(e.to_string()))
    }

    /// The cog, if roles are present.
    pub fn cog(&self) -> Result<Option<Cog>, IoError> {
        self.cog
            .as_ref()
            .map(|r| {
                Cog::new(self.graph.clone(), r.p.clone(), r.s.clone(), r.t.clone(), r.w.clone())
                    .map_err(|e| IoError::SchemaViolation(e.to_string()))
            })
            .transpose()
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightDoc {
    vertex: Vertex,
    num: i64,
    den: i64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CogDoc {
    #[serde(rename = "P")]
    p: Vec<Vertex>,
    #[serde(rename = "S")]
    s: Vec<Vertex>,
    #[serde(rename = "T")]
    t: Vec<Vertex>,
    #[serde(default)]
    weights: Vec<WeightDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    format_version: u32,
    vertices: usize,
    rotations: Vec<Vec<Vertex>>,
    /// A dart `[u, v]` of the outer face.
    outer_face: Option<[Vertex; 2]>,
    #[serde(default)]
    requests_eq: Vec<Vertex>,
    #[serde(default)]
    requests_neq: Vec<Vertex>,
    #[serde(default)]
    weights: Vec<WeightDoc>,
    #[serde(default)]
    cog: Option<CogDoc>,
    #[serde(default)]
    metadata: BTreeMap<String, Value>,
}

fn weights_doc(w: &BTreeMap<Vertex, Weight>) -> Vec<WeightDoc> {
    w.iter().map(|(&vertex, x)| WeightDoc { vertex, num: *x.numer(), den: *x.denom() }).collect()
}

fn weights_of(docs: &[WeightDoc]) -> Result<BTreeMap<Vertex, Weight>, IoError> {
    let mut out = BTreeMap::new();
    for d in docs {
        if d.den <= 0 || d.num <= 0 {
            return Err(IoError::SchemaViolation(format!("weight of {} must be a positive fraction", d.vertex)));
        }
        if out.insert(d.vertex, Rational64::new(d.num, d.den)).is_some() {
            return Err(IoError::SchemaViolation(format!("vertex {} weighted twice", d.vertex)));
        }
    }
    Ok(out)
}

fn to_doc(inst: &Instance) -> Doc {
    let g = &inst.graph;
    let outer = g.outer_face();
    Doc {
        format_version: FORMAT_VERSION,
        vertices: g.vertex_count(),
        rotations: g.rotations().to_vec(),
        outer_face: outer.darts().next().map(|(u, v)| [u, v]),
        requests_eq: inst.requests_eq.iter().copied().collect(),
        requests_neq: inst.requests_neq.iter().copied().collect(),
        weights: weights_doc(&inst.weights),
        cog: inst.cog.as_ref().map(|c| CogDoc {
            p: c.p.clone(),
            s: c.s.iter().copied().collect(),
            t: c.t.iter().copied().collect(),
            weights: weights_doc(&c.w),
        }),
        metadata: inst.metadata.clone(),
    }
}

fn from_doc(doc: Doc) -> Result<Instance, IoError> {
    let bad = |m: String| Err(IoError::SchemaViolation(m));
    if doc.format_version != FORMAT_VERSION {
        return bad(format!("format_version {} is not {FORMAT_VERSION}", doc.format_version));
    }
    if doc.rotations.len() != doc.vertices {
        return bad(format!("{} rotations for {} vertices", doc.rotations.len(), doc.vertices));
    }
    let outer = match doc.outer_face {
        Some([u, v]) => OuterFace::Dart(u, v),
        None => OuterFace::Default,
    };
    let graph = PlaneGraph::new(doc.rotations, outer).map_err(|e| IoError::SchemaViolation(e.to_string()))?;
    let inst = Instance {
        graph,
        requests_eq: doc.requests_eq.into_iter().collect(),
        requests_neq: doc.requests_neq.into_iter().collect(),
        weights: weights_of(&doc.weights)?,
        cog: doc
            .cog
            .map(|c| -> Result<CogRoles, IoError> {
                Ok(CogRoles { p: c.p, s: c.s.into_iter().collect(), t: c.t.into_iter().collect(), w: weights_of(&c.weights)? })
            })
            .transpose()?,
        metadata: doc.metadata,
    };
    if inst.has_requests() || !inst.weights.is_empty() {
        inst.request_graph()?;
    }
    inst.cog()?;
    Ok(inst)
}

/// Canonical text: fixed key order, sorted sets, reduced fractions, two-space
/// indentation and a final newline.
pub fn emit_json(inst: &Instance) -> String {
    let mut s = serde_json::to_string_pretty(&to_doc(inst)).expect("serializable");
    s.push('\n');
    s
}

/// One instance as an object, several as an array.
pub fn emit_json_document(instances: &[Instance]) -> String {
    if instances.len() == 1 {
        return emit_json(&instances[0]);
    }
    let docs: Vec<Doc> = instances.iter().map(to_doc).collect();
    let mut s = serde_json::to_string_pretty(&docs).expect("serializable");
    s.push('\n');
    s
}

pub fn parse_json(text: &str) -> Result<Instance, IoError> {
    let doc: Doc = serde_json::from_str(text).map_err(|e| IoError::SchemaViolation(e.to_string()))?;
    from_doc(doc)
}

/// Accepts a single instance or an array of them.
pub fn parse_json_document(text: &str) -> Result<Vec<Instance>, IoError> {
    let value: Value = serde_json::from_str(text).map_err(|e| IoError::SchemaViolation(e.to_string()))?;
    let docs: Vec<Doc> = if value.is_array() {
        serde_json::from_value(value)
    } else {
        serde_json::from_value(value).map(|d| vec![d])
    }
    .map_err(|e| IoError::SchemaViolation(e.to_string()))?;
    docs.into_iter().map(from_doc).collect()
}

/// Reads `planar_code` when the input starts with its header, JSON otherwise.
pub fn parse_instances(bytes: &[u8]) -> Result<Vec<Instance>, IoError> {
    if bytes.starts_with(b">>planar_code") {
        return Ok(parse_planar_code(bytes)?.into_iter().map(Instance::from_graph).collect());
    }
    let text = std::str::from_utf8(bytes).map_err(|e| IoError::SchemaViolation(e.to_string()))?;
    parse_json_document(text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::families as fam;

    #[test]
    fn minimal_instance_is_stable() {
        let g = fam::path(2);
        let text = emit_json(&Instance::from_graph(g));
        let expected = r#"{
  "format_version": 1,
  "vertices": 2,
  "rotations": [
    [
      1
    ],
    [
      0
    ]
  ],
  "outer_face": [
    0,
    1
  ],
  "requests_eq": [],
  "requests_neq": [],
  "weights": [],
  "cog": null,
  "metadata": {}
}
"#;
        assert_eq!(text, expected);
        assert_eq!(emit_json(&parse_json(&text).unwrap()), text);
    }

    #[test]
    fn exact_weights_survive() {
        let g = fam::path(3);
        let rg = RequestGraph::new(g, BTreeSet::from([1]), BTreeSet::new(), BTreeMap::from([(1, Rational64::new(3, 2))])).unwrap();
        let text = emit_json(&Instance::from_request_graph(&rg));
        assert!(text.contains("\"num\": 3") && text.contains("\"den\": 2"));
        let back = parse_json(&text).unwrap();
        assert_eq!(back.request_graph().unwrap(), rg);
        assert_eq!(emit_json(&back), text);
    }

    #[test]
    fn schema_violations() {
        let text = emit_json(&Instance::from_graph(fam::cycle(4)));
        let extra = text.replacen("\"vertices\"", "\"colour\": 1,\n  \"vertices\"", 1);
        assert!(matches!(parse_json(&extra), Err(IoError::SchemaViolation(_))));
        let version = text.replacen("\"format_version\": 1", "\"format_version\": 2", 1);
        assert!(matches!(parse_json(&version), Err(IoError::SchemaViolation(_))));
        let badreq = text.replacen("\"requests_eq\": []", "\"requests_eq\": [0, 1]", 1);
        assert!(matches!(parse_json(&badreq), Err(IoError::SchemaViolation(_))));
        assert!(matches!(parse_json("[1, 2]"), Err(IoError::SchemaViolation(_))));
    }

    #[test]
    fn documents_and_sniffing() {
        let a = Instance::from_graph(fam::cycle(5)).with_meta("family", "cycle");
        let b = Instance::from_graph(fam::cube());
        let text = emit_json_document(&[a.clone(), b.clone()]);
        let back = parse_instances(text.as_bytes()).unwrap();
        assert_eq!(back, vec![a.clone(), b]);
        assert_eq!(parse_instances(emit_json(&a).as_bytes()).unwrap(), vec![a]);
        let pc = emit_planar_code(&[fam::cycle(5)]).unwrap();
        assert_eq!(parse_instances(&pc).unwrap()[0].graph.vertex_count(), 5);
    }
}

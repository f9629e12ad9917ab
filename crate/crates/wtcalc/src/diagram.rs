//! Open diagrams: generator nodes joined by undirected wires, with ordered
//! input and output boundaries. Includes validation, JSON I/O and the two
//! composition operations.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Generator kinds. Parameters are radians (spiders), the box entry (HBox)
/// or the exponent of ν (NuBox).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeKind {
    ZSpider(f64),
    XSpider(f64),
    Hadamard,
    NuBox(f64),
    WhiteDot,
    HBox(C64),
    GrayDot,
    NotDot,
}

impl NodeKind {
    /// H-box with the default parameter −1.
    pub const H_DEFAULT: NodeKind = NodeKind::HBox(C64::new(-1.0, 0.0));

    /// Tag used in the file format.
    pub fn tag(&self) -> &'static str {
        match self {
            NodeKind::ZSpider(_) => "Z",
            NodeKind::XSpider(_) => "X",
            NodeKind::Hadamard => "H",
            NodeKind::NuBox(_) => "NU",
            NodeKind::WhiteDot => "W",
            NodeKind::HBox(_) => "HBOX",
            NodeKind::GrayDot => "GRAY",
            NodeKind::NotDot => "NOT",
        }
    }

    /// Degree forced by the kind, if any.
    pub fn required_degree(&self) -> Option<usize> {
        match self {
            NodeKind::Hadamard | NodeKind::NotDot => Some(2),
            NodeKind::NuBox(_) => Some(0),
            _ => None,
        }
    }

    /// Same kind and same parameter; phases are compared modulo 2π.
    pub fn matches(&self, other: &NodeKind, tol: f64) -> bool {
        match (self, other) {
            (NodeKind::ZSpider(a), NodeKind::ZSpider(b))
            | (NodeKind::XSpider(a), NodeKind::XSpider(b)) => phase_eq(*a, *b, tol),
            (NodeKind::NuBox(a), NodeKind::NuBox(b)) => (a - b).abs() <= tol,
            (NodeKind::HBox(a), NodeKind::HBox(b)) => (a - b).norm() <= tol,
            _ => std::mem::discriminant(self) == std::mem::discriminant(other),
        }
    }

    fn params_finite(&self) -> bool {
        match self {
            NodeKind::ZSpider(p) | NodeKind::XSpider(p) | NodeKind::NuBox(p) => p.is_finite(),
            NodeKind::HBox(a) => a.re.is_finite() && a.im.is_finite(),
            _ => true,
        }
    }
}

/// Reduce a phase to [0, 2π).
pub fn canonical_phase(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Equality of phases modulo 2π.
pub fn phase_eq(a: f64, b: f64, tol: f64) -> bool {
    let d = canonical_phase(a - b);
    d <= tol || TAU - d <= tol
}

/// Compare identifiers so that digit runs are ordered numerically
/// ("n2" < "n10"). Ties fall back to plain string order.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (ab, bb) = (a.as_bytes(), b.as_bytes());
    let (mut i, mut j) = (0, 0);
    while i < ab.len() && j < bb.len() {
        if ab[i].is_ascii_digit() && bb[j].is_ascii_digit() {
            let si = i;
            while i < ab.len() && ab[i].is_ascii_digit() {
                i += 1;
            }
            let sj = j;
            while j < bb.len() && bb[j].is_ascii_digit() {
                j += 1;
            }
            let da = a[si..i].trim_start_matches('0');
            let db = b[sj..j].trim_start_matches('0');
            let ord = da.len().cmp(&db.len()).then_with(|| da.cmp(db));
            if ord != Ordering::Equal {
                return ord;
            }
        } else {
            let ord = ab[i].cmp(&bb[j]);
            if ord != Ordering::Equal {
                return ord;
            }
            i += 1;
            j += 1;
        }
    }
    (ab.len() - i).cmp(&(bb.len() - j)).then_with(|| a.cmp(b))
}

/// One end of a wire.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Endpoint {
    Node(String),
    Boundary(String),
}

impl Endpoint {
    pub fn id(&self) -> &str {
        match self {
            Endpoint::Node(s) | Endpoint::Boundary(s) => s,
        }
    }

    pub fn is_boundary(&self) -> bool {
        matches!(self, Endpoint::Boundary(_))
    }
}

impl Ord for Endpoint {
    fn cmp(&self, other: &Self) -> Ordering {
        let rank = |e: &Endpoint| match e {
            Endpoint::Boundary(_) => 0,
            Endpoint::Node(_) => 1,
        };
        rank(self)
            .cmp(&rank(other))
            .then_with(|| natural_cmp(self.id(), other.id()))
    }
}

impl PartialOrd for Endpoint {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// A single broken invariant, naming the offending node, boundary or edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub subject: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

#[derive(Debug, Error)]
pub enum DiagramError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("node {id}: unknown kind \"{kind}\"")]
    UnknownKind { id: String, kind: String },
    #[error("node {id}: field \"{field}\" is not allowed for kind {kind}")]
    UnexpectedField {
        id: String,
        kind: String,
        field: &'static str,
    },
    #[error("edge {index}: unknown endpoint \"{id}\"")]
    UnknownEndpoint { index: usize, id: String },
    #[error("invalid diagram: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("arity mismatch: {left} outputs cannot be glued to {right} inputs")]
    ArityMismatch { left: usize, right: usize },
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// An open diagram. `loops` counts free closed wires, each worth the trace
/// of the identity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Diagram {
    nodes: BTreeMap<String, NodeKind>,
    edges: Vec<(Endpoint, Endpoint)>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    loops: usize,
}

impl Diagram {
    /// Assemble a diagram from raw parts without validating it.
    pub fn from_parts(
        nodes: BTreeMap<String, NodeKind>,
        edges: Vec<(Endpoint, Endpoint)>,
        inputs: Vec<String>,
        outputs: Vec<String>,
        loops: usize,
    ) -> Self {
        Diagram {
            nodes,
            edges,
            inputs,
            outputs,
            loops,
        }
    }

    /// Assemble and validate.
    pub fn new(
        nodes: BTreeMap<String, NodeKind>,
        edges: Vec<(Endpoint, Endpoint)>,
        inputs: Vec<String>,
        outputs: Vec<String>,
    ) -> Result<Self, DiagramError> {
        let d = Diagram::from_parts(nodes, edges, inputs, outputs, 0);
        d.check()?;
        Ok(d)
    }

    pub fn empty() -> Self {
        Diagram::default()
    }

    /// The identity on one qubit.
    pub fn wire() -> Self {
        Diagram::from_parts(
            BTreeMap::new(),
            vec![(bnd("b0"), bnd("b1"))],
            vec!["b0".into()],
            vec!["b1".into()],
            0,
        )
    }

    pub fn nodes(&self) -> &BTreeMap<String, NodeKind> {
        &self.nodes
    }

    pub fn node(&self, id: &str) -> Option<&NodeKind> {
        self.nodes.get(id)
    }

    pub fn edges(&self) -> &[(Endpoint, Endpoint)] {
        &self.edges
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn loops(&self) -> usize {
        self.loops
    }

    /// Number of open legs, outputs plus inputs.
    pub fn boundary_count(&self) -> usize {
        self.inputs.len() + self.outputs.len()
    }

    /// Node ids in natural order.
    pub fn node_ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.nodes.keys().map(|s| s.as_str()).collect();
        ids.sort_by(|a, b| natural_cmp(a, b));
        ids
    }

    /// Degree of every node; a self-loop contributes 2.
    pub fn degrees(&self) -> HashMap<&str, usize> {
        let mut deg: HashMap<&str, usize> = self.nodes.keys().map(|k| (k.as_str(), 0)).collect();
        for (a, b) in &self.edges {
            for e in [a, b] {
                if let Endpoint::Node(id) = e {
                    if let Some(d) = deg.get_mut(id.as_str()) {
                        *d += 1;
                    }
                }
            }
        }
        deg
    }

    pub fn degree(&self, id: &str) -> usize {
        self.edges
            .iter()
            .map(|(a, b)| {
                [a, b]
                    .iter()
                    .filter(|e| matches!(e, Endpoint::Node(n) if n == id))
                    .count()
            })
            .sum()
    }

    /// Every broken invariant; empty when the diagram is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for b in self.inputs.iter().chain(&self.outputs) {
            if !seen.insert(b.as_str()) {
                out.push(viol(b, "boundary listed more than once"));
            }
            if self.nodes.contains_key(b) {
                out.push(viol(b, "boundary id is also a node id"));
            }
        }
        let mut uses: HashMap<&str, usize> = seen.iter().map(|b| (*b, 0)).collect();
        for (i, (a, b)) in self.edges.iter().enumerate() {
            for e in [a, b] {
                match e {
                    Endpoint::Node(id) => {
                        if !self.nodes.contains_key(id) {
                            out.push(viol(&format!("edge {i}"), &format!("unknown node {id}")));
                        }
                    }
                    Endpoint::Boundary(id) => match uses.get_mut(id.as_str()) {
                        Some(c) => *c += 1,
                        None => out.push(viol(
                            &format!("edge {i}"),
                            &format!("undeclared boundary {id}"),
                        )),
                    },
                }
            }
        }
        let mut used: Vec<_> = uses.into_iter().collect();
        used.sort_by(|x, y| natural_cmp(x.0, y.0));
        for (b, c) in used {
            if c != 1 {
                out.push(viol(b, &format!("boundary used by {c} edge ends, expected 1")));
            }
        }
        let deg = self.degrees();
        for id in self.node_ids() {
            let kind = &self.nodes[id];
            if !kind.params_finite() {
                out.push(viol(id, "non-finite parameter"));
            }
            let d = deg[id];
            match kind {
                NodeKind::Hadamard if d != 2 => out.push(viol(id, "Hadamard degree ≠ 2")),
                NodeKind::NotDot if d != 2 => out.push(viol(id, "NotDot degree ≠ 2")),
                NodeKind::NuBox(_) if d != 0 => out.push(viol(id, "NuBox degree ≠ 0")),
                _ => {}
            }
        }
        out
    }

    pub fn check(&self) -> Result<(), DiagramError> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(DiagramError::Invalid(v))
        }
    }

    /// Parse the JSON file format and validate.
    pub fn parse(text: &str) -> Result<Self, DiagramError> {
        let doc: DiagramDoc = serde_json::from_str(text).map_err(|e| DiagramError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        let boundaries: BTreeSet<&str> = doc
            .inputs
            .iter()
            .chain(&doc.outputs)
            .map(|s| s.as_str())
            .collect();
        let mut nodes = BTreeMap::new();
        for n in &doc.nodes {
            nodes.insert(n.id.clone(), n.to_kind()?);
        }
        let mut edges = Vec::with_capacity(doc.edges.len());
        for (i, [a, b]) in doc.edges.iter().enumerate() {
            let resolve = |s: &String| {
                if boundaries.contains(s.as_str()) {
                    Ok(Endpoint::Boundary(s.clone()))
                } else if nodes.contains_key(s) {
                    Ok(Endpoint::Node(s.clone()))
                } else {
                    Err(DiagramError::UnknownEndpoint {
                        index: i,
                        id: s.clone(),
                    })
                }
            };
            edges.push((resolve(a)?, resolve(b)?));
        }
        let mut d = Diagram::from_parts(nodes, edges, doc.inputs, doc.outputs, doc.loops);
        if doc.nodes.len() != d.nodes.len() {
            let mut ids = BTreeSet::new();
            let dup = doc
                .nodes
                .iter()
                .find(|n| !ids.insert(n.id.as_str()))
                .map(|n| n.id.clone())
                .unwrap_or_default();
            return Err(DiagramError::Invalid(vec![viol(&dup, "duplicate node id")]));
        }
        d.check()?;
        d.edges.shrink_to_fit();
        Ok(d)
    }

    /// Serialize to the JSON file format. Nodes are written in natural id
    /// order and edges in stored order.
    pub fn to_json(&self) -> String {
        let doc = DiagramDoc {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            nodes: self
                .node_ids()
                .into_iter()
                .map(|id| NodeDoc::from_kind(id, &self.nodes[id]))
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|(a, b)| [a.id().to_string(), b.id().to_string()])
                .collect(),
            loops: self.loops,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("diagram serializes");
        s.push('\n');
        s
    }

    /// Relabel nodes n0.. in natural order and boundaries b0.. (inputs then
    /// outputs), with edges sorted. Two diagrams that differ only by id
    /// choice and edge order have equal canonical forms.
    pub fn canonical(&self) -> Diagram {
        let mut w = Weaver::default();
        let nmap = w.add_nodes(self);
        let inputs = w.fresh_boundaries(self.inputs.len());
        let outputs = w.fresh_boundaries(self.outputs.len());
        let bmap: HashMap<&str, Piece> = self
            .inputs
            .iter()
            .zip(&inputs)
            .chain(self.outputs.iter().zip(&outputs))
            .map(|(old, new)| (old.as_str(), Piece::End(Endpoint::Boundary(new.clone()))))
            .collect();
        for (a, b) in &self.edges {
            let m = |e: &Endpoint| match e {
                Endpoint::Node(id) => Piece::End(Endpoint::Node(nmap[id.as_str()].clone())),
                Endpoint::Boundary(id) => bmap[id.as_str()].clone(),
            };
            w.pieces.push((m(a), m(b)));
        }
        w.finish(inputs, outputs, self.loops)
    }

    /// Glue the outputs of `self` to the inputs of `next`, in order.
    pub fn sequential(&self, next: &Diagram) -> Result<Diagram, DiagramError> {
        if self.outputs.len() != next.inputs.len() {
            return Err(DiagramError::ArityMismatch {
                left: self.outputs.len(),
                right: next.inputs.len(),
            });
        }
        let mut w = Weaver::default();
        let m1 = w.add_nodes(self);
        let m2 = w.add_nodes(next);
        let inputs = w.fresh_boundaries(self.inputs.len());
        let outputs = w.fresh_boundaries(next.outputs.len());
        let mut b1: HashMap<&str, Piece> = HashMap::new();
        for (old, new) in self.inputs.iter().zip(&inputs) {
            b1.insert(old, Piece::End(Endpoint::Boundary(new.clone())));
        }
        for (i, old) in self.outputs.iter().enumerate() {
            b1.insert(old, Piece::Joint(i));
        }
        let mut b2: HashMap<&str, Piece> = HashMap::new();
        for (i, old) in next.inputs.iter().enumerate() {
            b2.insert(old, Piece::Joint(i));
        }
        for (old, new) in next.outputs.iter().zip(&outputs) {
            b2.insert(old, Piece::End(Endpoint::Boundary(new.clone())));
        }
        w.add_edges(self, &m1, &b1);
        w.add_edges(next, &m2, &b2);
        Ok(w.finish(inputs, outputs, self.loops + next.loops))
    }

    /// Place `other` beside `self`; boundary lists are concatenated with
    /// `self` first.
    pub fn parallel(&self, other: &Diagram) -> Diagram {
        let mut w = Weaver::default();
        let m1 = w.add_nodes(self);
        let m2 = w.add_nodes(other);
        let inputs = w.fresh_boundaries(self.inputs.len() + other.inputs.len());
        let outputs = w.fresh_boundaries(self.outputs.len() + other.outputs.len());
        let (i1, i2) = inputs.split_at(self.inputs.len());
        let (o1, o2) = outputs.split_at(self.outputs.len());
        let bmap = |d: &'_ Diagram, ins: &[String], outs: &[String]| -> HashMap<String, Piece> {
            d.inputs
                .iter()
                .zip(ins)
                .chain(d.outputs.iter().zip(outs))
                .map(|(old, new)| (old.clone(), Piece::End(Endpoint::Boundary(new.clone()))))
                .collect()
        };
        let b1 = bmap(self, i1, o1);
        let b2 = bmap(other, i2, o2);
        let b1: HashMap<&str, Piece> = b1.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
        let b2: HashMap<&str, Piece> = b2.iter().map(|(k, v)| (k.as_str(), v.clone())).collect();
        w.add_edges(self, &m1, &b1);
        w.add_edges(other, &m2, &b2);
        w.finish(inputs.clone(), outputs.clone(), self.loops + other.loops)
    }

    /// Swap inputs and outputs.
    pub fn transpose(&self) -> Diagram {
        let mut d = self.clone();
        std::mem::swap(&mut d.inputs, &mut d.outputs);
        d
    }

    /// Add `n` free closed wires.
    pub fn with_loops(mut self, n: usize) -> Diagram {
        self.loops += n;
        self
    }
}

fn viol(subject: &str, message: &str) -> Violation {
    Violation {
        subject: subject.to_string(),
        message: message.to_string(),
    }
}

fn bnd(s: &str) -> Endpoint {
    Endpoint::Boundary(s.to_string())
}

/// A wire end during splicing: either a real endpoint or a joint that must
/// be fused with the one other wire end sharing the same joint index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Piece {
    End(Endpoint),
    Joint(usize),
}

/// Accumulates fresh nodes and wire pieces, then resolves joints into plain
/// edges and closed loops.
#[derive(Default)]
pub(crate) struct Weaver {
    pub(crate) nodes: BTreeMap<String, NodeKind>,
    pub(crate) pieces: Vec<(Piece, Piece)>,
    next_node: usize,
    next_boundary: usize,
}

impl Weaver {
    pub(crate) fn add_nodes(&mut self, d: &Diagram) -> HashMap<String, String> {
        let mut map = HashMap::new();
        for id in d.node_ids() {
            let new = self.fresh_node(d.nodes[id]);
            map.insert(id.to_string(), new);
        }
        map
    }

    pub(crate) fn fresh_node(&mut self, kind: NodeKind) -> String {
        let id = format!("n{}", self.next_node);
        self.next_node += 1;
        self.nodes.insert(id.clone(), kind);
        id
    }

    pub(crate) fn fresh_boundaries(&mut self, n: usize) -> Vec<String> {
        (0..n)
            .map(|_| {
                let id = format!("b{}", self.next_boundary);
                self.next_boundary += 1;
                id
            })
            .collect()
    }

    fn add_edges(&mut self, d: &Diagram, nmap: &HashMap<String, String>, bmap: &HashMap<&str, Piece>) {
        for (a, b) in &d.edges {
            let m = |e: &Endpoint| match e {
                Endpoint::Node(id) => Piece::End(Endpoint::Node(nmap[id].clone())),
                Endpoint::Boundary(id) => bmap[id.as_str()].clone(),
            };
            self.pieces.push((m(a), m(b)));
        }
    }

    pub(crate) fn finish(self, inputs: Vec<String>, outputs: Vec<String>, loops: usize) -> Diagram {
        let (mut edges, extra) = resolve_joints(&self.pieces);
        for e in edges.iter_mut() {
            if e.1 < e.0 {
                std::mem::swap(&mut e.0, &mut e.1);
            }
        }
        edges.sort();
        Diagram::from_parts(self.nodes, edges, inputs, outputs, loops + extra)
    }
}

/// Follow chains of joints between real endpoints. Every joint index must
/// occur exactly twice. Returns the plain edges and the number of closed
/// cycles made only of joints.
pub(crate) fn resolve_joints(pieces: &[(Piece, Piece)]) -> (Vec<(Endpoint, Endpoint)>, usize) {
    let mut at: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for (i, (a, b)) in pieces.iter().enumerate() {
        for (side, p) in [a, b].into_iter().enumerate() {
            if let Piece::Joint(j) = p {
                at.entry(*j).or_default().push((i, side));
            }
        }
    }
    debug_assert!(at.values().all(|v| v.len() == 2), "every joint must pair two ends");
    let end = |i: usize, side: usize| -> &Piece {
        if side == 0 {
            &pieces[i].0
        } else {
            &pieces[i].1
        }
    };
    // The wire end glued to end (i, side), which must be a joint.
    let partner = |i: usize, side: usize| -> (usize, usize) {
        let Piece::Joint(j) = end(i, side) else {
            unreachable!("partner of a real endpoint")
        };
        let pair = &at[j];
        if pair[0] == (i, side) {
            pair[1]
        } else {
            pair[0]
        }
    };
    let mut used = vec![false; pieces.len()];
    let mut edges = Vec::new();
    for start in 0..pieces.len() {
        for s0 in 0..2 {
            if used[start] {
                continue;
            }
            let Piece::End(first) = end(start, s0) else {
                continue;
            };
            let (mut i, mut side) = (start, 1 - s0);
            loop {
                used[i] = true;
                match end(i, side) {
                    Piece::End(last) => {
                        edges.push((first.clone(), last.clone()));
                        break;
                    }
                    Piece::Joint(_) => {
                        let (k, t) = partner(i, side);
                        i = k;
                        side = 1 - t;
                    }
                }
            }
        }
    }
    let mut cycles = 0;
    for start in 0..pieces.len() {
        if used[start] {
            continue;
        }
        cycles += 1;
        let (mut i, mut side) = (start, 1);
        while !used[i] {
            used[i] = true;
            let (k, t) = partner(i, side);
            i = k;
            side = 1 - t;
        }
    }
    (edges, cycles)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramDoc {
    #[serde(default)]
    inputs: Vec<String>,
    #[serde(default)]
    outputs: Vec<String>,
    #[serde(default)]
    nodes: Vec<NodeDoc>,
    #[serde(default)]
    edges: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "is_zero")]
    loops: usize,
}

fn is_zero(n: &usize) -> bool {
    *n == 0
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeDoc {
    id: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    phase: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    param: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exponent: Option<f64>,
}

impl NodeDoc {
    fn to_kind(&self) -> Result<NodeKind, DiagramError> {
        let kind = match self.kind.as_str() {
            "Z" => NodeKind::ZSpider(self.phase.unwrap_or(0.0)),
            "X" => NodeKind::XSpider(self.phase.unwrap_or(0.0)),
            "H" => NodeKind::Hadamard,
            "NU" => NodeKind::NuBox(self.exponent.unwrap_or(1.0)),
            "W" => NodeKind::WhiteDot,
            "HBOX" => {
                let [re, im] = self.param.unwrap_or([-1.0, 0.0]);
                NodeKind::HBox(C64::new(re, im))
            }
            "GRAY" => NodeKind::GrayDot,
            "NOT" => NodeKind::NotDot,
            other => {
                return Err(DiagramError::UnknownKind {
                    id: self.id.clone(),
                    kind: other.to_string(),
                })
            }
        };
        let unexpected = |field| DiagramError::UnexpectedField {
            id: self.id.clone(),
            kind: self.kind.clone(),
            field,
        };
        if self.phase.is_some() && !matches!(kind, NodeKind::ZSpider(_) | NodeKind::XSpider(_)) {
            return Err(unexpected("phase"));
        }
        if self.param.is_some() && !matches!(kind, NodeKind::HBox(_)) {
            return Err(unexpected("param"));
        }
        if self.exponent.is_some() && !matches!(kind, NodeKind::NuBox(_)) {
            return Err(unexpected("exponent"));
        }
        Ok(kind)
    }

    fn from_kind(id: &str, kind: &NodeKind) -> NodeDoc {
        let mut doc = NodeDoc {
            id: id.to_string(),
            kind: kind.tag().to_string(),
            phase: None,
            param: None,
            exponent: None,
        };
        match kind {
            NodeKind::ZSpider(p) | NodeKind::XSpider(p) => doc.phase = Some(*p),
            NodeKind::HBox(a) => doc.param = Some([a.re, a.im]),
            NodeKind::NuBox(e) => doc.exponent = Some(*e),
            _ => {}
        }
        doc
    }
}

/// Incremental construction with generated ids. Boundaries are named in
/// creation order, nodes n0, n1, ...
#[derive(Default)]
pub struct Builder {
    nodes: BTreeMap<String, NodeKind>,
    edges: Vec<(Endpoint, Endpoint)>,
    inputs: Vec<String>,
    outputs: Vec<String>,
    loops: usize,
    next_node: usize,
    next_boundary: usize,
}

impl Builder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn node(&mut self, kind: NodeKind) -> Endpoint {
        let id = format!("n{}", self.next_node);
        self.next_node += 1;
        self.nodes.insert(id.clone(), kind);
        Endpoint::Node(id)
    }

    pub fn z(&mut self, phase: f64) -> Endpoint {
        self.node(NodeKind::ZSpider(phase))
    }

    pub fn x(&mut self, phase: f64) -> Endpoint {
        self.node(NodeKind::XSpider(phase))
    }

    pub fn w(&mut self) -> Endpoint {
        self.node(NodeKind::WhiteDot)
    }

    pub fn hbox(&mut self, a: C64) -> Endpoint {
        self.node(NodeKind::HBox(a))
    }

    fn boundary(&mut self) -> Endpoint {
        let id = format!("b{}", self.next_boundary);
        self.next_boundary += 1;
        Endpoint::Boundary(id)
    }

    /// New input boundary wired to `to`.
    pub fn input_to(&mut self, to: &Endpoint) -> Endpoint {
        let b = self.boundary();
        self.inputs.push(b.id().to_string());
        self.edge(&b, to);
        b
    }

    /// New output boundary wired to `from`.
    pub fn output_from(&mut self, from: &Endpoint) -> Endpoint {
        let b = self.boundary();
        self.outputs.push(b.id().to_string());
        self.edge(from, &b);
        b
    }

    /// A bare wire from a new input to a new output.
    pub fn bare_wire(&mut self) {
        let i = self.boundary();
        let o = self.boundary();
        self.inputs.push(i.id().to_string());
        self.outputs.push(o.id().to_string());
        self.edge(&i, &o);
    }

    pub fn edge(&mut self, a: &Endpoint, b: &Endpoint) {
        self.edges.push((a.clone(), b.clone()));
    }

    /// `count` parallel edges between `a` and `b`.
    pub fn edges(&mut self, a: &Endpoint, b: &Endpoint, count: usize) {
        for _ in 0..count {
            self.edge(a, b);
        }
    }

    pub fn add_loops(&mut self, n: usize) {
        self.loops += n;
    }

    /// Finish and validate.
    pub fn build(self) -> Result<Diagram, DiagramError> {
        let d = Diagram::from_parts(self.nodes, self.edges, self.inputs, self.outputs, self.loops);
        d.check()?;
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn natural_order() {
        let mut v = vec!["n10", "n2", "b1", "n1", "a"];
        v.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(v, ["a", "b1", "n1", "n2", "n10"]);
        assert_eq!(natural_cmp("n01", "n1"), Ordering::Less);
    }

    #[test]
    fn empty_is_valid() {
        assert!(Diagram::empty().validate().is_empty());
    }

    #[test]
    fn hadamard_degree_violation() {
        let mut b = Builder::new();
        let h = b.node(NodeKind::Hadamard);
        for _ in 0..3 {
            b.output_from(&h);
        }
        let err = b.build().unwrap_err();
        assert!(err.to_string().contains("Hadamard degree ≠ 2"), "{err}");
    }

    #[test]
    fn nubox_degree_violation() {
        let mut b = Builder::new();
        let n = b.node(NodeKind::NuBox(1.0));
        b.output_from(&n);
        let DiagramError::Invalid(v) = b.build().unwrap_err() else {
            panic!("expected violations")
        };
        assert_eq!(v, vec![viol("n0", "NuBox degree ≠ 0")]);
    }

    #[test]
    fn boundary_used_twice() {
        let d = Diagram::from_parts(
            BTreeMap::new(),
            vec![(bnd("b0"), bnd("b0"))],
            vec!["b0".into()],
            vec![],
            0,
        );
        assert_eq!(d.validate().len(), 1);
    }

    #[test]
    fn parse_bare_wire() {
        let d = Diagram::parse(r#"{"inputs":["i"],"outputs":["o"],"nodes":[],"edges":[["i","o"]]}"#)
            .unwrap();
        assert_eq!(d.inputs(), ["i"]);
        assert_eq!(d.outputs(), ["o"]);
        assert_eq!(d.edges(), [(bnd("i"), bnd("o"))]);
    }

    #[test]
    fn example_document_parses() {
        let text = r#"{ "inputs": ["b0","b1"], "outputs": ["b2"],
          "nodes": [ {"id":"n0","kind":"Z","phase":0.0},
                     {"id":"n1","kind":"X","phase":3.14159265358979},
                     {"id":"n2","kind":"H"}, {"id":"n3","kind":"HBOX","param":[-1.0,0.0]},
                     {"id":"n4","kind":"W"}, {"id":"n5","kind":"GRAY"},
                     {"id":"n6","kind":"NOT"}, {"id":"n7","kind":"NU","exponent":1.0} ],
          "edges": [ ["n0","n1"], ["n0","b0"], ["b1","b2"], ["n4","n4"] ] }"#;
        // The H and NOT nodes there have degree 0, so validation rejects it.
        let err = Diagram::parse(text).unwrap_err();
        let DiagramError::Invalid(v) = err else { panic!() };
        let subjects: Vec<_> = v.iter().map(|x| x.subject.as_str()).collect();
        assert_eq!(subjects, ["n2", "n6"]);
    }

    #[test]
    fn defaults_apply() {
        let d = Diagram::parse(
            r#"{"nodes":[{"id":"a","kind":"Z"},{"id":"h","kind":"HBOX"},{"id":"v","kind":"NU"}]}"#,
        )
        .unwrap();
        assert_eq!(d.node("a"), Some(&NodeKind::ZSpider(0.0)));
        assert_eq!(d.node("h"), Some(&NodeKind::H_DEFAULT));
        assert_eq!(d.node("v"), Some(&NodeKind::NuBox(1.0)));
    }

    #[test]
    fn unknown_kind_is_named() {
        let err = Diagram::parse(r#"{"nodes":[{"id":"n0","kind":"Q"}]}"#).unwrap_err();
        assert!(err.to_string().contains("\"Q\""), "{err}");
    }

    #[test]
    fn malformed_has_location() {
        let err = Diagram::parse("{\n  \"inputs\": [,]\n}").unwrap_err();
        match err {
            DiagramError::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn unknown_endpoint() {
        let err = Diagram::parse(r#"{"edges":[["x","y"]]}"#).unwrap_err();
        assert!(matches!(err, DiagramError::UnknownEndpoint { index: 0, .. }));
    }

    #[test]
    fn phase_round_trip_is_bit_exact() {
        let mut b = Builder::new();
        let z = b.z(FRAC_PI_2);
        b.input_to(&z);
        b.output_from(&z);
        let d = b.build().unwrap();
        let back = Diagram::parse(&d.to_json()).unwrap();
        assert_eq!(back, d);
        let NodeKind::ZSpider(p) = back.nodes()["n0"] else { panic!() };
        assert_eq!(p.to_bits(), FRAC_PI_2.to_bits());
    }

    #[test]
    fn sequential_wires() {
        let d = Diagram::wire().sequential(&Diagram::wire()).unwrap();
        assert_eq!(d, Diagram::wire());
    }

    #[test]
    fn parallel_wires() {
        let d = Diagram::wire().parallel(&Diagram::wire());
        assert_eq!(d.inputs(), ["b0", "b1"]);
        assert_eq!(d.outputs(), ["b2", "b3"]);
        assert_eq!(d.edges(), [(bnd("b0"), bnd("b2")), (bnd("b1"), bnd("b3"))]);
    }

    #[test]
    fn state_then_effect_is_closed() {
        let mut b = Builder::new();
        let z = b.z(0.0);
        b.output_from(&z);
        let state = b.build().unwrap();
        let mut b = Builder::new();
        let x = b.x(PI);
        b.input_to(&x);
        let effect = b.build().unwrap();
        let d = state.sequential(&effect).unwrap();
        assert_eq!(d.boundary_count(), 0);
        assert_eq!(d.edges(), [(Endpoint::Node("n0".into()), Endpoint::Node("n1".into()))]);
        assert!(d.validate().is_empty());
    }

    #[test]
    fn arity_mismatch() {
        let err = Diagram::wire().sequential(&Diagram::empty()).unwrap_err();
        assert!(matches!(err, DiagramError::ArityMismatch { left: 1, right: 0 }));
    }

    #[test]
    fn cup_then_cap_is_a_loop() {
        let cup = Diagram::from_parts(
            BTreeMap::new(),
            vec![(bnd("a"), bnd("b"))],
            vec![],
            vec!["a".into(), "b".into()],
            0,
        );
        let cap = cup.transpose();
        let d = cup.sequential(&cap).unwrap();
        assert_eq!(d.loops(), 1);
        assert!(d.edges().is_empty());
        let back = Diagram::parse(&d.to_json()).unwrap();
        assert_eq!(back.loops(), 1);
    }

    #[test]
    fn snake_is_a_wire() {
        // (wire ⊗ cup) ; (cap ⊗ wire)
        let cup = Diagram::from_parts(
            BTreeMap::new(),
            vec![(bnd("a"), bnd("b"))],
            vec![],
            vec!["a".into(), "b".into()],
            0,
        );
        let cap = cup.transpose();
        let d = Diagram::wire()
            .parallel(&cup)
            .sequential(&cap.parallel(&Diagram::wire()))
            .unwrap();
        assert_eq!(d, Diagram::wire());
    }
}

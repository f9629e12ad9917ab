//! Matching rule left-hand sides inside larger diagrams, splicing in the
//! right-hand side, and a small validated simplification strategy.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::diagram::{natural_cmp, resolve_joints, Diagram, DiagramError, Endpoint, NodeKind, Piece};
use crate::rules::{self, Bindings, RuleError, RuleInstance, Value, MAX_ARITY};
use crate::semantics::{compare, evaluate, Comparison, Model, SemanticsError, RULE_TOL};

/// Phase tolerance when matching node kinds.
pub const MATCH_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum RewriteError {
    #[error("stale match: {0}")]
    Stale(String),
    #[error("step {step} ({rule}) changed the semantics: {outcome}")]
    Validation {
        step: usize,
        rule: String,
        outcome: String,
    },
    #[error("unknown strategy component \"{0}\" (known: fuse, identity, hopf, hcancel, nu-merge)")]
    UnknownComponent(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// Where a pattern boundary lands in the host.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontierEnd {
    /// Index into the host's edge list.
    pub edge: usize,
    /// Image node the edge leaves.
    pub inner: String,
    /// The edge's other end, outside the image.
    pub outside: Endpoint,
}

/// An embedding of a rule instance's left-hand side into a host.
#[derive(Debug, Clone)]
pub struct Match {
    pub instance: RuleInstance,
    /// Pattern node id → host node id.
    pub nodes: BTreeMap<String, String>,
    /// Pattern boundary id → host wire.
    pub frontier: BTreeMap<String, FrontierEnd>,
}

impl Match {
    /// Host node ids of the image in natural order.
    pub fn image(&self) -> Vec<String> {
        let mut v: Vec<String> = self.nodes.values().cloned().collect();
        v.sort_by(|a, b| natural_cmp(a, b));
        v
    }
}

type PairCounts = HashMap<(String, String), usize>;

fn pair(a: &str, b: &str) -> (String, String) {
    if natural_cmp(a, b) == Ordering::Greater {
        (b.to_string(), a.to_string())
    } else {
        (a.to_string(), b.to_string())
    }
}

fn node_pairs(d: &Diagram) -> PairCounts {
    let mut m = HashMap::new();
    for (a, b) in d.edges() {
        if let (Endpoint::Node(x), Endpoint::Node(y)) = (a, b) {
            *m.entry(pair(x, y)).or_insert(0) += 1;
        }
    }
    m
}

fn count(m: &PairCounts, a: &str, b: &str) -> usize {
    m.get(&pair(a, b)).copied().unwrap_or(0)
}

/// Position of each boundary in outputs ++ inputs.
fn boundary_positions(d: &Diagram) -> HashMap<&str, usize> {
    d.outputs()
        .iter()
        .chain(d.inputs())
        .enumerate()
        .map(|(i, b)| (b.as_str(), i))
        .collect()
}

struct Pattern<'a> {
    lhs: &'a Diagram,
    ids: Vec<&'a str>,
    degrees: HashMap<&'a str, usize>,
    pairs: PairCounts,
    /// Boundary ids attached to each node, by boundary position.
    legs: HashMap<&'a str, Vec<String>>,
}

impl<'a> Pattern<'a> {
    /// None for left-hand sides that cannot be embedded: no nodes, bare
    /// wires or closed loops.
    fn new(lhs: &'a Diagram) -> Option<Self> {
        if lhs.nodes().is_empty() || lhs.loops() > 0 {
            return None;
        }
        let pos = boundary_positions(lhs);
        let mut legs: HashMap<&str, Vec<String>> = HashMap::new();
        for (a, b) in lhs.edges() {
            match (a, b) {
                (Endpoint::Boundary(_), Endpoint::Boundary(_)) => return None,
                (Endpoint::Node(n), Endpoint::Boundary(x)) | (Endpoint::Boundary(x), Endpoint::Node(n)) => {
                    legs.entry(n.as_str()).or_default().push(x.clone());
                }
                _ => {}
            }
        }
        for v in legs.values_mut() {
            v.sort_by_key(|x| pos[x.as_str()]);
        }
        Some(Pattern {
            lhs,
            ids: lhs.node_ids(),
            degrees: lhs.degrees(),
            pairs: node_pairs(lhs),
            legs,
        })
    }
}

struct Host<'a> {
    d: &'a Diagram,
    ids: Vec<&'a str>,
    degrees: HashMap<&'a str, usize>,
    pairs: PairCounts,
}

impl<'a> Host<'a> {
    fn new(d: &'a Diagram) -> Self {
        Host {
            d,
            ids: d.node_ids(),
            degrees: d.degrees(),
            pairs: node_pairs(d),
        }
    }

    /// Edges at `node` whose other end lies outside `image`, ordered by that
    /// end and then by edge index.
    fn external_ends(&self, node: &str, image: &BTreeSet<&str>) -> Vec<(usize, Endpoint)> {
        let mut out = Vec::new();
        for (i, (a, b)) in self.d.edges().iter().enumerate() {
            for (x, y) in [(a, b), (b, a)] {
                if matches!(x, Endpoint::Node(n) if n == node) {
                    let inside = matches!(y, Endpoint::Node(m) if image.contains(m.as_str()));
                    if !inside {
                        out.push((i, y.clone()));
                    }
                }
            }
        }
        out.sort_by(|p, q| p.1.cmp(&q.1).then(p.0.cmp(&q.0)));
        out
    }
}

fn node_fits(pat: &Pattern, host: &Host, p: &str, h: &str, assigned: &[(&str, &str)]) -> bool {
    let (pk, hk) = (&pat.lhs.nodes()[p], &host.d.nodes()[h]);
    pk.matches(hk, MATCH_TOL)
        && pat.degrees[p] == host.degrees[h]
        && count(&pat.pairs, p, p) == count(&host.pairs, h, h)
        && assigned
            .iter()
            .all(|(q, hq)| count(&pat.pairs, p, q) == count(&host.pairs, h, hq))
}

fn frontier_of(pat: &Pattern, host: &Host, assigned: &[(&str, &str)]) -> Option<BTreeMap<String, FrontierEnd>> {
    let image: BTreeSet<&str> = assigned.iter().map(|(_, h)| *h).collect();
    let mut frontier = BTreeMap::new();
    for (p, h) in assigned {
        let ends = host.external_ends(h, &image);
        let legs = pat.legs.get(p).map(|v| v.as_slice()).unwrap_or(&[]);
        if ends.len() != legs.len() {
            return None;
        }
        for (b, (edge, outside)) in legs.iter().zip(ends) {
            frontier.insert(
                b.clone(),
                FrontierEnd {
                    edge,
                    inner: h.to_string(),
                    outside,
                },
            );
        }
    }
    Some(frontier)
}

/// Every embedding of the instance's left-hand side, one per image node
/// set, in search order (pattern nodes and host candidates in natural
/// order).
pub fn find_matches(host: &Diagram, inst: &RuleInstance) -> Vec<Match> {
    let Some(pat) = Pattern::new(&inst.lhs) else {
        return vec![];
    };
    let h = Host::new(host);
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut assigned: Vec<(&str, &str)> = Vec::new();
    search(&pat, &h, inst, &mut assigned, &mut seen, &mut out);
    out
}

fn search<'a>(
    pat: &Pattern<'a>,
    host: &Host<'a>,
    inst: &RuleInstance,
    assigned: &mut Vec<(&'a str, &'a str)>,
    seen: &mut BTreeSet<Vec<String>>,
    out: &mut Vec<Match>,
) {
    if assigned.len() == pat.ids.len() {
        let mut image: Vec<String> = assigned.iter().map(|(_, h)| h.to_string()).collect();
        image.sort();
        if seen.contains(&image) {
            return;
        }
        if let Some(frontier) = frontier_of(pat, host, assigned) {
            seen.insert(image);
            out.push(Match {
                instance: inst.clone(),
                nodes: assigned
                    .iter()
                    .map(|(p, h)| (p.to_string(), h.to_string()))
                    .collect(),
                frontier,
            });
        }
        return;
    }
    let p = pat.ids[assigned.len()];
    for &h in &host.ids {
        if assigned.iter().any(|(_, x)| *x == h) || !node_fits(pat, host, p, h, assigned) {
            continue;
        }
        assigned.push((p, h));
        search(pat, host, inst, assigned, seen, out);
        assigned.pop();
    }
}

/// Re-derive a match's constraints against the current host.
fn verify(host: &Diagram, m: &Match) -> Result<(), RewriteError> {
    let pat = Pattern::new(&m.instance.lhs).ok_or_else(|| RewriteError::Stale("pattern cannot be embedded".into()))?;
    let h = Host::new(host);
    let mut assigned: Vec<(&str, &str)> = Vec::new();
    for p in &pat.ids {
        let hn = m
            .nodes
            .get(*p)
            .ok_or_else(|| RewriteError::Stale(format!("pattern node {p} unbound")))?;
        if host.node(hn).is_none() {
            return Err(RewriteError::Stale(format!("host node {hn} is gone")));
        }
        if !node_fits(&pat, &h, p, hn, &assigned) {
            return Err(RewriteError::Stale(format!("host node {hn} no longer fits {p}")));
        }
        assigned.push((p, hn.as_str()));
    }
    match frontier_of(&pat, &h, &assigned) {
        Some(f) if f == m.frontier => Ok(()),
        _ => Err(RewriteError::Stale("frontier wires changed".into())),
    }
}

fn fresh_start(host: &Diagram) -> usize {
    host.nodes()
        .keys()
        .filter_map(|id| id.strip_prefix('n').and_then(|s| s.parse::<usize>().ok()))
        .map(|n| n + 1)
        .max()
        .unwrap_or(0)
}

/// Excise the image and splice in the right-hand side. Right-hand nodes get
/// fresh ids n<N>, n<N+1>, … above every numbered host id.
pub fn apply(host: &Diagram, m: &Match) -> Result<Diagram, RewriteError> {
    verify(host, m)?;
    let lhs = &m.instance.lhs;
    let rhs = &m.instance.rhs;
    let image: BTreeSet<&str> = m.nodes.values().map(|s| s.as_str()).collect();
    let lpos = boundary_positions(lhs);
    let rpos = boundary_positions(rhs);
    let frontier_edges: HashMap<usize, usize> = m
        .frontier
        .iter()
        .map(|(b, f)| (f.edge, lpos[b.as_str()]))
        .collect();

    let mut nodes: BTreeMap<String, NodeKind> = host
        .nodes()
        .iter()
        .filter(|(id, _)| !image.contains(id.as_str()))
        .map(|(id, k)| (id.clone(), *k))
        .collect();
    let mut pieces: Vec<(Piece, Piece)> = Vec::new();
    for (i, (a, b)) in host.edges().iter().enumerate() {
        if let Some(&j) = frontier_edges.get(&i) {
            pieces.push((Piece::End(m.frontier.values().find(|f| f.edge == i).unwrap().outside.clone()), Piece::Joint(j)));
            continue;
        }
        let touches = [a, b]
            .iter()
            .any(|e| matches!(e, Endpoint::Node(n) if image.contains(n.as_str())));
        if !touches {
            pieces.push((Piece::End(a.clone()), Piece::End(b.clone())));
        }
    }
    let mut rename = HashMap::new();
    for (next, id) in (fresh_start(host)..).zip(rhs.node_ids()) {
        let new = format!("n{next}");
        nodes.insert(new.clone(), rhs.nodes()[id]);
        rename.insert(id.to_string(), new);
    }
    for (a, b) in rhs.edges() {
        let map = |e: &Endpoint| match e {
            Endpoint::Node(n) => Piece::End(Endpoint::Node(rename[n].clone())),
            Endpoint::Boundary(x) => Piece::Joint(rpos[x.as_str()]),
        };
        pieces.push((map(a), map(b)));
    }
    let (mut edges, cycles) = resolve_joints(&pieces);
    for e in edges.iter_mut() {
        if e.1 < e.0 {
            std::mem::swap(&mut e.0, &mut e.1);
        }
    }
    edges.sort();
    let out = Diagram::from_parts(
        nodes,
        edges,
        host.inputs().to_vec(),
        host.outputs().to_vec(),
        host.loops() + rhs.loops() + cycles,
    );
    out.check()?;
    Ok(out)
}

/// Parts of the simplification strategy, in tie-breaking order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Component {
    /// Merge adjacent same-colour spiders joined by one wire.
    Fuse,
    /// Remove phase-free two-legged spiders.
    Identity,
    /// Disconnect a green and a red spider joined by two wires.
    Hopf,
    /// Cancel adjacent Hadamards or H2 boxes.
    HCancel,
    /// Multiply nu boxes and drop trivial ones.
    NuMerge,
}

impl Component {
    pub const ALL: [Component; 5] = [
        Component::Fuse,
        Component::Identity,
        Component::Hopf,
        Component::HCancel,
        Component::NuMerge,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Component::Fuse => "fuse",
            Component::Identity => "identity",
            Component::Hopf => "hopf",
            Component::HCancel => "hcancel",
            Component::NuMerge => "nu-merge",
        }
    }

    pub fn from_name(s: &str) -> Result<Component, RewriteError> {
        Component::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| RewriteError::UnknownComponent(s.to_string()))
    }

    /// Comma-separated component names.
    pub fn parse_list(s: &str) -> Result<Vec<Component>, RewriteError> {
        s.split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(Component::from_name)
            .collect()
    }
}

impl fmt::Display for Component {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn ar(n: usize) -> Value {
    Value::Arity(n)
}

fn inst(name: &str, b: Vec<(&'static str, Value)>) -> Option<RuleInstance> {
    rules::lookup(name).ok()?.instantiate(&Bindings(b)).ok()
}

/// Matches of one component whose image is exactly `want`.
fn matches_on(host: &Diagram, inst: Option<RuleInstance>, want: &[&str]) -> Vec<Match> {
    let Some(inst) = inst else { return vec![] };
    let mut want: Vec<String> = want.iter().map(|s| s.to_string()).collect();
    want.sort_by(|a, b| natural_cmp(a, b));
    find_matches(host, &inst)
        .into_iter()
        .filter(|m| m.image() == want)
        .take(1)
        .collect()
}

fn candidates(host: &Diagram, c: Component) -> Vec<Match> {
    let ids = host.node_ids();
    let deg = host.degrees();
    let pairs = node_pairs(host);
    let kind = |id: &str| host.nodes()[id];
    let mut out = Vec::new();
    let two = |f: &mut dyn FnMut(&str, &str)| {
        for (i, a) in ids.iter().enumerate() {
            for b in &ids[i + 1..] {
                f(a, b);
            }
        }
    };
    match c {
        Component::Fuse => two(&mut |a, b| {
            if count(&pairs, a, b) != 1 || deg[a] - 1 > MAX_ARITY || deg[b] - 1 > MAX_ARITY {
                return;
            }
            let name = match (kind(a), kind(b)) {
                (NodeKind::ZSpider(_), NodeKind::ZSpider(_)) => "Fuse_Z",
                (NodeKind::XSpider(_), NodeKind::XSpider(_)) => "Fuse_X",
                _ => return,
            };
            let (NodeKind::ZSpider(t) | NodeKind::XSpider(t)) = kind(a) else { return };
            let (NodeKind::ZSpider(d) | NodeKind::XSpider(d)) = kind(b) else { return };
            let i = inst(
                name,
                vec![
                    ("k", ar(0)),
                    ("l", ar(0)),
                    ("m", ar(deg[a] - 1)),
                    ("n", ar(deg[b] - 1)),
                    ("theta", Value::Phase(t)),
                    ("delta", Value::Phase(d)),
                ],
            );
            out.extend(matches_on(host, i, &[a, b]));
        }),
        Component::Identity => {
            for a in &ids {
                let name = match kind(a) {
                    NodeKind::ZSpider(t) if crate::diagram::phase_eq(t, 0.0, MATCH_TOL) => "Id_Z",
                    NodeKind::XSpider(t) if crate::diagram::phase_eq(t, 0.0, MATCH_TOL) => "Id_X",
                    _ => continue,
                };
                if deg[a] == 2 {
                    out.extend(matches_on(host, inst(name, vec![]), &[a]));
                }
            }
        }
        Component::Hopf => two(&mut |a, b| {
            if count(&pairs, a, b) != 2 {
                return;
            }
            let (z, x) = match (kind(a), kind(b)) {
                (NodeKind::ZSpider(_), NodeKind::XSpider(_)) => (a, b),
                (NodeKind::XSpider(_), NodeKind::ZSpider(_)) => (b, a),
                _ => return,
            };
            let (NodeKind::ZSpider(t), NodeKind::XSpider(p)) = (kind(z), kind(x)) else { return };
            if deg[z] - 2 > MAX_ARITY || deg[x] - 2 > MAX_ARITY {
                return;
            }
            let i = inst(
                "Hopf",
                vec![
                    ("a", ar(deg[z] - 2)),
                    ("b", ar(deg[x] - 2)),
                    ("theta", Value::Phase(t)),
                    ("phi", Value::Phase(p)),
                ],
            );
            out.extend(matches_on(host, i, &[a, b]));
        }),
        Component::HCancel => two(&mut |a, b| {
            if count(&pairs, a, b) != 1 || deg[a] != 2 || deg[b] != 2 {
                return;
            }
            let name = match (kind(a), kind(b)) {
                (NodeKind::Hadamard, NodeKind::Hadamard) => "Id_Hadamard",
                (ka, kb) if ka.matches(&NodeKind::H_DEFAULT, MATCH_TOL) && kb.matches(&NodeKind::H_DEFAULT, MATCH_TOL) => {
                    "zh:Id_H"
                }
                _ => return,
            };
            out.extend(matches_on(host, inst(name, vec![]), &[a, b]));
        }),
        Component::NuMerge => {
            for a in &ids {
                if kind(a).matches(&NodeKind::NuBox(0.0), MATCH_TOL) {
                    out.extend(matches_on(host, inst("Id_nu", vec![]), &[a]));
                }
            }
            two(&mut |a, b| {
                if let (NodeKind::NuBox(h), NodeKind::NuBox(k)) = (kind(a), kind(b)) {
                    let i = inst("Fuse_nu", vec![("h", Value::Real(h)), ("k", Value::Real(k))]);
                    out.extend(matches_on(host, i, &[a, b]));
                }
            });
        }
    }
    out
}

/// Order: lowest image node id first, then component order, then the full
/// image in natural order.
fn step_order(a: &(Component, Match), b: &(Component, Match)) -> Ordering {
    let (ia, ib) = (a.1.image(), b.1.image());
    natural_cmp(&ia[0], &ib[0]).then(a.0.cmp(&b.0)).then_with(|| {
        for (x, y) in ia.iter().zip(&ib) {
            let o = natural_cmp(x, y);
            if o != Ordering::Equal {
                return o;
            }
        }
        ia.len().cmp(&ib.len())
    })
}

/// The next rewrite the strategy would take.
pub fn next_step(host: &Diagram, components: &[Component]) -> Option<(Component, Match)> {
    let mut all: Vec<(Component, Match)> = Vec::new();
    for c in components {
        all.extend(candidates(host, *c).into_iter().map(|m| (*c, m)));
    }
    all.into_iter().min_by(step_order)
}

/// Semantic check of one step.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationRecord {
    pub model: String,
    pub comparison: Comparison,
}

#[derive(Debug, Clone)]
pub struct TraceStep {
    /// 1-based.
    pub index: usize,
    pub rule: &'static str,
    pub bindings: Bindings,
    pub component: Component,
    /// Host nodes rewritten.
    pub image: Vec<String>,
    pub diagram: Diagram,
    pub validation: Option<ValidationRecord>,
}

impl TraceStep {
    /// `index rule binding verdict`.
    pub fn render(&self) -> String {
        let verdict = match &self.validation {
            None => "unvalidated".to_string(),
            Some(v) => match v.comparison {
                Comparison::Equal => format!("Equal({})", v.model),
                Comparison::Proportional(z) => format!("Proportional({},{},{})", v.model, z.re, z.im),
                Comparison::Different(d) => format!("Different({},{d})", v.model),
            },
        };
        format!("{} {} {} {}", self.index, self.rule, self.bindings.key(), verdict)
    }
}

/// Rewrite to a fixpoint of the enabled components. With a model, every
/// step is checked to preserve the semantics exactly.
pub fn simplify(
    host: &Diagram,
    components: &[Component],
    validate: Option<&Model>,
) -> Result<(Diagram, Vec<TraceStep>), RewriteError> {
    host.check()?;
    let mut current = host.clone();
    let mut before = match validate {
        Some(m) => Some(evaluate(&current, m)?),
        None => None,
    };
    let mut trace = Vec::new();
    while let Some((component, m)) = next_step(&current, components) {
        let next = apply(&current, &m)?;
        let index = trace.len() + 1;
        let validation = match (validate, &before) {
            (Some(model), Some(t0)) => {
                let t1 = evaluate(&next, model)?;
                let comparison = compare(t0, &t1, RULE_TOL)?;
                if comparison != Comparison::Equal {
                    return Err(RewriteError::Validation {
                        step: index,
                        rule: m.instance.schema.to_string(),
                        outcome: format!("{comparison:?}"),
                    });
                }
                before = Some(t1);
                Some(ValidationRecord {
                    model: model.name.clone(),
                    comparison,
                })
            }
            _ => None,
        };
        trace.push(TraceStep {
            index,
            rule: m.instance.schema,
            bindings: m.instance.bindings.clone(),
            component,
            image: m.image(),
            diagram: next.clone(),
            validation,
        });
        current = next;
    }
    Ok((current, trace))
}

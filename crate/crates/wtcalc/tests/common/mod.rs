//! Random diagram generation and the structural properties checked on it.

#![allow(dead_code)]

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use wtcalc::diagram::{Builder, Diagram, Endpoint, NodeKind};
use wtcalc::semantics::{compare, evaluate, Comparison, Model, Tensor};

pub const CASES: u32 = 200;
pub const TOL: f64 = 1e-9;

/// Raw material for one diagram with fixed boundary counts.
#[derive(Debug, Clone)]
pub struct Seed {
    pub kinds: Vec<(u8, f64, f64)>,
    pub edges: Vec<(usize, usize)>,
    /// Node index per input, then per output.
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
    pub loops: usize,
}

fn kind((tag, p, q): (u8, f64, f64)) -> NodeKind {
    match tag % 5 {
        0 => NodeKind::ZSpider(p),
        1 => NodeKind::XSpider(p),
        2 => NodeKind::WhiteDot,
        3 => NodeKind::HBox(C64::new(p - 3.0, q)),
        _ => NodeKind::GrayDot,
    }
}

impl Seed {
    pub fn build(&self) -> Diagram {
        let mut b = Builder::new();
        let nodes: Vec<Endpoint> = self.kinds.iter().map(|k| b.node(kind(*k))).collect();
        let n = nodes.len();
        for i in &self.inputs {
            b.input_to(&nodes[i % n]);
        }
        for o in &self.outputs {
            b.output_from(&nodes[o % n]);
        }
        for (x, y) in &self.edges {
            b.edge(&nodes[x % n], &nodes[y % n]);
        }
        b.add_loops(self.loops);
        b.build().expect("generated diagram is valid")
    }
}

pub fn seed(ins: usize, outs: usize) -> impl Strategy<Value = Seed> {
    (
        prop::collection::vec((any::<u8>(), 0.0..6.3f64, -1.0..1.0f64), 1..=3),
        prop::collection::vec((0..8usize, 0..8usize), 0..=4),
        prop::collection::vec(0..8usize, ins),
        prop::collection::vec(0..8usize, outs),
        0..2usize,
    )
        .prop_map(|(kinds, edges, inputs, outputs, loops)| Seed {
            kinds,
            edges,
            inputs,
            outputs,
            loops,
        })
}

/// A diagram with 0..=2 inputs and outputs.
pub fn diagram() -> impl Strategy<Value = Seed> {
    (0..=2usize, 0..=2usize).prop_flat_map(|(i, o)| seed(i, o))
}

/// Two diagrams that compose: the first's outputs feed the second's inputs.
pub fn composable() -> impl Strategy<Value = (Seed, Seed)> {
    (0..=2usize, 0..=2usize, 0..=2usize).prop_flat_map(|(a, b, c)| (seed(a, b), seed(b, c)))
}

pub fn nu(d: &Diagram) -> Tensor {
    evaluate(d, &Model::nu()).expect("small diagrams evaluate")
}

pub fn equal(a: &Tensor, b: &Tensor) -> Result<(), String> {
    match compare(a, b, TOL) {
        Ok(Comparison::Equal) => Ok(()),
        other => Err(format!("{other:?}\n{}\nagainst\n{}", a.dump(), b.dump())),
    }
}

/// ⟦D1 ; D2⟧ = ⟦D2⟧ ∘ ⟦D1⟧ and ⟦D1 ⊗ D2⟧ = ⟦D1⟧ ⊗ ⟦D2⟧.
pub fn functoriality(d1: &Diagram, d2: &Diagram) -> Result<(), String> {
    let seq = d1.sequential(d2).map_err(|e| e.to_string())?;
    equal(&nu(&seq), &nu(d2).compose(&nu(d1)).map_err(|e| e.to_string())?)?;
    equal(&nu(&d1.parallel(d2)), &nu(d1).kron(&nu(d2)))
}

/// Renaming nodes, reordering and reorienting edges leave the tensor
/// unchanged; swapping inputs and outputs transposes it.
pub fn topology_invariance(d: &Diagram, seed: u64) -> Result<(), String> {
    let ids = d.node_ids();
    let n = ids.len();
    let rename = |id: &str| {
        let i = ids.iter().position(|x| *x == id).unwrap();
        format!("m{}", (i + seed as usize) % n * 7 + 3)
    };
    let nodes = d.nodes().iter().map(|(id, k)| (rename(id), *k)).collect();
    let mut edges: Vec<(Endpoint, Endpoint)> = d
        .edges()
        .iter()
        .map(|(a, b)| {
            let f = |e: &Endpoint| match e {
                Endpoint::Node(x) => Endpoint::Node(rename(x)),
                b => b.clone(),
            };
            (f(b), f(a))
        })
        .collect();
    edges.reverse();
    if !edges.is_empty() {
        let k = seed as usize % edges.len();
        edges.rotate_left(k);
    }
    let moved = Diagram::from_parts(nodes, edges, d.inputs().to_vec(), d.outputs().to_vec(), d.loops());
    moved.check().map_err(|e| e.to_string())?;
    let t = nu(d);
    equal(&nu(&moved), &t)?;

    let tt = nu(&d.transpose());
    let (o, i) = (t.outputs(), t.inputs());
    let flipped: Vec<C64> = (0..1usize << (o + i))
        .map(|idx| {
            // Transposed index: new outputs are the old inputs.
            let (r, c) = (idx >> o, idx & ((1 << o) - 1));
            t.entry(c, r)
        })
        .collect();
    equal(&tt, &Tensor::new(i, o, flipped).map_err(|e| e.to_string())?)
}

/// Cup on (a, b) beside a wire, then a cap on (b, c).
pub fn snake() -> Diagram {
    let cup = Diagram::parse(r#"{"inputs":[],"outputs":["a","b"],"nodes":[],"edges":[["a","b"]]}"#).unwrap();
    let cap = Diagram::parse(r#"{"inputs":["x","y"],"outputs":[],"nodes":[],"edges":[["x","y"]]}"#).unwrap();
    Diagram::wire()
        .parallel(&cup)
        .sequential(&cap.parallel(&Diagram::wire()))
        .unwrap()
}

/// Bending every output wire through a zig-zag changes nothing.
pub fn snake_law(d: &Diagram) -> Result<(), String> {
    equal(&nu(&snake()), &Tensor::identity(1))?;
    let mut s = Diagram::empty();
    for _ in 0..d.outputs().len() {
        s = s.parallel(&snake());
    }
    let bent = d.sequential(&s).map_err(|e| e.to_string())?;
    equal(&nu(&bent), &nu(d))
}

/// The file format reproduces the diagram and its tensor exactly.
pub fn round_trip(d: &Diagram) -> Result<(), String> {
    let back = Diagram::parse(&d.to_json()).map_err(|e| e.to_string())?;
    if &back != d {
        return Err(format!("round trip changed the diagram:\n{}", d.to_json()));
    }
    if nu(&back).data() != nu(d).data() {
        return Err("round trip changed the tensor".into());
    }
    Ok(())
}

//! Reference diagrams: circuit gadgets and the Hopf-law derivation.

use num_complex::Complex64 as C64;

use crate::diagram::{Builder, Diagram, NodeKind};
use crate::semantics::Tensor;

/// Control on the first qubit: a green dot joined to a red dot.
pub fn cnot() -> Diagram {
    let mut b = Builder::new();
    let z = b.z(0.0);
    let x = b.x(0.0);
    b.input_to(&z);
    b.input_to(&x);
    b.output_from(&z);
    b.output_from(&x);
    b.edge(&z, &x);
    b.build().expect("fixed gadget is valid")
}

/// k white dots, one per qubit, all joined to a single H-box of parameter
/// −1: the controlled-…-controlled Z on k qubits.
pub fn multi_controlled_z(k: usize) -> Diagram {
    let mut b = Builder::new();
    let ws: Vec<_> = (0..k).map(|_| b.w()).collect();
    for w in &ws {
        b.input_to(w);
    }
    for w in &ws {
        b.output_from(w);
    }
    let h = b.node(NodeKind::H_DEFAULT);
    for w in &ws {
        b.edge(w, &h);
    }
    b.build().expect("fixed gadget is valid")
}

/// A green dot on the input joined to a red dot on the output by two
/// parallel wires.
pub fn hopf_lhs() -> Diagram {
    let mut b = Builder::new();
    let z = b.z(0.0);
    let x = b.x(0.0);
    b.input_to(&z);
    b.output_from(&x);
    b.edges(&z, &x, 2);
    b.build().expect("fixed gadget is valid")
}

/// The disconnected end point: a green effect and a red state.
pub fn hopf_rhs() -> Diagram {
    let mut b = Builder::new();
    let z = b.z(0.0);
    let x = b.x(0.0);
    b.input_to(&z);
    b.output_from(&x);
    b.build().expect("fixed gadget is valid")
}

/// The Hopf left-hand side with its red dot split into three: n0 green on
/// the input, n1 and n2 two-legged red dots on the parallel wires, n3 red on
/// the output.
pub fn hopf_start() -> Diagram {
    let mut b = Builder::new();
    let z = b.z(0.0);
    let x1 = b.x(0.0);
    let x2 = b.x(0.0);
    let x3 = b.x(0.0);
    b.input_to(&z);
    b.output_from(&x3);
    b.edge(&z, &x1);
    b.edge(&z, &x2);
    b.edge(&x1, &x3);
    b.edge(&x2, &x3);
    b.build().expect("fixed gadget is valid")
}

/// The CNOT matrix, control on the first (most significant) qubit.
pub fn cnot_matrix() -> Tensor {
    Tensor::from_real_matrix(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ])
    .expect("4×4")
}

/// diag(1, …, 1, −1) on k qubits.
pub fn controlled_z_matrix(k: usize) -> Tensor {
    let dim = 1usize << k;
    let diag: Vec<C64> = (0..dim)
        .map(|i| C64::new(if i == dim - 1 { -1.0 } else { 1.0 }, 0.0))
        .collect();
    Tensor::diagonal(&diag).expect("power-of-two size")
}

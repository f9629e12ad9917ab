//! Validation, the file format and composition of open diagrams.

use std::f64::consts::FRAC_PI_2;

use wtcalc::diagram::{Builder, Diagram, DiagramError, Endpoint, NodeKind};

#[test]
fn empty_diagram_is_valid() {
    let d = Diagram::parse(r#"{"inputs":[],"outputs":[],"nodes":[],"edges":[]}"#).unwrap();
    assert!(d.validate().is_empty());
    assert_eq!(d, Diagram::empty());
}

#[test]
fn degree_violations() {
    let mut b = Builder::new();
    let h = b.node(NodeKind::Hadamard);
    for _ in 0..3 {
        b.output_from(&h);
    }
    let err = b.build().unwrap_err();
    assert!(err.to_string().contains("Hadamard degree ≠ 2"), "{err}");

    let doc = r#"{"inputs":["i"],"outputs":[],"nodes":[{"id":"n0","kind":"NU","exponent":1.0}],"edges":[["i","n0"]]}"#;
    match Diagram::parse(doc) {
        Err(DiagramError::Invalid(v)) => assert!(v.iter().any(|x| x.message == "NuBox degree ≠ 0"), "{v:?}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn bare_wire_document() {
    let d = Diagram::parse(r#"{"inputs":["a"],"outputs":["b"],"nodes":[],"edges":[["a","b"]]}"#).unwrap();
    assert_eq!((d.inputs().len(), d.outputs().len()), (1, 1));
    assert_eq!(d.edges().len(), 1);
    let (x, y) = &d.edges()[0];
    assert!(x.is_boundary() && y.is_boundary());
}

#[test]
fn phase_round_trips_bit_exactly() {
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
fn unknown_kind_is_named() {
    let err = Diagram::parse(r#"{"inputs":[],"outputs":[],"nodes":[{"id":"n0","kind":"Q"}],"edges":[]}"#).unwrap_err();
    assert!(matches!(&err, DiagramError::UnknownKind { kind, .. } if kind == "Q"), "{err}");
}

#[test]
fn malformed_text_has_a_location() {
    match Diagram::parse("{\n  \"inputs\": [,\n}") {
        Err(DiagramError::Parse { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
}

#[test]
fn wires_compose() {
    let w = Diagram::wire();
    let seq = w.sequential(&w).unwrap();
    assert_eq!(seq.canonical(), w.canonical());

    let par = w.parallel(&w);
    assert_eq!(par.inputs(), ["b0", "b1"]);
    assert_eq!(par.outputs().len(), 2);
    for (i, o) in par.inputs().iter().zip(par.outputs()) {
        let joined = par
            .edges()
            .iter()
            .any(|(a, b)| [a.id(), b.id()] == [i.as_str(), o.as_str()] || [b.id(), a.id()] == [i.as_str(), o.as_str()]);
        assert!(joined, "{i} is not joined to {o}");
    }
}

#[test]
fn state_then_effect_is_closed() {
    let mut b = Builder::new();
    let z = b.z(0.0);
    b.output_from(&z);
    let state = b.build().unwrap();
    let mut b = Builder::new();
    let x = b.x(0.0);
    b.input_to(&x);
    let effect = b.build().unwrap();
    let closed = state.sequential(&effect).unwrap();
    assert!(closed.inputs().is_empty() && closed.outputs().is_empty());
    assert_eq!(closed.edges().len(), 1);
    assert!(matches!(&closed.edges()[0], (Endpoint::Node(_), Endpoint::Node(_))));
    assert_eq!(effect.sequential(&state).unwrap().nodes().len(), 2);
    assert!(matches!(state.sequential(&state), Err(DiagramError::ArityMismatch { .. })));
}

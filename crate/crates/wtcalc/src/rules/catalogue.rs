//! Builders for every schema in the catalogue.
//!
//! Conventions: inputs and outputs are created in the same relative order
//! on both sides, so boundary i of the left-hand side corresponds to
//! boundary i of the right-hand side. An "H2 box" is a degree-2 H-box with
//! parameter −1.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64 as C64;

use super::{euler_angles, scale_nu_lambda, Args, ParamKind, ParamSpec, RuleError, RuleSchema, Suite, MAX_ARITY};
use crate::diagram::{canonical_phase, Builder, Diagram, Endpoint, NodeKind};
use crate::semantics::{wrap_pi, Calculus};

type Sides = Result<(Diagram, Diagram), RuleError>;

const fn ar(name: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Arity {
            min: 0,
            max: MAX_ARITY,
        },
    }
}

const fn ph(name: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Phase,
    }
}

const fn cx(name: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Complex,
    }
}

const fn re(name: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind: ParamKind::Real,
    }
}

const NONE: &[ParamSpec] = &[];
const THETA: &[ParamSpec] = &[ph("theta")];
const THETA_DELTA: &[ParamSpec] = &[ph("theta"), ph("delta")];
const MN: &[ParamSpec] = &[ar("m"), ar("n")];
const MN_THETA: &[ParamSpec] = &[ar("m"), ar("n"), ph("theta")];
const KLMN: &[ParamSpec] = &[ar("k"), ar("l"), ar("m"), ar("n")];
const KLMN_A: &[ParamSpec] = &[ar("k"), ar("l"), ar("m"), ar("n"), cx("a")];
const KLMN_TD: &[ParamSpec] = &[ar("k"), ar("l"), ar("m"), ar("n"), ph("theta"), ph("delta")];
const A: &[ParamSpec] = &[cx("a")];
const AB: &[ParamSpec] = &[cx("a"), cx("b")];
const HK: &[ParamSpec] = &[re("h"), re("k")];
const HOPF: &[ParamSpec] = &[ar("a"), ar("b"), ph("theta"), ph("phi")];

fn hm1() -> NodeKind {
    NodeKind::H_DEFAULT
}

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Node with `ins` new inputs and `outs` new outputs.
fn spider(b: &mut Builder, kind: NodeKind, ins: usize, outs: usize) -> Endpoint {
    let n = b.node(kind);
    for _ in 0..ins {
        b.input_to(&n);
    }
    for _ in 0..outs {
        b.output_from(&n);
    }
    n
}

/// input - k₁ - k₂ - … - output, applied in the listed order.
fn chain_into(b: &mut Builder, kinds: &[NodeKind]) {
    let nodes: Vec<Endpoint> = kinds.iter().map(|k| b.node(*k)).collect();
    b.input_to(&nodes[0]);
    for w in nodes.windows(2) {
        b.edge(&w[0], &w[1]);
    }
    b.output_from(nodes.last().expect("non-empty chain"));
}

fn chain(kinds: &[NodeKind]) -> Result<Diagram, RuleError> {
    let mut b = Builder::new();
    chain_into(&mut b, kinds);
    Ok(b.build()?)
}

fn single(kind: NodeKind, ins: usize, outs: usize) -> Result<Diagram, RuleError> {
    let mut b = Builder::new();
    spider(&mut b, kind, ins, outs);
    Ok(b.build()?)
}

/// Green and red phase-free dots joined by one wire: √2 under α.
fn sqrt2_gadget(b: &mut Builder) {
    let z = b.z(0.0);
    let x = b.x(0.0);
    b.edge(&z, &x);
}

/// Green and red phase-free dots joined by three wires: 1/√2 under α, 1
/// under ν.
fn triple_gadget(b: &mut Builder) {
    let z = b.z(0.0);
    let x = b.x(0.0);
    b.edges(&z, &x, 3);
}

/// Green dot of phase γ joined to a red dot of phase π: e^{iγ} under ν,
/// √2·e^{iγ} under α.
fn phase_gadget(b: &mut Builder, gamma: f64) {
    let z = b.z(gamma);
    let x = b.x(PI);
    b.edge(&z, &x);
}

fn h_scalar(b: &mut Builder, a: f64) {
    b.hbox(c(a));
}

fn wire_with(extra: impl FnOnce(&mut Builder)) -> Result<Diagram, RuleError> {
    let mut b = Builder::new();
    b.bare_wire();
    extra(&mut b);
    Ok(b.build()?)
}

fn with_scalar(d: Result<Diagram, RuleError>, extra: impl FnOnce(&mut Builder)) -> Result<Diagram, RuleError> {
    let mut b = Builder::new();
    extra(&mut b);
    Ok(d?.parallel(&b.build()?))
}

// ---- ZX shapes -----------------------------------------------------------

fn change_sides(m: usize, n: usize, theta: f64) -> Sides {
    let mut b = Builder::new();
    let z = b.z(theta);
    for _ in 0..m {
        let h = b.node(NodeKind::Hadamard);
        b.input_to(&h);
        b.edge(&h, &z);
    }
    for _ in 0..n {
        let h = b.node(NodeKind::Hadamard);
        b.edge(&z, &h);
        b.output_from(&h);
    }
    Ok((b.build()?, single(NodeKind::XSpider(theta), m, n)?))
}

fn fuse_sides(mk: fn(f64) -> NodeKind, a: &Args) -> Sides {
    let (k, l, m, n) = (a.n("k"), a.n("l"), a.n("m"), a.n("n"));
    let (t, d) = (a.phase("theta"), a.phase("delta"));
    let mut b = Builder::new();
    let p = spider(&mut b, mk(t), k, m);
    let q = spider(&mut b, mk(d), l, n);
    b.edge(&p, &q);
    Ok((b.build()?, single(mk(canonical_phase(t + d)), k + l, m + n)?))
}

fn bialg_lhs(m: usize, n: usize) -> Builder {
    let mut b = Builder::new();
    let zs: Vec<Endpoint> = (0..m).map(|_| spider(&mut b, NodeKind::ZSpider(0.0), 1, 0)).collect();
    let xs: Vec<Endpoint> = (0..n).map(|_| spider(&mut b, NodeKind::XSpider(0.0), 0, 1)).collect();
    for z in &zs {
        for x in &xs {
            b.edge(z, x);
        }
    }
    b
}

fn bialg_rhs(m: usize, n: usize) -> Result<Diagram, RuleError> {
    let mut b = Builder::new();
    let x = spider(&mut b, NodeKind::XSpider(0.0), m, 0);
    let z = spider(&mut b, NodeKind::ZSpider(0.0), 0, n);
    b.edge(&x, &z);
    Ok(b.build()?)
}

fn special_lhs(kind: NodeKind) -> Result<Diagram, RuleError> {
    let mut b = Builder::new();
    let p = spider(&mut b, kind, 1, 0);
    let q = spider(&mut b, kind, 0, 1);
    b.edges(&p, &q, 2);
    Ok(b.build()?)
}

/// A three-legged dot on the wire whose spare leg is capped by a one-legged
/// dot of the same kind.
fn unit_lhs(kind: NodeKind) -> Result<Diagram, RuleError> {
    let mut b = Builder::new();
    let p = spider(&mut b, kind, 1, 1);
    let cap = b.node(kind);
    b.edge(&p, &cap);
    Ok(b.build()?)
}

fn euler_lhs(theta: f64, delta: f64) -> Result<Diagram, RuleError> {
    chain(&[
        NodeKind::Hadamard,
        NodeKind::ZSpider(canonical_phase(theta - delta)),
        NodeKind::XSpider(canonical_phase(theta + delta)),
    ])
}

fn euler_rhs(theta: f64, delta: f64, legacy: bool) -> Result<Diagram, RuleError> {
    let e = euler_angles(theta, delta);
    let mut b = Builder::new();
    chain_into(
        &mut b,
        &[
            NodeKind::ZSpider(canonical_phase(e.phi1)),
            NodeKind::XSpider(canonical_phase(e.phi2)),
            NodeKind::ZSpider(canonical_phase(e.phi3)),
        ],
    );
    phase_gadget(&mut b, canonical_phase(e.gamma));
    if legacy {
        triple_gadget(&mut b);
    }
    Ok(b.build()?)
}

fn copy_lhs(extra: bool) -> Result<Diagram, RuleError> {
    let mut b = Builder::new();
    let x = b.x(0.0);
    let z = spider(&mut b, NodeKind::ZSpider(0.0), 0, 2);
    b.edge(&x, &z);
    if extra {
        sqrt2_gadget(&mut b);
    }
    Ok(b.build()?)
}

fn copy_rhs() -> Result<Diagram, RuleError> {
    let mut b = Builder::new();
    spider(&mut b, NodeKind::XSpider(0.0), 0, 1);
    spider(&mut b, NodeKind::XSpider(0.0), 0, 1);
    Ok(b.build()?)
}

fn proj_lhs(theta: f64, extra: bool) -> Result<Diagram, RuleError> {
    let mut b = Builder::new();
    let z = b.z(theta);
    let x = b.x(0.0);
    b.edge(&z, &x);
    if extra {
        triple_gadget(&mut b);
    }
    Ok(b.build()?)
}

fn hopf_sides(a: &Args) -> Sides {
    let (na, nb) = (a.n("a"), a.n("b"));
    let (t, p) = (a.phase("theta"), a.phase("phi"));
    let mut b = Builder::new();
    let z = spider(&mut b, NodeKind::ZSpider(t), na, 0);
    let x = spider(&mut b, NodeKind::XSpider(p), 0, nb);
    b.edges(&z, &x, 2);
    let lhs = b.build()?;
    let mut b = Builder::new();
    spider(&mut b, NodeKind::ZSpider(t), na, 0);
    spider(&mut b, NodeKind::XSpider(p), 0, nb);
    Ok((lhs, b.build()?))
}

// ---- ZH shapes -----------------------------------------------------------

fn fuse_w_sides(a: &Args) -> Sides {
    let (k, l, m, n) = (a.n("k"), a.n("l"), a.n("m"), a.n("n"));
    let mut b = Builder::new();
    let p = spider(&mut b, NodeKind::WhiteDot, k, m);
    let q = spider(&mut b, NodeKind::WhiteDot, l, n);
    b.edge(&p, &q);
    Ok((b.build()?, single(NodeKind::WhiteDot, k + l, m + n)?))
}

/// Two H-boxes linked through an H2 box, and the fused box.
fn fuse_h_sides(k: usize, l: usize, m: usize, n: usize, a: C64) -> Sides {
    let mut b = Builder::new();
    let p = spider(&mut b, NodeKind::HBox(a), k, m);
    let mid = b.node(hm1());
    let q = spider(&mut b, hm1(), l, n);
    b.edge(&p, &mid);
    b.edge(&mid, &q);
    Ok((b.build()?, single(NodeKind::HBox(a), k + l, m + n)?))
}

/// White dot with every leg passing through an H2 box, and the gray dot.
fn switch_zg_sides(m: usize, n: usize) -> Sides {
    let mut b = Builder::new();
    let w = b.w();
    for _ in 0..m {
        let h = b.node(hm1());
        b.input_to(&h);
        b.edge(&h, &w);
    }
    for _ in 0..n {
        let h = b.node(hm1());
        b.edge(&w, &h);
        b.output_from(&h);
    }
    Ok((b.build()?, single(NodeKind::GrayDot, m, n)?))
}

fn bialg_zg_sides(m: usize, n: usize) -> Sides {
    let mut b = Builder::new();
    let ws: Vec<Endpoint> = (0..m).map(|_| spider(&mut b, NodeKind::WhiteDot, 1, 0)).collect();
    let gs: Vec<Endpoint> = (0..n).map(|_| spider(&mut b, NodeKind::GrayDot, 0, 1)).collect();
    for w in &ws {
        for g in &gs {
            b.edge(w, g);
        }
    }
    let lhs = b.build()?;
    let mut b = Builder::new();
    let g = spider(&mut b, NodeKind::GrayDot, m, 0);
    let w = spider(&mut b, NodeKind::WhiteDot, 0, n);
    b.edge(&g, &w);
    Ok((lhs, b.build()?))
}

/// m white dots fully connected to n H-boxes, each H-box reaching its output
/// through an H2 box; against an H-box, an H2 box and a white dot in series.
fn bialg_zh_sides(m: usize, n: usize) -> Sides {
    let mut b = Builder::new();
    let ws: Vec<Endpoint> = (0..m).map(|_| spider(&mut b, NodeKind::WhiteDot, 1, 0)).collect();
    let hs: Vec<Endpoint> = (0..n).map(|_| b.node(hm1())).collect();
    for w in &ws {
        for h in &hs {
            b.edge(w, h);
        }
    }
    for h in &hs {
        let mid = b.node(hm1());
        b.edge(h, &mid);
        b.output_from(&mid);
    }
    let lhs = b.build()?;
    let mut b = Builder::new();
    let h = spider(&mut b, hm1(), m, 0);
    let mid = b.node(hm1());
    let w = spider(&mut b, NodeKind::WhiteDot, 0, n);
    b.edge(&h, &mid);
    b.edge(&mid, &w);
    Ok((lhs, b.build()?))
}

fn mult_sides(a: C64, bb: C64) -> Sides {
    let mut b = Builder::new();
    let ha = b.hbox(a);
    let hb = b.hbox(bb);
    let w = b.w();
    b.edge(&ha, &w);
    b.edge(&hb, &w);
    b.output_from(&w);
    Ok((b.build()?, single(NodeKind::HBox(a * bb), 0, 1)?))
}

fn unit_zh_sides() -> Sides {
    Ok((single(NodeKind::WhiteDot, 0, 1)?, single(NodeKind::HBox(c(1.0)), 0, 1)?))
}

/// H2 box, white dot with a spare leg capped by a one-legged H-box, H2 box.
fn not_gadget() -> Result<Diagram, RuleError> {
    let mut b = Builder::new();
    let h1 = b.node(hm1());
    b.input_to(&h1);
    let w = b.w();
    b.edge(&h1, &w);
    let h2 = b.node(hm1());
    b.edge(&w, &h2);
    b.output_from(&h2);
    let cap = b.node(hm1());
    b.edge(&w, &cap);
    Ok(b.build()?)
}

/// Input absorbed by a white dot; output prepared by a one-legged H-box.
fn decouple(a: C64) -> Result<Diagram, RuleError> {
    let mut b = Builder::new();
    spider(&mut b, NodeKind::WhiteDot, 1, 0);
    spider(&mut b, NodeKind::HBox(a), 0, 1);
    Ok(b.build()?)
}

/// Input absorbed by a white dot; output prepared by a white dot passed
/// through an H2 box, a not dot and a degree-2 H-box.
fn disjunct(a: C64) -> Result<Diagram, RuleError> {
    let mut b = Builder::new();
    spider(&mut b, NodeKind::WhiteDot, 1, 0);
    let w = b.w();
    let h = b.node(hm1());
    let not = b.node(NodeKind::NotDot);
    let ha = b.hbox(a);
    b.edge(&w, &h);
    b.edge(&h, &not);
    b.edge(&not, &ha);
    b.output_from(&ha);
    Ok(b.build()?)
}

/// Inputs x, y and output z. A white dot on x feeds one H-box directly and
/// through a not dot; that box is linked (the bridge) to a second H-box
/// carrying y and z. Without the bridge each cut end is capped by a white
/// dot.
fn ortho(bridge: bool) -> Result<Diagram, RuleError> {
    let mut b = Builder::new();
    let w = b.w();
    b.input_to(&w);
    let not = b.node(NodeKind::NotDot);
    let hb = b.node(hm1());
    let ha = b.node(hm1());
    b.edge(&w, &hb);
    b.edge(&w, &not);
    b.edge(&not, &hb);
    if bridge {
        b.edge(&hb, &ha);
    } else {
        let c1 = b.w();
        b.edge(&hb, &c1);
        let c2 = b.w();
        b.edge(&c2, &ha);
    }
    b.input_to(&ha);
    b.output_from(&ha);
    Ok(b.build()?)
}

/// A white dot whose output is also sent round a loop through H(a), a not
/// dot and H(b).
fn avg_loop(a: C64, bb: C64) -> Result<Diagram, RuleError> {
    let mut b = Builder::new();
    let w = b.w();
    b.output_from(&w);
    let ha = b.hbox(a);
    let not = b.node(NodeKind::NotDot);
    let hb = b.hbox(bb);
    b.edge(&w, &ha);
    b.edge(&ha, &not);
    b.edge(&not, &hb);
    b.edge(&hb, &w);
    Ok(b.build()?)
}

fn avg_prep(a: C64, bb: C64) -> Result<Diagram, RuleError> {
    single(NodeKind::HBox((a + bb) / 2.0), 0, 1)
}

// ---- builders ------------------------------------------------------------

fn b_id_z(_: &Args) -> Sides {
    Ok((chain(&[NodeKind::ZSpider(0.0)])?, Diagram::wire()))
}

fn b_id_x(_: &Args) -> Sides {
    Ok((chain(&[NodeKind::XSpider(0.0)])?, Diagram::wire()))
}

fn b_change(a: &Args) -> Sides {
    change_sides(a.n("m"), a.n("n"), a.phase("theta"))
}

fn b_fuse_z(a: &Args) -> Sides {
    fuse_sides(NodeKind::ZSpider, a)
}

fn b_fuse_x(a: &Args) -> Sides {
    fuse_sides(NodeKind::XSpider, a)
}

fn b_proj_z(a: &Args) -> Sides {
    Ok((proj_lhs(a.phase("theta"), false)?, Diagram::empty()))
}

fn b_id_nu(_: &Args) -> Sides {
    Ok((single(NodeKind::NuBox(0.0), 0, 0)?, Diagram::empty()))
}

fn b_bialg(a: &Args) -> Sides {
    let (m, n) = (a.n("m"), a.n("n"));
    Ok((bialg_lhs(m, n).build()?, bialg_rhs(m, n)?))
}

fn b_euler(a: &Args) -> Sides {
    let (t, d) = (a.phase("theta"), a.phase("delta"));
    Ok((euler_lhs(t, d)?, euler_rhs(t, d, false)?))
}

fn b_fuse_nu(a: &Args) -> Sides {
    let (h, k) = (a.r("h"), a.r("k"));
    let mut b = Builder::new();
    b.node(NodeKind::NuBox(h));
    b.node(NodeKind::NuBox(k));
    Ok((b.build()?, single(NodeKind::NuBox(h + k), 0, 0)?))
}

fn b_scale_nu(a: &Args) -> Sides {
    let t = a.phase("theta");
    let lambda = scale_nu_lambda(t)?;
    let mut b = Builder::new();
    phase_gadget(&mut b, canonical_phase(wrap_pi(t) / 2.0));
    b.node(NodeKind::NuBox(2.0 * lambda));
    Ok((single(NodeKind::ZSpider(t), 0, 0)?, b.build()?))
}

fn b_zh_id_z(_: &Args) -> Sides {
    Ok((chain(&[NodeKind::WhiteDot])?, Diagram::wire()))
}

fn b_zh_id_h(_: &Args) -> Sides {
    Ok((chain(&[hm1(), hm1()])?, Diagram::wire()))
}

fn b_unit_h(_: &Args) -> Sides {
    unit_zh_sides()
}

fn b_mult_h(a: &Args) -> Sides {
    mult_sides(a.c("a"), a.c("b"))
}

fn b_fuse_w(a: &Args) -> Sides {
    fuse_w_sides(a)
}

fn b_spec_z(_: &Args) -> Sides {
    Ok((special_lhs(NodeKind::WhiteDot)?, wire_with(|b| h_scalar(b, SQRT_2))?))
}

fn b_zh_fuse_h(a: &Args) -> Sides {
    fuse_h_sides(a.n("k"), a.n("l"), a.n("m"), a.n("n"), a.c("a"))
}

fn b_bialg_zh(a: &Args) -> Sides {
    bialg_zh_sides(a.n("m"), a.n("n"))
}

fn b_zh_change(a: &Args) -> Sides {
    switch_zg_sides(a.n("m"), a.n("n"))
}

fn b_bialg_zx(a: &Args) -> Sides {
    bialg_zg_sides(a.n("m"), a.n("n"))
}

fn b_zh_not(_: &Args) -> Sides {
    Ok((chain(&[NodeKind::NotDot])?, not_gadget()?))
}

fn b_dilem(a: &Args) -> Sides {
    let x = a.c("a");
    Ok((decouple(x)?, disjunct(x)?))
}

fn b_ortho(_: &Args) -> Sides {
    Ok((ortho(false)?, with_scalar(ortho(true), |b| h_scalar(b, SQRT_2))?))
}

fn b_avg(a: &Args) -> Sides {
    let (x, y) = (a.c("a"), a.c("b"));
    Ok((avg_loop(x, y)?, with_scalar(avg_prep(x, y), |b| h_scalar(b, SQRT_2))?))
}

fn b_bialg_alpha(_: &Args) -> Sides {
    let mut lhs = bialg_lhs(2, 2);
    sqrt2_gadget(&mut lhs);
    Ok((lhs.build()?, bialg_rhs(2, 2)?))
}

fn b_copy_alpha(_: &Args) -> Sides {
    Ok((copy_lhs(true)?, copy_rhs()?))
}

fn b_empty_alpha(a: &Args) -> Sides {
    Ok((proj_lhs(a.phase("theta"), true)?, Diagram::empty()))
}

fn b_special_z(_: &Args) -> Sides {
    Ok((special_lhs(NodeKind::ZSpider(0.0))?, Diagram::wire()))
}

fn b_special_w(_: &Args) -> Sides {
    Ok((special_lhs(NodeKind::WhiteDot)?, Diagram::wire()))
}

fn b_euler_alpha(a: &Args) -> Sides {
    let (t, d) = (a.phase("theta"), a.phase("delta"));
    Ok((euler_lhs(t, d)?, euler_rhs(t, d, true)?))
}

fn b_x_beta(a: &Args) -> Sides {
    let (lhs, rhs) = switch_zg_sides(a.n("m"), a.n("n"))?;
    Ok((lhs, with_scalar(Ok(rhs), |b| h_scalar(b, 2.0))?))
}

fn b_ih_beta(_: &Args) -> Sides {
    Ok((chain(&[hm1(), hm1()])?, wire_with(|b| h_scalar(b, 2.0))?))
}

fn b_fh_beta(a: &Args) -> Sides {
    let (lhs, rhs) = fuse_h_sides(a.n("k"), a.n("l"), a.n("m"), a.n("n"), a.c("a"))?;
    Ok((lhs, with_scalar(Ok(rhs), |b| h_scalar(b, 2.0))?))
}

fn b_n_beta(_: &Args) -> Sides {
    Ok((not_gadget()?, with_scalar(chain(&[NodeKind::NotDot]), |b| h_scalar(b, 2.0))?))
}

fn b_d_beta(a: &Args) -> Sides {
    let x = a.c("a");
    Ok((disjunct(x)?, with_scalar(decouple(x), |b| h_scalar(b, 2.0))?))
}

fn b_o_beta(_: &Args) -> Sides {
    Ok((ortho(false)?, with_scalar(ortho(true), |b| h_scalar(b, 2.0))?))
}

fn b_a_beta(a: &Args) -> Sides {
    let (x, y) = (a.c("a"), a.c("b"));
    Ok((avg_loop(x, y)?, with_scalar(avg_prep(x, y), |b| h_scalar(b, 2.0))?))
}

fn b_ba2_beta(a: &Args) -> Sides {
    let n = a.n("n");
    let (lhs, rhs) = bialg_zh_sides(a.n("m"), n)?;
    let s = 2f64.powi(n as i32 - 1);
    Ok((lhs, with_scalar(Ok(rhs), |b| h_scalar(b, s))?))
}

fn b_unit_r(_: &Args) -> Sides {
    Ok((unit_lhs(NodeKind::XSpider(0.0))?, Diagram::wire()))
}

fn b_counit_z(_: &Args) -> Sides {
    Ok((unit_lhs(NodeKind::ZSpider(0.0))?, Diagram::wire()))
}

fn b_copy_zr(_: &Args) -> Sides {
    Ok((copy_lhs(false)?, copy_rhs()?))
}

fn b_bialg_zr(_: &Args) -> Sides {
    Ok((bialg_lhs(2, 2).build()?, bialg_rhs(2, 2)?))
}

fn b_id_h(_: &Args) -> Sides {
    Ok((chain(&[hm1(), hm1()])?, Diagram::wire()))
}

fn b_not_ideal(_: &Args) -> Sides {
    Ok((chain(&[NodeKind::NotDot])?, not_gadget()?))
}

fn b_fuse_h_ideal(a: &Args) -> Sides {
    fuse_h_sides(a.n("k"), a.n("l"), a.n("m"), a.n("n"), c(-1.0))
}

fn b_orth_ideal(_: &Args) -> Sides {
    Ok((ortho(true)?, ortho(false)?))
}

fn b_avg_ideal(a: &Args) -> Sides {
    let (x, y) = (a.c("a"), a.c("b"));
    Ok((avg_prep(x, y)?, avg_loop(x, y)?))
}

fn b_id_hadamard(_: &Args) -> Sides {
    Ok((chain(&[NodeKind::Hadamard, NodeKind::Hadamard])?, Diagram::wire()))
}

#[allow(clippy::too_many_arguments)]
fn schema(
    name: &'static str,
    aliases: &'static [&'static str],
    suite: Suite,
    calculus: Calculus,
    params: &'static [ParamSpec],
    summary: &'static str,
    build: super::BuildFn,
) -> RuleSchema {
    RuleSchema {
        name,
        aliases,
        suite,
        calculus,
        params,
        summary,
        build,
    }
}

pub(super) fn all() -> Vec<RuleSchema> {
    use Calculus::{Hybrid, Zh, Zx};
    use Suite::*;
    vec![
        // Well-tempered ZX.
        schema("Id_Z", &[], WellTemperedZx, Zx, NONE, "two-legged green dot = wire", b_id_z),
        schema("Id_X", &[], WellTemperedZx, Zx, NONE, "two-legged red dot = wire", b_id_x),
        schema("Change", &[], WellTemperedZx, Zx, MN_THETA, "green dot with every leg through a Hadamard = red dot", b_change),
        schema("Fuse_Z", &[], WellTemperedZx, Zx, KLMN_TD, "adjacent green dots fuse, phases add", b_fuse_z),
        schema("Proj_Z", &[], WellTemperedZx, Zx, THETA, "green phase effect on a red state = empty", b_proj_z),
        schema("Id_nu", &["Id_ν"], WellTemperedZx, Hybrid, NONE, "nu box of exponent 0 = empty", b_id_nu),
        schema("Bialg", &[], WellTemperedZx, Zx, MN, "complete bipartite green/red = red then green", b_bialg),
        schema("Euler", &[], WellTemperedZx, Zx, THETA_DELTA, "H, Z(θ−δ), X(θ+δ) = Z(φ1), X(φ2), Z(φ3) with a phase-γ gadget", b_euler),
        schema("Fuse_nu", &["Fuse_ν"], WellTemperedZx, Hybrid, HK, "nu boxes multiply", b_fuse_nu),
        schema("Scale_nu", &["Scale_ν"], WellTemperedZx, Hybrid, THETA, "green scalar = half-phase gadget with nu^{2λ}", b_scale_nu),
        // Well-tempered ZH.
        schema("zh:Id_Z", &[], WellTemperedZh, Zh, NONE, "two-legged white dot = wire", b_zh_id_z),
        schema("zh:Id_H", &[], WellTemperedZh, Zh, NONE, "two H2 boxes in series = wire", b_zh_id_h),
        schema("zh:Unit_H", &["Unit_H"], WellTemperedZh, Zh, NONE, "one-legged white dot = one-legged H(1)", b_unit_h),
        schema("zh:Mult_H", &["Mult_H"], WellTemperedZh, Zh, AB, "H(a) and H(b) states merged by a white dot = H(ab)", b_mult_h),
        schema("zh:Fuse_Z", &[], WellTemperedZh, Zh, KLMN, "adjacent white dots fuse", b_fuse_w),
        schema("zh:Spec_Z", &["Spec_Z"], WellTemperedZh, Zh, NONE, "white bubble = wire with scalar H(√2)", b_spec_z),
        schema("zh:Fuse_H", &["Fuse_H"], WellTemperedZh, Zh, KLMN_A, "H-boxes linked by an H2 box fuse", b_zh_fuse_h),
        schema("zh:Bialg_ZH", &["Bialg_ZH"], WellTemperedZh, Zh, MN, "white/H complete bipartite with H2 outputs = H, H2, white", b_bialg_zh),
        schema("zh:Change", &[], WellTemperedZh, Zh, MN, "white dot with every leg through an H2 box = gray dot", b_zh_change),
        schema("zh:Bialg_ZX", &["Bialg_ZX"], WellTemperedZh, Zh, MN, "complete bipartite white/gray = gray then white", b_bialg_zx),
        schema("zh:Not", &[], WellTemperedZh, Zh, NONE, "not dot = H2, white dot with H(−1) cap, H2", b_zh_not),
        schema("zh:Dilem", &["Dilem"], WellTemperedZh, Zh, A, "H(a) state = white, H2, not, H(a) chain", b_dilem),
        schema("zh:Ortho", &["Ortho"], WellTemperedZh, Zh, NONE, "cut bridge = bridge with scalar H(√2)", b_ortho),
        schema("zh:Avg", &["Avg"], WellTemperedZh, Zh, AB, "H(a)/not/H(b) loop = H((a+b)/2) with scalar H(√2)", b_avg),
        // Legacy ZX.
        schema("X^alpha", &["X^α"], LegacyZx, Zx, MN_THETA, "colour change through Hadamards", b_change),
        schema("I_g^alpha", &["I_g^α"], LegacyZx, Zx, NONE, "two-legged green dot = wire", b_id_z),
        schema("I_r^alpha", &["I_r^α"], LegacyZx, Zx, NONE, "two-legged red dot = wire", b_id_x),
        schema("B^alpha", &["B^α"], LegacyZx, Zx, NONE, "2×2 bialgebra with a √2 gadget", b_bialg_alpha),
        schema("C_r^alpha", &["C_r^α"], LegacyZx, Zx, NONE, "green copies a red state, with a √2 gadget", b_copy_alpha),
        schema("E^alpha", &["E^α"], LegacyZx, Zx, THETA, "green phase effect on red state with a 1/√2 gadget = empty", b_empty_alpha),
        schema("F_g^alpha", &["F_g^α"], LegacyZx, Zx, KLMN_TD, "green fusion", b_fuse_z),
        schema("S_g^alpha", &["S_g^α"], LegacyZx, Zx, NONE, "green bubble = wire", b_special_z),
        schema("EU^alpha", &["EU^α"], LegacyZx, Zx, THETA_DELTA, "Euler decomposition with phase and 1/√2 gadgets", b_euler_alpha),
        // Legacy ZH.
        schema("I_w^beta", &["I_w^β"], LegacyZh, Zh, NONE, "two-legged white dot = wire", b_zh_id_z),
        schema("F_w^beta", &["F_w^β"], LegacyZh, Zh, KLMN, "white fusion", b_fuse_w),
        schema("S_w^beta", &["S_w^β"], LegacyZh, Zh, NONE, "white bubble = wire", b_special_w),
        schema("X^beta", &["X^β"], LegacyZh, Zh, MN, "white through H2 boxes = gray with scalar H(2)", b_x_beta),
        schema("I_h^beta", &["I_h^β"], LegacyZh, Zh, NONE, "two H2 boxes = wire with scalar H(2)", b_ih_beta),
        schema("F_h^beta", &["F_h^β"], LegacyZh, Zh, KLMN_A, "H-box fusion with scalar H(2)", b_fh_beta),
        schema("U^beta", &["U^β"], LegacyZh, Zh, NONE, "one-legged white dot = one-legged H(1)", b_unit_h),
        schema("BA_1^beta", &["BA_1^β"], LegacyZh, Zh, MN, "white/gray bialgebra", b_bialg_zx),
        schema("M^beta", &["M^β"], LegacyZh, Zh, AB, "H-box multiplication", b_mult_h),
        schema("BA_2^beta", &["BA_2^β"], LegacyZh, Zh, MN, "white/H bialgebra with scalar H(2^{n−1})", b_ba2_beta),
        schema("N^beta", &["N^β"], LegacyZh, Zh, NONE, "not gadget = not dot with scalar H(2)", b_n_beta),
        schema("D^beta", &["D^β"], LegacyZh, Zh, A, "disjunct = decoupled with scalar H(2)", b_d_beta),
        schema("O^beta", &["O^β"], LegacyZh, Zh, NONE, "cut bridge = bridge with scalar H(2)", b_o_beta),
        schema("A^beta", &["A^β"], LegacyZh, Zh, AB, "averaging loop = H((a+b)/2) with scalar H(2)", b_a_beta),
        // Idealized.
        schema("Id Z", &["Id_Z_ideal"], Idealized, Zx, NONE, "two-legged green dot = wire", b_id_z),
        schema("Id R", &["Id_R"], Idealized, Zx, NONE, "two-legged red dot = wire", b_id_x),
        schema("Unit R", &["Unit_R"], Idealized, Zx, NONE, "red dot with a red unit = wire", b_unit_r),
        schema("Counit Z", &["Counit_Z"], Idealized, Zx, NONE, "green dot with a green counit = wire", b_counit_z),
        schema("Copy ZR", &["Copy_ZR"], Idealized, Zx, NONE, "green copies a red state", b_copy_zr),
        schema("Bialg ZR", &["Bialg_ZR"], Idealized, Zx, NONE, "2×2 bialgebra without scalars", b_bialg_zr),
        schema("Fuse Z", &["Fuse_Z_ideal"], Idealized, Zx, KLMN_TD, "green fusion", b_fuse_z),
        schema("Special Z", &["Special_Z"], Idealized, Zx, NONE, "green bubble = wire", b_special_z),
        schema("Switch ZR", &["Switch_ZR"], Idealized, Zx, MN_THETA, "colour change through Hadamards", b_change),
        schema("Empty ZR", &["Empty_ZR"], Idealized, Zx, THETA, "green phase effect on a red state = empty", b_proj_z),
        schema("Id H", &["Id_H"], Idealized, Zh, NONE, "two H2 boxes = wire", b_id_h),
        schema("Not", &[], Idealized, Zh, NONE, "not dot = H2, capped white dot, H2", b_not_ideal),
        schema("Switch ZG", &["Switch_ZG"], Idealized, Zh, MN, "white through H2 boxes = gray", b_zh_change),
        schema("Mult ZH", &["Mult_ZH"], Idealized, Zh, AB, "H-box multiplication", b_mult_h),
        schema("Unit ZH", &["Unit_ZH"], Idealized, Zh, NONE, "white unit = H(1) state", b_unit_h),
        schema("Bialg ZG", &["Bialg_ZG"], Idealized, Zh, MN, "white/gray bialgebra", b_bialg_zx),
        schema("Bialg ZH", &["Bialg_ZH_ideal"], Idealized, Zh, MN, "white/H bialgebra", b_bialg_zh),
        schema("Fuse H", &["Fuse_H_ideal"], Idealized, Zh, KLMN, "H-box fusion through an H2 box", b_fuse_h_ideal),
        schema("Orth ZH", &["Orth_ZH"], Idealized, Zh, NONE, "bridge = cut bridge", b_orth_ideal),
        schema("Dilem ZH", &["Dilem_ZH"], Idealized, Zh, A, "decoupled = disjunct", b_dilem),
        schema("Avg ZH", &["Avg_ZH"], Idealized, Zh, AB, "H((a+b)/2) = averaging loop", b_avg_ideal),
        // Derived.
        schema("Hopf", &[], Derived, Zx, HOPF, "green and red dots joined by two wires disconnect", hopf_sides),
        schema("Fuse_X", &[], Derived, Zx, KLMN_TD, "adjacent red dots fuse, phases add", b_fuse_x),
        schema("Id_Hadamard", &[], Derived, Zx, NONE, "two Hadamards in series = wire", b_id_hadamard),
    ]
}

#[cfg(test)]
mod tests {
    use super::super::{catalogue, lookup, sanitize_name, Bindings, Value};
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn names_are_unique() {
        let mut seen = BTreeSet::new();
        let mut files = BTreeSet::new();
        for s in catalogue() {
            assert!(seen.insert(s.name), "duplicate {}", s.name);
            for a in s.aliases {
                assert!(seen.insert(a), "duplicate alias {a}");
            }
            assert!(files.insert((s.suite, sanitize_name(s.name))), "file name clash {}", s.name);
        }
        assert!(catalogue().len() >= 38);
    }

    #[test]
    fn fuse_z_instance() {
        let q = std::f64::consts::FRAC_PI_4;
        let b = Bindings(vec![
            ("k", Value::Arity(1)),
            ("l", Value::Arity(1)),
            ("m", Value::Arity(1)),
            ("n", Value::Arity(1)),
            ("theta", Value::Phase(q)),
            ("delta", Value::Phase(q)),
        ]);
        let inst = lookup("Fuse_Z").unwrap().instantiate(&b).unwrap();
        assert_eq!(inst.lhs.nodes().len(), 2);
        assert_eq!(inst.rhs.nodes().len(), 1);
        let NodeKind::ZSpider(p) = inst.rhs.nodes().values().next().copied().unwrap() else {
            panic!()
        };
        assert!((p - 2.0 * q).abs() < 1e-15);
        assert_eq!(b.key(), "k1_l1_m1_n1_theta0.785398_delta0.785398");
    }

    #[test]
    fn id_nu_lookup_by_alias() {
        let inst = lookup("Id_ν").unwrap().instantiate(&Bindings::default()).unwrap();
        assert_eq!(inst.lhs.nodes().values().next(), Some(&NodeKind::NuBox(0.0)));
        assert_eq!(inst.rhs, Diagram::empty());
    }

    #[test]
    fn special_z_shape() {
        let inst = lookup("Special Z").unwrap().instantiate(&Bindings::default()).unwrap();
        assert_eq!(inst.lhs.edges().len(), 4);
        assert_eq!(inst.rhs, Diagram::wire());
    }

    #[test]
    fn scale_nu_rejects_pi() {
        let b = Bindings(vec![("theta", Value::Phase(PI))]);
        assert!(matches!(lookup("Scale_nu").unwrap().instantiate(&b), Err(RuleError::Domain(_))));
    }

    #[test]
    fn out_of_range_binding() {
        let b = Bindings(vec![("m", Value::Arity(MAX_ARITY + 1)), ("n", Value::Arity(0))]);
        assert!(matches!(lookup("Bialg").unwrap().instantiate(&b), Err(RuleError::Binding(_))));
        let b = Bindings(vec![("m", Value::Phase(0.0)), ("n", Value::Arity(0))]);
        assert!(lookup("Bialg").unwrap().instantiate(&b).is_err());
    }

    #[test]
    fn bialg_two_two_is_complete_bipartite() {
        let b = Bindings(vec![("m", Value::Arity(2)), ("n", Value::Arity(2))]);
        let inst = lookup("Bialg").unwrap().instantiate(&b).unwrap();
        let inner = inst
            .lhs
            .edges()
            .iter()
            .filter(|(a, b)| !a.is_boundary() && !b.is_boundary())
            .count();
        assert_eq!(inner, 4);
        assert_eq!(inst.rhs.nodes().len(), 2);
    }
}

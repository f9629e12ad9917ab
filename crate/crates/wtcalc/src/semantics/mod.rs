//! Tensor semantics of diagrams under parameterised models, and comparison
//! of tensors up to a scalar.

mod model;
mod tensor;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::diagram::{canonical_phase, Diagram, DiagramError, Endpoint, NodeKind};

pub use model::{pow2_quarter, pow2_quarter_f64, Calculus, CoeffFamily, Family, Model, EXPLICIT_DEGREES};
pub use tensor::{fmt_sig17, Tensor};

/// Default cap on open legs of an evaluated diagram.
pub const DEFAULT_LEG_BUDGET: usize = 14;
/// Cap on legs of any intermediate tensor during contraction.
pub const INTERMEDIATE_LEG_CAP: usize = 22;
/// Tolerance for rule checks.
pub const RULE_TOL: f64 = 1e-9;
/// Tolerance for closed-form identities.
pub const EXACT_TOL: f64 = 1e-12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Debug, Error)]
pub enum SemanticsError {
    #[error("{kind} is not interpreted by model {model}")]
    Unlicensed { kind: &'static str, model: String },
    #[error("{legs} legs exceed the contraction budget of {budget}")]
    LegBudget { legs: usize, budget: usize },
    #[error("coefficient {family}_{degree} is undefined in this model")]
    CoefficientUndefined { family: Family, degree: usize },
    #[error("{kind} cannot have degree {degree}")]
    Degree { kind: &'static str, degree: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("tensor entries must be finite")]
    NonFinite,
    #[error("model file line {line}: {message}")]
    ModelFile { line: usize, message: String },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// Open-leg budget: `WT_LEG_BUDGET` if set to a positive integer, else 14.
pub fn leg_budget() -> usize {
    static BUDGET: OnceLock<usize> = OnceLock::new();
    *BUDGET.get_or_init(|| {
        std::env::var("WT_LEG_BUDGET")
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .filter(|&n: &usize| n > 0)
            .unwrap_or(DEFAULT_LEG_BUDGET)
    })
}

/// e^{iθ}, exact at multiples of π/2.
pub fn cis(theta: f64) -> C64 {
    let r = canonical_phase(theta);
    let q = r / FRAC_PI_2;
    if (q - q.round()).abs() < 1e-12 {
        return match (q.round() as i64).rem_euclid(4) {
            0 => ONE,
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
    }
    C64::from_polar(1.0, theta)
}

/// Wrap an angle to (−π, π].
pub fn wrap_pi(theta: f64) -> f64 {
    let r = canonical_phase(theta);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// √(1+cos θ)·e^{iθ/2}, the value of a phase-θ green dot of degree 0 under ν.
/// The half-angle is taken on the representative of θ in (−π, π], which is
/// the branch on which this expression equals 2^{-1/2}(1 + e^{iθ}).
pub fn green_scalar(theta: f64) -> C64 {
    let w = wrap_pi(theta);
    let c = canonical_phase(theta);
    let cos = if (c - PI).abs() < 1e-15 { -1.0 } else { w.cos() };
    cis(w / 2.0) * (1.0 + cos).max(0.0).sqrt()
}

/// Tensor of one generator at a given degree, all legs as outputs.
pub fn generator_tensor(kind: &NodeKind, degree: usize, model: &Model) -> Result<Tensor, SemanticsError> {
    if !model.licenses(kind) {
        return Err(SemanticsError::Unlicensed {
            kind: kind.tag(),
            model: model.name.clone(),
        });
    }
    if let Some(d) = kind.required_degree() {
        if d != degree {
            return Err(SemanticsError::Degree {
                kind: kind.tag(),
                degree,
            });
        }
    }
    if degree > INTERMEDIATE_LEG_CAP {
        return Err(SemanticsError::LegBudget {
            legs: degree,
            budget: INTERMEDIATE_LEG_CAP,
        });
    }
    let size = 1usize << degree;
    let all_ones = size - 1;
    let data: Vec<C64> = match kind {
        NodeKind::ZSpider(theta) => {
            let u = model.coefficient(Family::U, degree)?;
            spider_z(degree, cis(*theta), u)
        }
        NodeKind::WhiteDot => spider_z(degree, ONE, model.coefficient(Family::U, degree)?),
        NodeKind::XSpider(theta) => {
            let v = model.coefficient(Family::V, degree)?;
            let e = cis(*theta);
            let norm = v * 2f64.powi(-(degree as i32)).sqrt();
            (0..size)
                .map(|x| {
                    let sign = if x.count_ones() % 2 == 0 { e } else { -e };
                    (ONE + sign) * norm
                })
                .collect()
        }
        NodeKind::Hadamard => {
            let s = model.hadamard_scale * FRAC_1_SQRT_2;
            vec![C64::new(s, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0)]
        }
        NodeKind::HBox(a) => {
            let h = model.coefficient(Family::H, degree)?;
            (0..size)
                .map(|x| if x == all_ones { a * h } else { C64::new(h, 0.0) })
                .collect()
        }
        NodeKind::GrayDot => {
            let g = model.coefficient(Family::G, degree)?;
            (0..size)
                .map(|x| if x.count_ones() % 2 == 0 { C64::new(g, 0.0) } else { ZERO })
                .collect()
        }
        NodeKind::NotDot => {
            let xi = model.coefficient(Family::Xi, 2)?;
            vec![ZERO, C64::new(xi, 0.0), C64::new(xi, 0.0), ZERO]
        }
        NodeKind::NuBox(k) => vec![C64::new(pow2_quarter_f64(-k), 0.0)],
    };
    Ok(Tensor::from_raw(degree, 0, data))
}

fn spider_z(degree: usize, phase: C64, coeff: f64) -> Vec<C64> {
    let size = 1usize << degree;
    let mut data = vec![ZERO; size];
    if degree == 0 {
        data[0] = (ONE + phase) * coeff;
    } else {
        data[0] = C64::new(coeff, 0.0);
        data[size - 1] = phase * coeff;
    }
    data
}

/// A tensor whose legs carry edge labels; first label most significant.
#[derive(Debug, Clone)]
struct Labeled {
    labels: Vec<usize>,
    data: Vec<C64>,
}

/// Offsets contributed by each counter value when the counter's bits (most
/// significant first) are routed to the given weights.
fn offsets(weights: &[usize]) -> Vec<usize> {
    let mut t = vec![0usize; 1 << weights.len()];
    for (j, w) in weights.iter().enumerate() {
        let bit = 1usize << (weights.len() - 1 - j);
        for (c, slot) in t.iter_mut().enumerate() {
            if c & bit != 0 {
                *slot += w;
            }
        }
    }
    t
}

fn weight(n: usize, pos: usize) -> usize {
    1usize << (n - 1 - pos)
}

impl Labeled {
    /// Sum over repeated labels (self-loops).
    fn trace_repeats(self) -> Labeled {
        let n = self.labels.len();
        let mut keep = Vec::new();
        let mut traced: Vec<(usize, usize)> = Vec::new();
        for (p, l) in self.labels.iter().enumerate() {
            match self.labels.iter().position(|x| x == l) {
                Some(first) if first < p => traced.push((first, p)),
                _ => {
                    if self.labels.iter().filter(|x| *x == l).count() == 1 {
                        keep.push(p);
                    }
                }
            }
        }
        if traced.is_empty() {
            return self;
        }
        let kw: Vec<usize> = keep.iter().map(|&p| weight(n, p)).collect();
        let tw: Vec<usize> = traced.iter().map(|&(a, b)| weight(n, a) + weight(n, b)).collect();
        let ko = offsets(&kw);
        let to = offsets(&tw);
        let data = ko
            .iter()
            .map(|k| to.iter().map(|t| self.data[k + t]).sum())
            .collect();
        Labeled {
            labels: keep.iter().map(|&p| self.labels[p]).collect(),
            data,
        }
    }

    /// Contract every shared label; result labels are self-only then
    /// other-only.
    fn contract(&self, other: &Labeled) -> Labeled {
        let (na, nb) = (self.labels.len(), other.labels.len());
        let mut a_only = Vec::new();
        let mut shared = Vec::new();
        for (p, l) in self.labels.iter().enumerate() {
            match other.labels.iter().position(|x| x == l) {
                Some(q) => shared.push((p, q)),
                None => a_only.push(p),
            }
        }
        let b_only: Vec<usize> = (0..nb)
            .filter(|q| !shared.iter().any(|&(_, s)| s == *q))
            .collect();
        let oa = offsets(&a_only.iter().map(|&p| weight(na, p)).collect::<Vec<_>>());
        let ob = offsets(&b_only.iter().map(|&q| weight(nb, q)).collect::<Vec<_>>());
        let sa = offsets(&shared.iter().map(|&(p, _)| weight(na, p)).collect::<Vec<_>>());
        let sb = offsets(&shared.iter().map(|&(_, q)| weight(nb, q)).collect::<Vec<_>>());
        let mut data = Vec::with_capacity(oa.len() * ob.len());
        for &ra in &oa {
            for &rb in &ob {
                let mut acc = ZERO;
                for (x, y) in sa.iter().zip(&sb) {
                    acc += self.data[ra + x] * other.data[rb + y];
                }
                data.push(acc);
            }
        }
        let labels = a_only
            .iter()
            .map(|&p| self.labels[p])
            .chain(b_only.iter().map(|&q| other.labels[q]))
            .collect();
        Labeled { labels, data }
    }

    fn shared_count(&self, other: &Labeled) -> usize {
        self.labels.iter().filter(|l| other.labels.contains(l)).count()
    }
}

/// Contract a diagram under a model with the default leg budget.
pub fn evaluate(d: &Diagram, model: &Model) -> Result<Tensor, SemanticsError> {
    evaluate_with_budget(d, model, leg_budget())
}

/// Contract a diagram; result legs are (outputs…, inputs…).
pub fn evaluate_with_budget(d: &Diagram, model: &Model, budget: usize) -> Result<Tensor, SemanticsError> {
    d.check()?;
    let legs = d.boundary_count();
    if legs > budget {
        return Err(SemanticsError::LegBudget { legs, budget });
    }
    // Node tensors with one label per incident edge end.
    let mut node_labels: std::collections::HashMap<&str, Vec<usize>> =
        d.nodes().keys().map(|k| (k.as_str(), Vec::new())).collect();
    for (i, (a, b)) in d.edges().iter().enumerate() {
        for e in [a, b] {
            if let Endpoint::Node(id) = e {
                node_labels.get_mut(id.as_str()).expect("validated").push(i);
            }
        }
    }
    let mut pool = Vec::with_capacity(d.nodes().len());
    for id in d.node_ids() {
        let labels = node_labels.remove(id).expect("node present");
        let t = generator_tensor(&d.nodes()[id], labels.len(), model)?;
        pool.push(
            Labeled {
                labels,
                data: t.data().to_vec(),
            }
            .trace_repeats(),
        );
    }
    let result = contract_all(pool)?;
    let loops = 2f64.powi(d.loops() as i32);

    // Scatter into boundary order.
    let order: Vec<&String> = d.outputs().iter().chain(d.inputs()).collect();
    let pos_of = |b: &str| order.iter().position(|x| x.as_str() == b).expect("declared boundary");
    let n = order.len();
    let mut label_bits: Vec<Option<usize>> = vec![None; result.labels.len()];
    let mut wires: Vec<(usize, usize)> = Vec::new();
    for (i, (a, b)) in d.edges().iter().enumerate() {
        match (a, b) {
            (Endpoint::Boundary(x), Endpoint::Boundary(y)) => wires.push((pos_of(x), pos_of(y))),
            (Endpoint::Boundary(x), _) | (_, Endpoint::Boundary(x)) => {
                let slot = result.labels.iter().position(|&l| l == i).expect("open label");
                label_bits[slot] = Some(pos_of(x));
            }
            _ => {}
        }
    }
    let rl = result.labels.len();
    let mut data = vec![ZERO; 1 << n];
    for (idx, out) in data.iter_mut().enumerate() {
        let bit = |p: usize| (idx >> (n - 1 - p)) & 1;
        if wires.iter().any(|&(p, q)| bit(p) != bit(q)) {
            continue;
        }
        let mut src = 0;
        for (j, b) in label_bits.iter().enumerate() {
            src |= bit(b.expect("every open label meets a boundary")) << (rl - 1 - j);
        }
        *out = result.data[src] * loops;
    }
    Ok(Tensor::from_raw(d.outputs().len(), d.inputs().len(), data))
}

/// Greedy pairwise contraction: at each step contract the connected pair
/// with the smallest result, then take outer products of what remains.
fn contract_all(mut pool: Vec<Labeled>) -> Result<Labeled, SemanticsError> {
    loop {
        let mut best: Option<(usize, usize, usize, usize)> = None;
        for i in 0..pool.len() {
            for j in i + 1..pool.len() {
                let s = pool[i].shared_count(&pool[j]);
                if s == 0 {
                    continue;
                }
                let res = pool[i].labels.len() + pool[j].labels.len() - 2 * s;
                let cost = res + s;
                let key = (res, cost, i, j);
                if best.is_none_or(|b| (key.0, key.1) < (b.0, b.1)) {
                    best = Some(key);
                }
            }
        }
        let Some((res, _, i, j)) = best else { break };
        if res > INTERMEDIATE_LEG_CAP {
            return Err(SemanticsError::LegBudget {
                legs: res,
                budget: INTERMEDIATE_LEG_CAP,
            });
        }
        let b = pool.swap_remove(j);
        let a = pool.swap_remove(i);
        pool.push(a.contract(&b));
    }
    pool.sort_by_key(|t| t.labels.len());
    let mut acc = Labeled {
        labels: vec![],
        data: vec![ONE],
    };
    for t in pool {
        if acc.labels.len() + t.labels.len() > INTERMEDIATE_LEG_CAP {
            return Err(SemanticsError::LegBudget {
                legs: acc.labels.len() + t.labels.len(),
                budget: INTERMEDIATE_LEG_CAP,
            });
        }
        acc = acc.contract(&t);
    }
    Ok(acc)
}

/// Outcome of comparing two tensors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Comparison {
    Equal,
    /// `t1 = λ·t2`.
    Proportional(C64),
    /// Largest entrywise deviation.
    Different(f64),
}

/// Compare with a relative tolerance `tol·max(1, largest magnitude)`.
pub fn compare(t1: &Tensor, t2: &Tensor, tol: f64) -> Result<Comparison, SemanticsError> {
    if t1.legs() != t2.legs() {
        return Err(SemanticsError::ShapeMismatch(format!(
            "{} legs against {}",
            t1.legs(),
            t2.legs()
        )));
    }
    let (m1, m2) = (t1.max_abs(), t2.max_abs());
    let bound = tol * m1.max(m2).max(1.0);
    let dev = t1.max_abs_diff(t2);
    if dev <= bound {
        return Ok(Comparison::Equal);
    }
    if m1 == 0.0 || m2 == 0.0 {
        return Ok(Comparison::Different(dev));
    }
    let (p, _) = t2
        .data()
        .iter()
        .enumerate()
        .fold((0, -1.0), |(bi, bm), (i, z)| if z.norm() > bm { (i, z.norm()) } else { (bi, bm) });
    let lambda = t1.data()[p] / t2.data()[p];
    let scaled_dev = t1
        .data()
        .iter()
        .zip(t2.data())
        .map(|(a, b)| (a - lambda * b).norm())
        .fold(0.0, f64::max);
    if scaled_dev <= bound {
        Ok(Comparison::Proportional(lambda))
    } else {
        Ok(Comparison::Different(dev))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::Builder;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn green_scalar_values() {
        assert!((green_scalar(0.0) - c(SQRT_2, 0.0)).norm() < 1e-15);
        assert!((green_scalar(FRAC_PI_2) - cis(FRAC_PI_4)).norm() < 1e-15);
        assert_eq!(green_scalar(PI), ZERO);
    }

    #[test]
    fn compare_cases() {
        let t = Tensor::identity(1);
        assert_eq!(compare(&t, &t, 1e-12).unwrap(), Comparison::Equal);
        let half = t.scaled(c(0.5, 0.0));
        assert_eq!(compare(&half, &t, 1e-12).unwrap(), Comparison::Proportional(c(0.5, 0.0)));
        let z = Tensor::from_raw(1, 1, vec![ZERO; 4]);
        assert_eq!(compare(&z, &z, 1e-12).unwrap(), Comparison::Equal);
        assert!(matches!(compare(&z, &t, 1e-12).unwrap(), Comparison::Different(_)));
        let x = Tensor::from_real_matrix(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert!(matches!(compare(&x, &t, 1e-12).unwrap(), Comparison::Different(d) if d == 1.0));
        assert!(compare(&t, &Tensor::scalar(ONE), 1e-12).is_err());
    }

    #[test]
    fn empty_diagram_is_one() {
        let t = evaluate(&Diagram::empty(), &Model::nu()).unwrap();
        assert_eq!(t, Tensor::scalar(ONE));
    }

    #[test]
    fn self_loop_traces() {
        // A degree-3 white dot with a self-loop and one output: under β this
        // is the trace over the looped pair, |0> + |1>.
        let mut b = Builder::new();
        let w = b.w();
        b.edge(&w, &w);
        b.output_from(&w);
        let t = evaluate(&b.build().unwrap(), &Model::beta()).unwrap();
        assert_eq!(t.data(), [ONE, ONE]);
    }

    #[test]
    fn unlicensed_kinds() {
        let mut b = Builder::new();
        let x = b.x(0.0);
        b.output_from(&x);
        let d = b.build().unwrap();
        assert!(matches!(evaluate(&d, &Model::beta()), Err(SemanticsError::Unlicensed { .. })));
    }

    #[test]
    fn budget_enforced() {
        let mut b = Builder::new();
        let z = b.z(0.0);
        for _ in 0..5 {
            b.output_from(&z);
        }
        let d = b.build().unwrap();
        assert!(matches!(
            evaluate_with_budget(&d, &Model::nu(), 4),
            Err(SemanticsError::LegBudget { legs: 5, budget: 4 })
        ));
    }
}

//! Closed-form side computations for the (Euler) and (Scale_ν) rules.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;

use super::RuleError;
use crate::diagram::canonical_phase;
use crate::semantics::cis;

/// Phases for rewriting a Hadamard-led three-spider chain into Z·X·Z form
/// with a global phase e^{iγ}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub z1: C64,
    pub z2: C64,
    pub z3: C64,
    pub phi1: f64,
    pub phi2: f64,
    pub phi3: f64,
    pub gamma: f64,
}

/// Argument with arg(0) = 0. Components below 1e-15 count as zero.
pub fn arg0(z: C64) -> f64 {
    if z.norm() < 1e-15 {
        0.0
    } else {
        z.arg()
    }
}

/// z1 = cos δ + i sin θ, z2 = cos θ + i sin δ, z3 = |z1| + i|z2|;
/// φ1 = arg z1 + arg z2 + π/2, φ2 = 2 arg z3, φ3 = arg z1 − arg z2 + π/2,
/// γ = θ − arg z1 − arg z3.
pub fn euler_angles(theta: f64, delta: f64) -> EulerAngles {
    let (ct, st) = (cis(theta).re, cis(theta).im);
    let (cd, sd) = (cis(delta).re, cis(delta).im);
    let z1 = C64::new(cd, st);
    let z2 = C64::new(ct, sd);
    let z3 = C64::new(z1.norm(), z2.norm());
    let (a1, a2, a3) = (arg0(z1), arg0(z2), arg0(z3));
    EulerAngles {
        z1,
        z2,
        z3,
        phi1: a1 + a2 + FRAC_PI_2,
        phi2: 2.0 * a3,
        phi3: a1 - a2 + FRAC_PI_2,
        gamma: theta - a1 - a3,
    }
}

/// Whether θ lies within 1e-9 of an odd multiple of π.
pub fn is_odd_multiple_of_pi(theta: f64) -> bool {
    (canonical_phase(theta) - PI).abs() < 1e-9
}

/// λ = log₂(sec²(θ/2)) − 1, undefined at odd multiples of π.
pub fn scale_nu_lambda(theta: f64) -> Result<f64, RuleError> {
    if is_odd_multiple_of_pi(theta) {
        return Err(RuleError::Domain(format!(
            "θ = {theta} is an odd multiple of π"
        )));
    }
    let c = (theta / 2.0).cos();
    Ok(-(c * c).log2() - 1.0)
}

//! Dense qubit tensors with legs ordered (outputs…, inputs…), first leg most
//! significant.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;

use super::SemanticsError;

#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    outputs: usize,
    inputs: usize,
    data: Vec<C64>,
}

impl Tensor {
    pub fn new(outputs: usize, inputs: usize, data: Vec<C64>) -> Result<Self, SemanticsError> {
        let legs = outputs + inputs;
        if data.len() != 1usize << legs {
            return Err(SemanticsError::ShapeMismatch(format!(
                "{} entries for {legs} legs",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SemanticsError::NonFinite);
        }
        Ok(Tensor {
            outputs,
            inputs,
            data,
        })
    }

    pub(crate) fn from_raw(outputs: usize, inputs: usize, data: Vec<C64>) -> Self {
        debug_assert_eq!(data.len(), 1usize << (outputs + inputs));
        Tensor {
            outputs,
            inputs,
            data,
        }
    }

    pub fn scalar(z: C64) -> Self {
        Tensor::from_raw(0, 0, vec![z])
    }

    /// Build from a matrix with 2^outputs rows and 2^inputs columns.
    pub fn from_matrix(rows: &[Vec<C64>]) -> Result<Self, SemanticsError> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if !r.is_power_of_two() || !c.is_power_of_two() || rows.iter().any(|x| x.len() != c) {
            return Err(SemanticsError::ShapeMismatch(format!("{r}×{c} matrix")));
        }
        let data = rows.iter().flatten().copied().collect();
        Tensor::new(r.trailing_zeros() as usize, c.trailing_zeros() as usize, data)
    }

    /// Real matrix convenience.
    pub fn from_real_matrix(rows: &[&[f64]]) -> Result<Self, SemanticsError> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Tensor::from_matrix(&rows)
    }

    pub fn identity(n: usize) -> Self {
        let dim = 1usize << n;
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0, 0.0);
        }
        Tensor::from_raw(n, n, data)
    }

    /// Diagonal operator.
    pub fn diagonal(diag: &[C64]) -> Result<Self, SemanticsError> {
        let dim = diag.len();
        let mut rows = vec![vec![C64::new(0.0, 0.0); dim]; dim];
        for (i, d) in diag.iter().enumerate() {
            rows[i][i] = *d;
        }
        Tensor::from_matrix(&rows)
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn legs(&self) -> usize {
        self.outputs + self.inputs
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    /// Entry at (row, column) of the matrix view.
    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.data[(row << self.inputs) | col]
    }

    pub fn scaled(&self, z: C64) -> Tensor {
        Tensor::from_raw(
            self.outputs,
            self.inputs,
            self.data.iter().map(|x| x * z).collect(),
        )
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation; legs must agree.
    pub fn max_abs_diff(&self, other: &Tensor) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `self ∘ rhs`: apply `rhs` first.
    pub fn compose(&self, rhs: &Tensor) -> Result<Tensor, SemanticsError> {
        if self.inputs != rhs.outputs {
            return Err(SemanticsError::ShapeMismatch(format!(
                "cannot compose {} inputs with {} outputs",
                self.inputs, rhs.outputs
            )));
        }
        let (r, m, c) = (1usize << self.outputs, 1usize << self.inputs, 1usize << rhs.inputs);
        let mut data = vec![C64::new(0.0, 0.0); r * c];
        for i in 0..r {
            for k in 0..m {
                let a = self.data[i * m + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..c {
                    data[i * c + j] += a * rhs.data[k * c + j];
                }
            }
        }
        Ok(Tensor::from_raw(self.outputs, rhs.inputs, data))
    }

    /// Tensor product with legs (outputs of self, outputs of other, inputs
    /// of self, inputs of other).
    pub fn kron(&self, other: &Tensor) -> Tensor {
        let (r1, c1) = (1usize << self.outputs, 1usize << self.inputs);
        let (r2, c2) = (1usize << other.outputs, 1usize << other.inputs);
        let mut data = vec![C64::new(0.0, 0.0); r1 * r2 * c1 * c2];
        let cols = c1 * c2;
        for i1 in 0..r1 {
            for i2 in 0..r2 {
                for j1 in 0..c1 {
                    let a = self.data[i1 * c1 + j1];
                    for j2 in 0..c2 {
                        data[(i1 * r2 + i2) * cols + j1 * c2 + j2] = a * other.data[i2 * c2 + j2];
                    }
                }
            }
        }
        Tensor::from_raw(self.outputs + other.outputs, self.inputs + other.inputs, data)
    }

    /// Text dump: one line per entry, `bitstring re im`, in lexicographic
    /// bitstring order, numbers with 17 significant digits.
    pub fn dump(&self) -> String {
        let legs = self.legs();
        let mut s = String::new();
        for (i, z) in self.data.iter().enumerate() {
            for b in (0..legs).rev() {
                s.push(if (i >> b) & 1 == 1 { '1' } else { '0' });
            }
            let _ = writeln!(s, " {} {}", fmt_sig17(z.re), fmt_sig17(z.im));
        }
        s
    }

    /// Read a text dump back. The leg split is not recorded, so every leg
    /// comes back as an output.
    pub fn parse_dump(text: &str) -> Result<Tensor, SemanticsError> {
        let bad = |line: usize, message: String| SemanticsError::ShapeMismatch(format!("dump line {line}: {message}"));
        let mut legs = None;
        let mut data = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            if raw.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = raw.split(' ').collect();
            let (bits, re, im) = match fields.as_slice() {
                [bits, re, im] => (*bits, *re, *im),
                _ => return Err(bad(i + 1, "expected `bitstring re im`".into())),
            };
            if bits.chars().any(|c| c != '0' && c != '1') {
                return Err(bad(i + 1, format!("bad bitstring \"{bits}\"")));
            }
            if *legs.get_or_insert(bits.len()) != bits.len() {
                return Err(bad(i + 1, "bitstrings differ in length".into()));
            }
            let index = if bits.is_empty() { 0 } else { usize::from_str_radix(bits, 2).expect("checked binary") };
            if index != data.len() {
                return Err(bad(i + 1, "entries out of order".into()));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| bad(i + 1, format!("{s}: {e}")));
            data.push(C64::new(num(re)?, num(im)?));
        }
        let legs = legs.ok_or_else(|| bad(0, "empty dump".into()))?;
        Tensor::new(legs, 0, data)
    }
}

/// Shortest %g-style rendering with 17 significant digits; zero (of either
/// sign) prints as "0".
pub fn fmt_sig17(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m.replace('.', "")),
        None => (false, mantissa.replace('.', "")),
    };
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if (-5..17).contains(&exp) {
        if exp >= 0 {
            let int_len = exp as usize + 1;
            out.push_str(&digits[..int_len]);
            let frac = digits[int_len..].trim_end_matches('0');
            if !frac.is_empty() {
                out.push('.');
                out.push_str(frac);
            }
        } else {
            out.push_str("0.");
            for _ in 0..(-exp - 1) {
                out.push('0');
            }
            out.push_str(digits.trim_end_matches('0'));
        }
    } else {
        out.push_str(&digits[..1]);
        let frac = digits[1..].trim_end_matches('0');
        if !frac.is_empty() {
            out.push('.');
            out.push_str(frac);
        }
        let _ = write!(out, "e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs());
    }
    out
}

//! Photon-number representation.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde_json::{json, Value};

use super::{hermitize, p_inf_truncated, parse_tail, validate_truncated, PInfEstimate};
use crate::error::{Error, Result};
use crate::format;

/// Truncated density matrix a_nn′ with n, n′ ∈ [0, D].
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    cutoff: usize,
    matrix: DMatrix<Complex64>,
    declared_tail_bound: f64,
}

impl FockState {
    pub fn new(
        cutoff: usize,
        matrix: DMatrix<Complex64>,
        declared_tail_bound: f64,
    ) -> Result<Self> {
        let n = cutoff + 1;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::WrongDimension {
                expected: n,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        validate_truncated(&matrix, declared_tail_bound)?;
        Ok(Self {
            cutoff,
            matrix,
            declared_tail_bound,
        })
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn declared_tail_bound(&self) -> f64 {
        self.declared_tail_bound
    }

    pub fn to_json(&self) -> Value {
        json!({
            "representation": "fock",
            "cutoff": self.cutoff,
            "declared_tail_bound": format::num(self.declared_tail_bound),
            "matrix": format::matrix_rows(&self.matrix),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let cutoff = v
            .get("cutoff")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing integer \"cutoff\"".into()))?
            as usize;
        let (rows, cols, entries) = format::parse_matrix_rows(
            v.get("matrix")
                .ok_or_else(|| Error::Parse("missing \"matrix\"".into()))?,
        )?;
        Self::new(
            cutoff,
            DMatrix::from_row_slice(rows, cols, &entries),
            parse_tail(v)?,
        )
    }
}

/// |n⟩⟨n| truncated at D ≥ n.
pub fn fock_number(n: usize, cutoff: usize) -> Result<FockState> {
    if n > cutoff {
        return Err(Error::InvalidParameter(format!(
            "photon number {} exceeds cutoff {}",
            n, cutoff
        )));
    }
    let mut m = DMatrix::zeros(cutoff + 1, cutoff + 1);
    m[(n, n)] = Complex64::new(1.0, 0.0);
    FockState::new(cutoff, m, 0.0)
}

/// Thermal state a_nn = n̄ⁿ/(n̄+1)^{n+1}; discarded mass (n̄/(n̄+1))^{D+1}.
pub fn thermal_fock(nbar: f64, cutoff: usize) -> Result<FockState> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "nbar must be >= 0, got {}",
            nbar
        )));
    }
    let ratio = nbar / (nbar + 1.0);
    let mut m = DMatrix::zeros(cutoff + 1, cutoff + 1);
    let mut p = 1.0 / (nbar + 1.0);
    for n in 0..=cutoff {
        m[(n, n)] = Complex64::new(p, 0.0);
        p *= ratio;
    }
    FockState::new(cutoff, m, ratio.powi(cutoff as i32 + 1))
}

/// Coherent state |α⟩ truncated at D.
///
/// Amplitudes are computed in log space. The declared tail bounds the
/// Poisson mass beyond D by a geometric series, valid once D + 2 > |α|².
pub fn coherent_fock(alpha: Complex64, cutoff: usize) -> Result<FockState> {
    let mean = alpha.norm_sqr();
    if !mean.is_finite() {
        return Err(Error::InvalidParameter("alpha must be finite".into()));
    }
    if (cutoff + 2) as f64 <= mean {
        return Err(Error::InvalidParameter(format!(
            "cutoff {} is too small for |alpha|^2 = {}",
            cutoff, mean
        )));
    }
    let (r, phase) = alpha.to_polar();
    let mut log_fact = 0.0;
    let mut psi = DVector::<Complex64>::zeros(cutoff + 1);
    for n in 0..=cutoff {
        if n > 0 {
            log_fact += (n as f64).ln();
        }
        let log_mag = if n == 0 {
            -mean / 2.0
        } else if r == 0.0 {
            f64::NEG_INFINITY
        } else {
            -mean / 2.0 + n as f64 * r.ln() - 0.5 * log_fact
        };
        psi[n] = Complex64::from_polar(log_mag.exp(), n as f64 * phase);
    }
    // Poisson mass at D + 1 times 1/(1 − |α|²/(D + 2)).
    let k = (cutoff + 1) as f64;
    let log_next = if r == 0.0 {
        f64::NEG_INFINITY
    } else {
        -mean + k * mean.ln() - (log_fact + k.ln())
    };
    let tail = log_next.exp() / (1.0 - mean / (k + 1.0));
    FockState::new(cutoff, hermitize(&psi * psi.adjoint()), tail)
}

/// P_∞ = √(Σ|a_nn′|²) over the truncated block.
pub fn p_inf_fock(s: &FockState) -> Result<PInfEstimate> {
    p_inf_truncated(&s.matrix, s.declared_tail_bound)
}

//! P_∞ for normalizable infinite-dimensional states.
//!
//! Discrete representations (OAM, photon number) are truncated at a cutoff D
//! and carry a caller-declared bound on the discarded mass. Continuous
//! representations (angle, position/momentum, phase space) are sampled on
//! uniform grids and integrated with plain Riemann sums.

mod cv;
mod fock;
mod oam;
mod wigner;

pub use cv::{
    build_cv_grid, commutator_check, commutator_matrix, p_inf_cv, CommutatorCheck, CvGrid, CvState,
    Representation,
};
pub use fock::{coherent_fock, fock_number, p_inf_fock, thermal_fock, FockState};
pub use oam::{geometric_oam, oam_to_angle, p_inf_angle, p_inf_oam, AngularCoherence, OamState};
pub use wigner::{
    p_inf_wigner, thermal_wigner, wigner_from_cv, wigner_from_cv_with, Interpolation, WignerSamples,
};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::format;
use crate::state::hermitian_eigen;

/// Hermiticity tolerance for truncated and sampled states.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;
/// Most negative eigenvalue accepted as rounding.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// A P_∞ value with a rigorous bound on the truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PInfEstimate {
    pub value: f64,
    pub error_bound: f64,
}

impl PInfEstimate {
    pub fn to_json(&self) -> Value {
        json!({
            "value": format::num(self.value),
            "error_bound": format::num(self.error_bound),
        })
    }
}

pub(crate) fn check_finite(m: &DMatrix<Complex64>) -> Result<()> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

pub(crate) fn check_hermitian(m: &DMatrix<Complex64>, tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let mut worst = (0, 0, 0.0);
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
            if dev > worst.2 {
                worst = (i, j, dev);
            }
        }
    }
    if worst.2 > tol {
        return Err(Error::NotHermitian {
            row: worst.0,
            col: worst.1,
            deviation: worst.2,
        });
    }
    Ok(())
}

pub(crate) fn check_psd(m: &DMatrix<Complex64>) -> Result<()> {
    // A Cholesky factor of m + εI certifies λ_min > −ε; the eigensolver only
    // runs to report the offending eigenvalue.
    let n = m.nrows();
    let shifted = m + DMatrix::<Complex64>::identity(n, n) * Complex64::new(PSD_TOLERANCE, 0.0);
    if shifted.cholesky().is_some() {
        return Ok(());
    }
    let (values, _) = hermitian_eigen(m)?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -PSD_TOLERANCE {
        return Err(Error::NotPSD {
            min_eigenvalue: min,
        });
    }
    Ok(())
}

pub(crate) fn trace_re(m: &DMatrix<Complex64>) -> f64 {
    (0..m.nrows()).map(|i| m[(i, i)].re).sum()
}

pub(crate) fn hermitize(m: DMatrix<Complex64>) -> DMatrix<Complex64> {
    (&m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Shared validation for truncated discrete-basis states.
pub(crate) fn validate_truncated(m: &DMatrix<Complex64>, tail: f64) -> Result<()> {
    if !(tail >= 0.0) || !tail.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "declared tail bound must be a finite non-negative number, got {}",
            tail
        )));
    }
    check_finite(m)?;
    check_hermitian(m, HERMITIAN_TOLERANCE)?;
    let tr = trace_re(m);
    let tolerance = tail + 1e-12;
    if (tr - 1.0).abs() > tolerance {
        return Err(Error::NotNormalized {
            total: tr,
            tolerance,
        });
    }
    check_psd(m)
}

/// √(Σ|c|²) with the error of the missing mass propagated through the root.
pub(crate) fn p_inf_truncated(m: &DMatrix<Complex64>, tail: f64) -> Result<PInfEstimate> {
    let sum: f64 = m.iter().map(|z| z.norm_sqr()).sum();
    if sum == 0.0 {
        return Err(Error::EmptyState);
    }
    let value = sum.sqrt();
    let error_bound = if value > 0.0 {
        tail / (2.0 * value)
    } else {
        tail.sqrt()
    };
    Ok(PInfEstimate { value, error_bound })
}

pub(crate) fn parse_tail(v: &Value) -> Result<f64> {
    match v.get("declared_tail_bound") {
        None => Ok(0.0),
        Some(x) => x
            .as_f64()
            .ok_or_else(|| Error::Parse("\"declared_tail_bound\" must be a number".into())),
    }
}

/// One rung of a convergence ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct Rung {
    pub cutoff: usize,
    pub value: f64,
    /// `value` minus the previous rung's value.
    pub difference: Option<f64>,
    /// Extra per-rung diagnostics, serialized as-is.
    pub extra: Vec<(&'static str, f64)>,
}

/// Values of one estimator at increasing cutoffs.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceLadder {
    pub rungs: Vec<Rung>,
}

impl ConvergenceLadder {
    pub fn push(&mut self, cutoff: usize, value: f64, extra: Vec<(&'static str, f64)>) {
        let difference = self.rungs.last().map(|r| value - r.value);
        self.rungs.push(Rung {
            cutoff,
            value,
            difference,
            extra,
        });
    }

    pub fn last_value(&self) -> Option<f64> {
        self.rungs.last().map(|r| r.value)
    }

    /// Magnitude of the last successive difference: the ladder's error estimate.
    pub fn error_estimate(&self) -> Option<f64> {
        self.rungs.last().and_then(|r| r.difference).map(f64::abs)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rungs
                .iter()
                .map(|r| {
                    let mut obj = serde_json::Map::new();
                    obj.insert("cutoff".into(), json!(r.cutoff));
                    obj.insert("value".into(), format::num(r.value));
                    obj.insert(
                        "difference".into(),
                        r.difference.map(format::num).unwrap_or(Value::Null),
                    );
                    for (k, v) in &r.extra {
                        obj.insert((*k).into(), format::num(*v));
                    }
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// Reads an OAM, Fock or CV state from its tagged JSON form.
pub fn read_infdim_state(text: &str) -> Result<InfdimState> {
    let v = format::parse_json(text)?;
    let tag = v
        .get("representation")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Parse("missing \"representation\" tag".into()))?;
    match tag {
        "oam" => Ok(InfdimState::Oam(OamState::from_json(&v)?)),
        "fock" => Ok(InfdimState::Fock(FockState::from_json(&v)?)),
        "position" | "momentum" => Ok(InfdimState::Cv(CvState::from_json(&v)?)),
        other => Err(Error::Parse(format!("unknown representation '{}'", other))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InfdimState {
    Oam(OamState),
    Fock(FockState),
    Cv(CvState),
}

impl InfdimState {
    pub fn to_json(&self) -> Value {
        match self {
            InfdimState::Oam(s) => s.to_json(),
            InfdimState::Fock(s) => s.to_json(),
            InfdimState::Cv(s) => s.to_json(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_differences() {
        let mut l = ConvergenceLadder::default();
        l.push(1, 0.5, vec![]);
        l.push(2, 0.75, vec![("raw", 1.0)]);
        assert_eq!(l.rungs[0].difference, None);
        assert_eq!(l.rungs[1].difference, Some(0.25));
        assert_eq!(l.error_estimate(), Some(0.25));
        let j = l.to_json();
        assert_eq!(j[1]["raw"].as_f64(), Some(1.0));
        assert!(j[0]["difference"].is_null());
    }

    #[test]
    fn truncated_validation() {
        let mut m = DMatrix::<Complex64>::zeros(2, 2);
        m[(0, 0)] = Complex64::new(0.9, 0.0);
        assert!(matches!(
            validate_truncated(&m, 0.0),
            Err(Error::NotNormalized { .. })
        ));
        assert!(validate_truncated(&m, 0.1).is_ok());
        assert!(validate_truncated(&m, -1.0).is_err());
        m[(0, 1)] = Complex64::new(0.0, 1e-6);
        assert!(matches!(
            validate_truncated(&m, 0.1),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn error_bound_propagation() {
        let mut m = DMatrix::<Complex64>::zeros(2, 2);
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        let e = p_inf_truncated(&m, 0.01).unwrap();
        assert_eq!(e.value, 0.5);
        assert!((e.error_bound - 0.01).abs() < 1e-15);
        let z = DMatrix::<Complex64>::zeros(2, 2);
        assert_eq!(p_inf_truncated(&z, 0.0), Err(Error::EmptyState));
    }
}

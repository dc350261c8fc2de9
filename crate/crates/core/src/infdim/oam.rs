//! Orbital angular momentum and its Fourier conjugate, the angle.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};
use std::f64::consts::PI;

use super::{
    check_finite, check_hermitian, hermitize, p_inf_truncated, parse_tail, trace_re,
    validate_truncated, PInfEstimate, HERMITIAN_TOLERANCE,
};
use crate::error::{Error, Result};
use crate::format;

/// Truncated OAM density matrix c_ll′ with l, l′ ∈ [−D, D].
///
/// Row and column `l + D` hold OAM index `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct OamState {
    cutoff: usize,
    matrix: DMatrix<Complex64>,
    declared_tail_bound: f64,
}

impl OamState {
    pub fn new(
        cutoff: usize,
        matrix: DMatrix<Complex64>,
        declared_tail_bound: f64,
    ) -> Result<Self> {
        let n = 2 * cutoff + 1;
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

    /// |ψ⟩⟨ψ| for ψ = Σ a_l |l⟩, given as `(l, a_l)` pairs.
    pub fn pure(cutoff: usize, amplitudes: &[(i64, Complex64)]) -> Result<Self> {
        let n = 2 * cutoff + 1;
        let mut psi = nalgebra::DVector::<Complex64>::zeros(n);
        for &(l, a) in amplitudes {
            if l.unsigned_abs() as usize > cutoff {
                return Err(Error::InvalidParameter(format!(
                    "OAM index {} outside [-{}, {}]",
                    l, cutoff, cutoff
                )));
            }
            psi[(l + cutoff as i64) as usize] += a;
        }
        Self::new(cutoff, hermitize(&psi * psi.adjoint()), 0.0)
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

    /// c_ll′, or zero outside the truncation.
    pub fn coefficient(&self, l: i64, lp: i64) -> Complex64 {
        let d = self.cutoff as i64;
        if l.abs() > d || lp.abs() > d {
            return Complex64::new(0.0, 0.0);
        }
        self.matrix[((l + d) as usize, (lp + d) as usize)]
    }

    pub fn to_json(&self) -> Value {
        json!({
            "representation": "oam",
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
        let m = DMatrix::from_row_slice(rows, cols, &entries);
        Self::new(cutoff, m, parse_tail(v)?)
    }
}

/// Geometric distribution over l ≥ 0: c_ll = (1 − q)q^l for 0 ≤ l ≤ D.
///
/// The discarded mass is q^{D+1}, which also bounds the discarded Σ|c|².
pub fn geometric_oam(q: f64, cutoff: usize) -> Result<OamState> {
    if !(0.0..1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!(
            "q must lie in [0, 1), got {}",
            q
        )));
    }
    let n = 2 * cutoff + 1;
    let mut m = DMatrix::zeros(n, n);
    let mut weight = 1.0 - q;
    for l in 0..=cutoff {
        m[(l + cutoff, l + cutoff)] = Complex64::new(weight, 0.0);
        weight *= q;
    }
    OamState::new(cutoff, m, q.powi(cutoff as i32 + 1))
}

/// P_∞ = √(Σ|c_ll′|²) over the truncated block.
pub fn p_inf_oam(s: &OamState) -> Result<PInfEstimate> {
    p_inf_truncated(&s.matrix, s.declared_tail_bound)
}

/// Angular coherence function W(θ_a, θ_b) on θ_a = 2πa/M.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularCoherence {
    samples: DMatrix<Complex64>,
    tolerance: f64,
}

impl AngularCoherence {
    pub const DEFAULT_TOLERANCE: f64 = 1e-6;

    pub fn new(samples: DMatrix<Complex64>) -> Result<Self> {
        Self::with_tolerance(samples, Self::DEFAULT_TOLERANCE)
    }

    /// `tolerance` bounds |(2π/M)Σ_a W(θ_a, θ_a) − 1|.
    pub fn with_tolerance(samples: DMatrix<Complex64>, tolerance: f64) -> Result<Self> {
        if samples.nrows() == 0 {
            return Err(Error::EmptyState);
        }
        check_finite(&samples)?;
        check_hermitian(&samples, HERMITIAN_TOLERANCE)?;
        let total = 2.0 * PI / samples.nrows() as f64 * trace_re(&samples);
        if !((total - 1.0).abs() <= tolerance) {
            return Err(Error::NotNormalized { total, tolerance });
        }
        Ok(Self { samples, tolerance })
    }

    /// Samples `w(θ, θ′)` on an M×M grid.
    pub fn from_fn(grid_size: usize, w: impl Fn(f64, f64) -> Complex64) -> Result<Self> {
        let theta = |a: usize| 2.0 * PI * a as f64 / grid_size as f64;
        Self::new(DMatrix::from_fn(grid_size, grid_size, |a, b| {
            w(theta(a), theta(b))
        }))
    }

    pub fn grid_size(&self) -> usize {
        self.samples.nrows()
    }

    pub fn samples(&self) -> &DMatrix<Complex64> {
        &self.samples
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }
}

/// W(θ, θ′) = (1/2π) Σ c_ll′ e^{i(lθ − l′θ′)} sampled on the M-point grid.
///
/// Evaluated as (1/2π)·E C E† with E_al = e^{ilθ_a}.
pub fn oam_to_angle(s: &OamState, grid_size: usize) -> Result<AngularCoherence> {
    let n = 2 * s.cutoff + 1;
    let required = 2 * n;
    if grid_size < required {
        return Err(Error::GridTooCoarse {
            grid: grid_size,
            required,
        });
    }
    let d = s.cutoff as i64;
    let e = DMatrix::from_fn(grid_size, n, |a, k| {
        let l = k as i64 - d;
        // Reduce l·a mod M before scaling so the phase stays accurate.
        let r = (l * a as i64).rem_euclid(grid_size as i64);
        Complex64::from_polar(1.0, 2.0 * PI * r as f64 / grid_size as f64)
    });
    let w = &e * &s.matrix * e.adjoint() * Complex64::new(1.0 / (2.0 * PI), 0.0);
    AngularCoherence::with_tolerance(hermitize(w), s.declared_tail_bound + 1e-10)
}

/// √((2π/M)² Σ_ab |W(θ_a, θ_b)|²).
pub fn p_inf_angle(w: &AngularCoherence) -> Result<f64> {
    let h = 2.0 * PI / w.grid_size() as f64;
    let sum: f64 = w.samples.iter().map(|z| z.norm_sqr()).sum();
    if sum == 0.0 {
        return Err(Error::EmptyState);
    }
    Ok(h * sum.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn pure_superposition_is_one() {
        let s = OamState::pure(
            1,
            &[(-1, Complex64::new(H, 0.0)), (1, Complex64::new(H, 0.0))],
        )
        .unwrap();
        let p = p_inf_oam(&s).unwrap();
        assert!((p.value - 1.0).abs() < 1e-12);
        assert_eq!(p.error_bound, 0.0);
        assert!((s.coefficient(-1, 1).re - 0.5).abs() < 1e-15);
        assert_eq!(s.coefficient(5, 0), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn geometric_state() {
        let s = geometric_oam(0.5, 60).unwrap();
        let p = p_inf_oam(&s).unwrap();
        assert!((p.value - (1.0f64 / 3.0).sqrt()).abs() < 1e-6);
        assert!(p.error_bound < 1e-17);
    }

    #[test]
    fn maximally_mixed_truncation() {
        let d = 50;
        let n = 2 * d + 1;
        let m = DMatrix::from_diagonal_element(n, n, Complex64::new(1.0 / n as f64, 0.0));
        let s = OamState::new(d, m, 0.0).unwrap();
        assert!((p_inf_oam(&s).unwrap().value - 1.0 / 101f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn truncation_monotone_in_cutoff() {
        let mut last = 0.0;
        for d in [2, 4, 8, 16, 32] {
            let s = geometric_oam(0.5, d).unwrap();
            let p = p_inf_oam(&s).unwrap();
            assert!(p.value >= last);
            let s2 = geometric_oam(0.5, 2 * d).unwrap();
            let p2 = p_inf_oam(&s2).unwrap();
            assert!((p2.value - p.value).abs() <= s.declared_tail_bound());
            last = p.value;
        }
    }

    #[test]
    fn single_mode_angle() {
        let w = AngularCoherence::from_fn(64, |t, tp| {
            Complex64::from_polar(1.0 / (2.0 * PI), 3.0 * (t - tp))
        })
        .unwrap();
        assert!((p_inf_angle(&w).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_angle_function() {
        let w =
            AngularCoherence::from_fn(32, |_, _| Complex64::new(1.0 / (2.0 * PI), 0.0)).unwrap();
        assert!((p_inf_angle(&w).unwrap() - 1.0).abs() < 1e-12);
        let bad = AngularCoherence::from_fn(32, |_, _| Complex64::new(1.0, 0.0));
        assert!(matches!(bad, Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn flat_mode_maps_to_constant() {
        let s = OamState::pure(0, &[(0, Complex64::new(1.0, 0.0))]).unwrap();
        let w = oam_to_angle(&s, 8).unwrap();
        for z in w.samples().iter() {
            assert!((z - Complex64::new(1.0 / (2.0 * PI), 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn geometric_routes_agree() {
        let s = geometric_oam(0.5, 60).unwrap();
        let w = oam_to_angle(&s, 512).unwrap();
        let trace = 2.0 * PI / 512.0 * trace_re(w.samples());
        assert!((trace - 1.0).abs() < 1e-10);
        let m = w.samples();
        for a in 0..512 {
            for b in 0..512 {
                assert!((m[(a, b)] - m[(b, a)].conj()).norm() <= 1e-12);
            }
        }
        let oam = p_inf_oam(&s).unwrap().value;
        assert!((p_inf_angle(&w).unwrap() - oam).abs() < 1e-4);
    }

    #[test]
    fn coarse_grid_rejected() {
        let s = geometric_oam(0.5, 10).unwrap();
        assert_eq!(
            oam_to_angle(&s, 41),
            Err(Error::GridTooCoarse {
                grid: 41,
                required: 42
            })
        );
    }

    #[test]
    fn json_round_trip() {
        let s = geometric_oam(0.25, 3).unwrap();
        let back = OamState::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
    }
}

//! Searches over U(N) that give numerical evidence for the two maximization
//! results: max over bases of μ_N is P_N, and max over bases of the visibility
//! f is P_N.
//!
//! The analytic maximizers are available directly ([`equalizing_basis`] for
//! μ_N, the eigenbasis for f) and are injected as the first search seed by
//! default. The stochastic part is a greedy random local search: Haar-random
//! starting bases refined by complex Givens rotations on random index pairs,
//! composed with random phases on the rotated pair. Every move is an exact
//! unitary, so iterates never leave U(N).
//!
//! Both objectives depend on the basis only through the populations
//! d = diag(U†ρU), and only through Σd² (the purity is basis independent):
//! μ_N² = 1 − (1 − Tr ρ²)/(1 − Σd²) and f² = (NΣd² − 1)/(N − 1). A Givens
//! proposal therefore costs O(1) to evaluate; the rotated matrix is only
//! updated on acceptance.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::format;
use crate::measures::{mu_n_of_matrix, p_n, visibility_f};
use crate::state::{ginibre, purity, spectral_decompose, DensityMatrix};

/// An N×N matrix with U†U = 𝟙 within 1e-10. Its columns are a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    matrix: DMatrix<Complex64>,
}

impl UnitaryMatrix {
    pub const TOLERANCE: f64 = 1e-10;

    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::NotSquare {
                rows: matrix.nrows(),
                cols: matrix.ncols(),
            });
        }
        let dev = unitarity_defect(&matrix);
        if !(dev <= Self::TOLERANCE) {
            return Err(Error::InvalidParameter(format!(
                "matrix is not unitary: ||U†U - 1||_F = {:e}",
                dev
            )));
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// U†ρU: the state's matrix in the basis given by the columns of U.
    pub fn transform(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        rho.conjugated_by(&self.matrix.adjoint())
    }
}

/// ‖U†U − 𝟙‖_F.
pub fn unitarity_defect(u: &DMatrix<Complex64>) -> f64 {
    let n = u.ncols();
    (u.adjoint() * u - DMatrix::<Complex64>::identity(n, n)).norm()
}

/// Haar-random unitary: QR of a complex Ginibre matrix with the phases of
/// R's diagonal moved into Q.
pub fn haar_unitary(dim: usize, seed: u64) -> Result<UnitaryMatrix> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall { dim });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    UnitaryMatrix::new(haar_from_rng(dim, &mut rng))
}

fn haar_from_rng(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<Complex64> {
    let qr = ginibre(rng, dim, dim).qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// N-point discrete Fourier unitary F_jk = exp(2πi·jk/N)/√N.
pub fn fourier_unitary(dim: usize) -> DMatrix<Complex64> {
    let scale = 1.0 / (dim as f64).sqrt();
    DMatrix::from_fn(dim, dim, |j, k| {
        let angle = 2.0 * PI * ((j * k) % dim) as f64 / dim as f64;
        Complex64::from_polar(scale, angle)
    })
}

/// Eigenbasis of ρ followed by the Fourier unitary: every population in the
/// returned basis equals 1/N, which maximizes μ_N.
pub fn equalizing_basis(rho: &DensityMatrix) -> Result<UnitaryMatrix> {
    let spec = spectral_decompose(rho)?;
    UnitaryMatrix::new(&spec.eigenvectors * fourier_unitary(rho.dim()))
}

/// The eigenbasis of ρ, which maximizes the visibility f.
pub fn eigenbasis(rho: &DensityMatrix) -> Result<UnitaryMatrix> {
    UnitaryMatrix::new(spectral_decompose(rho)?.eigenvectors)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    Mu,
    Visibility,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::Mu => "mu_n",
            Target::Visibility => "visibility_f",
        }
    }
}

impl std::str::FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mu" | "mu_n" => Ok(Target::Mu),
            "visibility" | "visibility_f" | "vis" => Ok(Target::Visibility),
            other => Err(Error::Parse(format!("unknown target '{}'", other))),
        }
    }
}

/// Knobs for [`maximize`]. Budget counts objective evaluations.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub budget: u64,
    pub seed: u64,
    /// Start the first restart from the analytic maximizer.
    pub analytic_seed: bool,
    /// Record (evaluation, best value) every this many evaluations; 0 disables.
    pub trace_stride: u64,
    pub initial_step: f64,
    /// Consecutive rejections before the step is halved.
    pub patience: u32,
    /// A restart ends once the step falls below this.
    pub min_step: f64,
}

impl SearchConfig {
    pub fn new(budget: u64, seed: u64) -> Self {
        Self {
            budget,
            seed,
            analytic_seed: true,
            trace_stride: 0,
            initial_step: 0.5,
            patience: 20,
            min_step: 1e-6,
        }
    }

    pub fn haar_seeds_only(mut self) -> Self {
        self.analytic_seed = false;
        self
    }

    pub fn with_trace_stride(mut self, stride: u64) -> Self {
        self.trace_stride = stride;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximizationResult {
    pub target: Target,
    pub best_value: f64,
    pub best_unitary: UnitaryMatrix,
    /// Proposals made (one per local move).
    pub iterations: u64,
    pub evaluations: u64,
    /// Some restart shrank its step below `min_step`, or the analytic
    /// maximizer was supplied.
    pub converged: bool,
    pub restarts: u64,
    pub trace: Vec<(u64, f64)>,
}

impl MaximizationResult {
    pub fn to_json(&self) -> Value {
        json!({
            "target": self.target.name(),
            "best_value": format::num(self.best_value),
            "best_unitary": format::matrix_columns(self.best_unitary.matrix()),
            "iterations": self.iterations,
            "evaluations": self.evaluations,
            "converged": self.converged,
            "restarts": self.restarts,
            "trace": self.trace.iter().map(|&(e, v)| json!([e, format::num(v)])).collect::<Vec<_>>(),
        })
    }
}

pub fn maximize_mu(rho: &DensityMatrix, budget: u64, seed: u64) -> Result<MaximizationResult> {
    maximize(rho, Target::Mu, &SearchConfig::new(budget, seed))
}

pub fn maximize_visibility(
    rho: &DensityMatrix,
    budget: u64,
    seed: u64,
) -> Result<MaximizationResult> {
    maximize(rho, Target::Visibility, &SearchConfig::new(budget, seed))
}

struct Objective {
    target: Target,
    dim: f64,
    purity: f64,
}

impl Objective {
    /// Objective as a function of Σd² alone.
    fn value(&self, diag_sq: f64) -> f64 {
        match self.target {
            Target::Mu => {
                let den = 1.0 - diag_sq;
                if den <= 1e-15 {
                    // Populations on one basis vector: μ_N's limit value.
                    0.0
                } else {
                    (1.0 - (1.0 - self.purity) / den).max(0.0).sqrt()
                }
            }
            Target::Visibility => ((self.dim * diag_sq - 1.0) / (self.dim - 1.0))
                .max(0.0)
                .sqrt(),
        }
    }

    /// The objective evaluated straight from its definition.
    fn direct(&self, rotated: &DMatrix<Complex64>) -> Result<f64> {
        match self.target {
            Target::Mu => match mu_n_of_matrix(rotated) {
                Ok(x) => Ok(x),
                Err(Error::DegenerateDiagonal) => Ok(0.0),
                Err(e) => Err(e),
            },
            Target::Visibility => {
                let d: Vec<f64> = (0..rotated.nrows())
                    .map(|i| rotated[(i, i)].re.max(0.0))
                    .collect();
                visibility_f(&d)
            }
        }
    }
}

fn rotate(rho: &DMatrix<Complex64>, u: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let w = u.adjoint() * rho * u;
    (&w + w.adjoint()) * Complex64::new(0.5, 0.0)
}

fn diag_sq(w: &DMatrix<Complex64>) -> f64 {
    (0..w.nrows()).map(|i| w[(i, i)].re * w[(i, i)].re).sum()
}

/// Right-multiplies columns `a`, `b` of `m` by the 2×2 block `g`.
fn apply_cols(m: &mut DMatrix<Complex64>, a: usize, b: usize, g: &[Complex64; 4]) {
    for r in 0..m.nrows() {
        let (x, y) = (m[(r, a)], m[(r, b)]);
        m[(r, a)] = x * g[0] + y * g[2];
        m[(r, b)] = x * g[1] + y * g[3];
    }
}

/// Left-multiplies rows `a`, `b` of `m` by the adjoint of `g`.
fn apply_rows_adjoint(m: &mut DMatrix<Complex64>, a: usize, b: usize, g: &[Complex64; 4]) {
    for c in 0..m.ncols() {
        let (x, y) = (m[(a, c)], m[(b, c)]);
        m[(a, c)] = g[0].conj() * x + g[2].conj() * y;
        m[(b, c)] = g[1].conj() * x + g[3].conj() * y;
    }
}

/// Greedy random local search over U(N) for the chosen objective.
///
/// Deterministic for fixed `(rho, target, config)`. Candidates are ranked by
/// the incrementally updated diagonal; every basis that may become the best
/// is re-evaluated from scratch, and in builds with debug assertions those
/// values are checked against the analytic ceiling.
pub fn maximize(
    rho: &DensityMatrix,
    target: Target,
    config: &SearchConfig,
) -> Result<MaximizationResult> {
    if config.budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    if !(config.initial_step > 0.0) || !(config.min_step > 0.0) || config.patience == 0 {
        return Err(Error::InvalidParameter("invalid search schedule".into()));
    }
    let n = rho.dim();
    let objective = Objective {
        target,
        dim: n as f64,
        purity: purity(rho),
    };
    let ceiling = p_n(rho)?;
    let rho_m = rho.matrix();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut evaluations = 0u64;
    let mut iterations = 0u64;
    let mut restarts = 0u64;
    let mut converged = false;
    let mut best: Option<(f64, DMatrix<Complex64>)> = None;
    let mut trace = Vec::new();

    let consider =
        |u: &DMatrix<Complex64>, best: &mut Option<(f64, DMatrix<Complex64>)>| -> Result<()> {
            let value = objective.direct(&rotate(rho_m, u))?;
            check_ceiling(value, ceiling);
            if best.as_ref().is_none_or(|(b, _)| value > *b) {
                *best = Some((value, u.clone()));
            }
            Ok(())
        };
    let record =
        |evals: u64, best: &Option<(f64, DMatrix<Complex64>)>, trace: &mut Vec<(u64, f64)>| {
            if config.trace_stride > 0 && evals.is_multiple_of(config.trace_stride) {
                if let Some((v, _)) = best {
                    trace.push((evals, *v));
                }
            }
        };

    while evaluations < config.budget {
        let mut u = if restarts == 0 && config.analytic_seed {
            converged = true;
            match target {
                Target::Mu => equalizing_basis(rho)?.matrix,
                Target::Visibility => eigenbasis(rho)?.matrix,
            }
        } else {
            haar_from_rng(n, &mut rng)
        };
        restarts += 1;
        let mut w = rotate(rho_m, &u);
        let mut sq = diag_sq(&w);
        let mut value = objective.value(sq);
        evaluations += 1;
        consider(&u, &mut best)?;
        record(evaluations, &best, &mut trace);

        let mut step = config.initial_step;
        let mut rejections = 0u32;
        let mut accepted = 0u64;
        while evaluations < config.budget {
            iterations += 1;
            let a = rng.random_range(0..n);
            let mut b = rng.random_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            let theta = step * rng.random_range(-1.0..1.0);
            let phi = rng.random_range(0.0..2.0 * PI);
            let (alpha, beta) = (
                rng.random_range(0.0..2.0 * PI),
                rng.random_range(0.0..2.0 * PI),
            );

            let (s_abs, c) = theta.sin_cos();
            let s = Complex64::from_polar(s_abs, phi);
            let (waa, wbb, wab) = (w[(a, a)].re, w[(b, b)].re, w[(a, b)]);
            let cross = 2.0 * c * (s * wab).re;
            let new_a = c * c * waa + s.norm_sqr() * wbb + cross;
            let new_b = s.norm_sqr() * waa + c * c * wbb - cross;
            let cand_sq = sq - waa * waa - wbb * wbb + new_a * new_a + new_b * new_b;
            let candidate = objective.value(cand_sq);
            evaluations += 1;

            if candidate > value {
                let ea = Complex64::from_polar(1.0, alpha);
                let eb = Complex64::from_polar(1.0, beta);
                let g = [c * ea, -s.conj() * eb, s * ea, c * eb];
                apply_cols(&mut u, a, b, &g);
                accepted += 1;
                if accepted.is_multiple_of(256) {
                    w = rotate(rho_m, &u);
                } else {
                    apply_cols(&mut w, a, b, &g);
                    apply_rows_adjoint(&mut w, a, b, &g);
                }
                sq = diag_sq(&w);
                value = objective.value(sq);
                rejections = 0;
                if best.as_ref().is_none_or(|(bv, _)| value > *bv) {
                    consider(&u, &mut best)?;
                }
            } else {
                rejections += 1;
                if rejections >= config.patience {
                    step *= 0.5;
                    rejections = 0;
                    if step < config.min_step {
                        converged = true;
                        record(evaluations, &best, &mut trace);
                        break;
                    }
                }
            }
            record(evaluations, &best, &mut trace);
        }
    }

    let (best_value, best_u) = best.expect("budget >= 1 evaluates at least one basis");
    Ok(MaximizationResult {
        target,
        best_value,
        best_unitary: UnitaryMatrix::new(reorthonormalize(best_u))?,
        iterations,
        evaluations,
        converged,
        restarts,
        trace,
    })
}

/// Removes accumulated rounding from a product of many Givens factors.
fn reorthonormalize(u: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let qr = u.clone().qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..q.ncols() {
        let d = r[(k, k)];
        if d.norm() > 0.0 {
            let mut col = q.column_mut(k);
            col *= d / d.norm();
        }
    }
    q
}

/// The objectives come from Σd² through a square root, which turns O(ε)
/// rounding near zero into O(√ε); the squared comparison absorbs that.
#[inline]
fn check_ceiling(value: f64, ceiling: f64) {
    debug_assert!(
        value <= ceiling + 1e-9 || value * value <= ceiling * ceiling + 1e-12,
        "search objective {} exceeded the analytic ceiling {}",
        value,
        ceiling
    );
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{mu_n, visibility};
    use crate::state::{random_state, RandomKind};

    #[test]
    fn haar_samples_are_unitary_and_reproducible() {
        for n in [2, 3, 7] {
            let u = haar_unitary(n, 42).unwrap();
            assert!(unitarity_defect(u.matrix()) <= 1e-10);
        }
        assert_eq!(haar_unitary(2, 9).unwrap(), haar_unitary(2, 9).unwrap());
        assert_ne!(haar_unitary(2, 9).unwrap(), haar_unitary(2, 10).unwrap());
        assert!(haar_unitary(1, 0).is_err());
    }

    #[test]
    fn haar_first_moment() {
        // E|U_11|² = 1/N for Haar measure.
        let samples = 10_000;
        let mean: f64 = (0..samples)
            .map(|s| haar_unitary(2, s).unwrap().matrix()[(0, 0)].norm_sqr())
            .sum::<f64>()
            / samples as f64;
        assert!((mean - 0.5).abs() < 0.02, "{}", mean);
    }

    #[test]
    fn equalizing_basis_examples() {
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        let t = equalizing_basis(&mixed).unwrap().transform(&mixed).unwrap();
        assert!(t.diagonal().iter().all(|d| (d - 0.25).abs() < 1e-12));
        assert!(mu_n(&t).unwrap() < 1e-12);

        let rho = DensityMatrix::from_diagonal(&[0.75, 0.25]).unwrap();
        let u = equalizing_basis(&rho).unwrap();
        let t = u.transform(&rho).unwrap();
        assert!(t.diagonal().iter().all(|d| (d - 0.5).abs() < 1e-12));
        assert!((t.entry(0, 1).norm() - 0.25).abs() < 1e-12);
        assert!((mu_n(&t).unwrap() - 0.5).abs() < 1e-12);
        // Columns are (|1⟩ ± |2⟩)/√2.
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((u.matrix()[(0, 0)].norm() - h).abs() < 1e-12);
        assert!((u.matrix()[(1, 1)].norm() - h).abs() < 1e-12);

        let rho = DensityMatrix::from_diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let t = equalizing_basis(&rho).unwrap().transform(&rho).unwrap();
        assert!(t.diagonal().iter().all(|d| (d - 1.0 / 3.0).abs() < 1e-12));
        assert!((mu_n(&t).unwrap() - 0.07_f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn search_on_maximally_mixed_is_zero() {
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        for target in [Target::Mu, Target::Visibility] {
            for budget in [1, 50, 2000] {
                let r = maximize(&rho, target, &SearchConfig::new(budget, 1)).unwrap();
                assert!(r.best_value.abs() < 1e-12);
                assert_eq!(r.evaluations, budget);
            }
        }
    }

    #[test]
    fn qubit_mu_search_reaches_p2() {
        let rho = random_state(2, RandomKind::GinibreMixed, 17).unwrap();
        let cfg = SearchConfig::new(10_000, 3).haar_seeds_only();
        let r = maximize(&rho, Target::Mu, &cfg).unwrap();
        let p = p_n(&rho).unwrap();
        assert!(r.best_value <= p + 1e-6);
        assert!(
            (r.best_value - p).abs() <= 1e-4,
            "{} vs {}",
            r.best_value,
            p
        );
    }

    #[test]
    fn visibility_search_with_eigenbasis_seed_is_exact() {
        let rho = random_state(5, RandomKind::GinibreMixed, 2).unwrap();
        let r = maximize_visibility(&rho, 1, 0).unwrap();
        assert_eq!(r.evaluations, 1);
        assert!((r.best_value - visibility(&rho).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn visibility_search_from_haar_seeds() {
        let rho = DensityMatrix::from_diagonal(&[0.5, 0.3, 0.2]).unwrap();
        let cfg = SearchConfig::new(100_000, 5).haar_seeds_only();
        let r = maximize(&rho, Target::Visibility, &cfg).unwrap();
        assert!(r.best_value >= 0.2645, "{}", r.best_value);
        assert!(r.best_value <= 0.07_f64.sqrt() + 1e-6);
    }

    #[test]
    fn search_is_deterministic_and_monotone_in_budget() {
        let rho = random_state(4, RandomKind::GinibreMixed, 5).unwrap();
        let run = |budget| {
            let cfg = SearchConfig::new(budget, 77).haar_seeds_only();
            maximize(&rho, Target::Mu, &cfg).unwrap()
        };
        assert_eq!(run(3000), run(3000));
        let mut last = f64::NEG_INFINITY;
        for budget in [1, 10, 100, 1000, 10_000] {
            let v = run(budget).best_value;
            assert!(v >= last, "budget {}: {} < {}", budget, v, last);
            last = v;
        }
    }

    #[test]
    fn trace_is_non_decreasing() {
        let rho = random_state(3, RandomKind::GinibreMixed, 1).unwrap();
        let cfg = SearchConfig::new(5000, 2)
            .haar_seeds_only()
            .with_trace_stride(100);
        let r = maximize(&rho, Target::Mu, &cfg).unwrap();
        assert_eq!(r.trace.len(), 50);
        assert!(r.trace.windows(2).all(|w| w[1].1 >= w[0].1));
        let json = r.to_json();
        assert_eq!(json["best_unitary"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn zero_budget_is_rejected() {
        let rho = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(maximize_mu(&rho, 0, 0).is_err());
    }
}

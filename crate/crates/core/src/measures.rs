//! The intrinsic degree of coherence P_N and the quantities that reproduce
//! it: Frobenius distance, Bloch norm, centre-of-mass distance, maximum
//! degree of coherence, interference visibility and the pure-part weights.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::bloch::{bloch_norm, to_bloch};
use crate::error::{Error, Result};
use crate::format;
use crate::state::{purity, spectral_decompose, DensityMatrix, Spectrum};

/// Radicands in `[-RADICAND_SLACK, 0)` are float noise and clamp to zero.
pub const RADICAND_SLACK: f64 = 1e-9;

/// Mutual agreement required between the five P_N routes in a report.
pub const ROUTE_AGREEMENT: f64 = 1e-9;

/// Denominators of μ_N at or below this are treated as zero.
const MU_DENOMINATOR_FLOOR: f64 = 1e-15;

fn clamped_sqrt(radicand: f64, what: &str) -> Result<f64> {
    if radicand < -RADICAND_SLACK || radicand.is_nan() {
        return Err(Error::InternalInvariantViolation {
            what: format!("negative radicand in {}", what),
            discrepancy: radicand,
        });
    }
    Ok(radicand.max(0.0).sqrt())
}

fn clamp_unit(x: f64) -> f64 {
    if x > 1.0 && x <= 1.0 + RADICAND_SLACK {
        1.0
    } else {
        x
    }
}

/// P_N = √((N·Tr ρ² − 1)/(N − 1)).
pub fn p_n(rho: &DensityMatrix) -> Result<f64> {
    let n = rho.dim() as f64;
    let r = (n * purity(rho) - 1.0) / (n - 1.0);
    Ok(clamp_unit(clamped_sqrt(r, "P_N")?))
}

/// The qubit degree of polarization √(1 − 4 det ρ).
pub fn p2_determinant_form(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            found: rho.dim(),
        });
    }
    let det = (rho.entry(0, 0) * rho.entry(1, 1) - rho.entry(0, 1) * rho.entry(1, 0)).re;
    Ok(clamp_unit(clamped_sqrt(1.0 - 4.0 * det, "P_2")?))
}

/// √(N/(N−1))·‖ρ − 𝟙/N‖_F, computed entrywise.
pub fn frobenius_distance_measure(rho: &DensityMatrix) -> f64 {
    let n = rho.dim();
    let nf = n as f64;
    let mut sq = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut z = rho.entry(i, j);
            if i == j {
                z -= 1.0 / nf;
            }
            sq += z.norm_sqr();
        }
    }
    clamp_unit((nf / (nf - 1.0) * sq).sqrt())
}

/// Normalized spread of a nonnegative weight vector:
/// √(Σ_{i<j}(x_i − x_j)² / ((N−1)(Σx)²)).
fn pairwise_spread(x: &[f64]) -> f64 {
    let n = x.len();
    let total: f64 = x.iter().sum();
    let mut acc = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let d = x[i] - x[j];
            acc += d * d;
        }
    }
    (acc / ((n as f64 - 1.0) * total * total)).sqrt()
}

/// Distance from the origin to the centre of mass of point masses λ_i placed
/// on the vertices of a regular simplex.
pub fn center_of_mass_distance(spec: &Spectrum) -> f64 {
    clamp_unit(pairwise_spread(&spec.eigenvalues))
}

/// Basis-dependent degree of coherence
/// μ_N = √(Σ_{i<j}|ρ_ij|² / Σ_{i<j} ρ_ii ρ_jj), in the stored basis.
pub fn mu_n(rho: &DensityMatrix) -> Result<f64> {
    mu_n_of_matrix(rho.matrix())
}

pub(crate) fn mu_n_of_matrix(m: &DMatrix<Complex64>) -> Result<f64> {
    let n = m.nrows();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            num += m[(i, j)].norm_sqr();
            den += m[(i, i)].re * m[(j, j)].re;
        }
    }
    if den <= MU_DENOMINATOR_FLOOR {
        return Err(Error::DegenerateDiagonal);
    }
    Ok((num / den).sqrt().min(1.0 + 1e-12))
}

/// μ_N via 1 − (1 − Tr ρ²)/(1 − Σρ_ii²); an independent route to [`mu_n`].
pub fn mu_n_from_purity(purity: f64, diagonal: &[f64]) -> Result<f64> {
    let diag_sq: f64 = diagonal.iter().map(|d| d * d).sum();
    let den = 1.0 - diag_sq;
    if den <= 2.0 * MU_DENOMINATOR_FLOOR {
        return Err(Error::DegenerateDiagonal);
    }
    clamped_sqrt(1.0 - (1.0 - purity) / den, "mu_N identity")
}

/// Detection probabilities at the two ports of the qubit interferometer:
/// a relative phase `delta` between |1⟩ and |2⟩, then a rotation by `theta`.
pub fn interference_2d(rho: &DensityMatrix, delta: f64, theta: f64) -> Result<(f64, f64)> {
    if rho.dim() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            found: rho.dim(),
        });
    }
    let r11 = rho.entry(0, 0).re;
    let r22 = rho.entry(1, 1).re;
    let r12 = rho.entry(0, 1);
    let beta = r12.arg();
    let (s, c) = theta.sin_cos();
    let cross = 2.0 * r12.norm() * s * c * (beta + delta).cos();
    let i1 = r11 * c * c + r22 * s * s + cross;
    let i2 = r11 * s * s + r22 * c * c - cross;
    Ok((i1, i2))
}

/// (I1max − I1min)/(I1max + I1min) over an inclusive `n_delta × n_theta` grid
/// with δ ∈ [0, 2π] and θ ∈ [0, π].
pub fn fringe_visibility(rho: &DensityMatrix, n_delta: usize, n_theta: usize) -> Result<f64> {
    if n_delta < 2 || n_theta < 2 {
        return Err(Error::InvalidParameter(
            "fringe grid needs at least 2x2 points".into(),
        ));
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for a in 0..n_delta {
        let delta = 2.0 * std::f64::consts::PI * a as f64 / (n_delta - 1) as f64;
        for b in 0..n_theta {
            let theta = std::f64::consts::PI * b as f64 / (n_theta - 1) as f64;
            let (i1, _) = interference_2d(rho, delta, theta)?;
            lo = lo.min(i1);
            hi = hi.max(i1);
        }
    }
    Ok((hi - lo) / (hi + lo))
}

/// N-port visibility f(I_1..I_N). Scale invariant.
pub fn visibility_f(probs: &[f64]) -> Result<f64> {
    if probs.len() < 2 {
        return Err(Error::DimensionTooSmall { dim: probs.len() });
    }
    if let Some(bad) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "probabilities must be finite and non-negative, found {}",
            bad
        )));
    }
    if probs.iter().all(|&p| p == 0.0) {
        return Err(Error::AllZero);
    }
    Ok(pairwise_spread(probs))
}

/// Maximum of f over all measurement bases, attained on the eigenvalues.
pub fn visibility(rho: &DensityMatrix) -> Result<f64> {
    let spec = spectral_decompose(rho)?;
    Ok(clamp_unit(visibility_f(&spec.eigenvalues)?))
}

/// x ≺ y: descending partial sums of `x` never exceed those of `y` (within
/// `tol`) and the totals agree within `tol`.
pub fn is_majorized_by(x: &[f64], y: &[f64], tol: f64) -> bool {
    if x.len() != y.len() {
        return false;
    }
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(|a, b| b.total_cmp(a));
    ys.sort_by(|a, b| b.total_cmp(a));
    let (mut sx, mut sy) = (0.0, 0.0);
    for (a, b) in xs.iter().zip(&ys) {
        sx += a;
        sy += b;
        if sx > sy + tol {
            return false;
        }
    }
    (sx - sy).abs() <= tol
}

/// ρ = Σ_{i<N} s_i|ψ_i⟩⟨ψ_i| + (Nλ_N)·𝟙/N with s_i = λ_i − λ_N.
#[derive(Debug, Clone, PartialEq)]
pub struct PurePartDecomposition {
    /// Non-increasing weights s_1..s_{N−1}.
    pub weights: Vec<f64>,
    /// Column i is |ψ_i⟩; N−1 orthonormal columns.
    pub pure_states: DMatrix<Complex64>,
    /// N·λ_N = 1 − Σ s_i.
    pub mixed_weight: f64,
}

impl PurePartDecomposition {
    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let n = self.pure_states.nrows();
        let mut out =
            DMatrix::from_diagonal_element(n, n, Complex64::new(self.mixed_weight / n as f64, 0.0));
        for (i, &s) in self.weights.iter().enumerate() {
            let v = self.pure_states.column(i);
            out += (v * v.adjoint()) * Complex64::new(s, 0.0);
        }
        out
    }
}

pub fn pure_part_decomposition(rho: &DensityMatrix) -> Result<PurePartDecomposition> {
    let spec = spectral_decompose(rho)?;
    Ok(pure_part_from_spectrum(&spec))
}

pub fn pure_part_from_spectrum(spec: &Spectrum) -> PurePartDecomposition {
    let n = spec.dim();
    let last = spec.eigenvalues[n - 1];
    let weights = spec.eigenvalues[..n - 1]
        .iter()
        .map(|&l| (l - last).max(0.0))
        .collect();
    PurePartDecomposition {
        weights,
        pure_states: spec.eigenvectors.columns(0, n - 1).into_owned(),
        mixed_weight: n as f64 * last,
    }
}

/// Outcome of comparing P_N with the total pure-part weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PurePartBound {
    /// P_N ≤ Σ s_i and the weight identity both hold within 1e-10.
    pub bound_holds: bool,
    /// Σ s_i − P_N.
    pub gap: f64,
    /// |P_N − √((Σs)² − (2N/(N−1))Σ_{i<j}s_i s_j)|.
    pub identity_residual: f64,
}

pub fn pure_part_bound_check(d: &PurePartDecomposition, p: f64) -> PurePartBound {
    let n = d.pure_states.nrows() as f64;
    let total = d.weight_sum();
    let mut cross = 0.0;
    for i in 0..d.weights.len() {
        for j in i + 1..d.weights.len() {
            cross += d.weights[i] * d.weights[j];
        }
    }
    let from_weights = (total * total - 2.0 * n / (n - 1.0) * cross)
        .max(0.0)
        .sqrt();
    let identity_residual = (from_weights - p).abs();
    PurePartBound {
        bound_holds: identity_residual <= 1e-10 && p <= total + 1e-10,
        gap: total - p,
        identity_residual,
    }
}

/// Every measure of one state, with the mutual-equality checks applied.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceReport {
    pub dim: usize,
    pub p_n: f64,
    pub frobenius_distance: f64,
    pub center_of_mass: f64,
    pub bloch_norm: f64,
    pub purity: f64,
    /// `None` when the populations sit on a single basis vector (μ_N is 0/0).
    pub mu_in_given_basis: Option<f64>,
    pub visibility: f64,
    pub pure_part_weight_sum: f64,
    /// pure_part_weight_sum − p_n; never negative beyond rounding.
    pub pure_part_gap: f64,
    /// Largest pairwise difference among the five P_N routes.
    pub max_route_discrepancy: f64,
}

impl CoherenceReport {
    /// The five quantities that must all equal P_N, labelled.
    pub fn routes(&self) -> [(&'static str, f64); 5] {
        [
            ("p_n", self.p_n),
            ("bloch_norm", self.bloch_norm),
            ("frobenius_distance", self.frobenius_distance),
            ("center_of_mass", self.center_of_mass),
            ("visibility", self.visibility),
        ]
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim,
            "p_n": format::num(self.p_n),
            "frobenius_distance": format::num(self.frobenius_distance),
            "center_of_mass": format::num(self.center_of_mass),
            "bloch_norm": format::num(self.bloch_norm),
            "purity": format::num(self.purity),
            "mu_in_given_basis": self.mu_in_given_basis.map_or(Value::Null, format::num),
            "visibility": format::num(self.visibility),
            "pure_part_weight_sum": format::num(self.pure_part_weight_sum),
            "pure_part_gap": format::num(self.pure_part_gap),
            "checks": {
                "max_route_discrepancy": format::num(self.max_route_discrepancy),
                "route_tolerance": format::num(ROUTE_AGREEMENT),
            },
        })
    }

    /// Rows of `name<TAB>value`, 12 significant digits.
    pub fn to_tsv(&self) -> String {
        let mu = self
            .mu_in_given_basis
            .map_or_else(|| "NA".to_string(), format::tsv_num);
        let rows: Vec<(&str, String)> = vec![
            ("dim", self.dim.to_string()),
            ("p_n", format::tsv_num(self.p_n)),
            (
                "frobenius_distance",
                format::tsv_num(self.frobenius_distance),
            ),
            ("center_of_mass", format::tsv_num(self.center_of_mass)),
            ("bloch_norm", format::tsv_num(self.bloch_norm)),
            ("purity", format::tsv_num(self.purity)),
            ("mu_in_given_basis", mu),
            ("visibility", format::tsv_num(self.visibility)),
            (
                "pure_part_weight_sum",
                format::tsv_num(self.pure_part_weight_sum),
            ),
            ("pure_part_gap", format::tsv_num(self.pure_part_gap)),
            (
                "max_route_discrepancy",
                format::tsv_num(self.max_route_discrepancy),
            ),
        ];
        rows.into_iter()
            .map(|(k, v)| format!("{}\t{}\n", k, v))
            .collect()
    }
}

pub fn coherence_report(rho: &DensityMatrix) -> Result<CoherenceReport> {
    let spec = spectral_decompose(rho)?;
    let decomposition = pure_part_from_spectrum(&spec);
    let mu = match mu_n(rho) {
        Ok(x) => Some(x),
        Err(Error::DegenerateDiagonal) => None,
        Err(e) => return Err(e),
    };
    let p = p_n(rho)?;
    let mut report = CoherenceReport {
        dim: rho.dim(),
        p_n: p,
        frobenius_distance: frobenius_distance_measure(rho),
        center_of_mass: center_of_mass_distance(&spec),
        bloch_norm: bloch_norm(&to_bloch(rho)),
        purity: purity(rho),
        mu_in_given_basis: mu,
        visibility: clamp_unit(visibility_f(&spec.eigenvalues)?),
        pure_part_weight_sum: decomposition.weight_sum(),
        pure_part_gap: decomposition.weight_sum() - p,
        max_route_discrepancy: 0.0,
    };
    check_report(&mut report)?;
    Ok(report)
}

fn check_report(r: &mut CoherenceReport) -> Result<()> {
    let routes = r.routes();
    let mut worst = (0, 0, 0.0_f64);
    for a in 0..routes.len() {
        for b in a + 1..routes.len() {
            let d = (routes[a].1 - routes[b].1).abs();
            if d > worst.2 {
                worst = (a, b, d);
            }
        }
    }
    r.max_route_discrepancy = worst.2;
    if worst.2 > ROUTE_AGREEMENT {
        return Err(Error::InternalInvariantViolation {
            what: format!("{} != {}", routes[worst.0].0, routes[worst.1].0),
            discrepancy: worst.2,
        });
    }
    if let Some(mu) = r.mu_in_given_basis {
        if mu > r.p_n + ROUTE_AGREEMENT {
            return Err(Error::InternalInvariantViolation {
                what: "mu_in_given_basis > p_n".into(),
                discrepancy: mu - r.p_n,
            });
        }
    }
    if r.p_n > r.pure_part_weight_sum + ROUTE_AGREEMENT {
        return Err(Error::InternalInvariantViolation {
            what: "p_n > pure_part_weight_sum".into(),
            discrepancy: r.p_n - r.pure_part_weight_sum,
        });
    }
    let fields = [
        ("purity", r.purity),
        ("pure_part_weight_sum", r.pure_part_weight_sum),
    ];
    for (name, x) in routes.iter().copied().chain(fields) {
        if !(-ROUTE_AGREEMENT..=1.0 + ROUTE_AGREEMENT).contains(&x) {
            return Err(Error::InternalInvariantViolation {
                what: format!("{} outside [0, 1]", name),
                discrepancy: x,
            });
        }
    }
    Ok(())
}

/// Diagonal of U†ρU, i.e. the detection probabilities in the basis given by
/// the columns of `u`.
pub fn probabilities_in_basis(rho: &DensityMatrix, u: &DMatrix<Complex64>) -> Vec<f64> {
    (0..u.ncols())
        .map(|k| {
            let col: DVector<Complex64> = u.column(k).into_owned();
            col.dotc(&(rho.matrix() * &col)).re
        })
        .collect()
}

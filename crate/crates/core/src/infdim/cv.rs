//! Finite position/momentum state space.
//!
//! 2D+1 positions x_m = mΔx and momenta p_j = jΔp, m, j ∈ [−D, D], tied by
//! ΔxΔp(2D+1) = 2πħ so that the two bases are related by a discrete Fourier
//! transform: ⟨p_j|x_m⟩ = e^{−i2πmj/(2D+1)}/√(2D+1).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{json, Value};
use std::f64::consts::PI;

use super::{check_finite, check_hermitian, check_psd, hermitize, trace_re, HERMITIAN_TOLERANCE};
use crate::error::{Error, Result};
use crate::format;

/// Tolerance on the unit trace of a sampled state.
pub const TRACE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvGrid {
    cutoff: usize,
    p_max: f64,
    hbar: f64,
    dp: f64,
    dx: f64,
}

pub fn build_cv_grid(cutoff: usize, p_max: f64, hbar: f64) -> Result<CvGrid> {
    if cutoff == 0 {
        return Err(Error::InvalidParameter(
            "grid cutoff D must be at least 1".into(),
        ));
    }
    if !(p_max > 0.0) || !p_max.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "p_max must be > 0, got {}",
            p_max
        )));
    }
    if !(hbar > 0.0) || !hbar.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "hbar must be > 0, got {}",
            hbar
        )));
    }
    let dp = p_max / cutoff as f64;
    let dx = 2.0 * PI * hbar / ((2 * cutoff + 1) as f64 * dp);
    Ok(CvGrid {
        cutoff,
        p_max,
        hbar,
        dp,
        dx,
    })
}

impl CvGrid {
    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// 2D + 1.
    pub fn size(&self) -> usize {
        2 * self.cutoff + 1
    }

    pub fn p_max(&self) -> f64 {
        self.p_max
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dp(&self) -> f64 {
        self.dp
    }

    pub fn x(&self, m: i64) -> f64 {
        m as f64 * self.dx
    }

    pub fn p(&self, j: i64) -> f64 {
        j as f64 * self.dp
    }

    /// Positions in index order, x_{−D} first.
    pub fn positions(&self) -> Vec<f64> {
        let d = self.cutoff as i64;
        (-d..=d).map(|m| self.x(m)).collect()
    }

    pub fn momenta(&self) -> Vec<f64> {
        let d = self.cutoff as i64;
        (-d..=d).map(|j| self.p(j)).collect()
    }

    /// ΔxΔp(2D+1) − 2πħ.
    pub fn defining_relation_residual(&self) -> f64 {
        self.dx * self.dp * self.size() as f64 - 2.0 * PI * self.hbar
    }

    /// e^{i2πk/N} with k reduced mod N first.
    fn root(&self, k: i64) -> Complex64 {
        let n = self.size() as i64;
        Complex64::from_polar(1.0, 2.0 * PI * k.rem_euclid(n) as f64 / n as f64)
    }

    /// F with F[j + D, m + D] = ⟨p_j|x_m⟩.
    pub fn fourier_matrix(&self) -> DMatrix<Complex64> {
        let n = self.size();
        let d = self.cutoff as i64;
        let scale = 1.0 / (n as f64).sqrt();
        DMatrix::from_fn(n, n, |j, m| {
            self.root(-(j as i64 - d) * (m as i64 - d)) * scale
        })
    }

    /// ⟨x|x′⟩ for x − x′ = u: sin((2D+1)uΔp/2ħ)/((2D+1)sin(uΔp/2ħ)).
    pub fn overlap(&self, u: f64) -> f64 {
        let n = self.size() as f64;
        let half = u * self.dp / (2.0 * self.hbar);
        let den = n * half.sin();
        if den.abs() < 1e-300 {
            // Removable singularity at multiples of the period.
            let k = (half / PI).round() as i64;
            return if (k * (self.size() as i64 - 1)) % 2 == 0 {
                1.0
            } else {
                -1.0
            };
        }
        (n * half).sin() / den
    }

    fn same_as(&self, other: &CvGrid) -> bool {
        self.cutoff == other.cutoff && self.p_max == other.p_max && self.hbar == other.hbar
    }

    pub fn to_json(&self) -> Value {
        json!({
            "cutoff": self.cutoff,
            "p_max": format::num(self.p_max),
            "hbar": format::num(self.hbar),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let cutoff = v
            .get("cutoff")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("grid needs integer \"cutoff\"".into()))?;
        let field = |k: &str| {
            v.get(k)
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::Parse(format!("grid needs numeric \"{}\"", k)))
        };
        build_cv_grid(cutoff as usize, field("p_max")?, field("hbar")?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Position,
    Momentum,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Position => "position",
            Representation::Momentum => "momentum",
        }
    }
}

/// Ḡ_{x_m x_n} or Γ̄_{p_j p_k} on a [`CvGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct CvState {
    grid: CvGrid,
    representation: Representation,
    matrix: DMatrix<Complex64>,
    raw_trace: Option<f64>,
}

impl CvState {
    pub fn new(
        grid: CvGrid,
        representation: Representation,
        matrix: DMatrix<Complex64>,
    ) -> Result<Self> {
        let n = grid.size();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::GridMismatch(format!(
                "matrix is {}x{}, grid has {} points",
                matrix.nrows(),
                matrix.ncols(),
                n
            )));
        }
        check_finite(&matrix)?;
        check_hermitian(&matrix, HERMITIAN_TOLERANCE)?;
        let total = trace_re(&matrix);
        if (total - 1.0).abs() > TRACE_TOLERANCE {
            return Err(Error::NotNormalized {
                total,
                tolerance: TRACE_TOLERANCE,
            });
        }
        check_psd(&matrix)?;
        Ok(Self {
            grid,
            representation,
            matrix,
            raw_trace: None,
        })
    }

    /// Samples a position kernel G(x, x′) as Ḡ_mn = G(x_m, x_n)Δx and
    /// rescales it to unit trace. The unscaled Riemann trace is kept.
    pub fn from_position_kernel(
        grid: CvGrid,
        kernel: impl Fn(f64, f64) -> Complex64,
    ) -> Result<Self> {
        let xs = grid.positions();
        let n = grid.size();
        let raw = DMatrix::from_fn(n, n, |m, k| kernel(xs[m], xs[k]) * grid.dx);
        check_finite(&raw)?;
        let raw_trace = trace_re(&raw);
        if !(raw_trace > 0.0) {
            return Err(Error::NotNormalized {
                total: raw_trace,
                tolerance: TRACE_TOLERANCE,
            });
        }
        let scaled = hermitize(raw / Complex64::new(raw_trace, 0.0));
        let mut s = Self::new(grid, Representation::Position, scaled)?;
        s.raw_trace = Some(raw_trace);
        Ok(s)
    }

    /// Pure Gaussian ψ(x) = (2πσ²)^{−1/4} exp(−(x−x₀)²/(4σ²) + ip₀x/ħ).
    pub fn gaussian(grid: CvGrid, sigma: f64, x0: f64, p0: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() || !x0.is_finite() || !p0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gaussian needs sigma > 0 and finite x0, p0 (got {}, {}, {})",
                sigma, x0, p0
            )));
        }
        let hbar = grid.hbar;
        let norm = (2.0 * PI * sigma * sigma).powf(-0.25);
        let psi = |x: f64| {
            Complex64::from_polar(
                norm * (-(x - x0).powi(2) / (4.0 * sigma * sigma)).exp(),
                p0 * x / hbar,
            )
        };
        Self::from_position_kernel(grid, |x, xp| psi(x) * psi(xp).conj())
    }

    /// Thermal oscillator state whose vacuum has position spread `sigma0`.
    ///
    /// G(x, x′) = (2πs²)^{−1/2} exp(−X²/(2s²) − y²/(2τ²)) with X = (x+x′)/2,
    /// y = x − x′, s² = σ₀²(2n̄+1), τ = 2s/(2n̄+1). Purity 1/(2n̄+1).
    pub fn thermal(grid: CvGrid, nbar: f64, sigma0: f64) -> Result<Self> {
        if !(nbar >= 0.0) || !nbar.is_finite() || !(sigma0 > 0.0) || !sigma0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "thermal state needs nbar >= 0 and sigma0 > 0 (got {}, {})",
                nbar, sigma0
            )));
        }
        let g = 2.0 * nbar + 1.0;
        let s2 = sigma0 * sigma0 * g;
        let tau2 = 4.0 * s2 / (g * g);
        let norm = 1.0 / (2.0 * PI * s2).sqrt();
        Self::from_position_kernel(grid, |x, xp| {
            let big = 0.5 * (x + xp);
            let y = x - xp;
            Complex64::new(
                norm * (-big * big / (2.0 * s2) - y * y / (2.0 * tau2)).exp(),
                0.0,
            )
        })
    }

    /// Vacuum position spread √(ħ/2) (unit mass and frequency).
    pub fn default_sigma0(hbar: f64) -> f64 {
        (hbar / 2.0).sqrt()
    }

    /// |x_m⟩⟨x_m|.
    pub fn position_eigenstate(grid: CvGrid, m: i64) -> Result<Self> {
        let d = grid.cutoff as i64;
        if m.abs() > d {
            return Err(Error::InvalidParameter(format!(
                "position index {} outside grid",
                m
            )));
        }
        let n = grid.size();
        let mut mat = DMatrix::zeros(n, n);
        mat[((m + d) as usize, (m + d) as usize)] = Complex64::new(1.0, 0.0);
        Self::new(grid, Representation::Position, mat)
    }

    pub fn grid(&self) -> &CvGrid {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Σ_m G(x_m, x_m)Δx before rescaling, for sampled states.
    pub fn raw_trace(&self) -> Option<f64> {
        self.raw_trace
    }

    fn converted(&self, representation: Representation, matrix: DMatrix<Complex64>) -> Self {
        // A unitary change of basis keeps every invariant.
        Self {
            grid: self.grid,
            representation,
            matrix: hermitize(matrix),
            raw_trace: self.raw_trace,
        }
    }

    /// Γ̄ = F Ḡ F†.
    pub fn to_momentum(&self) -> Self {
        match self.representation {
            Representation::Momentum => self.clone(),
            Representation::Position => {
                let f = self.grid.fourier_matrix();
                self.converted(Representation::Momentum, &f * &self.matrix * f.adjoint())
            }
        }
    }

    /// Ḡ = F† Γ̄ F.
    pub fn to_position(&self) -> Self {
        match self.representation {
            Representation::Position => self.clone(),
            Representation::Momentum => {
                let f = self.grid.fourier_matrix();
                self.converted(Representation::Position, f.adjoint() * &self.matrix * f)
            }
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "representation": self.representation.name(),
            "grid": self.grid.to_json(),
            "matrix": format::matrix_rows(&self.matrix),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let representation = match v.get("representation").and_then(Value::as_str) {
            Some("position") => Representation::Position,
            Some("momentum") => Representation::Momentum,
            other => return Err(Error::Parse(format!("bad CV representation {:?}", other))),
        };
        let grid = CvGrid::from_json(
            v.get("grid")
                .ok_or_else(|| Error::Parse("missing \"grid\"".into()))?,
        )?;
        let (rows, cols, entries) = format::parse_matrix_rows(
            v.get("matrix")
                .ok_or_else(|| Error::Parse("missing \"matrix\"".into()))?,
        )?;
        Self::new(
            grid,
            representation,
            DMatrix::from_row_slice(rows, cols, &entries),
        )
    }
}

/// √(Σ|Ḡ_mn|²), the same in either representation.
pub fn p_inf_cv(s: &CvState) -> Result<f64> {
    let total = trace_re(&s.matrix);
    if (total - 1.0).abs() > TRACE_TOLERANCE {
        return Err(Error::NotNormalized {
            total,
            tolerance: TRACE_TOLERANCE,
        });
    }
    Ok(s.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
}

/// ⟨x_m|[x̂, p̂]|x_n⟩ = (x_m − x_n)·k(m − n) with
/// k(d) = (1/N) Σ_j p_j e^{i2πdj/N}.
pub fn commutator_matrix(grid: &CvGrid) -> DMatrix<Complex64> {
    let n = grid.size();
    let d = grid.cutoff as i64;
    let kernel: Vec<Complex64> = (-2 * d..=2 * d)
        .map(|delta| {
            (-d..=d)
                .map(|j| grid.root(delta * j) * grid.p(j))
                .sum::<Complex64>()
                / n as f64
        })
        .collect();
    DMatrix::from_fn(n, n, |m, k| {
        if m == k {
            return Complex64::new(0.0, 0.0);
        }
        let delta = m as i64 - k as i64;
        kernel[(delta + 2 * d) as usize] * grid.dx * delta as f64
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommutatorCheck {
    /// Tr(ρ[x̂, p̂]).
    pub expectation: Complex64,
    /// |expectation − iħ|.
    pub deviation: f64,
    /// |Tr[x̂, p̂]|.
    pub trace: f64,
    /// max_m |⟨x_m|[x̂, p̂]|x_m⟩|.
    pub max_diagonal: f64,
}

impl CommutatorCheck {
    pub fn to_json(&self) -> Value {
        json!({
            "expectation": format::complex(self.expectation),
            "deviation": format::num(self.deviation),
            "trace": format::num(self.trace),
            "max_diagonal": format::num(self.max_diagonal),
        })
    }
}

/// Expectation of [x̂, p̂] in `probe` and its distance from iħ.
///
/// Probes supported near the grid edge are far from iħ: |x_D⟩⟨x_D| gives
/// exactly zero.
pub fn commutator_check(grid: &CvGrid, probe: &CvState) -> Result<CommutatorCheck> {
    if !grid.same_as(&probe.grid) {
        return Err(Error::GridMismatch(format!(
            "probe grid (D={}, p_max={}, hbar={}) differs from (D={}, p_max={}, hbar={})",
            probe.grid.cutoff,
            probe.grid.p_max,
            probe.grid.hbar,
            grid.cutoff,
            grid.p_max,
            grid.hbar
        )));
    }
    let c = commutator_matrix(grid);
    let n = grid.size();
    let trace = (0..n).map(|m| c[(m, m)]).sum::<Complex64>().norm();
    let max_diagonal = (0..n).map(|m| c[(m, m)].norm()).fold(0.0, f64::max);
    if trace > 1e-10 || max_diagonal > 1e-10 {
        return Err(Error::InternalInvariantViolation {
            what: "[x, p] has nonzero diagonal".into(),
            discrepancy: trace.max(max_diagonal),
        });
    }
    let rho = probe.to_position();
    let mut expectation = Complex64::new(0.0, 0.0);
    for m in 0..n {
        for k in 0..n {
            expectation += rho.matrix[(k, m)] * c[(m, k)];
        }
    }
    let deviation = (expectation - Complex64::new(0.0, grid.hbar)).norm();
    Ok(CommutatorCheck {
        expectation,
        deviation,
        trace,
        max_diagonal,
    })
}

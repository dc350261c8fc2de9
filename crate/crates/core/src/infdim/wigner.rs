//! Phase-space route: Tr ρ² = 2πħ ∬ W² dx dp.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

use super::cv::{CvState, Representation};
use crate::error::{Error, Result};

/// W(x, p) on a uniform grid with inclusive endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerSamples {
    x_range: (f64, f64),
    p_range: (f64, f64),
    x_steps: usize,
    p_steps: usize,
    /// `values[ix * p_steps + ip]`.
    values: Vec<f64>,
    tolerance: f64,
}

impl WignerSamples {
    pub const DEFAULT_TOLERANCE: f64 = 1e-3;

    /// `tolerance` bounds |ΔxΔpΣW − 1|.
    pub fn new(
        x_range: (f64, f64),
        p_range: (f64, f64),
        x_steps: usize,
        p_steps: usize,
        values: Vec<f64>,
        tolerance: f64,
    ) -> Result<Self> {
        if x_steps < 2 || p_steps < 2 {
            return Err(Error::InvalidParameter(
                "Wigner grid needs at least 2 steps per axis".into(),
            ));
        }
        if !(x_range.1 > x_range.0) || !(p_range.1 > p_range.0) {
            return Err(Error::InvalidParameter(
                "Wigner grid ranges must be increasing".into(),
            ));
        }
        if values.len() != x_steps * p_steps {
            return Err(Error::EntryCount {
                expected: x_steps * p_steps,
                found: values.len(),
            });
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: k / p_steps,
                col: k % p_steps,
            });
        }
        let w = Self {
            x_range,
            p_range,
            x_steps,
            p_steps,
            values,
            tolerance,
        };
        w.check_normalized()?;
        Ok(w)
    }

    pub fn from_fn(
        x_range: (f64, f64),
        p_range: (f64, f64),
        x_steps: usize,
        p_steps: usize,
        w: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        let step = |r: (f64, f64), n: usize| (r.1 - r.0) / (n.max(2) - 1) as f64;
        let (hx, hp) = (step(x_range, x_steps), step(p_range, p_steps));
        let mut values = Vec::with_capacity(x_steps * p_steps);
        for ix in 0..x_steps {
            let x = x_range.0 + ix as f64 * hx;
            for ip in 0..p_steps {
                values.push(w(x, p_range.0 + ip as f64 * hp));
            }
        }
        Self::new(
            x_range,
            p_range,
            x_steps,
            p_steps,
            values,
            Self::DEFAULT_TOLERANCE,
        )
    }

    fn check_normalized(&self) -> Result<()> {
        let total = self.normalization();
        if !((total - 1.0).abs() <= self.tolerance) {
            return Err(Error::NotNormalized {
                total,
                tolerance: self.tolerance,
            });
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_range.1 - self.x_range.0) / (self.x_steps - 1) as f64
    }

    pub fn dp(&self) -> f64 {
        (self.p_range.1 - self.p_range.0) / (self.p_steps - 1) as f64
    }

    /// ΔxΔpΣW.
    pub fn normalization(&self) -> f64 {
        self.dx() * self.dp() * self.values.iter().sum::<f64>()
    }

    pub fn x_range(&self) -> (f64, f64) {
        self.x_range
    }

    pub fn p_range(&self) -> (f64, f64) {
        self.p_range
    }

    pub fn steps(&self) -> (usize, usize) {
        (self.x_steps, self.p_steps)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, ix: usize, ip: usize) -> f64 {
        self.values[ix * self.p_steps + ip]
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// The same samples multiplied by `factor`, validated again.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.x_range,
            self.p_range,
            self.x_steps,
            self.p_steps,
            self.values.iter().map(|v| v * factor).collect(),
            self.tolerance,
        )
    }
}

/// √(2πħ ΔxΔp ΣW²).
pub fn p_inf_wigner(w: &WignerSamples, hbar: f64) -> Result<f64> {
    if !(hbar > 0.0) || !hbar.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "hbar must be > 0, got {}",
            hbar
        )));
    }
    w.check_normalized()?;
    let sq: f64 = w.values.iter().map(|v| v * v).sum();
    Ok((2.0 * PI * hbar * w.dx() * w.dp() * sq).sqrt())
}

/// Wigner function of a thermal oscillator state whose vacuum has position
/// spread `sigma_x` (momentum spread ħ/(2σ_x)). `nbar = 0` is the vacuum.
pub fn thermal_wigner(
    hbar: f64,
    sigma_x: f64,
    nbar: f64,
    x_range: (f64, f64),
    p_range: (f64, f64),
    steps: usize,
) -> Result<WignerSamples> {
    if !(hbar > 0.0) || !(sigma_x > 0.0) || !(nbar >= 0.0) {
        return Err(Error::InvalidParameter(
            "thermal Wigner function needs hbar > 0, sigma_x > 0, nbar >= 0".into(),
        ));
    }
    let sigma_p = hbar / (2.0 * sigma_x);
    let g = 2.0 * nbar + 1.0;
    let norm = 1.0 / (2.0 * PI * sigma_x * sigma_p * g);
    WignerSamples::from_fn(x_range, p_range, steps, steps, |x, p| {
        norm * (-x * x / (2.0 * sigma_x * sigma_x * g) - p * p / (2.0 * sigma_p * sigma_p * g))
            .exp()
    })
}

/// Bilinear interpolation of `g` at fractional indices `(a, b)`.
fn bilinear(g: &DMatrix<Complex64>, a: f64, b: f64) -> Complex64 {
    let last = g.nrows() - 1;
    let i = (a.floor() as usize).min(last - 1);
    let j = (b.floor() as usize).min(last - 1);
    let (s, t) = (a - i as f64, b - j as f64);
    g[(i, j)] * ((1.0 - s) * (1.0 - t))
        + g[(i + 1, j)] * (s * (1.0 - t))
        + g[(i, j + 1)] * ((1.0 - s) * t)
        + g[(i + 1, j + 1)] * (s * t)
}

/// How G is evaluated between lattice points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Interpolation {
    /// Continuation through the momentum basis, ⟨x|p_j⟩ = e^{ixp_j/ħ}/√(2D+1).
    /// Exact at every half-lattice point for the finite state space.
    #[default]
    BandLimited,
    /// Bilinear interpolation of Ḡ/Δx between lattice points.
    Linear,
}

/// G on the half lattice x_a = aΔx/2, a ∈ [−2D, 2D].
fn half_lattice_kernel(s: &CvState, method: Interpolation) -> DMatrix<Complex64> {
    let grid = s.grid();
    let d = grid.cutoff() as i64;
    let n = grid.size();
    let m = 4 * grid.cutoff() + 1;
    let inv_dx = Complex64::new(1.0 / grid.dx(), 0.0);
    match method {
        Interpolation::Linear => {
            let g = s.matrix() * inv_dx;
            DMatrix::from_fn(m, m, |a, b| bilinear(&g, 0.5 * a as f64, 0.5 * b as f64))
        }
        Interpolation::BandLimited => {
            let gamma = s.to_momentum();
            // x_a p_j/ħ = π·aj/(2D+1).
            let period = 2 * n as i64;
            let scale = 1.0 / (n as f64).sqrt();
            let e = DMatrix::from_fn(m, n, |a, j| {
                let k = ((a as i64 - 2 * d) * (j as i64 - d)).rem_euclid(period);
                Complex64::from_polar(scale, PI * k as f64 / n as f64)
            });
            &e * gamma.matrix() * e.adjoint() * inv_dx
        }
    }
}

/// W(x, p) = (1/πħ) ∫ G(x+y, x−y) e^{−2ipy/ħ} dy on an `x_steps`×`p_steps`
/// grid spanning [x_{−D}, x_D] × [−p_max, p_max], with band-limited
/// continuation of G.
pub fn wigner_from_cv(s: &CvState, x_steps: usize, p_steps: usize) -> Result<WignerSamples> {
    wigner_from_cv_with(s, x_steps, p_steps, Interpolation::BandLimited)
}

/// As [`wigner_from_cv`] with a chosen continuation of G.
///
/// The y integral is a Riemann sum with step Δx/2. Output abscissae on the
/// half lattice (x_steps − 1 dividing 4D) need no further interpolation;
/// others are bilinearly interpolated between half-lattice values.
pub fn wigner_from_cv_with(
    s: &CvState,
    x_steps: usize,
    p_steps: usize,
    method: Interpolation,
) -> Result<WignerSamples> {
    if s.representation() != Representation::Position {
        return Err(Error::GridMismatch(
            "Wigner transform needs the position representation".into(),
        ));
    }
    if x_steps < 2 || p_steps < 2 {
        return Err(Error::InvalidParameter(
            "Wigner grid needs at least 2 steps per axis".into(),
        ));
    }
    let grid = s.grid();
    let d = grid.cutoff() as f64;
    let (dx, hbar) = (grid.dx(), grid.hbar());
    let x_range = (-d * dx, d * dx);
    let p_range = (-grid.p_max(), grid.p_max());
    let g2 = half_lattice_kernel(s, method);
    let top = 4.0 * d;
    let hy = dx / 2.0;
    let hx_out = (x_range.1 - x_range.0) / (x_steps - 1) as f64;
    let hp_out = (p_range.1 - p_range.0) / (p_steps - 1) as f64;
    let prefactor = hy / (PI * hbar);

    let rows: Vec<Vec<f64>> = (0..x_steps)
        .into_par_iter()
        .map(|ix| {
            // Half-lattice coordinate of x, index 0 at x_{−D}.
            let mut u = (ix as f64 * hx_out / hy).clamp(0.0, top);
            if (u - u.round()).abs() < 1e-9 {
                u = u.round();
            }
            let reach = u.min(top - u).floor() as usize;
            let samples: Vec<Complex64> = (0..=reach)
                .map(|k| bilinear(&g2, u + k as f64, u - k as f64))
                .collect();
            (0..p_steps)
                .map(|ip| {
                    let p = p_range.0 + ip as f64 * hp_out;
                    let step = Complex64::from_polar(1.0, -2.0 * p * hy / hbar);
                    let mut phase = Complex64::new(1.0, 0.0);
                    let mut acc = 0.0;
                    for g_k in &samples[1..] {
                        phase *= step;
                        acc += (g_k * phase).re;
                    }
                    prefactor * (samples[0].re + 2.0 * acc)
                })
                .collect()
        })
        .collect();
    WignerSamples::new(
        x_range,
        p_range,
        x_steps,
        p_steps,
        rows.into_iter().flatten().collect(),
        WignerSamples::DEFAULT_TOLERANCE,
    )
}

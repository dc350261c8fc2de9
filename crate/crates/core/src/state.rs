//! Finite-dimensional density matrices: construction, validation, spectra,
//! serialization and seeded random generation.
//!
//! A [`DensityMatrix`] can only be obtained through [`validate_density`] (or a
//! constructor that calls it), so every downstream measure may assume a
//! Hermitian, positive semidefinite, unit-trace input. Unnormalized classical
//! coherence matrices must be divided by their trace before validation.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde_json::{json, Value};
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::format;

/// Default slack for the physicality checks in [`validate_density`].
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Eigenvalues closer than this are treated as one degenerate block.
const DEGENERACY_TOLERANCE: f64 = 1e-12;

/// A dense complex matrix with finite entries, before any physical validation.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(
                "matrix dimensions must be positive".into(),
            ));
        }
        if entries.len() != rows * cols {
            return Err(Error::EntryCount {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(rows, cols, entries))
    }

    /// Convenience for literals: real row-major entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let ncols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::InvalidParameter("ragged rows".into()));
        }
        let entries: Vec<Complex64> = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)))
            .collect();
        Self::from_row_major(rows.len(), ncols, &entries)
    }

    pub fn new(inner: DMatrix<Complex64>) -> Result<Self> {
        for i in 0..inner.nrows() {
            for j in 0..inner.ncols() {
                let z = inner[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self { inner })
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.inner
    }
}

/// A validated N×N density matrix (N ≥ 2): Hermitian, PSD, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: DMatrix<Complex64>,
    tolerance: f64,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    /// Real parts of the diagonal, i.e. the populations in the stored basis.
    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// 𝟙/N.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall { dim });
        }
        let m = DMatrix::from_diagonal_element(dim, dim, Complex64::new(1.0 / dim as f64, 0.0));
        validate_density(&ComplexMatrix::new(m)?, DEFAULT_TOLERANCE)
    }

    /// Diagonal state with the given populations.
    pub fn from_diagonal(populations: &[f64]) -> Result<Self> {
        let n = populations.len();
        let d = DVector::from_iterator(n, populations.iter().map(|&p| Complex64::new(p, 0.0)));
        validate_density(
            &ComplexMatrix::new(DMatrix::from_diagonal(&d))?,
            DEFAULT_TOLERANCE,
        )
    }

    /// |ψ⟩⟨ψ| for a (not necessarily normalized) nonzero vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let v = DVector::from_column_slice(amplitudes);
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter(
                "pure state needs a nonzero finite vector".into(),
            ));
        }
        let v = v / Complex64::new(norm, 0.0);
        validate_density(&ComplexMatrix::new(&v * v.adjoint())?, DEFAULT_TOLERANCE)
    }

    /// U ρ U†, re-validated.
    pub fn conjugated_by(&self, u: &DMatrix<Complex64>) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::WrongDimension {
                expected: self.dim(),
                found: u.nrows(),
            });
        }
        let m = u * &self.matrix * u.adjoint();
        validate_density(&ComplexMatrix::new(m)?, self.tolerance)
    }
}

/// Eigen-decomposition of a density matrix, eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    /// Column k is the eigenvector paired with `eigenvalues[k]`.
    pub eigenvectors: DMatrix<Complex64>,
}

impl Spectrum {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Σ λ_k |ψ_k⟩⟨ψ_k|.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut out = DMatrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let v = self.eigenvectors.column(k);
            out += (v * v.adjoint()) * Complex64::new(lambda, 0.0);
        }
        out
    }
}

/// Checks the physicality of `m` and returns it as a density matrix.
///
/// Eigenvalues in `[-tol, 0)` are clamped to zero and the trace is restored
/// to one; the stored matrix is always exactly Hermitian.
pub fn validate_density(m: &ComplexMatrix, tol: f64) -> Result<DensityMatrix> {
    if !(tol >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tolerance must be non-negative, got {}",
            tol
        )));
    }
    let a = m.as_matrix();
    let (rows, cols) = a.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let n = rows;
    if n < 2 {
        return Err(Error::DimensionTooSmall { dim: n });
    }

    let mut worst = (0, 0, 0.0_f64);
    for i in 0..n {
        for j in i..n {
            let dev = (a[(i, j)] - a[(j, i)].conj()).norm();
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

    let trace: f64 = (0..n).map(|i| a[(i, i)].re).sum();
    if (trace - 1.0).abs() > tol {
        return Err(Error::NotUnitTrace { trace });
    }

    let mut h = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
    let (values, vectors) = hermitian_eigen(&h)?;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -tol {
        return Err(Error::NotPSD {
            min_eigenvalue: min,
        });
    }
    if min < 0.0 {
        let clamped: Vec<f64> = values.iter().map(|&x| x.max(0.0)).collect();
        let total: f64 = clamped.iter().sum();
        let mut rebuilt = DMatrix::zeros(n, n);
        for (k, &lambda) in clamped.iter().enumerate() {
            let v = vectors.column(k);
            rebuilt += (v * v.adjoint()) * Complex64::new(lambda / total, 0.0);
        }
        h = (&rebuilt + rebuilt.adjoint()) * Complex64::new(0.5, 0.0);
    }

    let rho = DensityMatrix {
        matrix: h,
        tolerance: tol,
    };
    let p = purity(&rho);
    if p > 1.0 + tol {
        return Err(Error::PurityOutOfRange { purity: p });
    }
    Ok(rho)
}

/// Raw Hermitian eigen-decomposition; order unspecified.
pub(crate) fn hermitian_eigen(h: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let n = h.nrows();
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, 1000 * n.max(1))
        .ok_or(Error::EigenSolverFailure { dim: n })?;
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if values.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenSolverFailure { dim: n });
    }
    Ok((values, eig.eigenvectors))
}

/// Descending eigenvalues with a canonical eigenbasis.
///
/// Inside a degenerate block the eigenvectors are rebuilt from the block's
/// projector applied to the standard basis (largest residual first), phased
/// so that the first nonzero component is real positive, and ordered by
/// descending lexicographic comparison of their components. The result
/// depends only on the eigenspaces, not on the solver's internal choices.
///
/// Eigenvalues below zero are rounding on a validated state and clamp to 0.
pub fn spectral_decompose(rho: &DensityMatrix) -> Result<Spectrum> {
    let mut spec = spectral_decompose_hermitian(rho.matrix())?;
    spec.eigenvalues.iter_mut().for_each(|l| *l = l.max(0.0));
    Ok(spec)
}

pub(crate) fn spectral_decompose_hermitian(h: &DMatrix<Complex64>) -> Result<Spectrum> {
    let n = h.nrows();
    let (values, vectors) = hermitian_eigen(h)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[b].partial_cmp(&values[a]).unwrap_or(Ordering::Equal));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = DMatrix::zeros(n, n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end - 1]] - values[order[end]] <= DEGENERACY_TOLERANCE {
            end += 1;
        }
        let block: Vec<usize> = order[start..end].to_vec();
        let mean = block.iter().map(|&k| values[k]).sum::<f64>() / block.len() as f64;
        let mut basis: Vec<DVector<Complex64>> = if block.len() == 1 {
            vec![phase_fixed(vectors.column(block[0]).into_owned())]
        } else {
            canonical_block_basis(&vectors, &block)
        };
        if block.len() > 1 {
            basis.sort_by(lexicographic);
        }
        for (offset, v) in basis.into_iter().enumerate() {
            eigenvectors.set_column(start + offset, &v);
            eigenvalues.push(if block.len() == 1 {
                values[block[0]]
            } else {
                mean
            });
        }
        start = end;
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn canonical_block_basis(vectors: &DMatrix<Complex64>, block: &[usize]) -> Vec<DVector<Complex64>> {
    let n = vectors.nrows();
    let cols: Vec<DVector<Complex64>> = block
        .iter()
        .map(|&k| vectors.column(k).into_owned())
        .collect();
    // P e_k for every standard basis vector.
    let mut candidates: Vec<DVector<Complex64>> = (0..n)
        .map(|k| {
            let mut p = DVector::zeros(n);
            for c in &cols {
                p += c * c[k].conj();
            }
            p
        })
        .collect();
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(block.len());
    while basis.len() < block.len() {
        let (best, norm) = candidates
            .iter()
            .enumerate()
            .map(|(k, c)| (k, c.norm()))
            .fold(
                (0, -1.0),
                |acc, (k, v)| if v > acc.1 { (k, v) } else { acc },
            );
        let v = candidates[best].clone() / Complex64::new(norm, 0.0);
        for c in candidates.iter_mut() {
            let overlap = v.dotc(c);
            *c -= &v * overlap;
        }
        basis.push(phase_fixed(v));
    }
    basis
}

fn phase_fixed(mut v: DVector<Complex64>) -> DVector<Complex64> {
    if let Some(z) = v.iter().copied().find(|z| z.norm() > 1e-12) {
        let phase = z.conj() / z.norm();
        v *= phase;
    }
    v
}

fn lexicographic(a: &DVector<Complex64>, b: &DVector<Complex64>) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)) {
            Ordering::Equal => continue,
            other => return other.reverse(),
        }
    }
    Ordering::Equal
}

/// Tr(ρ²) = Σ_ij |ρ_ij|².
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

/// Ensemble for [`random_state`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RandomKind {
    /// |ψ⟩⟨ψ| with |ψ⟩ uniform on the unit sphere.
    HaarPure,
    /// GG†/Tr(GG†) with G square complex Ginibre.
    GinibreMixed,
    /// As `GinibreMixed` but G is N×k, so the state has rank k.
    Rank(usize),
}

impl std::str::FromStr for RandomKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haar_pure" | "haar-pure" => Ok(RandomKind::HaarPure),
            "ginibre_mixed" | "ginibre-mixed" => Ok(RandomKind::GinibreMixed),
            other => {
                let k = other
                    .strip_prefix("rank_k:")
                    .or_else(|| other.strip_prefix("rank:"))
                    .or_else(|| other.strip_prefix("rank_"))
                    .ok_or_else(|| Error::Parse(format!("unknown state kind '{}'", other)))?;
                k.parse()
                    .map(RandomKind::Rank)
                    .map_err(|_| Error::Parse(format!("bad rank in '{}'", other)))
            }
        }
    }
}

pub(crate) fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub(crate) fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<Complex64> {
    // Filled row by row so the stream-to-entry mapping is easy to reproduce.
    let mut g = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            g[(i, j)] = complex_gaussian(rng);
        }
    }
    g
}

/// Seeded random density matrix. The same `(dim, kind, seed)` always yields
/// the same matrix.
pub fn random_state(dim: usize, kind: RandomKind, seed: u64) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall { dim });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = match kind {
        RandomKind::HaarPure => {
            let g = ginibre(&mut rng, dim, 1);
            let v = g.column(0).into_owned() / Complex64::new(g.norm(), 0.0);
            &v * v.adjoint()
        }
        RandomKind::GinibreMixed => normalized_gram(ginibre(&mut rng, dim, dim)),
        RandomKind::Rank(k) => {
            if k == 0 || k > dim {
                return Err(Error::InvalidRank { rank: k, dim });
            }
            normalized_gram(ginibre(&mut rng, dim, k))
        }
    };
    validate_density(&ComplexMatrix::new(m)?, 1e-10)
}

fn normalized_gram(g: DMatrix<Complex64>) -> DMatrix<Complex64> {
    let gg = &g * g.adjoint();
    let tr: f64 = (0..gg.nrows()).map(|i| gg[(i, i)].re).sum();
    let gg = gg / Complex64::new(tr, 0.0);
    (&gg + gg.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `{"dim": N, "matrix": [[[re, im], ...], ...]}` with 17 significant digits.
pub fn state_to_json(rho: &DensityMatrix) -> Value {
    json!({
        "dim": rho.dim(),
        "matrix": format::matrix_rows(rho.matrix()),
    })
}

pub fn write_state(rho: &DensityMatrix) -> String {
    format::to_pretty(&state_to_json(rho))
}

/// Parses and validates a state file. Parse failures carry line and column.
pub fn read_state(text: &str, tol: f64) -> Result<DensityMatrix> {
    let v = format::parse_json(text)?;
    state_from_json(&v, tol)
}

pub fn state_from_json(v: &Value, tol: f64) -> Result<DensityMatrix> {
    let obj = v
        .as_object()
        .ok_or_else(|| Error::Parse("state file must be a JSON object".into()))?;
    let dim = obj
        .get("dim")
        .and_then(Value::as_u64)
        .ok_or_else(|| Error::Parse("missing integer \"dim\"".into()))? as usize;
    let matrix = obj
        .get("matrix")
        .ok_or_else(|| Error::Parse("missing \"matrix\"".into()))?;
    let (rows, cols, entries) = format::parse_matrix_rows(matrix)?;
    if rows != dim || cols != dim {
        return Err(Error::Parse(format!(
            "\"dim\" is {} but matrix is {}x{}",
            dim, rows, cols
        )));
    }
    validate_density(&ComplexMatrix::from_row_major(rows, cols, &entries)?, tol)
}

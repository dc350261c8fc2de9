//! Generalized Gell-Mann basis and the Bloch-vector representation of a
//! density matrix.
//!
//! Basis vectors |1⟩..|N⟩ are the standard coordinate vectors. Indices are
//! 1-based everywhere in this module, matching the usual labelling of the
//! generators: symmetric `U_jk` and antisymmetric `V_jk` for `1 ≤ j < k ≤ N`
//! (enumerated with `j` outer), and diagonal `W_l` for `1 ≤ l ≤ N-1`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde_json::{Map, Value};
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::format;
use crate::state::{validate_density, ComplexMatrix, DensityMatrix, DEFAULT_TOLERANCE};

/// The N²−1 traceless Hermitian generators of SU(N), normalized so that
/// Tr(Λ_a Λ_b) = 2δ_ab.
#[derive(Debug, Clone)]
pub struct GellMannBasis {
    dim: usize,
    pub symmetric: Vec<((usize, usize), DMatrix<Complex64>)>,
    pub antisymmetric: Vec<((usize, usize), DMatrix<Complex64>)>,
    pub diagonal: Vec<(usize, DMatrix<Complex64>)>,
}

impl GellMannBasis {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// All generators in export order: U's, then V's, then W's.
    pub fn matrices(&self) -> impl Iterator<Item = &DMatrix<Complex64>> {
        self.symmetric
            .iter()
            .map(|(_, m)| m)
            .chain(self.antisymmetric.iter().map(|(_, m)| m))
            .chain(self.diagonal.iter().map(|(_, m)| m))
    }

    pub fn len(&self) -> usize {
        self.symmetric.len() + self.antisymmetric.len() + self.diagonal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Pairs (j, k) with 1 ≤ j < k ≤ N, j outer.
pub fn index_pairs(dim: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=dim).flat_map(move |j| (j + 1..=dim).map(move |k| (j, k)))
}

pub fn gellmann_basis(dim: usize) -> Result<GellMannBasis> {
    if dim < 2 {
        return Err(Error::DimensionTooSmall { dim });
    }
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut symmetric = Vec::new();
    let mut antisymmetric = Vec::new();
    for (j, k) in index_pairs(dim) {
        let mut u = DMatrix::zeros(dim, dim);
        u[(j - 1, k - 1)] = one;
        u[(k - 1, j - 1)] = one;
        symmetric.push(((j, k), u));

        let mut v = DMatrix::zeros(dim, dim);
        v[(j - 1, k - 1)] = -i;
        v[(k - 1, j - 1)] = i;
        antisymmetric.push(((j, k), v));
    }
    let diagonal = (1..dim)
        .map(|l| {
            let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
            let mut w = DMatrix::zeros(dim, dim);
            for m in 0..l {
                w[(m, m)] = Complex64::new(scale, 0.0);
            }
            w[(l, l)] = Complex64::new(-(l as f64) * scale, 0.0);
            (l, w)
        })
        .collect();
    Ok(GellMannBasis {
        dim,
        symmetric,
        antisymmetric,
        diagonal,
    })
}

/// Real Bloch components of a state, keyed by generator label.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochVector {
    dim: usize,
    pub u: BTreeMap<(usize, usize), f64>,
    pub v: BTreeMap<(usize, usize), f64>,
    pub w: BTreeMap<usize, f64>,
}

impl BlochVector {
    /// The Bloch origin, which represents 𝟙/N.
    pub fn zero(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall { dim });
        }
        Ok(Self {
            dim,
            u: index_pairs(dim).map(|p| (p, 0.0)).collect(),
            v: index_pairs(dim).map(|p| (p, 0.0)).collect(),
            w: (1..dim).map(|l| (l, 0.0)).collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.u.len() + self.v.len() + self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Components flattened as all u (pair order), all v, then all w.
    pub fn to_flat(&self) -> Vec<f64> {
        self.u
            .values()
            .chain(self.v.values())
            .chain(self.w.values())
            .copied()
            .collect()
    }

    pub fn from_flat(dim: usize, flat: &[f64]) -> Result<Self> {
        let mut b = Self::zero(dim)?;
        if flat.len() != b.len() {
            return Err(Error::ComponentCount {
                expected: b.len(),
                found: flat.len(),
            });
        }
        let mut it = flat.iter().copied();
        for x in
            b.u.values_mut()
                .chain(b.v.values_mut())
                .chain(b.w.values_mut())
        {
            *x = it.next().expect("length checked");
        }
        Ok(b)
    }

    fn check_keys(&self) -> Result<()> {
        let expected = self.dim * self.dim - 1;
        let pairs_ok =
            |m: &BTreeMap<(usize, usize), f64>| m.keys().copied().eq(index_pairs(self.dim));
        let diag_ok = self.w.keys().copied().eq(1..self.dim);
        if !pairs_ok(&self.u) || !pairs_ok(&self.v) || !diag_ok {
            return Err(Error::ComponentCount {
                expected,
                found: self.len(),
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let pairs = |m: &BTreeMap<(usize, usize), f64>| {
            Value::Object(
                m.iter()
                    .map(|(&(j, k), &x)| (format!("{},{}", j, k), format::num(x)))
                    .collect::<Map<_, _>>(),
            )
        };
        let mut obj = Map::new();
        obj.insert("dim".into(), Value::from(self.dim));
        obj.insert("u".into(), pairs(&self.u));
        obj.insert("v".into(), pairs(&self.v));
        obj.insert(
            "w".into(),
            Value::Object(
                self.w
                    .iter()
                    .map(|(&l, &x)| (l.to_string(), format::num(x)))
                    .collect(),
            ),
        );
        Value::Object(obj)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Parse("Bloch vector must be a JSON object".into()))?;
        let dim = obj
            .get("dim")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("missing integer \"dim\"".into()))?
            as usize;
        let section = |name: &str| {
            obj.get(name)
                .and_then(Value::as_object)
                .ok_or_else(|| Error::Parse(format!("missing object \"{}\"", name)))
        };
        let number = |x: &Value| {
            x.as_f64()
                .ok_or_else(|| Error::Parse(format!("expected a number, found {}", x)))
        };
        let pair_key = |key: &str| -> Result<(usize, usize)> {
            let (j, k) = key
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("bad pair key \"{}\"", key)))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Parse(format!("bad pair key \"{}\"", key)))
            };
            Ok((parse(j)?, parse(k)?))
        };
        let mut b = BlochVector {
            dim,
            u: BTreeMap::new(),
            v: BTreeMap::new(),
            w: BTreeMap::new(),
        };
        for (key, x) in section("u")? {
            b.u.insert(pair_key(key)?, number(x)?);
        }
        for (key, x) in section("v")? {
            b.v.insert(pair_key(key)?, number(x)?);
        }
        for (key, x) in section("w")? {
            let l = key
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad diagonal key \"{}\"", key)))?;
            b.w.insert(l, number(x)?);
        }
        if dim < 2 {
            return Err(Error::DimensionTooSmall { dim });
        }
        b.check_keys()?;
        Ok(b)
    }
}

/// Bloch components from the density-matrix entries.
pub fn to_bloch(rho: &DensityMatrix) -> BlochVector {
    let n = rho.dim();
    let nf = n as f64;
    let pref = (nf / (2.0 * (nf - 1.0))).sqrt();
    let i = Complex64::new(0.0, 1.0);
    let mut b = BlochVector::zero(n).expect("density matrices have N >= 2");
    for (j, k) in index_pairs(n) {
        let rjk = rho.entry(j - 1, k - 1);
        let rkj = rho.entry(k - 1, j - 1);
        b.u.insert((j, k), (pref * (rjk + rkj)).re);
        b.v.insert((j, k), (i * pref * (rjk - rkj)).re);
    }
    for l in 1..n {
        let lf = l as f64;
        let partial: f64 = (0..l).map(|m| rho.entry(m, m).re).sum();
        let scale = (nf / (lf * (lf + 1.0) * (nf - 1.0))).sqrt();
        b.w.insert(l, scale * (partial - lf * rho.entry(l, l).re));
    }
    b
}

/// Rebuilds ρ = (1/N)[𝟙 + √(N(N−1)/2) Σ r_a Λ_a] and checks that it is a
/// physical state; points of the unit ball outside the state body are
/// rejected with [`Error::NotPSD`].
pub fn from_bloch(b: &BlochVector) -> Result<DensityMatrix> {
    if b.dim < 2 {
        return Err(Error::DimensionTooSmall { dim: b.dim });
    }
    b.check_keys()?;
    let n = b.dim;
    let nf = n as f64;
    let basis = gellmann_basis(n)?;
    let mut sum = DMatrix::<Complex64>::zeros(n, n);
    for ((key, m), x) in basis.symmetric.iter().zip(b.u.values()) {
        debug_assert!(b.u.contains_key(key));
        sum += m * Complex64::new(*x, 0.0);
    }
    for ((_, m), x) in basis.antisymmetric.iter().zip(b.v.values()) {
        sum += m * Complex64::new(*x, 0.0);
    }
    for ((_, m), x) in basis.diagonal.iter().zip(b.w.values()) {
        sum += m * Complex64::new(*x, 0.0);
    }
    let scale = (nf * (nf - 1.0) / 2.0).sqrt();
    let rho =
        (DMatrix::identity(n, n) + sum * Complex64::new(scale, 0.0)) / Complex64::new(nf, 0.0);
    validate_density(&ComplexMatrix::new(rho)?, DEFAULT_TOLERANCE)
}

/// Euclidean norm of the Bloch vector.
pub fn bloch_norm(b: &BlochVector) -> f64 {
    b.u.values()
        .chain(b.v.values())
        .chain(b.w.values())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{KappaError, Result};

/// Ambient norm on R^d.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    L1,
    #[default]
    L2,
    #[serde(rename = "linf")]
    LInf,
}

impl NormKind {
    /// The dual norm under the dot-product pairing.
    pub fn dual(self) -> NormKind {
        match self {
            NormKind::L1 => NormKind::LInf,
            NormKind::L2 => NormKind::L2,
            NormKind::LInf => NormKind::L1,
        }
    }

    pub fn eval(self, v: &[f64]) -> f64 {
        match self {
            NormKind::L1 => v.iter().map(|x| x.abs()).sum(),
            NormKind::L2 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            NormKind::LInf => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }
}

/// A point of X = R^d.
#[derive(Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(coords: Vec<f64>) -> Self {
        Vector(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Vector(vec![0.0; dim])
    }

    /// The i-th standard basis vector of R^dim.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        Vector(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|x| x.is_finite())
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn norm_with(&self, kind: NormKind) -> f64 {
        kind.eval(&self.0)
    }

    pub fn distance(&self, other: &Vector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|x| x * s).collect())
    }

    /// `self + s * other`
    pub fn axpy(&self, s: f64, other: &Vector) -> Vector {
        Vector(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() != expected {
            return Err(KappaError::DimensionMismatch {
                expected,
                found: self.dim(),
            });
        }
        Ok(())
    }
}

impl From<Vec<f64>> for Vector {
    fn from(v: Vec<f64>) -> Self {
        Vector(v)
    }
}

impl<const N: usize> From<[f64; N]> for Vector {
    fn from(v: [f64; N]) -> Self {
        Vector(v.to_vec())
    }
}

impl Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, s: f64) -> Vector {
        self.scale(s)
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

/// Gram-Schmidt on `vectors`, dropping those (numerically) dependent on the
/// ones already accepted.
pub(crate) fn orthonormalize(vectors: &[Vector], tol: f64) -> Vec<Vector> {
    let mut out: Vec<Vector> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        // two passes keep the result orthonormal to ~1e-15
        for _ in 0..2 {
            for q in &out {
                w = w.axpy(-w.dot(q), q);
            }
        }
        let n = w.norm();
        if n > tol {
            out.push(w.scale(1.0 / n));
        }
    }
    out
}

/// Orthonormal basis of the orthogonal complement of span(`basis`) in R^dim.
pub fn complement_basis(basis: &[Vector], dim: usize) -> Vec<Vector> {
    let mut all = basis.to_vec();
    let k = all.len();
    all.extend((0..dim).map(|i| Vector::unit(dim, i)));
    let q = orthonormalize(&all, 1e-8);
    q.into_iter().skip(k).collect()
}

/// Orthogonal projection of `v` onto the complement of an orthonormal family.
pub(crate) fn reject(v: &Vector, orthonormal: &[Vector]) -> Vector {
    orthonormal.iter().fold(v.clone(), |w, q| w.axpy(-v.dot(q), q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_agree_with_definitions() {
        let v = Vector::from([3.0, -4.0]);
        assert_eq!(v.norm_with(NormKind::L1), 7.0);
        assert_eq!(v.norm_with(NormKind::L2), 5.0);
        assert_eq!(v.norm_with(NormKind::LInf), 4.0);
        assert_eq!(NormKind::L1.dual(), NormKind::LInf);
    }

    #[test]
    fn complement_of_a_line_in_the_plane() {
        let c = complement_basis(&[Vector::from([1.0, 0.0])], 2);
        assert_eq!(c.len(), 1);
        assert!((c[0][1].abs() - 1.0).abs() < 1e-15);
        assert!(c[0][0].abs() < 1e-15);
    }

    #[test]
    fn norm_kind_serializes_lowercase() {
        assert_eq!(serde_json::to_string(&NormKind::LInf).unwrap(), "\"linf\"");
        let k: NormKind = serde_json::from_str("\"l1\"").unwrap();
        assert_eq!(k, NormKind::L1);
    }
}

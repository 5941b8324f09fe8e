//! Points, complex directions, the ℂⁿ ↔ ℝ²ⁿ identification and a small
//! cyclic Jacobi eigensolver.
//!
//! The identification is fixed once: complex coordinate `k` (0-based) has its
//! real part at real index `2k` and its imaginary part at `2k + 1`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// A point of ℝ²ⁿ ≅ ℂⁿ in real coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RealPoint(pub Vec<f64>);

/// A direction in ℂⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(pub Vec<C64>);

impl RealPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() || !coords.len().is_multiple_of(2) {
            return Err(Error::Argument(format!(
                "a point needs an even, positive number of real coordinates, got {}",
                coords.len()
            )));
        }
        Ok(RealPoint(coords))
    }

    pub fn zeros(n: usize) -> Self {
        RealPoint(vec![0.0; 2 * n])
    }

    pub fn from_complex(z: &[C64]) -> Self {
        RealPoint(z.iter().flat_map(|c| [c.re, c.im]).collect())
    }

    pub fn to_complex(&self) -> Vec<C64> {
        self.0.chunks(2).map(|c| C64::new(c[0], c[1])).collect()
    }

    /// Complex dimension n.
    pub fn n(&self) -> usize {
        self.0.len() / 2
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `self + t·dir`
    pub fn offset(&self, dir: &[f64], t: f64) -> RealPoint {
        RealPoint(self.0.iter().zip(dir).map(|(a, b)| a + t * b).collect())
    }

    pub fn dist(&self, other: &RealPoint) -> f64 {
        norm(&sub(&self.0, &other.0))
    }
}

impl ComplexVector {
    pub fn new(entries: Vec<C64>) -> Self {
        ComplexVector(entries)
    }

    pub fn zeros(n: usize) -> Self {
        ComplexVector(vec![C64::new(0.0, 0.0); n])
    }

    /// The `k`-th standard basis vector of ℂⁿ.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[k] = C64::new(1.0, 0.0);
        v
    }

    pub fn from_real(x: &[f64]) -> Self {
        ComplexVector(x.chunks(2).map(|c| C64::new(c[0], c[1])).collect())
    }

    pub fn to_real(&self) -> Vec<f64> {
        self.0.iter().flat_map(|c| [c.re, c.im]).collect()
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hermitian product Σ a_k · conj(b_k).
    pub fn hdot(&self, other: &ComplexVector) -> C64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    /// Multiplication by i, exact in floating point.
    pub fn mul_i(&self) -> ComplexVector {
        ComplexVector(self.0.iter().map(|c| C64::new(-c.im, c.re)).collect())
    }

    pub fn scale(&self, s: C64) -> ComplexVector {
        ComplexVector(self.0.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, other: &ComplexVector) -> ComplexVector {
        ComplexVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &ComplexVector) -> ComplexVector {
        ComplexVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn normalized(&self) -> ComplexVector {
        let nrm = self.norm();
        self.scale(C64::new(1.0 / nrm, 0.0))
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Multiplication by i on real coordinates: (x, y) ↦ (−y, x) per complex slot.
pub fn mul_i_real(x: &[f64]) -> Vec<f64> {
    x.chunks(2).flat_map(|c| [-c[1], c[0]]).collect()
}

/// Real 2n×2n matrix of the ℂ-linear map `u`.
pub fn real_rep(u: &DMatrix<C64>) -> DMatrix<f64> {
    let n = u.nrows();
    let mut a = DMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        for l in 0..u.ncols() {
            let c = u[(k, l)];
            a[(2 * k, 2 * l)] = c.re;
            a[(2 * k, 2 * l + 1)] = -c.im;
            a[(2 * k + 1, 2 * l)] = c.im;
            a[(2 * k + 1, 2 * l + 1)] = c.re;
        }
    }
    a
}

/// max |U^*U − I|, entrywise.
pub fn unitarity_defect(u: &DMatrix<C64>) -> f64 {
    let g = u.adjoint() * u;
    let mut worst: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - C64::new(target, 0.0)).norm());
        }
    }
    worst
}

/// Largest absolute eigenvalue of a symmetric matrix.
pub fn spectral_norm_sym(a: &DMatrix<f64>) -> f64 {
    if a.nrows() == 0 {
        return 0.0;
    }
    let (vals, _) = sym_eigen(a);
    vals.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
///
/// Eigenvalues are returned in ascending order; eigenvectors are the matching
/// columns of the second return value.
pub fn sym_eigen(a: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let m = a.nrows();
    let mut a = (a + a.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(m, m);
    let scale = a.norm();
    if scale == 0.0 {
        return (vec![0.0; m], v);
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..m {
            for q in (p + 1)..m {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= 1e-17 * scale {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..m {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let vals = order.iter().map(|&i| a[(i, i)]).collect();
    let vecs = DMatrix::from_fn(m, m, |r, c| v[(r, order[c])]);
    (vals, vecs)
}

/// Real symmetric embedding [[A, −B], [B, A]] of the Hermitian matrix A + iB.
fn hermitian_embedding(h: &DMatrix<C64>) -> DMatrix<f64> {
    let n = h.nrows();
    DMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = h[(r % n, c % n)];
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn herm_eigenvalues(h: &DMatrix<C64>) -> Vec<f64> {
    let (vals, _) = sym_eigen(&hermitian_embedding(h));
    // embedding doubles every eigenvalue
    vals.into_iter().step_by(2).collect()
}

/// Smallest eigenvalue of a Hermitian matrix with a unit eigenvector `w`
/// (so that w^* H w is minimal).
pub fn herm_min_eig(h: &DMatrix<C64>) -> (f64, ComplexVector) {
    let n = h.nrows();
    let (vals, vecs) = sym_eigen(&hermitian_embedding(h));
    let w = ComplexVector((0..n).map(|k| C64::new(vecs[(k, 0)], vecs[(k + n, 0)])).collect());
    (vals[0], w.normalized())
}

/// Solve a small dense linear system, `None` when singular.
pub fn solve(a: DMatrix<f64>, b: &[f64]) -> Option<Vec<f64>> {
    let rhs = DVector::from_column_slice(b);
    a.lu().solve(&rhs).map(|x| x.iter().copied().collect())
}

/// Orthonormal basis of the Hermitian complement of a unit vector `nv`:
/// Gram–Schmidt over the standard basis, skipping the coordinate where `nv`
/// is largest.
pub fn complex_complement(nv: &ComplexVector) -> Vec<ComplexVector> {
    let n = nv.n();
    let skip = (0..n)
        .max_by(|&a, &b| nv.0[a].norm().total_cmp(&nv.0[b].norm()))
        .unwrap_or(0);
    let mut basis: Vec<ComplexVector> = Vec::with_capacity(n.saturating_sub(1));
    for k in (0..n).filter(|&k| k != skip) {
        let mut v = ComplexVector::basis(n, k);
        for _ in 0..2 {
            for u in std::iter::once(nv).chain(basis.iter()) {
                let c = v.hdot(u);
                v = v.sub(&u.scale(c));
            }
        }
        basis.push(v.normalized());
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn identification_round_trip() {
        let z = vec![C64::new(1.0, -2.0), C64::new(0.5, 3.0)];
        let p = RealPoint::from_complex(&z);
        assert_eq!(p.0, vec![1.0, -2.0, 0.5, 3.0]);
        assert_eq!(p.to_complex(), z);
        let v = ComplexVector(z.clone());
        assert_eq!(ComplexVector::from_real(&v.to_real()), v);
    }

    #[test]
    fn mul_i_agrees_between_representations() {
        let v = ComplexVector(vec![C64::new(0.3, -0.7), C64::new(-1.1, 0.2)]);
        assert_eq!(v.mul_i().to_real(), mul_i_real(&v.to_real()));
        assert_eq!(v.mul_i().mul_i(), v.scale(C64::new(-1.0, 0.0)));
    }

    #[test]
    fn jacobi_matches_nalgebra() {
        let a = DMatrix::from_row_slice(
            4,
            4,
            &[
                4.0, 1.0, -2.0, 0.5, 1.0, 3.0, 0.0, -1.0, -2.0, 0.0, 1.0, 2.0, 0.5, -1.0, 2.0, -3.0,
            ],
        );
        let (vals, vecs) = sym_eigen(&a);
        let mut reference: Vec<f64> = a.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        reference.sort_by(f64::total_cmp);
        for (x, y) in vals.iter().zip(&reference) {
            assert_relative_eq!(x, y, epsilon = 1e-12);
        }
        let recon = &vecs * DMatrix::from_diagonal(&DVector::from_vec(vals.clone())) * vecs.transpose();
        assert!((recon - a).norm() < 1e-12);
    }

    #[test]
    fn hermitian_eigen() {
        // [[2, i], [-i, 2]] has eigenvalues 1 and 3
        let h = DMatrix::from_row_slice(
            2,
            2,
            &[C64::new(2.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0), C64::new(2.0, 0.0)],
        );
        let vals = herm_eigenvalues(&h);
        assert_relative_eq!(vals[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(vals[1], 3.0, epsilon = 1e-14);
        let (lmin, w) = herm_min_eig(&h);
        let hw = &h * DVector::from_vec(w.0.clone());
        let rayleigh: C64 = w.0.iter().zip(hw.iter()).map(|(a, b)| a.conj() * b).sum();
        assert_relative_eq!(rayleigh.re, lmin, epsilon = 1e-13);
    }

    #[test]
    fn real_rep_of_rotation() {
        let u = DMatrix::from_row_slice(1, 1, &[C64::new(0.0, 1.0)]);
        let a = real_rep(&u);
        assert_eq!(a.as_slice(), &[0.0, 1.0, -1.0, 0.0]); // column-major
        assert!(unitarity_defect(&u) < 1e-15);
    }
}

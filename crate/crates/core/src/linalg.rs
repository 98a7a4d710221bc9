//! Dense complex matrices and vectors.
//!
//! Everything here is small and dense: the largest object the crate builds is
//! the 1024×1024 joint density matrix at d = 32. Storage is row-major.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::LinalgError;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Default tolerance for density-matrix validation.
pub const DENSITY_TOL: f64 = 1e-10;

/// Tolerance on the squared norm of a [`StateVector`].
pub const NORM_TOL: f64 = 1e-12;

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self, LinalgError> {
        if rows == 0 || cols == 0 {
            return Err(LinalgError::EmptyDimension);
        }
        if data.len() != rows * cols {
            return Err(LinalgError::EntryCount {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if let Some(pos) = data
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(LinalgError::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Real-valued convenience constructor, mostly for tests.
    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self, LinalgError> {
        Self::new(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &z) in diag.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a == ZERO {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square() && self.max_abs_diff(&self.dagger()) <= tol
    }

    /// Eigenvalues of the Hermitian part `(A + A†)/2`, ascending.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>, LinalgError> {
        self.require_square()?;
        let n = self.rows;
        let herm = Mat::<C64>::from_fn(n, n, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5);
        let mut eig = herm
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| LinalgError::EigenSolver)?;
        eig.sort_by(f64::total_cmp);
        Ok(eig)
    }

    pub(crate) fn require_square(&self) -> Result<(), LinalgError> {
        if self.is_square() {
            Ok(())
        } else {
            Err(LinalgError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ai in 0..a.rows {
        for aj in 0..a.cols {
            let s = a[(ai, aj)];
            if s == ZERO {
                continue;
            }
            for bi in 0..b.rows {
                for bj in 0..b.cols {
                    out[(ai * b.rows + bi, aj * b.cols + bj)] = s * b[(bi, bj)];
                }
            }
        }
    }
    out
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.dagger()
}

/// True iff every entry of `A†A − I` has modulus at most `tol`.
pub fn is_unitary(a: &ComplexMatrix, tol: f64) -> Result<bool, LinalgError> {
    a.require_square()?;
    let gram = a.dagger().matmul(a);
    Ok(gram.max_abs_diff(&ComplexMatrix::identity(a.rows)) <= tol)
}

/// Hermitian, unit trace and positive semidefinite, each to within `tol`.
pub fn validate_density(rho: &ComplexMatrix, tol: f64) -> Result<bool, LinalgError> {
    rho.require_square()?;
    if !rho.is_hermitian(tol) {
        return Ok(false);
    }
    if (rho.trace() - ONE).norm() > tol {
        return Ok(false);
    }
    let min_eig = rho.hermitian_eigenvalues()?[0];
    Ok(min_eig >= -tol)
}

/// Applies `a ⊗ b` from the left to a matrix whose row index is the joint
/// index `i_a * db + i_b`. Costs O(da·db·(da + db)·cols) instead of the
/// O((da·db)²·cols) of forming the Kronecker product.
pub fn apply_local_left(m: &ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.rows, b.rows);
    assert!(
        a.is_square() && b.is_square(),
        "local operators must be square"
    );
    assert_eq!(m.rows, da * db, "row dimension must equal da*db");
    let cols = m.cols;

    // Contract the second factor.
    let mut half = ComplexMatrix::zeros(m.rows, cols);
    for ia in 0..da {
        for kb in 0..db {
            let dst = &mut half.data[(ia * db + kb) * cols..(ia * db + kb + 1) * cols];
            for ib in 0..db {
                let w = b[(kb, ib)];
                if w == ZERO {
                    continue;
                }
                let src = m.row(ia * db + ib);
                for (o, &x) in dst.iter_mut().zip(src) {
                    *o += w * x;
                }
            }
        }
    }

    // Then the first.
    let mut out = ComplexMatrix::zeros(m.rows, cols);
    for ka in 0..da {
        for ia in 0..da {
            let w = a[(ka, ia)];
            if w == ZERO {
                continue;
            }
            for kb in 0..db {
                let src = &half.data[(ia * db + kb) * cols..(ia * db + kb + 1) * cols];
                let dst = &mut out.data[(ka * db + kb) * cols..(ka * db + kb + 1) * cols];
                for (o, &x) in dst.iter_mut().zip(src) {
                    *o += w * x;
                }
            }
        }
    }
    out
}

/// `(a ⊗ b) ρ (a ⊗ b)†` without materialising the Kronecker product.
pub fn conjugate_local(rho: &ComplexMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let left = apply_local_left(rho, a, b);
    apply_local_left(&left.dagger(), a, b).dagger()
}

/// A normalized pure state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self, LinalgError> {
        if amplitudes.is_empty() {
            return Err(LinalgError::EmptyDimension);
        }
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(LinalgError::NonFiniteVector);
        }
        let norm_sqr: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOL {
            return Err(LinalgError::NotNormalized { norm_sqr });
        }
        Ok(Self { amplitudes })
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self, LinalgError> {
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(LinalgError::NotNormalized {
                norm_sqr: norm * norm,
            });
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Self::new(amplitudes)
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(
            index < dim,
            "basis index {index} out of range for dimension {dim}"
        );
        let mut amplitudes = vec![ZERO; dim];
        amplitudes[index] = ONE;
        Self { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|ψ⟩⟨ψ|`
    pub fn projector(&self) -> ComplexMatrix {
        let n = self.dim();
        ComplexMatrix::from_fn(n, n, |i, j| self.amplitudes[i] * self.amplitudes[j].conj())
    }

    /// Applies a unitary. The result is renormalized to absorb rounding.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self, LinalgError> {
        if u.cols() != self.dim() {
            return Err(LinalgError::ShapeMismatch {
                expected: self.dim(),
                found: u.cols(),
            });
        }
        Self::normalized(u.matvec(&self.amplitudes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn h2() -> ComplexMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        ComplexMatrix::from_real(2, 2, &[s, s, s, -s]).unwrap()
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(kron(&i2, &i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_of_flip_with_identity_swaps_blocks() {
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let got = kron(&x, &ComplexMatrix::identity(2));
        let want = ComplexMatrix::from_real(
            4,
            4,
            &[
                0.0, 0.0, 1.0, 0.0, //
                0.0, 0.0, 0.0, 1.0, //
                1.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0,
            ],
        )
        .unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn kron_hadamards_spread_zero_state_uniformly() {
        let hh = kron(&h2(), &h2());
        let out = hh.matvec(StateVector::basis(4, 0).amplitudes());
        for z in out {
            assert!((z - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn kron_dimensions() {
        let a = ComplexMatrix::zeros(2, 3);
        let b = ComplexMatrix::zeros(4, 5);
        let k = kron(&a, &b);
        assert_eq!((k.rows(), k.cols()), (8, 15));
    }

    #[test]
    fn dagger_examples() {
        assert_eq!(
            dagger(&ComplexMatrix::identity(3)),
            ComplexMatrix::identity(3)
        );
        let a = ComplexMatrix::new(2, 2, vec![ZERO, c(0.0, 1.0), ZERO, ZERO]).unwrap();
        let want = ComplexMatrix::new(2, 2, vec![ZERO, ZERO, c(0.0, -1.0), ZERO]).unwrap();
        assert_eq!(dagger(&a), want);
    }

    #[test]
    fn unitary_checks() {
        assert!(is_unitary(&ComplexMatrix::identity(4), 1e-12).unwrap());
        let d = ComplexMatrix::from_diagonal(&[ONE, c(2.0, 0.0)]);
        assert!(!is_unitary(&d, 1e-12).unwrap());
        assert!(matches!(
            is_unitary(&ComplexMatrix::zeros(2, 3), 1e-12),
            Err(LinalgError::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn validate_density_examples() {
        let mixed = ComplexMatrix::identity(4).scale(c(0.25, 0.0));
        assert!(validate_density(&mixed, DENSITY_TOL).unwrap());

        // |0><0| with a negative population pushed past the tolerance,
        // trace kept at one.
        let mut bad = StateVector::basis(2, 0).projector();
        bad[(0, 0)] = c(1.0 + 1e-6, 0.0);
        bad[(1, 1)] = c(-1e-6, 0.0);
        assert!(!validate_density(&bad, DENSITY_TOL).unwrap());

        let non_herm =
            ComplexMatrix::new(2, 2, vec![c(0.5, 0.0), c(0.1, 0.0), ZERO, c(0.5, 0.0)]).unwrap();
        assert!(!validate_density(&non_herm, DENSITY_TOL).unwrap());

        let wrong_trace = ComplexMatrix::identity(2);
        assert!(!validate_density(&wrong_trace, DENSITY_TOL).unwrap());

        assert!(validate_density(&ComplexMatrix::zeros(3, 2), DENSITY_TOL).is_err());
    }

    #[test]
    fn eigenvalues_of_rank_one_projectors() {
        for dim in [4, 16, 64, 256] {
            let amp = c(1.0 / (dim as f64).sqrt(), 0.0);
            let v = StateVector::new(vec![amp; dim]).unwrap();
            let eig = v.projector().hermitian_eigenvalues().unwrap();
            assert_eq!(eig.len(), dim);
            assert!((eig[dim - 1] - 1.0).abs() < 1e-12);
            assert!(eig[..dim - 1].iter().all(|e| e.abs() < 1e-12));
        }
        let m = ComplexMatrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(1.0, 0.0)],
        )
        .unwrap();
        let eig = m.hermitian_eigenvalues().unwrap();
        assert!(eig[0].abs() < 1e-12 && (eig[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn constructor_rejects_bad_input() {
        assert!(matches!(
            ComplexMatrix::new(2, 2, vec![ONE; 3]),
            Err(LinalgError::EntryCount {
                expected: 4,
                found: 3
            })
        ));
        assert!(matches!(
            ComplexMatrix::new(0, 2, vec![]),
            Err(LinalgError::EmptyDimension)
        ));
        assert!(matches!(
            ComplexMatrix::new(1, 2, vec![ONE, c(f64::NAN, 0.0)]),
            Err(LinalgError::NonFinite { row: 0, col: 1 })
        ));
    }

    #[test]
    fn state_vector_norm_is_enforced() {
        assert!(StateVector::new(vec![ONE, ONE]).is_err());
        let s = StateVector::normalized(vec![ONE, ONE]).unwrap();
        assert!((s.inner(&s).re - 1.0).abs() < 1e-15);
        assert!(StateVector::normalized(vec![ZERO, ZERO]).is_err());
    }

    fn int_matrix(rows: usize, cols: usize) -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec((-3i32..=3, -3i32..=3), rows * cols).prop_map(move |v| {
            ComplexMatrix::new(
                rows,
                cols,
                v.into_iter().map(|(r, i)| c(r as f64, i as f64)).collect(),
            )
            .unwrap()
        })
    }

    fn complex_matrix(n: usize) -> impl Strategy<Value = ComplexMatrix> {
        proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), n * n).prop_map(move |v| {
            ComplexMatrix::new(n, n, v.into_iter().map(|(r, i)| c(r, i)).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn kron_is_associative_on_integer_matrices(
            a in int_matrix(2, 3), b in int_matrix(3, 2), m in int_matrix(2, 2)
        ) {
            prop_assert_eq!(kron(&kron(&a, &b), &m), kron(&a, &kron(&b, &m)));
        }

        #[test]
        fn dagger_is_an_involution(a in complex_matrix(4)) {
            prop_assert_eq!(a.dagger().dagger(), a);
        }

        #[test]
        fn local_conjugation_matches_dense_kron(
            a in complex_matrix(3), b in complex_matrix(3), rho in complex_matrix(9)
        ) {
            let k = kron(&a, &b);
            let dense = k.matmul(&rho).matmul(&k.dagger());
            prop_assert!(conjugate_local(&rho, &a, &b).max_abs_diff(&dense) < 1e-12);
        }

        #[test]
        fn kron_of_unitaries_is_unitary(t1 in 0.0f64..6.3, t2 in 0.0f64..6.3) {
            let rot = |t: f64| ComplexMatrix::new(2, 2, vec![
                c(t.cos(), 0.0), c(0.0, -t.sin()), c(0.0, -t.sin()), c(t.cos(), 0.0),
            ]).unwrap();
            prop_assert!(is_unitary(&kron(&rot(t1), &rot(t2)), 1e-12).unwrap());
        }
    }
}

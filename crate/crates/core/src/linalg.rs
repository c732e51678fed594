//! Dense symmetric linear algebra for small regression problems.
//!
//! Everything here is sized for autoregressive Gram matrices (dimension up to
//! a few tens), so storage is a plain row-major `Vec`.

use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

/// Relative pivot tolerance: a Cholesky pivot must exceed this fraction of
/// the largest diagonal entry.
pub const PIVOT_TOLERANCE: f64 = 1e-12;

/// Number of rank-one updates after which [`TrackedSpd`] rebuilds its inverse
/// and log-determinant from a fresh factorization.
pub const REFACTOR_INTERVAL: usize = 1000;

/// Square symmetric matrix. Every write goes to both `(i, j)` and `(j, i)`,
/// so the stored entries are exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix<S> {
    dim: usize,
    data: Vec<S>,
}

impl<S: Scalar> SymMatrix<S> {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be at least 1");
        Self {
            dim,
            data: vec![S::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = S::one();
        }
        m
    }

    pub fn from_diag(diag: &[S]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * m.dim + i] = d;
        }
        m
    }

    /// Builds a matrix from rows, rejecting non-square or asymmetric input.
    pub fn from_rows(rows: &[Vec<S>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                got: 0,
            });
        }
        let mut m = Self::zeros(dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                if v != rows[j][i] {
                    return Err(Error::InvalidConfig(format!(
                        "matrix is not symmetric at ({i}, {j})"
                    )));
                }
                m.data[i * dim + j] = v;
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.dim + j] = v;
        self.data[j * self.dim + i] = v;
    }

    pub fn row(&self, i: usize) -> &[S] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(v.len(), self.dim);
        (0..self.dim).map(|i| dot(self.row(i), v)).collect()
    }

    /// `v' M v`.
    pub fn quad_form(&self, v: &[S]) -> S {
        dot(v, &self.mul_vec(v))
    }

    pub fn max_diag(&self) -> S {
        (0..self.dim)
            .map(|i| self.get(i, i))
            .fold(S::zero(), |a, b| a.max(b))
    }

    /// In-place `M += v v'`.
    pub fn add_outer(&mut self, v: &[S]) {
        self.add_scaled_outer(v, S::one());
    }

    /// In-place `M += scale * v v'`.
    pub fn add_scaled_outer(&mut self, v: &[S], scale: S) {
        assert_eq!(v.len(), self.dim);
        for i in 0..self.dim {
            let vi = v[i] * scale;
            for j in i..self.dim {
                let updated = self.get(i, j) + vi * v[j];
                self.set(i, j, updated);
            }
        }
    }

    /// Returns `M + v v'`.
    pub fn rank_one_update(&self, v: &[S]) -> Self {
        let mut out = self.clone();
        out.add_outer(v);
        out
    }

    /// Row-major `M · N`; the product is not symmetric in general.
    pub fn matmul(&self, other: &Self) -> Vec<S> {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = vec![S::zero(); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                for j in 0..n {
                    out[i * n + j] = out[i * n + j] + a * other.get(k, j);
                }
            }
        }
        out
    }
}

/// Lower-triangular Cholesky factor `M = L L'`.
#[derive(Debug, Clone)]
pub struct Cholesky<S> {
    dim: usize,
    lower: Vec<S>,
}

impl<S: Scalar> Cholesky<S> {
    /// Factorizes `m`, failing with [`Error::SingularMatrix`] when a pivot
    /// drops below [`PIVOT_TOLERANCE`] times the largest diagonal entry.
    pub fn factor(m: &SymMatrix<S>) -> Result<Self> {
        let n = m.dim();
        let scale = m.max_diag();
        let threshold = S::lit(PIVOT_TOLERANCE) * scale;
        if !(scale > S::zero()) || !scale.is_finite() {
            return Err(Error::SingularMatrix {
                row: 0,
                pivot: scale.to_f64_lossy(),
            });
        }
        let mut lower = vec![S::zero(); n * n];
        for j in 0..n {
            let mut pivot = m.get(j, j);
            for k in 0..j {
                pivot = pivot - lower[j * n + k] * lower[j * n + k];
            }
            if !(pivot > threshold) {
                return Err(Error::SingularMatrix {
                    row: j,
                    pivot: pivot.to_f64_lossy(),
                });
            }
            let d = pivot.sqrt();
            lower[j * n + j] = d;
            for i in (j + 1)..n {
                let mut s = m.get(i, j);
                for k in 0..j {
                    s = s - lower[i * n + k] * lower[j * n + k];
                }
                lower[i * n + j] = s / d;
            }
        }
        Ok(Self { dim: n, lower })
    }

    pub fn solve(&self, rhs: &[S]) -> Vec<S> {
        let n = self.dim;
        assert_eq!(rhs.len(), n);
        let l = &self.lower;
        let mut y = rhs.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s = s - l[i * n + k] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s = s - l[k * n + i] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        y
    }

    pub fn log_det(&self) -> S {
        let two = S::lit(2.0);
        (0..self.dim)
            .map(|i| two * self.lower[i * self.dim + i].ln())
            .sum()
    }

    pub fn inverse(&self) -> SymMatrix<S> {
        let n = self.dim;
        let mut inv = SymMatrix::zeros(n);
        let mut e = vec![S::zero(); n];
        for j in 0..n {
            e.iter_mut().for_each(|x| *x = S::zero());
            e[j] = S::one();
            let col = self.solve(&e);
            for (i, &v) in col.iter().enumerate().skip(j) {
                inv.set(i, j, v);
            }
        }
        inv
    }
}

/// Solves `m x = rhs` for a symmetric positive definite `m`.
pub fn solve_spd<S: Scalar>(m: &SymMatrix<S>, rhs: &[S]) -> Result<Vec<S>> {
    if rhs.len() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: rhs.len(),
        });
    }
    Ok(Cholesky::factor(m)?.solve(rhs))
}

/// Natural-log determinant of a symmetric positive definite matrix.
pub fn log_det<S: Scalar>(m: &SymMatrix<S>) -> Result<S> {
    Ok(Cholesky::factor(m)?.log_det())
}

/// Ordinary least squares through the normal equations. `rows[i]` is the
/// regressor vector of observation `i` and `target[i]` its response.
pub fn least_squares<S: Scalar>(rows: &[Vec<S>], target: &[S]) -> Result<Vec<S>> {
    let k = rows.first().map(Vec::len).unwrap_or(0);
    if k == 0 {
        return Ok(Vec::new());
    }
    if rows.len() != target.len() {
        return Err(Error::DimensionMismatch {
            expected: rows.len(),
            got: target.len(),
        });
    }
    let mut gram = SymMatrix::zeros(k);
    let mut cross = vec![S::zero(); k];
    for (x, &y) in rows.iter().zip(target) {
        gram.add_outer(x);
        for (c, &xi) in cross.iter_mut().zip(x) {
            *c = *c + xi * y;
        }
    }
    solve_spd(&gram, &cross).map_err(|_| Error::SingularDesign)
}

/// Outcome of one [`TrackedSpd::rank_one_update`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankOneStep<S> {
    /// `v' M⁻¹ v` evaluated before the update.
    pub leverage: S,
    /// `log(1 + v' M⁻¹ v)`, the change in `log det M`.
    pub log_det_increment: S,
}

/// A positive definite matrix together with its explicitly maintained
/// inverse and log-determinant, updated in `O(n²)` per rank-one change.
#[derive(Debug, Clone)]
pub struct TrackedSpd<S> {
    matrix: SymMatrix<S>,
    inverse: SymMatrix<S>,
    log_det: S,
    since_refactor: usize,
    updates: usize,
}

impl<S: Scalar> TrackedSpd<S> {
    pub fn new(matrix: SymMatrix<S>) -> Result<Self> {
        let chol = Cholesky::factor(&matrix)?;
        Ok(Self {
            inverse: chol.inverse(),
            log_det: chol.log_det(),
            matrix,
            since_refactor: 0,
            updates: 0,
        })
    }

    pub fn matrix(&self) -> &SymMatrix<S> {
        &self.matrix
    }

    pub fn inverse(&self) -> &SymMatrix<S> {
        &self.inverse
    }

    pub fn log_det(&self) -> S {
        self.log_det
    }

    pub fn updates(&self) -> usize {
        self.updates
    }

    /// `M ← M + v v'` with the Sherman–Morrison inverse update and the
    /// matrix determinant lemma for the log-determinant.
    pub fn rank_one_update(&mut self, v: &[S]) -> RankOneStep<S> {
        let u = self.inverse.mul_vec(v);
        let leverage = dot(v, &u);
        let denom = S::one() + leverage;
        let log_det_increment = denom.ln();

        self.matrix.add_outer(v);
        self.inverse.add_scaled_outer(&u, -denom.recip());
        self.log_det = self.log_det + log_det_increment;
        self.updates += 1;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_INTERVAL {
            self.refactor();
        }
        RankOneStep {
            leverage,
            log_det_increment,
        }
    }

    /// Rebuilds inverse and log-determinant from a fresh factorization.
    /// Keeps the maintained values if the factorization fails.
    pub fn refactor(&mut self) {
        if let Ok(chol) = Cholesky::factor(&self.matrix) {
            self.inverse = chol.inverse();
            self.log_det = chol.log_det();
        }
        self.since_refactor = 0;
    }

    /// `‖M · M⁻¹ − I‖∞` for the maintained inverse.
    pub fn inverse_drift(&self) -> S {
        let n = self.matrix.dim();
        let prod = self.matrix.matmul(&self.inverse);
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let target = if i == j { S::one() } else { S::zero() };
                        (prod[i * n + j] - target).abs()
                    })
                    .fold(S::zero(), S::add)
            })
            .fold(S::zero(), S::max)
    }
}

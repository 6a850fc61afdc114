//! Matrices of jets and the pointwise linear algebra used by the pipeline.
//!
//! Jet-valued matrices carry chart fields (metric, shape operator, frame
//! vectors) together with their derivatives; `f64` spectral work is delegated
//! to nalgebra. Eigenvector signs follow one deterministic rule so that
//! frames vary continuously over the grids sampled by the checks.

use std::ops::Index;

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::jet::Jet;

/// Dense matrix with jet entries, row-major.
#[derive(Clone, Debug)]
pub struct JetMat {
    rows: usize,
    cols: usize,
    data: Vec<Jet>,
}

impl JetMat {
    pub fn from_fn<F: FnMut(usize, usize) -> Jet>(rows: usize, cols: usize, mut f: F) -> JetMat {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        JetMat { rows, cols, data }
    }

    pub fn identity_like(n: usize, sample: &Jet) -> JetMat {
        JetMat::from_fn(n, n, |i, j| {
            Jet::constant(sample.dim(), sample.order(), if i == j { 1.0 } else { 0.0 })
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn matmul(&self, rhs: &JetMat) -> JetMat {
        assert_eq!(self.cols, rhs.rows);
        JetMat::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = &self[(i, 0)] * &rhs[(0, j)];
            for k in 1..self.cols {
                acc = acc + &self[(i, k)] * &rhs[(k, j)];
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[Jet]) -> Vec<Jet> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = &self[(i, 0)] * &v[0];
                for k in 1..self.cols {
                    acc = acc + &self[(i, k)] * &v[k];
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> JetMat {
        JetMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn add(&self, rhs: &JetMat) -> JetMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        JetMat::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] + &rhs[(i, j)])
    }

    pub fn sub(&self, rhs: &JetMat) -> JetMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        JetMat::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] - &rhs[(i, j)])
    }

    pub fn scale_jet(&self, s: &Jet) -> JetMat {
        JetMat::from_fn(self.rows, self.cols, |i, j| &self[(i, j)] * s)
    }

    pub fn scale(&self, s: f64) -> JetMat {
        JetMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].scale(s))
    }

    pub fn trace(&self) -> Jet {
        assert_eq!(self.rows, self.cols);
        let mut acc = self[(0, 0)].clone();
        for i in 1..self.rows {
            acc = acc + &self[(i, i)];
        }
        acc
    }

    /// Matrix of the values at the expansion center.
    pub fn value(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].value())
    }

    /// Entry-wise partial derivative values with respect to chart variable `v`.
    pub fn derivative_value(&self, v: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)].derivative(v).value())
    }

    /// Inverse by Gauss-Jordan elimination with value-based partial pivoting.
    pub fn inverse(&self) -> Result<JetMat> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = JetMat::identity_like(n, &self[(0, 0)]);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| {
                    a[(i, col)]
                        .value()
                        .abs()
                        .total_cmp(&a[(j, col)].value().abs())
                })
                .unwrap();
            if a[(pivot, col)].value() == 0.0 {
                return Err(GeomError::DivisionByZeroAtCenter);
            }
            a.swap_rows(col, pivot);
            inv.swap_rows(col, pivot);
            let scale = a[(col, col)].try_recip()?;
            for j in 0..n {
                a.set(col, j, &a[(col, j)] * &scale);
                inv.set(col, j, &inv[(col, j)] * &scale);
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let factor = a[(i, col)].clone();
                if factor.value() == 0.0 && factor == Jet::constant(factor.dim(), factor.order(), 0.0) {
                    continue;
                }
                for j in 0..n {
                    a.set(i, j, &a[(i, j)] - &(&factor * &a[(col, j)]));
                    inv.set(i, j, &inv[(i, j)] - &(&factor * &inv[(col, j)]));
                }
            }
        }
        Ok(inv)
    }

    /// Determinant by cofactor expansion along the first column. Exact
    /// truncated polynomial arithmetic, no divisions; meant for sizes `<= 5`.
    pub fn det(&self) -> Jet {
        assert_eq!(self.rows, self.cols);
        let rows: Vec<usize> = (0..self.rows).collect();
        let cols: Vec<usize> = (0..self.cols).collect();
        self.det_sub(&rows, &cols)
    }

    fn det_sub(&self, rows: &[usize], cols: &[usize]) -> Jet {
        if rows.len() == 1 {
            return self[(rows[0], cols[0])].clone();
        }
        let rest: Vec<usize> = cols[1..].to_vec();
        let mut acc: Option<Jet> = None;
        for (k, &r) in rows.iter().enumerate() {
            let sub_rows: Vec<usize> =
                rows.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &x)| x).collect();
            let term = &self[(r, cols[0])] * &self.det_sub(&sub_rows, &rest);
            acc = Some(match acc {
                None => term,
                Some(a) => {
                    if k % 2 == 0 {
                        a + term
                    } else {
                        a - term
                    }
                }
            });
        }
        acc.unwrap()
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: Jet) {
        self.data[i * self.cols + j] = v;
    }
}

impl Index<(usize, usize)> for JetMat {
    type Output = Jet;
    fn index(&self, (i, j): (usize, usize)) -> &Jet {
        &self.data[i * self.cols + j]
    }
}

/// Euclidean generalized cross product of the columns of an `(n+1) x n`
/// matrix: the unique vector `N` with `<x, N> = det([x | M])` for all `x`.
/// It is orthogonal to every column and `[N | M]` is positively oriented.
pub fn cross_product_columns(m: &JetMat) -> Vec<Jet> {
    assert_eq!(m.rows(), m.cols() + 1);
    let cols: Vec<usize> = (0..m.cols()).collect();
    (0..m.rows())
        .map(|a| {
            let rows: Vec<usize> = (0..m.rows()).filter(|&r| r != a).collect();
            let minor = m.det_sub(&rows, &cols);
            if a % 2 == 0 {
                minor
            } else {
                -minor
            }
        })
        .collect()
}

/// Euclidean dot product of jet vectors.
pub fn dot(a: &[Jet], b: &[Jet]) -> Jet {
    assert_eq!(a.len(), b.len());
    let mut acc = &a[0] * &b[0];
    for k in 1..a.len() {
        acc = acc + &a[k] * &b[k];
    }
    acc
}

/// Flip eigenvector signs so the largest-magnitude component (lowest index on
/// ties) is positive. Keeps frames deterministic and, away from eigenvector
/// degeneracies, continuous in the matrix entries.
pub fn fix_column_signs(m: &mut DMatrix<f64>) {
    for mut col in m.column_iter_mut() {
        let mut best = 0;
        for i in 1..col.len() {
            if col[i].abs() > col[best].abs() + 1e-12 * col[best].abs() {
                best = i;
            }
        }
        if col[best] < 0.0 {
            col.neg_mut();
        }
    }
}

/// Eigen-decomposition of an operator `a` that is self-adjoint with respect
/// to a positive-definite metric `g`: returns eigenvalues in descending order
/// and a matrix of g-orthonormal eigenvector columns.
pub fn eigen_g_self_adjoint(a: &DMatrix<f64>, g: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let chol = nalgebra::Cholesky::new(g.clone()).ok_or(GeomError::MetricDegenerate {
        min_eigenvalue: g.clone().symmetric_eigen().eigenvalues.min(),
    })?;
    let l = chol.l();
    // B = L^T A L^{-T} is symmetric and similar to A.
    let lt_inv = l.transpose().try_inverse().expect("triangular inverse");
    let b = l.transpose() * a * &lt_inv;
    let b = (&b + b.transpose()) * 0.5;
    let eig = b.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &(&lt_inv * eig.eigenvectors.column(i)));
    }
    fix_column_signs(&mut vectors);
    Ok((values, vectors))
}

/// A g-orthonormal coordinate frame: the columns of `L^{-T}` for `g = L L^T`.
pub fn orthonormal_frame(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let chol = nalgebra::Cholesky::new(g.clone()).ok_or(GeomError::MetricDegenerate {
        min_eigenvalue: g.clone().symmetric_eigen().eigenvalues.min(),
    })?;
    Ok(chol.l().transpose().try_inverse().expect("triangular inverse"))
}

/// Frobenius norm of an operator taken in any g-orthonormal frame:
/// `sqrt(tr(T^t G T G^{-1}))`.
pub fn op_norm_g(t: &DMatrix<f64>, g: &DMatrix<f64>) -> f64 {
    let g_inv = g.clone().try_inverse().expect("metric inverse");
    (t.transpose() * g * t * g_inv).trace().max(0.0).sqrt()
}

/// Largest entry difference between two matrices, relative to the larger of
/// one and either entry scale.
pub fn rel_entry_gap(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = a.amax().max(b.amax()).max(1.0);
    (a - b).amax() / scale
}

/// Norm of a tangent vector in the metric `g`.
pub fn vec_norm_g(v: &DVector<f64>, g: &DMatrix<f64>) -> f64 {
    (v.transpose() * g * v)[(0, 0)].max(0.0).sqrt()
}

/// One cluster of numerically equal eigenvalues.
#[derive(Clone, Debug)]
pub struct Cluster {
    /// Mean of the member eigenvalues.
    pub value: f64,
    /// Positions in the descending eigenvalue list.
    pub members: Vec<usize>,
}

/// Group a descending eigenvalue list by gaps larger than
/// `rel_tol * max |eigenvalue|`.
pub fn cluster_eigenvalues(values: &[f64], rel_tol: f64) -> Vec<Cluster> {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = rel_tol * scale;
    let mut clusters: Vec<Cluster> = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i - 1] - values[i] > threshold {
            let members: Vec<usize> = (start..i).collect();
            let value = members.iter().map(|&k| values[k]).sum::<f64>() / members.len() as f64;
            clusters.push(Cluster { value, members });
            start = i;
        }
    }
    clusters
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn jc(v: f64) -> Jet {
        Jet::constant(2, 2, v)
    }

    #[test]
    fn jet_matrix_inverse_roundtrip() {
        let u = Jet::variables(2, 2, &[0.3, 0.8]);
        let m = JetMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => u[0].cosh(),
            (0, 1) => &u[0] * &u[1],
            (1, 0) => u[1].sin(),
            _ => u[0].exp() + 2.0,
        });
        let id = m.matmul(&m.inverse().unwrap());
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_relative_eq!(id[(i, j)].value(), want, epsilon = 1e-13);
                assert_relative_eq!(id[(i, j)].coeff(&[1, 1]), 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn determinant_matches_closed_form() {
        let m = JetMat::from_fn(3, 3, |i, j| jc([[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]][i][j]));
        // det = 2(12-1) - 1(4-0) = 18
        assert_relative_eq!(m.det().value(), 18.0, epsilon = 1e-14);
    }

    #[test]
    fn cross_product_is_orthogonal_and_oriented() {
        let u = Jet::variables(2, 2, &[0.4, -0.2]);
        // Columns: tangents of the graph (x, y, x^2 - y^2).
        let m = JetMat::from_fn(3, 2, |i, j| match (i, j) {
            (0, 0) => Jet::constant(2, 2, 1.0),
            (1, 1) => Jet::constant(2, 2, 1.0),
            (2, 0) => u[0].scale(2.0),
            (2, 1) => u[1].scale(-2.0),
            _ => Jet::constant(2, 2, 0.0),
        });
        let n = cross_product_columns(&m);
        for j in 0..2 {
            let col: Vec<Jet> = (0..3).map(|i| m[(i, j)].clone()).collect();
            assert_relative_eq!(dot(&n, &col).value(), 0.0, epsilon = 1e-14);
        }
        // Orientation: det([N | M]) = |N|^2 > 0.
        let full = JetMat::from_fn(3, 3, |i, j| if j == 0 { n[i].clone() } else { m[(i, j - 1)].clone() });
        assert!(full.det().value() > 0.0);
    }

    #[test]
    fn generalized_eigen_recovers_diagonal_data() {
        // A = diag(2, -1) seen through a non-orthonormal coordinate change.
        let p = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.0, 2.0]);
        let a0 = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, -1.0]);
        let a = &p * a0 * p.clone().try_inverse().unwrap();
        // g in which A is self-adjoint: pullback of the identity by P^{-1}.
        let p_inv = p.clone().try_inverse().unwrap();
        let g = p_inv.transpose() * &p_inv;
        let (vals, vecs) = eigen_g_self_adjoint(&a, &g).unwrap();
        assert_relative_eq!(vals[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(vals[1], -1.0, epsilon = 1e-12);
        let gram = vecs.transpose() * &g * &vecs;
        assert_relative_eq!(gram[(0, 0)], 1.0, epsilon = 1e-12);
        assert_relative_eq!(gram[(0, 1)], 0.0, epsilon = 1e-12);
        assert_relative_eq!(gram[(1, 1)], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn clustering_splits_on_large_gaps() {
        let values = [1.0, 1.0 + 1e-9, 0.5, -0.25, -0.25, -0.25];
        let clusters = cluster_eigenvalues(&values, 1e-6);
        let sizes: Vec<usize> = clusters.iter().map(|c| c.members.len()).collect();
        assert_eq!(sizes, vec![2, 1, 3]);
        assert_relative_eq!(clusters[2].value, -0.25);
    }

    #[test]
    fn clustering_all_equal_is_one_cluster() {
        let clusters = cluster_eigenvalues(&[3.0; 5], 1e-6);
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].members.len(), 5);
    }
}

//! Small dense linear algebra: SVD, symmetric eigenvalues, LU determinant.
//!
//! Matrices here are at most a few dozen rows, so everything is plain
//! row-major `Vec<f64>` storage without blocking.

#![allow(clippy::needless_range_loop)]

use std::ops::{Index, IndexMut};

use crate::error::SolverError;

/// Maximum implicit-QR sweeps per singular value.
pub const SVD_MAX_ITERATIONS: usize = 75;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    pub fn from_diag(d: &[f64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    fn to_nested(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `A = U diag(s) Vᵀ` with `s` sorted in descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Matrix,
    pub s: Vec<f64>,
    pub v: Matrix,
}

impl Svd {
    /// The `count` smallest singular values, ascending.
    pub fn smallest(&self, count: usize) -> Vec<f64> {
        self.s.iter().rev().take(count).copied().collect()
    }

    pub fn largest(&self) -> f64 {
        self.s.first().copied().unwrap_or(0.0)
    }

    /// Right singular vector belonging to the `i`-th smallest singular value.
    pub fn null_vector(&self, i: usize) -> Vec<f64> {
        self.v.column(self.s.len() - 1 - i)
    }
}

fn hypot(a: f64, b: f64) -> f64 {
    a.hypot(b)
}

fn with_sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Singular value decomposition of an `m x n` matrix with `m >= n` by
/// Householder bidiagonalization followed by implicit-shift QR sweeps.
pub fn svd(a: &Matrix) -> Result<Svd, SolverError> {
    let m = a.rows;
    let n = a.cols;
    assert!(m >= n, "svd expects rows >= cols");
    let mut u = a.to_nested();
    let mut w = vec![0.0; n];
    let mut v = vec![vec![0.0; n]; n];
    let mut rv1 = vec![0.0; n];
    let eps = f64::EPSILON;

    let (mut g, mut scale, mut anorm) = (0.0f64, 0.0f64, 0.0f64);
    let mut l = 0;
    for i in 0..n {
        l = i + 2;
        rv1[i] = scale * g;
        g = 0.0;
        let mut s = 0.0;
        scale = 0.0;
        if i < m {
            for row in u.iter().skip(i) {
                scale += row[i].abs();
            }
            if scale != 0.0 {
                for row in u.iter_mut().skip(i) {
                    row[i] /= scale;
                    s += row[i] * row[i];
                }
                let f = u[i][i];
                g = -with_sign(s.sqrt(), f);
                let h = f * g - s;
                u[i][i] = f - g;
                for j in (l - 1)..n {
                    let mut s = 0.0;
                    for row in u.iter().skip(i) {
                        s += row[i] * row[j];
                    }
                    let f = s / h;
                    for row in u.iter_mut().skip(i) {
                        row[j] += f * row[i];
                    }
                }
                for row in u.iter_mut().skip(i) {
                    row[i] *= scale;
                }
            }
        }
        w[i] = scale * g;
        g = 0.0;
        s = 0.0;
        scale = 0.0;
        if i < m && i + 1 != n {
            for k in (l - 1)..n {
                scale += u[i][k].abs();
            }
            if scale != 0.0 {
                for k in (l - 1)..n {
                    u[i][k] /= scale;
                    s += u[i][k] * u[i][k];
                }
                let f = u[i][l - 1];
                g = -with_sign(s.sqrt(), f);
                let h = f * g - s;
                u[i][l - 1] = f - g;
                for k in (l - 1)..n {
                    rv1[k] = u[i][k] / h;
                }
                for j in (l - 1)..m {
                    let mut s = 0.0;
                    for k in (l - 1)..n {
                        s += u[j][k] * u[i][k];
                    }
                    for k in (l - 1)..n {
                        u[j][k] += s * rv1[k];
                    }
                }
                for k in (l - 1)..n {
                    u[i][k] *= scale;
                }
            }
        }
        anorm = anorm.max(w[i].abs() + rv1[i].abs());
    }

    // Accumulate right-hand transformations.
    for i in (0..n).rev() {
        if i < n - 1 {
            if g != 0.0 {
                for j in l..n {
                    v[j][i] = (u[i][j] / u[i][l]) / g;
                }
                for j in l..n {
                    let mut s = 0.0;
                    for k in l..n {
                        s += u[i][k] * v[k][j];
                    }
                    for k in l..n {
                        v[k][j] += s * v[k][i];
                    }
                }
            }
            for j in l..n {
                v[i][j] = 0.0;
                v[j][i] = 0.0;
            }
        }
        v[i][i] = 1.0;
        g = rv1[i];
        l = i;
    }

    // Accumulate left-hand transformations.
    for i in (0..m.min(n)).rev() {
        let l = i + 1;
        let mut g = w[i];
        for j in l..n {
            u[i][j] = 0.0;
        }
        if g != 0.0 {
            g = 1.0 / g;
            for j in l..n {
                let mut s = 0.0;
                for row in u.iter().skip(l) {
                    s += row[i] * row[j];
                }
                let f = (s / u[i][i]) * g;
                for row in u.iter_mut().skip(i) {
                    row[j] += f * row[i];
                }
            }
            for row in u.iter_mut().skip(i) {
                row[i] *= g;
            }
        } else {
            for row in u.iter_mut().skip(i) {
                row[i] = 0.0;
            }
        }
        u[i][i] += 1.0;
    }

    // Diagonalize the bidiagonal form.
    for k in (0..n).rev() {
        let mut its = 0;
        loop {
            let mut flag = true;
            let mut l = k;
            loop {
                if l == 0 || rv1[l].abs() <= eps * anorm {
                    flag = false;
                    break;
                }
                if w[l - 1].abs() <= eps * anorm {
                    break;
                }
                l -= 1;
            }
            if flag {
                let nm = l - 1;
                let mut c = 0.0;
                let mut s = 1.0;
                for i in l..=k {
                    let f = s * rv1[i];
                    rv1[i] *= c;
                    if f.abs() <= eps * anorm {
                        break;
                    }
                    let g = w[i];
                    let mut h = hypot(f, g);
                    w[i] = h;
                    h = 1.0 / h;
                    c = g * h;
                    s = -f * h;
                    for row in u.iter_mut() {
                        let y = row[nm];
                        let z = row[i];
                        row[nm] = y * c + z * s;
                        row[i] = z * c - y * s;
                    }
                }
            }
            let z = w[k];
            if l == k {
                if z < 0.0 {
                    w[k] = -z;
                    for row in v.iter_mut() {
                        row[k] = -row[k];
                    }
                }
                break;
            }
            if its == SVD_MAX_ITERATIONS {
                return Err(SolverError::ConvergenceFailure(SVD_MAX_ITERATIONS));
            }
            its += 1;
            let mut x = w[l];
            let nm = k - 1;
            let mut y = w[nm];
            let mut g = rv1[nm];
            let mut h = rv1[k];
            let mut f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y);
            g = hypot(f, 1.0);
            f = ((x - z) * (x + z) + h * ((y / (f + with_sign(g, f))) - h)) / x;
            let mut c = 1.0;
            let mut s = 1.0;
            for j in l..=nm {
                let i = j + 1;
                g = rv1[i];
                y = w[i];
                h = s * g;
                g *= c;
                let mut z = hypot(f, h);
                rv1[j] = z;
                c = f / z;
                s = h / z;
                f = x * c + g * s;
                g = g * c - x * s;
                h = y * s;
                y *= c;
                for row in v.iter_mut() {
                    let xx = row[j];
                    let zz = row[i];
                    row[j] = xx * c + zz * s;
                    row[i] = zz * c - xx * s;
                }
                z = hypot(f, h);
                w[j] = z;
                if z != 0.0 {
                    z = 1.0 / z;
                    c = f * z;
                    s = h * z;
                }
                f = c * g + s * y;
                x = c * y - s * g;
                for row in u.iter_mut() {
                    let yy = row[j];
                    let zz = row[i];
                    row[j] = yy * c + zz * s;
                    row[i] = zz * c - yy * s;
                }
            }
            rv1[l] = 0.0;
            rv1[k] = f;
            w[k] = x;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]));
    let mut um = Matrix::zeros(m, n);
    let mut vm = Matrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for i in 0..m {
            um[(i, new)] = u[i][old];
        }
        for i in 0..n {
            vm[(i, new)] = v[i][old];
        }
    }
    Ok(Svd { u: um, s: order.iter().map(|&i| w[i]).collect(), v: vm })
}

/// The `count` smallest singular values of a square matrix, ascending.
pub fn smallest_singular_values(a: &Matrix, count: usize) -> Result<Vec<f64>, SolverError> {
    Ok(svd(a)?.smallest(count))
}

/// Eigenvalues (ascending) and eigenvectors (columns) of a symmetric matrix
/// by cyclic Jacobi rotations.
pub fn symmetric_eigen(a: &Matrix, want_vectors: bool) -> (Vec<f64>, Option<Matrix>) {
    let n = a.rows;
    assert_eq!(n, a.cols);
    let mut m = a.clone();
    let mut v = if want_vectors { Some(Matrix::identity(n)) } else { None };
    for _sweep in 0..100 {
        let mut off = 0.0;
        let mut diag = 0.0;
        for i in 0..n {
            diag += m[(i, i)] * m[(i, i)];
            for j in (i + 1)..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off <= 1e-30 * diag || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = with_sign(1.0, theta) / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                if let Some(v) = v.as_mut() {
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let vals = order.iter().map(|&i| m[(i, i)]).collect();
    let vecs = v.map(|v| {
        let mut out = Matrix::zeros(n, n);
        for (new, &old) in order.iter().enumerate() {
            for k in 0..n {
                out[(k, new)] = v[(k, old)];
            }
        }
        out
    });
    (vals, vecs)
}

/// Determinant by LU with partial pivoting.
pub fn determinant(a: &Matrix) -> f64 {
    let n = a.rows;
    assert_eq!(n, a.cols);
    let mut m = a.clone();
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        let mut best = m[(col, col)].abs();
        for r in (col + 1)..n {
            if m[(r, col)].abs() > best {
                best = m[(r, col)].abs();
                piv = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..n {
                m.data.swap(col * n + j, piv * n + j);
            }
            det = -det;
        }
        let d = m[(col, col)];
        det *= d;
        for r in (col + 1)..n {
            let f = m[(r, col)] / d;
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                let x = m[(col, j)];
                m[(r, j)] -= f * x;
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(s: &Svd) -> Matrix {
        let us = {
            let mut us = s.u.clone();
            for i in 0..us.rows() {
                for j in 0..us.cols() {
                    us[(i, j)] *= s.s[j];
                }
            }
            us
        };
        us.matmul(&s.v.transpose())
    }

    #[test]
    fn identity_singular_values() {
        let s = smallest_singular_values(&Matrix::identity(4), 4).unwrap();
        assert_eq!(s, vec![1.0; 4]);
    }

    #[test]
    fn diagonal_singular_values() {
        let s = smallest_singular_values(&Matrix::from_diag(&[3.0, 2.0, 1.0, 0.0]), 2).unwrap();
        assert!(s[0].abs() < 1e-15 && (s[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn svd_reconstructs() {
        let a = Matrix::from_rows(&[
            vec![1.0, 2.0, 3.0],
            vec![4.0, 5.0, 6.0],
            vec![7.0, 8.0, 10.0],
            vec![-1.0, 0.5, 2.0],
        ]);
        let s = svd(&a).unwrap();
        let r = reconstruct(&s);
        for i in 0..4 {
            for j in 0..3 {
                assert!((r[(i, j)] - a[(i, j)]).abs() < 1e-12);
            }
        }
        assert!(s.s.windows(2).all(|w| w[0] >= w[1]));
        let vtv = s.v.transpose().matmul(&s.v);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((vtv[(i, j)] - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rank_deficient_null_vector() {
        let a = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let s = svd(&a).unwrap();
        assert!(s.s[1].abs() < 1e-15);
        let x = s.null_vector(0);
        let ax = a.matvec(&x);
        assert!(ax.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn symmetric_eigen_small() {
        let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let (vals, vecs) = symmetric_eigen(&a, true);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        let v = vecs.unwrap();
        let x = v.column(1);
        let ax = a.matvec(&x);
        assert!((ax[0] - 3.0 * x[0]).abs() < 1e-13);
    }

    #[test]
    fn determinant_matches_closed_form() {
        let a = Matrix::from_rows(&[vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 0.0], vec![3.0, 0.0, 1.0]]);
        // 0*(1) - 2*(1-0) + 1*(0-3) = -5
        assert!((determinant(&a) + 5.0).abs() < 1e-13);
        assert_eq!(determinant(&Matrix::zeros(3, 3)), 0.0);
    }
}

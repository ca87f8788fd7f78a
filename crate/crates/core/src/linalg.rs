//! Dense row-major matrix and a Householder QR least-squares solver.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("ragged rows: row {row} has {found} columns, expected {expected}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("buffer of length {len} does not hold a {rows}x{cols} matrix")]
    Shape {
        rows: usize,
        cols: usize,
        len: usize,
    },
    #[error("singular system: design matrix is rank deficient")]
    RankDeficient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::Shape {
                rows,
                cols,
                len: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from row slices. An empty slice yields a 0x0 matrix.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, LinalgError> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(LinalgError::Ragged {
                    row: i,
                    expected: cols,
                    found: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
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

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.rows).map(move |i| self.row(i))
    }

    /// New matrix made of the listed rows, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Self {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: indices.len(),
            cols: self.cols,
            data,
        }
    }

    /// Prepends a column of ones.
    pub fn with_intercept(&self) -> Self {
        let cols = self.cols + 1;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.push(1.0);
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: self.rows,
            cols,
            data,
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Relative threshold on |R_kk| (columns are unit-norm before factoring).
const RANK_RTOL: f64 = 1e-10;

/// Minimizes `sum_i w_i (b_i - a_i . x)^2` by Householder QR.
///
/// Columns are equilibrated to unit norm before factoring so that a feature
/// measured in thousands (rpm) and one in tens (seconds) are judged for rank
/// on equal footing. `weights`, when given, must be nonnegative.
pub fn least_squares(
    a: &Matrix,
    b: &[f64],
    weights: Option<&[f64]>,
) -> Result<Vec<f64>, LinalgError> {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(b.len(), m, "rhs length must match row count");
    if m < n || n == 0 {
        return Err(LinalgError::RankDeficient);
    }

    let mut r = a.clone();
    let mut rhs = b.to_vec();
    if let Some(w) = weights {
        assert_eq!(w.len(), m, "weight length must match row count");
        for i in 0..m {
            let s = w[i].sqrt();
            rhs[i] *= s;
            for j in 0..n {
                r.set(i, j, r.get(i, j) * s);
            }
        }
    }

    let mut col_scale = vec![0.0; n];
    for (j, scale) in col_scale.iter_mut().enumerate() {
        let norm = (0..m).map(|i| r.get(i, j).powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(LinalgError::RankDeficient);
        }
        *scale = norm;
        for i in 0..m {
            r.set(i, j, r.get(i, j) / norm);
        }
    }

    let mut v = vec![0.0; m];
    for k in 0..n {
        let norm = (k..m).map(|i| r.get(i, k).powi(2)).sum::<f64>().sqrt();
        if norm <= RANK_RTOL {
            return Err(LinalgError::RankDeficient);
        }
        let x0 = r.get(k, k);
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        for (i, vi) in v.iter_mut().enumerate().skip(k) {
            *vi = r.get(i, k);
        }
        v[k] -= alpha;
        let vnorm2: f64 = (k..m).map(|i| v[i] * v[i]).sum();
        if vnorm2 > 0.0 {
            for j in k..n {
                let proj: f64 = (k..m).map(|i| v[i] * r.get(i, j)).sum::<f64>() * 2.0 / vnorm2;
                for (i, vi) in v.iter().enumerate().skip(k) {
                    r.set(i, j, r.get(i, j) - proj * vi);
                }
            }
            let proj: f64 = (k..m).map(|i| v[i] * rhs[i]).sum::<f64>() * 2.0 / vnorm2;
            for (ri, vi) in rhs[k..].iter_mut().zip(&v[k..]) {
                *ri -= proj * vi;
            }
        }
        if r.get(k, k).abs() <= RANK_RTOL {
            return Err(LinalgError::RankDeficient);
        }
    }

    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let tail: f64 = ((k + 1)..n).map(|j| r.get(k, j) * x[j]).sum();
        x[k] = (rhs[k] - tail) / r.get(k, k);
    }
    for (xj, s) in x.iter_mut().zip(&col_scale) {
        *xj /= s;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_square_system() {
        let a = Matrix::from_rows(&[[2.0, 1.0], [1.0, 3.0]]).unwrap();
        let x = least_squares(&a, &[5.0, 10.0], None).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12);
        assert!((x[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn overdetermined_line() {
        let a = Matrix::from_rows(&[[1.0, 0.0], [1.0, 1.0], [1.0, 2.0], [1.0, 3.0]]).unwrap();
        let x = least_squares(&a, &[1.0, 3.0, 5.0, 7.0], None).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-12 && (x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn collinear_columns_are_rejected() {
        let a = Matrix::from_rows(&[[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]]).unwrap();
        assert_eq!(
            least_squares(&a, &[1.0, 2.0, 3.0], None),
            Err(LinalgError::RankDeficient)
        );
    }

    #[test]
    fn zero_weight_rows_drop_out() {
        let a = Matrix::from_rows(&[[1.0, 0.0], [1.0, 1.0], [1.0, 2.0]]).unwrap();
        let x = least_squares(&a, &[0.0, 1.0, 50.0], Some(&[1.0, 1.0, 0.0])).unwrap();
        assert!((x[0]).abs() < 1e-12 && (x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ragged_rows_error() {
        let rows: Vec<Vec<f64>> = vec![vec![1.0, 2.0], vec![3.0]];
        assert!(matches!(
            Matrix::from_rows(&rows),
            Err(LinalgError::Ragged { row: 1, .. })
        ));
    }
}

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Dense real matrix stored column-major.
///
/// Both dimensions are at least one. Constructors that take external data
/// reject non-finite entries.
#[derive(Clone, PartialEq)]
pub struct RealMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

fn check_dims(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 {
        return Err(Error::ZeroDimension(rows));
    }
    if cols == 0 {
        return Err(Error::ZeroDimension(cols));
    }
    Ok(())
}

pub(crate) fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::NonFinite(i)),
        None => Ok(()),
    }
}

impl RealMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        check_dims(rows, cols)?;
        Ok(Self { rows, cols, data: vec![0.0; rows * cols] })
    }

    pub fn identity(n: usize) -> Result<Self> {
        let mut m = Self::zeros(n, n)?;
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        Ok(m)
    }

    /// Builds a matrix from column-major data.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(rows, cols)?;
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        check_finite(&data)?;
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from row-major data, the order matrices are usually written in.
    pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        check_dims(rows, cols)?;
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, found: data.len() });
        }
        check_finite(data)?;
        let mut out = vec![0.0; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                out[j * rows + i] = data[i * cols + j];
            }
        }
        Ok(Self { rows, cols, data: out })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        check_dims(rows, cols)?;
        let mut data = Vec::with_capacity(rows * cols);
        for c in columns {
            if c.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, found: c.len() });
            }
            data.extend_from_slice(c);
        }
        check_finite(&data)?;
        Ok(Self { rows, cols, data })
    }

    /// Places the blocks side by side. All blocks must share a row count.
    pub fn hstack(blocks: &[RealMatrix]) -> Result<Self> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let cols = blocks.iter().map(|b| b.cols).sum();
        check_dims(rows, cols)?;
        let mut data = Vec::with_capacity(rows * cols);
        for b in blocks {
            if b.rows != rows {
                return Err(Error::DimensionMismatch { expected: rows, found: b.rows });
            }
            data.extend_from_slice(&b.data);
        }
        Ok(Self { rows, cols, data })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.rows + row]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[col * self.rows + row] = value;
    }

    #[inline]
    pub fn column(&self, col: usize) -> &[f64] {
        &self.data[col * self.rows..(col + 1) * self.rows]
    }

    #[inline]
    pub fn column_mut(&mut self, col: usize) -> &mut [f64] {
        &mut self.data[col * self.rows..(col + 1) * self.rows]
    }

    pub fn columns(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.rows)
    }

    /// Column-major entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_col_major(self) -> Vec<f64> {
        self.data
    }

    /// Submatrix formed by the listed columns, in the listed order.
    pub fn select_columns(&self, indices: &[usize]) -> Result<Self> {
        check_dims(self.rows, indices.len())?;
        let mut data = Vec::with_capacity(self.rows * indices.len());
        for &j in indices {
            if j >= self.cols {
                return Err(Error::IndexOutOfRange { index: j, dim: self.cols });
            }
            data.extend_from_slice(self.column(j));
        }
        Ok(Self { rows: self.rows, cols: indices.len(), data })
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![0.0; self.data.len()];
        for j in 0..self.cols {
            for i in 0..self.rows {
                data[i * self.cols + j] = self.data[j * self.rows + i];
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: x.len() });
        }
        let mut out = vec![0.0; self.rows];
        for (col, &xj) in self.columns().zip(x) {
            if xj != 0.0 {
                for (o, &a) in out.iter_mut().zip(col) {
                    *o += a * xj;
                }
            }
        }
        Ok(out)
    }

    /// `A B`.
    pub fn mul(&self, other: &RealMatrix) -> Result<Self> {
        if other.rows != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut data = Vec::with_capacity(self.rows * other.cols);
        for col in other.columns() {
            data.extend(self.mul_vec(col)?);
        }
        Ok(Self { rows: self.rows, cols: other.cols, data })
    }

    pub fn scale(mut self, factor: f64) -> Self {
        self.data.iter_mut().for_each(|v| *v *= factor);
        self
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl fmt::Debug for RealMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "RealMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:>12.6} ", self.get(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn row_major_round_trip() {
        let m = RealMatrix::from_row_major(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(m.get(0, 2), 3.0);
        assert_eq!(m.get(1, 0), 4.0);
        assert_eq!(m.column(1), &[2.0, 5.0]);
        let t = m.transpose();
        assert_eq!((t.rows(), t.cols()), (3, 2));
        assert_eq!(t.get(2, 1), 6.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(RealMatrix::zeros(0, 2), Err(Error::ZeroDimension(0)));
        assert!(matches!(
            RealMatrix::from_row_major(1, 2, &[1.0, f64::NAN]),
            Err(Error::NonFinite(1))
        ));
        assert!(RealMatrix::from_col_major(2, 2, vec![1.0; 3]).is_err());
    }

    #[test]
    fn products() {
        let a = RealMatrix::from_row_major(2, 2, &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(a.mul_vec(&[1.0, 1.0]).unwrap(), vec![3.0, 7.0]);
        let aa = a.mul(&a).unwrap();
        assert_eq!(aa, RealMatrix::from_row_major(2, 2, &[7.0, 10.0, 15.0, 22.0]).unwrap());
    }

    #[test]
    fn stacking_and_selection() {
        let a = RealMatrix::identity(2).unwrap();
        let b = RealMatrix::from_row_major(2, 1, &[5.0, 6.0]).unwrap();
        let s = RealMatrix::hstack(&[a, b]).unwrap();
        assert_eq!(s.cols(), 3);
        assert_eq!(s.select_columns(&[2, 0]).unwrap().column(0), &[5.0, 6.0]);
        assert!(s.select_columns(&[3]).is_err());
    }
}

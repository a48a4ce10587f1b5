use std::fmt;
use std::ops::{Index, IndexMut};

/// Dense square `k x k` matrix stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T = f64> {
    k: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> Matrix<T> {
    pub fn zeros(k: usize) -> Self {
        Self {
            k,
            data: vec![T::default(); k * k],
        }
    }

    pub fn from_fn(k: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(k * k);
        for a in 0..k {
            for b in 0..k {
                data.push(f(a, b));
            }
        }
        Self { k, data }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.k, |a, b| self[(b, a)])
    }
}

impl<T> Matrix<T> {
    /// Builds a matrix from its rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Option<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return None;
        }
        Some(Self {
            k,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn row(&self, a: usize) -> &[T] {
        &self.data[a * self.k..(a + 1) * self.k]
    }
}

impl Matrix<f64> {
    pub fn diag(v: &[f64]) -> Self {
        Self::from_fn(v.len(), |a, b| if a == b { v[a] } else { 0.0 })
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.k).map(|a| self.row(a).iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<f64> {
        (0..self.k)
            .map(|b| (0..self.k).map(|a| self[(a, b)]).sum())
            .collect()
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.k, other.k);
        Self::from_fn(self.k, |a, b| {
            (0..self.k).map(|c| self[(a, c)] * other[(c, b)]).sum()
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_fn(self.k, |a, b| self[(a, b)] * s)
    }

    /// Entry-wise 1-norm.
    pub fn l1_norm(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).sum()
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.k).all(|a| (0..a).all(|b| self[(a, b)] == self[(b, a)]))
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (a, b): (usize, usize)) -> &T {
        &self.data[a * self.k + b]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (a, b): (usize, usize)) -> &mut T {
        &mut self.data[a * self.k + b]
    }
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for a in 0..self.k {
            list.entry(&self.row(a));
        }
        list.finish()
    }
}

//! Compressed sparse row storage built from summed triplets.

use std::io::Write;
use std::ops::{Add, AddAssign, Mul};

use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix<T> {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<T>,
}

impl<T> SparseMatrix<T>
where
    T: Copy + Default + AddAssign,
{
    /// Duplicate entries are summed; columns end up sorted within each row.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Self {
        let mut counts = vec![0usize; nrows + 1];
        for &(i, j, _) in triplets {
            assert!(i < nrows && j < ncols, "triplet ({i}, {j}) out of bounds");
            counts[i + 1] += 1;
        }
        for i in 0..nrows {
            counts[i + 1] += counts[i];
        }
        let mut next = counts.clone();
        let mut cols = vec![0usize; triplets.len()];
        let mut vals = vec![T::default(); triplets.len()];
        for &(i, j, v) in triplets {
            cols[next[i]] = j;
            vals[next[i]] = v;
            next[i] += 1;
        }

        let mut row_ptr = Vec::with_capacity(nrows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        let mut order: Vec<usize> = Vec::new();
        for i in 0..nrows {
            order.clear();
            order.extend(counts[i]..counts[i + 1]);
            order.sort_by_key(|&k| cols[k]);
            let mut last = usize::MAX;
            for &k in &order {
                if cols[k] == last {
                    *values.last_mut().unwrap() += vals[k];
                } else {
                    col_idx.push(cols[k]);
                    values.push(vals[k]);
                    last = cols[k];
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self { nrows, ncols, row_ptr, col_idx, values }
    }

    pub fn identity(n: usize, one: T) -> Self {
        let t: Vec<_> = (0..n).map(|i| (i, i, one)).collect();
        Self::from_triplets(n, n, &t)
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, T)> + '_ {
        (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (self.col_idx[k], self.values[k]))
    }

    /// Stored entries as `(row, col, value)`.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        let cols = &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]];
        match cols.binary_search(&j) {
            Ok(k) => self.values[self.row_ptr[i] + k],
            Err(_) => T::default(),
        }
    }

    pub fn mul_vec<X>(&self, x: &[X]) -> Vec<X>
    where
        X: Copy + Default + AddAssign + Mul<T, Output = X>,
    {
        (0..self.nrows)
            .map(|i| {
                let mut s = X::default();
                for (j, v) in self.row(i) {
                    s += x[j] * v;
                }
                s
            })
            .collect()
    }

    /// `sum_ij x_i A_ij y_j` (no conjugation).
    pub fn bilinear<X>(&self, x: &[X], y: &[X]) -> X
    where
        X: Copy + Default + AddAssign + Mul<T, Output = X> + Mul<X, Output = X>,
    {
        let ay = self.mul_vec(y);
        let mut s = X::default();
        for (xi, ai) in x.iter().zip(ay) {
            s += *xi * ai;
        }
        s
    }

    /// Largest `|A_ij - A_ji|` given a magnitude function.
    pub fn max_asymmetry(&self, abs: impl Fn(T, T) -> f64) -> f64 {
        self.triplets().map(|(i, j, v)| abs(v, self.get(j, i))).fold(0.0, f64::max)
    }

    pub fn map<U, F>(&self, f: F) -> SparseMatrix<U>
    where
        F: Fn(T) -> U,
    {
        SparseMatrix {
            nrows: self.nrows,
            ncols: self.ncols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }
}

impl<T> Add for &SparseMatrix<T>
where
    T: Copy + Default + AddAssign,
{
    type Output = SparseMatrix<T>;

    fn add(self, rhs: &SparseMatrix<T>) -> SparseMatrix<T> {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        let t: Vec<_> = self.triplets().chain(rhs.triplets()).collect();
        SparseMatrix::from_triplets(self.nrows, self.ncols, &t)
    }
}

impl SparseMatrix<C64> {
    /// One `row col re im` line per stored entry.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "% {} {} {}", self.nrows, self.ncols, self.nnz())?;
        for (i, j, v) in self.triplets() {
            writeln!(w, "{i} {j} {:.17e} {:.17e}", v.re, v.im)?;
        }
        Ok(())
    }
}

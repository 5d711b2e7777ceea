//! Dense LU with partial pivoting for the small local IFE systems.

pub(crate) struct DenseLu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    norm1: f64,
}

impl DenseLu {
    /// Factor the row-major `n x n` matrix `a`; `None` if a pivot vanishes.
    pub(crate) fn factor(n: usize, a: &[f64]) -> Option<Self> {
        debug_assert_eq!(a.len(), n * n);
        let norm1 = (0..n).map(|j| (0..n).map(|i| a[i * n + j].abs()).sum::<f64>()).fold(0.0, f64::max);
        let mut lu = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let (p, pv) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].abs()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pv == 0.0 || !pv.is_finite() {
                return None;
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            for i in k + 1..n {
                let m = lu[i * n + k] / pivot;
                lu[i * n + k] = m;
                for j in k + 1..n {
                    lu[i * n + j] -= m * lu[k * n + j];
                }
            }
        }
        Some(Self { n, lu, perm, norm1 })
    }

    pub(crate) fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                x[i] -= self.lu[i * n + j] * x[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                x[i] -= self.lu[i * n + j] * x[j];
            }
            x[i] /= self.lu[i * n + i];
        }
        x
    }

    /// Columns of the inverse, i.e. solutions for each unit right-hand side.
    pub(crate) fn inverse_columns(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|j| {
                let mut e = vec![0.0; self.n];
                e[j] = 1.0;
                self.solve(&e)
            })
            .collect()
    }

    /// 1-norm condition number.
    pub(crate) fn condition(&self) -> f64 {
        let inv_norm =
            self.inverse_columns().iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
        self.norm1 * inv_norm
    }
}

//! Sparse systems and the two solution paths: sparse LU with partial
//! pivoting and restarted GMRES preconditioned by ILU(0).

mod direct;
mod gmres;

pub use direct::DirectSolver;
pub use gmres::{gmres, Ilu0};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Square sparse matrix in compressed rows plus a right-hand side.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSystem<T> {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<T>,
    pub rhs: Vec<T>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Direct,
    Iterative,
}

impl<T: Real> SparseSystem<T> {
    /// Build from per-row `(column, value)` lists; duplicates are summed.
    pub fn from_rows(rows: Vec<Vec<(usize, T)>>, rhs: Vec<T>) -> Result<Self> {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|e| e.0);
            let start = col_idx.len();
            for (c, v) in row {
                if c >= n {
                    return Err(Error::Shape(format!("column {c} out of range for n={n}")));
                }
                if col_idx.len() > start && *col_idx.last().unwrap() == c {
                    *values.last_mut().unwrap() += v;
                } else {
                    col_idx.push(c);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        let sys = Self {
            n,
            row_ptr,
            col_idx,
            values,
            rhs,
        };
        sys.validate()?;
        Ok(sys)
    }

    pub fn from_triplets(n: usize, triplets: &[(usize, usize, T)], rhs: Vec<T>) -> Result<Self> {
        let mut rows = vec![Vec::new(); n];
        for &(r, c, v) in triplets {
            if r >= n {
                return Err(Error::Shape(format!("row {r} out of range for n={n}")));
            }
            rows[r].push((c, v));
        }
        Self::from_rows(rows, rhs)
    }

    pub fn identity(n: usize, rhs: Vec<T>) -> Self {
        Self {
            n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![T::one(); n],
            rhs,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.row_ptr.len() != self.n + 1 || self.rhs.len() != self.n {
            return Err(Error::Shape("row pointer or rhs length disagrees with n".into()));
        }
        if self.row_ptr[0] != 0 || self.row_ptr[self.n] != self.col_idx.len() || self.col_idx.len() != self.values.len() {
            return Err(Error::Shape("inconsistent CSR arrays".into()));
        }
        for i in 0..self.n {
            let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
            if a > b {
                return Err(Error::Shape(format!("row pointer decreases at row {i}")));
            }
            let cols = &self.col_idx[a..b];
            if cols.windows(2).any(|w| w[0] >= w[1]) || cols.iter().any(|&c| c >= self.n) {
                return Err(Error::Shape(format!("row {i} has unsorted or out-of-range columns")));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn row(&self, i: usize) -> (&[usize], &[T]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn max_row_nnz(&self) -> usize {
        self.row_ptr.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        let mut y = vec![T::zero(); self.n];
        self.matvec_into(x, &mut y);
        y
    }

    pub fn matvec_into(&self, x: &[T], y: &mut [T]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            *yi = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    /// `||A x - b||_2 / ||b||_2` (absolute norm when `b = 0`).
    pub fn relative_residual(&self, x: &[T]) -> T {
        let ax = self.matvec(x);
        let r2: T = ax.iter().zip(&self.rhs).map(|(a, b)| (*a - *b) * (*a - *b)).sum();
        let b2: T = self.rhs.iter().map(|b| *b * *b).sum();
        if b2 > T::zero() {
            (r2 / b2).sqrt()
        } else {
            r2.sqrt()
        }
    }

    /// Replace row `k` by the identity row with right-hand side `value`.
    pub fn pin(&mut self, k: usize, value: T) {
        let (a, b) = (self.row_ptr[k], self.row_ptr[k + 1]);
        let mut cols: Vec<usize> = self.col_idx[..a].to_vec();
        let mut vals: Vec<T> = self.values[..a].to_vec();
        cols.push(k);
        vals.push(T::one());
        cols.extend_from_slice(&self.col_idx[b..]);
        vals.extend_from_slice(&self.values[b..]);
        let shift = (b - a) as isize - 1;
        for p in self.row_ptr[k + 1..].iter_mut() {
            *p = (*p as isize - shift) as usize;
        }
        self.col_idx = cols;
        self.values = vals;
        self.rhs[k] = value;
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut a = vec![vec![T::zero(); self.n]; self.n];
        for (i, row) in a.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                row[c] = v;
            }
        }
        a
    }

    /// Rows or columns without any nonzero make the matrix structurally singular.
    pub fn check_structure(&self) -> Result<()> {
        let mut col_seen = vec![false; self.n];
        for i in 0..self.n {
            let (cols, vals) = self.row(i);
            let mut any = false;
            for (&c, &v) in cols.iter().zip(vals) {
                if v != T::zero() {
                    any = true;
                    col_seen[c] = true;
                }
            }
            if !any {
                return Err(Error::Singular(format!("row {i} is empty")));
            }
        }
        if let Some(c) = col_seen.iter().position(|s| !s) {
            return Err(Error::Singular(format!("column {c} is empty")));
        }
        Ok(())
    }
}

/// Solve `A x = b` to relative residual `tol`.
pub fn solve_linear<T: Real>(sys: &SparseSystem<T>, tol: T, method: Method) -> Result<Vec<T>> {
    sys.validate()?;
    sys.check_structure()?;
    match method {
        Method::Direct => {
            let lu = DirectSolver::factor(sys)?;
            let mut x = lu.solve(&sys.rhs)?;
            // One step of iterative refinement recovers accuracy on badly scaled rows.
            let mut res = sys.relative_residual(&x);
            if res > tol {
                let ax = sys.matvec(&x);
                let r: Vec<T> = sys.rhs.iter().zip(&ax).map(|(b, a)| *b - *a).collect();
                let dx = lu.solve(&r)?;
                for (xi, d) in x.iter_mut().zip(dx) {
                    *xi += d;
                }
                res = sys.relative_residual(&x);
            }
            if !(res <= tol) {
                return Err(Error::LinearNonConvergence {
                    iterations: 1,
                    residual: res.to_f64_lossy(),
                    history: vec![res.to_f64_lossy()],
                });
            }
            Ok(x)
        }
        Method::Iterative => {
            let ilu = Ilu0::new(sys)?;
            let x0 = vec![T::zero(); sys.n];
            gmres(sys, &ilu, &x0, tol, 50, 40 * sys.n.max(10))
        }
    }
}

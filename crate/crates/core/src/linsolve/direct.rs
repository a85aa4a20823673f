use faer::prelude::*;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};

use crate::error::{Error, Result};
use crate::scalar::Real;

use super::SparseSystem;

/// Sparse LU factorization (row pivoting, fill-reducing column ordering),
/// reusable for many right-hand sides. Works in `f64` internally.
pub struct DirectSolver {
    n: usize,
    lu: Lu<usize, f64>,
}

impl std::fmt::Debug for DirectSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DirectSolver").field("n", &self.n).finish()
    }
}

impl DirectSolver {
    pub fn factor<T: Real>(sys: &SparseSystem<T>) -> Result<Self> {
        let n = sys.n;
        let mut trip = Vec::with_capacity(sys.nnz());
        for i in 0..n {
            let (cols, vals) = sys.row(i);
            for (&c, &v) in cols.iter().zip(vals) {
                let v = v.to_f64_lossy();
                if !v.is_finite() {
                    return Err(Error::NonFinite(format!("matrix entry ({i}, {c})")));
                }
                trip.push(Triplet::new(i, c, v));
            }
        }
        let a = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trip)
            .map_err(|e| Error::Shape(format!("{e:?}")))?;
        let lu = a
            .sp_lu()
            .map_err(|e| Error::Singular(format!("sparse LU failed: {e:?}")))?;
        Ok(Self { n, lu })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve<T: Real>(&self, b: &[T]) -> Result<Vec<T>> {
        if b.len() != self.n {
            return Err(Error::Shape(format!("rhs length {} != {}", b.len(), self.n)));
        }
        let mut x = Col::<f64>::from_fn(self.n, |i| b[i].to_f64_lossy());
        self.lu.solve_in_place(x.as_mat_mut());
        let mut out = Vec::with_capacity(self.n);
        for i in 0..self.n {
            let xi = x[i];
            if !xi.is_finite() {
                return Err(Error::Singular("zero pivot during sparse LU solve".into()));
            }
            out.push(T::lit(xi));
        }
        Ok(out)
    }
}

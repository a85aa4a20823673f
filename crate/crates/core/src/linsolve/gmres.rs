use crate::error::{Error, Result};
use crate::scalar::Real;

use super::SparseSystem;

/// Incomplete LU factorization restricted to the sparsity pattern of `A`.
///
/// Unit lower factor below the diagonal, upper factor on and above it.
/// Zero pivots (saddle-point rows) are replaced by a small multiple of the
/// row norm so the preconditioner stays usable.
#[derive(Clone, Debug)]
pub struct Ilu0<T> {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
    diag: Vec<usize>,
}

impl<T: Real> Ilu0<T> {
    pub fn new(sys: &SparseSystem<T>) -> Result<Self> {
        let n = sys.n;
        // Ensure every row stores its diagonal.
        let mut rows: Vec<Vec<(usize, T)>> = (0..n)
            .map(|i| {
                let (c, v) = sys.row(i);
                c.iter().copied().zip(v.iter().copied()).collect()
            })
            .collect();
        for (i, row) in rows.iter_mut().enumerate() {
            if !row.iter().any(|e| e.0 == i) {
                row.push((i, T::zero()));
            }
        }
        let a = SparseSystem::from_rows(rows, vec![T::zero(); n])?;
        let SparseSystem {
            row_ptr,
            col_idx,
            mut values,
            ..
        } = a;
        let diag: Vec<usize> = (0..n)
            .map(|i| row_ptr[i] + col_idx[row_ptr[i]..row_ptr[i + 1]].iter().position(|&c| c == i).unwrap())
            .collect();

        let mut pos = vec![usize::MAX; n];
        for i in 0..n {
            let (a, b) = (row_ptr[i], row_ptr[i + 1]);
            let norm = values[a..b].iter().fold(T::zero(), |m, v| m.max(v.abs()));
            for k in a..b {
                pos[col_idx[k]] = k;
            }
            for k in a..diag[i] {
                let c = col_idx[k];
                let piv = values[diag[c]];
                let l = values[k] / piv;
                values[k] = l;
                for kk in diag[c] + 1..row_ptr[c + 1] {
                    let p = pos[col_idx[kk]];
                    if p != usize::MAX {
                        let u = values[kk];
                        values[p] -= l * u;
                    }
                }
            }
            let d = diag[i];
            let floor = T::lit(1e-8) * norm.max(T::min_positive_value());
            if values[d].abs() < floor {
                values[d] = if values[d] < T::zero() { -floor } else { floor };
            }
            for k in a..b {
                pos[col_idx[k]] = usize::MAX;
            }
        }
        Ok(Self {
            n,
            row_ptr,
            col_idx,
            values,
            diag,
        })
    }

    /// Apply `(L U)^{-1}`.
    pub fn apply(&self, b: &[T]) -> Vec<T> {
        let mut y = b.to_vec();
        for i in 0..self.n {
            let mut s = y[i];
            for k in self.row_ptr[i]..self.diag[i] {
                s -= self.values[k] * y[self.col_idx[k]];
            }
            y[i] = s;
        }
        for i in (0..self.n).rev() {
            let mut s = y[i];
            for k in self.diag[i] + 1..self.row_ptr[i + 1] {
                s -= self.values[k] * y[self.col_idx[k]];
            }
            y[i] = s / self.values[self.diag[i]];
        }
        y
    }
}

fn norm2<T: Real>(x: &[T]) -> T {
    x.iter().map(|v| *v * *v).sum::<T>().sqrt()
}

/// Right-preconditioned restarted GMRES(`restart`).
///
/// Stops when `||b - A x|| <= tol ||b||`; failure carries the residual history.
pub fn gmres<T: Real>(
    sys: &SparseSystem<T>,
    precond: &Ilu0<T>,
    x0: &[T],
    tol: T,
    restart: usize,
    max_iters: usize,
) -> Result<Vec<T>> {
    let n = sys.n;
    let b_norm = norm2(&sys.rhs);
    if b_norm == T::zero() {
        return Ok(vec![T::zero(); n]);
    }
    let mut x = x0.to_vec();
    let mut history = Vec::new();
    let mut iters = 0;
    let m = restart.max(1).min(n.max(1));

    loop {
        let ax = sys.matvec(&x);
        let r: Vec<T> = sys.rhs.iter().zip(&ax).map(|(b, a)| *b - *a).collect();
        let beta = norm2(&r);
        let rel = beta / b_norm;
        history.push(rel.to_f64_lossy());
        if rel <= tol {
            return Ok(x);
        }
        if iters >= max_iters || !rel.is_finite() {
            return Err(Error::LinearNonConvergence {
                iterations: iters,
                residual: rel.to_f64_lossy(),
                history,
            });
        }

        let mut basis: Vec<Vec<T>> = vec![r.iter().map(|v| *v / beta).collect()];
        let mut h = vec![vec![T::zero(); m]; m + 1];
        let (mut cs, mut sn) = (vec![T::zero(); m], vec![T::zero(); m]);
        let mut g = vec![T::zero(); m + 1];
        g[0] = beta;
        let mut k_used = 0;

        for k in 0..m {
            iters += 1;
            let z = precond.apply(&basis[k]);
            let mut wv = sys.matvec(&z);
            for (j, bj) in basis.iter().enumerate() {
                let hij: T = wv.iter().zip(bj).map(|(a, b)| *a * *b).sum();
                h[j][k] = hij;
                for (wi, bi) in wv.iter_mut().zip(bj) {
                    *wi -= hij * *bi;
                }
            }
            let hn = norm2(&wv);
            h[k + 1][k] = hn;
            for j in 0..k {
                let t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = t;
            }
            let denom = (h[k][k] * h[k][k] + h[k + 1][k] * h[k + 1][k]).sqrt();
            if denom == T::zero() {
                k_used = k;
                break;
            }
            cs[k] = h[k][k] / denom;
            sn[k] = h[k + 1][k] / denom;
            h[k][k] = denom;
            h[k + 1][k] = T::zero();
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];
            k_used = k + 1;
            if (g[k + 1].abs() / b_norm) <= tol * T::lit(0.5) || hn == T::zero() || iters >= max_iters {
                break;
            }
            basis.push(wv.iter().map(|v| *v / hn).collect());
        }

        // Back substitution for the least-squares coefficients.
        let mut y = vec![T::zero(); k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in i + 1..k_used {
                s -= h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        let mut update = vec![T::zero(); n];
        for (j, yj) in y.iter().enumerate() {
            for (u, b) in update.iter_mut().zip(&basis[j]) {
                *u += *yj * *b;
            }
        }
        let dz = precond.apply(&update);
        for (xi, d) in x.iter_mut().zip(dz) {
            *xi += d;
        }
        if k_used == 0 {
            let rel = norm2(&sys.rhs.iter().zip(sys.matvec(&x)).map(|(b, a)| *b - a).collect::<Vec<_>>()) / b_norm;
            history.push(rel.to_f64_lossy());
            return Err(Error::LinearNonConvergence {
                iterations: iters,
                residual: rel.to_f64_lossy(),
                history,
            });
        }
    }
}

//! Sparse forward-mode values: a scalar together with its gradient with
//! respect to the (few) unknowns a discrete equation touches.

use std::ops::{Add, Mul, Neg, Sub};

use smallvec::SmallVec;

use crate::scalar::Real;

/// Arithmetic needed by the row kernel. Implemented by plain scalars
/// (residual only) and by [`Jet`] (residual and Jacobian row).
pub(crate) trait Value<T: Real>:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Mul<T, Output = Self> + Neg<Output = Self>
{
    fn constant(c: T) -> Self;
    fn var(index: usize, value: T) -> Self;
    fn value(&self) -> T;
}

impl<T: Real> Value<T> for T {
    #[inline]
    fn constant(c: T) -> Self {
        c
    }
    #[inline]
    fn var(_: usize, value: T) -> Self {
        value
    }
    #[inline]
    fn value(&self) -> T {
        *self
    }
}

type Grad<T> = SmallVec<[(usize, T); 24]>;

#[derive(Clone, Debug)]
pub(crate) struct Jet<T> {
    pub val: T,
    pub grad: Grad<T>,
}

impl<T: Real> Jet<T> {
    /// Gradient entries merged by column, sorted, exact zeros dropped.
    pub fn merged_gradient(&self) -> Vec<(usize, T)> {
        let mut g: Vec<(usize, T)> = self.grad.to_vec();
        g.sort_by_key(|e| e.0);
        let mut out: Vec<(usize, T)> = Vec::with_capacity(g.len());
        for (c, v) in g {
            match out.last_mut() {
                Some(last) if last.0 == c => last.1 += v,
                _ => out.push((c, v)),
            }
        }
        out
    }
}

impl<T: Real> Value<T> for Jet<T> {
    #[inline]
    fn constant(c: T) -> Self {
        Jet {
            val: c,
            grad: SmallVec::new(),
        }
    }
    #[inline]
    fn var(index: usize, value: T) -> Self {
        let mut grad = SmallVec::new();
        grad.push((index, T::one()));
        Jet { val: value, grad }
    }
    #[inline]
    fn value(&self) -> T {
        self.val
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.val += rhs.val;
        self.grad.extend(rhs.grad);
        self
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.val -= rhs.val;
        self.grad.extend(rhs.grad.into_iter().map(|(c, d)| (c, -d)));
        self
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Self;
    fn neg(mut self) -> Self {
        self.val = -self.val;
        for e in self.grad.iter_mut() {
            e.1 = -e.1;
        }
        self
    }
}

impl<T: Real> Mul<T> for Jet<T> {
    type Output = Self;
    fn mul(mut self, c: T) -> Self {
        self.val *= c;
        for e in self.grad.iter_mut() {
            e.1 *= c;
        }
        self
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self.val, rhs.val);
        let mut grad: Grad<T> = self.grad.into_iter().map(|(c, d)| (c, d * b)).collect();
        grad.extend(rhs.grad.into_iter().map(|(c, d)| (c, d * a)));
        Jet { val: a * b, grad }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_and_merge() {
        let x = Jet::var(3, 2.0);
        let y = Jet::var(1, 5.0);
        // f = x*y - 3x + x*x  -> df/dx = y - 3 + 2x = 6, df/dy = x = 2
        let f = x.clone() * y.clone() - x.clone() * 3.0 + x.clone() * x;
        assert_eq!(f.val, 10.0 - 6.0 + 4.0);
        assert_eq!(f.merged_gradient(), vec![(1, 2.0), (3, 6.0)]);
        let g = -(f + Jet::constant(1.0));
        assert_eq!(g.val, -9.0);
        assert_eq!(g.merged_gradient(), vec![(1, -2.0), (3, -6.0)]);
    }
}

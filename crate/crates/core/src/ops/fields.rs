use ndarray::Array2;

use crate::bc::BoundaryValues;
use crate::error::{Error, Result};
use crate::grid::StaggeredGrid;
use crate::scalar::Real;

/// Discrete state `(u, v, w, p)` in staggered placement, `p` stored as `p / rho`.
///
/// `u[[i, j]]` sits at `(r_faces[i], z_centers[j])`, `w[[i, j]]` at
/// `(r_centers[i], z_faces[j])`, `v` and `p` at cell centers.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldSet<T> {
    pub u: Array2<T>,
    pub v: Array2<T>,
    pub w: Array2<T>,
    pub p: Array2<T>,
}

impl<T: Real> FieldSet<T> {
    pub fn zeros(grid: &StaggeredGrid<T>) -> Self {
        let (nr, nz) = (grid.nr, grid.nz);
        Self {
            u: Array2::from_elem((nr + 1, nz), T::zero()),
            v: Array2::from_elem((nr, nz), T::zero()),
            w: Array2::from_elem((nr, nz + 1), T::zero()),
            p: Array2::from_elem((nr, nz), T::zero()),
        }
    }

    /// Sample closed-form fields at their staggered locations.
    pub fn from_fn(
        grid: &StaggeredGrid<T>,
        u: impl Fn(T, T) -> T,
        v: impl Fn(T, T) -> T,
        w: impl Fn(T, T) -> T,
        p: impl Fn(T, T) -> T,
    ) -> Self {
        let (nr, nz) = (grid.nr, grid.nz);
        let (rf, rc, zf, zc) = (&grid.r_faces, &grid.r_centers, &grid.z_faces, &grid.z_centers);
        Self {
            u: Array2::from_shape_fn((nr + 1, nz), |(i, j)| u(rf[i], zc[j])),
            v: Array2::from_shape_fn((nr, nz), |(i, j)| v(rc[i], zc[j])),
            w: Array2::from_shape_fn((nr, nz + 1), |(i, j)| w(rc[i], zf[j])),
            p: Array2::from_shape_fn((nr, nz), |(i, j)| p(rc[i], zc[j])),
        }
    }

    pub fn check_shape(&self, grid: &StaggeredGrid<T>) -> Result<()> {
        let (nr, nz) = (grid.nr, grid.nz);
        let want = [
            ("u", self.u.dim(), (nr + 1, nz)),
            ("v", self.v.dim(), (nr, nz)),
            ("w", self.w.dim(), (nr, nz + 1)),
            ("p", self.p.dim(), (nr, nz)),
        ];
        for (name, got, expect) in want {
            if got != expect {
                return Err(Error::Shape(format!("{name}: expected {expect:?}, got {got:?}")));
            }
        }
        Ok(())
    }

    pub fn check_finite(&self) -> Result<()> {
        for (name, a) in [("u", &self.u), ("v", &self.v), ("w", &self.w), ("p", &self.p)] {
            if a.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!("field {name}")));
            }
        }
        Ok(())
    }

    /// Write the fixed normal velocities of `bv` onto the boundary faces.
    pub fn apply_boundary(&mut self, bv: &BoundaryValues<T>) {
        let (nr1, nz) = self.u.dim();
        let nr = nr1 - 1;
        for j in 0..nz {
            self.u[[0, j]] = bv.u_inner[j];
            self.u[[nr, j]] = bv.u_outer[j];
        }
        for i in 0..nr {
            self.w[[i, 0]] = bv.w_bottom[i];
            self.w[[i, nz]] = bv.w_top[i];
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let d = |a: &Array2<T>, b: &Array2<T>| {
            a.iter()
                .zip(b.iter())
                .fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()))
        };
        d(&self.u, &other.u)
            .max(d(&self.v, &other.v))
            .max(d(&self.w, &other.w))
            .max(d(&self.p, &other.p))
    }

    /// Largest velocity change between two states (pressure ignored).
    pub fn max_velocity_diff(&self, other: &Self) -> T {
        let d = |a: &Array2<T>, b: &Array2<T>| {
            a.iter()
                .zip(b.iter())
                .fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()))
        };
        d(&self.u, &other.u).max(d(&self.v, &other.v)).max(d(&self.w, &other.w))
    }

    pub fn max_speed(&self) -> T {
        let m = |a: &Array2<T>| a.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        m(&self.u).max(m(&self.v)).max(m(&self.w))
    }

    pub fn max_meridional_speed(&self) -> T {
        let m = |a: &Array2<T>| a.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        m(&self.u).max(m(&self.w))
    }

    /// `sum r dr dz (u^2 + v^2 + w^2) / 2` with face velocities averaged to centers.
    pub fn kinetic_energy(&self, grid: &StaggeredGrid<T>) -> T {
        let mut e = T::zero();
        for j in 0..grid.nz {
            for i in 0..grid.nr {
                let uc = (self.u[[i, j]] + self.u[[i + 1, j]]) * T::half();
                let wc = (self.w[[i, j]] + self.w[[i, j + 1]]) * T::half();
                let v = self.v[[i, j]];
                e += grid.cell_weight(i) * (uc * uc + v * v + wc * wc) * T::half();
            }
        }
        e
    }

    /// Radial velocity averaged to cell centers.
    pub fn u_centered(&self) -> Array2<T> {
        let (nr1, nz) = self.u.dim();
        Array2::from_shape_fn((nr1 - 1, nz), |(i, j)| (self.u[[i, j]] + self.u[[i + 1, j]]) * T::half())
    }

    /// Axial velocity averaged to cell centers.
    pub fn w_centered(&self) -> Array2<T> {
        let (nr, nz1) = self.w.dim();
        Array2::from_shape_fn((nr, nz1 - 1), |(i, j)| (self.w[[i, j]] + self.w[[i, j + 1]]) * T::half())
    }

    /// Copy of the state with the pressure shifted so that it vanishes at cell (0, 0).
    pub fn with_pinned_pressure(mut self) -> Self {
        let p0 = self.p[[0, 0]];
        self.p.mapv_inplace(|x| x - p0);
        self
    }

    pub fn to_unknowns(&self, layout: &Layout) -> Vec<T> {
        let mut x = vec![T::zero(); layout.len()];
        layout.for_each_unknown(|k, var| {
            x[k] = match var {
                Var::U(i, j) => self.u[[i, j]],
                Var::V(i, j) => self.v[[i, j]],
                Var::W(i, j) => self.w[[i, j]],
                Var::P(i, j) => self.p[[i, j]],
            }
        });
        x
    }

    pub fn set_unknowns(&mut self, layout: &Layout, x: &[T]) {
        layout.for_each_unknown(|k, var| match var {
            Var::U(i, j) => self.u[[i, j]] = x[k],
            Var::V(i, j) => self.v[[i, j]] = x[k],
            Var::W(i, j) => self.w[[i, j]] = x[k],
            Var::P(i, j) => self.p[[i, j]] = x[k],
        });
    }
}

/// Which field blocks are unknowns of an algebraic system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Unknowns {
    /// `u`, `v`, `w` and `p`: the coupled steady problem.
    Full,
    /// `u`, `v`, `w` with `p` held fixed.
    Velocity,
    /// `v` alone.
    Swirl,
}

/// A single unknown (or equation) of the discrete system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    U(usize, usize),
    V(usize, usize),
    W(usize, usize),
    P(usize, usize),
}

/// Numbering of unknowns: interior `u` faces, all `v` centers, interior `w`
/// faces, all `p` centers, each block z-major. Equation `k` belongs to
/// unknown `k` (continuity equations pair with pressures).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub nr: usize,
    pub nz: usize,
    pub kind: Unknowns,
    u_off: Option<usize>,
    v_off: Option<usize>,
    w_off: Option<usize>,
    p_off: Option<usize>,
    n: usize,
}

impl Layout {
    pub fn new<T: Real>(grid: &StaggeredGrid<T>, kind: Unknowns) -> Self {
        let (nr, nz) = (grid.nr, grid.nz);
        let nu = (nr - 1) * nz;
        let nv = nr * nz;
        let nw = nr * (nz - 1);
        let mut n = 0;
        let mut take = |active: bool, size: usize| {
            if active {
                let off = n;
                n += size;
                Some(off)
            } else {
                None
            }
        };
        let velocity = kind != Unknowns::Swirl;
        let u_off = take(velocity, nu);
        let v_off = take(true, nv);
        let w_off = take(velocity, nw);
        let p_off = take(kind == Unknowns::Full, nv);
        Self {
            nr,
            nz,
            kind,
            u_off,
            v_off,
            w_off,
            p_off,
            n,
        }
    }

    pub fn full<T: Real>(grid: &StaggeredGrid<T>) -> Self {
        Self::new(grid, Unknowns::Full)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn u(&self, i: usize, j: usize) -> Option<usize> {
        if i == 0 || i >= self.nr {
            return None;
        }
        self.u_off.map(|o| o + j * (self.nr - 1) + (i - 1))
    }

    #[inline]
    pub fn v(&self, i: usize, j: usize) -> Option<usize> {
        self.v_off.map(|o| o + j * self.nr + i)
    }

    #[inline]
    pub fn w(&self, i: usize, j: usize) -> Option<usize> {
        if j == 0 || j >= self.nz {
            return None;
        }
        self.w_off.map(|o| o + (j - 1) * self.nr + i)
    }

    #[inline]
    pub fn p(&self, i: usize, j: usize) -> Option<usize> {
        self.p_off.map(|o| o + j * self.nr + i)
    }

    /// Index of the pinned pressure (cell `(0, 0)`), if pressure is an unknown.
    pub fn gauge(&self) -> Option<usize> {
        self.p(0, 0)
    }

    /// Visit every unknown in index order.
    pub fn for_each_unknown(&self, mut f: impl FnMut(usize, Var)) {
        let (nr, nz) = (self.nr, self.nz);
        if let Some(o) = self.u_off {
            for j in 0..nz {
                for i in 1..nr {
                    f(o + j * (nr - 1) + (i - 1), Var::U(i, j));
                }
            }
        }
        if let Some(o) = self.v_off {
            for j in 0..nz {
                for i in 0..nr {
                    f(o + j * nr + i, Var::V(i, j));
                }
            }
        }
        if let Some(o) = self.w_off {
            for j in 1..nz {
                for i in 0..nr {
                    f(o + (j - 1) * nr + i, Var::W(i, j));
                }
            }
        }
        if let Some(o) = self.p_off {
            for j in 0..nz {
                for i in 0..nr {
                    f(o + j * nr + i, Var::P(i, j));
                }
            }
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out = vec![Var::P(0, 0); self.n];
        self.for_each_unknown(|k, v| out[k] = v);
        out
    }
}

/// Volume sources added to the right-hand sides of the momentum and
/// continuity equations, stored at the equations' staggered locations.
#[derive(Clone, Debug, PartialEq)]
pub struct Forcing<T> {
    pub u: Array2<T>,
    pub v: Array2<T>,
    pub w: Array2<T>,
    pub continuity: Array2<T>,
}

impl<T: Real> Forcing<T> {
    pub fn from_fn(
        grid: &StaggeredGrid<T>,
        fu: impl Fn(T, T) -> T,
        fv: impl Fn(T, T) -> T,
        fw: impl Fn(T, T) -> T,
    ) -> Self {
        let f = FieldSet::from_fn(grid, fu, fv, fw, |_, _| T::zero());
        Self {
            u: f.u,
            v: f.v,
            w: f.w,
            continuity: f.p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, DomainSpec};

    #[test]
    fn layout_is_a_bijection() {
        let g = build_grid(DomainSpec::new(0.1, 1.0, 1.0).unwrap(), 5, 4).unwrap();
        for kind in [Unknowns::Full, Unknowns::Velocity, Unknowns::Swirl] {
            let l = Layout::new(&g, kind);
            let mut seen = vec![false; l.len()];
            l.for_each_unknown(|k, var| {
                assert!(!seen[k]);
                seen[k] = true;
                let back = match var {
                    Var::U(i, j) => l.u(i, j),
                    Var::V(i, j) => l.v(i, j),
                    Var::W(i, j) => l.w(i, j),
                    Var::P(i, j) => l.p(i, j),
                };
                assert_eq!(back, Some(k));
            });
            assert!(seen.iter().all(|&s| s));
        }
        let full = Layout::full(&g);
        assert_eq!(full.len(), 4 * 4 + 5 * 4 + 5 * 3 + 5 * 4);
        assert_eq!(full.u(0, 1), None);
        assert_eq!(full.w(2, 4), None);
    }

    #[test]
    fn unknown_round_trip() {
        let g = build_grid(DomainSpec::new(0.1, 1.0, 1.0).unwrap(), 4, 3).unwrap();
        let f = FieldSet::from_fn(&g, |r, z| r + z, |r, z| r * z, |r, z| r - z, |r, _| r);
        let l = Layout::full(&g);
        let x = f.to_unknowns(&l);
        let mut h = FieldSet::zeros(&g);
        h.set_unknowns(&l, &x);
        // boundary faces of u and w are not unknowns
        for j in 0..3 {
            h.u[[0, j]] = f.u[[0, j]];
            h.u[[4, j]] = f.u[[4, j]];
        }
        for i in 0..4 {
            h.w[[i, 0]] = f.w[[i, 0]];
            h.w[[i, 3]] = f.w[[i, 3]];
        }
        assert_eq!(h, f);
    }
}

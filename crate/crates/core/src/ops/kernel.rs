//! Row kernel of the steady equations. Each method evaluates one discrete
//! equation, generically over plain scalars or jets.

use crate::bc::{BoundaryValues, Tangential};
use crate::grid::StaggeredGrid;
use crate::scalar::Real;

use super::fields::{FieldSet, Forcing, Layout, Var};
use super::jet::Value;
use super::{ConvectionScheme, Terms};

pub(crate) struct Kernel<'a, T> {
    pub grid: &'a StaggeredGrid<T>,
    pub fields: &'a FieldSet<T>,
    pub bv: &'a BoundaryValues<T>,
    pub layout: &'a Layout,
    pub nu: T,
    pub terms: Terms,
    pub scheme: ConvectionScheme,
    pub forcing: Option<&'a Forcing<T>>,
}

/// `d/dr((1/r) d(r f)/dr) + d2f/dz2`, which equals `d2f/dr2 + (1/r) df/dr - f/r^2 + d2f/dz2`.
///
/// Radial neighbours enter through `q = r f`; `r_fe`, `r_fw` are the radii
/// of the two flux points.
#[inline]
#[allow(clippy::too_many_arguments)]
pub(crate) fn swirl_laplacian<T: Real, S: Value<T>>(
    qc: S,
    qe: S,
    qw: S,
    c: S,
    n: S,
    s: S,
    r_fe: T,
    r_fw: T,
    dr: T,
    dz: T,
) -> S {
    let radial = ((qe - qc.clone()) * r_fe.recip() - (qc - qw) * r_fw.recip()) * (dr * dr).recip();
    let axial = (n - c * T::two() + s) * (dz * dz).recip();
    radial + axial
}

/// `(1/r) d/dr(r df/dr) + d2f/dz2` (axial velocity, no hoop term).
#[inline]
#[allow(clippy::too_many_arguments)]
fn axial_laplacian<T: Real, S: Value<T>>(c: S, e: S, w: S, n: S, s: S, r: T, r_fe: T, r_fw: T, dr: T, dz: T) -> S {
    let radial = ((e - c.clone()) * r_fe - (c.clone() - w) * r_fw) * (r * dr * dr).recip();
    let axial = (n - c * T::two() + s) * (dz * dz).recip();
    radial + axial
}

impl<'a, T: Real> Kernel<'a, T> {
    #[inline]
    fn pick<S: Value<T>>(idx: Option<usize>, val: T) -> S {
        match idx {
            Some(k) => S::var(k, val),
            None => S::constant(val),
        }
    }

    #[inline]
    fn ghost<S: Value<T>>(cond: &Tangential<T>, at: usize, interior: S) -> S {
        match cond {
            Tangential::Dirichlet(vals) => S::constant(T::two() * vals[at]) - interior,
            Tangential::Neumann => interior,
        }
    }

    /// `r v` beyond a radial wall at `r_wall`, linear through the wall value.
    #[inline]
    fn ghost_q<S: Value<T>>(cond: &Tangential<T>, at: usize, r_wall: T, r_ghost: T, qc: S, vc: S) -> S {
        match cond {
            Tangential::Dirichlet(vals) => S::constant(T::two() * r_wall * vals[at]) - qc,
            Tangential::Neumann => vc * r_ghost,
        }
    }

    /// `u` on r-face `i` (boundary faces take the wall data).
    #[inline]
    fn u<S: Value<T>>(&self, i: usize, j: usize) -> S {
        let nr = self.grid.nr;
        if i == 0 {
            S::constant(self.bv.u_inner[j])
        } else if i == nr {
            S::constant(self.bv.u_outer[j])
        } else {
            Self::pick(self.layout.u(i, j), self.fields.u[[i, j]])
        }
    }

    /// `u` at row `j` with ghost rows `-1` and `nz`.
    #[inline]
    fn u_z<S: Value<T>>(&self, i: usize, j: isize) -> S {
        let nz = self.grid.nz as isize;
        if j < 0 {
            Self::ghost(&self.bv.u_bottom, i, self.u(i, 0))
        } else if j >= nz {
            Self::ghost(&self.bv.u_top, i, self.u(i, (nz - 1) as usize))
        } else {
            self.u(i, j as usize)
        }
    }

    #[inline]
    fn w<S: Value<T>>(&self, i: usize, j: usize) -> S {
        let nz = self.grid.nz;
        if j == 0 {
            S::constant(self.bv.w_bottom[i])
        } else if j == nz {
            S::constant(self.bv.w_top[i])
        } else {
            Self::pick(self.layout.w(i, j), self.fields.w[[i, j]])
        }
    }

    /// `w` at column `i` with ghost columns `-1` and `nr`.
    #[inline]
    fn w_r<S: Value<T>>(&self, i: isize, j: usize) -> S {
        let nr = self.grid.nr as isize;
        if i < 0 {
            Self::ghost(&self.bv.w_inner, j, self.w(0, j))
        } else if i >= nr {
            Self::ghost(&self.bv.w_outer, j, self.w((nr - 1) as usize, j))
        } else {
            self.w(i as usize, j)
        }
    }

    #[inline]
    fn v<S: Value<T>>(&self, i: usize, j: usize) -> S {
        Self::pick(self.layout.v(i, j), self.fields.v[[i, j]])
    }

    /// `v` with ghost cells on all four sides (never both indices outside).
    #[inline]
    fn v_g<S: Value<T>>(&self, i: isize, j: isize) -> S {
        let (nr, nz) = (self.grid.nr as isize, self.grid.nz as isize);
        if i < 0 {
            Self::ghost(&self.bv.v_inner, j as usize, self.v(0, j as usize))
        } else if i >= nr {
            Self::ghost(&self.bv.v_outer, j as usize, self.v((nr - 1) as usize, j as usize))
        } else if j < 0 {
            Self::ghost(&self.bv.v_bottom, i as usize, self.v(i as usize, 0))
        } else if j >= nz {
            Self::ghost(&self.bv.v_top, i as usize, self.v(i as usize, (nz - 1) as usize))
        } else {
            self.v(i as usize, j as usize)
        }
    }

    #[inline]
    fn p<S: Value<T>>(&self, i: usize, j: usize) -> S {
        Self::pick(self.layout.p(i, j), self.fields.p[[i, j]])
    }

    /// `a * df/dx` from the three values of `f` around the evaluation point.
    #[inline]
    fn advect<S: Value<T>>(&self, a: S, minus: S, centre: S, plus: S, h: T) -> S {
        match self.scheme {
            ConvectionScheme::Centered => a * (plus - minus) * (T::two() * h).recip(),
            ConvectionScheme::Upwind => {
                if a.value() >= T::zero() {
                    a * (centre - minus) * h.recip()
                } else {
                    a * (plus - centre) * h.recip()
                }
            }
        }
    }

    /// Radial momentum at r-face `i`, row `j` (`1 <= i < nr`).
    pub fn radial<S: Value<T>>(&self, i: usize, j: usize) -> S {
        let g = self.grid;
        let (dr, dz) = (g.dr, g.dz);
        let r = g.r_faces[i];
        let jj = j as isize;
        let uc: S = self.u(i, j);
        let ue: S = self.u(i + 1, j);
        let uw: S = self.u(i - 1, j);
        let un: S = self.u_z(i, jj + 1);
        let us: S = self.u_z(i, jj - 1);

        let mut res = S::constant(T::zero());
        if self.terms.convection {
            let quarter = T::lit(0.25);
            let wbar = (self.w::<S>(i - 1, j) + self.w(i, j) + self.w(i - 1, j + 1) + self.w(i, j + 1)) * quarter;
            let vbar = (self.v::<S>(i - 1, j) + self.v(i, j)) * T::half();
            res = res
                + self.advect(uc.clone(), uw.clone(), uc.clone(), ue.clone(), dr)
                + self.advect(wbar, us.clone(), uc.clone(), un.clone(), dz)
                - vbar.clone() * vbar * r.recip();
        }
        if self.terms.pressure {
            res = res + (self.p::<S>(i, j) - self.p(i - 1, j)) * dr.recip();
        }
        if self.terms.viscous {
            let rf = &g.r_faces;
            let (qc, qe, qw) = (uc.clone() * r, ue * rf[i + 1], uw * rf[i - 1]);
            let lap = swirl_laplacian(qc, qe, qw, uc, un, us, g.r_centers[i], g.r_centers[i - 1], dr, dz);
            res = res - lap * self.nu;
        }
        if let Some(f) = self.forcing {
            res = res - S::constant(f.u[[i, j]]);
        }
        res
    }

    /// Azimuthal momentum at cell `(i, j)`.
    pub fn azimuthal<S: Value<T>>(&self, i: usize, j: usize) -> S {
        let g = self.grid;
        let (dr, dz) = (g.dr, g.dz);
        let r = g.r_centers[i];
        let (ii, jj) = (i as isize, j as isize);
        let vc: S = self.v(i, j);
        let ve: S = self.v_g(ii + 1, jj);
        let vw: S = self.v_g(ii - 1, jj);
        let vn: S = self.v_g(ii, jj + 1);
        let vs: S = self.v_g(ii, jj - 1);

        let mut res = S::constant(T::zero());
        if self.terms.convection {
            let ubar = (self.u::<S>(i, j) + self.u(i + 1, j)) * T::half();
            let wbar = (self.w::<S>(i, j) + self.w(i, j + 1)) * T::half();
            res = res
                + self.advect(ubar.clone(), vw.clone(), vc.clone(), ve.clone(), dr)
                + self.advect(wbar, vs.clone(), vc.clone(), vn.clone(), dz)
                + ubar * vc.clone() * r.recip();
        }
        if self.terms.viscous {
            let (rc, rf) = (&g.r_centers, &g.r_faces);
            let qc = vc.clone() * r;
            let qe = if i + 1 < g.nr {
                self.v::<S>(i + 1, j) * rc[i + 1]
            } else {
                Self::ghost_q(&self.bv.v_outer, j, rf[i + 1], r + dr, qc.clone(), vc.clone())
            };
            let qw = if i > 0 {
                self.v::<S>(i - 1, j) * rc[i - 1]
            } else {
                Self::ghost_q(&self.bv.v_inner, j, rf[0], r - dr, qc.clone(), vc.clone())
            };
            let lap = swirl_laplacian(qc, qe, qw, vc, vn, vs, rf[i + 1], rf[i], dr, dz);
            res = res - lap * self.nu;
        }
        if let Some(f) = self.forcing {
            res = res - S::constant(f.v[[i, j]]);
        }
        res
    }

    /// Axial momentum at z-face `j`, column `i` (`1 <= j < nz`).
    pub fn axial<S: Value<T>>(&self, i: usize, j: usize) -> S {
        let g = self.grid;
        let (dr, dz) = (g.dr, g.dz);
        let r = g.r_centers[i];
        let ii = i as isize;
        let wc: S = self.w(i, j);
        let wn: S = self.w(i, j + 1);
        let ws: S = self.w(i, j - 1);
        let we: S = self.w_r(ii + 1, j);
        let ww: S = self.w_r(ii - 1, j);

        let mut res = S::constant(T::zero());
        if self.terms.convection {
            let quarter = T::lit(0.25);
            let ubar = (self.u::<S>(i, j - 1) + self.u(i + 1, j - 1) + self.u(i, j) + self.u(i + 1, j)) * quarter;
            res = res
                + self.advect(ubar, ww.clone(), wc.clone(), we.clone(), dr)
                + self.advect(wc.clone(), ws.clone(), wc.clone(), wn.clone(), dz);
        }
        if self.terms.pressure {
            res = res + (self.p::<S>(i, j) - self.p(i, j - 1)) * dz.recip();
        }
        if self.terms.viscous {
            res = res - axial_laplacian(wc, we, ww, wn, ws, r, g.r_faces[i + 1], g.r_faces[i], dr, dz) * self.nu;
        }
        if let Some(f) = self.forcing {
            res = res - S::constant(f.w[[i, j]]);
        }
        res
    }

    /// Discrete `(1/r) d(r u)/dr + dw/dz` of cell `(i, j)`.
    pub fn continuity<S: Value<T>>(&self, i: usize, j: usize) -> S {
        let g = self.grid;
        let radial = (self.u::<S>(i + 1, j) * g.r_faces[i + 1] - self.u::<S>(i, j) * g.r_faces[i])
            * (g.r_centers[i] * g.dr).recip();
        let axial = (self.w::<S>(i, j + 1) - self.w(i, j)) * g.dz.recip();
        let mut res = radial + axial;
        if let Some(f) = self.forcing {
            res = res - S::constant(f.continuity[[i, j]]);
        }
        res
    }

    /// Equation paired with unknown `var`; the pressure at cell (0, 0) is pinned to 0.
    pub fn equation<S: Value<T>>(&self, var: Var) -> S {
        match var {
            Var::U(i, j) => self.radial(i, j),
            Var::V(i, j) => self.azimuthal(i, j),
            Var::W(i, j) => self.axial(i, j),
            Var::P(0, 0) => self.p(0, 0),
            Var::P(i, j) => self.continuity(i, j),
        }
    }
}

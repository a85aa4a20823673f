//! Manufactured solutions for the steady equations and the grid
//! convergence study built on them.
//!
//! The meridional flow comes from the stream function
//! `Psi = c0 s(r) G(z)` with `s = sin^2(k (r - sigma))`, `k = pi / (R - sigma)`
//! and `G = L/(2 pi) (1 - cos(2 pi z / L))`:
//!
//! ```text
//! u = c0 s(r) G'(z) / r,   w = -c0 s'(r) G(z) / r
//! ```
//!
//! so `(1/r) d(r u)/dr + dw/dz = 0` holds identically.

use log::info;

use crate::bc::{BoundaryValues, Tangential};
use crate::error::{Error, Result};
use crate::grid::{build_grid, DomainSpec, StaggeredGrid};
use crate::newton::{solve_problem, NewtonConfig};
use crate::ops::{FieldSet, Forcing, PhysParams, SteadyProblem};
use crate::scalar::Real;
use crate::stokes::couette_coefficients;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ManufacturedCase<T> {
    pub domain: DomainSpec<T>,
    pub nu: T,
    /// Amplitude of the meridional stream function.
    pub c0: T,
    /// Swirl on the cylinder at `z = L`.
    pub v0: T,
}

/// Values and derivatives of a function of one variable.
#[derive(Clone, Copy, Debug)]
struct D3<T> {
    f: T,
    d1: T,
    d2: T,
}

pub fn manufactured_default() -> ManufacturedCase<f64> {
    ManufacturedCase {
        domain: DomainSpec {
            sigma: 0.5,
            r_outer: 1.5,
            height: 1.0,
        },
        nu: 0.1,
        c0: 0.5,
        v0: 1.0,
    }
}

impl<T: Real> ManufacturedCase<T> {
    pub fn validate(&self) -> Result<()> {
        self.domain.validate()?;
        PhysParams::new(self.nu)?;
        if !self.c0.is_finite() || !self.v0.is_finite() {
            return Err(Error::Validation("manufactured amplitudes must be finite".into()));
        }
        Ok(())
    }

    fn k(&self) -> T {
        T::PI() / (self.domain.r_outer - self.domain.sigma)
    }

    fn m(&self) -> T {
        T::two() * T::PI() / self.domain.height
    }

    /// `s` and its first three derivatives.
    fn s(&self, r: T) -> (T, T, T, T) {
        let k = self.k();
        let x = k * (r - self.domain.sigma);
        let sn = x.sin();
        let (s2, c2) = (T::two() * x).sin_cos();
        (sn * sn, k * s2, T::two() * k * k * c2, -T::lit(4.0) * k * k * k * s2)
    }

    /// `G` and its first three derivatives.
    fn g(&self, z: T) -> (T, T, T, T) {
        let m = self.m();
        let (sn, cs) = (m * z).sin_cos();
        ((T::one() - cs) / m, sn, m * cs, -m * m * sn)
    }

    /// `a = s / r`.
    fn a(&self, r: T) -> D3<T> {
        let (s, s1, s2, _) = self.s(r);
        D3 {
            f: s / r,
            d1: s1 / r - s / (r * r),
            d2: s2 / r - T::two() * s1 / (r * r) + T::two() * s / (r * r * r),
        }
    }

    /// `b = s' / r`.
    fn b(&self, r: T) -> D3<T> {
        let (_, s1, s2, s3) = self.s(r);
        D3 {
            f: s1 / r,
            d1: s2 / r - s1 / (r * r),
            d2: s3 / r - T::two() * s2 / (r * r) + T::two() * s1 / (r * r * r),
        }
    }

    /// Couette radial factor `A r + B / r`.
    fn vr(&self, r: T) -> D3<T> {
        let (a, b) = couette_coefficients(self.domain.sigma, self.domain.r_outer, self.v0)
            .expect("validated annulus");
        D3 {
            f: a * r + b / r,
            d1: a - b / (r * r),
            d2: T::two() * b / (r * r * r),
        }
    }

    /// `(z/L)^2 (3 - 2 z/L)`.
    fn vz(&self, z: T) -> D3<T> {
        let l = self.domain.height;
        let x = z / l;
        let six = T::lit(6.0);
        D3 {
            f: x * x * (T::lit(3.0) - T::two() * x),
            d1: six * x * (T::one() - x) / l,
            d2: (six - T::lit(12.0) * x) / (l * l),
        }
    }

    pub fn stream(&self, r: T, z: T) -> T {
        self.c0 * self.s(r).0 * self.g(z).0
    }

    pub fn u(&self, r: T, z: T) -> T {
        self.c0 * self.a(r).f * self.g(z).1
    }

    pub fn v(&self, r: T, z: T) -> T {
        self.vr(r).f * self.vz(z).f
    }

    pub fn w(&self, r: T, z: T) -> T {
        -self.c0 * self.b(r).f * self.g(z).0
    }

    pub fn p(&self, r: T, z: T) -> T {
        let rr = self.domain.r_outer;
        let l = self.domain.height;
        (T::PI() * r / rr).cos() * (T::PI() * z / l).cos()
    }

    fn grad_p(&self, r: T, z: T) -> (T, T) {
        let rr = self.domain.r_outer;
        let l = self.domain.height;
        let (sr, cr) = (T::PI() * r / rr).sin_cos();
        let (sz, cz) = (T::PI() * z / l).sin_cos();
        (-T::PI() / rr * sr * cz, -T::PI() / l * cr * sz)
    }

    /// Sources of the r-, theta- and z-momentum equations.
    pub fn sources(&self, r: T, z: T) -> (T, T, T) {
        let c0 = self.c0;
        let nu = self.nu;
        let a = self.a(r);
        let b = self.b(r);
        let (g0, g1, g2, g3) = self.g(z);
        let vr = self.vr(r);
        let vz = self.vz(z);

        let u = c0 * a.f * g1;
        let u_r = c0 * a.d1 * g1;
        let u_rr = c0 * a.d2 * g1;
        let u_z = c0 * a.f * g2;
        let u_zz = c0 * a.f * g3;

        let w = -c0 * b.f * g0;
        let w_r = -c0 * b.d1 * g0;
        let w_rr = -c0 * b.d2 * g0;
        let w_z = -c0 * b.f * g1;
        let w_zz = -c0 * b.f * g2;

        let v = vr.f * vz.f;
        let v_r = vr.d1 * vz.f;
        let v_rr = vr.d2 * vz.f;
        let v_z = vr.f * vz.d1;
        let v_zz = vr.f * vz.d2;

        let (p_r, p_z) = self.grad_p(r, z);
        let r2 = r * r;
        let fu = u * u_r + w * u_z - v * v / r + p_r - nu * (u_rr + u_r / r - u / r2 + u_zz);
        let fv = u * v_r + w * v_z + u * v / r - nu * (v_rr + v_r / r - v / r2 + v_zz);
        let fw = u * w_r + w * w_z + p_z - nu * (w_rr + w_r / r + w_zz);
        (fu, fv, fw)
    }

    /// Exact fields sampled at their staggered locations.
    pub fn sample(&self, grid: &StaggeredGrid<T>) -> FieldSet<T> {
        FieldSet::from_fn(
            grid,
            |r, z| self.u(r, z),
            |r, z| self.v(r, z),
            |r, z| self.w(r, z),
            |r, z| self.p(r, z),
        )
    }

    pub fn forcing(&self, grid: &StaggeredGrid<T>) -> Forcing<T> {
        Forcing::from_fn(
            grid,
            |r, z| self.sources(r, z).0,
            |r, z| self.sources(r, z).1,
            |r, z| self.sources(r, z).2,
        )
    }

    /// Dirichlet data on every wall taken from the exact fields.
    pub fn boundary_values(&self, grid: &StaggeredGrid<T>) -> BoundaryValues<T> {
        let (rf, rc, zf, zc) = (&grid.r_faces, &grid.r_centers, &grid.z_faces, &grid.z_centers);
        let (sigma, rr, l) = (self.domain.sigma, self.domain.r_outer, self.domain.height);
        let z0 = T::zero();
        BoundaryValues {
            u_inner: zc.iter().map(|&z| self.u(sigma, z)).collect(),
            u_outer: zc.iter().map(|&z| self.u(rr, z)).collect(),
            w_bottom: rc.iter().map(|&r| self.w(r, z0)).collect(),
            w_top: rc.iter().map(|&r| self.w(r, l)).collect(),
            u_bottom: Tangential::Dirichlet(rf.iter().map(|&r| self.u(r, z0)).collect()),
            u_top: Tangential::Dirichlet(rf.iter().map(|&r| self.u(r, l)).collect()),
            w_inner: Tangential::Dirichlet(zf.iter().map(|&z| self.w(sigma, z)).collect()),
            w_outer: Tangential::Dirichlet(zf.iter().map(|&z| self.w(rr, z)).collect()),
            v_inner: Tangential::Dirichlet(zc.iter().map(|&z| self.v(sigma, z)).collect()),
            v_outer: Tangential::Dirichlet(zc.iter().map(|&z| self.v(rr, z)).collect()),
            v_bottom: Tangential::Dirichlet(rc.iter().map(|&r| self.v(r, z0)).collect()),
            v_top: Tangential::Dirichlet(rc.iter().map(|&r| self.v(r, l)).collect()),
        }
    }
}

/// Max-norm errors on one grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelErrors<T> {
    pub n: usize,
    pub h: T,
    pub u: T,
    pub v: T,
    pub w: T,
    /// Pressure error after matching the gauge at cell `(0, 0)`.
    pub p: T,
    pub newton_iterations: usize,
}

/// Observed orders between consecutive levels.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Orders<T> {
    pub u: T,
    pub v: T,
    pub w: T,
    pub p: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceStudy<T> {
    pub levels: Vec<LevelErrors<T>>,
    /// `orders[k]` compares `levels[k]` and `levels[k + 1]`.
    pub orders: Vec<Orders<T>>,
}

impl<T: Real> ConvergenceStudy<T> {
    /// Orders of the finest pair.
    pub fn finest_orders(&self) -> Orders<T> {
        *self.orders.last().expect("at least two levels")
    }
}

/// Solve the forced problem on a single `n x n` grid and measure the error.
pub fn solve_level<T: Real>(case: &ManufacturedCase<T>, n: usize, cfg: &NewtonConfig<T>) -> Result<LevelErrors<T>> {
    case.validate()?;
    let grid = build_grid(case.domain, n, n)?;
    let bv = case.boundary_values(&grid);
    let forcing = case.forcing(&grid);
    let params = PhysParams::new(case.nu)?;
    let problem = SteadyProblem::new(&grid, params, &bv).with_forcing(&forcing);
    let sol = solve_problem(&problem, &FieldSet::zeros(&grid), cfg)?;
    if !sol.converged {
        return Err(Error::Study(format!(
            "newton did not converge on the {n}x{n} level (residual {:e})",
            sol.final_residual()
        )));
    }
    let exact = case.sample(&grid);
    let err = |a: &ndarray::Array2<T>, b: &ndarray::Array2<T>| {
        a.iter().zip(b).fold(T::zero(), |m, (x, y)| m.max((*x - *y).abs()))
    };
    let shift = exact.p[[0, 0]] - sol.fields.p[[0, 0]];
    let p_err = sol
        .fields
        .p
        .iter()
        .zip(&exact.p)
        .fold(T::zero(), |m, (x, y)| m.max((*x + shift - *y).abs()));
    Ok(LevelErrors {
        n,
        h: grid.dr.max(grid.dz),
        u: err(&sol.fields.u, &exact.u),
        v: err(&sol.fields.v, &exact.v),
        w: err(&sol.fields.w, &exact.w),
        p: p_err,
        newton_iterations: sol.iterations(),
    })
}

/// Grid convergence on `levels` grids of `coarsest * 2^k` cells per direction.
pub fn convergence_study<T: Real>(
    case: &ManufacturedCase<T>,
    coarsest: usize,
    levels: usize,
    cfg: &NewtonConfig<T>,
) -> Result<ConvergenceStudy<T>> {
    if levels < 3 {
        return Err(Error::Validation(format!("need at least 3 levels, got {levels}")));
    }
    if coarsest < 17 {
        return Err(Error::Validation(format!("coarsest grid must have at least 17 cells, got {coarsest}")));
    }
    let mut out = Vec::with_capacity(levels);
    for k in 0..levels {
        let n = coarsest << k;
        let e = solve_level(case, n, cfg)?;
        info!("mms level {n}: u {:e} v {:e} w {:e} p {:e}", e.u, e.v, e.w, e.p);
        out.push(e);
    }
    let order = |a: T, b: T, ha: T, hb: T| (a / b).ln() / (ha / hb).ln();
    let orders = out
        .windows(2)
        .map(|p| {
            let (c, f) = (&p[0], &p[1]);
            Orders {
                u: order(c.u, f.u, c.h, f.h),
                v: order(c.v, f.v, c.h, f.h),
                w: order(c.w, f.w, c.h, f.h),
                p: order(c.p, f.p, c.h, f.h),
            }
        })
        .collect();
    Ok(ConvergenceStudy { levels: out, orders })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::divergence;

    /// Sixth-order central first and second derivatives.
    fn d1(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (-f(x - 3.0 * h) + 9.0 * f(x - 2.0 * h) - 45.0 * f(x - h) + 45.0 * f(x + h) - 9.0 * f(x + 2.0 * h)
            + f(x + 3.0 * h))
            / (60.0 * h)
    }

    fn d2(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (2.0 * f(x - 3.0 * h) - 27.0 * f(x - 2.0 * h) + 270.0 * f(x - h) - 490.0 * f(x) + 270.0 * f(x + h)
            - 27.0 * f(x + 2.0 * h)
            + 2.0 * f(x + 3.0 * h))
            / (180.0 * h * h)
    }

    /// Residual of the continuous equations by finite differences of the closed forms.
    fn fd_sources(c: &ManufacturedCase<f64>, r: f64, z: f64) -> (f64, f64, f64, f64) {
        let h = 1e-3;
        let dr = |f: &dyn Fn(f64, f64) -> f64| d1(|x| f(x, z), r, h);
        let dz = |f: &dyn Fn(f64, f64) -> f64| d1(|x| f(r, x), z, h);
        let drr = |f: &dyn Fn(f64, f64) -> f64| d2(|x| f(x, z), r, h);
        let dzz = |f: &dyn Fn(f64, f64) -> f64| d2(|x| f(r, x), z, h);
        let u = |r, z| c.u(r, z);
        let v = |r, z| c.v(r, z);
        let w = |r, z| c.w(r, z);
        let p = |r, z| c.p(r, z);
        let (uu, vv, ww) = (u(r, z), v(r, z), w(r, z));
        let nu = c.nu;
        let fu = uu * dr(&u) + ww * dz(&u) - vv * vv / r + dr(&p)
            - nu * (drr(&u) + dr(&u) / r - uu / (r * r) + dzz(&u));
        let fv = uu * dr(&v) + ww * dz(&v) + uu * vv / r - nu * (drr(&v) + dr(&v) / r - vv / (r * r) + dzz(&v));
        let fw = uu * dr(&w) + ww * dz(&w) + dz(&p) - nu * (drr(&w) + dr(&w) / r + dzz(&w));
        let ru = |r: f64, z: f64| r * c.u(r, z);
        let div = dr(&ru) / r + dz(&w);
        (fu, fv, fw, div)
    }

    #[test]
    fn sources_match_finite_differences() {
        let c = manufactured_default();
        for &(r, z) in &[(0.6, 0.2), (0.9, 0.5), (1.2, 0.77), (1.4, 0.9), (0.75, 0.33)] {
            let (fu, fv, fw) = c.sources(r, z);
            let (gu, gv, gw, div) = fd_sources(&c, r, z);
            assert!((fu - gu).abs() < 1e-6, "u at ({r},{z}): {fu} vs {gu}");
            assert!((fv - gv).abs() < 1e-6, "v at ({r},{z}): {fv} vs {gv}");
            assert!((fw - gw).abs() < 1e-6, "w at ({r},{z}): {fw} vs {gw}");
            assert!(div.abs() < 1e-8, "div at ({r},{z}): {div}");
        }
    }

    #[test]
    fn velocities_derive_from_the_stream_function() {
        let c = manufactured_default();
        let h = 1e-3;
        for &(r, z) in &[(0.7, 0.1), (1.1, 0.6)] {
            let psi_r = d1(|x| c.stream(x, z), r, h);
            let psi_z = d1(|x| c.stream(r, x), z, h);
            assert!((c.u(r, z) - psi_z / r).abs() < 1e-9);
            assert!((c.w(r, z) + psi_r / r).abs() < 1e-9);
        }
    }

    #[test]
    fn boundary_structure() {
        let c = manufactured_default();
        for z in [0.0, 0.3, 0.8] {
            assert!(c.u(0.5, z).abs() < 1e-15 && c.u(1.5, z).abs() < 1e-15);
        }
        for r in [0.5, 0.9, 1.5] {
            assert_eq!(c.v(r, 0.0), 0.0);
            assert!(d1(|x| c.v(r, x), 1.0, 1e-3).abs() < 1e-9);
        }
        assert!((c.v(0.5, 1.0) - 1.0).abs() < 1e-14);
        assert!(c.v(1.5, 0.7).abs() < 1e-14);
    }

    #[test]
    fn sampled_fields_are_discretely_solenoidal() {
        let c = manufactured_default();
        let err = |n: usize| {
            let g = build_grid(c.domain, n, n).unwrap();
            let f = c.sample(&g);
            divergence(&f.u, &f.w, &g).unwrap().iter().fold(0.0f64, |m, x| m.max(x.abs()))
        };
        // face fluxes telescope because u and w sample the same stream function
        for n in [16, 33] {
            assert!(err(n) < 1e-12, "n={n}: {}", err(n));
        }
    }

    #[test]
    fn study_rejects_too_few_levels() {
        let c = manufactured_default();
        let cfg = NewtonConfig::default();
        assert!(convergence_study(&c, 17, 2, &cfg).is_err());
        assert!(convergence_study(&c, 8, 3, &cfg).is_err());
    }

    #[test]
    fn second_order_on_small_grids() {
        let c = manufactured_default();
        let cfg = NewtonConfig { tol_abs: 1e-11, ..NewtonConfig::default() };
        let s = convergence_study(&c, 17, 3, &cfg).unwrap();
        let o = s.finest_orders();
        for (name, x) in [("u", o.u), ("v", o.v), ("w", o.w)] {
            assert!((1.8..=2.2).contains(&x), "{name} order {x}: {:?}", s.levels);
        }
        assert!(o.p >= 1.5, "p order {}", o.p);
        let (first, last) = (s.levels[0], s.levels[2]);
        assert!(last.u < first.u && last.v < first.v && last.w < first.w);
    }
}

//! Linear azimuthal Stokes problem `Delta_{r,z} v = 0` and the circular
//! Couette solution of the annulus.
//!
//! With `u = w = 0` and constant pressure the meridional Stokes equations
//! hold identically, so only the swirl equation is solved. It uses the same
//! stencil as the swirl viscous term of the full residual.

use ndarray::Array2;

use crate::bc::{BoundaryValues, Tangential};
use crate::error::{Error, Result};
use crate::grid::{build_grid, DomainSpec, StaggeredGrid};
use crate::linsolve::{solve_linear, Method};
use crate::ops::{FieldSet, Layout, PhysParams, SteadyProblem, Terms, Unknowns};
use crate::scalar::Real;

/// `v(r) = A r + B / r` with `v(sigma) = v0` and `v(R) = 0`.
pub fn couette_exact<T: Real>(sigma: T, r_outer: T, v0: T, r: T) -> Result<T> {
    let (a, b) = couette_coefficients(sigma, r_outer, v0)?;
    if r < sigma || r > r_outer {
        return Err(Error::Domain(format!("radius {r} outside [{sigma}, {r_outer}]")));
    }
    Ok(a * r + b / r)
}

/// `(A, B)` of [`couette_exact`].
pub fn couette_coefficients<T: Real>(sigma: T, r_outer: T, v0: T) -> Result<(T, T)> {
    let d = r_outer * r_outer - sigma * sigma;
    if !(d.abs() > T::zero()) || !(sigma > T::zero()) {
        return Err(Error::Validation(format!(
            "degenerate annulus sigma={sigma} R={r_outer}"
        )));
    }
    let a = -v0 * sigma / d;
    let b = v0 * sigma * r_outer * r_outer / d;
    Ok((a, b))
}

/// Closure of the swirl on a horizontal wall.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HorizontalWall {
    /// `v = 0`.
    NoSlip,
    /// `dv/dz = 0`.
    FreeSlip,
}

#[derive(Clone, Debug)]
pub struct SwirlStokesProblem<T> {
    pub grid: StaggeredGrid<T>,
    pub gamma: T,
    pub nu: T,
    pub bottom: HorizontalWall,
    pub top: HorizontalWall,
    /// Swirl on the far wall (0 in the physical problem).
    pub outer_swirl: T,
}

impl<T: Real> SwirlStokesProblem<T> {
    /// `v = 0` on the plane and at `r = R`, cylinder swirl `gamma / (2 pi sigma)`,
    /// `dv/dz = 0` on top.
    pub fn new(grid: StaggeredGrid<T>, gamma: T, nu: T) -> Self {
        Self {
            grid,
            gamma,
            nu,
            bottom: HorizontalWall::NoSlip,
            top: HorizontalWall::FreeSlip,
            outer_swirl: T::zero(),
        }
    }

    /// Free slip on both horizontal walls: the solution is `z`-independent Couette flow.
    pub fn double_neumann(grid: StaggeredGrid<T>, gamma: T, nu: T) -> Self {
        Self {
            bottom: HorizontalWall::FreeSlip,
            ..Self::new(grid, gamma, nu)
        }
    }

    pub fn wall_swirl(&self) -> T {
        self.gamma / (T::two() * T::PI() * self.grid.sigma())
    }

    pub fn boundary_values(&self) -> BoundaryValues<T> {
        let g = &self.grid;
        let mut bv = BoundaryValues::zero(g);
        bv.v_inner = Tangential::constant(g.nz, self.wall_swirl());
        bv.v_outer = Tangential::constant(g.nz, self.outer_swirl);
        let wall = |w: HorizontalWall| match w {
            HorizontalWall::NoSlip => Tangential::zero(g.nr),
            HorizontalWall::FreeSlip => Tangential::Neumann,
        };
        bv.v_bottom = wall(self.bottom);
        bv.v_top = wall(self.top);
        bv
    }

    /// Same data on `[0, 2L]` with `v = 0` on top: the even reflection about `z = L`.
    pub fn even_extension(&self) -> Result<Self> {
        if self.top != HorizontalWall::FreeSlip || self.bottom != HorizontalWall::NoSlip {
            return Err(Error::Validation(
                "even extension needs a no-slip plane and a free-slip top".into(),
            ));
        }
        let d = self.grid.domain;
        let ext = DomainSpec::new(d.sigma, d.r_outer, d.height * T::two())?;
        let grid = build_grid(ext, self.grid.nr, 2 * self.grid.nz)?;
        Ok(Self {
            grid,
            top: HorizontalWall::NoSlip,
            ..self.clone()
        })
    }
}

/// Discrete swirl of the Stokes problem plus the relative linear residual.
#[derive(Clone, Debug)]
pub struct StokesSolution<T> {
    pub v: Array2<T>,
    pub linear_residual: T,
}

impl<T: Real> StokesSolution<T> {
    /// State `(0, v_s, 0)` with zero pressure.
    pub fn to_fields(&self, grid: &StaggeredGrid<T>) -> FieldSet<T> {
        let mut f = FieldSet::zeros(grid);
        f.v.assign(&self.v);
        f
    }
}

/// Solve the discrete swirl Stokes equation to relative residual `1e-10`.
pub fn solve_swirl_stokes<T: Real>(problem: &SwirlStokesProblem<T>) -> Result<StokesSolution<T>> {
    solve_swirl_with(&problem.boundary_values(), &problem.grid, problem.nu)
}

/// Swirl Stokes solve with the `v` closures of arbitrary boundary data.
/// The meridional entries of `bv` are ignored.
pub fn solve_swirl_with<T: Real>(bv: &BoundaryValues<T>, grid: &StaggeredGrid<T>, nu: T) -> Result<StokesSolution<T>> {
    let params = PhysParams::new(nu)?;
    let layout = Layout::new(grid, Unknowns::Swirl);
    let zero = FieldSet::zeros(grid);
    // The equation is affine in v: J v = -F(0).
    let sys = SteadyProblem::new(grid, params, bv)
        .with_terms(Terms::VISCOUS)
        .jacobian(&zero, &layout)?;
    let x = solve_linear(&sys, T::lit(1e-10), Method::Direct)?;
    let linear_residual = sys.relative_residual(&x);
    let mut f = zero;
    f.set_unknowns(&layout, &x);
    Ok(StokesSolution {
        v: f.v,
        linear_residual,
    })
}

/// Solve on the reflected domain `[0, 2L]` and keep the lower half.
pub fn solve_even_extension<T: Real>(problem: &SwirlStokesProblem<T>) -> Result<StokesSolution<T>> {
    let ext = problem.even_extension()?;
    let sol = solve_swirl_stokes(&ext)?;
    let nz = problem.grid.nz;
    Ok(StokesSolution {
        v: sol.v.slice(ndarray::s![.., 0..nz]).to_owned(),
        linear_residual: sol.linear_residual,
    })
}

//! Discrete cylindrical operators and the steady axisymmetric residual.
//!
//! The residual of each momentum equation is `convection - body + grad p -
//! nu * viscous - forcing`, evaluated at the unknown's staggered location:
//!
//! ```text
//! r:  u u_r + w u_z - v^2/r + p_r - nu (u_rr + u_r/r - u/r^2 + u_zz)
//! th: u v_r + w v_z + u v/r       - nu (v_rr + v_r/r - v/r^2 + v_zz)
//! z:  u w_r + w w_z       + p_z   - nu (w_rr + w_r/r + w_zz)
//! ```
//!
//! Continuity is the exact flux balance of each cell. Density is fixed at 1,
//! so `p` is the kinematic pressure.

mod fields;
pub(crate) mod jet;
mod kernel;

use ndarray::Array2;

pub use fields::{FieldSet, Forcing, Layout, Unknowns, Var};

use crate::bc::BoundaryValues;
use crate::error::{Error, Result};
use crate::grid::StaggeredGrid;
use crate::linsolve::SparseSystem;
use crate::scalar::Real;

use jet::{Jet, Value};
use kernel::Kernel;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysParams<T> {
    /// Kinematic viscosity.
    pub nu: T,
    /// Density; pressure is stored divided by it.
    pub rho: T,
}

impl<T: Real> PhysParams<T> {
    pub fn new(nu: T) -> Result<Self> {
        let p = Self { nu, rho: T::one() };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > T::zero()) || !self.nu.is_finite() {
            return Err(Error::Validation(format!("viscosity must be positive, got {}", self.nu)));
        }
        if !(self.rho > T::zero()) {
            return Err(Error::Validation(format!("density must be positive, got {}", self.rho)));
        }
        Ok(())
    }
}

/// Discretization of the advective derivatives.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ConvectionScheme {
    /// Second-order central differences.
    #[default]
    Centered,
    /// First-order donor cell, for coarse grids.
    Upwind,
}

/// Groups of terms included in an evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Terms {
    /// Advection plus the `-v^2/r` and `u v / r` couplings.
    pub convection: bool,
    pub viscous: bool,
    pub pressure: bool,
}

impl Terms {
    pub const ALL: Terms = Terms {
        convection: true,
        viscous: true,
        pressure: true,
    };
    pub const STOKES: Terms = Terms {
        convection: false,
        viscous: true,
        pressure: true,
    };
    pub const INERTIA: Terms = Terms {
        convection: true,
        viscous: false,
        pressure: false,
    };
    pub const VISCOUS: Terms = Terms {
        convection: false,
        viscous: true,
        pressure: false,
    };
}

/// Residuals of the three momentum equations and of continuity, each at
/// its staggered location. Entries not carrying an equation (boundary faces)
/// are zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual<T> {
    pub r_mom: Array2<T>,
    pub th_mom: Array2<T>,
    pub z_mom: Array2<T>,
    pub cont: Array2<T>,
}

impl<T: Real> Residual<T> {
    pub fn max_momentum(&self) -> T {
        let m = |a: &Array2<T>| a.iter().fold(T::zero(), |m, x| m.max(x.abs()));
        m(&self.r_mom).max(m(&self.th_mom)).max(m(&self.z_mom))
    }

    pub fn max_continuity(&self) -> T {
        self.cont.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn max_norm(&self) -> T {
        self.max_momentum().max(self.max_continuity())
    }
}

/// Everything that defines the discrete steady equations apart from the state.
#[derive(Clone, Copy, Debug)]
pub struct SteadyProblem<'a, T> {
    pub grid: &'a StaggeredGrid<T>,
    pub params: PhysParams<T>,
    pub bv: &'a BoundaryValues<T>,
    pub scheme: ConvectionScheme,
    pub terms: Terms,
    pub forcing: Option<&'a Forcing<T>>,
}

impl<'a, T: Real> SteadyProblem<'a, T> {
    pub fn new(grid: &'a StaggeredGrid<T>, params: PhysParams<T>, bv: &'a BoundaryValues<T>) -> Self {
        Self {
            grid,
            params,
            bv,
            scheme: ConvectionScheme::Centered,
            terms: Terms::ALL,
            forcing: None,
        }
    }

    pub fn with_scheme(mut self, scheme: ConvectionScheme) -> Self {
        self.scheme = scheme;
        self
    }

    pub fn with_terms(mut self, terms: Terms) -> Self {
        self.terms = terms;
        self
    }

    pub fn with_forcing(mut self, forcing: &'a Forcing<T>) -> Self {
        self.forcing = Some(forcing);
        self
    }

    pub fn validate(&self, fields: &FieldSet<T>) -> Result<()> {
        self.params.validate()?;
        self.bv.validate(self.grid)?;
        fields.check_shape(self.grid)?;
        fields.check_finite()
    }

    fn kernel<'b>(&'b self, fields: &'b FieldSet<T>, layout: &'b Layout) -> Kernel<'b, T> {
        Kernel {
            grid: self.grid,
            fields,
            bv: self.bv,
            layout,
            nu: self.params.nu,
            terms: self.terms,
            scheme: self.scheme,
            forcing: self.forcing,
        }
    }

    /// Residual at every staggered location.
    pub fn residual(&self, fields: &FieldSet<T>) -> Result<Residual<T>> {
        self.validate(fields)?;
        let g = self.grid;
        let (nr, nz) = (g.nr, g.nz);
        let layout = Layout::full(g);
        let k = self.kernel(fields, &layout);
        let mut out = Residual {
            r_mom: Array2::from_elem((nr + 1, nz), T::zero()),
            th_mom: Array2::from_elem((nr, nz), T::zero()),
            z_mom: Array2::from_elem((nr, nz + 1), T::zero()),
            cont: Array2::from_elem((nr, nz), T::zero()),
        };
        for j in 0..nz {
            for i in 1..nr {
                out.r_mom[[i, j]] = k.radial::<T>(i, j);
            }
            for i in 0..nr {
                out.th_mom[[i, j]] = k.azimuthal::<T>(i, j);
                out.cont[[i, j]] = k.continuity::<T>(i, j);
            }
        }
        for j in 1..nz {
            for i in 0..nr {
                out.z_mom[[i, j]] = k.axial::<T>(i, j);
            }
        }
        Ok(out)
    }

    /// Residual vector in the numbering of `layout` (gauge row included).
    pub fn residual_vector(&self, fields: &FieldSet<T>, layout: &Layout) -> Result<Vec<T>> {
        self.validate(fields)?;
        let k = self.kernel(fields, layout);
        let mut out = vec![T::zero(); layout.len()];
        layout.for_each_unknown(|idx, var| out[idx] = k.equation::<T>(var));
        Ok(out)
    }

    /// Jacobian of [`residual_vector`](Self::residual_vector) with `rhs = -F`.
    pub fn jacobian(&self, fields: &FieldSet<T>, layout: &Layout) -> Result<SparseSystem<T>> {
        self.validate(fields)?;
        let k = self.kernel(fields, layout);
        let mut rows = vec![Vec::new(); layout.len()];
        let mut rhs = vec![T::zero(); layout.len()];
        layout.for_each_unknown(|idx, var| {
            let jet: Jet<T> = k.equation(var);
            rhs[idx] = -jet.value();
            rows[idx] = jet.merged_gradient();
        });
        SparseSystem::from_rows(rows, rhs)
    }
}

/// Steady residual of the full equations with centered convection.
pub fn steady_residual<T: Real>(
    fields: &FieldSet<T>,
    params: PhysParams<T>,
    bv: &BoundaryValues<T>,
    grid: &StaggeredGrid<T>,
) -> Result<Residual<T>> {
    SteadyProblem::new(grid, params, bv).residual(fields)
}

/// Exact Jacobian of the coupled `(u, v, w, p)` system, pressure pinned at cell (0, 0).
pub fn assemble_jacobian<T: Real>(
    fields: &FieldSet<T>,
    params: PhysParams<T>,
    bv: &BoundaryValues<T>,
    grid: &StaggeredGrid<T>,
) -> Result<SparseSystem<T>> {
    SteadyProblem::new(grid, params, bv).jacobian(fields, &Layout::full(grid))
}

/// Ghost values of a center field on the four walls.
#[derive(Clone, Debug, PartialEq)]
pub struct SwirlGhosts<T> {
    /// Column `i = -1`, one per row (`nz`).
    pub inner: Vec<T>,
    /// Column `i = nr`.
    pub outer: Vec<T>,
    /// Row `j = -1`, one per column (`nr`).
    pub bottom: Vec<T>,
    /// Row `j = nz`.
    pub top: Vec<T>,
}

impl<T: Real> SwirlGhosts<T> {
    /// Ghosts sampled from a closed-form field at the mirrored centers.
    pub fn from_fn(grid: &StaggeredGrid<T>, f: impl Fn(T, T) -> T) -> Self {
        let (dr, dz) = (grid.dr, grid.dz);
        let r_in = grid.sigma() - dr * T::half();
        let r_out = grid.domain.r_outer + dr * T::half();
        let z_lo = -dz * T::half();
        let z_hi = grid.domain.height + dz * T::half();
        Self {
            inner: grid.z_centers.iter().map(|&z| f(r_in, z)).collect(),
            outer: grid.z_centers.iter().map(|&z| f(r_out, z)).collect(),
            bottom: grid.r_centers.iter().map(|&r| f(r, z_lo)).collect(),
            top: grid.r_centers.iter().map(|&r| f(r, z_hi)).collect(),
        }
    }
}

/// `d2v/dr2 + (1/r) dv/dr - v/r^2 + d2v/dz2` at cell centers.
pub fn laplacian_swirl<T: Real>(
    field: &Array2<T>,
    ghosts: &SwirlGhosts<T>,
    grid: &StaggeredGrid<T>,
) -> Result<Array2<T>> {
    let (nr, nz) = (grid.nr, grid.nz);
    if field.dim() != (nr, nz) {
        return Err(Error::Shape(format!("center field {:?} vs grid ({nr}, {nz})", field.dim())));
    }
    if ghosts.inner.len() != nz || ghosts.outer.len() != nz || ghosts.bottom.len() != nr || ghosts.top.len() != nr {
        return Err(Error::Shape("ghost arrays do not match the grid".into()));
    }
    let at = |i: isize, j: isize| -> T {
        if i < 0 {
            ghosts.inner[j as usize]
        } else if i >= nr as isize {
            ghosts.outer[j as usize]
        } else if j < 0 {
            ghosts.bottom[i as usize]
        } else if j >= nz as isize {
            ghosts.top[i as usize]
        } else {
            field[[i as usize, j as usize]]
        }
    };
    let (rc, rf) = (&grid.r_centers, &grid.r_faces);
    let r_of = |i: isize| grid.sigma() + (T::lit(i as f64) + T::half()) * grid.dr;
    Ok(Array2::from_shape_fn((nr, nz), |(i, j)| {
        let (ii, jj) = (i as isize, j as isize);
        kernel::swirl_laplacian::<T, T>(
            at(ii, jj) * rc[i],
            at(ii + 1, jj) * r_of(ii + 1),
            at(ii - 1, jj) * r_of(ii - 1),
            at(ii, jj),
            at(ii, jj + 1),
            at(ii, jj - 1),
            rf[i + 1],
            rf[i],
            grid.dr,
            grid.dz,
        )
    }))
}

/// Discrete `(1/r) d(r u)/dr + dw/dz` per cell from staggered `u` and `w`.
pub fn divergence<T: Real>(u: &Array2<T>, w: &Array2<T>, grid: &StaggeredGrid<T>) -> Result<Array2<T>> {
    let (nr, nz) = (grid.nr, grid.nz);
    if u.dim() != (nr + 1, nz) || w.dim() != (nr, nz + 1) {
        return Err(Error::Shape(format!(
            "u {:?} / w {:?} do not match grid ({nr}, {nz})",
            u.dim(),
            w.dim()
        )));
    }
    let (rf, rc) = (&grid.r_faces, &grid.r_centers);
    Ok(Array2::from_shape_fn((nr, nz), |(i, j)| {
        (rf[i + 1] * u[[i + 1, j]] - rf[i] * u[[i, j]]) / (rc[i] * grid.dr) + (w[[i, j + 1]] - w[[i, j]]) / grid.dz
    }))
}

//! Time marching of the axisymmetric equations by a first-order projection
//! method: explicit convection and pressure gradient, implicit viscosity,
//! pressure-increment projection. Used only to reach a "large time" state
//! for Newton, so temporal accuracy is not a concern.

use log::{debug, info};
use ndarray::Array2;

use crate::bc::BoundaryValues;
use crate::error::{Error, Result};
use crate::grid::StaggeredGrid;
use crate::linsolve::{DirectSolver, SparseSystem};
use crate::ops::{divergence, FieldSet, Layout, PhysParams, SteadyProblem, Terms, Unknowns};
use crate::scalar::{max_abs, Real};

const EXPLICIT: Terms = Terms {
    convection: true,
    viscous: false,
    pressure: true,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarchConfig<T> {
    pub dt: T,
    /// Stop here even without stalling.
    pub t_end: T,
    /// Stop once `max |x_{n+1} - x_n| / dt` drops to this value.
    pub stall_tol: T,
    pub cfl_limit: T,
    /// Halve `dt` on a CFL violation instead of failing.
    pub adapt_dt: bool,
}

impl<T: Real> Default for MarchConfig<T> {
    fn default() -> Self {
        Self {
            dt: T::lit(0.01),
            t_end: T::lit(50.0),
            stall_tol: T::lit(1e-6),
            cfl_limit: T::half(),
            adapt_dt: true,
        }
    }
}

impl<T: Real> MarchConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::Validation(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.cfl_limit > T::zero() && self.cfl_limit <= T::one()) {
            return Err(Error::Validation(format!("cfl_limit must lie in (0, 1], got {}", self.cfl_limit)));
        }
        if !(self.t_end >= T::zero()) {
            return Err(Error::Validation(format!("t_end must be non-negative, got {}", self.t_end)));
        }
        if !(self.stall_tol >= T::zero()) {
            return Err(Error::Validation(format!("stall_tol must be non-negative, got {}", self.stall_tol)));
        }
        Ok(())
    }
}

/// Largest stable step for the advective limit. Only the meridional
/// velocity is counted: nothing is advected in the azimuthal direction.
pub fn cfl_dt<T: Real>(fields: &FieldSet<T>, grid: &StaggeredGrid<T>, cfl_limit: T) -> T {
    let speed = fields.max_meridional_speed();
    if speed == T::zero() {
        T::infinity()
    } else {
        cfl_limit * grid.min_spacing() / speed
    }
}

/// Discrete `D G` with the pressure at cell (0, 0) pinned. Cells are numbered z-major.
fn pressure_laplacian<T: Real>(grid: &StaggeredGrid<T>) -> Result<SparseSystem<T>> {
    let (nr, nz) = (grid.nr, grid.nz);
    let (dr, dz) = (grid.dr, grid.dz);
    let idx = |i: usize, j: usize| j * nr + i;
    let mut rows = Vec::with_capacity(nr * nz);
    for j in 0..nz {
        for i in 0..nr {
            if i == 0 && j == 0 {
                rows.push(vec![(0, T::one())]);
                continue;
            }
            let mut row = Vec::with_capacity(5);
            let cr = (grid.r_centers[i] * dr * dr).recip();
            let cz = (dz * dz).recip();
            let mut diag = T::zero();
            if i + 1 < nr {
                let c = grid.r_faces[i + 1] * cr;
                row.push((idx(i + 1, j), c));
                diag -= c;
            }
            if i > 0 {
                let c = grid.r_faces[i] * cr;
                row.push((idx(i - 1, j), c));
                diag -= c;
            }
            if j + 1 < nz {
                row.push((idx(i, j + 1), cz));
                diag -= cz;
            }
            if j > 0 {
                row.push((idx(i, j - 1), cz));
                diag -= cz;
            }
            row.push((idx(i, j), diag));
            rows.push(row);
        }
    }
    SparseSystem::from_rows(rows, vec![T::zero(); nr * nz])
}

/// Factorized operators for a fixed `dt`, grid and boundary data.
pub struct Marcher<'a, T> {
    problem: SteadyProblem<'a, T>,
    layout: Layout,
    dt: T,
    viscous: DirectSolver,
    /// Viscous residual at zero velocity unknowns (boundary contributions).
    viscous_offset: Vec<T>,
    poisson: DirectSolver,
    cfl_limit: T,
}

impl<'a, T: Real> Marcher<'a, T> {
    pub fn new(
        params: PhysParams<T>,
        bv: &'a BoundaryValues<T>,
        grid: &'a StaggeredGrid<T>,
        dt: T,
        cfl_limit: T,
    ) -> Result<Self> {
        if !(dt > T::zero()) {
            return Err(Error::Validation(format!("dt must be positive, got {dt}")));
        }
        let problem = SteadyProblem::new(grid, params, bv);
        let layout = Layout::new(grid, Unknowns::Velocity);
        let zero = FieldSet::zeros(grid);
        let visc = problem.with_terms(Terms::VISCOUS);
        let jac = visc.jacobian(&zero, &layout)?;
        let viscous_offset: Vec<T> = jac.rhs.iter().map(|x| -*x).collect();
        let mut rows = Vec::with_capacity(jac.n);
        for k in 0..jac.n {
            let (cols, vals) = jac.row(k);
            let mut row: Vec<(usize, T)> = cols.iter().zip(vals).map(|(&c, &v)| (c, v * dt)).collect();
            row.push((k, T::one()));
            rows.push(row);
        }
        let viscous = DirectSolver::factor(&SparseSystem::from_rows(rows, vec![T::zero(); jac.n])?)?;
        let poisson = DirectSolver::factor(&pressure_laplacian(grid)?)?;
        Ok(Self {
            problem,
            layout,
            dt,
            viscous,
            viscous_offset,
            poisson,
            cfl_limit,
        })
    }

    pub fn dt(&self) -> T {
        self.dt
    }

    /// One projection step. Fails before touching the state if the CFL bound is violated.
    pub fn step(&self, fields: &FieldSet<T>) -> Result<FieldSet<T>> {
        let grid = self.problem.grid;
        let limit = cfl_dt(fields, grid, self.cfl_limit);
        if self.dt > limit {
            return Err(Error::Cfl {
                dt: self.dt.to_f64_lossy(),
                limit: limit.to_f64_lossy(),
            });
        }
        let dt = self.dt;
        let mut state = fields.clone();
        state.apply_boundary(self.problem.bv);

        // Predictor: (I + dt J_visc) x* = x_n - dt (A(x_n) + G p_n + V(0)).
        let explicit = self.problem.with_terms(EXPLICIT).residual_vector(&state, &self.layout)?;
        let x = state.to_unknowns(&self.layout);
        let rhs: Vec<T> = x
            .iter()
            .zip(&explicit)
            .zip(&self.viscous_offset)
            .map(|((xi, a), v)| *xi - dt * (*a + *v))
            .collect();
        let star = self.viscous.solve(&rhs)?;
        state.set_unknowns(&self.layout, &star);

        // Projection: D G phi = D u* / dt, u = u* - dt G phi, p += phi.
        let div = divergence(&state.u, &state.w, grid)?;
        let (nr, nz) = (grid.nr, grid.nz);
        let mut b = vec![T::zero(); nr * nz];
        for j in 0..nz {
            for i in 0..nr {
                if i + j > 0 {
                    b[j * nr + i] = div[[i, j]] / dt;
                }
            }
        }
        let phi_vec = self.poisson.solve(&b)?;
        let phi = Array2::from_shape_fn((nr, nz), |(i, j)| phi_vec[j * nr + i]);
        for j in 0..nz {
            for i in 1..nr {
                state.u[[i, j]] -= dt * (phi[[i, j]] - phi[[i - 1, j]]) / grid.dr;
            }
        }
        for j in 1..nz {
            for i in 0..nr {
                state.w[[i, j]] -= dt * (phi[[i, j]] - phi[[i, j - 1]]) / grid.dz;
            }
        }
        state.p += &phi;
        state.check_finite()?;
        Ok(state)
    }
}

/// One step with freshly factorized operators and the default CFL limit.
pub fn step<T: Real>(
    fields: &FieldSet<T>,
    params: PhysParams<T>,
    bv: &BoundaryValues<T>,
    grid: &StaggeredGrid<T>,
    dt: T,
) -> Result<FieldSet<T>> {
    Marcher::new(params, bv, grid, dt, MarchConfig::<T>::default().cfl_limit)?.step(fields)
}

#[derive(Clone, Debug)]
pub struct MarchOutcome<T> {
    pub fields: FieldSet<T>,
    pub steps: usize,
    pub time: T,
    pub stalled: bool,
    /// Rate of change `max |x_{n+1} - x_n| / dt` of the last step.
    pub rate: T,
    /// Kinetic energy after every step.
    pub energy: Vec<T>,
    /// Step size in use at the end.
    pub dt: T,
}

/// March until the rate of change falls below `cfg.stall_tol` or `t_end` is reached.
pub fn run_until_stalled<T: Real>(
    fields: &FieldSet<T>,
    params: PhysParams<T>,
    bv: &BoundaryValues<T>,
    grid: &StaggeredGrid<T>,
    cfg: &MarchConfig<T>,
) -> Result<MarchOutcome<T>> {
    cfg.validate()?;
    let mut marcher = Marcher::new(params, bv, grid, cfg.dt, cfg.cfl_limit)?;
    let mut state = fields.clone();
    state.apply_boundary(bv);
    let wall = bv.max_wall_speed();
    let mut time = T::zero();
    let mut steps = 0usize;
    let mut energy = Vec::new();
    let mut rate = T::infinity();
    let eps = cfg.dt * T::lit(1e-9);

    while time + eps < cfg.t_end {
        let dt = marcher.dt();
        let next = match marcher.step(&state) {
            Ok(f) => f,
            Err(Error::Cfl { limit, .. }) if cfg.adapt_dt => {
                let mut new_dt = dt;
                while new_dt > T::lit(limit) {
                    new_dt *= T::half();
                }
                debug!("march: dt {dt} -> {new_dt} at step {steps}");
                marcher = Marcher::new(params, bv, grid, new_dt, cfg.cfl_limit)?;
                continue;
            }
            Err(Error::NonFinite(what)) => {
                return Err(Error::Diverged {
                    step: steps,
                    reason: format!("non-finite {what}"),
                })
            }
            Err(e) => return Err(e),
        };
        steps += 1;
        time += dt;
        rate = next.max_velocity_diff(&state) / dt;
        let speed = next.max_speed();
        if wall > T::zero() && speed > T::lit(100.0) * wall {
            return Err(Error::Diverged {
                step: steps,
                reason: format!("max speed {speed} exceeds 100 x wall speed {wall}"),
            });
        }
        energy.push(next.kinetic_energy(grid));
        state = next;
        if rate <= cfg.stall_tol {
            info!("march stalled after {steps} steps at t = {time}, rate {rate:e}");
            return Ok(MarchOutcome {
                fields: state,
                steps,
                time,
                stalled: true,
                rate,
                energy,
                dt: marcher.dt(),
            });
        }
    }
    info!("march reached t_end after {steps} steps, rate {rate:e}");
    Ok(MarchOutcome {
        fields: state,
        steps,
        time,
        stalled: false,
        rate,
        energy,
        dt: marcher.dt(),
    })
}

/// Max-norm of the discrete divergence of a state.
pub fn max_divergence<T: Real>(fields: &FieldSet<T>, grid: &StaggeredGrid<T>) -> Result<T> {
    Ok(max_abs(divergence(&fields.u, &fields.w, grid)?.iter().copied()))
}

//! Fully coupled Newton iteration for the steady equations.

use log::{debug, info};

use crate::bc::BoundaryValues;
use crate::error::{Error, Result};
use crate::grid::StaggeredGrid;
use crate::linsolve::{solve_linear, DirectSolver, Method};
use crate::ops::{ConvectionScheme, FieldSet, Layout, PhysParams, SteadyProblem};
use crate::scalar::{max_abs, Real};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonConfig<T> {
    /// Target for the residual max-norm.
    pub tol_abs: T,
    pub max_iters: usize,
    /// First trial step length of the line search, in `(0, 1]`.
    pub damping: T,
    /// Smallest step length tried before giving up on the iteration.
    pub min_step: T,
    pub linear: Method,
    pub scheme: ConvectionScheme,
}

impl<T: Real> Default for NewtonConfig<T> {
    fn default() -> Self {
        Self {
            tol_abs: T::lit(1e-10),
            max_iters: 30,
            damping: T::one(),
            min_step: T::lit(1e-4),
            linear: Method::Direct,
            scheme: ConvectionScheme::Centered,
        }
    }
}

impl<T: Real> NewtonConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol_abs > T::zero()) {
            return Err(Error::Validation(format!("tol_abs must be positive, got {}", self.tol_abs)));
        }
        if !(self.damping > T::zero() && self.damping <= T::one()) {
            return Err(Error::Validation(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        if !(self.min_step > T::zero() && self.min_step <= self.damping) {
            return Err(Error::Validation(format!("min_step must lie in (0, damping], got {}", self.min_step)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SteadySolution<T> {
    pub fields: FieldSet<T>,
    /// Residual max-norm before each iteration and after the last one.
    pub residual_history: Vec<T>,
    pub converged: bool,
    /// Accepted step lengths.
    pub step_lengths: Vec<T>,
}

impl<T: Real> SteadySolution<T> {
    pub fn iterations(&self) -> usize {
        self.residual_history.len().saturating_sub(1)
    }

    pub fn final_residual(&self) -> T {
        *self.residual_history.last().expect("history is never empty")
    }
}

/// Newton's method on the steady equations with centered convection by default.
pub fn solve_steady<T: Real>(
    initial: &FieldSet<T>,
    params: PhysParams<T>,
    bv: &BoundaryValues<T>,
    grid: &StaggeredGrid<T>,
    cfg: &NewtonConfig<T>,
) -> Result<SteadySolution<T>> {
    let problem = SteadyProblem::new(grid, params, bv).with_scheme(cfg.scheme);
    solve_problem(&problem, initial, cfg)
}

/// Newton's method on an arbitrary (possibly forced) steady problem.
pub fn solve_problem<T: Real>(
    problem: &SteadyProblem<'_, T>,
    initial: &FieldSet<T>,
    cfg: &NewtonConfig<T>,
) -> Result<SteadySolution<T>> {
    cfg.validate()?;
    let layout = Layout::full(problem.grid);
    let mut fields = initial.clone();
    fields.apply_boundary(problem.bv);
    let mut fields = fields.with_pinned_pressure();
    let mut x = fields.to_unknowns(&layout);
    let f0 = problem.residual_vector(&fields, &layout)?;
    let mut norm = max_abs(f0.iter().copied());
    let mut history = vec![norm];
    let mut steps = Vec::new();

    for it in 0..cfg.max_iters {
        if norm <= cfg.tol_abs {
            break;
        }
        let sys = problem.jacobian(&fields, &layout)?;
        let mut dx = match cfg.linear {
            Method::Direct => DirectSolver::factor(&sys)?.solve(&sys.rhs)?,
            Method::Iterative => solve_linear(&sys, T::lit(1e-12), Method::Iterative)?,
        };
        if let Some(k) = layout.gauge() {
            dx[k] = -x[k];
        }

        let mut lambda = cfg.damping;
        let accepted = loop {
            let trial_x: Vec<T> = x.iter().zip(&dx).map(|(a, d)| *a + lambda * *d).collect();
            let mut trial = fields.clone();
            trial.set_unknowns(&layout, &trial_x);
            let ok = trial.check_finite().is_ok();
            if ok {
                let tf = problem.residual_vector(&trial, &layout)?;
                let tn = max_abs(tf.iter().copied());
                if tn < norm {
                    break Some((trial, trial_x, tn));
                }
            }
            lambda *= T::half();
            if lambda < cfg.min_step {
                break None;
            }
        };
        match accepted {
            Some((trial, tx, tn)) => {
                debug!("newton {it}: |F| {norm:e} -> {tn:e}, step {lambda}");
                fields = trial;
                x = tx;
                norm = tn;
                history.push(norm);
                steps.push(lambda);
            }
            None => {
                info!("newton stalled at iteration {it} with |F| = {norm:e}");
                break;
            }
        }
    }
    let converged = norm <= cfg.tol_abs;
    info!("newton finished: converged={converged}, |F| = {norm:e}, {} iterations", steps.len());
    Ok(SteadySolution {
        fields,
        residual_history: history,
        converged,
        step_lengths: steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bc::{BoundarySpec, RotationProfile, Tangential};
    use crate::grid::{build_grid, DomainSpec};
    use crate::ops::steady_residual;
    use crate::stokes::{solve_swirl_stokes, SwirlStokesProblem};
    use std::f64::consts::PI;

    fn grid(n: usize) -> StaggeredGrid<f64> {
        build_grid(DomainSpec::new(0.1, 1.1, 1.0).unwrap(), n, n).unwrap()
    }

    #[test]
    fn config_validation() {
        let mut c = NewtonConfig::<f64>::default();
        assert!(c.validate().is_ok());
        c.tol_abs = 0.0;
        assert!(c.validate().is_err());
        let c = NewtonConfig { damping: 1.5, ..NewtonConfig::<f64>::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn discrete_couette_is_a_fixed_point() {
        // Discrete Couette swirl plus the pressure from the discrete radial balance.
        let g = grid(12);
        let gamma = 0.1 * PI;
        let prob = SwirlStokesProblem::double_neumann(g.clone(), gamma, 0.01);
        let mut f = solve_swirl_stokes(&prob).unwrap().to_fields(&g);
        let mut bv = prob.boundary_values();
        bv.u_bottom = Tangential::Neumann;
        for j in 0..g.nz {
            for i in 1..g.nr {
                let vbar = 0.5 * (f.v[[i - 1, j]] + f.v[[i, j]]);
                f.p[[i, j]] = f.p[[i - 1, j]] + g.dr * vbar * vbar / g.r_faces[i];
            }
        }
        let sol = solve_steady(&f, PhysParams::new(0.01).unwrap(), &bv, &g, &NewtonConfig::default()).unwrap();
        assert!(sol.converged);
        assert!(sol.iterations() <= 1, "{:?}", sol.residual_history);
    }

    #[test]
    fn converges_quadratically_from_stokes_guess() {
        let g = grid(16);
        let gamma = 0.1 * PI;
        let spec = BoundarySpec::new(RotationProfile::uniform(gamma));
        let bv = BoundaryValues::resolve(&spec, &g).unwrap();
        let params = PhysParams::new(0.01).unwrap();
        let guess = solve_swirl_stokes(&SwirlStokesProblem::new(g.clone(), gamma, 0.01))
            .unwrap()
            .to_fields(&g);
        let sol = solve_steady(&guess, params, &bv, &g, &NewtonConfig::default()).unwrap();
        assert!(sol.converged, "{:?}", sol.residual_history);
        let h = &sol.residual_history;
        let n = h.len();
        assert!(n >= 3);
        // r_{k+1} <= C r_k^2 with C fitted on the final pair holds for the pair before
        let c = h[n - 1] / (h[n - 2] * h[n - 2]);
        assert!(h[n - 2] <= c * h[n - 3] * h[n - 3], "{h:?}");
        let res = steady_residual(&sol.fields, params, &bv, &g).unwrap();
        assert!(res.max_continuity() <= 1e-10);
        assert_eq!(sol.fields.p[[0, 0]], 0.0);
        // Dirichlet data reproduced exactly
        for j in 0..g.nz {
            assert_eq!(sol.fields.u[[0, j]], 0.0);
        }
    }

    #[test]
    fn stalls_without_panicking_when_iterations_run_out() {
        let g = grid(8);
        let spec = BoundarySpec::new(RotationProfile::uniform(2.0));
        let bv = BoundaryValues::resolve(&spec, &g).unwrap();
        let cfg = NewtonConfig { max_iters: 1, ..NewtonConfig::default() };
        let sol = solve_steady(&FieldSet::zeros(&g), PhysParams::new(0.01).unwrap(), &bv, &g, &cfg).unwrap();
        assert!(!sol.converged);
        assert!(sol.residual_history.len() <= 2);
    }
}

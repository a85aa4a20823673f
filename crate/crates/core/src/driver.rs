//! End-to-end steady solve of a rotating-cylinder case: Stokes guess,
//! optional time marching, Newton with continuation in the wall speed.

use log::{info, warn};

use crate::bc::{BoundarySpec, BoundaryValues};
use crate::error::{Error, Result};
use crate::grid::StaggeredGrid;
use crate::march::{run_until_stalled, MarchConfig};
use crate::newton::{solve_steady, NewtonConfig, SteadySolution};
use crate::ops::{FieldSet, PhysParams};
use crate::scalar::Real;
use crate::stokes::solve_swirl_with;

/// Natural continuation in the wall speed.
///
/// The boundary data are scaled by `c` and `c` is raised to 1 in
/// `steps` equal increments; an increment whose Newton solve fails is
/// halved, at most `max_halvings` times in total.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuationConfig {
    pub steps: usize,
    pub max_halvings: usize,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            steps: 1,
            max_halvings: 6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveConfig<T> {
    pub newton: NewtonConfig<T>,
    /// March from the Stokes guess at the first continuation stage.
    pub march: Option<MarchConfig<T>>,
    pub continuation: ContinuationConfig,
}

impl<T: Real> Default for SolveConfig<T> {
    fn default() -> Self {
        Self {
            newton: NewtonConfig::default(),
            march: None,
            continuation: ContinuationConfig::default(),
        }
    }
}

impl<T: Real> SolveConfig<T> {
    pub fn validate(&self) -> Result<()> {
        self.newton.validate()?;
        if let Some(m) = &self.march {
            m.validate()?;
        }
        if self.continuation.steps == 0 {
            return Err(Error::Validation("continuation needs at least one step".into()));
        }
        Ok(())
    }
}

/// One Newton solve along the continuation path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stage<T> {
    pub fraction: T,
    pub converged: bool,
    pub iterations: usize,
    pub residual: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MarchSummary<T> {
    pub steps: usize,
    pub time: T,
    pub stalled: bool,
    pub rate: T,
}

#[derive(Clone, Debug)]
pub struct CaseSolution<T> {
    /// Last Newton solve. Only meaningful for the full problem if `reached_full`.
    pub solution: SteadySolution<T>,
    pub stages: Vec<Stage<T>>,
    pub march: Option<MarchSummary<T>>,
    /// Fraction of the wall speed of the last converged stage.
    pub reached: T,
}

impl<T: Real> CaseSolution<T> {
    pub fn converged(&self) -> bool {
        self.solution.converged && self.reached == T::one()
    }

    pub fn fields(&self) -> &FieldSet<T> {
        &self.solution.fields
    }
}

/// Boundary specification with all wall speeds multiplied by `c`.
pub fn scaled_spec<T: Real>(spec: &BoundarySpec<T>, c: T) -> BoundarySpec<T> {
    BoundarySpec {
        bottom: spec.bottom,
        inner: spec.inner.scaled(c),
        outer_swirl: spec.outer_swirl * c,
    }
}

/// Swirl Stokes state for the given boundary data: `u = w = p = 0`.
pub fn stokes_guess<T: Real>(bv: &BoundaryValues<T>, grid: &StaggeredGrid<T>, nu: T) -> Result<FieldSet<T>> {
    let s = solve_swirl_with(bv, grid, nu)?;
    let mut f = FieldSet::zeros(grid);
    f.v.assign(&s.v);
    f.apply_boundary(bv);
    Ok(f)
}

/// Solve the steady problem of `spec` on `grid`.
///
/// Newton failure is not an error: the result reports how far the
/// continuation got.
pub fn solve_case<T: Real>(
    spec: &BoundarySpec<T>,
    nu: T,
    grid: &StaggeredGrid<T>,
    cfg: &SolveConfig<T>,
) -> Result<CaseSolution<T>> {
    cfg.validate()?;
    spec.validate(grid)?;
    let params = PhysParams::new(nu)?;
    let mut h = T::one() / T::from_count(cfg.continuation.steps);
    let mut halvings = 0usize;
    let mut reached = T::zero();
    let mut accepted: Option<FieldSet<T>> = None;
    let mut stages = Vec::new();
    let mut march = None;
    let mut last: Option<SteadySolution<T>> = None;

    while reached < T::one() {
        let c = (reached + h).min(T::one());
        let bv = BoundaryValues::resolve(&scaled_spec(spec, c), grid)?;
        let guess = match &accepted {
            Some(f) => f.clone(),
            None => {
                let mut g = stokes_guess(&bv, grid, nu)?;
                if let (Some(mc), None) = (&cfg.march, &march) {
                    let out = run_until_stalled(&g, params, &bv, grid, mc)?;
                    march = Some(MarchSummary {
                        steps: out.steps,
                        time: out.time,
                        stalled: out.stalled,
                        rate: out.rate,
                    });
                    g = out.fields;
                }
                g
            }
        };
        let sol = solve_steady(&guess, params, &bv, grid, &cfg.newton)?;
        stages.push(Stage {
            fraction: c,
            converged: sol.converged,
            iterations: sol.iterations(),
            residual: sol.final_residual(),
        });
        info!(
            "continuation c = {c}: converged={} after {} iterations",
            sol.converged,
            sol.iterations()
        );
        if sol.converged {
            reached = c;
            accepted = Some(sol.fields.clone());
            last = Some(sol);
        } else {
            halvings += 1;
            if halvings > cfg.continuation.max_halvings {
                warn!("continuation gave up at c = {c} (last converged {reached})");
                last = Some(sol);
                break;
            }
            h *= T::half();
        }
    }
    Ok(CaseSolution {
        solution: last.expect("at least one stage ran"),
        stages,
        march,
        reached,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bc::RotationProfile;
    use crate::grid::{build_grid, DomainSpec};
    use std::f64::consts::PI;

    fn grid(n: usize) -> StaggeredGrid<f64> {
        build_grid(DomainSpec::new(0.1, 2.1, 2.0).unwrap(), n, n).unwrap()
    }

    #[test]
    fn single_stage_low_reynolds() {
        let g = grid(16);
        let spec = BoundarySpec::new(RotationProfile::uniform(0.1 * PI));
        let out = solve_case(&spec, 0.01, &g, &SolveConfig::default()).unwrap();
        assert!(out.converged());
        assert_eq!(out.stages.len(), 1);
        assert!(out.march.is_none());
    }

    #[test]
    fn continuation_reaches_the_same_state() {
        let g = grid(16);
        let spec = BoundarySpec::new(RotationProfile::uniform(0.1 * PI));
        let direct = solve_case(&spec, 0.01, &g, &SolveConfig::default()).unwrap();
        let cfg = SolveConfig {
            continuation: ContinuationConfig { steps: 3, max_halvings: 2 },
            ..SolveConfig::default()
        };
        let cont = solve_case(&spec, 0.01, &g, &cfg).unwrap();
        assert!(cont.converged());
        assert_eq!(cont.stages.len(), 3);
        assert!((cont.stages[0].fraction - 1.0 / 3.0).abs() < 1e-15);
        assert!(cont.fields().max_abs_diff(direct.fields()) < 1e-8);
    }

    #[test]
    fn marched_guess_agrees_with_stokes_guess() {
        let g = grid(12);
        let spec = BoundarySpec::new(RotationProfile::uniform(0.1 * PI));
        let cfg = SolveConfig {
            march: Some(MarchConfig {
                dt: 0.05,
                t_end: 5.0,
                ..MarchConfig::default()
            }),
            ..SolveConfig::default()
        };
        let marched = solve_case(&spec, 0.01, &g, &cfg).unwrap();
        let plain = solve_case(&spec, 0.01, &g, &SolveConfig::default()).unwrap();
        assert!(marched.converged() && plain.converged());
        assert!(marched.march.unwrap().steps > 0);
        assert!(marched.fields().max_abs_diff(plain.fields()) <= 1e-8);
    }

    #[test]
    fn gives_up_without_error() {
        let g = grid(8);
        let spec = BoundarySpec::new(RotationProfile::uniform(PI));
        let cfg = SolveConfig {
            newton: NewtonConfig { max_iters: 1, ..NewtonConfig::default() },
            continuation: ContinuationConfig { steps: 1, max_halvings: 1 },
            ..SolveConfig::default()
        };
        let out = solve_case(&spec, 0.001, &g, &cfg).unwrap();
        assert!(!out.converged());
        assert_eq!(out.stages.len(), 2);
        assert_eq!(out.reached, 0.0);
    }

    #[test]
    fn rejects_zero_steps() {
        let cfg = SolveConfig::<f64> {
            continuation: ContinuationConfig { steps: 0, max_halvings: 0 },
            ..SolveConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}

//! Wall data: rotation profiles of the cylinder and the resolved boundary
//! values consumed by the discrete operators.
//!
//! Segments and conditions:
//!
//! | segment            | u        | v              | w        |
//! |--------------------|----------|----------------|----------|
//! | plane `z = 0`      | 0        | 0 (or Hopf)    | 0        |
//! | cylinder `r = sigma` | 0      | profile(z)     | 0        |
//! | top `z = L`        | du/dz=0  | dv/dz=0        | 0        |
//! | far wall `r = R`   | 0        | `outer_swirl`  | 0        |
//!
//! Normal components sit on boundary faces and are fixed there. Tangential
//! components live half a cell inside the wall and are closed with ghost
//! values: `ghost = 2 * wall - interior` for Dirichlet data, `ghost =
//! interior` for a homogeneous Neumann condition. No swirl unknown sits on the
//! corner `(sigma, 0)`, so the mismatch between the plane and cylinder data
//! only enters through the two one-sided ghosts of the corner cell.

use crate::error::{Error, Result};
use crate::grid::StaggeredGrid;
use crate::hopf::{background_swirl, HopfParams};
use crate::scalar::Real;

/// Swirl speed prescribed on the cylinder as a function of height.
#[derive(Clone, Debug, PartialEq)]
pub enum RotationProfile<T> {
    /// Solid rotation with circulation `gamma`: `v = gamma / (2 pi sigma)`.
    Uniform { gamma: T },
    /// Continuous piecewise-linear `v(z)` through `(z, v)` breakpoints.
    PiecewiseLinear { points: Vec<(T, T)> },
}

impl<T: Real> RotationProfile<T> {
    pub fn uniform(gamma: T) -> Self {
        RotationProfile::Uniform { gamma }
    }

    pub fn piecewise(points: Vec<(T, T)>) -> Result<Self> {
        let p = RotationProfile::PiecewiseLinear { points };
        p.validate()?;
        Ok(p)
    }

    /// Constant speed 10 up to `z = 2`, then linear decay to 0 at `z = 10`.
    pub fn single_taper() -> Self {
        RotationProfile::PiecewiseLinear {
            points: vec![
                (T::zero(), T::lit(10.0)),
                (T::lit(2.0), T::lit(10.0)),
                (T::lit(10.0), T::zero()),
            ],
        }
    }

    /// Speed 4 up to `z = 2`, ramp to 8 at `z = 4`, linear decay to 0 at `z = 10`.
    pub fn ramp_then_taper() -> Self {
        RotationProfile::PiecewiseLinear {
            points: vec![
                (T::zero(), T::lit(4.0)),
                (T::lit(2.0), T::lit(4.0)),
                (T::lit(4.0), T::lit(8.0)),
                (T::lit(10.0), T::zero()),
            ],
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            RotationProfile::Uniform { gamma } => {
                if !gamma.is_finite() {
                    return Err(Error::Validation("circulation must be finite".into()));
                }
            }
            RotationProfile::PiecewiseLinear { points } => {
                if points.len() < 2 {
                    return Err(Error::Validation(
                        "piecewise profile needs at least two breakpoints".into(),
                    ));
                }
                if points.iter().any(|(z, v)| !z.is_finite() || !v.is_finite()) {
                    return Err(Error::Validation("non-finite profile breakpoint".into()));
                }
                if points.windows(2).any(|w| !(w[1].0 > w[0].0)) {
                    return Err(Error::Validation(
                        "profile breakpoints must have strictly increasing z".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Check that the profile covers `[0, height]`.
    pub fn validate_for_height(&self, height: T) -> Result<()> {
        self.validate()?;
        if let RotationProfile::PiecewiseLinear { points } = self {
            let (z0, z1) = (points[0].0, points[points.len() - 1].0);
            if z0 > T::zero() || z1 < height {
                return Err(Error::Validation(format!(
                    "profile covers [{z0}, {z1}] but the domain height is {height}"
                )));
            }
        }
        Ok(())
    }

    /// Scale the swirl amplitude by `c`.
    pub fn scaled(&self, c: T) -> Self {
        match self {
            RotationProfile::Uniform { gamma } => RotationProfile::Uniform { gamma: *gamma * c },
            RotationProfile::PiecewiseLinear { points } => RotationProfile::PiecewiseLinear {
                points: points.iter().map(|&(z, v)| (z, v * c)).collect(),
            },
        }
    }

    /// Largest-magnitude swirl speed on the cylinder (signed).
    pub fn peak_speed(&self, sigma: T) -> T {
        match self {
            RotationProfile::Uniform { gamma } => *gamma / (T::two() * T::PI() * sigma),
            RotationProfile::PiecewiseLinear { points } => points
                .iter()
                .map(|p| p.1)
                .fold(T::zero(), |m, v| if v.abs() > m.abs() { v } else { m }),
        }
    }

    /// Short textual form, e.g. `uniform gamma=...` or `piecewise 0:10,2:10,10:0`.
    pub fn describe(&self) -> String {
        match self {
            RotationProfile::Uniform { gamma } => format!("uniform gamma={gamma:.16e}"),
            RotationProfile::PiecewiseLinear { points } => {
                let pts: Vec<String> = points.iter().map(|(z, v)| format!("{z}:{v}")).collect();
                format!("piecewise {}", pts.join(","))
            }
        }
    }
}

/// Swirl speed of the cylinder wall at height `z`.
pub fn eval_rotation<T: Real>(profile: &RotationProfile<T>, sigma: T, z: T) -> Result<T> {
    if !(z >= T::zero()) {
        return Err(Error::Domain(format!("height {z} below the plane")));
    }
    match profile {
        RotationProfile::Uniform { gamma } => Ok(*gamma / (T::two() * T::PI() * sigma)),
        RotationProfile::PiecewiseLinear { points } => {
            let last = points[points.len() - 1];
            if z < points[0].0 || z > last.0 {
                return Err(Error::Domain(format!(
                    "height {z} outside profile range [{}, {}]",
                    points[0].0, last.0
                )));
            }
            let k = points
                .windows(2)
                .position(|w| z <= w[1].0)
                .unwrap_or(points.len() - 2);
            let (z0, v0) = points[k];
            let (z1, v1) = points[k + 1];
            let t = (z - z0) / (z1 - z0);
            Ok(v0 + t * (v1 - v0))
        }
    }
}

/// Rotational Reynolds number `gamma / nu`; for a varying profile the
/// circulation is taken at the peak speed, `gamma = 2 pi sigma max v`.
pub fn reynolds_of<T: Real>(profile: &RotationProfile<T>, sigma: T, nu: T) -> T {
    let gamma = match profile {
        RotationProfile::Uniform { gamma } => *gamma,
        RotationProfile::PiecewiseLinear { .. } => T::two() * T::PI() * sigma * profile.peak_speed(sigma),
    };
    gamma / nu
}

/// Condition on the plane `z = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BottomMode<T> {
    /// `u = v = w = 0`.
    NoSlip,
    /// No-slip, except that `v` follows the cutoff background swirl near the corner.
    Hopf { eps: T },
    /// `du/dz = dv/dz = 0`, `w = 0`.
    FreeSlip,
}

/// Physical boundary conditions of the rotating-cylinder problem.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySpec<T> {
    pub bottom: BottomMode<T>,
    pub inner: RotationProfile<T>,
    /// Swirl imposed on the far wall `r = R` (0 for the physical problem).
    pub outer_swirl: T,
}

impl<T: Real> BoundarySpec<T> {
    pub fn new(inner: RotationProfile<T>) -> Self {
        Self {
            bottom: BottomMode::NoSlip,
            inner,
            outer_swirl: T::zero(),
        }
    }

    pub fn with_bottom(mut self, bottom: BottomMode<T>) -> Self {
        self.bottom = bottom;
        self
    }

    pub fn with_outer_swirl(mut self, v: T) -> Self {
        self.outer_swirl = v;
        self
    }

    /// Circulation of the cylinder at the plane, used by the Hopf mode.
    pub fn base_circulation(&self, sigma: T) -> Result<T> {
        let v0 = eval_rotation(&self.inner, sigma, T::zero())?;
        Ok(T::two() * T::PI() * sigma * v0)
    }

    pub fn validate(&self, grid: &StaggeredGrid<T>) -> Result<()> {
        self.inner.validate_for_height(grid.domain.height)?;
        if !self.outer_swirl.is_finite() {
            return Err(Error::Validation("outer swirl must be finite".into()));
        }
        if let BottomMode::Hopf { eps } = self.bottom {
            HopfParams::new(eps, grid.sigma(), T::one())?;
        }
        Ok(())
    }
}

/// Closure of a tangential component on one wall.
#[derive(Clone, Debug, PartialEq)]
pub enum Tangential<T> {
    /// Wall values, one per tangential location along the wall.
    Dirichlet(Vec<T>),
    /// Homogeneous Neumann (mirror ghost).
    Neumann,
}

impl<T: Real> Tangential<T> {
    pub fn zero(n: usize) -> Self {
        Tangential::Dirichlet(vec![T::zero(); n])
    }

    pub fn constant(n: usize, c: T) -> Self {
        Tangential::Dirichlet(vec![c; n])
    }

    fn check_len(&self, n: usize, what: &str) -> Result<()> {
        match self {
            Tangential::Dirichlet(v) if v.len() != n => Err(Error::Shape(format!(
                "{what}: expected {n} wall values, got {}",
                v.len()
            ))),
            _ => Ok(()),
        }
    }
}

/// Boundary data resolved onto a particular grid.
///
/// Normal velocities are face values on the wall itself; tangential ones
/// are closures for ghost values.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryValues<T> {
    /// `u` on the faces `r = sigma` and `r = R`, one per cell row (`nz`).
    pub u_inner: Vec<T>,
    pub u_outer: Vec<T>,
    /// `w` on the faces `z = 0` and `z = L`, one per cell column (`nr`).
    pub w_bottom: Vec<T>,
    pub w_top: Vec<T>,
    /// `u` tangential to the plane and the top; indexed by r-face (`nr + 1`).
    pub u_bottom: Tangential<T>,
    pub u_top: Tangential<T>,
    /// `w` tangential to the two cylindrical walls; indexed by z-face (`nz + 1`).
    pub w_inner: Tangential<T>,
    pub w_outer: Tangential<T>,
    /// Swirl on the cylindrical walls (`nz` values) and horizontal walls (`nr` values).
    pub v_inner: Tangential<T>,
    pub v_outer: Tangential<T>,
    pub v_bottom: Tangential<T>,
    pub v_top: Tangential<T>,
}

impl<T: Real> BoundaryValues<T> {
    /// Everything homogeneous Dirichlet.
    pub fn zero(grid: &StaggeredGrid<T>) -> Self {
        let (nr, nz) = (grid.nr, grid.nz);
        Self {
            u_inner: vec![T::zero(); nz],
            u_outer: vec![T::zero(); nz],
            w_bottom: vec![T::zero(); nr],
            w_top: vec![T::zero(); nr],
            u_bottom: Tangential::zero(nr + 1),
            u_top: Tangential::zero(nr + 1),
            w_inner: Tangential::zero(nz + 1),
            w_outer: Tangential::zero(nz + 1),
            v_inner: Tangential::zero(nz),
            v_outer: Tangential::zero(nz),
            v_bottom: Tangential::zero(nr),
            v_top: Tangential::zero(nr),
        }
    }

    /// Resolve physical conditions onto `grid`.
    pub fn resolve(spec: &BoundarySpec<T>, grid: &StaggeredGrid<T>) -> Result<Self> {
        spec.validate(grid)?;
        let sigma = grid.sigma();
        let mut bv = Self::zero(grid);

        let v_wall = grid
            .z_centers
            .iter()
            .map(|&z| eval_rotation(&spec.inner, sigma, z))
            .collect::<Result<Vec<_>>>()?;
        bv.v_inner = Tangential::Dirichlet(v_wall);
        bv.v_outer = Tangential::constant(grid.nz, spec.outer_swirl);

        bv.u_top = Tangential::Neumann;
        bv.v_top = Tangential::Neumann;

        match spec.bottom {
            BottomMode::NoSlip => {}
            BottomMode::FreeSlip => {
                bv.u_bottom = Tangential::Neumann;
                bv.v_bottom = Tangential::Neumann;
            }
            BottomMode::Hopf { eps } => {
                let gamma = spec.base_circulation(sigma)?;
                let hp = HopfParams::new(eps, sigma, gamma)?;
                let v = grid
                    .r_centers
                    .iter()
                    .map(|&r| background_swirl(&hp, r))
                    .collect::<Result<Vec<_>>>()?;
                bv.v_bottom = Tangential::Dirichlet(v);
            }
        }
        Ok(bv)
    }

    pub fn validate(&self, grid: &StaggeredGrid<T>) -> Result<()> {
        let (nr, nz) = (grid.nr, grid.nz);
        let lens = [
            (self.u_inner.len(), nz, "u_inner"),
            (self.u_outer.len(), nz, "u_outer"),
            (self.w_bottom.len(), nr, "w_bottom"),
            (self.w_top.len(), nr, "w_top"),
        ];
        for (got, want, what) in lens {
            if got != want {
                return Err(Error::Shape(format!("{what}: expected {want}, got {got}")));
            }
        }
        self.u_bottom.check_len(nr + 1, "u_bottom")?;
        self.u_top.check_len(nr + 1, "u_top")?;
        self.w_inner.check_len(nz + 1, "w_inner")?;
        self.w_outer.check_len(nz + 1, "w_outer")?;
        self.v_inner.check_len(nz, "v_inner")?;
        self.v_outer.check_len(nz, "v_outer")?;
        self.v_bottom.check_len(nr, "v_bottom")?;
        self.v_top.check_len(nr, "v_top")?;
        Ok(())
    }

    /// Largest wall speed appearing anywhere in the data.
    pub fn max_wall_speed(&self) -> T {
        let mut m = T::zero();
        let mut upd = |xs: &[T]| {
            for &x in xs {
                m = m.max(x.abs());
            }
        };
        upd(&self.u_inner);
        upd(&self.u_outer);
        upd(&self.w_bottom);
        upd(&self.w_top);
        for t in [
            &self.u_bottom,
            &self.u_top,
            &self.w_inner,
            &self.w_outer,
            &self.v_inner,
            &self.v_outer,
            &self.v_bottom,
            &self.v_top,
        ] {
            if let Tangential::Dirichlet(v) = t {
                upd(v);
            }
        }
        m
    }
}

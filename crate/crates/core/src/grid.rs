//! Annular meridional domain and its staggered (MAC) discretization.
//!
//! Placement on the `nr x nz` cell mesh:
//!
//! * `u` (radial velocity) on r-faces, shape `(nr + 1, nz)`,
//! * `w` (axial velocity) on z-faces, shape `(nr, nz + 1)`,
//! * `v` (swirl) and `p` (pressure) at cell centers, shape `(nr, nz)`.
//!
//! The azimuthal factor `2 pi` is dropped from every volume and integral.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// The meridional half-plane `sigma <= r <= R`, `0 <= z <= L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DomainSpec<T> {
    /// Inner (cylinder) radius.
    pub sigma: T,
    /// Outer, artificial radius.
    pub r_outer: T,
    /// Height of the layer.
    pub height: T,
}

impl<T: Real> DomainSpec<T> {
    pub fn new(sigma: T, r_outer: T, height: T) -> Result<Self> {
        let d = Self {
            sigma,
            r_outer,
            height,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = self.sigma.is_finite() && self.r_outer.is_finite() && self.height.is_finite();
        if !finite {
            return Err(Error::Validation("domain extents must be finite".into()));
        }
        if !(self.sigma > T::zero()) {
            return Err(Error::Validation(format!("sigma must be positive, got {}", self.sigma)));
        }
        if !(self.sigma < self.r_outer) {
            return Err(Error::Validation(format!(
                "need sigma < R, got sigma={} R={}",
                self.sigma, self.r_outer
            )));
        }
        if !(self.height > T::zero()) {
            return Err(Error::Validation(format!("L must be positive, got {}", self.height)));
        }
        Ok(())
    }
}

/// Uniform staggered mesh over a [`DomainSpec`]. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct StaggeredGrid<T> {
    pub domain: DomainSpec<T>,
    pub nr: usize,
    pub nz: usize,
    pub dr: T,
    pub dz: T,
    pub r_faces: Vec<T>,
    pub z_faces: Vec<T>,
    pub r_centers: Vec<T>,
    pub z_centers: Vec<T>,
}

impl<T: Real> StaggeredGrid<T> {
    pub fn new(domain: DomainSpec<T>, nr: usize, nz: usize) -> Result<Self> {
        build_grid(domain, nr, nz)
    }

    /// Cell volume weight `r_i dr dz` (the `2 pi` factor dropped).
    #[inline]
    pub fn cell_weight(&self, i: usize) -> T {
        self.r_centers[i] * self.dr * self.dz
    }

    pub fn min_spacing(&self) -> T {
        self.dr.min(self.dz)
    }

    pub fn sigma(&self) -> T {
        self.domain.sigma
    }

    /// Same domain, `factor` times as many cells in each direction.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        build_grid(self.domain, self.nr * factor, self.nz * factor)
    }

    /// Index of the center column nearest to `r`.
    pub fn nearest_column(&self, r: T) -> usize {
        let x = ((r - self.domain.sigma) / self.dr - T::half()).round();
        let i = x.to_i64().unwrap_or(0).max(0) as usize;
        i.min(self.nr - 1)
    }
}

/// Build the uniform staggered mesh with `nr x nz` cells.
pub fn build_grid<T: Real>(domain: DomainSpec<T>, nr: usize, nz: usize) -> Result<StaggeredGrid<T>> {
    domain.validate()?;
    if nr < 2 || nz < 2 {
        return Err(Error::Validation(format!(
            "grid needs at least 2x2 cells, got {nr}x{nz}"
        )));
    }
    let dr = (domain.r_outer - domain.sigma) / T::from_count(nr);
    let dz = domain.height / T::from_count(nz);

    // Endpoints are pinned so that r_faces[nr] == R exactly.
    let mut r_faces: Vec<T> = (0..=nr)
        .map(|i| domain.sigma + T::from_count(i) * dr)
        .collect();
    r_faces[nr] = domain.r_outer;
    let mut z_faces: Vec<T> = (0..=nz).map(|j| T::from_count(j) * dz).collect();
    z_faces[nz] = domain.height;

    let r_centers = (0..nr)
        .map(|i| domain.sigma + (T::from_count(i) + T::half()) * dr)
        .collect();
    let z_centers = (0..nz)
        .map(|j| (T::from_count(j) + T::half()) * dz)
        .collect();

    Ok(StaggeredGrid {
        domain,
        nr,
        nz,
        dr,
        dz,
        r_faces,
        z_faces,
        r_centers,
        z_centers,
    })
}

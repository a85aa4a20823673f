//! Post-processing: Stokes stream function, vortex-cell census, boundary-layer
//! thickness, pumping signature and a key=value report.

use std::collections::VecDeque;
use std::fmt::Write as _;

use ndarray::Array2;

use crate::bc::BoundaryValues;
use crate::error::{Error, Result};
use crate::grid::StaggeredGrid;
use crate::ops::{divergence, FieldSet, PhysParams, SteadyProblem};
use crate::scalar::{max_abs, Real};

/// Divergence above which the stream function depends on the integration path.
pub const DIVERGENCE_WARN: f64 = 1e-8;

/// `psi` at the grid nodes `(r_faces[i], z_faces[j])`.
#[derive(Clone, Debug)]
pub struct StreamFunction<T> {
    pub psi: Array2<T>,
    pub warning: Option<String>,
}

/// `psi(r, z) = int_sigma^r w(s, z) s ds`, so that `w = psi_r / r` and `u = -psi_z / r`.
pub fn stream_function<T: Real>(u: &Array2<T>, w: &Array2<T>, grid: &StaggeredGrid<T>) -> Result<StreamFunction<T>> {
    let div = divergence(u, w, grid)?;
    let dmax = max_abs(div.iter().copied());
    let warning = (dmax > T::lit(DIVERGENCE_WARN))
        .then(|| format!("divergence {dmax:e} exceeds {DIVERGENCE_WARN:e}; psi depends on the integration path"));
    let (nr, nz) = (grid.nr, grid.nz);
    let mut psi = Array2::from_elem((nr + 1, nz + 1), T::zero());
    for j in 0..=nz {
        for i in 0..nr {
            psi[[i + 1, j]] = psi[[i, j]] + w[[i, j]] * grid.r_centers[i] * grid.dr;
        }
    }
    Ok(StreamFunction { psi, warning })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell<T> {
    /// Sign of `psi` in the cell.
    pub sign: i8,
    /// Value of `psi` of largest magnitude.
    pub extremum: T,
    /// `(r, z)` of the extremum.
    pub location: (T, T),
    /// Number of nodes in the component.
    pub nodes: usize,
}

impl<T> Cell<T> {
    /// Naming used for the figures: positive `psi` is called counter-clockwise.
    /// In axes with `r` to the right and `z` up a positive cell turns clockwise.
    pub fn orientation(&self) -> &'static str {
        if self.sign > 0 {
            "counter-clockwise"
        } else {
            "clockwise"
        }
    }
}

/// Connected components (4-neighbour) of `|psi| > frac * max|psi|` on the node grid,
/// largest first.
pub fn count_cells<T: Real>(psi: &Array2<T>, grid: &StaggeredGrid<T>, threshold_frac: T) -> Result<Vec<Cell<T>>> {
    if psi.dim() != (grid.nr + 1, grid.nz + 1) {
        return Err(Error::Shape(format!("psi {:?} is not a node field of the grid", psi.dim())));
    }
    if psi.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite("stream function".into()));
    }
    let peak = max_abs(psi.iter().copied());
    if peak == T::zero() {
        return Ok(Vec::new());
    }
    let cut = threshold_frac * peak;
    let (n0, n1) = psi.dim();
    let sign_of = |x: T| -> i8 {
        if x > cut {
            1
        } else if x < -cut {
            -1
        } else {
            0
        }
    };
    let mut seen = Array2::from_elem((n0, n1), false);
    let mut cells = Vec::new();
    let mut queue = VecDeque::new();
    for start in ndarray::indices((n0, n1)) {
        let s = sign_of(psi[start]);
        if s == 0 || seen[start] {
            continue;
        }
        seen[start] = true;
        queue.push_back(start);
        let mut best = start;
        let mut nodes = 0;
        while let Some((i, j)) = queue.pop_front() {
            nodes += 1;
            if psi[[i, j]].abs() > psi[best].abs() {
                best = (i, j);
            }
            let nb = [
                (i.wrapping_sub(1), j),
                (i + 1, j),
                (i, j.wrapping_sub(1)),
                (i, j + 1),
            ];
            for (a, b) in nb {
                if a < n0 && b < n1 && !seen[[a, b]] && sign_of(psi[[a, b]]) == s {
                    seen[[a, b]] = true;
                    queue.push_back((a, b));
                }
            }
        }
        cells.push(Cell {
            sign: s,
            extremum: psi[best],
            location: (grid.r_faces[best.0], grid.z_faces[best.1]),
            nodes,
        });
    }
    cells.sort_by(|a, b| b.nodes.cmp(&a.nodes));
    Ok(cells)
}

/// Height above the plane where the swirl at `r_probe` comes within 1% of its
/// mid-height value. Zero if the lowest sample already does.
pub fn bl_thickness<T: Real>(v: &Array2<T>, grid: &StaggeredGrid<T>, r_probe: T) -> Result<T> {
    let d = grid.domain;
    let margin = T::lit(0.2);
    if r_probe < d.sigma + margin || r_probe > d.r_outer - margin {
        return Err(Error::Validation(format!(
            "probe radius {r_probe} must lie in [sigma + 0.2, R - 0.2] = [{}, {}]",
            d.sigma + margin,
            d.r_outer - margin
        )));
    }
    if v.dim() != (grid.nr, grid.nz) {
        return Err(Error::Shape(format!("v {:?} vs grid ({}, {})", v.dim(), grid.nr, grid.nz)));
    }
    let i = grid.nearest_column(r_probe);
    let zc = &grid.z_centers;
    let col: Vec<T> = (0..grid.nz).map(|j| v[[i, j]]).collect();
    let mid = d.height * T::half();
    let k = zc.iter().position(|&z| z >= mid).unwrap_or(grid.nz - 1).max(1);
    let t = (mid - zc[k - 1]) / (zc[k] - zc[k - 1]);
    let v_ref = col[k - 1] + t * (col[k] - col[k - 1]);
    if !(v_ref.abs() >= T::lit(1e-12)) {
        return Err(Error::Validation(format!("reference swirl {v_ref:e} too small for a thickness")));
    }
    let tol = T::lit(0.01) * v_ref.abs();
    let Some(j) = col.iter().position(|&x| (x - v_ref).abs() <= tol) else {
        return Err(Error::Validation("swirl never reaches its mid-height value".into()));
    };
    if j == 0 {
        return Ok(T::zero());
    }
    let (a, b) = (col[j - 1], col[j]);
    let target = if a < v_ref { v_ref - tol } else { v_ref + tol };
    let s = ((target - a) / (b - a)).max(T::zero()).min(T::one());
    Ok(zc[j - 1] + s * (zc[j] - zc[j - 1]))
}

/// Which velocity component a window statistic refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Component {
    U,
    V,
    W,
}

/// Median of a velocity component over its own nodes inside `[r0, r1] x [z0, z1]`.
pub fn window_median<T: Real>(
    fields: &FieldSet<T>,
    grid: &StaggeredGrid<T>,
    comp: Component,
    (r0, r1): (T, T),
    (z0, z1): (T, T),
) -> Option<T> {
    let (arr, rs, zs) = match comp {
        Component::U => (&fields.u, &grid.r_faces, &grid.z_centers),
        Component::V => (&fields.v, &grid.r_centers, &grid.z_centers),
        Component::W => (&fields.w, &grid.r_centers, &grid.z_faces),
    };
    let mut vals: Vec<T> = arr
        .indexed_iter()
        .filter(|((i, j), _)| rs[*i] >= r0 && rs[*i] <= r1 && zs[*j] >= z0 && zs[*j] <= z1)
        .map(|(_, x)| *x)
        .collect();
    if vals.is_empty() {
        return None;
    }
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let n = vals.len();
    Some(if n % 2 == 1 {
        vals[n / 2]
    } else {
        (vals[n / 2 - 1] + vals[n / 2]) * T::half()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PumpingSignature {
    /// Median radial velocity near the plane is negative.
    pub inflow_near_plane: bool,
    /// Median axial velocity near the cylinder is positive.
    pub updraft_near_cylinder: bool,
}

pub fn pumping_signature<T: Real>(fields: &FieldSet<T>, grid: &StaggeredGrid<T>) -> PumpingSignature {
    let d = grid.domain;
    let lit = T::lit;
    let inflow = window_median(fields, grid, Component::U, (d.sigma + lit(0.2), lit(1.0)), (T::zero(), lit(0.1) * d.height));
    let updraft = window_median(fields, grid, Component::W, (d.sigma, d.sigma + lit(0.3)), (lit(0.2), lit(2.0)));
    PumpingSignature {
        inflow_near_plane: inflow.is_some_and(|m| m < T::zero()),
        updraft_near_cylinder: updraft.is_some_and(|m| m > T::zero()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Extrema<T> {
    pub min: T,
    pub max: T,
}

fn extrema<T: Real>(a: &Array2<T>) -> Extrema<T> {
    a.iter().fold(
        Extrema {
            min: T::infinity(),
            max: T::neg_infinity(),
        },
        |e, &x| Extrema {
            min: e.min.min(x),
            max: e.max.max(x),
        },
    )
}

#[derive(Clone, Debug)]
pub struct DiagnosticsReport<T> {
    pub psi: Array2<T>,
    pub cells: Vec<Cell<T>>,
    pub cell_count: usize,
    /// `(r_probe, thickness)`; thickness is `None` where undefined.
    pub bl_thickness: Vec<(T, Option<T>)>,
    pub pumping: PumpingSignature,
    pub div_norm: T,
    /// Momentum and continuity residual max-norms, when the equations are known.
    pub residual_norms: Option<(T, T)>,
    pub re: Option<T>,
    pub u: Extrema<T>,
    pub v: Extrema<T>,
    pub w: Extrema<T>,
    pub p: Extrema<T>,
    pub warnings: Vec<String>,
}

/// Context needed for the residual part of a report.
pub struct Equations<'a, T> {
    pub params: PhysParams<T>,
    pub bv: &'a BoundaryValues<T>,
}

impl<T: Real> DiagnosticsReport<T> {
    pub fn compute(
        fields: &FieldSet<T>,
        grid: &StaggeredGrid<T>,
        equations: Option<Equations<'_, T>>,
        re: Option<T>,
        probes: &[T],
    ) -> Result<Self> {
        fields.check_shape(grid)?;
        let sf = stream_function(&fields.u, &fields.w, grid)?;
        let cells = count_cells(&sf.psi, grid, T::lit(0.02))?;
        let div_norm = max_abs(divergence(&fields.u, &fields.w, grid)?.iter().copied());
        let residual_norms = match equations {
            Some(eq) => {
                let r = SteadyProblem::new(grid, eq.params, eq.bv).residual(fields)?;
                Some((r.max_momentum(), r.max_continuity()))
            }
            None => None,
        };
        let bl = probes.iter().map(|&r| (r, bl_thickness(&fields.v, grid, r).ok())).collect();
        Ok(Self {
            cell_count: cells.len(),
            cells,
            psi: sf.psi,
            bl_thickness: bl,
            pumping: pumping_signature(fields, grid),
            div_norm,
            residual_norms,
            re,
            u: extrema(&fields.u),
            v: extrema(&fields.v),
            w: extrema(&fields.w),
            p: extrema(&fields.p),
            warnings: sf.warning.into_iter().collect(),
        })
    }

    /// One `key=value` per line; `psi` is summarized by its extrema.
    pub fn to_key_value(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "cell_count={}", self.cell_count);
        for (k, c) in self.cells.iter().enumerate() {
            let _ = writeln!(
                s,
                "cell.{k}=sign:{} extremum:{:e} r:{} z:{} nodes:{} orientation:{}",
                c.sign,
                c.extremum,
                c.location.0,
                c.location.1,
                c.nodes,
                c.orientation()
            );
        }
        let ps = extrema(&self.psi);
        let _ = writeln!(s, "psi_min={:e}", ps.min);
        let _ = writeln!(s, "psi_max={:e}", ps.max);
        for (r, t) in &self.bl_thickness {
            match t {
                Some(t) => {
                    let _ = writeln!(s, "bl_thickness@{r}={t}");
                }
                None => {
                    let _ = writeln!(s, "bl_thickness@{r}=undefined");
                }
            }
        }
        let _ = writeln!(s, "inflow_near_plane={}", self.pumping.inflow_near_plane);
        let _ = writeln!(s, "updraft_near_cylinder={}", self.pumping.updraft_near_cylinder);
        let _ = writeln!(s, "div_norm={:e}", self.div_norm);
        if let Some((m, c)) = self.residual_norms {
            let _ = writeln!(s, "residual_momentum={m:e}");
            let _ = writeln!(s, "residual_continuity={c:e}");
        }
        if let Some(re) = self.re {
            let _ = writeln!(s, "re={re}");
        }
        for (name, e) in [("u", self.u), ("v", self.v), ("w", self.w), ("p", self.p)] {
            let _ = writeln!(s, "{name}_min={:e}", e.min);
            let _ = writeln!(s, "{name}_max={:e}", e.max);
        }
        for w in &self.warnings {
            let _ = writeln!(s, "warning={w}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, DomainSpec};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn grid(nr: usize, nz: usize) -> StaggeredGrid<f64> {
        build_grid(DomainSpec::new(0.1, 1.1, 1.0).unwrap(), nr, nz).unwrap()
    }

    #[test]
    fn uniform_updraft_stream_function() {
        let g = grid(10, 6);
        let w0 = 0.7;
        let mut f = FieldSet::zeros(&g);
        f.w.fill(w0);
        let sf = stream_function(&f.u, &f.w, &g).unwrap();
        assert!(sf.warning.is_none());
        for ((i, _), p) in sf.psi.indexed_iter() {
            let r = g.r_faces[i];
            assert!((p - w0 * (r * r - 0.01) / 2.0).abs() < 1e-14);
        }
        let zero = stream_function(&FieldSet::zeros(&g).u, &FieldSet::zeros(&g).w, &g).unwrap();
        assert!(zero.psi.iter().all(|x| *x == 0.0));
        assert!(count_cells(&zero.psi, &g, 0.02).unwrap().is_empty());
    }

    #[test]
    fn divergent_input_warns() {
        let g = grid(6, 6);
        let mut f = FieldSet::zeros(&g);
        f.u[[3, 2]] = 1.0;
        assert!(stream_function(&f.u, &f.w, &g).unwrap().warning.is_some());
    }

    fn node_field(g: &StaggeredGrid<f64>, f: impl Fn(f64, f64) -> f64) -> Array2<f64> {
        Array2::from_shape_fn((g.nr + 1, g.nz + 1), |(i, j)| f(g.r_faces[i], g.z_faces[j]))
    }

    #[test]
    fn census_of_synthetic_cells() {
        let g = grid(20, 20);
        let one = node_field(&g, |r, z| (PI * (r - 0.1)).sin() * (PI * z).sin());
        let cells = count_cells(&one, &g, 0.02).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].sign, 1);
        assert!((cells[0].location.0 - 0.6).abs() < 1e-12 && (cells[0].location.1 - 0.5).abs() < 1e-12);
        let two = node_field(&g, |r, z| (PI * (r - 0.1)).sin() * (2.0 * PI * z).sin());
        let cells = count_cells(&two, &g, 0.02).unwrap();
        assert_eq!(cells.len(), 2);
        assert_eq!(cells.iter().map(|c| c.sign as i32).sum::<i32>(), 0);
        assert_ne!(cells[0].orientation(), cells[1].orientation());
    }

    #[test]
    fn recovers_velocities_from_psi() {
        let g = grid(16, 16);
        let psi_fn = |r: f64, z: f64| (PI * (r - 0.1)).sin().powi(2) * (1.0 - (2.0 * PI * z).cos());
        let psi = node_field(&g, psi_fn);
        let mut f = FieldSet::zeros(&g);
        for ((i, j), u) in f.u.indexed_iter_mut() {
            *u = -(psi[[i, j + 1]] - psi[[i, j]]) / (g.dz * g.r_faces[i]);
        }
        for ((i, j), w) in f.w.indexed_iter_mut() {
            *w = (psi[[i + 1, j]] - psi[[i, j]]) / (g.dr * g.r_centers[i]);
        }
        let sf = stream_function(&f.u, &f.w, &g).unwrap();
        assert!(sf.warning.is_none());
        for (a, b) in sf.psi.iter().zip(psi.iter()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn thickness_of_ramp_and_flat_profiles() {
        let g = grid(10, 200);
        let flat = Array2::from_elem((10, 200), 2.0);
        assert_eq!(bl_thickness(&flat, &g, 0.5).unwrap(), 0.0);
        let h0 = 0.3;
        let ramp = Array2::from_shape_fn((10, 200), |(_, j)| 2.0 * (g.z_centers[j] / h0).min(1.0));
        let t = bl_thickness(&ramp, &g, 0.5).unwrap();
        assert!((t - 0.99 * h0).abs() <= g.dz, "{t}");
        assert!(bl_thickness(&ramp, &g, 0.2).is_err());
        assert!(bl_thickness(&Array2::zeros((10, 200)), &g, 0.5).is_err());
    }

    #[test]
    fn zero_flow_has_no_pumping() {
        let g = build_grid(DomainSpec::new(0.1, 2.1, 4.0).unwrap(), 20, 40).unwrap();
        let s = pumping_signature(&FieldSet::zeros(&g), &g);
        assert_eq!(
            s,
            PumpingSignature {
                inflow_near_plane: false,
                updraft_near_cylinder: false
            }
        );
        let mut f = FieldSet::zeros(&g);
        f.u.fill(-1.0);
        f.w.fill(1.0);
        let s = pumping_signature(&f, &g);
        assert!(s.inflow_near_plane && s.updraft_near_cylinder);
    }

    #[test]
    fn report_lists_every_cell() {
        let g = grid(8, 8);
        let mut f = FieldSet::zeros(&g);
        f.v.fill(1.0);
        let rep = DiagnosticsReport::compute(&f, &g, None, Some(10.0 * PI), &[0.5]).unwrap();
        assert_eq!(rep.cell_count, rep.cells.len());
        let text = rep.to_key_value();
        assert!(text.contains("cell_count=0"));
        assert!(text.contains("bl_thickness@0.5=0"));
        assert!(text.lines().all(|l| l.contains('=')));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn census_is_scale_invariant(c in 0.01f64..100.0, k in 1usize..4) {
            let g = grid(16, 16);
            let psi = node_field(&g, |r, z| (PI * (r - 0.1)).sin() * (k as f64 * PI * z).sin());
            let base = count_cells(&psi, &g, 0.02).unwrap().len();
            let scaled = count_cells(&psi.mapv(|x| c * x), &g, 0.02).unwrap().len();
            prop_assert_eq!(base, k);
            prop_assert_eq!(base, scaled);
        }
    }
}

//! Implementations of the `vortex` subcommands. Each returns the text to
//! print on success.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use vortex_core::bc::{reynolds_of, BoundaryValues, RotationProfile};
use vortex_core::diag::{DiagnosticsReport, Equations};
use vortex_core::driver::{solve_case, stokes_guess, CaseSolution};
use vortex_core::grid::StaggeredGrid;
use vortex_core::mms::{convergence_study, ManufacturedCase};
use vortex_core::ops::{FieldSet, PhysParams};
use vortex_core::stokes::{couette_exact, solve_swirl_stokes, SwirlStokesProblem};

use crate::config::{BcConfig, RunConfig};
use crate::error::{CliError, Result};
use crate::fieldfile::{read_fields, write_fields, FieldFile, Section};

pub const CONFIG_NAME: &str = "config.ini";
pub const DIAGNOSTICS_NAME: &str = "diagnostics.txt";

/// Radii at which boundary-layer thicknesses are reported, when inside the probe range.
const BL_PROBES: [f64; 3] = [0.6, 1.0, 1.5];

fn probes(grid: &StaggeredGrid<f64>) -> Vec<f64> {
    let (lo, hi) = (grid.sigma() + 0.2, grid.domain.r_outer - 0.2);
    BL_PROBES.iter().copied().filter(|r| (lo..=hi).contains(r)).collect()
}

fn prepare_dir(cfg: &RunConfig, out: &Path) -> Result<()> {
    fs::create_dir_all(out)?;
    fs::write(out.join(CONFIG_NAME), cfg.to_ini())?;
    Ok(())
}

fn report(
    cfg: &RunConfig,
    fields: &FieldSet<f64>,
    grid: &StaggeredGrid<f64>,
    bv: &BoundaryValues<f64>,
) -> Result<DiagnosticsReport<f64>> {
    let eq = Equations {
        params: cfg.params()?,
        bv,
    };
    let re = reynolds_of(&cfg.profile, grid.sigma(), cfg.nu);
    Ok(DiagnosticsReport::compute(fields, grid, Some(eq), Some(re), &probes(grid))?)
}

fn write_outputs(
    cfg: &RunConfig,
    out: &Path,
    grid: &StaggeredGrid<f64>,
    fields: &FieldSet<f64>,
    extra_meta: Vec<(String, String)>,
    diag: &DiagnosticsReport<f64>,
) -> Result<PathBuf> {
    let mut ff = FieldFile::new(grid.clone(), cfg.nu, fields.clone());
    ff.metadata = cfg.bc().to_pairs();
    ff.metadata.extend(extra_meta);
    let text = diag.to_key_value();
    if cfg.output.diagnostics {
        ff.extras.push(Section {
            name: "diagnostics".into(),
            lines: text.lines().map(str::to_string).collect(),
        });
    }
    let path = out.join(&cfg.output.fields);
    write_fields(&ff, cfg.output.precision, &path)?;
    fs::write(out.join(DIAGNOSTICS_NAME), text)?;
    Ok(path)
}

fn stage_summary(sol: &CaseSolution<f64>) -> String {
    let mut s = String::new();
    if let Some(m) = &sol.march {
        let _ = writeln!(s, "march: {} steps to t={} (stalled={}, rate={:e})", m.steps, m.time, m.stalled, m.rate);
    }
    for st in &sol.stages {
        let _ = writeln!(
            s,
            "stage c={:.6}: converged={} iterations={} residual={:e}",
            st.fraction, st.converged, st.iterations, st.residual
        );
    }
    s
}

/// `solve`: steady Navier-Stokes solution of the configured case.
pub fn solve(cfg: &RunConfig, out: &Path) -> Result<String> {
    prepare_dir(cfg, out)?;
    let grid = cfg.grid()?;
    let spec = cfg.boundary_spec()?;
    let sol = solve_case(&spec, cfg.nu, &grid, &cfg.solver)?;
    let bv = BoundaryValues::resolve(&spec, &grid)?;
    let diag = report(cfg, sol.fields(), &grid, &bv)?;
    let meta = vec![
        ("converged".to_string(), sol.converged().to_string()),
        ("reached".to_string(), format!("{:?}", sol.reached)),
        ("residual".to_string(), format!("{:e}", sol.solution.final_residual())),
    ];
    let path = write_outputs(cfg, out, &grid, sol.fields(), meta, &diag)?;
    let mut s = stage_summary(&sol);
    let _ = writeln!(s, "cells={} fields={}", diag.cell_count, path.display());
    if !sol.converged() {
        return Err(CliError::NotConverged(format!(
            "{s}newton reached {} of the wall speed; last residual {:e}",
            sol.reached,
            sol.solution.final_residual()
        )));
    }
    Ok(s)
}

/// `stokes`: the swirl Stokes state `(0, v_s, 0)` with the configured boundary data.
pub fn stokes(cfg: &RunConfig, out: &Path) -> Result<String> {
    prepare_dir(cfg, out)?;
    let grid = cfg.grid()?;
    let bv = BoundaryValues::resolve(&cfg.boundary_spec()?, &grid)?;
    let fields = stokes_guess(&bv, &grid, cfg.nu)?;
    let diag = report(cfg, &fields, &grid, &bv)?;
    let path = write_outputs(cfg, out, &grid, &fields, Vec::new(), &diag)?;
    let mut s = String::new();
    if let Some((m, c)) = diag.residual_norms {
        let _ = writeln!(s, "navier-stokes residual of the stokes state: momentum={m:e} continuity={c:e}");
    }
    let _ = writeln!(s, "fields={}", path.display());
    Ok(s)
}

/// `couette`: z-independent swirl between free-slip horizontal walls against
/// the exact circular Couette flow.
pub fn couette(cfg: &RunConfig) -> Result<String> {
    let grid = cfg.grid()?;
    let gamma = match &cfg.profile {
        RotationProfile::Uniform { gamma } => *gamma,
        p => 2.0 * std::f64::consts::PI * grid.sigma() * p.peak_speed(grid.sigma()),
    };
    let prob = SwirlStokesProblem::double_neumann(grid.clone(), gamma, cfg.nu);
    let sol = solve_swirl_stokes(&prob)?;
    let v0 = prob.wall_swirl();
    let d = grid.domain;
    let mut err = 0.0f64;
    for ((i, _), v) in sol.v.indexed_iter() {
        let exact = couette_exact(d.sigma, d.r_outer, v0, grid.r_centers[i])?;
        err = err.max((v - exact).abs());
    }
    Ok(format!(
        "grid={}x{} wall_swirl={v0:e} max_error={err:e} max_rel_error={:e}\n",
        grid.nr,
        grid.nz,
        err / v0.abs()
    ))
}

/// `mms`: manufactured-solution convergence study on the configured
/// domain and viscosity, starting from the configured `nr`.
pub fn mms(cfg: &RunConfig, levels: usize) -> Result<String> {
    let case = ManufacturedCase {
        domain: cfg.domain,
        nu: cfg.nu,
        c0: 0.5,
        v0: 1.0,
    };
    let study = convergence_study(&case, cfg.nr, levels, &cfg.solver.newton)?;
    let mut s = String::new();
    for l in &study.levels {
        let _ = writeln!(
            s,
            "n={} h={:e} err_u={:e} err_v={:e} err_w={:e} err_p={:e} newton={}",
            l.n, l.h, l.u, l.v, l.w, l.p, l.newton_iterations
        );
    }
    for (k, o) in study.orders.iter().enumerate() {
        let _ = writeln!(
            s,
            "order {}->{}: u={:.3} v={:.3} w={:.3} p={:.3}",
            study.levels[k].n,
            study.levels[k + 1].n,
            o.u,
            o.v,
            o.w,
            o.p
        );
    }
    Ok(s)
}

/// `sweep`: one `solve` per value of `key`, each in its own subdirectory.
pub fn sweep(cfg: &RunConfig, key: &str, values: &[String], out: &Path) -> Result<String> {
    if values.is_empty() {
        return Err(CliError::Config("sweep needs at least one value".into()));
    }
    let cases = values
        .iter()
        .map(|v| cfg.with_override(key, v).map(|c| (v, c)))
        .collect::<Result<Vec<_>>>()?;
    fs::create_dir_all(out)?;
    let mut s = String::new();
    let mut failed = 0;
    for (v, c) in cases {
        let dir = out.join(format!("{key}={v}"));
        match solve(&c, &dir) {
            Ok(_) => {
                let _ = writeln!(s, "{key}={v}: converged ({})", dir.display());
            }
            Err(CliError::NotConverged(_)) => {
                failed += 1;
                let _ = writeln!(s, "{key}={v}: not converged ({})", dir.display());
            }
            Err(e) => return Err(e),
        }
    }
    if failed > 0 {
        return Err(CliError::NotConverged(format!("{s}{failed} of {} cases failed", values.len())));
    }
    Ok(s)
}

/// `diag`: diagnostics of a stored field file. Residual norms are included
/// when the file records its boundary conditions.
pub fn diag(path: &Path) -> Result<String> {
    let ff = read_fields(path)?;
    let grid = &ff.grid;
    let bc = BcConfig::from_pairs(ff.metadata.iter().map(|(k, v)| (k.as_str(), v.as_str()))).ok();
    let bv = match &bc {
        Some(b) => Some(BoundaryValues::resolve(&b.spec()?, grid)?),
        None => None,
    };
    let params = PhysParams::new(ff.nu)?;
    let eq = bv.as_ref().map(|bv| Equations { params, bv });
    let re = bc.as_ref().map(|b| reynolds_of(&b.profile, grid.sigma(), ff.nu));
    let report = DiagnosticsReport::compute(&ff.fields, grid, eq, re, &probes(grid))?;
    Ok(report.to_key_value())
}

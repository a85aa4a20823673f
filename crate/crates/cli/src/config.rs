//! Run configuration: an INI file with the sections `[domain]`, `[grid]`,
//! `[physics]`, `[bc]`, `[solver]` and `[output]`.
//!
//! ```text
//! [domain]
//! sigma = 0.1
//! R = 4
//! L = 10
//!
//! [grid]
//! nr = 129
//! nz = 129
//!
//! [physics]
//! nu = 0.01
//!
//! [bc]
//! bottom = noslip
//! profile = uniform
//! gamma = 0.3141592653589793
//!
//! [solver]
//! continuation.steps = 4
//!
//! [output]
//! fields = fields.csv
//! ```
//!
//! Every key is checked against the list below; anything else is an error.
//! Keys under `[solver]` and `[output]` have defaults.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use ini::Ini;
use vortex_core::bc::{BottomMode, BoundarySpec, RotationProfile};
use vortex_core::driver::{ContinuationConfig, SolveConfig};
use vortex_core::grid::{build_grid, DomainSpec, StaggeredGrid};
use vortex_core::linsolve::Method;
use vortex_core::march::MarchConfig;
use vortex_core::newton::NewtonConfig;
use vortex_core::ops::{ConvectionScheme, PhysParams};

use crate::error::{CliError, Result};

pub const SECTIONS: [&str; 6] = ["domain", "grid", "physics", "bc", "solver", "output"];

const KEYS: &[(&str, &[&str])] = &[
    ("domain", &["sigma", "R", "L"]),
    ("grid", &["nr", "nz"]),
    ("physics", &["nu"]),
    ("bc", &["bottom", "profile", "gamma", "points", "hopf.eps", "outer_swirl"]),
    (
        "solver",
        &[
            "newton.tol",
            "newton.max_iters",
            "newton.damping",
            "newton.min_step",
            "linear",
            "scheme",
            "march",
            "march.dt",
            "march.t_end",
            "march.stall_tol",
            "march.cfl_limit",
            "continuation.steps",
            "continuation.max_halvings",
        ],
    ),
    ("output", &["fields", "precision", "diagnostics"]),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BottomKind {
    NoSlip,
    FreeSlip,
    Hopf,
}

impl BottomKind {
    fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "noslip" | "no-slip" => Ok(BottomKind::NoSlip),
            "freeslip" | "free-slip" => Ok(BottomKind::FreeSlip),
            "hopf" => Ok(BottomKind::Hopf),
            _ => Err(CliError::Config(format!("[bc] bottom: unknown mode '{s}'"))),
        }
    }

    fn name(self) -> &'static str {
        match self {
            BottomKind::NoSlip => "noslip",
            BottomKind::FreeSlip => "freeslip",
            BottomKind::Hopf => "hopf",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    /// File name of the field file inside the output directory.
    pub fields: String,
    /// Significant digits of the field file; 17 makes it lossless.
    pub precision: usize,
    /// Embed the diagnostics report in the field file.
    pub diagnostics: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            fields: "fields.csv".into(),
            precision: 17,
            diagnostics: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub domain: DomainSpec<f64>,
    pub nr: usize,
    pub nz: usize,
    pub nu: f64,
    pub bottom: BottomKind,
    pub hopf_eps: Option<f64>,
    pub profile: RotationProfile<f64>,
    pub outer_swirl: f64,
    pub solver: SolveConfig<f64>,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn grid(&self) -> Result<StaggeredGrid<f64>> {
        Ok(build_grid(self.domain, self.nr, self.nz)?)
    }

    pub fn params(&self) -> Result<PhysParams<f64>> {
        Ok(PhysParams::new(self.nu)?)
    }

    pub fn bc(&self) -> BcConfig {
        BcConfig {
            bottom: self.bottom,
            hopf_eps: self.hopf_eps,
            profile: self.profile.clone(),
            outer_swirl: self.outer_swirl,
        }
    }

    pub fn boundary_spec(&self) -> Result<BoundarySpec<f64>> {
        self.bc().spec()
    }

    /// Check everything against the owning modules.
    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        self.params()?;
        self.boundary_spec()?.validate(&grid)?;
        self.solver.validate()?;
        if !(1..=17).contains(&self.output.precision) {
            return Err(CliError::Config(format!(
                "[output] precision must lie in 1..=17, got {}",
                self.output.precision
            )));
        }
        if self.output.fields.is_empty() || self.output.fields.contains(['/', '\\']) {
            return Err(CliError::Config(format!(
                "[output] fields must be a plain file name, got '{}'",
                self.output.fields
            )));
        }
        Ok(())
    }

    /// Replace one value, addressed as `section.key` or by a key that is
    /// unique across sections, and revalidate.
    pub fn with_override(&self, key: &str, value: &str) -> Result<Self> {
        let (section, name) = resolve_key(key)?;
        let mut text = self.to_ini();
        let mut ini = Ini::load_from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
        ini.with_section(Some(section)).set(name, value);
        let mut buf = Vec::new();
        ini.write_to(&mut buf)?;
        text = String::from_utf8(buf).map_err(|e| CliError::Config(e.to_string()))?;
        parse_config(&text)
    }

    /// The resolved configuration with every key spelled out.
    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        let d = &self.domain;
        let _ = writeln!(s, "[domain]\nsigma = {:?}\nR = {:?}\nL = {:?}\n", d.sigma, d.r_outer, d.height);
        let _ = writeln!(s, "[grid]\nnr = {}\nnz = {}\n", self.nr, self.nz);
        let _ = writeln!(s, "[physics]\nnu = {:?}\n", self.nu);
        let _ = writeln!(s, "[bc]");
        for (k, v) in self.bc().to_pairs() {
            let _ = writeln!(s, "{k} = {v}");
        }
        let _ = writeln!(s);

        let n = &self.solver.newton;
        let _ = writeln!(s, "[solver]");
        let _ = writeln!(s, "newton.tol = {:?}", n.tol_abs);
        let _ = writeln!(s, "newton.max_iters = {}", n.max_iters);
        let _ = writeln!(s, "newton.damping = {:?}", n.damping);
        let _ = writeln!(s, "newton.min_step = {:?}", n.min_step);
        let linear = match n.linear {
            Method::Direct => "direct",
            Method::Iterative => "iterative",
        };
        let scheme = match n.scheme {
            ConvectionScheme::Centered => "centered",
            ConvectionScheme::Upwind => "upwind",
        };
        let _ = writeln!(s, "linear = {linear}\nscheme = {scheme}");
        let _ = writeln!(s, "march = {}", self.solver.march.is_some());
        let m = self.solver.march.unwrap_or_default();
        let _ = writeln!(s, "march.dt = {:?}", m.dt);
        let _ = writeln!(s, "march.t_end = {:?}", m.t_end);
        let _ = writeln!(s, "march.stall_tol = {:?}", m.stall_tol);
        let _ = writeln!(s, "march.cfl_limit = {:?}", m.cfl_limit);
        let c = &self.solver.continuation;
        let _ = writeln!(s, "continuation.steps = {}", c.steps);
        let _ = writeln!(s, "continuation.max_halvings = {}\n", c.max_halvings);

        let o = &self.output;
        let _ = writeln!(s, "[output]\nfields = {}\nprecision = {}\ndiagnostics = {}", o.fields, o.precision, o.diagnostics);
        s
    }
}

fn resolve_key(key: &str) -> Result<(&'static str, &'static str)> {
    if let Some((sec, name)) = key.split_once('.') {
        if let Some((s, keys)) = KEYS.iter().find(|(s, _)| *s == sec) {
            if let Some(k) = keys.iter().find(|k| **k == name) {
                return Ok((s, k));
            }
        }
    }
    let hits: Vec<(&'static str, &'static str)> = KEYS
        .iter()
        .flat_map(|(s, keys)| keys.iter().filter(|k| **k == key).map(move |k| (*s, *k)))
        .collect();
    match hits.as_slice() {
        [one] => Ok(*one),
        [] => Err(CliError::Config(format!("unknown key '{key}'"))),
        _ => Err(CliError::Config(format!("ambiguous key '{key}', qualify it with its section"))),
    }
}

/// Raw `section -> key -> value` map with structural checks applied.
fn sections(text: &str) -> Result<BTreeMap<String, BTreeMap<String, String>>> {
    let ini = Ini::load_from_str(text).map_err(|e| CliError::Config(format!("syntax: {e}")))?;
    let mut out: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
    for (sec, props) in ini.iter() {
        let Some(sec) = sec else {
            if let Some((k, _)) = props.iter().next() {
                return Err(CliError::Config(format!("key '{k}' outside any section")));
            }
            continue;
        };
        let Some((_, allowed)) = KEYS.iter().find(|(s, _)| *s == sec) else {
            return Err(CliError::Config(format!("unknown section [{sec}]")));
        };
        let entry = out.entry(sec.to_string()).or_default();
        for (k, v) in props.iter() {
            if !allowed.contains(&k) {
                return Err(CliError::Config(format!("[{sec}] unknown key '{k}'")));
            }
            if entry.insert(k.to_string(), v.trim().to_string()).is_some() {
                return Err(CliError::Config(format!("[{sec}] duplicate key '{k}'")));
            }
        }
    }
    let missing: Vec<&str> = SECTIONS.iter().copied().filter(|s| !out.contains_key(*s)).collect();
    if !missing.is_empty() {
        let list: Vec<String> = missing.iter().map(|s| format!("[{s}]")).collect();
        return Err(CliError::Config(format!("missing sections: {}", list.join(", "))));
    }
    Ok(out)
}

struct Section<'a> {
    name: &'a str,
    map: &'a BTreeMap<String, String>,
}

impl Section<'_> {
    fn raw(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    fn required(&self, key: &str) -> Result<&str> {
        self.raw(key)
            .ok_or_else(|| CliError::Config(format!("[{}] missing required key '{key}'", self.name)))
    }

    fn parse<V: std::str::FromStr>(&self, key: &str, text: &str) -> Result<V> {
        text.parse().map_err(|_| {
            CliError::Config(format!(
                "[{}] {key}: cannot parse '{text}' as {}",
                self.name,
                std::any::type_name::<V>()
            ))
        })
    }

    fn get<V: std::str::FromStr>(&self, key: &str) -> Result<V> {
        let t = self.required(key)?;
        self.parse(key, t)
    }

    fn get_or<V: std::str::FromStr>(&self, key: &str, default: V) -> Result<V> {
        match self.raw(key) {
            Some(t) => self.parse(key, t),
            None => Ok(default),
        }
    }
}

fn parse_points(text: &str) -> Result<Vec<(f64, f64)>> {
    text.split(',')
        .map(|p| {
            let (z, v) = p
                .trim()
                .split_once(':')
                .ok_or_else(|| CliError::Config(format!("[bc] points: expected z:v, got '{}'", p.trim())))?;
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Config(format!("[bc] points: bad number '{}'", s.trim())))
            };
            Ok((num(z)?, num(v)?))
        })
        .collect()
}

/// Contents of the `[bc]` section.
#[derive(Clone, Debug, PartialEq)]
pub struct BcConfig {
    pub bottom: BottomKind,
    pub hopf_eps: Option<f64>,
    pub profile: RotationProfile<f64>,
    pub outer_swirl: f64,
}

impl BcConfig {
    pub fn spec(&self) -> Result<BoundarySpec<f64>> {
        let bottom = match self.bottom {
            BottomKind::NoSlip => BottomMode::NoSlip,
            BottomKind::FreeSlip => BottomMode::FreeSlip,
            BottomKind::Hopf => BottomMode::Hopf {
                eps: self
                    .hopf_eps
                    .ok_or_else(|| CliError::Config("[bc] bottom = hopf needs hopf.eps".into()))?,
            },
        };
        Ok(BoundarySpec::new(self.profile.clone())
            .with_bottom(bottom)
            .with_outer_swirl(self.outer_swirl))
    }

    /// `key=value` lines of the `[bc]` section.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut v = vec![("bottom".to_string(), self.bottom.name().to_string())];
        match &self.profile {
            RotationProfile::Uniform { gamma } => {
                v.push(("profile".into(), "uniform".into()));
                v.push(("gamma".into(), format!("{gamma:?}")));
            }
            RotationProfile::PiecewiseLinear { points } => {
                let pts: Vec<String> = points.iter().map(|(z, v)| format!("{z:?}:{v:?}")).collect();
                v.push(("profile".into(), "piecewise".into()));
                v.push(("points".into(), pts.join(", ")));
            }
        }
        if let Some(eps) = self.hopf_eps {
            v.push(("hopf.eps".into(), format!("{eps:?}")));
        }
        v.push(("outer_swirl".into(), format!("{:?}", self.outer_swirl)));
        v
    }

    /// Rebuild from `key=value` pairs, ignoring keys that are not `[bc]` keys.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<Self> {
        let allowed = KEYS.iter().find(|(s, _)| *s == "bc").expect("bc keys").1;
        let map: BTreeMap<String, String> = pairs
            .into_iter()
            .filter(|(k, _)| allowed.contains(k))
            .map(|(k, v)| (k.to_string(), v.trim().to_string()))
            .collect();
        parse_bc(&Section { name: "bc", map: &map })
    }
}

fn parse_bc(b: &Section<'_>) -> Result<BcConfig> {
    let bottom = BottomKind::parse(b.raw("bottom").unwrap_or("noslip"))?;
    let hopf_eps = b.raw("hopf.eps").map(|t| b.parse("hopf.eps", t)).transpose()?;
    let profile = match b.required("profile")?.to_ascii_lowercase().as_str() {
        "uniform" => {
            if b.raw("points").is_some() {
                return Err(CliError::Config("[bc] points given for a uniform profile".into()));
            }
            RotationProfile::uniform(b.get("gamma")?)
        }
        "piecewise" => {
            if b.raw("gamma").is_some() {
                return Err(CliError::Config("[bc] gamma given for a piecewise profile".into()));
            }
            RotationProfile::piecewise(parse_points(b.required("points")?)?)?
        }
        other => return Err(CliError::Config(format!("[bc] profile: unknown kind '{other}'"))),
    };
    let outer_swirl = b.get_or("outer_swirl", 0.0)?;
    Ok(BcConfig {
        bottom,
        hopf_eps,
        profile,
        outer_swirl,
    })
}

/// Parse and validate a configuration.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let secs = sections(text)?;
    let sec = |name: &'static str| Section {
        name,
        map: &secs[name],
    };

    let d = sec("domain");
    let domain = DomainSpec {
        sigma: d.get("sigma")?,
        r_outer: d.get("R")?,
        height: d.get("L")?,
    };
    let g = sec("grid");
    let (nr, nz) = (g.get("nr")?, g.get("nz")?);
    let nu = sec("physics").get("nu")?;

    let BcConfig { bottom, hopf_eps, profile, outer_swirl } = parse_bc(&sec("bc"))?;

    let s = sec("solver");
    let nd = NewtonConfig::<f64>::default();
    let linear = match s.raw("linear").unwrap_or("direct") {
        "direct" => Method::Direct,
        "iterative" => Method::Iterative,
        other => return Err(CliError::Config(format!("[solver] linear: unknown method '{other}'"))),
    };
    let scheme = match s.raw("scheme").unwrap_or("centered") {
        "centered" => ConvectionScheme::Centered,
        "upwind" => ConvectionScheme::Upwind,
        other => return Err(CliError::Config(format!("[solver] scheme: unknown scheme '{other}'"))),
    };
    let newton = NewtonConfig {
        tol_abs: s.get_or("newton.tol", nd.tol_abs)?,
        max_iters: s.get_or("newton.max_iters", nd.max_iters)?,
        damping: s.get_or("newton.damping", nd.damping)?,
        min_step: s.get_or("newton.min_step", nd.min_step)?,
        linear,
        scheme,
    };
    let md = MarchConfig::<f64>::default();
    let march_keys = ["march.dt", "march.t_end", "march.stall_tol", "march.cfl_limit"];
    let march_on: bool = s.get_or("march", false)?;
    let march = if march_on {
        Some(MarchConfig {
            dt: s.get_or("march.dt", md.dt)?,
            t_end: s.get_or("march.t_end", md.t_end)?,
            stall_tol: s.get_or("march.stall_tol", md.stall_tol)?,
            cfl_limit: s.get_or("march.cfl_limit", md.cfl_limit)?,
            adapt_dt: true,
        })
    } else {
        for k in march_keys {
            if let Some(t) = s.raw(k) {
                let _: f64 = s.parse(k, t)?;
            }
        }
        None
    };
    let cd = ContinuationConfig::default();
    let continuation = ContinuationConfig {
        steps: s.get_or("continuation.steps", cd.steps)?,
        max_halvings: s.get_or("continuation.max_halvings", cd.max_halvings)?,
    };

    let o = sec("output");
    let od = OutputConfig::default();
    let output = OutputConfig {
        fields: o.raw("fields").map(str::to_string).unwrap_or(od.fields),
        precision: o.get_or("precision", od.precision)?,
        diagnostics: o.get_or("diagnostics", od.diagnostics)?,
    };

    let cfg = RunConfig {
        domain,
        nr,
        nz,
        nu,
        bottom,
        hopf_eps,
        profile,
        outer_swirl,
        solver: SolveConfig {
            newton,
            march,
            continuation,
        },
        output,
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Every key the parser accepts, as `section.key`.
pub fn known_keys() -> BTreeSet<String> {
    KEYS.iter()
        .flat_map(|(s, keys)| keys.iter().map(move |k| format!("{s}.{k}")))
        .collect()
}

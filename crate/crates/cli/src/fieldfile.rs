//! Text field files.
//!
//! ```text
//! # vortexfield v1
//! # nr=<int> nz=<int> sigma=<dec> R=<dec> L=<dec> nu=<dec>
//! r,z,u,v,w,p
//! <nr*nz rows, z-major, velocities interpolated to cell centers>
//! # staggered u
//! <nz lines of nr+1 face values>
//! # staggered w
//! <nz+1 lines of nr face values>
//! # metadata
//! key=value
//! # <any other section>
//! ```
//!
//! Sections after the rows may come in any order. Unknown sections are
//! kept verbatim so that a read-write cycle preserves them.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::Array2;
use vortex_core::grid::{build_grid, DomainSpec, StaggeredGrid};
use vortex_core::ops::FieldSet;

use crate::error::{CliError, Result};

pub const MAGIC: &str = "# vortexfield v1";
pub const COLUMNS: &str = "r,z,u,v,w,p";

#[derive(Clone, Debug, PartialEq)]
pub struct Section {
    pub name: String,
    pub lines: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldFile {
    pub grid: StaggeredGrid<f64>,
    pub nu: f64,
    pub fields: FieldSet<f64>,
    /// `key=value` pairs of the `metadata` section, in file order.
    pub metadata: Vec<(String, String)>,
    /// Sections this version does not interpret.
    pub extras: Vec<Section>,
}

impl FieldFile {
    pub fn new(grid: StaggeredGrid<f64>, nu: f64, fields: FieldSet<f64>) -> Self {
        Self {
            grid,
            nu,
            fields,
            metadata: Vec::new(),
            extras: Vec::new(),
        }
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Render with `digits` significant digits (17 is lossless).
    pub fn render(&self, digits: usize) -> Result<String> {
        self.fields.check_shape(&self.grid)?;
        let digits = digits.clamp(1, 17);
        let num = |x: f64| format!("{:.*e}", digits - 1, x);
        let g = &self.grid;
        let d = &g.domain;
        let mut s = String::new();
        let _ = writeln!(s, "{MAGIC}");
        let _ = writeln!(
            s,
            "# nr={} nz={} sigma={} R={} L={} nu={}",
            g.nr,
            g.nz,
            num(d.sigma),
            num(d.r_outer),
            num(d.height),
            num(self.nu)
        );
        let _ = writeln!(s, "{COLUMNS}");
        let uc = self.fields.u_centered();
        let wc = self.fields.w_centered();
        for j in 0..g.nz {
            for i in 0..g.nr {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    num(g.r_centers[i]),
                    num(g.z_centers[j]),
                    num(uc[[i, j]]),
                    num(self.fields.v[[i, j]]),
                    num(wc[[i, j]]),
                    num(self.fields.p[[i, j]])
                );
            }
        }
        let mut table = |name: &str, a: &Array2<f64>| {
            let _ = writeln!(s, "# {name}");
            for j in 0..a.ncols() {
                let row: Vec<String> = (0..a.nrows()).map(|i| num(a[[i, j]])).collect();
                let _ = writeln!(s, "{}", row.join(","));
            }
        };
        table("staggered u", &self.fields.u);
        table("staggered w", &self.fields.w);
        if !self.metadata.is_empty() {
            let _ = writeln!(s, "# metadata");
            for (k, v) in &self.metadata {
                let _ = writeln!(s, "{k}={v}");
            }
        }
        for sec in &self.extras {
            let _ = writeln!(s, "# {}", sec.name);
            for l in &sec.lines {
                let _ = writeln!(s, "{l}");
            }
        }
        Ok(s)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let magic = lines.next().ok_or_else(|| fmt("empty file"))?;
        if magic.trim() != MAGIC {
            return Err(match magic.strip_prefix("# vortexfield ") {
                Some(v) => fmt(format!("unsupported version '{}'", v.trim())),
                None => fmt("not a vortexfield file"),
            });
        }
        let header = lines.next().ok_or_else(|| fmt("truncated: missing header line"))?;
        let kv = parse_header(header)?;
        let get = |k: &str| kv.iter().find(|(a, _)| a == k).map(|(_, v)| v.as_str());
        let need = |k: &str| get(k).ok_or_else(|| fmt(format!("header lacks '{k}'")));
        let int = |k: &str| -> Result<usize> {
            need(k)?
                .parse()
                .map_err(|_| fmt(format!("header '{k}' is not an integer")))
        };
        let dec = |k: &str| -> Result<f64> {
            need(k)?
                .parse()
                .map_err(|_| fmt(format!("header '{k}' is not a number")))
        };
        let (nr, nz) = (int("nr")?, int("nz")?);
        let domain = DomainSpec::new(dec("sigma")?, dec("R")?, dec("L")?)?;
        let grid = build_grid(domain, nr, nz)?;
        let nu = dec("nu")?;
        let cols = lines.next().ok_or_else(|| fmt("truncated: missing column header"))?;
        if cols.trim() != COLUMNS {
            return Err(fmt(format!("unexpected column header '{cols}'")));
        }

        let mut rows = Vec::with_capacity(nr * nz);
        let mut rest: Vec<&str> = Vec::new();
        for line in lines.by_ref() {
            if line.starts_with('#') {
                rest.push(line);
                break;
            }
            if line.trim().is_empty() {
                continue;
            }
            rows.push(line);
        }
        rest.extend(lines);
        if rows.len() != nr * nz {
            let what = if rows.len() < nr * nz { "truncated" } else { "row count disagrees with header" };
            return Err(fmt(format!("{what}: expected {} rows, found {}", nr * nz, rows.len())));
        }
        let mut fields = FieldSet::zeros(&grid);
        for (k, row) in rows.iter().enumerate() {
            let vals = numbers(row, 6, k + 4)?;
            let (i, j) = (k % nr, k / nr);
            fields.v[[i, j]] = vals[3];
            fields.p[[i, j]] = vals[5];
        }

        let mut sections: Vec<Section> = Vec::new();
        for line in rest {
            if let Some(name) = line.strip_prefix('#') {
                sections.push(Section {
                    name: name.trim().to_string(),
                    lines: Vec::new(),
                });
            } else if let Some(sec) = sections.last_mut() {
                sec.lines.push(line.to_string());
            }
        }
        let mut have_u = false;
        let mut have_w = false;
        let mut metadata = Vec::new();
        let mut extras = Vec::new();
        for sec in sections {
            match sec.name.as_str() {
                "staggered u" => {
                    fields.u = table(&sec, nr + 1, nz)?;
                    have_u = true;
                }
                "staggered w" => {
                    fields.w = table(&sec, nr, nz + 1)?;
                    have_w = true;
                }
                "metadata" => {
                    for l in sec.lines.iter().filter(|l| !l.trim().is_empty()) {
                        let (k, v) = l
                            .split_once('=')
                            .ok_or_else(|| fmt(format!("metadata line without '=': '{l}'")))?;
                        metadata.push((k.to_string(), v.to_string()));
                    }
                }
                _ => extras.push(sec),
            }
        }
        if !have_u || !have_w {
            return Err(fmt("truncated: staggered appendix missing"));
        }
        Ok(Self {
            grid,
            nu,
            fields,
            metadata,
            extras,
        })
    }
}

fn fmt(msg: impl Into<String>) -> CliError {
    CliError::Format(msg.into())
}

fn parse_header(line: &str) -> Result<Vec<(String, String)>> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| fmt("header line must start with '#'"))?;
    body.split_whitespace()
        .map(|tok| {
            tok.split_once('=')
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .ok_or_else(|| fmt(format!("malformed header token '{tok}'")))
        })
        .collect()
}

fn numbers(line: &str, n: usize, lineno: usize) -> Result<Vec<f64>> {
    let vals: Vec<f64> = line
        .split(',')
        .map(|t| t.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| fmt(format!("line {lineno}: bad number in '{line}'")))?;
    if vals.len() != n {
        return Err(fmt(format!("line {lineno}: expected {n} values, found {}", vals.len())));
    }
    Ok(vals)
}

fn table(sec: &Section, rows: usize, cols: usize) -> Result<Array2<f64>> {
    let lines: Vec<&String> = sec.lines.iter().filter(|l| !l.trim().is_empty()).collect();
    if lines.len() != cols {
        return Err(fmt(format!(
            "section '{}': expected {cols} lines, found {}",
            sec.name,
            lines.len()
        )));
    }
    let mut a = Array2::zeros((rows, cols));
    for (j, l) in lines.iter().enumerate() {
        for (i, x) in numbers(l, rows, j)?.into_iter().enumerate() {
            a[[i, j]] = x;
        }
    }
    Ok(a)
}

pub fn write_fields(file: &FieldFile, digits: usize, path: &Path) -> Result<()> {
    std::fs::write(path, file.render(digits)?)?;
    Ok(())
}

pub fn read_fields(path: &Path) -> Result<FieldFile> {
    FieldFile::parse(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_file(nr: usize, nz: usize, seed: u64) -> FieldFile {
        let g = build_grid(DomainSpec::new(0.1, 2.1, 3.0).unwrap(), nr, nz).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = FieldSet::zeros(&g);
        for a in [&mut f.u, &mut f.v, &mut f.w, &mut f.p] {
            a.mapv_inplace(|_| rng.gen_range(-1e3..1e3) * 10f64.powi(rng.gen_range(-12..4)));
        }
        FieldFile::new(g, 0.02, f)
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let mut ff = random_file(5, 4, 1);
        ff.metadata.push(("profile".into(), "uniform".into()));
        let back = FieldFile::parse(&ff.render(17).unwrap()).unwrap();
        assert_eq!(back, ff);
    }

    #[test]
    fn header_layout() {
        let ff = random_file(3, 2, 2);
        let text = ff.render(17).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], MAGIC);
        assert!(lines[1].starts_with("# nr=3 nz=2 sigma=1.0000000000000001e-1 R="));
        assert!(lines[1].contains(" nu=2"));
        assert_eq!(lines[2], COLUMNS);
        assert_eq!(lines[3 + 6], "# staggered u");
        // z-major rows
        assert!(lines[3].starts_with(&format!("{:.16e},{:.16e}", ff.grid.r_centers[0], ff.grid.z_centers[0])));
        assert!(lines[4].starts_with(&format!("{:.16e},{:.16e}", ff.grid.r_centers[1], ff.grid.z_centers[0])));
    }

    #[test]
    fn unknown_sections_are_preserved() {
        let ff = random_file(3, 3, 3);
        let text = ff.render(17).unwrap() + "# future stuff\na=1\nsome,row\n";
        let back = FieldFile::parse(&text).unwrap();
        assert_eq!(back.extras.len(), 1);
        assert_eq!(back.extras[0].name, "future stuff");
        assert_eq!(back.extras[0].lines, vec!["a=1", "some,row"]);
        assert_eq!(back.fields, ff.fields);
        let again = FieldFile::parse(&back.render(17).unwrap()).unwrap();
        assert_eq!(again, back);
    }

    #[test]
    fn rejects_damaged_files() {
        let text = random_file(3, 3, 4).render(17).unwrap();
        let v2 = text.replacen("v1", "v2", 1);
        assert!(FieldFile::parse(&v2).unwrap_err().to_string().contains("version"));
        let lines: Vec<&str> = text.lines().collect();
        let cut = lines[..8].join("\n");
        assert!(FieldFile::parse(&cut).unwrap_err().to_string().contains("truncated"));
        let no_appendix = lines[..12].join("\n");
        assert!(FieldFile::parse(&no_appendix).unwrap_err().to_string().contains("truncated"));
        let bad_header = text.replacen("nz=3", "nz=2", 1);
        assert!(FieldFile::parse(&bad_header).unwrap_err().to_string().contains("disagrees"));
        assert!(FieldFile::parse("").is_err());
        assert!(FieldFile::parse("hello\n").is_err());
    }

    #[test]
    fn files_on_disk() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.csv");
        let ff = random_file(4, 6, 5);
        write_fields(&ff, 17, &p).unwrap();
        assert_eq!(read_fields(&p).unwrap(), ff);
        assert!(read_fields(&dir.path().join("missing")).is_err());
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(32))]
        #[test]
        fn round_trip_any_values(seed in 0u64..1000, nr in 2usize..6, nz in 2usize..6) {
            let ff = random_file(nr, nz, seed);
            let back = FieldFile::parse(&ff.render(17).unwrap()).unwrap();
            proptest::prop_assert_eq!(back, ff);
        }
    }
}

//! Config parsing and the on-disk result format.
//!
//! Configs are flat `key = value` text (lists comma separated, `#` starts a
//! comment) or JSON with the same keys. Tables are CSV with a header row and
//! 12 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fit::{default_power_window, fit_gaussian_decay, fit_power_law, FitResult};
use crate::lattice::InformationLattice;
use crate::partition::PartitionLabel;
use crate::protocols::{profile_points, QuenchConfig, RunResult};

const LIST_KEYS: [&str; 2] = ["times", "snapshot_times"];

fn scalar(key: &str, raw: &str) -> Result<Value> {
    if key == "protocol" {
        return Ok(Value::String(raw.to_string()));
    }
    if let Ok(i) = raw.parse::<i64>() {
        return Ok(Value::Number(i.into()));
    }
    raw.parse::<f64>()
        .ok()
        .and_then(Number::from_f64)
        .map(Value::Number)
        .ok_or_else(|| Error::Config(format!("{key}: cannot parse {raw:?} as a number")))
}

/// Parse `key = value` text.
pub fn parse_config_text(text: &str) -> Result<QuenchConfig> {
    let mut map = Map::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, raw) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let (key, raw) = (key.trim(), raw.trim());
        let value = if LIST_KEYS.contains(&key) {
            let items = raw
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| scalar(key, s))
                .collect::<Result<Vec<_>>>()?;
            Value::Array(items)
        } else {
            scalar(key, raw)?
        };
        if map.insert(key.to_string(), value).is_some() {
            return Err(Error::Config(format!("duplicate key {key}")));
        }
    }
    serde_json::from_value(Value::Object(map)).map_err(|e| Error::Config(e.to_string()))
}

pub fn parse_config_json(text: &str) -> Result<QuenchConfig> {
    serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
}

/// JSON if the text starts with `{`, key/value text otherwise.
pub fn parse_config(text: &str) -> Result<QuenchConfig> {
    if text.trim_start().starts_with('{') {
        parse_config_json(text)
    } else {
        parse_config_text(text)
    }
}

pub fn load_config(path: &Path) -> Result<QuenchConfig> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Key/value rendering that [`parse_config_text`] reads back to an equal
/// config. Floats use the shortest representation that round-trips.
pub fn config_to_text(config: &QuenchConfig) -> String {
    let value = serde_json::to_value(config).expect("config serializes");
    let mut out = String::new();
    if let Value::Object(map) = value {
        for (key, v) in map {
            let rendered = match v {
                Value::Array(items) => items.iter().map(render_scalar).collect::<Vec<_>>().join(", "),
                other => render_scalar(&other),
            };
            let _ = writeln!(out, "{key} = {rendered}");
        }
    }
    out
}

fn render_scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// 12 significant digits; negative zero is printed as zero.
pub fn fmt_num(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    format!("{v:.11e}")
}

/// Time as used in file names: `lattice_t80.csv`, `lattice_t0.5.csv`.
pub fn fmt_time_tag(t: f64) -> String {
    format!("{t}")
}

pub fn gamma_csv(result: &RunResult) -> String {
    let mut out = String::from("t,partition,bits\n");
    for (k, &t) in result.times.iter().enumerate() {
        for label in PartitionLabel::ALL {
            let _ = writeln!(out, "{},{},{}", fmt_num(t), label, fmt_num(result.gamma[&label][k]));
        }
    }
    out
}

pub fn occupation_csv(result: &RunResult) -> String {
    let mut out = String::from("t,site,density\n");
    for (&t, row) in result.times.iter().zip(&result.occupations) {
        for (site, n) in row.iter().enumerate() {
            let _ = writeln!(out, "{},{site},{}", fmt_num(t), fmt_num(*n));
        }
    }
    out
}

/// Two-column `t,bits` table.
pub fn series_csv(times: &[f64], values: &[f64]) -> String {
    let mut out = String::from("t,bits\n");
    for (t, v) in times.iter().zip(values) {
        let _ = writeln!(out, "{},{}", fmt_num(*t), fmt_num(*v));
    }
    out
}

pub fn lattice_csv(lattice: &InformationLattice) -> String {
    let mut out = String::from("ell,two_n,m,S_bits,i_bits\n");
    for (c, s, i) in lattice.iter() {
        let _ = writeln!(out, "{},{},{},{},{}", c.ell, c.two_n(), c.m, fmt_num(s), fmt_num(i));
    }
    out
}

pub fn delta_csv(lattice: &InformationLattice, delta: &[Vec<f64>]) -> String {
    let mut out = String::from("ell,two_n,m,delta_bits\n");
    for (c, _, _) in lattice.iter() {
        let _ = writeln!(out, "{},{},{},{}", c.ell, c.two_n(), c.m, fmt_num(delta[c.ell][c.m]));
    }
    out
}

/// Mean information per scale and the interface diagonal `i(ell, l_Q − 1)`
/// (empty where `ell > N − l_Q`).
pub fn profile_csv(lattice: &InformationLattice, l_q: usize) -> String {
    let n = lattice.n_sites();
    let mean = profile_points(lattice);
    let mut out = String::from("ell,mean_i_bits,interface_i_bits\n");
    for (ell, m) in mean {
        let ell = ell as usize;
        let iface = if ell <= n - l_q {
            fmt_num(lattice.local_info()[ell][l_q - 1])
        } else {
            String::new()
        };
        let _ = writeln!(out, "{ell},{},{iface}", fmt_num(m));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitsFile {
    pub fits: BTreeMap<String, FitResult>,
    #[serde(default)]
    pub fit_errors: BTreeMap<String, String>,
    #[serde(default)]
    pub asymptotes: BTreeMap<String, f64>,
}

pub fn fits_file(result: &RunResult) -> FitsFile {
    FitsFile {
        fits: result.fits.clone(),
        fit_errors: result.fit_errors.clone(),
        asymptotes: result
            .asymptotes()
            .into_iter()
            .map(|(l, v)| (l.to_string(), v))
            .collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub name: String,
    pub bytes: u64,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: Option<QuenchConfig>,
    /// The same config in key/value form.
    pub config_text: Option<String>,
    pub wall_time_s: f64,
    pub workers: usize,
    #[serde(default)]
    pub lattice_times_s: Vec<f64>,
    pub files: Vec<FileEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Collects output files and their checksums.
pub struct OutputDir {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn path(&self) -> &Path {
        &self.dir
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<()> {
        fs::write(self.dir.join(name), contents)?;
        self.files.push(FileEntry {
            name: name.to_string(),
            bytes: contents.len() as u64,
            sha256: sha256_hex(contents.as_bytes()),
        });
        Ok(())
    }

    pub fn files(&self) -> &[FileEntry] {
        &self.files
    }

    /// Write `manifest.json` listing every file written so far.
    pub fn finish(self, mut manifest: Manifest) -> Result<Manifest> {
        manifest.files = self.files;
        let text = serde_json::to_string_pretty(&manifest)?;
        fs::write(self.dir.join("manifest.json"), text + "\n")?;
        Ok(manifest)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Write every table of a run. With [`Format::Json`] the tables go into a
/// single `result.json` instead of CSV files.
pub fn write_run(out: &mut OutputDir, result: &RunResult, format: Format) -> Result<()> {
    let l_q = result.config.regions.l_q;
    match format {
        Format::Csv => {
            out.write("gamma.csv", &gamma_csv(result))?;
            out.write("occupation.csv", &occupation_csv(result))?;
            out.write("interface.csv", &series_csv(&result.times, &result.interface))?;
            out.write("diagonal.csv", &series_csv(&result.times, &result.diagonal))?;
            out.write("itop.csv", &series_csv(&result.times, &result.i_top))?;
            if let Some(base) = &result.baseline {
                out.write("lattice_baseline.csv", &lattice_csv(base))?;
            }
            for snap in &result.snapshots {
                let tag = fmt_time_tag(snap.t);
                out.write(&format!("lattice_t{tag}.csv"), &lattice_csv(&snap.lattice))?;
                out.write(&format!("delta_t{tag}.csv"), &delta_csv(&snap.lattice, &snap.delta))?;
                out.write(&format!("profile_t{tag}.csv"), &profile_csv(&snap.lattice, l_q))?;
            }
        }
        Format::Json => {
            let mut value = serde_json::to_value(result)?;
            if let Value::Object(map) = &mut value {
                map.remove("timings");
            }
            out.write("result.json", &(serde_json::to_string_pretty(&value)? + "\n"))?;
        }
    }
    out.write("fits.json", &(serde_json::to_string_pretty(&fits_file(result))? + "\n"))?;
    Ok(())
}


/// Rows of a CSV file with a header; returns `(header, rows)`.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Config(format!("{} is empty", path.display())))?
        .split(',')
        .map(str::to_string)
        .collect::<Vec<_>>();
    let rows = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>())
        .collect::<Vec<_>>();
    if let Some(bad) = rows.iter().position(|r| r.len() != header.len()) {
        return Err(Error::Config(format!("{}: row {} has the wrong width", path.display(), bad + 2)));
    }
    Ok((header, rows))
}

fn column(header: &[String], name: &str, path: &Path) -> Result<usize> {
    header
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Config(format!("{}: missing column {name}", path.display())))
}

fn parse_f64(s: &str, path: &Path) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Config(format!("{}: bad number {s:?}", path.display())))
}

/// `(t, bits)` pairs from a two-column series file.
pub fn read_series(path: &Path) -> Result<Vec<(f64, f64)>> {
    let (header, rows) = read_csv(path)?;
    let (ct, cb) = (column(&header, "t", path)?, column(&header, "bits", path)?);
    rows.iter()
        .map(|r| Ok((parse_f64(&r[ct], path)?, parse_f64(&r[cb], path)?)))
        .collect()
}

/// `(ell, interface_i_bits)` from a profile file, skipping blank cells.
pub fn read_interface_profile(path: &Path) -> Result<Vec<(f64, f64)>> {
    let (header, rows) = read_csv(path)?;
    let (ce, ci) = (column(&header, "ell", path)?, column(&header, "interface_i_bits", path)?);
    rows.iter()
        .filter(|r| !r[ci].is_empty())
        .map(|r| Ok((parse_f64(&r[ce], path)?, parse_f64(&r[ci], path)?)))
        .collect()
}

/// Re-fit from the tables of an output directory: the decay of `itop.csv`
/// and the power law of the latest `profile_t*.csv`.
pub fn refit(
    dir: &Path,
    decay_window: Option<(f64, f64)>,
    power_window: Option<(f64, f64)>,
) -> Result<FitsFile> {
    let mut fits = BTreeMap::new();
    let mut fit_errors = BTreeMap::new();
    let mut record = |name: &str, fit: Result<FitResult>| match fit {
        Ok(f) => {
            fits.insert(name.to_string(), f);
        }
        Err(e) => {
            fit_errors.insert(name.to_string(), e.to_string());
        }
    };
    let itop = dir.join("itop.csv");
    if itop.exists() {
        record("i_top_decay", fit_gaussian_decay(&read_series(&itop)?, decay_window));
    }
    let mut profiles: Vec<(f64, PathBuf)> = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if let Some(tag) = name.strip_prefix("profile_t").and_then(|s| s.strip_suffix(".csv")) {
            if let Ok(t) = tag.parse::<f64>() {
                profiles.push((t, path));
            }
        }
    }
    profiles.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some((_, path)) = profiles.last() {
        let profile = read_interface_profile(path)?;
        let window = power_window.unwrap_or_else(|| default_power_window(profile.len()));
        record("interface_profile", fit_power_law(&profile, window));
    }
    if fits.is_empty() && fit_errors.is_empty() {
        return Err(Error::Config(format!("no fittable tables in {}", dir.display())));
    }
    Ok(FitsFile {
        fits,
        fit_errors,
        asymptotes: BTreeMap::new(),
    })
}

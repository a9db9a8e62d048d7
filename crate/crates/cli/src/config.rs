//! Scenario files: `[section]` headers with `key = value` lines.

use std::fs;
use std::path::{Path, PathBuf};

use collective_mode::{build_chain_model, build_general_model, Boundary, SystemModel};
use nalgebra::DMatrix;
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelSection,
    #[serde(default)]
    pub dynamics: DynamicsSection,
    #[serde(default)]
    pub spectra: SpectraSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[default]
    NextNeighbor,
    General,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryKind {
    #[default]
    Free,
    Periodic,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    #[serde(default)]
    pub kind: ModelKind,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[serde(default = "one")]
    pub mass: f64,
    #[serde(default = "one")]
    pub hbar: f64,
    #[serde(default = "one")]
    pub omega0: f64,
    pub alpha: Option<f64>,
    /// Uniform part added to every entry of K.
    #[serde(default)]
    pub kappa: f64,
    #[serde(default)]
    pub boundary: BoundaryKind,
    pub w_file: Option<PathBuf>,
    pub k_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DynamicsSection {
    #[serde(rename = "P0", default = "one")]
    pub p0: f64,
    pub t_max: Option<f64>,
    pub steps: Option<usize>,
}

impl Default for DynamicsSection {
    fn default() -> Self {
        DynamicsSection { p0: 1.0, t_max: None, steps: None }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectraSection {
    pub epsilon: Option<f64>,
    pub omega_max: Option<f64>,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default = "default_powers")]
    pub powers: Vec<usize>,
}

impl Default for SpectraSection {
    fn default() -> Self {
        SpectraSection { epsilon: None, omega_max: None, points: default_points(), powers: default_powers() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub directory: Option<PathBuf>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection { directory: None, formats: default_formats() }
    }
}

fn one() -> f64 {
    1.0
}

fn default_points() -> usize {
    2001
}

fn default_powers() -> Vec<usize> {
    vec![2]
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv]
}

/// A parsed scenario plus the directory its relative paths resolve against.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub base_dir: PathBuf,
}

fn field(name: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{name}: {reason}"))
}

fn check_positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(field(name, format!("must be positive and finite, got {v}")))
    }
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let config: ScenarioConfig =
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let scenario = Scenario { config, base_dir };
        scenario.validate()?;
        Ok(scenario)
    }

    fn validate(&self) -> Result<(), CliError> {
        let c = &self.config;
        let m = &c.model;
        check_positive("model.mass", m.mass)?;
        check_positive("model.hbar", m.hbar)?;
        check_positive("model.omega0", m.omega0)?;
        if !(m.kappa >= 0.0 && m.kappa.is_finite()) {
            return Err(field("model.kappa", format!("must be nonnegative, got {}", m.kappa)));
        }
        match m.kind {
            ModelKind::NextNeighbor => {
                let n = m.n.ok_or_else(|| field("model.N", "required when kind = \"next_neighbor\""))?;
                if n < 2 {
                    return Err(field("model.N", format!("needs at least 2 particles per chain, got {n}")));
                }
                let alpha = m.alpha.ok_or_else(|| field("model.alpha", "required when kind = \"next_neighbor\""))?;
                if !(alpha >= 0.0 && alpha.is_finite()) {
                    return Err(field("model.alpha", format!("must be nonnegative, got {alpha}")));
                }
            }
            ModelKind::General => {
                for (name, file) in [("model.w_file", &m.w_file), ("model.k_file", &m.k_file)] {
                    let file = file.as_ref().ok_or_else(|| field(name, "required when kind = \"general\""))?;
                    let p = self.base_dir.join(file);
                    if !p.is_file() {
                        return Err(field(name, format!("{} does not exist", p.display())));
                    }
                }
            }
        }
        if !c.dynamics.p0.is_finite() || c.dynamics.p0 == 0.0 {
            return Err(field("dynamics.P0", format!("must be finite and nonzero, got {}", c.dynamics.p0)));
        }
        if let Some(t) = c.dynamics.t_max {
            check_positive("dynamics.t_max", t)?;
        }
        if c.dynamics.steps == Some(0) {
            return Err(field("dynamics.steps", "must be at least 1"));
        }
        if let Some(e) = c.spectra.epsilon {
            check_positive("spectra.epsilon", e)?;
        }
        if let Some(w) = c.spectra.omega_max {
            check_positive("spectra.omega_max", w)?;
        }
        if c.spectra.points < 2 {
            return Err(field("spectra.points", format!("must be at least 2, got {}", c.spectra.points)));
        }
        if let Some(&p) = c.spectra.powers.iter().find(|&&p| p == 0 || p > 8) {
            return Err(field("spectra.powers", format!("each power must lie in 1..=8, got {p}")));
        }
        if c.output.formats.is_empty() {
            return Err(field("output.formats", "must list at least one of \"csv\", \"json\""));
        }
        Ok(())
    }

    pub fn output_dir(&self, overridden: Option<&Path>) -> PathBuf {
        match overridden {
            Some(dir) => dir.to_path_buf(),
            None => self.base_dir.join(self.config.output.directory.clone().unwrap_or_else(|| "output".into())),
        }
    }

    /// Model errors are reported as configuration errors: they mean the file
    /// describes something the library refuses to build.
    pub fn build_model(&self) -> Result<SystemModel, CliError> {
        let m = &self.config.model;
        let built = match m.kind {
            ModelKind::NextNeighbor => {
                let boundary = match m.boundary {
                    BoundaryKind::Free => Boundary::Free,
                    BoundaryKind::Periodic => Boundary::Periodic,
                };
                build_chain_model(m.n.unwrap_or(0), m.mass, m.omega0, m.alpha.unwrap_or(0.0), boundary)
                    .and_then(|model| model.with_hbar(m.hbar))
            }
            ModelKind::General => {
                let w = read_matrix(&self.base_dir.join(m.w_file.as_ref().expect("validated")), "model.w_file")?;
                let k = read_matrix(&self.base_dir.join(m.k_file.as_ref().expect("validated")), "model.k_file")?;
                if let Some(n) = m.n {
                    if n != w.nrows() {
                        return Err(field(
                            "model.N",
                            format!("is {n} but model.w_file is {}x{}", w.nrows(), w.ncols()),
                        ));
                    }
                }
                build_general_model(w, k, m.mass, m.hbar)
            }
        };
        let model = built.map_err(|e| CliError::Config(format!("model: {e}")))?;
        if m.kappa > 0.0 {
            model.with_uniform_coupling(m.kappa).map_err(|e| CliError::Config(format!("model.kappa: {e}")))
        } else {
            Ok(model)
        }
    }

    /// Next-neighbor free chain coupled only at its first site.
    pub fn is_point_coupled_chain(&self) -> bool {
        let m = &self.config.model;
        m.kind == ModelKind::NextNeighbor && m.boundary == BoundaryKind::Free && m.kappa == 0.0
    }
}

/// Square matrix from a text file: one row per line, entries separated by
/// commas or whitespace, `#` starts a comment.
pub fn read_matrix(path: &Path, name: &str) -> Result<DMatrix<f64>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| field(name, format!("cannot read {}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let row = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<f64>().map_err(|e| field(name, format!("line {}: {s:?}: {e}", lineno + 1))))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let n = rows.len();
    if n == 0 {
        return Err(field(name, "no matrix rows"));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(field(name, format!("row {} has {} entries, expected {n}", i + 1, r.len())));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

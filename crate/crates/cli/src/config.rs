//! Run configuration, read from TOML.
//!
//! ```toml
//! statistics = "mb"
//!
//! [initial]
//! family = "gamma_shell"
//! amplitude = 1.0
//! power = 1.0
//! rate = 1.3333333333333333
//!
//! [grid]
//! rule = "exponential"
//! n_nodes = 64
//!
//! [solver]
//! stepper = "exact"
//! dt = 0.01
//! t_end = 10.0
//! ```

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use flrw_bgk::dynamics::{SolverConfig, Stepper};
use flrw_bgk::initial::{global_moments, Profile};
use flrw_bgk::{DistributionState, RadialGrid, RuleKind, SeriesTolerance, Statistics};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Serde adapter for the core enums, which parse from and print to their
/// short names.
mod via_str {
    use super::*;
    use serde::{de, Deserializer, Serializer};

    pub fn serialize<T: Display, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(value)
    }

    pub fn deserialize<'de, T, D>(d: D) -> Result<T, D::Error>
    where
        T: FromStr,
        T::Err: Display,
        D: Deserializer<'de>,
    {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(with = "via_str")]
    pub statistics: Statistics,
    pub initial: InitialSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub solver: SolverSpec,
    #[serde(default)]
    pub tolerances: ToleranceSpec,
    #[serde(default)]
    pub output: OutputSpec,
}

/// Initial data. `gamma_shell` and `perturbed` are rescaled to carry the
/// grid moments of `J⁰`; the other families are used as given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    Juttner {
        rho: f64,
        temperature: f64,
    },
    GammaShell {
        amplitude: f64,
        power: f64,
        rate: f64,
    },
    BeJuttner {
        c: f64,
        gamma: f64,
    },
    Perturbed {
        epsilon: f64,
        center: f64,
        width: f64,
    },
    /// CSV with columns `r,f` sampled at the grid nodes, in order. A relative
    /// path is resolved against the directory of the config file.
    Table {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(with = "via_str")]
    pub rule: RuleKind,
    pub n_nodes: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            rule: RuleKind::Exponential,
            n_nodes: 64,
            r_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(with = "via_str")]
    pub stepper: Stepper,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default = "one")]
    pub save_every: usize,
}

fn one() -> usize {
    1
}

impl Default for SolverSpec {
    fn default() -> Self {
        let d = SolverConfig::default();
        SolverSpec {
            stepper: d.stepper,
            dt: d.dt,
            t_end: d.t_end,
            save_every: d.save_every,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSpec {
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl Default for ToleranceSpec {
    fn default() -> Self {
        let d = SeriesTolerance::default();
        ToleranceSpec {
            abs_tol: d.abs_tol(),
            max_terms: d.max_terms(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Run directory below the output root; defaults to the config file stem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dir: Option<String>,
}

/// A parsed config together with the file it came from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub source: PathBuf,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let config = RunConfig::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })?;
        Ok(LoadedConfig {
            config,
            source: path.to_path_buf(),
        })
    }

    pub fn run_name(&self) -> String {
        match &self.config.output.dir {
            Some(dir) => dir.clone(),
            None => self
                .source
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "run".into()),
        }
    }

    fn base_dir(&self) -> &Path {
        self.source.parent().unwrap_or_else(|| Path::new("."))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: RunConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.check()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serialises to TOML")
    }

    /// Range checks that do not need the file system.
    pub fn check(&self) -> Result<(), CliError> {
        self.grid()?;
        self.solver_config()?.validate().map_err(config_error)?;
        if let Some(dir) = &self.output.dir {
            let p = Path::new(dir);
            if dir.is_empty() || p.is_absolute() || p.components().any(|c| c.as_os_str() == "..") {
                return Err(CliError::Config(format!(
                    "output.dir must be a relative path inside the output root, got `{dir}`"
                )));
            }
        }
        if let Some(profile) = self.profile() {
            profile.validate().map_err(config_error)?;
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Arc<RadialGrid>, CliError> {
        RadialGrid::new(self.grid.rule, self.grid.n_nodes, self.grid.r_max)
            .map(Arc::new)
            .map_err(config_error)
    }

    pub fn tolerance(&self) -> Result<SeriesTolerance, CliError> {
        SeriesTolerance::new(self.tolerances.abs_tol, self.tolerances.max_terms)
            .map_err(config_error)
    }

    pub fn solver_config(&self) -> Result<SolverConfig, CliError> {
        Ok(SolverConfig {
            dt: self.solver.dt,
            t_end: self.solver.t_end,
            stepper: self.solver.stepper,
            statistics: self.statistics,
            tolerance: self.tolerance()?,
            save_every: self.solver.save_every,
        })
    }

    /// The built-in profile, or `None` for a table.
    pub fn profile(&self) -> Option<Profile> {
        Some(match self.initial {
            InitialSpec::Juttner { rho, temperature } => Profile::Juttner { rho, temperature },
            InitialSpec::GammaShell {
                amplitude,
                power,
                rate,
            } => Profile::GammaShell {
                amplitude,
                power,
                rate,
            },
            InitialSpec::BeJuttner { c, gamma } => Profile::BoseJuttner { c, gamma },
            InitialSpec::Perturbed {
                epsilon,
                center,
                width,
            } => Profile::Perturbed {
                statistics: self.statistics,
                epsilon,
                center,
                width,
            },
            InitialSpec::Table { .. } => return None,
        })
    }
}

fn config_error(e: flrw_bgk::Error) -> CliError {
    CliError::Config(e.to_string())
}

/// Builds `F₀` on the configured grid.
pub fn initial_state(
    loaded: &LoadedConfig,
    grid: &Arc<RadialGrid>,
) -> Result<DistributionState, CliError> {
    let cfg = &loaded.config;
    match (&cfg.initial, cfg.profile()) {
        (InitialSpec::Table { path }, _) => read_table(&loaded.base_dir().join(path), grid),
        (InitialSpec::GammaShell { .. } | InitialSpec::Perturbed { .. }, Some(profile)) => {
            let target = global_moments(grid, cfg.statistics).map_err(CliError::Math)?;
            profile.matched(grid, target).map_err(CliError::Math)
        }
        (_, Some(profile)) => profile.sample(grid).map_err(config_error),
        (_, None) => unreachable!("only tables lack a profile"),
    }
}

/// Reads `r,f` rows; the `r` column must reproduce the grid nodes.
pub fn read_table(path: &Path, grid: &Arc<RadialGrid>) -> Result<DistributionState, CliError> {
    let bad = |msg: String| CliError::Config(format!("{}: {msg}", path.display()));
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.len() != 2 || &headers[0] != "r" || &headers[1] != "f" {
        return Err(bad(format!(
            "expected header `r,f`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut values = Vec::with_capacity(grid.len());
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| bad(e.to_string()))?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| bad(format!("row {}: {e}", i + 1)))
        };
        let (r, f) = (parse(&row[0])?, parse(&row[1])?);
        let node = *grid
            .nodes()
            .get(i)
            .ok_or_else(|| bad(format!("more rows than the {} grid nodes", grid.len())))?;
        if (r - node).abs() > 1e-12 * node.max(1.0) {
            return Err(bad(format!(
                "row {}: r = {r} does not match grid node {node}",
                i + 1
            )));
        }
        values.push(f);
    }
    if values.len() != grid.len() {
        return Err(bad(format!(
            "{} rows for {} grid nodes",
            values.len(),
            grid.len()
        )));
    }
    DistributionState::new(grid.clone(), values, 0.0).map_err(|e| bad(e.to_string()))
}

use std::f64::consts::{PI, TAU};
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    /// Four-level Γ-matrix model in a rotating field.
    Gamma,
    /// Two-level spin in a rotating field.
    Spin,
    /// Sampled Hamiltonian read from a text file.
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "lowercase")]
pub enum FrameChoice {
    /// Model frames when available, numerical ones otherwise.
    #[default]
    Auto,
    /// Always diagonalize numerically.
    Numeric,
}

/// Parameters of one run. Built-in models take `b`, `theta`, `w` and
/// `periods` and derive `v = w / (2π periods)`; file models take `v`
/// directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelKind,
    pub hamiltonian: Option<PathBuf>,
    pub b: f64,
    pub theta: f64,
    pub w: f64,
    pub periods: f64,
    pub v: Option<f64>,
    pub nodes: usize,
    pub order: usize,
    pub degeneracy_tol: f64,
    pub gap_floor_rel: f64,
    pub threshold: f64,
    pub frames: FrameChoice,
    /// Largest `‖H‖ δs / v` per RK4 substep of the reference propagator.
    pub max_phase_step: f64,
    /// Sweep values: `w` for built-in models, `v` for file models.
    pub sweep: Vec<f64>,
    /// Worker threads for sweeps, 0 for one per core.
    pub threads: usize,
    pub out_dir: PathBuf,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: ModelKind::Gamma,
            hamiltonian: None,
            b: 1.0,
            theta: PI / 3.0,
            w: 0.01,
            periods: 1.0,
            v: None,
            nodes: 2001,
            order: 1,
            degeneracy_tol: dapt_core::spectral::DEFAULT_DEGENERACY_TOL,
            gap_floor_rel: dapt_core::couplings::DEFAULT_GAP_FLOOR_REL,
            threshold: dapt_core::dapt::DEFAULT_VALIDITY_THRESHOLD,
            frames: FrameChoice::Auto,
            max_phase_step: 5e-3,
            sweep: vec![1e-3, 3e-3, 1e-2, 3e-2, 1e-1],
            threads: 0,
            out_dir: PathBuf::from("."),
            csv: None,
            json: None,
        }
    }
}

fn positive(name: &str, x: f64) -> CliResult<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} must be positive and finite, got {x}")))
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.nodes < 3 {
            return Err(CliError::Config(format!("nodes must be at least 3, got {}", self.nodes)));
        }
        if self.order > 2 {
            return Err(CliError::Config(format!("order must be 0, 1 or 2, got {}", self.order)));
        }
        positive("degeneracy_tol", self.degeneracy_tol)?;
        positive("gap_floor_rel", self.gap_floor_rel)?;
        positive("threshold", self.threshold)?;
        positive("max_phase_step", self.max_phase_step)?;
        match self.model {
            ModelKind::File => {
                if self.hamiltonian.is_none() {
                    return Err(CliError::Config("model `file` needs a hamiltonian path".into()));
                }
                positive("v", self.v.ok_or_else(|| CliError::Config("model `file` needs v".into()))?)?;
            }
            ModelKind::Gamma | ModelKind::Spin => {
                if self.v.is_some() {
                    return Err(CliError::Config(
                        "v is derived from w and periods for built-in models; set w instead".into(),
                    ));
                }
                positive("b", self.b)?;
                positive("w", self.w)?;
                positive("periods", self.periods)?;
                if !(0.0..=PI).contains(&self.theta) {
                    return Err(CliError::Config(format!("theta must lie in [0, π], got {}", self.theta)));
                }
            }
        }
        if let Some(bad) = self.sweep.iter().find(|x| !(**x > 0.0 && x.is_finite())) {
            return Err(CliError::Config(format!("sweep values must be positive, got {bad}")));
        }
        Ok(())
    }

    /// Adiabatic parameter of this configuration.
    pub fn v(&self) -> f64 {
        match self.model {
            ModelKind::File => self.v.unwrap_or(f64::NAN),
            ModelKind::Gamma | ModelKind::Spin => self.w / (TAU * self.periods),
        }
    }

    /// The same configuration at one sweep value.
    pub fn at_rate(&self, x: f64) -> Self {
        let mut c = self.clone();
        match self.model {
            ModelKind::File => c.v = Some(x),
            ModelKind::Gamma | ModelKind::Spin => c.w = x,
        }
        c
    }

    pub fn csv_path(&self, command: &str) -> PathBuf {
        self.csv
            .clone()
            .unwrap_or_else(|| self.out_dir.join(format!("{command}.csv")))
    }

    pub fn json_path(&self, command: &str) -> PathBuf {
        self.json
            .clone()
            .unwrap_or_else(|| self.out_dir.join(format!("{command}.json")))
    }
}

/// Command-line overrides; every field left unset keeps the value from the
/// config file (or the default).
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// JSON file with `RunConfig` fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub model: Option<ModelKind>,
    /// Sampled Hamiltonian file (implies `--model file`).
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub w: Option<f64>,
    #[arg(long)]
    pub periods: Option<f64>,
    #[arg(long)]
    pub v: Option<f64>,
    /// Grid size N.
    #[arg(long, short = 'n')]
    pub nodes: Option<usize>,
    /// Perturbative order cap P.
    #[arg(long, short = 'p')]
    pub order: Option<usize>,
    #[arg(long)]
    pub degeneracy_tol: Option<f64>,
    #[arg(long)]
    pub gap_floor_rel: Option<f64>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long, value_enum)]
    pub frames: Option<FrameChoice>,
    #[arg(long)]
    pub max_phase_step: Option<f64>,
    /// Comma-separated sweep values.
    #[arg(long, value_delimiter = ',')]
    pub sweep: Option<Vec<f64>>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
}

impl ConfigArgs {
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let mut c = match &self.config {
            Some(path) => RunConfig::from_json_file(path)?,
            None => RunConfig::default(),
        };
        macro_rules! set {
            ($($field:ident),*) => {
                $(if let Some(x) = &self.$field { c.$field = x.clone(); })*
            };
        }
        set!(model, b, theta, w, periods, nodes, order, degeneracy_tol, gap_floor_rel, threshold, frames);
        set!(max_phase_step, sweep, threads, out_dir);
        if self.hamiltonian.is_some() {
            c.hamiltonian = self.hamiltonian.clone();
            if self.model.is_none() {
                c.model = ModelKind::File;
            }
        }
        if self.v.is_some() {
            c.v = self.v;
        }
        if self.csv.is_some() {
            c.csv = self.csv.clone();
        }
        if self.json.is_some() {
            c.json = self.json.clone();
        }
        c.validate()?;
        Ok(c)
    }
}

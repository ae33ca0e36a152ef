//! Run configuration: a JSON manifest plus command-line overrides.
//!
//! ```json
//! {
//!   "model":  { "kind": "bergomi", "sigma0": 0.3, "v": 0.5, "hurst": 0.4, "rho": -0.3 },
//!   "option": { "spot": 100, "maturity": 0.001, "rate_r": 2.5 },
//!   "sim":    { "n_paths": 200000, "n_steps": 50, "seed": 7, "antithetic": true },
//!   "output_format": "json"
//! }
//! ```
//!
//! Every field is optional. Parameters that do not apply to the chosen model
//! are ignored. Flags win over the file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use invvol_core::mc::{
    OptionKind, OptionSpec, SimConfig, DEFAULT_PATHS, DEFAULT_SEED, DEFAULT_STEPS,
};
use invvol_core::vol_models::ModelParams;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Sabr,
    Bergomi,
    Constvol,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSettings {
    pub kind: ModelKind,
    pub sigma0: f64,
    pub alpha: f64,
    pub rho: f64,
    pub v: f64,
    pub hurst: f64,
}

impl Default for ModelSettings {
    fn default() -> Self {
        Self {
            kind: ModelKind::Sabr,
            sigma0: 0.3,
            alpha: 0.3,
            rho: -0.3,
            v: 0.5,
            hurst: 0.4,
        }
    }
}

impl ModelSettings {
    pub fn params(&self) -> ModelParams {
        match self.kind {
            ModelKind::Constvol => ModelParams::ConstVol {
                sigma0: self.sigma0,
            },
            ModelKind::Sabr => ModelParams::Sabr {
                sigma0: self.sigma0,
                alpha: self.alpha,
                rho: self.rho,
            },
            ModelKind::Bergomi => ModelParams::Bergomi {
                sigma0: self.sigma0,
                v: self.v,
                hurst: self.hurst,
                rho: self.rho,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptionSettings {
    pub spot: f64,
    /// Defaults to the spot (at the money).
    pub strike: Option<f64>,
    pub maturity: f64,
    /// Quanto conversion rate; absent for a plain inverse option.
    pub rate_r: Option<f64>,
}

impl Default for OptionSettings {
    fn default() -> Self {
        Self {
            spot: 100.0,
            strike: None,
            maturity: 0.001,
            rate_r: None,
        }
    }
}

impl OptionSettings {
    pub fn spec(&self) -> OptionSpec {
        let kind = match self.rate_r {
            Some(rate) => OptionKind::QuantoInverse { rate },
            None => OptionKind::Inverse,
        };
        OptionSpec {
            spot: self.spot,
            strike: self.strike.unwrap_or(self.spot),
            maturity: self.maturity,
            kind,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSettings {
    pub n_paths: usize,
    pub n_steps: usize,
    pub seed: u64,
    pub antithetic: bool,
}

impl Default for SimSettings {
    fn default() -> Self {
        Self {
            n_paths: DEFAULT_PATHS,
            n_steps: DEFAULT_STEPS,
            seed: DEFAULT_SEED,
            antithetic: true,
        }
    }
}

impl From<&SimSettings> for SimConfig {
    fn from(s: &SimSettings) -> Self {
        SimConfig {
            n_paths: s.n_paths,
            n_steps: s.n_steps,
            seed: s.seed,
            antithetic: s.antithetic,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSettings,
    pub option: OptionSettings,
    pub sim: SimSettings,
    pub output_format: Option<OutputFormat>,
}

/// Validated inputs ready for the core routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub model: ModelParams,
    pub option: OptionSpec,
    pub sim: SimConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides) {
        let m = &mut self.model;
        if let Some(k) = o.model {
            m.kind = k;
        }
        set(&mut m.sigma0, o.sigma0);
        set(&mut m.alpha, o.alpha);
        set(&mut m.rho, o.rho);
        set(&mut m.v, o.v);
        set(&mut m.hurst, o.hurst);
        set(&mut self.option.spot, o.spot);
        set(&mut self.option.maturity, o.maturity);
        if o.strike.is_some() {
            self.option.strike = o.strike;
        }
        if o.rate_r.is_some() {
            self.option.rate_r = o.rate_r;
        }
        set(&mut self.sim.n_paths, o.paths);
        set(&mut self.sim.n_steps, o.steps);
        set(&mut self.sim.seed, o.seed);
        if o.format.is_some() {
            self.output_format = o.format;
        }
    }

    pub fn resolve(&self) -> Result<Resolved> {
        let model = self.model.params();
        model.validate()?;
        let option = self.option.spec();
        option.validate()?;
        let sim = SimConfig::from(&self.sim);
        sim.validate()?;
        Ok(Resolved { model, option, sim })
    }
}

fn set<T: Copy>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Simulated trajectories, antithetic mirrors included.
    #[arg(long, global = true)]
    pub paths: Option<usize>,
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub model: Option<ModelKind>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub sigma0: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub rho: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub v: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub hurst: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub spot: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub strike: Option<f64>,
    /// Years to expiry.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub maturity: Option<f64>,
    /// Quanto conversion rate R.
    #[arg(long = "rate-R", global = true, allow_negative_numbers = true)]
    pub rate_r: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

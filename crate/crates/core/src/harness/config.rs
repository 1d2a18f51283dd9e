//! Experiment configuration file.
//!
//! The file is TOML. Every key is optional except `sweep_axis`,
//! `sweep_values` and `trials`; omitted keys take the defaults shown here.
//!
//! ```toml
//! sweep_axis = "snr_db"            # snr_db | antennas | elements | impairment_level
//! sweep_values = [-10, -5, 0, 5, 10, 15, 20, 25]
//! trials = 100
//! methods = ["proposed", "pga", "random", "upper_bound"]
//! base_seed = 0
//! random_restarts = 1
//! output_path = "results.csv"      # summary; records and config sidecars sit next to it
//! output_format = "csv"            # csv | json
//! record_wall_time = true          # false writes 0 so reruns are byte-identical
//!
//! [channel]                        # antennas, elements, Rician factors, large-scale gains
//! m = 10
//! n = 36
//! rician_factor_direct = 1.0
//! largescale_direct = 1.0          # likewise *_bs_ris and *_ris_user
//!
//! [impairments]
//! rho_b = 0.0025
//! rho_u = 0.0025
//! snr_db = 10.0                    # 1/σ² in dB when the sweep is not over SNR
//!
//! [phase_model]
//! alpha_min = 0.2
//! phi = 1.3508848410436116         # 0.43π
//! gamma = 1.6
//!
//! [solver]                         # see SolverConfig
//! [pga]                            # see PgaConfig
//! ```
//!
//! `channel.seed` is ignored: each (sweep value, trial) cell derives its own
//! seed from `base_seed`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::baselines::PgaConfig;
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::hardware::PhaseModelParams;
use crate::metrics::ImpairmentParams;
use crate::optimizer::SolverConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    SnrDb,
    Antennas,
    Elements,
    /// `ρ_b = ρ_u = value²`.
    ImpairmentLevel,
}

impl SweepAxis {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepAxis::SnrDb => "snr_db",
            SweepAxis::Antennas => "antennas",
            SweepAxis::Elements => "elements",
            SweepAxis::ImpairmentLevel => "impairment_level",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Proposed,
    Pga,
    Random,
    UpperBound,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Proposed, Method::Pga, Method::Random, Method::UpperBound];

    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::Pga => "pga",
            Method::Random => "random",
            Method::UpperBound => "upper_bound",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

/// Impairment template; `snr_db` is overridden by an SNR sweep and the two
/// coefficients by an impairment-level sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImpairmentSettings {
    pub rho_b: f64,
    pub rho_u: f64,
    pub snr_db: f64,
}

impl Default for ImpairmentSettings {
    fn default() -> Self {
        Self {
            rho_b: 0.0025,
            rho_u: 0.0025,
            snr_db: 10.0,
        }
    }
}

impl ImpairmentSettings {
    pub fn resolve(&self) -> Result<ImpairmentParams<f64>> {
        ImpairmentParams::from_snr_db(self.rho_b, self.rho_u, self.snr_db)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sweep_axis: SweepAxis,
    pub sweep_values: Vec<f64>,
    pub trials: usize,
    pub methods: Vec<Method>,
    pub base_seed: u64,
    pub random_restarts: usize,
    pub output_path: PathBuf,
    pub output_format: OutputFormat,
    pub record_wall_time: bool,
    pub channel: ChannelParams,
    pub impairments: ImpairmentSettings,
    pub phase_model: PhaseModelParams<f64>,
    pub solver: SolverConfig,
    pub pga: PgaConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sweep_axis: SweepAxis::SnrDb,
            sweep_values: vec![-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0, 25.0],
            trials: 100,
            methods: Method::ALL.to_vec(),
            base_seed: 0,
            random_restarts: 1,
            output_path: PathBuf::from("results.csv"),
            output_format: OutputFormat::Csv,
            record_wall_time: true,
            channel: ChannelParams::default(),
            impairments: ImpairmentSettings::default(),
            phase_model: PhaseModelParams::default(),
            solver: SolverConfig::default(),
            pga: PgaConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        Self::parse(text, Path::new("<inline>"))
    }

    fn parse(text: &str, path: &Path) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Parse {
            path: self.output_path.clone(),
            message: e.to_string(),
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::validation("trials", "must be at least 1"));
        }
        if self.sweep_values.is_empty() {
            return Err(Error::validation("sweep_values", "must not be empty"));
        }
        if self.sweep_values.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("sweep_values", "must be finite"));
        }
        if self.sweep_values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::validation("sweep_values", "must be strictly increasing"));
        }
        match self.sweep_axis {
            SweepAxis::Antennas | SweepAxis::Elements => {
                if self.sweep_values.iter().any(|&v| v < 1.0 || v.fract() != 0.0) {
                    return Err(Error::validation(
                        "sweep_values",
                        format!("{} sweep needs positive whole numbers", self.sweep_axis.as_str()),
                    ));
                }
            }
            SweepAxis::ImpairmentLevel => {
                if self.sweep_values.iter().any(|&v| v < 0.0) {
                    return Err(Error::validation("sweep_values", "impairment levels must be nonnegative"));
                }
            }
            SweepAxis::SnrDb => {}
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return Err(Error::validation("methods", "contains duplicates"));
        }
        if self.random_restarts == 0 {
            return Err(Error::validation("random_restarts", "must be at least 1"));
        }
        self.channel.validate()?;
        self.impairments.resolve()?;
        self.phase_model.validate()?;
        self.solver.validate()?;
        self.pga.validate()?;
        Ok(())
    }
}

/// Reads, parses and validates a config file.
pub fn load_config(path: impl AsRef<Path>) -> Result<ExperimentConfig> {
    load_config_with_overrides(path, &[])
}

/// Like [`load_config`], with `dotted.key=value` assignments applied on top
/// of the file before validation. Values are TOML literals; anything that
/// does not parse as one is taken as a string.
pub fn load_config_with_overrides(path: impl AsRef<Path>, overrides: &[String]) -> Result<ExperimentConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if overrides.is_empty() {
        return ExperimentConfig::parse(&text, path);
    }
    let parse_err = |message: String| Error::Parse {
        path: path.to_path_buf(),
        message,
    };
    let mut doc: toml::Table = text.parse().map_err(|e: toml::de::Error| parse_err(e.to_string()))?;
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| Error::validation(item.clone(), "override must look like key=value"))?;
        let key = key.trim();
        let value = format!("v = {}", raw.trim())
            .parse::<toml::Table>()
            .ok()
            .and_then(|mut t| t.remove("v"))
            .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
        let mut parts: Vec<&str> = key.split('.').collect();
        let last = parts.pop().filter(|s| !s.is_empty()).ok_or_else(|| Error::validation(key, "empty key"))?;
        let mut table = &mut doc;
        for part in parts {
            table = table
                .entry(part)
                .or_insert_with(|| toml::Value::Table(toml::Table::new()))
                .as_table_mut()
                .ok_or_else(|| Error::validation(key, format!("`{part}` is not a table")))?;
        }
        table.insert(last.to_string(), value);
    }
    ExperimentConfig::parse(&toml::to_string(&doc).map_err(|e| parse_err(e.to_string()))?, path)
}

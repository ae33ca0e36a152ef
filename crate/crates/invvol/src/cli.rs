//! `invvol` subcommands.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use invvol_core::asymptotics::{atm_level_limit, skew_limit};
use invvol_core::market::{delta_skew, fit_power_law, validate_quotes};
use invvol_core::mc::{atm_iv_mc, atm_skew_mc, price_option};
use invvol_core::vol_models::ModelParams;
use serde_json::{json, Value};

use crate::config::{OutputFormat, Overrides, Resolved, RunConfig};
use crate::error::{Error, Result};
use crate::parallel::Parallel;
use crate::quotes::load_quotes;

#[derive(Debug, Parser)]
#[command(
    name = "invvol",
    version,
    about = "Implied volatility of inverse options under stochastic volatility"
)]
pub struct Cli {
    #[command(flatten)]
    pub overrides: Overrides,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Monte Carlo price of the configured option.
    Price,
    /// ATM implied volatility over a grid of initial volatilities.
    IvLevel {
        #[arg(long, value_delimiter = ',', default_values_t = default_grid())]
        grid: Vec<f64>,
    },
    /// ATM skew against its short-maturity limit.
    Skew {
        /// Multiply the skew by `T^{max(1/2 - H, 0)}`.
        #[arg(long)]
        scaled: bool,
    },
    /// ATM skew for several maturities.
    TermStructure {
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        maturities: Vec<f64>,
        #[arg(long)]
        scaled: bool,
    },
    /// Power-law fit of the 25-delta skew term structure in a quote file.
    FitMarket { quotes: PathBuf },
}

fn default_grid() -> Vec<f64> {
    (1..=14).map(|i| i as f64 / 10.0).collect()
}

/// Command output: one or more records with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    /// Rendered as a single JSON object rather than an array.
    pub single: bool,
    pub default_format: OutputFormat,
}

impl Report {
    fn record(columns: Vec<&'static str>, row: Vec<Value>) -> Self {
        Self {
            columns,
            rows: vec![row],
            single: true,
            default_format: OutputFormat::Json,
        }
    }

    fn table(columns: Vec<&'static str>, rows: Vec<Vec<Value>>) -> Self {
        Self {
            columns,
            rows,
            single: false,
            default_format: OutputFormat::Csv,
        }
    }

    pub fn render(&self, format: Option<OutputFormat>) -> Result<String> {
        match format.unwrap_or(self.default_format) {
            OutputFormat::Json => {
                let objects: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let map = self
                            .columns
                            .iter()
                            .map(|c| c.to_string())
                            .zip(row.iter().cloned())
                            .collect();
                        Value::Object(map)
                    })
                    .collect();
                let value = if self.single && objects.len() == 1 {
                    objects.into_iter().next().unwrap_or(Value::Null)
                } else {
                    Value::Array(objects)
                };
                let mut s = serde_json::to_string_pretty(&value)
                    .map_err(|e| Error::Config(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Error::Config(e.to_string());
                w.write_record(&self.columns).map_err(io)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(cell)).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| Error::Config(e.to_string()))
            }
        }
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// Merges the config file (if any) with the flags and validates the result.
pub fn resolve(overrides: &Overrides) -> Result<(RunConfig, Resolved)> {
    let mut config = match &overrides.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    config.apply(overrides);
    let resolved = config.resolve()?;
    Ok((config, resolved))
}

pub fn execute(cli: &Cli, exec: &Parallel) -> Result<(Report, Option<OutputFormat>)> {
    if let Command::FitMarket { quotes } = &cli.command {
        // model and simulation settings play no part here
        let format = match &cli.overrides.config {
            Some(path) => RunConfig::load(path)?.output_format,
            None => None,
        };
        return Ok((fit_market(quotes)?, cli.overrides.format.or(format)));
    }
    let (config, r) = resolve(&cli.overrides)?;
    let report = match &cli.command {
        Command::Price => price(&r, exec)?,
        Command::IvLevel { grid } => iv_level(&r, grid, exec)?,
        Command::Skew { scaled } => skew(&r, *scaled, exec)?,
        Command::TermStructure { maturities, scaled } => {
            term_structure(&r, maturities, *scaled, exec)?
        }
        Command::FitMarket { .. } => unreachable!(),
    };
    Ok((report, config.output_format))
}

pub fn price(r: &Resolved, exec: &Parallel) -> Result<Report> {
    let est = price_option(&r.model, &r.option, &r.sim, exec)?;
    Ok(Report::record(
        vec!["price", "stderr", "n"],
        vec![json!(est.mean), json!(est.stderr), json!(est.n)],
    ))
}

pub fn iv_level(r: &Resolved, grid: &[f64], exec: &Parallel) -> Result<Report> {
    if grid.is_empty() {
        return Err(Error::Config("empty sigma0 grid".into()));
    }
    let mut rows = Vec::with_capacity(grid.len());
    for &sigma0 in grid {
        let model = with_sigma0(&r.model, sigma0);
        model.validate()?;
        let iv = atm_iv_mc(&model, &r.option, &r.sim, exec)?;
        rows.push(vec![
            json!(sigma0),
            json!(iv.sigma),
            json!(atm_level_limit(&model)),
            json!(iv.stderr),
        ]);
    }
    Ok(Report::table(
        vec!["sigma0", "iv_mc", "iv_limit", "iv_stderr"],
        rows,
    ))
}

pub fn skew(r: &Resolved, scaled: bool, exec: &Parallel) -> Result<Report> {
    let est = atm_skew_mc(&r.model, &r.option, &r.sim, exec)?;
    let limit = skew_limit(&r.model);
    let t = r.option.maturity;
    let factor = if scaled {
        t.powf(limit.scaling_exponent)
    } else {
        1.0
    };
    let skew_limit_value = if scaled {
        limit.value
    } else {
        limit.skew_at(t)
    };
    Ok(Report::record(
        vec![
            "maturity",
            "iv_mc",
            "skew_mc",
            "stderr",
            "skew_limit",
            "scaling_exponent",
            "scaled",
        ],
        vec![
            json!(t),
            json!(est.iv.sigma),
            json!(factor * est.skew),
            json!(factor * est.stderr),
            json!(skew_limit_value),
            json!(limit.scaling_exponent),
            json!(scaled),
        ],
    ))
}

pub fn term_structure(
    r: &Resolved,
    maturities: &[f64],
    scaled: bool,
    exec: &Parallel,
) -> Result<Report> {
    if maturities.is_empty() {
        return Err(Error::Config("no maturities given".into()));
    }
    let exponent = skew_limit(&r.model).scaling_exponent;
    let mut rows = Vec::with_capacity(maturities.len());
    for &t in maturities {
        let mut option = r.option;
        option.maturity = t;
        option.validate()?;
        let est = atm_skew_mc(&r.model, &option, &r.sim, exec)?;
        let factor = if scaled { t.powf(exponent) } else { 1.0 };
        rows.push(vec![
            json!(t),
            json!(factor * est.skew),
            json!(factor * est.stderr),
        ]);
    }
    Ok(Report::table(vec!["T", "skew_mc", "stderr"], rows))
}

pub fn fit_market(path: &std::path::Path) -> Result<Report> {
    let rows = validate_quotes(load_quotes(path)?)?;
    let points = rows
        .iter()
        .map(delta_skew)
        .collect::<invvol_core::Result<Vec<_>>>()?;
    let fit = fit_power_law(&points)?;
    let shortest = rows[0];
    Ok(Report::record(
        vec![
            "c",
            "alpha",
            "h_implied",
            "r_squared",
            "atm_level_shortest",
            "skew_shortest",
        ],
        vec![
            json!(fit.c),
            json!(fit.alpha),
            json!(fit.h_implied),
            json!(fit.r_squared),
            json!(shortest.iv_call_d50),
            json!(points[0].skew),
        ],
    ))
}

fn with_sigma0(model: &ModelParams, s: f64) -> ModelParams {
    match *model {
        ModelParams::ConstVol { .. } => ModelParams::ConstVol { sigma0: s },
        ModelParams::Sabr { alpha, rho, .. } => ModelParams::Sabr {
            sigma0: s,
            alpha,
            rho,
        },
        ModelParams::Bergomi { v, hurst, rho, .. } => ModelParams::Bergomi {
            sigma0: s,
            v,
            hurst,
            rho,
        },
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_cli(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn run_cli(cli: &Cli) -> Result<()> {
    let exec = Parallel::from_env()?;
    let (report, format) = execute(cli, &exec)?;
    let text = report.render(cli.overrides.format.or(format))?;
    match &cli.overrides.out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.clone(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| Error::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_matches_simulation_study() {
        let g = default_grid();
        assert_eq!(g.len(), 14);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[13], 1.4);
    }

    #[test]
    fn flags_after_subcommand() {
        let cli = Cli::try_parse_from([
            "invvol", "skew", "--scaled", "--rho", "-0.5", "--rate-R", "2",
        ])
        .unwrap();
        assert_eq!(cli.overrides.rho, Some(-0.5));
        assert_eq!(cli.overrides.rate_r, Some(2.0));
        assert!(matches!(cli.command, Command::Skew { scaled: true }));
    }

    #[test]
    fn csv_and_json_rendering() {
        let rep = Report::table(
            vec!["a", "b"],
            vec![vec![json!(1.5), json!(2)], vec![json!(0.1), json!(-3.0)]],
        );
        assert_eq!(rep.render(None).unwrap(), "a,b\n1.5,2\n0.1,-3.0\n");
        let v: Value =
            serde_json::from_str(&rep.render(Some(OutputFormat::Json)).unwrap()).unwrap();
        assert_eq!(v[1]["b"], json!(-3.0));
    }
}

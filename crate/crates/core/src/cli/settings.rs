//! Run configuration: a flat TOML file whose keys mirror the command-line
//! flags (`freq_hz` ↔ `--freq-hz`). Flags override file values, file values
//! override built-in defaults.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::Deserialize;

use super::CliError;
use crate::pathloss::{RadioConfig, StreetSetup, SweepRange};
use crate::scenario::{derive_grid, BuiltUpParams, GridLayout, ScenarioPreset};

pub const DEFAULT_FREQ_HZ: f64 = 4e9;
pub const DEFAULT_HV: f64 = 1.5;

#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Preset (suburban, urban, dense-urban, high-rise-urban) or `custom`
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub scenario: Option<String>,
    /// Built-up area ratio α; overrides the preset value
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Buildings per km² β; overrides the preset value
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Rayleigh scale of building heights γ in metres; overrides the preset value
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Building width W in metres (with --street, replaces the α/β grid)
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub width: Option<f64>,
    /// Street width S in metres (with --width, replaces the α/β grid)
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub street: Option<f64>,
    /// Carrier frequency in Hz [default: 4e9]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub freq_hz: Option<f64>,
    /// Vehicle antenna height in metres [default: 1.5]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub hv: Option<f64>,
    /// Wall reflection coefficient [default: 1]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma_b: Option<f64>,
    /// Ground reflection coefficient [default: 1]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma_g: Option<f64>,
    /// RNG seed [default: 0]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub seed: Option<u64>,
    /// Street-axis coordinate where block 0 begins, metres [default: 0]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub grid_offset: Option<f64>,
    /// Output file (stdout when absent)
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub out: Option<PathBuf>,

    /// UAV altitude for horizontal sweeps and comparisons, metres [default: 50]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub altitude: Option<f64>,
    /// First horizontal distance, metres [default: 0]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub d_min: Option<f64>,
    /// Last horizontal distance, metres [default: 100]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub d_max: Option<f64>,
    /// Horizontal distance step, metres [default: 0.1]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub d_step: Option<f64>,

    /// Horizontal distance for vertical sweeps, metres [default: 50]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub distance: Option<f64>,
    /// Lowest UAV altitude, metres [default: 5]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub h_min: Option<f64>,
    /// Highest UAV altitude, metres [default: 150]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub h_max: Option<f64>,
    /// Altitude step, metres [default: 0.5]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub h_step: Option<f64>,

    /// Comma-separated presets to compare [default: suburban,urban,dense-urban]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub scenarios: Option<String>,
    /// Height realisations per scenario (seeds seed, seed+1, …) [default: 100]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub seeds: Option<u64>,
    /// Per-scenario summary CSV for `compare` (stderr when absent)
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub summary: Option<PathBuf>,

    /// Randomised oracle links for `validate` [default: 10000]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub trials: Option<u64>,
    /// Building width for the large-scale validation scene, metres
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub manhattan_width: Option<f64>,
    /// Street width for the large-scale validation scene, metres
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub manhattan_street: Option<f64>,
    /// α for the large-scale validation grid (alternative to width/street)
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub manhattan_alpha: Option<f64>,
    /// β for the large-scale validation grid (alternative to width/street)
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub manhattan_beta: Option<f64>,
    /// Building-height scale for the validation scene, metres [default: 87.3]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub manhattan_gamma: Option<f64>,
    /// UAV altitude for the validation scene, metres [default: 200]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub manhattan_altitude: Option<f64>,
    /// Last horizontal distance for the validation scene, metres [default: 225]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub manhattan_d_max: Option<f64>,
    /// Distance step for the validation scene, metres [default: 0.1]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub manhattan_d_step: Option<f64>,
    /// Height realisations for the validation scene [default: 100]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub manhattan_seeds: Option<u64>,

    /// Number of heights for `sample-heights` [default: 100000]
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub n: Option<u64>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),* $(,)?) => {
        Settings { $($field: $top.$field.or($base.$field),)* }
    };
}

impl Settings {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::ConfigParse(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            CliError::ConfigParse(msg) => {
                CliError::ConfigParse(format!("{}: {msg}", path.display()))
            }
            other => other,
        })
    }

    /// Values set in `top` win over values in `self`.
    pub fn overlay(self, top: Settings) -> Settings {
        let base = self;
        overlay!(base, top;
            scenario, alpha, beta, gamma, width, street, freq_hz, hv, gamma_b, gamma_g,
            seed, grid_offset, out, altitude, d_min, d_max, d_step, distance, h_min,
            h_max, h_step, scenarios, seeds, summary, trials, manhattan_width,
            manhattan_street, manhattan_alpha, manhattan_beta, manhattan_gamma,
            manhattan_altitude, manhattan_d_max, manhattan_d_step, manhattan_seeds, n,
        )
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn vehicle_height(&self) -> Result<f64, CliError> {
        positive("hv", self.hv.unwrap_or(DEFAULT_HV))
    }

    pub fn radio(&self) -> Result<RadioConfig, CliError> {
        let f = positive("freq_hz", self.freq_hz.unwrap_or(DEFAULT_FREQ_HZ))?;
        let gb = unit_interval("gamma_b", self.gamma_b.unwrap_or(1.0))?;
        let gg = unit_interval("gamma_g", self.gamma_g.unwrap_or(1.0))?;
        RadioConfig::new(f, gb, gg).map_err(|e| CliError::config("freq_hz", e.to_string()))
    }

    /// Resolves the scenario: a preset with optional α/β/γ overrides, or
    /// `custom` with all three given explicitly.
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        let name = self.scenario.as_deref().unwrap_or("urban");
        let (label, base) = if name.trim().eq_ignore_ascii_case("custom") {
            let alpha = self
                .alpha
                .ok_or_else(|| missing("alpha", "custom scenario"))?;
            let beta = self
                .beta
                .ok_or_else(|| missing("beta", "custom scenario"))?;
            let gamma = self
                .gamma
                .ok_or_else(|| missing("gamma", "custom scenario"))?;
            ("custom".to_string(), BuiltUpParams { alpha, beta, gamma })
        } else {
            let preset: ScenarioPreset = name
                .parse()
                .map_err(|e: crate::Error| CliError::config("scenario", e.to_string()))?;
            let p = preset.params();
            (
                preset.name().to_string(),
                BuiltUpParams {
                    alpha: self.alpha.unwrap_or(p.alpha),
                    beta: self.beta.unwrap_or(p.beta),
                    gamma: self.gamma.unwrap_or(p.gamma),
                },
            )
        };
        let params = checked_params(base, "alpha", "beta", "gamma")?;
        let layout = match (self.width, self.street) {
            (Some(w), Some(s)) => explicit_layout(w, s, "width", "street")?,
            (Some(_), None) => return Err(missing("street", "an explicit grid")),
            (None, Some(_)) => return Err(missing("width", "an explicit grid")),
            (None, None) => {
                derive_grid(&params).map_err(|e| CliError::config("alpha", e.to_string()))?
            }
        };
        Ok(Scenario {
            label,
            params,
            layout,
        })
    }

    pub fn street_setup(&self, layout: GridLayout) -> Result<StreetSetup, CliError> {
        let mut street = StreetSetup::new(layout, self.vehicle_height()?);
        street.grid_offset = finite("grid_offset", self.grid_offset.unwrap_or(0.0))?;
        Ok(street)
    }

    pub fn altitude(&self) -> Result<f64, CliError> {
        let h = positive("altitude", self.altitude.unwrap_or(50.0))?;
        self.above_vehicle("altitude", h)
    }

    pub fn distance_range(&self) -> Result<SweepRange, CliError> {
        let lo = self.d_min.unwrap_or(0.0);
        if !(lo >= 0.0) {
            return Err(CliError::config(
                "d_min",
                format!("must be non-negative, got {lo}"),
            ));
        }
        range(
            ("d_min", lo),
            ("d_max", self.d_max.unwrap_or(100.0)),
            ("d_step", self.d_step.unwrap_or(0.1)),
        )
    }

    pub fn fixed_distance(&self) -> Result<f64, CliError> {
        let d = self.distance.unwrap_or(50.0);
        if !(d >= 0.0 && d.is_finite()) {
            return Err(CliError::config(
                "distance",
                format!("must be non-negative, got {d}"),
            ));
        }
        Ok(d)
    }

    pub fn altitude_range(&self) -> Result<SweepRange, CliError> {
        let lo = self.above_vehicle("h_min", self.h_min.unwrap_or(5.0))?;
        range(
            ("h_min", lo),
            ("h_max", self.h_max.unwrap_or(150.0)),
            ("h_step", self.h_step.unwrap_or(0.5)),
        )
    }

    pub fn compare_presets(&self) -> Result<Vec<ScenarioPreset>, CliError> {
        let list = self
            .scenarios
            .as_deref()
            .unwrap_or("suburban,urban,dense-urban");
        let presets = list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse()
                    .map_err(|e: crate::Error| CliError::config("scenarios", e.to_string()))
            })
            .collect::<Result<Vec<ScenarioPreset>, _>>()?;
        if presets.len() < 2 {
            return Err(CliError::config(
                "scenarios",
                format!("at least two scenarios are needed, got {}", presets.len()),
            ));
        }
        Ok(presets)
    }

    pub fn seed_count(&self) -> Result<u64, CliError> {
        at_least("seeds", self.seeds.unwrap_or(100), 1)
    }

    pub fn trials(&self) -> Result<u64, CliError> {
        at_least("trials", self.trials.unwrap_or(10_000), 1)
    }

    pub fn sample_count(&self) -> Result<u64, CliError> {
        at_least("n", self.n.unwrap_or(100_000), 2)
    }

    pub fn manhattan(&self) -> Result<ManhattanProtocol, CliError> {
        let gamma = positive("manhattan_gamma", self.manhattan_gamma.unwrap_or(87.3))?;
        let layout = match (
            self.manhattan_width,
            self.manhattan_street,
            self.manhattan_alpha,
            self.manhattan_beta,
        ) {
            (Some(w), Some(s), None, None) => {
                explicit_layout(w, s, "manhattan_width", "manhattan_street")?
            }
            (None, None, Some(a), Some(b)) => {
                let p = checked_params(
                    BuiltUpParams { alpha: a, beta: b, gamma },
                    "manhattan_alpha",
                    "manhattan_beta",
                    "manhattan_gamma",
                )?;
                derive_grid(&p).map_err(|e| CliError::config("manhattan_alpha", e.to_string()))?
            }
            (Some(_), Some(_), _, _) => {
                return Err(CliError::config(
                    "manhattan_width",
                    "give either manhattan_width/manhattan_street or manhattan_alpha/manhattan_beta, not both",
                ))
            }
            (Some(_), None, _, _) => return Err(missing("manhattan_street", "the validation grid")),
            (None, Some(_), _, _) => return Err(missing("manhattan_width", "the validation grid")),
            (None, None, Some(_), None) => {
                return Err(missing("manhattan_beta", "the validation grid"))
            }
            (None, None, None, Some(_)) => {
                return Err(missing("manhattan_alpha", "the validation grid"))
            }
            (None, None, None, None) => {
                return Err(missing(
                    "manhattan_width",
                    "the large-scale validation scene (give manhattan_width and \
                     manhattan_street, or manhattan_alpha and manhattan_beta); its grid \
                     dimensions have no default",
                ))
            }
        };
        let altitude = self.above_vehicle(
            "manhattan_altitude",
            self.manhattan_altitude.unwrap_or(200.0),
        )?;
        let distances = range(
            ("d_min", 0.0),
            ("manhattan_d_max", self.manhattan_d_max.unwrap_or(225.0)),
            ("manhattan_d_step", self.manhattan_d_step.unwrap_or(0.1)),
        )?;
        let seeds = at_least("manhattan_seeds", self.manhattan_seeds.unwrap_or(100), 1)?;
        Ok(ManhattanProtocol {
            gamma,
            layout,
            altitude,
            distances,
            seeds,
        })
    }

    fn above_vehicle(&self, key: &str, h: f64) -> Result<f64, CliError> {
        let hv = self.vehicle_height()?;
        if !(h > hv && h.is_finite()) {
            return Err(CliError::config(
                key,
                format!("UAV altitude {h} must exceed the vehicle antenna height {hv}"),
            ));
        }
        Ok(h)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub params: BuiltUpParams,
    pub layout: GridLayout,
}

/// Large-scale statistical check: tall buildings, high UAV, long street.
#[derive(Debug, Clone, PartialEq)]
pub struct ManhattanProtocol {
    pub gamma: f64,
    pub layout: GridLayout,
    pub altitude: f64,
    pub distances: SweepRange,
    pub seeds: u64,
}

fn missing(key: &str, what: &str) -> CliError {
    CliError::config(key, format!("required for {what}"))
}

fn finite(key: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::config(key, format!("must be finite, got {v}")))
    }
}

fn positive(key: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::config(key, format!("must be positive, got {v}")))
    }
}

fn unit_interval(key: &str, v: f64) -> Result<f64, CliError> {
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(CliError::config(
            key,
            format!("must lie in [0, 1], got {v}"),
        ))
    }
}

fn at_least(key: &str, v: u64, min: u64) -> Result<u64, CliError> {
    if v >= min {
        Ok(v)
    } else {
        Err(CliError::config(
            key,
            format!("must be at least {min}, got {v}"),
        ))
    }
}

fn checked_params(
    p: BuiltUpParams,
    alpha_key: &str,
    beta_key: &str,
    gamma_key: &str,
) -> Result<BuiltUpParams, CliError> {
    if !(p.alpha > 0.0 && p.alpha <= 1.0) {
        return Err(CliError::config(
            alpha_key,
            format!("must lie in (0, 1], got {}", p.alpha),
        ));
    }
    positive(beta_key, p.beta)?;
    positive(gamma_key, p.gamma)?;
    Ok(p)
}

fn explicit_layout(w: f64, s: f64, w_key: &str, s_key: &str) -> Result<GridLayout, CliError> {
    positive(w_key, w)?;
    if !(s >= 0.0 && s.is_finite()) {
        return Err(CliError::config(
            s_key,
            format!("must be non-negative, got {s}"),
        ));
    }
    GridLayout::new(w, s).map_err(|e| CliError::config(w_key, e.to_string()))
}

fn range(
    (lo_key, lo): (&str, f64),
    (hi_key, hi): (&str, f64),
    (step_key, step): (&str, f64),
) -> Result<SweepRange, CliError> {
    finite(lo_key, lo)?;
    finite(hi_key, hi)?;
    positive(step_key, step)?;
    if hi < lo {
        return Err(CliError::config(
            hi_key,
            format!("{hi_key} = {hi} is below {lo_key} = {lo}"),
        ));
    }
    SweepRange::new(lo, hi, step).map_err(|e| CliError::config(step_key, e.to_string()))
}

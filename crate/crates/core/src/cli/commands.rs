use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::output::fmt_sig;
use super::settings::{ManhattanProtocol, Settings};
use super::CliError;
use crate::geometry::LinkGeometry;
use crate::oracle::{verify_against_analytical, VerificationReport};
use crate::pathloss::{
    sweep_horizontal, sweep_vertical, PathLossSample, RadioConfig, StreetSetup, SweepRange,
};
use crate::scenario::{
    derive_grid, fit_rayleigh, BuildingHeights, GridLayout, RayleighHeights, ScenarioPreset, Side,
};
use crate::stats::{ecdf, summarize_sweep, NormalFit, SweepSummary};

/// Reference large-scale statistics the validation run is compared against.
pub const MANHATTAN_REFERENCE_MU_DB: f64 = 91.87;
pub const MANHATTAN_REFERENCE_SIGMA_DB: f64 = 4.21;
pub const MANHATTAN_MU_BAND_DB: f64 = 2.5;
pub const MANHATTAN_SIGMA_BAND_DB: f64 = 1.5;

pub fn cmd_sweep_h(s: &Settings) -> Result<Vec<PathLossSample>, CliError> {
    let scenario = s.scenario()?;
    let street = s.street_setup(scenario.layout)?;
    let heights = RayleighHeights::new(scenario.params.gamma, s.seed())?;
    let samples = sweep_horizontal(
        &s.distance_range()?,
        s.altitude()?,
        &street,
        &heights,
        &s.radio()?,
    )?;
    Ok(samples)
}

pub fn cmd_sweep_v(s: &Settings) -> Result<Vec<PathLossSample>, CliError> {
    let scenario = s.scenario()?;
    let street = s.street_setup(scenario.layout)?;
    let heights = RayleighHeights::new(scenario.params.gamma, s.seed())?;
    let samples = sweep_vertical(
        &s.altitude_range()?,
        s.fixed_distance()?,
        &street,
        &heights,
        &s.radio()?,
    )?;
    Ok(samples)
}

/// Pooled statistics of one scenario over many height realisations.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioStats {
    pub label: String,
    pub layout: GridLayout,
    pub gamma: f64,
    pub seeds: u64,
    /// Fit over the unclipped samples of all seeds together.
    pub summary: SweepSummary,
    /// Mean of the per-seed σ.
    pub sigma_per_seed_mean: f64,
    /// Unclipped path-loss values of all seeds, in seed order.
    pub pl_db: Vec<f64>,
}

/// Horizontal sweeps for `seeds` consecutive seeds starting at `first_seed`,
/// pooled into one sample set.
#[allow(clippy::too_many_arguments)]
pub fn horizontal_statistics(
    label: &str,
    gamma: f64,
    street: &StreetSetup,
    distances: &SweepRange,
    altitude: f64,
    radio: &RadioConfig,
    first_seed: u64,
    seeds: u64,
) -> Result<ScenarioStats, CliError> {
    let runs: Vec<Vec<PathLossSample>> = (0..seeds)
        .into_par_iter()
        .map(|i| {
            let heights = RayleighHeights::new(gamma, first_seed.wrapping_add(i))?;
            sweep_horizontal(distances, altitude, street, &heights, radio)
        })
        .collect::<Result<_, crate::Error>>()?;
    let per_seed: Vec<f64> = runs
        .iter()
        .map(|r| summarize_sweep(r).map(|s| s.fit.sigma))
        .collect::<Result<_, _>>()?;
    let pooled: Vec<PathLossSample> = runs.into_iter().flatten().collect();
    let summary = summarize_sweep(&pooled)?;
    Ok(ScenarioStats {
        label: label.to_string(),
        layout: street.layout,
        gamma,
        seeds,
        summary,
        sigma_per_seed_mean: per_seed.iter().sum::<f64>() / per_seed.len() as f64,
        pl_db: pooled
            .iter()
            .filter(|p| !p.clipped)
            .map(|p| p.pl_db)
            .collect(),
    })
}

pub fn cmd_compare(s: &Settings) -> Result<Vec<ScenarioStats>, CliError> {
    let presets = s.compare_presets()?;
    let distances = s.distance_range()?;
    let altitude = s.altitude()?;
    let radio = s.radio()?;
    let seeds = s.seed_count()?;
    presets
        .iter()
        .map(|&preset: &ScenarioPreset| {
            let params = preset.params();
            let layout = derive_grid(&params)?;
            let street = s.street_setup(layout)?;
            horizontal_statistics(
                preset.name(),
                params.gamma,
                &street,
                &distances,
                altitude,
                &radio,
                s.seed(),
                seeds,
            )
        })
        .collect()
}

pub fn write_compare_ecdf<W: std::io::Write>(
    w: W,
    stats: &[ScenarioStats],
) -> Result<(), CliError> {
    let mut out = super::output::csv_writer(w);
    out.write_record(["scenario", "pl_db", "cdf"])?;
    for st in stats {
        for (v, p) in ecdf(&st.pl_db)? {
            out.write_record([st.label.clone(), fmt_sig(v), fmt_sig(p)])?;
        }
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_compare_summary<W: std::io::Write>(
    w: W,
    stats: &[ScenarioStats],
) -> Result<(), CliError> {
    let mut out = super::output::csv_writer(w);
    out.write_record([
        "scenario",
        "W",
        "S",
        "gamma",
        "seeds",
        "n",
        "mu_db",
        "sigma_db",
        "sigma_per_seed_mean_db",
        "clipped",
        "wr0",
        "wr1",
        "wr2",
    ])?;
    for st in stats {
        let NormalFit { mu, sigma, n } = st.summary.fit;
        let [w0, w1, w2] = st.summary.wr_histogram;
        out.write_record([
            st.label.clone(),
            fmt_sig(st.layout.width),
            fmt_sig(st.layout.street),
            fmt_sig(st.gamma),
            st.seeds.to_string(),
            n.to_string(),
            fmt_sig(mu),
            fmt_sig(sigma),
            fmt_sig(st.sigma_per_seed_mean),
            st.summary.clipped.to_string(),
            w0.to_string(),
            w1.to_string(),
            w2.to_string(),
        ])?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRun {
    pub trials: u64,
    pub skipped: u64,
    pub count_mismatches: u64,
    pub length_mismatches: u64,
    pub los_blocked: u64,
    pub max_relative_error: f64,
    pub max_specular_error: f64,
    pub first_failure: Option<VerificationReport>,
}

impl OracleRun {
    pub fn passed(&self) -> bool {
        self.count_mismatches == 0 && self.length_mismatches == 0 && self.los_blocked == 0
    }
}

/// Random centerline links: `D ∈ [1, 200]`, `H ∈ [h_v + 1, 300]`, vehicle
/// anywhere within one grid period, fresh height seed per link.
pub fn random_oracle_run(
    layout: GridLayout,
    gamma: f64,
    vehicle_height: f64,
    grid_offset: f64,
    seed: u64,
    trials: u64,
) -> Result<OracleRun, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let links: Vec<(f64, f64, f64, u64)> = (0..trials)
        .map(|_| {
            let d = rng.random_range(1.0..=200.0);
            let h = rng.random_range(vehicle_height + 1.0..=300.0);
            let x_v = rng.random_range(0.0..layout.period());
            (d, h, x_v, rng.random::<u64>())
        })
        .collect();
    let reports: Vec<VerificationReport> = links
        .par_iter()
        .map(|&(d, h, x_v, height_seed)| {
            let g = LinkGeometry::new(d, h, vehicle_height, layout)?
                .with_vehicle_x(x_v)
                .with_grid_offset(grid_offset);
            let heights = RayleighHeights::new(gamma, height_seed)?;
            Ok(verify_against_analytical(&g, &heights))
        })
        .collect::<Result<_, crate::Error>>()?;

    let mut run = OracleRun {
        trials,
        skipped: 0,
        count_mismatches: 0,
        length_mismatches: 0,
        los_blocked: 0,
        max_relative_error: 0.0,
        max_specular_error: 0.0,
        first_failure: None,
    };
    for r in reports {
        if r.skipped.is_some() {
            run.skipped += 1;
            continue;
        }
        run.count_mismatches += u64::from(!r.counts_match);
        run.length_mismatches += u64::from(!r.lengths_match);
        run.los_blocked += u64::from(r.los_blocked);
        run.max_relative_error = run.max_relative_error.max(r.max_relative_error);
        run.max_specular_error = run.max_specular_error.max(r.max_specular_error);
        if !r.passed() && run.first_failure.is_none() {
            run.first_failure = Some(r);
        }
    }
    Ok(run)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub scenario: String,
    pub layout: GridLayout,
    pub oracle: OracleRun,
    pub manhattan: ManhattanProtocol,
    pub manhattan_stats: ScenarioStats,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.oracle.passed()
    }

    pub fn manhattan_within_band(&self) -> bool {
        let fit = self.manhattan_stats.summary.fit;
        (fit.mu - MANHATTAN_REFERENCE_MU_DB).abs() <= MANHATTAN_MU_BAND_DB
            && (fit.sigma - MANHATTAN_REFERENCE_SIGMA_DB).abs() <= MANHATTAN_SIGMA_BAND_DB
    }

    pub fn to_text(&self) -> String {
        let mut t = String::new();
        let o = &self.oracle;
        let m = &self.manhattan;
        let fit = self.manhattan_stats.summary.fit;
        let _ = writeln!(t, "# oracle: image-method trace vs closed-form geometry");
        let _ = writeln!(t, "scenario = {}", self.scenario);
        let _ = writeln!(t, "grid_W_m = {}", fmt_sig(self.layout.width));
        let _ = writeln!(t, "grid_S_m = {}", fmt_sig(self.layout.street));
        let _ = writeln!(t, "oracle_trials = {}", o.trials);
        let _ = writeln!(t, "oracle_skipped = {}", o.skipped);
        let _ = writeln!(t, "oracle_count_mismatches = {}", o.count_mismatches);
        let _ = writeln!(t, "oracle_length_mismatches = {}", o.length_mismatches);
        let _ = writeln!(t, "oracle_los_blocked = {}", o.los_blocked);
        let _ = writeln!(
            t,
            "oracle_max_relative_error = {}",
            fmt_sig(o.max_relative_error)
        );
        let _ = writeln!(
            t,
            "oracle_max_specular_error_rad = {}",
            fmt_sig(o.max_specular_error)
        );
        if let Some(f) = &o.first_failure {
            let g = &f.geometry;
            let _ = writeln!(
                t,
                "mismatch_link = D={} H={} hv={} W={} S={} x_v={} grid_offset={} oracle_wr={} model_wr={} max_rel_err={}",
                g.distance, g.altitude, g.vehicle_height, g.layout.width, g.layout.street,
                g.vehicle_x, g.grid_offset, f.oracle_wr, f.model_wr, f.max_relative_error
            );
        }
        let _ = writeln!(
            t,
            "# large-scale statistics (grid dimensions supplied by the user)"
        );
        let _ = writeln!(t, "manhattan_gamma_m = {}", fmt_sig(m.gamma));
        let _ = writeln!(t, "manhattan_W_m = {}", fmt_sig(m.layout.width));
        let _ = writeln!(t, "manhattan_S_m = {}", fmt_sig(m.layout.street));
        let _ = writeln!(t, "manhattan_altitude_m = {}", fmt_sig(m.altitude));
        let _ = writeln!(
            t,
            "manhattan_distance_m = {}..{} step {}",
            fmt_sig(m.distances.start),
            fmt_sig(m.distances.stop),
            fmt_sig(m.distances.step)
        );
        let _ = writeln!(t, "manhattan_seeds = {}", m.seeds);
        let _ = writeln!(t, "manhattan_samples = {}", fit.n);
        let _ = writeln!(
            t,
            "manhattan_clipped = {}",
            self.manhattan_stats.summary.clipped
        );
        let _ = writeln!(t, "manhattan_mu_db = {}", fmt_sig(fit.mu));
        let _ = writeln!(t, "manhattan_sigma_db = {}", fmt_sig(fit.sigma));
        let _ = writeln!(
            t,
            "manhattan_reference_mu_db = {}",
            fmt_sig(MANHATTAN_REFERENCE_MU_DB)
        );
        let _ = writeln!(
            t,
            "manhattan_reference_sigma_db = {}",
            fmt_sig(MANHATTAN_REFERENCE_SIGMA_DB)
        );
        let _ = writeln!(
            t,
            "manhattan_within_band = {}",
            self.manhattan_within_band()
        );
        let _ = writeln!(
            t,
            "result = {}",
            if self.passed() { "PASS" } else { "FAIL" }
        );
        t
    }
}

pub fn cmd_validate(s: &Settings) -> Result<ValidationReport, CliError> {
    let trials = s.trials()?;
    let scenario = s.scenario()?;
    let street = s.street_setup(scenario.layout)?;
    let manhattan = s.manhattan()?;
    let radio = s.radio()?;
    let oracle = random_oracle_run(
        scenario.layout,
        scenario.params.gamma,
        street.vehicle_height,
        street.grid_offset,
        s.seed(),
        trials,
    )?;
    let mut big_street = street;
    big_street.layout = manhattan.layout;
    let manhattan_stats = horizontal_statistics(
        "manhattan",
        manhattan.gamma,
        &big_street,
        &manhattan.distances,
        manhattan.altitude,
        &radio,
        s.seed(),
        manhattan.seeds,
    )?;
    Ok(ValidationReport {
        scenario: scenario.label,
        layout: scenario.layout,
        oracle,
        manhattan,
        manhattan_stats,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeightSample {
    pub gamma: f64,
    pub heights: Vec<f64>,
    pub gamma_hat: f64,
}

/// Heights of blocks `0..n` on the left row, and their Rayleigh fit.
pub fn cmd_sample_heights(s: &Settings) -> Result<HeightSample, CliError> {
    let n = s.sample_count()?;
    let scenario = s.scenario()?;
    let field = RayleighHeights::new(scenario.params.gamma, s.seed())?;
    let heights: Vec<f64> = (0..n as i64).map(|k| field.height(Side::Left, k)).collect();
    let gamma_hat = fit_rayleigh(&heights)?;
    Ok(HeightSample {
        gamma: scenario.params.gamma,
        heights,
        gamma_hat,
    })
}

pub fn write_heights<W: std::io::Write>(w: W, sample: &HeightSample) -> Result<(), CliError> {
    let mut out = super::output::csv_writer(w);
    out.write_record(["block", "height_m"])?;
    for (k, h) in sample.heights.iter().enumerate() {
        out.write_record([k.to_string(), fmt_sig(*h)])?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

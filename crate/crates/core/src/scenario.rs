//! ITU-R P.1410 built-up area description.
//!
//! A built-up area is summarised by three numbers: the fraction of land covered
//! by buildings (α), the number of buildings per km² (β) and the Rayleigh scale
//! of the building-height distribution (γ, metres). On a regular grid of square
//! buildings these fix the building side `W` and the street width `S`.
//!
//! Building heights follow the normalised Rayleigh density
//! `p(h) = h/γ² · exp(−h²/(2γ²))`. The commonly quoted form with a single `γ` in
//! the denominator does not integrate to one; the normalised form keeps γ as the
//! Rayleigh scale, so inverse-CDF sampling and the maximum-likelihood fit are
//! consistent with it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// ITU-R statistical triple describing a built-up area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuiltUpParams {
    /// Ratio of land area covered by buildings, in (0, 1].
    pub alpha: f64,
    /// Mean number of buildings per km².
    pub beta: f64,
    /// Rayleigh scale of the building heights, metres.
    pub gamma: f64,
}

impl BuiltUpParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        let p = Self { alpha, beta, gamma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "beta must be positive, got {}",
                self.beta
            )));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// Standard-city presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScenarioPreset {
    Suburban,
    Urban,
    DenseUrban,
    HighRiseUrban,
}

impl ScenarioPreset {
    pub const ALL: [ScenarioPreset; 4] = [
        ScenarioPreset::Suburban,
        ScenarioPreset::Urban,
        ScenarioPreset::DenseUrban,
        ScenarioPreset::HighRiseUrban,
    ];

    pub fn params(self) -> BuiltUpParams {
        preset_params(self)
    }

    pub fn name(self) -> &'static str {
        match self {
            ScenarioPreset::Suburban => "suburban",
            ScenarioPreset::Urban => "urban",
            ScenarioPreset::DenseUrban => "dense-urban",
            ScenarioPreset::HighRiseUrban => "high-rise-urban",
        }
    }
}

impl fmt::Display for ScenarioPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .chars()
            .filter(|c| !matches!(c, '-' | '_' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        match key.as_str() {
            "suburban" => Ok(ScenarioPreset::Suburban),
            "urban" => Ok(ScenarioPreset::Urban),
            "denseurban" | "dense" => Ok(ScenarioPreset::DenseUrban),
            "highriseurban" | "highrise" => Ok(ScenarioPreset::HighRiseUrban),
            _ => Err(Error::InvalidParams(format!(
                "unknown scenario '{s}' (expected suburban, urban, dense-urban or high-rise-urban)"
            ))),
        }
    }
}

pub fn preset_params(preset: ScenarioPreset) -> BuiltUpParams {
    let (alpha, beta, gamma) = match preset {
        ScenarioPreset::Suburban => (0.1, 750.0, 8.0),
        ScenarioPreset::Urban => (0.3, 500.0, 15.0),
        ScenarioPreset::DenseUrban => (0.5, 300.0, 20.0),
        ScenarioPreset::HighRiseUrban => (0.5, 300.0, 50.0),
    };
    BuiltUpParams { alpha, beta, gamma }
}

/// Manhattan-grid dimensions: square buildings of side `width` separated by
/// streets of width `street`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridLayout {
    pub width: f64,
    pub street: f64,
}

impl GridLayout {
    pub fn new(width: f64, street: f64) -> Result<Self> {
        if !(width > 0.0 && width.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "building width W must be positive, got {width}"
            )));
        }
        if !(street >= 0.0 && street.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "street width S must be non-negative, got {street}"
            )));
        }
        Ok(Self { width, street })
    }

    /// Grid pitch `W + S`.
    pub fn period(&self) -> f64 {
        self.width + self.street
    }
}

/// `W = 1000·√(α/β)`, `S = 1000/√β − W`.
pub fn derive_grid(params: &BuiltUpParams) -> Result<GridLayout> {
    params.validate()?;
    // W is taken as a fraction √α of the pitch so that α = 1 gives S = 0 exactly.
    let pitch = 1000.0 / params.beta.sqrt();
    let width = pitch * params.alpha.sqrt();
    GridLayout::new(width, pitch - width)
}

pub fn rayleigh_pdf(h: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParams(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    if h < 0.0 {
        return Ok(0.0);
    }
    let g2 = gamma * gamma;
    Ok(h / g2 * (-h * h / (2.0 * g2)).exp())
}

/// Inverse Rayleigh CDF: `γ·√(−2 ln(1−u))` for `u ∈ [0, 1)`.
pub fn rayleigh_quantile(u: f64, gamma: f64) -> f64 {
    gamma * (-2.0 * (-u).ln_1p()).sqrt()
}

/// Maximum-likelihood Rayleigh scale `√(Σh²/(2n))`.
pub fn fit_rayleigh(heights: &[f64]) -> Result<f64> {
    if heights.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(bad) = heights.iter().find(|h| !(**h >= 0.0)) {
        return Err(Error::InvalidInput(format!(
            "building heights must be non-negative, got {bad}"
        )));
    }
    let sum_sq: f64 = heights.iter().map(|h| h * h).sum();
    Ok((sum_sq / (2.0 * heights.len() as f64)).sqrt())
}

/// The two rows of buildings lining the street.
///
/// `Left` faces the street at lateral offset `y = +S/2`, `Right` at `y = −S/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    /// 1 or 2.
    pub fn number(self) -> u8 {
        match self {
            Side::Left => 1,
            Side::Right => 2,
        }
    }

    /// Lateral sign of the facade plane.
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }
}

/// Lookup of building heights by row and block index.
pub trait BuildingHeights {
    fn height(&self, side: Side, block: i64) -> f64;
}

impl<T: BuildingHeights + ?Sized> BuildingHeights for &T {
    fn height(&self, side: Side, block: i64) -> f64 {
        (**self).height(side, block)
    }
}

/// Lazily generated Rayleigh heights.
///
/// Every `(side, block)` pair maps to a fixed position in a ChaCha8 keystream
/// (stream = side, word position = block), so any block can be queried in any
/// order and always yields the same height for the same seed.
#[derive(Debug, Clone)]
pub struct RayleighHeights {
    gamma: f64,
    seed: u64,
    base: ChaCha8Rng,
}

impl RayleighHeights {
    pub fn new(gamma: f64, seed: u64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "gamma must be positive, got {gamma}"
            )));
        }
        Ok(Self {
            gamma,
            seed,
            base: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn uniform(&self, side: Side, block: i64) -> f64 {
        let mut rng = self.base.clone();
        rng.set_stream(side.number() as u64);
        // one u64 draw consumes two 32-bit words
        rng.set_word_pos((block as u64 as u128) << 1);
        rng.random::<f64>()
    }
}

impl BuildingHeights for RayleighHeights {
    fn height(&self, side: Side, block: i64) -> f64 {
        rayleigh_quantile(self.uniform(side, block), self.gamma)
    }
}

/// Every building has the same height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantHeights(pub f64);

impl BuildingHeights for ConstantHeights {
    fn height(&self, _side: Side, _block: i64) -> f64 {
        self.0
    }
}

/// Materialised heights. Blocks missing from the table have no building (height 0).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HeightTable {
    pub seed: Option<u64>,
    pub heights: BTreeMap<(Side, i64), f64>,
}

impl HeightTable {
    pub fn insert(&mut self, side: Side, block: i64, height: f64) {
        self.heights.insert((side, block), height);
    }

    pub fn values(&self) -> Vec<f64> {
        self.heights.values().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.heights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heights.is_empty()
    }
}

impl BuildingHeights for HeightTable {
    fn height(&self, side: Side, block: i64) -> f64 {
        self.heights.get(&(side, block)).copied().unwrap_or(0.0)
    }
}

/// Draws the heights of the requested buildings.
pub fn sample_heights(
    params: &BuiltUpParams,
    seed: u64,
    indices: &[(Side, i64)],
) -> Result<HeightTable> {
    params.validate()?;
    let field = RayleighHeights::new(params.gamma, seed)?;
    let mut table = HeightTable {
        seed: Some(seed),
        ..Default::default()
    };
    for &(side, block) in indices {
        table.insert(side, block, field.height(side, block));
    }
    Ok(table)
}

//! Resolution of group, measure, and circle-measure sources from CLI
//! arguments or JSON files.

use std::path::PathBuf;

use clap::Args;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use diskwalk::cmeasure::CircleMeasure;
use diskwalk::error::Error;
use diskwalk::gmeasure::GroupMeasure;
use diskwalk::group::GeneratorSet;
use diskwalk::moebius::MapClass;
use diskwalk::walk::{empirical_hitting_measure, WalkConfig};

/// Where the group measure comes from: a named preset (uniform on the
/// generator alphabet) or JSON files.
#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct GroupArgs {
    /// Preset name: single-hyperbolic | rotation | schottky | free-hyperbolic
    #[arg(long, default_value = "schottky")]
    pub preset: String,
    /// Translation length for hyperbolic presets
    #[arg(long, default_value_t = 3.0)]
    pub length: f64,
    /// Rotation angle / axis angle (radians)
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
    pub angle: f64,
    /// Generator count for the schottky preset
    #[arg(long, default_value_t = 2)]
    pub count: usize,
    /// GeneratorSet JSON file (overrides --preset)
    #[arg(long)]
    pub group_json: Option<PathBuf>,
    /// GroupMeasure JSON file (overrides the uniform-on-generators default)
    #[arg(long)]
    pub measure_json: Option<PathBuf>,
}

fn read_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Config(format!("invalid JSON in {}: {e}", path.display())))
}

impl GroupArgs {
    pub fn generators(&self) -> Result<GeneratorSet, Error> {
        match &self.group_json {
            Some(path) => read_json(path),
            None => GeneratorSet::preset_by_name(&self.preset, self.length, self.angle, self.count),
        }
    }

    /// The measure: an explicit JSON measure, or uniform on the generator
    /// alphabet.
    pub fn measure(&self) -> Result<GroupMeasure, Error> {
        match &self.measure_json {
            Some(path) => read_json(path),
            None => GroupMeasure::uniform_on_generators(&self.generators()?),
        }
    }
}

/// Circle-measure source.
#[derive(Args, Clone, Debug, Serialize, Deserialize)]
pub struct NuArgs {
    /// lebesgue | fixed-point | point-mass:<angle> | one-plus-cos | uniform |
    /// empirical:<N> | <path.json>
    #[arg(long, default_value = "lebesgue")]
    pub nu: String,
    /// Grid resolution for density-backed choices
    #[arg(long, default_value_t = 1024)]
    pub grid: usize,
}

impl NuArgs {
    pub fn resolve(&self, mu: &GroupMeasure, seed: u64) -> Result<CircleMeasure, Error> {
        match self.nu.as_str() {
            "lebesgue" => Ok(CircleMeasure::lebesgue()),
            "uniform" => CircleMeasure::grid_from_density(self.grid, |_| 1.0),
            "one-plus-cos" => CircleMeasure::grid_from_density(self.grid, |t| 1.0 + t.cos()),
            "fixed-point" => {
                for (g, _) in mu.atoms() {
                    if let MapClass::Hyperbolic { attracting, .. } = g.classify() {
                        return Ok(CircleMeasure::point_mass(attracting.arg()));
                    }
                }
                Err(Error::Config(
                    "fixed-point needs a hyperbolic atom in the measure".into(),
                ))
            }
            other => {
                if let Some(angle) = other.strip_prefix("point-mass:") {
                    let angle: f64 = angle
                        .parse()
                        .map_err(|e| Error::Config(format!("bad point-mass angle: {e}")))?;
                    return Ok(CircleMeasure::point_mass(angle));
                }
                if let Some(n) = other.strip_prefix("empirical:") {
                    let n: usize = n
                        .parse()
                        .map_err(|e| Error::Config(format!("bad sample count: {e}")))?;
                    let cfg = WalkConfig::with_defaults(mu, seed)?;
                    let (nu, _) = empirical_hitting_measure(&cfg, n)?;
                    return Ok(nu);
                }
                read_json(&PathBuf::from(other))
            }
        }
    }
}

pub fn complex_pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

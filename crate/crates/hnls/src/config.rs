//! Run configuration: a single JSON file with a versioned schema. Unknown
//! keys are rejected and every physical guard is re-checked on load.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::path::Path;

use crate::akns::Reduction;
use crate::asymptotics::{AsymOptions, Convention};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::harness::log_spaced_times;
use crate::pde::EvolutionConfig;
use crate::scattering::InitialDatum;

pub const SCHEMA_VERSION: u32 = 1;

fn default_decay_tol() -> f64 {
    1e-12
}
fn default_dealias() -> f64 {
    2.0 / 3.0
}
fn default_edge_tol() -> Option<f64> {
    Some(1e-6)
}
fn default_mass_tol() -> f64 {
    1e-6
}
fn default_tail() -> f64 {
    1e-8
}
fn default_kind() -> Reduction {
    Reduction::Hnls
}
fn default_convention() -> Convention {
    Convention::A
}
fn default_t_min() -> f64 {
    10.0
}
fn default_xi_margin() -> f64 {
    0.05
}
fn default_ghost_tol() -> f64 {
    1e-4
}
fn default_envelope_window() -> f64 {
    1.3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatumSection {
    /// "sech" or "gaussian"
    pub kind: String,
    pub amplitude: f64,
    pub width: f64,
    #[serde(default)]
    pub center: f64,
    #[serde(default)]
    pub phase: f64,
    pub grid_n: usize,
    pub grid_length: f64,
    #[serde(default = "default_decay_tol")]
    pub decay_tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZGridSection {
    pub min: f64,
    pub max: f64,
    pub nodes: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSection {
    pub n: usize,
    pub length: f64,
    pub dt: f64,
    pub t_final: f64,
    #[serde(default = "default_kind")]
    pub kind: Reduction,
    #[serde(default = "default_dealias")]
    pub dealias_fraction: f64,
    #[serde(default)]
    pub frame_velocity: f64,
    #[serde(default = "default_edge_tol")]
    pub edge_tolerance: Option<f64>,
    #[serde(default = "default_mass_tol")]
    pub mass_tolerance: f64,
    #[serde(default = "default_tail")]
    pub tail_threshold: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaySection {
    pub xi: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub count: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignMapSection {
    pub xi: f64,
    pub window: [f64; 4],
    pub resolution: [usize; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    pub datum: DatumSection,
    pub z_grid: ZGridSection,
    pub evolution: EvolutionSection,
    #[serde(default)]
    pub rays: Vec<RaySection>,
    #[serde(default)]
    pub sign_map: Option<SignMapSection>,
    #[serde(default = "default_convention")]
    pub convention: Convention,
    #[serde(default = "default_t_min")]
    pub asym_t_min: f64,
    #[serde(default = "default_xi_margin")]
    pub xi_margin: f64,
    #[serde(default = "default_ghost_tol")]
    pub ghost_tolerance: f64,
    #[serde(default = "default_envelope_window")]
    pub envelope_window: f64,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    /// Parse and validate a config file; the returned hash (first 12 hex of
    /// SHA-256 over the file bytes) tags every output artifact.
    pub fn load(path: &Path) -> Result<(RunConfig, String)> {
        let bytes = std::fs::read(path)?;
        let mut hasher = Sha256::new();
        hasher.update(&bytes);
        let hash = hex_prefix(&hasher.finalize(), 12);
        let cfg: RunConfig = serde_json::from_slice(&bytes)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok((cfg, hash))
    }

    pub fn from_str_with_hash(text: &str) -> Result<(RunConfig, String)> {
        let mut hasher = Sha256::new();
        hasher.update(text.as_bytes());
        let hash = hex_prefix(&hasher.finalize(), 12);
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok((cfg, hash))
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Config(format!(
                "schema_version {} unsupported (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        match self.datum.kind.as_str() {
            "sech" | "gaussian" => {}
            other => {
                return Err(Error::Config(format!(
                    "datum.kind '{other}' not recognized (sech | gaussian)"
                )))
            }
        }
        if !(self.datum.amplitude.is_finite() && self.datum.width > 0.0) {
            return Err(Error::Config("datum.amplitude/width invalid".into()));
        }
        Grid::new(self.datum.grid_n, self.datum.grid_length)?;
        if !(self.z_grid.min < self.z_grid.max) || self.z_grid.nodes < 16 {
            return Err(Error::Config("z_grid section invalid".into()));
        }
        if self.z_grid.min > -8.0 || self.z_grid.max < 8.0 {
            return Err(Error::Config("z_grid must span at least [-8, 8]".into()));
        }
        self.evolution_config(&[])?.validate()?;
        for ray in &self.rays {
            if !(ray.xi > 2.0 / 3.0 + self.xi_margin) {
                return Err(Error::InvalidRay { xi: ray.xi, min_xi: 2.0 / 3.0 + self.xi_margin });
            }
            if ray.count < 5 {
                return Err(Error::Config("ray.count must be >= 5".into()));
            }
            if !(ray.t_min >= self.asym_t_min) {
                return Err(Error::Config(format!(
                    "ray.t_min {} below asym_t_min {}",
                    ray.t_min, self.asym_t_min
                )));
            }
            if ray.t_max > self.evolution.t_final + 1e-9 {
                return Err(Error::Config(format!(
                    "ray.t_max {} beyond evolution horizon {}",
                    ray.t_max, self.evolution.t_final
                )));
            }
        }
        if let Some(sm) = &self.sign_map {
            if !(sm.window[0] < sm.window[1] && sm.window[2] < sm.window[3]) {
                return Err(Error::Config("sign_map window degenerate".into()));
            }
            if sm.resolution.iter().any(|&r| r < 8) {
                return Err(Error::Config("sign_map resolution too small".into()));
            }
        }
        if !(self.envelope_window > 1.0) {
            return Err(Error::Config("envelope_window must exceed 1".into()));
        }
        Ok(())
    }

    pub fn datum(&self) -> Result<InitialDatum> {
        let grid = Grid::new(self.datum.grid_n, self.datum.grid_length)?;
        let d = &self.datum;
        let mut built = match d.kind.as_str() {
            "sech" => InitialDatum::sech(grid, d.amplitude, d.width, d.center, d.phase)?,
            "gaussian" => InitialDatum::gaussian(grid, d.amplitude, d.width, d.center, d.phase)?,
            other => return Err(Error::Config(format!("datum.kind '{other}'"))),
        };
        built.decay_tol = d.decay_tol;
        built.validate()?;
        Ok(built)
    }

    /// Datum sampled on the evolution grid (same analytic profile).
    pub fn evolution_datum(&self) -> Result<InitialDatum> {
        let grid = Grid::new(self.evolution.n, self.evolution.length)?;
        let d = &self.datum;
        match d.kind.as_str() {
            "sech" => InitialDatum::sech(grid, d.amplitude, d.width, d.center, d.phase),
            "gaussian" => InitialDatum::gaussian(grid, d.amplitude, d.width, d.center, d.phase),
            other => Err(Error::Config(format!("datum.kind '{other}'"))),
        }
    }

    pub fn evolution_config(&self, snapshot_times: &[f64]) -> Result<EvolutionConfig> {
        let grid = Grid::new(self.evolution.n, self.evolution.length)?;
        Ok(EvolutionConfig {
            grid,
            dt: self.evolution.dt,
            t_final: self.evolution.t_final,
            kind: self.evolution.kind,
            dealias_fraction: self.evolution.dealias_fraction,
            snapshot_times: snapshot_times.to_vec(),
            frame_velocity: self.evolution.frame_velocity,
            edge_tolerance: self.evolution.edge_tolerance,
            mass_tolerance: self.evolution.mass_tolerance,
            tail_threshold: self.evolution.tail_threshold,
            stability_bound: 50.0,
        })
    }

    pub fn z_nodes(&self) -> Vec<f64> {
        crate::scattering::uniform_z_grid(self.z_grid.min, self.z_grid.max, self.z_grid.nodes)
    }

    pub fn asym_options(&self) -> AsymOptions {
        AsymOptions {
            convention: self.convention,
            t_min: self.asym_t_min,
            xi_margin: self.xi_margin,
        }
    }

    pub fn ray_times(&self, ray: &RaySection) -> Vec<f64> {
        log_spaced_times(ray.t_min, ray.t_max, ray.count, self.evolution.dt)
    }
}

fn hex_prefix(bytes: &[u8], n: usize) -> String {
    let mut s = String::with_capacity(2 * bytes.len());
    for b in bytes {
        s.push_str(&format!("{b:02x}"));
    }
    s.truncate(n);
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> String {
        r#"{
            "schema_version": 1,
            "datum": {"kind": "sech", "amplitude": 0.3, "width": 1.0, "grid_n": 1024, "grid_length": 60.0},
            "z_grid": {"min": -8.0, "max": 8.0, "nodes": 161},
            "evolution": {"n": 1024, "length": 240.0, "dt": 0.001, "t_final": 30.0},
            "rays": [{"xi": 1.2, "t_min": 10.0, "t_max": 30.0, "count": 9}]
        }"#
        .to_string()
    }

    #[test]
    fn parses_and_hashes() {
        let (cfg, hash) = RunConfig::from_str_with_hash(&minimal_json()).unwrap();
        assert_eq!(cfg.schema_version, 1);
        assert_eq!(hash.len(), 12);
        assert_eq!(cfg.convention, Convention::A);
        // identical text, identical hash
        let (_, h2) = RunConfig::from_str_with_hash(&minimal_json()).unwrap();
        assert_eq!(hash, h2);
    }

    #[test]
    fn rejects_unknown_keys() {
        let bad = minimal_json().replace("\"rays\"", "\"raysx\"");
        let err = RunConfig::from_str_with_hash(&bad).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("raysx"), "error should name the key: {msg}");
    }

    #[test]
    fn rejects_invalid_ray() {
        let bad = minimal_json().replace("\"xi\": 1.2", "\"xi\": 0.5");
        assert!(matches!(
            RunConfig::from_str_with_hash(&bad),
            Err(Error::InvalidRay { .. })
        ));
    }

    #[test]
    fn rejects_wrong_schema_version() {
        let bad = minimal_json().replace("\"schema_version\": 1", "\"schema_version\": 99");
        assert!(RunConfig::from_str_with_hash(&bad).is_err());
    }

    #[test]
    fn rejects_narrow_z_grid() {
        let bad = minimal_json().replace("-8.0", "-4.0");
        assert!(RunConfig::from_str_with_hash(&bad).is_err());
    }

    #[test]
    fn builds_components() {
        let (cfg, _) = RunConfig::from_str_with_hash(&minimal_json()).unwrap();
        let datum = cfg.datum().unwrap();
        assert_eq!(datum.grid.n, 1024);
        let times = cfg.ray_times(&cfg.rays[0]);
        assert!(times.len() >= 8);
        let evo = cfg.evolution_config(&times).unwrap();
        evo.validate().unwrap();
    }
}

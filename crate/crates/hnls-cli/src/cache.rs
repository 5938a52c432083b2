//! Content-addressed, write-once cache for scattering data and evolution
//! snapshots. Keys are derived from the config sections that determine the
//! cached object; a cache hit is trusted verbatim.

use std::path::{Path, PathBuf};

use hnls::config::RunConfig;
use hnls::error::{Error, Result};
use hnls::grid::C64;
use hnls::pde::{read_snapshot_bin, write_snapshot_bin, EvolutionResult, Snapshot};
use hnls::scattering::ScatteringData;
use serde::{Deserialize, Serialize};
use sha_key::section_key;

mod sha_key {
    /// FNV-1a over the canonical JSON of a config section; cheap and stable.
    pub fn section_key(parts: &[String]) -> String {
        let mut h: u64 = 0xcbf29ce484222325;
        for p in parts {
            for b in p.as_bytes() {
                h ^= *b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
            h ^= 0x1f;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }
}

pub fn scattering_key(cfg: &RunConfig) -> String {
    section_key(&[
        serde_json::to_string(&cfg.datum).unwrap(),
        serde_json::to_string(&cfg.z_grid).unwrap(),
    ])
}

pub fn evolution_key(cfg: &RunConfig, times: &[f64]) -> String {
    section_key(&[
        serde_json::to_string(&cfg.datum).unwrap(),
        serde_json::to_string(&cfg.evolution).unwrap(),
        format!("{times:?}"),
    ])
}

pub fn load_scattering(dir: &Path, key: &str) -> Option<ScatteringData> {
    let path = dir.join(format!("scatter_{key}.json"));
    let text = std::fs::read_to_string(path).ok()?;
    let raw: ScatterCache = serde_json::from_str(&text).ok()?;
    Some(raw.into())
}

pub fn store_scattering(dir: &Path, key: &str, data: &ScatteringData) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("scatter_{key}.json"));
    if path.exists() {
        return Ok(()); // write-once
    }
    let raw = ScatterCache::from(data);
    std::fs::write(path, serde_json::to_string(&raw)?)?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct ScatterCache {
    z_grid: Vec<f64>,
    s11: Vec<(f64, f64)>,
    s21: Vec<(f64, f64)>,
    r: Vec<(f64, f64)>,
    sup_norm_r: f64,
    unimodularity_defect: f64,
    max_step_variation: f64,
}

impl From<&ScatteringData> for ScatterCache {
    fn from(d: &ScatteringData) -> Self {
        let pack = |v: &[C64]| v.iter().map(|c| (c.re, c.im)).collect();
        ScatterCache {
            z_grid: d.z_grid.clone(),
            s11: pack(&d.s11),
            s21: pack(&d.s21),
            r: pack(&d.r),
            sup_norm_r: d.sup_norm_r,
            unimodularity_defect: d.unimodularity_defect,
            max_step_variation: d.max_step_variation,
        }
    }
}

impl From<ScatterCache> for ScatteringData {
    fn from(c: ScatterCache) -> Self {
        let unpack = |v: Vec<(f64, f64)>| v.into_iter().map(|(re, im)| C64::new(re, im)).collect();
        ScatteringData {
            z_grid: c.z_grid,
            s11: unpack(c.s11),
            s21: unpack(c.s21),
            r: unpack(c.r),
            sup_norm_r: c.sup_norm_r,
            unimodularity_defect: c.unimodularity_defect,
            max_step_variation: c.max_step_variation,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct EvoMeta {
    frame_velocity: f64,
    times: Vec<f64>,
    mass_trace: Vec<(f64, f64)>,
    tail_trace: Vec<(f64, f64)>,
    edge_trace: Vec<(f64, f64)>,
}

pub fn evolution_dir(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("evolution_{key}"))
}

pub fn load_evolution(dir: &Path, key: &str) -> Option<EvolutionResult> {
    let base = evolution_dir(dir, key);
    let meta: EvoMeta = serde_json::from_str(&std::fs::read_to_string(base.join("meta.json")).ok()?).ok()?;
    let mut snapshots = Vec::new();
    let mut grid = None;
    for (i, &t) in meta.times.iter().enumerate() {
        let f = std::fs::File::open(base.join(format!("snap_{i:04}.bin"))).ok()?;
        let (g, t_read, q) = read_snapshot_bin(std::io::BufReader::new(f)).ok()?;
        if (t_read - t).abs() > 1e-9 {
            return None;
        }
        grid = Some(g);
        snapshots.push(Snapshot { t, q });
    }
    Some(EvolutionResult {
        grid: grid?,
        frame_velocity: meta.frame_velocity,
        snapshots,
        mass_trace: meta.mass_trace,
        tail_trace: meta.tail_trace,
        edge_trace: meta.edge_trace,
    })
}

pub fn store_evolution(dir: &Path, key: &str, evo: &EvolutionResult) -> Result<()> {
    let base = evolution_dir(dir, key);
    if base.join("meta.json").exists() {
        return Ok(()); // write-once
    }
    std::fs::create_dir_all(&base)?;
    for (i, snap) in evo.snapshots.iter().enumerate() {
        let f = std::fs::File::create(base.join(format!("snap_{i:04}.bin")))?;
        write_snapshot_bin(std::io::BufWriter::new(f), evo.grid, snap.t, &snap.q)?;
    }
    let meta = EvoMeta {
        frame_velocity: evo.frame_velocity,
        times: evo.snapshots.iter().map(|s| s.t).collect(),
        mass_trace: evo.mass_trace.clone(),
        tail_trace: evo.tail_trace.clone(),
        edge_trace: evo.edge_trace.clone(),
    };
    std::fs::write(base.join("meta.json"), serde_json::to_string(&meta)?)
        .map_err(Error::from)?;
    Ok(())
}

//! Command-line driver wiring config files to the pipeline.
//!
//! Exit codes: 0 success, 2 config error, 3 numerical-guard failure,
//! 4 validity-region error.

use clap::{Parser, Subcommand};
use std::io::Write as _;
use std::path::PathBuf;

use hnls::asymptotics::{Convention, RayAsymptotics};
use hnls::config::RunConfig;
use hnls::error::Error;
use hnls::harness::{
    self, build_ray_report, compare_along_ray, emit_report, interpretation_notes, trust_window,
    ReportArtifacts, RunReport,
};
use hnls::pde::{evolve, write_snapshot_csv};
use hnls::phase::{require_two_points, sign_map, SignMap};
use hnls::scattering::{check_symmetries, reflection_coefficient, ScatteringData};

mod cache;

#[derive(Parser)]
#[command(name = "hnls", version, about = "higher-order NLS laboratory")]
struct Cli {
    /// Path to the JSON run configuration
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for artifacts
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Rayon thread count (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Override the branch convention from the config (a | b)
    #[arg(long, global = true)]
    convention: Option<String>,

    /// Cache directory for scattering data and evolution snapshots
    #[arg(long, global = true)]
    cache: Option<PathBuf>,

    #[arg(long, global = true)]
    verbose: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute scattering data and symmetry diagnostics
    Scatter,
    /// Evaluate the long-time formula along the configured rays
    Asym,
    /// Run the direct solver and persist snapshots
    Evolve,
    /// Direct evolution vs asymptotics along rays, with report and plots
    Compare,
    /// Export the sign chart of Im theta
    Signmap,
    /// Run the built-in invariant suite
    Selftest,
}

fn main() {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let code = match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}

fn run(cli: &Cli) -> Result<(), Error> {
    match cli.cmd {
        Cmd::Selftest => return cmd_selftest(cli),
        _ => {}
    }
    let (mut cfg, mut hash) = load_config(cli)?;
    if let Some(conv) = &cli.convention {
        let parsed = match conv.as_str() {
            "a" => Convention::A,
            "b" => Convention::B,
            other => return Err(Error::Config(format!("--convention must be a or b, got {other}"))),
        };
        if parsed != cfg.convention {
            cfg.convention = parsed;
            hash = format!("{hash}{parsed}");
        }
    }
    std::fs::create_dir_all(&cli.out)?;
    match cli.cmd {
        Cmd::Scatter => cmd_scatter(cli, &cfg, &hash),
        Cmd::Asym => cmd_asym(cli, &cfg, &hash),
        Cmd::Evolve => cmd_evolve(cli, &cfg, &hash),
        Cmd::Compare => cmd_compare(cli, &cfg, &hash),
        Cmd::Signmap => cmd_signmap(cli, &cfg, &hash),
        Cmd::Selftest => unreachable!(),
    }
}

fn load_config(cli: &Cli) -> Result<(RunConfig, String), Error> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::Config("--config PATH is required".into()))?;
    RunConfig::load(path)
}

fn scattering_for(cli: &Cli, cfg: &RunConfig) -> Result<ScatteringData, Error> {
    let key = cache::scattering_key(cfg);
    if let Some(dir) = &cli.cache {
        if let Some(data) = cache::load_scattering(dir, &key) {
            if cli.verbose {
                eprintln!("scattering: cache hit {key}");
            }
            return Ok(data);
        }
    }
    let datum = cfg.datum()?;
    let data = reflection_coefficient(&datum, &cfg.z_nodes())?;
    if let Some(dir) = &cli.cache {
        cache::store_scattering(dir, &key, &data)?;
    }
    Ok(data)
}

fn cmd_scatter(cli: &Cli, cfg: &RunConfig, hash: &str) -> Result<(), Error> {
    let datum = cfg.datum()?;
    let data = scattering_for(cli, cfg)?;
    let report = check_symmetries(&data, &datum)?;

    let csv_path = cli.out.join(format!("{hash}_scattering.csv"));
    let mut buf = Vec::new();
    data.write_csv(&mut buf)?;
    std::fs::write(&csv_path, buf)?;

    let diag_path = cli.out.join(format!("{hash}_scatter_diagnostics.json"));
    let diag = serde_json::json!({
        "sup_norm_r": data.sup_norm_r,
        "unimodularity_defect": data.unimodularity_defect,
        "max_step_variation": data.max_step_variation,
        "symmetry": report,
        "sobolev_norms": datum.sobolev_norms(),
    });
    std::fs::write(&diag_path, serde_json::to_string_pretty(&diag)?)?;
    println!("wrote {} and {}", csv_path.display(), diag_path.display());
    Ok(())
}

fn cmd_asym(cli: &Cli, cfg: &RunConfig, hash: &str) -> Result<(), Error> {
    if cfg.rays.is_empty() {
        return Err(Error::Config("asym needs at least one ray in the config".into()));
    }
    let data = scattering_for(cli, cfg)?;
    let opts = cfg.asym_options();
    let path = cli.out.join(format!("{hash}_asym.csv"));
    let mut f = std::fs::File::create(&path)?;
    writeln!(f, "x,t,xi,re_q,im_q,abs_q,bound")?;
    for ray_cfg in &cfg.rays {
        let ray = RayAsymptotics::prepare(&data, ray_cfg.xi, &opts)?;
        for t in cfg.ray_times(ray_cfg) {
            let v = ray.eval(t)?;
            writeln!(
                f,
                "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                v.x,
                v.t,
                v.xi,
                v.q.re,
                v.q.im,
                v.q.norm(),
                v.leading_magnitude
            )?;
        }
    }
    println!("wrote {}", path.display());
    Ok(())
}

fn evolution_for(
    cli: &Cli,
    cfg: &RunConfig,
    times: &[f64],
) -> Result<hnls::pde::EvolutionResult, Error> {
    let key = cache::evolution_key(cfg, times);
    if let Some(dir) = &cli.cache {
        if let Some(evo) = cache::load_evolution(dir, &key) {
            if cli.verbose {
                eprintln!("evolution: cache hit {key}");
            }
            return Ok(evo);
        }
    }
    let datum = cfg.evolution_datum()?;
    let evo_cfg = cfg.evolution_config(times)?;
    let evo = evolve(&datum.samples, &evo_cfg)?;
    if let Some(dir) = &cli.cache {
        cache::store_evolution(dir, &key, &evo)?;
    }
    Ok(evo)
}

fn union_ray_times(cfg: &RunConfig) -> Vec<f64> {
    let mut times: Vec<f64> = cfg.rays.iter().flat_map(|r| cfg.ray_times(r)).collect();
    if times.is_empty() {
        times.push(cfg.evolution.t_final);
    }
    times.sort_by(|a, b| a.partial_cmp(b).unwrap());
    times.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    times
}

fn cmd_evolve(cli: &Cli, cfg: &RunConfig, hash: &str) -> Result<(), Error> {
    let times = union_ray_times(cfg);
    let evo = evolution_for(cli, cfg, &times)?;

    let last = evo.snapshots.last().expect("at least one snapshot");
    let csv_path = cli.out.join(format!("{hash}_final_snapshot.csv"));
    let f = std::fs::File::create(&csv_path)?;
    write_snapshot_csv(std::io::BufWriter::new(f), evo.grid, &last.q)?;

    let bin_path = cli.out.join(format!("{hash}_final_snapshot.bin"));
    let f = std::fs::File::create(&bin_path)?;
    hnls::pde::write_snapshot_bin(std::io::BufWriter::new(f), evo.grid, last.t, &last.q)?;

    let diag_path = cli.out.join(format!("{hash}_evolution_diagnostics.json"));
    let diag = serde_json::json!({
        "frame_velocity": evo.frame_velocity,
        "snapshots": evo.snapshots.iter().map(|s| s.t).collect::<Vec<_>>(),
        "mass_trace": evo.mass_trace,
        "tail_trace": evo.tail_trace,
        "edge_trace": evo.edge_trace,
    });
    std::fs::write(&diag_path, serde_json::to_string_pretty(&diag)?)?;
    println!(
        "wrote {}, {}, {}",
        csv_path.display(),
        bin_path.display(),
        diag_path.display()
    );
    Ok(())
}

fn sign_map_for(cfg: &RunConfig) -> Result<(SignMap, Vec<(f64, String)>), Error> {
    let (xi, window, resolution) = if let Some(sm) = &cfg.sign_map {
        (sm.xi, sm.window, sm.resolution)
    } else if let Some(ray) = cfg.rays.first() {
        let ctx = require_two_points(ray.xi, 0.0)?;
        (ray.xi, [ctx.z2 - 1.0, ctx.z1 + 1.0, -1.0, 1.0], [241, 121])
    } else {
        return Err(Error::Config("signmap needs a sign_map section or a ray".into()));
    };
    let map = sign_map(xi, window, resolution);
    let markers = match require_two_points(xi, 0.0) {
        Ok(ctx) => vec![(ctx.z1, "z1".to_string()), (ctx.z2, "z2".to_string())],
        Err(_) => Vec::new(),
    };
    Ok((map, markers))
}

fn cmd_signmap(cli: &Cli, cfg: &RunConfig, hash: &str) -> Result<(), Error> {
    let (map, markers) = sign_map_for(cfg)?;
    let csv_path = cli.out.join(format!("{hash}_signmap.csv"));
    std::fs::write(&csv_path, map.to_csv())?;
    let svg_path = cli.out.join(format!("{hash}_signmap.svg"));
    let marker_refs: Vec<(f64, &str)> = markers.iter().map(|(x, s)| (*x, s.as_str())).collect();
    std::fs::write(
        &svg_path,
        hnls::plot::sign_heatmap(
            &format!("sign Im theta, xi = {}", map.xi),
            &map.xs,
            &map.ys,
            &map.sign,
            &marker_refs,
        ),
    )?;
    println!("wrote {} and {}", csv_path.display(), svg_path.display());
    Ok(())
}

fn cmd_compare(cli: &Cli, cfg: &RunConfig, hash: &str) -> Result<(), Error> {
    if cfg.rays.is_empty() {
        return Err(Error::Config("compare needs at least one ray in the config".into()));
    }
    let datum = cfg.datum()?;
    let data = scattering_for(cli, cfg)?;
    let symmetry = check_symmetries(&data, &datum)?;

    let times = union_ray_times(cfg);
    let evo = evolution_for(cli, cfg, &times)?;
    let evo_datum = cfg.evolution_datum()?;

    let opts = cfg.asym_options();
    let mut rays_out = Vec::new();
    for ray_cfg in &cfg.rays {
        let t_trust = trust_window(
            &evo_datum.samples,
            evo.grid,
            cfg.evolution.frame_velocity,
            ray_cfg.xi,
            cfg.ghost_tolerance,
        );
        let ray = RayAsymptotics::prepare(&data, ray_cfg.xi, &opts)?;
        let t_list = cfg.ray_times(ray_cfg);
        let rows = compare_along_ray(&evo, &ray, &t_list, t_trust)?;
        rays_out.push(build_ray_report(
            ray_cfg.xi,
            cfg.convention,
            t_trust,
            &rows,
            cfg.envelope_window,
        )?);
        if cli.verbose {
            let last = rays_out.last().unwrap();
            eprintln!(
                "xi = {}: slope |q_num| {:.4}, slope err envelope {:.4}",
                ray_cfg.xi, last.fit_abs_q.slope, last.fit_error_envelope.slope
            );
        }
    }

    let report = RunReport {
        schema: hnls::config::SCHEMA_VERSION,
        config_hash: hash.to_string(),
        convention: cfg.convention.to_string(),
        interpretation_notes: interpretation_notes(cfg.convention),
        timestamp: unix_timestamp(),
        scattering: harness::ScatterOut {
            sup_norm_r: data.sup_norm_r,
            unimodularity_defect: data.unimodularity_defect,
            max_step_variation: data.max_step_variation,
            symmetry: Some(symmetry),
        },
        rays: rays_out,
        environment: harness::EnvironmentOut {
            package_version: env!("CARGO_PKG_VERSION").to_string(),
            threads: rayon::current_num_threads(),
        },
    };

    let (map, markers) = sign_map_for(cfg)?;
    let artifacts = ReportArtifacts { scattering: &data, sign_map: &map, markers };
    let written = emit_report(&report, &artifacts, &cli.out)?;
    for p in &written {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn unix_timestamp() -> String {
    let secs = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    format!("{secs}")
}

fn cmd_selftest(_cli: &Cli) -> Result<(), Error> {
    let checks = hnls::harness::selftest();
    let mut failed = 0;
    for c in &checks {
        println!("{} {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
        if !c.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(Error::StabilityGuard(format!("{failed} selftest checks failed")));
    }
    println!("all {} checks passed", checks.len());
    Ok(())
}

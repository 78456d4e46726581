use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use sociable::config::{load_raw, Preset, RawConfig};
use sociable::experiment::{default_sweep_values, run_comparison, run_sweep};
use sociable::metrics::export_sweep;
use sociable::mobility::Directions;
use sociable::parallel::Execution;
use sociable::{Protocol, Scenario, ScenarioConfig, Simulator};

#[derive(Parser)]
#[command(name = "sociable", version, about = "Community-scoped event dissemination simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one protocol and write the per-bucket metrics table
    Run {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value = "metrics.csv")]
        out: PathBuf,
    },
    /// Run both protocols on the same scenario and summarize the difference
    Compare {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// directory for sociable.csv and flooding.csv
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        #[arg(long)]
        sequential: bool,
    },
    /// Sweep the fixed gateway weight
    Sweep {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// comma-separated weights in [0, 1]; defaults to 0.1..0.9
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
        #[arg(long)]
        sequential: bool,
    },
    /// Check a configuration and print it fully resolved
    Validate {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
}

/// Config file plus per-field overrides; flags win over the file.
#[derive(Args)]
struct ConfigArgs {
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<Preset>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    protocol: Option<Protocol>,
    #[arg(long)]
    duration: Option<f64>,
    #[arg(long)]
    mobility_tick: Option<f64>,
    #[arg(long)]
    vehicle_count: Option<usize>,
    #[arg(long)]
    trace: Option<PathBuf>,
    #[arg(long)]
    lanes: Option<u32>,
    #[arg(long, value_parser = parse_directions)]
    directions: Option<Directions>,
    #[arg(long)]
    lane_length: Option<f64>,
    #[arg(long)]
    lane_spacing: Option<f64>,
    #[arg(long)]
    speed_min: Option<f64>,
    #[arg(long)]
    speed_max: Option<f64>,
    #[arg(long)]
    spawn_rate: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    event_x: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    event_y: Option<f64>,
    #[arg(long)]
    event_radius: Option<f64>,
    #[arg(long)]
    event_start: Option<f64>,
    #[arg(long)]
    event_duration: Option<f64>,
    #[arg(long)]
    transmission_range: Option<f64>,
    /// base station as `x,y`; repeat for several
    #[arg(long = "bs", value_parser = parse_point, allow_hyphen_values = true)]
    bs_positions: Vec<[f64; 2]>,
    #[arg(long)]
    relationship_rate: Option<f64>,
    #[arg(long)]
    ttl_initial: Option<u32>,
    #[arg(long)]
    w_ec_min: Option<f64>,
    #[arg(long)]
    w_ec_max: Option<f64>,
    #[arg(long)]
    beacon_period: Option<f64>,
    #[arg(long)]
    monitor_rate: Option<f64>,
    #[arg(long)]
    neighbor_staleness: Option<f64>,
    #[arg(long)]
    snapshot_hops: Option<usize>,
    #[arg(long)]
    hop_latency: Option<f64>,
    #[arg(long)]
    bucket_width: Option<f64>,
}

fn parse_directions(s: &str) -> Result<Directions, String> {
    match s {
        "one-way" => Ok(Directions::OneWay),
        "two-way" => Ok(Directions::TwoWay),
        _ => Err(format!("expected one-way or two-way, got `{s}`")),
    }
}

fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let p = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok([p(x)?, p(y)?])
}

impl ConfigArgs {
    fn resolve(self) -> Result<ScenarioConfig> {
        let base = match &self.config {
            Some(path) => load_raw(path).with_context(|| format!("loading {}", path.display()))?,
            None => RawConfig::default(),
        };
        let flags = RawConfig {
            preset: self.preset,
            seed: self.seed,
            protocol: self.protocol,
            duration: self.duration,
            mobility_tick: self.mobility_tick,
            vehicle_count: self.vehicle_count,
            trace: self.trace,
            lanes: self.lanes,
            directions: self.directions,
            lane_length: self.lane_length,
            lane_spacing: self.lane_spacing,
            speed_min: self.speed_min,
            speed_max: self.speed_max,
            spawn_rate: self.spawn_rate,
            event_x: self.event_x,
            event_y: self.event_y,
            event_radius: self.event_radius,
            event_start: self.event_start,
            event_duration: self.event_duration,
            transmission_range: self.transmission_range,
            bs_positions: (!self.bs_positions.is_empty()).then_some(self.bs_positions),
            relationship_rate: self.relationship_rate,
            ttl_initial: self.ttl_initial,
            w_ec_min: self.w_ec_min,
            w_ec_max: self.w_ec_max,
            beacon_period: self.beacon_period,
            monitor_rate: self.monitor_rate,
            neighbor_staleness: self.neighbor_staleness,
            snapshot_hops: self.snapshot_hops,
            hop_latency: self.hop_latency,
            bucket_width: self.bucket_width,
        };
        Ok(base.overlay(flags).resolve()?)
    }
}

fn exec(sequential: bool) -> Execution {
    if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { cfg, out } => {
            let cfg = cfg.resolve()?;
            let sc = Scenario::from_config(&cfg)?;
            let report = Simulator::new(&sc).run()?;
            report.export(&out)?;
            let t = &report.totals;
            println!(
                "{} seed {}: NGM {} NDM {} EPO {} NCV {} ADD {}",
                cfg.protocol.name(),
                cfg.seed,
                t.ngm,
                t.ndm,
                t.epo,
                t.ncv,
                t.add_ms.map_or("n/a".into(), |a| format!("{a:.1} ms"))
            );
            println!("wrote {}", out.display());
        }
        Command::Compare {
            cfg,
            out_dir,
            sequential,
        } => {
            let cfg = cfg.resolve()?;
            let cmp = run_comparison(&cfg, exec(sequential))?;
            std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
            for (name, r) in [("sociable", &cmp.sociable), ("flooding", &cmp.flooding)] {
                let path = out_dir.join(format!("{name}.csv"));
                r.export(&path)?;
            }
            println!("{}", cmp.summary);
            println!("wrote {}", Path::new(&out_dir).display());
        }
        Command::Sweep {
            cfg,
            values,
            out,
            sequential,
        } => {
            let cfg = cfg.resolve()?;
            let values = if values.is_empty() { default_sweep_values() } else { values };
            let rows = run_sweep(&cfg, &values, exec(sequential))?;
            export_sweep(&rows, &out)?;
            for r in &rows {
                let add = r.add_ms.map_or("n/a".into(), |a| format!("{a:.1} ms"));
                println!("w_ec {:.2}  ADD {add:>10}  NDM {}", r.w_ec, r.ndm);
            }
            println!("wrote {}", out.display());
        }
        Command::Validate { cfg } => {
            let cfg = cfg.resolve()?;
            print!("{}", cfg.to_toml_string());
        }
    }
    Ok(())
}

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use local_racing::harness::{
    changed_keys, generate_track, load_config, parse_grid, plan_debug, run_sweep, simulate, write_sweep_csv, ControllerKind, LapReport,
    Platform, RunLimits, ScanRecorder, SessionEnd, TrackKind, TrackParams, DEFAULT_TIMEOUT,
};
use local_racing::sim::Track;

#[derive(Parser)]
#[command(name = "local-racing", version, about = "Closed-loop racing simulator with a LiDAR-only Stanley stack")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Drive laps on a track and report lap times.
    Run {
        #[arg(long)]
        track: PathBuf,
        #[arg(long, default_value = "stanley")]
        controller: ControllerKind,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 3)]
        laps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TIMEOUT)]
        timeout: f64,
        /// Per-step CSV trace.
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Directory for raw scans, for later use with plan-debug.
        #[arg(long)]
        scan_log: Option<PathBuf>,
        /// Record every n-th scan.
        #[arg(long, default_value_t = 40)]
        scan_every: u64,
    },
    /// Run one session per line of a grid file and tabulate the results.
    Sweep {
        #[arg(long)]
        track: PathBuf,
        #[arg(long, default_value = "stanley")]
        controller: ControllerKind,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 3)]
        laps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_TIMEOUT)]
        timeout: f64,
        /// Run the sessions on all cores.
        #[arg(long)]
        parallel: bool,
    },
    /// Write a generated track file.
    GenTrack {
        #[arg(long)]
        kind: TrackKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Track width in meters; defaults to seven vehicle widths.
        #[arg(long)]
        width: Option<f64>,
        /// Straight length of the corridor layout.
        #[arg(long, default_value_t = 10.0)]
        length: f64,
    },
    /// Replay logged scans through the planner and dump every stage.
    PlanDebug {
        #[arg(long)]
        scan_log: PathBuf,
        /// Accepted for symmetry with `run`; the planner itself has no
        /// tunable keys in the controller file.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn load_track(path: &PathBuf) -> Result<Track> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Track::from_json(&text).with_context(|| format!("parsing {}", path.display()))
}

fn print_report(r: &LapReport) {
    for (i, t) in r.lap_times.iter().enumerate() {
        println!("lap {}: {t:.3} s", i + 1);
    }
    if let Some(m) = r.steady_state_mean() {
        println!("steady-state mean: {m:.3} s");
    }
    println!(
        "distance {:.2} m, time {:.3} s, avg speed {:.3} m/s, collisions {}, completed {}",
        r.total_distance, r.total_time, r.avg_speed, r.collisions, r.completed
    );
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { track, controller, config, laps, seed, timeout, trace, scan_log, scan_every } => {
            let track = load_track(&track)?;
            let cfg = load_config(controller, &config)?;
            let mut trace_file = match &trace {
                Some(p) => Some(std::io::BufWriter::new(
                    std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
                )),
                None => None,
            };
            let mut recorder = match scan_log {
                Some(dir) => Some(ScanRecorder::new(dir, scan_every)?),
                None => None,
            };
            let report = simulate(
                &track,
                &cfg,
                &Platform::default(),
                &RunLimits { laps, seed, timeout },
                trace_file.as_mut().map(|w| w as &mut dyn std::io::Write),
                recorder.as_mut(),
            )?;
            print_report(&report);
            Ok(match report.end {
                SessionEnd::Completed => ExitCode::SUCCESS,
                SessionEnd::Collision => ExitCode::from(2),
                SessionEnd::Timeout => {
                    eprintln!("timed out after {timeout} s");
                    ExitCode::from(1)
                }
            })
        }
        Command::Sweep { track, controller, config, grid, out, laps, seed, timeout, parallel } => {
            let track = load_track(&track)?;
            let base = load_config(controller, &config)?;
            let text = std::fs::read_to_string(&grid).with_context(|| format!("reading {}", grid.display()))?;
            let sets = parse_grid(&text)?;
            let rows = run_sweep(&base, &sets, &track, &Platform::default(), &RunLimits { laps, seed, timeout }, parallel)?;
            let file = std::fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            write_sweep_csv(file, &changed_keys(&base, &sets), &rows)?;
            for row in &rows {
                let mean = row.report.steady_state_mean().map_or("-".into(), |m| format!("{m:.3}"));
                println!("setting {}: mean lap {mean} s, completed {}", row.setting_id, row.report.completed);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::GenTrack { kind, seed, out, width, length } => {
            if let Some(w) = width {
                if !(w > 0.0) {
                    bail!("width must be positive");
                }
            }
            let params = TrackParams { width, straight_length: length, ..Default::default() };
            let track = generate_track(kind, seed, &params)?;
            std::fs::write(&out, track.to_json()).with_context(|| format!("writing {}", out.display()))?;
            println!("{}: {} vertices, {:.2} m", track.name, track.len(), track.length());
            Ok(ExitCode::SUCCESS)
        }
        Command::PlanDebug { scan_log, config, out } => {
            if let Some(c) = &config {
                load_config(ControllerKind::Stanley, c)?;
            }
            let summary = plan_debug(&scan_log, &Platform::default().planner, &out)?;
            println!("planned {} scans", summary.planned);
            for (name, err) in &summary.failed {
                println!("{name}: {err}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

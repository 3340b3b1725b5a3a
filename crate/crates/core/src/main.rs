use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::net::IpAddr;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::mpsc;

use clap::{Parser, Subcommand};
use flagella_sim::ballast::calibrate;
use flagella_sim::mixer::{mix, steady_state_wrench, ManeuverCommand};
use flagella_sim::sim::{self, CommandTimeline, ScenarioConfig, ServeOptions, Simulation};
use flagella_sim::Result;

#[derive(Parser)]
#[command(version, about = "Twelve-flagella underwater robot simulator")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a scripted scenario and write the trajectory log.
    Run {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print neutral ballast and the closest inventory pick.
    Calibrate { config: PathBuf },
    /// Print the pair duties for a surge/yaw request.
    Mix {
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        surge: f64,
        #[arg(long, allow_hyphen_values = true)]
        yaw: f64,
        /// Also print the allocation table.
        #[arg(long)]
        table: bool,
    },
    /// Run in real time and accept pilot commands until interrupted.
    Serve {
        config: PathBuf,
        #[arg(long, default_value_t = 7878)]
        port: u16,
        /// Telemetry rate in Hz, 1 to 100.
        #[arg(long, default_value_t = 20.0)]
        rate: f64,
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
        /// Write the command timeline here.
        #[arg(long)]
        record: Option<PathBuf>,
    },
    /// Re-run a recorded session timeline in batch.
    Replay {
        config: PathBuf,
        #[arg(long)]
        timeline: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Prints to stdout; a closed pipe (e.g. `| head`) is not an error.
fn emit(text: &str) -> Result<()> {
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Run { config, out } => {
            let cfg = ScenarioConfig::load(config)?;
            let traj = sim::run_scenario(&cfg)?;
            traj.write_to(BufWriter::new(File::create(&out)?))?;
            eprintln!("wrote {} frames to {}", traj.frames.len(), out.display());
        }
        Cmd::Calibrate { config } => {
            let cfg = ScenarioConfig::load(config)?;
            let report = calibrate(&cfg.robot, &cfg.inventory())?;
            emit(&serde_json::to_string_pretty(&report)?)?;
        }
        Cmd::Mix { config, surge, yaw, table } => {
            let cfg = ScenarioConfig::load(config)?;
            let sim = Simulation::new(&cfg)?;
            let cmd = ManeuverCommand::clamped(surge, yaw);
            let duties = mix(&cmd, sim.allocation());
            let thrust = cfg.thrust_model.prepare()?;
            let w = steady_state_wrench(&duties, sim.mounts(), &thrust, &cfg.motors);
            let out = serde_json::json!({
                "surge": cmd.surge,
                "yaw": cmd.yaw,
                "pair_duties": duties.as_array(),
                "steady_force_n": [w.force.x, w.force.y, w.force.z],
                "steady_torque_n_m": [w.torque.x, w.torque.y, w.torque.z],
            });
            emit(&serde_json::to_string_pretty(&out)?)?;
            if table {
                emit(&sim.allocation().to_json())?;
            }
        }
        Cmd::Serve { config, port, rate, bind, record } => {
            let cfg = ScenarioConfig::load(config)?;
            let opts = ServeOptions { bind, port, telemetry_rate_hz: rate, record };
            let server = sim::serve(&cfg, &opts)?;
            eprintln!("listening on {} (plain TCP and WebSocket), Ctrl-C to stop", server.local_addr());
            let (tx, rx) = mpsc::channel();
            ctrlc::set_handler(move || {
                let _ = tx.send(());
            })
            .map_err(|e| std::io::Error::other(e.to_string()))?;
            let _ = rx.recv();
            let record = server.shutdown();
            eprintln!(
                "stopped at step {} with {} pilot events",
                record.timeline.end_step().unwrap_or(0),
                record.timeline.events.len()
            );
            if let Some(err) = record.error {
                eprintln!("simulation stopped early: {err}");
            }
        }
        Cmd::Replay { config, timeline, out } => {
            let cfg = ScenarioConfig::load(config)?;
            let tl = CommandTimeline::read_from(BufReader::new(File::open(timeline)?))?;
            let traj = sim::replay(&cfg, &tl)?;
            traj.write_to(BufWriter::new(File::create(&out)?))?;
            eprintln!("wrote {} frames to {}", traj.frames.len(), out.display());
        }
    }
    Ok(())
}

//! A scripted pilot drives the live server over plain TCP, then the recorded
//! timeline is replayed in batch and compared with what was streamed.
//!
//! `cargo run --release --example pilot_session`

use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::Duration;

use flagella_sim::sim::{replay, serve, ScenarioConfig, ServeOptions};

fn main() -> flagella_sim::Result<()> {
    let cfg = ScenarioConfig::default();
    let server = serve(&cfg, &ServeOptions { port: 0, telemetry_rate_hz: 10.0, ..ServeOptions::default() })?;
    println!("server on {}", server.local_addr());

    let mut link = TcpStream::connect(server.local_addr())?;
    let latest = Arc::new(Mutex::new(String::new()));
    let reader = {
        let latest = latest.clone();
        let stream = link.try_clone()?;
        thread::spawn(move || {
            for line in BufReader::new(stream).lines().map_while(Result::ok) {
                if line.starts_with(r#"{"type":"err""#) {
                    println!("< {line}");
                } else {
                    *latest.lock().unwrap() = line;
                }
            }
        })
    };
    let script = [
        r#"{"type":"cmd","surge":0.8,"yaw":0}"#,
        r#"{"type":"cmd","surge":0.3,"yaw":0.5}"#,
        r#"{"type":"mode","value":"heading_hold","setpoint_deg":-20}"#,
        r#"{"type":"cmd","surge":2.0,"yaw":0}"#,
        "this is not json",
    ];
    for msg in script {
        println!("> {msg}");
        writeln!(link, "{msg}")?;
        thread::sleep(Duration::from_millis(600));
        let line = latest.lock().unwrap().clone();
        let shown: String = line.chars().take(100).collect();
        println!("< {shown}{}", if line.len() > 100 { " ..." } else { "" });
    }
    link.shutdown(std::net::Shutdown::Both)?;
    let _ = reader.join();
    thread::sleep(Duration::from_millis(300));

    let record = server.shutdown();
    println!(
        "session: {} frames, {} events, ended at step {:?}",
        record.frames.len(),
        record.timeline.events.len(),
        record.timeline.end_step()
    );
    let batch = replay(&cfg, &record.timeline)?;
    let worst = batch
        .frames
        .iter()
        .zip(&record.frames)
        .map(|(a, b)| a.max_state_deviation(b))
        .fold(0.0, f64::max);
    println!("batch replay: {} frames, worst state deviation {worst:.1e}", batch.frames.len());
    Ok(())
}

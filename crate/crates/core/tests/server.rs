use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::thread;
use std::time::{Duration, Instant};

use serde_json::Value;

use flagella_sim::mixer::{mix, ManeuverCommand};
use flagella_sim::sim::{replay, serve, CommandTimeline, PilotEvent, ScenarioConfig, ServeOptions, Simulation};

fn options(rate: f64) -> ServeOptions {
    ServeOptions { port: 0, telemetry_rate_hz: rate, ..ServeOptions::default() }
}

struct Client {
    out: TcpStream,
    lines: BufReader<TcpStream>,
}

impl Client {
    fn connect(addr: std::net::SocketAddr) -> Self {
        let out = TcpStream::connect(addr).unwrap();
        out.set_read_timeout(Some(Duration::from_secs(2))).unwrap();
        let lines = BufReader::new(out.try_clone().unwrap());
        Client { out, lines }
    }

    fn send(&mut self, text: &str) {
        self.out.write_all(text.as_bytes()).unwrap();
    }

    fn next(&mut self) -> Value {
        let mut line = String::new();
        self.lines.read_line(&mut line).unwrap();
        serde_json::from_str(&line).unwrap_or_else(|e| panic!("{e}: {line:?}"))
    }

    /// Reads until a message satisfies `pred`, giving up after `limit`.
    fn wait_for(&mut self, limit: Duration, pred: impl Fn(&Value) -> bool) -> Value {
        let deadline = Instant::now() + limit;
        loop {
            let msg = self.next();
            if pred(&msg) {
                return msg;
            }
            assert!(Instant::now() < deadline, "no matching message, last {msg}");
        }
    }
}

fn duties(msg: &Value) -> Vec<f64> {
    msg["pair_duties"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect()
}

fn is_state(msg: &Value) -> bool {
    msg["type"] == "state"
}

#[test]
fn surge_command_shows_up_as_mixed_duties() {
    let cfg = ScenarioConfig::default();
    let expected = mix(&ManeuverCommand { surge: 0.5, yaw: 0.0 }, Simulation::new(&cfg).unwrap().allocation());
    let server = serve(&cfg, &options(50.0)).unwrap();
    let mut c = Client::connect(server.local_addr());
    c.send("{\"type\":\"cmd\",\"surge\":0.5,\"yaw\":0}\n");
    c.wait_for(Duration::from_secs(2), |m| is_state(m) && m["surge"] == 0.5);
    // The acknowledging frame still carries the duties that produced it.
    let msg = c.wait_for(Duration::from_secs(1), is_state);
    assert_eq!(duties(&msg), expected.as_array().to_vec());
    assert_eq!(msg["mode"], "open_loop");
    server.shutdown();
}

#[test]
fn out_of_range_commands_are_clamped_and_acknowledged() {
    let server = serve(&ScenarioConfig::default(), &options(50.0)).unwrap();
    let mut c = Client::connect(server.local_addr());
    c.send("{\"type\":\"cmd\",\"surge\":2.5,\"yaw\":-7}\n");
    let msg = c.wait_for(Duration::from_secs(2), |m| is_state(m) && m["surge"] != 0.0);
    assert_eq!(msg["surge"], 1.0);
    assert_eq!(msg["yaw"], -1.0);
    server.shutdown();
}

#[test]
fn malformed_input_gets_an_error_and_the_link_survives() {
    let server = serve(&ScenarioConfig::default(), &options(50.0)).unwrap();
    let mut c = Client::connect(server.local_addr());
    for bad in ["not json", "{\"type\":\"cmd\",\"surge\":0.1}", "{\"type\":\"warp\"}", "{\"type\":\"mode\",\"value\":\"heading_hold\"}"] {
        c.send(&format!("{bad}\n"));
        let err = c.wait_for(Duration::from_secs(2), |m| m["type"] == "err");
        assert!(err["msg"].as_str().is_some_and(|s| !s.is_empty()));
    }
    c.send("{\"type\":\"mode\",\"value\":\"heading_hold\",\"setpoint_deg\":30}\n");
    c.wait_for(Duration::from_secs(2), |m| is_state(m) && m["mode"] == "heading_hold");
    server.shutdown();
}

#[test]
fn later_command_in_one_interval_wins() {
    let server = serve(&ScenarioConfig::default(), &options(2.0)).unwrap();
    let mut c = Client::connect(server.local_addr());
    c.next();
    c.send("{\"type\":\"cmd\",\"surge\":0.3,\"yaw\":0}\n{\"type\":\"cmd\",\"surge\":-0.6,\"yaw\":0.1}\n");
    let msg = c.wait_for(Duration::from_secs(3), is_state);
    assert_eq!(msg["surge"], -0.6);
    assert_eq!(msg["yaw"], 0.1);
    let record = server.shutdown();
    let last = record.timeline.events.iter().rev().find_map(|e| match e.event {
        PilotEvent::Cmd { surge, yaw } => Some((surge, yaw)),
        _ => None,
    });
    assert_eq!(last, Some((-0.6, 0.1)));
}

#[test]
fn commands_fade_to_zero_after_disconnect() {
    let server = serve(&ScenarioConfig::default(), &options(50.0)).unwrap();
    let mut c = Client::connect(server.local_addr());
    c.send("{\"type\":\"cmd\",\"surge\":1,\"yaw\":1}\n");
    c.wait_for(Duration::from_secs(2), |m| is_state(m) && m["surge"] == 1.0);
    drop(c);
    thread::sleep(Duration::from_millis(1400));
    let record = server.shutdown();
    let dropped = record
        .timeline
        .events
        .iter()
        .find(|e| e.event == PilotEvent::Link { connected: false })
        .expect("disconnect recorded")
        .step;
    let dt = record.timeline.header.dt_s;
    let late: Vec<_> = record.frames.iter().filter(|f| f.t >= (dropped as f64) * dt + 1.0).collect();
    assert!(!late.is_empty());
    assert!(late.iter().all(|f| f.pair_duties == [0.0; 6]));
}

#[test]
fn websocket_clients_share_the_port() {
    let server = serve(&ScenarioConfig::default(), &options(50.0)).unwrap();
    let (mut ws, _) = tungstenite::connect(format!("ws://{}/", server.local_addr())).unwrap();
    ws.send(tungstenite::Message::Text("{\"type\":\"cmd\",\"surge\":0,\"yaw\":0.4}".into())).unwrap();
    let deadline = Instant::now() + Duration::from_secs(2);
    loop {
        let text = ws.read().unwrap().into_text().unwrap();
        let msg: Value = serde_json::from_str(&text).unwrap();
        if is_state(&msg) && msg["yaw"] == 0.4 {
            break;
        }
        assert!(Instant::now() < deadline);
    }
    ws.send(tungstenite::Message::Text("{bad".into())).unwrap();
    loop {
        let msg: Value = serde_json::from_str(&ws.read().unwrap().into_text().unwrap()).unwrap();
        if msg["type"] == "err" {
            break;
        }
    }
    let _ = ws.close(None);
    server.shutdown();
}

#[test]
fn busy_port_fails_at_startup() {
    let holder = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = holder.local_addr().unwrap().port();
    let opts = ServeOptions { port, ..options(20.0) };
    assert!(serve(&ScenarioConfig::default(), &opts).is_err());
}

#[test]
fn rate_outside_range_is_refused() {
    for rate in [0.5, 101.0, f64::NAN] {
        assert!(serve(&ScenarioConfig::default(), &options(rate)).is_err());
    }
}

#[test]
fn sidecar_timeline_replays_the_session() {
    let cfg = ScenarioConfig::default();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("session.jsonl");
    let server = serve(&cfg, &ServeOptions { record: Some(path.clone()), ..options(50.0) }).unwrap();
    let mut c = Client::connect(server.local_addr());
    c.send("{\"type\":\"cmd\",\"surge\":0.7,\"yaw\":-0.2}\n");
    c.wait_for(Duration::from_secs(2), |m| is_state(m) && m["surge"] == 0.7);
    c.send("{\"type\":\"mode\",\"value\":\"heading_hold\",\"setpoint_deg\":-15}\n");
    thread::sleep(Duration::from_millis(300));
    drop(c);
    thread::sleep(Duration::from_millis(100));
    let record = server.shutdown();
    assert!(record.error.is_none());

    let timeline = CommandTimeline::read_from(BufReader::new(std::fs::File::open(&path).unwrap())).unwrap();
    assert_eq!(timeline.events, record.timeline.events);
    let batch = replay(&cfg, &timeline).unwrap();
    assert_eq!(batch.frames.len(), record.frames.len());
    for (a, b) in batch.frames.iter().zip(&record.frames) {
        assert!(a.max_state_deviation(b) <= 1e-9);
    }
}

//! Real-time telemetry and command server.
//!
//! One thread owns the simulation. Network threads write into a single-slot
//! mailbox that the stepping thread drains once per step, and frames go out
//! through bounded per-client channels so a slow reader only loses frames.
//! Plain TCP clients and browser WebSocket clients share the port; the first
//! bytes of a connection decide which one it is.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::net::{IpAddr, Ipv4Addr, Shutdown, SocketAddr, TcpListener, TcpStream};
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::mpsc::{sync_channel, Receiver, SyncSender, TryRecvError, TrySendError};
use std::sync::{Arc, Mutex, MutexGuard};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use tungstenite::Message;

use crate::error::{Result, SimError};
use crate::mixer::ManeuverCommand;

use super::config::ScenarioConfig;
use super::session::Simulation;
use super::telemetry::{
    error_message, state_message, ClientMessage, CommandTimeline, ControlMode, ModeName,
    PilotEvent, TelemetryFrame, TimedEvent,
};

const CLIENT_QUEUE: usize = 16;
const SNIFF_WINDOW: Duration = Duration::from_millis(200);
const POLL: Duration = Duration::from_millis(20);

#[derive(Debug, Clone, PartialEq)]
pub struct ServeOptions {
    pub bind: IpAddr,
    /// 0 picks a free port.
    pub port: u16,
    pub telemetry_rate_hz: f64,
    /// Sidecar file for the command timeline, written as events happen.
    pub record: Option<PathBuf>,
}

impl Default for ServeOptions {
    fn default() -> Self {
        Self {
            bind: IpAddr::V4(Ipv4Addr::LOCALHOST),
            port: 7878,
            telemetry_rate_hz: 20.0,
            record: None,
        }
    }
}

/// What a finished live session leaves behind.
#[derive(Debug, Clone)]
pub struct SessionRecord {
    pub timeline: CommandTimeline,
    /// Every published frame, in step order.
    pub frames: Vec<TelemetryFrame>,
    /// Set if the stepping thread stopped on an error.
    pub error: Option<String>,
}

#[derive(Default)]
struct Mailbox {
    command: Option<ManeuverCommand>,
    mode: Option<ControlMode>,
}

struct Shared {
    mailbox: Mutex<Mailbox>,
    clients: Mutex<Vec<(u64, SyncSender<Arc<str>>)>>,
    client_count: AtomicUsize,
    next_id: AtomicU64,
    stop: AtomicBool,
}

fn lock<T>(m: &Mutex<T>) -> MutexGuard<'_, T> {
    m.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

impl Shared {
    fn post(&self, msg: ClientMessage) {
        let mut mb = lock(&self.mailbox);
        match msg {
            ClientMessage::Cmd { surge, yaw } => mb.command = Some(ManeuverCommand::clamped(surge, yaw)),
            ClientMessage::Mode { value: ModeName::OpenLoop, .. } => mb.mode = Some(ControlMode::OpenLoop),
            ClientMessage::Mode { value: ModeName::HeadingHold, setpoint_deg } => {
                mb.mode = Some(ControlMode::HeadingHold { setpoint_deg: setpoint_deg.unwrap_or(0.0) })
            }
        }
    }

    /// Handles one inbound line; returns an error reply for malformed input.
    fn handle_line(&self, line: &str) -> Option<String> {
        if line.trim().is_empty() {
            return None;
        }
        match ClientMessage::parse(line) {
            Ok(msg) => {
                self.post(msg);
                None
            }
            Err(e) => Some(error_message(&e)),
        }
    }

    fn register(&self) -> (u64, Receiver<Arc<str>>, SyncSender<Arc<str>>) {
        let (tx, rx) = sync_channel(CLIENT_QUEUE);
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        lock(&self.clients).push((id, tx.clone()));
        self.client_count.fetch_add(1, Ordering::SeqCst);
        (id, rx, tx)
    }

    fn unregister(&self, id: u64) {
        lock(&self.clients).retain(|(cid, _)| *cid != id);
        self.client_count.fetch_sub(1, Ordering::SeqCst);
    }

    fn broadcast(&self, line: Arc<str>) {
        lock(&self.clients).retain(|(_, tx)| match tx.try_send(line.clone()) {
            Ok(()) | Err(TrySendError::Full(_)) => true,
            Err(TrySendError::Disconnected(_)) => false,
        });
    }
}

pub struct ServerHandle {
    addr: SocketAddr,
    shared: Arc<Shared>,
    stepper: Option<JoinHandle<SessionRecord>>,
    acceptor: Option<JoinHandle<()>>,
}

impl ServerHandle {
    pub fn local_addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn client_count(&self) -> usize {
        self.shared.client_count.load(Ordering::SeqCst)
    }

    /// Stops the simulation, closes the timeline with an `end` event and
    /// returns the session.
    pub fn shutdown(mut self) -> SessionRecord {
        self.stop()
    }

    fn stop(&mut self) -> SessionRecord {
        self.shared.stop.store(true, Ordering::SeqCst);
        if let Some(a) = self.acceptor.take() {
            let _ = a.join();
        }
        match self.stepper.take().map(JoinHandle::join) {
            Some(Ok(record)) => record,
            _ => SessionRecord {
                timeline: CommandTimeline::new(String::new(), 0.0, 1),
                frames: Vec::new(),
                error: Some("stepping thread panicked".into()),
            },
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        if self.stepper.is_some() {
            self.stop();
        }
    }
}

/// Telemetry decimation for a publish rate; the rate must lie in [1, 100] Hz.
pub fn telemetry_decimation(dt: f64, rate_hz: f64) -> Result<u32> {
    if !(1.0..=100.0).contains(&rate_hz) {
        return Err(SimError::config("rate", "telemetry rate must lie in [1, 100] Hz"));
    }
    Ok(((1.0 / (rate_hz * dt)).round() as u32).max(1))
}

/// Starts the live server and returns once the port is bound.
pub fn serve(cfg: &ScenarioConfig, opts: &ServeOptions) -> Result<ServerHandle> {
    let decimation = telemetry_decimation(cfg.dt, opts.telemetry_rate_hz)?;
    let sim = Simulation::new(cfg)?;
    let mut timeline = CommandTimeline::new(cfg.hash(), cfg.dt, decimation);
    let mut sidecar = match &opts.record {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            serde_json::to_writer(&mut w, &timeline.header)?;
            w.write_all(b"\n")?;
            w.flush()?;
            Some(w)
        }
        None => None,
    };

    let listener = TcpListener::bind((opts.bind, opts.port))?;
    listener.set_nonblocking(true)?;
    let addr = listener.local_addr()?;
    let shared = Arc::new(Shared {
        mailbox: Mutex::new(Mailbox::default()),
        clients: Mutex::new(Vec::new()),
        client_count: AtomicUsize::new(0),
        next_id: AtomicU64::new(0),
        stop: AtomicBool::new(false),
    });

    let acceptor = {
        let shared = shared.clone();
        thread::spawn(move || accept_loop(listener, shared))
    };
    let stepper = {
        let shared = shared.clone();
        thread::spawn(move || {
            let mut frames = Vec::new();
            let error = step_loop(sim, &shared, decimation, &mut timeline, &mut sidecar, &mut frames)
                .err()
                .map(|e| e.to_string());
            SessionRecord { timeline, frames, error }
        })
    };
    Ok(ServerHandle { addr, shared, stepper: Some(stepper), acceptor: Some(acceptor) })
}

fn record_event(
    timeline: &mut CommandTimeline,
    sidecar: &mut Option<BufWriter<File>>,
    step: u64,
    event: PilotEvent,
) -> Result<()> {
    let e = TimedEvent { step, event };
    if let Some(w) = sidecar {
        serde_json::to_writer(&mut *w, &e)?;
        w.write_all(b"\n")?;
        w.flush()?;
    }
    timeline.events.push(e);
    Ok(())
}

fn step_loop(
    mut sim: Simulation,
    shared: &Shared,
    decimation: u32,
    timeline: &mut CommandTimeline,
    sidecar: &mut Option<BufWriter<File>>,
    frames: &mut Vec<TelemetryFrame>,
) -> Result<()> {
    let dt = sim.config().dt;
    let decimation = u64::from(decimation);
    let start = Instant::now();
    let outcome = loop {
        if shared.stop.load(Ordering::SeqCst) {
            break Ok(());
        }
        let due = (start.elapsed().as_secs_f64() / dt) as u64;
        let mut failed = None;
        while sim.step_index() < due {
            if let Err(e) = one_step(&mut sim, shared, decimation, timeline, sidecar, frames) {
                failed = Some(e);
                break;
            }
        }
        if let Some(e) = failed {
            break Err(e);
        }
        let next_due = Duration::from_secs_f64((sim.step_index() + 1) as f64 * dt);
        thread::sleep(next_due.saturating_sub(start.elapsed()).min(Duration::from_millis(2)));
    };
    let step = sim.step_index();
    if step.is_multiple_of(decimation) {
        frames.push(sim.frame());
    }
    record_event(timeline, sidecar, step, PilotEvent::End)?;
    outcome
}

fn one_step(
    sim: &mut Simulation,
    shared: &Shared,
    decimation: u64,
    timeline: &mut CommandTimeline,
    sidecar: &mut Option<BufWriter<File>>,
    frames: &mut Vec<TelemetryFrame>,
) -> Result<()> {
    let step = sim.step_index();
    let mut events = Vec::new();
    let connected = shared.client_count.load(Ordering::SeqCst) > 0;
    if connected != sim.link_up() {
        events.push(PilotEvent::Link { connected });
    }
    {
        let mut mb = lock(&shared.mailbox);
        if let Some(mode) = mb.mode.take() {
            events.push(PilotEvent::mode(mode));
        }
        if let Some(cmd) = mb.command.take() {
            events.push(PilotEvent::command(cmd));
        }
    }
    for event in events {
        sim.apply(&event);
        record_event(timeline, sidecar, step, event)?;
    }
    if step.is_multiple_of(decimation) {
        let frame = sim.frame();
        shared.broadcast(state_message(&frame, &sim.command(), sim.mode().name()).into());
        frames.push(frame);
    }
    sim.step()
}

fn accept_loop(listener: TcpListener, shared: Arc<Shared>) {
    while !shared.stop.load(Ordering::SeqCst) {
        match listener.accept() {
            Ok((stream, _)) => {
                let shared = shared.clone();
                thread::spawn(move || {
                    let _ = handle_connection(stream, &shared);
                });
            }
            Err(e) if e.kind() == io::ErrorKind::WouldBlock => thread::sleep(POLL),
            Err(_) => thread::sleep(POLL),
        }
    }
}

fn is_timeout(e: &io::Error) -> bool {
    matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut)
}

/// Waits briefly for the first bytes; an HTTP GET means a WebSocket upgrade.
fn looks_like_http(stream: &TcpStream) -> io::Result<bool> {
    let deadline = Instant::now() + SNIFF_WINDOW;
    let mut buf = [0u8; 4];
    stream.set_read_timeout(Some(Duration::from_millis(10)))?;
    loop {
        match stream.peek(&mut buf) {
            Ok(0) => return Ok(false),
            Ok(n) if n >= 4 || !b"GET ".starts_with(&buf[..n]) => return Ok(&buf[..n] == b"GET "),
            Ok(_) => {}
            Err(e) if is_timeout(&e) => {}
            Err(e) => return Err(e),
        }
        if Instant::now() >= deadline {
            return Ok(false);
        }
        thread::sleep(Duration::from_millis(2));
    }
}

fn handle_connection(stream: TcpStream, shared: &Arc<Shared>) -> io::Result<()> {
    stream.set_nonblocking(false)?;
    stream.set_nodelay(true)?;
    if looks_like_http(&stream)? {
        stream.set_read_timeout(Some(Duration::from_secs(5)))?;
        let ws = tungstenite::accept(stream).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))?;
        serve_websocket(ws, shared);
        Ok(())
    } else {
        serve_plain(stream, shared)
    }
}

fn serve_plain(stream: TcpStream, shared: &Arc<Shared>) -> io::Result<()> {
    let (id, rx, reply) = shared.register();
    let mut out = stream.try_clone()?;
    let writer = thread::spawn(move || {
        for line in rx {
            if out.write_all(line.as_bytes()).and_then(|_| out.write_all(b"\n")).is_err() {
                break;
            }
        }
    });

    stream.set_read_timeout(Some(POLL))?;
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut buf = Vec::new();
    while !shared.stop.load(Ordering::SeqCst) {
        match reader.read_until(b'\n', &mut buf) {
            Ok(0) => break,
            Ok(_) if buf.ends_with(b"\n") => {
                if let Some(err) = shared.handle_line(&String::from_utf8_lossy(&buf)) {
                    let _ = reply.send(err.into());
                }
                buf.clear();
            }
            Ok(_) => {}
            Err(e) if is_timeout(&e) => {}
            Err(_) => break,
        }
    }
    shared.unregister(id);
    drop(reply);
    let _ = stream.shutdown(Shutdown::Both);
    let _ = writer.join();
    Ok(())
}

fn serve_websocket(mut ws: tungstenite::WebSocket<TcpStream>, shared: &Arc<Shared>) {
    let (id, rx, _reply) = shared.register();
    let _ = ws.get_ref().set_read_timeout(Some(Duration::from_millis(5)));
    'session: while !shared.stop.load(Ordering::SeqCst) {
        loop {
            match rx.try_recv() {
                Ok(line) => {
                    if ws.send(Message::Text(line.to_string())).is_err() {
                        break 'session;
                    }
                }
                Err(TryRecvError::Empty) => break,
                Err(TryRecvError::Disconnected) => break 'session,
            }
        }
        match ws.read() {
            Ok(Message::Text(text)) => {
                for line in text.lines() {
                    if let Some(err) = shared.handle_line(line) {
                        if ws.send(Message::Text(err)).is_err() {
                            break 'session;
                        }
                    }
                }
            }
            Ok(Message::Close(_)) => break,
            Ok(_) => {}
            Err(tungstenite::Error::Io(e)) if is_timeout(&e) => {}
            Err(_) => break,
        }
    }
    shared.unregister(id);
    let _ = ws.close(None);
    let _ = ws.flush();
}

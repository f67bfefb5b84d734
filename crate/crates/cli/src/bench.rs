//! Timing table over algorithm variants and orders.
//!
//! Every cell runs in a child process (`isochron bench-cell`) so that a cell
//! can be stopped on timeout or when its resident set exceeds the memory cap
//! without taking the harness down. The child times only the condition
//! computation and prints its result; the parent polls `/proc/<pid>/status`.

use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use isochron_core::conditions::{run_variant, ConditionRecord, RunOptions, Variant};
use isochron_core::lienard::LienardSystem;
use serde::{Deserialize, Serialize};

use crate::commands::{CliError, UrabeSource};

pub const DEFAULT_MEM_CAP: u64 = 4 << 30;
pub const MEM_CAP_ENV: &str = "ISOCHRON_MEM_CAP";
const POLL: Duration = Duration::from_millis(5);

/// What the child prints on stdout.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CellOutput {
    pub micros: u64,
    pub peak_rss_bytes: Option<u64>,
    pub record: ConditionRecord,
}

/// Body of `bench-cell`: one timed computation in the current process.
pub fn run_cell_here(
    sys: &LienardSystem,
    m: usize,
    variant: Variant,
    urabe: &UrabeSource,
) -> Result<CellOutput, CliError> {
    let h = urabe.series(m);
    let start = Instant::now();
    let trace = run_variant(sys, &h, m, variant, &RunOptions::default())?;
    let micros = start.elapsed().as_micros() as u64;
    Ok(CellOutput {
        micros,
        peak_rss_bytes: proc_status_kb("self", "VmHWM:").map(|kb| kb * 1024),
        record: trace.set.to_record(),
    })
}

fn proc_status_kb(pid: &str, key: &str) -> Option<u64> {
    let text = std::fs::read_to_string(format!("/proc/{pid}/status")).ok()?;
    let line = text.lines().find(|l| l.starts_with(key))?;
    line[key.len()..].trim().trim_end_matches("kB").trim().parse().ok()
}

/// Accepts plain byte counts or a `K`, `M`, `G` suffix (powers of 1024).
pub fn parse_bytes(s: &str) -> Result<u64, CliError> {
    let s = s.trim();
    let (digits, shift) = match s.chars().last().map(|c| c.to_ascii_uppercase()) {
        Some('K') => (&s[..s.len() - 1], 10),
        Some('M') => (&s[..s.len() - 1], 20),
        Some('G') => (&s[..s.len() - 1], 30),
        _ => (s, 0),
    };
    digits
        .trim()
        .parse::<u64>()
        .ok()
        .and_then(|n| n.checked_mul(1 << shift))
        .ok_or_else(|| CliError::input(format!("cannot read {s:?} as a byte count")))
}

/// Memory cap from the environment, else the flag, else the default.
pub fn effective_mem_cap(flag: Option<&str>) -> Result<u64, CliError> {
    match std::env::var(MEM_CAP_ENV) {
        Ok(v) => parse_bytes(&v),
        Err(_) => flag.map(parse_bytes).unwrap_or(Ok(DEFAULT_MEM_CAP)),
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub exe: PathBuf,
    pub input: PathBuf,
    pub bindings: Vec<String>,
    pub urabe_count: Option<usize>,
    pub orders: Vec<usize>,
    pub variants: Vec<Variant>,
    pub timeout: Duration,
    pub mem_cap: u64,
    pub repeat: usize,
    pub parallel: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CellStatus {
    Completed,
    Timeout,
    MemoryAbort,
    Failed,
    /// Finished but disagreed with the reference cell; its time is withheld.
    Mismatch,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchCell {
    pub variant: String,
    #[serde(rename = "M")]
    pub order: usize,
    pub status: CellStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub micros: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peak_rss_bytes: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(skip)]
    record: Option<ConditionRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub system: String,
    pub order_column: String,
    pub timeout_secs: u64,
    pub mem_cap_bytes: u64,
    pub repeat: usize,
    pub parallel: bool,
    pub cells: Vec<BenchCell>,
}

pub const ORDER_COLUMN: &str = "M = highest derivative order; conditions 0..=M are computed";

impl BenchReport {
    pub fn cell(&self, variant: Variant, order: usize) -> Option<&BenchCell> {
        self.cells.iter().find(|c| c.variant == variant.id() && c.order == order)
    }

    pub fn seconds(&self, variant: Variant, order: usize) -> Option<f64> {
        self.cell(variant, order).and_then(|c| c.micros).map(|u| u as f64 / 1e6)
    }

    pub fn has_mismatch(&self) -> bool {
        self.cells.iter().any(|c| c.status == CellStatus::Mismatch)
    }

    pub fn completed(&self) -> usize {
        self.cells.iter().filter(|c| c.status == CellStatus::Completed).count()
    }

    /// Text table in the layout of a paper-style timing table: one row per
    /// order, one column per variant. Blank-cell markers name the abort.
    pub fn table(&self) -> String {
        let mut variants: Vec<&str> = Vec::new();
        let mut orders: Vec<usize> = Vec::new();
        for c in &self.cells {
            if !variants.contains(&c.variant.as_str()) {
                variants.push(&c.variant);
            }
            if !orders.contains(&c.order) {
                orders.push(c.order);
            }
        }
        let mut out = format!("# {}\n# {}\n", self.system, self.order_column);
        if self.parallel {
            out.push_str("# cells ran concurrently; timings may interfere with each other\n");
        }
        out.push_str(&format!("{:>4}", "M"));
        for v in &variants {
            out.push_str(&format!(" {v:>22}"));
        }
        out.push('\n');
        for &m in &orders {
            out.push_str(&format!("{m:>4}"));
            for v in &variants {
                let text = match self.cells.iter().find(|c| c.order == m && c.variant == *v) {
                    None => "-".to_string(),
                    Some(c) => match (&c.status, c.micros) {
                        (CellStatus::Completed, Some(u)) => {
                            let mib = c.peak_rss_bytes.map(|b| format!(" {:>6}MiB", b >> 20)).unwrap_or_default();
                            format!("{:.3}s{mib}", u as f64 / 1e6)
                        }
                        (CellStatus::Timeout, _) => "timeout".into(),
                        (CellStatus::MemoryAbort, _) => "memory".into(),
                        (CellStatus::Mismatch, _) => "MISMATCH".into(),
                        _ => "failed".into(),
                    },
                };
                out.push_str(&format!(" {text:>22}"));
            }
            out.push('\n');
        }
        for c in &self.cells {
            if let Some(d) = &c.detail {
                out.push_str(&format!("# {} M={}: {d}\n", c.variant, c.order));
            }
        }
        out
    }
}

struct Attempt {
    status: CellStatus,
    output: Option<CellOutput>,
    peak: Option<u64>,
    detail: Option<String>,
}

fn spawn_once(cfg: &BenchConfig, m: usize, variant: Variant) -> Attempt {
    let mut cmd = Command::new(&cfg.exe);
    cmd.arg("bench-cell").arg(&cfg.input).args(["--order", &m.to_string(), "--algo", variant.id()]);
    if let Some(n) = cfg.urabe_count {
        cmd.args(["--urabe-count", &n.to_string()]);
    }
    for b in &cfg.bindings {
        cmd.args(["--bind", b]);
    }
    cmd.env_remove(MEM_CAP_ENV).stdin(Stdio::null()).stdout(Stdio::piped()).stderr(Stdio::piped());
    let mut child = match cmd.spawn() {
        Ok(c) => c,
        Err(e) => return Attempt { status: CellStatus::Failed, output: None, peak: None, detail: Some(e.to_string()) },
    };
    let drain = |r: Option<Box<dyn Read + Send>>| {
        std::thread::spawn(move || {
            let mut s = String::new();
            if let Some(mut r) = r {
                let _ = r.read_to_string(&mut s);
            }
            s
        })
    };
    let out = drain(child.stdout.take().map(|s| Box::new(s) as Box<dyn Read + Send>));
    let err = drain(child.stderr.take().map(|s| Box::new(s) as Box<dyn Read + Send>));
    let pid = child.id().to_string();
    let start = Instant::now();
    let mut peak: Option<u64> = None;
    let verdict = loop {
        if let Some(kb) = proc_status_kb(&pid, "VmRSS:") {
            let bytes = kb * 1024;
            peak = Some(peak.map_or(bytes, |p| p.max(bytes)));
            if bytes > cfg.mem_cap {
                break Some(CellStatus::MemoryAbort);
            }
        }
        match child.try_wait() {
            Ok(Some(_)) => break None,
            Ok(None) => {}
            Err(_) => break Some(CellStatus::Failed),
        }
        if start.elapsed() > cfg.timeout {
            break Some(CellStatus::Timeout);
        }
        std::thread::sleep(POLL);
    };
    if verdict.is_some() {
        let _ = child.kill();
    }
    let status = child.wait().ok();
    let stdout = out.join().unwrap_or_default();
    let stderr = err.join().unwrap_or_default();
    match verdict {
        Some(s) => Attempt { status: s, output: None, peak, detail: None },
        None if status.is_some_and(|s| s.success()) => match serde_json::from_str::<CellOutput>(&stdout) {
            Ok(o) => {
                let peak = match (peak, o.peak_rss_bytes) {
                    (Some(a), Some(b)) => Some(a.max(b)),
                    (a, b) => a.or(b),
                };
                Attempt { status: CellStatus::Completed, output: Some(o), peak, detail: None }
            }
            Err(e) => Attempt {
                status: CellStatus::Failed,
                output: None,
                peak,
                detail: Some(format!("unreadable cell output: {e}")),
            },
        },
        None => Attempt { status: CellStatus::Failed, output: None, peak, detail: Some(stderr.trim().to_string()) },
    }
}

fn run_cell(cfg: &BenchConfig, m: usize, variant: Variant) -> BenchCell {
    let mut times = Vec::new();
    let mut peak: Option<u64> = None;
    let mut record: Option<ConditionRecord> = None;
    let mut cell = BenchCell {
        variant: variant.id().into(),
        order: m,
        status: CellStatus::Completed,
        micros: None,
        peak_rss_bytes: None,
        detail: None,
        record: None,
    };
    for _ in 0..cfg.repeat.max(1) {
        let a = spawn_once(cfg, m, variant);
        peak = match (peak, a.peak) {
            (Some(x), Some(y)) => Some(x.max(y)),
            (x, y) => x.or(y),
        };
        let Some(out) = a.output else {
            cell.status = a.status;
            cell.detail = a.detail;
            cell.peak_rss_bytes = peak;
            return cell;
        };
        if record.as_ref().is_some_and(|r| r.conditions != out.record.conditions) {
            cell.status = CellStatus::Mismatch;
            cell.detail = Some("repeated runs disagree".into());
            return cell;
        }
        times.push(out.micros);
        record = Some(out.record);
    }
    times.sort_unstable();
    cell.micros = Some(times[times.len() / 2]);
    cell.peak_rss_bytes = peak;
    cell.record = record;
    cell
}

/// Runs every (order, variant) cell, then withholds the time of any completed
/// cell whose conditions differ from the fastest completed cell at that order.
pub fn run_bench(cfg: &BenchConfig, system: &str) -> BenchReport {
    let jobs: Vec<(usize, Variant)> =
        cfg.orders.iter().flat_map(|&m| cfg.variants.iter().map(move |&v| (m, v))).collect();
    let mut cells: Vec<Option<BenchCell>> = vec![None; jobs.len()];
    if cfg.parallel {
        let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(jobs.len().max(1));
        let next = std::sync::atomic::AtomicUsize::new(0);
        let slots = std::sync::Mutex::new(&mut cells);
        std::thread::scope(|s| {
            for _ in 0..workers {
                s.spawn(|| loop {
                    let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                    let Some(&(m, v)) = jobs.get(i) else { break };
                    let cell = run_cell(cfg, m, v);
                    slots.lock().expect("no panics while holding the lock")[i] = Some(cell);
                });
            }
        });
    } else {
        for (i, &(m, v)) in jobs.iter().enumerate() {
            cells[i] = Some(run_cell(cfg, m, v));
        }
    }
    let mut cells: Vec<BenchCell> = cells.into_iter().map(|c| c.expect("every job ran")).collect();
    cross_check(&mut cells);
    BenchReport {
        system: system.to_string(),
        order_column: ORDER_COLUMN.into(),
        timeout_secs: cfg.timeout.as_secs(),
        mem_cap_bytes: cfg.mem_cap,
        repeat: cfg.repeat.max(1),
        parallel: cfg.parallel,
        cells,
    }
}

fn cross_check(cells: &mut [BenchCell]) {
    let mut orders: Vec<usize> = cells.iter().map(|c| c.order).collect();
    orders.dedup();
    for m in orders {
        let Some(reference) = cells
            .iter()
            .filter(|c| c.order == m && c.status == CellStatus::Completed)
            .min_by_key(|c| c.micros)
            .map(|c| (c.variant.clone(), c.record.clone().expect("completed cells carry output")))
        else {
            continue;
        };
        let (ref_variant, ref_record) = reference;
        for c in cells.iter_mut().filter(|c| c.order == m && c.status == CellStatus::Completed) {
            let rec = c.record.as_ref().expect("completed cells carry output");
            let differs = rec.system_hash != ref_record.system_hash
                || rec.variables != ref_record.variables
                || rec.conditions != ref_record.conditions;
            if differs {
                let k = rec.conditions.iter().zip(&ref_record.conditions).position(|(a, b)| a != b);
                c.status = CellStatus::Mismatch;
                c.micros = None;
                c.detail = Some(match k {
                    Some(k) => format!("condition {k} differs from {ref_variant}"),
                    None => format!("output metadata differs from {ref_variant}"),
                });
            }
        }
    }
}

pub fn default_exe() -> Result<PathBuf, CliError> {
    std::env::current_exe().map_err(|e| CliError::input(format!("cannot locate own executable: {e}")))
}

pub fn describe_system(path: &Path, name: Option<&str>) -> String {
    match name {
        Some(n) => format!("{n} ({})", path.display()),
        None => path.display().to_string(),
    }
}

//! Run-directory layout and persistence.
//!
//! ```text
//! <run>/config.toml        normalised copy of the run configuration
//! <run>/initial.bin        θ₀ checkpoint
//! <run>/trajectory.csv     one row per probe
//! <run>/shells.csv         ||Δ_jθ||₂ per probe and shell
//! <run>/run.json           grid, stepper, blow-up flag, failure, step count
//! <run>/checkpoints/*.bin  states on the checkpoint schedule
//! <run>/twin.csv           twin-run rows
//! <run>/twin.json          twin-run outcome
//! <run>/reports/*.json     criteria reports
//! ```
//!
//! Every file is written with write-then-rename.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sqg_core::criteria::{CriteriaReport, TheoremId};
use sqg_core::evolution::{
    BlowupFlag, Failure, Member, ProbeEntry, SnapshotSink, StepperConfig, TrajectoryRecord, TwinRow,
};
use sqg_core::littlewood_paley::{BesovEntry, Entry, NormReport, ShellSpectrum};
use sqg_core::spectral::checkpoint::write_atomic;
use sqg_core::spectral::{Checkpoint, GridSpec, SpectralField};

use crate::config::RunConfig;
use crate::error::{Error, Result};

pub const CONFIG: &str = "config.toml";
pub const INITIAL: &str = "initial.bin";
pub const TRAJECTORY: &str = "trajectory.csv";
pub const SHELLS: &str = "shells.csv";
pub const RUN_META: &str = "run.json";
pub const CHECKPOINTS: &str = "checkpoints";
pub const TWIN: &str = "twin.csv";
pub const TWIN_META: &str = "twin.json";
pub const REPORTS: &str = "reports";

pub fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent).map_err(|e| Error::file(parent, e))?;
    }
    write_atomic(path, contents).map_err(|e| Error::file(path, e))
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::file(path, e))
}

pub fn save_config(dir: &Path, cfg: &RunConfig) -> Result<()> {
    write_file(&dir.join(CONFIG), cfg.to_toml().as_bytes())
}

pub fn load_config(dir: &Path) -> Result<RunConfig> {
    RunConfig::parse(&read_file(&dir.join(CONFIG))?)
}

pub fn save_checkpoint(path: &Path, field: &SpectralField, alpha: f64, time: f64) -> Result<()> {
    write_file(path, &Checkpoint::new(field.clone(), alpha, time).to_bytes())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint> {
    Checkpoint::load(path).map_err(|e| match e {
        sqg_core::Error::Io(io) => Error::file(path, io),
        other => other.into(),
    })
}

/// Writes checkpoint-schedule states under `<run>/checkpoints`.
pub struct DirSink {
    dir: PathBuf,
    alpha: f64,
    count: usize,
}

impl DirSink {
    pub fn new(run_dir: &Path, alpha: f64) -> Self {
        Self {
            dir: run_dir.join(CHECKPOINTS),
            alpha,
            count: 0,
        }
    }
}

impl SnapshotSink for DirSink {
    fn checkpoint(&mut self, time: f64, field: &SpectralField) -> sqg_core::Result<Option<PathBuf>> {
        let name = format!("state_{:05}.bin", self.count);
        self.count += 1;
        fs::create_dir_all(&self.dir)?;
        Checkpoint::new(field.clone(), self.alpha, time).save(&self.dir.join(&name))?;
        Ok(Some(PathBuf::from(CHECKPOINTS).join(name)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub grid: GridSpec,
    pub config: StepperConfig,
    pub s: f64,
    pub blowup: Option<BlowupFlag>,
    pub failure: Option<Failure>,
    pub steps: usize,
}

fn lp_column(p: f64) -> String {
    format!("lp:{p}")
}

fn hs_column(s: f64) -> String {
    format!("hs:{s}")
}

fn besov_column(s: f64, p: f64) -> String {
    format!("besov:{s}:{p}")
}

fn csv_bytes(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| Error::file("<csv buffer>", e.into_error()))
}

pub fn save_trajectory(dir: &Path, record: &TrajectoryRecord) -> Result<()> {
    let mut header: Vec<String> = ["time", "step", "hs", "tail"].iter().map(|s| s.to_string()).collect();
    if let Some(first) = record.entries.first() {
        let r = &first.report;
        header.extend(r.lp_norms.iter().map(|e| lp_column(e.order)));
        header.extend(r.sobolev.iter().map(|e| hs_column(e.order)));
        header.extend(r.besov.iter().map(|e| besov_column(e.s, e.p)));
    }
    header.push("checkpoint".into());
    let rows = record.entries.iter().map(|e| {
        let mut row = vec![e.time.to_string(), e.step.to_string(), e.hs.to_string(), e.tail.to_string()];
        row.extend(e.report.lp_norms.iter().map(|x| x.value.to_string()));
        row.extend(e.report.sobolev.iter().map(|x| x.value.to_string()));
        row.extend(e.report.besov.iter().map(|x| x.value.to_string()));
        row.push(
            e.checkpoint
                .as_ref()
                .map(|p| p.to_string_lossy().replace('\\', "/"))
                .unwrap_or_default(),
        );
        row
    });
    write_file(&dir.join(TRAJECTORY), &csv_bytes(&header, rows)?)?;

    let shell_header: Vec<String> = ["time", "j", "l2"].iter().map(|s| s.to_string()).collect();
    let shell_rows = record.entries.iter().flat_map(|e| {
        e.report
            .shell
            .iter()
            .map(move |(j, v)| vec![e.time.to_string(), j.to_string(), v.to_string()])
    });
    write_file(&dir.join(SHELLS), &csv_bytes(&shell_header, shell_rows)?)?;

    let meta = RunMeta {
        grid: record.grid,
        config: record.config,
        s: record.s,
        blowup: record.blowup,
        failure: record.failure,
        steps: record.steps,
    };
    write_file(&dir.join(RUN_META), serde_json::to_string_pretty(&meta)?.as_bytes())
}

/// A CSV file read into its header and string rows.
pub struct Table {
    pub path: PathBuf,
    pub header: Vec<String>,
    pub rows: Vec<csv::StringRecord>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::file(path, io),
            other => Error::Parse(format!("{}: {other:?}", path.display())),
        })?;
        let header = r.headers()?.iter().map(str::to_string).collect();
        let rows = r.records().collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Self {
            path: path.to_path_buf(),
            header,
            rows,
        })
    }

    /// Column indices of `names`, or an error naming every missing one.
    pub fn require(&self, names: &[&str]) -> Result<Vec<usize>> {
        let missing: Vec<String> = names
            .iter()
            .filter(|n| !self.header.iter().any(|h| h == *n))
            .map(|n| n.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::MissingColumns {
                path: self.path.clone(),
                columns: missing,
            });
        }
        Ok(names
            .iter()
            .map(|n| self.header.iter().position(|h| h == n).unwrap())
            .collect())
    }

    pub fn number(&self, row: usize, col: usize) -> Result<f64> {
        let raw = &self.rows[row][col];
        raw.parse()
            .map_err(|_| Error::Parse(format!("{}: row {}: '{raw}' is not a number", self.path.display(), row + 1)))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let col = self.require(&[name])?[0];
        (0..self.rows.len()).map(|r| self.number(r, col)).collect()
    }
}

/// Rebuilds the trajectory record from `trajectory.csv`, `shells.csv` and
/// `run.json`; fields are not loaded.
pub fn load_trajectory(dir: &Path) -> Result<TrajectoryRecord> {
    let meta: RunMeta = serde_json::from_str(&read_file(&dir.join(RUN_META))?)?;
    let table = Table::read(&dir.join(TRAJECTORY))?;
    let base = table.require(&["time", "step", "hs", "tail", "checkpoint"])?;
    let shells = Table::read(&dir.join(SHELLS))?;
    let sc = shells.require(&["time", "j", "l2"])?;

    let mut entries = Vec::with_capacity(table.rows.len());
    let mut cursor = 0;
    for r in 0..table.rows.len() {
        let time = table.number(r, base[0])?;
        let mut report = NormReport {
            time,
            lp_norms: Vec::new(),
            sobolev: Vec::new(),
            besov: Vec::new(),
            shell: ShellSpectrum {
                p: 2.0,
                j_min: 0,
                values: Vec::new(),
            },
        };
        for (c, name) in table.header.iter().enumerate() {
            let parts: Vec<&str> = name.split(':').collect();
            let parse = |s: &str| -> Result<f64> {
                s.parse().map_err(|_| Error::Parse(format!("{}: bad column '{name}'", table.path.display())))
            };
            match parts.as_slice() {
                ["lp", p] => report.lp_norms.push(Entry {
                    order: parse(p)?,
                    value: table.number(r, c)?,
                }),
                ["hs", s] => report.sobolev.push(Entry {
                    order: parse(s)?,
                    value: table.number(r, c)?,
                }),
                ["besov", s, p] => report.besov.push(BesovEntry {
                    s: parse(s)?,
                    p: parse(p)?,
                    value: table.number(r, c)?,
                }),
                _ => {}
            }
        }
        while cursor < shells.rows.len() && shells.number(cursor, sc[0])? == time {
            let j: i32 = shells.rows[cursor][sc[1]]
                .parse()
                .map_err(|_| Error::Parse(format!("{}: bad shell index", shells.path.display())))?;
            if report.shell.values.is_empty() {
                report.shell.j_min = j;
            }
            report.shell.values.push(shells.number(cursor, sc[2])?);
            cursor += 1;
        }
        let ck = &table.rows[r][base[4]];
        entries.push(ProbeEntry {
            time,
            step: table.rows[r][base[1]]
                .parse()
                .map_err(|_| Error::Parse(format!("{}: bad step", table.path.display())))?,
            hs: table.number(r, base[2])?,
            tail: table.number(r, base[3])?,
            report,
            checkpoint: (!ck.is_empty()).then(|| PathBuf::from(ck)),
        });
    }
    Ok(TrajectoryRecord {
        grid: meta.grid,
        config: meta.config,
        s: meta.s,
        entries,
        fields: Vec::new(),
        blowup: meta.blowup,
        failure: meta.failure,
        steps: meta.steps,
    })
}

/// Loads the checkpointed states of `record` into `record.fields`.
pub fn attach_fields(dir: &Path, record: &mut TrajectoryRecord) -> Result<()> {
    record.fields.clear();
    for e in &record.entries {
        if let Some(rel) = &e.checkpoint {
            let ck = load_checkpoint(&dir.join(rel))?;
            record.fields.push((ck.time, ck.field));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwinMeta {
    pub grid: GridSpec,
    pub diverged: Option<(Member, Failure)>,
    pub steps: usize,
}

pub fn twin_csv(rows: &[TwinRow]) -> Result<Vec<u8>> {
    let header: Vec<String> = TwinRow::COLUMNS.iter().map(|s| s.to_string()).collect();
    csv_bytes(&header, rows.iter().map(|r| r.values().iter().map(f64::to_string).collect()))
}

pub fn load_twin_rows(dir: &Path) -> Result<Vec<TwinRow>> {
    let table = Table::read(&dir.join(TWIN))?;
    let cols = table.require(&TwinRow::COLUMNS)?;
    (0..table.rows.len())
        .map(|r| {
            let values = cols.iter().map(|&c| table.number(r, c)).collect::<Result<Vec<_>>>()?;
            Ok(TwinRow::from_values(&values)?)
        })
        .collect()
}

pub fn report_path(dir: &Path, theorem: TheoremId) -> PathBuf {
    dir.join(REPORTS).join(format!("theorem-{}.json", theorem.label()))
}

pub fn save_report(dir: &Path, report: &CriteriaReport) -> Result<PathBuf> {
    let path = report_path(dir, report.theorem);
    write_file(&path, report.to_json().as_bytes())?;
    Ok(path)
}

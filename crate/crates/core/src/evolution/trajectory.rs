use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use super::stepper::{Stepper, StepperConfig};
use crate::error::{Error, Result};
use crate::littlewood_paley::{sobolev_norm, FilterBank, NormReport, NormRequest};
use crate::spectral::{GridSpec, SpectralField};

/// When a run is declared a blow-up candidate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupPolicy {
    /// Smoothness index s of the monitored Ḣ^s norm.
    pub s: f64,
    /// Flag once ||θ||_{Ḣ^s} exceeds this multiple of its initial value.
    pub hs_multiple: f64,
    /// Flag once this fraction of the mean-free energy sits in the tail band.
    pub tail_fraction: f64,
    /// Stop advancing once flagged.
    pub stop_on_flag: bool,
}

impl Default for BlowupPolicy {
    fn default() -> Self {
        Self {
            s: 1.0,
            hs_multiple: 1e3,
            tail_fraction: 0.01,
            stop_on_flag: true,
        }
    }
}

/// Which probes are taken and what they record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeSchedule {
    /// Probe interval in time units; 0 probes after every step.
    pub every: f64,
    #[serde(default)]
    pub request: NormRequest,
    #[serde(default)]
    pub blowup: BlowupPolicy,
    /// Keep each probed field in memory.
    #[serde(default)]
    pub keep_fields: bool,
}

impl ProbeSchedule {
    pub fn every(every: f64) -> Self {
        Self {
            every,
            request: NormRequest::default(),
            blowup: BlowupPolicy::default(),
            keep_fields: false,
        }
    }

    pub fn keeping_fields(mut self) -> Self {
        self.keep_fields = true;
        self
    }

    pub fn with_request(mut self, request: NormRequest) -> Self {
        self.request = request;
        self
    }

    pub fn with_blowup(mut self, blowup: BlowupPolicy) -> Self {
        self.blowup = blowup;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.every >= 0.0 && self.every.is_finite()) {
            return Err(Error::InvalidParameter(format!("probe interval {}", self.every)));
        }
        let b = &self.blowup;
        if !(b.hs_multiple > 1.0) || !(b.tail_fraction > 0.0 && b.tail_fraction <= 1.0) || !b.s.is_finite() {
            return Err(Error::InvalidParameter(format!("blow-up policy {b:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlowupReason {
    SobolevGrowth,
    TailEnergy,
    IntegratorFailure,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupFlag {
    pub time: f64,
    pub reason: BlowupReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    pub time: f64,
    pub step: usize,
    pub last_good_time: f64,
}

impl From<Failure> for Error {
    fn from(f: Failure) -> Self {
        Error::Integrator {
            time: f.time,
            step: f.step,
            last_good_time: f.last_good_time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeEntry {
    pub time: f64,
    pub step: usize,
    /// ||θ||_{Ḣ^s} at the blow-up policy's s.
    pub hs: f64,
    /// Fraction of mean-free energy in the tail band.
    pub tail: f64,
    pub report: NormReport,
    #[serde(default)]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub grid: GridSpec,
    pub config: StepperConfig,
    pub s: f64,
    pub entries: Vec<ProbeEntry>,
    #[serde(skip)]
    pub fields: Vec<(f64, SpectralField)>,
    pub blowup: Option<BlowupFlag>,
    pub failure: Option<Failure>,
    pub steps: usize,
}

impl TrajectoryRecord {
    pub fn times(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.time).collect()
    }

    pub fn hs_series(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.hs).collect()
    }

    /// Entries up to and including the blow-up flag time.
    pub fn pre_flag(&self) -> &[ProbeEntry] {
        match self.blowup {
            Some(flag) => {
                let end = self.entries.iter().take_while(|e| e.time <= flag.time).count();
                &self.entries[..end]
            }
            None => &self.entries,
        }
    }

    pub fn is_blowup_candidate(&self) -> bool {
        self.blowup.is_some()
    }

    pub fn final_time(&self) -> f64 {
        self.entries.last().map_or(0.0, |e| e.time)
    }
}

/// Receives probed states that fall on the checkpoint schedule.
pub trait SnapshotSink {
    fn checkpoint(&mut self, time: f64, field: &SpectralField) -> Result<Option<PathBuf>>;
}

/// Discards every snapshot.
pub struct NoSink;

impl SnapshotSink for NoSink {
    fn checkpoint(&mut self, _: f64, _: &SpectralField) -> Result<Option<PathBuf>> {
        Ok(None)
    }
}

/// Fraction of mean-free L² energy in modes with |k|_∞ above half the
/// dealiasing cutoff.
pub fn tail_energy_fraction(theta: &SpectralField) -> f64 {
    let g = theta.grid();
    let half = 0.5 * g.dealias_cutoff();
    let mut total = 0.0;
    let mut tail = 0.0;
    for (idx, a, b) in g.lattice() {
        if idx == 0 {
            continue;
        }
        let e = theta.coeffs()[idx].norm_sqr();
        total += e;
        let k = g.wavenumber(a).abs().max(g.wavenumber(b).abs()) as f64;
        if k > half {
            tail += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

/// Time grid of the probes and the stepping loop shared by single and twin
/// runs.
pub(crate) struct Clock {
    pub t: f64,
    pub step: usize,
    every: f64,
    t_end: f64,
    next_probe: usize,
}

impl Clock {
    pub fn new(every: f64, t_end: f64) -> Self {
        Self {
            t: 0.0,
            step: 0,
            every,
            t_end,
            next_probe: 1,
        }
    }

    pub fn done(&self) -> bool {
        self.t >= self.t_end
    }

    fn target(&self) -> f64 {
        if self.every > 0.0 {
            (self.next_probe as f64 * self.every).min(self.t_end)
        } else {
            self.t_end
        }
    }

    /// Step size clipped to land on the next probe time, and that time
    /// when the step reaches it.
    pub fn clip(&self, proposal: f64) -> (f64, Option<f64>) {
        let target = self.target();
        let remaining = target - self.t;
        if proposal >= remaining * (1.0 - 1e-9) {
            (remaining, Some(target))
        } else {
            (proposal, None)
        }
    }

    /// Advances the clock; returns whether the new time is a probe time.
    pub fn advance(&mut self, dt: f64, landing: Option<f64>) -> bool {
        self.step += 1;
        match landing {
            Some(target) => {
                self.t = target;
                while self.every > 0.0 && self.next_probe as f64 * self.every <= self.t * (1.0 + 1e-12) {
                    self.next_probe += 1;
                }
                true
            }
            None => {
                self.t += dt;
                self.every == 0.0
            }
        }
    }
}

fn probe(
    bank: &FilterBank,
    theta: &SpectralField,
    time: f64,
    step: usize,
    schedule: &ProbeSchedule,
) -> Result<ProbeEntry> {
    Ok(ProbeEntry {
        time,
        step,
        hs: sobolev_norm(theta, schedule.blowup.s)?,
        tail: tail_energy_fraction(theta),
        report: NormReport::compute(bank, theta, time, &schedule.request)?,
        checkpoint: None,
    })
}

/// Integrates from θ₀ over [0, t_end], probing on the schedule.
pub fn evolve(theta0: &SpectralField, cfg: &StepperConfig, schedule: &ProbeSchedule) -> Result<TrajectoryRecord> {
    evolve_with_sink(theta0, cfg, schedule, &mut NoSink)
}

/// As [`evolve`], passing checkpoint-schedule states to `sink`.
///
/// A non-finite state ends the run with [`TrajectoryRecord::failure`] set and
/// an integrator-failure blow-up flag; earlier probes are kept.
pub fn evolve_with_sink(
    theta0: &SpectralField,
    cfg: &StepperConfig,
    schedule: &ProbeSchedule,
    sink: &mut dyn SnapshotSink,
) -> Result<TrajectoryRecord> {
    theta0.check_finite()?;
    schedule.validate()?;
    let grid = *theta0.grid();
    let mut stepper = Stepper::new(grid, cfg)?;
    let bank = FilterBank::new(grid);
    let mut record = TrajectoryRecord {
        grid,
        config: *cfg,
        s: schedule.blowup.s,
        entries: Vec::new(),
        fields: Vec::new(),
        blowup: None,
        failure: None,
        steps: 0,
    };
    let mut next_checkpoint = 0.0;
    let mut theta = theta0.clone();
    let mut clock = Clock::new(schedule.every, cfg.t_end);
    let mut last_probe_time = 0.0;

    let hs0 = sobolev_norm(theta0, schedule.blowup.s)?;
    let mut take = |theta: &SpectralField, t: f64, step: usize, record: &mut TrajectoryRecord| -> Result<bool> {
        let mut entry = probe(&bank, theta, t, step, schedule)?;
        if let Some(every) = cfg.checkpoint_every {
            if t >= next_checkpoint * (1.0 - 1e-12) {
                entry.checkpoint = sink.checkpoint(t, theta)?;
                while next_checkpoint <= t * (1.0 + 1e-12) {
                    next_checkpoint += every;
                }
            }
        }
        let reason = if hs0 > 0.0 && entry.hs > schedule.blowup.hs_multiple * hs0 {
            Some(BlowupReason::SobolevGrowth)
        } else if entry.tail > schedule.blowup.tail_fraction {
            Some(BlowupReason::TailEnergy)
        } else {
            None
        };
        record.entries.push(entry);
        if schedule.keep_fields {
            record.fields.push((t, theta.clone()));
        }
        if let (Some(reason), None) = (reason, record.blowup) {
            record.blowup = Some(BlowupFlag { time: t, reason });
            return Ok(schedule.blowup.stop_on_flag);
        }
        Ok(false)
    };

    if take(&theta, 0.0, 0, &mut record)? {
        return Ok(record);
    }
    while !clock.done() {
        let (dt, landing) = clock.clip(stepper.proposal(&cfg.dt, &theta));
        match stepper.step(&theta, dt) {
            Ok(next) => theta = next,
            Err(Error::NonFinite(_)) => {
                let failure = Failure {
                    time: clock.t + dt,
                    step: clock.step + 1,
                    last_good_time: last_probe_time,
                };
                record.failure = Some(failure);
                record.blowup.get_or_insert(BlowupFlag {
                    time: clock.t,
                    reason: BlowupReason::IntegratorFailure,
                });
                break;
            }
            Err(e) => return Err(e),
        }
        if clock.advance(dt, landing) {
            last_probe_time = clock.t;
            if take(&theta, clock.t, clock.step, &mut record)? {
                break;
            }
        }
    }
    record.steps = clock.step;
    Ok(record)
}

//! Time integration, twin runs and shell energy audits.

mod audit;
mod stepper;
mod trajectory;
mod twin;

pub use audit::{per_mode_energy_audit, EnergyAudit};
pub use stepper::{step, DtPolicy, Mode, Stepper, StepperConfig};
pub use trajectory::{
    evolve, evolve_with_sink, tail_energy_fraction, BlowupFlag, BlowupPolicy, BlowupReason, Failure,
    NoSink, ProbeEntry, ProbeSchedule, SnapshotSink, TrajectoryRecord,
};
pub use twin::{twin_evolve, twin_row, Member, TwinRecord, TwinRow, TwinSchedule};

//! Time integration along real and complex-time rays, exact Stokes solutions,
//! balance monitoring, steady states and strip verification.

mod balance;
mod integrator;
mod recover;
mod setup;
mod steady;
mod verify;

pub use balance::{balance_monitor, decay_bound_excess, BalancePoint, BalanceSeries};
pub use integrator::{
    integrate_ray, integrate_real, stokes_exact, Failure, FailureKind, IntegratorConfig, RaySpec,
    RunMetadata, Sample, Snapshot, TrajectoryRecord,
};
pub use recover::{recover_force, ForceRecovery};
pub use setup::{PhysicalSetup, SetupSummary};
pub use steady::{steady_state_solve, SteadyOptions, SteadyState};
pub use verify::{
    angle_sweep, margin_csv, verify_sector, verify_strip, Counterexample, MarginPoint,
    SectorOptions, SectorReport, StripOptions, VerificationReport,
};

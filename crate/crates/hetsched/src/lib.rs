//! Discrete-event simulation and dynamic list scheduling for heterogeneous
//! SoC platforms.
//!
//! The crate models platforms (CPUs plus fixed-function accelerators with
//! pairwise link bandwidths), application task graphs with per-PE cost
//! matrices, and dynamically interleaving frame workloads. On top of that it
//! implements a family of schedulers — MET, static HEFT/PEFT, their dynamic
//! and runtime variants, two energy-delay-product variants — and an exact
//! branch-and-bound solver usable as an optimality oracle.
//!
//! All time/power/energy math is generic over [`Scalar`] (`f32` or `f64`);
//! concrete `f64` aliases are exported below.

pub mod cp;
pub mod io;
pub mod metrics;
pub mod model;
pub mod scalar;
pub mod sched;
pub mod schedulers;
pub mod sim;
pub mod synth;

pub use scalar::Scalar;

/// Default concrete scalar used by the CLI and file formats.
pub type Std = f64;

pub type Platform64 = model::Platform<Std>;
pub type AppDag64 = model::AppDag<Std>;
pub type WorkloadSpec64 = model::WorkloadSpec<Std>;
pub type ScheduleTable64 = sched::ScheduleTable<Std>;
pub type Assignment64 = sched::Assignment<Std>;
pub type SimResult64 = sim::SimResult<Std>;
pub type SimConfig64 = sim::SimConfig<Std>;
pub type SweepPoint64 = metrics::SweepPoint<Std>;

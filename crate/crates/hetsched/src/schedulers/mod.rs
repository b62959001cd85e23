//! The scheduler family behind a single input contract.
//!
//! Whole-DAG schedulers run at frame injection and emit a lookup table;
//! ready-queue schedulers run every scheduling epoch over independent tasks.

mod list;
mod peft;

pub use list::{
    heft_base, heft_dyn, heft_edp, heft_edp_lb, heft_rt, merge_dags, met_schedule, DynLevel,
};
pub(crate) use list::{heft_over_partials, per_pe_order_deps};
pub use peft::{oct_table, peft_base, peft_rt, OctCache};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::model::{AppDag, ModelError, Platform, TaskId, TaskNode};
use crate::scalar::Scalar;
use crate::sched::{Assignment, ParentFinish, PeTimeline};

/// Selects one of the implemented scheduling policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchedulerKind {
    Met,
    HeftBase,
    HeftDyn,
    HeftRt,
    HeftEdp,
    HeftEdpLb,
    PeftBase,
    PeftRt,
    Cp,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 9] = [
        SchedulerKind::Met,
        SchedulerKind::HeftBase,
        SchedulerKind::HeftDyn,
        SchedulerKind::HeftRt,
        SchedulerKind::HeftEdp,
        SchedulerKind::HeftEdpLb,
        SchedulerKind::PeftBase,
        SchedulerKind::PeftRt,
        SchedulerKind::Cp,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SchedulerKind::Met => "met",
            SchedulerKind::HeftBase => "heft_base",
            SchedulerKind::HeftDyn => "heft_dyn",
            SchedulerKind::HeftRt => "heft_rt",
            SchedulerKind::HeftEdp => "heft_edp",
            SchedulerKind::HeftEdpLb => "heft_edp_lb",
            SchedulerKind::PeftBase => "peft_base",
            SchedulerKind::PeftRt => "peft_rt",
            SchedulerKind::Cp => "cp",
        }
    }

    /// Ready-queue schedulers are invoked at every epoch; the rest integrate
    /// at job generation with whole (partial) DAGs.
    pub fn is_ready_queue(&self) -> bool {
        matches!(
            self,
            SchedulerKind::Met
                | SchedulerKind::HeftRt
                | SchedulerKind::HeftEdp
                | SchedulerKind::HeftEdpLb
                | SchedulerKind::PeftRt
        )
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchedulerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SchedulerKind::ALL
            .iter()
            .find(|k| k.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown scheduler `{s}`"))
    }
}

/// Which interface a scheduler invocation is serving.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleMode {
    WholeDag,
    ReadyQueue,
}

#[derive(Debug, Error)]
pub enum SchedError {
    #[error("scheduler invoked in {got:?} mode, requires {expected:?}")]
    WrongMode {
        expected: ScheduleMode,
        got: ScheduleMode,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A task whose predecessors have all completed, ready for placement.
#[derive(Debug, Clone)]
pub struct ReadyTask<S> {
    /// Globally unique id used in schedule tables.
    pub global: TaskId,
    /// Frame instance the task belongs to.
    pub instance: u64,
    /// Cost rows; `node.id` is the task's id local to its application DAG.
    pub node: TaskNode<S>,
    /// Completed predecessors: when and where their data became available.
    pub parents: Vec<ParentFinish<S>>,
    /// Order in which the task entered the ready queue (FIFO key).
    pub seq: u64,
}

/// The unscheduled remainder of one frame: an induced subgraph over global
/// task ids plus finish data for predecessors outside the subgraph.
#[derive(Debug, Clone)]
pub struct PartialDag<S> {
    pub instance: u64,
    pub dag: AppDag<S>,
    /// global id -> id local to the originating application DAG.
    pub locals: BTreeMap<TaskId, TaskId>,
    /// global id -> finish info of completed/running predecessors.
    pub ext: BTreeMap<TaskId, Vec<ParentFinish<S>>>,
}

impl<S: Scalar> PartialDag<S> {
    /// Wrap a whole DAG whose ids are already globally unique.
    pub fn from_whole(instance: u64, dag: AppDag<S>) -> Self {
        let locals = dag.tasks.iter().map(|t| (t.id, t.id)).collect();
        Self {
            instance,
            dag,
            locals,
            ext: BTreeMap::new(),
        }
    }
}

/// Everything a scheduler may look at when making a decision.
#[derive(Debug)]
pub struct SchedulerInput<'a, S> {
    pub mode: ScheduleMode,
    /// Unscheduled task graphs still in the system (whole-DAG mode).
    pub outstanding: &'a [PartialDag<S>],
    /// Independent ready tasks (ready-queue mode).
    pub ready: &'a [ReadyTask<S>],
    /// Tasks currently executing; fixed constraints on the problem.
    pub running: &'a [Assignment<S>],
    /// Current per-PE commitments, indexed by PE id.
    pub timelines: &'a [PeTimeline<S>],
    pub platform: &'a Platform<S>,
    pub now: S,
}

impl<'a, S: Scalar> SchedulerInput<'a, S> {
    pub(crate) fn require_mode(&self, expected: ScheduleMode) -> Result<(), SchedError> {
        if self.mode == expected {
            Ok(())
        } else {
            Err(SchedError::WrongMode {
                expected,
                got: self.mode,
            })
        }
    }
}

/// Convenience constructor for a ready-queue input over an idle platform.
pub fn idle_timelines<S: Scalar>(platform: &Platform<S>) -> Vec<PeTimeline<S>> {
    (0..platform.num_pes()).map(PeTimeline::new).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_roundtrip() {
        for kind in SchedulerKind::ALL {
            assert_eq!(kind.name().parse::<SchedulerKind>().unwrap(), kind);
        }
        assert!("nope".parse::<SchedulerKind>().is_err());
    }

    #[test]
    fn mode_split() {
        assert!(SchedulerKind::HeftRt.is_ready_queue());
        assert!(SchedulerKind::Met.is_ready_queue());
        assert!(!SchedulerKind::HeftBase.is_ready_queue());
        assert!(!SchedulerKind::Cp.is_ready_queue());
    }
}

//! Deterministic discrete-event simulation: frame injection, ready-queue
//! maintenance, scheduler invocation, dispatch and completion logging.

use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::cp::{cp_solve, CpConfig, CpError, CpInstance, CpStatus};
use crate::model::{AppDag, ArrivalDistribution, PeId, Platform, TaskId, WorkloadSpec};
use crate::scalar::Scalar;
use crate::sched::{qkey, Assignment, ParentFinish, PeTimeline, ScheduleTable};
use crate::schedulers::{
    heft_base, heft_dyn, heft_edp, heft_edp_lb, heft_rt, met_schedule, peft_base, peft_rt,
    DynLevel, OctCache, PartialDag, ReadyTask, SchedError, ScheduleMode, SchedulerInput,
    SchedulerKind,
};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("deadlock: {0}")]
    Deadlock(String),
    #[error("noise magnitude must be in [0, 1), got {0}")]
    BadNoise(f64),
    #[error("exact solver found the instance infeasible at t={0}")]
    Infeasible(f64),
    #[error(transparent)]
    Sched(#[from] SchedError),
    #[error(transparent)]
    Cp(#[from] CpError),
    #[error("no scheduler calls recorded")]
    EmptyCallLog,
    #[error("no completed frames")]
    NoCompletedFrames,
}

/// Simulation knobs independent of the workload.
#[derive(Debug, Clone)]
pub struct SimConfig<S> {
    /// Multiplicative runtime perturbation: actual = nominal * (1 + eps*u),
    /// u drawn uniformly from [-1, 1]. `None` executes estimates exactly.
    pub noise: Option<S>,
    /// Label for the abstract time unit, echoed into reports.
    pub time_unit: String,
    /// Which dynamic-HEFT fixes are active (heft_dyn only).
    pub dyn_level: DynLevel,
    /// Exact-solver settings (cp scheduler only).
    pub cp: CpConfig,
}

impl<S> Default for SimConfig<S> {
    fn default() -> Self {
        Self {
            noise: None,
            time_unit: "tu".to_string(),
            dyn_level: DynLevel::Full,
            cp: CpConfig::default(),
        }
    }
}

/// Lifecycle of one task instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TaskState {
    Blocked,
    Ready,
    Scheduled,
    Running,
    Done,
}

/// Injection/completion record of one frame.
#[derive(Debug, Clone)]
pub struct FrameRecord<S> {
    pub frame: u64,
    pub app: String,
    pub injected: S,
    pub completed: Option<S>,
}

/// One executed interval on a PE.
#[derive(Debug, Clone)]
pub struct BusyRecord<S> {
    pub start: S,
    pub end: S,
    pub frame: u64,
    pub task_local: TaskId,
    pub task_name: String,
    /// Power drawn while executing, for energy accounting.
    pub power: S,
}

/// Wall-clock profile of one scheduler invocation.
#[derive(Debug, Clone)]
pub struct SchedCall<S> {
    pub at: S,
    pub wall: Duration,
    pub scheduled: usize,
}

/// Everything a simulation run produces.
#[derive(Debug, Clone)]
pub struct SimResult<S> {
    pub scheduler: SchedulerKind,
    pub frames: Vec<FrameRecord<S>>,
    pub pe_busy: Vec<Vec<BusyRecord<S>>>,
    pub scheduler_calls: Vec<SchedCall<S>>,
    pub dynamic_energy: S,
    pub static_energy: S,
    /// Configured injection horizon (frames may drain past it).
    pub duration: S,
}

impl<S: Scalar> SimResult<S> {
    /// Completion of the last frame minus injection of the first.
    pub fn overall_makespan(&self) -> Option<S> {
        let first = self
            .frames
            .iter()
            .map(|f| f.injected)
            .fold(S::infinity(), S::min);
        let last = self
            .frames
            .iter()
            .filter_map(|f| f.completed)
            .fold(S::neg_infinity(), S::max);
        (last > S::neg_infinity()).then_some(last - first)
    }
}

/// Summary statistics over the scheduler-call wall clock.
#[derive(Debug, Clone)]
pub struct OverheadProfile {
    pub mean: Duration,
    pub p95: Duration,
    pub count: usize,
    pub total: Duration,
    /// Empirical CDF: (duration seconds, cumulative fraction).
    pub cdf: Vec<(f64, f64)>,
}

/// Mean/p95/total of scheduling wall time plus the empirical CDF.
pub fn profile_scheduler_overhead<S: Scalar>(
    result: &SimResult<S>,
) -> Result<OverheadProfile, SimError> {
    if result.scheduler_calls.is_empty() {
        return Err(SimError::EmptyCallLog);
    }
    let mut secs: Vec<f64> = result
        .scheduler_calls
        .iter()
        .map(|c| c.wall.as_secs_f64())
        .collect();
    secs.sort_by(f64::total_cmp);
    let n = secs.len();
    let total: f64 = secs.iter().sum();
    let p95_idx = ((0.95 * n as f64).ceil() as usize).clamp(1, n) - 1;
    let cdf = secs
        .iter()
        .enumerate()
        .map(|(i, d)| (*d, (i + 1) as f64 / n as f64))
        .collect();
    Ok(OverheadProfile {
        mean: Duration::from_secs_f64(total / n as f64),
        p95: Duration::from_secs_f64(secs[p95_idx]),
        count: n,
        total: Duration::from_secs_f64(total),
        cdf,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EvKind {
    Arrival { app: usize },
    Completion { task: usize },
    Wake { pe: PeId },
}

#[derive(Debug)]
struct Ev<S> {
    time: S,
    seq: u64,
    kind: EvKind,
}

impl<S: Scalar> PartialEq for Ev<S> {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}
impl<S: Scalar> Eq for Ev<S> {}
impl<S: Scalar> PartialOrd for Ev<S> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<S: Scalar> Ord for Ev<S> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Min-heap: earlier time first, then insertion order.
        crate::scalar::cmp_finite(&other.time, &self.time).then_with(|| other.seq.cmp(&self.seq))
    }
}

struct TaskRt<S> {
    global: usize,
    frame: usize,
    local: TaskId,
    state: TaskState,
    preds: Vec<(usize, S)>,
    succs: Vec<(usize, S)>,
    done_preds: usize,
    planned: Option<Assignment<S>>,
    actual: Option<Assignment<S>>,
}

struct FrameRt<S> {
    app: usize,
    base: usize,
    injected: S,
    completed: Option<S>,
    remaining: usize,
    global_dag: AppDag<S>,
}

struct Engine<'a, S: Scalar> {
    platform: &'a Platform<S>,
    workload: &'a WorkloadSpec<S>,
    kind: SchedulerKind,
    config: &'a SimConfig<S>,

    events: BinaryHeap<Ev<S>>,
    ev_seq: u64,
    arrival_rng: StdRng,
    noise_rng: StdRng,

    tasks: Vec<TaskRt<S>>,
    frames: Vec<FrameRt<S>>,

    ready_queue: Vec<usize>,
    ready_seq: u64,
    ready_seqs: HashMap<usize, u64>,

    pe_running: Vec<Option<usize>>,
    queued: Vec<BTreeSet<usize>>,
    next_wake: Vec<Option<S>>,

    dyn_succs: HashMap<usize, Vec<usize>>,
    dyn_wait: HashMap<usize, usize>,

    oct_cache: OctCache<S>,

    busy_log: Vec<Vec<BusyRecord<S>>>,
    calls: Vec<SchedCall<S>>,
    dynamic_energy: S,
    done_count: usize,
}

/// Run one simulation to completion (injected frames drain even past the
/// horizon). Deterministic for a fixed workload seed and configuration.
pub fn run<S: Scalar>(
    platform: &Platform<S>,
    workload: &WorkloadSpec<S>,
    scheduler: SchedulerKind,
    config: &SimConfig<S>,
) -> Result<SimResult<S>, SimError> {
    if let Some(eps) = config.noise {
        let e = eps.to_config();
        if !(0.0..1.0).contains(&e) {
            return Err(SimError::BadNoise(e));
        }
    }
    let z = platform.num_pes();
    let mut engine = Engine {
        platform,
        workload,
        kind: scheduler,
        config,
        events: BinaryHeap::new(),
        ev_seq: 0,
        arrival_rng: StdRng::seed_from_u64(workload.seed),
        noise_rng: StdRng::seed_from_u64(workload.seed ^ 0x9E37_79B9_7F4A_7C15),
        tasks: Vec::new(),
        frames: Vec::new(),
        ready_queue: Vec::new(),
        ready_seq: 0,
        ready_seqs: HashMap::new(),
        pe_running: vec![None; z],
        queued: vec![BTreeSet::new(); z],
        next_wake: vec![None; z],
        dyn_succs: HashMap::new(),
        dyn_wait: HashMap::new(),
        oct_cache: OctCache::new(),
        busy_log: vec![Vec::new(); z],
        calls: Vec::new(),
        dynamic_energy: S::zero(),
        done_count: 0,
    };
    engine.schedule_next_arrival(S::zero());
    engine.main_loop()?;

    let static_energy = platform
        .pes
        .iter()
        .map(|pe| pe.idle_power * workload.duration)
        .sum();
    Ok(SimResult {
        scheduler,
        frames: engine
            .frames
            .iter()
            .enumerate()
            .map(|(i, f)| FrameRecord {
                frame: i as u64,
                app: workload.mix[f.app].dag.app_name.clone(),
                injected: f.injected,
                completed: f.completed,
            })
            .collect(),
        pe_busy: engine.busy_log,
        scheduler_calls: engine.calls,
        dynamic_energy: engine.dynamic_energy,
        static_energy,
        duration: workload.duration,
    })
}

impl<'a, S: Scalar> Engine<'a, S> {
    fn push_event(&mut self, time: S, kind: EvKind) {
        let seq = self.ev_seq;
        self.ev_seq += 1;
        self.events.push(Ev { time, seq, kind });
    }

    fn schedule_next_arrival(&mut self, now: S) {
        let rate = self.workload.target_frame_rate;
        let gap = match self.workload.arrival_distribution {
            ArrivalDistribution::Exponential => {
                let u: f64 = self.arrival_rng.gen();
                S::from_config(-(1.0 - u).ln()) / rate
            }
            ArrivalDistribution::Fixed => S::one() / rate,
        };
        let app = self.pick_app();
        let t = now + gap;
        if t <= self.workload.duration {
            self.push_event(t, EvKind::Arrival { app });
        }
    }

    fn pick_app(&mut self) -> usize {
        let u: f64 = self.arrival_rng.gen();
        let mut acc = 0.0;
        for (i, entry) in self.workload.mix.iter().enumerate() {
            acc += entry.probability;
            if u < acc {
                return i;
            }
        }
        self.workload.mix.len() - 1
    }

    fn node(&self, g: usize) -> &crate::model::TaskNode<S> {
        let t = &self.tasks[g];
        let f = &self.frames[t.frame];
        &f.global_dag.tasks[g - f.base]
    }

    fn main_loop(&mut self) -> Result<(), SimError> {
        while let Some(ev) = self.events.pop() {
            let now = ev.time;
            match ev.kind {
                EvKind::Arrival { app } => {
                    let frame = self.instantiate(app, now);
                    self.schedule_next_arrival(now);
                    if self.kind.is_ready_queue() {
                        if self.kind == SchedulerKind::PeftRt {
                            self.oct_cache
                                .prime_frame(&self.frames[frame].global_dag, self.platform)
                                .map_err(SchedError::from)?;
                        }
                        let base = self.frames[frame].base;
                        let n = self.frames[frame].global_dag.tasks.len();
                        for g in base..base + n {
                            if self.tasks[g].done_preds == self.tasks[g].preds.len() {
                                self.mark_ready(g);
                            }
                        }
                    } else {
                        self.whole_dag_schedule(frame, now)?;
                    }
                }
                EvKind::Completion { task } => self.complete(task, now),
                EvKind::Wake { pe } => {
                    if self.next_wake[pe]
                        .map(|t| qkey(t) == qkey(now))
                        .unwrap_or(false)
                    {
                        self.next_wake[pe] = None;
                    }
                }
            }
            if self.kind.is_ready_queue() && !self.ready_queue.is_empty() {
                self.epoch(now)?;
            }
            self.dispatch(now);
        }

        if self.done_count != self.tasks.len() {
            return Err(SimError::Deadlock(self.deadlock_diagnostic()));
        }
        Ok(())
    }

    fn instantiate(&mut self, app: usize, now: S) -> usize {
        let frame_idx = self.frames.len();
        let dag = &self.workload.mix[app].dag;
        let base = self.tasks.len();
        let index = dag.index_of();

        let mut global_dag = dag.clone();
        for (i, t) in global_dag.tasks.iter_mut().enumerate() {
            t.id = (base + i) as TaskId;
        }
        for e in global_dag.edges.iter_mut() {
            e.src = (base + index[&e.src]) as TaskId;
            e.dst = (base + index[&e.dst]) as TaskId;
        }
        global_dag.app_name = dag.app_name.clone();

        for (i, t) in dag.tasks.iter().enumerate() {
            self.tasks.push(TaskRt {
                global: base + i,
                frame: frame_idx,
                local: t.id,
                state: TaskState::Blocked,
                preds: Vec::new(),
                succs: Vec::new(),
                done_preds: 0,
                planned: None,
                actual: None,
            });
        }
        for e in &global_dag.edges {
            let (s, d) = (e.src as usize, e.dst as usize);
            self.tasks[s].succs.push((d, e.data_volume));
            self.tasks[d].preds.push((s, e.data_volume));
        }
        self.frames.push(FrameRt {
            app,
            base,
            injected: now,
            completed: None,
            remaining: dag.tasks.len(),
            global_dag,
        });
        frame_idx
    }

    fn mark_ready(&mut self, g: usize) {
        debug_assert_eq!(self.tasks[g].state, TaskState::Blocked);
        self.tasks[g].state = TaskState::Ready;
        self.ready_seqs.insert(g, self.ready_seq);
        self.ready_seq += 1;
        self.ready_queue.push(g);
    }

    fn parent_finishes(&self, g: usize) -> Vec<ParentFinish<S>> {
        self.tasks[g]
            .preds
            .iter()
            .filter_map(|(p, volume)| {
                self.tasks[*p].actual.map(|a| ParentFinish {
                    end: a.end,
                    pe: a.pe,
                    volume: *volume,
                })
            })
            .collect()
    }

    /// Per-PE commitments seen by ready-queue schedulers: running intervals
    /// plus previously assigned, not-yet-started plans.
    fn committed_timelines(&self) -> Vec<PeTimeline<S>> {
        let mut timelines: Vec<PeTimeline<S>> =
            (0..self.platform.num_pes()).map(PeTimeline::new).collect();
        for (pe, running) in self.pe_running.iter().enumerate() {
            if let Some(g) = running {
                let a = self.tasks[*g].actual.unwrap();
                timelines[pe].insert(a.start, a.end, a.task);
            }
        }
        for (pe, set) in self.queued.iter().enumerate() {
            for g in set {
                let a = self.tasks[*g].planned.unwrap();
                timelines[pe].insert(a.start, a.end, a.task);
            }
        }
        timelines
    }

    fn running_assignments(&self) -> Vec<Assignment<S>> {
        self.pe_running
            .iter()
            .flatten()
            .map(|g| self.tasks[*g].actual.unwrap())
            .collect()
    }

    fn epoch(&mut self, now: S) -> Result<(), SimError> {
        let ready: Vec<ReadyTask<S>> = self
            .ready_queue
            .iter()
            .map(|g| {
                let t = &self.tasks[*g];
                let mut node = self.node(*g).clone();
                node.id = t.local;
                ReadyTask {
                    global: *g as TaskId,
                    instance: t.frame as u64,
                    node,
                    parents: self.parent_finishes(*g),
                    seq: self.ready_seqs[g],
                }
            })
            .collect();
        let timelines = self.committed_timelines();
        let running = self.running_assignments();
        let input = SchedulerInput {
            mode: ScheduleMode::ReadyQueue,
            outstanding: &[],
            ready: &ready,
            running: &running,
            timelines: &timelines,
            platform: self.platform,
            now,
        };

        let t0 = Instant::now();
        let assignments = match self.kind {
            SchedulerKind::Met => met_schedule(&input)?,
            SchedulerKind::HeftRt => heft_rt(&input)?,
            SchedulerKind::HeftEdp => heft_edp(&input)?,
            SchedulerKind::HeftEdpLb => heft_edp_lb(&input)?,
            SchedulerKind::PeftRt => peft_rt(&input, &self.oct_cache)?,
            other => unreachable!("{other} is not a ready-queue scheduler"),
        };
        let wall = t0.elapsed();
        self.calls.push(SchedCall {
            at: now,
            wall,
            scheduled: assignments.len(),
        });

        for a in assignments {
            let g = a.task as usize;
            debug_assert_eq!(self.tasks[g].state, TaskState::Ready);
            self.tasks[g].state = TaskState::Scheduled;
            self.tasks[g].planned = Some(a);
            self.queued[a.pe].insert(g);
        }
        self.ready_queue.clear();
        Ok(())
    }

    fn outstanding_partials(&self, until_frame: usize) -> Vec<PartialDag<S>> {
        let mut parts = Vec::new();
        for (fi, frame) in self.frames.iter().enumerate().take(until_frame + 1) {
            if frame.remaining == 0 {
                continue;
            }
            let unstarted = |g: usize| {
                matches!(
                    self.tasks[g].state,
                    TaskState::Blocked | TaskState::Scheduled
                )
            };
            let tasks: Vec<_> = frame
                .global_dag
                .tasks
                .iter()
                .filter(|t| unstarted(t.id as usize))
                .cloned()
                .collect();
            if tasks.is_empty() {
                continue;
            }
            let edges: Vec<_> = frame
                .global_dag
                .edges
                .iter()
                .filter(|e| unstarted(e.src as usize) && unstarted(e.dst as usize))
                .cloned()
                .collect();
            let mut ext = std::collections::BTreeMap::new();
            let mut locals = std::collections::BTreeMap::new();
            for t in &tasks {
                let g = t.id as usize;
                locals.insert(t.id, self.tasks[g].local);
                let external: Vec<ParentFinish<S>> = self.tasks[g]
                    .preds
                    .iter()
                    .filter(|(p, _)| !unstarted(*p))
                    .map(|(p, volume)| {
                        let a = self.tasks[*p]
                            .actual
                            .expect("started task has actual times");
                        ParentFinish {
                            end: a.end,
                            pe: a.pe,
                            volume: *volume,
                        }
                    })
                    .collect();
                if !external.is_empty() {
                    ext.insert(t.id, external);
                }
            }
            parts.push(PartialDag {
                instance: fi as u64,
                dag: AppDag {
                    app_name: frame.global_dag.app_name.clone(),
                    tasks,
                    edges,
                },
                locals,
                ext,
            });
        }
        parts
    }

    fn whole_dag_schedule(&mut self, frame: usize, now: S) -> Result<(), SimError> {
        let t0 = Instant::now();
        let (table, replace) = match self.kind {
            SchedulerKind::HeftBase => {
                let mut table = heft_base(&self.frames[frame].global_dag, self.platform)?;
                shift_table(&mut table, now);
                (table, false)
            }
            SchedulerKind::PeftBase => {
                let mut table = peft_base(&self.frames[frame].global_dag, self.platform)?;
                shift_table(&mut table, now);
                (table, false)
            }
            SchedulerKind::HeftDyn => {
                let mut parts = self.outstanding_partials(frame);
                let incoming = parts.pop().expect("incoming frame is outstanding");
                let running = self.running_assignments();
                let timelines = self.running_timelines(&running);
                let input = SchedulerInput {
                    mode: ScheduleMode::WholeDag,
                    outstanding: &parts,
                    ready: &[],
                    running: &running,
                    timelines: &timelines,
                    platform: self.platform,
                    now,
                };
                (heft_dyn(&input, &incoming, self.config.dyn_level)?, true)
            }
            SchedulerKind::Cp => {
                let parts = self.outstanding_partials(frame);
                let running = self.running_assignments();
                let instance = CpInstance {
                    dags: &parts,
                    running: &running,
                    platform: self.platform,
                    now,
                };
                let sol = cp_solve(&instance, &self.config.cp)?;
                if sol.status == CpStatus::Infeasible {
                    return Err(SimError::Infeasible(now.to_config()));
                }
                (sol.table, true)
            }
            other => unreachable!("{other} is not a whole-dag scheduler"),
        };
        let wall = t0.elapsed();
        self.calls.push(SchedCall {
            at: now,
            wall,
            scheduled: table.assignments.len(),
        });
        self.commit_table(table, replace);
        Ok(())
    }

    fn running_timelines(&self, running: &[Assignment<S>]) -> Vec<PeTimeline<S>> {
        let mut timelines: Vec<PeTimeline<S>> =
            (0..self.platform.num_pes()).map(PeTimeline::new).collect();
        for a in running {
            timelines[a.pe].insert(a.start, a.end, a.task);
        }
        timelines
    }

    fn commit_table(&mut self, table: ScheduleTable<S>, replace: bool) {
        if replace {
            for set in &mut self.queued {
                for g in std::mem::take(set) {
                    self.tasks[g].planned = None;
                }
            }
            self.dyn_succs.clear();
            self.dyn_wait.clear();
        }
        for (id, a) in &table.assignments {
            let g = *id as usize;
            debug_assert!(matches!(
                self.tasks[g].state,
                TaskState::Blocked | TaskState::Scheduled
            ));
            self.tasks[g].state = TaskState::Scheduled;
            self.tasks[g].planned = Some(*a);
            self.queued[a.pe].insert(g);
        }
        for (from, to) in &table.dynamic_deps {
            let (from, to) = (*from as usize, *to as usize);
            if self.tasks[from].state != TaskState::Done {
                self.dyn_succs.entry(from).or_default().push(to);
                *self.dyn_wait.entry(to).or_insert(0) += 1;
            }
        }
    }

    fn complete(&mut self, g: usize, now: S) {
        let a = self.tasks[g].actual.expect("completing task was started");
        debug_assert_eq!(self.tasks[g].state, TaskState::Running);
        self.tasks[g].state = TaskState::Done;
        self.done_count += 1;
        self.pe_running[a.pe] = None;

        let (power, task_name) = {
            let node = self.node(g);
            (node.power_on(a.pe).unwrap(), node.name.clone())
        };
        let frame_idx = self.tasks[g].frame;
        self.busy_log[a.pe].push(BusyRecord {
            start: a.start,
            end: a.end,
            frame: frame_idx as u64,
            task_local: self.tasks[g].local,
            task_name,
            power,
        });
        self.dynamic_energy += (a.end - a.start) * power;

        let frame = &mut self.frames[frame_idx];
        frame.remaining -= 1;
        if frame.remaining == 0 {
            frame.completed = Some(now);
        }

        let succs = self.tasks[g].succs.clone();
        for (s, _) in succs {
            self.tasks[s].done_preds += 1;
            if self.kind.is_ready_queue()
                && self.tasks[s].state == TaskState::Blocked
                && self.tasks[s].done_preds == self.tasks[s].preds.len()
            {
                self.mark_ready(s);
            }
        }
        if let Some(dyn_succs) = self.dyn_succs.remove(&g) {
            for s in dyn_succs {
                if let Some(w) = self.dyn_wait.get_mut(&s) {
                    *w = w.saturating_sub(1);
                }
            }
        }
    }

    fn dispatch(&mut self, now: S) {
        for pe in 0..self.platform.num_pes() {
            if self.pe_running[pe].is_some() {
                continue;
            }
            // Earliest data-ready candidate whose DAG and dynamic
            // dependencies are satisfied; ties go to the earlier plan.
            let mut best: Option<((i128, i128, i128, usize), S)> = None;
            for &g in &self.queued[pe] {
                let t = &self.tasks[g];
                if t.done_preds < t.preds.len() {
                    continue;
                }
                if self.dyn_wait.get(&g).copied().unwrap_or(0) > 0 {
                    continue;
                }
                let parents = self.parent_finishes(g);
                let data_ready =
                    crate::sched::earliest_start(&parents, pe, self.platform, S::zero());
                let eff = if data_ready > now { data_ready } else { now };
                let key = (
                    qkey(eff),
                    qkey(data_ready),
                    qkey(t.planned.unwrap().start),
                    g,
                );
                if best.map(|(b, _)| key < b).unwrap_or(true) {
                    best = Some((key, eff));
                }
            }
            let Some(((eff_key, _, _, g), eff)) = best else {
                continue;
            };
            if eff_key > qkey(now) {
                // Not startable yet: wake when its data arrives.
                let need_wake = self.next_wake[pe]
                    .map(|w| qkey(w) > eff_key)
                    .unwrap_or(true);
                if need_wake {
                    self.next_wake[pe] = Some(eff);
                    self.push_event(eff, EvKind::Wake { pe });
                }
                continue;
            }

            // Start the task now.
            self.queued[pe].remove(&g);
            let node = self.node(g);
            let nominal = node.exec_on(pe).unwrap();
            let duration = match self.config.noise {
                Some(eps) => {
                    let u: f64 = self.noise_rng.gen_range(-1.0..=1.0);
                    nominal * (S::one() + eps * S::from_config(u))
                }
                None => nominal,
            };
            let end = now + duration;
            self.tasks[g].state = TaskState::Running;
            self.tasks[g].actual = Some(Assignment {
                task: g as TaskId,
                pe,
                start: now,
                end,
            });
            self.pe_running[pe] = Some(g);
            self.push_event(end, EvKind::Completion { task: g });
        }
    }

    fn deadlock_diagnostic(&self) -> String {
        let stuck: Vec<&TaskRt<S>> = self
            .tasks
            .iter()
            .filter(|t| t.state != TaskState::Done)
            .collect();
        // Look for a cycle among remaining dependencies first.
        let mut indeg: HashMap<usize, usize> = stuck.iter().map(|t| (t.global, 0)).collect();
        let mut adj: HashMap<usize, Vec<usize>> =
            stuck.iter().map(|t| (t.global, vec![])).collect();
        for t in &stuck {
            for (p, _) in &t.preds {
                if indeg.contains_key(p) {
                    adj.get_mut(p).unwrap().push(t.global);
                    *indeg.get_mut(&t.global).unwrap() += 1;
                }
            }
        }
        for (from, tos) in &self.dyn_succs {
            if indeg.contains_key(from) {
                for to in tos {
                    if indeg.contains_key(to) {
                        adj.get_mut(from).unwrap().push(*to);
                        *indeg.get_mut(to).unwrap() += 1;
                    }
                }
            }
        }
        let mut queue: Vec<usize> = indeg
            .iter()
            .filter_map(|(g, d)| (*d == 0).then_some(*g))
            .collect();
        let mut removed = BTreeSet::new();
        while let Some(g) = queue.pop() {
            removed.insert(g);
            for s in &adj[&g] {
                let d = indeg.get_mut(s).unwrap();
                *d -= 1;
                if *d == 0 {
                    queue.push(*s);
                }
            }
        }
        let cyclic: Vec<usize> = stuck
            .iter()
            .map(|t| t.global)
            .filter(|g| !removed.contains(g))
            .collect();
        if !cyclic.is_empty() {
            return format!("dependency cycle among tasks {cyclic:?}");
        }
        let t = stuck.first().expect("deadlock implies unfinished tasks");
        format!(
            "starved task {} (frame {}, local {}, state {:?}): {} of {} predecessors done",
            t.global,
            t.frame,
            t.local,
            t.state,
            t.done_preds,
            t.preds.len()
        )
    }
}

fn shift_table<S: Scalar>(table: &mut ScheduleTable<S>, offset: S) {
    for a in table.assignments.values_mut() {
        a.start += offset;
        a.end += offset;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result_with_calls(wall_secs: &[f64]) -> SimResult<f64> {
        SimResult {
            scheduler: SchedulerKind::HeftRt,
            frames: vec![],
            pe_busy: vec![],
            scheduler_calls: wall_secs
                .iter()
                .enumerate()
                .map(|(i, s)| SchedCall {
                    at: i as f64,
                    wall: Duration::from_secs_f64(*s),
                    scheduled: 1,
                })
                .collect(),
            dynamic_energy: 0.0,
            static_energy: 0.0,
            duration: 10.0,
        }
    }

    #[test]
    fn overhead_profile_mean_and_p95() {
        let profile = profile_scheduler_overhead(&result_with_calls(&[1.0, 2.0, 3.0])).unwrap();
        assert_eq!(profile.mean, Duration::from_secs(2));
        assert_eq!(profile.count, 3);
        assert_eq!(profile.total, Duration::from_secs(6));
        assert_eq!(profile.p95, Duration::from_secs(3));
        // CDF ends at fraction 1.
        assert_eq!(profile.cdf.last().unwrap().1, 1.0);

        let single = profile_scheduler_overhead(&result_with_calls(&[0.5])).unwrap();
        assert_eq!(single.p95, Duration::from_secs_f64(0.5));

        assert!(profile_scheduler_overhead(&result_with_calls(&[])).is_err());
    }

    #[test]
    fn noise_magnitude_is_validated() {
        let platform = crate::model::unit_platform::<f64>(1);
        let workload = crate::model::WorkloadSpec {
            mix: vec![crate::model::MixEntry {
                dag: crate::model::canonical_dag(),
                probability: 1.0,
            }],
            target_frame_rate: 0.01,
            duration: 10.0,
            arrival_distribution: ArrivalDistribution::Fixed,
            seed: 1,
        };
        let config = SimConfig {
            noise: Some(1.5),
            ..SimConfig::default()
        };
        assert!(matches!(
            run(&platform, &workload, SchedulerKind::HeftRt, &config),
            Err(SimError::BadNoise(_))
        ));
    }
}

//! Exact interval scheduling: a depth-first branch-and-bound over
//! (task -> PE, per-PE placement) decisions, plus an exhaustive oracle used to
//! certify it on small instances.
//!
//! Each task is one optional interval per PE; exactly one alternative is
//! present in a solution, intervals on one PE never overlap, every edge
//! enforces end-before-start with its transfer delay, and the objective is the
//! summed span of the instance's DAGs.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::model::{PeId, Platform, TaskId, TaskNode};
use crate::scalar::Scalar;
use crate::sched::{
    earliest_start, eft_insertion, qkey, upward_rank, Assignment, ParentFinish, PeTimeline,
    ScheduleTable,
};
use crate::schedulers::{heft_over_partials, per_pe_order_deps, PartialDag, SchedError};

/// A scheduling problem frozen at one instant: the unscheduled remainder of
/// every DAG in the system, tasks currently running (fixed intervals), and
/// the platform.
#[derive(Debug)]
pub struct CpInstance<'a, S> {
    pub dags: &'a [PartialDag<S>],
    pub running: &'a [Assignment<S>],
    pub platform: &'a Platform<S>,
    pub now: S,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpStatus {
    Optimal,
    FeasibleTimeLimit,
    Infeasible,
}

#[derive(Debug, Clone)]
pub struct CpSolution<S> {
    pub table: ScheduleTable<S>,
    /// Sum over DAGs of (last task end - first task start).
    pub objective: S,
    pub status: CpStatus,
    /// Objective of each incumbent in discovery order; non-increasing.
    pub incumbent_trace: Vec<S>,
}

#[derive(Debug, Clone, Copy)]
pub struct CpConfig {
    pub time_limit: Duration,
    /// Branch over at most this many candidate tasks per node (None = all;
    /// limiting trades the optimality proof for speed).
    pub max_width: Option<usize>,
}

impl Default for CpConfig {
    fn default() -> Self {
        Self {
            time_limit: Duration::from_secs(10),
            max_width: None,
        }
    }
}

#[derive(Debug, Error)]
pub enum CpError {
    #[error("instance has {tasks} tasks, brute force is capped at {max}")]
    TooLarge { tasks: usize, max: usize },
    #[error(transparent)]
    Sched(#[from] SchedError),
}

/// Instance flattened into index space for the search loops.
struct Flat<S> {
    ids: Vec<TaskId>,
    nodes: Vec<TaskNode<S>>,
    dag_of: Vec<usize>,
    n_dags: usize,
    preds: Vec<Vec<(usize, S)>>,
    succs: Vec<Vec<(usize, S)>>,
    ext: Vec<Vec<ParentFinish<S>>>,
    topo: Vec<usize>,
    min_exec: Vec<S>,
    /// Min-exec critical path from the task through its DAG (communication
    /// ignored; admissible remaining-work bound).
    cp_min: Vec<S>,
    /// Min-exec critical path of each whole DAG.
    static_cp: Vec<S>,
    rank: Vec<S>,
}

impl<S: Scalar> Flat<S> {
    fn build(instance: &CpInstance<'_, S>) -> Result<Self, SchedError> {
        let mut ids = Vec::new();
        let mut nodes = Vec::new();
        let mut dag_of = Vec::new();
        let mut ext = Vec::new();
        let mut ix: HashMap<TaskId, usize> = HashMap::new();
        for (d, part) in instance.dags.iter().enumerate() {
            for t in &part.dag.tasks {
                ix.insert(t.id, ids.len());
                ids.push(t.id);
                nodes.push(t.clone());
                dag_of.push(d);
                ext.push(part.ext.get(&t.id).cloned().unwrap_or_default());
            }
        }
        let n = ids.len();
        let mut preds = vec![Vec::new(); n];
        let mut succs = vec![Vec::new(); n];
        let mut topo = Vec::with_capacity(n);
        let mut rank = vec![S::zero(); n];
        for part in instance.dags {
            for e in &part.dag.edges {
                let (s, d) = (ix[&e.src], ix[&e.dst]);
                preds[d].push((s, e.data_volume));
                succs[s].push((d, e.data_volume));
            }
            for id in part.dag.topo_order()? {
                topo.push(ix[&id]);
            }
            let ranks = upward_rank(&part.dag, instance.platform)?;
            for (id, r) in ranks {
                rank[ix[&id]] = r;
            }
        }
        let min_exec: Vec<S> = nodes.iter().map(|t| t.min_exec_time()).collect();
        let mut cp_min = vec![S::zero(); n];
        for &t in topo.iter().rev() {
            let tail = succs[t]
                .iter()
                .map(|(s, _)| cp_min[*s])
                .fold(S::zero(), |acc, v| if v > acc { v } else { acc });
            cp_min[t] = min_exec[t] + tail;
        }
        let mut static_cp = vec![S::zero(); instance.dags.len()];
        for t in 0..n {
            let d = dag_of[t];
            if cp_min[t] > static_cp[d] {
                static_cp[d] = cp_min[t];
            }
        }
        Ok(Self {
            ids,
            nodes,
            dag_of,
            n_dags: instance.dags.len(),
            preds,
            succs,
            ext,
            topo,
            min_exec,
            cp_min,
            static_cp,
            rank,
        })
    }

    fn len(&self) -> usize {
        self.ids.len()
    }
}

#[derive(Clone, Copy)]
struct DagAgg<S> {
    count: usize,
    min_start: S,
    max_end: S,
}

struct Search<'a, S: Scalar> {
    flat: &'a Flat<S>,
    platform: &'a Platform<S>,
    now: S,
    max_width: usize,
    deadline: Instant,
    timed_out: bool,
    node_counter: u32,
    assigned: Vec<Option<Assignment<S>>>,
    blocked_preds: Vec<usize>,
    timelines: Vec<PeTimeline<S>>,
    per_dag: Vec<DagAgg<S>>,
    n_scheduled: usize,
    est: Vec<S>,
    incumbent_obj: S,
    incumbent: Vec<Assignment<S>>,
    trace: Vec<S>,
}

impl<'a, S: Scalar> Search<'a, S> {
    fn objective_now(&self) -> S {
        self.per_dag
            .iter()
            .map(|d| {
                if d.count > 0 {
                    d.max_end - d.min_start
                } else {
                    S::zero()
                }
            })
            .sum()
    }

    /// Admissible lower bound on the final objective from the current state.
    fn lower_bound(&mut self) -> S {
        let flat = self.flat;
        for &t in &flat.topo {
            if self.assigned[t].is_some() {
                continue;
            }
            let mut e = self.now;
            for (p, _) in &flat.preds[t] {
                let lb = match &self.assigned[*p] {
                    Some(a) => a.end,
                    None => self.est[*p] + flat.min_exec[*p],
                };
                if lb > e {
                    e = lb;
                }
            }
            for pf in &flat.ext[t] {
                if pf.end > e {
                    e = pf.end;
                }
            }
            self.est[t] = e;
        }
        let mut bound = S::zero();
        for d in 0..flat.n_dags {
            let agg = &self.per_dag[d];
            let mut span_lb = flat.static_cp[d];
            if agg.count > 0 {
                let mut end_lb = agg.max_end;
                for t in 0..flat.len() {
                    if flat.dag_of[t] == d && self.assigned[t].is_none() {
                        let finish = self.est[t] + flat.cp_min[t];
                        if finish > end_lb {
                            end_lb = finish;
                        }
                    }
                }
                let via_schedule = end_lb - agg.min_start;
                if via_schedule > span_lb {
                    span_lb = via_schedule;
                }
            }
            bound += span_lb;
        }
        bound
    }

    fn place(&mut self, t: usize, a: Assignment<S>) -> (usize, DagAgg<S>) {
        let pos = self.timelines[a.pe].insert_indexed(a.start, a.end, a.task);
        self.assigned[t] = Some(a);
        for (s, _) in &self.flat.succs[t] {
            self.blocked_preds[*s] -= 1;
        }
        let d = self.flat.dag_of[t];
        let saved = self.per_dag[d];
        let agg = &mut self.per_dag[d];
        agg.count += 1;
        if a.start < agg.min_start {
            agg.min_start = a.start;
        }
        if a.end > agg.max_end {
            agg.max_end = a.end;
        }
        self.n_scheduled += 1;
        (pos, saved)
    }

    fn unplace(&mut self, t: usize, pe: PeId, pos: usize, saved: DagAgg<S>) {
        self.timelines[pe].remove_at(pos);
        self.assigned[t] = None;
        for (s, _) in &self.flat.succs[t] {
            self.blocked_preds[*s] += 1;
        }
        self.per_dag[self.flat.dag_of[t]] = saved;
        self.n_scheduled -= 1;
    }

    fn out_of_time(&mut self) -> bool {
        if self.timed_out {
            return true;
        }
        self.node_counter += 1;
        if self.node_counter.is_multiple_of(1024) && Instant::now() >= self.deadline {
            self.timed_out = true;
        }
        self.timed_out
    }

    fn dfs(&mut self) {
        if self.out_of_time() {
            return;
        }
        if self.n_scheduled == self.flat.len() {
            let obj = self.objective_now();
            if obj < self.incumbent_obj {
                self.incumbent_obj = obj;
                self.incumbent = self.assigned.iter().map(|a| a.unwrap()).collect();
                self.trace.push(obj);
            }
            return;
        }

        let mut candidates: Vec<usize> = (0..self.flat.len())
            .filter(|t| self.assigned[*t].is_none() && self.blocked_preds[*t] == 0)
            .collect();
        candidates.sort_by_key(|t| {
            (
                std::cmp::Reverse(qkey(self.flat.rank[*t])),
                self.flat.ids[*t],
            )
        });
        candidates.truncate(self.max_width);

        for t in candidates {
            let node = &self.flat.nodes[t];
            let mut parents: Vec<ParentFinish<S>> = self.flat.preds[t]
                .iter()
                .map(|(p, volume)| {
                    let a = self.assigned[*p].expect("candidate has all parents scheduled");
                    ParentFinish {
                        end: a.end,
                        pe: a.pe,
                        volume: *volume,
                    }
                })
                .collect();
            parents.extend(self.flat.ext[t].iter().copied());

            let mut options: Vec<(PeId, S, S)> = node
                .supported_pes()
                .map(|pe| {
                    let ready = earliest_start(&parents, pe, self.platform, self.now);
                    let w = node.exec_on(pe).unwrap();
                    let (start, end) = eft_insertion(w, &self.timelines[pe], ready);
                    (pe, start, end)
                })
                .collect();
            options.sort_by_key(|(pe, _, end)| (qkey(*end), *pe));

            for (pe, start, end) in options {
                let a = Assignment {
                    task: self.flat.ids[t],
                    pe,
                    start,
                    end,
                };
                let (pos, saved) = self.place(t, a);
                // Search times are exact-arithmetic comparable; epsilon keeps
                // equal-cost float chains from reopening proven subtrees.
                if self.lower_bound() < self.incumbent_obj - S::from_config(1e-9) {
                    self.dfs();
                }
                self.unplace(t, pe, pos, saved);
                if self.timed_out {
                    return;
                }
            }
        }
    }
}

/// Exact solve of `instance`: warm-started depth-first branch-and-bound over
/// task order, PE alternatives and insertion slots, bounded by per-DAG
/// critical-path remainders. Returns the best incumbent at the time limit.
pub fn cp_solve<S: Scalar>(
    instance: &CpInstance<'_, S>,
    config: &CpConfig,
) -> Result<CpSolution<S>, CpError> {
    let unsupported = instance.dags.iter().any(|p| {
        p.dag
            .tasks
            .iter()
            .any(|t| t.supported_pes().next().is_none())
    });
    if unsupported {
        return Ok(CpSolution {
            table: ScheduleTable::new(),
            objective: S::infinity(),
            status: CpStatus::Infeasible,
            incumbent_trace: Vec::new(),
        });
    }
    let flat = Flat::build(instance)?;
    if flat.len() == 0 {
        return Ok(CpSolution {
            table: ScheduleTable::new(),
            objective: S::zero(),
            status: CpStatus::Optimal,
            incumbent_trace: Vec::new(),
        });
    }

    let mut timelines: Vec<PeTimeline<S>> = (0..instance.platform.num_pes())
        .map(PeTimeline::new)
        .collect();
    for a in instance.running {
        timelines[a.pe].insert(a.start, a.end, a.task);
    }

    // Warm start: the dynamic list scheduler over the same state.
    let parts: Vec<&PartialDag<S>> = instance.dags.iter().collect();
    let warm = heft_over_partials(
        &parts,
        timelines.clone(),
        instance.platform,
        instance.now,
        false,
        instance.running,
    )?;
    let warm_obj = table_objective(instance, &warm);

    let mut search = Search {
        flat: &flat,
        platform: instance.platform,
        now: instance.now,
        max_width: config.max_width.unwrap_or(usize::MAX),
        deadline: Instant::now() + config.time_limit,
        timed_out: false,
        node_counter: 0,
        assigned: vec![None; flat.len()],
        blocked_preds: flat.preds.iter().map(|p| p.len()).collect(),
        timelines,
        per_dag: vec![
            DagAgg {
                count: 0,
                min_start: S::infinity(),
                max_end: S::neg_infinity()
            };
            flat.n_dags
        ],
        n_scheduled: 0,
        est: vec![S::zero(); flat.len()],
        incumbent_obj: warm_obj,
        incumbent: warm.assignments.values().copied().collect(),
        trace: vec![warm_obj],
    };
    search.dfs();

    let mut table = ScheduleTable::new();
    for a in &search.incumbent {
        table.assignments.insert(a.task, *a);
    }
    table.dynamic_deps = per_pe_order_deps(&table, instance.platform.num_pes(), instance.running);
    // A width-limited search never proves optimality even when it finishes.
    let proven = !search.timed_out && config.max_width.is_none();
    let status = if proven {
        CpStatus::Optimal
    } else {
        CpStatus::FeasibleTimeLimit
    };
    Ok(CpSolution {
        objective: search.incumbent_obj,
        table,
        status,
        incumbent_trace: search.trace,
    })
}

/// Objective of a finished table for this instance: summed per-DAG spans.
pub fn table_objective<S: Scalar>(instance: &CpInstance<'_, S>, table: &ScheduleTable<S>) -> S {
    let mut total = S::zero();
    for part in instance.dags {
        let mut min_start = S::infinity();
        let mut max_end = S::neg_infinity();
        let mut any = false;
        for t in &part.dag.tasks {
            if let Some(a) = table.assignments.get(&t.id) {
                any = true;
                if a.start < min_start {
                    min_start = a.start;
                }
                if a.end > max_end {
                    max_end = a.end;
                }
            }
        }
        if any {
            total += max_end - min_start;
        }
    }
    total
}

/// Exhaustive oracle: enumerate every task-to-PE map and every topological
/// interleaving (depth-first over ready tasks, append placement), returning
/// the true minimum objective. Independent of [`cp_solve`]'s insertion-based
/// search; capped at `max_tasks` tasks.
///
/// Append placement is exact as long as each PE has at most one fixed running
/// interval (which then covers `now`) — the state a simulation produces.
pub fn brute_force_optimal<S: Scalar>(
    instance: &CpInstance<'_, S>,
    max_tasks: usize,
) -> Result<S, CpError> {
    let flat = Flat::build(instance)?;
    if flat.len() > max_tasks {
        return Err(CpError::TooLarge {
            tasks: flat.len(),
            max: max_tasks,
        });
    }
    if flat.len() == 0 {
        return Ok(S::zero());
    }

    let n = flat.len();
    let z = instance.platform.num_pes();
    let mut pe_free = vec![S::zero(); z];
    for a in instance.running {
        if a.end > pe_free[a.pe] {
            pe_free[a.pe] = a.end;
        }
    }

    struct Enumerate<'b, S: Scalar> {
        flat: &'b Flat<S>,
        platform: &'b Platform<S>,
        now: S,
        ends: Vec<S>,
        pes: Vec<PeId>,
        done: Vec<bool>,
        blocked: Vec<usize>,
        pe_free: Vec<S>,
        per_dag: Vec<DagAgg<S>>,
        left: usize,
        best: S,
    }

    impl<'b, S: Scalar> Enumerate<'b, S> {
        fn current_obj(&self) -> S {
            self.per_dag
                .iter()
                .map(|d| {
                    if d.count > 0 {
                        d.max_end - d.min_start
                    } else {
                        S::zero()
                    }
                })
                .sum()
        }

        fn go(&mut self) {
            if self.left == 0 {
                let obj = self.current_obj();
                if obj < self.best {
                    self.best = obj;
                }
                return;
            }
            for t in 0..self.flat.len() {
                if self.done[t] || self.blocked[t] > 0 {
                    continue;
                }
                let node = &self.flat.nodes[t];
                for pe in node.supported_pes() {
                    let mut start = if self.pe_free[pe] > self.now {
                        self.pe_free[pe]
                    } else {
                        self.now
                    };
                    for (p, volume) in &self.flat.preds[t] {
                        let arrival =
                            self.ends[*p] + self.platform.comm_time(self.pes[*p], pe, *volume);
                        if arrival > start {
                            start = arrival;
                        }
                    }
                    for pf in &self.flat.ext[t] {
                        let arrival = pf.end + self.platform.comm_time(pf.pe, pe, pf.volume);
                        if arrival > start {
                            start = arrival;
                        }
                    }
                    let end = start + node.exec_on(pe).unwrap();

                    let saved_free = self.pe_free[pe];
                    let d = self.flat.dag_of[t];
                    let saved_agg = self.per_dag[d];
                    self.ends[t] = end;
                    self.pes[t] = pe;
                    self.done[t] = true;
                    self.pe_free[pe] = end;
                    for (s, _) in &self.flat.succs[t] {
                        self.blocked[*s] -= 1;
                    }
                    let agg = &mut self.per_dag[d];
                    agg.count += 1;
                    if start < agg.min_start {
                        agg.min_start = start;
                    }
                    if end > agg.max_end {
                        agg.max_end = end;
                    }
                    self.left -= 1;

                    // Spans only grow as tasks are added, so the running
                    // objective is itself a lower bound.
                    if self.current_obj() < self.best {
                        self.go();
                    }

                    self.left += 1;
                    self.per_dag[d] = saved_agg;
                    for (s, _) in &self.flat.succs[t] {
                        self.blocked[*s] += 1;
                    }
                    self.pe_free[pe] = saved_free;
                    self.done[t] = false;
                }
            }
        }
    }

    let mut e = Enumerate {
        flat: &flat,
        platform: instance.platform,
        now: instance.now,
        ends: vec![S::zero(); n],
        pes: vec![0; n],
        done: vec![false; n],
        blocked: flat.preds.iter().map(|p| p.len()).collect(),
        pe_free,
        per_dag: vec![
            DagAgg {
                count: 0,
                min_start: S::infinity(),
                max_end: S::neg_infinity()
            };
            flat.n_dags
        ],
        left: n,
        best: S::infinity(),
    };
    e.go();
    Ok(e.best)
}

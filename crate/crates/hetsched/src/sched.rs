//! Shared list-scheduling machinery: ranking, earliest-start computation,
//! insertion-based slot search and schedule validation.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::model::{avg_comm_cost, AppDag, ModelError, PeId, Platform, TaskId, TaskNode};
use crate::scalar::Scalar;

/// One task placed on one PE for a time window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assignment<S> {
    pub task: TaskId,
    pub pe: PeId,
    pub start: S,
    pub end: S,
}

/// Scheduler output: per-task placements plus the ordering edges the runtime
/// must honor when dispatching.
#[derive(Debug, Clone, Default)]
pub struct ScheduleTable<S> {
    pub assignments: BTreeMap<TaskId, Assignment<S>>,
    pub dynamic_deps: Vec<(TaskId, TaskId)>,
}

impl<S: Scalar> ScheduleTable<S> {
    pub fn new() -> Self {
        Self {
            assignments: BTreeMap::new(),
            dynamic_deps: Vec::new(),
        }
    }

    /// End of the last assignment minus start of the first; zero when empty.
    pub fn makespan(&self) -> S {
        let mut min_start = S::infinity();
        let mut max_end = S::neg_infinity();
        for a in self.assignments.values() {
            if a.start < min_start {
                min_start = a.start;
            }
            if a.end > max_end {
                max_end = a.end;
            }
        }
        if self.assignments.is_empty() {
            S::zero()
        } else {
            max_end - min_start
        }
    }
}

/// Busy interval on one PE.
#[derive(Debug, Clone, Copy)]
pub struct BusySlot<S> {
    pub start: S,
    pub end: S,
    pub task: TaskId,
}

/// Ordered, non-overlapping busy intervals of one PE.
#[derive(Debug, Clone)]
pub struct PeTimeline<S> {
    pub pe: PeId,
    busy: Vec<BusySlot<S>>,
}

impl<S: Scalar> PeTimeline<S> {
    pub fn new(pe: PeId) -> Self {
        Self {
            pe,
            busy: Vec::new(),
        }
    }

    pub fn from_slots(pe: PeId, mut slots: Vec<BusySlot<S>>) -> Self {
        slots.sort_by(|a, b| crate::scalar::cmp_finite(&a.start, &b.start));
        Self { pe, busy: slots }
    }

    pub fn slots(&self) -> &[BusySlot<S>] {
        &self.busy
    }

    pub fn last_end(&self) -> S {
        self.busy.last().map(|s| s.end).unwrap_or_else(S::zero)
    }

    /// Insert a busy interval, keeping the list ordered by start.
    pub fn insert(&mut self, start: S, end: S, task: TaskId) {
        self.insert_indexed(start, end, task);
    }

    /// Insert and return the position, so search code can undo the placement.
    pub fn insert_indexed(&mut self, start: S, end: S, task: TaskId) -> usize {
        let pos = self
            .busy
            .partition_point(|s| s.start < start || (s.start == start && s.end <= start));
        self.busy.insert(pos, BusySlot { start, end, task });
        pos
    }

    /// Remove the interval at `pos` (inverse of [`Self::insert_indexed`]).
    pub fn remove_at(&mut self, pos: usize) {
        self.busy.remove(pos);
    }
}

/// Earliest slot of length `duration` starting at or after `ready`, either in
/// an idle gap of the timeline or after its last interval. Does not mutate.
pub fn eft_insertion<S: Scalar>(duration: S, timeline: &PeTimeline<S>, ready: S) -> (S, S) {
    let mut prev_end = S::zero();
    for slot in timeline.slots() {
        let candidate = if ready > prev_end { ready } else { prev_end };
        if candidate + duration <= slot.start {
            return (candidate, candidate + duration);
        }
        prev_end = if slot.end > prev_end {
            slot.end
        } else {
            prev_end
        };
    }
    let start = if ready > prev_end { ready } else { prev_end };
    (start, start + duration)
}

/// A resolved predecessor: when and where its output becomes available.
#[derive(Debug, Clone, Copy)]
pub struct ParentFinish<S> {
    pub end: S,
    pub pe: PeId,
    pub volume: S,
}

/// Earliest time a task's inputs are all present on `pe`: the max over parents
/// of finish time plus link transfer delay, never before `now`.
pub fn earliest_start<S: Scalar>(
    parents: &[ParentFinish<S>],
    pe: PeId,
    platform: &Platform<S>,
    now: S,
) -> S {
    let mut ready = now;
    for p in parents {
        let arrival = p.end + platform.comm_time(p.pe, pe, p.volume);
        if arrival > ready {
            ready = arrival;
        }
    }
    ready
}

/// Quantized comparison key: collapses differences below 1e-9 so that tie
/// breaking over floating-point ranks and finish times is deterministic.
pub fn qkey<S: Scalar>(v: S) -> i128 {
    (v.to_config() * 1e9).round() as i128
}

/// Ranks computed by the upward recursion, keyed by task id.
pub type RankMap<S> = HashMap<TaskId, S>;

fn upward_rank_with<S: Scalar>(
    dag: &AppDag<S>,
    platform: &Platform<S>,
    node_weight: impl Fn(&TaskNode<S>) -> S,
) -> Result<RankMap<S>, ModelError> {
    let order = dag.topo_order()?;
    let succ = dag.successors();
    let index = dag.index_of();
    let mut ranks: RankMap<S> = HashMap::with_capacity(order.len());
    for id in order.iter().rev() {
        let node = &dag.tasks[index[id]];
        let mut tail = S::zero();
        for (succ_id, volume) in &succ[id] {
            let c = avg_comm_cost(*volume, platform);
            let r = c + ranks[succ_id];
            if r > tail {
                tail = r;
            }
        }
        ranks.insert(*id, node_weight(node) + tail);
    }
    Ok(ranks)
}

/// Critical-path-to-exit rank: node weight is the mean execution time.
pub fn upward_rank<S: Scalar>(
    dag: &AppDag<S>,
    platform: &Platform<S>,
) -> Result<RankMap<S>, ModelError> {
    upward_rank_with(dag, platform, |t| t.mean_exec_time())
}

/// Energy-delay variant: node weight is mean-exec-squared times mean power.
pub fn upward_rank_edp<S: Scalar>(
    dag: &AppDag<S>,
    platform: &Platform<S>,
) -> Result<RankMap<S>, ModelError> {
    upward_rank_with(dag, platform, |t| {
        t.mean_exec_time() * t.mean_exec_time() * t.mean_power()
    })
}

/// Sort ids by non-increasing rank; ties resolve by smaller local task id,
/// then smaller instance id.
pub fn sort_by_rank_desc<S: Scalar>(
    ids: &mut [TaskId],
    ranks: &RankMap<S>,
    meta: impl Fn(TaskId) -> (TaskId, u64),
) {
    ids.sort_by_key(|id| {
        let (local, instance) = meta(*id);
        (std::cmp::Reverse(qkey(ranks[id])), local, instance)
    });
}

/// Pop-order key: (rank descending, local id, instance id), then the global
/// id to keep heap entries distinct.
type PopKey = ((std::cmp::Reverse<i128>, TaskId, u64), TaskId);

/// Scheduling order for a list scheduler: repeatedly pop the highest-rank
/// task whose predecessors are already popped. Equals the plain descending
/// sort whenever ranks dominate along edges, and stays precedence-safe for
/// rank metrics that do not.
pub fn rank_order_respecting_precedence<S: Scalar>(
    dag: &AppDag<S>,
    ranks: &RankMap<S>,
    meta: impl Fn(TaskId) -> (TaskId, u64),
) -> Vec<TaskId> {
    let preds = dag.predecessors();
    let succs = dag.successors();
    let key = |id: TaskId| {
        let (local, instance) = meta(id);
        (std::cmp::Reverse(qkey(ranks[&id])), local, instance)
    };
    let mut blocked: BTreeMap<TaskId, usize> = dag
        .tasks
        .iter()
        .map(|t| (t.id, preds[&t.id].len()))
        .collect();
    let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<PopKey>> = dag
        .tasks
        .iter()
        .filter(|t| blocked[&t.id] == 0)
        .map(|t| std::cmp::Reverse((key(t.id), t.id)))
        .collect();
    let mut order = Vec::with_capacity(dag.tasks.len());
    while let Some(std::cmp::Reverse((_, id))) = heap.pop() {
        order.push(id);
        for (s, _) in &succs[&id] {
            let b = blocked.get_mut(s).expect("edge endpoints exist");
            *b -= 1;
            if *b == 0 {
                heap.push(std::cmp::Reverse((key(*s), *s)));
            }
        }
    }
    debug_assert_eq!(
        order.len(),
        dag.tasks.len(),
        "cycle slipped past validation"
    );
    order
}

/// A broken schedule invariant found by [`validate_schedule`].
#[derive(Debug, Clone)]
pub enum Violation {
    MissingAssignment {
        task: TaskId,
    },
    UnsupportedPe {
        task: TaskId,
        pe: PeId,
    },
    DurationMismatch {
        task: TaskId,
        expected: f64,
        got: f64,
    },
    Overlap {
        pe: PeId,
        first: TaskId,
        second: TaskId,
    },
    Precedence {
        src: TaskId,
        dst: TaskId,
        required: f64,
        got: f64,
    },
    DanglingDynamicDep {
        from: TaskId,
        to: TaskId,
    },
    DependencyCycle,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingAssignment { task } => write!(f, "task {task} has no assignment"),
            Violation::UnsupportedPe { task, pe } => {
                write!(f, "task {task} assigned to unsupported PE {pe}")
            }
            Violation::DurationMismatch {
                task,
                expected,
                got,
            } => {
                write!(f, "task {task} duration {got} != execution time {expected}")
            }
            Violation::Overlap { pe, first, second } => {
                write!(f, "tasks {first} and {second} overlap on PE {pe}")
            }
            Violation::Precedence {
                src,
                dst,
                required,
                got,
            } => {
                write!(
                    f,
                    "task {dst} starts at {got}, before data from {src} arrives at {required}"
                )
            }
            Violation::DanglingDynamicDep { from, to } => {
                write!(
                    f,
                    "dynamic dependency ({from}, {to}) references an unknown task"
                )
            }
            Violation::DependencyCycle => write!(f, "combined dependency graph has a cycle"),
        }
    }
}

const SLACK: f64 = 1e-9;

/// Check a schedule against its source DAGs: one assignment per task on a
/// supporting PE, per-PE non-overlap (including externally `running` tasks),
/// data-transfer-aware precedence, and acyclicity of DAG edges plus dynamic
/// dependencies. Violations are returned, not raised.
pub fn validate_schedule<S: Scalar>(
    table: &ScheduleTable<S>,
    dags: &[&AppDag<S>],
    platform: &Platform<S>,
    running: &[Assignment<S>],
) -> Vec<Violation> {
    let mut violations = Vec::new();

    let mut nodes: HashMap<TaskId, &TaskNode<S>> = HashMap::new();
    for dag in dags {
        for t in &dag.tasks {
            nodes.insert(t.id, t);
        }
    }

    for (id, node) in &nodes {
        match table.assignments.get(id) {
            None => violations.push(Violation::MissingAssignment { task: *id }),
            Some(a) => match node.exec_on(a.pe) {
                None => violations.push(Violation::UnsupportedPe {
                    task: *id,
                    pe: a.pe,
                }),
                Some(w) => {
                    let got = (a.end - a.start).to_config();
                    if (got - w.to_config()).abs() > SLACK {
                        violations.push(Violation::DurationMismatch {
                            task: *id,
                            expected: w.to_config(),
                            got,
                        });
                    }
                }
            },
        }
    }

    // Per-PE non-overlap over scheduled plus running intervals.
    let mut per_pe: HashMap<PeId, Vec<&Assignment<S>>> = HashMap::new();
    for a in table.assignments.values().chain(running.iter()) {
        per_pe.entry(a.pe).or_default().push(a);
    }
    let mut pes: Vec<PeId> = per_pe.keys().copied().collect();
    pes.sort_unstable();
    for pe in pes {
        let list = per_pe.get_mut(&pe).unwrap();
        list.sort_by(|a, b| crate::scalar::cmp_finite(&a.start, &b.start));
        for pair in list.windows(2) {
            if pair[1].start.to_config() < pair[0].end.to_config() - SLACK {
                violations.push(Violation::Overlap {
                    pe,
                    first: pair[0].task,
                    second: pair[1].task,
                });
            }
        }
    }

    // Precedence with communication delay; source may be a running task.
    let running_by_id: HashMap<TaskId, &Assignment<S>> =
        running.iter().map(|a| (a.task, a)).collect();
    let lookup = |id: TaskId| {
        table
            .assignments
            .get(&id)
            .or_else(|| running_by_id.get(&id).copied())
    };
    for dag in dags {
        for e in &dag.edges {
            let (Some(src), Some(dst)) = (lookup(e.src), lookup(e.dst)) else {
                continue; // missing endpoints already reported above
            };
            let required = src.end + platform.comm_time(src.pe, dst.pe, e.data_volume);
            if dst.start.to_config() < required.to_config() - SLACK {
                violations.push(Violation::Precedence {
                    src: e.src,
                    dst: e.dst,
                    required: required.to_config(),
                    got: dst.start.to_config(),
                });
            }
        }
    }

    // Dynamic dependencies must reference scheduled or running tasks and the
    // combined graph must stay acyclic.
    let known: HashSet<TaskId> = table
        .assignments
        .keys()
        .copied()
        .chain(running.iter().map(|a| a.task))
        .collect();
    for (from, to) in &table.dynamic_deps {
        if !known.contains(from) || !known.contains(to) {
            violations.push(Violation::DanglingDynamicDep {
                from: *from,
                to: *to,
            });
        }
    }
    if has_cycle(dags, &table.dynamic_deps) {
        violations.push(Violation::DependencyCycle);
    }

    violations
}

fn has_cycle<S: Scalar>(dags: &[&AppDag<S>], dynamic_deps: &[(TaskId, TaskId)]) -> bool {
    let mut adj: HashMap<TaskId, Vec<TaskId>> = HashMap::new();
    let mut indeg: HashMap<TaskId, usize> = HashMap::new();
    let touch =
        |id: TaskId, adj: &mut HashMap<TaskId, Vec<TaskId>>, indeg: &mut HashMap<TaskId, usize>| {
            adj.entry(id).or_default();
            indeg.entry(id).or_insert(0);
        };
    for dag in dags {
        for t in &dag.tasks {
            touch(t.id, &mut adj, &mut indeg);
        }
        for e in &dag.edges {
            touch(e.src, &mut adj, &mut indeg);
            touch(e.dst, &mut adj, &mut indeg);
            adj.get_mut(&e.src).unwrap().push(e.dst);
            *indeg.get_mut(&e.dst).unwrap() += 1;
        }
    }
    for (from, to) in dynamic_deps {
        touch(*from, &mut adj, &mut indeg);
        touch(*to, &mut adj, &mut indeg);
        adj.get_mut(from).unwrap().push(*to);
        *indeg.get_mut(to).unwrap() += 1;
    }
    let mut queue: VecDeque<TaskId> = indeg
        .iter()
        .filter_map(|(id, d)| (*d == 0).then_some(*id))
        .collect();
    let mut seen = 0usize;
    while let Some(id) = queue.pop_front() {
        seen += 1;
        for next in &adj[&id] {
            let d = indeg.get_mut(next).unwrap();
            *d -= 1;
            if *d == 0 {
                queue.push_back(*next);
            }
        }
    }
    seen != indeg.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{canonical_dag, unit_platform, Edge};
    use approx::assert_relative_eq;

    fn canonical_setup() -> (AppDag<f64>, Platform<f64>) {
        (canonical_dag(), unit_platform(3))
    }

    /// Plain memoized recursion, independent of the iterative implementation.
    fn rank_recursive(
        dag: &AppDag<f64>,
        platform: &Platform<f64>,
        id: TaskId,
        memo: &mut HashMap<TaskId, f64>,
        weight: &dyn Fn(&TaskNode<f64>) -> f64,
    ) -> f64 {
        if let Some(r) = memo.get(&id) {
            return *r;
        }
        let node = dag.task(id).unwrap();
        let mut tail: f64 = 0.0;
        for e in &dag.edges {
            if e.src == id {
                let r = avg_comm_cost(e.data_volume, platform)
                    + rank_recursive(dag, platform, e.dst, memo, weight);
                tail = tail.max(r);
            }
        }
        let rank = weight(node) + tail;
        memo.insert(id, rank);
        rank
    }

    #[test]
    fn canonical_upward_ranks() {
        let (dag, platform) = canonical_setup();
        let ranks = upward_rank(&dag, &platform).unwrap();
        assert_relative_eq!(ranks[&10], 44.0 / 3.0, epsilon = 1e-9);
        assert_relative_eq!(ranks[&1], 108.0, epsilon = 1e-9);
        // Cross-check every task against an independent memoized recursion.
        let mut memo = HashMap::new();
        for t in &dag.tasks {
            let expect = rank_recursive(&dag, &platform, t.id, &mut memo, &|n| n.mean_exec_time());
            assert_relative_eq!(ranks[&t.id], expect, epsilon = 1e-9);
        }
    }

    #[test]
    fn single_task_rank_is_its_mean() {
        let dag = AppDag::<f64> {
            app_name: "one".into(),
            tasks: vec![TaskNode {
                id: 0,
                name: "t".into(),
                exec_time: vec![Some(6.0), Some(6.0)],
                power: vec![Some(1.0), Some(1.0)],
            }],
            edges: vec![],
        };
        let ranks = upward_rank(&dag, &unit_platform(2)).unwrap();
        assert_relative_eq!(ranks[&0], 6.0);
    }

    #[test]
    fn edp_rank_values() {
        let (dag, platform) = canonical_setup();
        let ranks = upward_rank_edp(&dag, &platform).unwrap();
        // Exit task: (44/3)^2 * 1 W.
        assert_relative_eq!(ranks[&10], (44.0f64 / 3.0).powi(2), epsilon = 1e-9);

        let single = AppDag::<f64> {
            app_name: "one".into(),
            tasks: vec![TaskNode {
                id: 0,
                name: "t".into(),
                exec_time: vec![Some(10.0)],
                power: vec![Some(2.0)],
            }],
            edges: vec![],
        };
        let r = upward_rank_edp(&single, &unit_platform(1)).unwrap();
        assert_relative_eq!(r[&0], 200.0);

        // Zero power kills the node-weight term.
        let zero_p = AppDag::<f64> {
            app_name: "zp".into(),
            tasks: vec![TaskNode {
                id: 0,
                name: "t".into(),
                exec_time: vec![Some(10.0)],
                power: vec![Some(0.0)],
            }],
            edges: vec![],
        };
        let r = upward_rank_edp(&zero_p, &unit_platform(1)).unwrap();
        assert_relative_eq!(r[&0], 0.0);
    }

    #[test]
    fn rank_monotone_along_edges() {
        let (dag, platform) = canonical_setup();
        let ranks = upward_rank(&dag, &platform).unwrap();
        for e in &dag.edges {
            let w = dag.task(e.src).unwrap().mean_exec_time();
            assert!(ranks[&e.src] >= w + ranks[&e.dst] - 1e-9);
            assert!(ranks[&e.src] > ranks[&e.dst]);
        }
    }

    #[test]
    fn earliest_start_examples() {
        let platform = unit_platform(3);
        assert_relative_eq!(earliest_start::<f64>(&[], 0, &platform, 0.0), 0.0);
        // Same-PE parent: zero transfer delay.
        let same = [ParentFinish {
            end: 9.0,
            pe: 1,
            volume: 18.0,
        }];
        assert_relative_eq!(earliest_start(&same, 1, &platform, 0.0), 9.0);
        // Cross-PE parent pays volume / bandwidth.
        assert_relative_eq!(earliest_start(&same, 0, &platform, 0.0), 27.0);
        // Clamped to `now`.
        assert_relative_eq!(earliest_start(&same, 1, &platform, 12.0), 12.0);
    }

    #[test]
    fn eft_insertion_examples() {
        let empty = PeTimeline::<f64>::new(0);
        assert_eq!(eft_insertion(10.0, &empty, 5.0), (5.0, 15.0));

        let tl = PeTimeline::from_slots(
            0,
            vec![
                BusySlot {
                    start: 0.0,
                    end: 10.0,
                    task: 1,
                },
                BusySlot {
                    start: 20.0,
                    end: 30.0,
                    task: 2,
                },
            ],
        );
        // Exact gap fit.
        assert_eq!(eft_insertion(10.0, &tl, 0.0), (10.0, 20.0));
        // One unit too long: forced to append.
        assert_eq!(eft_insertion(11.0, &tl, 0.0), (30.0, 41.0));
    }

    #[test]
    fn eft_insertion_matches_brute_force_scan() {
        // Candidate starts are the ready time and every busy-interval end.
        let tl = PeTimeline::from_slots(
            0,
            vec![
                BusySlot {
                    start: 2.0,
                    end: 5.0,
                    task: 1,
                },
                BusySlot {
                    start: 9.0,
                    end: 12.0,
                    task: 2,
                },
                BusySlot {
                    start: 14.0,
                    end: 20.0,
                    task: 3,
                },
            ],
        );
        for ready in [0.0f64, 1.0, 4.0, 6.0, 13.0, 25.0] {
            for w in [1.0f64, 2.0, 3.0, 5.0, 7.0] {
                let (start, end) = eft_insertion(w, &tl, ready);
                let mut candidates = vec![ready, 0.0];
                for s in tl.slots() {
                    candidates.push(s.end);
                }
                let feasible = |s: f64| {
                    s >= ready && tl.slots().iter().all(|b| s + w <= b.start || s >= b.end)
                };
                let best = candidates
                    .into_iter()
                    .filter(|s| feasible(*s))
                    .fold(f64::INFINITY, f64::min);
                assert_relative_eq!(start, best);
                assert_relative_eq!(end, best + w);
                assert!(feasible(start));
            }
        }
    }

    #[test]
    fn validate_catches_overlap_and_precedence() {
        let (dag, platform) = canonical_setup();
        let mut table = ScheduleTable::<f64>::new();
        // Two overlapping tasks on PE 0 and a dst starting before its input.
        for t in &dag.tasks {
            table.assignments.insert(
                t.id,
                Assignment {
                    task: t.id,
                    pe: 0,
                    start: 0.0,
                    end: t.exec_on(0).unwrap(),
                },
            );
        }
        let violations = validate_schedule(&table, &[&dag], &platform, &[]);
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::Overlap { .. })));
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::Precedence { .. })));
    }

    #[test]
    fn validate_detects_dynamic_dep_cycle() {
        let platform = unit_platform(1);
        let dag = AppDag::<f64> {
            app_name: "pair".into(),
            tasks: vec![
                TaskNode {
                    id: 0,
                    name: "a".into(),
                    exec_time: vec![Some(1.0)],
                    power: vec![Some(1.0)],
                },
                TaskNode {
                    id: 1,
                    name: "b".into(),
                    exec_time: vec![Some(1.0)],
                    power: vec![Some(1.0)],
                },
            ],
            edges: vec![Edge {
                src: 0,
                dst: 1,
                data_volume: 0.0,
            }],
        };
        let mut table = ScheduleTable::<f64>::new();
        table.assignments.insert(
            0,
            Assignment {
                task: 0,
                pe: 0,
                start: 0.0,
                end: 1.0,
            },
        );
        table.assignments.insert(
            1,
            Assignment {
                task: 1,
                pe: 0,
                start: 1.0,
                end: 2.0,
            },
        );
        table.dynamic_deps.push((1, 0));
        let violations = validate_schedule(&table, &[&dag], &platform, &[]);
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::DependencyCycle)));
    }

    #[test]
    fn validate_honors_running_constraints() {
        let platform = unit_platform(2);
        let dag = AppDag::<f64> {
            app_name: "single".into(),
            tasks: vec![TaskNode {
                id: 5,
                name: "t".into(),
                exec_time: vec![Some(4.0), Some(4.0)],
                power: vec![Some(1.0), Some(1.0)],
            }],
            edges: vec![],
        };
        let running = [Assignment {
            task: 99,
            pe: 0,
            start: 0.0,
            end: 10.0,
        }];
        let mut table = ScheduleTable::<f64>::new();
        table.assignments.insert(
            5,
            Assignment {
                task: 5,
                pe: 0,
                start: 8.0,
                end: 12.0,
            },
        );
        let violations = validate_schedule(&table, &[&dag], &platform, &running);
        assert!(violations
            .iter()
            .any(|v| matches!(v, Violation::Overlap { .. })));
    }
}

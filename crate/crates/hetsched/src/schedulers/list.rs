//! MET and the HEFT-derived schedulers.

use std::collections::{BTreeMap, HashMap};

use crate::model::{AppDag, Edge, PeId, Platform, TaskId, TaskNode};
use crate::scalar::Scalar;
use crate::sched::{
    earliest_start, eft_insertion, qkey, rank_order_respecting_precedence, upward_rank, Assignment,
    ParentFinish, PeTimeline, ScheduleTable,
};

use super::{PartialDag, ReadyTask, SchedError, ScheduleMode, SchedulerInput};

/// Which of the incremental dynamic fixes are active in [`heft_dyn`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DynLevel {
    /// Merge outstanding DAGs with the incoming one; assume idle PEs.
    MergeOnly,
    /// Additionally treat running tasks as fixed busy intervals.
    WithConstraints,
    /// Additionally emit dynamic dependencies pinning per-PE order.
    Full,
}

/// Minimum-execution-time scheduler: FIFO over the ready queue, each task to
/// the PE with the smallest execution time, appended after that PE's last
/// commitment (no gap insertion).
pub fn met_schedule<S: Scalar>(
    input: &SchedulerInput<'_, S>,
) -> Result<Vec<Assignment<S>>, SchedError> {
    input.require_mode(ScheduleMode::ReadyQueue)?;
    let mut order: Vec<&ReadyTask<S>> = input.ready.iter().collect();
    order.sort_by_key(|t| t.seq);

    let mut timelines: Vec<PeTimeline<S>> = input.timelines.to_vec();
    let mut out = Vec::with_capacity(order.len());
    for task in order {
        let pe = task
            .node
            .supported_pes()
            .min_by_key(|pe| (qkey(task.node.exec_on(*pe).unwrap()), *pe))
            .expect("task supports at least one PE");
        let w = task.node.exec_on(pe).unwrap();
        let ready = earliest_start(&task.parents, pe, input.platform, input.now);
        let tail = timelines[pe].last_end();
        let start = if ready > tail { ready } else { tail };
        let end = start + w;
        timelines[pe].insert(start, end, task.global);
        out.push(Assignment {
            task: task.global,
            pe,
            start,
            end,
        });
    }
    Ok(out)
}

/// Place `node` on the PE minimizing its insertion-based finish time.
fn insert_min_eft<S: Scalar>(
    node: &TaskNode<S>,
    parents: &[ParentFinish<S>],
    timelines: &mut [PeTimeline<S>],
    platform: &Platform<S>,
    now: S,
) -> Assignment<S> {
    let (pe, (start, end)) = node
        .supported_pes()
        .map(|pe| {
            let ready = earliest_start(parents, pe, platform, now);
            let w = node.exec_on(pe).unwrap();
            (pe, eft_insertion(w, &timelines[pe], ready))
        })
        .min_by_key(|(pe, (_, end))| (qkey(*end), *pe))
        .expect("task supports at least one PE");
    timelines[pe].insert(start, end, node.id);
    Assignment {
        task: node.id,
        pe,
        start,
        end,
    }
}

/// Classic static HEFT over a single DAG on an idle platform: tasks in
/// non-increasing upward-rank order, each on the PE minimizing its
/// insertion-based earliest finish time.
pub fn heft_base<S: Scalar>(
    dag: &AppDag<S>,
    platform: &Platform<S>,
) -> Result<ScheduleTable<S>, SchedError> {
    let ranks = upward_rank(dag, platform)?;
    let order = rank_order_respecting_precedence(dag, &ranks, |id| (id, 0));

    let index = dag.index_of();
    let preds = dag.predecessors();
    let mut timelines: Vec<PeTimeline<S>> = (0..platform.num_pes()).map(PeTimeline::new).collect();
    let mut table = ScheduleTable::new();
    for id in order {
        let node = &dag.tasks[index[&id]];
        let parents: Vec<ParentFinish<S>> = preds[&id]
            .iter()
            .map(|(p, volume)| {
                let a = &table.assignments[p];
                ParentFinish {
                    end: a.end,
                    pe: a.pe,
                    volume: *volume,
                }
            })
            .collect();
        let assignment = insert_min_eft(node, &parents, &mut timelines, platform, S::zero());
        table.assignments.insert(id, assignment);
    }
    Ok(table)
}

pub(crate) struct Merged<S> {
    pub dag: AppDag<S>,
    pub entry: TaskId,
    pub exit: TaskId,
}

/// Common-entry/common-exit merge over already-instantiated DAGs (global,
/// disjoint task ids). Synthetic nodes are zero-cost on every PE.
pub(crate) fn merge_tagged<S: Scalar>(parts: &[&AppDag<S>]) -> Merged<S> {
    let width = parts
        .iter()
        .flat_map(|d| d.tasks.first())
        .map(|t| t.exec_time.len())
        .next()
        .unwrap_or(1);
    let max_id = parts
        .iter()
        .flat_map(|d| d.tasks.iter())
        .map(|t| t.id)
        .max()
        .map(|m| m + 1)
        .unwrap_or(0);
    let entry = max_id;
    let exit = max_id + 1;
    let zero_node = |id: TaskId, name: &str| TaskNode {
        id,
        name: name.to_string(),
        exec_time: vec![Some(S::zero()); width],
        power: vec![Some(S::zero()); width],
    };

    let mut tasks = Vec::new();
    let mut edges: Vec<Edge<S>> = Vec::new();
    for part in parts {
        tasks.extend(part.tasks.iter().cloned());
        edges.extend(part.edges.iter().cloned());
        let mut has_parent: BTreeMap<TaskId, bool> =
            part.tasks.iter().map(|t| (t.id, false)).collect();
        let mut has_child = has_parent.clone();
        for e in &part.edges {
            has_parent.insert(e.dst, true);
            has_child.insert(e.src, true);
        }
        for (id, flag) in &has_parent {
            if !flag {
                edges.push(Edge {
                    src: entry,
                    dst: *id,
                    data_volume: S::zero(),
                });
            }
        }
        for (id, flag) in &has_child {
            if !flag {
                edges.push(Edge {
                    src: *id,
                    dst: exit,
                    data_volume: S::zero(),
                });
            }
        }
    }
    if parts.is_empty() {
        edges.push(Edge {
            src: entry,
            dst: exit,
            data_volume: S::zero(),
        });
    }
    tasks.push(zero_node(entry, "merge_entry"));
    tasks.push(zero_node(exit, "merge_exit"));
    Merged {
        dag: AppDag {
            app_name: "merged".to_string(),
            tasks,
            edges,
        },
        entry,
        exit,
    }
}

/// Merge a set of partial DAGs under a synthetic zero-cost entry and exit.
pub fn merge_dags<S: Scalar>(parts: &[AppDag<S>]) -> AppDag<S> {
    let refs: Vec<&AppDag<S>> = parts.iter().collect();
    merge_tagged(&refs).dag
}

/// Dynamic HEFT: merge the outstanding system state with the incoming frame,
/// pin running tasks as timeline constraints, rank-and-assign over the merged
/// graph, and emit per-PE ordering edges so the runtime executes the plan.
pub fn heft_dyn<S: Scalar>(
    input: &SchedulerInput<'_, S>,
    incoming: &PartialDag<S>,
    level: DynLevel,
) -> Result<ScheduleTable<S>, SchedError> {
    input.require_mode(ScheduleMode::WholeDag)?;
    let mut parts: Vec<&PartialDag<S>> = input.outstanding.iter().collect();
    parts.push(incoming);

    let timelines: Vec<PeTimeline<S>> = match level {
        DynLevel::MergeOnly => (0..input.platform.num_pes()).map(PeTimeline::new).collect(),
        _ => input.timelines.to_vec(),
    };
    heft_over_partials(
        &parts,
        timelines,
        input.platform,
        input.now,
        level == DynLevel::Full,
        input.running,
    )
}

/// Rank-and-assign over the merge of `parts`. Shared by [`heft_dyn`] and the
/// exact solver's warm start.
pub(crate) fn heft_over_partials<S: Scalar>(
    parts: &[&PartialDag<S>],
    mut timelines: Vec<PeTimeline<S>>,
    platform: &Platform<S>,
    now: S,
    emit_deps: bool,
    running: &[Assignment<S>],
) -> Result<ScheduleTable<S>, SchedError> {
    let dag_refs: Vec<&AppDag<S>> = parts.iter().map(|p| &p.dag).collect();
    let merged = merge_tagged(&dag_refs);

    let ranks = upward_rank(&merged.dag, platform)?;
    let mut meta: HashMap<TaskId, (TaskId, u64)> = HashMap::new();
    let mut ext: HashMap<TaskId, &Vec<ParentFinish<S>>> = HashMap::new();
    for part in parts {
        for (global, local) in &part.locals {
            meta.insert(*global, (*local, part.instance));
        }
        for (global, parents) in &part.ext {
            ext.insert(*global, parents);
        }
    }

    let order = rank_order_respecting_precedence(&merged.dag, &ranks, |id| {
        meta.get(&id).copied().unwrap_or((id, u64::MAX))
    });

    let index = merged.dag.index_of();
    let preds = merged.dag.predecessors();
    let mut table = ScheduleTable::new();
    for id in order {
        if id == merged.entry || id == merged.exit {
            continue;
        }
        let node = &merged.dag.tasks[index[&id]];
        let mut parents: Vec<ParentFinish<S>> = preds[&id]
            .iter()
            .filter(|(p, _)| *p != merged.entry)
            .map(|(p, volume)| {
                let a = &table.assignments[p];
                ParentFinish {
                    end: a.end,
                    pe: a.pe,
                    volume: *volume,
                }
            })
            .collect();
        if let Some(external) = ext.get(&id) {
            parents.extend(external.iter().copied());
        }
        let assignment = insert_min_eft(node, &parents, &mut timelines, platform, now);
        table.assignments.insert(id, assignment);
    }

    if emit_deps {
        table.dynamic_deps = per_pe_order_deps(&table, platform.num_pes(), running);
    }
    Ok(table)
}

/// Ordering edges between consecutive newly-assigned tasks on each PE.
/// Previous epochs' dependencies are implicitly discarded: the returned set is
/// complete for this table.
pub(crate) fn per_pe_order_deps<S: Scalar>(
    table: &ScheduleTable<S>,
    num_pes: usize,
    running: &[Assignment<S>],
) -> Vec<(TaskId, TaskId)> {
    let running_ids: std::collections::HashSet<TaskId> = running.iter().map(|a| a.task).collect();
    let mut per_pe: Vec<Vec<&Assignment<S>>> = vec![Vec::new(); num_pes];
    for a in table.assignments.values() {
        if !running_ids.contains(&a.task) {
            per_pe[a.pe].push(a);
        }
    }
    let mut deps = Vec::new();
    for list in &mut per_pe {
        list.sort_by_key(|a| (qkey(a.start), qkey(a.end), a.task));
        for pair in list.windows(2) {
            deps.push((pair[0].task, pair[1].task));
        }
    }
    deps
}

fn ready_slots<S: Scalar>(
    task: &ReadyTask<S>,
    timelines: &[PeTimeline<S>],
    platform: &Platform<S>,
    now: S,
) -> Vec<(PeId, S, S)> {
    task.node
        .supported_pes()
        .map(|pe| {
            let ready = earliest_start(&task.parents, pe, platform, now);
            let w = task.node.exec_on(pe).unwrap();
            let (start, end) = eft_insertion(w, &timelines[pe], ready);
            (pe, start, end)
        })
        .collect()
}

fn rank_ready<S: Scalar>(
    input: &SchedulerInput<'_, S>,
    weight: impl Fn(&ReadyTask<S>) -> S,
) -> Vec<usize> {
    let mut order: Vec<usize> = (0..input.ready.len()).collect();
    order.sort_by_key(|i| {
        let t = &input.ready[*i];
        (std::cmp::Reverse(qkey(weight(t))), t.node.id, t.instance)
    });
    order
}

/// Runtime HEFT: ready tasks ranked by mean execution time, each placed by
/// minimum insertion-based EFT; placements immediately constrain the next
/// task in the same epoch.
pub fn heft_rt<S: Scalar>(input: &SchedulerInput<'_, S>) -> Result<Vec<Assignment<S>>, SchedError> {
    input.require_mode(ScheduleMode::ReadyQueue)?;
    let order = rank_ready(input, |t| t.node.mean_exec_time());
    let mut timelines = input.timelines.to_vec();
    let mut out = Vec::with_capacity(order.len());
    for i in order {
        let task = &input.ready[i];
        let (pe, start, end) = ready_slots(task, &timelines, input.platform, input.now)
            .into_iter()
            .min_by_key(|(pe, _, end)| (qkey(*end), *pe))
            .expect("task supports at least one PE");
        timelines[pe].insert(start, end, task.global);
        out.push(Assignment {
            task: task.global,
            pe,
            start,
            end,
        });
    }
    Ok(out)
}

/// Energy-delay-product HEFT: rank by mean-exec-squared times mean power and
/// place each task on the PE minimizing `(end - start)^2 * P[task, pe]`,
/// breaking score ties by earlier finish, then lower PE index.
pub fn heft_edp<S: Scalar>(
    input: &SchedulerInput<'_, S>,
) -> Result<Vec<Assignment<S>>, SchedError> {
    input.require_mode(ScheduleMode::ReadyQueue)?;
    let order = rank_ready(input, |t| {
        let w = t.node.mean_exec_time();
        w * w * t.node.mean_power()
    });
    let mut timelines = input.timelines.to_vec();
    let mut out = Vec::with_capacity(order.len());
    for i in order {
        let task = &input.ready[i];
        let (pe, start, end) = ready_slots(task, &timelines, input.platform, input.now)
            .into_iter()
            .min_by_key(|(pe, start, end)| {
                let delay = *end - *start;
                let edp = delay * delay * task.node.power_on(*pe).unwrap();
                (qkey(edp), qkey(*end), *pe)
            })
            .expect("task supports at least one PE");
        timelines[pe].insert(start, end, task.global);
        out.push(Assignment {
            task: task.global,
            pe,
            start,
            end,
        });
    }
    Ok(out)
}

/// Load-balanced EDP variant: the delay term is measured from the earliest
/// start achievable on any PE, so over-subscribed efficient PEs stop winning
/// unconditionally.
pub fn heft_edp_lb<S: Scalar>(
    input: &SchedulerInput<'_, S>,
) -> Result<Vec<Assignment<S>>, SchedError> {
    input.require_mode(ScheduleMode::ReadyQueue)?;
    let order = rank_ready(input, |t| {
        let w = t.node.mean_exec_time();
        w * w * t.node.mean_power()
    });
    let mut timelines = input.timelines.to_vec();
    let mut out = Vec::with_capacity(order.len());
    for i in order {
        let task = &input.ready[i];
        let slots = ready_slots(task, &timelines, input.platform, input.now);
        let min_start = slots
            .iter()
            .map(|(_, start, _)| *start)
            .fold(S::infinity(), |acc, s| if s < acc { s } else { acc });
        let (pe, start, end) = slots
            .into_iter()
            .min_by_key(|(pe, _, end)| {
                let delay = *end - min_start;
                let score = delay * delay * task.node.power_on(*pe).unwrap();
                (qkey(score), qkey(*end), *pe)
            })
            .expect("task supports at least one PE");
        timelines[pe].insert(start, end, task.global);
        out.push(Assignment {
            task: task.global,
            pe,
            start,
            end,
        });
    }
    Ok(out)
}

//! PEFT: optimistic-cost-table scheduling, plus its runtime variant.

use std::collections::HashMap;

use crate::model::{avg_comm_cost, AppDag, ModelError, Platform, TaskId};
use crate::scalar::Scalar;
use crate::sched::{
    earliest_start, eft_insertion, qkey, rank_order_respecting_precedence, Assignment,
    ParentFinish, PeTimeline, RankMap, ScheduleTable,
};

use super::{SchedError, ScheduleMode, SchedulerInput};

/// Optimistic cost table: `oct[task][pe]` is the best-case cost of everything
/// after `task`, assuming `task` runs on `pe`. Exit rows are zero.
pub fn oct_table<S: Scalar>(
    dag: &AppDag<S>,
    platform: &Platform<S>,
) -> Result<HashMap<TaskId, Vec<S>>, ModelError> {
    let order = dag.topo_order()?;
    let succ = dag.successors();
    let index = dag.index_of();
    let z = platform.num_pes();
    let mut oct: HashMap<TaskId, Vec<S>> = HashMap::with_capacity(order.len());
    for id in order.iter().rev() {
        let mut row = vec![S::zero(); z];
        for (pe, slot) in row.iter_mut().enumerate() {
            let mut worst = S::zero();
            for (succ_id, volume) in &succ[id] {
                let succ_node = &dag.tasks[index[succ_id]];
                let succ_row = &oct[succ_id];
                let comm = avg_comm_cost(*volume, platform);
                let best = succ_node
                    .supported_pes()
                    .map(|pw| {
                        let c = if pw == pe { S::zero() } else { comm };
                        succ_row[pw] + succ_node.exec_on(pw).unwrap() + c
                    })
                    .fold(S::infinity(), |acc, v| if v < acc { v } else { acc });
                if best > worst {
                    worst = best;
                }
            }
            *slot = worst;
        }
        oct.insert(*id, row);
    }
    Ok(oct)
}

fn mean_row<S: Scalar>(row: &[S]) -> S {
    row.iter().copied().sum::<S>() / S::from_config(row.len() as f64)
}

/// Static PEFT: tasks ranked by their mean OCT row, each assigned to the PE
/// minimizing the optimistic finish time `EFT + OCT[task][pe]`. Unlike the
/// upward rank, the OCT rank does not always dominate along edges (sparse
/// accelerator support can invert it), so the loop pops the best task whose
/// predecessors are already placed.
pub fn peft_base<S: Scalar>(
    dag: &AppDag<S>,
    platform: &Platform<S>,
) -> Result<ScheduleTable<S>, SchedError> {
    let oct = oct_table(dag, platform)?;
    let ranks: RankMap<S> = oct.iter().map(|(id, row)| (*id, mean_row(row))).collect();
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
        let row = &oct[&id];
        let (pe, start, end) = node
            .supported_pes()
            .map(|pe| {
                let ready = earliest_start(&parents, pe, platform, S::zero());
                let w = node.exec_on(pe).unwrap();
                let (start, end) = eft_insertion(w, &timelines[pe], ready);
                (pe, start, end)
            })
            .min_by_key(|(pe, _, end)| (qkey(*end + row[*pe]), qkey(*end), *pe))
            .expect("task supports at least one PE");
        timelines[pe].insert(start, end, id);
        table.assignments.insert(
            id,
            Assignment {
                task: id,
                pe,
                start,
                end,
            },
        );
    }
    Ok(table)
}

/// Per-simulation cache of OCT rows, keyed by global task id. Rows are
/// computed once per frame at injection over that frame's full DAG; this is
/// an approximation that trades merge fidelity for per-epoch cost.
#[derive(Debug, Default)]
pub struct OctCache<S> {
    rows: HashMap<TaskId, Vec<S>>,
    ranks: HashMap<TaskId, S>,
}

impl<S: Scalar> OctCache<S> {
    pub fn new() -> Self {
        Self {
            rows: HashMap::new(),
            ranks: HashMap::new(),
        }
    }

    /// Compute and store OCT rows for a freshly injected frame (global ids).
    pub fn prime_frame(
        &mut self,
        dag: &AppDag<S>,
        platform: &Platform<S>,
    ) -> Result<(), ModelError> {
        let oct = oct_table(dag, platform)?;
        for (id, row) in oct {
            self.ranks.insert(id, mean_row(&row));
            self.rows.insert(id, row);
        }
        Ok(())
    }

    pub fn forget(&mut self, id: TaskId) {
        self.rows.remove(&id);
        self.ranks.remove(&id);
    }

    fn rank(&self, id: TaskId) -> S {
        self.ranks.get(&id).copied().unwrap_or_else(S::zero)
    }

    fn row(&self, id: TaskId, pe: usize) -> S {
        self.rows
            .get(&id)
            .and_then(|r| r.get(pe))
            .copied()
            .unwrap_or_else(S::zero)
    }
}

/// Runtime PEFT: ready tasks ranked by cached mean OCT, placed by minimum
/// optimistic finish time against the current timelines.
pub fn peft_rt<S: Scalar>(
    input: &SchedulerInput<'_, S>,
    cache: &OctCache<S>,
) -> Result<Vec<Assignment<S>>, SchedError> {
    input.require_mode(ScheduleMode::ReadyQueue)?;
    let mut order: Vec<usize> = (0..input.ready.len()).collect();
    order.sort_by_key(|i| {
        let t = &input.ready[*i];
        (
            std::cmp::Reverse(qkey(cache.rank(t.global))),
            t.node.id,
            t.instance,
        )
    });

    let mut timelines = input.timelines.to_vec();
    let mut out = Vec::with_capacity(order.len());
    for i in order {
        let task = &input.ready[i];
        let (pe, start, end) = task
            .node
            .supported_pes()
            .map(|pe| {
                let ready = earliest_start(&task.parents, pe, input.platform, input.now);
                let w = task.node.exec_on(pe).unwrap();
                let (start, end) = eft_insertion(w, &timelines[pe], ready);
                (pe, start, end)
            })
            .min_by_key(|(pe, _, end)| (qkey(*end + cache.row(task.global, *pe)), qkey(*end), *pe))
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

//! JSON/CSV document builders. Everything here must serialize
//! deterministically: ordered containers only, no wall-clock values.

use serde_json::{json, Value};

use hetsched::cp::{CpSolution, CpStatus};
use hetsched::model::{AppDag, Platform, WorkloadSpec};
use hetsched::sched::ScheduleTable;
use hetsched::schedulers::SchedulerKind;
use hetsched::sim::{OverheadProfile, SimConfig, SimResult};
use hetsched::Std;

pub fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}

pub fn status_name(status: CpStatus) -> &'static str {
    match status {
        CpStatus::Optimal => "optimal",
        CpStatus::FeasibleTimeLimit => "feasible_time_limit",
        CpStatus::Infeasible => "infeasible",
    }
}

pub fn schedule_doc(
    kind: SchedulerKind,
    dag: &AppDag<Std>,
    table: &ScheduleTable<Std>,
    status: Option<CpStatus>,
) -> Value {
    let assignments: Vec<Value> = table
        .assignments
        .values()
        .map(|a| json!({"task": a.task, "pe": a.pe, "start": a.start, "end": a.end}))
        .collect();
    let deps: Vec<Value> = table
        .dynamic_deps
        .iter()
        .map(|(a, b)| json!([a, b]))
        .collect();
    let mut doc = json!({
        "scheduler": kind.name(),
        "app": dag.app_name,
        "makespan": table.makespan(),
        "assignments": assignments,
        "dynamic_deps": deps,
    });
    if let Some(status) = status {
        doc["status"] = json!(status_name(status));
    }
    doc
}

pub fn gantt_from_table(
    platform: &Platform<Std>,
    dag: &AppDag<Std>,
    table: &ScheduleTable<Std>,
) -> Value {
    let mut rows: Vec<Vec<Value>> = vec![Vec::new(); platform.num_pes()];
    let mut sorted: Vec<_> = table.assignments.values().collect();
    sorted.sort_by(|a, b| a.start.total_cmp(&b.start).then(a.task.cmp(&b.task)));
    for a in sorted {
        let name = dag
            .task(a.task)
            .map(|t| t.name.clone())
            .unwrap_or_else(|| a.task.to_string());
        rows[a.pe].push(json!({
            "start": a.start, "end": a.end, "frame": 0, "task": name,
        }));
    }
    gantt_doc(platform, rows)
}

pub fn gantt_from_result(platform: &Platform<Std>, result: &SimResult<Std>) -> Value {
    let rows: Vec<Vec<Value>> = result
        .pe_busy
        .iter()
        .map(|log| {
            log.iter()
                .map(|b| {
                    json!({
                        "start": b.start, "end": b.end, "frame": b.frame, "task": b.task_name,
                    })
                })
                .collect()
        })
        .collect();
    gantt_doc(platform, rows)
}

fn gantt_doc(platform: &Platform<Std>, rows: Vec<Vec<Value>>) -> Value {
    let pes: Vec<Value> = platform
        .pes
        .iter()
        .zip(rows)
        .map(|(pe, rows)| json!({"pe": pe.id, "name": pe.name, "rows": rows}))
        .collect();
    json!({"color_key": "frame", "pes": pes})
}

pub fn result_doc(
    platform: &Platform<Std>,
    workload: &WorkloadSpec<Std>,
    config: &SimConfig<Std>,
    result: &SimResult<Std>,
) -> Value {
    let frames: Vec<Value> = result
        .frames
        .iter()
        .map(|f| {
            json!({
                "frame": f.frame,
                "app": f.app,
                "injected": f.injected,
                "completed": f.completed,
            })
        })
        .collect();
    let busy: Vec<Value> = platform
        .pes
        .iter()
        .zip(&result.pe_busy)
        .map(|(pe, log)| {
            let intervals: Vec<Value> = log
                .iter()
                .map(|b| {
                    json!({
                        "start": b.start, "end": b.end, "frame": b.frame,
                        "task": b.task_local, "name": b.task_name,
                    })
                })
                .collect();
            json!({"pe": pe.id, "name": pe.name, "intervals": intervals})
        })
        .collect();
    let tasks_scheduled: usize = result.scheduler_calls.iter().map(|c| c.scheduled).sum();
    json!({
        "scheduler": result.scheduler.name(),
        "seed": workload.seed,
        "duration": result.duration,
        "time_unit": config.time_unit,
        "energy": {
            "dynamic": result.dynamic_energy,
            "static": result.static_energy,
            "total": result.dynamic_energy + result.static_energy,
        },
        "frames": frames,
        "pe_busy": busy,
        "scheduler_calls": {
            "count": result.scheduler_calls.len(),
            "tasks_scheduled": tasks_scheduled,
        },
    })
}

pub fn solution_doc(sol: &CpSolution<Std>) -> Value {
    let assignments: Vec<Value> = sol
        .table
        .assignments
        .values()
        .map(|a| json!({"task": a.task, "pe": a.pe, "start": a.start, "end": a.end}))
        .collect();
    json!({
        "status": status_name(sol.status),
        "objective": sol.objective,
        "assignments": assignments,
        "incumbents": sol.incumbent_trace,
    })
}

pub fn cdf_csv(profile: &OverheadProfile) -> String {
    let mut out = String::from("duration_secs,fraction\n");
    for (d, f) in &profile.cdf {
        out.push_str(&format!("{d},{f}\n"));
    }
    out.push_str(&format!(
        "# mean={} p95={} count={} total={}\n",
        profile.mean.as_secs_f64(),
        profile.p95.as_secs_f64(),
        profile.count,
        profile.total.as_secs_f64()
    ));
    out
}

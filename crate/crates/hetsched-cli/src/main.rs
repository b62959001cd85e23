//! Command-line front end: validate inputs, produce static schedules, run
//! simulations, sweep frame rates and invoke the exact solver.
//!
//! Exit codes: 0 success, 1 input error, 2 simulation deadlock,
//! 3 solver infeasible.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use hetsched::cp::{cp_solve, CpConfig, CpInstance, CpStatus};
use hetsched::io::{load_dag, load_platform, load_workload};
use hetsched::metrics::{self, SweepPoint};
use hetsched::model::{MixEntry, WorkloadSpec};
use hetsched::schedulers::{heft_base, peft_base, DynLevel, PartialDag, SchedulerKind};
use hetsched::sim::{profile_scheduler_overhead, run, SimConfig, SimError};
use hetsched::{Platform64, Std};

#[derive(Parser)]
#[command(
    name = "hetsched",
    version,
    about = "Heterogeneous SoC scheduling simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check platform / DAG / workload files against their invariants.
    Validate(ValidateArgs),
    /// Produce a static schedule for one DAG on an idle platform.
    Schedule(ScheduleArgs),
    /// Run one dynamic-workload simulation.
    Simulate(SimulateArgs),
    /// Sweep target frame rates across schedulers.
    Sweep(SweepArgs),
    /// Solve one instance exactly and report the objective.
    Solve(SolveArgs),
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    platform: PathBuf,
    #[arg(long)]
    dag: Vec<PathBuf>,
    #[arg(long)]
    workload: Option<PathBuf>,
}

#[derive(Args)]
struct ScheduleArgs {
    #[arg(long)]
    platform: PathBuf,
    #[arg(long)]
    dag: PathBuf,
    /// One of: heft_base, peft_base, cp.
    #[arg(long)]
    scheduler: String,
    /// Exact-solver time limit in seconds (cp only).
    #[arg(long, default_value_t = 10.0)]
    time_limit: f64,
    /// Cap on branching candidates per node (cp only).
    #[arg(long)]
    max_width: Option<usize>,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    platform: PathBuf,
    #[arg(long)]
    workload: PathBuf,
    #[arg(long)]
    scheduler: String,
    /// Override the workload seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the workload duration (time units).
    #[arg(long)]
    duration: Option<f64>,
    /// Multiplicative runtime noise magnitude in [0, 1).
    #[arg(long)]
    noise: Option<f64>,
    /// heft_dyn fix level: merge, constraints or full.
    #[arg(long, default_value = "full")]
    dyn_level: String,
    /// Label of the abstract time unit, echoed into reports.
    #[arg(long, default_value = "tu")]
    time_unit: String,
    /// Exact-solver time limit in seconds (cp scheduler).
    #[arg(long, default_value_t = 10.0)]
    time_limit: f64,
    /// Write the scheduler-overhead CDF (wall-clock, host-dependent) here.
    #[arg(long)]
    profile_out: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    platform: PathBuf,
    #[arg(long)]
    workload: PathBuf,
    /// Comma-separated scheduler names.
    #[arg(long, value_delimiter = ',')]
    schedulers: Vec<String>,
    /// Comma-separated target frame rates.
    #[arg(long, value_delimiter = ',')]
    rates: Vec<f64>,
    /// Repetitions per cell (cp cells use --cp-reps).
    #[arg(long, default_value_t = 10)]
    reps: u64,
    /// Repetitions for the exact solver's cells.
    #[arg(long, default_value_t = 3)]
    cp_reps: u64,
    /// Parallel simulations.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Exact-solver time limit in seconds (cp scheduler).
    #[arg(long, default_value_t = 10.0)]
    time_limit: f64,
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    platform: PathBuf,
    /// One or more DAGs forming the instance.
    #[arg(long, required = true)]
    dag: Vec<PathBuf>,
    #[arg(long, default_value_t = 10.0)]
    time_limit: f64,
    #[arg(long)]
    max_width: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Validate(args) => cmd_validate(args),
        Command::Schedule(args) => cmd_schedule(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Solve(args) => cmd_solve(args),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn parse_scheduler(name: &str) -> anyhow::Result<SchedulerKind> {
    name.parse::<SchedulerKind>()
        .map_err(|e| anyhow::anyhow!(e))
}

fn parse_dyn_level(name: &str) -> anyhow::Result<DynLevel> {
    match name {
        "merge" => Ok(DynLevel::MergeOnly),
        "constraints" => Ok(DynLevel::WithConstraints),
        "full" => Ok(DynLevel::Full),
        other => anyhow::bail!("unknown dyn level `{other}` (merge|constraints|full)"),
    }
}

fn cmd_validate(args: ValidateArgs) -> anyhow::Result<ExitCode> {
    let platform: Platform64 = load_platform(&args.platform)?;
    println!(
        "platform {}: ok ({} PEs)",
        platform.name,
        platform.num_pes()
    );
    for path in &args.dag {
        let dag = load_dag(path, &platform)?;
        println!(
            "dag {}: ok ({} tasks, {} edges)",
            dag.app_name,
            dag.tasks.len(),
            dag.edges.len()
        );
    }
    if let Some(path) = &args.workload {
        let wl = load_workload(path, &platform)?;
        println!("workload: ok ({} applications)", wl.mix.len());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_schedule(args: ScheduleArgs) -> anyhow::Result<ExitCode> {
    let platform: Platform64 = load_platform(&args.platform)?;
    let dag = load_dag(&args.dag, &platform)?;
    let kind = parse_scheduler(&args.scheduler)?;

    let (table, status) = match kind {
        SchedulerKind::HeftBase => (heft_base(&dag, &platform)?, None),
        SchedulerKind::PeftBase => (peft_base(&dag, &platform)?, None),
        SchedulerKind::Cp => {
            let parts = vec![PartialDag::from_whole(0, dag.clone())];
            let instance = CpInstance {
                dags: &parts,
                running: &[],
                platform: &platform,
                now: 0.0,
            };
            let config = CpConfig {
                time_limit: Duration::from_secs_f64(args.time_limit),
                max_width: args.max_width,
            };
            let sol = cp_solve(&instance, &config)?;
            if sol.status == CpStatus::Infeasible {
                eprintln!("error: instance is infeasible");
                return Ok(ExitCode::from(3));
            }
            (sol.table, Some(sol.status))
        }
        other => anyhow::bail!("`schedule` accepts heft_base, peft_base or cp (got {other})"),
    };

    std::fs::create_dir_all(&args.out)?;
    let doc = output::schedule_doc(kind, &dag, &table, status);
    std::fs::write(args.out.join("schedule.json"), output::pretty(&doc))?;
    let gantt = output::gantt_from_table(&platform, &dag, &table);
    std::fs::write(args.out.join("gantt.json"), output::pretty(&gantt))?;
    println!("makespan: {}", table.makespan());
    if let Some(status) = status {
        println!("status: {}", output::status_name(status));
    }
    Ok(ExitCode::SUCCESS)
}

fn sim_error_code(err: &SimError) -> Option<u8> {
    match err {
        SimError::Deadlock(_) => Some(2),
        SimError::Infeasible(_) => Some(3),
        _ => None,
    }
}

fn cmd_simulate(args: SimulateArgs) -> anyhow::Result<ExitCode> {
    let platform: Platform64 = load_platform(&args.platform)?;
    let mut workload = load_workload(&args.workload, &platform)?;
    if let Some(seed) = args.seed {
        workload.seed = seed;
    }
    if let Some(duration) = args.duration {
        anyhow::ensure!(duration >= 0.0, "duration must be >= 0");
        workload.duration = duration;
    }
    let kind = parse_scheduler(&args.scheduler)?;
    let config = SimConfig {
        noise: args.noise,
        time_unit: args.time_unit.clone(),
        dyn_level: parse_dyn_level(&args.dyn_level)?,
        cp: CpConfig {
            time_limit: Duration::from_secs_f64(args.time_limit),
            max_width: None,
        },
    };

    let result = match run(&platform, &workload, kind, &config) {
        Ok(result) => result,
        Err(err) => {
            if let Some(code) = sim_error_code(&err) {
                eprintln!("error: {err}");
                return Ok(ExitCode::from(code));
            }
            return Err(err.into());
        }
    };

    std::fs::create_dir_all(&args.out)?;
    let doc = output::result_doc(&platform, &workload, &config, &result);
    std::fs::write(args.out.join("result.json"), output::pretty(&doc))?;
    let point = SweepPoint::from_result(&result, &platform, workload.target_frame_rate);
    let csv = format!("{}\n{}\n", metrics::CSV_HEADER, metrics::csv_row(&point));
    std::fs::write(args.out.join("metrics.csv"), csv)?;
    let gantt = output::gantt_from_result(&platform, &result);
    std::fs::write(args.out.join("gantt.json"), output::pretty(&gantt))?;

    if let Some(path) = &args.profile_out {
        match profile_scheduler_overhead(&result) {
            Ok(profile) => std::fs::write(path, output::cdf_csv(&profile))?,
            Err(err) => eprintln!("note: no overhead profile written: {err}"),
        }
    }

    let completed = result
        .frames
        .iter()
        .filter(|f| f.completed.is_some())
        .count();
    println!(
        "frames: {} completed: {} achieved_rate: {} energy_total: {}",
        result.frames.len(),
        completed,
        point.achieved_rate,
        point.energy_total
    );
    Ok(ExitCode::SUCCESS)
}

struct Cell {
    scheduler: SchedulerKind,
    rate_idx: usize,
    rate: f64,
    rep: u64,
}

fn cmd_sweep(args: SweepArgs) -> anyhow::Result<ExitCode> {
    anyhow::ensure!(!args.rates.is_empty(), "--rates must not be empty");
    anyhow::ensure!(
        !args.schedulers.is_empty(),
        "--schedulers must not be empty"
    );
    let platform: Platform64 = load_platform(&args.platform)?;
    let workload = load_workload(&args.workload, &platform)?;
    let base_seed = args.seed.unwrap_or(workload.seed);
    let schedulers: Vec<SchedulerKind> = args
        .schedulers
        .iter()
        .map(|s| parse_scheduler(s))
        .collect::<Result<_, _>>()?;

    let mut cells = Vec::new();
    for scheduler in &schedulers {
        let reps = if *scheduler == SchedulerKind::Cp {
            args.cp_reps
        } else {
            args.reps
        };
        for (rate_idx, rate) in args.rates.iter().enumerate() {
            for rep in 0..reps {
                cells.push(Cell {
                    scheduler: *scheduler,
                    rate_idx,
                    rate: *rate,
                    rep,
                });
            }
        }
    }

    let config = SimConfig {
        noise: None,
        time_unit: "tu".to_string(),
        dyn_level: DynLevel::Full,
        cp: CpConfig {
            time_limit: Duration::from_secs_f64(args.time_limit),
            max_width: None,
        },
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs.max(1))
        .build()?;
    let results: Vec<Result<SweepPoint<Std>, String>> = pool.install(|| {
        use rayon::prelude::*;
        cells
            .par_iter()
            .map(|cell| {
                // The arrival trace depends only on (seed, rate, rep): every
                // scheduler at the same cell sees the same frame sequence.
                let mut wl: WorkloadSpec<Std> = WorkloadSpec {
                    mix: workload
                        .mix
                        .iter()
                        .map(|m| MixEntry {
                            dag: m.dag.clone(),
                            probability: m.probability,
                        })
                        .collect(),
                    target_frame_rate: cell.rate,
                    duration: workload.duration,
                    arrival_distribution: workload.arrival_distribution,
                    seed: 0,
                };
                wl.seed = base_seed
                    .wrapping_add(1_000_003u64.wrapping_mul(cell.rate_idx as u64))
                    .wrapping_add(cell.rep);
                run(&platform, &wl, cell.scheduler, &config)
                    .map(|r| SweepPoint::from_result(&r, &platform, cell.rate))
                    .map_err(|e| format!("{e}"))
            })
            .collect()
    });

    std::fs::create_dir_all(&args.out_dir)?;
    let mut sweep_csv = String::from(metrics::CSV_HEADER);
    sweep_csv.push_str(",energy_per_frame\n");
    let mut failures = String::from("scheduler,target_rate,rep,error\n");
    let mut per_sched: Vec<(SchedulerKind, Vec<SweepPoint<Std>>)> = Vec::new();

    let mut idx = 0usize;
    for scheduler in &schedulers {
        let reps = if *scheduler == SchedulerKind::Cp {
            args.cp_reps
        } else {
            args.reps
        };
        let mut sched_points = Vec::new();
        for rate in &args.rates {
            let mut collected = Vec::new();
            for rep in 0..reps {
                match &results[idx] {
                    Ok(point) => collected.push(point.clone()),
                    Err(err) => {
                        failures.push_str(&format!("{scheduler},{rate},{rep},{err}\n"));
                    }
                }
                idx += 1;
            }
            if collected.is_empty() {
                continue;
            }
            let point = average_points(*scheduler, *rate, &collected);
            let per_frame = if point.completed_frames > 0 {
                point.energy_total / point.completed_frames as f64
            } else {
                0.0
            };
            sweep_csv.push_str(&format!("{},{per_frame}\n", metrics::csv_row(&point)));
            sched_points.push(point);
        }
        per_sched.push((*scheduler, sched_points));
    }
    std::fs::write(args.out_dir.join("sweep.csv"), sweep_csv)?;
    if failures.lines().count() > 1 {
        std::fs::write(args.out_dir.join("failures.csv"), failures)?;
    }

    let mut saturation = String::from("scheduler,saturation_rate,saturated_everywhere\n");
    for (scheduler, points) in &per_sched {
        if let Ok(sat) = metrics::saturation_point(points, metrics::SATURATION_TOL) {
            saturation.push_str(&format!(
                "{scheduler},{},{}\n",
                sat.rate, sat.saturated_everywhere
            ));
        }
    }
    std::fs::write(args.out_dir.join("saturation.csv"), saturation)?;

    let mut improvements = String::from("metric,base,other,avg_pct,max_pct\n");
    let find = |kind: SchedulerKind| per_sched.iter().find(|(s, _)| *s == kind).map(|(_, p)| p);
    if let Some(base) = find(SchedulerKind::HeftBase) {
        for (scheduler, points) in &per_sched {
            if *scheduler == SchedulerKind::HeftBase {
                continue;
            }
            if let Ok((avg, max)) = metrics::improvement(base, points, |p| p.avg_frame_exec_time) {
                improvements.push_str(&format!(
                    "avg_exec,heft_base,{scheduler},{avg:.3},{max:.3}\n"
                ));
            }
        }
    }
    if let Some(rt) = find(SchedulerKind::HeftRt) {
        for kind in [SchedulerKind::HeftEdp, SchedulerKind::HeftEdpLb] {
            if let Some(points) = find(kind) {
                if let Ok((avg, max)) = metrics::improvement(rt, points, |p| p.energy_total) {
                    improvements
                        .push_str(&format!("energy_total,heft_rt,{kind},{avg:.3},{max:.3}\n"));
                }
            }
        }
    }
    std::fs::write(args.out_dir.join("improvements.csv"), improvements)?;
    println!(
        "sweep: {} cells written to {}",
        cells.len(),
        args.out_dir.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn average_points(
    scheduler: SchedulerKind,
    rate: f64,
    points: &[SweepPoint<Std>],
) -> SweepPoint<Std> {
    let n = points.len() as f64;
    let mean = |f: &dyn Fn(&SweepPoint<Std>) -> f64| points.iter().map(f).sum::<f64>() / n;
    SweepPoint {
        scheduler,
        target_rate: rate,
        achieved_rate: mean(&|p| p.achieved_rate),
        avg_frame_exec_time: mean(&|p| p.avg_frame_exec_time),
        energy_dynamic: mean(&|p| p.energy_dynamic),
        energy_static: mean(&|p| p.energy_static),
        energy_total: mean(&|p| p.energy_total),
        completed_frames: (mean(&|p| p.completed_frames as f64)).round() as usize,
    }
}

fn cmd_solve(args: SolveArgs) -> anyhow::Result<ExitCode> {
    let platform: Platform64 = load_platform(&args.platform)?;
    let mut parts = Vec::new();
    let mut id_offset = 0u64;
    for (i, path) in args.dag.iter().enumerate() {
        let mut dag = load_dag(path, &platform)?;
        // Shift ids so multiple instance DAGs stay disjoint.
        let index = dag.index_of();
        for t in dag.tasks.iter_mut() {
            t.id = id_offset + index[&t.id] as u64;
        }
        for e in dag.edges.iter_mut() {
            e.src = id_offset + index[&e.src] as u64;
            e.dst = id_offset + index[&e.dst] as u64;
        }
        id_offset += dag.tasks.len() as u64;
        parts.push(PartialDag::from_whole(i as u64, dag));
    }
    let instance = CpInstance {
        dags: &parts,
        running: &[],
        platform: &platform,
        now: 0.0,
    };
    let config = CpConfig {
        time_limit: Duration::from_secs_f64(args.time_limit),
        max_width: args.max_width,
    };
    let sol = cp_solve(&instance, &config)?;
    if sol.status == CpStatus::Infeasible {
        eprintln!("error: instance is infeasible");
        return Ok(ExitCode::from(3));
    }
    if let Some(out) = &args.out {
        std::fs::create_dir_all(out)?;
        let doc = output::solution_doc(&sol);
        std::fs::write(out.join("solution.json"), output::pretty(&doc))?;
    }
    println!("objective: {}", sol.objective);
    println!("status: {}", output::status_name(sol.status));
    Ok(ExitCode::SUCCESS)
}

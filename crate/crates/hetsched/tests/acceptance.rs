//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Criterion 9 (byte-identical CLI runs) lives in the hetsched-cli crate,
//! next to the binary it exercises.

use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use hetsched::cp::{brute_force_optimal, cp_solve, CpConfig, CpInstance, CpStatus};
use hetsched::metrics::{self, SweepPoint};
use hetsched::model::{
    canonical_dag, unit_platform, AppDag, ArrivalDistribution, MixEntry, PeKind, Platform,
    ProcessingElement, TaskNode, WorkloadSpec,
};
use hetsched::sched::{
    earliest_start, validate_schedule, Assignment, ParentFinish, PeTimeline, ScheduleTable,
};
use hetsched::schedulers::{
    heft_base, heft_dyn, heft_edp, heft_edp_lb, heft_rt, met_schedule, peft_base, peft_rt,
    DynLevel, OctCache, PartialDag, ReadyTask, ScheduleMode, SchedulerInput, SchedulerKind,
};
use hetsched::sim::{profile_scheduler_overhead, run, SimConfig};
use hetsched::synth::synth_profile;
use hetsched::Std;

// ---------------------------------------------------------------- fixtures

fn zcu_like(n_cpu: usize, n_acc: usize) -> Platform<Std> {
    let z = n_cpu + n_acc;
    let pes = (0..z)
        .map(|id| ProcessingElement {
            id,
            name: if id < n_cpu {
                format!("cpu{id}")
            } else {
                format!("acc{id}")
            },
            kind: if id < n_cpu {
                PeKind::Cpu
            } else {
                PeKind::Accelerator
            },
            idle_power: 0.1,
        })
        .collect();
    let link = (0..z)
        .map(|a| (0..z).map(|b| if a == b { 0.0 } else { 2.0 }).collect())
        .collect();
    Platform {
        name: "zcu-like".into(),
        pes,
        link_bandwidth: link,
    }
}

fn big_little(n_little: usize, n_big: usize) -> Platform<Std> {
    let z = n_little + n_big;
    let pes = (0..z)
        .map(|id| ProcessingElement {
            id,
            name: if id < n_little {
                format!("little{id}")
            } else {
                format!("big{id}")
            },
            kind: PeKind::Cpu,
            idle_power: if id < n_little { 0.05 } else { 0.2 },
        })
        .collect();
    let link = (0..z)
        .map(|a| (0..z).map(|b| if a == b { 0.0 } else { 4.0 }).collect())
        .collect();
    Platform {
        name: "big-little".into(),
        pes,
        link_bandwidth: link,
    }
}

/// Structured big.LITTLE cost rows: little cores are twice as slow but draw
/// 0.3 W versus 2 W, so energy-aware placement has a real trade to make.
fn big_little_profile(
    n_tasks: usize,
    width: usize,
    n_little: usize,
    n_big: usize,
    seed: u64,
) -> AppDag<Std> {
    let mut dag = synth_profile::<Std>(n_tasks, width, n_little + n_big, 0.0, seed).unwrap();
    let mut rng = StdRng::seed_from_u64(seed ^ 0xb16_b00b5);
    for t in &mut dag.tasks {
        let base: f64 = rng.gen_range(6.0..18.0);
        for pe in 0..(n_little + n_big) {
            let little = pe < n_little;
            t.exec_time[pe] = Some(if little { 2.0 * base } else { base });
            t.power[pe] = Some(if little { 0.3 } else { 2.0 });
        }
    }
    dag
}

fn workload_of(
    dag: AppDag<Std>,
    rate: f64,
    duration: f64,
    arrival: ArrivalDistribution,
    seed: u64,
) -> WorkloadSpec<Std> {
    WorkloadSpec {
        mix: vec![MixEntry {
            dag,
            probability: 1.0,
        }],
        target_frame_rate: rate,
        duration,
        arrival_distribution: arrival,
        seed,
    }
}

// ------------------------------------------------------------ criterion 1

#[test]
fn acceptance_01_canonical_golden() {
    let t0 = Instant::now();
    let dag = canonical_dag::<Std>();
    let platform = unit_platform(3);
    let table = heft_base(&dag, &platform).unwrap();
    let violations = validate_schedule(&table, &[&dag], &platform, &[]);
    assert!(violations.is_empty(), "{violations:?}");
    assert_eq!(table.makespan(), 80.0, "golden makespan must be exactly 80");
    assert!(
        t0.elapsed() < Duration::from_secs(1),
        "took {:?}",
        t0.elapsed()
    );
    println!("acceptance 1 (canonical golden, makespan 80): PASS");
}

// ------------------------------------------------------------ criterion 2

fn random_small_platform(rng: &mut StdRng, z: usize) -> Platform<Std> {
    let mut platform = unit_platform::<Std>(z);
    for a in 0..z {
        for b in (a + 1)..z {
            let bw: f64 = rng.gen_range(0.5..4.0);
            platform.link_bandwidth[a][b] = bw;
            platform.link_bandwidth[b][a] = bw;
        }
    }
    platform
}

#[test]
fn acceptance_02_optimality_dominance() {
    let t0 = Instant::now();

    // Canonical instance: the exact solver proves an optimum that the
    // exhaustive oracle confirms, and HEFT cannot beat it.
    let platform = unit_platform::<Std>(3);
    let dag = canonical_dag::<Std>();
    let heft_makespan = heft_base(&dag, &platform).unwrap().makespan();
    let parts = vec![PartialDag::from_whole(0, dag)];
    let instance = CpInstance {
        dags: &parts,
        running: &[],
        platform: &platform,
        now: 0.0,
    };
    let sol = cp_solve(
        &instance,
        &CpConfig {
            time_limit: Duration::from_secs(240),
            max_width: None,
        },
    )
    .unwrap();
    assert_eq!(sol.status, CpStatus::Optimal);
    assert!(
        sol.objective <= heft_makespan + 1e-9,
        "{} > {}",
        sol.objective,
        heft_makespan
    );
    let brute = brute_force_optimal(&instance, 10).unwrap();
    assert!(
        (sol.objective - brute).abs() < 1e-9,
        "cp {} vs brute {}",
        sol.objective,
        brute
    );

    // Randomized suite: >= 50 instances with <= 8 tasks on <= 3 PEs, the
    // solver must match the oracle on every one.
    let mut rng = StdRng::seed_from_u64(0xACCE55);
    let mut checked = 0;
    while checked < 55 {
        let z = rng.gen_range(1..=3usize);
        let platform = random_small_platform(&mut rng, z);
        let two_dags = checked % 5 == 4;
        let parts: Vec<PartialDag<Std>> = if two_dags {
            let a = synth_profile::<Std>(
                rng.gen_range(2..=4),
                2,
                z,
                rng.gen_range(0.0..1.0),
                rng.gen(),
            )
            .unwrap();
            let mut b = synth_profile::<Std>(
                rng.gen_range(2..=4),
                2,
                z,
                rng.gen_range(0.0..1.0),
                rng.gen(),
            )
            .unwrap();
            let offset = a.tasks.len() as u64;
            for t in &mut b.tasks {
                t.id += offset;
            }
            for e in &mut b.edges {
                e.src += offset;
                e.dst += offset;
            }
            vec![PartialDag::from_whole(0, a), PartialDag::from_whole(1, b)]
        } else {
            let n = rng.gen_range(2..=8usize);
            let dag = synth_profile::<Std>(
                n,
                rng.gen_range(1..=3),
                z,
                rng.gen_range(0.0..1.0),
                rng.gen(),
            )
            .unwrap();
            vec![PartialDag::from_whole(0, dag)]
        };
        let instance = CpInstance {
            dags: &parts,
            running: &[],
            platform: &platform,
            now: 0.0,
        };
        let sol = cp_solve(
            &instance,
            &CpConfig {
                time_limit: Duration::from_secs(60),
                max_width: None,
            },
        )
        .unwrap();
        assert_eq!(
            sol.status,
            CpStatus::Optimal,
            "instance {checked} not proven"
        );
        let brute = brute_force_optimal(&instance, 8).unwrap();
        assert!(
            (sol.objective - brute).abs() < 1e-9,
            "instance {checked}: cp {} vs brute {}",
            sol.objective,
            brute
        );
        checked += 1;
    }
    assert!(
        t0.elapsed() < Duration::from_secs(300),
        "took {:?}",
        t0.elapsed()
    );
    println!("acceptance 2 (optimality dominance, canonical + {checked} random instances): PASS");
}

// ------------------------------------------------------------ criterion 3

#[test]
fn acceptance_03_dynamic_fix_monotonicity() {
    let platform = zcu_like(4, 6);
    for seed in [2u64, 3, 4, 6, 8] {
        let dag = synth_profile::<Std>(24, 5, 10, 0.6, seed).unwrap();
        let workload = workload_of(dag, 1.0 / 25.0, 101.0, ArrivalDistribution::Fixed, seed);
        let mk = |kind: SchedulerKind, level: DynLevel| {
            let config = SimConfig {
                dyn_level: level,
                ..SimConfig::default()
            };
            let result = run(&platform, &workload, kind, &config).unwrap();
            assert_eq!(result.frames.len(), 4, "expected 4 back-to-back frames");
            result.overall_makespan().unwrap()
        };
        let base = mk(SchedulerKind::HeftBase, DynLevel::Full);
        let merge = mk(SchedulerKind::HeftDyn, DynLevel::MergeOnly);
        let constr = mk(SchedulerKind::HeftDyn, DynLevel::WithConstraints);
        let full = mk(SchedulerKind::HeftDyn, DynLevel::Full);
        assert!(merge <= base, "seed {seed}: merge {merge} > base {base}");
        assert!(
            constr <= merge,
            "seed {seed}: constraints {constr} > merge {merge}"
        );
        assert!(
            full <= constr,
            "seed {seed}: full {full} > constraints {constr}"
        );
    }
    println!("acceptance 3 (dynamic-fix monotonicity on 5 seeded workloads): PASS");
}

// ------------------------------------------------------------ criterion 4

#[test]
fn acceptance_04_edp_assignment_oracle() {
    // Three PEs at 1/2/3 W, a 100-unit task, availabilities 200/100/100.
    let platform = unit_platform::<Std>(3);
    let mut timelines: Vec<PeTimeline<Std>> = (0..3).map(PeTimeline::new).collect();
    timelines[0].insert(0.0, 200.0, 901);
    timelines[1].insert(0.0, 100.0, 902);
    timelines[2].insert(0.0, 100.0, 903);
    let ready = vec![ReadyTask {
        global: 0,
        instance: 0,
        node: TaskNode {
            id: 0,
            name: "red".into(),
            exec_time: vec![Some(100.0); 3],
            power: vec![Some(1.0), Some(2.0), Some(3.0)],
        },
        parents: vec![],
        seq: 0,
    }];
    let input = SchedulerInput {
        mode: ScheduleMode::ReadyQueue,
        outstanding: &[],
        ready: &ready,
        running: &[],
        timelines: &timelines,
        platform: &platform,
        now: 0.0,
    };
    let edp = heft_edp(&input).unwrap();
    assert_eq!(
        edp[0].pe, 0,
        "edp must pick the 1 W PE despite oversubscription"
    );
    assert_eq!(edp[0].start, 200.0);

    let input = SchedulerInput {
        mode: ScheduleMode::ReadyQueue,
        outstanding: &[],
        ready: &ready,
        running: &[],
        timelines: &timelines,
        platform: &platform,
        now: 0.0,
    };
    let lb = heft_edp_lb(&input).unwrap();
    assert_eq!(lb[0].pe, 1, "edp-lb must pick the 2 W compromise PE");
    assert_eq!(lb[0].start, 100.0);
    println!("acceptance 4 (processor-assignment oracle: edp -> P1, edp-lb -> P2): PASS");
}

// --------------------------------------------- random ready-queue states

struct ReadyState {
    platform: Platform<Std>,
    timelines: Vec<PeTimeline<Std>>,
    running: Vec<Assignment<Std>>,
    committed: Vec<Assignment<Std>>,
    ready: Vec<ReadyTask<Std>>,
    now: Std,
}

fn random_ready_state(rng: &mut StdRng, uniform_power: Option<f64>) -> ReadyState {
    let z = rng.gen_range(1..=4usize);
    let platform = random_small_platform(rng, z);
    let now: f64 = rng.gen_range(0.0..30.0);

    let mut timelines: Vec<PeTimeline<Std>> = (0..z).map(PeTimeline::new).collect();
    let mut running = Vec::new();
    let mut committed = Vec::new();
    for pe in 0..z {
        let mut horizon = now;
        if rng.gen_bool(0.4) {
            let start = rng.gen_range(0.0..=now);
            let end = now + rng.gen_range(0.1..15.0);
            running.push(Assignment {
                task: 900 + pe as u64,
                pe,
                start,
                end,
            });
            timelines[pe].insert(start, end, 900 + pe as u64);
            horizon = end;
        }
        for k in 0..rng.gen_range(0..=2usize) {
            let start = horizon + rng.gen_range(0.0..8.0);
            let end = start + rng.gen_range(0.5..10.0);
            let id = 800 + (pe * 4 + k) as u64;
            committed.push(Assignment {
                task: id,
                pe,
                start,
                end,
            });
            timelines[pe].insert(start, end, id);
            horizon = end;
        }
    }

    let m = rng.gen_range(1..=6usize);
    let mut ready = Vec::new();
    for i in 0..m {
        let mut exec = Vec::with_capacity(z);
        let mut power = Vec::with_capacity(z);
        for _ in 0..z {
            if rng.gen_bool(0.75) {
                exec.push(Some(rng.gen_range(1.0..20.0)));
                power.push(Some(
                    uniform_power.unwrap_or_else(|| rng.gen_range(0.1..5.0)),
                ));
            } else {
                exec.push(None);
                power.push(None);
            }
        }
        if exec.iter().all(Option::is_none) {
            let pe = rng.gen_range(0..z);
            exec[pe] = Some(rng.gen_range(1.0..20.0));
            power[pe] = Some(uniform_power.unwrap_or_else(|| rng.gen_range(0.1..5.0)));
        }
        let parents = (0..rng.gen_range(0..=2usize))
            .map(|_| ParentFinish {
                end: rng.gen_range(0.0..=now),
                pe: rng.gen_range(0..z),
                volume: rng.gen_range(0.0..10.0),
            })
            .collect();
        ready.push(ReadyTask {
            global: 1000 + i as u64,
            instance: (i % 3) as u64,
            node: TaskNode {
                id: i as u64,
                name: format!("r{i}"),
                exec_time: exec,
                power,
            },
            parents,
            seq: i as u64,
        });
    }
    ReadyState {
        platform,
        timelines,
        running,
        committed,
        ready,
        now,
    }
}

impl ReadyState {
    fn input(&self) -> SchedulerInput<'_, Std> {
        SchedulerInput {
            mode: ScheduleMode::ReadyQueue,
            outstanding: &[],
            ready: &self.ready,
            running: &self.running,
            timelines: &self.timelines,
            platform: &self.platform,
            now: self.now,
        }
    }

    /// Single-node DAGs (global ids) for the validator.
    fn dags(&self) -> Vec<AppDag<Std>> {
        self.ready
            .iter()
            .map(|t| AppDag {
                app_name: format!("ready{}", t.global),
                tasks: vec![TaskNode {
                    id: t.global,
                    name: t.node.name.clone(),
                    exec_time: t.node.exec_time.clone(),
                    power: t.node.power.clone(),
                }],
                edges: vec![],
            })
            .collect()
    }

    fn check(&self, label: &str, assignments: &[Assignment<Std>]) {
        let mut table = ScheduleTable::new();
        for a in assignments {
            table.assignments.insert(a.task, *a);
        }
        let dags = self.dags();
        let dag_refs: Vec<&AppDag<Std>> = dags.iter().collect();
        let mut fixed = self.running.clone();
        fixed.extend(self.committed.iter().copied());
        let violations = validate_schedule(&table, &dag_refs, &self.platform, &fixed);
        assert!(violations.is_empty(), "{label}: {violations:?}");
        // Ready-queue specifics the validator cannot see: epoch clamp and
        // parent data arrival.
        for task in &self.ready {
            let a = &table.assignments[&task.global];
            assert!(
                a.start >= self.now - 1e-9,
                "{label}: task starts before the epoch"
            );
            let arrival = earliest_start(&task.parents, a.pe, &self.platform, 0.0);
            assert!(
                a.start >= arrival - 1e-9,
                "{label}: task starts before its data"
            );
        }
    }
}

// ------------------------------------------------------------ criterion 5

#[test]
fn acceptance_05_uniform_power_reduction() {
    let mut rng = StdRng::seed_from_u64(0x5EED5);
    let mut agree = 0usize;
    let states = 1200usize;
    for _ in 0..states {
        let c: f64 = rng.gen_range(0.1..5.0);
        let state = random_ready_state(&mut rng, Some(c));
        let rt = heft_rt(&state.input()).unwrap();
        let lb = heft_edp_lb(&state.input()).unwrap();
        let pe_of = |list: &[Assignment<Std>], id: u64| {
            list.iter().find(|a| a.task == id).map(|a| a.pe).unwrap()
        };
        let all_equal = state
            .ready
            .iter()
            .all(|t| pe_of(&rt, t.global) == pe_of(&lb, t.global));
        assert!(all_equal, "uniform power but edp-lb diverged from rt");
        agree += 1;
    }
    assert_eq!(agree, states);
    println!(
        "acceptance 5 (uniform-power reduction on {states} random states, 100% agreement): PASS"
    );
}

// ------------------------------------------------------------ criterion 6

#[test]
fn acceptance_06_energy_ordering() {
    let platform = big_little(4, 4);
    for seed in [1u64, 2, 3, 4, 5] {
        let dag = big_little_profile(14, 4, 4, 4, seed);
        let workload = workload_of(dag, 0.004, 2000.0, ArrivalDistribution::Exponential, seed);
        let point = |kind: SchedulerKind| {
            let r = run(&platform, &workload, kind, &SimConfig::default()).unwrap();
            SweepPoint::from_result(&r, &platform, workload.target_frame_rate)
        };
        let rt = point(SchedulerKind::HeftRt);
        let edp = point(SchedulerKind::HeftEdp);
        let lb = point(SchedulerKind::HeftEdpLb);
        assert!(
            edp.energy_total <= lb.energy_total && lb.energy_total <= rt.energy_total,
            "seed {seed}: energy edp {} lb {} rt {}",
            edp.energy_total,
            lb.energy_total,
            rt.energy_total
        );
        assert!(
            rt.avg_frame_exec_time <= lb.avg_frame_exec_time
                && lb.avg_frame_exec_time <= edp.avg_frame_exec_time,
            "seed {seed}: exec rt {} lb {} edp {}",
            rt.avg_frame_exec_time,
            lb.avg_frame_exec_time,
            edp.avg_frame_exec_time
        );
    }
    println!("acceptance 6 (energy and frame-time ordering on 5 seeded low-rate runs): PASS");
}

// ------------------------------------------------------------ criterion 7

#[test]
fn acceptance_07_saturation_ordering() {
    let t0 = Instant::now();
    let platform = zcu_like(4, 6);
    let dag = synth_profile::<Std>(10, 4, 10, 0.6, 0).unwrap();
    let rates: Vec<f64> = (0..18)
        .map(|i| 0.004 * (0.4f64 / 0.004).powf(i as f64 / 17.0))
        .collect();
    let sweep = |kind: SchedulerKind| -> Vec<SweepPoint<Std>> {
        rates
            .iter()
            .map(|rate| {
                let workload = workload_of(
                    dag.clone(),
                    *rate,
                    600.0,
                    ArrivalDistribution::Exponential,
                    7,
                );
                let r = run(&platform, &workload, kind, &SimConfig::default()).unwrap();
                SweepPoint::from_result(&r, &platform, *rate)
            })
            .collect()
    };
    let sat = |kind: SchedulerKind| {
        metrics::saturation_point(&sweep(kind), metrics::SATURATION_TOL)
            .unwrap()
            .rate
    };
    let base = sat(SchedulerKind::HeftBase);
    let dyn_ = sat(SchedulerKind::HeftDyn);
    let rt = sat(SchedulerKind::HeftRt);
    assert!(rt >= dyn_, "rt {rt} < dyn {dyn_}");
    assert!(dyn_ >= base, "dyn {dyn_} < base {base}");
    assert!(
        t0.elapsed() < Duration::from_secs(600),
        "took {:?}",
        t0.elapsed()
    );
    println!(
        "acceptance 7 (18-point saturation ordering rt {rt:.4} >= dyn {dyn_:.4} >= base {base:.4}): PASS"
    );
}

// ------------------------------------------------------------ criterion 8

#[test]
fn acceptance_08_overhead_ordering() {
    let platform = zcu_like(4, 6);
    let dag = synth_profile::<Std>(10, 4, 10, 0.6, 0).unwrap();
    let workload = workload_of(dag, 0.3, 400.0, ArrivalDistribution::Exponential, 11);

    let rt_result = run(
        &platform,
        &workload,
        SchedulerKind::HeftRt,
        &SimConfig::default(),
    )
    .unwrap();
    let dyn_result = run(
        &platform,
        &workload,
        SchedulerKind::HeftDyn,
        &SimConfig::default(),
    )
    .unwrap();
    assert!(
        rt_result.frames.len() >= 100,
        "workload too small: {}",
        rt_result.frames.len()
    );

    let rt = profile_scheduler_overhead(&rt_result).unwrap();
    let dyn_ = profile_scheduler_overhead(&dyn_result).unwrap();
    assert!(
        rt.total < dyn_.total,
        "rt total {:?} not below dyn total {:?}",
        rt.total,
        dyn_.total
    );
    println!(
        "acceptance 8 (scheduling wall clock: rt {:?}/{} calls < dyn {:?}/{} calls): PASS",
        rt.total, rt.count, dyn_.total, dyn_.count
    );
}

// ------------------------------------------------------------ criterion 10

/// Instantiate a synthetic frame with globally-offset ids and mark the first
/// `k_done` tasks (topological order) as finished in the past.
fn partialize(
    rng: &mut StdRng,
    dag: &AppDag<Std>,
    offset: u64,
    instance: u64,
    k_done: usize,
    now: f64,
) -> PartialDag<Std> {
    let mut global = dag.clone();
    let index = global.index_of();
    for t in global.tasks.iter_mut() {
        t.id = offset + index[&t.id] as u64;
    }
    for e in global.edges.iter_mut() {
        e.src = offset + index[&e.src] as u64;
        e.dst = offset + index[&e.dst] as u64;
    }
    let topo = global.topo_order().unwrap();
    let done: std::collections::BTreeMap<u64, (f64, usize)> = topo
        .iter()
        .take(k_done)
        .map(|id| {
            let node = global.task(*id).unwrap();
            let pes: Vec<usize> = node.supported_pes().collect();
            let pe = pes[rng.gen_range(0..pes.len())];
            (*id, (rng.gen_range(0.0..=now), pe))
        })
        .collect();
    let tasks: Vec<TaskNode<Std>> = global
        .tasks
        .iter()
        .filter(|t| !done.contains_key(&t.id))
        .cloned()
        .collect();
    let mut ext: std::collections::BTreeMap<u64, Vec<ParentFinish<Std>>> =
        std::collections::BTreeMap::new();
    for e in &global.edges {
        if let Some((end, pe)) = done.get(&e.src) {
            if !done.contains_key(&e.dst) {
                ext.entry(e.dst).or_default().push(ParentFinish {
                    end: *end,
                    pe: *pe,
                    volume: e.data_volume,
                });
            }
        }
    }
    let edges = global
        .edges
        .iter()
        .filter(|e| !done.contains_key(&e.src) && !done.contains_key(&e.dst))
        .cloned()
        .collect();
    let locals = tasks.iter().map(|t| (t.id, t.id - offset)).collect();
    PartialDag {
        instance,
        dag: AppDag {
            app_name: global.app_name.clone(),
            tasks,
            edges,
        },
        locals,
        ext,
    }
}

fn check_whole_dag_output(
    label: &str,
    parts: &[PartialDag<Std>],
    platform: &Platform<Std>,
    running: &[Assignment<Std>],
    now: f64,
    table: &ScheduleTable<Std>,
) {
    let dag_refs: Vec<&AppDag<Std>> = parts.iter().map(|p| &p.dag).collect();
    let violations = validate_schedule(table, &dag_refs, platform, running);
    assert!(violations.is_empty(), "{label}: {violations:?}");
    for part in parts {
        for (id, ext) in &part.ext {
            let a = &table.assignments[id];
            let arrival = earliest_start(ext, a.pe, platform, 0.0);
            assert!(
                a.start >= arrival - 1e-9,
                "{label}: task {id} outruns external data"
            );
        }
        for id in part.locals.keys() {
            let a = &table.assignments[id];
            assert!(
                a.start >= now - 1e-9,
                "{label}: task {id} scheduled in the past"
            );
        }
    }
}

#[test]
fn acceptance_10_validity_fuzzing() {
    let mut rng = StdRng::seed_from_u64(0xF0220);
    let mut invocations = 0usize;

    // Ready-queue schedulers: 5 kinds x 1400 random states.
    let ready_kinds = [
        SchedulerKind::Met,
        SchedulerKind::HeftRt,
        SchedulerKind::HeftEdp,
        SchedulerKind::HeftEdpLb,
        SchedulerKind::PeftRt,
    ];
    for kind in ready_kinds {
        for _ in 0..1400 {
            let state = random_ready_state(&mut rng, None);
            let input = state.input();
            let assignments = match kind {
                SchedulerKind::Met => met_schedule(&input).unwrap(),
                SchedulerKind::HeftRt => heft_rt(&input).unwrap(),
                SchedulerKind::HeftEdp => heft_edp(&input).unwrap(),
                SchedulerKind::HeftEdpLb => heft_edp_lb(&input).unwrap(),
                SchedulerKind::PeftRt => {
                    // OCT rows of single ready tasks are all zero; prime the
                    // cache from equivalent one-task graphs.
                    let mut cache = OctCache::new();
                    for dag in state.dags() {
                        cache.prime_frame(&dag, &state.platform).unwrap();
                    }
                    peft_rt(&input, &cache).unwrap()
                }
                _ => unreachable!(),
            };
            state.check(kind.name(), &assignments);
            invocations += 1;
        }
    }

    // Static whole-DAG schedulers on random graphs.
    for i in 0..800 {
        let z = rng.gen_range(1..=4usize);
        let platform = random_small_platform(&mut rng, z);
        let dag = synth_profile::<Std>(
            rng.gen_range(2..=8),
            rng.gen_range(1..=3),
            z,
            rng.gen_range(0.0..1.0),
            rng.gen(),
        )
        .unwrap();
        let table = heft_base(&dag, &platform).unwrap();
        let violations = validate_schedule(&table, &[&dag], &platform, &[]);
        assert!(violations.is_empty(), "heft_base #{i}: {violations:?}");
        invocations += 1;
    }
    for i in 0..700 {
        let z = rng.gen_range(1..=4usize);
        let platform = random_small_platform(&mut rng, z);
        let dag = synth_profile::<Std>(
            rng.gen_range(2..=8),
            rng.gen_range(1..=3),
            z,
            rng.gen_range(0.0..1.0),
            rng.gen(),
        )
        .unwrap();
        let table = peft_base(&dag, &platform).unwrap();
        let violations = validate_schedule(&table, &[&dag], &platform, &[]);
        assert!(violations.is_empty(), "peft_base #{i}: {violations:?}");
        invocations += 1;
    }

    // Dynamic whole-DAG schedulers on random partial system states.
    let dyn_levels = [
        DynLevel::MergeOnly,
        DynLevel::WithConstraints,
        DynLevel::Full,
    ];
    for i in 0..800 {
        let z = rng.gen_range(2..=4usize);
        let platform = random_small_platform(&mut rng, z);
        let now: f64 = rng.gen_range(0.0..20.0);
        let n_dags = rng.gen_range(1..=3usize);
        let mut parts = Vec::new();
        let mut offset = 0u64;
        for d in 0..n_dags {
            let n = rng.gen_range(2..=6usize);
            let dag = synth_profile::<Std>(n, 2, z, rng.gen_range(0.0..1.0), rng.gen()).unwrap();
            let k_done = if d + 1 == n_dags {
                0
            } else {
                rng.gen_range(0..n)
            };
            parts.push(partialize(&mut rng, &dag, offset, d as u64, k_done, now));
            offset += n as u64;
        }
        let mut running = Vec::new();
        let mut timelines: Vec<PeTimeline<Std>> = (0..z).map(PeTimeline::new).collect();
        for pe in 0..z {
            if rng.gen_bool(0.3) {
                let start = rng.gen_range(0.0..=now);
                let end = now + rng.gen_range(0.1..10.0);
                running.push(Assignment {
                    task: 5000 + pe as u64,
                    pe,
                    start,
                    end,
                });
                timelines[pe].insert(start, end, 5000 + pe as u64);
            }
        }
        let incoming = parts.pop().unwrap();
        let input = SchedulerInput {
            mode: ScheduleMode::WholeDag,
            outstanding: &parts,
            ready: &[],
            running: &running,
            timelines: &timelines,
            platform: &platform,
            now,
        };
        let level = dyn_levels[i % 3];
        let table = heft_dyn(&input, &incoming, level).unwrap();
        let mut all = parts.clone();
        all.push(incoming);
        // MergeOnly deliberately ignores running occupancy, so validate
        // overlap only against what that level was told to respect.
        let fixed: &[Assignment<Std>] = if level == DynLevel::MergeOnly {
            &[]
        } else {
            &running
        };
        check_whole_dag_output("heft_dyn", &all, &platform, fixed, now, &table);
        invocations += 1;
    }

    // Exact solver on small random instances.
    for i in 0..700 {
        let z = rng.gen_range(1..=3usize);
        let platform = random_small_platform(&mut rng, z);
        let now: f64 = rng.gen_range(0.0..10.0);
        let dag = synth_profile::<Std>(
            rng.gen_range(2..=5),
            2,
            z,
            rng.gen_range(0.0..1.0),
            rng.gen(),
        )
        .unwrap();
        let k_done = rng.gen_range(0..dag.tasks.len().min(2));
        let parts = vec![partialize(&mut rng, &dag, 0, 0, k_done, now)];
        let mut running = Vec::new();
        for pe in 0..z {
            if rng.gen_bool(0.3) {
                running.push(Assignment {
                    task: 5000 + pe as u64,
                    pe,
                    start: rng.gen_range(0.0..=now),
                    end: now + rng.gen_range(0.1..8.0),
                });
            }
        }
        let instance = CpInstance {
            dags: &parts,
            running: &running,
            platform: &platform,
            now,
        };
        let sol = cp_solve(
            &instance,
            &CpConfig {
                time_limit: Duration::from_millis(50),
                max_width: None,
            },
        )
        .unwrap();
        assert_ne!(sol.status, CpStatus::Infeasible, "cp #{i}");
        check_whole_dag_output("cp", &parts, &platform, &running, now, &sol.table);
        invocations += 1;
    }

    assert_eq!(invocations, 10_000);
    println!("acceptance 10 (validity fuzzing, {invocations} invocations, zero violations): PASS");
}

//! Domain model: processing elements, platforms, application DAGs, workloads.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::scalar::Scalar;

/// Identifier of a task. Unique within one [`AppDag`]; the simulator hands out
/// globally unique ids when it instantiates frames.
pub type TaskId = u64;

/// Index of a processing element within its [`Platform`].
pub type PeId = usize;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error(
        "platform `{platform}`: pe ids must be dense and unique (0..{expected}), got id {got}"
    )]
    PeIdsNotDense {
        platform: String,
        expected: usize,
        got: usize,
    },
    #[error("platform `{platform}`: pe `{pe}` has negative idle_power")]
    NegativeIdlePower { platform: String, pe: String },
    #[error("platform `{platform}`: link_bandwidth must be {z}x{z}, row {row} has {len} entries")]
    BandwidthShape {
        platform: String,
        z: usize,
        row: usize,
        len: usize,
    },
    #[error("platform `{platform}`: link_bandwidth[{a}][{b}] = {ab} != link_bandwidth[{b}][{a}] = {ba} (must be symmetric)")]
    BandwidthAsymmetric {
        platform: String,
        a: usize,
        b: usize,
        ab: f64,
        ba: f64,
    },
    #[error("platform `{platform}`: link_bandwidth[{a}][{b}] = {value} must be > 0")]
    BandwidthNonPositive {
        platform: String,
        a: usize,
        b: usize,
        value: f64,
    },
    #[error("platform `{platform}` has no processing elements")]
    EmptyPlatform { platform: String },
    #[error("dag `{dag}`: duplicate task id {id}")]
    DuplicateTaskId { dag: String, id: TaskId },
    #[error("dag `{dag}`: task `{task}` exec_time has {len} entries, platform has {z} PEs")]
    ExecRowShape {
        dag: String,
        task: String,
        len: usize,
        z: usize,
    },
    #[error("dag `{dag}`: task `{task}` power has {len} entries, platform has {z} PEs")]
    PowerRowShape {
        dag: String,
        task: String,
        len: usize,
        z: usize,
    },
    #[error("dag `{dag}`: task `{task}` supports no PE")]
    NoSupportedPe { dag: String, task: String },
    #[error("dag `{dag}`: task `{task}` exec_time[{pe}] must be > 0")]
    NonPositiveExec { dag: String, task: String, pe: PeId },
    #[error("dag `{dag}`: task `{task}` power[{pe}] must be >= 0")]
    NegativePower { dag: String, task: String, pe: PeId },
    #[error("dag `{dag}`: task `{task}` exec_time and power must be supported on the same PE set (pe {pe})")]
    SupportMismatch { dag: String, task: String, pe: PeId },
    #[error("dag `{dag}`: edge ({src}, {dst}) references unknown task")]
    EdgeUnknownTask {
        dag: String,
        src: TaskId,
        dst: TaskId,
    },
    #[error("dag `{dag}`: self edge on task {id}")]
    SelfEdge { dag: String, id: TaskId },
    #[error("dag `{dag}`: edge ({src}, {dst}) has negative data_volume")]
    NegativeVolume {
        dag: String,
        src: TaskId,
        dst: TaskId,
    },
    #[error("dag `{dag}` contains a dependency cycle")]
    Cycle { dag: String },
    #[error("workload: mix probabilities sum to {sum}, expected 1")]
    MixProbability { sum: f64 },
    #[error("workload: target_frame_rate must be > 0")]
    NonPositiveRate,
    #[error("workload: duration must be > 0")]
    NonPositiveDuration,
    #[error("workload: mix is empty")]
    EmptyMix,
}

/// Kind of processing element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeKind {
    Cpu,
    Accelerator,
}

/// One processing element: a CPU core or a fixed-function accelerator.
#[derive(Debug, Clone)]
pub struct ProcessingElement<S> {
    pub id: PeId,
    pub name: String,
    pub kind: PeKind,
    /// Static power drawn whether or not the PE is busy, in watts.
    pub idle_power: S,
}

/// A set of processing elements plus pairwise link bandwidths.
#[derive(Debug, Clone)]
pub struct Platform<S> {
    pub name: String,
    pub pes: Vec<ProcessingElement<S>>,
    /// `link_bandwidth[a][b]` is the data-units-per-time between distinct PEs;
    /// diagonal entries are ignored (intra-PE transfers are free).
    pub link_bandwidth: Vec<Vec<S>>,
}

impl<S: Scalar> Platform<S> {
    pub fn num_pes(&self) -> usize {
        self.pes.len()
    }

    /// Transfer time of `volume` data units from `src` to `dst`; zero within one PE.
    pub fn comm_time(&self, src: PeId, dst: PeId, volume: S) -> S {
        if src == dst || volume == S::zero() {
            S::zero()
        } else {
            volume / self.link_bandwidth[src][dst]
        }
    }

    /// Mean bandwidth over the off-diagonal link matrix; `None` for a single PE.
    pub fn mean_link_bandwidth(&self) -> Option<S> {
        let z = self.num_pes();
        if z <= 1 {
            return None;
        }
        let mut sum = S::zero();
        for a in 0..z {
            for b in 0..z {
                if a != b {
                    sum += self.link_bandwidth[a][b];
                }
            }
        }
        Some(sum / S::from_config((z * (z - 1)) as f64))
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let name = || self.name.clone();
        let z = self.num_pes();
        if z == 0 {
            return Err(ModelError::EmptyPlatform { platform: name() });
        }
        for (idx, pe) in self.pes.iter().enumerate() {
            if pe.id != idx {
                return Err(ModelError::PeIdsNotDense {
                    platform: name(),
                    expected: z,
                    got: pe.id,
                });
            }
            if pe.idle_power < S::zero() {
                return Err(ModelError::NegativeIdlePower {
                    platform: name(),
                    pe: pe.name.clone(),
                });
            }
        }
        if self.link_bandwidth.len() != z {
            return Err(ModelError::BandwidthShape {
                platform: name(),
                z,
                row: z,
                len: self.link_bandwidth.len(),
            });
        }
        for (row, entries) in self.link_bandwidth.iter().enumerate() {
            if entries.len() != z {
                return Err(ModelError::BandwidthShape {
                    platform: name(),
                    z,
                    row,
                    len: entries.len(),
                });
            }
        }
        for a in 0..z {
            for b in (a + 1)..z {
                let ab = self.link_bandwidth[a][b];
                let ba = self.link_bandwidth[b][a];
                if ab != ba {
                    return Err(ModelError::BandwidthAsymmetric {
                        platform: name(),
                        a,
                        b,
                        ab: ab.to_config(),
                        ba: ba.to_config(),
                    });
                }
                if ab <= S::zero() {
                    return Err(ModelError::BandwidthNonPositive {
                        platform: name(),
                        a,
                        b,
                        value: ab.to_config(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Per-task cost rows: execution time and power on each PE, `None` = unsupported.
#[derive(Debug, Clone)]
pub struct TaskNode<S> {
    pub id: TaskId,
    pub name: String,
    pub exec_time: Vec<Option<S>>,
    pub power: Vec<Option<S>>,
}

impl<S: Scalar> TaskNode<S> {
    pub fn supports(&self, pe: PeId) -> bool {
        self.exec_time.get(pe).copied().flatten().is_some()
    }

    /// PEs this task can execute on, in ascending index order.
    pub fn supported_pes(&self) -> impl Iterator<Item = PeId> + '_ {
        self.exec_time
            .iter()
            .enumerate()
            .filter_map(|(k, w)| w.map(|_| k))
    }

    pub fn exec_on(&self, pe: PeId) -> Option<S> {
        self.exec_time.get(pe).copied().flatten()
    }

    pub fn power_on(&self, pe: PeId) -> Option<S> {
        self.power.get(pe).copied().flatten()
    }

    /// Arithmetic mean of the execution time over the supported PEs.
    pub fn mean_exec_time(&self) -> S {
        mean_over_supported(&self.exec_time)
    }

    /// Arithmetic mean of the power over the supported PEs.
    pub fn mean_power(&self) -> S {
        mean_over_supported(&self.power)
    }

    /// Minimum execution time over supported PEs.
    pub fn min_exec_time(&self) -> S {
        self.exec_time
            .iter()
            .flatten()
            .copied()
            .fold(S::infinity(), |acc, w| if w < acc { w } else { acc })
    }
}

fn mean_over_supported<S: Scalar>(row: &[Option<S>]) -> S {
    let mut sum = S::zero();
    let mut n = 0usize;
    for v in row.iter().flatten() {
        sum += *v;
        n += 1;
    }
    debug_assert!(n > 0, "task must support at least one PE");
    sum / S::from_config(n as f64)
}

/// A data dependency between two tasks, weighted by transfer volume.
#[derive(Debug, Clone)]
pub struct Edge<S> {
    pub src: TaskId,
    pub dst: TaskId,
    pub data_volume: S,
}

/// An application task graph with per-PE cost matrices.
#[derive(Debug, Clone)]
pub struct AppDag<S> {
    pub app_name: String,
    pub tasks: Vec<TaskNode<S>>,
    pub edges: Vec<Edge<S>>,
}

impl<S: Scalar> AppDag<S> {
    pub fn task(&self, id: TaskId) -> Option<&TaskNode<S>> {
        self.tasks.iter().find(|t| t.id == id)
    }

    /// Map task id -> position in `tasks`.
    pub fn index_of(&self) -> BTreeMap<TaskId, usize> {
        self.tasks
            .iter()
            .enumerate()
            .map(|(i, t)| (t.id, i))
            .collect()
    }

    /// Successor adjacency: id -> [(successor id, data volume)].
    pub fn successors(&self) -> BTreeMap<TaskId, Vec<(TaskId, S)>> {
        let mut out: BTreeMap<TaskId, Vec<(TaskId, S)>> =
            self.tasks.iter().map(|t| (t.id, Vec::new())).collect();
        for e in &self.edges {
            out.get_mut(&e.src)
                .expect("validated edge")
                .push((e.dst, e.data_volume));
        }
        out
    }

    /// Predecessor adjacency: id -> [(predecessor id, data volume)].
    pub fn predecessors(&self) -> BTreeMap<TaskId, Vec<(TaskId, S)>> {
        let mut out: BTreeMap<TaskId, Vec<(TaskId, S)>> =
            self.tasks.iter().map(|t| (t.id, Vec::new())).collect();
        for e in &self.edges {
            out.get_mut(&e.dst)
                .expect("validated edge")
                .push((e.src, e.data_volume));
        }
        out
    }

    /// Kahn topological order over task ids; `Err` when the graph has a cycle.
    pub fn topo_order(&self) -> Result<Vec<TaskId>, ModelError> {
        let mut indegree: BTreeMap<TaskId, usize> = self.tasks.iter().map(|t| (t.id, 0)).collect();
        for e in &self.edges {
            if let Some(d) = indegree.get_mut(&e.dst) {
                *d += 1;
            }
        }
        let mut queue: VecDeque<TaskId> = self
            .tasks
            .iter()
            .filter(|t| indegree[&t.id] == 0)
            .map(|t| t.id)
            .collect();
        let succ = self.successors();
        let mut order = Vec::with_capacity(self.tasks.len());
        while let Some(id) = queue.pop_front() {
            order.push(id);
            for (s, _) in &succ[&id] {
                let d = indegree.get_mut(s).expect("validated edge");
                *d -= 1;
                if *d == 0 {
                    queue.push_back(*s);
                }
            }
        }
        if order.len() == self.tasks.len() {
            Ok(order)
        } else {
            Err(ModelError::Cycle {
                dag: self.app_name.clone(),
            })
        }
    }

    /// Full structural validation against a platform.
    pub fn validate(&self, platform: &Platform<S>) -> Result<(), ModelError> {
        let dag = || self.app_name.clone();
        let z = platform.num_pes();
        let mut seen = BTreeSet::new();
        for t in &self.tasks {
            if !seen.insert(t.id) {
                return Err(ModelError::DuplicateTaskId {
                    dag: dag(),
                    id: t.id,
                });
            }
            if t.exec_time.len() != z {
                return Err(ModelError::ExecRowShape {
                    dag: dag(),
                    task: t.name.clone(),
                    len: t.exec_time.len(),
                    z,
                });
            }
            if t.power.len() != z {
                return Err(ModelError::PowerRowShape {
                    dag: dag(),
                    task: t.name.clone(),
                    len: t.power.len(),
                    z,
                });
            }
            let mut supported = 0usize;
            for pe in 0..z {
                match (t.exec_time[pe], t.power[pe]) {
                    (Some(w), Some(p)) => {
                        supported += 1;
                        if w <= S::zero() {
                            return Err(ModelError::NonPositiveExec {
                                dag: dag(),
                                task: t.name.clone(),
                                pe,
                            });
                        }
                        if p < S::zero() {
                            return Err(ModelError::NegativePower {
                                dag: dag(),
                                task: t.name.clone(),
                                pe,
                            });
                        }
                    }
                    (None, None) => {}
                    _ => {
                        return Err(ModelError::SupportMismatch {
                            dag: dag(),
                            task: t.name.clone(),
                            pe,
                        })
                    }
                }
            }
            if supported == 0 {
                return Err(ModelError::NoSupportedPe {
                    dag: dag(),
                    task: t.name.clone(),
                });
            }
        }
        for e in &self.edges {
            if e.src == e.dst {
                return Err(ModelError::SelfEdge {
                    dag: dag(),
                    id: e.src,
                });
            }
            if !seen.contains(&e.src) || !seen.contains(&e.dst) {
                return Err(ModelError::EdgeUnknownTask {
                    dag: dag(),
                    src: e.src,
                    dst: e.dst,
                });
            }
            if e.data_volume < S::zero() {
                return Err(ModelError::NegativeVolume {
                    dag: dag(),
                    src: e.src,
                    dst: e.dst,
                });
            }
        }
        self.topo_order()?;
        Ok(())
    }
}

/// Average communication cost of an edge: volume over the mean link bandwidth.
/// Zero on single-PE platforms (no links to cross).
pub fn avg_comm_cost<S: Scalar>(edge_volume: S, platform: &Platform<S>) -> S {
    match platform.mean_link_bandwidth() {
        Some(bw) => edge_volume / bw,
        None => S::zero(),
    }
}

/// How inter-frame gaps are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArrivalDistribution {
    /// Exponential gaps with mean `1 / target_frame_rate` (Poisson arrivals).
    Exponential,
    /// Constant gaps of exactly `1 / target_frame_rate`.
    Fixed,
}

/// One entry of a workload application mix.
#[derive(Debug, Clone)]
pub struct MixEntry<S> {
    pub dag: AppDag<S>,
    pub probability: f64,
}

/// A dynamic workload: application mix, injection rate and horizon.
#[derive(Debug, Clone)]
pub struct WorkloadSpec<S> {
    pub mix: Vec<MixEntry<S>>,
    pub target_frame_rate: S,
    pub duration: S,
    pub arrival_distribution: ArrivalDistribution,
    pub seed: u64,
}

impl<S: Scalar> WorkloadSpec<S> {
    pub fn validate(&self, platform: &Platform<S>) -> Result<(), ModelError> {
        if self.mix.is_empty() {
            return Err(ModelError::EmptyMix);
        }
        let sum: f64 = self.mix.iter().map(|m| m.probability).sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(ModelError::MixProbability { sum });
        }
        if self.target_frame_rate <= S::zero() {
            return Err(ModelError::NonPositiveRate);
        }
        if self.duration <= S::zero() {
            return Err(ModelError::NonPositiveDuration);
        }
        for entry in &self.mix {
            entry.dag.validate(platform)?;
        }
        Ok(())
    }
}

/// The ten-task benchmark DAG used as the golden scheduling case, with its
/// three-PE execution-time table. Power is not part of the benchmark table and
/// is filled with a uniform 1 W.
pub fn canonical_dag<S: Scalar>() -> AppDag<S> {
    let exec: [[f64; 3]; 10] = [
        [14.0, 16.0, 9.0],
        [13.0, 19.0, 18.0],
        [11.0, 13.0, 19.0],
        [13.0, 8.0, 17.0],
        [12.0, 13.0, 10.0],
        [13.0, 16.0, 9.0],
        [7.0, 15.0, 11.0],
        [5.0, 11.0, 14.0],
        [18.0, 12.0, 20.0],
        [21.0, 7.0, 16.0],
    ];
    let edges: [(u64, u64, f64); 15] = [
        (1, 2, 18.0),
        (1, 3, 12.0),
        (1, 4, 9.0),
        (1, 5, 11.0),
        (1, 6, 14.0),
        (2, 8, 19.0),
        (2, 9, 16.0),
        (3, 7, 23.0),
        (4, 8, 27.0),
        (4, 9, 23.0),
        (5, 9, 13.0),
        (6, 8, 15.0),
        (7, 10, 17.0),
        (8, 10, 11.0),
        (9, 10, 13.0),
    ];
    let tasks = exec
        .iter()
        .enumerate()
        .map(|(i, row)| TaskNode {
            id: (i + 1) as TaskId,
            name: format!("t{}", i + 1),
            exec_time: row.iter().map(|w| Some(S::from_config(*w))).collect(),
            power: vec![Some(S::one()); 3],
        })
        .collect();
    let edges = edges
        .iter()
        .map(|(src, dst, vol)| Edge {
            src: *src,
            dst: *dst,
            data_volume: S::from_config(*vol),
        })
        .collect();
    AppDag {
        app_name: "canonical".to_string(),
        tasks,
        edges,
    }
}

/// A `z`-PE CPU platform with unit link bandwidth everywhere and zero idle power.
pub fn unit_platform<S: Scalar>(z: usize) -> Platform<S> {
    let pes = (0..z)
        .map(|id| ProcessingElement {
            id,
            name: format!("P{id}"),
            kind: PeKind::Cpu,
            idle_power: S::zero(),
        })
        .collect();
    let link_bandwidth = (0..z)
        .map(|a| {
            (0..z)
                .map(|b| if a == b { S::zero() } else { S::one() })
                .collect()
        })
        .collect();
    Platform {
        name: format!("unit-{z}"),
        pes,
        link_bandwidth,
    }
}

//! File formats: platforms, application DAGs and workloads as JSON documents.
//!
//! Numbers are plain decimals in the declared time unit; `null` in a cost row
//! marks a PE the task cannot run on.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    AppDag, ArrivalDistribution, Edge, MixEntry, ModelError, PeKind, Platform, ProcessingElement,
    TaskNode, WorkloadSpec,
};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed document: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {source}")]
    Invalid {
        path: PathBuf,
        #[source]
        source: ModelError,
    },
}

#[derive(Debug, Serialize, Deserialize)]
struct PlatformDoc {
    name: String,
    pes: Vec<PeDoc>,
    link_bandwidth: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct PeDoc {
    id: usize,
    name: String,
    kind: PeKind,
    #[serde(default)]
    idle_power: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct DagDoc {
    app_name: String,
    tasks: Vec<TaskDoc>,
    edges: Vec<EdgeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TaskDoc {
    id: u64,
    name: String,
    exec_time: Vec<Option<f64>>,
    power: Vec<Option<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeDoc {
    src: u64,
    dst: u64,
    data_volume: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct WorkloadDoc {
    mix: Vec<MixDoc>,
    target_frame_rate: f64,
    duration: f64,
    #[serde(default = "default_arrival")]
    arrival_distribution: ArrivalDistribution,
    #[serde(default)]
    seed: u64,
}

fn default_arrival() -> ArrivalDistribution {
    ArrivalDistribution::Exponential
}

#[derive(Debug, Serialize, Deserialize)]
struct MixDoc {
    dag: String,
    probability: f64,
}

fn read_doc<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| IoError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

/// Load and validate a platform document.
pub fn load_platform<S: Scalar>(path: &Path) -> Result<Platform<S>, IoError> {
    let doc: PlatformDoc = read_doc(path)?;
    let platform = Platform {
        name: doc.name,
        pes: doc
            .pes
            .into_iter()
            .map(|p| ProcessingElement {
                id: p.id,
                name: p.name,
                kind: p.kind,
                idle_power: S::from_config(p.idle_power),
            })
            .collect(),
        link_bandwidth: doc
            .link_bandwidth
            .into_iter()
            .map(|row| row.into_iter().map(S::from_config).collect())
            .collect(),
    };
    platform.validate().map_err(|source| IoError::Invalid {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(platform)
}

fn dag_from_doc<S: Scalar>(doc: DagDoc) -> AppDag<S> {
    AppDag {
        app_name: doc.app_name,
        tasks: doc
            .tasks
            .into_iter()
            .map(|t| TaskNode {
                id: t.id,
                name: t.name,
                exec_time: t
                    .exec_time
                    .into_iter()
                    .map(|w| w.map(S::from_config))
                    .collect(),
                power: t.power.into_iter().map(|p| p.map(S::from_config)).collect(),
            })
            .collect(),
        edges: doc
            .edges
            .into_iter()
            .map(|e| Edge {
                src: e.src,
                dst: e.dst,
                data_volume: S::from_config(e.data_volume),
            })
            .collect(),
    }
}

/// Load an application DAG and validate it against `platform`.
pub fn load_dag<S: Scalar>(path: &Path, platform: &Platform<S>) -> Result<AppDag<S>, IoError> {
    let doc: DagDoc = read_doc(path)?;
    let dag = dag_from_doc(doc);
    dag.validate(platform).map_err(|source| IoError::Invalid {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(dag)
}

/// Load a workload document; DAG paths inside it resolve relative to the
/// workload file's directory.
pub fn load_workload<S: Scalar>(
    path: &Path,
    platform: &Platform<S>,
) -> Result<WorkloadSpec<S>, IoError> {
    let doc: WorkloadDoc = read_doc(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut mix = Vec::with_capacity(doc.mix.len());
    for entry in doc.mix {
        let dag_path = base.join(&entry.dag);
        let dag = load_dag(&dag_path, platform)?;
        mix.push(MixEntry {
            dag,
            probability: entry.probability,
        });
    }
    let spec = WorkloadSpec {
        mix,
        target_frame_rate: S::from_config(doc.target_frame_rate),
        duration: S::from_config(doc.duration),
        arrival_distribution: doc.arrival_distribution,
        seed: doc.seed,
    };
    spec.validate(platform).map_err(|source| IoError::Invalid {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(spec)
}

/// Serialize a DAG back into its document form (used by fixture generation
/// and round-trip tests).
pub fn dag_to_json<S: Scalar>(dag: &AppDag<S>) -> String {
    let doc = DagDoc {
        app_name: dag.app_name.clone(),
        tasks: dag
            .tasks
            .iter()
            .map(|t| TaskDoc {
                id: t.id,
                name: t.name.clone(),
                exec_time: t
                    .exec_time
                    .iter()
                    .map(|w| w.map(Scalar::to_config))
                    .collect(),
                power: t.power.iter().map(|p| p.map(Scalar::to_config)).collect(),
            })
            .collect(),
        edges: dag
            .edges
            .iter()
            .map(|e| EdgeDoc {
                src: e.src,
                dst: e.dst,
                data_volume: e.data_volume.to_config(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("dag document serializes")
}

/// Serialize a platform into its document form.
pub fn platform_to_json<S: Scalar>(platform: &Platform<S>) -> String {
    let doc = PlatformDoc {
        name: platform.name.clone(),
        pes: platform
            .pes
            .iter()
            .map(|p| PeDoc {
                id: p.id,
                name: p.name.clone(),
                kind: p.kind,
                idle_power: p.idle_power.to_config(),
            })
            .collect(),
        link_bandwidth: platform
            .link_bandwidth
            .iter()
            .map(|row| row.iter().map(|v| v.to_config()).collect())
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("platform document serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{canonical_dag, unit_platform};

    fn write_tmp(name: &str, contents: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!("hetsched-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        std::fs::write(&path, contents).unwrap();
        path
    }

    #[test]
    fn platform_roundtrip() {
        let p: Platform<f64> = unit_platform(3);
        let path = write_tmp("p3.json", &platform_to_json(&p));
        let loaded: Platform<f64> = load_platform(&path).unwrap();
        assert_eq!(loaded.num_pes(), 3);
        assert_eq!(loaded.link_bandwidth[0][1], 1.0);
    }

    #[test]
    fn single_pe_platform() {
        let text =
            r#"{"name":"one","pes":[{"id":0,"name":"P0","kind":"cpu"}],"link_bandwidth":[[0]]}"#;
        let path = write_tmp("p1.json", text);
        let loaded: Platform<f64> = load_platform(&path).unwrap();
        assert_eq!(loaded.num_pes(), 1);
        // idle_power defaults to zero when absent.
        assert_eq!(loaded.pes[0].idle_power, 0.0);
    }

    #[test]
    fn asymmetric_bandwidth_is_a_validation_error() {
        let text = r#"{"name":"bad","pes":[{"id":0,"name":"a","kind":"cpu"},{"id":1,"name":"b","kind":"cpu"}],
                       "link_bandwidth":[[0,2],[3,0]]}"#;
        let path = write_tmp("bad.json", text);
        let err = load_platform::<f64>(&path).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("symmetric"), "{msg}");
    }

    #[test]
    fn malformed_platform_is_a_parse_error() {
        let path = write_tmp("nojson.json", "{ not json");
        let err = load_platform::<f64>(&path).unwrap_err();
        assert!(matches!(err, IoError::Parse { .. }));
    }

    #[test]
    fn dag_roundtrip_with_null_support() {
        let platform: Platform<f64> = unit_platform(3);
        let mut dag = canonical_dag::<f64>();
        dag.tasks[2].exec_time[1] = None;
        dag.tasks[2].power[1] = None;
        let path = write_tmp("dag.json", &dag_to_json(&dag));
        let loaded: AppDag<f64> = load_dag(&path, &platform).unwrap();
        assert!(loaded.tasks[2].exec_time[1].is_none());
        assert_eq!(loaded.edges.len(), 15);
    }

    #[test]
    fn workload_resolves_dag_paths() {
        let platform: Platform<f64> = unit_platform(3);
        let dag_path = write_tmp("canon.json", &dag_to_json(&canonical_dag::<f64>()));
        let wl = format!(
            r#"{{"mix":[{{"dag":"{}","probability":1.0}}],"target_frame_rate":0.05,"duration":100,"seed":7}}"#,
            dag_path.file_name().unwrap().to_str().unwrap()
        );
        let wl_path = write_tmp("wl.json", &wl);
        let spec: WorkloadSpec<f64> = load_workload(&wl_path, &platform).unwrap();
        assert_eq!(spec.mix.len(), 1);
        assert_eq!(spec.seed, 7);
        assert_eq!(spec.arrival_distribution, ArrivalDistribution::Exponential);
    }
}

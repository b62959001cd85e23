//! Seeded synthetic application profiles.
//!
//! Stands in for board-measured cost tables: layered random DAGs with a single
//! source and sink, per-PE execution times spread by a heterogeneity factor,
//! and cheaper-but-restricted accelerator support on the upper PE indices.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::model::{AppDag, Edge, TaskId, TaskNode};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("n_tasks must be >= 2, got {0}")]
    TooFewTasks(usize),
    #[error("n_pes must be >= 1, got {0}")]
    NoPes(usize),
    #[error("width must be >= 1, got {0}")]
    ZeroWidth(usize),
    #[error("heterogeneity must be >= 0 and finite, got {0}")]
    BadHeterogeneity(f64),
}

/// Generate a random layered DAG with `n_tasks` tasks and layer width at most
/// `width`. Execution times are drawn from a per-task base cost spread across
/// PEs by `heterogeneity` (0 = identical on every supported PE). The first
/// half of the PEs behave like CPUs and support everything; the remainder act
/// as accelerators that support roughly a third of the tasks at a faster,
/// lower-power operating point. Deterministic for a fixed seed.
pub fn synth_profile<S: Scalar>(
    n_tasks: usize,
    width: usize,
    n_pes: usize,
    heterogeneity: f64,
    seed: u64,
) -> Result<AppDag<S>, SynthError> {
    if n_tasks < 2 {
        return Err(SynthError::TooFewTasks(n_tasks));
    }
    if n_pes < 1 {
        return Err(SynthError::NoPes(n_pes));
    }
    if width < 1 {
        return Err(SynthError::ZeroWidth(width));
    }
    if !heterogeneity.is_finite() || heterogeneity < 0.0 {
        return Err(SynthError::BadHeterogeneity(heterogeneity));
    }

    let mut rng = StdRng::seed_from_u64(seed);

    // Layer sizes: single entry, single exit, random widths in between.
    let mut layers: Vec<usize> = vec![1];
    let mut remaining = n_tasks - 2;
    while remaining > 0 {
        let take = rng.gen_range(1..=width.min(remaining));
        layers.push(take);
        remaining -= take;
    }
    layers.push(1);

    // Assign task ids layer by layer.
    let mut layer_tasks: Vec<Vec<TaskId>> = Vec::with_capacity(layers.len());
    let mut next_id: TaskId = 0;
    for size in &layers {
        let ids = (next_id..next_id + *size as TaskId).collect();
        next_id += *size as TaskId;
        layer_tasks.push(ids);
    }

    // Edges: each non-entry task gets at least one parent in the previous
    // layer, plus sparse extra edges from any earlier layer.
    let mut edges: Vec<Edge<S>> = Vec::new();
    let volume = |rng: &mut StdRng| S::from_config(rng.gen_range(1.0..15.0));
    for li in 1..layer_tasks.len() {
        let prev = layer_tasks[li - 1].clone();
        for &dst in &layer_tasks[li].clone() {
            let src = prev[rng.gen_range(0..prev.len())];
            edges.push(Edge {
                src,
                dst,
                data_volume: volume(&mut rng),
            });
            for earlier in &layer_tasks[..li] {
                for &cand in earlier {
                    if cand != src && rng.gen_bool(0.15) {
                        edges.push(Edge {
                            src: cand,
                            dst,
                            data_volume: volume(&mut rng),
                        });
                    }
                }
            }
        }
    }
    // Funnel childless interior tasks into the exit so the sink is unique.
    let exit = *layer_tasks.last().unwrap().first().unwrap();
    let mut has_child = vec![false; n_tasks];
    for e in &edges {
        has_child[e.src as usize] = true;
    }
    for id in 0..n_tasks as TaskId {
        if id != exit && !has_child[id as usize] {
            edges.push(Edge {
                src: id,
                dst: exit,
                data_volume: volume(&mut rng),
            });
        }
    }
    edges.sort_by_key(|e| (e.src, e.dst));
    edges.dedup_by_key(|e| (e.src, e.dst));

    // Cost tables. CPUs support everything; accelerators are sparse but fast.
    let cpu_count = (n_pes / 2).max(1);
    let mut tasks = Vec::with_capacity(n_tasks);
    for id in 0..n_tasks as TaskId {
        let base = rng.gen_range(5.0..25.0);
        let mut exec_time = Vec::with_capacity(n_pes);
        let mut power = Vec::with_capacity(n_pes);
        for pe in 0..n_pes {
            let is_cpu = pe < cpu_count;
            // Draw in a fixed order so support decisions do not shift costs.
            let spread: f64 = rng.gen_range(-0.5..0.5);
            let p_cpu: f64 = rng.gen_range(0.8..2.5);
            let p_acc: f64 = rng.gen_range(0.2..0.8);
            let supported = is_cpu || rng.gen_bool(1.0 / 3.0);
            if supported {
                let w = (base * (1.0 + heterogeneity * spread)).max(0.1);
                exec_time.push(Some(S::from_config(w)));
                power.push(Some(S::from_config(if is_cpu { p_cpu } else { p_acc })));
            } else {
                exec_time.push(None);
                power.push(None);
            }
        }
        tasks.push(TaskNode {
            id,
            name: format!("n{id}"),
            exec_time,
            power,
        });
    }

    Ok(AppDag {
        app_name: format!("synth-{seed}"),
        tasks,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::unit_platform;

    #[test]
    fn deterministic_per_seed() {
        let a = synth_profile::<f64>(12, 3, 4, 0.5, 99).unwrap();
        let b = synth_profile::<f64>(12, 3, 4, 0.5, 99).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
        let c = synth_profile::<f64>(12, 3, 4, 0.5, 100).unwrap();
        assert_ne!(format!("{a:?}"), format!("{c:?}"));
    }

    #[test]
    fn zero_heterogeneity_is_uniform() {
        let dag = synth_profile::<f64>(10, 3, 2, 0.0, 7).unwrap();
        for t in &dag.tasks {
            let supported: Vec<f64> = t.exec_time.iter().flatten().copied().collect();
            for w in &supported {
                assert_eq!(*w, supported[0]);
            }
        }
    }

    #[test]
    fn generated_dag_is_valid() {
        for seed in 0..5 {
            let dag = synth_profile::<f64>(10, 3, 3, 0.6, seed).unwrap();
            assert_eq!(dag.tasks.len(), 10);
            dag.validate(&unit_platform(3)).unwrap();
            assert!(dag.topo_order().is_ok());
        }
    }

    #[test]
    fn parameter_range_errors() {
        assert!(synth_profile::<f64>(1, 3, 3, 0.5, 1).is_err());
        assert!(synth_profile::<f64>(5, 0, 3, 0.5, 1).is_err());
        assert!(synth_profile::<f64>(5, 3, 0, 0.5, 1).is_err());
        assert!(synth_profile::<f64>(5, 3, 3, -1.0, 1).is_err());
    }
}

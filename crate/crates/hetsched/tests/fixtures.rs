//! The shipped data files must stay in sync with the built-in definitions.

use std::path::{Path, PathBuf};

use hetsched::io::{load_dag, load_platform, load_workload};
use hetsched::model::{canonical_dag, unit_platform};
use hetsched::Std;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

#[test]
fn canonical_fixture_matches_builtin() {
    let platform = load_platform::<Std>(&data("unit_platform3.json")).unwrap();
    assert_eq!(platform.num_pes(), 3);
    assert_eq!(platform.link_bandwidth[0][1], 1.0);

    let loaded = load_dag::<Std>(&data("canonical_dag.json"), &platform).unwrap();
    let builtin = canonical_dag::<Std>();
    assert_eq!(loaded.tasks.len(), builtin.tasks.len());
    assert_eq!(loaded.edges.len(), builtin.edges.len());
    for (a, b) in loaded.tasks.iter().zip(&builtin.tasks) {
        assert_eq!(a.id, b.id);
        assert_eq!(a.exec_time, b.exec_time);
        assert_eq!(a.power, b.power);
    }
    for (a, b) in loaded.edges.iter().zip(&builtin.edges) {
        assert_eq!((a.src, a.dst), (b.src, b.dst));
        assert_eq!(a.data_volume, b.data_volume);
    }
}

#[test]
fn remaining_fixtures_load_and_validate() {
    let unit = unit_platform::<Std>(3);
    let wl = load_workload::<Std>(&data("workload_canonical.json"), &unit).unwrap();
    assert_eq!(wl.seed, 42);

    let zcu = load_platform::<Std>(&data("zcu102_like_platform.json")).unwrap();
    assert_eq!(zcu.num_pes(), 10);
    let synth = load_dag::<Std>(&data("synth_app.json"), &zcu).unwrap();
    assert_eq!(synth.tasks.len(), 12);
    let wl = load_workload::<Std>(&data("workload_synth.json"), &zcu).unwrap();
    assert_eq!(wl.mix.len(), 1);
}

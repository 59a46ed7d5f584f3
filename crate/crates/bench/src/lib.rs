//! Shared fixtures for the criterion benchmarks.

use tqd_core::db;
use tqd_core::modular::{simple_objects, ModularData, Strategy};
use tqd_core::{Cocycle3, FiniteGroup, Objects};

pub fn group(spec: &str) -> FiniteGroup {
    db::load_group(spec, true).expect("catalog group")
}

/// The orbit representative at `index` for `spec`.
pub fn cocycle(spec: &str, index: usize) -> (Cocycle3, Vec<u64>) {
    let (_, orbits) = db::group_orbits(&group(spec), true).expect("orbits");
    let o = &orbits[index];
    (o.cocycle.clone(), o.representative.clone())
}

pub fn objects(spec: &str, index: usize) -> Objects {
    simple_objects(&cocycle(spec, index).0).expect("simple objects")
}

pub fn dataset(spec: &str, index: usize) -> ModularData {
    let (omega, v) = cocycle(spec, index);
    ModularData::compute(&omega, v, Strategy::Auto, 0).expect("modular data")
}

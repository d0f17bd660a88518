//! The embedded sign tables are the only ones reproducing the fixtures.

use std::path::PathBuf;

use pv_core::calibration::Calibration;
use pv_core::chevalley::{sign_assignments, system_key, ChevalleyRep};
use pv_core::construct::Pipeline;
use pv_core::fixture::{run_checks, Fixture};
use pv_core::rootsys::{RootSystem, RootType};

fn matching_tables(kind: RootType, rank: usize, fixture: &str) -> Vec<std::collections::BTreeMap<String, i64>> {
    let rs = RootSystem::build(kind, rank).unwrap();
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(fixture);
    let fx = Fixture::from_path(&path).unwrap();
    let base = Calibration::embedded().system(&system_key(&rs)).cloned().unwrap_or_default();
    let mut hits = Vec::new();
    for signs in sign_assignments(&rs) {
        let mut sys = base.clone();
        sys.signs = signs.clone();
        // some tables break the Chevalley relations or a structural lemma
        let Ok(rep) = ChevalleyRep::build_from(&rs, &sys) else { continue };
        let Ok(pl) = Pipeline::run(&rep) else { continue };
        if run_checks(&rep, &pl, &fx).unwrap().iter().all(|o| o.ok) {
            hits.push(signs);
        }
    }
    hits
}

#[test]
fn g2_signs_are_unique() {
    let hits = matching_tables(RootType::G2, 2, "g2.json");
    assert_eq!(hits.len(), 1, "{hits:?}");
    let embedded = Calibration::embedded();
    assert_eq!(hits[0], embedded.system("G2").unwrap().signs);
}

#[test]
fn a3_signs_are_unique() {
    let hits = matching_tables(RootType::A, 3, "sl4.json");
    assert_eq!(hits.len(), 1, "{hits:?}");
    assert_eq!(hits[0], Calibration::embedded().system("A3").unwrap().signs);
}

//! Round trips and reduct lists for the bundled fixture files.

use std::fs;
use std::path::PathBuf;

use relfam::io::{load_system, parse_covering, parse_document, serialize_document, serialize_system};
use relfam::{add_covering, batch_reducts, delete_covering, oracle_reducts, related_sets};

fn fixture(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn lines(reducts: &relfam::ReductSet, names: &[String]) -> Vec<String> {
    reducts.lines(names)
}

#[test]
fn fixtures_are_canonical() {
    for f in ["consistent8.cds.json", "inconsistent8.cds.json"] {
        let text = fixture(f);
        assert_eq!(serialize_document(&parse_document(&text).unwrap()), text, "{f}");
        let sys = load_system(&text).unwrap();
        let stripped = serialize_system(&sys);
        assert_eq!(load_system(&stripped).unwrap().fingerprint(), sys.fingerprint());
    }
}

#[test]
fn consistent_fixture_reducts() {
    let sys = load_system(&fixture("consistent8.cds.json")).unwrap();
    let cache = batch_reducts(&sys).unwrap();
    assert_eq!(
        lines(&cache.reducts, &sys.names()),
        ["C1,C2", "C1,C4", "C2,C3", "C2,C5", "C3,C4", "C4,C5"]
    );

    let c6 = parse_covering(&fixture("consistent8_add_c6.covering.json"), 8).unwrap();
    let added = add_covering(&sys, &cache, c6).unwrap();
    assert_eq!(
        lines(added.reducts(), &added.system.names()),
        ["C1,C2", "C1,C4", "C1,C6", "C2,C3", "C2,C5", "C3,C4", "C4,C5", "C5,C6"]
    );

    let deleted = delete_covering(&sys, &cache, "C5").unwrap();
    assert_eq!(
        lines(deleted.reducts(), &deleted.system.names()),
        ["C1,C2", "C1,C4", "C2,C3", "C3,C4"]
    );
    assert_eq!(deleted.reducts(), &oracle_reducts(&deleted.system).unwrap());
}

#[test]
fn inconsistent_fixture_reducts() {
    let sys = load_system(&fixture("inconsistent8.cds.json")).unwrap();
    let cache = batch_reducts(&sys).unwrap();
    assert!(!cache.consistency.is_consistent());
    assert_eq!(lines(&cache.reducts, &sys.names()), ["C1,C2", "C1,C3"]);
    let r = related_sets(&sys);
    assert!(r.r[1].is_empty() && r.r[2].is_empty());

    let c5 = parse_covering(&fixture("inconsistent8_add_c5.covering.json"), 8).unwrap();
    let added = add_covering(&sys, &cache, c5).unwrap();
    assert_eq!(lines(added.reducts(), &added.system.names()), ["C1,C2", "C1,C3"]);
    let r = related_sets(&added.system);
    assert!(r.r[1].is_empty() && r.r[2].is_empty());

    let deleted = delete_covering(&sys, &cache, "C4").unwrap();
    assert_eq!(lines(deleted.reducts(), &deleted.system.names()), ["C1,C2", "C1,C3"]);
}

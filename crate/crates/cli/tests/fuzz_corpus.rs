//! Replays the checked-in fuzz seeds through the same parsers as the fuzz
//! targets.

use std::path::PathBuf;

use invobs_cli::Config;
use invobs_core::simulation::TrajectoryRecord;

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    assert!(!files.is_empty());
    files
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect()
}

#[test]
fn config_seeds_parse_and_resolve() {
    for (path, text) in seeds("config_parse") {
        let config = Config::parse(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        config
            .sim_config()
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

#[test]
fn trajectory_seeds_round_trip() {
    for (path, text) in seeds("trajectory_csv") {
        let record =
            TrajectoryRecord::from_csv(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(
            TrajectoryRecord::from_csv(&record.to_csv()).unwrap(),
            record
        );
    }
}

//! Replays the checked-in fuzz corpora through the parser entry points.

use std::fs;
use std::path::PathBuf;
use tausum::io::{parse_grid, parse_residual_csv, write_residual_csv, MAX_GRID_LEN};

fn corpus(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut seeds: Vec<_> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, fs::read_to_string(&p).unwrap())
        })
        .collect();
    seeds.sort();
    assert!(!seeds.is_empty(), "empty corpus for {target}");
    seeds
}

#[test]
fn grid_seeds() {
    for (name, s) in corpus("parse_grid") {
        match parse_grid(&s) {
            Ok(xs) => assert!(xs.len() <= MAX_GRID_LEN, "{name}"),
            Err(e) => assert!(e.is_user_error(), "{name}: {e}"),
        }
    }
    assert_eq!(parse_grid("2^16..2^24").unwrap().len(), 9);
    assert!(parse_grid("2^64").is_err());
}

#[test]
fn residual_csv_seeds() {
    let mut parsed = 0;
    for (name, s) in corpus("parse_residual_csv") {
        let Ok(rows) = parse_residual_csv(&s) else {
            continue;
        };
        let mut out = Vec::new();
        write_residual_csv(&mut out, &rows).unwrap();
        let again = parse_residual_csv(std::str::from_utf8(&out).unwrap()).unwrap();
        assert_eq!(rows, again, "{name}");
        parsed += 1;
    }
    assert!(parsed >= 2);
}

#[test]
fn option_seeds() {
    for (name, s) in corpus("parse_options") {
        let hits = [
            s.parse::<tausum::TsumMethod>().is_ok(),
            s.parse::<tausum::TailMode>().is_ok(),
            s.parse::<tausum::expsum::BoundKind>().is_ok(),
            s.parse::<tausum::diophantine::CountMethod>().is_ok(),
            s.parse::<tausum::diophantine::Counter>().is_ok(),
        ];
        assert!(hits.iter().any(|&h| h), "{name} parses as no option");
    }
}

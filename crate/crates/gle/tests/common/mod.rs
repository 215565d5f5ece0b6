//! Helpers shared by the integration test targets.
#![allow(dead_code)]

use std::path::PathBuf;

/// Path of a canned experiment file under the workspace `configs/` directory.
pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

/// Parses a CSV produced by the report module into a header and float rows.
pub fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header: Vec<String> =
        lines.next().expect("csv has a header").split(',').map(str::to_string).collect();
    let rows = lines
        .map(|line| {
            line.split(',')
                .map(|cell| cell.parse::<f64>().unwrap_or_else(|_| panic!("bad cell {cell}")))
                .collect()
        })
        .collect();
    (header, rows)
}

/// Column index by name.
pub fn column(header: &[String], name: &str) -> usize {
    header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"))
}

//! Frozen CSV output. Regenerate with `UPDATE_GOLDEN=1 cargo test --test golden`.

use std::path::PathBuf;

use aoi_coding::experiments::report::ANALYZE_COLUMNS;
use aoi_coding::experiments::reproduce::TABLE1_COLUMNS;
use aoi_coding::experiments::simulate::SIM_COLUMNS;
use aoi_coding::experiments::{analyze, reproduce, Target};
use aoi_coding::ScenarioParams;

fn check(name: &str, actual: &str) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert_eq!(actual, expected, "{name} differs from the golden file");
}

#[test]
fn column_orders() {
    let schema = [
        format!("analyze: {}", ANALYZE_COLUMNS.join(",")),
        format!("simulate: {}", SIM_COLUMNS.join(",")),
        format!("table1: {}", TABLE1_COLUMNS.join(",")),
    ]
    .join("\n")
        + "\n";
    check("schema.txt", &schema);
}

#[test]
fn table1_output() {
    check("table1.csv", &reproduce(Target::Table1, None).unwrap().to_csv());
}

#[test]
fn analyze_defaults() {
    check("analyze_defaults.csv", &analyze(&ScenarioParams::default()).unwrap().to_csv());
}

#[test]
fn figure_headers() {
    let headers: String = [Target::Fig3, Target::Fig4, Target::Fig5, Target::Fig6, Target::Fig7]
        .iter()
        .map(|&t| format!("{}: {}\n", t.name(), reproduce(t, None).unwrap().header.join(",")))
        .collect();
    check("figure_headers.txt", &headers);
}

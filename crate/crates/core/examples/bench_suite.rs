//! Run a small benchmark suite and print the improvement table.

use qdist::bench::{run_suite, write_csv, SuiteSpec};

const SUITE: &str = r#"{
    "circuits": ["ghz:10", "ghz:50", "qft:8", "random_layered:8:3"],
    "methods": ["random", "fm", "fm_grouped"],
    "parts": [2, 3],
    "seeds": {"from": 0, "to": 4},
    "baseline_seeds": 200
}"#;

fn main() -> qdist::Result<()> {
    let spec = SuiteSpec::from_json(SUITE)?;
    let report = run_suite(&spec, std::path::Path::new("."), true)?;
    for i in &report.improvements {
        println!(
            "{:<14} k={} {:<10} {:>6.2} ebits  vs random {:>6.2} ({:>5.1}%)  vs plain random {:>6.2} ({:>5.1}%)",
            i.circuit,
            i.k,
            i.method.name(),
            i.ebits,
            i.random_same_graph,
            i.improvement_same_graph_pct.unwrap_or(f64::NAN),
            i.random_plain,
            i.improvement_vs_plain_pct.unwrap_or(f64::NAN),
        );
    }
    let path = std::env::temp_dir().join("qdist-bench.csv");
    write_csv(&report.rows, std::fs::File::create(&path)?)?;
    println!("{} rows in {}", report.rows.len(), path.display());
    Ok(())
}

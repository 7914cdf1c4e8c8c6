//! Parameter sweeps over `G(n, m, p)`, summary reports and the self-check.

mod bounds;
mod report;
mod sweep;
mod verify;

pub use bounds::{omega, regime_bound, thm3_shape, DELTA_THM4, TRUNCATION_A};
pub use report::{render_svg, report, write_summary_csv, GroupSummary, Table};
pub use sweep::{
    expected_storage, format_sig, run_sweep, write_csv, GridPoint, Regime, SweepConfig, SweepRow, CSV_HEADER,
    DEFAULT_MEMORY_CAP,
};
pub use verify::{verify, CheckOutcome, VerifyOptions};

/// Named grids shipped with the binary.
pub fn preset(name: &str) -> Option<(Regime, Vec<GridPoint>, usize)> {
    let pt = |n: usize, m: usize, p: f64| GridPoint { n, m, p };
    let thm2 = || {
        [2.5, 3.5, 4.5]
            .iter()
            .map(|np| pt(300, 3000, np / 300.0))
            .collect::<Vec<_>>()
    };
    let thm3 = || {
        [10_000_000, 40_000_000, 160_000_000]
            .iter()
            .map(|&m| pt(100_000, m, 1e-6))
            .collect()
    };
    Some(match name {
        "cor1-strong" => (Regime::Cor1, vec![pt(100_000, 100, 1e-4)], 20),
        "cor1-moderate" => (Regime::Cor1, vec![pt(10_000, 100, 1e-3)], 20),
        "cor1" => (Regime::Cor1, vec![pt(100_000, 100, 1e-4), pt(10_000, 100, 1e-3)], 20),
        "thm2" => (Regime::Thm2, thm2(), 20),
        "thm3" => (Regime::Thm3, thm3(), 10),
        "thm4" => (Regime::Thm4, vec![pt(10_000, 2_000_000, 1e-5)], 30),
        _ => return None,
    })
}

pub const PRESETS: &[&str] = &["cor1", "cor1-strong", "cor1-moderate", "thm2", "thm3", "thm4"];

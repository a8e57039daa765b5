//! How the diversion gains move with travel time and childbirth load.
//!
//! Two one-parameter sweeps under the elapsed-time policy: first the
//! one-way travel time (at zero, diversion is free and pure queue-balancing;
//! long legs price most diversions out), then PHC 1's childbirth
//! interarrival time, which loads the quieter facility up toward the busier
//! one. Each swept point re-runs the full replication set; the summary rows
//! land in summary.csv alongside the printed lines.
//!
//!     cargo run --release --example sensitivity_sweep

use phc_divert::diversion::Mode;
use phc_divert::experiment::{
    sensitivity_sweep, PolicyChoice, ScenarioConfig, SweepParam, SweepSpec,
};

fn main() {
    let mut cfg = ScenarioConfig::default();
    cfg.policy = PolicyChoice::One(Mode::Est);
    cfg.warmup_days = 90.0;
    cfg.horizon_days = 365.0;
    cfg.replications = 5;

    for (param, values, unit) in [
        (SweepParam::TravelTime, vec![0.0, 30.0, 60.0, 120.0, 240.0], "min"),
        (SweepParam::IaChildbirth, vec![2880.0, 1440.0, 960.0, 720.0], "min"),
    ] {
        cfg.out_dir = std::env::temp_dir().join(format!("phc-divert-sweep-{param}"));
        let sweep = SweepSpec {
            param,
            values: values.clone(),
        };
        let out = sensitivity_sweep(&cfg, &sweep).expect("sweep runs");
        println!("sweep over {param}:");
        for row in &out.rows {
            let (_, v) = row.sweep.expect("swept rows only");
            let alpha = row.report.alpha.expect("childbirth served");
            println!(
                "  {param} {v:>6} {unit}: alpha {:.3} +/- {:.3}, diverted/rep {:>6.1}, labour imbalance {:>6.2}%",
                alpha.mean,
                alpha.half_width.unwrap_or(0.0),
                row.report.diverted.mean,
                row.report.delta_rho_lb,
            );
        }
        println!("  rows also in {}\n", out.out_dir.join("summary.csv").display());
    }
}

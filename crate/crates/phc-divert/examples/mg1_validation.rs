//! The labour room against the single-server queue formula.
//!
//! With assessments zeroed and inpatient beds unlimited, each facility's
//! labour room is a plain M/G/1 queue, so the simulated mean wait has an
//! exact analytic target: lambda E[S^2] / (2 (1 - rho)). This runs a span
//! of offered loads and prints simulated against analytic.
//!
//!     cargo run --release --example mg1_validation

use phc_divert::diversion::Mode;
use phc_divert::experiment::reduce_trace;
use phc_divert::model::{run_scenario, SimParams};
use rayon::prelude::*;

fn main() {
    let service_mean = 480.0;
    let second_moment = 235_200.0;
    println!(
        "{:>6}{:>14}{:>12}{:>12}{:>9}",
        "rho", "interarrival", "simulated", "analytic", "error"
    );
    for rho in [0.25, 1.0 / 3.0, 0.5, 2.0 / 3.0, 0.8] {
        let ia = service_mean / rho;
        let lambda = 1.0 / ia;
        let analytic = lambda * second_moment / (2.0 * (1.0 - rho));
        // Ten seeded replications, two measured years each after a one-year
        // warm-up; single-run estimates of a heavy-traffic mean are noisy.
        let waits: Vec<f64> = (0..10u64)
            .into_par_iter()
            .map(|rep| {
                let mut p = SimParams::new(Mode::None);
                for f in &mut p.phc {
                    f.isolate_labour_room();
                    f.ia_childbirth = Some(ia);
                }
                p.warmup_minutes = 365.0 * 1440.0;
                p.horizon_minutes = 730.0 * 1440.0;
                p.replication = rep;
                let trace = run_scenario(p).expect("isolated parameters are valid");
                reduce_trace(&trace, 120.0).mean_wait_by_facility[0]
                    .expect("childbirth arrivals enabled")
            })
            .collect();
        let mean = waits.iter().sum::<f64>() / waits.len() as f64;
        println!(
            "{rho:>6.3}{ia:>14.1}{mean:>12.2}{analytic:>12.2}{:>8.2}%",
            100.0 * (mean - analytic) / analytic
        );
    }
}

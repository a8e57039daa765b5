//! One month inside the two facilities, patient by patient.
//!
//! Runs a short no-diversion month and prints the recorded journey of the
//! first few childbirth patients (arrival, assessment, labour queue, bed,
//! discharge) plus where every other class spends its time, then the
//! resource occupancies the month produced.
//!
//!     cargo run --example patient_flow

use phc_divert::diversion::Mode;
use phc_divert::experiment::reduce_trace;
use phc_divert::model::{run_scenario, PatientClass, SimParams};

fn stamp(v: Option<f64>) -> String {
    v.map_or_else(|| String::from("-"), |t| format!("{t:.0}"))
}

fn main() {
    let mut p = SimParams::new(Mode::None);
    p.warmup_minutes = 0.0;
    p.horizon_minutes = 30.0 * 1440.0;
    let trace = run_scenario(p).expect("default parameters are valid");

    println!("childbirth journeys (all times in minutes from the start):");
    println!(
        "{:>5} {:>4} {:>8} {:>9} {:>8} {:>8} {:>8} {:>7} {:>9} {:>9}",
        "id", "phc", "arrived", "assessed", "queued", "bed", "exit", "wait", "est", "actual"
    );
    for pt in trace
        .patients
        .iter()
        .filter(|p| p.class == PatientClass::Childbirth)
        .take(8)
    {
        println!(
            "{:>5} {:>4} {:>8.0} {:>9} {:>8} {:>8} {:>8} {:>7} {:>9} {:>9}",
            pt.id,
            pt.origin + 1,
            pt.created_at,
            stamp(pt.decision_at),
            stamp(pt.labour_queue_join_at),
            stamp(pt.labour_admit_at),
            stamp(pt.exit_at),
            stamp(pt.realized_wait_excl_travel()),
            stamp(pt.pred_est),
            stamp(pt.pred_actual),
        );
    }

    println!("\na sample of the other classes:");
    for class in [
        PatientClass::OutpatientUnder30,
        PatientClass::Outpatient30Plus,
        PatientClass::Inpatient,
    ] {
        let pt = trace
            .patients
            .iter()
            .find(|p| p.class == class && p.exit_at.is_some())
            .expect("a month produces every class");
        println!(
            "  {:<20} phc {}  arrived {:>6.0}  doctor {:>8}  nurse {:>8}  exit {:>6}",
            pt.class.name(),
            pt.origin + 1,
            pt.created_at,
            stamp(pt.first_doctor_at),
            stamp(pt.first_nurse_at),
            stamp(pt.exit_at),
        );
    }

    let r = reduce_trace(&trace, 120.0);
    println!("\nmonth totals: {} patients created, {} exited", trace.patients.len(), {
        trace.patients.iter().filter(|p| p.exit_at.is_some()).count()
    });
    for f in 0..2 {
        println!(
            "  phc {}: doctor occupancy (opd hours) {:.3}, staff nurse {:.3}, labour bed {:.3}, inpatient beds {:.3}",
            f + 1,
            r.doctor_occ[f],
            r.staff_nurse_occ[f],
            r.labour_occ[f],
            r.ipd_occ[f].unwrap_or(f64::NAN),
        );
    }
}

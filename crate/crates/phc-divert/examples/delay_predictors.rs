//! What each delay predictor says about the same labour room.
//!
//! Builds a handful of room states by hand and prints the predicted queue
//! wait under every rule, then rolls one state forward across a travel leg
//! to show what the dispatcher actually compares.
//!
//!     cargo run --example delay_predictors

use phc_divert::dist::ServiceDistribution;
use phc_divert::model::LabourRoomState;
use phc_divert::predictors::{
    actual_delay, est_delay, project_state, residual_mean, rst_state_delay, rst_steady_delay,
};

/// A room `elapsed` minutes into a delivery that will take `total` in all.
/// The clairvoyant rule reads the realized completion; the others only see
/// `elapsed` and the queue.
fn busy(snapshot_at: f64, elapsed: f64, total: f64, queued: &[f64]) -> LabourRoomState {
    LabourRoomState {
        snapshot_at,
        busy: true,
        elapsed_service: elapsed,
        queue_len: queued.len(),
        in_service_completion_at: Some(snapshot_at + (total - elapsed)),
        queued_service_durations: queued.to_vec(),
    }
}

fn main() {
    let d = ServiceDistribution::Uniform {
        min: 360.0,
        max: 600.0,
    };
    println!(
        "labour service uniform(360,600): mean {}, residual mean {}, scv {:.5}\n",
        d.mean(),
        residual_mean(&d),
        d.scv()
    );

    let states = [
        ("idle room", LabourRoomState::idle(0.0)),
        ("fresh delivery, empty queue", busy(0.0, 30.0, 520.0, &[])),
        ("mid-delivery, empty queue", busy(0.0, 480.0, 520.0, &[])),
        ("near the support max", busy(0.0, 550.0, 560.0, &[])),
        (
            "mid-delivery, two queued",
            busy(0.0, 240.0, 520.0, &[450.0, 580.0]),
        ),
    ];

    println!(
        "{:<30}{:>10}{:>10}{:>10}{:>10}",
        "state", "rst", "est", "actual", "steady"
    );
    for (label, s) in &states {
        let steady = rst_steady_delay(2.0 / 3.0, &d).unwrap();
        println!(
            "{label:<30}{:>10.1}{:>10.1}{:>10.1}{:>10.1}",
            rst_state_delay(s, &d),
            est_delay(s, &d).unwrap(),
            actual_delay(s),
            steady,
        );
    }

    // The dispatcher never uses a remote state as-is: the patient needs
    // travel_time minutes to get there, so the state is first rolled
    // forward by that long.
    let remote = busy(0.0, 240.0, 520.0, &[450.0]);
    println!("\nremote room seen at t=0, rolled forward across a 60-minute travel:");
    for (label, s) in [("at issue", remote.clone()), ("on arrival", project_state(&remote, 60.0, &d))] {
        println!(
            "  {label:<12} elapsed {:>5.1}  queue {}  est {:>6.1}  actual {:>6.1}",
            s.elapsed_service,
            s.queue_len,
            est_delay(&s, &d).unwrap(),
            actual_delay(&s),
        );
    }
}

//! Centralized routing of childbirth arrivals between the two facilities.
//!
//! At the moment a childbirth patient finishes her admission assessment, the
//! coordinator predicts the labour-room delay at the home facility and at
//! the other facility as of her expected arrival there, and diverts her only
//! when the remote prediction plus the travel time is strictly smaller.
//! The decision happens exactly once per patient and is never revisited en
//! route.

use serde::{Deserialize, Serialize};

use crate::dist::ServiceDistribution;
use crate::model::snapshot::LabourRoomState;
use crate::predictors::{project_state, PredictError, Predictor};

/// Routing policy for one scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// No coordination: every patient stays at her origin facility.
    None,
    /// Divert on the clairvoyant oracle delay.
    Actual,
    /// Divert on the residual-service predictor from observed state.
    RstState,
    /// Divert on the steady-state closed form (a per-facility constant).
    RstSteady,
    /// Divert on the refined elapsed-time predictor.
    Est,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::None,
        Mode::Actual,
        Mode::RstState,
        Mode::RstSteady,
        Mode::Est,
    ];

    /// Snake_case label used in file names and report columns.
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            Mode::None => "none",
            Mode::Actual => "actual",
            Mode::RstState => "rst_state",
            Mode::RstSteady => "rst_steady",
            Mode::Est => "est",
        }
    }

    /// The predictor this mode runs on; `None` for the uncoordinated base
    /// case.
    #[must_use]
    pub fn predictor(self) -> Option<Predictor> {
        match self {
            Mode::None => None,
            Mode::Actual => Some(Predictor::Actual),
            Mode::RstState => Some(Predictor::RstState),
            Mode::RstSteady => Some(Predictor::RstSteady),
            Mode::Est => Some(Predictor::Est),
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    /// Accepts both hyphenated (CLI style) and underscored names.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "none" => Ok(Mode::None),
            "actual" => Ok(Mode::Actual),
            "rst_state" => Ok(Mode::RstState),
            "rst_steady" => Ok(Mode::RstSteady),
            "est" => Ok(Mode::Est),
            other => Err(format!(
                "unknown policy '{other}' (expected none, actual, rst-state, rst-steady or est)"
            )),
        }
    }
}

/// Scenario-level diversion parameters, fixed for a whole run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiversionPolicy {
    pub mode: Mode,
    /// One-way travel time between the facilities, minutes.
    pub travel_time: f64,
    /// Optional guard: divert only when the home prediction exceeds this
    /// many minutes. Off by default; the base rule has no such gate.
    pub min_home_wait_gate: Option<f64>,
}

impl DiversionPolicy {
    #[must_use]
    pub fn new(mode: Mode, travel_time: f64) -> Self {
        assert!(
            travel_time.is_finite() && travel_time >= 0.0,
            "travel time must be finite and non-negative"
        );
        DiversionPolicy {
            mode,
            travel_time,
            min_home_wait_gate: None,
        }
    }
}

/// One facility's inputs to a routing decision.
#[derive(Debug, Clone, Copy)]
pub struct FacilityView<'a> {
    pub state: &'a LabourRoomState,
    /// Configured offered load, consumed only by the steady-state predictor.
    pub rho: f64,
}

/// The routing outcome for one childbirth patient.
#[derive(Debug, Clone, PartialEq)]
pub struct DiversionDecision {
    pub patient_id: u64,
    pub origin: usize,
    pub destination: usize,
    /// Predicted delay at the origin facility.
    pub w_home: f64,
    /// Predicted delay at the other facility, projected across travel.
    pub w_remote_projected: f64,
    pub issued_at: f64,
    pub diverted: bool,
}

/// Decides where one childbirth patient goes.
///
/// Diverts iff `w_remote_projected + travel_time < w_home`, strictly: a tie
/// stays home, travel for nothing. The remote state is first rolled forward
/// by the travel time so the prediction speaks to the instant the patient
/// would actually get there.
pub fn decide(
    patient_id: u64,
    issued_at: f64,
    origin: usize,
    home: FacilityView<'_>,
    remote: FacilityView<'_>,
    policy: &DiversionPolicy,
    d: &ServiceDistribution,
) -> Result<DiversionDecision, PredictError> {
    let predictor = policy
        .mode
        .predictor()
        .expect("decide called with diversion disabled");
    let w_home = predictor.predict(home.state, d, home.rho)?;
    let projected = project_state(remote.state, policy.travel_time, d);
    let w_remote_projected = predictor.predict(&projected, d, remote.rho)?;
    let mut diverted = w_remote_projected + policy.travel_time < w_home;
    if let Some(gate) = policy.min_home_wait_gate {
        diverted = diverted && w_home > gate;
    }
    let destination = if diverted { 1 - origin } else { origin };
    Ok(DiversionDecision {
        patient_id,
        origin,
        destination,
        w_home,
        w_remote_projected,
        issued_at,
        diverted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A clairvoyant state whose oracle delay is exactly `w` minutes as of
    /// `now`, with an elapsed time small enough that travel projection
    /// cannot force an assumed completion.
    fn state_with_workload(now: f64, w: f64) -> LabourRoomState {
        if w == 0.0 {
            return LabourRoomState::idle(now);
        }
        let mut s = LabourRoomState::observed(now, 1.0, 0);
        s.in_service_completion_at = Some(now + w);
        s
    }

    fn dist() -> ServiceDistribution {
        ServiceDistribution::Uniform { min: 360.0, max: 600.0 }
    }

    fn decide_oracle(w_home: f64, w_remote_after_travel: f64, travel: f64) -> DiversionDecision {
        let now = 1_000.0;
        let home = state_with_workload(now, w_home);
        // Build the remote so its workload at now+travel is the target.
        let remote = state_with_workload(now, w_remote_after_travel + travel);
        decide(
            7,
            now,
            0,
            FacilityView { state: &home, rho: 1.0 / 3.0 },
            FacilityView { state: &remote, rho: 2.0 / 3.0 },
            &DiversionPolicy::new(Mode::Actual, travel),
            &dist(),
        )
        .unwrap()
    }

    #[test]
    fn rule_arithmetic_worked_cases() {
        // 30 + 60 < 120: divert.
        let d = decide_oracle(120.0, 30.0, 60.0);
        assert!(d.diverted);
        assert_eq!(d.destination, 1);
        assert_eq!(d.w_home, 120.0);
        assert_eq!(d.w_remote_projected, 30.0);

        // 30 + 60 >= 50: stay.
        let d = decide_oracle(50.0, 30.0, 60.0);
        assert!(!d.diverted);
        assert_eq!(d.destination, 0);

        // Exact tie stays home.
        let d = decide_oracle(90.0, 30.0, 60.0);
        assert_eq!(d.w_remote_projected + 60.0, d.w_home);
        assert!(!d.diverted);
    }

    #[test]
    fn idle_home_bed_never_diverts() {
        // w_home = 0 cannot be beaten by a non-negative sum, even with zero
        // travel and an idle remote.
        let d = decide_oracle(0.0, 0.0, 0.0);
        assert!(!d.diverted);
        assert_eq!(d.w_home, 0.0);
    }

    #[test]
    fn home_wait_gate_blocks_small_waits() {
        let now = 0.0;
        let home = state_with_workload(now, 100.0);
        let remote = state_with_workload(now, 0.0);
        let mut policy = DiversionPolicy::new(Mode::Actual, 0.0);
        policy.min_home_wait_gate = Some(120.0);
        let d = decide(
            1,
            now,
            0,
            FacilityView { state: &home, rho: 0.5 },
            FacilityView { state: &remote, rho: 0.5 },
            &policy,
            &dist(),
        )
        .unwrap();
        assert!(!d.diverted, "gate must suppress a 100 < 120 home wait");

        let home = state_with_workload(now, 130.0);
        let d = decide(
            2,
            now,
            0,
            FacilityView { state: &home, rho: 0.5 },
            FacilityView { state: &remote, rho: 0.5 },
            &policy,
            &dist(),
        )
        .unwrap();
        assert!(d.diverted, "gate passes once the home wait exceeds it");
    }

    #[test]
    fn steady_state_mode_uses_each_facilitys_own_load() {
        // The steady-state predictor ignores observed state entirely; with
        // rho_home=2/3 (490 min) and rho_remote=1/3 (122.5 min), travel 60
        // diverts because 182.5 < 490.
        let now = 0.0;
        let home = LabourRoomState::idle(now);
        let remote = LabourRoomState::idle(now);
        let d = decide(
            3,
            now,
            1,
            FacilityView { state: &home, rho: 2.0 / 3.0 },
            FacilityView { state: &remote, rho: 1.0 / 3.0 },
            &DiversionPolicy::new(Mode::RstSteady, 60.0),
            &dist(),
        )
        .unwrap();
        assert!((d.w_home - 490.0).abs() < 1e-9);
        assert!((d.w_remote_projected - 122.5).abs() < 1e-9);
        assert!(d.diverted);
        assert_eq!(d.destination, 0);
    }

    #[test]
    fn mode_names_parse_in_both_spellings() {
        for (text, mode) in [
            ("none", Mode::None),
            ("actual", Mode::Actual),
            ("rst-state", Mode::RstState),
            ("rst_state", Mode::RstState),
            ("rst-steady", Mode::RstSteady),
            ("est", Mode::Est),
        ] {
            assert_eq!(text.parse::<Mode>().unwrap(), mode);
        }
        assert!("fastest".parse::<Mode>().is_err());
        assert_eq!(Mode::RstSteady.to_string(), "rst_steady");
    }
}

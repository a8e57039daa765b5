//! Real-time delay predictors for the labour room, viewed as a single-bed
//! FIFO queue with Poisson arrivals.
//!
//! Four predictors estimate how long a childbirth patient arriving right now
//! would wait for the bed:
//!
//! * [`rst_state_delay`] - textbook residual-service form: queue backlog at
//!   the mean service time, plus the equilibrium mean residual when the bed
//!   is busy.
//! * [`rst_steady_delay`] - the same theory collapsed to its steady-state
//!   closed form; depends only on the configured utilization, not on the
//!   observed state.
//! * [`est_delay`] - the refined state-based estimate: instead of the
//!   equilibrium residual it reconstructs the remaining service from the
//!   observed elapsed time and the service support.
//! * [`actual_delay`] - clairvoyant oracle reading the already-drawn service
//!   durations; exact for FIFO absent future arrivals, and the benchmark the
//!   others are scored against.
//!
//! [`project_state`] rolls a snapshot forward across a travel delay so the
//! remote facility can be judged as of the patient's expected arrival there.

use crate::dist::ServiceDistribution;
use crate::model::snapshot::LabourRoomState;

/// A predictor asked for something it cannot compute.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PredictError {
    #[error("the refined state-based predictor needs a bounded service support, got {dist}")]
    UnboundedSupport { dist: ServiceDistribution },
    #[error("steady-state delay is undefined at utilization {rho} (queue unstable at rho >= 1)")]
    UnstableUtilization { rho: f64 },
}

/// Equilibrium mean residual service time given the server is busy:
/// E[S^2] / (2 E[S]).
#[must_use]
pub fn residual_mean(d: &ServiceDistribution) -> f64 {
    d.second_moment() / (2.0 * d.mean())
}

/// Residual-service predictor from observed state:
/// `L_q * E[S] + (busy ? E[S^2]/(2E[S]) : 0)`.
#[must_use]
pub fn rst_state_delay(s: &LabourRoomState, d: &ServiceDistribution) -> f64 {
    debug_assert!(s.is_consistent());
    let backlog = s.queue_len as f64 * d.mean();
    if s.busy {
        backlog + residual_mean(d)
    } else {
        backlog
    }
}

/// Steady-state form of the residual-service predictor:
/// `((1 + C_B^2)/2) * (rho/(1-rho)) * E[S]`.
///
/// `rho` is the configured offered load (mean service over mean
/// interarrival), not anything observed; the value is one constant per
/// facility. Algebraically this equals the Pollaczek-Khinchine mean wait
/// `lambda E[S^2] / (2(1-rho))`.
pub fn rst_steady_delay(rho: f64, d: &ServiceDistribution) -> Result<f64, PredictError> {
    if !(0.0..1.0).contains(&rho) {
        return Err(PredictError::UnstableUtilization { rho });
    }
    Ok((1.0 + d.scv()) / 2.0 * (rho / (1.0 - rho)) * d.mean())
}

/// Refined state-based predictor:
/// `L_q * E[S] + max(t_avg - t_e, min(t_e - t_avg, t_max - t_e))` when busy,
/// 0 when idle.
///
/// `t_avg` is the support midpoint. The residual term needs a bounded
/// support; `t_e` is clamped to `[0, t_max]` first, since a bed held past
/// service completion can show a larger elapsed time.
pub fn est_delay(s: &LabourRoomState, d: &ServiceDistribution) -> Result<f64, PredictError> {
    debug_assert!(s.is_consistent());
    let (t_min, t_max) = d
        .bounded_support()
        .ok_or(PredictError::UnboundedSupport { dist: *d })?;
    let backlog = s.queue_len as f64 * d.mean();
    if !s.busy {
        return Ok(backlog);
    }
    let t_avg = (t_min + t_max) / 2.0;
    let t_e = s.elapsed_service.clamp(0.0, t_max);
    let residual = (t_avg - t_e).max((t_e - t_avg).min(t_max - t_e));
    Ok(backlog + residual)
}

/// Clairvoyant oracle: the virtual waiting time implied by the entities
/// already present, ignoring future arrivals.
///
/// Computed by folding the scheduled completion instant forward through the
/// queued durations in queue order, exactly as the event cascade will, then
/// subtracting the snapshot instant. Folding absolute times keeps the float
/// operations identical to the simulator's, so under FIFO with no bed
/// holding the prediction equals the realized wait bit for bit.
#[must_use]
pub fn actual_delay(s: &LabourRoomState) -> f64 {
    debug_assert!(s.is_consistent());
    if !s.busy && s.queued_service_durations.is_empty() {
        return 0.0;
    }
    let mut admit_at = s
        .in_service_completion_at
        .expect("oracle predictor needs clairvoyant fields");
    for dur in &s.queued_service_durations {
        admit_at += dur;
    }
    (admit_at - s.snapshot_at).max(0.0)
}

/// Rolls a snapshot forward by `delta` minutes of travel.
///
/// Observable channel: the elapsed time grows by `delta`; if it would pass
/// the support maximum `t_max`, one completion is assumed (the queue head
/// takes the bed, or the room goes idle when no one waits). At most one
/// completion is considered, a safe reading while travel stays below the
/// minimum service time.
///
/// Clairvoyant channel: scheduled completions are absolute instants, so
/// they carry over unchanged; remaining workload shrinks by `delta` simply
/// because the snapshot instant moved. After a forced observable
/// completion, the channels describe different readings of the same room
/// (the observable one an assumption, the clairvoyant one the truth); each
/// predictor reads only its own channel.
#[must_use]
pub fn project_state(s: &LabourRoomState, delta: f64, d: &ServiceDistribution) -> LabourRoomState {
    debug_assert!(delta >= 0.0);
    if delta == 0.0 {
        return s.clone();
    }
    let now = s.snapshot_at + delta;
    if !s.busy {
        let mut out = s.clone();
        out.snapshot_at = now;
        return out;
    }
    let t_max = d.bounded_support().map_or(f64::INFINITY, |(_, hi)| hi);
    let t_e = s.elapsed_service + delta;
    let (busy, elapsed, queue_len) = if t_e < t_max {
        (true, t_e, s.queue_len)
    } else if s.queue_len > 0 {
        (true, (t_e - t_max).clamp(0.0, t_max), s.queue_len - 1)
    } else {
        (false, 0.0, 0)
    };
    LabourRoomState {
        snapshot_at: now,
        busy,
        elapsed_service: elapsed,
        queue_len,
        in_service_completion_at: s.in_service_completion_at,
        queued_service_durations: s.queued_service_durations.clone(),
    }
}

/// Which delay predictor a scenario runs on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Predictor {
    Actual,
    RstState,
    RstSteady,
    Est,
}

impl Predictor {
    pub const ALL: [Predictor; 4] = [
        Predictor::Actual,
        Predictor::RstState,
        Predictor::RstSteady,
        Predictor::Est,
    ];

    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            Predictor::Actual => "actual",
            Predictor::RstState => "rst_state",
            Predictor::RstSteady => "rst_steady",
            Predictor::Est => "est",
        }
    }

    /// Unified dispatch. `rho` is only consulted by the steady-state form.
    pub fn predict(
        self,
        s: &LabourRoomState,
        d: &ServiceDistribution,
        rho: f64,
    ) -> Result<f64, PredictError> {
        match self {
            Predictor::Actual => Ok(actual_delay(s)),
            Predictor::RstState => Ok(rst_state_delay(s, d)),
            Predictor::RstSteady => rst_steady_delay(rho, d),
            Predictor::Est => est_delay(s, d),
        }
    }
}

impl std::fmt::Display for Predictor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// One issued prediction, as logged by the diversion coordinator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DelayPrediction {
    pub predictor: Predictor,
    /// Predicted queue delay in minutes, always >= 0.
    pub value: f64,
    /// Facility the prediction is about.
    pub facility: usize,
    /// Instant the prediction was issued.
    pub issued_at: f64,
}

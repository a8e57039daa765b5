//! Instantaneous labour-room state, the input to every delay predictor.

/// What the labour room looks like at one instant.
///
/// The observable part is what an administrator can see on the spot: whether
/// the bed is busy, how long the current delivery has been running, and how
/// many patients wait. The clairvoyant part reads the simulation's
/// already-drawn service durations; only the oracle predictor may look at
/// it.
///
/// Clairvoyant bookkeeping is kept in absolute time on purpose. The bed's
/// scheduled completion instant and the queued durations reproduce, addition
/// by addition, the arithmetic the event cascade will perform, so an oracle
/// prediction and the realized wait are the same float, not merely close.
#[derive(Debug, Clone, PartialEq)]
pub struct LabourRoomState {
    /// Instant the snapshot was taken, minutes.
    pub snapshot_at: f64,
    /// Whether the bed is occupied.
    pub busy: bool,
    /// Elapsed service time t_e of the delivery on the bed, minutes. Zero
    /// when idle. May exceed the service support's maximum while a finished
    /// patient holds the bed waiting for an inpatient bed; predictors clamp.
    pub elapsed_service: f64,
    /// Queue length L_q, excluding the patient on the bed.
    pub queue_len: usize,
    /// Clairvoyant: absolute instant the in-service delivery completes
    /// (`None` when idle). During a post-service bed hold this is the
    /// snapshot instant itself: service work is already done.
    pub in_service_completion_at: Option<f64>,
    /// Clairvoyant: realized (pre-drawn) service durations of the queued
    /// patients, in queue order.
    pub queued_service_durations: Vec<f64>,
}

impl LabourRoomState {
    /// An empty room.
    #[must_use]
    pub fn idle(snapshot_at: f64) -> Self {
        LabourRoomState {
            snapshot_at,
            busy: false,
            elapsed_service: 0.0,
            queue_len: 0,
            in_service_completion_at: None,
            queued_service_durations: Vec::new(),
        }
    }

    /// Observable-only busy state, for exercising the state-based
    /// predictors without clairvoyant data.
    #[must_use]
    pub fn observed(snapshot_at: f64, elapsed_service: f64, queue_len: usize) -> Self {
        LabourRoomState {
            snapshot_at,
            busy: true,
            elapsed_service,
            queue_len,
            in_service_completion_at: None,
            queued_service_durations: Vec::new(),
        }
    }

    /// Remaining service minutes of the in-service delivery, never negative.
    #[must_use]
    pub fn actual_remaining(&self) -> f64 {
        match self.in_service_completion_at {
            Some(done_at) => (done_at - self.snapshot_at).max(0.0),
            None => 0.0,
        }
    }

    /// Internal-consistency check: an idle room has no elapsed service, no
    /// queue and no remaining service work. (A projected state may carry a
    /// completion instant in the past; that still counts as no remaining
    /// work.)
    #[must_use]
    pub fn is_consistent(&self) -> bool {
        if self.busy {
            self.elapsed_service >= 0.0
        } else {
            self.elapsed_service == 0.0
                && self.queue_len == 0
                && self.actual_remaining() == 0.0
                && self.queued_service_durations.is_empty()
        }
    }
}

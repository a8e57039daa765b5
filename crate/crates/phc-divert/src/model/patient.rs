//! Patient records and their per-entity pre-drawn randomness.

use serde::{Deserialize, Serialize};

/// Unique per-run patient identifier, dense from zero.
pub type PatientId = u64;

/// Facility index, 0 or 1.
pub type FacilityId = usize;

/// What kind of care the patient came for. Outpatients split by age at
/// creation: under-30s go straight to the doctor, the rest see a nurse
/// first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatientClass {
    OutpatientUnder30,
    Outpatient30Plus,
    Inpatient,
    Childbirth,
}

impl PatientClass {
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            PatientClass::OutpatientUnder30 => "outpatient_under30",
            PatientClass::Outpatient30Plus => "outpatient_30plus",
            PatientClass::Inpatient => "inpatient",
            PatientClass::Childbirth => "childbirth",
        }
    }

    #[must_use]
    pub fn is_outpatient(self) -> bool {
        matches!(
            self,
            PatientClass::OutpatientUnder30 | PatientClass::Outpatient30Plus
        )
    }
}

impl std::fmt::Display for PatientClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The station a patient is waiting for or being served at. Stored on the
/// record so a resource grant can be dispatched to the right service start.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    /// Doctor seat: consult for outpatients, admission assessment for
    /// inpatient and childbirth arrivals during OPD hours.
    Doctor,
    /// Staff-nurse check an over-30 outpatient gets before the doctor.
    NurseCheck,
    /// Staff-nurse admission assessment outside OPD hours.
    NurseAssessment,
    Lab,
    Pharmacy,
    /// The labour-room bed.
    Labour,
    /// An inpatient-department bed (admission stay or post-labour stay).
    IpdStay,
}

/// Every random attribute a patient will ever need, drawn in one fixed
/// order at creation.
///
/// Drawing everything up front keeps stream consumption identical across
/// policy scenarios: the routing policy can change where a patient goes,
/// never which random numbers the run consumes.
#[derive(Debug, Clone, Copy, Default)]
pub struct Draws {
    /// Outpatient consult or admission-assessment duration on the doctor.
    pub consult: f64,
    /// Over-30 pre-doctor check duration.
    pub nurse_check: f64,
    pub lab_referred: bool,
    pub lab: f64,
    pub pharmacy: f64,
    /// Childbirth admission-assessment duration (doctor or nurse alike).
    pub assessment: f64,
    /// Labour service duration.
    pub labour: f64,
    /// Post-labour inpatient stay duration.
    pub post_labour: f64,
    /// Inpatient admission stay duration.
    pub stay: f64,
}

/// One patient's life in the run. Every timestamp is minutes; `None` means
/// the milestone had not happened by the end of the run (or does not apply
/// to the class).
#[derive(Debug, Clone)]
pub struct Patient {
    pub id: PatientId,
    pub class: PatientClass,
    pub origin: FacilityId,
    /// Facility that serves (or will serve) the labour stay; equals origin
    /// unless diverted.
    pub served: FacilityId,
    pub diverted: bool,
    pub created_at: f64,
    /// Childbirth only: the instant the admission assessment finished and
    /// the routing decision was made.
    pub decision_at: Option<f64>,
    /// Childbirth only: joined the served facility's labour queue.
    pub labour_queue_join_at: Option<f64>,
    /// Childbirth only: got the labour bed.
    pub labour_admit_at: Option<f64>,
    pub exit_at: Option<f64>,
    /// Delay predictions issued at the labour-queue-join instant at the
    /// served facility, one per predictor (absent where undefined).
    pub pred_actual: Option<f64>,
    pub pred_rst_state: Option<f64>,
    pub pred_rst_steady: Option<f64>,
    pub pred_est: Option<f64>,
    /// The two numbers behind the routing decision, when one was made.
    pub w_home: Option<f64>,
    pub w_remote_projected: Option<f64>,
    /// First instants served by a doctor / nurse; diagnostics for flow
    /// tests.
    pub first_doctor_at: Option<f64>,
    pub first_nurse_at: Option<f64>,
    pub(crate) draws: Draws,
    pub(crate) awaiting: Option<Stage>,
}

impl Patient {
    #[must_use]
    pub(crate) fn new(id: PatientId, class: PatientClass, origin: FacilityId, created_at: f64) -> Self {
        Patient {
            id,
            class,
            origin,
            served: origin,
            diverted: false,
            created_at,
            decision_at: None,
            labour_queue_join_at: None,
            labour_admit_at: None,
            exit_at: None,
            pred_actual: None,
            pred_rst_state: None,
            pred_rst_steady: None,
            pred_est: None,
            w_home: None,
            w_remote_projected: None,
            first_doctor_at: None,
            first_nurse_at: None,
            draws: Draws::default(),
            awaiting: None,
        }
    }

    /// Labour wait from the routing decision to bed admission; for diverted
    /// patients this includes the travel leg (the decision already priced
    /// it).
    #[must_use]
    pub fn realized_wait(&self) -> Option<f64> {
        Some(self.labour_admit_at? - self.decision_at?)
    }

    /// Labour wait counted only from physically joining the served
    /// facility's queue.
    #[must_use]
    pub fn realized_wait_excl_travel(&self) -> Option<f64> {
        Some(self.labour_admit_at? - self.labour_queue_join_at?)
    }

    /// Milestones never run backwards.
    #[must_use]
    pub fn timestamps_ordered(&self) -> bool {
        let steps = [
            Some(self.created_at),
            self.decision_at,
            self.labour_queue_join_at,
            self.labour_admit_at,
            self.exit_at,
        ];
        steps
            .iter()
            .flatten()
            .zip(steps.iter().flatten().skip(1))
            .all(|(a, b)| a <= b)
    }
}

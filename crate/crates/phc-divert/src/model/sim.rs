//! The two-facility discrete-event simulation.
//!
//! Patient flow per facility:
//!
//! * Outpatients arrive only while the OPD is open. Under-30s go straight
//!   to the doctor; over-30s get a staff-nurse check first. After the
//!   consult a fraction detours through the lab; everyone leaves through
//!   the pharmacy.
//! * Inpatients arrive around the clock, are assessed by the doctor during
//!   OPD hours or the staff nurse otherwise, then occupy an inpatient bed
//!   for their stay.
//! * Childbirth patients arrive around the clock and are assessed the same
//!   way; the assessment's end is the routing decision instant. They then
//!   join a labour-room queue (here or at the other facility), deliver, and
//!   move to an inpatient bed for the post-labour stay.
//!
//! Doctors exist only inside the OPD window. A consult in progress at
//! closing time finishes late, but no one is granted the doctor outside the
//! window: at close, waiting outpatients carry over to the next morning (in
//! order, ahead of new arrivals) and waiting inpatient/childbirth
//! assessments are re-dispatched to the staff nurse, who is their
//! after-hours provider anyway.
//!
//! Every random attribute a patient needs is drawn when the patient is
//! created, from that facility's per-process streams, in a fixed order. A
//! policy change can re-route patients but never shifts anyone's random
//! numbers, which is what makes cross-scenario comparisons paired.

use crate::diversion::{decide, DiversionDecision, DiversionPolicy, FacilityView, Mode};
use crate::dist::ServiceDistribution;
use crate::kernel::{
    Capacity, EventEngine, RandomStream, Resource, ShiftCalendar, SimTime, MINUTES_PER_DAY,
};
use crate::model::config::{ConfigError, LabourRelease, PhcConfig};
use crate::model::patient::{Patient, PatientClass, PatientId, Stage};
use crate::model::snapshot::LabourRoomState;
use crate::predictors::{actual_delay, est_delay, rst_state_delay, rst_steady_delay};

/// Stream coordinates under the seed-splitting rule, one pair per arrival
/// process: even = interarrival draws, odd = patient attribute draws.
mod process {
    pub const OUTPATIENT_ARRIVALS: u64 = 0;
    pub const OUTPATIENT_ATTRIBUTES: u64 = 1;
    pub const CHILDBIRTH_ARRIVALS: u64 = 2;
    pub const CHILDBIRTH_ATTRIBUTES: u64 = 3;
    pub const INPATIENT_ARRIVALS: u64 = 4;
    pub const INPATIENT_ATTRIBUTES: u64 = 5;
}

/// Everything one run needs to know.
#[derive(Debug, Clone)]
pub struct SimParams {
    pub phc: [PhcConfig; 2],
    pub mode: Mode,
    /// One-way travel time between the facilities, minutes.
    pub travel_time: f64,
    /// Optional home-wait floor below which diversion is never considered.
    pub min_home_wait_gate: Option<f64>,
    pub labour_release: LabourRelease,
    /// Minutes discarded before statistics start.
    pub warmup_minutes: f64,
    /// Measured minutes after warm-up; the run ends at warmup + horizon.
    pub horizon_minutes: f64,
    pub master_seed: u64,
    /// Replication index, folded into every stream seed.
    pub replication: u64,
    /// Record every doctor grant instant (diagnostics; costs memory).
    pub record_doctor_grants: bool,
}

impl SimParams {
    /// Default experiment shape: published facility tuples, 60-minute
    /// travel, 180-day warm-up, 365 measured days.
    #[must_use]
    pub fn new(mode: Mode) -> Self {
        SimParams {
            phc: [PhcConfig::phc1(), PhcConfig::phc2()],
            mode,
            travel_time: 60.0,
            min_home_wait_gate: None,
            labour_release: LabourRelease::default(),
            warmup_minutes: 180.0 * MINUTES_PER_DAY,
            horizon_minutes: 365.0 * MINUTES_PER_DAY,
            master_seed: 42,
            replication: 0,
            record_doctor_grants: false,
        }
    }

    /// Collects every configuration problem, facility and scenario level.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut issues = self.phc[0].validate("phc1");
        issues.extend(self.phc[1].validate("phc2"));
        let mut bad = |field: &str, msg: String| issues.push(format!("scenario.{field}: {msg}"));
        if !(self.warmup_minutes >= 0.0 && self.warmup_minutes.is_finite()) {
            bad("warmup", format!("must be non-negative and finite, got {}", self.warmup_minutes));
        }
        if !(self.horizon_minutes > 0.0 && self.horizon_minutes.is_finite()) {
            bad("horizon", format!("must be positive and finite, got {}", self.horizon_minutes));
        }
        if !(self.travel_time >= 0.0 && self.travel_time.is_finite()) {
            bad("travel_time", format!("must be non-negative and finite, got {}", self.travel_time));
        }
        if let Some(g) = self.min_home_wait_gate {
            if !(g >= 0.0 && g.is_finite()) {
                bad("min_home_wait_gate", format!("must be non-negative and finite, got {g}"));
            }
        }
        if self.mode != Mode::None {
            if self.phc[0].labour_service != self.phc[1].labour_service {
                bad(
                    "policy",
                    "routing predictors assume one common labour-service distribution, \
                     but the facilities differ"
                        .into(),
                );
            }
            if self.mode == Mode::Est && self.phc[0].labour_service.bounded_support().is_none() {
                bad("policy", "est mode needs a bounded labour-service support".into());
            }
            if self.mode == Mode::RstSteady {
                for (i, c) in self.phc.iter().enumerate() {
                    match c.childbirth_offered_load() {
                        Some(rho) if rho < 1.0 => {}
                        Some(rho) => bad(
                            "policy",
                            format!("rst_steady is undefined at phc{}.rho = {rho} >= 1", i + 1),
                        ),
                        None => bad(
                            "policy",
                            format!("rst_steady needs childbirth arrivals at phc{}", i + 1),
                        ),
                    }
                }
            }
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { issues })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ArrivalKind {
    Outpatient,
    Childbirth,
    Inpatient,
}

#[derive(Debug, Clone, Copy)]
enum Ev {
    Arrive { fac: usize, kind: ArrivalKind },
    OpdOpen { fac: usize },
    OpdClose { fac: usize },
    Done { fac: usize, patient: PatientId, stage: Stage },
    RemoteJoin { patient: PatientId },
    WarmupEnd,
}

struct FacilityStreams {
    out_ia: RandomStream,
    out_attr: RandomStream,
    cb_ia: RandomStream,
    cb_attr: RandomStream,
    in_ia: RandomStream,
    in_attr: RandomStream,
}

impl FacilityStreams {
    fn new(master: u64, replication: u64, facility: u64) -> Self {
        let s = |p: u64| RandomStream::for_process(master, replication, facility, p);
        FacilityStreams {
            out_ia: s(process::OUTPATIENT_ARRIVALS),
            out_attr: s(process::OUTPATIENT_ATTRIBUTES),
            cb_ia: s(process::CHILDBIRTH_ARRIVALS),
            cb_attr: s(process::CHILDBIRTH_ATTRIBUTES),
            in_ia: s(process::INPATIENT_ARRIVALS),
            in_attr: s(process::INPATIENT_ATTRIBUTES),
        }
    }
}

struct Facility {
    cfg: PhcConfig,
    cal: ShiftCalendar,
    doctor: Resource<PatientId>,
    staff_nurse: Resource<PatientId>,
    lab: Resource<PatientId>,
    pharmacy: Resource<PatientId>,
    labour_bed: Resource<PatientId>,
    ipd: Resource<PatientId>,
    streams: FacilityStreams,
    /// Outpatients drained from the doctor queue at close, in order; they
    /// rejoin at the next open ahead of new arrivals.
    overnight_outpatients: Vec<PatientId>,
    /// Labour-room bookkeeping beyond what the resource tracks.
    labour_in_service: Option<PatientId>,
    labour_service_start: f64,
    labour_completion_at: f64,
    /// Finished delivery still holding the bed while waiting for an
    /// inpatient bed (blocking release discipline only).
    labour_holder: Option<PatientId>,
    /// Configured childbirth offered load, for the steady-state predictor.
    rho_childbirth: Option<f64>,
    /// Interarrival distributions, materialized once.
    out_ia_dist: Option<ServiceDistribution>,
    cb_ia_dist: Option<ServiceDistribution>,
    in_ia_dist: Option<ServiceDistribution>,
    childbirth_arrivals_measured: u64,
    doctor_grants: Vec<f64>,
}

impl Facility {
    fn new(cfg: PhcConfig, master: u64, replication: u64, index: usize) -> Self {
        let cal = cfg.calendar().expect("config validated before build");
        let exp = |mean: Option<f64>| mean.map(|m| ServiceDistribution::Exponential { mean: m });
        let ipd_capacity = if cfg.unlimited_ipd_beds {
            Capacity::Infinite
        } else {
            Capacity::Finite(cfg.n_ipd_beds)
        };
        Facility {
            doctor: Resource::with_occupancy_window(
                "doctor",
                Capacity::Finite(cfg.n_doctors),
                cal.opd(),
            ),
            staff_nurse: Resource::new("staff_nurse", Capacity::Finite(cfg.n_staff_nurses)),
            lab: Resource::new("lab", Capacity::Finite(1)),
            pharmacy: Resource::new("pharmacy", Capacity::Finite(1)),
            labour_bed: Resource::new("labour_bed", Capacity::Finite(cfg.n_labour_beds)),
            ipd: Resource::new("ipd_bed", ipd_capacity),
            streams: FacilityStreams::new(master, replication, index as u64),
            overnight_outpatients: Vec::new(),
            labour_in_service: None,
            labour_service_start: 0.0,
            labour_completion_at: 0.0,
            labour_holder: None,
            rho_childbirth: cfg.childbirth_offered_load(),
            out_ia_dist: exp(cfg.ia_outpatient),
            cb_ia_dist: exp(cfg.ia_childbirth),
            in_ia_dist: exp(cfg.ia_inpatient),
            childbirth_arrivals_measured: 0,
            doctor_grants: Vec::new(),
            cal,
            cfg,
        }
    }
}

/// Post-warm-up aggregates for one facility.
#[derive(Debug, Clone)]
pub struct FacilityTrace {
    /// Doctor busy minutes clipped to the OPD window.
    pub doctor_busy_open_minutes: f64,
    /// OPD open minutes in the measured window (the doctor normalizer).
    pub opd_open_minutes: f64,
    pub staff_nurse_busy_minutes: f64,
    pub lab_busy_minutes: f64,
    pub pharmacy_busy_minutes: f64,
    pub labour_busy_minutes: f64,
    pub ipd_busy_minutes: f64,
    pub n_doctors: u32,
    pub n_staff_nurses: u32,
    pub n_labour_beds: u32,
    /// `None` when beds are unlimited.
    pub ipd_capacity: Option<u32>,
    pub childbirth_arrivals_measured: u64,
    /// Doctor grant instants, when recording was requested.
    pub doctor_grants: Vec<f64>,
}

/// Everything a finished run hands to metrics and report writers.
#[derive(Debug, Clone)]
pub struct RunTrace {
    pub mode: Mode,
    pub replication: u64,
    pub warmup_minutes: f64,
    pub end_minutes: f64,
    pub patients: Vec<Patient>,
    pub decisions: Vec<DiversionDecision>,
    pub facility: [FacilityTrace; 2],
    pub created: u64,
    pub exited: u64,
}

impl RunTrace {
    /// Childbirth records created inside the measured window, the
    /// population every childbirth statistic is computed over.
    pub fn measured_childbirth(&self) -> impl Iterator<Item = &Patient> {
        let (lo, hi) = (self.warmup_minutes, self.end_minutes);
        self.patients.iter().filter(move |p| {
            p.class == PatientClass::Childbirth && p.created_at >= lo && p.created_at < hi
        })
    }
}

/// One simulation instance. Owns its clock, calendar and streams; runs on
/// one thread; independent replications are independent instances.
pub struct TwoPhcSim {
    params: SimParams,
    engine: EventEngine<Ev>,
    fac: [Facility; 2],
    patients: Vec<Patient>,
    decisions: Vec<DiversionDecision>,
    policy: Option<DiversionPolicy>,
    end_at: f64,
    created: u64,
    exited: u64,
}

impl TwoPhcSim {
    pub fn new(params: SimParams) -> Result<Self, ConfigError> {
        params.validate()?;
        let policy = match params.mode {
            Mode::None => None,
            mode => {
                let mut p = DiversionPolicy::new(mode, params.travel_time);
                p.min_home_wait_gate = params.min_home_wait_gate;
                Some(p)
            }
        };
        let fac = [
            Facility::new(params.phc[0].clone(), params.master_seed, params.replication, 0),
            Facility::new(params.phc[1].clone(), params.master_seed, params.replication, 1),
        ];
        let end_at = params.warmup_minutes + params.horizon_minutes;
        Ok(TwoPhcSim {
            engine: EventEngine::new(),
            fac,
            patients: Vec::new(),
            decisions: Vec::new(),
            policy,
            end_at,
            created: 0,
            exited: 0,
            params,
        })
    }

    /// Runs to the horizon and returns the trace.
    pub fn run(mut self) -> RunTrace {
        // Warm-up reset first in the calendar so a zero warm-up still
        // precedes every same-instant arrival.
        self.engine
            .schedule(SimTime(self.params.warmup_minutes), Ev::WarmupEnd);
        for f in 0..2 {
            let fac = &mut self.fac[f];
            let open_at = fac.cal.opd().next_open_at(SimTime::ZERO);
            self.engine.schedule(open_at, Ev::OpdOpen { fac: f });
            if let Some(d) = fac.out_ia_dist {
                let gap = d.sample(&mut fac.streams.out_ia);
                let at = fac.cal.opd().advance_open(SimTime::ZERO, gap);
                self.engine
                    .schedule(at, Ev::Arrive { fac: f, kind: ArrivalKind::Outpatient });
            }
            if let Some(d) = fac.cb_ia_dist {
                let gap = d.sample(&mut fac.streams.cb_ia);
                self.engine
                    .schedule(SimTime(gap), Ev::Arrive { fac: f, kind: ArrivalKind::Childbirth });
            }
            if let Some(d) = fac.in_ia_dist {
                let gap = d.sample(&mut fac.streams.in_ia);
                self.engine
                    .schedule(SimTime(gap), Ev::Arrive { fac: f, kind: ArrivalKind::Inpatient });
            }
        }

        let end = SimTime(self.end_at);
        while let Some((t, ev)) = self.engine.pop_before(end) {
            self.handle(t.minutes(), ev);
        }
        self.engine.advance_clock_to(end);
        self.into_trace()
    }

    fn into_trace(self) -> RunTrace {
        let end = SimTime(self.end_at);
        let warmup = SimTime(self.params.warmup_minutes);
        let facility = self.fac.map(|fac| FacilityTrace {
            doctor_busy_open_minutes: fac
                .doctor
                .windowed_busy_integral(end)
                .expect("doctor resource carries an occupancy window"),
            opd_open_minutes: fac.cal.opd().open_measure_between(warmup, end),
            staff_nurse_busy_minutes: fac.staff_nurse.busy_integral(end),
            lab_busy_minutes: fac.lab.busy_integral(end),
            pharmacy_busy_minutes: fac.pharmacy.busy_integral(end),
            labour_busy_minutes: fac.labour_bed.busy_integral(end),
            ipd_busy_minutes: fac.ipd.busy_integral(end),
            n_doctors: fac.cfg.n_doctors,
            n_staff_nurses: fac.cfg.n_staff_nurses,
            n_labour_beds: fac.cfg.n_labour_beds,
            ipd_capacity: fac.ipd.capacity().as_finite(),
            childbirth_arrivals_measured: fac.childbirth_arrivals_measured,
            doctor_grants: fac.doctor_grants,
        });
        RunTrace {
            mode: self.params.mode,
            replication: self.params.replication,
            warmup_minutes: self.params.warmup_minutes,
            end_minutes: self.end_at,
            patients: self.patients,
            decisions: self.decisions,
            facility,
            created: self.created,
            exited: self.exited,
        }
    }

    fn handle(&mut self, now: f64, ev: Ev) {
        match ev {
            Ev::Arrive { fac, kind } => match kind {
                ArrivalKind::Outpatient => self.arrive_outpatient(fac, now),
                ArrivalKind::Childbirth => self.arrive_childbirth(fac, now),
                ArrivalKind::Inpatient => self.arrive_inpatient(fac, now),
            },
            Ev::OpdOpen { fac } => self.opd_open(fac, now),
            Ev::OpdClose { fac } => self.opd_close(fac, now),
            Ev::Done { fac, patient, stage } => self.service_done(fac, patient, stage, now),
            Ev::RemoteJoin { patient } => {
                let f = self.patients[patient as usize].served;
                self.join_labour_queue(f, patient, now);
            }
            Ev::WarmupEnd => {
                for fac in &mut self.fac {
                    let t = SimTime(now);
                    fac.doctor.reset_stats(t);
                    fac.staff_nurse.reset_stats(t);
                    fac.lab.reset_stats(t);
                    fac.pharmacy.reset_stats(t);
                    fac.labour_bed.reset_stats(t);
                    fac.ipd.reset_stats(t);
                }
            }
        }
    }

    // ----- arrivals ------------------------------------------------------

    fn new_patient(&mut self, class: PatientClass, origin: usize, now: f64) -> PatientId {
        let id = self.patients.len() as PatientId;
        self.patients.push(Patient::new(id, class, origin, now));
        self.created += 1;
        id
    }

    fn arrive_outpatient(&mut self, f: usize, now: f64) {
        debug_assert!(self.fac[f].cal.is_opd_open(SimTime(now)));
        // Attribute draw order: age coin, consult, nurse check, lab coin,
        // lab, pharmacy. Every outpatient consumes all six draws.
        let (class, draws) = {
            let fac = &mut self.fac[f];
            let s = &mut fac.streams.out_attr;
            let over30 = s.bernoulli(fac.cfg.p_age_30plus);
            let mut d = crate::model::patient::Draws::default();
            d.consult = fac.cfg.doctor_consult.sample(s);
            d.nurse_check = fac.cfg.opd_nurse_check.sample(s);
            d.lab_referred = s.bernoulli(fac.cfg.p_lab);
            d.lab = fac.cfg.lab_test.sample(s);
            d.pharmacy = fac.cfg.pharmacy.sample(s);
            let class = if over30 {
                PatientClass::Outpatient30Plus
            } else {
                PatientClass::OutpatientUnder30
            };
            (class, d)
        };
        let id = self.new_patient(class, f, now);
        self.patients[id as usize].draws = draws;
        match class {
            PatientClass::OutpatientUnder30 => self.request_doctor(f, id, now),
            _ => self.request_nurse(f, id, Stage::NurseCheck, now),
        }
        let fac = &mut self.fac[f];
        if let Some(d) = fac.out_ia_dist {
            let gap = d.sample(&mut fac.streams.out_ia);
            let at = fac.cal.opd().advance_open(SimTime(now), gap);
            self.engine
                .schedule(at, Ev::Arrive { fac: f, kind: ArrivalKind::Outpatient });
        }
    }

    fn arrive_childbirth(&mut self, f: usize, now: f64) {
        if now >= self.params.warmup_minutes {
            self.fac[f].childbirth_arrivals_measured += 1;
        }
        // Attribute draw order: assessment, labour, post-labour stay.
        let draws = {
            let fac = &mut self.fac[f];
            let s = &mut fac.streams.cb_attr;
            let mut d = crate::model::patient::Draws::default();
            d.assessment = fac.cfg.childbirth_assessment.sample(s);
            d.labour = fac.cfg.labour_service.sample(s);
            d.post_labour = fac.cfg.post_labour_stay.sample(s);
            d
        };
        let id = self.new_patient(PatientClass::Childbirth, f, now);
        self.patients[id as usize].draws = draws;
        if self.fac[f].cal.is_opd_open(SimTime(now)) {
            self.request_doctor(f, id, now);
        } else {
            self.request_nurse(f, id, Stage::NurseAssessment, now);
        }
        let fac = &mut self.fac[f];
        if let Some(d) = fac.cb_ia_dist {
            let gap = d.sample(&mut fac.streams.cb_ia);
            self.engine
                .schedule_in(gap, Ev::Arrive { fac: f, kind: ArrivalKind::Childbirth });
        }
    }

    fn arrive_inpatient(&mut self, f: usize, now: f64) {
        // Attribute draw order: assessment (the consult distribution,
        // whichever provider performs it), stay.
        let draws = {
            let fac = &mut self.fac[f];
            let s = &mut fac.streams.in_attr;
            let mut d = crate::model::patient::Draws::default();
            d.consult = fac.cfg.doctor_consult.sample(s);
            d.stay = fac.cfg.inpatient_stay.sample(s);
            d
        };
        let id = self.new_patient(PatientClass::Inpatient, f, now);
        self.patients[id as usize].draws = draws;
        if self.fac[f].cal.is_opd_open(SimTime(now)) {
            self.request_doctor(f, id, now);
        } else {
            self.request_nurse(f, id, Stage::NurseAssessment, now);
        }
        let fac = &mut self.fac[f];
        if let Some(d) = fac.in_ia_dist {
            let gap = d.sample(&mut fac.streams.in_ia);
            self.engine
                .schedule_in(gap, Ev::Arrive { fac: f, kind: ArrivalKind::Inpatient });
        }
    }

    // ----- seize/start helpers -------------------------------------------

    fn request_doctor(&mut self, f: usize, id: PatientId, now: f64) {
        debug_assert!(
            self.fac[f].cal.is_opd_open(SimTime(now)),
            "doctor requested outside the OPD window at t={now}"
        );
        self.patients[id as usize].awaiting = Some(Stage::Doctor);
        let granted = self.fac[f]
            .doctor
            .seize(SimTime(now), id)
            .expect("fresh doctor request");
        if granted {
            self.start_doctor(f, id, now);
        }
    }

    fn start_doctor(&mut self, f: usize, id: PatientId, now: f64) {
        debug_assert!(
            self.fac[f].cal.is_opd_open(SimTime(now)),
            "doctor granted outside the OPD window at t={now}"
        );
        if self.params.record_doctor_grants {
            self.fac[f].doctor_grants.push(now);
        }
        let p = &mut self.patients[id as usize];
        p.first_doctor_at.get_or_insert(now);
        let dur = match p.class {
            PatientClass::Childbirth => p.draws.assessment,
            // Outpatient consult and inpatient admission assessment share
            // the consult distribution.
            _ => p.draws.consult,
        };
        self.engine
            .schedule_in(dur, Ev::Done { fac: f, patient: id, stage: Stage::Doctor });
    }

    fn request_nurse(&mut self, f: usize, id: PatientId, stage: Stage, now: f64) {
        debug_assert!(matches!(stage, Stage::NurseCheck | Stage::NurseAssessment));
        self.patients[id as usize].awaiting = Some(stage);
        let granted = self.fac[f]
            .staff_nurse
            .seize(SimTime(now), id)
            .expect("fresh nurse request");
        if granted {
            self.start_nurse(f, id, now);
        }
    }

    fn start_nurse(&mut self, f: usize, id: PatientId, now: f64) {
        let p = &mut self.patients[id as usize];
        p.first_nurse_at.get_or_insert(now);
        let stage = p.awaiting.expect("nurse grantee has a pending stage");
        let dur = match (stage, p.class) {
            (Stage::NurseCheck, _) => p.draws.nurse_check,
            (Stage::NurseAssessment, PatientClass::Childbirth) => p.draws.assessment,
            (Stage::NurseAssessment, PatientClass::Inpatient) => p.draws.consult,
            other => unreachable!("nurse cannot serve {other:?}"),
        };
        self.engine
            .schedule_in(dur, Ev::Done { fac: f, patient: id, stage });
    }

    fn request_lab(&mut self, f: usize, id: PatientId, now: f64) {
        self.patients[id as usize].awaiting = Some(Stage::Lab);
        let granted = self.fac[f].lab.seize(SimTime(now), id).expect("fresh lab request");
        if granted {
            self.start_lab(f, id, now);
        }
    }

    fn start_lab(&mut self, f: usize, id: PatientId, _now: f64) {
        let dur = self.patients[id as usize].draws.lab;
        self.engine
            .schedule_in(dur, Ev::Done { fac: f, patient: id, stage: Stage::Lab });
    }

    fn request_pharmacy(&mut self, f: usize, id: PatientId, now: f64) {
        self.patients[id as usize].awaiting = Some(Stage::Pharmacy);
        let granted = self.fac[f]
            .pharmacy
            .seize(SimTime(now), id)
            .expect("fresh pharmacy request");
        if granted {
            self.start_pharmacy(f, id, now);
        }
    }

    fn start_pharmacy(&mut self, f: usize, id: PatientId, _now: f64) {
        let dur = self.patients[id as usize].draws.pharmacy;
        self.engine
            .schedule_in(dur, Ev::Done { fac: f, patient: id, stage: Stage::Pharmacy });
    }

    fn request_ipd(&mut self, f: usize, id: PatientId, now: f64) {
        self.patients[id as usize].awaiting = Some(Stage::IpdStay);
        let granted = self.fac[f].ipd.seize(SimTime(now), id).expect("fresh bed request");
        if granted {
            self.start_ipd_stay(f, id, now);
        }
    }

    fn start_ipd_stay(&mut self, f: usize, id: PatientId, now: f64) {
        // Under the blocking discipline the labour bed frees only now, when
        // its occupant has the inpatient bed in hand.
        if self.fac[f].labour_holder == Some(id) {
            self.fac[f].labour_holder = None;
            self.release_labour_bed(f, id, now);
        }
        let p = &self.patients[id as usize];
        let dur = match p.class {
            PatientClass::Childbirth => p.draws.post_labour,
            PatientClass::Inpatient => p.draws.stay,
            other => unreachable!("no inpatient stay for {other:?}"),
        };
        self.engine
            .schedule_in(dur, Ev::Done { fac: f, patient: id, stage: Stage::IpdStay });
    }

    /// Dispatches a freshly granted unit to the right service start.
    fn start_granted(&mut self, f: usize, id: PatientId, now: f64) {
        match self.patients[id as usize]
            .awaiting
            .expect("grantee has a pending stage")
        {
            Stage::Doctor => self.start_doctor(f, id, now),
            Stage::NurseCheck | Stage::NurseAssessment => self.start_nurse(f, id, now),
            Stage::Lab => self.start_lab(f, id, now),
            Stage::Pharmacy => self.start_pharmacy(f, id, now),
            Stage::Labour => self.admit_to_labour(f, id, now),
            Stage::IpdStay => self.start_ipd_stay(f, id, now),
        }
    }

    // ----- childbirth routing and the labour room -------------------------

    fn labour_snapshot(&self, f: usize, now: f64) -> LabourRoomState {
        let fac = &self.fac[f];
        match fac.labour_in_service {
            None => LabourRoomState::idle(now),
            Some(_) => LabourRoomState {
                snapshot_at: now,
                busy: true,
                elapsed_service: now - fac.labour_service_start,
                queue_len: fac.labour_bed.queue_len(),
                in_service_completion_at: Some(fac.labour_completion_at),
                queued_service_durations: fac
                    .labour_bed
                    .waiting_ids()
                    .map(|q| self.patients[q as usize].draws.labour)
                    .collect(),
            },
        }
    }

    fn childbirth_decision(&mut self, origin: usize, id: PatientId, now: f64) {
        self.patients[id as usize].decision_at = Some(now);
        let Some(policy) = self.policy else {
            self.join_labour_queue(origin, id, now);
            return;
        };
        let remote_f = 1 - origin;
        let home_state = self.labour_snapshot(origin, now);
        let remote_state = self.labour_snapshot(remote_f, now);
        let nan = f64::NAN;
        let decision = decide(
            id,
            now,
            origin,
            FacilityView {
                state: &home_state,
                rho: self.fac[origin].rho_childbirth.unwrap_or(nan),
            },
            FacilityView {
                state: &remote_state,
                rho: self.fac[remote_f].rho_childbirth.unwrap_or(nan),
            },
            &policy,
            &self.fac[origin].cfg.labour_service,
        )
        .expect("policy usability verified by SimParams::validate");
        let p = &mut self.patients[id as usize];
        p.w_home = Some(decision.w_home);
        p.w_remote_projected = Some(decision.w_remote_projected);
        let diverted = decision.diverted;
        self.decisions.push(decision);
        if diverted {
            let p = &mut self.patients[id as usize];
            p.diverted = true;
            p.served = remote_f;
            self.engine
                .schedule_in(policy.travel_time, Ev::RemoteJoin { patient: id });
        } else {
            self.join_labour_queue(origin, id, now);
        }
    }

    fn join_labour_queue(&mut self, f: usize, id: PatientId, now: f64) {
        // Predictions are issued against the pre-join state: they estimate
        // the wait this patient is about to begin.
        let snap = self.labour_snapshot(f, now);
        let dist = self.fac[f].cfg.labour_service;
        let rho = self.fac[f].rho_childbirth;
        {
            let p = &mut self.patients[id as usize];
            p.pred_actual = Some(actual_delay(&snap));
            p.pred_rst_state = Some(rst_state_delay(&snap, &dist));
            p.pred_rst_steady = rho.and_then(|r| rst_steady_delay(r, &dist).ok());
            p.pred_est = est_delay(&snap, &dist).ok();
            p.labour_queue_join_at = Some(now);
            p.awaiting = Some(Stage::Labour);
        }
        let granted = self.fac[f]
            .labour_bed
            .seize(SimTime(now), id)
            .expect("fresh labour-bed request");
        if granted {
            self.admit_to_labour(f, id, now);
        }
    }

    fn admit_to_labour(&mut self, f: usize, id: PatientId, now: f64) {
        let dur = self.patients[id as usize].draws.labour;
        self.patients[id as usize].labour_admit_at = Some(now);
        let fac = &mut self.fac[f];
        fac.labour_in_service = Some(id);
        fac.labour_service_start = now;
        fac.labour_completion_at = now + dur;
        self.engine.schedule(
            SimTime(fac.labour_completion_at),
            Ev::Done { fac: f, patient: id, stage: Stage::Labour },
        );
    }

    fn release_labour_bed(&mut self, f: usize, id: PatientId, now: f64) {
        self.fac[f].labour_in_service = None;
        let next = self.fac[f]
            .labour_bed
            .release(SimTime(now), id)
            .expect("labour bed held by its occupant");
        if let Some(q) = next {
            self.start_granted(f, q, now);
        }
    }

    fn labour_complete(&mut self, f: usize, id: PatientId, now: f64) {
        match self.params.labour_release {
            LabourRelease::OnServiceComplete => {
                self.release_labour_bed(f, id, now);
                self.request_ipd(f, id, now);
            }
            LabourRelease::OnIpdTransfer => {
                self.fac[f].labour_holder = Some(id);
                self.request_ipd(f, id, now);
            }
        }
    }

    // ----- stage completions ----------------------------------------------

    fn service_done(&mut self, f: usize, id: PatientId, stage: Stage, now: f64) {
        match stage {
            Stage::Doctor => {
                let next = self.fac[f]
                    .doctor
                    .release(SimTime(now), id)
                    .expect("doctor held by its patient");
                if let Some(q) = next {
                    self.start_granted(f, q, now);
                }
                self.after_assessment(f, id, now);
            }
            Stage::NurseCheck => {
                let next = self.fac[f]
                    .staff_nurse
                    .release(SimTime(now), id)
                    .expect("nurse held by its patient");
                if let Some(q) = next {
                    self.start_granted(f, q, now);
                }
                // The check precedes the consult; the doctor queue is only
                // reachable while the OPD is open, which it is, because
                // checks start only for patients who arrived during hours.
                // A check that spills past close re-dispatches like any
                // other after-hours assessment would.
                if self.fac[f].cal.is_opd_open(SimTime(now)) {
                    self.request_doctor(f, id, now);
                } else {
                    self.fac[f].overnight_outpatients.push(id);
                    self.patients[id as usize].awaiting = Some(Stage::Doctor);
                }
            }
            Stage::NurseAssessment => {
                let next = self.fac[f]
                    .staff_nurse
                    .release(SimTime(now), id)
                    .expect("nurse held by its patient");
                if let Some(q) = next {
                    self.start_granted(f, q, now);
                }
                self.after_assessment(f, id, now);
            }
            Stage::Lab => {
                let next = self.fac[f]
                    .lab
                    .release(SimTime(now), id)
                    .expect("lab held by its patient");
                if let Some(q) = next {
                    self.start_granted(f, q, now);
                }
                self.request_pharmacy(f, id, now);
            }
            Stage::Pharmacy => {
                let next = self.fac[f]
                    .pharmacy
                    .release(SimTime(now), id)
                    .expect("pharmacy held by its patient");
                if let Some(q) = next {
                    self.start_granted(f, q, now);
                }
                self.exit(id, now);
            }
            Stage::Labour => self.labour_complete(f, id, now),
            Stage::IpdStay => {
                let next = self.fac[f]
                    .ipd
                    .release(SimTime(now), id)
                    .expect("bed held by its patient");
                if let Some(q) = next {
                    self.start_granted(f, q, now);
                }
                self.exit(id, now);
            }
        }
    }

    fn after_assessment(&mut self, f: usize, id: PatientId, now: f64) {
        let class = self.patients[id as usize].class;
        match class {
            PatientClass::OutpatientUnder30 | PatientClass::Outpatient30Plus => {
                if self.patients[id as usize].draws.lab_referred {
                    self.request_lab(f, id, now);
                } else {
                    self.request_pharmacy(f, id, now);
                }
            }
            PatientClass::Inpatient => self.request_ipd(f, id, now),
            PatientClass::Childbirth => self.childbirth_decision(f, id, now),
        }
    }

    fn exit(&mut self, id: PatientId, now: f64) {
        let p = &mut self.patients[id as usize];
        debug_assert!(p.exit_at.is_none());
        p.exit_at = Some(now);
        p.awaiting = None;
        self.exited += 1;
    }

    // ----- the OPD day boundary -------------------------------------------

    fn opd_open(&mut self, f: usize, now: f64) {
        let window = self.fac[f].cal.opd();
        self.engine
            .schedule_in(window.daily_length(), Ev::OpdClose { fac: f });
        self.engine
            .schedule_in(MINUTES_PER_DAY, Ev::OpdOpen { fac: f });
        // Yesterday's un-consulted outpatients rejoin first, in carry-over
        // order, ahead of anything the new day brings.
        let carried: Vec<PatientId> = self.fac[f].overnight_outpatients.drain(..).collect();
        for id in carried {
            let granted = self.fac[f]
                .doctor
                .seize(SimTime(now), id)
                .expect("carried patient rejoins once");
            if granted {
                self.start_doctor(f, id, now);
            }
        }
    }

    fn opd_close(&mut self, f: usize, now: f64) {
        // Whoever still waits for the doctor cannot be served today. The
        // resource queue empties so that a late-running consult's release
        // grants no one outside the window.
        let drained = self.fac[f].doctor.drain_waiting();
        for (id, _joined) in drained {
            match self.patients[id as usize].class {
                PatientClass::OutpatientUnder30 | PatientClass::Outpatient30Plus => {
                    self.fac[f].overnight_outpatients.push(id);
                }
                // Inpatient and childbirth assessments fall to the staff
                // nurse, their after-hours provider, keeping queue order.
                _ => self.request_nurse(f, id, Stage::NurseAssessment, now),
            }
        }
    }
}

/// Convenience: validate, build and run in one call.
pub fn run_scenario(params: SimParams) -> Result<RunTrace, ConfigError> {
    Ok(TwoPhcSim::new(params)?.run())
}

//! The two-PHC patient-flow model: facility configuration, patient
//! records, labour-room snapshots, and the event-driven simulation.

pub mod config;
pub mod patient;
pub mod sim;
pub mod snapshot;

pub use config::{ConfigError, LabourRelease, PhcConfig};
pub use patient::{FacilityId, Patient, PatientClass, PatientId, Stage};
pub use sim::{run_scenario, FacilityTrace, RunTrace, SimParams, TwoPhcSim};
pub use snapshot::LabourRoomState;

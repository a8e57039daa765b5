//! Discrete-event simulation of two primary health centres (PHCs) that share
//! childbirth load through real-time delay prediction.
//!
//! Each PHC runs outpatient, inpatient and childbirth processes over a small
//! set of resources (doctors, nurses, a labour room, inpatient beds). When a
//! childbirth patient finishes her admission assessment, a centralized
//! dispatcher compares the predicted labour-room delay at the home facility
//! against the predicted delay at the other facility plus the travel time,
//! and sends her wherever the total is smaller.
//!
//! The crate is organised bottom-up:
//!
//! * [`kernel`] - event calendar, FIFO resources, shift calendars, seeded
//!   random streams. Nothing in here knows about health care.
//! * [`dist`] - service-time distributions sampled by inverse CDF.
//! * [`model`] - the two-facility patient-flow model.
//! * [`predictors`] - the labour-room delay predictors that drive diversion.
//! * [`diversion`] - the dispatch rule itself.
//! * [`metrics`] - occupancy, threshold exceedance, load imbalance, MAPE,
//!   replication summaries.
//! * [`experiment`] - scenario configuration, replication driver, CSV and
//!   report writers.
//!
//! Start with the runnable programs in `examples/`; each one exercises a
//! single capability end to end.

pub mod dist;
pub mod diversion;
pub mod experiment;
pub mod kernel;
pub mod metrics;
pub mod model;
pub mod predictors;

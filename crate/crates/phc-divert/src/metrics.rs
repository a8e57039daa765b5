//! Outcome measures: occupancies, threshold exceedance, load imbalance,
//! prediction error, and replication statistics.

use std::collections::BTreeMap;

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::diversion::Mode;
use crate::predictors::Predictor;

/// Metric computation rejected its inputs.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("occupancy window must have positive length, got {0} minutes")]
    EmptyWindow(f64),
    #[error("wait threshold must be positive, got {0} minutes")]
    BadThreshold(f64),
}

/// Time-averaged busy fraction: busy unit-minutes over capacity times
/// window length.
///
/// Pass the plain integral and the full window for round-the-clock
/// resources; pass the window-clipped integral and the open-time measure for
/// resources whose occupancy is normalized over opening hours (the
/// doctors).
pub fn occupancy(
    busy_unit_minutes: f64,
    capacity: u32,
    window_minutes: f64,
) -> Result<f64, MetricsError> {
    if window_minutes <= 0.0 {
        return Err(MetricsError::EmptyWindow(window_minutes));
    }
    let frac = busy_unit_minutes / (f64::from(capacity) * window_minutes);
    debug_assert!(
        (-1e-9..=1.0 + 1e-9).contains(&frac),
        "occupancy {frac} outside [0,1]"
    );
    Ok(frac.clamp(0.0, 1.0))
}

/// Fraction of waits strictly above the threshold; `None` when no waits
/// were observed (the statistic is undefined, not zero).
pub fn alpha(waits: &[f64], threshold: f64) -> Result<Option<f64>, MetricsError> {
    if threshold <= 0.0 {
        return Err(MetricsError::BadThreshold(threshold));
    }
    if waits.is_empty() {
        return Ok(None);
    }
    let over = waits.iter().filter(|w| **w > threshold).count();
    Ok(Some(over as f64 / waits.len() as f64))
}

/// Relative percentage gap between two utilizations, taken against the
/// larger one: `100 * (max - min) / max`; zero when both are zero.
#[must_use]
pub fn delta_rho(rho_a: f64, rho_b: f64) -> f64 {
    let hi = rho_a.max(rho_b);
    let lo = rho_a.min(rho_b);
    if hi == 0.0 {
        0.0
    } else {
        100.0 * (hi - lo) / hi
    }
}

/// Mean absolute percentage error over `(actual, predicted)` pairs,
/// excluding pairs with a zero actual (the formula divides by it). `None`
/// when no pair survives the exclusion.
#[must_use]
pub fn mape(pairs: &[(f64, f64)]) -> Option<f64> {
    let mut n = 0usize;
    let mut acc = 0.0;
    for (actual, predicted) in pairs {
        if *actual > 0.0 {
            acc += (actual - predicted).abs() / actual;
            n += 1;
        }
    }
    if n == 0 {
        None
    } else {
        Some(100.0 * acc / n as f64)
    }
}

/// Sample mean; `None` for an empty slice.
#[must_use]
pub fn sample_mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        None
    } else {
        Some(values.iter().sum::<f64>() / values.len() as f64)
    }
}

/// A replication statistic: sample mean plus, given at least two
/// replications, the 95% Student-t confidence half-width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub half_width: Option<f64>,
}

impl Summary {
    /// Confidence interval as (low, high); collapses to the mean when no
    /// half-width is available.
    #[must_use]
    pub fn interval(&self) -> (f64, f64) {
        let hw = self.half_width.unwrap_or(0.0);
        (self.mean - hw, self.mean + hw)
    }
}

/// Summarizes per-replication scalars; `None` for an empty slice, mean-only
/// for a single replication.
#[must_use]
pub fn replicate_summary(values: &[f64]) -> Option<Summary> {
    let n = values.len();
    let mean = sample_mean(values)?;
    if n < 2 {
        return Some(Summary { mean, half_width: None });
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
    let t = StudentsT::new(0.0, 1.0, n as f64 - 1.0)
        .expect("n >= 2 gives a valid t distribution")
        .inverse_cdf(0.975);
    Some(Summary {
        mean,
        half_width: Some(t * (var / n as f64).sqrt()),
    })
}

/// One replication's scalar outcomes for one scenario, already reduced from
/// the raw trace. Index 0/1 = facility.
#[derive(Debug, Clone, Default)]
pub struct RepScalars {
    pub doctor_occ: [f64; 2],
    pub staff_nurse_occ: [f64; 2],
    /// `None` when inpatient beds are configured unlimited (occupancy of an
    /// infinite pool is not a fraction).
    pub ipd_occ: [Option<f64>; 2],
    pub labour_occ: [f64; 2],
    pub alpha_pooled: Option<f64>,
    pub alpha_by_facility: [Option<f64>; 2],
    pub mean_wait_pooled: Option<f64>,
    pub mean_wait_by_facility: [Option<f64>; 2],
    /// Per-predictor MAPE over this replication's served childbirth
    /// patients.
    pub mape: BTreeMap<&'static str, f64>,
    pub served_childbirth: u64,
    pub diverted: u64,
}

/// Replication-averaged outcomes for one facility.
#[derive(Debug, Clone)]
pub struct FacilityOutcomes {
    pub doctor_occupancy: Summary,
    pub staff_nurse_occupancy: Summary,
    pub ipd_bed_occupancy: Option<Summary>,
    pub labour_bed_occupancy: Summary,
    pub alpha: Option<Summary>,
    pub mean_labour_wait: Option<Summary>,
}

/// The full outcome table for one scenario.
///
/// Load-imbalance percentages are computed from the replication-mean
/// occupancies (not averaged per replication), so re-applying
/// [`delta_rho`] to the published occupancy columns reproduces the
/// published imbalance columns bit for bit.
#[derive(Debug, Clone)]
pub struct OutcomeReport {
    pub scenario: Mode,
    pub replications: usize,
    pub facility: [FacilityOutcomes; 2],
    pub alpha: Option<Summary>,
    pub mean_labour_wait: Option<Summary>,
    pub delta_rho_doc: f64,
    pub delta_rho_nurse: f64,
    pub delta_rho_ipd: Option<f64>,
    pub delta_rho_lb: f64,
    /// Per-predictor MAPE summaries, keyed by predictor name.
    pub mape: BTreeMap<&'static str, Summary>,
    pub served_childbirth: Summary,
    pub diverted: Summary,
}

fn summarize_present(values: impl Iterator<Item = Option<f64>>) -> Option<Summary> {
    let present: Vec<f64> = values.flatten().collect();
    replicate_summary(&present)
}

/// Folds per-replication scalars into the scenario's outcome report.
#[must_use]
pub fn summarize_scenario(scenario: Mode, reps: &[RepScalars]) -> OutcomeReport {
    assert!(!reps.is_empty(), "at least one replication required");
    let col = |f: &dyn Fn(&RepScalars) -> f64| -> Summary {
        replicate_summary(&reps.iter().map(f).collect::<Vec<_>>()).unwrap()
    };
    let facility = |i: usize| -> FacilityOutcomes {
        FacilityOutcomes {
            doctor_occupancy: col(&|r| r.doctor_occ[i]),
            staff_nurse_occupancy: col(&|r| r.staff_nurse_occ[i]),
            ipd_bed_occupancy: summarize_present(reps.iter().map(|r| r.ipd_occ[i])),
            labour_bed_occupancy: col(&|r| r.labour_occ[i]),
            alpha: summarize_present(reps.iter().map(|r| r.alpha_by_facility[i])),
            mean_labour_wait: summarize_present(reps.iter().map(|r| r.mean_wait_by_facility[i])),
        }
    };
    let facility = [facility(0), facility(1)];

    let mut mape = BTreeMap::new();
    for p in Predictor::ALL {
        let name = p.name();
        if let Some(s) = summarize_present(reps.iter().map(|r| r.mape.get(name).copied())) {
            mape.insert(name, s);
        }
    }

    let delta_rho_ipd = match (&facility[0].ipd_bed_occupancy, &facility[1].ipd_bed_occupancy) {
        (Some(a), Some(b)) => Some(delta_rho(a.mean, b.mean)),
        _ => None,
    };

    OutcomeReport {
        scenario,
        replications: reps.len(),
        delta_rho_doc: delta_rho(
            facility[0].doctor_occupancy.mean,
            facility[1].doctor_occupancy.mean,
        ),
        delta_rho_nurse: delta_rho(
            facility[0].staff_nurse_occupancy.mean,
            facility[1].staff_nurse_occupancy.mean,
        ),
        delta_rho_ipd,
        delta_rho_lb: delta_rho(
            facility[0].labour_bed_occupancy.mean,
            facility[1].labour_bed_occupancy.mean,
        ),
        alpha: summarize_present(reps.iter().map(|r| r.alpha_pooled)),
        mean_labour_wait: summarize_present(reps.iter().map(|r| r.mean_wait_pooled)),
        mape,
        served_childbirth: col(&|r| r.served_childbirth as f64),
        diverted: col(&|r| r.diverted as f64),
        facility,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{Capacity, DayWindow, Resource, SimTime};

    #[test]
    fn occupancy_worked_values() {
        // Busy the entire window.
        assert_eq!(occupancy(1440.0, 1, 1440.0).unwrap(), 1.0);
        // Busy half the window.
        assert_eq!(occupancy(720.0, 1, 1440.0).unwrap(), 0.5);
        // Two units, one busy throughout.
        assert_eq!(occupancy(1440.0, 2, 1440.0).unwrap(), 0.5);
        assert!(occupancy(0.0, 1, 0.0).is_err());
    }

    #[test]
    fn doctor_occupancy_normalizes_over_open_hours() {
        // Hand-checked trace: doctor busy 08:00-12:00 (240 of the 480 OPD
        // minutes) in a 1440-minute day. Occupancy over open time is 0.5.
        let window = DayWindow::new(480.0, 960.0);
        let mut doc: Resource<u64> =
            Resource::with_occupancy_window("doctor", Capacity::Finite(1), window);
        doc.seize(SimTime(480.0), 1).unwrap();
        doc.release(SimTime(720.0), 1).unwrap();
        let end = SimTime(1440.0);
        let clipped = doc.windowed_busy_integral(end).unwrap();
        assert_eq!(clipped, 240.0);
        let open_minutes = window.open_measure_between(SimTime(0.0), end);
        assert_eq!(occupancy(clipped, 1, open_minutes).unwrap(), 0.5);
    }

    #[test]
    fn alpha_counts_strict_exceedances() {
        assert_eq!(
            alpha(&[130.0, 50.0, 121.0], 120.0).unwrap(),
            Some(2.0 / 3.0)
        );
        assert_eq!(alpha(&[0.0, 0.0], 120.0).unwrap(), Some(0.0));
        // Exactly at the threshold does not count.
        assert_eq!(alpha(&[120.0, 120.0, 120.0], 120.0).unwrap(), Some(0.0));
        assert_eq!(alpha(&[], 120.0).unwrap(), None);
        assert!(alpha(&[1.0], 0.0).is_err());
    }

    #[test]
    fn delta_rho_worked_values() {
        // Cross-checked against the published utilization columns.
        assert!((delta_rho(0.627, 0.658) - 4.71).abs() < 5e-3);
        assert!((delta_rho(0.470, 0.923) - 49.08).abs() < 5e-3);
        // Order-insensitive.
        assert_eq!(delta_rho(0.658, 0.627), delta_rho(0.627, 0.658));
        assert_eq!(delta_rho(0.5, 0.5), 0.0);
        assert_eq!(delta_rho(0.0, 0.0), 0.0);
    }

    #[test]
    fn mape_worked_values() {
        // Symmetric 10% errors.
        assert_eq!(mape(&[(100.0, 90.0), (200.0, 220.0)]), Some(10.0));
        assert_eq!(mape(&[(55.0, 55.0), (1.0, 1.0)]), Some(0.0));
        assert_eq!(mape(&[(100.0, 0.0)]), Some(100.0));
        // Zero actuals are excluded, not counted as zero error.
        assert_eq!(mape(&[(0.0, 50.0), (100.0, 90.0)]), Some(10.0));
        assert_eq!(mape(&[(0.0, 50.0)]), None);
        assert_eq!(mape(&[]), None);
    }

    #[test]
    fn replicate_summary_matches_t_table() {
        let s = replicate_summary(&[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(s.mean, 1.0);
        assert_eq!(s.half_width, Some(0.0));

        // Two points 0 and 2: s = sqrt(2), hw = t(0.975; 1 df) * s / sqrt(2)
        // = 12.706 from the published t-table.
        let s = replicate_summary(&[0.0, 2.0]).unwrap();
        assert_eq!(s.mean, 1.0);
        assert!((s.half_width.unwrap() - 12.706).abs() < 1e-3);

        let s = replicate_summary(&[7.5]).unwrap();
        assert_eq!(s.mean, 7.5);
        assert_eq!(s.half_width, None);

        assert!(replicate_summary(&[]).is_none());
    }

    #[test]
    fn scenario_summary_keeps_delta_rho_recomputable() {
        let rep = |lb0: f64, lb1: f64, a: f64| {
            let mut r = RepScalars::default();
            r.doctor_occ = [0.6, 0.65];
            r.staff_nurse_occ = [0.3, 0.45];
            r.ipd_occ = [Some(0.1), Some(0.2)];
            r.labour_occ = [lb0, lb1];
            r.alpha_pooled = Some(a);
            r.mean_wait_pooled = Some(100.0 * a);
            r.mape.insert("actual", 0.0);
            r.mape.insert("est", 12.0);
            r.served_childbirth = 500;
            r
        };
        let reps = vec![rep(0.34, 0.91, 0.7), rep(0.36, 0.93, 0.8)];
        let report = summarize_scenario(Mode::None, &reps);
        // Bit-exact recomputation from the published occupancy means.
        assert_eq!(
            report.delta_rho_lb,
            delta_rho(
                report.facility[0].labour_bed_occupancy.mean,
                report.facility[1].labour_bed_occupancy.mean
            )
        );
        assert_eq!(report.facility[0].labour_bed_occupancy.mean, 0.35);
        assert_eq!(report.alpha.unwrap().mean, 0.75);
        assert_eq!(report.mape["actual"].mean, 0.0);
        assert_eq!(report.mape["actual"].half_width, Some(0.0));
        assert!(!report.mape.contains_key("rst_state"));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // alpha never increases when the threshold grows.
            #[test]
            fn alpha_is_monotone_in_threshold(
                waits in proptest::collection::vec(0.0f64..500.0, 1..60),
                t1 in 1.0f64..400.0,
                bump in 0.0f64..100.0,
            ) {
                let a1 = alpha(&waits, t1).unwrap().unwrap();
                let a2 = alpha(&waits, t1 + bump).unwrap().unwrap();
                prop_assert!(a2 <= a1);
            }

            // delta_rho ignores common scaling.
            #[test]
            fn delta_rho_is_scale_invariant(
                a in 0.01f64..1.0,
                b in 0.01f64..1.0,
                c in 0.01f64..100.0,
            ) {
                let plain = delta_rho(a, b);
                let scaled = delta_rho(c * a, c * b);
                prop_assert!((plain - scaled).abs() < 1e-9);
            }

            // Occupancy stays in [0,1] for any feasible integral.
            #[test]
            fn occupancy_is_a_fraction(
                frac in 0.0f64..=1.0,
                cap in 1u32..8,
                window in 1.0f64..10_000.0,
            ) {
                let busy = frac * f64::from(cap) * window;
                let occ = occupancy(busy, cap, window).unwrap();
                prop_assert!((0.0..=1.0).contains(&occ));
            }
        }
    }
}

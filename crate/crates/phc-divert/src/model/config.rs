//! Facility configuration and its validation.

use serde::{Deserialize, Serialize};

use crate::dist::ServiceDistribution;
use crate::kernel::{CalendarError, DayWindow, ShiftCalendar};

/// When the labour bed frees after a delivery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum LabourRelease {
    /// The bed frees the moment labour service completes; the mother waits
    /// for an inpatient bed off the labour bed. Keeps the labour room an
    /// exact FIFO single server, which the clairvoyant predictor's
    /// exactness depends on.
    #[default]
    OnServiceComplete,
    /// The mother holds the labour bed until an inpatient bed is obtained
    /// (a blocking hold). Physically stricter; under inpatient-bed
    /// contention it stretches effective bed time beyond the service
    /// distribution.
    OnIpdTransfer,
}

/// All parameters of one facility.
///
/// Defaults encode the first facility's published load tuple; use
/// [`PhcConfig::phc2`] for the second (it differs only in childbirth load).
/// Interarrival fields set to `None` disable that arrival process outright
/// (used by the isolated labour-room preset; a config file can only set
/// values).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhcConfig {
    /// Mean minutes between outpatient arrivals while the OPD is open.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ia_outpatient: Option<f64>,
    /// Mean minutes between childbirth arrivals, around the clock.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ia_childbirth: Option<f64>,
    /// Mean minutes between inpatient arrivals, around the clock.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ia_inpatient: Option<f64>,
    pub n_doctors: u32,
    pub n_staff_nurses: u32,
    /// Must be 1: the delay predictors model a single-bed labour room.
    pub n_labour_beds: u32,
    pub n_ipd_beds: u32,
    /// Treat the inpatient department as unbounded (isolated-mode use).
    pub unlimited_ipd_beds: bool,
    pub doctor_consult: ServiceDistribution,
    pub opd_nurse_check: ServiceDistribution,
    pub lab_test: ServiceDistribution,
    pub pharmacy: ServiceDistribution,
    pub childbirth_assessment: ServiceDistribution,
    pub labour_service: ServiceDistribution,
    pub post_labour_stay: ServiceDistribution,
    pub inpatient_stay: ServiceDistribution,
    /// Probability an outpatient is 30 or older (sees the nurse first).
    pub p_age_30plus: f64,
    /// Probability a doctor consult refers the outpatient to the lab.
    pub p_lab: f64,
    /// OPD window offsets within the day, minutes from midnight.
    pub opd_open: f64,
    pub opd_close: f64,
    /// Nurse shift starts within the day; must begin at 0.
    pub nurse_shift_starts: Vec<f64>,
}

impl Default for PhcConfig {
    fn default() -> Self {
        Self::phc1()
    }
}

impl PhcConfig {
    /// First facility: outpatient every 4 min (open hours), childbirth
    /// every 1440 min, inpatient every 2880 min; 1 doctor, 1 staff nurse
    /// per shift, 1 labour bed, 6 inpatient beds.
    #[must_use]
    pub fn phc1() -> Self {
        PhcConfig {
            ia_outpatient: Some(4.0),
            ia_childbirth: Some(1440.0),
            ia_inpatient: Some(2880.0),
            n_doctors: 1,
            n_staff_nurses: 1,
            n_labour_beds: 1,
            n_ipd_beds: 6,
            unlimited_ipd_beds: false,
            doctor_consult: ServiceDistribution::Uniform { min: 2.0, max: 5.0 },
            opd_nurse_check: ServiceDistribution::Uniform { min: 2.0, max: 5.0 },
            lab_test: ServiceDistribution::Uniform { min: 5.0, max: 10.0 },
            pharmacy: ServiceDistribution::Uniform { min: 1.0, max: 3.0 },
            childbirth_assessment: ServiceDistribution::Deterministic { value: 10.0 },
            labour_service: ServiceDistribution::Uniform { min: 360.0, max: 600.0 },
            post_labour_stay: ServiceDistribution::Uniform { min: 1440.0, max: 2880.0 },
            inpatient_stay: ServiceDistribution::Uniform { min: 240.0, max: 1440.0 },
            p_age_30plus: 0.5,
            p_lab: 0.3,
            opd_open: 480.0,
            opd_close: 960.0,
            nurse_shift_starts: vec![0.0, 480.0, 960.0],
        }
    }

    /// Second facility: same as the first but childbirth arrivals every
    /// 720 minutes (twice the load).
    #[must_use]
    pub fn phc2() -> Self {
        PhcConfig {
            ia_childbirth: Some(720.0),
            ..Self::phc1()
        }
    }

    /// Strips the facility down to a bare labour room: no outpatients or
    /// inpatients, zero-length assessments, unbounded inpatient beds. What
    /// remains is an exact M/G/1 queue, usable as an analytic benchmark.
    pub fn isolate_labour_room(&mut self) {
        self.ia_outpatient = None;
        self.ia_inpatient = None;
        self.childbirth_assessment = ServiceDistribution::Deterministic { value: 0.0 };
        self.unlimited_ipd_beds = true;
    }

    /// Configured childbirth offered load: mean labour service over mean
    /// interarrival. `None` when childbirth arrivals are disabled.
    #[must_use]
    pub fn childbirth_offered_load(&self) -> Option<f64> {
        self.ia_childbirth
            .map(|ia| self.labour_service.mean() / ia)
    }

    /// The facility's staffing calendar; valid only after `validate`.
    pub fn calendar(&self) -> Result<ShiftCalendar, CalendarError> {
        ShiftCalendar::try_new(
            DayWindow::try_new(self.opd_open, self.opd_close)?,
            self.nurse_shift_starts.clone(),
        )
    }

    /// Collects every problem with this facility's parameters, prefixed
    /// with `label` so a two-facility report reads unambiguously.
    #[must_use]
    pub fn validate(&self, label: &str) -> Vec<String> {
        let mut issues = Vec::new();
        let mut bad = |field: &str, msg: String| issues.push(format!("{label}.{field}: {msg}"));

        for (field, ia) in [
            ("ia_outpatient", self.ia_outpatient),
            ("ia_childbirth", self.ia_childbirth),
            ("ia_inpatient", self.ia_inpatient),
        ] {
            if let Some(v) = ia {
                if !(v > 0.0 && v.is_finite()) {
                    bad(field, format!("mean interarrival must be positive and finite, got {v}"));
                }
            }
        }
        if self.n_doctors == 0 {
            bad("n_doctors", "at least one doctor required".into());
        }
        if self.n_staff_nurses == 0 {
            bad("n_staff_nurses", "at least one staff nurse required".into());
        }
        if self.n_labour_beds != 1 {
            bad(
                "n_labour_beds",
                format!(
                    "must be 1 (the delay predictors model a single-bed labour room), got {}",
                    self.n_labour_beds
                ),
            );
        }
        if self.n_ipd_beds == 0 && !self.unlimited_ipd_beds {
            bad("n_ipd_beds", "at least one inpatient bed required".into());
        }
        for (field, d) in [
            ("doctor_consult", &self.doctor_consult),
            ("opd_nurse_check", &self.opd_nurse_check),
            ("lab_test", &self.lab_test),
            ("pharmacy", &self.pharmacy),
            ("childbirth_assessment", &self.childbirth_assessment),
            ("labour_service", &self.labour_service),
            ("post_labour_stay", &self.post_labour_stay),
            ("inpatient_stay", &self.inpatient_stay),
        ] {
            if let Err(e) = d.validate() {
                bad(field, e.to_string());
            }
        }
        if self.labour_service.mean() <= 0.0 {
            bad("labour_service", "mean service time must be positive".into());
        }
        for (field, p) in [("p_age_30plus", self.p_age_30plus), ("p_lab", self.p_lab)] {
            if !(0.0..=1.0).contains(&p) {
                bad(field, format!("probability must lie in [0,1], got {p}"));
            }
        }
        if let Err(e) = self.calendar() {
            bad("opd_open/opd_close/nurse_shift_starts", e.to_string());
        }
        issues
    }
}

/// Invalid configuration, with one line per offending field.
#[derive(Debug, Clone, thiserror::Error)]
#[error("invalid configuration:\n  {}", issues.join("\n  "))]
pub struct ConfigError {
    pub issues: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_tuples_match_the_published_loads() {
        let a = PhcConfig::phc1();
        assert_eq!(a.ia_outpatient, Some(4.0));
        assert_eq!(a.ia_childbirth, Some(1440.0));
        assert_eq!(a.ia_inpatient, Some(2880.0));
        assert_eq!(
            (a.n_doctors, a.n_staff_nurses, a.n_labour_beds, a.n_ipd_beds),
            (1, 1, 1, 6)
        );
        assert_eq!(
            a.labour_service,
            ServiceDistribution::Uniform { min: 360.0, max: 600.0 }
        );
        assert_eq!(
            a.post_labour_stay,
            ServiceDistribution::Uniform { min: 1440.0, max: 2880.0 }
        );
        let b = PhcConfig::phc2();
        assert_eq!(b.ia_childbirth, Some(720.0));
        assert_eq!(b.ia_outpatient, a.ia_outpatient);
        // Offered loads: 480/1440 = 1/3 and 480/720 = 2/3.
        assert!((a.childbirth_offered_load().unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((b.childbirth_offered_load().unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!(a.validate("phc1").is_empty());
        assert!(b.validate("phc2").is_empty());
    }

    #[test]
    fn validation_reports_field_paths() {
        let mut c = PhcConfig::phc1();
        c.ia_childbirth = Some(-5.0);
        c.n_labour_beds = 2;
        c.p_lab = 1.5;
        c.opd_close = 100.0;
        let issues = c.validate("phc1");
        assert_eq!(issues.len(), 4, "{issues:?}");
        assert!(issues.iter().any(|i| i.starts_with("phc1.ia_childbirth:")));
        assert!(issues.iter().any(|i| i.starts_with("phc1.n_labour_beds:")));
        assert!(issues.iter().any(|i| i.starts_with("phc1.p_lab:")));
    }

    #[test]
    fn isolation_strips_everything_but_the_labour_room() {
        let mut c = PhcConfig::phc2();
        c.isolate_labour_room();
        assert_eq!(c.ia_outpatient, None);
        assert_eq!(c.ia_inpatient, None);
        assert_eq!(c.ia_childbirth, Some(720.0));
        assert!(c.unlimited_ipd_beds);
        assert_eq!(
            c.childbirth_assessment,
            ServiceDistribution::Deterministic { value: 0.0 }
        );
        assert!(c.validate("phc").is_empty());
    }

    #[test]
    fn serde_round_trip_with_partial_tables() {
        // A partial TOML table fills the rest from defaults.
        let parsed: PhcConfig = toml::from_str(
            r#"
            ia_childbirth = 720.0
            p_lab = 0.4
            labour_service = { kind = "uniform", min = 300.0, max = 500.0 }
            "#,
        )
        .unwrap();
        assert_eq!(parsed.ia_childbirth, Some(720.0));
        assert_eq!(parsed.p_lab, 0.4);
        assert_eq!(parsed.n_ipd_beds, 6);
        // Unknown fields are rejected with the field name in the message.
        let err = toml::from_str::<PhcConfig>("n_labor_beds = 1").unwrap_err();
        assert!(err.to_string().contains("n_labor_beds"), "{err}");
        // Round trip.
        let text = toml::to_string(&PhcConfig::phc2()).unwrap();
        assert_eq!(toml::from_str::<PhcConfig>(&text).unwrap(), PhcConfig::phc2());
    }
}

//! Daily opening windows and nurse shift boundaries.

use super::{SimTime, MINUTES_PER_DAY};

/// Invalid calendar construction.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CalendarError {
    #[error("day window must satisfy 0 <= open < close <= 1440, got [{open}, {close})")]
    BadWindow { open: f64, close: f64 },
    #[error("shift boundaries must start at 0, stay below 1440 and increase strictly: {0:?}")]
    BadShiftBounds(Vec<f64>),
}

/// A half-open daily window `[open, close)` in minutes from midnight,
/// repeated every simulated day.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DayWindow {
    open: f64,
    close: f64,
}

impl DayWindow {
    pub fn try_new(open: f64, close: f64) -> Result<Self, CalendarError> {
        if !(0.0..MINUTES_PER_DAY).contains(&open) || close <= open || close > MINUTES_PER_DAY {
            return Err(CalendarError::BadWindow { open, close });
        }
        Ok(DayWindow { open, close })
    }

    #[must_use]
    pub fn new(open: f64, close: f64) -> Self {
        Self::try_new(open, close).unwrap()
    }

    #[must_use]
    pub fn open_offset(&self) -> f64 {
        self.open
    }

    #[must_use]
    pub fn close_offset(&self) -> f64 {
        self.close
    }

    #[must_use]
    pub fn daily_length(&self) -> f64 {
        self.close - self.open
    }

    fn time_of_day(t: SimTime) -> (f64, f64) {
        let day = (t.0 / MINUTES_PER_DAY).floor();
        (day, t.0 - day * MINUTES_PER_DAY)
    }

    /// Whether the instant falls inside the window. The close boundary is
    /// exclusive: at `close` the window has already shut.
    #[must_use]
    pub fn contains(&self, t: SimTime) -> bool {
        let (_, tod) = Self::time_of_day(t);
        tod >= self.open && tod < self.close
    }

    /// Open minutes in `[0, t)`, closed form over whole days plus the
    /// clipped remainder of the current day.
    fn open_measure_from_origin(&self, t: SimTime) -> f64 {
        let (day, tod) = Self::time_of_day(t);
        let partial = (tod - self.open).clamp(0.0, self.daily_length());
        day * self.daily_length() + partial
    }

    /// Open minutes in `[from, to)`.
    #[must_use]
    pub fn open_measure_between(&self, from: SimTime, to: SimTime) -> f64 {
        debug_assert!(to.0 >= from.0);
        self.open_measure_from_origin(to) - self.open_measure_from_origin(from)
    }

    /// Earliest open instant at or after `t`.
    #[must_use]
    pub fn next_open_at(&self, t: SimTime) -> SimTime {
        if self.contains(t) {
            return t;
        }
        let (day, tod) = Self::time_of_day(t);
        if tod < self.open {
            SimTime(day * MINUTES_PER_DAY + self.open)
        } else {
            SimTime((day + 1.0) * MINUTES_PER_DAY + self.open)
        }
    }

    /// The instant reached after `open_minutes` of window-open time has
    /// elapsed from `from`, skipping closed stretches. This is how arrival
    /// processes that only run during opening hours advance their clocks.
    #[must_use]
    pub fn advance_open(&self, from: SimTime, open_minutes: f64) -> SimTime {
        debug_assert!(open_minutes >= 0.0);
        let mut t = self.next_open_at(from);
        let mut remaining = open_minutes;
        loop {
            let (day, tod) = Self::time_of_day(t);
            let until_close = self.close - tod;
            if remaining < until_close {
                return SimTime(t.0 + remaining);
            }
            remaining -= until_close;
            t = SimTime((day + 1.0) * MINUTES_PER_DAY + self.open);
        }
    }
}

/// Staffing calendar for one facility: the outpatient-department (OPD)
/// window the doctors keep, and the day's nurse shift boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftCalendar {
    opd: DayWindow,
    shift_bounds: Vec<f64>,
}

impl ShiftCalendar {
    pub fn try_new(opd: DayWindow, shift_bounds: Vec<f64>) -> Result<Self, CalendarError> {
        let increasing = shift_bounds.windows(2).all(|w| w[0] < w[1]);
        let in_range = shift_bounds
            .iter()
            .all(|b| (0.0..MINUTES_PER_DAY).contains(b));
        if shift_bounds.first() != Some(&0.0) || !increasing || !in_range {
            return Err(CalendarError::BadShiftBounds(shift_bounds));
        }
        Ok(ShiftCalendar { opd, shift_bounds })
    }

    /// The default roster: an 08:00-16:00 OPD window and three 8-hour nurse
    /// shifts starting at midnight.
    #[must_use]
    pub fn standard() -> Self {
        Self::try_new(DayWindow::new(480.0, 960.0), vec![0.0, 480.0, 960.0]).unwrap()
    }

    #[must_use]
    pub fn opd(&self) -> DayWindow {
        self.opd
    }

    #[must_use]
    pub fn is_opd_open(&self, t: SimTime) -> bool {
        self.opd.contains(t)
    }

    #[must_use]
    pub fn shifts_per_day(&self) -> usize {
        self.shift_bounds.len()
    }

    /// Index of the nurse shift covering `t` (the last boundary wraps past
    /// midnight into the first).
    #[must_use]
    pub fn shift_index_at(&self, t: SimTime) -> usize {
        let (_, tod) = DayWindow::time_of_day(t);
        match self.shift_bounds.iter().rposition(|b| *b <= tod) {
            Some(i) => i,
            None => self.shift_bounds.len() - 1,
        }
    }
}

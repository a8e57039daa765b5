//! Simulation kernel: virtual clock, event calendar, FIFO resources, shift
//! calendars and reproducible random streams.
//!
//! The kernel is deliberately generic. It moves a clock forward through a
//! time-ordered calendar of caller-defined events and keeps resource and
//! stream bookkeeping honest; all domain behaviour lives in the model layer.

mod resource;
mod shifts;
mod streams;

pub use resource::{Capacity, Resource, ResourceFault};
pub use shifts::{CalendarError, DayWindow, ShiftCalendar};
pub use streams::{derive_stream_seed, RandomStream};

use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Simulation time in minutes from the start of the run.
///
/// A thin `f64` newtype: minutes are the native unit of every distribution
/// and report in this crate, and wrapping the float keeps ordering explicit
/// (`total_cmp`) wherever the calendar needs a total order.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SimTime(pub f64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0.0);

    #[must_use]
    pub fn minutes(self) -> f64 {
        self.0
    }

    #[must_use]
    pub fn plus(self, minutes: f64) -> SimTime {
        SimTime(self.0 + minutes)
    }

    /// Whole days, e.g. for converting a horizon expressed in days.
    #[must_use]
    pub fn from_days(days: f64) -> SimTime {
        SimTime(days * MINUTES_PER_DAY)
    }
}

/// Minutes in a simulated day.
pub const MINUTES_PER_DAY: f64 = 1440.0;

/// Handle returned by [`EventEngine::schedule`]; equal to the insertion
/// sequence number, which also serves as the calendar tiebreak.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct EventId(u64);

/// Error from [`EventEngine::try_schedule`] when the requested firing time
/// lies before the current clock.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("cannot schedule event at t={requested} min: clock is already at t={clock} min")]
pub struct ScheduleInPast {
    pub requested: f64,
    pub clock: f64,
}

struct Scheduled<E> {
    at: SimTime,
    seq: u64,
    event: E,
}

// BinaryHeap is a max-heap; reverse the comparison so the earliest (time,
// seq) pair surfaces first. Ties in time fire in insertion order, which is
// what makes runs deterministic.
impl<E> Ord for Scheduled<E> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .at
            .0
            .total_cmp(&self.at.0)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl<E> PartialOrd for Scheduled<E> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<E> PartialEq for Scheduled<E> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<E> Eq for Scheduled<E> {}

/// Time-ordered event calendar plus the virtual clock.
///
/// Invariants:
/// * the clock never decreases;
/// * events with equal timestamps fire in insertion order;
/// * scheduling strictly in the past is a fault.
pub struct EventEngine<E> {
    clock: SimTime,
    next_seq: u64,
    calendar: BinaryHeap<Scheduled<E>>,
}

impl<E> EventEngine<E> {
    #[must_use]
    pub fn new() -> Self {
        EventEngine {
            clock: SimTime::ZERO,
            next_seq: 0,
            calendar: BinaryHeap::new(),
        }
    }

    #[must_use]
    pub fn now(&self) -> SimTime {
        self.clock
    }

    #[must_use]
    pub fn pending(&self) -> usize {
        self.calendar.len()
    }

    /// Schedules `event` to fire at absolute time `at`.
    ///
    /// Panics if `at` is in the past; use [`EventEngine::try_schedule`] where
    /// the caller wants to handle that as a recoverable error.
    pub fn schedule(&mut self, at: SimTime, event: E) -> EventId {
        match self.try_schedule(at, event) {
            Ok(id) => id,
            Err(e) => panic!("{e}"),
        }
    }

    pub fn try_schedule(&mut self, at: SimTime, event: E) -> Result<EventId, ScheduleInPast> {
        if at.0 < self.clock.0 {
            return Err(ScheduleInPast {
                requested: at.0,
                clock: self.clock.0,
            });
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.calendar.push(Scheduled { at, seq, event });
        Ok(EventId(seq))
    }

    /// Schedules `event` to fire `delay` minutes after the current clock.
    pub fn schedule_in(&mut self, delay: f64, event: E) -> EventId {
        let at = self.clock.plus(delay);
        self.schedule(at, event)
    }

    /// Pops the next event and advances the clock to its timestamp.
    pub fn pop_next(&mut self) -> Option<(SimTime, E)> {
        let s = self.calendar.pop()?;
        debug_assert!(s.at.0 >= self.clock.0, "calendar went backwards");
        self.clock = s.at;
        Some((s.at, s.event))
    }

    /// Pops the next event only if it fires at or before `end`.
    ///
    /// When the next event lies beyond `end` the calendar is left untouched
    /// and the clock stays put; the caller decides whether to advance it to
    /// the horizon.
    pub fn pop_before(&mut self, end: SimTime) -> Option<(SimTime, E)> {
        let fires_in_range = self
            .calendar
            .peek()
            .is_some_and(|s| s.at.0 <= end.0);
        if fires_in_range {
            self.pop_next()
        } else {
            None
        }
    }

    /// Advances the clock without firing anything, e.g. to close out busy
    /// integrals at the horizon. Past times are a fault, like scheduling.
    pub fn advance_clock_to(&mut self, at: SimTime) {
        assert!(
            at.0 >= self.clock.0,
            "cannot move clock backwards to t={} min (clock at t={} min)",
            at.0,
            self.clock.0
        );
        self.clock = at;
    }
}

impl<E> Default for EventEngine<E> {
    fn default() -> Self {
        Self::new()
    }
}

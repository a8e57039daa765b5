//! FIFO resources with busy-time accounting.

use std::collections::{HashSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use super::{DayWindow, SimTime};

/// Number of interchangeable units a resource offers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capacity {
    Finite(u32),
    /// Never queues; every seize is granted. Busy-unit counts are still
    /// tracked so throughput stats stay available.
    Infinite,
}

impl Capacity {
    #[must_use]
    pub fn as_finite(self) -> Option<u32> {
        match self {
            Capacity::Finite(n) => Some(n),
            Capacity::Infinite => None,
        }
    }
}

/// Misuse of a resource by the calling process.
///
/// These are programming errors in the model layer, not simulated outcomes,
/// so the model unwraps them; they are `Result`s here so tests can assert on
/// the exact fault.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResourceFault {
    #[error("{resource}: entity already holds a unit and cannot seize again")]
    AlreadyHolding { resource: String },
    #[error("{resource}: entity is already waiting and cannot seize again")]
    AlreadyWaiting { resource: String },
    #[error("{resource}: entity released a unit it does not hold")]
    NotHolding { resource: String },
}

/// A pool of identical units with a FIFO queue.
///
/// Invariants:
/// * grant order equals queue-join order;
/// * the queue is non-empty only while every unit is busy (a release always
///   hands the freed unit to the queue head);
/// * busy-time integrals advance on every state change, so occupancy can be
///   read at any instant without a sweep.
#[derive(Debug, Clone)]
pub struct Resource<Id: Copy + Eq + Hash + Debug> {
    name: String,
    capacity: Capacity,
    busy: u32,
    holders: HashSet<Id>,
    waiting: VecDeque<(Id, SimTime)>,
    last_change: SimTime,
    busy_integral: f64,
    /// Busy integral clipped to a daily window, for resources whose
    /// occupancy is normalized over opening hours rather than the whole day.
    window: Option<DayWindow>,
    windowed_busy_integral: f64,
}

impl<Id: Copy + Eq + Hash + Debug> Resource<Id> {
    /// A resource available around the clock.
    #[must_use]
    pub fn new(name: &str, capacity: Capacity) -> Self {
        if let Capacity::Finite(n) = capacity {
            assert!(n >= 1, "{name}: capacity must be at least one unit");
        }
        Resource {
            name: name.to_owned(),
            capacity,
            busy: 0,
            holders: HashSet::new(),
            waiting: VecDeque::new(),
            last_change: SimTime::ZERO,
            busy_integral: 0.0,
            window: None,
            windowed_busy_integral: 0.0,
        }
    }

    /// Same, but also accumulates a busy integral clipped to `window` so
    /// occupancy can be normalized over open hours only.
    #[must_use]
    pub fn with_occupancy_window(name: &str, capacity: Capacity, window: DayWindow) -> Self {
        let mut r = Self::new(name, capacity);
        r.window = Some(window);
        r
    }

    #[must_use]
    pub fn name(&self) -> &str {
        &self.name
    }

    #[must_use]
    pub fn capacity(&self) -> Capacity {
        self.capacity
    }

    #[must_use]
    pub fn busy_units(&self) -> u32 {
        self.busy
    }

    #[must_use]
    pub fn queue_len(&self) -> usize {
        self.waiting.len()
    }

    #[must_use]
    pub fn is_idle(&self) -> bool {
        self.busy == 0
    }

    #[must_use]
    pub fn holds(&self, id: Id) -> bool {
        self.holders.contains(&id)
    }

    /// Waiting entities in grant order.
    pub fn waiting_ids(&self) -> impl Iterator<Item = Id> + '_ {
        self.waiting.iter().map(|(id, _)| *id)
    }

    fn has_free_unit(&self) -> bool {
        match self.capacity {
            Capacity::Finite(n) => self.busy < n,
            Capacity::Infinite => true,
        }
    }

    fn accumulate(&mut self, now: SimTime) {
        let units = f64::from(self.busy);
        self.busy_integral += units * (now.0 - self.last_change.0);
        if let Some(w) = self.window {
            self.windowed_busy_integral += units * w.open_measure_between(self.last_change, now);
        }
        self.last_change = now;
    }

    /// Requests one unit for `id`. Returns `Ok(true)` if granted on the
    /// spot, `Ok(false)` if queued.
    pub fn seize(&mut self, now: SimTime, id: Id) -> Result<bool, ResourceFault> {
        if self.holders.contains(&id) {
            return Err(ResourceFault::AlreadyHolding {
                resource: self.name.clone(),
            });
        }
        if self.waiting.iter().any(|(w, _)| *w == id) {
            return Err(ResourceFault::AlreadyWaiting {
                resource: self.name.clone(),
            });
        }
        if self.has_free_unit() {
            self.accumulate(now);
            self.busy += 1;
            self.holders.insert(id);
            Ok(true)
        } else {
            self.waiting.push_back((id, now));
            Ok(false)
        }
    }

    /// Returns the unit held by `id`. The freed unit goes straight to the
    /// queue head; the grantee's id comes back so the caller can start its
    /// service at the same instant.
    pub fn release(&mut self, now: SimTime, id: Id) -> Result<Option<Id>, ResourceFault> {
        if !self.holders.remove(&id) {
            return Err(ResourceFault::NotHolding {
                resource: self.name.clone(),
            });
        }
        self.accumulate(now);
        self.busy -= 1;
        if let Some((next, _joined)) = self.waiting.pop_front() {
            self.busy += 1;
            self.holders.insert(next);
            Ok(Some(next))
        } else {
            Ok(None)
        }
    }

    /// Empties the queue without granting, in grant order. Used by calendars
    /// that re-dispatch waiting entities elsewhere (e.g. at closing time).
    pub fn drain_waiting(&mut self) -> Vec<(Id, SimTime)> {
        self.waiting.drain(..).collect()
    }

    /// Restarts the busy integrals, e.g. at the end of a warm-up period.
    /// Units currently busy stay busy; only the accounting resets.
    pub fn reset_stats(&mut self, now: SimTime) {
        self.last_change = now;
        self.busy_integral = 0.0;
        self.windowed_busy_integral = 0.0;
    }

    /// Busy unit-minutes accumulated since the last stats reset.
    #[must_use]
    pub fn busy_integral(&self, now: SimTime) -> f64 {
        self.busy_integral + f64::from(self.busy) * (now.0 - self.last_change.0)
    }

    /// Busy unit-minutes restricted to the occupancy window, when one is set.
    #[must_use]
    pub fn windowed_busy_integral(&self, now: SimTime) -> Option<f64> {
        let w = self.window?;
        Some(
            self.windowed_busy_integral
                + f64::from(self.busy) * w.open_measure_between(self.last_change, now),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(m: f64) -> SimTime {
        SimTime(m)
    }

    #[test]
    fn grants_follow_queue_join_order() {
        let mut r: Resource<u64> = Resource::new("bed", Capacity::Finite(1));
        assert!(r.seize(t(0.0), 1).unwrap());
        assert!(!r.seize(t(1.0), 2).unwrap());
        assert!(!r.seize(t(2.0), 3).unwrap());
        assert_eq!(r.release(t(5.0), 1).unwrap(), Some(2));
        assert_eq!(r.release(t(9.0), 2).unwrap(), Some(3));
        assert_eq!(r.release(t(12.0), 3).unwrap(), None);
        assert!(r.is_idle());
    }

    #[test]
    fn queue_only_forms_when_all_units_are_busy() {
        let mut r: Resource<u64> = Resource::new("nurse", Capacity::Finite(2));
        r.seize(t(0.0), 1).unwrap();
        r.seize(t(0.0), 2).unwrap();
        r.seize(t(0.0), 3).unwrap();
        assert_eq!(r.busy_units(), 2);
        assert_eq!(r.queue_len(), 1);
        // Releasing immediately re-grants, so busy count never dips while
        // someone waits.
        assert_eq!(r.release(t(4.0), 1).unwrap(), Some(3));
        assert_eq!(r.busy_units(), 2);
        assert_eq!(r.queue_len(), 0);
    }

    #[test]
    fn double_seize_and_stray_release_are_faults() {
        let mut r: Resource<u64> = Resource::new("lab", Capacity::Finite(1));
        r.seize(t(0.0), 7).unwrap();
        assert!(matches!(
            r.seize(t(1.0), 7),
            Err(ResourceFault::AlreadyHolding { .. })
        ));
        r.seize(t(1.0), 8).unwrap();
        assert!(matches!(
            r.seize(t(2.0), 8),
            Err(ResourceFault::AlreadyWaiting { .. })
        ));
        assert!(matches!(
            r.release(t(3.0), 9),
            Err(ResourceFault::NotHolding { .. })
        ));
    }

    #[test]
    fn busy_integral_tracks_state_changes() {
        let mut r: Resource<u64> = Resource::new("bed", Capacity::Finite(2));
        r.seize(t(0.0), 1).unwrap();
        r.seize(t(10.0), 2).unwrap();
        // 0..10: one unit busy; 10..30: two units busy.
        assert_eq!(r.busy_integral(t(30.0)), 10.0 + 2.0 * 20.0);
        r.release(t(30.0), 1).unwrap();
        assert_eq!(r.busy_integral(t(40.0)), 50.0 + 10.0);
        r.reset_stats(t(40.0));
        assert_eq!(r.busy_integral(t(45.0)), 5.0);
    }

    #[test]
    fn infinite_capacity_never_queues() {
        let mut r: Resource<u64> = Resource::new("ward", Capacity::Infinite);
        for id in 0..100 {
            assert!(r.seize(t(0.0), id).unwrap());
        }
        assert_eq!(r.busy_units(), 100);
        assert_eq!(r.queue_len(), 0);
    }
}

//! Discrete-event kernel.
//!
//! A single-threaded future-event list over a monotone millisecond clock.
//! Events are dispatched in `(fire_at, id)` order, so two events scheduled
//! for the same instant fire in the order they were scheduled. A whole
//! kernel (and the run built on it) is an owned value and may be moved to
//! another thread; independent runs can execute in parallel.

use alloc::collections::{BTreeSet, BinaryHeap};
use core::cmp::Ordering;
use core::fmt;

use crate::time::{SimDuration, SimTime};

/// Unique, strictly increasing identifier assigned at schedule time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(u64);

impl EventId {
    pub fn raw(self) -> u64 {
        self.0
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A dispatched event, handed to the run's handler.
#[derive(Debug)]
pub struct Event<P> {
    pub id: EventId,
    pub fire_at: SimTime,
    pub payload: P,
}

struct Entry<P> {
    fire_at: SimTime,
    id: u64,
    payload: P,
}

impl<P> PartialEq for Entry<P> {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
    }
}
impl<P> Eq for Entry<P> {}
impl<P> PartialOrd for Entry<P> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<P> Ord for Entry<P> {
    // reversed so the std max-heap pops the earliest (fire_at, id) first
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .fire_at
            .cmp(&self.fire_at)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Scheduling rejected (target instant lies in the past).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleInPast {
    pub now: SimTime,
    pub requested: SimTime,
}

impl fmt::Display for ScheduleInPast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "cannot schedule at {} while the clock is at {}",
            self.requested, self.now
        )
    }
}

/// A handler failure, tagged with the event that was being dispatched.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunError<E> {
    pub event_id: EventId,
    pub fire_at: SimTime,
    pub source: E,
}

impl<E: fmt::Display> fmt::Display for RunError<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "event {} at {} failed: {}",
            self.event_id, self.fire_at, self.source
        )
    }
}

/// What a completed `run_until` did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSummary {
    pub events_dispatched: u64,
    pub clock: SimTime,
}

/// The event queue and clock for one simulation run.
pub struct Kernel<P> {
    now: SimTime,
    next_id: u64,
    queue: BinaryHeap<Entry<P>>,
    pending: BTreeSet<u64>,
    dispatched: u64,
}

impl<P> Default for Kernel<P> {
    fn default() -> Self {
        Self::new()
    }
}

impl<P> Kernel<P> {
    pub fn new() -> Self {
        Kernel {
            now: SimTime::ZERO,
            next_id: 0,
            queue: BinaryHeap::new(),
            pending: BTreeSet::new(),
            dispatched: 0,
        }
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn pending_events(&self) -> usize {
        self.pending.len()
    }

    /// Enqueue `payload` to fire `delay` after the current clock.
    pub fn schedule(&mut self, delay: SimDuration, payload: P) -> EventId {
        let fire_at = self.now + delay;
        self.push(fire_at, payload)
    }

    /// Enqueue `payload` at an absolute instant, rejecting instants already
    /// in the past.
    pub fn schedule_at(&mut self, at: SimTime, payload: P) -> Result<EventId, ScheduleInPast> {
        if at < self.now {
            return Err(ScheduleInPast {
                now: self.now,
                requested: at,
            });
        }
        Ok(self.push(at, payload))
    }

    fn push(&mut self, fire_at: SimTime, payload: P) -> EventId {
        let id = self.next_id;
        self.next_id += 1;
        self.pending.insert(id);
        self.queue.push(Entry {
            fire_at,
            id,
            payload,
        });
        EventId(id)
    }

    /// Make a pending event inert. Returns `true` if it had not yet fired
    /// (or been cancelled); `false` for already-fired or unknown ids.
    pub fn cancel(&mut self, id: EventId) -> bool {
        self.pending.remove(&id.0)
    }

    /// Dispatch every event with `fire_at <= t_end`, then advance the clock
    /// to `t_end`. The handler may schedule and cancel freely; a handler
    /// error aborts the run and names the offending event.
    pub fn run_until<W, E>(
        &mut self,
        t_end: SimTime,
        world: &mut W,
        mut handler: impl FnMut(&mut Kernel<P>, &mut W, Event<P>) -> Result<(), E>,
    ) -> Result<RunSummary, RunError<E>> {
        debug_assert!(t_end >= self.now);
        let start_dispatched = self.dispatched;
        while let Some(entry) = self.pop_due(t_end) {
            self.now = entry.fire_at;
            self.dispatched += 1;
            let event = Event {
                id: EventId(entry.id),
                fire_at: entry.fire_at,
                payload: entry.payload,
            };
            let (id, fire_at) = (event.id, event.fire_at);
            handler(self, world, event).map_err(|source| RunError {
                event_id: id,
                fire_at,
                source,
            })?;
        }
        if t_end > self.now {
            self.now = t_end;
        }
        Ok(RunSummary {
            events_dispatched: self.dispatched - start_dispatched,
            clock: self.now,
        })
    }

    fn pop_due(&mut self, t_end: SimTime) -> Option<Entry<P>> {
        loop {
            if self.queue.peek().map(|e| e.fire_at > t_end).unwrap_or(true) {
                return None;
            }
            let entry = self.queue.pop().expect("peeked entry");
            // lazily drop cancelled entries
            if self.pending.remove(&entry.id) {
                return Some(entry);
            }
        }
    }
}

impl<P> fmt::Debug for Kernel<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Kernel")
            .field("now", &self.now)
            .field("pending", &self.pending.len())
            .field("dispatched", &self.dispatched)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    type NoErr = core::convert::Infallible;

    fn collect_order(kernel: &mut Kernel<u32>, t_end: u64) -> (Vec<(u64, u32)>, RunSummary) {
        let mut seen = Vec::new();
        let summary = kernel
            .run_until(
                SimTime::from_millis(t_end),
                &mut seen,
                |_, seen: &mut Vec<(u64, u32)>, ev| -> Result<(), NoErr> {
                    seen.push((ev.fire_at.as_millis(), ev.payload));
                    Ok(())
                },
            )
            .unwrap();
        (seen, summary)
    }

    #[test]
    fn schedule_is_additive() {
        let mut k = Kernel::new();
        let mut order = Vec::new();
        k.schedule(SimDuration::from_millis(10), 0u32);
        k.run_until(
            SimTime::from_millis(10),
            &mut order,
            |k, _o: &mut Vec<u64>, _ev| -> Result<(), NoErr> {
                // now() == 10; +5 must land at 15
                k.schedule(SimDuration::from_millis(5), 1u32);
                Ok(())
            },
        )
        .unwrap();
        let (seen, _) = collect_order(&mut k, 100);
        assert_eq!(seen, alloc::vec![(15, 1)]);
    }

    #[test]
    fn equal_time_events_fire_in_schedule_order() {
        let mut k = Kernel::new();
        for tag in 0..5u32 {
            k.schedule(SimDuration::from_millis(20), tag);
        }
        // a later schedule for the same instant fires after all earlier ones
        k.schedule(SimDuration::from_millis(20), 5);
        let (seen, _) = collect_order(&mut k, 20);
        let tags: Vec<u32> = seen.iter().map(|&(_, tag)| tag).collect();
        assert_eq!(tags, alloc::vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn shorter_delay_fires_first() {
        let mut k = Kernel::new();
        k.schedule(SimDuration::from_millis(3), 0u32);
        k.schedule(SimDuration::from_millis(1), 1u32);
        let (seen, _) = collect_order(&mut k, 10);
        assert_eq!(seen, alloc::vec![(1, 1), (3, 0)]);
    }

    #[test]
    fn empty_queue_advances_clock() {
        let mut k: Kernel<u32> = Kernel::new();
        let (seen, summary) = collect_order(&mut k, 100);
        assert!(seen.is_empty());
        assert_eq!(summary.events_dispatched, 0);
        assert_eq!(summary.clock, SimTime::from_millis(100));
    }

    #[test]
    fn run_until_dispatches_only_due_events() {
        let mut k = Kernel::new();
        k.schedule(SimDuration::from_millis(10), 0u32);
        k.schedule(SimDuration::from_millis(10), 1u32);
        k.schedule(SimDuration::from_millis(20), 2u32);
        let (seen, summary) = collect_order(&mut k, 15);
        assert_eq!(seen.len(), 2);
        assert_eq!(summary.clock, SimTime::from_millis(15));
        assert_eq!(k.pending_events(), 1);
    }

    #[test]
    fn cancel_pending_then_fired_then_unknown() {
        let mut k = Kernel::new();
        let a = k.schedule(SimDuration::from_millis(5), 0u32);
        let b = k.schedule(SimDuration::from_millis(6), 1u32);
        assert!(k.cancel(a));
        assert!(!k.cancel(a), "second cancel is a no-op");
        let (seen, _) = collect_order(&mut k, 10);
        assert_eq!(seen, alloc::vec![(6, 1)], "cancelled event never fires");
        assert!(!k.cancel(b), "already fired");
        assert!(!k.cancel(EventId(9999)), "unknown id");
    }

    #[test]
    fn schedule_at_rejects_past() {
        let mut k: Kernel<u32> = Kernel::new();
        let (_, _) = collect_order(&mut k, 50);
        let err = k.schedule_at(SimTime::from_millis(10), 0).unwrap_err();
        assert_eq!(err.now, SimTime::from_millis(50));
        assert_eq!(err.requested, SimTime::from_millis(10));
    }

    #[test]
    fn handler_error_names_the_event() {
        let mut k = Kernel::new();
        k.schedule(SimDuration::from_millis(1), 0u32);
        let bad = k.schedule(SimDuration::from_millis(2), 1u32);
        let err = k
            .run_until(SimTime::from_millis(10), &mut (), |_, _, ev| {
                if ev.payload == 1 {
                    Err("boom")
                } else {
                    Ok(())
                }
            })
            .unwrap_err();
        assert_eq!(err.event_id, bad);
        assert_eq!(err.fire_at, SimTime::from_millis(2));
        assert_eq!(err.source, "boom");
    }

    #[test]
    fn dispatch_times_are_monotone() {
        let mut k = Kernel::new();
        let mut stream = crate::rng::RngStream::new(42).stream("kernel-test");
        use rand::Rng;
        for tag in 0..200u32 {
            let d: u64 = stream.gen_range(0..50);
            k.schedule(SimDuration::from_millis(d), tag);
        }
        let (seen, _) = collect_order(&mut k, 100);
        assert_eq!(seen.len(), 200);
        assert!(seen.windows(2).all(|w| w[0].0 <= w[1].0));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            // oracle: a stable sort by fire time is exactly the contract
            // (time-ordered, schedule-ordered on ties)
            #[test]
            fn dispatch_order_matches_a_stable_sort(
                delays in proptest::collection::vec(0u64..100, 1..200),
            ) {
                let mut k = Kernel::new();
                for (tag, &d) in delays.iter().enumerate() {
                    k.schedule(SimDuration::from_millis(d), tag as u32);
                }
                let (seen, summary) = collect_order(&mut k, 100);
                let mut expected: Vec<(u64, u32)> = delays
                    .iter()
                    .enumerate()
                    .map(|(tag, &d)| (d, tag as u32))
                    .collect();
                expected.sort_by_key(|&(d, _)| d);
                prop_assert_eq!(seen, expected);
                prop_assert_eq!(summary.events_dispatched, delays.len() as u64);
            }

            #[test]
            fn cancelled_events_never_fire(
                delays in proptest::collection::vec(0u64..50, 1..100),
                cancel_mask in proptest::collection::vec(proptest::bool::ANY, 100),
            ) {
                let mut k = Kernel::new();
                let ids: Vec<EventId> = delays
                    .iter()
                    .enumerate()
                    .map(|(tag, &d)| k.schedule(SimDuration::from_millis(d), tag as u32))
                    .collect();
                let mut live = Vec::new();
                for (i, id) in ids.iter().enumerate() {
                    if cancel_mask[i % cancel_mask.len()] {
                        prop_assert!(k.cancel(*id));
                    } else {
                        live.push(i as u32);
                    }
                }
                let (seen, _) = collect_order(&mut k, 100);
                let mut fired: Vec<u32> = seen.iter().map(|&(_, tag)| tag).collect();
                fired.sort_unstable();
                live.sort_unstable();
                prop_assert_eq!(fired, live);
            }
        }
    }
}

//! Simulated time.
//!
//! Time is kept as an integer count of simulated milliseconds. All public
//! configuration that speaks in seconds is converted to ticks at the
//! boundary, so the kernel itself never does float arithmetic on the clock.

use core::fmt;
use core::ops::{Add, AddAssign, Sub};

/// An instant on the simulated clock, in milliseconds since run start.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SimTime(u64);

/// A non-negative span of simulated time, in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SimDuration(u64);

impl SimTime {
    pub const ZERO: SimTime = SimTime(0);

    pub const fn from_millis(ms: u64) -> Self {
        SimTime(ms)
    }

    pub const fn as_millis(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / 1000.0
    }

    /// Span from an earlier instant to this one. Panics if `earlier` is later.
    pub fn since(self, earlier: SimTime) -> SimDuration {
        SimDuration(self.0 - earlier.0)
    }
}

impl SimDuration {
    pub const ZERO: SimDuration = SimDuration(0);

    pub const fn from_millis(ms: u64) -> Self {
        SimDuration(ms)
    }

    pub const fn from_secs(s: u64) -> Self {
        SimDuration(s * 1000)
    }

    /// Convert a non-negative span in seconds, rounding to the nearest
    /// millisecond. Returns `None` for negative or non-finite input.
    pub fn try_from_secs_f64(s: f64) -> Option<Self> {
        if !(s.is_finite() && s >= 0.0) {
            return None;
        }
        // round-half-up; fine for the non-negative range we accept
        Some(SimDuration((s * 1000.0 + 0.5) as u64))
    }

    pub const fn as_millis(self) -> u64 {
        self.0
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / 1000.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl Add<SimDuration> for SimTime {
    type Output = SimTime;
    fn add(self, rhs: SimDuration) -> SimTime {
        SimTime(self.0 + rhs.0)
    }
}

impl AddAssign<SimDuration> for SimTime {
    fn add_assign(&mut self, rhs: SimDuration) {
        self.0 += rhs.0;
    }
}

impl Add for SimDuration {
    type Output = SimDuration;
    fn add(self, rhs: SimDuration) -> SimDuration {
        SimDuration(self.0 + rhs.0)
    }
}

impl AddAssign for SimDuration {
    fn add_assign(&mut self, rhs: SimDuration) {
        self.0 += rhs.0;
    }
}

impl Sub for SimDuration {
    type Output = SimDuration;
    fn sub(self, rhs: SimDuration) -> SimDuration {
        SimDuration(self.0 - rhs.0)
    }
}

impl fmt::Display for SimTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}ms", self.0)
    }
}

impl fmt::Display for SimDuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}ms", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seconds_convert_to_millis() {
        assert_eq!(
            SimDuration::try_from_secs_f64(2.5),
            Some(SimDuration::from_millis(2500))
        );
        assert_eq!(SimDuration::try_from_secs_f64(0.0), Some(SimDuration::ZERO));
        assert_eq!(SimDuration::try_from_secs_f64(-1.0), None);
        assert_eq!(SimDuration::try_from_secs_f64(f64::NAN), None);
    }

    #[test]
    fn instants_add_spans() {
        let t = SimTime::from_millis(10) + SimDuration::from_millis(5);
        assert_eq!(t, SimTime::from_millis(15));
        assert_eq!(
            t.since(SimTime::from_millis(10)),
            SimDuration::from_millis(5)
        );
    }
}

//! Time source abstraction so that budgets and phase timings work without `std`.

/// Monotonic microsecond clock.
pub trait Clock {
    fn now_us(&self) -> u64;
}

/// A clock that never advances. Budgets never expire and all timings read 0.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn now_us(&self) -> u64 {
        0
    }
}

#[cfg(feature = "std")]
mod std_clock {
    use super::Clock;
    use std::time::Instant;

    /// Wall clock measured from construction.
    #[derive(Debug, Clone, Copy)]
    pub struct SystemClock {
        origin: Instant,
    }

    impl Default for SystemClock {
        fn default() -> Self {
            Self::new()
        }
    }

    impl SystemClock {
        pub fn new() -> Self {
            SystemClock {
                origin: Instant::now(),
            }
        }
    }

    impl Clock for SystemClock {
        fn now_us(&self) -> u64 {
            self.origin.elapsed().as_micros() as u64
        }
    }
}

#[cfg(feature = "std")]
pub use std_clock::SystemClock;

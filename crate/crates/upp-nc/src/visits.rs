//! Per-thread element-visit counter for the by-sequence algorithms.
//!
//! The counter only ever grows; callers reset it before a measurement.

use std::cell::Cell;

thread_local! {
    static VISITS: Cell<u64> = const { Cell::new(0) };
}

#[inline]
pub fn visit() {
    VISITS.with(|v| v.set(v.get() + 1));
}

pub fn reset() {
    VISITS.with(|v| v.set(0));
}

pub fn count() -> u64 {
    VISITS.with(|v| v.get())
}

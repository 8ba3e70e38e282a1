//! Per-iteration solver records.

use alloc::vec::Vec;
use core::fmt;

use crate::energy::Labeling;

/// Source of elapsed wall-clock time. The core crate has no clock of its
/// own; callers with `std` pass one in.
pub trait Clock {
    /// Milliseconds since the clock was started.
    fn elapsed_ms(&self) -> f64;
}

/// Reports zero elapsed time.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed_ms(&self) -> f64 {
        0.0
    }
}

impl<C: Clock + ?Sized> Clock for &C {
    fn elapsed_ms(&self) -> f64 {
        (**self).elapsed_ms()
    }
}

/// One solver iteration.
///
/// `energy` is the energy of the current labeling after the iteration's
/// update. Methods without a multiplier report `lambda = 0`, and methods
/// without a rejection step report `accepted = true`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub lambda: f64,
    pub energy: f64,
    pub predicted: f64,
    pub actual: f64,
    pub accepted: bool,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// No further progress possible: fixed point of the method.
    Converged,
    /// Trust-region multiplier exceeded its cap after a rejected step.
    LambdaLimit,
    /// Randomized bounds made no strict progress for too many iterations.
    Stalled,
    /// Iteration cap reached.
    MaxIters,
    /// Non-iterative method.
    Direct,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::LambdaLimit => "lambda-limit",
            Termination::Stalled => "stalled",
            Termination::MaxIters => "max-iters",
            Termination::Direct => "direct",
        }
    }
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Result of an iterative solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverTrace {
    pub records: Vec<TraceRecord>,
    pub labeling: Labeling,
    pub energy: f64,
    pub termination: Termination,
}

impl SolverTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    /// Energies of the accepted iterations, in order.
    pub fn accepted_energies(&self) -> impl Iterator<Item = f64> + '_ {
        self.records.iter().filter(|r| r.accepted).map(|r| r.energy)
    }
}

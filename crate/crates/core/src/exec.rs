//! Indexed fan-out used by the optimizer and density grids.
//!
//! Work items are addressed by index and results are returned in index order,
//! so any conforming executor yields the same output as [`Serial`].

use alloc::vec::Vec;

pub trait Executor: Sync {
    /// Evaluates `f(0..count)` and returns the results in index order.
    fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Serial;

impl Executor for Serial {
    fn map<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..count).map(f).collect()
    }
}

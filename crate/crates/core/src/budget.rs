use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

/// Ceiling on the number of candidates or search nodes an exhaustive routine
/// may visit. Exceeding it is always an error, never a silent truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    limit: u64,
}

impl Budget {
    pub const DEFAULT_LIMIT: u64 = 20_000_000;
    pub const ENV_VAR: &'static str = "ALGMOD_BUDGET";

    pub fn new(limit: u64) -> Self {
        Budget { limit }
    }

    pub fn unlimited() -> Self {
        Budget { limit: u64::MAX }
    }

    /// Reads `ALGMOD_BUDGET`, falling back to the default when unset or unparsable.
    pub fn from_env() -> Self {
        std::env::var(Self::ENV_VAR)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .map(Budget::new)
            .unwrap_or_default()
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn check(&self, needed: u128) -> Result<()> {
        if needed > self.limit as u128 {
            Err(Error::BudgetExceeded {
                needed,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Self::DEFAULT_LIMIT)
    }
}

/// Node counter for searches whose size is only known as they run. Shared
/// between worker threads.
#[derive(Debug)]
pub(crate) struct NodeCounter {
    visited: AtomicU64,
    budget: Budget,
}

impl NodeCounter {
    pub(crate) fn new(budget: Budget) -> Self {
        NodeCounter {
            visited: AtomicU64::new(0),
            budget,
        }
    }

    pub(crate) fn tick(&self) -> Result<()> {
        let seen = self.visited.fetch_add(1, Ordering::Relaxed) + 1;
        if seen > self.budget.limit {
            Err(Error::BudgetExceeded {
                needed: seen as u128,
                limit: self.budget.limit,
            })
        } else {
            Ok(())
        }
    }
}

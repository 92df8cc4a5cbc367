//! Enumeration budgets shared by the exact-mode operations.

/// Default limit on enumerated basis tuples (`C(n,s)^k`).
pub const DEFAULT_TUPLE_BUDGET: u64 = 10_000_000;
/// Default limit on enumerated codewords (`2^k_in`).
pub const DEFAULT_CODEWORD_BUDGET: u64 = 1 << 20;
/// Default limit on brute-forced group elements.
pub const DEFAULT_GROUP_BUDGET: u64 = 1 << 14;

/// Name of the environment variable that overrides every budget at once.
pub const BUDGET_ENV: &str = "QFP_BUDGET";

/// Budgets for the brute-force parts of the library.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub tuples: u64,
    pub codewords: u64,
    pub group_elements: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            tuples: DEFAULT_TUPLE_BUDGET,
            codewords: DEFAULT_CODEWORD_BUDGET,
            group_elements: DEFAULT_GROUP_BUDGET,
        }
    }
}

impl Budget {
    /// Same limit for every kind of enumeration.
    pub fn uniform(limit: u64) -> Self {
        Budget {
            tuples: limit,
            codewords: limit,
            group_elements: limit,
        }
    }

    /// Defaults, overridden by `QFP_BUDGET` when it holds a positive integer.
    pub fn from_env() -> Self {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<u64>().ok())
            .filter(|&v| v > 0)
            .map(Budget::uniform)
            .unwrap_or_default()
    }
}

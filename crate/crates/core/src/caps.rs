//! Enumeration caps for the exact code paths.
//!
//! Exact up-set probabilities walk all `2^n` outcomes and the exact cover
//! solver walks a `2^h` member lattice, so both refuse inputs past a
//! configurable size instead of silently taking hours. The defaults target
//! desk-scale runs; `THRESHOLD_LAB_CAPS` or explicit construction overrides
//! them.

/// Size limits for the exact enumeration paths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Caps {
    /// Largest ground set enumerated by `prob_upset_exact` (2^n outcomes).
    pub exact_prob_n: usize,
    /// Largest minimal-member count handled by the subset-DP cover solver.
    pub dp_members: usize,
    /// Largest minimal-member count handled by branch-and-bound (coverage
    /// masks are one machine word).
    pub bnb_members: usize,
    /// Largest candidate pool expanded before dominance pruning.
    pub pool_limit: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            exact_prob_n: 22,
            dp_members: 20,
            bnb_members: 64,
            pool_limit: 2_000_000,
        }
    }
}

impl Caps {
    /// Apply overrides from a spec string like `exact_n=24,dp=22,bnb=40,pool=500000`.
    /// Unknown keys are rejected so typos do not silently keep defaults.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self, String> {
        for part in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got {part:?}"))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| format!("invalid integer in {part:?}"))?;
            match key.trim() {
                "exact_n" => self.exact_prob_n = value,
                "dp" => self.dp_members = value,
                "bnb" => self.bnb_members = value,
                "pool" => self.pool_limit = value,
                other => return Err(format!("unknown cap key {other:?}")),
            }
        }
        if self.bnb_members > 64 {
            return Err("bnb cap cannot exceed 64 (coverage masks are u64)".into());
        }
        if self.dp_members > 28 {
            return Err("dp cap cannot exceed 28 (the lattice has 2^dp states)".into());
        }
        if self.exact_prob_n > 40 {
            return Err("exact_n cap cannot exceed 40 (2^n outcomes are enumerated)".into());
        }
        Ok(self)
    }

    /// Defaults plus overrides from the `THRESHOLD_LAB_CAPS` environment
    /// variable, when set.
    pub fn from_env() -> Result<Self, String> {
        match std::env::var("THRESHOLD_LAB_CAPS") {
            Ok(spec) => Caps::default().with_overrides(&spec),
            Err(_) => Ok(Caps::default()),
        }
    }
}

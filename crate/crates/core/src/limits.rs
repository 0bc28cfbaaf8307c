//! Size guards for the exact solvers and the dialog compiler.

use std::fmt;
use std::str::FromStr;

/// Environment variable overriding [`Limits::default`], formatted as
/// `brute=<n>,states=<n>,ops=<n>` (any subset, any order).
pub const LIMITS_ENV: &str = "DIALOG_NETBENCH_LIMITS";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Upper bound on `sum_{d=0..k} |O|^d` for exhaustive enumeration.
    pub brute_plans: u64,
    /// Upper bound on reachable states times `(k + 1)` for the table-based
    /// solvers.
    pub states: u64,
    /// Upper bound on operators produced when compiling a dialog.
    pub dialog_ops: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { brute_plans: 2_000_000, states: 5_000_000, dialog_ops: 10_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LimitsParseError(pub String);

impl fmt::Display for LimitsParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "bad limits specification: {}", self.0)
    }
}

impl std::error::Error for LimitsParseError {}

impl FromStr for Limits {
    type Err = LimitsParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut limits = Limits::default();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(|| LimitsParseError(part.to_string()))?;
            let n: u64 = value.trim().parse().map_err(|_| LimitsParseError(part.to_string()))?;
            match key.trim() {
                "brute" => limits.brute_plans = n,
                "states" => limits.states = n,
                "ops" => limits.dialog_ops = n,
                _ => return Err(LimitsParseError(part.to_string())),
            }
        }
        Ok(limits)
    }
}

impl Limits {
    /// Defaults, overridden by [`LIMITS_ENV`] when it is set.
    pub fn from_env() -> Result<Self, LimitsParseError> {
        match std::env::var(LIMITS_ENV) {
            Ok(spec) => spec.parse(),
            Err(_) => Ok(Limits::default()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_subset() {
        let l: Limits = "states=10, brute=5".parse().unwrap();
        assert_eq!(l, Limits { brute_plans: 5, states: 10, dialog_ops: 10_000 });
        assert!("brute".parse::<Limits>().is_err());
        assert!("speed=3".parse::<Limits>().is_err());
        assert_eq!("".parse::<Limits>().unwrap(), Limits::default());
    }
}

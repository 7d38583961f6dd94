//! Resource limits: defaults, then `PQW_LIMITS`, then the spec document,
//! then `--limits`.

use serde::{Deserialize, Serialize};

use pqw_core::pi1::Pi1Limits;

use crate::CliError;

pub const ENV_VAR: &str = "PQW_LIMITS";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_cosets: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_relators: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_deductions: Option<usize>,
}

impl LimitOverrides {
    /// `max-cosets=K,max-relators=K,max-deductions=K`, any subset.
    pub fn parse(s: &str, source: &str) -> Result<Self, CliError> {
        let mut out = LimitOverrides::default();
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let bad = |m: &str| CliError::Validation { field: source.to_string(), message: format!("`{item}`: {m}") };
            let (key, value) = item.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            let value: usize = value.trim().replace('_', "").parse().map_err(|_| bad("not a nonnegative integer"))?;
            match key.trim() {
                "max-cosets" => out.max_cosets = Some(value),
                "max-relators" => out.max_relators = Some(value),
                "max-deductions" => out.max_deductions = Some(value),
                _ => return Err(bad("unknown limit; use max-cosets, max-relators or max-deductions")),
            }
        }
        Ok(out)
    }

    pub fn apply(&self, mut limits: Pi1Limits) -> Pi1Limits {
        if let Some(v) = self.max_cosets {
            limits.max_cosets = v;
        }
        if let Some(v) = self.max_relators {
            limits.max_relators = v;
        }
        if let Some(v) = self.max_deductions {
            limits.max_deductions = v;
        }
        limits
    }
}

pub fn resolve(
    env: Option<&str>,
    document: Option<&LimitOverrides>,
    flag: Option<&str>,
) -> Result<Pi1Limits, CliError> {
    let mut limits = Pi1Limits::default();
    if let Some(e) = env {
        limits = LimitOverrides::parse(e, ENV_VAR)?.apply(limits);
    }
    if let Some(d) = document {
        limits = d.apply(limits);
    }
    if let Some(f) = flag {
        limits = LimitOverrides::parse(f, "--limits")?.apply(limits);
    }
    Ok(limits)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let doc = LimitOverrides { max_relators: Some(7), ..Default::default() };
        let l = resolve(Some("max-cosets=10,max-relators=20"), Some(&doc), Some("max-cosets=30")).unwrap();
        assert_eq!((l.max_cosets, l.max_relators), (30, 7));
        assert_eq!(l.max_deductions, Pi1Limits::default().max_deductions);
        assert_eq!(resolve(None, None, Some("max-cosets=1_000")).unwrap().max_cosets, 1000);
    }

    #[test]
    fn rejects_garbage() {
        assert!(LimitOverrides::parse("max-cosets", "--limits").is_err());
        assert!(LimitOverrides::parse("max-cosets=-1", "--limits").is_err());
        assert!(LimitOverrides::parse("cosets=5", "--limits").is_err());
    }
}

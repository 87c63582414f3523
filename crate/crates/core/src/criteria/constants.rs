use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Where a constant's value came from.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Provenance {
    #[default]
    Configured,
    Calibrated { run_id: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "RawConstant", into = "RawConstant")]
pub struct Constant {
    pub value: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
enum Source {
    #[default]
    Configured,
    Calibrated,
}

/// Flat wire form of [`Constant`]; a missing source reads as configured.
#[derive(Serialize, Deserialize)]
struct RawConstant {
    value: f64,
    #[serde(default)]
    source: Source,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    run_id: Option<String>,
}

impl From<RawConstant> for Constant {
    fn from(raw: RawConstant) -> Self {
        let provenance = match raw.source {
            Source::Configured => Provenance::Configured,
            Source::Calibrated => Provenance::Calibrated {
                run_id: raw.run_id.unwrap_or_default(),
            },
        };
        Self {
            value: raw.value,
            provenance,
        }
    }
}

impl From<Constant> for RawConstant {
    fn from(c: Constant) -> Self {
        let (source, run_id) = match c.provenance {
            Provenance::Configured => (Source::Configured, None),
            Provenance::Calibrated { run_id } => (Source::Calibrated, Some(run_id)),
        };
        Self {
            value: c.value,
            source,
            run_id,
        }
    }
}

impl Constant {
    pub fn configured(value: f64) -> Self {
        Self {
            value,
            provenance: Provenance::Configured,
        }
    }

    pub fn calibrated(value: f64, run_id: impl Into<String>) -> Self {
        Self {
            value,
            provenance: Provenance::Calibrated { run_id: run_id.into() },
        }
    }
}

impl Default for Constant {
    fn default() -> Self {
        Self::configured(1.0)
    }
}

/// The universal constants of the criteria as explicit parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct CalibrationConstants {
    /// Existence-time constant C₀(s, α).
    #[serde(default)]
    pub c0: Constant,
    /// Operator bound of the Ḣ^s partial-sum map.
    #[serde(default)]
    pub cb: Constant,
    /// Constant of the smallness proposition's t and J formulas.
    #[serde(default)]
    pub cprop: Constant,
    /// c_* of the dynamic-cutoff uniqueness criterion.
    #[serde(default)]
    pub cstar: Constant,
    /// ε_* of the low-frequency Besov criterion.
    #[serde(default)]
    pub eps_star: Constant,
    /// Shell dissipation constant: ||Λ^αθ_j||₂² ≥ λ 2^{2αj}||θ_j||₂².
    #[serde(default)]
    pub lambda_bern: Constant,
}

impl CalibrationConstants {
    fn named(&self) -> [(&'static str, &Constant); 6] {
        [
            ("c0", &self.c0),
            ("cb", &self.cb),
            ("cprop", &self.cprop),
            ("cstar", &self.cstar),
            ("eps_star", &self.eps_star),
            ("lambda_bern", &self.lambda_bern),
        ]
    }

    pub fn problems(&self) -> Vec<String> {
        self.named()
            .iter()
            .filter(|(_, c)| !(c.value > 0.0 && c.value.is_finite()))
            .map(|(name, c)| format!("constant {name} = {} must be positive and finite", c.value))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(problems.join("; ")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_one_and_configured() {
        let c = CalibrationConstants::default();
        for (_, k) in c.named() {
            assert_eq!(k.value, 1.0);
            assert_eq!(k.provenance, Provenance::Configured);
        }
        assert!(c.validate().is_ok());
    }

    #[test]
    fn provenance_serializes_flat() {
        let k = Constant::calibrated(0.5, "run-7");
        let json = serde_json::to_string(&k).unwrap();
        assert_eq!(json, r#"{"value":0.5,"source":"calibrated","run_id":"run-7"}"#);
        let back: Constant = serde_json::from_str(&json).unwrap();
        assert_eq!(back, k);
        let bare: Constant = serde_json::from_str(r#"{"value":2.0}"#).unwrap();
        assert_eq!(bare, Constant::configured(2.0));
    }

    #[test]
    fn nonpositive_rejected() {
        let mut c = CalibrationConstants::default();
        c.cb.value = 0.0;
        c.eps_star.value = f64::NAN;
        assert_eq!(c.problems().len(), 2);
    }
}

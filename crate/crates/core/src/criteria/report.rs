use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// An f64 that survives JSON: non-finite values are written as the strings
/// `"inf"`, `"-inf"` and `"nan"`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Real(pub f64);

impl From<f64> for Real {
    fn from(v: f64) -> Self {
        Real(v)
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_finite() {
            serializer.serialize_f64(v)
        } else if v.is_nan() {
            serializer.serialize_str("nan")
        } else if v > 0.0 {
            serializer.serialize_str("inf")
        } else {
            serializer.serialize_str("-inf")
        }
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RealVisitor;

        impl Visitor<'_> for RealVisitor {
            type Value = Real;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\", \"nan\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Real, E> {
                Ok(Real(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Real, E> {
                Ok(Real(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Real, E> {
                match v {
                    "inf" => Ok(Real(f64::INFINITY)),
                    "-inf" => Ok(Real(f64::NEG_INFINITY)),
                    "nan" => Ok(Real(f64::NAN)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }

        deserializer.deserialize_any(RealVisitor)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    #[serde(rename = "1")]
    Thm1,
    #[serde(rename = "2")]
    Thm2,
    #[serde(rename = "3")]
    Thm3,
    #[serde(rename = "4")]
    Thm4,
    #[serde(rename = "5")]
    Thm5,
    #[serde(rename = "prop")]
    Prop,
}

impl TheoremId {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "1" => Some(Self::Thm1),
            "2" => Some(Self::Thm2),
            "3" => Some(Self::Thm3),
            "4" => Some(Self::Thm4),
            "5" => Some(Self::Thm5),
            "prop" => Some(Self::Prop),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Thm1 => "1",
            Self::Thm2 => "2",
            Self::Thm3 => "3",
            Self::Thm4 => "4",
            Self::Thm5 => "5",
            Self::Prop => "prop",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Holds,
    Fails,
    /// The statement never engages on the data.
    Vacuous,
    /// The data needed to decide was not recorded.
    NotMeasured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Verdict {
    pub fn new(name: &str, status: Status, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            status,
            detail: detail.into(),
        }
    }

    pub fn holds_if(name: &str, ok: bool, detail: impl Into<String>) -> Self {
        Self::new(name, if ok { Status::Holds } else { Status::Fails }, detail)
    }
}

/// Summary verdict of a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    /// Every hypothesis held and the conclusion was observed.
    Pass,
    /// Every hypothesis held and the conclusion was contradicted.
    Fail,
    /// Some hypothesis failed or never engaged.
    Vacuous,
    /// Hypotheses held but the conclusion was not measured.
    Inconclusive,
}

pub type SeriesRow = BTreeMap<String, Real>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaReport {
    pub theorem: TheoremId,
    pub inputs: BTreeMap<String, Real>,
    pub quantities: BTreeMap<String, Real>,
    #[serde(default)]
    pub series: Vec<SeriesRow>,
    pub hypotheses: Vec<Verdict>,
    pub conclusion: Option<Verdict>,
    pub outcome: Outcome,
}

impl CriteriaReport {
    pub fn new(theorem: TheoremId) -> Self {
        Self {
            theorem,
            inputs: BTreeMap::new(),
            quantities: BTreeMap::new(),
            series: Vec::new(),
            hypotheses: Vec::new(),
            conclusion: None,
            outcome: Outcome::Vacuous,
        }
    }

    pub fn input(&mut self, name: &str, v: f64) -> &mut Self {
        self.inputs.insert(name.into(), Real(v));
        self
    }

    pub fn quantity(&mut self, name: &str, v: f64) -> &mut Self {
        self.quantities.insert(name.into(), Real(v));
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.quantities.get(name).map(|r| r.0)
    }

    pub fn hypothesis(&self, name: &str) -> Option<&Verdict> {
        self.hypotheses.iter().find(|v| v.name == name)
    }

    /// Derives [`CriteriaReport::outcome`] from the verdicts.
    pub fn finish(mut self) -> Self {
        let all_hold = !self.hypotheses.is_empty() && self.hypotheses.iter().all(|v| v.status == Status::Holds);
        self.outcome = if !all_hold {
            Outcome::Vacuous
        } else {
            match self.conclusion.as_ref().map(|c| c.status) {
                Some(Status::Holds) => Outcome::Pass,
                Some(Status::Fails) => Outcome::Fail,
                Some(Status::Vacuous) => Outcome::Vacuous,
                _ => Outcome::Inconclusive,
            }
        };
        self
    }

    /// A report whose statement cannot engage at all.
    pub fn vacuous(theorem: TheoremId, reason: &str) -> Self {
        let mut r = Self::new(theorem);
        r.hypotheses.push(Verdict::new("engaged", Status::Vacuous, reason));
        r.finish()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub(crate) fn row(pairs: &[(&str, f64)]) -> SeriesRow {
    pairs.iter().map(|(k, v)| ((*k).to_string(), Real(*v))).collect()
}

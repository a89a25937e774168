//! Stable JSON schema for decomposition certificates.
//!
//! Big numbers are carried as decimal strings so values survive any JSON
//! reader without 64-bit truncation; field names are fixed and
//! locale-independent.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};

use crate::decompose::{DecompTerm, Decomposition, Method, PipelineAudit, Stage};
use crate::error::{Error, Result};
use crate::repr::BlockPower;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    #[serde(rename = "N")]
    pub target: String,
    pub base: u64,
    pub k: u32,
    pub method: Method,
    /// Total summand count, with multiplicity.
    pub count: String,
    pub terms: Vec<CertTerm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stages: Option<StageTrace>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertTerm {
    /// Block length in binary digits.
    pub n: u64,
    /// Block value, decimal.
    pub a: String,
    /// Copy count, decimal.
    pub mult: String,
    /// a * c(n), decimal.
    pub value: String,
    pub stage: Stage,
}

/// Audit trail of a pipeline run, rendered decimal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StageTrace {
    pub z: String,
    pub x: String,
    pub n: u64,
    pub r: String,
    pub greedy: Vec<u64>,
    pub coeff_numerators: Vec<String>,
    pub coeff_denominator: String,
    pub x1: String,
    pub x2: String,
    pub x3: String,
    pub x4: String,
    pub upper_ratio: f64,
}

impl Certificate {
    pub fn from_decomposition(d: &Decomposition) -> Self {
        Certificate {
            target: d.target.to_string(),
            base: d.base,
            k: d.k,
            method: d.method,
            count: d.term_count().to_string(),
            terms: d
                .terms
                .iter()
                .map(|t| CertTerm {
                    n: t.power.block_len(),
                    a: t.power.block().to_string(),
                    mult: t.multiplicity.to_string(),
                    value: t.power.value().to_string(),
                    stage: t.stage,
                })
                .collect(),
            stages: d.audit.as_ref().map(StageTrace::from_audit),
        }
    }

    /// Rebuilds the in-memory form, re-validating every block along the
    /// way; the result still needs `decompose::verify` for the resummation
    /// check.
    pub fn to_decomposition(&self) -> Result<Decomposition> {
        let target = parse_big(&self.target)?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let block = parse_big(&t.a)?;
            let power = BlockPower::new(self.base, self.k, t.n, block)?;
            let declared = parse_big(&t.value)?;
            if power.value() != declared {
                return Err(Error::domain(format!(
                    "term value {} does not match block ({}, {})",
                    t.value, t.n, t.a
                )));
            }
            terms.push(DecompTerm {
                power,
                multiplicity: parse_big(&t.mult)?,
                stage: t.stage,
            });
        }
        Ok(Decomposition {
            target,
            base: self.base,
            k: self.k,
            terms,
            method: self.method,
            audit: None,
        })
    }
}

impl StageTrace {
    fn from_audit(a: &PipelineAudit) -> Self {
        StageTrace {
            z: a.offset_z.to_string(),
            x: a.bulk_x.to_string(),
            n: a.window,
            r: a.quotient.to_string(),
            greedy: a.greedy.clone(),
            coeff_numerators: a.coeff_numerators.iter().map(BigInt::to_string).collect(),
            coeff_denominator: a.coeff_denominator.to_string(),
            x1: a.x1.to_string(),
            x2: a.x2.to_string(),
            x3: a.x3.to_string(),
            x4: a.x4.to_string(),
            upper_ratio: a.upper_ratio,
        }
    }
}

fn parse_big(s: &str) -> Result<BigUint> {
    BigUint::from_str(s).map_err(|_| Error::domain(format!("bad decimal value: {s:?}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::{decompose, verify};

    #[test]
    fn round_trip_preserves_verifiability() {
        for (n, k) in [(45u64, 2u32), (18, 2), (3549, 3), (1_000_000_007, 2)] {
            let d = decompose(&BigUint::from(n), k).unwrap();
            let cert = Certificate::from_decomposition(&d);
            let json = serde_json::to_string(&cert).unwrap();
            let back: Certificate = serde_json::from_str(&json).unwrap();
            let rebuilt = back.to_decomposition().unwrap();
            verify(&rebuilt).unwrap();
            assert_eq!(rebuilt.target, d.target);
            assert_eq!(rebuilt.term_count(), d.term_count());
        }
    }

    #[test]
    fn schema_field_names_are_stable() {
        let d = decompose(&BigUint::from(45u32), 2).unwrap();
        let cert = Certificate::from_decomposition(&d);
        let json: serde_json::Value =
            serde_json::from_str(&serde_json::to_string(&cert).unwrap()).unwrap();
        assert!(json.get("N").is_some());
        assert!(json.get("k").is_some());
        assert!(json.get("count").is_some());
        let term = &json["terms"][0];
        for key in ["n", "a", "mult", "value", "stage"] {
            assert!(term.get(key).is_some(), "missing {key}");
        }
    }

    #[test]
    fn tampered_value_field_is_rejected() {
        let d = decompose(&BigUint::from(45u32), 2).unwrap();
        let mut cert = Certificate::from_decomposition(&d);
        cert.terms[0].value = "46".into();
        assert!(cert.to_decomposition().is_err());
    }
}

//! Versioned JSON report.
//!
//! Everything except `digest` and `timings` is hashed. Two runs with the
//! same configuration therefore produce the same digest and the same bytes
//! outside the `timings` object.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub const SCHEMA: &str = "boxaffine/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub schema: String,
    pub content: Content,
    /// Hex SHA-256 of the canonical JSON of `[schema, content]`.
    pub digest: String,
    /// Wall-clock milliseconds per stage; not covered by the digest.
    pub timings: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Content {
    pub command: String,
    pub units: Units,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigEcho>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<LevelRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub agreement: Option<Agreement>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<Convergence>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub derivatives: Option<Derivatives>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation: Option<Vec<CriterionRecord>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    pub mass: String,
    pub energy: String,
    pub length: String,
}

impl Default for Units {
    fn default() -> Self {
        Self {
            mass: "2m = 1".into(),
            energy: "hbar^2/b^2 for the boxes, hbar for half-ho; dimensionless when b = hbar = 1".into(),
            length: "b for the boxes, sqrt(hbar) for half-ho".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigEcho {
    pub model: String,
    pub b: f64,
    pub hbar: f64,
    #[serde(rename = "W")]
    pub w: f64,
    pub levels: usize,
    pub basis_size: usize,
    pub grid_size: usize,
    pub tol: f64,
    pub method: String,
}

impl From<&RunConfig> for ConfigEcho {
    fn from(c: &RunConfig) -> Self {
        Self {
            model: c.model_name.as_str().into(),
            b: c.b,
            hbar: c.hbar,
            w: c.w,
            levels: c.levels,
            basis_size: c.basis_size,
            grid_size: c.grid_size,
            tol: c.tol,
            method: c.method.as_str().into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelRecord {
    pub index: usize,
    pub energy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parity: Option<String>,
    pub node_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_exponent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rayleigh_ritz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shooting: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Agreement {
    pub threshold: f64,
    pub max_relative_delta: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Convergence {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rayleigh_ritz: Option<BasisSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shooting: Option<GridSweep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSweep {
    pub sizes: Vec<usize>,
    /// `energies[i][k]`: level `k` with basis size `sizes[i]`.
    pub energies: Vec<Vec<f64>>,
    pub nonincreasing: bool,
    pub final_relative_change: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSweep {
    pub grid_sizes: Vec<usize>,
    pub energies: Vec<Vec<f64>>,
    /// Per level, `log2` of successive difference ratios; `null` when the
    /// differences are at rounding level.
    pub observed_order: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointTerm {
    pub location: f64,
    pub coefficient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingRow {
    pub h: f64,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Derivatives {
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    pub deltas: Vec<PointTerm>,
    pub delta_primes: Vec<PointTerm>,
    pub l2_finite: bool,
    /// Present only when finite.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l2_norm_squared: Option<f64>,
    pub scaling: Vec<ScalingRow>,
    pub slope: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriterionRecord {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

pub fn digest(schema: &str, content: &Content) -> String {
    let bytes = serde_json::to_vec(&(schema, content)).expect("report content serializes");
    hex::encode(Sha256::digest(&bytes))
}

impl Report {
    pub fn new(content: Content, timings: BTreeMap<String, f64>) -> Self {
        let digest = digest(SCHEMA, &content);
        Self {
            schema: SCHEMA.into(),
            content,
            digest,
            timings,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Parses and checks a report: known keys only, current schema, a digest
/// matching the content, and ascending energies.
pub fn validate_report(text: &str) -> Result<Report, String> {
    let report: Report = serde_json::from_str(text).map_err(|e| e.to_string())?;
    if report.schema != SCHEMA {
        return Err(format!("schema is {:?}, expected {SCHEMA:?}", report.schema));
    }
    let expect = digest(&report.schema, &report.content);
    if report.digest != expect {
        return Err(format!("digest {} does not match content ({expect})", report.digest));
    }
    if report.content.levels.windows(2).any(|w| w[1].energy < w[0].energy) {
        return Err("level energies are not ascending".into());
    }
    Ok(report)
}

/// The report text with the `timings` object removed, i.e. the part that
/// is byte-identical across runs of the same configuration.
pub fn hashed_region(text: &str) -> Result<String, String> {
    let mut value: serde_json::Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
    value
        .as_object_mut()
        .ok_or("report is not a JSON object")?
        .remove("timings");
    serde_json::to_string(&value).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let content = Content {
            command: "spectrum".into(),
            units: Units::default(),
            config: None,
            levels: vec![
                LevelRecord {
                    index: 0,
                    energy: 1.0,
                    parity: Some("even".into()),
                    node_count: 0,
                    boundary_exponent: None,
                    rayleigh_ritz: Some(1.0),
                    shooting: None,
                    relative_delta: None,
                },
                LevelRecord {
                    index: 1,
                    energy: 2.0,
                    parity: Some("odd".into()),
                    node_count: 1,
                    boundary_exponent: None,
                    rayleigh_ritz: Some(2.0),
                    shooting: None,
                    relative_delta: None,
                },
            ],
            agreement: None,
            convergence: None,
            derivatives: None,
            validation: None,
        };
        Report::new(content, BTreeMap::from([("total_ms".to_string(), 1.5)]))
    }

    #[test]
    fn round_trip_validates() {
        let r = sample();
        assert_eq!(validate_report(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn timings_do_not_change_digest() {
        let a = sample();
        let mut b = sample();
        b.timings.insert("total_ms".into(), 99.0);
        assert_eq!(a.digest, b.digest);
        assert_eq!(hashed_region(&a.to_json()).unwrap(), hashed_region(&b.to_json()).unwrap());
    }

    #[test]
    fn rejects_tampering() {
        let r = sample();
        let text = r.to_json();
        assert!(validate_report(&text.replace("\"energy\": 2.0", "\"energy\": 2.5")).is_err());
        assert!(validate_report(&text.replace("boxaffine/1", "boxaffine/2")).is_err());
        let extra = text.replacen('{', "{\"extra\": 1, ", 1);
        assert!(validate_report(&extra).unwrap_err().contains("unknown field"));
    }

    #[test]
    fn rejects_descending_levels() {
        let mut r = sample();
        r.content.levels.swap(0, 1);
        let r = Report::new(r.content, r.timings);
        assert!(validate_report(&r.to_json()).unwrap_err().contains("ascending"));
    }

    proptest::proptest! {
        #[test]
        fn any_finite_energies_round_trip(mut es in proptest::collection::vec(-1e300f64..1e300, 1..12), t in 0.0f64..1e6) {
            es.sort_by(f64::total_cmp);
            let mut r = sample();
            r.content.levels = es
                .iter()
                .enumerate()
                .map(|(k, &e)| LevelRecord {
                    index: k,
                    energy: e,
                    parity: None,
                    node_count: k,
                    boundary_exponent: Some(e / 3.0),
                    rayleigh_ritz: Some(e),
                    shooting: Some(e * (1.0 + f64::EPSILON)),
                    relative_delta: Some(f64::EPSILON),
                })
                .collect();
            let r = Report::new(r.content, BTreeMap::from([("total_ms".to_string(), t)]));
            proptest::prop_assert_eq!(validate_report(&r.to_json()).unwrap(), r);
        }
    }
}

//! Raw serde types mirroring the on-disk instance format.
//!
//! The file format is a JSON object with keys `items`, `platforms`, `edges`
//! (arrays of `[item, platform]` pairs), `platform_quota`, `item_quota`,
//! `platform_classes` / `item_classes`, and an optional `edge_weight` array of
//! `{"edge": [item, platform], "weight": w}` entries where `w` is an integer
//! or an exact `"p/q"` string. Unknown keys are rejected.

use super::{Instance, Owner};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawInstance {
    pub items: Vec<String>,
    pub platforms: Vec<String>,
    pub edges: Vec<(String, String)>,
    #[serde(default)]
    pub platform_quota: BTreeMap<String, i64>,
    #[serde(default)]
    pub item_quota: BTreeMap<String, i64>,
    #[serde(default)]
    pub platform_classes: Vec<RawClass>,
    #[serde(default)]
    pub item_classes: Vec<RawClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_weight: Option<Vec<RawWeight>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawClass {
    pub id: String,
    pub owner: String,
    pub members: Vec<(String, String)>,
    pub quota: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawWeight {
    pub edge: (String, String),
    pub weight: RawRatio,
}

/// An exact nonnegative rational: either a JSON integer or a `"p/q"` string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawRatio {
    Int(i64),
    Text(String),
}

impl RawRatio {
    pub fn to_rational(&self) -> Result<Rational64, String> {
        match self {
            RawRatio::Int(n) => Ok(Rational64::from_integer(*n)),
            RawRatio::Text(s) => {
                let parse = |t: &str| t.trim().parse::<i64>().map_err(|_| s.clone());
                match s.split_once('/') {
                    Some((num, den)) => {
                        let num = parse(num)?;
                        let den = parse(den)?;
                        if den == 0 {
                            return Err(s.clone());
                        }
                        Ok(Rational64::new(num, den))
                    }
                    None => Ok(Rational64::from_integer(parse(s)?)),
                }
            }
        }
    }

    pub fn from_rational(r: Rational64) -> RawRatio {
        if r.is_integer() {
            RawRatio::Int(r.to_integer())
        } else {
            RawRatio::Text(format!("{}/{}", r.numer(), r.denom()))
        }
    }
}

impl RawWeight {
    pub fn item(&self) -> &str {
        &self.edge.0
    }

    pub fn platform(&self) -> &str {
        &self.edge.1
    }
}

impl Instance {
    /// Canonical raw form: all quotas materialized, class members sorted by
    /// edge id. `from_raw(to_raw(inst))` reproduces `inst` exactly.
    pub fn to_raw(&self) -> RawInstance {
        let edge_pair = |e: usize| {
            let (a, p) = self.edge_names(e);
            (a.to_string(), p.to_string())
        };
        let class_raw = |c: &super::ClassConstraint| RawClass {
            id: c.id.clone(),
            owner: match c.owner {
                Owner::Item(i) => self.items()[i].clone(),
                Owner::Platform(p) => self.platforms()[p].clone(),
            },
            members: c.members.iter().map(|&e| edge_pair(e)).collect(),
            quota: c.quota as i64,
        };
        RawInstance {
            items: self.items().to_vec(),
            platforms: self.platforms().to_vec(),
            edges: (0..self.n_edges()).map(edge_pair).collect(),
            platform_quota: self
                .platforms()
                .iter()
                .enumerate()
                .map(|(p, name)| (name.clone(), self.platform_quota(p) as i64))
                .collect(),
            item_quota: self
                .items()
                .iter()
                .enumerate()
                .map(|(i, name)| (name.clone(), self.item_quota(i) as i64))
                .collect(),
            platform_classes: self.platform_classes().iter().map(class_raw).collect(),
            item_classes: self.item_classes().iter().map(class_raw).collect(),
            edge_weight: if self.is_weighted() {
                Some(
                    (0..self.n_edges())
                        .map(|e| RawWeight {
                            edge: edge_pair(e),
                            weight: RawRatio::from_rational(self.weight(e)),
                        })
                        .collect(),
                )
            } else {
                None
            },
        }
    }
}

//! JSON documents for instances and packings.
//!
//! Every rational is a string, either `p/q` or a decimal, parsed exactly.
//! Emitted documents use the canonical `p/q` form so that parsing and
//! re-emitting is the identity.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Bin, GeometryError, Packing, Placement, Square};
use crate::scalar::Scalar;
use crate::schedule::{ScheduleError, ScheduleSpec, ThresholdSchedule};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("duplicate item id `{0}`")]
    DuplicateId(String),
    #[error("placement refers to unknown item `{0}`")]
    UnknownItem(String),
    #[error("no epsilon given")]
    MissingEpsilon,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinDoc {
    pub w: Scalar,
    pub h: Scalar,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ItemDoc {
    pub id: String,
    pub side: Scalar,
    pub profit: Scalar,
}

/// An instance file as written on disk.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub bin: BinDoc,
    pub items: Vec<ItemDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Scalar>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleSpec>,
}

/// A validated instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub bin: Bin,
    pub items: Vec<Square>,
    pub epsilon: Option<Scalar>,
    pub schedule: Option<ScheduleSpec>,
}

impl Instance {
    pub fn new(bin: Bin, items: Vec<Square>) -> Result<Self, FormatError> {
        let mut seen = HashSet::new();
        for s in &items {
            if !seen.insert(s.id.as_str()) {
                return Err(FormatError::DuplicateId(s.id.clone()));
            }
        }
        Ok(Instance { bin, items, epsilon: None, schedule: None })
    }

    pub fn from_doc(doc: InstanceDoc) -> Result<Self, FormatError> {
        let bin = Bin::new(doc.bin.w, doc.bin.h)?;
        let items = doc
            .items
            .into_iter()
            .map(|d| Square::new(d.id, d.side, d.profit))
            .collect::<Result<Vec<_>, _>>()?;
        let mut inst = Instance::new(bin, items)?;
        if let Some(spec) = &doc.schedule {
            check_schedule_spec(spec)?;
        }
        if let Some(e) = &doc.epsilon {
            ThresholdSchedule::paper(e.clone())?;
        }
        inst.epsilon = doc.epsilon;
        inst.schedule = doc.schedule;
        Ok(inst)
    }

    pub fn to_doc(&self) -> InstanceDoc {
        InstanceDoc {
            bin: BinDoc { w: self.bin.width.clone(), h: self.bin.height.clone() },
            items: self
                .items
                .iter()
                .map(|s| ItemDoc { id: s.id.clone(), side: s.side.clone(), profit: s.profit.clone() })
                .collect(),
            epsilon: self.epsilon.clone(),
            schedule: self.schedule.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_doc()).expect("instance serializes");
        s.push('\n');
        s
    }

    /// The schedule for this instance; `epsilon` overrides the file's value.
    pub fn threshold_schedule(&self, epsilon: Option<&Scalar>) -> Result<ThresholdSchedule, FormatError> {
        let eps = epsilon.or(self.epsilon.as_ref()).ok_or(FormatError::MissingEpsilon)?;
        Ok(ThresholdSchedule::from_spec(eps.clone(), self.schedule.as_ref())?)
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    Instance::from_doc(doc)
}

fn check_schedule_spec(spec: &ScheduleSpec) -> Result<(), FormatError> {
    // validated against a placeholder epsilon; the real one may come later
    ThresholdSchedule::scaled(Scalar::ratio(1, 2), spec.base.clone(), spec.growth)?;
    Ok(())
}

/// Parses a schedule override file, `{"base": r, "growth": k}`.
pub fn parse_schedule_spec(text: &str) -> Result<ScheduleSpec, FormatError> {
    let spec: ScheduleSpec = serde_json::from_str(text)?;
    check_schedule_spec(&spec)?;
    Ok(spec)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlacementDoc {
    pub id: String,
    pub x: Scalar,
    pub y: Scalar,
}

/// A packing file: placements by item id plus a summary of the run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PackingDoc {
    pub placements: Vec<PlacementDoc>,
    pub profit: Scalar,
    pub feasible: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithm: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<String>,
    /// `optimal` or `incomplete` for the exact solvers.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<String>,
}

impl PackingDoc {
    pub fn from_packing(packing: &Packing) -> Self {
        PackingDoc {
            placements: packing
                .placements
                .iter()
                .map(|p| PlacementDoc { id: p.square.id.clone(), x: p.x.clone(), y: p.y.clone() })
                .collect(),
            profit: packing.profit(),
            feasible: packing.is_feasible(),
            algorithm: None,
            branch: None,
            status: None,
        }
    }

    /// Resolves ids against `instance`. Feasibility is not checked.
    pub fn to_packing(&self, instance: &Instance) -> Result<Packing, FormatError> {
        let by_id: HashMap<&str, &Square> = instance.items.iter().map(|s| (s.id.as_str(), s)).collect();
        let placements = self
            .placements
            .iter()
            .map(|p| {
                let sq = by_id.get(p.id.as_str()).ok_or_else(|| FormatError::UnknownItem(p.id.clone()))?;
                Ok(Placement::new((*sq).clone(), p.x.clone(), p.y.clone()))
            })
            .collect::<Result<Vec<_>, FormatError>>()?;
        Ok(Packing::new(instance.bin.clone(), placements))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("packing serializes");
        s.push('\n');
        s
    }
}

pub fn parse_packing_doc(text: &str) -> Result<PackingDoc, FormatError> {
    Ok(serde_json::from_str(text)?)
}

pub fn parse_packing(text: &str, instance: &Instance) -> Result<Packing, FormatError> {
    parse_packing_doc(text)?.to_packing(instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    const EXAMPLE: &str = r#"{
        "bin": {"w": "1", "h": "1"},
        "items": [
            {"id": "a", "side": "0.6", "profit": "10"},
            {"id": "b", "side": "1/2", "profit": "6"}
        ],
        "epsilon": "1/8",
        "schedule": {"base": "1/4", "growth": 3}
    }"#;

    #[test]
    fn instance_round_trip() {
        let inst = parse_instance(EXAMPLE).unwrap();
        assert_eq!(inst.items[0].side, q("3/5"));
        let text = inst.to_json();
        assert!(text.contains("\"3/5\""));
        let again = parse_instance(&text).unwrap();
        assert_eq!(again, inst);
        assert_eq!(again.to_json(), text);
        let s = inst.threshold_schedule(None).unwrap();
        assert_eq!(s.base(), &q("1/4"));
    }

    #[test]
    fn rejects_bad_instances() {
        let dup = r#"{"bin":{"w":"1","h":"1"},"items":[{"id":"a","side":"1/2","profit":"1"},{"id":"a","side":"1/2","profit":"1"}]}"#;
        assert!(matches!(parse_instance(dup), Err(FormatError::DuplicateId(_))));
        let neg = r#"{"bin":{"w":"1","h":"1"},"items":[{"id":"a","side":"-1/2","profit":"1"}]}"#;
        assert!(matches!(parse_instance(neg), Err(FormatError::Geometry(_))));
        let float = r#"{"bin":{"w":1,"h":"1"},"items":[]}"#;
        assert!(matches!(parse_instance(float), Err(FormatError::Json(_))));
        let extra = r#"{"bin":{"w":"1","h":"1"},"items":[],"x":1}"#;
        assert!(parse_instance(extra).is_err());
        let eps = r#"{"bin":{"w":"1","h":"1"},"items":[],"epsilon":"2"}"#;
        assert!(matches!(parse_instance(eps), Err(FormatError::Schedule(_))));
        let inst = parse_instance(r#"{"bin":{"w":"1","h":"1"},"items":[]}"#).unwrap();
        assert!(matches!(inst.threshold_schedule(None), Err(FormatError::MissingEpsilon)));
    }

    #[test]
    fn packing_round_trip() {
        let inst = parse_instance(EXAMPLE).unwrap();
        let text = r#"{"placements":[{"id":"a","x":"0","y":"0"}],"profit":"10","feasible":true}"#;
        let p = parse_packing(text, &inst).unwrap();
        assert_eq!(p.profit(), q("10"));
        let doc = PackingDoc::from_packing(&p);
        assert_eq!(parse_packing_doc(&doc.to_json()).unwrap(), doc);
        let unknown = r#"{"placements":[{"id":"z","x":"0","y":"0"}],"profit":"0","feasible":true}"#;
        assert!(matches!(parse_packing(unknown, &inst), Err(FormatError::UnknownItem(_))));
    }

    #[test]
    fn schedule_files() {
        let s = parse_schedule_spec(r#"{"base": "0.25", "growth": 3}"#).unwrap();
        assert_eq!(s.base, q("1/4"));
        assert!(matches!(parse_schedule_spec(r#"{"base": "1", "growth": 3}"#), Err(FormatError::Schedule(_))));
        assert!(matches!(parse_schedule_spec(r#"{"base": "1/4", "growth": 1}"#), Err(FormatError::Schedule(_))));
        assert!(parse_schedule_spec(r#"{"base": "1/4", "growth": 3, "k": 1}"#).is_err());
    }
}

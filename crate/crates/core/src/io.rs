//! JSON documents for every instance kind.
//!
//! ```json
//! {"kind":"metric","n":3,"dist":[[0,1,1],[1,0,1],[1,1,0]]}
//! {"kind":"setsystem","n":2,"sets":[{"members":[0,1],"k":1}]}
//! {"kind":"dks","n":3,"weights":[[0,1,0.5]],"forced":[],"k":2}
//! {"kind":"modular","weights":[1,2]}
//! {"kind":"coverage","universe":3,"covers":[[0],[1,2]],"uweights":[1,1,2]}
//! ```
//!
//! Any document may carry a free-form `"meta"` object (generator provenance).
//! Metric documents may carry `"coords"`. Unknown fields are rejected, and
//! errors name the JSON path at fault.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dks::DksInstance;
use crate::error::{Error, Result};
use crate::metric::MetricInstance;
use crate::setsystem::{CoverSet, SetSystemInstance};
use crate::submodular::SubmodularSpec;

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    Metric(MetricInstance<f64>),
    SetSystem(SetSystemInstance),
    Dks(DksInstance<f64>),
    Submodular(SubmodularSpec<f64>),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Metric(_) => "metric",
            Instance::SetSystem(_) => "setsystem",
            Instance::Dks(_) => "dks",
            Instance::Submodular(SubmodularSpec::Modular { .. }) => "modular",
            Instance::Submodular(SubmodularSpec::Coverage(_)) => "coverage",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub instance: Instance,
    pub meta: Option<Value>,
}

impl Document {
    pub fn new(instance: Instance) -> Self {
        Self { instance, meta: None }
    }

    pub fn with_meta(instance: Instance, meta: Value) -> Self {
        Self { instance, meta: Some(meta) }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MetricDoc {
    kind: String,
    n: usize,
    dist: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coords: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetDoc {
    members: Vec<usize>,
    k: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SetSystemDoc {
    kind: String,
    n: usize,
    sets: Vec<SetDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DksDoc {
    kind: String,
    n: usize,
    weights: Vec<(usize, usize, f64)>,
    forced: Vec<usize>,
    k: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModularDoc {
    kind: String,
    weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoverageDoc {
    kind: String,
    universe: usize,
    covers: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    uweights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<Value>,
}

fn typed<D: DeserializeOwned>(value: Value) -> Result<D> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        Error::Schema(format!("at `{path}`: {}", e.into_inner()))
    })
}

/// Parses and validates a document. Metric axioms are not checked here.
pub fn parse_document(text: &str) -> Result<Document> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Schema(format!("not valid JSON: {e}")))?;
    let kind = value
        .get("kind")
        .and_then(Value::as_str)
        .ok_or_else(|| Error::Schema("at `kind`: missing or not a string".into()))?
        .to_string();
    match kind.as_str() {
        "metric" => {
            let d: MetricDoc = typed(value)?;
            if d.dist.len() != d.n {
                return Err(Error::Schema(format!("at `dist`: {} rows but n = {}", d.dist.len(), d.n)));
            }
            let mut m = MetricInstance::from_matrix(d.dist)?;
            if let Some(c) = &d.coords {
                if c.len() != d.n {
                    return Err(Error::Schema(format!("at `coords`: {} points but n = {}", c.len(), d.n)));
                }
            }
            m = m.with_coords(d.coords);
            Ok(Document { instance: Instance::Metric(m), meta: d.meta })
        }
        "setsystem" => {
            let d: SetSystemDoc = typed(value)?;
            let sets = d.sets.into_iter().map(|s| CoverSet { members: s.members, k: s.k }).collect();
            Ok(Document { instance: Instance::SetSystem(SetSystemInstance::new(d.n, sets)?), meta: d.meta })
        }
        "dks" => {
            let d: DksDoc = typed(value)?;
            Ok(Document { instance: Instance::Dks(DksInstance::new(d.n, &d.weights, d.forced, d.k)?), meta: d.meta })
        }
        "modular" => {
            let d: ModularDoc = typed(value)?;
            Ok(Document { instance: Instance::Submodular(SubmodularSpec::modular(d.weights)?), meta: d.meta })
        }
        "coverage" => {
            let d: CoverageDoc = typed(value)?;
            let spec = SubmodularSpec::coverage(d.universe, d.covers, d.uweights)?;
            Ok(Document { instance: Instance::Submodular(spec), meta: d.meta })
        }
        other => Err(Error::Schema(format!(
            "at `kind`: unknown kind `{other}`, expected metric, setsystem, dks, modular or coverage"
        ))),
    }
}

fn to_value(doc: &Document) -> Value {
    let meta = doc.meta.clone();
    let v = match &doc.instance {
        Instance::Metric(m) => serde_json::to_value(MetricDoc {
            kind: "metric".into(),
            n: m.len(),
            dist: m.to_rows(),
            coords: m.coords().map(<[Vec<f64>]>::to_vec),
            meta,
        }),
        Instance::SetSystem(s) => serde_json::to_value(SetSystemDoc {
            kind: "setsystem".into(),
            n: s.n(),
            sets: s.sets().iter().map(|c| SetDoc { members: c.members.clone(), k: c.k }).collect(),
            meta,
        }),
        Instance::Dks(d) => serde_json::to_value(DksDoc {
            kind: "dks".into(),
            n: d.n(),
            weights: d.weight_triples(),
            forced: d.forced().to_vec(),
            k: d.k(),
            meta,
        }),
        Instance::Submodular(SubmodularSpec::Modular { weights }) => serde_json::to_value(ModularDoc {
            kind: "modular".into(),
            weights: weights.clone(),
            meta,
        }),
        Instance::Submodular(SubmodularSpec::Coverage(c)) => serde_json::to_value(CoverageDoc {
            kind: "coverage".into(),
            universe: c.universe(),
            covers: c.covers().to_vec(),
            uweights: c.uweights().map(<[f64]>::to_vec),
            meta,
        }),
    };
    v.expect("instance documents always serialize")
}

/// Pretty JSON with a fixed field order.
pub fn to_json(doc: &Document) -> String {
    let mut s = serde_json::to_string_pretty(&to_value(doc)).expect("serializable");
    s.push('\n');
    s
}

pub fn load(path: impl AsRef<Path>) -> Result<Document> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_document(&text)
}

pub fn save(path: impl AsRef<Path>, doc: &Document) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_json(doc)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

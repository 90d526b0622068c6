//! Loading, saving and coercing the JSON object files.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::Value;

use dho_core::field::FieldCtx;
use dho_core::opsets::{FOpSet, OpSet, SetKind};
use dho_core::serial::{self, FamilyFile, OpSetFile, QFamilyFile, QOpSetFile};
use dho_core::spreadgeom::qdho::FFamily;
use dho_core::spreadgeom::{extract_opset, Family, FamilyKind, YChoice};

pub enum Obj {
    OpSet(OpSet, Option<FieldCtx>),
    Family(Family, Option<FieldCtx>),
    QOpSet(FOpSet),
    QFamily(FFamily, String),
}

pub fn load(path: &Path) -> Result<Obj> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let value: Value = serde_json::from_str(&text)?;
    let ty = value.get("type").and_then(Value::as_str).unwrap_or("");
    match ty {
        "opset" => {
            let file: OpSetFile = serde_json::from_value(value)?;
            let (set, field) = serial::load_opset(&file)?;
            Ok(Obj::OpSet(set, field))
        }
        "family" => {
            let file: FamilyFile = serde_json::from_value(value)?;
            let (family, field) = serial::load_family(&file)?;
            Ok(Obj::Family(family, field))
        }
        "qopset" => {
            let file: QOpSetFile = serde_json::from_value(value)?;
            Ok(Obj::QOpSet(serial::load_qopset(&file)?))
        }
        "qfamily" => {
            let file: QFamilyFile = serde_json::from_value(value)?;
            let kind = file.kind.clone();
            Ok(Obj::QFamily(serial::load_qfamily(&file)?, kind))
        }
        other => bail!("unknown object type {other:?} in {}", path.display()),
    }
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T, provenance: Option<Value>) -> Result<()> {
    let mut v = serde_json::to_value(value)?;
    if let (Some(meta), Some(obj)) = (provenance, v.as_object_mut()) {
        obj.insert("meta".into(), meta);
    }
    let text = serde_json::to_string_pretty(&v)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// A DHO-set suitable for the equivalence engine, from either an opset file
/// (must be a dhoset) or a family file (coordinatized over its split).
pub fn as_dho_set(obj: &Obj, what: &str) -> Result<OpSet> {
    match obj {
        Obj::OpSet(set, _) => {
            if set.kind != SetKind::DhoSet {
                bail!("{what}: expected a DHO-set, found a {}", set.kind.name());
            }
            Ok(set.clone())
        }
        Obj::Family(family, _) => {
            if family.kind != FamilyKind::Dho {
                bail!("{what}: expected a DHO family, found a {}", family.kind.name());
            }
            Ok(extract_opset(family, 0, YChoice::Split)?)
        }
        _ => bail!("{what}: equivalence runs on q = 2 DHO objects"),
    }
}

//! JSON object files.
//!
//! Everything is hex-encoded and field-ordered so that identical objects
//! serialize to identical bytes. Matrix rows are little-endian bit words
//! over `F_2`; over `q > 2` a row packs its entries base-`q` into the same
//! hex word (documented in the README). Operator-set files:
//!
//! ```json
//! {"type":"opset","kind":"spreadset","n":9,
//!  "field":{"p":2,"k":9,"poly":"0x203"},"gram":"trace",
//!  "ops":[{"label":"0x0","rows":["0x0", "..."]}]}
//! ```
//!
//! Family files follow the same conventions with a `space` descriptor and
//! `members` as row lists; certificates carry `phi11`/`phi12` plus the
//! twist label, with the member permutation recomputed on load.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::equiv::IsoCertificate;
use crate::field::{FieldCtx, FieldSpec};
use crate::forms::{QuadBit, SympBit};
use crate::linalg::{BitForm, BitMat, BitSubspace};
use crate::opsets::{trace_form, OpSet, SetKind};
use crate::spreadgeom::{Ambient, Family, FamilyKind};

#[derive(Debug, Error)]
pub enum SerialError {
    #[error("bad hex word: {0}")]
    BadHex(String),
    #[error("{0}")]
    Field(#[from] crate::field::FieldError),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("malformed object: {0}")]
    Malformed(String),
}

pub fn hex(v: u32) -> String {
    format!("{v:#x}")
}

pub fn unhex(s: &str) -> Result<u32, SerialError> {
    u32::from_str_radix(s.trim_start_matches("0x"), 16).map_err(|_| SerialError::BadHex(s.into()))
}

fn mat_rows(m: &BitMat) -> Vec<String> {
    m.rows().iter().map(|&r| hex(r)).collect()
}

fn mat_from_rows(n: usize, rows: &[String]) -> Result<BitMat, SerialError> {
    if rows.len() != n {
        return Err(SerialError::Malformed(format!("expected {n} rows, got {}", rows.len())));
    }
    Ok(BitMat::from_rows(n, rows.iter().map(|s| unhex(s)).collect::<Result<_, _>>()?))
}

fn space_rows(s: &BitSubspace) -> Vec<String> {
    s.rows().iter().map(|&r| hex(r)).collect()
}

// ---------------------------------------------------------------------------
// Operator sets

#[derive(Debug, Serialize, Deserialize)]
pub struct OpSetFile {
    #[serde(rename = "type")]
    pub type_: String,
    pub kind: String,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    pub gram: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gram_rows: Option<Vec<String>>,
    pub ops: Vec<OpEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct OpEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub rows: Vec<String>,
}

fn kind_name(kind: SetKind) -> &'static str {
    match kind {
        SetKind::SpreadSet => "spreadset",
        SetKind::KerdockSet => "kerdockset",
        SetKind::DhoSet => "dhoset",
    }
}

fn kind_from(name: &str) -> Result<SetKind, SerialError> {
    match name {
        "spreadset" => Ok(SetKind::SpreadSet),
        "kerdockset" => Ok(SetKind::KerdockSet),
        "dhoset" => Ok(SetKind::DhoSet),
        other => Err(SerialError::Malformed(format!("unknown set kind {other}"))),
    }
}

/// The Gram is written by name when it is the trace form of the attached
/// field (or its `1 (+) G` extension), or the dot product; anything else is
/// written out explicitly.
pub fn save_opset(set: &OpSet, field: Option<&FieldCtx>) -> OpSetFile {
    let n = set.n();
    let (gram, gram_rows) = describe_gram(&set.form, field);
    let ops = set
        .ops
        .iter()
        .enumerate()
        .map(|(i, op)| OpEntry { label: set.label_of(i).map(hex), rows: mat_rows(op) })
        .collect();
    OpSetFile {
        type_: "opset".into(),
        kind: kind_name(set.kind).into(),
        n,
        field: field.map(|f| f.spec()),
        gram,
        gram_rows,
        ops,
        meta: None,
    }
}

fn describe_gram(form: &BitForm, field: Option<&FieldCtx>) -> (String, Option<Vec<String>>) {
    let n = form.n();
    if *form == BitForm::dot(n) {
        return ("dot".into(), None);
    }
    if let Some(f) = field {
        if f.degree() as usize == n && *form == trace_form(f) {
            return ("trace".into(), None);
        }
        if f.degree() as usize + 1 == n && *form == crate::forms::ext_form(&trace_form(f)) {
            return ("ext-trace".into(), None);
        }
    }
    ("explicit".into(), Some(mat_rows(form.gram())))
}

pub fn load_opset(file: &OpSetFile) -> Result<(OpSet, Option<FieldCtx>), SerialError> {
    let n = file.n;
    let field = file.field.as_ref().map(FieldCtx::from_spec).transpose()?;
    let form = match file.gram.as_str() {
        "dot" => BitForm::dot(n),
        "trace" => trace_form(field.as_ref().ok_or_else(|| SerialError::Malformed("trace gram needs a field".into()))?),
        "ext-trace" => crate::forms::ext_form(&trace_form(
            field.as_ref().ok_or_else(|| SerialError::Malformed("ext-trace gram needs a field".into()))?,
        )),
        "explicit" => {
            let rows = file.gram_rows.as_ref().ok_or_else(|| SerialError::Malformed("explicit gram needs gram_rows".into()))?;
            BitForm::new(mat_from_rows(n, rows)?).map_err(|e| SerialError::Malformed(e.to_string()))?
        }
        other => return Err(SerialError::Malformed(format!("unknown gram {other}"))),
    };
    let mut ops = Vec::with_capacity(file.ops.len());
    let mut labels = Vec::with_capacity(file.ops.len());
    let mut all_labeled = true;
    for e in &file.ops {
        ops.push(mat_from_rows(n, &e.rows)?);
        match &e.label {
            Some(l) => labels.push(unhex(l)?),
            None => all_labeled = false,
        }
    }
    let labels = if all_labeled && !ops.is_empty() { Some(labels) } else { None };
    Ok((OpSet::new(kind_from(&file.kind)?, form, ops, labels), field))
}

// ---------------------------------------------------------------------------
// Families

#[derive(Debug, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub kind: String,
    pub dim: usize,
    pub q: u64,
    pub gram: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gram_rows: Option<Vec<String>>,
    /// "uu" | "ext" | "explicit"
    pub shape: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qrows: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prows: Option<Vec<String>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FamilyFile {
    #[serde(rename = "type")]
    pub type_: String,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    pub space: SpaceSpec,
    #[serde(rename = "splitY")]
    pub split_y: Option<Vec<String>>,
    pub members: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

fn family_kind_name(kind: FamilyKind) -> &'static str {
    match kind {
        FamilyKind::Spread => "spread",
        FamilyKind::OrthogonalSpread => "ospread",
        FamilyKind::Dho => "dho",
    }
}

fn family_kind_from(name: &str) -> Result<FamilyKind, SerialError> {
    match name {
        "spread" => Ok(FamilyKind::Spread),
        "ospread" => Ok(FamilyKind::OrthogonalSpread),
        "dho" => Ok(FamilyKind::Dho),
        other => Err(SerialError::Malformed(format!("unknown family kind {other}"))),
    }
}

pub fn save_family(family: &Family, field: Option<&FieldCtx>) -> FamilyFile {
    let dim = family.ambient.dim();
    let space = match &family.ambient {
        Ambient::Quadratic(space) => {
            // recognize the uu / ext shapes over the attached field
            let named = field.and_then(|f| {
                let tf = trace_form(f);
                if *space == QuadBit::uu(&tf) {
                    Some(("trace".to_string(), "uu"))
                } else if *space == QuadBit::extended(&tf) {
                    Some(("trace".to_string(), "ext"))
                } else {
                    None
                }
            });
            match named {
                Some((gram, shape)) => SpaceSpec {
                    kind: "Vplus".into(),
                    dim,
                    q: 2,
                    gram,
                    gram_rows: None,
                    shape: shape.into(),
                    qrows: None,
                    prows: None,
                },
                None => {
                    let (qrows, prows) = space.raw();
                    SpaceSpec {
                        kind: "Vplus".into(),
                        dim,
                        q: 2,
                        gram: "explicit".into(),
                        gram_rows: None,
                        shape: "explicit".into(),
                        qrows: Some(qrows.iter().map(|&r| hex(r)).collect()),
                        prows: Some(prows.iter().map(|&r| hex(r)).collect()),
                    }
                }
            }
        }
        Ambient::Symplectic(space) => SpaceSpec {
            kind: "symplectic".into(),
            dim,
            q: 2,
            gram: "explicit".into(),
            gram_rows: None,
            shape: "explicit".into(),
            qrows: None,
            prows: Some(space.raw().iter().map(|&r| hex(r)).collect()),
        },
    };
    FamilyFile {
        type_: "family".into(),
        kind: family_kind_name(family.kind).into(),
        field: field.map(|f| f.spec()),
        space,
        split_y: family.split_y.as_ref().map(space_rows),
        members: family.members.iter().map(space_rows).collect(),
        meta: None,
    }
}

pub fn load_family(file: &FamilyFile) -> Result<(Family, Option<FieldCtx>), SerialError> {
    let field = file.field.as_ref().map(FieldCtx::from_spec).transpose()?;
    let dim = file.space.dim;
    let ambient = match (file.space.kind.as_str(), file.space.shape.as_str()) {
        ("Vplus", "uu") => {
            let f = field.as_ref().ok_or_else(|| SerialError::Malformed("uu space needs a field".into()))?;
            Ambient::Quadratic(QuadBit::uu(&trace_form(f)))
        }
        ("Vplus", "ext") => {
            let f = field.as_ref().ok_or_else(|| SerialError::Malformed("ext space needs a field".into()))?;
            Ambient::Quadratic(QuadBit::extended(&trace_form(f)))
        }
        ("Vplus", "explicit") => {
            let qrows = file.space.qrows.as_ref().ok_or_else(|| SerialError::Malformed("explicit space needs qrows".into()))?;
            let prows = file.space.prows.as_ref().ok_or_else(|| SerialError::Malformed("explicit space needs prows".into()))?;
            let qrows: Vec<u32> = qrows.iter().map(|s| unhex(s)).collect::<Result<_, _>>()?;
            let prows: Vec<u32> = prows.iter().map(|s| unhex(s)).collect::<Result<_, _>>()?;
            Ambient::Quadratic(
                QuadBit::from_raw(dim, qrows, prows)
                    .ok_or_else(|| SerialError::Malformed("pairing is not the polarization of Q".into()))?,
            )
        }
        ("symplectic", _) => {
            let prows = file.space.prows.as_ref().ok_or_else(|| SerialError::Malformed("symplectic space needs prows".into()))?;
            let prows: Vec<u32> = prows.iter().map(|s| unhex(s)).collect::<Result<_, _>>()?;
            Ambient::Symplectic(
                SympBit::from_raw(dim, prows).ok_or_else(|| SerialError::Malformed("pairing is not alternating".into()))?,
            )
        }
        (k, s) => return Err(SerialError::Malformed(format!("unknown space {k}/{s}"))),
    };
    let parse_space = |rows: &Vec<String>| -> Result<BitSubspace, SerialError> {
        Ok(BitSubspace::from_rows(dim, rows.iter().map(|s| unhex(s)).collect::<Result<_, _>>()?))
    };
    let members = file.members.iter().map(parse_space).collect::<Result<Vec<_>, _>>()?;
    let split_y = file.split_y.as_ref().map(parse_space).transpose()?;
    Ok((Family::new(family_kind_from(&file.kind)?, ambient, members, split_y), field))
}

// ---------------------------------------------------------------------------
// Generic-field objects (q > 2): rows pack their entries base-q into one
// hex word, mirroring the bit layout at q = 2.

pub fn hex64(v: u64) -> String {
    format!("{v:#x}")
}

pub fn unhex64(s: &str) -> Result<u64, SerialError> {
    u64::from_str_radix(s.trim_start_matches("0x"), 16).map_err(|_| SerialError::BadHex(s.into()))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct QFamilyFile {
    #[serde(rename = "type")]
    pub type_: String,
    pub kind: String,
    /// The scalar field of the coordinates.
    pub qfield: FieldSpec,
    pub ambient_dim: usize,
    /// Optional quadratic structure (upper-triangular Q matrix and the
    /// pairing), rows packed base-q.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qmat: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pmat: Option<Vec<String>>,
    #[serde(rename = "splitY")]
    pub split_y: Option<Vec<String>>,
    pub members: Vec<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

use crate::linalg::{vcode, vdecode, FMat, FSubspace};
use crate::spreadgeom::qdho::FFamily;

fn fsub_rows(ctx: &FieldCtx, s: &FSubspace) -> Vec<String> {
    s.rows().iter().map(|r| hex64(vcode(r, ctx.order()))).collect()
}

fn fmat_rows(ctx: &FieldCtx, m: &FMat) -> Vec<String> {
    (0..m.n()).map(|i| hex64(vcode(m.row(i), ctx.order()))).collect()
}

fn fmat_from_rows(ctx: &FieldCtx, n: usize, rows: &[String]) -> Result<FMat, SerialError> {
    let rs: Vec<Vec<u64>> = rows
        .iter()
        .map(|s| Ok(vdecode(unhex64(s)?, ctx.order(), n)))
        .collect::<Result<_, SerialError>>()?;
    Ok(FMat::from_row_images(n, rs))
}

pub fn save_qfamily(family: &FFamily, kind: &str) -> QFamilyFile {
    let ctx = &family.ctx;
    let (qmat, pmat) = match &family.space {
        Some(space) => {
            let (qm, pm) = space.raw();
            (Some(fmat_rows(ctx, qm)), Some(fmat_rows(ctx, pm)))
        }
        None => (None, None),
    };
    QFamilyFile {
        type_: "qfamily".into(),
        kind: kind.into(),
        qfield: ctx.spec(),
        ambient_dim: family.ambient_dim,
        qmat,
        pmat,
        split_y: family.split_y.as_ref().map(|y| fsub_rows(ctx, y)),
        members: family.members.iter().map(|m| fsub_rows(ctx, m)).collect(),
        meta: None,
    }
}

pub fn load_qfamily(file: &QFamilyFile) -> Result<FFamily, SerialError> {
    let ctx = FieldCtx::from_spec(&file.qfield)?;
    let dim = file.ambient_dim;
    let parse = |rows: &Vec<String>| -> Result<FSubspace, SerialError> {
        let rs: Vec<Vec<u64>> = rows
            .iter()
            .map(|s| Ok(vdecode(unhex64(s)?, ctx.order(), dim)))
            .collect::<Result<_, SerialError>>()?;
        Ok(FSubspace::from_rows(&ctx, dim, rs))
    };
    let members = file.members.iter().map(parse).collect::<Result<Vec<_>, _>>()?;
    let split_y = file.split_y.as_ref().map(parse).transpose()?;
    let space = match (&file.qmat, &file.pmat) {
        (Some(q), Some(p)) => Some(
            crate::forms::QuadGen::from_raw(&ctx, fmat_from_rows(&ctx, dim, q)?, fmat_from_rows(&ctx, dim, p)?)
                .ok_or_else(|| SerialError::Malformed("inconsistent quadratic data".into()))?,
        ),
        _ => None,
    };
    Ok(FFamily { ctx, ambient_dim: dim, members, space, split_y })
}

#[derive(Debug, Serialize, Deserialize)]
pub struct QOpSetFile {
    #[serde(rename = "type")]
    pub type_: String,
    pub kind: String,
    /// Scalar field of the matrix entries.
    pub qfield: FieldSpec,
    /// The big field the set was built from, when there was one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldSpec>,
    pub n: usize,
    pub gram_rows: Vec<String>,
    pub ops: Vec<OpEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<serde_json::Value>,
}

pub fn save_qopset(set: &crate::opsets::FOpSet, parent: Option<&FieldCtx>) -> QOpSetFile {
    let ctx = &set.ctx;
    let q = ctx.order();
    QOpSetFile {
        type_: "qopset".into(),
        kind: kind_name(set.kind).into(),
        qfield: ctx.spec(),
        field: parent.map(|f| f.spec()),
        n: set.n(),
        gram_rows: fmat_rows(ctx, set.form.gram()),
        ops: set
            .ops
            .iter()
            .enumerate()
            .map(|(i, op)| OpEntry {
                label: set.labels.as_ref().map(|ls| hex64(vcode(&ls[i], q))),
                rows: fmat_rows(ctx, op),
            })
            .collect(),
        meta: None,
    }
}

pub fn load_qopset(file: &QOpSetFile) -> Result<crate::opsets::FOpSet, SerialError> {
    let ctx = FieldCtx::from_spec(&file.qfield)?;
    let q = ctx.order();
    let n = file.n;
    let gram = fmat_from_rows(&ctx, n, &file.gram_rows)?;
    let form = crate::linalg::FForm::new(&ctx, gram).map_err(|e| SerialError::Malformed(e.to_string()))?;
    let mut ops = Vec::new();
    let mut labels = Vec::new();
    let mut all_labeled = true;
    for e in &file.ops {
        ops.push(fmat_from_rows(&ctx, n, &e.rows)?);
        match &e.label {
            Some(l) => labels.push(vdecode(unhex64(l)?, q, n)),
            None => all_labeled = false,
        }
    }
    Ok(crate::opsets::FOpSet {
        kind: kind_from(&file.kind)?,
        ctx,
        form,
        ops,
        labels: if all_labeled { Some(labels) } else { None },
    })
}

// ---------------------------------------------------------------------------
// Certificates

pub fn save_certificate(cert: &IsoCertificate, u_label: Option<u32>) -> crate::equiv::CertificateFile {
    crate::equiv::CertificateFile {
        phi11: mat_rows(cert.map.phi11()),
        phi12: mat_rows(cert.map.phi12()),
        perm: "implicit-recomputed".into(),
        u: hex(u_label.unwrap_or(cert.u_index as u32)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::desarguesian_spreadset;
    use crate::opsets::shadow;
    use crate::spreadgeom::{lift, project_singular, subspaces_from_opset};

    #[test]
    fn opset_round_trip() {
        let f = FieldCtx::new(2, 5, None).unwrap();
        let sigma = desarguesian_spreadset(&f);
        let file = save_opset(&sigma, Some(&f));
        assert_eq!(file.gram, "trace");
        let json = serde_json::to_string_pretty(&file).unwrap();
        let parsed: OpSetFile = serde_json::from_str(&json).unwrap();
        let (back, field) = load_opset(&parsed).unwrap();
        assert!(back.same_ops(&sigma));
        assert_eq!(back.labels, sigma.labels);
        assert_eq!(field.unwrap(), f);
        // serialization is byte-stable
        let json2 = serde_json::to_string_pretty(&save_opset(&back, Some(&f))).unwrap();
        assert_eq!(json, json2);
    }

    #[test]
    fn kerdock_file_uses_ext_trace() {
        let f = FieldCtx::new(2, 3, None).unwrap();
        let sigma = desarguesian_spreadset(&f);
        let (kerdock, _) = lift(&sigma).unwrap();
        let file = save_opset(&kerdock, Some(&f));
        assert_eq!(file.gram, "ext-trace");
        let (back, _) = load_opset(&file).unwrap();
        assert!(back.same_ops(&kerdock));
    }

    #[test]
    fn family_round_trips() {
        let f = FieldCtx::new(2, 3, None).unwrap();
        let sigma = desarguesian_spreadset(&f);
        let delta = shadow(&sigma).unwrap();
        // uu-shaped DHO family
        let family = subspaces_from_opset(&delta);
        let file = save_family(&family, Some(&f));
        assert_eq!(file.space.shape, "uu");
        let (back, _) = load_family(&file).unwrap();
        assert!(back.same_members(&family));
        assert_eq!(back.split_y, family.split_y);
        // quotient family with an explicit space
        let (_, ospread) = lift(&sigma).unwrap();
        let p = ospread
            .ambient
            .quad()
            .unwrap()
            .singular_vectors()
            .find(|&v| v.count_ones() > 2)
            .unwrap();
        let (dho, _) = project_singular(&ospread, p).unwrap();
        let qfile = save_family(&dho, Some(&f));
        let (qback, _) = load_family(&qfile).unwrap();
        assert!(qback.same_members(&dho));
        assert_eq!(crate::spreadgeom::verify_dho(&qback).ok, true);
    }
}

//! Deterministic, resumable censuses of chain families.
//!
//! A census directory holds `manifest.json` (the run parameters),
//! `rows.jsonl` (one line per instance, written in parameter order) and
//! `summary.json` (pairwise classification and bound comparison). Re-running
//! with identical parameters reproduces identical bytes; `--resume` reuses
//! finished rows instead of recomputing them.

use std::collections::HashMap;
use std::path::Path;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use dho_core::equiv::{aut_order, find_isomorphism, fingerprint, SearchConfig, SearchOutcome};
use dho_core::families::{
    count_bounds, nearflag_family, nearflag_valid_coeffs, semifield_shadow_family, ChainParams,
};
use dho_core::field::{Elt, FieldCtx};
use dho_core::opsets::{verify_dho_set, verify_spread_set, OpSet};
use dho_core::serial;

const FORMAT_VERSION: u32 = 1;

pub fn run(
    family: &str,
    n: u32,
    chain: &[u32],
    coeff_field: Option<u32>,
    out: &Path,
    resume: bool,
    seed: u64,
    timeout: Option<u64>,
) -> Result<i32> {
    std::fs::create_dir_all(out)?;
    let manifest = json!({
        "format": FORMAT_VERSION,
        "tool_version": env!("CARGO_PKG_VERSION"),
        "command": {
            "census": family,
            "n": n,
            "chain": chain,
            "coeff_field": coeff_field,
        },
        "seed": seed,
        "timeout_secs": timeout,
    });
    let manifest_path = out.join("manifest.json");
    if manifest_path.exists() {
        let prev: Value = serde_json::from_str(&std::fs::read_to_string(&manifest_path)?)?;
        if prev != manifest {
            bail!("existing manifest differs; refusing to mix runs (delete {} to restart)", out.display());
        }
    } else {
        std::fs::write(&manifest_path, serde_json::to_string_pretty(&manifest)? + "\n")?;
    }

    let f = FieldCtx::new(2, n, None)?;
    let params = enumerate_params(family, &f, chain, coeff_field)?;
    eprintln!("census {family} n={n} chain={chain:?}: {} instances", params.len());

    // cached rows from a previous run
    let rows_path = out.join("rows.jsonl");
    let mut cache: HashMap<String, Value> = HashMap::new();
    if resume && rows_path.exists() {
        for line in std::fs::read_to_string(&rows_path)?.lines() {
            let v: Value = serde_json::from_str(line).context("corrupt row")?;
            if let Some(k) = v.get("param").and_then(Value::as_str) {
                cache.insert(k.to_string(), v);
            }
        }
        eprintln!("resuming with {} cached rows", cache.len());
    }

    let cfg = SearchConfig { timeout: timeout.map(Duration::from_secs), exhaustive: true };
    let mut rows: Vec<Value> = Vec::new();
    let mut sets: Vec<OpSet> = Vec::new();
    for coeffs in &params {
        let key = param_key(coeffs);
        let delta = build_instance(family, &f, n, chain, coeffs)?;
        let row = match cache.get(&key) {
            Some(v) => v.clone(),
            None => {
                let fp = fingerprint(&delta)?;
                let aut = aut_order(&delta, &cfg)?;
                let row = json!({
                    "param": key,
                    "coeffs": coeffs.iter().map(|&c| serial::hex64(c)).collect::<Vec<_>>(),
                    "verified": true,
                    "fingerprint_global": format!("{:#x}", fp.global),
                    "member_classes": fp.classes.len(),
                    "aut_order": aut.order,
                    "aut_exact": aut.exact,
                });
                // append incrementally so interrupted runs can resume
                append_row(&rows_path, &rows, &row)?;
                row
            }
        };
        rows.push(row);
        sets.push(delta);
    }
    // canonical rewrite (stable bytes independent of interruption points)
    let text: String = rows.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect();
    std::fs::write(&rows_path, text)?;

    // pairwise classification, fingerprint-gated
    let mut class_of: Vec<usize> = (0..sets.len()).collect();
    let mut pairs = Vec::new();
    let mut inconclusive = 0usize;
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            let fa = rows[i]["fingerprint_global"].as_str().unwrap();
            let fb = rows[j]["fingerprint_global"].as_str().unwrap();
            let outcome = if fa != fb {
                "inequivalent"
            } else {
                match find_isomorphism(&sets[i], &sets[j], &cfg)? {
                    SearchOutcome::Found(_) => "equivalent",
                    SearchOutcome::ProvenNone => "inequivalent",
                    SearchOutcome::Inconclusive => "inconclusive",
                }
            };
            if outcome == "equivalent" {
                let (a, b) = (root(&mut class_of, i), root(&mut class_of, j));
                if a != b {
                    class_of[b.max(a)] = a.min(b);
                }
            }
            if outcome == "inconclusive" {
                inconclusive += 1;
            }
            pairs.push(json!({"a": param_key(&params[i]), "b": param_key(&params[j]), "outcome": outcome}));
        }
    }
    let mut classes: HashMap<usize, Vec<String>> = HashMap::new();
    for i in 0..sets.len() {
        classes.entry(root(&mut class_of, i)).or_default().push(param_key(&params[i]));
    }
    let mut class_list: Vec<Vec<String>> = classes.into_values().collect();
    class_list.sort();

    let bounds = count_bounds(n as u64).ok();
    let summary = json!({
        "family": family,
        "n": n,
        "chain": chain,
        "instances": params.len(),
        "equivalence_classes": class_list.len(),
        "classes": class_list,
        "pairs": pairs,
        "inconclusive_pairs": inconclusive,
        "nearflag_bound": bounds.as_ref().map(|b| b.nearflag_bound.to_string()),
        "nearflag_bound_hypothesis_met": bounds.as_ref().map(|b| b.nearflag_hypothesis_met),
        "semifield_bound_num": bounds.as_ref().map(|b| b.semifield_bound_num.to_string()),
        "semifield_bound_den": bounds.as_ref().map(|b| b.semifield_bound_den),
    });
    std::fs::write(out.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(if inconclusive > 0 { 2 } else { 0 })
}

fn append_row(path: &Path, done: &[Value], row: &Value) -> Result<()> {
    let mut text: String = done.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect();
    text += &(serde_json::to_string(row)? + "\n");
    std::fs::write(path, text)?;
    Ok(())
}

fn root(class_of: &mut Vec<usize>, mut i: usize) -> usize {
    while class_of[i] != i {
        class_of[i] = class_of[class_of[i]];
        i = class_of[i];
    }
    i
}

fn param_key(coeffs: &[Elt]) -> String {
    coeffs.iter().map(|&c| serial::hex64(c)).collect::<Vec<_>>().join(",")
}

fn enumerate_params(family: &str, f: &FieldCtx, chain: &[u32], coeff_field: Option<u32>) -> Result<Vec<Vec<Elt>>> {
    match family {
        "nearflag" => Ok(nearflag_valid_coeffs(f, chain)?),
        "semifield" => {
            // coefficients range over the chosen subfield (or all of F*),
            // one per chain level, all nonzero
            let domain: Vec<Elt> = match coeff_field {
                Some(d) => f.subfield_elements(d)?,
                None => f.elements().collect(),
            };
            let mut out: Vec<Vec<Elt>> = vec![vec![]];
            for _ in chain {
                let mut next = Vec::new();
                for prefix in &out {
                    for &c in domain.iter().filter(|&&c| c != 0) {
                        let mut p = prefix.clone();
                        p.push(c);
                        next.push(p);
                    }
                }
                out = next;
            }
            out.sort();
            Ok(out)
        }
        other => bail!("unknown census family {other}"),
    }
}

fn build_instance(family: &str, f: &FieldCtx, n: u32, chain: &[u32], coeffs: &[Elt]) -> Result<OpSet> {
    let params = ChainParams::new(n, chain.to_vec(), coeffs.to_vec());
    let (sigma, delta) = match family {
        "nearflag" => {
            let (s, d, _) = nearflag_family(f, &params)?;
            (s, d)
        }
        "semifield" => semifield_shadow_family(f, &params)?,
        other => bail!("unknown census family {other}"),
    };
    let rep = verify_spread_set(&sigma);
    if !rep.ok {
        bail!("instance {:?} failed verification: {rep}", coeffs);
    }
    let (rep, _) = verify_dho_set(&delta);
    if !rep.ok {
        bail!("instance {:?} shadow failed verification: {rep}", coeffs);
    }
    Ok(delta)
}

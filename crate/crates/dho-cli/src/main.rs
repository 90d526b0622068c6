//! `dho` — build, verify, transform and compare spread-sets, Kerdock sets,
//! orthogonal spreads and dual hyperovals.
//!
//! Exit codes for `compare`: 0 = equivalent, 1 = proven inequivalent,
//! 2 = inconclusive (budget exhausted). Everything else: 0 on success.
//! Thread count follows `RAYON_NUM_THREADS`.

mod census;
mod objects;

use std::path::PathBuf;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use dho_core::equiv::{aut_order, find_isomorphism, fingerprint, SearchConfig, SearchOutcome};
use dho_core::families::{
    count_bounds, desarguesian_spreadset, estimate_check, nearflag_family, semifield_shadow_family,
    transitive_orthospread, yoshiara_dho, ChainParams,
};
use dho_core::field::FieldCtx;
use dho_core::linalg::SubfieldSplit;
use dho_core::opsets::{
    self, desarguesian_gen, dilation_gen, to_dot_gram, twist_gen, verify_dho_set, verify_kerdock_set,
    verify_kerdock_set_gen, verify_spread_set, verify_spread_set_gen, SetKind,
};
use dho_core::serial;
use dho_core::spreadgeom::qdho::{
    desarguesian_spread, huybrechts_qdho, lift_gen, project_singular_gen, quotient_spread_qdho,
    verify_orthospread_gen, verify_plain_spread, verify_qdho,
};
use dho_core::spreadgeom::{
    extract_opset, kerdock_project_n, kerdock_project_p, lift, project_nonsingular, project_singular,
    verify_dho, verify_orthogonal_spread, verify_spread, FamilyKind, YChoice,
};

use objects::Obj;

#[derive(Parser)]
#[command(name = "dho", version, about = "spreads, Kerdock sets and dual hyperovals over small fields")]
struct Cli {
    /// Wall-clock budget in seconds for equivalence searches.
    #[arg(long, global = true)]
    timeout: Option<u64>,
    /// Recorded in census manifests for reproducibility.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Construct a named family and write it to a JSON object file.
    Build {
        /// desarguesian | semifield | nearflag | yoshiara | huybrechts |
        /// spread | transitive-ospread
        family: String,
        #[arg(long)]
        n: u32,
        /// Field size of the coordinates (default 2).
        #[arg(long, default_value_t = 2)]
        q: u64,
        /// Yoshiara parameter.
        #[arg(long)]
        r: Option<u32>,
        /// Subfield chain, e.g. `1,3` (the leading 1 is optional).
        #[arg(long)]
        chain: Option<String>,
        /// Chain coefficients as hex field elements, e.g. `0x2`.
        #[arg(long)]
        coeffs: Option<String>,
        #[arg(short, long)]
        out: PathBuf,
        /// Skip the verification pass after construction.
        #[arg(long)]
        no_verify: bool,
    },
    /// Re-run the defining-axiom verifier for an object file.
    Verify { file: PathBuf },
    /// Apply an operation to an object file.
    Transform {
        /// shadow | invert-shadow | twist | dilate | lift | project-n |
        /// project-p | quotient | extract
        op: String,
        input: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        /// Twist vector (hex element of F).
        #[arg(long)]
        u: Option<String>,
        /// Dilation parameter (hex element of F_q).
        #[arg(long)]
        lambda: Option<String>,
        /// Projection point: `h1,h2` with each half `0`, `e<i>` or hex, or
        /// a single hex vector.
        #[arg(long)]
        point: Option<String>,
    },
    /// Decide equivalence of two split DHOs. Exit 0/1/2.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Keep searching after the first certificate (least one returned).
        #[arg(long)]
        exhaustive: bool,
    },
    /// Automorphism group order of a split DHO.
    Aut { file: PathBuf },
    /// Enumerate a parameterized family, classify up to equivalence.
    Census {
        /// nearflag | semifield
        family: String,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        chain: String,
        /// Restrict semifield coefficients to the subfield of this degree.
        #[arg(long)]
        coeff_field: Option<u32>,
        /// Output directory (manifest.json, rows.jsonl, summary.json).
        #[arg(long)]
        out: PathBuf,
        /// Continue a previous run, skipping finished parameters.
        #[arg(long)]
        resume: bool,
    },
    /// Exact counting bounds for odd composite n.
    Bounds {
        #[arg(long)]
        n: u64,
    },
    /// Evaluate the chain estimate for ascending odd primes, e.g. `3,3`.
    Estimate {
        #[arg(long)]
        primes: String,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(3);
        }
    }
}

fn parse_chain(s: &str) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let d: u32 = part.trim().parse().context("chain degrees are integers")?;
        if d == 1 && out.is_empty() {
            continue; // the prime field is implicit
        }
        out.push(d);
    }
    Ok(out)
}

fn parse_coeffs(s: &str) -> Result<Vec<u64>> {
    s.split(',')
        .map(|part| {
            let t = part.trim();
            u64::from_str_radix(t.trim_start_matches("0x"), 16).map_err(|_| anyhow!("bad coefficient {t}"))
        })
        .collect()
}

fn search_config(timeout: Option<u64>, exhaustive: bool) -> SearchConfig {
    SearchConfig { timeout: timeout.map(Duration::from_secs), exhaustive }
}

fn parse_point(spec: &str, dim: usize) -> Result<u32> {
    let half = dim / 2;
    let parse_half = |s: &str| -> Result<u32> {
        let s = s.trim();
        if s == "0" {
            Ok(0)
        } else if let Some(i) = s.strip_prefix('e') {
            let i: usize = i.parse().context("basis index")?;
            if i == 0 || i > half {
                bail!("basis index e{i} out of range 1..={half}");
            }
            Ok(1 << (i - 1))
        } else {
            Ok(serial::unhex(s)?)
        }
    };
    match spec.split_once(',') {
        Some((a, b)) => Ok(parse_half(a)? | parse_half(b)? << half),
        None => Ok(serial::unhex(spec.trim())?),
    }
}

fn run(cli: Cli) -> Result<i32> {
    let timeout = cli.timeout;
    match cli.cmd {
        Cmd::Build { family, n, q, r, chain, coeffs, out, no_verify } => {
            build(&family, n, q, r, chain.as_deref(), coeffs.as_deref(), &out, !no_verify)?;
            Ok(0)
        }
        Cmd::Verify { file } => verify(&file),
        Cmd::Transform { op, input, out, u, lambda, point } => {
            transform(&op, &input, &out, u.as_deref(), lambda.as_deref(), point.as_deref())?;
            Ok(0)
        }
        Cmd::Compare { a, b, exhaustive } => compare(&a, &b, search_config(timeout, exhaustive)),
        Cmd::Aut { file } => {
            let obj = objects::load(&file)?;
            let set = objects::as_dho_set(&obj, "aut")?;
            let res = aut_order(&set, &search_config(timeout, true))?;
            let gens: Vec<_> = res.generators.iter().take(4).map(|c| serial::save_certificate(c, None)).collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "order": res.order,
                    "exact": res.exact,
                    "stabilizer": res.stabilizer_order,
                    "orbit": res.orbit_length,
                    "generators": gens,
                }))?
            );
            if res.exact {
                Ok(0)
            } else {
                Ok(2)
            }
        }
        Cmd::Census { family, n, chain, coeff_field, out, resume } => {
            census::run(&family, n, &parse_chain(&chain)?, coeff_field, &out, resume, cli.seed, timeout)
        }
        Cmd::Bounds { n } => {
            let b = count_bounds(n)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "n": b.n,
                    "rho": b.rho,
                    "semifield_bound": format!("2^{}/{}", n * (b.rho as u64 - 2), b.semifield_bound_den),
                    "semifield_bound_num": b.semifield_bound_num.to_string(),
                    "semifield_bound_den": b.semifield_bound_den,
                    "nearflag_bound": b.nearflag_bound.to_string(),
                    "nearflag_hypothesis_met": b.nearflag_hypothesis_met,
                }))?
            );
            Ok(0)
        }
        Cmd::Estimate { primes } => {
            let ps: Vec<u64> = primes.split(',').map(|s| s.trim().parse().unwrap_or(0)).collect();
            let outcome = estimate_check(&ps)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "primes": ps,
                    "holds": outcome.holds,
                    "known_exception": outcome.known_exception,
                }))?
            );
            Ok(0)
        }
    }
}

fn build(
    family: &str,
    n: u32,
    q: u64,
    r: Option<u32>,
    chain: Option<&str>,
    coeffs: Option<&str>,
    out: &std::path::Path,
    verify: bool,
) -> Result<()> {
    let provenance = |desc: String| Some(json!({ "provenance": [desc] }));
    match family {
        "desarguesian" => {
            if q == 2 {
                let f = FieldCtx::new(2, n, None)?;
                let set = desarguesian_spreadset(&f);
                if verify {
                    expect_ok(&verify_spread_set(&set))?;
                }
                objects::write_json(out, &serial::save_opset(&set, Some(&f)), provenance(format!("build desarguesian n={n}")))?;
            } else {
                let (parent, split) = split_for(q, n)?;
                let set = desarguesian_gen(&parent, &split);
                if verify {
                    expect_ok(&verify_spread_set_gen(&set))?;
                }
                objects::write_json(out, &serial::save_qopset(&set, Some(&parent)), provenance(format!("build desarguesian q={q} n={n}")))?;
            }
        }
        "semifield" | "nearflag" => {
            let f = FieldCtx::new(2, n, None)?;
            let degrees = parse_chain(chain.ok_or_else(|| anyhow!("--chain required"))?)?;
            let cs = parse_coeffs(coeffs.ok_or_else(|| anyhow!("--coeffs required"))?)?;
            let params = ChainParams::new(n, degrees, cs);
            let (sigma, delta) = if family == "semifield" {
                let (s, d) = semifield_shadow_family(&f, &params)?;
                (s, d)
            } else {
                let (s, d, _) = nearflag_family(&f, &params)?;
                (s, d)
            };
            if verify {
                expect_ok(&verify_spread_set(&sigma))?;
                expect_ok(&verify_dho_set(&delta).0)?;
            }
            // the DHO-set is the primary object; the spread-set rides along
            let mut file = serial::save_opset(&delta, Some(&f));
            file.meta = Some(json!({
                "provenance": [format!("build {family} n={n} chain={:?} coeffs={:?}", chain, coeffs)],
                "sigma": serial::save_opset(&sigma, Some(&f)),
            }));
            objects::write_json(out, &file, None)?;
        }
        "yoshiara" => {
            let f = FieldCtx::new(2, n, None)?;
            let set = yoshiara_dho(&f, r.ok_or_else(|| anyhow!("--r required"))?)?;
            if verify {
                expect_ok(&verify_dho_set(&set).0)?;
            }
            objects::write_json(out, &serial::save_opset(&set, Some(&f)), provenance(format!("build yoshiara n={n} r={r:?}")))?;
        }
        "huybrechts" => {
            let ctx = scalar_field(q)?;
            let fam = huybrechts_qdho(&ctx, n as usize);
            if verify {
                expect_ok(&verify_qdho(&fam))?;
            }
            objects::write_json(out, &serial::save_qfamily(&fam, "qdho"), provenance(format!("build huybrechts q={q} n={n}")))?;
        }
        "spread" => {
            let (parent, split) = split_for(q, n)?;
            let fam = desarguesian_spread(&parent, &split);
            if verify {
                expect_ok(&verify_plain_spread(&fam))?;
            }
            objects::write_json(out, &serial::save_qfamily(&fam, "spread"), provenance(format!("build spread q={q} n={n}")))?;
        }
        "transitive-ospread" => {
            let f = FieldCtx::new(2, n, None)?;
            let sigma = desarguesian_spreadset(&f);
            let (fam, _gens) = transitive_orthospread(&f, &sigma)?;
            if verify {
                expect_ok(&verify_orthogonal_spread(&fam))?;
            }
            objects::write_json(out, &serial::save_family(&fam, Some(&f)), provenance(format!("build transitive-ospread n={n}")))?;
        }
        other => bail!("unknown family {other}"),
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn split_for(q: u64, n: u32) -> Result<(FieldCtx, SubfieldSplit)> {
    if !q.is_power_of_two() {
        // odd q: the parent is F_{q^n} over its prime field power
        let p = smallest_prime_factor(q);
        let d = (q as f64).log(p as f64).round() as u32;
        let parent = FieldCtx::new(p, d * n, None)?;
        return Ok((parent.clone(), SubfieldSplit::new(&parent, d)?));
    }
    let d = q.trailing_zeros();
    let parent = FieldCtx::new(2, d * n, None)?;
    Ok((parent.clone(), SubfieldSplit::new(&parent, d)?))
}

fn smallest_prime_factor(q: u64) -> u64 {
    let mut d = 2;
    while d * d <= q {
        if q % d == 0 {
            return d;
        }
        d += 1;
    }
    q
}

fn scalar_field(q: u64) -> Result<FieldCtx> {
    let p = smallest_prime_factor(q);
    let k = (q as f64).log(p as f64).round() as u32;
    Ok(FieldCtx::new(p, k, None)?)
}

fn expect_ok(report: &dho_core::report::VerifyReport) -> Result<()> {
    if !report.ok {
        bail!("{report}");
    }
    eprintln!("{report}");
    Ok(())
}

fn verify(file: &std::path::Path) -> Result<i32> {
    let report = match objects::load(file)? {
        Obj::OpSet(set, _) => match set.kind {
            SetKind::SpreadSet => verify_spread_set(&set),
            SetKind::KerdockSet => verify_kerdock_set(&set),
            SetKind::DhoSet => verify_dho_set(&set).0,
        },
        Obj::Family(fam, _) => match fam.kind {
            FamilyKind::Spread => verify_spread(&fam),
            FamilyKind::OrthogonalSpread => verify_orthogonal_spread(&fam),
            FamilyKind::Dho => verify_dho(&fam),
        },
        Obj::QOpSet(set) => match set.kind {
            SetKind::SpreadSet => verify_spread_set_gen(&set),
            SetKind::KerdockSet => verify_kerdock_set_gen(&set),
            SetKind::DhoSet => bail!("DHO-sets live over F_2"),
        },
        Obj::QFamily(fam, kind) => match kind.as_str() {
            "spread" => verify_plain_spread(&fam),
            "ospread" => verify_orthospread_gen(&fam),
            _ => verify_qdho(&fam),
        },
    };
    println!("{report}");
    for line in &report.checks {
        println!("  - {line}");
    }
    Ok(if report.ok { 0 } else { 1 })
}

fn transform(
    op: &str,
    input: &std::path::Path,
    out: &std::path::Path,
    u: Option<&str>,
    lambda: Option<&str>,
    point: Option<&str>,
) -> Result<()> {
    let obj = objects::load(input)?;
    let meta = |desc: String| Some(json!({ "provenance": [format!("{desc} from {}", input.display())] }));
    match (op, obj) {
        ("shadow", Obj::OpSet(set, field)) => {
            let delta = opsets::shadow(&set)?;
            expect_ok(&verify_dho_set(&delta).0)?;
            objects::write_json(out, &serial::save_opset(&delta, field.as_ref()), meta("shadow".into()))?;
        }
        ("invert-shadow", Obj::OpSet(set, field)) => {
            let sigma = opsets::invert_shadow(&set)?;
            objects::write_json(out, &serial::save_opset(&sigma, field.as_ref()), meta("invert-shadow".into()))?;
        }
        ("twist", Obj::OpSet(set, field)) => {
            let uv = serial::unhex(u.ok_or_else(|| anyhow!("--u required"))?)?;
            let t = opsets::twist(&set, uv)?;
            expect_ok(&verify_spread_set(&t))?;
            objects::write_json(out, &serial::save_opset(&t, field.as_ref()), meta(format!("twist u={uv:#x}")))?;
        }
        ("twist", Obj::QOpSet(set)) => {
            let code = serial::unhex64(u.ok_or_else(|| anyhow!("--u required"))?)?;
            let uv = dho_core::linalg::vdecode(code, set.ctx.order(), set.n());
            let t = twist_gen(&set, &uv)?;
            expect_ok(&verify_spread_set_gen(&t))?;
            objects::write_json(out, &serial::save_qopset(&t, None), meta(format!("twist u={code:#x}")))?;
        }
        ("dilate", Obj::OpSet(set, field)) => {
            let l = serial::unhex(lambda.ok_or_else(|| anyhow!("--lambda required"))?)?;
            let d = opsets::dilation_trivial(&set, l)?;
            objects::write_json(out, &serial::save_opset(&d, field.as_ref()), meta(format!("dilate lambda={l:#x}")))?;
        }
        ("dilate", Obj::QOpSet(set)) => {
            let l = serial::unhex64(lambda.ok_or_else(|| anyhow!("--lambda required"))?)?;
            let d = dilation_gen(&set, l)?;
            expect_ok(&verify_spread_set_gen(&d))?;
            objects::write_json(out, &serial::save_qopset(&d, None), meta(format!("dilate lambda={l:#x}")))?;
        }
        ("lift", Obj::OpSet(set, field)) => {
            let (kerdock, family) = lift(&set)?;
            expect_ok(&verify_kerdock_set(&kerdock))?;
            expect_ok(&verify_orthogonal_spread(&family))?;
            objects::write_json(out, &serial::save_family(&family, field.as_ref()), meta("lift".into()))?;
        }
        ("lift", Obj::QOpSet(set)) => {
            let (kerdock, family) = lift_gen(&set)?;
            expect_ok(&verify_kerdock_set_gen(&kerdock))?;
            expect_ok(&verify_orthospread_gen(&family))?;
            objects::write_json(out, &serial::save_qfamily(&family, "ospread"), meta("lift".into()))?;
        }
        ("project-p", Obj::Family(family, field)) => {
            let spec = point.ok_or_else(|| anyhow!("--point required"))?;
            let w = parse_point(spec, family.ambient.dim())?;
            let (dho, _) = project_singular(&family, w)?;
            expect_ok(&verify_dho(&dho))?;
            objects::write_json(out, &serial::save_family(&dho, field.as_ref()), meta(format!("project-p point={w:#x}")))?;
        }
        ("project-p", Obj::QFamily(family, _)) => {
            let spec = point.ok_or_else(|| anyhow!("--point required"))?;
            let code = serial::unhex64(spec)?;
            let w = dho_core::linalg::vdecode(code, family.ctx.order(), family.ambient_dim);
            let qdho = project_singular_gen(&family, &w)?;
            expect_ok(&verify_qdho(&qdho))?;
            objects::write_json(out, &serial::save_qfamily(&qdho, "qdho"), meta(format!("project-p point={code:#x}")))?;
        }
        ("project-n", Obj::Family(family, field)) => {
            let spec = point.ok_or_else(|| anyhow!("--point required"))?;
            let w = parse_point(spec, family.ambient.dim())?;
            let (spread, _) = project_nonsingular(&family, w)?;
            expect_ok(&verify_spread(&spread))?;
            objects::write_json(out, &serial::save_family(&spread, field.as_ref()), meta(format!("project-n point={w:#x}")))?;
        }
        ("kerdock-p", Obj::OpSet(set, field)) => {
            let spec = point.ok_or_else(|| anyhow!("--point required"))?;
            let w = parse_point(spec, 2 * set.n())? & ((1 << set.n()) - 1);
            let delta = kerdock_project_p(&set, w)?;
            expect_ok(&verify_dho_set(&delta).0)?;
            objects::write_json(out, &serial::save_opset(&delta, field.as_ref()), meta(format!("kerdock-p w={w:#x}")))?;
        }
        ("kerdock-n", Obj::OpSet(set, field)) => {
            let spec = point.ok_or_else(|| anyhow!("--point required"))?;
            let w = parse_point(spec, 2 * set.n())? & ((1 << set.n()) - 1);
            let sigma = kerdock_project_n(&set, w)?;
            expect_ok(&verify_spread_set(&sigma))?;
            objects::write_json(out, &serial::save_opset(&sigma, field.as_ref()), meta(format!("kerdock-n w={w:#x}")))?;
        }
        ("quotient", Obj::QFamily(family, kind)) => {
            let spec = point.ok_or_else(|| anyhow!("--point required"))?;
            let code = serial::unhex64(spec)?;
            let w = dho_core::linalg::vdecode(code, family.ctx.order(), family.ambient_dim);
            let qdho = match kind.as_str() {
                // quotient of a spread by a point of a member
                "spread" => quotient_spread_qdho(&family, &w)?,
                // quotient of a qDHO by a subspace avoiding all member sums
                _ => {
                    let u0 = dho_core::linalg::FSubspace::from_rows(&family.ctx, family.ambient_dim, vec![w]);
                    dho_core::spreadgeom::qdho::qdho_quotient(&family, &u0)?
                }
            };
            expect_ok(&verify_qdho(&qdho))?;
            objects::write_json(out, &serial::save_qfamily(&qdho, "qdho"), meta(format!("quotient point={code:#x}")))?;
        }
        ("extract", Obj::Family(family, field)) => {
            let set = match family.kind {
                FamilyKind::Dho => extract_opset(&family, 0, YChoice::Split)?,
                _ => extract_opset(&family, 0, YChoice::Member(family.members.len() - 1))?,
            };
            objects::write_json(out, &serial::save_opset(&set, field.as_ref()), meta("extract".into()))?;
        }
        (other, _) => bail!("unsupported transform {other} for this object type"),
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn compare(a: &std::path::Path, b: &std::path::Path, cfg: SearchConfig) -> Result<i32> {
    let oa = objects::load(a)?;
    let ob = objects::load(b)?;
    let mut da = objects::as_dho_set(&oa, "compare lhs")?;
    let mut db = objects::as_dho_set(&ob, "compare rhs")?;
    if da.form != db.form {
        da = to_dot_gram(&da)?.0;
        db = to_dot_gram(&db)?.0;
    }
    let fa = fingerprint(&da)?;
    let fb = fingerprint(&db)?;
    let outcome = find_isomorphism(&da, &db, &cfg)?;
    let (code, verdict, cert) = match &outcome {
        SearchOutcome::Found(c) => (0, "equivalent", Some(serial::save_certificate(c, None))),
        SearchOutcome::ProvenNone => (1, "inequivalent", None),
        SearchOutcome::Inconclusive => (2, "inconclusive", None),
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "verdict": verdict,
            "fingerprint_a": fa,
            "fingerprint_b": fb,
            "fingerprints_equal": fa == fb,
            "certificate": cert,
        }))?
    );
    Ok(code)
}

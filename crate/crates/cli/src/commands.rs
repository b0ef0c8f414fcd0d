//! Implementations of the CLI subcommands.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use qfold::certify::{
    expand, numeric_check, parse_certificate, parse_combination, print_certificate, relation,
    relation_names, SymbolicCombination,
};
use qfold::folding::{catalog_folding, scaled_inverse};
use qfold::partitions::{
    admits, enumerate_base, subset_predicate, SetName, MAX_ENUMERATION_WEIGHT,
};
use qfold::{Error, Result};

use crate::catalog::{load_dir, IdentityEntry, IdentityReport};

/// Whether the requested checks all passed; hard errors use `Err`.
pub enum Outcome {
    Pass,
    Mismatch,
}

/// Resolve a bundled data directory (`catalog/` or `certs/`): the explicit
/// flag, else the working directory, else the workspace checkout next to
/// this crate.
pub fn data_dir(explicit: Option<&Path>, name: &str) -> PathBuf {
    if let Some(dir) = explicit {
        return dir.to_path_buf();
    }
    let local = PathBuf::from(name);
    if local.is_dir() {
        return local;
    }
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(name)
}

fn check_order(order: i64) -> Result<()> {
    if order <= 0 {
        return Err(Error::Precondition(format!("order must be positive, got {order}")));
    }
    Ok(())
}

// ---------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------

struct TimedReport {
    report: IdentityReport,
    wall_ms: u128,
}

fn run_entry(entry: &IdentityEntry, order: i64) -> Result<TimedReport> {
    let start = Instant::now();
    let report = entry.check(order)?;
    Ok(TimedReport { report, wall_ms: start.elapsed().as_millis() })
}

fn render_verify(reports: &[TimedReport], json: bool) -> String {
    if json {
        let items: Vec<serde_json::Value> = reports
            .iter()
            .map(|t| {
                serde_json::json!({
                    "id": t.report.id,
                    "status": t.report.status.to_string(),
                    "note": t.report.note,
                    "order": t.report.order,
                    "result": if t.report.passed() { "pass" } else { "fail" },
                    "first_mismatch": t.report.first_mismatch,
                    "wall_ms": t.wall_ms,
                })
            })
            .collect();
        let mut out = serde_json::to_string_pretty(&items).expect("json rendering");
        out.push('\n');
        return out;
    }
    let mut out = String::new();
    let width = reports.iter().map(|t| t.report.id.len()).max().unwrap_or(0);
    for t in reports {
        let verdict = match &t.report.first_mismatch {
            None => "pass".to_string(),
            Some(e) => format!("FAIL at {e}"),
        };
        let _ = writeln!(
            out,
            "{:width$}  [{}]  order {}  {}",
            t.report.id, t.report.status, t.report.order, verdict,
        );
    }
    let passed = reports.iter().filter(|t| t.report.passed()).count();
    let _ = writeln!(out, "{passed}/{} identities pass", reports.len());
    out
}

pub fn cmd_verify(
    catalog_dir: &Path,
    id: Option<&str>,
    all: bool,
    order: i64,
    json: bool,
) -> Result<(Outcome, String)> {
    check_order(order)?;
    let entries = load_dir(catalog_dir)?;
    let selected: Vec<&IdentityEntry> = if all {
        entries.iter().collect()
    } else {
        let id = id.ok_or_else(|| {
            Error::Precondition("verify needs an identity id or --all".into())
        })?;
        let entry = entries
            .iter()
            .find(|e| e.id == id)
            .ok_or_else(|| Error::UnknownLabel(format!("identity {id}")))?;
        vec![entry]
    };
    let reports: Vec<Result<TimedReport>> =
        selected.par_iter().map(|entry| run_entry(entry, order)).collect();
    let reports: Vec<TimedReport> = reports.into_iter().collect::<Result<_>>()?;
    let text = render_verify(&reports, json);
    let outcome = if reports.iter().all(|t| t.report.passed()) {
        Outcome::Pass
    } else {
        Outcome::Mismatch
    };
    Ok((outcome, text))
}

// ---------------------------------------------------------------------
// fold
// ---------------------------------------------------------------------

fn render_matrix(matrix: &[Vec<i64>]) -> String {
    let width = matrix
        .iter()
        .flatten()
        .map(|e| e.to_string().len())
        .max()
        .unwrap_or(1);
    let mut out = String::new();
    for row in matrix {
        let cells: Vec<String> = row.iter().map(|e| format!("{e:width$}")).collect();
        let _ = writeln!(out, "  [ {} ]", cells.join("  "));
    }
    out
}

pub fn cmd_fold(
    label: &str,
    n: Option<usize>,
    scale: Option<i64>,
    json: bool,
) -> Result<(Outcome, String)> {
    let full_label = match n {
        Some(n) => format!("{label}({n})"),
        None => label.to_string(),
    };
    let folded = catalog_folding(&full_label)?;
    let matrix = folded.matrix().to_vec();
    let (scale, inverse) = match scale {
        Some(c) => (c, scaled_inverse(&matrix, c)?),
        None => match scaled_inverse(&matrix, 1) {
            Ok(inv) => (1, inv),
            Err(Error::NonIntegralInverse { minimal, .. }) => {
                (minimal, scaled_inverse(&matrix, minimal)?)
            }
            Err(e) => return Err(e),
        },
    };
    if json {
        let value = serde_json::json!({
            "label": full_label,
            "dim": matrix.len(),
            "matrix": matrix,
            "scale": scale,
            "scaled_inverse": inverse,
        });
        let mut out = serde_json::to_string_pretty(&value).expect("json rendering");
        out.push('\n');
        return Ok((Outcome::Pass, out));
    }
    let mut out = String::new();
    let _ = writeln!(out, "folded Cartan matrix for {full_label} ({} orbits):", matrix.len());
    out.push_str(&render_matrix(&matrix));
    let _ = writeln!(out, "scaled inverse {scale}*A^(-1):");
    out.push_str(&render_matrix(&inverse));
    Ok((Outcome::Pass, out))
}

// ---------------------------------------------------------------------
// certify
// ---------------------------------------------------------------------

/// A target is either a registered relation instance `n1(0,0,0,0)` or a
/// combination literal over `S(...)` / `R(...)`.
pub fn parse_target(text: &str) -> Result<SymbolicCombination> {
    let trimmed = text.trim();
    if let Some((name, rest)) = trimmed.split_once('(') {
        if relation_names().contains(&name.trim()) {
            let args = rest
                .strip_suffix(')')
                .map(|inner| {
                    inner
                        .split(',')
                        .map(|v| v.trim().parse::<i64>())
                        .collect::<std::result::Result<Vec<i64>, _>>()
                })
                .and_then(|r| r.ok())
                .filter(|v| v.len() == 4)
                .ok_or_else(|| {
                    Error::Precondition(format!("bad relation target `{trimmed}`"))
                })?;
            return relation(name.trim(), args[0], args[1], args[2], args[3]);
        }
    }
    parse_combination(trimmed)
}

/// Locate a certificate file: as given, else under the bundled `certs/`
/// directory (with or without the `.cert` extension).
pub fn resolve_certificate(file: &Path, certs_dir: &Path) -> Result<PathBuf> {
    if file.is_file() {
        return Ok(file.to_path_buf());
    }
    let candidates = [
        certs_dir.join(file),
        certs_dir.join(format!("{}.cert", file.display())),
    ];
    for cand in &candidates {
        if cand.is_file() {
            return Ok(cand.clone());
        }
    }
    Err(Error::Precondition(format!(
        "certificate file {} not found (also tried {})",
        file.display(),
        certs_dir.display(),
    )))
}

pub fn cmd_certify(
    file: &Path,
    certs_dir: &Path,
    target: Option<&str>,
    numeric_order: Option<i64>,
    json: bool,
) -> Result<(Outcome, String)> {
    let path = resolve_certificate(file, certs_dir)?;
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Precondition(format!("cannot read {}: {e}", path.display())))?;
    let cert = parse_certificate(&text)?;
    let expansion = expand(&cert)?;

    let mut passed = true;
    let mut target_result: Option<(String, Option<String>)> = None;
    if let Some(target_text) = target {
        let target_comb = parse_target(target_text)?;
        if expansion.sub(&target_comb).is_zero() {
            target_result = Some(("exact".into(), None));
        } else if let Some(unit) = expansion.unit_multiple_of(&target_comb) {
            let unit_poly = qfold::LaurentPoly::one().mul_monomial(&unit);
            target_result = Some(("up-to-unit".into(), Some(unit_poly.to_string())));
        } else {
            target_result = Some(("mismatch".into(), None));
            passed = false;
        }
    }

    let mut numeric_result: Option<(i64, Option<String>)> = None;
    if let Some(order) = numeric_order {
        check_order(order)?;
        let report = numeric_check(&expansion, order)?;
        if !report.passed() {
            passed = false;
        }
        numeric_result = Some((order, report.first_failure));
    }

    if json {
        let value = serde_json::json!({
            "file": path.display().to_string(),
            "terms": cert.terms().len(),
            "expansion": expansion.to_string(),
            "target": target_result.as_ref().map(|(kind, unit)| serde_json::json!({
                "comparison": kind,
                "unit": unit,
            })),
            "numeric": numeric_result.as_ref().map(|(order, failure)| serde_json::json!({
                "order": order,
                "result": if failure.is_none() { "pass" } else { "fail" },
                "first_failure": failure,
            })),
            "result": if passed { "pass" } else { "fail" },
        });
        let mut out = serde_json::to_string_pretty(&value).expect("json rendering");
        out.push('\n');
        return Ok((if passed { Outcome::Pass } else { Outcome::Mismatch }, out));
    }

    let mut out = String::new();
    let _ = writeln!(out, "certificate {} ({} terms)", path.display(), cert.terms().len());
    let _ = writeln!(out, "normal form: {}", print_certificate(&cert));
    let _ = writeln!(out, "expansion: {expansion}");
    if let Some((kind, unit)) = &target_result {
        match (kind.as_str(), unit) {
            ("exact", _) => {
                let _ = writeln!(out, "target: matches exactly");
            }
            ("up-to-unit", Some(u)) => {
                let _ = writeln!(out, "target: matches up to unit monomial {u}");
            }
            _ => {
                let _ = writeln!(out, "target: MISMATCH");
            }
        }
    }
    if let Some((order, failure)) = &numeric_result {
        match failure {
            None => {
                let _ = writeln!(out, "numeric check through q^{order}: pass");
            }
            Some(f) => {
                let _ = writeln!(out, "numeric check through q^{order}: FAIL ({f})");
            }
        }
    }
    Ok((if passed { Outcome::Pass } else { Outcome::Mismatch }, out))
}

// ---------------------------------------------------------------------
// partitions
// ---------------------------------------------------------------------

fn parse_set(name: &str) -> Result<SetName> {
    name.parse::<SetName>()
}

pub fn cmd_partitions_count(
    set: &str,
    order: i64,
    x_degree: Option<i64>,
    json: bool,
) -> Result<(Outcome, String)> {
    check_order(order)?;
    let set = parse_set(set)?;
    if order > MAX_ENUMERATION_WEIGHT {
        return Err(Error::Precondition(format!(
            "enumeration weight bound is {MAX_ENUMERATION_WEIGHT}, got {order}"
        )));
    }
    let max = order;
    let mut counts = vec![num_bigint::BigInt::from(0); (max + 1) as usize];
    enumerate_base(max, &mut |parts| {
        if !subset_predicate(set, parts) {
            return;
        }
        if let Some(len) = x_degree {
            if parts.len() as i64 != len {
                return;
            }
        }
        let weight: i64 = parts.iter().sum();
        counts[weight as usize] += 1;
    })?;
    if json {
        let value = serde_json::json!({
            "set": set.to_string(),
            "max_weight": max,
            "x_degree": x_degree,
            "counts": counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        });
        let mut out = serde_json::to_string_pretty(&value).expect("json rendering");
        out.push('\n');
        return Ok((Outcome::Pass, out));
    }
    let mut out = String::new();
    for (w, count) in counts.iter().enumerate() {
        let _ = writeln!(out, "{w:4}  {count}");
    }
    Ok((Outcome::Pass, out))
}

pub fn cmd_partitions_witness(
    set: &str,
    weight: i64,
    x_degree: Option<i64>,
    json: bool,
) -> Result<(Outcome, String)> {
    let set = parse_set(set)?;
    if weight < 0 || weight > MAX_ENUMERATION_WEIGHT {
        return Err(Error::Precondition(format!(
            "weight must lie in 0..={MAX_ENUMERATION_WEIGHT}, got {weight}"
        )));
    }
    let mut members: Vec<Vec<i64>> = Vec::new();
    enumerate_base(weight, &mut |parts| {
        let total: i64 = parts.iter().sum();
        if total != weight || !subset_predicate(set, parts) {
            return;
        }
        if let Some(len) = x_degree {
            if parts.len() as i64 != len {
                return;
            }
        }
        members.push(parts.to_vec());
    })?;
    members.sort();
    members.reverse();
    if json {
        let value = serde_json::json!({
            "set": set.to_string(),
            "weight": weight,
            "x_degree": x_degree,
            "members": members,
        });
        let mut out = serde_json::to_string_pretty(&value).expect("json rendering");
        out.push('\n');
        return Ok((Outcome::Pass, out));
    }
    let mut out = String::new();
    for parts in &members {
        let p = qfold::partitions::Partition::new(parts.clone())?;
        let verdict = admits(&p, set);
        debug_assert!(verdict.member);
        let _ = writeln!(out, "{p}");
    }
    let _ = writeln!(out, "{} members of {set} at weight {weight}", members.len());
    Ok((Outcome::Pass, out))
}

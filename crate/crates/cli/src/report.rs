use std::fmt::Write;
use std::path::Path;

use serde_json::Value;
use workbench_core::series::parse_rational;
use workbench_core::Rational;

use crate::error::{Result, WorkbenchError};
use crate::pipeline::{RunManifest, CONSTANT_MAPS_FILE, GENUS0_FILE, HODGE_SUMMARY_FILE};

fn load_artifact(dir: &Path, name: &str) -> Result<Value> {
    let path = dir.join(name);
    let text = std::fs::read_to_string(&path).map_err(|_| WorkbenchError::MissingArtifact(path.clone()))?;
    serde_json::from_str(&text).map_err(|e| WorkbenchError::Config(format!("{}: {e}", path.display())))
}

/// `χ/5760`-style label for the coefficient `c` of `N_{g,0} = c χ`.
fn euler_multiple(c: &Rational) -> String {
    let (num, den) = (c.numer(), c.denom());
    let head = match num.to_i64() {
        Some(1) => "χ".to_string(),
        Some(-1) => "-χ".to_string(),
        _ => format!("{num}χ"),
    };
    if *den == 1 {
        head
    } else {
        format!("{head}/{den}")
    }
}

fn fmt_rational(q: &Rational) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        q.to_string()
    }
}

/// Renders the instanton, constant-map and Hodge tables of a finished run.
pub fn report(manifest_path: &Path) -> Result<String> {
    let manifest = RunManifest::load(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let genus0 = load_artifact(dir, GENUS0_FILE)?;
    let constant_maps = load_artifact(dir, CONSTANT_MAPS_FILE)?;
    let hodge = load_artifact(dir, HODGE_SUMMARY_FILE)?;

    let mut out = String::new();
    let _ = writeln!(
        out,
        "family {} | order {} | {} bits | config {}",
        manifest.family,
        manifest.order,
        manifest.precision_bits,
        &manifest.config_hash[..12.min(manifest.config_hash.len())]
    );

    let _ = writeln!(out, "\ninstanton numbers");
    let n = genus0["n"].as_object().cloned().unwrap_or_default();
    if n.values().all(|v| v.as_str() == Some("0")) {
        let _ = writeln!(out, "no quantum corrections");
    } else {
        let width = n.keys().map(|d| d.len() + 2).max().unwrap_or(3);
        for (d, v) in &n {
            let _ = writeln!(out, "{:>width$} | n_d={}", format!("d={d}"), v.as_str().unwrap_or("?"));
        }
    }

    let _ = writeln!(out, "\nconstant maps (χ = {})", constant_maps["euler"]);
    let euler = constant_maps["euler"].as_i64().unwrap_or(0);
    for row in constant_maps["constant_maps"].as_array().into_iter().flatten() {
        let g = row["g"].as_u64().unwrap_or(0);
        let value = row["value"].as_str().and_then(parse_rational).unwrap_or_default();
        let label = if euler != 0 {
            euler_multiple(&(value.clone() / euler))
        } else {
            "0·χ".into()
        };
        let _ = writeln!(out, "g={g} | {label} = {}", fmt_rational(&value));
    }

    let _ = writeln!(out, "\nHodge-Riemann checks");
    let flag = |k: &str| if hodge[k].as_bool() == Some(true) { "pass" } else { "FAIL" };
    let _ = writeln!(out, "samples              | {}", hodge["points"]);
    let _ = writeln!(out, "(Ω,Ω̄) > 0            | {}", flag("pairing_positive"));
    let _ = writeln!(out, "(𝔻Ω,𝔻Ω̄) < 0          | {}", flag("dd_pairing_negative"));
    let _ = writeln!(out, "Chern form positive  | {}", flag("chern_form_positive"));
    let _ = writeln!(out, "max |(Ω,Ω)|/(Ω,Ω̄)    | {}", hodge["max_isotropy_ratio"].as_str().unwrap_or("?"));
    let _ = writeln!(out, "G route discrepancy  | {}", hodge["max_route_discrepancy"].as_str().unwrap_or("?"));
    let _ = writeln!(out, "FD curvature error   | {}", hodge["fd_relative_error"].as_str().unwrap_or("?"));
    Ok(out)
}

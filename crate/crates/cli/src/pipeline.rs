use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use workbench_core::anomaly::constant_map_contribution;
use workbench_core::hodge::{sample_grid, HodgeEvaluator, HodgePointReport, Stencil, SymplecticFrame};
use workbench_core::mirror::{
    assemble_genus0, build_mirror_map, extract_instantons, flat_yukawa, yukawa_theta, GenusZeroResult,
};
use workbench_core::series::rational_to_pq;
use workbench_core::ComplexHP;

use crate::config::WorkbenchConfig;
use crate::error::{Result, WorkbenchError};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const RUNS_LOG: &str = "runs.log";
pub const PERIODS_FILE: &str = "periods.json";
pub const GENUS0_FILE: &str = "genus0.json";
pub const CONSTANT_MAPS_FILE: &str = "constant_maps.json";
pub const HODGE_REPORT_FILE: &str = "hodge_report.json";
pub const HODGE_SUMMARY_FILE: &str = "hodge_summary.json";

/// Genera listed in the constant-map artifact.
pub const CONSTANT_MAP_GENERA: std::ops::RangeInclusive<u32> = 2..=6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub config_hash: String,
    pub family: String,
    pub order: u32,
    pub precision_bits: u32,
    pub stages: Vec<StageTiming>,
    pub files: Vec<FileDigest>,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => WorkbenchError::MissingArtifact(path.to_path_buf()),
            _ => WorkbenchError::io(path, e),
        })?;
        serde_json::from_str(&text).map_err(|e| WorkbenchError::Config(format!("{}: {e}", path.display())))
    }

    pub fn digest(&self, file: &str) -> Option<&str> {
        self.files.iter().find(|f| f.path == file).map(|f| f.sha256.as_str())
    }
}

struct Run<'a> {
    out: &'a Path,
    hash: String,
    stages: Vec<StageTiming>,
    files: Vec<FileDigest>,
}

impl Run<'_> {
    fn stage<T>(&mut self, name: &'static str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let r = f();
        self.stages.push(StageTiming {
            stage: name.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        r
    }

    fn write(&mut self, name: &str, mut value: Value) -> Result<()> {
        if let Some(obj) = value.as_object_mut() {
            obj.insert("config_hash".into(), self.hash.clone().into());
        }
        let mut text = serde_json::to_string_pretty(&value).expect("serializable");
        text.push('\n');
        let path = self.out.join(name);
        fs::write(&path, &text).map_err(|e| WorkbenchError::io(&path, e))?;
        self.files.push(FileDigest {
            path: name.to_string(),
            sha256: format!("{:x}", Sha256::digest(text.as_bytes())),
        });
        Ok(())
    }
}

fn append_log(out: &Path, entry: Value) -> Result<()> {
    let path = out.join(RUNS_LOG);
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&path)
        .map_err(|e| WorkbenchError::io(&path, e))?;
    writeln!(f, "{entry}").map_err(|e| WorkbenchError::io(&path, e))
}

fn unix_time() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// Periods → mirror map → Yukawa → instantons → Hodge report, writing JSON
/// artifacts and `manifest.json` into `out`.
///
/// Every run, successful or not, appends one line to `runs.log`.
pub fn run_pipeline(config: &WorkbenchConfig, out: &Path) -> Result<RunManifest> {
    config.validate()?;
    fs::create_dir_all(out).map_err(|e| WorkbenchError::io(out, e))?;
    let mut run = Run {
        out,
        hash: config.hash(),
        stages: Vec::new(),
        files: Vec::new(),
    };
    let result = execute(config, &mut run);
    let entry = match &result {
        Ok(_) => json!({
            "time": unix_time(),
            "config_hash": run.hash,
            "status": "ok",
        }),
        Err(e) => json!({
            "time": unix_time(),
            "config_hash": run.hash,
            "status": "failed",
            "stage": e.stage(),
            "exit_code": e.exit_code(),
            "error": e.to_string(),
        }),
    };
    append_log(out, entry)?;
    result
}

fn execute(config: &WorkbenchConfig, run: &mut Run<'_>) -> Result<RunManifest> {
    let family = &config.family;
    let prec = config.precision_bits;

    let basis = run.stage("periods", || {
        family
            .pf
            .frobenius_solve(config.order)
            .map_err(|e| WorkbenchError::from_pf("periods", e))
    })?;
    run.write(
        PERIODS_FILE,
        json!({ "family": family.name, "basis": basis }),
    )?;

    let mirror = run.stage("mirror_map", || {
        build_mirror_map(&basis).map_err(|e| WorkbenchError::from_mirror("mirror_map", e))
    })?;

    let (yukawa, c_ttt) = run.stage("yukawa", || {
        let y = yukawa_theta(family).map_err(|e| WorkbenchError::from_mirror("yukawa", e))?;
        let c = flat_yukawa(&y, &basis, &mirror).map_err(|e| WorkbenchError::from_mirror("yukawa", e))?;
        Ok((y, c))
    })?;

    let frame = SymplecticFrame::normalized(family.triple_intersection).with_euler(family.euler);
    run.stage("special_geometry", || {
        frame
            .verify_normalization(&basis, &yukawa)
            .map_err(|e| WorkbenchError::from_hodge("special_geometry", e))
    })?;

    let genus0 = run.stage("instantons", || {
        let stage = "instantons";
        let table = extract_instantons(&c_ttt, family).map_err(|e| WorkbenchError::from_mirror(stage, e))?;
        table.require_integral().map_err(|e| WorkbenchError::from_mirror(stage, e))?;
        let potential =
            assemble_genus0(family, &table, config.order).map_err(|e| WorkbenchError::from_mirror(stage, e))?;
        if potential.third_derivative(family.triple_intersection) != c_ttt {
            return Err(WorkbenchError::Math {
                stage,
                message: "(q d/dq)^3 F0 + classical term does not reproduce C_ttt".into(),
            });
        }
        Ok(GenusZeroResult {
            family: family.name.clone(),
            basis: basis.clone(),
            mirror: mirror.clone(),
            yukawa: yukawa.clone(),
            c_ttt: c_ttt.clone(),
            table,
            potential,
        })
    })?;
    let mut g0 = genus0.to_json();
    g0["yukawa_theta"] = json!({
        "numerator": genus0.yukawa.numerator,
        "denominator": genus0.yukawa.denominator,
    });
    run.write(GENUS0_FILE, g0)?;

    let constant_maps: Vec<Value> = CONSTANT_MAP_GENERA
        .map(|g| {
            let v = constant_map_contribution(g, family.euler).expect("g >= 2");
            json!({ "g": g, "value": rational_to_pq(&v) })
        })
        .collect();
    run.write(
        CONSTANT_MAPS_FILE,
        json!({ "euler": family.euler, "constant_maps": constant_maps }),
    )?;

    let (reports, summary) = run.stage("hodge", || hodge_stage(config, &frame, prec))?;
    let mut text = serde_json::to_string_pretty(&reports).expect("serializable");
    text.push('\n');
    let path = run.out.join(HODGE_REPORT_FILE);
    fs::write(&path, &text).map_err(|e| WorkbenchError::io(&path, e))?;
    run.files.push(FileDigest {
        path: HODGE_REPORT_FILE.into(),
        sha256: format!("{:x}", Sha256::digest(text.as_bytes())),
    });
    run.write(HODGE_SUMMARY_FILE, summary)?;

    let manifest = RunManifest {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: run.hash.clone(),
        family: family.name.clone(),
        order: config.order,
        precision_bits: prec,
        stages: run.stages.clone(),
        files: run.files.clone(),
    };
    let path = run.out.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).expect("serializable");
    fs::write(&path, text + "\n").map_err(|e| WorkbenchError::io(&path, e))?;
    Ok(manifest)
}

fn hodge_stage(config: &WorkbenchConfig, frame: &SymplecticFrame, prec: u32) -> Result<(Vec<HodgePointReport>, Value)> {
    let stage = "hodge";
    let pf = &config.family.pf;
    let tol = &config.tolerances;
    let points = sample_grid(pf.singular_radius(), config.samples.radius_fraction, config.samples.count, prec)
        .map_err(|e| WorkbenchError::from_hodge(stage, e))?;
    let max_modulus = points
        .iter()
        .map(ComplexHP::abs_f64)
        .fold(tol.fd_point + 2.0 * tol.fd_step, f64::max);
    let ev = HodgeEvaluator::for_operator(pf, frame, max_modulus, prec)
        .map_err(|e| WorkbenchError::from_hodge(stage, e))?;
    let reports = ev
        .grid(&points)
        .into_iter()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| WorkbenchError::from_hodge(stage, e))?;
    let fd_point = ComplexHP::from_f64(prec, tol.fd_point, 0.0);
    let fd = ev
        .fd_curvature_check(&fd_point, tol.fd_step, Stencil::Fourth, tol.fd_relative)
        .map_err(|e| WorkbenchError::from_hodge(stage, e))?;
    let all_positive = reports.iter().all(|r| r.chern_form_positive);
    if !all_positive {
        return Err(WorkbenchError::Numeric {
            stage,
            message: "first Chern form not positive at every sample".into(),
        });
    }
    let max_route = reports.iter().map(HodgePointReport::route_discrepancy).fold(0.0, f64::max);
    let max_isotropy = reports
        .iter()
        .map(|r| (r.isotropy.abs() / r.pairing_value.abs()).to_f64())
        .fold(0.0, f64::max);
    let summary = json!({
        "points": reports.len(),
        "series_order": ev.order(),
        "precision_bits": prec,
        "radius_fraction": config.samples.radius_fraction,
        "pairing_positive": reports.iter().all(|r| r.pairing_value.re > 0),
        "dd_pairing_negative": reports.iter().all(|r| r.dd_pairing.re < 0),
        "chern_form_positive": all_positive,
        "max_isotropy_ratio": format!("{max_isotropy:e}"),
        "max_route_discrepancy": format!("{max_route:e}"),
        "fd_point": format!("{:e}", tol.fd_point),
        "fd_step": format!("{:e}", tol.fd_step),
        "fd_relative_error": format!("{:e}", fd.relative_error),
    });
    Ok((reports, summary))
}

/// Where artifacts go: explicit flag, then config, then `./workbench-out`.
pub fn resolve_output(flag: Option<PathBuf>, config: &WorkbenchConfig) -> PathBuf {
    flag.or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("workbench-out"))
}

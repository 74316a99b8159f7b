//! File-producing front ends behind the `nashswitch` subcommands.

use crate::config::{ConfigDoc, GridSpec};
use crate::error::{Error, Result};
use crate::game::{nash_equilibrium, Case, Direction, Mode};
use crate::geometry::{build_mode_map_with, membership_at};
use crate::linalg::{norm, sub};
use crate::report::ReportDoc;
use crate::simulate::{simulate, Trajectory};
use crate::stability::stability_verdict_with;
use rayon::prelude::*;
use std::io::Write;
use std::path::{Path, PathBuf};

pub const TRAJECTORY_HEADER: [&str; 8] = ["t", "x1", "x2", "mode", "J1", "J2", "r", "theta"];
pub const EVENTS_HEADER: [&str; 8] = ["t", "x1", "x2", "agents", "from_mode", "mid_mode", "to_mode", "flash"];
pub const DOMAINS_HEADER: [&str; 7] = ["x1", "x2", "in_LL", "in_HL", "in_LH", "in_HH", "effective_mode"];
pub const SWEEP_HEADER: [&str; 5] = ["value", "case", "direction", "gamma_rg", "verdict"];

/// Shortest representation that parses back to the same double.
pub fn fmt_f64(v: f64) -> String {
    serde_json::to_string(&v).expect("float formats")
}

/// Writes via a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

fn csv_bytes<const N: usize>(header: [&str; N], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

fn mode_str(m: Option<Mode>) -> String {
    m.map(|k| k.as_str().to_string()).unwrap_or_default()
}

pub fn run_analyze(config_path: &Path, out_dir: &Path) -> Result<ReportDoc> {
    let doc = ConfigDoc::load(config_path)?;
    let report = ReportDoc::build(&doc)?;
    write_atomic(&out_dir.join("report.json"), report.to_json().as_bytes())?;
    Ok(report)
}

pub fn trajectory_csv(traj: &Trajectory) -> Result<Vec<u8>> {
    csv_bytes(
        TRAJECTORY_HEADER,
        traj.samples.iter().map(|s| {
            vec![
                fmt_f64(s.t),
                fmt_f64(s.x[0]),
                fmt_f64(s.x[1]),
                mode_str(s.mode),
                fmt_f64(s.j1),
                fmt_f64(s.j2),
                fmt_f64(s.r),
                fmt_f64(s.theta),
            ]
        }),
    )
}

pub fn events_csv(traj: &Trajectory) -> Result<Vec<u8>> {
    csv_bytes(
        EVENTS_HEADER,
        traj.events.iter().map(|e| {
            let agents: Vec<String> = e.switching_agents.iter().map(|a| a.number().to_string()).collect();
            vec![
                fmt_f64(e.t),
                fmt_f64(e.x[0]),
                fmt_f64(e.x[1]),
                agents.join(","),
                e.from_mode.to_string(),
                mode_str(e.mid_mode),
                e.to_mode.to_string(),
                e.flash.to_string(),
            ]
        }),
    )
}

pub fn run_simulate(config_path: &Path, out_dir: &Path) -> Result<Trajectory> {
    let doc = ConfigDoc::load(config_path)?;
    let sim = doc.sim.ok_or_else(|| Error::Config { path: "sim".into(), message: "missing sim section".into() })?;
    let game = doc.game_spec()?;
    let traj = simulate(&game, &sim)?;
    let (tp, ep) = (out_dir.join("trajectory.csv"), out_dir.join("events.csv"));
    write_atomic(&tp, &trajectory_csv(&traj)?)?;
    if let Err(e) = write_atomic(&ep, &events_csv(&traj)?) {
        let _ = std::fs::remove_file(&tp);
        return Err(e);
    }
    Ok(traj)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainRow {
    pub x: [f64; 2],
    /// Indexed by [`Mode::index`].
    pub member: [bool; 4],
    pub effective_mode: Option<Mode>,
}

/// A square of half-width `5·(1 + ‖x*‖)` around the equilibrium.
pub fn default_grid(x_star: [f64; 2]) -> GridSpec {
    let h = 5.0 * (1.0 + norm(x_star));
    GridSpec { xmin: x_star[0] - h, xmax: x_star[0] + h, ymin: x_star[1] - h, ymax: x_star[1] + h, n: 101 }
}

pub fn domain_rows(doc: &ConfigDoc, grid: &GridSpec) -> Result<Vec<DomainRow>> {
    grid.validate()?;
    let game = doc.game_spec()?;
    let opts = doc.analysis_options();
    let x_star = nash_equilibrium(&game)?;
    let map = build_mode_map_with(&game, opts.case_tol).ok();
    let near = opts.case_tol * (1.0 + norm(x_star));
    Ok(grid
        .points()
        .map(|x| {
            let d = sub(x, x_star);
            DomainRow {
                x,
                member: Mode::ALL.map(|k| membership_at(&game, k, x, x_star)),
                effective_mode: match &map {
                    Some(m) if norm(d) > near => Some(m.mode_at(d[1].atan2(d[0]))),
                    _ => None,
                },
            }
        })
        .collect())
}

pub fn domains_csv(rows: &[DomainRow]) -> Result<Vec<u8>> {
    csv_bytes(
        DOMAINS_HEADER,
        rows.iter().map(|r| {
            let mut v = vec![fmt_f64(r.x[0]), fmt_f64(r.x[1])];
            v.extend(r.member.iter().map(|&b| u8::from(b).to_string()));
            v.push(mode_str(r.effective_mode));
            v
        }),
    )
}

/// Grid from the argument, else the config's `grid`, else [`default_grid`].
pub fn export_domains(config_path: &Path, grid: Option<GridSpec>, out_dir: &Path) -> Result<PathBuf> {
    let doc = ConfigDoc::load(config_path)?;
    let grid = match grid.or(doc.grid) {
        Some(g) => g,
        None => default_grid(nash_equilibrium(&doc.game_spec()?)?),
    };
    let rows = domain_rows(&doc, &grid)?;
    let path = out_dir.join("domains.csv");
    write_atomic(&path, &domains_csv(&rows)?)?;
    Ok(path)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub case: Option<Case>,
    pub direction: Option<Direction>,
    pub gamma_rg: Option<f64>,
    /// A verdict name, or `Invalid` when the swept value breaks the game's invariants.
    pub verdict: String,
}

fn sweep_row(doc: &ConfigDoc, parameter: &str, value: f64) -> Result<SweepRow> {
    let d = doc.with_parameter(parameter, value)?;
    let game = match d.game_spec() {
        Ok(g) => g,
        Err(e) => {
            log::warn!("sweep value {value} rejected: {e}");
            return Ok(SweepRow { value, case: None, direction: None, gamma_rg: None, verdict: "Invalid".into() });
        }
    };
    let rep = stability_verdict_with(&game, &d.analysis_options())?;
    Ok(SweepRow {
        value,
        case: Some(rep.case.case),
        direction: rep.direction,
        gamma_rg: rep.gamma_rg,
        verdict: rep.verdict.to_string(),
    })
}

/// One row per swept value, evaluated in parallel, returned in input order.
pub fn sweep_rows(doc: &ConfigDoc) -> Result<Vec<SweepRow>> {
    let sweep = doc
        .sweep
        .as_ref()
        .ok_or_else(|| Error::Config { path: "sweep".into(), message: "missing sweep section".into() })?;
    doc.with_parameter(&sweep.parameter, 0.0)?;
    sweep.values.par_iter().map(|&v| sweep_row(doc, &sweep.parameter, v)).collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> Result<Vec<u8>> {
    csv_bytes(
        SWEEP_HEADER,
        rows.iter().map(|r| {
            vec![
                fmt_f64(r.value),
                r.case.map(|c| c.to_string()).unwrap_or_default(),
                r.direction.map(|d| d.to_string()).unwrap_or_default(),
                r.gamma_rg.map(fmt_f64).unwrap_or_default(),
                r.verdict.clone(),
            ]
        }),
    )
}

pub fn run_sweep(config_path: &Path, out_dir: &Path) -> Result<Vec<SweepRow>> {
    let doc = ConfigDoc::load(config_path)?;
    let rows = sweep_rows(&doc)?;
    write_atomic(&out_dir.join("sweep.csv"), &sweep_csv(&rows)?)?;
    Ok(rows)
}

/// Machine-readable error object printed on failure.
pub fn error_json(e: &Error) -> String {
    serde_json::json!({
        "error": {
            "kind": e.kind(),
            "message": e.to_string(),
            "exit_code": e.exit_code(),
        }
    })
    .to_string()
}

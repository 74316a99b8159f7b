//! The analysis report written by `nashswitch analyze`.

use crate::config::{ConfigDoc, ReferenceDoc};
use crate::error::Result;
use crate::game::{check_assumption1, eigen_info, nash_equilibrium, Case, Direction, Mode};
use crate::geometry::{Arc, FlashPhase};
use crate::stability::{stability_verdict_with, Verdict};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenDoc {
    pub mode: Mode,
    /// `[[re, im], [re, im]]`.
    pub values: [[f64; 2]; 2],
    pub complex_conjugate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ToleranceDoc {
    pub case_tol: f64,
    pub panel_tol: f64,
    pub marginal_tol: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDoc {
    pub config: ConfigDoc,
    pub nash: [f64; 2],
    pub case: Case,
    pub degenerate_agents: Vec<u8>,
    pub direction: Option<Direction>,
    pub assumption1: bool,
    pub eigenvalues: Vec<EigenDoc>,
    pub gamma_rg: Option<f64>,
    pub verdict: Verdict,
    pub reason: Option<String>,
    pub mode_map: Vec<Arc>,
    pub flash_phases: Vec<FlashPhase>,
    pub warnings: Vec<String>,
    pub tolerances: ToleranceDoc,
}

fn fmt_pair(v: &[[f64; 2]; 2]) -> String {
    if v[0][0] == v[1][0] && v[0][1] == -v[1][1] {
        format!("{}±{}i", v[0][0], v[0][1].abs())
    } else {
        format!("{}{:+}i, {}{:+}i", v[0][0], v[0][1], v[1][0], v[1][1])
    }
}

/// Unordered distance between two eigenvalue pairs.
fn pair_distance(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> f64 {
    let d = |p: [f64; 2], q: [f64; 2]| (p[0] - q[0]).hypot(p[1] - q[1]);
    let straight = d(a[0], b[0]).max(d(a[1], b[1]));
    let crossed = d(a[0], b[1]).max(d(a[1], b[0]));
    straight.min(crossed)
}

fn reference_mismatches(computed: &[EigenDoc], reference: &ReferenceDoc) -> Vec<String> {
    let tol = reference.tol.unwrap_or(0.05);
    reference
        .eigenvalues
        .iter()
        .filter_map(|r| {
            let c = computed.iter().find(|e| e.mode == r.mode)?;
            let dist = pair_distance(&c.values, &r.values);
            (dist > tol).then(|| {
                format!(
                    "{} eigenvalues: computed {} but reference gives {} (distance {:.3} > {}); the reference value is a suspected typo",
                    r.mode,
                    fmt_pair(&c.values),
                    fmt_pair(&r.values),
                    dist,
                    tol
                )
            })
        })
        .collect()
}

impl ReportDoc {
    pub fn build(config: &ConfigDoc) -> Result<Self> {
        let game = config.game_spec()?;
        let opts = config.analysis_options();
        let rep = stability_verdict_with(&game, &opts)?;
        let eigenvalues: Vec<EigenDoc> = Mode::ALL
            .iter()
            .map(|&k| {
                let e = eigen_info(&game, k);
                EigenDoc {
                    mode: k,
                    values: e.eigenvalues.map(|z| [z.re, z.im]),
                    complex_conjugate: e.complex_conjugate,
                }
            })
            .collect();
        let (mode_map, flash_phases, mut warnings) = match &rep.mode_map {
            Some(m) => (m.arcs.clone(), m.flash_phases.clone(), m.warnings.clone()),
            None => (vec![], vec![], vec![]),
        };
        if let Some(r) = &config.reference {
            warnings.extend(reference_mismatches(&eigenvalues, r));
        }
        if let Some(reason) = &rep.reason {
            warnings.push(reason.clone());
        }
        Ok(ReportDoc {
            config: config.clone(),
            nash: nash_equilibrium(&game)?,
            case: rep.case.case,
            degenerate_agents: rep.case.degenerate_agents.iter().map(|a| a.number()).collect(),
            direction: rep.direction,
            assumption1: check_assumption1(&game),
            eigenvalues,
            gamma_rg: rep.gamma_rg,
            verdict: rep.verdict,
            reason: rep.reason,
            mode_map,
            flash_phases,
            warnings,
            tolerances: ToleranceDoc {
                case_tol: rep.case_tol,
                panel_tol: rep.panel_tol,
                marginal_tol: rep.marginal_tol,
            },
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

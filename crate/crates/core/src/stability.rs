//! Normalized radial growth rate `ρ`, its integral `γ_rg` over the mode map,
//! and the resulting stability verdict.

use crate::error::Result;
use crate::game::{
    check_assumption1, classify_case, p_matrix, require_assumption1, rotation_certificate, system_matrix, Case,
    CaseKind, Direction, GameSpec, Mode, DEFAULT_CASE_TOL,
};
use crate::geometry::{build_mode_map_with, ModeMap};
use crate::linalg::{dot, unit, Vec2};
use crate::quadrature::{adaptive_simpson, QuadratureOptions};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// A phase together with its unit direction `η(θ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularCoordinate {
    pub theta: f64,
    pub eta: Vec2,
}

impl AngularCoordinate {
    pub fn new(theta: f64) -> Self {
        Self { theta, eta: unit(theta) }
    }
}

/// `ρₖ(θ) = ηᵀ𝔸ₖη / ηᵀPₖη`.
pub fn rho(game: &GameSpec, mode: Mode, theta: f64) -> Result<f64> {
    require_assumption1(game)?;
    Ok(rho_unchecked(game, mode, theta))
}

pub(crate) fn rho_unchecked(game: &GameSpec, mode: Mode, theta: f64) -> f64 {
    let eta = AngularCoordinate::new(theta).eta;
    let a = system_matrix(game, mode).matrix;
    dot(eta, a.mul_vec(eta)) / p_matrix(game, mode).quad_form(eta)
}

/// `∫ ρ_{K(θ)}(θ) dθ` over `[a, b]`, split at every arc boundary.
pub fn integrate_rho(game: &GameSpec, map: &ModeMap, a: f64, b: f64, opts: &QuadratureOptions) -> Result<f64> {
    require_assumption1(game)?;
    let mut cuts = vec![a, b];
    for arc in &map.arcs {
        for shift in [-TAU, 0.0, TAU, 2.0 * TAU] {
            let t = arc.theta_start + shift;
            if t > a && t < b {
                cuts.push(t);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let mode = map.mode_at(0.5 * (w[0] + w[1]));
        total += adaptive_simpson(|t| rho_unchecked(game, mode, t), w[0], w[1], opts).value;
    }
    Ok(total)
}

/// `γ_rg`, the integral of `ρ_{K(θ)}` over one revolution. Case-2 maps are
/// π-periodic and are integrated over half a turn and doubled.
pub fn gamma_rg(game: &GameSpec, map: &ModeMap, opts: &QuadratureOptions) -> Result<f64> {
    let start = map.arcs[0].theta_start;
    if map.case == Case::Case2 {
        Ok(2.0 * integrate_rho(game, map, start, start + PI, opts)?)
    } else {
        integrate_rho(game, map, start, start + TAU, opts)
    }
}

/// `1e-8·(1 + mean |ρ_{K(θ)}|)` over one revolution.
pub fn marginal_tolerance(game: &GameSpec, map: &ModeMap, opts: &QuadratureOptions) -> Result<f64> {
    require_assumption1(game)?;
    let mut abs_integral = 0.0;
    for arc in &map.arcs {
        abs_integral +=
            adaptive_simpson(|t| rho_unchecked(game, arc.mode, t).abs(), arc.theta_start, arc.theta_end, opts).value;
    }
    Ok(1e-8 * (1.0 + abs_integral / TAU))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    AsymptoticallyStable,
    GloballyAsymptoticallyStable,
    Unstable,
    Marginal,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::AsymptoticallyStable => "AsymptoticallyStable",
            Verdict::GloballyAsymptoticallyStable => "GloballyAsymptoticallyStable",
            Verdict::Unstable => "Unstable",
            Verdict::Marginal => "Marginal",
            Verdict::Inconclusive => "Inconclusive",
        }
    }

    pub fn is_stable(self) -> bool {
        matches!(self, Verdict::AsymptoticallyStable | Verdict::GloballyAsymptoticallyStable)
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub case_tol: f64,
    pub panel_tol: f64,
    /// Overrides the default `1e-8·(1 + mean |ρ|)`.
    pub marginal_tol: Option<f64>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self { case_tol: DEFAULT_CASE_TOL, panel_tol: 1e-10, marginal_tol: None }
    }
}

impl AnalysisOptions {
    pub fn quadrature(&self) -> QuadratureOptions {
        QuadratureOptions { panel_tolerance: self.panel_tol, ..QuadratureOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub case: CaseKind,
    /// `None` when no rotation direction exists.
    pub direction: Option<Direction>,
    pub gamma_rg: Option<f64>,
    pub verdict: Verdict,
    pub mode_map: Option<ModeMap>,
    /// Why the verdict is inconclusive, when it is.
    pub reason: Option<String>,
    pub case_tol: f64,
    pub panel_tol: f64,
    pub marginal_tol: Option<f64>,
}

/// The sign rule: stable when `a₁₂¹γ > 0` and `a₁₂²γ < 0`, unstable for the
/// opposite strict signs, marginal (Case 2 only) when `|γ| ≤ marginal_tol`.
pub fn verdict_from(case: Case, a12_1: f64, a12_2: f64, gamma: f64, marginal_tol: f64) -> Verdict {
    if gamma.abs() <= marginal_tol {
        return if case == Case::Case2 { Verdict::Marginal } else { Verdict::Inconclusive };
    }
    if a12_1 * gamma > 0.0 && a12_2 * gamma < 0.0 {
        if case == Case::Case2 {
            Verdict::GloballyAsymptoticallyStable
        } else {
            Verdict::AsymptoticallyStable
        }
    } else if a12_1 * gamma < 0.0 && a12_2 * gamma > 0.0 {
        Verdict::Unstable
    } else {
        Verdict::Inconclusive
    }
}

pub fn stability_verdict(game: &GameSpec) -> Result<StabilityReport> {
    stability_verdict_with(game, &AnalysisOptions::default())
}

pub fn stability_verdict_with(game: &GameSpec, opts: &AnalysisOptions) -> Result<StabilityReport> {
    game.validate()?;
    let case = classify_case(game, opts.case_tol)?;
    let inconclusive = |case: CaseKind, direction, reason: String| StabilityReport {
        case,
        direction,
        gamma_rg: None,
        verdict: Verdict::Inconclusive,
        mode_map: None,
        reason: Some(reason),
        case_tol: opts.case_tol,
        panel_tol: opts.panel_tol,
        marginal_tol: opts.marginal_tol,
    };
    if !check_assumption1(game) {
        let reason = require_assumption1(game).unwrap_err().to_string();
        return Ok(inconclusive(case, None, reason));
    }
    let direction = rotation_certificate(game)?.direction;
    let map = match build_mode_map_with(game, opts.case_tol) {
        Ok(m) => m,
        Err(e) => return Ok(inconclusive(case, Some(direction), e.to_string())),
    };
    let q = opts.quadrature();
    let gamma = gamma_rg(game, &map, &q)?;
    let marginal_tol = match opts.marginal_tol {
        Some(t) => t,
        None => marginal_tolerance(game, &map, &q)?,
    };
    let verdict = verdict_from(case.case, game.a12_1(), game.a12_2(), gamma, marginal_tol);
    let reason = (verdict == Verdict::Inconclusive)
        .then(|| format!("|gamma_rg| = {} is within the marginal tolerance {marginal_tol}", gamma.abs()));
    Ok(StabilityReport {
        case,
        direction: Some(direction),
        gamma_rg: Some(gamma),
        verdict,
        mode_map: Some(map),
        reason,
        case_tol: opts.case_tol,
        panel_tol: opts.panel_tol,
        marginal_tol: Some(marginal_tol),
    })
}

//! Domains of constant payoff trend, their boundary lines near the
//! equilibrium, and the phase-indexed mode map `K(θ)`.
//!
//! Near `x*` each agent's trend sign is governed by a *local form*: the
//! linear term `βᵢᵏ·x̃` when the agent's payoff gradient does not vanish at
//! `x*`, or the homogeneous quadratic `x̃ᵀQᵢᵏx̃` when it does. Both depend on
//! the phase only, which turns the mode map into a one-dimensional sweep
//! around the circle.

use crate::error::{Error, Result};
use crate::game::{
    classify_case, jdot_form_at, nash_equilibrium, require_assumption1, rotation_certificate, Agent, Case, CaseKind,
    Direction, GameSpec, Level, Mode, DEFAULT_CASE_TOL,
};
use crate::linalg::{add, dot, norm, scale, unit, wrap_angle, Mat2, Vec2};
use rand::{Rng, SeedableRng};
use serde::Serialize;
use std::f64::consts::{PI, TAU};

/// Boundary phases closer than this are merged into one simultaneous switch.
pub const MERGE_TOL: f64 = 1e-9;

/// Tolerance on normalized local-form values when testing sign consistency.
const SIGN_TOL: f64 = 1e-12;

/// The split `J̇ᵢᵏ(x) = α₁ᵏΔᵢ¹(x) + α₂ᵏΔᵢ²(x)`.
///
/// `Δᵢʲ(x) = (∂Jᵢ/∂xⱼ)(∂Jⱼ/∂xⱼ)`, so `Δ₁¹` and `Δ₂²` are perfect squares.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaTerms {
    pub agent: Agent,
    pub x: Vec2,
    /// `[Δᵢ¹(x), Δᵢ²(x)]`.
    pub by_alpha: [f64; 2],
}

impl DeltaTerms {
    /// The perfect-square term multiplying the agent's own sensitivity.
    pub fn own(&self) -> f64 {
        self.by_alpha[self.agent.index()]
    }

    pub fn cross(&self) -> f64 {
        self.by_alpha[self.agent.other().index()]
    }

    pub fn jdot(&self, alpha1: f64, alpha2: f64) -> f64 {
        alpha1 * self.by_alpha[0] + alpha2 * self.by_alpha[1]
    }
}

pub fn delta_terms(game: &GameSpec, agent: Agent, x: Vec2) -> DeltaTerms {
    let gi = game.payoff(agent).gradient(x);
    let own1 = game.payoff1.gradient(x)[0];
    let own2 = game.payoff2.gradient(x)[1];
    DeltaTerms { agent, x, by_alpha: [gi[0] * own1, gi[1] * own2] }
}

/// `J̇ᵢᵏ(x)` evaluated through the Δ split.
pub fn jdot_by_deltas(game: &GameSpec, mode: Mode, agent: Agent, x: Vec2) -> f64 {
    let p = game.profile(mode);
    delta_terms(game, agent, x).jdot(p.alpha1, p.alpha2)
}

fn sign_matches(level: Level, value: f64, tol: f64) -> bool {
    match level {
        Level::Low => value <= tol,
        Level::High => value >= -tol,
    }
}

/// Raw domain test: `(J̇₁ᵏ, J̇₂ᵏ)` has the sign pattern named by the mode
/// (`L` ↔ `≤ 0`, `H` ↔ `≥ 0`). Overlaps are not arbitrated here.
pub fn domain_membership(game: &GameSpec, mode: Mode, x: Vec2) -> Result<bool> {
    let x_star = nash_equilibrium(game)?;
    Ok(membership_at(game, mode, x, x_star))
}

pub(crate) fn membership_at(game: &GameSpec, mode: Mode, x: Vec2, x_star: Vec2) -> bool {
    Agent::BOTH.iter().all(|&i| {
        let v = jdot_form_at(game, mode, i, x_star).eval(x);
        sign_matches(mode.level(i), v, 0.0)
    })
}

/// True iff every point belongs to at least one domain.
pub fn coverage_check(game: &GameSpec, points: &[Vec2]) -> Result<bool> {
    let x_star = nash_equilibrium(game)?;
    Ok(points.iter().all(|&x| Mode::ALL.iter().any(|&k| membership_at(game, k, x, x_star))))
}

/// [`coverage_check`] on `n_samples` uniform points in the square
/// `center ± half_width`.
pub fn coverage_check_sampled(
    game: &GameSpec,
    n_samples: usize,
    center: Vec2,
    half_width: f64,
    seed: u64,
) -> Result<bool> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let pts: Vec<Vec2> = (0..n_samples)
        .map(|_| {
            [center[0] + rng.gen_range(-half_width..=half_width), center[1] + rng.gen_range(-half_width..=half_width)]
        })
        .collect();
    coverage_check(game, &pts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Slope {
    /// Line `γ x̃₁ + x̃₂ = 0`.
    Finite(f64),
    /// Line `x̃₁ = 0`.
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LineSource {
    /// Linearization of a curved boundary; coincides with a best-response line.
    BestResponse,
    /// One of the two exact lines of an indefinite quadratic form.
    QuadraticPair,
}

/// A straight boundary through `x*` in the shifted frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryLine {
    pub agent: Agent,
    /// `None` when the line is shared by every mode.
    pub mode: Option<Mode>,
    pub slope: Slope,
    pub source: LineSource,
}

impl BoundaryLine {
    /// Direction angle of the line in `[0, π)`.
    pub fn angle(&self) -> f64 {
        match self.slope {
            Slope::Vertical => PI / 2.0,
            Slope::Finite(g) => wrap_angle((-g).atan()) % PI,
        }
    }

    /// Direction vector of the line.
    pub fn direction(&self) -> Vec2 {
        unit(self.angle())
    }
}

fn slope_from(num: f64, den: f64) -> Slope {
    if den == 0.0 {
        Slope::Vertical
    } else {
        Slope::Finite(num / den)
    }
}

/// Linearized trend boundary of a non-degenerate agent. Mode independent:
/// agent 1's line is `(a₁₂²/a₂₂²) x̃₁ + x̃₂ = 0`, agent 2's is
/// `(a₁₁¹/a₁₂¹) x̃₁ + x̃₂ = 0`.
pub fn linearized_slope(game: &GameSpec, agent: Agent, case: &CaseKind) -> Result<BoundaryLine> {
    if case.is_degenerate(agent) {
        return Err(Error::DegenerateAgent { agent });
    }
    let b = game.base_matrix();
    let slope = match agent {
        Agent::One => slope_from(b.get(1, 0), b.get(1, 1)),
        Agent::Two => slope_from(b.get(0, 0), b.get(0, 1)),
    };
    Ok(BoundaryLine { agent, mode: None, slope, source: LineSource::BestResponse })
}

pub fn linearized_slopes_case1(game: &GameSpec) -> Result<(BoundaryLine, BoundaryLine)> {
    let case = classify_case(game, DEFAULT_CASE_TOL)?;
    Ok((linearized_slope(game, Agent::One, &case)?, linearized_slope(game, Agent::Two, &case)?))
}

/// The two lines `γ̃± x̃₁ + x̃₂ = 0` on which `x̃ᵀQᵢᵏx̃` vanishes.
pub fn case2_boundary_slopes(game: &GameSpec, mode: Mode, agent: Agent) -> Result<[BoundaryLine; 2]> {
    let case = classify_case(game, DEFAULT_CASE_TOL)?;
    if !case.is_degenerate(agent) {
        return Err(Error::NotDegenerate { agent });
    }
    let x_star = nash_equilibrium(game)?;
    let q = jdot_form_at(game, mode, agent, x_star).q;
    quadratic_pair_lines(&q, agent, mode)
}

pub(crate) fn quadratic_pair_lines(q: &Mat2, agent: Agent, mode: Mode) -> Result<[BoundaryLine; 2]> {
    let (q11, q12, q22) = (q.get(0, 0), q.get(0, 1), q.get(1, 1));
    let disc = q12 * q12 - q11 * q22;
    if !(disc > 0.0) {
        return Err(Error::DefiniteForm { agent, mode });
    }
    let root = disc.sqrt();
    let line = |slope| BoundaryLine { agent, mode: Some(mode), slope, source: LineSource::QuadraticPair };
    if q22 == 0.0 {
        // x̃₁(q11 x̃₁ + 2 q12 x̃₂) = 0
        return Ok([line(Slope::Vertical), line(Slope::Finite(q11 / (2.0 * q12)))]);
    }
    Ok([line(Slope::Finite((q12 + root) / q22)), line(Slope::Finite((q12 - root) / q22))])
}

/// Phase-only sign function governing one agent's trend in one mode near `x*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum LocalForm {
    Linear(Vec2),
    Quadratic(Mat2),
}

impl LocalForm {
    fn scale(&self) -> f64 {
        match self {
            LocalForm::Linear(b) => norm(*b),
            LocalForm::Quadratic(q) => q.frobenius_norm(),
        }
    }

    /// Value on the unit circle, normalized to `[-1, 1]`-ish magnitude.
    pub(crate) fn normalized(&self, theta: f64) -> f64 {
        let s = self.scale();
        if s == 0.0 {
            return 0.0;
        }
        let eta = unit(theta);
        let v = match self {
            LocalForm::Linear(b) => dot(*b, eta),
            LocalForm::Quadratic(q) => q.quad_form(eta),
        };
        v / s
    }

    /// Phases in `[0, 2π)` where the form changes sign.
    fn sign_changes(&self) -> Vec<f64> {
        match *self {
            LocalForm::Linear(b) => {
                if b == [0.0, 0.0] {
                    return vec![];
                }
                let t = b[0].atan2(-b[1]);
                vec![wrap_angle(t), wrap_angle(t + PI)]
            }
            LocalForm::Quadratic(q) => {
                let m = 0.5 * (q.get(0, 0) + q.get(1, 1));
                let u = 0.5 * (q.get(0, 0) - q.get(1, 1));
                let v = q.get(0, 1);
                let r = u.hypot(v);
                if r == 0.0 || m.abs() >= r {
                    return vec![];
                }
                let phi = v.atan2(u);
                let a = (-m / r).acos();
                let mut out = Vec::with_capacity(4);
                for base in [(phi + a) / 2.0, (phi - a) / 2.0] {
                    out.push(wrap_angle(base));
                    out.push(wrap_angle(base + PI));
                }
                out
            }
        }
    }
}

/// Local forms indexed `[agent][mode]`.
pub(crate) type LocalForms = [[LocalForm; 4]; 2];

pub(crate) fn local_forms(game: &GameSpec, case: &CaseKind, x_star: Vec2) -> LocalForms {
    Agent::BOTH.map(|i| {
        Mode::ALL.map(|k| {
            let f = jdot_form_at(game, k, i, x_star);
            if case.is_degenerate(i) {
                LocalForm::Quadratic(f.q)
            } else {
                LocalForm::Linear(f.beta)
            }
        })
    })
}

/// Convex cones cut out by the two best-response lines.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConePartition {
    /// Sorted phases in `[0, 2π)`; cone `j` spans `phases[j]..phases[j+1]`.
    pub phases: [f64; 4],
    pub cone_modes: [Mode; 4],
}

/// The four switching phases `arctan(−a₁₂²/a₂₂²)`, `arctan(−a₁₁¹/a₁₂¹)` and
/// their antipodes.
pub fn switching_phases(game: &GameSpec) -> [f64; 4] {
    let b = game.base_matrix();
    let t1 = (-b.get(1, 0) / b.get(1, 1)).atan();
    let t2 = (-b.get(0, 0) / b.get(0, 1)).atan();
    let mut p = [wrap_angle(t1), wrap_angle(t2), wrap_angle(t1 + PI), wrap_angle(t2 + PI)];
    p.sort_by(f64::total_cmp);
    p
}

/// Linearized cone partition around a Case-1 equilibrium.
pub fn cone_partition(game: &GameSpec) -> Result<ConePartition> {
    let case = classify_case(game, DEFAULT_CASE_TOL)?;
    if case.case != Case::Case1 {
        return Err(Error::DegenerateAgent { agent: case.degenerate_agents[0] });
    }
    let x_star = nash_equilibrium(game)?;
    let forms = local_forms(game, &case, x_star);
    let phases = switching_phases(game);
    let mut cone_modes = [Mode::LL; 4];
    for j in 0..4 {
        let end = if j == 3 { phases[0] + TAU } else { phases[j + 1] };
        let mid = 0.5 * (phases[j] + end);
        // Linear forms share their sign across modes; LL is representative.
        let level = |i: Agent| {
            if forms[i.index()][Mode::LL.index()].normalized(mid) > 0.0 {
                Level::High
            } else {
                Level::Low
            }
        };
        cone_modes[j] = Mode::from_levels(level(Agent::One), level(Agent::Two));
    }
    Ok(ConePartition { phases, cone_modes })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Arc {
    pub theta_start: f64,
    pub theta_end: f64,
    pub mode: Mode,
}

/// A mode change at a phase, listed in traversal order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseSwitch {
    pub theta: f64,
    /// Agents switching, in the order they switch. Two agents with no
    /// `mid` means a simultaneous switch.
    pub agents: Vec<Agent>,
    pub pre: Mode,
    pub mid: Option<Mode>,
    pub post: Mode,
}

impl PhaseSwitch {
    pub fn is_flash(&self) -> bool {
        self.mid.is_some()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlashPhase {
    pub theta: f64,
    pub pre_mode: Mode,
    pub mid_mode: Mode,
    pub post_mode: Mode,
}

/// Piecewise-constant active mode `K(θ)` around the equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeMap {
    pub case: Case,
    pub direction: Direction,
    /// Ascending `theta_start` in `[0, 2π)`; the last arc ends at the first
    /// arc's start plus `2π`.
    pub arcs: Vec<Arc>,
    pub switches: Vec<PhaseSwitch>,
    pub flash_phases: Vec<FlashPhase>,
    pub warnings: Vec<String>,
}

impl ModeMap {
    pub fn mode_at(&self, theta: f64) -> Mode {
        let first = self.arcs[0].theta_start;
        let mut t = wrap_angle(theta - first) + first;
        if t >= first + TAU {
            t -= TAU;
        }
        let idx = self.arcs.partition_point(|a| a.theta_start <= t);
        self.arcs[idx.saturating_sub(1)].mode
    }

    /// Same function with the arc list starting `offset` further along the
    /// circle; the arc containing the new origin is split there.
    pub fn rotated_start(&self, offset: f64) -> ModeMap {
        let origin = wrap_angle(self.arcs[0].theta_start + offset);
        let mut cuts: Vec<f64> = self
            .arcs
            .iter()
            .map(|a| origin + wrap_angle(a.theta_start - origin))
            .filter(|&t| t > origin && t < origin + TAU)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.insert(0, origin);
        cuts.push(origin + TAU);
        let arcs = cuts
            .windows(2)
            .map(|w| Arc { theta_start: w[0], theta_end: w[1], mode: self.mode_at(0.5 * (w[0] + w[1])) })
            .collect();
        let mut m = self.clone();
        m.arcs = arcs;
        m
    }

    pub fn is_pi_periodic(&self, tol: f64) -> bool {
        self.arcs.iter().all(|a| {
            let mid = 0.5 * (a.theta_start + a.theta_end);
            let probe = [mid, a.theta_start + tol.max(1e-9) * 10.0, a.theta_end - tol.max(1e-9) * 10.0];
            probe.iter().all(|&t| self.mode_at(t + PI) == a.mode)
        })
    }
}

/// Builds `K(θ)` with the default case tolerance.
pub fn build_mode_map(game: &GameSpec) -> Result<ModeMap> {
    build_mode_map_with(game, DEFAULT_CASE_TOL)
}

pub fn build_mode_map_with(game: &GameSpec, case_tol: f64) -> Result<ModeMap> {
    require_assumption1(game)?;
    let direction = rotation_certificate(game)?.direction;
    let case = classify_case(game, case_tol)?;
    let x_star = nash_equilibrium(game)?;

    if game.alphas.is_loss_neutral() {
        return Ok(ModeMap {
            case: case.case,
            direction,
            arcs: vec![Arc { theta_start: 0.0, theta_end: TAU, mode: Mode::HH }],
            switches: vec![],
            flash_phases: vec![],
            warnings: vec!["all four subsystems coincide; reporting a single HH arc".into()],
        });
    }

    if case.case == Case::Case1 {
        return Ok(map_from_cones(&cone_partition(game)?, case.case, direction));
    }
    let forms = local_forms(game, &case, x_star);
    sweep(&forms, case.case, direction)
}

fn map_from_cones(cones: &ConePartition, case: Case, direction: Direction) -> ModeMap {
    let arcs: Vec<Arc> = (0..4)
        .map(|j| Arc {
            theta_start: cones.phases[j],
            theta_end: if j == 3 { cones.phases[0] + TAU } else { cones.phases[j + 1] },
            mode: cones.cone_modes[j],
        })
        .collect();
    let switches = switches_from_arcs(&arcs, direction);
    ModeMap { case, direction, arcs, switches, flash_phases: vec![], warnings: vec![] }
}

fn switches_from_arcs(arcs: &[Arc], direction: Direction) -> Vec<PhaseSwitch> {
    let n = arcs.len();
    let mut out: Vec<PhaseSwitch> = (0..n)
        .map(|j| {
            let before = arcs[(j + n - 1) % n].mode;
            let after = arcs[j].mode;
            let (pre, post) = match direction {
                Direction::Ccw => (before, after),
                Direction::Cw => (after, before),
            };
            let agents = Agent::BOTH.into_iter().filter(|&i| pre.level(i) != post.level(i)).collect();
            PhaseSwitch { theta: arcs[j].theta_start, agents, pre, mid: None, post }
        })
        .collect();
    if direction == Direction::Cw {
        out.reverse();
    }
    out
}

/// Sign-consistency table over the cells between candidate boundaries.
struct Cells {
    /// Boundary phases, ascending in `[0, 2π)`; cell `j` spans `bounds[j]..bounds[j+1]`.
    bounds: Vec<f64>,
    /// `values[cell][agent][mode]`.
    values: Vec<[[f64; 4]; 2]>,
    merged: Vec<f64>,
}

impl Cells {
    fn build(forms: &LocalForms) -> Cells {
        let mut raw: Vec<f64> = forms.iter().flatten().flat_map(|f| f.sign_changes()).collect();
        raw.sort_by(f64::total_cmp);
        let mut bounds: Vec<f64> = Vec::new();
        let mut merged = Vec::new();
        let mut cluster: Vec<f64> = Vec::new();
        for t in raw {
            match cluster.last() {
                Some(&last) if t - last <= MERGE_TOL => cluster.push(t),
                Some(_) => {
                    bounds.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
                    cluster.clear();
                    cluster.push(t);
                }
                None => cluster.push(t),
            }
        }
        if !cluster.is_empty() {
            bounds.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
        }
        // Distinct forms landing on the same phase across the 0/2π seam.
        if bounds.len() > 1 && bounds[0] + TAU - bounds[bounds.len() - 1] <= MERGE_TOL {
            bounds.pop();
            merged.push(bounds[0]);
        }
        let n = bounds.len();
        let mids: Vec<f64> = if n == 0 {
            vec![0.0]
        } else {
            (0..n)
                .map(|j| {
                    let end = if j + 1 == n { bounds[0] + TAU } else { bounds[j + 1] };
                    0.5 * (bounds[j] + end)
                })
                .collect()
        };
        let values = mids.iter().map(|&t| forms.map(|row| row.map(|f| f.normalized(t)))).collect();
        Cells { bounds, values, merged }
    }

    fn len(&self) -> usize {
        self.values.len()
    }

    fn inconsistent(&self, cell: usize, mode: Mode) -> Vec<Agent> {
        Agent::BOTH
            .into_iter()
            .filter(|&i| !sign_matches(mode.level(i), self.values[cell][i.index()][mode.index()], SIGN_TOL))
            .collect()
    }

    fn consistent(&self, cell: usize, mode: Mode) -> bool {
        self.inconsistent(cell, mode).is_empty()
    }
}

/// Applies the keep-current-mode rule when entering `cell`: a violated agent
/// flips its letter; if the flip makes the other agent inconsistent it flips
/// too (a flash). A third flip is refused.
fn enter_cell(cells: &Cells, cell: usize, mode: Mode, theta: f64) -> Result<Option<PhaseSwitch>> {
    let bad = cells.inconsistent(cell, mode);
    let fail = |detail: String| Error::NoConsistentMode { theta, detail };
    match bad.as_slice() {
        [] => Ok(None),
        [_, _] => {
            let post = mode.flip(Agent::One).flip(Agent::Two);
            if !cells.consistent(cell, post) {
                return Err(fail(format!("simultaneous switch {mode}->{post} is inconsistent")));
            }
            Ok(Some(PhaseSwitch { theta, agents: bad, pre: mode, mid: None, post }))
        }
        [i] => {
            let mid = mode.flip(*i);
            match cells.inconsistent(cell, mid).as_slice() {
                [] => Ok(Some(PhaseSwitch { theta, agents: vec![*i], pre: mode, mid: None, post: mid })),
                [j] if *j != *i => {
                    let post = mid.flip(*j);
                    if !cells.consistent(cell, post) {
                        return Err(fail(format!("third flip required after {mode}->{mid}->{post}")));
                    }
                    Ok(Some(PhaseSwitch { theta, agents: vec![*i, *j], pre: mode, mid: Some(mid), post }))
                }
                _ => Err(fail(format!("switch {mode}->{mid} leaves agent {i} inconsistent"))),
            }
        }
        _ => unreachable!(),
    }
}

/// One full turn starting in the wrap-around cell; returns the switches and
/// the mode on return.
fn revolve(cells: &Cells, start_mode: Mode, direction: Direction) -> Result<(Vec<PhaseSwitch>, Mode)> {
    if cells.bounds.is_empty() {
        return Ok((Vec::new(), start_mode));
    }
    let n = cells.len();
    let start = n - 1;
    let mut mode = start_mode;
    let mut switches = Vec::new();
    let mut cell = start;
    for _ in 0..n {
        let (next, theta) = match direction {
            Direction::Ccw => {
                let next = (cell + 1) % n;
                (next, cells.bounds[next])
            }
            Direction::Cw => ((cell + n - 1) % n, cells.bounds[cell]),
        };
        if let Some(sw) = enter_cell(cells, next, mode, theta)? {
            mode = sw.post;
            switches.push(sw);
        }
        cell = next;
    }
    Ok((switches, mode))
}

pub(crate) fn sweep(forms: &LocalForms, case: Case, direction: Direction) -> Result<ModeMap> {
    let cells = Cells::build(forms);
    let mut warnings: Vec<String> =
        cells.merged.iter().map(|t| format!("coincident boundaries merged at phase {t}")).collect();
    let start = cells.len() - 1;
    let first = Mode::ALL.into_iter().find(|&k| cells.consistent(start, k)).ok_or_else(|| Error::NoConsistentMode {
        theta: 0.0,
        detail: "no mode is sign-consistent at the sweep origin".into(),
    })?;

    // Iterate the return map until the start mode repeats.
    let mut seen = vec![first];
    let mut mode = first;
    let (switches, end_mode) = loop {
        let (sw, next) = revolve(&cells, mode, direction)?;
        if next == mode {
            break (sw, next);
        }
        if seen.contains(&next) {
            return Err(Error::NonPeriodicModeMap);
        }
        seen.push(next);
        mode = next;
    };

    if switches.is_empty() {
        return Ok(ModeMap {
            case,
            direction,
            arcs: vec![Arc { theta_start: 0.0, theta_end: TAU, mode: end_mode }],
            switches,
            flash_phases: vec![],
            warnings,
        });
    }

    let mut by_angle = switches.clone();
    by_angle.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    let n = by_angle.len();
    let arcs: Vec<Arc> = (0..n)
        .map(|j| {
            let s = &by_angle[j];
            let end = if j + 1 == n { by_angle[0].theta + TAU } else { by_angle[j + 1].theta };
            let mode = match direction {
                Direction::Ccw => s.post,
                Direction::Cw => s.pre,
            };
            Arc { theta_start: s.theta, theta_end: end, mode }
        })
        .collect();
    for w in switches.iter().filter(|s| s.agents.len() == 2 && s.mid.is_none()) {
        warnings.push(format!("simultaneous switch {}->{} at phase {}", w.pre, w.post, w.theta));
    }
    let flash_phases = switches
        .iter()
        .filter_map(|s| {
            s.mid.map(|mid| FlashPhase { theta: s.theta, pre_mode: s.pre, mid_mode: mid, post_mode: s.post })
        })
        .collect();
    Ok(ModeMap { case, direction, arcs, switches, flash_phases, warnings })
}

/// Arc modes in traversal order.
pub fn mode_transition_sequence(map: &ModeMap) -> Vec<Mode> {
    let mut seq: Vec<Mode> = map.arcs.iter().map(|a| a.mode).collect();
    if map.direction == Direction::Cw {
        seq.reverse();
    }
    seq
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlashRecord {
    pub theta: f64,
    pub pre: Mode,
    pub mid: Mode,
    pub post: Mode,
}

/// Tests whether leaving `from_mode` through the boundary at `theta` forces
/// a second, induced switch. The induced agent's trend is evaluated through
/// the Δ split just past the boundary.
pub fn check_flash_at_phase(game: &GameSpec, theta: f64, from_mode: Mode) -> Result<Option<FlashRecord>> {
    const ON_BOUNDARY: f64 = 1e-7;
    const STEP: f64 = 1e-6;
    require_assumption1(game)?;
    let direction = rotation_certificate(game)?.direction;
    let case = classify_case(game, DEFAULT_CASE_TOL)?;
    let x_star = nash_equilibrium(game)?;
    let forms = local_forms(game, &case, x_star);
    let after = theta + direction.sign() * STEP;

    let flipping: Vec<Agent> = Agent::BOTH
        .into_iter()
        .filter(|&i| {
            let f = &forms[i.index()][from_mode.index()];
            f.normalized(theta).abs() <= ON_BOUNDARY && !sign_matches(from_mode.level(i), f.normalized(after), SIGN_TOL)
        })
        .collect();
    let [first] = flipping.as_slice() else {
        // Not a boundary of this mode, or both agents switch together.
        return Ok(None);
    };
    let mid = from_mode.flip(*first);
    let other = first.other();
    let radius = if case.case == Case::Case2 { 1.0 } else { 1e-3 * (1.0 + norm(x_star)) };
    let probe = add(x_star, scale(unit(after), radius));
    let d = delta_terms(game, other, probe);
    let p = game.profile(mid);
    let v = d.jdot(p.alpha1, p.alpha2);
    let tol = 1e-12 * (d.by_alpha[0].abs() * p.alpha1 + d.by_alpha[1].abs() * p.alpha2);
    if sign_matches(mid.level(other), v, tol) {
        Ok(None)
    } else {
        Ok(Some(FlashRecord { theta, pre: from_mode, mid, post: mid.flip(other) }))
    }
}

//! Event-driven integration of the switched gradient-play dynamics
//! `ẋ = 𝔸ₖ(x − x*)`, with sensitivity switches located by bisection.

use crate::error::{Error, Result};
use crate::game::{jdot_form_at, nash_equilibrium, system_matrix, Agent, Direction, GameSpec, JdotForm, Level, Mode};
use crate::geometry::build_mode_map;
use crate::linalg::{add, dot, norm, scale, sub, wrap_angle, Mat2, Vec2};
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Tolerance on the normalized trend `J̇ᵢ / (‖∇Jᵢ‖‖ẋ‖)` when testing sign consistency.
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// Largest phase advance accepted in one step.
pub const MAX_STEP_ANGLE: f64 = PI / 8.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub x0: Vec2,
    pub t_end: f64,
    /// Defaults to `1e-3` characteristic times.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<f64>,
    /// Defaults to `1e-12` characteristic times.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event_tol: Option<f64>,
    #[serde(default = "default_stride")]
    pub record_stride: usize,
    /// Forces the starting mode instead of inferring it from `x0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_mode: Option<Mode>,
}

fn default_stride() -> usize {
    1
}

impl SimConfig {
    pub fn new(x0: Vec2, t_end: f64) -> Self {
        Self { x0, t_end, step: None, event_tol: None, record_stride: 1, initial_mode: None }
    }

    pub fn with_step(mut self, step: f64) -> Self {
        self.step = Some(step);
        self
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    /// `(step, event_tol)` after filling defaults and validating.
    pub fn resolved(&self, game: &GameSpec) -> Result<(f64, f64)> {
        let tc = game.characteristic_time();
        let step = self.step.unwrap_or(1e-3 * tc);
        let event_tol = self.event_tol.unwrap_or(1e-12 * tc);
        let bad = |m: String| Err(Error::InvalidSimConfig(m));
        if !self.x0.iter().all(|v| v.is_finite()) {
            return bad("x0 must be finite".into());
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(step > 0.0) || !step.is_finite() {
            return bad(format!("step must be positive, got {step}"));
        }
        if !(event_tol > 0.0) || event_tol >= step {
            return bad(format!("event_tol must satisfy 0 < event_tol < step, got {event_tol}"));
        }
        if self.record_stride == 0 {
            return bad("record_stride must be at least 1".into());
        }
        Ok((step, event_tol))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchEvent {
    pub t: f64,
    pub x: Vec2,
    /// In switching order; the second agent of a flash is the induced one.
    pub switching_agents: Vec<Agent>,
    pub from_mode: Mode,
    pub mid_mode: Option<Mode>,
    pub to_mode: Mode,
    pub flash: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: Vec2,
    /// `None` only for the constant trajectory at the equilibrium.
    pub mode: Option<Mode>,
    pub j1: f64,
    pub j2: f64,
    pub r: f64,
    /// Phase of `x − x*` in `[0, 2π)`.
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub x_star: Vec2,
    pub samples: Vec<Sample>,
    pub events: Vec<SwitchEvent>,
    /// The run stopped early because the state reached the equilibrium.
    pub converged: bool,
}

/// The eight trend forms and system matrices, shifted to `x*`.
struct Dynamics<'a> {
    game: &'a GameSpec,
    x_star: Vec2,
    a: [Mat2; 4],
    forms: [[JdotForm; 4]; 2],
}

impl<'a> Dynamics<'a> {
    fn new(game: &'a GameSpec) -> Result<Self> {
        let x_star = nash_equilibrium(game)?;
        Ok(Self {
            game,
            x_star,
            a: Mode::ALL.map(|k| system_matrix(game, k).matrix),
            forms: Agent::BOTH.map(|i| Mode::ALL.map(|k| jdot_form_at(game, k, i, x_star))),
        })
    }

    fn rk4(&self, mode: Mode, xt: Vec2, h: f64) -> Vec2 {
        let a = &self.a[mode.index()];
        let k1 = a.mul_vec(xt);
        let k2 = a.mul_vec(add(xt, scale(k1, 0.5 * h)));
        let k3 = a.mul_vec(add(xt, scale(k2, 0.5 * h)));
        let k4 = a.mul_vec(add(xt, scale(k3, h)));
        let incr = add(add(k1, scale(k2, 2.0)), add(scale(k3, 2.0), k4));
        add(xt, scale(incr, h / 6.0))
    }

    /// `J̇ᵢᵏ / (‖∇Jᵢ‖‖ẋ‖)`, zero where either factor vanishes.
    fn normalized_trend(&self, mode: Mode, agent: Agent, xt: Vec2) -> f64 {
        let j = self.forms[agent.index()][mode.index()].eval_shifted(xt);
        let g = norm(self.game.payoff(agent).gradient(add(self.x_star, xt)));
        let v = norm(self.a[mode.index()].mul_vec(xt));
        let d = g * v;
        if d == 0.0 || !d.is_finite() {
            0.0
        } else {
            j / d
        }
    }

    fn agent_ok(&self, mode: Mode, agent: Agent, xt: Vec2, tol: f64) -> bool {
        let v = self.normalized_trend(mode, agent, xt);
        match mode.level(agent) {
            Level::Low => v <= tol,
            Level::High => v >= -tol,
        }
    }

    fn inconsistent(&self, mode: Mode, xt: Vec2) -> Vec<Agent> {
        Agent::BOTH.into_iter().filter(|&i| !self.agent_ok(mode, i, xt, CONSISTENCY_TOL)).collect()
    }

    fn strictly_inside(&self, mode: Mode, xt: Vec2) -> bool {
        Agent::BOTH.iter().all(|&i| self.agent_ok(mode, i, xt, -CONSISTENCY_TOL))
    }

    fn sample(&self, t: f64, xt: Vec2, mode: Option<Mode>) -> Sample {
        let x = add(self.x_star, xt);
        Sample {
            t,
            x,
            mode,
            j1: self.game.payoff1.value(x),
            j2: self.game.payoff2.value(x),
            r: norm(xt),
            theta: wrap_angle(xt[1].atan2(xt[0])),
        }
    }

    /// Flip rule at an event state: violated agents flip; a single flip that
    /// leaves the other agent inconsistent is followed by its flip (flash).
    fn resolve(&self, t: f64, xt: Vec2, mode: Mode) -> Result<SwitchEvent> {
        let x = add(self.x_star, xt);
        let bad = self.inconsistent(mode, xt);
        let fail = |detail: String| Error::NoConsistentMode { theta: wrap_angle(xt[1].atan2(xt[0])), detail };
        let event = |agents: Vec<Agent>, mid: Option<Mode>, post: Mode| SwitchEvent {
            t,
            x,
            switching_agents: agents,
            from_mode: mode,
            mid_mode: mid,
            to_mode: post,
            flash: mid.is_some(),
        };
        match bad.as_slice() {
            [_, _] => {
                let post = mode.flip(Agent::One).flip(Agent::Two);
                if !self.inconsistent(post, xt).is_empty() {
                    return Err(fail(format!("simultaneous switch {mode}->{post} at t={t} is inconsistent")));
                }
                Ok(event(bad, None, post))
            }
            [i] => {
                let mid = mode.flip(*i);
                match self.inconsistent(mid, xt).as_slice() {
                    [] => Ok(event(vec![*i], None, mid)),
                    [j] if j != i => {
                        let post = mid.flip(*j);
                        if !self.inconsistent(post, xt).is_empty() {
                            return Err(fail(format!("third flip required after {mode}->{mid}->{post} at t={t}")));
                        }
                        Ok(event(vec![*i, *j], Some(mid), post))
                    }
                    _ => Err(fail(format!("switch {mode}->{mid} at t={t} leaves agent {i} inconsistent"))),
                }
            }
            _ => Err(fail(format!("resolve called at a consistent state, t={t}"))),
        }
    }

    fn initial_mode(&self, xt: Vec2) -> Result<Mode> {
        let inside: Vec<Mode> = Mode::ALL.into_iter().filter(|&k| self.strictly_inside(k, xt)).collect();
        let preferred = || build_mode_map(self.game).ok().map(|m| m.mode_at(xt[1].atan2(xt[0])));
        match inside.as_slice() {
            [k] => return Ok(*k),
            [first, ..] => {
                // Overlapping interiors: follow the phase map when it agrees.
                return Ok(preferred().filter(|k| inside.contains(k)).unwrap_or(*first));
            }
            [] => {}
        }
        let members: Vec<Mode> = Mode::ALL.into_iter().filter(|&k| self.inconsistent(k, xt).is_empty()).collect();
        let eps = 1e-6 * self.game.characteristic_time();
        for &k in &members {
            let probe = self.rk4(k, xt, eps);
            if self.strictly_inside(k, probe) {
                return Ok(k);
            }
        }
        members.first().copied().ok_or_else(|| Error::NoConsistentMode {
            theta: wrap_angle(xt[1].atan2(xt[0])),
            detail: "initial state lies in no domain".into(),
        })
    }
}

/// Mode whose domain contains `x0`; interior membership wins, boundary ties
/// go to the mode the forward flow enters.
pub fn initial_mode(game: &GameSpec, x0: Vec2) -> Result<Mode> {
    let dynamics = Dynamics::new(game)?;
    let xt = sub(x0, dynamics.x_star);
    if xt == [0.0, 0.0] {
        return Err(Error::InvalidSimConfig("x0 is the equilibrium; no mode is selected there".into()));
    }
    dynamics.initial_mode(xt)
}

fn signed_angle(from: Vec2, to: Vec2) -> f64 {
    (from[0] * to[1] - from[1] * to[0]).atan2(dot(from, to))
}

pub fn simulate(game: &GameSpec, config: &SimConfig) -> Result<Trajectory> {
    game.validate()?;
    let (step, event_tol) = config.resolved(game)?;
    let dynamics = Dynamics::new(game)?;
    let x_star = dynamics.x_star;
    let mut xt = sub(config.x0, x_star);
    let mut out = Trajectory { x_star, samples: vec![], events: vec![], converged: false };

    if xt == [0.0, 0.0] {
        out.samples.push(dynamics.sample(0.0, xt, None));
        out.converged = true;
        return Ok(out);
    }
    let mut mode = match config.initial_mode {
        Some(k) => k,
        None => dynamics.initial_mode(xt)?,
    };
    let stop_radius = 1e-12 * (1.0 + norm(x_star));
    let chatter_window = 10.0 * event_tol;
    let mut recent: Vec<f64> = Vec::new();
    let mut t = 0.0;
    let mut steps = 0usize;
    let push = |samples: &mut Vec<Sample>, s: Sample| {
        if samples.last().is_some_and(|p| p.t == s.t) {
            samples.pop();
        }
        samples.push(s);
    };
    out.samples.push(dynamics.sample(t, xt, Some(mode)));

    while t < config.t_end {
        let h = step.min(config.t_end - t);
        if h <= f64::EPSILON * config.t_end {
            break;
        }
        let next = dynamics.rk4(mode, xt, h);
        let swept = signed_angle(xt, next).abs();
        if swept > MAX_STEP_ANGLE {
            return Err(Error::StepTooLarge(format!(
                "phase advanced {swept} rad in one step of {h} at t={t}; reduce step"
            )));
        }
        if dynamics.inconsistent(mode, next).is_empty() {
            xt = next;
            t += h;
            steps += 1;
            if steps.is_multiple_of(config.record_stride) {
                push(&mut out.samples, dynamics.sample(t, xt, Some(mode)));
            }
        } else {
            let (mut lo, mut hi) = (0.0, h);
            while hi - lo > event_tol {
                let mid = 0.5 * (lo + hi);
                if dynamics.inconsistent(mode, dynamics.rk4(mode, xt, mid)).is_empty() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            xt = dynamics.rk4(mode, xt, hi);
            t += hi;
            let ev = dynamics.resolve(t, xt, mode)?;
            mode = ev.to_mode;
            recent.retain(|&s| t - s <= chatter_window);
            recent.push(t);
            if recent.len() > 4 {
                return Err(Error::Chattering { t, x: add(x_star, xt), events: recent.len(), window: chatter_window });
            }
            out.events.push(ev);
            push(&mut out.samples, dynamics.sample(t, xt, Some(mode)));
        }
        if norm(xt) < stop_radius {
            out.converged = true;
            break;
        }
    }
    push(&mut out.samples, dynamics.sample(t, xt, Some(mode)));
    Ok(out)
}

/// Unwrapped signed phase of each sample relative to the first.
fn unwrapped_phase(traj: &Trajectory) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(traj.samples.len());
    let mut prev: Option<f64> = None;
    for s in &traj.samples {
        if let Some(p) = prev {
            acc += phase_step(p, s.theta);
        }
        out.push(acc);
        prev = Some(s.theta);
    }
    out
}

/// Signed phase change in `(−π, π]` between two recorded phases.
fn phase_step(from: f64, to: f64) -> f64 {
    let d = (to - from).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// State at a completed revolution, interpolated linearly in phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseReturn {
    pub revolution: usize,
    pub t: f64,
    pub x: Vec2,
    pub log_r: f64,
}

/// Returns to the starting phase after each full turn in the rotation direction.
pub fn phase_returns(traj: &Trajectory) -> Vec<PhaseReturn> {
    let phi = unwrapped_phase(traj);
    let Some(&last) = phi.last() else { return vec![] };
    let s = if last >= 0.0 { 1.0 } else { -1.0 };
    let mut out = Vec::new();
    let mut n = 1usize;
    for w in 1..phi.len() {
        let (p0, p1) = (s * phi[w - 1], s * phi[w]);
        while p1 >= TAU * n as f64 && p0 < TAU * n as f64 {
            let target = TAU * n as f64;
            let u = (target - p0) / (p1 - p0);
            let (a, b) = (&traj.samples[w - 1], &traj.samples[w]);
            let lerp = |x: f64, y: f64| x + u * (y - x);
            out.push(PhaseReturn {
                revolution: n,
                t: lerp(a.t, b.t),
                x: [lerp(a.x[0], b.x[0]), lerp(a.x[1], b.x[1])],
                log_r: lerp(a.r.ln(), b.r.ln()),
            });
            n += 1;
        }
    }
    out
}

/// `log(r_{n}/r_{n−1})` for each completed revolution.
pub fn measure_radial_growth(traj: &Trajectory) -> Result<Vec<f64>> {
    let returns = phase_returns(traj);
    if returns.is_empty() {
        return Err(Error::InsufficientRevolutions { found: 0 });
    }
    let log_r0 = traj.samples[0].r.ln();
    let mut prev = log_r0;
    Ok(returns
        .iter()
        .map(|p| {
            let d = p.log_r - prev;
            prev = p.log_r;
            d
        })
        .collect())
}

pub fn detect_flash_events(traj: &Trajectory) -> Vec<SwitchEvent> {
    traj.events.iter().filter(|e| e.flash).cloned().collect()
}

/// Rotation direction observed along the trajectory, if it never reverses.
pub fn observed_direction(traj: &Trajectory) -> Option<Direction> {
    let mut sign = 0.0;
    for w in traj.samples.windows(2) {
        let d = phase_step(w[0].theta, w[1].theta);
        if d == 0.0 {
            continue;
        }
        if sign == 0.0 {
            sign = d.signum();
        } else if d.signum() != sign {
            return None;
        }
    }
    match sign {
        s if s > 0.0 => Some(Direction::Ccw),
        s if s < 0.0 => Some(Direction::Cw),
        _ => None,
    }
}

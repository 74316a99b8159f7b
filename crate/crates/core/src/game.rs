//! Game instance, per-mode system matrices, eigenstructure and the
//! quadratic forms governing each agent's payoff trend.

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, sub, Mat2, Vec2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Default relative tolerance for deciding whether `Aᵢx* + bᵢ` vanishes.
pub const DEFAULT_CASE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Agent {
    One,
    Two,
}

impl Agent {
    pub const BOTH: [Agent; 2] = [Agent::One, Agent::Two];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Agent::One => 0,
            Agent::Two => 1,
        }
    }

    pub fn other(self) -> Agent {
        match self {
            Agent::One => Agent::Two,
            Agent::Two => Agent::One,
        }
    }

    pub fn number(self) -> u8 {
        self.index() as u8 + 1
    }
}

impl fmt::Display for Agent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Sensitivity level of one agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Level {
    Low,
    High,
}

impl Level {
    pub fn flip(self) -> Level {
        match self {
            Level::Low => Level::High,
            Level::High => Level::Low,
        }
    }
}

/// Joint sensitivity configuration. The first letter is agent 1's level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Mode {
    LL,
    HL,
    LH,
    HH,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::LL, Mode::HL, Mode::LH, Mode::HH];

    pub fn from_levels(l1: Level, l2: Level) -> Mode {
        match (l1, l2) {
            (Level::Low, Level::Low) => Mode::LL,
            (Level::High, Level::Low) => Mode::HL,
            (Level::Low, Level::High) => Mode::LH,
            (Level::High, Level::High) => Mode::HH,
        }
    }

    pub fn level(self, agent: Agent) -> Level {
        let (l1, l2) = match self {
            Mode::LL => (Level::Low, Level::Low),
            Mode::HL => (Level::High, Level::Low),
            Mode::LH => (Level::Low, Level::High),
            Mode::HH => (Level::High, Level::High),
        };
        match agent {
            Agent::One => l1,
            Agent::Two => l2,
        }
    }

    /// Flips the level of a single agent.
    pub fn flip(self, agent: Agent) -> Mode {
        let mut l = [self.level(Agent::One), self.level(Agent::Two)];
        l[agent.index()] = l[agent.index()].flip();
        Mode::from_levels(l[0], l[1])
    }

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Mode::LL => 0,
            Mode::HL => 1,
            Mode::LH => 2,
            Mode::HH => 3,
        }
    }

    /// Mode with the agent roles exchanged (`HL` ↔ `LH`).
    pub fn swapped(self) -> Mode {
        Mode::from_levels(self.level(Agent::Two), self.level(Agent::One))
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::LL => "LL",
            Mode::HL => "HL",
            Mode::LH => "LH",
            Mode::HH => "HH",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.as_str() == s)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `J(x) = ½ xᵀAx + bᵀx + c` with symmetric `A`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadraticPayoff {
    pub a: Mat2,
    pub b: Vec2,
    pub c: f64,
}

impl QuadraticPayoff {
    pub fn new(a: Mat2, b: Vec2, c: f64) -> Self {
        Self { a, b, c }
    }

    pub fn value(&self, x: Vec2) -> f64 {
        0.5 * self.a.quad_form(x) + dot(self.b, x) + self.c
    }

    pub fn gradient(&self, x: Vec2) -> Vec2 {
        let ax = self.a.mul_vec(x);
        [ax[0] + self.b[0], ax[1] + self.b[1]]
    }
}

/// Loss-aversion sensitivities `αᵢᴸ ≤ αᵢᴴ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sensitivities {
    pub a1_low: f64,
    pub a1_high: f64,
    pub a2_low: f64,
    pub a2_high: f64,
}

impl Sensitivities {
    pub fn new(a1_low: f64, a1_high: f64, a2_low: f64, a2_high: f64) -> Self {
        Self { a1_low, a1_high, a2_low, a2_high }
    }

    pub fn uniform(a1: f64, a2: f64) -> Self {
        Self::new(a1, a1, a2, a2)
    }

    pub fn get(&self, agent: Agent, level: Level) -> f64 {
        match (agent, level) {
            (Agent::One, Level::Low) => self.a1_low,
            (Agent::One, Level::High) => self.a1_high,
            (Agent::Two, Level::Low) => self.a2_low,
            (Agent::Two, Level::High) => self.a2_high,
        }
    }

    pub fn is_loss_neutral(&self) -> bool {
        self.a1_low == self.a1_high && self.a2_low == self.a2_high
    }
}

/// The per-mode sensitivity pair and the gaps `δᵢ = αᵢᴴ − αᵢᴸ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityProfile {
    pub alpha1: f64,
    pub alpha2: f64,
    pub delta1: f64,
    pub delta2: f64,
}

impl SensitivityProfile {
    pub fn alpha(&self, agent: Agent) -> f64 {
        match agent {
            Agent::One => self.alpha1,
            Agent::Two => self.alpha2,
        }
    }

    pub fn delta(&self, agent: Agent) -> f64 {
        match agent {
            Agent::One => self.delta1,
            Agent::Two => self.delta2,
        }
    }
}

/// A complete problem instance: two quadratic payoffs and four sensitivities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameSpec {
    pub payoff1: QuadraticPayoff,
    pub payoff2: QuadraticPayoff,
    pub alphas: Sensitivities,
}

impl GameSpec {
    /// Builds a game and validates concavity, nondegeneracy, symmetry and
    /// the loss-aversion ordering.
    pub fn new(payoff1: QuadraticPayoff, payoff2: QuadraticPayoff, alphas: Sensitivities) -> Result<Self> {
        let game = Self { payoff1, payoff2, alphas };
        game.validate()?;
        Ok(game)
    }

    /// Builds a game without validating it. Analysis routines assume a
    /// validated game; this exists for probing behaviour outside the model's
    /// hypotheses (e.g. `αᴴ < αᴸ`).
    pub fn new_unchecked(payoff1: QuadraticPayoff, payoff2: QuadraticPayoff, alphas: Sensitivities) -> Self {
        Self { payoff1, payoff2, alphas }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid =
            |field: &str, message: &str| Error::InvalidGame { field: field.to_string(), message: message.to_string() };
        for (name, p) in [("game.A1", &self.payoff1), ("game.A2", &self.payoff2)] {
            let flat = p.a.to_row_major();
            if let Some(i) = flat.iter().position(|v| !v.is_finite()) {
                return Err(invalid(&format!("{name}[{i}]"), "entry is not finite"));
            }
            if !p.a.is_symmetric() {
                return Err(invalid(&format!("{name}[2]"), "matrix must be symmetric (A[1] == A[2])"));
            }
        }
        for (name, p) in [("game.b1", &self.payoff1), ("game.b2", &self.payoff2)] {
            if let Some(i) = p.b.iter().position(|v| !v.is_finite()) {
                return Err(invalid(&format!("{name}[{i}]"), "entry is not finite"));
            }
        }
        if !(self.payoff1.a.get(0, 0) < 0.0) {
            return Err(invalid("game.A1[0]", "a11 of agent 1 must be negative (strict concavity in own variable)"));
        }
        if !(self.payoff2.a.get(1, 1) < 0.0) {
            return Err(invalid("game.A2[3]", "a22 of agent 2 must be negative (strict concavity in own variable)"));
        }
        let base = self.base_matrix();
        if base.det() == 0.0 {
            return Err(invalid("game", "a11¹·a22² must differ from a12¹·a12² (best-response lines are parallel)"));
        }
        let a = &self.alphas;
        for (field, v) in [
            ("alphas.a1_low", a.a1_low),
            ("alphas.a1_high", a.a1_high),
            ("alphas.a2_low", a.a2_low),
            ("alphas.a2_high", a.a2_high),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(invalid(field, "sensitivity must be positive and finite"));
            }
        }
        if a.a1_low > a.a1_high {
            return Err(invalid("alphas.a1_high", "a1_high must be >= a1_low"));
        }
        if a.a2_low > a.a2_high {
            return Err(invalid("alphas.a2_high", "a2_high must be >= a2_low"));
        }
        Ok(())
    }

    pub fn payoff(&self, agent: Agent) -> &QuadraticPayoff {
        match agent {
            Agent::One => &self.payoff1,
            Agent::Two => &self.payoff2,
        }
    }

    /// `[[a₁₁¹, a₁₂¹], [a₁₂², a₂₂²]]`: row i is agent i's own-gradient row.
    pub fn base_matrix(&self) -> Mat2 {
        let a1 = &self.payoff1.a;
        let a2 = &self.payoff2.a;
        Mat2::new(a1.get(0, 0), a1.get(0, 1), a2.get(1, 0), a2.get(1, 1))
    }

    pub fn a12_1(&self) -> f64 {
        self.payoff1.a.get(0, 1)
    }

    pub fn a12_2(&self) -> f64 {
        self.payoff2.a.get(0, 1)
    }

    pub fn profile(&self, mode: Mode) -> SensitivityProfile {
        let a = &self.alphas;
        SensitivityProfile {
            alpha1: a.get(Agent::One, mode.level(Agent::One)),
            alpha2: a.get(Agent::Two, mode.level(Agent::Two)),
            delta1: a.a1_high - a.a1_low,
            delta2: a.a2_high - a.a2_low,
        }
    }

    /// Characteristic time `1 / max_k |Re λ(𝔸ₖ)|`.
    pub fn characteristic_time(&self) -> f64 {
        let m = Mode::ALL
            .iter()
            .map(|&k| {
                let e = eigen_info(self, k);
                e.eigenvalues[0].re.abs().max(e.eigenvalues[1].re.abs())
            })
            .fold(0.0_f64, f64::max);
        if m > 0.0 {
            1.0 / m
        } else {
            1.0
        }
    }
}

/// `x* = −B⁻¹ [b₁¹, b₂²]` with `B` the base matrix.
pub fn nash_equilibrium(game: &GameSpec) -> Result<Vec2> {
    let base = game.base_matrix();
    let inv = base.inverse().ok_or_else(|| Error::InvalidGame {
        field: "game".into(),
        message: "best-response matrix is singular".into(),
    })?;
    let rhs = [game.payoff1.b[0], game.payoff2.b[1]];
    let x = inv.mul_vec(rhs);
    Ok([-x[0], -x[1]])
}

/// System matrix `𝔸ₖ = diag(α₁ᵏ, α₂ᵏ)·B` for one mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemMatrix {
    pub mode: Mode,
    pub matrix: Mat2,
}

pub fn system_matrix(game: &GameSpec, mode: Mode) -> SystemMatrix {
    let p = game.profile(mode);
    let b = game.base_matrix();
    SystemMatrix {
        mode,
        matrix: Mat2::new(
            p.alpha1 * b.get(0, 0),
            p.alpha1 * b.get(0, 1),
            p.alpha2 * b.get(1, 0),
            p.alpha2 * b.get(1, 1),
        ),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenInfo {
    pub mode: Mode,
    /// Half trace `ψₖ`.
    pub psi: f64,
    /// `ψₖ² − α₁ᵏα₂ᵏ det B`.
    pub discriminant: f64,
    pub eigenvalues: [Complex64; 2],
    pub complex_conjugate: bool,
}

pub fn eigen_info(game: &GameSpec, mode: Mode) -> EigenInfo {
    let p = game.profile(mode);
    let b = game.base_matrix();
    let psi = 0.5 * (p.alpha1 * b.get(0, 0) + p.alpha2 * b.get(1, 1));
    let disc = psi * psi - p.alpha1 * p.alpha2 * b.det();
    let eigenvalues = if disc < 0.0 {
        let w = (-disc).sqrt();
        [Complex64::new(psi, w), Complex64::new(psi, -w)]
    } else {
        let s = disc.sqrt();
        [Complex64::new(psi + s, 0.0), Complex64::new(psi - s, 0.0)]
    };
    EigenInfo { mode, psi, discriminant: disc, eigenvalues, complex_conjugate: disc < 0.0 }
}

/// True iff every mode matrix has a complex-conjugate eigenvalue pair.
pub fn check_assumption1(game: &GameSpec) -> bool {
    Mode::ALL.iter().all(|&k| eigen_info(game, k).complex_conjugate)
}

pub(crate) fn require_assumption1(game: &GameSpec) -> Result<()> {
    if check_assumption1(game) {
        Ok(())
    } else {
        let bad: Vec<_> =
            Mode::ALL.iter().filter(|&&k| !eigen_info(game, k).complex_conjugate).map(|k| k.as_str()).collect();
        Err(Error::AssumptionViolated(format!("system matrices of modes {} have real eigenvalues", bad.join(","))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Case {
    /// Neither payoff gradient vanishes at `x*`.
    Case1,
    /// Both payoff gradients vanish at `x*`.
    Case2,
    /// Exactly one payoff gradient vanishes at `x*`.
    Case3,
}

impl Case {
    pub fn as_str(self) -> &'static str {
        match self {
            Case::Case1 => "Case1",
            Case::Case2 => "Case2",
            Case::Case3 => "Case3",
        }
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CaseKind {
    pub case: Case,
    /// Agents whose full gradient `Aᵢx* + bᵢ` vanishes, in ascending order.
    pub degenerate_agents: Vec<Agent>,
}

impl CaseKind {
    pub fn is_degenerate(&self, agent: Agent) -> bool {
        self.degenerate_agents.contains(&agent)
    }
}

/// `Aᵢx* + bᵢ`, the full payoff gradient of agent `i` at the equilibrium.
pub fn gradient_at_equilibrium(game: &GameSpec, agent: Agent, x_star: Vec2) -> Vec2 {
    game.payoff(agent).gradient(x_star)
}

pub fn classify_case(game: &GameSpec, tol: f64) -> Result<CaseKind> {
    let x_star = nash_equilibrium(game)?;
    let degenerate_agents: Vec<Agent> = Agent::BOTH
        .into_iter()
        .filter(|&i| {
            let p = game.payoff(i);
            let g = p.gradient(x_star);
            norm(g) <= tol * (p.a.frobenius_norm() * norm(x_star) + norm(p.b) + 1.0)
        })
        .collect();
    let case = match degenerate_agents.len() {
        0 => Case::Case1,
        2 => Case::Case2,
        _ => Case::Case3,
    };
    Ok(CaseKind { case, degenerate_agents })
}

/// `J̇ᵢᵏ(x) = ½ x̃ᵀQ x̃ + βᵀx̃` with `x̃ = x − x*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JdotForm {
    pub agent: Agent,
    pub mode: Mode,
    pub q: Mat2,
    pub beta: Vec2,
    pub x_star: Vec2,
}

impl JdotForm {
    pub fn eval_shifted(&self, xt: Vec2) -> f64 {
        0.5 * self.q.quad_form(xt) + dot(self.beta, xt)
    }

    pub fn eval(&self, x: Vec2) -> f64 {
        self.eval_shifted(sub(x, self.x_star))
    }
}

pub fn jdot_form(game: &GameSpec, mode: Mode, agent: Agent) -> Result<JdotForm> {
    let x_star = nash_equilibrium(game)?;
    Ok(jdot_form_at(game, mode, agent, x_star))
}

pub(crate) fn jdot_form_at(game: &GameSpec, mode: Mode, agent: Agent, x_star: Vec2) -> JdotForm {
    let ak = system_matrix(game, mode).matrix;
    let ai = game.payoff(agent).a;
    let prod = ai * ak;
    let q = prod + prod.transpose();
    // Mirror the off-diagonal so Q is symmetric bit-for-bit.
    let q = Mat2::symmetric(q.get(0, 0), q.get(0, 1), q.get(1, 1));
    let g = gradient_at_equilibrium(game, agent, x_star);
    let beta = ak.transpose().mul_vec(g);
    JdotForm { agent, mode, q, beta, x_star }
}

pub fn jdot_value(game: &GameSpec, mode: Mode, agent: Agent, x: Vec2) -> Result<f64> {
    Ok(jdot_form(game, mode, agent)?.eval(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "CCW")]
    Ccw,
    #[serde(rename = "CW")]
    Cw,
}

impl Direction {
    /// `+1` for counterclockwise, `−1` for clockwise.
    pub fn sign(self) -> f64 {
        match self {
            Direction::Ccw => 1.0,
            Direction::Cw => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Ccw => "CCW",
            Direction::Cw => "CW",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Definiteness {
    Positive,
    Negative,
}

/// Proof that the flow rotates in a single direction around `x*`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationCertificate {
    pub direction: Direction,
    /// `Pₖ`, indexed by [`Mode::index`].
    pub p: [Mat2; 4],
    pub definiteness: [Definiteness; 4],
}

impl RotationCertificate {
    pub fn p_for(&self, mode: Mode) -> &Mat2 {
        &self.p[mode.index()]
    }
}

/// Symmetric `Pₖ` with `ηᵀPₖη = det[η, 𝔸ₖη]`, the angular speed on the unit circle.
pub fn p_matrix(game: &GameSpec, mode: Mode) -> Mat2 {
    let p = game.profile(mode);
    let b = game.base_matrix();
    let off = 0.5 * (-p.alpha1 * b.get(0, 0) + p.alpha2 * b.get(1, 1));
    Mat2::symmetric(p.alpha2 * b.get(1, 0), off, -p.alpha1 * b.get(0, 1))
}

pub fn rotation_certificate(game: &GameSpec) -> Result<RotationCertificate> {
    require_assumption1(game)?;
    let (a12_1, a12_2) = (game.a12_1(), game.a12_2());
    let direction = if a12_1 < 0.0 && a12_2 > 0.0 {
        Direction::Ccw
    } else if a12_1 > 0.0 && a12_2 < 0.0 {
        Direction::Cw
    } else {
        return Err(Error::AssumptionViolated(format!(
            "off-diagonal signs a12¹={a12_1}, a12²={a12_2} do not fix a rotation direction"
        )));
    };
    let p = Mode::ALL.map(|k| p_matrix(game, k));
    let definiteness =
        p.map(|m| if m.get(0, 0) > 0.0 && m.det() > 0.0 { Definiteness::Positive } else { Definiteness::Negative });
    Ok(RotationCertificate { direction, p, definiteness })
}

/// Exchanges the agents' roles and state coordinates.
pub fn swap_agents(game: &GameSpec) -> GameSpec {
    let swap_payoff = |p: &QuadraticPayoff| QuadraticPayoff {
        a: Mat2::new(p.a.get(1, 1), p.a.get(1, 0), p.a.get(0, 1), p.a.get(0, 0)),
        b: [p.b[1], p.b[0]],
        c: p.c,
    };
    let a = &game.alphas;
    GameSpec {
        payoff1: swap_payoff(&game.payoff2),
        payoff2: swap_payoff(&game.payoff1),
        alphas: Sensitivities::new(a.a2_low, a.a2_high, a.a1_low, a.a1_high),
    }
}

/// The two worked games used throughout the tests and docs.
pub mod examples {
    use super::*;

    /// Case 1, counterclockwise, asymptotically stable.
    pub fn example1() -> GameSpec {
        GameSpec::new(
            QuadraticPayoff::new(Mat2::symmetric(-2.0, -4.0, -9.0), [-10.0, -5.0], 162.47),
            QuadraticPayoff::new(Mat2::symmetric(-6.0, 3.0, -2.0), [30.0, -25.0], 0.0),
            Sensitivities::new(1.0, 2.0, 1.0, 3.0),
        )
        .expect("example 1 is valid")
    }

    /// Case 2, clockwise, unstable despite every mode being a stable matrix.
    pub fn example2() -> GameSpec {
        example2_with(Sensitivities::new(1.0, 6.0, 1.0, 9.0))
    }

    pub fn example2_with(alphas: Sensitivities) -> GameSpec {
        GameSpec::new(
            QuadraticPayoff::new(Mat2::symmetric(-2.0, 4.0, -10.0), [0.0, 0.0], 0.0),
            QuadraticPayoff::new(Mat2::symmetric(-10.0, -4.0, -2.0), [0.0, 0.0], 0.0),
            alphas,
        )
        .expect("example 2 is valid")
    }
}

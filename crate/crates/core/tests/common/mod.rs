#![allow(dead_code)]

use nashswitch::game::{check_assumption1, eigen_info, nash_equilibrium, rotation_certificate};
use nashswitch::geometry::ModeMap;
use nashswitch::linalg::{unit, Mat2, Vec2};
use nashswitch::quadrature::{adaptive_simpson, QuadratureOptions};
use nashswitch::{Case, GameSpec, Mode, QuadraticPayoff, Sensitivities};
use rand::rngs::StdRng;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    Case1,
    Case2,
    /// Agent 1 degenerate when `true`, agent 2 otherwise.
    Case3(bool),
    /// Case 2 with both payoff matrices sign-indefinite.
    Case2Indefinite,
    ZeroSum,
}

fn quarter(rng: &mut StdRng, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo..hi) * 4.0).round() / 4.0
}

fn alphas(rng: &mut StdRng) -> Sensitivities {
    let l1 = rng.gen_range(0.5..2.0);
    let l2 = rng.gen_range(0.5..2.0);
    Sensitivities::new(l1, l1 * rng.gen_range(1.2..5.0), l2, l2 * rng.gen_range(1.2..5.0))
}

fn nonzero(rng: &mut StdRng) -> f64 {
    let v = quarter(rng, 1.0, 10.0);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

fn candidate(rng: &mut StdRng, kind: Kind) -> GameSpec {
    let xs: Vec2 =
        [(rng.gen_range(-5.0..5.0_f64) * 2.0).round() / 2.0, (rng.gen_range(-5.0..5.0_f64) * 2.0).round() / 2.0];
    if kind == Kind::ZeroSum {
        let a1 = Mat2::symmetric(-quarter(rng, 0.5, 5.0), quarter(rng, -5.0, 5.0), quarter(rng, 0.5, 5.0));
        let b1 = [quarter(rng, -5.0, 5.0), quarter(rng, -5.0, 5.0)];
        return GameSpec::new_unchecked(
            QuadraticPayoff::new(a1, b1, 0.0),
            QuadraticPayoff::new(-a1, [-b1[0], -b1[1]], 0.0),
            alphas(rng),
        );
    }
    let a1 = Mat2::symmetric(-quarter(rng, 0.5, 5.0), quarter(rng, -5.0, 5.0), quarter(rng, -5.0, 5.0));
    let a2 = Mat2::symmetric(quarter(rng, -5.0, 5.0), quarter(rng, -5.0, 5.0), -quarter(rng, 0.5, 5.0));
    let (c1, c2) = match kind {
        Kind::Case1 => (nonzero(rng), nonzero(rng)),
        Kind::Case2 | Kind::Case2Indefinite => (0.0, 0.0),
        Kind::Case3(true) => (0.0, nonzero(rng)),
        Kind::Case3(false) => (nonzero(rng), 0.0),
        Kind::ZeroSum => unreachable!(),
    };
    let b_for = |a: &Mat2, g: Vec2| {
        let ax = a.mul_vec(xs);
        [g[0] - ax[0], g[1] - ax[1]]
    };
    GameSpec::new_unchecked(
        QuadraticPayoff::new(a1, b_for(&a1, [0.0, c1]), rng.gen_range(-5.0..5.0)),
        QuadraticPayoff::new(a2, b_for(&a2, [c2, 0.0]), rng.gen_range(-5.0..5.0)),
        alphas(rng),
    )
}

/// A valid game of the requested kind passing `check_assumption1` with a fixed
/// rotation direction.
pub fn random_game(rng: &mut StdRng, kind: Kind) -> GameSpec {
    loop {
        let g = candidate(rng, kind);
        if g.validate().is_err() || !check_assumption1(&g) || rotation_certificate(&g).is_err() {
            continue;
        }
        if kind == Kind::Case2Indefinite && !(g.payoff1.a.det() < 0.0 && g.payoff2.a.det() < 0.0) {
            continue;
        }
        let want = match kind {
            Kind::Case1 => Case::Case1,
            Kind::Case3(_) => Case::Case3,
            _ => Case::Case2,
        };
        match nashswitch::game::classify_case(&g, nashswitch::game::DEFAULT_CASE_TOL) {
            Ok(c) if c.case == want => return g,
            _ => continue,
        }
    }
}

/// Time for one revolution: `∫ dθ / |ηᵀP_{K(θ)}η|`.
pub fn revolution_time(game: &GameSpec, map: &ModeMap) -> f64 {
    let opts = QuadratureOptions { panel_tolerance: 1e-8, ..Default::default() };
    map.arcs
        .iter()
        .map(|a| {
            let p = nashswitch::game::p_matrix(game, a.mode);
            adaptive_simpson(|t| 1.0 / p.quad_form(unit(t)).abs(), a.theta_start, a.theta_end, &opts).value
        })
        .sum()
}

/// A step resolving the fastest rotation: `1e-3 / max |λ|`.
pub fn fine_step(game: &GameSpec) -> f64 {
    let m = Mode::ALL.iter().map(|&k| eigen_info(game, k).eigenvalues[0].norm()).fold(0.0_f64, f64::max);
    1e-3 / m
}

pub fn x_star(game: &GameSpec) -> Vec2 {
    nash_equilibrium(game).unwrap()
}

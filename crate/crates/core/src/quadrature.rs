//! Adaptive Simpson quadrature.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureOptions {
    /// Absolute error target for a whole call; halved at every split.
    pub panel_tolerance: f64,
    /// Maximum recursion depth.
    pub max_subdivisions: u32,
    /// Cap on integrand evaluations per call.
    #[serde(default = "default_max_evaluations")]
    pub max_evaluations: usize,
}

fn default_max_evaluations() -> usize {
    1 << 20
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { panel_tolerance: 1e-10, max_subdivisions: 50, max_evaluations: default_max_evaluations() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    /// Sum of the Richardson error estimates over accepted panels.
    pub error_estimate: f64,
    /// False if some panel hit the depth limit before meeting its tolerance.
    pub converged: bool,
}

/// Integrates `f` over `[a, b]`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: &QuadratureOptions) -> Quadrature {
    if a == b {
        return Quadrature { value: 0.0, error_estimate: 0.0, converged: true };
    }
    if b < a {
        let q = adaptive_simpson(f, b, a, opts);
        return Quadrature { value: -q.value, ..q };
    }
    let (fa, fb) = (f(a), f(b));
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut out = Quadrature { value: 0.0, error_estimate: 0.0, converged: true };
    let mut budget = opts.max_evaluations.saturating_sub(3);
    recurse(&f, a, b, fa, fm, fb, whole, opts.panel_tolerance, opts.max_subdivisions, &mut budget, &mut out);
    out
}

#[allow(clippy::too_many_arguments)]
fn recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    budget: &mut usize,
    out: &mut Quadrature,
) {
    if *budget < 2 {
        out.converged = false;
        out.value += whole;
        return;
    }
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    *budget = budget.saturating_sub(2);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    let noise = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    let accurate = delta.abs() <= (15.0 * tol).max(noise);
    if accurate || depth == 0 || *budget == 0 || m <= a || m >= b {
        if !accurate {
            out.converged = false;
        }
        out.value += left + right + delta / 15.0;
        out.error_estimate += delta.abs() / 15.0;
        return;
    }
    recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, budget, out);
    recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, budget, out);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = adaptive_simpson(|x| 3.0 * x * x * x - x + 2.0, -1.0, 2.0, &QuadratureOptions::default());
        assert!((q.value - (3.0 * 15.0 / 4.0 - 1.5 + 6.0)).abs() < 1e-13);
        assert!(q.converged);
    }

    #[test]
    fn smooth_transcendental() {
        let q = adaptive_simpson(f64::sin, 0.0, std::f64::consts::PI, &QuadratureOptions::default());
        assert!((q.value - 2.0).abs() < 1e-10);
        let q = adaptive_simpson(|x: f64| 1.0 / (1.0 + x * x), 0.0, 1.0, &QuadratureOptions::default());
        assert!((q.value - std::f64::consts::FRAC_PI_4).abs() < 1e-10);
    }

    #[test]
    fn reversed_interval_is_negated() {
        let o = QuadratureOptions::default();
        let a = adaptive_simpson(f64::exp, 0.0, 1.0, &o).value;
        let b = adaptive_simpson(f64::exp, 1.0, 0.0, &o).value;
        assert!((a + b).abs() < 1e-14);
    }

    #[test]
    fn depth_limit_reports_nonconvergence() {
        let q = adaptive_simpson(
            |x: f64| x.abs().sqrt(),
            -1.0,
            1.0,
            &QuadratureOptions { panel_tolerance: 1e-15, max_subdivisions: 3, ..Default::default() },
        );
        assert!(!q.converged);
    }

    #[test]
    fn evaluation_budget_bounds_work_on_a_near_pole() {
        let calls = std::cell::Cell::new(0usize);
        let f = |x: f64| {
            calls.set(calls.get() + 1);
            1.0 / (x * x + 1e-14)
        };
        let opts = QuadratureOptions { panel_tolerance: 1e-30, max_evaluations: 10_000, ..Default::default() };
        let q = adaptive_simpson(f, -1.0, 1.0, &opts);
        assert!(calls.get() <= 10_000);
        assert!(!q.converged);
    }
}

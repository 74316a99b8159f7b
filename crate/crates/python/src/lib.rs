//! Python bindings for `nashswitch`.

use nashswitch as ns;
use ns::config::ConfigDoc;
use ns::game::{classify_case, eigen_info, jdot_value, nash_equilibrium, DEFAULT_CASE_TOL};
use ns::linalg::Mat2;
use ns::report::ReportDoc;
use ns::simulate::measure_radial_growth;
use ns::{Agent, GameSpec, Mode, QuadraticPayoff, Sensitivities};
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyDict};

create_exception!(nashswitch_py, NashswitchError, PyValueError, "Raised for invalid games and failed analyses.");

fn err(e: ns::Error) -> PyErr {
    NashswitchError::new_err(format!("[{}] {e}", e.kind()))
}

fn parse_mode(s: &str) -> PyResult<Mode> {
    Mode::parse(s).ok_or_else(|| PyValueError::new_err(format!("unknown mode {s:?}; expected LL, HL, LH or HH")))
}

fn parse_agent(a: u8) -> PyResult<Agent> {
    match a {
        1 => Ok(Agent::One),
        2 => Ok(Agent::Two),
        _ => Err(PyValueError::new_err(format!("agent must be 1 or 2, got {a}"))),
    }
}

/// A two-agent quadratic game with loss-averse sensitivities.
#[pyclass(name = "Game", module = "nashswitch_py", frozen, from_py_object)]
#[derive(Clone)]
pub struct PyGame {
    inner: GameSpec,
}

#[pymethods]
impl PyGame {
    /// `a1`, `a2` row-major 2×2; `alphas` is `(a1_low, a1_high, a2_low, a2_high)`.
    #[new]
    #[pyo3(signature = (a1, a2, b1, b2, alphas, c1 = 0.0, c2 = 0.0))]
    fn new(
        a1: [f64; 4],
        a2: [f64; 4],
        b1: [f64; 2],
        b2: [f64; 2],
        alphas: [f64; 4],
        c1: f64,
        c2: f64,
    ) -> PyResult<Self> {
        let inner = GameSpec::new(
            QuadraticPayoff::new(Mat2::from_row_major(a1), b1, c1),
            QuadraticPayoff::new(Mat2::from_row_major(a2), b2, c2),
            Sensitivities::new(alphas[0], alphas[1], alphas[2], alphas[3]),
        )
        .map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn example1() -> Self {
        Self { inner: ns::game::examples::example1() }
    }

    #[staticmethod]
    fn example2() -> Self {
        Self { inner: ns::game::examples::example2() }
    }

    /// Builds a game from a configuration document's JSON text.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let doc = ConfigDoc::parse(text).map_err(err)?;
        Ok(Self { inner: doc.game_spec().map_err(err)? })
    }

    fn to_json(&self) -> String {
        ConfigDoc::from_game(&self.inner).to_json()
    }

    fn nash(&self) -> PyResult<(f64, f64)> {
        let x = nash_equilibrium(&self.inner).map_err(err)?;
        Ok((x[0], x[1]))
    }

    fn case(&self) -> PyResult<String> {
        Ok(classify_case(&self.inner, DEFAULT_CASE_TOL).map_err(err)?.case.to_string())
    }

    /// `"CCW"`, `"CW"`, or `None` when no fixed rotation direction exists.
    fn direction(&self) -> Option<String> {
        ns::game::rotation_certificate(&self.inner).ok().map(|c| c.direction.to_string())
    }

    /// `{mode: [λ₁, λ₂]}` for the four mode matrices.
    fn eigenvalues<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for k in Mode::ALL {
            let ev = eigen_info(&self.inner, k).eigenvalues;
            let pair: Vec<_> = ev.iter().map(|z| PyComplex::from_doubles(py, z.re, z.im)).collect();
            d.set_item(k.as_str(), pair)?;
        }
        Ok(d)
    }

    /// Time derivative of agent `agent`'s payoff at `x` under `mode`.
    fn jdot(&self, mode: &str, agent: u8, x: (f64, f64)) -> PyResult<f64> {
        jdot_value(&self.inner, parse_mode(mode)?, parse_agent(agent)?, [x.0, x.1]).map_err(err)
    }

    /// Arcs `(theta_start, theta_end, mode)` of the phase-indexed mode map.
    fn mode_map(&self) -> PyResult<Vec<(f64, f64, String)>> {
        let m = ns::build_mode_map(&self.inner).map_err(err)?;
        Ok(m.arcs.iter().map(|a| (a.theta_start, a.theta_end, a.mode.to_string())).collect())
    }

    fn analyze(&self) -> PyResult<PyAnalysis> {
        let r = ns::stability_verdict(&self.inner).map_err(err)?;
        Ok(PyAnalysis {
            case: r.case.case.to_string(),
            direction: r.direction.map(|d| d.to_string()),
            gamma_rg: r.gamma_rg,
            verdict: r.verdict.to_string(),
            reason: r.reason,
            arcs: r
                .mode_map
                .map(|m| m.arcs.iter().map(|a| (a.theta_start, a.theta_end, a.mode.to_string())).collect())
                .unwrap_or_default(),
        })
    }

    /// The full analysis report as pretty-printed JSON.
    fn report_json(&self) -> PyResult<String> {
        Ok(ReportDoc::build(&ConfigDoc::from_game(&self.inner)).map_err(err)?.to_json())
    }

    #[allow(clippy::too_many_arguments)]
    #[pyo3(signature = (x0, t_end, step = None, event_tol = None, record_stride = 1, initial_mode = None))]
    fn simulate(
        &self,
        py: Python<'_>,
        x0: (f64, f64),
        t_end: f64,
        step: Option<f64>,
        event_tol: Option<f64>,
        record_stride: usize,
        initial_mode: Option<&str>,
    ) -> PyResult<PyTrajectory> {
        let cfg = ns::SimConfig {
            x0: [x0.0, x0.1],
            t_end,
            step,
            event_tol,
            record_stride,
            initial_mode: initial_mode.map(parse_mode).transpose()?,
        };
        let game = self.inner;
        let traj = py.detach(|| ns::simulate(&game, &cfg)).map_err(err)?;
        Ok(PyTrajectory { inner: traj })
    }

    fn __repr__(&self) -> String {
        let g = &self.inner;
        let a = &g.alphas;
        format!(
            "Game(a1={:?}, a2={:?}, b1={:?}, b2={:?}, alphas=[{}, {}, {}, {}], c1={}, c2={})",
            g.payoff1.a.to_row_major(),
            g.payoff2.a.to_row_major(),
            g.payoff1.b,
            g.payoff2.b,
            a.a1_low,
            a.a1_high,
            a.a2_low,
            a.a2_high,
            g.payoff1.c,
            g.payoff2.c
        )
    }
}

#[pyclass(name = "Analysis", module = "nashswitch_py", frozen, get_all, skip_from_py_object)]
pub struct PyAnalysis {
    case: String,
    direction: Option<String>,
    gamma_rg: Option<f64>,
    verdict: String,
    reason: Option<String>,
    arcs: Vec<(f64, f64, String)>,
}

#[pymethods]
impl PyAnalysis {
    fn __repr__(&self) -> String {
        let direction = self.direction.as_deref().map_or("None".to_string(), |d| format!("'{d}'"));
        let gamma = self.gamma_rg.map_or("None".to_string(), |g| g.to_string());
        format!("Analysis(case='{}', direction={direction}, gamma_rg={gamma}, verdict='{}')", self.case, self.verdict)
    }
}

#[pyclass(name = "SwitchEvent", module = "nashswitch_py", frozen, get_all, skip_from_py_object)]
pub struct PyEvent {
    t: f64,
    x: (f64, f64),
    agents: Vec<u8>,
    from_mode: String,
    mid_mode: Option<String>,
    to_mode: String,
    flash: bool,
}

#[pyclass(name = "Trajectory", module = "nashswitch_py", frozen, skip_from_py_object)]
pub struct PyTrajectory {
    inner: ns::Trajectory,
}

#[pymethods]
impl PyTrajectory {
    #[getter]
    fn t(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.t).collect()
    }

    #[getter]
    fn x(&self) -> Vec<(f64, f64)> {
        self.inner.samples.iter().map(|s| (s.x[0], s.x[1])).collect()
    }

    #[getter]
    fn modes(&self) -> Vec<Option<String>> {
        self.inner.samples.iter().map(|s| s.mode.map(|m| m.to_string())).collect()
    }

    #[getter]
    fn payoffs(&self) -> Vec<(f64, f64)> {
        self.inner.samples.iter().map(|s| (s.j1, s.j2)).collect()
    }

    #[getter]
    fn r(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.r).collect()
    }

    #[getter]
    fn theta(&self) -> Vec<f64> {
        self.inner.samples.iter().map(|s| s.theta).collect()
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn events(&self) -> Vec<PyEvent> {
        self.inner
            .events
            .iter()
            .map(|e| PyEvent {
                t: e.t,
                x: (e.x[0], e.x[1]),
                agents: e.switching_agents.iter().map(|a| a.number()).collect(),
                from_mode: e.from_mode.to_string(),
                mid_mode: e.mid_mode.map(|m| m.to_string()),
                to_mode: e.to_mode.to_string(),
                flash: e.flash,
            })
            .collect()
    }

    /// `log(r_n / r_{n−1})` for each completed revolution.
    fn radial_growth(&self) -> PyResult<Vec<f64>> {
        measure_radial_growth(&self.inner).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.samples.len()
    }
}

/// Adds the classes and the exception type to `m`.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGame>()?;
    m.add_class::<PyAnalysis>()?;
    m.add_class::<PyEvent>()?;
    m.add_class::<PyTrajectory>()?;
    m.add("NashswitchError", m.py().get_type::<NashswitchError>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}

#[pymodule]
fn nashswitch_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}

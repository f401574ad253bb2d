//! Browser bindings: simulate a run, run a small rate study, and sample the
//! regularized nonlinearities. Every export takes and returns JSON text.

use serde::{Deserialize, Serialize};
use transmission_core::config::RunConfig;
use transmission_core::grid::Side;
use transmission_core::lab::{self, Direction, LogLogFit};
use transmission_core::monotone::MonotoneGraph;
use transmission_core::problem::{PermeabilitySchedule, SolverConfig};
use transmission_core::stepper::{self, Trajectory};
use wasm_bindgen::prelude::*;

/// Frames kept for animation.
const MAX_FRAMES: usize = 200;

#[derive(Serialize)]
struct Simulation {
    x_u: Vec<f64>,
    x_v: Vec<f64>,
    times: Vec<f64>,
    u: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    energy: Vec<f64>,
    jump: Vec<f64>,
    mass: Vec<f64>,
    alpha: Vec<f64>,
    handoff_time: Option<f64>,
    newton_iterations: usize,
}

fn text<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// `regime` is `coupled` (the configured schedule, blow-up included), `split` or `merged`.
pub fn simulate_json(config: &str, regime: &str) -> Result<String, String> {
    let config = RunConfig::from_json_str(config).map_err(text)?;
    let problem = config.problem();
    let solver = config.solver();
    let traj = match regime {
        "coupled" if matches!(config.alpha, PermeabilitySchedule::Blowup { .. }) => {
            stepper::solve_blowup_and_extend(&problem, &config.alpha, &solver)
        }
        "coupled" => stepper::solve_finite_alpha(&problem, &config.alpha, &solver),
        "split" => stepper::solve_split(&problem, &solver),
        "merged" => stepper::solve_merged(&problem, &solver),
        other => return Err(format!("unknown regime `{other}`")),
    }
    .map_err(text)?;
    let mesh = problem.mesh().map_err(text)?;
    serde_json::to_string(&frames(&traj, mesh.coords(Side::One), mesh.coords(Side::Two))).map_err(text)
}

fn frames(traj: &Trajectory, x_u: &[f64], x_v: &[f64]) -> Simulation {
    let stride = traj.len().div_ceil(MAX_FRAMES).max(1);
    let last = traj.len() - 1;
    let keep: Vec<usize> = (0..traj.len()).filter(|n| n % stride == 0 || *n == last).collect();
    let d = &traj.diagnostics;
    Simulation {
        x_u: x_u.to_vec(),
        x_v: x_v.to_vec(),
        times: keep.iter().map(|&n| traj.times[n]).collect(),
        u: keep.iter().map(|&n| traj.states[n].u.clone()).collect(),
        v: keep.iter().map(|&n| traj.states[n].v.clone()).collect(),
        energy: keep.iter().map(|&n| d[n].energy).collect(),
        jump: keep.iter().map(|&n| d[n].jump).collect(),
        mass: keep.iter().map(|&n| d[n].mass).collect(),
        alpha: keep.iter().map(|&n| d[n].alpha).collect(),
        handoff_time: traj.handoff.as_ref().map(|h| h.time),
        newton_iterations: traj.total_newton_iterations(),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RateRequest {
    direction: Direction,
    n: usize,
    dt: f64,
    alphas: Vec<f64>,
}

#[derive(Serialize)]
struct RateResult {
    alphas: Vec<f64>,
    e_c: Vec<f64>,
    e_e: Vec<f64>,
    fit: Option<LogLogFit>,
    fit_energy: Option<LogLogFit>,
    degenerate: bool,
}

/// Rate study on the built-in Allen–Cahn setup. Runs single-threaded.
pub fn rate_study_json(request: &str) -> Result<String, String> {
    let req: RateRequest = serde_json::from_str(request).map_err(text)?;
    if req.n == 0 || req.n > 400 {
        return Err("n must be between 1 and 400".into());
    }
    let problem = lab::allen_cahn_preset(req.n, req.direction);
    let config = SolverConfig::with_dt(req.dt);
    let report = match req.direction {
        Direction::ToZero => lab::rate_to_zero(&problem, &req.alphas, &config, 1),
        Direction::ToInfinity => lab::rate_to_infinity(&problem, &req.alphas, &config, 1),
    }
    .map_err(text)?;
    let result = RateResult {
        alphas: report.points.iter().map(|p| p.alpha).collect(),
        e_c: report.points.iter().map(|p| p.e_c).collect(),
        e_e: report.points.iter().map(|p| p.e_e).collect(),
        fit: report.fit,
        fit_energy: report.fit_energy,
        degenerate: report.degenerate,
    };
    serde_json::to_string(&result).map_err(text)
}

#[derive(Serialize)]
struct Curves {
    r: Vec<f64>,
    primitive: Vec<Option<f64>>,
    moreau: Vec<f64>,
    resolvent: Vec<f64>,
    yosida: Vec<f64>,
}

/// Samples `j`, `j_λ`, `J_λ` and `β_λ` on `[-range, range]`. `j` is `null`
/// outside its domain.
pub fn curves_json(graph: &str, lambda: f64, range: f64, samples: usize) -> Result<String, String> {
    let graph: MonotoneGraph = serde_json::from_str(graph).map_err(text)?;
    graph.validate().map_err(text)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err("lambda must be positive".into());
    }
    if !(range > 0.0 && range.is_finite()) || samples < 2 {
        return Err("need a positive range and at least two samples".into());
    }
    let r: Vec<f64> = (0..samples)
        .map(|i| -range + 2.0 * range * i as f64 / (samples - 1) as f64)
        .collect();
    let mut curves = Curves {
        primitive: Vec::with_capacity(samples),
        moreau: Vec::with_capacity(samples),
        resolvent: Vec::with_capacity(samples),
        yosida: Vec::with_capacity(samples),
        r: Vec::new(),
    };
    for &x in &r {
        let j = graph.primitive(x);
        curves.primitive.push(j.is_finite().then_some(j));
        curves.moreau.push(graph.moreau(lambda, x).map_err(text)?);
        curves.resolvent.push(graph.resolvent(lambda, x).map_err(text)?);
        curves.yosida.push(graph.yosida(lambda, x).map_err(text)?);
    }
    curves.r = r;
    serde_json::to_string(&curves).map_err(text)
}

#[wasm_bindgen]
pub fn simulate(config: &str, regime: &str) -> Result<String, JsValue> {
    simulate_json(config, regime).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn rate_study(request: &str) -> Result<String, JsValue> {
    rate_study_json(request).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn curves(graph: &str, lambda: f64, range: f64, samples: usize) -> Result<String, JsValue> {
    curves_json(graph, lambda, range, samples).map_err(|e| JsValue::from_str(&e))
}

//! Experiments over permeability grids: convergence rates toward the split
//! and merged limits, a-priori estimate audits, and Mosco certificates.

use serde::{Deserialize, Serialize};

use crate::energy::{EnergySpec, MassWeight, Regime};
use crate::error::{Error, Result};
use crate::grid::{CoupledField, GeometryCase, Side, TwoDomainMesh};
use crate::linalg::max_abs;
use crate::problem::{InitialData, PermeabilitySchedule, ProblemSpec, SolverConfig};
use crate::stepper::{merge, Stepper, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    ToZero,
    ToInfinity,
}

impl Direction {
    pub fn limit(self) -> Regime {
        match self {
            Direction::ToZero => Regime::Zero,
            Direction::ToInfinity => Regime::Infinity,
        }
    }
}

/// Least-squares line through `(x, log e)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the fit residuals.
    pub residual: f64,
}

/// Fits `y = slope·x + intercept`. Needs at least two points with distinct `x`.
pub fn fit_line(x: &[f64], y: &[f64]) -> Option<LogLogFit> {
    let n = x.len();
    if n < 2 || n != y.len() {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum::<f64>()
        / nf)
        .sqrt();
    Some(LogLogFit {
        slope,
        intercept,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatePoint {
    pub alpha: f64,
    /// `max_n ‖U_α − U_lim‖_{L²}`.
    pub e_c: f64,
    /// `(Σ_n Δt ‖U_α − U_lim‖²_{H¹})^{1/2}`.
    pub e_e: f64,
    /// `√α · max_n jump(U_α)`.
    pub sqrt_alpha_jump: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateStudyReport {
    pub direction: Direction,
    pub points: Vec<RatePoint>,
    /// Fit of `log e_C` against `log α` (to zero) or `log(1/α)` (to infinity).
    pub fit: Option<LogLogFit>,
    pub fit_energy: Option<LogLogFit>,
    /// All errors vanish to roundoff; no fit is attempted.
    pub degenerate: bool,
    /// `max/min` of `√α·max_n jump` across the grid.
    pub jump_spread: f64,
    /// Set when `jump_spread > 2`.
    pub jump_flag: bool,
}

/// Runs `f` over `items` on up to `jobs` threads; results keep input order.
pub fn parallel_map<T, R, F>(items: &[T], jobs: usize, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Result<R> + Sync,
{
    let jobs = jobs.clamp(1, items.len().max(1));
    if jobs == 1 {
        return items.iter().map(&f).collect();
    }
    let mut slots: Vec<Option<Result<R>>> = (0..items.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let f = &f;
        let handles: Vec<_> = (0..jobs)
            .map(|worker| {
                scope.spawn(move || {
                    (worker..items.len())
                        .step_by(jobs)
                        .map(|i| (i, f(&items[i])))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for handle in handles {
            for (i, r) in handle.join().expect("worker panicked") {
                slots[i] = Some(r);
            }
        }
    });
    slots.into_iter().map(|s| s.expect("every slot filled")).collect()
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::config(name, "grid must not be empty"));
    }
    if grid.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
        return Err(Error::config(name, "grid values must be finite and positive"));
    }
    let increasing = grid.windows(2).all(|w| w[1] > w[0]);
    let decreasing = grid.windows(2).all(|w| w[1] < w[0]);
    if !(increasing || decreasing) {
        return Err(Error::config(name, "grid must be strictly monotone"));
    }
    Ok(())
}

fn h1_squared(mesh: &TwoDomainMesh, f: &CoupledField) -> f64 {
    mesh.h1_norm(Side::One, &f.u).powi(2) + mesh.h1_norm(Side::Two, &f.v).powi(2)
}

fn rate_study(
    problem: &ProblemSpec,
    alpha_grid: &[f64],
    config: &SolverConfig,
    jobs: usize,
    direction: Direction,
) -> Result<RateStudyReport> {
    check_grid("experiment.alpha_grid", alpha_grid)?;
    let mesh = problem.mesh()?;
    let stepper = Stepper::new(problem, &mesh, *config)?;
    let initial = problem.initial_field(&mesh)?;
    let reference = match direction {
        Direction::ToZero => stepper.run_split(initial.clone())?,
        Direction::ToInfinity => stepper.run_merged(initial.clone())?,
    };
    let points = parallel_map(alpha_grid, jobs, |&alpha| {
        let traj = stepper.run_finite_alpha(&PermeabilitySchedule::constant(alpha), initial.clone())?;
        Ok(compare(&mesh, &traj, &reference, alpha))
    })?;

    let scale = reference
        .states
        .iter()
        .map(|s| mesh.field_l2_norm(s))
        .fold(0.0, f64::max);
    let degenerate = points.iter().all(|p| p.e_c <= 1e-13 * (1.0 + scale));
    let abscissa = |alpha: f64| match direction {
        Direction::ToZero => alpha.ln(),
        Direction::ToInfinity => (1.0 / alpha).ln(),
    };
    let fit_of = |error: fn(&RatePoint) -> f64| -> Option<LogLogFit> {
        if degenerate {
            return None;
        }
        let used: Vec<&RatePoint> = points.iter().filter(|p| error(p) > 0.0).collect();
        let x: Vec<f64> = used.iter().map(|p| abscissa(p.alpha)).collect();
        let y: Vec<f64> = used.iter().map(|p| error(p).ln()).collect();
        fit_line(&x, &y)
    };
    let jumps: Vec<f64> = points.iter().map(|p| p.sqrt_alpha_jump).collect();
    let jump_spread = spread(&jumps);
    Ok(RateStudyReport {
        direction,
        fit: fit_of(|p| p.e_c),
        fit_energy: fit_of(|p| p.e_e),
        points,
        degenerate,
        jump_spread,
        jump_flag: jump_spread > 2.0,
    })
}

fn compare(mesh: &TwoDomainMesh, traj: &Trajectory, reference: &Trajectory, alpha: f64) -> RatePoint {
    let mut e_c = 0.0_f64;
    let mut e_e = 0.0;
    let mut jump = 0.0_f64;
    for n in 0..traj.len() {
        let diff = traj.states[n].sub(&reference.states[n]);
        e_c = e_c.max(mesh.field_l2_norm(&diff));
        if n > 0 {
            e_e += (traj.times[n] - traj.times[n - 1]) * h1_squared(mesh, &diff);
        }
        jump = jump.max(traj.diagnostics[n].jump);
    }
    RatePoint {
        alpha,
        e_c,
        e_e: e_e.sqrt(),
        sqrt_alpha_jump: alpha.sqrt() * jump,
    }
}

/// `max/min` of nonnegative values; `1` when all vanish, `∞` when only some do.
pub fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(0.0, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if max == 0.0 {
        1.0
    } else if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Errors against the split trajectory as `α → 0`.
pub fn rate_to_zero(
    problem: &ProblemSpec,
    alpha_grid: &[f64],
    config: &SolverConfig,
    jobs: usize,
) -> Result<RateStudyReport> {
    rate_study(problem, alpha_grid, config, jobs, Direction::ToZero)
}

/// Errors against the merged trajectory as `α → ∞`.
pub fn rate_to_infinity(
    problem: &ProblemSpec,
    alpha_grid: &[f64],
    config: &SolverConfig,
    jobs: usize,
) -> Result<RateStudyReport> {
    rate_study(problem, alpha_grid, config, jobs, Direction::ToInfinity)
}

/// `count` log-spaced values from `first` to `last` inclusive.
pub fn log_grid(first: f64, last: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![first];
    }
    let (a, b) = (first.log10(), last.log10());
    (0..count)
        .map(|k| 10f64.powf(a + (b - a) * k as f64 / (count - 1) as f64))
        .collect()
}

/// Audited left-hand sides of the uniform estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// `max_n ‖Uⁿ‖_{L²}`
    Est1L2,
    /// `(Σ Δt ‖Uⁿ‖²_{H¹})^{1/2}`
    Est1aH1,
    /// `(α Σ Δt jump(Uⁿ)²)^{1/2}`
    Est1aJump,
    /// `(Σ Δt ‖β_λ(Uⁿ)‖²_{L²})^{1/2}`
    Est1bBeta,
    /// `(Σ Δt ‖(Uⁿ − Uⁿ⁻¹)/Δt‖²_{L²})^{1/2}`
    Est2Dt,
    /// `max_n φ(Uⁿ) + Σ m̂ j_λ(Uⁿ)`
    Est2Energy,
    /// `√α max_n jump(Uⁿ)`
    Est2Jump,
    /// `(Σ Δt ‖discrete Laplacian‖²_{L²})^{1/2}` away from the interface
    Est3Laplacian,
    /// `(Σ Δt (‖∂u‖²_{V'₁,₀} + ‖∂v‖²_{V'₂,₀}))^{1/2}`
    DualDt,
}

impl Quantity {
    pub const ALL: [Quantity; 9] = [
        Quantity::Est1L2,
        Quantity::Est1aH1,
        Quantity::Est1aJump,
        Quantity::Est1bBeta,
        Quantity::Est2Dt,
        Quantity::Est2Energy,
        Quantity::Est2Jump,
        Quantity::Est3Laplacian,
        Quantity::DualDt,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Quantity::Est1L2 => "est1_l2",
            Quantity::Est1aH1 => "est1a_h1",
            Quantity::Est1aJump => "est1a_jump",
            Quantity::Est1bBeta => "est1b_beta",
            Quantity::Est2Dt => "est2_dt",
            Quantity::Est2Energy => "est2_energy",
            Quantity::Est2Jump => "est2_jump",
            Quantity::Est3Laplacian => "est3_laplacian",
            Quantity::DualDt => "dual_dt",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuditEntry {
    pub lambda: f64,
    pub alpha: f64,
    pub quantity: Quantity,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantitySpread {
    pub quantity: Quantity,
    pub max: f64,
    pub min: f64,
    pub spread: f64,
    /// `spread < factor`.
    pub bounded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AprioriAuditReport {
    pub lambdas: Vec<f64>,
    pub alphas: Vec<f64>,
    /// Ordered by `λ`, then `α`, then quantity.
    pub entries: Vec<AuditEntry>,
    pub factor: f64,
    pub spreads: Vec<QuantitySpread>,
}

impl AprioriAuditReport {
    pub fn values(&self, quantity: Quantity) -> Vec<f64> {
        self.entries
            .iter()
            .filter(|e| e.quantity == quantity)
            .map(|e| e.value)
            .collect()
    }

    pub fn spread_of(&self, quantity: Quantity) -> &QuantitySpread {
        self.spreads
            .iter()
            .find(|s| s.quantity == quantity)
            .expect("every quantity has a spread")
    }
}

/// Growth factor above which an audited family is reported as unbounded.
pub const AUDIT_FACTOR: f64 = 10.0;

pub fn apriori_audit(
    problem: &ProblemSpec,
    lambda_grid: &[f64],
    alpha_grid: &[f64],
    config: &SolverConfig,
    jobs: usize,
) -> Result<AprioriAuditReport> {
    check_grid("experiment.lambda_grid", lambda_grid)?;
    check_grid("experiment.alpha_grid", alpha_grid)?;
    let mesh = problem.mesh()?;
    let initial = problem.initial_field(&mesh)?;
    let cells: Vec<(f64, f64)> = lambda_grid
        .iter()
        .flat_map(|&l| alpha_grid.iter().map(move |&a| (l, a)))
        .collect();
    let rows = parallel_map(&cells, jobs, |&(lambda, alpha)| {
        let solver = SolverConfig { lambda, ..*config };
        let stepper = Stepper::new(problem, &mesh, solver)?;
        let traj = stepper.run_finite_alpha(&PermeabilitySchedule::constant(alpha), initial.clone())?;
        audit_trajectory(&mesh, problem.kappa, alpha, &traj).map_err(|e| match e {
            Error::StepFailure { .. } | Error::NumericalFailure { .. } => e,
            other => Error::Precondition(format!("audit at lambda={lambda}, alpha={alpha}: {other}")),
        })
    })?;
    let mut entries = Vec::with_capacity(cells.len() * Quantity::ALL.len());
    for (&(lambda, alpha), values) in cells.iter().zip(rows) {
        for (quantity, value) in Quantity::ALL.into_iter().zip(values) {
            entries.push(AuditEntry {
                lambda,
                alpha,
                quantity,
                value,
            });
        }
    }
    let spreads = Quantity::ALL
        .into_iter()
        .map(|q| {
            let values: Vec<f64> = entries.iter().filter(|e| e.quantity == q).map(|e| e.value).collect();
            let s = spread(&values);
            QuantitySpread {
                quantity: q,
                max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                min: values.iter().copied().fold(f64::INFINITY, f64::min),
                spread: s,
                bounded: s < AUDIT_FACTOR,
            }
        })
        .collect();
    if entries.iter().any(|e| !e.value.is_finite()) {
        return Err(Error::NumericalFailure {
            operation: "a-priori audit",
            residual: f64::INFINITY,
        });
    }
    Ok(AprioriAuditReport {
        lambdas: lambda_grid.to_vec(),
        alphas: alpha_grid.to_vec(),
        entries,
        factor: AUDIT_FACTOR,
        spreads,
    })
}

/// Values in the order of [`Quantity::ALL`].
fn audit_trajectory(mesh: &TwoDomainMesh, kappa: f64, alpha: f64, traj: &Trajectory) -> Result<Vec<f64>> {
    let lumped_sq = |f: &CoupledField| mesh.field_norm(f).powi(2);
    let mut est1 = 0.0_f64;
    let mut h1 = 0.0;
    let mut jump_sq = 0.0;
    let mut beta = 0.0;
    let mut dt_sq = 0.0;
    let mut energy = f64::NEG_INFINITY;
    let mut jump_max = 0.0_f64;
    let mut laplacian = 0.0;
    let mut dual = 0.0;
    for n in 0..traj.len() {
        let state = &traj.states[n];
        let d = &traj.diagnostics[n];
        est1 = est1.max(mesh.field_l2_norm(state));
        energy = energy.max(d.energy + d.moreau_energy);
        jump_max = jump_max.max(d.jump);
        if n == 0 {
            continue;
        }
        let dt = traj.times[n] - traj.times[n - 1];
        h1 += dt * h1_squared(mesh, state);
        jump_sq += dt * d.jump * d.jump;
        beta += dt * lumped_sq(&traj.selections[n]);
        let rate = state.sub(&traj.states[n - 1]).map(|x| x / dt);
        dt_sq += dt * lumped_sq(&rate);
        laplacian += dt * interior_laplacian_sq(mesh, kappa, state);
        dual += dt * (mesh.dual_norm_v0(Side::One, &rate.u)?.powi(2) + mesh.dual_norm_v0(Side::Two, &rate.v)?.powi(2));
    }
    Ok(vec![
        est1,
        h1.sqrt(),
        (alpha * jump_sq).sqrt(),
        beta.sqrt(),
        dt_sq.sqrt(),
        energy,
        alpha.sqrt() * jump_max,
        laplacian.sqrt(),
        dual.sqrt(),
    ])
}

/// `Σ m̂ (M̂⁻¹Kw)²` over nodes off the interface, `κ`-weighted on `Ω₂`.
fn interior_laplacian_sq(mesh: &TwoDomainMesh, kappa: f64, state: &CoupledField) -> f64 {
    let mut total = 0.0;
    for (side, weight) in [(Side::One, 1.0), (Side::Two, kappa)] {
        let kw = mesh.stiffness(side).mul_vec(state.part(side));
        for (k, (m, r)) in mesh.lumped_mass(side).iter().zip(kw).enumerate() {
            if !mesh.is_interface_node(side, k) {
                total += weight * weight * r * r / m;
            }
        }
    }
    total
}

/// Named fields for the Mosco audit.
#[derive(Debug, Clone, PartialEq)]
pub struct Probe {
    pub id: String,
    pub field: CoupledField,
}

/// Constants, a linear ramp, a unit jump, and seeded random smooth fields.
pub fn standard_probes(mesh: &TwoDomainMesh, seed: u64) -> Result<Vec<Probe>> {
    let random = |matched: bool, seed: u64| {
        InitialData::RandomSmooth {
            amplitude: 1.0,
            modes: 6,
            matched,
        }
        .materialize(mesh, seed)
    };
    Ok(vec![
        Probe {
            id: "constant".into(),
            field: CoupledField::constant(mesh, 0.5, 0.5),
        },
        Probe {
            id: "ramp".into(),
            field: mesh.interpolate(|x| x, |x| x),
        },
        Probe {
            id: "unit_jump".into(),
            field: CoupledField::constant(mesh, 1.0, 0.0),
        },
        Probe {
            id: "random_smooth".into(),
            field: random(false, seed)?,
        },
        Probe {
            id: "random_matched".into(),
            field: random(true, seed.wrapping_add(1))?,
        },
    ])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoscoRow {
    pub n: usize,
    pub alpha: f64,
    pub probe_id: String,
    /// `|φ_{α_n}(U) − φ_lim(U)|` for the recovery sequence `U_n = U`.
    pub gap: f64,
    /// `min` over the constant and jump-perturbed sequences of `φ_{α_n}(U_n) − φ_lim(U)`.
    pub margin: f64,
    /// `‖prox_{τφ_{α_n}}(W) − prox_{τφ_lim}(W)‖_{M̂}`.
    pub prox_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoscoReport {
    pub direction: Direction,
    pub tau: f64,
    pub alphas: Vec<f64>,
    pub rows: Vec<MoscoRow>,
    /// Largest `|gap − (α/2)·jump²| / (1 + gap)` (to zero only; `0` otherwise).
    pub recovery_identity_error: f64,
    /// Smallest margin over the tail (second half) of the sequence.
    pub liminf_margin: f64,
    pub prox_monotone: bool,
    /// Largest final `prox_err / ‖W‖`.
    pub prox_final_relative: f64,
    pub m1: bool,
    pub m2: bool,
}

/// Tolerance of the liminf inequality.
pub const LIMINF_TOLERANCE: f64 = 1e-10;

pub fn mosco_audit(
    mesh: &TwoDomainMesh,
    kappa: f64,
    direction: Direction,
    alphas: &[f64],
    probes: &[Probe],
    tau: f64,
) -> Result<MoscoReport> {
    check_grid("experiment.alpha_grid", alphas)?;
    let toward_limit = match direction {
        Direction::ToZero => alphas.windows(2).all(|w| w[1] < w[0]),
        Direction::ToInfinity => alphas.windows(2).all(|w| w[1] > w[0]),
    };
    if !toward_limit {
        return Err(Error::config(
            "experiment.alpha_grid",
            "sequence must move toward the limit",
        ));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::config("experiment.tau", "must be positive"));
    }
    let limit = EnergySpec::new(mesh, kappa, direction.limit())?;
    let unit_jump = CoupledField::constant(mesh, 1.0, 0.0);
    let mut rows = Vec::new();
    let mut identity_error = 0.0_f64;
    let mut liminf = f64::INFINITY;
    let mut monotone = true;
    let mut final_relative = 0.0_f64;
    for probe in probes {
        let w = &probe.field;
        let u = match direction {
            Direction::ToZero => w.clone(),
            Direction::ToInfinity => merge(mesh, w),
        };
        let limit_value = limit.energy(&u);
        let limit_prox = limit.prox(tau, w, MassWeight::Lumped)?;
        let w_norm = mesh.field_norm(w);
        let mut previous: Option<(f64, f64)> = None;
        for (n, &alpha) in alphas.iter().enumerate() {
            let spec = EnergySpec::new(mesh, kappa, Regime::Finite(alpha))?;
            let floor = prox_roundoff(mesh, &spec, tau) * (1.0 + w_norm);
            let value = spec.energy(&u);
            let gap = (value - limit_value).abs();
            if direction == Direction::ToZero {
                let expected = 0.5 * alpha * mesh.interface_jump_norm(&u).powi(2);
                identity_error = identity_error.max((gap - expected).abs() / (1.0 + gap));
            }
            let epsilon = 0.5f64.powi(n as i32 + 1);
            let perturbed = u.add_scaled(&unit_jump, epsilon);
            let margin = (value - limit_value).min(spec.energy(&perturbed) - limit_value);
            if 2 * n >= alphas.len() {
                liminf = liminf.min(margin);
            }
            let prox = spec.prox(tau, w, MassWeight::Lumped)?;
            let prox_err = mesh.field_norm(&prox.sub(&limit_prox));
            if let Some((p, p_floor)) = previous {
                if !(prox_err < p || (prox_err <= floor && p <= p_floor)) {
                    monotone = false;
                }
            }
            previous = Some((prox_err, floor));
            rows.push(MoscoRow {
                n: n + 1,
                alpha,
                probe_id: probe.id.clone(),
                gap,
                margin,
                prox_err,
            });
        }
        if let Some((last, _)) = previous {
            final_relative = final_relative.max(if w_norm > 0.0 { last / w_norm } else { last });
        }
    }
    let m2 = match direction {
        Direction::ToZero => identity_error <= 1e-14,
        Direction::ToInfinity => rows.iter().all(|r| r.gap == 0.0),
    };
    Ok(MoscoReport {
        direction,
        tau,
        alphas: alphas.to_vec(),
        rows,
        recovery_identity_error: identity_error,
        liminf_margin: liminf,
        prox_monotone: monotone,
        prox_final_relative: final_relative,
        m1: liminf >= -LIMINF_TOLERANCE,
        m2,
    })
}

/// Forward-error level of a prox solve: `ε·(1 + τ‖A‖_∞ / min m̂)`. Prox
/// differences below it on both sides of a comparison carry no signal.
fn prox_roundoff(mesh: &TwoDomainMesh, spec: &EnergySpec, tau: f64) -> f64 {
    let dofs = spec.dofs();
    let operator = spec.operator(&dofs);
    let norm = max_abs(&operator.abs_mul_vec(&vec![1.0; dofs.len()]));
    let min_mass = dofs.lumped_mass(mesh).into_iter().fold(f64::INFINITY, f64::min);
    1e-15 * (1.0 + tau * norm / min_mass)
}

/// The Allen–Cahn preset used by the rate studies: cubic `β`, `π(r) = −r`,
/// no sources, Case 1 on `(−1, 0) ∪ (0, 1)`.
pub fn allen_cahn_preset(n: usize, direction: Direction) -> ProblemSpec {
    let initial = match direction {
        Direction::ToZero => InitialData::Step {
            left: 0.8,
            right: -0.6,
            position: 0.0,
        },
        // odd mode count: the profile is not mirror-symmetric about the interface
        Direction::ToInfinity => InitialData::SmoothMatched {
            level: 0.1,
            amplitude: 0.7,
            modes: 3,
        },
    };
    ProblemSpec::allen_cahn(GeometryCase::case1(1.0, 1.0, n, n), initial, 0.25)
}

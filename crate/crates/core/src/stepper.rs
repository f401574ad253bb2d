//! Implicit Euler time stepping of the coupled system.
//!
//! Each step solves, on the unknowns of the active layout,
//!
//! ```text
//! M̂(z − z_old)/Δt + A z + M̂ β_λ(z) + M̂ π(U_old) = M̂ G(t + Δt)
//! ```
//!
//! by Newton's method with a backtracking line search on the convex functional
//! whose gradient is the left-hand side. `π` is explicit, `β_λ` implicit.

use serde::Serialize;

use crate::energy::{assemble_operator, EnergySpec, Regime};
use crate::error::{Error, Result};
use crate::grid::{CoupledField, DofMap, Side, TwoDomainMesh};
use crate::linalg::{dot, max_abs, SymTridiag};
use crate::problem::{PermeabilitySchedule, ProblemSpec, SolverConfig};

/// Which part of a run a state belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    Coupled,
    Split,
    Merged,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepDiagnostics {
    pub t: f64,
    /// `α` used for the energy value; `0` when split, `∞` when merged.
    pub alpha: f64,
    pub energy: f64,
    /// `Σ m̂ j_λ(U)` over the nodes of both subdomains.
    pub moreau_energy: f64,
    pub jump: f64,
    pub mass: f64,
    pub newton_iters: usize,
    pub residual: f64,
    pub phase: Phase,
}

/// Record of the topology change in a blow-up run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Handoff {
    pub time: f64,
    /// Index of the last coupled state in the trajectory.
    pub index: usize,
    pub alpha: f64,
    pub jump_before: f64,
    /// `‖U_merged − U_before‖` in the lumped `𝓗` norm.
    pub discrepancy: f64,
    pub state_norm: f64,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<CoupledField>,
    /// Yosida selections `(ξ, ψ) = (β_λ(u), β_λ(v))` per state.
    pub selections: Vec<CoupledField>,
    pub diagnostics: Vec<StepDiagnostics>,
    pub handoff: Option<Handoff>,
}

impl Trajectory {
    fn new() -> Self {
        Self {
            times: Vec::new(),
            states: Vec::new(),
            selections: Vec::new(),
            diagnostics: Vec::new(),
            handoff: None,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> &CoupledField {
        self.states.last().expect("trajectory holds the initial state")
    }

    pub fn total_newton_iterations(&self) -> usize {
        self.diagnostics.iter().map(|d| d.newton_iters).sum()
    }
}

/// Result of a single implicit step.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: CoupledField,
    pub iterations: usize,
    /// Final relative Newton residual.
    pub residual: f64,
}

/// Time stepper bound to one problem and mesh.
#[derive(Debug, Clone, Copy)]
pub struct Stepper<'a> {
    problem: &'a ProblemSpec,
    mesh: &'a TwoDomainMesh,
    config: SolverConfig,
}

impl<'a> Stepper<'a> {
    pub fn new(problem: &'a ProblemSpec, mesh: &'a TwoDomainMesh, config: SolverConfig) -> Result<Self> {
        problem.validate()?;
        config.validate()?;
        Ok(Self { problem, mesh, config })
    }

    pub fn mesh(&self) -> &TwoDomainMesh {
        self.mesh
    }

    pub fn config(&self) -> &SolverConfig {
        &self.config
    }

    /// One step of length `dt` from `(t, state)` with the given coupling.
    pub fn step(&self, regime: Regime, t: f64, dt: f64, state: &CoupledField) -> Result<StepOutcome> {
        let system = StepSystem::assemble(self, regime, t, dt, state)?;
        let (z, iterations, residual) = system.solve(self, system.initial_guess.clone())?;
        Ok(StepOutcome {
            state: system.dofs.extend(&z),
            iterations,
            residual,
        })
    }

    /// Diagnostics of `state` at time `t` under `regime`.
    pub fn diagnostics(&self, regime: Regime, t: f64, state: &CoupledField) -> Result<StepDiagnostics> {
        let spec = EnergySpec::new(self.mesh, self.problem.kappa, regime)?;
        let mut moreau_energy = 0.0;
        for side in [Side::One, Side::Two] {
            for (m, &r) in self.mesh.lumped_mass(side).iter().zip(state.part(side)) {
                moreau_energy += m * self.problem.beta.moreau(self.config.lambda, r)?;
            }
        }
        Ok(StepDiagnostics {
            t,
            alpha: regime.alpha(),
            energy: spec.energy(state),
            moreau_energy,
            jump: self.mesh.interface_jump_norm(state),
            mass: self.mesh.total_mass(state),
            newton_iters: 0,
            residual: 0.0,
            phase: match regime {
                Regime::Finite(_) => Phase::Coupled,
                Regime::Zero => Phase::Split,
                Regime::Infinity => Phase::Merged,
            },
        })
    }

    pub fn selection(&self, state: &CoupledField) -> Result<CoupledField> {
        let lambda = self.config.lambda;
        let beta = &self.problem.beta;
        let apply = |w: &[f64]| -> Result<Vec<f64>> { w.iter().map(|&r| beta.yosida(lambda, r)).collect() };
        Ok(CoupledField::new(apply(&state.u)?, apply(&state.v)?))
    }

    fn record(
        &self,
        traj: &mut Trajectory,
        regime: Regime,
        t: f64,
        state: CoupledField,
        iters: usize,
        residual: f64,
    ) -> Result<()> {
        let mut diag = self.diagnostics(regime, t, &state)?;
        diag.newton_iters = iters;
        diag.residual = residual;
        traj.selections.push(self.selection(&state)?);
        traj.times.push(t);
        traj.states.push(state);
        traj.diagnostics.push(diag);
        Ok(())
    }

    /// Advances the last state of `traj` from its time to `t_end`. The step
    /// count is `⌈(t_end − t₀)/Δt⌉` and the final step lands exactly on `t_end`.
    fn march(&self, traj: &mut Trajectory, t_end: f64, regime_at: impl Fn(f64) -> Regime) -> Result<()> {
        let t0 = *traj.times.last().expect("initial state recorded");
        let dt = self.config.dt;
        let steps = time_steps(t0, t_end, dt);
        let offset = traj.len() - 1;
        for k in 1..=steps {
            let t_prev = *traj.times.last().unwrap();
            let t_next = if k == steps { t_end } else { t0 + k as f64 * dt };
            let regime = regime_at(t_next);
            let outcome = self
                .step(regime, t_prev, t_next - t_prev, traj.last())
                .map_err(|e| match e {
                    Error::StepFailure {
                        residual, iterations, ..
                    } => Error::StepFailure {
                        step: offset + k,
                        time: t_next,
                        residual,
                        iterations,
                    },
                    other => other,
                })?;
            self.record(
                traj,
                regime,
                t_next,
                outcome.state,
                outcome.iterations,
                outcome.residual,
            )?;
        }
        Ok(())
    }

    fn start(&self, regime: Regime, state: CoupledField) -> Result<Trajectory> {
        let mut traj = Trajectory::new();
        self.record(&mut traj, regime, 0.0, state, 0, 0.0)?;
        Ok(traj)
    }

    pub fn run_finite_alpha(&self, schedule: &PermeabilitySchedule, initial: CoupledField) -> Result<Trajectory> {
        if matches!(schedule, PermeabilitySchedule::Blowup { .. }) {
            return Err(Error::Precondition(
                "blow-up schedules are integrated by solve_blowup_and_extend".into(),
            ));
        }
        schedule.validate(self.problem.t_final)?;
        let regime_at = |t: f64| Regime::Finite(schedule.alpha(t));
        let mut traj = self.start(regime_at(0.0), initial)?;
        self.march(&mut traj, self.problem.t_final, regime_at)?;
        Ok(traj)
    }

    pub fn run_split(&self, initial: CoupledField) -> Result<Trajectory> {
        let mut traj = self.start(Regime::Zero, initial)?;
        self.march(&mut traj, self.problem.t_final, |_| Regime::Zero)?;
        Ok(traj)
    }

    pub fn run_merged(&self, initial: CoupledField) -> Result<Trajectory> {
        let mismatch = self
            .mesh
            .interface()
            .iter()
            .map(|p| (initial.u[p.u] - initial.v[p.v]).abs())
            .fold(0.0, f64::max);
        if mismatch > 1e-10 {
            return Err(Error::Precondition(format!(
                "merged run needs u0 = v0 on the interface, mismatch {mismatch:e}"
            )));
        }
        let start = merge(self.mesh, &initial);
        let mut traj = self.start(Regime::Infinity, start)?;
        self.march(&mut traj, self.problem.t_final, |_| Regime::Infinity)?;
        Ok(traj)
    }

    pub fn run_blowup(&self, schedule: &PermeabilitySchedule, initial: CoupledField) -> Result<Trajectory> {
        let PermeabilitySchedule::Blowup { t_star, .. } = *schedule else {
            return Err(Error::Precondition(
                "solve_blowup_and_extend needs a blow-up schedule".into(),
            ));
        };
        schedule.validate(self.problem.t_final)?;
        let gap = self.config.switch_gap;
        if gap >= t_star {
            return Err(Error::config(
                "solver.delta_switch",
                "must be smaller than alpha.t_star",
            ));
        }
        let t_hand = t_star - gap;
        let regime_at = |t: f64| Regime::Finite(schedule.alpha(t));
        let mut traj = self.start(regime_at(0.0), initial)?;
        self.march(&mut traj, t_hand, regime_at)?;

        let before = traj.last().clone();
        let merged = merge(self.mesh, &before);
        traj.handoff = Some(Handoff {
            time: t_hand,
            index: traj.len() - 1,
            alpha: schedule.alpha(t_hand),
            jump_before: self.mesh.interface_jump_norm(&before),
            discrepancy: self.mesh.field_norm(&merged.sub(&before)),
            state_norm: self.mesh.field_norm(&before),
        });
        // continue from the merged state; the coupled state at t_hand stays on record
        *traj.states.last_mut().unwrap() = merged;
        self.march(&mut traj, self.problem.t_final, |_| Regime::Infinity)?;
        *traj.states.get_mut(traj.handoff.as_ref().unwrap().index).unwrap() = before;
        Ok(traj)
    }
}

/// Interface pairs replaced by their lumped-mass-weighted average.
pub fn merge(mesh: &TwoDomainMesh, state: &CoupledField) -> CoupledField {
    let dofs = mesh.dofs(Regime::Infinity.layout());
    dofs.extend(&dofs.restrict(mesh, state))
}

fn time_steps(t0: f64, t_end: f64, dt: f64) -> usize {
    (((t_end - t0) / dt) - 1e-9).ceil().max(1.0) as usize
}

/// The nonlinear system of one step in dof space.
struct StepSystem {
    dofs: DofMap,
    operator: SymTridiag,
    mass: Vec<f64>,
    /// Linear part of the right-hand side: `M̂U_old/Δt − M̂π(U_old) + M̂G`.
    rhs: Vec<f64>,
    dt: f64,
    initial_guess: Vec<f64>,
}

impl StepSystem {
    fn assemble(stepper: &Stepper, regime: Regime, t: f64, dt: f64, state: &CoupledField) -> Result<Self> {
        let mesh = stepper.mesh;
        let problem = stepper.problem;
        if !(dt > 0.0) {
            return Err(Error::Precondition(format!("step length must be positive, got {dt}")));
        }
        if !state.is_finite() {
            return Err(Error::Precondition("state is not finite".into()));
        }
        let penalty = match regime {
            Regime::Finite(alpha) if !(alpha >= 0.0 && alpha.is_finite()) => {
                return Err(Error::Precondition(format!(
                    "alpha must be finite and >= 0, got {alpha}"
                )));
            }
            r => r.penalty(),
        };
        let dofs = mesh.dofs(regime.layout());
        let operator = assemble_operator(mesh, problem.kappa, penalty, &dofs);
        let mass = dofs.lumped_mass(mesh);
        let t_new = t + dt;
        let nodal = |side: Side| -> Vec<f64> {
            let pi = problem.reaction(side);
            let g = problem.source(side);
            mesh.lumped_mass(side)
                .iter()
                .zip(state.part(side))
                .zip(mesh.coords(side))
                .map(|((m, &r), &x)| m * (r / dt - pi.eval(r) + g.eval(t_new, x)))
                .collect()
        };
        let rhs = dofs.scatter_vector(&CoupledField::new(nodal(Side::One), nodal(Side::Two)));
        let initial_guess = dofs.restrict(mesh, state);
        Ok(Self {
            dofs,
            operator,
            mass,
            rhs,
            dt,
            initial_guess,
        })
    }

    /// Residual, relative scale and Jacobian diagonal shift at `z`.
    fn evaluate(&self, stepper: &Stepper, z: &[f64]) -> Result<(Vec<f64>, f64, Vec<f64>)> {
        let beta = &stepper.problem.beta;
        let lambda = stepper.config.lambda;
        let az = self.operator.mul_vec(z);
        let abs_az = self.operator.abs_mul_vec(z);
        let mut f = vec![0.0; z.len()];
        let mut shift = vec![0.0; z.len()];
        let mut scale = 0.0_f64;
        for i in 0..z.len() {
            let (b, db) = beta.yosida_with_slope(lambda, z[i])?;
            let m = self.mass[i];
            f[i] = m * z[i] / self.dt + az[i] + m * b - self.rhs[i];
            shift[i] = m / self.dt + m * db;
            scale = scale.max((m * z[i] / self.dt).abs() + abs_az[i] + (m * b).abs() + self.rhs[i].abs());
        }
        Ok((f, scale, shift))
    }

    /// `Φ(z) = Σ m z²/(2Δt) + ½zᵀAz + Σ m j_λ(z) − rhsᵀz` and a roundoff floor.
    fn functional(&self, stepper: &Stepper, z: &[f64]) -> Result<(f64, f64)> {
        let beta = &stepper.problem.beta;
        let lambda = stepper.config.lambda;
        let mut value = 0.5 * self.operator.quad_form(z) - dot(&self.rhs, z);
        let mut magnitude = value.abs() + dot(&self.rhs, z).abs();
        for (m, &r) in self.mass.iter().zip(z) {
            let term = m * (r * r / (2.0 * self.dt) + beta.moreau(lambda, r)?);
            value += term;
            magnitude += term.abs();
        }
        Ok((value, 1e-14 * magnitude))
    }

    fn solve(&self, stepper: &Stepper, mut z: Vec<f64>) -> Result<(Vec<f64>, usize, f64)> {
        let tol = stepper.config.newton_tol;
        let max_iter = stepper.config.newton_max;
        let failure = |residual: f64, iterations: usize| Error::StepFailure {
            step: 0,
            time: f64::NAN,
            residual,
            iterations,
        };
        let relative = |f: &[f64], scale: f64| if scale > 0.0 { max_abs(f) / scale } else { 0.0 };
        let (mut f, mut scale, mut shift) = self.evaluate(stepper, &z)?;
        let mut residual = relative(&f, scale);
        let mut iterations = 0;
        while residual > tol {
            if iterations == max_iter {
                return Err(failure(residual, iterations));
            }
            iterations += 1;
            let mut jacobian = self.operator.clone();
            jacobian.add_diag(&shift);
            let minus_f: Vec<f64> = f.iter().map(|x| -x).collect();
            let direction = jacobian.solve(&minus_f).map_err(|_| failure(residual, iterations))?;
            let slope = dot(&f, &direction);
            let (phi, floor) = self.functional(stepper, &z)?;
            let mut step = 1.0;
            let accepted = loop {
                let trial: Vec<f64> = z.iter().zip(&direction).map(|(a, d)| a + step * d).collect();
                let (phi_trial, _) = self.functional(stepper, &trial)?;
                if phi_trial <= phi + 1e-4 * step * slope + floor {
                    break Some(trial);
                }
                step *= 0.5;
                if step < 1e-12 {
                    break None;
                }
            };
            z = accepted.ok_or_else(|| failure(residual, iterations))?;
            (f, scale, shift) = self.evaluate(stepper, &z)?;
            residual = relative(&f, scale);
            if !residual.is_finite() {
                return Err(failure(residual, iterations));
            }
        }
        Ok((z, iterations, residual))
    }
}

/// Single implicit step `U(t) → U(t + Δt)` with `α` taken from `schedule` at `t + Δt`.
pub fn step(
    problem: &ProblemSpec,
    mesh: &TwoDomainMesh,
    schedule: &PermeabilitySchedule,
    config: &SolverConfig,
    t: f64,
    state: &CoupledField,
) -> Result<CoupledField> {
    let stepper = Stepper::new(problem, mesh, *config)?;
    let alpha = schedule.alpha(t + config.dt);
    let regime = if alpha.is_finite() {
        Regime::Finite(alpha)
    } else {
        Regime::Infinity
    };
    Ok(stepper.step(regime, t, config.dt, state)?.state)
}

pub fn solve_finite_alpha(
    problem: &ProblemSpec,
    schedule: &PermeabilitySchedule,
    config: &SolverConfig,
) -> Result<Trajectory> {
    let mesh = problem.mesh()?;
    let stepper = Stepper::new(problem, &mesh, *config)?;
    stepper.run_finite_alpha(schedule, problem.initial_field(&mesh)?)
}

pub fn solve_split(problem: &ProblemSpec, config: &SolverConfig) -> Result<Trajectory> {
    let mesh = problem.mesh()?;
    let stepper = Stepper::new(problem, &mesh, *config)?;
    stepper.run_split(problem.initial_field(&mesh)?)
}

pub fn solve_merged(problem: &ProblemSpec, config: &SolverConfig) -> Result<Trajectory> {
    let mesh = problem.mesh()?;
    let stepper = Stepper::new(problem, &mesh, *config)?;
    stepper.run_merged(problem.initial_field(&mesh)?)
}

pub fn solve_blowup_and_extend(
    problem: &ProblemSpec,
    schedule: &PermeabilitySchedule,
    config: &SolverConfig,
) -> Result<Trajectory> {
    let mesh = problem.mesh()?;
    let stepper = Stepper::new(problem, &mesh, *config)?;
    stepper.run_blowup(schedule, problem.initial_field(&mesh)?)
}

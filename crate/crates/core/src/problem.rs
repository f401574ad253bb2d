//! Physical data of the coupled system and the permeability schedule.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CoupledField, GeometryCase, Side, TwoDomainMesh};
use crate::monotone::MonotoneGraph;

/// Lipschitz reaction `π` with `π(0) = 0`, treated explicitly.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Reaction {
    #[default]
    Zero,
    /// `π(r) = −r`, the Allen–Cahn choice.
    AllenCahn,
    Linear {
        slope: f64,
    },
    /// `π(r) = Σ_k c_k r^k` (k ≥ 1) evaluated at `clamp(r, −clip, clip)`.
    Poly {
        coefficients: Vec<f64>,
        clip: f64,
    },
}

impl Reaction {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Reaction::Zero => 0.0,
            Reaction::AllenCahn => -r,
            Reaction::Linear { slope } => slope * r,
            Reaction::Poly { coefficients, clip } => {
                let x = r.clamp(-clip, *clip);
                coefficients.iter().rev().fold(0.0, |acc, c| (acc + c) * x)
            }
        }
    }

    /// Declared Lipschitz constant.
    pub fn lipschitz(&self) -> f64 {
        match self {
            Reaction::Zero => 0.0,
            Reaction::AllenCahn => 1.0,
            Reaction::Linear { slope } => slope.abs(),
            Reaction::Poly { coefficients, clip } => coefficients
                .iter()
                .enumerate()
                .map(|(k, c)| (k + 1) as f64 * c.abs() * clip.powi(k as i32))
                .sum(),
        }
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        match self {
            Reaction::Linear { slope } if !slope.is_finite() => {
                Err(Error::config(format!("{field}.slope"), "must be finite"))
            }
            Reaction::Poly { coefficients, clip } => {
                if !(clip.is_finite() && *clip > 0.0) {
                    return Err(Error::config(format!("{field}.clip"), "must be positive"));
                }
                if coefficients.is_empty() || coefficients.iter().any(|c| !c.is_finite()) {
                    return Err(Error::config(
                        format!("{field}.coefficients"),
                        "need at least one finite coefficient (of r¹, r², ...)",
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// Source term `g_i(t, x)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    #[default]
    Zero,
    Constant {
        value: f64,
    },
    /// `amplitude · exp(−((x − center)/width)²)`.
    Bump {
        amplitude: f64,
        center: f64,
        width: f64,
    },
    /// `amplitude · cos(2π t / period)`.
    Oscillating {
        amplitude: f64,
        period: f64,
    },
}

impl Source {
    pub fn eval(&self, t: f64, x: f64) -> f64 {
        match *self {
            Source::Zero => 0.0,
            Source::Constant { value } => value,
            Source::Bump {
                amplitude,
                center,
                width,
            } => amplitude * (-((x - center) / width).powi(2)).exp(),
            Source::Oscillating { amplitude, period } => amplitude * (2.0 * std::f64::consts::PI * t / period).cos(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Source::Zero)
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        match *self {
            Source::Bump { width, .. } if !(width > 0.0) => {
                Err(Error::config(format!("{field}.width"), "must be positive"))
            }
            Source::Oscillating { period, .. } if !(period > 0.0) => {
                Err(Error::config(format!("{field}.period"), "must be positive"))
            }
            _ => Ok(()),
        }
    }
}

/// Initial data presets. Coordinates refer to the whole domain `Ω̄`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Constant {
        u: f64,
        v: f64,
    },
    /// `left` for `x < position`, `right` for `x > position`; a node sitting
    /// on `position` takes the value of the side its subdomain lies on.
    Step {
        left: f64,
        right: f64,
        position: f64,
    },
    /// Restrictions of `level + amplitude·cos(modes·π(x − x_min)/L)`; matched on `S`.
    SmoothMatched {
        level: f64,
        amplitude: f64,
        modes: u32,
    },
    /// Same cosine profile shifted by a different level on each side.
    Mismatched {
        u_level: f64,
        v_level: f64,
        amplitude: f64,
        modes: u32,
    },
    /// Random cosine series drawn from the run seed.
    RandomSmooth {
        amplitude: f64,
        modes: u32,
        matched: bool,
    },
    /// Explicit nodal values.
    Nodal {
        u: Vec<f64>,
        v: Vec<f64>,
    },
}

impl InitialData {
    pub fn materialize(&self, mesh: &TwoDomainMesh, seed: u64) -> Result<CoupledField> {
        let (x_min, x_max) = mesh.geometry().extent();
        let length = x_max - x_min;
        let cosine = |modes: u32, x: f64| (f64::from(modes) * std::f64::consts::PI * (x - x_min) / length).cos();
        let field = match self {
            InitialData::Constant { u, v } => CoupledField::constant(mesh, *u, *v),
            InitialData::Step { left, right, position } => {
                let side_value = |side: Side| {
                    let xs = mesh.coords(side);
                    xs.iter()
                        .enumerate()
                        .map(|(k, &x)| {
                            if x < *position {
                                *left
                            } else if x > *position {
                                *right
                            } else {
                                // decide by the neighbouring node of the same piece
                                let neighbour = if k > 0 && !piece_break(mesh, side, k - 1) {
                                    xs[k - 1]
                                } else {
                                    xs[k + 1]
                                };
                                if neighbour < *position {
                                    *left
                                } else {
                                    *right
                                }
                            }
                        })
                        .collect::<Vec<f64>>()
                };
                CoupledField::new(side_value(Side::One), side_value(Side::Two))
            }
            InitialData::SmoothMatched {
                level,
                amplitude,
                modes,
            } => {
                let f = |x: f64| level + amplitude * cosine(*modes, x);
                mesh.interpolate(f, f)
            }
            InitialData::Mismatched {
                u_level,
                v_level,
                amplitude,
                modes,
            } => mesh.interpolate(
                |x| u_level + amplitude * cosine(*modes, x),
                |x| v_level + amplitude * cosine(*modes, x),
            ),
            InitialData::RandomSmooth {
                amplitude,
                modes,
                matched,
            } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut draw = || -> Vec<f64> {
                    (0..=*modes)
                        .map(|k| rng.gen_range(-1.0..1.0) / (1.0 + k as f64))
                        .collect()
                };
                let a = draw();
                let b = if *matched { a.clone() } else { draw() };
                let series = |coef: &[f64], x: f64| -> f64 {
                    amplitude
                        * coef
                            .iter()
                            .enumerate()
                            .map(|(k, c)| c * cosine(k as u32, x))
                            .sum::<f64>()
                };
                mesh.interpolate(|x| series(&a, x), |x| series(&b, x))
            }
            InitialData::Nodal { u, v } => {
                if u.len() != mesh.len(Side::One) {
                    return Err(Error::config(
                        "physics.initial.u",
                        format!("expected {} values, got {}", mesh.len(Side::One), u.len()),
                    ));
                }
                if v.len() != mesh.len(Side::Two) {
                    return Err(Error::config(
                        "physics.initial.v",
                        format!("expected {} values, got {}", mesh.len(Side::Two), v.len()),
                    ));
                }
                CoupledField::new(u.clone(), v.clone())
            }
        };
        if !field.is_finite() {
            return Err(Error::config("physics.initial", "initial data must be finite"));
        }
        Ok(field)
    }
}

/// Whether nodes `k` and `k + 1` of a side belong to different pieces.
fn piece_break(mesh: &TwoDomainMesh, side: Side, k: usize) -> bool {
    k + 1 >= mesh.len(side) || mesh.stiffness(side).get(k, k + 1) == 0.0
}

/// Everything that defines the continuous problem apart from `α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub geometry: GeometryCase,
    pub kappa: f64,
    pub beta: MonotoneGraph,
    pub pi1: Reaction,
    pub pi2: Reaction,
    pub g1: Source,
    pub g2: Source,
    pub initial: InitialData,
    pub t_final: f64,
    pub seed: u64,
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        if !(self.kappa > 0.0 && self.kappa.is_finite()) {
            return Err(Error::config("physics.kappa", "must be positive"));
        }
        self.beta.validate().map_err(|e| prefix(e, "physics."))?;
        self.pi1.validate("physics.pi")?;
        self.pi2.validate("physics.pi2")?;
        self.g1.validate("physics.sources.g1")?;
        self.g2.validate("physics.sources.g2")?;
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(Error::config("time.t_final", "must be positive"));
        }
        Ok(())
    }

    pub fn reaction(&self, side: Side) -> &Reaction {
        match side {
            Side::One => &self.pi1,
            Side::Two => &self.pi2,
        }
    }

    pub fn source(&self, side: Side) -> &Source {
        match side {
            Side::One => &self.g1,
            Side::Two => &self.g2,
        }
    }

    /// `max(L₁, L₂)`.
    pub fn lipschitz(&self) -> f64 {
        self.pi1.lipschitz().max(self.pi2.lipschitz())
    }

    pub fn mesh(&self) -> Result<TwoDomainMesh> {
        TwoDomainMesh::build(self.geometry)
    }

    pub fn initial_field(&self, mesh: &TwoDomainMesh) -> Result<CoupledField> {
        self.initial.materialize(mesh, self.seed)
    }

    /// The Allen–Cahn setup: cubic `β`, `π(r) = −r`, no sources.
    pub fn allen_cahn(geometry: GeometryCase, initial: InitialData, t_final: f64) -> Self {
        Self {
            geometry,
            kappa: 1.0,
            beta: MonotoneGraph::Cubic,
            pi1: Reaction::AllenCahn,
            pi2: Reaction::AllenCahn,
            g1: Source::Zero,
            g2: Source::Zero,
            initial,
            t_final,
            seed: 42,
        }
    }

    /// Pure diffusion: `β = π = g = 0`.
    pub fn heat(geometry: GeometryCase, initial: InitialData, t_final: f64) -> Self {
        Self {
            beta: MonotoneGraph::Zero,
            pi1: Reaction::Zero,
            pi2: Reaction::Zero,
            ..Self::allen_cahn(geometry, initial, t_final)
        }
    }
}

fn prefix(err: Error, prefix: &str) -> Error {
    match err {
        Error::Config { field, message } => Error::Config {
            field: format!("{prefix}{field}"),
            message,
        },
        other => other,
    }
}

/// Time-dependent permeability with `α(t) ≥ 0` and bounded variation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum SmoothAlpha {
    /// `base + amplitude·sin(2πt/period)`, requires `base ≥ |amplitude|`.
    Sinusoid { base: f64, amplitude: f64, period: f64 },
    /// Linear interpolation from `start` at `t = 0` to `end` at `t = duration`, constant after.
    Ramp { start: f64, end: f64, duration: f64 },
}

impl SmoothAlpha {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            SmoothAlpha::Sinusoid {
                base,
                amplitude,
                period,
            } => base + amplitude * (2.0 * std::f64::consts::PI * t / period).sin(),
            SmoothAlpha::Ramp { start, end, duration } => {
                let s = (t / duration).clamp(0.0, 1.0);
                start + s * (end - start)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PermeabilitySchedule {
    Constant {
        value: f64,
    },
    Smooth(SmoothAlpha),
    /// `α(t) = alpha0 / (t_star − t)^p` on `[0, t_star)`.
    Blowup {
        alpha0: f64,
        t_star: f64,
        p: f64,
    },
}

impl Default for PermeabilitySchedule {
    fn default() -> Self {
        PermeabilitySchedule::Constant { value: 1.0 }
    }
}

impl PermeabilitySchedule {
    pub fn constant(value: f64) -> Self {
        PermeabilitySchedule::Constant { value }
    }

    pub fn blowup(alpha0: f64, t_star: f64, p: f64) -> Self {
        PermeabilitySchedule::Blowup { alpha0, t_star, p }
    }

    /// `α(t)`; `+∞` at and beyond the blow-up time.
    pub fn alpha(&self, t: f64) -> f64 {
        match *self {
            PermeabilitySchedule::Constant { value } => value,
            PermeabilitySchedule::Smooth(s) => s.eval(t),
            PermeabilitySchedule::Blowup { alpha0, t_star, p } => {
                if t < t_star {
                    alpha0 / (t_star - t).powf(p)
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    pub fn validate(&self, t_final: f64) -> Result<()> {
        match *self {
            PermeabilitySchedule::Constant { value } => {
                if !(value >= 0.0 && value.is_finite()) {
                    return Err(Error::config("alpha.value", "must be finite and >= 0"));
                }
            }
            PermeabilitySchedule::Smooth(SmoothAlpha::Sinusoid {
                base,
                amplitude,
                period,
            }) => {
                if !(period > 0.0) {
                    return Err(Error::config("alpha.period", "must be positive"));
                }
                if !(base.is_finite() && amplitude.is_finite() && base >= amplitude.abs()) {
                    return Err(Error::config("alpha.base", "must be finite and >= |alpha.amplitude|"));
                }
            }
            PermeabilitySchedule::Smooth(SmoothAlpha::Ramp { start, end, duration }) => {
                if !(duration > 0.0) {
                    return Err(Error::config("alpha.duration", "must be positive"));
                }
                if !(start >= 0.0 && end >= 0.0 && start.is_finite() && end.is_finite()) {
                    return Err(Error::config("alpha.start", "ramp end points must be finite and >= 0"));
                }
            }
            PermeabilitySchedule::Blowup { alpha0, t_star, p } => {
                if !(alpha0 > 0.0 && alpha0.is_finite()) {
                    return Err(Error::config("alpha.alpha0", "must be positive"));
                }
                if !(p >= 1.0 && p.is_finite()) {
                    return Err(Error::config("alpha.p", "must be >= 1"));
                }
                if !(t_star > 0.0 && t_star < t_final) {
                    return Err(Error::config("alpha.t_star", "must lie in (0, time.t_final)"));
                }
            }
        }
        Ok(())
    }
}

/// Discretization and inner-solver knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    /// Yosida parameter.
    pub lambda: f64,
    /// Relative residual tolerance of the Newton solves.
    pub newton_tol: f64,
    pub newton_max: usize,
    /// Remaining time before `T*` at which the blow-up run merges the subdomains.
    pub switch_gap: f64,
}

impl SolverConfig {
    /// Defaults with `λ = Δt`.
    pub fn with_dt(dt: f64) -> Self {
        Self {
            dt,
            lambda: dt,
            newton_tol: 1e-12,
            newton_max: 50,
            switch_gap: 1e-3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::config("time.dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(Error::config("solver.lambda", "must be positive"));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::config("solver.newton_tol", "must be positive"));
        }
        if self.newton_max == 0 {
            return Err(Error::config("solver.newton_max", "must be at least 1"));
        }
        if !(self.switch_gap > 0.0) {
            return Err(Error::config("solver.delta_switch", "must be positive"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};

    #[test]
    fn reactions_are_lipschitz_and_vanish_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for pi in [
            Reaction::Zero,
            Reaction::AllenCahn,
            Reaction::Linear { slope: -2.5 },
            Reaction::Poly {
                coefficients: vec![-1.0, 0.0, 0.5],
                clip: 2.0,
            },
        ] {
            assert_eq!(pi.eval(0.0), 0.0);
            let l = pi.lipschitz();
            for _ in 0..1000 {
                let (r, s) = (rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0));
                assert!((pi.eval(r) - pi.eval(s)).abs() <= l * (r - s).abs() + 1e-12);
            }
        }
    }

    #[test]
    fn step_data_splits_at_interface() {
        let mesh = TwoDomainMesh::build(GeometryCase::case1(1.0, 1.0, 4, 4)).unwrap();
        let u0 = InitialData::Step {
            left: 0.8,
            right: -0.6,
            position: 0.0,
        }
        .materialize(&mesh, 0)
        .unwrap();
        assert!(u0.u.iter().all(|&x| x == 0.8));
        assert!(u0.v.iter().all(|&x| x == -0.6));
        assert_eq!(mesh.interface_jump_norm(&u0), 1.4);
    }

    #[test]
    fn step_data_case2_interfaces() {
        let mesh = TwoDomainMesh::build(GeometryCase::case2(0.5, 1.0, 4, 4)).unwrap();
        let u0 = InitialData::Step {
            left: 1.0,
            right: 0.0,
            position: -0.5,
        }
        .materialize(&mesh, 0)
        .unwrap();
        // left piece of Ω₂ lies left of −a, Ω₁ to the right
        assert!(u0.v[..5].iter().all(|&x| x == 1.0));
        assert!(u0.u.iter().all(|&x| x == 0.0));
    }

    #[test]
    fn matched_presets_have_no_jump() {
        for geometry in [GeometryCase::case1(1.0, 2.0, 5, 7), GeometryCase::case2(0.3, 1.0, 6, 6)] {
            let mesh = TwoDomainMesh::build(geometry).unwrap();
            for init in [
                InitialData::SmoothMatched {
                    level: 0.1,
                    amplitude: 0.5,
                    modes: 2,
                },
                InitialData::RandomSmooth {
                    amplitude: 1.0,
                    modes: 4,
                    matched: true,
                },
            ] {
                let f = init.materialize(&mesh, 42).unwrap();
                assert!(mesh.interface_jump_norm(&f) < 1e-15);
            }
        }
    }

    #[test]
    fn random_preset_is_seeded() {
        let mesh = TwoDomainMesh::build(GeometryCase::case1(1.0, 1.0, 8, 8)).unwrap();
        let init = InitialData::RandomSmooth {
            amplitude: 1.0,
            modes: 3,
            matched: false,
        };
        assert_eq!(
            init.materialize(&mesh, 42).unwrap(),
            init.materialize(&mesh, 42).unwrap()
        );
        assert_ne!(
            init.materialize(&mesh, 42).unwrap(),
            init.materialize(&mesh, 43).unwrap()
        );
    }

    #[test]
    fn blowup_schedule() {
        let s = PermeabilitySchedule::blowup(1.0, 0.1, 1.0);
        assert_abs_diff_eq!(s.alpha(0.09), 100.0, epsilon = 1e-9);
        assert_eq!(s.alpha(0.1), f64::INFINITY);
        assert!(s.validate(0.2).is_ok());
        assert!(s.validate(0.05).is_err());
    }

    #[test]
    fn solver_config_validation_names_field() {
        let mut c = SolverConfig::with_dt(1e-3);
        c.dt = 0.0;
        match c.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "time.dt"),
            other => panic!("unexpected {other:?}"),
        }
    }
}

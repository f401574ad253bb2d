mod common;

use common::{dense_step, single_domain_heat, DenseLayout, DenseStep};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use transmission_core::energy::Regime;
use transmission_core::grid::{CoupledField, GeometryCase, Side, TwoDomainMesh};
use transmission_core::monotone::MonotoneGraph;
use transmission_core::problem::{
    InitialData, PermeabilitySchedule, ProblemSpec, Reaction, SmoothAlpha, SolverConfig, Source,
};
use transmission_core::stepper::{
    solve_blowup_and_extend, solve_finite_alpha, solve_merged, solve_split, Stepper, Trajectory,
};

fn step_data() -> InitialData {
    InitialData::Step {
        left: 0.8,
        right: -0.6,
        position: 0.0,
    }
}

fn mass_scale(mesh: &TwoDomainMesh, f: &CoupledField) -> f64 {
    mesh.total_mass(&f.map(f64::abs))
}

fn assert_mass_conserved(mesh: &TwoDomainMesh, traj: &Trajectory) {
    let m0 = traj.diagnostics[0].mass;
    let scale = mass_scale(mesh, &traj.states[0]);
    for d in &traj.diagnostics {
        assert!(
            (d.mass - m0).abs() <= 1e-12 * scale,
            "mass drift {} at t={}",
            (d.mass - m0).abs() / scale,
            d.t
        );
    }
}

#[test]
fn mass_is_conserved_in_every_regime() {
    for geometry in [
        GeometryCase::case1(1.0, 1.5, 40, 30),
        GeometryCase::case2(0.5, 1.0, 30, 20),
    ] {
        let mut problem = ProblemSpec::heat(
            geometry,
            InitialData::Mismatched {
                u_level: 1.0,
                v_level: 0.2,
                amplitude: 0.5,
                modes: 3,
            },
            0.2,
        );
        let mesh = problem.mesh().unwrap();
        let config = SolverConfig::with_dt(1e-3);
        assert_mass_conserved(&mesh, &solve_split(&problem, &config).unwrap());
        assert_mass_conserved(
            &mesh,
            &solve_finite_alpha(&problem, &PermeabilitySchedule::constant(3.0), &config).unwrap(),
        );
        let smooth = PermeabilitySchedule::Smooth(SmoothAlpha::Sinusoid {
            base: 2.0,
            amplitude: 1.5,
            period: 0.05,
        });
        assert_mass_conserved(&mesh, &solve_finite_alpha(&problem, &smooth, &config).unwrap());
        let blowup = solve_blowup_and_extend(&problem, &PermeabilitySchedule::blowup(1.0, 0.1, 1.0), &config).unwrap();
        assert!(blowup.handoff.is_some());
        assert_mass_conserved(&mesh, &blowup);

        problem.initial = InitialData::SmoothMatched {
            level: 0.4,
            amplitude: 0.5,
            modes: 2,
        };
        assert_mass_conserved(&mesh, &solve_merged(&problem, &config).unwrap());
    }
}

#[test]
fn split_conserves_each_subdomain_mass() {
    let problem = ProblemSpec::heat(GeometryCase::case1(1.0, 1.0, 20, 20), step_data(), 0.1);
    let mesh = problem.mesh().unwrap();
    let traj = solve_split(&problem, &SolverConfig::with_dt(1e-3)).unwrap();
    let part_mass = |f: &CoupledField, side: Side| -> f64 {
        mesh.lumped_mass(side)
            .iter()
            .zip(f.part(side))
            .map(|(m, x)| m * x)
            .sum()
    };
    for side in [Side::One, Side::Two] {
        let m0 = part_mass(&traj.states[0], side);
        for s in &traj.states {
            assert!((part_mass(s, side) - m0).abs() <= 1e-12 * m0.abs());
        }
    }
}

fn lyapunov(traj: &Trajectory) -> Vec<f64> {
    traj.diagnostics.iter().map(|d| d.energy + d.moreau_energy).collect()
}

fn assert_nonincreasing(values: &[f64], slack: f64) {
    for (k, w) in values.windows(2).enumerate() {
        assert!(w[1] <= w[0] + slack, "increase {} at step {}", w[1] - w[0], k + 1);
    }
}

#[test]
fn lyapunov_energy_decreases_without_reaction() {
    for beta in [
        MonotoneGraph::Cubic,
        MonotoneGraph::AbsSubdiff,
        MonotoneGraph::IndicatorInterval {
            lower: -0.5,
            upper: 0.7,
        },
        MonotoneGraph::OddPower { exponent: 5 },
    ] {
        let mut problem = ProblemSpec::allen_cahn(GeometryCase::case2(0.4, 1.0, 40, 30), step_data(), 0.1);
        problem.initial = InitialData::Step {
            left: 0.8,
            right: -0.6,
            position: 0.2,
        };
        problem.beta = beta;
        problem.pi1 = Reaction::Zero;
        problem.pi2 = Reaction::Zero;
        let config = SolverConfig::with_dt(1e-3);
        let coupled = solve_finite_alpha(&problem, &PermeabilitySchedule::constant(5.0), &config).unwrap();
        assert_nonincreasing(&lyapunov(&coupled), 1e-10);
        assert_nonincreasing(&lyapunov(&solve_split(&problem, &config).unwrap()), 1e-10);
        problem.initial = InitialData::SmoothMatched {
            level: 0.1,
            amplitude: 0.6,
            modes: 3,
        };
        assert_nonincreasing(&lyapunov(&solve_merged(&problem, &config).unwrap()), 1e-10);
    }
}

fn lumped_distance(mesh: &TwoDomainMesh, a: &CoupledField, b: &CoupledField) -> f64 {
    mesh.field_norm(&a.sub(b))
}

#[test]
fn trajectories_contract_without_reaction() {
    let mut problem = ProblemSpec::allen_cahn(GeometryCase::case1(1.0, 1.0, 30, 30), step_data(), 0.1);
    problem.pi1 = Reaction::Zero;
    problem.pi2 = Reaction::Zero;
    let mesh = problem.mesh().unwrap();
    let config = SolverConfig::with_dt(2e-3);
    let stepper = Stepper::new(&problem, &mesh, config).unwrap();
    let a = problem.initial_field(&mesh).unwrap();
    let b = InitialData::RandomSmooth {
        amplitude: 1.5,
        modes: 5,
        matched: false,
    }
    .materialize(&mesh, 7)
    .unwrap();
    let schedule = PermeabilitySchedule::constant(2.0);
    let ta = stepper.run_finite_alpha(&schedule, a.clone()).unwrap();
    let tb = stepper.run_finite_alpha(&schedule, b.clone()).unwrap();
    let d0 = lumped_distance(&mesh, &a, &b);
    let mut previous = d0;
    for (x, y) in ta.states.iter().zip(&tb.states) {
        let d = lumped_distance(&mesh, x, y);
        assert!(d <= d0 * (1.0 + 1e-12));
        assert!(d <= previous * (1.0 + 1e-10));
        previous = d;
    }
}

#[test]
fn gronwall_bound_with_reaction() {
    let problem = ProblemSpec::allen_cahn(GeometryCase::case2(0.5, 1.0, 20, 20), step_data(), 0.3);
    let mesh = problem.mesh().unwrap();
    let config = SolverConfig::with_dt(1e-2);
    let l = problem.lipschitz();
    assert!(config.dt * l <= 0.5);
    let stepper = Stepper::new(&problem, &mesh, config).unwrap();
    let a = problem.initial_field(&mesh).unwrap();
    let b = a.map(|x| 0.9 * x + 0.05);
    let ta = stepper
        .run_finite_alpha(&PermeabilitySchedule::constant(1.0), a.clone())
        .unwrap();
    let tb = stepper
        .run_finite_alpha(&PermeabilitySchedule::constant(1.0), b.clone())
        .unwrap();
    let d0 = lumped_distance(&mesh, &a, &b);
    for (n, (x, y)) in ta.states.iter().zip(&tb.states).enumerate() {
        let bound = (1.0 - config.dt * l).powi(-(n as i32)) * d0;
        assert!(lumped_distance(&mesh, x, y) <= bound * (1.0 + 1e-10));
    }
}

#[test]
fn zero_permeability_equals_split() {
    let problem = ProblemSpec::allen_cahn(GeometryCase::case1(1.0, 1.0, 50, 50), step_data(), 0.1);
    let config = SolverConfig::with_dt(1e-3);
    let coupled = solve_finite_alpha(&problem, &PermeabilitySchedule::constant(0.0), &config).unwrap();
    let split = solve_split(&problem, &config).unwrap();
    for (x, y) in coupled.states.iter().zip(&split.states) {
        assert!(x.sub(y).max_abs() <= 1e-12);
    }
}

#[test]
fn constant_smooth_schedule_equals_constant() {
    let problem = ProblemSpec::allen_cahn(GeometryCase::case1(1.0, 1.0, 30, 30), step_data(), 0.05);
    let config = SolverConfig::with_dt(1e-3);
    let flat = PermeabilitySchedule::Smooth(SmoothAlpha::Ramp {
        start: 4.0,
        end: 4.0,
        duration: 1.0,
    });
    let a = solve_finite_alpha(&problem, &flat, &config).unwrap();
    let b = solve_finite_alpha(&problem, &PermeabilitySchedule::constant(4.0), &config).unwrap();
    for (x, y) in a.states.iter().zip(&b.states) {
        assert!(x.sub(y).max_abs() <= 1e-12);
    }
}

fn tiny_geometry(case2: bool, rng: &mut ChaCha8Rng) -> (GeometryCase, DenseLayout) {
    if case2 {
        let a = rng.gen_range(0.2..0.8);
        let b = a + rng.gen_range(0.3..1.0);
        (GeometryCase::case2(a, b, 2, 2), DenseLayout::case2(a, b, 2, 2))
    } else {
        let (l1, l2) = (rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0));
        (GeometryCase::case1(l1, l2, 2, 2), DenseLayout::case1(l1, l2, 2, 2))
    }
}

#[test]
fn tiny_systems_match_dense_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..40 {
        let (geometry, layout) = tiny_geometry(trial % 2 == 1, &mut rng);
        let split = trial % 5 == 0;
        let data = DenseStep {
            kappa: rng.gen_range(0.5..2.0),
            alpha: if split { 0.0 } else { rng.gen_range(0.1..10.0) },
            lambda: 0.0,
            dt: rng.gen_range(1e-3..1e-1),
            reaction_slope: -1.0,
            g_u: rng.gen_range(-1.0..1.0),
            g_v: rng.gen_range(-1.0..1.0),
            cubic: true,
        };
        let data = DenseStep {
            lambda: data.dt,
            ..data
        };
        let mut problem = ProblemSpec::allen_cahn(geometry, InitialData::Constant { u: 0.0, v: 0.0 }, 1.0);
        problem.kappa = data.kappa;
        problem.g1 = Source::Constant { value: data.g_u };
        problem.g2 = Source::Constant { value: data.g_v };
        let mesh = problem.mesh().unwrap();
        let u: Vec<f64> = (0..layout.n_u()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let v: Vec<f64> = (0..layout.n_v()).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let stepper = Stepper::new(&problem, &mesh, SolverConfig::with_dt(data.dt)).unwrap();
        let regime = if split {
            Regime::Zero
        } else {
            Regime::Finite(data.alpha)
        };
        let ours = stepper
            .step(regime, 0.0, data.dt, &CoupledField::new(u.clone(), v.clone()))
            .unwrap()
            .state;
        let (ru, rv) = dense_step(&layout, &data, &u, &v);
        for (a, b) in ours.u.iter().chain(&ours.v).zip(ru.iter().chain(&rv)) {
            assert!((a - b).abs() <= 1e-10, "trial {trial}: {a} vs {b}");
        }
    }
}

#[test]
fn merged_heat_matches_single_domain_solve() {
    // equal element sizes on both sides so the merged mesh is uniform
    for (geometry, x_min, x_max, n) in [
        (GeometryCase::case1(1.0, 0.5, 20, 10), -1.0, 0.5, 30),
        (GeometryCase::case2(0.5, 1.0, 20, 10), -1.0, 1.0, 40),
    ] {
        let problem = ProblemSpec::heat(
            geometry,
            InitialData::SmoothMatched {
                level: 0.2,
                amplitude: 1.0,
                modes: 3,
            },
            0.05,
        );
        let mesh = problem.mesh().unwrap();
        let config = SolverConfig::with_dt(1e-3);
        let traj = solve_merged(&problem, &config).unwrap();
        let profile = |x: f64| 0.2 + (3.0 * std::f64::consts::PI * (x - x_min) / (x_max - x_min)).cos();
        let xs: Vec<f64> = (0..=n).map(|i| x_min + (x_max - x_min) * i as f64 / n as f64).collect();
        let w0: Vec<f64> = xs.iter().map(|&x| profile(x)).collect();
        let reference = single_domain_heat(x_min, x_max, n, &w0, config.dt, traj.len() - 1);
        let locate = |x: f64| ((x - x_min) / (x_max - x_min) * n as f64).round() as usize;
        for (state, w) in traj.states.iter().zip(&reference) {
            for side in [Side::One, Side::Two] {
                for (&x, &value) in mesh.coords(side).iter().zip(state.part(side)) {
                    assert!((value - w[locate(x)]).abs() <= 1e-10);
                }
            }
        }
    }
}

#[test]
fn interface_flux_equals_robin_coupling() {
    let mut problem = ProblemSpec::allen_cahn(GeometryCase::case2(0.5, 1.0, 20, 20), step_data(), 0.1);
    problem.initial = InitialData::Step {
        left: 1.0,
        right: -0.5,
        position: 0.1,
    };
    problem.g1 = Source::Bump {
        amplitude: 0.5,
        center: 0.0,
        width: 0.2,
    };
    let mesh = problem.mesh().unwrap();
    let config = SolverConfig::with_dt(1e-2);
    let stepper = Stepper::new(&problem, &mesh, config).unwrap();
    let old = problem.initial_field(&mesh).unwrap();
    let alpha = 7.5;
    let new = stepper.step(Regime::Finite(alpha), 0.0, config.dt, &old).unwrap().state;
    let ku = mesh.stiffness(Side::One).mul_vec(&new.u);
    let kv = mesh.stiffness(Side::Two).mul_vec(&new.v);
    let m1 = mesh.lumped_mass(Side::One);
    let m2 = mesh.lumped_mass(Side::Two);
    for p in mesh.interface() {
        let s = p.u;
        let bulk_u = m1[s] * (new.u[s] - old.u[s]) / config.dt
            + ku[s]
            + m1[s] * problem.beta.yosida(config.lambda, new.u[s]).unwrap()
            + m1[s] * problem.pi1.eval(old.u[s])
            - m1[s] * problem.g1.eval(config.dt, mesh.coords(Side::One)[s]);
        let coupling = alpha * (new.v[p.v] - new.u[s]);
        assert!((bulk_u - coupling).abs() <= 1e-10 * (1.0 + coupling.abs()));

        let q = p.v;
        let bulk_v = m2[q] * (new.v[q] - old.v[q]) / config.dt
            + problem.kappa * kv[q]
            + m2[q] * problem.beta.yosida(config.lambda, new.v[q]).unwrap()
            + m2[q] * problem.pi2.eval(old.v[q]);
        assert!((bulk_v + coupling).abs() <= 1e-10 * (1.0 + coupling.abs()));
    }
}

#[test]
fn blowup_with_matched_constant_data_never_jumps() {
    let problem = ProblemSpec::allen_cahn(
        GeometryCase::case1(1.0, 1.0, 20, 20),
        InitialData::Constant { u: 0.3, v: 0.3 },
        0.2,
    );
    let config = SolverConfig::with_dt(1e-3);
    let blowup = solve_blowup_and_extend(&problem, &PermeabilitySchedule::blowup(1.0, 0.1, 1.0), &config).unwrap();
    let handoff = blowup.handoff.clone().unwrap();
    assert!(handoff.discrepancy <= 1e-13);
    assert!(blowup.diagnostics.iter().all(|d| d.jump <= 1e-13));
    let reference = solve_finite_alpha(&problem, &PermeabilitySchedule::constant(1.0), &config).unwrap();
    // the truncated step before hand-off shifts the grid; compare at the end
    let last = blowup.last();
    let ode = reference.last();
    assert_eq!(blowup.times.last(), reference.times.last());
    assert!(last.sub(ode).max_abs() < 1e-4);
    assert!(last.u.iter().chain(&last.v).all(|&x| (x - last.u[0]).abs() <= 1e-13));
}

#[test]
fn blowup_handoff_shrinks_with_gap() {
    let problem = ProblemSpec::allen_cahn(GeometryCase::case1(1.0, 1.0, 50, 50), step_data(), 0.2);
    let schedule = PermeabilitySchedule::blowup(1.0, 0.1, 1.0);
    let mut previous = f64::INFINITY;
    for gap in [1e-2, 1e-3, 1e-4] {
        let mut config = SolverConfig::with_dt(1e-4);
        config.switch_gap = gap;
        let traj = solve_blowup_and_extend(&problem, &schedule, &config).unwrap();
        let h = traj.handoff.unwrap();
        assert!((h.time - (0.1 - gap)).abs() < 1e-15);
        assert!(h.discrepancy < previous);
        assert!(h.discrepancy < 1e-2 * h.state_norm);
        previous = h.discrepancy;
        assert_eq!(*traj.times.last().unwrap(), 0.2);
    }
}

#[test]
fn step_failures_carry_position() {
    let mut problem = ProblemSpec::allen_cahn(GeometryCase::case1(1.0, 1.0, 10, 10), step_data(), 0.05);
    problem.beta = MonotoneGraph::OddPower { exponent: 7 };
    let mut config = SolverConfig::with_dt(1e-2);
    config.newton_max = 1;
    config.newton_tol = 1e-16;
    let err = solve_split(&problem, &config).unwrap_err();
    assert!(err.to_string().contains("step 1"));
}

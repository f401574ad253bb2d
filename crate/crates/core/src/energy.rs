//! Discrete convex energies of the transmission problem.
//!
//! ```text
//! φ_α(U) = ½ uᵀK₁u + (κ/2) vᵀK₂v + (α/2) Σ_{s∈S} (u_s − v_s)²
//! ```
//!
//! `φ_0` drops the interface term and `φ_∞` replaces it by the constraint
//! `u = v` on `S`.

use crate::error::{Error, Result};
use crate::grid::{CoupledField, DofLayout, DofMap, Side, TwoDomainMesh};
use crate::linalg::SymTridiag;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime {
    /// Robin coupling with permeability `α ≥ 0`.
    Finite(f64),
    /// Decoupled subdomains.
    Zero,
    /// Merged subdomains.
    Infinity,
}

impl Regime {
    pub fn layout(self) -> DofLayout {
        match self {
            Regime::Infinity => DofLayout::Merged,
            _ => DofLayout::Separate,
        }
    }

    /// Interface penalty, `None` when the regime has no penalty term.
    pub fn penalty(self) -> Option<f64> {
        match self {
            Regime::Finite(alpha) => Some(alpha),
            _ => None,
        }
    }

    /// `α` as an extended real: `0` for `Zero`, `∞` for `Infinity`.
    pub fn alpha(self) -> f64 {
        match self {
            Regime::Finite(alpha) => alpha,
            Regime::Zero => 0.0,
            Regime::Infinity => f64::INFINITY,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::Finite(_) => "finite",
            Regime::Zero => "zero",
            Regime::Infinity => "infinity",
        }
    }
}

/// Mass matrix used as the metric of a proximal step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MassWeight {
    #[default]
    Lumped,
    Consistent,
}

/// Membership tolerance for `D(φ_∞)`: `jump ≤ 1e-12 (1 + ‖U‖_∞)`.
pub fn merged_jump_tolerance(field: &CoupledField) -> f64 {
    1e-12 * (1.0 + field.max_abs())
}

#[derive(Debug, Clone, Copy)]
pub struct EnergySpec<'a> {
    pub mesh: &'a TwoDomainMesh,
    pub kappa: f64,
    pub regime: Regime,
}

impl<'a> EnergySpec<'a> {
    pub fn new(mesh: &'a TwoDomainMesh, kappa: f64, regime: Regime) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::config("physics.kappa", format!("must be positive, got {kappa}")));
        }
        if let Regime::Finite(alpha) = regime {
            if !(alpha >= 0.0 && alpha.is_finite()) {
                return Err(Error::config("alpha", format!("must be finite and >= 0, got {alpha}")));
            }
        }
        Ok(Self { mesh, kappa, regime })
    }

    /// Bulk Dirichlet energy `½uᵀK₁u + (κ/2)vᵀK₂v`.
    pub fn bulk(&self, field: &CoupledField) -> f64 {
        0.5 * self.mesh.stiffness(Side::One).quad_form(&field.u)
            + 0.5 * self.kappa * self.mesh.stiffness(Side::Two).quad_form(&field.v)
    }

    /// Energy value; `f64::INFINITY` outside `D(φ_∞)` in the merged regime.
    pub fn energy(&self, field: &CoupledField) -> f64 {
        let bulk = self.bulk(field);
        match self.regime {
            Regime::Finite(alpha) => bulk + 0.5 * alpha * self.mesh.interface_jump_norm(field).powi(2),
            Regime::Zero => bulk,
            Regime::Infinity => {
                if self.mesh.interface_jump_norm(field) <= merged_jump_tolerance(field) {
                    bulk
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Euclidean gradient `(K₁u + αE_S(u − v), κK₂v − αE_S(u − v))`.
    pub fn gradient(&self, field: &CoupledField) -> Result<CoupledField> {
        let alpha = match self.regime {
            Regime::Finite(alpha) => alpha,
            Regime::Zero => 0.0,
            Regime::Infinity => return Err(Error::UnsupportedRegime("infinity")),
        };
        let mut grad = CoupledField::new(
            self.mesh.stiffness(Side::One).mul_vec(&field.u),
            self.mesh.stiffness(Side::Two).mul_vec(&field.v),
        );
        grad.v.iter_mut().for_each(|g| *g *= self.kappa);
        if alpha != 0.0 {
            for p in self.mesh.interface() {
                let flux = alpha * (field.u[p.u] - field.v[p.v]);
                grad.u[p.u] += flux;
                grad.v[p.v] -= flux;
            }
        }
        Ok(grad)
    }

    pub fn dofs(&self) -> DofMap {
        self.mesh.dofs(self.regime.layout())
    }

    /// The energy's quadratic form on the unknowns of `dofs`.
    pub fn operator(&self, dofs: &DofMap) -> SymTridiag {
        assemble_operator(self.mesh, self.kappa, self.regime.penalty(), dofs)
    }

    /// `argmin_U ½‖U − W‖²_M + τ φ(U)` with `M` the chosen mass matrix.
    pub fn prox(&self, tau: f64, w: &CoupledField, weight: MassWeight) -> Result<CoupledField> {
        if !(tau > 0.0) {
            return Err(Error::Precondition(format!("prox step must be positive, got {tau}")));
        }
        let dofs = self.dofs();
        let mut system = self.operator(&dofs).scaled(tau);
        let rhs = match weight {
            MassWeight::Lumped => {
                system.add_diag(&dofs.lumped_mass(self.mesh));
                dofs.scatter_vector(&CoupledField::new(
                    lumped_apply(self.mesh.lumped_mass(Side::One), &w.u),
                    lumped_apply(self.mesh.lumped_mass(Side::Two), &w.v),
                ))
            }
            MassWeight::Consistent => {
                for side in [Side::One, Side::Two] {
                    dofs.scatter_matrix(side, self.mesh.mass(side), 1.0, &mut system);
                }
                dofs.scatter_vector(&CoupledField::new(
                    self.mesh.mass(Side::One).mul_vec(&w.u),
                    self.mesh.mass(Side::Two).mul_vec(&w.v),
                ))
            }
        };
        let z = system.solve_refined(&rhs)?;
        Ok(dofs.extend(&z))
    }
}

fn lumped_apply(mass: &[f64], w: &[f64]) -> Vec<f64> {
    mass.iter().zip(w).map(|(m, x)| m * x).collect()
}

/// `K₁ ⊕ κK₂` on the given unknowns, plus the Robin penalty `α` between
/// interface pairs when `penalty` is set.
pub fn assemble_operator(mesh: &TwoDomainMesh, kappa: f64, penalty: Option<f64>, dofs: &DofMap) -> SymTridiag {
    let mut a = SymTridiag::zeros(dofs.len());
    dofs.scatter_matrix(Side::One, mesh.stiffness(Side::One), 1.0, &mut a);
    dofs.scatter_matrix(Side::Two, mesh.stiffness(Side::Two), kappa, &mut a);
    if let Some(alpha) = penalty {
        if alpha != 0.0 {
            for p in mesh.interface() {
                let (i, j) = (dofs.dof(Side::One, p.u), dofs.dof(Side::Two, p.v));
                a.add(i, i, alpha);
                a.add(j, j, alpha);
                a.add(i, j, -alpha);
            }
        }
    }
    a
}

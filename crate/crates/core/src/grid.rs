//! Piecewise-linear finite elements on the two one-dimensional subdomains.
//!
//! Case 1 places `Ω₁ = (−ℓ₁, 0)` next to `Ω₂ = (0, ℓ₂)` with `S = {0}`.
//! Case 2 encloses `Ω₁ = (−a, a)` in `Ω₂ = (−b, −a) ∪ (a, b)` with
//! `S = {−a, a}`. Interface points are carried twice, once in each
//! subdomain's node list.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, SymTridiag};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometryCase {
    Case1 {
        l1: f64,
        l2: f64,
        n1: usize,
        n2: usize,
    },
    /// `n2` elements on each of the two pieces of `Ω₂`.
    Case2 {
        a: f64,
        b: f64,
        n1: usize,
        n2: usize,
    },
}

impl GeometryCase {
    pub fn case1(l1: f64, l2: f64, n1: usize, n2: usize) -> Self {
        GeometryCase::Case1 { l1, l2, n1, n2 }
    }

    pub fn case2(a: f64, b: f64, n1: usize, n2: usize) -> Self {
        GeometryCase::Case2 { a, b, n1, n2 }
    }

    pub fn validate(&self) -> Result<()> {
        let (n1, n2) = match *self {
            GeometryCase::Case1 { l1, l2, n1, n2 } => {
                if !(l1 > 0.0 && l1.is_finite()) {
                    return Err(Error::config("geometry.l1", "must be positive"));
                }
                if !(l2 > 0.0 && l2.is_finite()) {
                    return Err(Error::config("geometry.l2", "must be positive"));
                }
                (n1, n2)
            }
            GeometryCase::Case2 { a, b, n1, n2 } => {
                if !(a > 0.0 && a.is_finite()) {
                    return Err(Error::config("geometry.a", "must be positive"));
                }
                if !(b > a && b.is_finite()) {
                    return Err(Error::config("geometry.b", "must exceed geometry.a"));
                }
                (n1, n2)
            }
        };
        if n1 < 2 {
            return Err(Error::config("geometry.n1", "need at least 2 elements"));
        }
        if n2 < 2 {
            return Err(Error::config("geometry.n2", "need at least 2 elements"));
        }
        Ok(())
    }

    /// Extent `[x_min, x_max]` of `Ω̄ = Ω̄₁ ∪ Ω̄₂`.
    pub fn extent(&self) -> (f64, f64) {
        match *self {
            GeometryCase::Case1 { l1, l2, .. } => (-l1, l2),
            GeometryCase::Case2 { b, .. } => (-b, b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    One,
    Two,
}

impl Side {
    pub fn id(self) -> u8 {
        match self {
            Side::One => 1,
            Side::Two => 2,
        }
    }
}

/// Matched nodes at one interface point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfacePair {
    pub u: usize,
    pub v: usize,
    pub x: f64,
}

/// The state `U = (u, v)` as nodal vectors on the two subdomain meshes.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledField {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl CoupledField {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Self {
        Self { u, v }
    }

    pub fn zeros(mesh: &TwoDomainMesh) -> Self {
        Self::constant(mesh, 0.0, 0.0)
    }

    pub fn constant(mesh: &TwoDomainMesh, u: f64, v: f64) -> Self {
        Self {
            u: vec![u; mesh.len(Side::One)],
            v: vec![v; mesh.len(Side::Two)],
        }
    }

    pub fn part(&self, side: Side) -> &[f64] {
        match side {
            Side::One => &self.u,
            Side::Two => &self.v,
        }
    }

    pub fn part_mut(&mut self, side: Side) -> &mut Vec<f64> {
        match side {
            Side::One => &mut self.u,
            Side::Two => &mut self.v,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.u.iter().chain(&self.v).all(|x| x.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.u.iter().chain(&self.v).fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            u: self.u.iter().map(|&x| f(x)).collect(),
            v: self.v.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(self.u.len(), other.u.len());
        assert_eq!(self.v.len(), other.v.len());
        Self {
            u: self.u.iter().zip(&other.u).map(|(&a, &b)| f(a, b)).collect(),
            v: self.v.iter().zip(&other.v).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add_scaled(&self, other: &Self, scale: f64) -> Self {
        self.zip_with(other, |a, b| a + scale * b)
    }
}

/// Uniform P1 meshes on both subdomains with assembled matrices.
///
/// Stiffness matrices are stored without the diffusion weight `κ`; callers
/// apply it at use time.
#[derive(Debug, Clone)]
pub struct TwoDomainMesh {
    geometry: GeometryCase,
    x1: Vec<f64>,
    x2: Vec<f64>,
    h1: f64,
    h2: f64,
    stiffness1: SymTridiag,
    stiffness2: SymTridiag,
    mass1: SymTridiag,
    mass2: SymTridiag,
    lumped1: Vec<f64>,
    lumped2: Vec<f64>,
    interface: Vec<InterfacePair>,
    /// Position of each node in the coordinate-sorted chain of all nodes.
    chain1: Vec<usize>,
    chain2: Vec<usize>,
}

impl TwoDomainMesh {
    pub fn build(geometry: GeometryCase) -> Result<Self> {
        geometry.validate()?;
        match geometry {
            GeometryCase::Case1 { l1, l2, n1, n2 } => {
                let x1 = uniform(-l1, 0.0, n1);
                let x2 = uniform(0.0, l2, n2);
                let (stiffness1, mass1, lumped1) = assemble_pieces(&[&x1]);
                let (stiffness2, mass2, lumped2) = assemble_pieces(&[&x2]);
                let chain1 = (0..=n1).collect();
                let chain2 = (0..=n2).map(|j| n1 + 1 + j).collect();
                Ok(Self {
                    geometry,
                    h1: l1 / n1 as f64,
                    h2: l2 / n2 as f64,
                    interface: vec![InterfacePair { u: n1, v: 0, x: 0.0 }],
                    x1,
                    x2,
                    stiffness1,
                    stiffness2,
                    mass1,
                    mass2,
                    lumped1,
                    lumped2,
                    chain1,
                    chain2,
                })
            }
            GeometryCase::Case2 { a, b, n1, n2 } => {
                let x1 = uniform(-a, a, n1);
                let left = uniform(-b, -a, n2);
                let right = uniform(a, b, n2);
                let (stiffness1, mass1, lumped1) = assemble_pieces(&[&x1]);
                let (stiffness2, mass2, lumped2) = assemble_pieces(&[&left, &right]);
                let x2: Vec<f64> = left.iter().chain(&right).copied().collect();
                // chain: left piece, Ω₁, right piece
                let chain2 = (0..=n2).chain((0..=n2).map(|k| n2 + 1 + n1 + 1 + k)).collect();
                let chain1 = (0..=n1).map(|i| n2 + 1 + i).collect();
                Ok(Self {
                    geometry,
                    h1: 2.0 * a / n1 as f64,
                    h2: (b - a) / n2 as f64,
                    interface: vec![
                        InterfacePair { u: 0, v: n2, x: -a },
                        InterfacePair { u: n1, v: n2 + 1, x: a },
                    ],
                    x1,
                    x2,
                    stiffness1,
                    stiffness2,
                    mass1,
                    mass2,
                    lumped1,
                    lumped2,
                    chain1,
                    chain2,
                })
            }
        }
    }

    pub fn geometry(&self) -> &GeometryCase {
        &self.geometry
    }

    pub fn len(&self, side: Side) -> usize {
        self.coords(side).len()
    }

    pub fn coords(&self, side: Side) -> &[f64] {
        match side {
            Side::One => &self.x1,
            Side::Two => &self.x2,
        }
    }

    pub fn element_size(&self, side: Side) -> f64 {
        match side {
            Side::One => self.h1,
            Side::Two => self.h2,
        }
    }

    pub fn stiffness(&self, side: Side) -> &SymTridiag {
        match side {
            Side::One => &self.stiffness1,
            Side::Two => &self.stiffness2,
        }
    }

    pub fn mass(&self, side: Side) -> &SymTridiag {
        match side {
            Side::One => &self.mass1,
            Side::Two => &self.mass2,
        }
    }

    pub fn lumped_mass(&self, side: Side) -> &[f64] {
        match side {
            Side::One => &self.lumped1,
            Side::Two => &self.lumped2,
        }
    }

    pub fn interface(&self) -> &[InterfacePair] {
        &self.interface
    }

    pub fn is_interface_node(&self, side: Side, index: usize) -> bool {
        self.interface.iter().any(|p| match side {
            Side::One => p.u == index,
            Side::Two => p.v == index,
        })
    }

    /// `|Ω_i|`.
    pub fn measure(&self, side: Side) -> f64 {
        self.lumped_mass(side).iter().sum()
    }

    pub fn l2_norm(&self, side: Side, w: &[f64]) -> f64 {
        self.mass(side).quad_form(w).max(0.0).sqrt()
    }

    pub fn h1_seminorm(&self, side: Side, w: &[f64]) -> f64 {
        self.stiffness(side).quad_form(w).max(0.0).sqrt()
    }

    /// Full `H¹` norm `(‖w‖² + |w|²_{H¹})^{1/2}`.
    pub fn h1_norm(&self, side: Side, w: &[f64]) -> f64 {
        (self.mass(side).quad_form(w) + self.stiffness(side).quad_form(w))
            .max(0.0)
            .sqrt()
    }

    /// `L²` norm with the lumped mass `(Σ m̂_k w_k²)^{1/2}`.
    pub fn lumped_norm(&self, side: Side, w: &[f64]) -> f64 {
        self.lumped_mass(side)
            .iter()
            .zip(w)
            .map(|(m, x)| m * x * x)
            .sum::<f64>()
            .sqrt()
    }

    /// The 𝓗 norm of a coupled field using lumped masses.
    pub fn field_norm(&self, field: &CoupledField) -> f64 {
        (self.lumped_norm(Side::One, &field.u).powi(2) + self.lumped_norm(Side::Two, &field.v).powi(2)).sqrt()
    }

    /// Consistent-mass 𝓗 norm.
    pub fn field_l2_norm(&self, field: &CoupledField) -> f64 {
        (self.l2_norm(Side::One, &field.u).powi(2) + self.l2_norm(Side::Two, &field.v).powi(2)).sqrt()
    }

    /// Counting-measure norm `(Σ_{s∈S} (u_s − v_s)²)^{1/2}`.
    pub fn interface_jump_norm(&self, field: &CoupledField) -> f64 {
        self.interface
            .iter()
            .map(|p| (field.u[p.u] - field.v[p.v]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// `1ᵀM̂₁u + 1ᵀM̂₂v`.
    pub fn total_mass(&self, field: &CoupledField) -> f64 {
        dot(&self.lumped1, &field.u) + dot(&self.lumped2, &field.v)
    }

    /// Discrete norm of `w` in the dual of `V_{i,0} = {y ∈ H¹(Ω_i) : y = 0 on S}`:
    /// `sup { wᵀM y : y_S = 0, yᵀ(K + M)y ≤ 1 }`.
    pub fn dual_norm_v0(&self, side: Side, w: &[f64]) -> Result<f64> {
        let keep: Vec<usize> = (0..self.len(side))
            .filter(|&k| !self.is_interface_node(side, k))
            .collect();
        let full = sum(self.stiffness(side), self.mass(side));
        let restricted = full.restrict(&keep);
        let mw = self.mass(side).mul_vec(w);
        let rhs: Vec<f64> = keep.iter().map(|&k| mw[k]).collect();
        let y = restricted.solve_refined(&rhs)?;
        Ok(dot(&rhs, &y).max(0.0).sqrt())
    }

    /// Nodal interpolant of `f` on both subdomains.
    pub fn interpolate(&self, f1: impl Fn(f64) -> f64, f2: impl Fn(f64) -> f64) -> CoupledField {
        CoupledField {
            u: self.x1.iter().map(|&x| f1(x)).collect(),
            v: self.x2.iter().map(|&x| f2(x)).collect(),
        }
    }

    pub fn dofs(&self, layout: DofLayout) -> DofMap {
        DofMap::new(self, layout)
    }
}

fn sum(a: &SymTridiag, b: &SymTridiag) -> SymTridiag {
    let diag = a.diag().iter().zip(b.diag()).map(|(x, y)| x + y).collect();
    let off = a.off().iter().zip(b.off()).map(|(x, y)| x + y).collect();
    SymTridiag::from_parts(diag, off)
}

fn uniform(start: f64, end: f64, n: usize) -> Vec<f64> {
    let h = (end - start) / n as f64;
    let mut x: Vec<f64> = (0..=n).map(|i| start + i as f64 * h).collect();
    x[n] = end;
    x
}

/// Stiffness, consistent mass and lumped mass over one or more disjoint
/// pieces, concatenated in node order. No coupling between pieces.
fn assemble_pieces(pieces: &[&Vec<f64>]) -> (SymTridiag, SymTridiag, Vec<f64>) {
    let n: usize = pieces.iter().map(|p| p.len()).sum();
    let mut stiffness = SymTridiag::zeros(n);
    let mut mass = SymTridiag::zeros(n);
    let mut lumped = vec![0.0; n];
    let mut offset = 0;
    for piece in pieces {
        // one element size per piece keeps row sums of the stiffness exactly zero
        let h = (piece[piece.len() - 1] - piece[0]) / (piece.len() - 1) as f64;
        for e in 0..piece.len() - 1 {
            let (i, j) = (offset + e, offset + e + 1);
            stiffness.add(i, i, 1.0 / h);
            stiffness.add(j, j, 1.0 / h);
            stiffness.add(i, j, -1.0 / h);
            mass.add(i, i, h / 3.0);
            mass.add(j, j, h / 3.0);
            mass.add(i, j, h / 6.0);
            lumped[i] += 0.5 * h;
            lumped[j] += 0.5 * h;
        }
        offset += piece.len();
    }
    (stiffness, mass, lumped)
}

/// How interface node pairs are mapped to unknowns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DofLayout {
    /// Each subdomain node is its own unknown.
    Separate,
    /// Interface pairs share one unknown (value continuity).
    Merged,
}

/// Mapping of subdomain nodes to unknowns, ordered by coordinate so that every
/// assembled operator stays tridiagonal.
#[derive(Debug, Clone)]
pub struct DofMap {
    layout: DofLayout,
    n: usize,
    dof1: Vec<usize>,
    dof2: Vec<usize>,
}

impl DofMap {
    fn new(mesh: &TwoDomainMesh, layout: DofLayout) -> Self {
        let total = mesh.chain1.len() + mesh.chain2.len();
        let mut order: Vec<(Side, usize)> = vec![(Side::One, 0); total];
        for (k, &p) in mesh.chain1.iter().enumerate() {
            order[p] = (Side::One, k);
        }
        for (k, &p) in mesh.chain2.iter().enumerate() {
            order[p] = (Side::Two, k);
        }
        let mut dof1 = vec![usize::MAX; mesh.chain1.len()];
        let mut dof2 = vec![usize::MAX; mesh.chain2.len()];
        let mut n = 0;
        for (side, k) in order {
            let partner = match (layout, side) {
                (DofLayout::Separate, _) => None,
                (DofLayout::Merged, Side::One) => mesh
                    .interface
                    .iter()
                    .find(|p| p.u == k)
                    .map(|p| dof2[p.v])
                    .filter(|&d| d != usize::MAX),
                (DofLayout::Merged, Side::Two) => mesh
                    .interface
                    .iter()
                    .find(|p| p.v == k)
                    .map(|p| dof1[p.u])
                    .filter(|&d| d != usize::MAX),
            };
            let dof = partner.unwrap_or_else(|| {
                n += 1;
                n - 1
            });
            match side {
                Side::One => dof1[k] = dof,
                Side::Two => dof2[k] = dof,
            }
        }
        Self { layout, n, dof1, dof2 }
    }

    pub fn layout(&self) -> DofLayout {
        self.layout
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dof(&self, side: Side, node: usize) -> usize {
        match side {
            Side::One => self.dof1[node],
            Side::Two => self.dof2[node],
        }
    }

    pub fn side_dofs(&self, side: Side) -> &[usize] {
        match side {
            Side::One => &self.dof1,
            Side::Two => &self.dof2,
        }
    }

    /// Adds a per-side symmetric tridiagonal operator into `target`.
    pub fn scatter_matrix(&self, side: Side, local: &SymTridiag, scale: f64, target: &mut SymTridiag) {
        let dofs = self.side_dofs(side);
        for (k, d) in local.diag().iter().enumerate() {
            target.add(dofs[k], dofs[k], scale * d);
        }
        for (k, o) in local.off().iter().enumerate() {
            if *o != 0.0 {
                target.add(dofs[k], dofs[k + 1], scale * o);
            }
        }
    }

    /// Sums per-side nodal co-vectors into unknowns.
    pub fn scatter_vector(&self, field: &CoupledField) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for side in [Side::One, Side::Two] {
            for (k, x) in field.part(side).iter().enumerate() {
                out[self.dof(side, k)] += x;
            }
        }
        out
    }

    /// Lumped mass per unknown.
    pub fn lumped_mass(&self, mesh: &TwoDomainMesh) -> Vec<f64> {
        self.scatter_vector(&CoupledField::new(
            mesh.lumped_mass(Side::One).to_vec(),
            mesh.lumped_mass(Side::Two).to_vec(),
        ))
    }

    /// Nodal values to unknowns. Merged unknowns take the lumped-mass-weighted
    /// average of their nodes, which is the 𝓗-orthogonal projection.
    pub fn restrict(&self, mesh: &TwoDomainMesh, field: &CoupledField) -> Vec<f64> {
        let weighted = CoupledField::new(
            field
                .u
                .iter()
                .zip(mesh.lumped_mass(Side::One))
                .map(|(x, m)| x * m)
                .collect(),
            field
                .v
                .iter()
                .zip(mesh.lumped_mass(Side::Two))
                .map(|(x, m)| x * m)
                .collect(),
        );
        let num = self.scatter_vector(&weighted);
        let den = self.lumped_mass(mesh);
        num.iter().zip(&den).map(|(a, b)| a / b).collect()
    }

    /// Unknowns to nodal values.
    pub fn extend(&self, z: &[f64]) -> CoupledField {
        CoupledField {
            u: self.dof1.iter().map(|&d| z[d]).collect(),
            v: self.dof2.iter().map(|&d| z[d]).collect(),
        }
    }
}

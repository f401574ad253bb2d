//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the crate's assembly or solvers: matrices are built
//! densely from node coordinates and systems are solved by Gaussian elimination.

#![allow(dead_code)]

/// Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let pivot_row = a[col].clone();
        for row in col + 1..n {
            let factor = a[row][col] / pivot_row[col];
            if factor != 0.0 {
                for (x, p) in a[row][col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= factor * p;
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    x
}

/// `J_λ(r)` of `β(s) = s³` by plain bisection.
pub fn cubic_resolvent(lambda: f64, r: f64) -> f64 {
    let (mut lo, mut hi) = (r.min(0.0), r.max(0.0));
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if mid + lambda * mid.powi(3) < r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn cubic_yosida(lambda: f64, r: f64) -> f64 {
    (r - cubic_resolvent(lambda, r)) / lambda
}

/// A 1D two-subdomain layout described only by node coordinates.
pub struct DenseLayout {
    /// Pieces of `Ω₁`, each a list of node coordinates.
    pub u_pieces: Vec<Vec<f64>>,
    pub v_pieces: Vec<Vec<f64>>,
    /// Interface pairs `(u index, v index)` in concatenated node numbering.
    pub pairs: Vec<(usize, usize)>,
}

fn nodes(n: usize, start: f64, end: f64) -> Vec<f64> {
    (0..=n).map(|i| start + (end - start) * i as f64 / n as f64).collect()
}

impl DenseLayout {
    pub fn case1(l1: f64, l2: f64, n1: usize, n2: usize) -> Self {
        Self {
            u_pieces: vec![nodes(n1, -l1, 0.0)],
            v_pieces: vec![nodes(n2, 0.0, l2)],
            pairs: vec![(n1, 0)],
        }
    }

    pub fn case2(a: f64, b: f64, n1: usize, n2: usize) -> Self {
        Self {
            u_pieces: vec![nodes(n1, -a, a)],
            v_pieces: vec![nodes(n2, -b, -a), nodes(n2, a, b)],
            pairs: vec![(0, n2), (n1, n2 + 1)],
        }
    }

    pub fn n_u(&self) -> usize {
        self.u_pieces.iter().map(Vec::len).sum()
    }

    pub fn n_v(&self) -> usize {
        self.v_pieces.iter().map(Vec::len).sum()
    }

    pub fn x_u(&self) -> Vec<f64> {
        self.u_pieces.concat()
    }

    pub fn x_v(&self) -> Vec<f64> {
        self.v_pieces.concat()
    }

    /// Dense stiffness and lumped mass of a list of pieces.
    fn side(pieces: &[Vec<f64>]) -> (Vec<Vec<f64>>, Vec<f64>) {
        let n: usize = pieces.iter().map(Vec::len).sum();
        let mut k = vec![vec![0.0; n]; n];
        let mut m = vec![0.0; n];
        let mut offset = 0;
        for piece in pieces {
            for e in 0..piece.len() - 1 {
                let h = piece[e + 1] - piece[e];
                let (i, j) = (offset + e, offset + e + 1);
                k[i][i] += 1.0 / h;
                k[j][j] += 1.0 / h;
                k[i][j] -= 1.0 / h;
                k[j][i] -= 1.0 / h;
                m[i] += h / 2.0;
                m[j] += h / 2.0;
            }
            offset += piece.len();
        }
        (k, m)
    }

    /// Full coupled operator on `[u; v]` and the lumped mass vector.
    pub fn operator(&self, kappa: f64, alpha: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
        let (k1, m1) = Self::side(&self.u_pieces);
        let (k2, m2) = Self::side(&self.v_pieces);
        let (nu, nv) = (m1.len(), m2.len());
        let n = nu + nv;
        let mut a = vec![vec![0.0; n]; n];
        for i in 0..nu {
            for j in 0..nu {
                a[i][j] = k1[i][j];
            }
        }
        for i in 0..nv {
            for j in 0..nv {
                a[nu + i][nu + j] = kappa * k2[i][j];
            }
        }
        for &(p, q) in &self.pairs {
            let (i, j) = (p, nu + q);
            a[i][i] += alpha;
            a[j][j] += alpha;
            a[i][j] -= alpha;
            a[j][i] -= alpha;
        }
        (a, [m1, m2].concat())
    }
}

/// Data of one implicit step for the dense reference.
pub struct DenseStep {
    pub kappa: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub dt: f64,
    /// `π(r) = reaction_slope · r` on both sides.
    pub reaction_slope: f64,
    pub g_u: f64,
    pub g_v: f64,
    pub cubic: bool,
}

/// Solves `m(z − z_old)/Δt + Az + mβ_λ(z) + mπ(z_old) − mg = 0` by Newton's
/// method with a finite-difference Jacobian and dense elimination.
pub fn dense_step(layout: &DenseLayout, data: &DenseStep, u_old: &[f64], v_old: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (a, m) = layout.operator(data.kappa, data.alpha);
    let nu = layout.n_u();
    let z_old: Vec<f64> = u_old.iter().chain(v_old).copied().collect();
    let n = z_old.len();
    let beta = |r: f64| if data.cubic { cubic_yosida(data.lambda, r) } else { 0.0 };
    let residual = |z: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|i| {
                let g = if i < nu { data.g_u } else { data.g_v };
                let az: f64 = (0..n).map(|j| a[i][j] * z[j]).sum();
                m[i] * (z[i] - z_old[i]) / data.dt + az + m[i] * beta(z[i]) + m[i] * data.reaction_slope * z_old[i]
                    - m[i] * g
            })
            .collect()
    };
    let mut z = z_old.clone();
    for _ in 0..100 {
        let f = residual(&z);
        if f.iter().all(|x| x.abs() < 1e-15) {
            break;
        }
        let mut jac = a.clone();
        for i in 0..n {
            let h = 1e-6 * (1.0 + z[i].abs());
            let db = (beta(z[i] + h) - beta(z[i] - h)) / (2.0 * h);
            jac[i][i] += m[i] / data.dt + m[i] * db;
        }
        let d = dense_solve(jac, f.iter().map(|x| -x).collect());
        let change = d.iter().fold(0.0_f64, |s, x| s.max(x.abs()));
        for (zi, di) in z.iter_mut().zip(&d) {
            *zi += di;
        }
        if change < 1e-15 {
            break;
        }
    }
    (z[..nu].to_vec(), z[nu..].to_vec())
}

/// Implicit Euler with lumped mass for the Neumann heat equation on a single
/// uniform mesh of `[x_min, x_max]` with `n` elements. Returns every state.
pub fn single_domain_heat(x_min: f64, x_max: f64, n: usize, w0: &[f64], dt: f64, steps: usize) -> Vec<Vec<f64>> {
    let layout = DenseLayout {
        u_pieces: vec![nodes(n, x_min, x_max)],
        v_pieces: vec![],
        pairs: vec![],
    };
    let (k, m) = layout.operator(1.0, 0.0);
    let mut system = k.clone();
    for i in 0..=n {
        system[i][i] += m[i] / dt;
    }
    let mut out = vec![w0.to_vec()];
    for _ in 0..steps {
        let last = out.last().unwrap();
        let rhs: Vec<f64> = (0..=n).map(|i| m[i] * last[i] / dt).collect();
        out.push(dense_solve(system.clone(), rhs));
    }
    out
}

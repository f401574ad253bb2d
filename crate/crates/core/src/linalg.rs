//! Symmetric tridiagonal matrices.
//!
//! Every system assembled by this crate is tridiagonal once the nodes of both
//! subdomains are ordered by coordinate (interface duplicates adjacent), so a
//! Thomas sweep is all the linear algebra the solvers need.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiag {
    diag: Vec<f64>,
    /// `off[i]` couples rows `i` and `i + 1`.
    off: Vec<f64>,
}

impl SymTridiag {
    pub fn zeros(n: usize) -> Self {
        Self {
            diag: vec![0.0; n],
            off: vec![0.0; n.saturating_sub(1)],
        }
    }

    pub fn from_parts(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1), "off-diagonal length mismatch");
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        match i.abs_diff(j) {
            0 => self.diag[i],
            1 => self.off[i.min(j)],
            _ => 0.0,
        }
    }

    /// Adds `value` to entries `(i, j)` and `(j, i)`.
    ///
    /// Panics if the pair lies outside the tridiagonal band.
    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        match i.abs_diff(j) {
            0 => self.diag[i] += value,
            1 => self.off[i.min(j)] += value,
            d => panic!("entry ({i}, {j}) is {d} off the diagonal"),
        }
    }

    pub fn add_diag(&mut self, shift: &[f64]) {
        for (d, s) in self.diag.iter_mut().zip(shift) {
            *d += s;
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            diag: self.diag.iter().map(|d| d * factor).collect(),
            off: self.off.iter().map(|o| o * factor).collect(),
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(x.len(), n);
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, xi)| d * xi).collect();
        for (i, o) in self.off.iter().enumerate() {
            y[i] += o * x[i + 1];
            y[i + 1] += o * x[i];
        }
        y
    }

    /// Row-wise `Σ_j |a_ij x_j|`, used to scale residuals.
    pub fn abs_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.diag.iter().zip(x).map(|(d, xi)| (d * xi).abs()).collect();
        for (i, o) in self.off.iter().enumerate() {
            y[i] += (o * x[i + 1]).abs();
            y[i + 1] += (o * x[i]).abs();
        }
        y
    }

    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.mul_vec(x))
    }

    /// Thomas algorithm. Requires nonzero pivots, which holds for every
    /// symmetric positive definite matrix.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        assert_eq!(rhs.len(), n);
        if n == 0 {
            return Ok(Vec::new());
        }
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];
        let mut pivot = self.diag[0];
        check_pivot(pivot, 0)?;
        x[0] = rhs[0] / pivot;
        for i in 1..n {
            c[i - 1] = self.off[i - 1] / pivot;
            pivot = self.diag[i] - self.off[i - 1] * c[i - 1];
            check_pivot(pivot, i)?;
            x[i] = (rhs[i] - self.off[i - 1] * x[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        Ok(x)
    }

    /// Solve followed by one step of iterative refinement.
    pub fn solve_refined(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let mut x = self.solve(rhs)?;
        let ax = self.mul_vec(&x);
        let r: Vec<f64> = rhs.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let dx = self.solve(&r)?;
        for (xi, d) in x.iter_mut().zip(dx) {
            *xi += d;
        }
        Ok(x)
    }

    /// Submatrix on the (sorted) index set `keep`. Off-diagonal entries are
    /// retained only between indices that are consecutive in both orderings.
    pub fn restrict(&self, keep: &[usize]) -> Self {
        let diag = keep.iter().map(|&i| self.diag[i]).collect();
        let off = keep
            .windows(2)
            .map(|w| if w[1] == w[0] + 1 { self.off[w[0]] } else { 0.0 })
            .collect();
        Self { diag, off }
    }
}

fn check_pivot(pivot: f64, row: usize) -> Result<()> {
    if pivot.is_finite() && pivot.abs() > f64::MIN_POSITIVE {
        Ok(())
    } else {
        Err(Error::NumericalFailure {
            operation: if row == 0 {
                "tridiagonal solve (row 0)"
            } else {
                "tridiagonal solve"
            },
            residual: pivot.abs(),
        })
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_like(n: usize) -> SymTridiag {
        let mut m = SymTridiag::zeros(n);
        for i in 0..n {
            m.add(i, i, 2.5);
            if i + 1 < n {
                m.add(i, i + 1, -1.0);
            }
        }
        m
    }

    #[test]
    fn solve_inverts_mul() {
        let m = laplacian_like(9);
        let x: Vec<f64> = (0..9).map(|i| (i as f64).sin() + 0.3).collect();
        let b = m.mul_vec(&x);
        let y = m.solve_refined(&b).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn singular_pivot_is_reported() {
        let m = SymTridiag::from_parts(vec![0.0, 1.0], vec![1.0]);
        assert!(matches!(m.solve(&[1.0, 1.0]), Err(Error::NumericalFailure { .. })));
    }

    #[test]
    fn restrict_drops_broken_couplings() {
        let m = laplacian_like(5);
        let r = m.restrict(&[0, 1, 3, 4]);
        assert_eq!(r.off(), &[-1.0, 0.0, -1.0]);
        assert_eq!(r.diag(), &[2.5; 4]);
    }

    #[test]
    #[should_panic]
    fn add_outside_band_panics() {
        laplacian_like(4).add(0, 2, 1.0);
    }
}

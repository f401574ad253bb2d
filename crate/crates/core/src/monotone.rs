//! Maximal monotone graphs `β = ∂j` on the real line.
//!
//! Graphs are only ever touched through their resolvents `J_λ = (I + λβ)⁻¹`,
//! the Yosida approximations `β_λ = (I − J_λ)/λ` and the Moreau envelopes
//! `j_λ`. Multivalued graphs (`AbsSubdiff`, `IndicatorInterval`) therefore need
//! no set-valued representation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SCALAR_TOL: f64 = 1e-14;
const SCALAR_MAX_ITER: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MonotoneGraph {
    #[default]
    Zero,
    /// `β(r) = slope·r`.
    Linear { slope: f64 },
    /// `β(r) = r³`, `j(r) = r⁴/4`.
    Cubic,
    /// `β = ∂|·|`, multivalued (`[-1, 1]`) at the origin.
    AbsSubdiff,
    /// Subdifferential of the indicator of `[lower, upper]`.
    IndicatorInterval { lower: f64, upper: f64 },
    /// `β(r) = r^p` for odd `p ≥ 3`.
    OddPower { exponent: u32 },
}

impl MonotoneGraph {
    pub fn linear(slope: f64) -> Result<Self> {
        let g = MonotoneGraph::Linear { slope };
        g.validate()?;
        Ok(g)
    }

    pub fn indicator(lower: f64, upper: f64) -> Result<Self> {
        let g = MonotoneGraph::IndicatorInterval { lower, upper };
        g.validate()?;
        Ok(g)
    }

    pub fn odd_power(exponent: u32) -> Result<Self> {
        let g = MonotoneGraph::OddPower { exponent };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            MonotoneGraph::Linear { slope } if !(slope >= 0.0 && slope.is_finite()) => Err(Error::config(
                "beta.slope",
                format!("slope must be finite and >= 0, got {slope}"),
            )),
            MonotoneGraph::IndicatorInterval { lower, upper }
                if !(lower <= 0.0 && 0.0 <= upper && lower.is_finite() && upper.is_finite()) =>
            {
                Err(Error::config(
                    "beta.lower",
                    format!("interval [{lower}, {upper}] must be finite and contain 0"),
                ))
            }
            MonotoneGraph::OddPower { exponent } if exponent < 3 || exponent % 2 == 0 => Err(Error::config(
                "beta.exponent",
                format!("exponent must be odd and >= 3, got {exponent}"),
            )),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MonotoneGraph::Zero => "zero",
            MonotoneGraph::Linear { .. } => "linear",
            MonotoneGraph::Cubic => "cubic",
            MonotoneGraph::AbsSubdiff => "abs_subdiff",
            MonotoneGraph::IndicatorInterval { .. } => "indicator_interval",
            MonotoneGraph::OddPower { .. } => "odd_power",
        }
    }

    /// The convex primitive `j`, with `f64::INFINITY` outside the effective domain.
    pub fn primitive(&self, r: f64) -> f64 {
        match *self {
            MonotoneGraph::Zero => 0.0,
            MonotoneGraph::Linear { slope } => 0.5 * slope * r * r,
            MonotoneGraph::Cubic => 0.25 * r.powi(4),
            MonotoneGraph::AbsSubdiff => r.abs(),
            MonotoneGraph::IndicatorInterval { lower, upper } => {
                if (lower..=upper).contains(&r) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            MonotoneGraph::OddPower { exponent } => r.powi(exponent as i32 + 1) / f64::from(exponent + 1),
        }
    }

    /// `J_λ(r)`: the unique `s` with `s + λβ(s) ∋ r`.
    pub fn resolvent(&self, lambda: f64, r: f64) -> Result<f64> {
        debug_assert!(lambda > 0.0);
        Ok(match *self {
            MonotoneGraph::Zero => r,
            MonotoneGraph::Linear { slope } => r / (1.0 + lambda * slope),
            MonotoneGraph::Cubic => power_resolvent(3, lambda, r)?,
            MonotoneGraph::OddPower { exponent } => power_resolvent(exponent as i32, lambda, r)?,
            MonotoneGraph::AbsSubdiff => {
                if r > lambda {
                    r - lambda
                } else if r < -lambda {
                    r + lambda
                } else {
                    0.0
                }
            }
            MonotoneGraph::IndicatorInterval { lower, upper } => r.clamp(lower, upper),
        })
    }

    /// `β_λ(r) = (r − J_λ(r))/λ`.
    pub fn yosida(&self, lambda: f64, r: f64) -> Result<f64> {
        Ok((r - self.resolvent(lambda, r)?) / lambda)
    }

    /// `β_λ(r)` together with a (generalized) derivative `β_λ'(r) ∈ [0, 1/λ]`,
    /// as consumed by the Newton solves.
    pub fn yosida_with_slope(&self, lambda: f64, r: f64) -> Result<(f64, f64)> {
        let s = self.resolvent(lambda, r)?;
        let value = (r - s) / lambda;
        let slope = match *self {
            MonotoneGraph::Zero => 0.0,
            MonotoneGraph::Linear { slope } => slope / (1.0 + lambda * slope),
            MonotoneGraph::Cubic => smooth_slope(3.0 * s * s, lambda),
            MonotoneGraph::OddPower { exponent } => {
                let p = exponent as i32;
                smooth_slope(f64::from(exponent) * s.powi(p - 1), lambda)
            }
            MonotoneGraph::AbsSubdiff => {
                if r.abs() < lambda {
                    1.0 / lambda
                } else {
                    0.0
                }
            }
            MonotoneGraph::IndicatorInterval { lower, upper } => {
                if r > lower && r < upper {
                    0.0
                } else {
                    1.0 / lambda
                }
            }
        };
        Ok((value, slope))
    }

    /// Moreau envelope `j_λ(r) = |r − J_λ(r)|²/(2λ) + j(J_λ(r))`.
    pub fn moreau(&self, lambda: f64, r: f64) -> Result<f64> {
        let s = self.resolvent(lambda, r)?;
        Ok((r - s).powi(2) / (2.0 * lambda) + self.primitive(s))
    }
}

/// `β_λ' = β'(s)/(1 + λβ'(s))` at `s = J_λ(r)` for differentiable `β`.
fn smooth_slope(beta_prime: f64, lambda: f64) -> f64 {
    beta_prime / (1.0 + lambda * beta_prime)
}

/// Solves `s + λ s^p = r` by Newton's method safeguarded with bisection on the
/// bracket `[min(0, r), max(0, r)]`.
fn power_resolvent(p: i32, lambda: f64, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(0.0);
    }
    let f = |s: f64| s + lambda * s.powi(p) - r;
    let (mut lo, mut hi) = if r > 0.0 { (0.0, r) } else { (r, 0.0) };
    // |s| ≤ min(|r|, (|r|/λ)^{1/p}) since both terms share the sign of r.
    let mut s = r.signum() * r.abs().min((r.abs() / lambda).powf(1.0 / f64::from(p)));
    let mut residual = f(s);
    for _ in 0..SCALAR_MAX_ITER {
        if residual.abs() <= SCALAR_TOL {
            return Ok(s);
        }
        if residual > 0.0 {
            hi = s;
        } else {
            lo = s;
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()) {
            return Ok(s);
        }
        let df = 1.0 + lambda * f64::from(p) * s.powi(p - 1);
        let mut next = s - residual / df;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if next == s {
            return Ok(s);
        }
        s = next;
        residual = f(s);
    }
    if residual.abs() <= SCALAR_TOL {
        Ok(s)
    } else {
        Err(Error::NumericalFailure {
            operation: "scalar resolvent",
            residual: residual.abs(),
        })
    }
}

//! Symmetric C² interaction kernels and the norm bounds used by the step-size
//! restriction and the error estimates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point;

/// Radial samples used for the Hessian-norm scan.
const HESSIAN_SCAN: usize = 20_000;
const HESSIAN_SAFETY: f64 = 1.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Potential {
    /// `W(x) = |x|²`.
    Quadratic,
    /// `W(x) = sign / (1 + scale |x|²)`; `sign = +1` is repulsive.
    InverseQuadratic { sign: f64, scale: f64 },
}

impl Potential {
    pub fn inverse_quadratic(sign: f64, scale: f64) -> Result<Self> {
        let p = Potential::InverseQuadratic { sign, scale };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Potential::Quadratic => Ok(()),
            Potential::InverseQuadratic { sign, scale } => {
                if sign != 1.0 && sign != -1.0 {
                    return Err(Error::InvalidPotential(format!("sign must be +1 or -1, got {sign}")));
                }
                if !(scale > 0.0 && scale.is_finite()) {
                    return Err(Error::InvalidPotential(format!("scale must be positive, got {scale}")));
                }
                Ok(())
            }
        }
    }

    #[inline]
    pub fn eval(&self, x: &Point) -> f64 {
        match *self {
            Potential::Quadratic => x.norm_sq(),
            Potential::InverseQuadratic { sign, scale } => sign / (1.0 + scale * x.norm_sq()),
        }
    }

    #[inline]
    pub fn grad(&self, x: &Point) -> Point {
        match *self {
            Potential::Quadratic => *x * 2.0,
            Potential::InverseQuadratic { sign, scale } => {
                let q = 1.0 + scale * x.norm_sq();
                *x * (-2.0 * sign * scale / (q * q))
            }
        }
    }

    /// `sup |∇W|` over the closed ball of radius `r`.
    pub fn grad_bound(&self, r: f64) -> f64 {
        debug_assert!(r > 0.0);
        match *self {
            Potential::Quadratic => 2.0 * r,
            Potential::InverseQuadratic { scale, .. } => {
                // 2 a s / (1 + a s²)² peaks at s = 1/sqrt(3a).
                let s = (1.0 / (3.0 * scale).sqrt()).min(r);
                let q = 1.0 + scale * s * s;
                2.0 * scale * s / (q * q)
            }
        }
    }

    /// Upper bound on the spectral norm of `D²W` over the ball of radius `r`.
    ///
    /// For the inverse-quadratic kernel the radial and tangential Hessian
    /// eigenvalues are scanned on a dense radial grid and inflated by 1%.
    pub fn hessian_bound(&self, r: f64) -> f64 {
        debug_assert!(r > 0.0);
        match *self {
            Potential::Quadratic => 2.0,
            Potential::InverseQuadratic { scale, .. } => {
                let mut best = 0.0f64;
                for k in 0..=HESSIAN_SCAN {
                    let s = r * k as f64 / HESSIAN_SCAN as f64;
                    let u = scale * s * s;
                    let q = 1.0 + u;
                    let tangential = 2.0 * scale / (q * q);
                    let radial = 2.0 * scale * (3.0 * u - 1.0) / (q * q * q);
                    best = best.max(tangential).max(radial.abs());
                }
                best * HESSIAN_SAFETY
            }
        }
    }

    /// A valid semiconvexity constant `λ_W <= 0` on the ball of radius `r`.
    pub fn semiconvexity(&self, r: f64) -> f64 {
        match self {
            Potential::Quadratic => 0.0,
            Potential::InverseQuadratic { .. } => -self.hessian_bound(r),
        }
    }
}

//! Reshaping functions `f` of the geodesic distance between neighbors.
//!
//! A shaping function defines both the edge potential `f(theta)` summed into
//! the Lyapunov function and, through `f'`, the coupling strength of the
//! control law.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShapingKind {
    /// `1 - cos s`
    Chordal,
    /// `s^2 / 2`
    GeodesicQuadratic,
    /// `(1 - cos s)^p / p`, `p >= 1`
    PowerChordal { p: f64 },
}

impl ShapingKind {
    pub fn name(&self) -> &'static str {
        match self {
            ShapingKind::Chordal => "chordal",
            ShapingKind::GeodesicQuadratic => "geodesic_quadratic",
            ShapingKind::PowerChordal { .. } => "power_chordal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceFunction {
    kind: ShapingKind,
    domain_limit: f64,
}

impl DistanceFunction {
    pub fn new(kind: ShapingKind, domain_limit: f64) -> Result<Self> {
        if !(domain_limit > 0.0 && domain_limit <= PI) {
            return Err(Error::OutOfDomain {
                value: domain_limit,
                lo: 0.0,
                hi: PI,
            });
        }
        if let ShapingKind::PowerChordal { p } = kind {
            if !(p >= 1.0 && p.is_finite()) {
                return Err(Error::OutOfDomain {
                    value: p,
                    lo: 1.0,
                    hi: f64::INFINITY,
                });
            }
        }
        Ok(Self { kind, domain_limit })
    }

    /// Shaping function with the default admissibility domain `(0, pi/2)`.
    pub fn with_default_limit(kind: ShapingKind) -> Result<Self> {
        Self::new(kind, FRAC_PI_2)
    }

    pub fn chordal() -> Self {
        Self {
            kind: ShapingKind::Chordal,
            domain_limit: FRAC_PI_2,
        }
    }

    pub fn kind(&self) -> ShapingKind {
        self.kind
    }

    pub fn domain_limit(&self) -> f64 {
        self.domain_limit
    }

    pub fn eval(&self, s: f64) -> Result<f64> {
        check_angle(s)?;
        Ok(self.eval_unchecked(s))
    }

    pub fn eval_derivative(&self, s: f64) -> Result<f64> {
        check_angle(s)?;
        Ok(match self.kind {
            ShapingKind::Chordal => s.sin(),
            ShapingKind::GeodesicQuadratic => s,
            ShapingKind::PowerChordal { p } => one_minus_cos(s).powf(p - 1.0) * s.sin(),
        })
    }

    pub(crate) fn eval_unchecked(&self, s: f64) -> f64 {
        match self.kind {
            ShapingKind::Chordal => one_minus_cos(s),
            ShapingKind::GeodesicQuadratic => 0.5 * s * s,
            ShapingKind::PowerChordal { p } => one_minus_cos(s).powf(p) / p,
        }
    }

    /// Coupling weight `f'(s) / sin(s)`, continuously extended at `s = 0`.
    ///
    /// With this weight the control law is the exact negative Riemannian
    /// gradient of the edge potential. Infinite at `s = pi` for kinds whose
    /// derivative does not vanish there.
    pub fn coupling_weight(&self, s: f64) -> f64 {
        match self.kind {
            ShapingKind::Chordal => 1.0,
            ShapingKind::GeodesicQuadratic => {
                if s < 1e-8 {
                    1.0 + s * s / 6.0
                } else {
                    s / s.sin()
                }
            }
            ShapingKind::PowerChordal { p } => one_minus_cos(s).powf(p - 1.0),
        }
    }

    /// Grid certificate of the standing assumptions on `f` over `(0, domain_limit)`.
    pub fn verify_admissibility(&self, grid_points: usize) -> Result<AdmissibilityReport> {
        verify_admissibility_with(
            |s| self.eval_unchecked(s),
            |s| self.eval_derivative(s).unwrap_or(f64::NAN),
            self.domain_limit,
            grid_points,
        )
    }
}

/// `1 - cos s`, evaluated without cancellation near zero.
fn one_minus_cos(s: f64) -> f64 {
    let h = (0.5 * s).sin();
    2.0 * h * h
}

fn check_angle(s: f64) -> Result<()> {
    if !(0.0..=PI).contains(&s) {
        return Err(Error::OutOfDomain {
            value: s,
            lo: 0.0,
            hi: PI,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdmissibilityCheck {
    /// `f(0) = 0`
    Origin,
    Positivity,
    Monotonicity,
    DerivativeSign,
    /// Analytic derivative disagrees with a central finite difference.
    DerivativeConsistency,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibilityViolation {
    pub s: f64,
    pub check: AdmissibilityCheck,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub ok: bool,
    pub violations: Vec<AdmissibilityViolation>,
}

const MONOTONE_STEP: f64 = 1e-4;
const FD_STEP: f64 = 1e-5;
const FD_RTOL: f64 = 1e-6;

/// Checks an arbitrary pair `(f, f')` on the uniform interior grid
/// `s_k = limit k / (grid_points + 1)`, `k = 1..=grid_points`.
pub fn verify_admissibility_with(
    f: impl Fn(f64) -> f64,
    df: impl Fn(f64) -> f64,
    limit: f64,
    grid_points: usize,
) -> Result<AdmissibilityReport> {
    if grid_points < 100 {
        return Err(Error::OutOfDomain {
            value: grid_points as f64,
            lo: 100.0,
            hi: f64::INFINITY,
        });
    }
    let mut violations = Vec::new();
    let mut flag = |s, check| violations.push(AdmissibilityViolation { s, check });

    if f(0.0).abs() > 1e-15 {
        flag(0.0, AdmissibilityCheck::Origin);
    }
    for k in 1..=grid_points {
        let s = limit * k as f64 / (grid_points + 1) as f64;
        let value = f(s);
        if !(value > 0.0) {
            flag(s, AdmissibilityCheck::Positivity);
        }
        let increasing = if s + MONOTONE_STEP <= PI {
            f(s + MONOTONE_STEP) > value
        } else {
            value > f(s - MONOTONE_STEP)
        };
        if !increasing {
            flag(s, AdmissibilityCheck::Monotonicity);
        }
        let d = df(s);
        if !(d > 0.0) {
            flag(s, AdmissibilityCheck::DerivativeSign);
        }
        let fd = if s + FD_STEP <= PI {
            (f(s + FD_STEP) - f(s - FD_STEP)) / (2.0 * FD_STEP)
        } else {
            (value - f(s - FD_STEP)) / FD_STEP
        };
        if !((fd - d).abs() <= FD_RTOL * d.abs().max(1e-3)) {
            flag(s, AdmissibilityCheck::DerivativeConsistency);
        }
    }
    Ok(AdmissibilityReport {
        ok: violations.is_empty(),
        violations,
    })
}

//! Concave base flows `U(y) = U₊ − Σ a_k e^{−b_k y}` and the critical layer.

use crate::error::{Error, Result};
use crate::numerics::{c64, C64};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// One exponential term `a e^{−b y}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpTerm {
    pub a: f64,
    pub b: f64,
}

/// On-disk profile description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSpec {
    pub uplus: f64,
    pub terms: Vec<ExpTerm>,
}

/// Analytic shear profile, normalized so that `U(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShearProfile {
    uplus: f64,
    terms: Vec<ExpTerm>,
    beta: f64,
}

/// Build a profile, rescaling the amplitudes so they sum to `uplus`.
pub fn make_profile(terms: &[(f64, f64)], uplus: f64) -> Result<ShearProfile> {
    if terms.is_empty() {
        return Err(Error::EmptySpec);
    }
    for (index, &(a, b)) in terms.iter().enumerate() {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::NonPositiveCoefficient { index, a, b });
        }
    }
    if !(uplus > 0.0 && uplus.is_finite()) {
        return Err(Error::InvalidInput(format!("uplus must be positive, got {uplus}")));
    }
    let total: f64 = terms.iter().map(|t| t.0).sum();
    let terms: Vec<ExpTerm> = terms.iter().map(|&(a, b)| ExpTerm { a: a * uplus / total, b }).collect();
    let beta = terms.iter().map(|t| t.b).fold(f64::INFINITY, f64::min);
    Ok(ShearProfile { uplus, terms, beta })
}

impl ShearProfile {
    /// `U = U₊(1 − e^{−y})` with `U₊ = 1`.
    pub fn exponential() -> ShearProfile {
        make_profile(&[(1.0, 1.0)], 1.0).expect("valid built-in profile")
    }

    pub fn from_spec(spec: &ProfileSpec) -> Result<ShearProfile> {
        let pairs: Vec<(f64, f64)> = spec.terms.iter().map(|t| (t.a, t.b)).collect();
        make_profile(&pairs, spec.uplus)
    }

    pub fn from_json(text: &str) -> Result<ShearProfile> {
        let spec: ProfileSpec = serde_json::from_str(text)?;
        ShearProfile::from_spec(&spec)
    }

    pub fn load(path: &Path) -> Result<ShearProfile> {
        ShearProfile::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn spec(&self) -> ProfileSpec {
        ProfileSpec { uplus: self.uplus, terms: self.terms.clone() }
    }

    pub fn uplus(&self) -> f64 {
        self.uplus
    }

    pub fn terms(&self) -> &[ExpTerm] {
        &self.terms
    }

    /// Slowest decay rate of the exponential terms.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `order`-th derivative of U at complex height `y`.
    pub fn eval(&self, y: C64, order: u32) -> C64 {
        let mut s = c64(0.0, 0.0);
        for t in &self.terms {
            s += t.a * (-t.b).powi(order as i32) * (-t.b * y).exp();
        }
        if order == 0 {
            self.uplus - s
        } else {
            -s
        }
    }

    pub fn u(&self, y: C64) -> C64 {
        self.eval(y, 0)
    }

    /// U'(0).
    pub fn wall_shear(&self) -> f64 {
        self.terms.iter().map(|t| t.a * t.b).sum()
    }

    /// U''(0).
    pub fn wall_curvature(&self) -> f64 {
        -self.terms.iter().map(|t| t.a * t.b * t.b).sum::<f64>()
    }

    /// Taylor coefficients of `U(center + Y)` up to `Y^n` (inclusive).
    pub fn taylor(&self, center: C64, n: usize) -> Vec<C64> {
        let mut out = vec![c64(0.0, 0.0); n + 1];
        for t in &self.terms {
            let mut coef = -t.a * (-t.b * center).exp();
            for (k, slot) in out.iter_mut().enumerate() {
                *slot += coef;
                coef *= -t.b / (k as f64 + 1.0);
            }
        }
        out[0] += self.uplus;
        out
    }
}

/// Root of `U(y_c) = c` continued from `y_c = 0` at `c = 0`.
pub fn critical_layer(profile: &ShearProfile, c: C64) -> Result<C64> {
    let mut y = c / profile.wall_shear();
    for _ in 0..50 {
        let f = profile.u(y) - c;
        let step = f / profile.eval(y, 1);
        y -= step;
        if step.norm() <= 1e-15 * (1.0 + y.norm()) {
            let res = (profile.u(y) - c).norm();
            if res <= 1e-12 {
                return Ok(y);
            }
        }
    }
    Err(Error::NewtonDivergence { iterations: 50, residual: (profile.u(y) - c).norm() })
}

/// A wavenumber, viscosity and phase speed together with the quantities
/// derived from them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveContext {
    pub alpha: f64,
    pub nu: f64,
    /// Physical phase speed.
    pub c: C64,
    /// `ν/(iα)`.
    pub epsilon: C64,
    /// Modified speed `c − 2εα²` that enters the reduced operator.
    pub c_tilde: C64,
    /// Critical layer `U(y_c) = c̃`.
    pub y_c: C64,
    /// `U'(y_c)`.
    pub u1_c: C64,
    /// `U''(y_c)`.
    pub u2_c: C64,
    /// Airy scale `(iαU'(y_c)/ν)^{1/3}`.
    pub gamma: C64,
    /// Tietjens argument `(αU'(y_c)/ν)^{1/3} y_c`.
    pub z: C64,
    /// Airy argument of the wall value, `−γ y_c`.
    pub xi1: C64,
    /// `U'(0) y_c / c̃ − 1`.
    pub lambda_corr: C64,
    /// Temporal eigenvalue `−iαc`.
    pub lambda: C64,
}

impl WaveContext {
    /// Context from the physical phase speed.
    pub fn new(profile: &ShearProfile, alpha: f64, nu: f64, c: C64) -> Result<WaveContext> {
        let epsilon = nu / C64::new(0.0, alpha);
        Self::build(profile, alpha, nu, c, c - 2.0 * epsilon * alpha * alpha)
    }

    /// Context from the modified speed `c̃`.
    pub fn from_modified(profile: &ShearProfile, alpha: f64, nu: f64, c_tilde: C64) -> Result<WaveContext> {
        let epsilon = nu / C64::new(0.0, alpha);
        Self::build(profile, alpha, nu, c_tilde + 2.0 * epsilon * alpha * alpha, c_tilde)
    }

    fn build(profile: &ShearProfile, alpha: f64, nu: f64, c: C64, c_tilde: C64) -> Result<WaveContext> {
        if !(alpha > 0.0 && nu > 0.0) {
            return Err(Error::InvalidInput(format!("need alpha > 0 and nu > 0, got {alpha}, {nu}")));
        }
        let epsilon = nu / C64::new(0.0, alpha);
        let y_c = critical_layer(profile, c_tilde)?;
        let u1_c = profile.eval(y_c, 1);
        let u2_c = profile.eval(y_c, 2);
        let gamma = (C64::new(0.0, alpha) * u1_c / nu).powf(1.0 / 3.0);
        let z = (alpha * u1_c / nu).powf(1.0 / 3.0) * y_c;
        Ok(WaveContext {
            alpha,
            nu,
            c,
            epsilon,
            c_tilde,
            y_c,
            u1_c,
            u2_c,
            gamma,
            z,
            xi1: -gamma * y_c,
            lambda_corr: profile.wall_shear() * y_c / c_tilde - 1.0,
            lambda: C64::new(0.0, -alpha) * c,
        })
    }
}

//! Langer's change of variables around the critical layer and the viscous
//! (fast) solution values at the wall.

use crate::error::{Error, Result};
use crate::numerics::{adaptive_quadrature, c64, Contour, C64};
use crate::profile::{ShearProfile, WaveContext};
use crate::specfun::{airy_ai, airy_primitives};

const QUAD_TOL: f64 = 1e-12;
const SERIES_RADIUS: f64 = 1e-3;
/// Largest `|γ y_c|` accepted by [`fast_boundary_values`].
pub const MAX_WALL_ARGUMENT: f64 = 50.0;

/// The map `y ↦ g(y)` with `U'(y_c)(g − y_c) g'² = U − c̃` and `g(y_c) = y_c`.
#[derive(Debug, Clone)]
pub struct LangerMap<'a> {
    profile: &'a ShearProfile,
    ctx: WaveContext,
}

impl<'a> LangerMap<'a> {
    pub fn new(profile: &'a ShearProfile, ctx: WaveContext) -> LangerMap<'a> {
        LangerMap { profile, ctx }
    }

    pub fn context(&self) -> &WaveContext {
        &self.ctx
    }

    pub fn gamma(&self) -> C64 {
        self.ctx.gamma
    }

    fn ratio(&self, y: C64) -> C64 {
        let d = y - self.ctx.y_c;
        (self.profile.u(y) - self.ctx.c_tilde) / (self.ctx.u1_c * d)
    }

    /// `g(y)` with quadrature tolerance `tol`.
    pub fn g_with_tol(&self, y: C64, tol: f64) -> Result<C64> {
        let yc = self.ctx.y_c;
        let d = y - yc;
        if y.im.abs() > 1.0 / self.ctx.gamma.norm() {
            log::warn!("evaluation height {y} leaves the thin neighbourhood of the real axis (|Im y| > 1/|γ|)");
        }
        if d.norm() < SERIES_RADIUS {
            let u1 = self.ctx.u1_c;
            let r1 = self.ctx.u2_c / (2.0 * u1);
            let r2 = self.profile.eval(yc, 3) / (6.0 * u1);
            let x = 0.3 * r1 * d + 3.0 / 7.0 * (r2 / 2.0 - r1 * r1 / 8.0) * d * d;
            return Ok(yc + d * (1.0 + 2.0 / 3.0 * x - x * x / 9.0));
        }
        for k in 1..32 {
            let r = self.ratio(yc + d * (k as f64 / 32.0));
            if r.re <= 0.0 {
                return Err(Error::BranchAmbiguity { y });
            }
        }
        // J = (3/2)∫₀¹ √t √R(y_c + t d) dt with t = s²
        let path = Contour::segment(c64(0.0, 0.0), c64(1.0, 0.0))?;
        let j = 3.0 * adaptive_quadrature(|s| s * s * self.ratio(yc + s * s * d).sqrt(), &path, tol)?;
        Ok(yc + d * j.powf(2.0 / 3.0))
    }

    pub fn g(&self, y: C64) -> Result<C64> {
        self.g_with_tol(y, QUAD_TOL)
    }

    /// `g'(y) = √((U − c̃)/(U'(y_c)(g − y_c)))`.
    pub fn g_prime(&self, y: C64) -> Result<C64> {
        let d = y - self.ctx.y_c;
        if d.norm() < SERIES_RADIUS {
            let r1 = self.ctx.u2_c / (2.0 * self.ctx.u1_c);
            return Ok(1.0 + 0.4 * r1 * d);
        }
        let g = self.g(y)?;
        Ok(((self.profile.u(y) - self.ctx.c_tilde) / (self.ctx.u1_c * (g - self.ctx.y_c))).sqrt())
    }

    /// `f = g'^{−1/2}`.
    pub fn f(&self, y: C64) -> Result<C64> {
        Ok(1.0 / self.g_prime(y)?.sqrt())
    }

    /// `f(y) Ai(γ(g(y) − y_c))`.
    pub fn modified_airy(&self, y: C64) -> Result<C64> {
        let g = self.g(y)?;
        Ok(self.f(y)? * airy_ai(self.ctx.gamma * (g - self.ctx.y_c)).0)
    }
}

pub fn langer_g(profile: &ShearProfile, ctx: &WaveContext, y: C64) -> Result<C64> {
    LangerMap::new(profile, *ctx).g(y)
}

pub fn modified_airy(profile: &ShearProfile, ctx: &WaveContext, y: C64) -> Result<C64> {
    LangerMap::new(profile, *ctx).modified_airy(y)
}

/// Wall values of the decaying viscous solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FastBoundary {
    pub phi_f0: C64,
    pub dphi_f0: C64,
    pub ratio: C64,
}

/// `φ_f(0) = ai2(−γy_c)`, `φ_f'(0) = γ ai1(−γy_c)` and their ratio.
pub fn fast_boundary_values(ctx: &WaveContext) -> Result<FastBoundary> {
    let x = ctx.xi1;
    if x.norm() > MAX_WALL_ARGUMENT {
        return Err(Error::ArgumentOutOfRange { value: x.norm(), limit: MAX_WALL_ARGUMENT });
    }
    let (a1, a2) = airy_primitives(x);
    let dphi = ctx.gamma * a1;
    if a2.norm() < 1e-300 {
        return Err(Error::DivisionNearZero { z: x, size: a2.norm() });
    }
    Ok(FastBoundary { phi_f0: a2, dphi_f0: dphi, ratio: dphi / a2 })
}

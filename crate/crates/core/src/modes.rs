//! Leading-order shape of the unstable mode: stream function, velocities
//! and vorticity sampled on a grid that resolves the critical layer.

use crate::dispersion::EigenResult;
use crate::error::{Error, Result};
use crate::numerics::{c64, C64, I};
use crate::profile::{ShearProfile, WaveContext};
use crate::rayleigh::{riccati_wall_value, slope_from_omega, MilesOptions};
use crate::specfun::{airy_ai, airy_primitives};

/// Extra grid points placed around the critical layer.
pub const LAYER_POINTS: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct ModeProfile {
    pub y_grid: Vec<f64>,
    pub psi: Vec<C64>,
    pub u: Vec<C64>,
    pub v: Vec<C64>,
    pub omega: Vec<C64>,
    pub alpha: f64,
    pub nu: f64,
    pub c: C64,
    /// Coefficient of the viscous term before normalization.
    pub amplitude: C64,
    /// `max |ψ|` before normalization.
    pub scale: f64,
    /// Height past which the constant part of ψ is given its `e^{−αy}` tail.
    pub y_match: f64,
    /// Constant added to `U − c` in the inviscid part of ψ.
    pub slow_shift: C64,
}

/// Uniform grid on `[0, y_max]` merged with points clustered around `center`.
pub fn mode_grid(y_max: f64, n_grid: usize, center: f64, width: f64) -> Vec<f64> {
    let mut ys: Vec<f64> = (0..n_grid).map(|k| y_max * k as f64 / (n_grid - 1) as f64).collect();
    ys.extend((0..LAYER_POINTS).map(|k| {
        // sinh stretching puts the densest points at the centre
        let s = 2.0 * k as f64 / (LAYER_POINTS - 1) as f64 - 1.0;
        center + width * (1.5 * s).sinh() / 1.5f64.sinh()
    }));
    ys.retain(|&y| (0.0..=y_max).contains(&y));
    ys.sort_by(f64::total_cmp);
    ys.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    ys
}

pub fn build_mode(profile: &ShearProfile, eigen: &EigenResult, y_max: f64, n_grid: usize) -> Result<ModeProfile> {
    if n_grid < 64 || !(y_max > 0.0) {
        return Err(Error::InvalidInput(format!("need n_grid >= 64 and y_max > 0, got {n_grid}, {y_max}")));
    }
    if eigen.alpha <= 0.0 {
        return Err(Error::InvalidInput("mode reconstruction needs alpha > 0".into()));
    }
    if eigen.lambda.re < 0.0 {
        log::warn!("reconstructing a decaying mode (Re λ = {:e})", eigen.lambda.re);
    }
    let alpha = eigen.alpha;
    let ctx = WaveContext::from_modified(profile, alpha, eigen.nu, eigen.c_tilde)?;
    let (gamma, y_c) = (ctx.gamma, ctx.y_c);
    let c = ctx.c_tilde;
    // inviscid part U − c + K, with K matching the exact wall slope
    // U'(0)/(K − c); to first order K = αU₊²/U'(0)
    let slope = slope_from_omega(profile, c, riccati_wall_value(profile, alpha, c, &MilesOptions::default())?);
    let shift = c + profile.wall_shear() / slope;
    let (_, wall) = airy_primitives(ctx.xi1);
    if wall.norm() == 0.0 {
        return Err(Error::DivisionNearZero { z: ctx.xi1, size: 0.0 });
    }
    let a = -(shift - c) / wall;
    let far = profile.uplus() - c + shift;
    let y_match = y_c.re + 20.0 / gamma.norm();

    let ys = mode_grid(y_max, n_grid, y_c.re, 10.0 / gamma.norm());
    let mut psi = Vec::with_capacity(ys.len());
    let mut u = Vec::with_capacity(ys.len());
    let mut omega = Vec::with_capacity(ys.len());
    for &y in &ys {
        let yz = c64(y, 0.0);
        let x = gamma * (yz - y_c);
        let (ai, _) = airy_ai(x);
        let (ai1, ai2) = airy_primitives(x);
        let (ub, u1, u2) = (profile.u(yz), profile.eval(yz, 1), profile.eval(yz, 2));
        // constant part, with an e^{−α(y−y_match)} tail past the layer
        let (k, dk, ddk) = if y <= y_match {
            (far, C64::new(0.0, 0.0), C64::new(0.0, 0.0))
        } else {
            let e = far * (-alpha * (y - y_match)).exp();
            (e, -alpha * e, alpha * alpha * e)
        };
        let p = ub - profile.uplus() + k + a * ai2;
        let dp = u1 + dk + a * gamma * ai1;
        let ddp = u2 + ddk + a * gamma * gamma * ai;
        psi.push(p);
        u.push(dp);
        omega.push(-(ddp - alpha * alpha * p));
    }
    let scale = psi.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let norm = |v: Vec<C64>| -> Vec<C64> { v.into_iter().map(|x| x / scale).collect() };
    let psi = norm(psi);
    let v = psi.iter().map(|p| -I * alpha * p).collect();
    Ok(ModeProfile {
        y_grid: ys,
        psi,
        u: norm(u),
        v,
        omega: norm(omega),
        alpha,
        nu: eigen.nu,
        c: eigen.c,
        amplitude: a,
        scale,
        y_match,
        slow_shift: shift,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{solve_by_continuation, Method};
    use crate::numerics::linear_fit;

    fn lower_mode(y_max: f64) -> (ModeProfile, EigenResult) {
        let p = ShearProfile::exponential();
        let nu: f64 = 1e-6;
        let e = solve_by_continuation(&p, 1.5 * nu.powf(0.25), nu, Method::Miles).unwrap();
        (build_mode(&p, &e, y_max, 2000).unwrap(), e)
    }

    fn tail_slope(m: &ModeProfile, f: &[C64], lo: f64, hi: f64) -> f64 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = m
            .y_grid
            .iter()
            .zip(f)
            .filter(|(y, _)| (lo..=hi).contains(*y))
            .map(|(y, v)| (*y, v.norm().ln()))
            .unzip();
        linear_fit(&xs, &ys).0
    }

    #[test]
    fn wall_conditions() {
        let (m, _) = lower_mode(400.0);
        let pmax = m.psi.iter().map(|p| p.norm()).fold(0.0, f64::max);
        let umax = m.u.iter().map(|p| p.norm()).fold(0.0, f64::max);
        assert_eq!(m.y_grid[0], 0.0);
        assert!(m.psi[0].norm() <= 1e-8 * pmax);
        assert!(m.u[0].norm() <= 1e-2 * umax, "{}", m.u[0].norm() / umax);
        assert!((pmax - 1.0).abs() < 1e-15);
    }

    #[test]
    fn amplitude_scales_with_layer_width() {
        let (m, e) = lower_mode(100.0);
        assert!(e.lambda.re > 0.0);
        let ag = (m.amplitude * e.gamma).norm();
        assert!((0.05..=20.0).contains(&ag), "{ag}");
    }

    #[test]
    fn vorticity_concentrates_in_critical_layer() {
        let (m, e) = lower_mode(100.0);
        let g = e.gamma.norm();
        let ctx_yc = m.y_grid[m.omega.iter().enumerate().max_by(|a, b| a.1.norm().total_cmp(&b.1.norm())).unwrap().0];
        let yc = crate::profile::critical_layer(&ShearProfile::exponential(), e.c_tilde).unwrap().re;
        assert!((ctx_yc - yc).abs() <= 3.0 / g, "peak at {ctx_yc}, layer at {yc}");
        let peak = m.omega.iter().map(|w| w.norm()).fold(0.0, f64::max);
        let outer = m
            .y_grid
            .iter()
            .zip(&m.omega)
            .filter(|(y, _)| **y > yc + 5.0 / g)
            .map(|(_, w)| w.norm())
            .fold(0.0, f64::max);
        assert!(peak / outer >= g / 10.0, "{} < {}", peak / outer, g / 10.0);
    }

    #[test]
    fn velocity_identities() {
        let (m, _) = lower_mode(100.0);
        for (p, v) in m.psi.iter().zip(&m.v) {
            assert_eq!(*v, -I * m.alpha * p);
        }
        // ω = −(ψ'' − α²ψ) and u = ψ' on the uniform part of the grid
        let ys = &m.y_grid;
        for k in (1..ys.len() - 1).step_by(7) {
            let (h0, h1) = (ys[k] - ys[k - 1], ys[k + 1] - ys[k]);
            if (h0 - h1).abs() > 1e-9 || ys[k] < 1.0 {
                continue;
            }
            let h = h0;
            let d2 = (m.psi[k + 1] - 2.0 * m.psi[k] + m.psi[k - 1]) / (h * h);
            let w = -(d2 - m.alpha * m.alpha * m.psi[k]);
            assert!((w - m.omega[k]).norm() <= 1e-3 * (1.0 + m.omega[k].norm()), "y = {}", ys[k]);
            let d1 = (m.psi[k + 1] - m.psi[k - 1]) / (2.0 * h);
            assert!((d1 - m.u[k]).norm() <= 1e-3 * (1.0 + m.u[k].norm()), "y = {}", ys[k]);
        }
    }

    #[test]
    fn far_field_decay_rates() {
        let (m, _) = lower_mode(400.0);
        let s = tail_slope(&m, &m.psi, 200.0, 400.0);
        assert!((s + m.alpha).abs() <= 0.1 * m.alpha, "psi slope {s}");
        let beta = ShearProfile::exponential().beta();
        let s = tail_slope(&m, &m.omega, 5.0, 20.0);
        assert!((s + beta).abs() <= 0.15 * beta, "omega slope {s}");
    }
}

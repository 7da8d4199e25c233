//! Runtime invariant checks, run by the `selfcheck` subcommand.

use crate::dispersion::{solve_by_continuation, solve_eigenvalue, Method};
use crate::langer::LangerMap;
use crate::numerics::{c64, C64};
use crate::profile::{make_profile, ShearProfile, WaveContext};
use crate::rayleigh::{frobenius, miles_slope, miles_slope_with, omega0_with_radius, rayleigh_operator, MilesOptions};
use crate::specfun::{airy_eval, tietjens_root};
use std::f64::consts::PI;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Check = fn() -> Result<String, String>;

fn verdict(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn tietjens_constants() -> Result<String, String> {
    let r = tietjens_root().map_err(|e| e.to_string())?;
    let ok = (r.z0 - 2.297).abs() <= 1e-3
        && (r.ti.re - 0.5645).abs() <= 1e-3
        && (r.ti_prime.re + 0.1197).abs() <= 2e-3
        && (r.ti_prime.im - 0.2307).abs() <= 2e-3;
    verdict(ok, format!("z0 = {:.5}, Ti = {:.5}, Ti' = {:.4}", r.z0, r.ti, r.ti_prime))
}

fn airy_wronskian() -> Result<String, String> {
    let mut worst = 0.0f64;
    for k in 0..64 {
        let z = C64::from_polar(0.125 * k as f64, 0.61 * k as f64);
        let b = airy_eval(z);
        let w = b.ai * b.bi_prime - b.ai_prime * b.bi;
        // floor set by cancellation between the two products
        let cond = (PI * (b.ai * b.bi_prime).norm().max((b.ai_prime * b.bi).norm())).max(1.0);
        worst = worst.max((w * PI - 1.0).norm() / cond);
    }
    verdict(worst <= 1e-9, format!("max |πW − 1|/cond = {worst:.2e}"))
}

fn langer_identity() -> Result<String, String> {
    let p = make_profile(&[(0.7, 1.0), (0.3, 2.0)], 1.0).map_err(|e| e.to_string())?;
    let ctx = WaveContext::from_modified(&p, 0.05, 1e-6, c64(0.08, 0.004)).map_err(|e| e.to_string())?;
    let m = LangerMap::new(&p, ctx);
    let h = 1e-3;
    let mut worst = 0.0f64;
    for k in 0..20 {
        let y = c64(0.01 + 0.25 * k as f64, 0.0);
        let g = |t: f64| m.g(y + t).map_err(|e| e.to_string());
        let gp = (-g(2.0 * h)? + 8.0 * g(h)? - 8.0 * g(-h)? + g(-2.0 * h)?) / (12.0 * h);
        let w = p.u(y) - ctx.c_tilde;
        worst = worst.max((ctx.u1_c * (g(0.0)? - ctx.y_c) * gp * gp - w).norm() / (1.0 + w.norm()));
    }
    verdict(worst <= 1e-8, format!("max residual = {worst:.2e}"))
}

fn slope_convergence_order() -> Result<String, String> {
    let p = ShearProfile::exponential();
    let c = c64(0.1, 0.05);
    let mut gaps = Vec::new();
    for a in [0.02, 0.01, 0.005] {
        let s = miles_slope(&p, a, c).map_err(|e| e.to_string())?;
        gaps.push((s.slope_exact - s.slope_expansion).norm());
    }
    let orders: Vec<f64> = gaps.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let ok = orders.iter().all(|o| (2.0..=4.0).contains(o));
    verdict(ok, format!("observed orders {:.2?} (expected 3)", orders))
}

fn frobenius_residual() -> Result<String, String> {
    let mut worst = 0.0f64;
    let two = make_profile(&[(0.7, 1.0), (0.3, 2.0)], 1.0).map_err(|e| e.to_string())?;
    for p in [ShearProfile::exponential(), two] {
        let (c, alpha) = (c64(0.07, 0.01), 0.1);
        let f = frobenius(&p, alpha, c, 40).map_err(|e| e.to_string())?;
        for k in 0..16 {
            let y = f.center + C64::from_polar(f.radius / 2.0, 2.0 * PI * (k as f64 + 0.25) / 16.0);
            worst = worst.max(rayleigh_operator(&p, alpha, c, y, f.psi_a(y)).norm());
            worst = worst.max(rayleigh_operator(&p, alpha, c, y, f.psi_b(y)).norm());
        }
    }
    verdict(worst <= 1e-8, format!("max residual = {worst:.2e}"))
}

fn newton_quadratic() -> Result<String, String> {
    let p = ShearProfile::exponential();
    let nu: f64 = 1e-6;
    let alpha = 2.7 * nu.powf(0.25);
    let seed = solve_by_continuation(&p, alpha, nu, Method::Expansion).map_err(|e| e.to_string())?.c * c64(0.9, 0.05);
    let r = solve_eigenvalue(&p, alpha, nu, seed, Method::Expansion).map_err(|e| e.to_string())?;
    let root = *r.history.last().unwrap_or(&r.c_tilde);
    let errs: Vec<f64> = r.history.iter().map(|h| (h - root).norm()).filter(|&e| e > 1e-11).collect();
    let ks: Vec<f64> = errs.windows(2).map(|w| w[1] / (w[0] * w[0])).collect();
    let tail = &ks[ks.len().saturating_sub(2)..];
    let ok = errs.len() >= 3 && tail.iter().all(|&k| k <= 50.0 / root.norm());
    verdict(ok, format!("{} iterations, e_(n+1)/e_n^2 = {:?}", r.iterations, tail))
}

fn contour_independence() -> Result<String, String> {
    let p = ShearProfile::exponential();
    let c = c64(0.08, 0.003);
    let a = omega0_with_radius(&p, c, 0.05, 0.05).map_err(|e| e.to_string())?;
    let b = omega0_with_radius(&p, c, 0.05, 0.1).map_err(|e| e.to_string())?;
    let o1 = MilesOptions { radius: 0.05, ..MilesOptions::default() };
    let o2 = MilesOptions { radius: 0.1, ..MilesOptions::default() };
    let s1 = miles_slope_with(&p, 0.05, c, &o1).map_err(|e| e.to_string())?.slope_exact;
    let s2 = miles_slope_with(&p, 0.05, c, &o2).map_err(|e| e.to_string())?.slope_exact;
    let d1 = (a - b).norm() / a.norm();
    let d2 = (s1 - s2).norm() / s1.norm();
    verdict(d1 <= 1e-7 && d2 <= 1e-7, format!("Ω₀ {d1:.1e}, slope {d2:.1e}"))
}

fn root_uniqueness() -> Result<String, String> {
    let p = ShearProfile::exponential();
    let nu: f64 = 1e-6;
    let mut worst = 0.0f64;
    for scaled in [1.5, 2.0, 2.5, 3.0, 3.5] {
        let alpha = scaled * nu.powf(0.25);
        let base = solve_by_continuation(&p, alpha, nu, Method::Expansion).map_err(|e| e.to_string())?;
        for k in 0..20 {
            let fr = 0.3 * (2.0 * (k % 5) as f64 / 4.0 - 1.0);
            let fi = 0.3 * (2.0 * (k / 5) as f64 / 3.0 - 1.0);
            let seed = c64(base.c.re * (1.0 + fr), base.c.im * (1.0 + fi));
            let r = solve_eigenvalue(&p, alpha, nu, seed, Method::Expansion).map_err(|e| format!("alpha {alpha}: {e}"))?;
            worst = worst.max((r.c - base.c).norm());
        }
    }
    verdict(worst <= 1e-8, format!("max spread over 100 starts = {worst:.1e}"))
}

const CHECKS: [(&str, Check); 8] = [
    ("tietjens constants", tietjens_constants),
    ("airy wronskian", airy_wronskian),
    ("langer identity", langer_identity),
    ("slope convergence order", slope_convergence_order),
    ("frobenius residual", frobenius_residual),
    ("newton quadratic convergence", newton_quadratic),
    ("contour independence", contour_independence),
    ("root uniqueness", root_uniqueness),
];

pub fn run_all() -> Vec<CheckResult> {
    CHECKS
        .iter()
        .map(|&(name, f)| {
            let t = Instant::now();
            let (passed, detail) = match f() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult { name, passed, detail, seconds: t.elapsed().as_secs_f64() }
        })
        .collect()
}

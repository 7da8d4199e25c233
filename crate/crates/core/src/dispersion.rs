//! The long-wave dispersion relation, its Newton solver, and the branch,
//! marginal-curve and growth-rate scans built on top of it.

use crate::error::{Error, Result};
use crate::langer::fast_boundary_values;
use crate::numerics::{c64, complex_newton, NewtonOptions, C64};
use crate::oracle;
use crate::profile::{critical_layer, ShearProfile, WaveContext};
use crate::rayleigh::{omega0, riccati_wall_value, slope_from_omega, MilesOptions};
use crate::specfun::tietjens;
use std::fmt;
use std::str::FromStr;

/// Marginal lower-branch constants for `U₊ = U'(0) = 1`.
pub const LOWER_BRANCH_ALPHA4_OVER_NU: f64 = 1.002;
pub const LOWER_BRANCH_SPEED_RATIO: f64 = 2.296;

/// How the wall condition is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Tietjens function against the small-α expansion of the inviscid slope.
    Expansion,
    /// Airy primitives against the Riccati (exact inviscid) slope.
    Miles,
    /// Compound-matrix shooting on the full fourth-order equation.
    Shoot,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Expansion => "expansion",
            Method::Miles => "miles",
            Method::Shoot => "shoot",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Method> {
        match s {
            "expansion" => Ok(Method::Expansion),
            "miles" => Ok(Method::Miles),
            "shoot" => Ok(Method::Shoot),
            _ => Err(Error::InvalidInput(format!("unknown method '{s}' (expansion | miles | shoot)"))),
        }
    }
}

/// A converged eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub alpha: f64,
    pub nu: f64,
    /// Physical phase speed.
    pub c: C64,
    pub c_tilde: C64,
    pub lambda: C64,
    pub residual: f64,
    pub iterations: usize,
    pub method: Method,
    pub z: C64,
    pub gamma: C64,
    /// Newton iterates in the solver's unknown (`c̃`, or `c` when shooting).
    pub history: Vec<C64>,
}

impl EigenResult {
    pub fn growth_rate(&self) -> f64 {
        self.lambda.re
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Neutral,
    Unstable,
}

impl Stability {
    pub fn of(re_lambda: f64) -> Stability {
        if re_lambda > 0.0 {
            Stability::Unstable
        } else if re_lambda < 0.0 {
            Stability::Stable
        } else {
            Stability::Neutral
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchPoint {
    pub alpha: f64,
    pub c: C64,
    pub lambda: C64,
    pub stability: Stability,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalPair {
    pub nu: f64,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    pub c_minus: C64,
    pub c_plus: C64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthPoint {
    pub alpha: f64,
    pub alpha_scaled: f64,
    pub c: C64,
    pub re_lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GrowthCurve {
    pub nu: f64,
    pub points: Vec<GrowthPoint>,
    pub argmax_alpha_scaled: f64,
    pub max_re_lambda: f64,
}

fn check_inputs(alpha: f64, nu: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha != 0.0 && alpha.abs() < 0.5) {
        return Err(Error::InvalidInput(format!("alpha must satisfy 0 < |alpha| < 0.5, got {alpha}")));
    }
    if !(nu > 0.0 && nu < 1e-2) {
        return Err(Error::InvalidInput(format!("nu must lie in (0, 1e-2), got {nu}")));
    }
    Ok(())
}

/// `c̃ = c + 2iνα`.
fn modified_speed(alpha: f64, nu: f64, c: C64) -> C64 {
    c + c64(0.0, 2.0 * nu * alpha)
}

/// Residual and its reference scale in the solver's unknown, for `alpha > 0`.
fn residual_in_unknown(profile: &ShearProfile, alpha: f64, nu: f64, x: C64, method: Method) -> Result<(C64, f64)> {
    if !(x.norm() > 0.0 && x.norm() < 0.5 * profile.uplus()) {
        return Err(Error::InvalidInput(format!("phase speed {x} outside 0 < |c| < U+/2")));
    }
    match method {
        Method::Expansion => {
            let ctx = WaveContext::from_modified(profile, alpha, nu, x)?;
            let ti = tietjens(ctx.z)?.ti;
            let u0 = profile.wall_shear();
            let d2 = (profile.uplus() - x).powi(2);
            let om = omega0(profile, x, alpha)?;
            let rhs = 1.0 - alpha / x * d2 / u0 + alpha * alpha / x * (d2 * d2 / u0) * (1.0 / (u0 * x) + om);
            Ok(((1.0 + ctx.lambda_corr) * ti - rhs, 1.0 + ti.norm()))
        }
        Method::Miles => {
            let ctx = WaveContext::from_modified(profile, alpha, nu, x)?;
            let opts = MilesOptions::default();
            let slope = slope_from_omega(profile, x, riccati_wall_value(profile, alpha, x, &opts)?);
            let fb = fast_boundary_values(&ctx)?;
            Ok((1.0 - slope * fb.phi_f0 / fb.dphi_f0, 1.0))
        }
        Method::Shoot => Ok((oracle::shoot_determinant(profile, alpha, nu, x)?, 1.0)),
    }
}

/// Dispersion residual at the physical phase speed `c`.
pub fn residual(profile: &ShearProfile, alpha: f64, nu: f64, c: C64, method: Method) -> Result<C64> {
    check_inputs(alpha, nu)?;
    if alpha < 0.0 {
        return Ok(residual(profile, -alpha, nu, c.conj(), method)?.conj());
    }
    let x = if method == Method::Shoot { c } else { modified_speed(alpha, nu, c) };
    Ok(residual_in_unknown(profile, alpha, nu, x, method)?.0)
}

/// Lower-branch seed `c ≈ 2.296 α U₊²/U'(0)`.
pub fn lower_branch_seed(profile: &ShearProfile, alpha: f64) -> C64 {
    c64(LOWER_BRANCH_SPEED_RATIO * alpha.abs() * profile.uplus().powi(2) / profile.wall_shear(), 0.0)
}

/// Leading-order upper-branch seed `c ≈ α U₊²/U'(0)`.
pub fn upper_branch_seed(profile: &ShearProfile, alpha: f64) -> C64 {
    c64(alpha.abs() * profile.uplus().powi(2) / profile.wall_shear(), 0.0)
}

/// Seeds worth trying at `(α, ν)`, most plausible first.
pub fn default_seeds(profile: &ShearProfile, alpha: f64, nu: f64) -> Vec<C64> {
    let lo = lower_branch_seed(profile, alpha);
    let hi = upper_branch_seed(profile, alpha);
    let mid = 0.5 * (lo + hi);
    if alpha.powi(4) / nu < 30.0 * profile.wall_shear() {
        vec![lo, mid, hi]
    } else {
        vec![hi, mid, lo]
    }
}

/// Wavenumber where the lower-branch seed is accurate, `α⁴ = 1.002 ν U'(0)`.
pub fn lower_branch_alpha(profile: &ShearProfile, nu: f64) -> f64 {
    (LOWER_BRANCH_ALPHA4_OVER_NU * nu * profile.wall_shear()).powf(0.25)
}

/// Solve at `(α, ν)` by continuing the branch from the lower neutral
/// wavenumber, where the asymptotic seed is reliable.
pub fn solve_by_continuation(profile: &ShearProfile, alpha: f64, nu: f64, method: Method) -> Result<EigenResult> {
    let a0 = lower_branch_alpha(profile, nu).min(0.45);
    let sign = alpha.signum();
    let target = alpha.abs();
    let steps = ((target / a0).ln().abs() / 0.08).ceil() as usize;
    let mut r = solve_from_seeds(profile, a0, nu, &default_seeds(profile, a0, nu), method)?;
    let mut prev = r.c;
    for (k, &a) in geometric_grid(a0, target, steps + 1).iter().enumerate().skip(1) {
        let guess = if k >= 2 { r.c + (r.c - prev) } else { r.c };
        prev = r.c;
        r = solve_from_seeds(profile, a, nu, &[guess, r.c], method).map_err(|_| Error::BranchBreak { alpha: a, solved: k })?;
    }
    if sign < 0.0 {
        solve_eigenvalue(profile, alpha, nu, r.c, method)
    } else {
        Ok(r)
    }
}

/// Newton solve from `c_seed` (physical speed).
pub fn solve_eigenvalue(profile: &ShearProfile, alpha: f64, nu: f64, c_seed: C64, method: Method) -> Result<EigenResult> {
    solve_with(profile, alpha, nu, c_seed, method, &NewtonOptions::default())
}

pub fn solve_with(
    profile: &ShearProfile,
    alpha: f64,
    nu: f64,
    c_seed: C64,
    method: Method,
    opts: &NewtonOptions,
) -> Result<EigenResult> {
    check_inputs(alpha, nu)?;
    if alpha < 0.0 {
        let r = solve_with(profile, -alpha, nu, c_seed.conj(), method, opts)?;
        return Ok(EigenResult {
            alpha,
            c: r.c.conj(),
            c_tilde: r.c_tilde.conj(),
            lambda: r.lambda.conj(),
            z: r.z.conj(),
            gamma: r.gamma.conj(),
            history: r.history.iter().map(|h| h.conj()).collect(),
            ..r
        });
    }
    let shooting = method == Method::Shoot;
    let seed = if shooting { c_seed } else { modified_speed(alpha, nu, c_seed) };
    let out = complex_newton(|x| residual_in_unknown(profile, alpha, nu, x, method), seed, opts)?;
    let ctx = if shooting {
        WaveContext::new(profile, alpha, nu, out.root)?
    } else {
        WaveContext::from_modified(profile, alpha, nu, out.root)?
    };
    Ok(EigenResult {
        alpha,
        nu,
        c: ctx.c,
        c_tilde: ctx.c_tilde,
        lambda: ctx.lambda,
        residual: out.residual.norm(),
        iterations: out.iterations,
        method,
        z: ctx.z,
        gamma: ctx.gamma,
        history: out.history,
    })
}

/// Try each seed in turn and return the first converged root.
pub fn solve_from_seeds(
    profile: &ShearProfile,
    alpha: f64,
    nu: f64,
    seeds: &[C64],
    method: Method,
) -> Result<EigenResult> {
    let mut last = Error::InvalidInput("no seeds supplied".into());
    for &s in seeds {
        match solve_eigenvalue(profile, alpha, nu, s, method) {
            Ok(r) => return Ok(r),
            Err(e) => last = e,
        }
    }
    Err(last)
}

/// Geometric grid of `n` points on `[lo, hi]`.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let r = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|k| lo * (r * k as f64).exp()).collect()
}

fn branch_point(r: &EigenResult) -> BranchPoint {
    BranchPoint { alpha: r.alpha, c: r.c, lambda: r.lambda, stability: Stability::of(r.lambda.re) }
}

/// Continue the eigenvalue along a geometric α grid.
pub fn trace_branch(
    profile: &ShearProfile,
    nu: f64,
    alpha_min: f64,
    alpha_max: f64,
    n_points: usize,
    method: Method,
) -> Result<Vec<BranchPoint>> {
    let (points, stop) = trace_partial(profile, nu, alpha_min, alpha_max, n_points, method)?;
    match stop {
        Some(e) => Err(e),
        None => Ok(points),
    }
}

/// Like [`trace_branch`], but keeps the points solved before a break.
pub fn trace_partial(
    profile: &ShearProfile,
    nu: f64,
    alpha_min: f64,
    alpha_max: f64,
    n_points: usize,
    method: Method,
) -> Result<(Vec<BranchPoint>, Option<Error>)> {
    if !(alpha_min > 0.0 && alpha_max > alpha_min && alpha_max < 0.5 && n_points >= 2) {
        return Err(Error::InvalidInput(format!(
            "need 0 < alpha_min < alpha_max < 0.5 and n_points >= 2, got [{alpha_min}, {alpha_max}], {n_points}"
        )));
    }
    let alphas = geometric_grid(alpha_min, alpha_max, n_points);
    let mut out: Vec<BranchPoint> = Vec::with_capacity(n_points);
    for (k, &alpha) in alphas.iter().enumerate() {
        let seeds = match k {
            0 => default_seeds(profile, alpha, nu),
            1 => vec![out[0].c],
            _ => vec![2.0 * out[k - 1].c - out[k - 2].c, out[k - 1].c],
        };
        let broke = Error::BranchBreak { alpha, solved: k };
        let Ok(r) = solve_from_seeds(profile, alpha, nu, &seeds, method) else {
            return Ok((out, Some(broke)));
        };
        if let Some(prev) = out.last() {
            if (r.c - prev.c).norm() > 0.5 * r.c.norm() {
                return Ok((out, Some(broke)));
            }
        }
        out.push(branch_point(&r));
    }
    Ok((out, None))
}

/// α range scanned for the unstable window at viscosity `nu`.
pub fn window_scan_range(nu: f64) -> (f64, f64) {
    (0.7 * nu.powf(0.25), (4.0 * nu.powf(1.0 / 6.0)).min(0.45))
}

const MARGINAL_SCAN_POINTS: usize = 48;

/// Secant refinement of `Im c(α) = 0` between bracketing branch points.
fn refine_marginal(
    profile: &ShearProfile,
    nu: f64,
    a: &BranchPoint,
    b: &BranchPoint,
    method: Method,
) -> Result<(f64, C64)> {
    let (mut x0, mut f0, mut c0) = (a.alpha.ln(), a.c.im, a.c);
    let (mut x1, mut f1, mut c1) = (b.alpha.ln(), b.c.im, b.c);
    for _ in 0..60 {
        if f1.abs() <= 1e-9 {
            return Ok((x1.exp(), c1));
        }
        let mut x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        let (lo, hi) = (a.alpha.ln().min(b.alpha.ln()), a.alpha.ln().max(b.alpha.ln()));
        let span = hi - lo;
        x2 = x2.clamp(lo - 0.5 * span, hi + 0.5 * span);
        let t = (x2 - x1) / (x1 - x0);
        let seed = c1 + (c1 - c0) * t;
        let r = solve_from_seeds(profile, x2.exp(), nu, &[seed, c1], method)?;
        (x0, f0, c0) = (x1, f1, c1);
        (x1, f1, c1) = (x2, r.c.im, r.c);
    }
    if f1.abs() <= 1e-9 {
        Ok((x1.exp(), c1))
    } else {
        Err(Error::NewtonDivergence { iterations: 60, residual: f1.abs() })
    }
}

/// The two neutral wavenumbers bounding the unstable window.
pub fn marginal_curves(profile: &ShearProfile, nu: f64, method: Method) -> Result<MarginalPair> {
    if !(1e-14..=1e-3).contains(&nu) {
        return Err(Error::InvalidInput(format!("nu must lie in [1e-14, 1e-3], got {nu}")));
    }
    let (lo, hi) = window_scan_range(nu);
    let (branch, stop) = trace_partial(profile, nu, lo, hi, MARGINAL_SCAN_POINTS, method)?;
    if branch.len() < 2 {
        return Err(stop.unwrap_or(Error::WindowNotFound { nu }));
    }
    let up = branch.windows(2).position(|w| w[0].c.im <= 0.0 && w[1].c.im > 0.0);
    let down = branch.windows(2).rposition(|w| w[0].c.im > 0.0 && w[1].c.im <= 0.0);
    let (Some(i), Some(j)) = (up, down) else {
        return Err(Error::WindowNotFound { nu });
    };
    let (alpha_minus, c_minus) = refine_marginal(profile, nu, &branch[i], &branch[i + 1], method)?;
    let (alpha_plus, c_plus) = refine_marginal(profile, nu, &branch[j], &branch[j + 1], method)?;
    Ok(MarginalPair { nu, alpha_minus, alpha_plus, c_minus, c_plus })
}

/// `Re λ` along the branch, with the maximum located by golden-section search.
pub fn growth_curve(profile: &ShearProfile, nu: f64, n_points: usize, method: Method) -> Result<GrowthCurve> {
    let (lo, hi) = window_scan_range(nu);
    let branch = trace_branch(profile, nu, lo, hi, n_points.max(3), method)?;
    let scale = nu.powf(0.25);
    let points: Vec<GrowthPoint> = branch
        .iter()
        .map(|b| GrowthPoint { alpha: b.alpha, alpha_scaled: b.alpha / scale, c: b.c, re_lambda: b.lambda.re })
        .collect();
    let k = points
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.re_lambda.total_cmp(&b.1.re_lambda))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let (mut best_alpha, mut best) = (points[k].alpha, points[k].re_lambda);
    if k > 0 && k + 1 < points.len() {
        let mut seed = points[k].c;
        let mut eval = |la: f64| -> Result<f64> {
            let r = solve_from_seeds(profile, la.exp(), nu, &[seed, points[k].c], method)?;
            seed = r.c;
            Ok(r.lambda.re)
        };
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (points[k - 1].alpha.ln(), points[k + 1].alpha.ln());
        let mut x1 = b - g * (b - a);
        let mut x2 = a + g * (b - a);
        let mut f1 = eval(x1)?;
        let mut f2 = eval(x2)?;
        while b - a > 1e-7 {
            if f1 < f2 {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = eval(x2)?;
            } else {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = eval(x1)?;
            }
        }
        let (xa, fa) = if f1 > f2 { (x1, f1) } else { (x2, f2) };
        if fa > best {
            best = fa;
            best_alpha = xa.exp();
        }
    }
    Ok(GrowthCurve { nu, points, argmax_alpha_scaled: best_alpha / scale, max_re_lambda: best })
}

/// Explicit large-`z` approximation of `θ = α/c`, with the speed-dependent
/// coefficients evaluated once at `c = α U₊²/U'(0)`.
pub fn large_z_reduction(profile: &ShearProfile, nu: f64, alpha: f64) -> Result<C64> {
    check_inputs(alpha, nu)?;
    let u0 = profile.wall_shear();
    let c = upper_branch_seed(profile, alpha);
    let d2 = (profile.uplus() - c).powi(2);
    let a = d2 / u0;
    let b = d2 * d2 / u0 * (1.0 / (u0 * c) + omega0(profile, c, alpha)?);
    let u1_c = profile.eval(critical_layer(profile, c)?, 1);
    let rot = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    Ok(1.0 / a + alpha * b / (a * a) - rot * nu.sqrt() * u1_c / (a.powf(2.5) * alpha * alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_profile() -> ShearProfile {
        ShearProfile::exponential()
    }

    #[test]
    fn constructed_fixed_point() {
        // pick c̃, then choose the profile-independent Tietjens side by hand:
        // the residual vanishes iff (1+Λ)Ti equals the bracket.
        let p = exp_profile();
        let (alpha, nu) = (0.03, 1e-6);
        let c = c64(0.07, 0.001);
        let ct = modified_speed(alpha, nu, c);
        let ctx = WaveContext::from_modified(&p, alpha, nu, ct).unwrap();
        let ti = tietjens(ctx.z).unwrap().ti;
        let e = residual(&p, alpha, nu, c, Method::Expansion).unwrap();
        let d2 = (1.0 - ct).powi(2);
        let om = omega0(&p, ct, alpha).unwrap();
        let bracket = 1.0 - alpha / ct * d2 + alpha * alpha / ct * d2 * d2 * (1.0 / ct + om);
        assert!((e - ((1.0 + ctx.lambda_corr) * ti - bracket)).norm() < 1e-14);
    }

    #[test]
    fn branch_seed_converges_near_neutral() {
        let p = exp_profile();
        let nu: f64 = 1e-10;
        let alpha = (LOWER_BRANCH_ALPHA4_OVER_NU * nu).powf(0.25);
        let r = solve_eigenvalue(&p, alpha, nu, lower_branch_seed(&p, alpha), Method::Expansion).unwrap();
        assert!(r.iterations <= 8, "{} iterations", r.iterations);
        assert!(r.c.im.abs() < 0.05 * r.c.norm(), "c = {}", r.c);
        assert!(r.residual <= 1e-10 * (1.0 + tietjens(r.z).unwrap().ti.norm()));
    }

    #[test]
    fn stable_far_above_window() {
        let p = exp_profile();
        let nu: f64 = 1e-6;
        let alpha = nu.powf(1.0 / 7.0);
        let r = solve_from_seeds(&p, alpha, nu, &default_seeds(&p, alpha, nu), Method::Expansion).unwrap();
        assert!(r.c.im < 0.0, "c = {}", r.c);
    }

    #[test]
    fn newton_is_quadratic() {
        let p = exp_profile();
        let nu: f64 = 1e-6;
        let alpha = 2.7 * nu.powf(0.25);
        let seed = lower_branch_seed(&p, alpha) * 0.9;
        let r = solve_eigenvalue(&p, alpha, nu, seed, Method::Expansion).unwrap();
        let root = r.history.last().copied().unwrap();
        let errs: Vec<f64> = r.history.iter().map(|h| (h - root).norm()).filter(|&e| e > 1e-11).collect();
        assert!(errs.len() >= 3, "{errs:?}");
        for w in errs.windows(2).rev().take(2) {
            assert!(w[1] <= 50.0 / root.norm() * w[0] * w[0], "{errs:?}");
        }
    }

    #[test]
    fn fresh_residual_is_small() {
        let p = exp_profile();
        let nu: f64 = 1e-6;
        for method in [Method::Expansion, Method::Miles] {
            let alpha = 2.0 * nu.powf(0.25);
            let r = solve_eigenvalue(&p, alpha, nu, lower_branch_seed(&p, alpha), method).unwrap();
            let e = residual(&p, alpha, nu, r.c, method).unwrap();
            let ti = tietjens(r.z).unwrap().ti;
            assert!(e.norm() <= 1e-10 * (1.0 + ti.norm()), "{method}: {e}");
        }
    }

    #[test]
    fn conjugate_symmetry_in_alpha() {
        let p = exp_profile();
        let nu: f64 = 1e-6;
        let alpha = 0.08;
        let r = solve_eigenvalue(&p, alpha, nu, lower_branch_seed(&p, alpha), Method::Expansion).unwrap();
        let m = solve_eigenvalue(&p, -alpha, nu, lower_branch_seed(&p, alpha), Method::Expansion).unwrap();
        assert!((m.lambda - r.lambda.conj()).norm() < 1e-12);
        let e1 = residual(&p, alpha, nu, r.c, Method::Miles).unwrap();
        let e2 = residual(&p, -alpha, nu, r.c.conj(), Method::Miles).unwrap();
        assert!((e1 - e2.conj()).norm() < 1e-12);
    }

    #[test]
    fn multistart_uniqueness() {
        let p = exp_profile();
        let nu: f64 = 1e-6;
        for scaled in [1.5, 2.0, 2.5, 3.0, 3.5] {
            let alpha = scaled * nu.powf(0.25);
            let base = solve_by_continuation(&p, alpha, nu, Method::Expansion).unwrap();
            for k in 0..20 {
                let fr = 0.3 * (2.0 * (k % 5) as f64 / 4.0 - 1.0);
                let fi = 0.3 * (2.0 * (k / 5) as f64 / 3.0 - 1.0);
                let seed = c64(base.c.re * (1.0 + fr), base.c.im * (1.0 + fi));
                let r = solve_eigenvalue(&p, alpha, nu, seed, Method::Expansion).unwrap();
                assert!((r.c - base.c).norm() < 1e-8, "alpha {alpha}, seed {seed}: {} vs {}", r.c, base.c);
            }
        }
    }

    #[test]
    fn branch_continuity_and_growth_identity() {
        let p = exp_profile();
        let nu: f64 = 1e-6;
        let pts = trace_branch(&p, nu, nu.powf(0.25), (10.0 * nu.powf(1.0 / 6.0)).min(0.45), 200, Method::Expansion).unwrap();
        let mut changes = 0;
        for w in pts.windows(2) {
            assert!((w[1].c - w[0].c).norm() / w[0].c.norm() <= 0.2);
            if w[0].stability != w[1].stability {
                changes += 1;
            }
        }
        for b in &pts {
            assert!((b.lambda.re - b.alpha * b.c.im).abs() <= 1e-15 * b.alpha.max(b.c.norm()));
        }
        assert_eq!(changes, 2);
    }

    #[test]
    fn methods_agree_at_small_viscosity() {
        let p = exp_profile();
        let nu: f64 = 1e-8;
        let alpha = 2.5 * nu.powf(0.25);
        let a = solve_eigenvalue(&p, alpha, nu, lower_branch_seed(&p, alpha), Method::Expansion).unwrap();
        let b = solve_eigenvalue(&p, alpha, nu, a.c, Method::Miles).unwrap();
        assert!((a.c - b.c).norm() / b.c.norm() < 0.05, "{} vs {}", a.c, b.c);
    }

    #[test]
    fn large_z_leading_order() {
        let p = exp_profile();
        let lead = p.wall_shear() / p.uplus().powi(2);
        let mut prev = f64::INFINITY;
        for alpha in [0.02, 0.005, 0.001] {
            let th = large_z_reduction(&p, 1e-20, alpha).unwrap();
            let gap = (th - lead).norm();
            assert!(gap < prev, "alpha {alpha}: {th}");
            prev = gap;
        }
        assert!(prev < 0.05 * lead, "{prev}");
    }
}

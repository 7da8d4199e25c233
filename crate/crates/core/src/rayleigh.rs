//! Inviscid quantities near and away from the critical layer: the `Ω₀`
//! integral, Miles' Riccati variable and the boundary slope of the decaying
//! Rayleigh solution, Frobenius series at `y_c`, and the local inversion of
//! the Rayleigh operator on `P + (y − y_c) log(y − y_c) Q` data.

use crate::error::{Error, Result};
use crate::numerics::{
    adaptive_quadrature, c64, indented_contour, integrate_ode_observed, Contour, OdeSettings, PowerSeries, Side, C64,
};
use crate::profile::{critical_layer, ShearProfile};
use std::f64::consts::PI;

/// Default half-width of the detour under the critical layer.
pub const DEFAULT_RADIUS: f64 = 0.05;
const QUAD_TOL: f64 = 1e-12;

/// Truncation height for half-line integrals.
pub fn half_line_cutoff(alpha: f64) -> f64 {
    40f64.max(40.0 / alpha)
}

/// Path `0 → y_max` passing below `y_c`. When `y_c` already sits below the
/// axis the detour is widened so that it still passes underneath.
pub fn rayleigh_contour(y_c: C64, y_max: f64, radius: f64) -> Contour {
    let r = if y_c.im < 0.0 { radius.max(-2.0 * y_c.im) } else { radius };
    indented_contour(0.0, y_max, y_c, r, Side::Below)
}

/// Logarithm with its cut along the negative imaginary axis.
pub fn log_cut_down(y: C64) -> C64 {
    let mut th = y.arg();
    if th <= -PI / 2.0 {
        th += 2.0 * PI;
    }
    c64(y.norm().ln(), th)
}

fn omega0_integrand(profile: &ShearProfile, c: C64) -> impl Fn(C64) -> C64 + '_ {
    let d = profile.uplus() - c;
    let d2 = d * d;
    move |y| {
        let w = profile.u(y) - c;
        let w2 = w * w;
        w2 / d2 - d2 / w2
    }
}

/// `Ω₀(0, c)` integrated along a given contour from 0 to the cutoff.
pub fn omega0_on(profile: &ShearProfile, c: C64, contour: &Contour) -> Result<C64> {
    omega0_on_tol(profile, c, contour, QUAD_TOL)
}

pub fn omega0_on_tol(profile: &ShearProfile, c: C64, contour: &Contour, rel_tol: f64) -> Result<C64> {
    let d = profile.uplus() - c;
    let integral = adaptive_quadrature(omega0_integrand(profile, c), contour, rel_tol)?;
    Ok(-integral / (d * d))
}

/// `Ω₀(0, c)` along the default contour below the critical layer.
pub fn omega0(profile: &ShearProfile, c: C64, alpha_hint: f64) -> Result<C64> {
    omega0_with_radius(profile, c, alpha_hint, DEFAULT_RADIUS)
}

pub fn omega0_with_radius(profile: &ShearProfile, c: C64, alpha_hint: f64, radius: f64) -> Result<C64> {
    let y_c = critical_layer(profile, c)?;
    omega0_on(profile, c, &rayleigh_contour(y_c, half_line_cutoff(alpha_hint), radius))
}

/// Boundary data of the decaying Rayleigh solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayleighSlope {
    pub omega0: C64,
    /// `ψ'(0)/ψ(0)` from the small-α, small-c expansion.
    pub slope_expansion: C64,
    /// `ψ'(0)/ψ(0)` from the Riccati integration.
    pub slope_exact: C64,
    /// Riccati variable at the wall.
    pub omega_at_0: C64,
}

/// Knobs for [`miles_slope_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MilesOptions {
    pub radius: f64,
    pub settings: OdeSettings,
}

impl Default for MilesOptions {
    fn default() -> Self {
        MilesOptions { radius: DEFAULT_RADIUS, settings: OdeSettings::default() }
    }
}

/// Small-α expansion of the wall slope.
pub fn slope_expansion(profile: &ShearProfile, alpha: f64, c: C64, omega0: C64) -> C64 {
    let d2 = (profile.uplus() - c).powi(2);
    let a2 = alpha * alpha;
    -profile.wall_shear() / c - alpha / (c * c) * d2 + a2 / (c * c) * d2 * d2 * omega0
}

/// Wall slope from the Riccati variable at the wall.
pub fn slope_from_omega(profile: &ShearProfile, c: C64, omega_at_0: C64) -> C64 {
    -profile.wall_shear() / c - 1.0 / (c * c * omega_at_0)
}

/// Riccati variable at the wall, integrated down from the cutoff.
pub fn riccati_wall_value(profile: &ShearProfile, alpha: f64, c: C64, opts: &MilesOptions) -> Result<C64> {
    let y_c = critical_layer(profile, c)?;
    let contour = rayleigh_contour(y_c, half_line_cutoff(alpha), opts.radius).reversed();
    let d = profile.uplus() - c;
    let start = 1.0 / (alpha * d * d);
    let a2 = alpha * alpha;
    let rhs = |y: C64, s: &[C64], out: &mut [C64]| {
        let w = profile.u(y) - c;
        let yy = w * w;
        out[0] = a2 * yy * s[0] * s[0] - 1.0 / yy;
    };
    let out = integrate_ode_observed(rhs, &contour, &[start], &opts.settings, |y, s| {
        if s[0].norm() > 1e12 {
            Err(Error::RiccatiBlowup { at: y })
        } else {
            Ok(())
        }
    })?;
    Ok(out[0])
}

pub fn miles_slope(profile: &ShearProfile, alpha: f64, c: C64) -> Result<RayleighSlope> {
    miles_slope_with(profile, alpha, c, &MilesOptions::default())
}

pub fn miles_slope_with(profile: &ShearProfile, alpha: f64, c: C64, opts: &MilesOptions) -> Result<RayleighSlope> {
    if !(alpha > 0.0) {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {alpha}")));
    }
    let omega_at_0 = riccati_wall_value(profile, alpha, c, opts)?;
    let om0 = omega0_with_radius(profile, c, alpha, opts.radius)?;
    Ok(RayleighSlope {
        omega0: om0,
        slope_expansion: slope_expansion(profile, alpha, c, om0),
        slope_exact: slope_from_omega(profile, c, omega_at_0),
        omega_at_0,
    })
}

/// Local solutions of the Rayleigh equation at the critical layer:
/// `ψ_A = (y−y_c) P_A` and `ψ_B = P_B + κ ψ_A log(y−y_c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrobeniusSeries {
    pub center: C64,
    /// Coefficients of `P_A`.
    pub a: Vec<C64>,
    /// Coefficients of `P_B`.
    pub b: Vec<C64>,
    /// `κ = U''(y_c)/U'(y_c)`.
    pub log_coeff: C64,
    pub radius: f64,
}

impl FrobeniusSeries {
    /// `ψ_A` with its first two derivatives.
    pub fn psi_a(&self, y: C64) -> [C64; 3] {
        let mut shifted = vec![c64(0.0, 0.0)];
        shifted.extend_from_slice(&self.a);
        PowerSeries::new(self.center, shifted).eval3(y)
    }

    /// `ψ_B` with its first two derivatives.
    pub fn psi_b(&self, y: C64) -> [C64; 3] {
        let x = y - self.center;
        let l = log_cut_down(x);
        let pb = PowerSeries::new(self.center, self.b.clone()).eval3(y);
        let pa = self.psi_a(y);
        let k = self.log_coeff;
        [
            pb[0] + k * pa[0] * l,
            pb[1] + k * (pa[1] * l + pa[0] / x),
            pb[2] + k * (pa[2] * l + 2.0 * pa[1] / x - pa[0] / (x * x)),
        ]
    }
}

/// Number of zeros of `U(y_c + Y) − c` inside `|Y| < r`.
fn zeros_inside(profile: &ShearProfile, c: C64, y_c: C64, r: f64) -> i64 {
    let n = 512;
    let mut total = 0.0;
    let f = |k: usize| profile.u(y_c + C64::from_polar(r, 2.0 * PI * k as f64 / n as f64)) - c;
    let mut prev = f(0);
    for k in 1..=n {
        let cur = f(k % n);
        total += (cur / prev).arg();
        prev = cur;
    }
    (total / (2.0 * PI)).round() as i64
}

/// Half the distance from `y_c` to the next zero of `U − c`, capped at 0.5.
pub fn critical_radius(profile: &ShearProfile, c: C64, y_c: C64) -> f64 {
    if zeros_inside(profile, c, y_c, 1.0) <= 1 {
        return 0.5;
    }
    let (mut lo, mut hi) = (1e-3, 1.0);
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if zeros_inside(profile, c, y_c, mid) <= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * lo
}

/// Series coefficients for the Rayleigh operator `(U−c)(ψ''−α²ψ) − U''ψ = r`
/// about `y_c`, given the first two coefficients.
fn rayleigh_series(u: &[C64], alpha: f64, first: [C64; 2], rhs: &[C64], n: usize) -> Vec<C64> {
    let a2 = alpha * alpha;
    let w = |k: usize| ((k + 2) * (k + 1)) as f64 * u[k + 2];
    let mut p = vec![c64(0.0, 0.0); n + 1];
    p[0] = first[0];
    p[1] = first[1];
    for m in 1..n {
        let mut acc = rhs.get(m).copied().unwrap_or_default();
        for k in 0..=m {
            acc += w(k) * p[m - k];
        }
        for k in 1..=m {
            acc += a2 * u[k] * p[m - k];
        }
        for k in 2..=m {
            acc -= u[k] * (((m - k + 2) * (m - k + 1)) as f64) * p[m - k + 2];
        }
        p[m + 1] = acc / (u[1] * ((m + 1) * m) as f64);
    }
    p
}

/// Frobenius solutions with `n_terms` coefficients in each holomorphic factor.
pub fn frobenius(profile: &ShearProfile, alpha: f64, c: C64, n_terms: usize) -> Result<FrobeniusSeries> {
    if n_terms < 4 {
        return Err(Error::InvalidInput("frobenius needs at least 4 terms".into()));
    }
    let y_c = critical_layer(profile, c)?;
    let mut u = profile.taylor(y_c, n_terms + 4);
    u[0] = c64(0.0, 0.0);
    let kappa = 2.0 * u[2] / u[1];
    let p = rayleigh_series(&u, alpha, [c64(0.0, 0.0), c64(1.0, 0.0)], &[], n_terms);
    // forcing produced by the logarithmic part: −κ (U−c)/Y · (2ψ_A' − P_A)
    let t: Vec<C64> = (0..n_terms).map(|j| (2 * j + 1) as f64 * p[j + 1]).collect();
    let rhs: Vec<C64> = (0..n_terms)
        .map(|m| {
            let mut acc = c64(0.0, 0.0);
            for k in 0..=m {
                acc += u[k + 1] * t[m - k];
            }
            -kappa * acc
        })
        .collect();
    let q = rayleigh_series(&u, alpha, [c64(1.0, 0.0), c64(0.0, 0.0)], &rhs, n_terms - 1);
    Ok(FrobeniusSeries {
        center: y_c,
        a: p[1..=n_terms].to_vec(),
        b: q[..n_terms].to_vec(),
        log_coeff: kappa,
        radius: critical_radius(profile, c, y_c),
    })
}

/// Apply the Rayleigh operator to a function given with two derivatives.
pub fn rayleigh_operator(profile: &ShearProfile, alpha: f64, c: C64, y: C64, psi: [C64; 3]) -> C64 {
    (profile.u(y) - c) * (psi[2] - alpha * alpha * psi[0]) - profile.eval(y, 2) * psi[0]
}

/// Series data for the local inversion: `φ₁ = Y(U''+(U−c)α²)/(U−c)`,
/// `φ₂ = Y/(U−c)` and `YU''/(U−c)`, all about `y_c`.
struct LocalCoefficients {
    phi1: PowerSeries,
    phi2: PowerSeries,
    d: PowerSeries,
}

fn local_coefficients(profile: &ShearProfile, alpha: f64, c: C64, y_c: C64, n: usize) -> LocalCoefficients {
    let u = profile.taylor(y_c, n + 3);
    let s = PowerSeries::new(y_c, (0..n).map(|k| u[k + 1]).collect());
    let w = PowerSeries::new(y_c, (0..n).map(|k| ((k + 2) * (k + 1)) as f64 * u[k + 2]).collect());
    let one = {
        let mut v = vec![c64(0.0, 0.0); n];
        v[0] = c64(1.0, 0.0);
        PowerSeries::new(y_c, v)
    };
    let phi2 = one.div(&s);
    let d = w.div(&s);
    let mut phi1 = d.clone();
    if n > 1 {
        phi1.coeffs[1] += alpha * alpha;
    }
    let _ = c;
    LocalCoefficients { phi1, phi2, d }
}

/// Solve `Ray(φ) = P₁ + (y−y_c)log(y−y_c) Q₁` near `y_c` for
/// `φ = P + (y−y_c)log(y−y_c) Q`, normalized by `Q(y_c) = 0` and a vanishing
/// linear coefficient in `P`.
pub fn ray_local_solve(
    profile: &ShearProfile,
    alpha: f64,
    c: C64,
    rhs_p: &PowerSeries,
    rhs_q: &PowerSeries,
) -> Result<(PowerSeries, PowerSeries)> {
    let y_c = critical_layer(profile, c)?;
    let n = rhs_p.len().min(rhs_q.len());
    if n < 2 {
        return Err(Error::InvalidInput("right-hand sides need at least two coefficients".into()));
    }
    let lc = local_coefficients(profile, alpha, c, y_c, n);
    let f2q = lc.phi2.mul(&PowerSeries::new(y_c, rhs_q.coeffs[..n].to_vec()));
    let f2p = lc.phi2.mul(&PowerSeries::new(y_c, rhs_p.coeffs[..n].to_vec()));
    let mut a = vec![c64(0.0, 0.0); n];
    for k in 0..n - 1 {
        let mut acc = f2q.coeffs[k];
        for j in 0..=k {
            acc += lc.phi1.coeffs[k - j] * a[j];
        }
        a[k + 1] = acc / ((k + 1) * (k + 2)) as f64;
    }
    let d0 = lc.d.coeffs[0];
    if d0.norm() < 1e-300 {
        return Err(Error::DegenerateCriticalLayer);
    }
    let mut b = vec![c64(0.0, 0.0); n];
    b[0] = (a[0] - f2p.coeffs[0]) / d0;
    for k in 1..n - 1 {
        let mut acc = alpha * alpha * b[k - 1] + f2p.coeffs[k] - (2 * k + 1) as f64 * a[k];
        for j in 0..=k {
            acc += lc.d.coeffs[k - j] * b[j];
        }
        b[k + 1] = acc / ((k + 1) * k) as f64;
    }
    let rho = critical_radius(profile, c, y_c);
    let p = PowerSeries::new(y_c, b);
    let q = PowerSeries::new(y_c, a);
    for s in [&p, &q] {
        let total = s.norm_at(rho);
        let tail: f64 = s.coeffs.iter().enumerate().rev().take(3).map(|(k, v)| v.norm() * rho.powi(k as i32)).sum();
        if !total.is_finite() || (n > 8 && tail > 1e-3 * total.max(1e-300)) {
            return Err(Error::RadiusTooLarge { radius: rho });
        }
    }
    Ok((p, q))
}

/// The constant `K` of the bound `‖Q‖_ρ ≤ K ‖Q₁‖_ρ`, available when
/// `ρ ‖φ₁‖_ρ < 1/2`.
pub fn local_bound_constant(profile: &ShearProfile, alpha: f64, c: C64, rho: f64, n: usize) -> Result<Option<f64>> {
    let y_c = critical_layer(profile, c)?;
    let lc = local_coefficients(profile, alpha, c, y_c, n);
    if rho * lc.phi1.norm_at(rho) >= 0.5 {
        return Ok(None);
    }
    Ok(Some(rho * (lc.phi2.coeffs[0].norm() + 2.0 * lc.phi2.norm_at(rho))))
}

/// Inviscid vorticity `U''ψ/(U − c)` away from the critical layer.
pub fn vorticity_of(profile: &ShearProfile, c: C64, psi: C64, y: C64) -> Result<C64> {
    let w = profile.u(y) - c;
    if w.norm() < 1e-12 {
        return Err(Error::CriticalLayerSingularity { y });
    }
    Ok(profile.eval(y, 2) / w * psi)
}

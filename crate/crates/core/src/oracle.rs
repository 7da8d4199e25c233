//! Independent checks on the asymptotic eigenvalues: compound-matrix
//! shooting for the full Orr–Sommerfeld problem, and a Crank–Nicolson
//! time stepper for the linearized vorticity equation.

use crate::dispersion::{solve_by_continuation, Method};
use crate::error::{Error, Result};
use crate::numerics::{c64, complex_newton, linear_fit, Contour, NewtonOptions, OdeSettings, C64, I};
use crate::numerics::integrate_ode_observed;
use crate::profile::ShearProfile;

/// Far end of the shooting interval.
pub fn shooting_cutoff(alpha: f64) -> f64 {
    40f64.max(10.0 / alpha.abs())
}

/// Decay rate of the viscous far-field solution, `Re μ_f > 0`.
pub fn fast_rate(profile: &ShearProfile, alpha: f64, nu: f64, c: C64) -> C64 {
    (alpha * alpha + I * alpha / nu * (profile.uplus() - c)).sqrt()
}

fn shoot_settings() -> OdeSettings {
    OdeSettings { rel_tol: 1e-11, abs_tol: 1e-14, max_steps: 400_000 }
}

/// Wall determinant `μ_f² [ψ,ψ']/[ψ,ψ''']` of the two decaying solutions.
/// Zero exactly at an eigenvalue `c` (physical speed).
pub fn shoot_determinant(profile: &ShearProfile, alpha: f64, nu: f64, c: C64) -> Result<C64> {
    if alpha < 0.0 {
        return Ok(shoot_determinant(profile, -alpha, nu, c.conj())?.conj());
    }
    if !(alpha > 0.0 && nu > 0.0) {
        return Err(Error::InvalidInput(format!("need alpha != 0 and nu > 0, got {alpha}, {nu}")));
    }
    let mu = fast_rate(profile, alpha, nu, c);
    let a = alpha;
    let shift = a + mu;
    let y_max = shooting_cutoff(alpha);
    let init = [c64(1.0, 0.0), -shift, a * a + a * mu + mu * mu, a * mu, -a * mu * shift, a * a * mu * mu];
    let k = I * alpha / nu;
    let rhs = |y: C64, w: &[C64], d: &mut [C64]| {
        let du = profile.u(y) - c;
        let a2 = 2.0 * a * a + k * du;
        let a0 = -a.powi(4) - k * (du * a * a + profile.eval(y, 2));
        d[0] = w[1];
        d[1] = w[2] + w[3];
        d[2] = w[4] + a2 * w[1];
        d[3] = w[4];
        d[4] = w[5] - a0 * w[0] + a2 * w[3];
        d[5] = -a0 * w[1];
        for (di, wi) in d.iter_mut().zip(w) {
            *di += shift * wi;
        }
    };
    let path = Contour::segment(c64(y_max, 0.0), c64(0.0, 0.0))?;
    let out = integrate_ode_observed(rhs, &path, &init, &shoot_settings(), |_, w| {
        let n = w.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if !(1e-3..=1e3).contains(&n) {
            w.iter_mut().for_each(|v| *v /= n);
        }
        Ok(())
    })
    .map_err(|e| match e {
        Error::StepLimitExceeded { at, .. } => Error::StiffnessFailure { at: at.re },
        e => e,
    })?;
    if out[2].norm() == 0.0 {
        return Err(Error::DivisionNearZero { z: c, size: 0.0 });
    }
    Ok(mu * mu * out[0] / out[2])
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShootResult {
    pub c: C64,
    /// `|D(c)| / |D(c_seed)|`.
    pub determinant_residual: f64,
    pub mu_f: C64,
    pub y_max_used: f64,
    pub iterations: usize,
}

/// Newton on the shooting determinant from `c_seed`.
pub fn shoot_eigenvalue(profile: &ShearProfile, alpha: f64, nu: f64, c_seed: C64) -> Result<ShootResult> {
    let d_seed = shoot_determinant(profile, alpha, nu, c_seed)?.norm();
    let opts = NewtonOptions { stall_tol: 1e-9, ..NewtonOptions::default() };
    let out = complex_newton(|c| Ok((shoot_determinant(profile, alpha, nu, c)?, 1.0)), c_seed, &opts)?;
    Ok(ShootResult {
        c: out.root,
        determinant_residual: out.residual.norm() / d_seed,
        mu_f: fast_rate(profile, alpha.abs(), nu, if alpha < 0.0 { out.root.conj() } else { out.root }),
        y_max_used: shooting_cutoff(alpha),
        iterations: out.iterations,
    })
}

/// Banded LU factorization with partial pivoting.
#[derive(Debug, Clone)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<C64>,
    lower: Vec<C64>,
    piv: Vec<usize>,
}

/// Square band matrix with `kl` sub- and `ku` super-diagonals.
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<C64>,
}

impl BandMatrix {
    pub fn new(n: usize, kl: usize, ku: usize) -> BandMatrix {
        // room for fill-in from row interchanges
        let width = 2 * kl + ku + 1;
        BandMatrix { n, kl, ku, width, data: vec![C64::new(0.0, 0.0); n * width] }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.kl >= i && j <= i + self.ku + self.kl);
        i * self.width + (j + self.kl - i)
    }

    pub fn add(&mut self, i: usize, j: usize, v: C64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "entry ({i}, {j}) outside the band");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        if j + self.kl < i || j > i + self.ku + self.kl {
            C64::new(0.0, 0.0)
        } else {
            self.data[self.idx(i, j)]
        }
    }

    pub fn mul_vec(&self, x: &[C64]) -> Vec<C64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    pub fn factor(self) -> Result<BandLu> {
        let BandMatrix { n, kl, ku, width, mut data } = self;
        let at = |i: usize, j: usize| i * width + (j + kl - i);
        let mut lower = vec![C64::new(0.0, 0.0); n * kl.max(1)];
        let mut piv = vec![0; n];
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let p = (k..=last)
                .max_by(|&a, &b| data[at(a, k)].norm().total_cmp(&data[at(b, k)].norm()))
                .unwrap_or(k);
            if data[at(p, k)].norm() == 0.0 {
                return Err(Error::SingularSolve { column: k });
            }
            piv[k] = p;
            let right = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=right {
                    data.swap(at(k, j), at(p, j));
                }
            }
            let pivot = data[at(k, k)];
            for i in k + 1..=last {
                let m = data[at(i, k)] / pivot;
                lower[k * kl + (i - k - 1)] = m;
                if m != C64::new(0.0, 0.0) {
                    for j in k + 1..=right {
                        let u = data[at(k, j)];
                        data[at(i, j)] -= m * u;
                    }
                }
            }
        }
        Ok(BandLu { n, kl, ku, width, data, lower, piv })
    }
}

impl BandLu {
    pub fn solve(&self, b: &mut [C64]) {
        let (n, kl) = (self.n, self.kl);
        let at = |i: usize, j: usize| i * self.width + (j + kl - i);
        for k in 0..n {
            b.swap(k, self.piv[k]);
            let bk = b[k];
            for i in k + 1..=(k + kl).min(n - 1) {
                b[i] -= self.lower[k * kl + (i - k - 1)] * bk;
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..=(i + kl + self.ku).min(n - 1) {
                s -= self.data[at(i, j)] * b[j];
            }
            b[i] = s / self.data[at(i, i)];
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveResult {
    pub times: Vec<f64>,
    pub omega_norm: Vec<f64>,
    pub fitted_rate: f64,
    /// R² of the log-norm fit.
    pub fit_r2: f64,
    /// `α Im c` from the Riccati dispersion relation, NaN if that solve failed.
    pub predicted_rate: f64,
}

/// Time-step size used by [`evolve_semigroup`].
pub fn evolve_time_step(t_final: f64) -> f64 {
    0.5f64.min(t_final / 400.0)
}

/// Crank–Nicolson evolution of one Fourier mode of the linearized vorticity
/// equation `ω_t = −iαUω − iαU''ψ + ν(∂²−α²)ω`, `ω = −(∂²−α²)ψ`.
pub fn evolve_semigroup(
    profile: &ShearProfile,
    alpha: f64,
    nu: f64,
    t_final: f64,
    n_y: usize,
    y_max: f64,
) -> Result<EvolveResult> {
    if !(alpha > 0.0 && nu >= 0.0 && t_final > 0.0 && n_y >= 16 && y_max > 0.0) {
        return Err(Error::InvalidInput(format!(
            "need alpha > 0, nu >= 0, t_final > 0, n_y >= 16, y_max > 0; got {alpha}, {nu}, {t_final}, {n_y}, {y_max}"
        )));
    }
    let n = n_y;
    let h = y_max / n as f64;
    let dt = evolve_time_step(t_final);
    if dt * alpha * profile.uplus() > 10.0 * h {
        log::warn!("time step {dt} is large compared to the advection scale h/(αU₊) = {}", h / (alpha * profile.uplus()));
    }
    let ys: Vec<f64> = (0..=n).map(|j| j as f64 * h).collect();
    let u: Vec<C64> = ys.iter().map(|&y| profile.u(c64(y, 0.0))).collect();
    let u2: Vec<C64> = ys.iter().map(|&y| profile.eval(c64(y, 0.0), 2)).collect();
    let a2 = alpha * alpha;
    let w = |j: usize| 2 * j;
    let p = |j: usize| 2 * j + 1;
    let size = 2 * (n + 1);
    let (kl, ku) = (4, 5);
    let viscous = nu > 0.0;
    let d = nu / (h * h);

    // vorticity operator L applied at row j: (coeff on ω_{j-1}, ω_j, ω_{j+1}, ψ_j)
    let op = |j: usize| -> (C64, C64, C64, C64) {
        let diag = -I * alpha * u[j] - nu * a2 - 2.0 * d;
        (C64::new(d, 0.0), diag, C64::new(d, 0.0), -I * alpha * u2[j])
    };

    let mut m = BandMatrix::new(size, kl, ku);
    let half = 0.5 * dt;
    if viscous {
        // no-slip through the one-sided slope of ψ
        m.add(w(0), p(0), c64(-3.0, 0.0));
        m.add(w(0), p(1), c64(4.0, 0.0));
        m.add(w(0), p(2), c64(-1.0, 0.0));
    } else {
        let (_, diag, _, coup) = op(0);
        m.add(w(0), w(0), 1.0 - half * (diag + 2.0 * d));
        m.add(w(0), p(0), -half * coup);
    }
    m.add(p(0), p(0), c64(1.0, 0.0));
    for j in 1..n {
        let (lo, diag, hi, coup) = op(j);
        m.add(w(j), w(j - 1), -half * lo);
        m.add(w(j), w(j), 1.0 - half * diag);
        m.add(w(j), w(j + 1), -half * hi);
        m.add(w(j), p(j), -half * coup);
        let ih2 = 1.0 / (h * h);
        m.add(p(j), p(j - 1), c64(ih2, 0.0));
        m.add(p(j), p(j), c64(-2.0 * ih2 - a2, 0.0));
        m.add(p(j), p(j + 1), c64(ih2, 0.0));
        m.add(p(j), w(j), c64(1.0, 0.0));
    }
    if viscous {
        m.add(w(n), w(n), c64(1.0, 0.0));
    } else {
        let (_, diag, _, coup) = op(n);
        m.add(w(n), w(n), 1.0 - half * (diag + 2.0 * d));
        m.add(w(n), p(n), -half * coup);
    }
    // ψ' + αψ = 0 at the far end
    m.add(p(n), p(n), c64(1.5 / h + alpha, 0.0));
    m.add(p(n), p(n - 1), c64(-2.0 / h, 0.0));
    m.add(p(n), p(n - 2), c64(0.5 / h, 0.0));
    let lu = m.factor()?;

    // stream function y² exp(−(y−1)²/0.2) gives a vorticity bump near y = 1
    let mut x = vec![C64::new(0.0, 0.0); size];
    let psi0 = |y: f64| y * y * (-(y - 1.0).powi(2) / 0.2).exp();
    for j in 0..=n {
        x[p(j)] = c64(psi0(ys[j]), 0.0);
    }
    for j in 1..n {
        let lap = (psi0(ys[j + 1]) - 2.0 * psi0(ys[j]) + psi0(ys[j - 1])) / (h * h);
        x[w(j)] = c64(-(lap - a2 * psi0(ys[j])), 0.0);
    }
    x[w(0)] = c64(-2.0 * (-5.0f64).exp(), 0.0);

    let norm = |x: &[C64]| -> f64 { ((0..=n).map(|j| x[w(j)].norm_sqr()).sum::<f64>() * h).sqrt() };
    let steps = (t_final / dt).round() as usize;
    let mut times = vec![0.0];
    let mut norms = vec![norm(&x)];
    let mut rhs = vec![C64::new(0.0, 0.0); size];
    for s in 1..=steps {
        rhs.iter_mut().for_each(|r| *r = C64::new(0.0, 0.0));
        let range = if viscous { 1..n } else { 0..n + 1 };
        for j in range {
            let (lo, diag, hi, coup) = op(j);
            let mut l = diag * x[w(j)] + coup * x[p(j)];
            if viscous {
                l += lo * x[w(j - 1)] + hi * x[w(j + 1)];
            } else {
                l += 2.0 * d * x[w(j)];
            }
            rhs[w(j)] = x[w(j)] + half * l;
        }
        lu.solve(&mut rhs);
        std::mem::swap(&mut x, &mut rhs);
        let nx = norm(&x);
        if !nx.is_finite() {
            return Err(Error::NonFiniteState { at: c64(s as f64 * dt, 0.0) });
        }
        times.push(s as f64 * dt);
        norms.push(nx);
    }
    let start = times.partition_point(|&t| t < 0.5 * t_final);
    let logs: Vec<f64> = norms[start..].iter().map(|v| v.ln()).collect();
    let (rate, _, r2) = linear_fit(&times[start..], &logs);
    let predicted_rate = if viscous && nu < 1e-2 && alpha < 0.5 {
        solve_by_continuation(profile, alpha, nu, Method::Miles)
            .map(|r| alpha * r.c.im)
            .unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };
    Ok(EvolveResult { times, omega_norm: norms, fitted_rate: rate, fit_r2: r2, predicted_rate })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_lu_matches_dense_product() {
        let n = 40;
        let mut m = BandMatrix::new(n, 2, 3);
        for i in 0..n {
            for j in i.saturating_sub(2)..=(i + 3).min(n - 1) {
                // small diagonal forces pivoting
                let v = if i == j { c64(1e-3, 0.0) } else { c64(((i * 7 + j * 3) % 11) as f64 - 5.0, (i + j) as f64 * 0.1) };
                m.add(i, j, v);
            }
        }
        let x: Vec<C64> = (0..n).map(|i| c64(i as f64, -(i as f64) * 0.5 + 1.0)).collect();
        let mut b = m.mul_vec(&x);
        m.factor().unwrap().solve(&mut b);
        for (a, e) in b.iter().zip(&x) {
            assert!((a - e).norm() < 1e-9 * (1.0 + e.norm()), "{a} vs {e}");
        }
    }

    #[test]
    fn singular_band_is_reported() {
        let mut m = BandMatrix::new(3, 1, 1);
        m.add(0, 0, c64(1.0, 0.0));
        m.add(2, 2, c64(1.0, 0.0));
        assert!(matches!(m.factor(), Err(Error::SingularSolve { column: 1 })));
    }

    #[test]
    fn fast_rate_decays() {
        let p = ShearProfile::exponential();
        for c in [c64(0.1, 0.01), c64(0.3, -0.05), c64(0.05, 0.0)] {
            assert!(fast_rate(&p, 0.1, 1e-5, c).re > 0.0);
        }
    }

    #[test]
    fn determinant_conjugate_symmetry() {
        let p = ShearProfile::exponential();
        let (alpha, nu, c) = (0.15, 1e-5, c64(0.13, 0.003));
        let d = shoot_determinant(&p, alpha, nu, c).unwrap();
        let m = shoot_determinant(&p, -alpha, nu, c.conj()).unwrap();
        assert!((m - d.conj()).norm() <= 1e-8 * d.norm().max(1e-300));
    }

    #[test]
    fn shooting_agrees_with_riccati_relation() {
        let p = ShearProfile::exponential();
        let nu: f64 = 1e-5;
        let alpha = 2.7 * nu.powf(0.25);
        let asym = solve_by_continuation(&p, alpha, nu, Method::Miles).unwrap();
        let d0 = shoot_determinant(&p, alpha, nu, asym.c).unwrap().norm();
        let d1 = shoot_determinant(&p, alpha, nu, asym.c * 1.2).unwrap().norm();
        assert!(d0 / d1 <= 0.2, "{d0} / {d1}");
        let s = shoot_eigenvalue(&p, alpha, nu, asym.c).unwrap();
        assert!((s.c - asym.c).norm() / s.c.norm() <= 0.05, "{} vs {}", s.c, asym.c);
        assert!(s.mu_f.re > 0.0);
        assert!(s.determinant_residual <= 1e-9, "{}", s.determinant_residual);
    }

    #[test]
    fn shooting_against_chebyshev_reference() {
        // eigenvalue from an independent Chebyshev collocation of the full problem
        let p = ShearProfile::exponential();
        let nu: f64 = 1e-5;
        let alpha = 2.7 * nu.powf(0.25);
        let s = shoot_eigenvalue(&p, alpha, nu, c64(0.13, 0.0)).unwrap();
        let reference = c64(0.132994, 0.002564);
        assert!((s.c - reference).norm() < 2e-5, "{}", s.c);
    }

    #[test]
    fn inviscid_evolution_does_not_grow() {
        let p = ShearProfile::exponential();
        let r = evolve_semigroup(&p, 0.3, 0.0, 400.0, 800, 40.0).unwrap();
        assert!(r.fitted_rate.abs() <= 1e-3, "{}", r.fitted_rate);
        assert!(r.predicted_rate.is_nan());
    }
}

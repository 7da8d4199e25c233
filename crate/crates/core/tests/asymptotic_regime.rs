//! Behaviour deep in the small-viscosity limit, and time-stepping against the
//! dispersion relation where a clean unstable mode exists.

use oswave::dispersion::{marginal_curves, solve_by_continuation, Method, LOWER_BRANCH_ALPHA4_OVER_NU, LOWER_BRANCH_SPEED_RATIO};
use oswave::oracle::{evolve_semigroup, shoot_eigenvalue};
use oswave::profile::ShearProfile;
use std::f64::consts::PI;

#[test]
fn neutral_constants_recovered_at_tiny_viscosity() {
    let p = ShearProfile::exponential();
    let nu = 1e-14;
    let m = marginal_curves(&p, nu, Method::Expansion).unwrap();
    let q = m.alpha_minus.powi(4) / nu;
    let s = m.c_minus.re / m.alpha_minus;
    let upper = m.alpha_plus.powi(-6) * nu / (2.0 * PI * PI);
    println!("nu = 1e-14: alpha^4/nu = {q:.4}, c/alpha = {s:.4}, upper invariant = {upper:.4}");
    assert!((q / LOWER_BRANCH_ALPHA4_OVER_NU - 1.0).abs() <= 0.03);
    assert!((s / LOWER_BRANCH_SPEED_RATIO - 1.0).abs() <= 0.01);
    assert!((upper - 1.0).abs() <= 0.15);
}

#[test]
fn lower_branch_constants_approach_limit_monotonically() {
    let p = ShearProfile::exponential();
    let gaps: Vec<f64> = [1e-6, 1e-8, 1e-10]
        .iter()
        .map(|&nu| {
            let m = marginal_curves(&p, nu, Method::Miles).or_else(|_| marginal_curves(&p, nu, Method::Expansion)).unwrap();
            (m.alpha_minus.powi(4) / nu - LOWER_BRANCH_ALPHA4_OVER_NU).abs()
        })
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}

#[test]
fn no_unstable_window_at_large_viscosity() {
    // at ν = 1e-4 both the Riccati relation and shooting put the would-be
    // most unstable wavenumber on the decaying side
    let p = ShearProfile::exponential();
    let nu: f64 = 1e-4;
    let alpha = 2.7 * nu.powf(0.25);
    let e = solve_by_continuation(&p, alpha, nu, Method::Miles).unwrap();
    let s = shoot_eigenvalue(&p, alpha, nu, e.c).unwrap();
    assert!(e.c.im < 0.0 && s.c.im < 0.0, "{} {}", e.c, s.c);
    assert!(marginal_curves(&p, nu, Method::Miles).is_err());
}

#[test]
fn evolution_growth_matches_eigenvalue() {
    let p = ShearProfile::exponential();
    let nu: f64 = 1e-5;
    let alpha = 2.7 * nu.powf(0.25);
    let expected = solve_by_continuation(&p, alpha, nu, Method::Miles).unwrap();
    let rate = expected.alpha * expected.c.im;
    let r = evolve_semigroup(&p, alpha, nu, 4000.0, 16000, 40.0).unwrap();
    println!("fitted {:.4e} (R^2 {:.4}), alpha Im c {rate:.4e}", r.fitted_rate, r.fit_r2);
    assert!(r.fitted_rate > 0.0);
    assert!((r.fitted_rate / rate - 1.0).abs() <= 0.2);
    assert!(r.fit_r2 > 0.99);
}

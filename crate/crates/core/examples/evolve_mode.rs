//! Short time integration of one Fourier mode with the fitted decay or growth rate.
use oswave::oracle::evolve_semigroup;
use oswave::profile::ShearProfile;

fn main() -> oswave::Result<()> {
    let p = ShearProfile::exponential();
    let r = evolve_semigroup(&p, 0.27, 1e-4, 400.0, 1000, 40.0)?;
    for (t, w) in r.times.iter().zip(&r.omega_norm).step_by(40) {
        println!("t {t:>7.1}  |omega| {w:.6e}");
    }
    println!("fitted rate {:.4e} (R^2 {:.3}), predicted {:.4e}", r.fitted_rate, r.fit_r2, r.predicted_rate);
    Ok(())
}

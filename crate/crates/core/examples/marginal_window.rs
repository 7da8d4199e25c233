//! Lower and upper neutral wavenumbers across viscosities.
use oswave::dispersion::{marginal_curves, Method};
use oswave::profile::ShearProfile;

fn main() -> oswave::Result<()> {
    let p = ShearProfile::exponential();
    println!("{:>8} {:>12} {:>12} {:>14} {:>12}", "nu", "alpha-", "alpha+", "alpha-^4/nu", "c-/alpha-");
    for nu in [1e-6, 1e-8, 1e-10, 1e-12] {
        let method = if nu > 1e-9 { Method::Miles } else { Method::Expansion };
        match marginal_curves(&p, nu, method) {
            Ok(m) => println!(
                "{nu:>8.0e} {:>12.6} {:>12.6} {:>14.4} {:>12.4}",
                m.alpha_minus,
                m.alpha_plus,
                m.alpha_minus.powi(4) / nu,
                m.c_minus.re / m.alpha_minus
            ),
            Err(e) => println!("{nu:>8.0e} {e}"),
        }
    }
    Ok(())
}

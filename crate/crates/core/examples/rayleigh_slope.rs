//! Inviscid wall slope: small-α expansion against the Riccati integration.
use oswave::numerics::c64;
use oswave::profile::ShearProfile;
use oswave::rayleigh::miles_slope;

fn main() -> oswave::Result<()> {
    let p = ShearProfile::exponential();
    let c = c64(0.1, 0.05);
    for alpha in [0.04, 0.02, 0.01, 0.005] {
        let s = miles_slope(&p, alpha, c)?;
        println!(
            "alpha {alpha:<6} Omega0 {:.6}  expansion {:.8}  exact {:.8}  gap {:.2e}",
            s.omega0,
            s.slope_expansion,
            s.slope_exact,
            (s.slope_exact - s.slope_expansion).norm()
        );
    }
    Ok(())
}

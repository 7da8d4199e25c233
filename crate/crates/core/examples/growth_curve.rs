//! Branch trace and growth curve inside the unstable window.
use oswave::dispersion::{growth_curve, trace_branch, window_scan_range, Method};
use oswave::profile::ShearProfile;

fn main() -> oswave::Result<()> {
    let p = ShearProfile::exponential();
    let nu = 1e-7;
    let (lo, hi) = window_scan_range(nu);
    let branch = trace_branch(&p, nu, lo, hi, 12, Method::Miles)?;
    for b in &branch {
        println!("alpha {:.5}  c {:.6}  {:?}", b.alpha, b.c, b.stability);
    }
    let g = growth_curve(&p, nu, 40, Method::Miles)?;
    println!("max Re lambda {:.4e} at alpha/nu^(1/4) = {:.3}", g.max_re_lambda, g.argmax_alpha_scaled);
    Ok(())
}

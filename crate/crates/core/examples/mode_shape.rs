//! Unstable mode near the lower branch, printed at a few heights.
use oswave::dispersion::{solve_by_continuation, Method};
use oswave::modes::build_mode;
use oswave::profile::ShearProfile;

fn main() -> oswave::Result<()> {
    let p = ShearProfile::exponential();
    let nu: f64 = 1e-6;
    let e = solve_by_continuation(&p, 1.5 * nu.powf(0.25), nu, Method::Miles)?;
    let m = build_mode(&p, &e, 60.0, 600)?;
    let step = m.y_grid.len() / 15;
    for k in (0..m.y_grid.len()).step_by(step.max(1)) {
        println!("y {:>8.4}  |psi| {:.4e}  |u| {:.4e}  |omega| {:.4e}", m.y_grid[k], m.psi[k].norm(), m.u[k].norm(), m.omega[k].norm());
    }
    Ok(())
}

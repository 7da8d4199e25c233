//! Langer coordinate, modified Airy function and fast-solution wall data.
use oswave::langer::{fast_boundary_values, LangerMap};
use oswave::numerics::c64;
use oswave::profile::{ShearProfile, WaveContext};

fn main() -> oswave::Result<()> {
    let p = ShearProfile::exponential();
    let ctx = WaveContext::from_modified(&p, 0.0316, 1e-6, c64(0.0696, -0.0054))?;
    let m = LangerMap::new(&p, ctx);
    for y in [0.0, 0.05, 0.2, 1.0] {
        let y = c64(y, 0.0);
        println!("y {:<5} g {:.6}  f {:.6}  Ai_a {:.6e}", y.re, m.g(y)?, m.f(y)?, m.modified_airy(y)?);
    }
    let fb = fast_boundary_values(&ctx)?;
    println!("phi_f(0) {:.6}  phi_f'(0) {:.6}  ratio {:.6}", fb.phi_f0, fb.dphi_f0, fb.ratio);
    Ok(())
}

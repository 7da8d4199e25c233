//! Two-term profile, its critical layer and the wave context at a sample c.
use oswave::numerics::c64;
use oswave::profile::{critical_layer, ShearProfile, WaveContext};

fn main() -> oswave::Result<()> {
    let p = ShearProfile::from_json(r#"{"uplus":1.0,"terms":[{"a":0.7,"b":1.0},{"a":0.3,"b":2.0}]}"#)?;
    println!("U'(0) = {}, U''(0) = {}, beta = {}", p.wall_shear(), p.wall_curvature(), p.beta());
    let c = c64(0.07, 0.002);
    println!("y_c({c}) = {:.8}", critical_layer(&p, c)?);
    let ctx = WaveContext::new(&p, 0.03, 1e-6, c)?;
    println!("c~ = {:.6}, gamma = {:.4}, z = {:.4}", ctx.c_tilde, ctx.gamma, ctx.z);
    Ok(())
}

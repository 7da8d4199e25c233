//! One eigenvalue with each dispersion relation and the shooting oracle.
use oswave::dispersion::{solve_by_continuation, Method};
use oswave::oracle::shoot_eigenvalue;
use oswave::profile::ShearProfile;

fn main() -> oswave::Result<()> {
    let p = ShearProfile::exponential();
    let nu: f64 = 1e-6;
    let alpha = 2.5 * nu.powf(0.25);
    for m in [Method::Expansion, Method::Miles] {
        let e = solve_by_continuation(&p, alpha, nu, m)?;
        println!("{m:<9} c = {:.8}  Re lambda = {:.4e}  ({} Newton steps)", e.c, e.lambda.re, e.iterations);
    }
    let seed = solve_by_continuation(&p, alpha, nu, Method::Miles)?.c;
    let s = shoot_eigenvalue(&p, alpha, nu, seed)?;
    println!("shooting  c = {:.8}", s.c);
    Ok(())
}

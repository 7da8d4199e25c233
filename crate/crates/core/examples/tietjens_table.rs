//! Airy family at a complex point and the Tietjens function on the real axis.
use oswave::numerics::c64;
use oswave::specfun::{airy_eval, tietjens, tietjens_root};

fn main() -> oswave::Result<()> {
    let z = c64(-2.0, 1.0);
    let b = airy_eval(z);
    println!("Ai({z}) = {:.10}, Bi = {:.10}, Ci = {:.10}", b.ai, b.bi, b.ci);

    let root = tietjens_root()?;
    println!("real root z0 = {:.6}, Ti(z0) = {:.5}, Ti'(z0) = {:.5}", root.z0, root.ti, root.ti_prime);
    for z in [0.5, 1.0, 2.0, root.z0, 3.0, 5.0, 10.0] {
        let t = tietjens(c64(z, 0.0))?;
        println!("Ti({z:.4}) = {:.6}", t.ti);
    }
    Ok(())
}

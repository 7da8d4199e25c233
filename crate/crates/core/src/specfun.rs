//! Complex Airy functions, their first two primitives, and the Tietjens
//! function built from them.
//!
//! The primitives are normalized so that they vanish as `z → +∞` along the
//! positive real axis: `ai1(z) = −∫_z^∞ Ai`, `ai2(z) = −∫_z^∞ ai1`.

use crate::error::{Error, Result};
use crate::numerics::{c64, C64};
use std::f64::consts::{FRAC_PI_3, PI};

/// Ai(0).
pub const AI0: f64 = 0.355_028_053_887_817_239_26;
/// Ai'(0).
pub const AIP0: f64 = -0.258_819_403_792_806_798_41;

const SERIES_RADIUS: f64 = 2.5;
const ASYMPTOTIC_RADIUS: f64 = 12.0;
const MAX_TERMS: usize = 400;

/// Airy family at one complex point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AiryBundle {
    pub ai: C64,
    pub ai_prime: C64,
    pub ai1: C64,
    pub ai2: C64,
    pub bi: C64,
    pub bi_prime: C64,
    pub ci: C64,
}

#[derive(Debug, Clone, Copy)]
struct Core {
    ai: C64,
    aip: C64,
    ai1: C64,
}

fn omega() -> C64 {
    C64::from_polar(1.0, 2.0 * PI / 3.0)
}

/// Advance (Ai, Ai', ai1) from `z0` by `h` with a Taylor series built from
/// `w'' = z w`.
fn taylor_step(z0: C64, s: Core, h: C64) -> Core {
    // rolling window c_n, c_{n+1}, c_{n+2}
    let (mut c0, mut c1, mut c2) = (s.ai, s.aip, z0 * s.ai / 2.0);
    let mut w = C64::new(0.0, 0.0);
    let mut wp = C64::new(0.0, 0.0);
    let mut p = s.ai1;
    let mut hn = C64::new(1.0, 0.0);
    let mut small = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        let t = c0 * hn;
        let tp = (nf + 1.0) * c1 * hn;
        w += t;
        wp += tp;
        p += t * h / (nf + 1.0);
        let scale = w.norm() + wp.norm() + p.norm();
        if t.norm() + tp.norm() <= 1e-17 * scale {
            small += 1;
            if small >= 3 && n > 8 {
                break;
            }
        } else {
            small = 0;
        }
        let c3 = (z0 * c1 + c0) / ((nf + 3.0) * (nf + 2.0));
        c0 = c1;
        c1 = c2;
        c2 = c3;
        hn *= h;
    }
    Core { ai: w, aip: wp, ai1: p }
}

fn maclaurin(z: C64) -> Core {
    let origin = Core { ai: c64(AI0, 0.0), aip: c64(AIP0, 0.0), ai1: c64(-1.0 / 3.0, 0.0) };
    if z.norm() == 0.0 {
        return origin;
    }
    taylor_step(c64(0.0, 0.0), origin, z)
}

/// March radially from `from` to `to` (same ray) in Taylor steps.
fn march(mut z0: C64, mut s: Core, to: C64) -> Core {
    loop {
        let rem = to - z0;
        let dist = rem.norm();
        if dist == 0.0 {
            return s;
        }
        let hmax = (1.5 / z0.norm().max(1.0).sqrt()).min(0.6);
        let h = if dist <= hmax { rem } else { rem * (hmax / dist) };
        s = taylor_step(z0, s, h);
        z0 += h;
        if dist <= hmax {
            return s;
        }
    }
}

/// Large-|z| expansions, valid for |arg z| ≤ 2π/3.
fn asymptotic_direct(z: C64) -> Core {
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let q = 1.0 / zeta;
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let z14 = z.powf(0.25);
    let mut u = 1.0f64;
    let mut sa = c64(1.0, 0.0);
    let mut sp = c64(1.0, 0.0);
    let mut s1 = c64(1.0, 0.0);
    let mut b_prev = 1.0f64;
    let mut qk = c64(1.0, 0.0);
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let b = sign * u - (kf - 0.5) * b_prev;
        b_prev = b;
        qk *= q;
        let ta = sign * u * qk;
        let size = ta.norm().max((b * qk).norm());
        if size > last {
            break;
        }
        last = size;
        sa += ta;
        sp += sign * v * qk;
        s1 += b * qk;
        if size < 1e-17 {
            break;
        }
    }
    Core { ai: e / z14 * sa, aip: -e * z14 * sp, ai1: -e / (z14 * z14 * z14) * s1 }
}

fn asymptotic(z: C64) -> Core {
    if z.arg().abs() <= 2.0 * PI / 3.0 {
        return asymptotic_direct(z);
    }
    let w = omega();
    let w2 = w * w;
    let a = asymptotic_direct(w * z);
    let b = asymptotic_direct(w2 * z);
    Core {
        ai: -w * a.ai - w2 * b.ai,
        aip: -w2 * a.aip - w * b.aip,
        ai1: -1.0 - a.ai1 - b.ai1,
    }
}

fn core_upper(z: C64) -> Core {
    let r = z.norm();
    if r <= SERIES_RADIUS {
        return maclaurin(z);
    }
    if r >= ASYMPTOTIC_RADIUS {
        return asymptotic(z);
    }
    let dir = z / r;
    if z.arg().abs() <= FRAC_PI_3 {
        let far = dir * ASYMPTOTIC_RADIUS;
        march(far, asymptotic(far), z)
    } else {
        let near = dir * SERIES_RADIUS;
        march(near, maclaurin(near), z)
    }
}

fn core(z: C64) -> Core {
    if z.im >= 0.0 {
        core_upper(z)
    } else {
        let c = core_upper(z.conj());
        Core { ai: c.ai.conj(), aip: c.aip.conj(), ai1: c.ai1.conj() }
    }
}

/// Ai and Ai' only.
pub fn airy_ai(z: C64) -> (C64, C64) {
    let c = core(z);
    (c.ai, c.aip)
}

/// First and second primitives of Ai.
pub fn airy_primitives(z: C64) -> (C64, C64) {
    let c = core(z);
    (c.ai1, -c.aip + z * c.ai1)
}

/// Ai, Ai', both primitives, Bi, Bi' and Ci at `z`.
pub fn airy_eval(z: C64) -> AiryBundle {
    let c = core(z);
    let w = omega();
    let p = core(w * z);
    let m = core(w.conj() * z);
    let e6 = C64::from_polar(1.0, PI / 6.0);
    let e56 = C64::from_polar(1.0, 5.0 * PI / 6.0);
    let bi = e6 * p.ai + e6.conj() * m.ai;
    let bi_prime = e56 * p.aip + e56.conj() * m.aip;
    AiryBundle {
        ai: c.ai,
        ai_prime: c.aip,
        ai1: c.ai1,
        ai2: -c.aip + z * c.ai1,
        bi,
        bi_prime,
        ci: c64(0.0, -PI) * (c.ai + c64(0.0, 1.0) * bi),
    }
}

/// Value of the Tietjens function together with its Airy argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TietjensValue {
    pub z: C64,
    pub ti: C64,
    pub xi1: C64,
}

/// The Airy argument `−i^{1/3} z` paired with `z` in the Tietjens function.
pub fn tietjens_argument(z: C64) -> C64 {
    -C64::from_polar(1.0, PI / 6.0) * z
}

/// Ti(z) = ai2(ξ) / (ξ · ai1(ξ)) with ξ = −e^{iπ/6} z.
pub fn tietjens(z: C64) -> Result<TietjensValue> {
    let xi1 = tietjens_argument(z);
    let (a1, a2) = airy_primitives(xi1);
    let den = xi1 * a1;
    if den.norm() < 1e-300 {
        return Err(Error::DivisionNearZero { z, size: den.norm() });
    }
    Ok(TietjensValue { z, ti: a2 / den, xi1 })
}

/// The real point where Ti is real, with Ti and Ti' there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TietjensRoot {
    pub z0: f64,
    pub ti: C64,
    pub ti_prime: C64,
}

/// Bisection for the root of Im Ti on [1.5, 3.5].
pub fn tietjens_root() -> Result<TietjensRoot> {
    let (mut lo, mut hi) = (1.5f64, 3.5f64);
    let im = |x: f64| tietjens(c64(x, 0.0)).map(|t| t.ti.im);
    let mut flo = im(lo)?;
    let fhi = im(hi)?;
    if flo * fhi > 0.0 {
        return Err(Error::BracketFailure { lo, hi });
    }
    while hi - lo > 1e-11 {
        let mid = 0.5 * (lo + hi);
        let fm = im(mid)?;
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    let z0 = 0.5 * (lo + hi);
    let h = 1e-5;
    let ti = tietjens(c64(z0, 0.0))?.ti;
    let ti_prime = (tietjens(c64(z0 + h, 0.0))?.ti - tietjens(c64(z0 - h, 0.0))?.ti) / (2.0 * h);
    Ok(TietjensRoot { z0, ti, ti_prime })
}

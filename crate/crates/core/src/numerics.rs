//! Contours in the complex height plane, a Dormand–Prince 5(4) integrator
//! that runs along them, and adaptive Gauss–Kronrod quadrature.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::collections::BinaryHeap;

pub type C64 = Complex64;

/// Shorthand constructor.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

/// One piece of a contour, parametrized by arclength.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Line { from: C64, to: C64 },
    /// Circular arc; angles in radians, traversed from `start` to `end`.
    Arc { center: C64, radius: f64, start: f64, end: f64 },
}

impl Segment {
    pub fn length(&self) -> f64 {
        match *self {
            Segment::Line { from, to } => (to - from).norm(),
            Segment::Arc { radius, start, end, .. } => radius * (end - start).abs(),
        }
    }

    /// Point at arclength `s` from the segment start.
    pub fn point(&self, s: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => {
                let len = (to - from).norm();
                from + (to - from) * (s / len)
            }
            Segment::Arc { center, radius, start, end } => {
                let th = start + (end - start).signum() * s / radius;
                center + C64::from_polar(radius, th)
            }
        }
    }

    /// Unit tangent dz/ds at arclength `s`.
    pub fn tangent(&self, s: f64) -> C64 {
        match *self {
            Segment::Line { from, to } => (to - from) / (to - from).norm(),
            Segment::Arc { radius, start, end, .. } => {
                let dir = (end - start).signum();
                let th = start + dir * s / radius;
                I * C64::from_polar(dir, th)
            }
        }
    }

    pub fn start(&self) -> C64 {
        self.point(0.0)
    }

    pub fn end(&self) -> C64 {
        self.point(self.length())
    }

    pub fn reversed(&self) -> Segment {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: to, to: from },
            Segment::Arc { center, radius, start, end } => {
                Segment::Arc { center, radius, start: end, end: start }
            }
        }
    }

    fn conj(&self) -> Segment {
        match *self {
            Segment::Line { from, to } => Segment::Line { from: from.conj(), to: to.conj() },
            Segment::Arc { center, radius, start, end } => {
                Segment::Arc { center: center.conj(), radius, start: -start, end: -end }
            }
        }
    }
}

/// Piecewise path through the complex plane made of lines and arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct Contour {
    segments: Vec<Segment>,
}

/// Which side of a singularity an indented contour passes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

impl Contour {
    /// Polyline through the given waypoints.
    pub fn polyline(points: &[C64]) -> Result<Contour> {
        if points.len() < 2 {
            return Err(Error::InvalidInput("contour needs at least two waypoints".into()));
        }
        let mut segments = Vec::with_capacity(points.len() - 1);
        for w in points.windows(2) {
            if (w[1] - w[0]).norm() == 0.0 || !(w[1] - w[0]).norm().is_finite() {
                return Err(Error::InvalidInput("consecutive waypoints must be distinct".into()));
            }
            segments.push(Segment::Line { from: w[0], to: w[1] });
        }
        Ok(Contour { segments })
    }

    pub fn segment(a: C64, b: C64) -> Result<Contour> {
        Contour::polyline(&[a, b])
    }

    pub fn from_segments(segments: Vec<Segment>) -> Result<Contour> {
        if segments.is_empty() || segments.iter().any(|s| !(s.length() > 0.0)) {
            return Err(Error::InvalidInput("contour segments must have positive length".into()));
        }
        Ok(Contour { segments })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// Start point, segment junctions and end point.
    pub fn waypoints(&self) -> Vec<C64> {
        let mut pts = vec![self.segments[0].start()];
        pts.extend(self.segments.iter().map(|s| s.end()));
        pts
    }

    pub fn start(&self) -> C64 {
        self.segments[0].start()
    }

    pub fn end(&self) -> C64 {
        self.segments[self.segments.len() - 1].end()
    }

    pub fn length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    /// Same path, opposite orientation.
    pub fn reversed(&self) -> Contour {
        Contour { segments: self.segments.iter().rev().map(Segment::reversed).collect() }
    }

    /// Mirror image under complex conjugation.
    pub fn conj(&self) -> Contour {
        Contour { segments: self.segments.iter().map(Segment::conj).collect() }
    }

    /// Path followed by `other`; `other` must start where `self` ends.
    pub fn then(&self, other: &Contour) -> Contour {
        let mut segments = self.segments.clone();
        segments.extend_from_slice(&other.segments);
        Contour { segments }
    }

    /// Split at the junction after segment `k` (1 ≤ k < number of segments).
    pub fn split_at(&self, k: usize) -> (Contour, Contour) {
        assert!(k >= 1 && k < self.segments.len());
        (
            Contour { segments: self.segments[..k].to_vec() },
            Contour { segments: self.segments[k..].to_vec() },
        )
    }
}

/// Straight path `a → b` with a semicircular detour around `Re singularity`
/// when the singularity lies closer than `radius` to the real axis.
pub fn indented_contour(a: f64, b: f64, singularity: C64, radius: f64, side: Side) -> Contour {
    let x = singularity.re;
    let straight = || Contour { segments: vec![Segment::Line { from: a.into(), to: b.into() }] };
    if singularity.im.abs() >= radius || x + radius <= a || x - radius >= b {
        return straight();
    }
    let left = x - radius;
    let right = x + radius;
    let center = C64::new(x, 0.0);
    let (start, end) = match side {
        Side::Below => (std::f64::consts::PI, 2.0 * std::f64::consts::PI),
        Side::Above => (std::f64::consts::PI, 0.0),
    };
    let mut segments = Vec::new();
    if left != a {
        segments.push(Segment::Line { from: a.into(), to: left.into() });
    }
    segments.push(Segment::Arc { center, radius, start, end });
    if right != b {
        segments.push(Segment::Line { from: right.into(), to: b.into() });
    }
    Contour { segments }
}

/// Tolerances for [`integrate_ode`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for OdeSettings {
    fn default() -> Self {
        OdeSettings { rel_tol: 1e-10, abs_tol: 1e-12, max_steps: 200_000 }
    }
}

impl OdeSettings {
    pub fn new(rel_tol: f64, abs_tol: f64, max_steps: usize) -> Result<OdeSettings> {
        if !(rel_tol > 0.0 && abs_tol > 0.0 && max_steps >= 1) {
            return Err(Error::InvalidInput("ODE tolerances must be positive".into()));
        }
        Ok(OdeSettings { rel_tol, abs_tol, max_steps })
    }
}

// Dormand–Prince 5(4) tableau
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

/// Integrate `ds/dz = rhs(z, s)` along `contour` from its start to its end.
pub fn integrate_ode<F>(rhs: F, contour: &Contour, initial: &[C64], settings: &OdeSettings) -> Result<Vec<C64>>
where
    F: FnMut(C64, &[C64], &mut [C64]),
{
    integrate_ode_observed(rhs, contour, initial, settings, |_, _| Ok(()))
}

/// Like [`integrate_ode`], but calls `observer(z, state)` after every
/// accepted step. The observer may rescale the state in place or abort.
pub fn integrate_ode_observed<F, O>(
    mut rhs: F,
    contour: &Contour,
    initial: &[C64],
    settings: &OdeSettings,
    mut observer: O,
) -> Result<Vec<C64>>
where
    F: FnMut(C64, &[C64], &mut [C64]),
    O: FnMut(C64, &mut [C64]) -> Result<()>,
{
    let n = initial.len();
    let mut y = initial.to_vec();
    let mut k = vec![vec![C64::new(0.0, 0.0); n]; 7];
    let mut tmp = vec![C64::new(0.0, 0.0); n];
    let mut y_new = vec![C64::new(0.0, 0.0); n];
    let mut steps = 0usize;
    let mut h = 0.0f64;
    let mut err_prev = 1e-4f64;

    for seg in contour.segments() {
        let len = seg.length();
        let mut s = 0.0;
        // derivative with respect to arclength
        let mut eval = |s: f64, state: &[C64], out: &mut [C64]| {
            let z = seg.point(s);
            let t = seg.tangent(s);
            rhs(z, state, out);
            for o in out.iter_mut() {
                *o *= t;
            }
        };
        if h == 0.0 {
            eval(s, &y, &mut k[0]);
            let d0 = scaled_norm(&y, &y, settings);
            let d1 = scaled_norm(&k[0], &y, settings);
            h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
            h = h.min(len);
        }
        while s < len {
            if steps >= settings.max_steps {
                return Err(Error::StepLimitExceeded { steps, at: seg.point(s) });
            }
            let last = s + h >= len * (1.0 - 1e-12);
            let hh = if last { len - s } else { h };
            eval(s, &y, &mut k[0]);
            stage(&y, hh, &[(A21, &k[0])], &mut tmp);
            let (k0, rest) = k.split_at_mut(1);
            eval(s + C2 * hh, &tmp, &mut rest[0]);
            stage(&y, hh, &[(A31, &k0[0]), (A32, &rest[0])], &mut tmp);
            eval(s + C3 * hh, &tmp, &mut rest[1]);
            stage(&y, hh, &[(A41, &k0[0]), (A42, &rest[0]), (A43, &rest[1])], &mut tmp);
            eval(s + C4 * hh, &tmp, &mut rest[2]);
            stage(&y, hh, &[(A51, &k0[0]), (A52, &rest[0]), (A53, &rest[1]), (A54, &rest[2])], &mut tmp);
            eval(s + C5 * hh, &tmp, &mut rest[3]);
            stage(
                &y,
                hh,
                &[(A61, &k0[0]), (A62, &rest[0]), (A63, &rest[1]), (A64, &rest[2]), (A65, &rest[3])],
                &mut tmp,
            );
            eval(s + hh, &tmp, &mut rest[4]);
            stage(
                &y,
                hh,
                &[(B1, &k0[0]), (B3, &rest[1]), (B4, &rest[2]), (B5, &rest[3]), (B6, &rest[4])],
                &mut y_new,
            );
            eval(s + hh, &y_new, &mut rest[5]);
            let mut err = 0.0;
            for i in 0..n {
                let e = hh
                    * (E1 * k0[0][i] + E3 * rest[1][i] + E4 * rest[2][i] + E5 * rest[3][i] + E6 * rest[4][i]
                        + E7 * rest[5][i]);
                let sc = settings.abs_tol + settings.rel_tol * y[i].norm().max(y_new[i].norm());
                err += (e.norm() / sc).powi(2);
            }
            err = (err / n as f64).sqrt();
            steps += 1;
            if !err.is_finite() || y_new.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                if hh < 1e-14 * len.max(1.0) {
                    return Err(Error::NonFiniteState { at: seg.point(s) });
                }
                h = hh * 0.1;
                continue;
            }
            if err <= 1.0 {
                s = if last { len } else { s + hh };
                std::mem::swap(&mut y, &mut y_new);
                observer(seg.point(s), &mut y)?;
                // PI controller
                let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
                h = hh * fac.clamp(0.2, 5.0);
                err_prev = err.max(1e-4);
                if last {
                    h = h.max(hh);
                }
            } else {
                h = hh * (0.9 * err.powf(-0.2)).max(0.2);
                if h < 1e-15 * len.max(1.0) {
                    return Err(Error::StepLimitExceeded { steps, at: seg.point(s) });
                }
            }
        }
    }
    Ok(y)
}

fn stage(y: &[C64], h: f64, terms: &[(f64, &Vec<C64>)], out: &mut [C64]) {
    for i in 0..y.len() {
        let mut acc = C64::new(0.0, 0.0);
        for (a, kv) in terms {
            acc += *a * kv[i];
        }
        out[i] = y[i] + h * acc;
    }
}

fn scaled_norm(v: &[C64], y: &[C64], settings: &OdeSettings) -> f64 {
    let s: f64 = v
        .iter()
        .zip(y)
        .map(|(a, b)| (a.norm() / (settings.abs_tol + settings.rel_tol * b.norm())).powi(2))
        .sum();
    (s / v.len() as f64).sqrt()
}

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

const MAX_INTERVALS: usize = 4000;

struct Piece {
    seg: usize,
    lo: f64,
    hi: f64,
    value: C64,
    error: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk21<F: FnMut(C64) -> C64>(f: &mut F, seg: &Segment, lo: f64, hi: f64) -> (C64, f64) {
    let half = 0.5 * (hi - lo);
    let mid = 0.5 * (hi + lo);
    let g = |f: &mut F, s: f64| f(seg.point(s)) * seg.tangent(s);
    let fc = g(f, mid);
    let mut kron = fc * WGK[10];
    let mut gauss = C64::new(0.0, 0.0);
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = g(f, mid - dx) + g(f, mid + dx);
        kron += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let value = kron * half;
    let error = ((kron - gauss) * half).norm();
    (value, error)
}

/// Adaptive Gauss–Kronrod (10/21) integral of `f(z) dz` along `contour`.
pub fn adaptive_quadrature<F: FnMut(C64) -> C64>(mut f: F, contour: &Contour, rel_tol: f64) -> Result<C64> {
    let mut heap = BinaryHeap::new();
    let mut total = C64::new(0.0, 0.0);
    let mut err_total = 0.0;
    for (i, seg) in contour.segments().iter().enumerate() {
        let len = seg.length();
        let (v, e) = gk21(&mut f, seg, 0.0, len);
        total += v;
        err_total += e;
        heap.push(Piece { seg: i, lo: 0.0, hi: len, value: v, error: e });
    }
    loop {
        let target = (rel_tol * total.norm()).max(1e-300);
        if err_total <= target {
            return Ok(total);
        }
        if heap.len() >= MAX_INTERVALS {
            return Err(Error::SubdivisionLimit { intervals: heap.len(), estimate: err_total });
        }
        let worst = heap.pop().expect("non-empty");
        // roundoff floor: interval too small to split meaningfully
        if (worst.hi - worst.lo) < 1e-13 * contour.length() {
            if err_total <= 1e3 * target {
                return Ok(total);
            }
            return Err(Error::SubdivisionLimit { intervals: heap.len(), estimate: err_total });
        }
        let seg = &contour.segments()[worst.seg];
        let mid = 0.5 * (worst.lo + worst.hi);
        let (v1, e1) = gk21(&mut f, seg, worst.lo, mid);
        let (v2, e2) = gk21(&mut f, seg, mid, worst.hi);
        total += v1 + v2 - worst.value;
        err_total += e1 + e2 - worst.error;
        heap.push(Piece { seg: worst.seg, lo: worst.lo, hi: mid, value: v1, error: e1 });
        heap.push(Piece { seg: worst.seg, lo: mid, hi: worst.hi, value: v2, error: e2 });
        if heap.len() % 64 == 0 {
            // refresh the running sums to avoid drift
            total = heap.iter().map(|p| p.value).sum();
            err_total = heap.iter().map(|p| p.error).sum();
        }
    }
}

/// Truncated power series `Σ a_n (y − center)^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSeries {
    pub center: C64,
    pub coeffs: Vec<C64>,
}

impl PowerSeries {
    pub fn new(center: C64, coeffs: Vec<C64>) -> PowerSeries {
        PowerSeries { center, coeffs }
    }

    pub fn zeros(center: C64, n: usize) -> PowerSeries {
        PowerSeries { center, coeffs: vec![C64::new(0.0, 0.0); n] }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Value and first two derivatives at `y`.
    pub fn eval3(&self, y: C64) -> [C64; 3] {
        let x = y - self.center;
        let mut out = [C64::new(0.0, 0.0); 3];
        for (n, &a) in self.coeffs.iter().enumerate().rev() {
            let nf = n as f64;
            out[0] = out[0] * x + a;
            if n >= 1 {
                out[1] = out[1] * x + nf * a;
            }
            if n >= 2 {
                out[2] = out[2] * x + nf * (nf - 1.0) * a;
            }
        }
        out
    }

    pub fn eval(&self, y: C64) -> C64 {
        let x = y - self.center;
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * x + a)
    }

    /// `Σ |a_n| ρ^n`.
    pub fn norm_at(&self, rho: f64) -> f64 {
        let mut r = 1.0;
        let mut s = 0.0;
        for a in &self.coeffs {
            s += a.norm() * r;
            r *= rho;
        }
        s
    }

    /// Product truncated to the length of `self`.
    pub fn mul(&self, other: &PowerSeries) -> PowerSeries {
        let n = self.len();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate().take(n - i) {
                out[i + j] += a * b;
            }
        }
        PowerSeries { center: self.center, coeffs: out }
    }

    /// Quotient `self / other`, requiring `other.coeffs[0] ≠ 0`.
    pub fn div(&self, other: &PowerSeries) -> PowerSeries {
        let n = self.len();
        let mut out = vec![C64::new(0.0, 0.0); n];
        for k in 0..n {
            let mut acc = self.coeffs[k];
            for j in 1..=k.min(other.len() - 1) {
                acc -= other.coeffs[j] * out[k - j];
            }
            out[k] = acc / other.coeffs[0];
        }
        PowerSeries { center: self.center, coeffs: out }
    }
}

/// Least-squares slope, intercept and R² of `ys` against `xs`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

/// Stopping rules for [`complex_newton`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonOptions {
    pub max_iter: usize,
    /// Converged once `|f| ≤ rel_tol · scale`.
    pub rel_tol: f64,
    /// Converged once an accepted step is shorter than this.
    pub step_tol: f64,
    /// Accepted when the residual can no longer be reduced but sits below `stall_tol · scale`.
    pub stall_tol: f64,
    pub max_halvings: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { max_iter: 50, rel_tol: 1e-12, step_tol: 1e-14, stall_tol: 1e-10, max_halvings: 8 }
    }
}

/// Result of a converged Newton solve.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome {
    pub root: C64,
    pub residual: C64,
    pub scale: f64,
    pub iterations: usize,
    /// Iterates, starting with the seed.
    pub history: Vec<C64>,
}

/// Damped Newton for an analytic `f`, derivative by central differences.
/// `f` returns the residual and the scale its size is judged against.
pub fn complex_newton<F>(mut f: F, seed: C64, opts: &NewtonOptions) -> Result<NewtonOutcome>
where
    F: FnMut(C64) -> Result<(C64, f64)>,
{
    let mut x = seed;
    let (mut e, mut scale) = f(x)?;
    let mut history = vec![x];
    for it in 0..opts.max_iter {
        if e.norm() <= opts.rel_tol * scale {
            return Ok(NewtonOutcome { root: x, residual: e, scale, iterations: it, history });
        }
        let h = 1e-6 * x.norm().max(1e-8);
        let d = (f(x + h)?.0 - f(x - h)?.0) / (2.0 * h);
        if !(d.norm() > 0.0) || !d.is_finite() {
            return Err(Error::DivisionNearZero { z: x, size: d.norm() });
        }
        let mut step = -e / d;
        let mut accepted = None;
        for _ in 0..=opts.max_halvings {
            // a trial point may leave the residual's domain; treat that as no decrease
            if let Ok((e_new, s_new)) = f(x + step) {
                if e_new.is_finite() && e_new.norm() < e.norm() {
                    accepted = Some((e_new, s_new));
                    break;
                }
            }
            step *= 0.5;
        }
        match accepted {
            Some((e_new, s_new)) => {
                x += step;
                e = e_new;
                scale = s_new;
                history.push(x);
                if step.norm() <= opts.step_tol {
                    return Ok(NewtonOutcome { root: x, residual: e, scale, iterations: it + 1, history });
                }
            }
            None if e.norm() <= opts.stall_tol * scale => {
                return Ok(NewtonOutcome { root: x, residual: e, scale, iterations: it, history });
            }
            None => return Err(Error::OutOfBasin { c: x }),
        }
    }
    if e.norm() <= opts.rel_tol * scale {
        return Ok(NewtonOutcome { root: x, residual: e, scale, iterations: opts.max_iter, history });
    }
    Err(Error::NewtonDivergence { iterations: opts.max_iter, residual: e.norm() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn exponential_growth() {
        let c = Contour::segment(c64(0.0, 0.0), c64(1.0, 0.0)).unwrap();
        let out = integrate_ode(|_, s, d| d[0] = s[0], &c, &[c64(1.0, 0.0)], &OdeSettings::default()).unwrap();
        assert!(rel(out[0], c64(std::f64::consts::E, 0.0)) < 1e-10);
    }

    #[test]
    fn constant_field_is_exact() {
        let c = Contour::polyline(&[c64(0.0, 0.0), c64(1.0, 2.0), c64(-3.0, 0.5)]).unwrap();
        let v = c64(0.3, -0.7);
        let out = integrate_ode(|_, _, d| d[0] = C64::new(0.0, 0.0), &c, &[v], &OdeSettings::default()).unwrap();
        assert_eq!(out[0], v);
    }

    #[test]
    fn complex_gaussian() {
        let end = c64(1.0, 1.0);
        let c = Contour::segment(c64(0.0, 0.0), end).unwrap();
        let out = integrate_ode(|z, s, d| d[0] = -2.0 * z * s[0], &c, &[c64(1.0, 0.0)], &OdeSettings::default())
            .unwrap();
        assert!(rel(out[0], (-(end * end)).exp()) < 1e-9);
    }

    #[test]
    fn ode_along_arc() {
        let c = indented_contour(0.0, 1.0, c64(0.5, 0.0), 0.2, Side::Below);
        let out = integrate_ode(|z, s, d| d[0] = z * s[0], &c, &[c64(1.0, 0.0)], &OdeSettings::default()).unwrap();
        assert!(rel(out[0], c64(0.5f64.exp(), 0.0)) < 1e-9);
    }

    #[test]
    fn ode_split_matches_single_shot() {
        let c = Contour::polyline(&[c64(0.0, 0.0), c64(0.7, -0.3), c64(1.5, 0.2), c64(2.0, 0.0)]).unwrap();
        let st = OdeSettings::default();
        let rhs = |z: C64, s: &[C64], d: &mut [C64]| {
            d[0] = s[1];
            d[1] = -z * s[0];
        };
        let y0 = [c64(1.0, 0.0), c64(0.0, 1.0)];
        let full = integrate_ode(rhs, &c, &y0, &st).unwrap();
        let (a, b) = c.split_at(2);
        let mid = integrate_ode(rhs, &a, &y0, &st).unwrap();
        let chained = integrate_ode(rhs, &b, &mid, &st).unwrap();
        for i in 0..2 {
            assert!((full[i] - chained[i]).norm() <= 10.0 * st.rel_tol * full[i].norm().max(1.0));
        }
    }

    #[test]
    fn step_limit_reported() {
        let c = Contour::segment(c64(0.0, 0.0), c64(10.0, 0.0)).unwrap();
        let st = OdeSettings { max_steps: 3, ..OdeSettings::default() };
        let r = integrate_ode(|z, s, d| d[0] = (5.0 * z).sin() * s[0], &c, &[c64(1.0, 0.0)], &st);
        assert!(matches!(r, Err(Error::StepLimitExceeded { .. })));
    }

    #[test]
    fn quadrature_constant() {
        let c = Contour::segment(c64(0.0, 0.0), c64(1.0, 0.0)).unwrap();
        let v = adaptive_quadrature(|_| c64(1.0, 0.0), &c, 1e-12).unwrap();
        assert!((v - 1.0).norm() < 1e-15);
    }

    #[test]
    fn quadrature_exponential_tail() {
        let c = Contour::segment(c64(0.0, 0.0), c64(40.0, 0.0)).unwrap();
        let v = adaptive_quadrature(|y| (-y).exp(), &c, 1e-13).unwrap();
        assert!((v - (1.0 - (-40f64).exp())).norm() < 1e-12);
    }

    #[test]
    fn quadrature_near_pole() {
        let p = c64(0.5, 0.1);
        let c = Contour::segment(c64(0.0, 0.0), c64(1.0, 0.0)).unwrap();
        let v = adaptive_quadrature(|y| 1.0 / (y - p), &c, 1e-12).unwrap();
        let exact = ((1.0 - p) / (-p)).ln();
        assert!((v - exact).norm() < 1e-10);
    }

    #[test]
    fn quadrature_additive_and_homotopic() {
        let f = |y: C64| (y * y).sin() / (y - c64(0.5, 0.0));
        let below = indented_contour(0.0, 1.0, c64(0.5, 0.0), 0.1, Side::Below);
        let below2 = indented_contour(0.0, 1.0, c64(0.5, 0.0), 0.3, Side::Below);
        let tol = 1e-11;
        let a = adaptive_quadrature(f, &below, tol).unwrap();
        let b = adaptive_quadrature(f, &below2, tol).unwrap();
        assert!((a - b).norm() <= 10.0 * tol * a.norm());
        let (p, q) = below.split_at(2);
        let s = adaptive_quadrature(f, &p, tol).unwrap() + adaptive_quadrature(f, &q, tol).unwrap();
        assert!((a - s).norm() <= 10.0 * tol * a.norm());
        // above minus below picks up the residue −2πi·sin(1/4)
        let above = indented_contour(0.0, 1.0, c64(0.5, 0.0), 0.1, Side::Above);
        let up = adaptive_quadrature(f, &above, tol).unwrap();
        let residue = c64(0.0, -2.0 * std::f64::consts::PI) * 0.25f64.sin();
        assert!((up - a - residue).norm() < 1e-9);
    }

    #[test]
    fn indentation_shapes() {
        let c = indented_contour(0.0, 1.0, c64(0.5, 0.3), 0.05, Side::Below);
        assert_eq!(c.segments().len(), 1);
        let c = indented_contour(0.0, 1.0, c64(2.0, 0.0), 0.05, Side::Below);
        assert_eq!(c.segments().len(), 1);
        let c = indented_contour(0.0, 1.0, c64(0.5, 0.0), 0.05, Side::Below);
        let w = c.waypoints();
        assert_eq!(w.len(), 4);
        assert!((w[1] - 0.45).norm() < 1e-15 && (w[2] - 0.55).norm() < 1e-12);
        let arc = c.segments()[1];
        let bottom = arc.point(arc.length() / 2.0);
        assert!((bottom - c64(0.5, -0.05)).norm() < 1e-12);
        assert!((c.end() - 1.0).norm() < 1e-15);
    }

    #[test]
    fn series_arithmetic() {
        let c = c64(0.3, 0.1);
        // e^x and 1/(1−x)
        let n = 30;
        let mut e = vec![c64(1.0, 0.0); n];
        for k in 1..n {
            e[k] = e[k - 1] / k as f64;
        }
        let e = PowerSeries::new(c, e);
        let g = PowerSeries::new(c, vec![c64(1.0, 0.0); n]);
        let x = c64(0.1, -0.05);
        let y = c + x;
        assert!((e.mul(&g).eval(y) - x.exp() / (1.0 - x)).norm() < 1e-14);
        assert!((e.div(&g).eval(y) - x.exp() * (1.0 - x)).norm() < 1e-14);
        let d = g.eval3(y);
        let inv = 1.0 / (1.0 - x);
        assert!((d[1] - inv * inv).norm() < 1e-12 && (d[2] - 2.0 * inv * inv * inv).norm() < 1e-11);
        assert!((g.norm_at(0.5) - 2.0).abs() < 1e-8);
    }

    #[test]
    fn reversal_negates_integrals() {
        let c = indented_contour(0.0, 2.0, c64(1.0, 0.01), 0.2, Side::Below);
        let f = |y: C64| y.exp() / (y - c64(1.0, 0.01));
        let a = adaptive_quadrature(f, &c, 1e-12).unwrap();
        let b = adaptive_quadrature(f, &c.reversed(), 1e-12).unwrap();
        assert!((a + b).norm() < 1e-10 * a.norm());
    }

    #[test]
    fn newton_finds_cube_root() {
        let target = c64(2.0, -1.0);
        let out = complex_newton(|z| Ok((z * z * z - target, 1.0)), c64(1.0, 0.0), &NewtonOptions::default()).unwrap();
        assert!((out.root.powi(3) - target).norm() < 1e-12);
        assert!(out.iterations < 20);
    }

    #[test]
    fn newton_reports_no_root() {
        let r = complex_newton(|z| Ok((z * z + 1.0, 1.0)), c64(0.0, 0.0), &NewtonOptions::default());
        assert!(r.is_err());
    }
}

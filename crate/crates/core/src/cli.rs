//! Command-line front end. Curves go out as CSV, scalars and summaries as
//! one-line JSON.

use crate::dispersion::{
    growth_curve, marginal_curves, solve_by_continuation, solve_eigenvalue, trace_branch, window_scan_range, Method,
};
use crate::error::Error;
use crate::modes::build_mode;
use crate::numerics::{c64, C64};
use crate::oracle::{evolve_semigroup, shoot_eigenvalue};
use crate::profile::ShearProfile;
use crate::selfcheck;
use crate::specfun::{tietjens, tietjens_root};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
/// Environment variable holding the worker count for multi-ν scans.
pub const THREADS_ENV: &str = "OSWAVE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "oswave", version, about = "Long-wave viscous instability of boundary-layer shear profiles")]
pub struct RunConfig {
    /// Profile JSON `{"uplus":..,"terms":[{"a":..,"b":..}]}`; default U = 1 − e^{−y}.
    #[arg(long, global = true)]
    pub profile: Option<PathBuf>,
    /// Write the table here instead of stdout.
    #[arg(short = 'o', long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct MethodArg {
    /// expansion | miles | shoot
    #[arg(long, default_value = "expansion")]
    pub method: Method,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate the Tietjens function on the real axis.
    Tietjens {
        #[arg(long, default_value_t = 0.5)]
        zmin: f64,
        #[arg(long, default_value_t = 10.0)]
        zmax: f64,
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
    /// Solve for one eigenvalue.
    Eigen {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-6)]
        nu: f64,
        /// Seed `re,im`; by default the branch is continued from the lower neutral point.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        seed: Option<C64>,
        #[command(flatten)]
        method: MethodArg,
    },
    /// Trace c(α) along a geometric α grid.
    Branch {
        #[arg(long, value_delimiter = ',', default_value = "1e-6")]
        nu: Vec<f64>,
        #[arg(long)]
        alpha_min: Option<f64>,
        #[arg(long)]
        alpha_max: Option<f64>,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[command(flatten)]
        method: MethodArg,
    },
    /// Neutral wavenumbers bounding the unstable window.
    Marginal {
        #[arg(long, value_delimiter = ',', default_value = "1e-6")]
        nu: Vec<f64>,
        #[command(flatten)]
        method: MethodArg,
    },
    /// Growth rate Re λ against α/ν^{1/4}.
    Growth {
        #[arg(long, value_delimiter = ',', default_value = "1e-6")]
        nu: Vec<f64>,
        #[arg(long, default_value_t = 80)]
        n: usize,
        #[command(flatten)]
        method: MethodArg,
    },
    /// Sample the unstable mode.
    Mode {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-6)]
        nu: f64,
        #[arg(long, default_value_t = 60.0)]
        y_max: f64,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[command(flatten)]
        method: MethodArg,
    },
    /// Eigenvalue of the full fourth-order problem by shooting.
    Shoot {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-6)]
        nu: f64,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        seed: Option<C64>,
    },
    /// Time-step one Fourier mode of the linearized vorticity equation.
    Evolve {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1e-6)]
        nu: f64,
        #[arg(long, default_value_t = 2000.0)]
        t_final: f64,
        #[arg(long, default_value_t = 4000)]
        n_y: usize,
        #[arg(long, default_value_t = 40.0)]
        y_max: f64,
    },
    /// Run the built-in invariant checks.
    Selfcheck,
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number '{t}': {e}"));
    Ok(c64(p(re)?, p(im)?))
}

/// Failure of a subcommand, tagged with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    kind: String,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidInput(_) | Error::Io(_) | Error::EmptySpec | Error::NonPositiveCoefficient { .. } => {
                EXIT_VALIDATION
            }
            _ => EXIT_NUMERICAL,
        };
        let debug = format!("{e:?}");
        let kind = debug.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string();
        Failure { code, kind, message: e.to_string() }
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_VALIDATION, kind: "InvalidInput".into(), message: msg.into() }
}

/// A CSV table and a JSON summary.
struct Report {
    header: &'static str,
    rows: Vec<Vec<f64>>,
    summary: Value,
}

/// 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn render_csv(header: &str, rows: &[Vec<f64>]) -> String {
    let mut s = String::with_capacity(rows.len() * 64);
    s.push_str(header);
    s.push('\n');
    for r in rows {
        let line: Vec<String> = r.iter().map(|&x| fmt_float(x)).collect();
        s.push_str(&line.join(","));
        s.push('\n');
    }
    s
}

fn cjson(z: C64) -> Value {
    json!([z.re, z.im])
}

fn worker_pool() -> Result<rayon::ThreadPool, Failure> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| invalid(format!("{THREADS_ENV} must be a non-negative integer")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| invalid(e.to_string()))
}

fn check_nu(nus: &[f64]) -> Result<(), Failure> {
    if nus.is_empty() || nus.iter().any(|&nu| !(nu > 0.0 && nu < 1e-2)) {
        return Err(invalid(format!("every --nu must lie in (0, 1e-2), got {nus:?}")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<(), Failure> {
    if !(alpha.is_finite() && alpha != 0.0 && alpha.abs() < 0.5) {
        return Err(invalid(format!("--alpha must satisfy 0 < |alpha| < 0.5, got {alpha}")));
    }
    Ok(())
}

/// Run `f` for every ν on the worker pool, keeping input order.
fn per_nu<T: Send>(nus: &[f64], f: impl Fn(f64) -> Result<T, Error> + Sync) -> Result<Vec<T>, Failure> {
    let pool = worker_pool()?;
    let out: Vec<Result<T, Error>> = pool.install(|| nus.par_iter().map(|&nu| f(nu)).collect());
    out.into_iter().map(|r| r.map_err(Failure::from)).collect()
}

fn execute(cfg: &RunConfig) -> Result<Report, Failure> {
    let profile = match &cfg.profile {
        Some(path) => ShearProfile::load(path)?,
        None => ShearProfile::exponential(),
    };
    let p = &profile;
    match &cfg.command {
        Command::Tietjens { zmin, zmax, n } => {
            if !(zmin < zmax && *zmin > 0.0 && *n >= 2) {
                return Err(invalid("need 0 < zmin < zmax and n >= 2"));
            }
            let r = tietjens_root()?;
            let mut zs: Vec<f64> = (0..*n).map(|k| zmin + (zmax - zmin) * k as f64 / (*n - 1) as f64).collect();
            // the real root gets its own row so the table resolves it exactly
            if (*zmin..=*zmax).contains(&r.z0) {
                zs.push(r.z0);
                zs.sort_by(f64::total_cmp);
            }
            let mut rows = Vec::with_capacity(zs.len());
            for z in zs {
                let t = tietjens(c64(z, 0.0))?;
                rows.push(vec![z, t.ti.re, t.ti.im]);
            }
            let summary = json!({"z0": r.z0, "ti_z0": cjson(r.ti), "ti_prime_z0": cjson(r.ti_prime)});
            Ok(Report { header: "z,re_ti,im_ti", rows, summary })
        }
        Command::Eigen { alpha, nu, seed, method } => {
            check_alpha(*alpha)?;
            check_nu(&[*nu])?;
            let r = match seed {
                Some(s) => solve_eigenvalue(p, *alpha, *nu, *s, method.method)?,
                None => solve_by_continuation(p, *alpha, *nu, method.method)?,
            };
            let row = vec![r.alpha, r.nu, r.c.re, r.c.im, r.lambda.re, r.lambda.im, r.residual, r.iterations as f64];
            let summary = json!({
                "alpha": r.alpha, "nu": r.nu, "c": cjson(r.c), "lambda": cjson(r.lambda),
                "residual": r.residual, "iterations": r.iterations, "method": r.method.to_string(),
                "z": cjson(r.z), "gamma": cjson(r.gamma),
            });
            Ok(Report { header: "alpha,nu,re_c,im_c,re_lambda,im_lambda,residual,iterations", rows: vec![row], summary })
        }
        Command::Branch { nu, alpha_min, alpha_max, n, method } => {
            check_nu(nu)?;
            let m = method.method;
            let branches = per_nu(nu, |v| {
                let (lo, hi) = window_scan_range(v);
                trace_branch(p, v, alpha_min.unwrap_or(lo), alpha_max.unwrap_or(hi), *n, m)
            })?;
            let mut rows = Vec::new();
            let mut counts = Vec::new();
            for (v, b) in nu.iter().zip(&branches) {
                counts.push(json!({"nu": v, "points": b.len(), "unstable": b.iter().filter(|q| q.lambda.re > 0.0).count()}));
                rows.extend(b.iter().map(|q| vec![*v, q.alpha, q.c.re, q.c.im, q.lambda.re]));
            }
            Ok(Report { header: "nu,alpha,re_c,im_c,re_lambda", rows, summary: json!({ "branches": counts }) })
        }
        Command::Marginal { nu, method } => {
            check_nu(nu)?;
            let m = method.method;
            let pairs = per_nu(nu, |v| marginal_curves(p, v, m))?;
            let rows = pairs
                .iter()
                .map(|q| vec![q.nu, q.alpha_minus, q.alpha_plus, q.c_minus.re, q.c_minus.im, q.c_plus.re, q.c_plus.im])
                .collect();
            let summary = json!({ "marginal": pairs.iter().map(|q| json!({
                "nu": q.nu, "alpha_minus": q.alpha_minus, "alpha_plus": q.alpha_plus,
                "alpha_minus4_over_nu": q.alpha_minus.powi(4) / q.nu,
                "c_minus_over_alpha_minus": q.c_minus.re / q.alpha_minus,
            })).collect::<Vec<_>>() });
            Ok(Report {
                header: "nu,alpha_minus,alpha_plus,re_c_minus,im_c_minus,re_c_plus,im_c_plus",
                rows,
                summary,
            })
        }
        Command::Growth { nu, n, method } => {
            check_nu(nu)?;
            if *n < 3 {
                return Err(invalid("--n must be at least 3"));
            }
            let m = method.method;
            let curves = per_nu(nu, |v| growth_curve(p, v, *n, m))?;
            let single = curves.len() == 1;
            let mut rows = Vec::new();
            for g in &curves {
                for q in &g.points {
                    let mut row = vec![q.alpha_scaled, q.re_lambda, q.c.im, q.c.re];
                    if !single {
                        row.insert(0, g.nu);
                    }
                    rows.push(row);
                }
            }
            let summary = if single {
                json!({"nu": curves[0].nu, "argmax_alpha_scaled": curves[0].argmax_alpha_scaled, "max_re_lambda": curves[0].max_re_lambda})
            } else {
                json!({ "curves": curves.iter().map(|g| json!({"nu": g.nu, "argmax_alpha_scaled": g.argmax_alpha_scaled, "max_re_lambda": g.max_re_lambda})).collect::<Vec<_>>() })
            };
            let header = if single { "alpha_scaled,re_lambda,im_c,re_c" } else { "nu,alpha_scaled,re_lambda,im_c,re_c" };
            Ok(Report { header, rows, summary })
        }
        Command::Mode { alpha, nu, y_max, n, method } => {
            check_alpha(*alpha)?;
            check_nu(&[*nu])?;
            if *alpha < 0.0 {
                return Err(invalid("mode reconstruction needs alpha > 0"));
            }
            let e = solve_by_continuation(p, *alpha, *nu, method.method)?;
            let m = build_mode(p, &e, *y_max, *n)?;
            let rows = (0..m.y_grid.len())
                .map(|k| {
                    vec![
                        m.y_grid[k], m.psi[k].re, m.psi[k].im, m.u[k].re, m.u[k].im, m.v[k].re, m.v[k].im,
                        m.omega[k].re, m.omega[k].im,
                    ]
                })
                .collect();
            let summary = json!({"alpha": m.alpha, "nu": m.nu, "c": cjson(m.c), "amplitude": cjson(m.amplitude), "scale": m.scale});
            Ok(Report { header: "y,re_psi,im_psi,re_u,im_u,re_v,im_v,re_omega,im_omega", rows, summary })
        }
        Command::Shoot { alpha, nu, seed } => {
            check_alpha(*alpha)?;
            check_nu(&[*nu])?;
            let seed = match seed {
                Some(s) => *s,
                None => solve_by_continuation(p, *alpha, *nu, Method::Miles)?.c,
            };
            let s = shoot_eigenvalue(p, *alpha, *nu, seed)?;
            let row = vec![*alpha, *nu, s.c.re, s.c.im, s.determinant_residual];
            let summary = json!({
                "alpha": alpha, "nu": nu, "c": cjson(s.c), "seed": cjson(seed),
                "determinant_residual": s.determinant_residual, "mu_f": cjson(s.mu_f), "y_max": s.y_max_used,
            });
            Ok(Report { header: "alpha,nu,re_c,im_c,determinant_residual", rows: vec![row], summary })
        }
        Command::Evolve { alpha, nu, t_final, n_y, y_max } => {
            if !(*alpha > 0.0 && *nu >= 0.0 && *nu < 1e-2 && *t_final > 0.0 && *n_y >= 16 && *y_max > 0.0) {
                return Err(invalid("need alpha > 0, 0 <= nu < 1e-2, t_final > 0, n_y >= 16, y_max > 0"));
            }
            let r = evolve_semigroup(p, *alpha, *nu, *t_final, *n_y, *y_max)?;
            let rows = r.times.iter().zip(&r.omega_norm).map(|(t, w)| vec![*t, *w]).collect();
            let predicted = if r.predicted_rate.is_finite() { json!(r.predicted_rate) } else { Value::Null };
            let summary = json!({"fitted_rate": r.fitted_rate, "fit_r2": r.fit_r2, "predicted_rate": predicted});
            Ok(Report { header: "t,omega_norm", rows, summary })
        }
        Command::Selfcheck => unreachable!("handled by the caller"),
    }
}

fn selfcheck_table(out: &mut dyn Write) -> std::io::Result<bool> {
    let results = selfcheck::run_all();
    writeln!(out, "{:<30} {:<6} {:>8}  detail", "check", "result", "seconds")?;
    for r in &results {
        let mark = if r.passed { "pass" } else { "FAIL" };
        writeln!(out, "{:<30} {:<6} {:>8.3}  {}", r.name, mark, r.seconds, r.detail)?;
    }
    Ok(results.iter().all(|r| r.passed))
}

fn emit_error(err: &mut dyn Write, f: &Failure) {
    let class = if f.code == EXIT_VALIDATION { "validation" } else { "numerical" };
    let _ = writeln!(err, "{}", json!({"error": class, "kind": f.kind, "message": f.message}));
}

/// Parse `argv` (program name first), run, and return the exit code.
pub fn run_with(argv: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cfg = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let _ = write!(err, "{e}");
            emit_error(err, &Failure { code: EXIT_VALIDATION, kind: "Usage".into(), message: e.kind().to_string() });
            return EXIT_VALIDATION;
        }
    };
    if let Command::Selfcheck = cfg.command {
        return match selfcheck_table(out) {
            Ok(true) => EXIT_OK,
            Ok(false) => EXIT_NUMERICAL,
            Err(e) => {
                emit_error(err, &Failure::from(Error::from(e)));
                EXIT_VALIDATION
            }
        };
    }
    let report = match execute(&cfg) {
        Ok(r) => r,
        Err(f) => {
            emit_error(err, &f);
            return f.code;
        }
    };
    let csv = render_csv(report.header, &report.rows);
    let written = match &cfg.output {
        Some(path) => std::fs::write(path, csv).map(|_| writeln!(out, "{}", report.summary)),
        None => out.write_all(csv.as_bytes()).map(|_| writeln!(err, "{}", report.summary)),
    };
    match written {
        Ok(Ok(())) => EXIT_OK,
        Ok(Err(e)) | Err(e) => {
            emit_error(err, &Failure::from(Error::from(e)));
            EXIT_VALIDATION
        }
    }
}

/// Run with the process's own arguments and standard streams.
pub fn run(argv: &[String]) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let argv: Vec<String> = std::iter::once("oswave").chain(args.iter().copied()).map(String::from).collect();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run_with(&argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn tietjens_table() {
        let (code, out, err) = call(&["tietjens", "--zmin", "0.5", "--zmax", "10", "--n", "100"]);
        assert_eq!(code, 0, "{err}");
        let mut lines = out.lines();
        assert_eq!(lines.next(), Some("z,re_ti,im_ti"));
        let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
        assert_eq!(rows.len(), 101);
        let near = rows.iter().min_by(|a, b| (a[0] - 2.297).abs().total_cmp(&(b[0] - 2.297).abs())).unwrap();
        assert!(near[2].abs() <= 2e-3, "{near:?}");
        let summary: Value = serde_json::from_str(err.trim()).unwrap();
        assert!((summary["z0"].as_f64().unwrap() - 2.297).abs() < 1e-3);
    }

    #[test]
    fn floats_carry_seventeen_digits() {
        assert_eq!(fmt_float(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_float(-2.5), "-2.5000000000000000e0");
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["nonsense"]).0, EXIT_VALIDATION);
        assert_eq!(call(&["eigen", "--alpha", "0.7"]).0, EXIT_VALIDATION);
        assert_eq!(call(&["tietjens", "--zmin", "3", "--zmax", "1"]).0, EXIT_VALIDATION);
        let (code, _, err) = call(&["marginal", "--nu", "1e-5", "--method", "expansion"]);
        assert_eq!(code, EXIT_NUMERICAL, "{err}");
        let v: Value = serde_json::from_str(err.lines().last().unwrap()).unwrap();
        assert_eq!(v["error"], "numerical");
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn deterministic_output() {
        let args = ["growth", "--nu", "1e-6", "--n", "20"];
        let (c1, o1, _) = call(&args);
        let (c2, o2, _) = call(&args);
        assert_eq!((c1, c2), (0, 0));
        assert_eq!(o1, o2);
        assert!(o1.starts_with("alpha_scaled,re_lambda,im_c,re_c\n"));
    }

    #[test]
    fn multi_nu_keeps_order() {
        let (code, out, err) = call(&["marginal", "--nu", "1e-7,1e-6"]);
        assert_eq!(code, 0, "{err}");
        let nus: Vec<f64> = out.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
        assert_eq!(nus, vec![1e-7, 1e-6]);
    }
}

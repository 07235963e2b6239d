//! `hgp`: evaluate the p-adic gamma and `nGn` functions, count points, check
//! Gauss sums and run the verification suites.
//!
//! Exit status: 0 when everything checked holds, 1 when a check fails or a
//! computation errors, 2 on a usage or configuration error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use padic_hyper::counts::{count_curve_points, count_poly_roots, CurveFamily, Predictor, Shape};
use padic_hyper::gammap::GammaEval;
use padic_hyper::gauss::{
    check_gauss_lemmas, davenport_hasse_cases, gauss_sum_complex, piadic_text, GrossKoblitz, DEFAULT_TOL,
};
use padic_hyper::gfun::{GContext, GSpec};
use padic_hyper::harness::{run_suite, Grid, Suite, SuiteConfig};
use padic_hyper::padic::{parse_rational, QqNum};
use padic_hyper::{Error, FieldDesc, FqElem};

#[derive(Parser)]
#[command(name = "hgp", version, about = "p-adic hypergeometric functions over finite fields")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Morita's Gamma_p at a p-integral rational.
    Gamma {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        prec: u32,
        /// NUM/DEN or an integer.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// nGn[upper; lower | t] over F_{p^r}.
    EvalG {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        prec: u32,
        /// Comma-separated rationals, e.g. 1/6,1/2,5/6.
        #[arg(long, allow_hyphen_values = true)]
        upper: String,
        #[arg(long, allow_hyphen_values = true)]
        lower: String,
        /// Element literal: comma-separated coefficients c_0,c_1,...
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// Points on y^2 = x^d + a x^k + b and roots of the trinomial.
    Count {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long)]
        d: u32,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, value_enum)]
        shape: ShapeArg,
        /// Also evaluate the closed forms.
        #[arg(long, requires = "prec")]
        predict: bool,
        #[arg(long)]
        prec: Option<u32>,
    },
    /// Gauss sums, through the complex oracle or Gross–Koblitz.
    Gauss {
        #[command(flatten)]
        field: FieldArgs,
        #[arg(long, value_enum)]
        mode: Mode,
        /// A single character exponent; all of them when omitted.
        #[arg(long, allow_hyphen_values = true)]
        a: Option<i64>,
        #[arg(long, conflicts_with = "piprec")]
        tol: Option<f64>,
        /// pi-adic precision M.
        #[arg(long)]
        piprec: Option<u32>,
    },
    /// Run a verification suite.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct FieldArgs {
    #[arg(long)]
    p: u32,
    #[arg(long, default_value_t = 1)]
    r: u32,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    suite: String,
    #[arg(long)]
    p: u32,
    #[arg(long, default_value_t = 1)]
    r: u32,
    #[arg(long)]
    d: Option<u32>,
    #[arg(long)]
    prec: u32,
    /// exhaustive or sample:K; defaults by field size.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tol: Option<f64>,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Linear,
    Subleading,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Complex,
    Padic,
}

/// A failure that maps to exit status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(r: padic_hyper::Result<T>) -> anyhow::Result<T> {
    r.map_err(|e| Usage(e.to_string()).into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let is_usage = e.downcast_ref::<Usage>().is_some()
                || matches!(
                    e.downcast_ref::<Error>(),
                    Some(Error::Parse(_) | Error::Domain(_) | Error::InvalidField(_) | Error::Unsupported(_) | Error::NotPIntegral(_))
                );
            ExitCode::from(if is_usage { 2 } else { 1 })
        }
    }
}

fn build_field(f: &FieldArgs) -> anyhow::Result<Arc<FieldDesc>> {
    Ok(Arc::new(usage(FieldDesc::build(f.p, f.r))?))
}

/// Parses `c_0,c_1,...`; coefficients may be negative and are reduced mod p.
fn parse_elem(field: &FieldDesc, s: &str) -> anyhow::Result<FqElem> {
    let p = field.p() as i64;
    let coeffs = s
        .split(',')
        .map(|c| {
            c.trim()
                .parse::<i64>()
                .map(|v| v.rem_euclid(p) as u32)
                .map_err(|_| Usage(format!("bad element literal {s:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if coeffs.len() > field.r() as usize {
        bail!(Usage(format!("element literal {s:?} has more than r = {} coefficients", field.r())));
    }
    usage(field.from_coeffs(&coeffs))
}

fn parse_list(s: &str) -> anyhow::Result<Vec<padic_hyper::ExactRational>> {
    s.split(',').map(|x| usage(parse_rational(x))).collect()
}

fn run(cmd: Cmd) -> anyhow::Result<bool> {
    match cmd {
        Cmd::Gamma { p, prec, x } => {
            let x = usage(parse_rational(&x))?;
            let g = usage(GammaEval::new(p, prec))?;
            println!("{}", usage(g.gamma_p(x))?);
            Ok(true)
        }
        Cmd::EvalG { field, prec, upper, lower, t } => {
            let field = build_field(&field)?;
            let spec = usage(GSpec::new(parse_list(&upper)?, parse_list(&lower)?))?;
            usage(spec.validate(field.p()))?;
            let t = parse_elem(&field, &t)?;
            if prec == 0 {
                bail!(Usage("precision must be at least 1".into()));
            }
            let v = GContext::new(field).kernel(&spec, prec)?.eval(t)?;
            println!("{}", v.canonical());
            println!("guaranteed precision: {}", v.guaranteed_precision());
            Ok(true)
        }
        Cmd::Count { field, d, a, b, shape, predict, prec } => {
            let field = build_field(&field)?;
            let shape = match shape {
                ShapeArg::Linear => Shape::Linear,
                ShapeArg::Subleading => Shape::Subleading,
            };
            let (a, b) = (parse_elem(&field, &a)?, parse_elem(&field, &b)?);
            let fam = usage(CurveFamily::new(&field, d, a, b, shape))?;
            let points = count_curve_points(&field, &fam);
            let roots = count_poly_roots(&field, &fam.coefficients());
            println!("points: {points}");
            println!("roots: {roots}");
            let Some(n) = prec.filter(|_| predict) else { return Ok(true) };
            if n == 0 {
                bail!(Usage("precision must be at least 1".into()));
            }
            let ctx = GContext::new(field.clone());
            let pred = Predictor::new(&ctx, n);
            let n_pts = (n + field.r()) as i64;
            let pp = pred.curve_points(&fam)?;
            let rp = pred.root_count(&fam)?;
            let ok_p = pp.congruent(&QqNum::from_int(ctx.zq(), points as i64, n_pts as u32 + 1)?, n_pts)?;
            let ok_r = rp.congruent(&QqNum::from_int(ctx.zq(), roots as i64, n + 1)?, n as i64)?;
            println!("predicted points: {} ({})", pp.truncate(n_pts), verdict(ok_p));
            println!("predicted roots: {} ({})", rp.truncate(n as i64), verdict(ok_r));
            Ok(ok_p && ok_r)
        }
        Cmd::Gauss { field, mode, a, tol, piprec } => {
            let field = build_field(&field)?;
            let order = field.q() as i64 - 1;
            match mode {
                Mode::Complex => {
                    if piprec.is_some() {
                        bail!(Usage("--piprec applies to --mode padic".into()));
                    }
                    let tol = tol.unwrap_or(DEFAULT_TOL);
                    if let Some(a) = a {
                        let g = gauss_sum_complex(&field, a);
                        println!("G_{a} = {:.12} {:+.12}i  |G| = {:.12}", g.re, g.im, g.norm());
                    }
                    let lemmas = check_gauss_lemmas(&field, tol);
                    let mut ok = lemmas.passed();
                    println!(
                        "lemmas: {} cases, max deviation {:.3e} ({})",
                        lemmas.cases.len(),
                        lemmas.max_deviation,
                        verdict(ok)
                    );
                    for k in [2u32, 3] {
                        if order % k as i64 != 0 {
                            println!("davenport-hasse k={k}: skipped (q is not 1 mod {k})");
                            continue;
                        }
                        let dh = davenport_hasse_cases(&field, k, tol)?;
                        ok &= dh.passed();
                        println!(
                            "davenport-hasse k={k}: {} cases, max deviation {:.3e} ({})",
                            dh.cases.len(),
                            dh.max_deviation,
                            verdict(dh.passed())
                        );
                    }
                    Ok(ok)
                }
                Mode::Padic => {
                    if tol.is_some() {
                        bail!(Usage("--tol applies to --mode complex".into()));
                    }
                    let m = piprec.unwrap_or(12);
                    if m < 2 {
                        bail!(Usage("--piprec must be at least 2".into()));
                    }
                    let gk = GrossKoblitz::new(&GContext::new(field), m)?;
                    let exps: Vec<i64> = match a {
                        Some(a) => vec![a],
                        None => (0..order).collect(),
                    };
                    let mut ok = true;
                    for a in exps {
                        let (lhs, rhs, eq) = gk.check(a)?;
                        ok &= eq;
                        println!("a={a}: G = {}", piadic_text(&lhs));
                        println!("a={a}: gamma side = {} ({})", piadic_text(&rhs), verdict(eq));
                    }
                    Ok(ok)
                }
            }
        }
        Cmd::Verify(v) => verify(v),
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "agree"
    } else {
        "DIFFER"
    }
}

fn verify(v: VerifyArgs) -> anyhow::Result<bool> {
    let suite: Suite = usage(v.suite.parse())?;
    let mut cfg = SuiteConfig::new(suite, v.p, v.r, v.prec);
    cfg.d = v.d;
    if let Some(g) = &v.grid {
        cfg.grid = usage(g.parse::<Grid>())?;
    }
    if let Some(s) = v.seed {
        cfg.seed = s;
    }
    if let Some(t) = v.tol {
        cfg.tol = t;
    }
    usage(cfg.validate())?;
    let report = run_suite(&cfg)?;
    if let Some(path) = &v.json {
        std::fs::write(path, report.to_json() + "\n")
            .with_context(|| format!("writing {}", path.display()))?;
    }
    for c in report.failures().take(10) {
        println!("FAIL {}: {} vs {}", c.params, c.lhs_text, c.rhs_text);
    }
    println!(
        "suite {} p={} r={} N_req={} N_work={} grid={} seed={}: passed {}, failed {}, skipped {} ({} ms)",
        suite,
        cfg.p,
        cfg.r,
        report.header.n_req,
        report.header.n_work,
        cfg.grid,
        cfg.seed,
        report.passed,
        report.failed,
        report.skipped.len(),
        report.wall_millis
    );
    Ok(report.all_passed())
}

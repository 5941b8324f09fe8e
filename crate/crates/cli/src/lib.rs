//! The `levi` command line.
//!
//! Exit codes: 0 pass/success, 1 verification FAIL, 2 usage or spec error,
//! 3 numerical error.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use levi_core::catalog;
use levi_core::config::{DEFAULT_SAMPLES, DEFAULT_SEED};
use levi_core::sampling::Side;
use levi_core::theorems::{
    analyze_point, classify_sweep, df_exponent, df_verify, sweep, verify_theorem, DfOptions, TheoremKind,
    TheoremReport, VerifyOptions,
};
use levi_core::{parse_domain_spec, DomainSpec, Error, RealPoint};
use serde::Serialize;
use serde_json::{Map, Value};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Relative `--output` paths are resolved against this directory when set.
pub const OUTPUT_DIR_ENV: &str = "LEVI_OUTPUT_DIR";

pub const SWEEP_CSV_VERSION: &str = "# levi sweep v1";
pub const ROWS_CSV_VERSION: &str = "# levi verify-rows v1";
pub const CLASSIFY_CSV_VERSION: &str = "# levi classify v1";

const BOUNDARY_SAMPLES: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "levi", version, about = "Signed distance, Levi forms and positivity checks for domains in C^n")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Shell width (default 0.1 times the domain scale)
    #[arg(long, global = true)]
    shell: Option<f64>,
    /// Shell samples for verify and df, boundary samples for classify and sweep
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Boundary samples for df and for the verify hypothesis check
    #[arg(long, global = true)]
    boundary_samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Leave out run-dependent fields (runtime) so reports are byte-reproducible
    #[arg(long, global = true)]
    no_meta: bool,
    /// Catalog parameter, e.g. --param beta=8 or --param 'a=[1,2,3]'
    #[arg(long = "param", global = true, value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Dimension for catalog entries that take one
    #[arg(long, global = true)]
    n: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Oka,
    Convex,
    Cconvex,
    Psh,
    Gamma,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SideArg {
    Inside,
    Outside,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the built-in domains
    Catalog,
    /// Distance data and boundary classification at one point
    Analyze {
        /// Catalog id or path to a JSON spec file
        domain: String,
        /// 2n real coordinates
        #[arg(long, num_args = 1.., allow_negative_numbers = true)]
        point: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
    },
    /// Classify sampled boundary points
    Classify {
        domain: String,
        #[arg(long, default_value_t = 1.0)]
        gamma: f64,
    },
    /// Check one of the positivity theorems on a shell
    Verify {
        #[arg(value_enum)]
        kind: KindArg,
        domain: String,
        #[arg(long)]
        gamma: Option<f64>,
        #[arg(long, value_enum, default_value = "inside")]
        side: SideArg,
        /// Halve the shell until the check passes and report the width
        #[arg(long)]
        certify: bool,
    },
    /// Diederich-Fornaess exponent of a domain, or eta for a given gamma
    Df {
        domain: Option<String>,
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Per-boundary-point table of min eigenvalues, max gamma and eta
    Sweep { domain: String },
}

/// Parse `argv` (including the program name), run, and return the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_PASS
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "levi: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_USAGE
    }
}

fn parse_params(raw: &[String]) -> Result<Map<String, Value>, Error> {
    let mut map = Map::new();
    for p in raw {
        let (k, v) = p
            .split_once('=')
            .ok_or_else(|| Error::Argument(format!("--param expects KEY=VALUE, got `{p}`")))?;
        let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
        map.insert(k.trim().to_string(), value);
    }
    Ok(map)
}

/// Catalog id, or a path to a JSON spec file.
pub fn resolve_domain(arg: &str, n: Option<usize>, params: &Map<String, Value>) -> Result<DomainSpec, Error> {
    if catalog::IDS.iter().any(|(id, _)| *id == arg) {
        return catalog::lookup(arg, n, params);
    }
    let path = Path::new(arg);
    if path.is_file() {
        if n.is_some() || !params.is_empty() {
            return Err(Error::Argument("--n and --param apply to catalog domains only".into()));
        }
        return parse_domain_spec(path);
    }
    Err(Error::spec(
        "domain",
        format!("`{arg}` is neither a catalog id nor a readable spec file; see `levi catalog`"),
    ))
}

fn positive(name: &str, v: Option<f64>) -> Result<Option<f64>, Error> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(Error::Argument(format!("--{name} must be positive"))),
        _ => Ok(v),
    }
}

fn positive_count(name: &str, v: Option<usize>) -> Result<Option<usize>, Error> {
    match v {
        Some(0) => Err(Error::Argument(format!("--{name} must be positive"))),
        _ => Ok(v),
    }
}

struct Ctx<'a> {
    common: &'a Common,
    shell: Option<f64>,
    samples: Option<usize>,
    boundary_samples: Option<usize>,
    seed: u64,
    tol: Option<f64>,
    params: Map<String, Value>,
}

impl Ctx<'_> {
    fn domain(&self, arg: &str) -> Result<DomainSpec, Error> {
        resolve_domain(arg, self.common.n, &self.params)
    }

    fn output_path(&self) -> Option<PathBuf> {
        let p = self.common.output.as_ref()?;
        match std::env::var_os(OUTPUT_DIR_ENV) {
            Some(dir) if p.is_relative() => Some(PathBuf::from(dir).join(p)),
            _ => Some(p.clone()),
        }
    }

    fn emit(&self, text: &str, out: &mut dyn Write) -> Result<(), Error> {
        match self.output_path() {
            Some(path) => std::fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
            None => out.write_all(text.as_bytes()).map_err(|e| Error::Io(e.to_string())),
        }
    }

    fn format(&self, default: Format) -> Format {
        self.common.format.unwrap_or(default)
    }

    fn json_only(&self, what: &str) -> Result<(), Error> {
        match self.common.format {
            Some(Format::Csv) => Err(Error::Argument(format!("`{what}` has no CSV form"))),
            _ => Ok(()),
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, Error> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn csv_text(version: &str, header: Vec<String>, rows: impl IntoIterator<Item = Vec<String>>) -> Result<String, Error> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).map_err(io)?;
    for r in rows {
        w.write_record(&r).map_err(io)?;
    }
    let body = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(format!("{version}\n{}", String::from_utf8_lossy(&body)))
}

fn coord_header(dim: usize) -> Vec<String> {
    (1..=dim).map(|k| format!("x{k}")).collect()
}

fn fmt(x: f64) -> String {
    format!("{x:e}")
}

fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Error> {
    let c = &cli.common;
    let ctx = Ctx {
        common: c,
        shell: positive("shell", c.shell)?,
        samples: positive_count("samples", c.samples)?,
        boundary_samples: positive_count("boundary-samples", c.boundary_samples)?,
        seed: c.seed.unwrap_or(DEFAULT_SEED),
        tol: positive("tol", c.tol)?,
        params: parse_params(&c.params)?,
    };
    match &cli.command {
        Command::Catalog => catalog_cmd(&ctx, out),
        Command::Analyze { domain, point, gamma } => {
            ctx.json_only("analyze")?;
            let spec = ctx.domain(domain)?;
            if point.len() != 2 * spec.n() {
                return Err(Error::Argument(format!(
                    "--point needs {} real coordinates for n = {}",
                    2 * spec.n(),
                    spec.n()
                )));
            }
            let a = analyze_point(&spec, &RealPoint(point.clone()), *gamma)?;
            ctx.emit(&to_json(&a)?, out)?;
            Ok(EXIT_PASS)
        }
        Command::Classify { domain, gamma } => {
            let spec = ctx.domain(domain)?;
            let mut s = classify_sweep(&spec, ctx.samples.unwrap_or(BOUNDARY_SAMPLES), ctx.seed, *gamma)?;
            if c.no_meta {
                s.runtime_secs = None;
            }
            let text = match ctx.format(Format::Json) {
                Format::Json => to_json(&s)?,
                Format::Csv => {
                    let mut h = coord_header(2 * spec.n());
                    h.extend(
                        [
                            "min_eig_L_CT",
                            "min_eig_H_RT",
                            "min_eig_H_CT",
                            "min_eig_L_RT",
                            "cone_min",
                            "max_gamma",
                            "convex",
                            "pseudoconvex",
                            "c_convex",
                            "gamma_psh",
                        ]
                        .map(String::from),
                    );
                    let rows = s.points.iter().map(|p| {
                        let mut r: Vec<String> = p.point.iter().map(|&x| fmt(x)).collect();
                        r.extend(
                            [p.min_eig_l_ct, p.min_eig_h_rt, p.min_eig_h_ct, p.min_eig_l_rt, p.cone_min, p.max_gamma]
                                .map(fmt),
                        );
                        r.extend([p.convex, p.pseudoconvex, p.c_convex, p.gamma_psh].map(|b| b.to_string()));
                        r
                    });
                    csv_text(CLASSIFY_CSV_VERSION, h, rows)?
                }
            };
            ctx.emit(&text, out)?;
            Ok(EXIT_PASS)
        }
        Command::Verify { kind, domain, gamma, side, certify } => {
            let name = match kind {
                KindArg::Oka => "oka",
                KindArg::Convex => "convex",
                KindArg::Cconvex => "cconvex",
                KindArg::Psh => "psh",
                KindArg::Gamma => "gamma",
            };
            let kind = TheoremKind::parse(name, *gamma)?;
            let spec = ctx.domain(domain)?;
            let mut opts = VerifyOptions::new(&spec);
            opts.shell = ctx.shell.unwrap_or(opts.shell);
            opts.samples = ctx.samples.unwrap_or(DEFAULT_SAMPLES);
            opts.hypothesis_samples = ctx.boundary_samples.unwrap_or(opts.hypothesis_samples);
            opts.seed = ctx.seed;
            opts.tol = ctx.tol.unwrap_or(opts.tol);
            opts.side = match side {
                SideArg::Inside => Side::Inside,
                SideArg::Outside => Side::Outside,
            };
            opts.certify = *certify;
            let mut report = verify_theorem(kind, &spec, &opts)?;
            if c.no_meta {
                report.runtime_secs = None;
            }
            let text = match ctx.format(Format::Json) {
                Format::Json => to_json(&report)?,
                Format::Csv => rows_csv(&report, spec.n())?,
            };
            ctx.emit(&text, out)?;
            let _ = writeln!(
                err,
                "{} {} on {}: min slack {:.3e} (tolerance {:.1e})",
                if report.pass { "PASS" } else { "FAIL" },
                report.kind.name(),
                report.domain,
                report.min_slack,
                report.tolerance
            );
            Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
        }
        Command::Df { domain, gamma } => {
            ctx.json_only("df")?;
            match (domain, gamma) {
                (None, Some(g)) => {
                    let eta = df_exponent(*g)?;
                    let text = match c.format {
                        Some(Format::Json) => to_json(&serde_json::json!({ "gamma": g, "eta": eta }))?,
                        _ => format!("{eta:.12}\n"),
                    };
                    ctx.emit(&text, out)?;
                    Ok(EXIT_PASS)
                }
                (Some(d), None) => {
                    let spec = ctx.domain(d)?;
                    let mut opts = DfOptions::new(&spec);
                    opts.shell = ctx.shell.unwrap_or(opts.shell);
                    opts.shell_samples = ctx.samples.unwrap_or(opts.shell_samples);
                    opts.boundary_samples = ctx.boundary_samples.unwrap_or(opts.boundary_samples);
                    opts.seed = ctx.seed;
                    opts.tol = ctx.tol.unwrap_or(opts.tol);
                    let mut r = df_verify(&spec, &opts)?;
                    if c.no_meta {
                        r.runtime_secs = None;
                    }
                    ctx.emit(&to_json(&r)?, out)?;
                    let _ = writeln!(
                        err,
                        "{} {}: gamma* {:.6}, eta {:.6}{}",
                        if r.pass { "PASS" } else { "FAIL" },
                        r.domain,
                        r.gamma_star,
                        r.eta,
                        if r.certified { String::new() } else { format!(" ({})", r.message) }
                    );
                    Ok(if r.pass { EXIT_PASS } else { EXIT_FAIL })
                }
                _ => Err(Error::Argument("df takes either a domain or --gamma".into())),
            }
        }
        Command::Sweep { domain } => {
            let spec = ctx.domain(domain)?;
            let start = Instant::now();
            let rows = sweep(&spec, ctx.samples.unwrap_or(BOUNDARY_SAMPLES), ctx.seed)?;
            let text = match ctx.format(Format::Csv) {
                Format::Csv => {
                    let mut h = coord_header(2 * spec.n());
                    h.extend(["min_eig_L_CT", "min_eig_H_RT", "max_gamma", "eta"].map(String::from));
                    let body = rows.iter().map(|r| {
                        let mut v: Vec<String> = r.point.iter().map(|&x| fmt(x)).collect();
                        v.extend([r.min_eig_l_ct, r.min_eig_h_rt, r.max_gamma, r.eta].map(fmt));
                        v
                    });
                    csv_text(SWEEP_CSV_VERSION, h, body)?
                }
                Format::Json => {
                    let runtime = (!c.no_meta).then(|| start.elapsed().as_secs_f64());
                    to_json(&serde_json::json!({
                        "domain": spec.name,
                        "seed": ctx.seed,
                        "rows": rows,
                        "runtime_secs": runtime,
                    }))?
                }
            };
            ctx.emit(&text, out)?;
            Ok(EXIT_PASS)
        }
    }
}

fn rows_csv(report: &TheoremReport, n: usize) -> Result<String, Error> {
    let mut h = vec!["index".to_string()];
    h.extend(coord_header(2 * n));
    h.extend(["delta", "slack"].map(String::from));
    let rows = report.rows.iter().map(|r| {
        let mut v = vec![r.index.to_string()];
        v.extend(r.point.iter().map(|&x| fmt(x)));
        v.extend([r.delta, r.slack].map(fmt));
        v
    });
    csv_text(ROWS_CSV_VERSION, h, rows)
}

#[derive(Serialize)]
struct CatalogEntry<'a> {
    id: &'a str,
    description: &'a str,
}

fn catalog_cmd(ctx: &Ctx, out: &mut dyn Write) -> Result<i32, Error> {
    let entries: Vec<CatalogEntry> =
        catalog::IDS.iter().map(|(id, description)| CatalogEntry { id, description }).collect();
    let text = match ctx.common.format {
        Some(Format::Json) => to_json(&entries)?,
        Some(Format::Csv) => csv_text(
            "# levi catalog v1",
            vec!["id".into(), "description".into()],
            entries.iter().map(|e| vec![e.id.to_string(), e.description.to_string()]),
        )?,
        None => entries.iter().map(|e| format!("{:<24}{}\n", e.id, e.description)).collect(),
    };
    ctx.emit(&text, out)?;
    Ok(EXIT_PASS)
}

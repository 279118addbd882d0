//! The `hyplab` command line: single-shot evaluations and batch scans, all
//! emitted as the same CSV/JSON tables.
//!
//! Exit codes: 0 success, 1 usage, 2 invalid input or data error, 3 numeric
//! failure.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use crate::automorphic::{
    eisenstein, load_maass_forms, maass_eval, weyl_sum_eisenstein, EisensteinParams, Parity,
};
use crate::counting::{brute_force_count, count, heegner_error_average, PointSpec};
use crate::experiment::{
    emit, run, run_spec_scan, table, Cell, ExperimentConfig, ExperimentKind, ExperimentResult,
    OutputFormat,
};
use crate::halfplane::Point;
use crate::kernels::{sht_ball, sht_numeric, sht_smoothed, KernelSpec};
use crate::qforms::heegner_points;
use crate::specfun::{cgamma, dirichlet_l, gauss_2f1, kbessel, zeta};
use crate::spectral::{load_eigenvalues, spectral_exp_sum, weyl_law_deficit};
use crate::{invalid, Error, Result};

#[derive(Parser, Debug)]
#[command(name = "hyplab", version, about = "Hyperbolic lattice counting over Heegner points")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Table format.
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<OutputFormat>,
    /// Rayon thread budget (0 = library default).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// JSON config file for scans; explicit flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for sampled discriminant lists.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print the resolved scan config instead of running it.
    #[arg(long, global = true)]
    dry_run: bool,
}

fn parse_format(s: &str) -> std::result::Result<OutputFormat, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Args, Debug, Default)]
struct ScanArgs {
    /// Fundamental discriminants, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    d_list: Vec<i64>,
    /// Counting thresholds X >= 2, comma separated.
    #[arg(long, value_delimiter = ',')]
    x_grid: Vec<f64>,
    /// Spectral parameters t, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    t_grid: Vec<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduced forms and Heegner points of a discriminant.
    Heegner {
        #[arg(short = 'D', allow_hyphen_values = true)]
        d: i64,
        /// Emit one JSON object {"D", "h", "forms", "points"} instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Lattice count N(z, w, X); z and w accept `i`, `rho`, or `x+yi`.
    Count {
        z: String,
        w: String,
        x: f64,
        /// Use the brute-force oracle instead of the fast counter.
        #[arg(long)]
        brute: bool,
    },
    /// Counting error averaged over the Heegner points of one discriminant.
    ErrorAvg {
        #[arg(allow_negative_numbers = true)]
        d: i64,
        x: f64,
    },
    /// Error-term scan over (D, X) with normalized columns and slopes.
    ErrorScan(ScanArgs),
    /// Equidistribution discrepancies of Heegner points.
    EquiScan(ScanArgs),
    /// Sup-norm of E(z, 1/2+it) over a fundamental-domain grid.
    SupnormScan(ScanArgs),
    /// Class numbers by enumeration against the class number formula.
    ClassScan(ScanArgs),
    /// Weyl-sum identity residuals over (D, t).
    WeylVerify(ScanArgs),
    /// Both sides of the Weyl-sum identity at one (D, t).
    Weylsum {
        #[arg(allow_negative_numbers = true)]
        d: i64,
        #[arg(allow_negative_numbers = true)]
        t: f64,
    },
    /// Ball-kernel transform h_R(t).
    Sht {
        r: f64,
        #[arg(allow_negative_numbers = true)]
        t: f64,
        /// Also evaluate the defining integral as a cross-check column.
        #[arg(long)]
        numeric: bool,
    },
    /// Smoothed-kernel transform h(t) at level X = 2 cosh Y, width delta.
    ShtSmoothed {
        x: f64,
        delta: f64,
        #[arg(allow_negative_numbers = true)]
        t: f64,
        /// Use the minorant (k-) instead of the majorant (k+).
        #[arg(long)]
        minus: bool,
        /// Also evaluate the defining integral as a cross-check column.
        #[arg(long)]
        numeric: bool,
    },
    /// Spectral exponential sum S(T, X) from an eigenvalue file.
    SpecSum { file: PathBuf, t: f64, x: f64 },
    /// Shape table of S(T, X) over (T, X) grids from an eigenvalue file.
    SpecScan {
        file: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        t_grid: Vec<f64>,
        #[arg(long, value_delimiter = ',', required = true)]
        x_grid: Vec<f64>,
    },
    /// Eisenstein series E(z, 1/2+it).
    Eisenstein {
        z: String,
        #[arg(allow_negative_numbers = true)]
        t: f64,
        /// Fourier truncation (default: automatic for (t, Im z)).
        #[arg(long)]
        trunc: Option<usize>,
    },
    /// Evaluate one Maass form from a JSON coefficient file.
    MaassEval {
        file: PathBuf,
        /// Zero-based index into the file's form list.
        index: usize,
        z: String,
    },
    /// Special-function evaluation.
    Specfun {
        #[command(subcommand)]
        cmd: SpecfunCmd,
    },
}

#[derive(Subcommand, Debug)]
enum SpecfunCmd {
    /// Evaluate `zeta re im`, `gamma re im`, `kbessel nu_re nu_im y`,
    /// `lchi re im d`, or `hyp2f1 a_re a_im b_re b_im c_re c_im z_re z_im`.
    Eval {
        function: String,
        #[arg(allow_negative_numbers = true)]
        args: Vec<f64>,
    },
}

/// Parses a CLI point: `i`, `rho`, or `x+yi`.
fn parse_point(s: &str) -> Result<PointSpec> {
    match s {
        "i" => Ok(PointSpec::unit_i()),
        "rho" => Ok(PointSpec::rho()),
        _ => Ok(PointSpec::from(s.parse::<Point>()?)),
    }
}

fn complex_cells(v: Complex64) -> [Cell; 2] {
    [Cell::Num(v.re), Cell::Num(v.im)]
}

fn deliver(res: &ExperimentResult, format: OutputFormat, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => emit(res, format, path),
        None => {
            print!("{}", res.render(format));
            Ok(())
        }
    }
}

fn resolve_scan(cli: &Cli, kind: ExperimentKind, args: &ScanArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::from_json_file(path)?,
        None => ExperimentConfig::new(kind),
    };
    cfg.kind = kind;
    if !args.d_list.is_empty() {
        cfg.d_list = args.d_list.clone();
    }
    if !args.x_grid.is_empty() {
        cfg.x_grid = args.x_grid.clone();
    }
    if !args.t_grid.is_empty() {
        cfg.t_grid = args.t_grid.clone();
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    if let Some(format) = cli.format {
        cfg.format = format;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(threads) = cli.threads {
        cfg.threads = threads;
    }
    Ok(cfg)
}

fn run_scan(cli: &Cli, kind: ExperimentKind, args: &ScanArgs) -> Result<()> {
    let cfg = resolve_scan(cli, kind, args)?;
    if cli.dry_run {
        cfg.validate()?;
        println!("{}", cfg.to_json_pretty());
        return Ok(());
    }
    let res = run(&cfg)?;
    deliver(&res, cfg.format, cfg.out.as_deref())
}

fn dispatch(cli: &Cli) -> Result<()> {
    let format = cli.format.unwrap_or_default();
    let out = cli.out.as_deref();
    match &cli.cmd {
        Command::ErrorScan(a) => run_scan(cli, ExperimentKind::ErrorScan, a),
        Command::EquiScan(a) => run_scan(cli, ExperimentKind::EquiScan, a),
        Command::SupnormScan(a) => run_scan(cli, ExperimentKind::SupnormScan, a),
        Command::ClassScan(a) => run_scan(cli, ExperimentKind::ClassScan, a),
        Command::WeylVerify(a) => run_scan(cli, ExperimentKind::WeylVerify, a),
        Command::Heegner { d, json } => {
            let set = heegner_points(*d)?;
            if *json {
                let obj = serde_json::json!({
                    "D": set.d,
                    "h": set.h,
                    "forms": set.forms.iter().map(|f| [f.a, f.b, f.c]).collect::<Vec<_>>(),
                    "points": set.points.iter().map(|z| [z.x, z.y]).collect::<Vec<_>>(),
                });
                let text = format!("{obj:#}\n");
                return match out {
                    Some(path) => std::fs::write(path, text).map_err(Error::from),
                    None => {
                        print!("{text}");
                        Ok(())
                    }
                };
            }
            let rows = set
                .forms
                .iter()
                .zip(&set.points)
                .map(|(f, z)| {
                    vec![
                        Cell::Int(*d),
                        Cell::Int(f.a),
                        Cell::Int(f.b),
                        Cell::Int(f.c),
                        Cell::Num(z.x),
                        Cell::Num(z.y),
                    ]
                })
                .collect();
            let mut res = table("heegner", &["d", "a", "b", "c", "x", "y"], rows);
            res.meta.insert("h".into(), set.h.to_string());
            deliver(&res, format, out)
        }
        Command::Count { z, w, x, brute } => {
            let zs = parse_point(z)?;
            let ws = parse_point(w)?;
            let r = if *brute {
                brute_force_count(zs, ws, *x)?
            } else {
                count(zs, ws, *x)?
            };
            let rows = vec![vec![
                Cell::Text(z.clone()),
                Cell::Text(w.clone()),
                Cell::Num(*x),
                Cell::Int(r.count as i64),
                Cell::Num(r.main_term),
                Cell::Num(r.error),
                Cell::Int(r.boundary_ambiguous as i64),
            ]];
            let res = table(
                if *brute { "count-brute" } else { "count" },
                &["z", "w", "x", "count", "main_term", "error", "boundary_ambiguous"],
                rows,
            );
            deliver(&res, format, out)
        }
        Command::ErrorAvg { d, x } => {
            let avg = heegner_error_average(*d, *x, None)?;
            let rows = vec![vec![
                Cell::Int(avg.d),
                Cell::Int(avg.h as i64),
                Cell::Num(avg.x),
                Cell::Num(avg.average),
                Cell::Int(avg.boundary_ambiguous as i64),
            ]];
            let res = table(
                "error-avg",
                &["d", "h", "x", "e", "boundary_ambiguous"],
                rows,
            );
            deliver(&res, format, out)
        }
        Command::Weylsum { d, t } => {
            let r = weyl_sum_eisenstein(*d, *t)?;
            let units_ambiguous = *d == -3 || *d == -4;
            let mut row = vec![Cell::Int(r.d), Cell::Num(r.t)];
            row.extend(complex_cells(r.direct));
            row.extend(complex_cells(r.formula));
            row.push(Cell::Num(r.residual));
            row.push(Cell::Num(r.residual_weighted()));
            row.push(Cell::Text(
                if units_ambiguous { "units-ambiguous" } else { "ok" }.into(),
            ));
            let res = table(
                "weylsum",
                &[
                    "d",
                    "t",
                    "direct_re",
                    "direct_im",
                    "formula_re",
                    "formula_im",
                    "residual",
                    "residual_weighted",
                    "status",
                ],
                vec![row],
            );
            deliver(&res, format, out)
        }
        Command::Sht { r, t, numeric } => {
            let mut columns = vec!["r", "t", "value"];
            let mut row = vec![
                Cell::Num(*r),
                Cell::Num(*t),
                Cell::Num(sht_ball(*r, Complex64::new(*t, 0.0))?),
            ];
            if *numeric {
                columns.push("quadrature");
                row.push(Cell::Num(sht_numeric(&KernelSpec::Ball { r: *r }, *t)?));
            }
            deliver(&table("sht", &columns, vec![row]), format, out)
        }
        Command::ShtSmoothed { x, delta, t, minus, numeric } => {
            let plus = !*minus;
            let mut columns = vec!["x", "delta", "sign", "t", "value"];
            let mut row = vec![
                Cell::Num(*x),
                Cell::Num(*delta),
                Cell::Text(if plus { "+" } else { "-" }.into()),
                Cell::Num(*t),
                Cell::Num(sht_smoothed(*x, *delta, plus, Complex64::new(*t, 0.0))?),
            ];
            if *numeric {
                columns.push("quadrature");
                let spec = KernelSpec::Smoothed { x: *x, delta: *delta, plus };
                row.push(Cell::Num(sht_numeric(&spec, *t)?));
            }
            deliver(&table("sht-smoothed", &columns, vec![row]), format, out)
        }
        Command::SpecSum { file, t, x } => {
            let list = load_eigenvalues(file)?;
            let s = spectral_exp_sum(&list, *t, *x)?;
            let rows = vec![vec![
                Cell::Num(*t),
                Cell::Num(*x),
                Cell::Int(list.count_up_to(*t) as i64),
                Cell::Num(s.re),
                Cell::Num(s.im),
                Cell::Num(s.norm()),
                Cell::Num(weyl_law_deficit(&list, *t)),
                Cell::Int(!list.covers(*t) as i64),
            ]];
            let mut res = table(
                "spec-sum",
                &["t", "x", "count", "s_re", "s_im", "s_abs", "deficit", "extrapolated"],
                rows,
            );
            res.meta.insert("source".into(), list.source.clone());
            deliver(&res, format, out)
        }
        Command::SpecScan { file, t_grid, x_grid } => {
            let list = load_eigenvalues(file)?;
            let res = run_spec_scan(&list, t_grid, x_grid)?;
            deliver(&res, format, out)
        }
        Command::Eisenstein { z, t, trunc } => {
            let z: Point = z.parse()?;
            let params = match trunc {
                Some(n) => EisensteinParams::new(*t, *n)?,
                None => EisensteinParams::auto(*t, z.y)?,
            };
            let v = eisenstein(z, &params)?;
            let rows = vec![vec![
                Cell::Num(z.x),
                Cell::Num(z.y),
                Cell::Num(*t),
                Cell::Int(params.trunc as i64),
                Cell::Num(v.re),
                Cell::Num(v.im),
                Cell::Num(v.norm()),
            ]];
            let res = table(
                "eisenstein",
                &["x", "y", "t", "trunc", "re", "im", "abs"],
                rows,
            );
            deliver(&res, format, out)
        }
        Command::MaassEval { file, index, z } => {
            let forms = load_maass_forms(file)?;
            let form = forms.get(*index).ok_or_else(|| {
                invalid(format!(
                    "form index {index} out of range; file holds {}",
                    forms.len()
                ))
            })?;
            let z: Point = z.parse()?;
            let v = maass_eval(form, z)?;
            let rows = vec![vec![
                Cell::Int(*index as i64),
                Cell::Num(form.t),
                Cell::Text(match form.parity {
                    Parity::Even => "even".into(),
                    Parity::Odd => "odd".into(),
                }),
                Cell::Num(z.x),
                Cell::Num(z.y),
                Cell::Num(v),
            ]];
            let res = table(
                "maass-eval",
                &["index", "t", "parity", "x", "y", "value"],
                rows,
            );
            deliver(&res, format, out)
        }
        Command::Specfun { cmd: SpecfunCmd::Eval { function, args } } => {
            let need = |n: usize| -> Result<()> {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(invalid(format!(
                        "specfun eval {function}: expected {n} numeric arguments, got {}",
                        args.len()
                    )))
                }
            };
            let value = match function.as_str() {
                "zeta" => {
                    need(2)?;
                    zeta(Complex64::new(args[0], args[1]))?
                }
                "gamma" => {
                    need(2)?;
                    cgamma(Complex64::new(args[0], args[1]))?
                }
                "kbessel" => {
                    need(3)?;
                    kbessel(Complex64::new(args[0], args[1]), args[2])?
                }
                "lchi" => {
                    need(3)?;
                    let d = args[2];
                    if d.fract() != 0.0 {
                        return Err(invalid("specfun eval lchi: d must be an integer"));
                    }
                    dirichlet_l(Complex64::new(args[0], args[1]), d as i64)?
                }
                "hyp2f1" => {
                    need(8)?;
                    gauss_2f1(
                        Complex64::new(args[0], args[1]),
                        Complex64::new(args[2], args[3]),
                        Complex64::new(args[4], args[5]),
                        Complex64::new(args[6], args[7]),
                    )?
                }
                other => {
                    return Err(invalid(format!(
                        "specfun eval: unknown function {other:?}; expected zeta, gamma, \
                         kbessel, lchi, or hyp2f1"
                    )))
                }
            };
            let mut row = vec![Cell::Text(function.clone())];
            row.extend(complex_cells(value));
            let res = table("specfun", &["function", "re", "im"], vec![row]);
            deliver(&res, format, out)
        }
    }
}

/// Entry point for the binary; returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let body = || dispatch(&cli);
    let outcome = match cli.threads {
        Some(n) if n > 0 && !matches!(
            cli.cmd,
            Command::ErrorScan(_)
                | Command::EquiScan(_)
                | Command::SupnormScan(_)
                | Command::ClassScan(_)
                | Command::WeylVerify(_)
        ) =>
        {
            match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
                Ok(pool) => pool.install(body),
                Err(e) => Err(invalid(format!("thread pool: {e}"))),
            }
        }
        _ => body(),
    };
    match outcome {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("hyplab: {err}");
            match err {
                Error::InvalidInput(_) | Error::Data(_) => 2,
                Error::Numeric(_) => 3,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn parses_points() {
        assert!(matches!(parse_point("i"), Ok(PointSpec::Quadratic { .. })));
        assert!(matches!(parse_point("rho"), Ok(PointSpec::Quadratic { .. })));
        let p = parse_point("0.25+2.5i").unwrap();
        let z = p.to_point().unwrap();
        assert_eq!((z.x, z.y), (0.25, 2.5));
        assert!(parse_point("nonsense").is_err());
    }

    #[test]
    fn scan_flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cfg.json");
        std::fs::write(
            &path,
            r#"{"kind": "error-scan", "d_list": [-3], "x_grid": [4.0], "seed": 9}"#,
        )
        .unwrap();
        let cli = Cli::try_parse_from([
            "hyplab",
            "error-scan",
            "--config",
            path.to_str().unwrap(),
            "--d-list",
            "-4,-8",
            "--threads",
            "2",
        ])
        .unwrap();
        let args = match &cli.cmd {
            Command::ErrorScan(a) => a,
            _ => unreachable!(),
        };
        let cfg = resolve_scan(&cli, ExperimentKind::ErrorScan, args).unwrap();
        assert_eq!(cfg.d_list, vec![-4, -8]);
        assert_eq!(cfg.x_grid, vec![4.0]);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.threads, 2);
    }

    #[test]
    fn negative_positionals_parse() {
        let cli = Cli::try_parse_from(["hyplab", "error-avg", "-4", "10"]).unwrap();
        match cli.cmd {
            Command::ErrorAvg { d, x } => {
                assert_eq!(d, -4);
                assert_eq!(x, 10.0);
            }
            _ => unreachable!(),
        }
        let cli = Cli::try_parse_from(["hyplab", "specfun", "eval", "zeta", "2", "0"]).unwrap();
        match cli.cmd {
            Command::Specfun { cmd: SpecfunCmd::Eval { function, args } } => {
                assert_eq!(function, "zeta");
                assert_eq!(args, vec![2.0, 0.0]);
            }
            _ => unreachable!(),
        }
    }
}

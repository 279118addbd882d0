//! Reproducible scan drivers over discriminants and spectral parameters,
//! with CSV/JSON table emission.
//!
//! A scan is described by an [`ExperimentConfig`] (loadable from JSON, CLI
//! flags override file values) and produces an [`ExperimentResult`]: a typed
//! table plus sorted `key=value` metadata. Rows are computed independently,
//! in parallel when a thread budget allows it, and merged in key order, so a
//! given config and seed reproduce identical row content on any thread
//! budget. One failing row never aborts a scan; failures land in the row's
//! `status` column.
//!
//! Desk scale cannot reach the asymptotic regimes behind the error-term
//! exponents, so scans report normalized columns and fitted slopes rather
//! than asserting exponents.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::automorphic::{sufficient_trunc, weyl_sum_eisenstein, EisensteinContext};
use crate::counting::heegner_error_average;
use crate::halfplane::{distance, Point};
use crate::qforms::{class_group, class_number_formula, heegner_points, is_fundamental};
use crate::quad::adaptive_simpson;
use crate::specfun::dirichlet_l;
use crate::spectral::{spectral_exp_sum, weyl_law_deficit, EigenvalueList};
use crate::{data_err, invalid, numeric, Result};

/// The scan families the runner knows how to execute.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Heegner-averaged counting error against normalizing powers of X.
    ErrorScan,
    /// Equidistribution discrepancies of Heegner points.
    EquiScan,
    /// Sup-norm of the Eisenstein series over a fundamental-domain grid.
    SupnormScan,
    /// Class numbers, enumeration against the class number formula.
    ClassScan,
    /// Weyl-sum identity residuals.
    WeylVerify,
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ExperimentKind::ErrorScan => "error-scan",
            ExperimentKind::EquiScan => "equi-scan",
            ExperimentKind::SupnormScan => "supnorm-scan",
            ExperimentKind::ClassScan => "class-scan",
            ExperimentKind::WeylVerify => "weyl-verify",
        };
        f.write_str(name)
    }
}

impl FromStr for ExperimentKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "error-scan" => Ok(ExperimentKind::ErrorScan),
            "equi-scan" => Ok(ExperimentKind::EquiScan),
            "supnorm-scan" => Ok(ExperimentKind::SupnormScan),
            "class-scan" => Ok(ExperimentKind::ClassScan),
            "weyl-verify" => Ok(ExperimentKind::WeylVerify),
            other => Err(invalid(format!(
                "unknown scan kind {other:?}; expected error-scan, equi-scan, \
                 supnorm-scan, class-scan, or weyl-verify"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(invalid(format!("unknown format {other:?}; expected csv or json"))),
        }
    }
}

/// A resolved scan description. Grids the scan does not use may stay empty.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    /// Fundamental discriminants to visit (scans sort by |D|).
    #[serde(default)]
    pub d_list: Vec<i64>,
    /// Counting thresholds X >= 2.
    #[serde(default)]
    pub x_grid: Vec<f64>,
    /// Spectral parameters t.
    #[serde(default)]
    pub t_grid: Vec<f64>,
    /// Output file; stdout when absent.
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
    /// Seeds the discriminant sampler when `d_list` is empty.
    #[serde(default)]
    pub seed: u64,
    /// Rayon pool size; 0 keeps the library default.
    #[serde(default)]
    pub threads: usize,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        ExperimentConfig {
            kind,
            d_list: Vec::new(),
            x_grid: Vec::new(),
            t_grid: Vec::new(),
            out: None,
            format: OutputFormat::Csv,
            seed: 0,
            threads: 0,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| data_err(format!("{}: {e}", path.display())))
    }

    /// Checks the grid invariants the scan kind relies on.
    pub fn validate(&self) -> Result<()> {
        for &x in &self.x_grid {
            if !x.is_finite() || x < 2.0 {
                return Err(invalid(format!("x_grid values must be >= 2, got {x}")));
            }
        }
        for &t in &self.t_grid {
            if !t.is_finite() {
                return Err(invalid("t_grid values must be finite"));
            }
        }
        match self.kind {
            ExperimentKind::ErrorScan => {
                if self.d_list.is_empty() {
                    return Err(invalid("error-scan: d_list must be nonempty"));
                }
                if self.x_grid.is_empty() {
                    return Err(invalid("error-scan: x_grid must be nonempty"));
                }
                if let Some(&x) = self.x_grid.iter().find(|x| **x > 1e6) {
                    return Err(invalid(format!(
                        "error-scan: X = {x} beyond the counting budget 1e6"
                    )));
                }
            }
            ExperimentKind::EquiScan => {
                // Empty d_list means "draw a 50-discriminant sample"; the
                // window column needs |t| >= 0.1 on the critical line.
                for &t in &self.t_grid {
                    if t.abs() < 0.1 {
                        return Err(invalid("equi-scan: window requires |t| >= 0.1"));
                    }
                }
            }
            ExperimentKind::SupnormScan => {
                if self.t_grid.is_empty() {
                    return Err(invalid("supnorm-scan: t_grid must be nonempty"));
                }
                for &t in &self.t_grid {
                    if t.abs() < 0.1 || t.abs() > 30.0 {
                        return Err(invalid(format!(
                            "supnorm-scan: need 0.1 <= |t| <= 30, got {t}"
                        )));
                    }
                }
            }
            ExperimentKind::ClassScan => {
                if self.d_list.is_empty() {
                    return Err(invalid("class-scan: d_list must be nonempty"));
                }
            }
            ExperimentKind::WeylVerify => {
                if self.d_list.is_empty() {
                    return Err(invalid("weyl-verify: d_list must be nonempty"));
                }
                if self.t_grid.is_empty() {
                    return Err(invalid("weyl-verify: t_grid must be nonempty"));
                }
                for &t in &self.t_grid {
                    if t.abs() < 0.1 {
                        return Err(invalid("weyl-verify: need |t| >= 0.1"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// One table entry. `Null` marks columns an error row could not produce.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Null,
}

impl Cell {
    /// CSV image: floats carry 17 significant digits, '.' decimal point.
    pub fn to_csv_field(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format!("{v:.16e}"),
            Cell::Text(t) => t.clone(),
            Cell::Null => String::new(),
        }
    }

    fn to_json_value(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => serde_json::Value::from(*v),
            Cell::Num(v) if v.is_finite() => serde_json::Value::from(*v),
            Cell::Text(t) => serde_json::Value::from(t.as_str()),
            _ => serde_json::Value::Null,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(v) => Some(*v as f64),
            Cell::Num(v) => Some(*v),
            _ => None,
        }
    }
}

/// A finished scan: column names, rows sorted by the scan's primary key,
/// metadata echoing the config, and one volatile timing line kept out of the
/// reproducible part.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Sorted key=value pairs; everything here is reproducible.
    pub meta: BTreeMap<String, String>,
    /// `timestamp=... elapsed_ms=...`, different on every run.
    pub volatile: String,
}

impl ExperimentResult {
    /// Looks a column up by name in a row.
    pub fn get<'a>(&self, row: &'a [Cell], column: &str) -> Option<&'a Cell> {
        self.columns.iter().position(|c| c == column).map(|i| &row[i])
    }

    /// Metadata comment block, header row, then data; RFC-4180 quoting.
    pub fn to_csv(&self) -> String {
        let mut head = String::new();
        for (k, v) in &self.meta {
            head.push_str(&format!("# {k}={v}\n"));
        }
        head.push_str(&format!("# {}\n", self.volatile));
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("csv header");
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.to_csv_field()))
                .expect("csv row");
        }
        head.push_str(&String::from_utf8(w.into_inner().expect("csv flush")).expect("utf8"));
        head
    }

    /// `{"meta": {...}, "rows": [...]}` with rows as column-keyed objects.
    pub fn to_json(&self) -> String {
        let mut meta = serde_json::Map::new();
        for (k, v) in &self.meta {
            meta.insert(k.clone(), serde_json::Value::from(v.as_str()));
        }
        meta.insert("run".into(), serde_json::Value::from(self.volatile.as_str()));
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (name, cell) in self.columns.iter().zip(row) {
                    obj.insert(name.clone(), cell.to_json_value());
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({ "meta": serde_json::Value::Object(meta), "rows": rows });
        serde_json::to_string_pretty(&doc).expect("json")
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

/// Writes the rendered table to `path`.
pub fn emit(result: &ExperimentResult, format: OutputFormat, path: &Path) -> Result<()> {
    std::fs::write(path, result.render(format))?;
    Ok(())
}

/// Runs the configured scan on the configured thread budget.
pub fn run(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let body = || match cfg.kind {
        ExperimentKind::ErrorScan => run_error_scan(cfg),
        ExperimentKind::EquiScan => run_equi_scan(cfg),
        ExperimentKind::SupnormScan => run_supnorm_scan(cfg, 48),
        ExperimentKind::ClassScan => run_class_scan(cfg),
        ExperimentKind::WeylVerify => run_weyl_verify(cfg),
    };
    if cfg.threads == 0 {
        body()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| invalid(format!("thread pool: {e}")))?;
        pool.install(body)
    }
}

fn base_meta(cfg: &ExperimentConfig) -> BTreeMap<String, String> {
    let join_f = |v: &[f64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    let join_i = |v: &[i64]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
    let mut m = BTreeMap::new();
    m.insert("kind".into(), cfg.kind.to_string());
    m.insert("d_list".into(), join_i(&cfg.d_list));
    m.insert("x_grid".into(), join_f(&cfg.x_grid));
    m.insert("t_grid".into(), join_f(&cfg.t_grid));
    m.insert("seed".into(), cfg.seed.to_string());
    m.insert("threads".into(), cfg.threads.to_string());
    m.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    m
}

fn finalize(
    columns: &[&str],
    rows: Vec<Vec<Cell>>,
    mut meta: BTreeMap<String, String>,
    started: Instant,
) -> ExperimentResult {
    meta.insert(
        "columns".into(),
        columns.iter().copied().collect::<Vec<_>>().join(","),
    );
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0);
    ExperimentResult {
        columns: columns.iter().map(|s| s.to_string()).collect(),
        rows,
        meta,
        volatile: format!(
            "timestamp={stamp:.3} elapsed_ms={}",
            started.elapsed().as_millis()
        ),
    }
}

/// A one-off table in the scan output format, for single-shot commands.
pub fn table(kind: &str, columns: &[&str], rows: Vec<Vec<Cell>>) -> ExperimentResult {
    let mut meta = BTreeMap::new();
    meta.insert("kind".into(), kind.to_string());
    meta.insert("version".into(), env!("CARGO_PKG_VERSION").into());
    finalize(columns, rows, meta, Instant::now())
}

/// Discriminants sorted by |D| ascending, duplicates dropped.
fn sorted_d(list: &[i64]) -> Vec<i64> {
    let mut v = list.to_vec();
    v.sort_by_key(|d| d.abs());
    v.dedup();
    v
}

/// Draws `n` distinct fundamental discriminants uniformly from [lo, hi],
/// deterministically in the seed, sorted by |D|.
pub fn sample_fundamental(n: usize, lo: i64, hi: i64, seed: u64) -> Result<Vec<i64>> {
    if lo > hi || hi > -3 {
        return Err(invalid("sample_fundamental: need lo <= hi <= -3"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::BTreeSet::new();
    let mut budget = 2_000_000u64;
    while seen.len() < n {
        if budget == 0 {
            return Err(data_err(format!(
                "sample_fundamental: range [{lo}, {hi}] cannot supply {n} discriminants"
            )));
        }
        budget -= 1;
        let d = rng.gen_range(lo..=hi);
        if is_fundamental(d) {
            seen.insert(d);
        }
    }
    let mut v: Vec<i64> = seen.into_iter().collect();
    v.sort_by_key(|d| d.abs());
    Ok(v)
}

/// Rank correlation with average ranks on ties; needs two points and some
/// variation in each coordinate.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(invalid("spearman: need two equally long samples"));
    }
    let rank = |v: &[f64]| -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    };
    let rx = rank(xs);
    let ry = rank(ys);
    let n = xs.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for i in 0..xs.len() {
        let a = rx[i] - mean;
        let b = ry[i] - mean;
        sxy += a * b;
        sxx += a * a;
        syy += b * b;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(invalid("spearman: a sample is constant"));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

// ---------------------------------------------------------------- error scan

const ERROR_COLUMNS: [&str; 8] = [
    "d", "h", "x", "e", "e_over_x12", "e_over_x712", "e_over_x23", "status",
];

fn run_error_scan(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let started = Instant::now();
    let ds = sorted_d(&cfg.d_list);
    let mut xs = cfg.x_grid.clone();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();

    let tasks: Vec<(i64, f64)> = ds
        .iter()
        .flat_map(|&d| xs.iter().map(move |&x| (d, x)))
        .collect();
    let rows: Vec<Vec<Cell>> = tasks
        .par_iter()
        .map(|&(d, x)| match heegner_error_average(d, x, None) {
            Ok(avg) => {
                let e = avg.average;
                let status = if avg.boundary_ambiguous { "boundary-ambiguous" } else { "ok" };
                vec![
                    Cell::Int(d),
                    Cell::Int(avg.h as i64),
                    Cell::Num(x),
                    Cell::Num(e),
                    Cell::Num(e.abs() / x.sqrt()),
                    Cell::Num(e.abs() / x.powf(7.0 / 12.0)),
                    Cell::Num(e.abs() / x.powf(2.0 / 3.0)),
                    Cell::Text(status.into()),
                ]
            }
            Err(err) => vec![
                Cell::Int(d),
                Cell::Null,
                Cell::Num(x),
                Cell::Null,
                Cell::Null,
                Cell::Null,
                Cell::Null,
                Cell::Text(err.to_string()),
            ],
        })
        .collect();

    // Fitted log-log slope of |e| against X, one metadata entry per
    // discriminant, points with e = 0 or failed rows excluded.
    let mut meta = base_meta(cfg);
    for &d in &ds {
        let pts: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r[0] == Cell::Int(d))
            .filter_map(|r| match (&r[2], &r[3]) {
                (Cell::Num(x), Cell::Num(e)) if e.abs() > 0.0 => Some((x.ln(), e.abs().ln())),
                _ => None,
            })
            .collect();
        let key = format!("slope_d{d}");
        if pts.len() < 2 || pts.iter().all(|p| p.0 == pts[0].0) {
            meta.insert(key, "n/a".into());
            continue;
        }
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        meta.insert(key, format!("{:.6}", sxy / sxx));
    }
    Ok(finalize(&ERROR_COLUMNS, rows, meta, started))
}

// ----------------------------------------------------------------- equi scan

/// Smooth bump supported on the hyperbolic ball of radius 1.2 around i,
/// normalized to peak value 1.
pub fn builtin_bump(z: Point) -> f64 {
    const RADIUS: f64 = 1.2;
    let q = distance(z, Point::unit_i()) / RADIUS;
    if q >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - q * q)).exp()
    }
}

/// Integral of f over the standard fundamental domain against dx dy / y^2,
/// by iterated adaptive quadrature with the y-range cut at `y_top`, plus the
/// analytic tail `tail / y_top` for functions constant above the cut. A
/// function with a sharp height cutoff must pass the cutoff as `y_top` so the
/// inner integrand stays smooth. Assumes f is even in x, which holds for
/// every built-in test function.
fn fd_integral(f: &(dyn Fn(Point) -> f64 + Sync), y_top: f64, tail: f64, tol: f64) -> Result<f64> {
    if y_top <= 1.0 {
        return Err(invalid("fd_integral: y_top must exceed the domain floor"));
    }
    let inner_tol = (tol * 1e-2).max(1e-12);
    let mut outer = |x: f64| {
        let y0 = (1.0 - x * x).sqrt();
        let mut inner = |y: f64| f(Point { x, y }) / (y * y);
        adaptive_simpson(&mut inner, y0, y_top, inner_tol).unwrap_or(f64::NAN)
    };
    let half = adaptive_simpson(&mut outer, 0.0, 0.5, tol * 0.5)?;
    let total = 2.0 * half + tail / y_top;
    if !total.is_finite() {
        return Err(numeric("fundamental-domain quadrature failed"));
    }
    Ok(total)
}

const EQUI_COLUMNS: [&str; 6] = ["d", "h", "t", "disc_bump", "disc_window", "status"];

/// Discrepancy rows for the built-in bump and, when t_grid is nonempty, the
/// windowed |E(., 1/2+it)|^2 test function. An empty d_list draws a
/// 50-discriminant sample from [-9999, -3] using the seed.
fn run_equi_scan(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let started = Instant::now();
    const VOL: f64 = std::f64::consts::PI / 3.0;
    const WINDOW_Y: f64 = 2.0;
    let ds = if cfg.d_list.is_empty() {
        sample_fundamental(50, -9999, -3, cfg.seed)?
    } else {
        sorted_d(&cfg.d_list)
    };

    let mut meta = base_meta(cfg);
    meta.insert("d_list".into(), ds.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(","));
    meta.insert("bump_radius".into(), "1.2".into());
    meta.insert(
        "window_note".into(),
        format!("sharp cutoff y <= {WINDOW_Y}; desk surrogate for a smooth window"),
    );

    // The three reference integrals: a constant (sanity: its discrepancy
    // from 1 is pure quadrature error), the bump, and one window per t.
    let const_int = fd_integral(&|_| 1.0, 10.0, 1.0, 1e-8)?;
    meta.insert("sanity_const_discrepancy".into(), format!("{:.3e}", (const_int / VOL - 1.0).abs()));
    let bump_int = fd_integral(&builtin_bump, 10.0, 0.0, 1e-8)?;
    meta.insert("bump_integral".into(), format!("{bump_int:.17e}"));

    let mut window_ints: Vec<(f64, f64, EisensteinContext)> = Vec::new();
    for &t in &cfg.t_grid {
        let ctx = EisensteinContext::new(Complex64::new(0.5, t), sufficient_trunc(t, 0.86))?;
        let f = |z: Point| {
            if z.y > WINDOW_Y {
                0.0
            } else {
                ctx.eval(z, sufficient_trunc(t, z.y)).map(|v| v.norm_sqr()).unwrap_or(f64::NAN)
            }
        };
        let int = fd_integral(&f, WINDOW_Y, 0.0, 1e-8)?;
        meta.insert(format!("window_integral_t{t}"), format!("{int:.17e}"));
        window_ints.push((t, int, ctx));
    }

    let mut rows: Vec<Vec<Cell>> = Vec::new();
    for &d in &ds {
        let set = match heegner_points(d) {
            Ok(s) => s,
            Err(err) => {
                rows.push(vec![
                    Cell::Int(d),
                    Cell::Null,
                    Cell::Null,
                    Cell::Null,
                    Cell::Null,
                    Cell::Text(err.to_string()),
                ]);
                continue;
            }
        };
        let h = set.points.len() as f64;
        let bump_mean = set.points.iter().map(|&z| builtin_bump(z)).sum::<f64>() / h;
        let disc_bump = (bump_mean - bump_int / VOL).abs();
        if window_ints.is_empty() {
            rows.push(vec![
                Cell::Int(d),
                Cell::Int(set.h as i64),
                Cell::Null,
                Cell::Num(disc_bump),
                Cell::Null,
                Cell::Text("ok".into()),
            ]);
            continue;
        }
        for (t, int, ctx) in &window_ints {
            let mean: Result<f64> = set
                .points
                .par_iter()
                .map(|&z| {
                    if z.y > WINDOW_Y {
                        Ok(0.0)
                    } else {
                        Ok(ctx.eval(z, sufficient_trunc(*t, z.y))?.norm_sqr())
                    }
                })
                .try_reduce(|| 0.0, |a, b| Ok(a + b));
            match mean {
                Ok(sum) => rows.push(vec![
                    Cell::Int(d),
                    Cell::Int(set.h as i64),
                    Cell::Num(*t),
                    Cell::Num(disc_bump),
                    Cell::Num((sum / h - int / VOL).abs()),
                    Cell::Text("ok".into()),
                ]),
                Err(err) => rows.push(vec![
                    Cell::Int(d),
                    Cell::Int(set.h as i64),
                    Cell::Num(*t),
                    Cell::Num(disc_bump),
                    Cell::Null,
                    Cell::Text(err.to_string()),
                ]),
            }
        }
    }
    Ok(finalize(&EQUI_COLUMNS, rows, meta, started))
}

// -------------------------------------------------------------- supnorm scan

const SUPNORM_COLUMNS: [&str; 6] = ["t", "sup", "sup_over_t38", "x_at", "y_at", "status"];

/// Maximum of |E(z, 1/2+it)| over an n-by-n grid on the fundamental domain
/// clipped at y <= 3, with the t^{3/8} normalization.
pub fn run_supnorm_scan(cfg: &ExperimentConfig, n: usize) -> Result<ExperimentResult> {
    let started = Instant::now();
    const Y_CAP: f64 = 3.0;
    let mut ts = cfg.t_grid.clone();
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup();

    let rows: Vec<Vec<Cell>> = ts
        .iter()
        .map(|&t| {
            let scan = || -> Result<(f64, f64, f64)> {
                let ctx = EisensteinContext::new(
                    Complex64::new(0.5, t),
                    sufficient_trunc(t, 0.86),
                )?;
                let best = (0..n)
                    .into_par_iter()
                    .map(|i| -> Result<(f64, f64, f64)> {
                        let x = -0.5 + (i as f64 + 0.5) / n as f64;
                        let y0 = (1.0 - x * x).sqrt();
                        let mut col = (f64::NEG_INFINITY, 0.0, 0.0);
                        for j in 0..n {
                            let y = y0 + (j as f64 + 0.5) * (Y_CAP - y0) / n as f64;
                            let v = ctx
                                .eval(Point { x, y }, sufficient_trunc(t, y))?
                                .norm();
                            if v > col.0 {
                                col = (v, x, y);
                            }
                        }
                        Ok(col)
                    })
                    .try_reduce(
                        || (f64::NEG_INFINITY, 0.0, 0.0),
                        |a, b| {
                            Ok(if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
                                b
                            } else {
                                a
                            })
                        },
                    )?;
                Ok(best)
            };
            match scan() {
                Ok((sup, x, y)) => vec![
                    Cell::Num(t),
                    Cell::Num(sup),
                    Cell::Num(sup / t.abs().powf(0.375)),
                    Cell::Num(x),
                    Cell::Num(y),
                    Cell::Text("ok".into()),
                ],
                Err(err) => vec![
                    Cell::Num(t),
                    Cell::Null,
                    Cell::Null,
                    Cell::Null,
                    Cell::Null,
                    Cell::Text(err.to_string()),
                ],
            }
        })
        .collect();

    let mut meta = base_meta(cfg);
    meta.insert("grid".into(), format!("{n}x{n}"));
    meta.insert("y_cap".into(), format!("{Y_CAP}"));
    Ok(finalize(&SUPNORM_COLUMNS, rows, meta, started))
}

// ---------------------------------------------------------------- class scan

const CLASS_COLUMNS: [&str; 6] = ["d", "h_enum", "h_formula", "h_rounded", "agree", "status"];

fn run_class_scan(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let started = Instant::now();
    let ds = sorted_d(&cfg.d_list);
    let rows: Vec<Vec<Cell>> = ds
        .par_iter()
        .map(|&d| {
            let row = || -> Result<Vec<Cell>> {
                let h = class_group(d)?.len() as i64;
                let l1 = dirichlet_l(Complex64::new(1.0, 0.0), d)?;
                let formula = class_number_formula(d, l1.re)?;
                let rounded = formula.round() as i64;
                Ok(vec![
                    Cell::Int(d),
                    Cell::Int(h),
                    Cell::Num(formula),
                    Cell::Int(rounded),
                    Cell::Int((h == rounded) as i64),
                    Cell::Text("ok".into()),
                ])
            };
            row().unwrap_or_else(|err| {
                vec![
                    Cell::Int(d),
                    Cell::Null,
                    Cell::Null,
                    Cell::Null,
                    Cell::Null,
                    Cell::Text(err.to_string()),
                ]
            })
        })
        .collect();
    Ok(finalize(&CLASS_COLUMNS, rows, base_meta(cfg), started))
}

// --------------------------------------------------------------- weyl verify

const WEYL_COLUMNS: [&str; 10] = [
    "d",
    "t",
    "direct_re",
    "direct_im",
    "formula_re",
    "formula_im",
    "residual",
    "residual_weighted",
    "pass",
    "status",
];

fn run_weyl_verify(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    let started = Instant::now();
    let ds = sorted_d(&cfg.d_list);
    let mut ts = cfg.t_grid.clone();
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup();
    let tasks: Vec<(i64, f64)> = ds
        .iter()
        .flat_map(|&d| ts.iter().map(move |&t| (d, t)))
        .collect();

    let rows: Vec<Vec<Cell>> = tasks
        .par_iter()
        .map(|&(d, t)| match weyl_sum_eisenstein(d, t) {
            Ok(r) => {
                let ambiguous = d == -3 || d == -4;
                let pass = if ambiguous {
                    r.residual.min(r.residual_weighted()) < 1e-6
                } else {
                    r.residual < 1e-6
                };
                vec![
                    Cell::Int(d),
                    Cell::Num(t),
                    Cell::Num(r.direct.re),
                    Cell::Num(r.direct.im),
                    Cell::Num(r.formula.re),
                    Cell::Num(r.formula.im),
                    Cell::Num(r.residual),
                    Cell::Num(r.residual_weighted()),
                    Cell::Int(pass as i64),
                    Cell::Text(if ambiguous { "units-ambiguous" } else { "ok" }.into()),
                ]
            }
            Err(err) => vec![
                Cell::Int(d),
                Cell::Num(t),
                Cell::Null,
                Cell::Null,
                Cell::Null,
                Cell::Null,
                Cell::Null,
                Cell::Null,
                Cell::Int(0),
                Cell::Text(err.to_string()),
            ],
        })
        .collect();
    Ok(finalize(&WEYL_COLUMNS, rows, base_meta(cfg), started))
}

// ------------------------------------------------------------ spectral table

const SPEC_COLUMNS: [&str; 10] = [
    "t", "x", "count", "s_re", "s_im", "s_abs", "luo_sarnak", "conjectural", "deficit",
    "extrapolated",
];

/// Spectral exponential sums over a (T, X) grid with both normalizations and
/// the Weyl-law deficit; `extrapolated` flags T beyond the list's coverage.
pub fn run_spec_scan(
    list: &EigenvalueList,
    t_grid: &[f64],
    x_grid: &[f64],
) -> Result<ExperimentResult> {
    let started = Instant::now();
    if t_grid.is_empty() || x_grid.is_empty() {
        return Err(invalid("spec-scan: grids must be nonempty"));
    }
    let mut rows = Vec::with_capacity(t_grid.len() * x_grid.len());
    for &t in t_grid {
        for &x in x_grid {
            let s = spectral_exp_sum(list, t, x)?;
            let a = s.norm();
            rows.push(vec![
                Cell::Num(t),
                Cell::Num(x),
                Cell::Int(list.count_up_to(t) as i64),
                Cell::Num(s.re),
                Cell::Num(s.im),
                Cell::Num(a),
                Cell::Num(a / (x.powf(0.125) * t.powf(1.25))),
                Cell::Num(a / t),
                Cell::Num(weyl_law_deficit(list, t)),
                Cell::Int(!list.covers(t) as i64),
            ]);
        }
    }
    let mut meta = BTreeMap::new();
    meta.insert("source".into(), list.source.clone());
    meta.insert("eigenvalues".into(), list.values.len().to_string());
    meta.insert("duplicates_removed".into(), list.duplicates_removed.to_string());
    Ok(finalize(&SPEC_COLUMNS, rows, meta, started))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(kind: ExperimentKind) -> ExperimentConfig {
        ExperimentConfig::new(kind)
    }

    #[test]
    fn config_roundtrip_and_validation() {
        let text = r#"{"kind": "error-scan", "d_list": [-4], "x_grid": [2.0, 10.0]}"#;
        let c: ExperimentConfig = serde_json::from_str(text).unwrap();
        assert_eq!(c.kind, ExperimentKind::ErrorScan);
        assert_eq!(c.threads, 0);
        c.validate().unwrap();

        let mut bad = c.clone();
        bad.x_grid = vec![1.5];
        assert!(bad.validate().is_err());
        bad.x_grid = vec![2.0, 2e6];
        assert!(bad.validate().is_err());
        bad.x_grid.clear();
        assert!(bad.validate().is_err());

        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"kind": "no-such"}"#).is_err());
        assert!("equi-scan".parse::<ExperimentKind>().unwrap() == ExperimentKind::EquiScan);
        assert!("scan".parse::<ExperimentKind>().is_err());
    }

    #[test]
    fn error_scan_single_row() {
        let mut c = cfg(ExperimentKind::ErrorScan);
        c.d_list = vec![-4];
        c.x_grid = vec![2.0];
        let r = run(&c).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.get(&r.rows[0], "e"), Some(&Cell::Num(-4.0)));
        assert_eq!(
            r.get(&r.rows[0], "e_over_x23"),
            Some(&Cell::Num(4.0 / 2.0f64.powf(2.0 / 3.0)))
        );
        assert_eq!(r.get(&r.rows[0], "h"), Some(&Cell::Int(1)));
        assert_eq!(r.meta["slope_d-4"], "n/a");
    }

    #[test]
    fn error_scan_isolates_bad_rows() {
        let mut c = cfg(ExperimentKind::ErrorScan);
        c.d_list = vec![-5, -4];
        c.x_grid = vec![2.0, 8.0];
        let r = run(&c).unwrap();
        assert_eq!(r.rows.len(), 4);
        // |d| order puts the good rows first.
        assert_eq!(r.get(&r.rows[0], "status"), Some(&Cell::Text("ok".into())));
        let bad = &r.rows[2];
        assert_eq!(r.get(bad, "d"), Some(&Cell::Int(-5)));
        assert_eq!(r.get(bad, "e"), Some(&Cell::Null));
        match r.get(bad, "status") {
            Some(Cell::Text(s)) => assert!(s.contains("fundamental"), "{s}"),
            other => panic!("{other:?}"),
        }
        assert!(r.meta.contains_key("slope_d-4"));
        // Normalized columns, where present, are finite and non-negative.
        for row in &r.rows {
            for col in ["e_over_x12", "e_over_x712", "e_over_x23"] {
                if let Some(Cell::Num(v)) = r.get(row, col) {
                    assert!(v.is_finite() && *v >= 0.0);
                }
            }
        }
    }

    #[test]
    fn error_scan_reports_slope_and_envelope() {
        let mut c = cfg(ExperimentKind::ErrorScan);
        c.d_list = vec![-23];
        // 16 log-spaced thresholds in [1e2, 1e4].
        c.x_grid = (0..16)
            .map(|i| 100.0 * 100.0f64.powf(i as f64 / 15.0))
            .collect();
        let r = run(&c).unwrap();
        let slope: f64 = r.meta["slope_d-23"].parse().unwrap();
        assert!(slope.is_finite() && slope.abs() < 2.0, "slope {slope}");
        for row in &r.rows {
            match r.get(row, "e_over_x23") {
                Some(Cell::Num(v)) => assert!(*v <= 10.0, "envelope {v}"),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn scans_are_reproducible_across_thread_budgets() {
        let mut c = cfg(ExperimentKind::ErrorScan);
        c.d_list = vec![-23, -4, -8];
        c.x_grid = vec![2.0, 50.0, 400.0];
        c.threads = 1;
        let a = run(&c).unwrap();
        c.threads = 4;
        let b = run(&c).unwrap();
        assert_eq!(a.rows, b.rows);
        let strip = |s: &str| {
            s.lines()
                .filter(|l| !l.starts_with("# timestamp="))
                .collect::<Vec<_>>()
                .join("\n")
        };
        // threads is echoed in metadata; rows and all other metadata agree.
        let ca = strip(&a.to_csv()).replace("# threads=1", "# threads=4");
        assert_eq!(ca, strip(&b.to_csv()));
    }

    #[test]
    fn equi_scan_bump_only() {
        let mut c = cfg(ExperimentKind::EquiScan);
        c.d_list = vec![-4, -23];
        let r = run(&c).unwrap();
        assert_eq!(r.rows.len(), 2);
        let sanity: f64 = r.meta["sanity_const_discrepancy"].parse().unwrap();
        assert!(sanity < 1e-6, "constant-function discrepancy {sanity}");
        // h(-4) = 1 and the Heegner point is i itself, so the discrepancy is
        // exactly |bump(i) - normalized integral|.
        let bump_int: f64 = r.meta["bump_integral"].parse().unwrap();
        assert!(bump_int > 0.0);
        let want = (1.0 - bump_int / (std::f64::consts::PI / 3.0)).abs();
        match r.get(&r.rows[0], "disc_bump") {
            Some(Cell::Num(v)) => assert!((v - want).abs() < 1e-15, "{v} vs {want}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equi_scan_with_window() {
        let mut c = cfg(ExperimentKind::EquiScan);
        c.d_list = vec![-4];
        c.t_grid = vec![1.0];
        let r = run(&c).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert!(r.meta.contains_key("window_integral_t1"));
        assert!(r.meta["window_note"].contains("sharp cutoff"));
        match r.get(&r.rows[0], "disc_window") {
            Some(Cell::Num(v)) => assert!(v.is_finite() && *v >= 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sampler_is_deterministic_and_fundamental() {
        let a = sample_fundamental(50, -9999, -3, 11).unwrap();
        let b = sample_fundamental(50, -9999, -3, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 50);
        assert!(a.iter().all(|&d| is_fundamental(d) && (-9999..=-3).contains(&d)));
        assert!(a.windows(2).all(|w| w[0].abs() < w[1].abs()));
        let c = sample_fundamental(50, -9999, -3, 12).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn supnorm_scan_symmetry() {
        let mut c = cfg(ExperimentKind::SupnormScan);
        c.t_grid = vec![2.0, -2.0];
        let r = run_supnorm_scan(&c, 10).unwrap();
        assert_eq!(r.rows.len(), 2);
        let sup = |i: usize| match r.get(&r.rows[i], "sup") {
            Some(Cell::Num(v)) => *v,
            other => panic!("{other:?}"),
        };
        assert!(sup(0) > 0.0 && sup(0).is_finite());
        assert!((sup(0) - sup(1)).abs() < 1e-9 * sup(0));

        let mut bad = cfg(ExperimentKind::SupnormScan);
        bad.t_grid = vec![40.0];
        assert!(bad.validate().is_err());
    }

    #[test]
    fn supnorm_scan_is_stable_under_refinement() {
        let mut c = cfg(ExperimentKind::SupnormScan);
        c.t_grid = vec![1.0];
        let sup = |r: &ExperimentResult| match r.get(&r.rows[0], "sup") {
            Some(Cell::Num(v)) => *v,
            other => panic!("{other:?}"),
        };
        let coarse = sup(&run_supnorm_scan(&c, 24).unwrap());
        let fine = sup(&run_supnorm_scan(&c, 48).unwrap());
        assert!((fine - coarse).abs() < 0.05 * fine, "{coarse} vs {fine}");
    }

    #[test]
    fn class_scan_agrees() {
        let mut c = cfg(ExperimentKind::ClassScan);
        c.d_list = vec![-3, -4, -20, -23, -47];
        let r = run(&c).unwrap();
        let want = [(-3, 1), (-4, 1), (-20, 2), (-23, 3), (-47, 5)];
        for (row, (d, h)) in r.rows.iter().zip(want) {
            assert_eq!(r.get(row, "d"), Some(&Cell::Int(d)));
            assert_eq!(r.get(row, "h_enum"), Some(&Cell::Int(h)));
            assert_eq!(r.get(row, "h_rounded"), Some(&Cell::Int(h)));
            assert_eq!(r.get(row, "agree"), Some(&Cell::Int(1)));
        }
    }

    #[test]
    fn weyl_verify_rows() {
        let mut c = cfg(ExperimentKind::WeylVerify);
        c.d_list = vec![-7, -4];
        c.t_grid = vec![1.0];
        let r = run(&c).unwrap();
        assert_eq!(r.rows.len(), 2);
        let amb = &r.rows[0];
        assert_eq!(r.get(amb, "d"), Some(&Cell::Int(-4)));
        assert_eq!(r.get(amb, "status"), Some(&Cell::Text("units-ambiguous".into())));
        assert_eq!(r.get(amb, "pass"), Some(&Cell::Int(1)));
        let ok = &r.rows[1];
        assert_eq!(r.get(ok, "d"), Some(&Cell::Int(-7)));
        assert_eq!(r.get(ok, "status"), Some(&Cell::Text("ok".into())));
        assert_eq!(r.get(ok, "pass"), Some(&Cell::Int(1)));
    }

    #[test]
    fn spec_scan_table() {
        let list = EigenvalueList::new(vec![1.0, 2.0, 3.0], "synthetic").unwrap();
        let r = run_spec_scan(&list, &[2.5, 10.0], &[1.0]).unwrap();
        assert_eq!(r.rows.len(), 2);
        assert_eq!(r.get(&r.rows[0], "count"), Some(&Cell::Int(2)));
        assert_eq!(r.get(&r.rows[0], "extrapolated"), Some(&Cell::Int(0)));
        assert_eq!(r.get(&r.rows[1], "extrapolated"), Some(&Cell::Int(1)));
        assert_eq!(r.meta["eigenvalues"], "3");
    }

    #[test]
    fn csv_shape_and_quoting() {
        let r = ExperimentResult {
            columns: vec!["a".into(), "b".into()],
            rows: vec![vec![Cell::Text("x,y".into()), Cell::Num(0.5)]],
            meta: BTreeMap::from([("kind".into(), "demo".into())]),
            volatile: "timestamp=0".into(),
        };
        let csv = r.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# kind=demo");
        assert_eq!(lines[1], "# timestamp=0");
        assert_eq!(lines[2], "a,b");
        assert_eq!(lines[3], "\"x,y\",5.0000000000000000e-1");

        let empty = ExperimentResult { rows: vec![], ..r.clone() };
        let csv = empty.to_csv();
        assert_eq!(csv.lines().last(), Some("a,b"));
    }

    #[test]
    fn json_round_trip() {
        let mut c = cfg(ExperimentKind::ClassScan);
        c.d_list = vec![-4, -23];
        let r = run(&c).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        let rows = doc["rows"].as_array().unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0]["d"].as_i64(), Some(-4));
        assert_eq!(rows[1]["h_enum"].as_i64(), Some(3));
        assert_eq!(doc["meta"]["kind"].as_str(), Some("class-scan"));
    }

    #[test]
    fn spearman_ranks() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&xs, &[8.0, 6.0, 4.0, 2.0]).unwrap() + 1.0).abs() < 1e-15);
        assert!((spearman(&xs, &[1.0, 4.0, 9.0, 16.0]).unwrap() - 1.0).abs() < 1e-15);
        // Ties get average ranks.
        let r = spearman(&[1.0, 2.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        assert!(r > 0.9);
        assert!(spearman(&xs, &[1.0, 1.0, 1.0, 1.0]).is_err());
        assert!(spearman(&[1.0], &[1.0]).is_err());
    }
}

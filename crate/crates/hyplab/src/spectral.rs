//! Eigenvalue-list ingestion and spectral exponential sums
//! S(T, X) = Sum_{t_j <= T} X^{i t_j}, with Weyl-law and oscillation-shape
//! diagnostics.
//!
//! Eigenvalues are external data (this crate does not compute them). Sums are
//! accumulated in ascending order with compensated addition, so identical
//! input files give bit-identical results on any thread budget.

use std::path::Path;

use num_complex::Complex64;

use crate::{data_err, invalid, Result};

/// A sorted list of spectral parameters t_j > 0.
#[derive(Clone, Debug)]
pub struct EigenvalueList {
    /// Strictly increasing after dedup.
    pub values: Vec<f64>,
    /// Free-text provenance tag (file path for loaded lists).
    pub source: String,
    /// Exact duplicates dropped during construction.
    pub duplicates_removed: usize,
}

impl EigenvalueList {
    pub fn new(mut values: Vec<f64>, source: impl Into<String>) -> Result<Self> {
        for v in &values {
            if !v.is_finite() || *v <= 0.0 {
                return Err(data_err(format!(
                    "eigenvalue list: entries must be positive reals, got {v}"
                )));
            }
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let before = values.len();
        values.dedup();
        Ok(EigenvalueList {
            duplicates_removed: before - values.len(),
            values,
            source: source.into(),
        })
    }

    /// #{t_j <= t}.
    pub fn count_up_to(&self, t: f64) -> usize {
        self.values.partition_point(|v| *v <= t)
    }

    /// Whether t lies inside the list's coverage; a deficit evaluated past
    /// the last eigenvalue is extrapolation.
    pub fn covers(&self, t: f64) -> bool {
        self.values.last().is_some_and(|m| t <= *m)
    }
}

/// Read a list from plain text: one value per line, blank lines and lines
/// starting with '#' ignored.
pub fn load_eigenvalues(path: &Path) -> Result<EigenvalueList> {
    let text = std::fs::read_to_string(path)?;
    let mut values = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: f64 = line.parse().map_err(|_| {
            data_err(format!(
                "{}: line {}: cannot parse {line:?} as a real",
                path.display(),
                idx + 1
            ))
        })?;
        if !v.is_finite() || v <= 0.0 {
            return Err(data_err(format!(
                "{}: line {}: eigenvalues must be positive, got {v}",
                path.display(),
                idx + 1
            )));
        }
        values.push(v);
    }
    EigenvalueList::new(values, path.display().to_string())
}

#[derive(Clone, Copy, Default)]
struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    fn add(&mut self, v: f64) {
        let y = v - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
}

/// S(T, X) = Sum_{t_j <= T} X^{i t_j}, compensated, ascending in t_j.
pub fn spectral_exp_sum(list: &EigenvalueList, t_max: f64, x: f64) -> Result<Complex64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(invalid("spectral_exp_sum: X must be a positive real"));
    }
    let lx = x.ln();
    let mut re = Kahan::default();
    let mut im = Kahan::default();
    for &t in &list.values[..list.count_up_to(t_max)] {
        let (s, c) = (t * lx).sin_cos();
        re.add(c);
        im.add(s);
    }
    Ok(Complex64::new(re.sum, im.sum))
}

/// #{t_j <= T} - T^2/12, the deviation from the Weyl main term.
pub fn weyl_law_deficit(list: &EigenvalueList, t: f64) -> f64 {
    list.count_up_to(t) as f64 - t * t / 12.0
}

/// One row of the oscillation-shape table.
#[derive(Clone, Copy, Debug)]
pub struct ShapeRow {
    pub t: f64,
    pub x: f64,
    pub count: usize,
    pub sum: Complex64,
    /// |S| / (X^{1/8} T^{5/4}), the proven-envelope normalization.
    pub luo_sarnak: f64,
    /// |S| / T, the conjectural near-linear normalization.
    pub conjectural: f64,
}

/// |S(T,X)| under the two normalizations, on the product grid, ordered by
/// (t, x).
pub fn luo_sarnak_shape(
    list: &EigenvalueList,
    t_grid: &[f64],
    x_grid: &[f64],
) -> Result<Vec<ShapeRow>> {
    if t_grid.is_empty() || x_grid.is_empty() {
        return Err(invalid("shape table: grids must be nonempty"));
    }
    let mut rows = Vec::with_capacity(t_grid.len() * x_grid.len());
    for &t in t_grid {
        for &x in x_grid {
            let sum = spectral_exp_sum(list, t, x)?;
            let a = sum.norm();
            rows.push(ShapeRow {
                t,
                x,
                count: list.count_up_to(t),
                sum,
                luo_sarnak: a / (x.powf(0.125) * t.powf(1.25)),
                conjectural: a / t,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn list(vals: &[f64]) -> EigenvalueList {
        EigenvalueList::new(vals.to_vec(), "test").unwrap()
    }

    #[test]
    fn loads_simple_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("eigs.txt");
        std::fs::write(&path, "# header\n1.0\n\n2.0\n3.0\n").unwrap();
        let l = load_eigenvalues(&path).unwrap();
        assert_eq!(l.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(l.duplicates_removed, 0);

        std::fs::write(&path, "2.0\n1.0\n2.0\n").unwrap();
        let l = load_eigenvalues(&path).unwrap();
        assert_eq!(l.values, vec![1.0, 2.0]);
        assert_eq!(l.duplicates_removed, 1);

        std::fs::write(&path, "").unwrap();
        let l = load_eigenvalues(&path).unwrap();
        assert!(l.values.is_empty());
    }

    #[test]
    fn reports_parse_errors_with_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, "1.0\n2.0\nnonsense\n").unwrap();
        let err = load_eigenvalues(&path).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");

        std::fs::write(&path, "1.0\n-2.0\n").unwrap();
        let err = load_eigenvalues(&path).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn sum_at_x_one_counts() {
        let l = list(&[1.0, 2.0, 3.0]);
        let s = spectral_exp_sum(&l, 2.5, 1.0).unwrap();
        assert_eq!(s, Complex64::new(2.0, 0.0));
        assert!(spectral_exp_sum(&l, 2.5, 0.0).is_err());
        assert!(spectral_exp_sum(&l, 2.5, -3.0).is_err());
    }

    #[test]
    fn sum_is_bounded_by_count() {
        let l = list(&[0.5, 1.2, 2.8, 4.4, 9.1]);
        for &t in &[0.1, 1.0, 3.0, 10.0] {
            for &x in &[0.5, 2.0, 17.0, 1e4] {
                let s = spectral_exp_sum(&l, t, x).unwrap();
                assert!(s.norm() <= l.count_up_to(t) as f64 + 1e-12);
            }
        }
    }

    #[test]
    fn geometric_oracle() {
        // Arithmetic eigenvalues t_j = j h turn the sum into a geometric
        // series with ratio e^{i h ln X}.
        let h = 0.37;
        let m = 1000usize;
        let vals: Vec<f64> = (1..=m).map(|j| j as f64 * h).collect();
        let l = list(&vals);
        for &x in &[2.0, 10.0, 123.456] {
            let got = spectral_exp_sum(&l, m as f64 * h + 0.1, x).unwrap();
            let q = Complex64::new(0.0, h * x.ln()).exp();
            let want = q * (q.powu(m as u32) - 1.0) / (q - 1.0);
            assert!((got - want).norm() < 1e-12 * (m as f64), "{got} vs {want}");
        }
    }

    #[test]
    fn inverse_argument_conjugates() {
        let l = list(&[0.9, 1.7, 3.3, 6.2]);
        for &x in &[2.0, 5.0, 40.0] {
            let a = spectral_exp_sum(&l, 10.0, x).unwrap();
            let b = spectral_exp_sum(&l, 10.0, 1.0 / x).unwrap();
            assert!((a.conj() - b).norm() < 1e-12);
        }
    }

    #[test]
    fn deficits() {
        let empty = EigenvalueList::new(vec![], "empty").unwrap();
        assert!((weyl_law_deficit(&empty, 1.0) + 1.0 / 12.0).abs() < 1e-15);
        assert!(!empty.covers(1.0));

        // t_j = sqrt(12 j) realizes the main term exactly.
        let vals: Vec<f64> = (1..=500).map(|j| (12.0 * j as f64).sqrt()).collect();
        let l = list(&vals);
        for &t in &[5.0, 20.0, 50.0, 77.0] {
            assert!(weyl_law_deficit(&l, t).abs() <= 1.0, "t = {t}");
        }
        assert!(l.covers(50.0));
        assert!(!l.covers(90.0));
    }

    #[test]
    fn shape_table() {
        let l = list(&[5.0]);
        let rows = luo_sarnak_shape(&l, &[3.0, 10.0], &[1.0, 2.0]).unwrap();
        assert_eq!(rows.len(), 4);
        // Below the eigenvalue everything is zero.
        assert_eq!(rows[0].count, 0);
        assert_eq!(rows[0].sum, Complex64::new(0.0, 0.0));
        // At X = 1 the modulus is the count, so the columns are exact
        // ratios.
        let r = &rows[2];
        assert_eq!((r.t, r.x), (10.0, 1.0));
        assert_eq!(r.count, 1);
        assert!((r.luo_sarnak - 1.0 / 10.0f64.powf(1.25)).abs() < 1e-15);
        assert!((r.conjectural - 0.1).abs() < 1e-15);
        assert!(luo_sarnak_shape(&l, &[], &[1.0]).is_err());
    }

    #[test]
    fn sums_are_bit_stable() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("eigs.txt");
        let mut f = std::fs::File::create(&path).unwrap();
        for j in 1..=2000 {
            writeln!(f, "{:.12}", (j as f64).sqrt() * 1.618).unwrap();
        }
        drop(f);
        let a = load_eigenvalues(&path).unwrap();
        let b = load_eigenvalues(&path).unwrap();
        let sa = spectral_exp_sum(&a, 60.0, 7.3).unwrap();
        let sb = spectral_exp_sum(&b, 60.0, 7.3).unwrap();
        assert_eq!(sa.re.to_bits(), sb.re.to_bits());
        assert_eq!(sa.im.to_bits(), sb.im.to_bits());
    }
}

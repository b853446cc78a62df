//! Two-sample nonparametric tests, z-score protocol, size binning, and
//! distribution emitters (histogram PDF, ECDF, 2-D Gaussian KDE).

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

pub const EXACT_SIZE_CAP: usize = 14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestMethod {
    Ks,
    Mw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestMode {
    Exact,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alternative {
    TwoSided,
    ALess,
    AGreater,
}

/// Result of a two-sample test. Exact-mode p-values are rational with
/// denominator C(n+m, n); the fraction is kept alongside the float.
#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub method: TestMethod,
    pub mode: TestMode,
    pub significance_code: &'static str,
    pub p_fraction: Option<(u64, u64)>,
}

/// Half-open significance bands: p = 0.05 codes "*", p = 0.01 codes "**".
pub fn significance_code(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Pooled sort of both samples with group labels (true = sample a).
fn pooled(a: &[f64], b: &[f64]) -> Vec<(f64, bool)> {
    let mut pool: Vec<(f64, bool)> = a
        .iter()
        .map(|&v| (v, true))
        .chain(b.iter().map(|&v| (v, false)))
        .collect();
    pool.sort_unstable_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    pool
}

/// KS distance as an integer numerator over n*m: max |i*m - j*n| across
/// distinct pooled values, with tied values advancing both ECDFs together.
fn ks_d_numerator(sorted_values: &[f64], is_a: impl Fn(usize) -> bool, n: u64, m: u64) -> u64 {
    let total = sorted_values.len();
    let mut i: u64 = 0;
    let mut j: u64 = 0;
    let mut best: i64 = 0;
    let mut idx = 0;
    while idx < total {
        let v = sorted_values[idx];
        while idx < total && sorted_values[idx] == v {
            if is_a(idx) {
                i += 1;
            } else {
                j += 1;
            }
            idx += 1;
        }
        let diff = (i * m) as i64 - (j * n) as i64;
        best = best.max(diff.abs());
    }
    best as u64
}

/// Two-sample Kolmogorov-Smirnov test.
///
/// Exact mode enumerates every assignment of the pooled values to the two
/// samples (permitted up to n+m = 14); the asymptotic mode uses the limiting
/// Kolmogorov distribution with Stephens' effective-size correction.
pub fn ks_two_sample(a: &[f64], b: &[f64], mode: TestMode) -> Result<TestResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData(
            "both samples must be non-empty".into(),
        ));
    }
    let (n, m) = (a.len() as u64, b.len() as u64);
    let pool = pooled(a, b);
    let values: Vec<f64> = pool.iter().map(|&(v, _)| v).collect();
    let labels: Vec<bool> = pool.iter().map(|&(_, l)| l).collect();
    let d_num = ks_d_numerator(&values, |i| labels[i], n, m);
    let d = d_num as f64 / (n * m) as f64;

    match mode {
        TestMode::Exact => {
            let size = (n + m) as usize;
            if size > EXACT_SIZE_CAP {
                return Err(Error::Mode(format!(
                    "exact KS limited to n+m <= {EXACT_SIZE_CAP}, got {size}"
                )));
            }
            let total = binomial(n + m, n);
            let mut count: u64 = 0;
            for mask in 0u32..(1u32 << size) {
                if mask.count_ones() as u64 != n {
                    continue;
                }
                let d_perm = ks_d_numerator(&values, |i| mask >> i & 1 == 1, n, m);
                if d_perm >= d_num {
                    count += 1;
                }
            }
            let p = count as f64 / total as f64;
            Ok(TestResult {
                statistic: d,
                p_value: p,
                method: TestMethod::Ks,
                mode: TestMode::Exact,
                significance_code: significance_code(p),
                p_fraction: Some((count, total)),
            })
        }
        TestMode::Asymptotic => {
            let ne = (n * m) as f64 / (n + m) as f64;
            let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
            let p = kolmogorov_survival(lambda);
            Ok(TestResult {
                statistic: d,
                p_value: p,
                method: TestMethod::Ks,
                mode: TestMode::Asymptotic,
                significance_code: significance_code(p),
                p_fraction: None,
            })
        }
    }
}

/// Q_KS(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2), clamped to [0,1].
fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64).powi(2) * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// U statistic for sample a with average-rank tie handling:
/// count of (a, b) pairs with a > b, plus half the tied pairs.
fn mann_whitney_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut u = 0.0;
    for &x in a {
        for &y in b {
            if x > y {
                u += 1.0;
            } else if x == y {
                u += 0.5;
            }
        }
    }
    u
}

/// Mann-Whitney U test.
///
/// Exact mode enumerates all pooled splits (n+m <= 14, untied data); with
/// ties it falls back to the normal approximation, which always applies the
/// tie and continuity corrections.
pub fn mann_whitney_u(
    a: &[f64],
    b: &[f64],
    mode: TestMode,
    alternative: Alternative,
) -> Result<TestResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InsufficientData(
            "both samples must be non-empty".into(),
        ));
    }
    let (n, m) = (a.len() as u64, b.len() as u64);
    let u_obs = mann_whitney_statistic(a, b);
    let pool = pooled(a, b);
    let has_ties = pool.windows(2).any(|w| w[0].0 == w[1].0);

    if mode == TestMode::Exact {
        let size = (n + m) as usize;
        if size > EXACT_SIZE_CAP {
            return Err(Error::Mode(format!(
                "exact MW limited to n+m <= {EXACT_SIZE_CAP}, got {size}"
            )));
        }
        if !has_ties {
            // Without ties U is integral and enumeration over pooled splits
            // is exact.
            let values: Vec<f64> = pool.iter().map(|&(v, _)| v).collect();
            let total = binomial(n + m, n);
            let u_int = u_obs as u64;
            let mut count_le: u64 = 0;
            let mut count_ge: u64 = 0;
            for mask in 0u32..(1u32 << size) {
                if mask.count_ones() as u64 != n {
                    continue;
                }
                // In sorted order, each a-position dominates exactly the b's
                // before it.
                let mut seen_b: u64 = 0;
                let mut u_perm: u64 = 0;
                for idx in 0..values.len() {
                    if mask >> idx & 1 == 1 {
                        u_perm += seen_b;
                    } else {
                        seen_b += 1;
                    }
                }
                if u_perm <= u_int {
                    count_le += 1;
                }
                if u_perm >= u_int {
                    count_ge += 1;
                }
            }
            let (num, den) = match alternative {
                Alternative::ALess => (count_le, total),
                Alternative::AGreater => (count_ge, total),
                Alternative::TwoSided => ((2 * count_le.min(count_ge)).min(total), total),
            };
            let p = num as f64 / den as f64;
            return Ok(TestResult {
                statistic: u_obs,
                p_value: p,
                method: TestMethod::Mw,
                mode: TestMode::Exact,
                significance_code: significance_code(p),
                p_fraction: Some((num, den)),
            });
        }
        // Tied data: exact enumeration is not defined here; fall through to
        // the corrected normal approximation and flag it via `mode`.
    }

    let nm = (n * m) as f64;
    let big_n = (n + m) as f64;
    let mean = nm / 2.0;
    let mut tie_term = 0.0;
    let mut idx = 0;
    while idx < pool.len() {
        let mut run = 1;
        while idx + run < pool.len() && pool[idx + run].0 == pool[idx].0 {
            run += 1;
        }
        if run > 1 {
            let t = run as f64;
            tie_term += t * t * t - t;
        }
        idx += run;
    }
    let variance = nm / 12.0 * (big_n + 1.0 - tie_term / (big_n * (big_n - 1.0)));
    if variance <= 0.0 {
        // All pooled values identical: no evidence either way.
        return Ok(TestResult {
            statistic: u_obs,
            p_value: 1.0,
            method: TestMethod::Mw,
            mode: TestMode::Asymptotic,
            significance_code: significance_code(1.0),
            p_fraction: None,
        });
    }
    let sd = variance.sqrt();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let p = match alternative {
        Alternative::TwoSided => {
            let z = ((u_obs - mean).abs() - 0.5).max(0.0) / sd;
            (2.0 * (1.0 - normal.cdf(z))).min(1.0)
        }
        Alternative::AGreater => 1.0 - normal.cdf((u_obs - mean - 0.5) / sd),
        Alternative::ALess => normal.cdf((u_obs - mean + 0.5) / sd),
    };
    Ok(TestResult {
        statistic: u_obs,
        p_value: p,
        method: TestMethod::Mw,
        mode: TestMode::Asymptotic,
        significance_code: significance_code(p),
        p_fraction: None,
    })
}

/// Outcome of comparing a value against an opposite-category reference sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ZScoreOutcome {
    Score(f64),
    /// Fewer reference observations than the protocol requires.
    InsufficientReference,
    /// Reference sample has zero spread.
    DegenerateReference,
}

/// Z-score of `value` against `reference` (sample stdev), requiring at least
/// `min_n` reference observations.
pub fn zscore_vs_opposite(value: f64, reference: &[f64], min_n: usize) -> ZScoreOutcome {
    if reference.len() < min_n {
        return ZScoreOutcome::InsufficientReference;
    }
    let n = reference.len() as f64;
    let mean = reference.iter().sum::<f64>() / n;
    let var = reference.iter().map(|&x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = var.sqrt();
    if sd == 0.0 {
        return ZScoreOutcome::DegenerateReference;
    }
    ZScoreOutcome::Score((value - mean) / sd)
}

pub const ZSCORE_MIN_REFERENCE: usize = 30;

/// Integer size ranges covering all observed community sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeBins {
    /// Inclusive (low, high) bounds per bin, ascending.
    pub ranges: Vec<(usize, usize)>,
    /// True when fewer bins than requested could be formed.
    pub truncated: bool,
}

impl SizeBins {
    /// Bin index for a size; sizes outside the covered range clamp to the
    /// nearest end bin.
    pub fn assign(&self, size: usize) -> usize {
        for (i, &(_, hi)) in self.ranges.iter().enumerate() {
            if size <= hi {
                return i;
            }
        }
        self.ranges.len() - 1
    }

    pub fn label(&self, bin: usize) -> String {
        let (lo, hi) = self.ranges[bin];
        format!("[{lo},{hi}]")
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }
}

/// Equal-count integer bins over the observed sizes (quantile style), or
/// explicit lower edges via `edges_override`.
pub fn size_bins(sizes: &[usize], k: usize, edges_override: Option<&[usize]>) -> Result<SizeBins> {
    if k == 0 {
        return Err(Error::Config("size_bins needs k >= 1".into()));
    }
    if sizes.is_empty() {
        return Err(Error::InsufficientData(
            "size_bins needs observed sizes".into(),
        ));
    }
    let max_size = *sizes.iter().max().unwrap();
    if let Some(edges) = edges_override {
        if edges.is_empty() || edges.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "override edges must be strictly ascending".into(),
            ));
        }
        let mut ranges = Vec::with_capacity(edges.len());
        for (i, &lo) in edges.iter().enumerate() {
            let hi = if i + 1 < edges.len() {
                edges[i + 1] - 1
            } else {
                max_size.max(lo)
            };
            ranges.push((lo, hi));
        }
        return Ok(SizeBins {
            ranges,
            truncated: false,
        });
    }

    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    // Distinct sizes with multiplicities.
    let mut distinct: Vec<(usize, usize)> = Vec::new();
    for &s in &sorted {
        match distinct.last_mut() {
            Some((v, c)) if *v == s => *c += 1,
            _ => distinct.push((s, 1)),
        }
    }
    let k_eff = k.min(distinct.len());
    let mut ranges = Vec::with_capacity(k_eff);
    let mut bins_left = k_eff;
    let mut left = sorted.len();
    let mut lo = distinct[0].0;
    let mut acc = 0usize;
    for (i, &(v, c)) in distinct.iter().enumerate() {
        acc += c;
        if i == distinct.len() - 1 {
            ranges.push((lo, v));
            break;
        }
        if bins_left > 1 {
            let fair_share = left.div_ceil(bins_left);
            let distinct_left = distinct.len() - i - 1;
            // Close the bin at its fair share, or early enough that every
            // remaining bin still gets a distinct size.
            if acc >= fair_share || distinct_left == bins_left - 1 {
                ranges.push((lo, v));
                bins_left -= 1;
                left -= acc;
                acc = 0;
                lo = distinct[i + 1].0;
            }
        }
    }
    debug_assert_eq!(ranges.last().map(|r| r.1), Some(max_size));
    Ok(SizeBins {
        truncated: ranges.len() < k,
        ranges,
    })
}

/// Histogram density estimate: densities integrate to 1 over the binned
/// support. A zero-spread sample gets a single unit-width bin of density 1.
pub fn histogram_pdf(values: &[f64], n_bins: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if values.is_empty() {
        return Err(Error::InsufficientData(
            "histogram needs at least one value".into(),
        ));
    }
    if n_bins == 0 {
        return Err(Error::Config("histogram needs at least one bin".into()));
    }
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if min == max {
        return Ok((vec![min], vec![1.0]));
    }
    let width = (max - min) / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for &v in values {
        let mut bin = ((v - min) / width) as usize;
        if bin >= n_bins {
            bin = n_bins - 1;
        }
        counts[bin] += 1;
    }
    let n = values.len() as f64;
    let centers = (0..n_bins)
        .map(|i| min + (i as f64 + 0.5) * width)
        .collect();
    let densities = counts.iter().map(|&c| c as f64 / (n * width)).collect();
    Ok((centers, densities))
}

/// Empirical CDF steps at each distinct sorted value, ending at 1.
pub fn ecdf(values: &[f64]) -> Vec<(f64, f64)> {
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut steps = Vec::new();
    let mut seen = 0usize;
    let mut idx = 0;
    while idx < sorted.len() {
        let v = sorted[idx];
        while idx < sorted.len() && sorted[idx] == v {
            seen += 1;
            idx += 1;
        }
        steps.push((v, seen as f64 / n));
    }
    steps
}

/// Product-Gaussian kernel density estimate on a regular grid.
#[derive(Debug, Clone)]
pub struct KdeGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    /// Row-major density: index = yi * xs.len() + xi.
    pub density: Vec<f64>,
    pub bandwidth: (f64, f64),
}

impl KdeGrid {
    pub fn at(&self, xi: usize, yi: usize) -> f64 {
        self.density[yi * self.xs.len() + xi]
    }

    pub fn cell_area(&self) -> f64 {
        (self.xs[1] - self.xs[0]) * (self.ys[1] - self.ys[0])
    }
}

/// Per-axis Scott bandwidth (n^(-1/6) times the axis sample stdev) unless
/// overridden; the grid pads three bandwidths beyond the data range.
pub fn gaussian_kde_2d(
    points: &[(f64, f64)],
    bandwidth: Option<(f64, f64)>,
    grid: usize,
) -> Result<KdeGrid> {
    if points.len() < 2 {
        return Err(Error::InsufficientData(
            "KDE needs at least 2 points".into(),
        ));
    }
    if grid < 2 {
        return Err(Error::Config("KDE grid resolution must be >= 2".into()));
    }
    let n = points.len() as f64;
    let sample_sd = |get: &dyn Fn(&(f64, f64)) -> f64| {
        let mean = points.iter().map(get).sum::<f64>() / n;
        (points.iter().map(|p| (get(p) - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    let (hx, hy) = match bandwidth {
        Some(h) => h,
        None => {
            let factor = n.powf(-1.0 / 6.0);
            (factor * sample_sd(&|p| p.0), factor * sample_sd(&|p| p.1))
        }
    };
    if hx <= 0.0 {
        return Err(Error::DegenerateAxis("x axis has zero spread".into()));
    }
    if hy <= 0.0 {
        return Err(Error::DegenerateAxis("y axis has zero spread".into()));
    }

    let (xmin, xmax) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.0), hi.max(p.0))
        });
    let (ymin, ymax) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.1), hi.max(p.1))
        });
    let linspace = |lo: f64, hi: f64| {
        (0..grid)
            .map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64)
            .collect::<Vec<f64>>()
    };
    let xs = linspace(xmin - 3.0 * hx, xmax + 3.0 * hx);
    let ys = linspace(ymin - 3.0 * hy, ymax + 3.0 * hy);

    let norm = 1.0 / (n * 2.0 * std::f64::consts::PI * hx * hy);
    let mut density = vec![0.0; grid * grid];
    for (yi, &gy) in ys.iter().enumerate() {
        for (xi, &gx) in xs.iter().enumerate() {
            let mut acc = 0.0;
            for &(px, py) in points {
                let dx = (gx - px) / hx;
                let dy = (gy - py) / hy;
                acc += (-0.5 * (dx * dx + dy * dy)).exp();
            }
            density[yi * grid + xi] = norm * acc;
        }
    }
    Ok(KdeGrid {
        xs,
        ys,
        density,
        bandwidth: (hx, hy),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significance_band_boundaries() {
        assert_eq!(significance_code(0.009), "***");
        assert_eq!(significance_code(0.01), "**");
        assert_eq!(significance_code(0.05), "*");
        assert_eq!(significance_code(0.0999), "*");
        assert_eq!(significance_code(0.1), "");
    }

    #[test]
    fn ks_identical_samples() {
        let a = [1.0, 2.0, 3.0];
        let r = ks_two_sample(&a, &a, TestMode::Exact).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.p_fraction, Some((20, 20)));
    }

    #[test]
    fn ks_fully_separated_samples() {
        let r = ks_two_sample(&[1.0, 2.0], &[9.0, 10.0], TestMode::Exact).unwrap();
        assert_eq!(r.statistic, 1.0);
    }

    #[test]
    fn ks_exact_interleaved_pair() {
        // {1,3} vs {2,4}: every split of 4 distinct values reaches D >= 1/2,
        // so the permutation p-value is 1.
        let r = ks_two_sample(&[1.0, 3.0], &[2.0, 4.0], TestMode::Exact).unwrap();
        assert_eq!(r.statistic, 0.5);
        assert_eq!(r.p_fraction, Some((6, 6)));
    }

    #[test]
    fn ks_exact_cap() {
        let a = vec![0.0; 8];
        let b = vec![1.0; 8];
        assert!(matches!(
            ks_two_sample(&a, &b, TestMode::Exact),
            Err(Error::Mode(_))
        ));
    }

    #[test]
    fn mw_exact_textbook_case() {
        // a = {1,2}, b = {3,4}: U_a = 0, one-sided p = 1/6, two-sided 1/3.
        let a = [1.0, 2.0];
        let b = [3.0, 4.0];
        let one = mann_whitney_u(&a, &b, TestMode::Exact, Alternative::ALess).unwrap();
        assert_eq!(one.statistic, 0.0);
        assert_eq!(one.p_fraction, Some((1, 6)));
        let two = mann_whitney_u(&a, &b, TestMode::Exact, Alternative::TwoSided).unwrap();
        assert_eq!(two.p_fraction, Some((2, 6)));
        assert!((two.p_value - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn mw_identical_multisets() {
        let a = [1.0, 2.0];
        let r = mann_whitney_u(&a, &a, TestMode::Exact, Alternative::TwoSided).unwrap();
        assert_eq!(r.p_value, 1.0);
        // Tied pooled data falls back to the corrected approximation.
        assert_eq!(r.mode, TestMode::Asymptotic);
    }

    #[test]
    fn mw_statistic_matches_pairwise_oracle() {
        let a = [3.0, 1.0, 4.0, 1.5, 9.2, 2.6];
        let b = [2.0, 7.0, 1.8, 8.1, 0.3];
        let mut oracle = 0.0;
        for &x in &a {
            for &y in &b {
                if x > y {
                    oracle += 1.0;
                } else if x == y {
                    oracle += 0.5;
                }
            }
        }
        let r = mann_whitney_u(&a, &b, TestMode::Asymptotic, Alternative::TwoSided).unwrap();
        assert_eq!(r.statistic, oracle);
    }

    #[test]
    fn mw_degenerate_pool() {
        let a = [5.0, 5.0, 5.0];
        let r = mann_whitney_u(&a, &a, TestMode::Asymptotic, Alternative::TwoSided).unwrap();
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn zscore_basics() {
        let reference: Vec<f64> = (0..30).map(|i| i as f64).collect();
        let mean = reference.iter().sum::<f64>() / 30.0;
        assert_eq!(
            zscore_vs_opposite(mean, &reference, 30),
            ZScoreOutcome::Score(0.0)
        );

        let short: Vec<f64> = (0..29).map(|i| i as f64).collect();
        assert_eq!(
            zscore_vs_opposite(1.0, &short, 30),
            ZScoreOutcome::InsufficientReference
        );

        let flat = vec![2.0; 30];
        assert_eq!(
            zscore_vs_opposite(1.0, &flat, 30),
            ZScoreOutcome::DegenerateReference
        );

        let sd = (reference.iter().map(|&x| (x - mean).powi(2)).sum::<f64>() / 29.0).sqrt();
        match zscore_vs_opposite(mean + sd, &reference, 30) {
            ZScoreOutcome::Score(z) => assert!((z - 1.0).abs() < 1e-12),
            other => panic!("expected score, got {other:?}"),
        }
    }

    #[test]
    fn size_bins_single_value() {
        let bins = size_bins(&[4, 4, 4], 10, None).unwrap();
        assert_eq!(bins.len(), 1);
        assert!(bins.truncated);
        assert_eq!(bins.assign(4), 0);
    }

    #[test]
    fn size_bins_roughly_equal_counts() {
        let sizes: Vec<usize> = (0..100).map(|i| 3 + (i * 47) % 48).collect();
        let bins = size_bins(&sizes, 10, None).unwrap();
        assert_eq!(bins.len(), 10);
        let mut counts = vec![0usize; bins.len()];
        for &s in &sizes {
            counts[bins.assign(s)] += 1;
        }
        assert!(counts.iter().all(|&c| (5..=20).contains(&c)), "{counts:?}");
        let covered: usize = counts.iter().sum();
        assert_eq!(covered, sizes.len());
    }

    #[test]
    fn size_bins_override() {
        let sizes = vec![3, 4, 5, 9, 10, 20];
        let bins = size_bins(&sizes, 10, Some(&[3, 5, 10])).unwrap();
        assert_eq!(bins.ranges, vec![(3, 4), (5, 9), (10, 20)]);
        assert_eq!(bins.assign(3), 0);
        assert_eq!(bins.assign(4), 0);
        assert_eq!(bins.assign(5), 1);
        assert_eq!(bins.assign(9), 1);
        assert_eq!(bins.assign(10), 2);
        assert_eq!(bins.assign(20), 2);
    }

    #[test]
    fn histogram_single_value() {
        let (centers, densities) = histogram_pdf(&[2.5], 8).unwrap();
        assert_eq!(centers, vec![2.5]);
        assert_eq!(densities, vec![1.0]);
    }

    #[test]
    fn histogram_integrates_to_one() {
        let values: Vec<f64> = (0..500).map(|i| (i as f64 * 0.017).sin()).collect();
        let (centers, densities) = histogram_pdf(&values, 20).unwrap();
        let width = centers[1] - centers[0];
        let mass: f64 = densities.iter().map(|&d| d * width).sum();
        assert!((mass - 1.0).abs() < 1e-9);
    }

    #[test]
    fn ecdf_steps() {
        let steps = ecdf(&[3.0, 1.0, 2.0]);
        assert_eq!(steps, vec![(1.0, 1.0 / 3.0), (2.0, 2.0 / 3.0), (3.0, 1.0)]);
    }

    #[test]
    fn kde_mirror_symmetry() {
        let points = vec![(1.0, 2.0), (1.2, 2.2), (1.0, -2.0), (1.2, -2.2)];
        let grid = gaussian_kde_2d(&points, Some((0.5, 0.5)), 21).unwrap();
        // Grid is symmetric about y = 0; densities must mirror.
        let g = grid.xs.len();
        for yi in 0..g {
            for xi in 0..g {
                let mirrored = grid.at(xi, g - 1 - yi);
                assert!((grid.at(xi, yi) - mirrored).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn kde_peak_at_cluster_mean() {
        let points = vec![
            (0.0, 0.0),
            (0.01, 0.0),
            (-0.01, 0.0),
            (0.0, 0.01),
            (0.0, -0.01),
        ];
        let grid = gaussian_kde_2d(&points, Some((0.1, 0.1)), 31).unwrap();
        let mut best = (0, 0);
        let mut best_v = f64::NEG_INFINITY;
        for yi in 0..31 {
            for xi in 0..31 {
                if grid.at(xi, yi) > best_v {
                    best_v = grid.at(xi, yi);
                    best = (xi, yi);
                }
            }
        }
        // Central cell of a symmetric grid.
        assert_eq!(best, (15, 15));
    }

    #[test]
    fn kde_degenerate_axis() {
        let points = vec![(1.0, 0.0), (1.0, 1.0), (1.0, 2.0)];
        assert!(matches!(
            gaussian_kde_2d(&points, None, 11),
            Err(Error::DegenerateAxis(_))
        ));
    }
}

//! Truncated Poincare series, the orbital counting function, and two
//! estimators of the exponent of convergence.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::geometry::{radial_gap_from_distance, InteriorPoint};
use crate::group::{enumerate_orbit, shell_index, GroupPresentation, OrbitSet};

/// Deterministic pairwise (fixed-tree) summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (l, r) = xs.split_at(n / 2);
            pairwise_sum(l) + pairwise_sum(r)
        }
    }
}

/// `P(s)` summed over an enumerated orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesEvaluation {
    pub s: f64,
    pub truncation_word_length: usize,
    pub value: f64,
    /// Terms of elements with `g(z) = 0`, which belong to no dyadic shell.
    pub central_term: f64,
    /// `(k, number of elements, partial sum)` for each nonempty shell, in `k` order.
    pub shell_partials: Vec<(u32, usize, f64)>,
}

/// Terms `((1 - |g(z)|) / (1 + |g(z)|))^s = exp(-s d_H(0, g(z)))`, grouped by shell.
pub fn truncated_series(orbit: &OrbitSet, s: f64) -> Result<SeriesEvaluation> {
    if !(s >= 0.0) {
        return Err(Error::usage("series exponent s must be nonnegative"));
    }
    let mut shells: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    let mut central = Vec::new();
    for g in &orbit.elements {
        let term = (-s * g.origin_distance).exp();
        match g.shell_index {
            Some(k) => shells.entry(k).or_default().push(term),
            None => central.push(term),
        }
    }
    let shell_partials: Vec<(u32, usize, f64)> = shells
        .iter()
        .map(|(&k, terms)| (k, terms.len(), pairwise_sum(terms)))
        .collect();
    let central_term = pairwise_sum(&central);
    let partials: Vec<f64> = shell_partials.iter().map(|p| p.2).collect();
    Ok(SeriesEvaluation {
        s,
        truncation_word_length: orbit.max_word_length,
        value: central_term + pairwise_sum(&partials),
        central_term,
        shell_partials,
    })
}

/// `N(T) = #{g : d_H(z, g(z)) <= T}` sampled at multiples of the bin width.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingFunction {
    pub bin_width: f64,
    pub counts: Vec<(f64, usize)>,
}

pub const DEFAULT_BIN_WIDTH: f64 = 0.5;

pub fn counting_function(orbit: &OrbitSet, bin_width: f64) -> Result<CountingFunction> {
    if !(bin_width > 0.0) {
        return Err(Error::usage("bin width must be positive"));
    }
    let mut d: Vec<f64> = orbit.elements.iter().map(|g| g.displacement).collect();
    d.sort_by(f64::total_cmp);
    let max = d.last().copied().unwrap_or(0.0);
    let bins = (max / bin_width).ceil() as usize;
    let counts = (0..=bins)
        .map(|i| {
            let t = i as f64 * bin_width;
            (t, d.partition_point(|&x| x <= t))
        })
        .collect();
    Ok(CountingFunction { bin_width, counts })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum ExponentMethod {
    CountingFit,
    DivergenceScan,
}

impl ExponentMethod {
    pub fn name(self) -> &'static str {
        match self {
            ExponentMethod::CountingFit => "counting_fit",
            ExponentMethod::DivergenceScan => "divergence_scan",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "counting_fit" => Ok(ExponentMethod::CountingFit),
            "divergence_scan" => Ok(ExponentMethod::DivergenceScan),
            _ => Err(Error::usage(format!("unknown exponent method {s}"))),
        }
    }
}

/// An estimate of the exponent of convergence, never without its window.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentEstimate {
    pub delta_est: f64,
    /// Hyperbolic distance range the estimate was read from.
    pub fit_window: (f64, f64),
    /// Standard error of the fitted slope; half the final bracket for the scan.
    pub slope_stderr: f64,
    pub method: ExponentMethod,
    /// Unclamped value before the `[0, n - 1/2]` sanity cap.
    pub raw_value: f64,
    pub capped: bool,
    /// Number of bins (fit) or shells (scan) used.
    pub points_used: usize,
    pub note: String,
}

/// Minimum orbit depth accepted by the estimators.
pub const MIN_ESTIMATE_DEPTH: usize = 6;
const MIN_POINTS: usize = 5;
const FIT_LOW: f64 = 0.2;
const FIT_HIGH: f64 = 0.8;
pub const DIVERGENCE_THRESHOLD: f64 = 1.05;
pub const SCAN_TOLERANCE: f64 = 0.02;

pub fn exponent_estimate(orbit: &OrbitSet, method: ExponentMethod) -> Result<ExponentEstimate> {
    if orbit.max_word_length < MIN_ESTIMATE_DEPTH {
        return Err(Error::usage(format!(
            "exponent estimation needs an orbit of depth at least {MIN_ESTIMATE_DEPTH}"
        )));
    }
    let n = orbit.model().n() as f64;
    let mut est = match method {
        ExponentMethod::CountingFit => counting_fit(orbit)?,
        ExponentMethod::DivergenceScan => divergence_scan(orbit, n)?,
    };
    let cap = n - 0.5;
    est.capped = est.raw_value < 0.0 || est.raw_value > cap;
    est.delta_est = est.raw_value.clamp(0.0, cap);
    Ok(est)
}

/// Ordinary least squares; returns `(slope, intercept, slope standard error)`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = if xs.len() > 2 {
        (sse / (m - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    (slope, intercept, stderr)
}

fn counting_fit(orbit: &OrbitSet) -> Result<ExponentEstimate> {
    let cf = counting_function(orbit, DEFAULT_BIN_WIDTH)?;
    let t_max = orbit.elements.iter().map(|g| g.displacement).fold(0.0, f64::max);
    let (lo, hi) = (FIT_LOW * t_max, FIT_HIGH * t_max);
    let (xs, ys): (Vec<f64>, Vec<f64>) = cf
        .counts
        .iter()
        .filter(|(t, c)| *t >= lo && *t <= hi && *c > 0)
        .map(|&(t, c)| (t, (c as f64).ln()))
        .unzip();
    if xs.len() < MIN_POINTS {
        return Err(Error::InsufficientData(format!(
            "{} counting bins in the fit window [{lo:.3}, {hi:.3}], need {MIN_POINTS}",
            xs.len()
        )));
    }
    let (slope, _, stderr) = least_squares(&xs, &ys);
    Ok(ExponentEstimate {
        delta_est: slope,
        fit_window: (lo, hi),
        slope_stderr: stderr,
        method: ExponentMethod::CountingFit,
        raw_value: slope,
        capped: false,
        points_used: xs.len(),
        note: format!("slope of ln N(T) over {} bins of width {DEFAULT_BIN_WIDTH}", xs.len()),
    })
}

/// `d_H(0, w)` for `1 - |w| = 2^-k`.
fn shell_distance(k: u32) -> f64 {
    (2f64.powi(k as i32 + 1) - 1.0).ln()
}

/// Shells the enumeration is expected to cover completely: `1..=k_h`, the shell
/// of the nearest orbit point on the deepest word level.
pub fn available_shells(orbit: &OrbitSet) -> u32 {
    let gap = radial_gap_from_distance(orbit.horizon_distance());
    shell_index(gap).unwrap_or(0)
}

struct ShellData {
    /// Per shell `1..=k_h`: origin distances of its elements.
    distances: Vec<Vec<f64>>,
}

impl ShellData {
    fn new(orbit: &OrbitSet, k_h: u32) -> Self {
        let mut distances = vec![Vec::new(); k_h as usize];
        for g in &orbit.elements {
            if let Some(k) = g.shell_index {
                if k <= k_h {
                    distances[k as usize - 1].push(g.origin_distance);
                }
            }
        }
        ShellData { distances }
    }

    fn has_entries(&self, range: std::ops::Range<usize>) -> bool {
        self.distances[range].iter().any(|d| !d.is_empty())
    }

    /// Mean partial sum over the nonempty shells in `range`.
    fn mean(&self, range: std::ops::Range<usize>, s: f64) -> f64 {
        let partials: Vec<f64> = self.distances[range]
            .iter()
            .filter(|ds| !ds.is_empty())
            .map(|ds| pairwise_sum(&ds.iter().map(|d| (-s * d).exp()).collect::<Vec<_>>()))
            .collect();
        pairwise_sum(&partials) / partials.len() as f64
    }
}

/// Ratio of the mean nonempty-shell sum over the last third of the available
/// shells to that over the middle third.
pub fn shell_growth_ratio(orbit: &OrbitSet, s: f64) -> Result<f64> {
    let k_h = available_shells(orbit);
    let third = (k_h / 3) as usize;
    if third == 0 {
        return Err(Error::InsufficientData("no available shells".into()));
    }
    let data = ShellData::new(orbit, k_h);
    let k = k_h as usize;
    Ok(data.mean(k - third..k, s) / data.mean(k - 2 * third..k - third, s))
}

fn divergence_scan(orbit: &OrbitSet, n: f64) -> Result<ExponentEstimate> {
    let k_h = available_shells(orbit);
    let data = ShellData::new(orbit, k_h);
    let nonempty = data.distances.iter().filter(|d| !d.is_empty()).count();
    let third = (k_h / 3) as usize;
    if nonempty < MIN_POINTS || third == 0 {
        return Err(Error::InsufficientData(format!(
            "{nonempty} nonempty shells up to the horizon shell {k_h}, need {MIN_POINTS}"
        )));
    }
    let k = k_h as usize;
    let middle = k - 2 * third..k - third;
    let last = k - third..k;
    if !data.has_entries(middle.clone()) || !data.has_entries(last.clone()) {
        return Err(Error::InsufficientData(format!(
            "an empty third among the available shells 1..={k_h}"
        )));
    }
    let ratio = |s: f64| data.mean(last.clone(), s) / data.mean(middle.clone(), s);
    let diverging = |s: f64| ratio(s) > DIVERGENCE_THRESHOLD;

    let (mut lo, mut hi) = (0.0, n);
    let note;
    let value = if !diverging(lo) {
        note = format!("shell sums shrink already at s = 0 (ratio {:.4})", ratio(0.0));
        0.0
    } else if diverging(hi) {
        note = format!("shell sums still grow at s = {n}");
        n
    } else {
        while hi - lo > SCAN_TOLERANCE {
            let mid = 0.5 * (lo + hi);
            if diverging(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let v = 0.5 * (lo + hi);
        note = format!(
            "last/middle third shell-sum ratio {:.4} at s = {v:.4}; threshold {DIVERGENCE_THRESHOLD}",
            ratio(v)
        );
        v
    };
    let first_shell = (k - 2 * third + 1) as u32;
    Ok(ExponentEstimate {
        delta_est: value,
        fit_window: (shell_distance(first_shell - 1), shell_distance(k_h)),
        slope_stderr: 0.5 * (hi - lo).min(SCAN_TOLERANCE),
        method: ExponentMethod::DivergenceScan,
        raw_value: value,
        capped: false,
        points_used: 2 * third,
        note: format!("shells {first_shell}..={k_h}: {note}"),
    })
}

/// Exponent estimates from two basepoints with the termwise comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct BasepointReport {
    pub first: ExponentEstimate,
    pub second: ExponentEstimate,
    pub difference: f64,
    /// `d_H(z1, z2)`.
    pub basepoint_distance: f64,
    /// Largest `|d_H(0, g z1) - d_H(0, g z2)|` over the common elements.
    pub max_log_ratio: f64,
    /// Elements whose ratio left `[exp(-d), exp(d)]`.
    pub violations: usize,
    pub elements_compared: usize,
}

/// Relative slack allowed on the triangle-inequality bound for rounding.
const RATIO_ROUNDING: f64 = 1e-12;

pub fn basepoint_independence_check(
    group: &GroupPresentation,
    z1: &InteriorPoint,
    z2: &InteriorPoint,
    depth: usize,
    method: ExponentMethod,
) -> Result<BasepointReport> {
    let o1 = enumerate_orbit(group, z1, depth)?;
    let o2 = enumerate_orbit(group, z2, depth)?;
    let first = exponent_estimate(&o1, method)?;
    let second = exponent_estimate(&o2, method)?;
    let bound = crate::geometry::hyperbolic_distance(z1, z2);
    let mut max_log_ratio = 0.0f64;
    let mut violations = 0;
    let mut compared = 0;
    // Deduplication works on matrices, so both enumerations list the same words.
    for (g1, g2) in o1.elements.iter().zip(&o2.elements) {
        if g1.word != g2.word {
            return Err(Error::Internal("enumerations from the two basepoints diverged".into()));
        }
        let log_ratio = (g2.origin_distance - g1.origin_distance).abs();
        max_log_ratio = max_log_ratio.max(log_ratio);
        let slack = RATIO_ROUNDING * (1.0 + g1.origin_distance.max(g2.origin_distance));
        if log_ratio > bound + slack {
            violations += 1;
        }
        compared += 1;
    }
    Ok(BasepointReport {
        difference: (first.delta_est - second.delta_est).abs(),
        first,
        second,
        basepoint_distance: bound,
        max_log_ratio,
        violations,
        elements_compared: compared,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn pairwise_sum_matches_naive() {
        let xs: Vec<f64> = (1..1000).map(|i| 1.0 / i as f64).collect();
        let naive: f64 = xs.iter().sum();
        assert!((pairwise_sum(&xs) - naive).abs() < 1e-12);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn least_squares_recovers_a_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (m, b, se) = least_squares(&xs, &ys);
        assert!((m - 2.0).abs() < 1e-14 && (b - 1.0).abs() < 1e-14 && se.abs() < 1e-12);
    }

    fn cyclic_orbit(depth: usize) -> OrbitSet {
        let g = fixtures::cyclic_loxodromic();
        enumerate_orbit(&g, &InteriorPoint::origin(g.model()), depth).unwrap()
    }

    #[test]
    fn series_at_zero_counts_elements() {
        let o = cyclic_orbit(4);
        assert_eq!(truncated_series(&o, 0.0).unwrap().value, 9.0);
        assert!(truncated_series(&o, -1.0).is_err());
    }

    #[test]
    fn counting_function_of_cyclic_group() {
        let o = cyclic_orbit(8);
        let l = 9f64.ln();
        let cf = counting_function(&o, 0.5).unwrap();
        for (t, n) in cf.counts {
            assert_eq!(n, 1 + 2 * ((t / l).floor() as usize).min(8), "T = {t}");
        }
    }

    #[test]
    fn estimators_need_depth() {
        let o = cyclic_orbit(5);
        assert!(exponent_estimate(&o, ExponentMethod::CountingFit).is_err());
    }

    #[test]
    fn method_names_round_trip() {
        for m in [ExponentMethod::CountingFit, ExponentMethod::DivergenceScan] {
            assert_eq!(ExponentMethod::parse(m.name()).unwrap(), m);
        }
        assert!(ExponentMethod::parse("nope").is_err());
    }
}

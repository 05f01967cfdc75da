//! Norms and functionals along a trajectory, and checkers for the
//! quantitative estimates (global bound, absorbing ball, exponential
//! synchronization).

use crate::dynamics::PairState;
use crate::error::{Error, Result};
use crate::grid::{h1_seminorm_sq, l2_norm_sq, Grid};
use crate::model::{compute_absorb_entry_time, compute_delta_mu, DerivedConstants, Parameters};

/// Default multiplicative slack on the synchronization bound.
pub const GRONWALL_SLACK: f64 = 1.05;

/// Diagnostics of one sampled state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSeriesRecord {
    pub t: f64,
    /// ‖g‖² = Σ of the six squared L² norms.
    pub norm_g_sq: f64,
    /// λ‖U‖² + ‖V‖² + ‖W‖².
    pub sync_l: f64,
    /// ‖g1 − g2‖² = ‖U‖² + ‖V‖² + ‖W‖².
    pub sync_dist_sq: f64,
    /// ‖∇u1‖² + ‖∇u2‖².
    pub h1_u: f64,
    /// C1(‖u1‖² + ‖u2‖²) + ‖v1‖² + ‖v2‖² + ‖w1‖² + ‖w2‖².
    pub weighted_norm: f64,
}

pub fn record_diagnostics(
    grid: &Grid,
    constants: &DerivedConstants,
    s: &PairState,
    t: f64,
) -> Result<TimeSeriesRecord> {
    s.check(grid)?;
    let sq = |f| l2_norm_sq(grid, f);
    let (u1, v1, w1) = (sq(&s.u1)?, sq(&s.v1)?, sq(&s.w1)?);
    let (u2, v2, w2) = (sq(&s.u2)?, sq(&s.v2)?, sq(&s.w2)?);
    let diff = s.difference();
    let (du, dv, dw) = (sq(&diff.u)?, sq(&diff.v)?, sq(&diff.w)?);
    Ok(TimeSeriesRecord {
        t,
        norm_g_sq: u1 + v1 + w1 + u2 + v2 + w2,
        sync_l: constants.lambda * du + dv + dw,
        sync_dist_sq: du + dv + dw,
        h1_u: h1_seminorm_sq(grid, &s.u1)? + h1_seminorm_sq(grid, &s.u2)?,
        weighted_norm: constants.c1 * (u1 + u2) + v1 + v2 + w1 + w2,
    })
}

/// Outcome of checking one inequality at every sample of a series.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub name: String,
    /// Fraction of checked samples at which the bound held.
    pub fraction: f64,
    /// Smallest `bound − observed` over the checked samples.
    pub worst_margin: f64,
    pub worst_time: f64,
    pub samples: usize,
    pub notes: Vec<String>,
}

impl BoundReport {
    pub fn passed(&self) -> bool {
        self.samples > 0 && self.fraction == 1.0
    }

    /// Builds a report from `(t, bound − observed, holds)` triples.
    fn from_margins(name: &str, margins: impl Iterator<Item = (f64, f64, bool)>) -> Self {
        let mut samples = 0;
        let mut held = 0;
        let mut worst_margin = f64::INFINITY;
        let mut worst_time = f64::NAN;
        for (t, margin, ok) in margins {
            samples += 1;
            if ok {
                held += 1;
            }
            if margin < worst_margin || worst_time.is_nan() {
                worst_margin = margin;
                worst_time = t;
            }
        }
        BoundReport {
            name: name.to_string(),
            fraction: if samples == 0 {
                0.0
            } else {
                held as f64 / samples as f64
            },
            worst_margin,
            worst_time,
            samples,
            notes: Vec::new(),
        }
    }
}

/// ‖g(t)‖² ≤ (max{C1,1}/min{C1,1})‖g0‖² + M|Ω|/min{C1,1} at every sample.
pub fn check_global_bound(
    series: &[TimeSeriesRecord],
    constants: &DerivedConstants,
    g0_norm_sq: f64,
) -> BoundReport {
    let bound = constants.global_bound(g0_norm_sq);
    BoundReport::from_margins(
        "global_bound",
        series
            .iter()
            .map(|r| (r.t, bound - r.norm_g_sq, r.norm_g_sq <= bound)),
    )
}

/// ‖g(t)‖² < K for every sample with t > T0, for data with ‖g0‖² ≤ `radius_sq`.
pub fn check_absorbing_entry(
    series: &[TimeSeriesRecord],
    constants: &DerivedConstants,
    radius_sq: f64,
) -> Result<BoundReport> {
    let entry_time = compute_absorb_entry_time(constants, radius_sq);
    let horizon = series.last().map_or(0.0, |r| r.t);
    if horizon <= entry_time {
        return Err(Error::HorizonShorterThanEntry {
            horizon,
            entry_time,
        });
    }
    let k = constants.k;
    let after_entry = series
        .iter()
        .filter(|r| r.t > entry_time || (entry_time == 0.0 && r.t == 0.0));
    let mut report = BoundReport::from_margins(
        "absorbing_entry",
        after_entry.map(|r| (r.t, k - r.norm_g_sq, r.norm_g_sq < k)),
    );
    report.notes.push(format!("entry time T0 = {entry_time}"));
    let per_log_unit = 1.0 / constants.r1;
    if per_log_unit >= 100.0 {
        report.notes.push(format!(
            "slow absorption: T0 grows by 1/r1 = {per_log_unit:.1} time units per log unit of R; practical horizons may not reach it"
        ));
    }
    Ok(report)
}

/// min{1,λ}‖g1 − g2‖² ≤ slack · e^{−μt} · max{1,λ}‖g1⁰ − g2⁰‖² at every sample.
pub fn check_gronwall_sync(
    series: &[TimeSeriesRecord],
    params: &Parameters,
    constants: &DerivedConstants,
    p: f64,
    initial_dist_sq: f64,
    slack: f64,
) -> Result<BoundReport> {
    let rate = compute_delta_mu(params, p)?;
    let lambda = constants.lambda;
    let lo = lambda.min(1.0);
    let hi = lambda.max(1.0);
    let mut report = BoundReport::from_margins(
        "gronwall_bound",
        series.iter().map(|r| {
            let lhs = lo * r.sync_dist_sq;
            let rhs = slack * (-rate.mu * r.t).exp() * hi * initial_dist_sq;
            (r.t, rhs - lhs, lhs <= rhs)
        }),
    );
    report
        .notes
        .push(format!("mu = {}, slack = {slack}", rate.mu));
    Ok(report)
}

/// Least-squares fit of −ln(sync_L) against t.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the log-linear fit.
    pub residual: f64,
    pub samples: usize,
}

pub fn fit_decay_rate(series: &[TimeSeriesRecord], t_start: f64, t_end: f64) -> Result<DecayFit> {
    if !(t_end > t_start) {
        return Err(Error::EmptyWindow { t_start, t_end });
    }
    let window: Vec<_> = series
        .iter()
        .filter(|r| r.t >= t_start && r.t <= t_end)
        .collect();
    if window.len() < 2 {
        return Err(Error::EmptyWindow { t_start, t_end });
    }
    if let Some(r) = window.iter().find(|r| !(r.sync_l > 0.0)) {
        return Err(Error::FullySynchronized { t: r.t });
    }
    let n = window.len() as f64;
    let ts: Vec<f64> = window.iter().map(|r| r.t).collect();
    let ys: Vec<f64> = window.iter().map(|r| -r.sync_l.ln()).collect();
    let t_mean = ts.iter().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (t, y) in ts.iter().zip(&ys) {
        sxy += (t - t_mean) * (y - y_mean);
        sxx += (t - t_mean) * (t - t_mean);
    }
    let rate = sxy / sxx;
    let intercept = y_mean - rate * t_mean;
    let sse: f64 = ts
        .iter()
        .zip(&ys)
        .map(|(t, y)| (y - intercept - rate * t).powi(2))
        .sum();
    Ok(DecayFit {
        rate,
        intercept,
        residual: (sse / n).sqrt(),
        samples: window.len(),
    })
}

/// Fits over the last half of the series, skipping the transient.
pub fn fit_decay_rate_default(series: &[TimeSeriesRecord]) -> Result<DecayFit> {
    let t_end = series.last().map_or(0.0, |r| r.t);
    let t_start = series.first().map_or(0.0, |r| r.t);
    fit_decay_rate(series, 0.5 * (t_start + t_end), t_end)
}

/// Finite-horizon stand-in for limsup ‖g1 − g2‖: the maximum over the last
/// 10% of the horizon.
pub fn asynchronous_degree_proxy(series: &[TimeSeriesRecord]) -> f64 {
    let t_end = series.last().map_or(0.0, |r| r.t);
    let t_start = series.first().map_or(0.0, |r| r.t);
    let cutoff = t_end - 0.1 * (t_end - t_start);
    series
        .iter()
        .filter(|r| r.t >= cutoff)
        .map(|r| r.sync_dist_sq.sqrt())
        .fold(0.0, f64::max)
}

/// Times after `transient` at which sync_L increased from the previous sample.
pub fn sync_increases_after(series: &[TimeSeriesRecord], transient: f64) -> Vec<f64> {
    series
        .windows(2)
        .filter(|w| w[1].t > transient && w[1].sync_l > w[0].sync_l)
        .map(|w| w[1].t)
        .collect()
}

/// Time at which the running maximum of `h1_u` was last raised.
pub fn h1_running_max_settle_time(series: &[TimeSeriesRecord]) -> Option<f64> {
    let mut best = f64::NEG_INFINITY;
    let mut when = None;
    for r in series {
        if r.h1_u > best {
            best = r.h1_u;
            when = Some(r.t);
        }
    }
    when
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::model::compute_absorbing_constants;
    use approx::assert_relative_eq;

    fn constants(p: f64) -> DerivedConstants {
        compute_absorbing_constants(&Parameters::test_set().with_coupling(p), 1.0).unwrap()
    }

    fn synthetic(f: impl Fn(f64) -> f64) -> Vec<TimeSeriesRecord> {
        (0..=100)
            .map(|i| {
                let t = i as f64 * 0.1;
                TimeSeriesRecord {
                    t,
                    norm_g_sq: 1.0,
                    sync_l: f(t),
                    sync_dist_sq: f(t),
                    h1_u: 0.0,
                    weighted_norm: 1.0,
                }
            })
            .collect()
    }

    #[test]
    fn record_values() {
        let g = make_grid(1, 11, 1.0).unwrap();
        let k = constants(0.0);
        let sync = PairState::constant(&g, [0.5, 0.1, -0.2, 0.5, 0.1, -0.2]);
        let rec = record_diagnostics(&g, &k, &sync, 0.0).unwrap();
        assert_eq!(rec.sync_l, 0.0);
        assert_eq!(rec.sync_dist_sq, 0.0);

        let ones = PairState::constant(&g, [1.0; 6]);
        let rec = record_diagnostics(&g, &k, &ones, 0.0).unwrap();
        assert_relative_eq!(rec.norm_g_sq, 6.0, max_relative = 1e-14);
        assert_relative_eq!(rec.weighted_norm, 2.0 * k.c1 + 4.0, max_relative = 1e-14);

        let mut s = PairState::zeros(&g);
        s.u1 = g.constant(1.0);
        let rec = record_diagnostics(&g, &k, &s, 0.0).unwrap();
        assert_relative_eq!(rec.sync_l, 8.0, max_relative = 1e-14);
        assert_relative_eq!(rec.sync_dist_sq, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn decay_fit_exact_inputs() {
        let fit = fit_decay_rate(&synthetic(|t| (-3.0 * t).exp()), 0.0, 10.0).unwrap();
        assert!((fit.rate - 3.0).abs() < 1e-9);
        let fit = fit_decay_rate(&synthetic(|t| 5.0 * (-0.5 * t).exp()), 2.0, 10.0).unwrap();
        assert!((fit.rate - 0.5).abs() < 1e-9);
        assert!(fit.residual < 1e-9);
        let fit = fit_decay_rate_default(&synthetic(|t| (-2.0 * t).exp())).unwrap();
        assert!((fit.rate - 2.0).abs() < 1e-9);
        assert_eq!(fit.samples, 51);
    }

    #[test]
    fn decay_fit_errors() {
        let s = synthetic(|t| (-t).exp());
        assert!(matches!(
            fit_decay_rate(&s, 20.0, 30.0),
            Err(Error::EmptyWindow { .. })
        ));
        assert!(matches!(
            fit_decay_rate(&s, 5.0, 5.0),
            Err(Error::EmptyWindow { .. })
        ));
        let s = synthetic(|t| if t > 4.0 { 0.0 } else { 1.0 });
        assert!(matches!(
            fit_decay_rate(&s, 0.0, 10.0),
            Err(Error::FullySynchronized { .. })
        ));
    }

    #[test]
    fn gronwall_zero_case_and_threshold() {
        let k = constants(6.0);
        let params = Parameters::test_set().with_coupling(6.0);
        let s = synthetic(|_| 0.0);
        let report = check_gronwall_sync(&s, &params, &k, 6.0, 0.0, GRONWALL_SLACK).unwrap();
        assert!(report.passed());
        assert_eq!(report.worst_margin, 0.0);
        assert!(matches!(
            check_gronwall_sync(&s, &params, &k, 4.0, 1.0, GRONWALL_SLACK),
            Err(Error::BelowThreshold { .. })
        ));
    }

    #[test]
    fn gronwall_detects_slow_decay() {
        let k = constants(6.0);
        let params = Parameters::test_set().with_coupling(6.0);
        // distance decaying at half the guaranteed rate violates the bound eventually
        let s = synthetic(|t| (-0.5 * t).exp());
        let report = check_gronwall_sync(&s, &params, &k, 6.0, 1.0, GRONWALL_SLACK).unwrap();
        assert!(report.fraction < 1.0);
        assert!(report.worst_margin < 0.0);
    }

    #[test]
    fn global_bound_fixtures() {
        let k = constants(0.0);
        let s = synthetic(|_| 0.0);
        assert!(check_global_bound(&s, &k, 1.0).passed());

        let mut broken = k;
        broken.m = 0.0;
        let mut grown = s.clone();
        for r in grown.iter_mut() {
            r.norm_g_sq = 1.0 + r.t;
        }
        let report = check_global_bound(&grown, &broken, 1.0);
        assert!(report.fraction < 1.0);
        assert!(report.worst_margin < 0.0);
        assert_eq!(report.worst_time, 10.0);
    }

    #[test]
    fn absorbing_entry_cases() {
        let k = constants(0.0);
        let s = synthetic(|_| 0.0);
        let report = check_absorbing_entry(&s, &k, 0.0).unwrap();
        assert_eq!(report.samples, s.len());
        assert!(report.passed());

        // T0 = 2 ln(10 * 5) ≈ 7.82
        let report = check_absorbing_entry(&s, &k, 10.0).unwrap();
        assert!(report.samples < s.len() && report.samples > 0);
        assert!(matches!(
            check_absorbing_entry(&s, &k, 1e6),
            Err(Error::HorizonShorterThanEntry { .. })
        ));

        let typical = compute_absorbing_constants(&Parameters::typical(), 1.0).unwrap();
        let long: Vec<_> = (0..=10)
            .map(|i| TimeSeriesRecord {
                t: i as f64 * 1000.0,
                ..s[0]
            })
            .collect();
        let report = check_absorbing_entry(&long, &typical, 0.0).unwrap();
        assert!(report.notes.iter().any(|n| n.contains("952.4")));
    }

    #[test]
    fn h1_settle_time_and_proxy() {
        let mut s = synthetic(|t| (-t).exp());
        for r in s.iter_mut() {
            r.h1_u = (r.t * 4.0).min(2.0);
        }
        assert_eq!(h1_running_max_settle_time(&s), Some(0.5));
        let proxy = asynchronous_degree_proxy(&s);
        assert_relative_eq!(proxy, (-9.0f64).exp().sqrt(), max_relative = 1e-9);
        assert!(sync_increases_after(&s, 0.0).is_empty());
    }
}

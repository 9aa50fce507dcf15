//! Monte Carlo oracle: exact event-driven trajectories, passage-time samples,
//! empirical transforms and Kolmogorov-Smirnov tests.
//!
//! Trajectory `k` of a run with seed `s` draws from ChaCha8 keyed by `s` on
//! stream `k`, so samples are identical whatever the number of workers.

mod store;

pub use store::{chain_hash, read_samples, write_samples, StoredSample};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Open01};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hitting::{density_cdf, RationalExpLaw};
use crate::numeric::{indexed_map, CompensatedSum};
use crate::rates::{classify_boundary, series_r_from, BirthDeathRates, BoundaryClass, TailPolicy};

/// Default cap on jumps per trajectory.
pub const EVENT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopRule {
    /// First entrance to state `n`.
    Hit(usize),
    /// Run until time `t`.
    Horizon(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Path {
    /// Jump times, starting with 0.
    pub times: Vec<f64>,
    /// State held from `times[k]` on.
    pub states: Vec<usize>,
    /// Stopping time: the hitting time, or the horizon.
    pub end: f64,
    /// The event budget ran out before the stop rule fired.
    pub censored: bool,
}

fn rng_for(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One jump from `state`: `(holding time, next state)`. A `ceiling` state
/// reflects (no births from it).
fn step(
    rates: &dyn BirthDeathRates,
    state: usize,
    ceiling: Option<usize>,
    rng: &mut ChaCha8Rng,
) -> (f64, usize) {
    let b = if ceiling == Some(state) {
        0.0
    } else {
        rates.birth(state)
    };
    let a = if state == 0 { 0.0 } else { rates.death(state) };
    let total = a + b;
    let hold: f64 = Exp1.sample(rng);
    let u: f64 = Open01.sample(rng);
    let next = if u * total < b { state + 1 } else { state - 1 };
    (hold / total, next)
}

/// A full path from `start`, exact in distribution and deterministic in `seed`.
pub fn sample_trajectory(
    rates: &dyn BirthDeathRates,
    start: usize,
    stop: StopRule,
    seed: u64,
) -> Path {
    let mut rng = rng_for(seed, 0);
    let mut times = vec![0.0];
    let mut states = vec![start];
    let (mut t, mut x) = (0.0, start);
    for _ in 0..EVENT_BUDGET {
        match stop {
            StopRule::Hit(n) if x == n => {
                return Path {
                    times,
                    states,
                    end: t,
                    censored: false,
                }
            }
            _ => {}
        }
        let (dt, next) = step(rates, x, None, &mut rng);
        if let StopRule::Horizon(h) = stop {
            if t + dt > h {
                return Path {
                    times,
                    states,
                    end: h,
                    censored: false,
                };
            }
        }
        t += dt;
        x = next;
        times.push(t);
        states.push(x);
    }
    Path {
        times,
        states,
        end: t,
        censored: true,
    }
}

/// First passage times from `start` to each of `targets` (all on one side of
/// `start`, sorted away from it), on trajectory `index`. `None` when censored,
/// with the time reached.
fn passage_times(
    rates: &dyn BirthDeathRates,
    start: usize,
    targets: &[usize],
    seed: u64,
    index: u64,
    budget: u64,
) -> std::result::Result<Vec<f64>, f64> {
    let mut rng = rng_for(seed, index);
    let mut out = Vec::with_capacity(targets.len());
    let (mut t, mut x) = (0.0, start);
    let mut events = 0;
    for &n in targets {
        while x != n {
            if events == budget {
                return Err(t);
            }
            let (dt, next) = step(rates, x, None, &mut rng);
            t += dt;
            x = next;
            events += 1;
        }
        out.push(t);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingSample {
    /// Completed passage times, in trajectory order.
    pub values: Vec<f64>,
    /// Times reached by censored trajectories when the budget ran out.
    pub censored_times: Vec<f64>,
    pub start: usize,
    /// `None` for the passage to infinity.
    pub target: Option<usize>,
    pub censored_count: usize,
    pub seed: u64,
    pub n_samples: usize,
    /// Bound on `E(true - sampled)` for surrogate passages; 0 when exact.
    pub bias_bound: f64,
}

impl HittingSample {
    pub fn mean(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .collect::<CompensatedSum>()
            .value()
            / self.values.len() as f64
    }

    pub fn standard_error(&self) -> f64 {
        let n = self.values.len() as f64;
        let m = self.mean();
        let ss = self
            .values
            .iter()
            .map(|v| (v - m).powi(2))
            .collect::<CompensatedSum>()
            .value();
        (ss / (n - 1.0) / n).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimOptions {
    pub event_budget: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            event_budget: EVENT_BUDGET,
        }
    }
}

/// `n` independent samples of `T_{start,target}`.
pub fn sample_hitting(
    rates: &dyn BirthDeathRates,
    start: usize,
    target: usize,
    n: usize,
    seed: u64,
    opts: &SimOptions,
) -> Result<HittingSample> {
    if start == target {
        return Err(Error::InvalidArgument("start and target coincide".into()));
    }
    let runs = indexed_map(n, |k| {
        passage_times(rates, start, &[target], seed, k as u64, opts.event_budget)
    });
    let mut values = Vec::with_capacity(n);
    let mut censored_times = Vec::new();
    for r in runs {
        match r {
            Ok(v) => values.push(v[0]),
            Err(t) => censored_times.push(t),
        }
    }
    Ok(HittingSample {
        censored_count: censored_times.len(),
        values,
        censored_times,
        start,
        target: Some(target),
        seed,
        n_samples: n,
        bias_bound: 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelMean {
    pub level: usize,
    pub mean: f64,
    pub standard_error: f64,
    /// `E(zeta - T_{0,L}) = R - R_L`.
    pub bias_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LifetimeSample {
    /// `T_{0,L}` at the last level, standing in for `zeta`.
    pub sample: HittingSample,
    pub levels: Vec<LevelMean>,
    /// The bias at the last level is above `tolerance`.
    pub bias_flagged: bool,
    pub tolerance: f64,
}

/// Doubling levels from 4 until the remainder `R - R_L` drops below `tolerance`.
pub fn default_level_schedule(
    rates: &dyn BirthDeathRates,
    tolerance: f64,
    policy: &TailPolicy,
) -> Vec<usize> {
    let mut out = vec![4];
    while out.len() < 9
        && series_r_from(rates, *out.last().expect("nonempty"), policy).upper() > tolerance
    {
        out.push(out.last().expect("nonempty") * 2);
    }
    out
}

/// Life time from 0 under an exit boundary, through `T_{0,L}` along
/// `level_schedule`. One trajectory yields every level, so level means are
/// pathwise increasing.
pub fn sample_lifetime_exit(
    rates: &dyn BirthDeathRates,
    level_schedule: &[usize],
    seed: u64,
    n: usize,
    tolerance: f64,
    policy: &TailPolicy,
    opts: &SimOptions,
) -> Result<LifetimeSample> {
    let rep = classify_boundary(rates, policy);
    match rep.class {
        BoundaryClass::Exit => {}
        BoundaryClass::Undetermined => {
            return Err(Error::Undetermined(
                "life-time sampling needs an exit boundary".into(),
            ))
        }
        class => {
            return Err(Error::Refused {
                reason: "life-time sampling needs an exit boundary".into(),
                class,
            })
        }
    }
    if level_schedule.is_empty()
        || level_schedule.windows(2).any(|w| w[0] >= w[1])
        || level_schedule[0] == 0
    {
        return Err(Error::InvalidArgument(
            "level schedule must be positive and increasing".into(),
        ));
    }
    let runs = indexed_map(n, |k| {
        passage_times(rates, 0, level_schedule, seed, k as u64, opts.event_budget)
    });
    let mut per_level: Vec<Vec<f64>> = vec![Vec::with_capacity(n); level_schedule.len()];
    let mut censored_times = Vec::new();
    for r in runs {
        match r {
            Ok(v) => v
                .into_iter()
                .enumerate()
                .for_each(|(l, t)| per_level[l].push(t)),
            Err(t) => censored_times.push(t),
        }
    }
    let levels: Vec<LevelMean> = level_schedule
        .iter()
        .zip(&per_level)
        .map(|(&level, vals)| {
            let s = HittingSample {
                values: vals.clone(),
                censored_times: Vec::new(),
                start: 0,
                target: Some(level),
                censored_count: 0,
                seed,
                n_samples: n,
                bias_bound: 0.0,
            };
            LevelMean {
                level,
                mean: s.mean(),
                standard_error: s.standard_error(),
                bias_bound: series_r_from(rates, level, policy).upper(),
            }
        })
        .collect();
    let last = levels.last().expect("nonempty");
    let bias = last.bias_bound;
    Ok(LifetimeSample {
        sample: HittingSample {
            values: per_level.pop().expect("nonempty"),
            censored_count: censored_times.len(),
            censored_times,
            start: 0,
            target: None,
            seed,
            n_samples: n,
            bias_bound: bias,
        },
        bias_flagged: !(bias <= tolerance),
        tolerance,
        levels,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceEstimate {
    pub s: f64,
    /// Mean of `e^{-s T}` over completed trajectories, scaled by the total count.
    pub mean: f64,
    pub standard_error: f64,
    /// Censored paths contribute `[0, e^{-s t_reached}]` each.
    pub lower: f64,
    pub upper: f64,
}

/// Empirical `E e^{-s T}` with standard errors on `s_grid`.
pub fn empirical_laplace(sample: &HittingSample, s_grid: &[f64]) -> Vec<LaplaceEstimate> {
    let total = (sample.values.len() + sample.censored_times.len()) as f64;
    s_grid
        .iter()
        .map(|&s| {
            let vals: Vec<f64> = sample.values.iter().map(|v| (-s * v).exp()).collect();
            let sum = vals.iter().copied().collect::<CompensatedSum>().value();
            let mean = sum / total;
            let ss = vals
                .iter()
                .map(|v| (v - mean).powi(2))
                .collect::<CompensatedSum>()
                .value();
            let se = if total > 1.0 {
                (ss / (total - 1.0) / total).sqrt()
            } else {
                0.0
            };
            let extra = sample
                .censored_times
                .iter()
                .map(|t| (-s * t).exp())
                .sum::<f64>()
                / total;
            LaplaceEstimate {
                s,
                mean,
                standard_error: se,
                lower: mean,
                upper: mean + extra,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub effective_n: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub pass: bool,
}

/// Asymptotic Kolmogorov tail `P[K > lambda]`.
fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn ks_result(d: f64, ne: f64, alpha: f64) -> KsResult {
    let sq = ne.sqrt();
    let p = kolmogorov_tail((sq + 0.12 + 0.11 / sq) * d);
    KsResult {
        statistic: d,
        effective_n: ne,
        p_value: p,
        alpha,
        pass: p >= alpha,
    }
}

/// Two-sided one-sample KS test against a finite law at level `alpha`.
pub fn ks_test(sample: &HittingSample, law: &RationalExpLaw, alpha: f64) -> Result<KsResult> {
    if sample.censored_count > 0 {
        return Err(Error::InvalidArgument(format!(
            "{} censored trajectories; the KS test needs complete samples",
            sample.censored_count
        )));
    }
    if sample.values.is_empty() {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    let mut xs = sample.values.clone();
    xs.sort_by(f64::total_cmp);
    let cdf = density_cdf(law, &xs)?.cdf;
    let n = xs.len() as f64;
    let d = cdf
        .iter()
        .enumerate()
        .map(|(k, f)| ((k + 1) as f64 / n - f).max(f - k as f64 / n))
        .fold(0.0, f64::max);
    Ok(ks_result(d, n, alpha))
}

/// Two-sided two-sample KS test at level `alpha`.
pub fn two_sample_ks(x: &[f64], y: &[f64], alpha: f64) -> Result<KsResult> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::InvalidArgument("empty sample".into()));
    }
    let mut a = x.to_vec();
    let mut b = y.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    Ok(ks_result(d, n * m / (n + m), alpha))
}

/// Empirical distribution of the state at time `t` from `start`, for the
/// chain reflected at `ceiling`, over `n` trajectories.
pub fn sample_occupancy(
    rates: &dyn BirthDeathRates,
    start: usize,
    t: f64,
    ceiling: usize,
    n: usize,
    seed: u64,
) -> Vec<f64> {
    let ends = indexed_map(n, |k| {
        let mut rng = rng_for(seed, k as u64);
        let (mut now, mut x) = (0.0, start);
        loop {
            let (dt, next) = step(rates, x, Some(ceiling), &mut rng);
            if now + dt > t {
                return x;
            }
            now += dt;
            x = next;
        }
    });
    let mut freq = vec![0.0; ceiling + 1];
    for x in ends {
        freq[x] += 1.0 / n as f64;
    }
    freq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hitting::law_up;
    use crate::rates::RateSpec;

    fn unit() -> RateSpec {
        RateSpec::constant(1.0, 1.0).unwrap()
    }

    #[test]
    fn same_seed_same_path() {
        let a = sample_trajectory(&unit(), 0, StopRule::Hit(3), 7);
        let b = sample_trajectory(&unit(), 0, StopRule::Hit(3), 7);
        assert_eq!(a, b);
        assert_eq!(*a.states.last().unwrap(), 3);
        let h = sample_trajectory(&unit(), 0, StopRule::Horizon(2.0), 7);
        assert_eq!(h.end, 2.0);
        assert!(h.times.last().unwrap() <= &2.0);
    }

    #[test]
    fn unit_chain_mean_passage() {
        let s = sample_hitting(&unit(), 0, 1, 20_000, 1, &SimOptions::default()).unwrap();
        assert!((s.mean() - 1.0).abs() < 3.0 * s.standard_error());
    }

    #[test]
    fn laplace_at_zero_is_one() {
        let s = sample_hitting(&unit(), 0, 2, 100, 3, &SimOptions::default()).unwrap();
        let e = empirical_laplace(&s, &[0.0]);
        assert_eq!(e[0].mean, 1.0);
        assert_eq!(e[0].standard_error, 0.0);
    }

    #[test]
    fn censoring_is_reported() {
        let s = sample_hitting(&unit(), 0, 50, 10, 3, &SimOptions { event_budget: 5 }).unwrap();
        assert_eq!(s.censored_count, 10);
        assert!(s.values.is_empty());
        let law = law_up(&unit(), 0, 50).unwrap();
        assert!(ks_test(&s, &law, 0.01).is_err());
        let e = empirical_laplace(&s, &[1.0]);
        assert_eq!(e[0].lower, 0.0);
        assert!(e[0].upper > 0.0);
    }

    #[test]
    fn kolmogorov_tail_values() {
        // P[K > 1.36] ~ 0.05, P[K > 1.63] ~ 0.01
        assert!((kolmogorov_tail(1.358) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_tail(1.628) - 0.01).abs() < 1e-3);
    }

    #[test]
    fn worker_count_does_not_change_samples() {
        let a = sample_hitting(&unit(), 0, 3, 500, 11, &SimOptions::default()).unwrap();
        let seq: Vec<f64> = (0..500)
            .map(|k| passage_times(&unit(), 0, &[3], 11, k, EVENT_BUDGET).unwrap()[0])
            .collect();
        assert_eq!(a.values, seq);
    }
}

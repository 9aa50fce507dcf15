//! Limits of truncated spectra along a doubling schedule.
//!
//! Along `n -> inf` (absorbed at the top) and `N -> inf` (absorbed at `n`,
//! reflecting at `N`) each eigenvalue decreases to its limit, so the values at
//! the final level are upper bounds for the limits and
//! `target - sum_{nu < K} 1/lambda_nu^{(level)}` bounds the reciprocal tail.

use serde::{Deserialize, Serialize};

use super::{build_absorbed_bottom_reflected_top, build_absorbed_top, build_reflected};
use super::{lowest_eigenvalues, GeneratorMatrix, Spectrum};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::rates::{
    classify_boundary, series_r, series_s, series_t, BirthDeathRates, BoundaryClass, SeriesValue,
    TailPolicy,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitOptions {
    /// Cauchy tolerance between successive levels, and tail tolerance for `K`.
    pub tol: f64,
    /// Window size at the first level.
    pub start: usize,
    /// Largest window size tried.
    pub max_level: usize,
    /// Fixed number of limit eigenvalues; chosen from the tail criterion when absent.
    pub count: Option<usize>,
    /// Eigenvalues computed per level when `count` is absent.
    pub max_auto_count: usize,
    /// Relative slack allowed before an increase counts as non-monotone.
    pub monotone_slack: f64,
    pub policy: TailPolicy,
}

impl Default for LimitOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            start: 8,
            max_level: 1 << 14,
            count: None,
            max_auto_count: 256,
            monotone_slack: 1e-10,
            policy: TailPolicy::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: usize,
    pub computed: usize,
    pub complete: bool,
    pub reciprocal_sum: f64,
    /// Largest relative change of the first `K` eigenvalues against the previous level.
    pub max_change: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitSpectrum {
    /// The first `K` limit eigenvalues, with `tail_bound` on the rest.
    pub spectrum: Spectrum,
    /// Name of the series the reciprocal sum must reproduce.
    pub target: String,
    pub target_value: f64,
    pub target_error: f64,
    /// `sum_{nu < K} 1/lambda_nu`.
    pub partial_sum: f64,
    /// Certified bound on `sum_{nu >= K} 1/lambda_nu`.
    pub tail_bound: f64,
    /// Independent estimate of the same tail from the eigenvalues beyond `K`
    /// at the final level, extrapolated geometrically past the last one.
    pub tail_estimate: Option<f64>,
    /// `|partial_sum + tail_estimate - target| / target`.
    pub identity_relative: Option<f64>,
    pub converged: bool,
    pub budget_exhausted: bool,
    /// Monotonicity is a theorem for absorbed truncations and a hard error
    /// there; for reflected ergodic windows violations are only counted.
    pub monotone_violations: usize,
    pub levels: Vec<LevelRecord>,
}

impl LimitSpectrum {
    pub fn values(&self) -> &[f64] {
        &self.spectrum.values
    }

    /// `partial_sum + tail_estimate`, or `None` if the tail could not be extrapolated.
    pub fn spectral_total(&self) -> Option<f64> {
        self.tail_estimate.map(|t| self.partial_sum + t)
    }
}

fn target_of(v: &SeriesValue) -> Result<(f64, f64)> {
    match (v.value(), v.error_bound()) {
        (Some(x), Some(e)) => Ok((x, e)),
        _ => Err(Error::Undetermined(format!(
            "{} is not certified finite",
            v.series
        ))),
    }
}

fn require_class(
    rates: &dyn BirthDeathRates,
    policy: &TailPolicy,
    want: BoundaryClass,
    what: &str,
) -> Result<()> {
    let rep = classify_boundary(rates, policy);
    if rep.class == want {
        return Ok(());
    }
    if rep.class == BoundaryClass::Undetermined {
        return Err(Error::Undetermined(format!(
            "{what} needs the {want} boundary class; classification is undetermined"
        )));
    }
    Err(Error::Refused {
        reason: format!("{what} needs the {want} boundary class"),
        class: rep.class,
    })
}

fn geometric_tail(values: &[f64]) -> Option<f64> {
    let k = values.len();
    if k < 2 {
        return None;
    }
    let r = values[k - 2] / values[k - 1];
    (r < 1.0).then(|| r / (1.0 - r) / values[k - 1])
}

struct Driver<'a> {
    build: &'a dyn Fn(usize) -> Result<GeneratorMatrix>,
    target_name: String,
    target: (f64, f64),
    monotone_required: bool,
    opts: LimitOptions,
}

impl Driver<'_> {
    fn run(&self) -> Result<LimitSpectrum> {
        let opts = &self.opts;
        let (target, target_err) = self.target;
        let target_upper = target + target_err;
        let mut size = opts.start.max(1);
        let mut prev: Option<(usize, Vec<f64>)> = None;
        let mut levels = Vec::new();
        let mut violations = 0;
        let mut budget_exhausted = false;
        let mut converged = false;
        let mut last: Option<(Spectrum, usize)> = None;

        loop {
            let g = match (self.build)(size) {
                Ok(g) => g,
                Err(Error::InvalidRates(_)) if last.is_some() => {
                    budget_exhausted = true;
                    break;
                }
                Err(e) => return Err(e),
            };
            let j = g.symmetrize()?;
            let want = opts.count.unwrap_or(opts.max_auto_count);
            let spec = lowest_eigenvalues(&j, want)?;
            let values = &spec.values;
            let level = spec.level;

            if let Some((plevel, p)) = &prev {
                for (nu, (&now, &before)) in values.iter().zip(p).enumerate() {
                    if now > before * (1.0 + opts.monotone_slack) {
                        if self.monotone_required {
                            return Err(Error::NonMonotone {
                                index: nu,
                                previous: before,
                                current: now,
                                from: *plevel,
                                to: level,
                            });
                        }
                        violations += 1;
                    }
                }
            }

            let k = match opts.count {
                Some(c) => Some(c.min(values.len())),
                None => {
                    let mut s = CompensatedSum::new();
                    let mut found = None;
                    for (nu, v) in values.iter().enumerate() {
                        s.add(1.0 / v);
                        if target_upper - s.value() < opts.tol * target {
                            found = Some(nu + 1);
                            break;
                        }
                    }
                    found
                }
            };
            let max_change = match (&prev, k) {
                (Some((_, p)), Some(k)) if p.len() >= k => Some(
                    (0..k)
                        .map(|nu| (values[nu] - p[nu]).abs() / values[nu])
                        .fold(0.0, f64::max),
                ),
                _ => None,
            };
            levels.push(LevelRecord {
                level,
                computed: values.len(),
                complete: spec.complete,
                reciprocal_sum: spec.reciprocal_sum,
                max_change,
            });
            let k_final = k.unwrap_or(values.len());
            prev = Some((level, values.clone()));
            last = Some((spec, k_final));
            if matches!(max_change, Some(c) if c < opts.tol) {
                converged = true;
                break;
            }
            if size * 2 > opts.max_level {
                budget_exhausted = true;
                break;
            }
            size *= 2;
        }

        let (spec, k) = last.expect("at least one level");
        let limits = spec.values[..k].to_vec();
        let partial_sum = limits
            .iter()
            .map(|v| 1.0 / v)
            .collect::<CompensatedSum>()
            .value();
        let tail_bound = (target_upper - partial_sum).max(0.0);
        let beyond: f64 = spec.values[k..]
            .iter()
            .map(|v| 1.0 / v)
            .collect::<CompensatedSum>()
            .value();
        let tail_estimate = if spec.complete {
            Some(beyond)
        } else {
            geometric_tail(&spec.values).map(|g| beyond + g)
        };
        let identity_relative = tail_estimate.map(|t| ((partial_sum + t) - target).abs() / target);
        let mut out = Spectrum::from_values(spec.kind, spec.dimension, limits, false);
        out.tail_bound = Some(tail_bound);
        Ok(LimitSpectrum {
            spectrum: out,
            target: self.target_name.clone(),
            target_value: target,
            target_error: target_err,
            partial_sum,
            tail_bound,
            tail_estimate,
            identity_relative,
            converged,
            budget_exhausted,
            monotone_violations: violations,
            levels,
        })
    }
}

/// `lambda_nu = lim_n lambda_nu^{(n)}` for an exit boundary, certified against `R`.
pub fn limit_spectrum_exit(
    rates: &dyn BirthDeathRates,
    opts: &LimitOptions,
) -> Result<LimitSpectrum> {
    require_class(
        rates,
        &opts.policy,
        BoundaryClass::Exit,
        "exit spectral limit",
    )?;
    let target = target_of(&series_r(rates, &opts.policy))?;
    let build = |n: usize| build_absorbed_top(rates, n);
    Driver {
        build: &build,
        target_name: "R".into(),
        target,
        monotone_required: true,
        opts: *opts,
    }
    .run()
}

/// `lambda-hat_{n,nu} = lim_N lambda-hat_{n,nu}^{(N)}` for an entrance boundary,
/// certified against `S_n`.
pub fn limit_spectrum_entrance(
    rates: &dyn BirthDeathRates,
    n: usize,
    opts: &LimitOptions,
) -> Result<LimitSpectrum> {
    require_class(
        rates,
        &opts.policy,
        BoundaryClass::Entrance,
        "entrance spectral limit",
    )?;
    let sn = series_s(rates, n, &opts.policy);
    let target = target_of(&sn)?;
    let build = move |size: usize| build_absorbed_bottom_reflected_top(rates, n, n + size);
    Driver {
        build: &build,
        target_name: sn.series.clone(),
        target,
        monotone_required: true,
        opts: *opts,
    }
    .run()
}

/// Positive eigenvalues of the ergodic chain from reflected windows `0..=N`,
/// certified against `T`. Requires an entrance boundary (strong ergodicity).
pub fn limit_spectrum_ergodic(
    rates: &dyn BirthDeathRates,
    opts: &LimitOptions,
) -> Result<LimitSpectrum> {
    require_class(
        rates,
        &opts.policy,
        BoundaryClass::Entrance,
        "ergodic spectral limit",
    )?;
    let target = target_of(&series_t(rates, &opts.policy))?;
    let build = |size: usize| build_reflected(rates, size);
    Driver {
        build: &build,
        target_name: "T".into(),
        target,
        monotone_required: false,
        opts: *opts,
    }
    .run()
}

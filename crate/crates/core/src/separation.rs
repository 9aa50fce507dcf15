//! Separation distance on reflected windows, checked against the strong
//! stationary time tail, and the separation convergence rate.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::duality::{mean_triple, require_entrance, sst_cdf_from_state, sst_law, MeanTriple};
use crate::error::{Error, Result};
use crate::hitting::Bracket;
use crate::numeric::{indexed_map, log_add_exp, CompensatedSum};
use crate::rates::{build_measures_with, BirthDeathRates, TailPolicy};
use crate::spectral::LimitOptions;

/// Stationary mass allowed beyond the window.
pub const TAIL_MASS: f64 = 1e-8;

/// Extra Poisson terms past the window width, so that entries `p_ij` with
/// `|i - j|` up to `N` keep relative accuracy.
const EXTRA_TERMS: usize = 40;

/// Largest `Lambda h` summed directly.
const STEP: f64 = 64.0;

/// `p_ij(t)` on `0..=N` for the chain reflected at `N`, row-major.
///
/// The step `h = t / 2^k` is chosen with `Lambda h <= 64`, `P(h)` is
/// summed by uniformization past the Poisson bulk plus `N + 40` terms, and
/// `P(t)` follows by `k` squarings. Each squaring can double the rounding
/// error, so the step is kept as long as the Poisson sum allows. Every
/// operation adds nonnegative numbers, so small entries carry the same
/// relative accuracy as large ones.
pub fn transient_kernel(
    rates: &dyn BirthDeathRates,
    big_n: usize,
    t: f64,
) -> Result<Vec<Vec<f64>>> {
    if big_n < 1 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time {t} must be finite and nonnegative"
        )));
    }
    let m = big_n + 1;
    let b: Vec<f64> = (0..m)
        .map(|i| if i < big_n { rates.birth(i) } else { 0.0 })
        .collect();
    let a: Vec<f64> = (0..m)
        .map(|i| if i > 0 { rates.death(i) } else { 0.0 })
        .collect();
    if let Some(bad) = a.iter().chain(&b).find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidRates(format!(
            "rate {bad} in the window is not finite"
        )));
    }
    let mut p: Vec<Vec<f64>> = (0..m)
        .map(|i| (0..m).map(|j| f64::from(u8::from(i == j))).collect())
        .collect();
    if t == 0.0 {
        return Ok(p);
    }
    let big_lambda = (0..m).map(|i| a[i] + b[i]).fold(0.0, f64::max);
    let x = big_lambda * t;
    let squarings = if x > STEP {
        (x / STEP).log2().ceil() as u32
    } else {
        0
    };
    let h = t / 2f64.powi(squarings as i32);
    let xh = big_lambda * h;

    // U = I + Q / Lambda, tridiagonal and nonnegative.
    let up: Vec<f64> = b.iter().map(|v| v / big_lambda).collect();
    let down: Vec<f64> = a.iter().map(|v| v / big_lambda).collect();
    let stay: Vec<f64> = (0..m).map(|i| 1.0 - up[i] - down[i]).collect();
    let terms = (xh + 10.0 * xh.sqrt()).ceil() as usize + m + EXTRA_TERMS;
    // Poisson weights, renormalized: the neglected tail is far below rounding,
    // while ln_gamma carries relative errors near 1e-14 that squaring would amplify.
    let weights: Vec<f64> = (0..=terms)
        .map(|k| (-xh + k as f64 * xh.ln() - ln_gamma(k as f64 + 1.0)).exp())
        .collect();
    let total: f64 = weights.iter().copied().collect::<CompensatedSum>().value();
    let mut power = p.clone();
    let mut sum: Vec<Vec<f64>> = vec![vec![0.0; m]; m];
    for &w in &weights {
        let w = w / total;
        for (row, pr) in sum.iter_mut().zip(&power) {
            for (s, v) in row.iter_mut().zip(pr) {
                *s += w * v;
            }
        }
        // power <- power * U
        let next: Vec<Vec<f64>> = power
            .iter()
            .map(|row| {
                (0..m)
                    .map(|j| {
                        let mut v = row[j] * stay[j];
                        if j > 0 {
                            v += row[j - 1] * up[j - 1];
                        }
                        if j + 1 < m {
                            v += row[j + 1] * down[j + 1];
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        power = next;
    }
    p = sum;
    for _ in 0..squarings {
        let q: Vec<Vec<f64>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        (0..m)
                            .map(|k| p[i][k] * p[k][j])
                            .collect::<CompensatedSum>()
                            .value()
                    })
                    .collect()
            })
            .collect();
        p = q;
    }
    Ok(p)
}

/// Stationary law of the chain reflected at `N`: `mu` renormalized on the window.
pub fn window_stationary(rates: &dyn BirthDeathRates, big_n: usize) -> Vec<f64> {
    let mut ln_mu = vec![0.0; big_n + 1];
    for i in 1..=big_n {
        ln_mu[i] = ln_mu[i - 1] + rates.ln_birth(i - 1) - rates.ln_death(i);
    }
    let ln_total = ln_mu
        .iter()
        .fold(f64::NEG_INFINITY, |acc, &v| log_add_exp(acc, v));
    ln_mu.iter().map(|v| (v - ln_total).exp()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    #[serde(rename = "N")]
    pub big_n: usize,
    /// `sum_{i > N} pi_i`, the bias of every windowed quantity.
    pub tail_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateCurve {
    pub i: usize,
    /// `s_i(t)`
    pub separation: Vec<f64>,
    /// `1/2 sum_j |p_ij(t) - pi_j|`
    pub total_variation: Vec<f64>,
    /// `sum_j |p_ij(t) - pi_j|`, the unnormalized form.
    pub l1: Vec<f64>,
    /// Bracket on `P_i[tau > t]` before clamping.
    pub sst_tail: Vec<Bracket>,
    /// The SST representation left `[0, 1]` for this state.
    pub sst_clamped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub t_grid: Vec<f64>,
    pub states: Vec<StateCurve>,
    /// `S(t) = max_i s_i(t)` over the computed states.
    pub sup_separation: Vec<f64>,
    /// `1 / E_0 tau`, from the upper end of the mean bracket.
    pub beta_lower: f64,
    pub truncation: Truncation,
    /// Grid points with `s_i(t) > P_i[tau > t] + tol` at the upper end of the tail bracket.
    pub sst_bound_violations: Vec<(usize, f64)>,
    /// Grid points with total variation above separation.
    pub tv_violations: Vec<(usize, f64)>,
    pub sst_tolerance: f64,
}

impl SeparationReport {
    pub fn sst_bound_holds(&self) -> bool {
        self.sst_bound_violations.is_empty()
    }

    pub fn tv_bound_holds(&self) -> bool {
        self.tv_violations.is_empty()
    }

    /// Rows `t, S(t), max_i P_i[tau > t]` for plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,S,sst_tail_upper\n");
        for (k, t) in self.t_grid.iter().enumerate() {
            let tail = self
                .states
                .iter()
                .map(|s| s.sst_tail[k].upper)
                .fold(f64::NEG_INFINITY, f64::max);
            out.push_str(&format!("{t},{},{tail}\n", self.sup_separation[k]));
        }
        out
    }
}

/// Smallest window with stationary tail below [`TAIL_MASS`].
pub fn window_for_tail(rates: &dyn BirthDeathRates, policy: &TailPolicy) -> Result<Truncation> {
    let horizon = 4096;
    let table = build_measures_with(rates, horizon, policy)?;
    let st = table
        .stationary()
        .ok_or_else(|| Error::Undetermined("stationary law is not certified".into()))?;
    st.complement
        .iter()
        .position(|&c| c < TAIL_MASS)
        .map(|big_n| Truncation {
            big_n: big_n.max(1),
            tail_mass: st.complement[big_n.max(1)],
        })
        .ok_or_else(|| {
            Error::Undetermined(format!(
                "stationary tail stays above {TAIL_MASS} up to {horizon}"
            ))
        })
}

/// Separation curves for the states in `i_set` on `t_grid`.
///
/// The window is the smallest with stationary tail below [`TAIL_MASS`],
/// widened to `max(i_set) + 2`; an explicit `big_n` with a heavier tail is refused.
pub fn separation_curve(
    rates: &dyn BirthDeathRates,
    big_n: Option<usize>,
    t_grid: &[f64],
    i_set: &[usize],
    opts: &LimitOptions,
) -> Result<SeparationReport> {
    require_entrance(rates, &opts.policy, "separation")?;
    if i_set.is_empty() {
        return Err(Error::InvalidArgument("no start states".into()));
    }
    let auto = window_for_tail(rates, &opts.policy)?;
    let i_max = *i_set.iter().max().expect("nonempty");
    let big_n = match big_n {
        Some(n) if n < auto.big_n => {
            return Err(Error::InvalidArgument(format!(
                "window N = {n} leaves stationary mass above {TAIL_MASS}; use N >= {}",
                auto.big_n
            )))
        }
        Some(n) => n,
        None => auto.big_n,
    }
    .max(i_max + 2);
    let tail_mass = {
        let table = build_measures_with(rates, big_n + 1, &opts.policy)?;
        table.stationary().map_or(f64::NAN, |s| s.complement[big_n])
    };
    let pi = window_stationary(rates, big_n);
    let kernels: Vec<Vec<Vec<f64>>> =
        indexed_map(t_grid.len(), |k| transient_kernel(rates, big_n, t_grid[k]))
            .into_iter()
            .collect::<Result<_>>()?;

    let law = sst_law(rates, opts)?;
    let mean_upper = law.power_sum(1) + law.tail_sum;
    let tol = 1e-6;
    let mut states = Vec::with_capacity(i_set.len());
    let mut sst_bound_violations = Vec::new();
    let mut tv_violations = Vec::new();
    for &i in i_set {
        let sst = sst_cdf_from_state(rates, i, t_grid, &opts.policy)?;
        let mut separation = Vec::with_capacity(t_grid.len());
        let mut tv = Vec::with_capacity(t_grid.len());
        let mut l1 = Vec::with_capacity(t_grid.len());
        let mut tail = Vec::with_capacity(t_grid.len());
        for (k, p) in kernels.iter().enumerate() {
            let row = &p[i];
            let s = (0..=big_n)
                .map(|j| 1.0 - row[j] / pi[j])
                .fold(0.0, f64::max)
                .min(1.0);
            let dist: f64 = (0..=big_n)
                .map(|j| (row[j] - pi[j]).abs())
                .collect::<CompensatedSum>()
                .value();
            let bracket = Bracket {
                lower: 1.0 - sst.raw[k].upper,
                upper: 1.0 - sst.raw[k].lower,
            };
            if s > bracket.upper + tol {
                sst_bound_violations.push((i, t_grid[k]));
            }
            if 0.5 * dist > s + 1e-12 {
                tv_violations.push((i, t_grid[k]));
            }
            separation.push(s);
            tv.push(0.5 * dist);
            l1.push(dist);
            tail.push(bracket);
        }
        states.push(StateCurve {
            i,
            separation,
            total_variation: tv,
            l1,
            sst_tail: tail,
            sst_clamped: sst.clamped,
        });
    }
    let sup_separation = (0..t_grid.len())
        .map(|k| states.iter().map(|s| s.separation[k]).fold(0.0, f64::max))
        .collect();
    Ok(SeparationReport {
        t_grid: t_grid.to_vec(),
        states,
        sup_separation,
        beta_lower: 1.0 / mean_upper,
        truncation: Truncation { big_n, tail_mass },
        sst_bound_violations,
        tv_violations,
        sst_tolerance: tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaReport {
    /// `1 / E_0 tau`
    pub beta_lower: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub means: MeanTriple,
}

/// Three-way match of `E_0 tau`, `T` and `sum 1/lambda_nu` to relative `1e-6`.
pub fn beta_report(rates: &dyn BirthDeathRates, opts: &LimitOptions) -> Result<BetaReport> {
    let means = mean_triple(rates, opts)?;
    if means.max_relative > 1e-6 {
        return Err(Error::IdentityViolation {
            identity: "E_0 tau = T = sum 1/lambda".into(),
            lhs: means.dual_mean.mid(),
            rhs: means.t,
            relative: means.max_relative,
        });
    }
    Ok(BetaReport {
        beta_lower: 1.0 / means.dual_mean.upper,
        t: means.t,
        means,
    })
}

/// Least-squares decay rate of `values` against `t`, using points with
/// `1e-12 < value < 0.5` (the exponential regime). `None` with fewer than two.
pub fn fitted_decay_rate(t: &[f64], values: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(values)
        .filter(|(_, v)| **v > 1e-12 && **v < 0.5)
        .map(|(t, v)| (*t, v.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}

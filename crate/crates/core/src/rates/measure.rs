use serde::{Deserialize, Serialize};

use super::series::{ln_prefix_ratios, ln_suffix_ratios, series_mu, SeriesValue, TailPolicy};
use super::BirthDeathRates;
use crate::error::{Error, Result};
use crate::numeric::{log_add_exp, CompensatedSum};

/// How `mu_i` is held: plain doubles while every entry is representable,
/// logarithms only once any entry leaves the `f64` range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "storage", content = "values", rename_all = "lowercase")]
pub enum MuStorage {
    Linear(Vec<f64>),
    Log,
}

/// Prefix-computed `mu_i`, and when `mu < inf` the stationary weights
/// `pi_i = mu_i / mu` with cumulative `H_i = sum_{j <= i} pi_j`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureTable {
    pub horizon: usize,
    pub ln_mu: Vec<f64>,
    pub mu: MuStorage,
    pub mu_total: SeriesValue,
    /// `ln(sum_{j <= i} mu_j / mu_i)`.
    pub ln_prefix_ratio: Vec<f64>,
    pub stationary: Option<Stationary>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Stationary {
    pub pi: Vec<f64>,
    pub ln_pi: Vec<f64>,
    /// `H_i`
    pub cumulative: Vec<f64>,
    /// `1 - H_i`, computed from suffix sums rather than by subtraction.
    pub complement: Vec<f64>,
    /// Bound on `|sum_i pi_i - 1|` over the extrapolated range.
    pub mass_error: f64,
}

impl MeasureTable {
    pub fn mu(&self, i: usize) -> f64 {
        match &self.mu {
            MuStorage::Linear(v) => v[i],
            MuStorage::Log => self.ln_mu[i].exp(),
        }
    }

    pub fn is_scaled(&self) -> bool {
        matches!(self.mu, MuStorage::Log)
    }

    pub fn stationary(&self) -> Option<&Stationary> {
        self.stationary.as_ref()
    }

    /// Largest relative defect in `mu_i b_i = mu_{i+1} a_{i+1}` over the table.
    /// Outside the `f64` range the comparison is made on logarithms, relative
    /// to their magnitude, since that is all the precision the storage has.
    pub fn detailed_balance_defect(&self, rates: &dyn BirthDeathRates) -> f64 {
        (0..self.horizon)
            .map(|i| {
                let ln_l = self.ln_mu[i] + rates.ln_birth(i);
                let ln_r = self.ln_mu[i + 1] + rates.ln_death(i + 1);
                if ln_l.abs() < 700.0 && ln_r.abs() < 700.0 {
                    let l = self.mu(i) * rates.birth(i);
                    let r = self.mu(i + 1) * rates.death(i + 1);
                    crate::numeric::relative_difference(l, r)
                } else {
                    (ln_l - ln_r).abs() / ln_l.abs().max(ln_r.abs())
                }
            })
            .fold(0.0, f64::max)
    }
}

/// `mu_0 = 1`, `mu_{i+1} = mu_i b_i / a_{i+1}` for `i <= horizon`, with the
/// total-mass verdict taken under the default [`TailPolicy`].
pub fn build_measures(rates: &dyn BirthDeathRates, horizon: usize) -> Result<MeasureTable> {
    build_measures_with(rates, horizon, &TailPolicy::default())
}

pub fn build_measures_with(
    rates: &dyn BirthDeathRates,
    horizon: usize,
    policy: &TailPolicy,
) -> Result<MeasureTable> {
    if horizon < 1 {
        return Err(Error::InvalidArgument(
            "measure horizon must be at least 1".into(),
        ));
    }
    let len = horizon + 1;
    let mut ln_mu = Vec::with_capacity(len);
    let mut acc = CompensatedSum::new();
    for i in 0..len {
        if i > 0 {
            acc.add(rates.ln_birth(i - 1) - rates.ln_death(i));
        }
        let v = acc.value();
        if !v.is_finite() {
            return Err(Error::InvalidRates(format!("ln mu_{i} is not finite")));
        }
        ln_mu.push(v);
    }
    let representable = ln_mu.iter().all(|l| l.abs() < 700.0);
    let mu = if representable {
        MuStorage::Linear(ln_mu.iter().map(|l| l.exp()).collect())
    } else {
        MuStorage::Log
    };
    let mu_total = series_mu(rates, policy);
    let ln_prefix_ratio = ln_prefix_ratios(rates, len);

    let stationary = if mu_total.is_finite() {
        let ln_sigma = ln_suffix_ratios(rates, len, policy.horizon.max(64));
        let mut pi = Vec::with_capacity(len);
        let mut ln_pi = Vec::with_capacity(len);
        let mut cumulative = Vec::with_capacity(len);
        let mut complement = Vec::with_capacity(len);
        for i in 0..len {
            // mu / mu_i = rho_i + sigma_i
            let ln_total_over_mu = log_add_exp(ln_prefix_ratio[i], ln_sigma[i]);
            ln_pi.push(-ln_total_over_mu);
            pi.push((-ln_total_over_mu).exp());
            cumulative.push((ln_prefix_ratio[i] - ln_total_over_mu).exp());
            complement.push((ln_sigma[i] - ln_total_over_mu).exp());
        }
        let rel = mu_total.error_bound().unwrap_or(0.0) / mu_total.value().unwrap_or(1.0);
        Some(Stationary {
            pi,
            ln_pi,
            cumulative,
            complement,
            mass_error: rel.max(len as f64 * f64::EPSILON),
        })
    } else {
        None
    };

    Ok(MeasureTable {
        horizon,
        ln_mu,
        mu,
        mu_total,
        ln_prefix_ratio,
        stationary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::RateSpec;

    #[test]
    fn unit_chain_has_flat_mu_and_infinite_mass() {
        let t = build_measures(&RateSpec::constant(1.0, 1.0).unwrap(), 5).unwrap();
        for i in 0..=5 {
            assert_eq!(t.mu(i), 1.0);
        }
        assert!(t.mu_total.is_infinite());
        assert!(t.stationary.is_none());
    }

    #[test]
    fn geometric_products() {
        let exit = RateSpec::geometric(1.0, 1.0, 1.0, 2.0).unwrap();
        let t = build_measures(&exit, 4).unwrap();
        let want = [1.0, 1.0, 2.0, 8.0, 64.0];
        for (i, w) in want.iter().enumerate() {
            assert!((t.mu(i) - w).abs() <= 1e-14 * w, "mu_{i} = {}", t.mu(i));
        }
        let entrance = RateSpec::geometric(1.0, 2.0, 1.0, 1.0).unwrap();
        let t = build_measures(&entrance, 3).unwrap();
        let want = [1.0, 0.5, 0.125, 1.0 / 64.0];
        for (i, w) in want.iter().enumerate() {
            assert!((t.mu(i) - w).abs() <= 1e-14 * w);
        }
    }

    #[test]
    fn overflow_switches_to_log_storage() {
        let exit = RateSpec::geometric(1.0, 1.0, 1.0, 2.0).unwrap();
        let t = build_measures(&exit, 200).unwrap();
        assert!(t.is_scaled());
        let expect = (200.0 * 199.0 / 2.0) * 2f64.ln();
        assert!((t.ln_mu[200] - expect).abs() < 1e-9 * expect);
    }

    #[test]
    fn stationary_weights_sum_to_one() {
        let entrance = RateSpec::geometric(1.0, 2.0, 1.0, 1.0).unwrap();
        let t = build_measures(&entrance, 40).unwrap();
        let st = t.stationary().unwrap();
        let total: f64 = st.pi.iter().sum();
        assert!((total - 1.0).abs() <= st.mass_error + 1e-15);
        for i in 0..40 {
            assert!(st.cumulative[i] <= st.cumulative[i + 1]);
            assert!(st.cumulative[i] > 0.0 && st.cumulative[i] <= 1.0);
            assert!((st.cumulative[i] + st.complement[i] - 1.0).abs() < 1e-15);
        }
        // H_0 = 1/mu with mu = sum 2^{-i(i+1)/2}.
        let mu: f64 = (0..30)
            .map(|i| 2f64.powf(-((i * (i + 1)) as f64) / 2.0))
            .sum();
        assert!((st.cumulative[0] - 1.0 / mu).abs() < 1e-15);
    }

    #[test]
    fn detailed_balance_holds() {
        for rates in [
            RateSpec::geometric(1.0, 1.0, 1.0, 2.0).unwrap(),
            RateSpec::geometric(1.0, 2.0, 1.0, 1.0).unwrap(),
            RateSpec::power(1.5, 1.2, 0.7, 0.9).unwrap(),
        ] {
            let t = build_measures(&rates, 300).unwrap();
            assert!(t.detailed_balance_defect(&rates) < 1e-12);
        }
    }

    #[test]
    fn horizon_must_be_positive() {
        assert!(build_measures(&RateSpec::constant(1.0, 1.0).unwrap(), 0).is_err());
    }
}

//! Hitting-time laws as ratios of products over spectra.
//!
//! Every law here has Laplace transform
//!
//! ```text
//! phi(s) = prod_p p / (s + p) * prod_z (s + z) / z
//! ```
//!
//! over finite pole and zero lists, times (for infinite spectra) a neglected
//! factor in `[exp(-s * tail_sum), 1]`.

mod partial;

pub use partial::{density_cdf, DensityCdf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::rates::BirthDeathRates;
use crate::spectral::{
    build_absorbed_bottom_reflected_top, build_absorbed_top, eigenvalues, limit_spectrum_entrance,
    limit_spectrum_exit, LimitOptions,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum Provenance {
    /// `T_{i,n}`, `i < n`.
    Up {
        i: usize,
        n: usize,
    },
    /// `T_{i,n}` for the chain reflected at `N`, `n < i <= N`.
    DownReflected {
        i: usize,
        n: usize,
        #[serde(rename = "N")]
        big_n: usize,
    },
    /// Life time `zeta` from `i` under an exit boundary.
    LifetimeExit {
        i: usize,
    },
    /// `T_{i,n}` under an entrance boundary; `i = None` is the descent from infinity.
    DownEntrance {
        i: Option<usize>,
        n: usize,
    },
    /// Strong stationary time of the ergodic chain, as the dual life time.
    StrongStationaryTime,
    Other {
        note: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalExpLaw {
    pub poles: Vec<f64>,
    pub zeros: Vec<f64>,
    /// Bound on `sum 1/p` over neglected poles; 0 for finite laws.
    pub tail_sum: f64,
    pub provenance: Provenance,
}

/// A certified enclosure `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket {
    pub lower: f64,
    pub upper: f64,
}

impl Bracket {
    pub fn exact(v: f64) -> Self {
        Self { lower: v, upper: v }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn mid(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.lower - slack && x <= self.upper + slack
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: Bracket,
    pub variance: Bracket,
}

impl RationalExpLaw {
    pub fn new(
        mut poles: Vec<f64>,
        mut zeros: Vec<f64>,
        tail_sum: f64,
        provenance: Provenance,
    ) -> Result<Self> {
        poles.sort_by(f64::total_cmp);
        zeros.sort_by(f64::total_cmp);
        if let Some(bad) = poles
            .iter()
            .chain(&zeros)
            .find(|v| !(**v > 0.0 && v.is_finite()))
        {
            return Err(Error::InvalidArgument(format!(
                "pole or zero {bad} is not positive and finite"
            )));
        }
        if !(tail_sum >= 0.0 && tail_sum.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "tail sum {tail_sum} is not finite and nonnegative"
            )));
        }
        if zeros.len() > poles.len() {
            return Err(Error::InvalidArgument(format!(
                "{} zeros exceed {} poles",
                zeros.len(),
                poles.len()
            )));
        }
        if zeros.len() == poles.len() && tail_sum == 0.0 && !poles.is_empty() {
            return Err(Error::InvalidArgument(
                "finite law with as many zeros as poles is not proper".into(),
            ));
        }
        Ok(Self {
            poles,
            zeros,
            tail_sum,
            provenance,
        })
    }

    pub fn is_finite(&self) -> bool {
        self.tail_sum == 0.0
    }

    /// Zeros interlace poles: `p_k <= z_k <= p_{k+d}`, where `d` is the number
    /// of states removed between the two truncations.
    pub fn interlaces(&self) -> bool {
        let d = match self.provenance {
            Provenance::DownEntrance { i: Some(i), n } => i - n,
            _ => self.poles.len() - self.zeros.len(),
        };
        self.zeros
            .iter()
            .enumerate()
            .all(|(k, &z)| self.poles[k] <= z && self.poles.get(k + d).is_none_or(|&p| z <= p))
    }

    /// `ln` of the finite product at `s > -min pole`.
    pub fn ln_product(&self, s: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for p in &self.poles {
            acc.add(-(s / p).ln_1p());
        }
        for z in &self.zeros {
            acc.add((s / z).ln_1p());
        }
        acc.value()
    }

    /// `sum p^{-k} - sum z^{-k}` over the finite lists.
    pub fn power_sum(&self, k: i32) -> f64 {
        let mut acc = CompensatedSum::new();
        for p in &self.poles {
            acc.add(p.powi(-k));
        }
        for z in &self.zeros {
            acc.add(-z.powi(-k));
        }
        acc.value()
    }

    /// Cumulant `kappa_l = (l - 1)! (sum p^{-l} - sum z^{-l})` of the finite part.
    pub fn cumulant(&self, l: u32) -> f64 {
        let fact: f64 = (1..l).map(f64::from).product();
        fact * self.power_sum(l as i32)
    }

    /// Raw moments `E T^l`, `l = 0..=max`, of the finite part.
    pub fn raw_moments(&self, max: u32) -> Vec<f64> {
        let kappa: Vec<f64> = (0..=max)
            .map(|l| if l == 0 { 0.0 } else { self.cumulant(l) })
            .collect();
        let mut m = vec![1.0];
        for n in 1..=max as usize {
            let mut s = 0.0;
            let mut binom = 1.0; // C(n-1, k-1)
            for k in 1..=n {
                s += binom * kappa[k] * m[n - k];
                binom = binom * (n - k) as f64 / k as f64;
            }
            m.push(s);
        }
        m
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("law serializes")
    }
}

/// Bracket on `E e^{-s T}` for `s >= 0`.
pub fn evaluate_laplace(law: &RationalExpLaw, s: f64) -> Result<Bracket> {
    if !(s >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "Laplace argument {s} must be nonnegative"
        )));
    }
    let upper = law.ln_product(s).exp();
    Ok(Bracket {
        lower: upper * (-s * law.tail_sum).exp(),
        upper,
    })
}

/// Bracket on `E e^{lambda T}` for `0 <= lambda < min pole`.
pub fn evaluate_mgf(law: &RationalExpLaw, lambda: f64) -> Result<Bracket> {
    let pmin = law.poles.first().copied().unwrap_or(f64::INFINITY);
    if !(lambda >= 0.0 && lambda < pmin) {
        return Err(Error::InvalidArgument(format!(
            "MGF argument {lambda} outside [0, {pmin})"
        )));
    }
    let lower = law.ln_product(-lambda).exp();
    let pmax = law.poles.last().copied().unwrap_or(f64::INFINITY);
    let upper = if law.tail_sum == 0.0 {
        lower
    } else {
        lower * (lambda * law.tail_sum / (1.0 - lambda / pmax)).exp()
    };
    Ok(Bracket { lower, upper })
}

pub fn moments(law: &RationalExpLaw) -> Moments {
    let mean = law.power_sum(1);
    let var = law.power_sum(2);
    let var_tail = match law.poles.last() {
        Some(p) if law.tail_sum > 0.0 => law.tail_sum / p,
        _ => 0.0,
    };
    Moments {
        mean: Bracket {
            lower: mean,
            upper: mean + law.tail_sum,
        },
        variance: Bracket {
            lower: var,
            upper: var + var_tail,
        },
    }
}

fn spectrum_up(rates: &dyn BirthDeathRates, n: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    Ok(eigenvalues(&build_absorbed_top(rates, n)?.symmetrize()?)?.values)
}

/// Case I: `T_{i,n}` for `0 <= i < n`.
pub fn law_up(rates: &dyn BirthDeathRates, i: usize, n: usize) -> Result<RationalExpLaw> {
    if i >= n {
        return Err(Error::InvalidArgument(format!(
            "upward passage needs i < n, got i = {i}, n = {n}"
        )));
    }
    RationalExpLaw::new(
        spectrum_up(rates, n)?,
        spectrum_up(rates, i)?,
        0.0,
        Provenance::Up { i, n },
    )
}

/// Case II: `T_{i,n}` for `0 <= n < i <= N` with reflection at `N`.
pub fn law_down_finite(
    rates: &dyn BirthDeathRates,
    i: usize,
    n: usize,
    big_n: usize,
) -> Result<RationalExpLaw> {
    if !(n < i && i <= big_n) {
        return Err(Error::InvalidArgument(format!(
            "downward passage needs n < i <= N, got n = {n}, i = {i}, N = {big_n}"
        )));
    }
    let poles =
        eigenvalues(&build_absorbed_bottom_reflected_top(rates, n, big_n)?.symmetrize()?)?.values;
    let zeros = if i == big_n {
        Vec::new()
    } else {
        eigenvalues(&build_absorbed_bottom_reflected_top(rates, i, big_n)?.symmetrize()?)?.values
    };
    RationalExpLaw::new(poles, zeros, 0.0, Provenance::DownReflected { i, n, big_n })
}

/// Case III: life time `zeta` from `i` for an exit boundary.
pub fn law_lifetime_exit(
    rates: &dyn BirthDeathRates,
    i: usize,
    opts: &LimitOptions,
) -> Result<RationalExpLaw> {
    let lim = limit_spectrum_exit(rates, opts)?;
    RationalExpLaw::new(
        lim.spectrum.values,
        spectrum_up(rates, i)?,
        lim.tail_bound,
        Provenance::LifetimeExit { i },
    )
}

/// Case IV: `T_{i,n}` for an entrance boundary, `n < i`, with `i = None`
/// meaning the descent from infinity.
pub fn law_down_entrance(
    rates: &dyn BirthDeathRates,
    i: Option<usize>,
    n: usize,
    opts: &LimitOptions,
) -> Result<RationalExpLaw> {
    if let Some(i) = i {
        if i <= n {
            return Err(Error::InvalidArgument(format!(
                "downward passage needs n < i, got n = {n}, i = {i}"
            )));
        }
    }
    let poles = limit_spectrum_entrance(rates, n, opts)?;
    let k = poles.spectrum.values.len();
    let zeros = match i {
        None => Vec::new(),
        Some(i) => {
            let fixed = LimitOptions {
                count: Some(k),
                ..*opts
            };
            limit_spectrum_entrance(rates, i, &fixed)?.spectrum.values
        }
    };
    // Pairing the first K poles and zeros, each neglected pair factor lies in
    // [exp(-s (1/p - 1/z)), 1], so the pole tail alone bounds the remainder.
    RationalExpLaw::new(
        poles.spectrum.values,
        zeros,
        poles.tail_bound,
        Provenance::DownEntrance { i, n },
    )
}

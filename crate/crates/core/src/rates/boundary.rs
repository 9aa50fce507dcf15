use serde::{Deserialize, Serialize};

use super::series::{
    series_inverse_mu_b, series_mu, series_r, series_s, series_t, series_u1, DecisionRule,
    SeriesValue, TailPolicy,
};
use super::BirthDeathRates;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BoundaryClass {
    Regular,
    Exit,
    Entrance,
    Natural,
    Undetermined,
}

impl BoundaryClass {
    /// Class from the `(R, S)` verdicts; inconclusive either way gives `Undetermined`.
    pub fn from_verdicts(r: &SeriesValue, s: &SeriesValue) -> Self {
        if r.is_undetermined() || s.is_undetermined() {
            return BoundaryClass::Undetermined;
        }
        match (r.is_finite(), s.is_finite()) {
            (true, true) => BoundaryClass::Regular,
            (true, false) => BoundaryClass::Exit,
            (false, true) => BoundaryClass::Entrance,
            (false, false) => BoundaryClass::Natural,
        }
    }

    pub fn is_determined(self) -> bool {
        self != BoundaryClass::Undetermined
    }
}

impl std::fmt::Display for BoundaryClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        std::fmt::Debug::fmt(self, f)
    }
}

/// An implication between verdicts that must hold for any chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyCheck {
    pub statement: String,
    /// `None` when the premise does not apply or a verdict is inconclusive.
    pub holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub series: String,
    #[serde(flatten)]
    pub rule: DecisionRule,
    pub terms_used: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryReport {
    #[serde(rename = "R")]
    pub r: SeriesValue,
    #[serde(rename = "S")]
    pub s: SeriesValue,
    #[serde(rename = "T")]
    pub t: SeriesValue,
    pub u1: SeriesValue,
    pub mu: SeriesValue,
    pub inverse_mu_b: SeriesValue,
    pub class: BoundaryClass,
    /// The Dirichlet form is unique iff `u1` diverges.
    pub dirichlet_unique: Option<bool>,
    pub consistency: Vec<ConsistencyCheck>,
    pub certificates: Vec<Certificate>,
    pub policy: TailPolicy,
}

impl BoundaryReport {
    pub fn consistent(&self) -> bool {
        self.consistency.iter().all(|c| c.holds != Some(false))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn implies(statement: &str, premise: Option<bool>, conclusion: Option<bool>) -> ConsistencyCheck {
    let holds = match premise {
        Some(false) => None,
        Some(true) => conclusion,
        None => None,
    };
    ConsistencyCheck {
        statement: statement.to_string(),
        holds,
    }
}

fn finite(v: &SeriesValue) -> Option<bool> {
    if v.is_undetermined() {
        None
    } else {
        Some(v.is_finite())
    }
}

fn infinite(v: &SeriesValue) -> Option<bool> {
    finite(v).map(|f| !f)
}

pub fn classify_boundary(rates: &dyn BirthDeathRates, policy: &TailPolicy) -> BoundaryReport {
    let r = series_r(rates, policy);
    let s = series_s(rates, 0, policy);
    let t = series_t(rates, policy);
    let u1 = series_u1(rates, policy);
    let mu = series_mu(rates, policy);
    let inverse_mu_b = series_inverse_mu_b(rates, policy);
    let class = BoundaryClass::from_verdicts(&r, &s);

    let consistency = vec![
        implies("S < inf => mu < inf", finite(&s), finite(&mu)),
        implies(
            "R < inf => sum 1/(mu b) < inf",
            finite(&r),
            finite(&inverse_mu_b),
        ),
        implies(
            "exit => mu = inf",
            finite(&r).zip(infinite(&s)).map(|(a, b)| a && b),
            infinite(&mu),
        ),
        implies(
            "entrance => sum 1/(mu b) = inf",
            infinite(&r).zip(finite(&s)).map(|(a, b)| a && b),
            infinite(&inverse_mu_b),
        ),
        implies(
            "T < inf => T <= S",
            finite(&t).zip(finite(&s)).map(|(a, b)| a && b),
            Some(t.value().unwrap_or(0.0) <= s.upper() * (1.0 + 1e-12)),
        ),
        implies(
            "exit or entrance => Dirichlet form unique",
            Some(matches!(
                class,
                BoundaryClass::Exit | BoundaryClass::Entrance
            )),
            infinite(&u1),
        ),
    ];

    let certificates = [&r, &s, &t, &u1, &mu, &inverse_mu_b]
        .iter()
        .map(|v| Certificate {
            series: v.series.clone(),
            rule: v.certificate.clone(),
            terms_used: v.terms_used,
        })
        .collect();

    BoundaryReport {
        dirichlet_unique: infinite(&u1),
        r,
        s,
        t,
        u1,
        mu,
        inverse_mu_b,
        class,
        consistency,
        certificates,
        policy: *policy,
    }
}

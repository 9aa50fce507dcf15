//! Truncated generators, their spectra, and the monotone limits that give the
//! eigenvalues of the infinite chain.

mod limit;
mod sturm;

pub use limit::{
    limit_spectrum_entrance, limit_spectrum_ergodic, limit_spectrum_exit, LevelRecord,
    LimitOptions, LimitSpectrum,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::rates::BirthDeathRates;
use sturm::ChainForm;

/// Relative gap below which two neighbouring eigenvalues count as collapsed.
pub const GAP_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// States `0..n`, killed at rate `b_{n-1}` from `n - 1`.
    AbsorbedAtTop { n: usize },
    /// States `n+1..=N`, killed at rate `a_{n+1}` from `n + 1`, reflecting at `N`.
    AbsorbedBottomReflectedTop {
        n: usize,
        #[serde(rename = "N")]
        big_n: usize,
    },
    /// States `0..=N`, reflecting at both ends.
    Reflected {
        #[serde(rename = "N")]
        big_n: usize,
    },
}

impl GeneratorKind {
    /// The truncation level: `n` for top absorption, `N` otherwise.
    pub fn level(&self) -> usize {
        match *self {
            GeneratorKind::AbsorbedAtTop { n } => n,
            GeneratorKind::AbsorbedBottomReflectedTop { big_n, .. }
            | GeneratorKind::Reflected { big_n } => big_n,
        }
    }
}

/// A tridiagonal sub-generator over a window of consecutive states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorMatrix {
    pub kind: GeneratorKind,
    pub first_state: usize,
    pub diag: Vec<f64>,
    /// `q_{k,k+1}`, birth rates.
    #[serde(rename = "super")]
    pub sup: Vec<f64>,
    /// `q_{k+1,k}`, death rates.
    pub sub: Vec<f64>,
    pub kill_bottom: f64,
    pub kill_top: f64,
}

fn rate(value: f64, what: &str, i: usize) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::InvalidRates(format!(
            "{what}_{i} = {value} is not a positive finite rate"
        )))
    }
}

impl GeneratorMatrix {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn row_sums(&self) -> Vec<f64> {
        let m = self.dim();
        (0..m)
            .map(|k| {
                let mut s = CompensatedSum::new();
                s.add(self.diag[k]);
                if k + 1 < m {
                    s.add(self.sup[k]);
                }
                if k > 0 {
                    s.add(self.sub[k - 1]);
                }
                s.value()
            })
            .collect()
    }

    /// `ln` of the symmetrizing weights `mu_s / mu_{first}` on the window.
    pub fn ln_weights(&self) -> Vec<f64> {
        let mut w = Vec::with_capacity(self.dim());
        let mut acc = CompensatedSum::new();
        w.push(0.0);
        for k in 0..self.sup.len() {
            acc.add(self.sup[k].ln() - self.sub[k].ln());
            w.push(acc.value());
        }
        w
    }

    fn chain_form(&self) -> Result<ChainForm> {
        let m = self.dim();
        let mut up: Vec<f64> = self.sup.clone();
        up.push(self.kill_top);
        let mut down = Vec::with_capacity(m);
        down.push(self.kill_bottom);
        down.extend_from_slice(&self.sub);
        if self.kill_bottom == 0.0 {
            return Ok(ChainForm {
                up,
                down,
                reversed: false,
            });
        }
        if self.kill_top != 0.0 {
            return Err(Error::InvalidArgument(
                "killing at both ends is not supported".into(),
            ));
        }
        // Reverse so that the single killing rate sits at the top.
        let up_r: Vec<f64> = (0..m).map(|k| down[m - 1 - k]).collect();
        let mut down_r: Vec<f64> = (0..m).map(|k| up[m - 1 - k]).collect();
        down_r[0] = 0.0;
        Ok(ChainForm {
            up: up_r,
            down: down_r,
            reversed: true,
        })
    }

    /// `J` similar to `-Q` through the diagonal `sqrt(mu)` transform.
    pub fn symmetrize(&self) -> Result<SymTridiagonal> {
        for k in 0..self.sup.len() {
            let p = self.sup[k] * self.sub[k];
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::InvalidRates(format!(
                    "off-diagonal product at {} is {p}",
                    self.first_state + k
                )));
            }
        }
        Ok(SymTridiagonal {
            kind: self.kind,
            diag: self.diag.iter().map(|d| -d).collect(),
            off: self
                .sup
                .iter()
                .zip(&self.sub)
                .map(|(b, a)| -(b * a).sqrt())
                .collect(),
            ln_weights: self.ln_weights(),
            chain: self.chain_form()?,
        })
    }
}

/// The `n x n` generator on `0..n` killed from `n - 1` at rate `b_{n-1}`.
pub fn build_absorbed_top(rates: &dyn BirthDeathRates, n: usize) -> Result<GeneratorMatrix> {
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let b: Vec<f64> = (0..n)
        .map(|i| rate(rates.birth(i), "b", i))
        .collect::<Result<_>>()?;
    let a: Vec<f64> = (1..n)
        .map(|i| rate(rates.death(i), "a", i))
        .collect::<Result<_>>()?;
    let diag = (0..n)
        .map(|i| -(b[i] + if i > 0 { a[i - 1] } else { 0.0 }))
        .collect();
    Ok(GeneratorMatrix {
        kind: GeneratorKind::AbsorbedAtTop { n },
        first_state: 0,
        diag,
        sup: b[..n - 1].to_vec(),
        sub: a,
        kill_bottom: 0.0,
        kill_top: b[n - 1],
    })
}

/// The generator on `n+1..=N` killed at `n` (rate `a_{n+1}`) and reflecting at `N`.
pub fn build_absorbed_bottom_reflected_top(
    rates: &dyn BirthDeathRates,
    n: usize,
    big_n: usize,
) -> Result<GeneratorMatrix> {
    if n >= big_n {
        return Err(Error::InvalidArgument(format!(
            "need n < N, got n = {n}, N = {big_n}"
        )));
    }
    let states: Vec<usize> = (n + 1..=big_n).collect();
    let a: Vec<f64> = states
        .iter()
        .map(|&s| rate(rates.death(s), "a", s))
        .collect::<Result<_>>()?;
    let b: Vec<f64> = states[..states.len() - 1]
        .iter()
        .map(|&s| rate(rates.birth(s), "b", s))
        .collect::<Result<_>>()?;
    let m = states.len();
    let diag = (0..m)
        .map(|k| -(a[k] + if k + 1 < m { b[k] } else { 0.0 }))
        .collect();
    Ok(GeneratorMatrix {
        kind: GeneratorKind::AbsorbedBottomReflectedTop { n, big_n },
        first_state: n + 1,
        diag,
        sup: b,
        sub: a[1..].to_vec(),
        kill_bottom: a[0],
        kill_top: 0.0,
    })
}

/// The conservative generator on `0..=N`, reflecting at both ends.
pub fn build_reflected(rates: &dyn BirthDeathRates, big_n: usize) -> Result<GeneratorMatrix> {
    if big_n < 1 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let b: Vec<f64> = (0..big_n)
        .map(|i| rate(rates.birth(i), "b", i))
        .collect::<Result<_>>()?;
    let a: Vec<f64> = (1..=big_n)
        .map(|i| rate(rates.death(i), "a", i))
        .collect::<Result<_>>()?;
    let m = big_n + 1;
    let diag = (0..m)
        .map(|i| -((if i < big_n { b[i] } else { 0.0 }) + if i > 0 { a[i - 1] } else { 0.0 }))
        .collect();
    Ok(GeneratorMatrix {
        kind: GeneratorKind::Reflected { big_n },
        first_state: 0,
        diag,
        sup: b,
        sub: a,
        kill_bottom: 0.0,
        kill_top: 0.0,
    })
}

/// Symmetric tridiagonal `J` with nonpositive off-diagonals, carried together
/// with the bidiagonal factorization used by the eigensolver.
#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    pub kind: GeneratorKind,
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    pub ln_weights: Vec<f64>,
    chain: ChainForm,
}

impl SymTridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Multiplicity of the zero eigenvalue (1 for a conservative window).
    pub fn nullity(&self) -> usize {
        self.chain.nullity()
    }

    /// Number of eigenvalues strictly below `x > 0`, zero modes included.
    pub fn count_below(&self, x: f64) -> usize {
        self.chain.count_below(x)
    }

    /// Unit eigenvector for `lambda` in window-state order.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let mut g = self.chain.eigenvector(lambda);
        if self.chain.reversed {
            g.reverse();
        }
        g
    }

    /// `J g` computed from the stored entries.
    pub fn apply(&self, g: &[f64]) -> Vec<f64> {
        let m = self.dim();
        (0..m)
            .map(|k| {
                let mut s = self.diag[k] * g[k];
                if k + 1 < m {
                    s += self.off[k] * g[k + 1];
                }
                if k > 0 {
                    s += self.off[k - 1] * g[k - 1];
                }
                s
            })
            .collect()
    }

    fn dirichlet_form(&self, g: &[f64]) -> (f64, f64) {
        if self.chain.reversed {
            let r: Vec<f64> = g.iter().rev().copied().collect();
            self.chain.dirichlet_form(&r)
        } else {
            self.chain.dirichlet_form(g)
        }
    }
}

/// Sorted positive eigenvalues of a (possibly truncated) generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub kind: GeneratorKind,
    pub level: usize,
    pub dimension: usize,
    pub values: Vec<f64>,
    /// Whether `values` holds every positive eigenvalue of the matrix.
    pub complete: bool,
    pub reciprocal_sum: f64,
    /// Certified bound on the reciprocal sum of the omitted eigenvalues, when known.
    pub tail_bound: Option<f64>,
}

impl Spectrum {
    fn from_values(
        kind: GeneratorKind,
        dimension: usize,
        values: Vec<f64>,
        complete: bool,
    ) -> Self {
        let reciprocal_sum = values
            .iter()
            .map(|v| 1.0 / v)
            .collect::<CompensatedSum>()
            .value();
        Self {
            kind,
            level: kind.level(),
            dimension,
            values,
            complete,
            reciprocal_sum,
            tail_bound: complete.then_some(0.0),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `sum_nu lambda_nu^{-p}`.
    pub fn reciprocal_power_sum(&self, p: i32) -> f64 {
        self.values
            .iter()
            .map(|v| v.powi(-p))
            .collect::<CompensatedSum>()
            .value()
    }

    /// Smallest relative gap `(lambda_{k+1} - lambda_k) / lambda_{k+1}`.
    pub fn min_relative_gap(&self) -> f64 {
        self.values
            .windows(2)
            .map(|w| (w[1] - w[0]) / w[1])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spectrum serializes")
    }
}

fn check_simple(values: &[f64]) -> Result<()> {
    for (k, w) in values.windows(2).enumerate() {
        if !(w[1] - w[0] > GAP_TOLERANCE * w[1]) {
            return Err(Error::GapCollapse {
                index: k,
                lower: w[0],
                upper: w[1],
            });
        }
    }
    Ok(())
}

/// Every positive eigenvalue of `J`, ascending, by Sturm bisection.
pub fn eigenvalues(j: &SymTridiagonal) -> Result<Spectrum> {
    let values = j.chain.lowest(j.dim())?;
    check_simple(&values)?;
    Ok(Spectrum::from_values(j.kind, j.dim(), values, true))
}

/// The `k` smallest positive eigenvalues of `J`.
pub fn lowest_eigenvalues(j: &SymTridiagonal, k: usize) -> Result<Spectrum> {
    let values = j.chain.lowest(k)?;
    check_simple(&values)?;
    let complete = values.len() + j.nullity() == j.dim();
    Ok(Spectrum::from_values(j.kind, j.dim(), values, complete))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualEntry {
    pub lambda: f64,
    /// `D(f)` on the window, killing terms included.
    pub dirichlet: f64,
    /// `mu(f^2)`, i.e. `|g|^2` in symmetric coordinates.
    pub mass: f64,
    /// `|D(f) - lambda mu(f^2)| / (lambda mu(f^2))`.
    pub relative: f64,
    /// `|J g - lambda g| / (lambda |g|)`.
    pub eigen_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub entries: Vec<ResidualEntry>,
    pub max_relative: f64,
}

impl ResidualReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_relative <= tol
    }
}

/// Dirichlet-form certificate `D(f) = lambda mu(f^2)` for each eigenpair,
/// eigenvectors computed on demand.
pub fn dirichlet_residual(g: &GeneratorMatrix, spectrum: &Spectrum) -> Result<ResidualReport> {
    let j = g.symmetrize()?;
    let entries: Vec<ResidualEntry> = spectrum
        .values
        .iter()
        .map(|&lambda| {
            let v = j.eigenvector(lambda);
            let (d, mass) = j.dirichlet_form(&v);
            let jv = j.apply(&v);
            let r = jv
                .iter()
                .zip(&v)
                .map(|(x, y)| (x - lambda * y).powi(2))
                .sum::<f64>()
                .sqrt();
            ResidualEntry {
                lambda,
                dirichlet: d,
                mass,
                relative: (d - lambda * mass).abs() / (lambda * mass),
                eigen_residual: r / (lambda * mass.sqrt()),
            }
        })
        .collect();
    let max_relative = entries.iter().map(|e| e.relative).fold(0.0, f64::max);
    Ok(ResidualReport {
        entries,
        max_relative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rates::RateSpec;

    fn unit() -> RateSpec {
        RateSpec::constant(1.0, 1.0).unwrap()
    }

    #[test]
    fn absorbed_top_examples() {
        let g = build_absorbed_top(&RateSpec::constant(1.0, 1.0).unwrap(), 1).unwrap();
        assert_eq!(g.diag, vec![-1.0]);
        let g = build_absorbed_top(&unit(), 2).unwrap();
        assert_eq!(g.diag, vec![-1.0, -2.0]);
        assert_eq!(g.sup, vec![1.0]);
        assert_eq!(g.sub, vec![1.0]);
        let exit = RateSpec::geometric(1.0, 1.0, 1.0, 2.0).unwrap();
        let g = build_absorbed_top(&exit, 3).unwrap();
        assert_eq!(g.diag, vec![-1.0, -3.0, -5.0]);
        assert_eq!(g.sup, vec![1.0, 2.0]);
        assert_eq!(g.sub, vec![1.0, 1.0]);
        let sums = g.row_sums();
        assert_eq!(sums, vec![0.0, 0.0, -4.0]);
    }

    #[test]
    fn reflected_window_examples() {
        let g = build_absorbed_bottom_reflected_top(&unit(), 0, 2).unwrap();
        assert_eq!(g.diag, vec![-2.0, -1.0]);
        assert_eq!(g.row_sums(), vec![-1.0, 0.0]);
        let h = build_absorbed_bottom_reflected_top(&unit(), 1, 3).unwrap();
        assert_eq!(h.diag, g.diag);
        let one = build_absorbed_bottom_reflected_top(
            &RateSpec::geometric(1.0, 2.0, 1.0, 1.0).unwrap(),
            4,
            5,
        )
        .unwrap();
        assert_eq!(one.diag, vec![-32.0]);
        assert!(build_absorbed_bottom_reflected_top(&unit(), 2, 2).is_err());
    }

    #[test]
    fn symmetrize_examples() {
        let j = build_absorbed_top(&unit(), 2)
            .unwrap()
            .symmetrize()
            .unwrap();
        assert_eq!(j.diag, vec![1.0, 2.0]);
        assert_eq!(j.off, vec![-1.0]);
        let exit = RateSpec::geometric(1.0, 1.0, 1.0, 2.0).unwrap();
        let j = build_absorbed_top(&exit, 3).unwrap().symmetrize().unwrap();
        assert_eq!(j.off, vec![-1.0, -(2f64.sqrt())]);
    }

    #[test]
    fn two_by_two_spectrum() {
        let j = build_absorbed_top(&unit(), 2)
            .unwrap()
            .symmetrize()
            .unwrap();
        let s = eigenvalues(&j).unwrap();
        assert!((s.values[0] - (3.0 - 5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((s.values[1] - (3.0 + 5f64.sqrt()) / 2.0).abs() < 1e-15);
        assert!((s.reciprocal_sum - 3.0).abs() < 1e-14);
        let one = build_absorbed_top(&RateSpec::constant(1.0, 2.5).unwrap(), 1).unwrap();
        assert_eq!(
            eigenvalues(&one.symmetrize().unwrap()).unwrap().values,
            vec![2.5]
        );
    }

    #[test]
    fn reflected_window_reverses_and_matches_direct() {
        // Unit chain, n = 0, N = 2: J = [[2,-1],[-1,1]], same spectrum as the absorbed-top case.
        let j = build_absorbed_bottom_reflected_top(&unit(), 0, 2)
            .unwrap()
            .symmetrize()
            .unwrap();
        let s = eigenvalues(&j).unwrap();
        assert!((s.reciprocal_sum - 3.0).abs() < 1e-14);
        let v = j.eigenvector(s.values[0]);
        let jv = j.apply(&v);
        for k in 0..2 {
            assert!((jv[k] - s.values[0] * v[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn ergodic_window_drops_zero_mode() {
        let two_state = RateSpec::table(vec![3.0], vec![2.0], unit()).unwrap();
        let j = build_reflected(&two_state, 1)
            .unwrap()
            .symmetrize()
            .unwrap();
        let s = eigenvalues(&j).unwrap();
        assert_eq!(s.values.len(), 1);
        assert!((s.values[0] - 5.0).abs() < 1e-14);
    }

    #[test]
    fn dirichlet_certificates() {
        let g = build_absorbed_top(&unit(), 2).unwrap();
        let s = eigenvalues(&g.symmetrize().unwrap()).unwrap();
        let rep = dirichlet_residual(&g, &s).unwrap();
        assert!(rep.passes(1e-10), "{rep:?}");
        let g1 = build_absorbed_top(&RateSpec::constant(1.0, 1.7).unwrap(), 1).unwrap();
        let s1 = eigenvalues(&g1.symmetrize().unwrap()).unwrap();
        let rep1 = dirichlet_residual(&g1, &s1).unwrap();
        assert_eq!(rep1.entries[0].relative, 0.0);
    }

    #[test]
    fn gap_collapse_is_detected() {
        assert!(check_simple(&[1.0, 1.0 + 1e-16]).is_err());
        assert!(check_simple(&[1.0, 1.0 + 1e-10]).is_ok());
    }
}

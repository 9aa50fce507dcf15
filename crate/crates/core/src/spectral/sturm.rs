//! Eigenvalues of a killed birth-death chain in bidiagonal-product form.
//!
//! A chain on `0..m` with up rates `beta_k` (the last one is killing) and down
//! rates `alpha_k` (`alpha_0 = 0`) has symmetrized generator `J = U^T U` with
//! `U` upper bidiagonal, `U_kk = sqrt(beta_k)`, `U_{k,k+1} = -sqrt(alpha_{k+1})`.
//! Inertia counts use the differential stationary qd transform of `U^T U - x`,
//! which only forms products and ratios of the rates and therefore keeps
//! relative accuracy for every eigenvalue, however wide the spread.

use crate::error::{Error, Result};
use crate::numeric::{indexed_map, CompensatedSum};

const MAX_BISECTION_STEPS: usize = 600;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ChainForm {
    /// `beta_k`; `beta_{m-1}` is the killing rate at the top (0 if reflecting).
    pub up: Vec<f64>,
    /// `alpha_k`; `alpha_0` is always 0.
    pub down: Vec<f64>,
    /// True when chain index `k` is generator row `m - 1 - k`.
    pub reversed: bool,
}

impl ChainForm {
    pub fn dim(&self) -> usize {
        self.up.len()
    }

    /// Multiplicity of the zero eigenvalue.
    pub fn nullity(&self) -> usize {
        usize::from(self.up[self.dim() - 1] == 0.0)
    }

    /// Number of eigenvalues strictly below `x` (for `x > 0`).
    pub fn count_below(&self, x: f64) -> usize {
        let m = self.dim();
        let mut count = 0;
        let mut t = self.down[0] - x;
        for k in 0..m {
            let mut d = self.up[k] + t;
            if d == 0.0 {
                d = -f64::MIN_POSITIVE;
            }
            if d < 0.0 {
                count += 1;
            }
            if k + 1 < m {
                let mut r = t / d;
                if r.is_nan() {
                    r = 1.0;
                }
                t = self.down[k + 1] * r - x;
            }
        }
        count
    }

    pub fn gershgorin_upper(&self) -> f64 {
        let m = self.dim();
        (0..m)
            .map(|k| {
                let mut v = self.up[k] + self.down[k];
                if k + 1 < m {
                    v += (self.up[k] * self.down[k + 1]).sqrt();
                }
                if k > 0 {
                    v += (self.up[k - 1] * self.down[k]).sqrt();
                }
                v
            })
            .fold(0.0, f64::max)
    }

    /// Global bracket `(lo, hi)` with `count(lo) = nullity`, `count(hi) = m`.
    fn bracket(&self) -> Result<(f64, f64)> {
        let m = self.dim();
        let nullity = self.nullity();
        let hi = self.gershgorin_upper() * (1.0 + 1e-12) + f64::MIN_POSITIVE;
        if !hi.is_finite() {
            return Err(Error::InvalidRates(
                "rates overflow the eigenvalue bracket".into(),
            ));
        }
        let c = self.count_below(hi);
        if c != m {
            return Err(Error::Bisection {
                index: m,
                lo: 0.0,
                hi,
                count_lo: 0,
                count_hi: c,
            });
        }
        let mut lo = hi;
        while self.count_below(lo) > nullity {
            lo *= 0.25;
            if lo < 1e-300 {
                return Err(Error::Bisection {
                    index: 0,
                    lo,
                    hi,
                    count_lo: self.count_below(lo),
                    count_hi: m,
                });
            }
        }
        Ok((lo, hi))
    }

    /// The `j`-th positive eigenvalue (0-based) within the bracket.
    fn bisect(&self, j: usize, lo0: f64, hi0: f64) -> Result<f64> {
        let target = self.nullity() + j;
        let (mut lo, mut hi) = (lo0, hi0);
        for _ in 0..MAX_BISECTION_STEPS {
            if hi - lo <= 2.0 * f64::EPSILON * hi {
                return Ok(0.5 * (lo + hi));
            }
            let mid = if hi > 2.0 * lo {
                lo.sqrt() * hi.sqrt()
            } else {
                0.5 * (lo + hi)
            };
            if mid <= lo || mid >= hi {
                return Ok(0.5 * (lo + hi));
            }
            if self.count_below(mid) > target {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Err(Error::Bisection {
            index: j,
            lo,
            hi,
            count_lo: self.count_below(lo),
            count_hi: self.count_below(hi),
        })
    }

    /// The `k` smallest positive eigenvalues, ascending.
    pub fn lowest(&self, k: usize) -> Result<Vec<f64>> {
        let k = k.min(self.dim() - self.nullity());
        if k == 0 {
            return Ok(Vec::new());
        }
        if self.dim() == 1 {
            return Ok(vec![self.up[0] + self.down[0]]);
        }
        let (lo, hi) = self.bracket()?;
        indexed_map(k, |j| self.bisect(j, lo, hi))
            .into_iter()
            .collect()
    }

    /// Eigenvector for eigenvalue `lambda` by a twisted factorization of
    /// `J - lambda`, normalized to unit Euclidean norm and positive at the
    /// largest entry. Entries are in chain order.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let m = self.dim();
        let guard = |d: f64| if d == 0.0 { f64::MIN_POSITIVE } else { d };
        let mut d_plus = vec![0.0; m];
        let mut t = vec![0.0; m];
        t[0] = self.down[0] - lambda;
        for k in 0..m {
            d_plus[k] = guard(self.up[k] + t[k]);
            if k + 1 < m {
                let mut r = t[k] / d_plus[k];
                if r.is_nan() {
                    r = 1.0;
                }
                t[k + 1] = self.down[k + 1] * r - lambda;
            }
        }
        let mut d_minus = vec![0.0; m];
        let mut s = vec![0.0; m];
        s[m - 1] = self.up[m - 1] - lambda;
        for k in (0..m).rev() {
            d_minus[k] = guard(self.down[k] + s[k]);
            if k > 0 {
                let mut r = s[k] / d_minus[k];
                if r.is_nan() {
                    r = 1.0;
                }
                s[k - 1] = self.up[k - 1] * r - lambda;
            }
        }
        let r = (0..m)
            .min_by(|&a, &b| {
                let ga = (t[a] + s[a] + lambda).abs();
                let gb = (t[b] + s[b] + lambda).abs();
                ga.partial_cmp(&gb).unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(0);
        let mut z = vec![0.0; m];
        z[r] = 1.0;
        for k in (0..r).rev() {
            z[k] = (self.up[k] * self.down[k + 1]).sqrt() / d_plus[k] * z[k + 1];
            if z[k].abs() > 1e150 {
                let sc = 1.0 / z[k].abs();
                z[k..].iter_mut().for_each(|v| *v *= sc);
            }
        }
        for k in r + 1..m {
            z[k] = (self.up[k - 1] * self.down[k]).sqrt() / d_minus[k] * z[k - 1];
            if z[k].abs() > 1e150 {
                let sc = 1.0 / z[k].abs();
                z[..=k].iter_mut().for_each(|v| *v *= sc);
            }
        }
        let big = z.iter().copied().fold(0.0f64, |a, v| a.max(v.abs()));
        let sign = z
            .iter()
            .find(|v| v.abs() == big)
            .map_or(1.0, |v| v.signum());
        z.iter_mut().for_each(|v| *v *= sign / big);
        let norm = z
            .iter()
            .map(|v| v * v)
            .collect::<CompensatedSum>()
            .value()
            .sqrt();
        z.iter_mut().for_each(|v| *v /= norm);
        z
    }

    /// `(D(g), |g|^2)` with `D(g) = |U g|^2` the Dirichlet form including killing.
    pub fn dirichlet_form(&self, g: &[f64]) -> (f64, f64) {
        let m = self.dim();
        let mut d = CompensatedSum::new();
        for k in 0..m {
            let next = if k + 1 < m {
                self.down[k + 1].sqrt() * g[k + 1]
            } else {
                0.0
            };
            let v = self.up[k].sqrt() * g[k] - next;
            d.add(v * v);
        }
        d.add(self.down[0] * g[0] * g[0]);
        let mass = g.iter().map(|v| v * v).collect::<CompensatedSum>().value();
        (d.value(), mass)
    }
}

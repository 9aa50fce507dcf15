//! Density and distribution function of a finite law by partial fractions.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma_lr;

use super::RationalExpLaw;
use crate::error::{Error, Result};

/// Poles closer than this fraction of their own size are merged.
pub const MERGE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityCdf {
    pub t: Vec<f64>,
    pub density: Vec<f64>,
    pub cdf: Vec<f64>,
    /// Some poles were merged and the repeated-pole formula was used.
    pub repeated_poles: bool,
    /// Some density value on the grid came out negative beyond rounding.
    pub negative_density: bool,
}

/// One cluster: pole `p` of multiplicity `k` with coefficients `A_j` of `(s+p)^{-j}`, `j = 1..=k`.
#[derive(Debug, Clone)]
struct Term {
    p: f64,
    coef: Vec<f64>,
}

fn clusters(poles: &[f64]) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for &p in poles {
        match out.last_mut() {
            Some((_, k, sum)) if p - *sum / *k as f64 <= MERGE_TOLERANCE * p => {
                *k += 1;
                *sum += p;
            }
            _ => out.push((p, 1, p)),
        }
    }
    out.into_iter()
        .map(|(_, k, sum)| (sum / k as f64, k))
        .collect()
}

/// Partial-fraction terms of `prod p/(s+p) prod (s+z)/z`.
fn expand(law: &RationalExpLaw) -> Vec<Term> {
    let cl = clusters(&law.poles);
    // ln of the constant prod p / prod z
    let ln_const: f64 = law.poles.iter().map(|p| p.ln()).sum::<f64>()
        - law.zeros.iter().map(|z| z.ln()).sum::<f64>();
    cl.iter()
        .enumerate()
        .map(|(idx, &(p, k))| {
            // g(s) = (s+p)^k phi(s) = C prod_{q != p} (s+q)^{-k_q} prod_z (s+z), at s = -p.
            let s = -p;
            let mut ln_abs = ln_const;
            let mut sign = 1.0;
            for (jdx, &(q, kq)) in cl.iter().enumerate() {
                if jdx != idx {
                    let d = s + q;
                    ln_abs -= kq as f64 * d.abs().ln();
                    if d < 0.0 && kq % 2 == 1 {
                        sign = -sign;
                    }
                }
            }
            for &z in &law.zeros {
                let d = s + z;
                ln_abs += d.abs().ln();
                if d < 0.0 {
                    sign = -sign;
                }
            }
            let g0 = sign * ln_abs.exp();
            if k == 1 {
                return Term { p, coef: vec![g0] };
            }
            // L = g'/g and its derivatives at s = -p.
            let lder: Vec<f64> = (0..k - 1)
                .map(|m| {
                    let mut acc = 0.0;
                    for &z in &law.zeros {
                        acc += (s + z).powi(-(m as i32) - 1);
                    }
                    for (jdx, &(q, kq)) in cl.iter().enumerate() {
                        if jdx != idx {
                            acc -= kq as f64 * (s + q).powi(-(m as i32) - 1);
                        }
                    }
                    let fact: f64 = (1..=m).map(|x| x as f64).product();
                    if m % 2 == 1 {
                        -fact * acc
                    } else {
                        fact * acc
                    }
                })
                .collect();
            let mut g = vec![g0];
            for m in 0..k - 1 {
                let mut v = 0.0;
                let mut binom = 1.0;
                for r in 0..=m {
                    v += binom * g[r] * lder[m - r];
                    binom = binom * (m - r) as f64 / (r + 1) as f64;
                }
                g.push(v);
            }
            // A_j = g^{(k-j)}(-p) / (k-j)!
            let coef = (1..=k)
                .map(|j| {
                    let d = k - j;
                    let fact: f64 = (1..=d).map(|x| x as f64).product();
                    g[d] / fact
                })
                .collect();
            Term { p, coef }
        })
        .collect()
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|x| (x as f64).ln()).sum()
}

/// Density and CDF of a finite law on `t_grid`.
pub fn density_cdf(law: &RationalExpLaw, t_grid: &[f64]) -> Result<DensityCdf> {
    if !law.is_finite() {
        return Err(Error::InfiniteLaw(
            "density inversion needs a finite pole list; use transforms or simulation".into(),
        ));
    }
    if law.poles.is_empty() {
        return Err(Error::InvalidArgument("law has no poles".into()));
    }
    if let Some(t) = t_grid.iter().find(|t| !(**t >= 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "time {t} must be nonnegative"
        )));
    }
    let terms = expand(law);
    let repeated = terms.iter().any(|t| t.coef.len() > 1);
    let mut density = Vec::with_capacity(t_grid.len());
    let mut cdf = Vec::with_capacity(t_grid.len());
    let mut negative = false;
    for &t in t_grid {
        let mut f = 0.0;
        let mut big_f = 0.0;
        let mut scale = 0.0f64;
        for term in &terms {
            let e = (-term.p * t).exp();
            for (jm1, &a) in term.coef.iter().enumerate() {
                let j = jm1 + 1;
                // A t^{j-1} e^{-pt} / (j-1)!
                let dens = if jm1 == 0 {
                    a * e
                } else if t == 0.0 {
                    0.0
                } else {
                    a * ((jm1 as f64) * t.ln() - term.p * t - ln_factorial(jm1)).exp()
                };
                f += dens;
                scale = scale.max(dens.abs());
                // integral: A / p^j * P(j, p t)
                let mass = a / term.p.powi(j as i32);
                big_f += if j == 1 {
                    mass * -(-term.p * t).exp_m1()
                } else {
                    mass * gamma_lr(j as f64, term.p * t)
                };
            }
        }
        if f < -1e-9 * scale.max(1.0) {
            negative = true;
        }
        density.push(f);
        cdf.push(big_f);
    }
    Ok(DensityCdf {
        t: t_grid.to_vec(),
        density,
        cdf,
        repeated_poles: repeated,
        negative_density: negative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hitting::{law_up, Provenance};
    use crate::rates::RateSpec;

    fn law(poles: Vec<f64>, zeros: Vec<f64>) -> RationalExpLaw {
        RationalExpLaw::new(
            poles,
            zeros,
            0.0,
            Provenance::Other {
                note: String::new(),
            },
        )
        .unwrap()
    }

    #[test]
    fn single_exponential() {
        let d = density_cdf(&law(vec![2.0], vec![]), &[0.0, 0.5, 1.0]).unwrap();
        for (k, t) in d.t.iter().enumerate() {
            assert!((d.density[k] - 2.0 * (-2.0 * t).exp()).abs() < 1e-15);
            assert!((d.cdf[k] - (1.0 - (-2.0 * t).exp())).abs() < 1e-15);
        }
    }

    #[test]
    fn two_stage_hypoexponential() {
        let l = law_up(&RateSpec::constant(1.0, 1.0).unwrap(), 0, 2).unwrap();
        let (l1, l2) = (l.poles[0], l.poles[1]);
        let ts = [0.0, 0.3, 1.0, 4.0];
        let d = density_cdf(&l, &ts).unwrap();
        for (k, &t) in ts.iter().enumerate() {
            let want = ((-l1 * t).exp() - (-l2 * t).exp()) * l1 * l2 / (l2 - l1);
            assert!((d.density[k] - want).abs() < 1e-14);
        }
        assert!(d.density[0].abs() < 1e-15);
        let far = density_cdf(&l, &[200.0]).unwrap();
        assert!((far.cdf[0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn repeated_pole_matches_erlang() {
        // Two equal poles: Erlang(2, 3).
        let d = density_cdf(&law(vec![3.0, 3.0], vec![]), &[0.5, 1.0]).unwrap();
        assert!(d.repeated_poles);
        for (k, &t) in [0.5f64, 1.0].iter().enumerate() {
            let want = 9.0 * t * (-3.0 * t).exp();
            assert!((d.density[k] - want).abs() < 1e-12);
            let cdf = 1.0 - (-3.0 * t).exp() * (1.0 + 3.0 * t);
            assert!((d.cdf[k] - cdf).abs() < 1e-12);
        }
    }

    #[test]
    fn repeated_pole_with_zero_and_simple_pole() {
        // phi = 1^2/(s+1)^2 * 4/(s+4) * (s+2)/2 vs direct residues.
        let l = law(vec![1.0, 1.0, 4.0], vec![2.0]);
        let d = density_cdf(&l, &[0.7]).unwrap();
        // Residues: phi = A1/(s+1) + A2/(s+1)^2 + B/(s+4), with
        // B = 2*(-2)/(9) = -4/9, A2 = 2*1/3 = 2/3, A1 = d/ds[2(s+2)/(s+4)] at -1 = 2*2/9 = 4/9.
        let t: f64 = 0.7;
        let want =
            4.0 / 9.0 * (-t).exp() + 2.0 / 3.0 * t * (-t).exp() - 4.0 / 9.0 * (-4.0 * t).exp();
        assert!(
            (d.density[0] - want).abs() < 1e-12,
            "{} vs {want}",
            d.density[0]
        );
    }

    #[test]
    fn infinite_law_is_refused() {
        let l = RationalExpLaw::new(
            vec![1.0],
            vec![],
            0.1,
            Provenance::Other {
                note: String::new(),
            },
        )
        .unwrap();
        assert!(matches!(
            density_cdf(&l, &[1.0]),
            Err(Error::InfiniteLaw(_))
        ));
    }
}

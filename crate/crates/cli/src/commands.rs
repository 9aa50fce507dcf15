use std::path::PathBuf;

use bdp_core::duality::{
    intertwining_residual, mean_triple, spectral_match, sst_law, sst_means_from_states,
    sst_moment_mgf_bounds,
};
use bdp_core::hitting::{
    density_cdf, evaluate_laplace, law_down_entrance, law_down_finite, law_lifetime_exit, law_up,
    moments, RationalExpLaw,
};
use bdp_core::numeric::log_grid;
use bdp_core::rates::{
    classify_boundary, mean_passage_down_reflected, mean_passage_up, BoundaryClass,
};
use bdp_core::separation::{beta_report, fitted_decay_rate, separation_curve};
use bdp_core::simulate::{
    default_level_schedule, empirical_laplace, ks_test, sample_hitting, sample_lifetime_exit,
    write_samples, HittingSample,
};
use bdp_core::spectral::{
    build_absorbed_bottom_reflected_top, build_absorbed_top, eigenvalues, limit_spectrum_entrance,
    limit_spectrum_ergodic, limit_spectrum_exit, LimitOptions,
};
use bdp_core::{Error, RateSpec, Result};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::{Report, SpectrumKind};

pub const DEFAULT_S_GRID: [f64; 4] = [0.1, 0.5, 1.0, 2.0];
const DEFAULT_SAMPLES: usize = 10_000;
const LIFETIME_TOLERANCE: f64 = 1e-3;
const KS_ALPHA: f64 = 0.01;
const HARD_TOL: f64 = 1e-6;

fn default_t_grid() -> Vec<f64> {
    (0..=40).map(|k| k as f64 * 0.25).collect()
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serializes")
}

fn fmt_state(s: Option<usize>) -> String {
    s.map_or_else(|| "inf".into(), |v| v.to_string())
}

pub fn classify(chain: &RateSpec, cfg: &RunConfig) -> Result<Report> {
    let rep = classify_boundary(chain, &cfg.policy());
    let mut out = Report::json(json!({ "report": to_value(&rep) }));
    if rep.class == BoundaryClass::Undetermined {
        out.code = 3;
    }
    Ok(out)
}

fn required(v: Option<usize>, what: &str) -> Result<usize> {
    v.ok_or_else(|| Error::InvalidArgument(format!("this spectrum needs {what}")))
}

pub fn spectrum(
    chain: &RateSpec,
    cfg: &RunConfig,
    kind: SpectrumKind,
    n: Option<usize>,
    big_n: Option<usize>,
    count: Option<usize>,
) -> Result<Report> {
    let opts = LimitOptions {
        count: count.or(cfg.limit.count),
        ..cfg.limit_options()
    };
    let kind = match kind {
        SpectrumKind::Auto => match classify_boundary(chain, &opts.policy).class {
            BoundaryClass::Exit => SpectrumKind::Exit,
            BoundaryClass::Entrance if n.is_some() => SpectrumKind::Entrance,
            BoundaryClass::Entrance => SpectrumKind::Ergodic,
            _ if n.is_some() && big_n.is_some() => SpectrumKind::Reflected,
            _ if n.is_some() => SpectrumKind::Absorbed,
            BoundaryClass::Undetermined => {
                return Err(Error::Undetermined(
                    "boundary class needed to pick a spectral limit".into(),
                ))
            }
            class => {
                return Err(Error::Refused {
                    reason: "no spectral limit for this boundary; pass --n for a finite window"
                        .into(),
                    class,
                })
            }
        },
        k => k,
    };
    let (payload, values) = match kind {
        SpectrumKind::Absorbed | SpectrumKind::Reflected => {
            let n = required(n, "--n")?;
            let (g, series) = if kind == SpectrumKind::Absorbed {
                (build_absorbed_top(chain, n)?, mean_passage_up(chain, n))
            } else {
                let big_n = required(big_n, "--big-n")?;
                (
                    build_absorbed_bottom_reflected_top(chain, n, big_n)?,
                    mean_passage_down_reflected(chain, n, big_n),
                )
            };
            let sp = eigenvalues(&g.symmetrize()?)?;
            let relative = (sp.reciprocal_sum - series).abs() / series.abs();
            let values = sp.values.clone();
            (
                json!({
                    "spectrum": to_value(&sp),
                    "eigentime": { "reciprocal_sum": sp.reciprocal_sum, "series": series, "relative": relative },
                }),
                values,
            )
        }
        SpectrumKind::Exit | SpectrumKind::Entrance | SpectrumKind::Ergodic => {
            let lim = match kind {
                SpectrumKind::Exit => limit_spectrum_exit(chain, &opts)?,
                SpectrumKind::Entrance => limit_spectrum_entrance(chain, n.unwrap_or(0), &opts)?,
                _ => limit_spectrum_ergodic(chain, &opts)?,
            };
            let values = lim.values().to_vec();
            (json!({ "limit": to_value(&lim) }), values)
        }
        SpectrumKind::Auto => unreachable!(),
    };
    let mut csv = String::from("index,lambda\n");
    for (k, v) in values.iter().enumerate() {
        csv.push_str(&format!("{k},{v}\n"));
    }
    let mut report = Report::json(payload);
    report.csv = Some(csv);
    Ok(report)
}

/// The passage law for `(i, n)`: upward, reflected downward, exit life time
/// or entrance descent, by the arguments and the chain's boundary.
pub fn law_for(
    chain: &RateSpec,
    i: Option<usize>,
    n: Option<usize>,
    big_n: Option<usize>,
    opts: &LimitOptions,
) -> Result<RationalExpLaw> {
    match (i, n) {
        (_, None) if i.is_none() => Err(Error::InvalidArgument(
            "start and target cannot both be infinity".into(),
        )),
        (Some(i), None) => law_lifetime_exit(chain, i, opts),
        (None, Some(n)) => law_down_entrance(chain, None, n, opts),
        (Some(i), Some(n)) if i < n => law_up(chain, i, n),
        (Some(i), Some(n)) if i > n => match big_n {
            Some(big_n) => law_down_finite(chain, i, n, big_n),
            None => law_down_entrance(chain, Some(i), n, opts),
        },
        _ => Err(Error::InvalidArgument("start and target coincide".into())),
    }
}

pub fn hitting(
    chain: &RateSpec,
    cfg: &RunConfig,
    i: Option<usize>,
    n: Option<Option<usize>>,
    big_n: Option<usize>,
    s_grid: Option<Vec<f64>>,
    t_grid: Option<Vec<f64>>,
) -> Result<Report> {
    let n =
        n.ok_or_else(|| Error::InvalidArgument("hitting needs a target --n (or inf)".into()))?;
    let opts = cfg.limit_options();
    let law = law_for(chain, i, n, big_n, &opts)?;
    let s_grid = s_grid.unwrap_or_else(|| DEFAULT_S_GRID.to_vec());
    let transform = s_grid
        .iter()
        .map(|&s| evaluate_laplace(&law, s))
        .collect::<Result<Vec<_>>>()?;
    let mut csv = String::from("s,value,lower,upper\n");
    for (s, b) in s_grid.iter().zip(&transform) {
        csv.push_str(&format!("{s},{},{},{}\n", b.mid(), b.lower, b.upper));
    }
    let mut payload = json!({
        "i": fmt_state(i),
        "n": fmt_state(n),
        "law": to_value(&law),
        "moments": to_value(&moments(&law)),
        "transform": s_grid.iter().zip(&transform).map(|(s, b)| json!({
            "s": s, "value": b.mid(), "lower": b.lower, "upper": b.upper,
        })).collect::<Vec<_>>(),
    });
    let mut extra = Vec::new();
    if law.is_finite() {
        let t_grid = t_grid.unwrap_or_else(default_t_grid);
        let dc = density_cdf(&law, &t_grid)?;
        let mut dcsv = String::from("t,density,cdf\n");
        for ((t, f), c) in t_grid.iter().zip(&dc.density).zip(&dc.cdf) {
            dcsv.push_str(&format!("{t},{f},{c}\n"));
        }
        payload["density"] = to_value(&dc);
        extra.push(("hitting_density.csv".to_string(), dcsv));
    }
    Ok(Report {
        payload,
        csv: Some(csv),
        extra_csv: extra,
        code: 0,
    })
}

fn check(name: &str, value: f64, bound: f64) -> Value {
    json!({ "check": name, "value": value, "bound": bound, "pass": value <= bound })
}

pub fn sst(
    chain: &RateSpec,
    cfg: &RunConfig,
    l_max: Option<u32>,
    fractions: Option<Vec<f64>>,
    window: usize,
) -> Result<Report> {
    let opts = cfg.limit_options();
    let law = sst_law(chain, &opts)?;
    let mean_upper = law.power_sum(1) + law.tail_sum;
    let fractions = fractions.unwrap_or_else(|| vec![0.1, 0.25, 0.5, 0.75, 0.9, 0.95]);
    let lambda: Vec<f64> = fractions.iter().map(|f| f / mean_upper).collect();
    let bounds = sst_moment_mgf_bounds(chain, l_max.unwrap_or(6), &lambda, &opts)?;
    let matched = spectral_match(chain, 5, &opts)?;
    let inter = intertwining_residual(chain, window)?;
    let triple = mean_triple(chain, &opts)?;
    let from_states = sst_means_from_states(chain, 5, &opts.policy)?;
    let checks = vec![
        check(
            "intertwining interior / scale",
            inter.interior / inter.scale,
            1e-10,
        ),
        check(
            "ergodic vs dual exit eigenvalues",
            matched.max_relative,
            HARD_TOL,
        ),
        check("E_0 tau = T = sum 1/lambda", triple.max_relative, HARD_TOL),
        json!({ "check": "moment and mgf bounds", "pass": bounds.all_hold() }),
    ];
    let code = if checks.iter().all(|c| c["pass"] == true) {
        0
    } else {
        5
    };
    let mut csv = String::from("s,value,lower,upper\n");
    for s in DEFAULT_S_GRID {
        let b = evaluate_laplace(&law, s)?;
        csv.push_str(&format!("{s},{},{},{}\n", b.mid(), b.lower, b.upper));
    }
    Ok(Report {
        payload: json!({
            "law": to_value(&law),
            "moment_bounds": to_value(&bounds),
            "spectral_match": to_value(&matched),
            "intertwining": to_value(&inter),
            "means": to_value(&triple),
            "means_from_states": from_states,
            "checks": checks,
        }),
        csv: Some(csv),
        extra_csv: Vec::new(),
        code,
    })
}

pub fn separation(
    chain: &RateSpec,
    cfg: &RunConfig,
    big_n: Option<usize>,
    states: Option<Vec<usize>>,
    t_grid: Option<Vec<f64>>,
) -> Result<Report> {
    let opts = cfg.limit_options();
    let t_grid = t_grid.unwrap_or_else(|| log_grid(0.01, 10.0, 20));
    let states = states.unwrap_or_else(|| (0..=10).collect());
    let rep = separation_curve(chain, big_n, &t_grid, &states, &opts)?;
    let beta = beta_report(chain, &opts)?;
    let decay = fitted_decay_rate(&rep.t_grid, &rep.sup_separation);
    let code = if rep.sst_bound_holds() && rep.tv_bound_holds() {
        0
    } else {
        5
    };
    Ok(Report {
        csv: Some(rep.to_csv()),
        payload: json!({
            "curve": to_value(&rep),
            "beta": to_value(&beta),
            "fitted_decay": decay,
            "sst_bound_holds": rep.sst_bound_holds(),
            "tv_bound_holds": rep.tv_bound_holds(),
        }),
        extra_csv: Vec::new(),
        code,
    })
}

pub fn simulate(
    chain: &RateSpec,
    cfg: &RunConfig,
    i: usize,
    n: Option<Option<usize>>,
    samples: Option<usize>,
    s_grid: Option<Vec<f64>>,
    store: Option<PathBuf>,
) -> Result<Report> {
    let n =
        n.ok_or_else(|| Error::InvalidArgument("simulate needs a target --n (or inf)".into()))?;
    let samples = samples.unwrap_or(DEFAULT_SAMPLES);
    let seed = cfg.seed.unwrap_or(0);
    let opts = cfg.limit_options();
    let s_grid = s_grid.unwrap_or_else(|| DEFAULT_S_GRID.to_vec());
    let (sample, levels): (HittingSample, Value) = match n {
        Some(n) => (
            sample_hitting(chain, i, n, samples, seed, &cfg.sim)?,
            Value::Null,
        ),
        None => {
            if i != 0 {
                return Err(Error::InvalidArgument(
                    "life-time sampling starts at 0".into(),
                ));
            }
            let schedule = default_level_schedule(chain, LIFETIME_TOLERANCE, &opts.policy);
            let lt = sample_lifetime_exit(
                chain,
                &schedule,
                seed,
                samples,
                LIFETIME_TOLERANCE,
                &opts.policy,
                &cfg.sim,
            )?;
            let levels = json!({
                "levels": to_value(&lt.levels),
                "bias_flagged": lt.bias_flagged,
                "tolerance": lt.tolerance,
            });
            (lt.sample, levels)
        }
    };
    // The law is a comparison, not a requirement: a chain without one still samples.
    let law = law_for(chain, Some(i), n, None, &opts).ok();
    let estimates = empirical_laplace(&sample, &s_grid);
    let mut rows = Vec::new();
    let mut csv = String::from("s,value,lower,upper,law_lower,law_upper\n");
    for e in &estimates {
        let b = law.as_ref().map(|l| evaluate_laplace(l, e.s)).transpose()?;
        let slack = 3.0 * e.standard_error + e.s * sample.bias_bound;
        let inside = b.map(|b| e.mean + slack >= b.lower && e.mean - slack <= b.upper);
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            e.s,
            e.mean,
            e.lower,
            e.upper,
            b.map_or(f64::NAN, |b| b.lower),
            b.map_or(f64::NAN, |b| b.upper)
        ));
        rows.push(json!({ "estimate": to_value(e), "law": b.map(|b| to_value(&b)), "within_3se": inside }));
    }
    let ks = match &law {
        Some(l) if l.is_finite() && sample.censored_count == 0 => {
            Some(ks_test(&sample, l, KS_ALPHA)?)
        }
        _ => None,
    };
    if let Some(path) = &store {
        write_samples(path, &sample, chain)?;
    }
    let exact_mean = law.as_ref().map(|l| to_value(&moments(l).mean));
    Ok(Report {
        payload: json!({
            "i": i,
            "n": fmt_state(n),
            "seed": seed,
            "n_samples": sample.n_samples,
            "completed": sample.values.len(),
            "censored": sample.censored_count,
            "mean": sample.mean(),
            "standard_error": sample.standard_error(),
            "bias_bound": sample.bias_bound,
            "law_mean": exact_mean,
            "lifetime": levels,
            "laplace": rows,
            "ks": ks.map(|k| to_value(&k)),
            "stored": store.map(|p| p.display().to_string()),
        }),
        csv: Some(csv),
        extra_csv: Vec::new(),
        code: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispatch_picks_the_case() {
        let opts = LimitOptions::default();
        let unit = RateSpec::constant(1.0, 1.0).unwrap();
        let law = law_for(&unit, Some(0), Some(2), None, &opts).unwrap();
        assert!((evaluate_laplace(&law, 1.0).unwrap().mid() - 0.2).abs() < 1e-12);
        assert!(law_for(&unit, Some(3), Some(1), Some(5), &opts)
            .unwrap()
            .is_finite());
        assert!(matches!(
            law_for(&unit, Some(0), None, None, &opts),
            Err(Error::Refused { .. })
        ));
        assert!(law_for(&unit, None, None, None, &opts).is_err());
        assert!(law_for(&unit, Some(2), Some(2), None, &opts).is_err());
    }
}

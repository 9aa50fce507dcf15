//! Browser bindings. Each export takes a gallery name and plain numbers and
//! returns a JSON string for the page to plot; errors come back as strings.

// `!(x > 0.0)` guards are deliberate: NaN must fail them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use bdp_core::hitting::{density_cdf, law_down_finite, law_up, moments};
use bdp_core::numeric::log_grid;
use bdp_core::rates::{classify_boundary, BoundaryClass, TailPolicy};
use bdp_core::separation::separation_curve as curve;
use bdp_core::spectral::{
    build_absorbed_top, build_reflected, limit_spectrum_ergodic, limit_spectrum_exit,
    lowest_eigenvalues, LimitOptions,
};
use bdp_core::{gallery, RateSpec};
use serde_json::json;
use wasm_bindgen::prelude::*;

type Out = Result<String, String>;

fn chain(name: &str) -> Result<RateSpec, String> {
    gallery::get(name).map_err(|e| e.to_string())
}

fn err(e: bdp_core::Error) -> String {
    e.to_string()
}

/// Gallery chains with their boundary classes.
#[wasm_bindgen]
pub fn gallery_list() -> String {
    let policy = TailPolicy::default();
    let rows: Vec<_> = gallery::all()
        .iter()
        .map(|(name, c)| {
            json!({
                "name": name,
                "description": c.description(),
                "class": classify_boundary(c, &policy).class,
            })
        })
        .collect();
    json!(rows).to_string()
}

/// Density and distribution function of `T_{i,n}` on `[0, t_max]`. Downward
/// passages use the chain reflected at `i`.
#[wasm_bindgen]
pub fn hitting_curves(name: &str, i: usize, n: usize, t_max: f64, points: usize) -> Out {
    if !(t_max > 0.0) || points < 2 {
        return Err("need t_max > 0 and at least two points".into());
    }
    let c = chain(name)?;
    let law = if i < n {
        law_up(&c, i, n)
    } else {
        law_down_finite(&c, i, n, i)
    }
    .map_err(err)?;
    let t: Vec<f64> = (0..points)
        .map(|k| t_max * k as f64 / (points - 1) as f64)
        .collect();
    let dc = density_cdf(&law, &t).map_err(err)?;
    Ok(json!({
        "t": t,
        "density": dc.density,
        "cdf": dc.cdf,
        "mean": moments(&law).mean.lower,
        "poles": law.poles,
        "zeros": law.zeros,
    })
    .to_string())
}

/// Lowest `count` eigenvalues of truncations at sizes `8, 16, ..., 2^max_pow`,
/// with the certified limit when the boundary has one.
#[wasm_bindgen]
pub fn spectrum_convergence(name: &str, count: usize, max_pow: u32) -> Out {
    if count == 0 || !(3..=12).contains(&max_pow) {
        return Err("need count >= 1 and max_pow in 3..=12".into());
    }
    let c = chain(name)?;
    let opts = LimitOptions::default();
    let class = classify_boundary(&c, &opts.policy).class;
    // Entrance chains are ergodic: reflect at the top. Otherwise absorb there.
    let ergodic = class == BoundaryClass::Entrance;
    let mut levels = Vec::new();
    let mut stopped = None;
    for p in 3..=max_pow {
        let size = 1usize << p;
        let values = if ergodic {
            build_reflected(&c, size)
        } else {
            build_absorbed_top(&c, size)
        }
        .and_then(|g| g.symmetrize())
        .and_then(|j| lowest_eigenvalues(&j, count));
        match values {
            Ok(sp) => levels.push(json!({ "size": size, "values": sp.values })),
            // Fast-growing rates leave f64 range; keep the sizes that fit.
            Err(e) if !levels.is_empty() => {
                stopped = Some(format!("stopped at size {size}: {e}"));
                break;
            }
            Err(e) => return Err(err(e)),
        }
    }
    let limit = match class {
        BoundaryClass::Exit => Some(limit_spectrum_exit(&c, &opts)),
        BoundaryClass::Entrance => Some(limit_spectrum_ergodic(&c, &opts)),
        _ => None,
    }
    .transpose()
    .map_err(err)?
    .map(|lim| {
        json!({
            "values": lim.values().iter().take(count).collect::<Vec<_>>(),
            "series": lim.target,
            "series_value": lim.target_value,
            "identity_relative": lim.identity_relative,
        })
    });
    Ok(json!({
        "class": class,
        "kind": if ergodic { "reflected" } else { "absorbed at top" },
        "levels": levels,
        "stopped": stopped,
        "limit": limit,
    })
    .to_string())
}

/// Separation `S(t)` and `s_0(t)` against the SST tail from 0, on a log grid
/// up to `t_max`, for start states `0..=max_state`.
#[wasm_bindgen]
pub fn separation_curve(name: &str, t_max: f64, points: usize, max_state: usize) -> Out {
    if !(t_max > 0.0) || points < 2 {
        return Err("need t_max > 0 and at least two points".into());
    }
    let c = chain(name)?;
    let t = log_grid(t_max * 1e-3, t_max, points);
    let states: Vec<usize> = (0..=max_state).collect();
    let rep = curve(&c, None, &t, &states, &LimitOptions::default()).map_err(err)?;
    let zero = &rep.states[0];
    Ok(json!({
        "t": rep.t_grid,
        "sup_separation": rep.sup_separation,
        "separation_0": zero.separation,
        "total_variation_0": zero.total_variation,
        "sst_tail_0_upper": zero.sst_tail.iter().map(|b| b.upper).collect::<Vec<_>>(),
        "beta_lower": rep.beta_lower,
        "window": rep.truncation.big_n,
        "violations": rep.sst_bound_violations,
    })
    .to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn parse(s: Out) -> Value {
        serde_json::from_str(&s.unwrap()).unwrap()
    }

    #[test]
    fn gallery_lists_classes() {
        let v: Value = serde_json::from_str(&gallery_list()).unwrap();
        assert_eq!(v[0]["name"], "unit");
        assert_eq!(v[0]["class"], "Natural");
    }

    #[test]
    fn hitting_on_the_unit_chain() {
        let v = parse(hitting_curves("unit", 0, 2, 10.0, 11));
        assert!((v["mean"].as_f64().unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(v["t"].as_array().unwrap().len(), 11);
        assert!(hitting_curves("nope", 0, 2, 1.0, 3).is_err());
        assert!(hitting_curves("unit", 3, 1, 5.0, 5).is_ok());
    }

    #[test]
    fn spectrum_levels_decrease_to_the_limit() {
        let v = parse(spectrum_convergence("exit-geometric", 3, 6));
        let levels = v["levels"].as_array().unwrap();
        let first = |k: usize| levels[k]["values"][0].as_f64().unwrap();
        assert!(first(levels.len() - 1) <= first(0));
        assert!(v["limit"]["identity_relative"].as_f64().unwrap() < 1e-6);
        assert!(parse(spectrum_convergence("unit", 2, 4))["limit"].is_null());
        let v = parse(spectrum_convergence("regular", 2, 12));
        assert!(v["stopped"].is_string());
    }

    #[test]
    fn separation_from_zero_is_below_its_sst_tail() {
        let v = parse(separation_curve("entrance-geometric", 10.0, 12, 3));
        let s = v["separation_0"].as_array().unwrap();
        let tail = v["sst_tail_0_upper"].as_array().unwrap();
        for (a, b) in s.iter().zip(tail) {
            assert!(a.as_f64().unwrap() <= b.as_f64().unwrap() + 1e-6);
        }
        assert!(separation_curve("unit", 1.0, 4, 2).is_err());
    }
}

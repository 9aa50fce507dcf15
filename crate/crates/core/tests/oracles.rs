//! Hand-derived values checked against the library.

use approx::assert_relative_eq;
use bdp_core::duality::{build_dual, intertwining_residual, sst_cdf_from_state, DualRates};
use bdp_core::hitting::{
    density_cdf, evaluate_laplace, law_down_entrance, law_down_finite, law_lifetime_exit, law_up,
    moments,
};
use bdp_core::rates::{
    build_measures, classify_boundary, series_r, series_s, series_t, BoundaryClass, TailPolicy,
};
use bdp_core::separation::{beta_report, transient_kernel, window_stationary};
use bdp_core::spectral::{
    build_absorbed_bottom_reflected_top, build_absorbed_top, dirichlet_residual, eigenvalues,
    limit_spectrum_exit, LimitOptions,
};
use bdp_core::{BirthDeathRates, RateSpec};

fn unit() -> RateSpec {
    RateSpec::constant(1.0, 1.0).unwrap()
}

fn exit_geometric() -> RateSpec {
    RateSpec::geometric(1.0, 1.0, 1.0, 2.0).unwrap()
}

fn entrance_geometric() -> RateSpec {
    RateSpec::geometric(1.0, 2.0, 1.0, 1.0).unwrap()
}

fn policy() -> TailPolicy {
    TailPolicy::default()
}

/// `R` for `a_i = 1, b_i = 2^i` from an exact rational sum of 60 terms.
const R_EXIT: f64 = 2.827_230_027_037_021_6;

#[test]
fn measures_by_hand() {
    let t = build_measures(&exit_geometric(), 4).unwrap();
    for (i, want) in [1.0, 1.0, 2.0, 8.0, 64.0].into_iter().enumerate() {
        assert_relative_eq!(t.mu(i), want, max_relative = 1e-14);
    }
    let t = build_measures(&entrance_geometric(), 3).unwrap();
    for (i, want) in [1.0, 0.5, 0.125, 1.0 / 64.0].into_iter().enumerate() {
        assert_relative_eq!(t.mu(i), want, max_relative = 1e-15);
    }
    let st = t.stationary().expect("entrance chain has finite mass");
    assert!(st
        .cumulative
        .windows(2)
        .all(|w| w[0] <= w[1] && w[1] <= 1.0 + 1e-15));
}

#[test]
fn series_oracles() {
    let p = policy();
    assert!(series_r(&unit(), &p).is_infinite());
    assert_relative_eq!(
        series_r(&exit_geometric(), &p).value().unwrap(),
        R_EXIT,
        max_relative = 1e-12
    );
    assert!(series_s(&unit(), 0, &p).is_infinite());
    let s0 = series_s(&entrance_geometric(), 0, &p).value().unwrap();
    let t = series_t(&entrance_geometric(), &p).value().unwrap();
    assert!(t <= s0);
    assert!(series_t(&unit(), &p).is_infinite());
}

#[test]
fn classes_of_the_examples() {
    let p = policy();
    assert_eq!(
        classify_boundary(&exit_geometric(), &p).class,
        BoundaryClass::Exit
    );
    assert_eq!(
        classify_boundary(&entrance_geometric(), &p).class,
        BoundaryClass::Entrance
    );
    let regular = RateSpec::geometric(1.0, 4.0, 2.0, 4.0).unwrap();
    let rep = classify_boundary(&regular, &p);
    assert_eq!(rep.class, BoundaryClass::Regular);
    assert_eq!(rep.dirichlet_unique, Some(false));
}

#[test]
fn generator_matrices() {
    let g = build_absorbed_top(&unit(), 2).unwrap();
    assert_eq!(g.diag, vec![-1.0, -2.0]);
    assert_eq!((g.sup.clone(), g.sub.clone()), (vec![1.0], vec![1.0]));
    let g = build_absorbed_top(&exit_geometric(), 3).unwrap();
    assert_eq!(g.diag, vec![-1.0, -3.0, -5.0]);
    assert_eq!(
        (g.sup.clone(), g.sub.clone()),
        (vec![1.0, 2.0], vec![1.0, 1.0])
    );
    let j = g.symmetrize().unwrap();
    let off: Vec<f64> = (0..2)
        .map(|k| j.apply(&unit_vec(3, k + 1))[k].abs())
        .collect();
    assert_relative_eq!(off[0], 1.0, max_relative = 1e-15);
    assert_relative_eq!(off[1], 2f64.sqrt(), max_relative = 1e-15);

    let g = build_absorbed_bottom_reflected_top(&unit(), 0, 2).unwrap();
    assert_eq!(g.diag, vec![-2.0, -1.0]);
    let g = build_absorbed_bottom_reflected_top(&unit(), 1, 3).unwrap();
    assert_eq!(g.diag, vec![-2.0, -1.0]);
    let g = build_absorbed_bottom_reflected_top(&entrance_geometric(), 4, 5).unwrap();
    assert_eq!(g.diag, vec![-32.0]);
}

fn unit_vec(n: usize, k: usize) -> Vec<f64> {
    (0..n).map(|i| if i == k { 1.0 } else { 0.0 }).collect()
}

#[test]
fn two_state_spectrum() {
    let g = build_absorbed_top(&unit(), 2).unwrap();
    let sp = eigenvalues(&g.symmetrize().unwrap()).unwrap();
    assert_relative_eq!(
        sp.values[0],
        (3.0 - 5f64.sqrt()) / 2.0,
        max_relative = 1e-14
    );
    assert_relative_eq!(
        sp.values[1],
        (3.0 + 5f64.sqrt()) / 2.0,
        max_relative = 1e-14
    );
    assert_relative_eq!(sp.reciprocal_sum, 3.0, max_relative = 1e-14);
    assert!(dirichlet_residual(&g, &sp).unwrap().passes(1e-10));
}

#[test]
fn exit_limit_lower_bound() {
    let lim = limit_spectrum_exit(&exit_geometric(), &LimitOptions::default()).unwrap();
    assert!(lim.values()[0] >= 1.0 / R_EXIT);
}

#[test]
fn finite_laws() {
    let b0 = RateSpec::constant(1.0, 1.0).unwrap();
    assert_relative_eq!(
        evaluate_laplace(&law_up(&b0, 0, 1).unwrap(), 1.0)
            .unwrap()
            .mid(),
        0.5
    );
    let law = law_up(&unit(), 0, 2).unwrap();
    let b = evaluate_laplace(&law, 1.0).unwrap();
    assert_relative_eq!(b.lower, 0.2, max_relative = 1e-14);
    assert_eq!(b.lower, b.upper);
    assert_relative_eq!(moments(&law).mean.lower, 3.0, max_relative = 1e-14);

    let law = law_up(&unit(), 1, 2).unwrap();
    assert_relative_eq!(
        evaluate_laplace(&law, 1.0).unwrap().mid(),
        0.4,
        max_relative = 1e-14
    );
    let m = moments(&law);
    assert_relative_eq!(m.mean.lower, 2.0, max_relative = 1e-14);
    assert_relative_eq!(m.variance.lower, 6.0, max_relative = 1e-13);

    let law = law_down_finite(&unit(), 2, 0, 2).unwrap();
    assert!(law.zeros.is_empty());
    assert_relative_eq!(moments(&law).mean.lower, 3.0, max_relative = 1e-14);
    let law = law_down_finite(&entrance_geometric(), 5, 4, 5).unwrap();
    assert_eq!(law.poles, vec![32.0]);
}

#[test]
fn two_pole_density() {
    let law = law_up(&unit(), 0, 2).unwrap();
    let (l1, l2) = (law.poles[0], law.poles[1]);
    let t = [0.0, 0.3, 1.0, 4.0, 200.0];
    let dc = density_cdf(&law, &t).unwrap();
    for (k, &t) in t.iter().enumerate() {
        let f = ((-l1 * t).exp() - (-l2 * t).exp()) * l1 * l2 / (l2 - l1);
        assert!((dc.density[k] - f).abs() < 1e-13, "t = {t}");
    }
    assert!((dc.cdf[4] - 1.0).abs() < 1e-8);
}

#[test]
fn infinite_laws() {
    let opts = LimitOptions::default();
    let law = law_lifetime_exit(&exit_geometric(), 0, &opts).unwrap();
    let b = evaluate_laplace(&law, 0.0).unwrap();
    assert_eq!((b.lower, b.upper), (1.0, 1.0));
    assert!(moments(&law).mean.contains(R_EXIT, 1e-9));
    for s in [0.5, 1.0, 2.0] {
        let b = evaluate_laplace(&law, s).unwrap();
        // the width is a difference of nearby numbers, good to a few ulps of upper
        assert!(b.width() <= s * law.tail_sum * b.upper + 4.0 * f64::EPSILON * b.upper);
    }

    let e = entrance_geometric();
    let s0 = series_s(&e, 0, &policy()).value().unwrap();
    let law = law_down_entrance(&e, None, 0, &opts).unwrap();
    assert!(moments(&law).mean.contains(s0, 1e-9 * s0));
    let law = law_down_entrance(&e, Some(1), 0, &opts).unwrap();
    let b = evaluate_laplace(&law, 0.0).unwrap();
    assert_relative_eq!(b.mid(), 1.0, max_relative = 1e-12);
}

#[test]
fn dual_by_hand() {
    let e = entrance_geometric();
    let d = DualRates::new(&e);
    assert_relative_eq!(d.birth(0), 3.0, max_relative = 1e-15);
    assert_relative_eq!(d.death(1), 2.0 / 3.0, max_relative = 1e-15);
    let model = build_dual(&e, &policy()).unwrap();
    assert_eq!(model.dual_report.class, BoundaryClass::Exit);
    let r = intertwining_residual(&e, 2).unwrap();
    assert!(r.interior <= 1e-12 * r.scale);
    assert!(r.last_row > 0.0);
}

#[test]
fn sst_cdf_identities() {
    let e = entrance_geometric();
    let t = [0.05, 0.2, 1.0, 3.0];
    let c0 = sst_cdf_from_state(&e, 0, &t, &policy()).unwrap();
    assert_eq!(c0.rho, 1.0);
    // Ordering P_i[tau <= t] >= P_{i-1}[zeta* <= t] at the bracket ends.
    for i in 1..=4 {
        let here = sst_cdf_from_state(&e, i, &t, &policy()).unwrap();
        let below = sst_cdf_from_state(&e, i - 1, &t, &policy()).unwrap();
        let prev_dual = if i == 1 {
            below.raw.clone()
        } else {
            below_dual(&e, i - 1, &t)
        };
        for (h, p) in here.raw.iter().zip(&prev_dual) {
            assert!(h.upper >= p.lower - 1e-12);
        }
    }
}

fn below_dual(e: &RateSpec, i: usize, t: &[f64]) -> Vec<bdp_core::hitting::Bracket> {
    let model = build_dual(e, &policy()).unwrap();
    bdp_core::duality::dual_lifetime_cdf(&model.dual, i, t, &policy())
        .unwrap()
        .0
}

#[test]
fn two_state_kernel_and_gap() {
    // a_1 = 3, b_0 = 2 on the window {0, 1}.
    let c = RateSpec::constant(3.0, 2.0).unwrap();
    let pi = window_stationary(&c, 1);
    for t in [0.0, 0.1, 0.7, 2.0] {
        let p = transient_kernel(&c, 1, t).unwrap();
        let want = pi[0] + pi[1] * (-5.0 * t).exp();
        assert!((p[0][0] - want).abs() < 1e-10, "t = {t}");
    }
    let e = entrance_geometric();
    let beta = beta_report(&e, &LimitOptions::default()).unwrap();
    assert!(beta.means.max_relative <= 1e-6);
}

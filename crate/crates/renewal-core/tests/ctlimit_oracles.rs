//! Continuous-time limit formulas against 60-digit reference values and
//! against each other (the fractional-Poisson pmf and the general state
//! probability reach the same numbers through different Prabhakar parameter
//! combinations).

use renewal_core::ctlimit::{
    ct_kernel_b, convergence_study, expected_arrivals_ct, fractional_poisson_pmf,
    gfpp_state_prob, prabhakar_density,
};

fn assert_close(got: f64, want: f64, tol: f64, what: &str) {
    assert!(
        (got - want).abs() <= tol,
        "{what}: got {got}, want {want} (diff {:.3e}, tol {tol:.1e})",
        (got - want).abs()
    );
}

#[test]
fn frozen_state_probabilities() {
    let laskin = [
        0.3760660214246419,
        0.34238755308513547,
        0.18336721913023982,
        0.07037211734345644,
    ];
    for (n, want) in laskin.iter().enumerate() {
        let got = fractional_poisson_pmf(0.9, 1.0, n, 1.0).unwrap();
        assert_close(got, *want, 1e-13, &format!("fractional Poisson n = {n}"));
    }

    let gfpp_general = [0.6390762836360023, 0.2666755843205741, 0.07503297769526562];
    for (n, want) in gfpp_general.iter().enumerate() {
        let got = gfpp_state_prob(0.574, 1.742, 1.0, n, 1.0).unwrap();
        assert_close(got, *want, 1e-13, &format!("state prob n = {n}"));
    }

    let gfpp_nu1 = [0.4133273409431063, 0.2851704723065279, 0.16281246897054957];
    for (n, want) in gfpp_nu1.iter().enumerate() {
        let got = gfpp_state_prob(0.6, 1.0, 1.0, n, 1.0).unwrap();
        assert_close(got, *want, 1e-13, &format!("nu = 1 state prob n = {n}"));
    }
}

#[test]
fn gfpp_at_nu_one_matches_fractional_poisson() {
    for alpha in [0.6, 0.9] {
        for t in [0.5, 1.0, 2.0] {
            for n in 0..=5 {
                let a = gfpp_state_prob(alpha, 1.0, 1.2, n, t).unwrap();
                let b = fractional_poisson_pmf(alpha, 1.2, n, t).unwrap();
                assert_close(a, b, 1e-10, &format!("alpha = {alpha}, t = {t}, n = {n}"));
            }
        }
    }
}

#[test]
fn frozen_densities() {
    let got = prabhakar_density(0.6, 1.2, 0.7, 0.5).unwrap();
    assert_close(got, 0.3016232577010296, 1e-13, "density (0.6, 1.2, 0.7, 0.5)");

    // alpha = 1, nu = 2: Erlang-2, xi0^2 t exp(-xi0 t).
    let erlang = prabhakar_density(1.0, 2.0, 1.3, 0.7).unwrap();
    assert_close(erlang, 0.47618615703179135, 1e-13, "Erlang-2 density");
    assert_close(
        erlang,
        1.3f64.powi(2) * 0.7 * (-1.3 * 0.7f64).exp(),
        1e-13,
        "Erlang-2 closed form",
    );
}

#[test]
fn frozen_kernel_values() {
    let frac = ct_kernel_b(0.6, 1.742, 0.8, 0.4).unwrap();
    assert!(!frac.has_delta);
    assert_close(frac.value, 2.086548981310715, 1e-12, "kernel non-integer order");

    let int = ct_kernel_b(0.5, 2.0, 0.8, 0.4).unwrap();
    assert!(int.has_delta);
    assert_close(int.value, 2.067299292922217, 1e-12, "kernel integer order");
}

#[test]
fn state_probabilities_normalize() {
    for (alpha, nu, xi0, t) in [(0.574, 1.742, 1.0, 1.0), (0.6, 1.0, 1.0, 2.0)] {
        let total: f64 = (0..=60)
            .map(|n| gfpp_state_prob(alpha, nu, xi0, n, t).unwrap())
            .sum();
        assert_close(total, 1.0, 1e-9, &format!("normalization at ({alpha}, {nu})"));
    }
}

#[test]
fn expected_arrivals_matches_panel_moment() {
    let (alpha, nu, xi0, t) = (0.574, 1.742, 1.0, 1.0);
    let mean = expected_arrivals_ct(alpha, nu, xi0, t).unwrap();
    let moment: f64 = (1..=60)
        .map(|n| n as f64 * gfpp_state_prob(alpha, nu, xi0, n, t).unwrap())
        .sum();
    assert_close(mean.value, moment, 1e-9, "layer sum vs first moment");
    assert!(mean.remainder_estimate < 1e-10);
}

#[test]
fn discrete_panel_approaches_the_limit() {
    // Full refinement ladders are covered by the acceptance suite; here two
    // grids confirm the errors shrink and are already small at h = 1/16.
    let rows = convergence_study(0.6, 1.0, 1.0, &[1.0], &[0.25, 0.0625], 4).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].state_err < rows[0].state_err);
    assert!(rows[1].density_err < rows[0].density_err);
    assert!(
        rows[1].state_err < 0.02,
        "state error at h = 1/16: {}",
        rows[1].state_err
    );
}

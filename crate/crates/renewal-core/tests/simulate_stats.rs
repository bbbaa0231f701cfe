//! Monte Carlo cross-validation: seeded simulations must reproduce the
//! analytic state panels and walk panels within binomial sampling bands.
//!
//! All runs are seeded, so every assertion here is deterministic: the bands
//! were verified to hold for these seeds and stay fixed forever.

use nalgebra::DMatrix;
use renewal_core::counting::{self, PdtpParams};
use renewal_core::dtrw::cox_transition;
use renewal_core::graph::{transition_matrix, Graph};
use renewal_core::simulate::{simulate_states, simulate_walk, SimConfig, WaitingLaw};

/// Fraction of cells allowed outside the 4-sigma band. With hundreds of
/// cells a few excursions are expected by chance alone (P ~ 6e-5 per cell
/// for a Gaussian; heavier for small-count cells).
const MAX_VIOLATION_FRACTION: f64 = 0.01;

/// Checks `|empirical - exact| <= 4 sqrt(exact (1 - exact) / n_paths)` on
/// every requested cell, with the analytic probability defining the band.
fn four_sigma_cells(
    cells: impl Iterator<Item = (f64, f64)>,
    n_paths: usize,
    label: &str,
) {
    let mut total = 0usize;
    let mut violations = 0usize;
    for (empirical, exact) in cells {
        total += 1;
        let sigma = (exact * (1.0 - exact) / n_paths as f64).sqrt();
        // A strictly-zero band (exact in {0, 1}) still tolerates the
        // granularity of one path.
        let band = (4.0 * sigma).max(1.0 / n_paths as f64);
        if (empirical - exact).abs() > band {
            violations += 1;
        }
    }
    assert!(total > 0);
    let fraction = violations as f64 / total as f64;
    assert!(
        fraction <= MAX_VIOLATION_FRACTION,
        "{label}: {violations}/{total} cells outside 4 sigma"
    );
}

#[test]
fn states_match_analytic_panel() {
    let params = PdtpParams::new(0.6, 1.742, 2.0).unwrap();
    let t_max = 50;
    let n_show = 10;
    let exact = counting::pdtp_state_panel(&params, n_show, t_max).unwrap();
    let config = SimConfig {
        seed: 1234,
        n_paths: 20_000,
        t_max,
        table_cap: 4 * t_max,
    };
    let panel = simulate_states(&WaitingLaw::Pdtp(params), &config).unwrap();
    four_sigma_cells(
        (0..=n_show).flat_map(|n| {
            let exact = &exact;
            let panel = &panel;
            (0..=t_max).map(move |t| (panel.freq[n][t], exact.value(n, t)))
        }),
        config.n_paths,
        "pdtp states",
    );
}

#[test]
fn sibuya_states_match_analytic_panel() {
    let alpha = 0.5;
    let t_max = 40;
    let n_show = 8;
    let exact = counting::sibuya_state_panel(alpha, n_show, t_max).unwrap();
    let config = SimConfig {
        seed: 77,
        n_paths: 20_000,
        t_max,
        table_cap: 4 * t_max,
    };
    let panel = simulate_states(&WaitingLaw::Sibuya { alpha }, &config).unwrap();
    four_sigma_cells(
        (0..=n_show).flat_map(|n| {
            let exact = &exact;
            let panel = &panel;
            (0..=t_max).map(move |t| (panel.freq[n][t], exact.value(n, t)))
        }),
        config.n_paths,
        "sibuya states",
    );
}

#[test]
fn walk_occupancy_matches_analytic_panel() {
    let params = PdtpParams::new(0.6, 1.742, 2.0).unwrap();
    let t_max = 30;
    let start = 0usize;
    let g = Graph::complete(5).unwrap();
    let (h, _) = transition_matrix(&g).unwrap();
    let states = counting::pdtp_state_panel(&params, t_max, t_max).unwrap();
    let exact = cox_transition(&states, &h, t_max).unwrap();
    let config = SimConfig {
        seed: 4321,
        n_paths: 20_000,
        t_max,
        table_cap: 4 * t_max,
    };
    let walk = simulate_walk(&WaitingLaw::Pdtp(params), &h, start, &config).unwrap();
    four_sigma_cells(
        (0..=t_max).flat_map(|t| {
            let exact = &exact;
            let walk = &walk;
            (0..5).map(move |j| (walk.freq[t][j], exact.value(t)[(start, j)]))
        }),
        config.n_paths,
        "k5 walk occupancy",
    );
}

#[test]
fn expected_arrivals_match_analytic_curve() {
    let params = PdtpParams::new(0.6, 1.5, 0.8).unwrap();
    let t_max = 40;
    let exact = counting::expected_arrivals(&params, t_max).unwrap();
    let config = SimConfig {
        seed: 5150,
        n_paths: 20_000,
        t_max,
        table_cap: 4 * t_max,
    };
    let panel = simulate_states(&WaitingLaw::Pdtp(params), &config).unwrap();
    for t in [5usize, 10, 20, 40] {
        let mean: f64 = (0..=t_max)
            .map(|n| n as f64 * panel.freq[n][t])
            .sum();
        // Conservative band: the count is bounded by t, so its variance is
        // at most t^2 / 4; the realized one is far smaller.
        let band = 4.0 * (t as f64) / 2.0 / (config.n_paths as f64).sqrt();
        assert!(
            (mean - exact.coeffs[t]).abs() <= band,
            "t = {t}: empirical mean {mean} vs {}",
            exact.coeffs[t]
        );
    }
}

#[test]
fn directed_chain_recovers_state_panel() {
    // On the one-way line, node index equals arrival count: the walk
    // simulator and the state simulator must estimate the same law.
    let alpha = 0.7;
    let t_max = 20;
    let n = t_max + 2;
    let mut shift = DMatrix::<f64>::zeros(n, n);
    for i in 0..n - 1 {
        shift[(i, i + 1)] = 1.0;
    }
    shift[(n - 1, n - 1)] = 1.0;
    let exact = counting::sibuya_state_panel(alpha, t_max, t_max).unwrap();
    let config = SimConfig {
        seed: 31337,
        n_paths: 20_000,
        t_max,
        table_cap: 4 * t_max,
    };
    let walk = simulate_walk(&WaitingLaw::Sibuya { alpha }, &shift, 0, &config).unwrap();
    four_sigma_cells(
        (0..=t_max).flat_map(|t| {
            let exact = &exact;
            let walk = &walk;
            (0..=t_max.min(n - 2)).map(move |j| (walk.freq[t][j], exact.value(j, t)))
        }),
        config.n_paths,
        "line walk vs states",
    );
}

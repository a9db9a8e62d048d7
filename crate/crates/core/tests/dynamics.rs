use std::f64::consts::PI;

use collective_mode::dynamics::{evolve_modes, max_volterra_step, renormalized_omega0_sq};
use collective_mode::{
    build_next_neighbor_model, caldeira_leggett_form, collective_frequency, collective_sector_modes, fourier_solution,
    gamma_transform, linear_response, solve_volterra, underdamped_closed_form, CollectiveForm, Error, Regime, TimeGrid,
};

const GAMMA0: f64 = 0.2;

/// Dense bath `ω̃ₙ = nΔ` up to a cutoff with `gₙ² = 2m²γ₀ω̃ₙ²Δ/π`, so that
/// `γ(t)` approximates `2γ₀δ(t)` and `Re γ̃(ω) ≈ γ₀` below the cutoff.
fn ohmic_bath(delta: f64, cutoff: f64, omega0_sq: f64) -> CollectiveForm {
    let m = 1.0;
    let freqs: Vec<f64> = (1..=(cutoff / delta).round() as usize).map(|n| n as f64 * delta).collect();
    let g: Vec<f64> = freqs.iter().map(|w| (2.0 * m * m * GAMMA0 * w * w * delta / PI).sqrt()).collect();
    let gamma_zero: f64 = g.iter().zip(&freqs).map(|(g, w)| g * g / (m * m * w * w)).sum();
    CollectiveForm::from_bath(m, 1.0, 0.5 * m * (omega0_sq + gamma_zero), &freqs, &g).unwrap()
}

#[test]
fn ohmic_bath_follows_the_damped_oscillator() {
    let form = ohmic_bath(0.01, 10.0, 1.0);
    let params = collective_frequency(&form);
    assert_eq!(params.regime, Regime::Underdamped);
    assert!((params.gamma0 - GAMMA0).abs() < 0.02 * GAMMA0, "fitted gamma0 {}", params.gamma0);
    let t_end = 3.0 / params.gamma_bar;
    assert!(t_end < 0.5 * form.recurrence_time());
    let h = max_volterra_step(&form);
    let grid = TimeGrid::new(h, (t_end / h) as usize + 1).unwrap();
    let numeric = solve_volterra(&form, 1.0, &grid).unwrap();
    let closed = underdamped_closed_form(&params, form.mass, 1.0, &grid).unwrap();
    let amp = 1.0 / (form.mass * params.omega_bar.unwrap());
    let err = numeric.max_deviation(&closed) / amp;
    assert!(err < 0.05, "relative deviation from the closed form {err}");
}

#[test]
fn ohmic_bath_transform_is_flat() {
    let form = ohmic_bath(0.01, 10.0, 1.0);
    for w in [0.5, 1.0, 2.0, 4.0] {
        let g = gamma_transform(&form, w, 0.05).unwrap();
        assert!((g.re - GAMMA0).abs() < 0.05 * GAMMA0, "Re gamma at {w}: {}", g.re);
    }
}

#[test]
fn fourier_inverse_matches_time_stepping() {
    let form = ohmic_bath(0.01, 10.0, 1.0);
    let (eps, dw, cut) = (0.02, 0.01, 400.0);
    let omegas: Vec<f64> = (0..(2.0 * cut / dw) as usize).map(|i| -cut + (i as f64 + 0.5) * dw).collect();
    let spectrum = fourier_solution(&form, 1.0, &omegas, eps).unwrap();
    let t_end = 10.0 / GAMMA0;
    let h = max_volterra_step(&form);
    let grid = TimeGrid::new(h, (t_end / h) as usize + 1).unwrap();
    let numeric = solve_volterra(&form, 1.0, &grid).unwrap();
    let mut worst = 0.0f64;
    for i in (0..grid.len).step_by(25) {
        let t = grid.time(i);
        let sum: f64 = omegas
            .iter()
            .zip(&spectrum)
            .map(|(w, x)| (x * collective_mode::Complex64::from_polar(1.0, -w * t)).re)
            .sum();
        let x = (eps * t).exp() * sum * dw;
        worst = worst.max((x - numeric.positions[i]).abs());
    }
    let amp = numeric.max_abs();
    assert!(worst < 0.02 * amp, "inverse transform off by {worst} of {amp}");
}

#[test]
fn short_impulse_matches_a_kick() {
    let form = caldeira_leggett_form(&build_next_neighbor_model(32, 1.0, 1.0, 1.0).unwrap()).unwrap();
    let h = max_volterra_step(&form) / 4.0;
    let grid = TimeGrid::new(h, 4000).unwrap();
    let mut force = vec![0.0; grid.len];
    force[0] = 1.0 / h;
    let resp = linear_response(&form, &force, &grid).unwrap();
    let kick = solve_volterra(&form, 1.0, &grid).unwrap();
    let amp = kick.max_abs();
    assert!(resp.integrated.max_deviation(&kick) < 1e-3 * amp);
    assert!(resp.convolution.max_deviation(&kick) < 1e-3 * amp);
    assert!(resp.integrated.max_deviation(&resp.convolution) < 1e-6 * amp);
}

#[test]
fn resonant_drive_dominates() {
    let form = ohmic_bath(0.02, 8.0, 1.0);
    let omega0 = renormalized_omega0_sq(&form).sqrt();
    let h = max_volterra_step(&form);
    let grid = TimeGrid::new(h, (90.0 / h) as usize).unwrap();
    let steady = |w: f64| {
        let force: Vec<f64> = grid.times().iter().map(|t| (w * t).cos()).collect();
        let r = linear_response(&form, &force, &grid).unwrap();
        r.integrated
            .positions
            .iter()
            .zip(&r.integrated.times)
            .filter(|(_, t)| **t > 60.0)
            .fold(0.0f64, |a, (x, _)| a.max(x.abs()))
    };
    let ratio = steady(omega0) / steady(2.0 * omega0);
    assert!(ratio > 5.0, "resonance ratio {ratio}");
}

#[test]
fn uncoupled_collective_mode_oscillates_freely() {
    let model = build_next_neighbor_model(16, 1.0, 1.0, 0.0).unwrap().with_uniform_coupling(0.3).unwrap();
    let form = caldeira_leggett_form(&model).unwrap();
    let w = (2.0 * form.k_tilde_11 / form.mass).sqrt();
    let h = max_volterra_step(&form);
    let grid = TimeGrid::new(h, (50.0 * 2.0 * PI / w / h) as usize).unwrap();
    let numeric = solve_volterra(&form, 1.0, &grid).unwrap();
    let worst =
        numeric.times.iter().zip(&numeric.positions).map(|(t, x)| (x - (w * t).sin() / w).abs()).fold(0.0, f64::max);
    assert!(worst * w < 1e-10, "drift {worst}");
}

#[test]
fn volterra_agrees_with_modes_on_small_chains() {
    for n in [2, 3, 5] {
        let form = caldeira_leggett_form(&build_next_neighbor_model(n, 1.0, 1.3, 0.7).unwrap()).unwrap();
        let h = max_volterra_step(&form) / 10.0;
        let grid = TimeGrid::new(h, 5000).unwrap();
        let exact = evolve_modes(&collective_sector_modes(&form).unwrap(), 1.0, &grid);
        let numeric = solve_volterra(&form, 1.0, &grid).unwrap();
        let rel = numeric.max_deviation(&exact) / exact.max_abs();
        assert!(rel < 1e-5, "N = {n}: {rel:e} over t = {}", grid.t_max());
    }
}

#[test]
fn oversized_step_is_refused() {
    let form = caldeira_leggett_form(&build_next_neighbor_model(8, 1.0, 1.0, 1.0).unwrap()).unwrap();
    let grid = TimeGrid::new(2.0 * max_volterra_step(&form), 100).unwrap();
    assert!(matches!(solve_volterra(&form, 1.0, &grid), Err(Error::StepTooLarge { .. })));
}

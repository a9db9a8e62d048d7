//! Time stepping of `Ẍ + Ω₀²X + ∫₀ᵗ γ(t−s) Ẋ(s) ds = f(t)`.
//!
//! Each step propagates the harmonic part exactly and integrates the memory
//! term `r = −∫γẊ`, linearly interpolated across the step, against the
//! oscillator's Green's function. The memory integral itself is a trapezoid
//! sum whose newest term `(h/2)γ(0)V_{n+1}` makes the step implicit in one
//! scalar. Forces are piecewise constant over `[tₙ, tₙ₊₁)`.

use super::{kernel_weights, renormalized_omega0_sq, TimeGrid, TrajectoryTable};
use crate::error::{Error, Result};
use crate::mapping::{collective_sector_modes, CollectiveForm};

/// Largest step the solver accepts, `0.1 / max(ω̃_max, Ω₀)`.
pub fn max_volterra_step(form: &CollectiveForm) -> f64 {
    let omega0 = renormalized_omega0_sq(form).abs().sqrt();
    0.1 / form.max_bath_frequency().max(omega0)
}

/// Kicked collective coordinate: `X(0) = 0`, `Ẋ(0) = P₀/m`.
pub fn solve_volterra(form: &CollectiveForm, p0: f64, grid: &TimeGrid) -> Result<TrajectoryTable> {
    check_step(form, grid)?;
    Ok(integrate(form, p0 / form.mass, None, grid))
}

#[derive(Debug, Clone)]
pub struct LinearResponse {
    /// Forced memory equation integrated from rest.
    pub integrated: TrajectoryTable,
    /// `∫ χ(t−t′) F(t′) dt′` over the normal modes.
    pub convolution: TrajectoryTable,
}

/// Response of the resting system to an external force sampled on `grid`,
/// sample `i` acting over `[tᵢ, tᵢ₊₁)`.
pub fn linear_response(form: &CollectiveForm, force: &[f64], grid: &TimeGrid) -> Result<LinearResponse> {
    if force.len() != grid.len {
        return Err(Error::DimensionMismatch(format!("{} force samples on a {}-point grid", force.len(), grid.len)));
    }
    check_step(form, grid)?;
    let m = form.mass;
    let accel: Vec<f64> = force.iter().map(|f| f / m).collect();
    let integrated = integrate(form, 0.0, Some(&accel), grid);

    // Each constant bin contributes (F/m)(c̃²/ω̄²)[cos ω̄(t−t_{n+1}) − cos ω̄(t−t_n)].
    let modes = collective_sector_modes(form)?;
    let h = grid.step;
    let mut positions = vec![0.0; grid.len];
    for (w, c) in modes.frequencies.iter().zip(&modes.x_coefficients) {
        let amp = c * c / (w * w);
        if amp == 0.0 {
            continue;
        }
        let (mut re, mut im) = (0.0, 0.0);
        for k in 0..grid.len {
            let t = grid.time(k);
            let (s, co) = (w * t).sin_cos();
            positions[k] += amp * (co * re - s * im);
            if k + 1 < grid.len {
                // accumulate F_k (e^{-iω t_{k+1}} − e^{-iω t_k})
                let (s1, c1) = (w * (t + h)).sin_cos();
                re += accel[k] * (c1 - co);
                im += accel[k] * (-s1 + s);
            }
        }
    }
    let convolution = TrajectoryTable { times: grid.times(), positions, momenta: None };
    Ok(LinearResponse { integrated, convolution })
}

fn check_step(form: &CollectiveForm, grid: &TimeGrid) -> Result<()> {
    let max_step = max_volterra_step(form);
    if grid.step > max_step * (1.0 + 1e-12) {
        return Err(Error::StepTooLarge { step: grid.step, max_step });
    }
    Ok(())
}

/// Exact one-step propagator of `Ẍ + qX = r(t)` with r linear over the step.
struct Propagator {
    c: f64,
    s_over: f64,
    ms: f64,
    a0: f64,
    a1: f64,
    b0: f64,
    b1: f64,
}

impl Propagator {
    fn new(q: f64, h: f64) -> Self {
        let x = q * h * h;
        let (c, s_over, a0, a1) = if x.abs() < 1e-2 {
            (series(x, 0), h * series(x, 1), h * h * series(x, 2), h * h * series(x, 3))
        } else if q > 0.0 {
            let w = q.sqrt();
            let half = (0.5 * w * h).sin();
            let one_minus_c = 2.0 * half * half;
            let s_over = (w * h).sin() / w;
            ((w * h).cos(), s_over, one_minus_c / q, (h - s_over) / (q * h))
        } else {
            let k = (-q).sqrt();
            let half = (0.5 * k * h).sinh();
            let one_minus_c = -2.0 * half * half;
            let s_over = (k * h).sinh() / k;
            ((k * h).cosh(), s_over, one_minus_c / q, (h - s_over) / (q * h))
        };
        Propagator { c, s_over, ms: -q * s_over, a0, a1, b0: s_over, b1: a0 / h }
    }
}

/// `Σₖ (−x)ᵏ / (2k + j)!`
fn series(x: f64, j: u32) -> f64 {
    let mut fact = (1..=j).map(f64::from).product::<f64>();
    let mut term_pow = 1.0;
    let mut sum = 0.0;
    for k in 0..10u32 {
        if k > 0 {
            fact *= f64::from(2 * k + j - 1) * f64::from(2 * k + j);
            term_pow *= -x;
        }
        sum += term_pow / fact;
    }
    sum
}

fn integrate(form: &CollectiveForm, v0: f64, accel: Option<&[f64]>, grid: &TimeGrid) -> TrajectoryTable {
    let h = grid.step;
    let len = grid.len;
    let weights = kernel_weights(form);
    let has_memory = weights.iter().any(|&w| w != 0.0);
    let gamma: Vec<f64> = if has_memory {
        (0..len)
            .map(|j| {
                let t = grid.time(j);
                weights.iter().zip(&form.bath_freqs).map(|(c, w)| c * (w * t).cos()).sum()
            })
            .collect()
    } else {
        vec![0.0; len]
    };
    let p = Propagator::new(renormalized_omega0_sq(form), h);
    let implicit = 1.0 + 0.5 * p.b1 * h * gamma[0];
    let mut x = vec![0.0; len];
    let mut v = vec![0.0; len];
    v[0] = v0;
    let mut r = 0.0;
    for n in 0..len.saturating_sub(1) {
        let memory = if has_memory {
            let mut acc = 0.5 * gamma[n + 1] * v[0];
            for j in 1..=n {
                acc += gamma[n + 1 - j] * v[j];
            }
            h * acc
        } else {
            0.0
        };
        let f = accel.map_or(0.0, |a| a[n]);
        let vn = (p.ms * x[n] + p.c * v[n] + (p.b0 - p.b1) * r - p.b1 * memory + p.b0 * f) / implicit;
        let r_next = -memory - 0.5 * h * gamma[0] * vn;
        x[n + 1] = p.c * x[n] + p.s_over * v[n] + (p.a0 - p.a1) * r + p.a1 * r_next + p.a0 * f;
        v[n + 1] = vn;
        r = r_next;
    }
    let m = form.mass;
    TrajectoryTable { times: grid.times(), positions: x, momenta: Some(v.iter().map(|u| m * u).collect()) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::evolve_modes;
    use crate::mapping::caldeira_leggett_form;
    use crate::model::build_next_neighbor_model;

    #[test]
    fn series_matches_closed_forms() {
        for &q in &[1e-3, 0.3, -0.4] {
            let h = 0.1;
            let s = Propagator::new(q, h);
            let w = q.abs().sqrt();
            let (c, so) =
                if q > 0.0 { ((w * h).cos(), (w * h).sin() / w) } else { ((w * h).cosh(), (w * h).sinh() / w) };
            assert!((s.c - c).abs() < 1e-15);
            assert!((s.s_over - so).abs() < 1e-15);
            assert!((s.a0 - (1.0 - c) / q).abs() < 1e-12);
        }
    }

    #[test]
    fn decoupled_oscillator_is_exact() {
        let f = CollectiveForm::from_bath(1.0, 1.0, 0.5, &[2.0, 3.0], &[0.0, 0.0]).unwrap();
        let grid = TimeGrid::new(0.02, 16000).unwrap();
        let x = solve_volterra(&f, 1.0, &grid).unwrap();
        for (t, v) in x.times.iter().zip(&x.positions) {
            assert!((v - t.sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn refuses_coarse_steps() {
        let f = caldeira_leggett_form(&build_next_neighbor_model(8, 1.0, 1.0, 1.0).unwrap()).unwrap();
        let h = 2.0 * max_volterra_step(&f);
        match solve_volterra(&f, 1.0, &TimeGrid::new(h, 10).unwrap()) {
            Err(Error::StepTooLarge { max_step, .. }) => assert!((max_step - 0.5 * h).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn matches_normal_modes() {
        let f = caldeira_leggett_form(&build_next_neighbor_model(32, 1.0, 1.0, 0.5).unwrap()).unwrap();
        let modes = collective_sector_modes(&f).unwrap();
        let h = 0.02 / f.max_bath_frequency();
        let grid = TimeGrid::new(h, (200.0 / h) as usize).unwrap();
        let exact = evolve_modes(&modes, 1.0, &grid);
        let approx = solve_volterra(&f, 1.0, &grid).unwrap();
        let omega0 = renormalized_omega0_sq(&f).sqrt();
        assert!(exact.max_deviation(&approx) < 1e-4 / omega0);
    }

    #[test]
    fn zero_force_stays_at_rest() {
        let f = caldeira_leggett_form(&build_next_neighbor_model(6, 1.0, 1.0, 0.5).unwrap()).unwrap();
        let grid = TimeGrid::new(0.01, 500).unwrap();
        let r = linear_response(&f, &vec![0.0; 500], &grid).unwrap();
        assert!(r.integrated.max_abs() == 0.0 && r.convolution.max_abs() == 0.0);
        assert!(linear_response(&f, &[0.0; 3], &grid).is_err());
    }
}

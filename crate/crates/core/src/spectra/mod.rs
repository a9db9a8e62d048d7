//! Transition strengths of X, their correlator, and smoothed spectral functions.

mod convolution;

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::dynamics::{gamma_transform_with, kernel_weights, renormalized_omega0_sq, OscillatorParams};
use crate::error::{positive, Error, Result};
use crate::mapping::{
    caldeira_leggett_form, full_system_modes, interaction_in_phonon_basis, mean_spacing, CollectiveForm,
};
use crate::model::{phonon_spectrum, SystemModel};

pub use convolution::{convolution_power_spectrum, general_observable_spectrum};

/// Normal modes of the (X, ξ) sector.
#[derive(Debug, Clone)]
pub struct QuantumModes {
    pub frequencies: Vec<f64>,
    /// X-component c̃ₙ of each normal mode.
    pub x_coefficients: Vec<f64>,
    pub mass: f64,
    pub hbar: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line {
    pub frequency: f64,
    pub weight: f64,
}

/// Sum of weighted delta functions, sorted by frequency.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DeltaComb {
    pub lines: Vec<Line>,
}

impl DeltaComb {
    pub fn new(mut lines: Vec<Line>) -> Self {
        lines.sort_by(|a, b| a.frequency.total_cmp(&b.frequency));
        DeltaComb { lines }
    }

    pub fn total_weight(&self) -> f64 {
        self.lines.iter().map(|l| l.weight).sum()
    }

    pub fn mean_spacing(&self) -> Option<f64> {
        mean_spacing(&self.lines.iter().map(|l| l.frequency).collect::<Vec<_>>())
    }

    /// Five mean line spacings.
    pub fn default_epsilon(&self) -> Option<f64> {
        self.mean_spacing().map(|d| 5.0 * d)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTable {
    pub omegas: Vec<f64>,
    pub values: Vec<f64>,
}

impl SpectrumTable {
    pub fn argmax(&self) -> Option<(f64, f64)> {
        let i = (0..self.values.len()).max_by(|&a, &b| self.values[a].total_cmp(&self.values[b]))?;
        Some((self.omegas[i], self.values[i]))
    }

    /// Full width at half maximum of the highest peak, with linear
    /// interpolation of the half-maximum crossings.
    pub fn fwhm(&self) -> Option<f64> {
        let i = (0..self.values.len()).max_by(|&a, &b| self.values[a].total_cmp(&self.values[b]))?;
        let half = 0.5 * self.values[i];
        let cross = |j: usize, k: usize| {
            let (x0, y0, x1, y1) = (self.omegas[j], self.values[j], self.omegas[k], self.values[k]);
            x0 + (half - y0) * (x1 - x0) / (y1 - y0)
        };
        let lo = (0..i).rev().find(|&j| self.values[j] < half).map(|j| cross(j, j + 1))?;
        let hi = (i + 1..self.values.len()).find(|&j| self.values[j] < half).map(|j| cross(j - 1, j))?;
        Some(hi - lo)
    }

    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        self.omegas.windows(2).zip(self.values.windows(2)).map(|(w, v)| 0.5 * (w[1] - w[0]) * (v[0] + v[1])).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }
}

/// `points` equally spaced values from `start` to `stop` inclusive.
pub fn uniform_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![start],
        _ => {
            let h = (stop - start) / (points - 1) as f64;
            (0..points).map(|i| start + i as f64 * h).collect()
        }
    }
}

/// Lines `(ω̃ₙ, gₙ²/(2mω̃ₙ))` of the bath spectral density.
pub fn sigma_comb(form: &CollectiveForm) -> DeltaComb {
    let g = form.bath_coupling();
    DeltaComb::new(
        form.bath_freqs
            .iter()
            .zip(&g)
            .map(|(&w, gn)| Line { frequency: w, weight: gn * gn / (2.0 * form.mass * w) })
            .collect(),
    )
}

pub fn sigma_resolvent(model: &SystemModel, omega: f64, epsilon: f64) -> Result<f64> {
    caldeira_leggett_form(model)?.sigma_resolvent(omega, epsilon)
}

/// Weak-coupling estimate of σ when `K = 𝒦 + δK`: the bath is taken to be the
/// free phonons lifted by the uniform part, `√(ωₙ² + 2N𝒦/m)`, and each couples
/// with `2kₙ`. Diagnostic only.
pub fn sigma_shifted_phonons(model: &SystemModel, kappa: f64) -> Result<DeltaComb> {
    let phonons = phonon_spectrum(model);
    let it = interaction_in_phonon_basis(model, &phonons)?;
    let n = model.n_particles();
    let m = model.mass();
    let shift = 2.0 * n as f64 * kappa / m;
    let lines = (1..n)
        .map(|j| {
            let w = (phonons.omega_sq[j] + shift).sqrt();
            let g = 2.0 * it.k_tilde[(0, j)];
            Line { frequency: w, weight: g * g / (2.0 * m * w) }
        })
        .collect();
    Ok(DeltaComb::new(lines))
}

/// Lines `(ω̄ₙ, (ħ/2m) c̃ₙ²/ω̄ₙ)`: the strengths `|⟨0|X̂|n⟩|²`.
pub fn strength_comb(modes: &QuantumModes) -> DeltaComb {
    let pref = modes.hbar / (2.0 * modes.mass);
    DeltaComb::new(
        modes
            .frequencies
            .iter()
            .zip(&modes.x_coefficients)
            .map(|(&w, c)| Line { frequency: w, weight: pref * c * c / w })
            .collect(),
    )
}

/// `S(t) = ⟨0|X̂(t)X̂|0⟩ = (ħ/2m) Σ (c̃ₙ²/ω̄ₙ) e^{−iω̄ₙt}`.
pub fn correlator_s(modes: &QuantumModes, t: f64) -> Complex64 {
    strength_comb(modes).lines.iter().map(|l| Complex64::from_polar(l.weight, -l.frequency * t)).sum()
}

/// Retarded response of X to a force, `χ(t) = −(2/ħ) θ(t) Im S(t)`.
pub fn response_function(modes: &QuantumModes, t: f64) -> f64 {
    if t < 0.0 {
        0.0
    } else {
        -2.0 / modes.hbar * correlator_s(modes, t).im
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Broadening {
    /// `(ε/π) / ((ω−ω₀)² + ε²)`
    Lorentzian,
    /// `exp(−(ω−ω₀)²/2ε²) / (ε√2π)`, whose inverse transform is `e^{−ε²t²/2}`.
    Gaussian,
}

/// Comb smoothed with a normalized Lorentzian of half width ε.
pub fn smoothed_spectrum(comb: &DeltaComb, epsilon: f64, grid: &[f64]) -> Result<SpectrumTable> {
    broadened_spectrum(comb, epsilon, grid, Broadening::Lorentzian)
}

pub fn broadened_spectrum(comb: &DeltaComb, epsilon: f64, grid: &[f64], kind: Broadening) -> Result<SpectrumTable> {
    positive("epsilon", epsilon)?;
    let values = grid
        .par_iter()
        .map(|&w| {
            comb.lines
                .iter()
                .map(|l| {
                    let x = w - l.frequency;
                    l.weight
                        * match kind {
                            Broadening::Lorentzian => epsilon / (PI * (x * x + epsilon * epsilon)),
                            Broadening::Gaussian => {
                                (-0.5 * x * x / (epsilon * epsilon)).exp() / (epsilon * (2.0 * PI).sqrt())
                            }
                        }
                })
                .sum()
        })
        .collect();
    Ok(SpectrumTable { omegas: grid.to_vec(), values })
}

/// How a smoothing width sits relative to the window `Ω₀ ≫ ε ≫ δω`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmoothingWindow {
    Inside,
    /// ε is under twice the line spacing: individual lines show through.
    BelowSpacing {
        epsilon: f64,
        spacing: f64,
    },
    /// ε is over half the peak frequency: the smoothing distorts the peak.
    AbovePeak {
        epsilon: f64,
        omega0: f64,
    },
}

pub fn smoothing_window(comb: &DeltaComb, epsilon: f64, omega0: f64) -> SmoothingWindow {
    if let Some(spacing) = comb.mean_spacing() {
        if epsilon < 2.0 * spacing {
            return SmoothingWindow::BelowSpacing { epsilon, spacing };
        }
    }
    if epsilon > 0.5 * omega0 {
        return SmoothingWindow::AbovePeak { epsilon, omega0 };
    }
    SmoothingWindow::Inside
}

/// The two algebraically equal Ohmic forms of the damped-oscillator spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct OhmicSpectra {
    /// `(ħ/mπ) θ(ω) ωγ₀ / ((Ω₀² − ω²)² + ω²γ₀²)`
    pub omega_form: SpectrumTable,
    /// `(ħγ̄₀/2πmΩ̄₀) θ(ω) [1/((ω−Ω̄₀)² + γ̄₀²) − 1/((ω+Ω̄₀)² + γ̄₀²)]`
    pub lorentzian_form: SpectrumTable,
}

pub fn ohmic_spectrum(params: &OscillatorParams, grid: &[f64], hbar: f64, mass: f64) -> Result<OhmicSpectra> {
    positive("hbar", hbar)?;
    positive("mass", mass)?;
    let wb = params.omega_bar.ok_or(Error::NotUnderdamped(params.regime.name()))?;
    let gb = params.gamma_bar;
    let omega_form = ohmic_spectrum_smoothed(params, grid, hbar, mass, 0.0)?;
    let pref = hbar * gb / (2.0 * PI * mass * wb);
    let values = grid
        .iter()
        .map(|&w| {
            if w <= 0.0 {
                0.0
            } else {
                pref * (1.0 / ((w - wb).powi(2) + gb * gb) - 1.0 / ((w + wb).powi(2) + gb * gb))
            }
        })
        .collect();
    Ok(OhmicSpectra { omega_form, lorentzian_form: SpectrumTable { omegas: grid.to_vec(), values } })
}

/// `(ħ/mπ) θ(ω) Im 1/(Ω₀² − z² − i z γ₀)` at `z = ω + iε`. ε = 0 gives the
/// ω-form of [`ohmic_spectrum`]; this form holds in every regime.
pub fn ohmic_spectrum_smoothed(
    params: &OscillatorParams,
    grid: &[f64],
    hbar: f64,
    mass: f64,
    epsilon: f64,
) -> Result<SpectrumTable> {
    positive("hbar", hbar)?;
    positive("mass", mass)?;
    if !(epsilon >= 0.0) {
        return Err(Error::InvalidArgument { name: "epsilon", reason: format!("must be nonnegative, got {epsilon}") });
    }
    let pref = hbar / (mass * PI);
    let g = Complex64::new(params.gamma0, 0.0);
    let values = grid
        .iter()
        .map(|&w| if w <= 0.0 { 0.0 } else { pref * resolvent_im(params.omega0_sq, w, epsilon, g) })
        .collect();
    Ok(SpectrumTable { omegas: grid.to_vec(), values })
}

fn resolvent_im(omega0_sq: f64, w: f64, epsilon: f64, gamma: Complex64) -> f64 {
    let z = Complex64::new(w, epsilon);
    (1.0 / (omega0_sq - z * z - Complex64::i() * z * gamma)).im
}

/// Smoothed spectrum from the response function of the memory equation,
/// `(ħ/mπ) θ(ω) Im 1/(Ω₀² − z² − i z γ̃_ε(ω))` at `z = ω + iε`.
pub fn fdt_spectrum(form: &CollectiveForm, grid: &[f64], epsilon: f64) -> Result<SpectrumTable> {
    positive("epsilon", epsilon)?;
    let weights = kernel_weights(form);
    let omega0_sq = renormalized_omega0_sq(form);
    let pref = form.hbar / (form.mass * PI);
    let values = grid
        .par_iter()
        .map(|&w| {
            if w <= 0.0 {
                0.0
            } else {
                let g = gamma_transform_with(&weights, &form.bath_freqs, w, epsilon);
                pref * resolvent_im(omega0_sq, w, epsilon, g)
            }
        })
        .collect();
    Ok(SpectrumTable { omegas: grid.to_vec(), values })
}

/// X-strengths of all 2N normal modes of the two chains, from the full
/// eigensolve. `exchange_parity` is +1 for modes symmetric under swapping
/// the chains and −1 for antisymmetric ones.
#[derive(Debug, Clone)]
pub struct FullSystemStrengths {
    pub frequencies: Vec<f64>,
    pub strengths: Vec<f64>,
    pub exchange_parity: Vec<f64>,
}

pub fn full_system_strengths(model: &SystemModel) -> FullSystemStrengths {
    let n = model.n_particles();
    let eig = full_system_modes(model);
    let s = 1.0 / ((2 * n) as f64).sqrt();
    let e = DVector::from_fn(2 * n, |i, _| if i < n { s } else { -s });
    let pref = model.hbar() / (2.0 * model.mass());
    let top = eig.values.last().copied().unwrap_or(0.0).abs();
    let mut out = FullSystemStrengths { frequencies: vec![], strengths: vec![], exchange_parity: vec![] };
    for k in 0..2 * n {
        let v = eig.vectors.column(k);
        let c = e.dot(&v);
        let lam = eig.values[k];
        let w = lam.max(0.0).sqrt();
        let parity: f64 = (0..n).map(|i| 2.0 * v[i] * v[n + i]).sum();
        out.frequencies.push(w);
        out.strengths.push(if lam > 1e-13 * top { pref * c * c / w } else { 0.0 });
        out.exchange_parity.push(parity);
    }
    out
}

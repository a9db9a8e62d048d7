//! Damped motion of the collective coordinate X after a momentum kick P₀ at
//! t = 0, by exact normal modes, by the memory-kernel equation
//! `Ẍ + Ω₀²X + ∫₀ᵗ γ(t−s) Ẋ(s) ds = F(t)/m`, and by the Ohmic closed form.

mod exact;
mod volterra;

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{positive, Error, Result};
use crate::mapping::CollectiveForm;

pub use exact::{envelope_regrowth, evolve_exact, evolve_full_system, evolve_modes, FullTrajectory, Regrowth};
pub use volterra::{linear_response, max_volterra_step, solve_volterra, LinearResponse};

/// Uniform time grid `tᵢ = i·step`, i = 0..len.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub step: f64,
    pub len: usize,
}

impl TimeGrid {
    pub fn new(step: f64, len: usize) -> Result<Self> {
        positive("step", step)?;
        if len == 0 {
            return Err(Error::InvalidArgument { name: "len", reason: "grid must have at least one point".into() });
        }
        Ok(TimeGrid { step, len })
    }

    /// `steps` intervals covering [0, t_max].
    pub fn spanning(t_max: f64, steps: usize) -> Result<Self> {
        positive("t_max", t_max)?;
        if steps == 0 {
            return Err(Error::InvalidArgument { name: "steps", reason: "need at least one step".into() });
        }
        TimeGrid::new(t_max / steps as f64, steps + 1)
    }

    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.step
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.time(i)).collect()
    }

    pub fn t_max(&self) -> f64 {
        self.time(self.len - 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    /// `m Ẋ(t)` when the route provides it.
    pub momenta: Option<Vec<f64>>,
}

impl TrajectoryTable {
    /// Largest pointwise distance between the positions of two trajectories.
    pub fn max_deviation(&self, other: &TrajectoryTable) -> f64 {
        self.positions.iter().zip(&other.positions).fold(0.0, |a, (x, y)| a.max((x - y).abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.positions.iter().fold(0.0, |a, x| a.max(x.abs()))
    }

    /// Keeps the samples with `t ≤ t_end`.
    pub fn truncated(&self, t_end: f64) -> TrajectoryTable {
        let k = self.times.iter().take_while(|&&t| t <= t_end).count();
        TrajectoryTable {
            times: self.times[..k].to_vec(),
            positions: self.positions[..k].to_vec(),
            momenta: self.momenta.as_ref().map(|p| p[..k].to_vec()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Underdamped,
    Critical,
    Overdamped,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Underdamped => "underdamped",
            Regime::Critical => "critical",
            Regime::Overdamped => "overdamped",
        }
    }
}

/// Damped-oscillator parameters of the collective mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    pub omega0_sq: f64,
    pub gamma0: f64,
    /// `√(Ω₀² − γ₀²/4)`, present only when underdamped.
    pub omega_bar: Option<f64>,
    pub gamma_bar: f64,
    pub regime: Regime,
    /// Set when Ω₀² ≤ 0: the renormalized potential no longer binds X.
    pub unstable: bool,
}

impl OscillatorParams {
    pub fn new(omega0_sq: f64, gamma0: f64) -> Self {
        let gamma_bar = 0.5 * gamma0;
        let unstable = !(omega0_sq > 0.0);
        let disc = omega0_sq - gamma_bar * gamma_bar;
        let regime = if unstable {
            Regime::Overdamped
        } else if disc.abs() <= 1e-12 * omega0_sq {
            Regime::Critical
        } else if disc > 0.0 {
            Regime::Underdamped
        } else {
            Regime::Overdamped
        };
        let omega_bar = (regime == Regime::Underdamped).then(|| disc.sqrt());
        OscillatorParams { omega0_sq, gamma0, omega_bar, gamma_bar, regime, unstable }
    }

    /// Parameters from the underdamped pair (Ω̄₀, γ̄₀).
    pub fn from_underdamped(omega_bar: f64, gamma_bar: f64) -> Self {
        OscillatorParams::new(omega_bar * omega_bar + gamma_bar * gamma_bar, 2.0 * gamma_bar)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0_sq.max(0.0).sqrt()
    }
}

/// `γ(t) = (1/m²) Σₙ (gₙ²/ω̃ₙ²) cos(ω̃ₙ t)`, as weights `gₙ²/(m²ω̃ₙ²)` per bath mode.
pub fn kernel_weights(form: &CollectiveForm) -> Vec<f64> {
    let m2 = form.mass * form.mass;
    form.bath_coupling().iter().zip(&form.bath_freqs).map(|(g, w)| g * g / (m2 * w * w)).collect()
}

pub fn damping_kernel(form: &CollectiveForm, t: f64) -> f64 {
    kernel_weights(form).iter().zip(&form.bath_freqs).map(|(c, w)| c * (w * t).cos()).sum()
}

/// `γ̃_ε(ω) = ∫₀^∞ e^{(iω−ε)t} γ(t) dt`, termwise in closed form.
pub fn gamma_transform(form: &CollectiveForm, omega: f64, epsilon: f64) -> Result<Complex64> {
    positive("epsilon", epsilon)?;
    Ok(gamma_transform_with(&kernel_weights(form), &form.bath_freqs, omega, epsilon))
}

pub(crate) fn gamma_transform_with(weights: &[f64], freqs: &[f64], omega: f64, epsilon: f64) -> Complex64 {
    let s = Complex64::new(epsilon, -omega);
    let s2 = s * s;
    weights.iter().zip(freqs).map(|(c, w)| *c * s / (s2 + w * w)).sum()
}

/// Renormalized frequency `Ω₀² = 2K̃₁₁/m − γ(0)`.
pub fn renormalized_omega0_sq(form: &CollectiveForm) -> f64 {
    2.0 * form.k_tilde_11 / form.mass - kernel_weights(form).iter().sum::<f64>()
}

/// Smoothing used to read an Ohmic damping rate off a discrete bath:
/// five mean bath spacings.
pub fn ohmic_fit_epsilon(form: &CollectiveForm) -> f64 {
    5.0 * form.mean_bath_spacing().unwrap_or(1.0)
}

/// Ω₀² and the Ohmic rate `γ₀ = Re γ̃_ε(Ω₀)` at ε = [`ohmic_fit_epsilon`].
pub fn collective_frequency(form: &CollectiveForm) -> OscillatorParams {
    let omega0_sq = renormalized_omega0_sq(form);
    let at = omega0_sq.max(0.0).sqrt();
    let weights = kernel_weights(form);
    let gamma0 = gamma_transform_with(&weights, &form.bath_freqs, at, ohmic_fit_epsilon(form)).re.max(0.0);
    OscillatorParams::new(omega0_sq, gamma0)
}

/// `X̃(ω) = P₀ / (2πm (Ω₀² − z² − i z γ̃_ε(ω)))` with `z = ω + iε`: the
/// transform of `X(t)e^{−εt}`.
pub fn fourier_solution(form: &CollectiveForm, p0: f64, omegas: &[f64], epsilon: f64) -> Result<Vec<Complex64>> {
    positive("epsilon", epsilon)?;
    let weights = kernel_weights(form);
    let omega0_sq = renormalized_omega0_sq(form);
    let pref = p0 / (2.0 * PI * form.mass);
    Ok(omegas
        .iter()
        .map(|&w| {
            let z = Complex64::new(w, epsilon);
            let g = gamma_transform_with(&weights, &form.bath_freqs, w, epsilon);
            let i = Complex64::i();
            pref / (omega0_sq - z * z - i * z * g)
        })
        .collect())
}

/// `X(t) = (P₀/mΩ̄₀) e^{−γ̄₀t} sin(Ω̄₀t)`.
pub fn underdamped_closed_form(
    params: &OscillatorParams,
    mass: f64,
    p0: f64,
    grid: &TimeGrid,
) -> Result<TrajectoryTable> {
    positive("mass", mass)?;
    let wb = params.omega_bar.ok_or(Error::NotUnderdamped(params.regime.name()))?;
    let gb = params.gamma_bar;
    let amp = p0 / (mass * wb);
    let times = grid.times();
    let positions = times.iter().map(|&t| amp * (-gb * t).exp() * (wb * t).sin()).collect();
    let momenta =
        times.iter().map(|&t| mass * amp * (-gb * t).exp() * (wb * (wb * t).cos() - gb * (wb * t).sin())).collect();
    Ok(TrajectoryTable { times, positions, momenta: Some(momenta) })
}

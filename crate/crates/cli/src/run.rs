//! The `run` pipeline: build, map, evolve, compute spectra, write tables.

use std::path::{Path, PathBuf};

use collective_mode::dynamics::{evolve_modes, max_volterra_step};
use collective_mode::spectra::{broadened_spectrum, ohmic_spectrum_smoothed, smoothing_window, SmoothingWindow};
use collective_mode::{
    caldeira_leggett_form, collective_frequency, collective_sector_modes, convolution_power_spectrum, correlator_s,
    fdt_spectrum, sigma_comb, smoothed_spectrum, solve_volterra, strength_comb, underdamped_closed_form, Broadening,
    CollectiveForm, DeltaComb, OscillatorParams, QuantumModes, SpectrumTable, SystemModel, TimeGrid, TrajectoryTable,
};
use serde::Serialize;

use crate::config::{Format, ModelKind, Scenario};
use crate::output::{create_dir, write_file, write_json, Table};
use crate::CliError;

/// Everything derived from a scenario before any optional route runs.
pub struct Analysis {
    pub model: SystemModel,
    pub form: CollectiveForm,
    pub modes: QuantumModes,
    pub params: OscillatorParams,
    pub p0: f64,
    pub grid: TimeGrid,
    pub exact: TrajectoryTable,
    pub comb: DeltaComb,
    pub epsilon: f64,
    pub omegas: Vec<f64>,
}

impl Analysis {
    pub fn new(scenario: &Scenario) -> Result<Self, CliError> {
        let cfg = &scenario.config;
        let model = scenario.build_model()?;
        let form = caldeira_leggett_form(&model)?;
        let modes = collective_sector_modes(&form)?;
        let params = collective_frequency(&form);
        let p0 = cfg.dynamics.p0;

        let t_max = cfg.dynamics.t_max.unwrap_or_else(|| default_window(&form, &params));
        let steps = cfg.dynamics.steps.unwrap_or_else(|| (t_max / (0.2 * max_volterra_step(&form))).ceil() as usize);
        let grid = TimeGrid::spanning(t_max, steps)?;
        let exact = evolve_modes(&modes, p0, &grid);

        let comb = strength_comb(&modes);
        let top = comb.lines.last().map_or(1.0, |l| l.frequency);
        let epsilon = cfg.spectra.epsilon.or_else(|| comb.default_epsilon()).unwrap_or(0.05 * top);
        let max_power = cfg.spectra.powers.iter().copied().max().unwrap_or(1).max(1);
        let omega_max = cfg.spectra.omega_max.unwrap_or(max_power as f64 * top + 10.0 * epsilon);
        let h = omega_max / (cfg.spectra.points - 1) as f64;
        // Power spectra need the broadened base to die out on both edges.
        let lead = if cfg.spectra.powers.is_empty() { 0 } else { (8.0 * epsilon / h).ceil() as i64 };
        let omegas = (-lead..cfg.spectra.points as i64).map(|i| i as f64 * h).collect();

        Ok(Analysis { model, form, modes, params, p0, grid, exact, comb, epsilon, omegas })
    }

    /// Scale turning X deviations into multiples of `P₀/(mΩ₀)`.
    pub fn amplitude(&self) -> f64 {
        self.p0.abs() / (self.form.mass * self.params.omega0())
    }

    /// `max |Im S(t) + (ħ/2P₀) X(t)|` over the trajectory grid.
    pub fn link_residual(&self) -> f64 {
        let c = self.form.hbar / (2.0 * self.p0);
        self.exact
            .times
            .iter()
            .zip(&self.exact.positions)
            .map(|(&t, x)| (correlator_s(&self.modes, t).im + c * x).abs())
            .fold(0.0, f64::max)
    }
}

/// Kick-response window `min(20/γ₀, t_rec/2)`, or 50 periods when neither is finite.
fn default_window(form: &CollectiveForm, params: &OscillatorParams) -> f64 {
    let t = (20.0 / params.gamma0).min(0.5 * form.recurrence_time());
    if t.is_finite() {
        t
    } else {
        50.0 * 2.0 * std::f64::consts::PI / params.omega0()
    }
}

pub fn relative_linf(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let diff = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    if scale > 0.0 {
        diff / scale
    } else {
        diff
    }
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub n_particles: usize,
    pub model_kind: &'static str,
    pub mass: f64,
    pub hbar: f64,
    pub k_tilde_11: f64,
    pub omega0_sq: f64,
    pub gamma0: f64,
    pub omega_bar0: Option<f64>,
    pub gamma_bar0: f64,
    pub regime: &'static str,
    pub unstable: bool,
    pub p0: f64,
    pub time_step: f64,
    pub t_max: f64,
    pub recurrence_time: Option<f64>,
    pub epsilon: f64,
    pub smoothing_window: String,
    pub sum_rules: SumRules,
    pub errors: ErrorNorms,
}

#[derive(Debug, Serialize)]
pub struct SumRules {
    /// `Σ c̃ₖ²`, one for a unit-normalized collective coordinate.
    pub x_weight: f64,
    /// `Σ Sₖ = ⟨0|X²|0⟩`.
    pub strength_total: f64,
    /// `Σ ωₖ Sₖ`, equal to `ħ/2m`.
    pub energy_weighted: f64,
    pub energy_weighted_expected: f64,
    pub sigma_total: f64,
    /// `∫ S̃_ε dω` over the output grid.
    pub smoothed_integral: f64,
}

#[derive(Debug, Serialize)]
pub struct ErrorNorms {
    /// `max |X_volterra − X_exact| · mΩ₀/P₀`.
    pub volterra_vs_exact: f64,
    pub closed_form_vs_exact: Option<f64>,
    /// Relative L∞ between the smoothed comb and the FDT route.
    pub smoothed_vs_fdt: f64,
    pub classical_quantum_link: f64,
}

fn window_label(w: SmoothingWindow) -> String {
    match w {
        SmoothingWindow::Inside => "inside".into(),
        SmoothingWindow::BelowSpacing { epsilon, spacing } => {
            format!("below_spacing: epsilon {epsilon:.4e} < 2 x spacing {spacing:.4e}")
        }
        SmoothingWindow::AbovePeak { epsilon, omega0 } => {
            format!("above_peak: epsilon {epsilon:.4e} > Omega0/2 with Omega0 = {omega0:.4e}")
        }
    }
}

pub struct RunOutput {
    pub directory: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: Summary,
}

pub fn run(scenario: &Scenario, out_dir: &Path, quiet: bool) -> Result<RunOutput, CliError> {
    let a = Analysis::new(scenario)?;
    let form = &a.form;
    let volterra = solve_volterra(form, a.p0, &a.grid)?;
    let closed = match a.params.omega_bar {
        Some(_) => Some(underdamped_closed_form(&a.params, form.mass, a.p0, &a.grid)?),
        None => None,
    };

    let len = a.grid.len;
    let trajectory = Table::new()
        .column("t", a.exact.times.iter().copied())
        .column("X_exact", a.exact.positions.iter().copied())
        .column("X_volterra", volterra.positions.iter().copied())
        .optional_column("X_closed_form", closed.as_ref().map(|c| c.positions.clone()), len);

    let sigma = sigma_comb(form);
    let sigma_table = Table::new()
        .column("omega", sigma.lines.iter().map(|l| l.frequency))
        .column("sigma", sigma.lines.iter().map(|l| l.weight));
    let strengths = Table::new()
        .column("omega", a.comb.lines.iter().map(|l| l.frequency))
        .column("strength", a.comb.lines.iter().map(|l| l.weight));

    let smooth = smoothed_spectrum(&a.comb, a.epsilon, &a.omegas)?;
    let fdt = fdt_spectrum(form, &a.omegas, a.epsilon)?;
    let ohmic = if a.params.omega_bar.is_some() {
        Some(ohmic_spectrum_smoothed(&a.params, &a.omegas, form.hbar, form.mass, a.epsilon)?.values)
    } else {
        None
    };
    let mut spectrum = Table::new()
        .column("omega", a.omegas.iter().copied())
        .column("S_smoothed", smooth.values.iter().copied())
        .column("S_fdt", fdt.values.iter().copied())
        .optional_column("S_ohmic", ohmic, a.omegas.len());
    let powers = &scenario.config.spectra.powers;
    if !powers.is_empty() {
        let base = broadened_spectrum(&a.comb, a.epsilon, &a.omegas, Broadening::Gaussian)?;
        for &n in powers {
            let s: SpectrumTable = convolution_power_spectrum(&base, n)?;
            spectrum = spectrum.column(&format!("S_power_{n}"), s.values);
        }
    }

    let window = smoothing_window(&a.comb, a.epsilon, a.params.omega0());
    if !quiet && window != SmoothingWindow::Inside {
        eprintln!("warning: smoothing width outside its window ({})", window_label(window));
    }
    let positive: Vec<usize> = (0..a.omegas.len()).filter(|&i| a.omegas[i] > 0.0).collect();
    let pick = |v: &[f64]| positive.iter().map(|&i| v[i]).collect::<Vec<_>>();
    let scale = 1.0 / a.amplitude();
    let energy_weighted: f64 = a.comb.lines.iter().map(|l| l.frequency * l.weight).sum();
    let summary = Summary {
        n_particles: a.model.n_particles(),
        model_kind: match scenario.config.model.kind {
            ModelKind::NextNeighbor => "next_neighbor",
            ModelKind::General => "general",
        },
        mass: form.mass,
        hbar: form.hbar,
        k_tilde_11: form.k_tilde_11,
        omega0_sq: a.params.omega0_sq,
        gamma0: a.params.gamma0,
        omega_bar0: a.params.omega_bar,
        gamma_bar0: a.params.gamma_bar,
        regime: a.params.regime.name(),
        unstable: a.params.unstable,
        p0: a.p0,
        time_step: a.grid.step,
        t_max: a.grid.t_max(),
        recurrence_time: Some(form.recurrence_time()).filter(|t| t.is_finite()),
        epsilon: a.epsilon,
        smoothing_window: window_label(window),
        sum_rules: SumRules {
            x_weight: a.modes.x_coefficients.iter().map(|c| c * c).sum(),
            strength_total: a.comb.total_weight(),
            energy_weighted,
            energy_weighted_expected: form.hbar / (2.0 * form.mass),
            sigma_total: sigma.total_weight(),
            smoothed_integral: smooth.integral(),
        },
        errors: ErrorNorms {
            volterra_vs_exact: a.exact.max_deviation(&volterra) * scale,
            closed_form_vs_exact: closed.as_ref().map(|c| a.exact.max_deviation(c) * scale),
            smoothed_vs_fdt: relative_linf(&pick(&smooth.values), &pick(&fdt.values)),
            classical_quantum_link: a.link_residual(),
        },
    };

    create_dir(out_dir)?;
    let mut files = Vec::new();
    let formats = &scenario.config.output.formats;
    for (stem, table) in
        [("trajectory", &trajectory), ("sigma", &sigma_table), ("strengths", &strengths), ("spectrum", &spectrum)]
    {
        if formats.contains(&Format::Csv) {
            let p = out_dir.join(format!("{stem}.csv"));
            write_file(&p, &table.to_csv())?;
            files.push(p);
        }
        if formats.contains(&Format::Json) {
            let p = out_dir.join(format!("{stem}.json"));
            write_file(&p, &table.to_json())?;
            files.push(p);
        }
    }
    let p = out_dir.join("summary.json");
    write_json(&p, &summary)?;
    files.push(p);
    Ok(RunOutput { directory: out_dir.to_path_buf(), files, summary })
}

use nalgebra::DVector;

use super::{TimeGrid, TrajectoryTable};
use crate::error::Result;
use crate::mapping::{caldeira_leggett_form, collective_sector_modes, full_system_modes};
use crate::model::{full_potential_matrix, SystemModel};
use crate::spectra::QuantumModes;

/// Normal-mode solution `X(t) = (P₀/m) Σ (c̃ₙ²/ω̄ₙ) sin(ω̄ₙt)`.
pub fn evolve_exact(model: &SystemModel, p0: f64, grid: &TimeGrid) -> Result<TrajectoryTable> {
    let modes = collective_sector_modes(&caldeira_leggett_form(model)?)?;
    Ok(evolve_modes(&modes, p0, grid))
}

pub fn evolve_modes(modes: &QuantumModes, p0: f64, grid: &TimeGrid) -> TrajectoryTable {
    let times = grid.times();
    let m = modes.mass;
    let mut positions = Vec::with_capacity(times.len());
    let mut momenta = Vec::with_capacity(times.len());
    for &t in &times {
        let mut x = 0.0;
        let mut p = 0.0;
        for (w, c) in modes.frequencies.iter().zip(&modes.x_coefficients) {
            let c2 = c * c;
            x += c2 / w * (w * t).sin();
            p += c2 * (w * t).cos();
        }
        positions.push(p0 / m * x);
        momenta.push(p0 * p);
    }
    TrajectoryTable { times, positions, momenta: Some(momenta) }
}

/// Both chains evolved in the original coordinates after the kick that gives
/// X momentum P₀.
#[derive(Debug, Clone)]
pub struct FullTrajectory {
    pub times: Vec<f64>,
    /// `X = (Σx − Σx̄)/√(2N)`.
    pub collective: Vec<f64>,
    /// Total energy, kinetic plus `zᵀQz`.
    pub energies: Vec<f64>,
}

pub fn evolve_full_system(model: &SystemModel, p0: f64, grid: &TimeGrid) -> FullTrajectory {
    let n = model.n_particles();
    let m = model.mass();
    let q = full_potential_matrix(model);
    let eig = full_system_modes(model);
    let s = 1.0 / ((2 * n) as f64).sqrt();
    let e = DVector::from_fn(2 * n, |i, _| if i < n { s } else { -s });
    let p_init = &e * p0;
    let amps: Vec<f64> = (0..2 * n).map(|k| eig.vectors.column(k).dot(&p_init)).collect();
    let top = eig.values.last().copied().unwrap_or(0.0).abs();
    let times = grid.times();
    let mut collective = Vec::with_capacity(times.len());
    let mut energies = Vec::with_capacity(times.len());
    for &t in &times {
        let mut z = DVector::zeros(2 * n);
        let mut p = DVector::zeros(2 * n);
        for (k, (&lam, &amp)) in eig.values.iter().zip(&amps).enumerate() {
            let (sin_term, cos_term) = if lam.abs() <= 1e-13 * top {
                (t, 1.0)
            } else {
                let w = lam.sqrt();
                ((w * t).sin() / w, (w * t).cos())
            };
            let v = eig.vectors.column(k);
            z.axpy(amp / m * sin_term, &v, 1.0);
            p.axpy(amp * cos_term, &v, 1.0);
        }
        collective.push(e.dot(&z));
        energies.push(p.norm_squared() / (2.0 * m) + z.dot(&(&q * &z)));
    }
    FullTrajectory { times, collective, energies }
}

/// Largest growth of the oscillation envelope after it has fallen to a minimum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regrowth {
    pub minimum_time: f64,
    pub minimum: f64,
    pub peak_time: f64,
    pub peak: f64,
    pub ratio: f64,
}

/// Envelope as the maximum of |X| over consecutive windows of length `window`;
/// returns the largest `envelope(t₂)/min_{t₁<t₂} envelope(t₁)` where the
/// minimum lies below the initial envelope.
pub fn envelope_regrowth(traj: &TrajectoryTable, window: f64) -> Option<Regrowth> {
    let h = traj.times.get(1)? - traj.times[0];
    let per = ((window / h).round() as usize).max(1);
    let env: Vec<(f64, f64)> = traj
        .positions
        .chunks(per)
        .enumerate()
        .filter(|(_, c)| c.len() == per)
        .map(|(i, c)| (traj.times[i * per], c.iter().fold(0.0f64, |a, x| a.max(x.abs()))))
        .collect();
    let first = env.first()?.1;
    let mut best: Option<Regrowth> = None;
    let mut low = env[0];
    for &(t, v) in &env[1..] {
        if low.1 < first && v > 0.0 {
            let ratio = v / low.1;
            if best.map_or(true, |b| ratio > b.ratio) {
                best = Some(Regrowth { minimum_time: low.0, minimum: low.1, peak_time: t, peak: v, ratio });
            }
        }
        if v < low.1 {
            low = (t, v);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::build_next_neighbor_model;
    use approx::assert_relative_eq;

    #[test]
    fn starts_at_rest_with_the_kick() {
        let m = build_next_neighbor_model(10, 1.0, 1.0, 0.6).unwrap();
        let x = evolve_exact(&m, 2.0, &TimeGrid::new(0.1, 10).unwrap()).unwrap();
        assert_eq!(x.positions[0], 0.0);
        assert_relative_eq!(x.momenta.unwrap()[0], 2.0, epsilon = 1e-12);
    }

    #[test]
    fn decoupled_motion_is_harmonic() {
        let m = build_next_neighbor_model(8, 1.0, 1.0, 0.0).unwrap().with_uniform_coupling(0.05).unwrap();
        let form = caldeira_leggett_form(&m).unwrap();
        let w = (2.0 * form.k_tilde_11).sqrt();
        let x = evolve_exact(&m, 1.0, &TimeGrid::new(0.05, 2000).unwrap()).unwrap();
        for (t, v) in x.times.iter().zip(&x.positions) {
            assert!((v - (w * t).sin() / w).abs() < 1e-12);
        }
    }

    #[test]
    fn full_system_agrees_and_conserves_energy() {
        let m = build_next_neighbor_model(12, 1.0, 1.0, 0.8).unwrap().with_uniform_coupling(0.02).unwrap();
        let grid = TimeGrid::new(0.25, 400).unwrap();
        let x = evolve_exact(&m, 1.0, &grid).unwrap();
        let full = evolve_full_system(&m, 1.0, &grid);
        for (a, b) in x.positions.iter().zip(&full.collective) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        for e in &full.energies {
            assert!((e - 0.5).abs() < 1e-10 * 0.5);
        }
    }

    #[test]
    fn regrowth_of_a_beat() {
        let grid = TimeGrid::new(0.01, 20000).unwrap();
        let times = grid.times();
        let positions = times.iter().map(|t| (0.05 * t).cos().abs() * t.sin()).collect();
        let traj = TrajectoryTable { times, positions, momenta: None };
        let r = envelope_regrowth(&traj, 6.3).unwrap();
        assert!(r.ratio > 4.0);
        assert!(r.minimum_time > 25.0 && r.minimum_time < 35.0, "{r:?}");
    }
}
